//! Figures of merit and their optimization over the normalized AB family.
//!
//! Along A ∈ [0, 1/2π], B = 1/2π − A the average of any isotropic score is
//! affine in A, so the optimum sits at an endpoint. For a score that
//! decreases with θ that endpoint is B = 0, the random-axis measurement.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::bloch::{overlap2, random_direction, BlochVector};
use crate::estimator::{Estimator, GuessingForm};
use crate::quad::{adaptive_simpson, integrate_piecewise};
use crate::rng::{run_split, Purpose};
use crate::{Error, Result};

/// Objective spread below which a scan is reported as a tie.
pub const TIE_TOL: f64 = 1e-12;
/// Points in the default A-scan.
pub const DEFAULT_SCAN_POINTS: usize = 1001;

const QUAD_TOL: f64 = 1e-14;

/// Score as a function of the angle between guess and input, non-increasing
/// in θ, given on a grid over [0, π] and linearly interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedMerit {
    theta: Vec<f64>,
    scores: Vec<f64>,
}

impl TabulatedMerit {
    pub fn new(theta: Vec<f64>, scores: Vec<f64>) -> Result<Self> {
        if theta.len() < 2 || theta.len() != scores.len() {
            return Err(Error::InvalidTable("need at least two nodes and one score per node".into()));
        }
        if theta[0] != 0.0 || (theta[theta.len() - 1] - PI).abs() > 1e-12 {
            return Err(Error::InvalidTable("θ-grid must span [0, π]".into()));
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
        if theta.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidTable("θ-grid must be strictly increasing".into()));
        }
        if scores.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return Err(Error::InvalidTable("scores must lie in [0, 1]".into()));
        }
        if scores.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidTable("scores must be non-increasing in θ".into()));
        }
        Ok(Self { theta, scores })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(f: F, nodes: usize) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::InvalidTable("need at least two nodes".into()));
        }
        let theta: Vec<f64> = (0..nodes)
            .map(|i| if i + 1 == nodes { PI } else { PI * i as f64 / (nodes - 1) as f64 })
            .collect();
        let scores = theta.iter().map(|&t| f(t)).collect();
        Self::new(theta, scores)
    }

    pub fn constant(score: f64) -> Result<Self> {
        Self::new(vec![0.0, PI], vec![score, score])
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.scores.windows(2).all(|w| w[1] < w[0])
    }

    pub fn score(&self, theta: f64) -> f64 {
        let theta = theta.clamp(0.0, PI);
        let i = match self.theta.partition_point(|&t| t <= theta) {
            0 => 0,
            k => (k - 1).min(self.theta.len() - 2),
        };
        let (x0, x1) = (self.theta[i], self.theta[i + 1]);
        self.scores[i] + (self.scores[i + 1] - self.scores[i]) * (theta - x0) / (x1 - x0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeritFunction {
    /// cos²(θ/2) = |⟨guess|input⟩|².
    Fidelity,
    MonotoneTabulated(TabulatedMerit),
}

impl MeritFunction {
    pub fn score(&self, theta: f64) -> f64 {
        match self {
            Self::Fidelity => (0.5 * theta).cos().powi(2),
            Self::MonotoneTabulated(t) => t.score(theta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeritReport {
    pub value: f64,
    #[serde(rename = "A")]
    pub a: Option<f64>,
    #[serde(rename = "B")]
    pub b: Option<f64>,
    pub method: Method,
    pub standard_error: Option<f64>,
    pub trials: Option<u64>,
}

/// ∫₀^π score(θ) P(θ) 2π sin θ dθ by adaptive quadrature.
pub fn average_merit(form: &GuessingForm, merit: &MeritFunction) -> f64 {
    let integrand = |t: f64| merit.score(t) * form.density(t) * 2.0 * PI * t.sin();
    match merit {
        MeritFunction::Fidelity => adaptive_simpson(integrand, 0.0, PI, QUAD_TOL),
        MeritFunction::MonotoneTabulated(table) => integrate_piecewise(integrand, table.theta(), 0.0, PI, QUAD_TOL),
    }
}

/// Average fidelity in closed form: (2π/3)(2A + B).
pub fn fidelity_closed_form(form: &GuessingForm) -> f64 {
    2.0 * PI / 3.0 * (2.0 * form.a() + form.b())
}

/// [`average_merit`] wrapped as a report; Fidelity uses the closed form.
pub fn merit_report(form: &GuessingForm, merit: &MeritFunction) -> MeritReport {
    let (value, method) = match merit {
        MeritFunction::Fidelity => (fidelity_closed_form(form), Method::Analytic),
        MeritFunction::MonotoneTabulated(_) => (average_merit(form, merit), Method::Quadrature),
    };
    MeritReport { value, a: Some(form.a()), b: Some(form.b()), method, standard_error: None, trials: None }
}

/// The "reversed" estimator: report −m̂ whenever m̂ would be guessed. Swaps A and B.
pub fn reverse_outcomes(form: &GuessingForm) -> GuessingForm {
    form.swapped()
}

/// Physical realization of [`reverse_outcomes`]: wraps an estimator and flips its guess.
#[derive(Debug, Clone)]
pub struct Reversed<E>(pub E);

impl<E: Estimator> Estimator for Reversed<E> {
    fn estimate<R: Rng + ?Sized>(&self, input: &BlochVector, rng: &mut R) -> BlochVector {
        self.0.estimate(input, rng).antipode()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub merit_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Argmax {
    Form(GuessingForm),
    /// The objective is flat across the family.
    Tie,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub argmax: Argmax,
    pub value: f64,
    pub scan: Vec<ScanRow>,
}

impl Optimum {
    pub fn is_tie(&self) -> bool {
        self.argmax == Argmax::Tie
    }
}

/// Average merit at `points` equally spaced A on [0, 1/2π] with B = 1/2π − A.
pub fn merit_scan(merit: &MeritFunction, points: usize) -> Result<Vec<ScanRow>> {
    if points < 2 {
        return Err(Error::InvalidConfig("a scan needs at least two points".into()));
    }
    (0..points)
        .map(|i| {
            let frac = if i + 1 == points { 1.0 } else { i as f64 / (points - 1) as f64 };
            let form = GuessingForm::from_a_fraction(frac)?;
            Ok(ScanRow { a: form.a(), b: form.b(), merit_value: average_merit(&form, merit) })
        })
        .collect()
}

/// Grid scan plus endpoint check over the normalized family.
pub fn optimize_ab(merit: &MeritFunction) -> Result<Optimum> {
    optimize_over(merit, DEFAULT_SCAN_POINTS)
}

/// [`optimize_ab`] with a custom scan resolution. The scan always contains both endpoints.
pub fn optimize_over(merit: &MeritFunction, points: usize) -> Result<Optimum> {
    let scan = merit_scan(merit, points)?;
    let (lo, hi) = scan
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.merit_value), hi.max(r.merit_value)));
    if hi - lo <= TIE_TOL {
        return Ok(Optimum { argmax: Argmax::Tie, value: hi, scan });
    }
    let best = scan
        .iter()
        .copied()
        .reduce(|best, r| if r.merit_value > best.merit_value { r } else { best })
        .expect("non-empty scan");
    Ok(Optimum { argmax: Argmax::Form(GuessingForm::new(best.a, best.b)?), value: best.merit_value, scan })
}

/// Deviation of the middle point from the chord through the two ends.
pub fn collinearity_defect(rows: &[ScanRow]) -> f64 {
    let (first, last) = (rows[0], rows[rows.len() - 1]);
    let mid = rows[rows.len() / 2];
    let slope = (last.merit_value - first.merit_value) / (last.a - first.a);
    (mid.merit_value - (first.merit_value + slope * (mid.a - first.a))).abs()
}

/// CSV with columns `A,B,merit_value`, followed by one `#` summary line
/// naming the argmax row (or the tie).
pub fn scan_csv(optimum: &Optimum) -> String {
    let mut out = String::from("A,B,merit_value\n");
    for r in &optimum.scan {
        out.push_str(&format!("{},{},{}\n", r.a, r.b, r.merit_value));
    }
    match optimum.argmax {
        Argmax::Form(f) => out.push_str(&format!("# argmax A={} B={} merit_value={}\n", f.a(), f.b(), optimum.value)),
        Argmax::Tie => out.push_str(&format!("# tie merit_value={}\n", optimum.value)),
    }
    out
}

/// Full protocol: isotropic input, one guess, score |⟨guess|input⟩|².
/// Returns the sample mean and its standard error.
pub fn monte_carlo_fidelity<E: Estimator + Sync>(
    strategy: &E,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<MeritReport> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let parts = run_split(seed, Purpose::FIDELITY, trials, workers, |rng, n| {
        let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
        for _ in 0..n {
            let input = random_direction(rng);
            let guess = strategy.estimate(&input, rng);
            let score = overlap2(&guess, &input);
            sum += score;
            sum_sq += score * score;
        }
        (sum, sum_sq)
    });
    let (sum, sum_sq) = parts.iter().fold((0.0, 0.0), |(s, q), (a, b)| (s + a, q + b));
    let n = trials as f64;
    let mean = sum / n;
    let var = if trials > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(MeritReport {
        value: mean,
        a: None,
        b: None,
        method: Method::MonteCarlo,
        standard_error: Some((var / n).sqrt()),
        trials: Some(trials),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::EstimatorStrategy;
    use proptest::prelude::*;
    use rand::Rng;

    const TWO_PI_INV: f64 = 1.0 / (2.0 * PI);

    /// Test-only estimator that knows the input.
    struct Oracle;

    impl Estimator for Oracle {
        fn estimate<R: Rng + ?Sized>(&self, input: &BlochVector, _rng: &mut R) -> BlochVector {
            *input
        }
    }

    fn monotone_suite() -> Vec<TabulatedMerit> {
        vec![
            TabulatedMerit::from_fn(|t| (1.0 + t.cos()).powi(2) / 4.0, 181).unwrap(),
            TabulatedMerit::from_fn(|t| 1.0 - t / PI, 2).unwrap(),
            TabulatedMerit::from_fn(|t| (0.5 * t).cos().powi(6), 361).unwrap(),
            TabulatedMerit::from_fn(|t| (-3.0 * t).exp(), 91).unwrap(),
            TabulatedMerit::new(vec![0.0, 0.5, 1.0, PI], vec![1.0, 0.9, 0.2, 0.1]).unwrap(),
        ]
    }

    #[test]
    fn tabulated_merit_validation() {
        assert!(TabulatedMerit::new(vec![0.0, PI], vec![0.2, 0.3]).is_err());
        assert!(TabulatedMerit::new(vec![0.0, PI], vec![1.2, 0.3]).is_err());
        assert!(TabulatedMerit::new(vec![0.0, 1.0], vec![1.0, 0.3]).is_err());
        assert!(TabulatedMerit::constant(0.4).is_ok());
        assert!(!TabulatedMerit::constant(0.4).unwrap().is_strictly_decreasing());
        assert!(monotone_suite().iter().all(TabulatedMerit::is_strictly_decreasing));
    }

    #[test]
    fn fidelity_examples() {
        let f = MeritFunction::Fidelity;
        let best = GuessingForm::massar_popescu();
        assert!((average_merit(&best, &f) - 2.0 / 3.0).abs() < 1e-10);
        assert!((average_merit(&GuessingForm::uniform(), &f) - 0.5).abs() < 1e-10);
        assert!((average_merit(&best.swapped(), &f) - 1.0 / 3.0).abs() < 1e-10);
        assert_eq!(merit_report(&best, &f).method, Method::Analytic);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for i in 0..=20 {
            let form = GuessingForm::from_a_fraction(i as f64 / 20.0).unwrap();
            let q = average_merit(&form, &MeritFunction::Fidelity);
            assert!((q - fidelity_closed_form(&form)).abs() < 1e-10);
        }
        let unnormalized = GuessingForm::new(0.3, 0.7).unwrap();
        let q = average_merit(&unnormalized, &MeritFunction::Fidelity);
        assert!((q - fidelity_closed_form(&unnormalized)).abs() < 1e-10);
    }

    #[test]
    fn fidelity_optimum_is_b_zero() {
        let opt = optimize_ab(&MeritFunction::Fidelity).unwrap();
        match opt.argmax {
            Argmax::Form(f) => {
                assert_eq!(f.b(), 0.0);
                assert!((f.a() - TWO_PI_INV).abs() < 1e-15);
            }
            Argmax::Tie => panic!("fidelity is not flat"),
        }
        assert!((opt.value - 2.0 / 3.0).abs() < 1e-10);
        assert!(collinearity_defect(&opt.scan) < 1e-10);
    }

    #[test]
    fn constant_merit_is_a_tie() {
        let opt = optimize_ab(&MeritFunction::MonotoneTabulated(TabulatedMerit::constant(0.7).unwrap())).unwrap();
        assert!(opt.is_tie());
        assert!((opt.value - 0.7).abs() < 1e-12);
        assert!(scan_csv(&opt).ends_with(&format!("# tie merit_value={}\n", opt.value)));
    }

    #[test]
    fn monotone_merits_peak_at_b_zero() {
        for table in monotone_suite() {
            let merit = MeritFunction::MonotoneTabulated(table);
            let opt = optimize_ab(&merit).unwrap();
            let Argmax::Form(f) = opt.argmax else { panic!("unexpected tie") };
            assert_eq!(f.b(), 0.0);
            // Independent check: best point of the scan is its last row.
            let best = opt.scan.iter().map(|r| r.merit_value).fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(best, opt.scan.last().unwrap().merit_value);
            assert!(collinearity_defect(&opt.scan) < 1e-10);
        }
    }

    #[test]
    fn squared_fidelity_matches_its_closed_form() {
        // score = cos⁴(θ/2); with u = cos²(θ/2), ∫ = 4π ∫₀¹ u² (A u + B(1 − u)) du = 4π(A/4 + B/12).
        let table = TabulatedMerit::from_fn(|t| (0.5 * t).cos().powi(4), 20001).unwrap();
        let merit = MeritFunction::MonotoneTabulated(table);
        let form = GuessingForm::massar_popescu();
        let exact = 4.0 * PI * (form.a() / 4.0 + form.b() / 12.0);
        assert!((average_merit(&form, &merit) - exact).abs() < 1e-7);
    }

    #[test]
    fn reversal() {
        let best = GuessingForm::massar_popescu();
        assert_eq!(reverse_outcomes(&best), GuessingForm::new(0.0, TWO_PI_INV).unwrap());
        assert_eq!(reverse_outcomes(&GuessingForm::uniform()), GuessingForm::uniform());
        assert_eq!(reverse_outcomes(&reverse_outcomes(&best)), best);
        let v = average_merit(&reverse_outcomes(&best), &MeritFunction::Fidelity);
        assert!((v - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn scan_csv_layout() {
        let opt = optimize_ab(&MeritFunction::Fidelity).unwrap();
        let csv = scan_csv(&opt);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "A,B,merit_value");
        assert_eq!(lines.len(), DEFAULT_SCAN_POINTS + 2);
        assert!(lines.last().unwrap().starts_with("# argmax A="));
        let first: Vec<f64> = lines[1].split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(first[0], 0.0);
        assert!(merit_scan(&MeritFunction::Fidelity, 1).is_err());
    }

    #[test]
    fn monte_carlo_massar_popescu() {
        let r = monte_carlo_fidelity(&EstimatorStrategy::MassarPopescu, 1_000_000, 42, 2).unwrap();
        let se = r.standard_error.unwrap();
        assert!((se - 2.4e-4).abs() < 0.3e-4, "{se}");
        assert!((r.value - 2.0 / 3.0).abs() < 4.0 * se, "{r:?}");
    }

    #[test]
    fn monte_carlo_oracle_scores_one() {
        let r = monte_carlo_fidelity(&Oracle, 10_000, 1, 1).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        assert!(r.standard_error.unwrap() < 1e-15);
    }

    #[test]
    fn monte_carlo_agrees_with_average_merit() {
        for (frac, seed) in [(0.5, 3u64), (0.0, 4), (0.75, 5)] {
            let form = GuessingForm::from_a_fraction(frac).unwrap();
            let r = monte_carlo_fidelity(&EstimatorStrategy::ab(form).unwrap(), 1_000_000, seed, 2).unwrap();
            let exact = average_merit(&form, &MeritFunction::Fidelity);
            assert!((r.value - exact).abs() < 4.0 * r.standard_error.unwrap(), "{frac}: {r:?}");
        }
    }

    #[test]
    fn reversed_estimator_realizes_reversed_form() {
        let r = monte_carlo_fidelity(&Reversed(EstimatorStrategy::MassarPopescu), 1_000_000, 8, 2).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 4.0 * r.standard_error.unwrap());
    }

    #[test]
    fn monte_carlo_is_reproducible_per_worker_count() {
        let a = monte_carlo_fidelity(&EstimatorStrategy::MassarPopescu, 50_000, 9, 3).unwrap();
        let b = monte_carlo_fidelity(&EstimatorStrategy::MassarPopescu, 50_000, 9, 3).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert!(monte_carlo_fidelity(&Oracle, 0, 1, 1).is_err());
    }

    proptest! {
        #[test]
        fn fidelity_is_conserved_under_reversal(frac in 0.0f64..=1.0) {
            let f = GuessingForm::from_a_fraction(frac).unwrap();
            let sum = average_merit(&f, &MeritFunction::Fidelity)
                + average_merit(&reverse_outcomes(&f), &MeritFunction::Fidelity);
            prop_assert!((sum - 1.0).abs() < 1e-10);
        }

        #[test]
        fn average_merit_is_affine_in_a(x in 0.0f64..=1.0, y in 0.0f64..=1.0, w in 0.0f64..=1.0) {
            let merit = MeritFunction::MonotoneTabulated(
                TabulatedMerit::from_fn(|t| (1.0 + t.cos()).powi(2) / 4.0, 91).unwrap(),
            );
            let at = |f: f64| average_merit(&GuessingForm::from_a_fraction(f).unwrap(), &merit);
            let mixed = at(w * x + (1.0 - w) * y);
            prop_assert!((mixed - (w * at(x) + (1.0 - w) * at(y))).abs() < 1e-10);
        }
    }
}
