//! The no-signaling constraint as executable checks.
//!
//! If the receiver's estimator behaves differently on the two decompositions
//! {(p, ẑ), (1−p, −ẑ)} and {(½, θ̂), (½, θ̂′)} of the same mixture, the sender
//! can signal by choosing a measurement basis. For every outcome direction m̂
//! the estimator must therefore satisfy
//!
//! ```text
//! ½ P(m̂|θ̂) + ½ P(m̂|θ̂′) = p P(m̂|ẑ) + (1−p) P(m̂|−ẑ)
//! ```
//!
//! [`constraint_residual`] evaluates both sides on a grid, [`derive_ab_form`]
//! and [`fit_ab_least_squares`] recover the AB parameters, and
//! [`run_discrimination_experiment`] is the operational test: count guesses
//! in a cap around ẑ under each decomposition and compare.

use std::f64::consts::PI;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::bloch::{angle_between, BlochVector};
use crate::ensembles::{standard_decomposition, symmetric_decomposition, EnsembleDecomposition};
use crate::estimator::{DensityHistogram, Estimator, GuessingForm};
use crate::quad::adaptive_simpson;
use crate::rng::{run_split, Purpose};
use crate::{Error, Result};

/// z below this: no signaling detectable.
pub const NOT_DETECTABLE_Z: f64 = 4.0;
/// z above this: signaling detectable.
pub const DETECTABLE_Z: f64 = 5.0;
/// Outcome directions used for the residual grid.
pub const DEFAULT_DIRECTIONS: usize = 200;
/// Number of p-values on [0, 1] used for the residual grid.
pub const DEFAULT_P_POINTS: usize = 101;

/// `n` quasi-uniform directions on a Fibonacci lattice.
pub fn fibonacci_directions(n: usize) -> Vec<BlochVector> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let s = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            BlochVector::normalize(s * phi.cos(), s * phi.sin(), z).expect("lattice point is non-zero")
        })
        .collect()
}

/// `n` equally spaced p-values on [0, 1].
pub fn p_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

/// |LHS − RHS| of the mixture-equality constraint, one row per p.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintResidual {
    p_values: Vec<f64>,
    residuals: Vec<Vec<f64>>,
}

impl ConstraintResidual {
    pub fn p_values(&self) -> &[f64] {
        &self.p_values
    }

    /// `residuals()[i][j]` belongs to `p_values()[i]` and the j-th direction.
    pub fn residuals(&self) -> &[Vec<f64>] {
        &self.residuals
    }

    pub fn max(&self) -> f64 {
        self.residuals.iter().flatten().fold(0.0, |m, &r| m.max(r))
    }

    pub fn rms(&self) -> f64 {
        let n = self.residuals.iter().map(Vec::len).sum::<usize>();
        if n == 0 {
            return 0.0;
        }
        (self.residuals.iter().flatten().map(|r| r * r).sum::<f64>() / n as f64).sqrt()
    }

    /// Largest residual for a single p.
    pub fn max_at(&self, index: usize) -> f64 {
        self.residuals[index].iter().fold(0.0, |m, &r| m.max(r))
    }
}

/// Evaluates both sides of the constraint at every `m̂` in `m_grid` for one p.
pub fn constraint_residual<F: Fn(f64) -> f64>(
    density: F,
    p: f64,
    m_grid: &[BlochVector],
) -> Result<ConstraintResidual> {
    constraint_residual_over(density, &[p], m_grid)
}

/// [`constraint_residual`] over several p-values.
pub fn constraint_residual_over<F: Fn(f64) -> f64>(
    density: F,
    ps: &[f64],
    m_grid: &[BlochVector],
) -> Result<ConstraintResidual> {
    let mut residuals = Vec::with_capacity(ps.len());
    for &p in ps {
        let sym = symmetric_decomposition(p)?;
        let (theta, theta_prime) = (sym.members()[0].1, sym.members()[1].1);
        let row = m_grid
            .iter()
            .map(|m| {
                let lhs = 0.5 * density(angle_between(m, &theta)) + 0.5 * density(angle_between(m, &theta_prime));
                let rhs = p * density(angle_between(m, &BlochVector::Z))
                    + (1.0 - p) * density(angle_between(m, &BlochVector::MINUS_Z));
                (lhs - rhs).abs()
            })
            .collect();
        residuals.push(row);
    }
    Ok(ConstraintResidual { p_values: ps.to_vec(), residuals })
}

/// Outcome of [`derive_ab_form`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbDerivation {
    pub form: GuessingForm,
    /// max over the θ-grid of |P(θ) − (A cos²(θ/2) + B sin²(θ/2))|.
    pub residual: f64,
}

/// θ-grid points used by [`derive_ab_form`]; includes π/2.
pub const DERIVATION_GRID: usize = 1801;

/// Reads A = P(0) and B = P(π) off an isotropic density (the m̂ = ẑ
/// endpoints) and reports how far the density is from the AB-form they fix.
pub fn derive_ab_form<F: Fn(f64) -> f64>(density_at: F) -> Result<AbDerivation> {
    let form = GuessingForm::new(density_at(0.0), density_at(PI))?;
    let last = DERIVATION_GRID - 1;
    let residual = (0..DERIVATION_GRID)
        .map(|k| PI * k as f64 / last as f64)
        .map(|t| (density_at(t) - form.density(t)).abs())
        .fold(0.0, f64::max);
    Ok(AbDerivation { form, residual })
}

/// Weighted least-squares fit of α + β cos θ to a density histogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbFit {
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub se_alpha: f64,
    pub se_beta: f64,
    #[serde(rename = "se_A")]
    pub se_a: f64,
    #[serde(rename = "se_B")]
    pub se_b: f64,
    pub chi2: f64,
    pub dof: usize,
}

impl AbFit {
    /// The fitted (A, B) as a form; fails if either came out negative.
    pub fn form(&self) -> Result<GuessingForm> {
        GuessingForm::new(self.a, self.b)
    }
}

const FIT_REWEIGHT_PASSES: usize = 4;

/// Fits α + β t at the solid-angle midpoint t of each bin.
///
/// Bin variances are Poisson, count / (N ΔΩ)², first from the observed
/// counts and then from the fitted model's predicted counts, each floored at
/// one count. The standard errors come from the final covariance matrix.
pub fn fit_ab_least_squares(hist: &DensityHistogram) -> Result<AbFit> {
    let occupied = hist.counts().iter().filter(|&&c| c > 0).count();
    if occupied < 2 {
        return Err(Error::Unfittable(format!("{occupied} non-empty bins; need at least 2")));
    }
    let n = hist.trials() as f64;
    let xs: Vec<f64> = (0..hist.bins()).map(|i| hist.mid_cos(i)).collect();
    let ys: Vec<f64> = (0..hist.bins()).map(|i| hist.empirical_density(i)).collect();
    let omegas: Vec<f64> = (0..hist.bins()).map(|i| hist.solid_angle(i)).collect();

    let mut lambdas: Vec<f64> = hist.counts().iter().map(|&c| c as f64).collect();
    let mut solution = None;
    for _ in 0..FIT_REWEIGHT_PASSES {
        let weights: Vec<f64> = lambdas
            .iter()
            .zip(&omegas)
            .map(|(&l, &w)| (n * w).powi(2) / l.max(1.0))
            .collect();
        let fit = weighted_line(&xs, &ys, &weights)?;
        lambdas = xs
            .iter()
            .zip(&omegas)
            .map(|(&x, &w)| n * w * (fit.0 + fit.1 * x))
            .collect();
        solution = Some((fit, weights));
    }
    let ((alpha, beta, cov), weights) = solution.expect("at least one pass");
    let chi2 = xs
        .iter()
        .zip(&ys)
        .zip(&weights)
        .map(|((&x, &y), &w)| w * (y - alpha - beta * x).powi(2))
        .sum();
    let var_a = cov[0][0] + cov[1][1] + 2.0 * cov[0][1];
    let var_b = cov[0][0] + cov[1][1] - 2.0 * cov[0][1];
    Ok(AbFit {
        alpha,
        beta,
        a: alpha + beta,
        b: alpha - beta,
        se_alpha: cov[0][0].sqrt(),
        se_beta: cov[1][1].sqrt(),
        se_a: var_a.max(0.0).sqrt(),
        se_b: var_b.max(0.0).sqrt(),
        chi2,
        dof: hist.bins().saturating_sub(2),
    })
}

/// Solves the 2×2 weighted normal equations for y = α + β x.
fn weighted_line(xs: &[f64], ys: &[f64], ws: &[f64]) -> Result<(f64, f64, [[f64; 2]; 2])> {
    let (mut s, mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((&x, &y), &w) in xs.iter().zip(ys).zip(ws) {
        s += w;
        sx += w * x;
        sxx += w * x * x;
        sy += w * y;
        sxy += w * x * y;
    }
    let det = s * sxx - sx * sx;
    if !(det.is_finite() && det > 1e-12 * s * sxx) {
        return Err(Error::Unfittable("design matrix is singular".into()));
    }
    let alpha = (sxx * sy - sx * sxy) / det;
    let beta = (s * sxy - sx * sy) / det;
    let cov = [[sxx / det, -sx / det], [-sx / det, s / det]];
    Ok((alpha, beta, cov))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NotDetectable,
    Indeterminate,
    Detectable,
}

impl Verdict {
    pub fn from_z(z: f64) -> Self {
        if z < NOT_DETECTABLE_Z {
            Verdict::NotDetectable
        } else if z > DETECTABLE_Z {
            Verdict::Detectable
        } else {
            Verdict::Indeterminate
        }
    }
}

/// Cap-count comparison between the two decompositions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscriminationReport {
    pub p: f64,
    pub cap_half_angle: f64,
    pub trials: u64,
    pub freq_standard: f64,
    pub freq_symmetric: f64,
    pub se_standard: f64,
    pub se_symmetric: f64,
    pub z: f64,
    pub verdict: Verdict,
    pub seed: u64,
}

fn check_cap(cap: f64) -> Result<()> {
    if cap > 0.0 && cap <= PI {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("cap half-angle {cap} outside (0, π]")))
    }
}

fn count_cap_hits<E: Estimator + Sync>(
    strategy: &E,
    ensemble: &EnsembleDecomposition,
    cos_cap: f64,
    trials: u64,
    seed: u64,
    purpose: Purpose,
    workers: usize,
) -> u64 {
    let members = ensemble.members();
    run_split(seed, purpose, trials, workers, |rng, n| {
        let mut hits = 0u64;
        for _ in 0..n {
            let u: f64 = rand::Rng::random(rng);
            let mut acc = 0.0;
            let mut input = members[members.len() - 1].1;
            for (w, dir) in members {
                acc += w;
                if u < acc {
                    input = *dir;
                    break;
                }
            }
            let guess = strategy.estimate(&input, rng);
            if guess.z() >= cos_cap {
                hits += 1;
            }
        }
        hits
    })
    .into_iter()
    .sum()
}

/// Runs `strategy` on `trials` states drawn from each decomposition of the
/// receiver's mixture and compares how often the guess lands within
/// `cap_half_angle` of ẑ. z = |f₁ − f₂| / √(se₁² + se₂²) with binomial errors.
pub fn run_discrimination_experiment<E: Estimator + Sync>(
    strategy: &E,
    p: f64,
    cap_half_angle: f64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<DiscriminationReport> {
    check_cap(cap_half_angle)?;
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let standard = standard_decomposition(p)?;
    let symmetric = symmetric_decomposition(p)?;
    let cos_cap = cap_half_angle.cos();
    let n = trials as f64;
    let hits_standard =
        count_cap_hits(strategy, &standard, cos_cap, trials, seed, Purpose::DISCRIMINATION_STANDARD, workers);
    let hits_symmetric =
        count_cap_hits(strategy, &symmetric, cos_cap, trials, seed, Purpose::DISCRIMINATION_SYMMETRIC, workers);
    let freq_standard = hits_standard as f64 / n;
    let freq_symmetric = hits_symmetric as f64 / n;
    let se_standard = (freq_standard * (1.0 - freq_standard) / n).sqrt();
    let se_symmetric = (freq_symmetric * (1.0 - freq_symmetric) / n).sqrt();
    let diff = (freq_standard - freq_symmetric).abs();
    let spread = (se_standard.powi(2) + se_symmetric.powi(2)).sqrt();
    let z = if diff == 0.0 {
        0.0
    } else if spread > 0.0 {
        diff / spread
    } else {
        f64::INFINITY
    };
    Ok(DiscriminationReport {
        p,
        cap_half_angle,
        trials,
        freq_standard,
        freq_symmetric,
        se_standard,
        se_symmetric,
        z,
        verdict: Verdict::from_z(z),
        seed,
    })
}

/// Probability that an isotropic estimator with density `density` and input
/// `input` guesses within `cap` of ẑ, by two-dimensional quadrature over the cap.
pub fn expected_cap_frequency<F: Fn(f64) -> f64>(density: F, input: &BlochVector, cap: f64) -> f64 {
    let (su, cu) = input.polar().sin_cos();
    let inner = |polar: f64| {
        let (sm, cm) = polar.sin_cos();
        // Azimuth relative to the input's; the integrand is even in it.
        let ring = adaptive_simpson(
            |phi: f64| {
                let cos_gamma = (cm * cu + sm * su * phi.cos()).clamp(-1.0, 1.0);
                density(cos_gamma.acos())
            },
            0.0,
            PI,
            1e-14,
        );
        2.0 * ring * sm
    };
    adaptive_simpson(inner, 0.0, cap, 1e-13)
}

/// Predicted cap frequencies (standard, symmetric) for a density at p.
pub fn expected_frequencies<F: Fn(f64) -> f64>(density: F, p: f64, cap: f64) -> Result<(f64, f64)> {
    let standard = standard_decomposition(p)?;
    let symmetric = symmetric_decomposition(p)?;
    let mix = |ens: &EnsembleDecomposition| {
        ens.members()
            .iter()
            .filter(|(w, _)| *w > 0.0)
            .map(|(w, dir)| w * expected_cap_frequency(&density, dir, cap))
            .sum::<f64>()
    };
    Ok((mix(&standard), mix(&symmetric)))
}

/// Trials per decomposition so the expected z-statistic clears `threshold`
/// by the one-sided normal quantile of `power`.
pub fn required_trials(freq_standard: f64, freq_symmetric: f64, threshold: f64, power: f64) -> Result<u64> {
    let gap = (freq_standard - freq_symmetric).abs();
    if gap == 0.0 {
        return Err(Error::InvalidConfig("frequencies coincide; no trial count can separate them".into()));
    }
    let quantile = Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(power);
    let spread = (freq_standard * (1.0 - freq_standard) + freq_symmetric * (1.0 - freq_symmetric)).sqrt();
    Ok((((threshold + quantile) * spread / gap).powi(2)).ceil() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::{cos4_density, density_experiment, EstimatorStrategy, TabulatedDensity};

    fn ab_forms() -> Vec<GuessingForm> {
        (0..=10).map(|i| GuessingForm::from_a_fraction(i as f64 / 10.0).unwrap()).collect()
    }

    #[test]
    fn lattice_is_unit_and_spread() {
        let dirs = fibonacci_directions(DEFAULT_DIRECTIONS);
        assert_eq!(dirs.len(), 200);
        let mean: [f64; 3] = dirs.iter().fold([0.0; 3], |mut acc, d| {
            for (a, c) in acc.iter_mut().zip(d.to_array()) {
                *a += c / 200.0;
            }
            acc
        });
        assert!(mean.iter().all(|m| m.abs() < 0.02));
    }

    #[test]
    fn ab_forms_satisfy_the_constraint() {
        let dirs = fibonacci_directions(DEFAULT_DIRECTIONS);
        let ps = p_grid(DEFAULT_P_POINTS);
        for form in ab_forms() {
            let r = constraint_residual_over(|t| form.density(t), &ps, &dirs).unwrap();
            assert!(r.max() < 1e-12, "{form:?}: {}", r.max());
            assert!(r.max() >= r.rms());
        }
    }

    #[test]
    fn cos4_violates_the_constraint() {
        let dirs = fibonacci_directions(DEFAULT_DIRECTIONS);
        let r = constraint_residual(cos4_density, 0.9, &dirs).unwrap();
        // Oracle at m̂ = ẑ, cos θ = 0.8: (3/16π)(1.8² − 0.9·4) = −0.0215.
        let at_pole = constraint_residual(cos4_density, 0.9, &[BlochVector::Z]).unwrap();
        let oracle = (3.0 / (16.0 * PI) * (1.8f64.powi(2) - 0.9 * 4.0)).abs();
        assert!((at_pole.max() - oracle).abs() < 1e-12);
        assert!(r.max() > 1e-3);
    }

    #[test]
    fn half_is_balanced_only_for_ab_forms() {
        // At p = ½ the ensembles are {±ẑ} and {±ŷ}: a rotation, not a
        // reflection, so only the AB family balances them. cos⁴ at m̂ = ẑ:
        // g(π/2) = 3/16π against ½(g(0) + g(π)) = 3/8π.
        let dirs = fibonacci_directions(DEFAULT_DIRECTIONS);
        for form in ab_forms() {
            let r = constraint_residual(|t| form.density(t), 0.5, &dirs).unwrap();
            assert!(r.max() < 1e-15);
        }
        let at_pole = constraint_residual(cos4_density, 0.5, &[BlochVector::Z]).unwrap();
        assert!((at_pole.max() - 3.0 / (16.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn mirror_symmetry_under_swap_and_relabel() {
        // Swapping A ↔ B equals evaluating at the antipodal outcome m̂ ↦ −m̂,
        // which maps the residual grid onto itself with ẑ ↔ −ẑ relabelled.
        let dirs = fibonacci_directions(DEFAULT_DIRECTIONS);
        let mirrored: Vec<BlochVector> = dirs.iter().map(|d| d.antipode()).collect();
        let ps = p_grid(11);
        for form in ab_forms() {
            let swapped = form.swapped();
            let a = constraint_residual_over(|t| form.density(t), &ps, &dirs).unwrap();
            let b = constraint_residual_over(|t| swapped.density(t), &ps, &mirrored).unwrap();
            for (ra, rb) in a.residuals().iter().flatten().zip(b.residuals().iter().flatten()) {
                assert!((ra - rb).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn derive_ab_examples() {
        let d = derive_ab_form(|t| GuessingForm::massar_popescu().density(t)).unwrap();
        assert_eq!(d.form.a(), 1.0 / (2.0 * PI));
        assert!(d.form.b().abs() < 1e-17);
        assert!(d.residual < 1e-12);

        let d = derive_ab_form(|_| 1.0 / (4.0 * PI)).unwrap();
        assert_eq!(d.form, GuessingForm::uniform());
        assert!(d.residual < 1e-12);

        // Endpoint form (3/4π, 0); grid oracle of the gap (3/4π)(c⁴ − c²) peaks at c² = ½.
        let d = derive_ab_form(cos4_density).unwrap();
        let oracle = (0..=100_000)
            .map(|k| PI * k as f64 / 100_000.0)
            .map(|t| (cos4_density(t) - 3.0 / (4.0 * PI) * (0.5 * t).cos().powi(2)).abs())
            .fold(0.0, f64::max);
        assert!((d.residual - oracle).abs() < 1e-12);
        assert!(d.residual >= 1.0 / (8.0 * PI) - 1e-12);
    }

    #[test]
    fn derivation_returns_the_form_it_was_given() {
        for form in ab_forms().into_iter().chain([GuessingForm::new(0.3, 0.05).unwrap()]) {
            let d = derive_ab_form(|t| form.density(t)).unwrap();
            assert!((d.form.a() - form.a()).abs() < 1e-12 && (d.form.b() - form.b()).abs() < 1e-12);
            assert!(d.residual < 1e-12);
        }
    }

    fn assert_recovers(strategy: &EstimatorStrategy, expect: GuessingForm, seed: u64) {
        let hist = density_experiment(strategy, 1_000_000, 50, seed, 2).unwrap();
        let fit = fit_ab_least_squares(&hist).unwrap();
        assert!((fit.a - expect.a()).abs() < 3.0 * fit.se_a, "{fit:?}");
        assert!((fit.b - expect.b()).abs() < 3.0 * fit.se_b, "{fit:?}");
        assert!(fit.se_a > 0.0 && fit.se_b > 0.0);
    }

    #[test]
    fn fit_recovers_massar_popescu() {
        assert_recovers(&EstimatorStrategy::MassarPopescu, GuessingForm::massar_popescu(), 31);
    }

    #[test]
    fn fit_recovers_uniform_and_reversed() {
        let uniform = GuessingForm::uniform();
        assert_recovers(&EstimatorStrategy::ab(uniform).unwrap(), uniform, 32);
        let reversed = GuessingForm::massar_popescu().swapped();
        assert_recovers(&EstimatorStrategy::ab(reversed).unwrap(), reversed, 33);
    }

    #[test]
    fn fit_rejects_degenerate_histograms() {
        let mut hist = DensityHistogram::new(10).unwrap();
        for _ in 0..100 {
            hist.record(0.01);
        }
        assert!(matches!(fit_ab_least_squares(&hist), Err(Error::Unfittable(_))));
        hist.record(3.0);
        assert!(fit_ab_least_squares(&hist).is_ok());
    }

    #[test]
    fn discrimination_rejects_bad_input() {
        let s = EstimatorStrategy::MassarPopescu;
        assert!(run_discrimination_experiment(&s, 0.9, 0.0, 10, 0, 1).is_err());
        assert!(run_discrimination_experiment(&s, 0.9, 4.0, 10, 0, 1).is_err());
        assert!(run_discrimination_experiment(&s, 1.2, 0.2, 10, 0, 1).is_err());
        assert!(run_discrimination_experiment(&s, 0.9, 0.2, 0, 0, 1).is_err());
    }

    #[test]
    fn massar_popescu_does_not_signal() {
        let r = run_discrimination_experiment(&EstimatorStrategy::MassarPopescu, 0.9, 0.2, 1_000_000, 7, 2).unwrap();
        assert!(r.z < NOT_DETECTABLE_Z, "{r:?}");
        assert_eq!(r.verdict, Verdict::NotDetectable);
        let expect = cap_frequency_oracle_ab(&GuessingForm::massar_popescu(), 0.9, 0.2);
        assert!((r.freq_standard - expect).abs() < 4.0 * r.se_standard);
        assert!((r.freq_symmetric - expect).abs() < 4.0 * r.se_symmetric);
    }

    /// For an AB density both sides of the constraint integrate over the cap
    /// to the same number: α·Ω + β ∫ (m̂·r_B) dΩ with r_B = (2p − 1) ẑ.
    fn cap_frequency_oracle_ab(form: &GuessingForm, p: f64, cap: f64) -> f64 {
        let c = cap.cos();
        let omega = 2.0 * PI * (1.0 - c);
        let first_moment = PI * (1.0 - c * c);
        form.alpha() * omega + form.beta() * (2.0 * p - 1.0) * first_moment
    }

    #[test]
    fn expected_frequency_quadrature_agrees_with_closed_form() {
        let form = GuessingForm::from_a_fraction(0.8).unwrap();
        for p in [0.5, 0.7, 0.9] {
            let (fs, fm) = expected_frequencies(|t| form.density(t), p, 0.2).unwrap();
            let oracle = cap_frequency_oracle_ab(&form, p, 0.2);
            assert!((fs - oracle).abs() < 1e-10, "{fs} vs {oracle}");
            assert!((fm - oracle).abs() < 1e-10, "{fm} vs {oracle}");
        }
    }

    #[test]
    fn cos4_gap_and_trial_count() {
        let (fs, fm) = expected_frequencies(cos4_density, 0.9, 0.2).unwrap();
        assert!(fs > fm);
        // Small-cap estimate: density difference at the pole times the cap area.
        let rough = 0.0215 * 2.0 * PI * (1.0 - 0.2f64.cos());
        assert!(((fs - fm) - rough).abs() / rough < 0.05, "{}", fs - fm);
        let n = required_trials(fs, fm, DETECTABLE_Z, 0.9999).unwrap();
        assert!(n > 100_000 && n < 1_000_000, "{n}");
        assert!(required_trials(0.1, 0.1, 5.0, 0.99).is_err());
    }

    #[test]
    fn cos4_signals_at_high_p() {
        let strategy = EstimatorStrategy::Tabulated(TabulatedDensity::cos4_counterexample());
        let r = run_discrimination_experiment(&strategy, 0.9, 0.2, 1_000_000, 3, 2).unwrap();
        assert!(r.z > DETECTABLE_Z, "{r:?}");
        assert_eq!(r.verdict, Verdict::Detectable);
        // cos⁴ also separates {±ẑ} from {±ŷ}.
        let r = run_discrimination_experiment(&strategy, 0.5, 0.2, 200_000, 3, 2).unwrap();
        assert!(r.z > DETECTABLE_Z, "{r:?}");
        let (fs, fm) = expected_frequencies(cos4_density, 0.5, 0.2).unwrap();
        assert!((r.freq_standard - fs).abs() < 4.0 * r.se_standard);
        assert!((r.freq_symmetric - fm).abs() < 4.0 * r.se_symmetric);
    }

    #[test]
    fn ab_strategies_do_not_signal_at_half() {
        for strategy in [EstimatorStrategy::MassarPopescu, EstimatorStrategy::ab(GuessingForm::uniform()).unwrap()] {
            let r = run_discrimination_experiment(&strategy, 0.5, 0.2, 500_000, 21, 2).unwrap();
            assert!(r.z < NOT_DETECTABLE_Z, "{r:?}");
        }
    }

    #[test]
    fn verdict_bands() {
        assert_eq!(Verdict::from_z(3.99), Verdict::NotDetectable);
        assert_eq!(Verdict::from_z(4.5), Verdict::Indeterminate);
        assert_eq!(Verdict::from_z(5.01), Verdict::Detectable);
    }

    #[test]
    fn report_serializes_with_expected_fields() {
        let r = run_discrimination_experiment(&EstimatorStrategy::MassarPopescu, 0.6, 0.2, 1000, 1, 1).unwrap();
        let v = serde_json::to_value(r).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        for k in [
            "p", "cap_half_angle", "trials", "freq_standard", "freq_symmetric",
            "se_standard", "se_symmetric", "z", "verdict", "seed",
        ] {
            assert!(keys.contains(&k), "missing {k}");
        }
        assert_eq!(keys.len(), 10);
    }
}
