//! Estimation strategies and their guessing densities.
//!
//! Every strategy here is isotropic: the density of the guessed direction m̂
//! depends on the input r̂ only through the angle θ between them, so it is
//! a function `θ ↦ P(θ)` per steradian with ∫ P dΩ = 1.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::bloch::{angle_between, overlap2, random_direction, BlochVector};
use crate::rng::{run_split, Purpose};
use crate::{Error, Result};

/// Tolerance on 2π(A + B) = 1.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Tolerance on the sphere integral of a tabulated density.
pub const TABLE_NORMALIZATION_TOL: f64 = 1e-6;
/// Histogram bins used by default.
pub const DEFAULT_BINS: usize = 50;
/// Upper quantile used for χ² acceptance.
pub const CHI2_QUANTILE: f64 = 0.999;

/// The (A, B) pair of P(θ) = A cos²(θ/2) + B sin²(θ/2) = α + β cos θ,
/// with α = (A + B)/2 and β = (A − B)/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GuessingForm {
    a: f64,
    b: f64,
}

impl GuessingForm {
    /// Any pair of non-negative densities; not necessarily normalized.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0) {
            return Err(Error::InvalidForm(format!("A = {a}, B = {b} must be non-negative")));
        }
        Ok(Self { a, b })
    }

    /// A pair that also satisfies 2π(A + B) = 1.
    pub fn normalized(a: f64, b: f64) -> Result<Self> {
        let form = Self::new(a, b)?;
        if !form.is_normalized() {
            return Err(Error::InvalidForm(format!("2π(A + B) = {} is not 1", form.total_mass())));
        }
        Ok(form)
    }

    /// A = f/2π, B = (1 − f)/2π for f ∈ [0, 1].
    pub fn from_a_fraction(fraction: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::InvalidForm(format!("A fraction {fraction} outside [0, 1]")));
        }
        Self::normalized(fraction / (2.0 * PI), (1.0 - fraction) / (2.0 * PI))
    }

    /// (1/2π, 0): the random-axis measurement.
    pub fn massar_popescu() -> Self {
        Self { a: 1.0 / (2.0 * PI), b: 0.0 }
    }

    /// (1/4π, 1/4π): a guess that ignores the input.
    pub fn uniform() -> Self {
        Self { a: 1.0 / (4.0 * PI), b: 1.0 / (4.0 * PI) }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn alpha(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn beta(&self) -> f64 {
        0.5 * (self.a - self.b)
    }

    /// 2π(A + B), the sphere integral of the density.
    pub fn total_mass(&self) -> f64 {
        2.0 * PI * (self.a + self.b)
    }

    pub fn is_normalized(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= NORMALIZATION_TOL
    }

    /// Exchanges A and B.
    pub fn swapped(&self) -> Self {
        Self { a: self.b, b: self.a }
    }

    /// A cos²(θ/2) + B sin²(θ/2).
    pub fn density(&self, theta: f64) -> f64 {
        let (s, c) = (0.5 * theta).sin_cos();
        self.a * c * c + self.b * s * s
    }

    /// α + β cos θ.
    pub fn density_linear(&self, theta: f64) -> f64 {
        self.alpha() + self.beta() * theta.cos()
    }

    /// ∫ P dΩ over the band θ ∈ [lo, hi]; the integrand is linear in t = cos θ.
    pub fn band_probability(&self, lo: f64, hi: f64) -> f64 {
        let (t_hi, t_lo) = (lo.cos(), hi.cos());
        2.0 * PI * (self.alpha() * (t_hi - t_lo) + 0.5 * self.beta() * (t_hi * t_hi - t_lo * t_lo))
    }

    /// Maps a uniform variate to t = cos θ by inverting the CDF of the
    /// normalized shape α + β t on [−1, 1].
    fn cos_theta_from_uniform(&self, u: f64) -> f64 {
        // pdf(t) = ½ + k t, CDF(t) = (t + 1)/2 + k (t² − 1)/2, k ∈ [−½, ½].
        // Solve k t² + t + c = 0 with c = 1 − k − 2u, taking the root in [−1, 1]
        // in the cancellation-free form t = −2c / (1 + √(1 − 4kc)).
        let alpha = self.alpha();
        let k = if alpha > 0.0 { 0.5 * self.beta() / alpha } else { 0.0 };
        let c = 1.0 - k - 2.0 * u;
        let disc = (1.0 - 4.0 * k * c).max(0.0);
        (-2.0 * c / (1.0 + disc.sqrt())).clamp(-1.0, 1.0)
    }
}

/// A cos²(θ/2) + B sin²(θ/2).
pub fn guessing_density(form: &GuessingForm, theta: f64) -> f64 {
    form.density(theta)
}

/// Probability that the guess lands within `cap_half_angle` of the input.
pub fn cap_probability(form: &GuessingForm, cap_half_angle: f64) -> f64 {
    form.band_probability(0.0, cap_half_angle)
}

/// Draws a guess with density A cos²(θ/2) + B sin²(θ/2) around `input`.
pub fn sample_from_form<R: Rng + ?Sized>(form: &GuessingForm, input: &BlochVector, rng: &mut R) -> Result<BlochVector> {
    if !form.is_normalized() {
        return Err(Error::InvalidForm(format!("2π(A + B) = {} is not 1", form.total_mass())));
    }
    Ok(sample_shape(form, input, rng))
}

fn sample_shape<R: Rng + ?Sized>(form: &GuessingForm, input: &BlochVector, rng: &mut R) -> BlochVector {
    let t = form.cos_theta_from_uniform(rng.random::<f64>());
    let azimuth = 2.0 * PI * rng.random::<f64>();
    BlochVector::around(input, t, azimuth)
}

/// Projective measurement along `axis`: returns `axis` with probability
/// cos²(θ/2) = overlap2(axis, input), otherwise its antipode.
pub fn stern_gerlach<R: Rng + ?Sized>(input: &BlochVector, axis: &BlochVector, rng: &mut R) -> BlochVector {
    if rng.random::<f64>() < overlap2(axis, input) {
        *axis
    } else {
        axis.antipode()
    }
}

/// Measure along an isotropically drawn axis and report the observed eigen-direction.
pub fn estimate_massar_popescu<R: Rng + ?Sized>(input: &BlochVector, rng: &mut R) -> BlochVector {
    let axis = random_direction(rng);
    stern_gerlach(input, &axis, rng)
}

/// Isotropic density given on a θ-grid over [0, π], linearly interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    theta: Vec<f64>,
    values: Vec<f64>,
    /// ∫₀^θᵢ P(θ) 2π sin θ dθ at each node.
    cumulative: Vec<f64>,
}

impl TabulatedDensity {
    pub fn new(theta: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if theta.len() < 2 || theta.len() != values.len() {
            return Err(Error::InvalidTable("need at least two nodes and one value per node".into()));
        }
        if theta[0] != 0.0 || (theta[theta.len() - 1] - PI).abs() > 1e-12 {
            return Err(Error::InvalidTable("θ-grid must span [0, π]".into()));
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
        if theta.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidTable("θ-grid must be strictly increasing".into()));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidTable("densities must be finite and non-negative".into()));
        }
        let mut cumulative = Vec::with_capacity(theta.len());
        cumulative.push(0.0);
        for i in 1..theta.len() {
            let prev = cumulative[i - 1];
            cumulative.push(prev + segment_mass(theta[i - 1], theta[i], values[i - 1], values[i], theta[i]));
        }
        let total = cumulative[cumulative.len() - 1];
        if (total - 1.0).abs() > TABLE_NORMALIZATION_TOL {
            return Err(Error::InvalidTable(format!("density integrates to {total}, not 1")));
        }
        Ok(Self { theta, values, cumulative })
    }

    /// Tabulates `f` on `nodes` equally spaced points of [0, π].
    pub fn from_fn<F: Fn(f64) -> f64>(f: F, nodes: usize) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::InvalidTable("need at least two nodes".into()));
        }
        let theta: Vec<f64> = (0..nodes)
            .map(|i| if i + 1 == nodes { PI } else { PI * i as f64 / (nodes - 1) as f64 })
            .collect();
        let values = theta.iter().map(|&t| f(t)).collect();
        Self::new(theta, values)
    }

    /// (3/4π) cos⁴(θ/2): isotropic, smooth and monotone, but not of AB form.
    pub fn cos4_counterexample() -> Self {
        Self::from_fn(cos4_density, 2001).expect("cos⁴ table is normalized")
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total_mass(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    fn segment(&self, theta: f64) -> usize {
        match self.theta.partition_point(|&t| t <= theta) {
            0 => 0,
            i => (i - 1).min(self.theta.len() - 2),
        }
    }

    pub fn density(&self, theta: f64) -> f64 {
        let theta = theta.clamp(0.0, PI);
        let i = self.segment(theta);
        lerp(self.theta[i], self.theta[i + 1], self.values[i], self.values[i + 1], theta)
    }

    /// ∫₀^θ P 2π sin θ′ dθ′ of the interpolant.
    pub fn cumulative(&self, theta: f64) -> f64 {
        let theta = theta.clamp(0.0, PI);
        let i = self.segment(theta);
        self.cumulative[i]
            + segment_mass(self.theta[i], self.theta[i + 1], self.values[i], self.values[i + 1], theta)
    }

    pub fn band_probability(&self, lo: f64, hi: f64) -> f64 {
        self.cumulative(hi) - self.cumulative(lo)
    }

    /// Inverts the cumulative mass exactly for the interpolant.
    fn theta_from_uniform(&self, u: f64) -> f64 {
        let target = u * self.total_mass();
        let i = match self.cumulative.partition_point(|&c| c <= target) {
            0 => 0,
            k => (k - 1).min(self.theta.len() - 2),
        };
        let (lo, hi) = (self.theta[i], self.theta[i + 1]);
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        let need = target - self.cumulative[i];
        let mass = |t: f64| segment_mass(lo, hi, v0, v1, t);
        let (mut a, mut b) = (lo, hi);
        let seg_total = mass(hi);
        let mut t = if seg_total > 0.0 { lo + (hi - lo) * (need / seg_total).clamp(0.0, 1.0) } else { lo };
        for _ in 0..100 {
            let f = mass(t) - need;
            if f > 0.0 {
                b = t;
            } else {
                a = t;
            }
            let slope = 2.0 * PI * lerp(lo, hi, v0, v1, t) * t.sin();
            let newton = if slope > 0.0 { t - f / slope } else { f64::NAN };
            let next = if newton > a && newton < b { newton } else { 0.5 * (a + b) };
            if (next - t).abs() <= 1e-15 * (1.0 + t) || b - a <= 1e-15 {
                return next;
            }
            t = next;
        }
        t
    }
}

/// (3/4π) cos⁴(θ/2).
pub fn cos4_density(theta: f64) -> f64 {
    3.0 / (4.0 * PI) * (0.5 * theta).cos().powi(4)
}

fn lerp(x0: f64, x1: f64, y0: f64, y1: f64, x: f64) -> f64 {
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// ∫_{θ0}^{θ} g(θ′) 2π sin θ′ dθ′ for g linear through (θ0, v0), (θ1, v1).
/// With g = c + sθ′ the antiderivative is −g cos θ′ + s sin θ′.
fn segment_mass(t0: f64, t1: f64, v0: f64, v1: f64, t: f64) -> f64 {
    let slope = (v1 - v0) / (t1 - t0);
    let anti = |x: f64| -(v0 + slope * (x - t0)) * x.cos() + slope * x.sin();
    2.0 * PI * (anti(t) - anti(t0))
}

/// Something that turns an input direction into a guessed direction.
pub trait Estimator {
    fn estimate<R: Rng + ?Sized>(&self, input: &BlochVector, rng: &mut R) -> BlochVector;
}

/// The isotropic strategies the crate knows how to simulate.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorStrategy {
    /// Random-axis projective measurement.
    MassarPopescu,
    /// Direct sampling from an AB-form density.
    AbForm(GuessingForm),
    /// Sampling from a tabulated density.
    Tabulated(TabulatedDensity),
}

impl EstimatorStrategy {
    pub fn ab(form: GuessingForm) -> Result<Self> {
        if !form.is_normalized() {
            return Err(Error::InvalidForm(format!("2π(A + B) = {} is not 1", form.total_mass())));
        }
        Ok(Self::AbForm(form))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::AbForm(form) if !form.is_normalized() => {
                Err(Error::InvalidForm(format!("2π(A + B) = {} is not 1", form.total_mass())))
            }
            _ => Ok(()),
        }
    }

    /// Guessing density per steradian at angle θ from the input.
    pub fn density(&self, theta: f64) -> f64 {
        match self {
            Self::MassarPopescu => GuessingForm::massar_popescu().density(theta),
            Self::AbForm(form) => form.density(theta),
            Self::Tabulated(table) => table.density(theta),
        }
    }

    /// Probability of a guess at angle θ ∈ [lo, hi] from the input.
    pub fn band_probability(&self, lo: f64, hi: f64) -> f64 {
        match self {
            Self::MassarPopescu => GuessingForm::massar_popescu().band_probability(lo, hi),
            Self::AbForm(form) => form.band_probability(lo, hi),
            Self::Tabulated(table) => table.band_probability(lo, hi),
        }
    }
}

impl Estimator for EstimatorStrategy {
    fn estimate<R: Rng + ?Sized>(&self, input: &BlochVector, rng: &mut R) -> BlochVector {
        match self {
            Self::MassarPopescu => estimate_massar_popescu(input, rng),
            Self::AbForm(form) => sample_shape(form, input, rng),
            Self::Tabulated(table) => {
                let theta = table.theta_from_uniform(rng.random::<f64>());
                let azimuth = 2.0 * PI * rng.random::<f64>();
                BlochVector::around(input, theta.cos(), azimuth)
            }
        }
    }
}

/// Counts of guess-to-input angles on an equal-width θ-grid over [0, π].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityHistogram {
    counts: Vec<u64>,
    trials: u64,
}

/// Pearson χ² of a histogram against predicted bin probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub critical: f64,
}

impl ChiSquare {
    pub fn passes(&self) -> bool {
        self.statistic < self.critical
    }
}

impl DensityHistogram {
    pub fn new(bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidConfig("histogram needs at least one bin".into()));
        }
        Ok(Self { counts: vec![0; bins], trials: 0 })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn record(&mut self, theta: f64) {
        let n = self.counts.len();
        let idx = ((theta / PI) * n as f64) as usize;
        self.counts[idx.min(n - 1)] += 1;
        self.trials += 1;
    }

    pub fn merge(&mut self, other: &DensityHistogram) {
        assert_eq!(self.bins(), other.bins(), "merging histograms with different grids");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.trials += other.trials;
    }

    /// (θ_lo, θ_hi) of bin `i`.
    pub fn edges(&self, i: usize) -> (f64, f64) {
        let n = self.counts.len();
        let hi = if i + 1 == n { PI } else { PI * (i + 1) as f64 / n as f64 };
        (PI * i as f64 / n as f64, hi)
    }

    /// 2π(cos θ_lo − cos θ_hi).
    pub fn solid_angle(&self, i: usize) -> f64 {
        let (lo, hi) = self.edges(i);
        2.0 * PI * (lo.cos() - hi.cos())
    }

    /// count / (trials × solid angle).
    pub fn empirical_density(&self, i: usize) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.counts[i] as f64 / (self.trials as f64 * self.solid_angle(i))
    }

    /// Bin midpoint in t = cos θ, the solid-angle average of cos θ over the bin.
    pub fn mid_cos(&self, i: usize) -> f64 {
        let (lo, hi) = self.edges(i);
        0.5 * (lo.cos() + hi.cos())
    }

    /// Pearson χ² against `band(lo, hi)`, the predicted probability per bin.
    /// Bins predicted empty are skipped; dof = used bins − 1.
    pub fn chi_square<F: Fn(f64, f64) -> f64>(&self, band: F) -> ChiSquare {
        let n = self.trials as f64;
        let mut statistic = 0.0;
        let mut used = 0usize;
        for (i, &count) in self.counts.iter().enumerate() {
            let (lo, hi) = self.edges(i);
            let expected = n * band(lo, hi);
            if expected > 0.0 {
                statistic += (count as f64 - expected).powi(2) / expected;
                used += 1;
            } else if count > 0 {
                statistic = f64::INFINITY;
            }
        }
        let dof = used.saturating_sub(1).max(1);
        let critical = ChiSquared::new(dof as f64)
            .expect("positive degrees of freedom")
            .inverse_cdf(CHI2_QUANTILE);
        ChiSquare { statistic, dof, critical }
    }

    /// CSV with columns
    /// `theta_lo,theta_hi,solid_angle,count,empirical_density,analytic_density`.
    /// The analytic column is the bin average band(lo, hi) / solid angle.
    pub fn to_csv<F: Fn(f64, f64) -> f64>(&self, band: F) -> String {
        let mut out = String::from("theta_lo,theta_hi,solid_angle,count,empirical_density,analytic_density\n");
        for i in 0..self.bins() {
            let (lo, hi) = self.edges(i);
            let omega = self.solid_angle(i);
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                lo,
                hi,
                omega,
                self.counts[i],
                self.empirical_density(i),
                band(lo, hi) / omega
            ));
        }
        out
    }
}

/// Bins the angle between each (input, outcome) pair.
pub fn bin_outcomes(samples: &[(BlochVector, BlochVector)], bins: usize) -> Result<DensityHistogram> {
    if samples.is_empty() {
        return Err(Error::InvalidConfig("no samples to bin".into()));
    }
    let mut hist = DensityHistogram::new(bins)?;
    for (input, outcome) in samples {
        hist.record(angle_between(input, outcome));
    }
    Ok(hist)
}

/// Full protocol run: isotropic inputs, one guess each, θ-histogram of the
/// guess-to-input angle. Reproducible for fixed `(seed, workers)`.
pub fn density_experiment<E: Estimator + Sync>(
    strategy: &E,
    trials: u64,
    bins: usize,
    seed: u64,
    workers: usize,
) -> Result<DensityHistogram> {
    let empty = DensityHistogram::new(bins)?;
    let parts = run_split(seed, Purpose::DENSITY, trials, workers, |rng, n| {
        let mut hist = empty.clone();
        for _ in 0..n {
            let input = random_direction(rng);
            let guess = strategy.estimate(&input, rng);
            hist.record(angle_between(&input, &guess));
        }
        hist
    });
    let mut total = empty;
    for part in &parts {
        total.merge(part);
    }
    Ok(total)
}
