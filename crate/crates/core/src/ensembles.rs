//! The shared entangled state, the two decompositions of the receiver's
//! mixture, and the rotated sender basis that realizes the second one.
//!
//! With |ψ⟩ = √p |0⟩|ẑ⟩ + √(1−p) |1⟩|−ẑ⟩ the receiver holds
//! ρ_B = p|ẑ⟩⟨ẑ| + (1−p)|−ẑ⟩⟨−ẑ|, which also equals ½|θ̂⟩⟨θ̂| + ½|θ̂′⟩⟨θ̂′|
//! for θ̂ = (0, sin θ, cos θ), θ̂′ = (0, −sin θ, cos θ) and cos θ = 2p − 1.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::bloch::{bloch_from_ket, ket_from_bloch, BlochVector, QubitKet, ALGEBRAIC_TOL};
use crate::{Error, Result};

/// Outcomes whose probability falls below this are dropped from a
/// measurement-induced decomposition.
pub const NEGLIGIBLE_WEIGHT: f64 = 1e-14;

/// Weighted list of pure states that share one density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleDecomposition {
    members: Vec<(f64, BlochVector)>,
}

impl EnsembleDecomposition {
    pub fn new(members: Vec<(f64, BlochVector)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidEnsemble("no members".into()));
        }
        if let Some((w, _)) = members.iter().find(|(w, _)| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidEnsemble(format!("weight {w} is not a probability")));
        }
        let total: f64 = members.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, BlochVector)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Σᵢ wᵢ r̂ᵢ.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let mut r = [0.0; 3];
        for (w, d) in &self.members {
            for (acc, c) in r.iter_mut().zip(d.to_array()) {
                *acc += w * c;
            }
        }
        r
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

/// Two-qubit pure state over the product basis
/// `|0⟩|ẑ⟩, |0⟩|−ẑ⟩, |1⟩|ẑ⟩, |1⟩|−ẑ⟩` (sender first).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartiteState {
    amps: [Complex64; 4],
}

impl BipartiteState {
    pub fn new(amps: [Complex64; 4]) -> Result<Self> {
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::InvalidState { norm_sqr });
        }
        Ok(Self { amps })
    }

    /// Σₖ cₖ |aₖ⟩ ⊗ |bₖ⟩, checked for unit norm.
    pub fn from_terms(terms: &[(Complex64, QubitKet, QubitKet)]) -> Result<Self> {
        let mut amps = [Complex64::new(0.0, 0.0); 4];
        for (coef, alice, bob) in terms {
            let a = alice.amplitudes();
            let b = bob.amplitudes();
            for i in 0..2 {
                for j in 0..2 {
                    amps[2 * i + j] += coef * a[i] * b[j];
                }
            }
        }
        Self::new(amps)
    }

    pub fn amplitudes(&self) -> [Complex64; 4] {
        self.amps
    }

    /// Coefficient matrix `M[a][b]` with |ψ⟩ = Σ M[a][b] |a⟩|b⟩.
    pub fn coefficients(&self) -> [[Complex64; 2]; 2] {
        [[self.amps[0], self.amps[1]], [self.amps[2], self.amps[3]]]
    }

    /// Divides out the phase of the largest-magnitude amplitude of `self`,
    /// and the phase of the same component of `other`, then returns the
    /// Euclidean distance of the aligned vectors.
    pub fn distance_up_to_phase(&self, other: &BipartiteState) -> f64 {
        let k = (0..4)
            .max_by(|&i, &j| self.amps[i].norm().total_cmp(&self.amps[j].norm()))
            .unwrap_or(0);
        let phase = |z: Complex64| if z.norm() > 0.0 { z / z.norm() } else { Complex64::new(1.0, 0.0) };
        let ps = phase(self.amps[k]);
        let po = phase(other.amps[k]);
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a / ps - b / po).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Orthonormal measurement basis on the sender's qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliceBasis {
    kets: [QubitKet; 2],
}

impl AliceBasis {
    pub fn new(first: QubitKet, second: QubitKet) -> Result<Self> {
        let overlap = first.inner(&second).norm();
        if overlap > ALGEBRAIC_TOL {
            return Err(Error::InvalidEnsemble(format!("basis kets overlap by {overlap}")));
        }
        Ok(Self { kets: [first, second] })
    }

    /// {|0⟩, |1⟩}.
    pub fn computational() -> Self {
        Self {
            kets: [ket_from_bloch(&BlochVector::Z), ket_from_bloch(&BlochVector::MINUS_Z)],
        }
    }

    pub fn kets(&self) -> [QubitKet; 2] {
        self.kets
    }
}

/// |ψ⟩ = √p |0⟩|ẑ⟩ + √(1−p) |1⟩|−ẑ⟩.
pub fn build_psi(p: f64) -> Result<BipartiteState> {
    check_probability(p)?;
    let zero = Complex64::new(0.0, 0.0);
    BipartiteState::new([Complex64::new(p.sqrt(), 0.0), zero, zero, Complex64::new((1.0 - p).sqrt(), 0.0)])
}

/// {(p, ẑ), (1−p, −ẑ)}; zero-weight members are kept.
pub fn standard_decomposition(p: f64) -> Result<EnsembleDecomposition> {
    check_probability(p)?;
    EnsembleDecomposition::new(vec![(p, BlochVector::Z), (1.0 - p, BlochVector::MINUS_Z)])
}

/// The pair (θ̂, θ̂′) in the y–z plane with cos θ = 2p − 1.
pub fn symmetric_directions(p: f64) -> Result<(BlochVector, BlochVector)> {
    check_probability(p)?;
    let cos = 2.0 * p - 1.0;
    let sin = 2.0 * (p * (1.0 - p)).sqrt();
    Ok((BlochVector::normalize(0.0, sin, cos)?, BlochVector::normalize(0.0, -sin, cos)?))
}

/// {(½, θ̂), (½, θ̂′)}.
pub fn symmetric_decomposition(p: f64) -> Result<EnsembleDecomposition> {
    let (theta, theta_prime) = symmetric_directions(p)?;
    EnsembleDecomposition::new(vec![(0.5, theta), (0.5, theta_prime)])
}

/// Solves (1/√2)(|0′⟩|θ̂⟩ + |1′⟩|θ̂′⟩) = |ψ(p)⟩ for the sender kets.
///
/// Writing |ψ⟩ = Σ M[a][b] |a⟩|b⟩ and collecting the receiver kets as the
/// columns of V gives U = √2 · M · (Vᵀ)⁻¹, whose columns are |0′⟩ and |1′⟩.
pub fn rotated_alice_basis(p: f64) -> Result<AliceBasis> {
    check_probability(p)?;
    if p == 0.0 || p == 1.0 {
        return Err(Error::DegenerateEntanglement(p));
    }
    let m = build_psi(p)?.coefficients();
    let (theta, theta_prime) = symmetric_directions(p)?;
    let v0 = ket_from_bloch(&theta).amplitudes();
    let v1 = ket_from_bloch(&theta_prime).amplitudes();

    // Vᵀ = [[v0[0], v0[1]], [v1[0], v1[1]]].
    let det = v0[0] * v1[1] - v0[1] * v1[0];
    if det.norm() < 1e-15 {
        return Err(Error::DegenerateEntanglement(p));
    }
    let inv = [[v1[1] / det, -v0[1] / det], [-v1[0] / det, v0[0] / det]];

    let scale = std::f64::consts::SQRT_2;
    let mut u = [[Complex64::new(0.0, 0.0); 2]; 2];
    for a in 0..2 {
        for k in 0..2 {
            u[a][k] = (m[a][0] * inv[0][k] + m[a][1] * inv[1][k]) * scale;
        }
    }
    let first = QubitKet::new(u[0][0], u[1][0])?;
    let second = QubitKet::new(u[0][1], u[1][1])?;
    AliceBasis::new(first, second)
}

/// (1/√2)(|0′⟩|θ̂⟩ + |1′⟩|θ̂′⟩) for the basis returned by [`rotated_alice_basis`].
pub fn rotated_expansion(p: f64, basis: &AliceBasis) -> Result<BipartiteState> {
    let (theta, theta_prime) = symmetric_directions(p)?;
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let [a0, a1] = basis.kets();
    BipartiteState::from_terms(&[(h, a0, ket_from_bloch(&theta)), (h, a1, ket_from_bloch(&theta_prime))])
}

/// Receiver's ensemble when the sender measures `psi` in `basis`: each
/// outcome contributes its probability and the Bloch vector of the
/// conditional receiver state. Outcomes below [`NEGLIGIBLE_WEIGHT`] are omitted.
pub fn decomposition_from_alice_measurement(
    psi: &BipartiteState,
    basis: &AliceBasis,
) -> Result<EnsembleDecomposition> {
    let m = psi.coefficients();
    let mut members = Vec::with_capacity(2);
    for ket in basis.kets() {
        let u = ket.amplitudes();
        let phi = [
            u[0].conj() * m[0][0] + u[1].conj() * m[1][0],
            u[0].conj() * m[0][1] + u[1].conj() * m[1][1],
        ];
        let weight = phi[0].norm_sqr() + phi[1].norm_sqr();
        if weight < NEGLIGIBLE_WEIGHT {
            continue;
        }
        let conditional = QubitKet::normalized(phi[0], phi[1])?;
        members.push((weight, bloch_from_ket(&conditional)));
    }
    EnsembleDecomposition::new(members)
}
