//! Bloch-sphere geometry and single-qubit state algebra.
//!
//! A pure state is identified by a unit [`BlochVector`] r̂ through
//! ρ(r̂) = ½(𝟙 + r̂·σ⃗) = |r̂⟩⟨r̂|, with
//! r̂ = (sin θ cos φ, sin θ sin φ, cos θ). The pole azimuth is taken as φ = 0.

use std::f64::consts::PI;
use std::ops::Neg;

use num_complex::Complex64;
use rand::Rng;

use crate::ensembles::EnsembleDecomposition;
use crate::{Error, Result};

/// Tolerance for algebraic identities (unit norm, trace, Hermiticity).
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Tolerance for round-trips through transcendental functions.
pub const ROUND_TRIP_TOL: f64 = 1e-10;

/// Unit vector in R³ labelling a pure qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    x: f64,
    y: f64,
    z: f64,
}

impl BlochVector {
    pub const Z: BlochVector = BlochVector { x: 0.0, y: 0.0, z: 1.0 };
    pub const MINUS_Z: BlochVector = BlochVector { x: 0.0, y: 0.0, z: -1.0 };
    pub const X: BlochVector = BlochVector { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: BlochVector = BlochVector { x: 0.0, y: 1.0, z: 0.0 };

    /// Accepts `(x, y, z)` only if its Euclidean norm is 1 within [`ALGEBRAIC_TOL`].
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::InvalidDirection { norm });
        }
        Ok(Self { x, y, z })
    }

    /// Scales a non-zero vector onto the sphere.
    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidDirection { norm });
        }
        Ok(Self { x: x / norm, y: y / norm, z: z / norm })
    }

    /// r̂(θ, φ) = (sin θ cos φ, sin θ sin φ, cos θ).
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self { x: st * cp, y: st * sp, z: ct }
    }

    /// Builds a direction from a polar cosine `t = cos θ` about an arbitrary
    /// unit `axis` and an azimuth measured in a fixed frame around it.
    pub fn around(axis: &BlochVector, cos_theta: f64, azimuth: f64) -> Self {
        let t = cos_theta.clamp(-1.0, 1.0);
        let s = (1.0 - t * t).max(0.0).sqrt();
        let (e1, e2) = axis.orthonormal_frame();
        let (sa, ca) = azimuth.sin_cos();
        let x = t * axis.x + s * (ca * e1[0] + sa * e2[0]);
        let y = t * axis.y + s * (ca * e1[1] + sa * e2[1]);
        let z = t * axis.z + s * (ca * e1[2] + sa * e2[2]);
        // Rounding in the frame can leave the result a few ulps off the sphere.
        let n = (x * x + y * y + z * z).sqrt();
        Self { x: x / n, y: y / n, z: z / n }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn antipode(&self) -> Self {
        Self { x: -self.x, y: -self.y, z: -self.z }
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Polar angle θ ∈ [0, π].
    pub fn polar(&self) -> f64 {
        (self.x.hypot(self.y)).atan2(self.z)
    }

    /// Azimuth φ ∈ (−π, π]; 0 at the poles.
    pub fn azimuth(&self) -> f64 {
        if self.x == 0.0 && self.y == 0.0 {
            0.0
        } else {
            self.y.atan2(self.x)
        }
    }

    /// Two unit vectors completing `self` to a right-handed orthonormal basis.
    /// Branch only on the sign of z (Duff et al. construction).
    pub fn orthonormal_frame(&self) -> ([f64; 3], [f64; 3]) {
        let sign = 1f64.copysign(self.z);
        let a = -1.0 / (sign + self.z);
        let b = self.x * self.y * a;
        (
            [1.0 + sign * self.x * self.x * a, sign * b, -sign * self.x],
            [b, sign + self.y * self.y * a, -self.y],
        )
    }

    pub(crate) fn from_unit_unchecked(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

impl Neg for BlochVector {
    type Output = BlochVector;

    fn neg(self) -> BlochVector {
        self.antipode()
    }
}

/// Normalized qubit ket with a canonical global phase: `amp0` is real and
/// non-negative, and when `amp0 = 0`, `amp1` is real and positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitKet {
    amp0: Complex64,
    amp1: Complex64,
}

impl QubitKet {
    /// Accepts a normalized pair of amplitudes and fixes its global phase.
    pub fn new(amp0: Complex64, amp1: Complex64) -> Result<Self> {
        let norm_sqr = amp0.norm_sqr() + amp1.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::InvalidState { norm_sqr });
        }
        Ok(Self::canonical(amp0, amp1))
    }

    /// Rescales a non-zero pair of amplitudes to unit norm, then fixes the phase.
    pub fn normalized(amp0: Complex64, amp1: Complex64) -> Result<Self> {
        let norm_sqr = amp0.norm_sqr() + amp1.norm_sqr();
        if !(norm_sqr.is_finite() && norm_sqr > 0.0) {
            return Err(Error::InvalidState { norm_sqr });
        }
        let n = norm_sqr.sqrt();
        Ok(Self::canonical(amp0 / n, amp1 / n))
    }

    fn canonical(amp0: Complex64, amp1: Complex64) -> Self {
        let r0 = amp0.norm();
        if r0 > 0.0 {
            let phase = amp0.conj() / r0;
            Self { amp0: Complex64::new(r0, 0.0), amp1: amp1 * phase }
        } else {
            let r1 = amp1.norm();
            Self { amp0: Complex64::new(0.0, 0.0), amp1: Complex64::new(r1, 0.0) }
        }
    }

    pub fn amp0(&self) -> Complex64 {
        self.amp0
    }

    pub fn amp1(&self) -> Complex64 {
        self.amp1
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        [self.amp0, self.amp1]
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &QubitKet) -> Complex64 {
        self.amp0.conj() * other.amp0 + self.amp1.conj() * other.amp1
    }
}

/// |r̂⟩ = (cos(θ/2), e^{iφ} sin(θ/2)) in the canonical phase.
pub fn ket_from_bloch(v: &BlochVector) -> QubitKet {
    let rho = v.x.hypot(v.y);
    let phase = |scale: f64| {
        if rho == 0.0 {
            Complex64::new(scale, 0.0)
        } else {
            Complex64::new(v.x, v.y) * (scale / rho)
        }
    };
    // Pick whichever half-angle factor is well conditioned and recover the
    // other from sin θ = 2 sin(θ/2) cos(θ/2).
    let (a0, a1) = if v.z >= 0.0 {
        let c = ((1.0 + v.z) / 2.0).sqrt();
        (c, Complex64::new(v.x, v.y) / (2.0 * c))
    } else {
        let s = ((1.0 - v.z) / 2.0).sqrt();
        (rho / (2.0 * s), phase(s))
    };
    QubitKet::normalized(Complex64::new(a0, 0.0), a1).expect("unit Bloch vector gives a non-zero ket")
}

/// Inverse of [`ket_from_bloch`]: r̂ = (2 Re a₀*a₁, 2 Im a₀*a₁, |a₀|² − |a₁|²).
pub fn bloch_from_ket(k: &QubitKet) -> BlochVector {
    let c = k.amp0.conj() * k.amp1;
    let x = 2.0 * c.re;
    let y = 2.0 * c.im;
    let z = k.amp0.norm_sqr() - k.amp1.norm_sqr();
    BlochVector::normalize(x, y, z).expect("normalized ket gives a non-zero Bloch vector")
}

/// |⟨a|b⟩|² = cos²(θ/2) = (1 + a·b)/2.
pub fn overlap2(a: &BlochVector, b: &BlochVector) -> f64 {
    (0.5 * (1.0 + a.dot(b))).clamp(0.0, 1.0)
}

/// Angle between two directions in [0, π].
pub fn angle_between(a: &BlochVector, b: &BlochVector) -> f64 {
    let cx = a.y * b.z - a.z * b.y;
    let cy = a.z * b.x - a.x * b.z;
    let cz = a.x * b.y - a.y * b.x;
    let sin = (cx * cx + cy * cy + cz * cz).sqrt();
    sin.atan2(a.dot(b))
}

/// Isotropic direction: z uniform on [−1, 1], azimuth uniform on [0, 2π).
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> BlochVector {
    let z = 2.0 * rng.random::<f64>() - 1.0;
    let phi = 2.0 * PI * rng.random::<f64>();
    let s = (1.0 - z * z).max(0.0).sqrt();
    let (sp, cp) = phi.sin_cos();
    BlochVector::from_unit_unchecked(s * cp, s * sp, z)
}

/// 2×2 density operator, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityOperator {
    m: [[Complex64; 2]; 2],
}

impl DensityOperator {
    /// ½(𝟙 + r·σ⃗) for a Bloch vector with |r| ≤ 1.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if !len.is_finite() || len > 1.0 + ALGEBRAIC_TOL {
            return Err(Error::InvalidDirection { norm: len });
        }
        let [x, y, z] = r;
        Ok(Self {
            m: [
                [Complex64::new((1.0 + z) / 2.0, 0.0), Complex64::new(x / 2.0, -y / 2.0)],
                [Complex64::new(x / 2.0, y / 2.0), Complex64::new((1.0 - z) / 2.0, 0.0)],
            ],
        })
    }

    /// |k⟩⟨k|.
    pub fn pure(k: &QubitKet) -> Self {
        let a = k.amplitudes();
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = a[i] * a[j].conj();
            }
        }
        Self { m }
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    /// r with ρ = ½(𝟙 + r·σ⃗).
    pub fn bloch_vector(&self) -> [f64; 3] {
        let off = self.m[1][0] + self.m[0][1].conj();
        [off.re, off.im, (self.m[0][0] - self.m[1][1]).re]
    }

    /// Eigenvalues (λ₋, λ₊) of the Hermitian part.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let c = 0.5 * (self.m[0][1] + self.m[1][0].conj());
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + c.norm_sqr()).sqrt();
        (mean - radius, mean + radius)
    }

    pub fn max_abs_diff(&self, other: &DensityOperator) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        worst
    }

    /// Checks Hermiticity, unit trace, positivity and |r| ≤ 1, all at [`ALGEBRAIC_TOL`].
    pub fn validate(&self) -> Result<()> {
        let herm = (self.m[0][1] - self.m[1][0].conj())
            .norm()
            .max(self.m[0][0].im.abs())
            .max(self.m[1][1].im.abs());
        if herm > ALGEBRAIC_TOL {
            return Err(Error::InvalidState { norm_sqr: f64::NAN });
        }
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > ALGEBRAIC_TOL {
            return Err(Error::InvalidState { norm_sqr: tr.re });
        }
        let (low, _) = self.eigenvalues();
        if low < -ALGEBRAIC_TOL {
            return Err(Error::InvalidState { norm_sqr: low });
        }
        let r = self.bloch_vector();
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if len > 1.0 + ALGEBRAIC_TOL {
            return Err(Error::InvalidDirection { norm: len });
        }
        Ok(())
    }
}

/// Σᵢ wᵢ |r̂ᵢ⟩⟨r̂ᵢ|, accumulated from the member kets.
pub fn density_from_mixture(ens: &EnsembleDecomposition) -> DensityOperator {
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (w, dir) in ens.members() {
        let pure = DensityOperator::pure(&ket_from_bloch(dir));
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e += pure.m[i][j] * *w;
            }
        }
    }
    DensityOperator { m }
}
