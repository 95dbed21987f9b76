//! Pure-state preparation on the Bloch sphere.
//!
//! Draws a few isotropic directions, maps each to its canonical ket and back,
//! and checks ρ(r̂) = ½(𝟙 + r̂·σ⃗) = |r̂⟩⟨r̂|.
//!
//! ```bash
//! cargo run -p qubit-nosig --example state_preparation
//! ```

use qubit_nosig::bloch::{bloch_from_ket, ket_from_bloch, overlap2, random_direction, DensityOperator};
use qubit_nosig::rng::{substream, Purpose};

fn main() {
    let mut rng = substream(2024, Purpose::GENERIC, 0);
    for _ in 0..4 {
        let r = random_direction(&mut rng);
        let ket = ket_from_bloch(&r);
        let back = bloch_from_ket(&ket);
        let from_ket = DensityOperator::pure(&ket);
        let from_vector = DensityOperator::from_bloch(r.to_array()).unwrap();
        println!(
            "r = ({:+.4}, {:+.4}, {:+.4})  |r> = ({:.4}, {:.4}{:+.4}i)  round-trip err {:.1e}  |ρ_ket − ρ_vec| {:.1e}",
            r.x(),
            r.y(),
            r.z(),
            ket.amp0().re,
            ket.amp1().re,
            ket.amp1().im,
            (0..3).map(|k| (r.to_array()[k] - back.to_array()[k]).abs()).fold(0.0, f64::max),
            from_ket.max_abs_diff(&from_vector),
        );
        println!(
            "    overlap with antipode {:.3e}, with itself {:.15}",
            overlap2(&r, &r.antipode()),
            overlap2(&r, &r)
        );
    }
}
