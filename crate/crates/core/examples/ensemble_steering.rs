//! Steering the receiver's ensemble through the choice of measurement basis.
//!
//! For |ψ⟩ = √p |0⟩|ẑ⟩ + √(1−p) |1⟩|−ẑ⟩, measuring the sender's qubit in
//! {|0⟩, |1⟩} leaves {(p, ẑ), (1−p, −ẑ)}; measuring in the rotated basis
//! leaves {(½, θ̂), (½, θ̂′)}. Both describe the same density operator.
//!
//! ```bash
//! cargo run -p qubit-nosig --example ensemble_steering -- 0.75
//! ```

use qubit_nosig::bloch::density_from_mixture;
use qubit_nosig::ensembles::{
    build_psi, decomposition_from_alice_measurement, rotated_alice_basis, rotated_expansion, AliceBasis,
};

fn main() {
    let p: f64 = std::env::args().nth(1).map(|s| s.parse().expect("p must be a number")).unwrap_or(0.75);
    let psi = build_psi(p).expect("p in [0, 1]");
    let basis = rotated_alice_basis(p).expect("p strictly between 0 and 1");

    let standard = decomposition_from_alice_measurement(&psi, &AliceBasis::computational()).unwrap();
    let symmetric = decomposition_from_alice_measurement(&psi, &basis).unwrap();

    println!("p = {p}, cos θ = 2p − 1 = {}", 2.0 * p - 1.0);
    for (name, ens) in [("computational basis", &standard), ("rotated basis", &symmetric)] {
        println!("{name}:");
        for (w, d) in ens.members() {
            println!("  weight {w:.6}  direction ({:+.6}, {:+.6}, {:+.6})", d.x(), d.y(), d.z());
        }
    }
    let [k0, k1] = basis.kets();
    println!(
        "rotated basis |0'> = ({:.4}, {:+.4}i), |1'> = ({:.4}, {:+.4}i)",
        k0.amp0().re,
        k0.amp1().im,
        k1.amp0().re,
        k1.amp1().im
    );
    let rho_a = density_from_mixture(&standard);
    let rho_b = density_from_mixture(&symmetric);
    println!("max |ρ_standard − ρ_symmetric| = {:.2e}", rho_a.max_abs_diff(&rho_b));
    let rebuilt = rotated_expansion(p, &basis).unwrap();
    println!("|ψ − (|0'>|θ> + |1'>|θ'>)/√2| = {:.2e}", psi.distance_up_to_phase(&rebuilt));
}
