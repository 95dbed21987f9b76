//! Which isotropic densities survive the mixture-equality constraint?
//!
//! Evaluates the constraint residual over a grid of p and outcome directions
//! for the AB family and for the (3/4π) cos⁴(θ/2) counterexample, then reads
//! the AB parameters off each density's endpoints.
//!
//! ```bash
//! cargo run -p qubit-nosig --example no_signaling_constraint
//! ```

use qubit_nosig::estimator::{cos4_density, GuessingForm};
use qubit_nosig::nosignal::{constraint_residual_over, derive_ab_form, fibonacci_directions, p_grid};

fn main() {
    let dirs = fibonacci_directions(200);
    let ps = p_grid(101);

    for frac in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let form = GuessingForm::from_a_fraction(frac).unwrap();
        let r = constraint_residual_over(|t| form.density(t), &ps, &dirs).unwrap();
        println!("AB form A-frac {frac:.2}: max residual {:.2e}, rms {:.2e}", r.max(), r.rms());
    }

    let r = constraint_residual_over(cos4_density, &ps, &dirs).unwrap();
    println!("cos⁴ form:         max residual {:.2e}, rms {:.2e}", r.max(), r.rms());
    for (i, p) in r.p_values().iter().enumerate().step_by(20) {
        println!("    p = {p:.1}: worst direction residual {:.4e}", r.max_at(i));
    }

    for (name, d) in [
        ("(1/2π)cos²(θ/2)", derive_ab_form(|t| GuessingForm::massar_popescu().density(t)).unwrap()),
        ("(3/4π)cos⁴(θ/2)", derive_ab_form(cos4_density).unwrap()),
    ] {
        println!(
            "{name}: A = P(0) = {:.6}, B = P(π) = {:.6}, distance from AB form {:.3e}",
            d.form.a(),
            d.form.b(),
            d.residual
        );
    }
}
