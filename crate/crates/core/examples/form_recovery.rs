//! Recovering (A, B) from sampled guesses.
//!
//! Fits α + β cos θ to θ-histograms from three strategies and converts the
//! result back to (A, B) with standard errors.
//!
//! ```bash
//! cargo run --release -p qubit-nosig --example form_recovery
//! ```

use qubit_nosig::estimator::{density_experiment, EstimatorStrategy, GuessingForm};
use qubit_nosig::nosignal::fit_ab_least_squares;

fn main() {
    let cases = [
        ("massar-popescu", EstimatorStrategy::MassarPopescu, GuessingForm::massar_popescu()),
        ("uniform", EstimatorStrategy::ab(GuessingForm::uniform()).unwrap(), GuessingForm::uniform()),
        (
            "reversed",
            EstimatorStrategy::ab(GuessingForm::massar_popescu().swapped()).unwrap(),
            GuessingForm::massar_popescu().swapped(),
        ),
    ];
    for (name, strategy, truth) in cases {
        let hist = density_experiment(&strategy, 1_000_000, 50, 3, 4).unwrap();
        let fit = fit_ab_least_squares(&hist).unwrap();
        println!(
            "{name:>15}: A = {:.5} ± {:.5} (true {:.5}), B = {:.5} ± {:.5} (true {:.5}), χ²/dof = {:.2}",
            fit.a,
            fit.se_a,
            truth.a(),
            fit.b,
            fit.se_b,
            truth.b(),
            fit.chi2 / fit.dof as f64
        );
    }
}
