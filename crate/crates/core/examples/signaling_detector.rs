//! Operational signaling test.
//!
//! The receiver counts how often the estimator's guess lands within a small
//! cap around ẑ under each decomposition. A quantum strategy gives the same
//! frequency for both; the cos⁴ strategy does not, and would let the sender
//! signal by choosing her basis.
//!
//! ```bash
//! cargo run --release -p qubit-nosig --example signaling_detector
//! ```

use qubit_nosig::estimator::{cos4_density, EstimatorStrategy, TabulatedDensity};
use qubit_nosig::nosignal::{expected_frequencies, required_trials, run_discrimination_experiment, DETECTABLE_Z};

fn main() {
    let cap = 0.2;
    let (fs, fm) = expected_frequencies(cos4_density, 0.9, cap).unwrap();
    let trials = required_trials(fs, fm, DETECTABLE_Z, 0.9999).unwrap();
    println!("cos⁴ at p = 0.9: predicted cap frequencies {fs:.5} vs {fm:.5}; {trials} trials per decomposition");

    let strategies = [
        ("massar-popescu", EstimatorStrategy::MassarPopescu),
        ("cos4", EstimatorStrategy::Tabulated(TabulatedDensity::cos4_counterexample())),
    ];
    for (name, strategy) in &strategies {
        for p in [0.5, 0.7, 0.9] {
            let r = run_discrimination_experiment(strategy, p, cap, trials, 11, 4).unwrap();
            println!(
                "{name:>15} p = {p:.1}: f_std {:.5} ± {:.5}, f_sym {:.5} ± {:.5}, z = {:6.2} -> {:?}",
                r.freq_standard, r.se_standard, r.freq_symmetric, r.se_symmetric, r.z, r.verdict
            );
        }
    }
}
