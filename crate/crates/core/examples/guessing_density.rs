//! Empirical guessing density of the random-axis measurement.
//!
//! Histograms the angle between guess and input over many protocol runs and
//! compares each bin with (1/2π) cos²(θ/2).
//!
//! ```bash
//! cargo run --release -p qubit-nosig --example guessing_density
//! ```

use qubit_nosig::estimator::{density_experiment, EstimatorStrategy, GuessingForm};

fn main() {
    let trials = 1_000_000;
    let form = GuessingForm::massar_popescu();
    let hist = density_experiment(&EstimatorStrategy::MassarPopescu, trials, 25, 7, 4).unwrap();
    println!("{:>8} {:>10} {:>12} {:>12}", "θ_mid", "count", "empirical", "analytic");
    for i in 0..hist.bins() {
        let (lo, hi) = hist.edges(i);
        let analytic = form.band_probability(lo, hi) / hist.solid_angle(i);
        println!(
            "{:>8.4} {:>10} {:>12.6} {:>12.6}",
            0.5 * (lo + hi),
            hist.counts()[i],
            hist.empirical_density(i),
            analytic
        );
    }
    let chi = hist.chi_square(|lo, hi| form.band_probability(lo, hi));
    println!("χ² = {:.2} on {} dof (0.999 quantile {:.2})", chi.statistic, chi.dof, chi.critical);
}
