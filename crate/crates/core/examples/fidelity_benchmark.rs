//! Monte Carlo average fidelity of several strategies, checked against the
//! closed form (2π/3)(2A + B).
//!
//! ```bash
//! cargo run --release -p qubit-nosig --example fidelity_benchmark
//! ```

use std::time::Instant;

use qubit_nosig::estimator::{EstimatorStrategy, GuessingForm, TabulatedDensity};
use qubit_nosig::merit::{average_merit, fidelity_closed_form, monte_carlo_fidelity, MeritFunction, Reversed};

fn main() {
    let trials = 1_000_000;
    let forms = [
        ("massar-popescu (measured)", EstimatorStrategy::MassarPopescu, Some(GuessingForm::massar_popescu())),
        ("ab A-frac 0.75", EstimatorStrategy::ab(GuessingForm::from_a_fraction(0.75).unwrap()).unwrap(), GuessingForm::from_a_fraction(0.75).ok()),
        ("uniform", EstimatorStrategy::ab(GuessingForm::uniform()).unwrap(), Some(GuessingForm::uniform())),
        ("cos4 table", EstimatorStrategy::Tabulated(TabulatedDensity::cos4_counterexample()), None),
    ];
    for (name, strategy, form) in &forms {
        let start = Instant::now();
        let r = monte_carlo_fidelity(strategy, trials, 42, 4).unwrap();
        let expect = form.map(|f| fidelity_closed_form(&f));
        println!(
            "{name:>26}: {:.5} ± {:.5}  expected {}  ({:.2} s)",
            r.value,
            r.standard_error.unwrap(),
            expect.map_or("n/a (not an AB form)".to_string(), |v| format!("{v:.5}")),
            start.elapsed().as_secs_f64()
        );
    }
    let r = monte_carlo_fidelity(&Reversed(EstimatorStrategy::MassarPopescu), trials, 42, 4).unwrap();
    let mirror = average_merit(&GuessingForm::massar_popescu().swapped(), &MeritFunction::Fidelity);
    println!("{:>26}: {:.5} ± {:.5}  expected {mirror:.5}", "reversed massar-popescu", r.value, r.standard_error.unwrap());
}
