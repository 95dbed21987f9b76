//! Optimizing the figure of merit over the AB family.
//!
//! The average of any isotropic score is affine in A along the normalized
//! family, so a decreasing score is maximized at B = 0. Reversing every
//! guess swaps A and B.
//!
//! ```bash
//! cargo run -p qubit-nosig --example merit_optimization
//! ```

use std::f64::consts::PI;

use qubit_nosig::merit::{
    average_merit, collinearity_defect, optimize_ab, reverse_outcomes, Argmax, MeritFunction, TabulatedMerit,
};

fn main() {
    let merits = [
        ("fidelity cos²(θ/2)", MeritFunction::Fidelity),
        (
            "cos⁴(θ/2)",
            MeritFunction::MonotoneTabulated(TabulatedMerit::from_fn(|t| (0.5 * t).cos().powi(4), 1801).unwrap()),
        ),
        ("1 − θ/π", MeritFunction::MonotoneTabulated(TabulatedMerit::from_fn(|t| 1.0 - t / PI, 2).unwrap())),
        ("constant ½", MeritFunction::MonotoneTabulated(TabulatedMerit::constant(0.5).unwrap())),
    ];
    for (name, merit) in &merits {
        let opt = optimize_ab(merit).unwrap();
        let defect = collinearity_defect(&opt.scan);
        match opt.argmax {
            Argmax::Form(f) => println!(
                "{name:>20}: best A = {:.6}, B = {:.6}, value {:.10}, collinearity defect {defect:.1e}",
                f.a(),
                f.b(),
                opt.value
            ),
            Argmax::Tie => println!("{name:>20}: flat across the family at {:.10}", opt.value),
        }
        if let Argmax::Form(f) = opt.argmax {
            let reversed = reverse_outcomes(&f);
            println!("{:>20}  reversed (A = {:.6}, B = {:.6}) scores {:.10}", "", reversed.a(), reversed.b(), average_merit(&reversed, merit));
        }
    }
}
