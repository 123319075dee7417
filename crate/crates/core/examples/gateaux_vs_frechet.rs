//! The counterexample map is Gateaux differentiable at 0 with derivative 0,
//! yet `‖f(x)‖/‖x‖` stays at 3/2 along `2⁻ᴺ·e_N`.

use semistab::counterexample::TruncatedL2System;
use semistab::derivative_probe::{default_schedule, frechet_failure_probe, gateaux_limit_check, Direction};

fn main() -> semistab::Result<()> {
    let system = TruncatedL2System::standard(64)?;

    for spec in ["e_1", "e_2", "1:1,2:-1,10:0.5", "e_40"] {
        let d = Direction::parse(spec)?;
        let report = gateaux_limit_check(&system, &d, &default_schedule())?;
        let eps = report.epsilons.last().unwrap();
        let q = report.quotients.last().unwrap();
        println!(
            "{spec:>16}: verdict {}, {} evaluations ({} appended), quotient {q:.3e} at ε = {eps:.0e}",
            report.verdict,
            report.quotients.len(),
            report.extended
        );
    }

    let report = frechet_failure_probe(&system, 1..=40)?;
    for p in report.probes.iter().step_by(6) {
        println!("N = {:>2}: ‖x‖ = {:.3e}, ‖f(x)‖/‖x‖ = {}", p.n, p.norm, p.ratio);
    }
    println!("limsup estimate: {}", report.limsup_estimate);
    Ok(())
}
