//! Initial states `2⁻ᴺ·e_N` shrink to zero yet every one of them blows up,
//! so the origin is unstable although the linear part is `−I`.

use semistab::counterexample::{demo_converged_threshold, demo_horizon, instability_demo, TruncatedL2System, Variant};
use semistab::semilinear_sim::SimConfig;

fn main() -> semistab::Result<()> {
    let system = TruncatedL2System::standard(64)?;
    println!("{:>3} {:>12} {:>12} {:>12} {:>9}", "N", "‖x0‖", "t_detect", "t_analytic", "gap %");
    for n in [1, 2, 5, 10, 20, 30, 40] {
        let config = SimConfig {
            horizon: demo_horizon(n, Variant::Standard),
            converged_threshold: demo_converged_threshold(n),
            ..SimConfig::default()
        };
        let r = instability_demo(n, &system, &config)?;
        println!(
            "{n:>3} {:>12.4e} {:>12.6} {:>12.6} {:>9.4}",
            r.initial_norm,
            r.t_detect.unwrap_or(f64::NAN),
            r.t_analytic.unwrap_or(f64::NAN),
            100.0 * r.relative_gap.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
