//! Integrate unstable modes until the blow-up detector fires and compare the
//! detection time with the exact threshold crossing.

use semistab::counterexample::TruncatedL2System;
use semistab::scalar_mode::{crossing_time, escape_time, ModeParams};
use semistab::semilinear_sim::{integrate, SimConfig};

fn main() -> semistab::Result<()> {
    let config = SimConfig { horizon: 100.0, converged_threshold: 1e-300, ..SimConfig::default() };
    println!("{:>3} {:>12} {:>12} {:>12} {:>10}", "n", "t_detect", "t_cross", "t*", "gap %");
    for n in [1usize, 2, 5, 10, 20] {
        let system = TruncatedL2System::standard(n)?;
        let m = ModeParams::new(n as u32)?;
        let amp = 0.5f64.powi(n as i32);
        let mut x0 = vec![0.0; n];
        x0[n - 1] = amp;
        let traj = integrate(&system.spec(), &x0, &config)?;
        let t_detect = traj.termination.t_detect().expect("mode blows up");
        let t_cross = crossing_time(m, amp, config.blow_up_threshold)?;
        let t_star = escape_time(m, amp).t_star.unwrap();
        println!(
            "{n:>3} {t_detect:>12.6} {t_cross:>12.6} {t_star:>12.6} {:>10.4}",
            100.0 * (t_detect - t_cross).abs() / t_cross
        );
    }

    // ẋ = x² from 1 escapes at t = 1; with a huge threshold the step collapse
    // gate fires first
    let spec = semistab::semilinear_sim::SystemSpec::new(
        semistab::semilinear_sim::GeneratorSpec::Diagonal(vec![0.0]),
        semistab::semilinear_sim::Nonlinearity::ComponentwiseSquare,
    )?;
    let config = SimConfig { horizon: 2.0, blow_up_threshold: 1e300, ..SimConfig::default() };
    let traj = integrate(&spec, &[1.0], &config)?;
    println!("x' = x^2, x0 = 1: {:?}", traj.termination);
    Ok(())
}
