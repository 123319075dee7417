//! Dividing each mode by `1 + xₙ²` removes finite escape: trajectories from
//! `2⁻ᴺ·e_N` still leave the origin but exist for all time.

use semistab::counterexample::{unstable_initial_state, TruncatedL2System, Variant};
use semistab::sampling::{rng, sampled_lipschitz_ratio, DEFAULT_PAIRS, DEFAULT_SEED};
use semistab::semilinear_sim::{integrate, norm2, SimConfig};

fn main() -> semistab::Result<()> {
    let system = TruncatedL2System::new(64, Variant::Bounded)?;
    let probe = unstable_initial_state(5, 64)?;
    let config = SimConfig { horizon: 50.0, ..SimConfig::default() };
    let traj = integrate(&system.spec(), &probe.x0, &config)?;
    println!("from ‖x0‖ = {:.4e}: {}", probe.norm(), traj.termination.name());
    for t in [0.0, 10.0, 20.0, 30.0, 40.0, 50.0] {
        let x = traj.sample_at(t).unwrap();
        println!("  t = {t:>4}: ‖x‖ = {:.6}, x_5 = {:.6}", norm2(&x), x[4]);
    }

    let mut r = rng(DEFAULT_SEED);
    for radius in [1.0, 10.0, 100.0] {
        let l = sampled_lipschitz_ratio(|x| system.rhs(x).unwrap(), 64, radius, DEFAULT_PAIRS, &mut r);
        println!("sampled Lipschitz ratio on the ball of radius {radius:>5}: {l:.4}");
    }
    Ok(())
}
