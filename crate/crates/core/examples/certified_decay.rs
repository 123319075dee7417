//! Simulate from the edge of the certified basin and check the exponential
//! decay of the Lyapunov function at every accepted step.

use semistab::certificate::{build_certificate, lyapunov_value, verify_decay, CertificateInput, GainModulus};
use semistab::numerics::{Matrix, SymmetricMatrix};
use semistab::semilinear_sim::{integrate, GeneratorSpec, Nonlinearity, SimConfig, SystemSpec};

fn main() -> semistab::Result<()> {
    let input = CertificateInput {
        a: Matrix::from_diagonal(&[-1.0, -1.0]),
        q: SymmetricMatrix::identity(2),
        omega: 1.0,
    };
    let cert = build_certificate(&input)?.with_basin(&GainModulus::linear(1.0))?;
    let delta = cert.delta.unwrap();

    let dir = [0.6, -0.8];
    let s = (delta / lyapunov_value(&cert, &dir)?).sqrt();
    let x0 = [dir[0] * s, dir[1] * s];
    println!("x0 = {x0:?}, V(x0) = {:.6} = δ", lyapunov_value(&cert, &x0)?);

    let spec = SystemSpec::new(GeneratorSpec::Diagonal(vec![-1.0, -1.0]), Nonlinearity::ComponentwiseSquare)?;
    let config = SimConfig { horizon: 10.0, converged_threshold: 1e-12, ..SimConfig::default() };
    let traj = integrate(&spec, &x0, &config)?;
    let report = verify_decay(&cert, &traj)?;

    println!("{:>8} {:>14} {:>10}", "t", "V(x(t))", "margin");
    for (k, (t, x)) in traj.times.iter().zip(&traj.states).enumerate().step_by(traj.times.len() / 10 + 1) {
        println!("{t:>8.3} {:>14.6e} {:>10.6}", lyapunov_value(&cert, x)?, report.margins[k]);
    }
    let worst = report.margins.iter().copied().fold(0.0, f64::max);
    println!("rate 1/(2M1) = {}, worst margin {worst:.9}, pass = {}", report.rate, report.pass);
    Ok(())
}
