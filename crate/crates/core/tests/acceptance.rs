//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use semistab::certificate::{
    build_certificate, estimate_basin, lyapunov_value, verify_decay, CertificateInput, GainModulus,
    BISECTION_STEPS, DEFAULT_R_MAX,
};
use semistab::cli;
use semistab::counterexample::{
    demo_converged_threshold, demo_horizon, instability_demo, unstable_initial_state, TruncatedL2System, Variant,
};
use semistab::derivative_probe::{
    default_schedule, direct_quotient, frechet_failure_probe, gateaux_limit_check, Direction,
};
use semistab::numerics::{is_hurwitz, lyapunov_residual, lyapunov_solve, sym_eig, Matrix, SymmetricMatrix};
use semistab::sampling::{self, sampled_lipschitz_ratio, sampled_scalar_lipschitz, DEFAULT_PAIRS, DEFAULT_SEED};
use semistab::scalar_mode::{crossing_time, escape_time, exact_solution, lipschitz_bound, mode_nonlinearity, mode_rhs, ModeParams};
use semistab::semilinear_sim::{integrate, norm2, GeneratorSpec, Nonlinearity, SimConfig, SystemSpec, Termination};

type Check = Result<String, String>;

fn mode(n: u32) -> ModeParams {
    ModeParams::new(n).expect("n >= 1")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn single_mode(n: u32) -> SystemSpec {
    let m = mode(n);
    let dim = n as usize;
    let f = Nonlinearity::custom(move |x, out| {
        out.iter_mut().for_each(|v| *v = 0.0);
        out[dim - 1] = mode_nonlinearity(m, x[dim - 1]);
    });
    SystemSpec::new(GeneratorSpec::Diagonal(vec![-1.0; dim]), f).expect("f(0) = 0")
}

fn unit_state(dim: usize, k: usize, v: f64) -> Vec<f64> {
    let mut x = vec![0.0; dim];
    x[k - 1] = v;
    x
}

fn lyapunov_random() -> Check {
    let mut rng = sampling::rng(DEFAULT_SEED);
    let mut worst: f64 = 0.0;
    for trial in 0..50 {
        let dim = 2 + trial * 28 / 49;
        let entries: Vec<f64> = (0..dim * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut a = Matrix::from_row_major(dim, dim, entries).map_err(|e| e.to_string())?;
        // entries uniform on (−1, 1) put the spectrum in a disc of radius
        // about √(dim/3); start just inside it
        let mut shift = 0.8 * (dim as f64 / 3.0).sqrt();
        for i in 0..dim {
            a[(i, i)] -= shift;
        }
        while !is_hurwitz(&a) {
            shift += 0.25;
            for i in 0..dim {
                a[(i, i)] -= 0.25;
            }
        }
        let p = lyapunov_solve(&a).map_err(|e| format!("dim {dim}: {e}"))?;
        let res = lyapunov_residual(&a, &p).map_err(|e| e.to_string())?;
        let lmin = sym_eig(&p).map_err(|e| e.to_string())?.min();
        ensure(res <= 1e-10 * dim as f64, || format!("dim {dim} shift {shift}: residual {res:e}"))?;
        ensure(lmin > 0.0, || format!("dim {dim}: lambda_min(P) = {lmin:e}"))?;
        worst = worst.max(res / dim as f64);
    }
    Ok(format!("50 matrices, max residual/dim = {worst:.2e}"))
}

fn certificate_chain() -> Check {
    let input = CertificateInput {
        a: Matrix::from_diagonal(&[-1.0, -1.0]),
        q: SymmetricMatrix::identity(2),
        omega: 1.0,
    };
    let cert = build_certificate(&input).map_err(|e| e.to_string())?;
    ensure((cert.m1 - 2.0).abs() <= 1e-12 && (cert.big_m1 - 2.0).abs() <= 1e-12, || {
        format!("m1 = {}, M1 = {}", cert.m1, cert.big_m1)
    })?;
    let margin = cert.residuals.eq4_margin;
    ensure((margin + 4.0).abs() <= 1e-12 && margin <= -1.0, || format!("P2 decrease margin {margin}"))?;
    let delta = estimate_basin(&cert, &GainModulus::linear(1.0)).map_err(|e| e.to_string())?;
    let granule = cert.m1 * DEFAULT_R_MAX * DEFAULT_R_MAX / 2f64.powi(BISECTION_STEPS as i32);
    ensure((delta - 1.0 / 32.0).abs() <= granule, || format!("delta = {delta:e}, granule {granule:e}"))?;
    Ok(format!("m1 = M1 = {}, decrease margin = {margin}, delta = {delta}", cert.m1))
}

fn certified_decay() -> Check {
    let dim = 3;
    let input = CertificateInput {
        a: Matrix::from_diagonal(&vec![-1.0; dim]),
        q: SymmetricMatrix::identity(dim),
        omega: 1.0,
    };
    // ‖x∘x‖ ≤ ‖x‖∞‖x‖ ≤ ‖x‖², so g(r) = r
    let cert = build_certificate(&input)
        .and_then(|c| c.with_basin(&GainModulus::linear(1.0)))
        .map_err(|e| e.to_string())?;
    let delta = cert.delta.expect("basin set");
    let spec = SystemSpec::new(GeneratorSpec::Diagonal(vec![-1.0; dim]), Nonlinearity::ComponentwiseSquare)
        .map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut steps = 0;
    for dir in [[1.0, 0.0, 0.0], [1.0, 1.0, 1.0], [1.0, -2.0, 0.5]] {
        let scale = (delta / lyapunov_value(&cert, &dir).map_err(|e| e.to_string())?).sqrt();
        let x0: Vec<f64> = dir.iter().map(|v| v * scale).collect();
        let config = SimConfig { horizon: 10.0, converged_threshold: 1e-300, ..SimConfig::default() };
        let traj = integrate(&spec, &x0, &config).map_err(|e| e.to_string())?;
        ensure(traj.termination == Termination::HorizonReached, || format!("{:?}", traj.termination))?;
        let report = verify_decay(&cert, &traj).map_err(|e| e.to_string())?;
        let m = report.margins.iter().copied().fold(0.0, f64::max);
        ensure(report.pass, || format!("decay margin {m} exceeds 1 + 1e-6"))?;
        ensure((report.rate - 0.25).abs() < 1e-12, || format!("rate {}", report.rate))?;
        worst = worst.max(m);
        steps += traj.times.len();
    }
    Ok(format!("V(x0) = delta = {delta}, {steps} steps, max margin {worst:.6}"))
}

fn equilibria() -> Check {
    let mut worst: f64 = 0.0;
    for n in 1..=20 {
        let e = mode(n).threshold();
        for x in [e, -e] {
            let r = mode_rhs(mode(n), x).abs();
            ensure(r <= 1e-15, || format!("n = {n}: |rhs(±3^-n)| = {r:e}"))?;
            worst = worst.max(r);
        }
    }
    Ok(format!("n = 1..20, max |rhs| = {worst:.1e}"))
}

fn classification() -> Check {
    let mut worst: f64 = 0.0;
    for n in 1..=20u32 {
        let spec = single_mode(n);
        let e = mode(n).threshold();
        let horizon = 40.0 * n as f64;
        // For large n, |x| underflows long before T = 40n. Inside (−3⁻ⁿ, 3⁻ⁿ)
        // |x| decreases monotonically, so stopping once it is below 1e-12
        // bounds |x(T)| as well.
        let base = SimConfig { horizon, converged_threshold: 1e-12, ..SimConfig::default() };

        let traj = integrate(&spec, &unit_state(n as usize, n as usize, 0.9 * e), &base).map_err(|e| e.to_string())?;
        let xt = norm2(traj.final_state());
        let monotone = traj.states.windows(2).all(|w| norm2(&w[1]) <= norm2(&w[0]));
        ensure(
            traj.termination != Termination::Converged || monotone,
            || format!("n = {n}: converged but |x| was not monotone"),
        )?;
        ensure(
            !traj.termination.is_blow_up() && xt <= 1e-8,
            || format!("n = {n}: {:?} with |x| = {xt:e}", traj.termination),
        )?;
        worst = worst.max(xt);

        let traj = integrate(&spec, &unit_state(n as usize, n as usize, 1.1 * e), &base).map_err(|e| e.to_string())?;
        ensure(traj.termination.is_blow_up(), || format!("n = {n}: no blow-up from 1.1*3^-n ({:?})", traj.termination))?;
    }
    Ok(format!("n = 1..20, max |x(T)| = {worst:.1e}, all 1.1*3^-n starts blew up"))
}

fn escape_times() -> Check {
    let mut worst_gap: f64 = 0.0;
    let mut worst_escape: f64 = 0.0;
    for n in [1u32, 2, 5, 10, 20] {
        let x0 = 0.5f64.powi(n as i32);
        let config = SimConfig { horizon: 10.0 * n as f64, converged_threshold: 1e-300, ..SimConfig::default() };
        let traj = integrate(&single_mode(n), &unit_state(n as usize, n as usize, x0), &config).map_err(|e| e.to_string())?;
        let t_detect = traj.termination.t_detect().ok_or_else(|| format!("n = {n}: no blow-up"))?;
        let t_cross = crossing_time(mode(n), x0, config.blow_up_threshold).map_err(|e| e.to_string())?;
        let gap = (t_detect - t_cross).abs() / t_cross;
        ensure(gap <= 5e-3, || format!("n = {n}: t_detect {t_detect}, crossing {t_cross}"))?;
        let t_star = escape_time(mode(n), x0).t_star.ok_or("escape time not finite")?;
        let expected = n as f64 * 3f64.ln();
        let rel = (t_star - expected).abs() / expected;
        ensure(rel <= 1e-12, || format!("n = {n}: t* = {t_star}, n ln 3 = {expected}"))?;
        worst_gap = worst_gap.max(gap);
        worst_escape = worst_escape.max(rel);
    }
    Ok(format!("max detection gap {:.3}%, max escape-time error {worst_escape:.1e}", 100.0 * worst_gap))
}

fn oracle_differential() -> Check {
    let fractions = [0.99, -0.9, 0.5, -0.25, 1e-3];
    let modes = [1u32, 2, 3, 7, 12, 20];
    let mut pairs = Vec::new();
    for (i, &n) in modes.iter().enumerate() {
        for (j, &s) in fractions.iter().enumerate() {
            if (i + j) % 3 != 2 && pairs.len() < 20 {
                pairs.push((n, s * mode(n).threshold()));
            }
        }
    }
    ensure(pairs.len() == 20, || format!("built {} pairs", pairs.len()))?;

    // Relative accuracy down to tiny amplitudes needs pure relative error control.
    let config = SimConfig { horizon: 20.0, abs_tol: 0.0, converged_threshold: 1e-300, ..SimConfig::default() };
    let mut worst: f64 = 0.0;
    for &(n, x0) in &pairs {
        let dim = n as usize;
        let traj = integrate(&single_mode(n), &unit_state(dim, dim, x0), &config).map_err(|e| e.to_string())?;
        ensure(traj.termination == Termination::HorizonReached, || format!("n = {n}: {:?}", traj.termination))?;
        for (t, x) in traj.times.iter().zip(&traj.states) {
            let exact = exact_solution(mode(n), x0, *t).map_err(|e| e.to_string())?;
            let rel = (x[dim - 1] - exact).abs() / exact.abs();
            ensure(rel <= 1e-6, || format!("n = {n}, x0 = {x0:e}, t = {t}: rel error {rel:e}"))?;
            worst = worst.max(rel);
        }
    }
    Ok(format!("20 pairs over T = 20, max rel error {worst:.2e}"))
}

fn gateaux() -> Check {
    let system = TruncatedL2System::standard(64).map_err(|e| e.to_string())?;
    let ten = Direction::new((1..=10).map(|n| (n, 1.0))).map_err(|e| e.to_string())?;
    let dirs = [
        ("e_1", Direction::unit(1).map_err(|e| e.to_string())?),
        ("e_2", Direction::unit(2).map_err(|e| e.to_string())?),
        ("10-mode", ten),
    ];
    let mut notes = Vec::new();
    for (name, d) in &dirs {
        let report = gateaux_limit_check(&system, d, &default_schedule()).map_err(|e| e.to_string())?;
        ensure(report.verdict, || format!("{name}: verdict false, quotients {:?}", report.quotients))?;
        let eps = *report.epsilons.last().expect("non-empty");
        let q = *report.quotients.last().expect("non-empty");
        // ‖f(εx)‖/ε = (Σ 9 ε^{2/n} |xₙ|^{2+2/n})^{1/2}
        let closed: f64 = d
            .entries()
            .map(|(n, v)| 9.0 * eps.powf(2.0 / n as f64) * v.abs().powf(2.0 + 2.0 / n as f64))
            .sum::<f64>()
            .sqrt();
        let rel = (q - closed).abs() / closed;
        ensure(rel <= 1e-12, || format!("{name}: quotient {q:e} vs closed form {closed:e}"))?;
        let direct = direct_quotient(&system, d, eps).map_err(|e| e.to_string())?;
        ensure((q - direct).abs() <= 1e-12 * direct, || format!("{name}: direct evaluation {direct:e} vs {q:e}"))?;
        notes.push(format!("{name} q({eps:.0e}) = {q:.3e}"));
    }
    Ok(notes.join(", "))
}

fn frechet() -> Check {
    let system = TruncatedL2System::standard(64).map_err(|e| e.to_string())?;
    let report = frechet_failure_probe(&system, 1..=40).map_err(|e| e.to_string())?;
    ensure(report.probes.len() == 40, || format!("{} probes", report.probes.len()))?;
    let mut worst: f64 = 0.0;
    for p in &report.probes {
        ensure((p.ratio - 1.5).abs() <= 1e-12, || format!("N = {}: ratio {}", p.n, p.ratio))?;
        ensure(p.norm == 0.5f64.powi(p.n as i32), || format!("N = {}: norm {:e}", p.n, p.norm))?;
        worst = worst.max((p.ratio - 1.5).abs());
    }
    Ok(format!("N = 1..40, min norm {:e}, max |ratio - 1.5| = {worst:.1e}", report.probes[39].norm))
}

fn instability() -> Check {
    let system = TruncatedL2System::standard(64).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut last_norm = f64::INFINITY;
    let mut worst: f64 = 0.0;
    for n in [1usize, 5, 10, 20, 40] {
        let config = SimConfig {
            horizon: demo_horizon(n, Variant::Standard),
            converged_threshold: demo_converged_threshold(n),
            ..SimConfig::default()
        };
        let report = instability_demo(n, &system, &config).map_err(|e| e.to_string())?;
        let gap = report.relative_gap.ok_or_else(|| format!("N = {n}: {}", report.termination))?;
        ensure(report.termination == "blow_up" && gap <= 5e-3, || format!("N = {n}: gap {gap}"))?;
        ensure(report.initial_norm < last_norm, || format!("N = {n}: initial norms not decreasing"))?;
        last_norm = report.initial_norm;
        worst = worst.max(gap);

        let x0 = unstable_initial_state(n, 64).map_err(|e| e.to_string())?.x0;
        let path = dir.path().join(format!("x0_{n}.json"));
        std::fs::write(&path, serde_json::to_string(&x0).expect("serialize")).map_err(|e| e.to_string())?;
        let horizon = config.horizon.to_string();
        let converged = config.converged_threshold.to_string();
        let out = cli::run([
            "semistab",
            "simulate",
            "--n-max",
            "64",
            "--x0",
            path.to_str().expect("utf8 path"),
            "--horizon",
            &horizon,
            "--converged-threshold",
            &converged,
        ]);
        ensure(out.code == cli::EXIT_BLOW_UP, || format!("N = {n}: simulate exited {} ({})", out.code, out.stderr))?;
    }
    Ok(format!("N in {{1,5,10,20,40}}, smallest norm {last_norm:e}, max gap {:.3}%", 100.0 * worst))
}

fn bounded_variant() -> Check {
    let system = TruncatedL2System::new(64, Variant::Bounded).map_err(|e| e.to_string())?;
    let x0 = unstable_initial_state(5, 64).map_err(|e| e.to_string())?.x0;
    let config = SimConfig { horizon: 50.0, ..SimConfig::default() };
    let traj = integrate(&system.spec(), &x0, &config).map_err(|e| e.to_string())?;
    ensure(traj.termination == Termination::HorizonReached, || format!("{:?}", traj.termination))?;
    ensure((traj.final_time() - 50.0).abs() < 1e-9, || format!("stopped at {}", traj.final_time()))?;

    let mut rng = sampling::rng(DEFAULT_SEED);
    let f = |x: &[f64]| system.rhs(x).expect("dimension");
    let maxima: Vec<f64> = [1.0, 10.0, 100.0]
        .iter()
        .map(|&r| sampled_lipschitz_ratio(f, 64, r, DEFAULT_PAIRS, &mut rng))
        .collect();
    let hi = maxima.iter().copied().fold(0.0, f64::max);
    let lo = maxima.iter().copied().fold(f64::INFINITY, f64::min);
    ensure(hi <= 1.05 * lo, || format!("sampled maxima {maxima:?} spread more than 5%"))?;
    Ok(format!("final norm {:.3e} at T = 50, sampled maxima {:.4?}", norm2(traj.final_state()), maxima))
}

fn lipschitz_bounds() -> Check {
    let mut rng = sampling::rng(DEFAULT_SEED);
    let mut worst: f64 = 0.0;
    for n in 1..=20 {
        for r in [0.1, 1.0, 2.0, 5.0, 10.0] {
            let bound = lipschitz_bound(mode(n), r).map_err(|e| e.to_string())?.bound;
            let s = sampled_scalar_lipschitz(|x| mode_nonlinearity(mode(n), x), r, 2_000, &mut rng);
            ensure(s <= bound, || format!("n = {n}, r = {r}: sampled {s} > bound {bound}"))?;
            worst = worst.max(s / bound);
        }
    }
    let system = TruncatedL2System::standard(64).map_err(|e| e.to_string())?;
    let f = |x: &[f64]| system.standard_map(x).expect("dimension");
    let mut full = Vec::new();
    for r in [2.0, 5.0, 10.0] {
        let s = sampled_lipschitz_ratio(f, 64, r, DEFAULT_PAIRS, &mut rng);
        ensure(s <= 6.0 * r, || format!("full map, r = {r}: sampled {s} > {}", 6.0 * r))?;
        full.push(s / (6.0 * r));
    }
    Ok(format!("mode ratios at most {:.3} of bound, full-map ratios {:.3?} of 6r", worst, full))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("lyapunov solver on random Hurwitz matrices", lyapunov_random),
        ("certificate chain for A = -I, Q = I, omega = 1", certificate_chain),
        ("certified decay along x' = -x + x*x", certified_decay),
        ("mode equilibria at ±3^-n", equilibria),
        ("mode classification by simulation", classification),
        ("escape and crossing times", escape_times),
        ("simulator vs closed-form oracle", oracle_differential),
        ("gateaux quotients vanish", gateaux),
        ("frechet ratio stays at 3/2", frechet),
        ("instability from 2^-N e_N", instability),
        ("bounded variant stays global", bounded_variant),
        ("lipschitz majorants", lipschitz_bounds),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
