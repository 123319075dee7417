//! The diagonal ℓ² counterexample, truncated to its first `N_max` modes.
//!
//! Standard variant: `ẋ = −x + f(x)` with `f(x)ₙ = 3|xₙ|^{1/n} xₙ`. Its
//! Gateaux derivative at the origin is zero, yet `2⁻ᴺ·e_N` blows up in
//! finite time for every `N`, so the origin is unstable. The bounded variant
//! divides each mode by `1 + xₙ²`, which keeps the vector field globally
//! Lipschitz and removes finite escape.
//!
//! The dynamics are exactly diagonal, so truncation adds no coupling error
//! and every mode has the closed form from [`crate::scalar_mode`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar_mode::{self, crossing_time, escape_time, exact_solution, mode_rhs, ModeParams};
use crate::semilinear_sim::{integrate, norm2, GeneratorSpec, Nonlinearity, SimConfig, SystemSpec};

pub const DEFAULT_N_MAX: usize = 64;
/// Largest relative gap between detected and analytic crossing times that
/// the instability demo accepts.
pub const DEMO_GAP_TOL: f64 = 5e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Standard,
    Bounded,
}

impl Variant {
    /// `(−1 + 3|x|^{1/n})·x / (1 + x²)`.
    pub fn bounded_rhs(n: ModeParams, x: f64) -> f64 {
        mode_rhs(n, x) / (1.0 + x * x)
    }

    /// Full per-mode right-hand side.
    pub fn rhs(self, n: ModeParams, x: f64) -> f64 {
        match self {
            Variant::Standard => mode_rhs(n, x),
            Variant::Bounded => Self::bounded_rhs(n, x),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::Bounded => "bounded",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Variant::Standard),
            "bounded" => Ok(Variant::Bounded),
            other => Err(Error::InvalidArgument(format!("unknown variant {other:?}"))),
        }
    }
}

/// Majorant of `sup_u |(−1 + 3|u|^{1/n})u / (1 + u²)|`, valid for every `n`:
/// `|u|/(1+u²) ≤ 1/2` and `3|u|^{1+1/n}/(1+u²) ≤ 3`.
pub const BOUNDED_RHS_MAJORANT: f64 = 3.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedL2System {
    n_max: usize,
    variant: Variant,
}

impl TruncatedL2System {
    pub fn new(n_max: usize, variant: Variant) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidArgument("N_max must be at least 1".into()));
        }
        if n_max > u32::MAX as usize {
            return Err(Error::InvalidArgument(format!("N_max {n_max} too large")));
        }
        Ok(Self { n_max, variant })
    }

    pub fn standard(n_max: usize) -> Result<Self> {
        Self::new(n_max, Variant::Standard)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Mode index of 0-based component `i`.
    pub fn mode(&self, i: usize) -> ModeParams {
        ModeParams::new(i as u32 + 1).expect("index fits")
    }

    /// The standard nonlinearity `f(x)ₙ = 3|xₙ|^{1/n} xₙ`, regardless of the
    /// variant.
    pub fn standard_map(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x.len())?;
        Ok(x.iter().enumerate().map(|(i, &v)| scalar_mode::mode_nonlinearity(self.mode(i), v)).collect())
    }

    /// Full right-hand side of the chosen variant.
    pub fn rhs(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x.len())?;
        Ok(x.iter().enumerate().map(|(i, &v)| self.variant.rhs(self.mode(i), v)).collect())
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got == self.n_max {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.n_max, got })
        }
    }

    pub fn spec(&self) -> SystemSpec {
        SystemSpec::new(
            GeneratorSpec::Diagonal(vec![-1.0; self.n_max]),
            Nonlinearity::Counterexample(self.variant),
        )
        .expect("counterexample map vanishes at 0")
    }
}

/// Diagonal system with linear part `−I`. For the bounded variant the
/// nonlinear map absorbs the `+x` so that `Ax + f(x)` is the bounded field.
pub fn build_system(n_max: usize, variant: Variant) -> Result<SystemSpec> {
    Ok(TruncatedL2System::new(n_max, variant)?.spec())
}

/// Initial state `2⁻ᴺ·e_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnstableProbe {
    pub n: usize,
    pub x0: Vec<f64>,
}

impl UnstableProbe {
    pub fn norm(&self) -> f64 {
        norm2(&self.x0)
    }

    pub fn amplitude(&self) -> f64 {
        self.x0[self.n - 1]
    }
}

pub fn unstable_initial_state(n: usize, n_max: usize) -> Result<UnstableProbe> {
    if n == 0 || n > n_max {
        return Err(Error::InvalidArgument(format!("N = {n} must lie in 1..={n_max}")));
    }
    let mut x0 = vec![0.0; n_max];
    x0[n - 1] = 0.5f64.powi(n as i32);
    Ok(UnstableProbe { n, x0 })
}

/// Closed-form state of the standard system at time `t`.
pub fn exact_trajectory(system: &TruncatedL2System, x0: &[f64], t: f64) -> Result<Vec<f64>> {
    if system.variant != Variant::Standard {
        return Err(Error::InvalidArgument("closed form only exists for the standard variant".into()));
    }
    system.check_dim(x0.len())?;
    let escape = x0
        .iter()
        .enumerate()
        .filter_map(|(i, &v)| escape_time(system.mode(i), v).t_star)
        .fold(f64::INFINITY, f64::min);
    if t >= escape {
        return Err(Error::PastEscapeTime { t, t_star: escape });
    }
    x0.iter().enumerate().map(|(i, &v)| exact_solution(system.mode(i), v, t)).collect()
}

/// Lipschitz constant `6r` of the standard map on the ball of radius `r > 1`.
pub fn global_lipschitz_bound(r: f64) -> Result<f64> {
    if !(r > 1.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("radius must exceed 1, got {r}")));
    }
    Ok(6.0 * r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub initial_norm: f64,
    pub t_detect: Option<f64>,
    pub t_analytic: Option<f64>,
    pub relative_gap: Option<f64>,
    pub variant: Variant,
    pub termination: String,
    pub final_norm: f64,
    pub final_time: f64,
}

impl DemoReport {
    /// Standard: blow-up within the gap tolerance. Bounded: no blow-up by the
    /// horizon and the state moved away from the origin.
    pub fn reproduced(&self) -> bool {
        match self.variant {
            Variant::Standard => self.relative_gap.is_some_and(|g| g <= DEMO_GAP_TOL),
            Variant::Bounded => {
                self.termination == "horizon_reached" && self.final_norm > self.initial_norm
            }
        }
    }
}

/// Integrates from `2⁻ᴺ·e_N` and compares blow-up with the exact crossing
/// time of the threshold `B`.
pub fn instability_demo(n: usize, system: &TruncatedL2System, config: &SimConfig) -> Result<DemoReport> {
    let probe = unstable_initial_state(n, system.n_max)?;
    let traj = integrate(&system.spec(), &probe.x0, config)?;
    let t_detect = traj.termination.t_detect();
    let t_analytic = match system.variant {
        Variant::Standard => Some(crossing_time(system.mode(n - 1), probe.amplitude(), config.blow_up_threshold)?),
        Variant::Bounded => None,
    };
    let relative_gap = match (t_detect, t_analytic) {
        (Some(d), Some(a)) => Some((d - a).abs() / a),
        _ => None,
    };
    Ok(DemoReport {
        n,
        initial_norm: probe.norm(),
        t_detect,
        t_analytic,
        relative_gap,
        variant: system.variant,
        termination: traj.termination.name().to_string(),
        final_norm: norm2(traj.final_state()),
        final_time: traj.final_time(),
    })
}

/// Convergence cutoff for the demo, well below the initial norm `2⁻ᴺ` so
/// that small unstable starts are not reported as converged at `t = 0`.
pub fn demo_converged_threshold(n: usize) -> f64 {
    1e-6 * 0.5f64.powi(n as i32)
}

/// A horizon long enough for the standard demo to reach blow-up.
pub fn demo_horizon(n: usize, variant: Variant) -> f64 {
    match variant {
        Variant::Standard => 2.0 * n as f64 * 3f64.ln() + 10.0,
        Variant::Bounded => 50.0,
    }
}
