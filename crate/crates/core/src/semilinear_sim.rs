//! Adaptive integration of `ẋ = Ax + f(x)` with finite-escape detection.
//!
//! The stepper is the Dormand–Prince 5(4) pair with a PI step-size
//! controller. Blow-up is detected two ways: the state norm crossing the
//! threshold `B`, or the step controller asking for a step below `h_min`.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::counterexample::Variant;
use crate::error::{Error, Result};
use crate::numerics::{lyapunov_solve, sym_eig, Matrix};
use crate::scalar_mode::{mode_nonlinearity, ModeParams};

/// `‖f(0)‖` allowed when a system is assembled.
pub const ZERO_MAP_TOL: f64 = 1e-14;

/// `‖T(t)‖ ≤ M·e^{−ω₀ t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialBound {
    #[serde(rename = "M")]
    pub m: f64,
    pub omega0: f64,
}

/// The linear part `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorSpec {
    Dense(Matrix),
    Diagonal(Vec<f64>),
}

impl GeneratorSpec {
    pub fn dim(&self) -> usize {
        match self {
            GeneratorSpec::Dense(m) => m.rows(),
            GeneratorSpec::Diagonal(d) => d.len(),
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        match self {
            GeneratorSpec::Dense(m) => m.clone(),
            GeneratorSpec::Diagonal(d) => Matrix::from_diagonal(d),
        }
    }

    /// Semigroup bound for a stable generator, `None` otherwise.
    ///
    /// Diagonal generators give `M = 1`, `ω₀ = −max aᵢᵢ`. Dense ones use the
    /// Lyapunov solution `P`: `M = √(λmax(P)/λmin(P))`, `ω₀ = 1/(2λmax(P))`.
    pub fn exponential_bound(&self) -> Option<ExponentialBound> {
        match self {
            GeneratorSpec::Diagonal(d) => {
                let max = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (max < 0.0).then_some(ExponentialBound { m: 1.0, omega0: -max })
            }
            GeneratorSpec::Dense(a) => {
                let p = lyapunov_solve(a).ok()?;
                let eig = sym_eig(&p).ok()?;
                Some(ExponentialBound {
                    m: (eig.max() / eig.min()).sqrt(),
                    omega0: 1.0 / (2.0 * eig.max()),
                })
            }
        }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        match self {
            GeneratorSpec::Diagonal(d) => {
                for ((o, a), xi) in out.iter_mut().zip(d).zip(x) {
                    *o = a * xi;
                }
            }
            GeneratorSpec::Dense(m) => {
                let n = m.cols();
                for (o, row) in out.iter_mut().zip(m.entries().chunks_exact(n)) {
                    *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
                }
            }
        }
    }
}

type CustomMap = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// The nonlinear map `f`, with `f(0) = 0`.
#[derive(Clone)]
pub enum Nonlinearity {
    Zero,
    /// `f(x)ᵢ = xᵢ²`.
    ComponentwiseSquare,
    /// `f(x)ₙ = 3|xₙ|^{1/n} xₙ` (standard), or the bounded variant written
    /// against the linear part `−I`: `f(x)ₙ = (−1 + 3|xₙ|^{1/n}) xₙ / (1 + xₙ²) + xₙ`.
    Counterexample(Variant),
    /// Writes `f(x)` into the output slice.
    Custom(CustomMap),
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nonlinearity::Zero => write!(f, "Zero"),
            Nonlinearity::ComponentwiseSquare => write!(f, "ComponentwiseSquare"),
            Nonlinearity::Counterexample(v) => write!(f, "Counterexample({v:?})"),
            Nonlinearity::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Nonlinearity {
    pub fn custom(f: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static) -> Self {
        Nonlinearity::Custom(Arc::new(f))
    }

    /// Registry names used by the CLI and system files.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "zero" => Ok(Nonlinearity::Zero),
            "componentwise-square" => Ok(Nonlinearity::ComponentwiseSquare),
            "counterexample-standard" | "counterexample" => {
                Ok(Nonlinearity::Counterexample(Variant::Standard))
            }
            "counterexample-bounded" => Ok(Nonlinearity::Counterexample(Variant::Bounded)),
            other => Err(Error::InvalidArgument(format!(
                "unknown nonlinearity {other:?} (expected zero, componentwise-square, \
                 counterexample-standard, counterexample-bounded)"
            ))),
        }
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Nonlinearity::Zero => out.iter_mut().for_each(|o| *o = 0.0),
            Nonlinearity::ComponentwiseSquare => {
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = xi * xi;
                }
            }
            Nonlinearity::Counterexample(variant) => {
                for (i, (o, &xi)) in out.iter_mut().zip(x).enumerate() {
                    let n = ModeParams::new(i as u32 + 1).expect("n >= 1");
                    *o = match variant {
                        Variant::Standard => mode_nonlinearity(n, xi),
                        Variant::Bounded => Variant::bounded_rhs(n, xi) + xi,
                    };
                }
            }
            Nonlinearity::Custom(f) => f(x, out),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.eval_into(x, &mut out);
        out
    }
}

/// A finite-dimensional semilinear system `ẋ = Ax + f(x)`.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    linear: GeneratorSpec,
    nonlinear: Nonlinearity,
    dim: usize,
}

impl SystemSpec {
    pub fn new(linear: GeneratorSpec, nonlinear: Nonlinearity) -> Result<Self> {
        if let GeneratorSpec::Dense(m) = &linear {
            m.ensure_square()?;
        }
        let dim = linear.dim();
        if dim == 0 {
            return Err(Error::InvalidArgument("system dimension must be positive".into()));
        }
        let f0 = nonlinear.eval(&vec![0.0; dim]);
        let norm = norm2(&f0);
        if !(norm <= ZERO_MAP_TOL) {
            return Err(Error::InvalidArgument(format!("nonlinear map must vanish at 0, |f(0)| = {norm:e}")));
        }
        Ok(Self { linear, nonlinear, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn linear(&self) -> &GeneratorSpec {
        &self.linear
    }

    pub fn nonlinear(&self) -> &Nonlinearity {
        &self.nonlinear
    }

    fn rhs_into(&self, x: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        self.linear.apply(x, out);
        self.nonlinear.eval_into(x, scratch);
        for (o, s) in out.iter_mut().zip(scratch.iter()) {
            *o += s;
        }
    }
}

/// `Ax + f(x)`.
pub fn evaluate_rhs(spec: &SystemSpec, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != spec.dim {
        return Err(Error::DimensionMismatch { expected: spec.dim, got: x.len() });
    }
    let mut out = vec![0.0; spec.dim];
    let mut scratch = vec![0.0; spec.dim];
    spec.rhs_into(x, &mut out, &mut scratch);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub blow_up_threshold: f64,
    pub horizon: f64,
    pub converged_threshold: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            h_min: 1e-12,
            h_max: 1.0,
            blow_up_threshold: 1e6,
            horizon: 10.0,
            converged_threshold: 1e-5,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.rel_tol > 0.0) || !(self.abs_tol >= 0.0) {
            return fail(format!("tolerances must satisfy rel_tol > 0, abs_tol >= 0 (got {}, {})", self.rel_tol, self.abs_tol));
        }
        if !(self.h_min > 0.0 && self.h_min < self.h_max) {
            return fail(format!("need 0 < h_min < h_max (got {}, {})", self.h_min, self.h_max));
        }
        if !(self.blow_up_threshold > self.converged_threshold && self.converged_threshold > 0.0) {
            return fail(format!(
                "need B > converged_threshold > 0 (got {}, {})",
                self.blow_up_threshold, self.converged_threshold
            ));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return fail(format!("horizon must be positive and finite, got {}", self.horizon));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlowUpCause {
    Threshold,
    StepCollapse,
    Overflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Termination {
    HorizonReached,
    Converged,
    BlowUp { t_detect: f64, cause: BlowUpCause },
}

impl Termination {
    pub fn name(&self) -> &'static str {
        match self {
            Termination::HorizonReached => "horizon_reached",
            Termination::Converged => "converged",
            Termination::BlowUp { .. } => "blow_up",
        }
    }

    pub fn is_blow_up(&self) -> bool {
        matches!(self, Termination::BlowUp { .. })
    }

    pub fn t_detect(&self) -> Option<f64> {
        match self {
            Termination::BlowUp { t_detect, .. } => Some(*t_detect),
            _ => None,
        }
    }
}

/// Accepted steps of one integration run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub termination: Termination,
}

/// JSON sidecar written next to the trajectory CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerminationSidecar {
    pub termination: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_detect: Option<f64>,
    pub final_norm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blow_up_cause: Option<BlowUpCause>,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory has at least the initial sample")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    /// Linear interpolation between accepted steps; for reporting only.
    pub fn sample_at(&self, t: f64) -> Option<Vec<f64>> {
        if t < self.times[0] || t > self.final_time() {
            return None;
        }
        let k = self.times.partition_point(|&s| s <= t);
        if k == self.times.len() {
            return Some(self.final_state().to_vec());
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        Some(
            self.states[k - 1]
                .iter()
                .zip(&self.states[k])
                .map(|(a, b)| a + w * (b - a))
                .collect(),
        )
    }

    pub fn sidecar(&self) -> TerminationSidecar {
        TerminationSidecar {
            termination: self.termination.name().to_string(),
            t_detect: self.termination.t_detect(),
            final_norm: norm2(self.final_state()),
            blow_up_cause: match self.termination {
                Termination::BlowUp { cause, .. } => Some(cause),
                _ => None,
            },
        }
    }

    /// CSV with header `t,x_1,...,x_d` and one row per accepted step.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv write failed: {e}"));
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.dim()).map(|i| format!("x_{i}")));
        w.write_record(&header).map_err(io)?;
        for (t, x) in self.times.iter().zip(&self.states) {
            let mut row = vec![fmt_f64(*t)];
            row.extend(x.iter().map(|v| fmt_f64(*v)));
            w.write_record(&row).map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidArgument(format!("csv flush failed: {e}")))?;
        Ok(())
    }
}

pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

/// Euclidean norm, scaled by the largest entry so tiny or huge states
/// neither underflow nor overflow.
pub fn norm2(x: &[f64]) -> f64 {
    let big = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if big == 0.0 || !big.is_finite() {
        return big;
    }
    big * x.iter().map(|v| (v / big) * (v / big)).sum::<f64>().sqrt()
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// 5th-order weights minus embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;

struct Stepper<'a> {
    spec: &'a SystemSpec,
    k: [Vec<f64>; 7],
    y_stage: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(spec: &'a SystemSpec) -> Self {
        let d = spec.dim;
        Self {
            spec,
            k: std::array::from_fn(|_| vec![0.0; d]),
            y_stage: vec![0.0; d],
            scratch: vec![0.0; d],
        }
    }

    /// One trial step from `y` (with `k[0] = f(y)` already set). Writes the
    /// 5th-order result to `y_new` and returns the scaled error norm.
    fn step(&mut self, y: &[f64], h: f64, y_new: &mut [f64], cfg: &SimConfig) -> f64 {
        let d = y.len();
        for s in 1..7 {
            for i in 0..d {
                let mut acc = 0.0;
                for (j, a) in A[s][..s].iter().enumerate() {
                    acc += a * self.k[j][i];
                }
                self.y_stage[i] = y[i] + h * acc;
            }
            let (_, rest) = self.k.split_at_mut(s);
            self.spec.rhs_into(&self.y_stage, &mut rest[0], &mut self.scratch);
        }
        // stage 7 was evaluated at the 5th-order solution (FSAL)
        y_new.copy_from_slice(&self.y_stage);
        let mut err = 0.0_f64;
        for i in 0..d {
            let mut e = 0.0;
            for (s, es) in E.iter().enumerate() {
                e += es * self.k[s][i];
            }
            let e = (h * e).abs();
            let scale = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
            let ratio = if scale > 0.0 { e / scale } else if e == 0.0 { 0.0 } else { f64::INFINITY };
            err = err.max(ratio);
        }
        err
    }
}

fn initial_step(spec: &SystemSpec, x0: &[f64], f0: &[f64], cfg: &SimConfig) -> f64 {
    let sc = |v: f64| cfg.abs_tol + cfg.rel_tol * v.abs();
    let d0 = x0.iter().map(|&v| v / sc(v).max(f64::MIN_POSITIVE)).fold(0.0_f64, |m, v| m.max(v.abs()));
    let d1 = x0
        .iter()
        .zip(f0)
        .map(|(&v, &f)| f / sc(v).max(f64::MIN_POSITIVE))
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(cfg.h_max);
    let x1: Vec<f64> = x0.iter().zip(f0).map(|(x, f)| x + h0 * f).collect();
    let f1 = evaluate_rhs(spec, &x1).unwrap_or_else(|_| f0.to_vec());
    let d2 = x0
        .iter()
        .zip(f0.iter().zip(&f1))
        .map(|(&v, (a, b))| (b - a) / sc(v).max(f64::MIN_POSITIVE))
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1).min(cfg.h_max).max(cfg.h_min * 2.0)
}

/// Integrates `ẋ = Ax + f(x)` from `x0` until the horizon, convergence below
/// `converged_threshold`, or blow-up.
pub fn integrate(spec: &SystemSpec, x0: &[f64], config: &SimConfig) -> Result<Trajectory> {
    config.validate()?;
    if x0.len() != spec.dim {
        return Err(Error::DimensionMismatch { expected: spec.dim, got: x0.len() });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("initial state must be finite".into()));
    }

    let mut times = vec![0.0];
    let mut states = vec![x0.to_vec()];
    let finish = |times, states, termination| Ok(Trajectory { times, states, termination });

    let norm0 = norm2(x0);
    if norm0 >= config.blow_up_threshold {
        let term = Termination::BlowUp { t_detect: 0.0, cause: BlowUpCause::Threshold };
        return finish(times, states, term);
    }
    if norm0 <= config.converged_threshold {
        return finish(times, states, Termination::Converged);
    }

    let d = spec.dim;
    let mut stepper = Stepper::new(spec);
    let mut y = x0.to_vec();
    let mut y_new = vec![0.0; d];
    spec.rhs_into(&y, &mut stepper.k[0], &mut stepper.scratch);
    let mut h = initial_step(spec, &y, &stepper.k[0].clone(), config);
    let mut t = 0.0;
    let mut err_prev = 1e-4_f64;
    let mut rejected_last = false;

    loop {
        let remaining = config.horizon - t;
        let clipped = h >= remaining;
        let h_try = if clipped { remaining } else { h };
        let err = stepper.step(&y, h_try, &mut y_new, config);

        let overflow = y_new.iter().any(|v| !v.is_finite());
        if overflow || !err.is_finite() {
            h = h_try * FAC_MIN;
            rejected_last = true;
            if h < config.h_min {
                let cause = if overflow { BlowUpCause::Overflow } else { BlowUpCause::StepCollapse };
                return finish(times, states, Termination::BlowUp { t_detect: t, cause });
            }
            continue;
        }

        if err <= 1.0 {
            let err_c = err.max(1e-10);
            let mut fac = SAFETY * err_c.powf(-ALPHA) * err_prev.powf(BETA);
            fac = fac.clamp(FAC_MIN, FAC_MAX);
            if rejected_last {
                fac = fac.min(1.0);
            }
            err_prev = err_c;
            rejected_last = false;

            t = if clipped { config.horizon } else { t + h_try };
            std::mem::swap(&mut y, &mut y_new);
            let (first, last) = stepper.k.split_at_mut(6);
            first[0].copy_from_slice(&last[0]);
            times.push(t);
            states.push(y.clone());

            let norm = norm2(&y);
            if norm >= config.blow_up_threshold {
                let term = Termination::BlowUp { t_detect: t, cause: BlowUpCause::Threshold };
                return finish(times, states, term);
            }
            if norm <= config.converged_threshold {
                return finish(times, states, Termination::Converged);
            }
            if clipped {
                return finish(times, states, Termination::HorizonReached);
            }
            // keep the previous step when the clipped step was the short one
            h = (h_try * fac).min(config.h_max);
        } else {
            let fac = (SAFETY * err.powf(-ALPHA)).clamp(FAC_MIN, 1.0);
            h = h_try * fac;
            rejected_last = true;
        }

        if h < config.h_min {
            let term = Termination::BlowUp { t_detect: t, cause: BlowUpCause::StepCollapse };
            return finish(times, states, term);
        }
    }
}
