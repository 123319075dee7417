//! Closed-form machinery for the scalar mode equation
//!
//! ```text
//! ẋ = (−1 + 3·|x|^{1/n})·x,    n ≥ 1
//! ```
//!
//! The substitution `w = |x|^{−1/n}` turns the equation into the linear
//! `ẇ = (w − 3)/n`, so every trajectory is explicit:
//!
//! ```text
//! x(t) = sign(x0) · (3 − C·e^{t/n})^{−n},    C = 3 − |x0|^{−1/n}
//! ```
//!
//! The equilibria are `0` and `±3⁻ⁿ`. Starting strictly inside
//! `(−3⁻ⁿ, 3⁻ⁿ)` the state decays to zero; starting outside it escapes to
//! infinity at `t* = n·ln(3/C)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative window below the escape time in which evaluation is refused.
pub const ESCAPE_GUARD: f64 = 1e-9;

/// Mode index `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct ModeParams(u32);

impl ModeParams {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("mode index n must be at least 1".into()));
        }
        Ok(Self(n))
    }

    pub fn n(self) -> u32 {
        self.0
    }

    fn nf(self) -> f64 {
        f64::from(self.0)
    }

    /// `3⁻ⁿ`, computed by repeated division so boundary comparisons are
    /// deterministic.
    pub fn threshold(self) -> f64 {
        (0..self.0).fold(1.0, |acc, _| acc / 3.0)
    }
}

impl TryFrom<u32> for ModeParams {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        Self::new(n)
    }
}

impl From<ModeParams> for u32 {
    fn from(m: ModeParams) -> u32 {
        m.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeClassification {
    ConvergesToZero,
    Equilibrium,
    BlowsUp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeTimeResult {
    pub finite: bool,
    /// Escape time; `None` when the solution exists for all t ≥ 0.
    pub t_star: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzEstimate {
    pub radius: f64,
    pub bound: f64,
}

/// `|x|^{1/n}` via `exp(ln|x| / n)`, zero at zero.
pub fn nth_root_abs(x: f64, n: ModeParams) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        (x.abs().ln() / n.nf()).exp()
    }
}

/// The nonlinear part `3·|x|^{1/n}·x` of one mode.
pub fn mode_nonlinearity(n: ModeParams, x: f64) -> f64 {
    3.0 * nth_root_abs(x, n) * x
}

/// Right-hand side `(−1 + 3|x|^{1/n})·x`.
pub fn mode_rhs(n: ModeParams, x: f64) -> f64 {
    (-1.0 + 3.0 * nth_root_abs(x, n)) * x
}

/// `{−3⁻ⁿ, 0, 3⁻ⁿ}` in ascending order.
pub fn equilibria(n: ModeParams) -> [f64; 3] {
    let e = n.threshold();
    [-e, 0.0, e]
}

pub fn classify(n: ModeParams, x0: f64) -> ModeClassification {
    let e = n.threshold();
    let a = x0.abs();
    if x0 == 0.0 || a == e {
        ModeClassification::Equilibrium
    } else if a < e {
        ModeClassification::ConvergesToZero
    } else {
        ModeClassification::BlowsUp
    }
}

/// Lipschitz majorant `3(1 + 1/n)·r^{1/n}` of the mode nonlinearity on `[−r, r]`.
pub fn lipschitz_bound(n: ModeParams, r: f64) -> Result<LipschitzEstimate> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    let bound = 3.0 * (1.0 + 1.0 / n.nf()) * nth_root_abs(r, n);
    Ok(LipschitzEstimate { radius: r, bound })
}

/// `C = 3 − |x0|^{−1/n}`; positive exactly when the mode blows up.
fn escape_constant(n: ModeParams, x0: f64) -> f64 {
    3.0 - 1.0 / nth_root_abs(x0, n)
}

pub fn escape_time(n: ModeParams, x0: f64) -> EscapeTimeResult {
    if classify(n, x0) != ModeClassification::BlowsUp {
        return EscapeTimeResult { finite: false, t_star: None };
    }
    let c = escape_constant(n, x0);
    let t_star = n.nf() * (3.0 / c).ln();
    EscapeTimeResult { finite: true, t_star: Some(t_star) }
}

/// Exact solution of the mode equation at time `t ≥ 0`.
///
/// Rejects `t` within `ESCAPE_GUARD · t*` of a finite escape time.
pub fn exact_solution(n: ModeParams, x0: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be finite and non-negative, got {t}")));
    }
    if classify(n, x0) == ModeClassification::Equilibrium {
        return Ok(x0);
    }
    if let Some(t_star) = escape_time(n, x0).t_star {
        if t >= t_star * (1.0 - ESCAPE_GUARD) {
            return Err(Error::PastEscapeTime { t, t_star });
        }
    }
    let c = escape_constant(n, x0);
    let w = 3.0 - c * (t / n.nf()).exp();
    // x = w^{-n}, evaluated in logs so huge w underflows cleanly to 0
    let magnitude = (-n.nf() * w.ln()).exp();
    Ok(x0.signum() * magnitude)
}

/// Exact time at which `|x(t)|` reaches `threshold` for a blowing-up mode.
pub fn crossing_time(n: ModeParams, x0: f64, threshold: f64) -> Result<f64> {
    if classify(n, x0) != ModeClassification::BlowsUp {
        return Err(Error::InvalidArgument(format!(
            "crossing time needs |x0| > 3^-n (n = {}, x0 = {x0})",
            n.n()
        )));
    }
    if !(threshold > x0.abs()) {
        return Err(Error::InvalidArgument(format!(
            "threshold {threshold} must exceed |x0| = {}",
            x0.abs()
        )));
    }
    let c = escape_constant(n, x0);
    let w_b = if threshold.is_infinite() { 0.0 } else { 1.0 / nth_root_abs(threshold, n) };
    Ok(n.nf() * ((3.0 - w_b) / c).ln())
}
