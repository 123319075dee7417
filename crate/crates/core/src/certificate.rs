//! Lyapunov certificates of local exponential stability for
//! `ẋ = Ax + f(x)`.
//!
//! Given a Hurwitz `A`, an invertible symmetric `Q` and `ω > 0` with
//! `QA + AᵀQ ≼ ωI`, the certificate is built from the Lyapunov solution
//! `AᵀP + PA = −I` as
//!
//! ```text
//! P₂ = 2P + Q/ω,      P₂A + AᵀP₂ ≼ −I,      m₁‖x‖² ≤ xᵀP₂x ≤ M₁‖x‖².
//! ```
//!
//! With `V(x) = xᵀP₂x` one has `V̇ ≤ −‖x‖² + 2M₁‖x‖‖f(x)‖`. If the gain
//! modulus `g(r) ≥ sup_{‖x‖≤r} ‖f(x)‖/‖x‖` satisfies `g(√(δ/m₁)) ≤ 1/(4M₁)`
//! then on `{V ≤ δ}` the decay `V̇ ≤ −V/(2M₁)` holds.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{lyapunov_residual, lyapunov_solve, sym_eig, Matrix, SymmetricMatrix};
use crate::sampling;
use crate::semilinear_sim::{norm2, Trajectory};

/// Replacement for a non-positive `ω`.
pub const OMEGA_FLOOR: f64 = 1e-3;
/// Required bound on `λmax(P₂A + AᵀP₂)`.
pub const DECREASE_BOUND: f64 = -1.0 + 1e-8;
/// Relative slack on the decay check.
pub const DECAY_TOL: f64 = 1e-6;
pub const DEFAULT_R_MAX: f64 = 1.0;
pub const BISECTION_STEPS: usize = 60;
/// Minimum `|λ|` for `Q` to count as invertible.
pub const Q_INVERTIBLE_TOL: f64 = 1e-10;

const DISSIPATION_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateInput {
    pub a: Matrix,
    pub q: SymmetricMatrix,
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `‖AᵀP + PA + I‖_F`.
    pub lyapunov: f64,
    /// `λmax(P₂A + AᵀP₂)`.
    pub eq4_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(rename = "P")]
    pub p: SymmetricMatrix,
    #[serde(rename = "P2")]
    pub p2: SymmetricMatrix,
    pub m1: f64,
    #[serde(rename = "M1")]
    pub big_m1: f64,
    /// The `ω` actually used, after flooring.
    pub omega: f64,
    #[serde(rename = "norm_P2")]
    pub norm_p2: f64,
    pub delta: Option<f64>,
    pub residuals: Residuals,
    /// `false` when `delta` came from a sampled gain modulus.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basin_rigorous: Option<bool>,
}

/// Upper bound `g(r)` on `sup_{0<‖x‖≤r} ‖f(x)‖/‖x‖`.
#[derive(Clone)]
pub enum GainModulus {
    Analytic(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    /// Running maxima of sampled ratios on shells `(radii[k-1], radii[k]]`.
    Sampled { radii: Vec<f64>, bounds: Vec<f64> },
}

impl fmt::Debug for GainModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GainModulus::Analytic(_) => write!(f, "Analytic(..)"),
            GainModulus::Sampled { radii, .. } => write!(f, "Sampled({} shells)", radii.len()),
        }
    }
}

impl GainModulus {
    pub fn analytic(g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        GainModulus::Analytic(Arc::new(g))
    }

    pub fn zero() -> Self {
        Self::analytic(|_| 0.0)
    }

    /// `g(r) = c·r`.
    pub fn linear(c: f64) -> Self {
        Self::analytic(move |r| c * r)
    }

    pub fn constant(c: f64) -> Self {
        Self::analytic(move |_| c)
    }

    /// `g(r) = c·r^p`.
    pub fn power(c: f64, p: f64) -> Self {
        Self::analytic(move |r| c * r.powf(p))
    }

    /// Samples `samples_per_shell` states on each of `shells` geometric
    /// shells between `r_max·1e-10` and `r_max`. Non-rigorous.
    pub fn estimate<F>(f: F, dim: usize, r_max: f64, shells: usize, samples_per_shell: usize, seed: u64) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64>,
    {
        let mut rng = sampling::rng(seed);
        let r_min = r_max * 1e-10;
        let shells = shells.max(1);
        let radii: Vec<f64> = (1..=shells)
            .map(|k| r_min * (r_max / r_min).powf(k as f64 / shells as f64))
            .collect();
        let mut bounds = Vec::with_capacity(shells);
        let mut running = 0.0_f64;
        let mut inner = r_min;
        for &outer in &radii {
            for _ in 0..samples_per_shell {
                let norm = sampling_radius(&mut rng, inner, outer);
                let x = sampling::state_with_norm(&mut rng, dim, norm);
                let ratio = norm2(&f(&x)) / norm2(&x);
                if ratio.is_finite() {
                    running = running.max(ratio);
                }
            }
            bounds.push(running);
            inner = outer;
        }
        GainModulus::Sampled { radii, bounds }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            GainModulus::Analytic(g) => g(r),
            GainModulus::Sampled { radii, bounds } => {
                let k = radii.partition_point(|&s| s < r);
                bounds.get(k).copied().unwrap_or(f64::INFINITY)
            }
        }
    }

    pub fn is_rigorous(&self) -> bool {
        matches!(self, GainModulus::Analytic(_))
    }
}

fn sampling_radius(rng: &mut impl rand::Rng, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        hi
    } else {
        rng.random_range(lo..=hi)
    }
}

/// `λmax(QA + AᵀQ)`: the smallest `ω` for which `QA + AᵀQ ≼ ωI`.
pub fn dissipation_margin(a: &Matrix, q: &SymmetricMatrix) -> Result<f64> {
    let n = a.ensure_square()?;
    if q.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: q.dim() });
    }
    let qa = q.as_matrix().matmul(a)?;
    let s = SymmetricMatrix::symmetrize(&qa.add(&qa.transpose())?)?;
    Ok(sym_eig(&s)?.max())
}

/// Assembles and numerically verifies the certificate for `input`.
pub fn build_certificate(input: &CertificateInput) -> Result<Certificate> {
    let a = &input.a;
    let n = a.ensure_square()?;
    if input.q.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: input.q.dim() });
    }
    let q_eig = sym_eig(&input.q)?;
    let q_min_abs = q_eig.eigenvalues.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if q_min_abs <= Q_INVERTIBLE_TOL {
        return Err(Error::SingularQ(q_min_abs));
    }

    let p = lyapunov_solve(a)?;
    let margin = dissipation_margin(a, &input.q)?;
    if margin > input.omega + DISSIPATION_SLACK * input.omega.abs().max(1.0) {
        return Err(Error::DissipationViolated { margin, omega: input.omega });
    }
    let omega = input.omega.max(OMEGA_FLOOR);

    let p2 = p.scale(2.0).add(&input.q.scale(1.0 / omega))?;
    let p2_eig = sym_eig(&p2)?;
    let (m1, big_m1) = (p2_eig.min(), p2_eig.max());
    if !(m1 > 0.0) {
        return Err(Error::CertificateCheck(format!("P2 is not positive definite (m1 = {m1:e})")));
    }

    let p2a = p2.as_matrix().matmul(a)?;
    let decrease = SymmetricMatrix::symmetrize(&p2a.add(&p2a.transpose())?)?;
    let eq4_margin = sym_eig(&decrease)?.max();
    if eq4_margin > DECREASE_BOUND {
        return Err(Error::CertificateCheck(format!(
            "lambda_max(P2 A + A^T P2) = {eq4_margin} exceeds -1"
        )));
    }

    Ok(Certificate {
        residuals: Residuals { lyapunov: lyapunov_residual(a, &p)?, eq4_margin },
        p,
        p2,
        m1,
        big_m1,
        omega,
        norm_p2: big_m1,
        delta: None,
        basin_rigorous: None,
    })
}

/// `V(x) = xᵀP₂x`.
pub fn lyapunov_value(cert: &Certificate, x: &[f64]) -> Result<f64> {
    if x.len() != cert.p2.dim() {
        return Err(Error::DimensionMismatch { expected: cert.p2.dim(), got: x.len() });
    }
    cert.p2.quadratic_form(x)
}

/// Largest `δ ∈ (0, m₁·r_max²]` on a 60-step bisection grid with
/// `g(√(δ/m₁)) ≤ 1/(4M₁)`, using `r_max = 1`.
pub fn estimate_basin(cert: &Certificate, g: &GainModulus) -> Result<f64> {
    estimate_basin_with(cert, g, DEFAULT_R_MAX, BISECTION_STEPS)
}

pub fn estimate_basin_with(cert: &Certificate, g: &GainModulus, r_max: f64, steps: usize) -> Result<f64> {
    let limit = 1.0 / (4.0 * cert.big_m1);
    let holds = |delta: f64| g.eval(radius_upper(delta / cert.m1)) <= limit;
    let delta_max = cert.m1 * r_max * r_max;
    if holds(delta_max) {
        return Ok(delta_max);
    }
    let (mut lo, mut hi) = (0.0, delta_max);
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo > 0.0 {
        Ok(lo)
    } else {
        Err(Error::NoBasin)
    }
}

/// `√q` rounded up, so the basin never relies on a radius rounded inward.
fn radius_upper(q: f64) -> f64 {
    let r = q.sqrt();
    if r * r < q {
        r.next_up()
    } else {
        r
    }
}

impl Certificate {
    /// Copy of the certificate with its basin level filled in from `g`.
    pub fn with_basin(mut self, g: &GainModulus) -> Result<Self> {
        self.delta = Some(estimate_basin(&self, g)?);
        self.basin_rigorous = Some(g.is_rigorous());
        Ok(self)
    }

    /// Certified decay rate `1/(2M₁)` of `V`.
    pub fn decay_rate(&self) -> f64 {
        1.0 / (2.0 * self.big_m1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub rate: f64,
    /// `V(x(tᵢ))·e^{rate·tᵢ}/V(x(0))` per accepted step.
    pub margins: Vec<f64>,
    /// `‖x(tᵢ)‖·e^{rate·tᵢ/2} / (√(M₁/m₁)‖x(0)‖)`, the same bound read in the
    /// state norm.
    pub state_norm_margins: Vec<f64>,
    pub pass: bool,
}

/// Checks `V(x(tᵢ)) ≤ V(x(0))·e^{−tᵢ/(2M₁)}·(1 + 1e-6)` along `traj`.
pub fn verify_decay(cert: &Certificate, traj: &Trajectory) -> Result<DecayReport> {
    let delta = cert.delta.ok_or(Error::MissingDelta)?;
    let x0 = &traj.states[0];
    let v0 = lyapunov_value(cert, x0)?;
    if v0 > delta {
        return Err(Error::OutsideBasin { value: v0, delta });
    }
    let rate = cert.decay_rate();
    let norm0 = norm2(x0) * (cert.big_m1 / cert.m1).sqrt();
    let mut margins = Vec::with_capacity(traj.times.len());
    let mut state_norm_margins = Vec::with_capacity(traj.times.len());
    for (t, x) in traj.times.iter().zip(&traj.states) {
        let v = lyapunov_value(cert, x)?;
        let growth = (rate * t).exp();
        margins.push(if v0 == 0.0 { if v == 0.0 { 0.0 } else { f64::INFINITY } } else { v * growth / v0 });
        let nx = norm2(x);
        state_norm_margins.push(if norm0 == 0.0 {
            if nx == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            nx * growth.sqrt() / norm0
        });
    }
    let pass = margins.iter().all(|&m| m <= 1.0 + DECAY_TOL);
    Ok(DecayReport { rate, margins, state_norm_margins, pass })
}
