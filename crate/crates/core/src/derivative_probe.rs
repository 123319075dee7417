//! Gateaux and Fréchet probes of the counterexample map at the origin.
//!
//! Along a fixed direction `x` the difference quotient is
//!
//! ```text
//! ‖f(εx)/ε‖² = 9 Σₙ |ε|^{2/n} |xₙ|^{2/n} xₙ²
//! ```
//!
//! which tends to zero, so the Gateaux derivative vanishes. Along the
//! family `2⁻ᴺ·e_N` the ratio `‖f(x)‖/‖x‖` equals `3/2` for every `N`
//! while `‖x‖ → 0`, so the map is not Fréchet differentiable.
//!
//! All probes act on the standard map `f(x)ₙ = 3|xₙ|^{1/n} xₙ`.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::counterexample::TruncatedL2System;
use crate::error::{Error, Result};
use crate::semilinear_sim::norm2;

/// Largest final quotient for a positive Gateaux verdict.
pub const GATEAUX_THRESHOLD: f64 = 1e-3;
/// Number of trailing quotients that must be nonincreasing.
pub const MONOTONE_TAIL: usize = 5;
/// The schedule has to reach below this before extension kicks in.
pub const SCHEDULE_FLOOR: f64 = 1e-8;
/// Factor applied to the smallest ε on each auto-extension step.
pub const EXTENSION_FACTOR: f64 = 1e-2;
/// Auto-extension stops before ε would drop below this.
pub const MIN_EPSILON: f64 = 1e-300;

/// Finite-support direction keyed by 1-based mode index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<usize, f64>", into = "BTreeMap<usize, f64>")]
pub struct Direction(BTreeMap<usize, f64>);

impl TryFrom<BTreeMap<usize, f64>> for Direction {
    type Error = Error;

    fn try_from(map: BTreeMap<usize, f64>) -> Result<Self> {
        Direction::new(map)
    }
}

impl From<Direction> for BTreeMap<usize, f64> {
    fn from(d: Direction) -> Self {
        d.0
    }
}

impl Direction {
    /// Drops zero entries; rejects an empty support, index 0, or non-finite values.
    pub fn new(entries: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, v) in entries {
            if n == 0 {
                return Err(Error::InvalidDirection("mode indices start at 1".into()));
            }
            if !v.is_finite() {
                return Err(Error::InvalidDirection(format!("non-finite entry at mode {n}")));
            }
            if v != 0.0 {
                map.insert(n, v);
            }
        }
        if map.is_empty() {
            return Err(Error::InvalidDirection("direction has empty support".into()));
        }
        Ok(Self(map))
    }

    /// Unit vector `e_n`.
    pub fn unit(n: usize) -> Result<Self> {
        Self::new([(n, 1.0)])
    }

    /// Parses `e_N` or a comma list of `n:value` pairs.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(idx) = s.strip_prefix("e_") {
            let n = idx
                .parse()
                .map_err(|_| Error::InvalidDirection(format!("bad unit direction {s:?}")))?;
            return Self::unit(n);
        }
        let mut entries = Vec::new();
        for part in s.split(',').filter(|p| !p.trim().is_empty()) {
            let (n, v) = part
                .split_once(':')
                .ok_or_else(|| Error::InvalidDirection(format!("expected n:value, got {part:?}")))?;
            let n = n.trim().parse().map_err(|_| Error::InvalidDirection(format!("bad index {n:?}")))?;
            let v = v.trim().parse().map_err(|_| Error::InvalidDirection(format!("bad value {v:?}")))?;
            entries.push((n, v));
        }
        Self::new(entries)
    }

    pub fn support(&self) -> Vec<usize> {
        self.0.keys().copied().collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.0.iter().map(|(&n, &v)| (n, v))
    }

    pub fn max_index(&self) -> usize {
        *self.0.keys().next_back().expect("non-empty")
    }

    pub fn norm(&self) -> f64 {
        self.0.values().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Dense vector of length `dim`, scaled by `eps`.
    pub fn to_dense(&self, dim: usize, eps: f64) -> Vec<f64> {
        let mut x = vec![0.0; dim];
        for (n, v) in self.entries() {
            x[n - 1] = eps * v;
        }
        x
    }

    fn check_within(&self, system: &TruncatedL2System) -> Result<()> {
        if self.max_index() > system.n_max() {
            return Err(Error::InvalidDirection(format!(
                "support reaches mode {} beyond N_max = {}",
                self.max_index(),
                system.n_max()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateauxReport {
    pub direction_support: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub quotients: Vec<f64>,
    pub verdict: bool,
    /// Number of ε values appended by auto-extension.
    #[serde(default)]
    pub extended: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrechetProbe {
    #[serde(rename = "N")]
    pub n: usize,
    pub norm: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrechetReport {
    pub probes: Vec<FrechetProbe>,
    pub limsup_estimate: f64,
}

/// `‖f(εx)/ε‖` from the closed form, summed in log space so that tiny `ε`
/// does not underflow term by term.
pub fn gateaux_quotient(system: &TruncatedL2System, x: &Direction, eps: f64) -> Result<f64> {
    if eps == 0.0 || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!("eps must be finite and nonzero, got {eps}")));
    }
    x.check_within(system)?;
    let log_eps = eps.abs().ln();
    // ln of 9·|ε xₙ|^{2/n}·xₙ²
    let logs: Vec<f64> = x
        .entries()
        .map(|(n, v)| {
            let lv = v.abs().ln();
            9f64.ln() + 2.0 / n as f64 * (log_eps + lv) + 2.0 * lv
        })
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logs.iter().map(|l| (l - top).exp()).sum();
    Ok((0.5 * (top + sum.ln())).exp())
}

/// `‖f(εx)‖/|ε|` by evaluating the map itself.
pub fn direct_quotient(system: &TruncatedL2System, x: &Direction, eps: f64) -> Result<f64> {
    if eps == 0.0 {
        return Err(Error::InvalidArgument("eps must be nonzero".into()));
    }
    x.check_within(system)?;
    let fx = system.standard_map(&x.to_dense(system.n_max(), eps))?;
    Ok(norm2(&fx) / eps.abs())
}

pub fn default_schedule() -> Vec<f64> {
    (1..=8).map(|k| 10f64.powi(-k)).collect()
}

/// Evaluates the quotient along `schedule`, extending it by factors of
/// `1e-2` until the final quotient is at most `1e-3` or ε would underflow.
pub fn gateaux_limit_check(system: &TruncatedL2System, x: &Direction, schedule: &[f64]) -> Result<GateauxReport> {
    let Some(&last) = schedule.last() else {
        return Err(Error::InvalidArgument("empty eps schedule".into()));
    };
    if schedule.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
        return Err(Error::InvalidArgument("eps schedule must be positive".into()));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("eps schedule must be strictly decreasing".into()));
    }
    if last > SCHEDULE_FLOOR * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!("eps schedule must reach below {SCHEDULE_FLOOR:e}")));
    }

    let mut epsilons = schedule.to_vec();
    let mut quotients = epsilons
        .iter()
        .map(|&e| gateaux_quotient(system, x, e))
        .collect::<Result<Vec<_>>>()?;
    let mut extended = 0;
    while *quotients.last().expect("non-empty") > GATEAUX_THRESHOLD {
        let next = epsilons.last().expect("non-empty") * EXTENSION_FACTOR;
        if next < MIN_EPSILON {
            break;
        }
        epsilons.push(next);
        quotients.push(gateaux_quotient(system, x, next)?);
        extended += 1;
    }

    let tail = &quotients[quotients.len().saturating_sub(MONOTONE_TAIL)..];
    let monotone = tail.windows(2).all(|w| w[1] <= w[0]);
    let verdict = monotone && *quotients.last().expect("non-empty") <= GATEAUX_THRESHOLD;
    Ok(GateauxReport { direction_support: x.support(), epsilons, quotients, verdict, extended })
}

/// `‖f(x)‖/‖x‖`.
pub fn frechet_ratio(system: &TruncatedL2System, x: &[f64]) -> Result<f64> {
    let nx = norm2(x);
    if nx == 0.0 {
        return Err(Error::InvalidArgument("Fréchet ratio needs a nonzero state".into()));
    }
    Ok(norm2(&system.standard_map(x)?) / nx)
}

/// Ratios along `2⁻ᴺ·e_N` for `N` in `n_range`.
pub fn frechet_failure_probe(system: &TruncatedL2System, n_range: RangeInclusive<usize>) -> Result<FrechetReport> {
    if *n_range.start() == 0 || *n_range.end() > system.n_max() || n_range.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "N range {}..={} must lie in 1..={}",
            n_range.start(),
            n_range.end(),
            system.n_max()
        )));
    }
    let probes = n_range
        .map(|n| {
            let x = crate::counterexample::unstable_initial_state(n, system.n_max())?.x0;
            Ok(FrechetProbe { n, norm: norm2(&x), ratio: frechet_ratio(system, &x)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let limsup_estimate = probes.iter().map(|p| p.ratio).fold(f64::NEG_INFINITY, f64::max);
    Ok(FrechetReport { probes, limsup_estimate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sys() -> TruncatedL2System {
        TruncatedL2System::standard(64).unwrap()
    }

    #[test]
    fn direction_validation() {
        assert!(Direction::new([]).is_err());
        assert!(Direction::new([(1, 0.0)]).is_err());
        assert!(Direction::new([(0, 1.0)]).is_err());
        assert!(Direction::parse("empty").is_err());
        assert!(Direction::parse("").is_err());
        assert_eq!(Direction::parse("e_3").unwrap(), Direction::unit(3).unwrap());
        let d = Direction::parse("1:0.5, 4:-2").unwrap();
        assert_eq!(d.support(), vec![1, 4]);
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<Direction>(&json).unwrap(), d);
        assert!(serde_json::from_str::<Direction>("{}").is_err());
        assert!(gateaux_quotient(&sys(), &Direction::unit(65).unwrap(), 0.1).is_err());
    }

    #[test]
    fn quotient_examples() {
        let s = sys();
        assert_relative_eq!(gateaux_quotient(&s, &Direction::unit(1).unwrap(), 0.1).unwrap(), 0.3, max_relative = 1e-14);
        assert_relative_eq!(gateaux_quotient(&s, &Direction::unit(2).unwrap(), 1e-4).unwrap(), 0.03, max_relative = 1e-14);
        assert!(gateaux_quotient(&s, &Direction::unit(1).unwrap(), 0.0).is_err());
    }

    #[test]
    fn limit_check_unit_direction() {
        let rep = gateaux_limit_check(&sys(), &Direction::unit(1).unwrap(), &default_schedule()).unwrap();
        assert!(rep.verdict);
        assert_eq!(rep.extended, 0);
        assert_relative_eq!(*rep.quotients.last().unwrap(), 3e-8, max_relative = 1e-12);
    }

    #[test]
    fn limit_check_ten_modes_and_slow_mode() {
        let ten = Direction::new((1..=10).map(|n| (n, 1.0))).unwrap();
        let rep = gateaux_limit_check(&sys(), &ten, &default_schedule()).unwrap();
        assert!(rep.verdict);
        assert!(rep.extended > 0);

        let slow = Direction::unit(40).unwrap();
        let rep = gateaux_limit_check(&sys(), &slow, &default_schedule()).unwrap();
        assert_relative_eq!(rep.quotients[7], 3.0 * 10f64.powf(-8.0 / 40.0), max_relative = 1e-12);
        assert!(rep.quotients[7] > 1.8);
        assert!(rep.verdict);
        let eps = *rep.epsilons.last().unwrap();
        assert!(eps < 1e-130);
    }

    #[test]
    fn limit_check_schedule_errors() {
        let d = Direction::unit(1).unwrap();
        assert!(gateaux_limit_check(&sys(), &d, &[]).is_err());
        assert!(gateaux_limit_check(&sys(), &d, &[1e-1, 1e-2]).is_err());
        assert!(gateaux_limit_check(&sys(), &d, &[1e-9, 1e-3]).is_err());
    }

    #[test]
    fn frechet_examples() {
        let s = sys();
        let x = crate::counterexample::unstable_initial_state(5, 64).unwrap().x0;
        assert_relative_eq!(frechet_ratio(&s, &x).unwrap(), 1.5, max_relative = 1e-14);
        for n in 1..=6 {
            let mut x = vec![0.0; 64];
            x[n - 1] = (0..n).fold(1.0, |a, _| a / 3.0);
            assert_relative_eq!(frechet_ratio(&s, &x).unwrap(), 1.0, max_relative = 1e-13);
        }
        for eps in [1e-2, 1e-6, 1e-12] {
            let mut x = vec![0.0; 64];
            x[0] = eps;
            assert_relative_eq!(frechet_ratio(&s, &x).unwrap(), 3.0 * eps, max_relative = 1e-14);
        }
        assert!(frechet_ratio(&s, &[0.0; 64]).is_err());

        let one = frechet_failure_probe(&s, 1..=1).unwrap();
        assert_eq!(one.probes.len(), 1);
        assert_eq!(one.probes[0].norm, 0.5);
        let rep = frechet_failure_probe(&s, 1..=10).unwrap();
        assert_eq!(rep.probes.len(), 10);
        assert!(rep.probes.iter().all(|p| (p.ratio - 1.5).abs() <= 1e-12));
        assert!(frechet_failure_probe(&s, 1..=65).is_err());
        let json = serde_json::to_value(&rep).unwrap();
        assert!(json["probes"][0].get("N").is_some());
    }

    proptest! {
        #[test]
        fn analytic_matches_direct(
            entries in proptest::collection::btree_map(1usize..30, -2.0f64..2.0, 1..6),
            log_eps in -12.0f64..0.0,
        ) {
            prop_assume!(entries.values().any(|v| v.abs() > 1e-3));
            let d = Direction::new(entries).unwrap();
            let eps = 10f64.powf(log_eps);
            let a = gateaux_quotient(&sys(), &d, eps).unwrap();
            let b = direct_quotient(&sys(), &d, eps).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b, "analytic {} direct {}", a, b);
        }

        #[test]
        fn quotient_scales_per_mode(n in 1usize..30, v in 0.01f64..3.0, log_eps in -10.0f64..0.0) {
            let d = Direction::new([(n, v)]).unwrap();
            let eps = 10f64.powf(log_eps);
            let scaled = eps * 0.5f64.powi(n as i32);
            let q1 = gateaux_quotient(&sys(), &d, eps).unwrap();
            let q2 = gateaux_quotient(&sys(), &d, scaled).unwrap();
            // single mode: q(ε·2⁻ⁿ) = q(ε)/2
            prop_assert!((q2 - 0.5 * q1).abs() <= 1e-12 * q1);
        }
    }
}
