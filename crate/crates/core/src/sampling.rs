//! Seeded random sampling of difference quotients.
//!
//! These estimates are non-rigorous lower bounds on Lipschitz constants and
//! gain moduli. States are drawn with sparse supports and log-uniform
//! component magnitudes so that both the small-amplitude and the
//! large-amplitude regimes of diagonal maps are visited.

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::semilinear_sim::norm2;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_PAIRS: usize = 10_000;

/// Smallest component magnitude, relative to the radius.
const MIN_SCALE: f64 = 1e-9;
const MAX_SUPPORT: usize = 3;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

fn random_sign(rng: &mut impl Rng) -> f64 {
    if rng.random_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

/// A sparse random state with `‖x‖ ≤ radius`.
pub fn sparse_state(rng: &mut impl Rng, dim: usize, radius: f64) -> Vec<f64> {
    let k = rng.random_range(1..=dim.min(MAX_SUPPORT));
    let cap = radius / (k as f64).sqrt();
    let mut x = vec![0.0; dim];
    for i in sample_indices(rng, dim, k) {
        x[i] = random_sign(rng) * log_uniform(rng, cap * MIN_SCALE, cap);
    }
    x
}

/// A random state with norm exactly `norm`, sparse or dense support.
pub fn state_with_norm(rng: &mut impl Rng, dim: usize, norm: f64) -> Vec<f64> {
    let mut x = if rng.random_bool(0.5) {
        sparse_state(rng, dim, 1.0)
    } else {
        (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect()
    };
    let current = norm2(&x);
    if current == 0.0 {
        x[0] = 1.0;
    }
    let s = norm / norm2(&x);
    x.iter_mut().for_each(|v| *v *= s);
    x
}

/// Largest sampled `‖f(x) − f(z)‖ / ‖x − z‖` over `pairs` pairs in the ball
/// of the given radius.
///
/// Half of the pairs are nearby (`z` a relative perturbation of `x` on the
/// same support) and probe the local derivative; the rest are independent
/// draws.
pub fn sampled_lipschitz_ratio<F>(f: F, dim: usize, radius: f64, pairs: usize, rng: &mut impl Rng) -> f64
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut best = 0.0_f64;
    for p in 0..pairs {
        let x = sparse_state(rng, dim, radius);
        let z = if p % 2 == 0 {
            let mut z = x.clone();
            for zi in z.iter_mut().filter(|v| **v != 0.0) {
                *zi *= 1.0 + random_sign(rng) * log_uniform(rng, 1e-4, 1e-1);
            }
            let nz = norm2(&z);
            if nz > radius {
                z.iter_mut().for_each(|v| *v *= radius / nz);
            }
            z
        } else {
            sparse_state(rng, dim, radius)
        };
        let dx: Vec<f64> = x.iter().zip(&z).map(|(a, b)| a - b).collect();
        let den = norm2(&dx);
        if den == 0.0 {
            continue;
        }
        let fx = f(&x);
        let fz = f(&z);
        let df: Vec<f64> = fx.iter().zip(&fz).map(|(a, b)| a - b).collect();
        best = best.max(norm2(&df) / den);
    }
    best
}

/// Largest sampled `|f(x) − f(z)| / |x − z|` over pairs in `[−r, r]`.
pub fn sampled_scalar_lipschitz<F>(f: F, radius: f64, pairs: usize, rng: &mut impl Rng) -> f64
where
    F: Fn(f64) -> f64,
{
    sampled_lipschitz_ratio(|x| vec![f(x[0])], 1, radius, pairs, rng)
}
