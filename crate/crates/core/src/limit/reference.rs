//! Brute-force sampler for `K_g(Δ-)`, used to check the fast one.
//!
//! Every slab point is generated. Each maximal candidate `m` then gets the
//! process points above it, `z = m + Exp(1)^d` with Poisson(`e^(-m_+)`)
//! count, keeping only those outside `{z ≻ x}`, outside the slab's own
//! region `{z ≺ x}`, and above no earlier maximal candidate, so that every
//! external point is generated once.
//!
//! The base point `x` is arbitrary; the law of the count depends on it only
//! through `x_+`.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Open01};

use crate::analytics::slab_mass;
use crate::error::{invalid, Error, Result};
use crate::geometry::{plus_sum, precedes};
use crate::rng::SimRng;

use super::{minima::poisson, LimitRealization};

/// Draw with base point `x`, generating at most `max_candidates` slab points
/// in expectation.
pub fn sample_at(x: &[f64], delta: f64, max_candidates: f64, rng: &mut SimRng) -> Result<LimitRealization> {
    let d = x.len();
    if d == 0 {
        return Err(invalid("dimension must be positive"));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid(format!("delta must be positive and finite, got {delta}")));
    }
    let g = plus_sum(x);
    let lambda = (-g).exp() * slab_mass(d as u32, delta);
    if !(lambda <= max_candidates) {
        return Err(Error::CandidateBudgetExceeded { lambda, budget: max_candidates });
    }

    let n = poisson(lambda, rng);
    let mut cands: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|_| {
            let eta = sample_depth(d, delta, rng);
            let mut u: Vec<f64> = (0..d).map(|_| Exp1.sample(rng)).collect();
            let s: f64 = u.iter().sum();
            u.iter_mut().for_each(|c| *c = eta * *c / s);
            (eta, u)
        })
        .collect();
    cands.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Maxima of y = x - v are minima of v.
    let mut maxima: Vec<Vec<f64>> = Vec::new();
    for (_, v) in &cands {
        if !maxima.iter().any(|f| precedes(f, v)) {
            maxima.push(v.clone());
        }
    }
    let n_maximal = maxima.len() as u64;
    let maxima: Vec<Vec<f64>> =
        maxima.into_iter().map(|v| x.iter().zip(&v).map(|(a, b)| a - b).collect()).collect();

    let mut external: Vec<Vec<f64>> = Vec::new();
    let mut depths = Vec::new();
    for (i, m) in maxima.iter().enumerate() {
        let count = poisson((-plus_sum(m)).exp(), rng);
        for _ in 0..count {
            let z: Vec<f64> = m.iter().map(|&c| c + rng.sample::<f64, _>(Exp1)).collect();
            if precedes(x, &z) || precedes(&z, x) || maxima[..i].iter().any(|p| precedes(p, &z)) {
                continue;
            }
            external.push(z);
        }
        if !external.iter().any(|z| precedes(m, z)) {
            depths.push(x.iter().zip(m).map(|(a, b)| a - b).sum::<f64>());
        }
    }
    depths.sort_by(f64::total_cmp);
    Ok(LimitRealization {
        d,
        g,
        delta,
        maxima_depths: depths,
        n_candidates: n,
        n_maximal,
        n_external: external.len() as u64,
    })
}

/// Depth with density `∝ η^(d-1) e^η` on `(0, Δ]`.
fn sample_depth(d: usize, delta: f64, rng: &mut SimRng) -> f64 {
    loop {
        let u: f64 = Open01.sample(rng);
        let eta = (u * delta.exp_m1()).ln_1p();
        let accept: f64 = rng.random();
        if accept < (eta / delta).powi(d as i32 - 1) {
            return eta;
        }
    }
}
