//! Exact sampling of the limit law of the kill count.
//!
//! Fix a Gumbel level `g` and put `x = x(g) = (g/d, ..., g/d)`. The limit
//! object is a Poisson process on `R^d` with intensity
//! `1(z ⊁ x) e^(-z_+)`; `K_g` counts its maxima lying strictly below `x`.
//! Counting only maxima within ℓ1 distance `Δ` of `x` gives `K_g(Δ-)`, and
//! mixing over a standard Gumbel `G` gives `K(Δ-)`, which is within
//! `P(Gamma(d) > Δ)` of `K` in total variation.
//!
//! Working in offsets `v = x - y ≻ 0` the process below `x` has intensity
//! `e^-g e^(v_+)`. A point `m` of the slab `{v_+ <= Δ}` is a maximum of the
//! whole process when
//!
//! * no other slab point has a smaller offset in every coordinate, and
//! * no point outside `{z ≺ x} ∪ {z ≻ x}` lies above it.
//!
//! The second set splits by the coordinates `T` in which `z < x`
//! (nonempty, not all). On each piece only the offsets `w = x_T - z_T`
//! matter; they form an independent Poisson process with intensity
//! `e^-g e^(w_+)`, and `m` is killed by that piece iff some `w ≺ v_T(m)`.
//! Both steps only need minimal points of such processes, found by
//! [`minima::MinimaSearch`] without generating dominated points.
//!
//! [`reference`] samples the same variable by brute force.

pub(crate) mod minima;
pub mod reference;

use rand::Rng;
use rand_distr::{Distribution, Open01};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{gamma_tail, slab_mass};
use crate::error::{invalid, Error, Result};
use crate::geometry::{plus_sum, precedes};
use crate::law::{EmpiricalLaw, LawMeta, LawSource};
use crate::rng::{child_rng, SimRng};
use minima::{MinimaSearch, Region};

/// Leaf boxes hold at most this many expected points.
const LEAF_MASS: f64 = 32.0;

/// Default cap on the expected slab count `e^-g γ_d(Δ)`.
pub const DEFAULT_CANDIDATE_BUDGET: f64 = 1e13;

/// Truncation radius used when none is given: 20, 10, 8, 7 for
/// `d = 1..=4`, then 6.
pub fn default_delta(d: usize) -> f64 {
    match d {
        1 => 20.0,
        2 => 10.0,
        3 => 8.0,
        4 => 7.0,
        _ => 6.0,
    }
}

/// `P(Gamma(d) > Δ)`: bounds `P(K(Δ+) >= 1)` and the total-variation
/// distance between `L(K(Δ-))` and `L(K)`.
pub fn tv_truncation_bound(d: usize, delta: f64) -> Result<f64> {
    gamma_tail(d as u32, delta)
}

/// Standard Gumbel draw `-ln(-ln U)`.
pub fn sample_gumbel<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = Open01.sample(rng);
    -(-u.ln()).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitConfig {
    pub d: usize,
    pub delta: f64,
    pub seed: u64,
    pub samples: u64,
    /// Fail a draw whose expected slab count exceeds this.
    pub candidate_budget: f64,
}

impl LimitConfig {
    pub fn new(d: usize, delta: f64, seed: u64, samples: u64) -> Self {
        LimitConfig { d, delta, seed, samples, candidate_budget: DEFAULT_CANDIDATE_BUDGET }
    }

    /// Defaults to [`default_delta`].
    pub fn with_default_delta(d: usize, seed: u64, samples: u64) -> Self {
        Self::new(d, default_delta(d), seed, samples)
    }

    fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(invalid("dimension must be positive"));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(invalid(format!("delta must be positive and finite, got {}", self.delta)));
        }
        Ok(())
    }
}

/// Summary of one draw of `K_g(Δ-)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitSample {
    pub k: u64,
    pub g: f64,
    /// Process points in the slab.
    pub n_candidates: u64,
    /// Candidates not dominated by another candidate.
    pub n_maximal: u64,
    /// External points that bear on maximality (the minimal ones of each
    /// external piece).
    pub n_external: u64,
}

/// One realization, kept so that counts at smaller radii can be read off.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitRealization {
    pub d: usize,
    pub g: f64,
    pub delta: f64,
    /// ℓ1 distances to `x` of the maxima counted by `k`, ascending.
    pub maxima_depths: Vec<f64>,
    pub n_candidates: u64,
    pub n_maximal: u64,
    pub n_external: u64,
}

impl LimitRealization {
    pub fn k(&self) -> u64 {
        self.maxima_depths.len() as u64
    }

    pub fn sample(&self) -> LimitSample {
        LimitSample {
            k: self.k(),
            g: self.g,
            n_candidates: self.n_candidates,
            n_maximal: self.n_maximal,
            n_external: self.n_external,
        }
    }

    /// `K_g(Δ'-)` for each `Δ'` (ascending, at most this realization's `Δ`).
    ///
    /// Maximality does not depend on the radius, so the count at `Δ'` is
    /// the number of this realization's maxima within distance `Δ'`.
    pub fn multi_delta_readout(&self, deltas: &[f64]) -> Result<Vec<u64>> {
        if deltas.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(invalid("radii must be ascending"));
        }
        if let Some(&bad) = deltas.iter().find(|&&r| !(r >= 0.0) || r > self.delta) {
            return Err(invalid(format!("radius {bad} outside [0, {}] of this realization", self.delta)));
        }
        Ok(deltas.iter().map(|&r| self.maxima_depths.partition_point(|&e| e <= r) as u64).collect())
    }
}

/// `{v ≻ 0 : v_+ <= Δ}`.
struct Slab {
    d: usize,
    delta: f64,
}

impl Region for Slab {
    fn dim(&self) -> usize {
        self.d
    }

    fn contains(&self, v: &[f64]) -> bool {
        plus_sum(v) <= self.delta
    }

    fn clip(&self, lo: &[f64], hi: &mut [f64]) -> bool {
        let base = plus_sum(lo);
        if base >= self.delta {
            return false;
        }
        for j in 0..self.d {
            hi[j] = hi[j].min(self.delta - (base - lo[j]));
        }
        true
    }

    fn box_mass(&self, lo: &[f64], hi: &[f64]) -> f64 {
        if plus_sum(hi) <= self.delta {
            return lo.iter().zip(hi).map(|(&a, &b)| b.exp() - a.exp()).product();
        }
        // Inclusion-exclusion over corners of upper orthants truncated by
        // the slab: ∫_{v ≥ c, v_+ <= Δ} e^(v_+) = e^(c_+) γ_d(Δ - c_+).
        let mut total = 0.0;
        for mask in 0u32..(1 << self.d) {
            let mut c = 0.0;
            for j in 0..self.d {
                c += if mask >> j & 1 == 1 { hi[j] } else { lo[j] };
            }
            if c >= self.delta {
                continue;
            }
            let term = c.exp() * slab_mass(self.d as u32, self.delta - c);
            total += if mask.count_ones() % 2 == 0 { term } else { -term };
        }
        total.max(0.0)
    }
}

/// `∪_a {w ≻ 0 : w ≺ a}` over anchor points `a`.
struct BelowAnchors {
    k: usize,
    anchors: Vec<f64>,
}

impl Region for BelowAnchors {
    fn dim(&self) -> usize {
        self.k
    }

    fn contains(&self, w: &[f64]) -> bool {
        self.anchors.chunks_exact(self.k).any(|a| precedes(w, a))
    }

    fn clip(&self, lo: &[f64], hi: &mut [f64]) -> bool {
        let mut reach = vec![f64::NEG_INFINITY; self.k];
        let mut any = false;
        for a in self.anchors.chunks_exact(self.k) {
            if precedes(lo, a) {
                any = true;
                for j in 0..self.k {
                    reach[j] = reach[j].max(a[j]);
                }
            }
        }
        if !any {
            return false;
        }
        for j in 0..self.k {
            hi[j] = hi[j].min(reach[j]);
        }
        true
    }
}

/// Exact draw of `K_g(Δ-)` in dimension `d`.
pub fn sample_k_g_truncated(
    d: usize,
    g: f64,
    delta: f64,
    candidate_budget: f64,
    rng: &mut SimRng,
) -> Result<LimitRealization> {
    if d == 0 {
        return Err(invalid("dimension must be positive"));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid(format!("delta must be positive and finite, got {delta}")));
    }
    if !g.is_finite() {
        return Err(invalid("Gumbel level must be finite"));
    }
    let scale = (-g).exp();
    let lambda = scale * slab_mass(d as u32, delta);
    if !(lambda <= candidate_budget) {
        return Err(Error::CandidateBudgetExceeded { lambda, budget: candidate_budget });
    }

    let slab = Slab { d, delta };
    let cand = MinimaSearch::new(&slab, scale, LEAF_MASS).run(vec![delta; d], rng);
    let unsampled = (lambda - cand.sampled_mass).max(0.0);
    let n_candidates = cand.generated + minima::poisson(unsampled, rng);
    let maxima = cand.points;
    let n_maximal = (maxima.len() / d) as u64;

    let mut killed = vec![false; maxima.len() / d];
    let mut n_external = 0u64;
    // Each nonempty proper subset T of coordinates (where z < x).
    for mask in 1u32..((1u32 << d) - 1) {
        if killed.iter().all(|&k| k) {
            break;
        }
        let coords: Vec<usize> = (0..d).filter(|&j| mask >> j & 1 == 1).collect();
        let k = coords.len();
        let anchors: Vec<f64> = maxima
            .chunks_exact(d)
            .zip(&killed)
            .filter(|(_, &dead)| !dead)
            .flat_map(|(m, _)| coords.iter().map(move |&j| m[j]))
            .collect();
        let mut hi = vec![0.0f64; k];
        for a in anchors.chunks_exact(k) {
            for j in 0..k {
                hi[j] = hi[j].max(a[j]);
            }
        }
        let region = BelowAnchors { k, anchors };
        let ext = MinimaSearch::new(&region, scale, LEAF_MASS).run(hi, rng);
        n_external += (ext.points.len() / k) as u64;
        for (m, dead) in maxima.chunks_exact(d).zip(killed.iter_mut()) {
            if !*dead {
                let proj: Vec<f64> = coords.iter().map(|&j| m[j]).collect();
                *dead = ext.points.chunks_exact(k).any(|w| precedes(w, &proj));
            }
        }
    }

    let mut maxima_depths: Vec<f64> =
        maxima.chunks_exact(d).zip(&killed).filter(|(_, &dead)| !dead).map(|(m, _)| plus_sum(m)).collect();
    maxima_depths.sort_by(f64::total_cmp);
    Ok(LimitRealization { d, g, delta, maxima_depths, n_candidates, n_maximal, n_external })
}

/// Draw `G`, then `K_G(Δ-)`.
pub fn sample_k_truncated(cfg: &LimitConfig, rng: &mut SimRng) -> Result<LimitRealization> {
    cfg.validate()?;
    let g = sample_gumbel(rng);
    sample_k_g_truncated(cfg.d, g, cfg.delta, cfg.candidate_budget, rng)
}

/// `cfg.samples` independent draws; draw `i` uses stream `i` of `cfg.seed`.
pub fn draw_samples(cfg: &LimitConfig) -> Result<Vec<LimitSample>> {
    cfg.validate()?;
    if cfg.samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    (0..cfg.samples)
        .into_par_iter()
        .map(|i| sample_k_truncated(cfg, &mut child_rng(cfg.seed, i)).map(|r| r.sample()))
        .collect()
}

/// Empirical law of `cfg.samples` draws of `K(Δ-)`, or the draws
/// themselves via [`draw_samples`].
pub fn estimate_limit_law(cfg: &LimitConfig) -> Result<EmpiricalLaw> {
    law_from_samples(cfg, &draw_samples(cfg)?)
}

pub fn law_from_samples(cfg: &LimitConfig, samples: &[LimitSample]) -> Result<EmpiricalLaw> {
    let len = samples.iter().map(|s| s.k as usize + 1).max().unwrap_or(0);
    let mut counts = vec![0u64; len];
    for s in samples {
        if s.k > s.n_maximal || s.n_maximal > s.n_candidates {
            return Err(Error::Invariant(format!("inconsistent draw {s:?}")));
        }
        counts[s.k as usize] += 1;
    }
    let meta = LawMeta {
        d: cfg.d,
        seed: cfg.seed,
        source: LawSource::Limit {
            delta: cfg.delta,
            tv_truncation_bound: tv_truncation_bound(cfg.d, cfg.delta)?,
        },
    };
    EmpiricalLaw::from_counts(counts, meta)
}
