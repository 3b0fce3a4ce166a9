//! Empirical kill-count laws and the statistics the checks are built on.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a law came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum LawSource {
    /// Record events pooled over observation indices `window.0..=window.1`.
    Stream { model: String, window: (u64, u64), replicates: u64 },
    /// Draws of the ℓ1-truncated limit variable.
    Limit { delta: f64, tv_truncation_bound: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawMeta {
    pub d: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub source: LawSource,
}

/// Estimated pmf over kill counts `k = 0..pmf.len()`.
///
/// `se[k] = sqrt(pmf[k] (1 - pmf[k]) / trials)` unless the producer knows
/// better (pooled stream events use replicate-clustered errors).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalLaw {
    pub pmf: Vec<f64>,
    pub se: Vec<f64>,
    pub counts: Vec<u64>,
    pub trials: u64,
    pub meta: LawMeta,
}

/// Sparse kill histogram with 64-bit counters.
pub type KillHistogram = BTreeMap<u64, u64>;

impl EmpiricalLaw {
    pub fn from_histogram(hist: &KillHistogram, meta: LawMeta) -> Result<Self> {
        let len = hist.keys().next_back().map_or(0, |&k| k as usize + 1);
        let mut counts = vec![0u64; len];
        for (&k, &c) in hist {
            counts[k as usize] += c;
        }
        Self::from_counts(counts, meta)
    }

    pub fn from_counts(mut counts: Vec<u64>, meta: LawMeta) -> Result<Self> {
        while counts.last() == Some(&0) {
            counts.pop();
        }
        let trials: u64 = counts.iter().sum();
        if trials == 0 {
            return Err(Error::InsufficientEvents { count: 0 });
        }
        let n = trials as f64;
        let pmf: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
        let se = pmf.iter().map(|&p| (p * (1.0 - p) / n).sqrt()).collect();
        Ok(EmpiricalLaw { pmf, se, counts, trials, meta })
    }

    pub fn pmf_at(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }

    pub fn se_at(&self, k: usize) -> f64 {
        self.se.get(k).copied().unwrap_or(0.0)
    }

    /// `P(K >= k)` with its binomial standard error.
    pub fn tail(&self, k: usize) -> (f64, f64) {
        let c: u64 = self.counts.iter().skip(k).sum();
        proportion(c, self.trials)
    }

    /// Sample `E K^r` and the standard error of that mean.
    pub fn moment(&self, r: u32) -> (f64, f64) {
        let n = self.trials as f64;
        let (mut s1, mut s2) = (0.0, 0.0);
        for (k, &c) in self.counts.iter().enumerate() {
            let v = (k as f64).powi(r as i32);
            s1 += c as f64 * v;
            s2 += c as f64 * v * v;
        }
        let mean = s1 / n;
        let var = if self.trials > 1 { ((s2 - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        (mean, (var / n).sqrt())
    }

    pub fn mean(&self) -> (f64, f64) {
        self.moment(1)
    }

    /// Total-variation distance `½ Σ |p - q|`.
    pub fn tv_distance(&self, other: &EmpiricalLaw) -> f64 {
        tv_distance(&self.pmf, &other.pmf)
    }

    /// Noise scale of [`Self::tv_distance`]: `½ Σ_k sqrt(se_a² + se_b²)`.
    pub fn combined_tv_se(&self, other: &EmpiricalLaw) -> f64 {
        let n = self.pmf.len().max(other.pmf.len());
        0.5 * (0..n).map(|k| (self.se_at(k).powi(2) + other.se_at(k).powi(2)).sqrt()).sum::<f64>()
    }
}

/// Proportion `c/n` with binomial standard error.
pub fn proportion(c: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 0.0);
    }
    let p = c as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    let at = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
    0.5 * (0..n).map(|k| (at(p, k) - at(q, k)).abs()).sum::<f64>()
}
