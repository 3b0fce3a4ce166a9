//! The finite record process: i.i.d. observations fed through a
//! [`Frontier`], and Monte Carlo estimators built on it.
//!
//! Replicate `i` under master seed `s` always draws from
//! [`child_rng`]`(s, i)`, and per-replicate results are merged in index
//! order, so estimates are identical for any number of worker threads.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Geometric, Open01};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::frontier::{Backend, Frontier};
use crate::law::{proportion, EmpiricalLaw, KillHistogram, LawMeta, LawSource};
use crate::rng::{child_rng, SimRng};

/// How observations are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StreamModel {
    /// Exponential(1) coordinates, records are large.
    ExpMax,
    /// Uniform(0, 1) coordinates, records are small. Fed to the frontier
    /// negated, which turns record-small into record-large.
    UnifMin,
}

impl StreamModel {
    /// Fill `out` with one observation in frontier (record-large)
    /// coordinates.
    #[inline]
    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R, out: &mut [f64]) {
        match self {
            StreamModel::ExpMax => out.iter_mut().for_each(|c| *c = Exp1.sample(rng)),
            StreamModel::UnifMin => out.iter_mut().for_each(|c| {
                let u: f64 = Open01.sample(rng);
                *c = -u;
            }),
        }
    }
}

impl fmt::Display for StreamModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StreamModel::ExpMax => "exp-max",
            StreamModel::UnifMin => "unif-min",
        })
    }
}

impl FromStr for StreamModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp-max" => Ok(StreamModel::ExpMax),
            "unif-min" => Ok(StreamModel::UnifMin),
            _ => Err(invalid(format!("unknown model {s:?} (expected exp-max or unif-min)"))),
        }
    }
}

/// Summary of one or more record streams.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StreamStats {
    /// Observations consumed.
    pub n: u64,
    /// Records set, `R_n`.
    pub records_total: u64,
    /// Current records at the end, `r_n`.
    pub remaining: u64,
    /// Kill count → number of record events with exactly that many kills.
    pub kill_histogram: KillHistogram,
    /// Inclusive observation-index range the histogram covers.
    pub window: (u64, u64),
}

impl StreamStats {
    fn record(&mut self, kills: usize) {
        self.records_total += 1;
        *self.kill_histogram.entry(kills as u64).or_insert(0) += 1;
    }

    pub fn total_kills(&self) -> u64 {
        self.kill_histogram.iter().map(|(k, c)| k * c).sum()
    }

    /// `R_n = r_n + Σ kills`.
    pub fn check_conservation(&self) -> Result<()> {
        let kills = self.total_kills();
        if self.records_total != self.remaining + kills {
            return Err(Error::Invariant(format!(
                "records {} != remaining {} + kills {}",
                self.records_total, self.remaining, kills
            )));
        }
        let events: u64 = self.kill_histogram.values().sum();
        if events > self.records_total {
            return Err(Error::Invariant(format!(
                "{events} kill events exceed {} records",
                self.records_total
            )));
        }
        Ok(())
    }

    /// Sum of per-replicate stats (all with the same window).
    pub fn merge(&mut self, other: &StreamStats) {
        self.n += other.n;
        self.records_total += other.records_total;
        self.remaining += other.remaining;
        for (&k, &c) in &other.kill_histogram {
            *self.kill_histogram.entry(k).or_insert(0) += c;
        }
        self.window = other.window;
    }
}

/// Feed `n` observations through a fresh frontier.
pub fn run_stream(d: usize, n: u64, model: StreamModel, seed: u64) -> Result<StreamStats> {
    check_positive(d, n)?;
    let mut rng = child_rng(seed, 0);
    let (stats, _) = simulate_direct(d, n, model, &mut rng, (1, n))?;
    Ok(stats)
}

fn check_positive(d: usize, n: u64) -> Result<()> {
    if d == 0 {
        return Err(invalid("dimension must be positive"));
    }
    if n == 0 {
        return Err(invalid("need at least one observation"));
    }
    Ok(())
}

/// One stream of `n` observations. Returns full-run stats and the
/// histogram of record events whose index lies in `window` (inclusive).
pub fn simulate_direct(
    d: usize,
    n: u64,
    model: StreamModel,
    rng: &mut SimRng,
    window: (u64, u64),
) -> Result<(StreamStats, KillHistogram)> {
    let mut frontier = Frontier::for_dim(d)?;
    let mut stats = StreamStats { n, window: (1, n), ..Default::default() };
    let mut pooled = KillHistogram::new();
    let mut obs = vec![0.0; d];
    for t in 1..=n {
        model.draw(rng, &mut obs);
        if let Some(k) = frontier.insert_count(&obs)? {
            stats.record(k);
            if (window.0..=window.1).contains(&t) {
                *pooled.entry(k as u64).or_insert(0) += 1;
            }
        }
    }
    stats.remaining = frontier.len() as u64;
    Ok((stats, pooled))
}

/// Same law as [`simulate_direct`] for `d <= 2`, touching only records.
///
/// Works with uniform coordinates under the record-small convention. The
/// region not dominated by the current records is a union of strips whose
/// total area `p` is the per-step record probability, so the wait to the
/// next record is Geometric(`p`) and the record itself is uniform on the
/// strips.
pub fn simulate_jump(
    d: usize,
    n: u64,
    rng: &mut SimRng,
    window: (u64, u64),
) -> Result<(StreamStats, KillHistogram)> {
    if !(1..=2).contains(&d) {
        return Err(invalid(format!("jump simulation supports d <= 2, got {d}")));
    }
    // The frontier sees negated coordinates (record-large); its staircase
    // order is then x descending, y ascending in uniform coordinates.
    let backend = if d == 2 { Backend::Staircase2D } else { Backend::GenericScan };
    let mut frontier = Frontier::new(d, backend)?;
    let mut stats = StreamStats { n, window: (1, n), ..Default::default() };
    let mut pooled = KillHistogram::new();
    let mut strips: Vec<(f64, f64, f64, f64)> = Vec::new(); // x0, x1, ytop, area
    let mut obs = [0.0f64; 2];
    let mut t: u64 = 0;
    loop {
        strips.clear();
        if d == 1 {
            let top = frontier.iter().next().map_or(1.0, |c| -c[0]);
            strips.push((0.0, top, 1.0, top));
        } else {
            // Ascending x: reverse storage order.
            let pts: Vec<(f64, f64)> = frontier.iter().map(|c| (-c[0], -c[1])).rev().collect();
            let mut x0 = 0.0;
            let mut ytop = 1.0;
            for &(x, y) in &pts {
                if x > x0 {
                    strips.push((x0, x, ytop, (x - x0) * ytop));
                }
                x0 = x;
                ytop = y;
            }
            if x0 < 1.0 {
                strips.push((x0, 1.0, ytop, (1.0 - x0) * ytop));
            }
        }
        let p: f64 = strips.iter().map(|s| s.3).sum();
        let wait = if p >= 1.0 {
            1
        } else {
            Geometric::new(p)
                .map_err(|e| Error::Invariant(format!("record probability {p}: {e}")))?
                .sample(rng)
                .saturating_add(1)
        };
        t = t.saturating_add(wait);
        if t > n {
            break;
        }
        let mut target = rng.random::<f64>() * p;
        let mut chosen = strips[strips.len() - 1];
        for s in &strips {
            if target < s.3 {
                chosen = *s;
                break;
            }
            target -= s.3;
        }
        let (x0, x1, ytop, _) = chosen;
        let u: f64 = Open01.sample(rng);
        let v: f64 = Open01.sample(rng);
        obs[0] = -(x0 + u * (x1 - x0));
        obs[1] = -(v * ytop);
        let k = frontier
            .insert_count(&obs[..d])?
            .ok_or_else(|| Error::Invariant("jump proposal was not a record".into()))?;
        stats.record(k);
        if (window.0..=window.1).contains(&t) {
            *pooled.entry(k as u64).or_insert(0) += 1;
        }
    }
    stats.remaining = frontier.len() as u64;
    Ok((stats, pooled))
}

/// Simulation route for the conditional-law estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimMethod {
    /// Every observation goes through the frontier.
    Direct,
    /// Record-to-record jumps (d <= 2 only).
    Jump,
    /// Jump when available, else direct.
    Auto,
}

impl SimMethod {
    fn resolve(self, d: usize) -> Result<SimMethod> {
        match self {
            SimMethod::Auto if d <= 2 => Ok(SimMethod::Jump),
            SimMethod::Auto => Ok(SimMethod::Direct),
            SimMethod::Jump if d > 2 => Err(invalid("jump simulation supports d <= 2")),
            m => Ok(m),
        }
    }
}

/// Parameters of [`estimate_conditional_law`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalConfig {
    pub d: usize,
    pub n_target: u64,
    pub window_factor: f64,
    pub replicates: u64,
    pub model: StreamModel,
    pub seed: u64,
    pub method: SimMethod,
}

/// Pooled conditional law plus the merged full-run stream statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalEstimate {
    pub law: EmpiricalLaw,
    pub stats: StreamStats,
    pub window: (u64, u64),
}

/// Estimate `L(K_n | K_n >= 0)` by pooling record events with index in
/// `[n_target, ceil(n_target · window_factor)]` over independent streams.
pub fn estimate_conditional_law(cfg: &ConditionalConfig) -> Result<ConditionalEstimate> {
    if cfg.n_target < 2 {
        return Err(invalid("n_target must be at least 2"));
    }
    if !(cfg.window_factor > 1.0) || !cfg.window_factor.is_finite() {
        return Err(invalid(format!("window factor must exceed 1, got {}", cfg.window_factor)));
    }
    if cfg.replicates == 0 {
        return Err(invalid("need at least one replicate"));
    }
    check_positive(cfg.d, cfg.n_target)?;
    let method = cfg.method.resolve(cfg.d)?;
    let end = (cfg.n_target as f64 * cfg.window_factor).ceil() as u64;
    let window = (cfg.n_target, end);

    let runs: Vec<(StreamStats, KillHistogram)> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = child_rng(cfg.seed, r);
            match method {
                SimMethod::Jump => simulate_jump(cfg.d, end, &mut rng, window),
                _ => simulate_direct(cfg.d, end, cfg.model, &mut rng, window),
            }
        })
        .collect::<Result<_>>()?;

    let mut stats = StreamStats::default();
    let mut pooled = KillHistogram::new();
    for (s, h) in &runs {
        s.check_conservation()?;
        stats.merge(s);
        for (&k, &c) in h {
            *pooled.entry(k).or_insert(0) += c;
        }
    }
    let events: u64 = pooled.values().sum();
    if events == 0 {
        return Err(Error::InsufficientEvents { count: 0 });
    }
    let meta = LawMeta {
        d: cfg.d,
        seed: cfg.seed,
        source: LawSource::Stream { model: cfg.model.to_string(), window, replicates: cfg.replicates },
    };
    let mut law = EmpiricalLaw::from_histogram(&pooled, meta)?;
    if runs.len() > 1 {
        law.se = clustered_se(&law.pmf, runs.iter().map(|(_, h)| h));
    }
    Ok(ConditionalEstimate { law, stats, window })
}

/// Standard errors of pooled proportions treating each replicate as one
/// cluster of correlated events (ratio estimator).
fn clustered_se<'a>(pmf: &[f64], hists: impl ExactSizeIterator<Item = &'a KillHistogram>) -> Vec<f64> {
    let r = hists.len() as f64;
    let mut ss = vec![0.0; pmf.len()];
    let mut events_total = 0.0;
    for h in hists {
        let e: f64 = h.values().sum::<u64>() as f64;
        events_total += e;
        for (k, &p) in pmf.iter().enumerate() {
            let c = h.get(&(k as u64)).copied().unwrap_or(0) as f64;
            ss[k] += (c - p * e).powi(2);
        }
    }
    let mean_events = events_total / r;
    ss.iter().map(|&s| (s / (r * (r - 1.0))).sqrt() / mean_events).collect()
}

/// Probability estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub p: f64,
    pub se: f64,
    pub trials: u64,
}

impl Estimate {
    fn from_count(hits: u64, trials: u64) -> Self {
        let (p, se) = proportion(hits, trials);
        Estimate { p, se, trials }
    }
}

fn count_trials(trials: u64, seed: u64, hit: impl Fn(&mut SimRng) -> Result<bool> + Sync) -> Result<u64> {
    let hits: Vec<bool> =
        (0..trials).into_par_iter().map(|i| hit(&mut child_rng(seed, i))).collect::<Result<_>>()?;
    Ok(hits.into_iter().filter(|&h| h).count() as u64)
}

/// Fraction of trials in which observation `n` sets a record.
pub fn estimate_record_rate(d: usize, n: u64, trials: u64, seed: u64) -> Result<Estimate> {
    check_positive(d, n)?;
    if trials == 0 {
        return Err(invalid("need at least one trial"));
    }
    let hits = count_trials(trials, seed, |rng| {
        let mut f = Frontier::for_dim(d)?;
        let mut obs = vec![0.0; d];
        let mut last = false;
        for _ in 0..n {
            StreamModel::ExpMax.draw(rng, &mut obs);
            last = f.insert_count(&obs)?.is_some();
        }
        Ok(last)
    })?;
    Ok(Estimate::from_count(hits, trials))
}

/// Fraction of trials in which all `m` observations are still records
/// after the `m`-th, i.e. `P(r_m = m)`.
pub fn estimate_all_records_prob(d: usize, m: u64, trials: u64, seed: u64) -> Result<Estimate> {
    check_positive(d, m)?;
    if trials == 0 {
        return Err(invalid("need at least one trial"));
    }
    let hits = count_trials(trials, seed, |rng| {
        let mut f = Frontier::for_dim(d)?;
        let mut obs = vec![0.0; d];
        for _ in 0..m {
            StreamModel::ExpMax.draw(rng, &mut obs);
            if f.insert_count(&obs)? != Some(0) {
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    Ok(Estimate::from_count(hits, trials))
}

/// `n^-1 (ln n)^(d-1) / (d-1)!`, the leading-order record probability.
pub fn record_rate_asymptotic(d: usize, n: u64) -> f64 {
    let fact: f64 = (1..d).map(|j| j as f64).product();
    (n as f64).ln().powi(d as i32 - 1) / fact / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact P(observation n is a record) by enumerating the independent
    /// coordinate rank permutations.
    fn record_prob_by_permutations(d: usize, n: usize) -> f64 {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for i in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(i, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let ps = perms(n);
        let mut hits = 0u64;
        let mut total = 0u64;
        let mut idx = vec![0usize; d];
        loop {
            total += 1;
            let last = n - 1;
            let dominated = (0..last).any(|i| (0..d).all(|j| ps[idx[j]][last] < ps[idx[j]][i]));
            hits += u64::from(!dominated);
            let mut j = 0;
            while j < d {
                idx[j] += 1;
                if idx[j] < ps.len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == d {
                break;
            }
        }
        hits as f64 / total as f64
    }

    #[test]
    fn permutation_oracle_values() {
        assert!((record_prob_by_permutations(2, 4) - 25.0 / 48.0).abs() < 1e-12);
        assert!((record_prob_by_permutations(1, 5) - 0.2).abs() < 1e-12);
        // d = 2: H_n / n.
        let h3 = 1.0 + 0.5 + 1.0 / 3.0;
        assert!((record_prob_by_permutations(2, 3) - h3 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn record_rate_estimates() {
        assert_eq!(estimate_record_rate(3, 1, 50, 1).unwrap().p, 1.0);
        let e = estimate_record_rate(2, 4, 40_000, 9).unwrap();
        let exact = record_prob_by_permutations(2, 4);
        assert!((e.p - exact).abs() < 4.0 * e.se, "{e:?} vs {exact}");
        let e = estimate_record_rate(1, 10, 40_000, 2).unwrap();
        assert!((e.p - 0.1).abs() < 4.0 * e.se, "{e:?}");
        let e = estimate_record_rate(3, 3, 40_000, 5).unwrap();
        let exact = record_prob_by_permutations(3, 3);
        assert!((e.p - exact).abs() < 4.0 * e.se, "{e:?} vs {exact}");
    }

    #[test]
    fn all_records_probabilities() {
        assert_eq!(estimate_all_records_prob(2, 1, 30, 0).unwrap().p, 1.0);
        // 1 - 2 P(X ≺ Y) = 1 - 2 (1/2)^d.
        for (d, exact) in [(2usize, 0.5), (3, 0.75)] {
            let e = estimate_all_records_prob(d, 2, 40_000, 3).unwrap();
            assert!((e.p - exact).abs() < 4.0 * e.se, "d={d}: {e:?}");
        }
        // Nonincreasing in m within 3 SE.
        let probs: Vec<Estimate> =
            (1..=8).map(|m| estimate_all_records_prob(3, m, 20_000, 11).unwrap()).collect();
        for w in probs.windows(2) {
            assert!(w[1].p <= w[0].p + 3.0 * (w[0].se.hypot(w[1].se)), "{w:?}");
        }
    }

    #[test]
    fn one_dimension_kills_exactly_one() {
        for model in [StreamModel::ExpMax, StreamModel::UnifMin] {
            let s = run_stream(1, 5_000, model, 4).unwrap();
            assert_eq!(s.kill_histogram.get(&0), Some(&1));
            assert!(s.kill_histogram.keys().all(|&k| k <= 1));
            assert_eq!(s.remaining, 1);
            s.check_conservation().unwrap();
        }
    }

    #[test]
    fn small_streams_and_determinism() {
        let a = run_stream(3, 10_000, StreamModel::ExpMax, 17).unwrap();
        let b = run_stream(3, 10_000, StreamModel::ExpMax, 17).unwrap();
        assert_eq!(a, b);
        a.check_conservation().unwrap();
        assert_eq!(a.window, (1, 10_000));
        let c = run_stream(3, 10_000, StreamModel::ExpMax, 18).unwrap();
        assert_ne!(a, c);
        assert!(run_stream(0, 5, StreamModel::ExpMax, 1).is_err());
        assert!(run_stream(2, 0, StreamModel::ExpMax, 1).is_err());
    }

    #[test]
    fn stats_conservation_detects_tampering() {
        let mut s = run_stream(2, 2_000, StreamModel::UnifMin, 3).unwrap();
        s.check_conservation().unwrap();
        s.remaining += 1;
        assert!(matches!(s.check_conservation(), Err(Error::Invariant(_))));
    }

    #[test]
    fn conditional_law_errors() {
        let mut cfg = ConditionalConfig {
            d: 2,
            n_target: 1,
            window_factor: 2.0,
            replicates: 4,
            model: StreamModel::ExpMax,
            seed: 1,
            method: SimMethod::Auto,
        };
        assert!(estimate_conditional_law(&cfg).is_err());
        cfg.n_target = 100;
        cfg.window_factor = 1.0;
        assert!(estimate_conditional_law(&cfg).is_err());
        cfg.window_factor = 1.0001;
        cfg.d = 3;
        cfg.method = SimMethod::Jump;
        assert!(estimate_conditional_law(&cfg).is_err());
        // A window so narrow that no record lands in it.
        cfg.d = 1;
        cfg.method = SimMethod::Direct;
        cfg.n_target = 100_000;
        cfg.replicates = 1;
        cfg.seed = 3;
        assert_eq!(estimate_conditional_law(&cfg).unwrap_err(), Error::InsufficientEvents { count: 0 });
    }

    #[test]
    fn model_parsing() {
        assert_eq!("exp-max".parse::<StreamModel>().unwrap(), StreamModel::ExpMax);
        assert_eq!("unif-min".parse::<StreamModel>().unwrap(), StreamModel::UnifMin);
        assert!("max".parse::<StreamModel>().is_err());
        assert_eq!(StreamModel::UnifMin.to_string(), "unif-min");
    }
}
