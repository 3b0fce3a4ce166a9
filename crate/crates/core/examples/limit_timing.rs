use std::time::Instant;

use pareto_records::limit::{default_delta, sample_k_truncated, LimitConfig};
use pareto_records::rng::child_rng;

fn main() {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    for d in 2..=4 {
        let cfg = LimitConfig::with_default_delta(d, 1, n);
        let t = Instant::now();
        let (mut k, mut cand, mut max) = (0u64, 0u64, 0u64);
        for i in 0..n {
            let r = sample_k_truncated(&cfg, &mut child_rng(1, i)).unwrap();
            k += r.k();
            cand += r.n_candidates;
            max += r.n_maximal;
        }
        let per = t.elapsed().as_secs_f64() / n as f64;
        println!(
            "d={d} delta={} {:.1} us/draw, mean k {:.3}, candidates {:.3e}, maximal {:.1}",
            default_delta(d),
            per * 1e6,
            k as f64 / n as f64,
            cand as f64 / n as f64,
            max as f64 / n as f64
        );
    }
}
