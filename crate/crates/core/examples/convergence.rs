use std::time::Instant;

use pareto_records::limit::{estimate_limit_law, LimitConfig};
use pareto_records::stream::{estimate_conditional_law, ConditionalConfig, SimMethod, StreamModel};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let d: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let reps: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let samples: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(200_000);
    let exps: Vec<u32> = match args.get(4) {
        Some(s) => s.split(',').map(|e| e.parse().unwrap()).collect(),
        None => (10..=20).collect(),
    };
    let t = Instant::now();
    let limit = estimate_limit_law(&LimitConfig::with_default_delta(d, 1, samples)).unwrap();
    println!("limit {:.1}s pmf {:?}", t.elapsed().as_secs_f64(), &limit.pmf[..6.min(limit.pmf.len())]);
    for e in exps {
        let t = Instant::now();
        let cfg = ConditionalConfig {
            d,
            n_target: 1 << e,
            window_factor: 2.0,
            replicates: reps,
            model: StreamModel::ExpMax,
            seed: 2,
            method: SimMethod::Auto,
        };
        let est = estimate_conditional_law(&cfg).unwrap();
        let binom: f64 =
            est.law.pmf.iter().map(|p| (p * (1.0 - p) / est.law.trials as f64).sqrt()).sum::<f64>() * 0.5;
        println!(
            "n=2^{e} {:.1}s events {} tv {:.4} se {:.4} (binomial {:.4}) pmf {:?}",
            t.elapsed().as_secs_f64(),
            est.law.trials,
            est.law.tv_distance(&limit),
            est.law.combined_tv_se(&limit),
            binom,
            &est.law.pmf[..4]
        );
    }
}
