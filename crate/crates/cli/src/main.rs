//! `pareto-records`: simulate record streams, sample the limit law of the
//! kill count, print reference bounds, and measure convergence.
//!
//! Exit codes: 0 ok, 2 usage, 3 insufficient data, 4 resource budget,
//! 5 internal invariant, 1 I/O.

mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use pareto_records::analytics::{d2_exact_pmf, d2_moment, slab_mass, BoundReport};
use pareto_records::limit::{
    default_delta, draw_samples, law_from_samples, tv_truncation_bound, LimitConfig, DEFAULT_CANDIDATE_BUDGET,
};
use pareto_records::rng::{child_seed, domain_seed};
use pareto_records::stream::{estimate_conditional_law, ConditionalConfig, SimMethod, StreamModel};
use pareto_records::{EmpiricalLaw, Error};

use output::{pmf_rows, sink, write_csv, write_json, Format, Report, RunManifest};

/// Worker count for the thread pool; defaults to all cores.
const THREADS_ENV: &str = "PARETO_RECORDS_THREADS";

#[derive(Parser)]
#[command(name = "pareto-records", version, about = "Kill counts of Pareto records")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the law of the kill count of a record near observation n.
    Stream(StreamArgs),
    /// Sample the truncated limit law.
    Limit(LimitArgs),
    /// Exact values and bounds for one dimension.
    Report(ReportArgs),
    /// Total-variation distance between stream laws and the limit law.
    Compare(CompareArgs),
}

#[derive(Args, Serialize)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output file (stdout if absent).
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct StreamArgs {
    #[arg(long)]
    d: usize,
    /// First observation index of the pooling window.
    #[arg(long)]
    n: u64,
    #[arg(long, default_value = "exp-max", value_parser = parse_model)]
    model: StreamModel,
    #[arg(long, default_value_t = 1000)]
    replicates: u64,
    /// Record events with index in [n, ceil(n * factor)] are pooled.
    #[arg(long, default_value_t = 2.0)]
    window_factor: f64,
    #[arg(long, value_enum, default_value = "auto")]
    method: Method,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct LimitArgs {
    #[arg(long)]
    d: usize,
    /// ℓ1 truncation radius (20, 10, 8, 7 for d = 1..4, then 6).
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest expected slab count a draw may have.
    #[arg(long, default_value_t = DEFAULT_CANDIDATE_BUDGET)]
    candidate_budget: f64,
    /// Write one JSON line per draw (k, g, n_candidates, n_maximal, n_external).
    #[arg(long)]
    #[serde(skip)]
    diagnostics: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct ReportArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 20)]
    kmax: u64,
    #[arg(long, default_value_t = 10)]
    rmax: u32,
    #[arg(long, default_value_t = 20)]
    mmax: u32,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct CompareArgs {
    #[arg(long)]
    d: usize,
    /// Comma-separated window starts (default 2^10, ..., 2^20).
    #[arg(long, value_delimiter = ',')]
    n_grid: Vec<u64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Limit-law draws.
    #[arg(long, default_value_t = 200_000)]
    samples: u64,
    /// Streams per grid point.
    #[arg(long, default_value_t = 10_000)]
    replicates: u64,
    #[arg(long, default_value_t = 2.0)]
    window_factor: f64,
    #[arg(long, default_value = "exp-max", value_parser = parse_model)]
    model: StreamModel,
    #[arg(long, value_enum, default_value = "auto")]
    method: Method,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CANDIDATE_BUDGET)]
    candidate_budget: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Auto,
    Direct,
    Jump,
}

impl From<Method> for SimMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Auto => SimMethod::Auto,
            Method::Direct => SimMethod::Direct,
            Method::Jump => SimMethod::Jump,
        }
    }
}

fn parse_model(s: &str) -> Result<StreamModel, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Core(Error::InvalidArgument(_) | Error::DimensionMismatch { .. }) => 2,
            Failure::Core(Error::InsufficientEvents { .. }) => 3,
            Failure::Core(Error::CandidateBudgetExceeded { .. }) => 4,
            Failure::Core(Error::Invariant(_)) => 5,
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let started = Instant::now();
    let result = match &cli.command {
        Command::Stream(a) => cmd_stream(a, started),
        Command::Limit(a) => cmd_limit(a, started),
        Command::Report(a) => cmd_report(a, started),
        Command::Compare(a) => cmd_compare(a, started),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Io(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn manifest<A: Serialize>(
    command: &'static str,
    args: A,
    seed: u64,
    started: Instant,
    tv: Option<f64>,
) -> RunManifest<A> {
    RunManifest {
        command,
        args,
        seed,
        version: env!("CARGO_PKG_VERSION"),
        duration_secs: started.elapsed().as_secs_f64(),
        tv_truncation_bound: tv,
    }
}

fn emit_law<A: Serialize, S: Serialize>(
    output: &OutputArgs,
    law: &EmpiricalLaw,
    report: Report<A, S>,
) -> Outcome {
    let mut w = sink(output.out.as_deref())?;
    match output.format {
        Format::Json => write_json(&mut *w, &report)?,
        Format::Csv => write_csv(&mut *w, "k,pmf,se", pmf_rows(&law.pmf, &law.se))?,
    }
    Ok(())
}

#[derive(Serialize)]
struct StreamReportStats {
    window: (u64, u64),
    events: u64,
    replicates: u64,
    model: String,
    /// Merged over replicates, each run to the end of the window.
    totals: pareto_records::stream::StreamStats,
}

fn cmd_stream(a: &StreamArgs, started: Instant) -> Outcome {
    let cfg = ConditionalConfig {
        d: a.d,
        n_target: a.n,
        window_factor: a.window_factor,
        replicates: a.replicates,
        model: a.model,
        seed: a.seed,
        method: a.method.into(),
    };
    let est = estimate_conditional_law(&cfg)?;
    est.stats.check_conservation()?;
    let stats = StreamReportStats {
        window: est.window,
        events: est.law.trials,
        replicates: a.replicates,
        model: a.model.to_string(),
        totals: est.stats,
    };
    let report = Report {
        manifest: manifest("stream", a, a.seed, started, None),
        d: a.d,
        pmf: est.law.pmf.clone(),
        se: est.law.se.clone(),
        tv_truncation_bound: None,
        stats,
    };
    emit_law(&a.output, &est.law, report)
}

#[derive(Serialize)]
struct LimitReportStats {
    delta: f64,
    samples: u64,
    mean_k: f64,
    mean_k_se: f64,
    /// `γ_d(Δ)`, the expected slab count averaged over the Gumbel level.
    expected_candidates: f64,
    mean_candidates: f64,
    mean_maximal: f64,
    mean_external: f64,
}

fn limit_config(d: usize, delta: Option<f64>, seed: u64, samples: u64, budget: f64) -> LimitConfig {
    LimitConfig {
        candidate_budget: budget,
        ..LimitConfig::new(d, delta.unwrap_or_else(|| default_delta(d)), seed, samples)
    }
}

fn cmd_limit(a: &LimitArgs, started: Instant) -> Outcome {
    let cfg = limit_config(a.d, a.delta, a.seed, a.samples, a.candidate_budget);
    let tv = tv_truncation_bound(cfg.d, cfg.delta)?;
    let expected = slab_mass(cfg.d as u32, cfg.delta);
    eprintln!("delta {}: truncation budget {tv:.3e}, expected candidates {expected:.3e}", cfg.delta);
    let draws = draw_samples(&cfg)?;
    let law = law_from_samples(&cfg, &draws)?;
    if let Some(path) = &a.diagnostics {
        let mut w = sink(Some(path))?;
        for s in &draws {
            serde_json::to_writer(&mut *w, s).map_err(std::io::Error::from)?;
            writeln!(w)?;
        }
        w.flush()?;
    }
    let n = draws.len() as f64;
    let mean = |f: fn(&pareto_records::limit::LimitSample) -> u64| {
        draws.iter().map(|s| f(s) as f64).sum::<f64>() / n
    };
    let (mean_k, mean_k_se) = law.mean();
    let stats = LimitReportStats {
        delta: cfg.delta,
        samples: cfg.samples,
        mean_k,
        mean_k_se,
        expected_candidates: expected,
        mean_candidates: mean(|s| s.n_candidates),
        mean_maximal: mean(|s| s.n_maximal),
        mean_external: mean(|s| s.n_external),
    };
    let report = Report {
        manifest: manifest("limit", a, a.seed, started, Some(tv)),
        d: a.d,
        pmf: law.pmf.clone(),
        se: law.se.clone(),
        tv_truncation_bound: Some(tv),
        stats,
    };
    emit_law(&a.output, &law, report)
}

#[derive(Serialize)]
struct ReportStats {
    bounds: BoundReport,
    /// Evaluators needing `d >= 2`, listed when they do not apply.
    unavailable: Vec<&'static str>,
    /// Values carrying an unquantified `1 + o(1)` factor.
    asymptotic_only: Vec<&'static str>,
    /// `(r, E K^r)` for `d = 2`.
    exact_moments: Vec<(u32, f64)>,
    default_delta: f64,
    /// `(Δ, P(Gamma(d) > Δ))`.
    gamma_tails: Vec<(f64, f64)>,
}

fn cmd_report(a: &ReportArgs, started: Instant) -> Outcome {
    if a.d == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()).into());
    }
    let d = a.d as u32;
    let bounds = BoundReport::new(d, a.kmax, a.rmax, a.mmax)?;
    let pmf: Vec<f64> = match a.d {
        1 => vec![0.0, 1.0],
        2 => (0..=a.kmax as u32).map(d2_exact_pmf).collect(),
        _ => Vec::new(),
    };
    let exact_moments = if a.d == 2 {
        (1..=a.rmax.min(20)).map(|r| Ok((r, d2_moment(r)?))).collect::<Result<_, Error>>()?
    } else {
        Vec::new()
    };
    let gamma_tails = (1..=20)
        .map(|i| Ok((f64::from(i), tv_truncation_bound(a.d, f64::from(i))?)))
        .collect::<Result<_, Error>>()?;
    let stats = ReportStats {
        unavailable: if a.d < 2 { vec!["moment_upper", "brightwell", "tail", "a_d"] } else { Vec::new() },
        asymptotic_only: vec!["pk1_upper_curve", "pk1_upper_asymptotic", "tail.lower"],
        exact_moments,
        default_delta: default_delta(a.d),
        gamma_tails,
        bounds,
    };
    let se = vec![0.0; pmf.len()];
    let mut w = sink(a.output.out.as_deref())?;
    match a.output.format {
        Format::Json => {
            let report = Report {
                manifest: manifest("report", a, 0, started, None),
                d: a.d,
                pmf,
                se,
                tv_truncation_bound: None,
                stats,
            };
            write_json(&mut *w, &report)?;
        }
        Format::Csv => {
            let rows = stats.bounds.tail.iter().map(|(k, t)| {
                let exact = if a.d == 2 { format!("{}", 0.5f64.powi(*k as i32)) } else { String::new() };
                format!("{k},{},{},{},{exact}", t.lower, t.upper, t.upper_r)
            });
            write_csv(&mut *w, "k,tail_lower,tail_upper,upper_r,tail_exact", rows)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CompareRow {
    n: u64,
    window: (u64, u64),
    events: u64,
    tv: f64,
    /// `½ Σ_k sqrt(se_stream² + se_limit²)`.
    combined_se: f64,
    /// `combined_se + tv_truncation_bound`.
    budget: f64,
}

#[derive(Serialize)]
struct CompareStats {
    delta: f64,
    samples: u64,
    rows: Vec<CompareRow>,
    /// Each distance is at most the previous one plus twice their
    /// combined standard error.
    nonincreasing_within_2se: bool,
}

fn cmd_compare(a: &CompareArgs, started: Instant) -> Outcome {
    let grid: Vec<u64> =
        if a.n_grid.is_empty() { (10..=20).map(|e| 1u64 << e).collect() } else { a.n_grid.clone() };
    let cfg = limit_config(a.d, a.delta, domain_seed(a.seed, "limit"), a.samples, a.candidate_budget);
    let tv_bound = tv_truncation_bound(cfg.d, cfg.delta)?;
    let limit = law_from_samples(&cfg, &draw_samples(&cfg)?)?;
    let stream_seed = domain_seed(a.seed, "stream");
    let mut rows = Vec::with_capacity(grid.len());
    for (i, &n) in grid.iter().enumerate() {
        let est = estimate_conditional_law(&ConditionalConfig {
            d: a.d,
            n_target: n,
            window_factor: a.window_factor,
            replicates: a.replicates,
            model: a.model,
            seed: child_seed(stream_seed, i as u64),
            method: a.method.into(),
        })?;
        est.stats.check_conservation()?;
        let combined_se = est.law.combined_tv_se(&limit);
        rows.push(CompareRow {
            n,
            window: est.window,
            events: est.law.trials,
            tv: est.law.tv_distance(&limit),
            combined_se,
            budget: combined_se + tv_bound,
        });
    }
    let nonincreasing =
        rows.windows(2).all(|w| w[1].tv <= w[0].tv + 2.0 * w[0].combined_se.hypot(w[1].combined_se));
    let mut w = sink(a.output.out.as_deref())?;
    match a.output.format {
        Format::Json => {
            let report = Report {
                manifest: manifest("compare", a, a.seed, started, Some(tv_bound)),
                d: a.d,
                pmf: limit.pmf.clone(),
                se: limit.se.clone(),
                tv_truncation_bound: Some(tv_bound),
                stats: CompareStats {
                    delta: cfg.delta,
                    samples: cfg.samples,
                    rows,
                    nonincreasing_within_2se: nonincreasing,
                },
            };
            write_json(&mut *w, &report)?;
        }
        Format::Csv => {
            let lines =
                rows.iter().map(|r| format!("{},{},{},{},{}", r.n, r.events, r.tv, r.combined_se, r.budget));
            write_csv(&mut *w, "n,events,tv,combined_se,budget", lines)?;
        }
    }
    Ok(())
}
