//! Single entry point wiring the sievelab library into subcommands with
//! reproducible, machine-readable reports.
//!
//! Every run prints a JSON envelope (manifest + payload) on stdout; bulk
//! rows can additionally go to `--csv PATH`. Exit codes: 0 success, 1
//! domain error, 2 usage error. Worker count comes from `--threads`, then
//! the `MAILLET_THREADS` environment variable, then the rayon default —
//! results are byte-identical either way.

mod report;

use clap::{Parser, Subcommand, ValueEnum};
use report::{print_report, write_csv, ManifestBuilder, Report};
use serde_json::{json, Value};
use sievelab::{
    analytic_b, bt_check, contradiction_ledger, greedy_admissible, interval_system, is_admissible,
    is_prime, normalized_gap_histogram, pick_tuple_in_windows, polignac_count, ratio_report,
    residues_covered, scan_interval, sieve_segment, singular_series, sum_a, sum_prime_shift,
    window_ratios, GapNormalizer, KTuple, Parity, SieveParams, SumStrategy,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "sievelab", version, about = "prime k-tuple sieve laboratory")]
struct Cli {
    /// Worker threads (overrides MAILLET_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Truncation prime for singular-series factors
    #[arg(long, global = true, default_value_t = 1_000_000)]
    p0: u64,

    /// Write bulk rows to a CSV file (supported by primes, btcheck,
    /// maillet scan, sing-avg, gaps hist)
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,

    /// Embed wall-clock timings in the manifest
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Primes in the inclusive range [lo, hi]
    Primes {
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
    },
    /// Short-interval prime count against the 2y/log y sieve bound
    Btcheck {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        y: u64,
    },
    /// Admissible tuple tools
    #[command(subcommand)]
    Tuple(TupleCmd),
    /// Singular series value with certified enclosure
    Sing {
        #[arg(long, value_parser = parse_offsets)]
        offsets: OffsetList,
    },
    /// Windowed average of singular-series ratios
    #[command(name = "sing-avg")]
    SingAvg {
        #[arg(long, value_parser = parse_offsets)]
        offsets: OffsetList,
        /// Window start
        #[arg(long)]
        m: u64,
        /// Window length (the window holds len + 1 integers)
        #[arg(long)]
        len: u64,
    },
    /// Sieve-weight sums and diagnostics
    #[command(subcommand)]
    Gpy(GpyCmd),
    /// Difference-of-two-primes classification
    #[command(subcommand)]
    Maillet(MailletCmd),
    /// Count consecutive prime pairs at a fixed distance
    Polignac {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        x: u64,
    },
    /// Prime gap statistics
    #[command(subcommand)]
    Gaps(GapsCmd),
}

#[derive(Subcommand)]
enum TupleCmd {
    /// Admissibility and residue coverage of a tuple
    Check {
        #[arg(long, value_parser = parse_offsets)]
        offsets: OffsetList,
    },
    /// First-fit greedy tuple from the candidates 0..=max-candidate
    Mine {
        #[arg(long)]
        k: usize,
        #[arg(long = "max-candidate")]
        max_candidate: u64,
    },
    /// Interval system plus a tuple picked from its windows
    Windows {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        h1: u64,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum GpyCmd {
    /// A = sum of a_n over [N, 2N], by either strategy
    Sum {
        #[command(flatten)]
        params: GpyParams,
        #[arg(long, value_enum, default_value_t = StrategyArg::PerN)]
        strategy: StrategyArg,
    },
    /// Weight mass on a prime shift: sum of a_n chi_P(n + h0)
    Shift {
        #[command(flatten)]
        params: GpyParams,
        #[arg(long)]
        h0: u64,
    },
    /// A, B, every S_i, and both main-term normalizations
    Ratios {
        #[command(flatten)]
        params: GpyParams,
        /// Extra shifts h0 to diagnose alongside the tuple offsets
        #[arg(long, value_parser = parse_offsets)]
        shifts: Option<OffsetList>,
    },
    /// The inequality ledger over the shift window [N, N+T]
    Ledger {
        #[command(flatten)]
        params: GpyParams,
        /// Window length T
        #[arg(long)]
        t: u64,
        /// Window start (defaults to N)
        #[arg(long = "m-start")]
        m_start: Option<u64>,
    },
}

#[derive(clap::Args)]
struct GpyParams {
    #[arg(long, value_parser = parse_offsets)]
    offsets: OffsetList,
    #[arg(long)]
    n: u64,
    /// Polynomial degree boost (default floor(sqrt(k)/2))
    #[arg(long)]
    ell: Option<u32>,
    /// Divisor cutoff R (default N exp(-sqrt(log N)))
    #[arg(long, conflicts_with = "r_exp")]
    r: Option<u64>,
    /// Divisor cutoff as R = floor(N^exp)
    #[arg(long = "r-exp")]
    r_exp: Option<f64>,
}

#[derive(Subcommand)]
enum MailletCmd {
    /// Classify an interval by bounded difference-of-primes search
    Scan {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        len: u64,
        /// Largest subtracted prime q to try
        #[arg(long)]
        bound: u64,
        #[arg(long, value_enum, default_value_t = ParityArg::All)]
        parity: ParityArg,
        /// Keep per-n witnesses in the JSON payload
        #[arg(long)]
        witnesses: bool,
    },
}

#[derive(Subcommand)]
enum GapsCmd {
    /// Histogram of normalized gaps between consecutive primes
    Hist {
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        #[arg(long)]
        width: f64,
        #[arg(long, value_enum, default_value_t = NormArg::LogP)]
        norm: NormArg,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    #[value(name = "per_n")]
    PerN,
    #[value(name = "swap")]
    Swap,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ParityArg {
    Even,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NormArg {
    #[value(name = "log_p")]
    LogP,
    #[value(name = "log_n")]
    LogN,
}

#[derive(Clone, Debug)]
struct OffsetList(Vec<u64>);

fn parse_offsets(s: &str) -> Result<OffsetList, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.push(
            part.parse::<u64>()
                .map_err(|e| format!("bad offset {part:?}: {e}"))?,
        );
    }
    if out.is_empty() {
        return Err("expected a comma-separated list of offsets".to_string());
    }
    Ok(OffsetList(out))
}

enum AppError {
    Usage(String),
    Domain(sievelab::Error),
    Io(anyhow::Error),
}

impl From<sievelab::Error> for AppError {
    fn from(e: sievelab::Error) -> Self {
        AppError::Domain(e)
    }
}

impl From<anyhow::Error> for AppError {
    fn from(e: anyhow::Error) -> Self {
        AppError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads(cli.threads);
    match run(cli) {
        Ok(report) => match print_report(&report) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(AppError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn init_threads(flag: Option<usize>) {
    let n = flag.or_else(|| {
        std::env::var("MAILLET_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    if let Some(n) = n.filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn csv_unsupported(csv: &Option<PathBuf>) -> Result<(), AppError> {
    if csv.is_some() {
        return Err(AppError::Usage(
            "this subcommand has no CSV form; drop --csv".to_string(),
        ));
    }
    Ok(())
}

fn build_params(p: &GpyParams) -> Result<SieveParams, AppError> {
    let tuple = KTuple::new(p.offsets.0.clone())?;
    let mut params = SieveParams::new(tuple, p.n)?;
    if let Some(ell) = p.ell {
        params = params.with_ell(ell)?;
    }
    if let Some(r) = p.r {
        params = params.with_r(r)?;
    } else if let Some(exp) = p.r_exp {
        params = params.with_r_exponent(exp)?;
    }
    Ok(params)
}

fn gpy_manifest(m: &mut ManifestBuilder, params: &SieveParams, p0: u64) {
    m.param("offsets", params.tuple().offsets());
    m.param("k", params.k());
    m.param("ell", params.ell());
    m.param("n", params.n());
    m.param("r", params.r());
    m.param("p0", p0);
}

fn series_floor(t: &KTuple) -> u64 {
    (2 * t.k() as u64).max(t.diameter() + 1)
}

fn run(cli: Cli) -> Result<Report, AppError> {
    let p0 = cli.p0;
    let csv = cli.csv;
    match cli.command {
        Command::Primes { lo, hi } => {
            let mut m = ManifestBuilder::new("primes", cli.timings);
            m.param("lo", lo).param("hi", hi);
            let table = sieve_segment(lo, hi)?;
            let primes: Vec<u64> = table.iter().collect();
            m.phase("compute_ms");
            if let Some(path) = &csv {
                let rows: Vec<Vec<String>> = primes.iter().map(|p| vec![p.to_string()]).collect();
                write_csv(path, &["p"], &rows)?;
            }
            let payload = json!({
                "lo": lo,
                "hi": hi,
                "count": primes.len(),
                "primes": primes,
            });
            Ok(m.finish(payload))
        }
        Command::Btcheck { x, y } => {
            let mut m = ManifestBuilder::new("btcheck", cli.timings);
            m.param("x", x).param("y", y);
            let r = bt_check(x, y)?;
            m.phase("compute_ms");
            if let Some(path) = &csv {
                write_csv(
                    path,
                    &["pi_diff", "bound", "holds"],
                    &[vec![
                        r.pi_diff.to_string(),
                        r.bound.to_string(),
                        r.holds.to_string(),
                    ]],
                )?;
            }
            Ok(m.finish(serde_json::to_value(r).expect("serialize")))
        }
        Command::Tuple(cmd) => {
            csv_unsupported(&csv)?;
            match cmd {
                TupleCmd::Check { offsets } => {
                    let mut m = ManifestBuilder::new("tuple check", cli.timings);
                    m.param("offsets", &offsets.0);
                    let tuple = KTuple::new(offsets.0)?;
                    let admissible = is_admissible(&tuple);
                    let nu_table: Vec<Value> = small_primes_upto(tuple.k() as u64)
                        .into_iter()
                        .map(|p| {
                            json!({
                                "p": p,
                                "nu": residues_covered(&tuple, p).expect("p is prime"),
                            })
                        })
                        .collect();
                    m.phase("compute_ms");
                    Ok(m.finish(json!({
                        "offsets": tuple.offsets(),
                        "k": tuple.k(),
                        "diameter": tuple.diameter(),
                        "admissible": admissible,
                        "nu_table": nu_table,
                    })))
                }
                TupleCmd::Mine { k, max_candidate } => {
                    let mut m = ManifestBuilder::new("tuple mine", cli.timings);
                    m.param("k", k).param("max_candidate", max_candidate);
                    let candidates: Vec<u64> = (0..=max_candidate).collect();
                    let tuple = greedy_admissible(k, &candidates)?;
                    m.phase("compute_ms");
                    Ok(m.finish(json!({
                        "k": k,
                        "max_candidate": max_candidate,
                        "offsets": tuple.offsets(),
                        "diameter": tuple.diameter(),
                        "admissible": true,
                    })))
                }
                TupleCmd::Windows { eps, h1, count, k } => {
                    let mut m = ManifestBuilder::new("tuple windows", cli.timings);
                    m.param("eps", eps)
                        .param("h1", h1)
                        .param("count", count)
                        .param("k", k);
                    let sys = interval_system(eps, h1, count)?;
                    let tuple = pick_tuple_in_windows(&sys, k)?;
                    let offsets = tuple.offsets();
                    let spacing_ok = (0..offsets.len()).all(|u| {
                        (0..u).all(|v| {
                            let d = offsets[u] - offsets[v];
                            let (lo, hi) = sys.entries[u].interval;
                            lo <= d && d <= hi
                        })
                    });
                    m.phase("compute_ms");
                    Ok(m.finish(json!({
                        "epsilon": eps,
                        "entries": sys.entries,
                        "offsets": offsets,
                        "admissible": true,
                        "spacing_ok": spacing_ok,
                    })))
                }
            }
        }
        Command::Sing { offsets } => {
            csv_unsupported(&csv)?;
            let mut m = ManifestBuilder::new("sing", cli.timings);
            m.param("offsets", &offsets.0).param("p0", p0);
            let tuple = KTuple::new(offsets.0)?;
            let s = singular_series(&tuple, p0)?;
            m.phase("compute_ms");
            Ok(m.finish(json!({
                "offsets": tuple.offsets(),
                "k": tuple.k(),
                "p0": p0,
                "value": s.value,
                "tail_bound": s.tail_bound,
                "lower": s.lower(),
                "upper": s.upper(),
                "width": s.width(),
            })))
        }
        Command::SingAvg {
            offsets,
            m: m0,
            len,
        } => {
            let mut mb = ManifestBuilder::new("sing-avg", cli.timings);
            mb.param("offsets", &offsets.0)
                .param("m", m0)
                .param("len", len)
                .param("p0", p0);
            let tuple = KTuple::new(offsets.0)?;
            let ratios = window_ratios(&tuple, m0, len, p0)?;
            let mut acc = 0.0;
            let mut comp = 0.0;
            for &(_, r) in &ratios {
                // Neumaier, matching the library reduction
                let t = acc + r;
                if acc.abs() >= r.abs() {
                    comp += (acc - t) + r;
                } else {
                    comp += (r - t) + acc;
                }
                acc = t;
            }
            let average = (acc + comp) / (len as f64 + 1.0);
            mb.phase("compute_ms");
            if let Some(path) = &csv {
                let rows: Vec<Vec<String>> = ratios
                    .iter()
                    .map(|(mm, r)| vec![mm.to_string(), r.to_string()])
                    .collect();
                write_csv(path, &["m", "ratio"], &rows)?;
            }
            let zero_terms = ratios.iter().filter(|&&(_, r)| r == 0.0).count();
            Ok(mb.finish(json!({
                "offsets": tuple.offsets(),
                "m_start": m0,
                "len": len,
                "p0": p0,
                "terms": ratios.len(),
                "zero_terms": zero_terms,
                "average": average,
            })))
        }
        Command::Gpy(cmd) => {
            csv_unsupported(&csv)?;
            match cmd {
                GpyCmd::Sum { params, strategy } => {
                    let mut m = ManifestBuilder::new("gpy sum", cli.timings);
                    let sp = build_params(&params)?;
                    gpy_manifest(&mut m, &sp, p0);
                    m.param(
                        "strategy",
                        match strategy {
                            StrategyArg::PerN => "per_n",
                            StrategyArg::Swap => "swap",
                        },
                    );
                    let a = sum_a(
                        &sp,
                        match strategy {
                            StrategyArg::PerN => SumStrategy::PerN,
                            StrategyArg::Swap => SumStrategy::DivisorSwap,
                        },
                    )?;
                    let b = analytic_b(&sp);
                    let s = singular_series(sp.tuple(), p0.max(series_floor(sp.tuple())))?;
                    m.phase("compute_ms");
                    Ok(m.finish(json!({
                        "offsets": sp.tuple().offsets(),
                        "k": sp.k(),
                        "ell": sp.ell(),
                        "n": sp.n(),
                        "r": sp.r(),
                        "a": a,
                        "b": b,
                        "singular_series": s.value,
                        "a_over_sb": a / (s.value * b.value),
                    })))
                }
                GpyCmd::Shift { params, h0 } => {
                    let mut m = ManifestBuilder::new("gpy shift", cli.timings);
                    let sp = build_params(&params)?;
                    gpy_manifest(&mut m, &sp, p0);
                    m.param("h0", h0);
                    let s0 = sum_prime_shift(&sp, h0)?;
                    m.phase("compute_ms");
                    Ok(m.finish(json!({
                        "offsets": sp.tuple().offsets(),
                        "n": sp.n(),
                        "r": sp.r(),
                        "ell": sp.ell(),
                        "h0": h0,
                        "in_tuple": sp.tuple().contains(h0),
                        "sum": s0,
                    })))
                }
                GpyCmd::Ratios { params, shifts } => {
                    let mut m = ManifestBuilder::new("gpy ratios", cli.timings);
                    let sp = build_params(&params)?;
                    gpy_manifest(&mut m, &sp, p0);
                    let extra = shifts.map(|s| s.0).unwrap_or_default();
                    m.param("shifts", &extra);
                    let rep = ratio_report(&sp, &extra, p0)?;
                    m.phase("compute_ms");
                    Ok(m.finish(serde_json::to_value(rep).expect("serialize")))
                }
                GpyCmd::Ledger { params, t, m_start } => {
                    let mut m = ManifestBuilder::new("gpy ledger", cli.timings);
                    let sp = build_params(&params)?;
                    let start = m_start.unwrap_or(sp.n());
                    gpy_manifest(&mut m, &sp, p0);
                    m.param("t", t).param("m_start", start);
                    let window = (
                        start,
                        start
                            .checked_add(t)
                            .ok_or(sievelab::Error::Overflow("window end"))?,
                    );
                    let rep = contradiction_ledger(&sp, window, p0)?;
                    m.phase("compute_ms");
                    Ok(m.finish(serde_json::to_value(rep).expect("serialize")))
                }
            }
        }
        Command::Maillet(MailletCmd::Scan {
            x,
            len,
            bound,
            parity,
            witnesses,
        }) => {
            let mut m = ManifestBuilder::new("maillet scan", cli.timings);
            m.param("x", x)
                .param("len", len)
                .param("bound", bound)
                .param(
                    "parity",
                    match parity {
                        ParityArg::Even => "even",
                        ParityArg::All => "all",
                    },
                );
            let keep = witnesses || csv.is_some();
            let rep = scan_interval(
                x,
                len,
                bound,
                match parity {
                    ParityArg::Even => Parity::Even,
                    ParityArg::All => Parity::All,
                },
                keep,
            )?;
            m.phase("compute_ms");
            if let Some(path) = &csv {
                let mut rows: Vec<(u64, Vec<String>)> = Vec::new();
                for w in rep.witnesses.as_deref().unwrap_or(&[]) {
                    rows.push((w.n, vec![w.n.to_string(), w.q.to_string(), w.p.to_string()]));
                }
                for &n in &rep.exceptions {
                    rows.push((n, vec![n.to_string(), String::new(), String::new()]));
                }
                rows.sort_by_key(|(n, _)| *n);
                let rows: Vec<Vec<String>> = rows.into_iter().map(|(_, r)| r).collect();
                write_csv(path, &["n", "q", "p"], &rows)?;
            }
            let mut payload = serde_json::to_value(&rep).expect("serialize");
            if !witnesses {
                payload.as_object_mut().unwrap().remove("witnesses");
            }
            Ok(m.finish(payload))
        }
        Command::Polignac { d, x } => {
            csv_unsupported(&csv)?;
            if d == 0 || (d > 1 && d % 2 != 0) {
                return Err(AppError::Usage(
                    "gap must be 1 or an even number".to_string(),
                ));
            }
            let mut m = ManifestBuilder::new("polignac", cli.timings);
            m.param("d", d).param("x", x);
            let count = polignac_count(d, x);
            m.phase("compute_ms");
            Ok(m.finish(json!({ "d": d, "x": x, "count": count })))
        }
        Command::Gaps(GapsCmd::Hist {
            lo,
            hi,
            width,
            norm,
        }) => {
            let mut m = ManifestBuilder::new("gaps hist", cli.timings);
            m.param("lo", lo)
                .param("hi", hi)
                .param("width", width)
                .param(
                    "norm",
                    match norm {
                        NormArg::LogP => "log_p",
                        NormArg::LogN => "log_n",
                    },
                );
            let h = normalized_gap_histogram(
                lo,
                hi,
                width,
                match norm {
                    NormArg::LogP => GapNormalizer::LogP,
                    NormArg::LogN => GapNormalizer::LogN,
                },
            )?;
            m.phase("compute_ms");
            if let Some(path) = &csv {
                let rows: Vec<Vec<String>> = h
                    .counts
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let (blo, bhi) = h.bin_range(i);
                        vec![blo.to_string(), bhi.to_string(), c.to_string()]
                    })
                    .collect();
                write_csv(path, &["bin_lo", "bin_hi", "count"], &rows)?;
            }
            let bins: Vec<Value> = h
                .counts
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let (blo, bhi) = h.bin_range(i);
                    json!({ "lo": blo, "hi": bhi, "count": c })
                })
                .collect();
            Ok(m.finish(json!({
                "lo": lo,
                "hi": hi,
                "bin_width": h.bin_width,
                "normalizer": match norm { NormArg::LogP => "log_p", NormArg::LogN => "log_n" },
                "samples": h.samples,
                "bins": bins,
            })))
        }
    }
}

fn small_primes_upto(k: u64) -> Vec<u64> {
    (2..=k).filter(|&p| is_prime(p)).collect()
}
