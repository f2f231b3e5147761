//! The `divperm` command line: counts, Table-1 style listings, bound
//! pipelines and invariant suites.
//!
//! Data goes to stdout (CSV by default, JSON with `--format json`); progress
//! and diagnostics go to stderr. Exit status is 0 on success, 1 when an
//! invariant check fails and 2 for usage errors.

pub mod verify;

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use divperm::bounds::{self, BoundReport, FCache, LcmSeriesParams};
use divperm::counts::{self, CountRecord};
use divperm::graph::{build_interval_graph, build_set_graph, LoopGraph};
use divperm::{Error, FactoredInt, RuleKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "divperm",
    version,
    about = "Counts and bounds for divisibility-constrained permutations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for the permanent engine (never changes results).
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Div,
    Lcm,
    Both,
}

impl RuleArg {
    fn kinds(self) -> Vec<RuleKind> {
        match self {
            RuleArg::Div => vec![RuleKind::Div],
            RuleArg::Lcm => vec![RuleKind::Lcm],
            RuleArg::Both => vec![RuleKind::Div, RuleKind::Lcm],
        }
    }

    fn single(self) -> anyhow::Result<RuleKind> {
        match self {
            RuleArg::Div => Ok(RuleKind::Div),
            RuleArg::Lcm => Ok(RuleKind::Lcm),
            RuleArg::Both => bail!(Usage("this subcommand needs --rule div or --rule lcm".into())),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// #S_div(n) and #S_lcm(n) with n-th roots for n = 1..=max-n.
    Table {
        #[arg(long, default_value_t = 30)]
        max_n: u64,
        #[arg(long, value_enum, default_value_t = RuleArg::Both)]
        rule: RuleArg,
    },
    /// Exact count for [1, n] or an explicit set.
    Count {
        #[arg(long, value_enum, default_value_t = RuleArg::Div)]
        rule: RuleArg,
        #[command(flatten)]
        target: GraphTarget,
    },
    /// Run one bound pipeline and print its report.
    Bound(BoundArgs),
    /// Run an invariant suite.
    Verify(VerifyArgs),
    /// R(G, v) = C(G)/C(G - v) and the degree bound at one vertex.
    Ratio {
        #[arg(long, value_enum, default_value_t = RuleArg::Div)]
        rule: RuleArg,
        #[command(flatten)]
        target: GraphTarget,
        #[arg(long)]
        vertex: u64,
    },
    /// Split C(G) by the cycle through one vertex.
    Decompose {
        #[arg(long, value_enum, default_value_t = RuleArg::Div)]
        rule: RuleArg,
        #[command(flatten)]
        target: GraphTarget,
        #[arg(long)]
        vertex: u64,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct GraphTarget {
    /// The interval [1, n].
    #[arg(long)]
    pub n: Option<u64>,
    /// Comma-separated labels, e.g. 1,2,3,6.
    #[arg(long, value_delimiter = ',')]
    pub set: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pipeline {
    UpperCd,
    UpperCl,
    RefinedCl,
    UpperExact,
    LowerCf,
    Beta,
    SmoothRatio,
    CombinedLower,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(value_enum)]
    pub pipeline: Pipeline,
    #[arg(long, value_enum, default_value_t = RuleArg::Div)]
    pub rule: RuleArg,
    /// Series truncation point (also the tail cutoff of the refined bounds).
    #[arg(long, default_value_t = 10_000_000)]
    pub kmax: u64,
    #[arg(long, default_value_t = 2000)]
    pub id_cutoff: u64,
    /// Largest component (or smooth union) computed exactly; 20 for div, 18 for lcm.
    #[arg(long)]
    pub max_verts: Option<usize>,
    #[arg(long, default_value_t = 2000)]
    pub imax: u64,
    #[arg(long, default_value_t = 30)]
    pub dmax_full: u64,
    #[arg(long, default_value_t = 2000)]
    pub dprime_cap: u64,
    #[arg(long)]
    pub b: Option<u64>,
    #[arg(long, default_value_t = 3)]
    pub s: u64,
    /// Precomputed β(b)·α(b) for combined-lower, for b too large to evaluate here.
    #[arg(long)]
    pub beta_alpha: Option<f64>,
    /// File for exact f(d, t) values, created if missing.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    ThmBound,
    LemmaColors,
    Oracle,
    Telescoping,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Exhaustive order for thm-bound / lemma-colors, largest random order for oracle.
    #[arg(long)]
    pub max_order: Option<usize>,
    /// Random graphs (7 to 10 vertices for the theorem suites).
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Largest n for the telescoping check.
    #[arg(long, default_value_t = 20)]
    pub n: u64,
}

/// A usage problem detected after parsing.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// Parses `args` and runs; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &anyhow::Error) -> i32 {
    match e.downcast_ref::<Error>() {
        Some(Error::Invariant(_)) => EXIT_INVARIANT,
        _ => EXIT_USAGE,
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<i32> {
    if cli.workers == 0 {
        bail!(Usage("--workers must be at least 1".into()));
    }
    match &cli.command {
        Command::Table { max_n, rule } => cmd_table(*max_n, *rule, cli, out, err),
        Command::Count { rule, target } => cmd_count(rule.single()?, target, cli, out),
        Command::Bound(args) => cmd_bound(args, cli, out, err),
        Command::Verify(args) => cmd_verify(args, cli, out, err),
        Command::Ratio { rule, target, vertex } => cmd_ratio(rule.single()?, target, *vertex, cli, out),
        Command::Decompose { rule, target, vertex } => cmd_decompose(rule.single()?, target, *vertex, cli, out),
    }
}

fn build_target(kind: RuleKind, target: &GraphTarget) -> anyhow::Result<LoopGraph> {
    match (&target.n, &target.set) {
        (Some(n), None) => {
            if *n == 0 {
                bail!(Usage("--n must be positive".into()));
            }
            Ok(build_interval_graph(kind, 1, *n)?)
        }
        (None, Some(set)) => Ok(build_set_graph(kind, set)?),
        _ => bail!(Usage("give exactly one of --n or --set".into())),
    }
}

/// Rows of the counts table, one per `n`, in the requested rule order.
pub fn table_rows(
    max_n: u64,
    kinds: &[RuleKind],
    workers: usize,
    mut progress: impl FnMut(u64),
) -> divperm::Result<Vec<Vec<CountRecord>>> {
    let mut rows = Vec::new();
    for n in 1..=max_n {
        progress(n);
        let row = kinds
            .iter()
            .map(|&k| CountRecord::compute(k, n, workers))
            .collect::<divperm::Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// The CSV body for table rows, header included.
pub fn table_csv(kinds: &[RuleKind], rows: &[Vec<CountRecord>]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["n".to_string()];
    for k in kinds {
        header.push(format!("s_{k}"));
        header.push(format!("s_{k}_root"));
    }
    w.write_record(&header)?;
    for row in rows {
        let mut rec = vec![row[0].n.to_string()];
        for r in row {
            rec.push(r.count.to_string());
            rec.push(format!("{:.6}", r.nth_root));
        }
        w.write_record(&rec)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn cmd_table(max_n: u64, rule: RuleArg, cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<i32> {
    if max_n == 0 {
        bail!(Usage("--max-n must be positive".into()));
    }
    let kinds = rule.kinds();
    let rows = table_rows(max_n, &kinds, cli.workers, |n| {
        let _ = writeln!(err, "counting n = {n}");
    })?;
    match cli.format {
        Format::Csv => write!(out, "{}", table_csv(&kinds, &rows)?)?,
        Format::Json => {
            let flat: Vec<&CountRecord> = rows.iter().flatten().collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&flat)?)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_count(kind: RuleKind, target: &GraphTarget, cli: &Cli, out: &mut dyn Write) -> anyhow::Result<i32> {
    let g = build_target(kind, target)?;
    let count = divperm::permanent::count_covers_sparse(&g, cli.workers)?;
    match cli.format {
        Format::Csv => writeln!(out, "{count}")?,
        Format::Json => writeln!(
            out,
            "{}",
            json!({"rule": kind, "n": target.n, "set": target.set, "count": count.to_string()})
        )?,
    }
    Ok(EXIT_OK)
}

fn open_cache(path: &Option<PathBuf>) -> anyhow::Result<FCache> {
    match path {
        Some(p) => FCache::open(p).with_context(|| format!("opening cache {}", p.display())),
        None => Ok(FCache::new()),
    }
}

fn need_b(args: &BoundArgs) -> anyhow::Result<FactoredInt> {
    let b = args.b.ok_or_else(|| Usage("this pipeline needs --b".into()))?;
    Ok(FactoredInt::new(b)?)
}

/// Runs a bound pipeline from parsed arguments.
pub fn run_pipeline(args: &BoundArgs, err: &mut dyn Write) -> anyhow::Result<BoundReport> {
    let kind = args.rule.single()?;
    let max_verts = args.max_verts.unwrap_or(match kind {
        RuleKind::Div => 20,
        RuleKind::Lcm => 18,
    });
    let params = LcmSeriesParams {
        imax: args.imax.min(args.kmax),
        dmax_full: args.dmax_full,
        dprime_cap: args.dprime_cap,
        tail_kmax: args.kmax,
    };
    let _ = writeln!(err, "running {:?} ({kind})", args.pipeline);
    let report = match args.pipeline {
        Pipeline::UpperCd => bounds::upper_cd_series(args.kmax),
        Pipeline::UpperCl => bounds::upper_cl_series(args.kmax)?,
        Pipeline::RefinedCl => {
            bounds::refined_cl_series(params.imax, params.dmax_full, params.dprime_cap, params.tail_kmax)?
        }
        Pipeline::UpperExact => {
            let cache = open_cache(&args.cache)?;
            let r = bounds::refined_upper_exact_with(kind, args.id_cutoff, max_verts, &params, &cache)?;
            cache.flush()?;
            r
        }
        Pipeline::LowerCf => {
            let cache = open_cache(&args.cache)?;
            let r = bounds::lower_cf_partial(kind, args.id_cutoff, max_verts, &cache)?;
            cache.flush()?;
            r
        }
        Pipeline::Beta => bounds::lower_beta_alpha(kind, &need_b(args)?)?,
        Pipeline::SmoothRatio => bounds::smooth_ratio_correction(kind, args.s, args.id_cutoff, max_verts)?,
        Pipeline::CombinedLower => {
            let b = need_b(args)?;
            if b.largest_prime() > args.s {
                return Err(Error::SmoothnessMismatch {
                    b: b.value(),
                    largest_prime: b.largest_prime(),
                    s: args.s,
                }
                .into());
            }
            let corr = bounds::smooth_ratio_correction(kind, args.s, args.id_cutoff, max_verts)?;
            match args.beta_alpha {
                Some(base) => bounds::combined_lower_from(kind, &b, base, args.s, &corr)?,
                None => bounds::combined_lower(kind, &b, args.s, &corr)?,
            }
        }
    };
    Ok(report)
}

fn cmd_bound(args: &BoundArgs, _cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<i32> {
    let report = run_pipeline(args, err)?;
    writeln!(out, "{}", report.to_json())?;
    Ok(EXIT_OK)
}

fn cmd_verify(args: &VerifyArgs, cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<i32> {
    let _ = writeln!(err, "running {:?}", args.suite);
    let report = match args.suite {
        Suite::ThmBound => verify::on_corpus(args.max_order.unwrap_or(6), args.trials.unwrap_or(0), args.seed, |gs| {
            verify::theorem_suite(gs.iter())
        })?,
        Suite::LemmaColors => {
            verify::on_corpus(args.max_order.unwrap_or(6), args.trials.unwrap_or(0), args.seed, |gs| {
                verify::lemma_suite(gs.iter())
            })?
        }
        Suite::Oracle => {
            let top = args.max_order.unwrap_or(9);
            if top > divperm::permanent::BRUTEFORCE_LIMIT {
                bail!(Usage(format!(
                    "--max-order {top} is above the brute-force limit {}",
                    divperm::permanent::BRUTEFORCE_LIMIT
                )));
            }
            let graphs = verify::random_corpus(args.seed, args.trials.unwrap_or(500), 1, top);
            verify::oracle_suite(graphs.iter(), cli.workers)?
        }
        Suite::Telescoping => verify::telescoping_suite(args.n, 1e-9)?,
    };
    match cli.format {
        Format::Csv => {
            let status = if report.passed() { "pass" } else { "fail" };
            writeln!(out, "{status}: {} checks", report.checks)?;
            for f in &report.failures {
                writeln!(out, "counterexample: {f}")?;
            }
        }
        Format::Json => writeln!(
            out,
            "{}",
            json!({"suite": format!("{:?}", args.suite), "passed": report.passed(), "checks": report.checks, "failures": report.failures})
        )?,
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_INVARIANT })
}

fn cmd_ratio(kind: RuleKind, target: &GraphTarget, v: u64, cli: &Cli, out: &mut dyn Write) -> anyhow::Result<i32> {
    let g = build_target(kind, target)?;
    let r = counts::ratio_R(&g, v)?;
    let d = g.degree(v)?;
    let holds = counts::verify_theorem_bound(&g, v)?;
    let cap = 1 + (d * d - d) / 2;
    match cli.format {
        Format::Csv => {
            writeln!(out, "vertex,degree,ratio,ratio_approx,bound,holds")?;
            writeln!(out, "{v},{d},{r},{:.6},{cap},{holds}", counts::ratio_f64(&r))?;
        }
        Format::Json => writeln!(
            out,
            "{}",
            json!({"vertex": v, "degree": d, "ratio": r.to_string(), "ratio_approx": counts::ratio_f64(&r), "bound": cap, "holds": holds})
        )?,
    }
    Ok(if holds { EXIT_OK } else { EXIT_INVARIANT })
}

fn cmd_decompose(kind: RuleKind, target: &GraphTarget, v: u64, cli: &Cli, out: &mut dyn Write) -> anyhow::Result<i32> {
    let g = build_target(kind, target)?;
    let d = counts::decompose_at(&g, v)?;
    match cli.format {
        Format::Csv => {
            writeln!(out, "term,w_i,w_j,count")?;
            writeln!(out, "c_v,,,{}", d.c_v)?;
            for (w, c) in &d.c_vw {
                writeln!(out, "c_vw,{w},,{c}")?;
            }
            for ((wi, wj), c) in &d.c_wvw {
                writeln!(out, "c_wvw,{wi},{wj},{c}")?;
            }
            writeln!(out, "total,,,{}", d.total())?;
        }
        Format::Json => {
            let vw: serde_json::Map<String, serde_json::Value> = d
                .c_vw
                .iter()
                .map(|(w, c)| (w.to_string(), json!(c.to_string())))
                .collect();
            let wvw: Vec<_> = d
                .c_wvw
                .iter()
                .map(|((a, b), c)| json!({"w_i": a, "w_j": b, "count": c.to_string()}))
                .collect();
            writeln!(
                out,
                "{}",
                json!({"vertex": v, "c_v": d.c_v.to_string(), "c_vw": vw, "c_wvw": wvw, "total": d.total().to_string(), "lemma_holds": d.lemma_holds()})
            )?;
        }
    }
    Ok(if d.lemma_holds() { EXIT_OK } else { EXIT_INVARIANT })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("divperm").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn count_and_table() {
        assert_eq!(call(&["count", "--rule", "div", "--n", "20"]), (0, "1939684\n".into()));
        let (code, csv) = call(&["table", "--max-n", "6"]);
        assert_eq!(code, 0);
        assert_eq!(csv.lines().last(), Some("6,36,1.817121,56,1.955981"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["count", "--rule", "div"]).0, EXIT_USAGE);
        assert_eq!(call(&["bound", "beta", "--b", "720"]).0, EXIT_USAGE);
        assert_eq!(
            call(&["--workers", "0", "count", "--rule", "div", "--n", "3"]).0,
            EXIT_USAGE
        );
        assert_eq!(call(&["verify", "telescoping", "--n", "8"]).0, EXIT_OK);
    }
}
