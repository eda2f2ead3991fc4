use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::table::{bound_rows, comp_rows, parse_range, write_csv, BoundCsvRow};
use crate::witness::{Provenance, Verdict, Witness};
use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use sperner::bounds::{bounds_report, eval_bound, BoundId, Measure};
use sperner::constructions::{
    build_conjecture_tuple, build_pair_product, build_pair_sum, build_product_tuple, build_sum_tuple, ConjectureParams,
    Construction, ProductParams, SumParams,
};
use sperner::par::default_threads;
use sperner::search::{self, exact_comp_table, Objective, SearchConfig, SearchMode, EXACT_LIMIT};
use thiserror::Error;

#[derive(Parser)]
#[command(name = "sperner", version, about = "Construct, verify and search cross-Sperner families")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a family tuple from one of the explicit constructions.
    Construct(ConstructArgs),
    /// Check a witness file.
    Verify { path: PathBuf },
    /// Run the exact or heuristic search for the product (pi) or sum (sigma).
    Search(SearchArgs),
    /// Print a comparability or bounds table.
    Table(TableArgs),
    /// Evaluate every bound at one point.
    Bounds(BoundsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    PairProduct,
    PairSum,
    Product,
    Sum,
    Conjecture,
}

#[derive(Args)]
struct ConstructArgs {
    kind: Kind,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Colex segment sizes for `product`, comma separated.
    #[arg(long, value_delimiter = ',')]
    segments: Option<Vec<u64>>,
    /// Offset `a` for `sum` (same parity as n).
    #[arg(long, allow_hyphen_values = true)]
    a: Option<i64>,
    /// Prefix length for `conjecture`.
    #[arg(long)]
    ell: Option<u32>,
    /// Witness path; the JSON goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Pi,
    Sigma,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Heuristic,
}

#[derive(Args)]
struct SearchArgs {
    measure: MeasureArg,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    #[arg(long)]
    budget_nodes: Option<u64>,
    #[arg(long)]
    budget_secs: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "SPERNER_THREADS")]
    threads: Option<usize>,
    /// Stop (and exit 0) once this value is reached.
    #[arg(long)]
    target: Option<BigUint>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableKind {
    Comp,
    Bounds,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct TableArgs {
    kind: TableKind,
    /// A value or an inclusive range `a..b`.
    #[arg(long)]
    n: String,
    #[arg(long, default_value = "2")]
    k: String,
    #[arg(long, env = "SPERNER_THREADS")]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 2)]
    k: u64,
    /// Family size for COMP_LOWER.
    #[arg(long)]
    m: Option<u64>,
    /// Tail size for ANTICHAIN_COMP.
    #[arg(long)]
    ell: Option<u32>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Error)]
enum Failure {
    /// Exit 1.
    #[error("{0}")]
    Invalid(String),
    /// Exit 2.
    #[error("{0}")]
    Usage(String),
    /// Exit 3.
    #[error("budget exhausted")]
    Budget,
    /// Exit 2.
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Usage(_) | Failure::Other(_) => 2,
            Failure::Budget => 3,
        }
    }
}

/// Output sinks, so commands can run in-process.
pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

impl Io<'_> {
    fn line(&mut self, text: &str) {
        let _ = writeln!(self.out, "{text}");
    }

    /// Summary lines go to stdout when the payload went to a file, else stderr.
    fn say(&mut self, to_file: bool, text: &str) {
        let _ = if to_file { writeln!(self.out, "{text}") } else { writeln!(self.err, "{text}") };
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn emit(io: &mut Io, text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => io.out.write_all(text.as_bytes()).context("writing to stdout")?,
    }
    Ok(())
}

fn construct(io: &mut Io, a: ConstructArgs) -> Result<(), Failure> {
    let (c, method): (Construction, &str) = match a.kind {
        Kind::PairProduct => (build_pair_product(a.n).map_err(usage)?, "pair-product"),
        Kind::PairSum => (build_pair_sum(a.n).map_err(usage)?, "pair-sum"),
        Kind::Product => {
            let mut p = ProductParams::new(a.n, a.k).map_err(usage)?;
            if let Some(s) = a.segments.clone() {
                p = p.with_segments(s).map_err(usage)?;
            }
            (build_product_tuple(&p).map_err(usage)?, "product")
        }
        Kind::Sum => {
            let s = match a.a {
                Some(off) => SumParams::with_offset(a.n, a.k, off),
                None => SumParams::new(a.n, a.k),
            }
            .map_err(usage)?;
            (build_sum_tuple(&s).map_err(usage)?, "sum")
        }
        Kind::Conjecture => {
            let c = match a.ell {
                Some(l) => ConjectureParams::with_ell(a.n, a.k, l),
                None => ConjectureParams::new(a.n, a.k),
            }
            .map_err(usage)?;
            (build_conjecture_tuple(&c).map_err(usage)?, "conjecture")
        }
    };
    let mut prov = Provenance::new("builder", method).param("n", a.n).param("k", c.tuple.k());
    if let Some(s) = &a.segments {
        prov = prov.param("segments", s.clone());
    }
    if let Some(off) = a.a {
        prov = prov.param("a", off);
    }
    if let Some(l) = a.ell {
        prov = prov.param("ell", l);
    }
    let w = Witness::from_tuple(&c.tuple, prov);
    emit(io, &w.to_json(), a.out.as_deref())?;

    let to_file = a.out.is_some();
    let sizes: Vec<String> = c.tuple.sizes().iter().map(|s| s.to_string()).collect();
    io.say(to_file, &format!("sizes: {}", sizes.join(" ")));
    io.say(to_file, &format!("sum: {}", c.tuple.sum()));
    io.say(to_file, &format!("product: {}", c.tuple.product()));
    let measures: &[Measure] = match a.kind {
        Kind::PairSum | Kind::Sum => &[Measure::Sum],
        _ => &[Measure::Product],
    };
    let report = bounds_report(a.n, c.tuple.k() as u64, None);
    for v in report.entries.values().filter(|v| measures.contains(&v.id.measure())) {
        io.say(
            to_file,
            &format!("{:<22} {}{}", v.id.name(), v.value, if v.applicable { "" } else { " (inapplicable)" }),
        );
    }
    Ok(())
}

fn load(path: &Path) -> Result<Witness, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Witness::parse(&text).map_err(usage)
}

fn verify(io: &mut Io, path: &Path) -> Result<(), Failure> {
    let w = load(path)?;
    match w.verify() {
        Ok(Verdict::Valid { sum, product }) => {
            io.line("VALID");
            io.line(&format!("n: {}  k: {}", w.n, w.k));
            io.line(&format!("sum: {sum}"));
            io.line(&format!("product: {product}"));
            Ok(())
        }
        Ok(Verdict::Violation(v)) => {
            io.line("INVALID");
            Err(Failure::Invalid(format!("violation: {v}")))
        }
        Ok(Verdict::MeasureMismatch(m)) => {
            io.line("INVALID");
            Err(Failure::Invalid(format!("measure mismatch: {m}")))
        }
        // Malformed files (including empty families) are usage errors, not invalid witnesses.
        Err(e) => Err(usage(e)),
    }
}

fn run_search(io: &mut Io, a: SearchArgs) -> Result<(), Failure> {
    let objective = match a.measure {
        MeasureArg::Pi => Objective::Product,
        MeasureArg::Sigma => Objective::Sum,
    };
    let mode = match a.mode {
        ModeArg::Exact => SearchMode::Exact,
        ModeArg::Heuristic => SearchMode::Heuristic,
    };
    let mut cfg = SearchConfig::new(a.n, a.k, objective, mode)
        .with_seed(a.seed)
        .with_threads(a.threads.unwrap_or_else(default_threads));
    let mut budget = cfg.budget;
    if let Some(nodes) = a.budget_nodes {
        budget.nodes = nodes;
    }
    if let Some(secs) = a.budget_secs {
        budget.time =
            Duration::try_from_secs_f64(secs).map_err(|_| usage("--budget-secs must be a positive number"))?;
    }
    cfg = cfg.with_budget(budget);
    if let Some(t) = a.target.clone() {
        cfg = cfg.with_target(t);
    }
    let r = search::run(&cfg).map_err(usage)?;
    let target_met = a.target.as_ref().is_some_and(|t| &r.value >= t);

    let mode_name = if mode == SearchMode::Exact { "exact" } else { "heuristic" };
    let mut prov = Provenance::new("search", &format!("{objective}-{mode_name}"))
        .param("n", a.n)
        .param("k", a.k)
        .param("optimal", r.optimal)
        .param("threads", cfg.threads)
        .param("budget_nodes", budget.nodes);
    prov.seed = Some(a.seed);
    let w = Witness::from_tuple(&r.witness, prov);
    emit(io, &w.to_json(), a.out.as_deref())?;

    let to_file = a.out.is_some();
    io.say(to_file, &format!("value: {}", r.value));
    io.say(to_file, &format!("optimal: {}", r.optimal));
    io.say(to_file, &format!("nodes: {}", r.nodes_explored));
    io.say(
        to_file,
        &format!("elapsed: {}", humantime::format_duration(Duration::from_millis(r.elapsed.as_millis() as u64))),
    );
    if let Some(t) = &a.target {
        io.say(to_file, &format!("target {t}: {}", if target_met { "met" } else { "not met" }));
    }
    if r.optimal || target_met {
        Ok(())
    } else {
        Err(Failure::Budget)
    }
}

fn table(io: &mut Io, a: TableArgs) -> Result<(), Failure> {
    let ns = parse_range::<u32>(&a.n).map_err(usage)?;
    let mut buf = Vec::new();
    match a.kind {
        TableKind::Comp => {
            if *ns.end() > EXACT_LIMIT {
                return Err(usage(format!("comparability tables are exact only for n <= {EXACT_LIMIT}")));
            }
            let threads = a.threads.unwrap_or_else(default_threads);
            let mut rows = Vec::new();
            for n in ns {
                rows.extend(comp_rows(&exact_comp_table(n, threads).map_err(usage)?));
            }
            write_rows(&rows, a.format, &mut buf)?;
        }
        TableKind::Bounds => {
            let ks = parse_range::<u64>(&a.k).map_err(usage)?;
            if *ks.start() < 2 {
                return Err(usage("k must be at least 2"));
            }
            if *ns.end() > sperner::lattice::MAX_GROUND {
                return Err(usage(format!("n must be at most {}", sperner::lattice::MAX_GROUND)));
            }
            write_rows(&bound_rows(ns, ks), a.format, &mut buf)?;
        }
    }
    emit(io, &String::from_utf8(buf).context("table output")?, a.out.as_deref())
}

fn write_rows<R: serde::Serialize>(rows: &[R], format: Format, buf: &mut Vec<u8>) -> Result<(), Failure> {
    match format {
        Format::Csv => write_csv(rows, &mut *buf).context("writing CSV")?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut *buf, rows).context("writing JSON")?;
            buf.push(b'\n');
        }
    }
    Ok(())
}

fn bounds(io: &mut Io, a: BoundsArgs) -> Result<(), Failure> {
    if a.k < 2 {
        return Err(usage("k must be at least 2"));
    }
    if a.n > sperner::lattice::MAX_GROUND {
        return Err(usage(format!("n must be at most {}", sperner::lattice::MAX_GROUND)));
    }
    let mut report = bounds_report(a.n, a.k, a.m);
    if a.ell.is_some() {
        report.entries.insert(BoundId::AntichainComp, eval_bound(BoundId::AntichainComp, a.n, a.k, a.ell));
    }
    let rows: Vec<_> = report.entries.values().collect();
    match a.format {
        Some(f) => {
            let rows: Vec<BoundCsvRow> = rows
                .iter()
                .map(|v| BoundCsvRow {
                    n: a.n,
                    k: a.k,
                    bound_id: v.id.name(),
                    value: v.value.to_string(),
                    applicable: v.applicable,
                })
                .collect();
            let mut buf = Vec::new();
            write_rows(&rows, f, &mut buf)?;
            emit(io, &String::from_utf8(buf).context("bounds output")?, None)?;
        }
        None => {
            for v in rows {
                let note =
                    if v.applicable { String::new() } else { format!("  [inapplicable: {}]", v.precondition_note) };
                io.line(&format!("{:<22} {}{}", v.id.name(), v.value, note));
            }
            for (lo, hi) in report.inconsistencies() {
                io.line(&format!("warning: {} exceeds {}", lo.name(), hi.name()));
            }
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, io: &mut Io) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(io.err, "{text}") } else { write!(io.out, "{text}") };
            return e.exit_code() as u8;
        }
    };
    let result = match cli.cmd {
        Cmd::Construct(a) => construct(io, a),
        Cmd::Verify { path } => verify(io, &path),
        Cmd::Search(a) => run_search(io, a),
        Cmd::Table(a) => table(io, a),
        Cmd::Bounds(a) => bounds(io, a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e:#}");
            e.code()
        }
    }
}

#[cfg(test)]
mod tests;
