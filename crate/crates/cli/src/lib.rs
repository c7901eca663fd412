//! Command-line front end for the `dibmap` library.
//!
//! [`run`] parses a command line, executes one subcommand and returns the
//! process exit status: 0 on success, 1 when an input file is unusable and 2
//! when the flags themselves are wrong.

pub mod document;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dibmap::distributions::normalize_counts;
use dibmap::mapper::parse_epsilon;
use dibmap::oracle::brute_force_frontier;
use dibmap::scaling_lab::{
    dib_frontier_scaling, harmonic_number, linear_fit, loglog_fit, scaling_experiment, FrontierEngine,
};
use dibmap::{
    group_joint, ingest_bigrams, make_group, pareto_mapper, precision_recall, robust_pareto_mapper,
    symmetric_pareto_mapper, CopulaKind, DibError, EmpiricalCounts, JointPMF, RobustConfig, SearchConfig,
    SearchStats, TripleJointPMF,
};
use serde::Serialize;
use serde_json::{json, Map, Value};

pub use document::{DocPoint, FrontierDocument};

#[derive(Debug, Parser)]
#[command(name = "dibmap", version, about = "Map deterministic information bottleneck frontiers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Map the frontier of a joint distribution.
    Map(MapArgs),
    /// Map a frontier from sample counts with bootstrap error bars and a significance filter.
    RobustMap(RobustArgs),
    /// Map the frontier of one encoder applied to both inputs of a triple.
    SymmetricMap(SymmetricArgs),
    /// Enumerate every partition to get the exact frontier, optionally scoring a candidate.
    Oracle(OracleArgs),
    /// Pareto-set size scaling experiments.
    Scaling(ScalingArgs),
    /// Count letter bigrams of a text file into a 27x27 matrix.
    IngestBigrams(IngestArgs),
    /// Emit the triple distribution of a built-in group.
    Group(GroupArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Record wall-clock timings and a start timestamp in the metadata.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Search depth in bits, or `inf` for exhaustive search.
    #[arg(long, default_value = "0", value_parser = epsilon_arg)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Evaluate partitions again when they are reached twice.
    #[arg(long)]
    pub no_dedup: bool,
    /// Expand every partition that wins the enqueue draw, even exact objective ties.
    #[arg(long)]
    pub expand_ties: bool,
    /// Stop enqueueing while the queue holds this many entries.
    #[arg(long)]
    pub max_queue: Option<usize>,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            dedup: !self.no_dedup,
            tie_dedup: !self.expand_ties,
            max_queue: self.max_queue,
            ..SearchConfig::new(self.epsilon, self.seed)
        }
    }
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
pub struct JointSource {
    /// Joint probability matrix, one CSV row per input symbol.
    #[arg(long, group = "source")]
    pub pmf: Option<PathBuf>,
    /// Integer count matrix, normalized before use.
    #[arg(long, group = "source")]
    pub counts: Option<PathBuf>,
}

impl JointSource {
    fn load(&self) -> Result<(JointPMF, Value), Failure> {
        match (&self.pmf, &self.counts) {
            (Some(p), _) => Ok((JointPMF::from_csv_path(p).map_err(input(p))?, json!({ "pmf": p }))),
            (_, Some(c)) => {
                let counts = EmpiricalCounts::from_csv_path(c).map_err(input(c))?;
                Ok((normalize_counts(&counts).map_err(input(c))?, json!({ "counts": c })))
            }
            _ => unreachable!("clap requires one source"),
        }
    }
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[command(flatten)]
    pub source: JointSource,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct RobustArgs {
    /// Integer count matrix of observed `(x, y)` pairs.
    #[arg(long)]
    pub counts: PathBuf,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long, default_value_t = 100)]
    pub bootstrap_reps: usize,
    /// Interval half-width in standard deviations for the significance filter.
    #[arg(long, default_value_t = 1.0)]
    pub z: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
#[group(id = "triple_source", required = true, multiple = false)]
pub struct SymmetricArgs {
    /// Built-in group: zmod40x or pauli.
    #[arg(long, group = "triple_source")]
    pub group: Option<String>,
    /// Triple distribution file with g*g rows, row index x1*g + x2.
    #[arg(long, group = "triple_source")]
    pub triple: Option<PathBuf>,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub pmf: PathBuf,
    /// Frontier document to score against the exact frontier.
    #[arg(long)]
    pub candidate: Option<PathBuf>,
    /// Matching tolerance on each objective, in bits.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    /// Point clouds drawn from this copula: independent, comonotone, countermonotone or gaussian:<r>.
    #[arg(long, conflicts_with = "dib", value_parser = copula_arg)]
    pub copula: Option<CopulaKind>,
    /// Frontiers of random joints instead of point clouds: `oracle` or `mapper:<epsilon>`.
    #[arg(long, value_parser = engine_arg)]
    pub dib: Option<FrontierEngine>,
    /// Sizes to sample, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output alphabet size for random joints.
    #[arg(long, default_value_t = 30)]
    pub ny: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GroupArgs {
    pub name: String,
    /// Triple distribution CSV destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Element labels destination, one per line in index order.
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

fn epsilon_arg(s: &str) -> Result<f64, String> {
    parse_epsilon(s).map_err(|e| e.to_string())
}

fn copula_arg(s: &str) -> Result<CopulaKind, String> {
    s.parse::<CopulaKind>().map_err(|e| e.to_string())
}

fn engine_arg(s: &str) -> Result<FrontierEngine, String> {
    if s.eq_ignore_ascii_case("oracle") {
        return Ok(FrontierEngine::Oracle);
    }
    match s.split_once(':') {
        Some(("mapper", eps)) => Ok(FrontierEngine::Mapper {
            epsilon: epsilon_arg(eps)?,
        }),
        _ if s == "mapper" => Ok(FrontierEngine::Mapper { epsilon: 0.0 }),
        _ => Err(format!("expected `oracle` or `mapper:<epsilon>`, got {s:?}")),
    }
}

/// A failed command, split by exit status.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable or invalid input data (exit 1).
    Input(String),
    /// Flag values the command cannot use (exit 2).
    Usage(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Usage(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Usage(m) => m,
        }
    }
}

fn input(path: &Path) -> impl Fn(DibError) -> Failure + '_ {
    move |e| Failure::Input(format!("{}: {e}", path.display()))
}

/// Library errors raised while acting on already-loaded data.
fn classify(e: DibError) -> Failure {
    match e {
        DibError::InvalidArgument(m) => Failure::Usage(m),
        other => Failure::Input(other.to_string()),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("dibmap: {}", f.message());
            f.code()
        }
    }
}

pub fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Map(a) => map(a),
        Command::RobustMap(a) => robust_map(a),
        Command::SymmetricMap(a) => symmetric_map(a),
        Command::Oracle(a) => oracle(a),
        Command::Scaling(a) => scaling(a),
        Command::IngestBigrams(a) => ingest(a),
        Command::Group(a) => group(a),
    }
}

struct Clock {
    wall: SystemTime,
    start: Instant,
}

impl Clock {
    fn start() -> Self {
        Self {
            wall: SystemTime::now(),
            start: Instant::now(),
        }
    }

    fn stamp(&self, meta: &mut Map<String, Value>) {
        let started = self.wall.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
        meta.insert(
            "timing".into(),
            json!({ "started_unix": started, "seconds": self.start.elapsed().as_secs_f64() }),
        );
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

/// Stats echo; the elapsed time only appears when timing was requested.
fn stats_value(stats: &SearchStats, timing: bool) -> Value {
    let mut v = to_value(stats);
    if !timing {
        v.as_object_mut().expect("struct").remove("elapsed");
    }
    v
}

fn meta(command: &str, input: Value, config: Value) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("input".into(), input);
    m.insert("config".into(), config);
    m
}

fn emit(out: &Output, default: Format, json_body: impl FnOnce() -> Value, csv_body: impl FnOnce() -> Result<Vec<u8>, Failure>) -> Result<(), Failure> {
    let bytes = match out.format.unwrap_or(default) {
        Format::Json => {
            let mut b = serde_json::to_vec_pretty(&json_body()).expect("json values serialize");
            b.push(b'\n');
            b
        }
        Format::Csv => csv_body()?,
    };
    write_bytes(out.out.as_deref(), &bytes)
}

fn write_bytes(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|e| Failure::Input(format!("stdout: {e}"))),
    }
}

fn emit_document(out: &Output, mut doc: FrontierDocument, clock: &Clock) -> Result<(), Failure> {
    if out.timing {
        clock.stamp(&mut doc.meta);
    }
    let points = doc.points.clone();
    emit(
        out,
        Format::Json,
        || to_value(&doc),
        || document::points_csv(&points).map_err(|e| Failure::Input(e.to_string())),
    )
}

fn map(a: MapArgs) -> Result<(), Failure> {
    let clock = Clock::start();
    let (joint, source) = a.source.load()?;
    let cfg = a.search.config();
    let (frontier, stats) = pareto_mapper(&joint, &cfg).map_err(classify)?;
    let mut m = meta("map", source, to_value(&cfg));
    m.insert("seed".into(), json!(cfg.seed));
    m.insert("stats".into(), stats_value(&stats, a.output.timing));
    emit_document(&a.output, FrontierDocument::from_frontier(m, &frontier, None), &clock)
}

fn robust_map(a: RobustArgs) -> Result<(), Failure> {
    let clock = Clock::start();
    let counts = EmpiricalCounts::from_csv_path(&a.counts).map_err(input(&a.counts))?;
    let search = a.search.config();
    let cfg = RobustConfig {
        bootstrap_reps: a.bootstrap_reps,
        z: a.z,
        dedup: search.dedup,
        ..RobustConfig::new(search.epsilon, search.seed)
    };
    let res = robust_pareto_mapper(&counts, &cfg).map_err(classify)?;
    let mut m = meta("robust-map", json!({ "counts": a.counts }), to_value(&cfg));
    m.insert("seed".into(), json!(cfg.seed));
    m.insert("samples".into(), json!(counts.total()));
    m.insert("stats".into(), stats_value(&res.stats, a.output.timing));
    m.insert("kept".into(), json!(res.filtered.len()));
    let doc = FrontierDocument::from_frontier(m, &res.unfiltered, Some(&res.filtered));
    emit_document(&a.output, doc, &clock)
}

fn symmetric_map(a: SymmetricArgs) -> Result<(), Failure> {
    let clock = Clock::start();
    let (triple, source, labels) = match (&a.group, &a.triple) {
        (Some(name), _) => {
            let g = make_group(name).map_err(classify)?;
            (group_joint(&g), json!({ "group": name }), Some(g.labels().to_vec()))
        }
        (_, Some(p)) => (TripleJointPMF::from_csv_path(p).map_err(input(p))?, json!({ "triple": p }), None),
        _ => unreachable!("clap requires one source"),
    };
    let cfg = a.search.config();
    let (frontier, stats) = symmetric_pareto_mapper(&triple, &cfg).map_err(classify)?;
    let mut m = meta("symmetric-map", source, to_value(&cfg));
    m.insert("seed".into(), json!(cfg.seed));
    if let Some(l) = labels {
        m.insert("labels".into(), json!(l));
    }
    m.insert("stats".into(), stats_value(&stats, a.output.timing));
    emit_document(&a.output, FrontierDocument::from_frontier(m, &frontier, None), &clock)
}

fn oracle(a: OracleArgs) -> Result<(), Failure> {
    let clock = Clock::start();
    if a.tol.is_nan() || a.tol < 0.0 {
        return Err(Failure::Usage(format!("--tol must be non-negative, got {}", a.tol)));
    }
    let joint = JointPMF::from_csv_path(&a.pmf).map_err(input(&a.pmf))?;
    let truth = brute_force_frontier(&joint).map_err(input(&a.pmf))?;
    let mut m = meta("oracle", json!({ "pmf": a.pmf }), json!({ "tol": a.tol }));
    m.insert("partitions".into(), json!(dibmap::oracle::bell_number(joint.nx()).to_string()));
    let mut doc = FrontierDocument::from_frontier(m, &truth, None);
    if let Some(c) = &a.candidate {
        let text = fs::read_to_string(c).map_err(|e| Failure::Input(format!("{}: {e}", c.display())))?;
        let cand: FrontierDocument =
            serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", c.display())))?;
        let score = precision_recall(&cand.frontier(), &truth, a.tol).map_err(classify)?;
        doc.meta.insert("candidate".into(), json!(c));
        doc.score = Some(to_value(&score));
    }
    emit_document(&a.output, doc, &clock)
}

fn csv_table<R: Serialize>(rows: &[R]) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::Input(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Failure::Input(e.to_string()))
}

fn scaling(a: ScalingArgs) -> Result<(), Failure> {
    let clock = Clock::start();
    if a.n.is_empty() {
        return Err(Failure::Usage("--n needs at least one size".into()));
    }
    let mut m = Map::new();
    m.insert("command".into(), json!("scaling"));
    m.insert("seed".into(), json!(a.seed));
    m.insert("trials".into(), json!(a.trials));
    if let Some(engine) = a.dib {
        let mut rows = dib_frontier_scaling(&a.n, a.trials, a.seed, engine, a.ny).map_err(classify)?;
        if !a.output.timing {
            rows.iter_mut().for_each(|r| r.mean_seconds = 0.0);
        }
        m.insert("engine".into(), to_value(&engine));
        m.insert("ny".into(), json!(a.ny));
        let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.mean_frontier).collect();
        let fit = (rows.len() >= 2).then(|| loglog_fit(&xs, &ys).ok()).flatten();
        if a.output.timing {
            clock.stamp(&mut m);
        }
        #[derive(Serialize)]
        struct Row {
            n: usize,
            mean_frontier: f64,
            mean_points_searched: f64,
            mean_enqueued: f64,
            #[serde(skip_serializing_if = "Option::is_none")]
            mean_seconds: Option<f64>,
        }
        let flat: Vec<Row> = rows
            .iter()
            .map(|r| Row {
                n: r.n,
                mean_frontier: r.mean_frontier,
                mean_points_searched: r.mean_points_searched,
                mean_enqueued: r.mean_enqueued,
                mean_seconds: a.output.timing.then_some(r.mean_seconds),
            })
            .collect();
        let body = json!({ "meta": m, "rows": flat, "loglog_fit": fit });
        emit(&a.output, Format::Csv, || body, || csv_table(&flat))
    } else {
        let kind = a.copula.unwrap_or(CopulaKind::Independent);
        let rows = scaling_experiment(kind, &a.n, a.trials, a.seed).map_err(classify)?;
        m.insert("copula".into(), json!(kind.to_string()));
        let ln: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.mean).collect();
        let fit = (rows.len() >= 2).then(|| linear_fit(&ln, &ys).ok()).flatten();
        let harmonic: Vec<f64> = rows.iter().map(|r| harmonic_number(r.n)).collect();
        if a.output.timing {
            clock.stamp(&mut m);
        }
        let body = json!({ "meta": m, "rows": rows, "harmonic": harmonic, "fit_vs_ln_n": fit });
        emit(&a.output, Format::Csv, || body, || csv_table(&rows))
    }
}

fn ingest(a: IngestArgs) -> Result<(), Failure> {
    let bytes = fs::read(&a.file).map_err(|e| Failure::Input(format!("{}: {e}", a.file.display())))?;
    let counts = ingest_bigrams(&bytes).map_err(input(&a.file))?;
    let mut buf = Vec::new();
    counts.write_csv(&mut buf).map_err(|e| Failure::Input(e.to_string()))?;
    write_bytes(a.out.as_deref(), &buf)
}

fn group(a: GroupArgs) -> Result<(), Failure> {
    let g = make_group(&a.name).map_err(classify)?;
    let mut buf = Vec::new();
    group_joint(&g).write_csv(&mut buf).map_err(|e| Failure::Input(e.to_string()))?;
    write_bytes(a.out.as_deref(), &buf)?;
    let labels = g.labels().join("\n") + "\n";
    match &a.labels {
        Some(p) => write_bytes(Some(p), labels.as_bytes()),
        None => {
            eprint!("{labels}");
            Ok(())
        }
    }
}
