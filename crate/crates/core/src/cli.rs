//! Batch front end: configuration, dispatch and report writing.
//!
//! Settings come from three layers, later ones winning: built-in defaults,
//! an optional TOML file (`--config`), then command-line flags. The worker
//! count can also be set with `QUARTIC_WORKERS`, which sits between the file
//! and the flag.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::rational::Rational64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::checks::{run_check, CheckReport, NAMES};
use crate::colour_kernel::{BoundaryGraph, ModelSpec, Propagator, Scaling};
use crate::coloured_graphs::ColouredGraph;
use crate::enumeration::{count_trees_closed_form, count_trees_enumerated, for_each_map, EnumSpec};
use crate::error::Error;
use crate::if_transform::{graph_to_map, map_to_graph};
use crate::renormalization::{
    classify_renormalisability, divergence_survey, graph_divergence_degree, max_degree_over_marks, t43_counterterms,
    MapFaces,
};
use crate::series::{format_ratio64, FormalSeries};
use crate::series_engine::{assemble_series, cumulants_by_boundary, Observable};
use crate::stranded_maps::StrandedMap;
use crate::wick_oracle::{oracle_connected_vacuum, oracle_cumulants};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const WORKERS_ENV: &str = "QUARTIC_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_CHECK: i32 = 4;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// One melonic bubble per colour, identity covariance.
    Melonic,
    /// Every quartic bubble of the rank, identity covariance.
    Full,
    /// Melonic field theory with covariance `1/p^(2 eta)`.
    Standard,
    /// Rank-4 field theory with derivative necklaces.
    Enhanced,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingArg {
    Invariant,
    Enhanced,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ObservableArg {
    FreeEnergy,
    Partition,
    Cumulant,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// Defaults to 4 for the enhanced family and 3 otherwise.
    pub rank: Option<usize>,
    pub family: Family,
    pub scaling: ScalingArg,
    /// Covariance exponent as a rational, e.g. `"3/4"`.
    pub eta: String,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            rank: None,
            family: Family::Melonic,
            scaling: ScalingArg::Invariant,
            eta: "1".into(),
        }
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub edges: usize,
    pub cilia: usize,
    pub order: u32,
    pub observable: ObservableArg,
    /// Tree counts: vertices, cilia and colours.
    pub vertices: usize,
    pub tree_cilia: usize,
    pub colours: usize,
    pub cutoff: i64,
    /// Acceptance checks to run; empty means all.
    pub checks: Vec<u8>,
    /// Lift the default edge guard of `enumerate`.
    pub accept_blowup: bool,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            edges: 2,
            cilia: 0,
            order: 2,
            observable: ObservableArg::FreeEnergy,
            vertices: 5,
            tree_cilia: 1,
            colours: 3,
            cutoff: 16,
            checks: Vec::new(),
            accept_blowup: false,
        }
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Format,
    pub path: Option<PathBuf>,
    /// Digits after the decimal point for floating-point fields.
    pub precision: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            format: Format::Csv,
            path: None,
            precision: 12,
        }
    }
}

#[derive(Clone, PartialEq, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub params: Params,
    pub output: OutputConfig,
    pub workers: Option<usize>,
    /// Only used by randomised suites.
    pub seed: u64,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {}", e.to_string().trim_end())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// SHA-256 of the canonical TOML rendering.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn eta(&self) -> Result<Rational64, CliError> {
        self.model
            .eta
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("model.eta: not a rational: {:?}", self.model.eta)))
    }

    pub fn model_spec(&self) -> Result<ModelSpec, CliError> {
        let scaling = match self.model.scaling {
            ScalingArg::Invariant => Scaling::Invariant,
            ScalingArg::Enhanced => Scaling::Enhanced,
        };
        let spec = match self.model.family {
            Family::Melonic => ModelSpec::melonic(self.model.rank.unwrap_or(3), scaling),
            Family::Full => ModelSpec::full_quartic(self.model.rank.unwrap_or(3), scaling),
            Family::Standard => ModelSpec::tft(self.model.rank.unwrap_or(3), self.eta()?),
            Family::Enhanced => {
                if self.model.rank.map_or(false, |r| r != 4) {
                    return Err(CliError::Usage("model.rank: the enhanced family has rank 4".into()));
                }
                ModelSpec::enhanced_tft(self.eta()?)
            }
        };
        spec.map_err(|e| CliError::Usage(format!("model: {e}")))
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Engine(Error),
    Io(String),
    ChecksFailed(usize),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Engine(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Engine(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "{m}"),
            CliError::ChecksFailed(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine(Error::BudgetExceeded { .. }) => EXIT_BUDGET,
            CliError::ChecksFailed(_) => EXIT_CHECK,
            _ => EXIT_USAGE,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "quartic", version, about = "Exact combinatorics and power counting for quartic tensor models")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct GlobalArgs {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Tensor rank.
    #[arg(long = "D", global = true)]
    pub rank: Option<usize>,
    #[arg(long, global = true)]
    pub family: Option<Family>,
    #[arg(long, global = true)]
    pub scaling: Option<ScalingArg>,
    #[arg(long, global = true)]
    pub eta: Option<String>,
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub precision: Option<usize>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List connected maps with a given number of edges and cilia.
    Enumerate {
        #[arg(long)]
        edges: Option<usize>,
        #[arg(long)]
        cilia: Option<usize>,
        /// Allow more edges than the default guard.
        #[arg(long)]
        accept_blowup: bool,
    },
    /// Compare generated plane-tree counts with the closed form, for 1..=v vertices.
    Count {
        #[arg(long)]
        v: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
    },
    /// Convert a graph JSON into a map JSON or back; the direction is read from the input.
    Transform {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Amplitude, N exponent and divergence degree of a map or graph.
    Amplitude {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Exact series from the map enumeration.
    Series {
        #[arg(long)]
        order: Option<u32>,
        #[arg(long)]
        cilia: Option<usize>,
        #[arg(long)]
        observable: Option<ObservableArg>,
    },
    /// Brute-force Wick expansion, compared with the map series.
    Oracle {
        #[arg(long)]
        order: Option<u32>,
        #[arg(long)]
        cilia: Option<usize>,
    },
    /// Renormalisability class of a field theory.
    Classify,
    /// Maps with non-negative divergence degree.
    Survey {
        #[arg(long)]
        edges: Option<usize>,
        #[arg(long)]
        cilia: Option<usize>,
    },
    /// Counterterm sums of the T^4_3 model at a cubic cutoff.
    T43 {
        #[arg(long)]
        cutoff: Option<i64>,
    },
    /// Run acceptance checks; exits with status 4 if any fails.
    Check {
        #[arg(long)]
        id: Vec<u8>,
    },
}

/// Layer the file and the flags over the defaults.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.global.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig::default(),
    };
    if let Ok(w) = std::env::var(WORKERS_ENV) {
        let w = w
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{WORKERS_ENV}: not a count: {w:?}")))?;
        cfg.workers = Some(w);
    }
    let g = &cli.global;
    if g.rank.is_some() {
        cfg.model.rank = g.rank;
    }
    set(&mut cfg.model.family, g.family);
    set(&mut cfg.model.scaling, g.scaling);
    set(&mut cfg.model.eta, g.eta.clone());
    set(&mut cfg.output.format, g.format);
    if g.out.is_some() {
        cfg.output.path = g.out.clone();
    }
    set(&mut cfg.output.precision, g.precision);
    if g.workers.is_some() {
        cfg.workers = g.workers;
    }
    set(&mut cfg.seed, g.seed);
    let p = &mut cfg.params;
    match &cli.command {
        Command::Enumerate { edges, cilia, accept_blowup } => {
            set(&mut p.edges, *edges);
            set(&mut p.cilia, *cilia);
            p.accept_blowup |= accept_blowup;
        }
        Command::Survey { edges, cilia } => {
            set(&mut p.edges, *edges);
            set(&mut p.cilia, *cilia);
        }
        Command::Count { v, k, q } => {
            set(&mut p.vertices, *v);
            set(&mut p.tree_cilia, *k);
            set(&mut p.colours, *q);
        }
        Command::Series { order, cilia, observable } => {
            set(&mut p.order, *order);
            set(&mut p.cilia, *cilia);
            set(&mut p.observable, *observable);
        }
        Command::Oracle { order, cilia } => {
            set(&mut p.order, *order);
            set(&mut p.cilia, *cilia);
        }
        Command::T43 { cutoff } => set(&mut p.cutoff, *cutoff),
        Command::Check { id } => {
            if !id.is_empty() {
                p.checks = id.clone();
            }
        }
        Command::Transform { .. } | Command::Amplitude { .. } | Command::Classify => {}
    }
    if cfg.workers == Some(0) {
        return Err(CliError::Usage("workers: must be at least 1".into()));
    }
    Ok(cfg)
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

/// A tabular report: column names and string cells.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// What a command produces: a table, or a raw JSON document (transform).
pub enum Output {
    Table(Table),
    Document(serde_json::Value),
}

pub fn render(cfg: &RunConfig, command: &str, out: &Output) -> String {
    let hash = cfg.hash();
    match (out, cfg.output.format) {
        (Output::Document(v), _) => format!("{}\n", serde_json::to_string_pretty(v).expect("json")),
        (Output::Table(t), Format::Csv) => {
            let mut s = format!("# quartic {VERSION} {command} config-sha256={hash}\n");
            s += &t.columns.join(",");
            s.push('\n');
            for r in &t.rows {
                s += &r.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(",");
                s.push('\n');
            }
            s
        }
        (Output::Table(t), Format::Json) => {
            let rows: Vec<serde_json::Map<String, serde_json::Value>> = t
                .rows
                .iter()
                .map(|r| {
                    t.columns
                        .iter()
                        .cloned()
                        .zip(r.iter().map(|c| serde_json::Value::String(c.clone())))
                        .collect()
                })
                .collect();
            let doc = serde_json::json!({
                "engine": format!("quartic {VERSION}"),
                "command": command,
                "config_sha256": hash,
                "rows": rows,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
        }
    }
}

fn csv_cell(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

fn float(cfg: &RunConfig, x: f64) -> String {
    format!("{:.*}", cfg.output.precision, x)
}

fn boundary_label(b: &BoundaryGraph) -> String {
    (1..=b.rank())
        .map(|c| b.tau(c).iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("|")
}

fn series_rows(t: &mut Table, prefix: &[String], s: &FormalSeries) {
    for r in s.rows() {
        let mut row = prefix.to_vec();
        row.push(r.degrees.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" "));
        row.push(r.n_exponent);
        row.push(format!("{}/{}", r.numerator, r.denominator));
        t.push(row);
    }
}

fn read_json(path: &Path) -> Result<serde_json::Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn is_map_json(v: &serde_json::Value) -> bool {
    v.get("half_edges").is_some()
}

fn load_map(path: &Path) -> Result<StrandedMap, CliError> {
    let v = read_json(path)?;
    if is_map_json(&v) {
        serde_json::from_value(v).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    } else {
        let g: ColouredGraph =
            serde_json::from_value(v).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Ok(graph_to_map(&g)?)
    }
}

/// Execute one command against a resolved configuration.
pub fn execute(cmd: &Command, cfg: &RunConfig) -> Result<Output, CliError> {
    let p = &cfg.params;
    match cmd {
        Command::Enumerate { .. } => {
            let spec = cfg.model_spec()?;
            let mut t = Table::new(&["index", "edges", "cilia", "vertices", "sigma", "colours", "weight", "omega"]);
            let mut err = None;
            let mut es = EnumSpec::connected(spec.clone(), p.edges, p.cilia);
            if p.accept_blowup {
                es.max_edges = es.max_edges.max(p.edges);
            }
            for_each_map(&es, |m, w| {
                let omega = match m.omega(&spec) {
                    Ok(o) => format_ratio64(o),
                    Err(e) => {
                        err.get_or_insert(e);
                        return;
                    }
                };
                let sigma = m.sigma().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
                let cols = m.edge_colours().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
                t.push(vec![
                    t.rows.len().to_string(),
                    m.n_edges().to_string(),
                    m.k().to_string(),
                    m.n_vertices().to_string(),
                    sigma,
                    cols,
                    w.to_string(),
                    omega,
                ]);
            })?;
            if let Some(e) = err {
                return Err(e.into());
            }
            Ok(Output::Table(t))
        }
        Command::Count { .. } => {
            let mut t = Table::new(&["v", "k", "q", "enumerated", "closed_form", "equal"]);
            for v in 1..=p.vertices {
                let a = count_trees_enumerated(v, p.tree_cilia, p.colours)?;
                let b = count_trees_closed_form(v, p.tree_cilia, p.colours);
                t.push(vec![
                    v.to_string(),
                    p.tree_cilia.to_string(),
                    p.colours.to_string(),
                    a.to_string(),
                    b.to_string(),
                    (a == b).to_string(),
                ]);
            }
            Ok(Output::Table(t))
        }
        Command::Transform { input } => {
            let v = read_json(input)?;
            let doc = if is_map_json(&v) {
                let m: StrandedMap =
                    serde_json::from_value(v).map_err(|e| CliError::Usage(format!("{}: {e}", input.display())))?;
                serde_json::to_value(map_to_graph(&m)?)
            } else {
                let g: ColouredGraph =
                    serde_json::from_value(v).map_err(|e| CliError::Usage(format!("{}: {e}", input.display())))?;
                serde_json::to_value(graph_to_map(&g)?)
            };
            Ok(Output::Document(doc.expect("json")))
        }
        Command::Amplitude { input } => {
            let spec = cfg.model_spec()?;
            let m = load_map(input)?;
            let mut t = Table::new(&["edges", "cilia", "internal_faces", "genus", "omega", "n_exponent", "coefficient", "divergence_degree"]);
            let (omega, n_exp, coef) = match spec.propagator {
                Propagator::Identity => {
                    let a = m.amplitude(&spec)?;
                    (format_ratio64(m.omega(&spec)?), format_ratio64(a.n_exponent), a.coefficient.to_string())
                }
                Propagator::PowerLaplacian { .. } => ("-".into(), "-".into(), "-".into()),
            };
            let degree = match spec.propagator {
                Propagator::Identity => "-".into(),
                Propagator::PowerLaplacian { eta } if spec.marked_necklaces => {
                    format_ratio64(max_degree_over_marks(eta, m.edge_colours(), &spec, &MapFaces::new(&m)))
                }
                Propagator::PowerLaplacian { .. } => format_ratio64(graph_divergence_degree(&map_to_graph(&m)?, &spec)?),
            };
            t.push(vec![
                m.n_edges().to_string(),
                m.k().to_string(),
                m.internal_faces().to_string(),
                m.genus().to_string(),
                omega,
                n_exp,
                coef,
                degree,
            ]);
            Ok(Output::Table(t))
        }
        Command::Series { .. } => {
            let spec = cfg.model_spec()?;
            let mut t = Table::new(&["boundary", "degrees", "n_exponent", "coefficient"]);
            match p.observable {
                ObservableArg::FreeEnergy | ObservableArg::Partition => {
                    let obs = if p.observable == ObservableArg::FreeEnergy {
                        Observable::FreeEnergy
                    } else {
                        Observable::Partition
                    };
                    series_rows(&mut t, &["-".into()], &assemble_series(&obs, &spec, p.order)?);
                }
                ObservableArg::Cumulant => {
                    for (b, s) in cumulants_by_boundary(&spec, p.cilia, p.order)?.values() {
                        series_rows(&mut t, &[boundary_label(b)], s);
                    }
                }
            }
            Ok(Output::Table(t))
        }
        Command::Oracle { .. } => {
            let spec = cfg.model_spec()?;
            let mut t = Table::new(&["boundary", "agrees", "degrees", "n_exponent", "coefficient"]);
            if p.cilia == 0 {
                let oracle = oracle_connected_vacuum(&spec, p.order as usize)?;
                let engine = assemble_series(&Observable::FreeEnergy, &spec, p.order)?;
                series_rows(&mut t, &["-".into(), (oracle == engine).to_string()], &oracle);
            } else {
                let engine = cumulants_by_boundary(&spec, p.cilia, p.order)?;
                for (b, s) in oracle_cumulants(&spec, p.order as usize, p.cilia)? {
                    let key = serde_json::to_string(&b).expect("boundary serialises");
                    let same = engine.get(&key).map_or(s.is_empty(), |(_, e)| *e == s);
                    series_rows(&mut t, &[boundary_label(&b), same.to_string()], &s);
                }
            }
            Ok(Output::Table(t))
        }
        Command::Classify => {
            let spec = cfg.model_spec()?;
            let c = classify_renormalisability(&spec)?;
            let mut t = Table::new(&["family", "D", "eta", "class", "slope", "bound"]);
            t.push(vec![
                format!("{:?}", cfg.model.family).to_lowercase(),
                spec.rank.to_string(),
                format_ratio64(cfg.eta()?),
                c.class.to_string(),
                c.slope,
                c.bound,
            ]);
            Ok(Output::Table(t))
        }
        Command::Survey { .. } => {
            let spec = cfg.model_spec()?;
            let s = divergence_survey(&spec, p.edges, p.cilia)?;
            let mut t = Table::new(&["id", "edges", "legs", "colours", "omega", "class", "boundary", "marks_internal", "marks_external"]);
            for r in s.reports {
                t.push(vec![
                    r.id,
                    r.edges.to_string(),
                    r.legs.to_string(),
                    r.colours.join(" "),
                    r.omega,
                    format!("{:?}", r.class).to_lowercase(),
                    r.boundary.as_ref().map_or("-".into(), boundary_label),
                    r.marks_internal.to_string(),
                    r.marks_external.to_string(),
                ]);
            }
            Ok(Output::Table(t))
        }
        Command::T43 { .. } => {
            let r = t43_counterterms(p.cutoff)?;
            let mut t = Table::new(&["cutoff", "delta_m", "trace_c", "delta_v1", "delta_v2", "delta_v3", "delta_v_mass", "identity_residual"]);
            t.push(vec![
                r.cutoff.to_string(),
                float(cfg, r.delta_m),
                float(cfg, r.trace_c),
                float(cfg, r.delta_v1),
                float(cfg, r.delta_v2),
                float(cfg, r.delta_v3),
                float(cfg, r.delta_v_mass),
                float(cfg, r.identity_residual),
            ]);
            Ok(Output::Table(t))
        }
        Command::Check { .. } => {
            let ids: Vec<u8> = if p.checks.is_empty() {
                (1..=NAMES.len() as u8).collect()
            } else {
                p.checks.clone()
            };
            let mut t = Table::new(&["id", "name", "result", "detail"]);
            for id in ids {
                let r: CheckReport = run_check(id)?;
                t.push(vec![
                    r.id.to_string(),
                    r.name.to_string(),
                    if r.passed { "PASS" } else { "FAIL" }.into(),
                    r.detail,
                ]);
            }
            Ok(Output::Table(t))
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Enumerate { .. } => "enumerate",
        Command::Count { .. } => "count",
        Command::Transform { .. } => "transform",
        Command::Amplitude { .. } => "amplitude",
        Command::Series { .. } => "series",
        Command::Oracle { .. } => "oracle",
        Command::Classify => "classify",
        Command::Survey { .. } => "survey",
        Command::T43 { .. } => "t43",
        Command::Check { .. } => "check",
    }
}

/// Resolve, execute, write.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve_config(cli)?;
    if let Some(w) = cfg.workers {
        // a second initialisation in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    let out = execute(&cli.command, &cfg)?;
    let text = render(&cfg, command_name(&cli.command), &out);
    match &cfg.output.path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        None => {
            use std::io::Write;
            match std::io::stdout().lock().write_all(text.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(CliError::Io(format!("stdout: {e}"))),
                _ => {}
            }
        }
    }
    if let Output::Table(t) = &out {
        let failed = t.rows.iter().filter(|r| r.iter().any(|c| c == "FAIL")).count();
        if matches!(cli.command, Command::Check { .. }) && failed > 0 {
            return Err(CliError::ChecksFailed(failed));
        }
    }
    Ok(())
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("quartic: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(args: &[&str]) -> (RunConfig, Table) {
        let cli = Cli::try_parse_from(std::iter::once("quartic").chain(args.iter().copied())).unwrap();
        let cfg = resolve_config(&cli).unwrap();
        match execute(&cli.command, &cfg).unwrap() {
            Output::Table(t) => (cfg, t),
            Output::Document(_) => panic!("expected a table"),
        }
    }

    #[test]
    fn count_rows_match_closed_form() {
        let (_, t) = table(&["count", "--v", "7", "--k", "1", "--q", "3"]);
        assert_eq!(t.rows.len(), 7);
        assert!(t.rows.iter().all(|r| r[5] == "true"));
    }

    #[test]
    fn classify_standard_d5() {
        let (_, t) = table(&["classify", "--family", "standard", "--D", "5"]);
        assert_eq!(t.rows[0][3], "just-renormalisable");
    }

    #[test]
    fn config_round_trips() {
        let mut cfg = RunConfig::default();
        cfg.model.family = Family::Enhanced;
        cfg.model.eta = "3/4".into();
        cfg.params.checks = vec![1, 3];
        cfg.output.path = Some("out.csv".into());
        cfg.workers = Some(2);
        let back = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
    }

    #[test]
    fn flag_beats_file_beats_default() {
        let dir = std::env::temp_dir().join(format!("quartic-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.toml");
        std::fs::write(&path, "[model]\nrank = 4\n[params]\norder = 1\ncilia = 1\n").unwrap();
        let p = path.to_str().unwrap();
        let cli = Cli::try_parse_from(["quartic", "--config", p, "series", "--order", "2"]).unwrap();
        let cfg = resolve_config(&cli).unwrap();
        assert_eq!(cfg.model.rank, Some(4));
        assert_eq!(cfg.params.order, 2);
        assert_eq!(cfg.params.cilia, 1);
        assert_eq!(cfg.params.edges, Params::default().edges);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn unknown_config_field_is_a_usage_error() {
        let e = RunConfig::from_toml("[model]\nrnak = 3\n").unwrap_err();
        assert_eq!(e.exit_code(), EXIT_USAGE);
        assert!(e.to_string().contains("rnak"));
    }

    #[test]
    fn budget_errors_exit_3() {
        let cli = Cli::try_parse_from(["quartic", "enumerate", "--edges", "40"]).unwrap();
        let cfg = resolve_config(&cli).unwrap();
        let e = execute(&cli.command, &cfg).err().unwrap();
        assert_eq!(e.exit_code(), EXIT_BUDGET);
    }

    #[test]
    fn reports_are_deterministic() {
        let args = ["series", "--order", "2", "--cilia", "1", "--observable", "cumulant", "--D", "3"];
        let (c1, t1) = table(&args);
        let (c2, t2) = table(&args);
        let a = render(&c1, "series", &Output::Table(t1));
        let b = render(&c2, "series", &Output::Table(t2));
        assert_eq!(a, b);
        assert!(a.starts_with(&format!("# quartic {VERSION} series config-sha256=")));
    }

    #[test]
    fn oracle_agrees_with_engine() {
        let (_, t) = table(&["oracle", "--order", "2", "--D", "3"]);
        assert!(!t.rows.is_empty());
        assert!(t.rows.iter().all(|r| r[1] == "true"));
    }

    #[test]
    fn json_report_embeds_hash() {
        let (cfg, t) = table(&["t43", "--cutoff", "2", "--format", "json"]);
        let text = render(&cfg, "t43", &Output::Table(t));
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["config_sha256"], cfg.hash());
        assert_eq!(v["rows"][0]["cutoff"], "2");
    }
}
