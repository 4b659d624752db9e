//! `seatalloc` command-line driver.
//!
//! Exit codes: 0 ok, 2 configuration (bad flags, unreadable input files),
//! 3 validation (malformed plan or hierarchy), 4 infeasible, 5 internal.
//! Failures print one JSON error document on stderr.

pub mod bench;
pub mod fixtures;

use clap::{Args, Parser, Subcommand};
use seatalloc::floorplan::FloorPlan;
use seatalloc::hierarchy::Hierarchy;
use seatalloc::model::{InitMethod, RegretMode};
use seatalloc::pipeline::{self, DistanceMode, ErrorClass, ErrorDocument, PipelineError, SolveConfig};
use seatalloc::render::{render_svg, RenderOptions};
use seatalloc::roadmap::generate_prm;
use seatalloc::Method;
use serde::de::DeserializeOwned;
use serde_json::json;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "seatalloc", version, about = "Hierarchical seat allocation on floor plans")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build (or load) the seat distance matrix for a plan.
    Distances(DistancesCmd),
    /// Allocate a hierarchy onto a plan and write report, allocation and renderings.
    Solve(SolveCmd),
    /// Repeat `solve` over consecutive seeds per method and tabulate mean ± standard error.
    Bench(bench::BenchCmd),
    /// Run the HTTP scenario service.
    Serve(ServeCmd),
    /// Compare exact engines against brute force on small random instances.
    #[command(hide = true)]
    Oracle(OracleCmd),
    /// Regenerate the bundled fixture documents.
    #[command(hide = true)]
    Fixtures(FixturesCmd),
}

#[derive(Args, Debug, Clone, Default)]
pub struct DistanceArgs {
    /// prm or euclidean.
    #[arg(long = "distance-mode", value_parser = enum_arg::<DistanceMode>)]
    pub mode: Option<DistanceMode>,
    /// Roadmap node budget K.
    #[arg(long)]
    pub max_nodes: Option<usize>,
    /// Exploration cast length.
    #[arg(long)]
    pub cast_step: Option<f64>,
    /// Seat connection radius.
    #[arg(long)]
    pub seat_radius: Option<f64>,
    /// Roadmap seed; derived from --seed when absent.
    #[arg(long)]
    pub roadmap_seed: Option<u64>,
    /// Distance cache directory.
    #[arg(long, env = "SEATALLOC_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub no_cache: bool,
}

impl DistanceArgs {
    fn apply(&self, cfg: &mut pipeline::DistanceConfig) {
        if let Some(m) = self.mode {
            cfg.mode = m;
        }
        cfg.max_nodes = self.max_nodes.or(cfg.max_nodes);
        cfg.cast_step = self.cast_step.or(cfg.cast_step);
        cfg.seat_radius = self.seat_radius.or(cfg.seat_radius);
        cfg.seed = self.roadmap_seed.or(cfg.seed);
    }

    fn cache(&self) -> Option<&Path> {
        if self.no_cache {
            None
        } else {
            self.cache_dir.as_deref()
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct SolverArgs {
    /// JSON solve configuration; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// ipsa, ica, ica++, gsa, ica+ls or gsa+ls.
    #[arg(long)]
    pub method: Option<Method>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Allocate desks top-down, then offices by one assignment over leaf teams.
    #[arg(long)]
    pub delayed_office: bool,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Seconds per sub-problem.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Local search neighbours per central (s_n).
    #[arg(long)]
    pub neighbors: Option<usize>,
    /// random or kmeans++.
    #[arg(long, value_parser = enum_arg::<InitMethod>)]
    pub init: Option<InitMethod>,
    /// classic or inverted.
    #[arg(long, value_parser = enum_arg::<RegretMode>)]
    pub regret: Option<RegretMode>,
    /// Branch-and-bound node cap for ipsa and local search.
    #[arg(long)]
    pub node_limit: Option<u64>,
}

impl SolverArgs {
    pub fn resolve(&self, distances: &DistanceArgs) -> Result<SolveConfig, CliError> {
        let mut cfg: SolveConfig = match &self.config {
            Some(path) => read_json(path)?,
            None => SolveConfig::default(),
        };
        if let Some(m) = self.method {
            cfg.method = m;
        }
        let p = &mut cfg.params;
        p.seed = self.seed.unwrap_or(p.seed);
        p.max_iterations = self.max_iterations.unwrap_or(p.max_iterations);
        p.time_limit = self.time_limit.unwrap_or(p.time_limit);
        p.neighbors = self.neighbors.unwrap_or(p.neighbors);
        p.init = self.init.unwrap_or(p.init);
        p.regret = self.regret.unwrap_or(p.regret);
        p.node_limit = self.node_limit.or(p.node_limit);
        cfg.delayed_office |= self.delayed_office;
        distances.apply(&mut cfg.distances);
        cfg.params.validate().map_err(|m| CliError::Usage(m))?;
        Ok(cfg)
    }
}

fn enum_arg<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
pub struct DistancesCmd {
    #[arg(long)]
    pub plan: PathBuf,
    /// Solver seed the roadmap seed is derived from.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub distances: DistanceArgs,
    /// Also write the matrix in cache format to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Render the roadmap over the plan.
    #[arg(long)]
    pub roadmap_svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveCmd {
    #[arg(long)]
    pub plan: PathBuf,
    #[arg(long)]
    pub hierarchy: PathBuf,
    /// Output directory; created on success only.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub distances: DistanceArgs,
}

#[derive(Args, Debug)]
pub struct ServeCmd {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: std::net::SocketAddr,
    #[arg(long, env = "SEATALLOC_DATA_DIR", default_value = "seatalloc-data")]
    pub data_dir: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Args, Debug)]
pub struct OracleCmd {
    #[arg(long, default_value_t = 200)]
    pub instances: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct FixturesCmd {
    #[arg(long, default_value = "fixtures")]
    pub dir: PathBuf,
    /// Compare instead of writing; exit 5 on drift.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("{} is not valid JSON for this input: {source}", path.display())]
    Document { path: PathBuf, source: serde_json::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("{0}")]
    Check(String),
    #[error("service failed: {0}")]
    Service(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self.class() {
            ErrorClass::Config => EXIT_CONFIG,
            ErrorClass::Validation => EXIT_VALIDATION,
            ErrorClass::Infeasible => EXIT_INFEASIBLE,
            ErrorClass::Internal => EXIT_INTERNAL,
        }
    }

    fn class(&self) -> ErrorClass {
        match self {
            CliError::Usage(_) | CliError::Read { .. } | CliError::Document { .. } => ErrorClass::Config,
            CliError::Pipeline(e) => e.class(),
            CliError::Write { .. } | CliError::Check(_) | CliError::Service(_) => ErrorClass::Internal,
        }
    }

    pub fn to_document(&self) -> ErrorDocument {
        match self {
            CliError::Pipeline(e) => e.to_document(),
            other => ErrorDocument {
                class: other.class(),
                message: other.to_string(),
                path: None,
                violations: Vec::new(),
            },
        }
    }
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_slice(&read_bytes(path)?).map_err(|source| CliError::Document {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_plan(path: &Path) -> Result<FloorPlan, CliError> {
    Ok(FloorPlan::from_slice(&read_bytes(path)?).map_err(PipelineError::from)?)
}

pub fn load_hierarchy(path: &Path) -> Result<Hierarchy, CliError> {
    Ok(Hierarchy::from_slice(&read_bytes(path)?).map_err(PipelineError::from)?)
}

pub fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes every artifact of a run into `out`. Files go to a temporary
/// sibling first so a failed write leaves no partial directory behind.
pub fn write_artifacts(out: &Path, a: &pipeline::Artifacts) -> Result<(), CliError> {
    let werr = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Write { path, source }
    };
    let parent = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(parent).map_err(werr(parent))?;
    let name = out.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = parent.join(format!(".{name}.partial{}", std::process::id()));
    let _ = fs::remove_dir_all(&tmp);
    let result = (|| {
        fs::create_dir_all(&tmp).map_err(werr(&tmp))?;
        write_file(&tmp.join("allocation.json"), &a.allocation_json)?;
        write_file(&tmp.join("report.json"), &a.report_json)?;
        write_file(&tmp.join("timing.json"), &a.timing_json)?;
        for (level, svg) in a.svgs.iter().enumerate() {
            write_file(&tmp.join(format!("level-{level}.svg")), svg)?;
        }
        if out.exists() {
            fs::remove_dir_all(out).map_err(werr(out))?;
        }
        fs::rename(&tmp, out).map_err(werr(out))
    })();
    if result.is_err() {
        let _ = fs::remove_dir_all(&tmp);
    }
    result
}

fn cmd_distances(cmd: &DistancesCmd, stdout: &mut dyn Write) -> Result<(), CliError> {
    let plan = load_plan(&cmd.plan)?;
    let mut cfg = pipeline::DistanceConfig::default();
    cmd.distances.apply(&mut cfg);
    let d = pipeline::build_distances(&plan, &cfg, cmd.seed, cmd.distances.cache())?;
    if let Some(out) = &cmd.out {
        let mut buf = Vec::new();
        d.matrix
            .write_cache(&mut buf)
            .map_err(|e| CliError::Write { path: out.clone(), source: io::Error::other(e) })?;
        write_file(out, buf)?;
    }
    let mut roadmap_stats = None;
    if let Some(svg_path) = &cmd.roadmap_svg {
        if cfg.mode != DistanceMode::Prm {
            return Err(CliError::Usage("--roadmap-svg needs --distance-mode prm".into()));
        }
        let roadmap = match d.roadmap {
            Some(ref r) => r.clone(),
            None => generate_prm(&plan, &cfg.roadmap_params(&plan, cmd.seed)).map_err(PipelineError::from)?,
        };
        let svg = render_svg(
            &plan,
            RenderOptions {
                roadmap: Some(&roadmap),
                ..Default::default()
            },
        )
        .map_err(PipelineError::from)?;
        write_file(svg_path, svg)?;
        roadmap_stats = Some((roadmap.nodes().len(), roadmap.edges().len()));
    } else if let Some(r) = &d.roadmap {
        roadmap_stats = Some((r.nodes().len(), r.edges().len()));
    }
    let doc = json!({
        "seats": d.matrix.len(),
        "distances": d.echo,
        "cache_hit": d.cache_hit,
        "roadmap_nodes": roadmap_stats.map(|s| s.0),
        "roadmap_edges": roadmap_stats.map(|s| s.1),
        "seconds": d.seconds,
    });
    let _ = writeln!(stdout, "{doc}");
    Ok(())
}

fn cmd_solve(cmd: &SolveCmd, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = cmd.solver.resolve(&cmd.distances)?;
    let plan = load_plan(&cmd.plan)?;
    let h = load_hierarchy(&cmd.hierarchy)?;
    let a = pipeline::run(&plan, &h, &cfg, cmd.distances.cache())?;
    write_artifacts(&cmd.out, &a)?;
    let doc = json!({
        "out": cmd.out,
        "levels": a.report.levels,
        "averaged": a.report.averaged,
        "vacant_seats": a.report.vacant_seats,
        "seconds": a.timing.total_seconds,
    });
    let _ = writeln!(stdout, "{doc}");
    Ok(())
}

fn cmd_serve(cmd: &ServeCmd) -> Result<(), CliError> {
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Service(e.to_string()))?;
    let cfg = seatalloc_service::ServiceConfig {
        data_dir: cmd.data_dir.clone(),
        workers: cmd.workers,
    };
    eprintln!("listening on http://{}", cmd.addr);
    rt.block_on(seatalloc_service::serve(cmd.addr, cfg))
        .map_err(|e| CliError::Service(e.to_string()))
}

fn cmd_oracle(cmd: &OracleCmd, stdout: &mut dyn Write) -> Result<(), CliError> {
    use seatalloc::oracle::brute_force_sa;
    use seatalloc::solvers::ipsa_solve;
    let params = seatalloc::SolverParams::default();
    let mut mismatches = Vec::new();
    for k in 0..cmd.instances {
        let seed = cmd.seed + k;
        let p = seatalloc::synth::tiny_instance(seed);
        let exact = brute_force_sa(&p).map_err(|e| CliError::Check(e.to_string()))?;
        let got = ipsa_solve(&p, &params).map_err(|e| CliError::Check(e.to_string()))?;
        if (exact.objective - got.objective).abs() > 1e-9 {
            mismatches.push(json!({ "seed": seed, "brute_force": exact.objective, "ipsa": got.objective }));
        }
    }
    let _ = writeln!(
        stdout,
        "{}",
        json!({ "instances": cmd.instances, "mismatches": mismatches })
    );
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!("{} instances disagree with brute force", mismatches.len())))
    }
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Distances(c) => cmd_distances(c, stdout),
        Command::Solve(c) => cmd_solve(c, stdout),
        Command::Bench(c) => bench::run(c, stdout),
        Command::Serve(c) => cmd_serve(c),
        Command::Oracle(c) => cmd_oracle(c, stdout),
        Command::Fixtures(c) => fixtures::run(c, stdout),
    }
}

/// Parses `args`, runs, and reports failures on stderr; returns the exit code.
pub fn main_with(args: impl IntoIterator<Item = std::ffi::OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let mut stdout = io::stdout().lock();
    match execute(&cli, &mut stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let doc = json!({ "error": e.to_document() });
            eprintln!("{doc}");
            e.exit_code()
        }
    }
}
