//! `bench`: solve the same instance over consecutive seeds per method.
//!
//! Layout of the output directory:
//!
//! ```text
//! runs/<method>/seed-<n>/{report.json,timing.json,allocation.json}
//! table.json   per-method columns plus every run summary
//! table.txt    the formatted table
//! ```
//!
//! `bench --from DIR` rebuilds both tables from `runs/` alone.

use crate::{read_bytes, write_file, CliError, DistanceArgs, SolverArgs};
use clap::Args;
use rayon::prelude::*;
use seatalloc::pipeline::{self, PipelineError};
use seatalloc::report::{bench_column, format_table, BenchColumn, RunReport, RunSummary, Timing};
use seatalloc::rng::derive_seed;
use seatalloc::Method;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const DEFAULT_METHODS: [Method; 5] = [Method::Ica, Method::IcaPlusPlus, Method::Gsa, Method::IcaLs, Method::GsaLs];

#[derive(Args, Debug)]
pub struct BenchCmd {
    #[arg(long, required_unless_present = "from")]
    pub plan: Option<PathBuf>,
    #[arg(long, required_unless_present = "from")]
    pub hierarchy: Option<PathBuf>,
    #[arg(long, required_unless_present = "from")]
    pub out: Option<PathBuf>,
    /// Comma-separated engines; defaults to every engine but ipsa.
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<Method>,
    #[arg(long, default_value_t = 30)]
    pub runs: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Recompute the tables from an earlier bench directory and print them.
    #[arg(long, conflicts_with_all = ["plan", "hierarchy", "out"])]
    pub from: Option<PathBuf>,
    /// With --from: fail unless the recomputed tables equal the stored ones.
    #[arg(long, requires = "from")]
    pub verify: bool,
    /// Runs use seeds --seed, --seed + 1, ...
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub distances: DistanceArgs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodRuns {
    pub method: Method,
    pub runs: Vec<RunSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchTable {
    pub columns: Vec<BenchColumn>,
    pub methods: Vec<MethodRuns>,
}

impl BenchTable {
    pub fn new(mut methods: Vec<MethodRuns>) -> Self {
        for m in &mut methods {
            m.runs.sort_by_key(|r| r.seed);
        }
        let columns = methods.iter().map(|m| bench_column(m.method.as_str(), &m.runs)).collect();
        Self { columns, methods }
    }

    pub fn text(&self) -> String {
        format_table(&self.columns)
    }

    pub fn json(&self) -> String {
        pipeline::to_json_pretty(self)
    }
}

fn run_dir(out: &Path, method: Method, seed: u64) -> PathBuf {
    out.join("runs").join(method.as_str()).join(format!("seed-{seed}"))
}

fn bench_fresh(cmd: &BenchCmd, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (Some(plan_path), Some(h_path), Some(out)) = (&cmd.plan, &cmd.hierarchy, &cmd.out) else {
        return Err(CliError::Usage("bench needs --plan, --hierarchy and --out".into()));
    };
    if cmd.runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    let mut base = cmd.solver.resolve(&cmd.distances)?;
    // Canonical engine order, so fresh and recomputed tables agree.
    let wanted: &[Method] = if cmd.methods.is_empty() { &DEFAULT_METHODS } else { &cmd.methods };
    let methods: Vec<Method> = Method::ALL.into_iter().filter(|m| wanted.contains(m)).collect();
    let plan = crate::load_plan(plan_path)?;
    let h = crate::load_hierarchy(h_path)?;
    pipeline::precheck(&plan, &h)?;

    // One roadmap for every run, so runs differ only in solver randomness.
    let first_seed = base.params.seed;
    base.distances.seed = Some(base.distances.seed.unwrap_or_else(|| derive_seed(first_seed, "roadmap")));
    let mut distances = pipeline::build_distances(&plan, &base.distances, first_seed, cmd.distances.cache())?;
    distances.seconds = 0.0;

    let jobs: Vec<(Method, u64)> = methods
        .iter()
        .flat_map(|&m| (0..cmd.runs).map(move |k| (m, first_seed + k)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cmd.jobs)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let results: Vec<Result<pipeline::Artifacts, PipelineError>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(method, seed)| {
                let mut cfg = base.clone();
                cfg.method = method;
                cfg.params.seed = seed;
                pipeline::solve_with(&plan, &h, &cfg, &distances)
            })
            .collect()
    });

    let mut per_method: Vec<MethodRuns> = methods
        .iter()
        .map(|&method| MethodRuns { method, runs: Vec::new() })
        .collect();
    let mut staged = out.as_os_str().to_owned();
    staged.push(".partial");
    let staging = PathBuf::from(staged);
    let _ = fs::remove_dir_all(&staging);
    let written = (|| -> Result<BenchTable, CliError> {
        for (&(method, seed), result) in jobs.iter().zip(results) {
            let a = result?;
            let dir = run_dir(&staging, method, seed);
            fs::create_dir_all(&dir).map_err(|source| CliError::Write { path: dir.clone(), source })?;
            write_file(&dir.join("report.json"), &a.report_json)?;
            write_file(&dir.join("timing.json"), &a.timing_json)?;
            write_file(&dir.join("allocation.json"), &a.allocation_json)?;
            let slot = per_method.iter_mut().find(|m| m.method == method).expect("method listed");
            slot.runs.push(RunSummary::new(seed, &a.report, &a.timing));
        }
        let table = BenchTable::new(per_method);
        write_file(&staging.join("table.json"), table.json())?;
        write_file(&staging.join("table.txt"), table.text())?;
        if out.exists() {
            fs::remove_dir_all(out).map_err(|source| CliError::Write { path: out.clone(), source })?;
        }
        fs::rename(&staging, out).map_err(|source| CliError::Write { path: out.clone(), source })?;
        Ok(table)
    })();
    let table = written.inspect_err(|_| {
        let _ = fs::remove_dir_all(&staging);
    })?;
    let _ = write!(stdout, "{}", table.text());
    Ok(())
}

/// Rebuilds the table from stored per-run reports. Methods follow the
/// engine order of [`Method::ALL`]; runs are sorted by seed.
pub fn table_from_dir(dir: &Path) -> Result<BenchTable, CliError> {
    let runs_dir = dir.join("runs");
    let mut methods = Vec::new();
    for method in Method::ALL {
        let mdir = runs_dir.join(method.as_str());
        if !mdir.is_dir() {
            continue;
        }
        let entries = fs::read_dir(&mdir).map_err(|source| CliError::Read { path: mdir.clone(), source })?;
        let mut runs = Vec::new();
        for entry in entries {
            let path = entry.map_err(|source| CliError::Read { path: mdir.clone(), source })?.path();
            let Some(seed) = path
                .file_name()
                .and_then(|n| n.to_str())
                .and_then(|n| n.strip_prefix("seed-"))
                .and_then(|n| n.parse::<u64>().ok())
            else {
                continue;
            };
            let report: RunReport = crate::read_json(&path.join("report.json"))?;
            let timing: Timing = crate::read_json(&path.join("timing.json"))?;
            runs.push(RunSummary::new(seed, &report, &timing));
        }
        methods.push(MethodRuns { method, runs });
    }
    if methods.is_empty() {
        return Err(CliError::Usage(format!("no runs under {}", runs_dir.display())));
    }
    Ok(BenchTable::new(methods))
}

fn bench_from(dir: &Path, verify: bool, stdout: &mut dyn Write) -> Result<(), CliError> {
    let table = table_from_dir(dir)?;
    if verify {
        for (name, fresh) in [("table.txt", table.text()), ("table.json", table.json())] {
            let stored = read_bytes(&dir.join(name))?;
            if stored != fresh.as_bytes() {
                return Err(CliError::Check(format!("{name} differs from the recomputed table")));
            }
        }
    }
    let _ = write!(stdout, "{}", table.text());
    Ok(())
}

pub fn run(cmd: &BenchCmd, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cmd.from {
        Some(dir) => bench_from(dir, cmd.verify, stdout),
        None => bench_fresh(cmd, stdout),
    }
}
