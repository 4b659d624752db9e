//! On-disk state: plans and results are content-addressed, scenarios are
//! one JSON file each.
//!
//! ```text
//! <root>/plans/<plan-hash>.json
//! <root>/scenarios/<id>.json
//! <root>/results/<result-key>/{allocation.json,report.json,timing.json,level-N.svg}
//! <root>/cache/<distance-key>.dm
//! ```

use seatalloc::hierarchy::TeamEntry;
use seatalloc::pipeline::{Artifacts, ErrorDocument, SolveConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Draft,
    Queued,
    Running,
    Done,
    Failed,
}

impl Status {
    /// Forward edges of the status machine. Leaving `Done` or `Failed`
    /// happens only through [`Scenario::reset`].
    pub fn can_become(self, next: Status) -> bool {
        matches!(
            (self, next),
            (Status::Draft, Status::Queued)
                | (Status::Queued, Status::Running)
                | (Status::Running, Status::Done)
                | (Status::Running, Status::Failed)
        )
    }

    pub fn is_busy(self) -> bool {
        matches!(self, Status::Queued | Status::Running)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    /// Content hash of the uploaded plan.
    pub plan: String,
    pub hierarchy: Vec<TeamEntry>,
    pub config: SolveConfig,
    pub status: Status,
    /// Incremented by every submitted solve.
    pub revision: u64,
    /// Result directory key; set iff `status` is `Done`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorDocument>,
    /// Unix seconds.
    pub created: f64,
    pub updated: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub started: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finished: Option<f64>,
}

impl Scenario {
    pub fn new(id: String, plan: String, hierarchy: Vec<TeamEntry>, config: SolveConfig) -> Self {
        let t = now();
        Self {
            id,
            plan,
            hierarchy,
            config,
            status: Status::Draft,
            revision: 0,
            result: None,
            error: None,
            created: t,
            updated: t,
            started: None,
            finished: None,
        }
    }

    pub fn transition(&mut self, next: Status) -> Result<(), Status> {
        if !self.status.can_become(next) {
            return Err(self.status);
        }
        let t = now();
        match next {
            Status::Running => self.started = Some(t),
            Status::Done | Status::Failed => self.finished = Some(t),
            _ => {}
        }
        self.status = next;
        self.updated = t;
        Ok(())
    }

    /// Back to `Draft`, dropping any previous result.
    pub fn reset(&mut self) {
        debug_assert!(!self.status.is_busy());
        self.status = Status::Draft;
        self.result = None;
        self.error = None;
        self.started = None;
        self.finished = None;
        self.updated = now();
    }

    pub fn elapsed(&self) -> Option<f64> {
        let start = self.started?;
        Some(self.finished.unwrap_or_else(now) - start)
    }

    /// Content address of this scenario's inputs.
    pub fn result_key(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.plan.as_bytes());
        h.update(b"\n");
        h.update(serde_json::to_vec(&self.hierarchy).expect("entries serialize"));
        h.update(b"\n");
        h.update(serde_json::to_vec(&self.config).expect("config serializes"));
        hex::encode(h.finalize())
    }
}

pub fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

#[derive(Clone, Debug)]
pub struct Store {
    root: PathBuf,
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> io::Result<Self> {
        let root = root.into();
        for sub in ["plans", "scenarios", "results", "cache"] {
            fs::create_dir_all(root.join(sub))?;
        }
        Ok(Self { root })
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.root.join("cache")
    }

    pub fn plan_path(&self, hash: &str) -> PathBuf {
        self.root.join("plans").join(format!("{hash}.json"))
    }

    pub fn result_dir(&self, key: &str) -> PathBuf {
        self.root.join("results").join(key)
    }

    pub fn write_plan(&self, hash: &str, json: &str) -> io::Result<()> {
        write_atomic(&self.plan_path(hash), json.as_bytes())
    }

    pub fn plan_hashes(&self) -> io::Result<Vec<String>> {
        stems(&self.root.join("plans"))
    }

    pub fn write_scenario(&self, s: &Scenario) -> io::Result<()> {
        let json = serde_json::to_vec_pretty(s).map_err(io::Error::other)?;
        write_atomic(&self.root.join("scenarios").join(format!("{}.json", s.id)), &json)
    }

    pub fn load_scenarios(&self) -> io::Result<Vec<Scenario>> {
        let dir = self.root.join("scenarios");
        let mut out = Vec::new();
        for id in stems(&dir)? {
            let bytes = fs::read(dir.join(format!("{id}.json")))?;
            out.push(serde_json::from_slice(&bytes).map_err(io::Error::other)?);
        }
        Ok(out)
    }

    pub fn has_result(&self, key: &str) -> bool {
        self.result_dir(key).join("report.json").is_file()
    }

    /// Writes into a temporary sibling directory, then renames, so readers
    /// never see a partial result.
    pub fn write_result(&self, key: &str, a: &Artifacts) -> io::Result<()> {
        let dir = self.result_dir(key);
        if dir.is_dir() {
            return Ok(());
        }
        let tmp = self.root.join("results").join(format!(".{key}.{}", std::process::id()));
        let _ = fs::remove_dir_all(&tmp);
        fs::create_dir_all(&tmp)?;
        fs::write(tmp.join("allocation.json"), &a.allocation_json)?;
        fs::write(tmp.join("report.json"), &a.report_json)?;
        fs::write(tmp.join("timing.json"), &a.timing_json)?;
        for (level, svg) in a.svgs.iter().enumerate() {
            fs::write(tmp.join(format!("level-{level}.svg")), svg)?;
        }
        match fs::rename(&tmp, &dir) {
            Ok(()) => Ok(()),
            Err(_) if dir.is_dir() => fs::remove_dir_all(&tmp),
            Err(e) => Err(e),
        }
    }

    pub fn read_result_file(&self, key: &str, name: &str) -> io::Result<Vec<u8>> {
        fs::read(self.result_dir(key).join(name))
    }
}

fn stems(dir: &Path) -> io::Result<Vec<String>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "json") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                out.push(stem.to_string());
            }
        }
    }
    out.sort();
    Ok(out)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}
