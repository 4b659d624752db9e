//! Bundled fixture documents, generated from the synthetic plans.

use crate::{write_file, CliError, FixturesCmd};
use seatalloc::synth;
use std::io::Write;
use std::path::Path;

/// File name and contents of every fixture.
pub fn documents() -> Vec<(&'static str, String)> {
    let mut docs = vec![
        ("office.plan.json", synth::office_floor().to_json()),
        ("office.hierarchy.json", synth::company_hierarchy().to_json()),
        ("quadrants.plan.json", synth::walled_quadrants().to_json()),
        ("quadrants.hierarchy.json", synth::quadrant_teams().to_json()),
        ("medium.plan.json", synth::medium_floor().to_json()),
        ("medium.hierarchy.json", synth::medium_hierarchy().to_json()),
        ("eight-leaf.hierarchy.json", synth::eight_leaf_hierarchy().to_json()),
    ];
    for (_, body) in &mut docs {
        if !body.ends_with('\n') {
            body.push('\n');
        }
    }
    docs
}

/// Names of fixtures whose file differs from the generated document.
pub fn drift(dir: &Path) -> Vec<&'static str> {
    documents()
        .into_iter()
        .filter(|(name, body)| std::fs::read(dir.join(name)).ok().as_deref() != Some(body.as_bytes()))
        .map(|(name, _)| name)
        .collect()
}

pub fn run(cmd: &FixturesCmd, stdout: &mut dyn Write) -> Result<(), CliError> {
    if cmd.check {
        let stale = drift(&cmd.dir);
        if !stale.is_empty() {
            return Err(CliError::Check(format!("stale fixtures: {}", stale.join(", "))));
        }
        return Ok(());
    }
    std::fs::create_dir_all(&cmd.dir).map_err(|source| CliError::Write {
        path: cmd.dir.clone(),
        source,
    })?;
    for (name, body) in documents() {
        write_file(&cmd.dir.join(name), body)?;
        let _ = writeln!(stdout, "{}", cmd.dir.join(name).display());
    }
    Ok(())
}
