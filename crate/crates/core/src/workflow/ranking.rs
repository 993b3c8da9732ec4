use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::jobs::{job_stats, read_jobs};
use super::WorkflowError;
use crate::pipeline::{format_row, merge_outputs, read_rows, OutputRow};

pub const MERGED_FILE: &str = "merged.tsv";
pub const RANKING_FILE: &str = "ranking.tsv";

/// Descending score, ties by SMILES.
pub fn rank_rows(rows: &mut [OutputRow]) {
    rows.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.smiles.cmp(&b.smiles)));
}

/// Concatenates the job outputs of a pocket directory in job order and
/// writes the sorted ranking. Returns the ranking path and row count.
pub fn cmd_merge(dir: &Path) -> Result<(PathBuf, usize), WorkflowError> {
    let jobs = read_jobs(dir)?;
    let missing: Vec<String> = jobs
        .iter()
        .filter(|j| !j.plan.output_path.is_file())
        .map(|j| format!("job {} (rank {}/{} of {})", j.id, j.plan.rank, j.plan.n_ranks, j.plan.input_path.display()))
        .collect();
    if !missing.is_empty() {
        return Err(WorkflowError::Input(format!("missing job outputs: {}", missing.join("; "))));
    }
    let paths: Vec<&Path> = jobs.iter().map(|j| j.plan.output_path.as_path()).collect();
    let merged = dir.join(MERGED_FILE);
    merge_outputs(&paths, &merged).map_err(|e| WorkflowError::Runtime(e.to_string()))?;
    let mut rows = read_rows(&merged).map_err(|e| WorkflowError::Input(e.to_string()))?;
    rank_rows(&mut rows);
    let ranking = dir.join(RANKING_FILE);
    let text: String = rows.iter().map(format_row).collect();
    fs::write(&ranking, text).map_err(|e| WorkflowError::runtime_io(&ranking, e))?;
    Ok((ranking, rows.len()))
}

/// The first `k` rows of a ranking.
pub fn cmd_top(ranking: &Path, k: usize) -> Result<Vec<OutputRow>, WorkflowError> {
    let mut rows = read_rows(ranking).map_err(|e| WorkflowError::Input(e.to_string()))?;
    rows.truncate(k);
    Ok(rows)
}

const SUMMED: &[&str] = &[
    "ligands",
    "skipped_records",
    "dock_errors",
    "chunks",
    "bytes_read",
    "rows_written",
    "bytes_written",
    "write_calls",
    "reader_busy_s",
    "splitter_busy_s",
    "docker_busy_s",
    "writer_busy_s",
    "wall_s",
];

/// Totals over the per-job stats reports of a pocket directory.
pub fn cmd_stats(dir: &Path) -> Result<String, WorkflowError> {
    let jobs = read_jobs(dir)?;
    let mut totals: BTreeMap<&str, f64> = BTreeMap::new();
    let mut max_wall: f64 = 0.0;
    let mut reported = 0;
    for job in &jobs {
        let path = job_stats(dir, job.id);
        let Ok(text) = fs::read_to_string(&path) else {
            continue;
        };
        reported += 1;
        for line in text.lines() {
            let Some((key, value)) = line.split_once('=') else {
                continue;
            };
            let Ok(value) = value.parse::<f64>() else {
                continue;
            };
            if let Some(&key) = SUMMED.iter().find(|k| **k == key) {
                *totals.entry(key).or_default() += value;
            }
            if key == "wall_s" {
                max_wall = max_wall.max(value);
            }
        }
    }
    let done = jobs.iter().filter(|j| j.plan.output_path.is_file()).count();
    let mut out = format!("jobs={}\njobs_done={done}\njobs_reported={reported}\n", jobs.len());
    for key in SUMMED {
        let v = totals.get(key).copied().unwrap_or(0.0);
        if key.ends_with("_s") {
            out.push_str(&format!("{key}={v:.6}\n"));
        } else {
            out.push_str(&format!("{key}={v}\n"));
        }
    }
    out.push_str(&format!("max_wall_s={max_wall:.6}\n"));
    Ok(out)
}
