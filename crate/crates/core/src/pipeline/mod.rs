//! Per-rank screening pipeline: reader, splitter, docker workers and writer
//! joined by bounded queues.

mod docker;
mod merge;
mod reader;
mod slabs;
mod splitter;
mod writer;

use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufReader, Read, Seek, Write};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, Instant};

use crossbeam::channel::bounded;
use thiserror::Error;

use crate::dockengine::ScoringConfig;
use crate::molmodel::{CodecError, Ligand, Pocket};

pub use docker::{stage_docker, DockerStats};
pub use merge::{merge_outputs, read_rows};
pub use reader::{stage_reader, ReaderStats};
pub use slabs::{plan_ranks, plan_slabs, rank_output, RankPlan, Slab};
pub use splitter::{stage_splitter, SplitterStats};
pub use writer::{format_row, parse_row, stage_writer, RowWriter, WriterStats};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("at least one rank is required")]
    NoRanks,
    #[error("at least one docker worker is required")]
    NoWorkers,
    #[error("invalid pipeline configuration: {0}")]
    BadConfig(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("bad output row on line {line}: {reason}")]
    BadRow { line: usize, reason: String },
}

impl PipelineError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        PipelineError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    pub bytes: Vec<u8>,
    pub file_offset: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkItem {
    pub ligand: Ligand,
    pub sequence_id: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputRow {
    pub smiles: String,
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkerKind {
    Fast,
    Slow,
}

impl fmt::Display for WorkerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WorkerKind::Fast => "fast",
            WorkerKind::Slow => "slow",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkerClass {
    pub kind: WorkerKind,
    pub count: usize,
    /// Slow workers take this many times as long per ligand.
    pub slowdown: f64,
}

impl WorkerClass {
    pub fn fast(count: usize) -> Self {
        WorkerClass {
            kind: WorkerKind::Fast,
            count,
            slowdown: 1.0,
        }
    }

    pub fn slow(count: usize, slowdown: f64) -> Self {
        WorkerClass {
            kind: WorkerKind::Slow,
            count,
            slowdown,
        }
    }

    /// Multiplier applied to each dock by a worker of this class.
    pub fn effective_slowdown(&self) -> f64 {
        match self.kind {
            WorkerKind::Fast => 1.0,
            WorkerKind::Slow => self.slowdown,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub chunk_size: usize,
    pub chunk_queue: usize,
    pub item_queue: usize,
    pub row_queue: usize,
    pub writer_buffer: usize,
    pub workers: Vec<WorkerClass>,
    pub scoring: ScoringConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let cores = thread::available_parallelism().map_or(1, |n| n.get());
        PipelineConfig {
            chunk_size: 1 << 20,
            chunk_queue: 8,
            item_queue: 64,
            row_queue: 64,
            writer_buffer: 4 << 20,
            workers: vec![WorkerClass::fast(cores)],
            scoring: ScoringConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn worker_count(&self) -> usize {
        self.workers.iter().map(|w| w.count).sum()
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.worker_count() == 0 {
            return Err(PipelineError::NoWorkers);
        }
        let sizes = [
            ("chunk_size", self.chunk_size),
            ("chunk_queue", self.chunk_queue),
            ("item_queue", self.item_queue),
            ("row_queue", self.row_queue),
            ("writer_buffer", self.writer_buffer),
        ];
        if let Some((name, _)) = sizes.iter().find(|(_, v)| *v == 0) {
            return Err(PipelineError::BadConfig(format!("{name} must be positive")));
        }
        if let Some(w) = self.workers.iter().find(|w| !(w.slowdown >= 1.0 && w.slowdown.is_finite())) {
            return Err(PipelineError::BadConfig(format!("slowdown {} is not a finite value >= 1", w.slowdown)));
        }
        self.scoring
            .validate()
            .map_err(|e| PipelineError::BadConfig(e.to_string()))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RankStats {
    pub rank: usize,
    pub n_ranks: usize,
    pub slab: Option<Slab>,
    pub ligands: u64,
    pub skipped_records: u64,
    pub dock_errors: u64,
    pub workers: usize,
    pub wall: Duration,
    pub reader: ReaderStats,
    pub splitter: SplitterStats,
    pub dockers: Vec<DockerStats>,
    pub writer: WriterStats,
}

impl RankStats {
    pub fn docker_busy(&self) -> Duration {
        self.dockers.iter().map(|d| d.busy).sum()
    }

    pub fn row_queue_high_water(&self) -> usize {
        self.dockers.iter().map(|d| d.queue_high_water).max().unwrap_or(0)
    }

    /// `key=value` lines.
    pub fn report(&self) -> String {
        let secs = |d: Duration| format!("{:.6}", d.as_secs_f64());
        let mut lines = vec![
            ("rank", self.rank.to_string()),
            ("n_ranks", self.n_ranks.to_string()),
        ];
        if let Some(slab) = self.slab {
            lines.push(("slab_start", slab.start.to_string()));
            lines.push(("slab_stop", slab.stop.to_string()));
        }
        lines.extend([
            ("ligands", self.ligands.to_string()),
            ("skipped_records", self.skipped_records.to_string()),
            ("dock_errors", self.dock_errors.to_string()),
            ("workers", self.workers.to_string()),
            ("wall_s", secs(self.wall)),
            ("reader_busy_s", secs(self.reader.busy)),
            ("splitter_busy_s", secs(self.splitter.busy)),
            ("docker_busy_s", secs(self.docker_busy())),
            ("writer_busy_s", secs(self.writer.busy)),
            ("chunks", self.reader.chunks.to_string()),
            ("bytes_read", self.reader.bytes.to_string()),
            ("chunk_queue_high_water", self.reader.queue_high_water.to_string()),
            ("item_queue_high_water", self.splitter.queue_high_water.to_string()),
            ("row_queue_high_water", self.row_queue_high_water().to_string()),
            ("rows_written", self.writer.rows.to_string()),
            ("bytes_written", self.writer.bytes.to_string()),
            ("write_calls", self.writer.write_calls.to_string()),
        ]);
        for (i, d) in self.dockers.iter().enumerate() {
            lines.push(("", format!("worker{i}_{}_busy_s={}", d.kind, secs(d.busy))));
            lines.push(("", format!("worker{i}_{}_ligands={}", d.kind, d.ligands)));
        }
        lines
            .into_iter()
            .map(|(k, v)| if k.is_empty() { format!("{v}\n") } else { format!("{k}={v}\n") })
            .collect()
    }
}

/// Runs the four stages over `slab` of `input`, writing rows to `sink`.
pub fn run_pipeline<R, W>(input: R, slab: Slab, sink: W, pocket: &Pocket, config: &PipelineConfig) -> Result<RankStats, PipelineError>
where
    R: Read + Seek + Send,
    W: Write + Send,
{
    config.validate()?;
    let started = Instant::now();
    let (chunk_tx, chunk_rx) = bounded(config.chunk_queue);
    let (item_tx, item_rx) = bounded(config.item_queue);
    let (row_tx, row_rx) = bounded(config.row_queue);
    let mut stats = thread::scope(|s| -> Result<RankStats, PipelineError> {
        let reader = s.spawn(move || stage_reader(input, slab, config.chunk_size, &chunk_tx));
        let splitter = s.spawn(move || stage_splitter(&chunk_rx, &item_tx, slab));
        let mut dockers = Vec::new();
        for class in &config.workers {
            for _ in 0..class.count {
                let (rx, tx) = (item_rx.clone(), row_tx.clone());
                let class = *class;
                dockers.push(s.spawn(move || stage_docker(&rx, &tx, pocket, &config.scoring, class)));
            }
        }
        drop(item_rx);
        drop(row_tx);
        let writer = s.spawn(move || stage_writer(&row_rx, sink, config.writer_buffer));

        let dockers: Vec<DockerStats> = dockers.into_iter().map(|h| h.join().expect("docker worker panicked")).collect();
        let writer = writer.join().expect("writer panicked");
        let splitter = splitter.join().expect("splitter panicked");
        let reader = reader.join().expect("reader panicked");
        let reader = reader.map_err(|e| PipelineError::io(Path::new("<input>"), e))?;
        let splitter = splitter?;
        let writer = writer.map_err(|e| PipelineError::io(Path::new("<output>"), e))?;
        Ok(RankStats {
            ligands: dockers.iter().map(|d| d.ligands).sum(),
            skipped_records: splitter.skipped,
            dock_errors: dockers.iter().map(|d| d.errors).sum(),
            workers: dockers.len(),
            reader,
            splitter,
            dockers,
            writer,
            slab: Some(slab),
            ..RankStats::default()
        })
    })?;
    stats.wall = started.elapsed();
    Ok(stats)
}

/// Runs one rank from its plan. Rows go to a temporary file that is renamed
/// onto the output path only after the rank finishes.
pub fn run_rank(plan: &RankPlan, pocket: &Pocket, config: &PipelineConfig) -> Result<RankStats, PipelineError> {
    let input = File::open(&plan.input_path).map_err(|e| PipelineError::io(&plan.input_path, e))?;
    let size = input
        .metadata()
        .map_err(|e| PipelineError::io(&plan.input_path, e))?
        .len();
    if plan.slab.start > plan.slab.stop || plan.slab.stop > size {
        return Err(PipelineError::BadConfig(format!(
            "slab [{}, {}) does not fit a {size}-byte input",
            plan.slab.start, plan.slab.stop
        )));
    }
    let partial = partial_path(&plan.output_path);
    let sink = File::create(&partial).map_err(|e| PipelineError::io(&partial, e))?;
    let result = run_pipeline(BufReader::with_capacity(64 << 10, input), plan.slab, sink, pocket, config);
    let mut stats = match result {
        Ok(stats) => stats,
        Err(e) => {
            let _ = fs::remove_file(&partial);
            return Err(match e {
                PipelineError::Io { path, source } if path == Path::new("<input>") => PipelineError::Io {
                    path: plan.input_path.clone(),
                    source,
                },
                PipelineError::Io { path, source } if path == Path::new("<output>") => PipelineError::Io { path: partial, source },
                e => e,
            });
        }
    };
    fs::rename(&partial, &plan.output_path).map_err(|e| PipelineError::io(&plan.output_path, e))?;
    stats.rank = plan.rank;
    stats.n_ranks = plan.n_ranks;
    Ok(stats)
}

/// Where a rank writes before its output is complete.
pub fn partial_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".partial");
    output.with_file_name(name)
}
