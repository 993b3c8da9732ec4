use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Child, Command};

use super::config::{config_map, config_text};
use super::prep::read_manifest;
use super::WorkflowError;
use crate::molmodel::codec::{check_file_header, FILE_HEADER_LEN, MAGIC};
use crate::molmodel::Pocket;
use crate::pipeline::{plan_slabs, run_rank, PipelineConfig, RankPlan, Slab};

pub const JOBS_FILE: &str = "jobs.txt";
const RANK_CONFIG_FILE: &str = "rank.conf";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JobStatus {
    Pending,
    Done,
    Failed,
}

impl JobStatus {
    fn as_str(self) -> &'static str {
        match self {
            JobStatus::Pending => "pending",
            JobStatus::Done => "done",
            JobStatus::Failed => "failed",
        }
    }
}

/// One rank of one input file against one pocket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobSpec {
    pub id: usize,
    pub pocket_id: String,
    pub plan: RankPlan,
    pub status: JobStatus,
}

impl JobSpec {
    fn to_line(&self) -> String {
        let p = &self.plan;
        format!(
            "job={} pocket={} rank={}/{} slab={}..{} status={} input={}\n",
            self.id,
            self.pocket_id,
            p.rank,
            p.n_ranks,
            p.slab.start,
            p.slab.stop,
            self.status.as_str(),
            p.input_path.display()
        )
    }
}

pub fn job_output(dir: &Path, id: usize) -> PathBuf {
    dir.join(format!("job-{id:04}.tsv"))
}

pub fn job_stats(dir: &Path, id: usize) -> PathBuf {
    dir.join(format!("job-{id:04}.stats"))
}

pub fn write_jobs(dir: &Path, jobs: &[JobSpec]) -> Result<(), WorkflowError> {
    let path = dir.join(JOBS_FILE);
    let text: String = jobs.iter().map(JobSpec::to_line).collect();
    fs::write(&path, text).map_err(|e| WorkflowError::runtime_io(&path, e))
}

/// Reads the job list of a pocket directory.
pub fn read_jobs(dir: &Path) -> Result<Vec<JobSpec>, WorkflowError> {
    let path = dir.join(JOBS_FILE);
    let text = fs::read_to_string(&path).map_err(|e| WorkflowError::input_io(&path, e))?;
    let bad = |line: usize| WorkflowError::Input(format!("{}:{line}: malformed job line", path.display()));
    let mut jobs = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let (head, input) = line.split_once(" input=").ok_or_else(|| bad(i + 1))?;
        let field = |name: &str| -> Result<String, WorkflowError> {
            head.split(' ')
                .find_map(|f| f.strip_prefix(name).and_then(|v| v.strip_prefix('=')))
                .map(str::to_string)
                .ok_or_else(|| bad(i + 1))
        };
        let id: usize = field("job")?.parse().map_err(|_| bad(i + 1))?;
        let pocket_id = field("pocket")?;
        let rank = field("rank")?;
        let slab = field("slab")?;
        let status = match field("status")?.as_str() {
            "pending" => JobStatus::Pending,
            "done" => JobStatus::Done,
            "failed" => JobStatus::Failed,
            _ => return Err(bad(i + 1)),
        };
        let (rank, n_ranks) = rank.split_once('/').ok_or_else(|| bad(i + 1))?;
        let (start, stop) = slab.split_once("..").ok_or_else(|| bad(i + 1))?;
        let num = |s: &str| s.parse::<u64>().map_err(|_| bad(i + 1));
        jobs.push(JobSpec {
            id,
            pocket_id,
            plan: RankPlan {
                rank: num(rank)? as usize,
                n_ranks: num(n_ranks)? as usize,
                slab: Slab {
                    start: num(start)?,
                    stop: num(stop)?,
                },
                input_path: PathBuf::from(input),
                output_path: job_output(dir, id),
            },
            status,
        });
    }
    Ok(jobs)
}

/// A binary ligand file, or a manifest listing several.
pub fn resolve_inputs(path: &Path) -> Result<Vec<PathBuf>, WorkflowError> {
    let mut head = [0u8; 4];
    let is_binary = fs::File::open(path)
        .and_then(|mut f| f.read_exact(&mut head))
        .is_ok_and(|_| &head == MAGIC);
    if is_binary {
        Ok(vec![path.to_path_buf()])
    } else {
        Ok(read_manifest(path)?.entries.into_iter().map(|e| e.path).collect())
    }
}

#[derive(Debug, Clone)]
pub struct DockOptions {
    pub ranks: usize,
    pub pipeline: PipelineConfig,
    /// Run each rank as `<exe> rank ...` in its own process.
    pub spawn: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct DockReport {
    pub dir: PathBuf,
    pub jobs: Vec<JobSpec>,
    /// Jobs run by this invocation.
    pub ran: usize,
    /// Jobs whose output already existed.
    pub reused: usize,
}

/// Plans one job per (input, rank) under `out_dir/<pocket id>`, runs the
/// jobs without an output and records their status. Finished jobs are
/// never rerun, so a second invocation after a failure only redoes what
/// is missing.
pub fn cmd_dock(inputs: &[PathBuf], pocket_path: &Path, out_dir: &Path, opts: &DockOptions) -> Result<DockReport, WorkflowError> {
    let pocket = Pocket::read(pocket_path).map_err(|e| WorkflowError::Input(format!("{}: {e}", pocket_path.display())))?;
    if pocket.id.is_empty() || pocket.id.contains(['/', '\\']) || pocket.id.starts_with('.') {
        return Err(WorkflowError::Input(format!("pocket id {:?} is not usable as a directory name", pocket.id)));
    }
    opts.pipeline.validate().map_err(|e| WorkflowError::Input(e.to_string()))?;
    let dir = out_dir.join(&pocket.id);
    fs::create_dir_all(&dir).map_err(|e| WorkflowError::runtime_io(&dir, e))?;
    let mut jobs = Vec::new();
    for input in inputs {
        let bytes = fs::File::open(input)
            .and_then(|f| {
                let mut head = Vec::new();
                f.take(FILE_HEADER_LEN as u64).read_to_end(&mut head).map(|_| head)
            })
            .map_err(|e| WorkflowError::input_io(input, e))?;
        check_file_header(&bytes).map_err(|e| WorkflowError::Input(format!("{}: {e}", input.display())))?;
        let size = fs::metadata(input).map_err(|e| WorkflowError::input_io(input, e))?.len();
        let slabs = plan_slabs(size, opts.ranks).map_err(|e| WorkflowError::Input(e.to_string()))?;
        for (rank, slab) in slabs.into_iter().enumerate() {
            let id = jobs.len();
            let output_path = job_output(&dir, id);
            let status = if output_path.is_file() { JobStatus::Done } else { JobStatus::Pending };
            jobs.push(JobSpec {
                id,
                pocket_id: pocket.id.clone(),
                plan: RankPlan {
                    rank,
                    n_ranks: opts.ranks,
                    slab,
                    input_path: input.clone(),
                    output_path,
                },
                status,
            });
        }
    }
    write_jobs(&dir, &jobs)?;
    let pending: Vec<usize> = jobs.iter().filter(|j| j.status != JobStatus::Done).map(|j| j.id).collect();
    let reused = jobs.len() - pending.len();
    match &opts.spawn {
        Some(exe) => {
            let conf = dir.join(RANK_CONFIG_FILE);
            fs::write(&conf, config_text(&config_map(&opts.pipeline))).map_err(|e| WorkflowError::runtime_io(&conf, e))?;
            let children: Vec<(usize, std::io::Result<Child>)> = pending
                .iter()
                .map(|&id| (id, rank_command(exe, &conf, pocket_path, &jobs[id], &dir).spawn()))
                .collect();
            for (id, child) in children {
                let ok = match child.and_then(|mut c| c.wait()) {
                    Ok(status) if status.success() => true,
                    Ok(status) => {
                        log::error!("job {id} exited with {status}");
                        false
                    }
                    Err(e) => {
                        log::error!("job {id} could not run: {e}");
                        false
                    }
                };
                jobs[id].status = if ok && jobs[id].plan.output_path.is_file() { JobStatus::Done } else { JobStatus::Failed };
            }
        }
        None => {
            for &id in &pending {
                jobs[id].status = match run_rank(&jobs[id].plan, &pocket, &opts.pipeline) {
                    Ok(stats) => {
                        let path = job_stats(&dir, id);
                        fs::write(&path, stats.report()).map_err(|e| WorkflowError::runtime_io(&path, e))?;
                        JobStatus::Done
                    }
                    Err(e) => {
                        log::error!("job {id} failed: {e}");
                        JobStatus::Failed
                    }
                };
            }
        }
    }
    write_jobs(&dir, &jobs)?;
    let failed: Vec<String> = jobs
        .iter()
        .filter(|j| j.status == JobStatus::Failed)
        .map(|j| j.id.to_string())
        .collect();
    if !failed.is_empty() {
        return Err(WorkflowError::Runtime(format!(
            "{} of {} jobs failed (ids {}); rerun the same command to retry them",
            failed.len(),
            jobs.len(),
            failed.join(", ")
        )));
    }
    Ok(DockReport {
        dir,
        jobs,
        ran: pending.len(),
        reused,
    })
}

/// The hidden `rank` subcommand line that runs `job` in a child process.
pub fn rank_command(exe: &Path, conf: &Path, pocket: &Path, job: &JobSpec, dir: &Path) -> Command {
    let p = &job.plan;
    let mut cmd = Command::new(exe);
    cmd.arg("rank")
        .arg("--config")
        .arg(conf)
        .arg("--input")
        .arg(&p.input_path)
        .arg("--pocket")
        .arg(pocket)
        .arg("--out")
        .arg(&p.output_path)
        .arg("--stats")
        .arg(job_stats(dir, job.id))
        .args(["--rank", &p.rank.to_string(), "--ranks", &p.n_ranks.to_string()])
        .args(["--slab-start", &p.slab.start.to_string(), "--slab-stop", &p.slab.stop.to_string()]);
    cmd
}
