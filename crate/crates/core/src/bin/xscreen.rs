use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use xscreen_core::molmodel::Pocket;
use xscreen_core::pipeline::{format_row, run_rank, PipelineConfig, RankPlan, Slab};
use xscreen_core::predictor::{TimeTree, DEFAULT_MAX_DEPTH, DEFAULT_MIN_LEAF};
use xscreen_core::workflow::{
    apply_config, cmd_dock, cmd_merge, cmd_prep, cmd_regen, cmd_stats, cmd_top, cmd_train, read_config, resolve_inputs, ConfigMap, DockOptions,
    Timing, WorkflowError,
};
use xscreen_core::synth;

#[derive(Parser)]
#[command(name = "xscreen", version, about = "Virtual screening of ligand libraries against protein pockets")]
struct Cli {
    /// Flat key=value file with defaults for any flag; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Prepare a SMILES library into binary ligand files and a manifest.
    Prep {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Largest binary file to write, in bytes.
        #[arg(long)]
        file_size: Option<u64>,
        /// Timing tree used to route ligands into 10 ms buckets.
        #[arg(long)]
        tree: Option<PathBuf>,
    },
    /// Train the docking-time tree from a sample library.
    Train {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        pocket: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// `measured` docks every sample; `synthetic` uses the reproducible recipe.
        #[arg(long)]
        timing: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(long)]
        min_leaf: Option<usize>,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Dock prepared files against one pocket, one job per rank.
    Dock {
        /// A binary ligand file or a manifest.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        pocket: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        ranks: Option<usize>,
        /// Run each rank in its own process.
        #[arg(long)]
        spawn_processes: bool,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Merge the job outputs of a pocket directory into a ranking.
    Merge {
        /// Pocket directory written by `dock`.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Print the best rows of a ranking.
    Top {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(short, long, default_value_t = 10)]
        k: usize,
    },
    /// Recreate the best pose of one ligand as Mol2.
    Regen {
        #[arg(long)]
        smiles: String,
        #[arg(long)]
        pocket: Option<PathBuf>,
        /// Mol2 destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Summarize the per-job stats of a pocket directory.
    Stats {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    #[command(hide = true)]
    Rank {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        pocket: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        stats: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        rank: usize,
        #[arg(long, default_value_t = 1)]
        ranks: usize,
        #[arg(long)]
        slab_start: u64,
        #[arg(long)]
        slab_stop: u64,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Write a generated library and cavity pockets.
    #[command(hide = true)]
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100)]
        ligands: usize,
        #[arg(long, default_value_t = 1)]
        pockets: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        min_pieces: usize,
        #[arg(long, default_value_t = 4)]
        max_pieces: usize,
    },
}

#[derive(Args, Default)]
struct PipelineArgs {
    #[arg(long)]
    fast_workers: Option<usize>,
    #[arg(long)]
    slow_workers: Option<usize>,
    /// Time multiplier of slow workers.
    #[arg(long)]
    slowdown: Option<f64>,
    /// Writer buffer in bytes.
    #[arg(long)]
    buffer: Option<usize>,
    /// Reader chunk in bytes.
    #[arg(long)]
    chunk: Option<usize>,
    /// Capacity of the ligand queue.
    #[arg(long)]
    queue: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    rescored: Option<usize>,
}

impl PipelineArgs {
    fn overlay(&self, map: &mut ConfigMap) {
        let mut set = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                map.insert(k.to_string(), v);
            }
        };
        set("fast-workers", self.fast_workers.map(|v| v.to_string()));
        set("slow-workers", self.slow_workers.map(|v| v.to_string()));
        set("slowdown", self.slowdown.map(|v| v.to_string()));
        set("buffer", self.buffer.map(|v| v.to_string()));
        set("chunk", self.chunk.map(|v| v.to_string()));
        set("queue", self.queue.map(|v| v.to_string()));
        set("restarts", self.restarts.map(|v| v.to_string()));
        set("rescored", self.rescored.map(|v| v.to_string()));
    }

    fn resolve(&self, file: &ConfigMap) -> Result<PipelineConfig, WorkflowError> {
        let mut map = file.clone();
        self.overlay(&mut map);
        let mut config = PipelineConfig::default();
        apply_config(&map, &mut config)?;
        Ok(config)
    }
}

/// Flag value, else config value, else an error naming the flag.
fn need<T: std::str::FromStr>(flag: Option<T>, file: &ConfigMap, key: &str) -> Result<T, WorkflowError> {
    match flag {
        Some(v) => Ok(v),
        None => optional(None, file, key)?.ok_or_else(|| WorkflowError::Usage(format!("--{key} is required"))),
    }
}

fn optional<T: std::str::FromStr>(flag: Option<T>, file: &ConfigMap, key: &str) -> Result<Option<T>, WorkflowError> {
    if flag.is_some() {
        return Ok(flag);
    }
    file.get(key)
        .map(|v| v.parse().map_err(|_| WorkflowError::Input(format!("bad value for {key}: {v:?}"))))
        .transpose()
}

fn read_pocket(path: &Path) -> Result<Pocket, WorkflowError> {
    Pocket::read(path).map_err(|e| WorkflowError::Input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), WorkflowError> {
    let file = match &cli.config {
        Some(path) => read_config(path)?,
        None => ConfigMap::new(),
    };
    match cli.command {
        Cmd::Prep { input, out, file_size, tree } => {
            let input: PathBuf = need(input, &file, "input")?;
            let out: PathBuf = need(out, &file, "out")?;
            let file_size = optional(file_size, &file, "file-size")?.unwrap_or(64 << 20);
            let tree = match optional::<PathBuf>(tree, &file, "tree")? {
                Some(path) => {
                    let text = fs::read_to_string(&path).map_err(|e| WorkflowError::Input(format!("{}: {e}", path.display())))?;
                    Some(TimeTree::from_text(&text).map_err(|e| WorkflowError::Input(format!("{}: {e}", path.display())))?)
                }
                None => None,
            };
            let report = cmd_prep(&input, &out, file_size, tree.as_ref())?;
            println!("manifest={}", report.manifest_path.display());
            println!("files={}", report.manifest.entries.len());
            println!("prepared={}", report.prepared);
            println!("skipped={}", report.skipped);
            println!("clamped_predictions={}", report.clamped_predictions);
        }
        Cmd::Train {
            input,
            pocket,
            out,
            timing,
            seed,
            max_depth,
            min_leaf,
            pipeline,
        } => {
            let input: PathBuf = need(input, &file, "input")?;
            let out: PathBuf = need(out, &file, "out")?;
            let seed = optional(seed, &file, "seed")?.unwrap_or(1);
            let timing = match optional::<String>(timing, &file, "timing")?.as_deref() {
                None | Some("measured") => Timing::Measured,
                Some("synthetic") => Timing::Synthetic { seed },
                Some(other) => return Err(WorkflowError::Input(format!("unknown timing mode {other:?}"))),
            };
            let pocket = optional::<PathBuf>(pocket, &file, "pocket")?.map(|p| read_pocket(&p)).transpose()?;
            let config = pipeline.resolve(&file)?;
            let report = cmd_train(
                pocket.as_ref(),
                &input,
                &out,
                timing,
                &config.scoring,
                optional(max_depth, &file, "max-depth")?.unwrap_or(DEFAULT_MAX_DEPTH),
                optional(min_leaf, &file, "min-leaf")?.unwrap_or(DEFAULT_MIN_LEAF),
            )?;
            println!("samples={}", report.samples);
            println!("failed={}", report.failed);
            println!("leaves={}", report.tree.leaf_count());
            println!("depth={}", report.tree.depth());
            println!("holdout_r2={:.4}", report.holdout.r_squared);
            println!("holdout_mean_error_ms={:.4}", report.holdout.mean_signed_error);
            println!("holdout_error_std_ms={:.4}", report.holdout.error_std);
        }
        Cmd::Dock {
            input,
            pocket,
            out,
            ranks,
            spawn_processes,
            pipeline,
        } => {
            let input: PathBuf = need(input, &file, "input")?;
            let pocket: PathBuf = need(pocket, &file, "pocket")?;
            let out: PathBuf = need(out, &file, "out")?;
            let spawn = spawn_processes || optional::<bool>(None, &file, "spawn-processes")?.unwrap_or(false);
            let opts = DockOptions {
                ranks: optional(ranks, &file, "ranks")?.unwrap_or(1),
                pipeline: pipeline.resolve(&file)?,
                spawn: if spawn {
                    Some(std::env::current_exe().map_err(|e| WorkflowError::Runtime(format!("cannot locate xscreen: {e}")))?)
                } else {
                    None
                },
            };
            let report = cmd_dock(&resolve_inputs(&input)?, &pocket, &out, &opts)?;
            println!("dir={}", report.dir.display());
            println!("jobs={}", report.jobs.len());
            println!("ran={}", report.ran);
            println!("reused={}", report.reused);
        }
        Cmd::Merge { input } => {
            let dir: PathBuf = need(input, &file, "input")?;
            let (ranking, rows) = cmd_merge(&dir)?;
            println!("ranking={}", ranking.display());
            println!("rows={rows}");
        }
        Cmd::Top { input, k } => {
            let ranking: PathBuf = need(input, &file, "input")?;
            for row in cmd_top(&ranking, k)? {
                print!("{}", format_row(&row));
            }
        }
        Cmd::Regen {
            smiles,
            pocket,
            out,
            pipeline,
        } => {
            let pocket = read_pocket(&need::<PathBuf>(pocket, &file, "pocket")?)?;
            let config = pipeline.resolve(&file)?;
            let regen = cmd_regen(&smiles, &pocket, &config.scoring)?;
            match optional::<PathBuf>(out, &file, "out")? {
                Some(path) => {
                    fs::write(&path, &regen.mol2).map_err(|e| WorkflowError::Runtime(format!("{}: {e}", path.display())))?;
                    print!(
                        "{}",
                        format_row(&xscreen_core::pipeline::OutputRow {
                            smiles,
                            score: regen.result.best_score
                        })
                    );
                }
                None => print!("{}", regen.mol2),
            }
        }
        Cmd::Stats { input } => {
            let dir: PathBuf = need(input, &file, "input")?;
            print!("{}", cmd_stats(&dir)?);
        }
        Cmd::Rank {
            input,
            pocket,
            out,
            stats,
            rank,
            ranks,
            slab_start,
            slab_stop,
            pipeline,
        } => {
            let pocket = read_pocket(&pocket)?;
            let plan = RankPlan {
                rank,
                n_ranks: ranks,
                slab: Slab {
                    start: slab_start,
                    stop: slab_stop,
                },
                input_path: input,
                output_path: out,
            };
            let config = pipeline.resolve(&file)?;
            let report = run_rank(&plan, &pocket, &config).map_err(|e| WorkflowError::Runtime(e.to_string()))?;
            match stats {
                Some(path) => fs::write(&path, report.report()).map_err(|e| WorkflowError::Runtime(format!("{}: {e}", path.display())))?,
                None => print!("{}", report.report()),
            }
        }
        Cmd::Synth {
            out,
            ligands,
            pockets,
            seed,
            min_pieces,
            max_pieces,
        } => {
            if min_pieces == 0 || min_pieces > max_pieces {
                return Err(WorkflowError::Input("need 1 <= --min-pieces <= --max-pieces".into()));
            }
            fs::create_dir_all(&out).map_err(|e| WorkflowError::Runtime(format!("{}: {e}", out.display())))?;
            let library = synth::library(ligands, seed, min_pieces, max_pieces);
            let path = out.join("library.smi");
            fs::write(&path, synth::library_text(&library)).map_err(|e| WorkflowError::Runtime(format!("{}: {e}", path.display())))?;
            println!("library={}", path.display());
            for k in 0..pockets {
                let pocket = synth::pocket(&format!("site{k}"), seed.wrapping_add(1000 + k as u64))?;
                let path = out.join(format!("site{k}.pkt"));
                pocket.write(&path).map_err(|e| WorkflowError::Runtime(format!("{}: {e}", path.display())))?;
                println!("pocket={}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("xscreen: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
