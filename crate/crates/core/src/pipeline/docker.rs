use std::thread;
use std::time::{Duration, Instant};

use crossbeam::channel::{Receiver, Sender};

use super::{OutputRow, WorkItem, WorkerClass, WorkerKind};
use crate::dockengine::{dock_and_score, ScoringConfig};
use crate::molmodel::Pocket;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DockerStats {
    pub kind: WorkerKind,
    pub ligands: u64,
    pub errors: u64,
    /// Docking time including any synthetic slowdown.
    pub busy: Duration,
    pub queue_high_water: usize,
}

/// One docker worker: pulls from the shared item queue until it closes.
pub fn stage_docker(rx: &Receiver<WorkItem>, tx: &Sender<OutputRow>, pocket: &Pocket, scoring: &ScoringConfig, class: WorkerClass) -> DockerStats {
    let mut stats = DockerStats {
        kind: class.kind,
        ligands: 0,
        errors: 0,
        busy: Duration::ZERO,
        queue_high_water: 0,
    };
    let slowdown = class.effective_slowdown();
    for item in rx {
        let started = Instant::now();
        let result = dock_and_score(pocket, &item.ligand, scoring);
        if slowdown > 1.0 {
            thread::sleep(started.elapsed().mul_f64(slowdown - 1.0));
        }
        stats.busy += started.elapsed();
        let row = match result {
            Ok(r) if r.best_score.is_finite() => OutputRow {
                smiles: r.smiles,
                score: r.best_score,
            },
            Ok(_) => {
                log::warn!("ligand {} ({}) scored a non-finite value", item.sequence_id, item.ligand.name);
                stats.errors += 1;
                continue;
            }
            Err(e) => {
                log::warn!("ligand {} ({}) failed to dock: {e}", item.sequence_id, item.ligand.name);
                stats.errors += 1;
                continue;
            }
        };
        if tx.send(row).is_err() {
            break;
        }
        stats.queue_high_water = stats.queue_high_water.max(tx.len());
        stats.ligands += 1;
    }
    stats
}
