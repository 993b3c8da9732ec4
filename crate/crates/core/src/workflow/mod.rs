//! Campaign orchestration behind the `xscreen` command line: library
//! preparation, timing-model training, per-pocket docking jobs, merging
//! and ranking.

mod config;
mod jobs;
mod prep;
mod ranking;
mod regen;
mod train;

use std::io;
use std::path::Path;

use thiserror::Error;

use crate::dockengine::{flatten, DockError};
use crate::geometry::{add_hydrogens, embed_3d, Conformation, GeometryError, HydrogenError};
use crate::molmodel::{detect_torsions, encode_record, CodecError, Ligand, LigandError, SmilesError};

pub use config::{apply_config, config_map, config_text, read_config, worker_counts, ConfigMap};
pub use jobs::{cmd_dock, job_output, job_stats, rank_command, read_jobs, resolve_inputs, write_jobs, DockOptions, DockReport, JobSpec, JobStatus, JOBS_FILE};
pub use prep::{cmd_prep, read_manifest, Manifest, ManifestEntry, PrepReport, MANIFEST_FILE};
pub use ranking::{cmd_merge, cmd_stats, cmd_top, rank_rows, MERGED_FILE, RANKING_FILE};
pub use regen::{cmd_regen, Regenerated};
pub use train::{cmd_train, synthetic_time, Timing, TrainReport};

#[derive(Debug, Error)]
pub enum PrepError {
    #[error(transparent)]
    Smiles(#[from] SmilesError),
    #[error(transparent)]
    Hydrogens(#[from] HydrogenError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Ligand(#[from] LigandError),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// Missing arguments (exit code 1), bad input data (2) or a failure while
/// running (3).
#[derive(Debug, Error)]
pub enum WorkflowError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Runtime(String),
}

impl WorkflowError {
    pub fn exit_code(&self) -> i32 {
        match self {
            WorkflowError::Usage(_) => 1,
            WorkflowError::Input(_) => 2,
            WorkflowError::Runtime(_) => 3,
        }
    }

    pub(crate) fn input_io(path: &Path, e: io::Error) -> Self {
        WorkflowError::Input(format!("{}: {e}", path.display()))
    }

    pub(crate) fn runtime_io(path: &Path, e: io::Error) -> Self {
        WorkflowError::Runtime(format!("{}: {e}", path.display()))
    }
}

impl From<DockError> for WorkflowError {
    fn from(e: DockError) -> Self {
        WorkflowError::Runtime(e.to_string())
    }
}

/// SMILES to a dock-ready ligand: hydrogens, 3D embedding, torsions and the
/// flattened conformation, with coordinates rounded as the binary record
/// stores them. The ligand keeps the SMILES text as its name.
pub fn prepare_ligand(smiles: &str) -> Result<Ligand, PrepError> {
    let parsed = crate::molmodel::parse_smiles(smiles)?;
    let mut ligand = add_hydrogens(&parsed)?;
    let embedded = embed_3d(&ligand);
    ligand.set_positions(&embedded.positions);
    let mut ligand = detect_torsions(ligand);
    let (flat, _) = flatten(&ligand, &Conformation::of(&ligand))?;
    ligand.set_positions(&flat.positions);
    ligand.quantize();
    ligand.validate()?;
    Ok(ligand)
}

/// [`prepare_ligand`] followed by encoding.
pub fn prepare_record(smiles: &str) -> Result<(Ligand, Vec<u8>), PrepError> {
    let ligand = prepare_ligand(smiles)?;
    let record = encode_record(&ligand)?;
    Ok((ligand, record))
}

/// First whitespace-separated token of each non-blank, non-`#` line.
pub fn library_smiles(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let line = line.trim();
            (!line.is_empty() && !line.starts_with('#')).then(|| (i + 1, line.split_whitespace().next().unwrap_or("")))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molmodel::decode_record;

    #[test]
    fn prepared_ligands_survive_encoding() {
        for s in ["CCO", "c1ccccc1CC(=O)O", "C1CCNCC1CCc1ccncc1"] {
            let (ligand, record) = prepare_record(s).unwrap();
            assert_eq!(ligand.name, s);
            assert!(ligand.atoms.iter().any(|a| !a.is_heavy));
            let (back, _) = decode_record(&record, 0).unwrap();
            assert_eq!(back, ligand);
        }
        assert!(prepare_ligand("C1CC").is_err());
    }

    #[test]
    fn library_lines() {
        let got: Vec<_> = library_smiles("CCO L1\n\n# note\n  c1ccccc1\n").collect();
        assert_eq!(got, vec![(1, "CCO"), (4, "c1ccccc1")]);
    }
}
