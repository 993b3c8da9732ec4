use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{library_smiles, prepare_ligand, WorkflowError};
use crate::dockengine::ScoringConfig;
use crate::molmodel::{smiles_features, Ligand, Pocket};
use crate::predictor::{evaluate, holdout_split, measure_samples, train, Evaluation, Sample, TimeTree};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Timing {
    /// Wall time of real docks against a pocket.
    Measured,
    /// `0.1·n·m` ms plus seeded Gaussian noise (σ = 0.3 ms), with n heavy
    /// atoms and m torsions. Reproducible byte for byte.
    Synthetic { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub tree: TimeTree,
    pub samples: usize,
    pub failed: usize,
    pub holdout: Evaluation,
}

/// Synthetic times for `ligands`, one noise draw each in order.
pub fn synthetic_time(ligands: &[Ligand], seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.3).expect("valid normal");
    ligands
        .iter()
        .map(|l| (0.1 * (l.heavy_count() * l.torsions.len()) as f64 + noise.sample(&mut rng)).max(0.0))
        .collect()
}

/// Times the sample library, trains on four fifths and evaluates on the
/// held-out fifth, then writes the tree.
pub fn cmd_train(
    pocket: Option<&Pocket>,
    smiles_path: &Path,
    out_tree: &Path,
    timing: Timing,
    scoring: &ScoringConfig,
    max_depth: usize,
    min_leaf: usize,
) -> Result<TrainReport, WorkflowError> {
    let text = fs::read_to_string(smiles_path).map_err(|e| WorkflowError::input_io(smiles_path, e))?;
    let mut failed = 0;
    let mut ligands = Vec::new();
    for (line_no, smiles) in library_smiles(&text) {
        match prepare_ligand(smiles) {
            Ok(l) if smiles_features(smiles).is_ok() => ligands.push(l),
            Ok(_) => failed += 1,
            Err(e) => {
                log::warn!("{}:{line_no}: skipping {smiles}: {e}", smiles_path.display());
                failed += 1;
            }
        }
    }
    let samples: Vec<Sample> = match timing {
        Timing::Measured => {
            let pocket = pocket.ok_or_else(|| WorkflowError::Input("measured timing needs a pocket".into()))?;
            let m = measure_samples(pocket, &ligands, scoring);
            failed += m.failed;
            m.samples
        }
        Timing::Synthetic { seed } => ligands
            .iter()
            .zip(synthetic_time(&ligands, seed))
            .map(|(l, time_ms)| Sample {
                features: smiles_features(&l.name).expect("checked above"),
                time_ms,
            })
            .collect(),
    };
    let (train_set, test_set) = holdout_split(&samples);
    let tree = train(&train_set, max_depth, min_leaf).map_err(|e| WorkflowError::Input(e.to_string()))?;
    let holdout = if test_set.is_empty() {
        evaluate(&tree, &train_set)
    } else {
        evaluate(&tree, &test_set)
    };
    fs::write(out_tree, tree.to_text()).map_err(|e| WorkflowError::runtime_io(out_tree, e))?;
    Ok(TrainReport {
        tree,
        samples: samples.len(),
        failed,
        holdout,
    })
}
