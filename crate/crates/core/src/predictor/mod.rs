//! Regression tree predicting per-ligand docking time from SMILES features,
//! plus the 10 ms bucketing used to group ligands of similar cost.

mod tree;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dockengine::{dock_and_score, ScoringConfig};
use crate::molmodel::{smiles_features, FeatureVector, Ligand, Pocket};

pub use tree::{train, Node, PredictorError, TimeTree, DEFAULT_MAX_DEPTH, DEFAULT_MIN_LEAF};

pub const BUCKET_WIDTH_MS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub features: FeatureVector,
    pub time_ms: f64,
}

/// Bucket of a predicted time; negative or NaN predictions land in bucket 0.
pub fn bucketize(predicted_ms: f64) -> u64 {
    if predicted_ms.is_nan() || predicted_ms < 0.0 {
        0
    } else {
        (predicted_ms / BUCKET_WIDTH_MS).floor() as u64
    }
}

/// [`bucketize`] that counts the predictions it had to clamp.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Bucketizer {
    pub clamped: u64,
}

impl Bucketizer {
    pub fn assign(&mut self, predicted_ms: f64) -> u64 {
        if predicted_ms.is_nan() || predicted_ms < 0.0 {
            self.clamped += 1;
        }
        bucketize(predicted_ms)
    }
}

/// Synthetic timing set: heavy atoms n, rings r and chain bonds m drawn
/// uniformly, time `0.1·n·m` plus Gaussian noise of 0.3 ms, clamped at 0.
pub fn synthetic_samples(count: usize, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.3).expect("valid normal");
    (0..count)
        .map(|_| {
            let n = rng.random_range(5..=60usize);
            let r = rng.random_range(0..=6usize);
            let m = rng.random_range(0..=20usize);
            let t = 0.1 * (n * m) as f64 + noise.sample(&mut rng);
            Sample {
                features: FeatureVector::from_counts(n, r, m),
                time_ms: t.max(0.0),
            }
        })
        .collect()
}

/// Every fifth sample held out: `(train, test)`.
pub fn holdout_split(samples: &[Sample]) -> (Vec<Sample>, Vec<Sample>) {
    let (test, train): (Vec<_>, Vec<_>) = samples.iter().enumerate().partition(|(i, _)| i % 5 == 4);
    (
        train.into_iter().map(|(_, s)| *s).collect(),
        test.into_iter().map(|(_, s)| *s).collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub r_squared: f64,
    pub mean_signed_error: f64,
    pub error_std: f64,
}

/// Prediction quality of `tree` on `samples` (signed error = predicted − actual).
pub fn evaluate(tree: &TimeTree, samples: &[Sample]) -> Evaluation {
    let n = samples.len() as f64;
    let mean = samples.iter().map(|s| s.time_ms).sum::<f64>() / n;
    let errors: Vec<f64> = samples.iter().map(|s| tree.predict(&s.features) - s.time_ms).collect();
    let ss_res: f64 = errors.iter().map(|e| e * e).sum();
    let ss_tot: f64 = samples.iter().map(|s| (s.time_ms - mean).powi(2)).sum();
    let mean_signed_error = errors.iter().sum::<f64>() / n;
    let var = errors.iter().map(|e| (e - mean_signed_error).powi(2)).sum::<f64>() / n;
    Evaluation {
        r_squared: 1.0 - ss_res / ss_tot,
        mean_signed_error,
        error_std: var.sqrt(),
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Measurement {
    pub samples: Vec<Sample>,
    pub failed: usize,
}

/// Times `dock_and_score` on each prepared ligand. The first ligand is
/// docked once untimed to warm up. Features come from the ligand's SMILES,
/// which prepared ligands carry as their name.
pub fn measure_samples(pocket: &Pocket, ligands: &[Ligand], config: &ScoringConfig) -> Measurement {
    let mut out = Measurement::default();
    if let Some(first) = ligands.first() {
        let _ = dock_and_score(pocket, first, config);
    }
    for ligand in ligands {
        let features = match smiles_features(&ligand.name) {
            Ok(f) => f,
            Err(e) => {
                log::warn!("no features for {}: {e}", ligand.name);
                out.failed += 1;
                continue;
            }
        };
        let started = Instant::now();
        let result = dock_and_score(pocket, ligand, config);
        let time_ms = started.elapsed().as_secs_f64() * 1e3;
        match result {
            Ok(_) => out.samples.push(Sample { features, time_ms }),
            Err(e) => {
                log::warn!("docking {} failed: {e}", ligand.name);
                out.failed += 1;
            }
        }
    }
    out
}
