//! Flexible-ligand docking against a rigid pocket grid.
//!
//! [`dock_and_score`] runs the four steps in order: unfold the ligand,
//! hill-climb from many fixed starting orientations, cluster the resulting
//! poses and rescore the best few with the pairwise contact function.

mod chem;
mod cluster;
mod flatten;
mod grid;
mod oracle;
mod search;

use thiserror::Error;

use crate::geometry::{Conformation, GeometryError, RigidTransform};
use crate::molmodel::{Ligand, Pocket, PocketError};

pub use chem::{chem_score, contact_weight, ramp};
pub use cluster::{cluster_and_select, cluster_poses, pose_rmsd, visit_cmp, Clustering};
pub use flatten::{flatten, grid_angle};
pub use grid::{build_pocket, geo_score, voxel_value, CLASH_DISTANCE, CONTACT_DISTANCE};
pub use oracle::exhaustive_dock;
pub use search::{fibonacci_axis, fibonacci_rotation, initial_poses, local_search, materialize};

#[derive(Debug, Error)]
pub enum DockError {
    #[error("grid spacing {0} Å is outside [0.25, 1.0]")]
    BadSpacing(f64),
    #[error("pocket radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("protein has no heavy atoms")]
    EmptyProtein,
    #[error("no poses to cluster")]
    NoPoses,
    #[error("invalid scoring config: {0}")]
    BadConfig(&'static str),
    #[error("instance too large for the exhaustive oracle: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Pocket(#[from] PocketError),
}

/// One placement of a ligand in the pocket frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Pose {
    /// Index of the starting orientation this pose descends from.
    pub restart: usize,
    pub transform: RigidTransform,
    pub torsion_angles: Vec<f64>,
    pub conformation: Conformation,
    pub geo_score: f64,
    pub chem_score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoringConfig {
    pub restarts: usize,
    pub rescored: usize,
    pub rmsd_threshold: f64,
    pub translation_step: f64,
    pub rotation_step_deg: f64,
    pub torsion_step_deg: f64,
    pub min_translation_step: f64,
    pub max_iterations: usize,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        ScoringConfig {
            restarts: 256,
            rescored: 30,
            rmsd_threshold: 3.0,
            translation_step: 1.0,
            rotation_step_deg: 20.0,
            torsion_step_deg: 20.0,
            min_translation_step: 0.1,
            max_iterations: 200,
        }
    }
}

impl ScoringConfig {
    pub fn validate(&self) -> Result<(), DockError> {
        if self.restarts == 0 {
            return Err(DockError::BadConfig("restarts must be at least 1"));
        }
        if self.rescored == 0 {
            return Err(DockError::BadConfig("rescored must be at least 1"));
        }
        if self.rmsd_threshold.is_nan() || self.rmsd_threshold <= 0.0 {
            return Err(DockError::BadConfig("rmsd threshold must be positive"));
        }
        if !(self.translation_step > 0.0 && self.min_translation_step > 0.0) {
            return Err(DockError::BadConfig("translation steps must be positive"));
        }
        Ok(())
    }
}

/// Work counters accumulated during a dock.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Atom-grid samples.
    pub scoring_evals: u64,
    /// Pose evaluations (one per geo_score call).
    pub poses_evaluated: u64,
    /// Neighbourhood scans over all local searches.
    pub ls_iterations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DockResult {
    pub smiles: String,
    pub best_score: f64,
    pub best_pose: Pose,
    /// Highest geo_score reached by any restart.
    pub top_geo_score: f64,
    /// Rescored survivors in selection order.
    pub rescored: Vec<Pose>,
    pub poses_evaluated: u64,
    pub scoring_evals: u64,
    pub ls_iterations: u64,
}

/// Flatten, search from `config.restarts` starts, cluster, rescore.
pub fn dock_and_score(pocket: &Pocket, ligand: &Ligand, config: &ScoringConfig) -> Result<DockResult, DockError> {
    config.validate()?;
    let base = Conformation::of(ligand);
    let (_, angles) = flatten(ligand, &base)?;
    let mut stats = SearchStats::default();
    let starts = initial_poses(pocket, ligand, &base, &angles, config.restarts, &mut stats)?;
    let mut poses = Vec::with_capacity(starts.len());
    for start in &starts {
        poses.push(local_search(pocket, ligand, &base, start, config, &mut stats)?);
    }
    let mut selected = cluster_and_select(ligand, &poses, config.rmsd_threshold, config.rescored)?;
    let top_geo_score = selected[0].geo_score;
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, pose) in selected.iter_mut().enumerate() {
        let score = chem_score(pocket, ligand, &pose.conformation);
        pose.chem_score = Some(score);
        if score > best_score {
            best = i;
            best_score = score;
        }
    }
    Ok(DockResult {
        smiles: ligand.name.clone(),
        best_score,
        best_pose: selected[best].clone(),
        top_geo_score,
        rescored: selected,
        poses_evaluated: stats.poses_evaluated,
        scoring_evals: stats.scoring_evals,
        ls_iterations: stats.ls_iterations,
    })
}
