use std::cmp::Ordering;

use super::{DockError, Pose};
use crate::geometry::rmsd_subset;
use crate::molmodel::Ligand;

/// Outcome of greedy leader clustering, as indices into the input slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    /// Poses by descending geo_score, ties to the lower restart index.
    pub visit_order: Vec<usize>,
    /// Leader of each pose's cluster (a leader is its own leader).
    pub leader_of: Vec<usize>,
    /// Leaders in founding order.
    pub leaders: Vec<usize>,
}

impl Clustering {
    /// Leaders first, then the other poses, each group in visit order.
    pub fn selection_order(&self) -> Vec<usize> {
        let is_leader = |i: usize| self.leader_of[i] == i;
        let mut order: Vec<usize> = self.visit_order.iter().copied().filter(|&i| is_leader(i)).collect();
        order.extend(self.visit_order.iter().copied().filter(|&i| !is_leader(i)));
        order
    }
}

pub fn visit_cmp(a: &Pose, b: &Pose) -> Ordering {
    b.geo_score.total_cmp(&a.geo_score).then(a.restart.cmp(&b.restart))
}

/// Heavy-atom, in-frame RMSD between two poses of the same ligand.
pub fn pose_rmsd(ligand: &Ligand, a: &Pose, b: &Pose) -> Result<f64, DockError> {
    Ok(rmsd_subset(&a.conformation, &b.conformation, &ligand.heavy_indices())?)
}

pub fn cluster_poses(ligand: &Ligand, poses: &[Pose], threshold: f64) -> Result<Clustering, DockError> {
    if poses.is_empty() {
        return Err(DockError::NoPoses);
    }
    let heavy = ligand.heavy_indices();
    let mut visit_order: Vec<usize> = (0..poses.len()).collect();
    visit_order.sort_by(|&i, &j| visit_cmp(&poses[i], &poses[j]).then(i.cmp(&j)));
    let mut leader_of = vec![usize::MAX; poses.len()];
    let mut leaders: Vec<usize> = Vec::new();
    for &i in &visit_order {
        let mut joined = None;
        for &l in &leaders {
            if rmsd_subset(&poses[i].conformation, &poses[l].conformation, &heavy)? <= threshold {
                joined = Some(l);
                break;
            }
        }
        match joined {
            Some(l) => leader_of[i] = l,
            None => {
                leader_of[i] = i;
                leaders.push(i);
            }
        }
    }
    Ok(Clustering {
        visit_order,
        leader_of,
        leaders,
    })
}

/// Cluster leaders by score, then everything else by score; first `top`.
pub fn cluster_and_select(ligand: &Ligand, poses: &[Pose], threshold: f64, top: usize) -> Result<Vec<Pose>, DockError> {
    let clustering = cluster_poses(ligand, poses, threshold)?;
    Ok(clustering
        .selection_order()
        .into_iter()
        .take(top)
        .map(|i| poses[i].clone())
        .collect())
}
