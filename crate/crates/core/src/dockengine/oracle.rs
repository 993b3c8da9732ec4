//! Brute-force docking for tiny rigid ligands, used as ground truth.

use std::thread;

use super::search::fibonacci_rotation;
use super::{geo_score, DockError, Pose};
use crate::geometry::{apply_rigid, Conformation, RigidTransform};
use crate::molmodel::{Ligand, Pocket, Vec3};

pub const LATTICE_STEP: f64 = 0.25;
pub const ORIENTATIONS: usize = 512;
pub const MAX_ATOMS: usize = 5;
pub const MAX_BOX_SIDE: f64 = 16.0;

/// Best geo_score over every centroid position on a 0.25 Å lattice spanning
/// the grid box times 512 Fibonacci orientations. Ties keep the first
/// candidate in lattice order (x fastest), orientations innermost.
pub fn exhaustive_dock(pocket: &Pocket, ligand: &Ligand) -> Result<Pose, DockError> {
    if ligand.atoms.len() > MAX_ATOMS {
        return Err(DockError::TooLarge(format!("{} atoms, oracle limit is {MAX_ATOMS}", ligand.atoms.len())));
    }
    if !ligand.torsions.is_empty() {
        return Err(DockError::TooLarge("oracle needs a rigid ligand".into()));
    }
    let extent = pocket.extent();
    if extent.max() > MAX_BOX_SIDE + 1e-9 {
        return Err(DockError::TooLarge(format!("box side {:.2} Å exceeds {MAX_BOX_SIDE} Å", extent.max())));
    }
    let base = Conformation::of(ligand);
    let centroid = base.centroid();
    let steps = extent.map(|e| (e / LATTICE_STEP + 1e-9).floor() as usize + 1);
    let rotations: Vec<_> = (0..ORIENTATIONS).map(|i| fibonacci_rotation(i, ORIENTATIONS)).collect();
    let heavy: Vec<usize> = ligand.heavy_indices();
    let rotated: Vec<(Vec<Vec3>, Vec3)> = rotations
        .iter()
        .map(|q| (heavy.iter().map(|&a| q * base.positions[a]).collect(), q * centroid))
        .collect();

    let slab = |k: usize| -> (f64, usize, usize) {
        let mut best = (f64::NEG_INFINITY, usize::MAX, usize::MAX);
        for j in 0..steps.y {
            for i in 0..steps.x {
                let lattice = (i + steps.x * (j + steps.y * k), pocket.origin + Vec3::new(i as f64, j as f64, k as f64) * LATTICE_STEP);
                for (r, (points, rc)) in rotated.iter().enumerate() {
                    let t = lattice.1 - rc;
                    let score: f64 = points.iter().map(|p| pocket.sample(&(p + t))).sum();
                    if score > best.0 {
                        best = (score, lattice.0, r);
                    }
                }
            }
        }
        best
    };

    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(steps.z);
    let per_slab: Vec<(f64, usize, usize)> = thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let slab = &slab;
                s.spawn(move || (w..steps.z).step_by(workers).map(|k| (k, slab(k))).collect::<Vec<_>>())
            })
            .collect();
        let mut all: Vec<(usize, (f64, usize, usize))> =
            handles.into_iter().flat_map(|h| h.join().expect("oracle worker panicked")).collect();
        all.sort_by_key(|(k, _)| *k);
        all.into_iter().map(|(_, b)| b).collect()
    });
    let (_, cell, r) = per_slab
        .into_iter()
        .fold((f64::NEG_INFINITY, 0, 0), |best, cand| if cand.0 > best.0 { cand } else { best });

    let (i, j, k) = (cell % steps.x, (cell / steps.x) % steps.y, cell / (steps.x * steps.y));
    let lattice = pocket.origin + Vec3::new(i as f64, j as f64, k as f64) * LATTICE_STEP;
    let rotation = rotations[r];
    let transform = RigidTransform::new(rotation, lattice - rotation * centroid);
    let conformation = apply_rigid(&base, &transform);
    let mut evals = 0;
    let geo = geo_score(pocket, ligand, &conformation, &mut evals);
    Ok(Pose {
        restart: r,
        transform,
        torsion_angles: Vec::new(),
        conformation,
        geo_score: geo,
        chem_score: None,
    })
}
