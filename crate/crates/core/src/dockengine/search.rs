use std::f64::consts::{PI, TAU};

use nalgebra::{Unit, UnitQuaternion};

use super::{geo_score, DockError, Pose, ScoringConfig, SearchStats};
use crate::geometry::{apply_rigid, apply_torsions, rotate_about_bond, Conformation, RigidTransform};
use crate::molmodel::{Ligand, Pocket, Vec3};

const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

/// Score, transform, and the changed torsion with its new angle.
type Move = (f64, RigidTransform, Option<(usize, f64)>);

/// Unit axis `i` of a spherical Fibonacci set of `k` points.
pub fn fibonacci_axis(i: usize, k: usize) -> Vec3 {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    let z = 1.0 - (2.0 * i as f64 + 1.0) / k as f64;
    let r = (1.0 - z * z).max(0.0).sqrt();
    let phi = golden_angle * i as f64;
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

/// Orientation `i` of `k`: Fibonacci axis `i` with angle `2π·frac(i·φ)`.
pub fn fibonacci_rotation(i: usize, k: usize) -> UnitQuaternion<f64> {
    let angle = TAU * (i as f64 * GOLDEN_RATIO).fract();
    UnitQuaternion::from_axis_angle(&Unit::new_normalize(fibonacci_axis(i, k)), angle)
}

/// Torsions applied to `base` in index order, then the rigid transform.
pub fn materialize(ligand: &Ligand, base: &Conformation, angles: &[f64], transform: &RigidTransform) -> Result<Conformation, DockError> {
    Ok(apply_rigid(&apply_torsions(base, ligand, angles)?, transform))
}

/// `k` seed-free starting poses with the ligand centroid on the pocket
/// centre and the torsions at `angles`.
pub fn initial_poses(
    pocket: &Pocket,
    ligand: &Ligand,
    base: &Conformation,
    angles: &[f64],
    k: usize,
    stats: &mut SearchStats,
) -> Result<Vec<Pose>, DockError> {
    let internal = apply_torsions(base, ligand, angles)?;
    let centroid = internal.centroid();
    let center = pocket.center();
    (0..k)
        .map(|i| {
            let rotation = fibonacci_rotation(i, k);
            let transform = RigidTransform::new(rotation, center - rotation * centroid);
            let conformation = apply_rigid(&internal, &transform);
            let geo = geo_score(pocket, ligand, &conformation, &mut stats.scoring_evals);
            stats.poses_evaluated += 1;
            Ok(Pose {
                restart: i,
                transform,
                torsion_angles: angles.to_vec(),
                conformation,
                geo_score: geo,
                chem_score: None,
            })
        })
        .collect()
}

/// Heavy-atom view of a ligand used to score neighbours without
/// materializing hydrogens. Heavy positions depend only on heavy positions,
/// so scores match [`geo_score`] on the full conformation bit for bit.
struct HeavyFrame {
    heavy: Vec<usize>,
    axes: Vec<(usize, usize)>,
    moving: Vec<Vec<usize>>,
    buf: Vec<Vec3>,
}

impl HeavyFrame {
    fn new(ligand: &Ligand) -> Self {
        let is_heavy = |a: &usize| ligand.atoms[*a].is_heavy;
        HeavyFrame {
            heavy: ligand.heavy_indices(),
            axes: ligand
                .torsions
                .iter()
                .map(|t| (ligand.bonds[t.bond_index].a, ligand.bonds[t.bond_index].b))
                .collect(),
            moving: ligand.torsions.iter().map(|t| t.right_set.iter().copied().filter(is_heavy).collect()).collect(),
            buf: vec![Vec3::zeros(); ligand.atoms.len()],
        }
    }

    fn twist(&mut self, base: &Conformation, angles: &[f64]) -> Result<(), DockError> {
        for &h in &self.heavy {
            self.buf[h] = base.positions[h];
        }
        for ((&(a, b), moving), &angle) in self.axes.iter().zip(&self.moving).zip(angles) {
            rotate_about_bond(&mut self.buf, a, b, moving, angle)?;
        }
        Ok(())
    }

    fn score(&self, pocket: &Pocket, points: &[Vec3], transform: &RigidTransform, evals: &mut u64) -> f64 {
        let mut score = 0.0;
        for &h in &self.heavy {
            score += pocket.sample(&transform.apply_point(&points[h]));
        }
        *evals += self.heavy.len() as u64;
        score
    }
}

/// Steepest ascent on the geometric score with a halving step schedule.
pub fn local_search(
    pocket: &Pocket,
    ligand: &Ligand,
    base: &Conformation,
    start: &Pose,
    config: &ScoringConfig,
    stats: &mut SearchStats,
) -> Result<Pose, DockError> {
    let mut pose = start.clone();
    let mut frame = HeavyFrame::new(ligand);
    let mut internal = apply_torsions(base, ligand, &pose.torsion_angles)?;
    let mut dt = config.translation_step;
    let mut dr = config.rotation_step_deg.to_radians();
    let mut dth = config.torsion_step_deg.to_radians();
    let axes = [Vec3::x(), Vec3::y(), Vec3::z()];
    let m = pose.torsion_angles.len();
    let mut iterations = 0;
    while iterations < config.max_iterations {
        iterations += 1;
        let mut best: Option<Move> = None;
        let mut consider = |score: f64, transform: RigidTransform, twist: Option<(usize, f64)>| {
            if best.as_ref().is_none_or(|b| score > b.0) {
                best = Some((score, transform, twist));
            }
        };
        for axis in &axes {
            for sign in [1.0, -1.0] {
                let transform = RigidTransform::new(pose.transform.rotation, pose.transform.translation + axis * (sign * dt));
                let score = frame.score(pocket, &internal.positions, &transform, &mut stats.scoring_evals);
                consider(score, transform, None);
            }
        }
        let c = pose.conformation.centroid();
        for axis in &axes {
            for sign in [1.0, -1.0] {
                let delta = UnitQuaternion::from_axis_angle(&Unit::new_unchecked(*axis), sign * dr);
                let transform = RigidTransform::new(delta, c - delta * c).compose(&pose.transform);
                let score = frame.score(pocket, &internal.positions, &transform, &mut stats.scoring_evals);
                consider(score, transform, None);
            }
        }
        let mut angles = pose.torsion_angles.clone();
        for t in 0..m {
            for sign in [1.0, -1.0] {
                let angle = (pose.torsion_angles[t] + sign * dth).rem_euclid(TAU);
                angles[t] = angle;
                frame.twist(base, &angles)?;
                let score = frame.score(pocket, &frame.buf, &pose.transform, &mut stats.scoring_evals);
                consider(score, pose.transform, Some((t, angle)));
            }
            angles[t] = pose.torsion_angles[t];
        }
        stats.poses_evaluated += (12 + 2 * m) as u64;
        match best {
            Some((score, transform, twist)) if score > pose.geo_score => {
                if let Some((t, angle)) = twist {
                    pose.torsion_angles[t] = angle;
                    internal = apply_torsions(base, ligand, &pose.torsion_angles)?;
                }
                pose.transform = transform;
                pose.conformation = apply_rigid(&internal, &transform);
                pose.geo_score = score;
            }
            _ => {
                dt /= 2.0;
                dr /= 2.0;
                dth /= 2.0;
                if dt < config.min_translation_step {
                    break;
                }
            }
        }
    }
    stats.ls_iterations += iterations as u64;
    Ok(pose)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_axes_are_unit_and_distinct() {
        let k = 64;
        let axes: Vec<Vec3> = (0..k).map(|i| fibonacci_axis(i, k)).collect();
        for a in &axes {
            assert!((a.norm() - 1.0).abs() < 1e-12);
        }
        for i in 0..k {
            for j in i + 1..k {
                assert!((axes[i] - axes[j]).norm() > 0.1);
            }
        }
        assert_eq!(fibonacci_rotation(0, 1), UnitQuaternion::identity());
    }
}
