//! 3D kernels shared by ligand preparation and docking.

mod embed;
mod hydrogens;

use nalgebra::{Unit, UnitQuaternion};
use thiserror::Error;

use crate::molmodel::{Ligand, TorsionalBond, Vec3};

pub use embed::{bond_length, embed_3d};
pub use hydrogens::{add_hydrogens, HydrogenError};

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("torsion axis is degenerate: bond endpoints coincide")]
    DegenerateAxis,
    #[error("conformations differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Atom positions, parallel to `Ligand::atoms`.
#[derive(Debug, Clone, PartialEq)]
pub struct Conformation {
    pub positions: Vec<Vec3>,
}

impl Conformation {
    pub fn new(positions: Vec<Vec3>) -> Self {
        Conformation { positions }
    }

    pub fn of(ligand: &Ligand) -> Self {
        Conformation::new(ligand.positions())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn centroid(&self) -> Vec3 {
        centroid(&self.positions)
    }

    pub fn translated(&self, by: Vec3) -> Conformation {
        Conformation::new(self.positions.iter().map(|p| p + by).collect())
    }
}

pub fn centroid(points: &[Vec3]) -> Vec3 {
    if points.is_empty() {
        return Vec3::zeros();
    }
    points.iter().fold(Vec3::zeros(), |acc, p| acc + p) / points.len() as f64
}

/// Rotation followed by translation: `x -> R x + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: UnitQuaternion<f64>,
    pub translation: Vec3,
}

impl Default for RigidTransform {
    fn default() -> Self {
        Self::identity()
    }
}

impl RigidTransform {
    pub fn identity() -> Self {
        RigidTransform {
            rotation: UnitQuaternion::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn new(rotation: UnitQuaternion<f64>, translation: Vec3) -> Self {
        RigidTransform { rotation, translation }
    }

    pub fn translation(t: Vec3) -> Self {
        RigidTransform::new(UnitQuaternion::identity(), t)
    }

    /// Rotation by `angle` about `axis` passing through `pivot`.
    pub fn rotation_about(axis: Vec3, angle: f64, pivot: Vec3) -> Self {
        let rotation = UnitQuaternion::from_axis_angle(&Unit::new_normalize(axis), angle);
        RigidTransform::new(rotation, pivot - rotation * pivot)
    }

    pub fn apply_point(&self, p: &Vec3) -> Vec3 {
        self.rotation * p + self.translation
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &RigidTransform) -> RigidTransform {
        let q = self.rotation.into_inner() * inner.rotation.into_inner();
        RigidTransform {
            rotation: UnitQuaternion::new_normalize(q),
            translation: self.rotation * inner.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> RigidTransform {
        let inv = self.rotation.inverse();
        RigidTransform::new(inv, -(inv * self.translation))
    }
}

pub fn apply_rigid(conf: &Conformation, transform: &RigidTransform) -> Conformation {
    Conformation::new(conf.positions.iter().map(|p| transform.apply_point(p)).collect())
}

/// Rotates `moving` atoms by `angle` about the axis `from -> to`.
pub fn rotate_about_bond(positions: &mut [Vec3], from: usize, to: usize, moving: &[usize], angle: f64) -> Result<(), GeometryError> {
    let origin = positions[from];
    let axis = positions[to] - origin;
    let norm = axis.norm();
    if norm < 1e-12 {
        return Err(GeometryError::DegenerateAxis);
    }
    if angle == 0.0 {
        return Ok(());
    }
    let k = axis / norm;
    let (sin, cos) = angle.sin_cos();
    for &i in moving {
        let v = positions[i] - origin;
        let rotated = v * cos + k.cross(&v) * sin + k * (k.dot(&v) * (1.0 - cos));
        positions[i] = origin + rotated;
    }
    Ok(())
}

/// Rotates the torsion's `right_set` about its bond axis.
pub fn apply_torsion(conf: &Conformation, ligand: &Ligand, torsion: &TorsionalBond, angle: f64) -> Result<Conformation, GeometryError> {
    let bond = ligand.bonds[torsion.bond_index];
    let mut out = conf.clone();
    rotate_about_bond(&mut out.positions, bond.a, bond.b, &torsion.right_set, angle)?;
    Ok(out)
}

/// Applies every torsion angle in index order to `base`.
pub fn apply_torsions(base: &Conformation, ligand: &Ligand, angles: &[f64]) -> Result<Conformation, GeometryError> {
    let mut out = base.clone();
    for (torsion, &angle) in ligand.torsions.iter().zip(angles) {
        let bond = ligand.bonds[torsion.bond_index];
        rotate_about_bond(&mut out.positions, bond.a, bond.b, &torsion.right_set, angle)?;
    }
    Ok(out)
}

/// Sum of all pairwise distances.
pub fn internal_distance_sum(conf: &Conformation) -> f64 {
    let p = &conf.positions;
    let mut sum = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            sum += (p[i] - p[j]).norm();
        }
    }
    sum
}

/// In-frame RMSD (no superposition).
pub fn rmsd(a: &Conformation, b: &Conformation) -> Result<f64, GeometryError> {
    if a.len() != b.len() {
        return Err(GeometryError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = a.positions.iter().zip(&b.positions).map(|(p, q)| (p - q).norm_squared()).sum();
    Ok((sum / a.len() as f64).sqrt())
}

/// In-frame RMSD restricted to the listed atoms.
pub fn rmsd_subset(a: &Conformation, b: &Conformation, atoms: &[usize]) -> Result<f64, GeometryError> {
    if a.len() != b.len() {
        return Err(GeometryError::LengthMismatch(a.len(), b.len()));
    }
    if atoms.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = atoms.iter().map(|&i| (a.positions[i] - b.positions[i]).norm_squared()).sum();
    Ok((sum / atoms.len() as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molmodel::{detect_torsions, parse_smiles};
    use std::f64::consts::PI;

    #[test]
    fn distance_sum_examples() {
        let two = Conformation::new(vec![Vec3::zeros(), Vec3::new(1.54, 0.0, 0.0)]);
        assert!((internal_distance_sum(&two) - 1.54).abs() < 1e-12);
        let h = 3f64.sqrt() / 2.0;
        let tri = Conformation::new(vec![Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.5, h, 0.0)]);
        assert!((internal_distance_sum(&tri) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rmsd_examples() {
        let a = Conformation::new(vec![Vec3::new(1.0, 2.0, 3.0), Vec3::new(-1.0, 0.5, 2.0)]);
        assert_eq!(rmsd(&a, &a), Ok(0.0));
        let b = a.translated(Vec3::new(3.0, 0.0, 0.0));
        assert!((rmsd(&a, &b).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(rmsd(&a, &Conformation::new(vec![])), Err(GeometryError::LengthMismatch(2, 0)));
    }

    #[test]
    fn degenerate_axis() {
        let lig = detect_torsions(parse_smiles("CCCC").unwrap());
        let conf = Conformation::new(vec![Vec3::zeros(); 4]);
        assert_eq!(apply_torsion(&conf, &lig, &lig.torsions[0], 1.0), Err(GeometryError::DegenerateAxis));
    }

    #[test]
    fn butane_anti_vs_gauche() {
        let lig = detect_torsions(parse_smiles("CCCC").unwrap());
        let conf = embed_3d(&lig);
        let d14 = |c: &Conformation| (c.positions[0] - c.positions[3]).norm();
        let rotated = apply_torsion(&conf, &lig, &lig.torsions[0], PI).unwrap();
        let full = apply_torsion(&conf, &lig, &lig.torsions[0], 2.0 * PI).unwrap();
        assert!(rmsd(&conf, &full).unwrap() < 1e-9);
        // the embedding places butane anti; a half turn gives the syn form
        let (b, theta) = (1.54_f64, 109.5_f64.to_radians());
        assert!((d14(&conf) - analytic_14(b, theta, PI)).abs() < 1e-9);
        assert!((d14(&rotated) - analytic_14(b, theta, 0.0)).abs() < 1e-9);
        assert!(d14(&conf) > d14(&rotated) + 1.0);
    }

    /// 1-4 distance of a chain with equal bond lengths and angles at the
    /// given dihedral (0 = syn).
    fn analytic_14(b: f64, theta: f64, dihedral: f64) -> f64 {
        let p1 = Vec3::new(b * theta.cos(), b * theta.sin(), 0.0);
        let p4 = Vec3::new(
            b - b * theta.cos(),
            b * theta.sin() * dihedral.cos(),
            b * theta.sin() * dihedral.sin(),
        );
        (p1 - p4).norm()
    }
}
