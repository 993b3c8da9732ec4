use std::collections::HashMap;

use super::DockError;
use crate::geometry::Conformation;
use crate::molmodel::{Ligand, Pocket, ProteinAtom, Vec3};

pub const CLASH_DISTANCE: f64 = 1.5;
pub const CONTACT_DISTANCE: f64 = 4.0;
pub const CLASH_VALUE: f64 = -10.0;
pub const CONTACT_VALUE: f64 = 1.0;

/// Voxel value at `x` given its distance to the nearest protein heavy atom.
pub fn voxel_value(min_distance: f64, x: &Vec3, center: &Vec3, radius: f64) -> f64 {
    if min_distance < CLASH_DISTANCE {
        CLASH_VALUE
    } else if min_distance <= CONTACT_DISTANCE && (x - center).norm() <= radius {
        CONTACT_VALUE
    } else {
        0.0
    }
}

/// Builds the steric grid over the cube of half-width `radius` around
/// `center`. The box is centred exactly on `center`.
pub fn build_pocket(protein_atoms: &[ProteinAtom], center: Vec3, radius: f64, spacing: f64) -> Result<Pocket, DockError> {
    if !(0.25..=1.0).contains(&spacing) {
        return Err(DockError::BadSpacing(spacing));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(DockError::BadRadius(radius));
    }
    let heavy: Vec<Vec3> = protein_atoms
        .iter()
        .filter(|a| a.element != crate::molmodel::Element::H)
        .map(|a| a.position)
        .collect();
    if heavy.is_empty() {
        return Err(DockError::EmptyProtein);
    }
    let n = ((2.0 * radius / spacing) - 1e-9).ceil() as usize + 1;
    let n = n.max(2);
    let origin = center - Vec3::repeat((n - 1) as f64 * spacing / 2.0);

    let cell = |p: &Vec3| -> (i64, i64, i64) {
        let q = p / CONTACT_DISTANCE;
        (q.x.floor() as i64, q.y.floor() as i64, q.z.floor() as i64)
    };
    let mut cells: HashMap<(i64, i64, i64), Vec<Vec3>> = HashMap::new();
    for p in &heavy {
        cells.entry(cell(p)).or_default().push(*p);
    }

    let mut pocket = Pocket::new("pocket", origin, spacing, [n, n, n], vec![0.0; n * n * n], protein_atoms.to_vec())
        .map_err(DockError::Pocket)?;
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let x = pocket.node(i, j, k);
                let (cx, cy, cz) = cell(&x);
                let mut best = f64::INFINITY;
                for dz in -1..=1 {
                    for dy in -1..=1 {
                        for dx in -1..=1 {
                            if let Some(list) = cells.get(&(cx + dx, cy + dy, cz + dz)) {
                                for p in list {
                                    best = best.min((x - p).norm());
                                }
                            }
                        }
                    }
                }
                let idx = pocket.index(i, j, k);
                pocket.values[idx] = voxel_value(best, &x, &center, radius);
            }
        }
    }
    Ok(pocket)
}

/// Sum of interpolated grid values over heavy atoms. Adds the number of
/// heavy atoms sampled to `evals`.
pub fn geo_score(pocket: &Pocket, ligand: &Ligand, conf: &Conformation, evals: &mut u64) -> f64 {
    let mut score = 0.0;
    let mut n = 0;
    for (atom, p) in ligand.atoms.iter().zip(&conf.positions) {
        if atom.is_heavy {
            score += pocket.sample(p);
            n += 1;
        }
    }
    *evals += n;
    score
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molmodel::{Atom, Element};

    fn carbon_at(p: Vec3) -> ProteinAtom {
        ProteinAtom {
            element: Element::C,
            position: p,
        }
    }

    #[test]
    fn spec_examples() {
        let pocket = build_pocket(&[carbon_at(Vec3::zeros())], Vec3::zeros(), 5.0, 0.5).unwrap();
        assert_eq!(pocket.center(), Vec3::zeros());
        assert_eq!(pocket.sample(&Vec3::new(1.0, 0.0, 0.0)), CLASH_VALUE);
        assert_eq!(pocket.sample(&Vec3::new(0.0, 3.0, 0.0)), CONTACT_VALUE);
        assert_eq!(pocket.sample(&Vec3::new(0.0, 0.0, 4.5)), 0.0);
    }

    #[test]
    fn argument_errors() {
        let atoms = [carbon_at(Vec3::zeros())];
        assert!(matches!(build_pocket(&atoms, Vec3::zeros(), 4.0, 0.1), Err(DockError::BadSpacing(_))));
        assert!(matches!(build_pocket(&atoms, Vec3::zeros(), 0.0, 0.5), Err(DockError::BadRadius(_))));
        assert!(matches!(build_pocket(&[], Vec3::zeros(), 4.0, 0.5), Err(DockError::EmptyProtein)));
    }

    #[test]
    fn geo_score_counts_heavy_atoms_only() {
        let pocket = build_pocket(&[carbon_at(Vec3::zeros())], Vec3::zeros(), 3.0, 0.5).unwrap();
        let lig = Ligand::new(
            "CH",
            vec![Atom::new(Element::C), Atom::new(Element::H)],
            vec![crate::molmodel::Bond::new(0, 1, crate::molmodel::BondOrder::Single)],
        );
        let conf = Conformation::new(vec![Vec3::new(50.0, 0.0, 0.0), Vec3::new(51.0, 0.0, 0.0)]);
        let mut evals = 0;
        assert_eq!(geo_score(&pocket, &lig, &conf, &mut evals), -10.0);
        assert_eq!(evals, 1);
    }
}
