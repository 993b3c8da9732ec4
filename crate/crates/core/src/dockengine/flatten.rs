use std::f64::consts::TAU;

use crate::geometry::{apply_torsions, internal_distance_sum, Conformation, GeometryError};
use crate::molmodel::Ligand;

pub const FLATTEN_STEPS: usize = 36;
pub const MAX_SWEEPS: usize = 20;
const TIE: f64 = 1e-9;

/// Angle of grid step `k` (10° per step), in radians.
pub fn grid_angle(k: usize) -> f64 {
    (k as f64 * 10.0).to_radians()
}

/// Coordinate ascent on the internal distance sum over 10° torsion steps.
/// Returns the unfolded conformation and the absolute torsion angles that
/// produce it from `conf` via [`apply_torsions`].
pub fn flatten(ligand: &Ligand, conf: &Conformation) -> Result<(Conformation, Vec<f64>), GeometryError> {
    let m = ligand.torsions.len();
    let mut angles = vec![0.0; m];
    if m == 0 {
        return Ok((conf.clone(), angles));
    }
    let mut current = internal_distance_sum(conf);
    for _ in 0..MAX_SWEEPS {
        let mut changed = false;
        for t in 0..m {
            let base = angles[t];
            let mut best = (0, current);
            for k in 1..FLATTEN_STEPS {
                angles[t] = (base + grid_angle(k)).rem_euclid(TAU);
                let score = internal_distance_sum(&apply_torsions(conf, ligand, &angles)?);
                if score > best.1 + TIE {
                    best = (k, score);
                }
            }
            angles[t] = if best.0 == 0 { base } else { (base + grid_angle(best.0)).rem_euclid(TAU) };
            if best.0 != 0 {
                current = best.1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok((apply_torsions(conf, ligand, &angles)?, angles))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{add_hydrogens, apply_torsion, embed_3d};
    use crate::molmodel::{detect_torsions, parse_smiles};

    fn prepared(smiles: &str) -> (Ligand, Conformation) {
        let lig = detect_torsions(add_hydrogens(&parse_smiles(smiles).unwrap()).unwrap());
        let conf = embed_3d(&lig);
        (lig, conf)
    }

    #[test]
    fn rigid_ligand_is_untouched() {
        let (lig, conf) = prepared("c1ccccc1");
        let (flat, angles) = flatten(&lig, &conf).unwrap();
        assert_eq!(flat, conf);
        assert!(angles.is_empty());
    }

    #[test]
    fn one_torsion_matches_scan() {
        let (lig, conf) = prepared("CCCO");
        assert_eq!(lig.torsions.len(), 1);
        let mut best = (0, internal_distance_sum(&conf));
        for k in 1..36 {
            let s = internal_distance_sum(&apply_torsion(&conf, &lig, &lig.torsions[0], grid_angle(k)).unwrap());
            if s > best.1 + 1e-9 {
                best = (k, s);
            }
        }
        let (flat, angles) = flatten(&lig, &conf).unwrap();
        assert_eq!(angles, vec![grid_angle(best.0)]);
        assert_eq!(internal_distance_sum(&flat), best.1);
    }
}
