use crate::geometry::Conformation;
use crate::molmodel::{ContactClass, Ligand, Pocket};

pub const CONTACT_CUTOFF: f64 = 4.5;
pub const FULL_CONTACT: f64 = 3.5;
pub const CLASH_CUTOFF: f64 = 2.0;
pub const CLASH_PENALTY: f64 = 5.0;

pub fn contact_weight(a: ContactClass, b: ContactClass) -> f64 {
    use ContactClass::*;
    match (a, b) {
        (Other, _) | (_, Other) => 0.05,
        (Hydrophobic, Hydrophobic) => 0.4,
        (Polar, Polar) => 1.0,
        _ => 0.1,
    }
}

/// 1 up to 3.5 Å, linear down to 0 at 4.5 Å.
pub fn ramp(d: f64) -> f64 {
    if d <= FULL_CONTACT {
        1.0
    } else if d < CONTACT_CUTOFF {
        (CONTACT_CUTOFF - d) / (CONTACT_CUTOFF - FULL_CONTACT)
    } else {
        0.0
    }
}

/// Class-weighted pairwise contact score between ligand heavy atoms and the
/// pocket's protein atoms.
pub fn chem_score(pocket: &Pocket, ligand: &Ligand, conf: &Conformation) -> f64 {
    let mut score = 0.0;
    for (atom, p) in ligand.atoms.iter().zip(&conf.positions) {
        if !atom.is_heavy {
            continue;
        }
        let class = atom.element.contact_class();
        for prot in &pocket.protein_atoms {
            let d = (p - prot.position).norm();
            if d >= CONTACT_CUTOFF {
                continue;
            }
            score += contact_weight(class, prot.element.contact_class()) * ramp(d);
            if d < CLASH_CUTOFF {
                score -= CLASH_PENALTY;
            }
        }
    }
    score
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molmodel::{Atom, Element, ProteinAtom, Vec3};

    fn pocket(atoms: Vec<ProteinAtom>) -> Pocket {
        Pocket::new("p", Vec3::zeros(), 1.0, [2, 2, 2], vec![0.0; 8], atoms).unwrap()
    }

    #[test]
    fn single_contact() {
        let p = pocket(vec![ProteinAtom {
            element: Element::C,
            position: Vec3::zeros(),
        }]);
        let lig = Ligand::new("C", vec![Atom::new(Element::C)], vec![]);
        let at = |x: f64| Conformation::new(vec![Vec3::new(x, 0.0, 0.0)]);
        assert!((chem_score(&p, &lig, &at(3.0)) - 0.4).abs() < 1e-15);
        assert_eq!(chem_score(&p, &lig, &at(4.6)), 0.0);
        assert!((chem_score(&p, &lig, &at(4.0)) - 0.2).abs() < 1e-12);
        assert!((chem_score(&p, &lig, &at(1.0)) - (0.4 - 5.0)).abs() < 1e-12);
    }

    #[test]
    fn weights_are_symmetric() {
        use ContactClass::*;
        for a in [Hydrophobic, Polar, Other] {
            for b in [Hydrophobic, Polar, Other] {
                assert_eq!(contact_weight(a, b), contact_weight(b, a));
            }
        }
    }
}
