use thiserror::Error;

use crate::molmodel::smiles::is_aromatic;
use crate::molmodel::{Atom, Bond, BondOrder, Element, Ligand};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HydrogenError {
    #[error("atom {atom} ({element}) has valence {valence}, above its maximum {max}")]
    ValenceViolation {
        atom: usize,
        element: Element,
        valence: u32,
        max: u32,
    },
}

fn implicit_hydrogens(ligand: &Ligand, atom: usize) -> Result<u32, HydrogenError> {
    let element = ligand.atoms[atom].element;
    let valences = element.valences();
    let Some(&max) = valences.last() else {
        return Ok(0);
    };
    let mut used = 0;
    let mut aromatic = false;
    for bond in ligand.bonds.iter().filter(|b| b.a == atom || b.b == atom) {
        used += bond.order.valence();
        aromatic |= bond.order == BondOrder::Aromatic;
    }
    if used > max {
        return Err(HydrogenError::ValenceViolation {
            atom,
            element,
            valence: used,
            max,
        });
    }
    if aromatic || is_aromatic(ligand, atom) {
        // one valence unit goes to the delocalised ring system
        return Ok(valences[0].saturating_sub(used + 1));
    }
    let target = valences.iter().copied().find(|&v| v >= used).unwrap_or(max);
    Ok(target - used)
}

/// Appends hydrogens so every heavy atom reaches its standard valence.
/// Hydrogens are added heavy atom by heavy atom, in index order.
pub fn add_hydrogens(ligand: &Ligand) -> Result<Ligand, HydrogenError> {
    let mut out = ligand.clone();
    for atom in 0..ligand.atoms.len() {
        if !ligand.atoms[atom].is_heavy {
            continue;
        }
        for _ in 0..implicit_hydrogens(ligand, atom)? {
            let h = out.atoms.len();
            out.atoms.push(Atom::new(Element::H));
            out.bonds.push(Bond::new(atom, h, BondOrder::Single));
        }
    }
    out.torsions.clear();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molmodel::parse_smiles;

    fn h_count(smiles: &str) -> usize {
        let l = add_hydrogens(&parse_smiles(smiles).unwrap()).unwrap();
        l.atoms.iter().filter(|a| a.element == Element::H).count()
    }

    #[test]
    fn examples() {
        assert_eq!(h_count("C"), 4);
        assert_eq!(h_count("O"), 2);
        assert_eq!(h_count("c1ccccc1"), 6);
        let benzene = add_hydrogens(&parse_smiles("c1ccccc1").unwrap()).unwrap();
        assert_eq!(benzene.atoms.len(), 12);
    }

    #[test]
    fn common_groups() {
        assert_eq!(h_count("CCO"), 6);
        assert_eq!(h_count("CC(=O)O"), 4);
        assert_eq!(h_count("c1ccncc1"), 5);
        assert_eq!(h_count("C#N"), 1);
        assert_eq!(h_count("CS(=O)(=O)C"), 6);
        assert_eq!(h_count("ClC(Cl)Cl"), 1);
        assert_eq!(h_count("c1ccoc1"), 4);
    }

    #[test]
    fn hydrogens_follow_their_heavy_atom_order() {
        let l = add_hydrogens(&parse_smiles("CO").unwrap()).unwrap();
        let owners: Vec<usize> = l.bonds[1..].iter().map(|b| b.a).collect();
        assert_eq!(owners, vec![0, 0, 0, 1]);
    }

    #[test]
    fn valence_violation() {
        let err = add_hydrogens(&parse_smiles("FC(F)(F)(F)F").unwrap()).unwrap_err();
        assert_eq!(
            err,
            HydrogenError::ValenceViolation {
                atom: 1,
                element: Element::C,
                valence: 5,
                max: 4
            }
        );
    }
}
