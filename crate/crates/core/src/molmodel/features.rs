//! Cheap descriptors computed straight from SMILES, used to predict docking
//! time before any 3D work is done.

use super::{graph, parse_smiles, Ligand, SmilesError};

/// `[n_heavy, n_rings, n_chains, heavy*rings, heavy*chains, rings*chains]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; 6]);

impl FeatureVector {
    pub const LEN: usize = 6;

    pub fn from_counts(n_heavy: usize, n_rings: usize, n_chains: usize) -> Self {
        let (h, r, c) = (n_heavy as f64, n_rings as f64, n_chains as f64);
        FeatureVector([h, r, c, h * r, h * c, r * c])
    }

    pub fn values(&self) -> &[f64; 6] {
        &self.0
    }
}

/// Heavy atoms, cyclomatic ring count and acyclic heavy-heavy bonds.
pub fn graph_counts(ligand: &Ligand) -> (usize, usize, usize) {
    let heavy = ligand.heavy_count();
    let rings = graph::cyclomatic_number(ligand.atoms.len(), &ligand.bonds);
    let bridges = graph::bridge_mask(ligand.atoms.len(), &ligand.bonds);
    let chains = ligand
        .bonds
        .iter()
        .zip(&bridges)
        .filter(|(b, &bridge)| bridge && ligand.atoms[b.a].is_heavy && ligand.atoms[b.b].is_heavy)
        .count();
    (heavy, rings, chains)
}

pub fn smiles_features(text: &str) -> Result<FeatureVector, SmilesError> {
    let ligand = parse_smiles(text)?;
    let (h, r, c) = graph_counts(&ligand);
    Ok(FeatureVector::from_counts(h, r, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(smiles_features("CCO").unwrap().0, [3.0, 0.0, 2.0, 0.0, 6.0, 0.0]);
        assert_eq!(smiles_features("C1CCCCC1").unwrap().0, [6.0, 1.0, 0.0, 6.0, 0.0, 0.0]);
        assert_eq!(smiles_features("C1CCCCC1CC").unwrap().0, [8.0, 1.0, 2.0, 8.0, 16.0, 2.0]);
    }

    #[test]
    fn parse_errors_propagate() {
        assert!(smiles_features("C1CC").is_err());
    }
}
