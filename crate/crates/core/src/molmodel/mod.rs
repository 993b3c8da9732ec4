//! Molecules, pockets and their on-disk forms.
//!
//! A [`Ligand`] is the unit of work of the whole platform: a heavy-atom graph
//! parsed from SMILES, later completed with hydrogens, coordinates and the
//! list of rotatable (torsional) bonds. Ligands travel between stages in the
//! compact binary record format implemented in [`codec`].

pub mod codec;
mod element;
pub mod features;
pub mod graph;
pub mod mol2;
pub mod pocket;
pub mod smiles;

use nalgebra::Vector3;
use thiserror::Error;

pub use codec::{decode_record, encode_record, find_record_start, CodecError, RecordStart};
pub use element::{ContactClass, Element};
pub use features::{smiles_features, FeatureVector};
pub use graph::detect_torsions;
pub use mol2::{read_mol2, write_mol2, Mol2Error};
pub use pocket::{Pocket, PocketError, ProteinAtom};
pub use smiles::{parse_smiles, SmilesError};

pub type Vec3 = Vector3<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub element: Element,
    pub position: Vec3,
    pub is_heavy: bool,
}

impl Atom {
    pub fn new(element: Element) -> Self {
        Atom {
            element,
            position: Vec3::zeros(),
            is_heavy: element != Element::H,
        }
    }

    pub fn at(element: Element, position: Vec3) -> Self {
        Atom {
            position,
            ..Atom::new(element)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    pub fn code(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            1 => BondOrder::Single,
            2 => BondOrder::Double,
            3 => BondOrder::Triple,
            4 => BondOrder::Aromatic,
            _ => return None,
        })
    }

    /// Contribution to the valence of each endpoint (aromatic counted as 1).
    pub fn valence(self) -> u32 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

impl Bond {
    pub fn new(a: usize, b: usize, order: BondOrder) -> Self {
        Bond { a, b, order }
    }

    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }
}

/// A rotatable bridge bond together with the two atom sets it separates.
///
/// `right_set` holds the side of `bonds[bond_index].b` and is the side that
/// moves when the torsion is rotated. Both sets are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionalBond {
    pub bond_index: usize,
    pub left_set: Vec<usize>,
    pub right_set: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ligand {
    /// SMILES text the ligand was built from.
    pub name: String,
    pub atoms: Vec<Atom>,
    pub bonds: Vec<Bond>,
    pub torsions: Vec<TorsionalBond>,
}

#[derive(Debug, Error, PartialEq)]
pub enum LigandError {
    #[error("bond {bond} references atom {atom} but the ligand has {n_atoms} atoms")]
    BondOutOfRange {
        bond: usize,
        atom: usize,
        n_atoms: usize,
    },
    #[error("bond {0} connects an atom to itself")]
    SelfBond(usize),
    #[error("atoms {0} and {1} are bonded more than once")]
    DuplicateBond(usize, usize),
    #[error("molecular graph is disconnected")]
    Disconnected,
    #[error("atom {0} has a non-finite coordinate")]
    NonFinitePosition(usize),
    #[error("atom {0} heavy flag disagrees with its element")]
    HeavyFlag(usize),
    #[error("torsion {0} is not a valid bridge partition")]
    BadTorsion(usize),
}

impl Ligand {
    pub fn new(name: impl Into<String>, atoms: Vec<Atom>, bonds: Vec<Bond>) -> Self {
        Ligand {
            name: name.into(),
            atoms,
            bonds,
            torsions: Vec::new(),
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn heavy_count(&self) -> usize {
        self.atoms.iter().filter(|a| a.is_heavy).count()
    }

    pub fn heavy_indices(&self) -> Vec<usize> {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_heavy)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn positions(&self) -> Vec<Vec3> {
        self.atoms.iter().map(|a| a.position).collect()
    }

    pub fn set_positions(&mut self, positions: &[Vec3]) {
        assert_eq!(positions.len(), self.atoms.len());
        for (atom, p) in self.atoms.iter_mut().zip(positions) {
            atom.position = *p;
        }
    }

    /// Rounds every coordinate to the nearest 32-bit float, i.e. the value
    /// the binary record stores.
    pub fn quantize(&mut self) {
        for atom in &mut self.atoms {
            atom.position = atom.position.map(|c| c as f32 as f64);
        }
    }

    /// Adjacency lists in ascending neighbor order: `(neighbor, bond index)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.atoms.len()];
        for (i, bond) in self.bonds.iter().enumerate() {
            adj[bond.a].push((bond.b, i));
            adj[bond.b].push((bond.a, i));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Checks every structural invariant. Cheap enough to run on decode.
    pub fn validate(&self) -> Result<(), LigandError> {
        let n = self.atoms.len();
        for (i, atom) in self.atoms.iter().enumerate() {
            if !atom.position.iter().all(|c| c.is_finite()) {
                return Err(LigandError::NonFinitePosition(i));
            }
            if atom.is_heavy != (atom.element != Element::H) {
                return Err(LigandError::HeavyFlag(i));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (i, bond) in self.bonds.iter().enumerate() {
            for atom in [bond.a, bond.b] {
                if atom >= n {
                    return Err(LigandError::BondOutOfRange {
                        bond: i,
                        atom,
                        n_atoms: n,
                    });
                }
            }
            if bond.a == bond.b {
                return Err(LigandError::SelfBond(i));
            }
            let key = (bond.a.min(bond.b), bond.a.max(bond.b));
            if !seen.insert(key) {
                return Err(LigandError::DuplicateBond(key.0, key.1));
            }
        }
        if n > 0 && graph::component_count(n, &self.bonds) != 1 {
            return Err(LigandError::Disconnected);
        }
        for (k, torsion) in self.torsions.iter().enumerate() {
            let bond = self
                .bonds
                .get(torsion.bond_index)
                .ok_or(LigandError::BadTorsion(k))?;
            match graph::bridge_partition(self, torsion.bond_index) {
                Some((left, right))
                    if left == torsion.left_set
                        && right == torsion.right_set
                        && left.binary_search(&bond.a).is_ok()
                        && right.binary_search(&bond.b).is_ok() => {}
                _ => return Err(LigandError::BadTorsion(k)),
            }
        }
        Ok(())
    }
}
