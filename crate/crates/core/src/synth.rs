//! Deterministic generators for test libraries and pockets.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dockengine::{build_pocket, fibonacci_axis, DockError};
use crate::molmodel::{Element, Pocket, ProteinAtom, Vec3};

const TERMINALS: &[&str] = &["F", "Cl", "Br", "O", "N", "C#N", "C(F)(F)F", "OC", "C(=O)O", "C", "CC"];
const PREFIXES: &[&str] = &["C", "CC", "OC", "NC", "F", "Cl", "CO"];
const LINKERS: &[&str] = &["C", "CC", "CCC", "O", "N", "C(=O)N", "C(=O)O", "S", "CO", "CN"];

fn ring(rng: &mut ChaCha8Rng, digit: usize, tail: &str) -> String {
    let d = digit;
    match rng.random_range(0..6) {
        0 => format!("c{d}ccc({tail})cc{d}"),
        1 => format!("C{d}CCC({tail})CC{d}"),
        2 => format!("c{d}cc({tail})ncc{d}"),
        3 => format!("C{d}CCN({tail})CC{d}"),
        4 => format!("c{d}ccc({tail})s{d}"),
        _ => format!("c{d}ccc({tail})o{d}"),
    }
}

fn grow(rng: &mut ChaCha8Rng, depth: usize, budget: usize) -> String {
    if budget == 0 || depth >= 8 {
        return TERMINALS.choose(rng).unwrap().to_string();
    }
    if rng.random_bool(0.4) {
        let tail = grow(rng, depth + 1, budget - 1);
        ring(rng, depth + 1, &tail)
    } else {
        let linker = LINKERS.choose(rng).unwrap();
        format!("{linker}{}", grow(rng, depth + 1, budget - 1))
    }
}

/// One drug-like SMILES string of roughly `pieces` building blocks.
pub fn random_smiles(rng: &mut ChaCha8Rng, pieces: usize) -> String {
    let tail = grow(rng, 1, pieces.saturating_sub(1));
    let head = ring(rng, 1, &tail);
    if rng.random_bool(0.3) {
        format!("{}{head}", PREFIXES.choose(rng).unwrap())
    } else {
        head
    }
}

/// `n` SMILES strings drawn from one seeded stream.
pub fn library(n: usize, seed: u64, min_pieces: usize, max_pieces: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let pieces = rng.random_range(min_pieces..=max_pieces);
            random_smiles(&mut rng, pieces)
        })
        .collect()
}

/// Library file text: `SMILES id` per line.
pub fn library_text(smiles: &[String]) -> String {
    smiles
        .iter()
        .enumerate()
        .map(|(i, s)| format!("{s} L{i:06}\n"))
        .collect()
}

/// Protein atoms lining a roughly spherical cavity with an opening on +z.
pub fn cavity_atoms(seed: u64, cavity_radius: f64) -> Vec<ProteinAtom> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let elements = [Element::C, Element::C, Element::C, Element::N, Element::O, Element::O, Element::S];
    let k = 160;
    let mut atoms = Vec::new();
    for i in 0..k {
        let axis = fibonacci_axis(i, k);
        if axis.z > 0.6 {
            continue;
        }
        let r = cavity_radius + rng.random_range(-0.6..0.6);
        let jitter = Vec3::new(
            rng.random_range(-0.4..0.4),
            rng.random_range(-0.4..0.4),
            rng.random_range(-0.4..0.4),
        );
        atoms.push(ProteinAtom {
            element: *elements.choose(&mut rng).unwrap(),
            position: axis * r + jitter,
        });
    }
    atoms
}

/// A cavity pocket centred on the origin.
pub fn pocket(id: &str, seed: u64) -> Result<Pocket, DockError> {
    let mut p = build_pocket(&cavity_atoms(seed, 7.0), Vec3::zeros(), 10.0, 0.5)?;
    p.id = id.to_string();
    Ok(p)
}
