//! Parser for the organic SMILES subset used by screening libraries.
//!
//! Supported: `B C N O P S F Cl Br I`, aromatic `c n o s`, branches,
//! ring-closure digits `1`-`9` and the bond symbols `- = # :`. Bracket atoms,
//! charges, isotopes and stereochemistry are rejected with
//! [`SmilesError::Unsupported`].

use std::collections::HashSet;

use thiserror::Error;

use super::{graph, Atom, Bond, BondOrder, Element, Ligand};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmilesError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unsupported SMILES feature at byte {offset}: {feature}")]
    Unsupported { offset: usize, feature: &'static str },
    #[error("molecule is not connected")]
    Disconnected,
}

fn syntax(offset: usize, message: impl Into<String>) -> SmilesError {
    SmilesError::Syntax {
        offset,
        message: message.into(),
    }
}

/// Per-atom aromatic flags alongside the graph.
struct Builder {
    atoms: Vec<Atom>,
    aromatic: Vec<bool>,
    bonds: Vec<Bond>,
    pairs: HashSet<(usize, usize)>,
}

impl Builder {
    fn bond(&mut self, a: usize, b: usize, explicit: Option<BondOrder>, offset: usize) -> Result<(), SmilesError> {
        if a == b {
            return Err(syntax(offset, "atom bonded to itself"));
        }
        if !self.pairs.insert((a.min(b), a.max(b))) {
            return Err(syntax(offset, "duplicate bond between the same atoms"));
        }
        let order = explicit.unwrap_or(if self.aromatic[a] && self.aromatic[b] {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        });
        self.bonds.push(Bond::new(a, b, order));
        Ok(())
    }
}

/// Parses `text` into a heavy-atom graph. Coordinates are zero and no
/// torsions are detected.
pub fn parse_smiles(text: &str) -> Result<Ligand, SmilesError> {
    let bytes = text.as_bytes();
    if bytes.is_empty() {
        return Err(syntax(0, "empty SMILES"));
    }
    let mut builder = Builder {
        atoms: Vec::new(),
        aromatic: Vec::new(),
        bonds: Vec::new(),
        pairs: HashSet::new(),
    };
    let mut prev: Option<usize> = None;
    let mut branches: Vec<Option<usize>> = Vec::new();
    let mut pending_bond: Option<(BondOrder, usize)> = None;
    // ring digit -> (atom, bond symbol at opening, offset)
    let mut rings: [Option<(usize, Option<BondOrder>, usize)>; 10] = [None; 10];
    let mut i = 0;

    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let atom = match c {
            b'C' if bytes.get(i + 1) == Some(&b'l') => {
                i += 1;
                Some((Element::Cl, false))
            }
            b'B' if bytes.get(i + 1) == Some(&b'r') => {
                i += 1;
                Some((Element::Br, false))
            }
            b'B' => Some((Element::B, false)),
            b'C' => Some((Element::C, false)),
            b'N' => Some((Element::N, false)),
            b'O' => Some((Element::O, false)),
            b'P' => Some((Element::P, false)),
            b'S' => Some((Element::S, false)),
            b'F' => Some((Element::F, false)),
            b'I' => Some((Element::I, false)),
            b'c' => Some((Element::C, true)),
            b'n' => Some((Element::N, true)),
            b'o' => Some((Element::O, true)),
            b's' => Some((Element::S, true)),
            _ => None,
        };
        if let Some((element, aromatic)) = atom {
            let idx = builder.atoms.len();
            builder.atoms.push(Atom::new(element));
            builder.aromatic.push(aromatic);
            if let Some(p) = prev {
                let order = pending_bond.take().map(|(o, _)| o);
                builder.bond(p, idx, order, start)?;
            } else if let Some((_, off)) = pending_bond {
                return Err(syntax(off, "bond symbol without a preceding atom"));
            }
            prev = Some(idx);
            i += 1;
            continue;
        }
        match c {
            b'-' | b'=' | b'#' | b':' => {
                if pending_bond.is_some() {
                    return Err(syntax(i, "two consecutive bond symbols"));
                }
                if prev.is_none() {
                    return Err(syntax(i, "bond symbol without a preceding atom"));
                }
                let order = match c {
                    b'-' => BondOrder::Single,
                    b'=' => BondOrder::Double,
                    b'#' => BondOrder::Triple,
                    _ => BondOrder::Aromatic,
                };
                pending_bond = Some((order, i));
            }
            b'(' => {
                if prev.is_none() {
                    return Err(syntax(i, "branch without a preceding atom"));
                }
                if pending_bond.is_some() {
                    return Err(syntax(i, "bond symbol before a branch"));
                }
                branches.push(prev);
            }
            b')' => {
                if pending_bond.is_some() {
                    return Err(syntax(i, "dangling bond symbol at branch end"));
                }
                if i > 0 && bytes[i - 1] == b'(' {
                    return Err(syntax(i, "empty branch"));
                }
                prev = branches.pop().ok_or_else(|| syntax(i, "unbalanced ')'"))?;
            }
            b'1'..=b'9' => {
                let atom = prev.ok_or_else(|| syntax(i, "ring closure without an atom"))?;
                let digit = (c - b'0') as usize;
                let symbol = pending_bond.take();
                match rings[digit].take() {
                    None => rings[digit] = Some((atom, symbol.map(|(o, _)| o), i)),
                    Some((other, open_order, _)) => {
                        let close_order = symbol.map(|(o, _)| o);
                        let order = match (open_order, close_order) {
                            (Some(a), Some(b)) if a != b => {
                                return Err(syntax(i, "conflicting ring-closure bond symbols"))
                            }
                            (a, b) => a.or(b),
                        };
                        builder.bond(other, atom, order, i)?;
                    }
                }
            }
            b'0' | b'%' => return Err(SmilesError::Unsupported { offset: i, feature: "ring-closure number outside 1-9" }),
            b'[' => return Err(SmilesError::Unsupported { offset: i, feature: "bracket atom" }),
            b'@' => return Err(SmilesError::Unsupported { offset: i, feature: "stereochemistry" }),
            b'/' | b'\\' => return Err(SmilesError::Unsupported { offset: i, feature: "directional bond" }),
            b'+' => return Err(SmilesError::Unsupported { offset: i, feature: "charge" }),
            b'*' => return Err(SmilesError::Unsupported { offset: i, feature: "wildcard atom" }),
            b'.' => return Err(SmilesError::Disconnected),
            b'p' | b'b' => return Err(SmilesError::Unsupported { offset: i, feature: "aromatic atom outside c, n, o, s" }),
            _ => return Err(syntax(i, format!("unexpected character {:?}", c as char))),
        }
        i += 1;
    }

    if let Some((_, off)) = pending_bond {
        return Err(syntax(off, "dangling bond symbol"));
    }
    if !branches.is_empty() {
        return Err(syntax(bytes.len(), "unclosed branch"));
    }
    if let Some((_, _, off)) = rings.iter().flatten().next() {
        return Err(syntax(*off, "unclosed ring"));
    }
    if graph::component_count(builder.atoms.len(), &builder.bonds) != 1 {
        return Err(SmilesError::Disconnected);
    }

    // aromaticity survives only through the bond orders
    Ok(Ligand::new(text, builder.atoms, builder.bonds))
}

/// Whether the atom takes part in an aromatic bond.
pub fn is_aromatic(ligand: &Ligand, atom: usize) -> bool {
    ligand
        .bonds
        .iter()
        .any(|b| b.order == BondOrder::Aromatic && (b.a == atom || b.b == atom))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elements(l: &Ligand) -> Vec<Element> {
        l.atoms.iter().map(|a| a.element).collect()
    }

    #[test]
    fn ethanol() {
        let l = parse_smiles("CCO").unwrap();
        assert_eq!(elements(&l), vec![Element::C, Element::C, Element::O]);
        assert_eq!(l.bonds.len(), 2);
        assert!(l.bonds.iter().all(|b| b.order == BondOrder::Single));
        assert!(l.atoms.iter().all(|a| a.position == crate::molmodel::Vec3::zeros()));
    }

    #[test]
    fn cyclohexane() {
        let l = parse_smiles("C1CCCCC1").unwrap();
        assert_eq!((l.atoms.len(), l.bonds.len()), (6, 6));
        assert_eq!(graph::cyclomatic_number(6, &l.bonds), 1);
    }

    #[test]
    fn isobutyric_acid() {
        let l = parse_smiles("CC(C)C(=O)O").unwrap();
        assert_eq!(l.atoms.len(), 6);
        assert_eq!(l.bonds.len(), 5);
        let doubles: Vec<_> = l.bonds.iter().filter(|b| b.order == BondOrder::Double).collect();
        assert_eq!(doubles.len(), 1);
        assert_eq!((doubles[0].a, doubles[0].b), (3, 4));
        assert_eq!(l.bonds[1], Bond::new(1, 2, BondOrder::Single));
        assert_eq!(l.bonds[2], Bond::new(1, 3, BondOrder::Single));
    }

    #[test]
    fn two_letter_halogens() {
        let l = parse_smiles("ClCBr").unwrap();
        assert_eq!(elements(&l), vec![Element::Cl, Element::C, Element::Br]);
    }

    #[test]
    fn aromatic_bonds_are_implicit() {
        let l = parse_smiles("c1ccncc1").unwrap();
        assert!(l.bonds.iter().all(|b| b.order == BondOrder::Aromatic));
        let l = parse_smiles("c1ccccc1C").unwrap();
        assert_eq!(l.bonds.last().unwrap().order, BondOrder::Single);
    }

    #[test]
    fn ring_bond_symbol_on_either_side() {
        let l = parse_smiles("C=1CCCC1").unwrap();
        assert_eq!(l.bonds.last().unwrap().order, BondOrder::Double);
        let l = parse_smiles("C1CCCC=1").unwrap();
        assert_eq!(l.bonds.last().unwrap().order, BondOrder::Double);
        assert!(matches!(parse_smiles("C=1CCCC#1"), Err(SmilesError::Syntax { .. })));
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        assert_eq!(parse_smiles("").unwrap_err(), syntax(0, "empty SMILES"));
        assert!(matches!(parse_smiles("CC)"), Err(SmilesError::Syntax { offset: 2, .. })));
        assert!(matches!(parse_smiles("C(C"), Err(SmilesError::Syntax { offset: 3, .. })));
        assert!(matches!(parse_smiles("C1CC"), Err(SmilesError::Syntax { offset: 1, .. })));
        assert!(matches!(parse_smiles("CX"), Err(SmilesError::Syntax { offset: 1, .. })));
        assert!(matches!(parse_smiles("C=(C)"), Err(SmilesError::Syntax { offset: 2, .. })));
        assert!(matches!(parse_smiles("C12CC12"), Err(SmilesError::Syntax { .. })));
        assert!(matches!(parse_smiles("C=="), Err(SmilesError::Syntax { offset: 2, .. })));
    }

    #[test]
    fn unsupported_features_are_named() {
        for (s, feature) in [
            ("C[NH4+]", "bracket atom"),
            ("C/C=C/C", "directional bond"),
            ("C%10CC%10", "ring-closure number outside 1-9"),
        ] {
            match parse_smiles(s) {
                Err(SmilesError::Unsupported { feature: f, .. }) => assert_eq!(f, feature),
                other => panic!("{s}: {other:?}"),
            }
        }
    }

    #[test]
    fn dot_is_disconnected() {
        assert_eq!(parse_smiles("CC.O"), Err(SmilesError::Disconnected));
    }
}
