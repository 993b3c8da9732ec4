//! TRIPOS Mol2 subset: MOLECULE, ATOM and BOND sections.
//!
//! Atom types are plain element symbols. Coordinates are written with four
//! decimals.

use std::fmt::Write;

use thiserror::Error;

use super::{Atom, Bond, BondOrder, Element, Ligand, Vec3};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Mol2Error {
    #[error("line {line}: malformed {section} section: {reason}")]
    Malformed {
        line: usize,
        section: &'static str,
        reason: String,
    },
    #[error("missing @<TRIPOS>{0} section")]
    MissingSection(&'static str),
    #[error("declared {declared} {what} but found {found}")]
    CountMismatch {
        what: &'static str,
        declared: usize,
        found: usize,
    },
}

fn bond_type(order: BondOrder) -> &'static str {
    match order {
        BondOrder::Single => "1",
        BondOrder::Double => "2",
        BondOrder::Triple => "3",
        BondOrder::Aromatic => "ar",
    }
}

pub fn write_mol2(ligand: &Ligand) -> String {
    let mut out = String::with_capacity(128 + 80 * ligand.atoms.len() + 24 * ligand.bonds.len());
    out.push_str("@<TRIPOS>MOLECULE\n");
    out.push_str(&ligand.name);
    out.push('\n');
    let _ = writeln!(out, "{:>5} {:>5}     0     0     0", ligand.atoms.len(), ligand.bonds.len());
    out.push_str("SMALL\nNO_CHARGES\n\n");
    out.push_str("@<TRIPOS>ATOM\n");
    for (i, atom) in ligand.atoms.iter().enumerate() {
        let symbol = atom.element.symbol();
        let label = format!("{symbol}{}", i + 1);
        let p = atom.position;
        let _ = writeln!(
            out,
            "{:>7} {:<8} {:>10.4} {:>10.4} {:>10.4} {:<6} {:>4} {:<8} {:>8.4}",
            i + 1,
            label,
            p.x,
            p.y,
            p.z,
            symbol,
            1,
            "LIG1",
            0.0
        );
    }
    out.push_str("@<TRIPOS>BOND\n");
    for (i, bond) in ligand.bonds.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:>6} {:>5} {:>5} {}",
            i + 1,
            bond.a + 1,
            bond.b + 1,
            bond_type(bond.order)
        );
    }
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Molecule,
    Atom,
    Bond,
    Other,
}

/// Parses the first molecule of a Mol2 document. Torsions are left empty.
pub fn read_mol2(text: &str) -> Result<Ligand, Mol2Error> {
    let mut section = Section::None;
    let mut molecule_lines: Vec<&str> = Vec::new();
    let mut atoms: Vec<Atom> = Vec::new();
    let mut bonds: Vec<Bond> = Vec::new();
    let mut seen_molecule = false;
    let mut seen_atom = false;
    let mut seen_bond = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if let Some(name) = line.strip_prefix("@<TRIPOS>") {
            section = match name.trim() {
                "MOLECULE" if seen_molecule => break,
                "MOLECULE" => {
                    seen_molecule = true;
                    Section::Molecule
                }
                "ATOM" => {
                    seen_atom = true;
                    Section::Atom
                }
                "BOND" => {
                    seen_bond = true;
                    Section::Bond
                }
                "" => {
                    return Err(Mol2Error::Malformed {
                        line: line_no,
                        section: "header",
                        reason: "empty section name".into(),
                    })
                }
                _ => Section::Other,
            };
            continue;
        }
        if line.starts_with('@') {
            return Err(Mol2Error::Malformed {
                line: line_no,
                section: "header",
                reason: format!("unrecognised section header {line:?}"),
            });
        }
        match section {
            Section::Molecule => molecule_lines.push(raw),
            Section::Atom if !line.trim().is_empty() => atoms.push(parse_atom(line, line_no)?),
            Section::Bond if !line.trim().is_empty() => bonds.push(parse_bond(line, line_no)?),
            _ => {}
        }
    }

    if !seen_molecule {
        return Err(Mol2Error::MissingSection("MOLECULE"));
    }
    if !seen_atom {
        return Err(Mol2Error::MissingSection("ATOM"));
    }
    let name = molecule_lines.first().map(|s| s.trim().to_owned()).unwrap_or_default();
    let counts = molecule_lines.get(1).ok_or(Mol2Error::Malformed {
        line: 0,
        section: "MOLECULE",
        reason: "missing counts line".into(),
    })?;
    let mut fields = counts.split_whitespace().map(str::parse::<usize>);
    let declared_atoms = match fields.next() {
        Some(Ok(n)) => n,
        _ => {
            return Err(Mol2Error::Malformed {
                line: 0,
                section: "MOLECULE",
                reason: "atom count is not an integer".into(),
            })
        }
    };
    let declared_bonds = match fields.next() {
        Some(Ok(n)) => n,
        None => 0,
        Some(Err(_)) => {
            return Err(Mol2Error::Malformed {
                line: 0,
                section: "MOLECULE",
                reason: "bond count is not an integer".into(),
            })
        }
    };
    if declared_atoms != atoms.len() {
        return Err(Mol2Error::CountMismatch {
            what: "atoms",
            declared: declared_atoms,
            found: atoms.len(),
        });
    }
    if declared_bonds != bonds.len() || (declared_bonds > 0 && !seen_bond) {
        return Err(Mol2Error::CountMismatch {
            what: "bonds",
            declared: declared_bonds,
            found: bonds.len(),
        });
    }
    for (i, bond) in bonds.iter_mut().enumerate() {
        if bond.a == 0 || bond.b == 0 || bond.a > atoms.len() || bond.b > atoms.len() {
            return Err(Mol2Error::Malformed {
                line: 0,
                section: "BOND",
                reason: format!("bond {} references a missing atom", i + 1),
            });
        }
        bond.a -= 1;
        bond.b -= 1;
    }
    Ok(Ligand::new(name, atoms, bonds))
}

fn parse_atom(line: &str, line_no: usize) -> Result<Atom, Mol2Error> {
    let bad = |reason: &str| Mol2Error::Malformed {
        line: line_no,
        section: "ATOM",
        reason: reason.into(),
    };
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() < 6 {
        return Err(bad("expected at least 6 fields"));
    }
    let coord = |s: &str| s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| bad("bad coordinate"));
    let position = Vec3::new(coord(fields[2])?, coord(fields[3])?, coord(fields[4])?);
    // SYBYL types such as "C.3" carry the element before the dot
    let symbol = fields[5].split('.').next().unwrap_or("");
    Ok(Atom::at(Element::from_symbol(symbol), position))
}

fn parse_bond(line: &str, line_no: usize) -> Result<Bond, Mol2Error> {
    let bad = |reason: &str| Mol2Error::Malformed {
        line: line_no,
        section: "BOND",
        reason: reason.into(),
    };
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() < 4 {
        return Err(bad("expected 4 fields"));
    }
    let index = |s: &str| s.parse::<usize>().map_err(|_| bad("bad atom index"));
    let order = match fields[3] {
        "1" | "am" => BondOrder::Single,
        "2" => BondOrder::Double,
        "3" => BondOrder::Triple,
        "ar" => BondOrder::Aromatic,
        other => return Err(bad(&format!("unknown bond type {other:?}"))),
    };
    Ok(Bond::new(index(fields[1])?, index(fields[2])?, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molmodel::parse_smiles;

    fn placed(smiles: &str) -> Ligand {
        let mut l = parse_smiles(smiles).unwrap();
        for (i, a) in l.atoms.iter_mut().enumerate() {
            a.position = Vec3::new(0.123456 * i as f64, -2.5 + i as f64, 10.0 / (i as f64 + 3.0));
        }
        l
    }

    #[test]
    fn round_trip_preserves_graph_and_coordinates() {
        let l = placed("c1ccccc1C(=O)OCC#N");
        let back = read_mol2(&write_mol2(&l)).unwrap();
        assert_eq!(back.name, l.name);
        assert_eq!(back.bonds, l.bonds);
        for (a, b) in l.atoms.iter().zip(&back.atoms) {
            assert_eq!(a.element, b.element);
            assert!((a.position - b.position).abs().max() <= 1e-4);
        }
    }

    #[test]
    fn count_mismatch() {
        let text = write_mol2(&placed("CCCCC"));
        let text = text.replacen("    5     4", "    6     4", 1);
        assert_eq!(
            read_mol2(&text).unwrap_err(),
            Mol2Error::CountMismatch {
                what: "atoms",
                declared: 6,
                found: 5
            }
        );
    }

    #[test]
    fn malformed_header() {
        let text = write_mol2(&placed("CC")).replace("@<TRIPOS>BOND", "@<TRIPOS>");
        assert!(matches!(read_mol2(&text), Err(Mol2Error::Malformed { .. })));
        assert_eq!(read_mol2("hello"), Err(Mol2Error::MissingSection("MOLECULE")));
    }
}
