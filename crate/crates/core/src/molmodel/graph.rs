//! Graph queries on the bond network: connectivity, bridges, torsions.

use std::collections::VecDeque;

use super::{Bond, BondOrder, Ligand, TorsionalBond};

pub fn component_count(n_atoms: usize, bonds: &[Bond]) -> usize {
    let mut parent: Vec<usize> = (0..n_atoms).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = n_atoms;
    for bond in bonds {
        let (ra, rb) = (find(&mut parent, bond.a), find(&mut parent, bond.b));
        if ra != rb {
            parent[ra] = rb;
            components -= 1;
        }
    }
    components
}

/// Cyclomatic number `bonds - atoms + components`.
pub fn cyclomatic_number(n_atoms: usize, bonds: &[Bond]) -> usize {
    (bonds.len() + component_count(n_atoms, bonds)).saturating_sub(n_atoms)
}

/// Marks every bond that is a bridge (its removal disconnects the graph).
pub fn bridge_mask(n_atoms: usize, bonds: &[Bond]) -> Vec<bool> {
    let mut adj = vec![Vec::new(); n_atoms];
    for (i, bond) in bonds.iter().enumerate() {
        adj[bond.a].push((bond.b, i));
        adj[bond.b].push((bond.a, i));
    }
    let mut is_bridge = vec![false; bonds.len()];
    let mut disc = vec![usize::MAX; n_atoms];
    let mut low = vec![0usize; n_atoms];
    let mut timer = 0;
    // (vertex, bond used to enter, next adjacency position)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n_atoms {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        stack.push((root, usize::MAX, 0));
        while let Some(&mut (v, via, ref mut pos)) = stack.last_mut() {
            if *pos < adj[v].len() {
                let (w, bond) = adj[v][*pos];
                *pos += 1;
                if bond == via {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, bond, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(parent, _, _)) = stack.last() {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > disc[parent] {
                        is_bridge[via] = true;
                    }
                }
            }
        }
    }
    is_bridge
}

/// Splits the atoms into the side of `bond.a` and the side of `bond.b` when
/// the bond is removed. Returns `None` if the bond is not a bridge.
pub fn bridge_partition(ligand: &Ligand, bond_index: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let bond = ligand.bonds.get(bond_index)?;
    let adj = ligand.adjacency();
    let n = ligand.atoms.len();
    let mut on_left = vec![false; n];
    let mut queue = VecDeque::from([bond.a]);
    on_left[bond.a] = true;
    while let Some(v) = queue.pop_front() {
        for &(w, via) in &adj[v] {
            if via != bond_index && !on_left[w] {
                on_left[w] = true;
                queue.push_back(w);
            }
        }
    }
    if on_left[bond.b] {
        return None;
    }
    let (left, right): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| on_left[i]);
    Some((left, right))
}

/// Number of heavy neighbors of every atom.
pub fn heavy_degrees(ligand: &Ligand) -> Vec<usize> {
    let mut degree = vec![0; ligand.atoms.len()];
    for bond in &ligand.bonds {
        if ligand.atoms[bond.a].is_heavy && ligand.atoms[bond.b].is_heavy {
            degree[bond.a] += 1;
            degree[bond.b] += 1;
        }
    }
    degree
}

/// Fills `ligand.torsions` with every rotatable bond: single, bridge, both
/// endpoints heavy with at least two heavy neighbors. Ascending bond order.
pub fn detect_torsions(mut ligand: Ligand) -> Ligand {
    let bridges = bridge_mask(ligand.atoms.len(), &ligand.bonds);
    let degree = heavy_degrees(&ligand);
    let mut torsions = Vec::new();
    for (i, bond) in ligand.bonds.iter().enumerate() {
        let eligible = bond.order == BondOrder::Single
            && bridges[i]
            && ligand.atoms[bond.a].is_heavy
            && ligand.atoms[bond.b].is_heavy
            && degree[bond.a] >= 2
            && degree[bond.b] >= 2;
        if eligible {
            if let Some((left_set, right_set)) = bridge_partition(&ligand, i) {
                torsions.push(TorsionalBond {
                    bond_index: i,
                    left_set,
                    right_set,
                });
            }
        }
    }
    ligand.torsions = torsions;
    ligand
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molmodel::parse_smiles;

    #[test]
    fn bridges_of_ring_with_tail() {
        let lig = parse_smiles("C1CCCCC1CC").unwrap();
        let mask = bridge_mask(lig.atoms.len(), &lig.bonds);
        assert_eq!(mask.iter().filter(|&&b| b).count(), 2);
        assert_eq!(cyclomatic_number(lig.atoms.len(), &lig.bonds), 1);
    }

    #[test]
    fn partition_is_none_for_ring_bond() {
        let lig = parse_smiles("C1CC1").unwrap();
        assert!(bridge_partition(&lig, 0).is_none());
    }

    #[test]
    fn torsion_examples() {
        assert_eq!(detect_torsions(parse_smiles("CCO").unwrap()).torsions.len(), 0);
        assert_eq!(detect_torsions(parse_smiles("c1ccccc1").unwrap()).torsions.len(), 0);
        let butane = detect_torsions(parse_smiles("CCCC").unwrap());
        assert_eq!(butane.torsions.len(), 1);
        assert_eq!(butane.torsions[0].bond_index, 1);
        assert_eq!(butane.torsions[0].left_set, vec![0, 1]);
        assert_eq!(butane.torsions[0].right_set, vec![2, 3]);
    }

    #[test]
    fn double_bonds_do_not_rotate() {
        let lig = detect_torsions(parse_smiles("CC=CC").unwrap());
        assert!(lig.torsions.is_empty());
    }
}
