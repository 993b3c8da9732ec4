//! Rule-based 3D embedding.
//!
//! Chains are grown breadth-first from atom 0 with idealized bond angles and
//! staggered dihedrals. Every ring system is laid out once in a local frame
//! (one cyclic polygon per smallest cycle) and then dropped into place as a
//! rigid block. Where several staggered choices exist the first one that
//! keeps the new atoms clear of everything already placed wins.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;

use nalgebra::{Unit, UnitQuaternion};

use super::Conformation;
use crate::molmodel::graph::bridge_mask;
use crate::molmodel::{BondOrder, Element, Ligand, Vec3};

const CLEARANCE_CAP: f64 = 2.2;
const SP3_ANGLE: f64 = 109.5;
const SP2_ANGLE: f64 = 120.0;
const EXO_HALF_ANGLE: f64 = 54.75;

/// Idealized bond length in Å.
pub fn bond_length(a: Element, b: Element, order: BondOrder) -> f64 {
    use Element::{C, H, N, O};
    let single = match (a, b) {
        (C, C) => 1.54,
        (C, O) | (O, C) => 1.43,
        (C, N) | (N, C) => 1.47,
        (C, H) | (H, C) => 1.09,
        _ => 1.5,
    };
    single
        * match order {
            BondOrder::Single => 1.0,
            BondOrder::Double | BondOrder::Aromatic => 0.87,
            BondOrder::Triple => 0.78,
        }
}

pub fn embed_3d(ligand: &Ligand) -> Conformation {
    let mut e = Embedder::new(ligand);
    e.run();
    Conformation::new(e.pos.into_iter().map(|p| p.unwrap_or_else(Vec3::zeros)).collect())
}

#[derive(Clone, Copy)]
enum Hybrid {
    Sp,
    Sp2,
    Sp3,
    Octahedral,
}

struct RingSystem {
    atoms: Vec<usize>,
    cycles: Vec<Vec<usize>>,
}

struct Embedder<'a> {
    lig: &'a Ligand,
    adj: Vec<Vec<(usize, usize)>>,
    bond_of: HashMap<(usize, usize), usize>,
    system_of: Vec<Option<usize>>,
    systems: Vec<RingSystem>,
    pos: Vec<Option<Vec3>>,
    queue: VecDeque<usize>,
}

fn unit(v: Vec3) -> Option<Vec3> {
    let n = v.norm();
    (n > 1e-9).then(|| v / n)
}

fn any_perp(u: &Vec3) -> Vec3 {
    let a = if u.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    (a - u * u.dot(&a)).normalize()
}

fn perp_to(v: Vec3, axis: &Vec3) -> Option<Vec3> {
    unit(v - axis * axis.dot(&v))
}

fn newell_normal(points: &[Vec3]) -> Option<Vec3> {
    let c = super::centroid(points);
    let mut n = Vec3::zeros();
    for i in 0..points.len() {
        let j = (i + 1) % points.len();
        n += (points[i] - c).cross(&(points[j] - c));
    }
    unit(n)
}

/// Circumradius of a cyclic polygon with the given side lengths, and the
/// index of the side the centre lies beyond (if it lies outside).
fn solve_radius(chords: &[f64]) -> (f64, Option<usize>) {
    let (imax, lmax) = chords
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |best, (i, l)| if l > best.1 { (i, l) } else { best });
    let arc = |l: f64, r: f64| 2.0 * (l / (2.0 * r)).min(1.0).asin();
    let r0 = lmax / 2.0;
    let inside = |r: f64| chords.iter().map(|&l| arc(l, r)).sum::<f64>() - 2.0 * PI;
    let outside = |r: f64| {
        chords
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != imax)
            .map(|(_, &l)| arc(l, r))
            .sum::<f64>()
            - arc(lmax, r)
    };
    let (f, sign, out): (&dyn Fn(f64) -> f64, f64, Option<usize>) = if inside(r0) >= 0.0 {
        (&inside, -1.0, None)
    } else {
        (&outside, 1.0, Some(imax))
    };
    // f changes sign from -sign to sign as r grows
    let mut lo = r0;
    let mut hi = r0.max(1e-3) * 2.0;
    let mut guard = 0;
    while f(hi) * sign < 0.0 && guard < 60 {
        lo = hi;
        hi *= 2.0;
        guard += 1;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid) * sign < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi), out)
}

/// Vertices of the cyclic polygon with the given sides, centred on the
/// origin, vertex 0 at angle π.
fn polygon_2d(chords: &[f64]) -> Vec<(f64, f64)> {
    let (r, outside) = solve_radius(chords);
    let mut phi = PI;
    let mut verts = vec![(r * phi.cos(), r * phi.sin())];
    for (j, &l) in chords[..chords.len() - 1].iter().enumerate() {
        let delta = 2.0 * (l / (2.0 * r)).min(1.0).asin();
        phi += if outside == Some(j) { delta } else { -delta };
        verts.push((r * phi.cos(), r * phi.sin()));
    }
    verts
}

impl<'a> Embedder<'a> {
    fn new(lig: &'a Ligand) -> Self {
        let n = lig.atoms.len();
        let adj = lig.adjacency();
        let bond_of = lig
            .bonds
            .iter()
            .enumerate()
            .map(|(i, b)| ((b.a.min(b.b), b.a.max(b.b)), i))
            .collect();
        let bridges = bridge_mask(n, &lig.bonds);
        let mut system_of = vec![None; n];
        let mut systems = Vec::new();
        for start in 0..n {
            let in_ring = adj[start].iter().any(|&(_, bi)| !bridges[bi]);
            if system_of[start].is_some() || !in_ring {
                continue;
            }
            let id = systems.len();
            let mut atoms = vec![start];
            system_of[start] = Some(id);
            let mut k = 0;
            while k < atoms.len() {
                let a = atoms[k];
                for &(nb, bi) in &adj[a] {
                    if !bridges[bi] && system_of[nb].is_none() {
                        system_of[nb] = Some(id);
                        atoms.push(nb);
                    }
                }
                k += 1;
            }
            atoms.sort_unstable();
            systems.push(RingSystem { atoms, cycles: Vec::new() });
        }
        let mut e = Embedder {
            lig,
            adj,
            bond_of,
            system_of,
            systems,
            pos: vec![None; n],
            queue: VecDeque::new(),
        };
        for id in 0..e.systems.len() {
            let cycles = e.cycle_cover(id, &bridges);
            e.systems[id].cycles = cycles;
        }
        e
    }

    fn bond_len(&self, a: usize, b: usize) -> f64 {
        let order = self
            .bond_of
            .get(&(a.min(b), a.max(b)))
            .map_or(BondOrder::Single, |&bi| self.lig.bonds[bi].order);
        bond_length(self.lig.atoms[a].element, self.lig.atoms[b].element, order)
    }

    fn same_system(&self, a: usize, b: usize) -> bool {
        self.system_of[a].is_some() && self.system_of[a] == self.system_of[b]
    }

    /// Shortest cycle through every ring bond, then a greedy pick of the
    /// smallest cycles until each ring bond is covered.
    fn cycle_cover(&self, id: usize, bridges: &[bool]) -> Vec<Vec<usize>> {
        let sys = &self.systems[id];
        let ring_bonds: Vec<usize> = (0..self.lig.bonds.len())
            .filter(|&bi| !bridges[bi] && self.system_of[self.lig.bonds[bi].a] == Some(id))
            .collect();
        let mut candidates: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for &bi in &ring_bonds {
            let b = self.lig.bonds[bi];
            if let Some(path) = self.ring_path(b.a, b.b, bi, bridges) {
                let mut key = path.clone();
                key.sort_unstable();
                if !candidates.iter().any(|(k, _)| *k == key) {
                    candidates.push((key, path));
                }
            }
        }
        candidates.sort_by(|x, y| x.0.len().cmp(&y.0.len()).then_with(|| x.0.cmp(&y.0)));
        let mut covered = vec![false; self.lig.bonds.len()];
        let mut chosen = Vec::new();
        for (_, cycle) in candidates {
            let bonds: Vec<usize> = (0..cycle.len())
                .map(|i| {
                    let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
                    self.bond_of[&(a.min(b), a.max(b))]
                })
                .collect();
            if bonds.iter().any(|&bi| !covered[bi]) {
                for bi in bonds {
                    covered[bi] = true;
                }
                chosen.push(cycle);
            }
        }
        debug_assert!(sys.atoms.iter().all(|&a| chosen.iter().any(|c| c.contains(&a))));
        chosen
    }

    fn ring_path(&self, from: usize, to: usize, skip: usize, bridges: &[bool]) -> Option<Vec<usize>> {
        let mut parent: HashMap<usize, usize> = HashMap::new();
        parent.insert(from, from);
        let mut q = VecDeque::from([from]);
        while let Some(a) = q.pop_front() {
            if a == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = parent[&cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &(nb, bi) in &self.adj[a] {
                if bi != skip && !bridges[bi] && !parent.contains_key(&nb) {
                    parent.insert(nb, a);
                    q.push_back(nb);
                }
            }
        }
        None
    }

    fn run(&mut self) {
        let n = self.lig.atoms.len();
        for start in 0..n {
            if self.pos[start].is_some() {
                continue;
            }
            let origin = if start == 0 {
                Vec3::zeros()
            } else {
                let max_x = self.pos.iter().flatten().map(|p| p.x).fold(f64::MIN, f64::max);
                Vec3::new(max_x + 5.0, 0.0, 0.0)
            };
            self.place_root(start, origin);
            while let Some(a) = self.queue.pop_front() {
                self.grow(a);
            }
        }
    }

    fn place_root(&mut self, atom: usize, origin: Vec3) {
        match self.system_of[atom] {
            Some(id) => {
                let local = self.layout_system(id);
                let anchor = local[atom].unwrap_or_else(Vec3::zeros);
                for &a in &self.systems[id].atoms.clone() {
                    self.set(a, local[a].unwrap_or(anchor) - anchor + origin);
                }
            }
            None => self.set(atom, origin),
        }
    }

    fn set(&mut self, atom: usize, p: Vec3) {
        self.pos[atom] = Some(p);
        self.queue.push_back(atom);
    }

    fn clearance(&self, points: &[Vec3], skip: &[usize]) -> f64 {
        let mut best = CLEARANCE_CAP;
        for (j, q) in self.pos.iter().enumerate() {
            let Some(q) = q else { continue };
            if skip.contains(&j) {
                continue;
            }
            for p in points {
                best = best.min((p - q).norm());
            }
        }
        best
    }

    fn hybrid(&self, a: usize) -> Hybrid {
        let deg = self.adj[a].len();
        let (mut double, mut triple, mut aromatic) = (0, 0, 0);
        for &(_, bi) in &self.adj[a] {
            match self.lig.bonds[bi].order {
                BondOrder::Double => double += 1,
                BondOrder::Triple => triple += 1,
                BondOrder::Aromatic => aromatic += 1,
                BondOrder::Single => {}
            }
        }
        match deg {
            d if d >= 5 => Hybrid::Octahedral,
            4 => Hybrid::Sp3,
            3 if double + aromatic > 0 => Hybrid::Sp2,
            2 if triple > 0 || double >= 2 => Hybrid::Sp,
            2 if double + aromatic > 0 => Hybrid::Sp2,
            _ => Hybrid::Sp3,
        }
    }

    fn grow(&mut self, a: usize) {
        let children: Vec<usize> = self.adj[a]
            .iter()
            .map(|&(nb, _)| nb)
            .filter(|&nb| self.pos[nb].is_none())
            .collect();
        if children.is_empty() {
            return;
        }
        let pa = self.pos[a].expect("grown atoms are placed");
        let dirs = if self.system_of[a].is_some() {
            let slots = self.ring_slots(&self.pos, a);
            let taken = self.adj[a]
                .iter()
                .any(|&(nb, _)| !self.same_system(a, nb) && self.pos[nb].is_some());
            slots.into_iter().skip(usize::from(taken)).collect()
        } else {
            self.chain_dirs(a, &children)
        };
        for (i, &c) in children.iter().enumerate() {
            let dir = dirs.get(i).copied().unwrap_or_else(|| any_perp(&dirs[0]));
            let p = pa + dir * self.bond_len(a, c);
            if self.system_of[c].is_some() {
                self.place_block(c, a, p);
            } else {
                self.set(c, p);
            }
        }
    }

    fn chain_dirs(&self, a: usize, children: &[usize]) -> Vec<Vec3> {
        let pa = self.pos[a].unwrap();
        let parent = self.adj[a].iter().map(|&(nb, _)| nb).find(|&nb| self.pos[nb].is_some());
        let hybrid = self.hybrid(a);
        let (u, r0, lead) = match parent {
            Some(p) => {
                let u = (self.pos[p].unwrap() - pa).normalize();
                let r0 = self.adj[p]
                    .iter()
                    .map(|&(nb, _)| nb)
                    .filter(|&g| g != a)
                    .find_map(|g| self.pos[g].and_then(|pg| perp_to(pg - self.pos[p].unwrap(), &u)))
                    .unwrap_or_else(|| any_perp(&u));
                (u, r0, None)
            }
            // the first child of a root atom goes along +x and plays the parent
            None => (Vec3::x(), Vec3::y(), Some(Vec3::x())),
        };
        let rest = children.len() - usize::from(lead.is_some());
        let skip: Vec<usize> = std::iter::once(a).chain(parent).collect();
        let mut best: Option<(f64, Vec<Vec3>)> = None;
        for offset in 0..offsets(hybrid) {
            let mut dirs: Vec<Vec3> = lead.into_iter().collect();
            dirs.extend(child_dirs(hybrid, &u, &r0, offset, rest));
            let points: Vec<Vec3> = dirs
                .iter()
                .zip(children)
                .map(|(d, &c)| pa + d * self.bond_len(a, c))
                .collect();
            let score = self.clearance(&points, &skip);
            if best.as_ref().is_none_or(|(s, _)| score > *s + 1e-9) {
                best = Some((score, dirs));
            }
        }
        best.map(|(_, d)| d).unwrap_or_default()
    }

    /// Outward directions for the exocyclic neighbours of ring atom `v`.
    fn ring_slots(&self, pos: &[Option<Vec3>], v: usize) -> Vec<Vec3> {
        let pv = pos[v].unwrap();
        let ring: Vec<Vec3> = self.adj[v]
            .iter()
            .filter(|&&(nb, _)| self.same_system(v, nb))
            .filter_map(|&(nb, _)| pos[nb])
            .collect();
        let k = self.adj[v].iter().filter(|&&(nb, _)| !self.same_system(v, nb)).count();
        let normal = if ring.len() >= 2 { unit((ring[0] - pv).cross(&(ring[1] - pv))) } else { None };
        let r = unit(pv - super::centroid(&ring)).or(normal).unwrap_or_else(Vec3::x);
        let n = normal.and_then(|n| perp_to(n, &r)).unwrap_or_else(|| any_perp(&r));
        match k {
            0 => vec![],
            1 => vec![r],
            2 => {
                let (s, c) = EXO_HALF_ANGLE.to_radians().sin_cos();
                vec![r * c + n * s, r * c - n * s]
            }
            _ => {
                let w = r.cross(&n);
                let (s, c) = 70f64.to_radians().sin_cos();
                (0..k)
                    .map(|i| {
                        let t = 2.0 * PI * i as f64 / k as f64;
                        r * c + (n * t.cos() + w * t.sin()) * s
                    })
                    .collect()
            }
        }
    }

    /// Places ring system of `v` so that `v` sits at `at` with its first
    /// exocyclic slot pointing back at `parent`.
    fn place_block(&mut self, v: usize, parent: usize, at: Vec3) {
        let id = self.system_of[v].unwrap();
        let local = self.layout_system(id);
        let slot = self.ring_slots(&local, v)[0];
        let target = (self.pos[parent].unwrap() - at).normalize();
        let align = UnitQuaternion::rotation_between(&slot, &target)
            .unwrap_or_else(|| UnitQuaternion::from_axis_angle(&Unit::new_normalize(any_perp(&slot)), PI));
        let atoms = self.systems[id].atoms.clone();
        let lv = local[v].unwrap();
        let mut skip = atoms.clone();
        skip.push(parent);
        let axis = Unit::new_normalize(target);
        let mut best: Option<(f64, Vec<Vec3>)> = None;
        for k in 0..12 {
            let q = UnitQuaternion::from_axis_angle(&axis, k as f64 * PI / 6.0) * align;
            let placed: Vec<Vec3> = atoms.iter().map(|&a| at + q * (local[a].unwrap() - lv)).collect();
            let score = self.clearance(&placed, &skip);
            if best.as_ref().is_none_or(|(s, _)| score > *s + 1e-9) {
                best = Some((score, placed));
            }
        }
        let (_, placed) = best.unwrap();
        for (&a, p) in atoms.iter().zip(placed) {
            self.set(a, p);
        }
    }

    fn layout_system(&self, id: usize) -> Vec<Option<Vec3>> {
        let mut local = vec![None; self.lig.atoms.len()];
        let cycles = &self.systems[id].cycles;
        let Some(first) = cycles.first() else {
            return local;
        };
        let chords: Vec<f64> = (0..first.len())
            .map(|i| self.bond_len(first[i], first[(i + 1) % first.len()]))
            .collect();
        let verts = polygon_2d(&chords);
        for (&a, &(x, y)) in first.iter().zip(&verts) {
            local[a] = Some(Vec3::new(x - verts[0].0, y - verts[0].1, 0.0));
        }
        let mut done: Vec<&Vec<usize>> = vec![first];
        let mut pending: Vec<&Vec<usize>> = cycles[1..].iter().collect();
        while let Some(i) = pending.iter().position(|c| c.iter().any(|&a| local[a].is_some())) {
            let cycle = pending.remove(i);
            if cycle.iter().any(|&a| local[a].is_none()) {
                self.place_cycle(cycle, &done, &mut local);
            }
            done.push(cycle);
        }
        local
    }

    fn place_cycle(&self, cycle: &[usize], done: &[&Vec<usize>], local: &mut [Option<Vec3>]) {
        let k = cycle.len();
        let placed: Vec<usize> = (0..k).filter(|&i| local[cycle[i]].is_some()).collect();
        let normal_at = |local: &[Option<Vec3>], atom: usize| {
            done.iter()
                .find(|c| c.contains(&atom))
                .and_then(|c| newell_normal(&c.iter().filter_map(|&a| local[a]).collect::<Vec<_>>()))
        };
        if placed.len() == 1 {
            let e = cycle[placed[0]];
            let seq: Vec<usize> = (0..k).map(|j| cycle[(placed[0] + j) % k]).collect();
            let chords: Vec<f64> = (0..k).map(|j| self.bond_len(seq[j], seq[(j + 1) % k])).collect();
            let verts = polygon_2d(&chords);
            let pe = local[e].unwrap();
            let nbrs: Vec<Vec3> = self.adj[e]
                .iter()
                .filter(|&&(nb, _)| self.same_system(e, nb))
                .filter_map(|&(nb, _)| local[nb])
                .collect();
            let o = unit(pe - super::centroid(&nbrs)).unwrap_or_else(Vec3::x);
            let n = normal_at(local, e).and_then(|n| perp_to(n, &o)).unwrap_or_else(|| any_perp(&o));
            for (&a, &(x, y)) in seq.iter().zip(&verts).skip(1) {
                local[a] = Some(pe + o * (x - verts[0].0) + n * y);
            }
            return;
        }
        let fused = placed.len() == 2 && (placed[1] - placed[0] == 1 || placed[1] - placed[0] == k - 1);
        for i in 0..k {
            if local[cycle[i]].is_none() || local[cycle[(i + 1) % k]].is_some() {
                continue;
            }
            let e1 = cycle[i];
            let mut run = Vec::new();
            let mut j = (i + 1) % k;
            while local[cycle[j]].is_none() {
                run.push(cycle[j]);
                j = (j + 1) % k;
            }
            let e2 = cycle[j];
            let (p1, p2) = (local[e1].unwrap(), local[e2].unwrap());
            let x = unit(p2 - p1).unwrap_or_else(Vec3::x);
            let mid = (p1 + p2) / 2.0;
            let hint = if fused {
                done.iter()
                    .find(|c| c.contains(&e1) && c.contains(&e2))
                    .map(|c| mid - super::centroid(&c.iter().filter_map(|&a| local[a]).collect::<Vec<_>>()))
            } else {
                normal_at(local, e1)
            };
            let perp = hint.and_then(|h| perp_to(h, &x)).unwrap_or_else(|| any_perp(&x));
            let mut chords: Vec<f64> = Vec::with_capacity(run.len() + 2);
            let mut prev = e1;
            for &a in run.iter().chain(std::iter::once(&e2)) {
                chords.push(self.bond_len(prev, a));
                prev = a;
            }
            chords.push((p2 - p1).norm());
            let verts = polygon_2d(&chords);
            let (v0, vm) = (verts[0], verts[run.len() + 1]);
            let span = ((vm.0 - v0.0), (vm.1 - v0.1));
            let len = (span.0 * span.0 + span.1 * span.1).sqrt().max(1e-12);
            let (x2, y2) = ((span.0 / len, span.1 / len), (-span.1 / len, span.0 / len));
            let m2 = ((v0.0 + vm.0) / 2.0, (v0.1 + vm.1) / 2.0);
            let coords: Vec<(f64, f64)> = verts[1..=run.len()]
                .iter()
                .map(|&(vx, vy)| {
                    let d = (vx - m2.0, vy - m2.1);
                    (d.0 * x2.0 + d.1 * x2.1, d.0 * y2.0 + d.1 * y2.1)
                })
                .collect();
            let flip = if coords.iter().map(|c| c.1).sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
            for (&a, &(s, t)) in run.iter().zip(&coords) {
                local[a] = Some(mid + x * s + perp * (t * flip));
            }
        }
    }
}

fn offsets(h: Hybrid) -> usize {
    match h {
        Hybrid::Sp => 1,
        Hybrid::Sp2 => 2,
        Hybrid::Sp3 => 3,
        Hybrid::Octahedral => 4,
    }
}

/// Directions for up to `count` children of an atom whose parent lies along
/// `u`; `r0` is the perpendicular pointing at the grandparent.
fn child_dirs(h: Hybrid, u: &Vec3, r0: &Vec3, offset: usize, count: usize) -> Vec<Vec3> {
    let w = u.cross(r0);
    let dir = |beta: f64, omega: f64| {
        let (sb, cb) = beta.to_radians().sin_cos();
        let (so, co) = omega.to_radians().sin_cos();
        u * cb + (r0 * co + w * so) * sb
    };
    let off = offset as f64;
    let mut dirs: Vec<Vec3> = match h {
        Hybrid::Sp => vec![-u],
        Hybrid::Sp2 => [180.0, 0.0].iter().map(|o| dir(SP2_ANGLE, o + 180.0 * off)).collect(),
        Hybrid::Sp3 => [180.0, 60.0, 300.0].iter().map(|o| dir(SP3_ANGLE, o + 120.0 * off)).collect(),
        Hybrid::Octahedral => std::iter::once(-u)
            .chain([0.0, 90.0, 180.0, 270.0].iter().map(|o| dir(90.0, o + 90.0 * off)))
            .collect(),
    };
    if count > dirs.len() {
        dirs = (0..count).map(|i| dir(SP3_ANGLE, 360.0 * i as f64 / count as f64)).collect();
    }
    dirs.truncate(count);
    dirs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::add_hydrogens;
    use crate::molmodel::parse_smiles;

    fn check(smiles: &str) {
        let lig = add_hydrogens(&parse_smiles(smiles).unwrap()).unwrap();
        let conf = embed_3d(&lig);
        let p = &conf.positions;
        for b in &lig.bonds {
            let want = bond_length(lig.atoms[b.a].element, lig.atoms[b.b].element, b.order);
            let got = (p[b.a] - p[b.b]).norm();
            assert!((got - want).abs() <= 0.1 * want, "{smiles}: bond {}-{} is {got}, want {want}", b.a, b.b);
        }
        let bonded: std::collections::HashSet<(usize, usize)> =
            lig.bonds.iter().map(|b| (b.a.min(b.b), b.a.max(b.b))).collect();
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if !bonded.contains(&(i, j)) {
                    assert!((p[i] - p[j]).norm() >= 0.8, "{smiles}: atoms {i} and {j} clash");
                }
            }
        }
    }

    #[test]
    fn trivial_cases() {
        let one = embed_3d(&parse_smiles("C").unwrap());
        assert_eq!(one.positions, vec![Vec3::zeros()]);
        let two = embed_3d(&parse_smiles("CC").unwrap());
        assert!(((two.positions[0] - two.positions[1]).norm() - 1.54).abs() < 1e-12);
    }

    #[test]
    fn assorted_molecules() {
        for s in [
            "CCO",
            "CC(C)(C)C",
            "c1ccccc1",
            "c1ccc2ccccc2c1",
            "C1CCC2(CC1)CCCC2",
            "C1CC2CCC1C2",
            "c1ccccc1-c1ccccc1",
            "CC(=O)Nc1ccc(O)cc1",
            "CS(=O)(=O)c1ccc(cc1)C#N",
            "C1CC1",
            "FC(F)(F)C(Cl)Br",
            "OC1C(O)C(O)C(O)C(O)C1O",
            "c1ccc2c(c1)ccc1ccccc12",
        ] {
            check(s);
        }
    }

    #[test]
    fn ring_is_planar_regular() {
        let lig = parse_smiles("C1CCCCC1").unwrap();
        let conf = embed_3d(&lig);
        for i in 0..6 {
            let d = (conf.positions[i] - conf.positions[(i + 1) % 6]).norm();
            assert!((d - 1.54).abs() < 1e-9);
            assert!(conf.positions[i].z.abs() < 1e-9);
        }
    }

    #[test]
    fn deterministic() {
        let lig = add_hydrogens(&parse_smiles("CC(=O)Nc1ccc(O)cc1").unwrap()).unwrap();
        let a = embed_3d(&lig);
        let b = embed_3d(&lig);
        assert_eq!(a, b);
    }
}
