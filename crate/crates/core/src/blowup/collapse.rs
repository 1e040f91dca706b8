//! Collapsing the carrier of a partition hyperplane, and label-preserving
//! isomorphism of cube complexes.

use std::collections::{HashMap, HashSet, VecDeque};

use super::{BlowupComplex, Cube};
use crate::error::{Error, Result};
use crate::label::Label;

/// A bare labelled cube complex: vertex count plus cubes of every dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledComplex {
    pub vertex_count: usize,
    pub cubes: Vec<Cube>,
}

impl LabeledComplex {
    pub fn euler_characteristic(&self) -> i64 {
        self.cubes
            .iter()
            .map(|c| if c.dim() % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    pub fn cube_counts(&self) -> Vec<usize> {
        let top = self.cubes.iter().map(Cube::dim).max().unwrap_or(0);
        let mut out = vec![0; top + 1];
        for c in &self.cubes {
            out[c.dim()] += 1;
        }
        out
    }

    fn index(&self) -> HashMap<(Vec<Label>, Vec<usize>), usize> {
        self.cubes
            .iter()
            .enumerate()
            .map(|(i, c)| ((c.labels.clone(), c.corners.clone()), i))
            .collect()
    }

    /// Collapse every cube carrying `Part(part)` onto its midcube and
    /// renumber the later partition labels down by one.
    pub fn collapse(&self, part: usize) -> Result<(LabeledComplex, Vec<usize>)> {
        let target = Label::Part(part);
        if !self.cubes.iter().any(|c| c.has_label(target)) {
            return Err(Error::IndexOutOfRange { index: part, len: part });
        }
        let index = self.index();
        let mut verts = UnionFind::new(self.vertex_count);
        let mut cells = UnionFind::new(self.cubes.len());
        for c in &self.cubes {
            let Some(b) = c.bit_of(target) else { continue };
            if c.dim() == 1 {
                verts.union(c.corners[0], c.corners[1]);
            }
            let rest: Vec<Label> = c.labels.iter().copied().filter(|&l| l != target).collect();
            let face = |val: usize| {
                let corners: Vec<usize> = (0..c.corners.len())
                    .filter(|x| x >> b & 1 == val)
                    .map(|x| c.corners[x])
                    .collect();
                index.get(&(rest.clone(), corners)).copied()
            };
            match (face(0), face(1)) {
                (Some(f0), Some(f1)) => cells.union(f0, f1),
                _ => return Err(Error::Invariant("a facet of a cube is missing".into())),
            }
        }
        let mut vertex_ids = HashMap::new();
        let vertex_map: Vec<usize> = (0..self.vertex_count)
            .map(|v| {
                let root = verts.find(v);
                let n = vertex_ids.len();
                *vertex_ids.entry(root).or_insert(n)
            })
            .collect();

        let renumber = |l: Label| match l {
            Label::Part(j) if j > part => Label::Part(j - 1),
            other => other,
        };
        let mut images: HashMap<usize, Cube> = HashMap::new();
        let mut order: Vec<usize> = Vec::new();
        for (i, c) in self.cubes.iter().enumerate() {
            if c.has_label(target) {
                continue;
            }
            let img = Cube {
                labels: c.labels.iter().map(|&l| renumber(l)).collect(),
                corners: c.corners.iter().map(|&v| vertex_map[v]).collect(),
            };
            let root = cells.find(i);
            match images.get(&root) {
                Some(prev) if *prev != img => {
                    return Err(Error::Invariant("identified cells have different images".into()))
                }
                Some(_) => {}
                None => {
                    images.insert(root, img);
                    order.push(root);
                }
            }
        }
        let cubes: Vec<Cube> = order.into_iter().map(|r| images.remove(&r).unwrap()).collect();
        let distinct: HashSet<&Cube> = cubes.iter().collect();
        if distinct.len() != cubes.len() {
            return Err(Error::Invariant("distinct cells collapse to the same cube".into()));
        }
        Ok((LabeledComplex { vertex_count: vertex_ids.len(), cubes }, vertex_map))
    }
}

/// Result of collapsing one partition hyperplane of a blowup.
#[derive(Debug, Clone)]
pub struct Collapse {
    /// The blowup over the family with that member removed.
    pub complex: BlowupComplex,
    /// The quotient, built cell by cell from the original complex.
    pub quotient: LabeledComplex,
    /// Original region index to region index in `complex`.
    pub vertex_map: Vec<usize>,
}

impl BlowupComplex {
    pub fn to_labeled(&self) -> LabeledComplex {
        LabeledComplex { vertex_count: self.vertex_count(), cubes: self.cubes().to_vec() }
    }

    pub fn collapse(&self, i: usize) -> Result<Collapse> {
        let smaller = self.family().without(i)?;
        let complex = BlowupComplex::build(&smaller)?;
        let (quotient, classes) = self.to_labeled().collapse(i)?;
        // Each quotient vertex is a region of the smaller family: drop side i.
        let mut class_to_region = vec![None; quotient.vertex_count];
        for (r, region) in self.regions().iter().enumerate() {
            let mut sides = region.sides.clone();
            sides.remove(i);
            let target = complex
                .region_id(&super::Region { sides })
                .ok_or_else(|| Error::Invariant("restricted region is not a region".into()))?;
            match class_to_region[classes[r]] {
                None => class_to_region[classes[r]] = Some(target),
                Some(t) if t != target => {
                    return Err(Error::Invariant("collapsed vertices restrict differently".into()))
                }
                _ => {}
            }
        }
        let phi: Vec<usize> = class_to_region.into_iter().map(Option::unwrap).collect();
        let mut mapped: Vec<Cube> = quotient
            .cubes
            .iter()
            .map(|c| Cube { labels: c.labels.clone(), corners: c.corners.iter().map(|&v| phi[v]).collect() })
            .collect();
        let mut expected = complex.cubes().to_vec();
        let key = |c: &Cube| (c.labels.clone(), c.corners.clone());
        mapped.sort_by_key(key);
        expected.sort_by_key(key);
        if mapped != expected || quotient.vertex_count != complex.vertex_count() {
            return Err(Error::Invariant("collapse does not reproduce the smaller blowup".into()));
        }
        let vertex_map = classes.iter().map(|&c| phi[c]).collect();
        Ok(Collapse { complex, quotient, vertex_map })
    }
}

/// Neighbour keys: generator edges by direction, partition edges undirected.
fn neighbour_table(c: &LabeledComplex) -> Result<Vec<HashMap<(Label, u8), usize>>> {
    let mut table = vec![HashMap::new(); c.vertex_count];
    for cube in c.cubes.iter().filter(|c| c.dim() == 1) {
        let (from, to, l) = (cube.corners[0], cube.corners[1], cube.labels[0]);
        let pairs: [(usize, u8, usize); 2] = if l.is_vertex() {
            [(from, 0, to), (to, 1, from)]
        } else {
            [(from, 2, to), (to, 2, from)]
        };
        for (x, dir, y) in pairs {
            if table[x].insert((l, dir), y).is_some() {
                return Err(Error::Invariant("two edges with one label at a vertex".into()));
            }
        }
    }
    Ok(table)
}

/// Cube with vertices renamed by `phi`, in a form independent of which
/// side of each partition edge is called the base.
fn canonical(c: &Cube, phi: &[usize]) -> (Vec<Label>, Vec<usize>) {
    let k = c.dim();
    let part_bits: Vec<usize> = (0..k).filter(|&b| c.labels[b].is_part()).collect();
    let mut best: Option<Vec<usize>> = None;
    for flips in 0..1usize << part_bits.len() {
        let mask: usize = part_bits
            .iter()
            .enumerate()
            .filter(|(j, _)| flips >> j & 1 == 1)
            .map(|(_, &b)| 1 << b)
            .sum();
        let corners: Vec<usize> = (0..c.corners.len()).map(|x| phi[c.corners[x ^ mask]]).collect();
        if best.as_ref().is_none_or(|b| corners < *b) {
            best = Some(corners);
        }
    }
    (c.labels.clone(), best.unwrap_or_default())
}

/// A label-preserving isomorphism `a → b`, if one exists. Both complexes
/// are assumed connected.
pub fn isomorphic(a: &LabeledComplex, b: &LabeledComplex) -> Option<Vec<usize>> {
    if a.vertex_count != b.vertex_count || a.cube_counts() != b.cube_counts() {
        return None;
    }
    if a.vertex_count == 0 {
        return Some(Vec::new());
    }
    let (ta, tb) = (neighbour_table(a).ok()?, neighbour_table(b).ok()?);
    let mut target: Vec<(Vec<Label>, Vec<usize>)> =
        b.cubes.iter().map(|c| canonical(c, &(0..b.vertex_count).collect::<Vec<_>>())).collect();
    target.sort();
    'seed: for seed in 0..b.vertex_count {
        let mut phi = vec![usize::MAX; a.vertex_count];
        let mut used = vec![false; b.vertex_count];
        phi[0] = seed;
        used[seed] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            if ta[x].len() != tb[phi[x]].len() {
                continue 'seed;
            }
            for (key, &y) in &ta[x] {
                let Some(&ty) = tb[phi[x]].get(key) else { continue 'seed };
                if phi[y] == usize::MAX {
                    if used[ty] {
                        continue 'seed;
                    }
                    phi[y] = ty;
                    used[ty] = true;
                    queue.push_back(y);
                } else if phi[y] != ty {
                    continue 'seed;
                }
            }
        }
        if phi.contains(&usize::MAX) {
            continue;
        }
        let mut mapped: Vec<_> = a.cubes.iter().map(|c| canonical(c, &phi)).collect();
        mapped.sort();
        if mapped == target {
            return Some(phi);
        }
    }
    None
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx != ry {
            self.parent[rx.max(ry)] = rx.min(ry);
        }
    }
}
