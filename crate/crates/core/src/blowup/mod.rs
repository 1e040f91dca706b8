//! The blowup cube complex of a compatible family of partitions.
//!
//! Vertices are regions (consistent side choices). Every edge carries a
//! label; a vertex has at most one edge with a given label, so a cube is
//! pinned down by its label set and one corner. Cubes are stored with
//! labels sorted by [`Label`]'s derived order and with `2^k` corners,
//! corner `x` being reached from corner `0` by walking forward along the
//! labels whose bits are set in `x`. Forward means tail-to-head for
//! generator edges and side-`A`-to-side-`B` for partition edges.

mod checks;
mod collapse;
mod cycle;
mod export;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::DefiningGraph;
use crate::label::Label;
use crate::partition::{consistent, PartitionFamily, Side, SignedVertex};

pub use checks::{LinkReport, StructuralReport};
pub use collapse::{isomorphic, Collapse};
pub use cycle::CharacteristicCycle;
pub use export::{BlowupJson, CubeJson, EdgeJson};

/// Default upper bound on the number of regions enumerated.
pub const DEFAULT_REGION_CAP: usize = 10_000;

/// A consistent choice of one side per family member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region {
    pub sides: Vec<Side>,
}

impl Region {
    pub fn side(&self, i: usize) -> Side {
        self.sides[i]
    }

    pub fn flipped(&self, i: usize) -> Region {
        let mut sides = self.sides.clone();
        sides[i] = sides[i].flip();
        Region { sides }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: Label,
    /// Only generator edges are oriented.
    pub oriented: bool,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cube {
    pub labels: Vec<Label>,
    pub corners: Vec<usize>,
}

impl Cube {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn base(&self) -> usize {
        self.corners[0]
    }

    pub fn has_label(&self, l: Label) -> bool {
        self.labels.contains(&l)
    }

    pub fn bit_of(&self, l: Label) -> Option<usize> {
        self.labels.iter().position(|&m| m == l)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperplane {
    pub label: Label,
    pub dual_edges: Vec<usize>,
    /// Cube indices in the carrier, ascending.
    pub carrier: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct BlowupComplex {
    family: PartitionFamily,
    regions: Vec<Region>,
    region_index: HashMap<Region, usize>,
    /// Occurring labels in `≺` order.
    labels: Vec<Label>,
    forward: HashMap<Label, Vec<Option<usize>>>,
    cubes: Vec<Cube>,
    cube_index: HashMap<(Vec<Label>, usize), usize>,
    /// Start of each dimension inside `cubes`; `dim_start[k]..dim_start[k+1]`.
    dim_start: Vec<usize>,
    edges: Vec<Edge>,
}

/// Every consistent full side assignment, in lexicographic order with `A < B`.
pub fn regions(fam: &PartitionFamily) -> Result<Vec<Region>> {
    regions_capped(fam, usize::MAX)
}

pub fn regions_capped(fam: &PartitionFamily, cap: usize) -> Result<Vec<Region>> {
    let g = fam.graph();
    let ms = fam.members();
    let k = ms.len();
    let mut out = Vec::new();
    let mut current: Vec<Side> = Vec::with_capacity(k);
    fn rec(
        g: &DefiningGraph,
        ms: &[crate::partition::WPartition],
        current: &mut Vec<Side>,
        out: &mut Vec<Region>,
        cap: usize,
    ) -> Result<()> {
        let i = current.len();
        if i == ms.len() {
            if out.len() >= cap {
                return Err(Error::CapExceeded { cap });
            }
            out.push(Region { sides: current.clone() });
            return Ok(());
        }
        for s in [Side::A, Side::B] {
            let ok = (0..i).all(|j| consistent(g, &ms[j], current[j], &ms[i], s));
            if ok {
                current.push(s);
                rec(g, ms, current, out, cap)?;
                current.pop();
            }
        }
        Ok(())
    }
    rec(g, ms, &mut current, &mut out, cap)?;
    Ok(out)
}

/// True when the partial assignment (`None` = unchosen) is pairwise consistent.
pub fn is_consistent_partial(fam: &PartitionFamily, sides: &[Option<Side>]) -> bool {
    let g = fam.graph();
    let ms = fam.members();
    for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            if let (Some(s), Some(t)) = (sides[i], sides[j]) {
                if !consistent(g, &ms[i], s, &ms[j], t) {
                    return false;
                }
            }
        }
    }
    true
}

impl BlowupComplex {
    /// The Salvetti complex: the blowup over the empty family.
    pub fn salvetti(g: &DefiningGraph) -> Self {
        Self::build(&PartitionFamily::empty(g.clone())).expect("empty family always builds")
    }

    pub fn build(fam: &PartitionFamily) -> Result<Self> {
        Self::build_capped(fam, DEFAULT_REGION_CAP)
    }

    pub fn build_capped(fam: &PartitionFamily, cap: usize) -> Result<Self> {
        let regions = regions_capped(fam, cap)?;
        let region_index: HashMap<Region, usize> =
            regions.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        let g = fam.graph();
        let ms = fam.members();

        let mut forward: HashMap<Label, Vec<Option<usize>>> = HashMap::new();
        for i in 0..ms.len() {
            let f = regions
                .iter()
                .map(|r| match r.side(i) {
                    Side::A => region_index.get(&r.flipped(i)).copied(),
                    Side::B => None,
                })
                .collect();
            forward.insert(Label::Part(i), f);
        }
        for v in g.vertices() {
            let mut f = vec![None; regions.len()];
            for (head, r) in regions.iter().enumerate() {
                let terminal = ms.iter().enumerate().all(|(i, p)| {
                    p.commutes_with_vertex(v) || p.side(r.side(i)).contains(SignedVertex::plus(v))
                });
                if !terminal {
                    continue;
                }
                let mut tail_region = r.clone();
                for (i, p) in ms.iter().enumerate() {
                    if p.splits(v) {
                        tail_region = tail_region.flipped(i);
                    }
                }
                let tail = *region_index.get(&tail_region).ok_or_else(|| {
                    Error::Invariant(format!("tail of a generator edge is not a region: {tail_region:?}"))
                })?;
                if f[tail].replace(head).is_some() {
                    return Err(Error::Invariant("two generator edges leave one vertex".into()));
                }
            }
            forward.insert(Label::Vertex(v), f);
        }

        let labels: Vec<Label> = fam
            .labels_in_order()
            .into_iter()
            .filter(|l| forward[l].iter().any(Option::is_some))
            .collect();

        // Cubes, built dimension by dimension from their first labels.
        let mut cubes: Vec<Cube> = regions
            .iter()
            .enumerate()
            .map(|(r, _)| Cube { labels: vec![], corners: vec![r] })
            .collect();
        let mut dim_start = vec![0, cubes.len()];
        let mut sorted_labels = labels.clone();
        sorted_labels.sort();
        loop {
            let lo = dim_start[dim_start.len() - 2];
            let hi = dim_start[dim_start.len() - 1];
            let mut next: Vec<Cube> = Vec::new();
            for c in &cubes[lo..hi] {
                for &l in &sorted_labels {
                    if c.labels.last().is_some_and(|&m| m >= l) {
                        continue;
                    }
                    if !c.labels.iter().all(|&m| fam.commute(m, l)) {
                        continue;
                    }
                    if let Some(nc) = extend_cube(c, l, &forward) {
                        next.push(nc);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            next.sort_by(|x, y| {
                cmp_label_lists(fam, &x.labels, &y.labels).then(x.base().cmp(&y.base()))
            });
            cubes.extend(next);
            dim_start.push(cubes.len());
        }
        let cube_index = cubes
            .iter()
            .enumerate()
            .map(|(i, c)| ((c.labels.clone(), c.base()), i))
            .collect();
        let edges = if dim_start.len() > 2 {
            cubes[dim_start[1]..dim_start[2]]
                .iter()
                .map(|c| Edge {
                    from: c.corners[0],
                    to: c.corners[1],
                    label: c.labels[0],
                    oriented: c.labels[0].is_vertex(),
                })
                .collect()
        } else {
            Vec::new()
        };
        Ok(BlowupComplex {
            family: fam.clone(),
            regions,
            region_index,
            labels,
            forward,
            cubes,
            cube_index,
            dim_start,
            edges,
        })
    }

    pub fn family(&self) -> &PartitionFamily {
        &self.family
    }

    pub fn graph(&self) -> &DefiningGraph {
        self.family.graph()
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn region_id(&self, r: &Region) -> Option<usize> {
        self.region_index.get(r).copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.regions.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn cube(&self, i: usize) -> &Cube {
        &self.cubes[i]
    }

    /// Occurring labels in `≺` order.
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn max_dim(&self) -> usize {
        self.dim_start.len() - 2
    }

    /// Number of cubes of each dimension.
    pub fn cube_counts(&self) -> Vec<usize> {
        self.dim_start.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn cubes_of_dim(&self, k: usize) -> std::ops::Range<usize> {
        if k + 1 < self.dim_start.len() {
            self.dim_start[k]..self.dim_start[k + 1]
        } else {
            0..0
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cube_counts()
            .iter()
            .enumerate()
            .map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    /// Head of the edge labelled `l` leaving `r` in the forward direction.
    pub fn forward(&self, l: Label, r: usize) -> Option<usize> {
        self.forward.get(&l).and_then(|f| f[r])
    }

    /// The other endpoint of the edge labelled `l` entering `r`, if any.
    pub fn backward(&self, l: Label, r: usize) -> Option<usize> {
        self.forward
            .get(&l)?
            .iter()
            .position(|&h| h == Some(r))
    }

    /// Index of the edge labelled `l` incident to region `r`.
    pub fn edge_at(&self, l: Label, r: usize) -> Option<usize> {
        self.edges
            .iter()
            .position(|e| e.label == l && (e.from == r || e.to == r))
    }

    pub fn find_cube(&self, labels: &[Label], base: usize) -> Option<usize> {
        let mut key = labels.to_vec();
        key.sort();
        self.cube_index.get(&(key, base)).copied()
    }

    /// Cube indices with exactly the given label set.
    pub fn cubes_with_labels(&self, labels: &[Label]) -> Vec<usize> {
        let mut key = labels.to_vec();
        key.sort();
        let range = self.cubes_of_dim(key.len());
        range.filter(|&i| self.cubes[i].labels == key).collect()
    }

    /// All faces of cube `i` (including itself), as cube indices.
    pub fn faces(&self, i: usize) -> Vec<usize> {
        let c = &self.cubes[i];
        let k = c.dim();
        let mut out = Vec::new();
        for keep in 0..1usize << k {
            let free: Vec<usize> = (0..k).filter(|b| keep >> b & 1 == 1).collect();
            let labels: Vec<Label> = free.iter().map(|&b| c.labels[b]).collect();
            let fixed_bits = !keep & ((1 << k) - 1);
            let mut sub = fixed_bits;
            loop {
                let base = c.corners[sub];
                let idx = self.cube_index[&(labels.clone(), base)];
                out.push(idx);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & fixed_bits;
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Codimension-one faces of cube `i`, listed with multiplicity: the face
    /// with bit `b` fixed to 0, then to 1, for each bit.
    pub fn facets(&self, i: usize) -> Vec<usize> {
        let c = &self.cubes[i];
        let k = c.dim();
        let mut out = Vec::with_capacity(2 * k);
        for b in 0..k {
            let labels: Vec<Label> = c.labels.iter().enumerate().filter(|&(j, _)| j != b).map(|(_, &l)| l).collect();
            for val in 0..2 {
                let base = c.corners[val << b];
                out.push(self.cube_index[&(labels.clone(), base)]);
            }
        }
        out
    }

    /// Cubes all of whose labels are partitions.
    pub fn e_subcomplex(&self) -> Vec<usize> {
        (0..self.cubes.len())
            .filter(|&i| self.cubes[i].labels.iter().all(|l| l.is_part()))
            .collect()
    }

    pub fn hyperplanes(&self) -> Vec<Hyperplane> {
        self.labels.iter().map(|&l| self.hyperplane(l)).collect()
    }

    pub fn hyperplane(&self, l: Label) -> Hyperplane {
        let dual_edges = (0..self.edges.len()).filter(|&e| self.edges[e].label == l).collect();
        Hyperplane { label: l, dual_edges, carrier: self.carrier(l) }
    }

    /// The closure of the cubes that contain an edge labelled `l`.
    pub fn carrier(&self, l: Label) -> Vec<usize> {
        let mut out = Vec::new();
        for i in 0..self.cubes.len() {
            if self.cubes[i].has_label(l) {
                out.extend(self.faces(i));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Labels of hyperplanes crossing `H_l`, read off the squares.
    pub fn crossing_labels(&self, l: Label) -> Vec<Label> {
        let mut out: Vec<Label> = self
            .cubes_of_dim(2)
            .filter_map(|i| {
                let c = &self.cubes[i];
                match c.bit_of(l) {
                    Some(0) => Some(c.labels[1]),
                    Some(1) => Some(c.labels[0]),
                    _ => None,
                }
            })
            .collect();
        out.sort_by(|a, b| self.family.label_cmp(*a, *b));
        out.dedup();
        out
    }

    /// Indices of cubes that are not a proper face of another cube.
    pub fn maximal_cubes(&self) -> Vec<usize> {
        let mut is_face = vec![false; self.cubes.len()];
        for i in 0..self.cubes.len() {
            if self.cubes[i].dim() == 0 {
                continue;
            }
            for f in self.facets(i) {
                is_face[f] = true;
            }
        }
        (0..self.cubes.len()).filter(|&i| !is_face[i]).collect()
    }

    /// The unique cube whose labels are exactly the given maximal commuting set.
    pub fn max_cube_for(&self, labels: &[Label]) -> Result<usize> {
        let fam = &self.family;
        for &l in labels {
            fam.check_label(l)?;
        }
        for (i, &a) in labels.iter().enumerate() {
            for &b in &labels[i + 1..] {
                if a == b || !fam.commute(a, b) {
                    return Err(Error::NotCommuting(format!(
                        "{} and {}",
                        fam.label_name(a),
                        fam.label_name(b)
                    )));
                }
            }
        }
        if let Some(extra) = fam
            .labels()
            .into_iter()
            .find(|&c| !labels.contains(&c) && labels.iter().all(|&a| fam.commute(a, c)))
        {
            return Err(Error::NotMaximal(format!("{} commutes with every label", fam.label_name(extra))));
        }
        match self.cubes_with_labels(labels).as_slice() {
            [one] => Ok(*one),
            [] => Err(Error::Invariant("no cube carries a maximal commuting label set".into())),
            _ => Err(Error::Invariant("several cubes carry a maximal commuting label set".into())),
        }
    }

    pub fn is_terminal(&self, v: usize, r: &Region) -> bool {
        self.family.members().iter().enumerate().all(|(i, p)| {
            p.commutes_with_vertex(v) || p.side(r.side(i)).contains(SignedVertex::plus(v))
        })
    }
}

fn extend_cube(c: &Cube, l: Label, forward: &HashMap<Label, Vec<Option<usize>>>) -> Option<Cube> {
    let k = c.dim();
    let fl = &forward[&l];
    let mut corners = c.corners.clone();
    for x in 0..1usize << k {
        corners.push(fl[c.corners[x]]?);
    }
    // The translated face must close up along every existing direction.
    for (b, m) in c.labels.iter().enumerate() {
        let fm = &forward[m];
        for x in 0..1usize << k {
            if x >> b & 1 == 0 {
                let from = corners[x | 1 << k];
                let to = corners[x | 1 << b | 1 << k];
                if fm[from] != Some(to) {
                    return None;
                }
            }
        }
    }
    Some(Cube { labels: { let mut ls = c.labels.clone(); ls.push(l); ls }, corners })
}

fn cmp_label_lists(fam: &PartitionFamily, a: &[Label], b: &[Label]) -> std::cmp::Ordering {
    let key = |ls: &[Label]| {
        let mut v = ls.to_vec();
        v.sort_by(|x, y| fam.label_cmp(*x, *y));
        v
    };
    let (ka, kb) = (key(a), key(b));
    for (x, y) in ka.iter().zip(kb.iter()) {
        let o = fam.label_cmp(*x, *y);
        if o.is_ne() {
            return o;
        }
    }
    ka.len().cmp(&kb.len())
}
