//! Γ-Whitehead partitions of the signed generators `V^±`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DefiningGraph, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedVertex {
    pub vertex: usize,
    pub sign: Sign,
}

impl SignedVertex {
    pub fn plus(vertex: usize) -> Self {
        SignedVertex { vertex, sign: Sign::Plus }
    }

    pub fn minus(vertex: usize) -> Self {
        SignedVertex { vertex, sign: Sign::Minus }
    }

    pub fn inverse(self) -> Self {
        let sign = match self.sign {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        };
        SignedVertex { vertex: self.vertex, sign }
    }

    fn bit(self) -> u32 {
        2 * self.vertex as u32 + (self.sign == Sign::Minus) as u32
    }

    fn from_bit(bit: u32) -> Self {
        let vertex = (bit / 2) as usize;
        if bit.is_multiple_of(2) {
            SignedVertex::plus(vertex)
        } else {
            SignedVertex::minus(vertex)
        }
    }
}

/// A set of signed vertices; bit `2v` is `v`, bit `2v+1` is `v⁻¹`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedSet(u128);

const PLUS_MASK: u128 = 0x5555_5555_5555_5555_5555_5555_5555_5555;

impl SignedSet {
    pub const EMPTY: SignedSet = SignedSet(0);

    /// `W^±` for a vertex set `W`.
    pub fn lift(s: VertexSet) -> Self {
        let mut out = 0u128;
        for v in s.iter() {
            out |= 0b11 << (2 * v);
        }
        SignedSet(out)
    }

    pub fn singleton(x: SignedVertex) -> Self {
        SignedSet(1 << x.bit())
    }

    pub fn contains(self, x: SignedVertex) -> bool {
        self.0 >> x.bit() & 1 == 1
    }

    pub fn insert(&mut self, x: SignedVertex) {
        self.0 |= 1 << x.bit();
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: Self) -> Self {
        SignedSet(self.0 | o.0)
    }

    pub fn intersection(self, o: Self) -> Self {
        SignedSet(self.0 & o.0)
    }

    pub fn difference(self, o: Self) -> Self {
        SignedSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_disjoint(self, o: Self) -> bool {
        self.0 & o.0 == 0
    }

    /// Vertices whose positive letter is in the set.
    pub fn positive_vertices(self) -> VertexSet {
        VertexSet::from_bits(compress(self.0 & PLUS_MASK))
    }

    /// Vertices whose negative letter is in the set.
    pub fn negative_vertices(self) -> VertexSet {
        VertexSet::from_bits(compress((self.0 >> 1) & PLUS_MASK))
    }

    pub fn iter(self) -> impl Iterator<Item = SignedVertex> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let b = bits.trailing_zeros();
                bits &= bits - 1;
                Some(SignedVertex::from_bit(b))
            }
        })
    }
}

fn compress(x: u128) -> u64 {
    let mut out = 0u64;
    let mut bits = x;
    while bits != 0 {
        let b = bits.trailing_zeros();
        out |= 1 << (b / 2);
        bits &= bits - 1;
    }
    out
}

impl FromIterator<SignedVertex> for SignedSet {
    fn from_iter<I: IntoIterator<Item = SignedVertex>>(iter: I) -> Self {
        let mut s = SignedSet::EMPTY;
        for x in iter {
            s.insert(x);
        }
        s
    }
}

impl fmt::Debug for SignedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.iter().map(|x| format!("{}{}", x.vertex, x.sign.symbol())))
            .finish()
    }
}

/// The graph `Γ^±` on signed generators: distinct, non-inverse letters are
/// joined when their underlying vertices commute.
#[derive(Debug, Clone)]
pub struct DoubledGraph {
    nodes: Vec<SignedVertex>,
    adjacency: Vec<SignedSet>,
}

impl DoubledGraph {
    pub fn new(g: &DefiningGraph) -> Self {
        let mut nodes = Vec::with_capacity(2 * g.n());
        let mut adjacency = Vec::with_capacity(2 * g.n());
        for v in g.vertices() {
            for x in [SignedVertex::plus(v), SignedVertex::minus(v)] {
                nodes.push(x);
                adjacency.push(SignedSet::lift(g.link(v)));
            }
        }
        DoubledGraph { nodes, adjacency }
    }

    pub fn nodes(&self) -> &[SignedVertex] {
        &self.nodes
    }

    pub fn neighbors(&self, x: SignedVertex) -> SignedSet {
        self.adjacency[x.bit() as usize]
    }

    pub fn adjacent(&self, x: SignedVertex, y: SignedVertex) -> bool {
        self.neighbors(x).contains(y)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|s| s.len()).sum::<usize>() / 2
    }

    /// Connected components of the subgraph induced on `within`, ordered by
    /// their smallest letter.
    pub fn components(&self, within: SignedSet) -> Vec<SignedSet> {
        let mut remaining = within;
        let mut out = Vec::new();
        while let Some(start) = remaining.iter().next() {
            let mut comp = SignedSet::singleton(start);
            let mut frontier = comp;
            while !frontier.is_empty() {
                let mut next = SignedSet::EMPTY;
                for x in frontier.iter() {
                    next = next.union(self.neighbors(x));
                }
                next = next.intersection(within).difference(comp);
                comp = comp.union(next);
                frontier = next;
            }
            remaining = remaining.difference(comp);
            out.push(comp);
        }
        out
    }
}

pub fn doubled_graph(g: &DefiningGraph) -> DoubledGraph {
    DoubledGraph::new(g)
}

/// The `m`-components: components of `Γ^± ∖ lk(m)^±` other than `{m}` and `{m⁻¹}`.
pub fn m_components(g: &DefiningGraph, m: usize) -> Vec<SignedSet> {
    let dg = DoubledGraph::new(g);
    m_components_in(&dg, g, m)
}

fn m_components_in(dg: &DoubledGraph, g: &DefiningGraph, m: usize) -> Vec<SignedSet> {
    let everything = SignedSet::lift(g.all());
    let m_pm = SignedSet::lift(VertexSet::singleton(m));
    let within = everything.difference(SignedSet::lift(g.link(m))).difference(m_pm);
    dg.components(within)
}

/// One of the two sides of a partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

/// A Γ-Whitehead partition `(P⁺ | P⁻ | lk)` in canonical form.
///
/// `side_a` is the side containing the positive letter of the `≺`-least
/// split vertex, so two partitions are equal iff their stored fields are.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WPartition {
    side_a: SignedSet,
    side_b: SignedSet,
    link: SignedSet,
    bases: VertexSet,
}

impl fmt::Debug for WPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} | {:?} | {:?})", self.side_a, self.side_b, self.link)
    }
}

impl WPartition {
    /// Validates a proposed tri-partition against the definition and returns
    /// it in canonical form.
    pub fn new(g: &DefiningGraph, side1: SignedSet, side2: SignedSet, link: SignedSet) -> Result<Self> {
        let everything = SignedSet::lift(g.all());
        let bad = |msg: &str| Err(Error::InvalidPartition(msg.to_string()));
        if !side1.is_disjoint(side2) || !side1.is_disjoint(link) || !side2.is_disjoint(link) {
            return bad("parts are not disjoint");
        }
        if side1.union(side2).union(link) != everything {
            return bad("parts do not cover every signed generator");
        }
        if side1.len() < 2 || side2.len() < 2 {
            return bad("partition is not thick");
        }
        let dg = DoubledGraph::new(g);
        let split = split_vertices(side1, side2);
        let mut bases = VertexSet::EMPTY;
        for m in split.iter() {
            if SignedSet::lift(g.link(m)) != link {
                continue;
            }
            let whole = m_components_in(&dg, g, m)
                .into_iter()
                .all(|c| c.is_subset(side1) || c.is_subset(side2));
            if whole {
                bases.insert(m);
            }
        }
        if bases.is_empty() {
            return bad("no vertex serves as a base");
        }
        Ok(Self::canonical(g, side1, side2, link, bases))
    }

    fn canonical(g: &DefiningGraph, s1: SignedSet, s2: SignedSet, link: SignedSet, bases: VertexSet) -> Self {
        let least = g.least(split_vertices(s1, s2)).expect("partition splits its base");
        let (side_a, side_b) = if s1.contains(SignedVertex::plus(least)) {
            (s1, s2)
        } else {
            (s2, s1)
        };
        WPartition { side_a, side_b, link, bases }
    }

    /// Re-canonicalizes; the identity on values produced by this module.
    pub fn recanonicalize(&self, g: &DefiningGraph) -> Self {
        Self::canonical(g, self.side_b, self.side_a, self.link, self.bases)
    }

    pub fn side_a(&self) -> SignedSet {
        self.side_a
    }

    pub fn side_b(&self) -> SignedSet {
        self.side_b
    }

    pub fn side(&self, s: Side) -> SignedSet {
        match s {
            Side::A => self.side_a,
            Side::B => self.side_b,
        }
    }

    pub fn link(&self) -> SignedSet {
        self.link
    }

    /// The vertices this partition can be based at.
    pub fn bases(&self) -> VertexSet {
        self.bases
    }

    /// Side containing `x`, or `None` when `x` is in the link.
    pub fn side_of(&self, x: SignedVertex) -> Option<Side> {
        if self.side_a.contains(x) {
            Some(Side::A)
        } else if self.side_b.contains(x) {
            Some(Side::B)
        } else {
            None
        }
    }

    /// `Sing`: vertices whose two letters lie on different sides.
    pub fn sing(&self) -> VertexSet {
        split_vertices(self.side_a, self.side_b)
    }

    pub fn splits(&self, v: usize) -> bool {
        self.sing().contains(v)
    }

    /// `≤`-maximal elements of `Sing`.
    pub fn max_of(&self, g: &DefiningGraph) -> VertexSet {
        g.maximal_elements(self.sing())
    }

    /// True when `v` commutes with the partition, i.e. `v` lies in its link.
    pub fn commutes_with_vertex(&self, v: usize) -> bool {
        self.link.contains(SignedVertex::plus(v))
    }

    /// The `≺`-least base; used as the representative of `max`.
    pub fn representative(&self, g: &DefiningGraph) -> usize {
        g.least(self.bases).expect("partition has a base")
    }
}

fn split_vertices(s1: SignedSet, s2: SignedSet) -> VertexSet {
    let a = s1.positive_vertices().intersection(s2.negative_vertices());
    let b = s2.positive_vertices().intersection(s1.negative_vertices());
    a.union(b)
}

/// All canonical partitions based at `m`, in subset-enumeration order.
pub fn enumerate_partitions(g: &DefiningGraph, m: usize) -> Vec<WPartition> {
    enumerate_partitions_capped(g, m, usize::MAX).expect("uncapped enumeration")
}

/// As [`enumerate_partitions`], failing if more than `cap` candidate
/// subsets of `m`-components would have to be examined.
pub fn enumerate_partitions_capped(g: &DefiningGraph, m: usize, cap: usize) -> Result<Vec<WPartition>> {
    let dg = DoubledGraph::new(g);
    let comps = m_components_in(&dg, g, m);
    let k = comps.len();
    if k < 2 {
        return Ok(Vec::new());
    }
    if k >= 63 || (1usize << k) - 2 > cap {
        return Err(Error::CapExceeded { cap });
    }
    let link = SignedSet::lift(g.link(m));
    let everything = SignedSet::lift(g.all());
    let mut bases = VertexSet::EMPTY;
    for w in g.vertices() {
        // Vertices fold-equivalent to m that it splits are exactly the other bases.
        if g.link(w) == g.link(m) {
            bases.insert(w);
        }
    }
    let mut out = Vec::with_capacity((1 << k) - 2);
    for mask in 1..(1u64 << k) - 1 {
        let mut side = SignedSet::singleton(SignedVertex::plus(m));
        for (i, c) in comps.iter().enumerate() {
            if mask >> i & 1 == 1 {
                side = side.union(*c);
            }
        }
        let other = everything.difference(link).difference(side);
        let sing = split_vertices(side, other);
        let p = WPartition::canonical(g, side, other, link, bases.intersection(sing));
        out.push(p);
    }
    Ok(out)
}

/// Every Γ-Whitehead partition of the graph, deduplicated, in a canonical
/// order: bases are visited along `≺` and first occurrences are kept.
pub fn enumerate_all_partitions(g: &DefiningGraph) -> Vec<WPartition> {
    enumerate_all_partitions_capped(g, usize::MAX).expect("uncapped enumeration")
}

pub fn enumerate_all_partitions_capped(g: &DefiningGraph, cap: usize) -> Result<Vec<WPartition>> {
    let mut out: Vec<WPartition> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for &m in g.total_order() {
        for p in enumerate_partitions_capped(g, m, cap)? {
            if seen.insert((p.side_a, p.side_b)) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Some bases of `p` and `q` are distinct and adjacent.
pub fn commute(g: &DefiningGraph, p: &WPartition, q: &WPartition) -> bool {
    p.bases
        .iter()
        .any(|v| q.bases.iter().any(|w| v != w && g.adjacent(v, w)))
}

pub fn compatible(g: &DefiningGraph, p: &WPartition, q: &WPartition) -> bool {
    if p == q || commute(g, p, q) {
        return true;
    }
    [Side::A, Side::B]
        .iter()
        .any(|&s| [Side::A, Side::B].iter().any(|&t| p.side(s).is_disjoint(q.side(t))))
}

/// Sides `P^×` of `p` and `Q^×` of `q` are consistent.
pub fn consistent(g: &DefiningGraph, p: &WPartition, ps: Side, q: &WPartition, qs: Side) -> bool {
    commute(g, p, q) || !p.side(ps).is_disjoint(q.side(qs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartitionOrder {
    LessF,
    LessT,
    GreaterF,
    GreaterT,
    Equivalent,
    Incomparable,
}

/// Compare `max(p)` with `max(q)` through representatives.
pub fn partition_order(g: &DefiningGraph, p: &WPartition, q: &WPartition) -> PartitionOrder {
    let v = p.representative(g);
    let w = q.representative(g);
    if g.equivalent(v, w) {
        PartitionOrder::Equivalent
    } else if g.leq_f(v, w) {
        PartitionOrder::LessF
    } else if g.leq_t(v, w) {
        PartitionOrder::LessT
    } else if g.leq_f(w, v) {
        PartitionOrder::GreaterF
    } else if g.leq_t(w, v) {
        PartitionOrder::GreaterT
    } else {
        PartitionOrder::Incomparable
    }
}

/// A list of pairwise-compatible, pairwise-distinct partitions.
#[derive(Debug, Clone)]
pub struct PartitionFamily {
    graph: DefiningGraph,
    members: Vec<WPartition>,
}

impl PartitionFamily {
    pub fn new(graph: DefiningGraph, members: Vec<WPartition>) -> Result<Self> {
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                if members[i] == members[j] {
                    return Err(Error::InvalidPartition(format!(
                        "partitions {i} and {j} coincide"
                    )));
                }
                if !compatible(&graph, &members[i], &members[j]) {
                    return Err(Error::Incompatible(i, j));
                }
            }
        }
        Ok(PartitionFamily { graph, members })
    }

    pub fn empty(graph: DefiningGraph) -> Self {
        PartitionFamily { graph, members: Vec::new() }
    }

    pub fn graph(&self) -> &DefiningGraph {
        &self.graph
    }

    pub fn members(&self) -> &[WPartition] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, i: usize) -> Result<&WPartition> {
        self.members.get(i).ok_or(Error::IndexOutOfRange { index: i, len: self.members.len() })
    }

    /// The family with member `i` removed (later indices shift down by one).
    pub fn without(&self, i: usize) -> Result<Self> {
        self.get(i)?;
        let mut members = self.members.clone();
        members.remove(i);
        Ok(PartitionFamily { graph: self.graph.clone(), members })
    }

    /// The same members in the order given by `perm` (`perm[k]` is the old index).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let members = perm.iter().map(|&i| self.get(i).cloned()).collect::<Result<Vec<_>>>()?;
        PartitionFamily::new(self.graph.clone(), members)
    }
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PartitionJson {
    #[serde(rename = "sideA")]
    pub side_a: Vec<(String, Sign)>,
    #[serde(rename = "sideB")]
    pub side_b: Vec<(String, Sign)>,
    pub link: Vec<(String, Sign)>,
}

fn letters_to_json(g: &DefiningGraph, s: SignedSet) -> Vec<(String, Sign)> {
    s.iter().map(|x| (g.name(x.vertex).to_string(), x.sign)).collect()
}

fn letters_from_json(g: &DefiningGraph, xs: &[(String, Sign)]) -> Result<SignedSet> {
    let mut s = SignedSet::EMPTY;
    for (name, sign) in xs {
        let x = SignedVertex { vertex: g.vertex(name)?, sign: *sign };
        if s.contains(x) {
            return Err(Error::InvalidPartition(format!("letter {name}{} repeated", sign.symbol())));
        }
        s.insert(x);
    }
    Ok(s)
}

impl WPartition {
    pub fn to_json(&self, g: &DefiningGraph) -> PartitionJson {
        PartitionJson {
            side_a: letters_to_json(g, self.side_a),
            side_b: letters_to_json(g, self.side_b),
            link: letters_to_json(g, self.link),
        }
    }

    pub fn from_json(g: &DefiningGraph, raw: &PartitionJson) -> Result<Self> {
        WPartition::new(
            g,
            letters_from_json(g, &raw.side_a)?,
            letters_from_json(g, &raw.side_b)?,
            letters_from_json(g, &raw.link)?,
        )
    }

    /// Compact display such as `({b,d}|{b-,d-}|{a,a-,c,c-})`.
    pub fn display(&self, g: &DefiningGraph) -> String {
        let show = |s: SignedSet| {
            let items: Vec<String> = s
                .iter()
                .map(|x| match x.sign {
                    Sign::Plus => g.name(x.vertex).to_string(),
                    Sign::Minus => format!("{}-", g.name(x.vertex)),
                })
                .collect();
            format!("{{{}}}", items.join(","))
        };
        format!("({}|{}|{})", show(self.side_a), show(self.side_b), show(self.link))
    }
}

/// Order partitions by representative rank, then by side contents.
pub fn canonical_cmp(g: &DefiningGraph, p: &WPartition, q: &WPartition) -> Ordering {
    g.rank(p.representative(g))
        .cmp(&g.rank(q.representative(g)))
        .then(p.side_a.cmp(&q.side_a))
}
