//! The defining graph and the order-theoretic data attached to its vertices.
//!
//! Vertices are addressed by their position in the declared vertex list.
//! Everything derived from the graph (links, stars, the fold and twist
//! orders, the total order used for tie-breaking) is computed once at
//! construction and never mutated afterwards.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard limit imposed by the bitset representation.
pub const MAX_VERTICES: usize = 64;

/// A set of vertices of a [`DefiningGraph`], stored as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn singleton(v: usize) -> Self {
        VertexSet(1 << v)
    }

    pub fn from_bits(bits: u64) -> Self {
        VertexSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, v: usize) -> bool {
        v < 64 && self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1 << v;
    }

    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1 << v);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        VertexSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        VertexSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = VertexSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Twist classification of a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexKind {
    TwistDominant,
    TwistMinimal,
}

/// Everything the rest of the crate needs to know about one vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexRelations {
    pub vertex: usize,
    pub link: VertexSet,
    pub star: VertexSet,
    /// `w` with `v <=_f w`.
    pub leq_f: VertexSet,
    /// `w` with `v <=_t w`.
    pub leq_t: VertexSet,
    /// The class of `v` under the equivalence generated by `<=`.
    pub fold_class: VertexSet,
    pub twist_dominant: bool,
    /// Upper link: vertices `u != v` with `v <=_t u`.
    pub lk_plus: VertexSet,
    /// Upper fold set: vertices `u` with `v <=_f u`.
    pub uf: VertexSet,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
}

/// A finite simplicial graph.
#[derive(Clone, PartialEq, Eq)]
pub struct DefiningGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<VertexSet>,
    leq: Vec<VertexSet>,
    leq_f: Vec<VertexSet>,
    leq_t: Vec<VertexSet>,
    order: Vec<usize>,
    rank: Vec<usize>,
}

impl fmt::Debug for DefiningGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DefiningGraph")
            .field("vertices", &self.names)
            .field("edges", &self.edge_names())
            .finish()
    }
}

impl DefiningGraph {
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self> {
        if vertices.len() > MAX_VERTICES {
            return Err(Error::InvalidGraph(format!(
                "{} vertices exceeds the supported maximum of {MAX_VERTICES}",
                vertices.len()
            )));
        }
        let names: Vec<String> = vertices.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::InvalidGraph("empty vertex name".into()));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate vertex `{name}`")));
            }
        }
        let mut adj = vec![VertexSet::EMPTY; names.len()];
        let mut seen = BTreeSet::new();
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let u = *index
                .get(a)
                .ok_or_else(|| Error::InvalidGraph(format!("edge endpoint `{a}` is not a vertex")))?;
            let v = *index
                .get(b)
                .ok_or_else(|| Error::InvalidGraph(format!("edge endpoint `{b}` is not a vertex")))?;
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at `{a}`")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidGraph(format!("duplicate edge {a}-{b}")));
            }
            adj[u].insert(v);
            adj[v].insert(u);
        }
        Ok(Self::from_adjacency(names, index, adj))
    }

    /// Graph on vertices `0..n` named `v0, v1, ...`, edges given by index pairs.
    pub fn from_index_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let edges: Vec<(String, String)> = edges
            .iter()
            .map(|&(a, b)| (format!("v{a}"), format!("v{b}")))
            .collect();
        Self::new(&names, &edges)
    }

    fn from_adjacency(names: Vec<String>, index: HashMap<String, usize>, adj: Vec<VertexSet>) -> Self {
        let n = names.len();
        let star: Vec<VertexSet> = (0..n).map(|v| adj[v].union(VertexSet::singleton(v))).collect();
        let mut leq = vec![VertexSet::EMPTY; n];
        let mut leq_f = vec![VertexSet::EMPTY; n];
        let mut leq_t = vec![VertexSet::EMPTY; n];
        for v in 0..n {
            for w in 0..n {
                if adj[v].is_subset(star[w]) {
                    leq[v].insert(w);
                }
                if adj[v].is_subset(adj[w]) {
                    leq_f[v].insert(w);
                }
                if star[v].is_subset(star[w]) {
                    leq_t[v].insert(w);
                }
            }
        }
        let mut g = DefiningGraph {
            names,
            index,
            adj,
            leq,
            leq_f,
            leq_t,
            order: Vec::new(),
            rank: Vec::new(),
        };
        g.order = g.linear_extension();
        g.rank = vec![0; n];
        for (pos, &v) in g.order.iter().enumerate() {
            g.rank[v] = pos;
        }
        g
    }

    /// Kahn-style linear extension of the class order, smallest declared
    /// index first among the currently minimal vertices.
    fn linear_extension(&self) -> Vec<usize> {
        let n = self.n();
        let mut placed = VertexSet::EMPTY;
        let mut order = Vec::with_capacity(n);
        while order.len() < n {
            let next = (0..n)
                .filter(|&v| !placed.contains(v))
                .find(|&v| {
                    (0..n).all(|u| placed.contains(u) || u == v || !self.class_less(u, v))
                })
                .expect("class order is acyclic");
            placed.insert(next);
            order.push(next);
        }
        order
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: GraphJson = serde_json::from_str(text)?;
        Self::new(&raw.vertices, &raw.edges).map_err(|e| match e {
            Error::InvalidGraph(msg) => Error::Parse(msg),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        let raw = GraphJson {
            vertices: self.names.clone(),
            edges: self.edge_names(),
        };
        serde_json::to_string(&raw).expect("graph serializes")
    }

    /// Edges as name pairs, ordered by (smaller index, larger index).
    pub fn edge_names(&self) -> Vec<(String, String)> {
        self.edges()
            .into_iter()
            .map(|(u, v)| (self.names[u].clone(), self.names[v].clone()))
            .collect()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n() {
            for v in self.adj[u].iter().filter(|&v| v > u) {
                out.push((u, v));
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.n()
    }

    pub fn all(&self) -> VertexSet {
        (0..self.n()).collect()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn set_names(&self, s: VertexSet) -> Vec<String> {
        s.iter().map(|v| self.names[v].clone()).collect()
    }

    pub fn set_of(&self, names: &[&str]) -> Result<VertexSet> {
        names.iter().map(|n| self.vertex(n)).collect()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn link(&self, v: usize) -> VertexSet {
        self.adj[v]
    }

    pub fn star(&self, v: usize) -> VertexSet {
        self.adj[v].union(VertexSet::singleton(v))
    }

    /// `lk(v) ⊆ lk(w)`.
    pub fn leq_f(&self, v: usize, w: usize) -> bool {
        self.leq_f[v].contains(w)
    }

    /// `st(v) ⊆ st(w)`.
    pub fn leq_t(&self, v: usize, w: usize) -> bool {
        self.leq_t[v].contains(w)
    }

    /// `lk(v) ⊆ st(w)`.
    pub fn leq(&self, v: usize, w: usize) -> bool {
        self.leq[v].contains(w)
    }

    pub fn equivalent(&self, v: usize, w: usize) -> bool {
        self.leq(v, w) && self.leq(w, v)
    }

    /// Strict order on equivalence classes: `[u] < [v]`.
    pub fn class_less(&self, u: usize, v: usize) -> bool {
        self.leq(u, v) && !self.leq(v, u)
    }

    pub fn fold_class(&self, v: usize) -> VertexSet {
        self.vertices().filter(|&w| self.equivalent(v, w)).collect()
    }

    /// Vertices with the same link as `v`.
    pub fn link_class(&self, v: usize) -> VertexSet {
        self.vertices().filter(|&w| self.adj[w] == self.adj[v]).collect()
    }

    pub fn is_twist_dominant(&self, v: usize) -> bool {
        self.vertices().any(|u| u != v && self.leq_t(u, v))
    }

    pub fn classify_vertex(&self, v: usize) -> VertexKind {
        if self.is_twist_dominant(v) {
            VertexKind::TwistDominant
        } else {
            VertexKind::TwistMinimal
        }
    }

    /// `UL(v) = lk⁺(v)`: the vertices `u != v` with `v <=_t u`.
    pub fn ul(&self, v: usize) -> VertexSet {
        let mut s = self.leq_t[v];
        s.remove(v);
        s
    }

    /// `UF(v)`: the vertices `u` with `v <=_f u` (always contains `v`).
    pub fn uf(&self, v: usize) -> VertexSet {
        self.leq_f[v]
    }

    /// `{v} ∪ UL(v)`.
    pub fn st_plus(&self, v: usize) -> VertexSet {
        self.leq_t[v]
    }

    /// The chosen linear extension `≺` of the class order.
    pub fn total_order(&self) -> &[usize] {
        &self.order
    }

    /// Position of `v` in [`total_order`](Self::total_order).
    pub fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    /// The `≺`-least element of a nonempty set.
    pub fn least(&self, s: VertexSet) -> Option<usize> {
        s.iter().min_by_key(|&v| self.rank[v])
    }

    pub fn twist_dominant_set(&self) -> VertexSet {
        self.vertices().filter(|&v| self.is_twist_dominant(v)).collect()
    }

    pub fn relations(&self, v: usize) -> VertexRelations {
        VertexRelations {
            vertex: v,
            link: self.link(v),
            star: self.star(v),
            leq_f: self.leq_f[v],
            leq_t: self.leq_t[v],
            fold_class: self.fold_class(v),
            twist_dominant: self.is_twist_dominant(v),
            lk_plus: self.ul(v),
            uf: self.uf(v),
        }
    }

    /// Maximal elements of `s` under `<=`.
    pub fn maximal_elements(&self, s: VertexSet) -> VertexSet {
        s.iter()
            .filter(|&v| !s.iter().any(|w| self.class_less(v, w)))
            .collect()
    }

    /// True when `s` is a clique (every pair adjacent).
    pub fn is_clique(&self, s: VertexSet) -> bool {
        s.iter().all(|v| s.difference(VertexSet::singleton(v)).is_subset(self.adj[v]))
    }
}

/// Named fixture graphs used across tests, examples and documentation.
pub mod fixtures {
    use super::DefiningGraph;

    /// Path `a–b–c` plus an isolated vertex `d`.
    pub fn gamma0() -> DefiningGraph {
        DefiningGraph::new(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c")]).unwrap()
    }

    /// The ten-vertex graph used to illustrate upper links and upper fold sets.
    pub fn lklk() -> DefiningGraph {
        let v = ["v", "u1", "u2", "u3", "w1", "w2", "w3", "x", "y", "z"];
        let e = [
            ("v", "u1"),
            ("u1", "w1"),
            ("w1", "u2"),
            ("u2", "v"),
            ("u1", "u3"),
            ("u3", "w3"),
            ("w3", "u2"),
            ("u2", "u3"),
            ("u1", "w2"),
            ("y", "w2"),
            ("w2", "z"),
            ("u1", "x"),
            ("v", "u3"),
            ("u3", "w2"),
            ("u3", "w1"),
            ("w2", "w3"),
            ("w2", "u2"),
        ];
        DefiningGraph::new(&v, &e).unwrap()
    }

    pub fn square() -> DefiningGraph {
        DefiningGraph::new(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
        )
        .unwrap()
    }

    pub fn triangle() -> DefiningGraph {
        DefiningGraph::new(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]).unwrap()
    }

    /// Triangle `x y z` with a leaf `p` on `x` and a leaf `q` on `y`, both
    /// leaves also joined to `z`. `z` sits above `x` and `y`, which are
    /// adjacent but not twist-related.
    pub fn shared_apex() -> DefiningGraph {
        DefiningGraph::new(
            &["x", "y", "z", "p", "q"],
            &[("x", "y"), ("y", "z"), ("x", "z"), ("x", "p"), ("p", "z"), ("y", "q"), ("q", "z")],
        )
        .unwrap()
    }

    pub fn edgeless(n: usize) -> DefiningGraph {
        let names: Vec<String> = (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
        DefiningGraph::new::<String>(&names, &[]).unwrap()
    }

    pub fn complete(n: usize) -> DefiningGraph {
        let names: Vec<String> = (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((names[i].clone(), names[j].clone()));
            }
        }
        DefiningGraph::new(&names, &edges).unwrap()
    }
}
