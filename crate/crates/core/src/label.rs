//! Edge labels of a blowup: generators of the graph or members of the family.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{VertexKind, VertexSet};
use crate::partition::{self, PartitionFamily};

/// `Vertex(v)` or `Part(i)`, an index into the family.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Vertex(usize),
    Part(usize),
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Vertex(v) => write!(f, "V{v}"),
            Label::Part(i) => write!(f, "Q{i}"),
        }
    }
}

impl Label {
    pub fn is_vertex(self) -> bool {
        matches!(self, Label::Vertex(_))
    }

    pub fn is_part(self) -> bool {
        matches!(self, Label::Part(_))
    }
}

impl PartitionFamily {
    /// Every label: generators in declared order, then members.
    pub fn labels(&self) -> Vec<Label> {
        self.graph()
            .vertices()
            .map(Label::Vertex)
            .chain((0..self.len()).map(Label::Part))
            .collect()
    }

    /// Labels sorted by `≺`.
    pub fn labels_in_order(&self) -> Vec<Label> {
        let mut ls = self.labels();
        ls.sort_by(|a, b| self.label_cmp(*a, *b));
        ls
    }

    pub fn check_label(&self, l: Label) -> Result<()> {
        match l {
            Label::Vertex(v) if v < self.graph().n() => Ok(()),
            Label::Part(i) if i < self.len() => Ok(()),
            Label::Vertex(v) => Err(Error::IndexOutOfRange { index: v, len: self.graph().n() }),
            Label::Part(i) => Err(Error::IndexOutOfRange { index: i, len: self.len() }),
        }
    }

    /// `max(A)`: `{v}` for a generator, the base set for a partition.
    pub fn max_of(&self, l: Label) -> VertexSet {
        match l {
            Label::Vertex(v) => VertexSet::singleton(v),
            Label::Part(i) => self.members()[i].bases(),
        }
    }

    /// The `≺`-least element of `max(A)`.
    pub fn rep(&self, l: Label) -> usize {
        match l {
            Label::Vertex(v) => v,
            Label::Part(i) => self.members()[i].representative(self.graph()),
        }
    }

    pub fn commute(&self, a: Label, b: Label) -> bool {
        let g = self.graph();
        match (a, b) {
            (Label::Vertex(u), Label::Vertex(w)) => g.adjacent(u, w),
            (Label::Vertex(u), Label::Part(i)) | (Label::Part(i), Label::Vertex(u)) => {
                self.members()[i].commutes_with_vertex(u)
            }
            (Label::Part(i), Label::Part(j)) => {
                i != j && partition::commute(g, &self.members()[i], &self.members()[j])
            }
        }
    }

    /// The hyperplane labelled `a` separates `v` from `v⁻¹`.
    pub fn splits(&self, a: Label, v: usize) -> bool {
        match a {
            Label::Vertex(u) => u == v,
            Label::Part(i) => self.members()[i].splits(v),
        }
    }

    /// `max(A) ≤_t max(B)` or the converse, with `max(A) ≠ max(B)`.
    pub fn twist_related(&self, a: Label, b: Label) -> bool {
        let g = self.graph();
        let (u, w) = (self.rep(a), self.rep(b));
        u != w && (g.leq_t(u, w) || g.leq_t(w, u))
    }

    /// Twist type of the maximal class of a label.
    pub fn label_kind(&self, l: Label) -> VertexKind {
        let m = self.max_of(l);
        if m.len() == 1 {
            self.graph().classify_vertex(self.rep(l))
        } else {
            VertexKind::TwistMinimal
        }
    }

    /// `UL(max A)`; independent of the representative.
    pub fn upper_link(&self, l: Label) -> VertexSet {
        self.graph().ul(self.rep(l))
    }

    /// The total order `≺` on labels: by `≺`-rank of the maximal class, then
    /// generators before partitions, then index.
    pub fn label_cmp(&self, a: Label, b: Label) -> Ordering {
        let key = |l: Label| {
            let (kind, idx) = match l {
                Label::Vertex(v) => (0, v),
                Label::Part(i) => (1, i),
            };
            (self.graph().rank(self.rep(l)), kind, idx)
        };
        key(a).cmp(&key(b))
    }

    /// `a` for generators, `Q<i>` for members.
    pub fn label_name(&self, l: Label) -> String {
        match l {
            Label::Vertex(v) => self.graph().name(v).to_string(),
            Label::Part(i) => format!("Q{i}"),
        }
    }

    pub fn parse_label(&self, s: &str) -> Result<Label> {
        if let Ok(v) = self.graph().vertex(s) {
            return Ok(Label::Vertex(v));
        }
        if let Some(rest) = s.strip_prefix('Q') {
            if let Ok(i) = rest.parse::<usize>() {
                self.check_label(Label::Part(i))?;
                return Ok(Label::Part(i));
            }
        }
        Err(Error::UnknownVertex(s.to_string()))
    }
}
