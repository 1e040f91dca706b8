use super::{BlowupComplex, Region};
use crate::error::{Error, Result};
use crate::label::Label;
use crate::partition::{Side, SignedVertex};

/// A closed edge loop representing a generator: one edge per partition
/// splitting the generator, then the generator's own edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacteristicCycle {
    pub vertex: usize,
    /// Region the loop starts and ends at; terminal for `vertex`.
    pub start: usize,
    /// Edge indices in traversal order.
    pub edges: Vec<usize>,
    /// Regions visited, `regions[0] == start`, one more than `edges`.
    pub regions: Vec<usize>,
}

impl CharacteristicCycle {
    pub fn labels(&self, b: &BlowupComplex) -> Vec<Label> {
        self.edges.iter().map(|&e| b.edges()[e].label).collect()
    }

    pub fn is_closed(&self) -> bool {
        self.regions.first() == self.regions.last()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

impl BlowupComplex {
    /// The first region (sides `A` before `B`) that is terminal for `v`.
    pub fn default_terminal_region(&self, v: usize) -> Result<usize> {
        self.regions()
            .iter()
            .position(|r| self.is_terminal(v, r))
            .ok_or_else(|| Error::Invariant(format!("no terminal region for {}", self.graph().name(v))))
    }

    pub fn characteristic_cycle(&self, v: usize, start: Option<&Region>) -> Result<CharacteristicCycle> {
        let g = self.graph();
        if v >= g.n() {
            return Err(Error::IndexOutOfRange { index: v, len: g.n() });
        }
        let start = match start {
            Some(r) => {
                if r.sides.len() != self.family().len() {
                    return Err(Error::InvalidRegion(format!(
                        "expected {} sides, got {}",
                        self.family().len(),
                        r.sides.len()
                    )));
                }
                let id = self
                    .region_id(r)
                    .ok_or_else(|| Error::InvalidRegion("side choices are not consistent".into()))?;
                if !self.is_terminal(v, r) {
                    return Err(Error::InvalidRegion(format!("not terminal for {}", g.name(v))));
                }
                id
            }
            None => self.default_terminal_region(v)?,
        };

        let ms = self.family().members();
        let mut remaining: Vec<usize> = (0..ms.len()).filter(|&i| ms[i].splits(v)).collect();
        remaining.sort_by(|&i, &j| self.family().label_cmp(Label::Part(i), Label::Part(j)));
        let mut here = start;
        let mut edges = Vec::new();
        let mut regions = vec![start];
        while !remaining.is_empty() {
            let pos = remaining
                .iter()
                .position(|&i| self.is_innermost(v, i, &remaining))
                .ok_or_else(|| Error::Invariant("splitting sides are not nested".into()))?;
            let i = remaining.remove(pos);
            let label = Label::Part(i);
            let e = self
                .edge_at(label, here)
                .ok_or_else(|| Error::Invariant(format!("no Q{i} edge at region {here}")))?;
            let edge = self.edges()[e];
            here = if edge.from == here { edge.to } else { edge.from };
            edges.push(e);
            regions.push(here);
        }
        let closing = self
            .edges()
            .iter()
            .position(|e| e.label == Label::Vertex(v) && e.to == start)
            .ok_or_else(|| Error::Invariant(format!("no {} edge ends at the start region", g.name(v))))?;
        if self.edges()[closing].from != here {
            return Err(Error::Invariant(format!("{} edge does not close the loop", g.name(v))));
        }
        edges.push(closing);
        regions.push(start);
        Ok(CharacteristicCycle { vertex: v, start, edges, regions })
    }

    /// The `v⁺` side of member `i` contains no other remaining `v⁺` side.
    fn is_innermost(&self, v: usize, i: usize, remaining: &[usize]) -> bool {
        let ms = self.family().members();
        let plus = SignedVertex::plus(v);
        let side = |j: usize| {
            let p = &ms[j];
            if p.side_a().contains(plus) {
                p.side(Side::A)
            } else {
                p.side(Side::B)
            }
        };
        let mine = side(i);
        remaining
            .iter()
            .all(|&j| j == i || !side(j).is_subset(mine))
    }
}
