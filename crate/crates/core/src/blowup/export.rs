use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::BlowupComplex;
use crate::label::Label;
use crate::partition::Side;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub from: usize,
    pub to: usize,
    pub label: String,
    pub oriented: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeJson {
    pub labels: Vec<String>,
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BlowupJson {
    pub vertices: Vec<BTreeMap<String, String>>,
    pub edges: Vec<EdgeJson>,
    pub cubes: Vec<CubeJson>,
    pub cube_counts: Vec<usize>,
    pub euler: i64,
    pub e_subcomplex: Vec<usize>,
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::A => "A",
        Side::B => "B",
    }
}

impl BlowupComplex {
    pub fn to_json_value(&self) -> BlowupJson {
        let fam = self.family();
        let name = |l: Label| fam.label_name(l);
        BlowupJson {
            vertices: self
                .regions()
                .iter()
                .map(|r| {
                    r.sides
                        .iter()
                        .enumerate()
                        .map(|(i, &s)| (format!("Q{i}"), side_name(s).to_string()))
                        .collect()
                })
                .collect(),
            edges: self
                .edges()
                .iter()
                .map(|e| EdgeJson { from: e.from, to: e.to, label: name(e.label), oriented: e.oriented })
                .collect(),
            cubes: self
                .cubes()
                .iter()
                .filter(|c| c.dim() >= 2)
                .map(|c| CubeJson { labels: c.labels.iter().map(|&l| name(l)).collect(), vertices: c.corners.clone() })
                .collect(),
            cube_counts: self.cube_counts(),
            euler: self.euler_characteristic(),
            e_subcomplex: self.e_subcomplex(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("blowup serializes")
    }

    /// The 1-skeleton in DOT. Generator edges are arrows, partition edges
    /// are undirected and drawn in a second colour.
    pub fn to_dot(&self) -> String {
        let fam = self.family();
        let mut out = String::from("digraph blowup {\n");
        for (i, r) in self.regions().iter().enumerate() {
            let sides: String = r.sides.iter().map(|&s| side_name(s)).collect();
            let _ = writeln!(out, "  r{i} [label=\"{}\"];", if sides.is_empty() { "*".to_string() } else { sides });
        }
        for e in self.edges() {
            let label = fam.label_name(e.label);
            if e.oriented {
                let _ = writeln!(out, "  r{} -> r{} [label=\"{label}\", color=black];", e.from, e.to);
            } else {
                let _ = writeln!(out, "  r{} -> r{} [label=\"{label}\", color=blue, dir=none];", e.from, e.to);
            }
        }
        out.push_str("}\n");
        out
    }
}
