#![allow(dead_code)]

use raag_core::graph::DefiningGraph;
use raag_core::partition::{compatible, enumerate_all_partitions, PartitionFamily};

const NAMES: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

/// Every labelled graph on `n` vertices, one per edge subset.
pub fn all_graphs(n: usize) -> Vec<DefiningGraph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    (0..1u32 << pairs.len())
        .map(|mask| {
            let edges: Vec<(&str, &str)> = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &(i, j))| (NAMES[i], NAMES[j]))
                .collect();
            DefiningGraph::new(&NAMES[..n], &edges).unwrap()
        })
        .collect()
}

/// One graph per isomorphism class on `n` vertices.
pub fn graphs_up_to_iso(n: usize) -> Vec<DefiningGraph> {
    let mut seen: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut out = Vec::new();
    for g in all_graphs(n) {
        let key = canonical_edges(&g);
        if !seen.contains(&key) {
            seen.push(key);
            out.push(g);
        }
    }
    out
}

fn canonical_edges(g: &DefiningGraph) -> Vec<(usize, usize)> {
    let n = g.n();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<(usize, usize)>> = None;
    loop {
        let mut es: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .map(|&(u, v)| {
                let (x, y) = (perm[u], perm[v]);
                (x.min(y), x.max(y))
            })
            .collect();
        es.sort();
        if best.as_ref().is_none_or(|b| es < *b) {
            best = Some(es);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap()
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Every compatible family of at most `k` distinct partitions (k ≤ 2).
pub fn small_families(g: &DefiningGraph, k: usize) -> Vec<PartitionFamily> {
    let all = enumerate_all_partitions(g);
    let mut out = vec![PartitionFamily::empty(g.clone())];
    if k >= 1 {
        for p in &all {
            out.push(PartitionFamily::new(g.clone(), vec![p.clone()]).unwrap());
        }
    }
    if k >= 2 {
        for (i, p) in all.iter().enumerate() {
            for q in &all[i + 1..] {
                if compatible(g, p, q) {
                    out.push(PartitionFamily::new(g.clone(), vec![p.clone(), q.clone()]).unwrap());
                }
            }
        }
    }
    out
}

/// The example graph: path a–b–c and an isolated d.
pub fn gamma0() -> DefiningGraph {
    DefiningGraph::new(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c")]).unwrap()
}

pub fn find_partition(g: &DefiningGraph, shown: &str) -> raag_core::WPartition {
    enumerate_all_partitions(g)
        .into_iter()
        .find(|p| p.display(g) == shown)
        .unwrap_or_else(|| panic!("no partition {shown}"))
}

pub const Q_SHOWN: &str = "({a,d}|{a-,c,c-,d-}|{b,b-})";
pub const W_SHOWN: &str = "({b,d}|{b-,d-}|{a,a-,c,c-})";
pub const R_SHOWN: &str = "({a,c,d}|{a-,c-,d-}|{b,b-})";
