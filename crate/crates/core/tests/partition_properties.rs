mod common;

use std::collections::HashSet;

use common::{all_graphs, gamma0, graphs_up_to_iso};
use proptest::prelude::*;
use raag_core::blowup::{is_consistent_partial, regions};
use raag_core::partition::{commute, compatible, consistent, enumerate_all_partitions, PartitionJson};
use raag_core::{DefiningGraph, PartitionFamily, Side, SignedVertex, VertexSet, WPartition};

fn test_graphs() -> Vec<DefiningGraph> {
    let mut gs: Vec<DefiningGraph> = (1..=4).flat_map(all_graphs).collect();
    gs.extend(graphs_up_to_iso(5));
    gs
}

#[test]
fn dominant_splits_fix_the_maximum() {
    for g in test_graphs() {
        for p in enumerate_all_partitions(&g) {
            for v in p.sing().iter().filter(|&v| g.is_twist_dominant(v)) {
                assert_eq!(p.max_of(&g), VertexSet::singleton(v), "{}", p.display(&g));
            }
        }
    }
}

#[test]
fn bases_are_the_maximal_split_vertices() {
    for g in test_graphs() {
        for p in enumerate_all_partitions(&g) {
            assert_eq!(p.bases(), p.max_of(&g), "{}", p.display(&g));
            assert!(!p.bases().is_empty());
        }
    }
}

#[test]
fn canonical_form_is_stable_and_unique() {
    for g in test_graphs() {
        let all = enumerate_all_partitions(&g);
        let mut seen = HashSet::new();
        for p in &all {
            assert_eq!(&p.recanonicalize(&g), p);
            assert!(seen.insert(p.display(&g)), "duplicate {}", p.display(&g));
            let raw: PartitionJson = serde_json::from_str(&serde_json::to_string(&p.to_json(&g)).unwrap()).unwrap();
            assert_eq!(&WPartition::from_json(&g, &raw).unwrap(), p);
            // swapping the sides gives the same partition
            let swapped = WPartition::new(&g, p.side_b(), p.side_a(), p.link()).unwrap();
            assert_eq!(&swapped, p);
        }
    }
}

#[test]
fn disjoint_sides_of_noncommuting_pairs_nest() {
    for g in test_graphs() {
        let all = enumerate_all_partitions(&g);
        for (i, p) in all.iter().enumerate() {
            for q in &all[i + 1..] {
                if commute(&g, p, q) {
                    for ps in [Side::A, Side::B] {
                        for qs in [Side::A, Side::B] {
                            assert!(consistent(&g, p, ps, q, qs));
                        }
                    }
                    continue;
                }
                let mut inconsistent = 0;
                for ps in [Side::A, Side::B] {
                    for qs in [Side::A, Side::B] {
                        let (x, y) = (p.side(ps), q.side(qs));
                        if x.is_disjoint(y) {
                            assert!(x.is_disjoint(q.link()));
                            assert!(x.is_subset(q.side(qs.flip())));
                            assert!(y.is_subset(p.side(ps.flip())));
                        }
                        if !consistent(&g, p, ps, q, qs) {
                            inconsistent += 1;
                        }
                    }
                }
                let expected = usize::from(compatible(&g, p, q));
                assert_eq!(inconsistent, expected, "{} {}", p.display(&g), q.display(&g));
            }
        }
    }
}

#[test]
fn example_partitions_of_gamma0() {
    let g = gamma0();
    let shown: Vec<String> = enumerate_all_partitions(&g).iter().map(|p| p.display(&g)).collect();
    for s in [common::Q_SHOWN, common::W_SHOWN, common::R_SHOWN] {
        assert!(shown.iter().any(|x| x == s), "{s}");
    }
    let r = common::find_partition(&g, common::R_SHOWN);
    assert_eq!(r.bases(), g.set_of(&["a", "c"]).unwrap());
}

/// A compatible family of at most `k` members, kept greedily from random picks.
fn family_from(g: &DefiningGraph, picks: &[usize], k: usize) -> PartitionFamily {
    let all = enumerate_all_partitions(g);
    let mut members: Vec<WPartition> = Vec::new();
    for &i in picks {
        if members.len() == k || all.is_empty() {
            break;
        }
        let p = &all[i % all.len()];
        if members.iter().all(|q| q != p && compatible(g, p, q)) {
            members.push(p.clone());
        }
    }
    PartitionFamily::new(g.clone(), members).unwrap()
}

fn graph_and_family() -> impl Strategy<Value = PartitionFamily> {
    (2usize..=5, any::<u16>(), proptest::collection::vec(any::<usize>(), 12), 1usize..=4).prop_map(|(n, mask, picks, k)| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let edges: Vec<(usize, usize)> =
            pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &p)| p).collect();
        let g = DefiningGraph::from_index_edges(n, &edges).unwrap();
        family_from(&g, &picks, k)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn consistent_partial_choices_extend(fam in graph_and_family(), choice in proptest::collection::vec(0u8..3, 4)) {
        let all = regions(&fam).unwrap();
        let partial: Vec<Option<Side>> = (0..fam.len())
            .map(|i| match choice[i] { 0 => None, 1 => Some(Side::A), _ => Some(Side::B) })
            .collect();
        let extends = all.iter().any(|r| partial.iter().enumerate().all(|(i, s)| s.is_none_or(|s| r.side(i) == s)));
        prop_assert_eq!(is_consistent_partial(&fam, &partial), extends);
    }

    #[test]
    fn splitting_is_letter_separation(fam in graph_and_family()) {
        let g = fam.graph();
        for p in fam.members() {
            for v in g.vertices() {
                let (plus, minus) = (p.side_of(SignedVertex::plus(v)), p.side_of(SignedVertex::minus(v)));
                let split = plus.is_some() && minus.is_some() && plus != minus;
                prop_assert_eq!(p.splits(v), split);
            }
        }
    }
}
