use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use super::straighten::normal_directions;
use crate::graph::fixtures::{gamma0, shared_apex, square, triangle};
use crate::graph::DefiningGraph;
use crate::partition::enumerate_all_partitions;

fn with_family(g: &DefiningGraph, shown: &[&str]) -> BlowupComplex {
    let all = enumerate_all_partitions(g);
    let ms = shown.iter().map(|s| all.iter().find(|p| p.display(g) == *s).unwrap().clone()).collect();
    BlowupComplex::build(&PartitionFamily::new(g.clone(), ms).unwrap()).unwrap()
}

fn gamma0_q() -> BlowupComplex {
    with_family(&gamma0(), &["({a,d}|{a-,c,c-,d-}|{b,b-})"])
}

fn v(b: &BlowupComplex, name: &str) -> Label {
    Label::Vertex(b.graph().vertex(name).unwrap())
}

fn square_of(b: &BlowupComplex, x: Label, y: Label) -> usize {
    b.cubes_with_labels(&[x, y])[0]
}

/// Random widths, then random rotations that keep every cube non-degenerate.
fn random_allowable(b: &BlowupComplex, rng: &mut ChaCha8Rng) -> MetricStructure {
    let widths: Vec<f64> = (0..b.labels().len()).map(|_| rng.gen_range(0.5..2.0)).collect();
    let order = b.labels().to_vec();
    let mut f = MetricStructure::rectilinear(b, |l| widths[order.iter().position(|&x| x == l).unwrap()]);
    let fam = b.family();
    for &a in b.labels().iter().rev() {
        for w in fam.upper_link(a).iter() {
            let theta = FRAC_PI_2 + rng.gen_range(-0.6..0.6);
            if let Ok(next) = rotate(b, &f, a, w, theta) {
                f = next;
            }
        }
    }
    f
}

#[test]
fn twist_pairs_of_gamma0() {
    let s = BlowupComplex::salvetti(&gamma0());
    let [a, b, c] = ["a", "b", "c"].map(|n| v(&s, n));
    assert_eq!(twist_pairs(&s), vec![(a, b), (b, c)]);
    assert!(twist_pairs(&BlowupComplex::salvetti(&square())).is_empty());
}

#[test]
fn gram_from_a_twist_angle() {
    let s = BlowupComplex::salvetti(&gamma0());
    let [a, b] = ["a", "b"].map(|n| v(&s, n));
    let mut f = MetricStructure::standard(&s);
    f.set_angle(a, b, FRAC_PI_3);
    let g = complete_gram(&s, &f, square_of(&s, a, b)).unwrap();
    assert_eq!(g.labels, vec![a, b]);
    let expected = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
    assert!((g.gram - expected).abs().max() < 1e-12);
}

#[test]
fn non_twist_pairs_without_shared_span_are_orthogonal() {
    let s = BlowupComplex::salvetti(&square());
    let [a, b] = ["a", "b"].map(|n| v(&s, n));
    let mut f = MetricStructure::standard(&s);
    f.set_angle(a, b, 1.0); // not a twist pair; ignored
    let g = complete_gram(&s, &f, square_of(&s, a, b)).unwrap();
    assert_eq!(g.gram[(0, 1)], 0.0);
    assert!(!check_allowable(&s, &f).is_allowable());
}

#[test]
fn right_angles_give_a_diagonal_gram() {
    let s = BlowupComplex::salvetti(&triangle());
    let f = MetricStructure::rectilinear(&s, |l| match l {
        Label::Vertex(i) => 1.0 + i as f64,
        Label::Part(_) => 1.0,
    });
    let top = s.cubes_of_dim(3).start;
    let g = complete_gram(&s, &f, top).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { f.width(g.labels[i]).unwrap().powi(2) } else { 0.0 };
            assert!((g.gram[(i, j)] - want).abs() < 1e-12);
        }
    }
}

#[test]
fn shared_span_determines_the_non_twist_angle() {
    let s = BlowupComplex::salvetti(&shared_apex());
    let [x, y, z] = ["x", "y", "z"].map(|n| v(&s, n));
    let mut f = MetricStructure::standard(&s);
    f.set_angle(x, z, FRAC_PI_3);
    f.set_angle(y, z, FRAC_PI_3);
    let cube = s.cubes_with_labels(&[x, y, z])[0];
    let g = complete_gram(&s, &f, cube).unwrap();
    // projections of e_x and e_y onto e_z are each 1/2
    assert!((g.entry(x, y).unwrap() - 0.25).abs() < 1e-12);
    assert!(check_allowable(&s, &f).is_allowable());
}

#[test]
fn faces_inherit_the_maximal_metric() {
    let s = BlowupComplex::salvetti(&shared_apex());
    let [x, y, z] = ["x", "y", "z"].map(|n| v(&s, n));
    let mut f = MetricStructure::standard(&s);
    f.set_angle(x, z, FRAC_PI_3);
    f.set_angle(y, z, FRAC_PI_3);
    let face = complete_gram(&s, &f, square_of(&s, x, y)).unwrap();
    assert!((face.gram[(0, 1)] - 0.25).abs() < 1e-12);
}

#[test]
fn missing_data_is_reported() {
    let s = BlowupComplex::salvetti(&gamma0());
    let [a, b] = ["a", "b"].map(|n| v(&s, n));
    let mut f = MetricStructure::standard(&s);
    f.angles.remove(&(a, b));
    assert!(matches!(complete_gram(&s, &f, square_of(&s, a, b)), Err(Error::InvalidMetric(_))));
    let mut f = MetricStructure::standard(&s);
    f.widths.remove(&a);
    assert!(!check_allowable(&s, &f).is_allowable());
    let mut f = MetricStructure::standard(&s);
    f.set_angle(a, b, PI);
    assert!(!check_allowable(&s, &f).is_allowable());
}

#[test]
fn allowable_examples() {
    let s = BlowupComplex::salvetti(&gamma0());
    let [a, b, c] = ["a", "b", "c"].map(|n| v(&s, n));
    assert!(check_allowable(&s, &MetricStructure::standard(&s)).is_allowable());
    let mut f = MetricStructure::standard(&s);
    f.set_angle(a, b, FRAC_PI_3);
    f.set_angle(c, b, FRAC_PI_2);
    assert!(check_allowable(&s, &f).is_allowable());
    let r = MetricStructure::rectilinear(&gamma0_q(), |_| 0.7);
    assert!(check_allowable(&gamma0_q(), &r).is_allowable());
}

#[test]
fn hand_edited_gram_violates_orthogonality() {
    let s = BlowupComplex::salvetti(&square());
    let [a, b] = ["a", "b"].map(|n| v(&s, n));
    let mut g = complete_gram(&s, &MetricStructure::standard(&s), square_of(&s, a, b)).unwrap();
    assert!(check_cube_gram(&s, &g, DEFAULT_TOL).is_empty());
    g.gram[(0, 1)] = 0.3;
    g.gram[(1, 0)] = 0.3;
    assert_eq!(check_cube_gram(&s, &g, DEFAULT_TOL).len(), 1);
    g.gram[(0, 1)] = 2.0;
    g.gram[(1, 0)] = 2.0;
    assert!(!check_cube_gram(&s, &g, DEFAULT_TOL).is_empty());
}

#[test]
fn twist_dominant_companions_must_agree() {
    // Γ0 with W based at b: angle(W, a) must equal angle(b, a).
    let b = with_family(&gamma0(), &["({b,d}|{b-,d-}|{a,a-,c,c-})"]);
    let [a, bb] = ["a", "b"].map(|n| v(&b, n));
    let mut f = MetricStructure::standard(&b);
    f.set_angle(a, bb, 1.2);
    let report = check_allowable(&b, &f);
    assert!(report.violations.iter().any(|m| m.contains("differs")), "{report:?}");
    f.set_angle(a, Label::Part(0), 1.2);
    assert!(check_allowable(&b, &f).is_allowable());
}

#[test]
fn rotation_examples() {
    let s = BlowupComplex::salvetti(&gamma0());
    let [a, b, c] = ["a", "b", "c"].map(|n| v(&s, n));
    let f = MetricStructure::standard(&s);
    let r = rotate(&s, &f, a, 1, 2.0 * PI / 5.0).unwrap();
    assert!((r.angle(a, b).unwrap() - 2.0 * PI / 5.0).abs() < 1e-15);
    assert_eq!(r.angle(c, b), Some(FRAC_PI_2));
    assert_eq!(r.widths(), f.widths());
    assert!(check_allowable(&s, &r).is_allowable());
    assert!(matches!(rotate(&s, &f, b, 0, 1.0), Err(Error::InvalidRotation(_))));
    assert!(matches!(rotate(&s, &f, a, 1, 0.0), Err(Error::InvalidRotation(_))));
    assert!(matches!(rotate(&s, &f, a, 1, PI), Err(Error::InvalidRotation(_))));

    let bq = gamma0_q();
    let f = MetricStructure::standard(&bq);
    let q = Label::Part(0);
    let r = rotate(&bq, &f, q, 1, 1.0).unwrap();
    assert_eq!(r.angle(q, v(&bq, "b")), Some(1.0));
    assert_eq!(r.angle(v(&bq, "a"), v(&bq, "b")), Some(FRAC_PI_2));
}

#[test]
fn rotating_a_dominant_label_moves_its_companions() {
    let b = with_family(&shared_apex(), &[]);
    let g = b.graph().clone();
    // x is twist-dominant (p sits below it); only one label has maximum {x} here
    let f = MetricStructure::standard(&b);
    let x = v(&b, "x");
    let r = rotate(&b, &f, x, g.vertex("z").unwrap(), 1.1).unwrap();
    assert_eq!(r.angle(x, v(&b, "z")), Some(1.1));
    assert!(check_allowable(&b, &r).is_allowable());
}

#[test]
fn metric_json_round_trip() {
    let b = gamma0_q();
    let mut f = MetricStructure::rectilinear(&b, |_| 0.5);
    f.set_angle(Label::Part(0), v(&b, "b"), 1.25);
    let text = f.to_json(b.family());
    let back = MetricStructure::from_json(b.family(), &text).unwrap();
    assert_eq!(back, f);
    assert!(text.contains("\"Q0\": 0.5"));
    assert!(MetricStructure::from_json(b.family(), "{\"widths\":{\"zz\":1},\"angles\":[]}").unwrap_err().is_parse());
}

#[test]
fn straighten_a_skewed_square() {
    let s = BlowupComplex::salvetti(&gamma0());
    let [a, b] = ["a", "b"].map(|n| v(&s, n));
    let mut f = MetricStructure::standard(&s);
    f.set_angle(a, b, 1.0);
    let cube = square_of(&s, a, b);
    let g = complete_gram(&s, &f, cube).unwrap();
    let (normals, _) = normal_directions(&s, &g).unwrap();
    assert!(normals[0].dot(&normals[1]).abs() < 1e-12);

    let start = straighten(&s, &f, 1.0).unwrap();
    assert!((start.structure.angle(a, b).unwrap() - 1.0).abs() < 1e-12);
    let end = straighten(&s, &f, 0.0).unwrap();
    assert!((end.structure.angle(a, b).unwrap() - FRAC_PI_2).abs() < 1e-12);
    let sq = end.grams.iter().find(|g| g.labels == vec![a, b]).unwrap();
    assert!((sq.gram.clone() - DMatrix::identity(2, 2)).abs().max() < 1e-12);
    assert!(straighten(&s, &f, 1.5).is_err());
}

#[test]
fn standard_structure_is_a_fixed_point() {
    let b = gamma0_q();
    let f = MetricStructure::standard(&b);
    for state in straightening_path(&b, &f, 3).unwrap() {
        assert_eq!(state.structure, f);
    }
}

#[test]
fn random_structures_straighten() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for b in [gamma0_q(), BlowupComplex::salvetti(&shared_apex()), with_family(&gamma0(), &["({b,d}|{b-,d-}|{a,a-,c,c-})"])] {
        for _ in 0..5 {
            let f = random_allowable(&b, &mut rng);
            assert!(f.angles().values().any(|&x| (x - FRAC_PI_2).abs() > 1e-6));
            assert!(check_allowable(&b, &f).is_allowable(), "{:?}", check_allowable(&b, &f));
            for state in straightening_path(&b, &f, 5).unwrap() {
                assert!(state.max_normal_overlap < 1e-9);
                assert!(state.max_norm_drift < 1e-9);
                assert!(check_allowable(&b, &state.structure).is_allowable());
                for g in &state.grams {
                    let direct = complete_gram(&b, &state.structure, g.cube).unwrap();
                    assert!((&direct.gram - &g.gram).abs().max() < 1e-9);
                }
            }
        }
    }
}
