//! Shear coordinates on twist-minimal hyperplanes and the linear system
//! cutting out the zero-sum shearings.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::blowup::BlowupComplex;
use crate::classify::Classifier;
use crate::error::{Error, Result};
use crate::graph::VertexKind;
use crate::label::Label;
use crate::linalg;

/// Tolerance for [`is_zero_sum`].
pub const ZERO_SUM_TOL: f64 = 1e-9;

/// Labels whose hyperplane is twist-minimal, in `≺` order.
pub fn twist_minimal_hyperplanes(b: &BlowupComplex) -> Vec<Label> {
    Classifier::new(b)
        .classify_all()
        .into_iter()
        .filter(|c| c.kind == VertexKind::TwistMinimal)
        .map(|c| c.label)
        .collect()
}

/// Number of shear coordinates carried by each twist-minimal hyperplane.
pub fn shear_space_dims(b: &BlowupComplex) -> BTreeMap<Label, usize> {
    let fam = b.family();
    twist_minimal_hyperplanes(b).into_iter().map(|l| (l, fam.upper_link(l).len())).collect()
}

fn by_rank(b: &BlowupComplex, s: crate::graph::VertexSet) -> Vec<usize> {
    let g = b.graph();
    let mut v: Vec<usize> = s.iter().collect();
    v.sort_by_key(|&w| g.rank(w));
    v
}

/// Shear vectors, one per twist-minimal hyperplane, each keyed by the
/// generators in its upper link.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ShearAssignment {
    pub vectors: BTreeMap<Label, BTreeMap<usize, f64>>,
}

impl ShearAssignment {
    pub fn zero(b: &BlowupComplex) -> Self {
        let fam = b.family();
        let vectors = twist_minimal_hyperplanes(b)
            .into_iter()
            .map(|l| (l, fam.upper_link(l).iter().map(|w| (w, 0.0)).collect()))
            .collect();
        ShearAssignment { vectors }
    }

    /// Reads a vector in the column order of `sys`.
    pub fn from_columns(sys: &ShearSystem, values: &[f64]) -> Result<Self> {
        if values.len() != sys.columns.len() {
            return Err(Error::ShearIndex(format!("{} values for {} columns", values.len(), sys.columns.len())));
        }
        let mut vectors: BTreeMap<Label, BTreeMap<usize, f64>> = sys.hyperplanes.iter().map(|&h| (h, BTreeMap::new())).collect();
        for (&(h, w), &x) in sys.columns.iter().zip(values) {
            vectors.entry(h).or_default().insert(w, x);
        }
        Ok(ShearAssignment { vectors })
    }

    pub fn set(&mut self, h: Label, w: usize, x: f64) {
        self.vectors.entry(h).or_default().insert(w, x);
    }

    /// Column-ordered values; indexing must match `sys` exactly.
    pub fn to_columns(&self, sys: &ShearSystem) -> Result<Vec<f64>> {
        let expected: BTreeMap<Label, Vec<usize>> = sys.hyperplanes.iter().map(|&h| (h, Vec::new())).collect();
        let mut expected = expected;
        for &(h, w) in &sys.columns {
            expected.get_mut(&h).unwrap().push(w);
        }
        if self.vectors.len() != expected.len() {
            return Err(Error::ShearIndex(format!(
                "{} shear vectors for {} twist-minimal hyperplanes",
                self.vectors.len(),
                expected.len()
            )));
        }
        for (h, coords) in &expected {
            let Some(v) = self.vectors.get(h) else {
                return Err(Error::ShearIndex(format!("no shear vector for {h:?}")));
            };
            if v.len() != coords.len() || coords.iter().any(|w| !v.contains_key(w)) {
                return Err(Error::ShearIndex(format!("coordinates of {h:?} do not match its upper link")));
            }
        }
        Ok(sys.columns.iter().map(|(h, w)| self.vectors[h][w]).collect())
    }
}

/// Splits a shear vector of `a` along the upper link of `v` (the part
/// constrained by the structure equation of `v`) and the remainder, which
/// lies along generators above `v` in the fold order.
pub fn decompose_shear(
    b: &BlowupComplex,
    v: usize,
    a: Label,
    s: &BTreeMap<usize, f64>,
) -> Result<(BTreeMap<usize, f64>, BTreeMap<usize, f64>)> {
    let fam = b.family();
    fam.check_label(a)?;
    let g = b.graph();
    if v >= g.n() {
        return Err(Error::IndexOutOfRange { index: v, len: g.n() });
    }
    let top = fam.max_of(a);
    if !top.iter().any(|m| g.leq_f(v, m)) {
        return Err(Error::ShearIndex(format!(
            "{} is not below the maximal class of {} in the fold order",
            g.name(v),
            fam.label_name(a)
        )));
    }
    let up = fam.upper_link(a);
    if let Some(w) = s.keys().find(|&&w| !up.contains(w)) {
        return Err(Error::ShearIndex(format!("{} is not in the upper link of {}", g.name(*w), fam.label_name(a))));
    }
    let (ul, uf) = (g.ul(v), g.uf(v));
    let mut linked = BTreeMap::new();
    let mut folded = BTreeMap::new();
    for (&w, &x) in s {
        if ul.contains(w) {
            linked.insert(w, x);
        } else if uf.contains(w) {
            folded.insert(w, x);
        } else {
            return Err(Error::Invariant(format!(
                "{} is neither in the upper link nor the upper fold set of {}",
                g.name(w),
                g.name(v)
            )));
        }
    }
    Ok((linked, folded))
}

/// The structure equations: one row per twist-minimal generator `v` and
/// generator `w` above it in the twist order, one column per twist-minimal
/// hyperplane `H` and coordinate `w` of its shear vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ShearSystem {
    pub hyperplanes: Vec<Label>,
    pub columns: Vec<(Label, usize)>,
    pub rows: Vec<(usize, usize)>,
    pub matrix: Vec<Vec<i64>>,
    pub rank: usize,
    /// Exact kernel basis, one vector per free column.
    pub kernel: Vec<Vec<BigRational>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ShearSystemJson {
    pub columns: Vec<[String; 2]>,
    pub rows: Vec<[String; 2]>,
    pub matrix: Vec<Vec<i64>>,
    pub fiber_dim: usize,
    pub kernel_basis: Vec<Vec<f64>>,
}

impl ShearSystem {
    pub fn fiber_dimension(&self) -> usize {
        self.columns.len() - self.rank
    }

    pub fn kernel_f64(&self) -> Vec<Vec<f64>> {
        self.kernel
            .iter()
            .map(|v| v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }

    pub fn to_json_value(&self, b: &BlowupComplex) -> ShearSystemJson {
        let fam = b.family();
        let g = b.graph();
        ShearSystemJson {
            columns: self.columns.iter().map(|&(h, w)| [fam.label_name(h), g.name(w).to_string()]).collect(),
            rows: self.rows.iter().map(|&(v, w)| [g.name(v).to_string(), g.name(w).to_string()]).collect(),
            matrix: self.matrix.clone(),
            fiber_dim: self.fiber_dimension(),
            kernel_basis: self.kernel_f64(),
        }
    }

    pub fn to_json(&self, b: &BlowupComplex) -> String {
        serde_json::to_string_pretty(&self.to_json_value(b)).expect("shear system serializes")
    }

    /// `M s` for column-ordered `s`.
    pub fn apply(&self, s: &[f64]) -> Vec<f64> {
        self.matrix.iter().map(|row| row.iter().zip(s).map(|(&m, &x)| m as f64 * x).sum()).collect()
    }
}

pub fn build_shear_system(b: &BlowupComplex) -> ShearSystem {
    let fam = b.family();
    let g = b.graph();
    let hyperplanes = twist_minimal_hyperplanes(b);
    let columns: Vec<(Label, usize)> = hyperplanes
        .iter()
        .flat_map(|&h| by_rank(b, fam.upper_link(h)).into_iter().map(move |w| (h, w)))
        .collect();
    let mut minimal: Vec<usize> = g.vertices().filter(|&v| g.classify_vertex(v) == VertexKind::TwistMinimal).collect();
    minimal.sort_by_key(|&v| g.rank(v));
    let rows: Vec<(usize, usize)> = minimal.iter().flat_map(|&v| by_rank(b, g.ul(v)).into_iter().map(move |w| (v, w))).collect();
    let matrix: Vec<Vec<i64>> = rows
        .iter()
        .map(|&(v, w)| columns.iter().map(|&(h, u)| i64::from(u == w && fam.splits(h, v))).collect())
        .collect();
    let rank = linalg::rational_rank(&matrix, columns.len());
    let kernel = linalg::rational_kernel(&matrix, columns.len());
    ShearSystem { hyperplanes, columns, rows, matrix, rank, kernel }
}

pub fn fiber_dimension(b: &BlowupComplex) -> usize {
    build_shear_system(b).fiber_dimension()
}

pub fn is_zero_sum(b: &BlowupComplex, shear: &ShearAssignment) -> Result<bool> {
    let sys = build_shear_system(b);
    let s = shear.to_columns(&sys)?;
    Ok(sys.apply(&s).iter().all(|x| x.abs() <= ZERO_SUM_TOL))
}

/// Checks every row against the characteristic cycle of its generator: the
/// cycle must cross each splitting hyperplane once, and the columns hit by
/// the row must be exactly the crossed twist-minimal hyperplanes that carry
/// the row's coordinate.
pub fn check_against_cycles(b: &BlowupComplex, sys: &ShearSystem) -> Result<()> {
    let fam = b.family();
    let g = b.graph();
    let mut crossed: BTreeMap<usize, Vec<Label>> = BTreeMap::new();
    for &(v, _) in &sys.rows {
        if crossed.contains_key(&v) {
            continue;
        }
        let cycle = b.characteristic_cycle(v, None)?;
        if !cycle.is_closed() {
            return Err(Error::Invariant(format!("cycle of {} does not close", g.name(v))));
        }
        let labels = cycle.labels(b);
        for &l in b.labels() {
            let count = labels.iter().filter(|&&x| x == l).count();
            if count != usize::from(fam.splits(l, v)) {
                return Err(Error::Invariant(format!(
                    "cycle of {} crosses {} {count} times",
                    g.name(v),
                    fam.label_name(l)
                )));
            }
        }
        crossed.insert(v, labels);
    }
    for (r, &(v, w)) in sys.rows.iter().enumerate() {
        for (c, &(h, u)) in sys.columns.iter().enumerate() {
            let expect = i64::from(u == w && crossed[&v].contains(&h));
            if sys.matrix[r][c] != expect {
                return Err(Error::Invariant(format!(
                    "row ({}, {}) and column ({}, {}) disagree with the cycle",
                    g.name(v),
                    g.name(w),
                    fam.label_name(h),
                    g.name(u)
                )));
            }
        }
    }
    Ok(())
}

/// True when every kernel vector is annihilated exactly.
pub fn kernel_is_exact(sys: &ShearSystem) -> bool {
    sys.kernel.iter().all(|k| {
        sys.matrix.iter().all(|row| {
            row.iter()
                .zip(k)
                .fold(BigRational::zero(), |acc, (&m, x)| acc + x * BigRational::from_integer(m.into()))
                .is_zero()
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{gamma0, square};
    use crate::graph::DefiningGraph;
    use crate::partition::{enumerate_all_partitions, PartitionFamily};

    fn with_family(g: &DefiningGraph, shown: &[&str]) -> BlowupComplex {
        let all = enumerate_all_partitions(g);
        let ms = shown.iter().map(|s| all.iter().find(|p| p.display(g) == *s).unwrap().clone()).collect();
        BlowupComplex::build(&PartitionFamily::new(g.clone(), ms).unwrap()).unwrap()
    }

    const Q: &str = "({a,d}|{a-,c,c-,d-}|{b,b-})";

    fn names(b: &BlowupComplex, ls: &[Label]) -> Vec<String> {
        ls.iter().map(|&l| b.family().label_name(l)).collect()
    }

    #[test]
    fn minimal_hyperplanes_and_dims() {
        let s = BlowupComplex::salvetti(&gamma0());
        assert_eq!(names(&s, &twist_minimal_hyperplanes(&s)), ["d", "a", "c"]);
        let dims: Vec<usize> = shear_space_dims(&s).values().copied().collect();
        assert_eq!(dims, [1, 1, 0]); // a, c, d in label order

        let sq = BlowupComplex::salvetti(&square());
        assert_eq!(twist_minimal_hyperplanes(&sq).len(), 4);
        assert!(shear_space_dims(&sq).values().all(|&d| d == 0));

        let bq = with_family(&gamma0(), &[Q]);
        assert_eq!(names(&bq, &twist_minimal_hyperplanes(&bq)), ["d", "a", "Q0", "c"]);
        assert_eq!(shear_space_dims(&bq)[&Label::Part(0)], 1);
    }

    #[test]
    fn salvetti_system_of_gamma0() {
        let s = BlowupComplex::salvetti(&gamma0());
        let sys = build_shear_system(&s);
        let json = sys.to_json_value(&s);
        assert_eq!(json.columns, [["a", "b"], ["c", "b"]].map(|p| p.map(String::from)));
        assert_eq!(json.rows, [["a", "b"], ["c", "b"]].map(|p| p.map(String::from)));
        assert_eq!(sys.matrix, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(sys.fiber_dimension(), 0);
        assert!(sys.kernel.is_empty());
    }

    #[test]
    fn system_with_one_partition() {
        let b = with_family(&gamma0(), &[Q]);
        let sys = build_shear_system(&b);
        let json = sys.to_json_value(&b);
        assert_eq!(json.columns, [["a", "b"], ["Q0", "b"], ["c", "b"]].map(|p| p.map(String::from)));
        assert_eq!(sys.matrix, vec![vec![1, 1, 0], vec![0, 0, 1]]);
        assert_eq!(json.fiber_dim, 1);
        assert_eq!(json.kernel_basis, vec![vec![-1.0, 1.0, 0.0]]);
        assert!(kernel_is_exact(&sys));
        check_against_cycles(&b, &sys).unwrap();
        let text = sys.to_json(&b);
        for key in ["\"columns\"", "\"rows\"", "\"matrix\"", "\"fiberDim\"", "\"kernelBasis\""] {
            assert!(text.contains(key));
        }
    }

    #[test]
    fn four_cycle_has_no_coordinates() {
        let s = BlowupComplex::salvetti(&square());
        let sys = build_shear_system(&s);
        assert!(sys.columns.is_empty() && sys.rows.is_empty());
        assert_eq!(fiber_dimension(&s), 0);
        assert!(is_zero_sum(&s, &ShearAssignment::zero(&s)).unwrap());
    }

    #[test]
    fn zero_sum_membership() {
        let b = with_family(&gamma0(), &[Q]);
        let sys = build_shear_system(&b);
        assert!(is_zero_sum(&b, &ShearAssignment::zero(&b)).unwrap());
        let k = ShearAssignment::from_columns(&sys, &[-0.4, 0.4, 0.0]).unwrap();
        assert!(is_zero_sum(&b, &k).unwrap());
        let off = ShearAssignment::from_columns(&sys, &[0.4, 0.4, 0.0]).unwrap();
        assert!(!is_zero_sum(&b, &off).unwrap());

        let s = BlowupComplex::salvetti(&gamma0());
        let mut only = ShearAssignment::zero(&s);
        only.set(Label::Vertex(0), 1, 1e-3);
        assert!(!is_zero_sum(&s, &only).unwrap());
    }

    #[test]
    fn inconsistent_indexing_is_rejected() {
        let b = with_family(&gamma0(), &[Q]);
        let mut bad = ShearAssignment::zero(&b);
        bad.set(Label::Vertex(0), 3, 1.0);
        assert!(matches!(is_zero_sum(&b, &bad), Err(Error::ShearIndex(_))));
        let mut missing = ShearAssignment::zero(&b);
        missing.vectors.remove(&Label::Part(0));
        assert!(matches!(is_zero_sum(&b, &missing), Err(Error::ShearIndex(_))));
        let sys = build_shear_system(&b);
        assert!(ShearAssignment::from_columns(&sys, &[1.0]).is_err());
    }

    #[test]
    fn decomposition_examples() {
        let b = with_family(&gamma0(), &[Q]);
        let g = b.graph();
        let [a, bb, d] = ["a", "b", "d"].map(|n| g.vertex(n).unwrap());
        let s: BTreeMap<usize, f64> = [(bb, 0.3)].into();
        let (l, f) = decompose_shear(&b, a, Label::Part(0), &s).unwrap();
        assert_eq!((l, f.is_empty()), (s.clone(), true));
        let (l, f) = decompose_shear(&b, d, Label::Part(0), &s).unwrap();
        assert_eq!((l.is_empty(), f), (true, s.clone()));
        let zero: BTreeMap<usize, f64> = BTreeMap::new();
        let (l, f) = decompose_shear(&b, a, Label::Part(0), &zero).unwrap();
        assert!(l.is_empty() && f.is_empty());
        // b is not below a in the fold order
        assert!(matches!(decompose_shear(&b, bb, Label::Vertex(a), &zero), Err(Error::ShearIndex(_))));
        let stray: BTreeMap<usize, f64> = [(d, 1.0)].into();
        assert!(decompose_shear(&b, a, Label::Part(0), &stray).is_err());
    }
}
