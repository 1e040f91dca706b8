//! Parallelotope metrics on blowups, stored by edge widths and the angles
//! between commuting twist-related labels. Every other angle is derived.

mod straighten;

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::blowup::BlowupComplex;
use crate::error::{Error, Result};
use crate::label::Label;
use crate::linalg;
use crate::partition::PartitionFamily;

pub use straighten::{straighten, straighten_with_tol, straightening_path, straightening_path_with_tol, StraighteningState};

/// Default absolute tolerance on inner products.
pub const DEFAULT_TOL: f64 = 1e-9;

fn key(a: Label, b: Label) -> (Label, Label) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricStructure {
    widths: BTreeMap<Label, f64>,
    angles: BTreeMap<(Label, Label), f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleJson {
    pub a: String,
    pub b: String,
    pub radians: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricJson {
    pub widths: BTreeMap<String, f64>,
    pub angles: Vec<AngleJson>,
}

/// Commuting, twist-related pairs of occurring labels, each once.
pub fn twist_pairs(b: &BlowupComplex) -> Vec<(Label, Label)> {
    let fam = b.family();
    let labels = b.labels();
    let mut out = Vec::new();
    for (i, &x) in labels.iter().enumerate() {
        for &y in &labels[i + 1..] {
            if fam.commute(x, y) && fam.twist_related(x, y) {
                out.push(key(x, y));
            }
        }
    }
    out.sort();
    out
}

impl MetricStructure {
    /// Every width 1 and every twist angle a right angle.
    pub fn standard(b: &BlowupComplex) -> Self {
        Self::rectilinear(b, |_| 1.0)
    }

    pub fn rectilinear(b: &BlowupComplex, width: impl Fn(Label) -> f64) -> Self {
        MetricStructure {
            widths: b.labels().iter().map(|&l| (l, width(l))).collect(),
            angles: twist_pairs(b).into_iter().map(|k| (k, FRAC_PI_2)).collect(),
        }
    }

    /// Rectilinear structure with this structure's widths.
    pub fn straightened_widths(&self, b: &BlowupComplex) -> Self {
        Self::rectilinear(b, |l| self.widths.get(&l).copied().unwrap_or(1.0))
    }

    pub fn width(&self, l: Label) -> Option<f64> {
        self.widths.get(&l).copied()
    }

    pub fn set_width(&mut self, l: Label, w: f64) {
        self.widths.insert(l, w);
    }

    pub fn angle(&self, a: Label, b: Label) -> Option<f64> {
        self.angles.get(&key(a, b)).copied()
    }

    pub fn set_angle(&mut self, a: Label, b: Label, radians: f64) {
        self.angles.insert(key(a, b), radians);
    }

    pub fn widths(&self) -> &BTreeMap<Label, f64> {
        &self.widths
    }

    pub fn angles(&self) -> &BTreeMap<(Label, Label), f64> {
        &self.angles
    }

    pub fn to_json_value(&self, fam: &PartitionFamily) -> MetricJson {
        let mut angles: Vec<((Label, Label), f64)> = self.angles.iter().map(|(&k, &v)| (k, v)).collect();
        angles.sort_by(|(x, _), (y, _)| {
            fam.label_cmp(x.0, y.0).then(fam.label_cmp(x.1, y.1))
        });
        MetricJson {
            widths: self.widths.iter().map(|(&l, &w)| (fam.label_name(l), w)).collect(),
            angles: angles
                .into_iter()
                .map(|((a, b), r)| AngleJson { a: fam.label_name(a), b: fam.label_name(b), radians: r })
                .collect(),
        }
    }

    pub fn to_json(&self, fam: &PartitionFamily) -> String {
        serde_json::to_string_pretty(&self.to_json_value(fam)).expect("metric serializes")
    }

    pub fn from_json_value(fam: &PartitionFamily, raw: &MetricJson) -> Result<Self> {
        let parse = |s: &str| fam.parse_label(s).map_err(|e| Error::Parse(e.to_string()));
        let mut m = MetricStructure { widths: BTreeMap::new(), angles: BTreeMap::new() };
        for (name, &w) in &raw.widths {
            m.widths.insert(parse(name)?, w);
        }
        for a in &raw.angles {
            let k = key(parse(&a.a)?, parse(&a.b)?);
            if m.angles.insert(k, a.radians).is_some() {
                return Err(Error::Parse(format!("angle between {} and {} given twice", a.a, a.b)));
            }
        }
        Ok(m)
    }

    pub fn from_json(fam: &PartitionFamily, text: &str) -> Result<Self> {
        let raw: MetricJson = serde_json::from_str(text)?;
        Self::from_json_value(fam, &raw)
    }
}

/// Inner products of the edge vectors of one cube at its base corner.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeGram {
    pub cube: usize,
    /// Labels in `≺` order; row `i` of `gram` belongs to `labels[i]`.
    pub labels: Vec<Label>,
    pub gram: DMatrix<f64>,
}

impl CubeGram {
    pub fn entry(&self, a: Label, b: Label) -> Option<f64> {
        let i = self.labels.iter().position(|&l| l == a)?;
        let j = self.labels.iter().position(|&l| l == b)?;
        Some(self.gram[(i, j)])
    }

    /// Edge vectors as the rows of a lower-triangular matrix.
    pub fn realize(&self) -> Result<DMatrix<f64>> {
        linalg::cholesky(&self.gram)
    }
}

fn ordered_labels(fam: &PartitionFamily, labels: &[Label]) -> Vec<Label> {
    let mut ls = labels.to_vec();
    ls.sort_by(|x, y| fam.label_cmp(*x, *y));
    ls
}

/// Fills a Gram matrix from widths and twist angles.
struct GramBuilder<'a> {
    fam: &'a PartitionFamily,
    labels: &'a [Label],
    memo: Vec<Vec<Option<f64>>>,
}

impl GramBuilder<'_> {
    fn entry(&mut self, f: &MetricStructure, i: usize, j: usize) -> Result<f64> {
        if let Some(v) = self.memo[i][j] {
            return Ok(v);
        }
        let (a, b) = (self.labels[i], self.labels[j]);
        let width = |l: Label| {
            f.width(l)
                .ok_or_else(|| Error::InvalidMetric(format!("no width for {}", self.fam.label_name(l))))
        };
        let v = if i == j {
            width(a)?.powi(2)
        } else if self.fam.twist_related(a, b) {
            let angle = f.angle(a, b).ok_or_else(|| {
                Error::InvalidMetric(format!(
                    "no angle between {} and {}",
                    self.fam.label_name(a),
                    self.fam.label_name(b)
                ))
            })?;
            width(a)? * width(b)? * angle.cos()
        } else {
            let common = self.fam.upper_link(a).intersection(self.fam.upper_link(b));
            let span: Vec<usize> = (0..self.labels.len())
                .filter(|&k| k != i && k != j && common.contains(self.fam.rep(self.labels[k])))
                .collect();
            if span.is_empty() {
                0.0
            } else {
                let m = span.len();
                let mut g = DMatrix::zeros(m, m);
                let (mut ci, mut cj) = (DVector::zeros(m), DVector::zeros(m));
                for (x, &k) in span.iter().enumerate() {
                    for (y, &l) in span.iter().enumerate() {
                        g[(x, y)] = self.entry(f, k, l)?;
                    }
                    ci[x] = self.entry(f, i, k)?;
                    cj[x] = self.entry(f, j, k)?;
                }
                let solved = linalg::solve(&g, &cj)
                    .map_err(|_| Error::InvalidMetric("degenerate shared span".into()))?;
                ci.dot(&solved)
            }
        };
        self.memo[i][j] = Some(v);
        self.memo[j][i] = Some(v);
        Ok(v)
    }
}

fn gram_of_labels(fam: &PartitionFamily, f: &MetricStructure, labels: &[Label]) -> Result<DMatrix<f64>> {
    let n = labels.len();
    let mut builder = GramBuilder { fam, labels, memo: vec![vec![None; n]; n] };
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = builder.entry(f, i, j)?;
        }
    }
    Ok(g)
}

/// The Gram matrix of a maximal cube, derived from widths and twist angles.
fn maximal_gram(b: &BlowupComplex, f: &MetricStructure, cube: usize) -> Result<CubeGram> {
    let fam = b.family();
    let labels = ordered_labels(fam, &b.cube(cube).labels);
    let gram = gram_of_labels(fam, f, &labels)?;
    if !linalg::is_positive_definite(&gram) {
        return Err(Error::InvalidMetric(format!("parallelotope on cube {cube} is degenerate")));
    }
    Ok(CubeGram { cube, labels, gram })
}

/// Maximal cubes containing `cube`, as indices.
fn maximal_cofaces(b: &BlowupComplex, cube: usize) -> Vec<usize> {
    b.maximal_cubes().into_iter().filter(|&m| b.faces(m).contains(&cube)).collect()
}

/// Gram matrix of any cube, restricted from the maximal cubes containing it.
/// Different maximal cubes must induce the same metric on the face.
pub fn complete_gram(b: &BlowupComplex, f: &MetricStructure, cube: usize) -> Result<CubeGram> {
    if cube >= b.cubes().len() {
        return Err(Error::IndexOutOfRange { index: cube, len: b.cubes().len() });
    }
    let fam = b.family();
    let labels = ordered_labels(fam, &b.cube(cube).labels);
    let mut result: Option<DMatrix<f64>> = None;
    for m in maximal_cofaces(b, cube) {
        let big = maximal_gram(b, f, m)?;
        let idx: Vec<usize> = labels
            .iter()
            .map(|l| big.labels.iter().position(|x| x == l).expect("face label"))
            .collect();
        let g = DMatrix::from_fn(labels.len(), labels.len(), |i, j| big.gram[(idx[i], idx[j])]);
        match &result {
            None => result = Some(g),
            Some(prev) if (prev - &g).abs().max() > DEFAULT_TOL => {
                return Err(Error::InvalidMetric(format!(
                    "maximal cubes disagree on cube {cube}"
                )))
            }
            _ => {}
        }
    }
    let gram = result.ok_or_else(|| Error::Invariant("cube lies in no maximal cube".into()))?;
    Ok(CubeGram { cube, labels, gram })
}

/// Grams of every maximal cube.
pub fn maximal_grams(b: &BlowupComplex, f: &MetricStructure) -> Result<Vec<CubeGram>> {
    b.maximal_cubes().into_iter().map(|m| maximal_gram(b, f, m)).collect()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AllowabilityReport {
    pub violations: Vec<String>,
}

impl AllowabilityReport {
    pub fn is_allowable(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Orthogonality violations of a single cube's Gram: for labels that are
/// not twist-related, the parts of their upper spans outside the common
/// span must be orthogonal.
pub fn check_cube_gram(b: &BlowupComplex, g: &CubeGram, tol: f64) -> Vec<String> {
    let fam = b.family();
    let graph = fam.graph();
    let name = |l: Label| fam.label_name(l);
    let n = g.labels.len();
    let mut out = Vec::new();
    if g.gram.nrows() != n || g.gram.ncols() != n {
        out.push(format!("cube {}: Gram has the wrong shape", g.cube));
        return out;
    }
    if (&g.gram - g.gram.transpose()).abs().max() > tol {
        out.push(format!("cube {}: Gram is not symmetric", g.cube));
    }
    let e = match g.realize() {
        Ok(e) => e,
        Err(err) => {
            out.push(format!("cube {}: {err}", g.cube));
            return out;
        }
    };
    let rows: Vec<DVector<f64>> = (0..n).map(|i| e.row(i).transpose()).collect();
    let reps: Vec<usize> = g.labels.iter().map(|&l| fam.rep(l)).collect();
    let span_of = |i: usize| -> Vec<usize> {
        let st = graph.st_plus(reps[i]);
        (0..n).filter(|&k| st.contains(reps[k])).collect()
    };
    for i in 0..n {
        for j in i + 1..n {
            if fam.twist_related(g.labels[i], g.labels[j]) {
                continue;
            }
            let (ki, kj) = (span_of(i), span_of(j));
            let common: Vec<usize> = ki.iter().copied().filter(|k| kj.contains(k)).collect();
            let basis = linalg::orthonormal_basis(
                &common.iter().map(|&k| rows[k].clone()).collect::<Vec<_>>(),
                linalg::PIVOT_FLOOR,
            );
            for &x in ki.iter().filter(|k| !common.contains(k)) {
                for &y in kj.iter().filter(|k| !common.contains(k)) {
                    let d = linalg::reject(&rows[x], &basis).dot(&linalg::reject(&rows[y], &basis));
                    if d.abs() > tol {
                        out.push(format!(
                            "cube {}: directions of {} and {} overlap along {} and {} ({d:.3e})",
                            g.cube,
                            name(g.labels[i]),
                            name(g.labels[j]),
                            name(g.labels[x]),
                            name(g.labels[y])
                        ));
                    }
                }
            }
        }
    }
    out
}

pub fn check_allowable(b: &BlowupComplex, f: &MetricStructure) -> AllowabilityReport {
    check_allowable_with_tol(b, f, DEFAULT_TOL)
}

pub fn check_allowable_with_tol(b: &BlowupComplex, f: &MetricStructure, tol: f64) -> AllowabilityReport {
    let fam = b.family();
    let name = |l: Label| fam.label_name(l);
    let mut v = Vec::new();

    for &l in b.labels() {
        match f.width(l) {
            Some(w) if w.is_finite() && w > 0.0 => {}
            Some(w) => v.push(format!("width of {} is {w}", name(l))),
            None => v.push(format!("no width for {}", name(l))),
        }
    }
    for &l in f.widths.keys() {
        if !b.labels().contains(&l) {
            v.push(format!("width given for absent label {}", name(l)));
        }
    }
    for (&(a, c), &r) in &f.angles {
        if !(fam.commute(a, c) && fam.twist_related(a, c)) {
            v.push(format!("angle between {} and {} is not a twist angle", name(a), name(c)));
        }
        if !(r > 0.0 && r < std::f64::consts::PI) {
            v.push(format!("angle between {} and {} is {r}, outside (0, π)", name(a), name(c)));
        }
    }
    if !v.is_empty() {
        return AllowabilityReport { violations: v };
    }

    // Per maximal cube: realizability and the orthogonality condition.
    let mut inner: HashMap<(Label, Label), Vec<f64>> = HashMap::new();
    let mut per_square: HashMap<usize, Vec<f64>> = HashMap::new();
    for m in b.maximal_cubes() {
        let g = match maximal_gram(b, f, m) {
            Ok(g) => g,
            Err(e) => {
                v.push(e.to_string());
                continue;
            }
        };
        v.extend(check_cube_gram(b, &g, tol));
        for i in 0..g.labels.len() {
            for j in i + 1..g.labels.len() {
                let (x, y) = (g.labels[i], g.labels[j]);
                let cos = g.gram[(i, j)] / (g.gram[(i, i)] * g.gram[(j, j)]).sqrt();
                inner.entry(key(x, y)).or_default().push(cos);
            }
        }
        for s in b.faces(m).into_iter().filter(|&s| b.cube(s).dim() == 2) {
            let c = b.cube(s);
            per_square.entry(s).or_default().push(g.entry(c.labels[0], c.labels[1]).unwrap());
        }
    }

    // Faces carry one metric.
    for (s, vals) in &per_square {
        if spread(vals) > tol {
            v.push(format!("maximal cubes disagree on square {s}"));
        }
    }

    // A twist-dominant maximum makes the label move with its generator.
    let g = fam.graph();
    for &a in b.labels() {
        let m = fam.max_of(a);
        let Some(top) = m.iter().next().filter(|_| m.len() == 1) else { continue };
        if !g.is_twist_dominant(top) || a == Label::Vertex(top) {
            continue;
        }
        let gen = Label::Vertex(top);
        for &c in b.labels() {
            if c == gen || c == a || !fam.commute(a, c) || !fam.commute(gen, c) {
                continue;
            }
            let (Some(x), Some(y)) = (inner.get(&key(a, c)), inner.get(&key(gen, c))) else { continue };
            let all: Vec<f64> = x.iter().chain(y).copied().collect();
            if spread(&all) > tol {
                v.push(format!(
                    "angle between {} and {} differs from angle between {} and {}",
                    name(a),
                    name(c),
                    name(gen),
                    name(c)
                ));
            }
        }
    }
    v.sort();
    v.dedup();
    AllowabilityReport { violations: v }
}

fn spread(xs: &[f64]) -> f64 {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if xs.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// Rotate the hyperplane of `a` toward generator `w`: every edge whose label
/// has maximum `{w}` meets `e_a` at `radians`. A label whose maximum is a
/// twist-dominant `{v}` drags every other label with maximum `{v}` along.
pub fn rotate(b: &BlowupComplex, f: &MetricStructure, a: Label, w: usize, radians: f64) -> Result<MetricStructure> {
    let fam = b.family();
    fam.check_label(a)?;
    let g = fam.graph();
    if w >= g.n() {
        return Err(Error::IndexOutOfRange { index: w, len: g.n() });
    }
    if !fam.upper_link(a).contains(w) {
        return Err(Error::InvalidRotation(format!(
            "{} is not in the upper link of {}",
            g.name(w),
            fam.label_name(a)
        )));
    }
    if !(radians > 0.0 && radians < std::f64::consts::PI) {
        return Err(Error::InvalidRotation(format!("angle {radians} outside (0, π)")));
    }
    let m = fam.max_of(a);
    let movers: Vec<Label> = match m.iter().next() {
        Some(v) if m.len() == 1 && g.is_twist_dominant(v) => {
            b.labels().iter().copied().filter(|&l| fam.max_of(l) == m).collect()
        }
        _ => vec![a],
    };
    let targets: Vec<Label> = b
        .labels()
        .iter()
        .copied()
        .filter(|&l| fam.max_of(l) == crate::graph::VertexSet::singleton(w))
        .collect();
    let mut out = f.clone();
    for &x in &movers {
        for &y in &targets {
            if fam.commute(x, y) {
                out.set_angle(x, y, radians);
            }
        }
    }
    maximal_grams(b, &out).map_err(|e| Error::InvalidRotation(e.to_string()))?;
    Ok(out)
}

#[cfg(test)]
mod tests;
