//! Deforming an allowable structure to an orthotope one, keeping every edge
//! length fixed.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::{check_allowable_with_tol, key, maximal_grams, CubeGram, MetricStructure, DEFAULT_TOL};
use crate::blowup::BlowupComplex;
use crate::error::{Error, Result};
use crate::label::Label;
use crate::linalg;

#[derive(Debug, Clone, PartialEq)]
pub struct StraighteningState {
    pub t: f64,
    pub structure: MetricStructure,
    /// Straightened Gram of every maximal cube.
    pub grams: Vec<CubeGram>,
    /// Largest `|b_i · b_j|` over distinct normal directions in one cube.
    pub max_normal_overlap: f64,
    /// Largest change in an edge length.
    pub max_norm_drift: f64,
}

/// Unit normals per edge, with the index span each was taken against.
pub type NormalDirections = (Vec<DVector<f64>>, Vec<Vec<usize>>);

/// For each edge of a cube, the unit normal to the span of the edges above
/// it (in `≺`) that lie in its upper star, taken inside that span plus the
/// edge itself. Also returns those spans as index lists.
pub fn normal_directions(b: &BlowupComplex, g: &CubeGram) -> Result<NormalDirections> {
    let fam = b.family();
    let e = g.realize()?;
    let n = g.labels.len();
    let rows: Vec<DVector<f64>> = (0..n).map(|i| e.row(i).transpose()).collect();
    let mut normals = Vec::with_capacity(n);
    let mut above = Vec::with_capacity(n);
    for i in 0..n {
        let li = g.labels[i];
        let up = fam.upper_link(li);
        let prec: Vec<usize> = (0..n)
            .filter(|&k| k != i && up.contains(fam.rep(g.labels[k])) && fam.label_cmp(li, g.labels[k]).is_lt())
            .collect();
        let basis = linalg::orthonormal_basis(&prec.iter().map(|&k| rows[k].clone()).collect::<Vec<_>>(), linalg::PIVOT_FLOOR);
        let r = linalg::reject(&rows[i], &basis);
        let norm = r.norm();
        if norm <= linalg::PIVOT_FLOOR {
            return Err(Error::Degenerate(format!("edge {} lies in the span above it", fam.label_name(li))));
        }
        normals.push(r / norm);
        above.push(prec);
    }
    Ok((normals, above))
}

pub fn straighten(b: &BlowupComplex, f: &MetricStructure, t: f64) -> Result<StraighteningState> {
    straighten_with_tol(b, f, t, DEFAULT_TOL)
}

/// As [`straighten`], with `tol` used for the allowability check and the
/// consistency checks along the way.
pub fn straighten_with_tol(b: &BlowupComplex, f: &MetricStructure, t: f64, tol: f64) -> Result<StraighteningState> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidMetric(format!("straightening time {t} outside [0, 1]")));
    }
    let report = check_allowable_with_tol(b, f, tol);
    if let Some(first) = report.violations.first() {
        return Err(Error::InvalidMetric(format!("structure is not allowable: {first}")));
    }
    let fam = b.family();
    let mut grams = Vec::new();
    let mut pair_values: BTreeMap<(Label, Label), f64> = BTreeMap::new();
    let mut max_normal_overlap: f64 = 0.0;
    let mut max_norm_drift: f64 = 0.0;
    for g in maximal_grams(b, f)? {
        let n = g.labels.len();
        let e = g.realize()?;
        let rows: Vec<DVector<f64>> = (0..n).map(|i| e.row(i).transpose()).collect();
        let (normals, above) = normal_directions(b, &g)?;
        for i in 0..n {
            for j in i + 1..n {
                max_normal_overlap = max_normal_overlap.max(normals[i].dot(&normals[j]).abs());
            }
        }
        let mut moved: Vec<DVector<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            // e_i = r_i b_i + Σ r_ik b_k over the span above i.
            let cols: Vec<&DVector<f64>> = std::iter::once(&normals[i]).chain(above[i].iter().map(|&k| &normals[k])).collect();
            let m = cols.len();
            let basis = DMatrix::from_fn(n, m, |r, c| cols[c][r]);
            let coeffs = linalg::solve(&(basis.transpose() * &basis), &(basis.transpose() * &rows[i]))?;
            if (&basis * &coeffs - &rows[i]).norm() > tol * (1.0 + rows[i].norm()) {
                return Err(Error::Invariant(format!(
                    "edge {} is not in the span of its normal directions",
                    fam.label_name(g.labels[i])
                )));
            }
            let mut v = &normals[i] * coeffs[0];
            for c in 1..m {
                v += cols[c] * (t * coeffs[c]);
            }
            let len = rows[i].norm();
            let v = &v * (len / v.norm());
            max_norm_drift = max_norm_drift.max((v.norm() - len).abs());
            moved.push(v);
        }
        let gram = DMatrix::from_fn(n, n, |i, j| moved[i].dot(&moved[j]));
        for i in 0..n {
            for j in i + 1..n {
                let k = key(g.labels[i], g.labels[j]);
                match pair_values.get(&k) {
                    Some(&prev) if (prev - gram[(i, j)]).abs() > tol => {
                        return Err(Error::Invariant(format!(
                            "cubes disagree on {} and {} while straightening",
                            fam.label_name(k.0),
                            fam.label_name(k.1)
                        )))
                    }
                    Some(_) => {}
                    None => {
                        pair_values.insert(k, gram[(i, j)]);
                    }
                }
            }
        }
        grams.push(CubeGram { cube: g.cube, labels: g.labels.clone(), gram });
    }

    let mut structure = f.clone();
    for (&(x, y), &ip) in &pair_values {
        if f.angle(x, y).is_some() {
            let (wx, wy) = (f.width(x).unwrap(), f.width(y).unwrap());
            structure.set_angle(x, y, (ip / (wx * wy)).clamp(-1.0, 1.0).acos());
        }
    }
    Ok(StraighteningState { t, structure, grams, max_normal_overlap, max_norm_drift })
}

/// States at `samples` evenly spaced times from 0 to 1.
pub fn straightening_path(b: &BlowupComplex, f: &MetricStructure, samples: usize) -> Result<Vec<StraighteningState>> {
    straightening_path_with_tol(b, f, samples, DEFAULT_TOL)
}

pub fn straightening_path_with_tol(
    b: &BlowupComplex,
    f: &MetricStructure,
    samples: usize,
    tol: f64,
) -> Result<Vec<StraighteningState>> {
    if samples == 0 {
        return Err(Error::InvalidMetric("at least one sample is needed".into()));
    }
    (0..samples)
        .map(|k| {
            let t = if samples == 1 { 1.0 } else { k as f64 / (samples - 1) as f64 };
            straighten_with_tol(b, f, t, tol)
        })
        .collect()
}
