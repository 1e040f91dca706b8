//! Twist classification of hyperplanes from the cube complex alone, and the
//! label-based criterion it must agree with.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::blowup::BlowupComplex;
use crate::error::{Error, Result};
use crate::graph::VertexKind;
use crate::label::Label;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperplaneClass {
    pub label: Label,
    /// Labels of the hyperplanes crossing this one, in `≺` order.
    pub link: Vec<Label>,
    /// Labels of the hyperplanes with the same link, in `≺` order.
    pub fold_class: Vec<Label>,
    pub cyclic: bool,
    pub kind: VertexKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassJson {
    pub label: String,
    pub class: String,
    pub fold_class: Vec<String>,
    pub cyclic: bool,
}

pub fn kind_name(k: VertexKind) -> &'static str {
    match k {
        VertexKind::TwistDominant => "TwistDominant",
        VertexKind::TwistMinimal => "TwistMinimal",
    }
}

/// Links of every occurring hyperplane, computed once.
pub struct Classifier<'a> {
    b: &'a BlowupComplex,
    links: HashMap<Label, BTreeSet<Label>>,
}

impl<'a> Classifier<'a> {
    pub fn new(b: &'a BlowupComplex) -> Self {
        let links = b
            .labels()
            .iter()
            .map(|&l| (l, b.crossing_labels(l).into_iter().collect()))
            .collect();
        Classifier { b, links }
    }

    fn sorted(&self, mut ls: Vec<Label>) -> Vec<Label> {
        let fam = self.b.family();
        ls.sort_by(|x, y| fam.label_cmp(*x, *y));
        ls
    }

    pub fn link(&self, l: Label) -> Result<Vec<Label>> {
        let set = self.links.get(&l).ok_or_else(|| no_hyperplane(self.b, l))?;
        Ok(self.sorted(set.iter().copied().collect()))
    }

    pub fn fold_class(&self, l: Label) -> Result<Vec<Label>> {
        let mine = self.links.get(&l).ok_or_else(|| no_hyperplane(self.b, l))?;
        Ok(self.sorted(self.links.iter().filter(|(_, s)| *s == mine).map(|(&k, _)| k).collect()))
    }

    pub fn is_cyclic(&self, l: Label) -> Result<bool> {
        Ok(is_product_with_cycle(self.b, &self.fold_class(l)?))
    }

    pub fn classify(&self, l: Label) -> Result<HyperplaneClass> {
        let link = self.link(l)?;
        let fold_class = self.fold_class(l)?;
        let cyclic = is_product_with_cycle(self.b, &fold_class);
        let kind = if cyclic && self.has_smaller_class(&link, &fold_class) {
            VertexKind::TwistDominant
        } else {
            VertexKind::TwistMinimal
        };
        Ok(HyperplaneClass { label: l, link, fold_class, cyclic, kind })
    }

    /// Some hyperplane outside the class has `lk(K) ∪ [K]` inside `lk(H) ∪ [H]`.
    fn has_smaller_class(&self, link: &[Label], fold_class: &[Label]) -> bool {
        let big: BTreeSet<Label> = link.iter().chain(fold_class).copied().collect();
        self.links.iter().any(|(&k, lk)| {
            if fold_class.contains(&k) {
                return false;
            }
            let class = self.links.iter().filter(|(_, s)| *s == lk).map(|(&m, _)| m);
            lk.iter().copied().chain(class).all(|m| big.contains(&m))
        })
    }

    pub fn classify_all(&self) -> Vec<HyperplaneClass> {
        self.b
            .labels()
            .iter()
            .map(|&l| self.classify(l).expect("occurring label"))
            .collect()
    }
}

fn no_hyperplane(b: &BlowupComplex, l: Label) -> Error {
    match b.family().check_label(l) {
        Err(e) => e,
        Ok(()) => Error::Invariant(format!("no edge labelled {}", b.family().label_name(l))),
    }
}

pub fn hyperplane_link(b: &BlowupComplex, l: Label) -> Result<Vec<Label>> {
    Classifier::new(b).link(l)
}

pub fn is_cyclic(b: &BlowupComplex, l: Label) -> Result<bool> {
    Classifier::new(b).is_cyclic(l)
}

pub fn classify_hyperplane(b: &BlowupComplex, l: Label) -> Result<VertexKind> {
    Ok(Classifier::new(b).classify(l)?.kind)
}

pub fn classify(b: &BlowupComplex) -> Vec<HyperplaneClass> {
    Classifier::new(b).classify_all()
}

/// Twist type read off the labels: dominant exactly when the maximal class
/// is a single twist-dominant generator.
pub fn label_criterion(b: &BlowupComplex, l: Label) -> VertexKind {
    let fam = b.family();
    let m = fam.max_of(l);
    let g = fam.graph();
    match m.iter().collect::<Vec<_>>().as_slice() {
        [w] if g.is_twist_dominant(*w) => VertexKind::TwistDominant,
        _ => VertexKind::TwistMinimal,
    }
}

/// Classify every hyperplane and compare with the label criterion.
pub fn cross_check_classification(b: &BlowupComplex) -> Result<Vec<HyperplaneClass>> {
    let table = classify(b);
    for row in &table {
        let expected = label_criterion(b, row.label);
        if row.kind != expected {
            return Err(Error::Invariant(format!(
                "hyperplane {} classified {} but its label says {}",
                b.family().label_name(row.label),
                kind_name(row.kind),
                kind_name(expected)
            )));
        }
    }
    Ok(table)
}

pub fn report_json(b: &BlowupComplex, table: &[HyperplaneClass]) -> Vec<ClassJson> {
    let fam = b.family();
    table
        .iter()
        .map(|r| ClassJson {
            label: fam.label_name(r.label),
            class: kind_name(r.kind).to_string(),
            fold_class: r.fold_class.iter().map(|&l| fam.label_name(l)).collect(),
            cyclic: r.cyclic,
        })
        .collect()
}

/// Whether the union of carriers of `class` splits as a product of a
/// horizontal complex with a cycle whose edges carry each class label once.
pub fn is_product_with_cycle(b: &BlowupComplex, class: &[Label]) -> bool {
    product_structure(b, class).is_some()
}

struct Cycle {
    vertices: Vec<usize>,
    /// `forward[i]` labels the edge from `vertices[i]` to `vertices[i+1]`.
    forward: Vec<Label>,
}

/// Labels and positions of one cell in a slice.
type Slice = (Vec<Label>, Vec<usize>);

fn product_structure(b: &BlowupComplex, class: &[Label]) -> Option<()> {
    let n = class.len();
    if n == 0 {
        return None;
    }
    let fam = b.family();
    for (i, &x) in class.iter().enumerate() {
        if class[i + 1..].iter().any(|&y| fam.commute(x, y)) {
            return None;
        }
    }
    let in_class = |l: Label| class.contains(&l);
    let union: BTreeSet<usize> = class.iter().flat_map(|&l| b.carrier(l)).collect();
    let verts: BTreeSet<usize> = union.iter().filter(|&&c| b.cube(c).dim() == 0).map(|&c| b.cube(c).base()).collect();

    // Class edges at each vertex, as (edge, other end).
    let mut incident: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for (e, edge) in b.edges().iter().enumerate() {
        if in_class(edge.label) {
            incident.entry(edge.from).or_default().push((e, edge.to));
            incident.entry(edge.to).or_default().push((e, edge.from));
        }
    }
    if verts.iter().any(|x| incident.get(x).map_or(0, Vec::len) != 2) {
        return None;
    }

    // Trace the class cycles.
    let mut cycle_of: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut cycles: Vec<Cycle> = Vec::new();
    for &start in &verts {
        if cycle_of.contains_key(&start) {
            continue;
        }
        let mut vertices = vec![start];
        let mut forward = Vec::new();
        let (mut prev_edge, mut here) = (usize::MAX, start);
        loop {
            let &(e, next) = incident[&here].iter().find(|(e, _)| *e != prev_edge)?;
            forward.push(b.edges()[e].label);
            prev_edge = e;
            here = next;
            if here == start {
                break;
            }
            if vertices.len() > n {
                return None;
            }
            vertices.push(here);
        }
        let distinct: BTreeSet<Label> = forward.iter().copied().collect();
        if vertices.len() != n || distinct.len() != n {
            return None;
        }
        for (k, &v) in vertices.iter().enumerate() {
            if cycle_of.insert(v, (cycles.len(), k)).is_some() {
                return None;
            }
        }
        cycles.push(Cycle { vertices, forward });
    }

    // Align positions along edges outside the class.
    let mut horizontal_adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for &c in &union {
        let cube = b.cube(c);
        if cube.dim() == 1 && !in_class(cube.labels[0]) {
            horizontal_adj.entry(cube.corners[0]).or_default().push(cube.corners[1]);
            horizontal_adj.entry(cube.corners[1]).or_default().push(cube.corners[0]);
        }
    }
    let mut position: HashMap<usize, usize> = HashMap::new();
    let mut component: HashMap<usize, usize> = HashMap::new();
    let mut labels_of_component: Vec<Vec<Label>> = Vec::new();
    let place = |cyc: &Cycle, at: usize, pos: usize, reversed: bool, position: &mut HashMap<usize, usize>| {
        for k in 0..n {
            let idx = if reversed { (at + n - k) % n } else { (at + k) % n };
            position.insert(cyc.vertices[idx], (pos + k) % n);
        }
    };
    let forward_from = |cyc: &Cycle, at: usize, reversed: bool| -> Vec<Label> {
        (0..n)
            .map(|k| {
                if reversed {
                    cyc.forward[(at + 2 * n - k - 1) % n]
                } else {
                    cyc.forward[(at + k) % n]
                }
            })
            .collect()
    };
    for c0 in 0..cycles.len() {
        if component.contains_key(&c0) {
            continue;
        }
        let comp = labels_of_component.len();
        labels_of_component.push(cycles[c0].forward.clone());
        place(&cycles[c0], 0, 0, false, &mut position);
        component.insert(c0, comp);
        let mut queue: VecDeque<usize> = cycles[c0].vertices.iter().copied().collect();
        while let Some(x) = queue.pop_front() {
            for &y in horizontal_adj.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                let (cy, ky) = cycle_of[&y];
                if component.contains_key(&cy) {
                    continue;
                }
                let p = position[&x];
                let want: Vec<Label> = (0..n).map(|k| labels_of_component[comp][(p + k) % n]).collect();
                let reversed = if forward_from(&cycles[cy], ky, false) == want {
                    false
                } else if forward_from(&cycles[cy], ky, true) == want {
                    true
                } else {
                    return None;
                };
                place(&cycles[cy], ky, p, reversed, &mut position);
                component.insert(cy, comp);
                queue.extend(cycles[cy].vertices.iter().copied());
            }
        }
    }
    let comp_of = |x: usize| component[&cycle_of[&x].0];

    // Every class edge runs from position i to i+1 with the component's label i.
    for edge in b.edges().iter().filter(|e| in_class(e.label)) {
        let labels = &labels_of_component[comp_of(edge.from)];
        let i = labels.iter().position(|&l| l == edge.label)?;
        let ends = [position[&edge.from], position[&edge.to]];
        if !(ends == [i, (i + 1) % n] || ends == [(i + 1) % n, i]) {
            return None;
        }
    }

    // Horizontal cells sit at one position; vertical cells are σ × edge.
    let mut slices: BTreeMap<(usize, usize), Vec<Slice>> = BTreeMap::new();
    let mut horizontal: BTreeMap<usize, usize> = BTreeMap::new();
    let mut seen_as_base: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in &union {
        let cube = b.cube(c);
        let class_bits: Vec<usize> = (0..cube.dim()).filter(|&k| in_class(cube.labels[k])).collect();
        match class_bits.as_slice() {
            [] => {
                let p = position[&cube.base()];
                if cube.corners.iter().any(|x| position[x] != p) {
                    return None;
                }
                let projected = cube.corners.iter().map(|x| cycle_of[x].0).collect();
                slices.entry((comp_of(cube.base()), p)).or_default().push((cube.labels.clone(), projected));
                horizontal.insert(c, p);
            }
            [bit] => {
                let f = cube.labels[*bit];
                let i = labels_of_component[comp_of(cube.base())].iter().position(|&l| l == f)?;
                let facets = b.facets(c);
                let (f0, f1) = (facets[2 * bit], facets[2 * bit + 1]);
                let p0 = position[&b.cube(f0).base()];
                let sigma = if p0 == i { f0 } else { f1 };
                *seen_as_base.entry(sigma).or_default() += 1;
            }
            _ => return None,
        }
    }
    for (&h, &p) in &horizontal {
        let _ = p;
        if seen_as_base.get(&h) != Some(&1) {
            return None;
        }
    }
    if seen_as_base.keys().any(|k| !horizontal.contains_key(k)) {
        return None;
    }
    for comp in 0..labels_of_component.len() {
        let mut reference: Option<Vec<(Vec<Label>, Vec<usize>)>> = None;
        for p in 0..n {
            let mut slice = slices.get(&(comp, p)).cloned().unwrap_or_default();
            slice.sort();
            match &reference {
                None => reference = Some(slice),
                Some(r) if *r != slice => return None,
                _ => {}
            }
        }
    }
    Some(())
}
