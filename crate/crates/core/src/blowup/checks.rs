//! Structural self-checks of a built blowup.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::BlowupComplex;
use crate::label::Label;

/// Vertex of a link: an edge index and which end (0 tail, 1 head) touches.
type LinkVertex = (usize, u8);

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinkReport {
    pub vertex: usize,
    pub link_vertices: usize,
    pub simplices: usize,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StructuralReport {
    pub flag_links: Vec<String>,
    pub one_edge_per_label: Vec<String>,
    pub unique_max_cube: Vec<String>,
    pub intersect_iff_commute: Vec<String>,
    pub parallel_classes: Vec<String>,
    pub e_subcomplex: Vec<String>,
}

impl StructuralReport {
    pub fn violations(&self) -> impl Iterator<Item = &String> {
        self.flag_links
            .iter()
            .chain(&self.one_edge_per_label)
            .chain(&self.unique_max_cube)
            .chain(&self.intersect_iff_commute)
            .chain(&self.parallel_classes)
            .chain(&self.e_subcomplex)
    }

    pub fn is_ok(&self) -> bool {
        self.violations().next().is_none()
    }
}

impl BlowupComplex {
    pub fn structural_report(&self) -> StructuralReport {
        StructuralReport {
            flag_links: (0..self.vertex_count())
                .flat_map(|x| self.vertex_link(x).violations)
                .collect(),
            one_edge_per_label: self.check_one_edge_per_label(),
            unique_max_cube: self.check_unique_max_cubes(),
            intersect_iff_commute: self.check_intersections(),
            parallel_classes: self.check_parallel_classes(),
            e_subcomplex: self.check_e_subcomplex(),
        }
    }

    /// The link of vertex `x` and whether it is a flag simplicial complex.
    pub fn vertex_link(&self, x: usize) -> LinkReport {
        let mut report = LinkReport { vertex: x, ..Default::default() };
        let mut simplices: HashSet<BTreeSet<LinkVertex>> = HashSet::new();
        let mut adjacency: HashMap<LinkVertex, BTreeSet<LinkVertex>> = HashMap::new();
        for (ci, c) in self.cubes().iter().enumerate() {
            if c.dim() == 0 {
                continue;
            }
            for (j, &corner) in c.corners.iter().enumerate() {
                if corner != x {
                    continue;
                }
                let mut simplex = BTreeSet::new();
                for (b, &l) in c.labels.iter().enumerate() {
                    let base = c.corners[j & !(1 << b)];
                    let edge = self.find_cube(&[l], base).map(|e1| e1 - self.cubes_of_dim(1).start);
                    let Some(edge) = edge else {
                        report.violations.push(format!("vertex {x}: cube {ci} has no edge along {l:?}"));
                        continue;
                    };
                    simplex.insert((edge, (j >> b & 1) as u8));
                }
                if simplex.len() != c.dim() {
                    report.violations.push(format!("vertex {x}: cube {ci} meets its corner twice along one edge"));
                }
                if c.dim() == 2 {
                    let pts: Vec<_> = simplex.iter().copied().collect();
                    if pts.len() == 2 {
                        adjacency.entry(pts[0]).or_default().insert(pts[1]);
                        adjacency.entry(pts[1]).or_default().insert(pts[0]);
                    }
                }
                if c.dim() == 1 {
                    adjacency.entry(*simplex.iter().next().unwrap()).or_default();
                }
                if !simplices.insert(simplex) {
                    report.violations.push(format!("vertex {x}: two cubes share a corner simplex"));
                }
            }
        }
        report.link_vertices = adjacency.len();
        report.simplices = simplices.len();

        // Flag: every clique of the link's 1-skeleton spans a simplex.
        let nodes: Vec<LinkVertex> = adjacency.keys().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let mut stack: Vec<(Vec<LinkVertex>, usize)> = vec![(Vec::new(), 0)];
        while let Some((clique, from)) = stack.pop() {
            if clique.len() >= 3 {
                let set: BTreeSet<_> = clique.iter().copied().collect();
                if !simplices.contains(&set) {
                    report.violations.push(format!("vertex {x}: empty simplex on {clique:?}"));
                    continue;
                }
            }
            for (k, &n) in nodes.iter().enumerate().skip(from) {
                if clique.iter().all(|m| adjacency[m].contains(&n)) {
                    let mut next = clique.clone();
                    next.push(n);
                    stack.push((next, k + 1));
                }
            }
        }
        report
    }

    fn check_one_edge_per_label(&self) -> Vec<String> {
        let mut seen: HashMap<(usize, Label, u8), usize> = HashMap::new();
        let mut out = Vec::new();
        for (i, e) in self.edges().iter().enumerate() {
            let ends: [(usize, u8); 2] = if e.oriented { [(e.from, 0), (e.to, 1)] } else { [(e.from, 2), (e.to, 2)] };
            for (x, dir) in ends {
                if let Some(prev) = seen.insert((x, e.label, dir), i) {
                    out.push(format!("vertex {x}: edges {prev} and {i} both labelled {:?}", e.label));
                }
            }
            if e.oriented && !e.is_loop() {
                // A non-loop generator edge must be the only one of its label at both ends.
                for x in [e.from, e.to] {
                    let other = self
                        .edges()
                        .iter()
                        .enumerate()
                        .any(|(j, f)| j != i && f.label == e.label && (f.from == x || f.to == x));
                    if other {
                        out.push(format!("vertex {x}: two {:?} edges", e.label));
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn check_unique_max_cubes(&self) -> Vec<String> {
        let fam = self.family();
        let labels = fam.labels();
        let mut out = Vec::new();
        for set in maximal_commuting_sets(&labels, |a, b| fam.commute(a, b)) {
            if let Err(e) = self.max_cube_for(&set) {
                out.push(format!("{set:?}: {e}"));
            }
        }
        out
    }

    fn check_intersections(&self) -> Vec<String> {
        let fam = self.family();
        let mut crossing: HashSet<(Label, Label)> = HashSet::new();
        for i in self.cubes_of_dim(2) {
            let c = self.cube(i);
            crossing.insert((c.labels[0], c.labels[1]));
        }
        let labels = fam.labels();
        let mut out = Vec::new();
        for (i, &a) in labels.iter().enumerate() {
            for &b in &labels[i + 1..] {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                if crossing.contains(&(lo, hi)) != fam.commute(a, b) {
                    out.push(format!("{a:?} and {b:?}"));
                }
            }
        }
        out
    }

    fn check_parallel_classes(&self) -> Vec<String> {
        let mut groups: HashMap<Vec<Label>, Vec<usize>> = HashMap::new();
        for (i, c) in self.cubes().iter().enumerate() {
            groups.entry(c.labels.clone()).or_default().push(i);
        }
        let mut out = Vec::new();
        for (labels, members) in &groups {
            if members.len() < 2 {
                continue;
            }
            let pos: HashMap<usize, usize> = members.iter().enumerate().map(|(k, &c)| (c, k)).collect();
            let mut uf: Vec<usize> = (0..members.len()).collect();
            fn find(uf: &mut [usize], x: usize) -> usize {
                let mut r = x;
                while uf[r] != r {
                    r = uf[r];
                }
                uf[x] = r;
                r
            }
            for (i, c) in self.cubes().iter().enumerate() {
                if c.dim() != labels.len() + 1 {
                    continue;
                }
                let Some(extra) = c.labels.iter().copied().find(|l| !labels.contains(l)) else { continue };
                if !extra.is_part() || !labels.iter().all(|l| c.has_label(*l)) {
                    continue;
                }
                let b = c.bit_of(extra).unwrap();
                let facets = self.facets(i);
                let (f0, f1) = (facets[2 * b], facets[2 * b + 1]);
                if let (Some(&p0), Some(&p1)) = (pos.get(&f0), pos.get(&f1)) {
                    let (r0, r1) = (find(&mut uf, p0), find(&mut uf, p1));
                    uf[r0] = r1;
                }
            }
            let roots: HashSet<usize> = (0..members.len()).map(|k| find(&mut uf, k)).collect();
            if roots.len() != 1 {
                out.push(format!("{labels:?}: {} parallel classes", roots.len()));
            }
        }
        out.sort();
        out
    }

    fn check_e_subcomplex(&self) -> Vec<String> {
        let mut out = Vec::new();
        let cells = self.e_subcomplex();
        let n = self.vertex_count();
        let mut comp: Vec<usize> = (0..n).collect();
        fn find(c: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while c[r] != r {
                r = c[r];
            }
            c[x] = r;
            r
        }
        for &i in &cells {
            let c = self.cube(i);
            if c.dim() == 1 {
                let (a, b) = (find(&mut comp, c.corners[0]), find(&mut comp, c.corners[1]));
                comp[a] = b;
            }
        }
        let roots: HashSet<usize> = (0..n).map(|x| find(&mut comp, x)).collect();
        if roots.len() != 1 {
            out.push(format!("E has {} components", roots.len()));
        }
        if !self.collapses_to_point(&cells) {
            out.push("E does not collapse to a point".into());
        }
        out
    }

    /// Greedy elementary collapses on a subcomplex given by cube indices.
    pub fn collapses_to_point(&self, cells: &[usize]) -> bool {
        let mut alive: HashSet<usize> = cells.iter().copied().collect();
        let mut cofaces: HashMap<usize, Vec<usize>> = HashMap::new();
        for &i in cells {
            if self.cube(i).dim() > 0 {
                let mut fs = self.facets(i);
                fs.sort_unstable();
                fs.dedup();
                for f in fs {
                    cofaces.entry(f).or_default().push(i);
                }
            }
        }
        loop {
            let mut free = None;
            let mut order: Vec<usize> = alive.iter().copied().collect();
            order.sort_unstable_by_key(|&i| std::cmp::Reverse((self.cube(i).dim(), i)));
            for &f in &order {
                let live: Vec<usize> = cofaces
                    .get(&f)
                    .map(|cs| cs.iter().copied().filter(|c| alive.contains(c)).collect())
                    .unwrap_or_default();
                if live.len() == 1 {
                    let c = live[0];
                    // A face met twice by its coface (a loop-like gluing) is not free.
                    if self.facets(c).iter().filter(|&&g| g == f).count() == 1 {
                        free = Some((f, c));
                        break;
                    }
                }
            }
            match free {
                Some((f, c)) => {
                    alive.remove(&f);
                    alive.remove(&c);
                }
                None => break,
            }
        }
        alive.len() == 1
    }
}

/// Maximal sets of pairwise commuting labels (maximal cliques).
pub fn maximal_commuting_sets(labels: &[Label], commute: impl Fn(Label, Label) -> bool) -> Vec<Vec<Label>> {
    let mut out = Vec::new();
    fn rec(
        r: Vec<Label>,
        p: Vec<Label>,
        x: Vec<Label>,
        commute: &dyn Fn(Label, Label) -> bool,
        out: &mut Vec<Vec<Label>>,
    ) {
        if p.is_empty() && x.is_empty() {
            out.push(r);
            return;
        }
        let mut p = p;
        let mut x = x;
        while let Some(v) = p.first().copied() {
            let mut r2 = r.clone();
            r2.push(v);
            let p2 = p.iter().copied().filter(|&u| u != v && commute(u, v)).collect();
            let x2 = x.iter().copied().filter(|&u| commute(u, v)).collect();
            rec(r2, p2, x2, commute, out);
            p.remove(0);
            x.push(v);
        }
    }
    rec(Vec::new(), labels.to_vec(), Vec::new(), &commute, &mut out);
    for s in &mut out {
        s.sort();
    }
    out.sort();
    out
}
