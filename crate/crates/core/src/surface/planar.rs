//! Planar bipartite graphs as rotation systems.
//!
//! Faces are traced from the rotation: the face to the left of a dart `u -> v`
//! continues with the edge clockwise-adjacent to it at `v`. Legs are half-edges
//! with no far endpoint; a trace that walks out along a leg turns straight back.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lattice::HalfLatticePoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GVertex {
    pub color: Color,
    pub pos: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GEdge {
    pub a: usize,
    /// `None` for a leg.
    pub b: Option<usize>,
    /// Direction of a leg, for sorting rotations.
    pub leg_dir: Option<[i64; 2]>,
}

/// An edge traversed in one direction: `rev == false` runs from `a` to `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart {
    pub edge: usize,
    pub rev: bool,
}

impl Dart {
    pub fn twin(self) -> Dart {
        Dart { edge: self.edge, rev: !self.rev }
    }
}

#[derive(Clone, Debug)]
pub struct FaceInfo {
    pub darts: Vec<Dart>,
    pub label: Option<HalfLatticePoint>,
    pub has_leg: bool,
}

#[derive(Clone, Debug, Default)]
pub struct PlanarBipartiteGraph {
    pub vertices: Vec<Option<GVertex>>,
    pub edges: Vec<Option<GEdge>>,
    /// Incident edges of each vertex in counterclockwise order.
    pub rot: Vec<Vec<usize>>,
    pub labels: HashMap<Dart, HalfLatticePoint>,
}

const LEG_SCALE: f64 = 1e6;

impl PlanarBipartiteGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, color: Color, pos: [f64; 2]) -> usize {
        self.vertices.push(Some(GVertex { color, pos }));
        self.rot.push(Vec::new());
        self.vertices.len() - 1
    }

    /// Appends an edge to both rotations; call [`sort_rotations_by_geometry`]
    /// or insert at explicit positions afterwards.
    pub fn add_edge(&mut self, a: usize, b: Option<usize>) -> usize {
        let id = self.edges.len();
        self.edges.push(Some(GEdge { a, b, leg_dir: None }));
        self.rot[a].push(id);
        if let Some(b) = b {
            self.rot[b].push(id);
        }
        id
    }

    pub fn add_leg(&mut self, a: usize, dir: [f64; 2]) -> usize {
        let id = self.add_edge(a, None);
        self.edges[id].as_mut().unwrap().leg_dir = Some([(dir[0] * LEG_SCALE) as i64, (dir[1] * LEG_SCALE) as i64]);
        id
    }

    pub fn vertex(&self, v: usize) -> &GVertex {
        self.vertices[v].as_ref().expect("live vertex")
    }

    pub fn edge(&self, e: usize) -> &GEdge {
        self.edges[e].as_ref().expect("live edge")
    }

    pub fn live_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertices.len()).filter(|&v| self.vertices[v].is_some())
    }

    pub fn live_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(|&e| self.edges[e].is_some())
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rot[v].len()
    }

    pub fn is_leg(&self, e: usize) -> bool {
        self.edge(e).b.is_none()
    }

    pub fn tail(&self, d: Dart) -> Option<usize> {
        let e = self.edge(d.edge);
        if d.rev {
            e.b
        } else {
            Some(e.a)
        }
    }

    pub fn head(&self, d: Dart) -> Option<usize> {
        let e = self.edge(d.edge);
        if d.rev {
            Some(e.a)
        } else {
            e.b
        }
    }

    /// The other endpoint of `e` seen from `v`.
    pub fn opposite(&self, e: usize, v: usize) -> Option<usize> {
        let ed = self.edge(e);
        if ed.a == v {
            ed.b
        } else {
            Some(ed.a)
        }
    }

    /// Dart of `e` leaving `v`.
    pub fn dart_from(&self, e: usize, v: usize) -> Dart {
        Dart { edge: e, rev: self.edge(e).a != v }
    }

    fn angle(&self, v: usize, e: usize) -> f64 {
        let p = self.vertex(v).pos;
        let ed = self.edge(e);
        let dir = match self.opposite(e, v) {
            Some(w) if w != v => {
                let q = self.vertex(w).pos;
                [q[0] - p[0], q[1] - p[1]]
            }
            _ => {
                let d = ed.leg_dir.unwrap_or([1, 0]);
                [d[0] as f64, d[1] as f64]
            }
        };
        dir[1].atan2(dir[0])
    }

    pub fn sort_rotations_by_geometry(&mut self) {
        for v in 0..self.vertices.len() {
            if self.vertices[v].is_none() {
                continue;
            }
            let mut r = std::mem::take(&mut self.rot[v]);
            r.sort_by(|&x, &y| self.angle(v, x).partial_cmp(&self.angle(v, y)).unwrap());
            self.rot[v] = r;
        }
    }

    /// Next dart along the face on the left of `d`.
    pub fn next_in_face(&self, d: Dart) -> Dart {
        match self.head(d) {
            None => d.twin(),
            Some(v) => {
                let r = &self.rot[v];
                let i = r.iter().position(|&e| e == d.edge && self.dart_from(e, v) == d.twin()).or_else(|| r.iter().position(|&e| e == d.edge)).unwrap();
                let j = (i + r.len() - 1) % r.len();
                self.dart_from(r[j], v)
            }
        }
    }

    pub fn all_darts(&self) -> Vec<Dart> {
        self.live_edges().flat_map(|e| [Dart { edge: e, rev: false }, Dart { edge: e, rev: true }]).collect()
    }

    /// All faces with their labels; a face carrying two labels is an error.
    pub fn faces(&self) -> Vec<FaceInfo> {
        let mut seen: HashMap<Dart, usize> = HashMap::new();
        let mut out = Vec::new();
        for d0 in self.all_darts() {
            if seen.contains_key(&d0) {
                continue;
            }
            let mut darts = Vec::new();
            let mut d = d0;
            loop {
                seen.insert(d, out.len());
                darts.push(d);
                d = self.next_in_face(d);
                if d == d0 {
                    break;
                }
            }
            let label = darts.iter().find_map(|d| self.labels.get(d).copied());
            let has_leg = darts.iter().any(|d| self.is_leg(d.edge));
            out.push(FaceInfo { darts, label, has_leg });
        }
        out
    }

    /// Map from dart to the index of its face in [`faces`].
    pub fn face_index(&self, faces: &[FaceInfo]) -> HashMap<Dart, usize> {
        let mut m = HashMap::new();
        for (i, f) in faces.iter().enumerate() {
            for d in &f.darts {
                m.insert(*d, i);
            }
        }
        m
    }

    pub fn set_label(&mut self, d: Dart, l: HalfLatticePoint) {
        self.labels.insert(d, l);
    }

    pub fn find_face(&self, l: &HalfLatticePoint) -> Option<FaceInfo> {
        self.faces().into_iter().find(|f| f.label.as_ref() == Some(l))
    }

    /// Bipartiteness, rotation consistency, unique labels and Euler's formula
    /// (each leg counted with a virtual far endpoint).
    pub fn validate(&self) -> Result<()> {
        for e in self.live_edges() {
            let ed = self.edge(e);
            if let Some(b) = ed.b {
                if self.vertex(ed.a).color == self.vertex(b).color {
                    return Err(Error::Inconsistent(format!("edge {e} joins equal colours")));
                }
                if !self.rot[b].contains(&e) {
                    return Err(Error::Inconsistent(format!("edge {e} missing from rotation of {b}")));
                }
            }
            if !self.rot[ed.a].contains(&e) {
                return Err(Error::Inconsistent(format!("edge {e} missing from rotation of {}", ed.a)));
            }
        }
        let faces = self.faces();
        let mut labels = HashMap::new();
        for f in &faces {
            let ls: Vec<_> = f.darts.iter().filter_map(|d| self.labels.get(d)).collect();
            if ls.windows(2).any(|w| w[0] != w[1]) {
                return Err(Error::Inconsistent("face carries two labels".into()));
            }
            if let Some(l) = ls.first() {
                if labels.insert(**l, ()).is_some() {
                    return Err(Error::Inconsistent(format!("label {l} used twice")));
                }
            }
        }
        let v = self.live_vertices().count() as i64;
        let legs = self.live_edges().filter(|&e| self.is_leg(e)).count() as i64;
        let e = self.live_edges().count() as i64;
        let comps = self.components() as i64;
        if v + legs - e + faces.len() as i64 != 1 + comps {
            return Err(Error::Inconsistent(format!("Euler characteristic fails: V={v} L={legs} E={e} F={}", faces.len())));
        }
        Ok(())
    }

    fn components(&self) -> usize {
        let mut comp = vec![usize::MAX; self.vertices.len()];
        let mut n = 0;
        for s in self.live_vertices() {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = n;
            while let Some(u) = stack.pop() {
                for &e in &self.rot[u] {
                    if let Some(w) = self.opposite(e, u) {
                        if comp[w] == usize::MAX {
                            comp[w] = n;
                            stack.push(w);
                        }
                    }
                }
            }
            n += 1;
        }
        n
    }

    /// Labels of the faces on the left of each dart of `e`.
    pub fn edge_face_labels(&self, e: usize, faces: &[FaceInfo], index: &HashMap<Dart, usize>) -> [Option<HalfLatticePoint>; 2] {
        let f = |d: Dart| faces[index[&d]].label;
        [f(Dart { edge: e, rev: false }), f(Dart { edge: e, rev: true })]
    }

    /// Keeps each labelled face labelled across a rewrite: for every old face
    /// record one dart that survives.
    pub(crate) fn snapshot_labels(&self) -> Vec<(Vec<Dart>, HalfLatticePoint)> {
        self.faces().into_iter().filter_map(|f| f.label.map(|l| (f.darts, l))).collect()
    }

    pub(crate) fn restore_labels(&mut self, snap: Vec<(Vec<Dart>, HalfLatticePoint)>, skip: &[HalfLatticePoint]) {
        self.labels.clear();
        for (darts, l) in snap {
            if skip.contains(&l) {
                continue;
            }
            if let Some(d) = darts.into_iter().find(|d| self.edges.get(d.edge).is_some_and(|e| e.is_some())) {
                self.labels.insert(d, l);
            }
        }
    }

    /// Removes an edge from the graph and both rotations.
    pub fn remove_edge(&mut self, e: usize) {
        let ed = self.edges[e].take().expect("live edge");
        self.rot[ed.a].retain(|&x| x != e);
        if let Some(b) = ed.b {
            self.rot[b].retain(|&x| x != e);
        }
    }

    /// Contracts the degree-two vertex `w`, merging its two neighbours.
    /// Returns the surviving neighbour.
    pub fn contract_degree_two(&mut self, w: usize) -> Result<usize> {
        if self.degree(w) != 2 {
            return Err(Error::Inapplicable(format!("vertex {w} has degree {}", self.degree(w))));
        }
        let (e1, e2) = (self.rot[w][0], self.rot[w][1]);
        let (a, b) = match (self.opposite(e1, w), self.opposite(e2, w)) {
            (Some(a), Some(b)) if a != b => (a, b),
            _ => return Err(Error::Inapplicable("contraction needs two distinct neighbours".into())),
        };
        let snap = self.snapshot_labels();
        let rb = self.rot[b].clone();
        let k = rb.iter().position(|&e| e == e2).unwrap();
        let moved: Vec<usize> = (1..rb.len()).map(|i| rb[(k + i) % rb.len()]).collect();
        for &e in &moved {
            let ed = self.edges[e].as_mut().unwrap();
            if ed.a == b {
                ed.a = a;
            } else {
                ed.b = Some(a);
            }
        }
        let i = self.rot[a].iter().position(|&e| e == e1).unwrap();
        self.rot[a].splice(i..=i, moved);
        self.rot[b].clear();
        self.rot[w].clear();
        self.edges[e1] = None;
        self.edges[e2] = None;
        self.vertices[w] = None;
        self.vertices[b] = None;
        self.restore_labels(snap, &[]);
        Ok(a)
    }

    /// Square grid graph with `w x h` vertices, a convenient small planar bipartite example.
    pub fn grid(w: usize, h: usize) -> Self {
        let mut g = PlanarBipartiteGraph::new();
        for j in 0..h {
            for i in 0..w {
                let c = if (i + j) % 2 == 0 { Color::White } else { Color::Black };
                g.add_vertex(c, [i as f64, j as f64]);
            }
        }
        for j in 0..h {
            for i in 0..w {
                let v = j * w + i;
                if i + 1 < w {
                    g.add_edge(v, Some(v + 1));
                }
                if j + 1 < h {
                    g.add_edge(v, Some(v + w));
                }
            }
        }
        g.sort_rotations_by_geometry();
        g
    }

    /// Labels every face of a graph with distinct synthetic lattice points.
    pub fn label_all_faces(&mut self) {
        let faces = self.faces();
        for (i, f) in faces.iter().enumerate() {
            self.labels.insert(f.darts[0], HalfLatticePoint::vertex([i as i32, 0, -(i as i32)]));
        }
    }
}
