//! The associated graph of a stepped surface, restricted to a window.
//!
//! Every surface square contributes a small quadrilateral with one vertex per
//! side; the two vertices on a shared side are joined by a dual edge. Sides cut
//! by the window end in legs, half-edges frozen to the reference configuration.

use std::collections::{BTreeMap, HashMap, VecDeque};

use super::planar::{Color, PlanarBipartiteGraph};
use super::{add, level, Cube, SteppedSolid, Window};
use crate::error::{Error, Result};
use crate::lattice::{Axis, HalfLatticePoint};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Square {
    pub axis: Axis,
    pub v: Cube,
    /// Counterclockwise as seen from the outward normal, starting at `v`.
    pub corners: [Cube; 4],
}

impl Square {
    pub fn new(v: Cube, axis: Axis) -> Self {
        let (b, c) = axis.others();
        let eb = b.unit();
        let ec = c.unit();
        Square { axis, v, corners: [v, add(v, eb), add(add(v, eb), ec), add(v, ec)] }
    }

    pub fn label(&self) -> HalfLatticePoint {
        HalfLatticePoint::face(self.v, self.axis)
    }

    /// `v` and the opposite corner are the extreme levels; the other two are mid corners.
    pub fn is_mid_corner(&self, p: Cube) -> bool {
        let l = level(p);
        l > level(self.v) && l < level(self.v) + 2
    }

    pub fn side(&self, t: usize) -> (Cube, Cube) {
        side_key(self.corners[t], self.corners[(t + 1) % 4])
    }
}

fn side_key(a: Cube, b: Cube) -> (Cube, Cube) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    /// Edge of the small quadrilateral of `square`, at `corner`.
    Quad { square: usize, corner: Cube },
    /// Edge crossing the side shared by two squares.
    Dual { side: (Cube, Cube) },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SEdge {
    pub ends: [usize; 2],
    pub kind: EdgeKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leg {
    pub vertex: usize,
    pub side: (Cube, Cube),
}

#[derive(Clone, Debug)]
pub struct SurfaceGraph {
    pub solid: SteppedSolid,
    pub window: Window,
    pub squares: Vec<Square>,
    /// Vertex `i` sits on side `vertices[i].1` of square `vertices[i].0`.
    pub vertices: Vec<(usize, usize)>,
    pub edges: Vec<SEdge>,
    pub legs: Vec<Leg>,
    pub colors: Vec<Color>,
    pub leg_of: Vec<Option<usize>>,
}

/// Projection onto the plane orthogonal to `(1,1,1)`, orientation preserving
/// when viewed from above.
pub fn project(p: [f64; 3]) -> [f64; 2] {
    [(p[0] - p[1]) / 2f64.sqrt(), (p[0] + p[1] - 2.0 * p[2]) / 6f64.sqrt()]
}

fn f3(c: Cube) -> [f64; 3] {
    [c[0] as f64, c[1] as f64, c[2] as f64]
}

impl SurfaceGraph {
    /// Builds the associated graph of `solid` inside `window`.
    ///
    /// Every modified cube must sit at least two cells inside the window.
    pub fn build(solid: &SteppedSolid, window: Window) -> Result<Self> {
        solid.validate()?;
        for c in solid.removed.iter().chain(&solid.added) {
            for i in 0..3 {
                if c[i] - 2 < window.lo[i] || c[i] + 1 > window.hi[i] {
                    return Err(Error::WindowTooSmall { required: 2 });
                }
            }
        }
        let mut squares = Vec::new();
        for i in window.lo[0]..=window.hi[0] {
            for j in window.lo[1]..=window.hi[1] {
                for k in window.lo[2]..=window.hi[2] {
                    for a in Axis::ALL {
                        if solid.is_surface_square([i, j, k], a) {
                            let s = Square::new([i, j, k], a);
                            if s.corners.iter().all(|&p| window.contains(p)) {
                                squares.push(s);
                            }
                        }
                    }
                }
            }
        }
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        let mut sides: BTreeMap<(Cube, Cube), Vec<usize>> = BTreeMap::new();
        for (si, s) in squares.iter().enumerate() {
            let base = vertices.len();
            for t in 0..4 {
                vertices.push((si, t));
                sides.entry(s.side(t)).or_default().push(base + t);
            }
            for t in 0..4 {
                edges.push(SEdge {
                    ends: [base + t, base + (t + 1) % 4],
                    kind: EdgeKind::Quad { square: si, corner: s.corners[(t + 1) % 4] },
                });
            }
        }
        let mut legs = Vec::new();
        let mut leg_of = vec![None; vertices.len()];
        for (side, vs) in sides {
            match vs.as_slice() {
                [a, b] => edges.push(SEdge { ends: [*a, *b], kind: EdgeKind::Dual { side } }),
                [a] => {
                    leg_of[*a] = Some(legs.len());
                    legs.push(Leg { vertex: *a, side });
                }
                _ => return Err(Error::Inconsistent(format!("side {side:?} shared by {} squares", vs.len()))),
            }
        }
        let colors = two_colour(vertices.len(), &edges)?;
        Ok(SurfaceGraph { solid: solid.clone(), window, squares, vertices, edges, legs, colors, leg_of })
    }

    /// Builds with the solid's default window.
    pub fn build_default(solid: &SteppedSolid, margin: i32) -> Result<Self> {
        SurfaceGraph::build(solid, solid.default_window(margin)?)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// The two faces on either side of an edge.
    pub fn edge_faces(&self, e: usize) -> [HalfLatticePoint; 2] {
        match &self.edges[e].kind {
            EdgeKind::Quad { square, corner } => [self.squares[*square].label(), HalfLatticePoint::vertex(*corner)],
            EdgeKind::Dual { side } => [HalfLatticePoint::vertex(side.0), HalfLatticePoint::vertex(side.1)],
        }
    }

    pub fn leg_faces(&self, l: usize) -> [HalfLatticePoint; 2] {
        let s = self.legs[l].side;
        [HalfLatticePoint::vertex(s.0), HalfLatticePoint::vertex(s.1)]
    }

    /// Multiplicity of the edge in the reference configuration: dual edges are
    /// single, and a quad edge is single exactly at a mid corner.
    pub fn ref_mult(&self, e: usize) -> u8 {
        match &self.edges[e].kind {
            EdgeKind::Dual { .. } => 1,
            EdgeKind::Quad { square, corner } => self.squares[*square].is_mid_corner(*corner) as u8,
        }
    }

    /// Whether every edge of the face with this label lies in the window.
    pub fn face_complete(&self, label: &HalfLatticePoint) -> bool {
        match label.as_vertex() {
            Some(p) => {
                let sq = self.solid.squares_at(p);
                !sq.is_empty() && sq.iter().all(|&(v, a)| Square::new(v, a).corners.iter().all(|&c| self.window.contains(c)))
            }
            None => {
                let (v, a) = label.face_base().unwrap();
                self.solid.is_surface_square(v, a) && Square::new(v, a).corners.iter().all(|&c| self.window.contains(c))
            }
        }
    }

    /// Face length `L(f)` of a complete face.
    pub fn face_length(&self, label: &HalfLatticePoint) -> usize {
        match label.as_vertex() {
            Some(p) => 2 * self.solid.squares_at(p).len(),
            None => 4,
        }
    }

    /// Exponent of `f` in the reference configuration: `k - 2 - mid(p)` at a
    /// surface vertex met by `k` squares, `mid(p)` of them at a mid corner.
    pub fn ref_exponent(&self, label: &HalfLatticePoint) -> i32 {
        match label.as_vertex() {
            Some(p) => {
                let sq = self.solid.squares_at(p);
                let mid = sq.iter().filter(|&&(v, a)| Square::new(v, a).is_mid_corner(p)).count();
                sq.len() as i32 - 2 - mid as i32
            }
            None => 0,
        }
    }

    /// Number of reference dimers along a face (`d(m_ref; f)`), counting legs.
    pub fn ref_dimers(&self, label: &HalfLatticePoint) -> i32 {
        let l = self.face_length(label) as i32;
        l - 2 - self.ref_exponent(label)
    }

    /// Every face label touched by an edge or leg, complete or not.
    pub fn face_labels(&self) -> Vec<HalfLatticePoint> {
        let mut out: Vec<HalfLatticePoint> = (0..self.edges.len())
            .flat_map(|e| self.edge_faces(e))
            .chain((0..self.legs.len()).flat_map(|l| self.leg_faces(l)))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    fn vertex_point(&self, v: usize) -> [f64; 3] {
        let (si, t) = self.vertices[v];
        let s = &self.squares[si];
        let c: Vec<[f64; 3]> = s.corners.iter().map(|&p| f3(p)).collect();
        let centre = [0, 1, 2].map(|i| c.iter().map(|p| p[i]).sum::<f64>() / 4.0);
        let a = c[t];
        let b = c[(t + 1) % 4];
        let mid = [0, 1, 2].map(|i| (a[i] + b[i]) / 2.0);
        [0, 1, 2].map(|i| centre[i] + 0.7 * (mid[i] - centre[i]))
    }

    /// Planar position of a vertex.
    pub fn position(&self, v: usize) -> [f64; 2] {
        project(self.vertex_point(v))
    }

    /// Position of the midpoint of an edge, used for the sweep order.
    pub fn edge_position(&self, e: usize) -> [f64; 2] {
        let [a, b] = self.edges[e].ends;
        let pa = self.position(a);
        let pb = self.position(b);
        [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0]
    }

    /// Edges sorted along a sweep line so every vertex is active for a short interval.
    pub fn sweep_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        let key = |e: usize| {
            let p = self.edge_position(e);
            (p[1], p[0])
        };
        order.sort_by(|&a, &b| key(a).partial_cmp(&key(b)).unwrap().then(a.cmp(&b)));
        order
    }

    /// The embedded graph with labels on every complete face.
    pub fn to_planar(&self) -> Result<PlanarBipartiteGraph> {
        let mut g = PlanarBipartiteGraph::new();
        for v in 0..self.vertices.len() {
            g.add_vertex(self.colors[v], self.position(v));
        }
        let mut edge_ids = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            edge_ids.push(g.add_edge(e.ends[0], Some(e.ends[1])));
        }
        for leg in &self.legs {
            let p = self.position(leg.vertex);
            let (si, _) = self.vertices[leg.vertex];
            let s = &self.squares[si];
            let centre = project([0, 1, 2].map(|i| s.corners.iter().map(|c| c[i] as f64).sum::<f64>() / 4.0));
            let dir = [p[0] - centre[0], p[1] - centre[1]];
            g.add_leg(leg.vertex, dir);
        }
        g.sort_rotations_by_geometry();
        // anchor labels: each edge's darts see the two faces of `edge_faces`
        let faces = g.faces();
        let mut seen: HashMap<HalfLatticePoint, usize> = HashMap::new();
        for (fi, f) in faces.iter().enumerate() {
            let mut cand: Option<HalfLatticePoint> = None;
            let mut counts: HashMap<HalfLatticePoint, usize> = HashMap::new();
            for d in &f.darts {
                if d.edge < self.edges.len() {
                    for l in self.edge_faces(d.edge) {
                        *counts.entry(l).or_default() += 1;
                    }
                }
            }
            // the face's own label is common to all of its non-leg edges
            let n = f.darts.iter().filter(|d| d.edge < self.edges.len()).count();
            for (l, c) in counts {
                if c == n && n > 0 {
                    cand = Some(l);
                }
            }
            if let Some(l) = cand {
                if self.face_complete(&l) && f.darts.len() == self.face_length(&l) {
                    if seen.insert(l, fi).is_some() {
                        return Err(Error::Inconsistent(format!("label {l} on two faces")));
                    }
                    g.set_label(f.darts[0], l);
                }
            }
        }
        let _ = edge_ids;
        Ok(g)
    }
}

fn two_colour(n: usize, edges: &[SEdge]) -> Result<Vec<Color>> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.ends[0]].push(e.ends[1]);
        adj[e.ends[1]].push(e.ends[0]);
    }
    let mut col: Vec<Option<Color>> = vec![None; n];
    for s in 0..n {
        if col[s].is_some() {
            continue;
        }
        // anchor: the vertex on side 0 of a square is white in its component
        col[s] = Some(Color::White);
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            let cu = col[u].unwrap();
            for &w in &adj[u] {
                match col[w] {
                    None => {
                        col[w] = Some(cu.other());
                        q.push_back(w);
                    }
                    Some(cw) if cw == cu => return Err(Error::Inconsistent("associated graph is not bipartite".into())),
                    _ => {}
                }
            }
        }
    }
    Ok(col.into_iter().map(|c| c.unwrap()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::SteppedSolid;
    use std::collections::BTreeMap;

    fn face_sizes(g: &SurfaceGraph) -> BTreeMap<HalfLatticePoint, usize> {
        let p = g.to_planar().unwrap();
        p.faces().into_iter().filter_map(|f| f.label.map(|l| (l, f.darts.len()))).collect()
    }

    #[test]
    fn corner_graph_has_a_hexagon_at_the_apex() {
        let g = SurfaceGraph::build_default(&SteppedSolid::corner(), 3).unwrap();
        let sizes = face_sizes(&g);
        assert_eq!(sizes[&HalfLatticePoint::vertex([0, 0, 0])], 6);
        assert_eq!(sizes[&HalfLatticePoint::vertex([-1, 0, 0])], 8);
        assert_eq!(sizes[&HalfLatticePoint::vertex([-1, -1, 0])], 8);
        assert!(sizes.values().all(|&s| s == 4 || s == 6 || s == 8));
        assert_eq!(sizes.values().filter(|&&s| s == 6).count(), 1);
    }

    #[test]
    fn slab_is_the_4_6_12_graph() {
        let slab = SteppedSolid::slab(2);
        let g = SurfaceGraph::build(&slab, Window::cube(-6, 6)).unwrap();
        let sizes = face_sizes(&g);
        assert!(sizes.values().all(|&s| s == 4 || s == 6 || s == 12));
        // one translation cell: three quads, two hexagons, one dodecagon
        let mut cells = 0;
        for a in -2..=2 {
            for b in -2..=2 {
                let t = [a, b - a, -b];
                let reps = [
                    (HalfLatticePoint::vertex(t), 6),
                    (HalfLatticePoint::vertex(add(t, [1, 0, 0])), 12),
                    (HalfLatticePoint::vertex(add(t, [1, 1, 0])), 6),
                    (HalfLatticePoint::face(t, Axis::X), 4),
                    (HalfLatticePoint::face(t, Axis::Y), 4),
                    (HalfLatticePoint::face(t, Axis::Z), 4),
                ];
                for (l, s) in reps {
                    assert_eq!(sizes.get(&l), Some(&s), "{l}");
                }
                cells += 1;
            }
        }
        assert_eq!(cells, 25);
    }

    #[test]
    fn one_cube_removed_changes_faces_locally() {
        let g0 = SurfaceGraph::build(&SteppedSolid::corner(), Window { lo: [-4; 3], hi: [0; 3] }).unwrap();
        let g1 = SurfaceGraph::build(&SteppedSolid::u_minus(1), Window { lo: [-4; 3], hi: [0; 3] }).unwrap();
        let s0 = face_sizes(&g0);
        let s1 = face_sizes(&g1);
        assert!(!s1.contains_key(&HalfLatticePoint::vertex([0, 0, 0])));
        assert_eq!(s1[&HalfLatticePoint::vertex([-1, -1, -1])], 6);
        let count = |m: &BTreeMap<HalfLatticePoint, usize>, k: usize| m.values().filter(|&&s| s == k).count();
        // three quads move, the apex hexagon is replaced, the three
        // axis-adjacent octagons become hexagons and the three
        // corners opposite them gain a fifth square
        assert_eq!(count(&s1, 4), count(&s0, 4));
        assert_eq!(count(&s1, 6), 4);
        assert_eq!(count(&s0, 6), 1);
        assert_eq!(s1[&HalfLatticePoint::vertex([-1, 0, 0])], 6);
        assert_eq!(s1[&HalfLatticePoint::vertex([0, -1, -1])], 10);
        assert_eq!(count(&s1, 10), 3);
    }

    #[test]
    fn reference_exponents() {
        let g = SurfaceGraph::build_default(&SteppedSolid::corner(), 3).unwrap();
        assert_eq!(g.ref_exponent(&HalfLatticePoint::vertex([0, 0, 0])), 1);
        assert_eq!(g.ref_exponent(&HalfLatticePoint::vertex([-1, 0, 0])), 0);
        assert_eq!(g.ref_exponent(&HalfLatticePoint::vertex([-2, -1, 0])), 0);
        assert_eq!(g.ref_dimers(&HalfLatticePoint::vertex([0, 0, 0])), 3);
        assert_eq!(g.ref_dimers(&HalfLatticePoint::vertex([-1, -2, 0])), 6);
    }

    #[test]
    fn window_must_have_margin() {
        let u = SteppedSolid::u_minus(1);
        assert!(matches!(SurfaceGraph::build(&u, Window { lo: [-2; 3], hi: [0; 3] }), Err(Error::WindowTooSmall { .. })));
    }
}
