//! Urban renewal on planar graphs and superurban renewal on stepped surfaces.
//!
//! Face weights `A_f` induce edge weights `1 / (A_f A_g)` over the two faces
//! beside an edge. Urban renewal of a quadrilateral face changes its weight by
//! the octahedron rule and rescales the partition function by a known monomial.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::gamma::SurfaceGraph;
use super::planar::{Dart, PlanarBipartiteGraph};
use super::{Cube, SteppedSolid, Window};
use crate::error::{Error, Result};
use crate::lattice::HalfLatticePoint;
use crate::recurrence::{cube_input_points, cube_output_points, hexahedron_step, FieldValue, HexInput};

pub type FaceWeightMap = HashMap<HalfLatticePoint, BigRational>;

fn face_value(a: &FaceWeightMap, l: Option<HalfLatticePoint>) -> BigRational {
    l.and_then(|l| a.get(&l).cloned()).unwrap_or_else(BigRational::one)
}

/// Edge weights `1 / (A_f A_g)`; unlabelled faces count as weight one.
pub fn weights_from_a(g: &PlanarBipartiteGraph, a: &FaceWeightMap) -> HashMap<usize, BigRational> {
    let faces = g.faces();
    let idx = g.face_index(&faces);
    g.live_edges()
        .filter(|&e| !g.is_leg(e))
        .map(|e| {
            let [l, r] = g.edge_face_labels(e, &faces, &idx);
            (e, (face_value(a, l) * face_value(a, r)).recip())
        })
        .collect()
}

/// Alternating product of edge weights around a face, invariant under gauge moves.
pub fn cross_ratio_x(g: &PlanarBipartiteGraph, w: &HashMap<usize, BigRational>, face: &[Dart]) -> Result<BigRational> {
    if face.len() % 2 == 1 || face.iter().any(|d| g.is_leg(d.edge)) {
        return Err(Error::Domain("cross ratio needs an even face without legs".into()));
    }
    let mut x = BigRational::one();
    for (i, d) in face.iter().enumerate() {
        let we = &w[&d.edge];
        x = if i % 2 == 0 { x * we } else { x / we };
    }
    Ok(x)
}

/// Multiplies every edge weight at `v` by `lambda`.
pub fn gauge(g: &PlanarBipartiteGraph, w: &mut HashMap<usize, BigRational>, v: usize, lambda: &BigRational) {
    for e in &g.rot[v] {
        if let Some(x) = w.get_mut(e) {
            *x = &*x * lambda;
        }
    }
}

/// Weighted sum over perfect matchings by exhaustive search; legs never carry dimers.
pub fn perfect_matching_sum(g: &PlanarBipartiteGraph, w: &HashMap<usize, BigRational>) -> BigRational {
    let verts: Vec<usize> = g.live_vertices().collect();
    let mut pos = HashMap::new();
    for (i, &v) in verts.iter().enumerate() {
        pos.insert(v, i);
    }
    let mut used = vec![false; verts.len()];
    fn go(g: &PlanarBipartiteGraph, w: &HashMap<usize, BigRational>, verts: &[usize], pos: &HashMap<usize, usize>, used: &mut [bool]) -> BigRational {
        let Some(i) = used.iter().position(|u| !u) else {
            return BigRational::one();
        };
        let v = verts[i];
        used[i] = true;
        let mut total = BigRational::zero();
        for &e in &g.rot[v] {
            let Some(u) = g.opposite(e, v) else { continue };
            let j = pos[&u];
            if used[j] {
                continue;
            }
            used[j] = true;
            let rest = go(g, w, verts, pos, used);
            if !Zero::is_zero(&rest) {
                total += &w[&e] * rest;
            }
            used[j] = false;
        }
        used[i] = false;
        total
    }
    go(g, w, &verts, &pos, &mut used)
}

/// Urban renewal of the quadrilateral face labelled `label`.
///
/// The face's four edges are replaced by a smaller square joined to the old
/// corners, and `A` at the label becomes `(A_1 A_3 + A_2 A_4) / A`, where the
/// `A_i` are the faces across the old edges in cyclic order. Returns the new
/// vertices, `w[i]` attached to the `i`-th corner.
pub fn urban_renewal(g: &mut PlanarBipartiteGraph, a: &mut FaceWeightMap, label: HalfLatticePoint) -> Result<[usize; 4]> {
    let faces = g.faces();
    let idx = g.face_index(&faces);
    let face = faces.iter().find(|f| f.label == Some(label)).ok_or(Error::MissingPoint(label))?;
    if face.darts.len() != 4 || face.has_leg {
        return Err(Error::Inapplicable(format!("face {label} is not a quadrilateral")));
    }
    let d = face.darts.clone();
    let vs: Vec<usize> = d.iter().map(|&x| g.tail(x).unwrap()).collect();
    let mut uniq = vs.clone();
    uniq.sort();
    uniq.dedup();
    if uniq.len() != 4 {
        return Err(Error::Inapplicable(format!("face {label} has a repeated vertex")));
    }
    let across: Vec<BigRational> = d.iter().map(|x| face_value(a, faces[idx[&x.twin()]].label)).collect();
    let a0 = a.get(&label).cloned().ok_or(Error::Unassigned(label.to_string()))?;
    if Zero::is_zero(&a0) {
        return Err(Error::ZeroDivisor);
    }
    let new_a = (&across[0] * &across[2] + &across[1] * &across[3]) / &a0;

    let mut snap = g.snapshot_labels();
    snap.retain(|(_, l)| *l != label);
    let centre = {
        let ps: Vec<[f64; 2]> = vs.iter().map(|&v| g.vertex(v).pos).collect();
        [ps.iter().map(|p| p[0]).sum::<f64>() / 4.0, ps.iter().map(|p| p[1]).sum::<f64>() / 4.0]
    };
    let mut ws = [0usize; 4];
    for i in 0..4 {
        let p = g.vertex(vs[i]).pos;
        let q = [p[0] + 0.4 * (centre[0] - p[0]), p[1] + 0.4 * (centre[1] - p[1])];
        ws[i] = g.add_vertex(g.vertex(vs[i]).color.other(), q);
    }
    // legs v_i - w_i take the slot of the two removed face edges at v_i
    let mut legs = [0usize; 4];
    for i in 0..4 {
        let e_out = d[i].edge;
        let e_in = d[(i + 3) % 4].edge;
        let id = g.edges.len();
        g.edges.push(Some(super::planar::GEdge { a: vs[i], b: Some(ws[i]), leg_dir: None }));
        let r = &mut g.rot[vs[i]];
        let k = r.iter().position(|&e| e == e_out).unwrap();
        r[k] = id;
        r.retain(|&e| e != e_in);
        legs[i] = id;
    }
    for x in &d {
        g.edges[x.edge] = None;
    }
    let mut inner = [0usize; 4];
    for i in 0..4 {
        let id = g.edges.len();
        g.edges.push(Some(super::planar::GEdge { a: ws[i], b: Some(ws[(i + 1) % 4]), leg_dir: None }));
        inner[i] = id;
    }
    for j in 0..4 {
        g.rot[ws[j]] = vec![inner[j], inner[(j + 3) % 4], legs[j]];
    }
    g.restore_labels(snap, &[]);
    g.set_label(Dart { edge: inner[0], rev: false }, label);
    a.insert(label, new_a);
    Ok(ws)
}

/// The four new values of a superurban move, in the order `(a1*, a2*, a3*, a0*)`.
///
/// Inputs are `a0` at the local minimum, `a1..a3` on its three squares,
/// `a4..a6` at the adjacent corners and `a7..a9` at the far corners, each far
/// corner listed opposite the matching adjacent one.
pub fn superurban_formulas<T: FieldValue>(a: &[T; 10]) -> Result<[T; 4]> {
    let i = HexInput {
        h: a[0].clone(),
        hx: a[1].clone(),
        hy: a[2].clone(),
        hz: a[3].clone(),
        h1: a[4].clone(),
        h2: a[5].clone(),
        h3: a[6].clone(),
        h23: a[7].clone(),
        h13: a[8].clone(),
        h12: a[9].clone(),
    };
    let o = hexahedron_step(&i)?;
    Ok([o.hx1, o.hy2, o.hz3, o.h123])
}

#[derive(Clone, Debug)]
pub struct SuperurbanResult<T> {
    pub solid: SteppedSolid,
    pub graph: SurfaceGraph,
    pub values: BTreeMap<HalfLatticePoint, T>,
    /// Labels that left the surface.
    pub removed: Vec<HalfLatticePoint>,
    /// Labels created by the move.
    pub added: [HalfLatticePoint; 4],
}

/// Adds the cube at the local minimum `p` and updates the face values.
pub fn superurban_renewal<T: FieldValue>(solid: &SteppedSolid, window: Window, p: Cube, values: &BTreeMap<HalfLatticePoint, T>) -> Result<SuperurbanResult<T>> {
    let next = solid.with_cube(p)?;
    let pts = cube_input_points(p);
    let get = |l: &HalfLatticePoint| values.get(l).cloned().ok_or(Error::MissingPoint(*l));
    // HexInput order: h, h1, h2, h3, h12, h13, h23, hx, hy, hz
    let args = [get(&pts[0])?, get(&pts[7])?, get(&pts[8])?, get(&pts[9])?, get(&pts[1])?, get(&pts[2])?, get(&pts[3])?, get(&pts[6])?, get(&pts[5])?, get(&pts[4])?];
    let [x1, x2, x3, x0] = superurban_formulas(&args)?;
    let graph = SurfaceGraph::build(&next, window)?;
    let out = cube_output_points(p);
    let removed = vec![pts[0], pts[7], pts[8], pts[9]];
    let mut vals = values.clone();
    for l in &removed {
        vals.remove(l);
    }
    vals.insert(out[0], x0);
    vals.insert(out[1], x1);
    vals.insert(out[2], x2);
    vals.insert(out[3], x3);
    Ok(SuperurbanResult { solid: next, graph, values: vals, removed, added: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::{int, rational};
    use proptest::prelude::*;

    fn labelled_grid(w: usize, h: usize) -> (PlanarBipartiteGraph, FaceWeightMap, Vec<HalfLatticePoint>) {
        let mut g = PlanarBipartiteGraph::grid(w, h);
        g.label_all_faces();
        let labels: Vec<_> = g.faces().into_iter().filter_map(|f| f.label).collect();
        let a = labels.iter().enumerate().map(|(i, l)| (*l, int(i as i64 + 2))).collect();
        (g, a, labels)
    }

    fn quad_labels(g: &PlanarBipartiteGraph) -> Vec<HalfLatticePoint> {
        g.faces().into_iter().filter(|f| f.darts.len() == 4 && !f.has_leg).filter_map(|f| f.label).collect()
    }

    #[test]
    fn renewal_rescales_partition_function() {
        let (mut g, mut a, _) = labelled_grid(4, 4);
        for l in quad_labels(&g) {
            let before = perfect_matching_sum(&g, &weights_from_a(&g, &a));
            let faces = g.faces();
            let idx = g.face_index(&faces);
            let f = faces.iter().find(|f| f.label == Some(l)).unwrap();
            let p: BigRational = f.darts.iter().map(|d| face_value(&a, faces[idx[&d.twin()]].label)).product();
            let a0 = a[&l].clone();
            let mut g2 = g.clone();
            let mut a2 = a.clone();
            urban_renewal(&mut g2, &mut a2, l).unwrap();
            g2.validate().unwrap();
            let after = perfect_matching_sum(&g2, &weights_from_a(&g2, &a2));
            assert_eq!(before * &a0, &a2[&l] * p * after, "face {l}");
        }
        // a second renewal elsewhere on an already renewed graph
        let l = quad_labels(&g)[0];
        urban_renewal(&mut g, &mut a, l).unwrap();
        assert_eq!(g.find_face(&l).unwrap().darts.len(), 4);
        g.validate().unwrap();
    }

    #[test]
    fn double_renewal_is_the_identity() {
        let (g0, a0, _) = labelled_grid(4, 3);
        let sizes = |g: &PlanarBipartiteGraph| {
            let mut v: Vec<(HalfLatticePoint, usize)> = g.faces().into_iter().filter_map(|f| f.label.map(|l| (l, f.darts.len()))).collect();
            v.sort();
            v
        };
        for l in quad_labels(&g0) {
            let mut g = g0.clone();
            let mut a = a0.clone();
            let w = urban_renewal(&mut g, &mut a, l).unwrap();
            urban_renewal(&mut g, &mut a, l).unwrap();
            for v in w {
                g.contract_degree_two(v).unwrap();
            }
            g.validate().unwrap();
            assert_eq!(sizes(&g), sizes(&g0));
            assert_eq!(a, a0);
            assert_eq!(g.live_vertices().count(), g0.live_vertices().count());
        }
    }

    #[test]
    fn renewal_rejects_non_quadrilaterals() {
        let mut g = PlanarBipartiteGraph::grid(3, 3);
        g.label_all_faces();
        let outer = g.faces().into_iter().find(|f| f.darts.len() == 8).unwrap().label.unwrap();
        let mut a = FaceWeightMap::new();
        a.insert(outer, int(1));
        assert!(matches!(urban_renewal(&mut g, &mut a, outer), Err(Error::Inapplicable(_))));
    }

    #[test]
    fn superurban_on_unit_data() {
        let u = SteppedSolid::u_minus(1);
        let w = Window { lo: [-4; 3], hi: [0; 3] };
        let g = SurfaceGraph::build(&u, w).unwrap();
        let vals: BTreeMap<HalfLatticePoint, BigRational> = g.face_labels().into_iter().map(|l| (l, int(1))).collect();
        let r = superurban_renewal(&u, w, [-1, -1, -1], &vals).unwrap();
        assert_eq!(r.solid, SteppedSolid::corner());
        assert_eq!(r.values[&HalfLatticePoint::vertex([0, 0, 0])], int(14));
        for l in &r.added[1..] {
            assert_eq!(r.values[l], int(3));
        }
        assert!(!r.values.contains_key(&HalfLatticePoint::vertex([-1, -1, -1])));
        // the new labels are exactly the new surface's labels
        let mut want = r.graph.face_labels();
        want.sort();
        let have: Vec<_> = r.values.keys().copied().filter(|l| want.binary_search(l).is_ok()).collect();
        assert_eq!(have, want);
        assert!(superurban_renewal(&r.solid, w, [-1, -1, -1], &r.values).is_err());
    }

    #[test]
    fn superurban_formulas_match_octahedral_unit_values() {
        let ones = [(); 10].map(|_| int(1));
        let out = superurban_formulas(&ones).unwrap();
        assert_eq!(out, [int(3), int(3), int(3), int(14)]);
    }

    proptest! {
        #[test]
        fn cross_ratio_is_gauge_invariant(lam in 1i64..20, v in 0usize..12) {
            let (g, a, _) = labelled_grid(4, 3);
            let mut w = weights_from_a(&g, &a);
            let faces: Vec<_> = g.faces().into_iter().filter(|f| f.darts.len() == 4).collect();
            let before: Vec<_> = faces.iter().map(|f| cross_ratio_x(&g, &w, &f.darts).unwrap()).collect();
            gauge(&g, &mut w, v, &rational(lam, 3));
            let after: Vec<_> = faces.iter().map(|f| cross_ratio_x(&g, &w, &f.darts).unwrap()).collect();
            prop_assert_eq!(before, after);
        }
    }
}
