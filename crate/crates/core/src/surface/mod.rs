//! Stepped solids, their associated graphs and the local rewrites on them.
//!
//! A stepped solid is a downward-closed union of unit cubes, given here as a
//! base (the negative orthant or a slab `x + y + z <= top`) together with the
//! finitely many cubes removed from or added to it. Cubes are keyed by their
//! minimal corner.

mod gamma;
mod planar;
mod renewal;

pub use gamma::{EdgeKind, Leg, SEdge, Square, SurfaceGraph};
pub use planar::{Color, Dart, FaceInfo, GEdge, GVertex, PlanarBipartiteGraph};
pub use renewal::{
    cross_ratio_x, gauge, perfect_matching_sum, superurban_formulas, superurban_renewal, urban_renewal, weights_from_a,
    FaceWeightMap, SuperurbanResult,
};

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::lattice::{Axis, HalfLatticePoint};

pub type Cube = [i32; 3];

fn add(a: Cube, b: Cube) -> Cube {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: Cube, b: Cube) -> Cube {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn level(c: Cube) -> i32 {
    c[0] + c[1] + c[2]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Base {
    /// Cubes with every min-corner coordinate `<= -1`.
    Corner,
    /// Cubes lying in `x + y + z <= top`, i.e. min-corner level `<= top - 3`.
    Slab { top: i32 },
}

/// Axis-aligned box of lattice points, inclusive on both ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub lo: [i32; 3],
    pub hi: [i32; 3],
}

impl Window {
    pub fn contains(&self, p: Cube) -> bool {
        (0..3).all(|i| self.lo[i] <= p[i] && p[i] <= self.hi[i])
    }

    pub fn cube(lo: i32, hi: i32) -> Self {
        Window { lo: [lo; 3], hi: [hi; 3] }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SteppedSolid {
    pub base: Base,
    pub removed: BTreeSet<Cube>,
    pub added: BTreeSet<Cube>,
}

impl SteppedSolid {
    pub fn corner() -> Self {
        SteppedSolid { base: Base::Corner, removed: BTreeSet::new(), added: BTreeSet::new() }
    }

    pub fn slab(top: i32) -> Self {
        SteppedSolid { base: Base::Slab { top }, removed: BTreeSet::new(), added: BTreeSet::new() }
    }

    /// The orthant with the given cubes removed; they must form an up-set.
    pub fn corner_without(removed: impl IntoIterator<Item = Cube>) -> Result<Self> {
        let s = SteppedSolid { base: Base::Corner, removed: removed.into_iter().collect(), added: BTreeSet::new() };
        s.validate()?;
        Ok(s)
    }

    /// Cubes of the orthant lying in `x + y + z <= -n`.
    pub fn u_minus(n: i32) -> Self {
        let mut removed = BTreeSet::new();
        if n > 0 {
            let lim = n + 2;
            for i in -lim..=-1 {
                for j in -lim..=-1 {
                    for k in -lim..=-1 {
                        if i + j + k >= -n - 2 {
                            removed.insert([i, j, k]);
                        }
                    }
                }
            }
        }
        SteppedSolid { base: Base::Corner, removed, added: BTreeSet::new() }
    }

    /// The orthant with its first `n` cubes removed, taken in order of
    /// decreasing level and then lexicographically. Every prefix is an up-set,
    /// so `first_cubes(4)` is `u_minus(2)` and `first_cubes(10)` is `u_minus(3)`.
    pub fn first_cubes(n: usize) -> Self {
        let mut order: Vec<Cube> = Vec::new();
        let mut depth = 0;
        while order.len() < n {
            depth += 1;
            order = SteppedSolid::u_minus(depth).removed.into_iter().collect();
        }
        order.sort_by_key(|c| (-level(*c), *c));
        order.truncate(n);
        SteppedSolid { base: Base::Corner, removed: order.into_iter().collect(), added: BTreeSet::new() }
    }

    fn in_base(&self, c: Cube) -> bool {
        match self.base {
            Base::Corner => c.iter().all(|&x| x <= -1),
            Base::Slab { top } => level(c) + 3 <= top,
        }
    }

    pub fn contains(&self, c: Cube) -> bool {
        (self.in_base(c) && !self.removed.contains(&c)) || self.added.contains(&c)
    }

    /// Checks downward closure around every modified cube.
    pub fn validate(&self) -> Result<()> {
        for &c in &self.removed {
            if !self.in_base(c) {
                return Err(Error::Domain(format!("removed cube {c:?} is not in the base solid")));
            }
            for a in Axis::ALL {
                if self.contains(add(c, a.unit())) {
                    return Err(Error::Domain(format!("cube {:?} sits above removed cube {c:?}", add(c, a.unit()))));
                }
            }
        }
        for &c in &self.added {
            if self.in_base(c) {
                return Err(Error::Domain(format!("added cube {c:?} is already in the base solid")));
            }
            for a in Axis::ALL {
                if !self.contains(sub(c, a.unit())) {
                    return Err(Error::Domain(format!("added cube {c:?} lacks support below")));
                }
            }
        }
        Ok(())
    }

    /// A cube can be added at `p` when its three lower neighbours are present.
    pub fn can_add(&self, p: Cube) -> bool {
        !self.contains(p) && Axis::ALL.iter().all(|a| self.contains(sub(p, a.unit())))
    }

    pub fn can_remove(&self, c: Cube) -> bool {
        self.contains(c) && Axis::ALL.iter().all(|a| !self.contains(add(c, a.unit())))
    }

    pub fn with_cube(&self, p: Cube) -> Result<Self> {
        if !self.can_add(p) {
            return Err(Error::Inapplicable(format!("{} is not a local minimum of the surface", HalfLatticePoint::vertex(p))));
        }
        let mut s = self.clone();
        if !s.removed.remove(&p) {
            s.added.insert(p);
        }
        Ok(s)
    }

    pub fn without_cube(&self, c: Cube) -> Result<Self> {
        if !self.can_remove(c) {
            return Err(Error::Inapplicable(format!("cube {c:?} is not maximal")));
        }
        let mut s = self.clone();
        if !s.added.remove(&c) {
            s.removed.insert(c);
        }
        Ok(s)
    }

    /// Whether the square perpendicular to `axis` with minimal corner `v` lies on the surface.
    pub fn is_surface_square(&self, v: Cube, axis: Axis) -> bool {
        self.contains(sub(v, axis.unit())) && !self.contains(v)
    }

    /// Surface squares containing the lattice point `p`.
    pub fn squares_at(&self, p: Cube) -> Vec<(Cube, Axis)> {
        let mut out = Vec::new();
        for a in Axis::ALL {
            let (b, c) = a.others();
            for db in 0..2 {
                for dc in 0..2 {
                    let mut v = p;
                    v[b.index()] -= db;
                    v[c.index()] -= dc;
                    if self.is_surface_square(v, a) {
                        out.push((v, a));
                    }
                }
            }
        }
        out
    }

    pub fn is_surface_vertex(&self, p: Cube) -> bool {
        !self.squares_at(p).is_empty()
    }

    /// Default window: the bounding box of the modified cubes and the apex,
    /// widened by `margin` cells below.
    pub fn default_window(&self, margin: i32) -> Result<Window> {
        match self.base {
            Base::Corner => {
                let mut lo = [-1; 3];
                let mut hi = [0; 3];
                for c in self.removed.iter().chain(&self.added) {
                    for i in 0..3 {
                        lo[i] = lo[i].min(c[i]);
                        hi[i] = hi[i].max(c[i] + 1);
                    }
                }
                Ok(Window { lo: lo.map(|x| x - margin), hi })
            }
            Base::Slab { .. } => Err(Error::Domain("slab solids need an explicit window".into())),
        }
    }

    /// Labels of surface points lying in the union of the removed cubes.
    pub fn initial_labels(&self, window: &Window) -> BTreeSet<HalfLatticePoint> {
        let mut out = BTreeSet::new();
        for &c in &self.removed {
            for dx in 0..2 {
                for dy in 0..2 {
                    for dz in 0..2 {
                        let p = add(c, [dx, dy, dz]);
                        if window.contains(p) && self.is_surface_vertex(p) {
                            out.insert(HalfLatticePoint::vertex(p));
                        }
                    }
                }
            }
            for a in Axis::ALL {
                for d in 0..2 {
                    let mut v = c;
                    v[a.index()] += d;
                    if self.is_surface_square(v, a) {
                        out.insert(HalfLatticePoint::face(v, a));
                    }
                }
            }
        }
        if self.removed.is_empty() && self.base == Base::Corner {
            out.insert(HalfLatticePoint::vertex([0, 0, 0]));
        }
        out
    }

    /// Every surface label (vertices and square centres) inside the window.
    pub fn surface_labels(&self, window: &Window) -> BTreeSet<HalfLatticePoint> {
        let mut out = BTreeSet::new();
        for i in window.lo[0]..=window.hi[0] {
            for j in window.lo[1]..=window.hi[1] {
                for k in window.lo[2]..=window.hi[2] {
                    let p = [i, j, k];
                    if self.is_surface_vertex(p) {
                        out.insert(HalfLatticePoint::vertex(p));
                    }
                    for a in Axis::ALL {
                        if self.is_surface_square(p, a) {
                            out.insert(HalfLatticePoint::face(p, a));
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u_minus_sizes() {
        assert_eq!(SteppedSolid::u_minus(0).removed.len(), 0);
        assert_eq!(SteppedSolid::u_minus(1).removed.len(), 1);
        assert_eq!(SteppedSolid::u_minus(2).removed.len(), 4);
        assert_eq!(SteppedSolid::u_minus(3).removed.len(), 10);
        for n in 0..=12 {
            let s = SteppedSolid::first_cubes(n);
            assert_eq!(s.removed.len(), n);
            s.validate().unwrap();
        }
        assert_eq!(SteppedSolid::first_cubes(4), SteppedSolid::u_minus(2));
        assert_eq!(SteppedSolid::first_cubes(10), SteppedSolid::u_minus(3));
        assert_eq!(SteppedSolid::first_cubes(2).removed, BTreeSet::from([[-1, -1, -1], [-2, -1, -1]]));
        for n in 0..4 {
            SteppedSolid::u_minus(n).validate().unwrap();
        }
    }

    #[test]
    fn validation_rejects_holes() {
        assert!(SteppedSolid::corner_without([[-2, -1, -1]]).is_err());
        assert!(SteppedSolid::corner_without([[-1, -1, -1], [-2, -1, -1]]).is_ok());
    }

    #[test]
    fn local_minimum_is_a_three_square_vertex() {
        let u = SteppedSolid::u_minus(1);
        assert!(u.can_add([-1, -1, -1]));
        assert_eq!(u.squares_at([-1, -1, -1]).len(), 3);
        assert_eq!(SteppedSolid::corner().squares_at([0, 0, 0]).len(), 3);
        assert_eq!(SteppedSolid::corner().squares_at([-1, 0, 0]).len(), 4);
        let back = u.with_cube([-1, -1, -1]).unwrap();
        assert_eq!(back, SteppedSolid::corner());
        assert!(back.with_cube([-1, -1, -1]).is_err());
    }

    #[test]
    fn initial_labels_of_one_cube() {
        let u = SteppedSolid::u_minus(1);
        let w = u.default_window(2).unwrap();
        let labels = u.initial_labels(&w);
        // seven corners of the cube plus its three lower faces
        assert_eq!(labels.len(), 10);
        assert!(labels.contains(&HalfLatticePoint::vertex([-1, -1, -1])));
        assert!(!labels.contains(&HalfLatticePoint::vertex([0, 0, 0])));
    }
}
