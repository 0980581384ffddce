//! The Ising specialization: star-triangle moves, Kashaev's parametrization
//! and its embedding into the hexahedron recurrence.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{Axis, HalfLatticePoint, PointKind};
use crate::laurent::{LaurentPoly, Monomial, VarTable};
use crate::real::Real;
use crate::recurrence::{kashaev_residual, propagate, propagate_point, LatticeField};
use crate::surface::{Cube, SteppedSolid, Window};

/// Edge weights usable in brute-force Ising sums.
pub trait IsingWeight: Clone + Num + PartialOrd + std::fmt::Debug {
    /// Square root, when it exists in the weight type.
    fn try_sqrt(&self) -> Option<Self>;
    /// Equality for exact types, relative closeness otherwise.
    fn close(&self, other: &Self) -> bool;
}

impl IsingWeight for BigRational {
    fn try_sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let (n, d) = (self.numer(), self.denom());
        let (rn, rd) = (n.sqrt(), d.sqrt());
        (&rn * &rn == *n && &rd * &rd == *d).then(|| BigRational::new(rn, rd))
    }
    fn close(&self, other: &Self) -> bool {
        self == other
    }
}

impl IsingWeight for Real {
    fn try_sqrt(&self) -> Option<Self> {
        (!self.is_negative()).then(|| self.sqrt())
    }
    fn close(&self, other: &Self) -> bool {
        if Zero::is_zero(self) && Zero::is_zero(other) {
            return true;
        }
        self.rel_diff(other) < Real::parse("1e-40").unwrap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YDeltaDirection {
    YToDelta,
    DeltaToY,
}

fn positive<T: IsingWeight>(xs: &[&T]) -> Result<()> {
    if xs.iter().any(|x| **x <= T::zero()) {
        return Err(Error::Domain("Ising weights must be positive".into()));
    }
    Ok(())
}

fn root<T: IsingWeight>(x: T) -> Result<T> {
    x.try_sqrt().ok_or_else(|| Error::Domain("square root leaves the weight field".into()))
}

/// Star-triangle transformation of Ising weights.
///
/// `Y -> Delta` maps the star weights `(a, b, c)` to triangle weights `(A, B, C)`,
/// with `A` on the triangle edge opposite the leaf reached by `a`. The inverse
/// has two positive solutions, `(a, b, c)` and `(1/a, 1/b, 1/c)`; the one with
/// `abc >= 1` is returned.
pub fn ydelta_transform<T: IsingWeight>(a: &T, b: &T, c: &T, dir: YDeltaDirection) -> Result<(T, T, T)> {
    positive(&[a, b, c])?;
    match dir {
        YDeltaDirection::YToDelta => {
            let p = a.clone() * b.clone() * c.clone() + T::one();
            let q1 = a.clone() + b.clone() * c.clone();
            let q2 = b.clone() + a.clone() * c.clone();
            let q3 = c.clone() + a.clone() * b.clone();
            let big_a = root(p.clone() * q1.clone() / (q2.clone() * q3.clone()))?;
            let big_b = root(p.clone() * q2.clone() / (q1.clone() * q3.clone()))?;
            let big_c = root(p * q3 / (q1 * q2))?;
            Ok((big_a, big_b, big_c))
        }
        YDeltaDirection::DeltaToY => {
            let abc = a.clone() * b.clone() * c.clone();
            let m0 = abc.clone() + a.clone() + b.clone() + c.clone();
            let m1 = abc.clone() + a.clone() - b.clone() - c.clone();
            let m2 = abc.clone() - a.clone() + b.clone() - c.clone();
            let m3 = abc - a.clone() - b.clone() + c.clone();
            // with alpha = (1 - a')/(1 + a') etc.: beta gamma = m1/m0, alpha gamma = m2/m0, alpha beta = m3/m0
            let (bg, ag, ab) = (m1 / m0.clone(), m2 / m0.clone(), m3 / m0);
            let sq = |num: T, den: &T| -> Result<T> {
                if den.is_zero() {
                    if num.is_zero() {
                        return Ok(T::zero());
                    }
                    return Err(Error::Domain("triangle weights admit no star".into()));
                }
                let x = num / den.clone();
                if x < T::zero() || x >= T::one() {
                    return Err(Error::Domain("triangle weights admit no positive star".into()));
                }
                root(x)
            };
            let (al, be, ga) = if bg.is_zero() && ag.is_zero() && ab.is_zero() {
                (T::zero(), T::zero(), T::zero())
            } else if !bg.is_zero() {
                (sq(ag.clone() * ab.clone(), &bg)?, sq(bg.clone() * ab.clone(), &ag)?, sq(bg.clone() * ag.clone(), &ab)?)
            } else {
                // one of beta, gamma vanishes
                (sq(ag.clone() * ab.clone(), &bg).unwrap_or_else(|_| T::zero()), T::zero(), T::zero())
            };
            let mut best: Option<(T, T, T)> = None;
            for s in 0..8u8 {
                let sgn = |x: &T, bit: u8| if s >> bit & 1 == 1 { T::zero() - x.clone() } else { x.clone() };
                let (x, y, z) = (sgn(&al, 0), sgn(&be, 1), sgn(&ga, 2));
                if !(y.clone() * z.clone()).close(&bg) || !(x.clone() * z.clone()).close(&ag) || !(x.clone() * y.clone()).close(&ab) {
                    continue;
                }
                let w = |t: &T| (T::one() - t.clone()) / (T::one() + t.clone());
                let cand = (w(&x), w(&y), w(&z));
                let better = match &best {
                    None => true,
                    Some(bst) => {
                        let pc = cand.0.clone() * cand.1.clone() * cand.2.clone();
                        let pb = bst.0.clone() * bst.1.clone() * bst.2.clone();
                        pc > pb || (pc.close(&pb) && cand.0 > bst.0)
                    }
                };
                if better {
                    best = Some(cand);
                }
            }
            best.ok_or_else(|| Error::Domain("triangle weights admit no positive star".into()))
        }
    }
}

/// Ising model on a multigraph with positive edge weights.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingNetwork<T> {
    pub n: usize,
    pub edges: Vec<(usize, usize, T)>,
}

/// Where a star-triangle move is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YDeltaSite {
    /// A degree-three vertex.
    Y(usize),
    /// Three pairwise adjacent vertices.
    Delta([usize; 3]),
}

impl<T: IsingWeight> IsingNetwork<T> {
    pub fn new(n: usize, edges: Vec<(usize, usize, T)>) -> Result<Self> {
        for (u, v, w) in &edges {
            if *u >= n || *v >= n || u == v {
                return Err(Error::Domain(format!("bad edge {u}-{v}")));
            }
            positive(&[w])?;
        }
        Ok(IsingNetwork { n, edges })
    }

    /// Unnormalized probability of every spin assignment, indexed by bitmask (bit set = minus).
    pub fn weights(&self) -> Vec<T> {
        (0..1usize << self.n)
            .map(|s| {
                let mut w = T::one();
                for (u, v, c) in &self.edges {
                    if (s >> u & 1) == (s >> v & 1) {
                        w = w * c.clone();
                    }
                }
                w
            })
            .collect()
    }

    /// Unnormalized marginal law of the spins in `keep`.
    pub fn marginal(&self, keep: &[usize]) -> Vec<T> {
        let mut out = vec![T::zero(); 1 << keep.len()];
        for (s, w) in self.weights().into_iter().enumerate() {
            let k = keep.iter().enumerate().fold(0usize, |acc, (i, &v)| acc | ((s >> v & 1) << i));
            out[k] = out[k].clone() + w;
        }
        out
    }

    /// Applies the move at `site`; a new star centre becomes the last vertex,
    /// a removed centre is deleted and later vertices shift down by one.
    pub fn apply_ydelta(&self, site: YDeltaSite) -> Result<IsingNetwork<T>> {
        match site {
            YDeltaSite::Y(c) => {
                let star: Vec<usize> = (0..self.edges.len()).filter(|&i| self.edges[i].0 == c || self.edges[i].1 == c).collect();
                if star.len() != 3 {
                    return Err(Error::Inapplicable(format!("vertex {c} does not have degree three")));
                }
                let leaf = |i: usize| if self.edges[i].0 == c { self.edges[i].1 } else { self.edges[i].0 };
                let l: Vec<usize> = star.iter().map(|&i| leaf(i)).collect();
                if l[0] == l[1] || l[1] == l[2] || l[0] == l[2] {
                    return Err(Error::Inapplicable("star with repeated leaves".into()));
                }
                let (a, b, cc) = (&self.edges[star[0]].2, &self.edges[star[1]].2, &self.edges[star[2]].2);
                let (ta, tb, tc) = ydelta_transform(a, b, cc, YDeltaDirection::YToDelta)?;
                let shift = |v: usize| if v > c { v - 1 } else { v };
                let mut edges: Vec<_> = (0..self.edges.len()).filter(|i| !star.contains(i)).map(|i| (shift(self.edges[i].0), shift(self.edges[i].1), self.edges[i].2.clone())).collect();
                edges.push((shift(l[1]), shift(l[2]), ta));
                edges.push((shift(l[0]), shift(l[2]), tb));
                edges.push((shift(l[0]), shift(l[1]), tc));
                Ok(IsingNetwork { n: self.n - 1, edges })
            }
            YDeltaSite::Delta([u, v, w]) => {
                let find = |x: usize, y: usize| {
                    let hits: Vec<usize> = (0..self.edges.len()).filter(|&i| (self.edges[i].0, self.edges[i].1) == (x, y) || (self.edges[i].0, self.edges[i].1) == (y, x)).collect();
                    match hits.as_slice() {
                        [i] => Ok(*i),
                        _ => Err(Error::Inapplicable(format!("vertices {x} and {y} are not joined by exactly one edge"))),
                    }
                };
                let (ia, ib, ic) = (find(v, w)?, find(u, w)?, find(u, v)?);
                let (a, b, c) = ydelta_transform(&self.edges[ia].2, &self.edges[ib].2, &self.edges[ic].2, YDeltaDirection::DeltaToY)?;
                let mut edges: Vec<_> = (0..self.edges.len()).filter(|i| ![ia, ib, ic].contains(i)).map(|i| self.edges[i].clone()).collect();
                let z = self.n;
                edges.push((z, u, a));
                edges.push((z, v, b));
                edges.push((z, w, c));
                Ok(IsingNetwork { n: self.n + 1, edges })
            }
        }
    }
}

/// Marginal laws on the untouched spins before and after a star-triangle move.
#[derive(Clone, Debug)]
pub struct MeasureReport<T> {
    pub before: Vec<T>,
    pub after: Vec<T>,
    pub equal: bool,
}

/// Brute-force check that the move preserves the law of every spin it keeps.
pub fn ydelta_measure_check<T: IsingWeight>(net: &IsingNetwork<T>, site: YDeltaSite) -> Result<MeasureReport<T>> {
    if net.n > 20 {
        return Err(Error::Domain("brute force is limited to 20 spins".into()));
    }
    let after_net = net.apply_ydelta(site)?;
    let (keep_before, keep_after): (Vec<usize>, Vec<usize>) = match site {
        YDeltaSite::Y(c) => ((0..net.n).filter(|&v| v != c).collect(), (0..net.n - 1).collect()),
        YDeltaSite::Delta(_) => ((0..net.n).collect(), (0..net.n).collect()),
    };
    let before = net.marginal(&keep_before);
    let after = after_net.marginal(&keep_after);
    // proportional laws: before[i] * after[0] == after[i] * before[0]
    let equal = before.len() == after.len() && (0..before.len()).all(|i| (before[i].clone() * after[0].clone()).close(&(after[i].clone() * before[0].clone())));
    Ok(MeasureReport { before, after, equal })
}

/// Kashaev's edge weight: the root `w > 1` of `(w - 1/w)^2 / 4 = b`.
pub fn kashaev_weight(b: &Real) -> Result<Real> {
    if !b.is_positive() {
        return Err(Error::Domain("Kashaev weight needs b > 0".into()));
    }
    Ok(&b.sqrt() + &(b + &Real::one()).sqrt())
}

/// Determinant by Gaussian elimination over the rationals.
pub fn determinant(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &p;
            for k in col..n {
                let t = &f * &a[col][k];
                a[r][k] -= t;
            }
        }
    }
    det
}

fn principal_minor(m: &[Vec<BigRational>], removed: &[usize]) -> BigRational {
    let keep: Vec<usize> = (0..m.len()).filter(|i| !removed.contains(i)).collect();
    let sub: Vec<Vec<BigRational>> = keep.iter().map(|&i| keep.iter().map(|&j| m[i][j].clone()).collect()).collect();
    determinant(&sub)
}

/// The eight values `f_0..f_7` built from principal minors of `m` around `idx`.
pub fn minor_values(m: &[Vec<BigRational>], idx: [usize; 3]) -> Result<[BigRational; 8]> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::Domain("matrix is not square".into()));
    }
    for i in 0..n {
        for j in 0..i {
            if m[i][j] != m[j][i] {
                return Err(Error::Domain("matrix is not symmetric".into()));
            }
        }
    }
    let [i1, i2, i3] = idx;
    if i1 >= n || i2 >= n || i3 >= n || i1 == i2 || i2 == i3 || i1 == i3 {
        return Err(Error::Domain("index triple must be three distinct rows".into()));
    }
    let mm = |s: &[usize]| principal_minor(m, s);
    Ok([mm(&[]), mm(&[i1]), mm(&[i2]), mm(&[i3]), -mm(&[i2, i3]), -mm(&[i1, i3]), -mm(&[i1, i2]), -mm(&[i1, i2, i3])])
}

/// Residual of Kashaev's relation on minors of a symmetric matrix; zero exactly.
pub fn minor_identity_check(m: &[Vec<BigRational>], idx: [usize; 3]) -> Result<BigRational> {
    let [f0, f1, f2, f3, f4, f5, f6, f7] = minor_values(m, idx)?;
    // relation order: f, f1, f2, f3, f12, f13, f23, f123
    Ok(kashaev_residual(&[f0, f1, f2, f3, f6, f5, f4, f7]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn holds(self, p: Cube) -> bool {
        (p[0] + p[1] + p[2]).rem_euclid(2) == if self == Parity::Even { 0 } else { 1 }
    }
}

/// A diagonal of a surface square with endpoints of the chosen parity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UEdge {
    pub ends: [usize; 2],
    pub square: HalfLatticePoint,
    /// The square's other two corners.
    pub across: [Cube; 2],
}

/// The graph on one parity class of surface vertices joined along square diagonals.
#[derive(Clone, Debug)]
pub struct UpsilonGraph {
    pub parity: Parity,
    pub vertices: Vec<Cube>,
    pub edges: Vec<UEdge>,
}

pub fn upsilon_graph(solid: &SteppedSolid, window: &Window, parity: Parity) -> UpsilonGraph {
    let mut index: BTreeMap<Cube, usize> = BTreeMap::new();
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut id = |p: Cube, vertices: &mut Vec<Cube>| {
        *index.entry(p).or_insert_with(|| {
            vertices.push(p);
            vertices.len() - 1
        })
    };
    for i in window.lo[0]..=window.hi[0] {
        for j in window.lo[1]..=window.hi[1] {
            for k in window.lo[2]..=window.hi[2] {
                for a in Axis::ALL {
                    let v = [i, j, k];
                    if !solid.is_surface_square(v, a) {
                        continue;
                    }
                    let (b, c) = a.others();
                    let (eb, ec) = (b.unit(), c.unit());
                    let corners = [v, add(v, eb), add(add(v, eb), ec), add(v, ec)];
                    if !corners.iter().all(|&p| window.contains(p)) {
                        continue;
                    }
                    let (d, o) = if parity.holds(v) { ([corners[0], corners[2]], [corners[1], corners[3]]) } else { ([corners[1], corners[3]], [corners[0], corners[2]]) };
                    let ends = [id(d[0], &mut vertices), id(d[1], &mut vertices)];
                    edges.push(UEdge { ends, square: HalfLatticePoint::face(v, a), across: o });
                }
            }
        }
    }
    UpsilonGraph { parity, vertices, edges }
}

fn add(a: Cube, b: Cube) -> Cube {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

impl UpsilonGraph {
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.ends.contains(&v)).count()
    }

    /// Kashaev weights from vertex values: `b = f(v) f(v') / (f(u) f(u'))`.
    pub fn weights(&self, f: &LatticeField<Real>) -> Result<Vec<Real>> {
        let get = |p: Cube| f.get(&HalfLatticePoint::vertex(p)).cloned().ok_or(Error::MissingPoint(HalfLatticePoint::vertex(p)));
        self.edges
            .iter()
            .map(|e| {
                let b = &(&get(self.vertices[e.ends[0]])? * &get(self.vertices[e.ends[1]])?) / &(&get(e.across[0])? * &get(e.across[1])?);
                kashaev_weight(&b)
            })
            .collect()
    }

    fn edge_set(&self) -> BTreeSet<(Cube, Cube)> {
        self.edges
            .iter()
            .map(|e| {
                let (a, b) = (self.vertices[e.ends[0]], self.vertices[e.ends[1]]);
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect()
    }
}

/// How two graphs differ, if by a single star-triangle move.
pub fn ydelta_difference(before: &UpsilonGraph, after: &UpsilonGraph) -> Option<YDeltaDirection> {
    let (b, a) = (before.edge_set(), after.edge_set());
    let removed: Vec<_> = b.difference(&a).copied().collect();
    let added: Vec<_> = a.difference(&b).copied().collect();
    let is_star = |es: &[(Cube, Cube)]| -> Option<BTreeSet<Cube>> {
        let mut count: BTreeMap<Cube, usize> = BTreeMap::new();
        for (x, y) in es {
            *count.entry(*x).or_default() += 1;
            *count.entry(*y).or_default() += 1;
        }
        let centre = count.iter().find(|(_, &c)| c == 3).map(|(p, _)| *p)?;
        (count.len() == 4).then(|| count.keys().copied().filter(|&p| p != centre).collect())
    };
    let is_triangle = |es: &[(Cube, Cube)]| -> Option<BTreeSet<Cube>> {
        let mut count: BTreeMap<Cube, usize> = BTreeMap::new();
        for (x, y) in es {
            *count.entry(*x).or_default() += 1;
            *count.entry(*y).or_default() += 1;
        }
        (count.len() == 3 && count.values().all(|&c| c == 2)).then(|| count.keys().copied().collect())
    };
    if removed.len() != 3 || added.len() != 3 {
        return None;
    }
    if let (Some(l), Some(t)) = (is_star(&removed), is_triangle(&added)) {
        if l == t {
            return Some(YDeltaDirection::YToDelta);
        }
    }
    if let (Some(t), Some(l)) = (is_triangle(&removed), is_star(&added)) {
        if l == t {
            return Some(YDeltaDirection::DeltaToY);
        }
    }
    None
}

/// Adds face values `sqrt(f(v) f(v+eb+ec) + f(v+eb) f(v+ec))` on every square
/// whose four corners carry values, turning a Kashaev field into hexahedron data.
pub fn embed_hexahedron(f: &LatticeField<Real>) -> Result<LatticeField<Real>> {
    let mut out = LatticeField::new();
    let mut corners_seen = Vec::new();
    for (p, v) in f.iter() {
        if p.kind() != PointKind::Vertex {
            return Err(Error::Domain(format!("Kashaev data lives on vertices, got {p}")));
        }
        if !v.is_positive() {
            return Err(Error::Domain(format!("non-positive value at {p}")));
        }
        out.insert(*p, v.clone());
        corners_seen.push(p.as_vertex().unwrap());
    }
    for v in corners_seen {
        for a in Axis::ALL {
            let (b, c) = a.others();
            let pts = [v, add(v, b.unit()), add(add(v, b.unit()), c.unit()), add(v, c.unit())];
            let vals: Option<Vec<&Real>> = pts.iter().map(|&p| f.get(&HalfLatticePoint::vertex(p))).collect();
            if let Some(x) = vals {
                let sq = &(x[0] * x[2]) + &(x[1] * x[3]);
                if !sq.is_positive() {
                    return Err(Error::Domain("non-positive radicand".into()));
                }
                out.insert(HalfLatticePoint::face(v, a), sq.sqrt());
            }
        }
    }
    Ok(out)
}

/// Largest relative Kashaev residual over the cubes whose eight corners are known.
pub fn kashaev_field_residual(field: &LatticeField<Real>) -> Real {
    let mut worst = Real::zero();
    for (p, _) in field.iter() {
        let Some(v) = p.as_vertex() else { continue };
        let pts = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 0], [1, 0, 1], [0, 1, 1], [1, 1, 1]];
        let vals: Option<Vec<Real>> = pts.iter().map(|d| field.get(&HalfLatticePoint::vertex(add(v, *d))).cloned()).collect();
        let Some(x) = vals else { continue };
        let arr: [Real; 8] = x.try_into().unwrap();
        let scale = &(&arr[0] * &arr[7]) * &(&arr[0] * &arr[7]);
        let r = (kashaev_residual(&arr) / scale).abs();
        if r > worst {
            worst = r;
        }
    }
    worst
}

/// Closed form for spatially isotropic data `f_0 = a, f_1 = b, f_2 = c`.
pub fn ising_isotropic(a: &Real, b: &Real, c: &Real, n: i64) -> Result<Real> {
    positive(&[a, b, c])?;
    if n < 0 {
        return Err(Error::Domain("level must be non-negative".into()));
    }
    let r = &(a * c) / &(b * b);
    let one = Real::one();
    let r1 = &r + &one;
    let s = &(&(&Real::from_i64(2) * &(&r1 * &r1.sqrt())) + &(&Real::from_i64(3) * &r)) + &Real::from_i64(2);
    let s = &s / &(&r * &r);
    Ok(&(&(&a.powi(1 - n) * &b.powi(n)) * &r.powi(n * n / 4)) * &s.powi((n - 1) * (n - 1) / 4))
}

/// Iterates the scalar isotropic recurrence for `f_{n+3}`.
pub fn ising_isotropic_iterate(a: &Real, b: &Real, c: &Real, n: usize) -> Result<Vec<Real>> {
    positive(&[a, b, c])?;
    let mut f = vec![a.clone(), b.clone(), c.clone()];
    let two = Real::from_i64(2);
    let three = Real::from_i64(3);
    while f.len() <= n {
        let k = f.len();
        let (x, y, z) = (&f[k - 3], &f[k - 2], &f[k - 1]);
        let y2 = y * y;
        let y3 = &y2 * y;
        let xz = x * z;
        let rad = &(&(&y3 * &y3) + &(&three * &(&xz * &(&y2 * &y2)))) + &(&(&three * &(&(&xz * &xz) * &y2)) + &(&(&xz * &xz) * &xz));
        let num = &(&(&two * &y3) + &(&three * &(&xz * y))) + &(&two * &rad.sqrt());
        f.push(&num / &(x * x));
    }
    f.truncate(n + 1);
    Ok(f)
}

/// A quadrilateral variable with its four corner variables in cyclic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadFace {
    pub var: u32,
    pub corners: [u32; 4],
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupedTerm {
    pub mono: Monomial,
    pub coeff: BigRational,
    /// Indices of the input terms merged into this one.
    pub sources: BTreeSet<usize>,
}

#[derive(Clone, Debug)]
pub struct Grouped {
    pub table: VarTable,
    pub terms: Vec<GroupedTerm>,
    pub quads: Vec<QuadFace>,
}

impl Grouped {
    /// Largest number of input monomials merged into a single output monomial.
    pub fn max_collapse(&self) -> usize {
        self.terms.iter().map(|t| t.sources.len()).max().unwrap_or(0)
    }

    pub fn to_poly(&self) -> LaurentPoly {
        LaurentPoly::from_terms(&self.table, self.terms.iter().map(|t| (t.mono.clone(), t.coeff.clone())))
    }

    pub fn all_positive(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.is_positive())
    }

    pub fn quad_degrees_ok(&self) -> bool {
        self.terms.iter().all(|t| self.quads.iter().all(|q| (0..=1).contains(&t.mono.exponent(q.var))))
    }
}

fn pair_mono(q: &QuadFace) -> (Monomial, Monomial) {
    let [c0, c1, c2, c3] = q.corners;
    (Monomial::from_pairs([(c0, 1), (c2, 1)]), Monomial::from_pairs([(c1, 1), (c3, 1)]))
}

/// Regroups a Laurent polynomial so each quad variable `q` appears with degree
/// 0 or 1, using `q^2 = c0 c2 + c1 c3`.
pub fn f_laurent_grouping(poly: &LaurentPoly, quads: &[QuadFace]) -> Result<Grouped> {
    let mut terms: Vec<GroupedTerm> = poly.terms().enumerate().map(|(i, (m, c))| GroupedTerm { mono: m.clone(), coeff: c.clone(), sources: BTreeSet::from([i]) }).collect();
    for (qi, q) in quads.iter().enumerate() {
        for other in &quads[..qi] {
            if q.corners.contains(&other.var) || other.corners.contains(&q.var) {
                return Err(Error::Hypothesis("quad faces must not be adjacent".into()));
            }
        }
        let (d1, d2) = pair_mono(q);
        let qm = |e: i32| Monomial::var(q.var, e);
        // degree >= 2: substitute q^2
        let mut next = Vec::new();
        let mut stack = terms;
        while let Some(t) = stack.pop() {
            if t.mono.exponent(q.var) >= 2 {
                let base = t.mono.mul(&qm(-2));
                for d in [&d1, &d2] {
                    stack.push(GroupedTerm { mono: base.mul(d), coeff: t.coeff.clone(), sources: t.sources.clone() });
                }
            } else {
                next.push(t);
            }
        }
        terms = merge(next);
        // degree -1: pairs M, M d2/d1 become M q^2 / d1
        let ratio = d2.div(&d1);
        terms = pair_off(terms, q.var, -1, |m| vec![m.mul(&ratio)], |m| vec![m.mul(&qm(2)).div(&d1)])?;
        // degree -2: triples 2N, N d1/d2, N d2/d1 become N q^2 (1/d1 + 1/d2)
        let inv = d1.div(&d2);
        terms = pair_off(
            terms,
            q.var,
            -2,
            |m| vec![m.mul(&inv), m.mul(&ratio)],
            |m| {
                let n2 = m.mul(&qm(2));
                vec![n2.div(&d1), n2.div(&d2)]
            },
        )?;
    }
    let g = Grouped { table: poly.table().clone(), terms: merge(terms), quads: quads.to_vec() };
    if let Some(t) = g.terms.iter().find(|t| quads.iter().any(|q| !(0..=1).contains(&t.mono.exponent(q.var)))) {
        return Err(Error::Hypothesis(format!("term {:?} could not be grouped", t.mono)));
    }
    Ok(g)
}

fn merge(terms: Vec<GroupedTerm>) -> Vec<GroupedTerm> {
    let mut map: BTreeMap<Vec<(u32, i32)>, GroupedTerm> = BTreeMap::new();
    for t in terms {
        let key: Vec<(u32, i32)> = t.mono.iter().collect();
        match map.get_mut(&key) {
            Some(x) => {
                x.coeff += &t.coeff;
                x.sources.extend(t.sources);
            }
            None => {
                map.insert(key, t);
            }
        }
    }
    map.into_values().filter(|t| !t.coeff.is_zero()).collect()
}

/// Groups every term of degree `deg` in `var` with partners given by
/// `partners(m)` into the outputs `outputs(m)`. A degree -2 lead `2N` carries
/// twice the coefficient of its partners.
fn pair_off(
    terms: Vec<GroupedTerm>,
    var: u32,
    deg: i32,
    partners: impl Fn(&Monomial) -> Vec<Monomial>,
    outputs: impl Fn(&Monomial) -> Vec<Monomial>,
) -> Result<Vec<GroupedTerm>> {
    let mut pool: HashMap<Monomial, GroupedTerm> = HashMap::new();
    let mut rest = Vec::new();
    for t in terms {
        if t.mono.exponent(var) == deg {
            pool.insert(t.mono.clone(), t);
        } else {
            rest.push(t);
        }
    }
    let mut leads: Vec<Monomial> = pool.keys().cloned().collect();
    leads.sort_by_key(|m| m.iter().collect::<Vec<_>>());
    for lead in leads {
        let Some(t) = pool.get(&lead).cloned() else { continue };
        let ps = partners(&lead);
        let mut unit = t.coeff.clone();
        if deg == -2 {
            unit = &unit / BigRational::from_integer(BigInt::from(2));
        }
        let ok = ps.iter().all(|m| pool.get(m).is_some_and(|p| p.coeff >= unit));
        if !ok {
            continue;
        }
        let mut sources = t.sources.clone();
        pool.remove(&lead);
        for m in &ps {
            let p = pool.get_mut(m).unwrap();
            p.coeff -= &unit;
            sources.extend(p.sources.iter().copied());
            if p.coeff.is_zero() {
                pool.remove(m);
            }
        }
        for m in outputs(&lead) {
            rest.push(GroupedTerm { mono: m, coeff: unit.clone(), sources: sources.clone() });
        }
    }
    if let Some((m, _)) = pool.into_iter().next() {
        return Err(Error::Hypothesis(format!("monomial {m:?} has no grouping partner")));
    }
    Ok(rest)
}

/// Symbolic value at `apex` from slab data on `0 <= l <= 2`, with the quad
/// variables on the faces at level 0.
pub fn apex_expansion(apex: [i32; 3]) -> Result<(LaurentPoly, Vec<QuadFace>)> {
    let table = VarTable::new();
    let lvl = apex.iter().sum::<i32>();
    let lo = apex.iter().min().copied().unwrap_or(0) - lvl - 1;
    let hi = apex.iter().max().copied().unwrap_or(0) + 1;
    let field = LatticeField::slab(lo, hi, |p| LaurentPoly::point(&table, p), |p| LaurentPoly::point(&table, p));
    let mut field = field;
    let value = propagate_point(&mut field, HalfLatticePoint::vertex(apex), 0)?;
    let mut quads = Vec::new();
    let mut used: BTreeSet<u32> = BTreeSet::new();
    for (m, _) in value.terms() {
        used.extend(m.iter().map(|(v, _)| v));
    }
    for v in used {
        if let crate::laurent::VarName::Point(p) = table.name(v) {
            if let Some((base, a)) = p.face_base() {
                let (b, c) = a.others();
                let pts = [base, add(base, b.unit()), add(add(base, b.unit()), c.unit()), add(base, c.unit())];
                quads.push(QuadFace { var: v, corners: pts.map(|x| table.point(HalfLatticePoint::vertex(x))) });
            }
        }
    }
    Ok((value, quads))
}

/// Evaluates a polynomial with vertex variables set by `vertex` and each quad
/// variable set to the root of its corner relation.
pub fn eval_specialized(p: &LaurentPoly, quads: &[QuadFace], vertex: impl Fn(u32) -> Real) -> Result<Real> {
    let mut vals: HashMap<u32, Real> = HashMap::new();
    for q in quads {
        let c = q.corners.map(&vertex);
        vals.insert(q.var, (&(&c[0] * &c[2]) + &(&c[1] * &c[3])).sqrt());
    }
    let mut total = Real::zero();
    for (m, c) in p.terms() {
        let mut t = Real::from_rational(c);
        for (v, e) in m.iter() {
            let x = vals.get(&v).cloned().unwrap_or_else(|| vertex(v));
            t = &t * &x.powi(e as i64);
        }
        total = &total + &t;
    }
    Ok(total)
}

/// Propagates embedded Kashaev data and returns the vertex values up to `level`.
pub fn propagate_kashaev(f: &LatticeField<Real>, level: i32) -> Result<LatticeField<Real>> {
    let h = embed_hexahedron(f)?;
    let full = propagate(&h, level)?;
    let mut out = LatticeField::new();
    for (p, v) in full.iter() {
        if p.is_vertex() {
            out.insert(*p, v.clone());
        }
    }
    Ok(out)
}
