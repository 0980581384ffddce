//! The octahedron, cube, Kashaev and hexahedron recurrences.
//!
//! Every step is written once against [`FieldValue`], so the same code runs over
//! exact rationals, high-precision reals and Laurent polynomials. In the symbolic
//! case each division is exact division, so a remainder surfaces as an error
//! instead of silently producing a rational function.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{Axis, HalfLatticePoint, PointKind};
use crate::laurent::{LaurentPoly, VarTable};
use crate::real::Real;

/// Values the recurrences can be evaluated over.
pub trait FieldValue: Clone {
    fn add(&self, o: &Self) -> Result<Self>;
    fn sub(&self, o: &Self) -> Result<Self>;
    fn mul(&self, o: &Self) -> Result<Self>;
    /// Exact (or correctly rounded) quotient; zero divisors are an error.
    fn div(&self, o: &Self) -> Result<Self>;
    fn scale(&self, k: i64) -> Self;
    fn is_zero(&self) -> bool;
}

impl FieldValue for BigRational {
    fn add(&self, o: &Self) -> Result<Self> {
        Ok(self + o)
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        Ok(self - o)
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        Ok(self * o)
    }
    fn div(&self, o: &Self) -> Result<Self> {
        if Zero::is_zero(o) {
            return Err(Error::ZeroDivisor);
        }
        Ok(self / o)
    }
    fn scale(&self, k: i64) -> Self {
        self * BigRational::from_integer(BigInt::from(k))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl FieldValue for Real {
    fn add(&self, o: &Self) -> Result<Self> {
        Ok(self + o)
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        Ok(self - o)
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        Ok(self * o)
    }
    fn div(&self, o: &Self) -> Result<Self> {
        if Zero::is_zero(o) {
            return Err(Error::ZeroDivisor);
        }
        Ok(self / o)
    }
    fn scale(&self, k: i64) -> Self {
        self * &Real::from_i64(k)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl FieldValue for LaurentPoly {
    fn add(&self, o: &Self) -> Result<Self> {
        LaurentPoly::add(self, o)
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        LaurentPoly::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        LaurentPoly::mul(self, o)
    }
    fn div(&self, o: &Self) -> Result<Self> {
        self.div_exact(o).map_err(|e| match e {
            Error::NonDivisible { remainder } => {
                Error::Inconsistent(format!("symbolic division left remainder {remainder}"))
            }
            e => e,
        })
    }
    fn scale(&self, k: i64) -> Self {
        LaurentPoly::scale(self, &BigRational::from_integer(BigInt::from(k)))
    }
    fn is_zero(&self) -> bool {
        LaurentPoly::is_zero(self)
    }
}

fn prod<T: FieldValue>(xs: &[&T]) -> Result<T> {
    let mut it = xs.iter();
    let mut acc = (*it.next().expect("nonempty product")).clone();
    for x in it {
        acc = acc.mul(x)?;
    }
    Ok(acc)
}

fn sum<T: FieldValue>(xs: &[T]) -> Result<T> {
    let mut it = xs.iter();
    let mut acc = it.next().expect("nonempty sum").clone();
    for x in it {
        acc = acc.add(x)?;
    }
    Ok(acc)
}

fn nonzero<T: FieldValue>(xs: &[&T]) -> Result<()> {
    if xs.iter().any(|x| x.is_zero()) {
        Err(Error::ZeroDivisor)
    } else {
        Ok(())
    }
}

/// `a(1) a(23) = a(2) a(13) + a(3) a(12)`, solved for `a(23)`.
pub fn octahedron_step<T: FieldValue>(a1: &T, a2: &T, a3: &T, a12: &T, a13: &T) -> Result<T> {
    nonzero(&[a1])?;
    a2.mul(a13)?.add(&a3.mul(a12)?)?.div(a1)
}

/// `g(123) g = g(1) g(23) + g(2) g(13) + g(3) g(12)`, solved for `g(123)`.
pub fn cube_step<T: FieldValue>(g: &T, g1: &T, g2: &T, g3: &T, g12: &T, g13: &T, g23: &T) -> Result<T> {
    nonzero(&[g])?;
    sum(&[g1.mul(g23)?, g2.mul(g13)?, g3.mul(g12)?])?.div(g)
}

/// Inputs of one hexahedron step: the seven lower corners of a unit cube and
/// the three faces through its minimal corner.
#[derive(Clone, Debug, PartialEq)]
pub struct HexInput<T> {
    pub h: T,
    pub h1: T,
    pub h2: T,
    pub h3: T,
    pub h12: T,
    pub h13: T,
    pub h23: T,
    pub hx: T,
    pub hy: T,
    pub hz: T,
}

/// The top corner and the three faces through it.
#[derive(Clone, Debug, PartialEq)]
pub struct HexOutput<T> {
    pub h123: T,
    pub hx1: T,
    pub hy2: T,
    pub hz3: T,
}

impl<T: Clone> HexInput<T> {
    pub fn uniform(x: T) -> Self {
        HexInput {
            h: x.clone(),
            h1: x.clone(),
            h2: x.clone(),
            h3: x.clone(),
            h12: x.clone(),
            h13: x.clone(),
            h23: x.clone(),
            hx: x.clone(),
            hy: x.clone(),
            hz: x,
        }
    }

    /// Data depending only on the level: vertex values `a[0..3]` on levels
    /// 0, 1, 2 and face value `b` on the three faces.
    pub fn isotropic(a: [T; 3], b: T) -> Self {
        let [a0, a1, a2] = a;
        HexInput {
            h: a0,
            h1: a1.clone(),
            h2: a1.clone(),
            h3: a1,
            h12: a2.clone(),
            h13: a2.clone(),
            h23: a2,
            hx: b.clone(),
            hy: b.clone(),
            hz: b,
        }
    }
}

/// One step of the hexahedron recurrence.
pub fn hexahedron_step<T: FieldValue>(i: &HexInput<T>) -> Result<HexOutput<T>> {
    nonzero(&[&i.h, &i.hx, &i.hy, &i.hz])?;
    let xyz = prod(&[&i.hx, &i.hy, &i.hz])?;
    let p = prod(&[&i.h1, &i.h2, &i.h3])?;
    let t1 = prod(&[&i.h, &i.h1, &i.h23])?;
    let t2 = prod(&[&i.h, &i.h2, &i.h13])?;
    let t3 = prod(&[&i.h, &i.h3, &i.h12])?;
    let base = xyz.add(&p)?;
    let hx1 = base.add(&t1)?.div(&i.hx.mul(&i.h)?)?;
    let hy2 = base.add(&t2)?.div(&i.hy.mul(&i.h)?)?;
    let hz3 = base.add(&t3)?.div(&i.hz.mul(&i.h)?)?;
    let inner = sum(&[p.scale(2), t1, t2, t3])?;
    let f12 = i.h1.mul(&i.h2)?.add(&i.h.mul(&i.h12)?)?;
    let f13 = i.h1.mul(&i.h3)?.add(&i.h.mul(&i.h13)?)?;
    let f23 = i.h2.mul(&i.h3)?.add(&i.h.mul(&i.h23)?)?;
    let num = sum(&[xyz.mul(&xyz)?, xyz.mul(&inner)?, prod(&[&f12, &f13, &f23])?])?;
    let den = prod(&[&i.h, &i.h, &xyz])?;
    let h123 = num.div(&den)?;
    Ok(HexOutput { h123, hx1, hy2, hz3 })
}

/// Residuals of the four defining equations, each as `lhs - rhs`.
pub fn hexahedron_residuals<T: FieldValue>(i: &HexInput<T>, o: &HexOutput<T>) -> Result<[T; 4]> {
    let xyz = prod(&[&i.hx, &i.hy, &i.hz])?;
    let p = prod(&[&i.h1, &i.h2, &i.h3])?;
    let t1 = prod(&[&i.h, &i.h1, &i.h23])?;
    let t2 = prod(&[&i.h, &i.h2, &i.h13])?;
    let t3 = prod(&[&i.h, &i.h3, &i.h12])?;
    let base = xyz.add(&p)?;
    let r1 = prod(&[&o.hx1, &i.hx, &i.h])?.sub(&base.add(&t1)?)?;
    let r2 = prod(&[&o.hy2, &i.hy, &i.h])?.sub(&base.add(&t2)?)?;
    let r3 = prod(&[&o.hz3, &i.hz, &i.h])?.sub(&base.add(&t3)?)?;
    let inner = sum(&[p.scale(2), t1, t2, t3])?;
    let f12 = i.h1.mul(&i.h2)?.add(&i.h.mul(&i.h12)?)?;
    let f13 = i.h1.mul(&i.h3)?.add(&i.h.mul(&i.h13)?)?;
    let f23 = i.h2.mul(&i.h3)?.add(&i.h.mul(&i.h23)?)?;
    let rhs = sum(&[xyz.mul(&xyz)?, xyz.mul(&inner)?, prod(&[&f12, &f13, &f23])?])?;
    let r4 = prod(&[&o.h123, &i.h, &i.h, &xyz])?.sub(&rhs)?;
    Ok([r1, r2, r3, r4])
}

/// Inputs of the reduced Kashaev system at one cube.
#[derive(Clone, Debug)]
pub struct KashaevInput {
    pub f: Real,
    pub f1: Real,
    pub f2: Real,
    pub f3: Real,
    pub f12: Real,
    pub f13: Real,
    pub f23: Real,
    pub x: Real,
    pub y: Real,
    pub z: Real,
}

#[derive(Clone, Debug)]
pub struct KashaevOutput {
    pub f123: Real,
    pub x1: Real,
    pub y2: Real,
    pub z3: Real,
}

impl KashaevInput {
    /// Fills `X, Y, Z` with their defining positive square roots.
    pub fn with_canonical_roots(f: [Real; 7]) -> Self {
        let [f, f1, f2, f3, f12, f13, f23] = f;
        let x = (&(&f * &f23) + &(&f2 * &f3)).sqrt();
        let y = (&(&f * &f13) + &(&f1 * &f3)).sqrt();
        let z = (&(&f * &f12) + &(&f1 * &f2)).sqrt();
        KashaevInput { f, f1, f2, f3, f12, f13, f23, x, y, z }
    }
}

/// Relative tolerance used for identities in high-precision mode.
pub fn default_tolerance() -> Real {
    Real::parse("1e-40").unwrap()
}

/// The canonical positive branch of the Kashaev recurrence.
pub fn kashaev_step(k: &KashaevInput) -> Result<KashaevOutput> {
    let all = [&k.f, &k.f1, &k.f2, &k.f3, &k.f12, &k.f13, &k.f23, &k.x, &k.y, &k.z];
    if all.iter().any(|v| !v.is_positive()) {
        return Err(Error::Domain("Kashaev inputs must be positive".into()));
    }
    let tol = default_tolerance();
    let checks = [
        (&k.x, &(&(&k.f * &k.f23) + &(&k.f2 * &k.f3)), "X"),
        (&k.y, &(&(&k.f * &k.f13) + &(&k.f1 * &k.f3)), "Y"),
        (&k.z, &(&(&k.f * &k.f12) + &(&k.f1 * &k.f2)), "Z"),
    ];
    for (v, sq, name) in checks {
        if (v * v).rel_diff(sq) > tol {
            return Err(Error::Domain(format!("{name} is inconsistent with the vertex values")));
        }
    }
    let x1 = (&(&k.f1 * &k.x) + &(&k.y * &k.z)) / k.f.clone();
    let y2 = (&(&k.f2 * &k.y) + &(&k.x * &k.z)) / k.f.clone();
    let z3 = (&(&k.f3 * &k.z) + &(&k.x * &k.y)) / k.f.clone();
    let two = Real::from_i64(2);
    let num = &two * &(&(&k.f1 * &k.f2) * &k.f3)
        + &k.f * &(&(&k.f1 * &k.f23) + &(&(&k.f2 * &k.f13) + &(&k.f3 * &k.f12)))
        + &two * &(&(&k.x * &k.y) * &k.z);
    let f123 = num / (&k.f * &k.f);
    Ok(KashaevOutput { f123, x1, y2, z3 })
}

/// Left side of the full Kashaev relation at the eight corners of a cube.
pub fn kashaev_residual<T>(f: &[T; 8]) -> T
where
    T: Clone + num_traits::Num,
{
    // f, f1, f2, f3, f12, f13, f23, f123
    let [f0, f1, f2, f3, f12, f13, f23, f123] = f.clone();
    let two = T::one() + T::one();
    let four = two.clone() + two.clone();
    let sq = |a: &T, b: &T| a.clone() * a.clone() * b.clone() * b.clone();
    sq(&f0, &f123) + sq(&f1, &f23) + sq(&f2, &f13) + sq(&f3, &f12)
        - two.clone() * f1.clone() * f2.clone() * f23.clone() * f13.clone()
        - two.clone() * f1.clone() * f3.clone() * f23.clone() * f12.clone()
        - two.clone() * f3.clone() * f2.clone() * f12.clone() * f13.clone()
        - two * f0.clone() * f123.clone()
            * (f1.clone() * f23.clone() + f2.clone() * f13.clone() + f3.clone() * f12.clone())
        - four.clone() * f0 * f23 * f13 * f12
        - four * f123 * f1 * f2 * f3
}

/// A field on the half-integer lattice, one value per point.
#[derive(Clone, Debug)]
pub struct LatticeField<T> {
    values: HashMap<HalfLatticePoint, T>,
}

impl<T> Default for LatticeField<T> {
    fn default() -> Self {
        LatticeField { values: HashMap::new() }
    }
}

impl<T: FieldValue> LatticeField<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, p: HalfLatticePoint, v: T) {
        self.values.insert(p, v);
    }

    pub fn get(&self, p: &HalfLatticePoint) -> Option<&T> {
        self.values.get(p)
    }

    pub fn contains(&self, p: &HalfLatticePoint) -> bool {
        self.values.contains_key(p)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&HalfLatticePoint, &T)> {
        self.values.iter()
    }

    /// Slab initial data on `0 <= l <= 2` inside the box `[lo, hi]^3`:
    /// `vertex(p)` on vertices and `face(p)` on faces at level 1.
    pub fn slab(lo: i32, hi: i32, vertex: impl Fn(HalfLatticePoint) -> T, face: impl Fn(HalfLatticePoint) -> T) -> Self {
        let mut f = LatticeField::new();
        for i in lo..=hi {
            for j in lo..=hi {
                for k in lo..=hi {
                    let v = [i, j, k];
                    let l = i + j + k;
                    if (0..=2).contains(&l) {
                        let p = HalfLatticePoint::vertex(v);
                        f.insert(p, vertex(p));
                    }
                    if l == 0 {
                        for a in Axis::ALL {
                            let p = HalfLatticePoint::face(v, a);
                            f.insert(p, face(p));
                        }
                    }
                }
            }
        }
        f
    }

    fn check_nonzero(&self) -> Result<()> {
        match self.values.iter().find(|(_, v)| v.is_zero()) {
            Some((p, _)) => Err(Error::Domain(format!("zero initial value at {p}"))),
            None => Ok(()),
        }
    }

    /// Inputs of the cube with minimal corner `v`, if all present.
    pub fn cube_input(&self, v: [i32; 3]) -> std::result::Result<HexInput<T>, HalfLatticePoint> {
        let pts = cube_input_points(v);
        let mut vals = Vec::with_capacity(10);
        for p in pts {
            vals.push(self.values.get(&p).cloned().ok_or(p)?);
        }
        let mut it = vals.into_iter();
        let mut n = || it.next().unwrap();
        Ok(HexInput { h: n(), h1: n(), h2: n(), h3: n(), h12: n(), h13: n(), h23: n(), hx: n(), hy: n(), hz: n() })
    }

    fn store_output(&mut self, v: [i32; 3], out: HexOutput<T>) {
        let [top, fx, fy, fz] = cube_output_points(v);
        self.values.entry(top).or_insert(out.h123);
        self.values.entry(fx).or_insert(out.hx1);
        self.values.entry(fy).or_insert(out.hy2);
        self.values.entry(fz).or_insert(out.hz3);
    }
}

fn add3(a: [i32; 3], b: [i32; 3]) -> [i32; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Points read by the cube at `v`, in [`HexInput`] field order.
pub fn cube_input_points(v: [i32; 3]) -> [HalfLatticePoint; 10] {
    let vx = HalfLatticePoint::vertex;
    [
        vx(v),
        vx(add3(v, [1, 0, 0])),
        vx(add3(v, [0, 1, 0])),
        vx(add3(v, [0, 0, 1])),
        vx(add3(v, [1, 1, 0])),
        vx(add3(v, [1, 0, 1])),
        vx(add3(v, [0, 1, 1])),
        HalfLatticePoint::face(v, Axis::X),
        HalfLatticePoint::face(v, Axis::Y),
        HalfLatticePoint::face(v, Axis::Z),
    ]
}

/// Points written by the cube at `v`: top corner and the three upper faces.
pub fn cube_output_points(v: [i32; 3]) -> [HalfLatticePoint; 4] {
    [
        HalfLatticePoint::vertex(add3(v, [1, 1, 1])),
        HalfLatticePoint::face(add3(v, [1, 0, 0]), Axis::X),
        HalfLatticePoint::face(add3(v, [0, 1, 0]), Axis::Y),
        HalfLatticePoint::face(add3(v, [0, 0, 1]), Axis::Z),
    ]
}

/// The cube whose step produces `p`.
pub fn producing_cube(p: &HalfLatticePoint) -> [i32; 3] {
    match p.kind() {
        PointKind::Vertex => add3(p.as_vertex().unwrap(), [-1, -1, -1]),
        PointKind::Face(a) => {
            let (base, _) = p.face_base().unwrap();
            let mut v = base;
            v[a.index()] -= 1;
            v
        }
    }
}

/// Extends `initial` by every cube step whose inputs are available and whose top
/// corner has level at most `target_level`. Levels are processed in increasing
/// order so each point is computed once.
pub fn propagate<T: FieldValue>(initial: &LatticeField<T>, target_level: i32) -> Result<LatticeField<T>> {
    initial.check_nonzero()?;
    let mut field = initial.clone();
    let mut by_level: BTreeMap<i32, Vec<[i32; 3]>> = BTreeMap::new();
    for p in field.values.keys() {
        if let Some(v) = p.as_vertex() {
            by_level.entry(p.level()).or_default().push(v);
        }
    }
    while let Some((level, mut vs)) = by_level.pop_first() {
        if level + 3 > target_level {
            break;
        }
        vs.sort_unstable();
        for v in vs {
            let top = HalfLatticePoint::vertex(add3(v, [1, 1, 1]));
            if field.contains(&top) {
                continue;
            }
            let Ok(input) = field.cube_input(v) else { continue };
            let out = hexahedron_step(&input)?;
            field.store_output(v, out);
            by_level.entry(level + 3).or_default().push(add3(v, [1, 1, 1]));
        }
    }
    Ok(field)
}

/// Computes the value at `target` on demand, memoising every intermediate point.
/// A point below `floor` that is absent from the field is reported as missing.
pub fn propagate_point<T: FieldValue>(field: &mut LatticeField<T>, target: HalfLatticePoint, floor: i32) -> Result<T> {
    field.check_nonzero()?;
    let mut stack = vec![target];
    while let Some(&p) = stack.last() {
        if field.contains(&p) {
            stack.pop();
            continue;
        }
        if p.level() < floor {
            return Err(Error::MissingPoint(p));
        }
        let v = producing_cube(&p);
        match field.cube_input(v) {
            Ok(input) => {
                let out = hexahedron_step(&input)?;
                field.store_output(v, out);
                stack.pop();
            }
            Err(missing) => {
                if stack.len() > 100_000 {
                    return Err(Error::MissingPoint(missing));
                }
                stack.push(missing);
            }
        }
    }
    Ok(field.get(&target).cloned().unwrap())
}

/// A symbolic field with one variable per point of `points`.
pub fn symbolic_field(table: &VarTable, points: impl IntoIterator<Item = HalfLatticePoint>) -> LatticeField<LaurentPoly> {
    let mut f = LatticeField::new();
    for p in points {
        f.insert(p, LaurentPoly::point(table, p));
    }
    f
}

/// Spatially isotropic hexahedron data: vertex values depend only on the level,
/// face values only on the level of their base corner.
#[derive(Clone, Debug, PartialEq)]
pub struct IsotropicHex<T> {
    pub a: Vec<T>,
    pub b: Vec<T>,
}

impl<T: FieldValue> IsotropicHex<T> {
    /// Seeds `A0, A1, A2, B0` and derives `A3, B1, B2`.
    pub fn new(a0: T, a1: T, a2: T, b0: T) -> Result<Self> {
        let mut s = IsotropicHex { a: vec![a0, a1, a2], b: vec![b0] };
        s.extend_to(3)?;
        Ok(s)
    }

    /// Iterates the scalar recurrences until `A_n` and `B_n` exist.
    pub fn extend_to(&mut self, n: usize) -> Result<()> {
        while self.a.len() <= n.max(3) || self.b.len() <= n.max(2) {
            let k = self.b.len() - 1;
            let input = HexInput::isotropic([self.a[k].clone(), self.a[k + 1].clone(), self.a[k + 2].clone()], self.b[k].clone());
            let out = hexahedron_step(&input)?;
            if self.a.len() == k + 3 {
                self.a.push(out.h123);
            }
            self.b.push(out.hx1);
        }
        Ok(())
    }

    pub fn a(&mut self, n: usize) -> Result<T> {
        self.extend_to(n)?;
        Ok(self.a[n].clone())
    }

    pub fn b(&mut self, n: usize) -> Result<T> {
        self.extend_to(n)?;
        Ok(self.b[n].clone())
    }
}

fn qpow(x: &BigRational, e: i64) -> BigRational {
    x.pow(e as i32)
}

/// Closed forms for `(A_n, B_n)` in terms of `A0..A3, B0..B2`.
pub fn isotropic_closed_form(a: [&BigRational; 4], b: [&BigRational; 3], n: u32) -> Result<(BigRational, BigRational)> {
    if a.iter().chain(b.iter()).any(|x| !x.is_positive()) {
        return Err(Error::Domain("isotropic seeds must be positive".into()));
    }
    let [a0, a1, a2, a3] = a;
    let [b0, b1, b2] = b;
    let m = (n / 2) as i64;
    let an = if n % 2 == 0 {
        qpow(a0, (m - 1) * (m - 1)) * qpow(a3, m * m - m) / (qpow(a1, m * m - m) * qpow(a2, m * m - 2 * m))
    } else {
        qpow(a0, m * m - m) * qpow(a3, m * m) / (qpow(a1, m * m - 1) * qpow(a2, m * m - m))
    };
    let bn = if n % 2 == 0 {
        qpow(a0, m * m - m) * qpow(b2, m * m) / (qpow(a2, m * m - m) * qpow(b0, m * m - 1))
    } else {
        qpow(a0, m * m) * b1 * qpow(b2, m * m + m) / (qpow(a2, m * m) * qpow(b0, m * m + m))
    };
    Ok((an, bn))
}

/// Closed form from the four free seeds `A0, A1, A2, B0`.
pub fn isotropic_closed_form_from_seeds(a0: &BigRational, a1: &BigRational, a2: &BigRational, b0: &BigRational, n: u32) -> Result<(BigRational, BigRational)> {
    let s = IsotropicHex::new(a0.clone(), a1.clone(), a2.clone(), b0.clone())?;
    isotropic_closed_form([&s.a[0], &s.a[1], &s.a[2], &s.a[3]], [&s.b[0], &s.b[1], &s.b[2]], n)
}

/// `A_n = 3^{n^2/2}`, `B_n = 2 * 3^{(n+1)^2/2}`.
pub fn power_of_three(n: i64) -> (Real, Real) {
    let three = Real::from_i64(3);
    let a = three.powf(&(Real::from_i64(n * n) / Real::from_i64(2)));
    let b = Real::from_i64(2) * three.powf(&(Real::from_i64((n + 1) * (n + 1)) / Real::from_i64(2)));
    (a, b)
}

/// `A_{2n} = 14^{n(n-1)}`, `A_{2n+1} = 14^{n^2}`, `B_{2n} = 14^{n^2}`, `B_{2n+1} = 3 * 14^{n(n+1)}`.
pub fn unit_isotropic(n: u32) -> (BigInt, BigInt) {
    let m = n / 2;
    let f = BigInt::from(14);
    if n % 2 == 0 {
        (num_traits::pow(f.clone(), (m * m).saturating_sub(m) as usize), num_traits::pow(f, (m * m) as usize))
    } else {
        (num_traits::pow(f.clone(), (m * m) as usize), BigInt::from(3) * num_traits::pow(f, (m * m + m) as usize))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::{int, rational};
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        int(n)
    }

    #[test]
    fn unit_hexahedron_step() {
        let out = hexahedron_step(&HexInput::uniform(q(1))).unwrap();
        assert_eq!(out, HexOutput { h123: q(14), hx1: q(3), hy2: q(3), hz3: q(3) });
    }

    #[test]
    fn powers_of_three_step() {
        let (a0, _) = power_of_three(0);
        let (a1, _) = power_of_three(1);
        let (a2, _) = power_of_three(2);
        let (_, b0) = power_of_three(0);
        let b0_expected = Real::from_i64(2) * Real::from_i64(3).sqrt();
        assert!(b0.rel_diff(&b0_expected) < default_tolerance());
        let out = hexahedron_step(&HexInput::isotropic([a0, a1, a2], b0)).unwrap();
        let (a3, _) = power_of_three(3);
        assert!(out.h123.rel_diff(&a3) < default_tolerance());
        assert!(out.hx1.rel_diff(&Real::from_i64(18)) < default_tolerance());
    }

    #[test]
    fn worked_isotropic_example() {
        let mut s = IsotropicHex::new(q(1), q(2), q(3), q(1)).unwrap();
        assert_eq!(s.b(1).unwrap(), q(15));
        assert_eq!(s.b(2).unwrap(), q(189));
        assert_eq!(s.a(3).unwrap(), q(378));
    }

    #[test]
    fn octahedron_and_cube() {
        let one = q(1);
        assert_eq!(octahedron_step(&one, &one, &one, &one, &one).unwrap(), q(2));
        assert_eq!(octahedron_step(&q(4), &q(2), &q(5), &q(2), &q(3)).unwrap(), q(4));
        assert_eq!(cube_step(&one, &one, &one, &one, &one, &one, &one).unwrap(), q(3));
        assert_eq!(cube_step(&q(2), &one, &one, &one, &one, &one, &one).unwrap(), rational(3, 2));
        assert!(matches!(octahedron_step(&q(0), &one, &one, &one, &one), Err(Error::ZeroDivisor)));
    }

    #[test]
    fn symbolic_octahedron_and_cube() {
        let t = VarTable::new();
        let v: Vec<LaurentPoly> = ["a1", "a2", "a3", "a12", "a13"].iter().map(|n| LaurentPoly::named(&t, n)).collect();
        let r = octahedron_step(&v[0], &v[1], &v[2], &v[3], &v[4]).unwrap();
        assert_eq!(r, LaurentPoly::parse(&t, "a2*a13*a1^-1 + a3*a12*a1^-1").unwrap());
        let g: Vec<LaurentPoly> = ["g", "g1", "g2", "g3", "g12", "g13", "g23"].iter().map(|n| LaurentPoly::named(&t, n)).collect();
        let r = cube_step(&g[0], &g[1], &g[2], &g[3], &g[4], &g[5], &g[6]).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r.content(), crate::laurent::Monomial::var(t.named("g"), -1));
    }

    #[test]
    fn kashaev_examples() {
        let one = Real::from_i64(1);
        let k = KashaevInput::with_canonical_roots(std::array::from_fn(|_| one.clone()));
        let out = kashaev_step(&k).unwrap();
        let expected = Real::from_i64(5) + Real::from_i64(4) * Real::from_i64(2).sqrt();
        assert!(out.f123.rel_diff(&expected) < default_tolerance());

        let s3 = Real::from_i64(3).sqrt();
        let nine = Real::from_i64(9);
        let k = KashaevInput::with_canonical_roots([one.clone(), s3.clone(), s3.clone(), s3, nine.clone(), nine.clone(), nine]);
        let twice_root3 = Real::from_i64(2) * Real::from_i64(3).sqrt();
        assert!(k.x.rel_diff(&twice_root3) < default_tolerance());
        let out = kashaev_step(&k).unwrap();
        let target = Real::from_i64(3).powf(&(Real::from_i64(9) / Real::from_i64(2)));
        assert!(out.f123.rel_diff(&target) < default_tolerance());
    }

    #[test]
    fn kashaev_rejects_bad_roots() {
        let one = Real::from_i64(1);
        let mut k = KashaevInput::with_canonical_roots(std::array::from_fn(|_| one.clone()));
        k.x = Real::from_i64(2);
        assert!(kashaev_step(&k).is_err());
        k.x = Real::from_i64(-1);
        assert!(kashaev_step(&k).is_err());
    }

    #[test]
    fn unit_slab_propagation() {
        let f = LatticeField::slab(-6, 8, |_| q(1), |_| q(1));
        let out = propagate(&f, 6).unwrap();
        for n in 3..=6 {
            let p = HalfLatticePoint::vertex([n / 3, n / 3 + (n % 3 >= 1) as i32, n / 3 + (n % 3 == 2) as i32]);
            assert_eq!(p.level(), n);
            let (a, _) = unit_isotropic(n as u32);
            assert_eq!(out.get(&p), Some(&BigRational::from_integer(a)), "level {n}");
        }
        let face = HalfLatticePoint::face([1, 0, 0], Axis::Y);
        assert_eq!(face.level(), 2);
        assert_eq!(out.get(&face), Some(&q(3)));
        let face = HalfLatticePoint::face([1, 1, 0], Axis::Z);
        assert_eq!(out.get(&face), Some(&q(14)));
    }

    #[test]
    fn demand_driven_matches_breadth_first() {
        let f = LatticeField::slab(-4, 6, |p| q(1 + p.level() as i64), |_| q(2));
        let wide = propagate(&f, 5).unwrap();
        let mut lazy = f.clone();
        let target = HalfLatticePoint::vertex([2, 2, 1]);
        let v = propagate_point(&mut lazy, target, 0).unwrap();
        assert_eq!(Some(&v), wide.get(&target));
        let mut empty: LatticeField<BigRational> = LatticeField::new();
        empty.insert(HalfLatticePoint::vertex([0, 0, 0]), q(1));
        assert!(matches!(propagate_point(&mut empty, target, 0), Err(Error::MissingPoint(_))));
    }

    #[test]
    fn zero_data_rejected() {
        let f = LatticeField::slab(-2, 2, |_| q(0), |_| q(1));
        assert!(propagate(&f, 3).is_err());
    }

    #[test]
    fn closed_form_base_cases() {
        let seeds = [q(2), q(3), q(5), q(7)];
        let s = IsotropicHex::new(seeds[0].clone(), seeds[1].clone(), seeds[2].clone(), seeds[3].clone()).unwrap();
        for n in 0..3u32 {
            let (a, b) = isotropic_closed_form([&s.a[0], &s.a[1], &s.a[2], &s.a[3]], [&s.b[0], &s.b[1], &s.b[2]], n).unwrap();
            assert_eq!(a, s.a[n as usize]);
            assert_eq!(b, s.b[n as usize]);
        }
        let (a4, b4) = isotropic_closed_form_from_seeds(&q(1), &q(1), &q(1), &q(1), 4).unwrap();
        assert_eq!((a4, b4), (q(196), q(14i64.pow(4))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn hexahedron_is_one_homogeneous(vals in prop::collection::vec((1i64..9, 1i64..5), 10), lam in (1i64..6, 1i64..6)) {
            let v: Vec<BigRational> = vals.iter().map(|&(n, d)| rational(n, d)).collect();
            let lam = rational(lam.0, lam.1);
            let input = HexInput { h: v[0].clone(), h1: v[1].clone(), h2: v[2].clone(), h3: v[3].clone(), h12: v[4].clone(), h13: v[5].clone(), h23: v[6].clone(), hx: v[7].clone(), hy: v[8].clone(), hz: v[9].clone() };
            let l = |k: i32| lam.pow(k);
            let scaled = HexInput {
                h: v[0].clone(), h1: &v[1] * l(1), h2: &v[2] * l(1), h3: &v[3] * l(1),
                h12: &v[4] * l(2), h13: &v[5] * l(2), h23: &v[6] * l(2),
                hx: &v[7] * l(1), hy: &v[8] * l(1), hz: &v[9] * l(1),
            };
            let a = hexahedron_step(&input).unwrap();
            let b = hexahedron_step(&scaled).unwrap();
            prop_assert_eq!(b.h123, &a.h123 * l(3));
            prop_assert_eq!(b.hx1, &a.hx1 * l(2));
            prop_assert_eq!(b.hz3, &a.hz3 * l(2));
            let r = hexahedron_residuals(&input, &a).unwrap();
            prop_assert!(r.iter().all(|x| Zero::is_zero(x)));
        }

        #[test]
        fn closed_forms_match_iteration(s in prop::collection::vec((1i64..7, 1i64..5), 4)) {
            let v: Vec<BigRational> = s.iter().map(|&(n, d)| rational(n, d)).collect();
            let mut it = IsotropicHex::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()).unwrap();
            for n in 0..=8u32 {
                let (a, b) = isotropic_closed_form_from_seeds(&v[0], &v[1], &v[2], &v[3], n).unwrap();
                prop_assert_eq!(a, it.a(n as usize).unwrap());
                prop_assert_eq!(b, it.b(n as usize).unwrap());
            }
        }
    }
}
