//! Limit shapes of isotropic hexahedron data.
//!
//! Logarithmic derivatives of the recurrence at an isotropic solution satisfy
//! a periodic linear system. Its determinant gives the denominator of the
//! generating function; the dual of the leading homogeneous part at the
//! singular torus points traces the arctic boundary.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::Axis;
use crate::laurent::{LaurentPoly, Monomial, VarTable};
use crate::real::Real;
use crate::recurrence::{hexahedron_step, FieldValue, HexInput, IsotropicHex};

/// Forward-mode dual number `v + d eps`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual<T> {
    pub v: T,
    pub d: T,
}

impl<T: FieldValue> FieldValue for Dual<T> {
    fn add(&self, o: &Self) -> Result<Self> {
        Ok(Dual { v: self.v.add(&o.v)?, d: self.d.add(&o.d)? })
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        Ok(Dual { v: self.v.sub(&o.v)?, d: self.d.sub(&o.d)? })
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        Ok(Dual { v: self.v.mul(&o.v)?, d: self.v.mul(&o.d)?.add(&self.d.mul(&o.v)?)? })
    }
    fn div(&self, o: &Self) -> Result<Self> {
        let v = self.v.div(&o.v)?;
        let d = self.d.mul(&o.v)?.sub(&self.v.mul(&o.d)?)?.div(&o.v.mul(&o.v)?)?;
        Ok(Dual { v, d })
    }
    fn scale(&self, k: i64) -> Self {
        Dual { v: self.v.scale(k), d: self.d.scale(k) }
    }
    fn is_zero(&self) -> bool {
        self.v.is_zero()
    }
}

/// Components of the derivative system: `g` lives on odd-level vertices,
/// `h` on even ones, and the face components on squares by the parity of
/// their minimal corner.
pub const COMPONENTS: [&str; 8] = ["g", "h", "gx", "gy", "gz", "hx", "hy", "hz"];

fn vertex_comp(parity: i32) -> usize {
    if parity.rem_euclid(2) == 1 {
        0
    } else {
        1
    }
}

fn face_comp(parity: i32, axis: Axis) -> usize {
    if parity.rem_euclid(2) == 1 {
        2 + axis.index()
    } else {
        5 + axis.index()
    }
}

/// One source of a linear equation: `coeff * f_comp(target - offset)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinTerm<T> {
    pub comp: usize,
    pub offset: [i32; 3],
    pub coeff: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinEquation<T> {
    pub target: usize,
    pub terms: Vec<LinTerm<T>>,
}

impl<T: FieldValue> LinEquation<T> {
    pub fn coeff(&self, comp: usize, offset: [i32; 3]) -> Option<&T> {
        self.terms.iter().find(|t| t.comp == comp && t.offset == offset).map(|t| &t.coeff)
    }

    pub fn row_sum(&self) -> Result<T> {
        let mut it = self.terms.iter();
        let first = it.next().map(|t| t.coeff.clone()).ok_or_else(|| Error::Domain("empty equation".into()))?;
        it.try_fold(first, |acc, t| acc.add(&t.coeff))
    }
}

/// The eight linear equations for logarithmic derivatives, indexed by target component.
#[derive(Clone, Debug)]
pub struct DerivativeSystem<T> {
    pub params: [T; 4],
    pub equations: Vec<LinEquation<T>>,
}

fn add3(a: [i32; 3], b: [i32; 3]) -> [i32; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub3(a: [i32; 3], b: [i32; 3]) -> [i32; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Equations produced by a cube whose minimal corner has level `n`.
fn cube_equations<T: FieldValue>(iso: &mut IsotropicHex<T>, n: usize, zero: &T) -> Result<Vec<LinEquation<T>>> {
    let p = n as i32;
    let (a0, a1, a2, b0) = (iso.a(n)?, iso.a(n + 1)?, iso.a(n + 2)?, iso.b(n)?);
    let e = |a: Axis| a.unit();
    // (value, component, position) for the ten inputs in HexInput order
    let inputs: [(T, usize, [i32; 3]); 10] = [
        (a0.clone(), vertex_comp(p), [0, 0, 0]),
        (a1.clone(), vertex_comp(p + 1), e(Axis::X)),
        (a1.clone(), vertex_comp(p + 1), e(Axis::Y)),
        (a1, vertex_comp(p + 1), e(Axis::Z)),
        (a2.clone(), vertex_comp(p), add3(e(Axis::X), e(Axis::Y))),
        (a2.clone(), vertex_comp(p), add3(e(Axis::X), e(Axis::Z))),
        (a2, vertex_comp(p), add3(e(Axis::Y), e(Axis::Z))),
        (b0.clone(), face_comp(p, Axis::X), [0, 0, 0]),
        (b0.clone(), face_comp(p, Axis::Y), [0, 0, 0]),
        (b0, face_comp(p, Axis::Z), [0, 0, 0]),
    ];
    let targets: [(usize, [i32; 3]); 4] = [
        (vertex_comp(p + 1), [1, 1, 1]),
        (face_comp(p + 1, Axis::X), e(Axis::X)),
        (face_comp(p + 1, Axis::Y), e(Axis::Y)),
        (face_comp(p + 1, Axis::Z), e(Axis::Z)),
    ];
    let mut eqs: Vec<LinEquation<T>> = targets.iter().map(|&(c, _)| LinEquation { target: c, terms: Vec::new() }).collect();
    for i in 0..10 {
        let d: Vec<Dual<T>> = inputs.iter().enumerate().map(|(j, (v, _, _))| Dual { v: v.clone(), d: if i == j { v.clone() } else { zero.clone() } }).collect();
        let input = HexInput {
            h: d[0].clone(),
            h1: d[1].clone(),
            h2: d[2].clone(),
            h3: d[3].clone(),
            h12: d[4].clone(),
            h13: d[5].clone(),
            h23: d[6].clone(),
            hx: d[7].clone(),
            hy: d[8].clone(),
            hz: d[9].clone(),
        };
        let out = hexahedron_step(&input)?;
        let outs = [out.h123, out.hx1, out.hy2, out.hz3];
        for (k, o) in outs.iter().enumerate() {
            let c = o.d.div(&o.v)?;
            if c.is_zero() {
                continue;
            }
            let (comp, pos) = (inputs[i].1, inputs[i].2);
            eqs[k].terms.push(LinTerm { comp, offset: sub3(targets[k].1, pos), coeff: c });
        }
    }
    Ok(eqs)
}

fn derivative_system<T: FieldValue>(params: [T; 4], zero: T) -> Result<DerivativeSystem<T>> {
    let [a, b, c, d] = params.clone();
    let mut iso = IsotropicHex::new(a, c, d, b)?;
    let mut equations: Vec<Option<LinEquation<T>>> = vec![None; 8];
    for n in 0..2 {
        for eq in cube_equations(&mut iso, n, &zero)? {
            let t = eq.target;
            equations[t] = Some(eq);
        }
    }
    Ok(DerivativeSystem { params, equations: equations.into_iter().map(|e| e.unwrap()).collect() })
}

fn check_positive(p: &[BigRational; 4]) -> Result<()> {
    if p.iter().any(|x| !x.is_positive()) {
        return Err(Error::Domain("isotropic parameters must be positive".into()));
    }
    Ok(())
}

/// Derivative system at the isotropic solution with `A0 = a, B0 = b, A1 = c, A2 = d`.
pub fn hexahedron_derivative_system(params: &[BigRational; 4]) -> Result<DerivativeSystem<BigRational>> {
    check_positive(params)?;
    derivative_system(params.clone(), BigRational::zero())
}

pub fn hexahedron_derivative_system_real(params: &[Real; 4]) -> Result<DerivativeSystem<Real>> {
    if params.iter().any(|x| !x.is_positive()) {
        return Err(Error::Domain("isotropic parameters must be positive".into()));
    }
    derivative_system(params.clone(), Real::zero())
}

/// Derivative system built from the cube at base level `n`, for periodicity checks.
pub fn derivative_equations_at_level(params: &[BigRational; 4], n: usize) -> Result<Vec<LinEquation<BigRational>>> {
    check_positive(params)?;
    let mut iso = IsotropicHex::new(params[0].clone(), params[2].clone(), params[3].clone(), params[1].clone())?;
    cube_equations(&mut iso, n, &BigRational::zero())
}

/// Variables `x, y, z` (and `X, Y, Z` for recentred forms) in a fresh table.
#[derive(Clone, Debug)]
pub struct Vars {
    pub table: VarTable,
    pub xyz: [u32; 3],
    pub big: [u32; 3],
}

impl Vars {
    pub fn new() -> Self {
        let table = VarTable::new();
        let xyz = [table.named("x"), table.named("y"), table.named("z")];
        let big = [table.named("X"), table.named("Y"), table.named("Z")];
        Vars { table, xyz, big }
    }

    pub fn parse(&self, s: &str) -> Result<LaurentPoly> {
        LaurentPoly::parse(&self.table, s)
    }

    fn shift(&self, off: [i32; 3]) -> Monomial {
        Monomial::from_pairs((0..3).map(|i| (self.xyz[i], off[i])))
    }
}

impl Default for Vars {
    fn default() -> Self {
        Vars::new()
    }
}

impl DerivativeSystem<BigRational> {
    /// The matrix `M` of the generating-function system `F = M F + I_0`.
    pub fn matrix(&self, vars: &Vars) -> Vec<Vec<LaurentPoly>> {
        let mut m = vec![vec![LaurentPoly::zero(&vars.table); 8]; 8];
        for eq in &self.equations {
            for t in &eq.terms {
                let term = LaurentPoly::term(&vars.table, vars.shift(t.offset), t.coeff.clone());
                m[eq.target][t.comp] = m[eq.target][t.comp].add(&term).unwrap();
            }
        }
        m
    }

    /// Single-component recurrence on vertices, when the vertex equations
    /// ignore the faces and agree across parities.
    pub fn vertex_subsystem(&self) -> Result<LinearSystem> {
        let (g, h) = (&self.equations[0], &self.equations[1]);
        let strip = |eq: &LinEquation<BigRational>| -> Result<Vec<(usize, [i32; 3], BigRational)>> {
            if eq.terms.iter().any(|t| t.comp >= 2) {
                return Err(Error::Hypothesis("vertex equation depends on faces".into()));
            }
            let mut v: Vec<_> = eq.terms.iter().map(|t| (0usize, t.offset, t.coeff.clone())).collect();
            v.sort_by(|a, b| a.1.cmp(&b.1));
            Ok(v)
        };
        let (sg, sh) = (strip(g)?, strip(h)?);
        if sg != sh {
            return Err(Error::Hypothesis("vertex equations differ between parities".into()));
        }
        LinearSystem::new(vec!["g".into()], vec![0], vec![None], vec![sg])
    }
}

/// `det(I - M)` by expansion over column subsets.
pub fn characteristic_matrix_det(system: &DerivativeSystem<BigRational>, vars: &Vars) -> Result<LaurentPoly> {
    let m = system.matrix(vars);
    let n = m.len();
    let one = LaurentPoly::one(&vars.table);
    let a: Vec<Vec<LaurentPoly>> = (0..n).map(|i| (0..n).map(|j| if i == j { one.sub(&m[i][j]) } else { Ok(m[i][j].neg()) }).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
    determinant_poly(&a, &vars.table)
}

/// Determinant of a small square matrix of Laurent polynomials.
pub fn determinant_poly(a: &[Vec<LaurentPoly>], table: &VarTable) -> Result<LaurentPoly> {
    let n = a.len();
    let mut f: HashMap<u32, LaurentPoly> = HashMap::from([(0u32, LaurentPoly::one(table))]);
    for (row, r) in a.iter().enumerate() {
        let mut next: HashMap<u32, LaurentPoly> = HashMap::new();
        for (mask, val) in &f {
            for (c, entry) in r.iter().enumerate() {
                if mask >> c & 1 == 1 || entry.is_zero() {
                    continue;
                }
                let above = (mask >> (c + 1)).count_ones();
                let mut t = val.mul(entry)?;
                if above % 2 == 1 {
                    t = t.neg();
                }
                let slot = next.entry(mask | 1 << c).or_insert_with(|| LaurentPoly::zero(table));
                *slot = slot.add(&t)?;
            }
        }
        debug_assert!(next.keys().all(|m| m.count_ones() as usize == row + 1));
        f = next;
    }
    Ok(f.remove(&((1u32 << n) - 1)).unwrap_or_else(|| LaurentPoly::zero(table)))
}

/// `C1 = a b^3 c d`.
pub fn c1(a: &BigRational, b: &BigRational, c: &BigRational, d: &BigRational) -> BigRational {
    a * b.pow(3) * c * d
}

/// `C2 = b^6 + c^6 + 3 a c^4 d + 3 a^2 c^2 d^2 + 2 a b^3 c d + 2 b^3 c^3 + a^3 d^3`.
pub fn c2(a: &BigRational, b: &BigRational, c: &BigRational, d: &BigRational) -> BigRational {
    let k = |n: i64| BigRational::from_integer(BigInt::from(n));
    b.pow(6) + c.pow(6) + k(3) * a * c.pow(4) * d + k(3) * a.pow(2) * c.pow(2) * d.pow(2) + k(2) * a * b.pow(3) * c * d + k(2) * b.pow(3) * c.pow(3) + a.pow(3) * d.pow(3)
}

/// The factor `P1` of `det(I - M)` in closed form.
pub fn p1_closed_form(params: &[BigRational; 4], vars: &Vars) -> Result<LaurentPoly> {
    check_positive(params)?;
    let [a, b, c, d] = params;
    let (k1, k2) = (c1(a, b, c, d), c2(a, b, c, d));
    let p = vars.parse("x^2*y^2*z^2 - 1")?.scale(&(&k1 + &k2));
    let q = vars.parse("x^2*y^2 + x^2*z^2 + y^2*z^2 - x^2 - y^2 - z^2")?.scale(&k1);
    let r = vars.parse("x^2*y*z + x*y^2*z + x*y*z^2 - x*y - x*z - y*z")?.scale(&k2);
    p.sub(&q)?.sub(&r)
}

/// The coefficient `lambda` of `XYZ` in the normalized leading cubic.
pub fn lambda_parameter(params: &[BigRational; 4]) -> Result<BigRational> {
    check_positive(params)?;
    let [a, b, c, d] = params;
    let (k1, k2) = (c1(a, b, c, d), c2(a, b, c, d));
    let theta = &k1 / (&k1 + &k2);
    let two = BigRational::from_integer(2.into());
    let six = BigRational::from_integer(6.into());
    Ok((two + six * &theta) / (BigRational::one() - theta))
}

pub fn lambda_parameter_real(params: &[Real; 4]) -> Result<Real> {
    if params.iter().any(|x| !x.is_positive()) {
        return Err(Error::Domain("isotropic parameters must be positive".into()));
    }
    let [a, b, c, d] = params;
    let b3 = b.powi(3);
    let k1 = &(&(a * &b3) * c) * d;
    let k = |n: i64| Real::from_i64(n);
    let k2 = b.powi(6) + c.powi(6) + k(3) * a.clone() * c.powi(4) * d.clone() + k(3) * a.powi(2) * c.powi(2) * d.powi(2) + k(2) * k1.clone() + k(2) * b3.clone() * c.powi(3) + a.powi(3) * d.powi(3);
    let theta = &k1 / &(&k1 + &k2);
    Ok(&(k(2) + k(6) * theta.clone()) / &(Real::one() - theta))
}

/// `X^2 Y + X^2 Z + Y^2 X + Y^2 Z + Z^2 X + Z^2 Y + lambda XYZ`.
pub fn lambda_form(lambda: &BigRational, vars: &Vars) -> Result<LaurentPoly> {
    let s = vars.parse("X^2*Y + X^2*Z + Y^2*X + Y^2*Z + Z^2*X + Z^2*Y")?;
    s.add(&vars.parse("X*Y*Z")?.scale(lambda))
}

/// Lowest-degree homogeneous part of `h` after `x_i = center_i (1 + X_i)`.
pub fn leading_homogeneous_part(h: &LaurentPoly, vars: &Vars, center: [&BigRational; 3]) -> Result<(i64, LaurentPoly)> {
    let at: HashMap<u32, BigRational> = (0..3).map(|i| (vars.xyz[i], center[i].clone())).collect();
    if !Zero::is_zero(&h.eval(&at)?) {
        return Err(Error::Domain("polynomial does not vanish at the centre".into()));
    }
    // clear negative powers, which multiplies the leading part by a nonzero constant
    let lift = Monomial::from_pairs((0..3).map(|i| (vars.xyz[i], -h.degree_range(vars.xyz[i]).map_or(0, |r| r.0.min(0)))));
    let mut p = h.mul_monomial(&lift, &BigRational::one());
    for i in 0..3 {
        let c = LaurentPoly::constant(&vars.table, center[i].clone());
        let img = c.add(&LaurentPoly::term(&vars.table, Monomial::var(vars.big[i], 1), center[i].clone()))?;
        p = p.substitute(vars.xyz[i], &img)?;
    }
    let d = p.terms().map(|(m, _)| m.total_degree()).min().ok_or_else(|| Error::Domain("polynomial is identically zero".into()))?;
    Ok((d, p.homogeneous_part(d)))
}

/// A constant-coefficient linear recurrence on several components over `Z^3`.
///
/// Equation `i` computes component `i` at `w` as the sum of
/// `coeff * f_comp(w - offset)`. A component with level offset 1 sits one
/// level above its lattice position, which fixes the evaluation order.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub names: Vec<String>,
    pub level_offset: Vec<i32>,
    pub parity: Vec<Option<i32>>,
    pub equations: Vec<Vec<(usize, [i32; 3], BigRational)>>,
}

impl LinearSystem {
    pub fn new(names: Vec<String>, level_offset: Vec<i32>, parity: Vec<Option<i32>>, equations: Vec<Vec<(usize, [i32; 3], BigRational)>>) -> Result<Self> {
        let n = names.len();
        if level_offset.len() != n || parity.len() != n || equations.len() != n {
            return Err(Error::Domain("component lists differ in length".into()));
        }
        for (t, eq) in equations.iter().enumerate() {
            for (s, off, _) in eq {
                let lift = off.iter().sum::<i32>() + level_offset[t] - level_offset[*s];
                if lift < 0 || (lift == 0 && *s >= t) {
                    return Err(Error::Hypothesis(format!("equation for {} is not causal", names[t])));
                }
            }
        }
        Ok(LinearSystem { names, level_offset, parity, equations })
    }

    /// `g(w) = -sum_{m != 0} (h_m / h_0) g(w - m)` from a characteristic polynomial.
    pub fn from_characteristic(h: &LaurentPoly, vars: &Vars) -> Result<Self> {
        let h0 = h.coeff(&Monomial::one());
        if Zero::is_zero(&h0) {
            return Err(Error::Domain("characteristic polynomial has no constant term".into()));
        }
        let mut eq = Vec::new();
        for (m, c) in h.terms() {
            if m.is_one() {
                continue;
            }
            let off = [m.exponent(vars.xyz[0]), m.exponent(vars.xyz[1]), m.exponent(vars.xyz[2])];
            eq.push((0, off, -c / &h0));
        }
        LinearSystem::new(vec!["g".into()], vec![0], vec![None], vec![eq])
    }

    /// The eight-component system with faces one level above their corners.
    pub fn from_derivative(sys: &DerivativeSystem<BigRational>) -> Result<Self> {
        let names = COMPONENTS.iter().map(|s| s.to_string()).collect();
        let level_offset = vec![0, 0, 1, 1, 1, 1, 1, 1];
        let parity = vec![Some(1), Some(0), Some(1), Some(1), Some(1), Some(0), Some(0), Some(0)];
        let equations = sys.equations.iter().map(|e| e.terms.iter().map(|t| (t.comp, t.offset, t.coeff.clone())).collect()).collect();
        LinearSystem::new(names, level_offset, parity, equations)
    }
}

/// Exact solution of a [`LinearSystem`] with a unit seed and zero below level 0.
#[derive(Clone, Debug)]
pub struct GField {
    pub values: HashMap<(usize, [i32; 3]), BigRational>,
    pub seed: (usize, [i32; 3]),
    pub levels: i32,
    /// Lower bound on every coordinate; points below it are treated as zero.
    pub lo: i32,
}

impl GField {
    pub fn get(&self, comp: usize, p: [i32; 3]) -> BigRational {
        self.values.get(&(comp, p)).cloned().unwrap_or_else(BigRational::zero)
    }

    /// CSV rows `i,j,k,numerator,denominator,float` for one component on one level.
    pub fn slice_csv(&self, comp: usize, level: i32) -> String {
        let mut pts: Vec<_> = self.values.iter().filter(|((c, p), _)| *c == comp && p.iter().sum::<i32>() == level).collect();
        pts.sort_by_key(|((_, p), _)| *p);
        let mut s = String::from("i,j,k,numerator,denominator,float\n");
        for ((_, p), v) in pts {
            let _ = writeln!(s, "{},{},{},{},{},{:e}", p[0], p[1], p[2], v.numer(), v.denom(), v.to_f64().unwrap_or(f64::NAN));
        }
        s
    }
}

fn positions(level: i32, lo: i32) -> impl Iterator<Item = [i32; 3]> {
    (lo..=level - 2 * lo).flat_map(move |i| (lo..=level - i - lo).map(move |j| [i, j, level - i - j]))
}

pub fn g_field_iterate(sys: &LinearSystem, seed: (usize, [i32; 3]), levels: i32, lo: i32) -> Result<GField> {
    if seed.0 >= sys.names.len() || seed.1.iter().any(|&c| c < lo) {
        return Err(Error::Domain("seed outside the region".into()));
    }
    let mut values: HashMap<(usize, [i32; 3]), BigRational> = HashMap::new();
    values.insert(seed, BigRational::one());
    let start = seed.1.iter().sum::<i32>() + sys.level_offset[seed.0];
    for lvl in start..=levels {
        for (t, eq) in sys.equations.iter().enumerate() {
            let pl = lvl - sys.level_offset[t];
            if sys.parity[t].is_some_and(|p| pl.rem_euclid(2) != p) {
                continue;
            }
            for w in positions(pl, lo) {
                if (t, w) == seed {
                    continue;
                }
                let mut acc = BigRational::zero();
                for (s, off, c) in eq {
                    if let Some(v) = values.get(&(*s, sub3(w, *off))) {
                        acc += c * v;
                    }
                }
                if !Zero::is_zero(&acc) {
                    values.insert((t, w), acc);
                }
            }
        }
    }
    Ok(GField { values, seed, levels, lo })
}

/// Largest `|sum_m h_m g(w - m) - [w = seed]|` over vertices up to `levels`;
/// zero means the field has generating function `1 / h`.
pub fn convolution_residual(h: &LaurentPoly, vars: &Vars, field: &GField, levels: i32) -> BigRational {
    let terms: Vec<([i32; 3], BigRational)> = h.terms().map(|(m, c)| ([m.exponent(vars.xyz[0]), m.exponent(vars.xyz[1]), m.exponent(vars.xyz[2])], c.clone())).collect();
    let mut worst = BigRational::zero();
    for lvl in 0..=levels {
        for w in positions(lvl, field.lo) {
            let mut acc = BigRational::zero();
            for (off, c) in &terms {
                acc += c * field.get(0, sub3(w, *off));
            }
            if (0, w) == field.seed {
                acc -= BigRational::one();
            }
            if acc.abs() > worst {
                worst = acc.abs();
            }
        }
    }
    worst
}

/// Lattice point on level `n` nearest to `n * dir`, rounding by largest remainder.
pub fn nearest_point(dir: [f64; 3], n: i32) -> [i32; 3] {
    let s: f64 = dir.iter().sum();
    let target: Vec<f64> = dir.iter().map(|d| d / s * n as f64).collect();
    let mut p: Vec<i32> = target.iter().map(|t| t.floor() as i32).collect();
    let mut rem: Vec<(f64, usize)> = (0..3).map(|i| (target[i] - p[i] as f64, i)).collect();
    rem.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let missing = n - p.iter().sum::<i32>();
    for &(_, i) in rem.iter().take(missing.max(0) as usize) {
        p[i] += 1;
    }
    [p[0], p[1], p[2]]
}

/// `(n, g)` along the ray through `dir`, one point per level in `range`.
pub fn decay_profile(field: &GField, comp: usize, dir: [f64; 3], range: std::ops::RangeInclusive<i32>) -> Vec<(i32, f64)> {
    range.map(|n| (n, field.get(comp, nearest_point(dir, n)).to_f64().unwrap_or(0.0))).collect()
}

fn ln_abs(q: &BigRational) -> Option<f64> {
    if Zero::is_zero(q) {
        return None;
    }
    let bits = |n: &BigInt| n.bits() as i64;
    // shift both parts into f64 range before taking logarithms
    let (n, d) = (q.numer().abs(), q.denom().clone());
    let (sn, sd) = ((bits(&n) - 1000).max(0), (bits(&d) - 1000).max(0));
    let nf = (n >> sn as usize).to_f64()?;
    let df = (d >> sd as usize).to_f64()?;
    Some(nf.ln() - df.ln() + (sn - sd) as f64 * std::f64::consts::LN_2)
}

/// `(n, ln|g|)` along the ray through `dir`, interpolating `ln|g|` linearly
/// over the lattice triangle of level `n` that contains `n * dir`.
pub fn log_profile(field: &GField, comp: usize, dir: [f64; 3], range: std::ops::RangeInclusive<i32>) -> Option<Vec<(i32, f64)>> {
    let s: f64 = dir.iter().sum();
    range
        .map(|n| {
            let t = [dir[0] / s * n as f64, dir[1] / s * n as f64];
            let (i0, j0) = (t[0].floor() as i32, t[1].floor() as i32);
            let (fi, fj) = (t[0] - i0 as f64, t[1] - j0 as f64);
            let pt = |i: i32, j: i32| ln_abs(&field.get(comp, [i, j, n - i - j]));
            let v = if fi + fj <= 1.0 {
                (1.0 - fi - fj) * pt(i0, j0)? + fi * pt(i0 + 1, j0)? + fj * pt(i0, j0 + 1)?
            } else {
                (fi + fj - 1.0) * pt(i0 + 1, j0 + 1)? + (1.0 - fi) * pt(i0, j0 + 1)? + (1.0 - fj) * pt(i0 + 1, j0)?
            };
            Some((n, v))
        })
        .collect()
}

/// Least-squares line through `(x, y)`: slope, intercept and `R^2`.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

type C = Complex<Real>;

fn c_real(x: Real) -> C {
    Complex::new(x, Real::zero())
}

fn c_abs(z: &C) -> Real {
    (&(&z.re * &z.re) + &(&z.im * &z.im)).sqrt()
}

fn c_sqrt(z: &C) -> C {
    let r = c_abs(z);
    let two = Real::from_i64(2);
    let re = (&(&r + &z.re) / &two).sqrt();
    let mut im = (&(&r - &z.re) / &two).sqrt();
    if z.im.is_negative() {
        im = -im;
    }
    Complex::new(re, im)
}

fn c_pow(z: &C, e: i32) -> C {
    let mut out = c_real(Real::one());
    for _ in 0..e.unsigned_abs() {
        out = out * z.clone();
    }
    if e < 0 {
        c_real(Real::one()) / out
    } else {
        out
    }
}

fn c_expi(t: &Real) -> C {
    Complex::new(t.cos(), t.sin())
}

/// All complex roots of `sum c_k t^k` (low to high).
pub fn poly_roots(coeffs: &[C]) -> Vec<C> {
    let mut c: Vec<C> = coeffs.to_vec();
    while c.last().is_some_and(|x| Zero::is_zero(&x.re) && Zero::is_zero(&x.im)) {
        c.pop();
    }
    let deg = c.len().saturating_sub(1);
    match deg {
        0 => Vec::new(),
        1 => vec![-c[0].clone() / c[1].clone()],
        2 => {
            let (a, b, cc) = (c[2].clone(), c[1].clone(), c[0].clone());
            let disc = c_sqrt(&(b.clone() * b.clone() - c_real(Real::from_i64(4)) * a.clone() * cc.clone()));
            // the stable pair: one root from the larger denominator, the other by Vieta
            let q1 = -(b.clone() + disc.clone());
            let q2 = -(b - disc);
            let q = if c_abs(&q1) >= c_abs(&q2) { q1 } else { q2 };
            let two = c_real(Real::from_i64(2));
            if Zero::is_zero(&c_abs(&q)) {
                return vec![c_real(Real::zero()), c_real(Real::zero())];
            }
            vec![q.clone() / (two.clone() * a), two * cc / q]
        }
        _ => durand_kerner(&c),
    }
}

fn durand_kerner(c: &[C]) -> Vec<C> {
    let deg = c.len() - 1;
    let lead = c[deg].clone();
    let monic: Vec<C> = c.iter().map(|x| x.clone() / lead.clone()).collect();
    let eval = |z: &C| monic.iter().rev().fold(c_real(Real::zero()), |acc, k| acc * z.clone() + k.clone());
    let seed = Complex::new(Real::parse("0.4").unwrap(), Real::parse("0.9").unwrap());
    let mut roots: Vec<C> = (0..deg).map(|k| c_pow(&seed, k as i32)).collect();
    let tol = Real::parse("1e-70").unwrap();
    for _ in 0..2000 {
        let mut worst = Real::zero();
        for i in 0..deg {
            let mut den = c_real(Real::one());
            for j in 0..deg {
                if i != j {
                    den = den * (roots[i].clone() - roots[j].clone());
                }
            }
            let step = eval(&roots[i]) / den;
            let s = c_abs(&step);
            if s > worst {
                worst = s;
            }
            roots[i] = roots[i].clone() - step;
        }
        if worst < tol {
            break;
        }
    }
    roots
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceKind {
    /// Dual curve of the tangent cone at a singular torus point.
    Boundary,
    /// Logarithmic gradient at a smooth torus point.
    Interior,
}

#[derive(Clone, Debug)]
pub struct ArcticPoint {
    pub alpha: f64,
    pub beta: f64,
    /// Unnormalized real direction.
    pub dir: [Real; 3],
    pub theta: [f64; 2],
    pub kind: TraceKind,
}

impl ArcticPoint {
    pub fn gamma(&self) -> f64 {
        1.0 - self.alpha - self.beta
    }

    /// Distance from the centre of the simplex, in barycentric coordinates.
    pub fn radius(&self) -> f64 {
        let t = 1.0 / 3.0;
        ((self.alpha - t).powi(2) + (self.beta - t).powi(2) + (self.gamma() - t).powi(2)).sqrt()
    }

    /// Coordinates `(a, b)` of `(a : b : 1)`, from the exact direction.
    pub fn chart(&self) -> Option<(Real, Real)> {
        if Zero::is_zero(&self.dir[2]) {
            return None;
        }
        Some((&self.dir[0] / &self.dir[2], &self.dir[1] / &self.dir[2]))
    }
}

#[derive(Clone, Debug, Default)]
pub struct ArcticTrace {
    pub points: Vec<ArcticPoint>,
    /// Singular points of the zero set on the unit torus.
    pub singular: Vec<[i32; 3]>,
}

impl ArcticTrace {
    pub fn boundary(&self) -> impl Iterator<Item = &ArcticPoint> {
        self.points.iter().filter(|p| p.kind == TraceKind::Boundary)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("alpha,beta,theta1,theta2,kind\n");
        for p in &self.points {
            let _ = writeln!(s, "{},{},{},{},{}", p.alpha, p.beta, p.theta[0], p.theta[1], if p.kind == TraceKind::Boundary { "boundary" } else { "interior" });
        }
        s
    }
}

fn direction_point(v: [Real; 3], theta: [f64; 2], kind: TraceKind) -> Option<ArcticPoint> {
    let s = &(&v[0] + &v[1]) + &v[2];
    let scale = v.iter().map(|x| x.abs()).fold(Real::zero(), |a, b| if b > a { b } else { a });
    if Zero::is_zero(&scale) || (&s.abs() / &scale) < Real::parse("1e-30").unwrap() {
        return None;
    }
    let alpha = (&v[0] / &s).to_f64();
    let beta = (&v[1] / &s).to_f64();
    Some(ArcticPoint { alpha, beta, dir: v, theta, kind })
}

/// Real coefficients of `h` in `x, y, z` as `(exponents, value)`.
fn real_terms(h: &LaurentPoly, vars: &Vars) -> Vec<([i32; 3], Real)> {
    h.terms().map(|(m, c)| ([m.exponent(vars.xyz[0]), m.exponent(vars.xyz[1]), m.exponent(vars.xyz[2])], Real::from_rational(c))).collect()
}

/// Samples the arctic boundary of `1 / h` and the logarithmic gradients of
/// its smooth torus zeros on a `grid x grid` mesh.
pub fn arctic_trace(h: &LaurentPoly, vars: &Vars, grid: usize) -> Result<ArcticTrace> {
    if h.variables().iter().any(|v| !vars.xyz.contains(v)) {
        return Err(Error::Domain("polynomial must be in x, y, z only".into()));
    }
    if grid < 4 {
        return Err(Error::Domain("grid must have at least 4 samples".into()));
    }
    let mut trace = ArcticTrace::default();
    // singular torus points among the real sign patterns
    let one = BigRational::one();
    for s in 0..8 {
        let sp: [i32; 3] = std::array::from_fn(|i| if s >> i & 1 == 1 { -1 } else { 1 });
        let c: [BigRational; 3] = sp.map(|x| BigRational::from_integer(x.into()));
        let Ok((deg, cone)) = leading_homogeneous_part(h, vars, [&c[0], &c[1], &c[2]]) else { continue };
        if deg < 2 {
            continue;
        }
        trace.singular.push(sp);
        let _ = &one;
        trace.points.extend(dual_of_cone(&cone, vars, grid)?);
    }
    // smooth zeros on the torus
    let terms = real_terms(h, vars);
    let zmin = terms.iter().map(|t| t.0[2]).min().unwrap_or(0);
    let zmax = terms.iter().map(|t| t.0[2]).max().unwrap_or(0);
    let pi = Real::pi();
    let on_torus = Real::parse("1e-30").unwrap();
    let real_tol = Real::parse("1e-20").unwrap();
    for i in 0..grid {
        for j in 0..grid {
            // offset by half a cell so the mesh avoids the singular points
            let th = |k: usize| &(&pi * &Real::from_f64((2.0 * k as f64 + 1.0) / grid as f64)) - &pi;
            let (t1, t2) = (th(i), th(j));
            let (x, y) = (c_expi(&t1), c_expi(&t2));
            let mut coeffs = vec![c_real(Real::zero()); (zmax - zmin + 1) as usize];
            for (e, c) in &terms {
                let k = (e[2] - zmin) as usize;
                coeffs[k] = coeffs[k].clone() + c_pow(&x, e[0]) * c_pow(&y, e[1]) * c_real(c.clone());
            }
            for z in poly_roots(&coeffs) {
                if (&c_abs(&z) - &Real::one()).abs() > on_torus {
                    continue;
                }
                let pt = [x.clone(), y.clone(), z];
                let mut g: [C; 3] = std::array::from_fn(|_| c_real(Real::zero()));
                for (e, c) in &terms {
                    let mono = c_pow(&pt[0], e[0]) * c_pow(&pt[1], e[1]) * c_pow(&pt[2], e[2]) * c_real(c.clone());
                    for k in 0..3 {
                        g[k] = g[k].clone() + mono.clone() * c_real(Real::from_i64(e[k] as i64));
                    }
                }
                let big = (0..3).max_by(|&a, &b| c_abs(&g[a]).partial_cmp(&c_abs(&g[b])).unwrap()).unwrap();
                let norm = g[big].clone();
                if c_abs(&norm) < real_tol {
                    continue;
                }
                let v: Vec<C> = g.iter().map(|x| x.clone() / norm.clone()).collect();
                if v.iter().any(|x| x.im.abs() > real_tol) {
                    continue;
                }
                let dir = [v[0].re.clone(), v[1].re.clone(), v[2].re.clone()];
                if let Some(p) = direction_point(dir, [t1.to_f64(), t2.to_f64()], TraceKind::Interior) {
                    trace.points.push(p);
                }
            }
        }
    }
    if trace.points.is_empty() {
        return Err(Error::Domain("zero set does not meet the unit torus".into()));
    }
    Ok(trace)
}

/// Dual points `grad(cone)` along the real projective curve `cone = 0`.
fn dual_of_cone(cone: &LaurentPoly, vars: &Vars, grid: usize) -> Result<Vec<ArcticPoint>> {
    let terms: Vec<([i32; 3], Real)> = cone.terms().map(|(m, c)| ([m.exponent(vars.big[0]), m.exponent(vars.big[1]), m.exponent(vars.big[2])], Real::from_rational(c))).collect();
    let deg = terms.iter().map(|t| t.0[2]).max().unwrap_or(0) as usize;
    let pi = Real::pi();
    let real_tol = Real::parse("1e-40").unwrap();
    let mut out = Vec::new();
    for s in 0..grid {
        let phi = &(&pi * &Real::from_f64(s as f64 + 0.5)) / &Real::from_i64(grid as i64);
        let (cx, cy) = (phi.cos(), phi.sin());
        let mut coeffs = vec![c_real(Real::zero()); deg + 1];
        for (e, c) in &terms {
            let k = e[2] as usize;
            coeffs[k] = coeffs[k].clone() + c_real(&(c * &cx.powi(e[0] as i64)) * &cy.powi(e[1] as i64));
        }
        for r in poly_roots(&coeffs) {
            if r.im.abs() > real_tol {
                continue;
            }
            let p = [cx.clone(), cy.clone(), r.re.clone()];
            let mut g = [Real::zero(), Real::zero(), Real::zero()];
            for (e, c) in &terms {
                for k in 0..3 {
                    if e[k] == 0 {
                        continue;
                    }
                    let mut t = c * &Real::from_i64(e[k] as i64);
                    for (m, pm) in p.iter().enumerate() {
                        t = &t * &pm.powi((e[m] - (m == k) as i32) as i64);
                    }
                    g[k] = &g[k] + &t;
                }
            }
            if let Some(pt) = direction_point(g, [phi.to_f64(), r.re.to_f64()], TraceKind::Boundary) {
                out.push(pt);
            }
        }
    }
    Ok(out)
}

/// The degree-six dual curve of the worked example, in the chart `(a : b : 1)`.
pub fn worked_example_dual_sextic(table: &VarTable) -> Result<LaurentPoly> {
    LaurentPoly::parse(
        table,
        "923521 + 5125974*b*a - 3044572*a*b^2 - 2085370*a*b^5 - 3044572*b^3*a - 3044572*a^2*b + 45167*a^2*b^4 \
         + 5125974*b^4*a + 6191514*a^2*b^2 + 2233364*b^3*a^3 + 45167*a^4*b^2 - 3044572*a^2*b^3 - 2085370*a^5*b \
         - 3044572*a^3*b + 5125974*a^4*b - 3044572*b^2*a^3 - 2085370*a - 2085370*b + 45167*a^2 + 45167*b^2 \
         + 45167*b^4 + 2233364*b^3 + 2233364*a^3 - 2085370*b^5 + 45167*a^4 - 2085370*a^5 + 923521*b^6 + 923521*a^6",
    )
}

/// Evaluates a polynomial in named variables `a`, `b` at reals.
pub fn eval_ab(p: &LaurentPoly, a: &Real, b: &Real) -> Result<Real> {
    let table = p.table().clone();
    let (va, vb) = (table.named("a"), table.named("b"));
    let mut acc = Real::zero();
    for (m, c) in p.terms() {
        let mut t = Real::from_rational(c);
        for (v, e) in m.iter() {
            let x = if v == va {
                a
            } else if v == vb {
                b
            } else {
                return Err(Error::Domain("unexpected variable".into()));
            };
            t = &t * &x.powi(e as i64);
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

/// Generating-function denominator of the integer-point recurrence at `lambda = 3`.
pub fn cube_characteristic(vars: &Vars) -> Result<LaurentPoly> {
    vars.parse("1 + x*y*z - 1/3*x - 1/3*y - 1/3*z - 1/3*x*y - 1/3*x*z - 1/3*y*z")
}
