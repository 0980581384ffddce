//! Homogeneity of translation-invariant algebraic recurrences.
//!
//! A recurrence is `sum_a c_a prod_{w in E_a} f(v + w) = 0`. With respect to a
//! height functional `l` it has a degree of homogeneity, an isotropic solution
//! `f(v) = gamma^{l(v)^delta}`, and a linear recurrence for logarithmic
//! derivatives whose characteristic polynomial drives the limit shape.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, Monomial, VarTable};
use crate::real::Real;

/// One term `c * prod_{w in E} f(v + w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecTerm {
    pub coeff: BigRational,
    pub vectors: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgRecurrence {
    pub terms: Vec<RecTerm>,
    pub ell: Vec<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomDegree {
    /// Terms have different sizes.
    NotHomogeneous,
    Finite(u32),
    /// Every power sum agrees, e.g. a recurrence with a single term.
    Infinite,
}

impl fmt::Display for HomDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomDegree::NotHomogeneous => f.write_str("-1"),
            HomDegree::Finite(d) => write!(f, "{d}"),
            HomDegree::Infinite => f.write_str("inf"),
        }
    }
}

impl AlgRecurrence {
    pub fn new(terms: Vec<RecTerm>, ell: Vec<i64>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Domain("recurrence has no terms".into()));
        }
        let d = ell.len();
        for t in &terms {
            if t.vectors.is_empty() {
                return Err(Error::Domain("empty multiset E".into()));
            }
            if t.vectors.iter().any(|w| w.len() != d) {
                return Err(Error::Domain("vector dimension differs from the functional".into()));
            }
        }
        Ok(AlgRecurrence { terms, ell })
    }

    pub fn dim(&self) -> usize {
        self.ell.len()
    }

    /// `a(1)a(23) - a(2)a(13) - a(3)a(12)` with `l = j + k`.
    pub fn octahedron() -> Self {
        let t = |c: i64, a: [i64; 3], b: [i64; 3]| RecTerm { coeff: BigRational::from_integer(c.into()), vectors: vec![a.to_vec(), b.to_vec()] };
        AlgRecurrence::new(
            vec![t(1, [1, 0, 0], [0, 1, 1]), t(-1, [0, 1, 0], [1, 0, 1]), t(-1, [0, 0, 1], [1, 1, 0])],
            vec![0, 1, 1],
        )
        .unwrap()
    }

    /// `g g(123) - g(1)g(23) - g(2)g(13) - g(3)g(12)` with `l = i + j + k`.
    pub fn cube() -> Self {
        let t = |c: i64, a: [i64; 3], b: [i64; 3]| RecTerm { coeff: BigRational::from_integer(c.into()), vectors: vec![a.to_vec(), b.to_vec()] };
        AlgRecurrence::new(
            vec![
                t(1, [0, 0, 0], [1, 1, 1]),
                t(-1, [1, 0, 0], [0, 1, 1]),
                t(-1, [0, 1, 0], [1, 0, 1]),
                t(-1, [0, 0, 1], [1, 1, 0]),
            ],
            vec![1, 1, 1],
        )
        .unwrap()
    }

    fn heights(&self, t: &RecTerm) -> Vec<i64> {
        t.vectors.iter().map(|w| w.iter().zip(&self.ell).map(|(a, b)| a * b).sum()).collect()
    }

    fn power_sum(&self, t: &RecTerm, j: u32) -> BigInt {
        self.heights(t).into_iter().map(|h| num_traits::pow(BigInt::from(h), j as usize)).sum()
    }

    /// Degree of homogeneity and the common power sums `beta_0..beta_delta`.
    pub fn homogeneity_degree(&self) -> (HomDegree, Vec<BigInt>) {
        let max_len = self.terms.iter().map(|t| t.vectors.len()).max().unwrap_or(0) as u32;
        let mut betas = Vec::new();
        // Power sums 0..=n of a multiset of size n determine it, so agreement
        // past max_len means the height multisets coincide.
        for j in 0..=max_len + 1 {
            let first = self.power_sum(&self.terms[0], j);
            if self.terms.iter().any(|t| self.power_sum(t, j) != first) {
                return match j {
                    0 => (HomDegree::NotHomogeneous, betas),
                    _ => (HomDegree::Finite(j - 1), betas),
                };
            }
            betas.push(first);
        }
        (HomDegree::Infinite, betas)
    }

    /// `l(alpha) = sum_{w in E_alpha} l(w)^delta` for every term.
    pub fn class_exponents(&self, delta: u32) -> Vec<BigInt> {
        self.terms.iter().map(|t| self.power_sum(t, delta)).collect()
    }

    /// Parses the one-term-per-line text format `c : (w1)(w2)...`. A line
    /// `ell : (l1,...,ld)` sets the functional; otherwise `default_ell` is used.
    pub fn parse(text: &str, default_ell: Option<Vec<i64>>) -> Result<Self> {
        let mut terms = Vec::new();
        let mut ell = default_ell;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("line {}: expected \"c : (w)...\"", n + 1)))?;
            let vecs = parse_vectors(rhs).map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
            if lhs.trim().eq_ignore_ascii_case("ell") || lhs.trim() == "l" {
                ell = Some(vecs.into_iter().next().ok_or_else(|| Error::Parse("empty functional".into()))?);
                continue;
            }
            let coeff = crate::laurent::parse_rational(lhs.trim())?;
            terms.push(RecTerm { coeff, vectors: vecs });
        }
        let ell = ell.ok_or_else(|| Error::Parse("no functional given (add a line \"ell : (...)\")".into()))?;
        AlgRecurrence::new(terms, ell)
    }
}

fn parse_vectors(s: &str) -> std::result::Result<Vec<Vec<i64>>, String> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let open = rest.strip_prefix('(').ok_or_else(|| format!("expected '(' at {rest:?}"))?;
        let close = open.find(')').ok_or("unclosed '('")?;
        let v: std::result::Result<Vec<i64>, _> = open[..close].split(',').map(|x| x.trim().parse::<i64>()).collect();
        out.push(v.map_err(|e| e.to_string())?);
        rest = open[close + 1..].trim_start();
    }
    if out.is_empty() {
        return Err("no vectors".into());
    }
    Ok(out)
}

/// The isotropic base `gamma` with its defining polynomial.
#[derive(Clone, Debug)]
pub struct Gamma {
    /// Exponent `delta` in `f(v) = gamma^{l(v)^delta}`.
    pub delta: u32,
    pub value: Real,
    /// `sum_k coeffs[k] * u^k = 0` where `u = gamma^step`.
    pub poly: Vec<BigRational>,
    pub step: u32,
    /// `u` itself when it is rational.
    pub u_exact: Option<BigRational>,
    /// Smallest class exponent, shifted out of the polynomial.
    pub base_exponent: BigInt,
}

impl Gamma {
    /// Pretty form of the defining polynomial in `gamma`.
    pub fn defining_polynomial(&self) -> String {
        let mut parts = Vec::new();
        for (k, c) in self.poly.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let e = &self.base_exponent + BigInt::from(k as u64 * self.step as u64);
            parts.push(match c.to_string().as_str() {
                "1" => format!("gamma^{e}"),
                "-1" => format!("-gamma^{e}"),
                c => format!("{c}*gamma^{e}"),
            });
        }
        format!("{} = 0", parts.join(" + ").replace("+ -", "- "))
    }
}

/// Positive root of `sum_a c_a gamma^{l(a)} = 0` for `l(a)` built with exponent `delta + 1`.
pub fn isotropic_gamma(r: &AlgRecurrence) -> Result<Gamma> {
    let delta = match r.homogeneity_degree().0 {
        HomDegree::NotHomogeneous => 0,
        HomDegree::Finite(d) => d + 1,
        HomDegree::Infinite => return Err(Error::Hypothesis("recurrence is homogeneous to every degree".into())),
    };
    let ls = r.class_exponents(delta);
    let mut classes: BTreeMap<BigInt, BigRational> = BTreeMap::new();
    for (t, l) in r.terms.iter().zip(&ls) {
        *classes.entry(l.clone()).or_insert_with(BigRational::zero) += &t.coeff;
    }
    classes.retain(|_, c| !c.is_zero());
    if classes.len() < 2 {
        return Err(Error::Hypothesis("fewer than two classes with nonzero coefficient sum".into()));
    }
    let base = classes.keys().next().unwrap().clone();
    let step = classes.keys().fold(BigInt::zero(), |g, k| g.gcd(&(k - &base)));
    let step_u = step.to_u32().ok_or_else(|| Error::Domain("exponent gap too large".into()))?;
    let deg = ((classes.keys().last().unwrap() - &base) / &step).to_usize().unwrap();
    let mut poly = vec![BigRational::zero(); deg + 1];
    for (k, c) in &classes {
        poly[((k - &base) / &step).to_usize().unwrap()] = c.clone();
    }
    let (u, u_exact) = largest_positive_root(&poly)?;
    let value = u.powf(&(Real::one() / Real::from_i64(step_u as i64)));
    Ok(Gamma { delta, value, poly, step: step_u, u_exact, base_exponent: base })
}

fn eval_real(poly: &[BigRational], x: &Real) -> Real {
    let mut acc = Real::zero();
    for c in poly.iter().rev() {
        acc = acc * x.clone() + Real::from_rational(c);
    }
    acc
}

/// Largest positive root of a rational polynomial, exact when rational.
fn largest_positive_root(poly: &[BigRational]) -> Result<(Real, Option<BigRational>)> {
    // Rational candidates first: a linear or binomial-with-square-free case
    // covers every recurrence with two classes.
    let nz: Vec<usize> = (0..poly.len()).filter(|&k| !poly[k].is_zero()).collect();
    if nz.len() == 2 && nz[0] == 0 && nz[1] == 1 {
        let u = -&poly[0] / &poly[1];
        if u.is_positive() {
            return Ok((Real::from_rational(&u), Some(u)));
        }
        return Err(Error::NoPositiveRoot);
    }
    // Cauchy bound, scan for sign changes from the top, then bisect.
    let lead = poly.last().unwrap().abs();
    let bound = poly.iter().map(|c| c.abs() / &lead).fold(BigRational::zero(), |a, b| if b > a { b } else { a }) + BigRational::one();
    let hi = bound.to_f64().unwrap_or(1e300);
    let f = |x: f64| poly.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(0.0));
    let n = 20_000;
    let mut bracket = None;
    for i in (0..n).rev() {
        let a = hi * i as f64 / n as f64;
        let b = hi * (i + 1) as f64 / n as f64;
        if a <= 0.0 {
            break;
        }
        if f(a) == 0.0 {
            bracket = Some((a, a));
            break;
        }
        if f(a).signum() != f(b).signum() {
            bracket = Some((a, b));
            break;
        }
    }
    let (a, b) = bracket.ok_or(Error::NoPositiveRoot)?;
    let mut lo = Real::from_f64(a);
    let mut hi = Real::from_f64(b);
    let flo = eval_real(poly, &lo);
    for _ in 0..crate::real::precision() + 8 {
        let mid = (&lo + &hi) / Real::from_i64(2);
        let fm = eval_real(poly, &mid);
        if fm.is_zero() {
            lo = mid.clone();
            hi = mid;
            break;
        }
        if fm.is_negative() == flo.is_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = (&lo + &hi) / Real::from_i64(2);
    Ok((root, None))
}

/// Linear recurrence `sum_w b_w g(v + w) = 0` for logarithmic derivatives.
#[derive(Clone, Debug)]
pub struct DerivedLinearRec {
    pub gamma: Gamma,
    /// Normalised `c'_alpha`, one per term.
    pub term_coeffs: Vec<Real>,
    /// Exact `c'_alpha` when `gamma^step` is rational, scaled to coprime integers.
    pub term_coeffs_exact: Option<Vec<BigRational>>,
    /// Coefficient per distinct vector of the multiset union `E`.
    pub coeffs: BTreeMap<Vec<i64>, Real>,
    pub coeffs_exact: Option<BTreeMap<Vec<i64>, BigRational>>,
    pub dim: usize,
}

/// `c'_alpha = c_alpha gamma^{l(alpha)}`, normalised.
///
/// Exact coefficients are scaled to coprime integers with the highest class
/// positive; numeric ones are divided by the first nonzero class sum.
pub fn derivative_recurrence(r: &AlgRecurrence) -> Result<DerivedLinearRec> {
    let gamma = isotropic_gamma(r)?;
    let ls = r.class_exponents(gamma.delta);
    let exps: Vec<BigInt> = ls.iter().map(|l| (l - &gamma.base_exponent) / BigInt::from(gamma.step)).collect();
    let rem_ok = ls.iter().all(|l| ((l - &gamma.base_exponent) % BigInt::from(gamma.step)).is_zero());
    debug_assert!(rem_ok);

    let exact = gamma.u_exact.as_ref().map(|u| {
        let mut c: Vec<BigRational> = r
            .terms
            .iter()
            .zip(&exps)
            .map(|(t, e)| &t.coeff * u.pow(e.to_i32().unwrap()))
            .collect();
        let top = exps.iter().enumerate().max_by_key(|(_, e)| (*e).clone()).map(|(i, _)| i).unwrap();
        normalise_exact(&mut c, top);
        c
    });

    let numeric: Vec<Real> = match &exact {
        Some(c) => c.iter().map(Real::from_rational).collect(),
        None => {
            let u = gamma.value.powi(gamma.step as i64);
            let raw: Vec<Real> = r
                .terms
                .iter()
                .zip(&exps)
                .map(|(t, e)| Real::from_rational(&t.coeff) * u.powi(e.to_i64().unwrap()))
                .collect();
            let mut sums: BTreeMap<BigInt, Real> = BTreeMap::new();
            for (c, l) in raw.iter().zip(&ls) {
                let s = sums.entry(l.clone()).or_insert_with(Real::zero);
                *s = &*s + c;
            }
            let first = sums.values().find(|s| !s.is_zero()).cloned().unwrap_or_else(Real::one);
            raw.into_iter().map(|c| c / first.clone()).collect()
        }
    };

    let mut coeffs: BTreeMap<Vec<i64>, Real> = BTreeMap::new();
    for (t, c) in r.terms.iter().zip(&numeric) {
        for w in &t.vectors {
            let e = coeffs.entry(w.clone()).or_insert_with(Real::zero);
            *e = &*e + c;
        }
    }
    let coeffs_exact = exact.as_ref().map(|ex| {
        let mut m: BTreeMap<Vec<i64>, BigRational> = BTreeMap::new();
        for (t, c) in r.terms.iter().zip(ex) {
            for w in &t.vectors {
                *m.entry(w.clone()).or_insert_with(BigRational::zero) += c;
            }
        }
        m.retain(|_, c| !c.is_zero());
        m
    });
    Ok(DerivedLinearRec { gamma, term_coeffs: numeric, term_coeffs_exact: exact, coeffs, coeffs_exact, dim: r.dim() })
}

fn normalise_exact(c: &mut [BigRational], top: usize) {
    let den = c.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints: Vec<BigInt> = c.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    let sign = if ints[top].is_negative() { -BigInt::one() } else { BigInt::one() };
    for (slot, x) in c.iter_mut().zip(ints) {
        *slot = BigRational::from_integer(x * &sign / &g);
    }
}

/// Variable names `x, y, z` for `d <= 3`, otherwise `x1..xd`.
pub fn coordinate_names(d: usize) -> Vec<String> {
    if d <= 3 {
        ["x", "y", "z"][..d].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=d).map(|i| format!("x{i}")).collect()
    }
}

/// `H = sum_w b_w x^w` over the given table.
pub fn characteristic_polynomial(dlr: &DerivedLinearRec, table: &VarTable) -> Result<LaurentPoly> {
    let exact = dlr
        .coeffs_exact
        .as_ref()
        .ok_or_else(|| Error::Domain("coefficients are irrational; use the numeric coefficients".into()))?;
    let names = coordinate_names(dlr.dim);
    let ids: Vec<u32> = names.iter().map(|n| table.named(n)).collect();
    let terms = exact.iter().map(|(w, c)| {
        let m = Monomial::from_pairs(ids.iter().zip(w).map(|(&i, &e)| (i, e as i32)));
        (m, c.clone())
    });
    Ok(LaurentPoly::from_terms(table, terms))
}

/// Residual of the recurrence for `f(v) = gamma^{q(l(v))}` at `v`, relative to
/// the largest term.
pub fn isotropic_residual(r: &AlgRecurrence, gamma: &Real, q: &[i64], v: &[i64]) -> Real {
    let lv = |w: &[i64]| -> i64 { w.iter().zip(v).zip(&r.ell).map(|((a, b), l)| (a + b) * l).sum() };
    let qeval = |x: i64| -> i64 { q.iter().rev().fold(0i64, |acc, c| acc * x + c) };
    let ln_g = gamma.ln();
    let mut total = Real::zero();
    let mut scale = Real::zero();
    for t in &r.terms {
        let e: i64 = t.vectors.iter().map(|w| qeval(lv(w))).sum();
        let term = Real::from_rational(&t.coeff) * (ln_g.clone() * Real::from_i64(e)).exp();
        if term.abs() > scale {
            scale = term.abs();
        }
        total = total + term;
    }
    total.abs() / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> Real {
        Real::parse("1e-40").unwrap()
    }

    #[test]
    fn octahedron_degree_and_gamma() {
        let r = AlgRecurrence::octahedron();
        let (d, betas) = r.homogeneity_degree();
        assert_eq!(d, HomDegree::Finite(1));
        assert_eq!(betas, vec![BigInt::from(2), BigInt::from(2)]);
        let g = isotropic_gamma(&r).unwrap();
        assert!(g.value.rel_diff(&Real::from_i64(2).sqrt()) < tol());
        assert_eq!(g.defining_polynomial(), "gamma^4 - 2*gamma^2 = 0");
    }

    #[test]
    fn octahedron_characteristic_polynomial() {
        let r = AlgRecurrence::octahedron();
        let dlr = derivative_recurrence(&r).unwrap();
        let ex = dlr.term_coeffs_exact.clone().unwrap();
        assert_eq!(ex, vec![BigRational::from_integer(2.into()), BigRational::from_integer((-1).into()), BigRational::from_integer((-1).into())]);
        let t = VarTable::new();
        let h = characteristic_polynomial(&dlr, &t).unwrap();
        assert_eq!(h, LaurentPoly::parse(&t, "2*x + 2*y*z - y - z - x*z - x*y").unwrap());
    }

    #[test]
    fn cube_characteristic_polynomial() {
        let r = AlgRecurrence::cube();
        assert_eq!(r.homogeneity_degree().0, HomDegree::Finite(1));
        let dlr = derivative_recurrence(&r).unwrap();
        let g = Real::from_i64(3).powf(&Real::parse("0.25").unwrap());
        assert!(dlr.gamma.value.rel_diff(&g) < tol());
        let t = VarTable::new();
        let h = characteristic_polynomial(&dlr, &t).unwrap();
        assert_eq!(h, LaurentPoly::parse(&t, "3*x*y*z + 3 - x - y - z - x*y - x*z - y*z").unwrap());
    }

    #[test]
    fn single_term_is_infinitely_homogeneous() {
        let r = AlgRecurrence::new(vec![RecTerm { coeff: BigRational::one(), vectors: vec![vec![1, 0], vec![0, 1]] }], vec![1, 1]).unwrap();
        assert_eq!(r.homogeneity_degree().0, HomDegree::Infinite);
        assert!(matches!(isotropic_gamma(&r), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn degenerate_single_class() {
        let r = AlgRecurrence::new(
            vec![
                RecTerm { coeff: BigRational::one(), vectors: vec![vec![0], vec![2]] },
                RecTerm { coeff: -BigRational::one(), vectors: vec![vec![1], vec![1]] },
                RecTerm { coeff: BigRational::one(), vectors: vec![vec![1], vec![1]] },
            ],
            vec![1],
        )
        .unwrap();
        assert!(matches!(isotropic_gamma(&r), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn parse_text_format() {
        let text = "ell : (0,1,1)\n1 : (1,0,0)(0,1,1)\n-1 : (0,1,0)(1,0,1)  # second\n-1 : (0,0,1)(1,1,0)\n";
        assert_eq!(AlgRecurrence::parse(text, None).unwrap(), AlgRecurrence::octahedron());
        assert!(AlgRecurrence::parse("1 : (1,0)", None).is_err());
        assert!(AlgRecurrence::parse("1 (1,0)", Some(vec![1, 1])).is_err());
    }

    #[test]
    fn numeric_gamma_for_three_classes() {
        // class exponents 0, 1, 4: gamma solves 1 + gamma - 3 gamma^4 = 0
        let r = AlgRecurrence::new(
            vec![
                RecTerm { coeff: BigRational::one(), vectors: vec![vec![0], vec![0]] },
                RecTerm { coeff: BigRational::one(), vectors: vec![vec![1], vec![0]] },
                RecTerm { coeff: BigRational::from_integer((-3).into()), vectors: vec![vec![2], vec![2]] },
            ],
            vec![1],
        )
        .unwrap();
        let dlr = derivative_recurrence(&r).unwrap();
        assert!(dlr.term_coeffs_exact.is_none());
        assert_eq!(dlr.gamma.delta, 1);
        for (q, v) in [([0, 1], 0i64), ([5, 1], 3), ([-2, 1], -2)] {
            assert!(isotropic_residual(&r, &dlr.gamma.value, &q, &[v]) < tol());
        }
    }

    #[test]
    fn scaling_coefficients_leaves_normalisation() {
        let mut r = AlgRecurrence::cube();
        for t in &mut r.terms {
            t.coeff *= BigRational::new((-7).into(), 2.into());
        }
        let a = derivative_recurrence(&r).unwrap();
        let b = derivative_recurrence(&AlgRecurrence::cube()).unwrap();
        assert_eq!(a.coeffs_exact, b.coeffs_exact);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn isotropic_solutions_solve_recurrence(c1 in -3i64..4, c0 in -3i64..4, v in prop::collection::vec(-6i64..6, 3), which in 0usize..2) {
            let r = if which == 0 { AlgRecurrence::octahedron() } else { AlgRecurrence::cube() };
            let g = isotropic_gamma(&r).unwrap();
            // monic quadratic q(x) = x^2 + c1 x + c0
            let q = [c0, c1, 1];
            prop_assert!(isotropic_residual(&r, &g.value, &q, &v) < tol());
        }
    }
}
