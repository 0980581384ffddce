//! Sparse multivariate Laurent polynomials with rational coefficients.
//!
//! Variables are small integer indices into a shared, append-only [`VarTable`]
//! whose entries are lattice labels or free-form names. Terms are kept in a
//! `BTreeMap` keyed by [`Monomial`] in lexicographic order, so equal polynomials
//! have identical storage. Exact division strips the monomial content of both
//! operands and runs ordinary long division by the lexicographic leading term.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::HalfLatticePoint;

static TERM_CAP: AtomicUsize = AtomicUsize::new(10_000_000);

/// Current cap on the number of terms any single product may produce.
pub fn term_cap() -> usize {
    TERM_CAP.load(AtomicOrdering::Relaxed)
}

pub fn set_term_cap(cap: usize) {
    TERM_CAP.store(cap.max(1), AtomicOrdering::Relaxed);
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarName {
    Point(HalfLatticePoint),
    Named(String),
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarName::Point(p) => write!(f, "{p}"),
            VarName::Named(s) => f.write_str(s),
        }
    }
}

impl VarName {
    /// Lattice labels are recognised first; anything else is a plain name.
    pub fn parse(s: &str) -> VarName {
        match s.parse::<HalfLatticePoint>() {
            Ok(p) => VarName::Point(p),
            Err(_) => VarName::Named(s.trim().to_string()),
        }
    }
}

#[derive(Default)]
struct TableInner {
    names: Vec<VarName>,
    index: HashMap<VarName, u32>,
}

/// Append-only bijection between variable indices and names.
#[derive(Clone, Default)]
pub struct VarTable {
    inner: Arc<RwLock<TableInner>>,
}

impl fmt::Debug for VarTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.inner.read().unwrap();
        f.debug_list().entries(g.names.iter().map(|n| n.to_string())).finish()
    }
}

impl VarTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Index of `name`, inserting it if new.
    pub fn var(&self, name: VarName) -> u32 {
        if let Some(&i) = self.inner.read().unwrap().index.get(&name) {
            return i;
        }
        let mut g = self.inner.write().unwrap();
        if let Some(&i) = g.index.get(&name) {
            return i;
        }
        let i = g.names.len() as u32;
        g.names.push(name.clone());
        g.index.insert(name, i);
        i
    }

    pub fn point(&self, p: HalfLatticePoint) -> u32 {
        self.var(VarName::Point(p))
    }

    pub fn named(&self, s: &str) -> u32 {
        self.var(VarName::Named(s.to_string()))
    }

    pub fn lookup(&self, name: &VarName) -> Option<u32> {
        self.inner.read().unwrap().index.get(name).copied()
    }

    pub fn name(&self, idx: u32) -> VarName {
        self.inner.read().unwrap().names[idx as usize].clone()
    }

    pub fn len(&self) -> usize {
        self.inner.read().unwrap().names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn same(&self, other: &VarTable) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }
}

/// A Laurent monomial: sorted `(variable, exponent)` pairs with nonzero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(u32, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: u32, e: i32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    /// Builds a monomial from arbitrary pairs, merging repeats and dropping zeros.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, i32)>) -> Self {
        let mut m: BTreeMap<u32, i32> = BTreeMap::new();
        for (v, e) in pairs {
            *m.entry(v).or_insert(0) += e;
        }
        Monomial(m.into_iter().filter(|&(_, e)| e != 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: u32) -> i32 {
        self.0
            .binary_search_by_key(&v, |&(x, _)| x)
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, i32)> + '_ {
        self.0.iter().copied()
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().map(|&(_, e)| e as i64).sum()
    }

    fn merge(&self, other: &Monomial, sign: i32) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match take {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b[j].0, sign * b[j].1));
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1 + sign * b[j].1;
                    if e != 0 {
                        out.push((a[i].0, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial(out)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        self.merge(other, 1)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        self.merge(other, -1)
    }

    pub fn inv(&self) -> Monomial {
        Monomial(self.0.iter().map(|&(v, e)| (v, -e)).collect())
    }

    pub fn pow(&self, k: i32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|&(v, e)| (v, e * k)).collect())
    }

    /// Componentwise minimum, with absent variables counting as exponent 0.
    pub fn meet(&self, other: &Monomial) -> Monomial {
        let mut keys: Vec<u32> = self.0.iter().chain(other.0.iter()).map(|p| p.0).collect();
        keys.sort_unstable();
        keys.dedup();
        Monomial(
            keys.into_iter()
                .map(|v| (v, self.exponent(v).min(other.exponent(v))))
                .filter(|&(_, e)| e != 0)
                .collect(),
        )
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&(_, e)| e >= 0)
    }

    /// Drops every variable in `vars`.
    pub fn without(&self, vars: &[u32]) -> Monomial {
        Monomial(self.0.iter().copied().filter(|(v, _)| !vars.contains(v)).collect())
    }
}

impl Ord for Monomial {
    /// Lexicographic on dense exponent vectors, smallest variable index most significant.
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(x), None) => return x.1.cmp(&0),
                (None, Some(y)) => return 0.cmp(&y.1),
                (Some(x), Some(y)) => match x.0.cmp(&y.0) {
                    Ordering::Less => return x.1.cmp(&0),
                    Ordering::Greater => return 0.cmp(&y.1),
                    Ordering::Equal => {
                        if x.1 != y.1 {
                            return x.1.cmp(&y.1);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str_radix(n.trim(), 10).map_err(|_| bad())?;
            let d = BigInt::from_str_radix(d.trim(), 10).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(BigInt::from_str_radix(s, 10).map_err(|_| bad())?)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Sub,
    Mul,
}

/// Exact Laurent polynomial over the rationals.
#[derive(Clone)]
pub struct LaurentPoly {
    table: VarTable,
    terms: BTreeMap<Monomial, BigRational>,
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        self.table.same(&other.table) && self.terms == other.terms
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl LaurentPoly {
    pub fn zero(table: &VarTable) -> Self {
        LaurentPoly { table: table.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(table: &VarTable, c: BigRational) -> Self {
        Self::term(table, Monomial::one(), c)
    }

    pub fn one(table: &VarTable) -> Self {
        Self::constant(table, BigRational::one())
    }

    pub fn term(table: &VarTable, m: Monomial, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPoly { table: table.clone(), terms }
    }

    pub fn var(table: &VarTable, v: u32) -> Self {
        Self::term(table, Monomial::var(v, 1), BigRational::one())
    }

    pub fn named(table: &VarTable, name: &str) -> Self {
        Self::var(table, table.named(name))
    }

    pub fn point(table: &VarTable, p: HalfLatticePoint) -> Self {
        Self::var(table, table.point(p))
    }

    pub fn from_terms(table: &VarTable, terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut map: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        for (m, c) in terms {
            accumulate(&mut map, m, c);
        }
        LaurentPoly { table: table.clone(), terms: map }
    }

    pub fn table(&self) -> &VarTable {
        &self.table
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// The single term, if there is exactly one.
    pub fn as_monomial(&self) -> Option<(&Monomial, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    fn check(&self, other: &LaurentPoly) -> Result<()> {
        if self.table.same(&other.table) {
            Ok(())
        } else {
            Err(Error::VarTableMismatch)
        }
    }

    pub fn add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(&mut terms, m.clone(), c.clone());
        }
        Ok(LaurentPoly { table: self.table.clone(), terms })
    }

    pub fn sub(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(&mut terms, m.clone(), -c.clone());
        }
        Ok(LaurentPoly { table: self.table.clone(), terms })
    }

    pub fn mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check(other)?;
        let cap = term_cap();
        let mut acc: HashMap<Monomial, BigRational> =
            HashMap::with_capacity((self.len() * other.len()).min(1 << 20));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(x) => *x += c,
                    None => {
                        acc.insert(m, c);
                        if acc.len() > cap {
                            return Err(Error::TermCap { cap });
                        }
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(LaurentPoly { table: self.table.clone(), terms })
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> LaurentPoly {
        if k.is_zero() {
            return LaurentPoly::zero(&self.table);
        }
        LaurentPoly {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul_monomial(&self, mono: &Monomial, k: &BigRational) -> LaurentPoly {
        if k.is_zero() {
            return LaurentPoly::zero(&self.table);
        }
        LaurentPoly {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.mul(mono), c * k)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Result<LaurentPoly> {
        let mut out = LaurentPoly::one(&self.table);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// `lhs op rhs` for the three ring operations.
    pub fn arith(&self, other: &LaurentPoly, kind: ArithKind) -> Result<LaurentPoly> {
        match kind {
            ArithKind::Add => self.add(other),
            ArithKind::Sub => self.sub(other),
            ArithKind::Mul => self.mul(other),
        }
    }

    /// Componentwise minimum exponent over all terms.
    pub fn content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return Monomial::one() };
        it.fold(first.clone(), |acc, m| acc.meet(m))
    }

    /// Exact quotient; fails with the remainder when `den` does not divide `self`.
    pub fn div_exact(&self, den: &LaurentPoly) -> Result<LaurentPoly> {
        self.check(den)?;
        if den.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        if let Some((m, c)) = den.as_monomial() {
            return Ok(self.mul_monomial(&m.inv(), &c.recip()));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let (cn, cd) = (self.content(), den.content());
        let num = self.mul_monomial(&cn.inv(), &BigRational::one());
        let den = den.mul_monomial(&cd.inv(), &BigRational::one());
        let (lm, lc) = {
            let (m, c) = den.leading_term().unwrap();
            (m.clone(), c.clone())
        };
        let mut rem = num.terms;
        let mut quot: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        let mut leftover: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        while let Some((m, c)) = rem.pop_last() {
            let t = m.div(&lm);
            if !t.is_nonnegative() {
                leftover.insert(m, c);
                continue;
            }
            let k = &c / &lc;
            for (dm, dc) in den.terms.iter().rev().skip(1) {
                accumulate(&mut rem, dm.mul(&t), -(dc * &k));
            }
            quot.insert(t, k);
            if quot.len() > term_cap() {
                return Err(Error::TermCap { cap: term_cap() });
            }
        }
        if !leftover.is_empty() {
            let r = LaurentPoly { table: self.table.clone(), terms: leftover };
            return Err(Error::NonDivisible { remainder: Box::new(r.mul_monomial(&cn, &BigRational::one())) });
        }
        let q = LaurentPoly { table: self.table.clone(), terms: quot };
        Ok(q.mul_monomial(&cn.div(&cd), &BigRational::one()))
    }

    /// Exact value at a rational point.
    pub fn eval(&self, point: &HashMap<u32, BigRational>) -> Result<BigRational> {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.iter() {
                let x = point.get(&v).ok_or_else(|| Error::Unassigned(self.table.name(v).to_string()))?;
                if x.is_zero() {
                    if e < 0 {
                        return Err(Error::ZeroAtNegative(self.table.name(v).to_string()));
                    }
                    t = BigRational::zero();
                } else {
                    t *= x.pow(e);
                }
            }
            total += t;
        }
        Ok(total)
    }

    /// Value in any numeric type with a conversion for coefficients and variables.
    pub fn eval_with<T, C, V>(&self, coeff: C, value: V) -> Result<T>
    where
        T: Clone + Num,
        C: Fn(&BigRational) -> T,
        V: Fn(u32) -> Option<T>,
    {
        let mut cache: HashMap<u32, T> = HashMap::new();
        let mut total = T::zero();
        for (m, c) in &self.terms {
            let mut t = coeff(c);
            for (v, e) in m.iter() {
                let x = match cache.get(&v) {
                    Some(x) => x.clone(),
                    None => {
                        let x = value(v).ok_or_else(|| Error::Unassigned(self.table.name(v).to_string()))?;
                        cache.insert(v, x.clone());
                        x
                    }
                };
                if x.is_zero() && e < 0 {
                    return Err(Error::ZeroAtNegative(self.table.name(v).to_string()));
                }
                let mut p = T::one();
                for _ in 0..e.unsigned_abs() {
                    p = p * x.clone();
                }
                t = if e < 0 { t / p } else { t * p };
            }
            total = total + t;
        }
        Ok(total)
    }

    /// Replaces `var` by `image`.
    pub fn substitute(&self, var: u32, image: &LaurentPoly) -> Result<LaurentPoly> {
        self.check(image)?;
        let inverse = match image.as_monomial() {
            Some((m, c)) => Some(LaurentPoly::term(&self.table, m.inv(), c.recip())),
            None => None,
        };
        let mut powers: HashMap<i32, LaurentPoly> = HashMap::new();
        let mut out = LaurentPoly::zero(&self.table);
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e < 0 && inverse.is_none() {
                return Err(Error::NonInvertibleImage);
            }
            if !powers.contains_key(&e) {
                let base = if e < 0 { inverse.as_ref().unwrap() } else { image };
                powers.insert(e, base.pow(e.unsigned_abs())?);
            }
            let rest = m.without(&[var]);
            let t = powers[&e].mul_monomial(&rest, c);
            out = out.add(&t)?;
        }
        Ok(out)
    }

    /// Smallest and largest exponent of `var` over all terms.
    pub fn degree_range(&self, var: u32) -> Option<(i32, i32)> {
        let mut it = self.terms.keys().map(|m| m.exponent(var));
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), e| (lo.min(e), hi.max(e))))
    }

    /// Sum of the terms of total degree `d`.
    pub fn homogeneous_part(&self, d: i64) -> LaurentPoly {
        LaurentPoly {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.total_degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn variables(&self) -> Vec<u32> {
        let mut vs: Vec<u32> = self.terms.keys().flat_map(|m| m.iter().map(|p| p.0)).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .rev()
                .map(|(m, c)| {
                    let exps: serde_json::Map<String, Value> =
                        m.iter().map(|(v, e)| (self.table.name(v).to_string(), json!(e))).collect();
                    json!({ "coeff": c.to_string(), "exps": exps })
                })
                .collect(),
        )
    }

    pub fn from_json(table: &VarTable, v: &Value) -> Result<LaurentPoly> {
        let arr = v.as_array().ok_or_else(|| Error::Parse("expected an array of terms".into()))?;
        let mut terms = Vec::with_capacity(arr.len());
        for t in arr {
            let c = t
                .get("coeff")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Parse("term without \"coeff\" string".into()))?;
            let c = parse_rational(c)?;
            let exps = t
                .get("exps")
                .and_then(Value::as_object)
                .ok_or_else(|| Error::Parse("term without \"exps\" object".into()))?;
            let mut pairs = Vec::with_capacity(exps.len());
            for (k, e) in exps {
                let e = e.as_i64().ok_or_else(|| Error::Parse(format!("bad exponent for {k}")))?;
                pairs.push((table.var(VarName::parse(k)), e as i32));
            }
            terms.push((Monomial::from_pairs(pairs), c));
        }
        Ok(LaurentPoly::from_terms(table, terms))
    }

    /// Parses sums of products such as `3/2*x^2*y^-1 - z + 4`, with named variables.
    pub fn parse(table: &VarTable, s: &str) -> Result<LaurentPoly> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = cleaned.as_bytes();
        let mut pieces = Vec::new();
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' {
                pieces.push(&cleaned[start..i]);
                start = i;
            }
        }
        pieces.push(&cleaned[start..]);
        for piece in pieces {
            let (sign, body) = match piece.as_bytes()[0] {
                b'-' => (-1, &piece[1..]),
                b'+' => (1, &piece[1..]),
                _ => (1, piece),
            };
            let mut coeff = int(sign);
            let mut pairs = Vec::new();
            for factor in body.split('*') {
                if factor.is_empty() {
                    return Err(Error::Parse(format!("empty factor in {piece:?}")));
                }
                if factor.as_bytes()[0].is_ascii_digit() {
                    coeff *= parse_rational(factor)?;
                    continue;
                }
                let (name, e) = match factor.split_once('^') {
                    Some((n, e)) => (n, e.parse::<i32>().map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?),
                    None => (factor, 1),
                };
                let ident = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
                if !ident {
                    return Err(Error::Parse(format!("bad variable name {name:?}")));
                }
                pairs.push((table.named(name), e));
            }
            terms.push((Monomial::from_pairs(pairs), coeff));
        }
        Ok(LaurentPoly::from_terms(table, terms))
    }

    /// Rescales so the coefficients are coprime integers with a positive leading term.
    pub fn primitive(&self) -> LaurentPoly {
        use num_integer::Integer;
        if self.is_zero() {
            return self.clone();
        }
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
            num = num.gcd(c.numer());
        }
        let mut k = BigRational::new(den, num);
        if self.leading_term().unwrap().1.is_negative() {
            k = -k;
        }
        self.scale(&k)
    }
}

fn accumulate(map: &mut BTreeMap<Monomial, BigRational>, m: Monomial, c: BigRational) {
    if c.is_zero() {
        return;
    }
    match map.entry(m) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut parts: Vec<String> = Vec::new();
            if !a.is_one() || m.is_one() {
                parts.push(a.to_string());
            }
            for (v, e) in m.iter() {
                let name = match self.table.name(v) {
                    VarName::Point(p) => format!("A({p})"),
                    VarName::Named(s) => s,
                };
                parts.push(if e == 1 { name } else { format!("{name}^{e}") });
            }
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vars(names: &[&str]) -> (VarTable, Vec<LaurentPoly>) {
        let t = VarTable::new();
        let v = names.iter().map(|n| LaurentPoly::named(&t, n)).collect();
        (t, v)
    }

    #[test]
    fn cancellation_and_difference_of_squares() {
        let (_t, v) = vars(&["x", "y"]);
        let (x, y) = (&v[0], &v[1]);
        assert_eq!(x.add(y).unwrap().add(&x.neg()).unwrap(), *y);
        let d = x.add(y).unwrap().mul(&x.sub(y).unwrap()).unwrap();
        assert_eq!(d, x.pow(2).unwrap().sub(&y.pow(2).unwrap()).unwrap());
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn monomial_scaling() {
        let (t, v) = vars(&["a0", "a1", "a2", "a3", "a4"]);
        let num = v[1].mul(&v[2]).unwrap().add(&v[3].mul(&v[4]).unwrap()).unwrap();
        let inv = LaurentPoly::term(&t, Monomial::var(t.named("a0"), -1), int(1));
        let r = num.mul(&inv).unwrap();
        assert_eq!(r, LaurentPoly::parse(&t, "a1*a2*a0^-1 + a3*a4*a0^-1").unwrap());
        assert_eq!(r.to_string(), "a0^-1*a1*a2 + a0^-1*a3*a4");
    }

    #[test]
    fn mismatched_tables() {
        let (_t1, a) = vars(&["x"]);
        let (_t2, b) = vars(&["x"]);
        let e = a[0].add(&b[0]).unwrap_err();
        assert_eq!(e.to_string(), "variable-table mismatch");
    }

    #[test]
    fn exact_division() {
        let (t, v) = vars(&["x", "y"]);
        let (x, y) = (&v[0], &v[1]);
        let num = x.pow(2).unwrap().sub(&y.pow(2).unwrap()).unwrap();
        assert_eq!(num.div_exact(&x.sub(y).unwrap()).unwrap(), x.add(y).unwrap());
        let q = x.add(y).unwrap().div_exact(x).unwrap();
        assert_eq!(q, LaurentPoly::parse(&t, "1 + x^-1*y").unwrap());
        let one = LaurentPoly::one(&t);
        match x.add(&one).unwrap().div_exact(&y.add(&one).unwrap()) {
            Err(Error::NonDivisible { remainder }) => assert!(!remainder.is_zero()),
            other => panic!("expected non-divisible, got {other:?}"),
        }
        assert!(matches!(x.div_exact(&LaurentPoly::zero(&t)), Err(Error::ZeroDivisor)));
    }

    #[test]
    fn division_with_shifted_content() {
        let t = VarTable::new();
        let a = LaurentPoly::parse(&t, "x^-2*y + 3*x*y^-1 - 2").unwrap();
        let b = LaurentPoly::parse(&t, "x^3*z^-1 + y^2 + 1/2*x^-1").unwrap();
        let p = a.mul(&b).unwrap();
        assert_eq!(p.div_exact(&b).unwrap(), a);
        assert_eq!(p.div_exact(&a).unwrap(), b);
    }

    #[test]
    fn parse_rejects_malformed_names() {
        let t = VarTable::new();
        assert!(LaurentPoly::parse(&t, "2*(x + y)").is_err());
        assert!(LaurentPoly::parse(&t, "x*y.z").is_err());
        assert!(LaurentPoly::parse(&t, "a_1*b2^-3").is_ok());
    }

    #[test]
    fn evaluation() {
        let t = VarTable::new();
        let p = LaurentPoly::parse(&t, "x + x^-1").unwrap();
        let pt: HashMap<u32, BigRational> = [(t.named("x"), int(2))].into();
        assert_eq!(p.eval(&pt).unwrap(), rational(5, 2));
        let zero: HashMap<u32, BigRational> = [(t.named("x"), int(0))].into();
        assert!(matches!(p.eval(&zero), Err(Error::ZeroAtNegative(_))));
        let q = LaurentPoly::parse(&t, "y").unwrap();
        assert!(matches!(q.eval(&pt), Err(Error::Unassigned(_))));
        let w = LaurentPoly::parse(&t, "a4^2*a5*a6*a7*a0^-1*a1^-1*a2^-1*a3^-1").unwrap();
        let ones: HashMap<u32, BigRational> = w.variables().into_iter().map(|v| (v, int(1))).collect();
        assert_eq!(w.eval(&ones).unwrap(), int(1));
    }

    #[test]
    fn substitution() {
        let t = VarTable::new();
        let x = t.named("x");
        let p = LaurentPoly::parse(&t, "x^2 + y").unwrap();
        let img = LaurentPoly::parse(&t, "u + v").unwrap();
        assert_eq!(p.substitute(x, &img).unwrap(), LaurentPoly::parse(&t, "u^2 + 2*u*v + v^2 + y").unwrap());
        let p = LaurentPoly::parse(&t, "x^-1*y").unwrap();
        let img = LaurentPoly::parse(&t, "u*v").unwrap();
        assert_eq!(p.substitute(x, &img).unwrap(), LaurentPoly::parse(&t, "u^-1*v^-1*y").unwrap());
        let p = LaurentPoly::parse(&t, "x^-1").unwrap();
        let img = LaurentPoly::parse(&t, "u + v").unwrap();
        assert!(matches!(p.substitute(x, &img), Err(Error::NonInvertibleImage)));
    }

    #[test]
    fn json_round_trip_with_lattice_labels() {
        let t = VarTable::new();
        let f = LaurentPoly::point(&t, HalfLatticePoint::face([1, 0, 0], crate::lattice::Axis::X));
        let v = LaurentPoly::point(&t, HalfLatticePoint::vertex([0, 0, -1]));
        let p = f.mul(&v.pow(3).unwrap()).unwrap().sub(&LaurentPoly::constant(&t, rational(7, 3))).unwrap();
        let js = p.to_json();
        let s = js.to_string();
        assert!(s.contains("\"1,1/2,1/2\""), "{s}");
        assert!(s.contains("\"-7/3\""), "{s}");
        let back = LaurentPoly::from_json(&t, &js).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn term_cap_is_enforced() {
        let t = VarTable::new();
        let p = LaurentPoly::parse(&t, "a + b + c + d").unwrap();
        let q = LaurentPoly::parse(&t, "e + f + g + h").unwrap();
        let old = term_cap();
        set_term_cap(10);
        let r = p.mul(&q);
        set_term_cap(old);
        assert!(matches!(r, Err(Error::TermCap { cap: 10 })));
    }

    #[test]
    fn monomial_order_is_lexicographic() {
        let x = Monomial::var(0, 1);
        let y = Monomial::var(1, 1);
        assert!(x > y.pow(5));
        assert!(Monomial::one() > x.inv());
        assert!(x.mul(&y) > x);
        assert!(y.inv() < Monomial::one());
    }

    fn arb_poly(t: VarTable) -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec(((-2i32..3, -2i32..3, -1i32..2), -5i64..6, 1i64..4), 0..5).prop_map(move |ts| {
            LaurentPoly::from_terms(
                &t,
                ts.into_iter().map(|((a, b, c), n, d)| (Monomial::from_pairs([(0, a), (1, b), (2, c)]), rational(n, d))),
            )
        })
    }

    fn table3() -> VarTable {
        let t = VarTable::new();
        for n in ["x", "y", "z"] {
            t.named(n);
        }
        t
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_axioms((a, b, c) in {
            let t = table3();
            (arb_poly(t.clone()), arb_poly(t.clone()), arb_poly(t))
        }) {
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
            prop_assert!(a.mul(&b).unwrap().len() <= a.len() * b.len());
            prop_assert!(a.sub(&a).unwrap().is_zero());
        }

        #[test]
        fn div_inverts_mul((a, b) in {
            let t = table3();
            (arb_poly(t.clone()), arb_poly(t))
        }) {
            prop_assume!(!b.is_zero());
            let p = a.mul(&b).unwrap();
            prop_assert_eq!(p.div_exact(&b).unwrap(), a);
        }

        #[test]
        fn eval_is_a_homomorphism((a, b) in {
            let t = table3();
            (arb_poly(t.clone()), arb_poly(t))
        }, xs in prop::collection::vec((1i64..7, 1i64..5, prop::bool::ANY), 3)) {
            let pt: HashMap<u32, BigRational> = xs
                .iter()
                .enumerate()
                .map(|(i, &(n, d, s))| (i as u32, rational(if s { n } else { -n }, d)))
                .collect();
            let ab = a.mul(&b).unwrap();
            prop_assert_eq!(ab.eval(&pt).unwrap(), a.eval(&pt).unwrap() * b.eval(&pt).unwrap());
            let s = a.add(&b).unwrap();
            prop_assert_eq!(s.eval(&pt).unwrap(), a.eval(&pt).unwrap() + b.eval(&pt).unwrap());
        }
    }
}
