//! Taut double-dimer configurations on the associated graph of a stepped surface.
//!
//! A double-dimer configuration assigns each edge a multiplicity in `{0, 1, 2}`
//! so that every vertex meets total multiplicity two; legs are frozen at one.
//! It is taut when its multiplicity-one paths pair up the legs exactly as the
//! reference configuration of the full corner does.
//!
//! Enumeration is a frontier dynamic program over the edges in sweep order. The
//! state records, for every vertex still touching unprocessed edges, its degree
//! so far and, when it ends a partial path, the other end of that path. Since
//! the weight of a configuration factors over edges, whole polynomials and counts
//! can be accumulated without listing configurations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::lattice::HalfLatticePoint;
use crate::laurent::{LaurentPoly, Monomial, VarName, VarTable};
use crate::recurrence::{propagate_point, symbolic_field};
use crate::surface::{SteppedSolid, SurfaceGraph, Window};

/// Edge multiplicities on a [`SurfaceGraph`], with the number of closed loops.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DoubleDimerConfig {
    pub mult: Vec<u8>,
    pub loops: u32,
}

/// Doubled edges, closed loops and leg-to-leg paths of a configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub doubled: Vec<usize>,
    pub loops: Vec<Vec<usize>>,
    /// Each path as `(first leg, last leg, edges)`.
    pub paths: Vec<(usize, usize, Vec<usize>)>,
}

/// Leg pairing induced by a configuration next to the one required.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TautnessCertificate {
    pub pairing: Vec<usize>,
    pub reference: Vec<usize>,
}

impl TautnessCertificate {
    pub fn is_valid(&self) -> bool {
        self.pairing == self.reference
    }
}

impl DoubleDimerConfig {
    /// Degree of every vertex, legs included.
    pub fn degrees(&self, g: &SurfaceGraph) -> Vec<u32> {
        let mut deg: Vec<u32> = g.leg_of.iter().map(|l| l.is_some() as u32).collect();
        for (e, &m) in self.mult.iter().enumerate() {
            for v in g.edges[e].ends {
                deg[v] += m as u32;
            }
        }
        deg
    }

    pub fn validate(&self, g: &SurfaceGraph) -> Result<()> {
        if self.mult.len() != g.edges.len() || self.mult.iter().any(|&m| m > 2) {
            return Err(Error::Domain("multiplicities must be 0, 1 or 2 on every edge".into()));
        }
        if let Some(v) = self.degrees(g).iter().position(|&d| d != 2) {
            return Err(Error::Domain(format!("vertex {v} does not have degree two")));
        }
        let dec = self.decompose(g)?;
        if dec.loops.len() as u32 != self.loops {
            return Err(Error::Inconsistent("loop count disagrees with the configuration".into()));
        }
        Ok(())
    }

    /// Splits the multiplicity-one edges into loops and leg-to-leg paths.
    pub fn decompose(&self, g: &SurfaceGraph) -> Result<Decomposition> {
        let n = g.vertices.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut doubled = Vec::new();
        for (e, &m) in self.mult.iter().enumerate() {
            match m {
                1 => {
                    for v in g.edges[e].ends {
                        adj[v].push(e);
                    }
                }
                2 => doubled.push(e),
                _ => {}
            }
        }
        let other = |e: usize, v: usize| {
            let [a, b] = g.edges[e].ends;
            if a == v {
                b
            } else {
                a
            }
        };
        let mut used = vec![false; self.mult.len()];
        let mut paths = Vec::new();
        for (l, leg) in g.legs.iter().enumerate() {
            let start = leg.vertex;
            if adj[start].len() != 1 {
                return Err(Error::Domain(format!("leg vertex {start} is not a path end")));
            }
            if adj[start].iter().all(|&e| used[e]) {
                continue;
            }
            let mut edges = Vec::new();
            let mut v = start;
            let mut prev = usize::MAX;
            loop {
                let next = adj[v].iter().copied().find(|&e| e != prev);
                match next {
                    Some(e) if !used[e] => {
                        used[e] = true;
                        edges.push(e);
                        v = other(e, v);
                        prev = e;
                        if g.leg_of[v].is_some() {
                            break;
                        }
                    }
                    _ => return Err(Error::Domain("path does not end at a leg".into())),
                }
            }
            paths.push((l, g.leg_of[v].unwrap(), edges));
        }
        let mut loops = Vec::new();
        for e0 in 0..self.mult.len() {
            if self.mult[e0] != 1 || used[e0] {
                continue;
            }
            let mut cyc = vec![e0];
            used[e0] = true;
            let start = g.edges[e0].ends[0];
            let mut v = g.edges[e0].ends[1];
            let mut prev = e0;
            while v != start {
                let e = adj[v].iter().copied().find(|&e| e != prev).ok_or_else(|| Error::Domain("open path away from legs".into()))?;
                used[e] = true;
                cyc.push(e);
                v = other(e, v);
                prev = e;
            }
            loops.push(cyc);
        }
        Ok(Decomposition { doubled, loops, paths })
    }

    /// Pairing of legs by the configuration's paths.
    pub fn leg_pairing(&self, g: &SurfaceGraph) -> Result<Vec<usize>> {
        let mut pair = vec![usize::MAX; g.legs.len()];
        for (a, b, _) in self.decompose(g)?.paths {
            pair[a] = b;
            pair[b] = a;
        }
        Ok(pair)
    }

    /// Dimers along the face `f`, legs included.
    pub fn face_dimers(&self, g: &SurfaceGraph, f: &HalfLatticePoint) -> u32 {
        let inner: u32 = (0..g.edges.len()).filter(|&e| g.edge_faces(e).contains(f)).map(|e| self.mult[e] as u32).sum();
        inner + (0..g.legs.len()).filter(|&l| g.leg_faces(l).contains(f)).count() as u32
    }

    /// Canonical serialization: sorted `(edge, multiplicity)` pairs with nonzero multiplicity.
    pub fn to_json(&self, weight: Option<&LaurentPoly>) -> serde_json::Value {
        let edges: Vec<[usize; 2]> = self.mult.iter().enumerate().filter(|(_, &m)| m > 0).map(|(e, &m)| [e, m as usize]).collect();
        let mut v = serde_json::json!({ "edges": edges, "loops": self.loops });
        if let Some(w) = weight {
            v["weight"] = serde_json::Value::String(w.to_string());
        }
        v
    }
}

/// The local reference configuration: dual edges single, quad edges single at mid corners.
pub fn reference_config(g: &SurfaceGraph) -> DoubleDimerConfig {
    DoubleDimerConfig { mult: (0..g.edges.len()).map(|e| g.ref_mult(e)).collect(), loops: 0 }
}

/// Leg pairing of the corner's reference configuration, transported to the legs of `g`.
pub fn reference_pairing(g: &SurfaceGraph) -> Result<Vec<usize>> {
    let corner = SurfaceGraph::build(&SteppedSolid::corner(), g.window)?;
    let m0 = reference_config(&corner);
    let pair0 = m0.leg_pairing(&corner)?;
    let by_side: HashMap<_, usize> = g.legs.iter().enumerate().map(|(i, l)| (l.side, i)).collect();
    if corner.legs.len() != g.legs.len() {
        return Err(Error::WindowTooSmall { required: 3 });
    }
    let mut pair = vec![usize::MAX; g.legs.len()];
    for (i, l) in corner.legs.iter().enumerate() {
        let a = *by_side.get(&l.side).ok_or(Error::WindowTooSmall { required: 3 })?;
        let b = *by_side.get(&corner.legs[pair0[i]].side).ok_or(Error::WindowTooSmall { required: 3 })?;
        pair[a] = b;
    }
    Ok(pair)
}

pub fn certificate(g: &SurfaceGraph, m: &DoubleDimerConfig, reference: &[usize]) -> Result<TautnessCertificate> {
    Ok(TautnessCertificate { pairing: m.leg_pairing(g)?, reference: reference.to_vec() })
}

fn label_var(table: &VarTable, l: HalfLatticePoint) -> u32 {
    table.point(l)
}

/// Per-face exponent offset of the reference configuration.
fn base_monomial(g: &SurfaceGraph, table: &VarTable) -> Monomial {
    Monomial::from_pairs(g.face_labels().into_iter().map(|l| (label_var(table, l), g.ref_exponent(&l))))
}

/// Monomial contributed by edge `e` carrying multiplicity `m`.
fn edge_monomial(g: &SurfaceGraph, table: &VarTable, e: usize, m: u8) -> Monomial {
    let d = g.ref_mult(e) as i32 - m as i32;
    Monomial::from_pairs(g.edge_faces(e).into_iter().map(|l| (label_var(table, l), d)))
}

/// Weight `2^loops * prod A_f^(L(f) - 2 - d(m; f))` as a Laurent monomial,
/// with faces cut by the window held at their reference exponent.
pub fn config_weight(g: &SurfaceGraph, m: &DoubleDimerConfig, table: &VarTable) -> Result<LaurentPoly> {
    let mut mono = base_monomial(g, table);
    for (e, &x) in m.mult.iter().enumerate() {
        mono = mono.mul(&edge_monomial(g, table, e, x));
    }
    let p = LaurentPoly::term(table, mono, BigRational::from_integer(BigInt::from(1u64) << m.loops));
    check_weight_support(g, &p, table)?;
    Ok(p)
}

/// Rejects exponents on faces the window cuts, and on complete faces outside the initial data.
fn check_weight_support(g: &SurfaceGraph, p: &LaurentPoly, table: &VarTable) -> Result<()> {
    let initial = g.solid.initial_labels(&g.window);
    let mut seen = BTreeSet::new();
    for (m, _) in p.terms() {
        for (v, _) in m.iter() {
            seen.insert(v);
        }
    }
    for v in seen {
        let VarName::Point(l) = table.name(v) else { continue };
        if !g.face_complete(&l) {
            return Err(Error::WindowTooSmall { required: 3 });
        }
        if !initial.contains(&l) {
            return Err(Error::Inconsistent(format!("face {l} outside the initial data carries an exponent")));
        }
    }
    Ok(())
}

const DEG2: i32 = i32::MIN;

/// Frontier: `(vertex, code)` sorted by vertex, where `code` is the other end of
/// the vertex's partial path (`-1 - leg` for a leg) or [`DEG2`].
type State = Vec<(u32, i32)>;

struct Sweep<'a> {
    g: &'a SurfaceGraph,
    order: Vec<usize>,
    last: Vec<usize>,
    pair: Vec<usize>,
}

impl<'a> Sweep<'a> {
    fn new(g: &'a SurfaceGraph, pair: Vec<usize>) -> Self {
        let order = g.sweep_order();
        let mut last = vec![0; g.vertices.len()];
        for (i, &e) in order.iter().enumerate() {
            for v in g.edges[e].ends {
                last[v] = i;
            }
        }
        Sweep { g, order, last, pair }
    }

    fn get(&self, s: &State, v: usize) -> (u8, i32) {
        match s.binary_search_by_key(&(v as u32), |x| x.0) {
            Ok(i) if s[i].1 == DEG2 => (2, 0),
            Ok(i) => (1, s[i].1),
            Err(_) => match self.g.leg_of[v] {
                Some(l) => (1, -1 - l as i32),
                None => (0, 0),
            },
        }
    }

    fn set(s: &mut State, v: usize, code: i32) {
        match s.binary_search_by_key(&(v as u32), |x| x.0) {
            Ok(i) => s[i].1 = code,
            Err(i) => s.insert(i, (v as u32, code)),
        }
    }

    /// Applies multiplicity `m` to the `i`-th edge of the sweep; returns the new
    /// state and the number of loops closed.
    fn step(&self, s: &State, i: usize, m: u8) -> Option<(State, u32)> {
        let e = self.order[i];
        let [u, w] = self.g.edges[e].ends;
        let (du, cu) = self.get(s, u);
        let (dw, cw) = self.get(s, w);
        let mut t = s.clone();
        let mut loops = 0;
        match m {
            0 => {}
            2 => {
                if du != 0 || dw != 0 {
                    return None;
                }
                Self::set(&mut t, u, DEG2);
                Self::set(&mut t, w, DEG2);
            }
            _ => {
                if du == 2 || dw == 2 {
                    return None;
                }
                if du == 1 && dw == 1 && cu == w as i32 {
                    loops = 1;
                    Self::set(&mut t, u, DEG2);
                    Self::set(&mut t, w, DEG2);
                } else {
                    let eu = if du == 1 { cu } else { u as i32 };
                    let ew = if dw == 1 { cw } else { w as i32 };
                    if eu < 0 && ew < 0 && self.pair[(-1 - eu) as usize] != (-1 - ew) as usize {
                        return None;
                    }
                    Self::set(&mut t, u, if du == 1 { DEG2 } else { ew });
                    Self::set(&mut t, w, if dw == 1 { DEG2 } else { eu });
                    if du == 1 && eu >= 0 {
                        Self::set(&mut t, eu as usize, ew);
                    }
                    if dw == 1 && ew >= 0 {
                        Self::set(&mut t, ew as usize, eu);
                    }
                }
            }
        }
        for v in [u, w] {
            if self.last[v] == i {
                if self.get(&t, v).0 != 2 {
                    return None;
                }
                if let Ok(k) = t.binary_search_by_key(&(v as u32), |x| x.0) {
                    t.remove(k);
                }
            }
        }
        Some((t, loops))
    }

    /// Forward pass accumulating `V` per state.
    fn run<V: Clone>(&self, init: V, mut extend: impl FnMut(&V, usize, u8, u32) -> Result<V>, mut merge: impl FnMut(&mut V, V) -> Result<()>) -> Result<Option<V>> {
        let mut layer: HashMap<State, V> = HashMap::new();
        layer.insert(Vec::new(), init);
        for i in 0..self.order.len() {
            let mut next: HashMap<State, V> = HashMap::with_capacity(layer.len() * 2);
            for (s, v) in &layer {
                for m in 0..3u8 {
                    if let Some((t, loops)) = self.step(s, i, m) {
                        let x = extend(v, self.order[i], m, loops)?;
                        match next.get_mut(&t) {
                            Some(y) => merge(y, x)?,
                            None => {
                                next.insert(t, x);
                            }
                        }
                    }
                }
            }
            layer = next;
        }
        Ok(layer.remove(&Vec::new()))
    }
}

type Incoming = Vec<Vec<(usize, u8, u32)>>;

/// The whole transition graph, trimmed to states that reach the final state.
struct Layers {
    /// `incoming[i][t]`: transitions into state `t` after the `i`-th edge.
    incoming: Vec<Incoming>,
    /// `alive[i][s]` for the states before the `i`-th edge, plus the final layer.
    alive: Vec<Vec<bool>>,
    fin: Option<usize>,
}

impl Sweep<'_> {
    fn layers(&self) -> Layers {
        let mut index: HashMap<State, usize> = HashMap::from([(Vec::new(), 0)]);
        let mut incoming: Vec<Incoming> = Vec::new();
        let mut sizes = vec![1usize];
        for i in 0..self.order.len() {
            let mut idx: HashMap<State, usize> = HashMap::new();
            let mut inc: Incoming = Vec::new();
            for (s, &si) in &index {
                for m in 0..3u8 {
                    if let Some((t, loops)) = self.step(s, i, m) {
                        let n = idx.len();
                        let ti = *idx.entry(t).or_insert(n);
                        if ti == inc.len() {
                            inc.push(Vec::new());
                        }
                        inc[ti].push((si, m, loops));
                    }
                }
            }
            sizes.push(idx.len());
            index = idx;
            incoming.push(inc);
        }
        let fin = index.get(&Vec::new()).copied();
        let mut alive: Vec<Vec<bool>> = sizes.iter().map(|&n| vec![false; n]).collect();
        if let Some(f) = fin {
            alive[self.order.len()][f] = true;
            for i in (0..self.order.len()).rev() {
                for t in 0..incoming[i].len() {
                    if alive[i + 1][t] {
                        for &(s, _, _) in &incoming[i][t] {
                            alive[i][s] = true;
                        }
                    }
                }
            }
        }
        Layers { incoming, alive, fin }
    }
}

/// Number of taut configurations and their weighted count `sum 2^loops`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TautCount {
    pub configs: u128,
    pub weighted: u128,
}

fn overflow() -> Error {
    Error::Domain("count overflows 128 bits".into())
}

pub fn taut_count(g: &SurfaceGraph) -> Result<TautCount> {
    let sweep = Sweep::new(g, reference_pairing(g)?);
    let r = sweep.run(
        (1u128, 1u128),
        |&(c, w), _, _, loops| Ok((c, w.checked_shl(loops).filter(|x| x >> loops == w).ok_or_else(overflow)?)),
        |a, b| {
            a.0 = a.0.checked_add(b.0).ok_or_else(overflow)?;
            a.1 = a.1.checked_add(b.1).ok_or_else(overflow)?;
            Ok(())
        },
    )?;
    let (configs, weighted) = r.unwrap_or((0, 0));
    Ok(TautCount { configs, weighted })
}

/// Sum of the weights of all taut configurations as a Laurent polynomial.
pub fn taut_polynomial(g: &SurfaceGraph, table: &VarTable) -> Result<LaurentPoly> {
    let sweep = Sweep::new(g, reference_pairing(g)?);
    let mono: HashMap<(usize, u8), Monomial> = (0..g.edges.len()).flat_map(|e| (0..3u8).map(move |m| (e, m))).map(|(e, m)| ((e, m), edge_monomial(g, table, e, m))).collect();
    type Poly = HashMap<Monomial, u128>;
    let layers = sweep.layers();
    let mut cur: Vec<Option<Poly>> = vec![Some(Poly::from([(base_monomial(g, table), 1)]))];
    for (i, inc) in layers.incoming.iter().enumerate() {
        let e = sweep.order[i];
        let mut next: Vec<Option<Poly>> = vec![None; inc.len()];
        for (t, ins) in inc.iter().enumerate() {
            if !layers.alive[i + 1][t] {
                continue;
            }
            let mut acc = Poly::new();
            for &(s, m, loops) in ins {
                let Some(p) = &cur[s] else { continue };
                let f = &mono[&(e, m)];
                for (k, &c) in p {
                    let c = c.checked_shl(loops).ok_or_else(overflow)?;
                    let x = acc.entry(k.mul(f)).or_insert(0);
                    *x = x.checked_add(c).ok_or_else(overflow)?;
                }
            }
            next[t] = Some(acc);
        }
        cur = next;
    }
    let r = layers.fin.and_then(|f| cur[f].take());
    let terms = r.unwrap_or_default().into_iter().map(|(k, c)| (k, BigRational::from_integer(BigInt::from(c))));
    let p = LaurentPoly::from_terms(table, terms);
    check_weight_support(g, &p, table)?;
    Ok(p)
}

/// Every taut configuration, in canonical order.
pub fn enumerate_taut(g: &SurfaceGraph) -> Result<Vec<DoubleDimerConfig>> {
    let pair = reference_pairing(g)?;
    let sweep = Sweep::new(g, pair.clone());
    let layers = sweep.layers();
    let Some(fin) = layers.fin else {
        return Ok(Vec::new());
    };
    let incoming = layers.incoming;
    let mut out = Vec::new();
    let mut mult = vec![0u8; g.edges.len()];
    fn back(i: usize, s: usize, loops: u32, sweep: &Sweep, incoming: &[Vec<Vec<(usize, u8, u32)>>], mult: &mut [u8], out: &mut Vec<DoubleDimerConfig>) {
        if i == 0 {
            out.push(DoubleDimerConfig { mult: mult.to_vec(), loops });
            return;
        }
        for &(from, m, l) in &incoming[i - 1][s] {
            mult[sweep.order[i - 1]] = m;
            back(i - 1, from, loops + l, sweep, incoming, mult, out);
        }
        mult[sweep.order[i - 1]] = 0;
    }
    back(sweep.order.len(), fin, 0, &sweep, &incoming, &mut mult, &mut out);
    out.sort();
    for m in &out {
        if !certificate(g, m, &pair)?.is_valid() {
            return Err(Error::Inconsistent("enumerated configuration fails its certificate".into()));
        }
    }
    Ok(out)
}

/// Outcome of comparing taut configurations with symbolic propagation.
#[derive(Clone, Debug)]
pub struct BijectionReport {
    pub configs: usize,
    pub loops: usize,
    pub weighted_sum: BigInt,
    pub terms: usize,
    pub dimer_side: LaurentPoly,
    pub recurrence_side: LaurentPoly,
    pub mismatches: Vec<String>,
    pub window: Window,
}

impl BijectionReport {
    pub fn matches(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Builds the associated graph with a margin around the modified cubes,
/// widening the window once if a weight reaches its edge.
pub fn graph_with_margin(solid: &SteppedSolid, margin: i32, table: &VarTable) -> Result<(SurfaceGraph, LaurentPoly)> {
    let attempt = |m: i32| -> Result<(SurfaceGraph, LaurentPoly)> {
        let g = SurfaceGraph::build(solid, solid.default_window(m)?)?;
        let p = taut_polynomial(&g, table)?;
        Ok((g, p))
    };
    match attempt(margin) {
        Err(Error::WindowTooSmall { .. }) => attempt(margin + 1),
        r => r,
    }
}

/// Enumerates taut configurations of `solid` and compares their weights with
/// the apex value of the hexahedron recurrence.
pub fn verify_bijection(solid: &SteppedSolid, margin: i32) -> Result<BijectionReport> {
    let table = VarTable::new();
    let (g, poly) = graph_with_margin(solid, margin, &table)?;
    let configs = enumerate_taut(&g)?;
    let mut mismatches = Vec::new();
    let mut from_list: BTreeMap<String, BigRational> = BTreeMap::new();
    let mut listed = LaurentPoly::zero(&table);
    for m in &configs {
        let w = config_weight(&g, m, &table)?;
        listed = listed.add(&w)?;
        let (mono, c) = w.as_monomial().unwrap();
        *from_list.entry(format!("{mono:?}")).or_insert_with(|| BigRational::from_integer(0.into())) += c;
    }
    if listed != poly {
        mismatches.push("listed configurations disagree with the swept polynomial".into());
    }
    let mut field = symbolic_field(&table, solid.surface_labels(&g.window));
    let floor = g.window.lo.iter().sum::<i32>() - 3;
    let rec = propagate_point(&mut field, HalfLatticePoint::vertex([0, 0, 0]), floor)?;
    for (m, c) in poly.terms() {
        let r = rec.coeff(m);
        if &r != c {
            mismatches.push(format!("term {}: dimers {c}, recurrence {r}", LaurentPoly::term(&table, m.clone(), c.clone())));
        }
    }
    for (m, c) in rec.terms() {
        if poly.coeff(m) == BigRational::from_integer(0.into()) {
            mismatches.push(format!("term {} missing from the dimer side", LaurentPoly::term(&table, m.clone(), c.clone())));
        }
    }
    let weighted_sum = configs.iter().map(|m| BigInt::from(1u64) << m.loops).sum();
    Ok(BijectionReport {
        configs: configs.len(),
        loops: configs.iter().filter(|m| m.loops > 0).count(),
        weighted_sum,
        terms: poly.len(),
        dimer_side: poly,
        recurrence_side: rec,
        mismatches,
        window: g.window,
    })
}
