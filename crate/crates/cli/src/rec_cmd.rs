//! `propagate`, `expand` and `homogeneity`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use hexahedron::homogeneity::{characteristic_polynomial, derivative_recurrence, isotropic_gamma, AlgRecurrence, HomDegree};
use hexahedron::ising::apex_expansion;
use hexahedron::recurrence::{isotropic_closed_form_from_seeds, propagate as propagate_field, propagate_point, symbolic_field, IsotropicHex, LatticeField};
use hexahedron::surface::SteppedSolid;
use hexahedron::{HalfLatticePoint, LaurentPoly, VarTable};
use num_rational::BigRational;
use num_traits::Signed;
use serde_json::{json, Value};

use crate::{rational, read_input, split_list, usage, write_artifact, CliResult, Global, Report, SolidArgs};

#[derive(Args, Debug)]
pub struct PropagateArgs {
    /// Initial data as JSON: [{"point": "i,j,k", "value": "p/q"}, ...].
    #[arg(long, required_unless_present = "isotropic", conflicts_with = "isotropic")]
    input: Option<PathBuf>,
    /// Isotropic seeds A0,A1,A2,B0.
    #[arg(long)]
    isotropic: Option<String>,
    /// Highest level to compute.
    #[arg(long)]
    level: i32,
}

#[derive(Args, Debug)]
pub struct ExpandArgs {
    #[command(flatten)]
    solid: SolidArgs,
    /// Expand at this vertex from symbolic slab data on levels 0..2 instead.
    #[arg(long)]
    slab_apex: Option<String>,
}

#[derive(Args, Debug)]
pub struct HomogeneityArgs {
    /// `octahedron`, `cube`, or a file in the one-term-per-line format.
    recurrence: String,
    /// Linear functional, comma separated, if the file has no `ell` line.
    #[arg(long)]
    ell: Option<String>,
}

fn parse_field(text: &str) -> CliResult<LatticeField<BigRational>> {
    let v: Value = serde_json::from_str(text).map_err(|e| usage(format!("invalid JSON: {e}")))?;
    let items = v.as_array().ok_or_else(|| usage("initial data must be a JSON array"))?;
    let mut field = LatticeField::new();
    for item in items {
        let p = item.get("point").and_then(Value::as_str).ok_or_else(|| usage("each entry needs a string \"point\""))?;
        let p: HalfLatticePoint = p.parse().map_err(|e: hexahedron::Error| usage(e.to_string()))?;
        let value = match item.get("value") {
            Some(Value::String(s)) => rational(s)?,
            Some(Value::Number(n)) => rational(&n.to_string())?,
            _ => return Err(usage(format!("entry {p} needs a \"value\""))),
        };
        if field.contains(&p) {
            return Err(usage(format!("point {p} given twice")));
        }
        field.insert(p, value);
    }
    Ok(field)
}

fn field_json(points: &BTreeMap<(i32, HalfLatticePoint), BigRational>) -> Value {
    Value::Array(points.iter().map(|((_, p), v)| json!({ "point": p.to_string(), "value": v.to_string() })).collect())
}

pub fn propagate(g: &Global, a: &PropagateArgs) -> CliResult<Report> {
    if let Some(seeds) = &a.isotropic {
        return isotropic(g, seeds, a.level);
    }
    let field = parse_field(&read_input(a.input.as_ref().unwrap())?)?;
    let out = propagate_field(&field, a.level)?;
    let new: BTreeMap<(i32, HalfLatticePoint), BigRational> =
        out.iter().filter(|(p, _)| !field.contains(p)).map(|(p, v)| ((p.level(), *p), v.clone())).collect();
    let mut text = format!("{} new points up to level {}\n", new.len(), a.level);
    for ((_, p), v) in &new {
        let _ = writeln!(text, "{p:>16}  {v}");
    }
    let js = field_json(&new);
    write_artifact(g, "field.json", &serde_json::to_string_pretty(&js).unwrap())?;
    Ok(Report::new(text, js, true))
}

fn isotropic(g: &Global, seeds: &str, level: i32) -> CliResult<Report> {
    let s = split_list(seeds, Some(4), rational)?;
    if level < 0 {
        return Err(usage("--level must be non-negative"));
    }
    let n = level as usize;
    let mut iso = IsotropicHex::new(s[0].clone(), s[1].clone(), s[2].clone(), s[3].clone())?;
    iso.extend_to(n)?;
    let mut text = String::from("n  A_n  B_n\n");
    let mut rows = Vec::new();
    let mut ok = true;
    for k in 0..=n {
        let (an, bn) = (iso.a(k)?, iso.b(k)?);
        let closed = isotropic_closed_form_from_seeds(&s[0], &s[1], &s[2], &s[3], k as u32)?;
        let agree = closed == (an.clone(), bn.clone());
        ok &= agree;
        let _ = writeln!(text, "{k}  {an}  {bn}{}", if agree { "" } else { "  (closed form disagrees)" });
        rows.push(json!({ "n": k, "a": an.to_string(), "b": bn.to_string(), "closed_form_agrees": agree }));
    }
    let js = json!({ "seeds": s.iter().map(|x| x.to_string()).collect::<Vec<_>>(), "levels": rows, "ok": ok });
    write_artifact(g, "isotropic.json", &serde_json::to_string_pretty(&js).unwrap())?;
    Ok(Report::new(text, js, ok))
}

/// Symbolic apex value of a solid with one variable per surface label.
pub fn apex_value(solid: &SteppedSolid, margin: i32, table: &VarTable) -> hexahedron::Result<LaurentPoly> {
    let w = solid.default_window(margin)?;
    let mut field = symbolic_field(table, solid.surface_labels(&w));
    let floor = w.lo.iter().sum::<i32>() - 3;
    propagate_point(&mut field, HalfLatticePoint::vertex([0, 0, 0]), floor)
}

pub fn expand(g: &Global, a: &ExpandArgs) -> CliResult<Report> {
    let table = VarTable::new();
    let (what, poly) = match &a.slab_apex {
        Some(s) => {
            let v = split_list(s, Some(3), |x| x.parse::<i32>().map_err(|e| usage(e.to_string())))?;
            (format!("slab apex {s}"), apex_expansion([v[0], v[1], v[2]])?.0)
        }
        None => {
            let s = a.solid.solid()?;
            (format!("{} apex", a.solid.describe(&s)), apex_value(&s, g.margin, &table)?)
        }
    };
    let positive = poly.terms().all(|(_, c)| c.is_positive());
    let mut text = format!("{what}: {} terms, coefficients {}\n", poly.len(), if positive { "all positive" } else { "NOT all positive" });
    let _ = writeln!(text, "{poly}");
    let js = json!({ "terms": poly.len(), "positive": positive, "poly": poly.to_json() });
    write_artifact(g, "apex.json", &serde_json::to_string_pretty(&poly.to_json()).unwrap())?;
    Ok(Report::new(text, js, positive))
}

pub fn homogeneity(g: &Global, a: &HomogeneityArgs) -> CliResult<Report> {
    let ell = a.ell.as_deref().map(|s| split_list(s, None, |x| x.parse::<i64>().map_err(|e| usage(e.to_string())))).transpose()?;
    let r = match a.recurrence.as_str() {
        "octahedron" => AlgRecurrence::octahedron(),
        "cube" => AlgRecurrence::cube(),
        path => AlgRecurrence::parse(&read_input(&PathBuf::from(path))?, ell).map_err(|e| usage(e.to_string()))?,
    };
    let (deg, betas) = r.homogeneity_degree();
    let mut text = format!("homogeneity degree: {deg}\n");
    let mut js = json!({ "degree": deg.to_string(), "betas": betas.iter().map(|b| b.to_string()).collect::<Vec<_>>() });
    if !matches!(deg, HomDegree::Finite(_)) {
        return Ok(Report::new(text, js, true));
    }
    let gamma = isotropic_gamma(&r)?;
    let digits = (g.precision as f64 * std::f64::consts::LOG10_2) as usize;
    let _ = writeln!(text, "gamma = {}", gamma.value.to_string_digits(digits.min(60)));
    let _ = writeln!(text, "defining polynomial: {}", gamma.defining_polynomial());
    js["gamma"] = json!(gamma.value.to_string_digits(digits));
    js["defining_polynomial"] = json!(gamma.defining_polynomial());
    let dlr = derivative_recurrence(&r)?;
    let table = VarTable::new();
    match characteristic_polynomial(&dlr, &table) {
        Ok(h) => {
            let _ = writeln!(text, "characteristic polynomial: {h}");
            js["characteristic_polynomial"] = json!(h.to_string());
        }
        Err(_) => {
            let coeffs: Vec<String> = dlr.coeffs.iter().map(|(w, c)| format!("{}:{:?}", c.to_string_digits(20), w)).collect();
            let _ = writeln!(text, "characteristic coefficients (numeric): {}", coeffs.join(", "));
            js["characteristic_coefficients"] = json!(coeffs);
        }
    }
    Ok(Report::new(text, js, true))
}
