//! `dd-enumerate` and `dd-verify`.

use std::fmt::Write as _;

use clap::Args;
use hexahedron::dimer::{config_weight, enumerate_taut, graph_with_margin, verify_bijection, DoubleDimerConfig};
use hexahedron::surface::{Color, SteppedSolid, SurfaceGraph};
use hexahedron::VarTable;
use num_bigint::BigInt;
use num_traits::One;
use serde_json::json;

use crate::{usage, write_artifact, CliResult, Global, Report, SolidArgs};

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[command(flatten)]
    solid: SolidArgs,
    /// Also write one SVG drawing per configuration under `--out`.
    #[arg(long)]
    svg: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    solid: SolidArgs,
}

/// Enumeration is exponential; beyond a handful of cubes it exhausts memory.
const MAX_CUBES: usize = 6;

fn solid(a: &SolidArgs) -> CliResult<SteppedSolid> {
    let s = a.solid()?;
    if s.removed.len() > MAX_CUBES {
        return Err(usage(format!("enumeration supports at most {MAX_CUBES} removed cubes; use `expand` for larger solids")));
    }
    Ok(s)
}

/// Planar drawing of a configuration: doubled edges thick, single edges thin.
pub fn config_svg(g: &SurfaceGraph, m: &DoubleDimerConfig) -> String {
    let pos: Vec<[f64; 2]> = (0..g.num_vertices()).map(|v| g.position(v)).collect();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in &pos {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let s = 60.0;
    let (w, h) = ((x1 - x0) * s + 40.0, (y1 - y0) * s + 40.0);
    let tr = |p: [f64; 2]| ((p[0] - x0) * s + 20.0, (y1 - p[1]) * s + 20.0);
    let mut out = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.1} {h:.1}\">\n");
    for (e, edge) in g.edges.iter().enumerate() {
        let (a, b) = (tr(pos[edge.ends[0]]), tr(pos[edge.ends[1]]));
        let (stroke, width) = match m.mult[e] {
            0 => ("#cccccc", 0.8),
            1 => ("#000000", 1.6),
            _ => ("#000000", 4.5),
        };
        let _ = writeln!(out, "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>", a.0, a.1, b.0, b.1);
    }
    for (v, p) in pos.iter().enumerate() {
        let (x, y) = tr(*p);
        let fill = if g.colors[v] == Color::Black { "#000000" } else { "#ffffff" };
        let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2.5\" fill=\"{fill}\" stroke=\"#000000\" stroke-width=\"0.6\"/>");
    }
    out.push_str("</svg>\n");
    out
}

pub fn enumerate(g: &Global, a: &EnumerateArgs) -> CliResult<Report> {
    if a.svg && g.out.is_none() {
        return Err(usage("--svg needs --out"));
    }
    let solid = solid(&a.solid)?;
    let table = VarTable::new();
    let (graph, poly) = graph_with_margin(&solid, g.margin, &table)?;
    let configs = enumerate_taut(&graph)?;
    let mut text = String::new();
    let mut items = Vec::new();
    let mut weighted = BigInt::from(0);
    for (i, m) in configs.iter().enumerate() {
        let w = config_weight(&graph, m, &table)?;
        weighted += BigInt::one() << m.loops;
        let _ = writeln!(text, "{i:4}  loops {}  {w}", m.loops);
        items.push(m.to_json(Some(&w)));
        if a.svg {
            write_artifact(g, &format!("config_{i:04}.svg"), &config_svg(&graph, m))?;
        }
    }
    let _ = writeln!(text, "{} configurations, weighted sum {weighted}, {} distinct monomials", configs.len(), poly.len());
    let js = json!({ "configurations": items, "count": configs.len(), "weighted_sum": weighted.to_string(), "polynomial": poly.to_json() });
    write_artifact(g, "configs.json", &serde_json::to_string_pretty(&js).unwrap())?;
    Ok(Report::new(text, js, true))
}

pub fn verify(g: &Global, a: &VerifyArgs) -> CliResult<Report> {
    let rep = verify_bijection(&solid(&a.solid)?, g.margin)?;
    // the weighted count must equal the apex value on unit data
    let unit: num_rational::BigRational = rep.recurrence_side.terms().map(|(_, c)| c.clone()).sum();
    let sum_ok = unit == num_rational::BigRational::from_integer(rep.weighted_sum.clone());
    let ok = rep.matches() && sum_ok;
    let mut text = format!("{} configurations, weighted sum {}\n", rep.configs, rep.weighted_sum);
    let _ = writeln!(text, "{} with loops, {} distinct monomials, apex value on unit data {unit}", rep.loops, rep.terms);
    for m in &rep.mismatches {
        let _ = writeln!(text, "mismatch: {m}");
    }
    let _ = writeln!(text, "{}", if ok { "bijection verified" } else { "VERIFICATION FAILED" });
    let js = json!({
        "configurations": rep.configs,
        "with_loops": rep.loops,
        "weighted_sum": rep.weighted_sum.to_string(),
        "unit_apex_value": unit.to_string(),
        "terms": rep.terms,
        "mismatches": rep.mismatches,
        "ok": ok,
    });
    write_artifact(g, "verify.json", &serde_json::to_string_pretty(&js).unwrap())?;
    Ok(Report::new(text, js, ok))
}
