//! `limitshape`: derivative system, determinant, lambda, arctic trace, g-fields.

use std::fmt::Write as _;

use clap::Args;
use hexahedron::limitshape::{
    arctic_trace, characteristic_matrix_det, cube_characteristic, g_field_iterate, hexahedron_derivative_system, lambda_parameter, lambda_parameter_real,
    p1_closed_form, LinearSystem, Vars, COMPONENTS,
};
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::{rational, real, split_list, usage, write_artifact, CliResult, Global, Report};

#[derive(Args, Debug)]
pub struct LimitArgs {
    /// Isotropic data `a,b,c,d` = `A0,B0,A1,A2`.
    #[arg(long, default_value = "1,1,2,3")]
    params: String,
    /// Print the parameter lambda.
    #[arg(long)]
    lambda: bool,
    /// Print the eight derivative equations.
    #[arg(long)]
    system: bool,
    /// Compute det(I - M) and check that P1 divides it.
    #[arg(long)]
    det: bool,
    /// Sample the arctic curve (`--grid` sets the resolution).
    #[arg(long)]
    arctic: bool,
    /// Iterate the integer-point g-field up to this level.
    #[arg(long)]
    gfield: Option<i32>,
    /// Use the cube recurrence's characteristic polynomial for `--arctic` and `--gfield`.
    #[arg(long)]
    cube: bool,
}

fn exact_params(s: &str) -> Option<[BigRational; 4]> {
    let v = split_list(s, Some(4), rational).ok()?;
    Some([v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()])
}

pub fn run(g: &Global, a: &LimitArgs) -> CliResult<Report> {
    let exact = exact_params(&a.params);
    let any = a.lambda || a.system || a.det || a.arctic || a.gfield.is_some();
    let (want_lambda, want_system) = if any { (a.lambda, a.system) } else { (true, true) };
    let needs_exact = want_system || a.det || (!a.cube && (a.arctic || a.gfield.is_some()));
    if needs_exact && exact.is_none() {
        return Err(usage("this output needs rational parameters; only --lambda accepts real ones"));
    }
    let mut text = String::new();
    let mut js = Map::new();
    let mut ok = true;
    if want_lambda {
        let l = match &exact {
            Some(p) => lambda_parameter(p)?.to_string(),
            None => {
                let r = split_list(&a.params, Some(4), real)?;
                lambda_parameter_real(&[r[0].clone(), r[1].clone(), r[2].clone(), r[3].clone()])?.to_string_digits(40)
            }
        };
        let _ = writeln!(text, "{l}");
        js.insert("lambda".into(), json!(l));
    }
    let vars = Vars::new();
    if want_system {
        let sys = hexahedron_derivative_system(exact.as_ref().unwrap())?;
        let mut eqs = Vec::new();
        for e in &sys.equations {
            let rhs: Vec<String> = e.terms.iter().map(|t| format!("({}) {}{:?}", t.coeff, COMPONENTS[t.comp], t.offset)).collect();
            let line = format!("{} = {}", COMPONENTS[e.target], rhs.join(" + "));
            let _ = writeln!(text, "{line}");
            eqs.push(json!({
                "target": COMPONENTS[e.target],
                "terms": e.terms.iter().map(|t| json!({ "component": COMPONENTS[t.comp], "offset": t.offset, "coeff": t.coeff.to_string() })).collect::<Vec<_>>(),
            }));
        }
        js.insert("system".into(), Value::Array(eqs));
    }
    if a.det {
        let p = exact.as_ref().unwrap();
        let det = characteristic_matrix_det(&hexahedron_derivative_system(p)?, &vars)?;
        let p1 = p1_closed_form(p, &vars)?;
        let cofactor = det.div_exact(&p1);
        let divides = cofactor.is_ok();
        ok &= divides;
        let _ = writeln!(text, "det(I - M) = {det}\nP1 = {p1}\nP1 divides det: {divides}");
        js.insert("det".into(), json!(det.to_string()));
        js.insert("p1".into(), json!(p1.to_string()));
        js.insert("p1_divides".into(), json!(divides));
        if let Ok(c) = cofactor {
            let _ = writeln!(text, "det / P1 = {c}");
            js.insert("cofactor".into(), json!(c.to_string()));
        }
    }
    let h = if a.cube { cube_characteristic(&vars)? } else if let Some(p) = &exact { p1_closed_form(p, &vars)? } else { vars.parse("1")? };
    if a.arctic {
        let t = arctic_trace(&h, &vars, g.grid)?;
        let b: Vec<_> = t.boundary().collect();
        let _ = writeln!(text, "arctic trace: {} boundary points, {} interior points, singular torus points {:?}", b.len(), t.points.len() - b.len(), t.singular);
        if a.cube {
            let r = 1.0 / 6f64.sqrt();
            let dev = b.iter().map(|p| (p.radius() - r).abs()).fold(0.0, f64::max);
            let _ = writeln!(text, "largest deviation from the circle of radius 1/sqrt(6): {dev:e}");
            js.insert("circle_deviation".into(), json!(dev));
        }
        js.insert("boundary_points".into(), json!(b.len()));
        js.insert("singular".into(), json!(t.singular));
        if let Some(p) = write_artifact(g, "arctic.csv", &t.to_csv())? {
            let _ = writeln!(text, "wrote {}", p.display());
        }
    }
    if let Some(levels) = a.gfield {
        if levels < 0 {
            return Err(usage("--gfield needs a non-negative level"));
        }
        let field = if a.cube {
            g_field_iterate(&LinearSystem::from_characteristic(&h, &vars)?, (0, [0, 0, 0]), levels, 0)?
        } else {
            let sys = LinearSystem::from_derivative(&hexahedron_derivative_system(exact.as_ref().unwrap())?)?;
            g_field_iterate(&sys, (1, [0, 0, 0]), levels, -levels)?
        };
        let comp = if a.cube { 0 } else { 1 };
        let csv = field.slice_csv(comp, levels);
        let _ = writeln!(text, "g-field at level {levels}:");
        text.push_str(&csv);
        js.insert("gfield_level".into(), json!(levels));
        js.insert("gfield_points".into(), json!(field.values.len()));
        for n in 0..=levels {
            write_artifact(g, &format!("gfield_{n:03}.csv"), &field.slice_csv(comp, n))?;
        }
    }
    js.insert("ok".into(), json!(ok));
    Ok(Report::new(text, Value::Object(js), ok))
}
