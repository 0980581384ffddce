//! `ising` subcommands.

use std::fmt::{Display, Write as _};

use clap::{Args, Subcommand, ValueEnum};
use hexahedron::ising::{
    apex_expansion, eval_specialized, f_laurent_grouping, ising_isotropic, ising_isotropic_iterate, minor_identity_check, ydelta_measure_check,
    ydelta_transform, IsingNetwork, IsingWeight, YDeltaDirection, YDeltaSite,
};
use hexahedron::recurrence::{kashaev_residual, kashaev_step, KashaevInput};
use hexahedron::Real;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::{rational, real, split_list, usage, CliResult, Global, Report};

#[derive(Args, Debug)]
pub struct IsingArgs {
    #[command(subcommand)]
    cmd: IsingCmd,
}

#[derive(Subcommand, Debug)]
enum IsingCmd {
    /// Kashaev's relation on principal minors of random symmetric matrices.
    MinorCheck {
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Star-triangle transformation with a brute-force measure check.
    Ydelta {
        /// Three positive weights `a,b,c`.
        #[arg(long)]
        weights: String,
        #[arg(long, value_enum, default_value_t = Direction::YToDelta)]
        direction: Direction,
    },
    /// Reduced Kashaev system on random positive data.
    Kashaev {
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Isotropic closed form against iteration.
    Isotropic {
        /// Seeds `f0,f1,f2`; entries may be rationals, decimals or `sqrt(q)`.
        #[arg(long)]
        seeds: String,
        #[arg(long, default_value_t = 10)]
        levels: usize,
    },
    /// Regroup the apex expansion so quad variables appear with degree 0 or 1.
    Grouping {
        #[arg(long, default_value = "1,1,1")]
        apex: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Direction {
    YToDelta,
    DeltaToY,
}

/// Relative tolerance for real identities at the current precision.
fn tolerance(bits: usize) -> Real {
    Real::from_i64(2).powi(-(3 * bits as i64 / 8))
}

pub fn run(g: &Global, a: &IsingArgs) -> CliResult<Report> {
    match &a.cmd {
        IsingCmd::MinorCheck { dim, trials } => minor_check(g, *dim, *trials),
        IsingCmd::Ydelta { weights, direction } => ydelta(weights, *direction),
        IsingCmd::Kashaev { trials } => kashaev(g, *trials),
        IsingCmd::Isotropic { seeds, levels } => isotropic(g, seeds, *levels),
        IsingCmd::Grouping { apex } => grouping(g, apex),
    }
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<BigRational>> {
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let x = BigRational::new(rng.gen_range(-9..10).into(), rng.gen_range(1..6).into());
            m[i][j] = x.clone();
            m[j][i] = x;
        }
    }
    m
}

fn minor_check(g: &Global, dim: usize, trials: usize) -> CliResult<Report> {
    if dim < 3 {
        return Err(usage("--dim must be at least 3"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let mut nonzero = Vec::new();
    for t in 0..trials {
        let m = random_symmetric(&mut rng, dim);
        let mut idx: Vec<usize> = (0..dim).collect();
        for i in (1..dim).rev() {
            idx.swap(i, rng.gen_range(0..=i));
        }
        let r = minor_identity_check(&m, [idx[0], idx[1], idx[2]])?;
        if !r.is_zero() {
            nonzero.push((t, r.to_string()));
        }
    }
    let ok = nonzero.is_empty();
    let text = if ok {
        format!("{trials} random symmetric {dim}x{dim} matrices: all residuals exactly 0\n")
    } else {
        format!("{trials} random symmetric {dim}x{dim} matrices: {} nonzero residuals, first {:?}\n", nonzero.len(), nonzero[0])
    };
    let js = json!({ "dim": dim, "trials": trials, "seed": g.seed, "nonzero": nonzero, "ok": ok });
    Ok(Report::new(text, js, ok))
}

fn measure_network<T: IsingWeight>(w: &[T; 3], dir: YDeltaDirection, conv: impl Fn(i64, i64) -> T) -> hexahedron::Result<(IsingNetwork<T>, YDeltaSite)> {
    let [a, b, c] = w.clone();
    match dir {
        // star at 0 on leaves 1, 2, 3, with two outside edges
        YDeltaDirection::YToDelta => Ok((IsingNetwork::new(5, vec![(0, 1, a), (0, 2, b), (0, 3, c), (1, 2, conv(2, 1)), (3, 4, conv(3, 2))])?, YDeltaSite::Y(0))),
        // K4 on 0..3 with the triangle 1, 2, 3 and a pendant vertex 4
        YDeltaDirection::DeltaToY => Ok((
            IsingNetwork::new(5, vec![(2, 3, a), (1, 3, b), (1, 2, c), (0, 1, conv(1, 1)), (0, 2, conv(4, 3)), (0, 3, conv(5, 3)), (3, 4, conv(2, 1))])?,
            YDeltaSite::Delta([1, 2, 3]),
        )),
    }
}

fn ydelta_with<T: IsingWeight + Display>(w: [T; 3], dir: YDeltaDirection, conv: impl Fn(i64, i64) -> T, exact: bool) -> CliResult<Report> {
    let (x, y, z) = ydelta_transform(&w[0], &w[1], &w[2], dir)?;
    let (net, site) = measure_network(&w, dir, conv)?;
    let rep = ydelta_measure_check(&net, site)?;
    let kind = if exact { "exact" } else { "real" };
    let text = format!(
        "{} ({kind}): ({}, {}, {}) -> ({x}, {y}, {z})\nmeasure on the kept spins {}\n",
        if matches!(dir, YDeltaDirection::YToDelta) { "Y to Delta" } else { "Delta to Y" },
        w[0],
        w[1],
        w[2],
        if rep.equal { "preserved" } else { "NOT preserved" }
    );
    let js = json!({
        "arithmetic": kind,
        "input": w.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "output": [x.to_string(), y.to_string(), z.to_string()],
        "measure_preserved": rep.equal,
    });
    Ok(Report::new(text, js, rep.equal))
}

fn ydelta(weights: &str, dir: Direction) -> CliResult<Report> {
    let dir = match dir {
        Direction::YToDelta => YDeltaDirection::YToDelta,
        Direction::DeltaToY => YDeltaDirection::DeltaToY,
    };
    if let Ok(q) = split_list(weights, Some(3), rational) {
        let w = [q[0].clone(), q[1].clone(), q[2].clone()];
        let exact = ydelta_transform(&w[0], &w[1], &w[2], dir);
        if exact.is_ok() {
            return ydelta_with(w, dir, |n, d| BigRational::new(n.into(), d.into()), true);
        }
    }
    let r = split_list(weights, Some(3), real)?;
    ydelta_with([r[0].clone(), r[1].clone(), r[2].clone()], dir, |n, d| &Real::from_i64(n) / &Real::from_i64(d), false)
}

fn kashaev(g: &Global, trials: usize) -> CliResult<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let tol = tolerance(g.precision);
    let mut worst = Real::zero();
    for _ in 0..trials {
        let f: [Real; 7] = std::array::from_fn(|_| Real::from_rational(&BigRational::new(rng.gen_range(1..300).into(), 100.into())));
        let out = kashaev_step(&KashaevInput::with_canonical_roots(f.clone()))?;
        let [f0, f1, f2, f3, f12, f13, f23] = f;
        let scale = &(&f0 * &out.f123) * &(&f0 * &out.f123);
        let r = (&kashaev_residual(&[f0, f1, f2, f3, f12, f13, f23, out.f123]) / &scale).abs();
        if r > worst {
            worst = r;
        }
    }
    let ok = worst < tol;
    let text = format!("{trials} random inputs: largest relative residual {}\n", worst.to_string_digits(6));
    let js = json!({ "trials": trials, "max_relative_residual": worst.to_string_digits(6), "tolerance": tol.to_string_digits(6), "ok": ok });
    Ok(Report::new(text, js, ok))
}

fn isotropic(g: &Global, seeds: &str, levels: usize) -> CliResult<Report> {
    let s = split_list(seeds, Some(3), real)?;
    let iter = ising_isotropic_iterate(&s[0], &s[1], &s[2], levels)?;
    let tol = tolerance(g.precision);
    let mut worst = Real::zero();
    let mut text = String::from("n  f_n\n");
    let mut rows = Vec::new();
    for (n, v) in iter.iter().enumerate() {
        let c = ising_isotropic(&s[0], &s[1], &s[2], n as i64)?;
        let d = v.rel_diff(&c);
        if d > worst {
            worst = d.clone();
        }
        let _ = writeln!(text, "{n}  {}", v.to_string_digits(30));
        rows.push(json!({ "n": n, "iterate": v.to_string_digits(40), "closed_form": c.to_string_digits(40) }));
    }
    let ok = worst < tol;
    let _ = writeln!(text, "largest relative difference from the closed form: {}", worst.to_string_digits(6));
    let js = json!({ "levels": rows, "max_relative_difference": worst.to_string_digits(6), "ok": ok });
    Ok(Report::new(text, js, ok))
}

fn grouping(g: &Global, apex: &str) -> CliResult<Report> {
    let v = split_list(apex, Some(3), |x| x.parse::<i32>().map_err(|e| usage(e.to_string())))?;
    let (poly, quads) = apex_expansion([v[0], v[1], v[2]])?;
    let grouped = f_laurent_grouping(&poly, &quads)?;
    let regrouped = grouped.to_poly();
    // both forms agree once each quad variable is the root of its corner relation
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let vals: std::collections::HashMap<u32, Real> = poly
        .variables()
        .into_iter()
        .chain(quads.iter().flat_map(|q| q.corners))
        .map(|x| (x, Real::from_rational(&BigRational::new(rng.gen_range(50..300).into(), 100.into()))))
        .collect();
    let at = |x: u32| vals.get(&x).cloned().unwrap_or_else(|| Real::from_i64(1));
    let (e0, e1) = (eval_specialized(&poly, &quads, at)?, eval_specialized(&regrouped, &quads, at)?);
    let agree = e0.rel_diff(&e1) < tolerance(g.precision);
    let ok = grouped.all_positive() && grouped.quad_degrees_ok() && agree;
    let text = format!(
        "apex {apex}: {} terms regrouped into {}, largest collapse {} to 1\npositive {}, quad degrees in {{0,1}} {}, numeric agreement {}\n{regrouped}\n",
        poly.len(),
        regrouped.len(),
        grouped.max_collapse(),
        grouped.all_positive(),
        grouped.quad_degrees_ok(),
        agree
    );
    let js = json!({
        "terms_before": poly.len(),
        "terms_after": regrouped.len(),
        "max_collapse": grouped.max_collapse(),
        "positive": grouped.all_positive(),
        "quad_degrees_ok": grouped.quad_degrees_ok(),
        "numeric_agreement": agree,
        "grouped": regrouped.to_json(),
    });
    Ok(Report::new(text, js, ok))
}
