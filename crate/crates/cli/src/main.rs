//! `hexa`: command-line front end for the `hexahedron` crate.
//!
//! Every subcommand builds a [`Report`]: a human-readable text block, a JSON
//! value printed instead with `--json`, and a verdict. A failed verdict exits
//! with status 1; bad arguments or unreadable input exit with status 2.

mod dimer_cmd;
mod ising_cmd;
mod limit_cmd;
mod rec_cmd;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

#[derive(Parser, Debug)]
#[command(name = "hexa", version, about = "Hexahedron recurrence, taut double dimers, Ising and limit-shape tools")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Working precision of real arithmetic, in bits (at least 64).
    #[arg(long, global = true, default_value_t = 256)]
    pub precision: usize,
    /// Maximum number of terms in any Laurent polynomial.
    #[arg(long, global = true)]
    pub term_cap: Option<usize>,
    /// Cells of margin around the modified cubes of a stepped solid.
    #[arg(long, global = true, default_value_t = 2)]
    pub margin: i32,
    /// Grid resolution for arctic-curve sampling.
    #[arg(long, global = true, default_value_t = 48)]
    pub grid: usize,
    /// Directory for artifacts (JSON, CSV, SVG).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Numeric propagation of the hexahedron recurrence.
    Propagate(rec_cmd::PropagateArgs),
    /// Symbolic Laurent expansion at the apex of a stepped solid.
    Expand(rec_cmd::ExpandArgs),
    /// List the taut double-dimer configurations of a stepped solid.
    DdEnumerate(dimer_cmd::EnumerateArgs),
    /// Compare taut configurations with the recurrence's apex polynomial.
    DdVerify(dimer_cmd::VerifyArgs),
    /// Ising specialisation: minors, star-triangle moves, isotropic forms.
    Ising(ising_cmd::IsingArgs),
    /// Derivative system, characteristic polynomial, lambda, arctic curve.
    Limitshape(limit_cmd::LimitArgs),
    /// Homogeneity degree, isotropic gamma and characteristic polynomial.
    Homogeneity(rec_cmd::HomogeneityArgs),
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unreadable or malformed input.
    Usage(String),
    /// The computation itself failed.
    Compute(hexahedron::Error),
}

impl From<hexahedron::Error> for CliError {
    fn from(e: hexahedron::Error) -> Self {
        match e {
            hexahedron::Error::Parse(m) => CliError::Usage(m),
            e => CliError::Compute(e),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub struct Report {
    pub text: String,
    pub json: Value,
    pub ok: bool,
}

impl Report {
    pub fn new(text: String, json: Value, ok: bool) -> Self {
        Report { text, json, ok }
    }
}

/// Writes `name` under `--out`, if given.
pub fn write_artifact(g: &Global, name: &str, contents: &str) -> CliResult<Option<PathBuf>> {
    let Some(dir) = &g.out else { return Ok(None) };
    fs::create_dir_all(dir).map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    Ok(Some(path))
}

pub fn read_input(path: &PathBuf) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

/// Comma-separated list of values.
pub fn split_list<T>(s: &str, n: Option<usize>, parse: impl Fn(&str) -> CliResult<T>) -> CliResult<Vec<T>> {
    let v: Vec<T> = s.split(',').map(|x| parse(x.trim())).collect::<CliResult<_>>()?;
    if let Some(n) = n {
        if v.len() != n {
            return Err(usage(format!("expected {n} comma-separated values, got {:?}", s)));
        }
    }
    Ok(v)
}

pub fn rational(s: &str) -> CliResult<num_rational::BigRational> {
    hexahedron::laurent::parse_rational(s).map_err(|e| usage(e.to_string()))
}

/// A rational, a decimal, `sqrt(q)`, or a product of these joined by `*`.
pub fn real(s: &str) -> CliResult<hexahedron::Real> {
    if s.contains('*') {
        let mut acc = hexahedron::Real::from_i64(1);
        for f in s.split('*') {
            acc = &acc * &real(f.trim())?;
        }
        return Ok(acc);
    }
    if let Some(inner) = s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        let x = real(inner)?;
        if x.is_negative() {
            return Err(usage(format!("negative square root: {s:?}")));
        }
        return Ok(x.sqrt());
    }
    match hexahedron::laurent::parse_rational(s) {
        Ok(q) => Ok(hexahedron::Real::from_rational(&q)),
        Err(_) => hexahedron::Real::parse(s).ok_or_else(|| usage(format!("not a number: {s:?}"))),
    }
}

/// Which stepped solid to work on: the orthant minus some cubes.
#[derive(Args, Debug, Clone)]
pub struct SolidArgs {
    /// Remove this many cubes, in order of decreasing level.
    #[arg(long, conflicts_with_all = ["levels", "remove"])]
    pub cubes: Option<usize>,
    /// Remove every cube within this many levels of the apex.
    #[arg(long, conflicts_with = "remove")]
    pub levels: Option<i32>,
    /// Remove the listed cubes (minimal corners), e.g. "-1,-1,-1;-2,-1,-1".
    #[arg(long)]
    pub remove: Option<String>,
}

impl SolidArgs {
    pub fn solid(&self) -> CliResult<hexahedron::surface::SteppedSolid> {
        use hexahedron::surface::SteppedSolid;
        if let Some(n) = self.levels {
            if n < 0 {
                return Err(usage("--levels must be non-negative"));
            }
            return Ok(SteppedSolid::u_minus(n));
        }
        if let Some(list) = &self.remove {
            let cubes = list
                .split(';')
                .map(|c| {
                    let v = split_list(c, Some(3), |x| x.parse::<i32>().map_err(|e| usage(e.to_string())))?;
                    Ok([v[0], v[1], v[2]])
                })
                .collect::<CliResult<Vec<_>>>()?;
            return SteppedSolid::corner_without(cubes).map_err(|e| usage(e.to_string()));
        }
        Ok(SteppedSolid::first_cubes(self.cubes.unwrap_or(1)))
    }

    pub fn describe(&self, s: &hexahedron::surface::SteppedSolid) -> String {
        format!("orthant minus {} cube{}", s.removed.len(), if s.removed.len() == 1 { "" } else { "s" })
    }
}

fn run(cli: Cli) -> CliResult<Report> {
    let g = &cli.global;
    if g.precision < 64 {
        return Err(usage("--precision must be at least 64"));
    }
    if g.term_cap == Some(0) || g.grid == 0 || g.margin < 0 {
        return Err(usage("caps, grid and margin must be positive"));
    }
    hexahedron::real::set_precision(g.precision);
    if let Some(cap) = g.term_cap {
        hexahedron::laurent::set_term_cap(cap);
    }
    match &cli.cmd {
        Cmd::Propagate(a) => rec_cmd::propagate(g, a),
        Cmd::Expand(a) => rec_cmd::expand(g, a),
        Cmd::DdEnumerate(a) => dimer_cmd::enumerate(g, a),
        Cmd::DdVerify(a) => dimer_cmd::verify(g, a),
        Cmd::Ising(a) => ising_cmd::run(g, a),
        Cmd::Limitshape(a) => limit_cmd::run(g, a),
        Cmd::Homogeneity(a) => rec_cmd::homogeneity(g, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let json = cli.global.json;
    match run(cli) {
        Ok(r) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&r.json).expect("serializable report"));
            } else {
                print!("{}", r.text);
                if !r.text.ends_with('\n') {
                    println!();
                }
            }
            ExitCode::from(if r.ok { 0 } else { 1 })
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
