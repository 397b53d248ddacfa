//! `sphconv`: generate, analyze and verify spherical convex bodies and
//! Wulff shapes from the command line.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 usage or input
//! error, 3 a geometric precondition failed.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sphconv::bodies::Body;
use sphconv::error::GeomError;
use sphconv::generators::{gen_cap, gen_gamma, gen_orthant, gen_random_polytope, gen_reuleaux_checked, GammaKind};
use sphconv::io::{
    body_from_json, body_mesh, body_to_json, gamma_from_csv, gamma_from_json, gamma_to_csv, gamma_to_json,
    mesh_to_off, IoError,
};
use sphconv::metrics::{diameter, radial_hausdorff, thickness, verify_theorem_1};
use sphconv::polar::{body_summary, polar_body};
use sphconv::sphere::{normalize, SpherePoint, ToleranceConfig};
use sphconv::verify::{run_suite, Suite};
use sphconv::wulff::{
    build_wulff, check_dual_is_reflected_polar, check_prop_3_3, check_self_dual, corollary_3_2_report, dual_directions,
    dual_gamma, spherical_wulff, GammaField,
};

#[derive(Parser)]
#[command(name = "sphconv", version, about = "Spherical convex bodies, polar duality and Wulff shapes")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Opts {
    /// Angular tolerance for exact predicates (radians).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Tolerance for sampled checks (radians).
    #[arg(long = "tol-sample", global = true)]
    tol_sample: Option<f64>,
    /// Boundary samples per sampled operation.
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the main output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated body or gamma field as JSON.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
    /// Diameter, thickness and constancy report for a body file.
    Analyze { file: PathBuf },
    /// Write the polar body.
    Polar {
        file: PathBuf,
        /// Also apply the polar twice and report the round trip on stderr.
        #[arg(long)]
        check: bool,
    },
    /// Wulff shape operations on a gamma file (JSON, or CSV by extension).
    Wulff { op: WulffOp, file: PathBuf },
    /// Export a body on S² as a mesh (OFF) or canonical JSON.
    Export { file: PathBuf },
    /// Run a property suite over the generator families.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
    },
}

#[derive(Subcommand)]
enum Family {
    Cap {
        /// Comma-separated center; defaults to the north pole of S².
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        center: Option<Vec<f64>>,
        #[arg(long)]
        radius: f64,
    },
    Orthant {
        #[arg(long, default_value_t = 3)]
        dim: usize,
    },
    Reuleaux {
        #[arg(long)]
        tau: f64,
    },
    Random {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        m: usize,
        #[arg(long, default_value_t = 0.6)]
        spread: f64,
    },
    Gamma {
        #[arg(long, value_enum)]
        kind: GammaChoice,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        value: f64,
        #[arg(long, default_value_t = 0.2)]
        amplitude: f64,
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GammaChoice {
    Constant,
    Cube,
    Perturbed,
}

#[derive(Clone, Copy, ValueEnum)]
enum WulffOp {
    Build,
    Dual,
    Selfdual,
    Prop33,
    Cor32,
    Lift,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

enum Failure {
    Usage(String),
    Geometric(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        if e.is_schema() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Geometric(e.to_string())
        }
    }
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        IoError::from(e).into()
    }
}

type Run = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Geometric(m)) => {
            eprintln!("geometric precondition failed: {m}");
            ExitCode::from(3)
        }
    }
}

fn config(o: &Opts) -> Result<ToleranceConfig, Failure> {
    let d = ToleranceConfig::default();
    let cfg = ToleranceConfig {
        tol_angle: o.tol.unwrap_or(d.tol_angle),
        tol_sample: o.tol_sample.unwrap_or(d.tol_sample),
        boundary_samples: o.samples.unwrap_or(d.boundary_samples),
        seed: o.seed,
    };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(cfg)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(o: &Opts, text: &str) -> Result<(), Failure> {
    match &o.out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            // a closed pipe (`| head`) is not an error worth reporting
            let _ = writeln!(std::io::stdout().lock(), "{}", text.trim_end());
            Ok(())
        }
    }
}

fn emit_json(o: &Opts, v: &Value) -> Result<(), Failure> {
    emit(o, &serde_json::to_string_pretty(v).expect("reports serialize"))
}

fn read_body(path: &Path) -> Result<Body, Failure> {
    Ok(body_from_json(&read(path)?)?)
}

fn read_gamma(path: &Path) -> Result<GammaField, Failure> {
    let text = read(path)?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    Ok(if is_csv { gamma_from_csv(&text)? } else { gamma_from_json(&text)? })
}

fn run(cli: &Cli) -> Run {
    let o = &cli.opts;
    let cfg = config(o)?;
    match &cli.command {
        Command::Gen { family } => generate(o, &cfg, family),
        Command::Analyze { file } => analyze(o, &cfg, &read_body(file)?),
        Command::Polar { file, check } => polar(o, &cfg, &read_body(file)?, *check),
        Command::Wulff { op, file } => wulff(o, &cfg, *op, &read_gamma(file)?),
        Command::Export { file } => {
            let b = read_body(file)?;
            match o.format.unwrap_or(Format::Off) {
                Format::Off => emit(o, &mesh_to_off(&body_mesh(&b, cfg.boundary_samples)?))?,
                Format::Json => emit(o, &body_to_json(&b))?,
                Format::Csv => return Err(Failure::Usage("bodies export as off or json".into())),
            }
            Ok(true)
        }
        Command::Verify { suite } => verify(o, &cfg, *suite),
    }
}

fn generate(o: &Opts, cfg: &ToleranceConfig, family: &Family) -> Run {
    let usage = |e: GeomError| Failure::Usage(e.to_string());
    let body = match family {
        Family::Cap { center, radius } => {
            let c = match center {
                Some(v) => normalize(v).map_err(usage)?,
                None => SpherePoint::north(3),
            };
            gen_cap(c, *radius).map_err(usage)?
        }
        Family::Orthant { dim } => gen_orthant(*dim).map_err(usage)?,
        Family::Reuleaux { tau } => gen_reuleaux_checked(*tau, cfg.constancy_tol(), cfg)
            .map_err(|e| if e.is_geometric() { e.into() } else { usage(e) })?,
        Family::Random { dim, m, spread } => gen_random_polytope(*dim, *m, *spread, cfg.seed)?,
        Family::Gamma { kind, dim, value, amplitude, grid } => {
            let kind = match kind {
                GammaChoice::Constant => GammaKind::Constant { dim: *dim, value: *value, grid: *grid },
                GammaChoice::Cube => GammaKind::Cube { dim: *dim },
                GammaChoice::Perturbed => {
                    GammaKind::Perturbed { dim: *dim, value: *value, amplitude: *amplitude, grid: *grid }
                }
            };
            let g = gen_gamma(&kind, cfg.seed).map_err(usage)?;
            emit(o, &gamma_text(o, &g))?;
            return Ok(true);
        }
    };
    emit(o, &body_to_json(&body))?;
    Ok(true)
}

fn gamma_text(o: &Opts, g: &GammaField) -> String {
    match o.format {
        Some(Format::Csv) => gamma_to_csv(g),
        _ => gamma_to_json(g),
    }
}

fn analyze(o: &Opts, cfg: &ToleranceConfig, b: &Body) -> Run {
    let diam = diameter(b, cfg)?;
    let thick = thickness(b, cfg)?;
    let t1 = verify_theorem_1(b, cfg.constancy_tol(), cfg)?;
    emit_json(
        o,
        &json!({
            "body": body_summary(b),
            "diameter": diam.value,
            "thickness": thick.value,
            "thickness_cross_check": thick.cross_check,
            "constant_width": t1.constant_width,
            "constant_diameter": t1.constant_diameter,
            "theorem1_pass": t1.pass,
            "witnesses": { "diameter": diam.witness_pair, "thickness": thick.witness_pair },
        }),
    )?;
    Ok(t1.pass)
}

fn polar(o: &Opts, cfg: &ToleranceConfig, b: &Body, check: bool) -> Run {
    let p = polar_body(b, cfg)?;
    emit(o, &body_to_json(&p))?;
    if !check {
        return Ok(true);
    }
    let pp = polar_body(&p, cfg)?;
    let (report, ok) = match (b, &pp) {
        (Body::Polytope(a), Body::Polytope(c)) => (json!({ "double_polar_exact": a == c }), a == c),
        _ => {
            let h = radial_hausdorff(b, &pp, cfg.boundary_samples, cfg.stream(5))?;
            (json!({ "double_polar_hausdorff": h }), h <= 2.0 * cfg.tol_sample)
        }
    };
    eprintln!("{report}");
    Ok(ok)
}

fn wulff(o: &Opts, cfg: &ToleranceConfig, op: WulffOp, g: &GammaField) -> Run {
    let tol = cfg.constancy_tol();
    match op {
        WulffOp::Build => {
            let w = build_wulff(g)?;
            emit_json(
                o,
                &json!({
                    "dim": w.dim(),
                    "halfspaces": w.normals().len(),
                    "redundant": w.redundant().iter().filter(|r| **r).count(),
                    "vertices": w.vertices(),
                }),
            )?;
            Ok(true)
        }
        WulffOp::Dual => {
            let w = build_wulff(g)?;
            let d = dual_gamma(&w, &dual_directions(&w, g.directions()))?;
            emit(o, &gamma_text(o, &d))?;
            Ok(true)
        }
        WulffOp::Lift => {
            let s = spherical_wulff(&build_wulff(g)?)?;
            emit(o, &body_to_json(&s.body()))?;
            Ok(true)
        }
        WulffOp::Selfdual => {
            let rep = check_self_dual(g, tol, cfg)?;
            emit_json(o, &json!(rep))?;
            Ok(rep.self_dual)
        }
        WulffOp::Prop33 => {
            let a = check_prop_3_3(g, tol)?;
            let b = check_dual_is_reflected_polar(g, tol)?;
            let pass = a.pass && b.pass;
            emit_json(o, &json!({ "spherical_route": a, "reflected_polar": b, "pass": pass }))?;
            Ok(pass)
        }
        WulffOp::Cor32 => {
            let rep = corollary_3_2_report(g, 1e-2, cfg)?;
            emit_json(o, &json!(rep))?;
            Ok(rep.pass)
        }
    }
}

fn verify(o: &Opts, cfg: &ToleranceConfig, suite: Suite) -> Run {
    let report = run_suite(suite, cfg)?;
    let mut per_suite: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for out in &report.outcomes {
        let e = per_suite.entry(out.suite).or_default();
        e.0 += 1;
        e.1 += usize::from(!out.pass);
    }
    let suites: serde_json::Map<String, Value> = per_suite
        .into_iter()
        .map(|(k, (n, f))| (k.to_string(), json!({ "cases": n, "failures": f })))
        .collect();
    let summary = json!({
        "suite": report.suite,
        "seed": report.seed,
        "cases": report.cases,
        "failures": report.failures,
        "pass": report.pass,
        "suites": suites,
        "first_failure": report.first_failure,
    });
    match &o.out {
        Some(_) => {
            emit_json(o, &json!(report))?;
            let text = serde_json::to_string_pretty(&summary).expect("reports serialize");
            let _ = writeln!(std::io::stdout().lock(), "{text}");
        }
        None => emit_json(o, &summary)?,
    }
    Ok(report.pass)
}
