//! Command-line front end: loads a problem file, runs one analysis and prints a
//! canonical JSON report on stdout.
//!
//! Exit codes: 0 when every verdict passes, 1 when a residual check fails,
//! 2 for unusable input. Errors are reported on stderr as
//! `{"schema": 1, "error": {"kind": …, "message": …}}`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::bonnet::{self, SweepOptions};
use crate::error::{GeomError, Result};
use crate::frobenius::{
    associativity_residual, invariance_residual, structure_constants, wdvv_residual, weingarten_operators,
};
use crate::hydro::{EvolveConfig, GridState, HydroSystem, CFL_LIMIT};
use crate::lax::{consistency_residual, LaxSystem, SpectralParams};
use crate::potential::{Domain, ProblemSpec};
use crate::report::{num, sweep, to_canonical_json, ResidualReport};
use crate::scalar::{parse_rational, rational, rational_from_f64, Mode, Rational, Scalar};
use crate::submanifold::{codazzi_residual, gauss_residual, reduction_check, ricci_residual, second_forms, FormField};

pub const SCHEMA: u64 = 1;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "wdvv", version, about = "Residual checks and reconstructions for WDVV potentials and flat submanifolds")]
pub struct Cli {
    /// Print wall-clock time per check on stderr.
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// WDVV, associativity and invariance residuals of Φ over the grid.
    CheckWdvv(CommonArgs),
    /// Gauss, Ricci and Codazzi residuals of the second forms over the grid.
    CheckGcr(CommonArgs),
    /// Gauss = c·Ricci = c·WDVV for ψ = ∇Φ and μ = c·η.
    CheckReduction(ReductionArgs),
    /// Compatibility identities and loop holonomy of the linear problem.
    LaxHolonomy(LaxArgs),
    /// Integrates the frame equations and verifies the resulting immersion.
    Reconstruct(ReconstructArgs),
    /// Evolves the hydrodynamic flows and measures pairwise commutators.
    Flows(FlowArgs),
    /// Dumps structure constants and Weingarten operators at a point.
    Algebra(CommonArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Problem file (JSON).
    pub spec: PathBuf,
    /// Evaluate at a single point instead of the grid, e.g. `1/2,-1/3,2`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub point: Option<Vec<String>>,
    /// Grid points per axis (overrides the file).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Exact rational arithmetic (default for algebraic checks).
    #[arg(long, conflicts_with = "float")]
    pub rational: bool,
    /// Double precision arithmetic.
    #[arg(long)]
    pub float: bool,
    #[arg(long)]
    pub tol_algebra: Option<f64>,
    #[arg(long)]
    pub tol_ode: Option<f64>,
    #[arg(long)]
    pub tol_fd: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct ReductionArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Scale in μ = c·η; defaults to the file's `scale_of_eta`, else 1.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct LaxArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 0.1)]
    pub loop_size: f64,
    /// RK4 steps per loop edge.
    #[arg(long, default_value_t = crate::lax::DEFAULT_SUBSTEPS)]
    pub substeps: usize,
    /// Spectral parameters as `lambda:rho` pairs; defaults to {−1, −½, ½, 1, 2}².
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub params: Option<Vec<String>>,
    /// Also fit the loop-size exponent over ½, 1, 2 and 4 times the loop size.
    #[arg(long)]
    pub fit: bool,
    /// Spectral parameters used by `--fit`.
    #[arg(long, default_value = "0.5:0.5", allow_hyphen_values = true)]
    pub fit_params: String,
}

#[derive(Args, Debug, Clone)]
pub struct ReconstructArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// CSV point cloud destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Include tangents and normals in the CSV.
    #[arg(long)]
    pub frames: bool,
    /// Include the per-node Gram drift column in the CSV.
    #[arg(long)]
    pub drift: bool,
    /// RK4 steps per grid cell.
    #[arg(long, default_value_t = bonnet::DEFAULT_SUBSTEPS)]
    pub substeps: usize,
    /// Stencil step of the finite-difference verifications.
    #[arg(long, default_value_t = bonnet::DEFAULT_FD_STEP)]
    pub fd_step: f64,
}

#[derive(Args, Debug, Clone)]
pub struct FlowArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Flow pair `a,b` (0-based); defaults to every pair.
    #[arg(long, value_parser = parse_pair)]
    pub pair: Option<(usize, usize)>,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    /// Spatial grid points on the unit circle.
    #[arg(long, default_value_t = 128)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-2)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 1)]
    pub mode: u32,
    /// Zero the top third of Fourier modes after each step.
    #[arg(long)]
    pub filter: bool,
    /// Continue past CFL numbers above the limit.
    #[arg(long)]
    pub allow_cfl: bool,
    /// Fail when a commutator defect exceeds this value.
    #[arg(long)]
    pub tol_flow: Option<f64>,
    /// CSV time series of grid norms.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
enum Tolerance {
    Exact,
    Abs(f64),
    Informational,
}

#[derive(Clone, Debug)]
struct CheckRow {
    name: String,
    value: f64,
    exact: Option<String>,
    tolerance: Tolerance,
    pass: bool,
    worst_point: Vec<Value>,
    worst_indices: Vec<usize>,
}

impl CheckRow {
    fn residual<S: Scalar>(r: &ResidualReport<S>, tol: f64) -> Self {
        let exact = r.value.exact_string();
        let (tolerance, pass) = if exact.is_some() {
            (Tolerance::Exact, r.is_zero())
        } else {
            (Tolerance::Abs(tol), r.value_f64() <= tol)
        };
        Self {
            name: r.name.clone(),
            value: r.value_f64(),
            exact,
            tolerance,
            pass,
            worst_point: r.worst_point.iter().map(scalar_json).collect(),
            worst_indices: r.worst_indices.clone(),
        }
    }

    fn float(name: &str, value: f64, tol: Option<f64>, point: &[f64], indices: Vec<usize>) -> Self {
        let (tolerance, pass) = match tol {
            Some(t) => (Tolerance::Abs(t), value <= t),
            None => (Tolerance::Informational, value.is_finite()),
        };
        Self {
            name: name.to_string(),
            value,
            exact: None,
            tolerance,
            pass,
            worst_point: point.iter().map(|x| num(*x)).collect(),
            worst_indices: indices,
        }
    }

    fn to_json(&self) -> Value {
        let tolerance = match self.tolerance {
            Tolerance::Exact => json!("exact"),
            Tolerance::Abs(t) => num(t),
            Tolerance::Informational => Value::Null,
        };
        json!({
            "name": self.name,
            "value": num(self.value),
            "exact": self.exact,
            "tolerance": tolerance,
            "pass": self.pass,
            "worst_point": self.worst_point,
            "worst_indices": self.worst_indices,
        })
    }
}

fn scalar_json<S: Scalar>(x: &S) -> Value {
    match x.exact_string() {
        Some(s) => Value::String(s),
        None => num(x.to_f64()),
    }
}

/// Report under construction, plus wall-clock timings kept out of the JSON.
struct Run {
    command: &'static str,
    fingerprint: String,
    mode: Mode,
    parameters: Map<String, Value>,
    checks: Vec<CheckRow>,
    tables: Map<String, Value>,
    timings: Vec<(String, f64)>,
}

impl Run {
    fn new(command: &'static str, spec: &ProblemSpec, mode: Mode) -> Self {
        Self {
            command,
            fingerprint: fingerprint(spec),
            mode,
            parameters: Map::new(),
            checks: Vec::new(),
            tables: Map::new(),
            timings: Vec::new(),
        }
    }

    fn param(&mut self, key: &str, v: Value) {
        self.parameters.insert(key.to_string(), v);
    }

    fn table(&mut self, key: &str, v: Value) {
        self.tables.insert(key.to_string(), v);
    }

    fn timed<T>(&mut self, label: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f()?;
        self.timings.push((label.to_string(), start.elapsed().as_secs_f64()));
        Ok(out)
    }

    fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "spec_fingerprint": self.fingerprint,
            "mode": self.mode.as_str(),
            "parameters": self.parameters,
            "checks": self.checks.iter().map(CheckRow::to_json).collect::<Vec<_>>(),
            "tables": self.tables,
            "pass": self.pass(),
        })
    }
}

/// `sha256:` digest of the canonical serialization of the problem.
pub fn fingerprint(spec: &ProblemSpec) -> String {
    let text = to_canonical_json(&spec.to_json());
    format!("sha256:{}", hex::encode(Sha256::digest(text.as_bytes())))
}

/// Parses arguments, runs the command and writes the report; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_PASS;
            }
            write_error(stderr, "usage", &e.render().to_string());
            return EXIT_INPUT;
        }
    };
    match execute(&cli) {
        Ok(run) => {
            if cli.timings {
                for (label, secs) in &run.timings {
                    let _ = writeln!(stderr, "{}", json!({"check": label, "seconds": secs}));
                }
            }
            let _ = stdout.write_all(to_canonical_json(&run.to_json()).as_bytes());
            if run.pass() {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            let (kind, code) = classify(&e);
            write_error(stderr, kind, &e.to_string());
            code
        }
    }
}

fn classify(e: &GeomError) -> (&'static str, i32) {
    match e {
        GeomError::Parse(_) | GeomError::Json(_) => ("parse", EXIT_INPUT),
        GeomError::Io(_) => ("io", EXIT_INPUT),
        GeomError::CflViolation { .. } => ("cfl", EXIT_INPUT),
        GeomError::NonFinite { .. } => ("non_finite", EXIT_FAIL),
        _ => ("invalid", EXIT_INPUT),
    }
}

fn write_error(stderr: &mut dyn Write, kind: &str, message: &str) {
    let v = json!({"schema": SCHEMA, "error": {"kind": kind, "message": message.trim_end()}});
    let _ = stderr.write_all(to_canonical_json(&v).as_bytes());
}

fn execute(cli: &Cli) -> Result<Run> {
    match &cli.command {
        Command::CheckWdvv(a) => algebraic(a, "check-wdvv", None),
        Command::CheckGcr(a) => algebraic(a, "check-gcr", None),
        Command::CheckReduction(a) => algebraic(&a.common, "check-reduction", a.c.as_deref()),
        Command::Algebra(a) => algebraic(a, "algebra", None),
        Command::LaxHolonomy(a) => lax_holonomy(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::Flows(a) => flows(a),
    }
}

impl CommonArgs {
    fn mode(&self, float_only: bool) -> Result<Mode> {
        match (self.rational, self.float || float_only) {
            (true, _) if float_only => Err(GeomError::Invalid("this command runs in float mode only".into())),
            (_, true) => Ok(Mode::Float),
            _ => Ok(Mode::Rational),
        }
    }

    fn load(&self, mode: Mode) -> Result<ProblemSpec> {
        let mut spec = ProblemSpec::from_json_file(&self.spec, mode)?;
        if let Some(t) = self.tol_algebra {
            spec.tolerances.algebra = t;
        }
        if let Some(t) = self.tol_ode {
            spec.tolerances.ode = t;
        }
        if let Some(t) = self.tol_fd {
            spec.tolerances.finite_difference = t;
        }
        if let Some(g) = self.grid {
            if g == 0 {
                return Err(GeomError::Invalid("--grid must be positive".into()));
            }
            let domain = Domain {
                grid: g,
                ..spec.domain.clone()
            };
            spec = spec.with_domain(domain)?;
        }
        Ok(spec)
    }

    fn parsed_point(&self, spec: &ProblemSpec, mode: Mode) -> Result<Option<Vec<Rational>>> {
        let Some(raw) = &self.point else { return Ok(None) };
        let point = raw
            .iter()
            .map(|s| parse_coordinate(s, mode))
            .collect::<Result<Vec<_>>>()?;
        crate::error::check_dim("--point", spec.n(), point.len())?;
        Ok(Some(point))
    }

    fn points<S: Scalar>(&self, spec: &ProblemSpec, mode: Mode) -> Result<Vec<Vec<S>>> {
        Ok(match self.parsed_point(spec, mode)? {
            Some(p) => vec![p.iter().map(S::from_rational).collect()],
            None => spec.domain.points(),
        })
    }

    /// Base point: `--point` if given, otherwise the domain base.
    fn base(&self, spec: &ProblemSpec, mode: Mode) -> Result<Vec<Rational>> {
        Ok(self.parsed_point(spec, mode)?.unwrap_or_else(|| spec.domain.base.clone()))
    }

    fn record(&self, run: &mut Run, spec: &ProblemSpec) {
        match &self.point {
            Some(p) => run.param("point", json!(p)),
            None => run.param("grid", json!(spec.domain.grid)),
        }
    }
}

fn parse_coordinate(s: &str, mode: Mode) -> Result<Rational> {
    match parse_rational(s) {
        Ok(q) => Ok(q),
        Err(e) if mode == Mode::Float => match s.trim().parse::<f64>() {
            Ok(x) => rational_from_f64(x),
            Err(_) => Err(e),
        },
        Err(e) => Err(e),
    }
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got {s:?}"))?;
    let idx = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((idx(a)?, idx(b)?))
}

fn parse_float(s: &str) -> Result<f64> {
    let q = parse_coordinate(s, Mode::Float)?;
    Ok(Scalar::to_f64(&q))
}

fn parse_params(s: &str) -> Result<SpectralParams> {
    let (l, r) = s
        .split_once(':')
        .ok_or_else(|| GeomError::Parse(format!("spectral parameters must look like lambda:rho, got {s:?}")))?;
    Ok(SpectralParams::new(parse_float(l)?, parse_float(r)?))
}

fn algebraic(args: &CommonArgs, command: &'static str, c: Option<&str>) -> Result<Run> {
    let mode = args.mode(false)?;
    let spec = args.load(mode)?;
    match mode {
        Mode::Rational => algebraic_in::<Rational>(args, command, c, spec, mode),
        Mode::Float => algebraic_in::<f64>(args, command, c, spec, mode),
    }
}

fn algebraic_in<S: Scalar>(
    args: &CommonArgs,
    command: &'static str,
    c: Option<&str>,
    spec: ProblemSpec,
    mode: Mode,
) -> Result<Run> {
    let mut run = Run::new(command, &spec, mode);
    let tol = spec.tolerances.algebra;
    let eta_inv = spec.eta_inv().clone();
    let require_phi = || {
        spec.phi()
            .ok_or_else(|| GeomError::Invalid(format!("{command} needs a potential `phi` in the problem file")))
    };
    if command == "algebra" {
        let point: Vec<S> = args.base(&spec, mode)?.iter().map(S::from_rational).collect();
        run.param("point", Value::Array(point.iter().map(scalar_json).collect()));
        let structure = match spec.phi() {
            Some(phi) => {
                let c = structure_constants(phi, &eta_inv, &point)?;
                let n = spec.n();
                json!((0..n)
                    .map(|k| (0..n)
                        .map(|i| (0..n).map(|j| scalar_json(c.get(k, i, j))).collect::<Vec<_>>())
                        .collect::<Vec<_>>())
                    .collect::<Vec<_>>())
            }
            None => Value::Null,
        };
        let w = weingarten_operators(&spec.psi(), &eta_inv, &point)?;
        let ops: Vec<Value> = w
            .operators
            .iter()
            .map(|m| json!(m.to_rows().iter().map(|r| r.iter().map(scalar_json).collect::<Vec<_>>()).collect::<Vec<_>>()))
            .collect();
        run.table("structure_constants", structure);
        run.table("weingarten", Value::Array(ops));
        return Ok(run);
    }
    args.record(&mut run, &spec);
    let points: Vec<Vec<S>> = args.points(&spec, mode)?;
    match command {
        "check-wdvv" => {
            let phi = require_phi()?;
            let eta = spec.eta().clone();
            let wdvv = run.timed("wdvv", || sweep("wdvv", &points, |p| wdvv_residual(phi, &eta_inv, p)))?;
            let assoc = run.timed("associativity", || {
                sweep("associativity", &points, |p| {
                    let mut r = associativity_residual(&structure_constants(phi, &eta_inv, p)?);
                    r.name = "associativity".into();
                    Ok(r)
                })
            })?;
            let inv = run.timed("invariance", || {
                sweep("invariance", &points, |p| {
                    let mut r = invariance_residual(&structure_constants(phi, &eta_inv, p)?, &eta)?;
                    r.name = "invariance".into();
                    Ok(r)
                })
            })?;
            for r in [wdvv, assoc, inv] {
                run.checks.push(CheckRow::residual(&r, tol));
            }
        }
        "check-gcr" => {
            let psi = spec.psi();
            let mu_inv = spec.mu_inv().clone();
            let gauss = run.timed("gauss", || {
                sweep("gauss", &points, |p| gauss_residual(&second_forms(&psi, p)?, &mu_inv))
            })?;
            let ricci = run.timed("ricci", || {
                sweep("ricci", &points, |p| ricci_residual(&second_forms(&psi, p)?, &eta_inv))
            })?;
            let field = FormField::Hessians(psi.clone());
            let codazzi = run.timed("codazzi", || sweep("codazzi", &points, |p| codazzi_residual(&field, p)))?;
            for r in [gauss, ricci, codazzi] {
                run.checks.push(CheckRow::residual(&r, tol));
            }
        }
        "check-reduction" => {
            let phi = require_phi()?;
            let c = match c {
                Some(text) => parse_coordinate(text, mode)?,
                None => spec.mu_scale().cloned().unwrap_or_else(|| rational(1, 1)),
            };
            run.param("c", Value::String(crate::scalar::format_rational(&c)));
            let check = run.timed("reduction", || reduction_check(phi, &eta_inv, &c, &points))?;
            let report = ResidualReport {
                name: "reduction_deviation".into(),
                value: check.max_deviation.clone(),
                worst_point: Vec::new(),
                worst_indices: Vec::new(),
            };
            run.checks.push(CheckRow::residual(&report, tol));
            run.table(
                "maxima",
                json!({
                    "gauss": scalar_json(&check.gauss_max),
                    "ricci": scalar_json(&check.ricci_max),
                    "wdvv": scalar_json(&check.wdvv_max),
                }),
            );
        }
        _ => unreachable!("dispatched above"),
    }
    Ok(run)
}

fn lax_holonomy(args: &LaxArgs) -> Result<Run> {
    let mode = args.common.mode(true)?;
    let spec = args.common.load(mode)?;
    let mut run = Run::new("lax-holonomy", &spec, mode);
    if !(args.loop_size.is_finite() && args.loop_size > 0.0) {
        return Err(GeomError::Invalid(format!("--loop-size must be positive, got {}", args.loop_size)));
    }
    let params = match &args.params {
        Some(list) => list.iter().map(|s| parse_params(s)).collect::<Result<Vec<_>>>()?,
        None => SpectralParams::default_grid(),
    };
    let base: Vec<f64> = args.common.base(&spec, mode)?.iter().map(Scalar::to_f64).collect();
    run.param("base", json!(base.iter().map(|x| num(*x)).collect::<Vec<_>>()));
    run.param("loop_size", num(args.loop_size));
    run.param("substeps", json!(args.substeps));

    let tol = spec.tolerances.algebra;
    let points: Vec<Vec<f64>> = spec.domain.points();
    let psi = spec.psi();
    let (eta_inv, mu_inv) = (spec.eta_inv().clone(), spec.mu_inv().clone());
    let (mu_rep, eta_rep) = run.timed("lax_consistency", || {
        let mu = sweep("lax_consistency_mu", &points, |p| Ok(consistency_residual(&psi, &eta_inv, &mu_inv, p)?.0))?;
        let eta = sweep("lax_consistency_eta", &points, |p| Ok(consistency_residual(&psi, &eta_inv, &mu_inv, p)?.1))?;
        Ok((mu, eta))
    })?;
    run.checks.push(CheckRow::residual(&mu_rep, tol));
    run.checks.push(CheckRow::residual(&eta_rep, tol));

    let system = LaxSystem::from_spec(&spec)?;
    let n = spec.n();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let rows = run.timed("holonomy", || {
        use rayon::prelude::*;
        params
            .par_iter()
            .map(|&p| {
                let mut best = (0.0f64, (0, 0));
                for &axes in &pairs {
                    let d = system.holonomy_defect(&base, args.loop_size, axes, p, args.substeps)?;
                    if d > best.0 || d.is_nan() {
                        best = (d, axes);
                    }
                }
                Ok(best)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let (mut worst, mut worst_idx) = (0.0f64, vec![]);
    for (k, (d, (i, j))) in rows.iter().enumerate() {
        if *d > worst || (worst_idx.is_empty() && k == 0) || d.is_nan() {
            worst = *d;
            worst_idx = vec![k, *i, *j];
        }
    }
    run.checks.push(CheckRow::float("holonomy", worst, Some(spec.tolerances.ode), &base, worst_idx));
    run.table(
        "holonomy",
        Value::Array(
            params
                .iter()
                .zip(&rows)
                .map(|(p, (d, (i, j)))| json!({"lambda": num(p.lambda), "rho": num(p.rho), "defect": num(*d), "axes": [i, j]}))
                .collect(),
        ),
    );

    if args.fit {
        let p = parse_params(&args.fit_params)?;
        let sizes: Vec<f64> = [0.5, 1.0, 2.0, 4.0].iter().map(|f| f * args.loop_size).collect();
        let defects = run.timed("scaling_fit", || {
            sizes
                .iter()
                .map(|&h| system.max_holonomy_defect(&base, h, &[p], args.substeps))
                .collect::<Result<Vec<_>>>()
        })?;
        let exponent = fit_exponent(&sizes, &defects);
        run.table(
            "scaling",
            json!({
                "lambda": num(p.lambda),
                "rho": num(p.rho),
                "loop_sizes": sizes.iter().map(|x| num(*x)).collect::<Vec<_>>(),
                "defects": defects.iter().map(|x| num(*x)).collect::<Vec<_>>(),
                "exponent": exponent.map_or(Value::Null, num),
            }),
        );
    }
    Ok(run)
}

/// Least-squares slope of `log d` against `log h`; `None` when any defect is not positive.
pub fn fit_exponent(sizes: &[f64], defects: &[f64]) -> Option<f64> {
    if sizes.len() < 2 || defects.iter().any(|d| d.is_nan() || *d <= 0.0) {
        return None;
    }
    let xs: Vec<f64> = sizes.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = defects.iter().map(|d| d.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Some(sxy / sxx)
}

fn reconstruct(args: &ReconstructArgs) -> Result<Run> {
    let mode = args.common.mode(true)?;
    let mut spec = args.common.load(mode)?;
    if let Some(base) = args.common.parsed_point(&spec, mode)? {
        spec = spec.with_domain(Domain {
            base,
            ..spec.domain.clone()
        })?;
    }
    let mut run = Run::new("reconstruct", &spec, mode);
    run.param("base", json!(spec.domain.base_f64().iter().map(|x| num(*x)).collect::<Vec<_>>()));
    run.param("grid", json!(spec.domain.grid));
    run.param("substeps", json!(args.substeps));
    run.param("fd_step", num(args.fd_step));

    let mut opts = SweepOptions::ascending(spec.n());
    opts.substeps = args.substeps;
    let grid = run.timed("integrate", || bonnet::integrate_frame_with(&spec, &opts))?;
    let form = grid.ambient_form().clone();
    let tol = &spec.tolerances;
    let base = spec.domain.base_f64();

    let metric = run.timed("induced_metric", || Ok(bonnet::verify_induced_metric(&grid, &form)))?;
    let forms = run.timed("second_forms", || bonnet::verify_second_forms(&grid, &form, args.fd_step))?;
    let torsion = run.timed("torsion", || bonnet::verify_torsion(&grid, &form, args.fd_step))?;
    let mut other = opts.clone();
    other.order.reverse();
    let path = run.timed("path_independence", || {
        Ok(grid.max_distance(&bonnet::integrate_frame_with(&spec, &other)?))
    })?;
    let drift = grid.gram_drift().into_iter().fold(0.0, f64::max);

    run.checks.push(CheckRow::float("induced_metric", metric, Some(tol.ode), &base, vec![]));
    run.checks.push(CheckRow::float("second_forms", forms, Some(tol.finite_difference), &base, vec![]));
    run.checks.push(CheckRow::float("torsion", torsion, Some(tol.finite_difference), &base, vec![]));
    run.checks.push(CheckRow::float("path_independence", path, Some(tol.ode), &base, vec![]));
    run.checks.push(CheckRow::float("gram_drift", drift, None, &base, vec![]));
    let (p, q) = form.signature();
    run.table("ambient_signature", json!([p, q]));
    run.table("nodes", json!(grid.shape().iter().product::<usize>()));

    if let Some(out) = &args.out {
        write_file(out, |w| bonnet::write_point_cloud(&grid, w, args.drift, args.frames))?;
        run.param("out", json!(out.display().to_string()));
    }
    Ok(run)
}

fn flows(args: &FlowArgs) -> Result<Run> {
    let mode = args.common.mode(true)?;
    let spec = args.common.load(mode)?;
    let mut run = Run::new("flows", &spec, mode);
    let system = HydroSystem::from_spec(&spec)?;
    let base: Vec<f64> = args.common.base(&spec, mode)?.iter().map(Scalar::to_f64).collect();
    let state = GridState::single_mode(args.points, &base, args.amplitude, args.mode)?;
    let cfg = EvolveConfig {
        dt: args.dt,
        steps: args.steps,
        filter: args.filter,
        allow_cfl_violation: args.allow_cfl,
    };
    let l = system.flows();
    let pairs: Vec<(usize, usize)> = match args.pair {
        Some((a, b)) => {
            if a >= l || b >= l {
                return Err(GeomError::Invalid(format!("--pair {a},{b} out of range (have {l} flows)")));
            }
            vec![(a, b)]
        }
        None => (0..l).flat_map(|a| (a + 1..l).map(move |b| (a, b))).collect(),
    };
    run.param("base", json!(base.iter().map(|x| num(*x)).collect::<Vec<_>>()));
    run.param("points", json!(args.points));
    run.param("dt", num(args.dt));
    run.param("steps", json!(args.steps));
    run.param("amplitude", num(args.amplitude));
    run.param("mode", json!(args.mode));
    run.param("filter", json!(args.filter));

    let evolutions = run.timed("evolve", || {
        use rayon::prelude::*;
        (0..l).into_par_iter().map(|a| system.evolve(&state, a, &cfg)).collect::<Result<Vec<_>>>()
    })?;
    let max_cfl = evolutions.iter().map(|e| e.max_cfl).fold(0.0, f64::max);
    run.checks.push(CheckRow::float("cfl", max_cfl, Some(CFL_LIMIT), &base, vec![]));

    let defects = run.timed("commutators", || {
        use rayon::prelude::*;
        pairs
            .par_iter()
            .map(|&(a, b)| system.commutator_defect(&state, a, b, &cfg))
            .collect::<Result<Vec<_>>>()
    })?;
    for (&(a, b), &d) in pairs.iter().zip(&defects) {
        run.checks
            .push(CheckRow::float(&format!("commutator_{a}_{b}"), d, args.tol_flow, &base, vec![a, b]));
    }
    run.table(
        "commutator",
        Value::Array(
            pairs
                .iter()
                .zip(&defects)
                .map(|(&(a, b), &d)| json!({"alpha": a, "beta": b, "defect": num(d)}))
                .collect(),
        ),
    );

    if let Some(out) = &args.out {
        write_file(out, |w| {
            writeln!(w, "flow,step,t,linf,rms")?;
            for (a, e) in evolutions.iter().enumerate() {
                for (k, (t, (linf, rms))) in e.norms.iter().enumerate() {
                    use crate::report::format_f64 as f;
                    writeln!(w, "{a},{k},{},{},{}", f(*t), f(*linf), f(*rms))?;
                }
            }
            Ok(())
        })?;
        run.param("out", json!(out.display().to_string()));
    }
    Ok(run)
}

fn write_file(path: &Path, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_of_exact_power_law() {
        let h = [0.1, 0.2, 0.4];
        let d: Vec<f64> = h.iter().map(|x: &f64| 3.0 * x.powi(2)).collect();
        assert!((fit_exponent(&h, &d).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(fit_exponent(&h, &[0.0, 1.0, 2.0]), None);
    }

    #[test]
    fn coordinates_accept_floats_only_in_float_mode() {
        assert_eq!(parse_coordinate("-1/2", Mode::Rational).unwrap(), rational(-1, 2));
        assert!(parse_coordinate("0.5", Mode::Rational).is_err());
        assert_eq!(parse_coordinate("0.5", Mode::Float).unwrap(), rational(1, 2));
        assert!(parse_params("1").is_err());
        assert_eq!(parse_params("-1:1/2").unwrap(), SpectralParams::new(-1.0, 0.5));
    }

    #[test]
    fn usage_errors_exit_two() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["wdvv", "no-such-command"], &mut out, &mut err), EXIT_INPUT);
        let v: Value = serde_json::from_slice(&err).unwrap();
        assert_eq!(v["error"]["kind"], "usage");
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["wdvv", "check-wdvv", "/nonexistent.json"], &mut out, &mut err), EXIT_INPUT);
        assert!(out.is_empty());
    }
}
