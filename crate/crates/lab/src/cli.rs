//! Argument parsing and dispatch.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use suita_core::bergman::{self, NumericConfig};
use suita_core::extension::{self, ExtensionSolution};
use suita_core::geometry::{self, Connectivity};
use suita_core::suita::{self, SuitaRecord};
use suita_core::variation::{self, VariationTrace, TRACE_TOL};
use suita_core::{green, mapping, quadrature, Complex64, DomainSpec, Error};

use crate::domain_json::{self, pair};
use crate::{selftest, threads};

#[derive(Parser, Debug)]
#[command(name = "suita-lab", version, about = "Bergman kernel, capacity and Suita ratio experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Domain as JSON, or @FILE to read it from a file.
    #[arg(long)]
    pub domain: Option<String>,
    #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_negative_numbers = true)]
    pub z0: Option<Vec<f64>>,
    #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_negative_numbers = true)]
    pub t: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Geometric level grid: |s| from MIN to MAX with N points (s = 0 is appended).
    #[arg(long = "s-geom", num_args = 3, value_names = ["MIN", "MAX", "N"])]
    pub s_geom: Option<Vec<f64>>,
    /// Quadrature resolution (number of angles).
    #[arg(long, default_value_t = quadrature::DEFAULT_RESOLUTION)]
    pub grid: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bergman kernel K(z0) or K(t, z0).
    Kernel {
        #[command(flatten)]
        common: Common,
        /// Gram route on a grid with the given degrees.
        #[arg(long)]
        numeric: bool,
        #[arg(long, default_value_t = 16)]
        deg_pos: usize,
        #[arg(long, default_value_t = 16)]
        deg_neg: usize,
        /// Write the Gram matrix as CSV (j,k,re,im).
        #[arg(long)]
        dump_gram: Option<PathBuf>,
        /// Report the reproducing-property residual on the grid.
        #[arg(long)]
        reproducing: bool,
    },
    /// Green function G(t, z0).
    Green {
        #[command(flatten)]
        common: Common,
        /// Boundary, harmonicity and symmetry residuals instead of a value.
        #[arg(long)]
        validate: bool,
    },
    /// Logarithmic capacity c(z0).
    Capacity {
        #[command(flatten)]
        common: Common,
        /// Re-extract from Green function probes.
        #[arg(long)]
        probe: bool,
        /// Analytic capacity of a centred disc (Möbius derivative).
        #[arg(long)]
        analytic: bool,
    },
    /// Suita ratio pi K / c^2.
    Ratio {
        #[command(flatten)]
        common: Common,
        /// Gram kernel and probe capacity only.
        #[arg(long)]
        numeric: bool,
        /// Curvature identity residual with this step.
        #[arg(long)]
        curvature_h: Option<f64>,
        /// Volume bound K(z0) Vol >= 1 on the grid.
        #[arg(long)]
        volume: bool,
    },
    /// Suita ratios at many points, as CSV.
    Scan {
        #[command(flatten)]
        common: Common,
        /// CSV file of points (re,im per line).
        #[arg(long)]
        points: Option<PathBuf>,
        /// N points on the circle of radius R about the origin.
        #[arg(long, num_args = 2, value_names = ["R", "N"])]
        ring: Option<Vec<f64>>,
    },
    /// Sublevel variation traces and the variational identities.
    Variation {
        #[command(flatten)]
        common: Common,
        /// Print the sublevel domain for --s.
        #[arg(long)]
        sublevel: bool,
        #[arg(long)]
        key_lemma: bool,
        /// PDE residual with this level step.
        #[arg(long)]
        pde: Option<f64>,
        #[arg(long)]
        capacity_scaling: bool,
    },
    /// Minimal-norm function with prescribed value at z0.
    Extension {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        numeric: bool,
        #[arg(long)]
        c_target: Option<f64>,
        #[arg(long)]
        bound: bool,
        #[arg(long, default_value_t = 16)]
        deg_pos: usize,
        #[arg(long, default_value_t = 16)]
        deg_neg: usize,
    },
    /// Riemann map of a sublevel from the kernel.
    Map {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        points: Option<PathBuf>,
        /// Number of generated sample points.
        #[arg(long, default_value_t = 10)]
        radial: usize,
        #[arg(long)]
        validate: bool,
        /// Möbius uniformiser of a centred disc.
        #[arg(long)]
        mobius: bool,
    },
    /// Runs the invariant suite.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    Validation(String, String),
    Numerical(String, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.tag().into(), e.to_string())
        } else {
            Failure::Numerical(e.tag().into(), e.to_string())
        }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation("invalid-argument".into(), msg.into())
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Validation("io".into(), e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Validation("io".into(), e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

impl Common {
    fn domain(&self) -> Result<DomainSpec, Failure> {
        let raw = self.domain.as_deref().ok_or_else(|| invalid("--domain is required"))?;
        let text = match raw.strip_prefix('@') {
            Some(path) => fs::read_to_string(path)?,
            None => raw.to_string(),
        };
        let d = domain_json::parse(&text).map_err(|m| Failure::Validation("invalid-domain".into(), m))?;
        d.validate()?;
        Ok(d)
    }

    fn z0(&self) -> Result<Complex64, Failure> {
        complex(&self.z0, "--z0")
    }

    fn t(&self) -> Result<Complex64, Failure> {
        complex(&self.t, "--t")
    }

    fn s(&self) -> Result<f64, Failure> {
        self.s.ok_or_else(|| invalid("--s is required"))
    }

    fn cfg(&self) -> NumericConfig {
        NumericConfig { resolution: self.grid, seed: self.seed, ..NumericConfig::default() }
    }

    fn levels(&self) -> Result<Vec<f64>, Failure> {
        let mut v = match &self.s_geom {
            Some(g) => {
                let n = g[2];
                if n.fract() != 0.0 || n < 2.0 {
                    return Err(invalid("--s-geom N must be an integer >= 2"));
                }
                variation::geometric_levels(g[0], g[1], n as usize)?
            }
            None => variation::geometric_levels(0.05, 3.0, 12)?,
        };
        v.push(0.0);
        Ok(v)
    }
}

fn complex(v: &Option<Vec<f64>>, flag: &str) -> Result<Complex64, Failure> {
    match v.as_deref() {
        Some([re, im]) if re.is_finite() && im.is_finite() => Ok(Complex64::new(*re, *im)),
        Some(_) => Err(invalid(format!("{flag} needs two finite numbers"))),
        None => Err(invalid(format!("{flag} is required"))),
    }
}

fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json(out: &Option<PathBuf>, stdout: &mut dyn Write, v: &Value) -> Result<(), Failure> {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialise");
    s.push('\n');
    emit(out, stdout, &s)
}

pub fn record_json(r: &SuitaRecord) -> Value {
    json!({
        "z0": pair(r.z0),
        "K": r.k,
        "c": r.c,
        "ratio": r.ratio,
        "curvature": r.curvature,
        "method_K": r.method_k.tag(),
        "method_c": r.method_c.tag(),
    })
}

pub fn scan_csv(records: &[SuitaRecord]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["z0_re", "z0_im", "K", "c", "ratio", "curvature", "method_K", "method_c"])?;
    for r in records {
        w.write_record([
            r.z0.re.to_string(),
            r.z0.im.to_string(),
            r.k.to_string(),
            r.c.to_string(),
            r.ratio.to_string(),
            r.curvature.to_string(),
            r.method_k.tag().to_string(),
            r.method_c.tag().to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| invalid(e.to_string()))?).expect("csv is utf-8"))
}

pub fn trace_csv(trace: &VariationTrace) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["re_tau", "logK", "c_tau", "logK_plus_2tau", "method"])?;
    for s in &trace.samples {
        w.write_record([
            s.re_tau.to_string(),
            s.logk.to_string(),
            s.c_tau.to_string(),
            s.logk_plus_2tau.to_string(),
            s.kernel_method.tag().to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| invalid(e.to_string()))?).expect("csv is utf-8"))
}

fn read_points(path: &PathBuf) -> Result<Vec<Complex64>, Failure> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
    let mut pts = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(invalid("point files need two columns"));
        }
        let re: f64 = rec[0].parse().map_err(|_| invalid("bad number in point file"))?;
        let im: f64 = rec[1].parse().map_err(|_| invalid("bad number in point file"))?;
        pts.push(Complex64::new(re, im));
    }
    Ok(pts)
}

/// Trace report document.
pub fn trace_report(trace: &VariationTrace, tol: f64) -> Result<Value, Failure> {
    let conv = variation::convexity_report(trace, tol)?;
    let mono = variation::monotone_report(trace, tol)?;
    let harm = variation::harmonicity_residual(trace)?;
    Ok(json!({
        "convexity": {
            "min_second_diff": conv.min_second_diff,
            "max_abs_second_diff": conv.max_abs_second_diff,
            "slope_tail": conv.slope_tail,
            "pass": conv.pass,
        },
        "monotone": {
            "max_decrease": mono.max_decrease,
            "max_excess": mono.max_excess,
            "terminal_gap": mono.terminal_gap,
            "constant": mono.constant,
            "pass": mono.pass,
        },
        "harmonicity_residual": harm,
        "gaps": trace.gaps.iter().map(|(s, e)| json!({"re_tau": s, "error": e.tag()})).collect::<Vec<_>>(),
    }))
}

/// Computes a trace with samples in parallel (order preserved).
pub fn parallel_trace(base: &DomainSpec, z0: Complex64, levels: &[f64], cfg: &NumericConfig) -> Result<VariationTrace, Failure> {
    use rayon::prelude::*;
    if !base.contains(z0)? {
        return Err(Error::NotInDomain.into());
    }
    let results = threads::pool().install(|| {
        levels.par_iter().map(|s| variation::trace_sample(base, z0, *s, cfg)).collect::<Vec<_>>()
    });
    Ok(variation::assemble_trace(z0, levels, results)?)
}

fn solution_json(s: &ExtensionSolution) -> Value {
    let mut v = json!({"norm": s.norm, "value_at_pole": pair(s.value_at_pole), "route": s.route.tag()});
    if let Some(c) = &s.coefficients {
        v["coefficients"] = Value::Array(c.iter().map(|x| pair(*x)).collect());
    }
    v
}

/// Runs the tool and returns its exit code; regular output goes to `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(f) => {
            let (code, tag, msg) = match f {
                Failure::Validation(t, m) => (2, t, m),
                Failure::Numerical(t, m) => (3, t, m),
            };
            let doc = json!({"error": tag, "message": msg});
            let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&doc).expect("json"));
            code
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Kernel { common, numeric, deg_pos, deg_neg, dump_gram, reproducing } => {
            let d = common.domain()?;
            let z0 = common.z0()?;
            if reproducing {
                let g = quadrature::build_quadrature(&d, common.grid, common.seed)?;
                let r = bergman::reproducing_residual(&d, z0, &g)?;
                emit_json(&common.out, stdout, &json!({"reproducing_residual": r}))?;
                return Ok(0);
            }
            let t = if common.t.is_some() { Some(common.t()?) } else { None };
            let k = if numeric || dump_gram.is_some() {
                let g = quadrature::build_quadrature(&d, common.grid, common.seed)?;
                let basis = bergman::numeric_basis(&d, deg_pos, deg_neg, &g)?;
                if let Some(p) = &dump_gram {
                    let mut w = csv::Writer::from_path(p)?;
                    w.write_record(["j", "k", "re", "im"])?;
                    for j in 0..basis.gram.nrows() {
                        for kk in 0..basis.gram.ncols() {
                            let v = basis.gram[(j, kk)];
                            w.write_record([j.to_string(), kk.to_string(), v.re.to_string(), v.im.to_string()])?;
                        }
                    }
                    w.flush()?;
                }
                bergman::kernel_numeric(&basis, t.unwrap_or(z0), z0)?
            } else {
                match t {
                    Some(t) => bergman::kernel_offdiag_with(&d, t, z0, &common.cfg())?,
                    None => bergman::kernel_diag_with(&d, z0, &common.cfg())?,
                }
            };
            emit_json(
                &common.out,
                stdout,
                &json!({"K": pair(k.value), "method": k.method.tag(), "err": k.error_estimate, "condition": k.condition}),
            )?;
            Ok(0)
        }
        Command::Green { common, validate } => {
            let d = common.domain()?;
            let z0 = common.z0()?;
            if validate {
                let r = green::validate_green(&d, z0, common.tol.unwrap_or(1e-8));
                emit_json(
                    &common.out,
                    stdout,
                    &json!({
                        "boundary_residual": r.boundary_residual,
                        "harmonicity_residual": r.harmonicity_residual,
                        "symmetry_residual": r.symmetry_residual,
                        "tol": r.tol,
                        "pass": r.pass,
                    }),
                )?;
                return Ok(if r.pass { 0 } else { 3 });
            }
            let g = green::green_value(&d, common.t()?, z0)?;
            emit_json(&common.out, stdout, &json!({"G": g}))?;
            Ok(0)
        }
        Command::Capacity { common, probe, analytic } => {
            let d = common.domain()?;
            let z0 = common.z0()?;
            if analytic {
                let radius = match d {
                    DomainSpec::UnitDisc => 1.0,
                    DomainSpec::Disc { center, radius } if center == Complex64::new(0.0, 0.0) => radius,
                    _ => return Err(invalid("--analytic needs a disc centred at 0")),
                };
                let v = suita::analytic_capacity_disc(radius, z0)?;
                emit_json(&common.out, stdout, &json!({"analytic_capacity": v}))?;
                return Ok(0);
            }
            let c = if probe { green::probe_capacity(&d, z0)? } else { green::log_capacity(&d, z0)? };
            emit_json(
                &common.out,
                stdout,
                &json!({"capacity": c.value, "err": c.extrapolation_error, "probe_radii": c.probe_radii}),
            )?;
            Ok(0)
        }
        Command::Ratio { common, numeric, curvature_h, volume } => {
            let d = common.domain()?;
            let z0 = common.z0()?;
            if let Some(h) = curvature_h {
                let r = suita::curvature_residual(&d, z0, h)?;
                emit_json(&common.out, stdout, &json!({"curvature_residual": r}))?;
                return Ok(0);
            }
            if volume {
                let g = quadrature::build_quadrature(&d, common.grid, common.seed)?;
                let r = suita::volume_bound_check(&d, z0, &g, common.tol.unwrap_or(1e-3))?;
                emit_json(
                    &common.out,
                    stdout,
                    &json!({"K": r.k, "volume": r.volume, "product": r.product, "pass": r.pass, "equality_expected": r.equality_expected}),
                )?;
                return Ok(0);
            }
            let r = if numeric { suita::suita_ratio_numeric(&d, z0, &common.cfg())? } else { suita::suita_ratio_with(&d, z0, &common.cfg())? };
            emit_json(&common.out, stdout, &record_json(&r))?;
            Ok(0)
        }
        Command::Scan { common, points, ring } => {
            use rayon::prelude::*;
            let d = common.domain()?;
            let pts = match (&points, &ring) {
                (Some(p), _) => read_points(p)?,
                (None, Some(r)) => {
                    if r[1].fract() != 0.0 || r[1] < 0.0 {
                        return Err(invalid("--ring N must be a non-negative integer"));
                    }
                    let n = r[1] as usize;
                    (0..n).map(|k| Complex64::from_polar(r[0], 2.0 * std::f64::consts::PI * k as f64 / n as f64)).collect()
                }
                (None, None) => match &common.z0 {
                    Some(_) => vec![common.z0()?],
                    None => Vec::new(),
                },
            };
            let cfg = common.cfg();
            let recs: Vec<Result<SuitaRecord, Error>> =
                threads::pool().install(|| pts.par_iter().map(|z| suita::suita_ratio_with(&d, *z, &cfg)).collect());
            let recs = recs.into_iter().collect::<Result<Vec<_>, _>>()?;
            emit(&common.out, stdout, &scan_csv(&recs)?)?;
            Ok(0)
        }
        Command::Variation { common, sublevel, key_lemma, pde, capacity_scaling } => {
            let d = common.domain()?;
            let z0 = common.z0()?;
            if sublevel {
                let s = common.s()?;
                let sub = variation::sublevel_domain(&d, z0, s)?;
                let disc = geometry::as_disc(&sub)?;
                let conn = geometry::connectivity(&sub)?;
                emit_json(
                    &common.out,
                    stdout,
                    &json!({
                        "domain": domain_json::to_value(&sub),
                        "is_disc": disc.is_some(),
                        "disc": disc.map(|(c, r)| json!({"center": pair(c), "radius": r})),
                        "connectivity": if conn == Connectivity::Simply { "simply" } else { "doubly" },
                    }),
                )?;
                return Ok(0);
            }
            if key_lemma {
                let r = variation::key_lemma_residual(&d, z0, common.t()?, common.s()?)?;
                emit_json(&common.out, stdout, &json!({"key_lemma_residual": r}))?;
                return Ok(0);
            }
            if let Some(h) = pde {
                let r = variation::pde_residual(&d, z0, common.t()?, common.s()?, h)?;
                emit_json(&common.out, stdout, &json!({"pde_residual": r}))?;
                return Ok(0);
            }
            if capacity_scaling {
                let r = variation::capacity_scaling_check(&d, z0, common.s()?)?;
                emit_json(&common.out, stdout, &json!({"capacity_scaling_residual": r}))?;
                return Ok(0);
            }
            let levels = common.levels()?;
            let trace = parallel_trace(&d, z0, &levels, &common.cfg())?;
            let mut report = trace_report(&trace, common.tol.unwrap_or(TRACE_TOL))?;
            match &common.out {
                Some(p) => fs::write(p, trace_csv(&trace)?)?,
                None => {
                    report["trace"] = Value::Array(
                        trace
                            .samples
                            .iter()
                            .map(|s| {
                                json!({"re_tau": s.re_tau, "logK": s.logk, "c_tau": s.c_tau, "logK_plus_2tau": s.logk_plus_2tau, "method": s.kernel_method.tag()})
                            })
                            .collect(),
                    )
                }
            }
            emit_json(&None, stdout, &report)?;
            Ok(0)
        }
        Command::Extension { common, numeric, c_target, bound, deg_pos, deg_neg } => {
            let d = common.domain()?;
            let z0 = common.z0()?;
            if bound {
                let r = extension::extension_bound_check(&d, z0, common.tol.unwrap_or(1e-8))?;
                emit_json(
                    &common.out,
                    stdout,
                    &json!({"norm": r.norm, "bound": r.bound, "pass": r.pass, "equality": r.equality}),
                )?;
                return Ok(0);
            }
            let sol = if numeric {
                let g = quadrature::build_quadrature(&d, common.grid, common.seed)?;
                let hole = geometry::connectivity(&d)? == Connectivity::Doubly;
                let basis = bergman::numeric_basis(&d, deg_pos, if hole { deg_neg } else { 0 }, &g)?;
                let c = match c_target {
                    Some(c) => c,
                    None => green::log_capacity(&d, z0)?.value,
                };
                extension::minimal_extension_numeric(&basis, &g, z0, c)?
            } else {
                extension::minimal_extension_closed(&d, z0)?
            };
            emit_json(&common.out, stdout, &solution_json(&sol))?;
            Ok(0)
        }
        Command::Map { common, points, radial, validate, mobius } => {
            let d = common.domain()?;
            let z0 = common.z0()?;
            if mobius {
                let radius = match d {
                    DomainSpec::UnitDisc => 1.0,
                    DomainSpec::Disc { center, radius } if center == Complex64::new(0.0, 0.0) => radius,
                    _ => return Err(invalid("--mobius needs a disc centred at 0")),
                };
                let m = mapping::local_uniformizer_disc(radius, z0)?;
                let mut v = json!({"radius": radius, "z0": pair(z0), "derivative_at_pole": m.derivative(z0).re});
                if common.t.is_some() {
                    v["m_t"] = pair(m.eval(common.t()?));
                }
                emit_json(&common.out, stdout, &v)?;
                return Ok(0);
            }
            let s = common.s()?;
            let pts = match &points {
                Some(p) => read_points(p)?,
                None => sample_points(&d, z0, s, radial)?,
            };
            let map = {
                use rayon::prelude::*;
                let per: Vec<_> = threads::pool().install(|| {
                    pts.par_iter().map(|t| mapping::riemann_map_from_kernel(&d, z0, s, std::slice::from_ref(t))).collect()
                });
                let mut samples = Vec::new();
                let mut head = None;
                for m in per {
                    let m = m?;
                    samples.extend(m.samples.iter().cloned());
                    head.get_or_insert(m);
                }
                match head {
                    Some(mut m) => {
                        m.samples = samples;
                        m
                    }
                    None => mapping::riemann_map_from_kernel(&d, z0, s, &[])?,
                }
            };
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["t_re", "t_im", "f0_re", "f0_im"])?;
            for (t, f) in &map.samples {
                w.write_record([t.re.to_string(), t.im.to_string(), f.re.to_string(), f.im.to_string()])?;
            }
            let text = String::from_utf8(w.into_inner().map_err(|e| invalid(e.to_string()))?).expect("utf-8");
            if validate {
                let r = mapping::map_validation(&map, &d, z0, s)?;
                if let Some(p) = &common.out {
                    fs::write(p, &text)?;
                }
                emit_json(
                    &None,
                    stdout,
                    &json!({
                        "modulus_residual": r.modulus_residual,
                        "value_at_pole": r.value_at_pole,
                        "derivative_positive": r.derivative_positive,
                        "corollary_residual": r.corollary_residual,
                        "derivative_at_pole": map.derivative_at_pole,
                        "pass": r.pass,
                    }),
                )?;
                return Ok(if r.pass { 0 } else { 3 });
            }
            emit(&common.out, stdout, &text)?;
            Ok(0)
        }
        Command::Selftest { seed, out } => {
            let report = selftest::run_suite(seed);
            emit_json(&out, stdout, &report.to_json())?;
            Ok(if report.pass() { 0 } else { 1 })
        }
    }
}

/// `n` points spread over the sublevel: rings at 20..90% of the way to the
/// boundary of the resolved disc.
fn sample_points(base: &DomainSpec, z0: Complex64, s: f64, n: usize) -> Result<Vec<Complex64>, Failure> {
    let sub = variation::sublevel_domain(base, z0, s)?;
    let Some((c, r)) = geometry::as_disc(&sub)? else {
        return Err(Error::Unsupported("sample generation needs a disc sublevel; pass --points".into()).into());
    };
    let d = z0 - c;
    Ok((0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n.max(1) as f64;
            let e = Complex64::from_polar(1.0, th);
            let b = (d.conj() * e).re;
            let rmax = -b + (b * b + r * r - d.norm_sqr()).sqrt();
            let frac = 0.2 + 0.7 * (k as f64 + 0.5) / n as f64;
            z0 + e * (rmax * frac)
        })
        .collect())
}

/// Operation table: every library operation with a command line reaching it.
pub const DISPATCH: &[(&str, &[&str])] = &[
    ("contains", &["variation", "--domain", r#"{"type":"annulus","q":0.2}"#, "--z0", "0.5", "0", "--s", "-0.005", "--sublevel"]),
    ("build_quadrature", &["ratio", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0", "0", "--volume", "--grid", "64"]),
    ("puncture", &["ratio", "--domain", r#"{"type":"punctured","base":{"type":"unit_disc"},"punctures":[[0.3,0]],"excision_radius":0.001}"#, "--z0", "0.6", "0", "--grid", "64"]),
    ("green_value", &["green", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0", "0", "--t", "0.5", "0"]),
    ("log_capacity", &["capacity", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0.6", "0"]),
    ("validate_green", &["green", "--domain", r#"{"type":"annulus","q":0.3}"#, "--z0", "0.5", "0", "--validate", "--tol", "1e-6"]),
    ("kernel_diag", &["kernel", "--domain", r#"{"type":"annulus","q":0.25}"#, "--z0", "0.5", "0"]),
    ("kernel_offdiag", &["kernel", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0.3", "0", "--t", "0.5", "0"]),
    ("numeric_basis", &["kernel", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0", "0", "--numeric", "--deg-pos", "12", "--deg-neg", "0", "--grid", "64"]),
    ("kernel_numeric", &["kernel", "--domain", r#"{"type":"annulus","q":0.5}"#, "--z0", "0.7", "0", "--numeric", "--grid", "64"]),
    ("reproducing_residual", &["kernel", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0.5", "0", "--reproducing", "--grid", "128"]),
    ("suita_ratio", &["ratio", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0.6", "0"]),
    ("curvature_residual", &["ratio", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0.2", "0", "--curvature-h", "1e-3"]),
    ("analytic_capacity_disc", &["capacity", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0.6", "0", "--analytic"]),
    ("volume_bound_check", &["ratio", "--domain", r#"{"type":"annulus","q":0.3}"#, "--z0", "0.5", "0", "--volume", "--grid", "64"]),
    ("suita_scan", &["scan", "--domain", r#"{"type":"unit_disc"}"#, "--ring", "0.3", "4"]),
    ("sublevel_domain", &["variation", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0.5", "0", "--s", "-2", "--sublevel"]),
    ("variation_trace", &["variation", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0", "0", "--s-geom", "1", "3", "3"]),
    ("convexity_report", &["variation", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0.3", "0", "--s-geom", "0.5", "2", "4"]),
    ("monotone_report", &["variation", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0.3", "0", "--s-geom", "0.5", "2", "4"]),
    ("harmonicity_residual", &["variation", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0.3", "0", "--s-geom", "0.5", "2", "4"]),
    ("key_lemma_residual", &["variation", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0.3", "0", "--t", "0.35", "0", "--s", "-0.5", "--key-lemma"]),
    ("pde_residual", &["variation", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0", "0", "--t", "0.1", "0", "--s", "-1", "--pde", "1e-3"]),
    ("capacity_scaling_check", &["variation", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0.4", "0", "--s", "-0.5", "--capacity-scaling"]),
    ("minimal_extension_closed", &["extension", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0.5", "0"]),
    ("minimal_extension_numeric", &["extension", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0", "0", "--numeric", "--c-target", "1", "--grid", "64"]),
    ("extension_bound_check", &["extension", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0.3", "0", "--bound"]),
    ("local_uniformizer_disc", &["map", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0.5", "0", "--mobius"]),
    ("riemann_map_from_kernel", &["map", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0.3", "0", "--s", "-0.7", "--radial", "5"]),
    ("map_validation", &["map", "--domain", r#"{"type":"unit_disc"}"#, "--z0", "0", "0", "--s", "-1", "--radial", "5", "--validate"]),
];
