//! Command-line front end: single evaluations, figure-data sweeps, scaling
//! fits and the verification suite. Output is deterministic: identical
//! configurations produce byte-identical files.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{
    closed_form, oracle_chsh, oracle_chsh_direct, oracle_discord, oracle_mid, oracle_min_gqd,
    oracle_negativity, oracle_quantum_deficit, MeasureId,
};
use crate::rgflow::{flow, ground_state, verify_effective_hamiltonian, Coupling, Saturation};
use crate::scaling::{fit_scaling, scaling_points, sweep, GridSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_FIT_QUALITY: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

/// Default closed-form-vs-oracle tolerance of `verify`.
pub const VERIFY_TOL: f64 = 1e-9;
/// Tolerance for the optimization-limited discord oracle.
pub const VERIFY_TOL_DISCORD: f64 = 1e-6;
/// Tolerance between the Horodecki value and the direct CHSH maximization.
pub const VERIFY_TOL_CHSH_DIRECT: f64 = 1e-4;
/// Tolerance of the effective-Hamiltonian projection check.
pub const VERIFY_TOL_PROJECTION: f64 = 1e-8;
/// Minimal acceptable fit quality of a scaling run.
pub const FIT_QUALITY_THRESHOLD: f64 = 0.999;

const DISCORD_RESOLUTION: usize = 64;

#[derive(Parser)]
#[command(
    name = "qrgitf",
    version,
    about = "Quantum renormalization group analysis of the transverse-field Ising chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one measure at a single field value and flow step
    Measure(MeasureArgs),
    /// Tabulate measures over a field grid at several flow steps (CSV)
    Sweep(SweepArgs),
    /// Fit the critical exponent from the derivative extrema (JSON)
    Scaling(ScalingArgs),
    /// Run the closed-form-vs-oracle and projection checks
    Verify(VerifyArgs),
}

#[derive(Args)]
struct MeasureArgs {
    /// Optional JSON file supplying any of the flags; flags win on conflict
    #[arg(long)]
    config: Option<PathBuf>,
    /// Measure id: neg, qd, mid, min, gqd, qde or chsh
    #[arg(long)]
    measure: Option<String>,
    /// Transverse-field strength g >= 0
    #[arg(long)]
    g: Option<f64>,
    /// Number of coarse-graining steps
    #[arg(long)]
    steps: Option<u32>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Measure id or `all`
    #[arg(long)]
    measure: Option<String>,
    #[arg(long)]
    g_min: Option<f64>,
    #[arg(long)]
    g_max: Option<f64>,
    /// Grid size (odd, >= 3)
    #[arg(long)]
    points: Option<usize>,
    /// Step list: `a..b` (inclusive), `a,b,c` or a single step
    #[arg(long)]
    steps: Option<String>,
    /// Output CSV path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScalingArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Measure id
    #[arg(long)]
    measure: Option<String>,
    /// Step list: `a..b` (inclusive), `a,b,c` or a single step
    #[arg(long)]
    steps: Option<String>,
    /// Output JSON path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Replace every comparison tolerance by this value
    #[arg(long)]
    tol: Option<f64>,
}

/// Keys accepted in the optional JSON config file. Explicit flags override
/// whatever the file supplies.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub measure: Option<String>,
    pub g: Option<f64>,
    pub g_min: Option<f64>,
    pub g_max: Option<f64>,
    pub points: Option<usize>,
    pub steps: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub tol: Option<f64>,
}

impl RunConfig {
    fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Configuration(format!("config {}: {e}", p.display())))
            }
        }
    }

    fn expect_format(&self, required: &str) -> Result<()> {
        match self.format.as_deref() {
            None => Ok(()),
            Some(f) if f == required => Ok(()),
            Some(f) => Err(Error::Configuration(format!(
                "this command writes {required}, config asks for {f}"
            ))),
        }
    }
}

/// Parse a step specification: `a..b` inclusive, a comma list, or one number.
/// The resulting list must be non-empty and strictly ascending.
pub fn parse_steps(list: &str) -> Result<Vec<u32>> {
    let bad = |msg: &str| Error::Configuration(format!("step list `{list}`: {msg}"));
    let steps: Vec<u32> = if let Some((a, b)) = list.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|_| bad("bad range start"))?;
        let b: u32 = b.trim().parse().map_err(|_| bad("bad range end"))?;
        if a > b {
            return Err(bad("range start exceeds end"));
        }
        (a..=b).collect()
    } else if list.contains(',') {
        list.split(',')
            .map(|s| s.trim().parse::<u32>().map_err(|_| bad("bad entry")))
            .collect::<Result<_>>()?
    } else {
        vec![list.trim().parse().map_err(|_| bad("bad step"))?]
    };
    if steps.is_empty() {
        return Err(bad("empty"));
    }
    if !steps.windows(2).all(|w| w[0] < w[1]) {
        return Err(bad("must be strictly ascending"));
    }
    Ok(steps)
}

/// Format with a fixed number of significant digits, in plain decimal
/// notation for ordinary magnitudes and scientific notation beyond 1e15.
/// Deterministic and diff-friendly; zero prints as `0`.
pub fn fmt_sig(value: f64, digits: usize) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    if value.abs() >= 1e15 {
        return format!("{value:.prec$e}", prec = digits.saturating_sub(1));
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    format!("{value:.decimals$}")
}

/// Entry point used by `main` and by tests; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(Error::Io(e)) => {
            eprintln!("qrgitf: i/o error: {e}");
            EXIT_IO
        }
        Err(Error::Configuration(msg)) | Err(Error::Domain(msg)) => {
            eprintln!("qrgitf: {msg}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("qrgitf: {e}");
            EXIT_VERIFY_FAILED
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Measure(args) => {
            let cfg = RunConfig::load(args.config.as_deref())?;
            let measure = parse_measure(args.measure.or(cfg.measure))?;
            let g = args
                .g
                .or(cfg.g)
                .ok_or_else(|| Error::Configuration("--g is required".into()))?;
            let steps = match (args.steps, cfg.steps.as_deref()) {
                (Some(n), _) => n,
                (None, Some(s)) => s.trim().parse().map_err(|_| {
                    Error::Configuration(format!("measure takes a single step count, got `{s}`"))
                })?,
                (None, None) => 0,
            };
            println!("{}", cmd_measure(measure, g, steps)?);
            Ok(EXIT_OK)
        }
        Command::Sweep(args) => {
            let cfg = RunConfig::load(args.config.as_deref())?;
            cfg.expect_format("csv")?;
            let selection = parse_selection(args.measure.or(cfg.measure.clone()))?;
            let grid = GridSpec::new(
                args.g_min.or(cfg.g_min).unwrap_or(0.0),
                args.g_max.or(cfg.g_max).unwrap_or(2.5),
                args.points.or(cfg.points).unwrap_or(501),
            )?;
            let steps = parse_steps(
                args.steps
                    .or(cfg.steps)
                    .ok_or_else(|| Error::Configuration("--steps is required".into()))?
                    .as_str(),
            )?;
            let out = args
                .out
                .or(cfg.out)
                .ok_or_else(|| Error::Configuration("--out is required".into()))?;
            let csv = render_sweep_csv(&selection, &grid, &steps)?;
            std::fs::write(&out, csv)?;
            Ok(EXIT_OK)
        }
        Command::Scaling(args) => {
            let cfg = RunConfig::load(args.config.as_deref())?;
            cfg.expect_format("json")?;
            let measure = parse_measure(args.measure.or(cfg.measure.clone()))?;
            let steps = parse_steps(args.steps.or(cfg.steps).as_deref().unwrap_or("4..10"))?;
            let out = args
                .out
                .or(cfg.out)
                .ok_or_else(|| Error::Configuration("--out is required".into()))?;
            let (json, r_squared) = cmd_scaling(measure, &steps)?;
            std::fs::write(&out, json)?;
            if r_squared < FIT_QUALITY_THRESHOLD {
                eprintln!(
                    "qrgitf: fit quality r^2 = {r_squared:.6} below {FIT_QUALITY_THRESHOLD}; \
                     data written to {} anyway",
                    out.display()
                );
                return Ok(EXIT_FIT_QUALITY);
            }
            Ok(EXIT_OK)
        }
        Command::Verify(args) => {
            let cfg = RunConfig::load(args.config.as_deref())?;
            let report = cmd_verify(args.tol.or(cfg.tol))?;
            print!("{}", report.text);
            Ok(if report.failures == 0 {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            })
        }
    }
}

fn parse_measure(raw: Option<String>) -> Result<MeasureId> {
    raw.ok_or_else(|| Error::Configuration("--measure is required".into()))?
        .parse()
}

fn parse_selection(raw: Option<String>) -> Result<Vec<MeasureId>> {
    let raw = raw.ok_or_else(|| Error::Configuration("--measure is required".into()))?;
    if raw == "all" {
        Ok(MeasureId::ALL.to_vec())
    } else {
        Ok(vec![raw.parse()?])
    }
}

/// One-line record of a single evaluation.
pub fn cmd_measure(measure: MeasureId, g: f64, steps: u32) -> Result<String> {
    let fc = flow(g, steps)?;
    let v = closed_form(measure, &fc);
    let saturated = match fc.saturation() {
        Saturation::None => "none",
        Saturation::Ordered => "ordered",
        Saturation::Disordered => "disordered",
    };
    Ok(format!(
        "measure={} g={} steps={} log_g={} saturated={} value={} units={}",
        measure,
        fmt_sig(g, 9),
        steps,
        fmt_sig(fc.log_g(), 9),
        saturated,
        fmt_sig(v.value, 9),
        v.units
    ))
}

/// CSV table `g,step,measure,value,dvalue_dg`, one row per
/// (grid point, step, measure), measures outermost.
pub fn render_sweep_csv(
    measures: &[MeasureId],
    grid: &GridSpec,
    steps: &[u32],
) -> Result<String> {
    let mut out = String::from("g,step,measure,value,dvalue_dg\n");
    for &measure in measures {
        for &step in steps {
            let s = sweep(measure, grid, step)?;
            for i in 0..grid.points() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    fmt_sig(grid.point(i), 9),
                    step,
                    measure,
                    fmt_sig(s.values[i], 9),
                    fmt_sig(s.derivative[i], 9)
                );
            }
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct ScalingPointOut {
    n: u32,
    #[serde(rename = "N")]
    system_size: u64,
    g_ext: f64,
    abs_deriv: f64,
}

#[derive(Serialize)]
struct ScalingOut {
    measure: String,
    points: Vec<ScalingPointOut>,
    theta: f64,
    intercept: f64,
    r_squared: f64,
    /// Records that the CHSH curves use the Horodecki-criterion value.
    chsh_convention: &'static str,
}

/// The scaling fit serialized as JSON, plus the fit quality for the exit
/// code decision. Data is produced even when the fit quality is poor.
pub fn cmd_scaling(measure: MeasureId, steps: &[u32]) -> Result<(String, f64)> {
    let fit = fit_scaling(scaling_points(measure, steps)?)?;
    let out = ScalingOut {
        measure: measure.key().to_string(),
        points: fit
            .points
            .iter()
            .map(|p| ScalingPointOut {
                n: p.step,
                system_size: p.system_size,
                g_ext: p.g_ext,
                abs_deriv: p.abs_deriv,
            })
            .collect(),
        theta: (fit.theta * 1e6).round() / 1e6,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        chsh_convention: "horodecki",
    };
    let mut json = serde_json::to_string_pretty(&out)
        .map_err(|e| Error::Data(format!("serialization: {e}")))?;
    json.push('\n');
    Ok((json, fit.r_squared))
}

/// Tolerances of the verification suite; `uniform` replaces all of them.
#[derive(Debug, Clone, Copy)]
pub struct VerifyTolerances {
    pub closed_vs_oracle: f64,
    pub discord: f64,
    pub chsh_direct: f64,
    pub projection: f64,
}

impl VerifyTolerances {
    pub fn default_set() -> Self {
        Self {
            closed_vs_oracle: VERIFY_TOL,
            discord: VERIFY_TOL_DISCORD,
            chsh_direct: VERIFY_TOL_CHSH_DIRECT,
            projection: VERIFY_TOL_PROJECTION,
        }
    }

    pub fn uniform(tol: f64) -> Self {
        Self {
            closed_vs_oracle: tol,
            discord: tol,
            chsh_direct: tol,
            projection: tol,
        }
    }
}

pub struct VerifyReport {
    pub failures: usize,
    pub text: String,
}

/// Compare every closed form against its oracle on 101 evenly spaced fields
/// in [0, 2.5], check the direct CHSH maximization against the Horodecki
/// value, and run the effective-Hamiltonian projection check.
pub fn cmd_verify(tol_override: Option<f64>) -> Result<VerifyReport> {
    let tols = match tol_override {
        Some(t) => {
            if !t.is_finite() || t <= 0.0 {
                return Err(Error::Configuration(format!(
                    "tolerance must be positive, got {t}"
                )));
            }
            VerifyTolerances::uniform(t)
        }
        None => VerifyTolerances::default_set(),
    };
    let report = run_verification(&tols)?;
    Ok(report)
}

pub fn run_verification(tols: &VerifyTolerances) -> Result<VerifyReport> {
    let mut text = String::new();
    let mut failures = 0usize;
    let fields: Vec<f64> = (0..101).map(|i| (i as f64 * 2.5) / 100.0).collect();

    struct Check {
        label: &'static str,
        tol: f64,
        max_delta: f64,
        failed: Vec<(f64, f64)>,
    }
    let mut checks: Vec<Check> = [
        ("neg", tols.closed_vs_oracle),
        ("qd", tols.discord),
        ("mid", tols.closed_vs_oracle),
        ("min", tols.closed_vs_oracle),
        ("gqd", tols.closed_vs_oracle),
        ("qde", tols.closed_vs_oracle),
        ("chsh", tols.closed_vs_oracle),
        ("chsh-direct", tols.chsh_direct),
    ]
    .into_iter()
    .map(|(label, tol)| Check {
        label,
        tol,
        max_delta: 0.0,
        failed: Vec::new(),
    })
    .collect();

    for &g in &fields {
        let rho = ground_state(g)?.rho;
        let fc = flow(g, 0)?;
        let horodecki = oracle_chsh(&rho);
        let (min_o, gqd_o) = oracle_min_gqd(&rho);
        let deltas = [
            (closed_form(MeasureId::Negativity, &fc).value - oracle_negativity(&rho)).abs(),
            (closed_form(MeasureId::Discord, &fc).value
                - oracle_discord(&rho, DISCORD_RESOLUTION)?)
            .abs(),
            (closed_form(MeasureId::Mid, &fc).value - oracle_mid(&rho)).abs(),
            (closed_form(MeasureId::Min, &fc).value - min_o).abs(),
            (closed_form(MeasureId::Gqd, &fc).value - gqd_o).abs(),
            (closed_form(MeasureId::QuantumDeficit, &fc).value - oracle_quantum_deficit(&rho))
                .abs(),
            (closed_form(MeasureId::Chsh, &fc).value - horodecki).abs(),
            (horodecki - oracle_chsh_direct(&rho)).abs(),
        ];
        for (check, delta) in checks.iter_mut().zip(deltas) {
            check.max_delta = check.max_delta.max(delta);
            if delta > check.tol {
                check.failed.push((g, delta));
            }
        }
    }

    for check in &checks {
        let status = if check.failed.is_empty() { "PASS" } else { "FAIL" };
        let _ = writeln!(
            text,
            "closed-vs-oracle {}: {} points, max |delta| = {:.3e}, tol {:.1e} - {}",
            check.label,
            fields.len(),
            check.max_delta,
            check.tol,
            status
        );
        for (g, delta) in check.failed.iter().take(5) {
            let _ = writeln!(
                text,
                "  FAIL measure={} g={} |delta|={:.3e}",
                check.label,
                fmt_sig(*g, 9),
                delta
            );
        }
        if check.failed.len() > 5 {
            let _ = writeln!(text, "  ... and {} more", check.failed.len() - 5);
        }
        failures += check.failed.len();
    }

    for g in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let report = verify_effective_hamiltonian(Coupling::new(1.0, g)?)?;
        let delta = (report.half_gap - report.predicted_half_gap).abs();
        let ok = delta <= tols.projection;
        if !ok {
            failures += 1;
        }
        let _ = writeln!(
            text,
            "projection g={}: |half_gap - J'sqrt(1+g'^2)| = {:.3e}, tol {:.1e} - {}",
            fmt_sig(g, 9),
            delta,
            tols.projection,
            if ok { "PASS" } else { "FAIL" }
        );
    }

    let _ = writeln!(
        text,
        "VERIFY: {} ({} failing comparisons)",
        if failures == 0 { "PASS" } else { "FAIL" },
        failures
    );
    Ok(VerifyReport { failures, text })
}
