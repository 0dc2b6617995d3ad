//! Command-line front end: curvature tables, geodesics, lengths, volumes,
//! complexity traces, ordering comparisons, and the oracle verification
//! suite, emitted as CSV or JSON.
//!
//! Exit codes: 0 success, 2 domain/usage error, 3 verification failure.
//! `QGEO_TOL`, when set, overrides every verification tolerance.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use qgeo::complexity::{
    accessible_volume, accessible_volume_quadrature, action, asymptotic_ratio, complexity_trace,
    explored_volume, fs_length_theta, path_length, sjoqvist_length_theta, volume_ratio_comparison,
    AsymptoticParams, ComparisonParams,
};
use qgeo::curvature::curvature_report;
use qgeo::geodesics::{
    bures_geodesic_eta_at_phi, fs_geodesic, integrate_geodesic, sjoqvist_geodesic, Branch, Curve,
    GeodesicSpec, StepControl,
};
use qgeo::verify;
use qgeo::{BlochPoint, MetricKind};

#[derive(Parser)]
#[command(
    name = "qgeo",
    version,
    about = "Information geometry of single-qubit state manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scalar, sectional, and Ricci curvature at a point.
    Curvature(CommonOpts),
    /// Sample a geodesic (closed form, optionally RK4 alongside).
    Geodesic(GeodesicOpts),
    /// Path length and action along a closed-form geodesic.
    Length(CommonOpts),
    /// Accessible volume, or explored volume along a geodesic.
    Volume(VolumeOpts),
    /// Explored volume, averaged volume, and entropy over a time grid,
    /// plus the fitted asymptotic laws.
    Complexity(CommonOpts),
    /// Length inequalities and explored/accessible volume-ratio orderings.
    Compare(CommonOpts),
    /// Run every oracle cross-check and report pass/fail with residuals.
    Verify(VerifyOpts),
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Fs,
    Sjoqvist,
    Bures,
    Bsm,
}

impl From<MetricArg> for MetricKind {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Fs => MetricKind::FubiniStudy,
            MetricArg::Sjoqvist => MetricKind::Sjoqvist,
            MetricArg::Bures => MetricKind::Bures,
            MetricArg::Bsm => MetricKind::BlochSphere,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    Principal,
    Unwrapped,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Principal => Branch::Principal,
            BranchArg::Unwrapped => Branch::Unwrapped,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Metric: fs | sjoqvist | bures | bsm.
    #[arg(long, value_enum, default_value = "fs")]
    metric: MetricArg,
    /// Initial radial coordinate.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    r0: f64,
    /// Initial polar angle.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_negative_numbers = true)]
    theta0: f64,
    /// Initial azimuthal angle.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi0: f64,
    /// Initial radial rate dr/d eta.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    rdot0: f64,
    /// Initial polar rate.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    thetadot0: f64,
    /// Initial azimuthal rate.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phidot0: f64,
    /// Affine-parameter range for sampled curves.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    eta_max: f64,
    /// Averaging-time range for complexity traces.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    tau_max: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 50)]
    grid: usize,
    /// Azimuthal branch of closed-form curves.
    #[arg(long, value_enum, default_value = "unwrapped")]
    branch: BranchArg,
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized suites.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GeodesicOpts {
    #[command(flatten)]
    common: CommonOpts,
    /// Also integrate the geodesic equations with RK4 and emit the samples.
    #[arg(long)]
    rk4: bool,
}

#[derive(Args)]
struct VolumeOpts {
    #[command(flatten)]
    common: CommonOpts,
    /// Emit the total accessible volume instead of the explored one.
    #[arg(long)]
    accessible: bool,
}

#[derive(Args)]
struct VerifyOpts {
    #[command(flatten)]
    common: CommonOpts,
}

// ---------------------------------------------------------------------------
// Output model
// ---------------------------------------------------------------------------

#[derive(Serialize, Clone)]
struct Row {
    eta_or_tau: f64,
    value: f64,
    metric: String,
    quantity: String,
    branch: String,
}

#[derive(Serialize)]
struct Meta {
    version: String,
    seed: u64,
    config: String,
}

#[derive(Serialize)]
struct Document {
    meta: Meta,
    rows: Vec<Row>,
}

/// 17 significant digits: lossless f64 round-trip.
fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn render(rows: &[Row], meta: &Meta, format: FormatArg) -> String {
    match format {
        FormatArg::Csv => {
            let mut out = String::from("eta_or_tau,value,metric,quantity,branch\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    fmt_float(r.eta_or_tau),
                    fmt_float(r.value),
                    r.metric,
                    r.quantity,
                    r.branch
                ));
            }
            out
        }
        FormatArg::Json => {
            let doc = Document {
                meta: Meta {
                    version: meta.version.clone(),
                    seed: meta.seed,
                    config: meta.config.clone(),
                },
                rows: rows.to_vec(),
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            s
        }
    }
}

fn emit(opts: &CommonOpts, rows: Vec<Row>, config: String) -> Result<(), CliError> {
    let meta = Meta {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: opts.seed,
        config,
    };
    let text = render(&rows, &meta, opts.format);
    match &opts.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::domain(format!("write: {e}")))?
        }
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::domain(format!("stdout: {e}")))?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug)]
struct CliError {
    exit: u8,
    kind: String,
    message: String,
}

impl CliError {
    fn domain(message: String) -> Self {
        CliError {
            exit: 2,
            kind: "domain".into(),
            message,
        }
    }

    fn verification(message: String) -> Self {
        CliError {
            exit: 3,
            kind: "verification".into(),
            message,
        }
    }
}

impl From<qgeo::Error> for CliError {
    fn from(e: qgeo::Error) -> Self {
        CliError::domain(e.to_string())
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

fn point(o: &CommonOpts) -> Result<BlochPoint, CliError> {
    Ok(BlochPoint::new(o.r0, o.theta0, o.phi0)?)
}

fn spec(o: &CommonOpts, kind: MetricKind) -> Result<GeodesicSpec, CliError> {
    let velocity = match kind.dim() {
        2 => vec![o.thetadot0, o.phidot0],
        _ => vec![o.rdot0, o.thetadot0, o.phidot0],
    };
    Ok(GeodesicSpec::new(kind, point(o)?, velocity)?)
}

/// Closed-form geodesic for the requested metric, when one exists for the
/// given data (Bures needs thetadot0 != 0 and constant phi).
fn closed_curve(o: &CommonOpts, kind: MetricKind) -> Result<Option<Box<dyn Curve>>, CliError> {
    let branch: Branch = o.branch.into();
    match kind {
        MetricKind::FubiniStudy | MetricKind::BlochSphere => {
            let c = fs_geodesic(&spec(o, kind)?)?.with_branch(branch);
            Ok(Some(Box::new(c)))
        }
        MetricKind::Sjoqvist => {
            let c = sjoqvist_geodesic(&spec(o, kind)?)?.with_branch(branch);
            Ok(Some(Box::new(c)))
        }
        MetricKind::Bures => {
            if o.thetadot0 == 0.0 || o.phidot0 != 0.0 {
                return Ok(None);
            }
            let c = bures_geodesic_eta_at_phi(
                o.r0,
                o.theta0,
                o.thetadot0,
                o.rdot0 / o.thetadot0,
                o.phi0,
            )?;
            Ok(Some(Box::new(c)))
        }
    }
}

fn eta_grid(o: &CommonOpts, span: f64) -> Vec<f64> {
    (1..=o.grid).map(|j| span * j as f64 / o.grid as f64).collect()
}

fn coord_names(kind: MetricKind) -> &'static [&'static str] {
    kind.coords()
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn run_curvature(o: &CommonOpts) -> Result<(), CliError> {
    let kind: MetricKind = o.metric.into();
    let p = point(o)?;
    let rep = curvature_report(kind, &p)?;
    let branch: Branch = o.branch.into();
    let mut rows = vec![Row {
        eta_or_tau: 0.0,
        value: rep.scalar,
        metric: kind.name().into(),
        quantity: "R_scalar".into(),
        branch: branch.name().into(),
    }];
    for (plane, k) in &rep.sectionals {
        rows.push(Row {
            eta_or_tau: 0.0,
            value: *k,
            metric: kind.name().into(),
            quantity: format!("K_{}_{}", plane.a.name(), plane.b.name()),
            branch: branch.name().into(),
        });
    }
    for (i, name) in coord_names(kind).iter().enumerate() {
        rows.push(Row {
            eta_or_tau: 0.0,
            value: rep.ricci[i][i],
            metric: kind.name().into(),
            quantity: format!("Ricci_{name}_{name}"),
            branch: branch.name().into(),
        });
    }
    emit(o, rows, format!("curvature --metric {}", kind.name()))
}

fn run_geodesic(g: &GeodesicOpts) -> Result<(), CliError> {
    let o = &g.common;
    let kind: MetricKind = o.metric.into();
    let branch: Branch = o.branch.into();
    let closed = closed_curve(o, kind)?;
    let etas = eta_grid(o, o.eta_max);
    let mut rows = Vec::new();
    if let Some(curve) = &closed {
        let sampled: Vec<_> = etas
            .par_iter()
            .map(|&eta| curve.state_at(eta).map(|s| (eta, s)))
            .collect::<Result<Vec<_>, _>>()?;
        for (eta, s) in sampled {
            for (i, name) in coord_names(kind).iter().enumerate() {
                rows.push(Row {
                    eta_or_tau: eta,
                    value: s.position[i],
                    metric: kind.name().into(),
                    quantity: (*name).to_string(),
                    branch: branch.name().into(),
                });
            }
        }
    }
    if g.rk4 || closed.is_none() {
        let numeric = integrate_geodesic(&spec(o, kind)?, o.eta_max, &StepControl::default())?;
        for &eta in &etas {
            if eta > numeric.window().1 {
                break;
            }
            let s = numeric.state_at(eta)?;
            for (i, name) in coord_names(kind).iter().enumerate() {
                rows.push(Row {
                    eta_or_tau: eta,
                    value: s.position[i],
                    metric: kind.name().into(),
                    quantity: format!("{name}_rk4"),
                    branch: branch.name().into(),
                });
            }
        }
    }
    emit(o, rows, format!("geodesic --metric {}", kind.name()))
}

fn run_length(o: &CommonOpts) -> Result<(), CliError> {
    let kind: MetricKind = o.metric.into();
    let branch: Branch = o.branch.into();
    let curve = closed_curve(o, kind)?.ok_or_else(|| {
        CliError::domain(
            "no closed-form curve for this metric/data; lengths need one".into(),
        )
    })?;
    let l = path_length(curve.as_ref(), o.eta_max)?;
    let a = action(curve.as_ref(), 1.0, o.eta_max)?;
    let symbol = match kind {
        MetricKind::FubiniStudy => "L_FS",
        MetricKind::Sjoqvist => "L_Sjoqvist",
        MetricKind::Bures => "L_Bures",
        MetricKind::BlochSphere => "L_BSM",
    };
    let mut rows = vec![
        Row {
            eta_or_tau: o.eta_max,
            value: l,
            metric: kind.name().into(),
            quantity: symbol.into(),
            branch: branch.name().into(),
        },
        Row {
            eta_or_tau: o.eta_max,
            value: a,
            metric: kind.name().into(),
            quantity: "A_action_m1".into(),
            branch: branch.name().into(),
        },
    ];
    // Endpoint closed forms apply to the constant-phi geodesics.
    if o.phidot0 == 0.0 {
        let end = curve.state_at(o.eta_max)?;
        match kind {
            MetricKind::FubiniStudy => {
                let theta_f = (end.position[0] - o.theta0).abs();
                rows.push(Row {
                    eta_or_tau: o.eta_max,
                    value: fs_length_theta(theta_f),
                    metric: kind.name().into(),
                    quantity: "L_FS_theta_form".into(),
                    branch: branch.name().into(),
                });
            }
            MetricKind::Sjoqvist => {
                let theta_f = (end.position[1] - o.theta0).abs();
                rows.push(Row {
                    eta_or_tau: o.eta_max,
                    value: sjoqvist_length_theta(o.r0, end.position[0], theta_f),
                    metric: kind.name().into(),
                    quantity: "L_Sjoqvist_theta_form".into(),
                    branch: branch.name().into(),
                });
            }
            _ => {}
        }
    }
    emit(o, rows, format!("length --metric {}", kind.name()))
}

fn run_volume(v: &VolumeOpts) -> Result<(), CliError> {
    let o = &v.common;
    let kind: MetricKind = o.metric.into();
    let branch: Branch = o.branch.into();
    let symbol = match kind {
        MetricKind::FubiniStudy => "V_FS",
        MetricKind::Sjoqvist => "V_Sjoqvist",
        MetricKind::Bures => "V_Bures",
        MetricKind::BlochSphere => "V_BSM",
    };
    if v.accessible {
        let rows = vec![
            Row {
                eta_or_tau: 0.0,
                value: accessible_volume(kind),
                metric: kind.name().into(),
                quantity: format!("{symbol}_accessible"),
                branch: branch.name().into(),
            },
            Row {
                eta_or_tau: 0.0,
                value: accessible_volume_quadrature(kind, 1e-12),
                metric: kind.name().into(),
                quantity: format!("{symbol}_accessible_quadrature"),
                branch: branch.name().into(),
            },
        ];
        return emit(o, rows, format!("volume --metric {} --accessible", kind.name()));
    }
    let curve = closed_curve(o, kind)?.ok_or_else(|| {
        CliError::domain("explored volume needs a closed-form curve for this metric/data".into())
    })?;
    let mut rows = Vec::new();
    for eta in eta_grid(o, o.eta_max) {
        let vol = explored_volume(curve.as_ref(), eta)?;
        rows.push(Row {
            eta_or_tau: eta,
            value: vol.signed(),
            metric: kind.name().into(),
            quantity: format!("{symbol}_explored"),
            branch: branch.name().into(),
        });
        rows.push(Row {
            eta_or_tau: eta,
            value: vol.magnitude,
            metric: kind.name().into(),
            quantity: format!("{symbol}_explored_abs"),
            branch: branch.name().into(),
        });
    }
    emit(o, rows, format!("volume --metric {}", kind.name()))
}

fn run_complexity(o: &CommonOpts) -> Result<(), CliError> {
    let kind: MetricKind = o.metric.into();
    let branch: Branch = o.branch.into();
    if !matches!(kind, MetricKind::FubiniStudy | MetricKind::Sjoqvist) {
        return Err(CliError::domain(
            "complexity traces cover the fs and sjoqvist metrics".into(),
        ));
    }
    let curve = closed_curve(o, kind)?.expect("fs/sjoqvist always have closed forms");
    let taus = eta_grid(o, o.tau_max);
    let trace = complexity_trace(curve.as_ref(), &taus)?;
    let (v_sym, c_sym, s_sym) = match kind {
        MetricKind::FubiniStudy => ("V_FS", "C_FS", "S_FS"),
        _ => ("V_Sjoqvist", "C_Sjoqvist", "S_Sjoqvist"),
    };
    let mut rows = Vec::new();
    for (i, &tau) in trace.taus.iter().enumerate() {
        rows.push(Row {
            eta_or_tau: tau,
            value: trace.volumes[i],
            metric: kind.name().into(),
            quantity: v_sym.into(),
            branch: branch.name().into(),
        });
        rows.push(Row {
            eta_or_tau: tau,
            value: trace.averaged[i],
            metric: kind.name().into(),
            quantity: c_sym.into(),
            branch: branch.name().into(),
        });
        if let Some(s) = trace.entropy[i] {
            rows.push(Row {
                eta_or_tau: tau,
                value: s,
                metric: kind.name().into(),
                quantity: s_sym.into(),
                branch: branch.name().into(),
            });
        }
    }
    // Fitted asymptotics of the paired pure/mixed evolution.
    if kind == MetricKind::Sjoqvist && o.rdot0 != 0.0 {
        let st = o.theta0.sin();
        let params = AsymptoticParams {
            r_i: o.r0,
            r_dot_i: o.rdot0,
            c_fs: o.phidot0 * st * st,
        };
        let fit_taus: Vec<f64> = (0..200)
            .map(|i| 100.0 * 100.0_f64.powf(i as f64 / 199.0))
            .collect();
        if let Ok(law) = asymptotic_ratio(&params, &fit_taus) {
            rows.push(Row {
                eta_or_tau: *fit_taus.last().unwrap(),
                value: law.ratio_over_tau_exact,
                metric: kind.name().into(),
                quantity: "ratio_C_over_tau".into(),
                branch: branch.name().into(),
            });
            rows.push(Row {
                eta_or_tau: *fit_taus.last().unwrap(),
                value: law.ige_gap_slope,
                metric: kind.name().into(),
                quantity: "IGE_gap_slope".into(),
                branch: branch.name().into(),
            });
        }
    }
    emit(o, rows, format!("complexity --metric {}", kind.name()))
}

fn run_compare(o: &CommonOpts) -> Result<(), CliError> {
    let branch: Branch = o.branch.into();
    let st = o.theta0.sin();
    let params = ComparisonParams {
        r_i: o.r0,
        r_dot_i: if o.rdot0 != 0.0 { o.rdot0 } else { 0.5 },
        c_fs: if o.phidot0 != 0.0 { o.phidot0 * st * st } else { 0.5 },
        theta_i: o.theta0,
        theta_dot_i: if o.thetadot0 != 0.0 { o.thetadot0 } else { 1.0 },
    };
    let etas = eta_grid(o, o.eta_max);
    let rep = volume_ratio_comparison(&params, &etas)?;
    let mut rows = Vec::new();
    let push = |rows: &mut Vec<Row>, eta: f64, value: f64, metric: &str, q: &str| {
        rows.push(Row {
            eta_or_tau: eta,
            value,
            metric: metric.into(),
            quantity: q.into(),
            branch: branch.name().into(),
        });
    };
    for (i, &eta) in rep.sjoqvist_vs_fs.etas.iter().enumerate() {
        push(&mut rows, eta, rep.sjoqvist_vs_fs.lhs[i], "sjoqvist", "ratio_V_Sjoqvist");
        push(&mut rows, eta, rep.sjoqvist_vs_fs.rhs[i], "fs", "ratio_V_FS");
        push(&mut rows, eta, rep.bures_vs_sjoqvist.lhs[i], "bures", "ratio_V_Bures_slice");
        push(&mut rows, eta, rep.bures_vs_sjoqvist.rhs[i], "sjoqvist", "ratio_V_Sjoqvist_slice");
    }
    if let Some(star) = rep.sjoqvist_vs_fs.eta_star {
        push(&mut rows, star, star, "sjoqvist", "eta_star_compare");
    }
    if let Some(star) = rep.bures_vs_sjoqvist.eta_star {
        push(&mut rows, star, star, "bures", "eta_star_boys");
    }
    // Length-ordering companions at matched data.
    let theta_f = params.theta_dot_i * o.eta_max;
    let r_prime = params.r_dot_i / params.theta_dot_i;
    push(&mut rows, o.eta_max, fs_length_theta(theta_f), "fs", "L_FS");
    push(
        &mut rows,
        o.eta_max,
        qgeo::complexity::sjoqvist_length_eta(params.r_i, r_prime, params.theta_dot_i, o.eta_max),
        "sjoqvist",
        "L_Sjoqvist",
    );
    push(
        &mut rows,
        o.eta_max,
        qgeo::complexity::bures_length_eta(params.r_i, r_prime, params.theta_dot_i, o.eta_max),
        "bures",
        "L_Bures",
    );
    emit(o, rows, "compare".into())
}

fn run_verify(v: &VerifyOpts) -> Result<(), CliError> {
    let o = &v.common;
    let tol_override = match std::env::var("QGEO_TOL") {
        Ok(s) => Some(s.parse::<f64>().map_err(|_| {
            CliError::domain(format!("QGEO_TOL must be a float, got {s:?}"))
        })?),
        Err(_) => None,
    };
    let reports = verify::run_all(o.seed)?;
    let branch: Branch = o.branch.into();
    let mut rows = Vec::new();
    let mut all_pass = true;
    let mut stdout = String::new();
    for r in &reports {
        let pass = r.passed_with(tol_override);
        all_pass &= pass;
        let tol = tol_override.unwrap_or(r.tolerance);
        stdout.push_str(&format!(
            "[{}] criterion {:>2}: {:<55} residual {:>12.5e} tol {:>9.1e}\n",
            if pass { "PASS" } else { "FAIL" },
            r.criterion,
            r.name,
            r.residual,
            tol,
        ));
        rows.push(Row {
            eta_or_tau: r.criterion as f64,
            value: r.residual,
            metric: "all".into(),
            quantity: r.name.clone(),
            branch: branch.name().into(),
        });
    }
    print!("{stdout}");
    if o.out.is_some() {
        emit(o, rows, format!("verify --seed {}", o.seed))?;
    }
    if all_pass {
        Ok(())
    } else {
        Err(CliError::verification("verification failures".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Curvature(o) => run_curvature(o),
        Command::Geodesic(g) => run_geodesic(g),
        Command::Length(o) => run_length(o),
        Command::Volume(v) => run_volume(v),
        Command::Complexity(o) => run_complexity(o),
        Command::Compare(o) => run_compare(o),
        Command::Verify(v) => run_verify(v),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = serde_json::json!({
                "error": { "kind": e.kind, "message": e.message }
            });
            eprintln!("{record}");
            ExitCode::from(e.exit)
        }
    }
}
