//! Path lengths, actions, accessible and explored volumes, temporal
//! averaging, the volume-based entropy/complexity pair, and the asymptotic
//! comparison laws between pure-state and mixed-state evolutions.
//!
//! The explored volume of a curve over `[0, eta]` multiplies per-coordinate
//! integrals of the factorized Fisher density between the curve's endpoint
//! coordinates. Swept factors are signed by travel direction; the magnitude
//! is reported alongside the sign. The complexity `C(tau)` is the running
//! average `(1/tau) int_0^tau V(eta) d eta`, and the entropy is `ln C`
//! (undefined when `C <= 0`).

use crate::error::{Error, Result};
use crate::geodesics::{atan_tan_principal, Curve};
use crate::metrics::MetricKind;
use crate::numerics::{adaptive_simpson, linear_fit};

const PI: f64 = std::f64::consts::PI;

/// Default absolute tolerance of the 1-D adaptive quadratures.
pub const QUAD_TOL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// Lengths and actions
// ---------------------------------------------------------------------------

/// Path length `int_0^{eta_f} sqrt(g_{mu nu} xi_dot^mu xi_dot^nu) d eta` by
/// adaptive quadrature of the pointwise speed. For the constant-speed closed
/// forms this equals `speed * eta_f`.
pub fn path_length(curve: &dyn Curve, eta_f: f64) -> Result<f64> {
    let (lo, hi) = curve.window();
    if eta_f < lo || eta_f > hi {
        return Err(Error::OutsideWindow { eta: eta_f, lo, hi });
    }
    let kind = curve.kind();
    let integrand = |eta: f64| -> f64 {
        curve
            .state_at(eta)
            .and_then(|s| {
                let p = s.to_point(kind)?;
                crate::geodesics::speed(kind, &p, s.velocity_slice(kind))
            })
            .unwrap_or(f64::NAN)
    };
    let value = adaptive_simpson(&integrand, 0.0, eta_f, QUAD_TOL);
    if value.is_nan() {
        return Err(Error::MetricBoundary(
            "length quadrature touched the metric boundary".into(),
        ));
    }
    Ok(value)
}

/// Mechanical action `(m/2) int_0^{eta_f} g_{mu nu} xi_dot^mu xi_dot^nu d eta`.
/// Not reparametrization invariant, unlike the length.
pub fn action(curve: &dyn Curve, mass: f64, eta_f: f64) -> Result<f64> {
    let (lo, hi) = curve.window();
    if eta_f < lo || eta_f > hi {
        return Err(Error::OutsideWindow { eta: eta_f, lo, hi });
    }
    let kind = curve.kind();
    let integrand = |eta: f64| -> f64 {
        curve
            .state_at(eta)
            .and_then(|s| {
                let p = s.to_point(kind)?;
                crate::metrics::line_element(kind, &p, s.velocity_slice(kind))
            })
            .unwrap_or(f64::NAN)
    };
    let value = adaptive_simpson(&integrand, 0.0, eta_f, QUAD_TOL);
    if value.is_nan() {
        return Err(Error::MetricBoundary(
            "action quadrature touched the metric boundary".into(),
        ));
    }
    Ok(0.5 * mass * value)
}

/// Closed-form Fubini-Study length `theta_f / 2` (half the great-circle
/// distance on the Bloch sphere).
pub fn fs_length_theta(theta_f: f64) -> f64 {
    0.5 * theta_f
}

/// Closed-form Sjoqvist length
/// `(1/2) sqrt(theta_f^2 + [arcsin r_f - arcsin r_i]^2)`.
pub fn sjoqvist_length_theta(r_i: f64, r_f: f64, theta_f: f64) -> f64 {
    let d = r_f.asin() - r_i.asin();
    0.5 * (theta_f * theta_f + d * d).sqrt()
}

/// Closed-form Sjoqvist length in the affine parametrization:
/// `(1/2) sqrt(1 + r_i'^2/(1-r_i^2)) theta_dot_i eta_f`.
pub fn sjoqvist_length_eta(r_i: f64, r_prime_i: f64, theta_dot_i: f64, eta_f: f64) -> f64 {
    0.5 * (1.0 + r_prime_i * r_prime_i / (1.0 - r_i * r_i)).sqrt() * theta_dot_i * eta_f
}

/// Closed-form Bures length of a constant-phi geodesic:
/// `(1/2) sqrt(r_i^2 + r_i'^2/(1-r_i^2)) theta_dot_i eta_f`.
pub fn bures_length_eta(r_i: f64, r_prime_i: f64, theta_dot_i: f64, eta_f: f64) -> f64 {
    0.5 * (r_i * r_i + r_prime_i * r_prime_i / (1.0 - r_i * r_i)).sqrt() * theta_dot_i * eta_f
}

// ---------------------------------------------------------------------------
// Volumes
// ---------------------------------------------------------------------------

/// Total volume of the accessible region: `pi` (FS), `pi^2/4` (Sjoqvist),
/// `pi^2/8` (Bures), `4 pi` (Bloch sphere).
pub fn accessible_volume(kind: MetricKind) -> f64 {
    match kind {
        MetricKind::FubiniStudy => PI,
        MetricKind::Sjoqvist => PI * PI / 4.0,
        MetricKind::Bures => PI * PI / 8.0,
        MetricKind::BlochSphere => 4.0 * PI,
    }
}

/// Accessible volume by nested adaptive quadrature of the Fisher density
/// over the full chart. The radial integrals use the substitution
/// `r = sin(alpha)`, which removes the integrable endpoint singularity of
/// `1/sqrt(1-r^2)` at `r = 1`.
pub fn accessible_volume_quadrature(kind: MetricKind, tol: f64) -> f64 {
    let theta_part = adaptive_simpson(&|t: f64| t.sin(), 0.0, PI, tol);
    match kind {
        MetricKind::FubiniStudy => {
            0.25 * adaptive_simpson(
                &|theta: f64| adaptive_simpson(&|_phi: f64| theta.sin(), 0.0, 2.0 * PI, tol),
                0.0,
                PI,
                tol,
            )
        }
        MetricKind::BlochSphere => {
            adaptive_simpson(
                &|theta: f64| adaptive_simpson(&|_phi: f64| theta.sin(), 0.0, 2.0 * PI, tol),
                0.0,
                PI,
                tol,
            )
        }
        MetricKind::Sjoqvist => {
            // (1/8) int dr/sqrt(1-r^2) = (1/8) int d alpha over [0, pi/2].
            let radial = adaptive_simpson(&|_a: f64| 1.0, 0.0, PI / 2.0, tol);
            0.125 * radial * theta_part * 2.0 * PI
        }
        MetricKind::Bures => {
            // r^2/sqrt(1-r^2) dr = sin^2(alpha) d alpha.
            let radial = adaptive_simpson(&|a: f64| a.sin() * a.sin(), 0.0, PI / 2.0, tol);
            0.125 * radial * theta_part * 2.0 * PI
        }
    }
}

/// The coordinate box swept by a curve between the endpoints of an
/// affine-parameter interval: per-coordinate closed intervals ordered
/// `min <= max`, with the direction of travel kept separately.
#[derive(Debug, Clone)]
pub struct ParameterDomain {
    /// Ordered endpoint pairs, one per coordinate.
    pub intervals: Vec<(f64, f64)>,
    /// Sign of the endpoint difference per coordinate (0 when unchanged).
    pub orientations: Vec<f64>,
}

/// Swept box of a curve over `[0, eta]`, from the endpoint coordinates.
pub fn parameter_domain(curve: &dyn Curve, eta: f64) -> Result<ParameterDomain> {
    let s0 = curve.state_at(0.0)?;
    let s1 = curve.state_at(eta)?;
    let dim = curve.kind().dim();
    let mut intervals = Vec::with_capacity(dim);
    let mut orientations = Vec::with_capacity(dim);
    for k in 0..dim {
        let (a, b) = (s0.position[k], s1.position[k]);
        intervals.push((a.min(b), a.max(b)));
        orientations.push(if a == b { 0.0 } else { (b - a).signum() });
    }
    Ok(ParameterDomain {
        intervals,
        orientations,
    })
}

/// Signed explored volume: the product of per-coordinate swept factors, with
/// the orientation sign kept separate from the magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedVolume {
    pub magnitude: f64,
    /// Product of the signs of the swept factors (0 when any factor is 0).
    pub sign: f64,
}

impl SignedVolume {
    pub fn signed(&self) -> f64 {
        self.magnitude * self.sign
    }

    fn from_signed(v: f64) -> Self {
        SignedVolume {
            magnitude: v.abs(),
            sign: if v == 0.0 { 0.0 } else { v.signum() },
        }
    }
}

/// Antiderivative of the per-coordinate Fisher-density factor, per metric.
/// All four determinants factor over the coordinates.
fn swept_factors(kind: MetricKind, from: &[f64; 3], to: &[f64; 3]) -> f64 {
    match kind {
        MetricKind::FubiniStudy => {
            let f_theta = 0.25 * (from[0].cos() - to[0].cos());
            let f_phi = to[1] - from[1];
            f_theta * f_phi
        }
        MetricKind::BlochSphere => {
            let f_theta = from[0].cos() - to[0].cos();
            let f_phi = to[1] - from[1];
            f_theta * f_phi
        }
        MetricKind::Sjoqvist => {
            let f_r = to[0].asin() - from[0].asin();
            let f_theta = from[1].cos() - to[1].cos();
            let f_phi = to[2] - from[2];
            0.125 * f_r * f_theta * f_phi
        }
        MetricKind::Bures => {
            let b = |r: f64| 0.5 * (r.asin() - r * (1.0 - r * r).max(0.0).sqrt());
            let f_r = b(to[0]) - b(from[0]);
            let f_theta = from[1].cos() - to[1].cos();
            let f_phi = to[2] - from[2];
            0.125 * f_r * f_theta * f_phi
        }
    }
}

/// Explored volume of the parameter region swept by a curve over
/// `[0, eta]`: per-coordinate integrals of the factorized Fisher density
/// between the endpoint coordinates, combined with their signs.
pub fn explored_volume(curve: &dyn Curve, eta: f64) -> Result<SignedVolume> {
    let s0 = curve.state_at(0.0)?;
    let s1 = curve.state_at(eta)?;
    Ok(SignedVolume::from_signed(swept_factors(
        curve.kind(),
        &s0.position,
        &s1.position,
    )))
}

/// Explored volume of the coordinate box between `from` and `to` by nested
/// adaptive quadrature of the full Fisher density (no factorization); the
/// independent oracle for [`explored_volume`].
pub fn explored_volume_box_quadrature(
    kind: MetricKind,
    from: &[f64; 3],
    to: &[f64; 3],
    tol: f64,
) -> f64 {
    match kind.dim() {
        2 => {
            let density = move |theta: f64| match kind {
                MetricKind::FubiniStudy => 0.25 * theta.sin(),
                _ => theta.sin(),
            };
            adaptive_simpson(
                &|theta: f64| {
                    adaptive_simpson(&|_phi: f64| density(theta), from[1], to[1], tol)
                },
                from[0],
                to[0],
                tol,
            )
        }
        _ => {
            let density = move |r: f64, theta: f64| match kind {
                MetricKind::Sjoqvist => 0.125 * theta.sin() / (1.0 - r * r).sqrt(),
                _ => 0.125 * r * r * theta.sin() / (1.0 - r * r).sqrt(),
            };
            adaptive_simpson(
                &|r: f64| {
                    adaptive_simpson(
                        &|theta: f64| {
                            adaptive_simpson(&|_phi: f64| density(r, theta), from[2], to[2], tol)
                        },
                        from[1],
                        to[1],
                        tol,
                    )
                },
                from[0],
                to[0],
                tol,
            )
        }
    }
}

// ---------------------------------------------------------------------------
// Closed-form explored volumes and their running integrals
// ---------------------------------------------------------------------------

/// Closed-form instantaneous explored volume on the pure-state manifold for
/// an equatorial start: `(1/4) a sin(eta) arctan(c tan eta)` on the
/// principal branch.
pub fn v_fs_closed(eta: f64, a_fs: f64, c_fs: f64) -> f64 {
    0.25 * a_fs * eta.sin() * atan_tan_principal(c_fs, eta)
}

/// Closed-form instantaneous explored volume in the Bloch ball with the
/// Sjoqvist metric: `(1/8) a k_r eta sin(eta) arctan(c tan eta)`, where
/// `k_r = r_dot_i / sqrt(1 - r_i^2)`. Principal branch.
pub fn v_sjoqvist_closed(eta: f64, a_fs: f64, c_fs: f64, k_r: f64) -> f64 {
    0.125 * a_fs * k_r * eta * eta.sin() * atan_tan_principal(c_fs, eta)
}

/// Running integral of `sin(eta) arctan(c tan eta)` on the principal branch:
/// `I(tau) = c/sqrt(1-c^2) artanh(sqrt(1-c^2) sin tau) - cos(tau) arctan(c tan tau)`.
///
/// Literature states it with `c/sqrt(c^2-1) arctan(sqrt(c^2-1) sin tau)`;
/// for `|c| < 1` both arguments are imaginary and the arctan/artanh identity
/// turns it into the manifestly real form used here. Bounded for all
/// `tau >= 0`.
pub fn i_v_fs(tau: f64, c_fs: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&c_fs) {
        return Err(Error::InvalidCoordinate(format!(
            "|c_fs| = {} exceeds 1",
            c_fs.abs()
        )));
    }
    let one_minus_c2 = 1.0 - c_fs * c_fs;
    let first = if one_minus_c2 < 1e-14 {
        // c -> +-1 limit of (c/e) artanh(e sin tau) with e = sqrt(1-c^2).
        c_fs * tau.sin()
    } else {
        let e = one_minus_c2.sqrt();
        (c_fs / e) * (e * tau.sin()).atanh()
    };
    Ok(first - tau.cos() * atan_tan_principal(c_fs, tau))
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidCoordinate(format!("tau = {tau} must be positive")))
    }
}

/// Closed-form pure-state complexity `C_FS(tau) = (1/4) a I(tau) / tau`.
pub fn igc_fs_closed(tau: f64, a_fs: f64, c_fs: f64) -> Result<f64> {
    check_tau(tau)?;
    Ok(0.25 * a_fs * i_v_fs(tau, c_fs)? / tau)
}

/// Closed-form Sjoqvist complexity via integration by parts:
/// `C(tau) = (1/8) a k_r [tau I(tau) - int_0^tau I] / tau`.
pub fn igc_sjoqvist_closed(tau: f64, a_fs: f64, c_fs: f64, k_r: f64) -> Result<f64> {
    check_tau(tau)?;
    let i_tau = i_v_fs(tau, c_fs)?;
    let j = adaptive_simpson(
        &|eta: f64| i_v_fs(eta, c_fs).unwrap_or(f64::NAN),
        0.0,
        tau,
        QUAD_TOL,
    );
    Ok(0.125 * a_fs * k_r * (tau * i_tau - j) / tau)
}

/// Leading asymptotic form of the Sjoqvist complexity:
/// `C(tau) ~ (1/8) a k_r I(tau)`.
pub fn igc_sjoqvist_asymptotic(tau: f64, a_fs: f64, c_fs: f64, k_r: f64) -> Result<f64> {
    check_tau(tau)?;
    Ok(0.125 * a_fs * k_r * i_v_fs(tau, c_fs)?)
}

// ---------------------------------------------------------------------------
// Averaged volume, complexity, entropy
// ---------------------------------------------------------------------------

/// Averaged explored volume `C(tau) = (1/tau) int_0^tau V(eta) d eta` by
/// quadrature of the signed explored volume along the curve.
pub fn igc(curve: &dyn Curve, tau: f64) -> Result<f64> {
    let (lo, hi) = curve.window();
    if tau <= 0.0 {
        return Err(Error::InvalidCoordinate("tau must be positive".into()));
    }
    if tau > hi || lo > 0.0 {
        return Err(Error::OutsideWindow { eta: tau, lo, hi });
    }
    let v = |eta: f64| {
        explored_volume(curve, eta)
            .map(|sv| sv.signed())
            .unwrap_or(f64::NAN)
    };
    let integral = adaptive_simpson(&v, 0.0, tau, QUAD_TOL);
    if integral.is_nan() {
        return Err(Error::OutsideWindow { eta: tau, lo, hi });
    }
    Ok(integral / tau)
}

/// Entropy of the averaged volume, `S = ln C`; undefined (error) when the
/// signed average is not positive.
pub fn ige(curve: &dyn Curve, tau: f64) -> Result<f64> {
    let c = igc(curve, tau)?;
    if c <= 0.0 {
        return Err(Error::UndefinedEntropy);
    }
    Ok(c.ln())
}

/// Sampled complexity data along a time grid.
#[derive(Debug, Clone)]
pub struct ComplexityTrace {
    pub taus: Vec<f64>,
    /// Signed instantaneous explored volume `V(tau)`.
    pub volumes: Vec<f64>,
    /// Averaged volume `C(tau)`.
    pub averaged: Vec<f64>,
    /// `ln C(tau)` where the average is positive.
    pub entropy: Vec<Option<f64>>,
}

pub fn complexity_trace(curve: &dyn Curve, taus: &[f64]) -> Result<ComplexityTrace> {
    let mut volumes = Vec::with_capacity(taus.len());
    let mut averaged = Vec::with_capacity(taus.len());
    let mut entropy = Vec::with_capacity(taus.len());
    for &tau in taus {
        volumes.push(explored_volume(curve, tau)?.signed());
        let c = igc(curve, tau)?;
        averaged.push(c);
        entropy.push(if c > 0.0 { Some(c.ln()) } else { None });
    }
    Ok(ComplexityTrace {
        taus: taus.to_vec(),
        volumes,
        averaged,
        entropy,
    })
}

// ---------------------------------------------------------------------------
// Asymptotic laws
// ---------------------------------------------------------------------------

/// Parameters of the paired pure/mixed evolution used by the asymptotic
/// comparison: equatorial start with conserved `c_fs`, radial data
/// `(r_i, r_dot_i)`.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticParams {
    pub r_i: f64,
    pub r_dot_i: f64,
    pub c_fs: f64,
}

impl AsymptoticParams {
    pub fn k_r(&self) -> f64 {
        self.r_dot_i / (1.0 - self.r_i * self.r_i).sqrt()
    }

    pub fn a_fs(&self) -> f64 {
        (1.0 - self.c_fs * self.c_fs).max(0.0).sqrt()
    }
}

/// Fitted asymptotic behavior of the complexity ratio and entropy gap.
#[derive(Debug, Clone)]
pub struct AsymptoticLaw {
    pub taus: Vec<f64>,
    /// `[C_Sjoqvist(tau)/C_FS(tau)] / tau` from the closed forms.
    pub ratio_over_tau: Vec<f64>,
    /// Exact algebraic value `k_r / 2`.
    pub ratio_over_tau_exact: f64,
    pub max_ratio_deviation: f64,
    /// Entropy gap `ln |ratio|` per grid point.
    pub ige_gap: Vec<f64>,
    /// Least-squares slope of the gap against `ln tau` over the top decade.
    pub ige_gap_slope: f64,
    /// Max deviation of `V_Sjoqvist/(tau V_FS)` from `k_r/2` (rate balance).
    pub rate_balance_deviation: f64,
}

/// Evaluates the asymptotic laws on a grid: the complexity ratio divided by
/// `tau` is the constant `r_dot_i / (2 sqrt(1 - r_i^2))`, and the entropy
/// gap grows as `ln tau` with unit slope.
pub fn asymptotic_ratio(params: &AsymptoticParams, taus: &[f64]) -> Result<AsymptoticLaw> {
    if params.r_dot_i == 0.0 {
        return Err(Error::DegenerateParameters(
            "r_dot_i = 0 gives a vanishing Sjoqvist volume".into(),
        ));
    }
    if !(0.0..1.0).contains(&params.r_i) {
        return Err(Error::InvalidCoordinate(format!(
            "r_i = {} outside [0, 1)",
            params.r_i
        )));
    }
    if params.a_fs() == 0.0 {
        return Err(Error::DegenerateParameters(
            "|c_fs| = 1 collapses both explored volumes".into(),
        ));
    }
    if taus.len() < 2 || taus.windows(2).any(|w| w[1] <= w[0]) || taus[0] <= 0.0 {
        return Err(Error::InvalidCoordinate(
            "tau grid must be positive and strictly increasing".into(),
        ));
    }
    let (a, c, k_r) = (params.a_fs(), params.c_fs, params.k_r());
    let exact = 0.5 * k_r;
    let mut ratio_over_tau = Vec::with_capacity(taus.len());
    let mut gap = Vec::with_capacity(taus.len());
    let mut max_dev = 0.0_f64;
    let mut rate_dev = 0.0_f64;
    for &tau in taus {
        let c_sj = igc_sjoqvist_asymptotic(tau, a, c, k_r)?;
        let c_fs = igc_fs_closed(tau, a, c)?;
        let ratio = c_sj / c_fs;
        let over_tau = ratio / tau;
        ratio_over_tau.push(over_tau);
        gap.push(ratio.abs().ln());
        if over_tau.is_finite() {
            max_dev = max_dev.max((over_tau - exact).abs());
        }
        let v_fs = v_fs_closed(tau, a, c);
        if v_fs.abs() > 1e-12 {
            let v_sj = v_sjoqvist_closed(tau, a, c, k_r);
            rate_dev = rate_dev.max((v_sj / (tau * v_fs) - exact).abs());
        }
    }
    // Fit the gap against ln(tau) over the top decade of the grid.
    let tau_max = *taus.last().unwrap();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (tau, g) in taus.iter().zip(&gap) {
        if *tau >= tau_max / 10.0 && g.is_finite() {
            xs.push(tau.ln());
            ys.push(*g);
        }
    }
    if xs.len() < 2 {
        return Err(Error::DegenerateParameters(
            "tau grid leaves fewer than two usable points in the top decade".into(),
        ));
    }
    let (slope, _) = linear_fit(&xs, &ys);
    Ok(AsymptoticLaw {
        taus: taus.to_vec(),
        ratio_over_tau,
        ratio_over_tau_exact: exact,
        max_ratio_deviation: max_dev,
        ige_gap: gap,
        ige_gap_slope: slope,
        rate_balance_deviation: rate_dev,
    })
}

// ---------------------------------------------------------------------------
// Explored/accessible volume-ratio orderings
// ---------------------------------------------------------------------------

/// One ordering comparison along a grid: `lhs` against `rhs` under a fixed
/// predicate, with the first grid value after which the predicate holds for
/// the rest of the grid.
#[derive(Debug, Clone)]
pub struct OrderingReport {
    pub etas: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// Smallest grid eta after which the ordering holds onward; `None` when
    /// it never settles.
    pub eta_star: Option<f64>,
}

fn detect_threshold(etas: &[f64], ok: &[bool]) -> Option<f64> {
    let mut star = None;
    for i in (0..ok.len()).rev() {
        if ok[i] {
            star = Some(etas[i]);
        } else {
            break;
        }
    }
    star
}

/// Matched initial data for the two ordering comparisons. The constant-phi
/// slice comparison derives `r' = r_dot_i / theta_dot_i` so both evolutions
/// share the same physical rates.
#[derive(Debug, Clone, Copy)]
pub struct ComparisonParams {
    pub r_i: f64,
    pub r_dot_i: f64,
    pub c_fs: f64,
    pub theta_i: f64,
    pub theta_dot_i: f64,
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    /// Sjoqvist vs FS explored/accessible ratios (mixed >= pure onward of
    /// the threshold).
    pub sjoqvist_vs_fs: OrderingReport,
    /// Bures vs Sjoqvist ratios on constant-phi slices (Bures <= Sjoqvist).
    pub bures_vs_sjoqvist: OrderingReport,
}

/// Sjoqvist-vs-FS explored/accessible volume ratios on a grid, from the
/// closed forms (formal continuation past the radial window, principal
/// branch). The ordering `mixed >= pure` settles at
/// `eta* = pi / (2 k_r)` exactly.
pub fn compare_sjoqvist_fs(
    r_i: f64,
    r_dot_i: f64,
    c_fs: f64,
    etas: &[f64],
) -> Result<OrderingReport> {
    if r_dot_i == 0.0 {
        return Err(Error::DegenerateParameters(
            "r_dot_i = 0 gives a vanishing Sjoqvist volume".into(),
        ));
    }
    let a = (1.0 - c_fs * c_fs).max(0.0).sqrt();
    let k_r = r_dot_i / (1.0 - r_i * r_i).sqrt();
    let mut lhs = Vec::with_capacity(etas.len());
    let mut rhs = Vec::with_capacity(etas.len());
    let mut ok = Vec::with_capacity(etas.len());
    for &eta in etas {
        let ratio_sj = v_sjoqvist_closed(eta, a, c_fs, k_r).abs() / accessible_volume(MetricKind::Sjoqvist);
        let ratio_fs = v_fs_closed(eta, a, c_fs).abs() / accessible_volume(MetricKind::FubiniStudy);
        lhs.push(ratio_sj);
        rhs.push(ratio_fs);
        ok.push(ratio_sj >= ratio_fs);
    }
    Ok(OrderingReport {
        etas: etas.to_vec(),
        eta_star: detect_threshold(etas, &ok),
        lhs,
        rhs,
    })
}

/// Bures-vs-Sjoqvist explored/accessible ratios on constant-phi slices with
/// matched initial data. Slice densities: `1/(4 sqrt(1-r^2))` (Sjoqvist) and
/// `r/(4 sqrt(1-r^2))` (Bures), integrated over the swept `(r, theta)` box;
/// denominators are the full accessible volumes.
pub fn compare_bures_sjoqvist_slice(
    r_i: f64,
    r_prime_i: f64,
    theta_i: f64,
    theta_dot_i: f64,
    etas: &[f64],
) -> Result<OrderingReport> {
    if theta_dot_i == 0.0 {
        return Err(Error::DegenerateParameters(
            "constant-phi comparison needs theta_dot_i != 0".into(),
        ));
    }
    let bures = crate::geodesics::bures_geodesic_eta(r_i, theta_i, theta_dot_i, r_prime_i)?;
    let k_r = r_prime_i * theta_dot_i / (1.0 - r_i * r_i).sqrt();
    let sqrt_omr2_i = (1.0 - r_i * r_i).sqrt();
    let mut lhs = Vec::with_capacity(etas.len());
    let mut rhs = Vec::with_capacity(etas.len());
    let mut ok = Vec::with_capacity(etas.len());
    for &eta in etas {
        // Sjoqvist slice: radial factor k_r eta, polar factor theta_dot_i eta.
        let v_sj = 0.25 * (k_r * eta).abs() * (theta_dot_i * eta).abs();
        // Bures slice from the closed form, evaluated as a formal
        // continuation for all eta.
        let st = bures.state_unchecked(eta);
        let r = st.position[0];
        let f_r = (sqrt_omr2_i - (1.0 - r * r).max(0.0).sqrt()).abs();
        let f_theta = (st.position[1] - theta_i).abs();
        let v_bu = 0.25 * f_r * f_theta;
        let ratio_sj = v_sj / accessible_volume(MetricKind::Sjoqvist);
        let ratio_bu = v_bu / accessible_volume(MetricKind::Bures);
        lhs.push(ratio_bu);
        rhs.push(ratio_sj);
        ok.push(ratio_bu <= ratio_sj);
    }
    Ok(OrderingReport {
        etas: etas.to_vec(),
        eta_star: detect_threshold(etas, &ok),
        lhs,
        rhs,
    })
}

/// Both orderings on a common grid with matched initial data.
pub fn volume_ratio_comparison(
    params: &ComparisonParams,
    etas: &[f64],
) -> Result<ComparisonReport> {
    let sjoqvist_vs_fs = compare_sjoqvist_fs(params.r_i, params.r_dot_i, params.c_fs, etas)?;
    let r_prime_i = params.r_dot_i / params.theta_dot_i;
    let bures_vs_sjoqvist = compare_bures_sjoqvist_slice(
        params.r_i,
        r_prime_i,
        params.theta_i,
        params.theta_dot_i,
        etas,
    )?;
    Ok(ComparisonReport {
        sjoqvist_vs_fs,
        bures_vs_sjoqvist,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::{fs_geodesic, sjoqvist_geodesic, Branch, GeodesicSpec};
    use crate::states::BlochPoint;

    fn fs_curve(theta: f64, td: f64, pd: f64) -> crate::geodesics::FsGeodesic {
        fs_geodesic(
            &GeodesicSpec::new(
                MetricKind::FubiniStudy,
                BlochPoint::new(1.0, theta, 0.0).unwrap(),
                vec![td, pd],
            )
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn lengths_closed_vs_quadrature() {
        // Antipodal pure states: L = pi/2 at theta_f = pi.
        assert!((fs_length_theta(PI) - PI / 2.0).abs() < 1e-15);
        // Sjoqvist reduces to FS when r_f = r_i.
        assert!((sjoqvist_length_theta(0.4, 0.4, 1.1) - fs_length_theta(1.1)).abs() < 1e-15);

        // Quadrature along an equator geodesic: v = 1/2, L = eta/2.
        let eq = fs_curve(PI / 2.0, 0.0, 1.0);
        let l = path_length(&eq, 2.0).unwrap();
        assert!((l - 1.0).abs() < 1e-9);

        // Generic FS curve: length = speed * eta.
        let c = fs_curve(1.0, 0.4, 0.7);
        let l = path_length(&c, 1.3).unwrap();
        assert!((l - c.constant_speed().unwrap() * 1.3).abs() < 1e-8);
    }

    #[test]
    fn action_and_length_relation() {
        // Equator FS, m = 1, eta_f = 2: A = 1/4 and A = sqrt(mE/2) L.
        let eq = fs_curve(PI / 2.0, 0.0, 1.0);
        let a = action(&eq, 1.0, 2.0).unwrap();
        assert!((a - 0.25).abs() < 1e-9);
        let v = eq.constant_speed().unwrap();
        let e = 0.5 * v * v;
        let l = path_length(&eq, 2.0).unwrap();
        assert!((a - (e / 2.0_f64).sqrt() * l).abs() < 1e-10);

        // Reparametrization eta -> 2 eta changes A but not L.
        let fast = fs_curve(PI / 2.0, 0.0, 2.0);
        let l2 = path_length(&fast, 1.0).unwrap();
        assert!((l2 - l).abs() < 1e-9);
        let a2 = action(&fast, 1.0, 1.0).unwrap();
        assert!((a2 - 2.0 * a).abs() < 1e-9);

        // Zero velocity: zero action.
        let still = fs_curve(1.0, 0.0, 0.0);
        assert_eq!(action(&still, 1.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn parameter_domain_orders_endpoints() {
        let curve = fs_curve(PI / 3.0, 0.4, 0.7);
        let dom = parameter_domain(&curve, 0.9).unwrap();
        assert_eq!(dom.intervals.len(), 2);
        for ((lo, hi), s) in dom.intervals.iter().zip(&dom.orientations) {
            assert!(lo <= hi);
            assert!(s.abs() <= 1.0);
        }
        // Endpoints come from evaluating the curve at 0 and eta.
        let s0 = curve.state_at(0.0).unwrap();
        let s1 = curve.state_at(0.9).unwrap();
        let th = (s0.position[0].min(s1.position[0]), s0.position[0].max(s1.position[0]));
        assert_eq!(dom.intervals[0], th);
    }

    #[test]
    fn accessible_volumes() {
        assert!((accessible_volume(MetricKind::Sjoqvist) - 2.4674011002723395).abs() < 1e-12);
        for kind in [
            MetricKind::FubiniStudy,
            MetricKind::Sjoqvist,
            MetricKind::Bures,
            MetricKind::BlochSphere,
        ] {
            let q = accessible_volume_quadrature(kind, 1e-12);
            assert!(
                (q - accessible_volume(kind)).abs() < 1e-8,
                "{kind:?}: {q} vs {}",
                accessible_volume(kind)
            );
        }
        assert!((accessible_volume(MetricKind::Bures) * 2.0
            - accessible_volume(MetricKind::Sjoqvist))
        .abs()
            < 1e-15);
    }

    #[test]
    fn explored_volume_matches_closed_form_on_window() {
        // Equatorial unit-speed setup: theta_dot_i = a, c = 0.6.
        let c_fs = 0.6;
        let a = (1.0f64 - 0.36).sqrt();
        let curve = fs_curve(PI / 2.0, a, c_fs).with_branch(Branch::Principal);
        for eta in [0.2, 0.7, 1.2] {
            let v = explored_volume(&curve, eta).unwrap();
            let closed = v_fs_closed(eta, a, c_fs);
            assert!(
                (v.magnitude - closed.abs()).abs() < 1e-12,
                "eta {eta}: {} vs {closed}",
                v.magnitude
            );
        }
        assert_eq!(explored_volume(&curve, 0.0).unwrap().magnitude, 0.0);
        // |V_FS| <= pi/8 for the equatorial start.
        for i in 0..200 {
            let eta = i as f64 * 0.05;
            assert!(v_fs_closed(eta, a, c_fs).abs() <= PI / 8.0 + 1e-12);
        }
    }

    #[test]
    fn sjoqvist_volume_against_box_quadrature() {
        let spec = GeodesicSpec::new(
            MetricKind::Sjoqvist,
            BlochPoint::new(0.2, PI / 2.0, 0.0).unwrap(),
            vec![0.5, 0.8, 0.6],
        )
        .unwrap();
        let curve = sjoqvist_geodesic(&spec).unwrap().with_branch(Branch::Principal);
        let eta = 0.8;
        let v = explored_volume(&curve, eta).unwrap();
        let s0 = curve.state_at(0.0).unwrap();
        let s1 = curve.state_at(eta).unwrap();
        let oracle = explored_volume_box_quadrature(
            MetricKind::Sjoqvist,
            &s0.position,
            &s1.position,
            1e-12,
        );
        assert!(
            (v.signed() - oracle).abs() <= 1e-6 * oracle.abs().max(1e-3),
            "{} vs {oracle}",
            v.signed()
        );
        // And against the literal closed form (iv2 shape).
        let a = curve.angular().a_fs();
        let closed = v_sjoqvist_closed(eta, a, 0.6, curve.k_radial());
        assert!((v.magnitude - closed.abs()).abs() < 1e-12);
    }

    #[test]
    fn i_v_fs_properties() {
        assert_eq!(i_v_fs(0.0, 0.3).unwrap(), 0.0);
        // c -> 1 limit: sin(tau) - tau cos(tau) on the principal interval.
        let tau = 0.9_f64;
        let lim = i_v_fs(tau, 1.0).unwrap();
        assert!((lim - (tau.sin() - tau * tau.cos())).abs() < 1e-9);

        // Quadrature of the c = 1 integrand reproduces the limit.
        let quad = adaptive_simpson(
            &|eta: f64| eta.sin() * atan_tan_principal(1.0, eta),
            0.0,
            tau,
            1e-12,
        );
        assert!((lim - quad).abs() < 1e-9);

        // d/dtau I = sin(tau) arctan(c tan tau) by central differences.
        let c = 0.45;
        for tau in [0.3, 0.8, 1.3] {
            let h = 1e-5;
            let d = (i_v_fs(tau + h, c).unwrap() - i_v_fs(tau - h, c).unwrap()) / (2.0 * h);
            let expect = tau.sin() * atan_tan_principal(c, tau);
            assert!((d - expect).abs() < 1e-6, "tau {tau}");
        }

        // I is the running integral of the principal-branch volume integrand
        // even across the eta = pi/2 kink.
        let c = 0.7;
        let tau = 2.4;
        let quad = adaptive_simpson(
            &|eta: f64| eta.sin() * atan_tan_principal(c, eta),
            0.0,
            tau,
            1e-12,
        );
        assert!((i_v_fs(tau, c).unwrap() - quad).abs() < 1e-8);
    }

    #[test]
    fn igc_closed_forms_match_quadrature_route() {
        // FS: C(tau) = (1/4) a I(tau)/tau against the curve-based average.
        let c_fs = 0.6;
        let a = (1.0f64 - c_fs * c_fs).sqrt();
        let curve = fs_curve(PI / 2.0, a, c_fs).with_branch(Branch::Principal);
        for tau in [0.4, 0.9, 1.4] {
            let closed = igc_fs_closed(tau, a, c_fs).unwrap();
            let quad = igc(&curve, tau).unwrap();
            assert!(
                (closed.abs() - quad.abs()).abs() <= 1e-6 * closed.abs().max(1e-6),
                "tau {tau}: {closed} vs {quad}"
            );
        }

        // Sjoqvist at the reference data point (unit angular speed).
        let spec = GeodesicSpec::new(
            MetricKind::Sjoqvist,
            BlochPoint::new(0.2, PI / 2.0, 0.0).unwrap(),
            vec![0.5, 0.8, 0.6],
        )
        .unwrap();
        let curve = sjoqvist_geodesic(&spec).unwrap().with_branch(Branch::Principal);
        let tau = 1.0;
        let k_r = curve.k_radial();
        let closed = igc_sjoqvist_closed(tau, a, c_fs, k_r).unwrap();
        let quad = igc(&curve, tau).unwrap();
        assert!(
            (closed.abs() - quad.abs()).abs() <= 1e-6 * closed.abs(),
            "{closed} vs {quad}"
        );

        // Small-tau limit: averaging a vanishing volume.
        assert!(igc(&curve, 1e-4).unwrap().abs() < 1e-6);
    }

    #[test]
    fn averaged_volume_running_integral_identity() {
        // d/dtau [tau C(tau)] = V(tau).
        let a = (1.0f64 - 0.25).sqrt();
        let curve = fs_curve(PI / 2.0, a, 0.5).with_branch(Branch::Principal);
        let tau = 0.8;
        let h = 1e-4;
        let f = |t: f64| t * igc(&curve, t).unwrap();
        let d = (f(tau + h) - f(tau - h)) / (2.0 * h);
        let v = explored_volume(&curve, tau).unwrap().signed();
        assert!((d - v).abs() < 1e-6, "{d} vs {v}");
    }

    #[test]
    fn entropy_is_log_of_positive_average() {
        let a = (1.0f64 - 0.25).sqrt();
        let curve = fs_curve(PI / 2.0, a, 0.5).with_branch(Branch::Principal);
        let tau = 0.9;
        let c = igc(&curve, tau).unwrap();
        assert!(c > 0.0);
        assert!((ige(&curve, tau).unwrap() - c.ln()).abs() < 1e-14);
        // Negative-averaged-volume case: flip the azimuthal direction.
        let flipped = fs_curve(PI / 2.0, a, -0.5).with_branch(Branch::Principal);
        assert!(matches!(
            ige(&flipped, tau),
            Err(Error::UndefinedEntropy)
        ));
    }

    #[test]
    fn asymptotic_laws() {
        let params = AsymptoticParams {
            r_i: 0.0,
            r_dot_i: 0.5,
            c_fs: 0.6,
        };
        let taus: Vec<f64> = (0..200)
            .map(|i| 100.0 * (10_000.0f64 / 100.0).powf(i as f64 / 199.0))
            .collect();
        let law = asymptotic_ratio(&params, &taus).unwrap();
        // ratio/tau = r_dot/(2 sqrt(1-r^2)) = 1/4 exactly.
        assert!((law.ratio_over_tau_exact - 0.25).abs() < 1e-15);
        assert!(law.max_ratio_deviation < 1e-12, "{}", law.max_ratio_deviation);
        assert!((law.ige_gap_slope - 1.0).abs() < 0.02, "{}", law.ige_gap_slope);
        assert!(law.rate_balance_deviation < 1e-10);

        assert!(asymptotic_ratio(
            &AsymptoticParams {
                r_i: 0.0,
                r_dot_i: 0.0,
                c_fs: 0.5
            },
            &taus
        )
        .is_err());
    }

    #[test]
    fn ratio_orderings() {
        let etas: Vec<f64> = (1..=300).map(|i| i as f64 * 0.05).collect();
        let rep = compare_sjoqvist_fs(0.2, 0.5, 0.6, &etas).unwrap();
        let k_r = 0.5 / (1.0f64 - 0.04).sqrt();
        let expect_star = PI / (2.0 * k_r);
        let star = rep.eta_star.expect("threshold");
        assert!(star >= expect_star - 0.051 && star <= expect_star + 0.1,
            "star {star} vs {expect_star}");

        let rep = compare_bures_sjoqvist_slice(0.3, 0.8, 0.4, 1.0, &etas).unwrap();
        assert!(rep.eta_star.is_some());

        // Small eta: both ratios vanish.
        let rep = compare_sjoqvist_fs(0.2, 0.5, 0.6, &[1e-6, 2e-6, 3e-6]).unwrap();
        assert!(rep.lhs[0] < 1e-12 && rep.rhs[0] < 1e-12);

        let params = ComparisonParams {
            r_i: 0.3,
            r_dot_i: 0.4,
            c_fs: 0.5,
            theta_i: 0.4,
            theta_dot_i: 1.0,
        };
        let both = volume_ratio_comparison(&params, &etas).unwrap();
        assert!(both.sjoqvist_vs_fs.eta_star.is_some());
        assert!(both.bures_vs_sjoqvist.eta_star.is_some());
    }

    #[test]
    fn length_inequalities() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(15);
        for _ in 0..10_000 {
            let r_i = rng.gen_range(0.01..0.99);
            let r_f = rng.gen_range(0.01..0.99);
            let theta_f = rng.gen_range(0.01..PI);
            assert!(sjoqvist_length_theta(r_i, r_f, theta_f) >= fs_length_theta(theta_f));

            let r_prime = rng.gen_range(-1.5..1.5);
            let td = rng.gen_range(0.01..2.0);
            let eta_f = rng.gen_range(0.01..2.0);
            assert!(
                bures_length_eta(r_i, r_prime, td, eta_f)
                    <= sjoqvist_length_eta(r_i, r_prime, td, eta_f) + 1e-15
            );
        }
        // Equality case r_f = r_i.
        assert_eq!(sjoqvist_length_theta(0.5, 0.5, 1.0), fs_length_theta(1.0));
    }
}
