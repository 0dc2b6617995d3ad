//! Geodesics of the four metrics: closed-form curves with their conserved
//! constants, radial profiles in the theta-affine parametrization, and a
//! fixed-step RK4 integrator of the geodesic equations used as an
//! independent oracle.
//!
//! Closed-form curves carry an explicit validity window: the open interval of
//! the affine parameter on which every chart constraint holds (`r` strictly
//! inside the ball for the mixed metrics, `sin(theta) > 0` where the chart
//! needs it). Queries outside the closed window return a window error.

use crate::error::{Error, Result};
use crate::metrics::{line_element, MetricKind};
use crate::states::BlochPoint;

const PI: f64 = std::f64::consts::PI;

/// Branch handling for the azimuthal closed form `phi_i + arctan(c tan eta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    /// Principal arctan: bounded, discontinuous at `eta = pi/2 + k pi`.
    Principal,
    /// Adds `k pi` to keep the curve continuous.
    #[default]
    Unwrapped,
}

impl Branch {
    pub fn name(&self) -> &'static str {
        match self {
            Branch::Principal => "principal",
            Branch::Unwrapped => "unwrapped",
        }
    }
}

/// Reduction `x - k pi` onto the branch `(-pi/2, pi/2]`, returning `(k, x0)`.
/// The half-open convention keeps the unwrapped antiderivative continuous
/// across the tangent poles.
fn reduce_half_period(x: f64) -> (f64, f64) {
    let k = ((x - PI / 2.0) / PI).ceil();
    (k, x - k * PI)
}

/// Principal-branch `arctan(c tan x)`.
pub(crate) fn atan_tan_principal(c: f64, x: f64) -> f64 {
    let (_, x0) = reduce_half_period(x);
    if x0.cos().abs() < 1e-15 {
        return c.signum() * PI / 2.0;
    }
    (c * x0.tan()).atan()
}

/// Continuous `arctan(c tan x)`: the principal value plus `k pi`.
fn atan_tan_unwrapped(c: f64, x: f64) -> f64 {
    let (k, x0) = reduce_half_period(x);
    atan_tan_principal(c, x0) + k * PI * c.signum()
}

fn branch_atan(branch: Branch, c: f64, x: f64) -> f64 {
    match branch {
        Branch::Principal => atan_tan_principal(c, x),
        Branch::Unwrapped => atan_tan_unwrapped(c, x),
    }
}

/// State of a curve at one value of the affine parameter. Coordinates are
/// `[theta, phi, -]` for 2-D metrics and `[r, theta, phi]` for 3-D ones.
#[derive(Debug, Clone, Copy)]
pub struct CurveState {
    pub position: [f64; 3],
    pub velocity: [f64; 3],
}

impl CurveState {
    pub fn to_point(&self, kind: MetricKind) -> Result<BlochPoint> {
        match kind.dim() {
            2 => BlochPoint::new(1.0, self.position[0], self.position[1]),
            _ => BlochPoint::new(self.position[0], self.position[1], self.position[2]),
        }
    }

    pub fn velocity_slice(&self, kind: MetricKind) -> &[f64] {
        &self.velocity[..kind.dim()]
    }
}

/// A parametrized geodesic (closed form or sampled). Curves are immutable
/// after construction; evaluation is pure, so batch evaluation over
/// parameter grids can run data-parallel.
pub trait Curve: Send + Sync {
    fn kind(&self) -> MetricKind;
    /// Open interval of valid affine parameters containing 0.
    fn window(&self) -> (f64, f64);
    fn state_at(&self, eta: f64) -> Result<CurveState>;
    /// Exact constant speed when the curve knows it in closed form.
    fn constant_speed(&self) -> Option<f64> {
        None
    }
}

fn check_window(eta: f64, (lo, hi): (f64, f64)) -> Result<()> {
    if eta < lo || eta > hi {
        Err(Error::OutsideWindow { eta, lo, hi })
    } else {
        Ok(())
    }
}

/// Initial data for a geodesic: a point and coordinate rates per affine
/// parameter, with the velocity dimension matching the metric.
#[derive(Debug, Clone)]
pub struct GeodesicSpec {
    pub kind: MetricKind,
    pub point: BlochPoint,
    pub velocity: Vec<f64>,
}

impl GeodesicSpec {
    pub fn new(kind: MetricKind, point: BlochPoint, velocity: Vec<f64>) -> Result<Self> {
        if velocity.len() != kind.dim() {
            return Err(Error::DimensionMismatch {
                expected: kind.dim(),
                got: velocity.len(),
            });
        }
        Ok(GeodesicSpec {
            kind,
            point,
            velocity,
        })
    }
}

// ---------------------------------------------------------------------------
// Fubini-Study (and Bloch-sphere) closed form
// ---------------------------------------------------------------------------

/// Great-circle geodesic in `(theta, phi)` coordinates:
/// `cos(theta) = a sin(v eta + delta)` and
/// `phi = phi_i + arctan(c_hat tan(v eta + delta)) - arctan(c_hat tan(delta))`
/// (sign and branch handled internally).
///
/// `a^2 + c_hat^2 = 1` holds for the speed-normalized constants; the raw
/// conserved quantity is `c_fs = phi_dot sin^2(theta)`.
#[derive(Debug, Clone)]
pub struct FsGeodesic {
    kind: MetricKind,
    theta_i: f64,
    phi_i: f64,
    /// Sphere-coordinate speed: `sqrt(theta_dot^2 + sin^2 theta phi_dot^2)`.
    v_tilde: f64,
    /// Conserved `phi_dot sin^2(theta)`.
    c_fs: f64,
    /// `|c_fs| / v_tilde`, in [0, 1].
    c_hat: f64,
    /// `sqrt(1 - c_hat^2)`.
    a_hat: f64,
    delta: f64,
    branch: Branch,
    window: (f64, f64),
}

impl FsGeodesic {
    pub fn a_fs(&self) -> f64 {
        self.a_hat
    }

    pub fn c_fs(&self) -> f64 {
        self.c_fs
    }

    pub fn c_hat(&self) -> f64 {
        self.c_hat * self.c_fs.signum()
    }

    pub fn v_tilde(&self) -> f64 {
        self.v_tilde
    }

    pub fn phase(&self) -> f64 {
        self.delta
    }

    pub fn phi_i(&self) -> f64 {
        self.phi_i
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    fn build(kind: MetricKind, theta_i: f64, phi_i: f64, theta_dot_i: f64, phi_dot_i: f64) -> Result<Self> {
        let st_i = theta_i.sin();
        if st_i == 0.0 && theta_dot_i == 0.0 && phi_dot_i != 0.0 {
            return Err(Error::InvalidVelocity(
                "azimuthal rate at a pole with no polar rate has zero speed but nonzero coordinate motion".into(),
            ));
        }
        let v2 = theta_dot_i * theta_dot_i + st_i * st_i * phi_dot_i * phi_dot_i;
        let v_tilde = v2.sqrt();
        if v_tilde == 0.0 {
            // Constant curve.
            return Ok(FsGeodesic {
                kind,
                theta_i,
                phi_i,
                v_tilde: 0.0,
                c_fs: 0.0,
                c_hat: 0.0,
                a_hat: 0.0,
                delta: 0.0,
                branch: Branch::default(),
                window: (f64::NEG_INFINITY, f64::INFINITY),
            });
        }
        let c_fs = phi_dot_i * st_i * st_i;
        let c_hat = (c_fs.abs() / v_tilde).min(1.0);
        let a_hat = (1.0 - c_hat * c_hat).max(0.0).sqrt();
        let eps_i = theta_i.cos();
        let delta = if a_hat == 0.0 {
            0.0
        } else if theta_dot_i == 0.0 && eps_i == 0.0 {
            // Equator start at the turning apex: "+" branch tie-break.
            0.0
        } else {
            (eps_i * v_tilde).atan2(-st_i * theta_dot_i)
        };
        // Poles are reached only on meridians (a_hat = 1): sin(theta) = 0
        // exactly where |sin(v eta + delta)| = 1.
        let window = if a_hat >= 1.0 - 1e-14 {
            let x0 = delta;
            // Poles at x = pi/2 + k pi; the window runs between the nearest
            // crossings on either side, pushed one period out when the curve
            // already starts at a pole.
            let k_hi = ((x0 - PI / 2.0) / PI).ceil();
            let k_lo = ((x0 - PI / 2.0) / PI).floor();
            let mut hi_x = PI / 2.0 + k_hi * PI;
            let mut lo_x = PI / 2.0 + k_lo * PI;
            if hi_x - x0 < 1e-12 {
                hi_x += PI;
            }
            if x0 - lo_x < 1e-12 {
                lo_x -= PI;
            }
            ((lo_x - x0) / v_tilde, (hi_x - x0) / v_tilde)
        } else {
            (f64::NEG_INFINITY, f64::INFINITY)
        };
        Ok(FsGeodesic {
            kind,
            theta_i,
            phi_i,
            v_tilde,
            c_fs,
            c_hat,
            a_hat,
            delta,
            branch: Branch::default(),
            window,
        })
    }

    fn angular_state(&self, eta: f64) -> (f64, f64, f64, f64) {
        if self.v_tilde == 0.0 {
            return (self.theta_i, self.phi_i, 0.0, 0.0);
        }
        let x = self.v_tilde * eta + self.delta;
        let u = (self.a_hat * x.sin()).clamp(-1.0, 1.0);
        let theta = u.acos();
        let st = (1.0 - u * u).max(0.0).sqrt();
        let theta_dot = if self.a_hat == 0.0 {
            0.0
        } else if st > 1e-14 {
            -self.a_hat * self.v_tilde * x.cos() / st
        } else {
            // Meridian fold point: the polar rate has magnitude v_tilde.
            -self.v_tilde * x.cos().signum()
        };
        let sign_c = self.c_fs.signum();
        let phi = if self.c_fs == 0.0 {
            self.phi_i
        } else {
            self.phi_i
                + sign_c
                    * (branch_atan(self.branch, self.c_hat, x)
                        - branch_atan(self.branch, self.c_hat, self.delta))
        };
        let phi_dot = if self.c_fs == 0.0 {
            0.0
        } else {
            self.c_fs / (st * st).max(1e-300)
        };
        (theta, phi, theta_dot, phi_dot)
    }
}

impl Curve for FsGeodesic {
    fn kind(&self) -> MetricKind {
        self.kind
    }

    fn window(&self) -> (f64, f64) {
        self.window
    }

    fn state_at(&self, eta: f64) -> Result<CurveState> {
        check_window(eta, self.window)?;
        let (theta, phi, theta_dot, phi_dot) = self.angular_state(eta);
        Ok(CurveState {
            position: [theta, phi, 0.0],
            velocity: [theta_dot, phi_dot, 0.0],
        })
    }

    fn constant_speed(&self) -> Option<f64> {
        // The 2-D metrics are conformal multiples of the round sphere.
        let scale = match self.kind {
            MetricKind::BlochSphere => 1.0,
            _ => 0.5,
        };
        Some(scale * self.v_tilde)
    }
}

/// Closed-form Fubini-Study geodesic from initial data.
pub fn fs_geodesic(spec: &GeodesicSpec) -> Result<FsGeodesic> {
    if spec.kind.dim() != 2 {
        return Err(Error::InvalidCoordinate(format!(
            "fs_geodesic needs a 2-D metric, got {}",
            spec.kind.name()
        )));
    }
    FsGeodesic::build(
        spec.kind,
        spec.point.theta(),
        spec.point.phi(),
        spec.velocity[0],
        spec.velocity[1],
    )
}

/// Maximum great-circle residual `|cot(theta) - s sqrt((1-c^2)/c^2) sin(phi - phi_i)|`
/// along the curve, with the sign branch fixed once from the first sample
/// away from the equator crossing.
pub fn great_circle_residual(curve: &FsGeodesic, etas: &[f64]) -> Result<f64> {
    if curve.a_hat == 0.0 {
        // Equator: identically 0 = 0.
        return Ok(0.0);
    }
    if curve.c_hat == 0.0 {
        return Err(Error::DegenerateParameters(
            "great-circle form divides by c_fs; meridians are excluded".into(),
        ));
    }
    let amp = (1.0 - curve.c_hat * curve.c_hat).max(0.0).sqrt() / curve.c_hat;
    let mut sign = 0.0;
    let mut max_res = 0.0_f64;
    for &eta in etas {
        let s = curve.state_at(eta)?;
        let (theta, phi) = (s.position[0], s.position[1]);
        let st = theta.sin();
        if st < 1e-12 {
            continue;
        }
        let lhs = theta.cos() / st;
        let rhs = amp * (phi - curve.phi_i).sin();
        if sign == 0.0 && rhs.abs() > 1e-6 {
            sign = (lhs / rhs).signum();
        }
        if sign != 0.0 {
            max_res = max_res.max((lhs - sign * rhs).abs());
        }
    }
    Ok(max_res)
}

// ---------------------------------------------------------------------------
// Sjoqvist closed form
// ---------------------------------------------------------------------------

/// Sjoqvist geodesic: decoupled radial motion
/// `r(eta) = sin(arcsin r_i + k eta)` with `k = r_dot_i / sqrt(1 - r_i^2)`,
/// and angular motion identical to the Fubini-Study geodesic.
#[derive(Debug, Clone)]
pub struct SjoqvistGeodesic {
    rho_i: f64,
    k_radial: f64,
    angular: FsGeodesic,
    window: (f64, f64),
    on_pure_slice: bool,
}

impl SjoqvistGeodesic {
    /// Conserved radial constant `r_dot^2 / (1 - r^2) = k^2`.
    pub fn radial_constant(&self) -> f64 {
        self.k_radial * self.k_radial
    }

    pub fn k_radial(&self) -> f64 {
        self.k_radial
    }

    pub fn angular(&self) -> &FsGeodesic {
        &self.angular
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.angular = self.angular.with_branch(branch);
        self
    }

    pub fn r_at(&self, eta: f64) -> f64 {
        if self.on_pure_slice {
            1.0
        } else {
            (self.rho_i + self.k_radial * eta).sin()
        }
    }

    fn r_dot_at(&self, eta: f64) -> f64 {
        if self.on_pure_slice {
            0.0
        } else {
            self.k_radial * (self.rho_i + self.k_radial * eta).cos()
        }
    }
}

impl Curve for SjoqvistGeodesic {
    fn kind(&self) -> MetricKind {
        MetricKind::Sjoqvist
    }

    fn window(&self) -> (f64, f64) {
        self.window
    }

    fn state_at(&self, eta: f64) -> Result<CurveState> {
        check_window(eta, self.window)?;
        let (theta, phi, theta_dot, phi_dot) = self.angular.angular_state(eta);
        Ok(CurveState {
            position: [self.r_at(eta), theta, phi],
            velocity: [self.r_dot_at(eta), theta_dot, phi_dot],
        })
    }

    fn constant_speed(&self) -> Option<f64> {
        let k2 = self.k_radial * self.k_radial;
        let v2 = self.angular.v_tilde * self.angular.v_tilde;
        Some(0.5 * (k2 + v2).sqrt())
    }
}

/// Closed-form Sjoqvist geodesic from initial data `(r, theta, phi)` and
/// rates `(r_dot, theta_dot, phi_dot)`.
pub fn sjoqvist_geodesic(spec: &GeodesicSpec) -> Result<SjoqvistGeodesic> {
    if spec.kind != MetricKind::Sjoqvist {
        return Err(Error::InvalidCoordinate(format!(
            "sjoqvist_geodesic got metric {}",
            spec.kind.name()
        )));
    }
    let (r_i, r_dot_i) = (spec.point.r(), spec.velocity[0]);
    let angular = FsGeodesic::build(
        MetricKind::FubiniStudy,
        spec.point.theta(),
        spec.point.phi(),
        spec.velocity[1],
        spec.velocity[2],
    )?;

    if r_i >= 1.0 {
        if r_dot_i != 0.0 {
            return Err(Error::InvalidVelocity(
                "r_i = 1 with nonzero radial rate leaves the Bloch ball".into(),
            ));
        }
        // Pure-state slice: the metric restricts to Fubini-Study.
        let window = angular.window;
        return Ok(SjoqvistGeodesic {
            rho_i: PI / 2.0,
            k_radial: 0.0,
            angular,
            window,
            on_pure_slice: true,
        });
    }
    if r_i <= 0.0 && r_dot_i <= 0.0 {
        return Err(Error::InvalidVelocity(
            "r_i = 0 needs a positive radial rate to enter the Bloch ball".into(),
        ));
    }
    let rho_i = r_i.asin();
    let k = r_dot_i / (1.0 - r_i * r_i).sqrt();
    // Radial validity: arcsin(r_i) + k eta stays in (0, pi/2).
    let radial_window = if k == 0.0 {
        (f64::NEG_INFINITY, f64::INFINITY)
    } else if k > 0.0 {
        ((-rho_i) / k, (PI / 2.0 - rho_i) / k)
    } else {
        ((PI / 2.0 - rho_i) / k, (-rho_i) / k)
    };
    let window = (
        radial_window.0.max(angular.window.0),
        radial_window.1.min(angular.window.1),
    );
    Ok(SjoqvistGeodesic {
        rho_i,
        k_radial: k,
        angular,
        window,
        on_pure_slice: false,
    })
}

// ---------------------------------------------------------------------------
// Theta-affine radial profiles
// ---------------------------------------------------------------------------

/// Sjoqvist radial geodesic in the theta-affine parametrization:
/// `r(theta) = sin(arcsin r_i + slope (theta - theta_i))`.
#[derive(Debug, Clone)]
pub struct SjoqvistRadialProfile {
    pub theta_i: f64,
    rho_i: f64,
    slope: f64,
}

impl SjoqvistRadialProfile {
    pub fn r(&self, theta: f64) -> f64 {
        (self.rho_i + self.slope * (theta - self.theta_i)).sin()
    }

    pub fn r_prime(&self, theta: f64) -> f64 {
        self.slope * (self.rho_i + self.slope * (theta - self.theta_i)).cos()
    }

    /// Beltrami constant `r'^2 / (1 - r^2)`.
    pub fn beltrami_constant(&self) -> f64 {
        self.slope * self.slope
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }
}

fn check_unit_interval(name: &str, v: f64, allow_one: bool) -> Result<()> {
    let ok = v > 0.0 && (v < 1.0 || (allow_one && v <= 1.0));
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidCoordinate(format!(
            "{name} = {v} outside the valid radial interval"
        )))
    }
}

/// Boundary-value form: `r(0) = r_i`, `r(theta_f) = r_f` with `theta_i = 0`.
pub fn sjoqvist_r_of_theta_boundary(r_i: f64, r_f: f64, theta_f: f64) -> Result<SjoqvistRadialProfile> {
    check_unit_interval("r_i", r_i, true)?;
    check_unit_interval("r_f", r_f, true)?;
    if theta_f <= 0.0 {
        return Err(Error::InvalidCoordinate("theta_f must be positive".into()));
    }
    Ok(SjoqvistRadialProfile {
        theta_i: 0.0,
        rho_i: r_i.asin(),
        slope: (r_f.asin() - r_i.asin()) / theta_f,
    })
}

/// Initial-condition form: `r(0) = r_i`, `r'(0) = r_prime_i`.
pub fn sjoqvist_r_of_theta_initial(r_i: f64, r_prime_i: f64) -> Result<SjoqvistRadialProfile> {
    check_unit_interval("r_i", r_i, false)?;
    Ok(SjoqvistRadialProfile {
        theta_i: 0.0,
        rho_i: r_i.asin(),
        slope: r_prime_i / (1.0 - r_i * r_i).sqrt(),
    })
}

/// Beltrami constant `c_S = theta_f / sqrt(theta_f^2 + [arcsin r_f - arcsin r_i]^2)`,
/// in `[0, 1]`.
pub fn sjoqvist_c_s(r_i: f64, r_f: f64, theta_f: f64) -> f64 {
    let d = r_f.asin() - r_i.asin();
    theta_f / (theta_f * theta_f + d * d).sqrt()
}

/// Bures radial geodesic in the theta-affine parametrization:
/// `r(theta)^2 = cos^2(A - (theta - theta_i)) + sin^2(A - (theta - theta_i)) / a_B`.
#[derive(Debug, Clone)]
pub struct BuresRadialProfile {
    pub theta_i: f64,
    a_b: f64,
    big_a: f64,
}

impl BuresRadialProfile {
    pub fn a_b(&self) -> f64 {
        self.a_b
    }

    /// Perigee radius `c_B = 1/sqrt(a_B)`; the curve keeps `c_B <= r <= 1`.
    pub fn c_b(&self) -> f64 {
        1.0 / self.a_b.sqrt()
    }

    pub fn big_a(&self) -> f64 {
        self.big_a
    }

    pub fn r(&self, theta: f64) -> f64 {
        // (1 + tan^2 X)/(1 + a_B tan^2 X) = 1/(cos^2 X + a_B sin^2 X).
        let x = self.big_a - (theta - self.theta_i);
        let (sx, cx) = x.sin_cos();
        1.0 / (cx * cx + self.a_b * sx * sx).sqrt()
    }

    pub fn r_prime(&self, theta: f64) -> f64 {
        let x = self.big_a - (theta - self.theta_i);
        // d(r^2)/dtheta = r^4 sin(2x) (a_B - 1), then r' = that / (2r).
        let r = self.r(theta);
        0.5 * r * r * r * (2.0 * x).sin() * (self.a_b - 1.0)
    }

    /// Beltrami analog `r^2 / sqrt(r^2 + r'^2/(1-r^2))`.
    pub fn beltrami_constant(&self, theta: f64) -> f64 {
        let r = self.r(theta);
        let rp = self.r_prime(theta);
        r * r / (r * r + rp * rp / (1.0 - r * r)).sqrt()
    }
}

/// Bures `r(theta)` profile from initial conditions. `r_prime_i = 0` is the
/// radial turning point, handled by the `A -> pi/2` limit.
pub fn bures_r_of_theta(r_i: f64, r_prime_i: f64, theta_i: f64) -> Result<BuresRadialProfile> {
    check_unit_interval("r_i", r_i, false)?;
    let omr2 = 1.0 - r_i * r_i;
    let a_b = 1.0 / (r_i * r_i) + r_prime_i * r_prime_i / (r_i.powi(4) * omr2);
    let big_a = if r_prime_i == 0.0 {
        PI / 2.0
    } else {
        ((r_i / r_prime_i) * omr2).atan()
    };
    Ok(BuresRadialProfile { theta_i, a_b, big_a })
}

// ---------------------------------------------------------------------------
// Bures eta-parametrized closed form (constant phi)
// ---------------------------------------------------------------------------

/// Bures geodesic with constant `phi`, parametrized by the affine parameter:
/// both `theta(eta)` and `r(eta)` in closed form, with `r^2 theta_dot`
/// conserved.
#[derive(Debug, Clone)]
pub struct BuresEtaGeodesic {
    r_i: f64,
    theta_i: f64,
    phi_i: f64,
    a_b: f64,
    big_a: f64,
    /// `sqrt(a_B)`.
    s: f64,
    /// Conserved `r^2 theta_dot = r_i^2 theta_dot_i`.
    q: f64,
    g0: f64,
    window: (f64, f64),
}

impl BuresEtaGeodesic {
    pub fn r_i(&self) -> f64 {
        self.r_i
    }

    pub fn a_b(&self) -> f64 {
        self.a_b
    }

    pub fn big_a(&self) -> f64 {
        self.big_a
    }

    pub fn angular_momentum(&self) -> f64 {
        self.q
    }

    fn g_at(&self, eta: f64) -> f64 {
        self.g0 - self.s * self.q * eta
    }

    /// Continuous inverse-scaled arctan: `W(G) = arctan(tan(G)/s) + k pi`
    /// on the branch `G - k pi in (-pi/2, pi/2]`.
    fn w_of(&self, g: f64) -> f64 {
        let (k, g0) = reduce_half_period(g);
        let w0 = if g0.cos().abs() < 1e-15 {
            PI / 2.0
        } else {
            (g0.tan() / self.s).atan()
        };
        w0 + k * PI
    }

    /// Inverse of `w_of`.
    fn g_of_w(&self, w: f64) -> f64 {
        let (k, w0) = reduce_half_period(w);
        let g0 = if w0.cos().abs() < 1e-15 {
            PI / 2.0
        } else {
            (self.s * w0.tan()).atan()
        };
        g0 + k * PI
    }

    /// Evaluates the closed form without the window check. The formulas are
    /// globally defined and serve as the formal continuation used by the
    /// volume comparisons.
    pub fn state_unchecked(&self, eta: f64) -> CurveState {
        let g = self.g_at(eta);
        let (sg, cg) = g.sin_cos();
        let r2 = cg * cg + sg * sg / self.a_b;
        let r = r2.sqrt();
        let theta = self.theta_i + self.big_a - self.w_of(g);
        let theta_dot = self.q * self.a_b / (self.a_b * cg * cg + sg * sg);
        // d(r^2)/deta = sin(2G) G' (1/a_B - 1) with G' = -s q.
        let dr2 = (2.0 * g).sin() * (-self.s * self.q) * (1.0 / self.a_b - 1.0);
        let r_dot = dr2 / (2.0 * r);
        CurveState {
            position: [r, theta, self.phi_i],
            velocity: [r_dot, theta_dot, 0.0],
        }
    }
}

impl Curve for BuresEtaGeodesic {
    fn kind(&self) -> MetricKind {
        MetricKind::Bures
    }

    fn window(&self) -> (f64, f64) {
        self.window
    }

    fn state_at(&self, eta: f64) -> Result<CurveState> {
        check_window(eta, self.window)?;
        Ok(self.state_unchecked(eta))
    }

    fn constant_speed(&self) -> Option<f64> {
        // v = (1/2) sqrt(r_dot^2/(1-r^2) + r^2 theta_dot^2), constant; use
        // the initial data where the closed form is exact.
        let st = self.state_unchecked(0.0);
        let (r, rd, td) = (st.position[0], st.velocity[0], st.velocity[1]);
        Some(0.5 * (rd * rd / (1.0 - r * r) + r * r * td * td).sqrt())
    }
}

/// Closed-form constant-phi Bures geodesic from `r_i`, `theta_i`, the polar
/// rate `theta_dot_i != 0`, and the profile slope `r_prime_i = dr/dtheta`.
pub fn bures_geodesic_eta(
    r_i: f64,
    theta_i: f64,
    theta_dot_i: f64,
    r_prime_i: f64,
) -> Result<BuresEtaGeodesic> {
    bures_geodesic_eta_at_phi(r_i, theta_i, theta_dot_i, r_prime_i, 0.0)
}

/// As [`bures_geodesic_eta`], holding the given constant `phi`.
pub fn bures_geodesic_eta_at_phi(
    r_i: f64,
    theta_i: f64,
    theta_dot_i: f64,
    r_prime_i: f64,
    phi_i: f64,
) -> Result<BuresEtaGeodesic> {
    check_unit_interval("r_i", r_i, false)?;
    if theta_dot_i == 0.0 {
        return Err(Error::InvalidVelocity(
            "pure radial Bures motion falls outside the closed form; integrate numerically".into(),
        ));
    }
    let profile = bures_r_of_theta(r_i, r_prime_i, theta_i)?;
    let (a_b, big_a) = (profile.a_b(), profile.big_a());
    let s = a_b.sqrt();
    let q = r_i * r_i * theta_dot_i;
    let g0 = if (big_a - PI / 2.0).abs() < 1e-15 {
        PI / 2.0
    } else {
        (s * big_a.tan()).atan()
    };
    let mut curve = BuresEtaGeodesic {
        r_i,
        theta_i,
        phi_i,
        a_b,
        big_a,
        s,
        q,
        g0,
        window: (f64::NEG_INFINITY, f64::INFINITY),
    };
    curve.window = bures_window(&curve);
    Ok(curve)
}

fn bures_window(c: &BuresEtaGeodesic) -> (f64, f64) {
    let rate = c.s * c.q; // dG/deta = -rate
    debug_assert!(rate != 0.0);
    // r = 1 exactly at G = k pi.
    let g_next_down = (c.g0 / PI).ceil() - 1.0; // largest multiple strictly below g0 in units of pi
    let g_next_up = (c.g0 / PI).floor() + 1.0;
    let (g_forward, g_backward) = if rate > 0.0 {
        (g_next_down * PI, g_next_up * PI)
    } else {
        (g_next_up * PI, g_next_down * PI)
    };
    let eta_r_fwd = (c.g0 - g_forward) / rate;
    let eta_r_bwd = (c.g0 - g_backward) / rate;

    // theta leaves (0, pi): theta = theta_i + A - W(G) so W(G) hits
    // theta_i + A - pi (forward if theta grows) or theta_i + A (backward).
    let w_at = |eta: f64| c.w_of(c.g_at(eta));
    let theta_at = |eta: f64| c.theta_i + c.big_a - w_at(eta);
    let solve_theta = |target: f64| -> f64 {
        // theta = target <=> G = g_of_w(theta_i + A - target)
        let g_t = c.g_of_w(c.theta_i + c.big_a - target);
        (c.g0 - g_t) / rate
    };
    let (eta_th_fwd, eta_th_bwd) = if c.q > 0.0 {
        (solve_theta(PI), solve_theta(0.0))
    } else {
        (solve_theta(0.0), solve_theta(PI))
    };
    debug_assert!(theta_at(0.0) > 0.0 && theta_at(0.0) < PI);

    let hi = eta_r_fwd.min(eta_th_fwd);
    let lo = eta_r_bwd.max(eta_th_bwd);
    (lo, hi)
}

// ---------------------------------------------------------------------------
// Numeric integration
// ---------------------------------------------------------------------------

/// Step control for the RK4 integrator.
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    /// Fixed RK4 step.
    pub step: f64,
    /// Distance from the chart boundary treated as a boundary event.
    pub boundary_tol: f64,
    /// Bisection width for locating the event parameter.
    pub event_resolution: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            step: 1e-3,
            boundary_tol: 1e-9,
            event_resolution: 1e-10,
        }
    }
}

/// Where and why integration stopped early.
#[derive(Debug, Clone)]
pub struct BoundaryEvent {
    pub eta: f64,
    pub description: String,
}

/// RK4 samples of a geodesic, usable as a [`Curve`] through cubic Hermite
/// interpolation between stored nodes.
#[derive(Debug, Clone)]
pub struct NumericGeodesic {
    kind: MetricKind,
    etas: Vec<f64>,
    states: Vec<CurveState>,
    pub boundary_event: Option<BoundaryEvent>,
}

impl NumericGeodesic {
    pub fn samples(&self) -> impl Iterator<Item = (f64, &CurveState)> {
        self.etas.iter().copied().zip(self.states.iter())
    }

    pub fn len(&self) -> usize {
        self.etas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.etas.is_empty()
    }

    pub fn last_eta(&self) -> f64 {
        *self.etas.last().unwrap()
    }
}

impl Curve for NumericGeodesic {
    fn kind(&self) -> MetricKind {
        self.kind
    }

    fn window(&self) -> (f64, f64) {
        (self.etas[0], self.last_eta())
    }

    fn state_at(&self, eta: f64) -> Result<CurveState> {
        check_window(eta, self.window())?;
        let idx = match self
            .etas
            .binary_search_by(|probe| probe.partial_cmp(&eta).unwrap())
        {
            Ok(i) => return Ok(self.states[i]),
            Err(i) => i.clamp(1, self.etas.len() - 1),
        };
        let (e0, e1) = (self.etas[idx - 1], self.etas[idx]);
        let (s0, s1) = (&self.states[idx - 1], &self.states[idx]);
        let h = e1 - e0;
        let t = (eta - e0) / h;
        // Cubic Hermite in each coordinate, velocities as derivatives.
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let dh00 = 6.0 * t * (t - 1.0) / h;
        let dh10 = 1.0 - 4.0 * t + 3.0 * t * t;
        let dh01 = -6.0 * t * (t - 1.0) / h;
        let dh11 = 3.0 * t * t - 2.0 * t;
        let mut position = [0.0; 3];
        let mut velocity = [0.0; 3];
        for k in 0..3 {
            position[k] = h00 * s0.position[k]
                + h10 * h * s0.velocity[k]
                + h01 * s1.position[k]
                + h11 * h * s1.velocity[k];
            velocity[k] = dh00 * s0.position[k]
                + dh10 * s0.velocity[k]
                + dh01 * s1.position[k]
                + dh11 * s1.velocity[k];
        }
        Ok(CurveState { position, velocity })
    }
}

/// Analytic Christoffel tables as raw coordinate functions (no domain
/// checks); shared by the integrator RHS.
fn geodesic_rhs(kind: MetricKind, y: &[f64; 6], dy: &mut [f64; 6]) {
    match kind {
        MetricKind::FubiniStudy | MetricKind::BlochSphere => {
            let (theta, _phi) = (y[0], y[1]);
            let (td, pd) = (y[3], y[4]);
            let (st, ct) = theta.sin_cos();
            dy[0] = td;
            dy[1] = pd;
            dy[2] = 0.0;
            dy[3] = st * ct * pd * pd;
            dy[4] = if pd == 0.0 { 0.0 } else { -2.0 * (ct / st) * td * pd };
            dy[5] = 0.0;
        }
        MetricKind::Sjoqvist => {
            let (r, theta) = (y[0], y[1]);
            let (rd, td, pd) = (y[3], y[4], y[5]);
            let (st, ct) = theta.sin_cos();
            dy[0] = rd;
            dy[1] = td;
            dy[2] = pd;
            dy[3] = -(r / (1.0 - r * r)) * rd * rd;
            dy[4] = st * ct * pd * pd;
            dy[5] = if pd == 0.0 { 0.0 } else { -2.0 * (ct / st) * td * pd };
        }
        MetricKind::Bures => {
            let (r, theta) = (y[0], y[1]);
            let (rd, td, pd) = (y[3], y[4], y[5]);
            let (st, ct) = theta.sin_cos();
            let omr2 = 1.0 - r * r;
            dy[0] = rd;
            dy[1] = td;
            dy[2] = pd;
            dy[3] = -(r / omr2) * rd * rd + omr2 * r * (td * td + st * st * pd * pd);
            dy[4] = -(2.0 / r) * rd * td + st * ct * pd * pd;
            dy[5] = if pd == 0.0 {
                0.0
            } else {
                -(2.0 / r) * rd * pd - 2.0 * (ct / st) * td * pd
            };
        }
    }
}

fn rk4_step(kind: MetricKind, y: &[f64; 6], h: f64) -> [f64; 6] {
    let mut k1 = [0.0; 6];
    let mut k2 = [0.0; 6];
    let mut k3 = [0.0; 6];
    let mut k4 = [0.0; 6];
    let mut tmp = [0.0; 6];
    geodesic_rhs(kind, y, &mut k1);
    for i in 0..6 {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    geodesic_rhs(kind, &tmp, &mut k2);
    for i in 0..6 {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    geodesic_rhs(kind, &tmp, &mut k3);
    for i in 0..6 {
        tmp[i] = y[i] + h * k3[i];
    }
    geodesic_rhs(kind, &tmp, &mut k4);
    let mut out = [0.0; 6];
    for i in 0..6 {
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Signed distance to the nearest chart boundary; nonpositive means the
/// state has left the valid chart.
fn boundary_margin(kind: MetricKind, y: &[f64; 6]) -> f64 {
    match kind {
        MetricKind::FubiniStudy | MetricKind::BlochSphere => {
            let theta = y[0];
            theta.min(PI - theta)
        }
        MetricKind::Sjoqvist | MetricKind::Bures => {
            let (r, theta) = (y[0], y[1]);
            r.min(1.0 - r).min(theta.min(PI - theta))
        }
    }
}

fn state_from_y(kind: MetricKind, y: &[f64; 6]) -> CurveState {
    let dim = kind.dim();
    let mut position = [0.0; 3];
    let mut velocity = [0.0; 3];
    position[..dim].copy_from_slice(&y[..dim]);
    velocity[..dim].copy_from_slice(&y[3..3 + dim]);
    CurveState { position, velocity }
}

/// Fixed-step RK4 integration of the geodesic equations over
/// `[0, eta_span]`, stopping early with a boundary event when the state
/// reaches `r -> {0, 1}` or `sin(theta) -> 0` within tolerance. The event
/// parameter is bisected down to `control.event_resolution`.
pub fn integrate_geodesic(
    spec: &GeodesicSpec,
    eta_span: f64,
    control: &StepControl,
) -> Result<NumericGeodesic> {
    let kind = spec.kind;
    let dim = kind.dim();
    let mut y = [0.0; 6];
    match dim {
        2 => {
            y[0] = spec.point.theta();
            y[1] = spec.point.phi();
            y[3] = spec.velocity[0];
            y[4] = spec.velocity[1];
        }
        _ => {
            y[0] = spec.point.r();
            y[1] = spec.point.theta();
            y[2] = spec.point.phi();
            y[3] = spec.velocity[0];
            y[4] = spec.velocity[1];
            y[5] = spec.velocity[2];
        }
    }
    if boundary_margin(kind, &y) <= control.boundary_tol {
        return Err(Error::MetricBoundary(
            "initial point already at the chart boundary".into(),
        ));
    }

    let h = control.step.min(eta_span.abs().max(control.step));
    let n_steps = (eta_span / h).ceil() as usize;
    let mut etas = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut eta = 0.0;
    etas.push(eta);
    states.push(state_from_y(kind, &y));
    let mut boundary_event = None;

    while eta < eta_span && boundary_event.is_none() {
        let step = h.min(eta_span - eta);
        let y_next = rk4_step(kind, &y, step);
        let ok = y_next.iter().all(|v| v.is_finite())
            && boundary_margin(kind, &y_next) > control.boundary_tol;
        if ok {
            y = y_next;
            eta += step;
            etas.push(eta);
            states.push(state_from_y(kind, &y));
        } else {
            // Bisect for the largest sub-step that stays in the chart.
            let mut lo = 0.0_f64;
            let mut hi = step;
            while hi - lo > control.event_resolution {
                let mid = 0.5 * (lo + hi);
                let y_mid = rk4_step(kind, &y, mid);
                let mid_ok = y_mid.iter().all(|v| v.is_finite())
                    && boundary_margin(kind, &y_mid) > control.boundary_tol;
                if mid_ok {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if lo > 0.0 {
                y = rk4_step(kind, &y, lo);
                eta += lo;
                etas.push(eta);
                states.push(state_from_y(kind, &y));
            }
            boundary_event = Some(BoundaryEvent {
                eta: eta + (hi - lo),
                description: "chart boundary reached (r in {0,1} or sin(theta) = 0)".into(),
            });
        }
    }

    Ok(NumericGeodesic {
        kind,
        etas,
        states,
        boundary_event,
    })
}

// ---------------------------------------------------------------------------
// Speeds and conserved quantities
// ---------------------------------------------------------------------------

/// Evolution speed `sqrt(g_{mu nu} xi_dot^mu xi_dot^nu)`; the overall 1/4 in
/// the metrics is what produces the 1/2 prefactor of the closed-form speeds.
pub fn speed(kind: MetricKind, point: &BlochPoint, velocity: &[f64]) -> Result<f64> {
    Ok(line_element(kind, point, velocity)?.max(0.0).sqrt())
}

/// The constants of motion carried by a geodesic, evaluated at one state.
#[derive(Debug, Clone, Copy)]
pub struct ConservedQuantities {
    pub speed: f64,
    /// `phi_dot sin^2(theta)` for the sphere-angular metrics, `r^2 theta_dot`
    /// for Bures (a constant of the constant-phi reduction only).
    pub angular: f64,
    /// `r_dot^2 / (1 - r^2)` for Sjoqvist; absent otherwise.
    pub radial: Option<f64>,
}

/// Conserved quantities at a curve state.
pub fn conserved_at(kind: MetricKind, state: &CurveState) -> Result<ConservedQuantities> {
    let point = state.to_point(kind)?;
    let v = state.velocity_slice(kind);
    let speed = speed(kind, &point, v)?;
    let (angular, radial) = match kind {
        MetricKind::FubiniStudy | MetricKind::BlochSphere => {
            let st = state.position[0].sin();
            (v[1] * st * st, None)
        }
        MetricKind::Sjoqvist => {
            let st = state.position[1].sin();
            let r = state.position[0];
            (
                v[2] * st * st,
                Some(v[0] * v[0] / (1.0 - r * r)),
            )
        }
        MetricKind::Bures => {
            let r = state.position[0];
            (r * r * v[1], None)
        }
    };
    Ok(ConservedQuantities {
        speed,
        angular,
        radial,
    })
}

/// Maximum drift of each conserved quantity over `n` samples of the curve
/// within `[0, eta_max]`.
#[derive(Debug, Clone, Copy)]
pub struct ConservedDrift {
    pub speed: f64,
    pub angular: f64,
    pub radial: f64,
}

pub fn conserved_drift(curve: &dyn Curve, eta_max: f64, n: usize) -> Result<ConservedDrift> {
    let kind = curve.kind();
    let first = conserved_at(kind, &curve.state_at(0.0)?)?;
    let mut drift = ConservedDrift {
        speed: 0.0,
        angular: 0.0,
        radial: 0.0,
    };
    for i in 1..=n {
        let eta = eta_max * i as f64 / n as f64;
        let q = conserved_at(kind, &curve.state_at(eta)?)?;
        drift.speed = drift.speed.max((q.speed - first.speed).abs());
        drift.angular = drift.angular.max((q.angular - first.angular).abs());
        if let (Some(a), Some(b)) = (q.radial, first.radial) {
            drift.radial = drift.radial.max((a - b).abs());
        }
    }
    Ok(drift)
}
