//! Christoffel symbols, Riemann/Ricci/scalar/sectional curvature for the four
//! metrics, a finite-difference cross-check engine, Killing-condition
//! verification on the unit sphere, and maximal-symmetry diagnostics.
//!
//! Sign convention: the scalar curvature of a unit two-sphere is +2 (opposite
//! of Weinberg's). [`SignConvention::Weinberg`] negates Ricci and scalar for
//! cross-checking against that convention.

use crate::error::{Error, Result};
use crate::metrics::{metric_tensor, MetricKind};
use crate::numerics::central_diff4;
use crate::states::BlochPoint;

const DIM_MAX: usize = 3;

/// Rank-3 array of connection coefficients, `c[k][i][j]` = Gamma^k_{ij}.
pub type Christoffels = [[[f64; DIM_MAX]; DIM_MAX]; DIM_MAX];
/// Fully lowered rank-4 curvature array, `r[a][b][c][d]` = R_{abcd}.
pub type RiemannLowered = [[[[f64; DIM_MAX]; DIM_MAX]; DIM_MAX]; DIM_MAX];

/// Orthonormal frame directions `e_r, e_theta, e_phi` (the coordinate frame
/// normalized by the metric scale factors).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    R,
    Theta,
    Phi,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::R => "r",
            Axis::Theta => "theta",
            Axis::Phi => "phi",
        }
    }

    fn index(&self, kind: MetricKind) -> Result<usize> {
        match (kind.dim(), self) {
            (2, Axis::Theta) => Ok(0),
            (2, Axis::Phi) => Ok(1),
            (2, Axis::R) => Err(Error::PlaneUnavailable("r".into())),
            (_, Axis::R) => Ok(0),
            (_, Axis::Theta) => Ok(1),
            (_, Axis::Phi) => Ok(2),
        }
    }
}

/// A 2-plane spanned by two distinct frame directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TangentPlane {
    pub a: Axis,
    pub b: Axis,
}

impl TangentPlane {
    pub fn new(a: Axis, b: Axis) -> Result<Self> {
        if a == b {
            return Err(Error::InvalidCoordinate(
                "tangent plane needs two distinct frame directions".into(),
            ));
        }
        Ok(TangentPlane { a, b })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignConvention {
    /// Unit two-sphere has scalar curvature +2.
    Positive,
    /// Weinberg's convention: Ricci and scalar negated.
    Weinberg,
}

/// Curvature inventory at a point: connection, Ricci, lowered Riemann,
/// scalar, and the sectional curvatures of all frame planes.
#[derive(Debug, Clone)]
pub struct CurvatureReport {
    pub kind: MetricKind,
    pub christoffels: Christoffels,
    pub ricci: [[f64; DIM_MAX]; DIM_MAX],
    pub riemann: RiemannLowered,
    pub scalar: f64,
    /// `(plane, K)` for every ordered pair of distinct frame directions.
    pub sectionals: Vec<(TangentPlane, f64)>,
}

impl CurvatureReport {
    pub fn sectional(&self, plane: &TangentPlane) -> Option<f64> {
        self.sectionals
            .iter()
            .find(|(p, _)| (p.a == plane.a && p.b == plane.b) || (p.a == plane.b && p.b == plane.a))
            .map(|(_, k)| *k)
    }

    pub fn scalar_in(&self, convention: SignConvention) -> f64 {
        match convention {
            SignConvention::Positive => self.scalar,
            SignConvention::Weinberg => -self.scalar,
        }
    }
}

fn check_interior(kind: MetricKind, point: &BlochPoint) -> Result<()> {
    let st = point.theta().sin();
    if st == 0.0 {
        return Err(Error::MetricBoundary(
            "curvature chart breaks down at sin(theta) = 0".into(),
        ));
    }
    if matches!(kind, MetricKind::Sjoqvist | MetricKind::Bures)
        && (point.r() <= 0.0 || point.r() >= 1.0)
    {
        return Err(Error::MetricBoundary(format!(
            "curvature needs 0 < r < 1 (r = {})",
            point.r()
        )));
    }
    Ok(())
}

/// Analytic Christoffel coefficients; all components not set are zero.
pub fn christoffel(kind: MetricKind, point: &BlochPoint) -> Result<Christoffels> {
    check_interior(kind, point)?;
    let r = point.r();
    let (st, ct) = point.theta().sin_cos();
    let cot = ct / st;
    let mut g = [[[0.0; DIM_MAX]; DIM_MAX]; DIM_MAX];
    match kind {
        // 2-D pure-state metrics share the sphere connection (conformal scale
        // drops out of the Christoffels).
        MetricKind::FubiniStudy | MetricKind::BlochSphere => {
            g[0][1][1] = -st * ct;
            g[1][0][1] = cot;
            g[1][1][0] = cot;
        }
        MetricKind::Sjoqvist => {
            g[0][0][0] = r / (1.0 - r * r);
            g[1][2][2] = -st * ct;
            g[2][1][2] = cot;
            g[2][2][1] = cot;
        }
        MetricKind::Bures => {
            g[0][0][0] = r / (1.0 - r * r);
            g[0][1][1] = -r * (1.0 - r * r);
            g[0][2][2] = -r * (1.0 - r * r) * st * st;
            g[1][0][1] = 1.0 / r;
            g[1][1][0] = 1.0 / r;
            g[1][2][2] = -st * ct;
            g[2][0][2] = 1.0 / r;
            g[2][2][0] = 1.0 / r;
            g[2][1][2] = cot;
            g[2][2][1] = cot;
        }
    }
    Ok(g)
}

/// Diagonal metric components as plain functions of the coordinates, without
/// domain checks. Finite-difference kernels shift coordinates slightly and
/// need raw evaluation.
fn metric_diag_raw(kind: MetricKind, coords: &[f64; DIM_MAX]) -> [f64; DIM_MAX] {
    match kind {
        MetricKind::FubiniStudy => {
            let st2 = coords[0].sin().powi(2);
            [0.25, 0.25 * st2, 0.0]
        }
        MetricKind::BlochSphere => {
            let st2 = coords[0].sin().powi(2);
            [1.0, st2, 0.0]
        }
        MetricKind::Sjoqvist => {
            let (r, st2) = (coords[0], coords[1].sin().powi(2));
            [0.25 / (1.0 - r * r), 0.25, 0.25 * st2]
        }
        MetricKind::Bures => {
            let (r, st2) = (coords[0], coords[1].sin().powi(2));
            [0.25 / (1.0 - r * r), 0.25 * r * r, 0.25 * r * r * st2]
        }
    }
}

fn point_coords(kind: MetricKind, point: &BlochPoint) -> [f64; DIM_MAX] {
    if kind.dim() == 2 {
        [point.theta(), point.phi(), 0.0]
    } else {
        [point.r(), point.theta(), point.phi()]
    }
}

/// Largest safe step along coordinate `k` before leaving the open domain.
fn boundary_distance(kind: MetricKind, coords: &[f64; DIM_MAX], k: usize) -> f64 {
    let theta_idx = if kind.dim() == 2 { 0 } else { 1 };
    if k == theta_idx {
        coords[k].min(std::f64::consts::PI - coords[k])
    } else if kind.dim() == 3 && k == 0 {
        coords[0].min(1.0 - coords[0])
    } else {
        f64::INFINITY
    }
}

/// Step for the fourth-order stencils, shrunk near the domain boundary.
/// The connection terms grow like 1/r and 1/(1-r), so balancing the h^4
/// truncation of their fifth derivatives against rounding noise gives a
/// step proportional to dist^(5/6).
fn fd_step(h: f64, dist: f64) -> f64 {
    if dist.is_finite() {
        h.min(2.5e-3 * dist.powf(5.0 / 6.0))
    } else {
        h
    }
}

/// Christoffel coefficients from fourth-order central differences of the
/// metric components, with the step shrunk near the domain boundary.
pub fn christoffel_numeric(kind: MetricKind, point: &BlochPoint, h: f64) -> Result<Christoffels> {
    check_interior(kind, point)?;
    let coords = point_coords(kind, point);
    christoffel_numeric_at(kind, &coords, h)
}

fn christoffel_numeric_at(
    kind: MetricKind,
    coords: &[f64; DIM_MAX],
    h: f64,
) -> Result<Christoffels> {
    let dim = kind.dim();
    // dg[l][i][j] = d g_{ij} / d xi^l (diagonal metrics: only i == j nonzero).
    let mut dg = [[[0.0; DIM_MAX]; DIM_MAX]; DIM_MAX];
    for l in 0..dim {
        let dist = boundary_distance(kind, coords, l);
        let h_l = fd_step(h, dist).min(if dist.is_finite() { 0.2 * dist } else { h });
        if h_l < 1e-12 {
            return Err(Error::MetricBoundary(format!(
                "point too close to the domain boundary for finite differences along {}",
                kind.coords()[l]
            )));
        }
        for j in 0..dim {
            let f = |x: f64| {
                let mut c = *coords;
                c[l] = x;
                metric_diag_raw(kind, &c)[j]
            };
            dg[l][j][j] = central_diff4(&f, coords[l], h_l);
        }
    }
    let g = metric_diag_raw(kind, coords);
    let mut out = [[[0.0; DIM_MAX]; DIM_MAX]; DIM_MAX];
    for k in 0..dim {
        let ginv = 1.0 / g[k];
        for i in 0..dim {
            for j in 0..dim {
                // Gamma^k_{ij} = (1/2) g^{kk} (d_i g_{kj} + d_j g_{ik} - d_k g_{ij})
                let mut val = 0.0;
                if j == k {
                    val += dg[i][k][k];
                }
                if i == k {
                    val += dg[j][k][k];
                }
                if i == j {
                    val -= dg[k][i][i];
                }
                out[k][i][j] = 0.5 * ginv * val;
            }
        }
    }
    Ok(out)
}

fn riemann_up_from(
    christoffels_at: &dyn Fn(&[f64; DIM_MAX]) -> Result<Christoffels>,
    kind: MetricKind,
    coords: &[f64; DIM_MAX],
    h: f64,
) -> Result<[[[[f64; DIM_MAX]; DIM_MAX]; DIM_MAX]; DIM_MAX]> {
    let dim = kind.dim();
    let gamma = christoffels_at(coords)?;
    // dgamma[c][a][b][d] = d Gamma^a_{bd} / d xi^c (fourth-order stencil).
    let mut dgamma = [[[[0.0; DIM_MAX]; DIM_MAX]; DIM_MAX]; DIM_MAX];
    for cdir in 0..dim {
        let dist = boundary_distance(kind, coords, cdir);
        let h_c = fd_step(h, dist).min(if dist.is_finite() { 0.1 * dist } else { h });
        let shifted = |s: f64| -> Result<Christoffels> {
            let mut cc = *coords;
            cc[cdir] += s;
            christoffels_at(&cc)
        };
        let gp2 = shifted(2.0 * h_c)?;
        let gp1 = shifted(h_c)?;
        let gm1 = shifted(-h_c)?;
        let gm2 = shifted(-2.0 * h_c)?;
        for a in 0..dim {
            for b in 0..dim {
                for d in 0..dim {
                    dgamma[cdir][a][b][d] = (-gp2[a][b][d] + 8.0 * gp1[a][b][d]
                        - 8.0 * gm1[a][b][d]
                        + gm2[a][b][d])
                        / (12.0 * h_c);
                }
            }
        }
    }
    let mut up = [[[[0.0; DIM_MAX]; DIM_MAX]; DIM_MAX]; DIM_MAX];
    for a in 0..dim {
        for b in 0..dim {
            for cc in 0..dim {
                for d in 0..dim {
                    // R^a_{bcd} = d_c Gamma^a_{bd} - d_d Gamma^a_{bc}
                    //             + Gamma^a_{ec} Gamma^e_{bd} - Gamma^a_{ed} Gamma^e_{bc}
                    let mut val = dgamma[cc][a][b][d] - dgamma[d][a][b][cc];
                    for e in 0..dim {
                        val += gamma[a][e][cc] * gamma[e][b][d] - gamma[a][e][d] * gamma[e][b][cc];
                    }
                    up[a][b][cc][d] = val;
                }
            }
        }
    }
    Ok(up)
}

/// Analytic curvature inventory from the closed-form tables.
pub fn curvature_report(kind: MetricKind, point: &BlochPoint) -> Result<CurvatureReport> {
    check_interior(kind, point)?;
    let christoffels = christoffel(kind, point)?;
    let r = point.r();
    let st2 = point.theta().sin().powi(2);
    let dim = kind.dim();

    let mut ricci = [[0.0; DIM_MAX]; DIM_MAX];
    // Nonzero lowered components R_{abab}, modulo index symmetries.
    let mut pair_components: Vec<(usize, usize, f64)> = Vec::new();
    match kind {
        MetricKind::FubiniStudy => {
            ricci[0][0] = 1.0;
            ricci[1][1] = st2;
            pair_components.push((0, 1, 0.25 * st2));
        }
        MetricKind::BlochSphere => {
            ricci[0][0] = 1.0;
            ricci[1][1] = st2;
            pair_components.push((0, 1, st2));
        }
        MetricKind::Sjoqvist => {
            ricci[1][1] = 1.0;
            ricci[2][2] = st2;
            pair_components.push((1, 2, 0.25 * st2));
        }
        MetricKind::Bures => {
            let omr2 = 1.0 - r * r;
            ricci[0][0] = 2.0 / omr2;
            ricci[1][1] = 2.0 * r * r;
            ricci[2][2] = 2.0 * r * r * st2;
            pair_components.push((0, 1, 0.25 * r * r / omr2));
            pair_components.push((0, 2, 0.25 * r * r * st2 / omr2));
            pair_components.push((1, 2, 0.25 * r.powi(4) * st2));
        }
    }

    let mut riemann = [[[[0.0; DIM_MAX]; DIM_MAX]; DIM_MAX]; DIM_MAX];
    for &(a, b, v) in &pair_components {
        riemann[a][b][a][b] = v;
        riemann[b][a][b][a] = v;
        riemann[a][b][b][a] = -v;
        riemann[b][a][a][b] = -v;
    }

    let g = metric_tensor(kind, point)?;
    let mut scalar = 0.0;
    for k in 0..dim {
        scalar += ricci[k][k] * g.inv_diag(k);
    }

    let sectionals = frame_sectionals(kind, &riemann, &g);

    Ok(CurvatureReport {
        kind,
        christoffels,
        ricci,
        riemann,
        scalar,
        sectionals,
    })
}

fn frame_sectionals(
    kind: MetricKind,
    riemann: &RiemannLowered,
    g: &crate::metrics::MetricEvaluation,
) -> Vec<(TangentPlane, f64)> {
    let axes: &[Axis] = if kind.dim() == 2 {
        &[Axis::Theta, Axis::Phi]
    } else {
        &[Axis::R, Axis::Theta, Axis::Phi]
    };
    let mut out = Vec::new();
    for (i, &a) in axes.iter().enumerate() {
        for (j, &b) in axes.iter().enumerate() {
            if i == j {
                continue;
            }
            let k = riemann[i][j][i][j] / (g.diag(i) * g.diag(j));
            out.push((TangentPlane { a, b }, k));
        }
    }
    out
}

/// Curvature inventory computed purely by finite differences of the metric
/// components. Independent of the analytic tables above.
pub fn curvature_report_numeric(
    kind: MetricKind,
    point: &BlochPoint,
    h: f64,
) -> Result<CurvatureReport> {
    check_interior(kind, point)?;
    let coords = point_coords(kind, point);
    let dim = kind.dim();
    let gamma_fn = |c: &[f64; DIM_MAX]| christoffel_numeric_at(kind, c, h);
    let up = riemann_up_from(&gamma_fn, kind, &coords, h)?;

    let g = metric_tensor(kind, point)?;
    let mut riemann = [[[[0.0; DIM_MAX]; DIM_MAX]; DIM_MAX]; DIM_MAX];
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                for d in 0..dim {
                    riemann[a][b][c][d] = g.diag(a) * up[a][b][c][d];
                }
            }
        }
    }
    let mut ricci = [[0.0; DIM_MAX]; DIM_MAX];
    for b in 0..dim {
        for d in 0..dim {
            let mut s = 0.0;
            for a in 0..dim {
                s += up[a][b][a][d];
            }
            ricci[b][d] = s;
        }
    }
    let mut scalar = 0.0;
    for k in 0..dim {
        scalar += ricci[k][k] * g.inv_diag(k);
    }
    let sectionals = frame_sectionals(kind, &riemann, &g);
    Ok(CurvatureReport {
        kind,
        christoffels: christoffel_numeric_at(kind, &coords, h)?,
        ricci,
        riemann,
        scalar,
        sectionals,
    })
}

/// Sectional curvature of a frame plane, from the analytic tables.
pub fn sectional_curvature(kind: MetricKind, point: &BlochPoint, plane: &TangentPlane) -> Result<f64> {
    let i = plane.a.index(kind)?;
    let j = plane.b.index(kind)?;
    if i == j {
        return Err(Error::InvalidCoordinate(
            "tangent plane needs two distinct frame directions".into(),
        ));
    }
    let report = curvature_report(kind, point)?;
    let g = metric_tensor(kind, point)?;
    Ok(report.riemann[i][j][i][j] / (g.diag(i) * g.diag(j)))
}

/// Residuals of the maximally-symmetric-space relations
/// `R = n(n-1)K`, `R_ab = (n-1)K g_ab`, and the Riemann reconstruction from
/// the metric, measured against the reference sectional curvature
/// `K = K(e_theta, e_phi)` at the first sample point.
#[derive(Debug, Clone)]
pub struct MaximalSymmetryReport {
    pub kind: MetricKind,
    pub dim: usize,
    pub k_reference: f64,
    pub sectional_isotropy_residual: f64,
    pub scalar_relation_residual: f64,
    pub ricci_relation_residual: f64,
    pub riemann_relation_residual: f64,
    pub tolerance: f64,
}

impl MaximalSymmetryReport {
    pub fn is_maximally_symmetric(&self) -> bool {
        self.sectional_isotropy_residual <= self.tolerance
            && self.scalar_relation_residual <= self.tolerance
            && self.ricci_relation_residual <= self.tolerance
            && self.riemann_relation_residual <= self.tolerance
    }

    /// Names of the relations that fail at the stored tolerance.
    pub fn failed_relations(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.sectional_isotropy_residual > self.tolerance {
            out.push("sectional isotropy");
        }
        if self.scalar_relation_residual > self.tolerance {
            out.push("R = n(n-1)K");
        }
        if self.ricci_relation_residual > self.tolerance {
            out.push("R_ab = (n-1)K g_ab");
        }
        if self.riemann_relation_residual > self.tolerance {
            out.push("Riemann reconstruction");
        }
        out
    }
}

pub fn maximal_symmetry_check(
    kind: MetricKind,
    points: &[BlochPoint],
) -> Result<MaximalSymmetryReport> {
    if points.len() < 2 {
        return Err(Error::InvalidCoordinate(
            "need at least two sample points".into(),
        ));
    }
    let dim = kind.dim();
    let n = dim as f64;
    let k_ref = sectional_curvature(kind, &points[0], &TangentPlane::new(Axis::Theta, Axis::Phi)?)?;

    let mut iso = 0.0_f64;
    let mut scalar_res = 0.0_f64;
    let mut ricci_res = 0.0_f64;
    let mut riemann_res = 0.0_f64;
    for p in points {
        let rep = curvature_report(kind, p)?;
        let g = metric_tensor(kind, p)?;
        for (_, k) in &rep.sectionals {
            iso = iso.max((k - k_ref).abs());
        }
        scalar_res = scalar_res.max((rep.scalar - n * (n - 1.0) * k_ref).abs());
        for a in 0..dim {
            for b in 0..dim {
                let gab = if a == b { g.diag(a) } else { 0.0 };
                ricci_res = ricci_res.max((rep.ricci[a][b] - (n - 1.0) * k_ref * gab).abs());
                for c in 0..dim {
                    for d in 0..dim {
                        let gbd = if b == d { g.diag(b) } else { 0.0 };
                        let gac = if a == c { g.diag(a) } else { 0.0 };
                        let gbc = if b == c { g.diag(b) } else { 0.0 };
                        let gad = if a == d { g.diag(a) } else { 0.0 };
                        let expect = rep.scalar / (n * (n - 1.0)) * (gbd * gac - gbc * gad);
                        riemann_res = riemann_res.max((rep.riemann[a][b][c][d] - expect).abs());
                    }
                }
            }
        }
    }
    Ok(MaximalSymmetryReport {
        kind,
        dim,
        k_reference: k_ref,
        sectional_isotropy_residual: iso,
        scalar_relation_residual: scalar_res,
        ricci_relation_residual: ricci_res,
        riemann_relation_residual: riemann_res,
        tolerance: 1e-8,
    })
}

// ---------------------------------------------------------------------------
// Killing vectors of the round sphere
// ---------------------------------------------------------------------------

/// A rotation generator of the unit two-sphere (metric `4 ds_FS^2`), or a
/// fixed linear combination of the three.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KillingField {
    /// `sin(phi) d_theta + cot(theta) cos(phi) d_phi`
    K1,
    /// `-cos(phi) d_theta + cot(theta) sin(phi) d_phi`
    K2,
    /// `-d_phi`
    K3,
    /// `c1 k1 + c2 k2 + c3 k3`
    Combination(f64, f64, f64),
}

impl KillingField {
    fn coefficients(&self) -> (f64, f64, f64) {
        match *self {
            KillingField::K1 => (1.0, 0.0, 0.0),
            KillingField::K2 => (0.0, 1.0, 0.0),
            KillingField::K3 => (0.0, 0.0, 1.0),
            KillingField::Combination(a, b, c) => (a, b, c),
        }
    }

    /// Lowered components `(k_theta, k_phi)` with the unit-sphere metric.
    pub fn lowered(&self, theta: f64, phi: f64) -> [f64; 2] {
        let (c1, c2, c3) = self.coefficients();
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        [
            c1 * sp - c2 * cp,
            c1 * st * ct * cp + c2 * st * ct * sp - c3 * st * st,
        ]
    }

    /// Partial derivatives `d_rho k_sigma`, indexed `[rho][sigma]`.
    pub fn grad_lowered(&self, theta: f64, phi: f64) -> [[f64; 2]; 2] {
        let (c1, c2, c3) = self.coefficients();
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let cos2t = ct * ct - st * st;
        [
            [
                0.0,
                c1 * cos2t * cp + c2 * cos2t * sp - 2.0 * c3 * st * ct,
            ],
            [
                c1 * cp + c2 * sp,
                -c1 * st * ct * sp + c2 * st * ct * cp,
            ],
        ]
    }
}

/// Maximum Killing-condition residual `|D_rho k_sigma + D_sigma k_rho|` over
/// a grid of sphere points, computed with the analytic unit-sphere
/// connection. Errors if the grid touches a pole.
pub fn killing_check(field: &KillingField, grid: &[(f64, f64)]) -> Result<f64> {
    let mut max_residual = 0.0_f64;
    for &(theta, phi) in grid {
        let (st, ct) = theta.sin_cos();
        if st.abs() < 1e-9 {
            return Err(Error::GridTouchesPole);
        }
        let k = field.lowered(theta, phi);
        let dk = field.grad_lowered(theta, phi);
        // Unit-sphere Christoffels.
        let gamma_t_pp = -st * ct;
        let gamma_p_tp = ct / st;
        for rho in 0..2 {
            for sigma in 0..2 {
                // Gamma^lambda_{rho sigma} k_lambda
                let gk = match (rho, sigma) {
                    (1, 1) => gamma_t_pp * k[0],
                    (0, 1) | (1, 0) => gamma_p_tp * k[1],
                    _ => 0.0,
                };
                let res = dk[rho][sigma] + dk[sigma][rho] - 2.0 * gk;
                max_residual = max_residual.max(res.abs());
            }
        }
    }
    Ok(max_residual)
}

/// Uniform `n x n` grid on the sphere with polar caps of width `margin`
/// removed, as `(theta, phi)` pairs.
pub fn sphere_grid(n: usize, margin: f64) -> Vec<(f64, f64)> {
    let mut pts = Vec::with_capacity(n * n);
    for i in 0..n {
        let theta = margin
            + (std::f64::consts::PI - 2.0 * margin) * (i as f64 + 0.5) / n as f64;
        for j in 0..n {
            let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
            pts.push((theta, phi));
        }
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const PI: f64 = std::f64::consts::PI;

    fn interior_point(rng: &mut impl Rng) -> BlochPoint {
        BlochPoint::new(
            rng.gen_range(0.1..0.9),
            rng.gen_range(0.3..PI - 0.3),
            rng.gen_range(0.0..2.0 * PI),
        )
        .unwrap()
    }

    #[test]
    fn christoffel_values_from_the_tables() {
        let p = BlochPoint::new(1.0, PI / 4.0, 0.0).unwrap();
        let g = christoffel(MetricKind::FubiniStudy, &p).unwrap();
        assert!((g[0][1][1] + 0.5).abs() < 1e-15);
        assert!((g[1][0][1] - 1.0).abs() < 1e-15);

        let p = BlochPoint::new(0.5, 1.0, 0.0).unwrap();
        let g = christoffel(MetricKind::Sjoqvist, &p).unwrap();
        assert!((g[0][0][0] - 2.0 / 3.0).abs() < 1e-15);

        let p = BlochPoint::new(0.5, PI / 2.0, 0.0).unwrap();
        let g = christoffel(MetricKind::Bures, &p).unwrap();
        assert!((g[0][1][1] + 0.375).abs() < 1e-15);
        assert!((g[1][0][1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn equator_sphere_connection_vanishes() {
        let p = BlochPoint::new(1.0, PI / 2.0, 0.3).unwrap();
        let g = christoffel_numeric(MetricKind::BlochSphere, &p, 1e-4).unwrap();
        assert!(g[0][1][1].abs() < 1e-10);
        // Symmetry in the lower indices holds exactly by construction.
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(g[k][i][j], g[k][j][i]);
                }
            }
        }
    }

    #[test]
    fn numeric_christoffels_match_analytic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for kind in [
            MetricKind::FubiniStudy,
            MetricKind::BlochSphere,
            MetricKind::Sjoqvist,
            MetricKind::Bures,
        ] {
            for _ in 0..1000 {
                let p = interior_point(&mut rng);
                let a = christoffel(kind, &p).unwrap();
                let n = christoffel_numeric(kind, &p, 1e-4).unwrap();
                for k in 0..kind.dim() {
                    for i in 0..kind.dim() {
                        for j in 0..kind.dim() {
                            assert!(
                                (a[k][i][j] - n[k][i][j]).abs() < 1e-6,
                                "{kind:?} Gamma^{k}_{i}{j}: {} vs {}",
                                a[k][i][j],
                                n[k][i][j]
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn scalar_curvature_constants() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let p = interior_point(&mut rng);
            let fs = curvature_report(MetricKind::FubiniStudy, &p).unwrap();
            assert!((fs.scalar - 8.0).abs() < 1e-12);
            let sj = curvature_report(MetricKind::Sjoqvist, &p).unwrap();
            assert!((sj.scalar - 8.0).abs() < 1e-12);
            let bu = curvature_report(MetricKind::Bures, &p).unwrap();
            assert!((bu.scalar - 24.0).abs() < 1e-12);
            let sphere = curvature_report(MetricKind::BlochSphere, &p).unwrap();
            assert!((sphere.scalar - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn weinberg_toggle_negates_scalar() {
        let p = BlochPoint::new(0.5, 1.0, 0.0).unwrap();
        for (kind, expect) in [
            (MetricKind::FubiniStudy, -8.0),
            (MetricKind::Sjoqvist, -8.0),
            (MetricKind::Bures, -24.0),
        ] {
            let rep = curvature_report(kind, &p).unwrap();
            assert!((rep.scalar_in(SignConvention::Weinberg) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn sectional_values() {
        let p = BlochPoint::new(0.3, 1.1, 0.6).unwrap();
        let tp = TangentPlane::new(Axis::Theta, Axis::Phi).unwrap();
        let rt = TangentPlane::new(Axis::R, Axis::Theta).unwrap();
        let rp = TangentPlane::new(Axis::R, Axis::Phi).unwrap();

        assert!((sectional_curvature(MetricKind::FubiniStudy, &p, &tp).unwrap() - 4.0).abs() < 1e-12);
        assert!((sectional_curvature(MetricKind::Sjoqvist, &p, &tp).unwrap() - 4.0).abs() < 1e-12);
        assert!(sectional_curvature(MetricKind::Sjoqvist, &p, &rt).unwrap().abs() < 1e-12);
        assert!(sectional_curvature(MetricKind::Sjoqvist, &p, &rp).unwrap().abs() < 1e-12);
        for plane in [&tp, &rt, &rp] {
            assert!((sectional_curvature(MetricKind::Bures, &p, plane).unwrap() - 4.0).abs() < 1e-12);
        }
        // Symmetric in the plane arguments.
        let flipped = TangentPlane::new(Axis::Phi, Axis::Theta).unwrap();
        assert_eq!(
            sectional_curvature(MetricKind::Bures, &p, &tp).unwrap(),
            sectional_curvature(MetricKind::Bures, &p, &flipped).unwrap()
        );
        // r-planes do not exist on the 2-D metrics.
        assert!(matches!(
            sectional_curvature(MetricKind::FubiniStudy, &p, &rt),
            Err(Error::PlaneUnavailable(_))
        ));
    }

    #[test]
    fn sectionals_sum_to_scalar() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for kind in [MetricKind::FubiniStudy, MetricKind::Sjoqvist, MetricKind::Bures] {
            for _ in 0..50 {
                let p = interior_point(&mut rng);
                let rep = curvature_report(kind, &p).unwrap();
                let sum: f64 = rep.sectionals.iter().map(|(_, k)| k).sum();
                assert!((sum - rep.scalar).abs() < 1e-8, "{kind:?}: {sum}");
            }
        }
    }

    #[test]
    fn riemann_index_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for kind in [
            MetricKind::FubiniStudy,
            MetricKind::BlochSphere,
            MetricKind::Sjoqvist,
            MetricKind::Bures,
        ] {
            let p = interior_point(&mut rng);
            for rep in [
                curvature_report(kind, &p).unwrap(),
                curvature_report_numeric(kind, &p, 4e-4).unwrap(),
            ] {
                let d = kind.dim();
                for a in 0..d {
                    for b in 0..d {
                        for c in 0..d {
                            for e in 0..d {
                                let v = rep.riemann[a][b][c][e];
                                assert!((v + rep.riemann[b][a][c][e]).abs() < 1e-8);
                                assert!((v + rep.riemann[a][b][e][c]).abs() < 1e-8);
                                assert!((v - rep.riemann[c][e][a][b]).abs() < 1e-8);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn numeric_engine_matches_analytic_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for kind in [MetricKind::FubiniStudy, MetricKind::Sjoqvist, MetricKind::Bures] {
            for _ in 0..20 {
                let p = interior_point(&mut rng);
                let num = curvature_report_numeric(kind, &p, 4e-4).unwrap();
                let ana = curvature_report(kind, &p).unwrap();
                assert!(
                    (num.scalar - ana.scalar).abs() < 1e-5,
                    "{kind:?}: {} vs {}",
                    num.scalar,
                    ana.scalar
                );
                for ((_, kn), (_, ka)) in num.sectionals.iter().zip(&ana.sectionals) {
                    assert!((kn - ka).abs() < 1e-5);
                }
                // Every Ricci and lowered Riemann component, not just the
                // contractions: catches a wrong entry that cancels in the
                // scalar.
                let d = kind.dim();
                for a in 0..d {
                    for b in 0..d {
                        assert!(
                            (num.ricci[a][b] - ana.ricci[a][b]).abs() < 1e-5,
                            "{kind:?} Ricci[{a}][{b}]"
                        );
                        for c in 0..d {
                            for e in 0..d {
                                assert!(
                                    (num.riemann[a][b][c][e] - ana.riemann[a][b][c][e]).abs()
                                        < 1e-5,
                                    "{kind:?} R[{a}{b}{c}{e}]"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn maximal_symmetry_classification() {
        let pts: Vec<BlochPoint> = vec![
            BlochPoint::new(0.3, 1.0, 0.5).unwrap(),
            BlochPoint::new(0.7, 2.0, 3.0).unwrap(),
            BlochPoint::new(0.5, 0.7, 1.1).unwrap(),
        ];
        let fs = maximal_symmetry_check(MetricKind::FubiniStudy, &pts).unwrap();
        assert!(fs.is_maximally_symmetric());
        assert!((fs.k_reference - 4.0).abs() < 1e-12);

        let bu = maximal_symmetry_check(MetricKind::Bures, &pts).unwrap();
        assert!(bu.is_maximally_symmetric());
        assert!((bu.k_reference - 4.0).abs() < 1e-12);

        let sj = maximal_symmetry_check(MetricKind::Sjoqvist, &pts).unwrap();
        assert!(!sj.is_maximally_symmetric());
        let failed = sj.failed_relations();
        assert!(failed.contains(&"R_ab = (n-1)K g_ab"));
        // R_11 = 0 while (n-1) K g_11 is strictly positive.
        let rep = curvature_report(MetricKind::Sjoqvist, &pts[0]).unwrap();
        assert_eq!(rep.ricci[0][0], 0.0);
    }

    #[test]
    fn killing_residuals_vanish() {
        let grid = sphere_grid(50, 0.15);
        assert!(killing_check(&KillingField::K1, &grid).unwrap() <= 1e-8);
        assert!(killing_check(&KillingField::K2, &grid).unwrap() <= 1e-8);
        assert!(killing_check(&KillingField::K3, &grid).unwrap() <= 1e-8);
        assert!(
            killing_check(&KillingField::Combination(2.0, -3.0, 0.0), &grid).unwrap() <= 1e-8
        );
        assert!(killing_check(&KillingField::K1, &[(0.0, 0.1)]).is_err());
    }

    #[test]
    fn non_killing_field_fails_the_condition() {
        // d_theta alone is not an isometry generator of the sphere.
        // Emulate it as a combination evaluated by hand: residual must be
        // visibly nonzero somewhere on the grid.
        let grid = sphere_grid(20, 0.3);
        let mut max_res = 0.0_f64;
        for &(theta, phi) in &grid {
            let (st, ct) = theta.sin_cos();
            let _ = phi;
            // k = d_theta: k_theta = 1, k_phi = 0; residual of the
            // (phi, phi) component is -2 Gamma^theta_{phi phi} k_theta.
            let res = 2.0 * st * ct;
            max_res = max_res.max(res.abs());
        }
        assert!(max_res > 0.5);
    }
}
