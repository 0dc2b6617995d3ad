//! The four metric tensors on single-qubit state space, their line elements
//! and Fisher densities, the Morozova-Cencov-Petz canonical form, and the
//! classical/quantum split of the interferometric (Sjoqvist) metric.
//!
//! Coordinates are Bloch coordinates. The two pure-state metrics are 2-D in
//! `(theta, phi)`; the two mixed-state metrics are 3-D in `(r, theta, phi)`:
//!
//! - Fubini-Study:      `ds^2 = (1/4)[dtheta^2 + sin^2(theta) dphi^2]`
//! - Bloch sphere:      `ds^2 = dtheta^2 + sin^2(theta) dphi^2` (= 4 ds_FS^2)
//! - Sjoqvist:          `ds^2 = (1/4)[dr^2/(1-r^2) + dtheta^2 + sin^2(theta) dphi^2]`
//! - Bures:             `ds^2 = (1/4)[dr^2/(1-r^2) + r^2 dtheta^2 + r^2 sin^2(theta) dphi^2]`

use crate::error::{Error, Result};
use crate::states::{spectral, BlochPoint, Mat2, PureState};

/// Which Riemannian structure is loaded on the state manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    FubiniStudy,
    Sjoqvist,
    Bures,
    BlochSphere,
}

impl MetricKind {
    /// Manifold dimension: 2 for the pure-state metrics, 3 for the mixed ones.
    pub fn dim(&self) -> usize {
        match self {
            MetricKind::FubiniStudy | MetricKind::BlochSphere => 2,
            MetricKind::Sjoqvist | MetricKind::Bures => 3,
        }
    }

    /// Coordinate names, in index order.
    pub fn coords(&self) -> &'static [&'static str] {
        match self.dim() {
            2 => &["theta", "phi"],
            _ => &["r", "theta", "phi"],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::FubiniStudy => "fs",
            MetricKind::Sjoqvist => "sjoqvist",
            MetricKind::Bures => "bures",
            MetricKind::BlochSphere => "bsm",
        }
    }
}

/// The metric tensor at a point, together with its determinant and the
/// Fisher density `sqrt(det g)`.
#[derive(Debug, Clone)]
pub struct MetricEvaluation {
    /// Diagonal d x d components (all four metrics are diagonal in Bloch
    /// coordinates); stored padded to 3.
    components: [f64; 3],
    dim: usize,
    /// Set when the chart degenerates (sin theta = 0, or r = 0 for Bures):
    /// the determinant vanishes but the geometry is regular.
    pub coordinate_singular: bool,
}

impl MetricEvaluation {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Diagonal entry `g_{kk}`.
    pub fn diag(&self, k: usize) -> f64 {
        assert!(k < self.dim);
        self.components[k]
    }

    /// Full symmetric matrix (diagonal here), row-major `dim x dim`.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.dim]; self.dim];
        for k in 0..self.dim {
            m[k][k] = self.components[k];
        }
        m
    }

    pub fn determinant(&self) -> f64 {
        self.components[..self.dim].iter().product()
    }

    pub fn fisher_density(&self) -> f64 {
        self.determinant().max(0.0).sqrt()
    }

    /// Inverse diagonal entry `g^{kk}`.
    pub fn inv_diag(&self, k: usize) -> f64 {
        1.0 / self.diag(k)
    }
}

/// Checks the radial domain of the mixed-state metrics. `r = 1` divides by
/// zero in the radial component and is rejected; `r = 0` is only a chart
/// degeneracy (Bures) or a conical point (Sjoqvist) and evaluates fine.
fn check_radial_domain(kind: MetricKind, r: f64) -> Result<()> {
    match kind {
        MetricKind::Sjoqvist | MetricKind::Bures => {
            if r >= 1.0 {
                Err(Error::MetricBoundary(format!(
                    "{} metric radial component diverges at r = 1 (r = {r})",
                    kind.name()
                )))
            } else {
                Ok(())
            }
        }
        _ => Ok(()),
    }
}

/// Evaluates the metric tensor at a Bloch point.
///
/// The FS and Bloch-sphere metrics ignore the radial coordinate (pure-state
/// chart). `sin theta = 0` is flagged as coordinate-singular, not an error.
pub fn metric_tensor(kind: MetricKind, point: &BlochPoint) -> Result<MetricEvaluation> {
    let r = point.r();
    let st2 = point.theta().sin().powi(2);
    check_radial_domain(kind, r)?;
    let (components, singular) = match kind {
        MetricKind::FubiniStudy => ([0.25, 0.25 * st2, 0.0], st2 == 0.0),
        MetricKind::BlochSphere => ([1.0, st2, 0.0], st2 == 0.0),
        MetricKind::Sjoqvist => (
            [0.25 / (1.0 - r * r), 0.25, 0.25 * st2],
            st2 == 0.0,
        ),
        MetricKind::Bures => (
            [
                0.25 / (1.0 - r * r),
                0.25 * r * r,
                0.25 * r * r * st2,
            ],
            st2 == 0.0 || r == 0.0,
        ),
    };
    Ok(MetricEvaluation {
        components,
        dim: kind.dim(),
        coordinate_singular: singular,
    })
}

/// Quadratic form `g_{mu nu} d^mu d^nu` for a coordinate increment.
pub fn line_element(kind: MetricKind, point: &BlochPoint, displacement: &[f64]) -> Result<f64> {
    let g = metric_tensor(kind, point)?;
    if displacement.len() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            got: displacement.len(),
        });
    }
    Ok(displacement
        .iter()
        .enumerate()
        .map(|(k, d)| g.diag(k) * d * d)
        .sum())
}

/// Exact overlap deficit `1 - |<psi_bar|psi>|^2` between two pure states.
///
/// For infinitesimally separated states this is the Fubini-Study line
/// element, which makes it a second-order oracle for `metric_tensor`.
pub fn fs_overlap_check(psi: &PureState, psi_bar: &PureState) -> f64 {
    (1.0 - psi_bar.inner(psi).norm_sqr()).max(0.0)
}

/// Discrete Fisher-Rao metric `sum_k (1/p_k) (d_mu p_k)(d_nu p_k)`.
///
/// `jacobian[k]` holds the gradient of `p_k` with respect to the parameters.
pub fn fisher_rao_discrete(probabilities: &[f64], jacobian: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if probabilities.is_empty() || jacobian.len() != probabilities.len() {
        return Err(Error::DimensionMismatch {
            expected: probabilities.len(),
            got: jacobian.len(),
        });
    }
    let dim = jacobian[0].len();
    let sum: f64 = probabilities.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidCoordinate(format!(
            "probabilities sum to {sum}, not 1"
        )));
    }
    for p in probabilities {
        if *p <= 0.0 {
            return Err(Error::ZeroProbability);
        }
    }
    let mut g = vec![vec![0.0; dim]; dim];
    for (k, p) in probabilities.iter().enumerate() {
        if jacobian[k].len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: jacobian[k].len(),
            });
        }
        for mu in 0..dim {
            for nu in 0..dim {
                g[mu][nu] += jacobian[k][mu] * jacobian[k][nu] / p;
            }
        }
    }
    Ok(g)
}

/// Splits the Sjoqvist line element into its classical (Fisher-Rao of the
/// eigenvalue distribution) and quantum (eigenvector Fubini-Study) parts:
/// `ds^2 = dr^2 / (4(1-r^2)) + (dtheta^2 + sin^2 theta dphi^2)/4`.
pub fn sjoqvist_decomposition(point: &BlochPoint, displacement: &[f64]) -> Result<(f64, f64)> {
    let r = point.r();
    if r <= 0.0 || r >= 1.0 {
        return Err(Error::MetricBoundary(format!(
            "sjoqvist split requires 0 < r < 1 (r = {r})"
        )));
    }
    if displacement.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: displacement.len(),
        });
    }
    let (dr, dth, dph) = (displacement[0], displacement[1], displacement[2]);
    let classical = dr * dr / (4.0 * (1.0 - r * r));
    let quantum = 0.25 * (dth * dth + point.theta().sin().powi(2) * dph * dph);
    Ok((classical, quantum))
}

/// Bures quadratic form from the spectral sum
/// `(1/2) sum_{n,m} |<e_m|drho|e_n>|^2 / (p_m + p_n)`,
/// with `drho` built by central finite differences of the density matrix at
/// step `h` and Richardson extrapolation (evaluations at `h` and `h/2`).
///
/// Serves as an independent oracle for the analytic Bures line element.
pub fn bures_from_spectral(point: &BlochPoint, displacement: &[f64], h: f64) -> Result<f64> {
    if displacement.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: displacement.len(),
        });
    }
    let rho = crate::states::bloch_to_density(point);
    let spec = spectral(&rho)?;
    let q_h = spectral_sum_at(point, displacement, h, &spec)?;
    let q_h2 = spectral_sum_at(point, displacement, 0.5 * h, &spec)?;
    // Central differences carry an O(h^2) error; Richardson cancels it.
    Ok((4.0 * q_h2 - q_h) / 3.0)
}

fn spectral_sum_at(
    point: &BlochPoint,
    d: &[f64],
    h: f64,
    spec: &crate::states::SpectralDecomposition,
) -> Result<f64> {
    let (r, th, ph) = (point.r(), point.theta(), point.phi());
    let plus = crate::states::rho_from_coords(r + h * d[0], th + h * d[1], ph + h * d[2]);
    let minus = crate::states::rho_from_coords(r - h * d[0], th - h * d[1], ph - h * d[2]);
    let drho = plus.sub(&minus).scale(0.5);
    let basis = [spec.e0, spec.e1];
    let probs = [spec.p0, spec.p1];
    let mut sum = 0.0;
    for m in 0..2 {
        for n in 0..2 {
            let em = basis[m].amplitudes();
            let en = basis[n].amplitudes();
            // <e_m| drho |e_n>
            let mut el = num_complex::Complex64::new(0.0, 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    el += em[i].conj() * drho.e[i][j] * en[j];
                }
            }
            sum += 0.5 * el.norm_sqr() / (probs[m] + probs[n]);
        }
    }
    Ok(sum / (h * h))
}

// ---------------------------------------------------------------------------
// Morozova-Cencov-Petz canonical form
// ---------------------------------------------------------------------------

/// Morozova-Cencov function selecting a monotone metric in the canonical
/// form. Self-inversive (`f(1/t) = f(t)/t`); `f_Bures(1) = 1` while
/// `f_Sjoqvist(1) = 0`, which is the conical singularity at `r = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McpFunction {
    BuresF,
    SjoqvistF,
}

impl McpFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            McpFunction::BuresF => 0.5 * (1.0 + t),
            McpFunction::SjoqvistF => 0.5 * (1.0 - t) * (1.0 - t) / (1.0 + t),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            McpFunction::BuresF => "f_Bures",
            McpFunction::SjoqvistF => "f_Sjoqvist",
        }
    }
}

/// Monotone-metric line element in canonical form:
/// `(1/4) [ dr^2/(1-r^2) + (1/f(t)) (r^2/(1+r)) dOmega^2 ]` with
/// `t = (1-r)/(1+r)`.
///
/// With `BuresF` this reproduces the Bures line element; with `SjoqvistF`
/// the Sjoqvist one. Requires `0 < r < 1`; at `r = 0` the Sjoqvist function
/// vanishes (`f(1) = 0`) and the angular part is singular.
pub fn mcp_metric(f: McpFunction, point: &BlochPoint, displacement: &[f64]) -> Result<f64> {
    if displacement.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: displacement.len(),
        });
    }
    let r = point.r();
    if r >= 1.0 {
        return Err(Error::MetricBoundary("mcp form requires r < 1".into()));
    }
    if r <= 0.0 {
        return Err(match f {
            McpFunction::SjoqvistF => Error::MetricBoundary(
                "f_Sjoqvist(1) = 0: conical singularity at r = 0".into(),
            ),
            McpFunction::BuresF => {
                Error::MetricBoundary("mcp form requires 0 < r (canonical form)".into())
            }
        });
    }
    let t = (1.0 - r) / (1.0 + r);
    let ft = f.eval(t);
    if ft == 0.0 {
        return Err(Error::MetricBoundary("Morozova-Cencov function vanishes".into()));
    }
    let (dr, dth, dph) = (displacement[0], displacement[1], displacement[2]);
    let d_omega2 = dth * dth + point.theta().sin().powi(2) * dph * dph;
    Ok(0.25 * (dr * dr / (1.0 - r * r) + (1.0 / ft) * (r * r / (1.0 + r)) * d_omega2))
}

/// Density matrix differential used by the spectral-sum oracle; exposed for
/// tests that want the analytic `drho` of the Bloch parametrization.
pub fn drho_analytic(point: &BlochPoint, d: &[f64]) -> Mat2 {
    let (r, th, ph) = (point.r(), point.theta(), point.phi());
    let (st, ct) = th.sin_cos();
    let e_m = num_complex::Complex64::from_polar(1.0, -ph);
    let (dr, dth, dph) = (d[0], d[1], d[2]);
    let diag = ct * dr - r * st * dth;
    let off = e_m
        * num_complex::Complex64::new(
            st * dr + r * ct * dth,
            -r * st * dph,
        );
    Mat2::new(
        num_complex::Complex64::new(0.5 * diag, 0.0),
        0.5 * off,
        0.5 * off.conj(),
        num_complex::Complex64::new(-0.5 * diag, 0.0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::bloch_to_density;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const PI: f64 = std::f64::consts::PI;

    fn interior_point(rng: &mut impl Rng) -> BlochPoint {
        BlochPoint::new(
            rng.gen_range(0.05..0.95),
            rng.gen_range(0.1..PI - 0.1),
            rng.gen_range(0.0..2.0 * PI),
        )
        .unwrap()
    }

    #[test]
    fn metric_components_match_formulas() {
        let p = BlochPoint::new(1.0, PI / 2.0, 0.0).unwrap();
        let g = metric_tensor(MetricKind::FubiniStudy, &p).unwrap();
        assert!((g.diag(0) - 0.25).abs() < 1e-15);
        assert!((g.diag(1) - 0.25).abs() < 1e-15);
        assert!((g.determinant() - 1.0 / 16.0).abs() < 1e-15);

        let p = BlochPoint::new(0.0, PI / 2.0, 0.0).unwrap();
        let g = metric_tensor(MetricKind::Sjoqvist, &p).unwrap();
        for k in 0..3 {
            assert!((g.diag(k) - 0.25).abs() < 1e-15);
        }

        let p = BlochPoint::new(0.6, PI / 2.0, 0.0).unwrap();
        let g = metric_tensor(MetricKind::Bures, &p).unwrap();
        assert!((g.diag(0) - 1.0 / (4.0 * 0.64)).abs() < 1e-15);
        assert!((g.diag(1) - 0.09).abs() < 1e-15);
        assert!((g.diag(2) - 0.09).abs() < 1e-15);
    }

    #[test]
    fn bsm_is_four_times_fs() {
        let p = BlochPoint::new(1.0, 1.234, 0.8).unwrap();
        let fs = metric_tensor(MetricKind::FubiniStudy, &p).unwrap();
        let bsm = metric_tensor(MetricKind::BlochSphere, &p).unwrap();
        for k in 0..2 {
            assert!((bsm.diag(k) - 4.0 * fs.diag(k)).abs() < 1e-15);
        }
    }

    #[test]
    fn radial_boundary_is_an_error() {
        let p = BlochPoint::new(1.0, 1.0, 0.0).unwrap();
        assert!(metric_tensor(MetricKind::Sjoqvist, &p).is_err());
        assert!(metric_tensor(MetricKind::Bures, &p).is_err());
        assert!(metric_tensor(MetricKind::FubiniStudy, &p).is_ok());
    }

    #[test]
    fn pole_is_flagged_not_rejected() {
        let p = BlochPoint::new(0.5, 0.0, 0.0).unwrap();
        let g = metric_tensor(MetricKind::Sjoqvist, &p).unwrap();
        assert!(g.coordinate_singular);
        assert_eq!(g.determinant(), 0.0);
    }

    #[test]
    fn metric_is_diagonal_positive_definite_with_consistent_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10_000 {
            let p = interior_point(&mut rng);
            for kind in [
                MetricKind::FubiniStudy,
                MetricKind::BlochSphere,
                MetricKind::Sjoqvist,
                MetricKind::Bures,
            ] {
                let g = metric_tensor(kind, &p).unwrap();
                let mut det = 1.0;
                for k in 0..g.dim() {
                    assert!(g.diag(k) > 0.0);
                    det *= g.diag(k);
                }
                assert!((g.fisher_density().powi(2) - det).abs() <= 1e-12 * det.max(1.0));
            }
        }
    }

    #[test]
    fn line_element_cases() {
        let p = BlochPoint::new(0.5, PI / 2.0, 0.0).unwrap();
        assert_eq!(
            line_element(MetricKind::Sjoqvist, &p, &[0.0, 0.0, 0.0]).unwrap(),
            0.0
        );

        // FS at the equator with (dtheta, dphi) = (0.01, 0.02).
        let p2 = BlochPoint::new(1.0, PI / 2.0, 0.0).unwrap();
        let v = line_element(MetricKind::FubiniStudy, &p2, &[0.01, 0.02]).unwrap();
        assert!((v - 1.25e-4).abs() < 1e-18);

        // Sjoqvist on the pure slice with dr = 0 equals FS.
        let p3 = BlochPoint::new(0.999999, 1.1, 0.3).unwrap();
        let sj = line_element(MetricKind::Sjoqvist, &p3, &[0.0, 0.01, 0.02]).unwrap();
        let fs = line_element(MetricKind::FubiniStudy, &p3, &[0.01, 0.02]).unwrap();
        assert!((sj - fs).abs() < 1e-12);

        assert!(matches!(
            line_element(MetricKind::FubiniStudy, &p2, &[1.0, 2.0, 3.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn overlap_check_agrees_with_metric_to_second_order() {
        assert!(
            fs_overlap_check(
                &PureState::from_angles(0.3, 0.4),
                &PureState::from_angles(0.3, 0.4)
            ) < 1e-15
        );
        assert!(
            (fs_overlap_check(
                &PureState::from_angles(0.0, 0.0),
                &PureState::from_angles(PI, 0.0)
            ) - 1.0)
                .abs()
                < 1e-15
        );

        // Symmetric stencil around the base point: the overlap deficit then
        // matches the quadratic form with an O(d^4) error.
        let theta = PI / 3.0;
        let (dth, dph) = (1e-3, 1e-3);
        let psi = PureState::from_angles(theta - dth / 2.0, 0.7 - dph / 2.0);
        let psi_bar = PureState::from_angles(theta + dth / 2.0, 0.7 + dph / 2.0);
        let exact = fs_overlap_check(&psi, &psi_bar);
        let p = BlochPoint::new(1.0, theta, 0.7).unwrap();
        let quad = line_element(MetricKind::FubiniStudy, &p, &[dth, dph]).unwrap();
        assert!((exact - quad).abs() / quad < 1e-5);
    }

    #[test]
    fn fisher_rao_discrete_cases() {
        // Bloch eigenvalue distribution against r.
        let r: f64 = 0.37;
        let g = fisher_rao_discrete(
            &[(1.0 + r) / 2.0, (1.0 - r) / 2.0],
            &[vec![0.5], vec![-0.5]],
        )
        .unwrap();
        assert!((g[0][0] - 1.0 / (1.0 - r * r)).abs() < 1e-12);
        // One quarter of it is the Sjoqvist/Bures radial component.
        let p = BlochPoint::new(r, 1.0, 0.0).unwrap();
        let sj = metric_tensor(MetricKind::Sjoqvist, &p).unwrap();
        assert!((0.25 * g[0][0] - sj.diag(0)).abs() < 1e-12);

        // Uniform distribution with zero jacobian.
        let g = fisher_rao_discrete(&[0.5, 0.5], &[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(g, vec![vec![0.0, 0.0], vec![0.0, 0.0]]);

        // Two-point distribution p(xi) = (xi, 1 - xi).
        let xi: f64 = 0.23;
        let g = fisher_rao_discrete(&[xi, 1.0 - xi], &[vec![1.0], vec![-1.0]]).unwrap();
        assert!((g[0][0] - 1.0 / (xi * (1.0 - xi))).abs() < 1e-12);

        assert_eq!(
            fisher_rao_discrete(&[1.0, 0.0], &[vec![1.0], vec![-1.0]]),
            Err(Error::ZeroProbability)
        );
    }

    #[test]
    fn decomposition_sums_to_line_element() {
        let p = BlochPoint::new(0.5, PI / 3.0, 0.0).unwrap();

        let (cl, qu) = sjoqvist_decomposition(&p, &[0.2, 0.0, 0.0]).unwrap();
        assert_eq!(qu, 0.0);
        assert!(cl > 0.0);

        let (cl, qu) = sjoqvist_decomposition(&p, &[0.0, 0.1, 0.3]).unwrap();
        assert_eq!(cl, 0.0);
        assert!(qu > 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let p = interior_point(&mut rng);
            let d = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let (cl, qu) = sjoqvist_decomposition(&p, &d).unwrap();
            assert!(cl >= 0.0 && qu >= 0.0);
            let ds2 = line_element(MetricKind::Sjoqvist, &p, &d).unwrap();
            assert!((cl + qu - ds2).abs() < 1e-12);
        }

        assert!(sjoqvist_decomposition(
            &BlochPoint::new(0.0, 1.0, 0.0).unwrap(),
            &[0.1, 0.0, 0.0]
        )
        .is_err());
    }

    #[test]
    fn quantum_part_matches_weighted_eigenvector_fs_metrics() {
        // sum_k p_k ds_k^2 from finite differences of the eigenvectors.
        let p = BlochPoint::new(0.5, PI / 3.0, 1.2).unwrap();
        let d = [0.0, 0.7, -0.4];
        let h = 1e-5;
        let spec0 = spectral(&bloch_to_density(&p)).unwrap();
        let shifted = |s: f64| {
            let q = BlochPoint::new(
                p.r() + s * d[0],
                p.theta() + s * d[1],
                p.phi() + s * d[2],
            )
            .unwrap();
            spectral(&bloch_to_density(&q)).unwrap()
        };
        let (sp, sm) = (shifted(h), shifted(-h));
        let mut quantum_fd = 0.0;
        for (p_k, e_p, e_m) in [(spec0.p0, sp.e0, sm.e0), (spec0.p1, sp.e1, sm.e1)] {
            // ds_k^2 = <de|de> - |<e|de>|^2 with de by central difference.
            let ap = e_p.amplitudes();
            let am = e_m.amplitudes();
            let de = [(ap[0] - am[0]) / 2.0, (ap[1] - am[1]) / 2.0];
            let e0 = shifted(0.0);
            let e = if p_k == spec0.p0 { e0.e0 } else { e0.e1 }.amplitudes();
            let de_de = de[0].norm_sqr() + de[1].norm_sqr();
            let e_de = e[0].conj() * de[0] + e[1].conj() * de[1];
            quantum_fd += p_k * (de_de - e_de.norm_sqr()) / (h * h);
        }
        let (_, quantum) = sjoqvist_decomposition(&p, &d).unwrap();
        assert!(
            (quantum_fd - quantum).abs() < 1e-5,
            "fd {quantum_fd} vs analytic {quantum}"
        );
    }

    #[test]
    fn spectral_sum_reproduces_bures() {
        let p = BlochPoint::new(0.5, PI / 3.0, 1.0).unwrap();
        let d = [0.3, -0.2, 0.5];
        let oracle = bures_from_spectral(&p, &d, 1e-4).unwrap();
        let exact = line_element(MetricKind::Bures, &p, &d).unwrap();
        assert!((oracle - exact).abs() / exact < 1e-6);

        // Radial-only displacement at r = 0.5: dr^2 / (4 (1 - 0.25)).
        let dr = [1.0, 0.0, 0.0];
        let oracle = bures_from_spectral(&p, &dr, 1e-4).unwrap();
        assert!((oracle - 1.0 / 3.0).abs() < 1e-8);

        assert_eq!(bures_from_spectral(&p, &[0.0, 0.0, 0.0], 1e-4).unwrap(), 0.0);
        assert!(bures_from_spectral(
            &BlochPoint::new(0.0, 1.0, 0.0).unwrap(),
            &d,
            1e-4
        )
        .is_err());
    }

    #[test]
    fn spectral_sum_converges_at_second_order() {
        let p = BlochPoint::new(0.4, 1.1, 0.7).unwrap();
        let d = [0.5, 0.3, -0.8];
        let exact = line_element(MetricKind::Bures, &p, &d).unwrap();
        let spec = spectral(&bloch_to_density(&p)).unwrap();
        let e1 = (spectral_sum_at(&p, &d, 2e-3, &spec).unwrap() - exact).abs();
        let e2 = (spectral_sum_at(&p, &d, 1e-3, &spec).unwrap() - exact).abs();
        assert!(e1 / e2 > 3.0, "convergence order below 2: {}", e1 / e2);
    }

    #[test]
    fn mcp_reconstructs_both_metrics() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..1000 {
            let p = interior_point(&mut rng);
            let d = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let bures = mcp_metric(McpFunction::BuresF, &p, &d).unwrap();
            assert!((bures - line_element(MetricKind::Bures, &p, &d).unwrap()).abs() < 1e-12);
            let sj = mcp_metric(McpFunction::SjoqvistF, &p, &d).unwrap();
            assert!((sj - line_element(MetricKind::Sjoqvist, &p, &d).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn mcp_function_properties() {
        assert_eq!(McpFunction::BuresF.eval(1.0), 1.0);
        assert_eq!(McpFunction::SjoqvistF.eval(1.0), 0.0);
        // Self-inversive over four decades of t.
        for i in 0..=400 {
            let t = 0.01 * 10f64.powf(i as f64 / 100.0);
            for f in [McpFunction::BuresF, McpFunction::SjoqvistF] {
                let lhs = f.eval(1.0 / t);
                let rhs = f.eval(t) / t;
                assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn mcp_rejects_conical_point() {
        let origin = BlochPoint::new(0.0, 1.0, 0.0).unwrap();
        assert!(mcp_metric(McpFunction::SjoqvistF, &origin, &[0.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn analytic_drho_matches_finite_difference() {
        let p = BlochPoint::new(0.55, 1.2, 2.2).unwrap();
        let d = [0.4, -0.3, 0.9];
        let h = 1e-6;
        let plus =
            crate::states::rho_from_coords(p.r() + h * d[0], p.theta() + h * d[1], p.phi() + h * d[2]);
        let minus =
            crate::states::rho_from_coords(p.r() - h * d[0], p.theta() - h * d[1], p.phi() - h * d[2]);
        let fd = plus.sub(&minus).scale(0.5 / h);
        let an = drho_analytic(&p, &d);
        for i in 0..2 {
            for j in 0..2 {
                assert!((fd.e[i][j] - an.e[i][j]).norm() < 1e-9);
            }
        }
    }
}
