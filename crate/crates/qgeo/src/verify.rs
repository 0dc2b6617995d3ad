//! Oracle cross-check suite: every analytic result in the crate measured
//! against an independent numerical route, with seeded randomized inputs.
//!
//! Each check reports its worst residual and the tolerance it must meet.
//! The checks are grouped by the criterion number they certify, so the
//! acceptance suite and the command-line `verify` subcommand share one
//! implementation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complexity::{
    accessible_volume, accessible_volume_quadrature, asymptotic_ratio, compare_bures_sjoqvist_slice,
    compare_sjoqvist_fs, AsymptoticParams,
};
use crate::curvature::{
    curvature_report, curvature_report_numeric, killing_check, sectional_curvature, sphere_grid,
    Axis, KillingField, TangentPlane,
};
use crate::error::Result;
use crate::geodesics::{
    bures_geodesic_eta, bures_r_of_theta, conserved_drift, fs_geodesic, integrate_geodesic,
    sjoqvist_geodesic, sjoqvist_r_of_theta_boundary, Curve, GeodesicSpec, StepControl,
};
use crate::metrics::{bures_from_spectral, line_element, mcp_metric, McpFunction, MetricKind};
use crate::states::BlochPoint;

const PI: f64 = std::f64::consts::PI;

/// One verification line: a named residual against its tolerance.
#[derive(Debug, Clone)]
pub struct CheckReport {
    /// Criterion this check certifies (1..=10).
    pub criterion: u8,
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.residual.is_finite() && self.residual <= self.tolerance
    }

    pub fn passed_with(&self, tolerance_override: Option<f64>) -> bool {
        let tol = tolerance_override.unwrap_or(self.tolerance);
        self.residual.is_finite() && self.residual <= tol
    }
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(salt))
}

fn interior_point(rng: &mut impl Rng) -> BlochPoint {
    BlochPoint::new(
        rng.gen_range(0.08..0.92),
        rng.gen_range(0.25..PI - 0.25),
        rng.gen_range(0.0..2.0 * PI),
    )
    .unwrap()
}

// ---------------------------------------------------------------------------
// Criterion 1: curvature constants
// ---------------------------------------------------------------------------

pub fn check_curvature_constants(seed: u64) -> Result<Vec<CheckReport>> {
    let mut rng = rng_for(seed, 1);
    let mut analytic = 0.0_f64;
    let mut table = 0.0_f64;
    let mut numeric = 0.0_f64;
    let expect = [
        (MetricKind::FubiniStudy, 8.0),
        (MetricKind::Sjoqvist, 8.0),
        (MetricKind::Bures, 24.0),
    ];
    let tp = TangentPlane::new(Axis::Theta, Axis::Phi)?;
    let rt = TangentPlane::new(Axis::R, Axis::Theta)?;
    let rp = TangentPlane::new(Axis::R, Axis::Phi)?;
    for _ in 0..100 {
        let p = interior_point(&mut rng);
        for (kind, scalar) in expect {
            let rep = curvature_report(kind, &p)?;
            analytic = analytic.max((rep.scalar - scalar).abs());
            let num = curvature_report_numeric(kind, &p, 4e-4)?;
            numeric = numeric.max((num.scalar - scalar).abs());
        }
        table = table.max((sectional_curvature(MetricKind::FubiniStudy, &p, &tp)? - 4.0).abs());
        table = table.max((sectional_curvature(MetricKind::Sjoqvist, &p, &tp)? - 4.0).abs());
        table = table.max(sectional_curvature(MetricKind::Sjoqvist, &p, &rt)?.abs());
        table = table.max(sectional_curvature(MetricKind::Sjoqvist, &p, &rp)?.abs());
        for plane in [&tp, &rt, &rp] {
            table = table.max((sectional_curvature(MetricKind::Bures, &p, plane)? - 4.0).abs());
        }
    }
    Ok(vec![
        CheckReport {
            criterion: 1,
            name: "scalar curvature constants (analytic)".into(),
            residual: analytic,
            tolerance: 1e-12,
        },
        CheckReport {
            criterion: 1,
            name: "sectional curvature table".into(),
            residual: table,
            tolerance: 1e-12,
        },
        CheckReport {
            criterion: 1,
            name: "scalar curvature constants (finite differences)".into(),
            residual: numeric,
            tolerance: 1e-5,
        },
    ])
}

// ---------------------------------------------------------------------------
// Criterion 2: accessible volumes
// ---------------------------------------------------------------------------

pub fn check_accessible_volumes() -> Vec<CheckReport> {
    let mut residual = 0.0_f64;
    for kind in [MetricKind::FubiniStudy, MetricKind::Sjoqvist, MetricKind::Bures] {
        let quad = accessible_volume_quadrature(kind, 1e-12);
        residual = residual.max((quad - accessible_volume(kind)).abs());
    }
    vec![CheckReport {
        criterion: 2,
        name: "accessible volumes (quadrature vs closed form)".into(),
        residual,
        tolerance: 1e-8,
    }]
}

// ---------------------------------------------------------------------------
// Criterion 3: closed-form geodesics vs RK4
// ---------------------------------------------------------------------------

fn sup_norm_vs_rk4(closed: &dyn Curve, spec: &GeodesicSpec, span: f64) -> Result<f64> {
    // Half the default step: near-polar swings of the angular system push
    // the integrator truncation toward the 1e-6 gate otherwise.
    let control = StepControl {
        step: 5e-4,
        ..StepControl::default()
    };
    let numeric = integrate_geodesic(spec, span, &control)?;
    let mut sup = 0.0_f64;
    let dim = spec.kind.dim();
    for (eta, s) in numeric.samples() {
        if eta > closed.window().1 {
            break;
        }
        let c = closed.state_at(eta)?;
        for k in 0..dim {
            sup = sup.max((c.position[k] - s.position[k]).abs());
        }
    }
    Ok(sup)
}

fn random_fs_spec(rng: &mut impl Rng) -> GeodesicSpec {
    // Rejection-sample curves that keep their polar closest approach
    // bounded (normalized angular constant >= 0.15, or an exact meridian):
    // arbitrarily close near-polar swings drive the azimuthal rate to
    // infinity and no fixed-step oracle is meaningful there.
    loop {
        let theta = rng.gen_range(0.4..PI - 0.4);
        let phi = rng.gen_range(0.0..2.0 * PI);
        let td: f64 = rng.gen_range(-0.8..0.8);
        let pd: f64 = rng.gen_range(-0.8..0.8);
        let st = theta.sin();
        let v = (td * td + st * st * pd * pd).sqrt();
        if v < 0.1 {
            continue;
        }
        let c_hat = (pd * st * st).abs() / v;
        if c_hat != 0.0 && c_hat < 0.15 {
            continue;
        }
        return GeodesicSpec::new(
            MetricKind::FubiniStudy,
            BlochPoint::new(1.0, theta, phi).unwrap(),
            vec![td, pd],
        )
        .unwrap();
    }
}

pub fn check_geodesic_oracle(seed: u64) -> Result<Vec<CheckReport>> {
    let mut rng = rng_for(seed, 3);
    let mut fs_sup = 0.0_f64;
    for _ in 0..100 {
        let spec = random_fs_spec(&mut rng);
        let closed = fs_geodesic(&spec)?;
        let span = (0.9 * closed.window().1).min(1.5);
        fs_sup = fs_sup.max(sup_norm_vs_rk4(&closed, &spec, span)?);
    }

    let mut sj_sup = 0.0_f64;
    for _ in 0..100 {
        let ang = random_fs_spec(&mut rng);
        let r = rng.gen_range(0.15..0.85);
        let rd = rng.gen_range(-0.7..0.7);
        let spec = GeodesicSpec::new(
            MetricKind::Sjoqvist,
            BlochPoint::new(r, ang.point.theta(), ang.point.phi()).unwrap(),
            vec![rd, ang.velocity[0], ang.velocity[1]],
        )
        .unwrap();
        let closed = sjoqvist_geodesic(&spec)?;
        let span = (0.9 * closed.window().1).min(1.5);
        sj_sup = sj_sup.max(sup_norm_vs_rk4(&closed, &spec, span)?);
    }

    // Theta-affine Sjoqvist profile r(theta) against RK4 of the eta system.
    // The radial equation is autonomous in theta, so the integration may
    // start slightly off the theta_i = 0 chart edge and shift back.
    let mut sj_profile_sup = 0.0_f64;
    for _ in 0..100 {
        let r_i = rng.gen_range(0.15..0.8);
        let r_f = rng.gen_range(0.15..0.8);
        let theta_f = rng.gen_range(0.4..1.4);
        let profile = sjoqvist_r_of_theta_boundary(r_i, r_f, theta_f)?;
        let theta_start = 1e-3;
        let theta_dot = 1.0;
        let spec = GeodesicSpec::new(
            MetricKind::Sjoqvist,
            BlochPoint::new(r_i, theta_start, 0.0).unwrap(),
            vec![profile.r_prime(0.0) * theta_dot, theta_dot, 0.0],
        )
        .unwrap();
        let numeric = integrate_geodesic(&spec, theta_f, &StepControl::default())?;
        for (_, s) in numeric.samples() {
            let theta = s.position[1] - theta_start;
            sj_profile_sup = sj_profile_sup.max((profile.r(theta) - s.position[0]).abs());
        }
    }

    let mut bu_sup = 0.0_f64;
    let mut bu_profile_sup = 0.0_f64;
    for _ in 0..100 {
        let r_i = rng.gen_range(0.25..0.75);
        let theta_i = rng.gen_range(0.5..PI - 0.9);
        let theta_dot = rng.gen_range(0.3..1.0);
        let r_prime = rng.gen_range(-0.9..0.9);
        let closed = bures_geodesic_eta(r_i, theta_i, theta_dot, r_prime)?;
        let spec = GeodesicSpec::new(
            MetricKind::Bures,
            BlochPoint::new(r_i, theta_i, 0.0).unwrap(),
            vec![r_prime * theta_dot, theta_dot, 0.0],
        )
        .unwrap();
        let span = (0.9 * closed.window().1).min(1.5);
        bu_sup = bu_sup.max(sup_norm_vs_rk4(&closed, &spec, span)?);

        // Profile r(theta) against the same RK4 run.
        let profile = bures_r_of_theta(r_i, r_prime, theta_i)?;
        let numeric = integrate_geodesic(&spec, span, &StepControl::default())?;
        for (_, s) in numeric.samples() {
            bu_profile_sup =
                bu_profile_sup.max((profile.r(s.position[1]) - s.position[0]).abs());
        }
    }

    let report = |name: &str, residual: f64| CheckReport {
        criterion: 3,
        name: name.into(),
        residual,
        tolerance: 1e-6,
    };
    Ok(vec![
        report("fs closed form vs rk4", fs_sup),
        report("sjoqvist closed form vs rk4", sj_sup),
        report("sjoqvist r(theta) profile vs rk4", sj_profile_sup),
        report("bures closed form vs rk4", bu_sup),
        report("bures r(theta) profile vs rk4", bu_profile_sup),
    ])
}

// ---------------------------------------------------------------------------
// Criterion 4: conserved-quantity drift along closed forms
// ---------------------------------------------------------------------------

pub fn check_conserved_quantities(seed: u64) -> Result<Vec<CheckReport>> {
    let mut rng = rng_for(seed, 4);
    let mut speed = 0.0_f64;
    let mut angular = 0.0_f64;
    let mut radial = 0.0_f64;
    for _ in 0..50 {
        let spec = random_fs_spec(&mut rng);
        let c = fs_geodesic(&spec)?;
        let span = (0.9 * c.window().1).min(1.5);
        let d = conserved_drift(&c, span, 200)?;
        speed = speed.max(d.speed);
        angular = angular.max(d.angular);

        let ang = random_fs_spec(&mut rng);
        let r = rng.gen_range(0.15..0.8);
        let rd = rng.gen_range(-0.6..0.6);
        let spec = GeodesicSpec::new(
            MetricKind::Sjoqvist,
            BlochPoint::new(r, ang.point.theta(), ang.point.phi()).unwrap(),
            vec![rd, ang.velocity[0], ang.velocity[1]],
        )
        .unwrap();
        let c = sjoqvist_geodesic(&spec)?;
        let span = (0.85 * c.window().1).min(1.5);
        let d = conserved_drift(&c, span, 200)?;
        speed = speed.max(d.speed);
        angular = angular.max(d.angular);
        radial = radial.max(d.radial);

        let c = bures_geodesic_eta(
            rng.gen_range(0.25..0.75),
            rng.gen_range(0.5..PI - 0.9),
            rng.gen_range(0.3..1.0),
            rng.gen_range(-0.9..0.9),
        )?;
        let span = (0.85 * c.window().1).min(1.5);
        let d = conserved_drift(&c, span, 200)?;
        speed = speed.max(d.speed);
        angular = angular.max(d.angular);
    }
    let report = |name: &str, residual: f64| CheckReport {
        criterion: 4,
        name: name.into(),
        residual,
        tolerance: 1e-9,
    };
    Ok(vec![
        report("speed drift along closed forms", speed),
        report("angular constant drift (c_fs, r^2 theta_dot)", angular),
        report("sjoqvist radial constant drift", radial),
    ])
}

// ---------------------------------------------------------------------------
// Criterion 5: Bures spectral-sum derivation
// ---------------------------------------------------------------------------

pub fn check_bures_spectral_sum(seed: u64) -> Result<Vec<CheckReport>> {
    let mut rng = rng_for(seed, 5);
    let mut rel = 0.0_f64;
    for _ in 0..1000 {
        let p = BlochPoint::new(
            rng.gen_range(0.1..0.9),
            rng.gen_range(0.3..PI - 0.3),
            rng.gen_range(0.0..2.0 * PI),
        )
        .unwrap();
        let d = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let exact = line_element(MetricKind::Bures, &p, &d)?;
        if exact < 1e-6 {
            continue;
        }
        let oracle = bures_from_spectral(&p, &d, 1e-4)?;
        rel = rel.max((oracle - exact).abs() / exact);
    }
    Ok(vec![CheckReport {
        criterion: 5,
        name: "bures spectral sum vs analytic line element (relative)".into(),
        residual: rel,
        tolerance: 1e-6,
    }])
}

// ---------------------------------------------------------------------------
// Criterion 6: length inequalities
// ---------------------------------------------------------------------------

pub fn check_length_inequalities(seed: u64) -> Vec<CheckReport> {
    let mut rng = rng_for(seed, 6);
    let mut violation_sj = 0.0_f64;
    let mut violation_bu = 0.0_f64;
    for _ in 0..10_000 {
        let r_i = rng.gen_range(0.01..0.99);
        let r_f = rng.gen_range(0.01..0.99);
        let theta_f = rng.gen_range(0.01..PI);
        let sj = crate::complexity::sjoqvist_length_theta(r_i, r_f, theta_f);
        let fs = crate::complexity::fs_length_theta(theta_f);
        violation_sj = violation_sj.max(fs - sj);

        let r_prime = rng.gen_range(-1.5..1.5);
        let td = rng.gen_range(0.01..2.0);
        let eta_f = rng.gen_range(0.01..2.0);
        let bu = crate::complexity::bures_length_eta(r_i, r_prime, td, eta_f);
        let sj = crate::complexity::sjoqvist_length_eta(r_i, r_prime, td, eta_f);
        violation_bu = violation_bu.max(bu - sj);
    }
    vec![
        CheckReport {
            criterion: 6,
            name: "L_Sjoqvist >= L_FS (max violation)".into(),
            residual: violation_sj.max(0.0),
            tolerance: 1e-12,
        },
        CheckReport {
            criterion: 6,
            name: "L_Bures <= L_Sjoqvist (max violation)".into(),
            residual: violation_bu.max(0.0),
            tolerance: 1e-12,
        },
    ]
}

// ---------------------------------------------------------------------------
// Criterion 7: asymptotic laws
// ---------------------------------------------------------------------------

pub fn check_asymptotic_laws(seed: u64) -> Result<Vec<CheckReport>> {
    let mut rng = rng_for(seed, 7);
    let taus: Vec<f64> = (0..200)
        .map(|i| 100.0 * 100.0_f64.powf(i as f64 / 199.0))
        .collect();
    let mut ratio_constancy = 0.0_f64;
    let mut limit_err = 0.0_f64;
    let mut slope_err = 0.0_f64;
    for _ in 0..10 {
        let params = AsymptoticParams {
            r_i: rng.gen_range(0.0..0.7),
            r_dot_i: rng.gen_range(0.1..1.0),
            c_fs: rng.gen_range(0.1..0.9),
        };
        let law = asymptotic_ratio(&params, &taus)?;
        // Constancy: spread of ratio/tau across the grid.
        let finite: Vec<f64> = law
            .ratio_over_tau
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .collect();
        let lo = finite.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = finite.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        ratio_constancy = ratio_constancy.max(hi - lo);
        limit_err = limit_err.max(law.max_ratio_deviation);
        slope_err = slope_err.max((law.ige_gap_slope - 1.0).abs());
    }
    Ok(vec![
        CheckReport {
            criterion: 7,
            name: "complexity ratio / tau constancy".into(),
            residual: ratio_constancy,
            tolerance: 1e-12,
        },
        CheckReport {
            criterion: 7,
            name: "ratio limit = r_dot/(2 sqrt(1-r^2))".into(),
            residual: limit_err,
            tolerance: 1e-10,
        },
        CheckReport {
            criterion: 7,
            name: "entropy gap slope vs ln(tau) = 1".into(),
            residual: slope_err,
            tolerance: 0.02,
        },
    ])
}

// ---------------------------------------------------------------------------
// Criterion 8: explored/accessible ratio orderings
// ---------------------------------------------------------------------------

pub fn check_ratio_orderings(seed: u64) -> Result<Vec<CheckReport>> {
    let mut rng = rng_for(seed, 8);
    let etas: Vec<f64> = (1..=400).map(|i| i as f64 * 0.1).collect();
    let mut compare_fail = 0.0_f64;
    let mut boys_fail = 0.0_f64;
    for _ in 0..20 {
        let r_i = rng.gen_range(0.05..0.6);
        let r_dot = rng.gen_range(0.2..1.0);
        let c = rng.gen_range(0.1..0.9);
        let rep = compare_sjoqvist_fs(r_i, r_dot, c, &etas)?;
        if rep.eta_star.is_none() {
            compare_fail += 1.0;
        }

        let r_prime = rng.gen_range(0.3..1.2);
        let theta_i = rng.gen_range(0.2..0.8);
        let theta_dot = rng.gen_range(0.6..1.5);
        let rep = compare_bures_sjoqvist_slice(r_i, r_prime, theta_i, theta_dot, &etas)?;
        if rep.eta_star.is_none() {
            boys_fail += 1.0;
        }
    }
    Ok(vec![
        CheckReport {
            criterion: 8,
            name: "mixed >= pure volume-ratio threshold exists".into(),
            residual: compare_fail,
            tolerance: 0.0,
        },
        CheckReport {
            criterion: 8,
            name: "bures <= sjoqvist slice-ratio threshold exists".into(),
            residual: boys_fail,
            tolerance: 0.0,
        },
    ])
}

// ---------------------------------------------------------------------------
// Criterion 9: Morozova-Cencov-Petz reconstruction
// ---------------------------------------------------------------------------

pub fn check_mcp_reconstruction(seed: u64) -> Result<Vec<CheckReport>> {
    let mut rng = rng_for(seed, 9);
    let mut residual = 0.0_f64;
    for _ in 0..1000 {
        let p = interior_point(&mut rng);
        let d = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let bures = mcp_metric(McpFunction::BuresF, &p, &d)?;
        residual = residual.max((bures - line_element(MetricKind::Bures, &p, &d)?).abs());
        let sj = mcp_metric(McpFunction::SjoqvistF, &p, &d)?;
        residual = residual.max((sj - line_element(MetricKind::Sjoqvist, &p, &d)?).abs());
    }
    let origin = BlochPoint::new(0.0, 1.0, 0.0).unwrap();
    let conical_raised = mcp_metric(McpFunction::SjoqvistF, &origin, &[0.0, 1.0, 0.0]).is_err();
    Ok(vec![
        CheckReport {
            criterion: 9,
            name: "mcp form reproduces bures and sjoqvist line elements".into(),
            residual,
            tolerance: 1e-12,
        },
        CheckReport {
            criterion: 9,
            name: "f_Sjoqvist(1) = 0 raises a domain error at r = 0".into(),
            residual: if conical_raised { 0.0 } else { 1.0 },
            tolerance: 0.0,
        },
    ])
}

// ---------------------------------------------------------------------------
// Criterion 10: Killing residuals
// ---------------------------------------------------------------------------

pub fn check_killing_residuals(seed: u64) -> Result<Vec<CheckReport>> {
    let mut rng = rng_for(seed, 10);
    let grid = sphere_grid(50, 0.1);
    let mut residual = killing_check(&KillingField::K1, &grid)?;
    residual = residual.max(killing_check(&KillingField::K2, &grid)?);
    residual = residual.max(killing_check(&KillingField::K3, &grid)?);
    for _ in 0..5 {
        let combo = KillingField::Combination(
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
        );
        residual = residual.max(killing_check(&combo, &grid)?);
    }
    Ok(vec![CheckReport {
        criterion: 10,
        name: "killing condition residual on 50x50 grid".into(),
        residual,
        tolerance: 1e-8,
    }])
}

/// Runs every check with one seed; reports come back grouped by criterion
/// in ascending order.
pub fn run_all(seed: u64) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    out.extend(check_curvature_constants(seed)?);
    out.extend(check_accessible_volumes());
    out.extend(check_geodesic_oracle(seed)?);
    out.extend(check_conserved_quantities(seed)?);
    out.extend(check_bures_spectral_sum(seed)?);
    out.extend(check_length_inequalities(seed));
    out.extend(check_asymptotic_laws(seed)?);
    out.extend(check_ratio_orderings(seed)?);
    out.extend(check_mcp_reconstruction(seed)?);
    out.extend(check_killing_residuals(seed)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_are_deterministic_per_seed() {
        let a = check_length_inequalities(7);
        let b = check_length_inequalities(7);
        assert_eq!(a[0].residual.to_bits(), b[0].residual.to_bits());
        let c = check_length_inequalities(8);
        // Different seed draws different samples (residuals are max(0, x)
        // and may both be 0; compare the RNG stream instead via a spot draw).
        let mut r1 = rng_for(7, 6);
        let mut r2 = rng_for(8, 6);
        assert_ne!(r1.gen::<u64>(), r2.gen::<u64>());
        let _ = c;
    }
}
