//! Qubit state algebra: Bloch parametrization, density matrices, spectral
//! decomposition, purity and entropy, fidelities and angles.
//!
//! A mixed single-qubit state sits inside the Bloch ball at coordinates
//! `(r, theta, phi)` and corresponds to the density operator
//! `rho = (1 + r n.sigma)/2` with `n` the unit vector of the angles.
//! Pure states have `r = 1` and live on the Bloch sphere.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance used to accept/clamp coordinates on construction.
const COORD_TOL: f64 = 1e-12;
/// Tolerance used when validating operators and state vectors.
const STATE_TOL: f64 = 1e-9;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// ---------------------------------------------------------------------------
// 2x2 complex matrices
// ---------------------------------------------------------------------------

/// A dense 2x2 complex matrix, row-major. Enough linear algebra for one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub e: [[Complex64; 2]; 2],
}

impl Mat2 {
    pub fn new(e00: Complex64, e01: Complex64, e10: Complex64, e11: Complex64) -> Self {
        Mat2 {
            e: [[e00, e01], [e10, e11]],
        }
    }

    pub fn zero() -> Self {
        Mat2::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))
    }

    pub fn identity() -> Self {
        Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0))
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] = self.e[i][0] * rhs.e[0][j] + self.e[i][1] * rhs.e[1][j];
            }
        }
        out
    }

    pub fn add(&self, rhs: &Mat2) -> Mat2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] += rhs.e[i][j];
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Mat2) -> Mat2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] -= rhs.e[i][j];
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] *= s;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Mat2 {
        Mat2::new(
            self.e[0][0].conj(),
            self.e[1][0].conj(),
            self.e[0][1].conj(),
            self.e[1][1].conj(),
        )
    }

    pub fn trace(&self) -> Complex64 {
        self.e[0][0] + self.e[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.e[0][0] * self.e[1][1] - self.e[0][1] * self.e[1][0]
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self.e[0][0].im).abs() <= tol
            && (self.e[1][1].im).abs() <= tol
            && (self.e[0][1] - self.e[1][0].conj()).norm() <= tol
    }

    /// Principal square root of a positive semi-definite Hermitian 2x2 matrix.
    ///
    /// Uses the closed form `sqrt(M) = (M + sqrt(det M) I) / sqrt(tr M + 2 sqrt(det M))`,
    /// which is the spectral square root written without explicit eigenvectors
    /// (Cayley-Hamilton collapses the eigenbasis). Valid for M != 0.
    pub fn sqrt_psd(&self) -> Result<Mat2> {
        let t = self.trace().re;
        let d = self.det().re;
        if !self.is_hermitian(STATE_TOL) || d < -STATE_TOL || t < -STATE_TOL {
            return Err(Error::InvalidState(
                "matrix square root requires a Hermitian PSD argument".into(),
            ));
        }
        // Determinants at the level of f64 rounding noise are flushed to
        // zero: the square root would turn +-1e-17 into a 3e-9 error and
        // pure factors must stay exactly pure.
        let d = if d < 1e-14 { 0.0 } else { d };
        let denom2 = t + 2.0 * d.sqrt();
        if denom2 <= 0.0 {
            // M == 0 to tolerance.
            return Ok(Mat2::zero());
        }
        let denom = denom2.sqrt();
        let num = self.add(&Mat2::identity().scale(d.sqrt()));
        Ok(num.scale(1.0 / denom))
    }
}

pub fn pauli_x() -> Mat2 {
    Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

pub fn pauli_y() -> Mat2 {
    Mat2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))
}

pub fn pauli_z() -> Mat2 {
    Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

// ---------------------------------------------------------------------------
// Bloch coordinates
// ---------------------------------------------------------------------------

/// A point of the Bloch ball in spherical coordinates `(r, theta, phi)`.
///
/// Invariants: `r` in `[0, 1]`, `theta` in `[0, pi]`, `phi` in `[0, 2pi)`.
/// `r = 1` is a pure state, `r < 1` a mixed state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochPoint {
    r: f64,
    theta: f64,
    phi: f64,
}

impl BlochPoint {
    /// Builds a point, normalizing `phi` mod 2pi and clamping `r`/`theta`
    /// within a 1e-12 tolerance before rejecting.
    pub fn new(r: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(r.is_finite() && theta.is_finite() && phi.is_finite()) {
            return Err(Error::InvalidCoordinate("non-finite coordinate".into()));
        }
        if !(-COORD_TOL..=1.0 + COORD_TOL).contains(&r) {
            return Err(Error::InvalidCoordinate(format!("r = {r} not in [0, 1]")));
        }
        if !(-COORD_TOL..=std::f64::consts::PI + COORD_TOL).contains(&theta) {
            return Err(Error::InvalidCoordinate(format!(
                "theta = {theta} not in [0, pi]"
            )));
        }
        let r = r.clamp(0.0, 1.0);
        let theta = theta.clamp(0.0, std::f64::consts::PI);
        let mut phi = phi.rem_euclid(2.0 * std::f64::consts::PI);
        if phi >= 2.0 * std::f64::consts::PI {
            phi = 0.0;
        }
        Ok(BlochPoint { r, theta, phi })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn is_pure(&self) -> bool {
        self.r == 1.0
    }
}

// ---------------------------------------------------------------------------
// Pure states
// ---------------------------------------------------------------------------

/// A normalized two-component state vector. Global phase carries no meaning;
/// all consumers only look at moduli of inner products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    amplitudes: [Complex64; 2],
}

impl PureState {
    pub fn new(amplitudes: [Complex64; 2]) -> Result<Self> {
        let norm = (amplitudes[0].norm_sqr() + amplitudes[1].norm_sqr()).sqrt();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(PureState { amplitudes })
    }

    /// `|psi(theta, phi)> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let half = 0.5 * theta;
        PureState {
            amplitudes: [
                c(half.cos(), 0.0),
                Complex64::from_polar(half.sin(), phi),
            ],
        }
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes[0].conj() * other.amplitudes[0]
            + self.amplitudes[1].conj() * other.amplitudes[1]
    }

    pub fn to_density(&self) -> DensityMatrix {
        let a = self.amplitudes;
        let m = Mat2::new(
            a[0] * a[0].conj(),
            a[0] * a[1].conj(),
            a[1] * a[0].conj(),
            a[1] * a[1].conj(),
        );
        DensityMatrix { m }
    }

    /// Rotates the global phase so the first component of modulus > 1e-14 is
    /// real and positive. Makes outputs deterministic for golden tests.
    pub fn canonicalized(&self) -> PureState {
        let a = self.amplitudes;
        let lead = if a[0].norm() > 1e-14 { a[0] } else { a[1] };
        let phase = lead / lead.norm();
        PureState {
            amplitudes: [a[0] / phase, a[1] / phase],
        }
    }
}

// ---------------------------------------------------------------------------
// Density matrices
// ---------------------------------------------------------------------------

/// A 2x2 Hermitian, unit-trace, positive semi-definite matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    m: Mat2,
}

impl DensityMatrix {
    pub fn new(m: Mat2) -> Result<Self> {
        if !m.is_hermitian(STATE_TOL) {
            return Err(Error::InvalidState("matrix is not Hermitian".into()));
        }
        if (m.trace().re - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "trace = {} is not 1",
                m.trace().re
            )));
        }
        // For a Hermitian unit-trace 2x2 matrix, PSD is det >= 0.
        if m.det().re < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "det = {} < 0: not positive semi-definite",
                m.det().re
            )));
        }
        Ok(DensityMatrix { m })
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }
}

/// Spectral data of a nondegenerate density matrix: eigenvalues `(1 +- r)/2`
/// and their orthonormal eigenvectors.
#[derive(Debug, Clone, Copy)]
pub struct SpectralDecomposition {
    pub p0: f64,
    pub p1: f64,
    pub e0: PureState,
    pub e1: PureState,
}

/// `rho = (1 + r n.sigma)/2` written out in Bloch coordinates.
pub fn bloch_to_density(point: &BlochPoint) -> DensityMatrix {
    DensityMatrix {
        m: rho_from_coords(point.r(), point.theta(), point.phi()),
    }
}

/// Raw density-matrix formula without coordinate normalization. Used by
/// finite-difference oracles that momentarily step outside the canonical
/// coordinate ranges.
pub fn rho_from_coords(r: f64, theta: f64, phi: f64) -> Mat2 {
    let (st, ct) = theta.sin_cos();
    let off = Complex64::from_polar(r * st, -phi);
    Mat2::new(
        c(0.5 * (1.0 + r * ct), 0.0),
        0.5 * off,
        0.5 * off.conj(),
        c(0.5 * (1.0 - r * ct), 0.0),
    )
}

/// Inverts `bloch_to_density` via the Bloch vector `tr(rho sigma)`.
///
/// The fully degenerate direction is fixed by convention: `r = 0` returns
/// `theta = 0, phi = 0`, and points on the polar axis return `phi = 0`.
pub fn density_to_bloch(rho: &DensityMatrix) -> BlochPoint {
    let m = &rho.m;
    let x = 2.0 * m.e[1][0].re;
    let y = 2.0 * m.e[1][0].im;
    let z = (m.e[0][0] - m.e[1][1]).re;
    let r = (x * x + y * y + z * z).sqrt();
    if r < 1e-15 {
        return BlochPoint {
            r: 0.0,
            theta: 0.0,
            phi: 0.0,
        };
    }
    let theta = (z / r).clamp(-1.0, 1.0).acos();
    let phi = if x == 0.0 && y == 0.0 {
        0.0
    } else {
        y.atan2(x).rem_euclid(2.0 * std::f64::consts::PI)
    };
    BlochPoint {
        r: r.min(1.0),
        theta,
        phi,
    }
}

/// Eigenvalues `(1 +- r)/2` and eigenvectors of a nondegenerate state.
///
/// Degenerate input (`r = 0`) is an error: there the eigenbasis is not unique
/// and the one-to-one spectral correspondence breaks down.
pub fn spectral(rho: &DensityMatrix) -> Result<SpectralDecomposition> {
    let b = density_to_bloch(rho);
    if b.r() < 1e-12 {
        return Err(Error::DegenerateSpectrum);
    }
    let (theta, phi) = (b.theta(), b.phi());
    let half = 0.5 * theta;
    let e0 = PureState {
        amplitudes: [c(half.cos(), 0.0), Complex64::from_polar(half.sin(), phi)],
    }
    .canonicalized();
    let e1 = PureState {
        amplitudes: [
            c(half.sin(), 0.0),
            -Complex64::from_polar(half.cos(), phi),
        ],
    }
    .canonicalized();
    Ok(SpectralDecomposition {
        p0: 0.5 * (1.0 + b.r()),
        p1: 0.5 * (1.0 - b.r()),
        e0,
        e1,
    })
}

/// Purity `tr(rho^2)`; lies in `[1/2, 1]` for a qubit.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.m.mul(&rho.m).trace().re
}

/// Von Neumann entropy `-tr(rho ln rho)` with the `0 ln 0 = 0` convention.
/// Ranges from 0 (pure) to `ln 2` (maximally mixed).
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let r = density_to_bloch(rho).r();
    let p0 = 0.5 * (1.0 + r);
    let p1 = 0.5 * (1.0 - r);
    let term = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    term(p0) + term(p1)
}

/// Hilbert-space angle `arccos |<psi_i|psi_f>|` between rays; in `[0, pi/2]`.
pub fn wootters_angle(psi_i: &PureState, psi_f: &PureState) -> f64 {
    psi_i.inner(psi_f).norm().clamp(0.0, 1.0).acos()
}

/// Fidelity `[tr sqrt(sqrt(rho_i) rho_f sqrt(rho_i))]^2`.
pub fn bures_fidelity(rho_i: &DensityMatrix, rho_f: &DensityMatrix) -> Result<f64> {
    let s = rho_i.m.sqrt_psd()?;
    let m = s.mul(&rho_f.m).mul(&s);
    let t = m.trace().re.max(0.0);
    let d = m.det().re;
    let d = if d < 1e-14 { 0.0 } else { d };
    // tr sqrt(M) = sqrt(tr M + 2 sqrt(det M)) for 2x2 PSD M.
    let tr_sqrt = (t + 2.0 * d.sqrt()).sqrt();
    Ok((tr_sqrt * tr_sqrt).clamp(0.0, 1.0))
}

/// Geodesic angle `arccos sqrt(F)` between density operators. Reduces to the
/// Wootters angle when both states are pure.
pub fn bures_angle(rho_i: &DensityMatrix, rho_f: &DensityMatrix) -> Result<f64> {
    let f = bures_fidelity(rho_i, rho_f)?;
    Ok(f.sqrt().clamp(0.0, 1.0).acos())
}

/// `sqrt(2 [1 - sqrt(F)])`.
pub fn bures_distance(rho_i: &DensityMatrix, rho_f: &DensityMatrix) -> Result<f64> {
    let f = bures_fidelity(rho_i, rho_f)?;
    Ok((2.0 * (1.0 - f.sqrt())).max(0.0).sqrt())
}

/// Larmor precession of a pure state under `H = hbar omega_0 sigma_z`:
/// `theta` stays fixed while `phi` advances at rate `2 omega_0`.
pub fn precession_demo(theta0: f64, phi0: f64, omega0: f64, t: f64) -> Result<BlochPoint> {
    BlochPoint::new(1.0, theta0, phi0 + 2.0 * omega0 * t)
}
