//! Gaussian phase-space states with closed-form Wigner distributions.
//!
//! A Gaussian state is described by a phase-space center, a positive
//! definite covariance, and an L^2 amplitude:
//!
//! ```text
//! W(z) = |amp|^2 / ((2 pi)^n sqrt(det Sigma)) *
//!        exp(-1/2 <Sigma^{-1} (z - z0), z - z0>).
//! ```
//!
//! Linear flows act on these states exactly — the covariance transforms by
//! congruence and the center by the matrix — which makes them the natural
//! oracle for grid-based propagation and for probing how close a decay
//! pair comes to saturating the uniqueness certificate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::QuadraticHamiltonian;
use crate::symplectic::SymplecticMatrix;

/// A (generally mixed) Gaussian phase-space distribution.
#[derive(Clone, Debug)]
pub struct GaussianState {
    center: DVector<f64>,
    covariance: DMatrix<f64>,
    amplitude: Complex64,
    hbar: f64,
}

impl GaussianState {
    /// `covariance` must be symmetric positive definite of even dimension
    /// `2n`, matching the center.
    pub fn new(
        center: DVector<f64>,
        covariance: DMatrix<f64>,
        amplitude: Complex64,
        hbar: f64,
    ) -> Result<Self> {
        let dim = covariance.nrows();
        if covariance.ncols() != dim || dim == 0 || dim % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "covariance must be square of even dimension, got {}x{}",
                covariance.nrows(),
                covariance.ncols()
            )));
        }
        if center.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "center has length {} but the covariance is {dim}x{dim}",
                center.len()
            )));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "hbar must be positive and finite, got {hbar}"
            )));
        }
        if !amplitude.re.is_finite() || !amplitude.im.is_finite() {
            return Err(Error::NumericOverflow("amplitude is not finite".into()));
        }
        let asym = crate::symplectic::asymmetry(&covariance);
        let scale = crate::symplectic::max_abs(&covariance).max(1.0);
        if asym > 1e-12 * scale {
            return Err(Error::NotSymmetric {
                residual: asym,
                tol: 1e-12 * scale,
            });
        }
        let sym = (covariance.clone() + covariance.transpose()) * 0.5;
        let eig = sym.clone().symmetric_eigen();
        let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig <= 0.0 {
            return Err(Error::NotPositiveDefinite { min_eig });
        }
        Ok(Self {
            center,
            covariance: sym,
            amplitude,
            hbar,
        })
    }

    /// The pure state `K e^{-alpha x^2}` in one degree of freedom, centered
    /// at the origin with unit L^2 norm (`K = (2 alpha / pi)^{1/4}` gives
    /// norm 1; here the amplitude carries the norm of `e^{-alpha x^2}`
    /// itself, `(pi / (2 alpha))^{1/4}`). Its Wigner covariance is
    /// `diag(1/(4 alpha), alpha hbar^2)`.
    pub fn from_position_decay(alpha: f64, hbar: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "decay exponent must be positive and finite, got {alpha}"
            )));
        }
        let covariance =
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 / (4.0 * alpha), alpha * hbar * hbar]));
        let amplitude = Complex64::new(
            (std::f64::consts::PI / (2.0 * alpha)).powf(0.25),
            0.0,
        );
        Self::new(DVector::zeros(2), covariance, amplitude, hbar)
    }

    pub fn dim_n(&self) -> usize {
        self.covariance.nrows() / 2
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn amplitude(&self) -> Complex64 {
        self.amplitude
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Position variance of the `|u|^2` density along axis `k`.
    pub fn position_variance(&self, k: usize) -> f64 {
        self.covariance[(k, k)]
    }

    /// The exponent `beta` with `|u(x)|^2 ~ e^{-2 beta x^2}` along axis
    /// `k`: for a Gaussian, `beta = 1 / (4 Sigma_xx)`.
    pub fn position_decay_exponent(&self, k: usize) -> f64 {
        1.0 / (4.0 * self.covariance[(k, k)])
    }

    /// Evaluate the Wigner distribution at a phase-space point.
    pub fn wigner_at(&self, z: &DVector<f64>) -> Result<f64> {
        let dim = self.covariance.nrows();
        if z.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "point has length {} but the state lives in dimension {dim}",
                z.len()
            )));
        }
        let lu = nalgebra::LU::new(self.covariance.clone());
        let diff = z - &self.center;
        let solved = lu.solve(&diff).ok_or_else(|| {
            Error::NotPositiveDefinite {
                min_eig: f64::NAN,
            }
        })?;
        let quad = diff.dot(&solved);
        let det = lu.determinant();
        if det <= 0.0 {
            return Err(Error::NotPositiveDefinite { min_eig: det });
        }
        let n = self.dim_n() as f64;
        let norm = self.amplitude.norm_sqr()
            / ((2.0 * std::f64::consts::PI).powf(n) * det.sqrt());
        Ok(norm * (-0.5 * quad).exp())
    }

    /// Push the state through a linear symplectic map: the center maps by
    /// `S`, the covariance by congruence `S Sigma S^T`, and the amplitude
    /// is unchanged (the transform is unitary on L^2).
    pub fn propagate(&self, s: &SymplecticMatrix) -> Result<Self> {
        if 2 * s.dim_n() != self.covariance.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "map acts on dimension {} but the state lives in {}",
                2 * s.dim_n(),
                self.covariance.nrows()
            )));
        }
        let m = s.matrix();
        let covariance = m * &self.covariance * m.transpose();
        let covariance = (covariance.clone() + covariance.transpose()) * 0.5;
        let center = m * &self.center;
        Self::new(center, covariance, self.amplitude, self.hbar)
    }
}

/// Free-function form of [`GaussianState::propagate`].
pub fn propagate_gaussian(state: &GaussianState, s: &SymplecticMatrix) -> Result<GaussianState> {
    state.propagate(s)
}

/// Evolve the pure state `e^{-alpha x^2}` under a one-degree-of-freedom
/// quadratic Hamiltonian to time `t` and return the certificate product
/// `(2 hbar)^2 ||B(t)||^2 alpha beta(t)`, where `beta(t)` is the position
/// decay exponent of the evolved Gaussian. The uniqueness threshold is 1;
/// genuine states can approach it but never cross it, so this probe
/// measures how sharp the certificate is.
pub fn hardy_saturation_probe(alpha: f64, h: &QuadraticHamiltonian, t: f64) -> Result<f64> {
    if h.dim_n() != 1 {
        return Err(Error::InvalidArgument(
            "the saturation probe is defined for one degree of freedom".into(),
        ));
    }
    let state = GaussianState::from_position_decay(alpha, h.hbar())?;
    let flow = h.flow_at(t)?;
    let evolved = state.propagate(&flow.s_t)?;
    let beta = evolved.position_decay_exponent(0);
    let b = flow.s_t.block_b();
    let opnorm = crate::hardy::op_norm(&b);
    Ok(4.0 * h.hbar() * h.hbar() * opnorm * opnorm * alpha * beta)
}
