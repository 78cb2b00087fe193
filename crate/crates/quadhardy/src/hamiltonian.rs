//! Real quadratic Hamiltonians `H(z) = 1/2 <M z, z>`, their generators
//! `X = J M` in the symplectic Lie algebra, and the classical flows
//! `S_t = exp(t X)` — both numerically and in closed form for the
//! built-in model presets.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::symplectic::{asymmetry, max_abs, standard_j, SymplecticMatrix, DEFAULT_TOL};
use crate::williamson::{cross_term_basis, cross_term_matrix};

/// A quadratic Hamiltonian `H(z) = 1/2 <M z, z>` with symmetric `M`,
/// together with the Planck scale of the quantum problem it generates and
/// the particle mass used by the model presets.
#[derive(Clone, Debug)]
pub struct QuadraticHamiltonian {
    m_matrix: DMatrix<f64>,
    hbar: f64,
    mass: f64,
}

impl QuadraticHamiltonian {
    /// Wrap a symmetric matrix with `mass = 1`.
    pub fn new(m_matrix: DMatrix<f64>, hbar: f64) -> Result<Self> {
        Self::with_mass(m_matrix, hbar, 1.0)
    }

    /// Wrap a symmetric matrix, recording the preset mass.
    pub fn with_mass(m_matrix: DMatrix<f64>, hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "hbar must be positive and finite, got {hbar}"
            )));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "mass must be positive and finite, got {mass}"
            )));
        }
        if !m_matrix.is_square() || m_matrix.nrows() == 0 || m_matrix.nrows() % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "a Hamiltonian matrix must be even-dimensional and square, got {}x{}",
                m_matrix.nrows(),
                m_matrix.ncols()
            )));
        }
        if m_matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::NumericOverflow(
                "Hamiltonian matrix contains non-finite entries".into(),
            ));
        }
        let tol = DEFAULT_TOL * max_abs(&m_matrix).max(1.0);
        let asym = asymmetry(&m_matrix);
        if asym > tol {
            return Err(Error::NotSymmetric {
                residual: asym,
                tol,
            });
        }
        // Fold roundoff asymmetry away so the generator is exactly in the
        // algebra.
        let m_sym = (&m_matrix + m_matrix.transpose()) * 0.5;
        Ok(Self {
            m_matrix: m_sym,
            hbar,
            mass,
        })
    }

    pub fn dim_n(&self) -> usize {
        self.m_matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m_matrix
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Classical energy `H(z) = 1/2 <M z, z>`.
    pub fn energy(&self, z: &DVector<f64>) -> Result<f64> {
        if z.len() != self.m_matrix.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "expected a phase-space vector of length {}, got {}",
                self.m_matrix.nrows(),
                z.len()
            )));
        }
        Ok(0.5 * (&self.m_matrix * z).dot(z))
    }

    /// The flow generator `X = J M`.
    pub fn generator(&self) -> AlgebraElement {
        let x = standard_j(self.dim_n()) * &self.m_matrix;
        AlgebraElement {
            dim_n: self.dim_n(),
            x,
        }
    }

    /// Numerical flow `S_t = exp(t J M)` at a single time.
    pub fn flow_at(&self, t: f64) -> Result<FlowPoint> {
        flow(&self.generator(), t)
    }
}

/// An element `X` of the symplectic Lie algebra: `X J + J X^T = 0`,
/// equivalently `X = J M` for a symmetric `M`.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    x: DMatrix<f64>,
    dim_n: usize,
}

impl AlgebraElement {
    /// Validate membership in the algebra to `1e-9` (scaled by the entry
    /// magnitude).
    pub fn new(x: DMatrix<f64>) -> Result<Self> {
        if !x.is_square() || x.nrows() == 0 || x.nrows() % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "an algebra element must be even-dimensional and square, got {}x{}",
                x.nrows(),
                x.ncols()
            )));
        }
        let n = x.nrows() / 2;
        let j = standard_j(n);
        let res = max_abs(&(&x * &j + &j * x.transpose()));
        let tol = DEFAULT_TOL * max_abs(&x).max(1.0);
        if res > tol {
            return Err(Error::VerificationFailed {
                what: "matrix is not in the symplectic algebra (X J + J X^T != 0)".into(),
                residual: res,
                tol,
            });
        }
        Ok(Self { x, dim_n: n })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }
}

/// A flow sample: the time and the symplectic matrix `S_t`.
#[derive(Clone, Debug)]
pub struct FlowPoint {
    pub t: f64,
    pub s_t: SymplecticMatrix,
}

/// Evaluate `S_t = exp(t X)` by matrix exponential. The symplectic
/// residual of the result is checked at `1e-8 * max(1, ||t X||_max)`.
pub fn flow(x: &AlgebraElement, t: f64) -> Result<FlowPoint> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "flow time must be finite, got {t}"
        )));
    }
    let tx = x.matrix() * t;
    let tol = 1e-8 * max_abs(&tx).max(1.0);
    let s = expm(&tx)?;
    Ok(FlowPoint {
        t,
        s_t: SymplecticMatrix::new(s, tol)?,
    })
}

/// `sin(omega t) / omega` as an analytic function of the *squared*
/// frequency, valid on both sides of `omega_sq = 0`: trigonometric for
/// positive `omega_sq`, hyperbolic for negative, with a series fallback
/// near zero where both closed branches lose digits.
pub fn modal_sine(omega_sq: f64, t: f64) -> f64 {
    let u = omega_sq * t * t;
    if u.abs() <= 1e-4 {
        t * (1.0 - u / 6.0 + u * u / 120.0 - u * u * u / 5040.0)
    } else if omega_sq > 0.0 {
        let om = omega_sq.sqrt();
        (om * t).sin() / om
    } else {
        let om = (-omega_sq).sqrt();
        (om * t).sinh() / om
    }
}

/// `cos(omega t)` as an analytic function of the squared frequency, with
/// the same branch structure as [`modal_sine`].
pub fn modal_cosine(omega_sq: f64, t: f64) -> f64 {
    let u = omega_sq * t * t;
    if u.abs() <= 1e-4 {
        1.0 - u / 2.0 + u * u / 24.0 - u * u * u / 720.0
    } else if omega_sq > 0.0 {
        (omega_sq.sqrt() * t).cos()
    } else {
        ((-omega_sq).sqrt() * t).cosh()
    }
}

/// Free particle in `n` dimensions: `H = |p|^2 / (2m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeParams {
    pub mass: f64,
    pub dim_n: usize,
}

/// Decoupled oscillator modes: `H = |p|^2/(2m) + m/2 sum omega_j^2 x_j^2`.
/// Negative entries of `omega_sq` give inverted (hyperbolic) modes.
#[derive(Clone, Debug, PartialEq)]
pub struct OscillatorParams {
    pub mass: f64,
    pub omega_sq: Vec<f64>,
}

impl OscillatorParams {
    /// Build from plain frequencies (all modes stable).
    pub fn from_frequencies(mass: f64, omegas: &[f64]) -> Self {
        Self {
            mass,
            omega_sq: omegas.iter().map(|w| w * w).collect(),
        }
    }
}

/// Two oscillators of common frequency `omega` coupled by a
/// position-momentum cross term `theta * x_2 p_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossTermParams {
    pub mass: f64,
    pub omega: f64,
    pub theta: f64,
}

/// Built-in model Hamiltonians with closed-form flows.
#[derive(Clone, Debug, PartialEq)]
pub enum Preset {
    Free(FreeParams),
    Oscillator(OscillatorParams),
    CrossTerm(CrossTermParams),
}

impl Preset {
    fn validate(&self) -> Result<()> {
        match self {
            Preset::Free(p) => {
                if !(p.mass > 0.0 && p.mass.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "free-particle mass must be positive, got {}",
                        p.mass
                    )));
                }
                if p.dim_n == 0 {
                    return Err(Error::InvalidArgument(
                        "free particle needs at least one degree of freedom".into(),
                    ));
                }
            }
            Preset::Oscillator(p) => {
                if !(p.mass > 0.0 && p.mass.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "oscillator mass must be positive, got {}",
                        p.mass
                    )));
                }
                if p.omega_sq.is_empty() {
                    return Err(Error::InvalidArgument(
                        "oscillator needs at least one mode".into(),
                    ));
                }
                if p.omega_sq.iter().any(|w| !w.is_finite()) {
                    return Err(Error::InvalidArgument(
                        "oscillator squared frequencies must be finite".into(),
                    ));
                }
            }
            Preset::CrossTerm(p) => {
                // cross_term_basis re-validates; fail early with the same
                // conditions so even the matrix builder is guarded.
                if !(p.mass > 0.0 && p.mass.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "cross-term mass must be positive, got {}",
                        p.mass
                    )));
                }
                if !(p.omega > 0.0 && p.omega.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "cross-term omega must be positive, got {}",
                        p.omega
                    )));
                }
                if !(p.theta.abs() < p.omega) {
                    return Err(Error::InvalidArgument(format!(
                        "cross-term coupling must satisfy |theta| < omega, got theta = {}, omega = {}",
                        p.theta, p.omega
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of degrees of freedom.
    pub fn dim_n(&self) -> usize {
        match self {
            Preset::Free(p) => p.dim_n,
            Preset::Oscillator(p) => p.omega_sq.len(),
            Preset::CrossTerm(_) => 2,
        }
    }

    /// Mass parameter of the preset.
    pub fn mass(&self) -> f64 {
        match self {
            Preset::Free(p) => p.mass,
            Preset::Oscillator(p) => p.mass,
            Preset::CrossTerm(p) => p.mass,
        }
    }

    /// The Hamiltonian matrix of the preset.
    pub fn matrix(&self) -> Result<DMatrix<f64>> {
        self.validate()?;
        Ok(match self {
            Preset::Free(p) => {
                let n = p.dim_n;
                let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
                for i in 0..n {
                    m[(n + i, n + i)] = 1.0 / p.mass;
                }
                m
            }
            Preset::Oscillator(p) => {
                let n = p.omega_sq.len();
                let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
                for (i, &w2) in p.omega_sq.iter().enumerate() {
                    m[(i, i)] = p.mass * w2;
                    m[(n + i, n + i)] = 1.0 / p.mass;
                }
                m
            }
            Preset::CrossTerm(p) => cross_term_matrix(p.mass, p.omega, p.theta),
        })
    }

    /// Package as a [`QuadraticHamiltonian`].
    pub fn hamiltonian(&self, hbar: f64) -> Result<QuadraticHamiltonian> {
        QuadraticHamiltonian::with_mass(self.matrix()?, hbar, self.mass())
    }

    /// Closed-form flow `S_t`, computed without any matrix exponential.
    pub fn closed_form_flow(&self, t: f64) -> Result<FlowPoint> {
        self.validate()?;
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "flow time must be finite, got {t}"
            )));
        }
        let s_t = match self {
            Preset::Free(p) => {
                let n = p.dim_n;
                let mut s = DMatrix::<f64>::identity(2 * n, 2 * n);
                for i in 0..n {
                    s[(i, n + i)] = t / p.mass;
                }
                let tol = DEFAULT_TOL * max_abs(&s).max(1.0);
                SymplecticMatrix::new(s, tol)?
            }
            Preset::Oscillator(p) => {
                let n = p.omega_sq.len();
                let mut s = DMatrix::<f64>::zeros(2 * n, 2 * n);
                for (i, &w2) in p.omega_sq.iter().enumerate() {
                    let g = modal_sine(w2, t);
                    let h = modal_cosine(w2, t);
                    s[(i, i)] = h;
                    s[(n + i, n + i)] = h;
                    s[(i, n + i)] = g / p.mass;
                    s[(n + i, i)] = -p.mass * w2 * g;
                }
                let tol = DEFAULT_TOL * max_abs(&s).max(1.0);
                SymplecticMatrix::new(s, tol)?
            }
            Preset::CrossTerm(p) => {
                let basis = cross_term_basis(p.mass, p.omega, p.theta)?;
                basis.flow(t)?
            }
        };
        Ok(FlowPoint { t, s_t })
    }
}
