//! The standard symplectic form, validated symplectic matrices, free
//! symplectic matrices, and their quadratic generating functions.
//!
//! Phase-space vectors are ordered `z = (x, p)` with `n` position entries
//! followed by `n` momentum entries, so every `2n x 2n` matrix in this
//! module splits into `n x n` blocks `[[A, B], [C, D]]`. The form matrix is
//! `J = [[0, I], [-I, 0]]` and a matrix is symplectic when `S^T J S = J`,
//! equivalently when `A^T C` and `B^T D` are symmetric and
//! `A^T D - C^T B = I`.

use nalgebra::{DMatrix, DVector, LU};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::expm::expm;

/// Default max-norm tolerance for structural residual checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest absolute entry of a matrix (max-norm).
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        0.0
    } else {
        m.amax()
    }
}

/// Largest absolute asymmetry `|m - m^T|` of a square matrix.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    max_abs(&(m - m.transpose()))
}

/// The matrix of the standard symplectic form for `n` degrees of freedom.
pub fn standard_j(dim_n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::<f64>::zeros(2 * dim_n, 2 * dim_n);
    for i in 0..dim_n {
        j[(i, dim_n + i)] = 1.0;
        j[(dim_n + i, i)] = -1.0;
    }
    j
}

/// The standard symplectic form `sigma(z, z') = <J z, z'>` on `R^{2n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardSymplecticForm {
    dim_n: usize,
}

impl StandardSymplecticForm {
    /// Form on `n >= 1` degrees of freedom (phase-space dimension `2n`).
    pub fn new(dim_n: usize) -> Result<Self> {
        if dim_n == 0 {
            return Err(Error::InvalidArgument(
                "the symplectic form needs at least one degree of freedom".into(),
            ));
        }
        Ok(Self { dim_n })
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    /// Dense matrix `J = [[0, I], [-I, 0]]`.
    pub fn matrix(&self) -> DMatrix<f64> {
        standard_j(self.dim_n)
    }

    /// Evaluate `sigma(z, z') = <J z, z'>`.
    pub fn form(&self, z: &DVector<f64>, zp: &DVector<f64>) -> Result<f64> {
        let d = 2 * self.dim_n;
        if z.len() != d || zp.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "form on R^{d} got vectors of length {} and {}",
                z.len(),
                zp.len()
            )));
        }
        let n = self.dim_n;
        let mut acc = 0.0;
        for i in 0..n {
            // <J z, z'> with J = [[0, I], [-I, 0]]:
            acc += z[n + i] * zp[i] - z[i] * zp[n + i];
        }
        Ok(acc)
    }
}

fn check_even_square(m: &DMatrix<f64>, what: &str) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 || m.nrows() % 2 != 0 {
        return Err(Error::DimensionMismatch(format!(
            "{what} must have even positive dimension, got {}",
            m.nrows()
        )));
    }
    Ok(m.nrows() / 2)
}

/// Max-norm residual `||S^T J S - J||` of a candidate symplectic matrix.
pub fn symplectic_residual(m: &DMatrix<f64>) -> Result<f64> {
    let n = check_even_square(m, "a symplectic candidate")?;
    let j = standard_j(n);
    let res = m.transpose() * &j * m - &j;
    Ok(max_abs(&res))
}

/// Whether `||S^T J S - J||_max <= tol`.
pub fn is_symplectic(m: &DMatrix<f64>, tol: f64) -> Result<bool> {
    Ok(symplectic_residual(m)? <= tol)
}

/// Result of a free-ness test: sign-carrying `det B` and the floor it was
/// compared against.
#[derive(Clone, Copy, Debug)]
pub struct FreeCheck {
    pub is_free: bool,
    pub det_b: f64,
    pub floor: f64,
}

/// A validated real symplectic matrix.
#[derive(Clone, Debug)]
pub struct SymplecticMatrix {
    entries: DMatrix<f64>,
    dim_n: usize,
    tol: f64,
}

impl SymplecticMatrix {
    /// Wrap a matrix after checking `||S^T J S - J||_max <= tol`.
    pub fn new(entries: DMatrix<f64>, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "symplectic tolerance must be positive and finite, got {tol}"
            )));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::NumericOverflow(
                "symplectic candidate contains non-finite entries".into(),
            ));
        }
        let dim_n = check_even_square(&entries, "a symplectic matrix")?;
        let residual = symplectic_residual(&entries)?;
        if residual > tol {
            return Err(Error::NotSymplectic { residual, tol });
        }
        Ok(Self {
            entries,
            dim_n,
            tol,
        })
    }

    /// Wrap with the default tolerance.
    pub fn with_default_tol(entries: DMatrix<f64>) -> Result<Self> {
        Self::new(entries, DEFAULT_TOL)
    }

    /// The identity, trivially symplectic.
    pub fn identity(dim_n: usize) -> Self {
        Self {
            entries: DMatrix::identity(2 * dim_n, 2 * dim_n),
            dim_n,
            tol: DEFAULT_TOL,
        }
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    fn block(&self, r: usize, c: usize) -> DMatrix<f64> {
        let n = self.dim_n;
        self.entries.view((r * n, c * n), (n, n)).into_owned()
    }

    /// Upper-left `n x n` block.
    pub fn block_a(&self) -> DMatrix<f64> {
        self.block(0, 0)
    }

    /// Upper-right `n x n` block.
    pub fn block_b(&self) -> DMatrix<f64> {
        self.block(0, 1)
    }

    /// Lower-left `n x n` block.
    pub fn block_c(&self) -> DMatrix<f64> {
        self.block(1, 0)
    }

    /// Lower-right `n x n` block.
    pub fn block_d(&self) -> DMatrix<f64> {
        self.block(1, 1)
    }

    /// Apply to a phase-space vector.
    pub fn apply(&self, z: &DVector<f64>) -> Result<DVector<f64>> {
        if z.len() != 2 * self.dim_n {
            return Err(Error::DimensionMismatch(format!(
                "expected a phase-space vector of length {}, got {}",
                2 * self.dim_n,
                z.len()
            )));
        }
        Ok(&self.entries * z)
    }

    /// Inverse from the block formula `S^{-1} = [[D^T, -B^T], [-C^T, A^T]]`.
    ///
    /// This is exact algebra on the blocks, so no linear solve is involved;
    /// the structural residual of the result is that of `S` amplified by at
    /// most `||S^{-1}||^2`.
    pub fn symplectic_inverse(&self) -> Self {
        let n = self.dim_n;
        let (a, b, c, d) = (
            self.block_a(),
            self.block_b(),
            self.block_c(),
            self.block_d(),
        );
        let mut inv = DMatrix::<f64>::zeros(2 * n, 2 * n);
        inv.view_mut((0, 0), (n, n)).copy_from(&d.transpose());
        inv.view_mut((0, n), (n, n)).copy_from(&(-b.transpose()));
        inv.view_mut((n, 0), (n, n)).copy_from(&(-c.transpose()));
        inv.view_mut((n, n), (n, n)).copy_from(&a.transpose());
        Self {
            entries: inv,
            dim_n: n,
            tol: self.tol,
        }
    }

    /// Scale-aware default floor for `|det B|` tests:
    /// `1e-10 * (||S||_max)^n`.
    pub fn default_singular_floor(&self) -> f64 {
        1e-10 * max_abs(&self.entries).powi(self.dim_n as i32)
    }

    /// Test whether the matrix is free (invertible upper-right block).
    ///
    /// `floor` defaults to [`Self::default_singular_floor`].
    pub fn is_free(&self, floor: Option<f64>) -> FreeCheck {
        let floor = floor.unwrap_or_else(|| self.default_singular_floor());
        let det_b = LU::new(self.block_b()).determinant();
        FreeCheck {
            is_free: det_b.abs() > floor,
            det_b,
            floor,
        }
    }

    /// Quadratic generating function of a free symplectic matrix:
    /// `P = D B^{-1}`, `L = B`, `Q = B^{-1} A`.
    ///
    /// Errors when the matrix is not free. The block conditions force `P`
    /// and `Q` to be symmetric; that is checked to `10 * tol` and the
    /// residual asymmetry is then folded away exactly.
    pub fn to_generating(&self, floor: Option<f64>) -> Result<GeneratingFunction> {
        let check = self.is_free(floor);
        if !check.is_free {
            return Err(Error::NotFree {
                det_b_abs: check.det_b.abs(),
                floor: check.floor,
            });
        }
        let b = self.block_b();
        let b_inv = LU::new(b.clone()).try_inverse().ok_or(Error::SingularBlock {
            det_abs: check.det_b.abs(),
            floor: check.floor,
        })?;
        let p_raw = self.block_d() * &b_inv;
        let q_raw = &b_inv * self.block_a();
        let sym_tol = 10.0 * self.tol * max_abs(&b_inv).max(1.0);
        for (name, m) in [("P", &p_raw), ("Q", &q_raw)] {
            let res = asymmetry(m);
            if res > sym_tol {
                return Err(Error::NotSymmetric {
                    residual: res,
                    tol: sym_tol,
                });
            }
            let _ = name;
        }
        let p = (&p_raw + p_raw.transpose()) * 0.5;
        let q = (&q_raw + q_raw.transpose()) * 0.5;
        GeneratingFunction::new(p, q, b, self.tol)
    }
}

/// Quadratic generating function
/// `W(x, x') = 1/2 <P x, x> - <L^{-1} x, x'> + 1/2 <Q x', x'>`
/// with `P`, `Q` symmetric and `L` invertible.
#[derive(Clone, Debug)]
pub struct GeneratingFunction {
    p: DMatrix<f64>,
    q: DMatrix<f64>,
    l: DMatrix<f64>,
    l_inv: DMatrix<f64>,
    dim_n: usize,
    tol: f64,
}

impl GeneratingFunction {
    pub fn new(p: DMatrix<f64>, q: DMatrix<f64>, l: DMatrix<f64>, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "generating-function tolerance must be positive and finite, got {tol}"
            )));
        }
        let n = l.nrows();
        if !l.is_square() || n == 0 {
            return Err(Error::DimensionMismatch(format!(
                "L must be square and non-empty, got {}x{}",
                l.nrows(),
                l.ncols()
            )));
        }
        for (name, m) in [("P", &p), ("Q", &q)] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{name} must be {n}x{n}, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            let res = asymmetry(m);
            if res > tol {
                return Err(Error::NotSymmetric { residual: res, tol });
            }
        }
        let floor = 1e-10 * max_abs(&l).powi(n as i32);
        let lu = LU::new(l.clone());
        let det = lu.determinant();
        if det.abs() <= floor {
            return Err(Error::SingularBlock {
                det_abs: det.abs(),
                floor,
            });
        }
        let l_inv = lu.try_inverse().ok_or(Error::SingularBlock {
            det_abs: det.abs(),
            floor,
        })?;
        Ok(Self {
            p,
            q,
            l,
            l_inv,
            dim_n: n,
            tol,
        })
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn l(&self) -> &DMatrix<f64> {
        &self.l
    }

    pub fn l_inv(&self) -> &DMatrix<f64> {
        &self.l_inv
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `det L`, sign included.
    pub fn det_l(&self) -> f64 {
        LU::new(self.l.clone()).determinant()
    }

    /// Evaluate `W(x, x')`.
    pub fn evaluate(&self, x: &DVector<f64>, xp: &DVector<f64>) -> Result<f64> {
        let n = self.dim_n;
        if x.len() != n || xp.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "W expects two vectors of length {n}, got {} and {}",
                x.len(),
                xp.len()
            )));
        }
        let quad_p = 0.5 * (&self.p * x).dot(x);
        let cross = (&self.l_inv * x).dot(xp);
        let quad_q = 0.5 * (&self.q * xp).dot(xp);
        Ok(quad_p - cross + quad_q)
    }

    /// The free symplectic matrix generated by `W`:
    /// `S_W = [[L Q, L], [P L Q - (L^{-1})^T, P L]]`.
    pub fn to_free_matrix(&self) -> Result<SymplecticMatrix> {
        let n = self.dim_n;
        let lq = &self.l * &self.q;
        let pl = &self.p * &self.l;
        let lower_left = &self.p * &lq - self.l_inv.transpose();
        let mut s = DMatrix::<f64>::zeros(2 * n, 2 * n);
        s.view_mut((0, 0), (n, n)).copy_from(&lq);
        s.view_mut((0, n), (n, n)).copy_from(&self.l);
        s.view_mut((n, 0), (n, n)).copy_from(&lower_left);
        s.view_mut((n, n), (n, n)).copy_from(&pl);
        let scale = max_abs(&s).max(1.0);
        SymplecticMatrix::new(s, 10.0 * self.tol * scale)
    }
}

/// Deterministic pseudo-random symplectic matrix: the exponential of
/// `J M` with `M` a seeded Gaussian symmetric matrix scaled by `scale`.
pub fn random_symplectic(seed: u64, dim_n: usize, scale: f64) -> Result<SymplecticMatrix> {
    if dim_n == 0 {
        return Err(Error::InvalidArgument(
            "random_symplectic needs at least one degree of freedom".into(),
        ));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "random_symplectic scale must be positive and finite, got {scale}"
        )));
    }
    let d = 2 * dim_n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| {
        let v: f64 = StandardNormal.sample(&mut rng);
        v * scale
    });
    let m_sym = (&g + g.transpose()) * 0.5;
    let x = standard_j(dim_n) * m_sym;
    let s = expm(&x)?;
    SymplecticMatrix::new(s, DEFAULT_TOL)
}
