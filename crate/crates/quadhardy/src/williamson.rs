//! Symplectic diagonalization of positive definite matrices and the
//! circular-function form of the linear flows it induces.
//!
//! For a symmetric positive definite `M` on `R^{2n}` there is a symplectic
//! `S` with `S^T M S = diag(Lambda, Lambda)`, where `Lambda` holds the
//! moduli of the (purely imaginary) eigenvalues `{+/- i lambda_j}` of
//! `J M`. The numerical route used here works entirely with symmetric
//! eigenproblems:
//!
//! 1. form the skew matrix `K = M^{1/2} J M^{1/2}` (similar to `J M`);
//! 2. eigendecompose the symmetric matrix `-K^2`, whose eigenvalues are
//!    the `lambda_j^2`, each on a `K`-invariant plane;
//! 3. inside each eigenplane pick a unit `u` and set `w = -K u / ||K u||`,
//!    which yields an orthogonal `O` with `O^T K O = [[0, L], [-L, 0]]`;
//! 4. then `S = M^{-1/2} O diag(Lambda^{1/2}, Lambda^{1/2})` is symplectic
//!    and diagonalizes `M`.
//!
//! Once `S` and `Lambda` are known, the flow `exp(t J M)` collapses to
//! elementary functions:
//! `exp(t J M) = J (S^{-1})^T [[sin(L t), -cos(L t)], [cos(L t), sin(L t)]] S^{-1}`
//! with the trigonometric functions applied per mode.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::symplectic::{asymmetry, max_abs, standard_j, SymplecticMatrix};

/// Default tolerance for decomposition residual checks.
pub const DEFAULT_WILLIAMSON_TOL: f64 = 1e-9;

/// A symplectic diagonalization `S^T M S = diag(Lambda, Lambda)`.
#[derive(Clone, Debug)]
pub struct WilliamsonDecomposition {
    s: SymplecticMatrix,
    lambda: Vec<f64>,
    near_degenerate: Vec<(usize, usize)>,
    tol: f64,
}

impl WilliamsonDecomposition {
    /// The diagonalizing symplectic matrix.
    pub fn s(&self) -> &SymplecticMatrix {
        &self.s
    }

    /// The modal frequencies, sorted in descending order.
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Index pairs of adjacent modes whose frequencies are closer than the
    /// decomposition tolerance. Such modes are individually well-defined
    /// only up to rotations inside their joint eigenspace.
    pub fn near_degenerate(&self) -> &[(usize, usize)] {
        &self.near_degenerate
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `diag(Lambda, Lambda)` as a dense matrix.
    pub fn normal_form(&self) -> DMatrix<f64> {
        let n = self.lambda.len();
        let mut d = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for (j, &l) in self.lambda.iter().enumerate() {
            d[(j, j)] = l;
            d[(n + j, n + j)] = l;
        }
        d
    }
}

/// Symmetric square root and inverse square root via eigendecomposition.
/// Errors unless every eigenvalue exceeds `min_eig_floor`.
fn spd_sqrt_pair(
    m: &DMatrix<f64>,
    min_eig_floor: f64,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let min_eig = eig.eigenvalues.min();
    if !(min_eig > min_eig_floor) {
        return Err(Error::NotPositiveDefinite { min_eig });
    }
    let q = &eig.eigenvectors;
    let sqrt_d = DMatrix::from_diagonal(&eig.eigenvalues.map(|d| d.sqrt()));
    let inv_sqrt_d = DMatrix::from_diagonal(&eig.eigenvalues.map(|d| 1.0 / d.sqrt()));
    Ok((q * sqrt_d * q.transpose(), q * inv_sqrt_d * q.transpose()))
}

/// Symplectically diagonalize a symmetric positive definite matrix.
///
/// `tol` bounds every residual check: the symmetry of the input, the
/// positivity floor for its spectrum, the orthogonality of the internal
/// frame, the symplectic residual of `S`, and the final
/// `||S^T M S - diag(Lambda, Lambda)||_max`.
pub fn williamson(m: &DMatrix<f64>, tol: f64) -> Result<WilliamsonDecomposition> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "williamson tolerance must be positive and finite, got {tol}"
        )));
    }
    if !m.is_square() || m.nrows() == 0 || m.nrows() % 2 != 0 {
        return Err(Error::DimensionMismatch(format!(
            "williamson expects an even-dimensional square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows() / 2;
    let scale = max_abs(m).max(1.0);
    let asym = asymmetry(m);
    if asym > 100.0 * tol * scale {
        return Err(Error::NotSymmetric {
            residual: asym,
            tol: 100.0 * tol * scale,
        });
    }
    let m_sym = (m + m.transpose()) * 0.5;

    let (m_half, m_inv_half) = spd_sqrt_pair(&m_sym, tol)?;
    let j = standard_j(n);
    let k_raw = &m_half * &j * &m_half;
    // K is skew by construction; fold roundoff asymmetry away exactly.
    let k = (&k_raw - k_raw.transpose()) * 0.5;
    let w_raw = -(&k * &k);
    let w_mat = (&w_raw + w_raw.transpose()) * 0.5;

    let eig = nalgebra::SymmetricEigen::new(w_mat);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues are finite")
    });

    // Group the squared frequencies into clusters; each true mode occupies
    // a two-dimensional K-invariant plane, so clusters have even size.
    let cluster_tol = 1e-8 * eig.eigenvalues[order[0]].abs().max(1.0);
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        match clusters.last_mut() {
            Some(cluster)
                if (eig.eigenvalues[*cluster.last().unwrap()] - eig.eigenvalues[idx]).abs()
                    <= cluster_tol =>
            {
                cluster.push(idx);
            }
            _ => clusters.push(vec![idx]),
        }
    }

    let mut modes: Vec<(f64, DVector<f64>, DVector<f64>)> = Vec::with_capacity(n);
    for cluster in clusters {
        let mut basis: Vec<DVector<f64>> = cluster
            .iter()
            .map(|&idx| eig.eigenvectors.column(idx).into_owned())
            .collect();
        while let Some(u) = basis.first().cloned() {
            let ku = -(&k * &u);
            let lam = ku.norm();
            if !(lam > tol) {
                return Err(Error::VerificationFailed {
                    what: "williamson modal frequency collapsed to zero".into(),
                    residual: lam,
                    tol,
                });
            }
            let w_vec = ku / lam;
            modes.push((lam, u.clone(), w_vec.clone()));
            // Deflate span{u, w} out of the remaining cluster basis.
            let mut next: Vec<DVector<f64>> = Vec::with_capacity(basis.len().saturating_sub(1));
            for v in basis.iter().skip(1) {
                let mut r = v.clone();
                r -= &u * u.dot(v);
                r -= &w_vec * w_vec.dot(v);
                for kept in &next {
                    let c = kept.dot(&r);
                    r -= kept * c;
                }
                let norm = r.norm();
                if norm > 0.3 {
                    next.push(r / norm);
                }
            }
            basis = next;
        }
    }
    if modes.len() != n {
        return Err(Error::VerificationFailed {
            what: format!(
                "williamson pairing produced {} modes instead of {n}",
                modes.len()
            ),
            residual: modes.len() as f64,
            tol: n as f64,
        });
    }
    modes.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("frequencies are finite"));

    let mut o = DMatrix::<f64>::zeros(2 * n, 2 * n);
    let mut lambda = Vec::with_capacity(n);
    for (jj, (lam, u, w_vec)) in modes.iter().enumerate() {
        lambda.push(*lam);
        o.column_mut(jj).copy_from(u);
        o.column_mut(n + jj).copy_from(w_vec);
    }
    let ortho_res = max_abs(&(o.transpose() * &o - DMatrix::<f64>::identity(2 * n, 2 * n)));
    if ortho_res > tol {
        return Err(Error::VerificationFailed {
            what: "williamson internal frame lost orthogonality".into(),
            residual: ortho_res,
            tol,
        });
    }

    let mut stretch = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for (jj, &l) in lambda.iter().enumerate() {
        stretch[(jj, jj)] = l.sqrt();
        stretch[(n + jj, n + jj)] = l.sqrt();
    }
    let s_mat = &m_inv_half * &o * stretch;
    let s = SymplecticMatrix::new(s_mat, tol)?;

    let mut d_target = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for (jj, &l) in lambda.iter().enumerate() {
        d_target[(jj, jj)] = l;
        d_target[(n + jj, n + jj)] = l;
    }
    let diag_res = max_abs(&(s.matrix().transpose() * &m_sym * s.matrix() - d_target));
    if diag_res > tol {
        return Err(Error::VerificationFailed {
            what: "williamson diagonalization residual".into(),
            residual: diag_res,
            tol,
        });
    }

    let mut near_degenerate = Vec::new();
    for jj in 0..n.saturating_sub(1) {
        if (lambda[jj] - lambda[jj + 1]).abs() < tol {
            near_degenerate.push((jj, jj + 1));
        }
    }

    Ok(WilliamsonDecomposition {
        s,
        lambda,
        near_degenerate,
        tol,
    })
}

/// Evaluate `exp(t J M)` from a decomposition of `M`, using only
/// per-mode sines and cosines:
/// `J (S^{-1})^T [[sin(L t), -cos(L t)], [cos(L t), sin(L t)]] S^{-1}`.
pub fn exp_from_decomposition(
    decomp: &WilliamsonDecomposition,
    t: f64,
) -> Result<SymplecticMatrix> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "flow time must be finite, got {t}"
        )));
    }
    let n = decomp.lambda.len();
    let mut core = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for (jj, &l) in decomp.lambda.iter().enumerate() {
        let (s, c) = (l * t).sin_cos();
        core[(jj, jj)] = s;
        core[(n + jj, n + jj)] = s;
        core[(jj, n + jj)] = -c;
        core[(n + jj, jj)] = c;
    }
    let s_inv = decomp.s.symplectic_inverse();
    let flow = standard_j(n) * s_inv.matrix().transpose() * core * s_inv.matrix();
    let tol = 1e-8 * max_abs(&flow).max(1.0);
    SymplecticMatrix::new(flow, tol)
}

/// Convenience wrapper: diagonalize `M` and evaluate `exp(t J M)`.
pub fn exp_via_williamson(m: &DMatrix<f64>, t: f64, tol: f64) -> Result<SymplecticMatrix> {
    let decomp = williamson(m, tol)?;
    exp_from_decomposition(&decomp, t)
}

/// The explicit symplectic eigenbasis of the two-dimensional cross-term
/// model with Hamiltonian matrix
/// `M = [[m w^2, 0, 0, 0], [0, m w^2, th, 0], [0, th, 1/m, 0], [0, 0, 0, 1/m]]`.
///
/// Its modal frequencies are `lambda_1 = sqrt(w (w + th))` and
/// `lambda_2 = sqrt(w (w - th))`, and the basis columns below satisfy
/// `X (e_j + i f_j) = i lambda_j (e_j + i f_j)` for `X = J M`, i.e.
/// `X e_j = -lambda_j f_j` and `X f_j = lambda_j e_j`.
#[derive(Clone, Debug)]
pub struct CrossTermBasis {
    s: SymplecticMatrix,
    lambda1: f64,
    lambda2: f64,
}

impl CrossTermBasis {
    /// Basis columns assembled as `S = [e_1 | e_2 | f_1 | f_2]`.
    pub fn s(&self) -> &SymplecticMatrix {
        &self.s
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    pub fn e1(&self) -> DVector<f64> {
        self.s.matrix().column(0).into_owned()
    }

    pub fn e2(&self) -> DVector<f64> {
        self.s.matrix().column(1).into_owned()
    }

    pub fn f1(&self) -> DVector<f64> {
        self.s.matrix().column(2).into_owned()
    }

    pub fn f2(&self) -> DVector<f64> {
        self.s.matrix().column(3).into_owned()
    }

    /// Flow `exp(t J M)` of the cross-term model through the explicit
    /// basis, without any matrix exponential.
    pub fn flow(&self, t: f64) -> Result<SymplecticMatrix> {
        let decomp = WilliamsonDecomposition {
            s: self.s.clone(),
            lambda: vec![self.lambda1, self.lambda2],
            near_degenerate: if (self.lambda1 - self.lambda2).abs() < DEFAULT_WILLIAMSON_TOL {
                vec![(0, 1)]
            } else {
                vec![]
            },
            tol: DEFAULT_WILLIAMSON_TOL,
        };
        exp_from_decomposition(&decomp, t)
    }
}

/// Build the explicit cross-term eigenbasis. Requires `mass > 0`,
/// `omega > 0` and `|theta| < omega` (the coupling must not overwhelm the
/// restoring force, or the model loses positive definiteness).
pub fn cross_term_basis(mass: f64, omega: f64, theta: f64) -> Result<CrossTermBasis> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "mass must be positive and finite, got {mass}"
        )));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "omega must be positive and finite, got {omega}"
        )));
    }
    if !(theta.abs() < omega) {
        return Err(Error::InvalidArgument(format!(
            "cross coupling must satisfy |theta| < omega, got theta = {theta}, omega = {omega}"
        )));
    }
    let lambda1 = (omega * (omega + theta)).sqrt();
    let lambda2 = (omega * (omega - theta)).sqrt();

    let e1 = DVector::from_vec(vec![-1.0 / (mass * omega), 0.0, 0.0, 1.0])
        * (mass * lambda1 / 2.0).sqrt();
    let f1 = DVector::from_vec(vec![0.0, -1.0 / mass, -omega, 0.0])
        * (mass / (2.0 * lambda1)).sqrt();
    let e2 = DVector::from_vec(vec![-1.0 / (mass * omega), 0.0, 0.0, -1.0])
        * (mass * lambda2 / 2.0).sqrt();
    let f2 = DVector::from_vec(vec![0.0, 1.0 / mass, -omega, 0.0])
        * (mass / (2.0 * lambda2)).sqrt();

    let mut s_mat = DMatrix::<f64>::zeros(4, 4);
    s_mat.column_mut(0).copy_from(&e1);
    s_mat.column_mut(1).copy_from(&e2);
    s_mat.column_mut(2).copy_from(&f1);
    s_mat.column_mut(3).copy_from(&f2);
    let s = SymplecticMatrix::new(s_mat, DEFAULT_WILLIAMSON_TOL)?;
    Ok(CrossTermBasis {
        s,
        lambda1,
        lambda2,
    })
}

/// Hamiltonian matrix of the cross-term model (shared with the presets).
pub fn cross_term_matrix(mass: f64, omega: f64, theta: f64) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::zeros(4, 4);
    m[(0, 0)] = mass * omega * omega;
    m[(1, 1)] = mass * omega * omega;
    m[(1, 2)] = theta;
    m[(2, 1)] = theta;
    m[(2, 2)] = 1.0 / mass;
    m[(3, 3)] = 1.0 / mass;
    m
}
