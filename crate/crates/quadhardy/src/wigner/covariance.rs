//! Covariance of the Wigner transform under quadratic evolution.
//!
//! The defining property being verified: evolving a state `u` through the
//! quantum propagator of a quadratic Hamiltonian and taking its Wigner
//! transform gives the same function as transporting the initial Wigner
//! transform along the classical flow,
//!
//! ```text
//! W(u_t)(z) = W(u_0)(S_t^{-1} z).
//! ```
//!
//! The check evolves the state with the quadratic-kernel integral
//! transform (left side) and pulls back the initial grid through the
//! inverse flow matrix (right side). Pulled-back points rarely land on
//! lattice nodes, so the right side is sampled from a momentum-refined
//! grid by bilinear interpolation.
//!
//! Resolution note: on a 512-sample window of extent 12 the native
//! momentum spacing is `pi/12 ~ 0.262`, and bilinear interpolation of the
//! Gaussian Wigner function at that spacing carries errors near `1e-2` —
//! an order above the `1e-3` agreement the transforms themselves achieve.
//! The momentum axis of the right-hand grid is therefore refined eightfold
//! (spacing `pi/96`), which brings the interpolation error down to the
//! `1e-4` scale; the refinement subdivides the same transform, adding no
//! new assumptions.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::QuadraticHamiltonian;
use crate::wigner::qft::{default_branch_index, quadratic_fourier_1d};
use crate::wigner::{cross_wigner_refined, GridSpec, WignerGrid};

/// Momentum-axis refinement applied to the pulled-back reference grid.
const REFERENCE_XI_REFINE: usize = 8;

/// Outcome of a covariance comparison.
#[derive(Clone, Copy, Debug)]
pub struct CovarianceReport {
    /// Largest pointwise discrepancy over the compared window.
    pub max_error: f64,
    /// Number of lattice points compared.
    pub compared_points: usize,
    /// Phase-space location of the worst discrepancy.
    pub worst_x: f64,
    /// Momentum coordinate of the worst discrepancy.
    pub worst_xi: f64,
}

/// Bilinear sample of a real Wigner grid at an off-lattice point; points
/// outside the grid evaluate to zero (the states compared here decay well
/// inside the window, which the aliasing guards enforce).
fn sample_bilinear(grid: &WignerGrid, values: &[f64], x: f64, xi: f64) -> f64 {
    let spec = grid.spec();
    let n = spec.samples();
    let bins = grid.xi_bins();
    let fx = x / spec.dx() + (n / 2) as f64;
    let fy = xi / grid.dxi_eff() + (bins / 2) as f64;
    if fx < 0.0 || fy < 0.0 {
        return 0.0;
    }
    let ix = fx.floor() as usize;
    let iy = fy.floor() as usize;
    if ix + 1 >= n || iy + 1 >= bins {
        return 0.0;
    }
    let tx = fx - ix as f64;
    let ty = fy - iy as f64;
    let v00 = values[ix * bins + iy];
    let v01 = values[ix * bins + iy + 1];
    let v10 = values[(ix + 1) * bins + iy];
    let v11 = values[(ix + 1) * bins + iy + 1];
    v00 * (1.0 - tx) * (1.0 - ty)
        + v01 * (1.0 - tx) * ty
        + v10 * tx * (1.0 - ty)
        + v11 * tx * ty
}

/// Verify Wigner covariance for one state, one Hamiltonian, and one time.
///
/// The comparison runs over the inner half-window (indices `[N/4, 3N/4)`
/// on both axes): the outer region mixes truncation tails of both grids
/// and carries no information about the mechanism being checked.
///
/// At `t = 0` the flow has no transverse block and the propagator is the
/// identity; the comparison then degenerates to the interpolation error of
/// the grid against itself. For any other time the flow must have an
/// invertible transverse block, otherwise [`Error::NotFree`] is returned.
pub fn covariance_check(
    u0: &[Complex64],
    h: &QuadraticHamiltonian,
    t: f64,
    spec: &GridSpec,
) -> Result<CovarianceReport> {
    if h.dim_n() != 1 {
        return Err(Error::InvalidArgument(
            "the sampled covariance check is defined for one degree of freedom".into(),
        ));
    }
    if (spec.hbar() - h.hbar()).abs() > 1e-15 * h.hbar() {
        return Err(Error::InvalidArgument(format!(
            "grid hbar = {} disagrees with Hamiltonian hbar = {}",
            spec.hbar(),
            h.hbar()
        )));
    }

    // Left side: evolve the state, then transform.
    let (u_t, s_inv) = if t == 0.0 {
        (
            u0.to_vec(),
            crate::symplectic::SymplecticMatrix::identity(1),
        )
    } else {
        let flow = h.flow_at(t)?;
        let check = flow.s_t.is_free(None);
        if !check.is_free {
            return Err(Error::NotFree {
                det_b_abs: check.det_b.abs(),
                floor: check.floor,
            });
        }
        let w = flow.s_t.to_generating(None)?;
        let evolved = quadratic_fourier_1d(u0, &w, default_branch_index(w.det_l()), spec)?;
        (evolved, flow.s_t.symplectic_inverse())
    };
    let lhs = cross_wigner_refined(&u_t, &u_t, spec, 1)?;

    // Right side: initial Wigner grid, momentum-refined for interpolation.
    let rhs = self_wigner_refined_for_reference(u0, spec)?;
    let rhs_values = rhs.real_values()?;

    let n = spec.samples();
    let bins = lhs.xi_bins();
    let s = s_inv.matrix();
    let mut report = CovarianceReport {
        max_error: 0.0,
        compared_points: 0,
        worst_x: 0.0,
        worst_xi: 0.0,
    };
    for i in n / 4..3 * n / 4 {
        let x = spec.x_at(i);
        for j in bins / 4..3 * bins / 4 {
            let xi = lhs.xi_at(j);
            let z = s * DVector::from_vec(vec![x, xi]);
            let want = sample_bilinear(&rhs, &rhs_values, z[0], z[1]);
            let got = lhs.value(i, j).re;
            let err = (got - want).abs();
            report.compared_points += 1;
            if err > report.max_error {
                report.max_error = err;
                report.worst_x = x;
                report.worst_xi = xi;
            }
        }
    }
    Ok(report)
}

fn self_wigner_refined_for_reference(u0: &[Complex64], spec: &GridSpec) -> Result<WignerGrid> {
    crate::wigner::self_wigner_refined(u0, spec, REFERENCE_XI_REFINE)
}
