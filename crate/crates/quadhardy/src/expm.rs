//! Dense matrix exponential via scaling-and-squaring with a degree-13
//! diagonal Padé approximant.
//!
//! The scaling power is chosen from the 1-norm of the input so that the
//! scaled matrix lies inside the approximant's accuracy region; the result
//! is then squared back. This is the standard double-precision scheme and
//! is backward stable for the small dense matrices this crate works with.

use nalgebra::{DMatrix, LU};

use crate::error::{Error, Result};

/// 1-norm bound under which the degree-13 approximant is accurate to
/// double-precision roundoff.
const THETA_13: f64 = 5.371_920_351_148_152;

/// Numerator coefficients of the degree-13 diagonal Padé approximant.
const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Maximum absolute column sum.
fn one_norm(m: &DMatrix<f64>) -> f64 {
    let mut best = 0.0f64;
    for c in 0..m.ncols() {
        let s: f64 = m.column(c).iter().map(|x| x.abs()).sum();
        best = best.max(s);
    }
    best
}

/// Matrix exponential of a square real matrix.
///
/// Errors on non-square or non-finite input, and on overflow in the
/// squaring phase (entries leaving the finite range).
pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expm expects a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericOverflow(
            "expm input contains non-finite entries".into(),
        ));
    }
    let dim = a.nrows();
    if dim == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }

    let norm = one_norm(a);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * 0.5f64.powi(s);

    let eye = DMatrix::<f64>::identity(dim, dim);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let b = &PADE_13;
    let u_poly = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &eye * b[1];
    let u = &scaled * u_poly;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &eye * b[0];

    let lu = LU::new(&v - &u);
    let mut r = lu.solve(&(&v + &u)).ok_or_else(|| {
        Error::NumericOverflow("expm Padé denominator is numerically singular".into())
    })?;
    for _ in 0..s {
        r = &r * &r;
    }
    if r.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericOverflow(
            "expm result overflowed during squaring".into(),
        ));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent reference: Taylor series on a pre-scaled matrix,
    /// squared back. Slow but trivially correct for moderate norms.
    fn expm_taylor(a: &DMatrix<f64>) -> DMatrix<f64> {
        let dim = a.nrows();
        let k = 10;
        let scaled = a * 0.5f64.powi(k);
        let mut term = DMatrix::<f64>::identity(dim, dim);
        let mut sum = DMatrix::<f64>::identity(dim, dim);
        for j in 1..30 {
            term = &term * &scaled / (j as f64);
            sum += &term;
        }
        let mut r = sum;
        for _ in 0..k {
            r = &r * &r;
        }
        r
    }

    fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).amax()
    }

    #[test]
    fn exponential_of_zero_is_identity() {
        let z = DMatrix::<f64>::zeros(3, 3);
        let e = expm(&z).unwrap();
        assert_eq!(e, DMatrix::<f64>::identity(3, 3));
    }

    #[test]
    fn exponential_of_nilpotent_shear() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let e = expm(&a).unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(max_abs_diff(&e, &want) < 1e-14, "shear exponential wrong");
    }

    #[test]
    fn exponential_of_large_nilpotent_uses_scaling() {
        // 1-norm is 100, forcing several squaring steps; result stays exact.
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 100.0, 0.0, 0.0]);
        let e = expm(&a).unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[1.0, 100.0, 0.0, 1.0]);
        assert!(max_abs_diff(&e, &want) < 1e-10, "scaled shear wrong");
    }

    #[test]
    fn exponential_of_diagonal_matrix() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            2.0f64.ln(),
            3.0f64.ln(),
        ]));
        let e = expm(&a).unwrap();
        let want = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 3.0]));
        assert!(max_abs_diff(&e, &want) < 1e-13, "diagonal exponential wrong");
    }

    #[test]
    fn exponential_of_rotation_generator() {
        let th = 0.7f64;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -th, th, 0.0]);
        let e = expm(&a).unwrap();
        let want =
            DMatrix::from_row_slice(2, 2, &[th.cos(), -th.sin(), th.sin(), th.cos()]);
        assert!(max_abs_diff(&e, &want) < 1e-14, "rotation exponential wrong");
    }

    #[test]
    fn matches_taylor_reference_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..20 {
            let a = DMatrix::from_fn(6, 6, |_, _| rng.random_range(-0.5..0.5));
            let e = expm(&a).unwrap();
            let want = expm_taylor(&a);
            assert!(
                max_abs_diff(&e, &want) < 1e-12,
                "trial {trial}: Padé and Taylor exponentials disagree"
            );
        }
    }

    #[test]
    fn inverse_flow_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
        let e_plus = expm(&a).unwrap();
        let e_minus = expm(&(-&a)).unwrap();
        let prod = &e_plus * &e_minus;
        assert!(
            max_abs_diff(&prod, &DMatrix::identity(4, 4)) < 1e-12,
            "exp(A) exp(-A) should be the identity"
        );
    }

    #[test]
    fn rejects_non_finite_input() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, f64::NAN, 0.0, 0.0]);
        assert!(matches!(expm(&a), Err(Error::NumericOverflow(_))));
    }

    #[test]
    fn rejects_non_square_input() {
        let a = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(expm(&a), Err(Error::DimensionMismatch(_))));
    }
}
