//! Discrete phase-space transforms: cross-Wigner grids, Gaussian states,
//! quadratic-kernel integral transforms, and the covariance check that
//! ties the quantum evolution to the classical flow.
//!
//! The cross-Wigner transform used throughout is
//!
//! ```text
//! W(f, g)(x, xi) = (2 pi hbar)^{-n} Int e^{-i xi y / hbar}
//!                  f(x + y/2) conj(g(x - y/2)) dy.
//! ```
//!
//! On a lattice `x_i = (i - N/2) dx` with `dx = extent / N`, the inner
//! integral is sampled at `y_m = 2 m dx` (so the half-shifts stay on the
//! lattice) and evaluated by FFT. The resulting momentum lattice has
//! spacing `dxi = pi hbar / extent`, independent of `N`; finer momentum
//! sampling of the *same* transform is available by zero-padding the `y`
//! array (`xi_refine`), which subdivides `dxi` without changing the span.

pub mod covariance;
pub mod gaussian;
pub mod io;
pub mod qft;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

pub use covariance::{covariance_check, CovarianceReport};
pub use gaussian::{hardy_saturation_probe, propagate_gaussian, GaussianState};
pub use qft::{default_branch_index, quadratic_fourier_1d};

/// Lattice description for sampled states and phase-space grids.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    dim_n: usize,
    extent: f64,
    samples: usize,
    hbar: f64,
}

impl GridSpec {
    /// `extent` is the full width of the position window per axis, sampled
    /// at `samples` points (a power of two, at least 64). `dim_n` may be 1
    /// or 2; the FFT-based transforms operate on one-dimensional grids,
    /// while two-dimensional specs serve analytic Gaussian evaluation.
    pub fn new(dim_n: usize, extent: f64, samples: usize, hbar: f64) -> Result<Self> {
        if dim_n == 0 || dim_n > 2 {
            return Err(Error::InvalidArgument(format!(
                "grid dimension must be 1 or 2, got {dim_n}"
            )));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid extent must be positive and finite, got {extent}"
            )));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "hbar must be positive and finite, got {hbar}"
            )));
        }
        if samples < 64 || !samples.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "samples per axis must be a power of two >= 64, got {samples}"
            )));
        }
        Ok(Self {
            dim_n,
            extent,
            samples,
            hbar,
        })
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Position spacing `extent / samples`.
    pub fn dx(&self) -> f64 {
        self.extent / self.samples as f64
    }

    /// Base momentum spacing `pi hbar / extent` of the Wigner lattice.
    pub fn dxi(&self) -> f64 {
        std::f64::consts::PI * self.hbar / self.extent
    }

    /// `i`-th position node `(i - N/2) dx`.
    pub fn x_at(&self, i: usize) -> f64 {
        (i as f64 - (self.samples / 2) as f64) * self.dx()
    }

    /// `j`-th momentum node of the unrefined lattice.
    pub fn xi_at(&self, j: usize) -> f64 {
        (j as f64 - (self.samples / 2) as f64) * self.dxi()
    }

    /// All position nodes.
    pub fn x_axis(&self) -> Vec<f64> {
        (0..self.samples).map(|i| self.x_at(i)).collect()
    }

    /// Sample a one-dimensional function on the position lattice.
    pub fn sample_fn<F: Fn(f64) -> Complex64>(&self, f: F) -> Result<Vec<Complex64>> {
        if self.dim_n != 1 {
            return Err(Error::InvalidArgument(
                "function sampling is defined for one-dimensional grids".into(),
            ));
        }
        Ok((0..self.samples).map(|i| f(self.x_at(i))).collect())
    }
}

/// A sampled (cross-)Wigner distribution over the phase-space lattice.
///
/// Values are stored row-major: `values[i * xi_bins + j]` is the value at
/// `(x_i, xi_j)`. Self-pairs (`W(f, f)`) are real up to roundoff and are
/// flagged as such at construction.
#[derive(Clone, Debug)]
pub struct WignerGrid {
    spec: GridSpec,
    xi_refine: usize,
    values: Vec<Complex64>,
    self_pair: bool,
}

impl WignerGrid {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Momentum-axis oversampling factor relative to the base lattice.
    pub fn xi_refine(&self) -> usize {
        self.xi_refine
    }

    /// Number of momentum bins (`samples * xi_refine`).
    pub fn xi_bins(&self) -> usize {
        self.spec.samples * self.xi_refine
    }

    /// Effective momentum spacing `dxi / xi_refine`.
    pub fn dxi_eff(&self) -> f64 {
        self.spec.dxi() / self.xi_refine as f64
    }

    /// Momentum value at bin `j` (bins cover the same span at any refine).
    pub fn xi_at(&self, j: usize) -> f64 {
        (j as f64 - (self.xi_bins() / 2) as f64) * self.dxi_eff()
    }

    /// Whether this grid is a self-pair `W(f, f)` (real-valued).
    pub fn is_self_pair(&self) -> bool {
        self.self_pair
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.xi_bins() + j]
    }

    /// Largest `|Im|` over the grid relative to the largest `|value|`.
    pub fn relative_imag(&self) -> f64 {
        let max_abs = self
            .values
            .iter()
            .fold(0.0f64, |a, v| a.max(v.norm()));
        if max_abs == 0.0 {
            return 0.0;
        }
        let max_im = self.values.iter().fold(0.0f64, |a, v| a.max(v.im.abs()));
        max_im / max_abs
    }

    /// Real parts; errors unless the grid is a self-pair.
    pub fn real_values(&self) -> Result<Vec<f64>> {
        if !self.self_pair {
            return Err(Error::InvalidArgument(
                "only self-pair Wigner grids are real-valued".into(),
            ));
        }
        Ok(self.values.iter().map(|v| v.re).collect())
    }

    /// Momentum-integrated marginal `Int W dxi`, one value per `x_i`.
    /// For a self-pair this reproduces `|f(x_i)|^2` exactly on the lattice.
    pub fn position_marginal(&self) -> Vec<Complex64> {
        let bins = self.xi_bins();
        let w = Complex64::new(self.dxi_eff(), 0.0);
        (0..self.spec.samples)
            .map(|i| {
                let row = &self.values[i * bins..(i + 1) * bins];
                w * row.iter().sum::<Complex64>()
            })
            .collect()
    }

    /// Full phase-space integral `Int Int W dx dxi`; equals `<f, g>` for a
    /// cross pair and `||f||^2` for a self-pair.
    pub fn total_mass(&self) -> Complex64 {
        let w = Complex64::new(self.spec.dx() * self.dxi_eff(), 0.0);
        w * self.values.iter().sum::<Complex64>()
    }
}

fn wrap(k: isize, len: usize) -> usize {
    let len = len as isize;
    (((k % len) + len) % len) as usize
}

fn check_grid_input(label: &str, f: &[Complex64], spec: &GridSpec) -> Result<()> {
    if spec.dim_n != 1 {
        return Err(Error::InvalidArgument(
            "FFT-based Wigner transforms are defined on one-dimensional grids".into(),
        ));
    }
    if f.len() != spec.samples {
        return Err(Error::GridMismatch(format!(
            "{label} has {} samples but the grid expects {}",
            f.len(),
            spec.samples
        )));
    }
    if f.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NumericOverflow(format!(
            "{label} contains non-finite samples"
        )));
    }
    Ok(())
}

/// Cross-Wigner transform of two sampled functions with momentum-axis
/// oversampling. `xi_refine = 1` gives the base lattice; larger values
/// zero-pad the correlation before the FFT, subdividing the momentum
/// spacing without changing its span.
pub fn cross_wigner_refined(
    f: &[Complex64],
    g: &[Complex64],
    spec: &GridSpec,
    xi_refine: usize,
) -> Result<WignerGrid> {
    check_grid_input("f", f, spec)?;
    check_grid_input("g", g, spec)?;
    if xi_refine == 0 || xi_refine > 64 {
        return Err(Error::InvalidArgument(format!(
            "xi_refine must lie in 1..=64, got {xi_refine}"
        )));
    }
    let n = spec.samples;
    let bins = n * xi_refine;
    let half = (n / 2) as isize;
    let half_bins = (bins / 2) as isize;

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(bins);

    // y_m = 2 m dx, so dy = 2 dx and the FFT phase e^{-2 pi i j m / bins}
    // matches e^{-i xi_j y_m / hbar} exactly on the lattice.
    let prefactor = 2.0 * spec.dx() / (2.0 * std::f64::consts::PI * spec.hbar);

    let mut values = vec![Complex64::new(0.0, 0.0); n * bins];
    let mut buf = vec![Complex64::new(0.0, 0.0); bins];
    for i in 0..n {
        buf.fill(Complex64::new(0.0, 0.0));
        let ii = i as isize;
        for m in -half..half {
            let ip = ii + m;
            let im = ii - m;
            if ip >= 0 && ip < n as isize && im >= 0 && im < n as isize {
                buf[wrap(m, bins)] = f[ip as usize] * g[im as usize].conj();
            }
        }
        fft.process(&mut buf);
        let row = &mut values[i * bins..(i + 1) * bins];
        for (jj, slot) in row.iter_mut().enumerate() {
            let j = jj as isize - half_bins;
            *slot = buf[wrap(j, bins)] * prefactor;
        }
    }
    Ok(WignerGrid {
        spec: *spec,
        xi_refine,
        values,
        self_pair: false,
    })
}

/// Cross-Wigner transform on the base lattice.
pub fn cross_wigner(f: &[Complex64], g: &[Complex64], spec: &GridSpec) -> Result<WignerGrid> {
    cross_wigner_refined(f, g, spec, 1)
}

/// Wigner transform of a single state. The result is real up to roundoff;
/// that is validated (relative `1e-10`) and the grid flagged as a
/// self-pair.
pub fn self_wigner(f: &[Complex64], spec: &GridSpec) -> Result<WignerGrid> {
    self_wigner_refined(f, spec, 1)
}

/// [`self_wigner`] with momentum-axis oversampling.
pub fn self_wigner_refined(
    f: &[Complex64],
    spec: &GridSpec,
    xi_refine: usize,
) -> Result<WignerGrid> {
    let mut grid = cross_wigner_refined(f, f, spec, xi_refine)?;
    let rel = grid.relative_imag();
    if rel > 1e-10 {
        return Err(Error::VerificationFailed {
            what: "self-pair Wigner grid is not real".into(),
            residual: rel,
            tol: 1e-10,
        });
    }
    grid.self_pair = true;
    Ok(grid)
}

/// The tightest Gaussian envelope constant visible on the grid: the
/// smallest `kappa` with `|W(x, xi)| <= kappa e^{-2 alpha x^2}` over all
/// trusted lattice points, together with the point attaining it.
#[derive(Clone, Copy, Debug)]
pub struct DecayBound {
    pub kappa: f64,
    pub x: f64,
    pub xi: f64,
}

/// Default envelope floor below which lattice points are excluded from
/// decay-bound scans (the quotient `|W| e^{2 alpha x^2}` would amplify
/// grid noise beyond that).
pub const DEFAULT_ENVELOPE_FLOOR: f64 = 1e-10;

/// Measure the Gaussian-envelope constant `kappa = max |W| e^{2 alpha x^2}`
/// over the trusted window `e^{-2 alpha x^2} >= envelope_floor`.
pub fn wigner_decay_bound(
    grid: &WignerGrid,
    alpha: f64,
    envelope_floor: Option<f64>,
) -> Result<DecayBound> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "decay exponent must be positive and finite, got {alpha}"
        )));
    }
    let floor = envelope_floor.unwrap_or(DEFAULT_ENVELOPE_FLOOR);
    let bins = grid.xi_bins();
    let mut best = DecayBound {
        kappa: 0.0,
        x: 0.0,
        xi: 0.0,
    };
    let mut seen = false;
    for i in 0..grid.spec.samples {
        let x = grid.spec.x_at(i);
        let env = (-2.0 * alpha * x * x).exp();
        if env < floor {
            continue;
        }
        for j in 0..bins {
            let quotient = grid.value(i, j).norm() / env;
            if quotient > best.kappa {
                best = DecayBound {
                    kappa: quotient,
                    x,
                    xi: grid.xi_at(j),
                };
            }
            seen = true;
        }
    }
    if !seen {
        return Err(Error::InvalidArgument(
            "no lattice point lies inside the trusted envelope window".into(),
        ));
    }
    Ok(best)
}

/// Verify a claimed envelope `|W| <= kappa e^{-2 alpha x^2}` over the
/// trusted window, with relative slack. Returns the worst violation as a
/// [`Error::DecayViolation`].
pub fn verify_decay_bound(
    grid: &WignerGrid,
    alpha: f64,
    kappa: f64,
    rel_slack: f64,
    envelope_floor: Option<f64>,
) -> Result<()> {
    let measured = wigner_decay_bound(grid, alpha, envelope_floor)?;
    if measured.kappa > kappa * (1.0 + rel_slack) {
        let env = (-2.0 * alpha * measured.x * measured.x).exp();
        return Err(Error::DecayViolation {
            x: measured.x,
            xi: measured.xi,
            wigner_abs: measured.kappa * env,
            bound: kappa * (1.0 + rel_slack) * env,
        });
    }
    Ok(())
}
