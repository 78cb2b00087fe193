//! JSON run configuration: schema, parsing, and validation.
//!
//! A run is described by a single JSON document selecting a Hamiltonian
//! (either a named preset or an explicit matrix), physical constants, a
//! decay pair, and either one time or a time grid. Validation resolves
//! the document into concrete model objects and reports every violation
//! as a configuration error, which the process maps to exit code 2.

use nalgebra::DMatrix;
use quadhardy::hamiltonian::{
    CrossTermParams, FlowPoint, FreeParams, OscillatorParams, Preset, QuadraticHamiltonian,
};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Reasons a run cannot proceed, mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Unusable configuration, input, or output destination (exit 2).
    Config(String),
    /// A computation failed numerically (exit 3).
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Numeric(msg) => write!(f, "numeric error: {msg}"),
        }
    }
}

/// Top-level run configuration document.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub hamiltonian: HamiltonianConfig,
    /// Planck constant over 2 pi; defaults to 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    /// Unit convention. `ekpv` pins `mass = 1/2, hbar = 1` and therefore
    /// only combines with presets whose parameters do not contradict it.
    #[serde(default)]
    pub normalization: Normalization,
    pub decay: DecayConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

/// Exactly one of `preset` / `matrix` must be present.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<PresetConfig>,
    /// Row-major symmetric Hamiltonian matrix of even dimension `2n`,
    /// ordered (positions, momenta).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
}

/// Named model Hamiltonians.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PresetConfig {
    /// `H = |p|^2 / (2m)`.
    Free {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mass: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim_n: Option<usize>,
    },
    /// Decoupled modes `H = |p|^2/(2m) + (m/2) sum omega_j^2 x_j^2`;
    /// negative `omega_sq` entries give inverted (hyperbolic) modes.
    Oscillator {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mass: Option<f64>,
        omega_sq: Vec<f64>,
    },
    /// Two equal-frequency oscillators coupled by `theta x_2 p_1`.
    CrossTerm {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mass: Option<f64>,
        omega: f64,
        theta: f64,
    },
}

/// Unit convention for the run.
#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Take `hbar` and masses exactly as configured.
    #[default]
    Physical,
    /// The convention `mass = 1/2, hbar = 1`.
    Ekpv,
}

impl Normalization {
    pub fn as_str(&self) -> &'static str {
        match self {
            Normalization::Physical => "physical",
            Normalization::Ekpv => "ekpv",
        }
    }
}

/// Two-sided Gaussian decay hypothesis: `|u_0| <= K e^{-alpha x^2}` and
/// `|u_T| <= K e^{-beta x^2}`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub alpha: f64,
    pub beta: f64,
    /// Common amplitude `K`; defaults to 1 (it never affects the verdict).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
}

/// Exactly one of `single` / `sweep` must be present.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub single: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

/// Uniform time grid `start + k (stop - start) / (steps - 1)`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

/// Numeric knobs with working defaults; every field may be overridden.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Residual bound for symplectic validation.
    pub symplectic: f64,
    /// Inner-window bound for the grid covariance checks.
    pub covariance: f64,
    /// Samples per axis for grid checks (power of two, at least 64).
    pub grid_samples: usize,
    /// Full position-window width for grid checks.
    pub grid_extent: f64,
    /// Residual bound for the block-identity suite.
    pub z_reduction: f64,
    /// Number of seeded random maps in the block-identity suite.
    pub z_reduction_seeds: u64,
    /// Override for the `|det B|` floor in free/not-free classification.
    pub singular_floor: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            symplectic: 1e-9,
            covariance: 1e-3,
            grid_samples: 512,
            grid_extent: 12.0,
            z_reduction: 1e-8,
            z_reduction_seeds: 100,
            singular_floor: None,
        }
    }
}

/// Default output destination and format (command-line flags win).
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Time selection after validation.
#[derive(Clone, Copy, Debug)]
pub enum TimeSpec {
    Single(f64),
    Sweep { start: f64, stop: f64, steps: usize },
}

impl TimeSpec {
    /// The evaluation times, ascending.
    pub fn times(&self) -> Vec<f64> {
        match *self {
            TimeSpec::Single(t) => vec![t],
            TimeSpec::Sweep { start, stop, steps } => (0..steps)
                .map(|k| start + (stop - start) * k as f64 / (steps - 1) as f64)
                .collect(),
        }
    }
}

/// A fully validated run: concrete model objects plus echo data.
#[derive(Debug)]
pub struct Resolved {
    /// Present when the Hamiltonian is a named preset (closed-form flows).
    pub preset: Option<Preset>,
    pub hamiltonian: QuadraticHamiltonian,
    /// Original matrix rows when the Hamiltonian was given explicitly.
    pub matrix_rows: Option<Vec<Vec<f64>>>,
    pub hbar: f64,
    pub normalization: Normalization,
    pub alpha: f64,
    pub beta: f64,
    pub amplitude: f64,
    pub time: TimeSpec,
    pub tolerances: Tolerances,
    pub output: Option<OutputConfig>,
}

impl Resolved {
    /// Flow matrix at time `t`: closed form for presets, matrix
    /// exponential for explicit Hamiltonians.
    pub fn flow(&self, t: f64) -> Result<FlowPoint, CliError> {
        let res = match &self.preset {
            Some(p) => p.closed_form_flow(t),
            None => self.hamiltonian.flow_at(t),
        };
        res.map_err(|e| CliError::Numeric(format!("flow at t = {t}: {e}")))
    }
}

fn require_positive(name: &str, value: f64) -> Result<f64, CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(CliError::Config(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

fn resolve_preset(
    cfg: &PresetConfig,
    normalization: Normalization,
    default_mass: f64,
) -> Result<Preset, CliError> {
    let pick_mass = |m: &Option<f64>| -> Result<f64, CliError> {
        match (normalization, m) {
            (Normalization::Ekpv, Some(v)) if *v != 0.5 => Err(CliError::Config(format!(
                "normalization 'ekpv' pins mass = 0.5 but the preset sets mass = {v}"
            ))),
            (Normalization::Ekpv, _) => Ok(0.5),
            (Normalization::Physical, Some(v)) => require_positive("mass", *v),
            (Normalization::Physical, None) => Ok(default_mass),
        }
    };
    Ok(match cfg {
        PresetConfig::Free { mass, dim_n } => Preset::Free(FreeParams {
            mass: pick_mass(mass)?,
            dim_n: dim_n.unwrap_or(1),
        }),
        PresetConfig::Oscillator { mass, omega_sq } => Preset::Oscillator(OscillatorParams {
            mass: pick_mass(mass)?,
            omega_sq: omega_sq.clone(),
        }),
        PresetConfig::CrossTerm { mass, omega, theta } => Preset::CrossTerm(CrossTermParams {
            mass: pick_mass(mass)?,
            omega: *omega,
            theta: *theta,
        }),
    })
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, CliError> {
    let dim = rows.len();
    if dim == 0 || dim % 2 != 0 {
        return Err(CliError::Config(format!(
            "explicit Hamiltonian matrix must have even positive dimension, got {dim} rows"
        )));
    }
    let mut flat = Vec::with_capacity(dim * dim);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(CliError::Config(format!(
                "matrix row {i} has {} entries, expected {dim}",
                row.len()
            )));
        }
        flat.extend_from_slice(row);
    }
    if flat.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Config(
            "explicit Hamiltonian matrix contains non-finite entries".into(),
        ));
    }
    Ok(DMatrix::from_row_slice(dim, dim, &flat))
}

/// Validate a parsed document and resolve it into model objects.
pub fn validate(config: RunConfig) -> Result<Resolved, CliError> {
    // Physical constants under the chosen normalization.
    let hbar = match (config.normalization, config.hbar) {
        (Normalization::Ekpv, Some(v)) if v != 1.0 => {
            return Err(CliError::Config(format!(
                "normalization 'ekpv' pins hbar = 1 but the config sets hbar = {v}"
            )));
        }
        (Normalization::Ekpv, _) => 1.0,
        (Normalization::Physical, Some(v)) => require_positive("hbar", v)?,
        (Normalization::Physical, None) => 1.0,
    };

    // Hamiltonian: exactly one source.
    let (preset, hamiltonian, matrix_rows) = match (
        &config.hamiltonian.preset,
        &config.hamiltonian.matrix,
    ) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "hamiltonian sets both 'preset' and 'matrix'; choose exactly one".into(),
            ));
        }
        (None, None) => {
            return Err(CliError::Config(
                "hamiltonian must set exactly one of 'preset' or 'matrix'".into(),
            ));
        }
        (Some(p), None) => {
            let preset = resolve_preset(p, config.normalization, 1.0)?;
            let h = preset
                .hamiltonian(hbar)
                .map_err(|e| CliError::Config(format!("invalid preset: {e}")))?;
            (Some(preset), h, None)
        }
        (None, Some(rows)) => {
            if config.normalization == Normalization::Ekpv {
                return Err(CliError::Config(
                    "normalization 'ekpv' fixes preset parameters and cannot apply to an \
                     explicit matrix; use 'physical' and scale the matrix yourself"
                        .into(),
                ));
            }
            let m = matrix_from_rows(rows)?;
            let h = QuadraticHamiltonian::new(m, hbar)
                .map_err(|e| CliError::Config(format!("invalid Hamiltonian matrix: {e}")))?;
            (None, h, Some(rows.clone()))
        }
    };

    // Decay pair.
    let alpha = require_positive("decay.alpha", config.decay.alpha)?;
    let beta = require_positive("decay.beta", config.decay.beta)?;
    let amplitude = match config.decay.amplitude {
        Some(v) => require_positive("decay.amplitude", v)?,
        None => 1.0,
    };

    // Time selection: exactly one mode.
    let time = match (config.time.single, &config.time.sweep) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "time sets both 'single' and 'sweep'; choose exactly one".into(),
            ));
        }
        (None, None) => {
            return Err(CliError::Config(
                "time must set exactly one of 'single' or 'sweep'".into(),
            ));
        }
        (Some(t), None) => {
            if !t.is_finite() {
                return Err(CliError::Config(format!("time.single must be finite, got {t}")));
            }
            TimeSpec::Single(t)
        }
        (None, Some(sweep)) => {
            if !sweep.start.is_finite() || !sweep.stop.is_finite() {
                return Err(CliError::Config(
                    "time.sweep endpoints must be finite".into(),
                ));
            }
            if sweep.steps < 2 {
                return Err(CliError::Config(format!(
                    "time.sweep.steps must be at least 2, got {}",
                    sweep.steps
                )));
            }
            if !(sweep.start < sweep.stop) {
                return Err(CliError::Config(format!(
                    "time.sweep must be ascending: start = {}, stop = {}",
                    sweep.start, sweep.stop
                )));
            }
            TimeSpec::Sweep {
                start: sweep.start,
                stop: sweep.stop,
                steps: sweep.steps,
            }
        }
    };

    // Tolerances.
    let tol = &config.tolerances;
    require_positive("tolerances.symplectic", tol.symplectic)?;
    require_positive("tolerances.covariance", tol.covariance)?;
    require_positive("tolerances.grid_extent", tol.grid_extent)?;
    require_positive("tolerances.z_reduction", tol.z_reduction)?;
    if tol.grid_samples < 64 || !tol.grid_samples.is_power_of_two() {
        return Err(CliError::Config(format!(
            "tolerances.grid_samples must be a power of two >= 64, got {}",
            tol.grid_samples
        )));
    }
    if tol.z_reduction_seeds == 0 {
        return Err(CliError::Config(
            "tolerances.z_reduction_seeds must be at least 1".into(),
        ));
    }
    if let Some(floor) = tol.singular_floor {
        require_positive("tolerances.singular_floor", floor)?;
    }

    Ok(Resolved {
        preset,
        hamiltonian,
        matrix_rows,
        hbar,
        normalization: config.normalization,
        alpha,
        beta,
        amplitude,
        time,
        tolerances: config.tolerances,
        output: config.output,
    })
}

/// Parse a JSON document and validate it.
pub fn load(text: &str) -> Result<Resolved, CliError> {
    let config: RunConfig = serde_json::from_str(text).map_err(|e| {
        CliError::Config(format!(
            "cannot parse config (line {}, column {}): {e}",
            e.line(),
            e.column()
        ))
    })?;
    validate(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config(hamiltonian: &str, time: &str) -> String {
        format!(
            r#"{{
                "hamiltonian": {hamiltonian},
                "decay": {{ "alpha": 1.0, "beta": 1.0 }},
                "time": {time}
            }}"#
        )
    }

    #[test]
    fn minimal_free_config_resolves_with_defaults() {
        let text = base_config(
            r#"{ "preset": { "kind": "free" } }"#,
            r#"{ "single": 2.0 }"#,
        );
        let resolved = load(&text).unwrap();
        assert_eq!(resolved.hbar, 1.0);
        assert_eq!(resolved.alpha, 1.0);
        assert_eq!(resolved.amplitude, 1.0);
        assert!(matches!(resolved.time, TimeSpec::Single(t) if t == 2.0));
        let preset = resolved.preset.as_ref().unwrap();
        assert_eq!(preset.mass(), 1.0, "mass defaults to 1");
        assert_eq!(preset.dim_n(), 1, "dimension defaults to 1");
        assert_eq!(resolved.tolerances.grid_samples, 512);
    }

    #[test]
    fn both_preset_and_matrix_is_refused() {
        let text = base_config(
            r#"{ "preset": { "kind": "free" }, "matrix": [[0.0, 0.0], [0.0, 1.0]] }"#,
            r#"{ "single": 1.0 }"#,
        );
        let err = load(&text).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("exactly one"));
    }

    #[test]
    fn neither_preset_nor_matrix_is_refused() {
        let text = base_config("{}", r#"{ "single": 1.0 }"#);
        assert_eq!(load(&text).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn asymmetric_matrix_is_a_config_error() {
        let text = base_config(
            r#"{ "matrix": [[0.0, 1.0], [0.0, 1.0]] }"#,
            r#"{ "single": 1.0 }"#,
        );
        let err = load(&text).unwrap_err();
        assert_eq!(err.exit_code(), 2, "validation failures are config errors");
    }

    #[test]
    fn explicit_matrix_resolves() {
        // Free-particle matrix diag(0, 1/m) with m = 2.
        let text = base_config(
            r#"{ "matrix": [[0.0, 0.0], [0.0, 0.5]] }"#,
            r#"{ "single": 1.0 }"#,
        );
        let resolved = load(&text).unwrap();
        assert!(resolved.preset.is_none());
        assert_eq!(resolved.hamiltonian.dim_n(), 1);
        assert!(resolved.matrix_rows.is_some());
    }

    #[test]
    fn time_modes_are_exclusive() {
        let both = base_config(
            r#"{ "preset": { "kind": "free" } }"#,
            r#"{ "single": 1.0, "sweep": { "start": 0.0, "stop": 1.0, "steps": 3 } }"#,
        );
        assert_eq!(load(&both).unwrap_err().exit_code(), 2);
        let neither = base_config(r#"{ "preset": { "kind": "free" } }"#, "{}");
        assert_eq!(load(&neither).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn sweep_needs_at_least_two_ascending_steps() {
        let one_step = base_config(
            r#"{ "preset": { "kind": "free" } }"#,
            r#"{ "sweep": { "start": 0.5, "stop": 2.0, "steps": 1 } }"#,
        );
        assert_eq!(load(&one_step).unwrap_err().exit_code(), 2);
        let descending = base_config(
            r#"{ "preset": { "kind": "free" } }"#,
            r#"{ "sweep": { "start": 2.0, "stop": 0.5, "steps": 4 } }"#,
        );
        assert_eq!(load(&descending).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn sweep_grid_hits_both_endpoints() {
        let text = base_config(
            r#"{ "preset": { "kind": "free" } }"#,
            r#"{ "sweep": { "start": 0.5, "stop": 2.0, "steps": 4 } }"#,
        );
        let resolved = load(&text).unwrap();
        let times = resolved.time.times();
        assert_eq!(times.len(), 4);
        assert_eq!(times[0], 0.5);
        assert_eq!(times[3], 2.0);
        assert!(times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ekpv_pins_mass_and_hbar() {
        let text = format!(
            r#"{{
                "hamiltonian": {{ "preset": {{ "kind": "oscillator", "omega_sq": [1.0] }} }},
                "normalization": "ekpv",
                "decay": {{ "alpha": 1.0, "beta": 1.0 }},
                "time": {{ "single": 1.0 }}
            }}"#
        );
        let resolved = load(&text).unwrap();
        assert_eq!(resolved.hbar, 1.0);
        assert_eq!(resolved.preset.as_ref().unwrap().mass(), 0.5);
    }

    #[test]
    fn ekpv_conflicts_are_refused() {
        let bad_mass = format!(
            r#"{{
                "hamiltonian": {{ "preset": {{ "kind": "free", "mass": 2.0 }} }},
                "normalization": "ekpv",
                "decay": {{ "alpha": 1.0, "beta": 1.0 }},
                "time": {{ "single": 1.0 }}
            }}"#
        );
        assert_eq!(load(&bad_mass).unwrap_err().exit_code(), 2);
        let bad_hbar = format!(
            r#"{{
                "hamiltonian": {{ "preset": {{ "kind": "free" }} }},
                "normalization": "ekpv",
                "hbar": 0.5,
                "decay": {{ "alpha": 1.0, "beta": 1.0 }},
                "time": {{ "single": 1.0 }}
            }}"#
        );
        assert_eq!(load(&bad_hbar).unwrap_err().exit_code(), 2);
        let with_matrix = format!(
            r#"{{
                "hamiltonian": {{ "matrix": [[0.0, 0.0], [0.0, 1.0]] }},
                "normalization": "ekpv",
                "decay": {{ "alpha": 1.0, "beta": 1.0 }},
                "time": {{ "single": 1.0 }}
            }}"#
        );
        assert_eq!(load(&with_matrix).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn decay_must_be_positive() {
        let text = format!(
            r#"{{
                "hamiltonian": {{ "preset": {{ "kind": "free" }} }},
                "decay": {{ "alpha": -1.0, "beta": 1.0 }},
                "time": {{ "single": 1.0 }}
            }}"#
        );
        assert_eq!(load(&text).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn tolerance_overrides_are_validated() {
        let bad_samples = format!(
            r#"{{
                "hamiltonian": {{ "preset": {{ "kind": "free" }} }},
                "decay": {{ "alpha": 1.0, "beta": 1.0 }},
                "time": {{ "single": 1.0 }},
                "tolerances": {{ "grid_samples": 300 }}
            }}"#
        );
        assert_eq!(load(&bad_samples).unwrap_err().exit_code(), 2);
        let good = format!(
            r#"{{
                "hamiltonian": {{ "preset": {{ "kind": "free" }} }},
                "decay": {{ "alpha": 1.0, "beta": 1.0 }},
                "time": {{ "single": 1.0 }},
                "tolerances": {{ "grid_samples": 256, "covariance": 0.002 }}
            }}"#
        );
        let resolved = load(&good).unwrap();
        assert_eq!(resolved.tolerances.grid_samples, 256);
        assert_eq!(resolved.tolerances.covariance, 0.002);
        assert_eq!(resolved.tolerances.grid_extent, 12.0, "untouched default");
    }

    #[test]
    fn unknown_fields_are_parse_errors_with_location() {
        let text = format!(
            r#"{{
                "hamiltonian": {{ "preset": {{ "kind": "free" }} }},
                "decay": {{ "alpha": 1.0, "beta": 1.0 }},
                "time": {{ "single": 1.0 }},
                "typo_field": true
            }}"#
        );
        let err = load(&text).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("line"), "diagnostics carry a location");
    }

    #[test]
    fn cross_term_preset_resolves() {
        let text = base_config(
            r#"{ "preset": { "kind": "cross_term", "omega": 2.0, "theta": 1.0 } }"#,
            r#"{ "single": 1.0 }"#,
        );
        let resolved = load(&text).unwrap();
        assert_eq!(resolved.hamiltonian.dim_n(), 2);
    }
}
