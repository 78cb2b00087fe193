//! Command implementations: certificate analysis, time sweeps, and the
//! self-verification suites. Each command renders to a string; the caller
//! owns destinations and exit codes.

use num_complex::Complex64;
use quadhardy::hardy::{certificate_for_flow, z_reduction, DecayPair, HardyCertificate};
use quadhardy::symplectic::random_symplectic;
use quadhardy::wigner::{covariance_check, GridSpec};
use quadhardy::Error;
use serde::{Deserialize, Serialize};

use crate::config::{CliError, OutputFormat, Resolved, TimeSpec};

/// Parameter echo carried by every report so outputs are self-describing.
#[derive(Clone, Debug, Deserialize, PartialEq, Serialize)]
pub struct ParamsEcho {
    pub hbar: f64,
    pub normalization: String,
    pub alpha: f64,
    pub beta: f64,
    pub amplitude: f64,
    pub model: ModelEcho,
}

/// The Hamiltonian exactly as the run used it.
#[derive(Clone, Debug, Deserialize, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelEcho {
    Free { mass: f64, dim_n: usize },
    Oscillator { mass: f64, omega_sq: Vec<f64> },
    CrossTerm { mass: f64, omega: f64, theta: f64 },
    Matrix { entries: Vec<Vec<f64>> },
}

/// One certificate evaluation in machine-readable form.
#[derive(Clone, Debug, Deserialize, PartialEq, Serialize)]
pub struct CertificateRecord {
    pub t: f64,
    pub det_b: f64,
    pub opnorm_sq: f64,
    pub product: f64,
    pub critical_alpha_beta: Option<f64>,
    pub verdict: String,
    pub free: bool,
    pub ill_conditioned: bool,
}

impl CertificateRecord {
    fn from_certificate(c: &HardyCertificate) -> Self {
        Self {
            t: c.time,
            det_b: c.det_b,
            opnorm_sq: c.opnorm_sq,
            product: c.product,
            critical_alpha_beta: c.critical_alpha_beta(),
            verdict: c.verdict.to_string(),
            free: c.free,
            ill_conditioned: c.ill_conditioned,
        }
    }
}

/// Analyze command output: echoed parameters plus one certificate.
#[derive(Clone, Debug, Deserialize, PartialEq, Serialize)]
pub struct AnalyzeReport {
    pub params: ParamsEcho,
    pub certificate: CertificateRecord,
}

/// One entry of the verification report.
#[derive(Clone, Debug, Deserialize, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// "pass", "fail", or "skipped".
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Verify command output.
#[derive(Clone, Debug, Deserialize, PartialEq, Serialize)]
pub struct VerifyReport {
    pub params: ParamsEcho,
    pub checks: Vec<CheckRecord>,
    pub all_passed: bool,
}

pub fn params_echo(resolved: &Resolved) -> ParamsEcho {
    use quadhardy::hamiltonian::Preset;
    let model = match (&resolved.preset, &resolved.matrix_rows) {
        (Some(Preset::Free(p)), _) => ModelEcho::Free {
            mass: p.mass,
            dim_n: p.dim_n,
        },
        (Some(Preset::Oscillator(p)), _) => ModelEcho::Oscillator {
            mass: p.mass,
            omega_sq: p.omega_sq.clone(),
        },
        (Some(Preset::CrossTerm(p)), _) => ModelEcho::CrossTerm {
            mass: p.mass,
            omega: p.omega,
            theta: p.theta,
        },
        (None, Some(rows)) => ModelEcho::Matrix {
            entries: rows.clone(),
        },
        (None, None) => unreachable!("validation guarantees a Hamiltonian source"),
    };
    ParamsEcho {
        hbar: resolved.hbar,
        normalization: resolved.normalization.as_str().to_string(),
        alpha: resolved.alpha,
        beta: resolved.beta,
        amplitude: resolved.amplitude,
        model,
    }
}

fn certificate_at(resolved: &Resolved, t: f64) -> Result<HardyCertificate, CliError> {
    let flow = resolved.flow(t)?;
    let decay = DecayPair::new(resolved.alpha, resolved.beta, resolved.amplitude, t)
        .map_err(|e| CliError::Config(format!("invalid decay pair: {e}")))?;
    certificate_for_flow(
        &flow.s_t,
        resolved.hbar,
        &decay,
        resolved.tolerances.singular_floor,
    )
    .map_err(|e| CliError::Numeric(format!("certificate at t = {t}: {e}")))
}

fn model_echo_line(model: &ModelEcho) -> String {
    fn join(values: &[f64]) -> String {
        let inner: Vec<String> = values.iter().map(|v| format!("{v}")).collect();
        format!("[{}]", inner.join(","))
    }
    match model {
        ModelEcho::Free { mass, dim_n } => format!("free mass={mass} dim_n={dim_n}"),
        ModelEcho::Oscillator { mass, omega_sq } => {
            format!("oscillator mass={mass} omega_sq={}", join(omega_sq))
        }
        ModelEcho::CrossTerm { mass, omega, theta } => {
            format!("cross_term mass={mass} omega={omega} theta={theta}")
        }
        ModelEcho::Matrix { entries } => {
            let rows: Vec<String> = entries.iter().map(|r| join(r)).collect();
            format!("matrix entries=[{}]", rows.join(","))
        }
    }
}

fn echo_block(params: &ParamsEcho) -> String {
    format!(
        "# hbar={}\n# normalization={}\n# alpha={}\n# beta={}\n# amplitude={}\n# model={}\n",
        params.hbar,
        params.normalization,
        params.alpha,
        params.beta,
        params.amplitude,
        model_echo_line(&params.model)
    )
}

/// 17-significant-digit float cell.
fn cell(v: f64) -> String {
    format!("{v:.16e}")
}

fn certificate_csv_row(record: &CertificateRecord) -> String {
    let critical = record
        .critical_alpha_beta
        .map(cell)
        .unwrap_or_default();
    format!(
        "{},{},{},{},{}",
        cell(record.t),
        cell(record.det_b),
        cell(record.opnorm_sq),
        critical,
        record.verdict
    )
}

/// Evaluate the certificate at the configured single time.
pub fn cmd_analyze(resolved: &Resolved, format: OutputFormat) -> Result<String, CliError> {
    let t = match resolved.time {
        TimeSpec::Single(t) => t,
        TimeSpec::Sweep { .. } => {
            return Err(CliError::Config(
                "analyze needs time.single; use the sweep command for time grids".into(),
            ));
        }
    };
    let report = AnalyzeReport {
        params: params_echo(resolved),
        certificate: CertificateRecord::from_certificate(&certificate_at(resolved, t)?),
    };
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(&report)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| CliError::Numeric(format!("cannot serialize report: {e}"))),
        OutputFormat::Csv => {
            let c = &report.certificate;
            let mut out = echo_block(&report.params);
            out.push_str("t,det_B,opnorm_sq,product,critical_alpha_beta,verdict,ill_conditioned\n");
            let critical = c.critical_alpha_beta.map(cell).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                cell(c.t),
                cell(c.det_b),
                cell(c.opnorm_sq),
                cell(c.product),
                critical,
                c.verdict,
                c.ill_conditioned
            ));
            Ok(out)
        }
    }
}

/// Tabulate the certificate across the configured time grid.
pub fn cmd_sweep(resolved: &Resolved, format: OutputFormat) -> Result<String, CliError> {
    if matches!(resolved.time, TimeSpec::Single(_)) {
        return Err(CliError::Config(
            "sweep needs time.sweep; use the analyze command for a single time".into(),
        ));
    }
    let times = resolved.time.times();
    let mut records = Vec::with_capacity(times.len());
    for &t in &times {
        records.push(CertificateRecord::from_certificate(&certificate_at(
            resolved, t,
        )?));
    }
    match format {
        OutputFormat::Csv => {
            let mut out = echo_block(&params_echo(resolved));
            out.push_str("t,det_B,opnorm_sq,critical_alpha_beta,verdict\n");
            for record in &records {
                out.push_str(&certificate_csv_row(record));
                out.push('\n');
            }
            Ok(out)
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct SweepReport<'a> {
                params: ParamsEcho,
                rows: &'a [CertificateRecord],
            }
            serde_json::to_string_pretty(&SweepReport {
                params: params_echo(resolved),
                rows: &records,
            })
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| CliError::Numeric(format!("cannot serialize report: {e}")))
        }
    }
}

/// Standard test states for the grid covariance suite.
fn covariance_states(spec: &GridSpec) -> Vec<(&'static str, Vec<Complex64>)> {
    let gaussian = spec
        .sample_fn(|x| Complex64::new((-0.5 * x * x).exp(), 0.0))
        .expect("one-dimensional spec");
    let hermite = spec
        .sample_fn(|x| Complex64::new(x * (-0.5 * x * x).exp(), 0.0))
        .expect("one-dimensional spec");
    vec![("gaussian", gaussian), ("hermite1", hermite)]
}

/// Run the covariance and block-identity suites at the configured scale.
/// Returns the rendered JSON report and whether every check passed
/// (skipped entries do not count as failures).
pub fn cmd_verify(resolved: &Resolved) -> Result<(String, bool), CliError> {
    let mut checks = Vec::new();
    let tol = &resolved.tolerances;

    // Grid covariance suite: evolve standard states through the configured
    // flow and compare against the transported initial distribution.
    if resolved.hamiltonian.dim_n() == 1 {
        let spec = GridSpec::new(1, tol.grid_extent, tol.grid_samples, resolved.hbar)
            .map_err(|e| CliError::Config(format!("grid tolerances: {e}")))?;
        let states = covariance_states(&spec);
        for &t in &resolved.time.times() {
            for (label, state) in &states {
                let name = format!("covariance state={label} t={t}");
                match covariance_check(state, &resolved.hamiltonian, t, &spec) {
                    Ok(report) => {
                        let pass = report.max_error <= tol.covariance;
                        checks.push(CheckRecord {
                            name,
                            status: if pass { "pass" } else { "fail" }.into(),
                            residual: Some(report.max_error),
                            tolerance: Some(tol.covariance),
                            reason: (!pass).then(|| {
                                format!(
                                    "worst discrepancy at (x, xi) = ({}, {})",
                                    report.worst_x, report.worst_xi
                                )
                            }),
                        });
                    }
                    Err(Error::NotFree { det_b_abs, floor }) => checks.push(CheckRecord {
                        name,
                        status: "skipped".into(),
                        residual: None,
                        tolerance: None,
                        reason: Some(format!(
                            "flow is not free at this time (|det B| = {det_b_abs:.3e} <= floor {floor:.3e}); \
                             the transform has no integral-kernel form there"
                        )),
                    }),
                    Err(e) => checks.push(CheckRecord {
                        name,
                        status: "fail".into(),
                        residual: None,
                        tolerance: Some(tol.covariance),
                        reason: Some(e.to_string()),
                    }),
                }
            }
        }
    } else {
        checks.push(CheckRecord {
            name: "covariance".into(),
            status: "skipped".into(),
            residual: None,
            tolerance: None,
            reason: Some(format!(
                "grid checks need one degree of freedom; this Hamiltonian has {}",
                resolved.hamiltonian.dim_n()
            )),
        });
    }

    // Block-identity suite over seeded random symplectic maps: for every
    // free map, C - D B^{-1} A must equal -(B^{-1})^T.
    let mut worst = 0.0f64;
    let mut ran = 0usize;
    let mut skipped = 0usize;
    let mut failure: Option<String> = None;
    for seed in 0..tol.z_reduction_seeds {
        let dim = (seed % 3 + 1) as usize;
        let s = random_symplectic(seed, dim, 0.75)
            .map_err(|e| CliError::Numeric(format!("seeded map {seed}: {e}")))?;
        if !s.is_free(None).is_free {
            skipped += 1;
            continue;
        }
        match z_reduction(&s, None) {
            Ok(zr) => {
                worst = worst.max(zr.identity_residual);
                ran += 1;
            }
            Err(e) => {
                failure = Some(format!("seed {seed}: {e}"));
                break;
            }
        }
    }
    let name = format!(
        "block_identity seeds={} ran={ran} skipped_not_free={skipped}",
        tol.z_reduction_seeds
    );
    checks.push(match failure {
        Some(reason) => CheckRecord {
            name,
            status: "fail".into(),
            residual: None,
            tolerance: Some(tol.z_reduction),
            reason: Some(reason),
        },
        None => {
            let pass = worst <= tol.z_reduction && ran > 0;
            CheckRecord {
                name,
                status: if pass { "pass" } else { "fail" }.into(),
                residual: Some(worst),
                tolerance: Some(tol.z_reduction),
                reason: (ran == 0).then(|| "no free map was drawn".into()),
            }
        }
    });

    let all_passed = checks.iter().all(|c| c.status != "fail");
    let report = VerifyReport {
        params: params_echo(resolved),
        checks,
        all_passed,
    };
    let text = serde_json::to_string_pretty(&report)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Numeric(format!("cannot serialize report: {e}")))?;
    Ok((text, all_passed))
}
