//! Acceptance suite: one test per release criterion. Each test checks a
//! deliverable end to end at its stated tolerance, enforces a runtime
//! budget, and prints a `PASS criterion N` line on success (visible with
//! `cargo test -p quadhardy-cli --test acceptance -- --nocapture`).

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use quadhardy::expm::expm;
use quadhardy::hamiltonian::{
    modal_sine, CrossTermParams, FreeParams, OscillatorParams, Preset,
};
use quadhardy::hardy::{
    critical_product, cross_term_b_block, cross_term_gamma, op_norm, oscillator_certificate,
    z_reduction, DecayPair, Verdict,
};
use quadhardy::symplectic::{max_abs, random_symplectic, standard_j, symplectic_residual};
use quadhardy::wigner::{covariance_check, hardy_saturation_probe, GridSpec};
use quadhardy::williamson::{exp_via_williamson, williamson, DEFAULT_WILLIAMSON_TOL};

fn budget(start: Instant, limit: Duration, label: &str) {
    let took = start.elapsed();
    assert!(
        took <= limit,
        "{label} exceeded its runtime budget: took {took:?}, allowed {limit:?}"
    );
}

#[test]
fn criterion_1_free_particle_critical_threshold() {
    // Free flow, mass = hbar = 1: the decay-product threshold at time T
    // must equal (1/(2T))^2 to 1e-12.
    let start = Instant::now();
    let h = Preset::Free(FreeParams {
        mass: 1.0,
        dim_n: 1,
    })
    .hamiltonian(1.0)
    .unwrap();
    for &t in &[0.5, 1.0, 2.0] {
        let critical = critical_product(&h, t)
            .unwrap()
            .expect("free flow must have an invertible upper-right block");
        let expected = 1.0 / (4.0 * t * t);
        assert!(
            (critical - expected).abs() <= 1e-12,
            "critical decay product at T = {t}: got {critical}, expected {expected}"
        );
    }
    budget(start, Duration::from_secs(1), "criterion 1");
    println!("PASS criterion 1: free-particle critical threshold (1/(2T))^2 to 1e-12");
}

#[test]
fn criterion_2_oscillator_flow_block_closed_form() {
    // The upper-right flow block from the matrix exponential must match
    // (1/m) diag(sin(omega_j t)/omega_j) to 1e-10 on a 64-point grid,
    // with modes omega = (1, 2, 3) plus an inverted mode omega^2 = -1
    // exercising the hyperbolic branch.
    let start = Instant::now();
    let omega_sq = vec![1.0, 4.0, 9.0, -1.0];
    let h = Preset::Oscillator(OscillatorParams {
        mass: 1.0,
        omega_sq: omega_sq.clone(),
    })
    .hamiltonian(1.0)
    .unwrap();
    let n = omega_sq.len();
    let mut worst = 0.0f64;
    for k in 0..64 {
        let t = 0.05 + 3.15 * (k as f64) / 63.0;
        let b = h.flow_at(t).unwrap().s_t.block_b();
        let mut expected = DMatrix::<f64>::zeros(n, n);
        for (j, &w2) in omega_sq.iter().enumerate() {
            expected[(j, j)] = modal_sine(w2, t);
        }
        worst = worst.max(max_abs(&(&b - &expected)));
    }
    assert!(
        worst <= 1e-10,
        "oscillator flow block drifted from the modal closed form by {worst}"
    );
    budget(start, Duration::from_secs(5), "criterion 2");
    println!("PASS criterion 2: oscillator flow block matches modal sines to 1e-10 (worst {worst:.3e})");
}

#[test]
fn criterion_3_oscillator_breakdown_times_and_verdicts() {
    // Modes omega = (1, 2): the flow block is singular exactly at the
    // quarter-grid points t = k pi / 2, and the verdict flips across a
    // decay product of 1 at T = 1.
    let start = Instant::now();
    let params = OscillatorParams {
        mass: 1.0,
        omega_sq: vec![1.0, 4.0],
    };
    for k in 1..=8usize {
        let t = (k as f64) * PI / 4.0;
        let cert = oscillator_certificate(
            &params,
            1.0,
            &DecayPair::new(1.0, 1.0, 1.0, t).unwrap(),
        )
        .unwrap();
        let singular_hit = k % 2 == 0;
        if singular_hit {
            assert_eq!(
                cert.verdict,
                Verdict::NotFree,
                "t = {k} pi/4 should be a breakdown time, got {} (|det B| = {:.3e}, floor {:.3e})",
                cert.verdict,
                cert.det_b.abs(),
                cert.floor
            );
        } else {
            assert_ne!(
                cert.verdict,
                Verdict::NotFree,
                "t = {k} pi/4 should be a free time, got NotFree (|det B| = {:.3e}, floor {:.3e})",
                cert.det_b.abs(),
                cert.floor
            );
        }
    }

    // At T = 1 the block norm is max(|sin 1|, |sin 2|/2) = sin 1, so
    // alpha beta = p / (4 sin^2 1) produces decay product exactly p.
    let sin1_sq = 1.0f64.sin().powi(2);
    for (target, expected) in [(1.01, Verdict::ForcesZero), (0.99, Verdict::Inconclusive)] {
        let alpha = target / (4.0 * sin1_sq);
        let cert = oscillator_certificate(
            &params,
            1.0,
            &DecayPair::new(alpha, 1.0, 1.0, 1.0).unwrap(),
        )
        .unwrap();
        assert!(
            (cert.product - target).abs() <= 1e-12,
            "decay product should be {target}, got {}",
            cert.product
        );
        assert_eq!(
            cert.verdict, expected,
            "product {target} should give {expected}, got {}",
            cert.verdict
        );
    }
    budget(start, Duration::from_secs(1), "criterion 3");
    println!("PASS criterion 3: breakdown times at k pi/2 and verdict flip across product 1");
}

#[test]
fn criterion_4_cross_term_gamma_matches_block_norm() {
    // Coupled model (m, omega, theta) = (1, 2, 1): the closed-form larger
    // squared singular value must equal ||B(T)||_op^2 from the explicit
    // block to 1e-9; with theta = 1e-8 both singular values collapse to
    // the uncoupled oscillator value (sin(2T)/2)^2 to 1e-6.
    let start = Instant::now();
    let coupled = CrossTermParams {
        mass: 1.0,
        omega: 2.0,
        theta: 1.0,
    };
    for k in 1..=32usize {
        let t = 0.1 * (k as f64);
        let gamma = cross_term_gamma(&coupled, t).unwrap();
        let direct = op_norm(&cross_term_b_block(&coupled, t).unwrap()).powi(2);
        assert!(
            (gamma.plus - direct).abs() <= 1e-9,
            "closed-form gamma_plus at T = {t}: got {}, block norm gives {direct}",
            gamma.plus
        );
    }
    let nearly_uncoupled = CrossTermParams {
        mass: 1.0,
        omega: 2.0,
        theta: 1e-8,
    };
    for k in 1..=32usize {
        let t = 0.1 * (k as f64);
        let gamma = cross_term_gamma(&nearly_uncoupled, t).unwrap();
        let oscillator = (0.5 * (2.0 * t).sin()).powi(2);
        assert!(
            (gamma.plus - oscillator).abs() <= 1e-6
                && (gamma.minus - oscillator).abs() <= 1e-6,
            "theta -> 0 limit at T = {t}: gamma = ({}, {}), oscillator value {oscillator}",
            gamma.plus,
            gamma.minus
        );
    }
    budget(start, Duration::from_secs(2), "criterion 4");
    println!("PASS criterion 4: cross-term gamma matches block norm to 1e-9 and the theta -> 0 limit to 1e-6");
}

fn seeded_spd(seed: u64, dim_n: usize) -> DMatrix<f64> {
    let d = 2 * dim_n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    &g * g.transpose() + DMatrix::<f64>::identity(d, d) * 0.3
}

#[test]
fn criterion_5_williamson_normal_form_spectrum_and_flow() {
    // 200 seeded positive definite matrices, one to three modes each:
    // the congruence S^T M S reproduces diag(Lambda, Lambda) to 1e-8 with
    // S symplectic to 1e-8, J M has eigenvalues {+/- i lambda_j} to 1e-8,
    // and the per-mode circular-function flow matches the matrix
    // exponential of t J M to 1e-7.
    let start = Instant::now();
    for seed in 0..200u64 {
        let n = (seed as usize) % 3 + 1;
        let m = seeded_spd(seed, n);
        let decomp = williamson(&m, DEFAULT_WILLIAMSON_TOL).unwrap();
        let s = decomp.s().matrix();

        let congruence = s.transpose() * &m * s;
        let residual = max_abs(&(&congruence - decomp.normal_form()));
        assert!(
            residual <= 1e-8,
            "seed {seed}: normal-form residual {residual}"
        );
        let sympl = symplectic_residual(s).unwrap();
        assert!(
            sympl <= 1e-8,
            "seed {seed}: symplectic residual {sympl}"
        );

        // Spectrum of J M: purely imaginary pairs +/- i lambda_j.
        let lambda = decomp.lambda();
        let scale = lambda[0].max(1.0);
        let eigen = (standard_j(n) * &m).complex_eigenvalues();
        let mut positive: Vec<f64> = Vec::new();
        for ev in eigen.iter() {
            assert!(
                ev.re.abs() <= 1e-8 * scale,
                "seed {seed}: eigenvalue {ev} of J M has a real part"
            );
            if ev.im > 0.0 {
                positive.push(ev.im);
            }
        }
        assert_eq!(
            positive.len(),
            n,
            "seed {seed}: expected {n} conjugate eigenvalue pairs"
        );
        positive.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (j, (&ev, &l)) in positive.iter().zip(lambda.iter()).enumerate() {
            assert!(
                (ev - l).abs() <= 1e-8 * scale,
                "seed {seed}: modal frequency {j}: eigensolver {ev}, congruence {l}"
            );
        }

        // Flow through the decomposition vs. the matrix exponential.
        let x = standard_j(n) * &m;
        for &t in &[0.25, 1.0, 4.0] {
            let via_modes = exp_via_williamson(&m, t, DEFAULT_WILLIAMSON_TOL).unwrap();
            let direct = expm(&(&x * t)).unwrap();
            let diff = max_abs(&(via_modes.matrix() - &direct));
            assert!(
                diff <= 1e-7,
                "seed {seed}, t = {t}: modal flow deviates from expm by {diff}"
            );
        }
    }
    budget(start, Duration::from_secs(30), "criterion 5");
    println!("PASS criterion 5: 200-seed normal forms, spectra, and modal flows within tolerance");
}

#[test]
fn criterion_6_free_matrix_reduction_identity() {
    // The lower-triangular model reduction must satisfy its defining
    // block identity C - D B^{-1} A = -(B^{-1})^T to 1e-8 on 500 seeded
    // symplectic matrices with up to four modes, skipping the rare
    // non-free draws.
    let start = Instant::now();
    let mut ran = 0usize;
    let mut skipped = 0usize;
    for seed in 0..500u64 {
        let n = (seed as usize) % 4 + 1;
        let s = random_symplectic(seed, n, 0.75).unwrap();
        if !s.is_free(None).is_free {
            skipped += 1;
            continue;
        }
        let reduction = z_reduction(&s, None).unwrap();
        assert!(
            reduction.identity_residual <= 1e-8,
            "seed {seed}: reduction identity residual {}",
            reduction.identity_residual
        );
        ran += 1;
    }
    assert!(
        ran >= 450,
        "free draws should dominate: ran {ran}, skipped {skipped}"
    );
    budget(start, Duration::from_secs(10), "criterion 6");
    println!("PASS criterion 6: reduction identity to 1e-8 on {ran}/500 free draws ({skipped} singular-block skips)");
}

#[test]
fn criterion_7_phase_space_covariance_at_grid_scale() {
    // One mode, 512 samples over [-6, 6), hbar = 1: transporting the
    // phase-space transform of a Gaussian or first Hermite state along
    // the classical flow must agree with the transform of the evolved
    // state to 1e-3 on the inner half-window. Free-flow times stay below
    // the window's spreading budget; oscillator widths are bounded, so
    // its times range further.
    let start = Instant::now();
    let spec = GridSpec::new(1, 12.0, 512, 1.0).unwrap();
    let gaussian = spec
        .sample_fn(|x| Complex64::new((-0.5 * x * x).exp(), 0.0))
        .unwrap();
    let hermite = spec
        .sample_fn(|x| Complex64::new(x * (-0.5 * x * x).exp(), 0.0))
        .unwrap();
    let states = [("gaussian", &gaussian), ("hermite1", &hermite)];
    let models = [
        (
            "free",
            Preset::Free(FreeParams {
                mass: 1.0,
                dim_n: 1,
            }),
            [0.4, 0.8],
        ),
        (
            "oscillator",
            Preset::Oscillator(OscillatorParams {
                mass: 1.0,
                omega_sq: vec![1.21],
            }),
            [0.6, 1.3],
        ),
    ];
    let mut worst = 0.0f64;
    for (model_name, preset, times) in models {
        let h = preset.hamiltonian(1.0).unwrap();
        for &t in &times {
            for (state_name, state) in states {
                let report = covariance_check(state, &h, t, &spec).unwrap();
                assert!(
                    report.max_error <= 1e-3,
                    "{model_name}/{state_name} at t = {t}: inner-window discrepancy {}",
                    report.max_error
                );
                worst = worst.max(report.max_error);
            }
        }
    }
    budget(start, Duration::from_secs(60), "criterion 7");
    println!("PASS criterion 7: covariance discrepancy <= 1e-3 on all flow/state pairs (worst {worst:.3e})");
}

#[test]
fn criterion_8_saturation_probe_approaches_one_from_below() {
    // Free flow, mass = hbar = T = 1: the spread-out decay product of an
    // actual Gaussian solution never exceeds 1 and climbs toward it as
    // the initial state narrows.
    let start = Instant::now();
    let h = Preset::Free(FreeParams {
        mass: 1.0,
        dim_n: 1,
    })
    .hamiltonian(1.0)
    .unwrap();
    let mut previous = f64::NEG_INFINITY;
    for &alpha in &[1e-2, 1.0, 1e2, 1e6] {
        let probe = hardy_saturation_probe(alpha, &h, 1.0).unwrap();
        assert!(
            probe <= 1.0 + 1e-9,
            "alpha = {alpha}: probe {probe} exceeds the saturation bound"
        );
        assert!(
            probe > previous,
            "alpha = {alpha}: probe {probe} is not strictly above the previous value {previous}"
        );
        previous = probe;
    }
    budget(start, Duration::from_secs(1), "criterion 8");
    println!("PASS criterion 8: saturation probe stays <= 1 + 1e-9 and increases with alpha");
}

#[test]
fn criterion_9_cli_byte_determinism_and_lossless_json() {
    // Two sweep runs over the same oscillator config must produce
    // byte-identical CSV files, and the analyze JSON must round-trip
    // losslessly through a parse/serialize cycle.
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_quadhardy");
    let dir = tempfile::tempdir().unwrap();

    let sweep_config = dir.path().join("sweep.json");
    std::fs::write(
        &sweep_config,
        r#"{
  "hamiltonian": { "preset": { "kind": "oscillator", "mass": 1.0, "omega_sq": [1.0, 4.0] } },
  "hbar": 1.0,
  "decay": { "alpha": 0.7, "beta": 1.3 },
  "time": { "sweep": { "start": 0.1, "stop": 3.0, "steps": 40 } }
}"#,
    )
    .unwrap();
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    for out in [&first, &second] {
        let status = std::process::Command::new(bin)
            .args(["sweep", "--config"])
            .arg(&sweep_config)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success(), "sweep run failed with {status}");
    }
    let bytes_first = std::fs::read(&first).unwrap();
    let bytes_second = std::fs::read(&second).unwrap();
    assert!(
        !bytes_first.is_empty() && bytes_first == bytes_second,
        "sweep output is not byte-deterministic across runs"
    );

    let analyze_config = dir.path().join("analyze.json");
    std::fs::write(
        &analyze_config,
        r#"{
  "hamiltonian": { "preset": { "kind": "oscillator", "mass": 1.0, "omega_sq": [1.0, 4.0] } },
  "decay": { "alpha": 0.7, "beta": 1.3 },
  "time": { "single": 1.0 }
}"#,
    )
    .unwrap();
    let output = std::process::Command::new(bin)
        .args(["analyze", "--config"])
        .arg(&analyze_config)
        .output()
        .unwrap();
    assert!(output.status.success(), "analyze run failed");
    let parsed: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    let reserialized = serde_json::to_string(&parsed).unwrap();
    let reparsed: serde_json::Value = serde_json::from_str(&reserialized).unwrap();
    assert_eq!(
        parsed, reparsed,
        "analyze JSON loses information on a parse/serialize cycle"
    );
    budget(start, Duration::from_secs(5), "criterion 9");
    println!("PASS criterion 9: sweep CSV byte-identical across runs; analyze JSON round-trips losslessly");
}
