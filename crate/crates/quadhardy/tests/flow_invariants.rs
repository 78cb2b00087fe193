//! Property suites for flows of quadratic Hamiltonians: the one-parameter
//! group law, symplecticity along the flow, closed forms against the
//! matrix exponential for every preset, and conservation of energy.

use nalgebra::{DMatrix, DVector};
use quadhardy::hamiltonian::{
    flow, AlgebraElement, CrossTermParams, FreeParams, OscillatorParams, Preset,
};
use quadhardy::symplectic::{max_abs, standard_j, symplectic_residual};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn seeded_symmetric(seed: u64, dim: usize, scale: f64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
    (&g + g.transpose()) * (0.5 * scale)
}

fn seeded_generator(seed: u64, n: usize, scale: f64) -> AlgebraElement {
    let m = seeded_symmetric(seed, 2 * n, scale);
    AlgebraElement::new(standard_j(n) * m).unwrap()
}

fn all_presets() -> Vec<Preset> {
    vec![
        Preset::Free(FreeParams {
            mass: 1.3,
            dim_n: 2,
        }),
        Preset::Oscillator(OscillatorParams {
            mass: 0.8,
            omega_sq: vec![4.0, 0.49, -1.0],
        }),
        Preset::CrossTerm(CrossTermParams {
            mass: 1.0,
            omega: 2.0,
            theta: 1.0,
        }),
    ]
}

#[test]
fn flows_compose_as_a_one_parameter_group() {
    let times = [-4.8, -1.2, 0.3, 2.0, 4.5];
    for seed in 0..30u64 {
        let n = (seed % 3 + 1) as usize;
        let x = seeded_generator(seed, n, 0.25);
        for &s in &times {
            for &t in &times {
                let fs = flow(&x, s).unwrap().s_t;
                let ft = flow(&x, t).unwrap().s_t;
                let fst = flow(&x, s + t).unwrap().s_t;
                let err = max_abs(&(fs.matrix() * ft.matrix() - fst.matrix()));
                assert!(
                    err <= 1e-8,
                    "seed {seed}: group law fails at (s, t) = ({s}, {t}) by {err}"
                );
            }
        }
    }
}

#[test]
fn flows_stay_symplectic_across_times() {
    for seed in 0..100u64 {
        let n = (seed % 3 + 1) as usize;
        let x = seeded_generator(seed, n, 0.4);
        for &t in &[0.1, 0.5, 1.0, 2.5, 5.0] {
            let s_t = flow(&x, t).unwrap().s_t;
            let residual = symplectic_residual(s_t.matrix()).unwrap();
            assert!(
                residual <= 1e-8,
                "seed {seed}, t = {t}: residual {residual}"
            );
        }
    }
}

#[test]
fn closed_forms_match_the_matrix_exponential_for_every_preset() {
    for preset in all_presets() {
        let h = preset.hamiltonian(1.0).unwrap();
        for k in 0..50 {
            let t = -2.5 + 5.0 * k as f64 / 49.0;
            let closed = preset.closed_form_flow(t).unwrap().s_t;
            let numeric = h.flow_at(t).unwrap().s_t;
            let err = max_abs(&(closed.matrix() - numeric.matrix()));
            assert!(
                err <= 1e-9,
                "{preset:?} at t = {t}: closed vs exponential differ by {err}"
            );
        }
    }
}

#[test]
fn classical_flow_conserves_the_hamiltonian() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for preset in all_presets() {
        let h = preset.hamiltonian(1.0).unwrap();
        let dim = 2 * preset.dim_n();
        for _ in 0..10 {
            let z = DVector::<f64>::from_fn(dim, |_, _| rng.random_range(-2.0..2.0));
            let e0 = h.energy(&z).unwrap();
            for &t in &[0.2, 0.9, 1.7, 3.1] {
                let s_t = h.flow_at(t).unwrap().s_t;
                let e_t = h.energy(&s_t.apply(&z).unwrap()).unwrap();
                assert!(
                    (e_t - e0).abs() <= 1e-8 * e0.abs().max(1.0),
                    "{preset:?}: energy drifted from {e0} to {e_t} at t = {t}"
                );
            }
        }
    }
}
