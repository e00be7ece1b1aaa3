//! Shared fixtures for the criterion benchmarks: reference models and
//! reproducible random inputs sized for timing runs.

use episcale_core::metapop::{MetapopModel, MetapopState, MovementModel};
use episcale_core::{
    EpidemicParams, LocalState, RecruitmentSpec, SurvivalFractions, TransitionFractions,
    TransmissionSpec,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The two-patch reference model used across the suite, with `fast_steps`
/// movement sub-steps per disease step.
pub fn two_patch_model(fast_steps: u32) -> MetapopModel {
    let patch = |sigma_i: f64, gamma_i: f64| {
        EpidemicParams::new(
            SurvivalFractions {
                s: 0.95,
                e: 0.99,
                i: sigma_i,
                r: 0.95,
            },
            TransitionFractions {
                e: 0.9,
                i: gamma_i,
                r: 0.1,
            },
            TransmissionSpec::standard(0.95).unwrap(),
            RecruitmentSpec::constant(10.0).unwrap(),
        )
        .unwrap()
    };
    let ms = DMatrix::from_row_slice(2, 2, &[0.9, 0.2, 0.1, 0.8]);
    let me = DMatrix::from_row_slice(2, 2, &[0.999, 0.099, 0.001, 0.901]);
    let mi = DMatrix::from_row_slice(2, 2, &[0.901, 0.001, 0.099, 0.999]);
    let movement = MovementModel::new(ms.clone(), me, mi, ms).unwrap();
    MetapopModel::new(
        vec![patch(0.9, 0.5), patch(0.95, 0.86)],
        movement,
        fast_steps,
    )
    .unwrap()
}

/// The reference initial state.
pub fn two_patch_state() -> MetapopState {
    MetapopState::from_locals(&[
        LocalState::new(100.0, 4.0, 2.0, 0.0).unwrap(),
        LocalState::new(100.0, 1.0, 1.0, 0.0).unwrap(),
    ])
    .unwrap()
}

/// A reproducible strictly positive column-stochastic matrix.
pub fn random_stochastic(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(0.01..1.0));
    for j in 0..n {
        let sum: f64 = (0..n).map(|i| m[(i, j)]).sum();
        for i in 0..n {
            m[(i, j)] /= sum;
        }
    }
    m
}
