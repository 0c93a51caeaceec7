use nalgebra::{DMatrix, DVector};
use peoc::dfrc::readout::ridge_objective;
use peoc::dfrc::{
    evaluate_nrmse, evaluate_ser, narma10_generate, reservoir_run, reservoir_run_from, train_readout, MaskKind,
    Nonlinearity, ReservoirConfig, ReservoirState, Task,
};
use peoc::dfrc::reservoir::generate_mask;
use proptest::prelude::*;

fn mackey_glass(nv: usize, eta_fb: f64, seed: u64) -> ReservoirConfig {
    ReservoirConfig {
        nonlinearity: Nonlinearity::mackey_glass(),
        eta_fb,
        ..ReservoirConfig::new(nv, seed)
    }
}

/// Uniform masks keep the node states far from collinear, so the normal
/// equations stay well conditioned.
fn well_conditioned(nv: usize, seed: u64) -> ReservoirConfig {
    ReservoirConfig {
        mask: generate_mask(MaskKind::Uniform, nv, seed),
        ..mackey_glass(nv, 0.5, seed)
    }
}

fn narma_states(nv: usize, len: usize, seed: u64) -> (DMatrix<f64>, Vec<f64>) {
    let (u, y) = narma10_generate(len + 50, seed).unwrap();
    let s = reservoir_run(&u, &well_conditioned(nv, seed)).unwrap();
    (s.rows(50, len).into_owned(), y[50..].to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fading_memory(seed in any::<u64>(), eta_fb in -0.8f64..0.8, offset in 0usize..3) {
        let cfg = ReservoirConfig { loop_offset: offset, ..mackey_glass(30, eta_fb, seed) };
        let (u, _) = narma10_generate(120, seed).unwrap();
        let mut a = ReservoirState::zeros(30);
        let mut b = ReservoirState::random(30, 2.0, seed ^ 0xabc);
        let sa = reservoir_run_from(&mut a, &u, &cfg).unwrap();
        let sb = reservoir_run_from(&mut b, &u, &cfg).unwrap();
        let gap = (sa.row(99) - sb.row(99)).norm();
        prop_assert!(gap < 1e-6, "gap {}", gap);
    }

    #[test]
    fn runs_are_deterministic(seed in any::<u64>(), nv in 1usize..40) {
        let cfg = Task::Narma10.reservoir(nv, seed);
        let (u, _) = narma10_generate(60, seed).unwrap();
        prop_assert_eq!(reservoir_run(&u, &cfg).unwrap(), reservoir_run(&u, &cfg).unwrap());
    }

    #[test]
    fn ridge_is_a_minimum(seed in 0u64..1000, lambda_exp in -6.0f64..0.0) {
        let (s, y) = narma_states(12, 300, seed);
        let lambda = 10f64.powf(lambda_exp);
        let m = train_readout(&s, &y, lambda).unwrap();
        let base = ridge_objective(&s, &y, &m.weights, lambda);
        for i in 0..m.weights.len() {
            for h in [1e-4, -1e-4] {
                let mut w: DVector<f64> = m.weights.clone();
                w[i] += h;
                prop_assert!(ridge_objective(&s, &y, &w, lambda) >= base);
            }
        }
    }

    #[test]
    fn affine_column_rescaling_is_invisible(
        seed in 0u64..1000,
        scales in prop::collection::vec(0.2f64..5.0, 12),
        shifts in prop::collection::vec(-2.0f64..2.0, 12),
    ) {
        let (s, y) = narma_states(12, 400, seed);
        let (train, test) = (s.rows(0, 300).into_owned(), s.rows(300, 100).into_owned());
        let rescale = |m: &DMatrix<f64>| {
            let mut out = m.clone();
            for (j, mut col) in out.column_iter_mut().enumerate() {
                col.apply(|v| *v = *v * scales[j] + shifts[j]);
            }
            out
        };
        let lambda = 1e-12;
        let a = evaluate_nrmse(&train_readout(&train, &y[..300], lambda).unwrap(), &test, &y[300..]).unwrap();
        let b = evaluate_nrmse(
            &train_readout(&rescale(&train), &y[..300], lambda).unwrap(),
            &rescale(&test),
            &y[300..],
        )
        .unwrap();
        prop_assert!((a - b).abs() <= 1e-6 * a, "{} vs {}", a, b);
    }
}

#[test]
fn ser_invariant_under_rescaling() {
    let (u, d) = peoc::dfrc::channel_eq_generate(1500, 20.0, 3).unwrap();
    let cfg = ReservoirConfig {
        gamma_in: 0.2,
        ..well_conditioned(20, 3)
    };
    let s = reservoir_run(&u, &cfg).unwrap();
    let target: Vec<f64> = std::iter::repeat_n(0.0, 2).chain(d[..d.len() - 2].iter().copied()).collect();
    let (train, test) = (s.rows(100, 1000).into_owned(), s.rows(1100, 400).into_owned());
    let scaled = |m: &DMatrix<f64>| m.map(|v| 3.0 * v - 0.5);
    let a = evaluate_ser(&train_readout(&train, &target[100..1100], 1e-12).unwrap(), &test, &target[1100..]).unwrap();
    let b = evaluate_ser(
        &train_readout(&scaled(&train), &target[100..1100], 1e-12).unwrap(),
        &scaled(&test),
        &target[1100..],
    )
    .unwrap();
    assert_eq!(a, b);
}

#[test]
fn ring_reservoir_beats_linear_baseline_on_narma() {
    let r = peoc::dfrc::run_narma10(&Task::Narma10.reservoir(100, 1), 2000, 500, 1).unwrap();
    assert!(r.metric < 0.4, "{}", r.metric);
}
