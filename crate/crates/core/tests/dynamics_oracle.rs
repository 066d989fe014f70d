//! Propagation checked against independent references: a scaling-and-squaring
//! Taylor exponential and the closed-form detuned Rabi formula.

use std::f64::consts::PI;

use dipolar::dynamics::{
    run_direct_gate, run_sequence, step_unitary, InteractionSpec, Level, LevelScheme, Molecule, PulseSequence,
    PulseSpec, RunOptions, C64,
};
use dipolar::reproduce::{log_log_slope, random_sequence_norm_drift};
use dipolar::{Quantity, Unit};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn taylor_exp(a: &DMatrix<C64>) -> DMatrix<C64> {
    let norm = a.iter().map(|z| z.norm()).sum::<f64>();
    let s = norm.log2().ceil().max(0.0) as i32 + 1;
    let b = a / C64::new(2f64.powi(s), 0.0);
    let d = a.nrows();
    let mut term = DMatrix::<C64>::identity(d, d);
    let mut sum = term.clone();
    for k in 1..=30 {
        term = &term * &b / C64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize, hermitian: bool) -> DMatrix<C64> {
    let m = DMatrix::from_fn(d, d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    if hermitian {
        (&m + m.adjoint()) * C64::new(0.5, 0.0)
    } else {
        m
    }
}

fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn step_matches_taylor_hermitian() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in [2, 9, 16] {
        for _ in 0..20 {
            let h = random_matrix(&mut rng, d, true) * C64::new(1e5, 0.0);
            let dt = rng.random_range(1e-7..5e-5);
            let u = step_unitary(&h, dt);
            let oracle = taylor_exp(&(&h * C64::new(0.0, -dt)));
            assert!(max_diff(&u, &oracle) < 1e-9, "d = {d}: {}", max_diff(&u, &oracle));
        }
    }
}

#[test]
fn step_matches_taylor_with_loss() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let mut h = random_matrix(&mut rng, 9, true);
        for k in 0..9 {
            h[(k, k)] -= C64::new(0.0, rng.random_range(0.0..0.5));
        }
        let dt = rng.random_range(0.1..3.0);
        let u = step_unitary(&h, dt);
        let oracle = taylor_exp(&(&h * C64::new(0.0, -dt)));
        assert!(max_diff(&u, &oracle) < 1e-9);
    }
}

#[test]
fn detuned_rabi_population() {
    let scheme = LevelScheme::direct(Quantity::new(1.0, Unit::Debye).unwrap(), None).unwrap();
    let n = scheme.len();
    let one = scheme.index(Level::One).unwrap();
    let e = scheme.index(Level::Excited).unwrap();
    let zero = scheme.index(Level::Zero).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let om = rng.random_range(1e3..1e6);
        let det = rng.random_range(-1e6..1e6);
        let t = rng.random_range(0.0..3e-5);
        let p = PulseSpec::free(Molecule::Control, (Level::One, Level::Excited), om, t, det, rng.random_range(-PI..PI))
            .unwrap();
        let mut seq = PulseSequence::default();
        seq.push(p, false);
        let out = run_sequence(&scheme, &InteractionSpec::default(), &seq, &RunOptions::default()).unwrap();
        let col = one * n + zero;
        let got = out.unitary[(e * n + zero, col)].norm_sqr();
        let g = (om * om + det * det).sqrt();
        let want = om * om / (g * g) * (g * t / 2.0).sin().powi(2);
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn residual_phase_scales_inversely(om in 1e3f64..1e6) {
        let scheme = LevelScheme::direct(Quantity::new(1.37, Unit::Debye).unwrap(), None).unwrap();
        let w = Quantity::new(om, Unit::RadPerSecond).unwrap();
        let xs: Vec<f64> = (0..8).map(|k| om * 10f64.powf(1.0 + k as f64 / 7.0)).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|&u| run_direct_gate(&scheme, &InteractionSpec::blockade(u), w, w).unwrap().residual_phases[3])
            .collect();
        let slope = log_log_slope(&xs, &ys);
        prop_assert!((slope + 1.0).abs() <= 0.1, "slope {}", slope);
    }

    #[test]
    fn random_sequences_keep_norm(seed in any::<u64>()) {
        prop_assert!(random_sequence_norm_drift(25, seed).unwrap() < 1e-10);
    }
}
