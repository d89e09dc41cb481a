mod common;

use common::*;
use num_complex::Complex64;
use qpath::bohm::{run, step_forward, Rng, RunOptions, TrajectoryState};
use qpath::oracle::{born_distribution, exhaustive_trajectory_distribution, simulate_dense};
use qpath::pathsum::{neighbors, step_amplitudes, EngineConfig, PathSumEngine};
use qpath::qfile::load_dir;
use rand::Rng as _;

#[test]
fn neighborhood_norm_is_preserved() {
    let mut rng = seeded(77);
    for _ in 0..20 {
        let b = random_circuit(&mut rng, 4, 10, 10, true);
        let mut e = PathSumEngine::for_bundle(&b, &EngineConfig::default()).unwrap();
        for (pc, op) in b.circuit.ops().iter().enumerate() {
            let s = state(rng.gen_range(0..16), 4);
            let pre: Vec<Complex64> = neighbors(s, op).into_iter().map(|n| e.amp(n, pc).unwrap()).collect();
            let post = step_amplitudes(&pre, b.circuit.operator_of(op)).unwrap();
            let mass = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
            assert!((mass(&pre) - mass(&post)).abs() < 1e-12);
            for (n, z) in neighbors(s, op).into_iter().zip(&post) {
                assert!(max_abs_diff(e.amp(n, pc + 1).unwrap(), *z) < 1e-12);
            }
        }
    }
}

#[test]
fn exhaustive_walk_reproduces_born_rule() {
    let mut rng = seeded(404);
    for case in 0..24 {
        let width = 1 + case % 4;
        let ops = rng.gen_range(1..=10);
        let b = random_circuit(&mut rng, width, ops, 10, case % 2 == 0);
        let walk = exhaustive_trajectory_distribution(&b).unwrap();
        let born = born_distribution(&simulate_dense(&b, b.circuit.len()).unwrap());
        for (p, q) in walk.iter().zip(&born) {
            assert!((p - q).abs() <= 1e-9, "case {case}: {walk:?} vs {born:?}");
        }
    }
}

#[test]
fn sampled_hadamard_layer_is_uniform() {
    let b = hadamard_layer(3);
    let mut e = PathSumEngine::for_bundle(&b, &EngineConfig::default()).unwrap();
    let runs = 20_000;
    let mut counts = [0usize; 8];
    for seed in 0..runs {
        let out = run(&mut e, Rng::new(seed), RunOptions { trace: false, share_cache: true }).unwrap();
        counts[out.final_state.bits() as usize] += 1;
    }
    let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / runs as f64).collect();
    assert!(freq.iter().all(|f| (f - 0.125).abs() <= 0.01), "{freq:?}");
    assert!(tvd(&freq, &[0.125; 8]) <= 0.02);
}

#[test]
fn one_draw_per_nontrivial_gate() {
    let b = adder(3, 4, 5);
    let mut e = PathSumEngine::for_bundle(&b, &EngineConfig::default()).unwrap();
    for seed in 0..10 {
        let mut traj = TrajectoryState::start(&e, Rng::new(seed), false).unwrap();
        while !traj.is_done(&e) {
            traj = step_forward(traj, &mut e).unwrap();
        }
        let mut expect = Rng::new(seed);
        for _ in 0..b.circuit.nontrivial_count() {
            expect.next_u64();
        }
        assert_eq!(traj.rng, expect);
    }
}

#[test]
fn fig1_bundle_adds_one_and_one() {
    let (b, warnings) = load_dir(data_dir().join("fig1")).unwrap();
    assert!(warnings.is_empty());
    let mut e = PathSumEngine::for_bundle(&b, &EngineConfig::default()).unwrap();
    for seed in 0..100 {
        let out = run(&mut e, Rng::new(seed), RunOptions::default()).unwrap();
        assert_eq!(out.final_state.to_string(), "00010010", "seed {seed}");
        assert!(max_abs_diff(out.final_amp, Complex64::new(1.0, 0.0)) <= 1e-9);
    }
}

fn check_sum(n: u32, a: u64, b: u64, seeds: u64) {
    let bundle = adder(n, a, b);
    let w = bundle.circuit.width();
    let sum = (a + b) % (1 << n);
    let mut e = PathSumEngine::for_bundle(&bundle, &EngineConfig::default()).unwrap();
    for seed in 0..seeds {
        let out = run(&mut e, Rng::new(seed), RunOptions::default()).unwrap();
        assert_eq!(out.final_state.field(0, n), sum, "n={n} {a}+{b}");
        assert_eq!(out.final_state.field(n, n), b);
        assert!(max_abs_diff(out.final_amp, Complex64::new(1.0, 0.0)) <= 1e-9);
    }
    if w <= 8 {
        let p = born_distribution(&simulate_dense(&bundle, bundle.circuit.len()).unwrap());
        assert!((p[(sum | (b << n)) as usize] - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn adder_sweep_exhaustive_small() {
    for n in 1..=4 {
        for a in 0..1 << n {
            for b in 0..1 << n {
                check_sum(n, a, b, if n <= 3 { 3 } else { 1 });
            }
        }
    }
}

#[test]
fn adder_sweep_random_wider() {
    let mut rng = seeded(8);
    for n in [5, 6] {
        for _ in 0..50 {
            check_sum(n, rng.gen_range(0..1 << n), rng.gen_range(0..1 << n), 1);
        }
    }
}
