mod common;

use common::*;
use qpath::bohm::{run, Rng, RunOptions};
use qpath::oracle::dense_bytes;
use qpath::pathsum::{EngineConfig, HybridMode, Kernel, PathSumEngine};
use qpath::Error;

fn cfg(kernel: Kernel, cache_capacity: usize, hybrid: HybridMode) -> EngineConfig {
    EngineConfig { kernel, cache_capacity, hybrid }
}

#[test]
fn full_cache_computes_each_key_once() {
    let b = adder(4, 3, 5);
    let (w, t) = (b.circuit.width(), b.circuit.len());
    let keys = (1usize << w) * (t + 1);
    for kernel in [Kernel::Recursive, Kernel::Iterative] {
        let mut plain = PathSumEngine::for_bundle(&b, &EngineConfig::uncached(kernel)).unwrap();
        let mut cached = PathSumEngine::for_bundle(&b, &cfg(kernel, keys, HybridMode::Off)).unwrap();
        for pc in (0..=t).rev() {
            for x in (0..1u64 << w).step_by(7) {
                let s = state(x, w);
                let a = plain.amp(s, pc).unwrap();
                let c = cached.amp(s, pc).unwrap();
                assert!(max_abs_diff(a, c) <= 1e-12);
            }
        }
        let m = cached.metrics();
        assert_eq!(m.cache_misses, cached.cache().len() as u64);
        assert_eq!(m.calc_amp_calls, m.cache_misses);
        assert!(m.calc_amp_calls as usize <= keys);
        assert!(m.cache_hits > 0);
    }
}

#[test]
fn small_cache_is_transparent() {
    let b = adder(4, 9, 6);
    let (w, t) = (b.circuit.width(), b.circuit.len());
    let mut plain = PathSumEngine::for_bundle(&b, &EngineConfig::uncached(Kernel::Iterative)).unwrap();
    let mut small = PathSumEngine::for_bundle(&b, &cfg(Kernel::Iterative, 64, HybridMode::Off)).unwrap();
    let mut lookups = 0u64;
    for pc in [t, t / 2, 5] {
        for x in (0..1u64 << w).step_by(5) {
            let s = state(x, w);
            let (a, c) = (plain.amp(s, pc).unwrap(), small.amp(s, pc).unwrap());
            assert_eq!(a, c);
            lookups += 1;
        }
    }
    assert!(small.cache().len() <= 64);
    let m = small.metrics();
    // Every evaluation was preceded by exactly one failed lookup.
    assert_eq!(m.cache_misses, m.calc_amp_calls);
    assert!(m.cache_hits + m.cache_misses >= lookups);
    assert!(m.calc_amp_calls < plain.metrics().calc_amp_calls);
}

#[test]
fn cached_trajectories_match_uncached() {
    let b = adder(3, 5, 6);
    for seed in 0..20 {
        let mut on = PathSumEngine::for_bundle(&b, &EngineConfig::default()).unwrap();
        let mut off = PathSumEngine::for_bundle(&b, &EngineConfig::uncached(Kernel::Iterative)).unwrap();
        let x = run(&mut on, Rng::new(seed), RunOptions { trace: true, share_cache: false }).unwrap();
        let y = run(&mut off, Rng::new(seed), RunOptions { trace: true, share_cache: false }).unwrap();
        assert_eq!(x.final_state, y.final_state);
        for (p, q) in x.trace.iter().zip(&y.trace) {
            assert_eq!(p.state, q.state);
            assert!(max_abs_diff(p.amp, q.amp) <= 1e-12);
        }
    }
}

#[test]
fn every_prefix_split_agrees() {
    let b = adder(3, 6, 3);
    let (w, t) = (b.circuit.width(), b.circuit.len());
    let mut plain = PathSumEngine::for_bundle(&b, &EngineConfig::uncached(Kernel::Iterative)).unwrap();
    let expect: Vec<_> = (0..1u64 << w).map(|x| plain.amp(state(x, w), t).unwrap()).collect();
    for p in 0..=t {
        for kernel in [Kernel::Recursive, Kernel::Iterative] {
            let mut h = PathSumEngine::for_bundle(&b, &cfg(kernel, 0, HybridMode::Prefix(p))).unwrap();
            assert_eq!(h.base_pc(), p);
            for x in 0..1u64 << w {
                let got = h.amp(state(x, w), t).unwrap();
                assert!(max_abs_diff(got, expect[x as usize]) <= 1e-9, "p={p} x={x}");
            }
        }
    }
}

#[test]
fn hybrid_trajectories_end_at_the_sum() {
    let b = adder(3, 6, 3);
    for p in [0, 1, 9, 18] {
        let mut h = PathSumEngine::for_bundle(&b, &cfg(Kernel::Iterative, 0, HybridMode::Prefix(p))).unwrap();
        for seed in 0..5 {
            let out = run(&mut h, Rng::new(seed), RunOptions::default()).unwrap();
            assert_eq!(out.final_state.field(0, 3), 1);
            assert_eq!(out.final_state.field(3, 3), 3);
            assert!(max_abs_diff(out.final_amp, num_complex::Complex64::new(1.0, 0.0)) < 1e-9);
        }
    }
}

#[test]
fn memory_budget_policy() {
    let b = adder(3, 1, 1);
    let fits = dense_bytes(b.circuit.width());
    let h = PathSumEngine::for_bundle(&b, &cfg(Kernel::Iterative, 0, HybridMode::MemoryBudget(fits))).unwrap();
    assert_eq!(h.base_pc(), b.circuit.len());
    let err =
        PathSumEngine::for_bundle(&b, &cfg(Kernel::Iterative, 0, HybridMode::MemoryBudget(fits - 1))).unwrap_err();
    assert!(matches!(err, Error::Hybrid(_)), "{err}");
    let mut h = PathSumEngine::for_bundle(&b, &cfg(Kernel::Iterative, 0, HybridMode::Prefix(5))).unwrap();
    assert!(matches!(h.amp(state(0, 6), 4), Err(Error::Hybrid(_))));
    assert!(PathSumEngine::for_bundle(&b, &cfg(Kernel::Iterative, 0, HybridMode::Prefix(19))).is_err());
}

#[test]
fn prefix_splits_on_random_circuits() {
    let mut rng = seeded(31);
    for case in 0..12 {
        let b = random_circuit(&mut rng, 2 + case % 5, 24, 8, true);
        let (w, t) = (b.circuit.width(), b.circuit.len());
        for p in [0, 1, t / 2, t.saturating_sub(1), t] {
            let mut h = PathSumEngine::for_bundle(&b, &cfg(Kernel::Iterative, 0, HybridMode::Prefix(p))).unwrap();
            for pc in [p, (p + t) / 2, t] {
                let reference = reference_amplitudes(&b.circuit, b.input, pc);
                for x in 0..1u64 << w {
                    let got = h.amp(state(x, w), pc).unwrap();
                    assert!(max_abs_diff(got, reference[x as usize]) <= 1e-9, "case {case} p={p} pc={pc}");
                }
            }
        }
    }
}
