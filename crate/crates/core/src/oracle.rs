//! Dense state-vector reference simulator.
//!
//! This is the ground truth the path-sum engine is tested against and the
//! producer of hybrid-mode prefix snapshots. It allocates a fresh vector per
//! gate and makes no attempt to be fast.

use crate::bohm;
use crate::error::{Error, Result};
use crate::model::{gather, scatter, BasisState, Circuit, ComplexAmp, Operation};
use crate::pathsum::{EngineConfig, PathSumEngine};
use crate::qfile::CircuitBundle;

/// Default cap on a dense state vector: 2^26 amplitudes of 16 bytes.
pub const DEFAULT_BUDGET_BYTES: u128 = 1 << 30;

/// Bytes needed for a dense state of `width` bits.
pub fn dense_bytes(width: u32) -> u128 {
    16u128 << width
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    width: u32,
    amplitudes: Vec<ComplexAmp>,
}

impl DenseState {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn amplitudes(&self) -> &[ComplexAmp] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<ComplexAmp> {
        self.amplitudes
    }

    pub fn amp(&self, state: BasisState) -> ComplexAmp {
        self.amplitudes[state.bits() as usize]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Point mass on `input`, within the default 1 GiB budget.
pub fn init_dense(input: BasisState) -> Result<DenseState> {
    init_dense_with_budget(input, DEFAULT_BUDGET_BYTES)
}

pub fn init_dense_with_budget(input: BasisState, budget: u128) -> Result<DenseState> {
    let width = input.width();
    let bytes = dense_bytes(width);
    if bytes > budget {
        return Err(Error::Capacity { width, bytes, budget });
    }
    let mut amplitudes = vec![ComplexAmp::new(0.0, 0.0); 1usize << width];
    amplitudes[input.bits() as usize] = ComplexAmp::new(1.0, 0.0);
    Ok(DenseState { width, amplitudes })
}

/// Applies `op` of `circuit` to every operand sub-vector.
pub fn apply_op(dense: &DenseState, circuit: &Circuit, op: &Operation) -> DenseState {
    let m = circuit.operator_of(op);
    let dim = m.dim();
    let mut out = vec![ComplexAmp::new(0.0, 0.0); dense.amplitudes.len()];
    let mut sub = vec![ComplexAmp::new(0.0, 0.0); dim];
    for base in 0..dense.amplitudes.len() as u64 {
        if gather(base, &op.operands) != 0 {
            continue;
        }
        for (l, slot) in sub.iter_mut().enumerate() {
            *slot = dense.amplitudes[scatter(base, &op.operands, l) as usize];
        }
        for r in 0..dim {
            let mut acc = ComplexAmp::new(0.0, 0.0);
            for (c, &a) in sub.iter().enumerate() {
                acc += m.get(r, c) * a;
            }
            out[scatter(base, &op.operands, r) as usize] = acc;
        }
    }
    DenseState { width: dense.width, amplitudes: out }
}

/// State after the first `upto_pc` operations of the bundle.
pub fn simulate_dense(bundle: &CircuitBundle, upto_pc: usize) -> Result<DenseState> {
    simulate_circuit(&bundle.circuit, bundle.input, upto_pc, DEFAULT_BUDGET_BYTES)
}

pub fn simulate_circuit(circuit: &Circuit, input: BasisState, upto_pc: usize, budget: u128) -> Result<DenseState> {
    if upto_pc > circuit.len() {
        return Err(Error::Range(format!("pc {upto_pc} beyond {} operations", circuit.len())));
    }
    let mut dense = init_dense_with_budget(input, budget)?;
    for op in &circuit.ops()[..upto_pc] {
        dense = apply_op(&dense, circuit, op);
    }
    Ok(dense)
}

/// `|ψ(x)|²` for every basis state `x`.
pub fn born_distribution(dense: &DenseState) -> Vec<f64> {
    dense.amplitudes.iter().map(|z| z.norm_sqr()).collect()
}

pub const EXHAUSTIVE_MAX_WIDTH: u32 = 5;
pub const EXHAUSTIVE_MAX_OPS: usize = 12;

/// Final-state distribution induced by every trajectory of the sampled
/// basis-state walk, weighted by its exact transition probabilities.
///
/// Walks the whole trajectory tree; zero-probability branches are pruned.
pub fn exhaustive_trajectory_distribution(bundle: &CircuitBundle) -> Result<Vec<f64>> {
    let circuit = &bundle.circuit;
    if circuit.width() > EXHAUSTIVE_MAX_WIDTH || circuit.len() > EXHAUSTIVE_MAX_OPS {
        return Err(Error::Guard(format!(
            "{} bits / {} ops exceeds {EXHAUSTIVE_MAX_WIDTH} bits / {EXHAUSTIVE_MAX_OPS} ops",
            circuit.width(),
            circuit.len()
        )));
    }
    let mut engine = PathSumEngine::for_bundle(bundle, &EngineConfig::default())?;
    let mut dist = vec![0.0; 1usize << circuit.width()];
    let mut pending = vec![(bundle.input, ComplexAmp::new(1.0, 0.0), 0usize, 1.0f64)];
    while let Some((state, amp, pc, prob)) = pending.pop() {
        if pc == circuit.len() {
            dist[state.bits() as usize] += prob;
            continue;
        }
        for t in bohm::transitions(&mut engine, state, amp, pc)? {
            if t.prob > 0.0 {
                pending.push((t.state, t.amp, pc + 1, prob * t.prob));
            }
        }
    }
    Ok(dist)
}
