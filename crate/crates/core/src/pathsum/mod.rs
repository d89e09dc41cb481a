//! Amplitude evaluation by summing over predecessor paths.
//!
//! The amplitude of basis state `x` after the first `pc` operations is
//!
//! ```text
//! amp(x, pc) = Σ_ℓ' M[ℓ, ℓ'] · amp(pred_ℓ'(x), pc − 1)
//! ```
//!
//! where `M` is the matrix of operation `pc − 1`, `ℓ` is the local index of `x`
//! on that operation's operands and `pred_ℓ'(x)` is `x` with those operands set
//! to `ℓ'`. At `pc = 0` the input state carries amplitude 1. A diagonal
//! operator has a single predecessor, so runs of phase gates cost one call
//! per gate.
//!
//! Two kernels evaluate this sum in the same order and return bit-identical
//! results. [`PathSumEngine::calc_amp`] recurses on the host stack.
//! [`PathSumEngine::calc_amp_iterative`] keeps one [`StackRecord`] per pending
//! level, so its working memory is linear in the circuit length.

mod cache;

use std::mem::size_of;

pub use cache::{AmpCache, DEFAULT_CAPACITY};

use crate::error::{Error, Result};
use crate::model::{gather, scatter, BasisState, Circuit, ComplexAmp, Operation, OperatorMatrix};
use crate::oracle;
use crate::qfile::CircuitBundle;

/// Longest circuit the recursive kernel accepts.
pub const RECURSION_LIMIT: usize = 10_000;

const ZERO: ComplexAmp = ComplexAmp::new(0.0, 0.0);
const ONE: ComplexAmp = ComplexAmp::new(1.0, 0.0);

/// Which amplitude kernel an engine uses by default.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Kernel {
    Recursive,
    #[default]
    Iterative,
}

/// Where the path sum bottoms out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum HybridMode {
    /// Recurse down to the classical input at `pc = 0`.
    #[default]
    Off,
    /// Dense-simulate the first `p` operations and recurse down to that snapshot.
    Prefix(usize),
    /// Use a dense prefix if a full state vector fits in this many bytes.
    MemoryBudget(u128),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    pub kernel: Kernel,
    /// Cached amplitudes; zero disables the cache.
    pub cache_capacity: usize,
    pub hybrid: HybridMode,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self { kernel: Kernel::Iterative, cache_capacity: DEFAULT_CAPACITY, hybrid: HybridMode::Off }
    }
}

impl EngineConfig {
    pub fn uncached(kernel: Kernel) -> Self {
        Self { kernel, cache_capacity: 0, hybrid: HybridMode::Off }
    }
}

/// Work counters. All counts only grow while an engine runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Metrics {
    /// Amplitudes actually evaluated (cache hits excluded).
    pub calc_amp_calls: u64,
    /// Deepest level below the requested `pc` that was visited.
    pub max_depth: u64,
    /// Matrix row products in the path sum plus full neighborhood updates.
    pub matrix_mults: u64,
    pub cache_hits: u64,
    pub cache_misses: u64,
    /// Largest explicit-stack size reached by the iterative kernel.
    pub peak_stack_entries: u64,
}

/// One pending level of the iterative kernel: the partial sum and the
/// predecessor being evaluated, plus the row of the state being summed so the
/// operand bits can be restored on the way up.
#[derive(Clone, Copy, Debug)]
pub struct StackRecord {
    acc: ComplexAmp,
    row: u8,
    next: u8,
}

/// Bytes per explicit-stack level.
pub const STACK_RECORD_BYTES: usize = size_of::<StackRecord>();
const _: () = assert!(STACK_RECORD_BYTES <= 32);

#[derive(Debug)]
struct Gate<'c> {
    matrix: &'c OperatorMatrix,
    operands: &'c [u32],
    dim: usize,
    trivial: bool,
}

#[derive(Debug)]
enum Base {
    Input,
    Snapshot { prefix: usize, amps: Vec<ComplexAmp> },
}

/// Evaluates amplitudes of one circuit from one classical input.
#[derive(Debug)]
pub struct PathSumEngine<'c> {
    circuit: &'c Circuit,
    input: BasisState,
    gates: Vec<Gate<'c>>,
    base: Base,
    kernel: Kernel,
    cache: AmpCache,
    metrics: Metrics,
}

impl<'c> PathSumEngine<'c> {
    pub fn new(circuit: &'c Circuit, input: BasisState, config: &EngineConfig) -> Result<Self> {
        if input.width() != circuit.width() {
            return Err(Error::InvalidCircuit(format!(
                "input has {} bits, circuit has {}",
                input.width(),
                circuit.width()
            )));
        }
        let gates = circuit
            .ops()
            .iter()
            .map(|op| {
                let matrix = circuit.operator_of(op);
                Gate { matrix, operands: &op.operands, dim: matrix.dim(), trivial: matrix.is_trivial() }
            })
            .collect();
        let base = match config.hybrid {
            HybridMode::Off => Base::Input,
            HybridMode::Prefix(p) => snapshot_base(circuit, input, p, oracle::DEFAULT_BUDGET_BYTES)?,
            HybridMode::MemoryBudget(budget) => {
                let bytes = oracle::dense_bytes(circuit.width());
                if bytes > budget {
                    return Err(Error::Hybrid(format!(
                        "a {}-bit state vector needs {bytes} bytes, budget is {budget} bytes",
                        circuit.width()
                    )));
                }
                // The snapshot costs the same at every prefix, so take all of it.
                snapshot_base(circuit, input, circuit.len(), budget)?
            }
        };
        Ok(Self {
            circuit,
            input,
            gates,
            base,
            kernel: config.kernel,
            cache: AmpCache::new(config.cache_capacity),
            metrics: Metrics::default(),
        })
    }

    pub fn for_bundle(bundle: &'c CircuitBundle, config: &EngineConfig) -> Result<Self> {
        Self::new(&bundle.circuit, bundle.input, config)
    }

    pub fn circuit(&self) -> &'c Circuit {
        self.circuit
    }

    pub fn input(&self) -> BasisState {
        self.input
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    /// Operation count below which amplitudes come from the base, 0 unless hybrid.
    pub fn base_pc(&self) -> usize {
        match &self.base {
            Base::Input => 0,
            Base::Snapshot { prefix, .. } => *prefix,
        }
    }

    /// The dense prefix state, when running hybrid.
    pub fn snapshot(&self) -> Option<&[ComplexAmp]> {
        match &self.base {
            Base::Input => None,
            Base::Snapshot { amps, .. } => Some(amps),
        }
    }

    pub fn metrics(&self) -> Metrics {
        Metrics { cache_hits: self.cache.hits(), cache_misses: self.cache.misses(), ..self.metrics }
    }

    pub fn cache(&self) -> &AmpCache {
        &self.cache
    }

    pub fn clear_cache(&mut self) {
        self.cache.clear();
    }

    /// Amplitude of `state` after `pc` operations, using the configured kernel.
    pub fn amp(&mut self, state: BasisState, pc: usize) -> Result<ComplexAmp> {
        match self.kernel {
            Kernel::Recursive => self.calc_amp(state, pc),
            Kernel::Iterative => self.calc_amp_iterative(state, pc),
        }
    }

    /// Amplitude of `state` after `pc` operations, by host-stack recursion.
    pub fn calc_amp(&mut self, state: BasisState, pc: usize) -> Result<ComplexAmp> {
        if self.circuit.len() > RECURSION_LIMIT {
            return Err(Error::DepthLimit { ops: self.circuit.len(), limit: RECURSION_LIMIT });
        }
        self.check_query(state, pc)?;
        Ok(self.recurse(state.bits(), pc, 0))
    }

    fn recurse(&mut self, bits: u64, pc: usize, depth: u64) -> ComplexAmp {
        self.metrics.max_depth = self.metrics.max_depth.max(depth);
        if let Some(v) = self.cache.get(pc, bits) {
            return v;
        }
        self.metrics.calc_amp_calls += 1;
        let value = if pc == self.base_pc() {
            self.base_amp(bits)
        } else {
            let (matrix, operands, dim, trivial) = {
                let g = &self.gates[pc - 1];
                (g.matrix, g.operands, g.dim, g.trivial)
            };
            let row = gather(bits, operands);
            self.metrics.matrix_mults += 1;
            if trivial {
                matrix.get(row, row) * self.recurse(bits, pc - 1, depth + 1)
            } else {
                let mut acc = ZERO;
                for l in 0..dim {
                    let pred = scatter(bits, operands, l);
                    acc += matrix.get(row, l) * self.recurse(pred, pc - 1, depth + 1);
                }
                acc
            }
        };
        self.cache.put(pc, bits, value);
        value
    }

    /// Same contract and summation order as [`calc_amp`](Self::calc_amp), with
    /// an explicit stack of at most `pc` [`StackRecord`]s.
    pub fn calc_amp_iterative(&mut self, state: BasisState, pc: usize) -> Result<ComplexAmp> {
        self.check_query(state, pc)?;
        let top = pc;
        let base_pc = self.base_pc();
        let mut stack: Vec<StackRecord> = Vec::with_capacity(top - base_pc);
        let mut bits = state.bits();
        let mut pc = top;

        'descend: loop {
            self.metrics.max_depth = self.metrics.max_depth.max(stack.len() as u64);
            let mut value = match self.cache.get(pc, bits) {
                Some(v) => v,
                None => {
                    self.metrics.calc_amp_calls += 1;
                    if pc == base_pc {
                        let v = self.base_amp(bits);
                        self.cache.put(pc, bits, v);
                        v
                    } else {
                        let g = &self.gates[pc - 1];
                        let row = gather(bits, g.operands);
                        self.metrics.matrix_mults += 1;
                        if g.trivial {
                            stack.push(StackRecord { acc: ZERO, row: row as u8, next: row as u8 });
                        } else {
                            stack.push(StackRecord { acc: ZERO, row: row as u8, next: 0 });
                            bits = scatter(bits, g.operands, 0);
                        }
                        self.metrics.peak_stack_entries = self.metrics.peak_stack_entries.max(stack.len() as u64);
                        pc -= 1;
                        continue 'descend;
                    }
                }
            };

            // Fold `value`, the amplitude at (bits, pc), into the pending levels.
            loop {
                let Some(rec) = stack.last_mut() else {
                    return Ok(value);
                };
                let g = &self.gates[pc];
                if g.trivial {
                    value = g.matrix.get(rec.row as usize, rec.row as usize) * value;
                    stack.pop();
                } else {
                    rec.acc += g.matrix.get(rec.row as usize, rec.next as usize) * value;
                    rec.next += 1;
                    if (rec.next as usize) < g.dim {
                        bits = scatter(bits, g.operands, rec.next as usize);
                        continue 'descend;
                    }
                    value = rec.acc;
                    bits = scatter(bits, g.operands, rec.row as usize);
                    stack.pop();
                }
                pc += 1;
                self.cache.put(pc, bits, value);
            }
        }
    }

    fn check_query(&self, state: BasisState, pc: usize) -> Result<()> {
        if state.width() != self.circuit.width() {
            return Err(Error::Range(format!(
                "state has {} bits, circuit has {}",
                state.width(),
                self.circuit.width()
            )));
        }
        if pc > self.circuit.len() {
            return Err(Error::Range(format!("pc {pc} beyond {} operations", self.circuit.len())));
        }
        if pc < self.base_pc() {
            return Err(Error::Hybrid(format!("pc {pc} lies inside the dense prefix of {}", self.base_pc())));
        }
        Ok(())
    }

    #[inline]
    fn base_amp(&self, bits: u64) -> ComplexAmp {
        match &self.base {
            Base::Input => {
                if bits == self.input.bits() {
                    ONE
                } else {
                    ZERO
                }
            }
            Base::Snapshot { amps, .. } => amps[bits as usize],
        }
    }

    pub(crate) fn count_neighborhood_update(&mut self) {
        self.metrics.matrix_mults += 1;
    }
}

fn snapshot_base(circuit: &Circuit, input: BasisState, prefix: usize, budget: u128) -> Result<Base> {
    if prefix > circuit.len() {
        return Err(Error::Hybrid(format!("prefix {prefix} beyond {} operations", circuit.len())));
    }
    let dense = oracle::simulate_circuit(circuit, input, prefix, budget)?;
    Ok(Base::Snapshot { prefix, amps: dense.into_amplitudes() })
}

/// The `2^m` states that agree with `state` off the operands of `op`, in local-index order.
pub fn neighbors(state: BasisState, op: &Operation) -> Vec<BasisState> {
    (0..1usize << op.operands.len()).map(|l| state.with_bits(scatter(state.bits(), &op.operands, l))).collect()
}

/// `matrix · amps`.
pub fn step_amplitudes(amps: &[ComplexAmp], matrix: &OperatorMatrix) -> Result<Vec<ComplexAmp>> {
    let dim = matrix.dim();
    if amps.len() != dim {
        return Err(Error::Range(format!("{} amplitudes for a {dim}x{dim} operator", amps.len())));
    }
    Ok((0..dim)
        .map(|r| {
            let mut acc = ZERO;
            for (c, &a) in amps.iter().enumerate() {
                acc += matrix.get(r, c) * a;
            }
            acc
        })
        .collect())
}
