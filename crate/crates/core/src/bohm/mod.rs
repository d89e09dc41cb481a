//! Sampled basis-state trajectories.
//!
//! A trajectory carries one classical basis state and its amplitude forward
//! through the circuit. At each nontrivial gate the current state's
//! neighborhood is updated by the gate matrix, and the successor is drawn with
//! probability proportional to the squared post-gate amplitudes. Gates act
//! block-diagonally on neighborhoods and preserve each block's norm, so the
//! law of the sampled state after every step is exactly the Born distribution
//! of the full wavefunction at that step.

mod rng;

pub use rng::Rng;

use crate::error::{Error, Result};
use crate::model::{gather, BasisState, ComplexAmp};
use crate::pathsum::{neighbors, step_amplitudes, PathSumEngine};

/// Post-gate neighborhood mass below which the step is declared degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-18;

/// One step of a trace: the gate index applied and where it landed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    pub pc: usize,
    pub state: BasisState,
    pub amp: ComplexAmp,
}

#[derive(Clone, Debug)]
pub struct TrajectoryState {
    pub cur_state: BasisState,
    pub cur_amp: ComplexAmp,
    /// Operations applied so far.
    pub pc: usize,
    pub rng: Rng,
    pub trace: Option<Vec<TraceRecord>>,
}

impl TrajectoryState {
    /// Starts at the engine's base.
    ///
    /// Without a dense prefix this is the input state with amplitude 1 and
    /// consumes no randomness. With a prefix of `p` operations the start state
    /// is drawn from the snapshot's Born distribution with one uniform draw.
    pub fn start(engine: &PathSumEngine<'_>, mut rng: Rng, trace: bool) -> Result<Self> {
        let trace = trace.then(Vec::new);
        let (cur_state, cur_amp, pc) = match engine.snapshot() {
            None => (engine.input(), ComplexAmp::new(1.0, 0.0), 0),
            Some(amps) => {
                let probs: Vec<f64> = amps.iter().map(|z| z.norm_sqr()).collect();
                let total: f64 = probs.iter().sum();
                let probs: Vec<f64> = probs.iter().map(|p| p / total).collect();
                let i = sample_index(&probs, rng.next_f64())?;
                let state = BasisState::new(i as u64, engine.circuit().width())?;
                (state, amps[i], engine.base_pc())
            }
        };
        Ok(Self { cur_state, cur_amp, pc, rng, trace })
    }

    pub fn is_done(&self, engine: &PathSumEngine<'_>) -> bool {
        self.pc >= engine.circuit().len()
    }
}

/// A possible successor and its transition probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub state: BasisState,
    /// Amplitude of `state` after the gate.
    pub amp: ComplexAmp,
    pub prob: f64,
}

/// Successor distribution of `state`, whose amplitude after `pc` operations is
/// `amp`, across operation `pc`.
///
/// A diagonal gate has the single successor `state`. Otherwise every neighbor
/// is listed in local-index order, zero-probability ones included.
pub fn transitions(
    engine: &mut PathSumEngine<'_>,
    state: BasisState,
    amp: ComplexAmp,
    pc: usize,
) -> Result<Vec<Transition>> {
    let circuit = engine.circuit();
    let Some(op) = circuit.ops().get(pc) else {
        return Err(Error::Range(format!("pc {pc} beyond {} operations", circuit.len())));
    };
    let matrix = circuit.operator_of(op);
    if matrix.is_trivial() {
        let row = gather(state.bits(), &op.operands);
        return Ok(vec![Transition { state, amp: matrix.get(row, row) * amp, prob: 1.0 }]);
    }
    let nbrs = neighbors(state, op);
    let mut pre = Vec::with_capacity(nbrs.len());
    for &n in &nbrs {
        pre.push(if n == state { amp } else { engine.amp(n, pc)? });
    }
    let post = step_amplitudes(&pre, matrix)?;
    engine.count_neighborhood_update();
    let total: f64 = post.iter().map(|z| z.norm_sqr()).sum();
    if total.is_nan() || total < DEGENERACY_THRESHOLD {
        return Err(Error::Numeric(format!(
            "post-gate neighborhood mass {total:e} at operation #{pc} (operator {})",
            matrix.name()
        )));
    }
    Ok(nbrs.into_iter().zip(post).map(|(state, amp)| Transition { state, amp, prob: amp.norm_sqr() / total }).collect())
}

/// Advances the trajectory across operation `traj.pc`.
///
/// Nontrivial gates consume exactly one uniform draw; diagonal gates consume none.
pub fn step_forward(mut traj: TrajectoryState, engine: &mut PathSumEngine<'_>) -> Result<TrajectoryState> {
    let pc = traj.pc;
    if pc >= engine.circuit().len() {
        return Err(Error::Range(format!("trajectory already past the last operation ({pc})")));
    }
    if traj.cur_amp.norm_sqr() == 0.0 {
        return Err(Error::Numeric(format!("current state {} has zero amplitude", traj.cur_state)));
    }
    let options = transitions(engine, traj.cur_state, traj.cur_amp, pc)?;
    let chosen = if options.len() == 1 {
        options[0]
    } else {
        let probs: Vec<f64> = options.iter().map(|t| t.prob).collect();
        options[sample_index(&probs, traj.rng.next_f64())?]
    };
    traj.cur_state = chosen.state;
    traj.cur_amp = chosen.amp;
    traj.pc = pc + 1;
    if let Some(trace) = traj.trace.as_mut() {
        trace.push(TraceRecord { pc, state: chosen.state, amp: chosen.amp });
    }
    Ok(traj)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub trace: bool,
    /// Keep amplitudes cached by earlier trajectories on the same engine.
    pub share_cache: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub initial_state: BasisState,
    pub initial_amp: ComplexAmp,
    pub final_state: BasisState,
    pub final_amp: ComplexAmp,
    /// One record per step when tracing, otherwise empty.
    pub trace: Vec<TraceRecord>,
}

/// Runs one trajectory from the engine's base to the end of the circuit.
pub fn run(engine: &mut PathSumEngine<'_>, rng: Rng, options: RunOptions) -> Result<RunOutcome> {
    if !options.share_cache {
        engine.clear_cache();
    }
    let mut traj = TrajectoryState::start(engine, rng, options.trace)?;
    let (initial_state, initial_amp) = (traj.cur_state, traj.cur_amp);
    while !traj.is_done(engine) {
        traj = step_forward(traj, engine)?;
    }
    Ok(RunOutcome {
        initial_state,
        initial_amp,
        final_state: traj.cur_state,
        final_amp: traj.cur_amp,
        trace: traj.trace.unwrap_or_default(),
    })
}

/// Inverse-CDF draw: the smallest `i` whose cumulative probability exceeds `u`.
///
/// Zero-probability entries are never returned. If rounding leaves the total
/// at or below `u`, the last positive entry is returned.
pub fn sample_index(probs: &[f64], u: f64) -> Result<usize> {
    let mut last_positive = None;
    let mut cum = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            cum += p;
            last_positive = Some(i);
            if cum > u {
                return Ok(i);
            }
        }
    }
    last_positive.ok_or(Error::EmptyDistribution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{controlled_phase, hadamard, Circuit, Operation, Register};
    use crate::pathsum::{EngineConfig, Kernel};

    #[test]
    fn sample_index_examples() {
        assert_eq!(sample_index(&[0.5, 0.5], 0.25).unwrap(), 0);
        assert_eq!(sample_index(&[0.5, 0.5], 0.75).unwrap(), 1);
        assert_eq!(sample_index(&[0.5, 0.5], 0.5).unwrap(), 1);
        for u in [0.0, 0.3, 0.999_999_999] {
            assert_eq!(sample_index(&[0.0, 1.0, 0.0], u).unwrap(), 1);
            assert_eq!(sample_index(&[1.0], u).unwrap(), 0);
        }
        assert_eq!(sample_index(&[0.3, 0.3, 0.3999999999, 0.0], 0.9999999999).unwrap(), 2);
        assert!(matches!(sample_index(&[], 0.5), Err(Error::EmptyDistribution)));
        assert!(matches!(sample_index(&[0.0, 0.0], 0.5), Err(Error::EmptyDistribution)));
    }

    fn hadamard_layer(width: u32) -> Circuit {
        let ops = (0..width).map(|q| Operation::new(0, vec![q])).collect();
        Circuit::new(width, vec![Register::new("q", width, 0)], vec![hadamard()], ops).unwrap()
    }

    #[test]
    fn empty_circuit_returns_input() {
        let c = Circuit::new(3, vec![], vec![], vec![]).unwrap();
        let input = BasisState::new(5, 3).unwrap();
        let mut e = PathSumEngine::new(&c, input, &EngineConfig::default()).unwrap();
        let out = run(&mut e, Rng::new(1), RunOptions { trace: true, ..Default::default() }).unwrap();
        assert_eq!(out.final_state, input);
        assert_eq!(out.final_amp, ComplexAmp::new(1.0, 0.0));
        assert!(out.trace.is_empty());
    }

    #[test]
    fn trivial_steps_consume_nothing() {
        let ops = vec![Operation::new(0, vec![0, 1]), Operation::new(0, vec![1, 0])];
        let c = Circuit::new(2, vec![], vec![controlled_phase(90.0)], ops).unwrap();
        let input = BasisState::new(3, 2).unwrap();
        let mut e = PathSumEngine::new(&c, input, &EngineConfig::uncached(Kernel::Iterative)).unwrap();
        let rng = Rng::new(9);
        let out = run(&mut e, rng.clone(), RunOptions::default()).unwrap();
        assert_eq!(out.final_state, input);
        assert_eq!(out.final_amp, ComplexAmp::new(-1.0, 0.0));
        assert_eq!(e.metrics().calc_amp_calls, 0);
        let traj = TrajectoryState::start(&e, rng.clone(), false).unwrap();
        let traj = step_forward(traj, &mut e).unwrap();
        assert_eq!(traj.rng, rng);
    }

    #[test]
    fn self_consistent_amplitudes() {
        let c = hadamard_layer(3);
        let input = BasisState::zero(3).unwrap();
        let mut e = PathSumEngine::new(&c, input, &EngineConfig::default()).unwrap();
        let mut check = PathSumEngine::new(&c, input, &EngineConfig::uncached(Kernel::Recursive)).unwrap();
        for seed in 0..20 {
            let mut traj = TrajectoryState::start(&e, Rng::new(seed), false).unwrap();
            while !traj.is_done(&e) {
                traj = step_forward(traj, &mut e).unwrap();
                let want = check.calc_amp(traj.cur_state, traj.pc).unwrap();
                assert!((traj.cur_amp - want).norm() <= 1e-12);
                assert!(traj.cur_amp.norm() > 0.0);
            }
        }
    }

    #[test]
    fn determinism() {
        let c = hadamard_layer(4);
        let input = BasisState::zero(4).unwrap();
        let opts = RunOptions { trace: true, ..Default::default() };
        let mut e1 = PathSumEngine::new(&c, input, &EngineConfig::default()).unwrap();
        let mut e2 = PathSumEngine::new(&c, input, &EngineConfig::uncached(Kernel::Recursive)).unwrap();
        for seed in 0..10 {
            let a = run(&mut e1, Rng::new(seed), opts).unwrap();
            let b = run(&mut e2, Rng::new(seed), opts).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn stepping_past_the_end_fails() {
        let c = hadamard_layer(1);
        let input = BasisState::zero(1).unwrap();
        let mut e = PathSumEngine::new(&c, input, &EngineConfig::default()).unwrap();
        let traj = TrajectoryState::start(&e, Rng::new(0), false).unwrap();
        let traj = step_forward(traj, &mut e).unwrap();
        assert!(matches!(step_forward(traj, &mut e), Err(Error::Range(_))));
    }

    #[test]
    fn degenerate_neighborhood_is_reported() {
        // A zero-amplitude start is refused before any gate is applied.
        let c = hadamard_layer(1);
        let input = BasisState::zero(1).unwrap();
        let mut e = PathSumEngine::new(&c, input, &EngineConfig::default()).unwrap();
        let mut traj = TrajectoryState::start(&e, Rng::new(0), false).unwrap();
        traj.cur_amp = ComplexAmp::new(0.0, 0.0);
        assert!(matches!(step_forward(traj, &mut e), Err(Error::Numeric(_))));
        // Neighborhood {10, 11} carries no amplitude before H on bit 0.
        let c2 = hadamard_layer(2);
        let mut e2 = PathSumEngine::new(&c2, BasisState::zero(2).unwrap(), &EngineConfig::default()).unwrap();
        let zero = ComplexAmp::new(0.0, 0.0);
        let err = transitions(&mut e2, BasisState::new(2, 2).unwrap(), zero, 0).unwrap_err();
        assert!(matches!(err, Error::Numeric(_)));
    }
}
