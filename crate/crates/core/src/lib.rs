//! Space-efficient quantum circuit simulation.
//!
//! Instead of storing the `2^s` amplitudes of an `s`-bit machine, this crate
//! keeps one classical basis state and walks it forward through the circuit,
//! choosing each successor at random with the probability the full
//! wavefunction would assign. The amplitudes that choice needs are recomputed
//! on demand by summing over predecessor paths, in memory linear in the
//! number of operations.
//!
//! * [`model`]: basis states, operator matrices, circuits.
//! * [`pathsum`]: amplitude evaluation, recursive and explicit-stack.
//! * [`bohm`]: sampled trajectories.
//! * [`oracle`]: dense state-vector reference.
//! * [`qfile`]: the four-file circuit format.
//! * [`adder`]: Draper adder generator.
//! * [`commands`]: the command-line operations.
//!
//! ```
//! use qpath::adder::{gen_draper, AdderSpec};
//! use qpath::bohm::{run, Rng, RunOptions};
//! use qpath::pathsum::{EngineConfig, PathSumEngine};
//!
//! let bundle = gen_draper(&AdderSpec::new(4, 1, 1)?)?;
//! let mut engine = PathSumEngine::for_bundle(&bundle, &EngineConfig::default())?;
//! let out = run(&mut engine, Rng::new(7), RunOptions::default())?;
//! assert_eq!(out.final_state.to_string(), "00010010");
//! # Ok::<(), qpath::Error>(())
//! ```

pub mod adder;
pub mod bohm;
pub mod commands;
mod error;
pub mod model;
pub mod numfmt;
pub mod oracle;
pub mod pathsum;
pub mod qfile;

pub use error::{Error, ParseError, Result};
pub use model::{BasisState, Circuit, ComplexAmp, Operation, OperatorMatrix, Register};
pub use qfile::CircuitBundle;

// The README and every chapter of the guide are compiled as doctest modules.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/path-sums.md")]
    mod path_sums {}
    #[doc = include_str!("../../../book/src/trajectories.md")]
    mod trajectories {}
    #[doc = include_str!("../../../book/src/cache-and-hybrid.md")]
    mod cache_and_hybrid {}
    #[doc = include_str!("../../../book/src/file-format.md")]
    mod file_format {}
    #[doc = include_str!("../../../book/src/adders.md")]
    mod adders {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
