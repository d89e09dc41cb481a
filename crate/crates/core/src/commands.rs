//! The operations behind the `qpath` command-line tool.
//!
//! Every command returns its standard output as a string so the binary stays a
//! thin argument parser and the output formats can be tested directly.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::adder::{gen_draper, AdderSpec};
use crate::bohm::{self, Rng, RunOptions, RunOutcome};
use crate::error::{Error, Result};
use crate::model::{BasisState, ComplexAmp};
use crate::numfmt::{format_complex, format_sig, TRACE_DIGITS};
use crate::oracle;
use crate::pathsum::{EngineConfig, HybridMode, Kernel, Metrics, PathSumEngine, DEFAULT_CAPACITY};
use crate::qfile::{self, BundlePaths, CircuitBundle};

pub const BANNER: &str = "Welcome to qpath, a path-sum quantum circuit simulator.\n(command-line version)\n\n\n";

pub const METRICS_SCHEMA: &str = "# qpath metrics v1";
pub const METRICS_HEADER: &str =
    "width,ops,nontrivial_ops,calc_amp_calls,max_depth,matrix_mults,cache_hits,cache_misses,peak_stack_entries,wall_time_s";
pub const BENCH_SCHEMA: &str = "# qpath bench v1";
pub const BENCH_HEADER: &str = "n,cache_capacity,width,ops,nontrivial_ops,calc_amp_calls,max_depth,matrix_mults,cache_hits,cache_misses,peak_stack_entries,wall_time_s,calls_ratio";

/// Settings shared by `run`, `amp` and `oracle`.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub paths: BundlePaths,
    pub seed: u64,
    pub kernel: Kernel,
    pub cache_capacity: usize,
    pub hybrid: HybridMode,
    pub trace: bool,
    pub metrics_path: Option<PathBuf>,
    /// Dense-state budget for the `oracle` command.
    pub dense_budget: u128,
}

impl RunConfig {
    pub fn new(paths: BundlePaths) -> Self {
        Self {
            paths,
            seed: 0,
            kernel: Kernel::Iterative,
            cache_capacity: DEFAULT_CAPACITY,
            hybrid: HybridMode::Off,
            trace: false,
            metrics_path: None,
            dense_budget: oracle::DEFAULT_BUDGET_BYTES,
        }
    }

    pub fn for_dir(dir: impl AsRef<Path>) -> Self {
        Self::new(BundlePaths::in_dir(dir))
    }

    /// Sets the hybrid base from at most one of the two selectors.
    pub fn with_hybrid(mut self, prefix: Option<usize>, budget: Option<u128>) -> Result<Self> {
        self.hybrid = match (prefix, budget) {
            (None, None) => HybridMode::Off,
            (Some(p), None) => HybridMode::Prefix(p),
            (None, Some(b)) => HybridMode::MemoryBudget(b),
            (Some(_), Some(_)) => {
                return Err(Error::Hybrid("a prefix and a memory budget are mutually exclusive".into()))
            }
        };
        Ok(self)
    }

    pub fn engine_config(&self) -> EngineConfig {
        EngineConfig { kernel: self.kernel, cache_capacity: self.cache_capacity, hybrid: self.hybrid }
    }
}

/// Text for standard output plus any non-fatal parser warnings.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub warnings: Vec<String>,
}

fn load(config: &RunConfig) -> Result<(CircuitBundle, Vec<String>)> {
    let (bundle, warnings) = qfile::load(&config.paths)?;
    Ok((bundle, warnings.iter().map(|w| format!("warning: {w}")).collect()))
}

/// `W-1->BITS<-0 (W bits)`.
pub fn format_state(state: BasisState) -> String {
    format!("{}->{}<-0 ({} bits)", state.width() - 1, state, state.width())
}

/// Amplitude components smaller than this print as `0`.
pub const DISPLAY_NOISE_FLOOR: f64 = 1e-9;

/// `(RE + i*IM)` at six significant digits, with rounding residue cleared.
pub fn format_amp(z: ComplexAmp) -> String {
    let clean = |x: f64| if x.abs() < DISPLAY_NOISE_FLOOR { 0.0 } else { x };
    format_complex(ComplexAmp::new(clean(z.re), clean(z.im)), TRACE_DIGITS)
}

/// Renders a finished run in the trace layout, banner excluded.
pub fn render_run(outcome: &RunOutcome, op_count: usize, trace: bool) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "SEQCSim::run(): Initial state is {} ==> {}.",
        format_state(outcome.initial_state),
        format_amp(outcome.initial_amp)
    )
    .unwrap();
    if trace {
        for rec in &outcome.trace {
            writeln!(out, "SEQCSim::Bohm_step_forwards(): (tPC={})", rec.pc).unwrap();
            writeln!(out, "The new current state is {} ==> {}.", format_state(rec.state), format_amp(rec.amp)).unwrap();
        }
    } else {
        writeln!(
            out,
            "SEQCSim::run(): Final state is {} ==> {}.",
            format_state(outcome.final_state),
            format_amp(outcome.final_amp)
        )
        .unwrap();
    }
    writeln!(out, "SEQCSim::done(): The PC value {op_count} is >= the number of operations {op_count}.").unwrap();
    writeln!(out, "We are done!").unwrap();
    out
}

/// One data row of the metrics CSV.
pub fn metrics_row(bundle: &CircuitBundle, m: &Metrics, wall_seconds: f64) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{:.6}",
        bundle.circuit.width(),
        bundle.circuit.len(),
        bundle.circuit.nontrivial_count(),
        m.calc_amp_calls,
        m.max_depth,
        m.matrix_mults,
        m.cache_hits,
        m.cache_misses,
        m.peak_stack_entries,
        wall_seconds
    )
}

fn write_metrics(path: &Path, row: &str) -> Result<()> {
    let text = format!("{METRICS_SCHEMA}\n{METRICS_HEADER}\n{row}\n");
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// Runs one seeded trajectory and prints it.
pub fn cmd_run(config: &RunConfig) -> Result<Output> {
    let (bundle, warnings) = load(config)?;
    let (outcome, metrics, secs) = run_bundle(&bundle, config)?;
    let mut text = BANNER.to_string();
    text.push_str(&render_run(&outcome, bundle.circuit.len(), config.trace));
    if let Some(path) = &config.metrics_path {
        write_metrics(path, &metrics_row(&bundle, &metrics, secs))?;
    }
    Ok(Output { text, warnings })
}

/// Runs one trajectory of an in-memory bundle; returns the outcome, counters and wall time.
pub fn run_bundle(bundle: &CircuitBundle, config: &RunConfig) -> Result<(RunOutcome, Metrics, f64)> {
    let start = Instant::now();
    let mut engine = PathSumEngine::for_bundle(bundle, &config.engine_config())?;
    let outcome =
        bohm::run(&mut engine, Rng::new(config.seed), RunOptions { trace: config.trace, share_cache: false })?;
    Ok((outcome, engine.metrics(), start.elapsed().as_secs_f64()))
}

/// Prints the amplitude of `state` after `pc` operations and the metrics row.
pub fn cmd_amp(config: &RunConfig, state: &str, pc: Option<usize>) -> Result<Output> {
    let (bundle, warnings) = load(config)?;
    let state = BasisState::parse_bits(state, bundle.circuit.width())?;
    let pc = pc.unwrap_or(bundle.circuit.len());
    let start = Instant::now();
    let mut engine = PathSumEngine::for_bundle(&bundle, &config.engine_config())?;
    let amp = engine.amp(state, pc)?;
    let row = metrics_row(&bundle, &engine.metrics(), start.elapsed().as_secs_f64());
    if let Some(path) = &config.metrics_path {
        write_metrics(path, &row)?;
    }
    Ok(Output { text: format!("{}\n{METRICS_HEADER}\n{row}\n", format_amp(amp)), warnings })
}

/// Lists every basis state with probability above 1e-12 after `upto_pc` operations.
pub fn cmd_oracle(config: &RunConfig, upto_pc: Option<usize>) -> Result<Output> {
    let (bundle, warnings) = load(config)?;
    let pc = upto_pc.unwrap_or(bundle.circuit.len());
    let dense = oracle::simulate_circuit(&bundle.circuit, bundle.input, pc, config.dense_budget)?;
    let mut rows: Vec<(f64, u64, ComplexAmp)> = dense
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(x, &z)| (z.norm_sqr(), x as u64, z))
        .filter(|&(p, _, _)| p > 1e-12)
        .collect();
    rows.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut text = String::new();
    for (p, x, z) in rows {
        let state = BasisState::new(x, bundle.circuit.width())?;
        writeln!(text, "{state}  {}  {}", format_sig(p, TRACE_DIGITS), format_amp(z)).unwrap();
    }
    Ok(Output { text, warnings })
}

/// Writes the four files of a generated circuit family into `out`.
pub fn cmd_gen(kind: &str, n: u32, a: u64, b: u64, out: &Path) -> Result<Output> {
    if kind != "adder" {
        return Err(Error::Range(format!("unknown circuit kind `{kind}` (known: adder)")));
    }
    let bundle = gen_draper(&AdderSpec::new(n, a, b)?)?;
    let paths = qfile::write_dir(&bundle, out)?;
    let text = format!(
        "wrote {}-bit adder ({} operations) to {}\n",
        n,
        bundle.circuit.len(),
        paths.qopseq.parent().unwrap_or(out).display()
    );
    Ok(Output { text, warnings: vec![] })
}

/// One row of the benchmark sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchRow {
    pub n: u32,
    pub cache_capacity: usize,
    pub width: u32,
    pub ops: usize,
    pub nontrivial_ops: usize,
    pub metrics: Metrics,
    pub wall_seconds: f64,
    /// `calc_amp_calls` over the same cache setting at `n - 1`.
    pub calls_ratio: Option<f64>,
}

/// Cache settings swept by [`bench()`]: off, then the default capacity.
pub const BENCH_CACHE_SETTINGS: [usize; 2] = [0, DEFAULT_CAPACITY];

/// For each adder width, one seeded iterative-kernel trajectory with the cache off and on.
pub fn bench(min_n: u32, max_n: u32, seed: u64) -> Result<Vec<BenchRow>> {
    if min_n > max_n {
        return Err(Error::Range(format!("--min {min_n} exceeds --max {max_n}")));
    }
    let mut rows: Vec<BenchRow> = Vec::new();
    for n in min_n..=max_n {
        let bundle = gen_draper(&AdderSpec::new(n, 1, 1)?)?;
        let results: Vec<Result<(Metrics, f64)>> = std::thread::scope(|s| {
            let handles: Vec<_> = BENCH_CACHE_SETTINGS
                .iter()
                .map(|&cap| {
                    let bundle = &bundle;
                    s.spawn(move || {
                        let start = Instant::now();
                        let cfg =
                            EngineConfig { kernel: Kernel::Iterative, cache_capacity: cap, hybrid: HybridMode::Off };
                        let mut engine = PathSumEngine::for_bundle(bundle, &cfg)?;
                        bohm::run(&mut engine, Rng::new(seed), RunOptions::default())?;
                        Ok((engine.metrics(), start.elapsed().as_secs_f64()))
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("bench worker panicked")).collect()
        });
        for (&cap, result) in BENCH_CACHE_SETTINGS.iter().zip(results) {
            let (metrics, wall_seconds) = result?;
            let prev = rows.iter().rev().find(|r| r.cache_capacity == cap && r.n + 1 == n);
            let calls_ratio = prev.map(|p| metrics.calc_amp_calls as f64 / p.metrics.calc_amp_calls as f64);
            rows.push(BenchRow {
                n,
                cache_capacity: cap,
                width: bundle.circuit.width(),
                ops: bundle.circuit.len(),
                nontrivial_ops: bundle.circuit.nontrivial_count(),
                metrics,
                wall_seconds,
                calls_ratio,
            });
        }
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = format!("{BENCH_SCHEMA}\n{BENCH_HEADER}\n");
    for r in rows {
        let m = &r.metrics;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{:.6},{}",
            r.n,
            r.cache_capacity,
            r.width,
            r.ops,
            r.nontrivial_ops,
            m.calc_amp_calls,
            m.max_depth,
            m.matrix_mults,
            m.cache_hits,
            m.cache_misses,
            m.peak_stack_entries,
            r.wall_seconds,
            r.calls_ratio.map(|x| format!("{x:.4}")).unwrap_or_default()
        )
        .unwrap();
    }
    out
}

/// Runs the sweep, writes the CSV and prints a growth summary.
pub fn cmd_bench(min_n: u32, max_n: u32, out_csv: &Path, seed: u64) -> Result<Output> {
    let rows = bench(min_n, max_n, seed)?;
    std::fs::write(out_csv, bench_csv(&rows))
        .map_err(|source| Error::Io { path: out_csv.display().to_string(), source })?;
    let mut text = format!("wrote {} rows to {}\n", rows.len(), out_csv.display());
    for r in &rows {
        let cache = if r.cache_capacity == 0 { "off".to_string() } else { r.cache_capacity.to_string() };
        write!(text, "n={:<2} cache={:<8} calc_amp_calls={:<12}", r.n, cache, r.metrics.calc_amp_calls).unwrap();
        match r.calls_ratio {
            Some(x) => writeln!(text, " ratio={x:.3}").unwrap(),
            None => writeln!(text).unwrap(),
        }
    }
    Ok(Output { text, warnings: vec![] })
}
