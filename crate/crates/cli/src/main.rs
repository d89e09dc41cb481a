use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qpath::commands::{self, Output, RunConfig};
use qpath::pathsum::{Kernel, DEFAULT_CAPACITY};
use qpath::qfile::BundlePaths;
use qpath::Error;

/// Path-sum quantum circuit simulator.
///
/// Exit status: 0 success, 2 input file error, 3 numerical degeneracy,
/// 4 state too large for a dense vector, 1 anything else.
#[derive(Parser, Debug)]
#[command(name = "qpath", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample one trajectory through the circuit.
    Run {
        #[command(flatten)]
        bundle: BundleArgs,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print every step instead of only the final state.
        #[arg(long)]
        trace: bool,
    },
    /// Amplitude of one basis state after the first PC operations.
    Amp {
        #[command(flatten)]
        bundle: BundleArgs,
        #[command(flatten)]
        engine: EngineArgs,
        /// Bit string, most significant bit first.
        #[arg(long)]
        state: String,
        /// Defaults to the number of operations.
        #[arg(long)]
        pc: Option<usize>,
    },
    /// Dense state-vector simulation, listing every nonzero amplitude.
    Oracle {
        #[command(flatten)]
        bundle: BundleArgs,
        #[arg(long)]
        pc: Option<usize>,
        /// Largest dense vector to allocate, in bytes.
        #[arg(long, default_value_t = qpath::oracle::DEFAULT_BUDGET_BYTES)]
        mem_budget: u128,
    },
    /// Write the four input files of a generated circuit.
    Gen {
        #[arg(value_enum, default_value_t = Family::Adder)]
        kind: Family,
        /// Bits per addend.
        #[arg(long)]
        bits: u32,
        #[arg(long, default_value_t = 0)]
        a: u64,
        #[arg(long, default_value_t = 0)]
        b: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Call-count sweep over adder sizes, written as CSV.
    Bench {
        #[arg(long, default_value_t = 2)]
        min: u32,
        #[arg(long, default_value_t = 6)]
        max: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Family {
    Adder,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Recursive,
    Iterative,
}

#[derive(Args, Debug)]
struct BundleArgs {
    /// Directory holding qconfig.txt, qinput.txt, qoperators.txt and qopseq.txt.
    #[arg(long, default_value = ".")]
    dir: PathBuf,
    #[arg(long)]
    qconfig: Option<PathBuf>,
    #[arg(long)]
    qinput: Option<PathBuf>,
    #[arg(long)]
    qoperators: Option<PathBuf>,
    #[arg(long)]
    qopseq: Option<PathBuf>,
}

impl BundleArgs {
    fn paths(&self) -> BundlePaths {
        let mut p = BundlePaths::in_dir(&self.dir);
        let pick = |slot: &mut PathBuf, over: &Option<PathBuf>| {
            if let Some(o) = over {
                *slot = o.clone();
            }
        };
        pick(&mut p.qconfig, &self.qconfig);
        pick(&mut p.qinput, &self.qinput);
        pick(&mut p.qoperators, &self.qoperators);
        pick(&mut p.qopseq, &self.qopseq);
        p
    }
}

#[derive(Args, Debug)]
struct EngineArgs {
    #[arg(long, value_enum, default_value_t = Mode::Iterative)]
    mode: Mode,
    /// Amplitude cache entries; 0 turns the cache off.
    #[arg(long, default_value_t = DEFAULT_CAPACITY)]
    cache_cap: usize,
    /// Simulate the first P operations densely.
    #[arg(long, conflicts_with = "mem_budget")]
    hybrid_prefix: Option<usize>,
    /// Simulate densely whatever prefix fits in this many bytes.
    #[arg(long)]
    mem_budget: Option<u128>,
    /// Write a metrics CSV to this file.
    #[arg(long)]
    metrics: Option<PathBuf>,
}

impl EngineArgs {
    fn config(&self, bundle: &BundleArgs) -> Result<RunConfig, Error> {
        let mut c = RunConfig::new(bundle.paths()).with_hybrid(self.hybrid_prefix, self.mem_budget)?;
        c.kernel = match self.mode {
            Mode::Recursive => Kernel::Recursive,
            Mode::Iterative => Kernel::Iterative,
        };
        c.cache_capacity = self.cache_cap;
        c.metrics_path = self.metrics.clone();
        Ok(c)
    }
}

fn dispatch(cli: Cli) -> Result<Output, Error> {
    match cli.command {
        Command::Run { bundle, engine, seed, trace } => {
            let mut c = engine.config(&bundle)?;
            c.seed = seed;
            c.trace = trace;
            commands::cmd_run(&c)
        }
        Command::Amp { bundle, engine, state, pc } => commands::cmd_amp(&engine.config(&bundle)?, &state, pc),
        Command::Oracle { bundle, pc, mem_budget } => {
            let mut c = RunConfig::new(bundle.paths());
            c.dense_budget = mem_budget;
            commands::cmd_oracle(&c, pc)
        }
        Command::Gen { kind: Family::Adder, bits, a, b, out } => commands::cmd_gen("adder", bits, a, b, &out),
        Command::Bench { min, max, out, seed } => commands::cmd_bench(min, max, &out, seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("{w}");
            }
            print!("{}", out.text);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qpath: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
