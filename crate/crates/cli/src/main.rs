//! `qlstm-bench`: run experiments, generate datasets, compare records.
//!
//! Exit codes: 0 success, 1 invalid input or configuration, 2 diverged training.

mod selftest;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qlstm_core::bench::{
    compare, generate_dataset, run_experiment, write_comparison_csv, DatasetSize, ExperimentConfig,
    MetricsRecord, RunStatus, Task,
};
use qlstm_core::sequence::write_sequences_csv;

#[derive(Parser)]
#[command(
    name = "qlstm-bench",
    version,
    about = "Benchmark harness for classical and quantum LSTMs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train, evaluate and write a metrics record (JSON).
    Run {
        /// TOML experiment config.
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's `output`; stdout when neither is set.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic dataset as CSV.
    Generate {
        #[arg(long)]
        task: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        n_sequences: usize,
        #[arg(long, default_value_t = 16)]
        length: usize,
        #[arg(long, default_value_t = 2)]
        delay: usize,
        #[arg(long, default_value_t = 32)]
        period: usize,
    },
    /// Tabulate metrics records as `model,metric,value,paper_predicted`.
    Compare {
        #[arg(long = "in", num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

const EXIT_INVALID: u8 = 1;
const EXIT_DIVERGED: u8 = 2;

type CliResult<T> = Result<T, String>;

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn run(config: &Path, out: Option<PathBuf>) -> CliResult<u8> {
    let config =
        ExperimentConfig::read(config).map_err(|e| format!("{}: {e}", config.display()))?;
    let record = run_experiment(&config).map_err(|e| e.to_string())?;
    match out.or_else(|| config.output.clone()) {
        Some(path) => {
            let mut w = create(&path)?;
            record.write_json(&mut w).map_err(|e| e.to_string())?;
            writeln!(w)
                .and_then(|_| w.flush())
                .map_err(|e| e.to_string())?;
        }
        None => {
            let mut w = io::stdout().lock();
            record.write_json(&mut w).map_err(|e| e.to_string())?;
            writeln!(w).map_err(|e| e.to_string())?;
        }
    }
    match &record.status {
        RunStatus::Completed => Ok(0),
        RunStatus::Diverged {
            stage,
            iteration,
            cost,
        } => {
            eprintln!("training diverged during {stage} at iteration {iteration} (loss {cost:?})");
            Ok(EXIT_DIVERGED)
        }
    }
}

fn generate(task: &str, seed: u64, out: &Path, size: DatasetSize) -> CliResult<u8> {
    let task: Task = task.parse().map_err(|e: qlstm_core::Error| e.to_string())?;
    let data = generate_dataset(task, seed, &size).map_err(|e| e.to_string())?;
    let mut w = create(out)?;
    write_sequences_csv(&mut w, &data.all()).map_err(|e| e.to_string())?;
    w.flush().map_err(|e| e.to_string())?;
    Ok(0)
}

fn compare_records(inputs: &[PathBuf], out: &Path) -> CliResult<u8> {
    let records = inputs
        .iter()
        .map(|p| MetricsRecord::read_json(open(p)?).map_err(|e| format!("{}: {e}", p.display())))
        .collect::<CliResult<Vec<_>>>()?;
    let rows = compare(&records).map_err(|e| e.to_string())?;
    let mut w = create(out)?;
    write_comparison_csv(&mut w, &rows).map_err(|e| e.to_string())?;
    w.flush().map_err(|e| e.to_string())?;
    Ok(0)
}

fn selftest() -> u8 {
    let mut failed = 0;
    for check in selftest::run_all() {
        match check.outcome {
            Ok(true) => println!("PASS {}", check.name),
            Ok(false) => {
                failed += 1;
                println!("FAIL {}", check.name);
            }
            Err(e) => {
                failed += 1;
                println!("FAIL {} ({e})", check.name);
            }
        }
    }
    if failed == 0 {
        0
    } else {
        EXIT_INVALID
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run { config, out } => run(&config, out),
        Command::Generate {
            task,
            seed,
            out,
            n_sequences,
            length,
            delay,
            period,
        } => generate(
            &task,
            seed,
            &out,
            DatasetSize {
                n_sequences,
                length,
                delay,
                period,
            },
        ),
        Command::Compare { inputs, out } => compare_records(&inputs, &out),
        Command::Selftest => Ok(selftest()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
