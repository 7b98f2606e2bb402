use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use avs_cli::{cmd_attack_suite, cmd_run, cmd_scale, scale_csv, AppName, CliError, RunConfig};
use avs_core::exec::Exec;
use avs_core::scheme::{Attack, Variant};
use avs_core::stream::{gen_stream, write_stream, GenKind};
use clap::{Args, Parser, Subcommand};

const FIELD_OVERRIDE_VAR: &str = "AVS_FIELD_OVERRIDE";

#[derive(Parser)]
#[command(
    name = "avs",
    version,
    about = "Annotated data-streaming schemes: run, attack, measure"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// One end-to-end run; prints a JSON record.
    Run {
        #[arg(long, default_value_t = 512)]
        n: usize,
        #[command(flatten)]
        common: Common,
        /// Mutate the honest help before verification.
        #[arg(long)]
        attack: Option<Attack>,
        /// Read the stream from a file of `j delta` lines instead of generating it.
        #[arg(long)]
        stream: Option<PathBuf>,
        /// Include wall time in the record.
        #[arg(long)]
        timing: bool,
    },
    /// Attacked runs across every attack kind; prints a JSON report.
    Attack {
        #[arg(long, default_value_t = 512)]
        n: usize,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 600)]
        trials: u64,
    },
    /// Honest runs over a list of universe sizes; prints CSV.
    Scale {
        /// Ascending, comma-separated.
        #[arg(long, value_delimiter = ',', default_values_t = [512usize, 4096, 32768])]
        n: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Writes a generated stream in the `j delta` format.
    Gen {
        #[arg(long, default_value_t = 512)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m_factor: u64,
        #[arg(long, default_value = "uniform")]
        gen: GenKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Stream length is m-factor · n.
    #[arg(long, default_value_t = 2)]
    m_factor: u64,
    /// emg or cm.
    #[arg(long, default_value = "emg")]
    variant: Variant,
    /// f0, finf, multiset, square or generic:<table-file>.
    #[arg(long, default_value = "f0")]
    g: AppName,
    /// uniform, zipf, turnstile or cancel.
    #[arg(long, default_value = "uniform")]
    gen: GenKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stream-length constant: m ≤ c·n (emg) or ‖f‖₁ ≤ c·n (cm).
    #[arg(long, default_value_t = 4)]
    c: u64,
    /// Summary counters per copy (default ⌈n^{2/3}⌉).
    #[arg(long)]
    capacity: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Disable data-parallel evaluation.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn config(&self, n: usize, field_override: Option<u64>) -> RunConfig {
        RunConfig {
            n,
            m_factor: self.m_factor,
            variant: self.variant,
            app: self.g.clone(),
            gen: self.gen,
            seed: self.seed,
            c: self.c,
            capacity: self.capacity,
            field_override,
            exec: if self.sequential {
                Exec::Sequential
            } else {
                Exec::Parallel
            },
            ..RunConfig::default()
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn field_override() -> Result<Option<u64>, CliError> {
    match std::env::var(FIELD_OVERRIDE_VAR) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            CliError::Config(format!(
                "{FIELD_OVERRIDE_VAR} must be an integer, got `{v}`"
            ))
        }),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let q = field_override()?;
    match cli.cmd {
        Cmd::Run {
            n,
            common,
            attack,
            stream,
            timing,
        } => {
            let cfg = RunConfig {
                attack,
                stream_file: stream,
                timing,
                ..common.config(n, q)
            };
            let rec = cmd_run(&cfg)?;
            emit(common.out.as_ref(), &json(&rec))?;
            Ok(rec.passed())
        }
        Cmd::Attack { n, common, trials } => {
            let report = cmd_attack_suite(&common.config(n, q), trials)?;
            emit(common.out.as_ref(), &json(&report))?;
            Ok(report.within_bound)
        }
        Cmd::Scale { n, common } => {
            let rows = cmd_scale(&n, &common.config(n.first().copied().unwrap_or(1), q))?;
            emit(common.out.as_ref(), &scale_csv(&rows))?;
            Ok(rows.iter().all(|r| r.matched))
        }
        Cmd::Gen {
            n,
            m_factor,
            gen,
            seed,
            out,
        } => {
            if n == 0 {
                return Err(CliError::Config("n must be positive".into()));
            }
            let s = gen_stream(gen, n, (m_factor * n as u64) as usize, seed);
            let mut buf = Vec::new();
            write_stream(&mut buf, &s)?;
            emit(out.as_ref(), &String::from_utf8(buf).expect("ascii"))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
