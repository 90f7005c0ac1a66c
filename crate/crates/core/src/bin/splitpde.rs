//! Benchmark CLI: `run` integrates a model once and writes snapshots;
//! `converge` runs a temporal convergence study and emits a CSV table and a
//! log-log SVG plot.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use splitpde::harness::{self, parse_config, RunSpec};
use splitpde::Error;

#[derive(Parser)]
#[command(name = "splitpde", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Config file with line-oriented `key = value` entries; flags override.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model: caginalp or gray-scott.
    #[arg(long)]
    model: Option<String>,
    /// Scheme: pr or lie.
    #[arg(long)]
    scheme: Option<String>,
    /// Grid points per dimension (power of two).
    #[arg(long)]
    n: Option<usize>,
    /// Final time.
    #[arg(long = "t-final")]
    t_final: Option<f64>,
    /// Error norm: l2, weighted or graph (default: the model norm).
    #[arg(long)]
    norm: Option<String>,
    /// Output directory (default: $SPLITPDE_OUT or ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Treat a violated stability condition as an error instead of a warning.
    #[arg(long = "enforce-stability")]
    enforce_stability: bool,
    /// Enable the heavyweight protocols (finer-grid reference solution).
    #[arg(long)]
    long: bool,
}

impl CommonArgs {
    fn overrides(&self) -> Vec<(String, String)> {
        let mut o = Vec::new();
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                o.push((k.to_string(), v));
            }
        };
        push("model", self.model.clone());
        push("scheme", self.scheme.clone());
        push("n", self.n.map(|v| v.to_string()));
        push("t_final", self.t_final.map(|v| v.to_string()));
        push("norm", self.norm.clone());
        push("out", self.out.as_ref().map(|p| p.display().to_string()));
        if self.enforce_stability {
            o.push(("enforce_stability".into(), "true".into()));
        }
        if self.long {
            o.push(("long".into(), "true".into()));
        }
        o
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate once and write snapshot and CSV artifacts.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of time steps.
        #[arg(long = "n-steps")]
        n_steps: Option<usize>,
    },
    /// Temporal convergence study against a same-scheme reference solution.
    Converge {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated descending step sizes, e.g. `0.0625,0.03125`.
        #[arg(long = "h-list")]
        h_list: Option<String>,
        /// Step count of the reference integration.
        #[arg(long = "ref-steps")]
        ref_steps: Option<usize>,
    },
}

fn exit_code_for(e: &Error) -> ExitCode {
    match e {
        Error::Config(_) | Error::Argument(_) => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn build_spec(
    common: &CommonArgs,
    extra: Vec<(String, String)>,
    need_steps: bool,
    need_study: bool,
) -> splitpde::Result<RunSpec> {
    let mut overrides = common.overrides();
    overrides.extend(extra);
    parse_config(common.config.as_deref(), &overrides, need_steps, need_study)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { common, n_steps } => {
            let extra = n_steps
                .map(|v| vec![("n_steps".to_string(), v.to_string())])
                .unwrap_or_default();
            build_spec(common, extra, true, false).and_then(|spec| {
                let out = harness::run_simulation(&spec)?;
                for f in &out.files {
                    println!("wrote {}", f.display());
                }
                Ok(())
            })
        }
        Command::Converge {
            common,
            h_list,
            ref_steps,
        } => {
            let mut extra = Vec::new();
            if let Some(h) = h_list {
                extra.push(("h_list".to_string(), h.clone()));
            }
            if let Some(r) = ref_steps {
                extra.push(("ref_steps".to_string(), r.to_string()));
            }
            build_spec(common, extra, false, true).and_then(|spec| {
                let (report, files) = harness::run_convergence_study(&spec)?;
                println!("h,n_steps,error,observed_order");
                for (i, (h, n, e)) in report.entries.iter().enumerate() {
                    let order = if i == 0 {
                        String::new()
                    } else {
                        format!("{:.3}", report.orders[i - 1])
                    };
                    println!("{h:.6e},{n},{e:.6e},{order}");
                }
                eprintln!(
                    "wall times per run: {:?} s",
                    report
                        .wall_times
                        .iter()
                        .map(|t| (t * 1e3).round() / 1e3)
                        .collect::<Vec<_>>()
                );
                for f in &files {
                    println!("wrote {}", f.display());
                }
                Ok(())
            })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
