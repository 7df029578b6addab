use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jbtriple::lab::{
    inspect, parse_inline, read_element_file, render_inspection, run_suite, ExperimentConfig, InspectOp, OutputFormat,
    DEFAULT_EPSILONS,
};
use jbtriple::{SpaceDescriptor, Tolerance, DEFAULT_RTOL};

/// Jordan triple experiments on rectangular matrix factors.
#[derive(Parser)]
#[command(name = "jbtriple", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write its report.
    Run(RunArgs),
    /// Report norm, rank, conorms, distances and λ for one element.
    Inspect(InspectArgs),
    /// List the available suites.
    Suites,
}

#[derive(Args)]
struct RunArgs {
    /// axioms, peirce, bp-core, perturbation, richness, linf-sum, distance, lambda, continuity or conorm-cstar
    suite: String,
    /// Factor shapes, e.g. 2x2 or 2x2,3x2.
    #[arg(long, default_value = "2x2")]
    space: SpaceDescriptor,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative tolerance; defaults to $JBTRIPLE_RTOL, then 1e-9.
    #[arg(long, env = "JBTRIPLE_RTOL", default_value_t = DEFAULT_RTOL)]
    rtol: f64,
    /// Strictly decreasing ε schedule, comma separated.
    #[arg(long, value_delimiter = ',')]
    epsilons: Option<Vec<f64>>,
    /// Report destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: OutputFormat,
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "source")]
struct Source {
    /// Element file: {"space": [[m,n],…], "blocks": [[[re,im],…],…]}.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Inline element, e.g. "diag(3,0)" or "eye(2); [[1,0,0],[0,1,0]]".
    #[arg(long)]
    inline: Option<String>,
}

#[derive(Args)]
struct InspectArgs {
    #[command(flatten)]
    source: Source,
    /// Subset of dist, lambda, conorm, classify; all when omitted.
    #[arg(long, value_delimiter = ',')]
    ops: Vec<InspectOp>,
    #[arg(long, env = "JBTRIPLE_RTOL", default_value_t = DEFAULT_RTOL)]
    rtol: f64,
    /// Print JSON instead of the aligned table.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Inspect(args) => inspect_cmd(args),
        Command::Suites => {
            for s in jbtriple::lab::SUITES {
                println!("{s}");
            }
            ExitCode::SUCCESS
        }
    }
}

fn run(args: RunArgs) -> ExitCode {
    let config = ExperimentConfig {
        space: args.space,
        trials: args.trials,
        seed: args.seed,
        rtol: args.rtol,
        epsilons: args.epsilons.unwrap_or_else(|| DEFAULT_EPSILONS.to_vec()),
        out: args.out,
        format: args.format,
    };
    let report = match run_suite(&args.suite, &config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if config.out.is_some() {
        if let Err(e) = report.write() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    } else {
        match report.render(config.format) {
            Ok(text) => println!("{text}"),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    }
    let s = &report.summary;
    eprintln!(
        "{}: {}/{} passed, max residual {:.3e}, {:.2}s",
        report.suite, s.passed, s.trials, s.max_residual, s.wall_time_s
    );
    for flag in &s.open_question_flags {
        eprintln!("note: {flag}");
    }
    for d in &s.failing_digests {
        eprintln!("failed: {d}");
    }
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn inspect_cmd(args: InspectArgs) -> ExitCode {
    if !(args.rtol > 0.0 && args.rtol <= 1e-3) {
        eprintln!("error: rtol {} is outside (0, 1e-3]", args.rtol);
        return ExitCode::from(2);
    }
    let element = match (&args.source.file, &args.source.inline) {
        (Some(path), _) => read_element_file(path),
        (_, Some(expr)) => parse_inline(expr),
        _ => unreachable!("clap enforces exactly one source"),
    };
    let element = match element {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = inspect(&element, &args.ops, Tolerance(args.rtol));
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("json value"));
    } else {
        print!("{}", render_inspection(&report));
    }
    ExitCode::SUCCESS
}
