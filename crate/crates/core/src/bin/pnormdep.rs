use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use pnormdep::cli::{
    certificate_json, emit_curves, exit_code_for, parse_jobspec, run, Command, EXIT_INPUT,
};
use pnormdep::dependence::make_grid;

/// Certify linear (in)dependence of p-norm functions.
#[derive(Parser, Debug)]
#[command(version)]
struct Args {
    /// zeros | norms | monodromy | equiv | analyze
    command: Command,
    /// Job file (JSON)
    #[arg(long)]
    input: PathBuf,
    /// Write the certificate here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write norm curves over the job's grid as CSV
    #[arg(long)]
    curves: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

fn fail(code: i32, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("pnormdep: {msg}");
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();

    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(EXIT_INPUT, e);
        }
    }

    let text = match fs::read_to_string(&args.input) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_INPUT, format!("{}: {e}", args.input.display())),
    };
    let job = match parse_jobspec(&text, Some(args.command)) {
        Ok(j) => j,
        Err(e) => return fail(EXIT_INPUT, format!("{}: {e}", args.input.display())),
    };

    let started = Instant::now();
    let outcome = match run(&job) {
        Ok(o) => o,
        Err(e) => return fail(exit_code_for(&e), e),
    };
    let timing_ms = started.elapsed().as_millis() as u64;

    if let Some(path) = &args.curves {
        let written = make_grid(job.interval.0, job.interval.1, job.grid_count())
            .and_then(|g| emit_curves(&job.vectors, &g.exponents(), path));
        if let Err(e) = written {
            return fail(exit_code_for(&e), e);
        }
    }

    let cert = match certificate_json(&text, job.command, &outcome.payload, timing_ms) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    match &args.output {
        Some(path) => {
            if let Err(e) = fs::write(path, cert + "\n") {
                return fail(EXIT_INPUT, format!("{}: {e}", path.display()));
            }
        }
        None => println!("{cert}"),
    }
    ExitCode::from(outcome.exit_code as u8)
}
