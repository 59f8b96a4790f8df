//! `kappa`: command-line front end for kappa-core.
//!
//! Exit status: 0 when everything passed, 1 when a check or cross-validation
//! failed (the report is still printed), 2 on invalid input.

mod args;
mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use kappa_core::{cache, kappa, Error, Exec};
use serde_json::json;

use args::{Cli, Format};
use commands::{execute, Outcome};

const CACHE_ENV: &str = "KAPPA_CACHE";

fn cache_path(flag: Option<PathBuf>) -> Option<PathBuf> {
    match std::env::var_os(CACHE_ENV) {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => flag,
    }
}

fn load_cache(path: &PathBuf) {
    let Ok(text) = std::fs::read_to_string(path) else {
        return;
    };
    if let Err(reason) = kappa::load_verified_cache(&text) {
        eprintln!("kappa: warning: ignoring cache {}: {reason}", path.display());
    }
}

fn save_cache(path: &PathBuf) {
    if let Err(e) = std::fs::write(path, cache::global().export_json()) {
        eprintln!("kappa: warning: could not write cache {}: {e}", path.display());
    }
}

fn render(outcome: &Outcome, format: Format) -> String {
    match format {
        Format::Json => {
            let report = json!({
                "command": outcome.command,
                "inputs": outcome.inputs,
                "result": outcome.result,
                "pass": outcome.pass,
            });
            serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&outcome.header).expect("csv write");
            for row in &outcome.rows {
                w.write_record(row).expect("csv write");
            }
            String::from_utf8(w.into_inner().expect("csv flush")).expect("csv is utf-8")
        }
    }
}

#[cfg(feature = "parallel")]
fn run_with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce(Exec) -> R + Send) -> Result<R, String> {
    match jobs {
        None => Ok(f(Exec::Parallel)),
        Some(0) => Err("--jobs must be at least 1".into()),
        Some(1) => Ok(f(Exec::Sequential)),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| format!("cannot start {n} workers: {e}"))?;
            Ok(pool.install(|| f(Exec::Parallel)))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn run_with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce(Exec) -> R + Send) -> Result<R, String> {
    match jobs {
        Some(0) => Err("--jobs must be at least 1".into()),
        Some(n) if n > 1 => {
            eprintln!("kappa: warning: built without the parallel feature; running sequentially");
            Ok(f(Exec::Sequential))
        }
        _ => Ok(f(Exec::Sequential)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let cache_file = cache_path(cli.common.cache.clone());
    if let Some(path) = &cache_file {
        load_cache(path);
    }

    let outcome = match run_with_jobs(cli.common.jobs, |exec| execute(&cli.command, exec)) {
        Ok(outcome) => outcome,
        Err(msg) => {
            eprintln!("kappa: {msg}");
            return ExitCode::from(2);
        }
    };

    let code = match outcome {
        Ok(outcome) => {
            let text = render(&outcome, cli.common.format);
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
            if outcome.pass {
                0
            } else {
                1
            }
        }
        Err(err @ Error::RankDeficient { .. }) => {
            let report = json!({ "error": "rank-deficient pairing system", "detail": err.to_string() });
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            1
        }
        Err(err) => {
            eprintln!("kappa: invalid input: {err}");
            2
        }
    };

    if let Some(path) = &cache_file {
        save_cache(path);
    }
    if cli.common.stats {
        let s = cache::global().stats();
        eprintln!(
            "kappa: elapsed {:.3}s; cache hits {}, misses {}, entries λ {} N {}",
            started.elapsed().as_secs_f64(),
            s.hits,
            s.misses,
            s.lambda_entries,
            s.n_entries
        );
    }
    ExitCode::from(code)
}
