//! `twinphase`: command-line front end for the library.
//!
//! Exit codes: 0 success, 1 usage, 2 validation, 3 budget guard.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{value_parser, Arg, ArgMatches, Command};

use twinphase::config::{load_config, Format, RunConfig};
use twinphase::Error;

use commands::{Output, COMMANDS};

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_BUDGET: u8 = 3;

fn cli() -> Command {
    let mut app = Command::new("twinphase")
        .about(
            "Phase arithmetic, exponential sums and sieve experiments for alpha p^2 + beta mod 1",
        )
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_name("PATH")
                .value_parser(value_parser!(PathBuf))
                .help("Key = value file; flags override its entries"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .global(true)
                .value_name("PATH")
                .help("Output file (default stdout)"),
        )
        .arg(
            Arg::new("format")
                .long("format")
                .global(true)
                .value_parser(["json", "csv"])
                .help("Output format (default json)"),
        )
        .arg(
            Arg::new("threads")
                .long("threads")
                .global(true)
                .value_name("N")
                .value_parser(value_parser!(u32).range(1..))
                .help("Worker threads; results do not depend on it"),
        )
        .arg(
            Arg::new("seed")
                .long("seed")
                .global(true)
                .value_name("N")
                .value_parser(value_parser!(u64))
                .help("Seed for randomized checks"),
        );
    for spec in COMMANDS {
        let mut sub = Command::new(spec.name).about(spec.about);
        for &(flag, help) in spec.params {
            sub = sub.arg(
                Arg::new(flag)
                    .long(flag)
                    .value_name("VALUE")
                    .allow_hyphen_values(true)
                    .help(help),
            );
        }
        app = app.subcommand(sub);
    }
    app
}

fn config_key(flag: &str) -> String {
    flag.replace('-', "_")
}

/// Merges the config file (if any) with the command-line flags.
fn build_config(name: &str, m: &ArgMatches) -> twinphase::Result<RunConfig> {
    let spec = COMMANDS
        .iter()
        .find(|c| c.name == name)
        .expect("subcommand comes from the table");
    let mut rc = match m.get_one::<PathBuf>("config") {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(c) = &rc.command {
        if c != name {
            return Err(Error::Domain(format!(
                "config file is for command {c:?}, not {name:?}"
            )));
        }
    }
    rc.command = Some(name.to_string());
    let allowed: Vec<String> = spec.params.iter().map(|(f, _)| config_key(f)).collect();
    if let Some(key) = rc.params.keys().find(|k| !allowed.contains(k)) {
        return Err(Error::Domain(format!(
            "parameter {key:?} does not apply to {name}"
        )));
    }
    for &(flag, _) in spec.params {
        if let Some(raw) = m.get_one::<String>(flag) {
            rc.set(&config_key(flag), raw)?;
        }
    }
    if let Some(out) = m.get_one::<String>("out") {
        rc.out = Some(out.clone());
    }
    if let Some(f) = m.get_one::<String>("format") {
        rc.format = Some(f.parse()?);
    }
    if let Some(t) = m.get_one::<u32>("threads") {
        rc.threads = Some(*t as usize);
    }
    if let Some(s) = m.get_one::<u64>("seed") {
        rc.seed = Some(*s);
    }
    Ok(rc)
}

fn run(name: &str, m: &ArgMatches) -> twinphase::Result<()> {
    let rc = build_config(name, m)?;
    let spec = COMMANDS
        .iter()
        .find(|c| c.name == name)
        .expect("subcommand comes from the table");
    let threads = rc.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    let output: Output = pool.install(|| (spec.run)(&rc))?;
    let text = match rc.format.unwrap_or_default() {
        Format::Json => output.json,
        Format::Csv => output.csv,
    };
    match &rc.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    match run(name, sub) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("twinphase {name}: {e}");
            if e.is_budget() {
                ExitCode::from(EXIT_BUDGET)
            } else {
                ExitCode::from(EXIT_VALIDATION)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_table_is_consistent() {
        cli().debug_assert();
        let names: Vec<&str> = COMMANDS.iter().map(|c| c.name).collect();
        assert_eq!(names, twinphase::config::COMMANDS);
        for c in COMMANDS {
            for (flag, _) in c.params {
                let key = config_key(flag);
                assert!(
                    twinphase::config::PARAMS.iter().any(|(k, _)| *k == key),
                    "{} --{flag}",
                    c.name
                );
            }
        }
    }
}
