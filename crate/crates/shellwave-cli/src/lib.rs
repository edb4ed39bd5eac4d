//! Command-line front end: argument and config handling, experiment drivers
//! and report output.

pub mod commands;
pub mod config;
pub mod report;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Arg, ArgMatches, Command};

use commands::{execute, RunError};
use config::{read_config_file, ConfigError, RunConfig, COMMANDS};

pub const THREADS_VAR: &str = "SHELLWAVE_THREADS";

fn cli() -> Command {
    let value = |key: &'static str| Arg::new(key).long(key).value_name("VALUE").allow_hyphen_values(true);
    let mut root = Command::new("shellwave")
        .about("Fiber-level experiments for Dirac operators with squeezed and delta-shell potentials")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for c in COMMANDS {
        let mut sub = Command::new(c.name)
            .about(c.about)
            .arg(value("config").help("key=value file; flags override its entries"))
            .arg(value("out").help("report file (stdout when absent)"))
            .arg(value("format").help("csv or json (default from the --out extension, else json)"));
        for p in c.params {
            let help = match p.default {
                Some(d) => format!("{} [default: {d}]", p.help),
                None => p.help.to_string(),
            };
            sub = sub.arg(value(p.key).help(help));
        }
        root = root.subcommand(sub);
    }
    root
}

fn flags(m: &ArgMatches, keys: impl Iterator<Item = &'static str>) -> BTreeMap<String, String> {
    keys.filter_map(|k| m.get_one::<String>(k).map(|v| (k.to_string(), v.clone()))).collect()
}

fn threads_from_env() -> Result<(), ConfigError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| ConfigError(format!("{THREADS_VAR} must be a positive integer, got '{raw}'")))?;
    shellwave::parallel::configure_threads(n).map_err(|e| ConfigError(e.to_string()))
}

fn write_report(text: &str, path: Option<&Path>) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

/// Run the program on `args` (including the program name); returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let command = config::command(name).expect("subcommands come from the table");
    let prepared = (|| -> Result<RunConfig, ConfigError> {
        threads_from_env()?;
        let file = match sub.get_one::<String>("config") {
            Some(p) => read_config_file(Path::new(p))?,
            None => BTreeMap::new(),
        };
        let keys = command.params.iter().map(|p| p.key).chain(config::COMMON_KEYS.iter().copied());
        RunConfig::assemble(command, file, flags(sub, keys))
    })();
    let cfg = match prepared {
        Ok(c) => c,
        Err(e) => {
            eprintln!("shellwave: invalid configuration: {e}");
            return 2;
        }
    };
    let result = execute(&cfg).and_then(|report| {
        let bad = report.non_finite();
        if !bad.is_empty() {
            return Err(RunError::Numeric(format!("non-finite values in report: {}", bad.join(", "))));
        }
        report.render(cfg.format).map_err(|e| RunError::Numeric(format!("csv encoding: {e}")))
    });
    match result {
        Ok(text) => match write_report(&text, cfg.output_path.as_deref()) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("shellwave: cannot write report: {e}");
                3
            }
        },
        Err(e) => {
            eprintln!("shellwave: {} failed: {e}", cfg.command.name);
            e.exit_code()
        }
    }
}
