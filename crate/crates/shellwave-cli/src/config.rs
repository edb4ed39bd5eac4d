//! Run configuration: subcommand, flat parameter map, output target.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use shellwave::C64;

/// A failure before any computation starts; always exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(bad(format!("unknown format '{s}' (csv or json)"))),
        }
    }
}

pub struct Param {
    pub key: &'static str,
    pub help: &'static str,
    pub default: Option<&'static str>,
}

const fn p(key: &'static str, help: &'static str, default: Option<&'static str>) -> Param {
    Param { key, help, default }
}

const ETA: Param = p("eta", "coupling eta (scalar part)", None);
const TAU: Param = p("tau", "coupling tau (mass part)", None);
const M: Param = p("m", "mass", Some("1"));
const Z: Param = p("z", "spectral parameter a+bi", Some("0+1i"));
const MAGNETIC: Param = p("magnetic", "add the magnetic term (true/false)", Some("false"));
const N: Param = p("n", "transverse quadrature nodes", Some("200"));

pub struct Command {
    pub name: &'static str,
    pub about: &'static str,
    pub params: &'static [Param],
}

pub const COMMANDS: &[Command] = &[
    Command {
        name: "rescale",
        about: "Squeezed (or magnetic) coupling rescaling",
        params: &[ETA, TAU, MAGNETIC],
    },
    Command { name: "classify", about: "Coupling class and rescaled d", params: &[ETA, TAU] },
    Command {
        name: "volterra",
        about: "Spectral radius of sqrt(q) h sqrt(q)",
        params: &[
            p("rho", "decay rate rho = |xi'| eps", None),
            p("theta", "dimension (2 or 3)", Some("2")),
            p("profile", "profile q: half or bump", Some("half")),
            p("n", "transverse quadrature nodes", Some("400")),
        ],
    },
    Command {
        name: "fiber-norm",
        about: "Squeezed-minus-shell resolvent difference on single fibers",
        params: &[ETA, TAU, M, Z, p("eps", "squeeze parameter", None), p("xi", "fiber momenta, comma separated", None), MAGNETIC, N],
    },
    Command {
        name: "converge",
        about: "Sup over fibers along an eps ladder, with a log-log rate fit",
        params: &[
            ETA,
            TAU,
            M,
            Z,
            p("eps", "eps ladder, comma separated (at least 4 values)", None),
            MAGNETIC,
            N,
            p("xi-points", "fibers per sup", Some("60")),
            p("xi-max", "largest fiber momentum (default depends on eps)", None),
        ],
    },
    Command {
        name: "counterexample",
        about: "Zero-mode certificate for a supercritical coupling",
        params: &[ETA, TAU, M, p("eps", "squeeze parameter", None)],
    },
    Command {
        name: "unitary-check",
        about: "Sign-flip equivalence residual for a shell coupling with |d~| > 4",
        params: &[ETA, TAU, M, Z, p("xi", "fiber momenta, comma separated", Some("0,1,5"))],
    },
];

/// Keys accepted in every command besides its own parameters.
pub const COMMON_KEYS: &[&str] = &["out", "format"];

pub fn command(name: &str) -> Option<&'static Command> {
    COMMANDS.iter().find(|c| c.name == name)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: &'static Command,
    pub params: BTreeMap<String, String>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

impl fmt::Debug for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

impl PartialEq for Command {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

/// Parse a key=value file. Blank lines and lines starting with '#' are skipped.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("config line {}: expected key=value", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(bad(format!("config line {}: empty key", i + 1)));
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(bad(format!("config line {}: duplicate key '{k}'", i + 1)));
        }
    }
    Ok(map)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
    parse_config_text(&text)
}

impl RunConfig {
    /// File values first, flags on top, then defaults; unknown keys rejected.
    pub fn assemble(
        command: &'static Command,
        file: BTreeMap<String, String>,
        flags: BTreeMap<String, String>,
    ) -> Result<Self, ConfigError> {
        let mut merged = file;
        merged.extend(flags);
        for k in merged.keys() {
            if !COMMON_KEYS.contains(&k.as_str()) && !command.params.iter().any(|p| p.key == k) {
                return Err(bad(format!("unknown key '{k}' for {}", command.name)));
            }
        }
        let output_path = merged.remove("out").map(PathBuf::from);
        let format = match merged.remove("format") {
            Some(f) => Format::parse(&f)?,
            None => match output_path.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
                Some("csv") => Format::Csv,
                _ => Format::Json,
            },
        };
        for p in command.params {
            if let Some(d) = p.default {
                merged.entry(p.key.to_string()).or_insert_with(|| d.to_string());
            }
        }
        Ok(RunConfig { command, params: merged, output_path, format })
    }

    fn raw(&self, key: &str) -> Result<&str, ConfigError> {
        self.params
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| bad(format!("{} needs --{key}", self.command.name)))
    }

    pub fn has(&self, key: &str) -> bool {
        self.params.contains_key(key)
    }

    pub fn real(&self, key: &str) -> Result<f64, ConfigError> {
        parse_real(self.raw(key)?).map_err(|e| bad(format!("--{key}: {e}")))
    }

    pub fn reals(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        let v: Result<Vec<f64>, String> = self.raw(key)?.split(',').map(|s| parse_real(s.trim())).collect();
        let v = v.map_err(|e| bad(format!("--{key}: {e}")))?;
        if v.is_empty() {
            return Err(bad(format!("--{key}: empty list")));
        }
        Ok(v)
    }

    pub fn count(&self, key: &str) -> Result<usize, ConfigError> {
        let s = self.raw(key)?;
        s.parse::<usize>().map_err(|_| bad(format!("--{key}: '{s}' is not a nonnegative integer")))
    }

    pub fn flag(&self, key: &str) -> Result<bool, ConfigError> {
        match self.raw(key)? {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            s => Err(bad(format!("--{key}: '{s}' is not a boolean"))),
        }
    }

    pub fn complex(&self, key: &str) -> Result<C64, ConfigError> {
        parse_complex(self.raw(key)?).map_err(|e| bad(format!("--{key}: {e}")))
    }

    pub fn text(&self, key: &str) -> Result<String, ConfigError> {
        self.raw(key).map(str::to_string)
    }
}

fn parse_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

/// Parse "a+bi", "a-bi", "bi" or "a".
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || format!("'{s}' is not a complex number a+bi");
    let Some(body) = t.strip_suffix('i') else {
        return parse_real(&t).map(|re| C64::new(re, 0.0)).map_err(|_| err());
    };
    // split at the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        x => x,
    };
    let re = parse_real(re).map_err(|_| err())?;
    let im = parse_real(im.strip_prefix('+').unwrap_or(im)).map_err(|_| err())?;
    Ok(C64::new(re, im))
}
