use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use thiserror::Error;
use wigner_path::WignerError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "WIGNER_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("computation rejected the parameters: {0}")]
    Compute(#[from] WignerError),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("check suite '{0}' failed")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed(_) => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Read `key = value` lines; `#` starts a comment line.
pub fn load_config_file(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn parse_config(text: &str) -> std::result::Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
        let key = k.trim().trim_start_matches("--").to_string();
        if key.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(format!("line {}: duplicate key '{key}'", i + 1));
        }
    }
    Ok(map)
}

/// Merges command-line values over config-file values over defaults, and
/// records what was used so that runs can be repeated from their sidecar.
#[derive(Debug, Default)]
pub struct Resolver {
    file: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

impl Resolver {
    pub fn new(file: BTreeMap<String, String>) -> Self {
        Resolver { file, resolved: BTreeMap::new() }
    }

    fn lookup<T>(&self, key: &str, parse: impl Fn(&str) -> std::result::Result<T, String>) -> CliResult<Option<T>> {
        match self.file.get(key) {
            Some(raw) => parse(raw).map(Some).map_err(|e| CliError::Config(format!("config key '{key}': {e}"))),
            None => Ok(None),
        }
    }

    fn record(&mut self, key: &str, text: String) {
        self.resolved.insert(key.to_string(), text);
    }

    pub fn optional<T>(&mut self, key: &str, flag: Option<T>) -> CliResult<Option<T>>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => Some(v),
            None => self.lookup(key, |s| s.parse::<T>().map_err(|e| format!("cannot parse '{s}': {e}")))?,
        };
        if let Some(v) = &value {
            self.record(key, v.to_string());
        }
        Ok(value)
    }

    pub fn value<T>(&mut self, key: &str, flag: Option<T>, default: T) -> CliResult<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let v = self.optional(key, flag)?.unwrap_or(default);
        self.record(key, v.to_string());
        Ok(v)
    }

    pub fn required<T>(&mut self, key: &str, flag: Option<T>, why: &str) -> CliResult<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        self.optional(key, flag)?.ok_or_else(|| CliError::Config(format!("--{key} is required {why}")))
    }

    pub fn choice<E: ValueEnum + Clone>(&mut self, key: &str, flag: Option<E>, default: E) -> CliResult<E> {
        let value = match flag {
            Some(v) => v,
            None => self.lookup(key, |s| E::from_str(s, true))?.unwrap_or(default),
        };
        let name = value.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default();
        self.record(key, name);
        Ok(value)
    }

    pub fn switch(&mut self, key: &str, flag: bool) -> CliResult<bool> {
        let v = flag || self.lookup(key, |s| s.parse::<bool>().map_err(|e| e.to_string()))?.unwrap_or(false);
        self.record(key, v.to_string());
        Ok(v)
    }

    /// Rejects config-file keys the command does not know.
    pub fn finish(&self, extra_known: &[&str]) -> CliResult<BTreeMap<String, String>> {
        let unknown: Vec<&String> = self
            .file
            .keys()
            .filter(|k| !self.resolved.contains_key(*k) && !extra_known.contains(&k.as_str()))
            .collect();
        if !unknown.is_empty() {
            return Err(CliError::Config(format!("unknown config keys for this command: {unknown:?}")));
        }
        Ok(self.resolved.clone())
    }

    pub fn file_value(&self, key: &str) -> Option<&str> {
        self.file.get(key).map(String::as_str)
    }
}

/// Slice counts written as `a..b` (inclusive) or a comma list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceList(pub Vec<usize>);

impl FromStr for SliceList {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let list = if let Some((a, b)) = s.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| format!("bad range start in '{s}'"))?;
            let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| format!("bad range end in '{s}'"))?;
            if a > b {
                return Err(format!("empty range '{s}'"));
            }
            (a..=b).collect()
        } else {
            s.split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad entry '{t}' in '{s}'")))
                .collect::<std::result::Result<Vec<_>, _>>()?
        };
        if list.is_empty() || list.contains(&0) {
            return Err(format!("slice counts must be positive in '{s}'"));
        }
        Ok(SliceList(list))
    }
}

impl Display for SliceList {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// A finite slice count or `inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlicesArg(pub wigner_path::Slices);

impl FromStr for SlicesArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "inf" | "infinity" => Ok(SlicesArg(wigner_path::Slices::Infinite)),
            t => t
                .parse::<usize>()
                .map(|l| SlicesArg(wigner_path::Slices::Finite(l)))
                .map_err(|_| format!("expected an integer or 'inf', got '{t}'")),
        }
    }
}

impl Display for SlicesArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            wigner_path::Slices::Infinite => write!(f, "inf"),
            wigner_path::Slices::Finite(l) => write!(f, "{l}"),
        }
    }
}

pub fn output_dir(flag: Option<PathBuf>, resolver: &Resolver) -> PathBuf {
    flag.or_else(|| resolver.file_value("out-dir").map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}
