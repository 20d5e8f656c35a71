//! Run configuration: `key = value` files, flag overrides and resolution.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use starkdisk::analysis::{Sector, StateLabel, SweepParameter};
use starkdisk::basis::Parity;
use starkdisk::scaling::{BetaParams, ModelParams};

use crate::CliError;

/// First line of every CSV the tool writes.
pub const MAGIC: &str = "# starkdisk";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Spectrum,
    Sweep,
    Table1,
    Figure,
    Crossing,
    BesselZeros,
}

impl CommandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::Spectrum => "spectrum",
            CommandKind::Sweep => "sweep",
            CommandKind::Table1 => "table1",
            CommandKind::Figure => "figure",
            CommandKind::Crossing => "crossing",
            CommandKind::BesselZeros => "besselzeros",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Svg,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            _ => Err(format!("unknown format '{s}' (expected csv or svg)")),
        }
    }
}

pub const KEYS: &[&str] = &[
    "command",
    "r0",
    "lambda",
    "beta",
    "sector",
    "n_basis",
    "levels",
    "format",
    "out",
    "parameter",
    "from",
    "to",
    "step",
    "figure",
    "label_a",
    "label_b",
    "nu",
    "count",
];

/// Raw settings before typing. Later inserts win.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings(pub BTreeMap<String, String>);

impl Settings {
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.0.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn merge(&mut self, other: Settings) {
        self.0.extend(other.0);
    }

    /// Parse a config file. A CSV written by this tool is accepted as well:
    /// its `# key = value` metadata lines are read as settings.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut settings = Settings::default();
        if text.starts_with(MAGIC) {
            for line in text.lines().skip(1) {
                let Some(rest) = line.strip_prefix('#') else {
                    break;
                };
                let (key, value) =
                    split_pair(rest).ok_or_else(|| format!("bad metadata line '{line}'"))?;
                if key != "event" {
                    settings.insert_checked(key, value)?;
                }
            }
            return Ok(settings);
        }
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = split_pair(line)
                .ok_or_else(|| format!("line {}: expected 'key = value'", no + 1))?;
            settings
                .insert_checked(key, value)
                .map_err(|e| format!("line {}: {e}", no + 1))?;
        }
        Ok(settings)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Settings::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    fn insert_checked(&mut self, key: &str, value: &str) -> Result<(), String> {
        if !KEYS.contains(&key) {
            return Err(format!("unknown key '{key}'"));
        }
        self.set(key, value);
        Ok(())
    }
}

fn split_pair(line: &str) -> Option<(&str, &str)> {
    let (k, v) = line.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    (!k.is_empty()).then_some((k, v))
}

/// Label tokens: `even_0_2`, `even(0,2)` or a bare `0,2` (even).
pub fn parse_label(s: &str) -> Result<StateLabel, String> {
    let bad = || format!("invalid state label '{s}' (expected e.g. even_0_2 or odd(0,1))");
    let t = s.trim();
    let (parity, rest) = if let Some(r) = t.strip_prefix("even") {
        (Parity::Even, r)
    } else if let Some(r) = t.strip_prefix("odd") {
        (Parity::Odd, r)
    } else {
        (Parity::Even, t)
    };
    let rest = rest
        .trim_start_matches(['_', ':'])
        .trim_start_matches('(')
        .trim_end_matches(')');
    let mut parts = rest.split([',', '_']);
    let n = parts
        .next()
        .and_then(|p| p.trim().parse().ok())
        .ok_or_else(bad)?;
    let nu = parts
        .next()
        .and_then(|p| p.trim().parse().ok())
        .ok_or_else(bad)?;
    if parts.next().is_some() {
        return Err(bad());
    }
    StateLabel::new(parity, n, nu).map_err(|e| e.to_string())
}

pub fn label_token(l: &StateLabel) -> String {
    format!("{}_{}_{}", l.parity, l.n, l.nu)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub r0: f64,
    pub lambda: f64,
    pub beta: f64,
    pub sector: Sector,
    pub n_basis: usize,
    pub levels: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub parameter: SweepParameter,
    pub from: f64,
    pub to: f64,
    pub step: f64,
    pub figure: u8,
    pub label_a: StateLabel,
    pub label_b: StateLabel,
    pub nu: usize,
    pub count: usize,
}

fn typed<T: FromStr>(s: &Settings, key: &str, default: T) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    match s.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|e| CliError::usage(format!("invalid {key} '{v}': {e}"))),
    }
}

impl RunConfig {
    pub fn resolve(command: CommandKind, s: &Settings) -> Result<Self, CliError> {
        if let Some(c) = s.get("command") {
            if c != command.as_str() {
                return Err(CliError::usage(format!(
                    "config was written for '{c}', not '{}'",
                    command.as_str()
                )));
            }
        }
        let parameter: SweepParameter = typed(
            s,
            "parameter",
            if command == CommandKind::Crossing {
                SweepParameter::Beta
            } else {
                SweepParameter::Lambda
            },
        )?;
        let radial = parameter == SweepParameter::Beta
            && matches!(command, CommandKind::Sweep | CommandKind::Crossing);
        let figure: u8 = typed(s, "figure", 1)?;
        let (default_n, default_levels, default_sector) = match command {
            CommandKind::Figure => {
                let setup = starkdisk::analysis::figure_setup(figure)
                    .map_err(|e| CliError::usage(e.to_string()))?;
                (setup.n_basis, setup.levels, setup.sector)
            }
            CommandKind::Sweep => (if radial { 20 } else { 12 }, 4, Sector::Both),
            CommandKind::Crossing => (if radial { 20 } else { 12 }, 6, Sector::Both),
            _ => (12, 6, Sector::Both),
        };
        let (default_from, default_to, default_step) = match (command, parameter) {
            (CommandKind::Crossing, _) => (0.5, 1.0, 0.0),
            (_, SweepParameter::Lambda) => (0.0, 2.0, 0.02),
            (_, SweepParameter::R0) => (0.25, 6.0, 0.05),
            (_, SweepParameter::Beta) => (0.0, 1.0, 0.01),
        };
        let cfg = RunConfig {
            command,
            r0: typed(s, "r0", 0.75)?,
            lambda: typed(
                s,
                "lambda",
                if command == CommandKind::Sweep && parameter == SweepParameter::R0 {
                    1.0
                } else {
                    0.0
                },
            )?,
            beta: typed(s, "beta", 0.75)?,
            sector: typed(s, "sector", default_sector)?,
            n_basis: typed(s, "n_basis", default_n)?,
            levels: typed(s, "levels", default_levels)?,
            format: typed(s, "format", Format::Csv)?,
            out: s.get("out").map(PathBuf::from),
            parameter,
            from: typed(s, "from", default_from)?,
            to: typed(s, "to", default_to)?,
            step: typed(s, "step", default_step)?,
            figure,
            label_a: match s.get("label_a") {
                Some(v) => parse_label(v).map_err(CliError::usage)?,
                None => StateLabel {
                    parity: Parity::Even,
                    n: 0,
                    nu: 2,
                },
            },
            label_b: match s.get("label_b") {
                Some(v) => parse_label(v).map_err(CliError::usage)?,
                None => StateLabel {
                    parity: Parity::Even,
                    n: 1,
                    nu: 0,
                },
            },
            nu: typed(s, "nu", 0)?,
            count: typed(s, "count", 5)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let usage = |e: starkdisk::Error| CliError::usage(e.to_string());
        ModelParams::new(self.r0, self.lambda).map_err(usage)?;
        BetaParams::new(self.beta).map_err(usage)?;
        if !self.lambda.is_finite() {
            return Err(CliError::usage(format!(
                "lambda must be finite, got {}",
                self.lambda
            )));
        }
        if self.format == Format::Svg
            && !matches!(self.command, CommandKind::Figure | CommandKind::Sweep)
        {
            return Err(CliError::usage(
                "svg output is only available for figure and sweep",
            ));
        }
        match self.command {
            CommandKind::Sweep => {
                if !(self.from.is_finite()
                    && self.to.is_finite()
                    && self.step > 0.0
                    && self.to >= self.from)
                {
                    return Err(CliError::usage(format!(
                        "invalid sweep range from {} to {} step {}",
                        self.from, self.to, self.step
                    )));
                }
                if self.parameter == SweepParameter::R0 && self.from <= 0.0 {
                    return Err(CliError::usage("r0 sweeps need from > 0"));
                }
                if self.parameter == SweepParameter::Beta && self.from < 0.0 {
                    return Err(CliError::usage("beta sweeps need from >= 0"));
                }
                if self.levels == 0 {
                    return Err(CliError::usage("sweeps need levels >= 1"));
                }
            }
            CommandKind::Crossing => {
                if !(self.from < self.to) {
                    return Err(CliError::usage(format!(
                        "invalid bracket [{}, {}]",
                        self.from, self.to
                    )));
                }
            }
            CommandKind::BesselZeros => {
                if self.count == 0 {
                    return Err(CliError::usage("count must be >= 1"));
                }
            }
            CommandKind::Figure | CommandKind::Spectrum | CommandKind::Table1 => {}
        }
        if self.n_basis == 0 && self.command != CommandKind::BesselZeros {
            return Err(CliError::usage("n_basis must be >= 1"));
        }
        Ok(())
    }

    /// Resolved settings that determine the output, in a fixed order.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let mut v = vec![("command", self.command.as_str().to_string())];
        let model = |v: &mut Vec<(&'static str, String)>| {
            v.push(("r0", self.r0.to_string()));
            v.push(("lambda", self.lambda.to_string()));
        };
        match self.command {
            CommandKind::Spectrum => {
                model(&mut v);
                v.push(("sector", self.sector.to_string()));
                v.push(("n_basis", self.n_basis.to_string()));
                v.push(("levels", self.levels.to_string()));
            }
            CommandKind::Sweep => {
                v.push(("parameter", self.parameter.to_string()));
                v.push(("from", self.from.to_string()));
                v.push(("to", self.to.to_string()));
                v.push(("step", self.step.to_string()));
                model(&mut v);
                v.push(("sector", self.sector.to_string()));
                v.push(("n_basis", self.n_basis.to_string()));
                v.push(("levels", self.levels.to_string()));
            }
            CommandKind::Table1 => {
                v.push(("n_basis", self.n_basis.to_string()));
            }
            CommandKind::Figure => {
                v.push(("figure", self.figure.to_string()));
                v.push(("n_basis", self.n_basis.to_string()));
                v.push(("levels", self.levels.to_string()));
            }
            CommandKind::Crossing => {
                v.push(("parameter", self.parameter.to_string()));
                v.push(("label_a", label_token(&self.label_a)));
                v.push(("label_b", label_token(&self.label_b)));
                v.push(("from", self.from.to_string()));
                v.push(("to", self.to.to_string()));
                model(&mut v);
                v.push(("n_basis", self.n_basis.to_string()));
            }
            CommandKind::BesselZeros => {
                v.push(("nu", self.nu.to_string()));
                v.push(("count", self.count.to_string()));
            }
        }
        v.push(("format", self.format.as_str().to_string()));
        v
    }
}
