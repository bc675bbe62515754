//! Parsers for the textual inputs: number lists, scheme lists and the
//! key=value config file. None of them panic on any input.

use std::collections::BTreeSet;

use thiserror::Error;
use twrc::Scheme;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("empty list")]
    Empty,
    #[error("invalid number {0:?}")]
    Number(String),
    #[error("non-finite number {0:?}")]
    NonFinite(String),
    #[error("invalid range {0:?}: expected start:stop:count with 1 <= count <= {MAX_LIST_LEN}")]
    Range(String),
    #[error("list longer than {MAX_LIST_LEN} entries")]
    TooLong,
    #[error("unknown scheme {0:?}")]
    Scheme(String),
    #[error("scheme {0} listed twice")]
    DuplicateScheme(Scheme),
    #[error("line {line}: expected key = value")]
    Syntax { line: usize },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key {key:?} set twice")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: {key}: {source}")]
    Value { line: usize, key: String, source: Box<ParseError> },
    #[error("{0}")]
    Invalid(String),
}

/// Longest accepted number list, so a short input cannot request a huge
/// allocation.
pub const MAX_LIST_LEN: usize = 100_000;

fn number(s: &str) -> Result<f64, ParseError> {
    let s = s.trim();
    let v: f64 = s.parse().map_err(|_| ParseError::Number(s.to_string()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ParseError::NonFinite(s.to_string()))
    }
}

/// Parses `a,b,c` or an inclusive evenly spaced range `start:stop:count`.
/// Both forms can be mixed: `0,0.1:0.5:5`.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, ParseError> {
    if s.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut out = Vec::new();
    for item in s.split(',') {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [one] => out.push(number(one)?),
            [start, stop, count] => {
                let (a, b) = (number(start)?, number(stop)?);
                let n: usize = count.trim().parse().map_err(|_| ParseError::Range(item.to_string()))?;
                if n == 0 || n > MAX_LIST_LEN {
                    return Err(ParseError::Range(item.to_string()));
                }
                if out.len() + n > MAX_LIST_LEN {
                    return Err(ParseError::TooLong);
                }
                let range = twrc::sim::linspace(a, b, n);
                // Endpoints near f64::MAX overflow the step.
                if range.iter().any(|v| !v.is_finite()) {
                    return Err(ParseError::NonFinite(item.trim().to_string()));
                }
                out.extend(range);
            }
            _ => return Err(ParseError::Range(item.to_string())),
        }
        if out.len() > MAX_LIST_LEN {
            return Err(ParseError::TooLong);
        }
    }
    Ok(out)
}

/// Parses a comma-separated scheme list. `all` stands for the six coding
/// schemes followed by the MABC bound.
pub fn parse_schemes(s: &str) -> Result<Vec<Scheme>, ParseError> {
    if s.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut out: Vec<Scheme> = Vec::new();
    for item in s.split(',') {
        let expanded = if item.trim().eq_ignore_ascii_case("all") {
            let mut all = Scheme::PLNC.to_vec();
            all.push(Scheme::MabcCapacity);
            all
        } else {
            vec![item.parse::<Scheme>().map_err(|_| ParseError::Scheme(item.trim().to_string()))?]
        };
        for scheme in expanded {
            if out.contains(&scheme) {
                return Err(ParseError::DuplicateScheme(scheme));
            }
            out.push(scheme);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(ParseError::Invalid(format!("unknown format {other:?}, expected csv or json"))),
        }
    }
}

/// Every option a command can take. Unset fields fall back to per-command
/// defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub x: Option<Vec<f64>>,
    pub y: Option<f64>,
    pub p_db: Option<Vec<f64>>,
    pub c: Option<f64>,
    pub n_exp: Option<f64>,
    pub schemes: Option<Vec<Scheme>>,
    pub theta_grid: Option<usize>,
    pub dirs: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub rho: Option<Vec<f64>>,
    pub packet_bits: Option<u32>,
    pub horizon: Option<usize>,
    pub out: Option<String>,
    pub format: Option<Format>,
}

/// Config keys, identical to the long flag names.
pub const KEYS: [&str; 15] = [
    "x", "y", "p-db", "c", "n-exp", "schemes", "theta-grid", "dirs", "trials", "seed", "rho", "packet-bits",
    "horizon", "out", "format",
];

fn single(s: &str) -> Result<f64, ParseError> {
    number(s)
}

fn count<T: std::str::FromStr>(s: &str) -> Result<T, ParseError> {
    s.trim().parse().map_err(|_| ParseError::Number(s.trim().to_string()))
}

impl Settings {
    fn set(&mut self, key: &str, value: &str) -> Result<(), ParseError> {
        match key {
            "x" => self.x = Some(parse_f64_list(value)?),
            "y" => self.y = Some(single(value)?),
            "p-db" => self.p_db = Some(parse_f64_list(value)?),
            "c" => self.c = Some(single(value)?),
            "n-exp" => self.n_exp = Some(single(value)?),
            "schemes" => self.schemes = Some(parse_schemes(value)?),
            "theta-grid" => self.theta_grid = Some(count(value)?),
            "dirs" => self.dirs = Some(count(value)?),
            "trials" => self.trials = Some(count(value)?),
            "seed" => self.seed = Some(count(value)?),
            "rho" => self.rho = Some(parse_f64_list(value)?),
            "packet-bits" => self.packet_bits = Some(count(value)?),
            "horizon" => self.horizon = Some(count(value)?),
            "out" => {
                if value.trim().is_empty() {
                    return Err(ParseError::Empty);
                }
                self.out = Some(value.trim().to_string())
            }
            "format" => self.format = Some(value.parse()?),
            _ => unreachable!("key checked against KEYS"),
        }
        Ok(())
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overridden_by(self, over: Settings) -> Settings {
        Settings {
            x: over.x.or(self.x),
            y: over.y.or(self.y),
            p_db: over.p_db.or(self.p_db),
            c: over.c.or(self.c),
            n_exp: over.n_exp.or(self.n_exp),
            schemes: over.schemes.or(self.schemes),
            theta_grid: over.theta_grid.or(self.theta_grid),
            dirs: over.dirs.or(self.dirs),
            trials: over.trials.or(self.trials),
            seed: over.seed.or(self.seed),
            rho: over.rho.or(self.rho),
            packet_bits: over.packet_bits.or(self.packet_bits),
            horizon: over.horizon.or(self.horizon),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
        }
    }
}

/// Parses a config file: one `key = value` per line, `#` starts a comment,
/// blank lines are skipped. Unknown and repeated keys are errors.
pub fn parse_config(text: &str) -> Result<Settings, ParseError> {
    let mut settings = Settings::default();
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(ParseError::Syntax { line: line_no })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(ParseError::UnknownKey { line: line_no, key: key.to_string() });
        }
        if !seen.insert(key) {
            return Err(ParseError::DuplicateKey { line: line_no, key: key.to_string() });
        }
        settings.set(key, value).map_err(|e| ParseError::Value { line: line_no, key: key.to_string(), source: Box::new(e) })?;
    }
    Ok(settings)
}
