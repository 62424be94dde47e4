//! Run parameters from flags and an optional `key=value` file.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// Parses an angle given in radians or as `kpi/n`, `pi/n`, `kpi`, `pi`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let lower = s.to_ascii_lowercase();
    let Some(at) = lower.find("pi") else {
        return lower
            .parse::<f64>()
            .map_err(|_| format!("invalid angle '{text}'"));
    };
    let invalid = || format!("invalid angle '{text}', expected radians or kpi/n");
    let k = match lower[..at].trim_end_matches('*') {
        "" => 1.0,
        "-" => -1.0,
        k => k.parse::<f64>().map_err(|_| invalid())?,
    };
    let rest = &lower[at + 2..];
    let n = match rest.strip_prefix('/') {
        Some(n) => n.parse::<f64>().map_err(|_| invalid())?,
        None if rest.is_empty() => 1.0,
        None => return Err(invalid()),
    };
    if n == 0.0 {
        return Err(invalid());
    }
    Ok(k * PI / n)
}

/// Parses a real number, also accepting a ratio `a/b`.
pub fn parse_real(text: &str) -> Result<f64, String> {
    let s = text.trim();
    let invalid = || format!("invalid number '{text}'");
    match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| invalid())?;
            let b: f64 = b.trim().parse().map_err(|_| invalid())?;
            if b == 0.0 {
                return Err(invalid());
            }
            Ok(a / b)
        }
        None => s.parse().map_err(|_| invalid()),
    }
}

fn parse_f64(key: &str, v: &str) -> CliResult<f64> {
    parse_real(v).map_err(|e| CliError::Usage(format!("{e} for {key}")))
}

fn parse_u64(key: &str, v: &str) -> CliResult<u64> {
    let v = v.trim();
    if let Ok(n) = v.parse::<u64>() {
        return Ok(n);
    }
    // Accept scientific notation such as 1e6 when it is an exact integer.
    match v.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 => Ok(x as u64),
        _ => Err(CliError::Usage(format!("invalid value '{v}' for {key}"))),
    }
}

/// Clap value parser for counts such as `--shots 1e6`.
pub fn parse_count(v: &str) -> Result<u64, String> {
    parse_u64("count", v).map_err(|e| e.to_string())
}

/// Every tunable parameter; `None` means "use the command default".
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Params {
    pub theta: Option<f64>,
    pub q_plus: Option<f64>,
    pub r: Option<f64>,
    pub p: Option<f64>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub grid: Option<u64>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_THETA: f64 = 6.0 * PI / 16.0;
pub const DEFAULT_Q_PLUS: f64 = 0.5;
pub const DEFAULT_R: f64 = 0.7;
pub const DEFAULT_SHOTS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_CURVE_GRID: u64 = 101;
pub const DEFAULT_LATTICE_GRID: u64 = 21;

impl Params {
    /// Values set in `self` win over those in `base`.
    pub fn over(self, base: Params) -> Params {
        Params {
            theta: self.theta.or(base.theta),
            q_plus: self.q_plus.or(base.q_plus),
            r: self.r.or(base.r),
            p: self.p.or(base.p),
            p1: self.p1.or(base.p1),
            p2: self.p2.or(base.p2),
            grid: self.grid.or(base.grid),
            shots: self.shots.or(base.shots),
            seed: self.seed.or(base.seed),
            out: self.out.or(base.out),
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta.unwrap_or(DEFAULT_THETA)
    }

    pub fn q_plus(&self) -> f64 {
        self.q_plus.unwrap_or(DEFAULT_Q_PLUS)
    }

    pub fn r(&self) -> f64 {
        self.r.unwrap_or(DEFAULT_R)
    }

    pub fn p(&self) -> f64 {
        self.p.unwrap_or(1.0)
    }

    pub fn p1(&self) -> f64 {
        self.p1.unwrap_or(0.0)
    }

    pub fn p2(&self) -> f64 {
        self.p2.unwrap_or(0.0)
    }

    pub fn shots(&self) -> u64 {
        self.shots.unwrap_or(DEFAULT_SHOTS)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// Grid size, at least 2.
    pub fn grid_or(&self, default: u64) -> CliResult<usize> {
        let n = self.grid.unwrap_or(default);
        if n < 2 {
            return Err(CliError::Usage(format!("grid must be at least 2, got {n}")));
        }
        usize::try_from(n).map_err(|_| CliError::Usage(format!("grid {n} is too large")))
    }

    /// Parses `key=value` lines. `#` starts a comment; keys may use `-` or `_`.
    pub fn parse_file_contents(text: &str) -> CliResult<Params> {
        let mut out = Params::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "config line {}: expected key=value",
                    lineno + 1
                )));
            };
            let key = key.trim().replace('_', "-");
            let value = value.trim();
            match key.as_str() {
                "theta" => out.theta = Some(parse_angle(value).map_err(CliError::Usage)?),
                "q-plus" => out.q_plus = Some(parse_f64("q-plus", value)?),
                "r" => out.r = Some(parse_f64("r", value)?),
                "p" => out.p = Some(parse_f64("p", value)?),
                "p1" => out.p1 = Some(parse_f64("p1", value)?),
                "p2" => out.p2 = Some(parse_f64("p2", value)?),
                "grid" => out.grid = Some(parse_u64("grid", value)?),
                "shots" => out.shots = Some(parse_u64("shots", value)?),
                "seed" => out.seed = Some(parse_u64("seed", value)?),
                "out" => out.out = Some(PathBuf::from(value)),
                _ => {
                    return Err(CliError::Usage(format!(
                        "config line {}: unknown key '{key}'",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(out)
    }

    pub fn from_file(path: &Path) -> CliResult<Params> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_file_contents(&text)
    }
}
