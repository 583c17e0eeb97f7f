//! Run configuration: defaults, `key = value` files and flag overrides.
//!
//! A config file holds one `key = value` pair per line. Blank lines and
//! anything after `#` are ignored. Keys use the flag spelling without the
//! leading dashes; `_` and `-` are interchangeable.

use std::fmt::Write as _;
use std::path::PathBuf;

use esmhd::reconstruction::Reconstruction;
use esmhd::solver::{FluxKind, TimeIntegrator};

use crate::snapshot::SnapshotFormat;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    InvalidValue { key: String, value: String, reason: String },
    #[error("no problem given (use --problem or `problem = ...`)")]
    MissingProblem,
}

/// Splits config text into `(line, key, value)` triples.
pub fn parse_pairs(text: &str) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            });
        }
        out.push((i + 1, k.replace('_', "-"), v.to_string()));
    }
    Ok(out)
}

/// Fully resolved settings of a `run`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: Option<String>,
    /// Per-axis overrides of the problem's default resolution.
    pub resolution: [Option<usize>; 3],
    pub flux: FluxKind,
    pub reconstruction: Reconstruction,
    pub integrator: TimeIntegrator,
    pub cfl: f64,
    pub dt: Option<f64>,
    pub tend: Option<f64>,
    pub out: PathBuf,
    pub snapshot_every: Option<f64>,
    pub format: SnapshotFormat,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: None,
            resolution: [None; 3],
            flux: FluxKind::Kepes,
            reconstruction: Reconstruction::Minmod,
            integrator: TimeIntegrator::Ssprk3,
            cfl: 0.8,
            dt: None,
            tend: None,
            out: PathBuf::from("out"),
            snapshot_every: None,
            format: SnapshotFormat::Csv,
            threads: None,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: e.to_string(),
    })
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.replace('_', "-");
        match key.as_str() {
            "problem" => self.problem = Some(value.to_string()),
            "nx" => self.resolution[0] = Some(parse_value(&key, value)?),
            "ny" => self.resolution[1] = Some(parse_value(&key, value)?),
            "nz" => self.resolution[2] = Some(parse_value(&key, value)?),
            "flux" => self.flux = parse_value(&key, value)?,
            "reconstruction" => self.reconstruction = parse_value(&key, value)?,
            "integrator" => self.integrator = parse_value(&key, value)?,
            "cfl" => self.cfl = parse_value(&key, value)?,
            "dt" => self.dt = Some(parse_value(&key, value)?),
            "tend" => self.tend = Some(parse_value(&key, value)?),
            "out" => self.out = PathBuf::from(value),
            "snapshot-every" => self.snapshot_every = Some(parse_value(&key, value)?),
            "format" => self.format = parse_value(&key, value)?,
            "threads" => self.threads = Some(parse_value(&key, value)?),
            _ => return Err(ConfigError::UnknownKey(key)),
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (_, k, v) in parse_pairs(text)? {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    pub fn problem_name(&self) -> Result<&str, ConfigError> {
        self.problem.as_deref().ok_or(ConfigError::MissingProblem)
    }

    /// Config text that reproduces `self` when read back.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(p) = &self.problem {
            let _ = writeln!(s, "problem = {p}");
        }
        for (name, n) in ["nx", "ny", "nz"].iter().zip(self.resolution) {
            if let Some(n) = n {
                let _ = writeln!(s, "{name} = {n}");
            }
        }
        let _ = writeln!(s, "flux = {}", self.flux);
        let _ = writeln!(s, "reconstruction = {}", self.reconstruction);
        let _ = writeln!(s, "integrator = {}", self.integrator);
        let _ = writeln!(s, "cfl = {:?}", self.cfl);
        if let Some(dt) = self.dt {
            let _ = writeln!(s, "dt = {dt:?}");
        }
        if let Some(t) = self.tend {
            let _ = writeln!(s, "tend = {t:?}");
        }
        let _ = writeln!(s, "out = {}", self.out.display());
        if let Some(t) = self.snapshot_every {
            let _ = writeln!(s, "snapshot-every = {t:?}");
        }
        let _ = writeln!(s, "format = {}", self.format);
        if let Some(n) = self.threads {
            let _ = writeln!(s, "threads = {n}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines() {
        let pairs = parse_pairs("# header\n\nproblem = rotor  # trailing\n snapshot_every=0.05\n").unwrap();
        assert_eq!(
            pairs,
            vec![
                (3, "problem".to_string(), "rotor".to_string()),
                (4, "snapshot-every".to_string(), "0.05".to_string()),
            ]
        );
    }

    #[test]
    fn syntax_errors_name_the_line() {
        assert_eq!(
            parse_pairs("cfl = 0.5\nnonsense\n"),
            Err(ConfigError::Syntax {
                line: 2,
                text: "nonsense".to_string()
            })
        );
        assert!(parse_pairs("cfl =\n").is_err());
    }

    #[test]
    fn bad_keys_and_values() {
        let mut cfg = RunConfig::default();
        assert!(matches!(cfg.set("speed", "1"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(cfg.set("flux", "roe"), Err(ConfigError::InvalidValue { .. })));
        assert!(matches!(cfg.set("nx", "-3"), Err(ConfigError::InvalidValue { .. })));
        assert_eq!(cfg.problem_name(), Err(ConfigError::MissingProblem));
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.apply_text(
            "problem = briowu1d\nnx = 128\nflux = kepes-naive\nreconstruction = linear\n\
             integrator = euler\ncfl = 0.45\ndt = 1e-4\ntend = 0.05\nout = /tmp/x\n\
             snapshot-every = 0.01\nformat = bin\nthreads = 2\n",
        )
        .unwrap();
        let mut back = RunConfig::default();
        back.apply_text(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(cfg.flux, FluxKind::KepesNaive);
        assert_eq!(cfg.resolution, [Some(128), None, None]);
    }
}
