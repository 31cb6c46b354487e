//! Run configuration shared by every subcommand.

use std::collections::BTreeMap;
use std::path::PathBuf;

use qheis_core::codec::rational_string;
use qheis_core::{parse_rational, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Optional per-class caps, from `--caps degree=3,z=2,window=2,scan=12`.
/// Unset entries fall back to a suite default.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassCaps {
    /// Largest total weight of sampled monomials and states.
    pub degree: Option<u32>,
    /// Largest retained power of the formal variables `z`, `u`.
    pub z: Option<i32>,
    /// Exponent window of the associativity and locality comparisons.
    pub window: Option<i32>,
    /// Largest exponent tried by the `s`/`r` searches.
    pub scan: Option<u32>,
}

impl ClassCaps {
    pub fn parse(s: &str) -> CliResult<Self> {
        let mut caps = ClassCaps::default();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (key, val) =
                item.split_once('=').ok_or_else(|| CliError::Usage(format!("bad cap {item:?}, expected key=value")))?;
            let v: u32 = val
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("cap {key} needs a positive integer, got {val:?}")))?;
            if v == 0 {
                return Err(CliError::Usage(format!("cap {key} must be positive")));
            }
            match key.trim() {
                "degree" | "deg" => caps.degree = Some(v),
                "z" => caps.z = Some(v as i32),
                "window" => caps.window = Some(v as i32),
                "scan" => caps.scan = Some(v),
                other => return Err(CliError::Usage(format!("unknown cap {other:?}"))),
            }
        }
        Ok(caps)
    }

    fn echo(&self) -> BTreeMap<String, u32> {
        let mut m = BTreeMap::new();
        if let Some(v) = self.degree {
            m.insert("degree".into(), v);
        }
        if let Some(v) = self.z {
            m.insert("z".into(), v as u32);
        }
        if let Some(v) = self.window {
            m.insert("window".into(), v as u32);
        }
        if let Some(v) = self.scan {
            m.insert("scan".into(), v);
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub n: usize,
    pub c: Option<Rational>,
    /// `--formal-C`: keep the central parameter symbolic.
    pub formal: bool,
    pub k: usize,
    pub caps: ClassCaps,
    /// `None` uses the suite default.
    pub samples: Option<usize>,
    pub seed: u64,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
    pub cache_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 2,
            c: None,
            formal: false,
            k: 4,
            caps: ClassCaps::default(),
            samples: None,
            seed: 0,
            jobs: 0,
            cache_dir: None,
        }
    }
}

/// Echo of the configuration in the report. The cache directory is left out
/// so that reports do not depend on where the cache lives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEcho {
    #[serde(rename = "N")]
    pub n: usize,
    /// `"p/q"` when given.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c: Option<String>,
    #[serde(rename = "formal_C")]
    pub formal: bool,
    #[serde(rename = "K")]
    pub k: usize,
    pub caps: BTreeMap<String, u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples: Option<usize>,
    pub seed: u64,
    pub jobs: usize,
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.n < 2 {
            return Err(CliError::Usage(format!("N must be at least 2, got {}", self.n)));
        }
        if self.n > 9 {
            return Err(CliError::Usage(format!("N = {} is beyond the supported range 2..=9", self.n)));
        }
        if self.formal && self.c.is_some() {
            return Err(CliError::Usage("--c and --formal-C exclude each other".into()));
        }
        Ok(())
    }

    /// Numeric level for suites that need one; defaults to 1.
    pub fn level(&self, suite: &str) -> CliResult<Rational> {
        if self.formal {
            return Err(CliError::Usage(format!("suite {suite} needs a numeric c; drop --formal-C")));
        }
        Ok(self.c.clone().unwrap_or_else(|| qheis_core::ri(1)))
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            n: self.n,
            c: self.c.as_ref().map(rational_string),
            formal: self.formal,
            k: self.k,
            caps: self.caps.echo(),
            samples: self.samples,
            seed: self.seed,
            jobs: self.jobs,
        }
    }
}

pub fn parse_level(s: &str) -> CliResult<Rational> {
    parse_rational(s).map_err(|e| CliError::Usage(format!("bad c {s:?}: {e}")))
}
