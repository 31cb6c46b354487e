//! Persistent cache of R-matrix bundles.
//!
//! Each entry is a self-describing envelope `{schema_version, key, payload}`
//! whose payload is the canonical encoding of the bundle. Writes go to a
//! temporary file in the cache directory and are renamed into place, so a
//! reader sees either the old entry or the new one, never a partial file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use qheis_core::codec::Canonical;
use qheis_core::rmatrix::RMatrixBundle;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::CliResult;

pub const CACHE_SCHEMA_VERSION: u32 = 1;
pub const CACHE_ENV: &str = "QHEIS_CACHE_DIR";

/// Identifies a bundle. Bundles are always built with a formal central
/// parameter, so `central` is `"formal"` for every entry written today.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleKey {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub central: String,
    pub u_caps: i32,
    pub tool_version: String,
}

impl BundleKey {
    pub fn new(n: usize, k: usize) -> Self {
        BundleKey { n, k, central: "formal".into(), u_caps: k as i32 + 3, tool_version: crate::TOOL_VERSION.into() }
    }

    /// File name; the version is deliberately left out, so that a newer tool
    /// finds and replaces an older entry instead of piling up files.
    fn file_name(&self) -> String {
        format!("bundle-N{}-K{}-U{}-{}.json", self.n, self.k, self.u_caps, self.central)
    }
}

#[derive(Debug)]
pub enum Lookup {
    Hit(RMatrixBundle),
    Miss,
    /// Unreadable entry; the message says why.
    Corrupt(String),
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// The flag wins over the environment; no directory means no cache.
    pub fn from_flag_or_env(flag: Option<&Path>) -> Option<Self> {
        flag.map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .map(Cache::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, key: &BundleKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    pub fn load(&self, key: &BundleKey) -> Lookup {
        let bytes = match fs::read(self.path(key)) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Lookup::Miss,
            Err(e) => return Lookup::Corrupt(e.to_string()),
        };
        let env: Value = match serde_json::from_slice(&bytes) {
            Ok(v) => v,
            Err(e) => return Lookup::Corrupt(format!("not json: {e}")),
        };
        if env.get("schema_version").and_then(Value::as_u64) != Some(CACHE_SCHEMA_VERSION as u64) {
            return Lookup::Miss;
        }
        let stored: BundleKey = match env.get("key").cloned().map(serde_json::from_value) {
            Some(Ok(k)) => k,
            _ => return Lookup::Corrupt("missing or malformed key".into()),
        };
        if &stored != key {
            return Lookup::Miss;
        }
        let payload = match env.get("payload") {
            Some(p) => p,
            None => return Lookup::Corrupt("missing payload".into()),
        };
        match RMatrixBundle::from_value(payload) {
            Ok(b) if b.n == key.n && b.k == key.k && b.u_caps == key.u_caps => Lookup::Hit(b),
            Ok(_) => Lookup::Corrupt("payload does not match its key".into()),
            Err(e) => Lookup::Corrupt(e.to_string()),
        }
    }

    pub fn store(&self, key: &BundleKey, bundle: &RMatrixBundle) -> CliResult<()> {
        fs::create_dir_all(&self.dir)?;
        let env = json!({
            "schema_version": CACHE_SCHEMA_VERSION,
            "key": key,
            "payload": bundle.to_value(),
        });
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        serde_json::to_writer(&mut tmp, &env)?;
        tmp.flush()?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path(key)).map_err(|e| e.error)?;
        Ok(())
    }

    /// Loads the bundle or builds and stores it. Returns whether it was a hit.
    /// A corrupt entry is reported on stderr and overwritten.
    pub fn load_or_build(
        &self,
        key: &BundleKey,
        build: impl FnOnce() -> qheis_core::Result<RMatrixBundle>,
    ) -> CliResult<(RMatrixBundle, bool)> {
        match self.load(key) {
            Lookup::Hit(b) => return Ok((b, true)),
            Lookup::Miss => {}
            Lookup::Corrupt(why) => {
                eprintln!("warning: corrupt cache entry {}: {why}; recomputing", self.path(key).display());
            }
        }
        let b = build()?;
        self.store(key, &b)?;
        Ok((b, false))
    }
}
