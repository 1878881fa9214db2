//! Directory of one-file-per-entry pairing results, keyed by a content hash.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ihpair_core::pairing::{EvalOptions, PairingResult, PairingSpec, Target, ENGINE_VERSION};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const CACHE_ENV: &str = "IHPAIR_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".ihpair-cache";

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub entries: usize,
    pub bytes: u64,
}

/// Hash of the canonical serialization of everything the value may depend on.
pub fn cache_key(spec: &PairingSpec, target: Target, opts: &EvalOptions) -> String {
    let canonical = json!({
        "engine": ENGINE_VERSION,
        "spec": spec.normalized(),
        "target": target,
        "family_index": opts.family_index.unwrap_or(spec.r),
        "keep_hessian": opts.keep_hessian,
        "window_bump": opts.window_bump,
    });
    hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// Directory from the environment, or the default relative one.
    pub fn from_env() -> Self {
        Cache::new(std::env::var_os(CACHE_ENV).map(PathBuf::from).unwrap_or_else(|| DEFAULT_CACHE_DIR.into()))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// Unreadable or corrupt entries count as misses.
    pub fn get(&self, key: &str) -> Option<PairingResult> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    /// Writes through a temporary file in the same directory, then renames into place.
    pub fn put(&self, key: &str, result: &PairingResult) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(key);
        if path.exists() {
            return Ok(());
        }
        let mut tmp = tempfile::Builder::new().prefix(".tmp-").tempfile_in(&self.dir)?;
        tmp.write_all(serde_json::to_string(result)?.as_bytes())?;
        tmp.flush()?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(())
    }

    fn entries(&self) -> Result<Vec<PathBuf>> {
        let rd = match fs::read_dir(&self.dir) {
            Ok(rd) => rd,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        let mut out = Vec::new();
        for entry in rd {
            let p = entry?.path();
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
            if !name.starts_with('.') && name.ends_with(".json") {
                out.push(p);
            }
        }
        Ok(out)
    }

    pub fn stats(&self) -> Result<CacheStats> {
        let mut s = CacheStats::default();
        for p in self.entries()? {
            s.entries += 1;
            s.bytes += fs::metadata(&p)?.len();
        }
        Ok(s)
    }

    /// Removes every entry; returns how many were removed.
    pub fn clear(&self) -> Result<usize> {
        let entries = self.entries()?;
        for p in &entries {
            fs::remove_file(p)?;
        }
        Ok(entries.len())
    }
}
