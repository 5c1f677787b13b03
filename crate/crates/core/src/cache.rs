//! Content-addressed on-disk cache of orbit tables.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ffalg::Bounds;
use crate::hall::OrbitStore;
use crate::repspace::{OrbitMethod, OrbitTable, RepSpace};

pub const CACHE_ENV: &str = "HALL_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".hallcache";

/// Orbit tables stored as `<dir>/<sha256 of quiver, dim, q>.json`.
#[derive(Debug, Clone)]
pub struct OrbitCache {
    dir: PathBuf,
}

impl OrbitCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        OrbitCache { dir: dir.into() }
    }

    /// Uses `$HALL_CACHE_DIR`, falling back to `./.hallcache`.
    pub fn from_env() -> Self {
        OrbitCache::new(
            std::env::var_os(CACHE_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| DEFAULT_CACHE_DIR.into()),
        )
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(space: &RepSpace) -> String {
        let canonical = serde_json::json!({
            "dim": space.dim(),
            "q": space.field().q(),
            "quiver": space.quiver().canonical_json(),
        });
        hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
    }

    pub fn path(&self, space: &RepSpace) -> PathBuf {
        self.dir.join(format!("{}.json", OrbitCache::key(space)))
    }

    pub fn get(&self, space: &RepSpace, bounds: &Bounds) -> Result<Option<OrbitTable>> {
        let path = self.path(space);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(&path, e)),
        };
        let value: serde_json::Value = serde_json::from_slice(&bytes).map_err(|e| Error::io(&path, e))?;
        Ok(Some(OrbitTable::from_json(space, &value, bounds)?))
    }

    /// Writes through a temporary file in the cache directory, then renames.
    pub fn put(&self, table: &OrbitTable) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let path = self.path(table.space());
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let bytes = serde_json::to_vec_pretty(&table.to_json()).map_err(|e| Error::io(&path, e))?;
        tmp.write_all(&bytes).map_err(|e| Error::io(tmp.path(), e))?;
        tmp.persist(&path).map_err(|e| Error::io(&path, e.error))?;
        Ok(path)
    }

    /// Returns the cached table, computing and storing it on a miss. The flag
    /// reports a hit.
    pub fn get_or_compute(&self, space: &RepSpace, bounds: &Bounds) -> Result<(OrbitTable, bool)> {
        if let Some(t) = self.get(space, bounds)? {
            return Ok((t, true));
        }
        let t = OrbitTable::compute(space, bounds, OrbitMethod::Auto)?;
        self.put(&t)?;
        Ok((t, false))
    }

    /// Removes every cached table and returns how many were removed.
    pub fn purge(&self) -> Result<usize> {
        let entries = match fs::read_dir(&self.dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(Error::io(&self.dir, e)),
        };
        let mut removed = 0;
        for entry in entries {
            let path = entry.map_err(|e| Error::io(&self.dir, e))?.path();
            if path.extension().is_some_and(|x| x == "json") {
                fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
                removed += 1;
            }
        }
        Ok(removed)
    }
}

impl OrbitStore for OrbitCache {
    fn load(&self, space: &RepSpace, bounds: &Bounds) -> Result<Option<OrbitTable>> {
        self.get(space, bounds)
    }

    fn save(&self, table: &OrbitTable) -> Result<()> {
        self.put(table).map(|_| ())
    }
}
