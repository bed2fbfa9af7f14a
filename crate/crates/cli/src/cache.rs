//! On-disk cache of Fekete configurations, `<root>/<hash[..2]>/<hash>.json`.

use std::io::Write;
use std::path::{Path, PathBuf};

use pllab_core::fekete::FeketeConfig;

pub struct Cache {
    root: Option<PathBuf>,
}

impl Cache {
    pub fn new(root: Option<PathBuf>) -> Self {
        Cache { root }
    }

    pub fn disabled() -> Self {
        Cache { root: None }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.root.as_ref().map(|r| r.join(&key[..2]).join(format!("{key}.json")))
    }

    /// Cached config for `key`; unreadable entries are reported and ignored.
    pub fn load(&self, key: &str, cloud_id: &str) -> Option<FeketeConfig> {
        let path = self.path(key)?;
        let text = std::fs::read_to_string(&path).ok()?;
        match serde_json::from_str::<FeketeConfig>(&text) {
            Ok(cfg) if cfg.provenance.cloud_id == cloud_id => {
                log::info!("cache hit {key}");
                Some(cfg)
            }
            Ok(_) => {
                log::warn!("cache entry {} belongs to another cloud; recomputing", path.display());
                None
            }
            Err(e) => {
                log::warn!("corrupt cache entry {}: {e}; recomputing", path.display());
                None
            }
        }
    }

    /// Atomic write through a temporary file in the target directory.
    pub fn store(&self, key: &str, cfg: &FeketeConfig) {
        let Some(path) = self.path(key) else { return };
        if let Err(e) = write_atomic(&path, serde_json::to_string(cfg).expect("config serializes").as_bytes()) {
            log::warn!("could not write cache entry {}: {e}", path.display());
        }
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use pllab_core::fekete::{solve_fekete, WeightSpec};
    use pllab_core::poly_basis::BasisSpec;
    use pllab_core::{sample, SetSpec};

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(Some(dir.path().to_path_buf()));
        let cloud = sample(&SetSpec::interval(-1.0, 1.0), 101, 0).unwrap();
        let cfg = solve_fekete(&cloud, &BasisSpec::new(1, 3).unwrap(), &WeightSpec::Zero, 1, 1e-10).unwrap();
        let key = "ab".to_string() + &"0".repeat(62);
        assert!(cache.load(&key, &cloud.id).is_none());
        cache.store(&key, &cfg);
        assert!(dir.path().join("ab").join(format!("{key}.json")).exists());
        let back = cache.load(&key, &cloud.id).unwrap();
        assert_eq!(back.nodes, cfg.nodes);
        assert!(cache.load(&key, "other-cloud").is_none());
        std::fs::write(dir.path().join("ab").join(format!("{key}.json")), "{not json").unwrap();
        assert!(cache.load(&key, &cloud.id).is_none());
        assert!(Cache::disabled().load(&key, &cloud.id).is_none());
    }
}
