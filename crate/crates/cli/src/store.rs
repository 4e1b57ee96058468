use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use qspicb_core::Result;

/// Writes through a temporary file in the same directory and renames it.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Content-addressed store of JSON results under `QSPICB_CACHE_DIR`.
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn from_env() -> Self {
        Cache {
            dir: std::env::var_os("QSPICB_CACHE_DIR").map(PathBuf::from),
        }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        let digest = Sha256::digest(key.as_bytes());
        self.dir
            .as_ref()
            .map(|d| d.join(format!("{}.json", hex::encode(digest))))
    }

    pub fn get(&self, key: &str) -> Option<String> {
        fs::read_to_string(self.path(key)?).ok()
    }

    pub fn put(&self, key: &str, value: &str) -> Result<()> {
        match self.path(key) {
            Some(p) => write_atomic(&p, value),
            None => Ok(()),
        }
    }

    /// Returns the cached value for `key`, computing and storing it on a miss.
    /// A cached value that `parse` rejects is recomputed.
    pub fn get_or<T>(
        &self,
        key: &str,
        parse: impl Fn(&str) -> Result<T>,
        render: impl Fn(&T) -> String,
        make: impl FnOnce() -> Result<T>,
    ) -> Result<T> {
        if let Some(hit) = self.get(key) {
            if let Ok(v) = parse(&hit) {
                return Ok(v);
            }
        }
        let v = make()?;
        self.put(key, &render(&v))?;
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.json");
        write_atomic(&p, "1").unwrap();
        write_atomic(&p, "2").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "2");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn cache_round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache {
            dir: Some(dir.path().to_path_buf()),
        };
        let parse = |s: &str| {
            s.parse::<i32>()
                .map_err(|e| qspicb_core::Error::Config(e.to_string()))
        };
        let render = |v: &i32| v.to_string();
        assert_eq!(cache.get_or("k", parse, render, || Ok(7)).unwrap(), 7);
        assert_eq!(cache.get_or("k", parse, render, || Ok(8)).unwrap(), 7);
        fs::write(cache.path("k").unwrap(), "garbage").unwrap();
        assert_eq!(cache.get_or("k", parse, render, || Ok(9)).unwrap(), 9);
        let none = Cache { dir: None };
        assert_eq!(none.get_or("k", parse, render, || Ok(1)).unwrap(), 1);
    }
}
