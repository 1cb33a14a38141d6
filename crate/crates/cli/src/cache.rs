//! Content-addressed result cache: one `<sha256>.json` file per key, guarded
//! by an advisory lock on `.lock` in the cache directory.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating cache directory {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    pub fn key(parts: &[&str]) -> String {
        let mut h = Sha256::new();
        for p in parts {
            h.update(p.as_bytes());
            h.update([0u8]);
        }
        hex::encode(h.finalize())
    }

    fn lock_file(&self) -> Result<File> {
        let path = self.dir.join(".lock");
        OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(&path)
            .with_context(|| format!("opening {}", path.display()))
    }

    pub fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Result<Option<String>> {
        let lock = self.lock_file()?;
        lock.lock_shared()?;
        let out = match fs::read_to_string(self.path(key)) {
            Ok(s) => Some(s),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
            Err(e) => return Err(e.into()),
        };
        lock.unlock()?;
        Ok(out)
    }

    pub fn put(&self, key: &str, contents: &str) -> Result<()> {
        let lock = self.lock_file()?;
        lock.lock()?;
        let tmp = self.dir.join(format!(".{key}.{}.tmp", std::process::id()));
        {
            let mut f = File::create(&tmp)?;
            f.write_all(contents.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, self.path(key))?;
        lock.unlock()?;
        Ok(())
    }
}
