//! On-disk cache: one JSON file per (spec, check), named by a SHA-256 of the
//! spec string, field modulus, check name and tool version.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::report::TOOLCHAIN;

#[derive(Clone, Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir }
    }

    pub fn disabled() -> Self {
        Cache { dir: None }
    }

    pub fn key(spec: &str, modulus: &[u32], check: &str) -> String {
        let mut h = Sha256::new();
        for part in [spec, &format!("{modulus:?}"), check, TOOLCHAIN] {
            h.update(part.as_bytes());
            h.update([0u8]);
        }
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    pub fn get<T: DeserializeOwned>(&self, spec: &str, modulus: &[u32], check: &str) -> Option<T> {
        let path = self.path(&Self::key(spec, modulus, check))?;
        let bytes = fs::read(path).ok()?;
        serde_json::from_slice(&bytes).ok()
    }

    /// Write-then-rename; failures are ignored since the cache is advisory.
    pub fn put<T: Serialize>(&self, spec: &str, modulus: &[u32], check: &str, value: &T) {
        let key = Self::key(spec, modulus, check);
        let (Some(dir), Some(path)) = (self.dir.as_ref(), self.path(&key)) else {
            return;
        };
        let _ = write_atomic(dir, &path, &key, value);
    }
}

fn write_atomic<T: Serialize>(dir: &Path, path: &Path, key: &str, value: &T) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(".{key}.{}.tmp", std::process::id()));
    let mut f = fs::File::create(&tmp)?;
    f.write_all(&serde_json::to_vec(value)?)?;
    f.sync_all()?;
    fs::rename(&tmp, path)
}
