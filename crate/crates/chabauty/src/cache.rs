//! Content-addressed result cache with a memory tier and an optional
//! disk tier.
//!
//! Keys are hashes of a canonical description of the computation inputs;
//! payloads are JSON values. Serialization uses sorted object keys, so
//! identical keys always yield byte-identical payload text. The cache is
//! transparent by construction: a missing directory, an unreadable file,
//! or a corrupt entry downgrades to a recompute (with a warning for
//! corruption), never to a different result.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::error::Result;

pub const CACHE_DIR_ENV: &str = "CHABAUTY_CACHE_DIR";

pub struct Cache {
    dir: Option<PathBuf>,
    memo: BTreeMap<String, serde_json::Value>,
    warnings: Vec<String>,
}

fn sha_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Canonical serialization of a payload; object keys are sorted by the
/// underlying map, so equal values print identically.
fn canonical(payload: &serde_json::Value) -> String {
    payload.to_string()
}

impl Cache {
    /// Memory-only cache; every process recomputes from scratch.
    pub fn disabled() -> Cache {
        Cache {
            dir: None,
            memo: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn at_dir(dir: impl Into<PathBuf>) -> Cache {
        Cache {
            dir: Some(dir.into()),
            memo: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    /// Cache rooted at CHABAUTY_CACHE_DIR, or memory-only when unset.
    pub fn from_env() -> Cache {
        match std::env::var(CACHE_DIR_ENV) {
            Ok(dir) if !dir.trim().is_empty() => Cache::at_dir(dir),
            _ => Cache::disabled(),
        }
    }

    /// Hash of a sequence of input strings, length-prefixed so that part
    /// boundaries matter.
    pub fn content_key(parts: &[&str]) -> String {
        let mut blob = Vec::new();
        for p in parts {
            blob.extend_from_slice(p.len().to_string().as_bytes());
            blob.push(b':');
            blob.extend_from_slice(p.as_bytes());
        }
        sha_hex(&blob)
    }

    fn path_for(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    fn read_disk(&mut self, key: &str) -> Option<serde_json::Value> {
        let path = self.path_for(key)?;
        let text = fs::read_to_string(&path).ok()?;
        let parsed: serde_json::Value = match serde_json::from_str(&text) {
            Ok(v) => v,
            Err(_) => {
                self.warnings
                    .push(format!("cache entry {key} is corrupt (unparseable); recomputing"));
                return None;
            }
        };
        let check = parsed.get("check").and_then(|c| c.as_str());
        let payload = parsed.get("payload");
        match (check, payload) {
            (Some(check), Some(payload)) if sha_hex(canonical(payload).as_bytes()) == check => {
                Some(payload.clone())
            }
            _ => {
                self.warnings
                    .push(format!("cache entry {key} failed its hash check; recomputing"));
                None
            }
        }
    }

    fn write_disk(&mut self, key: &str, payload: &serde_json::Value) {
        let Some(path) = self.path_for(key) else {
            return;
        };
        let entry = serde_json::json!({
            "check": sha_hex(canonical(payload).as_bytes()),
            "payload": payload,
        });
        let write = || -> std::io::Result<()> {
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)?;
            }
            let tmp = path.with_extension("tmp");
            fs::write(&tmp, entry.to_string())?;
            fs::rename(&tmp, &path)
        };
        if let Err(e) = write() {
            self.warnings
                .push(format!("cache entry {key} could not be written: {e}"));
        }
    }

    /// Read-through lookup: memory, then disk, then the producer. The
    /// producer's value is stored in both tiers on the way out.
    pub fn lookup_or_compute<F>(&mut self, key: &str, producer: F) -> Result<serde_json::Value>
    where
        F: FnOnce() -> Result<serde_json::Value>,
    {
        if let Some(v) = self.memo.get(key) {
            return Ok(v.clone());
        }
        if let Some(v) = self.read_disk(key) {
            self.memo.insert(key.to_string(), v.clone());
            return Ok(v);
        }
        let v = producer()?;
        self.write_disk(key, &v);
        self.memo.insert(key.to_string(), v.clone());
        Ok(v)
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn take_warnings(&mut self) -> Vec<String> {
        std::mem::take(&mut self.warnings)
    }
}
