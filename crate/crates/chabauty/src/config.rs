//! Flat key-value configuration files with repeated named blocks.
//!
//! The format is deliberately plain so that any implementation can parse
//! it with a line loop:
//!
//! ```text
//! # a comment
//! [curve]
//! field = -2, 0, 1
//! s0 = 2, 3
//! alpha = 5
//! q = 3
//!
//! [curve]
//! field = 1
//! divisor = 0, 1
//! ```
//!
//! A `[name]` line opens a block; every `key = value` line below it
//! belongs to that block until the next header. Blocks with the same
//! name repeat freely (one instance each). Keys inside a block may also
//! repeat; lookups take the last occurrence. Lines that are blank or
//! start with `#` are skipped.

use crate::error::{Error, Result};
use crate::poly::Q;
use crate::report::parse_q;

#[derive(Clone, Debug)]
pub struct ConfigBlock {
    pub name: String,
    /// 1-based line number of the block header, for error messages.
    pub line: usize,
    entries: Vec<(String, String)>,
}

impl ConfigBlock {
    pub fn new(name: impl Into<String>) -> Self {
        ConfigBlock {
            name: name.into(),
            line: 0,
            entries: Vec::new(),
        }
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.push((key.into(), value.into()));
    }

    /// Last value for the key, if present.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| {
            Error::Config(format!(
                "block [{}] (line {}) is missing the key `{}`",
                self.name, self.line, key
            ))
        })
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    fn bad(&self, key: &str, value: &str, wanted: &str) -> Error {
        Error::Config(format!(
            "block [{}]: key `{}` = `{}` is not {}",
            self.name, key, value, wanted
        ))
    }

    /// Comma-separated integer list; an empty value is an empty list.
    pub fn int_list(&self, key: &str) -> Result<Vec<i64>> {
        let raw = self.require(key)?;
        split_list(raw)
            .map(|tok| {
                tok.parse::<i64>()
                    .map_err(|_| self.bad(key, raw, "a comma-separated integer list"))
            })
            .collect()
    }

    pub fn u64_list(&self, key: &str) -> Result<Vec<u64>> {
        let raw = self.require(key)?;
        split_list(raw)
            .map(|tok| {
                tok.parse::<u64>()
                    .map_err(|_| self.bad(key, raw, "a comma-separated list of nonnegative integers"))
            })
            .collect()
    }

    pub fn u64_value(&self, key: &str) -> Result<u64> {
        let raw = self.require(key)?;
        raw.parse::<u64>()
            .map_err(|_| self.bad(key, raw, "a nonnegative integer"))
    }

    pub fn u32_value(&self, key: &str) -> Result<u32> {
        let raw = self.require(key)?;
        raw.parse::<u32>()
            .map_err(|_| self.bad(key, raw, "a nonnegative integer"))
    }

    /// Exact rational in `num/den` or plain integer form.
    pub fn rational(&self, key: &str) -> Result<Q> {
        let raw = self.require(key)?;
        parse_q(raw).map_err(|_| self.bad(key, raw, "an exact rational (num/den)"))
    }

    /// Comma-separated rationals, for polynomial coefficient lists.
    pub fn rational_list(&self, key: &str) -> Result<Vec<Q>> {
        let raw = self.require(key)?;
        split_list(raw)
            .map(|tok| {
                parse_q(tok).map_err(|_| self.bad(key, raw, "a comma-separated rational list"))
            })
            .collect()
    }
}

fn split_list(raw: &str) -> impl Iterator<Item = &str> {
    raw.split(',').map(str::trim).filter(|t| !t.is_empty())
}

#[derive(Clone, Debug, Default)]
pub struct Config {
    pub blocks: Vec<ConfigBlock>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut blocks: Vec<ConfigBlock> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            if let Some(inner) = t.strip_prefix('[') {
                let name = inner.strip_suffix(']').ok_or_else(|| {
                    Error::Config(format!("line {lineno}: unterminated block header `{t}`"))
                })?;
                let name = name.trim();
                if name.is_empty() {
                    return Err(Error::Config(format!("line {lineno}: empty block name")));
                }
                let mut b = ConfigBlock::new(name);
                b.line = lineno;
                blocks.push(b);
                continue;
            }
            let (key, value) = t.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {lineno}: expected `key = value` or `[block]`, got `{t}`"
                ))
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Config(format!("line {lineno}: empty key")));
            }
            let block = blocks.last_mut().ok_or_else(|| {
                Error::Config(format!(
                    "line {lineno}: `{key}` appears before any [block] header"
                ))
            })?;
            block.set(key, value.trim());
        }
        Ok(Config { blocks })
    }

    pub fn named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a ConfigBlock> {
        self.blocks.iter().filter(move |b| b.name == name)
    }

    /// The unique block with this name.
    pub fn single(&self, name: &str) -> Result<&ConfigBlock> {
        let mut it = self.blocks.iter().filter(|b| b.name == name);
        let first = it
            .next()
            .ok_or_else(|| Error::Config(format!("no [{name}] block in the configuration")))?;
        if it.next().is_some() {
            return Err(Error::Config(format!(
                "more than one [{name}] block; expected exactly one"
            )));
        }
        Ok(first)
    }
}
