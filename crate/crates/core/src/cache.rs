//! Memoized class counts per trace, optionally persisted as CSV.
//!
//! File format: header `trace,mu0,discriminant,n_cycles`, then one row of
//! exact integers per trace in increasing order. A file whose header or rows
//! do not parse (or disagree with `discriminant = t^2 - 4`) is ignored as a
//! whole and the counts are recomputed.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modular::{classes_of_trace, TraceClasses};

pub const CACHE_HEADER: &str = "trace,mu0,discriminant,n_cycles";

/// One cached row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassCount {
    pub trace: u64,
    pub mu0: u64,
    pub discriminant: u64,
    pub n_cycles: u64,
}

impl ClassCount {
    pub fn from_classes(tc: &TraceClasses) -> Self {
        Self {
            trace: tc.trace,
            mu0: tc.mu0(),
            discriminant: tc.trace * tc.trace - 4,
            n_cycles: tc.n_cycles(),
        }
    }

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{}", self.trace, self.mu0, self.discriminant, self.n_cycles)
    }
}

/// Result of reading a cache file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CacheLoad {
    Missing,
    Loaded(usize),
    /// The file exists but was rejected; the reason is kept for logging.
    Corrupt(String),
}

/// Thread-safe trace -> counts memo. Readers share a lock; a computed entry
/// is inserted under a short write lock.
#[derive(Debug, Default)]
pub struct Mu0Cache {
    counts: RwLock<BTreeMap<u64, ClassCount>>,
    classes: RwLock<BTreeMap<u64, Arc<TraceClasses>>>,
    path: Option<PathBuf>,
}

impl Mu0Cache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// A cache backed by `path`; existing contents are loaded if valid.
    pub fn with_file(path: impl Into<PathBuf>) -> (Self, CacheLoad) {
        let path = path.into();
        let (rows, load) = match read_cache_file(&path) {
            Ok(Some(rows)) => {
                let n = rows.len();
                (rows, CacheLoad::Loaded(n))
            }
            Ok(None) => (BTreeMap::new(), CacheLoad::Missing),
            Err(e) => (BTreeMap::new(), CacheLoad::Corrupt(e.to_string())),
        };
        let cache = Self {
            counts: RwLock::new(rows),
            classes: RwLock::new(BTreeMap::new()),
            path: Some(path),
        };
        (cache, load)
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.counts.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Full class list for `t`, computed once.
    pub fn classes(&self, t: u64) -> Result<Arc<TraceClasses>> {
        if let Some(tc) = self.classes.read().expect("cache lock").get(&t) {
            return Ok(Arc::clone(tc));
        }
        let tc = Arc::new(classes_of_trace(t)?);
        let count = ClassCount::from_classes(&tc);
        let mut classes = self.classes.write().expect("cache lock");
        let entry = classes.entry(t).or_insert_with(|| Arc::clone(&tc));
        let out = Arc::clone(entry);
        drop(classes);
        self.counts.write().expect("cache lock").insert(t, count);
        Ok(out)
    }

    pub fn count(&self, t: u64) -> Result<ClassCount> {
        if let Some(c) = self.counts.read().expect("cache lock").get(&t) {
            return Ok(*c);
        }
        Ok(ClassCount::from_classes(self.classes(t)?.as_ref()))
    }

    pub fn mu0(&self, t: u64) -> Result<u64> {
        Ok(self.count(t)?.mu0)
    }

    /// Counts for every trace in the range; missing entries computed in parallel.
    pub fn counts(&self, range: std::ops::RangeInclusive<u64>) -> Result<Vec<ClassCount>> {
        range
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|t| self.count(t))
            .collect()
    }

    pub fn snapshot(&self) -> Vec<ClassCount> {
        self.counts.read().expect("cache lock").values().copied().collect()
    }

    /// Writes the full table to the backing file, if any.
    pub fn persist(&self) -> Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        write_cache_file(path, &self.snapshot())
    }
}

pub fn render_csv(rows: &[ClassCount]) -> String {
    let mut out = String::with_capacity(32 * (rows.len() + 1));
    out.push_str(CACHE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

pub fn write_cache_file(path: &Path, rows: &[ClassCount]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Cache(e.to_string()))?;
    }
    let tmp = path.with_extension("csv.tmp");
    let mut f = fs::File::create(&tmp).map_err(|e| Error::Cache(e.to_string()))?;
    f.write_all(render_csv(rows).as_bytes())
        .map_err(|e| Error::Cache(e.to_string()))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| Error::Cache(e.to_string()))
}

/// `Ok(None)` if absent, `Err` if present but malformed.
pub fn read_cache_file(path: &Path) -> Result<Option<BTreeMap<u64, ClassCount>>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(Error::Cache(e.to_string())),
    };
    parse_cache(&text).map(Some)
}

pub fn parse_cache(text: &str) -> Result<BTreeMap<u64, ClassCount>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CACHE_HEADER => {}
        other => {
            return Err(Error::Cache(format!(
                "bad header {:?}",
                other.unwrap_or_default()
            )))
        }
    }
    let mut rows = BTreeMap::new();
    for (n, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<u64> = line
            .split(',')
            .map(|f| f.parse::<u64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Cache(format!("row {}: {e}", n + 2)))?;
        let [trace, mu0, discriminant, n_cycles] = fields[..] else {
            return Err(Error::Cache(format!("row {}: expected 4 fields", n + 2)));
        };
        if trace < 3 || discriminant != trace * trace - 4 || mu0 > n_cycles || mu0 == 0 {
            return Err(Error::Cache(format!("row {}: inconsistent values", n + 2)));
        }
        rows.insert(
            trace,
            ClassCount {
                trace,
                mu0,
                discriminant,
                n_cycles,
            },
        );
    }
    Ok(rows)
}
