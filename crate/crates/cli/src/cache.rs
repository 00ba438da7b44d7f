//! Persistent factorization cache, one `value=factorization` line per entry.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::sync::Mutex;

use delicate_primes::arith::{Effort, FactoredInteger, Factorizer, Natural};

/// Wraps an [`Effort`] budget; complete factorizations are remembered and
/// served back, so a warm cache only changes running time.
#[derive(Debug, Default)]
pub struct FactorCache {
    effort: Effort,
    entries: Mutex<BTreeMap<Natural, FactoredInteger>>,
}

/// Outcome of reading a cache file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LoadStats {
    pub loaded: usize,
    pub skipped: usize,
}

fn parse_line(line: &str) -> Option<FactoredInteger> {
    let (value, factors) = line.split_once('=')?;
    let value: Natural = value.trim().parse().ok()?;
    let f: FactoredInteger = factors.parse().ok()?;
    (f.value() == &value).then_some(f)
}

impl FactorCache {
    pub fn new(effort: Effort) -> Self {
        FactorCache { effort, entries: Mutex::new(BTreeMap::new()) }
    }

    /// Reads `path` if it exists. Lines that do not parse, or whose parts do
    /// not multiply back to the value, are skipped and counted.
    pub fn load(path: &Path, effort: Effort) -> io::Result<(Self, LoadStats)> {
        let cache = FactorCache::new(effort);
        let mut stats = LoadStats::default();
        let text = match fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok((cache, stats)),
            Err(e) => return Err(e),
        };
        {
            let mut entries = cache.entries.lock().unwrap();
            for line in text.lines().filter(|l| !l.trim().is_empty()) {
                match parse_line(line) {
                    Some(f) => {
                        entries.insert(f.value().clone(), f);
                        stats.loaded += 1;
                    }
                    None => stats.skipped += 1,
                }
            }
        }
        Ok((cache, stats))
    }

    /// Writes every entry in increasing order of value via a temporary file and a rename.
    pub fn store(&self, path: &Path) -> io::Result<()> {
        let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        fs::create_dir_all(dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        for (value, f) in self.entries.lock().unwrap().iter() {
            writeln!(tmp, "{value}={f}")?;
        }
        tmp.flush()?;
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    }

    pub fn merge(&self, other: &FactorCache) {
        let theirs = other.entries.lock().unwrap().clone();
        let mut ours = self.entries.lock().unwrap();
        for (value, f) in theirs {
            ours.entry(value).or_insert(f);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, n: &Natural) -> Option<FactoredInteger> {
        self.entries.lock().unwrap().get(n).cloned()
    }

    pub fn insert(&self, f: FactoredInteger) {
        self.entries.lock().unwrap().insert(f.value().clone(), f);
    }

    pub fn entries(&self) -> Vec<FactoredInteger> {
        self.entries.lock().unwrap().values().cloned().collect()
    }
}

impl Factorizer for FactorCache {
    fn factorize(&self, n: &Natural) -> FactoredInteger {
        if let Some(f) = self.get(n).filter(FactoredInteger::is_complete) {
            return f;
        }
        let f = self.effort.factorize(n);
        if f.is_complete() {
            self.insert(f.clone());
        }
        f
    }
}
