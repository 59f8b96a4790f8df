//! Memo tables for the `λ` and `N` coefficients.
//!
//! Entries are keyed by the canonical multiset, so results never depend on
//! cache state. The tables can be exported to and imported from a versioned
//! JSON file; anything that fails validation is rejected as a whole.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::multiset::IntMultiSet;

pub const CACHE_FORMAT: &str = "kappa-coefficient-cache/1";
pub const DEFAULT_CAPACITY: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Table {
    Lambda,
    N,
}

#[derive(Debug)]
pub struct CoefficientCache {
    lambda: RwLock<HashMap<IntMultiSet, BigInt>>,
    n: RwLock<HashMap<IntMultiSet, BigInt>>,
    capacity: usize,
    enabled: AtomicBool,
    hits: AtomicU64,
    misses: AtomicU64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub lambda_entries: usize,
    pub n_entries: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheFile {
    format: String,
    lambda: BTreeMap<String, String>,
    n: BTreeMap<String, String>,
}

impl CoefficientCache {
    pub fn new(capacity: usize) -> Self {
        CoefficientCache {
            lambda: RwLock::new(HashMap::new()),
            n: RwLock::new(HashMap::new()),
            capacity,
            enabled: AtomicBool::new(true),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    fn map(&self, table: Table) -> &RwLock<HashMap<IntMultiSet, BigInt>> {
        match table {
            Table::Lambda => &self.lambda,
            Table::N => &self.n,
        }
    }

    pub fn set_enabled(&self, on: bool) {
        self.enabled.store(on, Ordering::SeqCst);
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled.load(Ordering::SeqCst)
    }

    /// Returns the cached value or computes, stores and returns it.
    pub fn get_or_compute(
        &self,
        table: Table,
        key: &IntMultiSet,
        compute: impl FnOnce() -> BigInt,
    ) -> BigInt {
        if !self.is_enabled() {
            return compute();
        }
        if let Some(v) = self.map(table).read().unwrap().get(key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return v.clone();
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let value = compute();
        let mut guard = self.map(table).write().unwrap();
        if guard.len() < self.capacity {
            guard.insert(key.clone(), value.clone());
        }
        value
    }

    pub fn clear(&self) {
        self.lambda.write().unwrap().clear();
        self.n.write().unwrap().clear();
        self.hits.store(0, Ordering::Relaxed);
        self.misses.store(0, Ordering::Relaxed);
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            lambda_entries: self.lambda.read().unwrap().len(),
            n_entries: self.n.read().unwrap().len(),
        }
    }

    /// Serializes both tables; keys and entries are sorted for stable output.
    pub fn export_json(&self) -> String {
        let dump = |t: Table| -> BTreeMap<String, String> {
            self.map(t)
                .read()
                .unwrap()
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect()
        };
        let file = CacheFile {
            format: CACHE_FORMAT.to_string(),
            lambda: dump(Table::Lambda),
            n: dump(Table::N),
        };
        serde_json::to_string_pretty(&file).expect("cache serializes")
    }

    /// Loads entries from a cache file. On any validation failure nothing is
    /// inserted and the reason is returned.
    pub fn import_json(&self, text: &str) -> Result<usize, String> {
        self.import_json_checked(text, |_, _, _| true)
    }

    /// Like [`Self::import_json`], but every entry must also pass `check`
    /// (typically a recomputation) or the whole file is rejected.
    pub fn import_json_checked(
        &self,
        text: &str,
        check: impl Fn(Table, &IntMultiSet, &BigInt) -> bool,
    ) -> Result<usize, String> {
        let file: CacheFile =
            serde_json::from_str(text).map_err(|e| format!("unreadable cache file: {e}"))?;
        if file.format != CACHE_FORMAT {
            return Err(format!(
                "cache format {:?} is not {CACHE_FORMAT:?}",
                file.format
            ));
        }
        let parse = |entries: &BTreeMap<String, String>| {
            entries
                .iter()
                .map(|(k, v)| {
                    let key = IntMultiSet::parse(k)?;
                    if key.to_string() != *k || !key.all_positive() {
                        return Err(format!("non-canonical cache key {k:?}"));
                    }
                    let value: BigInt = v.parse().map_err(|_| format!("bad cache value {v:?}"))?;
                    Ok((key, value))
                })
                .collect::<Result<Vec<_>, String>>()
        };
        let lambda = parse(&file.lambda)?;
        let n = parse(&file.n)?;
        for (table, entries) in [(Table::Lambda, &lambda), (Table::N, &n)] {
            if let Some((k, _)) = entries.iter().find(|(k, v)| !check(table, k, v)) {
                return Err(format!("cache entry {table:?}{k} has a wrong value"));
            }
        }
        let count = lambda.len() + n.len();
        self.lambda.write().unwrap().extend(lambda);
        self.n.write().unwrap().extend(n);
        Ok(count)
    }
}

/// The process-wide cache used by [`crate::kappa`].
pub fn global() -> &'static CoefficientCache {
    static CACHE: OnceLock<CoefficientCache> = OnceLock::new();
    CACHE.get_or_init(|| CoefficientCache::new(DEFAULT_CAPACITY))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_json() {
        let cache = CoefficientCache::new(16);
        let key = IntMultiSet::from([1, 1]);
        assert_eq!(cache.get_or_compute(Table::Lambda, &key, || BigInt::from(5)), BigInt::from(5));
        assert_eq!(cache.get_or_compute(Table::Lambda, &key, || unreachable!()), BigInt::from(5));
        assert_eq!(cache.stats().hits, 1);
        let text = cache.export_json();
        let other = CoefficientCache::new(16);
        assert_eq!(other.import_json(&text), Ok(1));
        assert_eq!(other.get_or_compute(Table::Lambda, &key, || unreachable!()), BigInt::from(5));
    }

    #[test]
    fn rejects_corrupt_files() {
        let cache = CoefficientCache::new(16);
        assert!(cache.import_json("not json").is_err());
        assert!(cache
            .import_json(r#"{"format":"other/9","lambda":{},"n":{}}"#)
            .is_err());
        let bad = format!(r#"{{"format":"{CACHE_FORMAT}","lambda":{{"[1,1]":"5","[2,1]":"9"}},"n":{{}}}}"#);
        assert!(cache.import_json(&bad).is_err());
        let bad = format!(r#"{{"format":"{CACHE_FORMAT}","lambda":{{"[1,1]":"five"}},"n":{{}}}}"#);
        assert!(cache.import_json(&bad).is_err());
        assert_eq!(cache.stats().lambda_entries, 0);
    }

    #[test]
    fn capacity_bounds_inserts() {
        let cache = CoefficientCache::new(1);
        cache.get_or_compute(Table::N, &IntMultiSet::from([1]), || BigInt::from(1));
        cache.get_or_compute(Table::N, &IntMultiSet::from([2]), || BigInt::from(1));
        assert_eq!(cache.stats().n_entries, 1);
    }

    #[test]
    fn disabled_cache_always_computes() {
        let cache = CoefficientCache::new(4);
        cache.set_enabled(false);
        let key = IntMultiSet::from([3]);
        cache.get_or_compute(Table::N, &key, || BigInt::from(1));
        assert_eq!(cache.get_or_compute(Table::N, &key, || BigInt::from(7)), BigInt::from(7));
        assert_eq!(cache.stats().n_entries, 0);
    }
}
