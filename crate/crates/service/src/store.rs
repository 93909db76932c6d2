// SPDX-License-Identifier: MIT OR Apache-2.0

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use patred_core::{MatchResult, Pattern, SearchRequest, TimeSeries};
use serde::{Deserialize, Serialize};

const SNAPSHOT_FILE: &str = "store.json";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StoredResult {
    pub pattern_id: String,
    pub dataset_id: String,
    pub request: SearchRequest,
    pub matches: Vec<MatchResult>,
}

#[derive(Default, Serialize, Deserialize)]
struct Snapshot {
    next_dataset: u64,
    next_pattern: u64,
    datasets: BTreeMap<String, TimeSeries>,
    patterns: BTreeMap<String, Pattern>,
    results: BTreeMap<String, StoredResult>,
}

#[derive(Default)]
struct Tables {
    datasets: BTreeMap<String, TimeSeries>,
    patterns: BTreeMap<String, Pattern>,
    results: BTreeMap<String, StoredResult>,
}

/// Datasets, patterns and search results, optionally mirrored to a directory.
pub struct Store {
    next_dataset: AtomicU64,
    next_pattern: AtomicU64,
    tables: RwLock<Tables>,
    dir: Option<PathBuf>,
}

impl Default for Store {
    fn default() -> Self {
        Self::in_memory()
    }
}

impl Store {
    pub fn in_memory() -> Self {
        Self {
            next_dataset: AtomicU64::new(1),
            next_pattern: AtomicU64::new(1),
            tables: RwLock::new(Tables::default()),
            dir: None,
        }
    }

    /// Opens (or creates) a store persisted under `dir`.
    pub fn open(dir: impl AsRef<Path>) -> std::io::Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        std::fs::create_dir_all(&dir)?;
        let path = dir.join(SNAPSHOT_FILE);
        let snap: Snapshot = if path.exists() {
            serde_json::from_slice(&std::fs::read(&path)?)
                .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?
        } else {
            Snapshot::default()
        };
        Ok(Self {
            next_dataset: AtomicU64::new(snap.next_dataset.max(1)),
            next_pattern: AtomicU64::new(snap.next_pattern.max(1)),
            tables: RwLock::new(Tables {
                datasets: snap.datasets,
                patterns: snap.patterns,
                results: snap.results,
            }),
            dir: Some(dir),
        })
    }

    fn persist(&self, tables: &Tables) -> std::io::Result<()> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        let snap = Snapshot {
            next_dataset: self.next_dataset.load(Ordering::SeqCst),
            next_pattern: self.next_pattern.load(Ordering::SeqCst),
            datasets: tables.datasets.clone(),
            patterns: tables.patterns.clone(),
            results: tables.results.clone(),
        };
        let tmp = dir.join(format!("{SNAPSHOT_FILE}.tmp"));
        std::fs::write(
            &tmp,
            serde_json::to_vec(&snap).map_err(std::io::Error::other)?,
        )?;
        std::fs::rename(tmp, dir.join(SNAPSHOT_FILE))
    }

    pub fn insert_dataset(&self, series: TimeSeries) -> std::io::Result<String> {
        let id = format!("ds-{}", self.next_dataset.fetch_add(1, Ordering::SeqCst));
        let mut t = self.tables.write().expect("store lock poisoned");
        t.datasets.insert(id.clone(), series);
        self.persist(&t)?;
        Ok(id)
    }

    pub fn insert_pattern(&self, pattern: Pattern) -> std::io::Result<String> {
        let id = format!("pat-{}", self.next_pattern.fetch_add(1, Ordering::SeqCst));
        let mut t = self.tables.write().expect("store lock poisoned");
        t.patterns.insert(id.clone(), pattern);
        self.persist(&t)?;
        Ok(id)
    }

    pub fn insert_result(&self, id: &str, result: StoredResult) -> std::io::Result<()> {
        let mut t = self.tables.write().expect("store lock poisoned");
        t.results.insert(id.to_owned(), result);
        self.persist(&t)
    }

    pub fn dataset(&self, id: &str) -> Option<TimeSeries> {
        self.tables
            .read()
            .expect("store lock poisoned")
            .datasets
            .get(id)
            .cloned()
    }

    pub fn pattern(&self, id: &str) -> Option<Pattern> {
        self.tables
            .read()
            .expect("store lock poisoned")
            .patterns
            .get(id)
            .cloned()
    }

    pub fn result(&self, id: &str) -> Option<StoredResult> {
        self.tables
            .read()
            .expect("store lock poisoned")
            .results
            .get(id)
            .cloned()
    }
}
