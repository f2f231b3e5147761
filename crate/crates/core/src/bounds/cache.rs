use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::counts::{f_counts, FCounts};
use crate::graph::RuleKind;
use crate::permanent::MAX_ORDER;
use crate::{BigCount, Error, Result};

type Key = (RuleKind, u64, u64);

/// Memo of exact `f(d, t)` counts, optionally backed by an append-only file.
///
/// Each line reads `rule d t count_with count_without`. Loading recomputes a
/// fixed 1% sample (at least one line) and refuses the file on any mismatch.
#[derive(Debug, Default)]
pub struct FCache {
    entries: Mutex<HashMap<Key, (BigCount, BigCount)>>,
    sink: Mutex<Option<(PathBuf, File)>>,
}

impl FCache {
    /// In-memory cache.
    pub fn new() -> Self {
        Self::default()
    }

    /// Opens (or creates) a cache file and validates a sample of it.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut entries = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for (lineno, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let (key, val) = parse_line(&line)
                    .ok_or_else(|| Error::Cache(format!("{}:{}: malformed record", path.display(), lineno + 1)))?;
                entries.insert(key, val);
            }
        }
        verify_sample(&entries)?;
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Self {
            entries: Mutex::new(entries),
            sink: Mutex::new(Some((path, file))),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, kind: RuleKind, d: u64, t: u64) -> Option<(BigCount, BigCount)> {
        self.entries.lock().unwrap().get(&(kind, d, t)).cloned()
    }

    /// Records a value; new keys are appended to the backing file.
    pub fn insert(&self, kind: RuleKind, d: u64, t: u64, with: BigCount, without: BigCount) -> Result<()> {
        let fresh = {
            let mut map = self.entries.lock().unwrap();
            match map.get(&(kind, d, t)) {
                Some(old) if old != &(with.clone(), without.clone()) => {
                    return Err(Error::Cache(format!("conflicting values for ({kind}, {d}, {t})")));
                }
                Some(_) => false,
                None => {
                    map.insert((kind, d, t), (with.clone(), without.clone()));
                    true
                }
            }
        };
        if fresh {
            if let Some((_, file)) = self.sink.lock().unwrap().as_mut() {
                writeln!(file, "{kind} {d} {t} {with} {without}")?;
            }
        }
        Ok(())
    }

    /// Cached counts for `(d, t)`, computing and recording them on a miss.
    /// `None` when the component of `v_d` exceeds `cap` vertices.
    pub fn f_counts(&self, kind: RuleKind, d: u64, t: u64, cap: usize) -> Result<Option<FCounts>> {
        if let Some((with, without)) = self.get(kind, d, t) {
            // size is not stored; callers that need it track it themselves
            return Ok(Some(FCounts {
                component_size: 0,
                with,
                without,
            }));
        }
        let Some(c) = f_counts(kind, d, t, cap)? else {
            return Ok(None);
        };
        self.insert(kind, d, t, c.with.clone(), c.without.clone())?;
        Ok(Some(c))
    }

    pub fn path(&self) -> Option<PathBuf> {
        self.sink.lock().unwrap().as_ref().map(|(p, _)| p.clone())
    }

    pub fn flush(&self) -> Result<()> {
        if let Some((_, file)) = self.sink.lock().unwrap().as_mut() {
            file.flush()?;
        }
        Ok(())
    }
}

fn parse_line(line: &str) -> Option<(Key, (BigCount, BigCount))> {
    let mut it = line.split_whitespace();
    let kind: RuleKind = it.next()?.parse().ok()?;
    let d = it.next()?.parse().ok()?;
    let t = it.next()?.parse().ok()?;
    let with = it.next()?.parse().ok()?;
    let without = it.next()?.parse().ok()?;
    if it.next().is_some() {
        return None;
    }
    Some(((kind, d, t), (with, without)))
}

fn verify_sample(entries: &HashMap<Key, (BigCount, BigCount)>) -> Result<()> {
    if entries.is_empty() {
        return Ok(());
    }
    let mut keys: Vec<&Key> = entries.keys().collect();
    keys.sort_unstable();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let n = keys.len().div_ceil(100);
    for key in keys.choose_multiple(&mut rng, n) {
        let &(kind, d, t) = *key;
        let fresh = f_counts(kind, d, t, MAX_ORDER)?
            .ok_or_else(|| Error::Cache(format!("({kind}, {d}, {t}) is too large to verify")))?;
        if (fresh.with, fresh.without) != entries[key] {
            return Err(Error::Cache(format!("stale record for ({kind}, {d}, {t})")));
        }
    }
    Ok(())
}
