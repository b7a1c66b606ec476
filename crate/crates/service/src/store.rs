//! Bookmark persistence: an append-only JSON-lines journal, compacted on open.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use insightrank_core::engine::CombinationView;
use insightrank_core::ChartSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bookmark {
    pub id: String,
    pub dataset_id: String,
    pub insight_type_id: String,
    pub combination: CombinationView,
    pub chart: ChartSpec,
    /// RFC 3339, UTC.
    pub created_at: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
enum Entry {
    Add { bookmark: Box<Bookmark> },
    Remove { id: String },
}

pub struct BookmarkStore {
    path: PathBuf,
    file: File,
    /// Keyed by id; `seq` keeps insertion order for listing.
    items: BTreeMap<String, (u64, Bookmark)>,
    seq: u64,
}

fn replay(path: &Path) -> io::Result<Vec<Bookmark>> {
    let mut live: Vec<Bookmark> = Vec::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(live),
        Err(e) => return Err(e),
    };
    let lines: Vec<String> = BufReader::new(file).lines().collect::<Result<_, _>>()?;
    let last = lines.len().saturating_sub(1);
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<Entry>(line) {
            Ok(Entry::Add { bookmark }) => {
                live.retain(|b| b.id != bookmark.id);
                live.push(*bookmark);
            }
            Ok(Entry::Remove { id }) => live.retain(|b| b.id != id),
            // a torn final write from a crash is dropped
            Err(_) if i == last => tracing::warn!("dropping truncated journal line {}", i + 1),
            Err(e) => {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("{}:{}: {e}", path.display(), i + 1),
                ))
            }
        }
    }
    Ok(live)
}

impl BookmarkStore {
    /// Replays the journal at `path`, rewrites it with only live bookmarks,
    /// and opens it for appending.
    pub fn open(path: impl Into<PathBuf>) -> io::Result<Self> {
        let path = path.into();
        let live = replay(&path)?;
        let tmp = path.with_extension("jsonl.tmp");
        {
            let mut out = File::create(&tmp)?;
            for b in &live {
                let line = serde_json::to_string(&Entry::Add {
                    bookmark: Box::new(b.clone()),
                })?;
                writeln!(out, "{line}")?;
            }
            out.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        let file = OpenOptions::new().append(true).open(&path)?;
        let mut items = BTreeMap::new();
        for (seq, b) in live.into_iter().enumerate() {
            items.insert(b.id.clone(), (seq as u64, b));
        }
        Ok(Self {
            path,
            file,
            seq: items.len() as u64,
            items,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn append(&mut self, entry: &Entry) -> io::Result<()> {
        let mut line = serde_json::to_string(entry)?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.sync_data()
    }

    pub fn add(&mut self, bookmark: Bookmark) -> io::Result<()> {
        self.append(&Entry::Add {
            bookmark: Box::new(bookmark.clone()),
        })?;
        self.items.insert(bookmark.id.clone(), (self.seq, bookmark));
        self.seq += 1;
        Ok(())
    }

    /// Returns whether the bookmark existed.
    pub fn remove(&mut self, id: &str) -> io::Result<bool> {
        if !self.items.contains_key(id) {
            return Ok(false);
        }
        self.append(&Entry::Remove { id: id.to_string() })?;
        self.items.remove(id);
        Ok(true)
    }

    /// Bookmarks in creation order, optionally for one dataset.
    pub fn list(&self, dataset_id: Option<&str>) -> Vec<Bookmark> {
        let mut v: Vec<&(u64, Bookmark)> = self
            .items
            .values()
            .filter(|(_, b)| dataset_id.is_none_or(|d| b.dataset_id == d))
            .collect();
        v.sort_by_key(|(seq, _)| *seq);
        v.into_iter().map(|(_, b)| b.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use insightrank_core::dataset::AttributeType;
    use insightrank_core::vizrec::{ChartType, InlineData};

    fn bookmark(id: &str) -> Bookmark {
        Bookmark {
            id: id.into(),
            dataset_id: "d".into(),
            insight_type_id: "skew".into(),
            combination: CombinationView {
                signature: vec![AttributeType::N],
                columns: vec!["x".into()],
            },
            chart: ChartSpec {
                chart_type: ChartType::Histogram,
                encodings: Default::default(),
                aggregate: None,
                weight: 1.0,
                inline_data: InlineData::default(),
                annotations: vec![],
                title: String::new(),
                insight_sentence: String::new(),
            },
            created_at: "2020-01-01T00:00:00Z".into(),
        }
    }

    #[test]
    fn journal_replays_and_compacts() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bookmarks.jsonl");
        {
            let mut s = BookmarkStore::open(&path).unwrap();
            s.add(bookmark("a")).unwrap();
            s.add(bookmark("b")).unwrap();
            s.add(bookmark("c")).unwrap();
            assert!(s.remove("b").unwrap());
            assert!(!s.remove("zz").unwrap());
        }
        assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 4);
        let s = BookmarkStore::open(&path).unwrap();
        let ids: Vec<String> = s.list(None).into_iter().map(|b| b.id).collect();
        assert_eq!(ids, ["a", "c"]);
        assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 2);
        assert!(s.list(Some("other")).is_empty());
    }

    #[test]
    fn torn_tail_is_dropped_but_corrupt_middle_fails() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bookmarks.jsonl");
        {
            let mut s = BookmarkStore::open(&path).unwrap();
            s.add(bookmark("a")).unwrap();
        }
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        write!(f, "{{\"op\":\"add\",\"book").unwrap();
        drop(f);
        assert_eq!(BookmarkStore::open(&path).unwrap().len(), 1);

        fs::write(&path, "garbage\n{\"op\":\"remove\",\"id\":\"a\"}\n").unwrap();
        assert!(BookmarkStore::open(&path).is_err());
    }
}
