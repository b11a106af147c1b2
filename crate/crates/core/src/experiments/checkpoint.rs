//! Resumable exhaustive marriage totals.
//!
//! The boys' index space `0..n!^n` is processed in consecutive chunks. After
//! each chunk the running totals are written to a JSON checkpoint:
//!
//! ```json
//! {
//!   "version": 1,
//!   "kind": "marriage-total",
//!   "n": 5,
//!   "girls": [[2,3,4,5,1], ...],
//!   "total_indices": 24883200000,
//!   "chunk_size": 100000000,
//!   "completed": 300000000,
//!   "count": 300000000,
//!   "one_based": "1234567890"
//! }
//! ```
//!
//! `completed` is the exclusive end of the finished prefix; totals are
//! decimal strings. The file is replaced atomically (write then rename).
//! Resuming continues at `completed`, so an interrupted run ends with the
//! same totals as an uninterrupted one.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::marriage::{check_marriage_size, MarriageEngine, MarriageTotals};
use crate::profile::PreferenceProfile;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarriageCheckpoint {
    pub version: u32,
    pub kind: String,
    pub n: usize,
    pub girls: Vec<Vec<usize>>,
    pub total_indices: u64,
    pub chunk_size: u64,
    pub completed: u64,
    pub count: u64,
    pub one_based: String,
}

impl MarriageCheckpoint {
    fn fresh(girls: &PreferenceProfile, total_indices: u64, chunk_size: u64) -> Self {
        MarriageCheckpoint {
            version: CHECKPOINT_VERSION,
            kind: "marriage-total".into(),
            n: girls.n(),
            girls: girls.to_vecs(),
            total_indices,
            chunk_size,
            completed: 0,
            count: 0,
            one_based: "0".into(),
        }
    }

    pub fn totals(&self) -> Result<MarriageTotals> {
        Ok(MarriageTotals {
            count: self.count,
            one_based: self
                .one_based
                .parse()
                .map_err(|e| Error::Checkpoint(format!("bad total {:?}: {e}", self.one_based)))?,
        })
    }

    pub fn is_complete(&self) -> bool {
        self.completed == self.total_indices
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cp: MarriageCheckpoint = serde_json::from_str(&fs::read_to_string(path)?)?;
        if cp.version != CHECKPOINT_VERSION || cp.kind != "marriage-total" {
            return Err(Error::Checkpoint(format!(
                "unsupported checkpoint {} v{}",
                cp.kind, cp.version
            )));
        }
        Ok(cp)
    }

    pub fn store(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_string_pretty(self)? + "\n")?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

/// Run (or resume) exhaustive marriage totals for `girls`, checkpointing to
/// `path` after every chunk. Stops after `max_chunks` chunks when given.
///
/// Returns the checkpoint state at exit; `is_complete()` tells whether the
/// scan finished. Sizes above the default exhaustive bound need `long_run`.
pub fn run_marriage_totals_checkpointed(
    girls: &PreferenceProfile,
    path: &Path,
    chunk_size: u64,
    max_chunks: Option<u64>,
    long_run: bool,
) -> Result<MarriageCheckpoint> {
    check_marriage_size(girls.n(), long_run)?;
    if chunk_size == 0 {
        return Err(Error::OutOfRange("chunk size must be positive".into()));
    }
    let engine = MarriageEngine::new(girls);
    let total = engine.total_indices();
    let mut cp = if path.exists() {
        let cp = MarriageCheckpoint::load(path)?;
        if cp.girls != girls.to_vecs() || cp.total_indices != total {
            return Err(Error::Checkpoint(format!(
                "{} belongs to a different scan",
                path.display()
            )));
        }
        cp
    } else {
        MarriageCheckpoint::fresh(girls, total, chunk_size)
    };

    let mut done_chunks = 0u64;
    while !cp.is_complete() && max_chunks.is_none_or(|m| done_chunks < m) {
        let end = total.min(cp.completed.saturating_add(chunk_size));
        let part = engine.totals_parallel(cp.completed..end, 1 << 16);
        let acc = cp.totals()?.merge(&part);
        cp.completed = end;
        cp.count = acc.count;
        cp.one_based = acc.one_based.to_string();
        cp.store(path)?;
        done_chunks += 1;
    }
    Ok(cp)
}
