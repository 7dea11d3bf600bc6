use std::num::NonZeroUsize;

use lru::LruCache;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheStats {
    pub accesses: u64,
    pub hits: u64,
    pub misses: u64,
    pub writebacks: u64,
}

/// Result of one cache access. A miss has already allocated the line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CacheOutcome {
    pub hit: bool,
    /// Line address pushed out by the allocation, if it was dirty.
    pub dirty_victim: Option<u64>,
}

/// LRU, write-back, write-allocate cache of fixed-size lines. Tracks tags and
/// dirty bits only.
#[derive(Debug)]
pub struct MetadataCache {
    line: u64,
    lines: LruCache<u64, bool>,
    stats: CacheStats,
}

impl MetadataCache {
    pub fn new(capacity_bytes: u64, line_bytes: u64) -> Result<Self> {
        if line_bytes == 0 || capacity_bytes < line_bytes || !capacity_bytes.is_multiple_of(line_bytes) {
            return Err(Error::invalid(format!(
                "cache of {capacity_bytes} B cannot hold whole {line_bytes} B lines"
            )));
        }
        let n = NonZeroUsize::new((capacity_bytes / line_bytes) as usize).expect("checked above");
        Ok(MetadataCache {
            line: line_bytes,
            lines: LruCache::new(n),
            stats: CacheStats::default(),
        })
    }

    pub fn line_bytes(&self) -> u64 {
        self.line
    }

    pub fn capacity_lines(&self) -> usize {
        self.lines.cap().get()
    }

    pub fn occupancy(&self) -> usize {
        self.lines.len()
    }

    pub fn stats(&self) -> CacheStats {
        self.stats
    }

    pub fn contains(&self, addr: u64) -> bool {
        self.lines.contains(&(addr - addr % self.line))
    }

    /// Touches the line holding `addr`; `write` marks it dirty.
    pub fn access(&mut self, addr: u64, write: bool) -> CacheOutcome {
        let tag = addr - addr % self.line;
        self.stats.accesses += 1;
        if let Some(dirty) = self.lines.get_mut(&tag) {
            *dirty |= write;
            self.stats.hits += 1;
            return CacheOutcome {
                hit: true,
                dirty_victim: None,
            };
        }
        self.stats.misses += 1;
        let dirty_victim = match self.lines.push(tag, write) {
            Some((victim, true)) => {
                self.stats.writebacks += 1;
                Some(victim)
            }
            _ => None,
        };
        CacheOutcome {
            hit: false,
            dirty_victim,
        }
    }

    /// Cleans every dirty line and returns their addresses in ascending order.
    pub fn flush(&mut self) -> Vec<u64> {
        let mut dirty: Vec<u64> = self.lines.iter().filter(|(_, d)| **d).map(|(a, _)| *a).collect();
        dirty.sort_unstable();
        for a in &dirty {
            if let Some(d) = self.lines.peek_mut(a) {
                *d = false;
            }
        }
        self.stats.writebacks += dirty.len() as u64;
        dirty
    }
}
