use serde::{Deserialize, Serialize};

use super::cache::{CacheStats, MetadataCache};
use super::config::{LayerMacStorage, SchemeConfig, SchemeKind};
use super::tree::IntegrityTree;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessKind {
    Read,
    Write,
}

/// A data access as issued by the accelerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemAccess {
    pub address: u64,
    pub bytes: u64,
    pub kind: AccessKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetaKind {
    Mac,
    Vn,
    Tree,
    LayerMac,
}

/// An extra DRAM access caused by the protection scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetadataAccess {
    pub address: u64,
    pub bytes: u64,
    pub kind: AccessKind,
    pub meta: MetaKind,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrafficTotals {
    pub data_read_bytes: u64,
    pub data_write_bytes: u64,
    /// Protection-block pieces after splitting.
    pub block_accesses: u64,
    pub mac_bytes: u64,
    pub vn_bytes: u64,
    pub tree_bytes: u64,
    pub layer_mac_bytes: u64,
    pub metadata_accesses: u64,
    pub mac_cache: CacheStats,
    pub vn_cache: CacheStats,
}

impl TrafficTotals {
    pub fn data_bytes(&self) -> u64 {
        self.data_read_bytes + self.data_write_bytes
    }

    pub fn metadata_bytes(&self) -> u64 {
        self.mac_bytes + self.vn_bytes + self.tree_bytes + self.layer_mac_bytes
    }

    pub fn total_bytes(&self) -> u64 {
        self.data_bytes() + self.metadata_bytes()
    }

    /// `(data + metadata) / data`; 1.0 for an empty trace.
    pub fn factor(&self) -> f64 {
        if self.data_bytes() == 0 {
            1.0
        } else {
            self.total_bytes() as f64 / self.data_bytes() as f64
        }
    }

    fn record(&mut self, m: &MetadataAccess) {
        self.metadata_accesses += 1;
        let slot = match m.meta {
            MetaKind::Mac => &mut self.mac_bytes,
            MetaKind::Vn => &mut self.vn_bytes,
            MetaKind::Tree => &mut self.tree_bytes,
            MetaKind::LayerMac => &mut self.layer_mac_bytes,
        };
        *slot += m.bytes;
    }
}

/// Splits an access at protection-block boundaries.
pub fn split_at_blocks(access: &MemAccess, granularity: u64) -> Vec<MemAccess> {
    let mut out = Vec::new();
    let end = access.address + access.bytes;
    let mut at = access.address;
    while at < end {
        let next = ((at / granularity) + 1) * granularity;
        let stop = next.min(end);
        out.push(MemAccess {
            address: at,
            bytes: stop - at,
            kind: access.kind,
        });
        at = stop;
    }
    out
}

/// Metadata state machine for one simulation: caches, tree, and layer bookkeeping.
#[derive(Debug)]
pub struct TrafficEngine {
    cfg: SchemeConfig,
    tree: IntegrityTree,
    mac_cache: Option<MetadataCache>,
    vn_cache: Option<MetadataCache>,
    totals: TrafficTotals,
    layer: u64,
    layer_touched: bool,
}

impl TrafficEngine {
    pub fn new(cfg: &SchemeConfig) -> Result<Self> {
        let tree = IntegrityTree::new(cfg)?;
        let vn_cache = match cfg.kind {
            SchemeKind::SgxLike => Some(MetadataCache::new(cfg.vn_cache_bytes, cfg.cache_line_bytes)?),
            _ => None,
        };
        let mac_cache = match cfg.kind {
            SchemeKind::SgxLike | SchemeKind::MgxLike if cfg.cache_macs => {
                Some(MetadataCache::new(cfg.mac_cache_bytes, cfg.cache_line_bytes)?)
            }
            _ => None,
        };
        Ok(TrafficEngine {
            cfg: cfg.clone(),
            tree,
            mac_cache,
            vn_cache,
            totals: TrafficTotals::default(),
            layer: 0,
            layer_touched: false,
        })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    pub fn tree(&self) -> &IntegrityTree {
        &self.tree
    }

    pub fn totals(&self) -> TrafficTotals {
        let mut t = self.totals;
        t.mac_cache = self.mac_cache.as_ref().map(|c| c.stats()).unwrap_or_default();
        t.vn_cache = self.vn_cache.as_ref().map(|c| c.stats()).unwrap_or_default();
        t
    }

    /// Splits `access` into protection blocks and returns the metadata it causes.
    pub fn access(&mut self, access: &MemAccess) -> Result<Vec<MetadataAccess>> {
        if access.bytes == 0 {
            return Ok(Vec::new());
        }
        let end = access.address.checked_add(access.bytes);
        if end.is_none_or(|e| e > self.cfg.protected_bytes) {
            return Err(Error::invalid(format!(
                "access {:#x}+{} leaves the {} B protected region",
                access.address, access.bytes, self.cfg.protected_bytes
            )));
        }
        let mut out = Vec::new();
        for piece in split_at_blocks(access, self.cfg.protection_granularity) {
            out.extend(self.metadata_accesses(&piece)?);
        }
        Ok(out)
    }

    /// Metadata for one access that lies inside a single protection block.
    pub fn metadata_accesses(&mut self, piece: &MemAccess) -> Result<Vec<MetadataAccess>> {
        let g = self.cfg.protection_granularity;
        if piece.bytes == 0 || piece.address / g != (piece.address + piece.bytes - 1) / g {
            return Err(Error::Internal(format!(
                "access {:#x}+{} straddles a {g} B protection block",
                piece.address, piece.bytes
            )));
        }
        let block = self.tree.block_of(piece.address)?;
        match piece.kind {
            AccessKind::Read => self.totals.data_read_bytes += piece.bytes,
            AccessKind::Write => self.totals.data_write_bytes += piece.bytes,
        }
        self.totals.block_accesses += 1;
        self.layer_touched = true;
        let mut out = Vec::new();
        match self.cfg.kind {
            SchemeKind::Baseline | SchemeKind::Proposed => {}
            SchemeKind::MgxLike => self.touch_mac(block, piece.kind, &mut out),
            SchemeKind::SgxLike => {
                self.touch_mac(block, piece.kind, &mut out);
                self.touch_vn(block, piece.kind == AccessKind::Write, &mut out);
            }
        }
        for m in &out {
            self.totals.record(m);
        }
        Ok(out)
    }

    fn line_access(&self, address: u64, kind: AccessKind, meta: MetaKind) -> MetadataAccess {
        MetadataAccess {
            address,
            bytes: self.cfg.cache_line_bytes,
            kind,
            meta,
        }
    }

    fn node_meta(&self, addr: u64) -> MetaKind {
        match self.tree.node_at(addr) {
            Some((0, _)) => MetaKind::Vn,
            _ => MetaKind::Tree,
        }
    }

    /// One MAC per block piece, or a MAC-line lookup when MACs are cached.
    fn touch_mac(&mut self, block: u64, kind: AccessKind, out: &mut Vec<MetadataAccess>) {
        let addr = self.tree.mac_addr(block);
        let Some(cache) = self.mac_cache.as_mut() else {
            out.push(MetadataAccess {
                address: addr,
                bytes: self.cfg.mac_bytes,
                kind,
                meta: MetaKind::Mac,
            });
            return;
        };
        let outcome = cache.access(addr, kind == AccessKind::Write);
        let line = addr - addr % self.cfg.cache_line_bytes;
        if let Some(victim) = outcome.dirty_victim {
            out.push(self.line_access(victim, AccessKind::Write, MetaKind::Mac));
        }
        if !outcome.hit {
            out.push(self.line_access(line, AccessKind::Read, MetaKind::Mac));
        }
    }

    /// Counter lookup: fetch the VN line and verify upward until a cached
    /// ancestor or the root. Dirty victims update their parent.
    fn touch_vn(&mut self, block: u64, write: bool, out: &mut Vec<MetadataAccess>) {
        let per_line = self.cfg.cache_line_bytes / self.cfg.mac_bytes;
        let mut work = vec![(0usize, block / per_line, write)];
        while let Some((level, index, dirty)) = work.pop() {
            let addr = self.tree.node_addr(level, index).expect("root is never fetched");
            let cache = self.vn_cache.as_mut().expect("sgx engines own a VN cache");
            let outcome = cache.access(addr, dirty);
            if let Some(victim) = outcome.dirty_victim {
                out.push(self.line_access(victim, AccessKind::Write, self.node_meta(victim)));
                let (vl, vi) = self.tree.node_at(victim).expect("cached lines are tree nodes");
                if let Some((pl, pi)) = self.tree.parent(vl, vi) {
                    work.push((pl, pi, true));
                }
            }
            if !outcome.hit {
                out.push(self.line_access(addr, AccessKind::Read, self.node_meta(addr)));
                if let Some((pl, pi)) = self.tree.parent(level, index) {
                    work.push((pl, pi, false));
                }
            }
        }
    }

    /// Closes the current layer.
    pub fn end_layer(&mut self) -> Vec<MetadataAccess> {
        let mut out = Vec::new();
        if self.cfg.kind == SchemeKind::Proposed
            && self.cfg.layer_mac_storage == LayerMacStorage::OffChip
            && self.layer_touched
        {
            out.push(MetadataAccess {
                address: self.tree.layer_mac_addr(self.layer),
                bytes: self.cfg.mac_bytes,
                kind: AccessKind::Write,
                meta: MetaKind::LayerMac,
            });
        }
        for m in &out {
            self.totals.record(m);
        }
        self.layer += 1;
        self.layer_touched = false;
        out
    }

    /// Writes back dirty metadata lines. Parents are not updated.
    pub fn finish(&mut self) -> Vec<MetadataAccess> {
        let mut out = Vec::new();
        if let Some(cache) = self.mac_cache.as_mut() {
            let dirty = cache.flush();
            out.extend(dirty.into_iter().map(|a| self.line_access(a, AccessKind::Write, MetaKind::Mac)));
        }
        if let Some(cache) = self.vn_cache.as_mut() {
            let dirty = cache.flush();
            out.extend(dirty.into_iter().map(|a| self.line_access(a, AccessKind::Write, self.node_meta(a))));
        }
        for m in &out {
            self.totals.record(m);
        }
        out
    }
}

/// Metadata traffic of a whole trace, treated as one layer.
pub fn scheme_traffic(trace: &[MemAccess], cfg: &SchemeConfig) -> Result<TrafficTotals> {
    let mut engine = TrafficEngine::new(cfg)?;
    for a in trace {
        engine.access(a)?;
    }
    engine.end_layer();
    engine.finish();
    Ok(engine.totals())
}
