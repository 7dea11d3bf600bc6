//! Off-chip metadata layout and counter-tree geometry.
//!
//! ```text
//! [0, P)                 protected data
//! [P, P + 8B)            per-block MACs, 8 per 64 B line
//! [.., + 8B)             per-block VNs, 8 per 64 B line  (tree level 0)
//! [.., ...)              tree levels 1..root-1, 64 B nodes
//! ```
//!
//! Each tree node covers `arity` nodes of the level below. The root level has
//! a single node that lives on chip.

use serde::{Deserialize, Serialize};

use super::config::SchemeConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrityTree {
    pub protected_bytes: u64,
    pub granularity: u64,
    pub arity: u64,
    pub node_bytes: u64,
    pub slot_bytes: u64,
    /// Nodes per level; `[0]` is the VN lines, the last entry is the root (1).
    pub level_nodes: Vec<u64>,
    /// Base address per level; the root level has none.
    level_base: Vec<u64>,
    pub mac_base: u64,
    pub layer_mac_base: u64,
}

impl IntegrityTree {
    pub fn new(cfg: &SchemeConfig) -> Result<Self> {
        cfg.validate()?;
        let blocks = cfg.protected_blocks();
        let node = cfg.cache_line_bytes;
        let slot = cfg.mac_bytes;
        let per_line = node / slot;
        let mut level_nodes = vec![blocks.div_ceil(per_line)];
        while *level_nodes.last().expect("non-empty") > 1 {
            let next = level_nodes.last().expect("non-empty").div_ceil(cfg.tree_arity);
            level_nodes.push(next);
        }
        if level_nodes.len() < 2 {
            // a single VN line is its own root; keep one off-chip level anyway
            level_nodes.push(1);
        }
        let mac_base = cfg.protected_bytes;
        let mut cursor = mac_base + blocks * slot;
        cursor = cursor.div_ceil(node) * node;
        let mut level_base = Vec::with_capacity(level_nodes.len() - 1);
        for n in &level_nodes[..level_nodes.len() - 1] {
            level_base.push(cursor);
            cursor += n * node;
        }
        Ok(IntegrityTree {
            protected_bytes: cfg.protected_bytes,
            granularity: cfg.protection_granularity,
            arity: cfg.tree_arity,
            node_bytes: node,
            slot_bytes: slot,
            level_nodes,
            level_base,
            mac_base,
            layer_mac_base: cursor,
        })
    }

    /// Levels including VN lines and the on-chip root.
    pub fn levels(&self) -> usize {
        self.level_nodes.len()
    }

    pub fn root_level(&self) -> usize {
        self.levels() - 1
    }

    /// `ceil(log_arity(protected blocks))`.
    pub fn closed_form_levels(blocks: u64, arity: u64) -> usize {
        let mut levels = 0;
        let mut reach = 1u128;
        while reach < u128::from(blocks) {
            reach *= u128::from(arity);
            levels += 1;
        }
        levels
    }

    pub fn block_of(&self, addr: u64) -> Result<u64> {
        if addr >= self.protected_bytes {
            return Err(Error::invalid(format!(
                "address {addr:#x} outside the {} B protected region",
                self.protected_bytes
            )));
        }
        Ok(addr / self.granularity)
    }

    pub fn mac_addr(&self, block: u64) -> u64 {
        self.mac_base + block * self.slot_bytes
    }

    pub fn vn_addr(&self, block: u64) -> u64 {
        self.level_base[0] + block * self.slot_bytes
    }

    /// Off-chip address of a node, `None` for the root.
    pub fn node_addr(&self, level: usize, index: u64) -> Option<u64> {
        self.level_base.get(level).map(|b| b + index * self.node_bytes)
    }

    /// Inverse of [`node_addr`](Self::node_addr).
    pub fn node_at(&self, addr: u64) -> Option<(usize, u64)> {
        self.level_base
            .iter()
            .enumerate()
            .rev()
            .find(|(l, b)| addr >= **b && addr < **b + self.level_nodes[*l] * self.node_bytes)
            .map(|(l, b)| (l, (addr - b) / self.node_bytes))
    }

    /// Parent of a node, `None` when the parent is the on-chip root.
    pub fn parent(&self, level: usize, index: u64) -> Option<(usize, u64)> {
        let up = level + 1;
        (up < self.root_level()).then_some((up, index / self.arity))
    }

    pub fn layer_mac_addr(&self, layer: u64) -> u64 {
        self.layer_mac_base + layer * self.slot_bytes
    }
}
