//! Memory-protection scheme models: configuration presets, metadata caches,
//! the counter tree, per-access metadata traffic, and security verdicts.

mod cache;
mod config;
mod security;
mod traffic;
mod tree;

pub use cache::{CacheOutcome, CacheStats, MetadataCache};
pub use config::{CryptoEngine, LayerMacStorage, PadMode, SchemeConfig, SchemeKind, GIB};
pub use security::{check_adversary, verify_scheme_security, Adversary, SecurityVerdict};
pub use traffic::{
    scheme_traffic, split_at_blocks, AccessKind, MemAccess, MetaKind, MetadataAccess, TrafficEngine, TrafficTotals,
};
pub use tree::IntegrityTree;
