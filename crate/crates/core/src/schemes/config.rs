use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const GIB: u64 = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Baseline,
    SgxLike,
    MgxLike,
    Proposed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerMacStorage {
    OnChip,
    OffChip,
}

/// How throughput is scaled: replicated engines, or one engine plus XOR lanes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CryptoEngine {
    None,
    TAes { engines: u32 },
    BAes { lanes: u32 },
}

impl CryptoEngine {
    /// Parallel pads produced per engine latency.
    pub fn width(&self) -> u32 {
        match *self {
            CryptoEngine::None => 0,
            CryptoEngine::TAes { engines } => engines,
            CryptoEngine::BAes { lanes } => lanes,
        }
    }
}

/// How the 16-byte sub-blocks of a protected block get their pads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PadMode {
    /// Plaintext in memory.
    None,
    /// One pad per block.
    SharedPad,
    /// A separate counter per sub-block.
    SubBlockCounter,
    /// One shared pad per block diversified by round-key combinations.
    CombinationKeys,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub name: String,
    pub kind: SchemeKind,
    pub protection_granularity: u64,
    pub mac_bytes: u64,
    pub vn_bits: u32,
    pub vn_cache_bytes: u64,
    pub mac_cache_bytes: u64,
    pub cache_line_bytes: u64,
    pub tree_arity: u64,
    pub protected_bytes: u64,
    pub layer_mac_storage: LayerMacStorage,
    pub crypto: CryptoEngine,
    pub pad_mode: PadMode,
    /// Route MAC lines through the MAC cache instead of one 8 B access per block.
    #[serde(default)]
    pub cache_macs: bool,
    /// Whether MACs cover PA, VN, layer and block index, or data only.
    pub bind_position: bool,
}

impl SchemeConfig {
    pub const PRESETS: [&'static str; 6] = ["baseline", "sgx64", "sgx512", "mgx64", "mgx512", "ours"];

    fn base(name: &str, kind: SchemeKind, granularity: u64) -> SchemeConfig {
        SchemeConfig {
            name: name.to_string(),
            kind,
            protection_granularity: granularity,
            mac_bytes: 8,
            vn_bits: 56,
            vn_cache_bytes: 16 * 1024,
            mac_cache_bytes: 8 * 1024,
            cache_line_bytes: 64,
            tree_arity: 8,
            protected_bytes: 16 * GIB,
            layer_mac_storage: LayerMacStorage::OffChip,
            crypto: CryptoEngine::TAes { engines: 16 },
            pad_mode: PadMode::SubBlockCounter,
            cache_macs: false,
            bind_position: true,
        }
    }

    pub fn baseline() -> Self {
        SchemeConfig {
            crypto: CryptoEngine::None,
            pad_mode: PadMode::None,
            bind_position: false,
            ..Self::base("baseline", SchemeKind::Baseline, 64)
        }
    }

    pub fn sgx(granularity: u64) -> Self {
        Self::base(&format!("sgx{granularity}"), SchemeKind::SgxLike, granularity)
    }

    pub fn mgx(granularity: u64) -> Self {
        Self::base(&format!("mgx{granularity}"), SchemeKind::MgxLike, granularity)
    }

    pub fn proposed() -> Self {
        SchemeConfig {
            crypto: CryptoEngine::BAes { lanes: 16 },
            pad_mode: PadMode::CombinationKeys,
            ..Self::base("ours", SchemeKind::Proposed, 64)
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        let cfg = match name {
            "baseline" => Self::baseline(),
            "sgx64" => Self::sgx(64),
            "sgx512" => Self::sgx(512),
            "mgx64" => Self::mgx(64),
            "mgx512" => Self::mgx(512),
            "ours" | "proposed" => Self::proposed(),
            _ => {
                return Err(Error::invalid(format!(
                    "unknown scheme `{name}`; valid presets: {}",
                    Self::PRESETS.join(", ")
                )))
            }
        };
        Ok(cfg)
    }

    /// Applies a JSON object of field overrides on top of this config.
    pub fn with_overrides(&self, overrides: &serde_json::Value) -> Result<Self> {
        let patch = overrides
            .as_object()
            .ok_or_else(|| Error::invalid("scheme override must be a JSON object"))?;
        let mut value = serde_json::to_value(self)?;
        let fields = value.as_object_mut().expect("config serializes to an object");
        for (k, v) in patch {
            if !fields.contains_key(k) {
                return Err(Error::invalid(format!("unknown scheme field `{k}`")));
            }
            fields.insert(k.clone(), v.clone());
        }
        let cfg: SchemeConfig = serde_json::from_value(value)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let g = self.protection_granularity;
        if g == 0 || !g.is_multiple_of(16) {
            return Err(Error::invalid(format!("protection granularity {g} is not a multiple of 16")));
        }
        if !g.is_power_of_two() {
            return Err(Error::invalid(format!("protection granularity {g} must be a power of two")));
        }
        let line = self.cache_line_bytes;
        if line == 0 || !line.is_power_of_two() || !line.is_multiple_of(self.mac_bytes.max(1)) {
            return Err(Error::invalid(format!("cache line {line} B is not a power of two holding whole MACs")));
        }
        if self.mac_bytes == 0 || self.mac_bytes > line {
            return Err(Error::invalid(format!("mac_bytes {} out of range", self.mac_bytes)));
        }
        for (what, bytes) in [("vn", self.vn_cache_bytes), ("mac", self.mac_cache_bytes)] {
            if bytes == 0 || bytes % line != 0 {
                return Err(Error::invalid(format!("{what} cache of {bytes} B is not whole {line} B lines")));
            }
        }
        if self.tree_arity < 2 {
            return Err(Error::invalid("tree arity must be at least 2"));
        }
        if self.vn_bits == 0 || self.vn_bits > 64 {
            return Err(Error::invalid(format!("vn_bits {} out of range", self.vn_bits)));
        }
        if self.protected_bytes < g || !self.protected_bytes.is_multiple_of(g) {
            return Err(Error::invalid("protected region must be whole protection blocks"));
        }
        if self.kind != SchemeKind::Baseline && self.crypto.width() == 0 {
            return Err(Error::invalid(format!("scheme `{}` needs a crypto engine", self.name)));
        }
        Ok(())
    }

    pub fn protected_blocks(&self) -> u64 {
        self.protected_bytes / self.protection_granularity
    }
}

impl FromStr for SchemeConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::preset(s)
    }
}

impl fmt::Display for SchemeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}
