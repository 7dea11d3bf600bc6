use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dataflow {
    OutputStationary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcceleratorConfig {
    pub name: String,
    pub pe_rows: u64,
    pub pe_cols: u64,
    /// Bytes per second.
    pub bandwidth: u64,
    /// Hz.
    pub frequency: u64,
    pub sram_bytes: u64,
    pub dataflow: Dataflow,
    pub element_bytes: u64,
    /// DRAM transfer unit; data requests are widened to whole bursts.
    pub burst_bytes: u64,
    pub dram_bytes: u64,
    /// DRAM access energy, read or write.
    pub dram_pj_per_byte: f64,
}

impl AcceleratorConfig {
    pub const PRESETS: [&'static str; 2] = ["server", "edge"];

    pub fn server() -> Self {
        AcceleratorConfig {
            name: "server".into(),
            pe_rows: 256,
            pe_cols: 256,
            bandwidth: 20_000_000_000,
            frequency: 1_000_000_000,
            sram_bytes: 24 << 20,
            dataflow: Dataflow::OutputStationary,
            element_bytes: 1,
            burst_bytes: 64,
            dram_bytes: 16 << 30,
            dram_pj_per_byte: 13.0,
        }
    }

    pub fn edge() -> Self {
        AcceleratorConfig {
            name: "edge".into(),
            pe_rows: 32,
            pe_cols: 32,
            bandwidth: 10_000_000_000,
            frequency: 2_750_000_000,
            sram_bytes: 480 << 10,
            ..Self::server()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "server" => Ok(Self::server()),
            "edge" => Ok(Self::edge()),
            _ => Err(Error::invalid(format!(
                "unknown accelerator `{name}`; valid presets: {}",
                Self::PRESETS.join(", ")
            ))),
        }
    }

    pub fn with_overrides(&self, overrides: &serde_json::Value) -> Result<Self> {
        let patch = overrides
            .as_object()
            .ok_or_else(|| Error::invalid("accelerator override must be a JSON object"))?;
        let mut value = serde_json::to_value(self)?;
        let fields = value.as_object_mut().expect("config serializes to an object");
        for (k, v) in patch {
            if !fields.contains_key(k) {
                return Err(Error::invalid(format!("unknown accelerator field `{k}`")));
            }
            fields.insert(k.clone(), v.clone());
        }
        let cfg: AcceleratorConfig = serde_json::from_value(value)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("pe_rows", self.pe_rows),
            ("pe_cols", self.pe_cols),
            ("bandwidth", self.bandwidth),
            ("frequency", self.frequency),
            ("sram_bytes", self.sram_bytes),
            ("burst_bytes", self.burst_bytes),
            ("dram_bytes", self.dram_bytes),
        ];
        if let Some((f, _)) = fields.iter().find(|(_, v)| *v == 0) {
            return Err(Error::invalid(format!("accelerator `{}`: {f} must be positive", self.name)));
        }
        if self.dram_pj_per_byte.is_nan() || self.dram_pj_per_byte < 0.0 {
            return Err(Error::invalid("DRAM energy must be non-negative"));
        }
        if self.element_bytes != 1 {
            return Err(Error::invalid("only 1-byte elements are modelled"));
        }
        if !self.burst_bytes.is_power_of_two() {
            return Err(Error::invalid(format!("burst of {} B is not a power of two", self.burst_bytes)));
        }
        Ok(())
    }

    /// DRAM bytes deliverable per accelerator cycle.
    pub fn bytes_per_cycle(&self) -> f64 {
        self.bandwidth as f64 / self.frequency as f64
    }
}
