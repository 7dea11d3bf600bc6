use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schemes::CryptoEngine;

/// One AES core design point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AesCore {
    /// Cycles per 16-byte block.
    pub latency_cycles: u64,
    pub area_gates: f64,
    /// Energy per 16-byte block.
    pub energy_pj: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HwCostModel {
    pub pipelined: AesCore,
    pub parallel: AesCore,
    pub serial: AesCore,
    /// Area of one 128-bit XOR lane.
    pub xor_lane_area_gates: f64,
    /// Energy of one 128-bit XOR.
    pub xor_lane_energy_pj: f64,
}

impl Default for HwCostModel {
    fn default() -> Self {
        HwCostModel {
            pipelined: AesCore {
                latency_cycles: 1,
                area_gates: 78_800.0,
                energy_pj: 165.1,
            },
            parallel: AesCore {
                latency_cycles: 11,
                area_gates: 9_200.0,
                energy_pj: 194.6,
            },
            serial: AesCore {
                latency_cycles: 336,
                area_gates: 3_000.0,
                energy_pj: 768.0,
            },
            xor_lane_area_gates: 50.0,
            xor_lane_energy_pj: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CryptoStyle {
    TAes,
    BAes,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CryptoCost {
    pub style: CryptoStyle,
    pub lanes: u64,
    pub area_gates: f64,
    /// Energy per 16 B of data.
    pub energy_pj_per_16b: f64,
    /// Sustained bytes per cycle.
    pub throughput: f64,
}

impl HwCostModel {
    /// Bytes per cycle of one parallel AES core.
    pub fn lane_throughput(&self) -> f64 {
        16.0 / self.parallel.latency_cycles as f64
    }

    /// Cost of a design with exactly `lanes` pads per core latency.
    pub fn cost(&self, style: CryptoStyle, lanes: u64) -> CryptoCost {
        let n = lanes as f64;
        let (area, energy) = match style {
            CryptoStyle::TAes => (n * self.parallel.area_gates, self.parallel.energy_pj),
            // one core pad per n sub-blocks, plus one XOR per sub-block
            CryptoStyle::BAes => (
                self.parallel.area_gates + n * self.xor_lane_area_gates,
                self.parallel.energy_pj / n.max(1.0) + self.xor_lane_energy_pj,
            ),
        };
        CryptoCost {
            style,
            lanes,
            area_gates: area,
            energy_pj_per_16b: energy,
            throughput: n * self.lane_throughput(),
        }
    }

    /// Cost of a scheme's configured engine, `None` without encryption.
    pub fn engine_cost(&self, engine: &CryptoEngine) -> Option<CryptoCost> {
        match *engine {
            CryptoEngine::None => None,
            CryptoEngine::TAes { engines } => Some(self.cost(CryptoStyle::TAes, u64::from(engines))),
            CryptoEngine::BAes { lanes } => Some(self.cost(CryptoStyle::BAes, u64::from(lanes))),
        }
    }
}

/// Smallest design meeting `required_bw` bytes per cycle.
pub fn crypto_hw_cost(required_bw: f64, style: CryptoStyle, hw: &HwCostModel) -> Result<CryptoCost> {
    if !required_bw.is_finite() || required_bw <= 0.0 {
        return Err(Error::invalid(format!("required bandwidth {required_bw} must be positive")));
    }
    // tolerate rounding noise in demands that are exact multiples of a lane
    let lanes = (required_bw / hw.lane_throughput() - 1e-9).ceil() as u64;
    Ok(hw.cost(style, lanes.max(1)))
}
