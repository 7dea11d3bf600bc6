//! Trace synthesis, roofline timing, DRAM energy and crypto hardware cost.

mod accel;
mod engine;
mod hw;
mod output;
mod trace;

pub use accel::{AcceleratorConfig, Dataflow};
pub use engine::{
    energy_report, simulate, simulate_many, simulate_trace, BaselineRef, EnergyReport, LayerReport, Normalized,
    SchemeReport, Workload,
};
pub use hw::{crypto_hw_cost, AesCore, CryptoCost, CryptoStyle, HwCostModel};
pub use output::{plot_csv, reports_json, reports_text, Metric};
pub use trace::{
    compute_cycles, fold_count, format_trace, ingest_trace, output_tile, relocate, synthesize_trace, DramAccess,
    LayerLayout, Stream, TENSOR_ALIGN, TRACE_HEADER,
};
