use serde::{Deserialize, Serialize};

use super::accel::AcceleratorConfig;
use super::hw::{CryptoCost, HwCostModel};
use super::trace::{compute_cycles, relocate, synthesize_trace, DramAccess, LayerLayout};
use crate::error::{Error, Result};
use crate::schemes::{SchemeConfig, TrafficEngine, TrafficTotals};
use crate::tiling::LayerShape;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Workload {
    pub name: String,
    pub layers: Vec<LayerShape>,
}

impl Workload {
    pub fn new(name: &str, layers: Vec<LayerShape>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid(format!("workload `{name}` has no layers")));
        }
        for l in &layers {
            l.validate()?;
        }
        Ok(Workload {
            name: name.to_string(),
            layers,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerReport {
    pub name: String,
    pub compute_cycles: f64,
    pub mem_cycles: f64,
    pub crypto_cycles: f64,
    pub exec_cycles: f64,
    pub traffic: TrafficTotals,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub dram_pj_per_byte: f64,
    pub memory_energy_pj: f64,
    pub crypto_energy_pj: f64,
    pub total_energy_pj: f64,
    /// Memory-access energy over the baseline's.
    pub memory_energy_factor: f64,
    /// Memory plus crypto energy over the baseline's memory energy.
    pub total_energy_factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalized {
    pub traffic: f64,
    pub time: f64,
    pub energy: f64,
}

/// Unprotected reference run for the same workload and accelerator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineRef {
    pub exec_cycles: f64,
    pub total_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeReport {
    pub workload: String,
    pub scheme: String,
    pub accelerator: String,
    pub compute_cycles: f64,
    pub mem_cycles: f64,
    pub exec_cycles: f64,
    pub traffic: TrafficTotals,
    pub crypto: Option<CryptoCost>,
    pub baseline: BaselineRef,
    pub energy: EnergyReport,
    pub normalized: Normalized,
    pub layers: Vec<LayerReport>,
}

#[derive(Clone)]
struct Run {
    layers: Vec<LayerReport>,
    traffic: TrafficTotals,
    crypto: Option<CryptoCost>,
}

fn delta(after: &TrafficTotals, before: &TrafficTotals) -> TrafficTotals {
    let sub = |a: u64, b: u64| a - b;
    TrafficTotals {
        data_read_bytes: sub(after.data_read_bytes, before.data_read_bytes),
        data_write_bytes: sub(after.data_write_bytes, before.data_write_bytes),
        block_accesses: sub(after.block_accesses, before.block_accesses),
        mac_bytes: sub(after.mac_bytes, before.mac_bytes),
        vn_bytes: sub(after.vn_bytes, before.vn_bytes),
        tree_bytes: sub(after.tree_bytes, before.tree_bytes),
        layer_mac_bytes: sub(after.layer_mac_bytes, before.layer_mac_bytes),
        metadata_accesses: sub(after.metadata_accesses, before.metadata_accesses),
        mac_cache: after.mac_cache,
        vn_cache: after.vn_cache,
    }
}

/// Runs `segments` (name, compute cycles, trace) through one scheme.
fn run_segments(
    segments: &[(String, f64, Vec<DramAccess>)],
    acc: &AcceleratorConfig,
    scheme: &SchemeConfig,
    hw: &HwCostModel,
) -> Result<Run> {
    let mut engine = TrafficEngine::new(scheme)?;
    let crypto = hw.engine_cost(&scheme.crypto);
    let bpc = acc.bytes_per_cycle();
    let mut layers = Vec::with_capacity(segments.len());
    for (i, (name, compute, trace)) in segments.iter().enumerate() {
        let before = engine.totals();
        for a in trace {
            engine.access(&a.mem())?;
        }
        engine.end_layer();
        if i + 1 == segments.len() {
            engine.finish();
        }
        let traffic = delta(&engine.totals(), &before);
        let mem_cycles = traffic.total_bytes() as f64 / bpc;
        let crypto_cycles = crypto.map_or(0.0, |c| traffic.data_bytes() as f64 / c.throughput);
        layers.push(LayerReport {
            name: name.clone(),
            compute_cycles: *compute,
            mem_cycles,
            crypto_cycles,
            exec_cycles: compute.max(mem_cycles).max(crypto_cycles),
            traffic,
        });
    }
    Ok(Run {
        layers,
        traffic: engine.totals(),
        crypto,
    })
}

fn workload_segments(workload: &Workload, acc: &AcceleratorConfig) -> Result<Vec<(String, f64, Vec<DramAccess>)>> {
    let mut base = 0u64;
    let mut out = Vec::with_capacity(workload.layers.len());
    for layer in &workload.layers {
        let shape = layer.normalized();
        let trace = synthesize_trace(&shape, acc)?;
        out.push((shape.name.clone(), compute_cycles(&shape, acc) as f64, relocate(&trace, base, 0)));
        base += LayerLayout::new(&shape).footprint;
    }
    if base > acc.dram_bytes {
        return Err(Error::invalid(format!(
            "workload `{}` needs {base} B, DRAM holds {}",
            workload.name, acc.dram_bytes
        )));
    }
    Ok(out)
}

fn energy(traffic: &TrafficTotals, crypto: Option<&CryptoCost>, baseline_bytes: u64, pj_per_byte: f64) -> EnergyReport {
    let memory = traffic.total_bytes() as f64 * pj_per_byte;
    let crypto_pj = crypto.map_or(0.0, |c| traffic.data_bytes() as f64 / 16.0 * c.energy_pj_per_16b);
    let reference = baseline_bytes as f64 * pj_per_byte;
    let ratio = |x: f64| if reference > 0.0 { x / reference } else { 1.0 };
    EnergyReport {
        dram_pj_per_byte: pj_per_byte,
        memory_energy_pj: memory,
        crypto_energy_pj: crypto_pj,
        total_energy_pj: memory + crypto_pj,
        memory_energy_factor: ratio(memory),
        total_energy_factor: ratio(memory + crypto_pj),
    }
}

fn report(
    workload: &str,
    acc: &AcceleratorConfig,
    scheme: &SchemeConfig,
    run: Run,
    baseline: BaselineRef,
) -> SchemeReport {
    let sum = |f: fn(&LayerReport) -> f64| run.layers.iter().map(f).sum::<f64>();
    let exec = sum(|l| l.exec_cycles);
    let energy = energy(&run.traffic, run.crypto.as_ref(), baseline.total_bytes, acc.dram_pj_per_byte);
    let ratio = |x: f64, base: f64| if base > 0.0 { x / base } else { 1.0 };
    SchemeReport {
        workload: workload.to_string(),
        scheme: scheme.name.clone(),
        accelerator: acc.name.clone(),
        compute_cycles: sum(|l| l.compute_cycles),
        mem_cycles: sum(|l| l.mem_cycles),
        exec_cycles: exec,
        traffic: run.traffic,
        crypto: run.crypto,
        baseline,
        normalized: Normalized {
            traffic: ratio(run.traffic.total_bytes() as f64, baseline.total_bytes as f64),
            time: ratio(exec, baseline.exec_cycles),
            energy: energy.memory_energy_factor,
        },
        energy,
        layers: run.layers,
    }
}

fn sweep_segments(
    name: &str,
    segments: &[(String, f64, Vec<DramAccess>)],
    acc: &AcceleratorConfig,
    schemes: &[SchemeConfig],
    hw: &HwCostModel,
) -> Result<Vec<SchemeReport>> {
    acc.validate()?;
    let base_run = run_segments(segments, acc, &SchemeConfig::baseline(), hw)?;
    let baseline = BaselineRef {
        exec_cycles: base_run.layers.iter().map(|l| l.exec_cycles).sum(),
        total_bytes: base_run.traffic.total_bytes(),
    };
    schemes
        .iter()
        .map(|s| {
            s.validate()?;
            let run = if *s == SchemeConfig::baseline() {
                base_run.clone()
            } else {
                run_segments(segments, acc, s, hw)?
            };
            Ok(report(name, acc, s, run, baseline))
        })
        .collect()
}

/// Simulates `workload` under several schemes against one shared baseline run.
pub fn simulate_many(
    workload: &Workload,
    acc: &AcceleratorConfig,
    schemes: &[SchemeConfig],
    hw: &HwCostModel,
) -> Result<Vec<SchemeReport>> {
    let segments = workload_segments(workload, acc)?;
    sweep_segments(&workload.name, &segments, acc, schemes, hw)
}

pub fn simulate(
    workload: &Workload,
    acc: &AcceleratorConfig,
    scheme: &SchemeConfig,
    hw: &HwCostModel,
) -> Result<SchemeReport> {
    let mut out = simulate_many(workload, acc, std::slice::from_ref(scheme), hw)?;
    Ok(out.pop().expect("one scheme in, one report out"))
}

/// Replays an external trace as a single layer with no compute bound.
pub fn simulate_trace(
    name: &str,
    trace: &[DramAccess],
    acc: &AcceleratorConfig,
    schemes: &[SchemeConfig],
    hw: &HwCostModel,
) -> Result<Vec<SchemeReport>> {
    let segments = vec![(name.to_string(), 0.0, trace.to_vec())];
    sweep_segments(name, &segments, acc, schemes, hw)
}

/// Energy factors of a finished report under a different DRAM energy.
pub fn energy_report(report: &SchemeReport, dram_pj_per_byte: f64) -> EnergyReport {
    energy(
        &report.traffic,
        report.crypto.as_ref(),
        report.baseline.total_bytes,
        dram_pj_per_byte,
    )
}
