use std::path::PathBuf;

use anyhow::{Context, Result};
use secacc_core::sim::{format_trace, relocate, synthesize_trace, AcceleratorConfig, LayerLayout};

use crate::io::{load_workload, write_atomic};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Topology CSV path or built-in workload name.
    topology: String,
    #[arg(long, default_value = "server")]
    preset: String,
    /// Only this layer, at layer-local addresses.
    #[arg(long)]
    layer: Option<String>,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<()> {
    let acc = AcceleratorConfig::preset(&args.preset)?;
    let workload = load_workload(&args.topology)?;
    let mut trace = Vec::new();
    let (mut base, mut cycle) = (0u64, 0u64);
    for layer in &workload.layers {
        if args.layer.as_ref().is_some_and(|l| *l != layer.name) {
            continue;
        }
        let local = synthesize_trace(layer, &acc).with_context(|| format!("layer `{}`", layer.name))?;
        let shifted = if args.layer.is_some() { local } else { relocate(&local, base, cycle) };
        if let Some(last) = shifted.last() {
            cycle = last.cycle + (last.bytes as f64 / acc.bytes_per_cycle()).ceil() as u64;
        }
        base += LayerLayout::new(layer).footprint;
        trace.extend(shifted);
    }
    if let Some(name) = &args.layer {
        if trace.is_empty() {
            anyhow::bail!(secacc_core::Error::InvalidArgument(format!(
                "workload `{}` has no layer `{name}`",
                workload.name
            )));
        }
    }
    let csv = format_trace(&trace);
    match &args.out {
        Some(path) => write_atomic(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}
