use std::fmt::Write as _;

use anyhow::Result;
use secacc_core::sim::{output_tile, AcceleratorConfig};
use secacc_core::tiling::{overlap_traffic_factor, solve_opt_block, LayerShape, OptBlock, TilingPattern};
use serde::Serialize;

use crate::io::load_workload;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Topology CSV path or built-in workload name.
    topology: String,
    /// Accelerator whose output tile shapes the producer side.
    #[arg(long, default_value = "server")]
    preset: String,
    /// Print JSON instead of tables.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Serialize)]
struct IntraRow {
    layer: String,
    tile: Vec<u64>,
    step: Vec<u64>,
    opt_blk: Vec<u64>,
    overlap: Vec<u64>,
    overlap_traffic_factor: f64,
}

#[derive(Debug, Serialize)]
struct InterRow {
    producer: String,
    consumer: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    opt_blk: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    overlap: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    skipped: Option<String>,
}

#[derive(Debug, Serialize)]
struct Table {
    workload: String,
    accelerator: String,
    intra: Vec<IntraRow>,
    inter: Vec<InterRow>,
}

fn intra(layer: &LayerShape) -> Result<IntraRow> {
    let p = TilingPattern::sliding_window(layer)?;
    let opt = solve_opt_block(&p, &p)?;
    Ok(IntraRow {
        layer: layer.name.clone(),
        tile: p.axes.iter().map(|a| a.tile).collect(),
        step: p.axes.iter().map(|a| a.step).collect(),
        opt_blk: opt.dims,
        overlap: opt.overlaps,
        overlap_traffic_factor: overlap_traffic_factor(layer, &p)?,
    })
}

/// Producer output tiles against the consumer's windows on the shared tensor.
fn inter(producer: &LayerShape, consumer: &LayerShape, acc: &AcceleratorConfig) -> InterRow {
    let solved = (|| -> secacc_core::Result<OptBlock> {
        let (tp, tq) = output_tile(producer, acc);
        let tiles = TilingPattern::ofmap_tiles(producer, tp, tq)?;
        let windows = TilingPattern::consumer_windows(consumer, producer.p(), producer.q())?;
        solve_opt_block(&tiles, &windows)
    })();
    let (opt_blk, overlap, skipped) = match solved {
        Ok(o) => (Some(o.dims), Some(o.overlaps), None),
        Err(secacc_core::Error::InvalidArgument(why)) => (None, None, Some(why)),
        Err(e) => (None, None, Some(e.to_string())),
    };
    InterRow {
        producer: producer.name.clone(),
        consumer: consumer.name.clone(),
        opt_blk,
        overlap,
        skipped,
    }
}

fn dims(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join("x")
}

fn render(t: &Table) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {} on {}", t.workload, t.accelerator);
    let _ = writeln!(out, "intra-layer");
    let _ = writeln!(out, "{:<16} {:>9} {:>9} {:>9} {:>9} {:>8}", "layer", "tile", "step", "opt_blk", "overlap", "factor");
    for r in &t.intra {
        let _ = writeln!(
            out,
            "{:<16} {:>9} {:>9} {:>9} {:>9} {:>8.4}",
            r.layer,
            dims(&r.tile),
            dims(&r.step),
            dims(&r.opt_blk),
            dims(&r.overlap),
            r.overlap_traffic_factor
        );
    }
    let _ = writeln!(out, "inter-layer");
    let _ = writeln!(out, "{:<16} {:<16} {:>9} {:>9}", "producer", "consumer", "opt_blk", "overlap");
    for r in &t.inter {
        match (&r.opt_blk, &r.overlap, &r.skipped) {
            (Some(o), Some(v), _) => {
                let _ = writeln!(out, "{:<16} {:<16} {:>9} {:>9}", r.producer, r.consumer, dims(o), dims(v));
            }
            (_, _, why) => {
                let why = why.as_deref().unwrap_or("not adjacent");
                let _ = writeln!(out, "{:<16} {:<16} skipped: {why}", r.producer, r.consumer);
            }
        }
    }
    out
}

pub fn run(args: Args) -> Result<()> {
    let acc = AcceleratorConfig::preset(&args.preset)?;
    let workload = load_workload(&args.topology)?;
    let table = Table {
        workload: workload.name.clone(),
        accelerator: acc.name.clone(),
        intra: workload.layers.iter().map(intra).collect::<Result<_>>()?,
        inter: workload.layers.windows(2).map(|w| inter(&w[0], &w[1], &acc)).collect(),
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&table)?);
    } else {
        print!("{}", render(&table));
    }
    Ok(())
}
