use anyhow::{bail, Result};
use secacc_core::sim::{crypto_hw_cost, AcceleratorConfig, CryptoCost, CryptoStyle, HwCostModel};
use serde::Serialize;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Required crypto bandwidth in bytes per cycle; prints one design pair.
    #[arg(long, conflicts_with_all = ["preset", "max_lanes"])]
    required_bw: Option<f64>,
    /// Size both styles for this accelerator's DRAM bandwidth.
    #[arg(long, conflicts_with = "max_lanes")]
    preset: Option<String>,
    /// Sweep lane counts 1..=N.
    #[arg(long, default_value_t = 16)]
    max_lanes: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Serialize)]
struct Row {
    required_bw: f64,
    t_aes: CryptoCost,
    b_aes: CryptoCost,
    area_ratio: f64,
}

fn row(bw: f64, hw: &HwCostModel) -> Result<Row> {
    let t = crypto_hw_cost(bw, CryptoStyle::TAes, hw)?;
    let b = crypto_hw_cost(bw, CryptoStyle::BAes, hw)?;
    Ok(Row {
        required_bw: bw,
        area_ratio: t.area_gates / b.area_gates,
        t_aes: t,
        b_aes: b,
    })
}

pub fn run(args: Args) -> Result<()> {
    let hw = HwCostModel::default();
    let rows = if let Some(bw) = args.required_bw {
        vec![row(bw, &hw)?]
    } else if let Some(p) = &args.preset {
        vec![row(AcceleratorConfig::preset(p)?.bytes_per_cycle(), &hw)?]
    } else {
        if args.max_lanes == 0 {
            bail!(secacc_core::Error::InvalidArgument("max-lanes must be at least 1".into()));
        }
        (1..=args.max_lanes)
            .map(|n| row(n as f64 * hw.lane_throughput(), &hw))
            .collect::<Result<_>>()?
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&rows)?);
        return Ok(());
    }
    println!(
        "{:>8} {:>6} {:>12} {:>12} {:>8} {:>12} {:>12}",
        "bw_B/cyc", "lanes", "taes_gates", "baes_gates", "ratio", "taes_pJ/16B", "baes_pJ/16B"
    );
    for r in &rows {
        println!(
            "{:>8.3} {:>6} {:>12.0} {:>12.0} {:>8.3} {:>12.3} {:>12.3}",
            r.required_bw,
            r.t_aes.lanes,
            r.t_aes.area_gates,
            r.b_aes.area_gates,
            r.area_ratio,
            r.t_aes.energy_pj_per_16b,
            r.b_aes.energy_pj_per_16b
        );
    }
    Ok(())
}
