use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::engine::SchemeReport;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Traffic,
    Time,
    Energy,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Traffic, Metric::Time, Metric::Energy];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Traffic => "traffic",
            Metric::Time => "time",
            Metric::Energy => "energy",
        }
    }

    pub fn of(&self, r: &SchemeReport) -> f64 {
        match self {
            Metric::Traffic => r.normalized.traffic,
            Metric::Time => r.normalized.time,
            Metric::Energy => r.normalized.energy,
        }
    }
}

pub fn reports_json(reports: &[SchemeReport]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(reports)?;
    s.push('\n');
    Ok(s)
}

/// Aligned summary table of normalized factors.
pub fn reports_text(reports: &[SchemeReport]) -> String {
    let header = [
        "workload",
        "accel",
        "scheme",
        "exec_cycles",
        "data_bytes",
        "meta_bytes",
        "traffic",
        "time",
        "energy",
        "energy+aes",
    ];
    let rows: Vec<[String; 10]> = reports
        .iter()
        .map(|r| {
            [
                r.workload.clone(),
                r.accelerator.clone(),
                r.scheme.clone(),
                format!("{:.0}", r.exec_cycles),
                r.traffic.data_bytes().to_string(),
                r.traffic.metadata_bytes().to_string(),
                format!("{:.4}", r.normalized.traffic),
                format!("{:.4}", r.normalized.time),
                format!("{:.4}", r.normalized.energy),
                format!("{:.4}", r.energy.total_energy_factor),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &[&str]| {
        let mut parts = Vec::with_capacity(cells.len());
        for (i, (c, w)) in cells.iter().zip(widths).enumerate() {
            parts.push(if i < 3 { format!("{c:<w$}") } else { format!("{c:>w$}") });
        }
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, &header);
    for row in &rows {
        let cells: Vec<&str> = row.iter().map(String::as_str).collect();
        line(&mut out, &cells);
    }
    out
}

/// One row per (accelerator, workload), one column per scheme.
pub fn plot_csv(reports: &[SchemeReport], metric: Metric) -> String {
    let mut schemes: Vec<&str> = Vec::new();
    for r in reports {
        if !schemes.contains(&r.scheme.as_str()) {
            schemes.push(&r.scheme);
        }
    }
    let keys: BTreeSet<(&str, &str)> = reports.iter().map(|r| (r.accelerator.as_str(), r.workload.as_str())).collect();
    let mut out = format!("accelerator,workload,{}\n", schemes.join(","));
    for (acc, wl) in keys {
        let cells: Vec<String> = schemes
            .iter()
            .map(|s| {
                reports
                    .iter()
                    .find(|r| r.accelerator == acc && r.workload == wl && r.scheme == *s)
                    .map_or(String::new(), |r| format!("{:.6}", metric.of(r)))
            })
            .collect();
        let _ = writeln!(out, "{acc},{wl},{}", cells.join(","));
    }
    out
}
