//! Output-stationary DRAM trace synthesis and the trace CSV format.
//!
//! Layer-local layout, each tensor aligned to 4 KiB:
//! ifmap (N, C, H, W), then weights (K, C, R, S), then ofmap (N, K, P, Q).

use std::fmt::Write as _;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::accel::AcceleratorConfig;
use crate::error::{Error, Result};
use crate::schemes::{AccessKind, MemAccess};
use crate::tiling::LayerShape;

pub const TENSOR_ALIGN: u64 = 4096;
pub const TRACE_HEADER: &str = "cycle,address,bytes,kind,stream";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stream {
    Ifmap,
    Weight,
    Ofmap,
    Metadata,
}

impl Stream {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stream::Ifmap => "ifmap",
            Stream::Weight => "weight",
            Stream::Ofmap => "ofmap",
            Stream::Metadata => "metadata",
        }
    }
}

impl FromStr for Stream {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ifmap" => Ok(Stream::Ifmap),
            "weight" => Ok(Stream::Weight),
            "ofmap" => Ok(Stream::Ofmap),
            "metadata" => Ok(Stream::Metadata),
            _ => Err(Error::invalid(format!("unknown stream `{s}`"))),
        }
    }
}

fn kind_str(kind: AccessKind) -> &'static str {
    match kind {
        AccessKind::Read => "read",
        AccessKind::Write => "write",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DramAccess {
    pub cycle: u64,
    pub address: u64,
    pub bytes: u64,
    pub kind: AccessKind,
    pub stream: Stream,
}

impl DramAccess {
    pub fn mem(&self) -> MemAccess {
        MemAccess {
            address: self.address,
            bytes: self.bytes,
            kind: self.kind,
        }
    }
}

/// Tensor placement for one layer, relative to the layer base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerLayout {
    pub ifmap_base: u64,
    pub weight_base: u64,
    pub ofmap_base: u64,
    pub footprint: u64,
}

impl LayerLayout {
    pub fn new(shape: &LayerShape) -> Self {
        let align = |x: u64| x.div_ceil(TENSOR_ALIGN) * TENSOR_ALIGN;
        let weight_base = align(shape.ifmap_bytes());
        let ofmap_base = weight_base + align(shape.weight_bytes());
        LayerLayout {
            ifmap_base: 0,
            weight_base,
            ofmap_base,
            footprint: ofmap_base + align(shape.ofmap_bytes()),
        }
    }
}

/// Output pixels per tile as (rows, cols): one PE row per pixel.
pub fn output_tile(shape: &LayerShape, acc: &AcceleratorConfig) -> (u64, u64) {
    let tile_q = shape.q().min(acc.pe_rows);
    let tile_p = (acc.pe_rows / tile_q).clamp(1, shape.p());
    (tile_p, tile_q)
}

/// Output-stationary folds: spatial tiles x filter groups x batch.
pub fn fold_count(shape: &LayerShape, acc: &AcceleratorConfig) -> u64 {
    let (tp, tq) = output_tile(shape, acc);
    shape.n * shape.p().div_ceil(tp) * shape.q().div_ceil(tq) * shape.k.div_ceil(acc.pe_cols)
}

/// Closed-form systolic estimate: per fold, fill and drain of the array plus
/// one reduction step per (c, r, s).
pub fn compute_cycles(shape: &LayerShape, acc: &AcceleratorConfig) -> u64 {
    let per_fold = 2 * acc.pe_rows + acc.pe_cols + shape.c * shape.r * shape.s - 2;
    fold_count(shape, acc) * per_fold
}

struct TraceBuilder<'a> {
    acc: &'a AcceleratorConfig,
    bytes: u64,
    out: Vec<DramAccess>,
}

impl TraceBuilder<'_> {
    /// Widens runs to whole bursts, merges what touches, and issues them.
    fn issue(&mut self, runs: &[Range<u64>], kind: AccessKind, stream: Stream) {
        let b = self.acc.burst_bytes;
        let mut merged: Vec<Range<u64>> = Vec::new();
        for r in runs {
            let r = (r.start / b * b)..r.end.div_ceil(b) * b;
            match merged.last_mut() {
                Some(last) if r.start <= last.end => last.end = last.end.max(r.end),
                _ => merged.push(r),
            }
        }
        let bpc = self.acc.bytes_per_cycle();
        for r in merged {
            self.out.push(DramAccess {
                cycle: (self.bytes as f64 / bpc) as u64,
                address: r.start,
                bytes: r.end - r.start,
                kind,
                stream,
            });
            self.bytes += r.end - r.start;
        }
    }
}

/// Row-major runs of a (rows x cols) window over channels `chans` of a 4-D tensor.
fn window_runs(
    base: u64,
    dims: [u64; 4],
    n: u64,
    chans: Range<u64>,
    rows: Range<u64>,
    cols: Range<u64>,
) -> Vec<Range<u64>> {
    let [_, c_ext, h, w] = dims;
    let full_width = cols.start == 0 && cols.end == w;
    let mut runs = Vec::new();
    for ch in chans {
        let plane = base + (n * c_ext + ch) * h * w;
        if full_width {
            runs.push(plane + rows.start * w..plane + rows.end * w);
        } else {
            for row in rows.clone() {
                runs.push(plane + row * w + cols.start..plane + row * w + cols.end);
            }
        }
    }
    runs
}

/// Layer-local trace for one convolution.
///
/// Per output tile the ifmap halo is fetched once if it fits in a quarter of
/// SRAM, else once per filter group. Weights are fetched once if they fit in
/// half of SRAM, else per tile and filter group. Ofmap is written per filter
/// group of each tile.
pub fn synthesize_trace(shape: &LayerShape, acc: &AcceleratorConfig) -> Result<Vec<DramAccess>> {
    acc.validate()?;
    shape.validate()?;
    let shape = shape.normalized();
    let layout = LayerLayout::new(&shape);
    if layout.footprint > acc.dram_bytes {
        return Err(Error::invalid(format!(
            "layer `{}` needs {} B, DRAM holds {}",
            shape.name, layout.footprint, acc.dram_bytes
        )));
    }
    let (p, q, st) = (shape.p(), shape.q(), shape.stride);
    let (tp, tq) = output_tile(&shape, acc);
    let groups = shape.k.div_ceil(acc.pe_cols);
    let crs = shape.c * shape.r * shape.s;
    let weights_resident = shape.weight_bytes() <= acc.sram_bytes / 2;
    let ifmap_dims = [shape.n, shape.c, shape.h, shape.w];
    let ofmap_dims = [shape.n, shape.k, p, q];

    let mut b = TraceBuilder {
        acc,
        bytes: 0,
        out: Vec::new(),
    };
    if weights_resident {
        let w = layout.weight_base..layout.weight_base + shape.weight_bytes();
        b.issue(&[w], AccessKind::Read, Stream::Weight);
    }
    for n in 0..shape.n {
        for p0 in (0..p).step_by(tp as usize) {
            let p1 = (p0 + tp).min(p);
            for q0 in (0..q).step_by(tq as usize) {
                let q1 = (q0 + tq).min(q);
                let rows = p0 * st..(p1 - 1) * st + shape.r;
                let cols = q0 * st..(q1 - 1) * st + shape.s;
                let region = shape.c * (rows.end - rows.start) * (cols.end - cols.start);
                let ifmap = window_runs(layout.ifmap_base, ifmap_dims, n, 0..shape.c, rows, cols);
                let reuse = region <= acc.sram_bytes / 4;
                if reuse {
                    b.issue(&ifmap, AccessKind::Read, Stream::Ifmap);
                }
                for g in 0..groups {
                    let k0 = g * acc.pe_cols;
                    let k1 = (k0 + acc.pe_cols).min(shape.k);
                    if !reuse {
                        b.issue(&ifmap, AccessKind::Read, Stream::Ifmap);
                    }
                    if !weights_resident {
                        let w = layout.weight_base + k0 * crs..layout.weight_base + k1 * crs;
                        b.issue(&[w], AccessKind::Read, Stream::Weight);
                    }
                    let ofmap = window_runs(layout.ofmap_base, ofmap_dims, n, k0..k1, p0..p1, q0..q1);
                    b.issue(&ofmap, AccessKind::Write, Stream::Ofmap);
                }
            }
        }
    }
    Ok(b.out)
}

/// Shifts a trace by `base` bytes and `cycle` cycles.
pub fn relocate(trace: &[DramAccess], base: u64, cycle: u64) -> Vec<DramAccess> {
    trace
        .iter()
        .map(|a| DramAccess {
            address: a.address + base,
            cycle: a.cycle + cycle,
            ..*a
        })
        .collect()
}

pub fn format_trace(trace: &[DramAccess]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for a in trace {
        let _ = writeln!(
            out,
            "{},{:#x},{},{},{}",
            a.cycle,
            a.address,
            a.bytes,
            kind_str(a.kind),
            a.stream.as_str()
        );
    }
    out
}

fn parse_u64(field: &str) -> Option<u64> {
    let f = field.trim();
    match f.strip_prefix("0x").or_else(|| f.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16).ok(),
        None => f.parse().ok(),
    }
}

fn parse_hex(field: &str) -> Option<u64> {
    let f = field.trim();
    let hex = f.strip_prefix("0x").or_else(|| f.strip_prefix("0X")).unwrap_or(f);
    u64::from_str_radix(hex, 16).ok()
}

/// Parses the trace CSV. The header row is optional; `#` lines are comments.
/// Addresses are hexadecimal with or without `0x`.
pub fn ingest_trace(text: &str) -> Result<Vec<DramAccess>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let row = raw.trim();
        if row.is_empty() || row.starts_with('#') || (out.is_empty() && row.replace(' ', "") == TRACE_HEADER) {
            continue;
        }
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(Error::parse(line, format!("expected 5 fields, found {}", fields.len())));
        }
        let cycle = parse_u64(fields[0]).ok_or_else(|| Error::parse(line, format!("bad cycle `{}`", fields[0])))?;
        let address =
            parse_hex(fields[1]).ok_or_else(|| Error::parse(line, format!("bad address `{}`", fields[1])))?;
        let bytes = parse_u64(fields[2])
            .filter(|b| *b > 0)
            .ok_or_else(|| Error::parse(line, format!("bad byte count `{}`", fields[2])))?;
        let kind = match fields[3] {
            "read" | "r" | "R" => AccessKind::Read,
            "write" | "w" | "W" => AccessKind::Write,
            other => return Err(Error::parse(line, format!("bad kind `{other}`"))),
        };
        let stream = fields[4].parse().map_err(|e: Error| Error::parse(line, e.to_string()))?;
        out.push(DramAccess {
            cycle,
            address,
            bytes,
            kind,
            stream,
        });
    }
    Ok(out)
}
