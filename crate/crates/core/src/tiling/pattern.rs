//! Tiling patterns and the GCD-based optimal authentication block.
//!
//! For one axis, a pattern is a grid of equal tiles advancing by a fixed
//! step, optionally starting `lead` elements before the axis origin (padded
//! convolution windows seen in producer coordinates). Tiles are clipped to
//! `[0, length)`.
//!
//! The optimal block length on an axis is the largest length that never
//! straddles a tile boundary of either pattern. For one pair of overlapping
//! tiles of lengths `l1`, `l2` sharing `l12` elements that is
//! `gcd(l1 - l12, l2 - l12, l12)`; [`solve_opt_block`] folds that term over
//! every overlapping pair on the axis.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::shape::LayerShape;
use crate::error::{Error, Result};

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Tiling of one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AxisTiling {
    pub length: u64,
    pub tile: u64,
    pub step: u64,
    /// The first tile starts this many elements before the origin.
    #[serde(default)]
    pub lead: u64,
}

impl AxisTiling {
    pub fn new(length: u64, tile: u64, step: u64) -> Result<Self> {
        Self::with_lead(length, tile, step, 0)
    }

    pub fn with_lead(length: u64, tile: u64, step: u64, lead: u64) -> Result<Self> {
        let axis = AxisTiling {
            length,
            tile,
            step,
            lead,
        };
        axis.validate()?;
        Ok(axis)
    }

    /// Non-overlapping tiles of `tile` elements.
    pub fn disjoint(length: u64, tile: u64) -> Result<Self> {
        Self::new(length, tile, tile)
    }

    pub fn validate(&self) -> Result<()> {
        if self.length == 0 || self.tile == 0 || self.step == 0 {
            return Err(Error::invalid(format!("degenerate axis tiling {self:?}")));
        }
        if self.step > self.tile {
            return Err(Error::invalid(format!(
                "step {} exceeds tile {}: the grid would leave gaps",
                self.step, self.tile
            )));
        }
        if self.lead >= self.tile {
            return Err(Error::invalid(format!(
                "lead {} must be smaller than tile {}",
                self.lead, self.tile
            )));
        }
        if self.lead == 0 && self.tile > self.length {
            return Err(Error::invalid(format!(
                "tile {} exceeds axis length {}",
                self.tile, self.length
            )));
        }
        Ok(())
    }

    /// Clipped tile intervals in order. Consecutive tiles overlap or touch,
    /// so together they cover the whole axis.
    pub fn intervals(&self) -> Vec<Range<u64>> {
        let mut out = Vec::new();
        let mut start = -(self.lead as i128);
        loop {
            let lo = start.max(0) as u64;
            let hi = (start + self.tile as i128).min(self.length as i128) as u64;
            out.push(lo..hi);
            if hi >= self.length {
                break;
            }
            start += self.step as i128;
        }
        out
    }

    /// Sliding-window overlap between neighbouring tiles.
    pub fn window_overlap(&self) -> u64 {
        self.tile - self.step
    }
}

/// Per-axis tilings of a tensor, outermost axis first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TilingPattern {
    pub axes: Vec<AxisTiling>,
}

impl TilingPattern {
    pub fn new(axes: Vec<AxisTiling>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::invalid("a tiling pattern needs at least one axis"));
        }
        for a in &axes {
            a.validate()?;
        }
        Ok(TilingPattern { axes })
    }

    /// Convolution windows over the ifmap (H, W). A stride larger than the
    /// filter widens the tile to the stride so the grid stays gap-free.
    pub fn sliding_window(shape: &LayerShape) -> Result<Self> {
        let shape = shape.normalized();
        Self::new(vec![
            AxisTiling::new(shape.h, shape.r.max(shape.stride), shape.stride)?,
            AxisTiling::new(shape.w, shape.s.max(shape.stride), shape.stride)?,
        ])
    }

    /// Consumer windows mapped onto a producer ofmap of `rows x cols`.
    ///
    /// The consumer's ifmap may be the producer ofmap plus symmetric zero
    /// padding; the padding becomes the grid's lead.
    pub fn consumer_windows(consumer: &LayerShape, rows: u64, cols: u64) -> Result<Self> {
        let axis = |padded: u64, real: u64, tile: u64| -> Result<AxisTiling> {
            if padded < real || !(padded - real).is_multiple_of(2) {
                return Err(Error::invalid(format!(
                    "consumer `{}` ifmap extent {padded} does not pad producer extent {real} symmetrically",
                    consumer.name
                )));
            }
            let tile = tile.max(consumer.stride);
            let lead = (padded - real) / 2;
            if lead >= tile {
                return Err(Error::invalid(format!(
                    "consumer `{}` ifmap extent {padded} is not a padded {real}-wide producer output",
                    consumer.name
                )));
            }
            AxisTiling::with_lead(real, tile, consumer.stride, lead)
        };
        Self::new(vec![
            axis(consumer.h, rows, consumer.r)?,
            axis(consumer.w, cols, consumer.s)?,
        ])
    }

    /// Disjoint output tiles of `tile_p x tile_q` over the ofmap (P, Q).
    pub fn ofmap_tiles(shape: &LayerShape, tile_p: u64, tile_q: u64) -> Result<Self> {
        Self::new(vec![
            AxisTiling::disjoint(shape.p(), tile_p.clamp(1, shape.p()))?,
            AxisTiling::disjoint(shape.q(), tile_q.clamp(1, shape.q()))?,
        ])
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }
}

/// The authentication block: one length per axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OptBlock {
    pub dims: Vec<u64>,
    /// Overlap length per axis, as reported by [`calc_overlap_size`].
    pub overlaps: Vec<u64>,
}

impl OptBlock {
    pub fn elements(&self) -> u64 {
        self.dims.iter().product()
    }
}

fn check_same_axis(a: &AxisTiling, b: &AxisTiling) -> Result<()> {
    a.validate()?;
    b.validate()?;
    if a.length != b.length {
        return Err(Error::invalid(format!(
            "patterns tile axes of different length ({} vs {})",
            a.length, b.length
        )));
    }
    Ok(())
}

/// Overlap between two tilings of the same axis.
///
/// Identical patterns: the sliding-window overlap `tile - step`. Different
/// patterns: the largest partial overlap between a tile of one and a tile
/// of the other (pairs where one tile contains the other are not partial).
pub fn calc_overlap_size(a: &AxisTiling, b: &AxisTiling) -> Result<u64> {
    check_same_axis(a, b)?;
    if a == b {
        return Ok(a.window_overlap());
    }
    let (ia, ib) = (a.intervals(), b.intervals());
    let mut best = 0;
    for x in &ia {
        for y in ib.iter().skip_while(|y| y.end <= x.start).take_while(|y| y.start < x.end) {
            let contains = (x.start <= y.start && y.end <= x.end) || (y.start <= x.start && x.end <= y.end);
            if !contains {
                best = best.max(x.end.min(y.end) - x.start.max(y.start));
            }
        }
    }
    Ok(best)
}

/// `gcd(l1 - l12, l2 - l12, l12)`, with `gcd(x, 0) = x`.
pub fn calc_gcd_block(l1: u64, l2: u64, l12: u64) -> Result<u64> {
    if l12 > l1.min(l2) {
        return Err(Error::invalid(format!(
            "overlap {l12} exceeds tile lengths ({l1}, {l2})"
        )));
    }
    let g = gcd(gcd(l1 - l12, l2 - l12), l12);
    if g == 0 {
        return Err(Error::invalid("gcd of three zero lengths is undefined"));
    }
    Ok(g)
}

/// Optimal block length on one axis.
fn solve_axis(a: &AxisTiling, b: &AxisTiling) -> Result<u64> {
    let mut tiles: Vec<Range<u64>> = a.intervals();
    tiles.extend(b.intervals());
    tiles.sort_by_key(|r| (r.start, r.end));
    let mut block = 0u64;
    for (i, x) in tiles.iter().enumerate() {
        // a tile paired with itself contributes its own length
        block = gcd(block, calc_gcd_block(x.end - x.start, x.end - x.start, x.end - x.start)?);
        for y in tiles[i + 1..].iter().take_while(|y| y.start < x.end) {
            let shared = x.end.min(y.end) - y.start;
            block = gcd(block, calc_gcd_block(x.end - x.start, y.end - y.start, shared)?);
        }
    }
    Ok(block)
}

/// Solves the optimal authentication block for two patterns over the same tensor.
///
/// Fails with an internal error if the result does not divide every tile
/// boundary of both patterns.
pub fn solve_opt_block(first: &TilingPattern, second: &TilingPattern) -> Result<OptBlock> {
    if first.dims() != second.dims() {
        return Err(Error::invalid(format!(
            "patterns have {} and {} axes",
            first.dims(),
            second.dims()
        )));
    }
    let mut dims = Vec::with_capacity(first.dims());
    let mut overlaps = Vec::with_capacity(first.dims());
    for (a, b) in first.axes.iter().zip(&second.axes) {
        overlaps.push(calc_overlap_size(a, b)?);
        let block = solve_axis(a, b)?;
        let misaligned = a
            .intervals()
            .into_iter()
            .chain(b.intervals())
            .flat_map(|r| [r.start, r.end])
            .find(|cut| cut % block != 0);
        if let Some(cut) = misaligned {
            return Err(Error::Internal(format!(
                "block length {block} does not divide tile boundary {cut}"
            )));
        }
        dims.push(block);
    }
    Ok(OptBlock { dims, overlaps })
}
