use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::pattern::TilingPattern;
use super::shape::LayerShape;
use crate::error::{Error, Result};

/// One tile of the ifmap. `ranges` holds element intervals for (N, C, H, W).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tile {
    pub index: usize,
    pub ranges: [Range<u64>; 4],
}

impl Tile {
    pub fn elements(&self) -> u64 {
        self.ranges.iter().map(|r| r.end - r.start).product()
    }

    /// Layer-local byte runs, row-major over (N, C, H, W). Adjacent runs are merged.
    pub fn address_runs(&self, extents: [u64; 4]) -> Vec<Range<u64>> {
        let [_, c, h, w] = extents;
        let mut runs: Vec<Range<u64>> = Vec::new();
        for n in self.ranges[0].clone() {
            for ch in self.ranges[1].clone() {
                for row in self.ranges[2].clone() {
                    let base = ((n * c + ch) * h + row) * w;
                    let run = base + self.ranges[3].start..base + self.ranges[3].end;
                    match runs.last_mut() {
                        Some(last) if last.end == run.start => last.end = run.end,
                        _ => runs.push(run),
                    }
                }
            }
        }
        runs
    }
}

fn ifmap_extents(shape: &LayerShape) -> [u64; 4] {
    [shape.n, shape.c, shape.h, shape.w]
}

fn check_cover(shape: &LayerShape, pattern: &TilingPattern) -> Result<[u64; 4]> {
    shape.validate()?;
    let extents = ifmap_extents(shape);
    if pattern.dims() > 4 {
        return Err(Error::invalid(format!("pattern has {} axes, ifmap has 4", pattern.dims())));
    }
    let offset = 4 - pattern.dims();
    for (i, axis) in pattern.axes.iter().enumerate() {
        axis.validate()?;
        let extent = extents[offset + i];
        if axis.length != extent {
            return Err(Error::invalid(format!(
                "pattern axis {i} spans {} elements, layer `{}` has {extent}",
                axis.length, shape.name
            )));
        }
        if axis.tile > extent {
            return Err(Error::invalid(format!(
                "tile {} exceeds extent {extent} of layer `{}`",
                axis.tile, shape.name
            )));
        }
    }
    Ok(extents)
}

/// Tiles of the ifmap in loop order. Pattern axes map onto the trailing
/// ifmap dimensions; leading dimensions are taken whole.
pub fn enumerate_tiles(shape: &LayerShape, pattern: &TilingPattern) -> Result<Vec<Tile>> {
    let extents = check_cover(shape, pattern)?;
    let offset = 4 - pattern.dims();
    let per_dim: Vec<Vec<Range<u64>>> = (0..4)
        .map(|d| {
            if d < offset {
                std::iter::once(0..extents[d]).collect()
            } else {
                pattern.axes[d - offset].intervals()
            }
        })
        .collect();
    let mut tiles = Vec::new();
    for a in &per_dim[0] {
        for b in &per_dim[1] {
            for c in &per_dim[2] {
                for d in &per_dim[3] {
                    tiles.push(Tile {
                        index: tiles.len(),
                        ranges: [a.clone(), b.clone(), c.clone(), d.clone()],
                    });
                }
            }
        }
    }
    Ok(tiles)
}

/// Elements fetched over all tiles divided by distinct elements.
pub fn overlap_traffic_factor(shape: &LayerShape, pattern: &TilingPattern) -> Result<f64> {
    check_cover(shape, pattern)?;
    Ok(pattern
        .axes
        .iter()
        .map(|a| a.intervals().iter().map(|r| r.end - r.start).sum::<u64>() as f64 / a.length as f64)
        .product())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::AxisTiling;

    fn square(h: u64, tile: u64, step: u64) -> TilingPattern {
        let a = AxisTiling::new(h, tile, step).unwrap();
        TilingPattern::new(vec![a, a]).unwrap()
    }

    #[test]
    fn disjoint_four_tiles_row_major() {
        let shape = LayerShape::conv("x", 4, 4, 1, 1, 1, 1, 1).unwrap();
        let tiles = enumerate_tiles(&shape, &square(4, 2, 2)).unwrap();
        assert_eq!(tiles.len(), 4);
        assert_eq!((tiles[1].ranges[2].clone(), tiles[1].ranges[3].clone()), (0..2, 2..4));
        assert_eq!((tiles[2].ranges[2].clone(), tiles[2].ranges[3].clone()), (2..4, 0..2));
        assert_eq!(overlap_traffic_factor(&shape, &square(4, 2, 2)).unwrap(), 1.0);
    }

    #[test]
    fn sliding_windows_overlap_two_columns() {
        let shape = LayerShape::conv("x", 5, 5, 3, 3, 1, 1, 1).unwrap();
        let tiles = enumerate_tiles(&shape, &square(5, 3, 1)).unwrap();
        assert_eq!(tiles.len(), 9);
        let (a, b) = (&tiles[0].ranges[3], &tiles[1].ranges[3]);
        assert_eq!(a.end.min(b.end) - a.start.max(b.start), 2);
        let f = overlap_traffic_factor(&shape, &square(5, 3, 1)).unwrap();
        assert!((f - 81.0 / 25.0).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_factor() {
        let shape = LayerShape::conv("x", 1, 6, 1, 1, 1, 1, 1).unwrap();
        let p = TilingPattern::new(vec![AxisTiling::new(6, 4, 2).unwrap()]).unwrap();
        let f = overlap_traffic_factor(&shape, &p).unwrap();
        assert!((f - 8.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_mismatch() {
        let shape = LayerShape::conv("x", 4, 4, 1, 1, 1, 1, 1).unwrap();
        assert!(enumerate_tiles(&shape, &square(5, 3, 1)).is_err());
        let wide = TilingPattern {
            axes: vec![AxisTiling { length: 4, tile: 5, step: 1, lead: 1 }; 2],
        };
        assert!(enumerate_tiles(&shape, &wide).is_err());
    }

    #[test]
    fn address_runs_merge_full_rows() {
        let shape = LayerShape::conv("x", 4, 4, 1, 1, 2, 1, 1).unwrap();
        let ext = [1, 2, 4, 4];
        let tiles = enumerate_tiles(&shape, &square(4, 2, 2)).unwrap();
        assert_eq!(tiles[0].address_runs(ext), vec![0..2, 4..6, 16..18, 20..22]);
        let whole = TilingPattern::new(vec![AxisTiling::disjoint(4, 4).unwrap()]).unwrap();
        let t = enumerate_tiles(&shape, &whole).unwrap();
        assert_eq!(t[0].address_runs(ext), vec![0..32]);
    }
}
