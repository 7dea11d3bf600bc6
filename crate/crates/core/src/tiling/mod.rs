//! Convolution loop nest, tiling patterns, overlaps, and authentication-block alignment.

mod pattern;
mod shape;
mod tiles;
mod topology;

pub use pattern::{calc_gcd_block, calc_overlap_size, solve_opt_block, AxisTiling, OptBlock, TilingPattern};
pub use shape::LayerShape;
pub use tiles::{enumerate_tiles, overlap_traffic_factor, Tile};
pub use topology::{format_topology, parse_topology, TOPOLOGY_COLUMNS};
