use serde::{Deserialize, Serialize};

use super::mac::{AuthContext, Authenticator, MacValue};
use crate::crypto::DataBlock;
use crate::error::{Error, Result};

/// Rung of the aggregation ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MacLevel {
    OptBlk,
    Tile,
    Layer,
    Model,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregatedMac {
    pub level: MacLevel,
    pub value: MacValue,
    pub contributing_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
}

/// XOR fold of `children` tagged with `level`.
pub fn aggregate_macs(children: &[MacValue], level: MacLevel) -> Result<AggregatedMac> {
    if children.is_empty() {
        return Err(Error::invalid("cannot aggregate an empty MAC list"));
    }
    Ok(AggregatedMac {
        level,
        value: children.iter().fold(MacValue::default(), |acc, m| acc ^ *m),
        contributing_count: children.len(),
    })
}

/// Folds lower-level aggregates into the next rung. `contributing_count`
/// accumulates the leaf count.
pub fn aggregate_levels(children: &[AggregatedMac], level: MacLevel) -> Result<AggregatedMac> {
    if children.is_empty() {
        return Err(Error::invalid("cannot aggregate an empty MAC list"));
    }
    if let Some(bad) = children.iter().find(|c| c.level >= level) {
        return Err(Error::invalid(format!(
            "{:?} aggregate cannot feed a {level:?} aggregate",
            bad.level
        )));
    }
    Ok(AggregatedMac {
        level,
        value: children.iter().fold(MacValue::default(), |acc, m| acc ^ m.value),
        contributing_count: children.iter().map(|c| c.contributing_count).sum(),
    })
}

/// Layer MAC over position-bound block tags.
pub fn layer_mac(blocks: &[(DataBlock, AuthContext)], auth: &Authenticator) -> Result<AggregatedMac> {
    let tags: Vec<MacValue> = blocks.iter().map(|(d, c)| auth.mac(d, c)).collect();
    aggregate_macs(&tags, MacLevel::Layer)
}

/// Recomputes the layer MAC from the blocks as they are now and compares.
pub fn verify_layer(
    blocks: &[(DataBlock, AuthContext)],
    stored: &AggregatedMac,
    key: &[u8],
) -> Result<Verdict> {
    verify_layer_with(blocks, stored, &Authenticator::new(key)?)
}

pub fn verify_layer_with(
    blocks: &[(DataBlock, AuthContext)],
    stored: &AggregatedMac,
    auth: &Authenticator,
) -> Result<Verdict> {
    if stored.level != MacLevel::Layer {
        return Err(Error::invalid(format!(
            "verify_layer needs a layer MAC, got {:?}",
            stored.level
        )));
    }
    if blocks.is_empty() {
        return Ok(Verdict::Fail);
    }
    let recomputed = layer_mac(blocks, auth)?;
    Ok(if recomputed.value == stored.value {
        Verdict::Pass
    } else {
        Verdict::Fail
    })
}

/// All rungs for one layer: per-block tags, per-tile folds, and the layer fold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerMacs {
    pub opt_blk: Vec<Vec<MacValue>>,
    pub tiles: Vec<AggregatedMac>,
    pub layer: AggregatedMac,
}

impl LayerMacs {
    pub fn build(tiles: &[Vec<(DataBlock, AuthContext)>], auth: &Authenticator) -> Result<Self> {
        let opt_blk: Vec<Vec<MacValue>> = tiles
            .iter()
            .map(|t| t.iter().map(|(d, c)| auth.mac(d, c)).collect())
            .collect();
        let tile_macs = opt_blk
            .iter()
            .map(|tags| aggregate_macs(tags, MacLevel::Tile))
            .collect::<Result<Vec<_>>>()?;
        let layer = aggregate_levels(&tile_macs, MacLevel::Layer)?;
        Ok(LayerMacs {
            opt_blk,
            tiles: tile_macs,
            layer,
        })
    }
}

/// Model MAC over the layer MACs of weight tensors.
pub fn model_mac(weight_layers: &[AggregatedMac]) -> Result<AggregatedMac> {
    if weight_layers.iter().any(|l| l.level != MacLevel::Layer) {
        return Err(Error::invalid("model MAC folds layer MACs only"));
    }
    aggregate_levels(weight_layers, MacLevel::Model)
}
