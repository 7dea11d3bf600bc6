//! Re-permutation attack (RePA) oracle.
//!
//! The adversary swaps two blocks of a layer in memory. Payloads move;
//! the positions the verifier expects them at do not.

use serde::{Deserialize, Serialize};

use super::aggregate::{aggregate_macs, verify_layer_with, MacLevel, Verdict};
use super::mac::{AuthContext, Authenticator, MacValue};
use crate::crypto::DataBlock;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XorMode {
    /// Data-only tags folded with XOR: order-blind.
    NaiveXor,
    /// Tags bound to PA, VN, layer and block index.
    Defended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepaVerdict {
    AttackSucceeds,
    AttackDetected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepaOutcome {
    pub verdict: RepaVerdict,
    /// Layer aggregate over the original layout.
    pub stored: MacValue,
    /// Layer aggregate the verifier recomputes after the swap.
    pub observed: MacValue,
}

/// Layout after swapping the payloads at positions `i` and `j`.
pub fn swap_payloads(
    blocks: &[(DataBlock, AuthContext)],
    i: usize,
    j: usize,
) -> Result<Vec<(DataBlock, AuthContext)>> {
    if i >= blocks.len() || j >= blocks.len() {
        return Err(Error::invalid(format!(
            "swap ({i}, {j}) outside a {}-block layer",
            blocks.len()
        )));
    }
    let mut out = blocks.to_vec();
    let (di, dj) = (blocks[i].0.clone(), blocks[j].0.clone());
    out[i].0 = dj;
    out[j].0 = di;
    Ok(out)
}

fn naive_aggregate(blocks: &[(DataBlock, AuthContext)], auth: &Authenticator) -> Result<MacValue> {
    let tags: Vec<MacValue> = blocks.iter().map(|(d, _)| auth.mac_data_only(d)).collect();
    Ok(aggregate_macs(&tags, MacLevel::Layer)?.value)
}

fn bound_aggregate(blocks: &[(DataBlock, AuthContext)], auth: &Authenticator) -> Result<MacValue> {
    let tags: Vec<MacValue> = blocks.iter().map(|(d, c)| auth.mac(d, c)).collect();
    Ok(aggregate_macs(&tags, MacLevel::Layer)?.value)
}

/// Swaps blocks `swap.0` and `swap.1` and asks the layer check whether it noticed.
pub fn repa_attack(
    blocks: &[(DataBlock, AuthContext)],
    mode: XorMode,
    swap: (usize, usize),
    key: &[u8],
) -> Result<RepaOutcome> {
    if blocks.len() < 2 {
        return Err(Error::invalid("RePA needs a layer of at least two blocks"));
    }
    let auth = Authenticator::new(key)?;
    let shuffled = swap_payloads(blocks, swap.0, swap.1)?;
    match mode {
        XorMode::NaiveXor => {
            let stored = naive_aggregate(blocks, &auth)?;
            let observed = naive_aggregate(&shuffled, &auth)?;
            let verdict = if stored == observed {
                RepaVerdict::AttackSucceeds
            } else {
                RepaVerdict::AttackDetected
            };
            Ok(RepaOutcome {
                verdict,
                stored,
                observed,
            })
        }
        XorMode::Defended => {
            let stored = bound_aggregate(blocks, &auth)?;
            let observed = bound_aggregate(&shuffled, &auth)?;
            let stored_mac = aggregate_macs(&[stored], MacLevel::Layer)?;
            let verdict = match verify_layer_with(&shuffled, &stored_mac, &auth)? {
                Verdict::Pass => RepaVerdict::AttackSucceeds,
                Verdict::Fail => RepaVerdict::AttackDetected,
            };
            Ok(RepaOutcome {
                verdict,
                stored,
                observed,
            })
        }
    }
}
