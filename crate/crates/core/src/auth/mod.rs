//! Integrity: position-bound MACs, the XOR aggregation ladder
//! (opt_blk → tile → layer → model), and the RePA adversary.

mod aggregate;
mod mac;
mod repa;

pub use aggregate::{
    aggregate_levels, aggregate_macs, layer_mac, model_mac, verify_layer, verify_layer_with, AggregatedMac,
    LayerMacs, MacLevel, Verdict,
};
pub use mac::{auth_mac, AuthContext, Authenticator, MacValue};
pub use repa::{repa_attack, swap_payloads, RepaOutcome, RepaVerdict, XorMode};
