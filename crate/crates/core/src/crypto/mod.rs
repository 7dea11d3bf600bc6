//! Confidentiality: AES, counter-mode pads, round-key pad expansion, and the
//! SECA adversary.

mod aes;
pub mod golden;
mod otp;
mod seca;

pub use aes::{key_expansion, AesVariant, Block, RoundKeySet};
pub use otp::{
    comb_key_set_size, ctr_otp, decrypt_block, derive_block_otps, encrypt_block, encrypt_block_shared,
    select_comb_keys, CombKey, CounterTuple, DataBlock, Otp, OtpEngine, OtpMode, SeedPolicy,
    SUB_BLOCK_BYTES,
};
pub use seca::{most_frequent_sub_block, recovery_rate, seca_attack, SecaRecovery};
