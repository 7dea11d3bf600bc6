//! Counter-mode pads and the bandwidth-aware per-sub-block pad expansion.
//!
//! One AES-CTR evaluation yields the block's shared pad. Every 128-bit
//! sub-block then gets `shared ^ comb_key_i`, where `comb_key_i` is the XOR
//! fold of a distinct, non-empty subset of the per-round keys.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::aes::{AesVariant, RoundKeySet};
use crate::error::{Error, Result};

/// Width of one sub-block, the atomic crypto unit.
pub const SUB_BLOCK_BYTES: usize = 16;

/// Per-block nonce material: block-aligned physical address and version number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CounterTuple {
    pa: u64,
    vn: u64,
    vn_bits: u32,
}

impl CounterTuple {
    pub const DEFAULT_VN_BITS: u32 = 56;

    /// Builds a counter for the block at `pa`, which must be a multiple of
    /// `block_bytes`. The version number uses the default 56-bit width.
    pub fn new(pa: u64, vn: u64, block_bytes: u64) -> Result<Self> {
        Self::with_vn_bits(pa, vn, block_bytes, Self::DEFAULT_VN_BITS)
    }

    pub fn with_vn_bits(pa: u64, vn: u64, block_bytes: u64, vn_bits: u32) -> Result<Self> {
        if block_bytes == 0 {
            return Err(Error::invalid("block size must be nonzero"));
        }
        if !pa.is_multiple_of(block_bytes) {
            return Err(Error::invalid(format!(
                "physical address {pa:#x} is not aligned to {block_bytes} B"
            )));
        }
        if vn_bits == 0 || vn_bits > 64 {
            return Err(Error::invalid(format!("VN width {vn_bits} outside 1..=64")));
        }
        if vn_bits < 64 && vn >> vn_bits != 0 {
            return Err(Error::invalid(format!(
                "version number {vn} does not fit in {vn_bits} bits"
            )));
        }
        Ok(CounterTuple { pa, vn, vn_bits })
    }

    pub fn pa(&self) -> u64 {
        self.pa
    }

    pub fn vn(&self) -> u64 {
        self.vn
    }

    /// The counter after one more write to the same address.
    pub fn next_version(&self) -> Result<Self> {
        let vn = self
            .vn
            .checked_add(1)
            .filter(|v| self.vn_bits == 64 || v >> self.vn_bits == 0)
            .ok_or_else(|| Error::invalid("version number overflow"))?;
        Ok(CounterTuple { vn, ..*self })
    }

    /// 128-bit counter word: PA in the high half, VN zero-padded in the low half.
    pub fn word(&self) -> u128 {
        (u128::from(self.pa) << 64) | u128::from(self.vn)
    }
}

/// A 128-bit one-time pad.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Otp(pub u128);

/// XOR fold of a subset of round keys. Bit `i` of `mask` selects round key `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CombKey {
    pub mask: u32,
    pub value: u128,
}

impl CombKey {
    pub fn from_mask(keys: &RoundKeySet, mask: u32) -> Self {
        let value = (0..keys.round_keys().len())
            .filter(|i| mask >> i & 1 == 1)
            .fold(0u128, |acc, i| acc ^ keys.round_key_word(i));
        CombKey { mask, value }
    }
}

/// Plaintext or ciphertext payload; always a nonzero multiple of 16 bytes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DataBlock {
    bytes: Vec<u8>,
}

impl std::fmt::Debug for DataBlock {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DataBlock({} B)", self.bytes.len())
    }
}

impl DataBlock {
    pub fn new(bytes: Vec<u8>) -> Result<Self> {
        if bytes.is_empty() || !bytes.len().is_multiple_of(SUB_BLOCK_BYTES) {
            return Err(Error::invalid(format!(
                "data block size {} is not a nonzero multiple of {SUB_BLOCK_BYTES}",
                bytes.len()
            )));
        }
        Ok(DataBlock { bytes })
    }

    pub fn zeroed(len: usize) -> Result<Self> {
        Self::new(vec![0; len])
    }

    pub fn from_sub_blocks(words: &[u128]) -> Result<Self> {
        Self::new(words.iter().flat_map(|w| w.to_be_bytes()).collect())
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn as_bytes_mut(&mut self) -> &mut [u8] {
        &mut self.bytes
    }

    pub fn sub_block_count(&self) -> usize {
        self.bytes.len() / SUB_BLOCK_BYTES
    }

    pub fn sub_blocks(&self) -> impl Iterator<Item = u128> + '_ {
        self.bytes
            .chunks_exact(SUB_BLOCK_BYTES)
            .map(|c| u128::from_be_bytes(c.try_into().expect("16-byte chunk")))
    }

    fn xor_with(&self, pads: impl Iterator<Item = u128>) -> DataBlock {
        let words: Vec<u128> = self.sub_blocks().zip(pads).map(|(d, p)| d ^ p).collect();
        DataBlock {
            bytes: words.iter().flat_map(|w| w.to_be_bytes()).collect(),
        }
    }
}

/// Size of the full combination set: `2^rounds`, the empty subset included.
pub fn comb_key_set_size(variant: AesVariant) -> u64 {
    1u64 << variant.rounds()
}

/// AES-CTR pad for one counter.
pub fn ctr_otp(counter: &CounterTuple, keys: &RoundKeySet) -> Otp {
    Otp(u128::from_be_bytes(
        keys.encrypt_block(&counter.word().to_be_bytes()),
    ))
}

/// Draws `n` combination keys with pairwise-distinct masks and values.
///
/// The empty mask is never drawn, so no derived pad equals the shared pad.
/// Value collisions (linearly dependent subsets) are re-drawn; the search
/// gives up after `64 * n` draws.
pub fn select_comb_keys(keys: &RoundKeySet, n: usize, seed: u64) -> Result<Vec<CombKey>> {
    select_with_rng(keys, n, ChaCha8Rng::seed_from_u64(seed))
}

fn select_with_rng(keys: &RoundKeySet, n: usize, mut rng: ChaCha8Rng) -> Result<Vec<CombKey>> {
    let nonzero = comb_key_set_size(keys.variant()) - 1;
    if n == 0 || n as u64 > nonzero {
        return Err(Error::invalid(format!(
            "need 1..={nonzero} combination keys for {}, asked for {n}",
            keys.variant().name()
        )));
    }
    let mut masks = HashSet::with_capacity(n);
    let mut values = HashSet::with_capacity(n);
    let mut picked = Vec::with_capacity(n);
    let budget = 64 * n;
    for _ in 0..budget {
        if picked.len() == n {
            break;
        }
        let mask = rng.gen_range(1..=nonzero) as u32;
        if !masks.insert(mask) {
            continue;
        }
        let key = CombKey::from_mask(keys, mask);
        if key.value == 0 || !values.insert(key.value) {
            continue;
        }
        picked.push(key);
    }
    if picked.len() < n {
        return Err(Error::DerivationFailure(format!(
            "found only {} of {n} distinct combination keys within {budget} draws",
            picked.len()
        )));
    }
    Ok(picked)
}

/// Per-sub-block pads `shared ^ comb_key_i` for `n` sub-blocks.
pub fn derive_block_otps(
    counter: &CounterTuple,
    keys: &RoundKeySet,
    n: usize,
    seed: u64,
) -> Result<Vec<Otp>> {
    let shared = ctr_otp(counter, keys);
    Ok(select_comb_keys(keys, n, seed)?
        .into_iter()
        .map(|k| Otp(shared.0 ^ k.value))
        .collect())
}

/// Encrypts with a distinct pad per 16-byte sub-block.
pub fn encrypt_block(
    plain: &DataBlock,
    counter: &CounterTuple,
    keys: &RoundKeySet,
    seed: u64,
) -> Result<DataBlock> {
    let pads = derive_block_otps(counter, keys, plain.sub_block_count(), seed)?;
    Ok(plain.xor_with(pads.into_iter().map(|p| p.0)))
}

/// Inverse of [`encrypt_block`]; counter mode is an XOR involution.
pub fn decrypt_block(
    cipher: &DataBlock,
    counter: &CounterTuple,
    keys: &RoundKeySet,
    seed: u64,
) -> Result<DataBlock> {
    encrypt_block(cipher, counter, keys, seed)
}

/// Naive mode: every sub-block of the block reuses the shared pad.
pub fn encrypt_block_shared(plain: &DataBlock, counter: &CounterTuple, keys: &RoundKeySet) -> DataBlock {
    let shared = ctr_otp(counter, keys).0;
    plain.xor_with(std::iter::repeat(shared))
}

/// How a block's sub-blocks are padded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OtpMode {
    /// One pad for the whole block (vulnerable to single-element collisions).
    Shared,
    /// One combination-key pad per sub-block.
    PerSubBlock,
}

/// Where the combination-key selection seed comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedPolicy {
    /// One selection for the whole session.
    PerSession,
    /// A fresh selection for every (PA, VN) pair.
    #[default]
    PerCounter,
}

/// The crypt engine: one key schedule, a selection seed, and a padding mode.
#[derive(Debug, Clone)]
pub struct OtpEngine {
    keys: RoundKeySet,
    seed: u64,
    policy: SeedPolicy,
    mode: OtpMode,
}

impl OtpEngine {
    pub fn new(keys: RoundKeySet, seed: u64) -> Self {
        OtpEngine {
            keys,
            seed,
            policy: SeedPolicy::default(),
            mode: OtpMode::PerSubBlock,
        }
    }

    pub fn with_policy(mut self, policy: SeedPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_mode(mut self, mode: OtpMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn keys(&self) -> &RoundKeySet {
        &self.keys
    }

    pub fn mode(&self) -> OtpMode {
        self.mode
    }

    /// Pads for a block of `n` sub-blocks at `counter`.
    pub fn pads(&self, counter: &CounterTuple, n: usize) -> Result<Vec<Otp>> {
        match self.mode {
            OtpMode::Shared => Ok(vec![ctr_otp(counter, &self.keys); n]),
            OtpMode::PerSubBlock => match self.policy {
                SeedPolicy::PerSession => derive_block_otps(counter, &self.keys, n, self.seed),
                SeedPolicy::PerCounter => {
                    let shared = ctr_otp(counter, &self.keys);
                    let rng = ChaCha8Rng::from_seed(counter_seed(self.seed, counter));
                    Ok(select_with_rng(&self.keys, n, rng)?
                        .into_iter()
                        .map(|k| Otp(shared.0 ^ k.value))
                        .collect())
                }
            },
        }
    }

    pub fn encrypt(&self, plain: &DataBlock, counter: &CounterTuple) -> Result<DataBlock> {
        let pads = self.pads(counter, plain.sub_block_count())?;
        Ok(plain.xor_with(pads.into_iter().map(|p| p.0)))
    }

    pub fn decrypt(&self, cipher: &DataBlock, counter: &CounterTuple) -> Result<DataBlock> {
        self.encrypt(cipher, counter)
    }
}

fn counter_seed(seed: u64, counter: &CounterTuple) -> [u8; 32] {
    let mut out = [0u8; 32];
    out[..8].copy_from_slice(&seed.to_le_bytes());
    out[8..16].copy_from_slice(&counter.pa().to_le_bytes());
    out[16..24].copy_from_slice(&counter.vn().to_le_bytes());
    out
}
