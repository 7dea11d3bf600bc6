//! Reference AES block cipher with an exposed key schedule.
//!
//! Byte-oriented and free of T-tables. Only the forward direction is
//! implemented: counter mode never runs the inverse cipher.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 128-bit AES block in FIPS-197 input byte order.
pub type Block = [u8; 16];

const SBOX: [u8; 256] = build_sbox();

/// Builds the S-box from multiplicative inverses in GF(2^8) followed by the
/// affine map, walking the field with generator 3.
const fn build_sbox() -> [u8; 256] {
    let mut sbox = [0u8; 256];
    let mut p: u8 = 1;
    let mut q: u8 = 1;
    loop {
        // p <- p * 3
        p = p ^ (p << 1) ^ if p & 0x80 != 0 { 0x1b } else { 0 };
        // q <- q / 3
        q ^= q << 1;
        q ^= q << 2;
        q ^= q << 4;
        if q & 0x80 != 0 {
            q ^= 0x09;
        }
        let affine = q ^ q.rotate_left(1) ^ q.rotate_left(2) ^ q.rotate_left(3) ^ q.rotate_left(4);
        sbox[p as usize] = affine ^ 0x63;
        if p == 1 {
            break;
        }
    }
    sbox[0] = 0x63;
    sbox
}

const RCON: [u8; 10] = [0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1b, 0x36];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AesVariant {
    Aes128,
    Aes192,
    Aes256,
}

impl AesVariant {
    pub const ALL: [AesVariant; 3] = [AesVariant::Aes128, AesVariant::Aes192, AesVariant::Aes256];

    /// Initial key length in bytes.
    pub const fn key_len(self) -> usize {
        match self {
            AesVariant::Aes128 => 16,
            AesVariant::Aes192 => 24,
            AesVariant::Aes256 => 32,
        }
    }

    /// Number of cipher rounds, which is also the number of per-round keys
    /// following the initial whitening key.
    pub const fn rounds(self) -> usize {
        match self {
            AesVariant::Aes128 => 10,
            AesVariant::Aes192 => 12,
            AesVariant::Aes256 => 14,
        }
    }

    pub fn from_key_len(len: usize) -> Result<Self> {
        match len {
            16 => Ok(AesVariant::Aes128),
            24 => Ok(AesVariant::Aes192),
            32 => Ok(AesVariant::Aes256),
            other => Err(Error::invalid(format!(
                "AES key must be 16, 24 or 32 bytes, got {other}"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AesVariant::Aes128 => "aes128",
            AesVariant::Aes192 => "aes192",
            AesVariant::Aes256 => "aes256",
        }
    }
}

impl std::str::FromStr for AesVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "aes128" => Ok(AesVariant::Aes128),
            "aes192" => Ok(AesVariant::Aes192),
            "aes256" => Ok(AesVariant::Aes256),
            _ => Err(Error::invalid(format!("unknown AES variant `{s}`"))),
        }
    }
}

/// The expanded key schedule.
///
/// Holds `rounds + 1` 128-bit words internally. [`RoundKeySet::round_keys`]
/// exposes the `rounds` per-round keys (round 1 onward); the round-0
/// whitening key is the initial key prefix and is kept separately.
#[derive(Clone, PartialEq, Eq)]
pub struct RoundKeySet {
    variant: AesVariant,
    schedule: Vec<Block>,
}

impl std::fmt::Debug for RoundKeySet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // Key material stays out of logs.
        f.debug_struct("RoundKeySet")
            .field("variant", &self.variant)
            .finish_non_exhaustive()
    }
}

impl RoundKeySet {
    pub fn variant(&self) -> AesVariant {
        self.variant
    }

    /// Per-round keys, `round_keys()[0]` being the round-1 key.
    pub fn round_keys(&self) -> &[Block] {
        &self.schedule[1..]
    }

    pub fn whitening_key(&self) -> &Block {
        &self.schedule[0]
    }

    /// Per-round key `i` as a big-endian integer.
    pub fn round_key_word(&self, i: usize) -> u128 {
        u128::from_be_bytes(self.round_keys()[i])
    }

    /// Encrypts one block (ECB primitive).
    pub fn encrypt_block(&self, input: &Block) -> Block {
        let mut state = *input;
        xor_into(&mut state, &self.schedule[0]);
        let last = self.variant.rounds();
        for round in 1..=last {
            sub_bytes(&mut state);
            shift_rows(&mut state);
            if round != last {
                mix_columns(&mut state);
            }
            xor_into(&mut state, &self.schedule[round]);
        }
        state
    }
}

/// Expands `initial_key` into the standard AES key schedule.
pub fn key_expansion(initial_key: &[u8], variant: AesVariant) -> Result<RoundKeySet> {
    if initial_key.len() != variant.key_len() {
        return Err(Error::invalid(format!(
            "{} expects a {}-byte key, got {} bytes",
            variant.name(),
            variant.key_len(),
            initial_key.len()
        )));
    }
    let nk = variant.key_len() / 4;
    let total = 4 * (variant.rounds() + 1);
    let mut words: Vec<[u8; 4]> = Vec::with_capacity(total);
    for chunk in initial_key.chunks_exact(4) {
        words.push([chunk[0], chunk[1], chunk[2], chunk[3]]);
    }
    for i in nk..total {
        let mut temp = words[i - 1];
        if i % nk == 0 {
            temp.rotate_left(1);
            temp = temp.map(|b| SBOX[b as usize]);
            temp[0] ^= RCON[i / nk - 1];
        } else if nk > 6 && i % nk == 4 {
            temp = temp.map(|b| SBOX[b as usize]);
        }
        let prev = words[i - nk];
        words.push([
            prev[0] ^ temp[0],
            prev[1] ^ temp[1],
            prev[2] ^ temp[2],
            prev[3] ^ temp[3],
        ]);
    }
    let schedule = words
        .chunks_exact(4)
        .map(|w| {
            let mut block = [0u8; 16];
            for (col, word) in w.iter().enumerate() {
                block[4 * col..4 * col + 4].copy_from_slice(word);
            }
            block
        })
        .collect();
    Ok(RoundKeySet { variant, schedule })
}

fn xor_into(state: &mut Block, key: &Block) {
    for (s, k) in state.iter_mut().zip(key) {
        *s ^= k;
    }
}

fn sub_bytes(state: &mut Block) {
    for b in state.iter_mut() {
        *b = SBOX[*b as usize];
    }
}

// State byte i sits at row i % 4, column i / 4.
fn shift_rows(state: &mut Block) {
    let old = *state;
    for col in 0..4 {
        for row in 1..4 {
            state[row + 4 * col] = old[row + 4 * ((col + row) % 4)];
        }
    }
}

fn xtime(b: u8) -> u8 {
    (b << 1) ^ if b & 0x80 != 0 { 0x1b } else { 0 }
}

fn mix_columns(state: &mut Block) {
    for col in state.chunks_exact_mut(4) {
        let [a0, a1, a2, a3] = [col[0], col[1], col[2], col[3]];
        let all = a0 ^ a1 ^ a2 ^ a3;
        col[0] = a0 ^ all ^ xtime(a0 ^ a1);
        col[1] = a1 ^ all ^ xtime(a1 ^ a2);
        col[2] = a2 ^ all ^ xtime(a2 ^ a3);
        col[3] = a3 ^ all ^ xtime(a3 ^ a0);
    }
}
