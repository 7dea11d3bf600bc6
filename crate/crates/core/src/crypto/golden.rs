//! Golden test-vector file format.
//!
//! One vector per line, whitespace-separated hex fields:
//!
//! ```text
//! variant initial_key pa vn seed plaintext expected_ciphertext
//! aes128 000102030405060708090a0b0c0d0e0f 0x40 0x1 0x2a 00...00 c3...9e
//! ```
//!
//! `variant` is `aes128`, `aes192` or `aes256`. Blank lines and lines
//! starting with `#` are ignored. Ciphertexts use per-sub-block pads
//! (session seed policy); `pa` must be 16-byte aligned.

use super::aes::{key_expansion, AesVariant};
use super::otp::{encrypt_block, CounterTuple, DataBlock};
use crate::error::{Error, Result};

/// Block alignment assumed for the `pa` field.
pub const GOLDEN_BLOCK_BYTES: u64 = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenVector {
    pub variant: AesVariant,
    pub initial_key: Vec<u8>,
    pub pa: u64,
    pub vn: u64,
    pub seed: u64,
    pub plaintext: Vec<u8>,
    pub ciphertext: Vec<u8>,
}

impl GoldenVector {
    /// Recomputes the ciphertext with the library.
    pub fn compute(&self) -> Result<Vec<u8>> {
        let keys = key_expansion(&self.initial_key, self.variant)?;
        let counter = CounterTuple::new(self.pa, self.vn, GOLDEN_BLOCK_BYTES)?;
        let plain = DataBlock::new(self.plaintext.clone())?;
        Ok(encrypt_block(&plain, &counter, &keys, self.seed)?.as_bytes().to_vec())
    }

    pub fn matches(&self) -> Result<bool> {
        Ok(self.compute()? == self.ciphertext)
    }

    pub fn to_line(&self) -> String {
        format!(
            "{} {} {:#x} {:#x} {:#x} {} {}",
            self.variant.name(),
            hex::encode(&self.initial_key),
            self.pa,
            self.vn,
            self.seed,
            hex::encode(&self.plaintext),
            hex::encode(&self.ciphertext)
        )
    }
}

fn parse_u64(field: &str, line: usize, what: &str) -> Result<u64> {
    let digits = field.strip_prefix("0x").unwrap_or(field);
    u64::from_str_radix(digits, 16).map_err(|e| Error::parse(line, format!("bad {what} `{field}`: {e}")))
}

fn parse_bytes(field: &str, line: usize, what: &str) -> Result<Vec<u8>> {
    hex::decode(field).map_err(|e| Error::parse(line, format!("bad {what} hex: {e}")))
}

/// Parses a whole vector file.
pub fn parse_vectors(text: &str) -> Result<Vec<GoldenVector>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 7 {
            return Err(Error::parse(line, format!("expected 7 fields, found {}", fields.len())));
        }
        let variant: AesVariant = fields[0].parse().map_err(|e: Error| Error::parse(line, e))?;
        out.push(GoldenVector {
            variant,
            initial_key: parse_bytes(fields[1], line, "initial_key")?,
            pa: parse_u64(fields[2], line, "pa")?,
            vn: parse_u64(fields[3], line, "vn")?,
            seed: parse_u64(fields[4], line, "seed")?,
            plaintext: parse_bytes(fields[5], line, "plaintext")?,
            ciphertext: parse_bytes(fields[6], line, "ciphertext")?,
        });
    }
    Ok(out)
}
