use serde::{Deserialize, Serialize};

use crate::crypto::{key_expansion, AesVariant, DataBlock, RoundKeySet};
use crate::error::{Error, Result};

/// A 64-bit authentication tag. XOR is the aggregation operator; zero is its identity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MacValue(pub u64);

impl std::ops::BitXor for MacValue {
    type Output = MacValue;

    fn bitxor(self, rhs: MacValue) -> MacValue {
        MacValue(self.0 ^ rhs.0)
    }
}

impl std::ops::BitXorAssign for MacValue {
    fn bitxor_assign(&mut self, rhs: MacValue) {
        self.0 ^= rhs.0;
    }
}

impl std::fmt::LowerHex for MacValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::LowerHex::fmt(&self.0, f)
    }
}

/// Positional binding for one authentication block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AuthContext {
    pub pa: u64,
    pub vn: u64,
    pub layer_id: u64,
    pub opt_blk_idx: u64,
}

impl AuthContext {
    pub const ENCODED_LEN: usize = 32;

    /// Big-endian `pa || vn || layer_id || opt_blk_idx`, eight bytes each.
    pub fn encode(&self) -> [u8; Self::ENCODED_LEN] {
        let mut out = [0u8; Self::ENCODED_LEN];
        out[0..8].copy_from_slice(&self.pa.to_be_bytes());
        out[8..16].copy_from_slice(&self.vn.to_be_bytes());
        out[16..24].copy_from_slice(&self.layer_id.to_be_bytes());
        out[24..32].copy_from_slice(&self.opt_blk_idx.to_be_bytes());
        out
    }
}

const DOMAIN_BOUND: u64 = 1;
const DOMAIN_DATA_ONLY: u64 = 0;

/// CBC-MAC over AES-128, truncated to 64 bits.
///
/// The first CBC block encodes the payload length and a domain tag, which
/// makes the message encoding prefix-free across payload sizes and keeps
/// bound and data-only tags apart.
#[derive(Debug, Clone)]
pub struct Authenticator {
    keys: RoundKeySet,
}

impl Authenticator {
    pub fn new(key: &[u8]) -> Result<Self> {
        if key.len() != AesVariant::Aes128.key_len() {
            return Err(Error::invalid(format!(
                "MAC key must be 16 bytes, got {}",
                key.len()
            )));
        }
        Ok(Authenticator {
            keys: key_expansion(key, AesVariant::Aes128)?,
        })
    }

    /// Tag over `data || pa || vn || layer_id || opt_blk_idx`.
    pub fn mac(&self, data: &DataBlock, ctx: &AuthContext) -> MacValue {
        self.cbc_mac(data.as_bytes(), Some(&ctx.encode()), DOMAIN_BOUND)
    }

    /// Tag over the payload alone, with no positional binding.
    pub fn mac_data_only(&self, data: &DataBlock) -> MacValue {
        self.cbc_mac(data.as_bytes(), None, DOMAIN_DATA_ONLY)
    }

    fn cbc_mac(&self, data: &[u8], trailer: Option<&[u8]>, domain: u64) -> MacValue {
        let mut header = [0u8; 16];
        header[..8].copy_from_slice(&(data.len() as u64).to_be_bytes());
        header[8..].copy_from_slice(&domain.to_be_bytes());
        let mut state = self.keys.encrypt_block(&header);
        let trailer = trailer.unwrap_or(&[]);
        for chunk in data.chunks_exact(16).chain(trailer.chunks_exact(16)) {
            for (s, b) in state.iter_mut().zip(chunk) {
                *s ^= b;
            }
            state = self.keys.encrypt_block(&state);
        }
        MacValue(u64::from_be_bytes(state[..8].try_into().expect("8 bytes")))
    }
}

/// One-shot keyed tag over a block and its context.
pub fn auth_mac(data: &DataBlock, ctx: &AuthContext, key: &[u8]) -> Result<MacValue> {
    if data.is_empty() {
        return Err(Error::invalid("cannot authenticate an empty block"));
    }
    Ok(Authenticator::new(key)?.mac(data, ctx))
}

#[cfg(test)]
mod tests {
    use super::*;

    const KEY: [u8; 16] = *b"integrity-key-01";

    fn ctx(idx: u64) -> AuthContext {
        AuthContext {
            pa: 0x1000,
            vn: 4,
            layer_id: 2,
            opt_blk_idx: idx,
        }
    }

    #[test]
    fn deterministic() {
        let d = DataBlock::from_sub_blocks(&[1, 2]).unwrap();
        assert_eq!(auth_mac(&d, &ctx(0), &KEY).unwrap(), auth_mac(&d, &ctx(0), &KEY).unwrap());
    }

    #[test]
    fn index_changes_tag() {
        let d = DataBlock::from_sub_blocks(&[1, 2]).unwrap();
        assert_ne!(auth_mac(&d, &ctx(0), &KEY).unwrap(), auth_mac(&d, &ctx(1), &KEY).unwrap());
    }

    #[test]
    fn bound_and_data_only_differ() {
        let a = Authenticator::new(&KEY).unwrap();
        let d = DataBlock::from_sub_blocks(&[5]).unwrap();
        assert_ne!(a.mac(&d, &ctx(0)), a.mac_data_only(&d));
    }

    #[test]
    fn key_length_checked() {
        assert!(Authenticator::new(&[0u8; 8]).is_err());
    }

    #[test]
    fn context_encoding_order() {
        let bytes = ctx(7).encode();
        assert_eq!(&bytes[0..8], &0x1000u64.to_be_bytes());
        assert_eq!(&bytes[24..32], &7u64.to_be_bytes());
    }
}
