//! Runs the adversary oracles against the mechanisms a scheme configures.

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{PadMode, SchemeConfig, SchemeKind};
use crate::auth::{layer_mac, repa_attack, verify_layer_with, AuthContext, Authenticator, MacValue, RepaVerdict, Verdict, XorMode};
use crate::crypto::{
    ctr_otp, encrypt_block_shared, key_expansion, recovery_rate, seca_attack, AesVariant, CounterTuple, DataBlock,
    OtpEngine, SUB_BLOCK_BYTES,
};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adversary {
    Tamper,
    Replay,
    Repa,
    Seca,
}

impl Adversary {
    pub const ALL: [Adversary; 4] = [Adversary::Tamper, Adversary::Replay, Adversary::Repa, Adversary::Seca];
}

/// `Defended`: the integrity check fired, or for SECA, the pad guess failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecurityVerdict {
    Defended,
    Vulnerable,
}

impl SecurityVerdict {
    fn from_detected(detected: bool) -> Self {
        if detected {
            SecurityVerdict::Defended
        } else {
            SecurityVerdict::Vulnerable
        }
    }
}

const BLOCKS: usize = 8;
const BLOCK_BYTES: usize = 64;
const LAYER: u64 = 1;
const VN_NOW: u64 = 2;

struct Fixture {
    auth: Authenticator,
    aes_key: [u8; 16],
    seed: u64,
    victim: usize,
    other: usize,
    /// Current contents.
    blocks: Vec<(DataBlock, AuthContext)>,
    /// Contents of the victim block one write earlier.
    stale: DataBlock,
}

fn sparse_block(rng: &mut ChaCha8Rng) -> DataBlock {
    let n = BLOCK_BYTES / SUB_BLOCK_BYTES;
    let mut words = vec![0u128; n];
    // at most one nonzero word keeps the block majority-zero
    let i = rng.gen_range(0..n);
    words[i] = u128::from(rng.next_u64()) << 64 | u128::from(rng.next_u64()) | 1;
    DataBlock::from_sub_blocks(&words).expect("non-empty")
}

impl Fixture {
    fn new(seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut mac_key = [0u8; 16];
        let mut aes_key = [0u8; 16];
        rng.fill_bytes(&mut mac_key);
        rng.fill_bytes(&mut aes_key);
        let blocks = (0..BLOCKS)
            .map(|i| {
                let ctx = AuthContext {
                    pa: (i * BLOCK_BYTES) as u64,
                    vn: VN_NOW,
                    layer_id: LAYER,
                    opt_blk_idx: i as u64,
                };
                (sparse_block(&mut rng), ctx)
            })
            .collect();
        let victim = rng.gen_range(0..BLOCKS);
        let other = (victim + rng.gen_range(1..BLOCKS)) % BLOCKS;
        let mut stale = sparse_block(&mut rng);
        stale.as_bytes_mut()[0] ^= 0x80;
        Ok(Fixture {
            auth: Authenticator::new(&mac_key)?,
            aes_key,
            seed,
            victim,
            other,
            blocks,
            stale,
        })
    }

    fn tag(&self, data: &DataBlock, ctx: &AuthContext, bind: bool) -> MacValue {
        if bind {
            self.auth.mac(data, ctx)
        } else {
            self.auth.mac_data_only(data)
        }
    }
}

/// Per-block MACs stored next to their blocks off chip. The verifier
/// recomputes each tag from its trusted view of (PA, VN, layer, index).
fn per_block_detects(fx: &Fixture, bind: bool, adversary: Adversary) -> bool {
    let stored: Vec<(DataBlock, MacValue)> = fx.blocks.iter().map(|(d, c)| (d.clone(), fx.tag(d, c, bind))).collect();
    let mut memory = stored.clone();
    match adversary {
        Adversary::Tamper => memory[fx.victim].0.as_bytes_mut()[5] ^= 0x01,
        Adversary::Replay => {
            let mut old_ctx = fx.blocks[fx.victim].1;
            old_ctx.vn -= 1;
            memory[fx.victim] = (fx.stale.clone(), fx.tag(&fx.stale, &old_ctx, bind));
        }
        Adversary::Repa => memory.swap(fx.victim, fx.other),
        Adversary::Seca => unreachable!("SECA is not an integrity attack"),
    }
    memory
        .iter()
        .zip(&fx.blocks)
        .any(|((data, tag), (_, ctx))| fx.tag(data, ctx, bind) != *tag)
}

/// One layer MAC held on chip over XOR-aggregated block tags.
fn layer_xor_detects(fx: &Fixture, bind: bool, adversary: Adversary) -> Result<bool> {
    if adversary == Adversary::Repa {
        let mode = if bind { XorMode::Defended } else { XorMode::NaiveXor };
        let mut key = [0u8; 16];
        ChaCha8Rng::seed_from_u64(fx.seed ^ 0x5eed).fill_bytes(&mut key);
        let out = repa_attack(&fx.blocks, mode, (fx.victim, fx.other), &key)?;
        return Ok(out.verdict == RepaVerdict::AttackDetected);
    }
    let mut memory = fx.blocks.clone();
    match adversary {
        Adversary::Tamper => memory[fx.victim].0.as_bytes_mut()[5] ^= 0x01,
        Adversary::Replay => memory[fx.victim].0 = fx.stale.clone(),
        _ => unreachable!(),
    }
    if bind {
        let stored = layer_mac(&fx.blocks, &fx.auth)?;
        Ok(verify_layer_with(&memory, &stored, &fx.auth)? == Verdict::Fail)
    } else {
        let fold = |bs: &[(DataBlock, AuthContext)]| {
            bs.iter().fold(MacValue::default(), |acc, (d, _)| acc ^ fx.auth.mac_data_only(d))
        };
        Ok(fold(&fx.blocks) != fold(&memory))
    }
}

fn encrypt_for_scheme(fx: &Fixture, cfg: &SchemeConfig) -> Result<Vec<DataBlock>> {
    let keys = key_expansion(&fx.aes_key, AesVariant::Aes128)?;
    let g = BLOCK_BYTES as u64;
    fx.blocks
        .iter()
        .map(|(plain, ctx)| {
            let counter = CounterTuple::with_vn_bits(ctx.pa, ctx.vn, g, cfg.vn_bits)?;
            Ok(match cfg.pad_mode {
                PadMode::None => plain.clone(),
                PadMode::SharedPad => encrypt_block_shared(plain, &counter, &keys),
                PadMode::SubBlockCounter => {
                    let words = plain
                        .sub_blocks()
                        .enumerate()
                        .map(|(i, w)| {
                            let sub = CounterTuple::with_vn_bits(
                                ctx.pa + (i * SUB_BLOCK_BYTES) as u64,
                                ctx.vn,
                                SUB_BLOCK_BYTES as u64,
                                cfg.vn_bits,
                            )?;
                            Ok(w ^ ctr_otp(&sub, &keys).0)
                        })
                        .collect::<Result<Vec<u128>>>()?;
                    DataBlock::from_sub_blocks(&words)?
                }
                PadMode::CombinationKeys => OtpEngine::new(keys.clone(), fx.seed).encrypt(plain, &counter)?,
            })
        })
        .collect()
}

fn seca_defended(fx: &Fixture, cfg: &SchemeConfig) -> Result<bool> {
    let cipher = encrypt_for_scheme(fx, cfg)?;
    let truths: Vec<DataBlock> = fx.blocks.iter().map(|(d, _)| d.clone()).collect();
    let rate = recovery_rate(&seca_attack(&cipher, 0)?, &truths)?;
    Ok(rate <= 1.0 / (BLOCK_BYTES / SUB_BLOCK_BYTES) as f64)
}

/// Outcome of one adversary against `cfg` on a fixture drawn from `seed`.
pub fn check_adversary(cfg: &SchemeConfig, adversary: Adversary, seed: u64) -> Result<SecurityVerdict> {
    cfg.validate()?;
    let fx = Fixture::new(seed)?;
    let defended = match (adversary, cfg.kind) {
        (Adversary::Seca, _) => seca_defended(&fx, cfg)?,
        (_, SchemeKind::Baseline) => false,
        (_, SchemeKind::SgxLike | SchemeKind::MgxLike) => per_block_detects(&fx, cfg.bind_position, adversary),
        (_, SchemeKind::Proposed) => layer_xor_detects(&fx, cfg.bind_position, adversary)?,
    };
    Ok(SecurityVerdict::from_detected(defended))
}

/// Verdicts for every adversary.
pub fn verify_scheme_security(cfg: &SchemeConfig, seed: u64) -> Result<BTreeMap<Adversary, SecurityVerdict>> {
    Adversary::ALL
        .iter()
        .map(|a| Ok((*a, check_adversary(cfg, *a, seed)?)))
        .collect()
}
