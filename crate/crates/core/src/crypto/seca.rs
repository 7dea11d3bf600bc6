//! Single-element collision attack (SECA) oracle.
//!
//! An observer of ciphertext guesses the most common plaintext sub-block
//! (zero, for sparse DNN tensors), pairs it with the most common ciphertext
//! sub-block, and treats their XOR as the block's pad. That recovers every
//! sub-block when the pad is shared and at most one when pads are unique.

use std::collections::HashMap;

use super::otp::DataBlock;
use crate::error::{Error, Result};

/// What the attacker extracted from one ciphertext block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecaRecovery {
    /// The guessed pad.
    pub otp: u128,
    /// Candidate plaintext sub-blocks.
    pub plaintext: Vec<u128>,
}

impl SecaRecovery {
    /// Per-sub-block correctness against ground truth.
    pub fn correctness(&self, truth: &DataBlock) -> Vec<bool> {
        self.plaintext
            .iter()
            .zip(truth.sub_blocks())
            .map(|(guess, actual)| *guess == actual)
            .collect()
    }

    pub fn recovered_count(&self, truth: &DataBlock) -> usize {
        self.correctness(truth).into_iter().filter(|ok| *ok).count()
    }
}

/// Most frequent sub-block value; ties go to the numerically smallest value.
pub fn most_frequent_sub_block(block: &DataBlock) -> u128 {
    let mut counts: HashMap<u128, usize> = HashMap::new();
    for word in block.sub_blocks() {
        *counts.entry(word).or_default() += 1;
    }
    counts
        .into_iter()
        .max_by(|(va, ca), (vb, cb)| ca.cmp(cb).then(vb.cmp(va)))
        .map(|(v, _)| v)
        .expect("data blocks are never empty")
}

/// Runs the attack on each block independently.
pub fn seca_attack(cipher_blocks: &[DataBlock], assumed_plain: u128) -> Result<Vec<SecaRecovery>> {
    if cipher_blocks.is_empty() {
        return Err(Error::invalid("SECA needs at least one ciphertext block"));
    }
    Ok(cipher_blocks
        .iter()
        .map(|block| {
            let otp = assumed_plain ^ most_frequent_sub_block(block);
            SecaRecovery {
                otp,
                plaintext: block.sub_blocks().map(|c| c ^ otp).collect(),
            }
        })
        .collect())
}

/// Fraction of sub-blocks recovered correctly across all blocks.
pub fn recovery_rate(recoveries: &[SecaRecovery], truths: &[DataBlock]) -> Result<f64> {
    if recoveries.len() != truths.len() {
        return Err(Error::invalid("recovery and ground-truth counts differ"));
    }
    let (hit, total) = recoveries
        .iter()
        .zip(truths)
        .fold((0usize, 0usize), |(h, t), (r, truth)| {
            (h + r.recovered_count(truth), t + truth.sub_block_count())
        });
    if total == 0 {
        return Err(Error::invalid("no sub-blocks to score"));
    }
    Ok(hit as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tie_goes_to_smallest_value() {
        let block = DataBlock::from_sub_blocks(&[9, 4, 9, 4, 7]).unwrap();
        assert_eq!(most_frequent_sub_block(&block), 4);
        let single = DataBlock::from_sub_blocks(&[3, 1, 2]).unwrap();
        assert_eq!(most_frequent_sub_block(&single), 1);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(seca_attack(&[], 0).is_err());
    }

    #[test]
    fn shared_pad_fully_recovered() {
        let pad = 0x1234_5678_9abc_def0_u128 << 3;
        let plain = DataBlock::from_sub_blocks(&[0, 0, 0, 17, 0, 99]).unwrap();
        let cipher =
            DataBlock::from_sub_blocks(&plain.sub_blocks().map(|p| p ^ pad).collect::<Vec<_>>()).unwrap();
        let rec = seca_attack(&[cipher], 0).unwrap();
        assert_eq!(rec[0].otp, pad);
        assert_eq!(recovery_rate(&rec, &[plain]).unwrap(), 1.0);
    }
}
