mod common;

use proptest::prelude::*;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use secacc_core::crypto::golden::parse_vectors;
use secacc_core::crypto::{
    comb_key_set_size, ctr_otp, decrypt_block, encrypt_block, encrypt_block_shared, key_expansion, recovery_rate,
    seca_attack, select_comb_keys, AesVariant, CounterTuple, DataBlock, OtpEngine,
};

const VARIANTS: [(AesVariant, usize); 3] = [(AesVariant::Aes128, 16), (AesVariant::Aes192, 24), (AesVariant::Aes256, 32)];

fn unhex(s: &str) -> Vec<u8> {
    hex::decode(s).unwrap()
}

#[test]
fn fips197_examples() {
    let plain: [u8; 16] = unhex("00112233445566778899aabbccddeeff").try_into().unwrap();
    let cases = [
        ("000102030405060708090a0b0c0d0e0f", "69c4e0d86a7b0430d8cdb78070b4c55a"),
        ("000102030405060708090a0b0c0d0e0f1011121314151617", "dda97ca4864cdfe06eaf70a0ec0d7191"),
        (
            "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f",
            "8ea2b7ca516745bfeafc49904b496089",
        ),
    ];
    for (key, expected) in cases {
        let key = unhex(key);
        let keys = key_expansion(&key, AesVariant::from_key_len(key.len()).unwrap()).unwrap();
        assert_eq!(keys.encrypt_block(&plain).to_vec(), unhex(expected));
        assert_eq!(common::encrypt(&key, &plain).to_vec(), unhex(expected));
    }
}

#[test]
fn fips197_key_expansion_tails() {
    let cases = [
        ("2b7e151628aed2a6abf7158809cf4f3c", "d014f9a8c9ee2589e13f0cc8b6630ca6"),
        ("8e73b0f7da0e6452c810f32b809079e562f8ead2522c6b7b", "e98ba06f448c773c8ecc720401002202"),
        (
            "603deb1015ca71be2b73aef0857d77811f352c073b6108d72d9810a30914dff4",
            "fe4890d1e6188d0b046df344706c631e",
        ),
    ];
    for (key, last) in cases {
        let key = unhex(key);
        let keys = key_expansion(&key, AesVariant::from_key_len(key.len()).unwrap()).unwrap();
        assert_eq!(keys.round_keys().last().unwrap().to_vec(), unhex(last));
        assert_eq!(common::key_schedule(&key).last().unwrap().to_vec(), unhex(last));
    }
}

#[test]
fn random_vectors_match_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xae5);
    for i in 0..1000 {
        let (variant, len) = VARIANTS[i % 3];
        let mut key = vec![0u8; len];
        rng.fill_bytes(&mut key);
        let mut block = [0u8; 16];
        rng.fill_bytes(&mut block);
        let keys = key_expansion(&key, variant).unwrap();
        assert_eq!(keys.encrypt_block(&block), common::encrypt(&key, &block), "vector {i}");
        let schedule = common::key_schedule(&key);
        assert_eq!(keys.whitening_key(), &schedule[0]);
        assert_eq!(keys.round_keys(), &schedule[1..]);
    }
}

#[test]
fn comb_key_cardinality() {
    let sizes: Vec<u64> = VARIANTS.iter().map(|(v, _)| comb_key_set_size(*v)).collect();
    assert_eq!(sizes, [1024, 4096, 16384]);
    for (v, _) in VARIANTS {
        assert_eq!(comb_key_set_size(v), 1u64 << v.rounds());
    }
}

/// Every non-zero subset fold, mapped back to its mask.
fn subset_folds(round_keys: &[[u8; 16]]) -> std::collections::HashMap<u128, u32> {
    let words: Vec<u128> = round_keys.iter().map(|k| u128::from_be_bytes(*k)).collect();
    (1u32..1 << words.len())
        .map(|mask| {
            let v = (0..words.len()).filter(|i| mask >> i & 1 == 1).fold(0, |a, i| a ^ words[i]);
            (v, mask)
        })
        .collect()
}

#[test]
fn golden_vectors() {
    let text = include_str!("../data/golden/otp_vectors.txt");
    let vectors = parse_vectors(text).unwrap();
    assert!(vectors.len() >= 6);
    for (n, v) in vectors.iter().enumerate() {
        assert!(v.matches().unwrap(), "golden vector {n} drifted");
        // independent check: each pad is the reference CTR pad XOR a
        // distinct non-empty fold of reference round keys
        let schedule = common::key_schedule(&v.initial_key);
        let folds = subset_folds(&schedule[1..]);
        let mut counter = [0u8; 16];
        counter[..8].copy_from_slice(&v.pa.to_be_bytes());
        counter[8..].copy_from_slice(&v.vn.to_be_bytes());
        let shared = u128::from_be_bytes(common::encrypt(&v.initial_key, &counter));
        let mut seen = std::collections::HashSet::new();
        for (p, c) in v.plaintext.chunks(16).zip(v.ciphertext.chunks(16)) {
            let pad = u128::from_be_bytes(p.try_into().unwrap()) ^ u128::from_be_bytes(c.try_into().unwrap());
            let comb = pad ^ shared;
            assert!(folds.contains_key(&comb), "vector {n}: pad is not a round-key fold");
            assert!(seen.insert(comb), "vector {n}: pad reused");
        }
    }
}

#[test]
fn golden_parse_errors_carry_lines() {
    let err = parse_vectors("# header\n\naes128 00 0x0\n").unwrap_err().to_string();
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn ctr_pad_matches_reference() {
    let key = unhex("2b7e151628aed2a6abf7158809cf4f3c");
    let keys = key_expansion(&key, AesVariant::Aes128).unwrap();
    let counter = CounterTuple::new(0x1000, 7, 64).unwrap();
    let mut block = [0u8; 16];
    block[..8].copy_from_slice(&0x1000u64.to_be_bytes());
    block[8..].copy_from_slice(&7u64.to_be_bytes());
    assert_eq!(ctr_otp(&counter, &keys).0, u128::from_be_bytes(common::encrypt(&key, &block)));
    assert!(CounterTuple::new(0x1001, 7, 64).is_err());
    assert!(CounterTuple::with_vn_bits(0, 1 << 56, 64, 56).is_err());
}

fn sparse_block(rng: &mut ChaCha8Rng, subs: usize) -> DataBlock {
    // at least half zero, the rest distinct random words
    let nonzero = rng.gen_range(0..=subs / 2);
    let mut words = vec![0u128; subs];
    for w in words.iter_mut().take(nonzero) {
        *w = rng.gen::<u128>() | 1;
    }
    for i in (1..subs).rev() {
        words.swap(i, rng.gen_range(0..=i));
    }
    DataBlock::from_sub_blocks(&words).unwrap()
}

#[test]
fn seca_separation_thousand_trials() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eca);
    let mut key = [0u8; 16];
    rng.fill_bytes(&mut key);
    let keys = key_expansion(&key, AesVariant::Aes128).unwrap();
    let engine = OtpEngine::new(keys.clone(), 11);
    for trial in 0..1000u64 {
        let subs = [4usize, 8, 32][trial as usize % 3];
        let plain = sparse_block(&mut rng, subs);
        let counter = CounterTuple::new(trial * 512, trial + 1, 512).unwrap();
        let naive = encrypt_block_shared(&plain, &counter, &keys);
        let rec = seca_attack(&[naive], 0).unwrap();
        assert_eq!(recovery_rate(&rec, std::slice::from_ref(&plain)).unwrap(), 1.0, "trial {trial}");
        let defended = engine.encrypt(&plain, &counter).unwrap();
        let rec = seca_attack(&[defended], 0).unwrap();
        let rate = recovery_rate(&rec, std::slice::from_ref(&plain)).unwrap();
        assert!(rate <= 1.0 / subs as f64, "trial {trial}: {rate}");
    }
}

proptest! {
    #[test]
    fn ctr_round_trip(key in prop::collection::vec(any::<u8>(), 16), words in prop::collection::vec(any::<u128>(), 1..9),
                      pa in 0u64..1 << 30, vn in 0u64..1 << 56, seed in any::<u64>()) {
        let keys = key_expansion(&key, AesVariant::Aes128).unwrap();
        let plain = DataBlock::from_sub_blocks(&words).unwrap();
        let counter = CounterTuple::new(pa * 16, vn, 16).unwrap();
        let c = encrypt_block(&plain, &counter, &keys, seed).unwrap();
        prop_assert_eq!(decrypt_block(&c, &counter, &keys, seed).unwrap(), plain.clone());
        let engine = OtpEngine::new(keys, seed);
        prop_assert_eq!(engine.decrypt(&engine.encrypt(&plain, &counter).unwrap(), &counter).unwrap(), plain);
    }

    #[test]
    fn selected_keys_distinct(seed in any::<u64>(), n in 1usize..64) {
        let keys = key_expansion(&[7u8; 32], AesVariant::Aes256).unwrap();
        let picked = select_comb_keys(&keys, n, seed).unwrap();
        prop_assert_eq!(picked.len(), n);
        let masks: std::collections::HashSet<u32> = picked.iter().map(|k| k.mask).collect();
        let values: std::collections::HashSet<u128> = picked.iter().map(|k| k.value).collect();
        prop_assert_eq!(masks.len(), n);
        prop_assert_eq!(values.len(), n);
        prop_assert!(picked.iter().all(|k| k.mask != 0 && k.value != 0));
        prop_assert_eq!(select_comb_keys(&keys, n, seed).unwrap(), picked);
    }
}
