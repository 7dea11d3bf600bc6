//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use aes::cipher::{BlockEncrypt, KeyInit};

/// GF(2^8) multiply, shift-and-add.
pub fn gf_mul(mut a: u8, mut b: u8) -> u8 {
    let mut p = 0;
    while b != 0 {
        if b & 1 != 0 {
            p ^= a;
        }
        let hi = a & 0x80;
        a <<= 1;
        if hi != 0 {
            a ^= 0x1b;
        }
        b >>= 1;
    }
    p
}

/// S-box from a brute-force inverse search and the FIPS-197 affine map.
pub fn sbox() -> [u8; 256] {
    let mut s = [0u8; 256];
    for x in 0..=255u8 {
        let inv = if x == 0 {
            0
        } else {
            (1..=255u8).find(|y| gf_mul(x, *y) == 1).unwrap()
        };
        let mut out = 0x63u8;
        for i in 0..8 {
            let bit = (inv >> i) ^ (inv >> ((i + 4) % 8)) ^ (inv >> ((i + 5) % 8)) ^ (inv >> ((i + 6) % 8)) ^ (inv >> ((i + 7) % 8));
            out ^= (bit & 1) << i;
        }
        s[x as usize] = out;
    }
    s
}

/// FIPS-197 word-oriented key expansion; returns all `rounds + 1` round keys.
pub fn key_schedule(key: &[u8]) -> Vec<[u8; 16]> {
    let s = sbox();
    let nk = key.len() / 4;
    let nr = nk + 6;
    let mut w: Vec<[u8; 4]> = key.chunks(4).map(|c| [c[0], c[1], c[2], c[3]]).collect();
    let mut rcon = 1u8;
    for i in nk..4 * (nr + 1) {
        let mut t = w[i - 1];
        if i % nk == 0 {
            t = [s[t[1] as usize] ^ rcon, s[t[2] as usize], s[t[3] as usize], s[t[0] as usize]];
            rcon = gf_mul(rcon, 2);
        } else if nk > 6 && i % nk == 4 {
            t = t.map(|b| s[b as usize]);
        }
        let prev = w[i - nk];
        w.push([prev[0] ^ t[0], prev[1] ^ t[1], prev[2] ^ t[2], prev[3] ^ t[3]]);
    }
    w.chunks(4)
        .map(|c| {
            let mut k = [0u8; 16];
            for (j, word) in c.iter().enumerate() {
                k[4 * j..4 * j + 4].copy_from_slice(word);
            }
            k
        })
        .collect()
}

/// ECB encryption of one block by the RustCrypto `aes` crate.
pub fn encrypt(key: &[u8], block: &[u8; 16]) -> [u8; 16] {
    let mut b = aes::Block::clone_from_slice(block);
    match key.len() {
        16 => aes::Aes128::new_from_slice(key).unwrap().encrypt_block(&mut b),
        24 => aes::Aes192::new_from_slice(key).unwrap().encrypt_block(&mut b),
        32 => aes::Aes256::new_from_slice(key).unwrap().encrypt_block(&mut b),
        n => panic!("bad key length {n}"),
    }
    b.into()
}

/// One axis as (length, tile, step, lead).
pub type Axis = (u64, u64, u64, u64);

/// Tile boundaries clipped to the axis, from the raw grid definition.
pub fn cuts(axis: Axis) -> Vec<u64> {
    let (length, tile, step, lead) = axis;
    let mut out = vec![0, length];
    let mut start = -(lead as i64);
    while start < length as i64 {
        for edge in [start, start + tile as i64] {
            out.push(edge.clamp(0, length as i64) as u64);
        }
        if start + tile as i64 >= length as i64 {
            break;
        }
        start += step as i64;
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Largest block length dividing every segment between merged cut points.
pub fn cut_point_block(a: Axis, b: Axis) -> u64 {
    let mut all = cuts(a);
    all.extend(cuts(b));
    all.sort_unstable();
    all.dedup();
    all.windows(2).fold(0, |g, w| gcd(g, w[1] - w[0]))
}
