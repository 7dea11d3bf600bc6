use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use secacc_core::crypto::{
    encrypt_block_shared, key_expansion, seca_attack, AesVariant, CounterTuple, DataBlock, OtpEngine,
};

const KEY: [u8; 16] = *b"0123456789abcdef";

fn block(bytes: usize) -> DataBlock {
    // half the sub-blocks zero, like post-ReLU activations
    let data: Vec<u8> = (0..bytes).map(|i| if (i / 16) % 2 == 0 { 0 } else { i as u8 }).collect();
    DataBlock::new(data).unwrap()
}

fn expansion(c: &mut Criterion) {
    let mut g = c.benchmark_group("key_expansion");
    for variant in [AesVariant::Aes128, AesVariant::Aes192, AesVariant::Aes256] {
        let key = vec![7u8; variant.key_len()];
        g.bench_function(format!("{variant:?}"), |b| b.iter(|| key_expansion(black_box(&key), variant).unwrap()));
    }
    g.finish();
}

fn single_block(c: &mut Criterion) {
    let keys = key_expansion(&KEY, AesVariant::Aes128).unwrap();
    let input = [0x5au8; 16];
    c.bench_function("encrypt_block", |b| b.iter(|| keys.encrypt_block(black_box(&input))));
}

fn otp(c: &mut Criterion) {
    let keys = key_expansion(&KEY, AesVariant::Aes128).unwrap();
    let engine = OtpEngine::new(keys.clone(), 1);
    let mut g = c.benchmark_group("otp");
    for bytes in [64usize, 512] {
        let plain = block(bytes);
        let counter = CounterTuple::new(0x4000, 3, bytes as u64).unwrap();
        g.throughput(Throughput::Bytes(bytes as u64));
        g.bench_with_input(BenchmarkId::new("combination_keys", bytes), &plain, |b, p| {
            b.iter(|| engine.encrypt(black_box(p), &counter).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("shared_pad", bytes), &plain, |b, p| {
            b.iter(|| encrypt_block_shared(black_box(p), &counter, &keys))
        });
    }
    g.finish();
}

fn seca(c: &mut Criterion) {
    let keys = key_expansion(&KEY, AesVariant::Aes128).unwrap();
    let cts: Vec<DataBlock> = (0..256u64)
        .map(|i| encrypt_block_shared(&block(64), &CounterTuple::new(i * 64, 1, 64).unwrap(), &keys))
        .collect();
    c.bench_function("seca_attack_256_blocks", |b| b.iter(|| seca_attack(black_box(&cts), 0).unwrap()));
}

criterion_group!(benches, expansion, single_block, otp, seca);
criterion_main!(benches);
