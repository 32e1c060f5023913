use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spaparse::model::{prepare_corpus, ConstModelConfig, ConstParser, DepModelConfig, DepParser, TransitionParser};
use spaparse::nn::{BiLstm, Directions, ParamStore};
use spaparse::synth::{random_const_tree, random_projective_tree, toy_const_corpus, toy_dep_corpus, ConstShape};
use spaparse::transition::{const_oracle, dep_oracle};
use spaparse::treebank::{build_const_vocab, build_dep_vocab};

const SENTENCE_LEN: usize = 25;

fn oracles(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let dep: Vec<_> = (0..100)
        .map(|_| random_projective_tree(&mut rng, SENTENCE_LEN))
        .collect();
    let cons: Vec<_> = (0..100)
        .map(|_| random_const_tree(&mut rng, SENTENCE_LEN, ConstShape::default()))
        .collect();
    c.bench_function("dep_oracle/100x25", |b| {
        b.iter(|| {
            dep.iter()
                .map(|t| dep_oracle(black_box(t)).unwrap().len())
                .sum::<usize>()
        })
    });
    c.bench_function("const_oracle/100x25", |b| {
        b.iter(|| {
            cons.iter()
                .map(|t| const_oracle(black_box(t)).unwrap().len())
                .sum::<usize>()
        })
    });
}

fn lstm_forward(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut store = ParamStore::<f64>::new();
    let lstm = BiLstm::new(&mut store, &mut rng, "lstm", 132, 200, 2, Directions::Both).unwrap();
    let xs: Vec<Vec<f64>> = (0..SENTENCE_LEN)
        .map(|_| (0..132).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    c.bench_function("bilstm_forward/2x200/25", |b| {
        b.iter(|| lstm.forward(&store, black_box(&xs), None).unwrap())
    });
}

fn parsing(c: &mut Criterion) {
    let trees = toy_dep_corpus(200, 3);
    let dep = DepParser::<f64>::new(DepModelConfig::default(), build_dep_vocab(&trees, 1).unwrap()).unwrap();
    let sentences: Vec<_> = trees.iter().take(50).map(|t| t.sentence().clone()).collect();
    c.bench_function("dep_parse/50_toy", |b| {
        b.iter(|| dep.parse_all(black_box(&sentences), 1).unwrap())
    });

    let trees = toy_const_corpus(200, 3);
    let cons = ConstParser::<f64>::new(ConstModelConfig::default(), build_const_vocab(&trees, 1).unwrap()).unwrap();
    let sentences: Vec<_> = trees.iter().take(50).map(|t| t.sentence.clone()).collect();
    c.bench_function("const_parse/50_toy", |b| {
        b.iter(|| cons.parse_all(black_box(&sentences), 1).unwrap())
    });
}

fn training_step(c: &mut Criterion) {
    let trees = toy_dep_corpus(50, 4);
    let mut cfg = DepModelConfig::default();
    cfg.encoder.dropout = 0.0;
    let parser = DepParser::<f64>::new(cfg, build_dep_vocab(&trees, 1).unwrap()).unwrap();
    let examples = prepare_corpus(&parser, &trees).unwrap().examples;
    let net = parser.net.clone();
    c.bench_function("dep_forward_backward/toy_sentence", |b| {
        b.iter_batched(
            || parser.store.clone(),
            |mut store| {
                let (loss, tape) = net.forward(&store, &parser.vocab, &examples[0], None).unwrap();
                net.backward(&mut store, &tape);
                loss
            },
            BatchSize::LargeInput,
        )
    });
}

criterion_group!(benches, oracles, lstm_forward, parsing, training_step);
criterion_main!(benches);
