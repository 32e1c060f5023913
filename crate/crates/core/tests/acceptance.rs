//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run alone with `cargo test -p spaparse --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spaparse::eval::{arc_recall_by_length, score_brackets, score_dep, DepEvalOptions};
use spaparse::model::{
    corpus_loss, corpus_loss_grad, prepare_corpus, save_model, save_model_file, train, ConstModelConfig, ConstParser,
    DepModelConfig, DepParser, TransitionParser,
};
use spaparse::nn::gradcheck::{grad_check, GradCheckOptions, GradCheckReport};
use spaparse::nn::{dropout, Mode};
use spaparse::nn::{nll_softmax, Adadelta, BiLstm, Directions, Dropout, LstmLayer, ParamStore, ReluMlp, Tensor};
use spaparse::synth::{
    random_const_tree, random_projective_tree, toy_const_corpus, toy_dep_corpus, toy_vocabulary_size, ConstShape,
};
use spaparse::transition::{const_oracle, const_replay, dep_oracle, dep_replay, ConstAction};
use spaparse::treebank::{assign_heads, build_const_vocab, build_dep_vocab, parse_brackets, HeadRules};
use spaparse::{DepArc, DepTree, Head, Sentence};

// Pinned tolerances and budgets.
const ORACLE_TREES: usize = 1000;
const ORACLE_BUDGET: Duration = Duration::from_secs(5);
const GRAD_END_TO_END_TOL: f64 = 1e-4;
const GRAD_LAYER_TOL: f64 = 1e-6;
const GRAD_MIN_COORDS: usize = 500;
const GRAD_BUDGET: Duration = Duration::from_secs(60);
const ADADELTA_TOL: f64 = 1e-12;
const OVERFIT_TARGET: f64 = 99.0;
const OVERFIT_SENTENCES: usize = 32;
const OVERFIT_DEP_EPOCHS: usize = 10;
const OVERFIT_CONST_EPOCHS: usize = 20;
const OVERFIT_BUDGET: Duration = Duration::from_secs(120);
const METRIC_TOL: f64 = 0.005;
const DROPOUT_SAMPLES: usize = 1_000_000;
const DROPOUT_REL_TOL: f64 = 0.01;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn dependency_oracle_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let start = Instant::now();
    for k in 0..ORACLE_TREES {
        let n = rng.gen_range(2..=40);
        let t = random_projective_tree(&mut rng, n);
        let actions = dep_oracle(&t).map_err(|e| format!("tree {k}: {e}"))?;
        if actions.len() != 2 * n - 1 {
            return Err(format!("tree {k}: {} actions for n={n}", actions.len()));
        }
        let back = dep_replay(t.sentence(), &actions, "root").map_err(|e| format!("tree {k}: {e}"))?;
        if back != t {
            return Err(format!("tree {k}: replay differs"));
        }
    }
    let took = start.elapsed();
    check(
        took < ORACLE_BUDGET,
        format!(
            "{ORACLE_TREES} trees, 2<=n<=40, all 2n-1 actions, {:.2}s (limit {}s)",
            took.as_secs_f64(),
            ORACLE_BUDGET.as_secs()
        ),
    )
}

fn constituency_oracle_round_trip() -> Outcome {
    let sample = "(S (NP (PRP I)) (VP (VBP like) (NP (NNS sports))))";
    let t = assign_heads(
        &parse_brackets(sample).map_err(|e| e.to_string())?[0],
        &HeadRules::english(),
    );
    let pro = |x: &str| ConstAction::Promote(x.into());
    use ConstAction::*;
    let expected = vec![
        Shift,
        pro("NP"),
        Shift,
        pro("VP"),
        Shift,
        pro("NP"),
        AdjRight,
        pro("S"),
        AdjLeft,
    ];
    let got = const_oracle(&t).map_err(|e| e.to_string())?;
    if got != expected {
        return Err(format!("sample sentence gave {got:?}"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2025);
    let start = Instant::now();
    for k in 0..ORACLE_TREES {
        let n = rng.gen_range(2..=30);
        let t = random_const_tree(&mut rng, n, ConstShape::default());
        let actions = const_oracle(&t).map_err(|e| format!("tree {k}: {e}"))?;
        let back = const_replay(&t.sentence, &actions).map_err(|e| format!("tree {k}: {e}"))?;
        if back != t {
            return Err(format!("tree {k}: replay differs"));
        }
    }
    let took = start.elapsed();
    check(
        took < ORACLE_BUDGET,
        format!(
            "sample sentence gives the 9-action sequence; {ORACLE_TREES} trees, k<=5, unary<=3, 2<=n<=30, {:.2}s (limit {}s)",
            took.as_secs_f64(),
            ORACLE_BUDGET.as_secs()
        ),
    )
}

fn vecs(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

fn layer_checks() -> Result<Vec<(&'static str, GradCheckReport)>, String> {
    let opts = GradCheckOptions {
        tolerance: GRAD_LAYER_TOL,
        coordinates: 300,
        ..Default::default()
    };
    let mut out = Vec::new();
    let e = |e: spaparse::Error| e.to_string();

    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut store = ParamStore::<f64>::new();
    let lstm = LstmLayer::new(&mut store, &mut rng, "l", 3, 4).map_err(e)?;
    let xs = vecs(&mut rng, 5, 3);
    let ts = vecs(&mut rng, 5, 4);
    let loss = |s: &ParamStore<f64>| {
        let c = lstm.forward_seq(s, &xs, false)?;
        Ok(c.outputs
            .iter()
            .zip(&ts)
            .map(|(h, t)| h.iter().zip(t).map(|(a, b)| a * b).sum::<f64>())
            .sum())
    };
    let r = grad_check(
        &mut store,
        loss,
        |s| {
            let c = lstm.forward_seq(s, &xs, false)?;
            let v = loss(s)?;
            lstm.backward_seq(s, &c, &ts);
            Ok(v)
        },
        &opts,
    )
    .map_err(e)?;
    out.push(("lstm", r));

    let mut store = ParamStore::<f64>::new();
    let enc = BiLstm::new(&mut store, &mut rng, "enc", 3, 3, 2, Directions::Both).map_err(e)?;
    let xs = vecs(&mut rng, 4, 3);
    let ts = vecs(&mut rng, 4, enc.output_width());
    let run = |s: &ParamStore<f64>| {
        let mut masks = ChaCha8Rng::seed_from_u64(7);
        enc.forward(s, &xs, Some((Dropout::new(0.3)?, &mut masks)))
    };
    let loss = |s: &ParamStore<f64>| {
        let (o, _) = run(s)?;
        Ok(o.iter()
            .zip(&ts)
            .map(|(h, t)| h.iter().zip(t).map(|(a, b)| a * b).sum::<f64>())
            .sum())
    };
    let r = grad_check(
        &mut store,
        loss,
        |s| {
            let (_, c) = run(s)?;
            let v = loss(s)?;
            enc.backward(s, &c, &ts);
            Ok(v)
        },
        &opts,
    )
    .map_err(e)?;
    out.push(("bilstm", r));

    let mut store = ParamStore::<f64>::new();
    let mlp = ReluMlp::new(&mut store, &mut rng, "m", 6, 8, 4).map_err(e)?;
    let x = vecs(&mut rng, 1, 6).remove(0);
    let r = grad_check(
        &mut store,
        |s| Ok(nll_softmax(&mlp.forward(s, &x)?.0, 1).0),
        |s| {
            let (scores, c) = mlp.forward(s, &x)?;
            let (v, d) = nll_softmax(&scores, 1);
            mlp.backward(s, &c, &d);
            Ok(v)
        },
        &opts,
    )
    .map_err(e)?;
    out.push(("mlp+softmax", r));
    Ok(out)
}

fn end_to_end_checks() -> Result<Vec<(&'static str, GradCheckReport)>, String> {
    let opts = GradCheckOptions {
        tolerance: GRAD_END_TO_END_TOL,
        coordinates: GRAD_MIN_COORDS,
        ..Default::default()
    };
    let e = |e: spaparse::Error| e.to_string();
    let mut out = Vec::new();

    let trees: Vec<_> = toy_dep_corpus(40, 3)
        .into_iter()
        .filter(|t| t.len() == 5)
        .take(2)
        .collect();
    let mut cfg = DepModelConfig::default();
    cfg.encoder.word_dims = 4;
    cfg.encoder.tag_dims = 3;
    cfg.encoder.lstm_units = 3;
    cfg.encoder.dropout = 0.0;
    cfg.encoder.word_dropout = 0.0;
    cfg.hidden = 5;
    let mut p = DepParser::<f64>::new(cfg, build_dep_vocab(&trees, 1).map_err(e)?).map_err(e)?;
    let ex = prepare_corpus(&p, &trees).map_err(e)?.examples;
    let (net, vocab) = (p.net.clone(), p.vocab.clone());
    let r = grad_check(
        &mut p.store,
        |s| corpus_loss(&net, s, &vocab, &ex),
        |s| corpus_loss_grad(&net, s, &vocab, &ex),
        &opts,
    )
    .map_err(e)?;
    out.push(("dependency", r));

    let trees: Vec<_> = toy_const_corpus(60, 3)
        .into_iter()
        .filter(|t| t.len() == 5)
        .take(2)
        .collect();
    let mut cfg = ConstModelConfig::default();
    cfg.encoder.word_dims = 4;
    cfg.encoder.tag_dims = 3;
    cfg.encoder.lstm_units = 3;
    cfg.encoder.dropout = 0.0;
    cfg.encoder.word_dropout = 0.0;
    cfg.nonterminal_dims = 3;
    cfg.hidden = 6;
    let mut p = ConstParser::<f64>::new(cfg, build_const_vocab(&trees, 1).map_err(e)?).map_err(e)?;
    let ex = prepare_corpus(&p, &trees).map_err(e)?.examples;
    let (net, vocab) = (p.net.clone(), p.vocab.clone());
    let r = grad_check(
        &mut p.store,
        |s| corpus_loss(&net, s, &vocab, &ex),
        |s| corpus_loss_grad(&net, s, &vocab, &ex),
        &opts,
    )
    .map_err(e)?;
    out.push(("constituency", r));
    Ok(out)
}

fn gradient_correctness() -> Outcome {
    let start = Instant::now();
    let layers = layer_checks()?;
    let models = end_to_end_checks()?;
    let took = start.elapsed();
    let mut ok = took < GRAD_BUDGET;
    let mut parts = Vec::new();
    for (name, r) in &layers {
        ok &= r.passed();
        parts.push(format!("{name} max_rel={:.1e}", r.max_rel_error));
    }
    for (name, r) in &models {
        let covered = r.per_param.iter().all(|q| q.checked > 0);
        ok &= r.passed() && r.checked >= GRAD_MIN_COORDS && covered;
        parts.push(format!(
            "{name} max_rel={:.1e} coords={} all_tensors={covered}",
            r.max_rel_error, r.checked
        ));
    }
    check(
        ok,
        format!(
            "layers<{GRAD_LAYER_TOL:e}, models<{GRAD_END_TO_END_TOL:e}: {}; {:.1}s (limit {}s)",
            parts.join(", "),
            took.as_secs_f64(),
            GRAD_BUDGET.as_secs()
        ),
    )
}

fn adadelta_trace() -> Outcome {
    // ρ = 0.99, ε = 1e-7, g = 1 at both steps, computed by hand:
    // step 1: E[g²] = 0.01, Δx = -√(1e-7) / √(0.0100001)
    // step 2: E[g²] = 0.0199, E[Δx²] = 0.01 Δx₁², Δx = -√(E[Δx²] + 1e-7) / √(0.0199001)
    const D1: f64 = -0.003_162_261_848_898_662_9;
    const D2: f64 = -0.003_170_197_233_968_066_2;
    let mut store = ParamStore::<f64>::new();
    let id = store.add("x", Tensor::zeros(&[1])).map_err(|e| e.to_string())?;
    let opt = Adadelta::new(0.99, 1e-7, 0.0).map_err(|e| e.to_string())?;
    let mut xs = Vec::new();
    for _ in 0..2 {
        store.grad_mut(id).data_mut()[0] = 1.0;
        opt.step(&mut store).map_err(|e| e.to_string())?;
        xs.push(store.value(id).data()[0]);
    }
    let e1 = (xs[0] - D1).abs();
    let e2 = (xs[1] - (D1 + D2)).abs();
    check(
        e1 <= ADADELTA_TOL && e2 <= ADADELTA_TOL,
        format!(
            "step1 dx={:.10e} (err {e1:.1e}), step2 x={:.10e} (err {e2:.1e}), tol {ADADELTA_TOL:e}",
            xs[0], xs[1]
        ),
    )
}

fn overfit_dep() -> Result<(f64, f64), String> {
    let e = |e: spaparse::Error| e.to_string();
    let trees = toy_dep_corpus(OVERFIT_SENTENCES, 1);
    let mut cfg = DepModelConfig::default();
    cfg.encoder.lstm_units = 32;
    cfg.hidden = 32;
    cfg.encoder.dropout = 0.0;
    cfg.train.batch_size = 1;
    cfg.train.epochs = OVERFIT_DEP_EPOCHS;
    let mut p = DepParser::<f64>::new(cfg, build_dep_vocab(&trees, 1).map_err(e)?).map_err(e)?;
    let start = Instant::now();
    train(&mut p, &trees, &[], &mut std::io::sink()).map_err(e)?;
    let secs = start.elapsed().as_secs_f64();
    let sentences: Vec<Sentence> = trees.iter().map(|t| t.sentence().clone()).collect();
    let pred = p.parse_all(&sentences, 1).map_err(e)?;
    let score = score_dep(&trees, &pred, &DepEvalOptions::with_punct(false)).map_err(e)?;
    Ok((score.uas(), secs))
}

fn overfit_const() -> Result<(f64, bool, f64), String> {
    let e = |e: spaparse::Error| e.to_string();
    let trees = toy_const_corpus(OVERFIT_SENTENCES, 1);
    let mut cfg = ConstModelConfig::default();
    cfg.encoder.lstm_units = 32;
    cfg.hidden = 32;
    cfg.encoder.dropout = 0.0;
    cfg.train.batch_size = 1;
    cfg.train.epochs = OVERFIT_CONST_EPOCHS;
    let mut p = ConstParser::<f64>::new(cfg, build_const_vocab(&trees, 1).map_err(e)?).map_err(e)?;
    let start = Instant::now();
    train(&mut p, &trees, &[], &mut std::io::sink()).map_err(e)?;
    let secs = start.elapsed().as_secs_f64();
    let sentences: Vec<Sentence> = trees.iter().map(|t| t.sentence.clone()).collect();
    let pred = p.parse_all(&sentences, 1).map_err(e)?;
    let score = score_brackets(&trees, &pred, false).map_err(e)?;
    Ok((score.f1(), pred[0] == trees[0], secs))
}

fn overfit_capability() -> Outcome {
    let (uas, dep_secs) = overfit_dep()?;
    let (f1, first_exact, const_secs) = overfit_const()?;
    let budget = OVERFIT_BUDGET.as_secs_f64();
    check(
        uas >= OVERFIT_TARGET && f1 >= OVERFIT_TARGET && first_exact && dep_secs < budget && const_secs < budget,
        format!(
            "vocab {} words, LSTM 32, hidden 32: train UAS {uas:.2} after {OVERFIT_DEP_EPOCHS} epochs ({dep_secs:.1}s), \
             train bracket F1 {f1:.2} after {OVERFIT_CONST_EPOCHS} epochs ({const_secs:.1}s), first tree exact={first_exact}; \
             target >= {OVERFIT_TARGET}, limit {budget}s each",
            toy_vocabulary_size()
        ),
    )
}

fn train_bytes(seed: u64, dir: &std::path::Path, tag: &str) -> Result<(Vec<u8>, Vec<u8>), String> {
    let e = |e: spaparse::Error| e.to_string();
    let trees = toy_dep_corpus(16, 8);
    let dev = toy_dep_corpus(6, 9);
    let mut cfg = DepModelConfig::default();
    cfg.encoder.word_dims = 8;
    cfg.encoder.tag_dims = 4;
    cfg.encoder.lstm_units = 8;
    cfg.hidden = 8;
    cfg.train.epochs = 3;
    cfg.train.batch_size = 4;
    cfg.train.seed = seed;
    let mut p = DepParser::<f64>::new(cfg, build_dep_vocab(&trees, 1).map_err(e)?).map_err(e)?;
    let mut log = Vec::new();
    train(&mut p, &trees, &dev, &mut log).map_err(e)?;
    let path = dir.join(format!("{tag}.model"));
    save_model_file(&p, &path).map_err(e)?;
    let model = std::fs::read(&path).map_err(|e| e.to_string())?;
    Ok((log, model))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = train_bytes(5, dir.path(), "a")?;
    let b = train_bytes(5, dir.path(), "b")?;
    let c = train_bytes(6, dir.path(), "c")?;

    // the constituency parser goes through the same training loop
    let e = |e: spaparse::Error| e.to_string();
    let ctrees = toy_const_corpus(12, 8);
    let mut const_bytes = Vec::new();
    for _ in 0..2 {
        let mut cfg = ConstModelConfig::default();
        cfg.encoder.word_dims = 8;
        cfg.encoder.tag_dims = 4;
        cfg.encoder.lstm_units = 8;
        cfg.nonterminal_dims = 4;
        cfg.hidden = 8;
        cfg.train.epochs = 2;
        let mut p = ConstParser::<f64>::new(cfg, build_const_vocab(&ctrees, 1).map_err(e)?).map_err(e)?;
        let mut log = Vec::new();
        train(&mut p, &ctrees, &ctrees, &mut log).map_err(e)?;
        save_model(&p, &mut log).map_err(e)?;
        const_bytes.push(log);
    }
    check(
        a == b && a.1 != c.1 && const_bytes[0] == const_bytes[1],
        format!(
            "same seed: logs identical={} models identical={} ({} bytes); other seed differs={}; constituency identical={}",
            a.0 == b.0,
            a.1 == b.1,
            a.1.len(),
            a.1 != c.1,
            const_bytes[0] == const_bytes[1]
        ),
    )
}

fn metric_oracles() -> Outcome {
    let e = |e: spaparse::Error| e.to_string();
    let s = Sentence::from_pairs(&[("I", "PRP"), ("like", "VBP"), ("sports", "NNS")]).map_err(e)?;
    let arc = |h: Option<usize>, l: &str| DepArc {
        head: h.map_or(Head::Root, Head::Word),
        label: l.to_string(),
    };
    let gold = DepTree::new(
        s.clone(),
        vec![arc(Some(1), "nsubj"), arc(None, "root"), arc(Some(1), "dobj")],
    )
    .map_err(e)?;
    let pred = DepTree::new(s, vec![arc(Some(1), "nsubj"), arc(None, "root"), arc(Some(0), "dobj")]).map_err(e)?;
    let d = score_dep(
        std::slice::from_ref(&gold),
        std::slice::from_ref(&pred),
        &DepEvalOptions::with_punct(false),
    )
    .map_err(e)?;

    let g = parse_brackets("(S (NP (PRP I)) (VP (VBP like) (NP (NNS sports))))").map_err(e)?;
    let p = parse_brackets("(S (NP (PRP I)) (VP (VBP like) (NNS sports)))").map_err(e)?;
    // sentence-level root bracket excluded, inner NP missing
    let b = score_brackets(&g, &p, true).map_err(e)?;

    let rows = arc_recall_by_length(&[gold], &[pred], 8).map_err(e)?;
    let recovered: usize = rows.iter().map(|r| r.correct).sum();
    let weighted: f64 = rows.iter().map(|r| r.gold as f64 * r.recall()).sum();

    let near = |a: f64, b: f64| (a - b).abs() <= METRIC_TOL;
    check(
        near(d.uas(), 66.67)
            && near(d.las(), 66.67)
            && near(b.precision(), 100.0)
            && near(b.recall(), 66.67)
            && near(b.f1(), 80.0)
            && recovered == d.correct_head
            && (weighted - d.correct_head as f64).abs() < 1e-9,
        format!(
            "UAS {:.2} LAS {:.2}; brackets P {:.2} R {:.2} F1 {:.2}; recall-by-length sum {recovered} = correct arcs {} (tol {METRIC_TOL})",
            d.uas(),
            d.las(),
            b.precision(),
            b.recall(),
            b.f1(),
            d.correct_head
        ),
    )
}

fn dropout_expectation() -> Outcome {
    let x = [1.0f64, -2.0, 0.5, 3.0];
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst: f64 = 0.0;
    for p in [0.25, 0.5] {
        let mut sum = [0.0f64; 4];
        for _ in 0..DROPOUT_SAMPLES {
            let y = dropout(&x, p, Mode::Train, &mut rng).map_err(|e| e.to_string())?;
            for (s, v) in sum.iter_mut().zip(&y) {
                *s += v;
            }
        }
        for (s, v) in sum.iter().zip(&x) {
            worst = worst.max((s / DROPOUT_SAMPLES as f64 - v).abs() / v.abs());
        }
    }
    let eval = dropout(&x, 0.5, Mode::Eval, &mut rng).map_err(|e| e.to_string())?;
    check(
        worst < DROPOUT_REL_TOL && eval == x,
        format!(
            "p in {{0.25, 0.5}}, {DROPOUT_SAMPLES} samples: worst relative mean error {:.3}% (limit {}%); eval identity={}",
            worst * 100.0,
            DROPOUT_REL_TOL * 100.0,
            eval == x
        ),
    )
}

fn ablation_switches() -> Outcome {
    let e = |e: spaparse::Error| e.to_string();
    let dep_trees = toy_dep_corpus(12, 10);
    let const_trees = toy_const_corpus(12, 10);
    let mut runs = 0;
    for layers in [1, 2] {
        for hierarchical in [true, false] {
            for use_tags in [true, false] {
                let mut d = DepModelConfig::default();
                d.encoder.word_dims = 8;
                d.encoder.tag_dims = 4;
                d.encoder.lstm_units = 8;
                d.hidden = 8;
                d.encoder.layers = layers;
                d.encoder.use_tags = use_tags;
                d.hierarchical = hierarchical;
                d.train.epochs = 2;
                let mut p = DepParser::<f64>::new(d, build_dep_vocab(&dep_trees, 1).map_err(e)?).map_err(e)?;
                train(&mut p, &dep_trees, &dep_trees, &mut std::io::sink()).map_err(e)?;

                let mut c = ConstModelConfig::default();
                c.encoder.word_dims = 8;
                c.encoder.tag_dims = 4;
                c.encoder.lstm_units = 8;
                c.nonterminal_dims = 4;
                c.hidden = 8;
                c.encoder.layers = layers;
                c.encoder.use_tags = use_tags;
                c.hierarchical = hierarchical;
                c.train.epochs = 2;
                let mut q = ConstParser::<f64>::new(c, build_const_vocab(&const_trees, 1).map_err(e)?).map_err(e)?;
                train(&mut q, &const_trees, &const_trees, &mut std::io::sink()).map_err(e)?;
                runs += 2;
            }
        }
    }
    for directions in [Directions::ForwardOnly, Directions::BackwardOnly] {
        let mut d = DepModelConfig::default();
        d.encoder.word_dims = 8;
        d.encoder.lstm_units = 8;
        d.hidden = 8;
        d.encoder.directions = directions;
        d.train.epochs = 1;
        let mut p = DepParser::<f64>::new(d, build_dep_vocab(&dep_trees, 1).map_err(e)?).map_err(e)?;
        train(&mut p, &dep_trees, &dep_trees, &mut std::io::sink()).map_err(e)?;
        runs += 1;
    }
    Ok(format!(
        "{runs} trainings: layers {{1,2}} x hierarchical/flat x tags on/off for both parsers, plus one-directional encoders"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("dependency oracle round-trip", dependency_oracle_round_trip),
        ("constituency oracle round-trip", constituency_oracle_round_trip),
        ("gradient correctness", gradient_correctness),
        ("ADADELTA trace", adadelta_trace),
        ("overfit capability", overfit_capability),
        ("determinism", determinism),
        ("metric oracles", metric_oracles),
        ("dropout expectation", dropout_expectation),
        ("ablation switches", ablation_switches),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{status} {}. {name}: {detail}", i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
