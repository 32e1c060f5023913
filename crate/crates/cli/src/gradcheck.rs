use spaparse::model::{
    corpus_loss, corpus_loss_grad, prepare_corpus, ConstModelConfig, ConstParser, DepModelConfig, DepParser,
    EncoderConfig, Example, Network,
};
use spaparse::nn::gradcheck::{grad_check, GradCheckOptions, GradCheckReport};
use spaparse::nn::{ParamStore, Real, Tensor};
use spaparse::synth::{toy_const_corpus, toy_dep_corpus};
use spaparse::treebank::{build_const_vocab, build_dep_vocab};
use spaparse::{Error, Vocab};

use crate::config::Precision;
use crate::{CliError, CliResult, GradcheckArgs, GradcheckTask};

const DEFAULT_CORRUPTION: f64 = 1.0;

fn tiny_encoder(enc: &mut EncoderConfig) {
    enc.word_dims = 4;
    enc.tag_dims = 3;
    enc.lstm_units = 3;
    enc.dropout = 0.0;
    enc.word_dropout = 0.0;
}

fn cast<A: Real, B: Real>(from: &ParamStore<A>) -> CliResult<ParamStore<B>> {
    let mut to = ParamStore::new();
    for (_, p) in from.iter() {
        let data = p.value.data().iter().map(|v| B::c(v.f64())).collect();
        to.add(p.name.clone(), Tensor::from_vec(p.value.shape(), data)?)?;
    }
    Ok(to)
}

/// Checks the `R` backward pass against central differences taken in
/// 64-bit arithmetic at the same weights, so a 32-bit model is judged on
/// its gradients rather than on round-off in the differences.
fn check_store<R: Real>(
    net: &Network,
    vocab: &Vocab,
    store: &ParamStore<R>,
    examples: &[Example],
    opts: &GradCheckOptions,
) -> CliResult<GradCheckReport> {
    let mut wide: ParamStore<f64> = cast(store)?;
    let mut narrow = store.clone();
    Ok(grad_check(
        &mut wide,
        |s| corpus_loss(net, s, vocab, examples),
        |s| {
            narrow.copy_values_from(&cast(s).map_err(|e| Error::Config(e.message))?)?;
            narrow.zero_grads();
            let loss = corpus_loss_grad(net, &mut narrow, vocab, examples)?;
            for (to, from) in s.iter_mut().zip(narrow.iter()) {
                for (g, v) in to.grad.data_mut().iter_mut().zip(from.1.grad.data()) {
                    *g = v.f64();
                }
            }
            Ok(loss.f64())
        },
        opts,
    )?)
}

fn check_dep<R: Real>(seed: u64, opts: &GradCheckOptions) -> CliResult<GradCheckReport> {
    let trees: Vec<_> = toy_dep_corpus(40, seed)
        .into_iter()
        .filter(|t| t.len() == 5)
        .take(2)
        .collect();
    let mut cfg = DepModelConfig::default();
    tiny_encoder(&mut cfg.encoder);
    cfg.hidden = 5;
    cfg.train.seed = seed;
    let p = DepParser::<R>::new(cfg, build_dep_vocab(&trees, 1)?)?;
    let ex = prepare_corpus(&p, &trees)?.examples;
    check_store(&p.net, &p.vocab, &p.store, &ex, opts)
}

fn check_const<R: Real>(seed: u64, opts: &GradCheckOptions) -> CliResult<GradCheckReport> {
    let trees: Vec<_> = toy_const_corpus(60, seed)
        .into_iter()
        .filter(|t| t.len() == 5)
        .take(2)
        .collect();
    let mut cfg = ConstModelConfig::default();
    tiny_encoder(&mut cfg.encoder);
    cfg.nonterminal_dims = 3;
    cfg.hidden = 6;
    cfg.train.seed = seed;
    let p = ConstParser::<R>::new(cfg, build_const_vocab(&trees, 1)?)?;
    let ex = prepare_corpus(&p, &trees)?.examples;
    check_store(&p.net, &p.vocab, &p.store, &ex, opts)
}

fn parse_corrupt(arg: &str) -> CliResult<(String, f64)> {
    match arg.split_once('=') {
        None => Ok((arg.to_string(), DEFAULT_CORRUPTION)),
        Some((name, delta)) => {
            let delta: f64 = delta
                .parse()
                .map_err(|_| CliError::usage(format!("--corrupt: {delta:?} is not a number")))?;
            Ok((name.to_string(), delta))
        }
    }
}

pub fn run(args: GradcheckArgs) -> CliResult {
    let step = args.step.unwrap_or(1e-5);
    let tolerance = args.tolerance.unwrap_or(match args.precision {
        Precision::F64 => 1e-4,
        Precision::F32 => 1e-2,
    });
    if !(step > 0.0) {
        return Err(CliError::usage("--step must be positive"));
    }
    if !(tolerance > 0.0) {
        return Err(CliError::usage("--tolerance must be positive"));
    }
    if args.coords == 0 {
        return Err(CliError::usage("--coords must be positive"));
    }
    let opts = GradCheckOptions {
        step,
        tolerance,
        coordinates: args.coords,
        seed: args.seed,
        corrupt: args.corrupt.as_deref().map(parse_corrupt).transpose()?,
        ..Default::default()
    };
    let tasks: &[&str] = match args.task {
        GradcheckTask::Dep => &["dep"],
        GradcheckTask::Const => &["const"],
        GradcheckTask::Both => &["dep", "const"],
    };

    let mut failed = Vec::new();
    let mut missing = 0;
    for &task in tasks {
        // a corrupted name only needs to exist in one of the models
        let mut task_opts = opts.clone();
        let run = |o: &GradCheckOptions| match (task, args.precision) {
            ("dep", Precision::F64) => check_dep::<f64>(args.seed, o),
            ("dep", Precision::F32) => check_dep::<f32>(args.seed, o),
            (_, Precision::F64) => check_const::<f64>(args.seed, o),
            (_, Precision::F32) => check_const::<f32>(args.seed, o),
        };
        let report = match run(&task_opts) {
            Err(e) if opts.corrupt.is_some() && tasks.len() > 1 && e.code == 1 => {
                missing += 1;
                task_opts.corrupt = None;
                run(&task_opts)?
            }
            r => r?,
        };
        println!("task={task} precision={}", args.precision);
        print!("{report}");
        println!("max_rel_error={:.3e}", report.max_rel_error);
        if !report.passed() {
            let mut names: Vec<&str> = report.failures.iter().map(|c| c.param.as_str()).collect();
            names.dedup();
            failed.push(format!("{task}: {}", names.join(", ")));
        }
    }
    if missing == tasks.len() {
        let name = &opts.corrupt.as_ref().map(|c| c.0.clone()).unwrap_or_default();
        return Err(CliError::usage(format!("no parameter named {name}")));
    }
    if failed.is_empty() {
        println!("gradient check passed");
        Ok(())
    } else {
        Err(CliError::verification(format!(
            "gradient check failed for {}",
            failed.join("; ")
        )))
    }
}
