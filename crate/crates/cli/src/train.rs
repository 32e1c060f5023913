use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use spaparse::model::{save_model_file, train, ConstParser, DepParser, ModelParts};
use spaparse::nn::Real;
use spaparse::treebank::{build_const_vocab, build_dep_vocab};
use spaparse::Vocab;

use crate::config::{read_config_file, ModelConfig, Precision, RunConfig, Source};
use crate::data::{head_rules, read_const_corpus, read_dep_corpus};
use crate::{CliError, CliResult, TrainArgs};

/// Copies the run log to a file and standard output. Wall-clock time
/// goes to standard error only, so logs of identical runs are identical.
struct RunLog {
    file: BufWriter<File>,
    start: Instant,
}

impl Write for RunLog {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.file.write_all(buf)?;
        io::stdout().write_all(buf)?;
        for _ in buf.iter().filter(|&&b| b == b'\n') {
            eprintln!("elapsed={:.2}s", self.start.elapsed().as_secs_f64());
        }
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        self.file.flush()?;
        io::stdout().flush()
    }
}

fn entries(args: &TrainArgs) -> CliResult<Vec<(String, String, Source)>> {
    let mut out: Vec<(String, String, Source)> = match &args.config {
        Some(p) => read_config_file(p)?
            .into_iter()
            .map(|(k, v)| (k, v, Source::File))
            .collect(),
        None => Vec::new(),
    };
    let mut flag = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            out.push((k.to_string(), v, Source::Flag));
        }
    };
    let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
    flag("task", args.task.map(|t| t.to_string()));
    flag("train", path(&args.train));
    flag("dev", path(&args.dev));
    flag("out", path(&args.out));
    flag("head_rules", path(&args.head_rules));
    flag("seed", args.seed.map(|v| v.to_string()));
    flag("epochs", args.epochs.map(|v| v.to_string()));
    flag("layers", args.layers.map(|v| v.to_string()));
    flag("hierarchical", args.hierarchical.map(|v| v.to_string()));
    flag("promote_cap", args.promote_cap.map(|v| v.to_string()));
    flag("precision", args.precision.map(|v| v.to_string()));
    for s in &args.set {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("--set expects KEY=VALUE, got {s:?}")))?;
        out.push((k.trim().to_string(), v.trim().to_string(), Source::Flag));
    }
    Ok(out)
}

fn check_vocab(vocab: &Vocab, labels: usize, what: &str) -> CliResult {
    // the unknown form is always present
    if vocab.forms.len() < 2 {
        return Err(CliError::data(
            "vocabulary too small: no word forms reach the minimum count",
        ));
    }
    if labels == 0 {
        return Err(CliError::data(format!("vocabulary too small: no {what}")));
    }
    Ok(())
}

fn fit<R: Real, P: ModelParts<R>>(
    mut parser: P,
    trees: &[P::Tree],
    dev: &[P::Tree],
    cfg: &RunConfig,
    out: &Path,
    log: &mut RunLog,
) -> CliResult {
    let outcome = train(&mut parser, trees, dev, log)?;
    for (i, reason) in &outcome.skipped {
        eprintln!("skipped training tree {}: {reason}", i + 1);
    }
    let rate = outcome.skipped.len() as f64 / trees.len() as f64;
    if rate > cfg.max_skip_rate {
        log::warn!(
            "{} of {} training trees have no usable oracle ({:.1}%)",
            outcome.skipped.len(),
            trees.len(),
            100.0 * rate
        );
        eprintln!("warning: {:.1}% of training trees were skipped", 100.0 * rate);
    }
    save_model_file(&parser, &out.join("final.model"))?;
    let last = std::mem::replace(parser.store_mut(), outcome.best_params);
    save_model_file(&parser, &out.join("best.model"))?;
    *parser.store_mut() = last;
    writeln!(log, "best_epoch={}", outcome.best_epoch)?;
    Ok(())
}

fn fit_task<R: Real>(cfg: &RunConfig, train_path: &Path, out: &Path, log: &mut RunLog) -> CliResult {
    match &cfg.model {
        ModelConfig::Dep(m) => {
            let trees = read_dep_corpus(train_path)?;
            let dev = cfg.dev.as_deref().map(read_dep_corpus).transpose()?.unwrap_or_default();
            let vocab = build_dep_vocab(&trees, m.train.min_form_count)?;
            check_vocab(&vocab, vocab.num_deprels(), "dependency labels")?;
            vocab.save(File::create(out.join("vocab.json"))?)?;
            let parser = DepParser::<R>::new(m.clone(), vocab)?;
            fit(parser, &trees, &dev, cfg, out, log)
        }
        ModelConfig::Const(m) => {
            let rules = head_rules(cfg.head_rules.as_deref())?;
            let trees = read_const_corpus(train_path, &rules)?;
            let dev = match cfg.dev.as_deref() {
                Some(p) => read_const_corpus(p, &rules)?,
                None => Vec::new(),
            };
            let vocab = build_const_vocab(&trees, m.train.min_form_count)?;
            check_vocab(&vocab, vocab.num_nonterminals(), "constituent labels")?;
            vocab.save(File::create(out.join("vocab.json"))?)?;
            let parser = ConstParser::<R>::new(m.clone(), vocab)?;
            fit(parser, &trees, &dev, cfg, out, log)
        }
    }
}

pub fn run(args: TrainArgs) -> CliResult {
    let cfg = RunConfig::resolve(&entries(&args)?)?;
    let train_path = cfg
        .train
        .clone()
        .ok_or_else(|| CliError::usage("no training treebank; use --train or train= in the config file"))?;
    let out = cfg
        .out
        .clone()
        .ok_or_else(|| CliError::usage("no output directory; use --out or out= in the config file"))?;
    std::fs::create_dir_all(&out).map_err(|e| CliError::data(format!("cannot create {}: {e}", out.display())))?;
    let mut log = RunLog {
        file: BufWriter::new(File::create(out.join("train.log"))?),
        start: Instant::now(),
    };
    for line in cfg.log_lines() {
        writeln!(log, "{line}")?;
    }
    match cfg.precision {
        Precision::F64 => fit_task::<f64>(&cfg, &train_path, &out, &mut log)?,
        Precision::F32 => fit_task::<f32>(&cfg, &train_path, &out, &mut log)?,
    }
    log.flush()?;
    Ok(())
}
