//! What the two parsers share: teacher-forced training, batch parsing and
//! model files.

use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::TrainConfig;
use super::network::{Example, Network};
use crate::error::{Error, Result};
use crate::nn::serialize::{load_into_store, read_container, store_tensors, write_container};
use crate::nn::{Adadelta, ParamStore, Real};
use crate::treebank::{Sentence, Vocab};

pub trait TransitionParser<R: Real>: Sized + Sync {
    type Tree: Clone + Send + Sync;
    /// Task name recorded in model files.
    const KIND: &'static str;

    fn network(&self) -> &Network;
    fn store(&self) -> &ParamStore<R>;
    fn store_mut(&mut self) -> &mut ParamStore<R>;
    fn vocab(&self) -> &Vocab;
    fn train_config(&self) -> &TrainConfig;
    fn sentence(tree: &Self::Tree) -> &Sentence;
    /// Token ids, features and gold decisions along the oracle path.
    fn prepare(&self, tree: &Self::Tree) -> Result<Example>;
    fn parse(&self, sentence: &Sentence) -> Result<Self::Tree>;
    /// Named dev metrics; the first one selects the best epoch.
    fn dev_metrics(gold: &[Self::Tree], pred: &[Self::Tree]) -> Result<Vec<(&'static str, f64)>>;

    /// Parses sentences in parallel. `threads == 0` uses every core.
    /// Output order follows input order.
    fn parse_all(&self, sentences: &[Sentence], threads: usize) -> Result<Vec<Self::Tree>> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| sentences.par_iter().map(|s| self.parse(s)).collect())
    }
}

/// Gold examples of a corpus, with the trees that had no usable oracle
/// path.
pub struct Prepared {
    pub examples: Vec<Example>,
    /// Corpus index and reason of every skipped tree.
    pub skipped: Vec<(usize, String)>,
}

pub fn prepare_corpus<R: Real, P: TransitionParser<R>>(parser: &P, trees: &[P::Tree]) -> Result<Prepared> {
    let mut examples = Vec::with_capacity(trees.len());
    let mut skipped = Vec::new();
    for (i, t) in trees.iter().enumerate() {
        match parser.prepare(t) {
            Ok(e) => examples.push(e),
            Err(e @ Error::NotDerivable(_)) => skipped.push((i, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    Ok(Prepared { examples, skipped })
}

/// Summed loss over examples with dropout off.
pub fn corpus_loss<R: Real>(net: &Network, store: &ParamStore<R>, vocab: &Vocab, examples: &[Example]) -> Result<R> {
    let mut total = R::zero();
    for ex in examples {
        total += net.loss(store, vocab, ex)?;
    }
    Ok(total)
}

/// Loss and accumulated gradient over examples with dropout off.
pub fn corpus_loss_grad<R: Real>(
    net: &Network,
    store: &mut ParamStore<R>,
    vocab: &Vocab,
    examples: &[Example],
) -> Result<R> {
    let mut total = R::zero();
    for ex in examples {
        let (loss, tape) = net.forward(store, vocab, ex, None)?;
        net.backward(store, &tape);
        total += loss;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Training loss summed over the epoch, with dropout on.
    pub loss: f64,
    pub dev: Vec<(&'static str, f64)>,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome<R> {
    pub epochs: Vec<EpochRecord>,
    pub skipped: Vec<(usize, String)>,
    /// Epoch with the best first dev metric, and its parameters. Without a
    /// dev set this is the last epoch.
    pub best_epoch: usize,
    pub best_params: ParamStore<R>,
}

fn clip_gradients<R: Real>(store: &mut ParamStore<R>, max_norm: f64) {
    let norm = store
        .iter()
        .flat_map(|(_, p)| p.grad.data().iter().map(|g| g.f64() * g.f64()))
        .sum::<f64>()
        .sqrt();
    if norm > max_norm {
        let scale = R::c(max_norm / norm);
        for p in store.iter_mut() {
            p.grad.data_mut().iter_mut().for_each(|g| *g *= scale);
        }
    }
}

/// Teacher-forced training with ADADELTA updates after every minibatch.
///
/// Sentences are shuffled each epoch by a generator seeded from the
/// configuration, and processed in a fixed order, so a run is a pure
/// function of its inputs. One `key=value` line per epoch is written to
/// `log`.
pub fn train<R: Real, P: TransitionParser<R>>(
    parser: &mut P,
    train: &[P::Tree],
    dev: &[P::Tree],
    log: &mut dyn Write,
) -> Result<TrainOutcome<R>> {
    let cfg = parser.train_config().clone();
    cfg.validate()?;
    let prepared = prepare_corpus(parser, train)?;
    if prepared.examples.is_empty() {
        return Err(Error::EmptyCorpus("no derivable training trees"));
    }
    writeln!(
        log,
        "train sentences={} skipped={}",
        prepared.examples.len(),
        prepared.skipped.len()
    )?;
    let optimizer = Adadelta::new(cfg.rho, cfg.eps, cfg.l2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let mut order: Vec<usize> = (0..prepared.examples.len()).collect();
    let dev_sentences: Vec<Sentence> = dev.iter().map(|t| P::sentence(t).clone()).collect();
    // the network holds only parameter handles; owning copies let the
    // store be borrowed mutably
    let net = parser.network().clone();
    let vocab = parser.vocab().clone();
    let mut epochs = Vec::new();
    let mut best: Option<(f64, usize, ParamStore<R>)> = None;

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        parser.store_mut().zero_grads();
        for batch in order.chunks(cfg.batch_size) {
            for &i in batch {
                let (loss, tape) = net.forward(parser.store(), &vocab, &prepared.examples[i], Some(&mut rng))?;
                epoch_loss += loss.f64();
                net.backward(parser.store_mut(), &tape);
            }
            if let Some(c) = cfg.clip_norm {
                clip_gradients(parser.store_mut(), c);
            }
            optimizer.step(parser.store_mut())?;
        }
        let dev_scores = if dev.is_empty() {
            Vec::new()
        } else {
            let pred = parser.parse_all(&dev_sentences, 0)?;
            P::dev_metrics(dev, &pred)?
        };
        let score = dev_scores.first().map_or(epoch as f64, |s| s.1);
        let improved = best.as_ref().is_none_or(|b| score > b.0);
        if improved {
            best = Some((score, epoch, parser.store().clone()));
        }
        let mut line = format!("epoch={epoch} loss={epoch_loss:.6}");
        for (k, v) in &dev_scores {
            line.push_str(&format!(" dev_{k}={v:.2}"));
        }
        line.push_str(&format!(" best_epoch={}", best.as_ref().map_or(epoch, |b| b.1)));
        writeln!(log, "{line}")?;
        log::info!("{line}");
        epochs.push(EpochRecord {
            epoch,
            loss: epoch_loss,
            dev: dev_scores,
        });
    }
    let (_, best_epoch, best_params) = best.expect("at least one epoch");
    Ok(TrainOutcome {
        epochs,
        skipped: prepared.skipped,
        best_epoch,
        best_params,
    })
}

/// Serializable parts of a parser, used by [`save_model`] and
/// [`load_model`].
pub trait ModelParts<R: Real>: TransitionParser<R> {
    type Config: Serialize + DeserializeOwned;
    fn config(&self) -> &Self::Config;
    fn build(config: Self::Config, vocab: Vocab) -> Result<Self>;
}

pub fn save_model<R: Real, P: ModelParts<R>, W: Write>(parser: &P, w: W) -> Result<()> {
    let vocab = parser.vocab();
    let meta = json!({
        "kind": P::KIND,
        "config": serde_json::to_value(parser.config()).map_err(|e| Error::model("config", e.to_string()))?,
        "vocab": serde_json::to_value(vocab).map_err(|e| Error::model("vocab", e.to_string()))?,
        "vocab_hash": vocab.hash(),
    });
    write_container(w, meta, &store_tensors(parser.store(), true))
}

/// Task recorded in a model file's header.
pub fn model_kind(meta: &Value) -> Result<&str> {
    meta.get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::model("kind", "missing"))
}

pub fn load_model<R: Real, P: ModelParts<R>, Rd: Read>(r: Rd) -> Result<P> {
    let (header, tensors) = read_container::<R, _>(r)?;
    let meta = header.meta;
    let kind = model_kind(&meta)?;
    if kind != P::KIND {
        return Err(Error::model(
            "kind",
            format!("expected a {} model, found {kind}", P::KIND),
        ));
    }
    let field = |name: &str| meta.get(name).cloned().ok_or_else(|| Error::model(name, "missing"));
    let config: P::Config =
        serde_json::from_value(field("config")?).map_err(|e| Error::model("config", e.to_string()))?;
    let vocab: Vocab = serde_json::from_value(field("vocab")?).map_err(|e| Error::model("vocab", e.to_string()))?;
    let hash = field("vocab_hash")?;
    if hash.as_str() != Some(vocab.hash().as_str()) {
        return Err(Error::model("vocab_hash", "does not match the stored vocabulary"));
    }
    let mut parser = P::build(config, vocab)?;
    load_into_store(parser.store_mut(), tensors)?;
    Ok(parser)
}

pub fn save_model_file<R: Real, P: ModelParts<R>>(parser: &P, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    save_model(parser, std::io::BufWriter::new(f))
}

pub fn load_model_file<R: Real, P: ModelParts<R>>(path: &Path) -> Result<P> {
    let f = std::fs::File::open(path)?;
    load_model(std::io::BufReader::new(f))
}

/// Reads only the header of a model file.
pub fn read_model_header(path: &Path) -> Result<crate::nn::serialize::Header> {
    crate::nn::serialize::read_header(std::io::BufReader::new(std::fs::File::open(path)?))
}
