//! Token embeddings, the bi-directional LSTM over them, and gathering of
//! position vectors into classifier inputs.

use rand::{Rng, RngCore};

use super::config::EncoderConfig;
use crate::error::Result;
use crate::features::SlotFamily;
use crate::nn::embedding::EMBEDDING_INIT;
use crate::nn::params::uniform;
use crate::nn::{add_assign_slice, BiLstm, Dropout, Embedding, EncoderCache, ParamId, ParamStore, Real};
use crate::treebank::{Sentence, Vocab};

#[derive(Clone, Debug, PartialEq)]
pub struct Encoder {
    pub config: EncoderConfig,
    pub words: Embedding,
    pub tags: Option<Embedding>,
    pub lstm: BiLstm,
    /// Learned stand-ins for absent stack and queue positions.
    pub none_stack: ParamId,
    pub none_queue: ParamId,
}

/// Token ids fed to the encoder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenIds {
    pub words: Vec<usize>,
    pub tags: Vec<usize>,
}

impl TokenIds {
    pub fn new(vocab: &Vocab, sentence: &Sentence) -> Self {
        TokenIds {
            words: sentence.tokens().iter().map(|t| vocab.form_id(&t.form)).collect(),
            tags: sentence.tokens().iter().map(|t| vocab.tag_id(&t.tag)).collect(),
        }
    }

    /// Replaces each known word by the unknown id with probability
    /// `alpha / (alpha + count)`.
    pub fn word_dropout<G: Rng + ?Sized>(&self, vocab: &Vocab, alpha: f64, rng: &mut G) -> Self {
        let mut out = self.clone();
        if alpha > 0.0 {
            for w in &mut out.words {
                if *w != 0 {
                    let c = vocab.form_count(*w) as f64;
                    if rng.gen::<f64>() < alpha / (alpha + c) {
                        *w = 0;
                    }
                }
            }
        }
        out
    }
}

/// Encoder outputs for one sentence, with what backpropagation needs.
#[derive(Clone, Debug)]
pub struct Encoded<R> {
    pub outputs: Vec<Vec<R>>,
    ids: TokenIds,
    cache: EncoderCache<R>,
}

impl<R> Encoded<R> {
    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }
}

impl Encoder {
    pub fn new<R: Real, G: Rng + ?Sized>(
        store: &mut ParamStore<R>,
        rng: &mut G,
        config: &EncoderConfig,
        vocab: &Vocab,
    ) -> Result<Self> {
        config.validate()?;
        let words = Embedding::new(store, rng, "embed.word", vocab.forms.len(), config.word_dims)?;
        let tags = if config.use_tags {
            Some(Embedding::new(
                store,
                rng,
                "embed.tag",
                vocab.tags.len(),
                config.tag_dims,
            )?)
        } else {
            None
        };
        let lstm = BiLstm::new(
            store,
            rng,
            "lstm",
            config.input_width(),
            config.lstm_units,
            config.layers,
            config.directions,
        )?;
        let width = lstm.output_width();
        let none_stack = store.add("none.stack", uniform(rng, &[width], EMBEDDING_INIT))?;
        let none_queue = store.add("none.queue", uniform(rng, &[width], EMBEDDING_INIT))?;
        Ok(Encoder {
            config: config.clone(),
            words,
            tags,
            lstm,
            none_stack,
            none_queue,
        })
    }

    pub fn output_width(&self) -> usize {
        self.lstm.output_width()
    }

    /// Runs the encoder once over a sentence. Dropout is active when
    /// `rng` is given.
    pub fn encode<R: Real>(
        &self,
        store: &ParamStore<R>,
        ids: TokenIds,
        rng: Option<&mut dyn RngCore>,
    ) -> Result<Encoded<R>> {
        let xs: Vec<Vec<R>> = ids
            .words
            .iter()
            .zip(&ids.tags)
            .map(|(&w, &t)| {
                let mut x = self.words.lookup(store, w).to_vec();
                if let Some(tags) = &self.tags {
                    x.extend_from_slice(tags.lookup(store, t));
                }
                x
            })
            .collect();
        let dropout = match rng {
            Some(rng) if self.config.dropout > 0.0 => Some((Dropout::new(self.config.dropout)?, rng)),
            _ => None,
        };
        let (outputs, cache) = self.lstm.forward(store, &xs, dropout)?;
        Ok(Encoded { outputs, ids, cache })
    }

    fn none_id(&self, family: SlotFamily) -> ParamId {
        match family {
            SlotFamily::Stack => self.none_stack,
            SlotFamily::Queue => self.none_queue,
        }
    }

    /// Appends the vectors of `positions` to `out`.
    pub fn gather<R: Real>(
        &self,
        store: &ParamStore<R>,
        enc: &Encoded<R>,
        positions: &[Option<usize>],
        families: &[SlotFamily],
        out: &mut Vec<R>,
    ) {
        for (p, &f) in positions.iter().zip(families) {
            match p {
                Some(i) => out.extend_from_slice(&enc.outputs[*i]),
                None => out.extend_from_slice(store.value(self.none_id(f)).data()),
            }
        }
    }

    /// Routes the gradient of a gathered input (a prefix of `dinput`) to
    /// position gradients `douts` and to the NONE vectors.
    pub fn scatter<R: Real>(
        &self,
        store: &mut ParamStore<R>,
        positions: &[Option<usize>],
        families: &[SlotFamily],
        dinput: &[R],
        douts: &mut [Vec<R>],
    ) {
        let w = self.output_width();
        for (k, (p, &f)) in positions.iter().zip(families).enumerate() {
            let g = &dinput[k * w..(k + 1) * w];
            match p {
                Some(i) => add_assign_slice(&mut douts[*i], g),
                None => add_assign_slice(store.grad_mut(self.none_id(f)).data_mut(), g),
            }
        }
    }

    pub fn backward<R: Real>(&self, store: &mut ParamStore<R>, enc: &Encoded<R>, douts: &[Vec<R>]) {
        let dxs = self.lstm.backward(store, &enc.cache, douts);
        let wd = self.config.word_dims;
        for (i, dx) in dxs.iter().enumerate() {
            self.words.backward(store, enc.ids.words[i], &dx[..wd]);
            if let Some(tags) = &self.tags {
                tags.backward(store, enc.ids.tags[i], &dx[wd..]);
            }
        }
    }
}
