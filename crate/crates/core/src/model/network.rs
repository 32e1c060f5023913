//! The scoring network shared by both parsers: encoder, optional
//! constituent-label embeddings, and decision heads.

use rand::{Rng, RngCore};

use super::config::EncoderConfig;
use super::encoder::{Encoded, Encoder, TokenIds};
use super::heads::{ActionSpace, Decision, HeadTape, Heads};
use crate::error::Result;
use crate::features::SlotFamily;
use crate::nn::{Embedding, ParamStore, Real};
use crate::treebank::Vocab;

/// Features of one parser state: sentence positions and label ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepFeatures {
    pub positions: Vec<Option<usize>>,
    pub labels: Vec<usize>,
}

/// A training sentence reduced to what the loss needs: token ids and the
/// features and gold decision of every state on the gold path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Example {
    pub ids: TokenIds,
    pub steps: Vec<(StepFeatures, Decision)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    pub encoder: Encoder,
    pub labels: Option<Embedding>,
    pub heads: Heads,
    pub space: ActionSpace,
    pub families: Vec<SlotFamily>,
}

struct StepTape<R> {
    features: StepFeatures,
    head: HeadTape<R>,
}

/// Forward values of one sentence kept for backpropagation.
pub struct Tape<R> {
    encoded: Encoded<R>,
    steps: Vec<StepTape<R>>,
}

pub struct NetworkShape<'a> {
    pub encoder: &'a EncoderConfig,
    pub families: &'a [SlotFamily],
    /// Rows and width of the label embedding table, if any.
    pub label_table: Option<(usize, usize)>,
    /// Label features per state.
    pub label_slots: usize,
    pub hidden: usize,
    pub hierarchical: bool,
    pub space: ActionSpace,
}

impl Network {
    pub fn new<R: Real, G: Rng + ?Sized>(
        store: &mut ParamStore<R>,
        rng: &mut G,
        vocab: &Vocab,
        shape: NetworkShape<'_>,
    ) -> Result<Self> {
        let encoder = Encoder::new(store, rng, shape.encoder, vocab)?;
        let labels = shape
            .label_table
            .map(|(rows, dims)| Embedding::new(store, rng, "embed.label", rows, dims))
            .transpose()?;
        let input =
            shape.families.len() * encoder.output_width() + shape.label_table.map_or(0, |(_, d)| d) * shape.label_slots;
        let heads = Heads::new(store, rng, input, shape.hidden, &shape.space, shape.hierarchical)?;
        Ok(Network {
            encoder,
            labels,
            heads,
            space: shape.space,
            families: shape.families.to_vec(),
        })
    }

    pub fn input_width(&self) -> usize {
        self.families.len() * self.encoder.output_width()
    }

    pub fn encode<R: Real>(
        &self,
        store: &ParamStore<R>,
        ids: TokenIds,
        rng: Option<&mut dyn RngCore>,
    ) -> Result<Encoded<R>> {
        self.encoder.encode(store, ids, rng)
    }

    fn input<R: Real>(&self, store: &ParamStore<R>, enc: &Encoded<R>, f: &StepFeatures) -> Vec<R> {
        let mut x = Vec::new();
        self.encoder.gather(store, enc, &f.positions, &self.families, &mut x);
        if let Some(table) = &self.labels {
            for &l in &f.labels {
                x.extend_from_slice(table.lookup(store, l));
            }
        }
        x
    }

    pub fn decide<R: Real>(
        &self,
        store: &ParamStore<R>,
        enc: &Encoded<R>,
        f: &StepFeatures,
        legal: &[bool],
    ) -> Result<Decision> {
        let x = self.input(store, enc, f);
        self.heads.decide(store, &self.space, &x, legal)
    }

    /// Summed loss over the gold path of one sentence. Dropout (LSTM
    /// outputs and words) is active when `rng` is given.
    pub fn forward<R: Real>(
        &self,
        store: &ParamStore<R>,
        vocab: &Vocab,
        ex: &Example,
        mut rng: Option<&mut dyn RngCore>,
    ) -> Result<(R, Tape<R>)> {
        let ids = match rng.as_deref_mut() {
            Some(r) => ex.ids.word_dropout(vocab, self.encoder.config.word_dropout, r),
            None => ex.ids.clone(),
        };
        let encoded = self.encode(store, ids, rng)?;
        let mut total = R::zero();
        let mut steps = Vec::with_capacity(ex.steps.len());
        for (f, gold) in &ex.steps {
            let x = self.input(store, &encoded, f);
            let (loss, head) = self.heads.loss(store, &self.space, &x, *gold)?;
            total += loss;
            steps.push(StepTape {
                features: f.clone(),
                head,
            });
        }
        Ok((total, Tape { encoded, steps }))
    }

    /// Accumulates the gradient of the loss recorded in `tape`.
    pub fn backward<R: Real>(&self, store: &mut ParamStore<R>, tape: &Tape<R>) {
        let n = tape.encoded.len();
        let w = self.encoder.output_width();
        let mut douts = vec![vec![R::zero(); w]; n];
        let positions_width = self.input_width();
        for step in &tape.steps {
            let dx = self.heads.backward(store, &step.head);
            self.encoder
                .scatter(store, &step.features.positions, &self.families, &dx, &mut douts);
            if let Some(table) = &self.labels {
                for (k, &l) in step.features.labels.iter().enumerate() {
                    let start = positions_width + k * table.dim;
                    table.backward(store, l, &dx[start..start + table.dim]);
                }
            }
        }
        self.encoder.backward(store, &tape.encoded, &douts);
    }

    /// Loss without gradients and without dropout.
    pub fn loss<R: Real>(&self, store: &ParamStore<R>, vocab: &Vocab, ex: &Example) -> Result<R> {
        Ok(self.forward(store, vocab, ex, None)?.0)
    }
}
