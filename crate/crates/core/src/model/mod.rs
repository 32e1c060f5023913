//! Trainable parsers: encoder, feature gathering, classifier heads,
//! greedy decoding, training and model files.

mod config;
mod constituency;
mod dep;
mod encoder;
mod heads;
mod network;
mod parser;

pub use config::{ConstModelConfig, DepModelConfig, EncoderConfig, TrainConfig};
pub use constituency::ConstParser;
pub use dep::DepParser;
pub use encoder::{Encoded, Encoder, TokenIds};
pub use heads::{greedy_flat, greedy_hierarchical, ActionSpace, Decision, HeadTape, Heads};
pub use network::{Example, Network, NetworkShape, StepFeatures, Tape};
pub use parser::{
    corpus_loss, corpus_loss_grad, load_model, load_model_file, model_kind, prepare_corpus, read_model_header,
    save_model, save_model_file, train, EpochRecord, ModelParts, Prepared, TrainOutcome, TransitionParser,
};

use crate::error::Result;
use crate::nn::Real;
use crate::treebank::Vocab;

impl<R: Real> ModelParts<R> for DepParser<R> {
    type Config = DepModelConfig;

    fn config(&self) -> &DepModelConfig {
        &self.config
    }

    fn build(config: DepModelConfig, vocab: Vocab) -> Result<Self> {
        DepParser::new(config, vocab)
    }
}

impl<R: Real> ModelParts<R> for ConstParser<R> {
    type Config = ConstModelConfig;

    fn config(&self) -> &ConstModelConfig {
        &self.config
    }

    fn build(config: ConstModelConfig, vocab: Vocab) -> Result<Self> {
        ConstParser::new(config, vocab)
    }
}
