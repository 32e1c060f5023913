use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::Directions;
use crate::transition::DEFAULT_PROMOTE_CAP;

/// Word/tag embeddings feeding the stacked bi-directional LSTM.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub word_dims: usize,
    pub tag_dims: usize,
    /// Tag embeddings are part of each token's input.
    pub use_tags: bool,
    /// LSTM units in each direction.
    pub lstm_units: usize,
    pub layers: usize,
    pub directions: Directions,
    /// Dropout on LSTM outputs.
    pub dropout: f64,
    /// During training a word with count `c` is replaced by the unknown
    /// word with probability `α / (α + c)`. Zero disables it.
    pub word_dropout: f64,
}

impl EncoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.word_dims == 0 || self.lstm_units == 0 || (self.use_tags && self.tag_dims == 0) {
            return Err(Error::Config("embedding and LSTM sizes must be positive".into()));
        }
        if !(1..=2).contains(&self.layers) {
            return Err(Error::Config(format!("layers must be 1 or 2, got {}", self.layers)));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Config(format!("dropout {} outside [0, 1)", self.dropout)));
        }
        if self.word_dropout < 0.0 {
            return Err(Error::Config("word dropout must be non-negative".into()));
        }
        Ok(())
    }

    pub fn input_width(&self) -> usize {
        self.word_dims + if self.use_tags { self.tag_dims } else { 0 }
    }

    /// Width of one position vector.
    pub fn output_width(&self) -> usize {
        self.lstm_units * self.directions.count() * self.layers
    }
}

/// Optimization and schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    /// Sentences per update.
    pub batch_size: usize,
    pub rho: f64,
    pub eps: f64,
    pub l2: f64,
    /// Rescale the whole gradient to at most this norm before each update.
    pub clip_norm: Option<f64>,
    pub seed: u64,
    pub min_form_count: usize,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::Config("epochs and batch size must be positive".into()));
        }
        crate::nn::Adadelta::new(self.rho, self.eps, self.l2)?;
        if matches!(self.clip_norm, Some(c) if c <= 0.0) {
            return Err(Error::Config("clip norm must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepModelConfig {
    pub encoder: EncoderConfig,
    /// ReLU units in each decision head.
    pub hidden: usize,
    /// Separate structural and label heads; otherwise one head over all
    /// labeled actions.
    pub hierarchical: bool,
    pub train: TrainConfig,
}

impl Default for DepModelConfig {
    fn default() -> Self {
        DepModelConfig {
            encoder: EncoderConfig {
                word_dims: 50,
                tag_dims: 20,
                use_tags: true,
                lstm_units: 200,
                layers: 2,
                directions: Directions::Both,
                dropout: 0.5,
                word_dropout: 0.25,
            },
            hidden: 200,
            hierarchical: true,
            train: TrainConfig {
                epochs: 10,
                batch_size: 10,
                rho: 0.99,
                eps: 1e-7,
                l2: 0.0,
                clip_norm: None,
                seed: 1,
                min_form_count: 2,
            },
        }
    }
}

impl DepModelConfig {
    pub fn validate(&self) -> Result<()> {
        self.encoder.validate()?;
        self.train.validate()?;
        if self.hidden == 0 {
            return Err(Error::Config("hidden size must be positive".into()));
        }
        Ok(())
    }

    /// Width of the classifier input: three position vectors.
    pub fn head_input_width(&self) -> usize {
        crate::features::DEP_POSITIONS * self.encoder.output_width()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstModelConfig {
    pub encoder: EncoderConfig,
    pub nonterminal_dims: usize,
    pub hidden: usize,
    /// Factor actions into {Shift, Promote, AdjLeft, AdjRight} and a
    /// nonterminal for Promote; otherwise one head over `3 + X` actions.
    pub hierarchical: bool,
    /// Longest run of Promotes on one stack item allowed when decoding.
    pub promote_cap: usize,
    pub train: TrainConfig,
}

impl Default for ConstModelConfig {
    fn default() -> Self {
        ConstModelConfig {
            encoder: EncoderConfig {
                word_dims: 100,
                tag_dims: 100,
                use_tags: true,
                lstm_units: 200,
                layers: 2,
                directions: Directions::Both,
                dropout: 0.5,
                word_dropout: 0.25,
            },
            nonterminal_dims: 100,
            hidden: 1000,
            hierarchical: false,
            promote_cap: DEFAULT_PROMOTE_CAP,
            train: TrainConfig {
                epochs: 10,
                batch_size: 10,
                rho: 0.99,
                eps: 1e-7,
                l2: 1e-8,
                clip_norm: None,
                seed: 1,
                min_form_count: 2,
            },
        }
    }
}

impl ConstModelConfig {
    pub fn validate(&self) -> Result<()> {
        self.encoder.validate()?;
        self.train.validate()?;
        if self.hidden == 0 || self.nonterminal_dims == 0 {
            return Err(Error::Config("hidden and nonterminal sizes must be positive".into()));
        }
        if self.promote_cap == 0 {
            return Err(Error::Config("promote cap must be at least 1".into()));
        }
        Ok(())
    }

    /// Five position vectors and eight label embeddings.
    pub fn head_input_width(&self) -> usize {
        crate::features::CONST_POSITIONS * self.encoder.output_width()
            + crate::features::CONST_LABELS * self.nonterminal_dims
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_widths() {
        let d = DepModelConfig::default();
        assert_eq!(d.head_input_width(), 3 * 2 * 200 * 2);
        let c = ConstModelConfig::default();
        assert_eq!(c.head_input_width(), 5 * 800 + 8 * 100);
        d.validate().unwrap();
        c.validate().unwrap();
    }

    #[test]
    fn layer_range() {
        let mut d = DepModelConfig::default();
        d.encoder.layers = 3;
        assert!(d.validate().is_err());
        d.encoder.layers = 1;
        assert_eq!(d.head_input_width(), 3 * 400);
    }
}
