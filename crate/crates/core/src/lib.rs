//! Greedy transition-based parsers scored from bi-directional LSTM
//! position features.
//!
//! Two parsers share one encoder design: an arc-standard dependency parser
//! that looks at three sentence positions, and a shift-promote-adjoin
//! constituency parser that looks at five positions and eight constituent
//! labels. Everything numeric, from the LSTM to the optimizer, lives in
//! [`nn`].

pub mod error;
pub mod eval;
pub mod features;
pub mod model;
pub mod nn;
pub mod synth;
pub mod transition;
pub mod treebank;

pub use error::{Error, Result};
pub use treebank::{ConstNode, ConstTree, DepArc, DepTree, Head, Sentence, Token, Vocab};
