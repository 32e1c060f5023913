//! Numeric core: tensors, parameters, layers, losses and optimization.

pub mod adadelta;
pub mod bilstm;
pub mod dropout;
pub mod embedding;
pub mod gradcheck;
pub mod loss;
pub mod lstm;
pub mod mlp;
pub mod params;
pub mod serialize;
pub mod tensor;

pub use adadelta::Adadelta;
pub use bilstm::{BiLstm, Directions, EncoderCache};
pub use dropout::{apply_mask, dropout, Dropout, Mode};
pub use embedding::Embedding;
pub use gradcheck::{grad_check, GradCheckOptions, GradCheckReport};
pub use loss::{nll_softmax, softmax};
pub use lstm::LstmLayer;
pub use mlp::{Linear, ReluMlp};
pub use params::{ParamId, ParamStore};
pub use tensor::{add_assign as add_assign_slice, Real, Tensor};
