//! Attachment scores, bracket scores and arc recall by length.

mod brackets;
mod dep;

pub use brackets::{score_brackets, BracketScore};
pub use dep::{
    arc_recall_by_length, score_dep, write_recall_csv, DepEvalOptions, DepScore, LengthBucket, RecallRow,
    DEFAULT_PUNCT_TAGS, RECALL_CSV_HEADER,
};

pub(crate) fn percent(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}
