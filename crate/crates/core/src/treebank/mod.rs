//! Treebank types, readers and writers, head rules and vocabularies.

mod brackets;
mod conll;
mod heads;
mod tree;
mod vocab;

pub use brackets::{normalize_ptb, parse_brackets, read_brackets, write_brackets};
pub use conll::{read_conll, read_conll_sentences, write_conll};
pub use heads::{assign_heads, Direction, HeadRule, HeadRules};
pub use tree::{ConstNode, ConstTree, DepArc, DepTree, Head, Sentence, Token};
pub use vocab::{build_const_vocab, build_dep_vocab, build_vocab, Table, Vocab, VocabBuilder, NONE, UNK};
