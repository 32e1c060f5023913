use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::tree::{ConstNode, ConstTree, DepTree, Sentence};
use crate::error::{Error, Result};

pub const UNK: &str = "<unk>";
pub const NONE: &str = "<none>";

/// A dense string-to-id table. Id 0 is the reserved sentinel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Table {
    items: Vec<String>,
    index: HashMap<String, usize>,
}

impl From<Vec<String>> for Table {
    fn from(items: Vec<String>) -> Self {
        let index = items.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Table { items, index }
    }
}

impl From<Table> for Vec<String> {
    fn from(t: Table) -> Self {
        t.items
    }
}

impl Table {
    fn with_sentinel(sentinel: &str, mut entries: Vec<(String, usize)>) -> Self {
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let mut items = vec![sentinel.to_string()];
        items.extend(entries.into_iter().map(|(s, _)| s));
        Table::from(items)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, s: &str) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Id of `s`, or the sentinel id 0.
    pub fn id(&self, s: &str) -> usize {
        self.get(s).unwrap_or(0)
    }

    pub fn name(&self, id: usize) -> &str {
        &self.items[id]
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }
}

/// Ids for forms, tags, constituent labels and dependency labels.
///
/// Forms and tags reserve id 0 for unknown entries; the two label
/// families reserve id 0 for the empty (`NONE`) value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocab {
    pub forms: Table,
    /// Training frequency of each form id (0 for the unknown form).
    pub form_counts: Vec<usize>,
    pub tags: Table,
    pub nonterminals: Table,
    pub deprels: Table,
    /// Most frequent label of root attachments, used when decoding.
    pub root_label: String,
    /// Forms seen in training but mapped to the unknown form.
    pub rare_forms: usize,
}

impl Vocab {
    pub fn form_id(&self, form: &str) -> usize {
        self.forms.id(form)
    }

    pub fn tag_id(&self, tag: &str) -> usize {
        self.tags.id(tag)
    }

    pub fn form_count(&self, id: usize) -> usize {
        self.form_counts.get(id).copied().unwrap_or(0)
    }

    /// Number of real (non-sentinel) dependency labels.
    pub fn num_deprels(&self) -> usize {
        self.deprels.len() - 1
    }

    /// Number of real (non-sentinel) constituent labels.
    pub fn num_nonterminals(&self) -> usize {
        self.nonterminals.len() - 1
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("vocab serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let vocab: Vocab = serde_json::from_str(text).map_err(|e| Error::model("vocab", e.to_string()))?;
        if vocab.form_counts.len() != vocab.forms.len() {
            return Err(Error::model("vocab", "form counts do not match forms"));
        }
        Ok(vocab)
    }

    pub fn save<W: Write>(&self, mut writer: W) -> Result<()> {
        writer.write_all(self.to_json().as_bytes())?;
        Ok(())
    }

    pub fn load<R: Read>(mut reader: R) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        Vocab::from_json(&text)
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Accumulates counts over a corpus.
#[derive(Default)]
pub struct VocabBuilder {
    forms: HashMap<String, usize>,
    tags: HashMap<String, usize>,
    nonterminals: HashMap<String, usize>,
    deprels: HashMap<String, usize>,
    root_labels: HashMap<String, usize>,
    sentences: usize,
}

impl VocabBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_sentence(&mut self, sentence: &Sentence) {
        self.sentences += 1;
        for t in sentence.tokens() {
            *self.forms.entry(t.form.clone()).or_default() += 1;
            *self.tags.entry(t.tag.clone()).or_default() += 1;
        }
    }

    pub fn add_dep_tree(&mut self, tree: &DepTree) {
        self.add_sentence(tree.sentence());
        for arc in tree.arcs() {
            *self.deprels.entry(arc.label.clone()).or_default() += 1;
        }
        *self.root_labels.entry(tree.label(tree.root()).to_string()).or_default() += 1;
    }

    pub fn add_const_tree(&mut self, tree: &ConstTree) {
        self.add_sentence(&tree.sentence);
        fn labels(node: &ConstNode, out: &mut HashMap<String, usize>) {
            if let ConstNode::Internal { label, children, .. } = node {
                *out.entry(label.clone()).or_default() += 1;
                children.iter().for_each(|c| labels(c, out));
            }
        }
        labels(&tree.root, &mut self.nonterminals);
    }

    /// Forms seen fewer than `min_form_count` times map to the unknown id.
    pub fn build(self, min_form_count: usize) -> Result<Vocab> {
        if self.sentences == 0 {
            return Err(Error::EmptyCorpus("cannot build a vocabulary"));
        }
        let (kept, rare): (Vec<_>, Vec<_>) = self.forms.into_iter().partition(|(_, c)| *c >= min_form_count.max(1));
        let rare_total: usize = rare.iter().map(|(_, c)| c).sum();
        let forms = Table::with_sentinel(UNK, kept.clone());
        let counts: HashMap<String, usize> = kept.into_iter().collect();
        let mut form_counts = vec![rare_total];
        form_counts.extend(forms.items()[1..].iter().map(|f| counts[f]));
        let root_label = self
            .root_labels
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(l, _)| l.clone())
            .unwrap_or_else(|| "root".to_string());
        Ok(Vocab {
            forms,
            form_counts,
            tags: Table::with_sentinel(UNK, self.tags.into_iter().collect()),
            nonterminals: Table::with_sentinel(NONE, self.nonterminals.into_iter().collect()),
            deprels: Table::with_sentinel(NONE, self.deprels.into_iter().collect()),
            root_label,
            rare_forms: rare.len(),
        })
    }
}

pub fn build_vocab<'a>(sentences: impl IntoIterator<Item = &'a Sentence>, min_form_count: usize) -> Result<Vocab> {
    let mut b = VocabBuilder::new();
    sentences.into_iter().for_each(|s| b.add_sentence(s));
    b.build(min_form_count)
}

pub fn build_dep_vocab(trees: &[DepTree], min_form_count: usize) -> Result<Vocab> {
    let mut b = VocabBuilder::new();
    trees.iter().for_each(|t| b.add_dep_tree(t));
    b.build(min_form_count)
}

pub fn build_const_vocab(trees: &[ConstTree], min_form_count: usize) -> Result<Vocab> {
    let mut b = VocabBuilder::new();
    trees.iter().for_each(|t| b.add_const_tree(t));
    b.build(min_form_count)
}
