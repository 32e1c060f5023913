use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub form: String,
    pub tag: String,
}

impl Token {
    pub fn new(form: impl Into<String>, tag: impl Into<String>) -> Self {
        Token {
            form: form.into(),
            tag: tag.into(),
        }
    }
}

/// A non-empty sequence of tagged tokens.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sentence {
    tokens: Vec<Token>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::Config("a sentence needs at least one token".into()));
        }
        if let Some(t) = tokens.iter().find(|t| t.form.is_empty() || t.tag.is_empty()) {
            return Err(Error::Config(format!(
                "token with empty form or tag: {:?}/{:?}",
                t.form, t.tag
            )));
        }
        Ok(Sentence { tokens })
    }

    /// Convenience constructor from `(form, tag)` pairs.
    pub fn from_pairs<S: AsRef<str>>(pairs: &[(S, S)]) -> Result<Self> {
        Sentence::new(pairs.iter().map(|(f, t)| Token::new(f.as_ref(), t.as_ref())).collect())
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn token(&self, i: usize) -> &Token {
        &self.tokens[i]
    }

    pub fn reversed(&self) -> Sentence {
        let mut tokens = self.tokens.clone();
        tokens.reverse();
        Sentence { tokens }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Head {
    Root,
    Word(usize),
}

impl Head {
    pub fn word(self) -> Option<usize> {
        match self {
            Head::Root => None,
            Head::Word(i) => Some(i),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DepArc {
    pub head: Head,
    pub label: String,
}

/// A labeled dependency tree. `arcs[d]` is the incoming arc of token `d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DepTree {
    sentence: Sentence,
    arcs: Vec<DepArc>,
}

impl DepTree {
    /// Builds a tree, checking that it is single-rooted, acyclic and that
    /// every head addresses a token of the sentence.
    pub fn new(sentence: Sentence, arcs: Vec<DepArc>) -> Result<Self> {
        let n = sentence.len();
        if arcs.len() != n {
            return Err(Error::Config(format!(
                "{} arcs for a sentence of {} tokens",
                arcs.len(),
                n
            )));
        }
        let mut roots = 0;
        for (d, arc) in arcs.iter().enumerate() {
            match arc.head {
                Head::Root => roots += 1,
                Head::Word(h) if h >= n => return Err(Error::Config(format!("head {h} of token {d} out of range"))),
                Head::Word(h) if h == d => return Err(Error::Config(format!("token {d} is its own head (cycle)"))),
                Head::Word(_) => {}
            }
        }
        if roots != 1 {
            return Err(Error::Config(format!("expected exactly one root, found {roots}")));
        }
        if let Some(d) = find_cycle(&arcs) {
            return Err(Error::Config(format!("cycle through token {d}")));
        }
        Ok(DepTree { sentence, arcs })
    }

    pub fn sentence(&self) -> &Sentence {
        &self.sentence
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn arcs(&self) -> &[DepArc] {
        &self.arcs
    }

    pub fn head(&self, dependent: usize) -> Head {
        self.arcs[dependent].head
    }

    pub fn label(&self, dependent: usize) -> &str {
        &self.arcs[dependent].label
    }

    pub fn root(&self) -> usize {
        self.arcs
            .iter()
            .position(|a| a.head == Head::Root)
            .expect("validated tree has a root")
    }

    /// Number of dependents of every token.
    pub fn child_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.len()];
        for arc in &self.arcs {
            if let Head::Word(h) = arc.head {
                counts[h] += 1;
            }
        }
        counts
    }

    /// True when every arc dominates the words it spans, with the artificial
    /// root to the left of the sentence. These are exactly the trees the
    /// arc-standard system can derive.
    pub fn is_projective(&self) -> bool {
        let n = self.len();
        for d in 0..n {
            let Head::Word(h) = self.arcs[d].head else {
                continue;
            };
            let (lo, hi) = if h < d { (h, d) } else { (d, h) };
            for k in lo + 1..hi {
                if !self.dominates(h, k) {
                    return false;
                }
            }
        }
        true
    }

    fn dominates(&self, ancestor: usize, mut node: usize) -> bool {
        loop {
            if node == ancestor {
                return true;
            }
            match self.arcs[node].head {
                Head::Root => return false,
                Head::Word(h) => node = h,
            }
        }
    }
}

fn find_cycle(arcs: &[DepArc]) -> Option<usize> {
    // 0 = unvisited, 1 = on current path, 2 = known to reach the root
    let mut state = vec![0u8; arcs.len()];
    for start in 0..arcs.len() {
        let mut path = Vec::new();
        let mut node = start;
        loop {
            match state[node] {
                2 => break,
                1 => return Some(node),
                _ => {}
            }
            state[node] = 1;
            path.push(node);
            match arcs[node].head {
                Head::Root => break,
                Head::Word(h) => node = h,
            }
        }
        for p in path {
            state[p] = 2;
        }
    }
    None
}

/// A constituent. Preterminals are not nodes: a leaf carries the index of
/// its token and the part-of-speech tag lives on the token.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConstNode {
    Leaf(usize),
    Internal {
        label: String,
        children: Vec<ConstNode>,
        /// Position of the head child within `children`.
        head: Option<usize>,
    },
}

impl ConstNode {
    pub fn internal(label: impl Into<String>, children: Vec<ConstNode>, head: Option<usize>) -> Self {
        ConstNode::Internal {
            label: label.into(),
            children,
            head,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, ConstNode::Leaf(_))
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            ConstNode::Leaf(_) => None,
            ConstNode::Internal { label, .. } => Some(label),
        }
    }

    /// Half-open span of token indices covered by this node.
    pub fn span(&self) -> (usize, usize) {
        match self {
            ConstNode::Leaf(i) => (*i, *i + 1),
            ConstNode::Internal { children, .. } => {
                let first = children.first().expect("internal node has children").span();
                let last = children.last().expect("internal node has children").span();
                (first.0, last.1)
            }
        }
    }

    /// Token index of the lexical head, following head-child annotations.
    /// Returns `None` if any node on the head path is unannotated.
    pub fn head_word(&self) -> Option<usize> {
        match self {
            ConstNode::Leaf(i) => Some(*i),
            ConstNode::Internal { children, head, .. } => children.get((*head)?)?.head_word(),
        }
    }

    pub fn internal_count(&self) -> usize {
        match self {
            ConstNode::Leaf(_) => 0,
            ConstNode::Internal { children, .. } => 1 + children.iter().map(ConstNode::internal_count).sum::<usize>(),
        }
    }

    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            ConstNode::Leaf(i) => out.push(*i),
            ConstNode::Internal { children, .. } => {
                children.iter().for_each(|c| c.collect_leaves(out));
            }
        }
    }

    /// Every `(label, start, end)` constituent, root first, in pre-order.
    pub fn brackets(&self) -> Vec<(String, usize, usize)> {
        let mut out = Vec::new();
        self.collect_brackets(&mut out);
        out
    }

    fn collect_brackets(&self, out: &mut Vec<(String, usize, usize)>) {
        if let ConstNode::Internal { label, children, .. } = self {
            let (s, e) = self.span();
            out.push((label.clone(), s, e));
            children.iter().for_each(|c| c.collect_brackets(out));
        }
    }
}

/// A constituency tree over a sentence. The root is always internal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConstTree {
    pub sentence: Sentence,
    pub root: ConstNode,
}

impl ConstTree {
    /// Checks that leaves cover `0..n` left to right exactly once and
    /// that every internal node has children and a valid head index.
    pub fn new(sentence: Sentence, root: ConstNode) -> Result<Self> {
        if root.is_leaf() {
            return Err(Error::Config("tree root must be a constituent".into()));
        }
        check_node(&root)?;
        let leaves = root.leaves();
        if leaves != (0..sentence.len()).collect::<Vec<_>>() {
            return Err(Error::Config(format!(
                "leaves {leaves:?} do not cover a sentence of {} tokens in order",
                sentence.len()
            )));
        }
        Ok(ConstTree { sentence, root })
    }

    pub fn len(&self) -> usize {
        self.sentence.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn has_heads(&self) -> bool {
        fn annotated(node: &ConstNode) -> bool {
            match node {
                ConstNode::Leaf(_) => true,
                ConstNode::Internal { children, head, .. } => head.is_some() && children.iter().all(annotated),
            }
        }
        annotated(&self.root)
    }

    /// The dependency tree implied by head annotations: every non-head
    /// child's lexical head depends on its parent's lexical head. Arcs are
    /// labeled with the dependent constituent's label, or its tag for a
    /// bare word.
    pub fn to_dependencies(&self, root_label: &str) -> Result<DepTree> {
        let n = self.len();
        let mut arcs: Vec<Option<DepArc>> = vec![None; n];
        let root_head = self
            .root
            .head_word()
            .ok_or_else(|| Error::Config("tree lacks head annotations".into()))?;
        arcs[root_head] = Some(DepArc {
            head: Head::Root,
            label: root_label.to_string(),
        });
        fn walk(node: &ConstNode, sentence: &Sentence, arcs: &mut [Option<DepArc>]) -> Result<()> {
            if let ConstNode::Internal { children, .. } = node {
                let h = node
                    .head_word()
                    .ok_or_else(|| Error::Config("tree lacks head annotations".into()))?;
                for child in children {
                    let ch = child
                        .head_word()
                        .ok_or_else(|| Error::Config("tree lacks head annotations".into()))?;
                    if ch != h {
                        let label = match child {
                            ConstNode::Leaf(i) => sentence.token(*i).tag.clone(),
                            ConstNode::Internal { label, .. } => label.clone(),
                        };
                        arcs[ch] = Some(DepArc {
                            head: Head::Word(h),
                            label,
                        });
                    }
                    walk(child, sentence, arcs)?;
                }
            }
            Ok(())
        }
        walk(&self.root, &self.sentence, &mut arcs)?;
        let arcs = arcs
            .into_iter()
            .map(|a| a.expect("every word is a head path end"))
            .collect();
        DepTree::new(self.sentence.clone(), arcs)
    }
}

fn check_node(node: &ConstNode) -> Result<()> {
    if let ConstNode::Internal { label, children, head } = node {
        if children.is_empty() {
            return Err(Error::Config(format!("constituent {label} has no children")));
        }
        if label.is_empty() {
            return Err(Error::Config("constituent with empty label".into()));
        }
        if let Some(h) = head {
            if *h >= children.len() {
                return Err(Error::Config(format!(
                    "head index {h} out of range for {label} with {} children",
                    children.len()
                )));
            }
        }
        children.iter().try_for_each(check_node)?;
    }
    Ok(())
}

impl ConstNode {
    /// Bracketed form with preterminals restored from `sentence`.
    pub fn to_string_with(&self, sentence: &Sentence) -> String {
        let mut out = String::new();
        self.write_brackets(sentence, &mut out);
        out
    }

    fn write_brackets(&self, s: &Sentence, out: &mut String) {
        match self {
            ConstNode::Leaf(i) => {
                let t = s.token(*i);
                out.push('(');
                out.push_str(&t.tag);
                out.push(' ');
                out.push_str(&t.form);
                out.push(')');
            }
            ConstNode::Internal { label, children, .. } => {
                out.push('(');
                out.push_str(label);
                for c in children {
                    out.push(' ');
                    c.write_brackets(s, out);
                }
                out.push(')');
            }
        }
    }
}

impl fmt::Display for ConstTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.root.to_string_with(&self.sentence))
    }
}
