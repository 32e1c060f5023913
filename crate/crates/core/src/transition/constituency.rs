//! Shift-promote-adjoin constituency transitions.
//!
//! `Shift` pushes the next word. `Promote(X)` wraps the top stack item in a
//! new constituent `X` whose only (and head) child it is. The two adjoin
//! actions attach a finished sister to an adjacent constituent without
//! creating a node: `AdjLeft` prepends `s1` to the children of `s0`,
//! `AdjRight` appends `s0` to the children of `s1`. Trees are never
//! binarized and unary chains are plain repeated promotes.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::treebank::{ConstNode, ConstTree, DepTree, Sentence};

pub const DEFAULT_PROMOTE_CAP: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConstAction {
    Shift,
    Promote(String),
    AdjLeft,
    AdjRight,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstActionKind {
    Shift = 0,
    Promote = 1,
    AdjLeft = 2,
    AdjRight = 3,
}

impl ConstActionKind {
    pub const ALL: [ConstActionKind; 4] = [
        ConstActionKind::Shift,
        ConstActionKind::Promote,
        ConstActionKind::AdjLeft,
        ConstActionKind::AdjRight,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl ConstAction {
    pub fn kind(&self) -> ConstActionKind {
        match self {
            ConstAction::Shift => ConstActionKind::Shift,
            ConstAction::Promote(_) => ConstActionKind::Promote,
            ConstAction::AdjLeft => ConstActionKind::AdjLeft,
            ConstAction::AdjRight => ConstActionKind::AdjRight,
        }
    }
}

impl fmt::Display for ConstAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstAction::Shift => f.write_str("SHIFT"),
            ConstAction::Promote(x) => write!(f, "PRO:{x}"),
            ConstAction::AdjLeft => f.write_str("ADJ-L"),
            ConstAction::AdjRight => f.write_str("ADJ-R"),
        }
    }
}

impl FromStr for ConstAction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "SHIFT" => Ok(ConstAction::Shift),
            "ADJ-L" => Ok(ConstAction::AdjLeft),
            "ADJ-R" => Ok(ConstAction::AdjRight),
            _ => match s.strip_prefix("PRO:") {
                Some(x) if !x.is_empty() => Ok(ConstAction::Promote(x.to_string())),
                _ => Err(format!("unknown constituency action {s:?}")),
            },
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct Node {
    label: String,
    children: Vec<StackTree>,
    head: usize,
    start: usize,
    end: usize,
    head_word: usize,
    /// Promotes since this item last received an adjoined sister.
    chain: usize,
}

/// A finished or partial subtree on the stack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StackTree {
    Leaf(usize),
    Node(Arc<Node>),
}

impl StackTree {
    pub fn is_leaf(&self) -> bool {
        matches!(self, StackTree::Leaf(_))
    }

    /// The outermost label; `None` for a bare word.
    pub fn label(&self) -> Option<&str> {
        match self {
            StackTree::Leaf(_) => None,
            StackTree::Node(n) => Some(&n.label),
        }
    }

    pub fn head_word(&self) -> usize {
        match self {
            StackTree::Leaf(i) => *i,
            StackTree::Node(n) => n.head_word,
        }
    }

    /// Half-open word span.
    pub fn span(&self) -> (usize, usize) {
        match self {
            StackTree::Leaf(i) => (*i, *i + 1),
            StackTree::Node(n) => (n.start, n.end),
        }
    }

    /// Label the tree had before its last promote: the head child's label.
    pub fn head_child_label(&self) -> Option<&str> {
        match self {
            StackTree::Leaf(_) => None,
            StackTree::Node(n) => n.children[n.head].label(),
        }
    }

    /// Label of the leftmost child when it was left-adjoined.
    pub fn left_adjoined_label(&self) -> Option<&str> {
        match self {
            StackTree::Node(n) if n.head > 0 => n.children[0].label(),
            _ => None,
        }
    }

    /// Label of the rightmost child when it was right-adjoined.
    pub fn right_adjoined_label(&self) -> Option<&str> {
        match self {
            StackTree::Node(n) if n.head + 1 < n.children.len() => n.children.last().and_then(StackTree::label),
            _ => None,
        }
    }

    pub fn promote_chain(&self) -> usize {
        match self {
            StackTree::Leaf(_) => 0,
            StackTree::Node(n) => n.chain,
        }
    }

    pub fn to_node(&self) -> ConstNode {
        match self {
            StackTree::Leaf(i) => ConstNode::Leaf(*i),
            StackTree::Node(n) => ConstNode::Internal {
                label: n.label.clone(),
                children: n.children.iter().map(StackTree::to_node).collect(),
                head: Some(n.head),
            },
        }
    }

    fn node(label: String, children: Vec<StackTree>, head: usize, chain: usize) -> Self {
        let start = children[0].span().0;
        let end = children[children.len() - 1].span().1;
        let head_word = children[head].head_word();
        StackTree::Node(Arc::new(Node {
            label,
            children,
            head,
            start,
            end,
            head_word,
            chain,
        }))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstState {
    n: usize,
    stack: Vec<StackTree>,
    next: usize,
    step: usize,
    promote_cap: usize,
}

impl ConstState {
    pub fn initial(n: usize) -> Self {
        ConstState::with_promote_cap(n, DEFAULT_PROMOTE_CAP)
    }

    /// `promote_cap` bounds consecutive promotes on one stack item.
    pub fn with_promote_cap(n: usize, promote_cap: usize) -> Self {
        assert!(n >= 1, "a sentence has at least one word");
        ConstState {
            n,
            stack: Vec::new(),
            next: 0,
            step: 0,
            promote_cap,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn stack(&self) -> &[StackTree] {
        &self.stack
    }

    pub fn stack_item(&self, i: usize) -> Option<&StackTree> {
        self.stack.len().checked_sub(i + 1).map(|k| &self.stack[k])
    }

    pub fn next(&self) -> usize {
        self.next
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn promote_cap(&self) -> usize {
        self.promote_cap
    }

    /// Queue exhausted and a single constituent on the stack.
    pub fn is_terminal(&self) -> bool {
        self.next == self.n && self.stack.len() == 1 && !self.stack[0].is_leaf()
    }

    pub fn is_legal(&self, kind: ConstActionKind) -> bool {
        let s0 = self.stack_item(0);
        let s1 = self.stack_item(1);
        match kind {
            ConstActionKind::Shift => self.next < self.n,
            ConstActionKind::Promote => s0.is_some_and(|t| t.promote_chain() < self.promote_cap),
            ConstActionKind::AdjLeft => s1.is_some() && s0.is_some_and(|t| !t.is_leaf()),
            ConstActionKind::AdjRight => s1.is_some_and(|t| !t.is_leaf()),
        }
    }

    pub fn legal(&self) -> Vec<ConstActionKind> {
        ConstActionKind::ALL.into_iter().filter(|&k| self.is_legal(k)).collect()
    }

    fn check(&self, action: &ConstAction) -> Result<()> {
        if self.is_legal(action.kind()) {
            return Ok(());
        }
        let reason = match action.kind() {
            ConstActionKind::Shift => format!("queue is empty (j = n = {})", self.n),
            ConstActionKind::Promote if self.stack.is_empty() => "stack is empty".to_string(),
            ConstActionKind::Promote => {
                format!("promote cap of {} reached on s0", self.promote_cap)
            }
            ConstActionKind::AdjLeft if self.stack.len() < 2 => {
                format!("needs two stack items, stack has {}", self.stack.len())
            }
            ConstActionKind::AdjLeft => "s0 is a bare word".to_string(),
            ConstActionKind::AdjRight if self.stack.len() < 2 => {
                format!("needs two stack items, stack has {}", self.stack.len())
            }
            ConstActionKind::AdjRight => "s1 is a bare word".to_string(),
        };
        Err(Error::IllegalAction {
            action: action.to_string(),
            reason,
        })
    }

    pub fn advance(&mut self, action: &ConstAction) -> Result<()> {
        self.check(action)?;
        match action {
            ConstAction::Shift => {
                self.stack.push(StackTree::Leaf(self.next));
                self.next += 1;
            }
            ConstAction::Promote(label) => {
                let t = self.stack.pop().expect("checked");
                let chain = t.promote_chain() + 1;
                self.stack.push(StackTree::node(label.clone(), vec![t], 0, chain));
            }
            ConstAction::AdjLeft => {
                let s0 = self.stack.pop().expect("checked");
                let s1 = self.stack.pop().expect("checked");
                let StackTree::Node(n) = s0 else {
                    unreachable!("checked")
                };
                let mut children = Vec::with_capacity(n.children.len() + 1);
                children.push(s1);
                children.extend(n.children.iter().cloned());
                self.stack
                    .push(StackTree::node(n.label.clone(), children, n.head + 1, 0));
            }
            ConstAction::AdjRight => {
                let s0 = self.stack.pop().expect("checked");
                let s1 = self.stack.pop().expect("checked");
                let StackTree::Node(n) = s1 else {
                    unreachable!("checked")
                };
                let mut children = n.children.clone();
                children.push(s0);
                self.stack.push(StackTree::node(n.label.clone(), children, n.head, 0));
            }
        }
        self.step += 1;
        Ok(())
    }

    pub fn apply(&self, action: &ConstAction) -> Result<ConstState> {
        let mut next = self.clone();
        next.advance(action)?;
        Ok(next)
    }

    pub fn to_tree(&self, sentence: &Sentence) -> Result<ConstTree> {
        if self.next != self.n || self.stack.len() != 1 {
            return Err(Error::Replay(format!(
                "non-terminal final state (j = {}, n = {}, stack size {})",
                self.next,
                self.n,
                self.stack.len()
            )));
        }
        if self.stack[0].is_leaf() {
            return Err(Error::Replay("final item is a bare leaf".into()));
        }
        ConstTree::new(sentence.clone(), self.stack[0].to_node())
    }
}

/// Head-driven static oracle. Left sisters are built first, then the head
/// child is built and promoted, right sisters are built and right-adjoined
/// one by one, and finally the left sisters are left-adjoined innermost
/// first.
pub fn const_oracle(tree: &ConstTree) -> Result<Vec<ConstAction>> {
    fn emit(node: &ConstNode, out: &mut Vec<ConstAction>) -> Result<()> {
        match node {
            ConstNode::Leaf(_) => out.push(ConstAction::Shift),
            ConstNode::Internal { label, children, head } => {
                let h =
                    head.ok_or_else(|| Error::NotDerivable(format!("constituent {label} has no head annotation")))?;
                for c in &children[..=h] {
                    emit(c, out)?;
                }
                out.push(ConstAction::Promote(label.clone()));
                for c in &children[h + 1..] {
                    emit(c, out)?;
                    out.push(ConstAction::AdjRight);
                }
                out.extend(std::iter::repeat_n(ConstAction::AdjLeft, h));
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    emit(&tree.root, &mut out)?;
    Ok(out)
}

/// Longest run of promotes applied to one stack item.
pub fn max_promote_chain(actions: &[ConstAction]) -> usize {
    let mut chains: Vec<usize> = Vec::new();
    let mut best = 0;
    for a in actions {
        match a {
            ConstAction::Shift => chains.push(0),
            ConstAction::Promote(_) => {
                if let Some(c) = chains.last_mut() {
                    *c += 1;
                    best = best.max(*c);
                }
            }
            ConstAction::AdjLeft | ConstAction::AdjRight => {
                chains.pop();
                if let Some(c) = chains.last_mut() {
                    *c = 0;
                }
            }
        }
    }
    best
}

/// Replays actions without a promote cap and returns the final tree.
pub fn const_replay(sentence: &Sentence, actions: &[ConstAction]) -> Result<ConstTree> {
    let mut state = ConstState::with_promote_cap(sentence.len(), usize::MAX);
    for (i, a) in actions.iter().enumerate() {
        state
            .advance(a)
            .map_err(|e| Error::Replay(format!("action {} ({a}): {e}", i + 1)))?;
    }
    state.to_tree(sentence)
}

/// Like [`const_replay`], also returning the dependency tree read off the
/// head annotations that promotes and adjoins leave behind.
pub fn const_replay_with_deps(
    sentence: &Sentence,
    actions: &[ConstAction],
    root_label: &str,
) -> Result<(ConstTree, DepTree)> {
    let tree = const_replay(sentence, actions)?;
    let deps = tree.to_dependencies(root_label)?;
    Ok((tree, deps))
}

pub fn write_const_actions<W: Write>(mut writer: W, sequences: &[Vec<ConstAction>]) -> Result<()> {
    for seq in sequences {
        for a in seq {
            writeln!(writer, "{a}")?;
        }
        writeln!(writer)?;
    }
    Ok(())
}

pub fn read_const_actions<R: BufRead>(reader: R) -> Result<Vec<Vec<ConstAction>>> {
    super::dep::read_blocks(reader)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::{assign_heads, parse_brackets, Head, HeadRules};

    const SAMPLE: &str = "(S (NP (PRP I)) (VP (VBP like) (NP (NNS sports))))";

    fn sample_tree() -> ConstTree {
        let rules = HeadRules::parse("S left VP\nVP left VBP\nNP right\n").unwrap();
        assign_heads(&parse_brackets(SAMPLE).unwrap()[0], &rules)
    }

    fn pro(x: &str) -> ConstAction {
        ConstAction::Promote(x.into())
    }

    fn run(n: usize, actions: &[ConstAction]) -> ConstState {
        let mut s = ConstState::initial(n);
        for a in actions {
            s.advance(a).unwrap();
        }
        s
    }

    fn sample_actions() -> Vec<ConstAction> {
        use ConstAction::*;
        vec![
            Shift,
            pro("NP"),
            Shift,
            pro("VP"),
            Shift,
            pro("NP"),
            AdjRight,
            pro("S"),
            AdjLeft,
        ]
    }

    #[test]
    fn sample_oracle_sequence() {
        let t = sample_tree();
        assert_eq!(const_oracle(&t).unwrap(), sample_actions());
        assert_eq!(const_replay(&t.sentence, &sample_actions()).unwrap(), t);
    }

    #[test]
    fn sample_steps() {
        let acts = sample_actions();
        let s6 = run(3, &acts[..6]);
        assert_eq!(s6.stack_item(0).unwrap().label(), Some("NP"));
        assert_eq!(s6.stack_item(0).unwrap().span(), (2, 3));
        let s7 = run(3, &acts[..7]);
        assert_eq!(s7.stack().len(), 2);
        let vp = s7.stack_item(0).unwrap();
        assert_eq!(
            vp.to_node().to_string_with(&sample_tree().sentence),
            "(VP (VBP like) (NP (NNS sports)))"
        );
        let s9 = run(3, &acts);
        assert!(s9.is_terminal());
        assert_eq!(s9.step(), 9);
    }

    #[test]
    fn legality_sets() {
        use ConstActionKind::*;
        let s = run(3, &[ConstAction::Shift]);
        assert_eq!(s.legal(), vec![Shift, Promote]);
        let s = run(2, &[ConstAction::Shift, ConstAction::Shift]);
        assert_eq!(s.legal(), vec![Promote]);
        // [NP(I), S(VP(like))] with the queue exhausted
        let s = run(
            2,
            &[ConstAction::Shift, pro("NP"), ConstAction::Shift, pro("VP"), pro("S")],
        );
        assert_eq!(s.legal(), vec![Promote, AdjLeft, AdjRight]);
    }

    #[test]
    fn promote_cap() {
        let s = run(1, &[ConstAction::Shift, pro("A"), pro("B"), pro("C")]);
        assert!(!s.is_legal(ConstActionKind::Promote));
        let err = s.apply(&pro("D")).unwrap_err().to_string();
        assert!(err.contains("promote cap"), "{err}");
        assert_eq!(
            max_promote_chain(&[ConstAction::Shift, pro("A"), pro("B"), pro("C")]),
            3
        );
    }

    #[test]
    fn unary_chain_oracle() {
        let t = ConstTree::new(
            crate::treebank::Sentence::from_pairs(&[("dog", "NN")]).unwrap(),
            ConstNode::internal(
                "NP",
                vec![ConstNode::internal("NP", vec![ConstNode::Leaf(0)], Some(0))],
                Some(0),
            ),
        )
        .unwrap();
        assert_eq!(
            const_oracle(&t).unwrap(),
            vec![ConstAction::Shift, pro("NP"), pro("NP")]
        );
    }

    #[test]
    fn ternary_with_middle_head() {
        use ConstAction::*;
        let s = crate::treebank::Sentence::from_pairs(&[("a", "A"), ("h", "H"), ("b", "B")]).unwrap();
        let t = ConstTree::new(
            s,
            ConstNode::internal(
                "X",
                vec![ConstNode::Leaf(0), ConstNode::Leaf(1), ConstNode::Leaf(2)],
                Some(1),
            ),
        )
        .unwrap();
        let seq = const_oracle(&t).unwrap();
        assert_eq!(seq, vec![Shift, Shift, pro("X"), Shift, AdjRight, AdjLeft]);
        assert_eq!(const_replay(&t.sentence, &seq).unwrap(), t);
    }

    #[test]
    fn bare_leaf_final_state() {
        let s = crate::treebank::Sentence::from_pairs(&[("a", "A")]).unwrap();
        let err = const_replay(&s, &[ConstAction::Shift]).unwrap_err().to_string();
        assert!(err.contains("final item is a bare leaf"), "{err}");
    }

    #[test]
    fn missing_heads() {
        let t = &parse_brackets(SAMPLE).unwrap()[0];
        assert!(matches!(const_oracle(t), Err(Error::NotDerivable(_))));
    }

    #[test]
    fn co_derived_dependencies() {
        let t = sample_tree();
        let (tree, deps) = const_replay_with_deps(&t.sentence, &sample_actions(), "root").unwrap();
        assert_eq!(tree, t);
        assert_eq!(deps.head(0), Head::Word(1));
        assert_eq!(deps.head(1), Head::Root);
        assert_eq!(deps.head(2), Head::Word(1));
    }

    #[test]
    fn action_text_format() {
        let mut buf = Vec::new();
        write_const_actions(&mut buf, &[sample_actions()]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text,
            "SHIFT\nPRO:NP\nSHIFT\nPRO:VP\nSHIFT\nPRO:NP\nADJ-R\nPRO:S\nADJ-L\n\n"
        );
        assert_eq!(read_const_actions(&buf[..]).unwrap(), vec![sample_actions()]);
    }
}
