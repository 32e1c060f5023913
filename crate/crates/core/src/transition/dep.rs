//! Arc-standard dependency transitions.
//!
//! A configuration is a stack of head indices, the index `j` of the first
//! word still on the queue, and the arcs built so far. `Shift` moves word
//! `j` onto the stack; the two reduces attach the top two stack items to
//! each other. A sentence of `n` words is parsed in exactly `2n - 1` steps,
//! after which the remaining stack item is attached to the root.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::treebank::{DepArc, DepTree, Head, Sentence};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DepAction {
    Shift,
    /// Attach `s1` as a dependent of `s0`.
    ReduceLeft(String),
    /// Attach `s0` as a dependent of `s1`.
    ReduceRight(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DepActionKind {
    Shift = 0,
    ReduceLeft = 1,
    ReduceRight = 2,
}

impl DepActionKind {
    pub const ALL: [DepActionKind; 3] = [
        DepActionKind::Shift,
        DepActionKind::ReduceLeft,
        DepActionKind::ReduceRight,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl DepAction {
    pub fn kind(&self) -> DepActionKind {
        match self {
            DepAction::Shift => DepActionKind::Shift,
            DepAction::ReduceLeft(_) => DepActionKind::ReduceLeft,
            DepAction::ReduceRight(_) => DepActionKind::ReduceRight,
        }
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            DepAction::Shift => None,
            DepAction::ReduceLeft(l) | DepAction::ReduceRight(l) => Some(l),
        }
    }
}

impl fmt::Display for DepAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DepAction::Shift => f.write_str("SHIFT"),
            DepAction::ReduceLeft(l) => write!(f, "LEFT:{l}"),
            DepAction::ReduceRight(l) => write!(f, "RIGHT:{l}"),
        }
    }
}

impl FromStr for DepAction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "SHIFT" {
            return Ok(DepAction::Shift);
        }
        match s.split_once(':') {
            Some(("LEFT", l)) if !l.is_empty() => Ok(DepAction::ReduceLeft(l.to_string())),
            Some(("RIGHT", l)) if !l.is_empty() => Ok(DepAction::ReduceRight(l.to_string())),
            _ => Err(format!("unknown dependency action {s:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepState {
    n: usize,
    stack: Vec<usize>,
    next: usize,
    arcs: Vec<Option<(usize, String)>>,
    step: usize,
}

impl DepState {
    pub fn initial(n: usize) -> Self {
        assert!(n >= 1, "a sentence has at least one word");
        DepState {
            n,
            stack: Vec::new(),
            next: 0,
            arcs: vec![None; n],
            step: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn stack(&self) -> &[usize] {
        &self.stack
    }

    /// Index of the first word on the queue; equals `n` once it is empty.
    pub fn next(&self) -> usize {
        self.next
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// `(head, label)` attached to each word so far.
    pub fn arcs(&self) -> &[Option<(usize, String)>] {
        &self.arcs
    }

    /// Stack item `i` positions from the top (`s0` is 0).
    pub fn stack_item(&self, i: usize) -> Option<usize> {
        self.stack.len().checked_sub(i + 1).map(|k| self.stack[k])
    }

    pub fn is_terminal(&self) -> bool {
        self.next == self.n && self.stack.len() == 1
    }

    pub fn is_legal(&self, kind: DepActionKind) -> bool {
        match kind {
            DepActionKind::Shift => self.next < self.n,
            DepActionKind::ReduceLeft | DepActionKind::ReduceRight => self.stack.len() >= 2,
        }
    }

    pub fn legal(&self) -> Vec<DepActionKind> {
        DepActionKind::ALL.into_iter().filter(|&k| self.is_legal(k)).collect()
    }

    fn check(&self, action: &DepAction) -> Result<()> {
        if self.is_legal(action.kind()) {
            return Ok(());
        }
        let reason = match action.kind() {
            DepActionKind::Shift => format!("queue is empty (j = n = {})", self.n),
            _ => format!("needs two stack items, stack has {}", self.stack.len()),
        };
        Err(Error::IllegalAction {
            action: action.to_string(),
            reason,
        })
    }

    /// Applies `action` in place.
    pub fn advance(&mut self, action: &DepAction) -> Result<()> {
        self.check(action)?;
        match action {
            DepAction::Shift => {
                self.stack.push(self.next);
                self.next += 1;
            }
            DepAction::ReduceLeft(label) => {
                let s0 = self.stack.pop().expect("checked");
                let s1 = self.stack.pop().expect("checked");
                self.arcs[s1] = Some((s0, label.clone()));
                self.stack.push(s0);
            }
            DepAction::ReduceRight(label) => {
                let s0 = self.stack.pop().expect("checked");
                let s1 = *self.stack.last().expect("checked");
                self.arcs[s0] = Some((s1, label.clone()));
            }
        }
        self.step += 1;
        Ok(())
    }

    pub fn apply(&self, action: &DepAction) -> Result<DepState> {
        let mut next = self.clone();
        next.advance(action)?;
        Ok(next)
    }

    /// The tree built by a terminal configuration.
    pub fn to_tree(&self, sentence: &Sentence, root_label: &str) -> Result<DepTree> {
        if !self.is_terminal() {
            return Err(Error::Replay(format!(
                "non-terminal final state (j = {}, n = {}, stack size {})",
                self.next,
                self.n,
                self.stack.len()
            )));
        }
        if sentence.len() != self.n {
            return Err(Error::Dimension {
                context: "dependency replay",
                expected: self.n,
                actual: sentence.len(),
            });
        }
        let root = self.stack[0];
        let arcs = self
            .arcs
            .iter()
            .enumerate()
            .map(|(d, a)| match a {
                Some((h, l)) => DepArc {
                    head: Head::Word(*h),
                    label: l.clone(),
                },
                None => {
                    debug_assert_eq!(d, root);
                    DepArc {
                        head: Head::Root,
                        label: root_label.to_string(),
                    }
                }
            })
            .collect();
        DepTree::new(sentence.clone(), arcs)
    }
}

/// Static oracle: reduce-left when `s1` is a gold dependent of `s0` that
/// has all its dependents, else reduce-right under the mirror condition,
/// else shift.
pub fn dep_oracle(tree: &DepTree) -> Result<Vec<DepAction>> {
    if !tree.is_projective() {
        return Err(Error::NotDerivable(
            "non-projective tree cannot be derived by arc-standard transitions".into(),
        ));
    }
    let n = tree.len();
    let gold_children = tree.child_counts();
    let mut attached = vec![0usize; n];
    let mut state = DepState::initial(n);
    let mut actions = Vec::with_capacity(2 * n - 1);
    while !state.is_terminal() {
        let action = match (state.stack_item(1), state.stack_item(0)) {
            (Some(s1), Some(s0)) if tree.head(s1) == Head::Word(s0) && attached[s1] == gold_children[s1] => {
                attached[s0] += 1;
                DepAction::ReduceLeft(tree.label(s1).to_string())
            }
            (Some(s1), Some(s0)) if tree.head(s0) == Head::Word(s1) && attached[s0] == gold_children[s0] => {
                attached[s1] += 1;
                DepAction::ReduceRight(tree.label(s0).to_string())
            }
            _ => DepAction::Shift,
        };
        state
            .advance(&action)
            .map_err(|e| Error::NotDerivable(format!("oracle reached an illegal action: {e}")))?;
        actions.push(action);
    }
    Ok(actions)
}

pub fn dep_replay(sentence: &Sentence, actions: &[DepAction], root_label: &str) -> Result<DepTree> {
    let mut state = DepState::initial(sentence.len());
    for (i, a) in actions.iter().enumerate() {
        state
            .advance(a)
            .map_err(|e| Error::Replay(format!("action {} ({a}): {e}", i + 1)))?;
    }
    state.to_tree(sentence, root_label)
}

/// Writes action sequences one per line, sentences separated by blank lines.
pub fn write_dep_actions<W: Write>(mut writer: W, sequences: &[Vec<DepAction>]) -> Result<()> {
    for seq in sequences {
        for a in seq {
            writeln!(writer, "{a}")?;
        }
        writeln!(writer)?;
    }
    Ok(())
}

pub fn read_dep_actions<R: BufRead>(reader: R) -> Result<Vec<Vec<DepAction>>> {
    read_blocks(reader)
}

pub(crate) fn read_blocks<R: BufRead, A: FromStr<Err = String>>(reader: R) -> Result<Vec<Vec<A>>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
            continue;
        }
        current.push(line.parse().map_err(|e| Error::parse(i + 1, e))?);
    }
    if !current.is_empty() {
        out.push(current);
    }
    Ok(out)
}
