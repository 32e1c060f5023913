//! Head-percolation rules.

use std::collections::HashMap;
use std::io::Read;
use std::str::FromStr;

use super::tree::{ConstNode, ConstTree, Sentence};
use crate::error::{Error, Result};

const BUNDLED: &str = include_str!("collins.heads");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" | "l" | "left-to-right" => Ok(Direction::LeftToRight),
            "right" | "r" | "right-to-left" => Ok(Direction::RightToLeft),
            other => Err(format!("unknown direction {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeadRule {
    pub direction: Direction,
    /// Child labels in priority order. Empty matches the first child scanned.
    pub priority: Vec<String>,
}

impl HeadRule {
    fn find(&self, child_labels: &[&str]) -> Option<usize> {
        let order: Vec<usize> = match self.direction {
            Direction::LeftToRight => (0..child_labels.len()).collect(),
            Direction::RightToLeft => (0..child_labels.len()).rev().collect(),
        };
        if self.priority.is_empty() {
            return order.first().copied();
        }
        self.priority
            .iter()
            .find_map(|want| order.iter().copied().find(|&i| child_labels[i] == want))
    }
}

/// Label-indexed head rules with a default that always matches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeadRules {
    rules: HashMap<String, Vec<HeadRule>>,
    default: HeadRule,
}

impl Default for HeadRules {
    fn default() -> Self {
        HeadRules {
            rules: HashMap::new(),
            default: HeadRule {
                direction: Direction::LeftToRight,
                priority: Vec::new(),
            },
        }
    }
}

impl HeadRules {
    /// The bundled English table.
    pub fn english() -> Self {
        HeadRules::parse(BUNDLED).expect("bundled head table parses")
    }

    /// Parses `LABEL direction child1 child2 ...` lines. `#` starts a
    /// comment. The label `*` sets the default rule; its priority list is
    /// ignored so the default always matches.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rules = HeadRules::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let label = fields.next().expect("non-empty line");
            let direction = fields
                .next()
                .ok_or_else(|| Error::parse(i + 1, format!("rule for {label} has no direction")))?
                .parse::<Direction>()
                .map_err(|e| Error::parse(i + 1, e))?;
            let priority: Vec<String> = fields.map(str::to_string).collect();
            if label == "*" {
                rules.default = HeadRule {
                    direction,
                    priority: Vec::new(),
                };
            } else {
                rules
                    .rules
                    .entry(label.to_string())
                    .or_default()
                    .push(HeadRule { direction, priority });
            }
        }
        Ok(rules)
    }

    pub fn read<R: Read>(mut reader: R) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        HeadRules::parse(&text)
    }

    pub fn insert(&mut self, label: impl Into<String>, rule: HeadRule) {
        self.rules.entry(label.into()).or_default().push(rule);
    }

    pub fn set_default(&mut self, direction: Direction) {
        self.default = HeadRule {
            direction,
            priority: Vec::new(),
        };
    }

    /// Picks the head child of a constituent given its children's labels
    /// (constituent labels, or tags for words).
    pub fn find_head(&self, label: &str, child_labels: &[&str]) -> usize {
        if child_labels.len() <= 1 {
            return 0;
        }
        match self.rules.get(label) {
            Some(rules) => rules.iter().find_map(|r| r.find(child_labels)).unwrap_or_else(|| {
                let fallback = HeadRule {
                    direction: rules[0].direction,
                    priority: Vec::new(),
                };
                fallback.find(child_labels).expect("non-empty children")
            }),
            None => self.default.find(child_labels).expect("non-empty children"),
        }
    }
}

/// Annotates every constituent with its head child. Existing annotations
/// are overwritten.
pub fn assign_heads(tree: &ConstTree, rules: &HeadRules) -> ConstTree {
    fn go(node: &ConstNode, sentence: &Sentence, rules: &HeadRules) -> ConstNode {
        match node {
            ConstNode::Leaf(i) => ConstNode::Leaf(*i),
            ConstNode::Internal { label, children, .. } => {
                let labels: Vec<&str> = children
                    .iter()
                    .map(|c| match c {
                        ConstNode::Leaf(i) => sentence.token(*i).tag.as_str(),
                        ConstNode::Internal { label, .. } => label.as_str(),
                    })
                    .collect();
                let head = rules.find_head(label, &labels);
                ConstNode::Internal {
                    label: label.clone(),
                    children: children.iter().map(|c| go(c, sentence, rules)).collect(),
                    head: Some(head),
                }
            }
        }
    }
    ConstTree {
        sentence: tree.sentence.clone(),
        root: go(&tree.root, &tree.sentence, rules),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::brackets::parse_brackets;

    fn sample_rules() -> HeadRules {
        HeadRules::parse("S left VP\nVP left VBP VBD VB\nNP right\n* left\n").unwrap()
    }

    #[test]
    fn sample_tree_heads() {
        let t = &parse_brackets("(S (NP (PRP I)) (VP (VBP like) (NP (NNS sports))))").unwrap()[0];
        for rules in [sample_rules(), HeadRules::english()] {
            let h = assign_heads(t, &rules);
            let ConstNode::Internal { children, head, .. } = &h.root else {
                panic!()
            };
            assert_eq!(*head, Some(1), "S -> VP");
            let ConstNode::Internal { head: vp_head, .. } = &children[1] else {
                panic!()
            };
            assert_eq!(*vp_head, Some(0), "VP -> like");
            assert_eq!(h.root.head_word(), Some(1));
            assert!(h.has_heads());
        }
    }

    #[test]
    fn unary_and_default() {
        let rules = sample_rules();
        assert_eq!(rules.find_head("NP", &["NN"]), 0);
        assert_eq!(rules.find_head("ZZZ", &["A", "B", "C"]), 0);
        assert_eq!(rules.find_head("S", &["NP", "ADVP"]), 0);
        let mut right = HeadRules::default();
        right.set_default(Direction::RightToLeft);
        assert_eq!(right.find_head("ZZZ", &["A", "B", "C"]), 2);
    }

    #[test]
    fn priority_beats_position() {
        let rules = HeadRules::english();
        assert_eq!(rules.find_head("NP", &["DT", "JJ", "NN", "PP"]), 2);
        assert_eq!(rules.find_head("PP", &["IN", "NP"]), 0);
        assert_eq!(rules.find_head("VP", &["ADVP", "VBD", "NP"]), 1);
    }

    #[test]
    fn deterministic() {
        let t = &parse_brackets("(S (NP (DT the) (NN dog)) (VP (VBD ran)) (. .))").unwrap()[0];
        let r = HeadRules::english();
        assert_eq!(assign_heads(t, &r), assign_heads(t, &r));
    }

    #[test]
    fn bad_direction_is_error() {
        assert!(HeadRules::parse("NP sideways NN").is_err());
        assert!(HeadRules::parse("NP").is_err());
    }
}
