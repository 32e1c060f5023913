//! Seeded synthetic data: a small English-like grammar and random trees.
//!
//! Used by tests, benchmarks and the command-line smoke runs. Nothing here
//! is needed to train on real treebanks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::treebank::{assign_heads, ConstNode, ConstTree, DepArc, DepTree, Head, HeadRules, Sentence, Token};

const DT: &[&str] = &["the", "a", "every", "this"];
const NN: &[&str] = &[
    "dog",
    "cat",
    "man",
    "woman",
    "park",
    "telescope",
    "ball",
    "house",
    "garden",
    "bird",
    "car",
    "tree",
];
const JJ: &[&str] = &["big", "small", "red", "old", "happy", "quick"];
const PRP: &[&str] = &["she", "he", "they", "it"];
const NNP: &[&str] = &["john", "mary", "paris", "london"];
const VBD: &[&str] = &["saw", "liked", "chased", "found", "took", "watched", "ate", "made"];
/// Prepositions heading noun modifiers.
const IN_NOUN: &[&str] = &["in", "near", "under"];
/// Prepositions heading verb modifiers.
const IN_VERB: &[&str] = &["with", "on"];
const RB: &[&str] = &["quickly", "often", "never"];

/// Number of distinct word forms the toy grammar can produce.
pub fn toy_vocabulary_size() -> usize {
    [DT, NN, JJ, PRP, NNP, VBD, IN_NOUN, IN_VERB, RB]
        .iter()
        .map(|c| c.len())
        .sum::<usize>()
        + 1
}

struct ToyBuilder<'a, G: Rng> {
    rng: &'a mut G,
    tokens: Vec<Token>,
}

impl<G: Rng> ToyBuilder<'_, G> {
    fn word(&mut self, tag: &str, class: &[&str]) -> ConstNode {
        let form = *class.choose(self.rng).expect("non-empty class");
        self.tokens.push(Token::new(form, tag));
        ConstNode::Leaf(self.tokens.len() - 1)
    }

    fn np(&mut self, depth: usize) -> ConstNode {
        let r: f64 = self.rng.gen();
        let base = if r < 0.15 {
            return ConstNode::internal("NP", vec![self.word("PRP", PRP)], None);
        } else if r < 0.3 {
            return ConstNode::internal("NP", vec![self.word("NNP", NNP)], None);
        } else if r < 0.5 {
            vec![self.word("DT", DT), self.word("JJ", JJ), self.word("NN", NN)]
        } else {
            vec![self.word("DT", DT), self.word("NN", NN)]
        };
        let np = ConstNode::internal("NP", base, None);
        if depth < 2 && self.rng.gen_bool(0.2) {
            let pp = self.pp(IN_NOUN, depth + 1);
            ConstNode::internal("NP", vec![np, pp], None)
        } else {
            np
        }
    }

    fn pp(&mut self, preps: &[&str], depth: usize) -> ConstNode {
        let p = self.word("IN", preps);
        let obj = self.np(depth);
        ConstNode::internal("PP", vec![p, obj], None)
    }

    fn vp(&mut self, depth: usize) -> ConstNode {
        let mut children = Vec::new();
        if self.rng.gen_bool(0.15) {
            let adv = self.word("RB", RB);
            children.push(ConstNode::internal("ADVP", vec![adv], None));
        }
        children.push(self.word("VBD", VBD));
        if self.rng.gen_bool(0.85) {
            children.push(self.np(depth));
        }
        if depth < 2 && self.rng.gen_bool(0.3) {
            children.push(self.pp(IN_VERB, depth + 1));
        }
        ConstNode::internal("VP", children, None)
    }

    fn sentence(&mut self) -> ConstNode {
        let subj = self.np(0);
        let vp = self.vp(0);
        let mut children = vec![subj, vp];
        if self.rng.gen_bool(0.7) {
            children.push(self.word(".", &["."]));
        }
        ConstNode::internal("S", children, None)
    }
}

/// Head-annotated trees from the toy grammar.
pub fn toy_const_corpus(sentences: usize, seed: u64) -> Vec<ConstTree> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rules = HeadRules::english();
    (0..sentences)
        .map(|_| {
            let mut b = ToyBuilder {
                rng: &mut rng,
                tokens: Vec::new(),
            };
            let root = b.sentence();
            let sentence = Sentence::new(b.tokens).expect("grammar yields words");
            let tree = ConstTree::new(sentence, root).expect("grammar yields well-formed trees");
            assign_heads(&tree, &rules)
        })
        .collect()
}

/// Dependency trees read off the toy constituency trees. Arc labels are
/// the dependents' constituent labels; the root arc is labeled `root`.
pub fn toy_dep_corpus(sentences: usize, seed: u64) -> Vec<DepTree> {
    toy_const_corpus(sentences, seed)
        .iter()
        .map(|t| t.to_dependencies("root").expect("heads assigned"))
        .collect()
}

const RANDOM_TAGS: &[&str] = &["A", "B", "C", "D", "E"];
const RANDOM_LABELS: &[&str] = &["l1", "l2", "l3", "l4"];
const RANDOM_PHRASES: &[&str] = &["X", "Y", "Z", "W"];

fn random_sentence<G: Rng + ?Sized>(rng: &mut G, n: usize) -> Sentence {
    Sentence::new(
        (0..n)
            .map(|i| Token::new(format!("w{i}"), *RANDOM_TAGS.choose(rng).unwrap()))
            .collect(),
    )
    .expect("n > 0")
}

/// A random projective tree over `n >= 1` words with random labels. The
/// root arc is labeled `root`.
pub fn random_projective_tree<G: Rng + ?Sized>(rng: &mut G, n: usize) -> DepTree {
    fn span<G: Rng + ?Sized>(rng: &mut G, lo: usize, hi: usize, parent: Head, heads: &mut [Head]) {
        let h = rng.gen_range(lo..hi);
        heads[h] = parent;
        children(rng, lo, h, h, heads);
        children(rng, h + 1, hi, h, heads);
    }
    fn children<G: Rng + ?Sized>(rng: &mut G, mut lo: usize, hi: usize, h: usize, heads: &mut [Head]) {
        while lo < hi {
            let m = rng.gen_range(lo + 1..=hi);
            span(rng, lo, m, Head::Word(h), heads);
            lo = m;
        }
    }
    let mut heads = vec![Head::Root; n];
    span(rng, 0, n, Head::Root, &mut heads);
    let arcs = heads
        .into_iter()
        .map(|head| DepArc {
            head,
            label: match head {
                Head::Root => "root".to_string(),
                Head::Word(_) => RANDOM_LABELS.choose(rng).unwrap().to_string(),
            },
        })
        .collect();
    DepTree::new(random_sentence(rng, n), arcs).expect("generator yields trees")
}

/// Shape limits for [`random_const_tree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstShape {
    pub max_children: usize,
    /// Longest run of nested single-child constituents.
    pub max_unary: usize,
}

impl Default for ConstShape {
    fn default() -> Self {
        ConstShape {
            max_children: 5,
            max_unary: 3,
        }
    }
}

/// A random head-annotated tree over `n >= 1` words.
pub fn random_const_tree<G: Rng + ?Sized>(rng: &mut G, n: usize, shape: ConstShape) -> ConstTree {
    assert!(shape.max_children >= 2, "trees over several words need branching");
    // returns the node and the length of unary nesting at its top
    fn build<G: Rng + ?Sized>(rng: &mut G, lo: usize, hi: usize, shape: ConstShape) -> (ConstNode, usize) {
        let (mut node, mut unary) = if hi - lo == 1 {
            (ConstNode::Leaf(lo), 0)
        } else {
            let k = rng.gen_range(2..=shape.max_children.min(hi - lo));
            let mut cuts: Vec<usize> = (lo + 1..hi).collect();
            cuts.shuffle(rng);
            let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
            cuts.sort_unstable();
            let mut bounds = vec![lo];
            bounds.extend(cuts);
            bounds.push(hi);
            let children = bounds.windows(2).map(|w| build(rng, w[0], w[1], shape).0).collect();
            let head = rng.gen_range(0..k);
            (
                ConstNode::internal(*RANDOM_PHRASES.choose(rng).unwrap(), children, Some(head)),
                0,
            )
        };
        let wraps = if rng.gen_bool(0.3) {
            rng.gen_range(1..=shape.max_unary)
        } else {
            0
        };
        for _ in 0..wraps {
            node = ConstNode::internal(*RANDOM_PHRASES.choose(rng).unwrap(), vec![node], Some(0));
            unary += 1;
        }
        (node, unary)
    }
    let (mut root, _) = build(rng, 0, n, shape);
    if root.is_leaf() {
        root = ConstNode::internal(*RANDOM_PHRASES.choose(rng).unwrap(), vec![root], Some(0));
    }
    ConstTree::new(random_sentence(rng, n), root).expect("generator yields trees")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transition::{const_oracle, dep_oracle};

    #[test]
    fn toy_corpus_is_seeded_and_derivable() {
        let a = toy_const_corpus(20, 5);
        assert_eq!(a, toy_const_corpus(20, 5));
        assert_ne!(a, toy_const_corpus(20, 6));
        for t in &a {
            assert!(t.has_heads());
            const_oracle(t).unwrap();
        }
        for d in toy_dep_corpus(20, 5) {
            assert!(d.is_projective());
            dep_oracle(&d).unwrap();
        }
        assert!((45..=60).contains(&toy_vocabulary_size()));
    }

    #[test]
    fn random_trees_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for n in 1..30 {
            let d = random_projective_tree(&mut rng, n);
            assert!(d.is_projective());
            let c = random_const_tree(&mut rng, n, ConstShape::default());
            assert_eq!(c.len(), n);
            assert!(c.has_heads());
        }
    }
}
