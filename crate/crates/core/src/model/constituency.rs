use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{ConstModelConfig, TrainConfig};
use super::encoder::TokenIds;
use super::heads::{ActionSpace, Decision};
use super::network::{Example, Network, NetworkShape, StepFeatures};
use super::parser::TransitionParser;
use crate::error::{Error, Result};
use crate::eval::score_brackets;
use crate::features::{extract_const, CONST_LABELS, CONST_SLOT_FAMILIES};
use crate::nn::{ParamStore, Real};
use crate::transition::{const_oracle, max_promote_chain, ConstAction, ConstActionKind, ConstState};
use crate::treebank::{ConstTree, Sentence, Vocab};

/// Shift-promote-adjoin parser scored from five position vectors and
/// eight constituent labels.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstParser<R: Real = f64> {
    pub config: ConstModelConfig,
    pub vocab: Vocab,
    pub store: ParamStore<R>,
    pub net: Network,
}

impl<R: Real> ConstParser<R> {
    pub fn new(config: ConstModelConfig, vocab: Vocab) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.train.seed);
        let mut store = ParamStore::new();
        let net = Network::new(
            &mut store,
            &mut rng,
            &vocab,
            NetworkShape {
                encoder: &config.encoder,
                families: &CONST_SLOT_FAMILIES,
                label_table: Some((vocab.nonterminals.len(), config.nonterminal_dims)),
                label_slots: CONST_LABELS,
                hidden: config.hidden,
                hierarchical: config.hierarchical,
                space: ActionSpace {
                    labeled: vec![false, true, false, false],
                    labels: vocab.num_nonterminals(),
                },
            },
        )?;
        Ok(ConstParser {
            config,
            vocab,
            store,
            net,
        })
    }

    fn features(&self, state: &ConstState) -> StepFeatures {
        let f = extract_const(state);
        StepFeatures {
            positions: f.positions.to_vec(),
            labels: f
                .labels
                .iter()
                .map(|l| l.map_or(0, |l| self.vocab.nonterminals.id(l)))
                .collect(),
        }
    }

    fn decision(&self, action: &ConstAction) -> Result<Decision> {
        let label = match action {
            ConstAction::Promote(x) => Some(
                self.vocab
                    .nonterminals
                    .get(x)
                    .filter(|&id| id > 0)
                    .ok_or_else(|| Error::Config(format!("nonterminal {x:?} is not in the vocabulary")))?
                    - 1,
            ),
            _ => None,
        };
        Ok(Decision {
            kind: action.kind().index(),
            label,
        })
    }

    fn action(&self, d: Decision) -> ConstAction {
        match ConstActionKind::ALL[d.kind] {
            ConstActionKind::Shift => ConstAction::Shift,
            ConstActionKind::Promote => ConstAction::Promote(
                self.vocab
                    .nonterminals
                    .name(d.label.expect("labeled kind") + 1)
                    .to_string(),
            ),
            ConstActionKind::AdjLeft => ConstAction::AdjLeft,
            ConstActionKind::AdjRight => ConstAction::AdjRight,
        }
    }

    /// Most actions a greedy parse of `n` words can take.
    pub fn step_bound(&self, n: usize) -> usize {
        n + self.config.promote_cap * 2 * n + 2 * n
    }

    /// Greedy parse under the promote cap; ties go to the lowest-numbered
    /// action.
    pub fn parse_sentence(&self, sentence: &Sentence) -> Result<ConstTree> {
        let n = sentence.len();
        let enc = self
            .net
            .encode(&self.store, TokenIds::new(&self.vocab, sentence), None)?;
        let mut state = ConstState::with_promote_cap(n, self.config.promote_cap);
        let bound = self.step_bound(n);
        while !state.is_terminal() {
            if state.step() >= bound {
                return Err(Error::IllegalAction {
                    action: "decode".into(),
                    reason: format!("no terminal state within {bound} steps"),
                });
            }
            let legal = ConstActionKind::ALL.map(|k| state.is_legal(k));
            let d = self.net.decide(&self.store, &enc, &self.features(&state), &legal)?;
            state.advance(&self.action(d))?;
        }
        state.to_tree(sentence)
    }
}

impl<R: Real> TransitionParser<R> for ConstParser<R> {
    type Tree = ConstTree;
    const KIND: &'static str = "const";

    fn network(&self) -> &Network {
        &self.net
    }

    fn store(&self) -> &ParamStore<R> {
        &self.store
    }

    fn store_mut(&mut self) -> &mut ParamStore<R> {
        &mut self.store
    }

    fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    fn train_config(&self) -> &TrainConfig {
        &self.config.train
    }

    fn sentence(tree: &ConstTree) -> &Sentence {
        &tree.sentence
    }

    /// Gold path of a head-annotated tree. Trees needing more consecutive
    /// Promotes than the decoder allows are rejected, since the decoder
    /// could never reproduce them.
    fn prepare(&self, tree: &ConstTree) -> Result<Example> {
        let actions = const_oracle(tree)?;
        let chain = max_promote_chain(&actions);
        if chain > self.config.promote_cap {
            return Err(Error::NotDerivable(format!(
                "needs {chain} consecutive promotes, cap is {}",
                self.config.promote_cap
            )));
        }
        let mut state = ConstState::with_promote_cap(tree.len(), self.config.promote_cap);
        let mut steps = Vec::with_capacity(actions.len());
        for a in &actions {
            steps.push((self.features(&state), self.decision(a)?));
            state.advance(a)?;
        }
        Ok(Example {
            ids: TokenIds::new(&self.vocab, &tree.sentence),
            steps,
        })
    }

    fn parse(&self, sentence: &Sentence) -> Result<ConstTree> {
        self.parse_sentence(sentence)
    }

    fn dev_metrics(gold: &[ConstTree], pred: &[ConstTree]) -> Result<Vec<(&'static str, f64)>> {
        let s = score_brackets(gold, pred, true)?;
        Ok(vec![
            ("f1", s.f1()),
            ("precision", s.precision()),
            ("recall", s.recall()),
        ])
    }
}
