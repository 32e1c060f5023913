use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::DepModelConfig;
use super::encoder::TokenIds;
use super::heads::{ActionSpace, Decision};
use super::network::{Example, Network, NetworkShape, StepFeatures};
use super::parser::TransitionParser;
use crate::error::{Error, Result};
use crate::eval::{score_dep, DepEvalOptions};
use crate::features::{extract_dep, DEP_SLOT_FAMILIES};
use crate::model::config::TrainConfig;
use crate::nn::{ParamStore, Real};
use crate::transition::{dep_oracle, DepAction, DepActionKind, DepState};
use crate::treebank::{DepTree, Sentence, Vocab};

/// Arc-standard parser scored from three position vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct DepParser<R: Real = f64> {
    pub config: DepModelConfig,
    pub vocab: Vocab,
    pub store: ParamStore<R>,
    pub net: Network,
}

fn features(state: &DepState) -> StepFeatures {
    StepFeatures {
        positions: extract_dep(state).positions.to_vec(),
        labels: Vec::new(),
    }
}

impl<R: Real> DepParser<R> {
    /// A freshly initialized model; initialization is seeded by the
    /// training seed.
    pub fn new(config: DepModelConfig, vocab: Vocab) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.train.seed);
        let mut store = ParamStore::new();
        let net = Network::new(
            &mut store,
            &mut rng,
            &vocab,
            NetworkShape {
                encoder: &config.encoder,
                families: &DEP_SLOT_FAMILIES,
                label_table: None,
                label_slots: 0,
                hidden: config.hidden,
                hierarchical: config.hierarchical,
                space: ActionSpace {
                    labeled: vec![false, true, true],
                    labels: vocab.num_deprels(),
                },
            },
        )?;
        Ok(DepParser {
            config,
            vocab,
            store,
            net,
        })
    }

    fn decision(&self, action: &DepAction) -> Result<Decision> {
        let label = match action.label() {
            None => None,
            Some(l) => Some(
                self.vocab
                    .deprels
                    .get(l)
                    .filter(|&id| id > 0)
                    .ok_or_else(|| Error::Config(format!("dependency label {l:?} is not in the vocabulary")))?
                    - 1,
            ),
        };
        Ok(Decision {
            kind: action.kind().index(),
            label,
        })
    }

    fn action(&self, d: Decision) -> DepAction {
        let label = || self.vocab.deprels.name(d.label.expect("labeled kind") + 1).to_string();
        match DepActionKind::ALL[d.kind] {
            DepActionKind::Shift => DepAction::Shift,
            DepActionKind::ReduceLeft => DepAction::ReduceLeft(label()),
            DepActionKind::ReduceRight => DepAction::ReduceRight(label()),
        }
    }

    /// Greedy parse; ties go to the lowest-numbered action.
    pub fn parse_sentence(&self, sentence: &Sentence) -> Result<DepTree> {
        let enc = self
            .net
            .encode(&self.store, TokenIds::new(&self.vocab, sentence), None)?;
        let mut state = DepState::initial(sentence.len());
        while !state.is_terminal() {
            let legal = DepActionKind::ALL.map(|k| state.is_legal(k));
            let d = self.net.decide(&self.store, &enc, &features(&state), &legal)?;
            state.advance(&self.action(d))?;
        }
        state.to_tree(sentence, &self.vocab.root_label)
    }
}

impl<R: Real> TransitionParser<R> for DepParser<R> {
    type Tree = DepTree;
    const KIND: &'static str = "dep";

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

    fn sentence(tree: &DepTree) -> &Sentence {
        tree.sentence()
    }

    fn prepare(&self, tree: &DepTree) -> Result<Example> {
        let actions = dep_oracle(tree)?;
        let mut state = DepState::initial(tree.len());
        let mut steps = Vec::with_capacity(actions.len());
        for a in &actions {
            steps.push((features(&state), self.decision(a)?));
            state.advance(a)?;
        }
        Ok(Example {
            ids: TokenIds::new(&self.vocab, tree.sentence()),
            steps,
        })
    }

    fn parse(&self, sentence: &Sentence) -> Result<DepTree> {
        self.parse_sentence(sentence)
    }

    fn dev_metrics(gold: &[DepTree], pred: &[DepTree]) -> Result<Vec<(&'static str, f64)>> {
        let s = score_dep(gold, pred, &DepEvalOptions::default())
            .or_else(|_| score_dep(gold, pred, &DepEvalOptions::with_punct(false)))?;
        Ok(vec![("uas", s.uas()), ("las", s.las())])
    }
}
