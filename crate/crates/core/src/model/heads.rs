//! Classifier heads over a transition system's actions.
//!
//! An action is a kind (Shift, a reduce, Promote, ...) plus, for some
//! kinds, a label. Hierarchical heads score kinds and labels with two
//! separate ReLU networks; flat heads score every labeled action directly.

use rand::Rng;

use crate::error::{Error, Result};
use crate::nn::mlp::MlpCache;
use crate::nn::{nll_softmax, ParamStore, Real, ReluMlp};

/// Kinds of a transition system and which of them carry a label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSpace {
    pub labeled: Vec<bool>,
    pub labels: usize,
}

/// A kind index and, for labeled kinds, a label index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Decision {
    pub kind: usize,
    pub label: Option<usize>,
}

impl ActionSpace {
    pub fn kinds(&self) -> usize {
        self.labeled.len()
    }

    /// Actions in flat order: kinds in order, each labeled kind expanded
    /// to its labels.
    pub fn flat_size(&self) -> usize {
        self.labeled.iter().map(|&l| if l { self.labels } else { 1 }).sum()
    }

    fn kind_offset(&self, kind: usize) -> usize {
        self.labeled[..kind]
            .iter()
            .map(|&l| if l { self.labels } else { 1 })
            .sum()
    }

    pub fn flat_index(&self, d: Decision) -> usize {
        self.kind_offset(d.kind) + d.label.unwrap_or(0)
    }

    pub fn flat_decision(&self, index: usize) -> Decision {
        let mut offset = 0;
        for (kind, &l) in self.labeled.iter().enumerate() {
            let width = if l { self.labels } else { 1 };
            if index < offset + width {
                return Decision {
                    kind,
                    label: l.then_some(index - offset),
                };
            }
            offset += width;
        }
        panic!("flat index {index} out of range");
    }

    pub fn check(&self, d: Decision) -> Result<()> {
        let ok = d.kind < self.kinds()
            && match (self.labeled[d.kind], d.label) {
                (true, Some(l)) => l < self.labels,
                (false, None) => true,
                _ => false,
            };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("decision {d:?} outside the action space")))
        }
    }
}

/// Index of the largest score among `allowed`, preferring the lowest index
/// on ties.
fn argmax_where<R: Real>(scores: &[R], allowed: impl Fn(usize) -> bool) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        if allowed(i) && best.is_none_or(|b| s > scores[b]) {
            best = Some(i);
        }
    }
    best
}

/// Greedy decision from separate kind and label scores. The label is
/// chosen only for labeled kinds and never affects the kind.
pub fn greedy_hierarchical<R: Real>(
    space: &ActionSpace,
    kind_scores: &[R],
    label_scores: &[R],
    legal: &[bool],
) -> Option<Decision> {
    let kind = argmax_where(kind_scores, |k| legal[k])?;
    let label = if space.labeled[kind] {
        Some(argmax_where(label_scores, |_| true)?)
    } else {
        None
    };
    Some(Decision { kind, label })
}

/// Greedy decision over flat action scores with illegal kinds masked.
pub fn greedy_flat<R: Real>(space: &ActionSpace, scores: &[R], legal: &[bool]) -> Option<Decision> {
    argmax_where(scores, |i| legal[space.flat_decision(i).kind]).map(|i| space.flat_decision(i))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Heads {
    Hierarchical { kind: ReluMlp, label: ReluMlp },
    Flat(ReluMlp),
}

/// Forward values of one decision kept for backpropagation.
#[derive(Clone, Debug)]
pub enum HeadTape<R> {
    Hierarchical {
        kind: (MlpCache<R>, Vec<R>),
        label: Option<(MlpCache<R>, Vec<R>)>,
    },
    Flat(MlpCache<R>, Vec<R>),
}

impl Heads {
    pub fn new<R: Real, G: Rng + ?Sized>(
        store: &mut ParamStore<R>,
        rng: &mut G,
        input: usize,
        hidden: usize,
        space: &ActionSpace,
        hierarchical: bool,
    ) -> Result<Self> {
        if space.labels == 0 && space.labeled.iter().any(|&l| l) {
            return Err(Error::EmptyCorpus("no labels for labeled actions"));
        }
        Ok(if hierarchical {
            Heads::Hierarchical {
                kind: ReluMlp::new(store, rng, "head.kind", input, hidden, space.kinds())?,
                label: ReluMlp::new(store, rng, "head.label", input, hidden, space.labels)?,
            }
        } else {
            Heads::Flat(ReluMlp::new(store, rng, "head.flat", input, hidden, space.flat_size())?)
        })
    }

    pub fn is_hierarchical(&self) -> bool {
        matches!(self, Heads::Hierarchical { .. })
    }

    pub fn decide<R: Real>(
        &self,
        store: &ParamStore<R>,
        space: &ActionSpace,
        input: &[R],
        legal: &[bool],
    ) -> Result<Decision> {
        let d = match self {
            Heads::Hierarchical { kind, label } => {
                let (ks, _) = kind.forward(store, input)?;
                let k = argmax_where(&ks, |k| legal[k]);
                match k {
                    Some(k) if space.labeled[k] => {
                        let (ls, _) = label.forward(store, input)?;
                        greedy_hierarchical(space, &ks, &ls, legal)
                    }
                    Some(k) => Some(Decision { kind: k, label: None }),
                    None => None,
                }
            }
            Heads::Flat(mlp) => {
                let (s, _) = mlp.forward(store, input)?;
                greedy_flat(space, &s, legal)
            }
        };
        d.ok_or_else(|| Error::IllegalAction {
            action: "any".into(),
            reason: "no legal action in a non-terminal state".into(),
        })
    }

    /// Negative log-likelihood of `gold`; kind and label losses are summed.
    pub fn loss<R: Real>(
        &self,
        store: &ParamStore<R>,
        space: &ActionSpace,
        input: &[R],
        gold: Decision,
    ) -> Result<(R, HeadTape<R>)> {
        space.check(gold)?;
        Ok(match self {
            Heads::Hierarchical { kind, label } => {
                let (ks, kc) = kind.forward(store, input)?;
                let (mut loss, dk) = nll_softmax(&ks, gold.kind);
                let label_tape = match gold.label {
                    Some(l) => {
                        let (ls, lc) = label.forward(store, input)?;
                        let (ll, dl) = nll_softmax(&ls, l);
                        loss += ll;
                        Some((lc, dl))
                    }
                    None => None,
                };
                (
                    loss,
                    HeadTape::Hierarchical {
                        kind: (kc, dk),
                        label: label_tape,
                    },
                )
            }
            Heads::Flat(mlp) => {
                let (s, c) = mlp.forward(store, input)?;
                let (loss, ds) = nll_softmax(&s, space.flat_index(gold));
                (loss, HeadTape::Flat(c, ds))
            }
        })
    }

    /// Accumulates head gradients and returns the gradient on the input.
    pub fn backward<R: Real>(&self, store: &mut ParamStore<R>, tape: &HeadTape<R>) -> Vec<R> {
        match (self, tape) {
            (
                Heads::Hierarchical { kind, label },
                HeadTape::Hierarchical {
                    kind: (kc, dk),
                    label: lt,
                },
            ) => {
                let mut dx = kind.backward(store, kc, dk);
                if let Some((lc, dl)) = lt {
                    let d2 = label.backward(store, lc, dl);
                    dx.iter_mut().zip(d2).for_each(|(a, b)| *a += b);
                }
                dx
            }
            (Heads::Flat(mlp), HeadTape::Flat(c, ds)) => mlp.backward(store, c, ds),
            _ => panic!("tape from a different head layout"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dep_space(labels: usize) -> ActionSpace {
        ActionSpace {
            labeled: vec![false, true, true],
            labels,
        }
    }

    #[test]
    fn flat_layout() {
        let s = dep_space(3);
        assert_eq!(s.flat_size(), 7);
        for i in 0..7 {
            assert_eq!(s.flat_index(s.flat_decision(i)), i);
        }
        assert_eq!(s.flat_decision(0), Decision { kind: 0, label: None });
        assert_eq!(
            s.flat_decision(4),
            Decision {
                kind: 2,
                label: Some(0)
            }
        );
        let c = ActionSpace {
            labeled: vec![false, true, false, false],
            labels: 5,
        };
        assert_eq!(c.flat_size(), 8);
        assert_eq!(c.flat_decision(7), Decision { kind: 3, label: None });
    }

    #[test]
    fn masking_overrides_scores() {
        let s = dep_space(2);
        let d = greedy_hierarchical(&s, &[-5.0, 9.0, 9.0], &[0.0, 1.0], &[true, false, false]).unwrap();
        assert_eq!(d, Decision { kind: 0, label: None });
        let d = greedy_flat(&s, &[-5.0, 9.0, 9.0, 9.0, 9.0], &[true, false, false]).unwrap();
        assert_eq!(d.kind, 0);
        assert!(greedy_flat(&s, &[0.0; 5], &[false; 3]).is_none());
    }

    #[test]
    fn ties_take_lowest_index() {
        let s = dep_space(2);
        let d = greedy_hierarchical(&s, &[1.0, 1.0, 1.0], &[2.0, 2.0], &[true; 3]).unwrap();
        assert_eq!(d, Decision { kind: 0, label: None });
        let d = greedy_flat(&s, &[0.0, 3.0, 3.0, 3.0, 3.0], &[true; 3]).unwrap();
        assert_eq!(
            d,
            Decision {
                kind: 1,
                label: Some(0)
            }
        );
    }

    #[test]
    fn hierarchical_and_flat_agree_on_consistent_tables() {
        // flat score of (k, l) = kind score + label score is argmax
        // consistent with the factored decision
        let s = dep_space(3);
        let ks = [0.5, 2.0, 1.0];
        let ls = [0.1, 0.7, 0.3];
        for legal in [
            [true, true, true],
            [true, false, true],
            [false, false, true],
            [true, false, false],
        ] {
            let h = greedy_hierarchical(&s, &ks, &ls, &legal).unwrap();
            let flat: Vec<f64> = (0..s.flat_size())
                .map(|i| {
                    let d = s.flat_decision(i);
                    ks[d.kind] + d.label.map_or(0.7, |l| ls[l])
                })
                .collect();
            assert_eq!(greedy_flat(&s, &flat, &legal).unwrap(), h);
        }
    }

    #[test]
    fn label_shift_does_not_change_kind() {
        let s = dep_space(3);
        let ks = [0.2, 0.1, 0.15];
        let a = greedy_hierarchical(&s, &ks, &[0.0, 1.0, 2.0], &[true; 3]).unwrap();
        let b = greedy_hierarchical(&s, &ks, &[100.0, 101.0, 102.0], &[true; 3]).unwrap();
        assert_eq!(a, b);
    }
}
