use std::collections::HashMap;
use std::fmt;

use super::percent;
use crate::error::{Error, Result};
use crate::treebank::ConstTree;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BracketScore {
    pub matched: usize,
    pub gold: usize,
    pub predicted: usize,
}

impl BracketScore {
    pub fn precision(&self) -> f64 {
        percent(self.matched, self.predicted)
    }

    pub fn recall(&self) -> f64 {
        percent(self.matched, self.gold)
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r > 0.0 {
            2.0 * p * r / (p + r)
        } else {
            0.0
        }
    }
}

impl fmt::Display for BracketScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "precision={:.2} recall={:.2} f1={:.2} matched={} gold={} predicted={}",
            self.precision(),
            self.recall(),
            self.f1(),
            self.matched,
            self.gold,
            self.predicted
        )
    }
}

fn bracket_counts(t: &ConstTree, ignore_root: bool) -> HashMap<(String, usize, usize), usize> {
    let mut counts = HashMap::new();
    for (label, start, end) in t.root.brackets().into_iter().skip(usize::from(ignore_root)) {
        *counts.entry((label, start, end)).or_insert(0) += 1;
    }
    counts
}

/// Labeled bracket precision, recall and F1 over constituents above the
/// preterminal level, counted with multiplicity. With `ignore_root` the
/// topmost bracket of every tree is left out.
pub fn score_brackets(gold: &[ConstTree], pred: &[ConstTree], ignore_root: bool) -> Result<BracketScore> {
    if gold.len() != pred.len() {
        return Err(Error::Eval(format!(
            "gold has {} trees, prediction has {}",
            gold.len(),
            pred.len()
        )));
    }
    let mut s = BracketScore::default();
    for (k, (g, p)) in gold.iter().zip(pred).enumerate() {
        let same = g.len() == p.len()
            && g.sentence
                .tokens()
                .iter()
                .zip(p.sentence.tokens())
                .all(|(a, b)| a.form == b.form);
        if !same {
            return Err(Error::Eval(format!(
                "tree {} has different tokens in gold and prediction",
                k + 1
            )));
        }
        let gc = bracket_counts(g, ignore_root);
        let pc = bracket_counts(p, ignore_root);
        s.gold += gc.values().sum::<usize>();
        s.predicted += pc.values().sum::<usize>();
        s.matched += gc
            .iter()
            .map(|(b, &n)| n.min(pc.get(b).copied().unwrap_or(0)))
            .sum::<usize>();
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::parse_brackets;

    fn t(s: &str) -> ConstTree {
        parse_brackets(s).unwrap().remove(0)
    }

    #[test]
    fn missing_inner_np() {
        let gold = t("(S (NP (PRP I)) (VP (VBP like) (NP (NNS sports))))");
        let pred = t("(S (NP (PRP I)) (VP (VBP like) (NNS sports)))");
        let s = score_brackets(&[gold.clone()], &[pred.clone()], true).unwrap();
        assert_eq!((s.matched, s.gold, s.predicted), (2, 3, 2));
        assert_eq!(s.precision(), 100.0);
        assert_eq!(format!("{:.2} {:.2}", s.recall(), s.f1()), "66.67 80.00");
        let s = score_brackets(&[gold.clone()], &[pred], false).unwrap();
        assert_eq!((s.matched, s.gold, s.predicted), (3, 4, 3));
        assert_eq!(score_brackets(&[gold.clone()], &[gold], true).unwrap().f1(), 100.0);
    }

    #[test]
    fn disjoint_and_duplicates() {
        let a = t("(S (X (A a) (B b)) (C c))");
        let b = t("(S (A a) (Y (B b) (C c)))");
        let s = score_brackets(&[a], &[b], true).unwrap();
        assert_eq!(s.f1(), 0.0);
        let u = t("(S (NP (NP (N a))) (V b))");
        let v = t("(S (NP (N a)) (V b))");
        let s = score_brackets(&[u], &[v], true).unwrap();
        assert_eq!((s.matched, s.gold, s.predicted), (1, 2, 1));
    }

    #[test]
    fn token_mismatch() {
        let a = t("(S (A a) (B b))");
        let b = t("(S (A a) (B c))");
        assert!(score_brackets(&[a], &[b], true).is_err());
    }
}
