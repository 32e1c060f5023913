use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::Write;

use super::percent;
use crate::error::{Error, Result};
use crate::treebank::{DepTree, Head};

/// Gold tags whose tokens are not scored when punctuation is excluded.
pub const DEFAULT_PUNCT_TAGS: [&str; 5] = ["``", "''", ",", ".", ":"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepEvalOptions {
    pub exclude_punct: bool,
    pub punct_tags: HashSet<String>,
}

impl Default for DepEvalOptions {
    fn default() -> Self {
        DepEvalOptions {
            exclude_punct: true,
            punct_tags: DEFAULT_PUNCT_TAGS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl DepEvalOptions {
    pub fn with_punct(exclude: bool) -> Self {
        DepEvalOptions {
            exclude_punct: exclude,
            ..Default::default()
        }
    }

    fn scored(&self, tag: &str) -> bool {
        !(self.exclude_punct && self.punct_tags.contains(tag))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DepScore {
    pub correct_head: usize,
    pub correct_labeled: usize,
    pub scored: usize,
}

impl DepScore {
    pub fn uas(&self) -> f64 {
        percent(self.correct_head, self.scored)
    }

    pub fn las(&self) -> f64 {
        percent(self.correct_labeled, self.scored)
    }
}

impl fmt::Display for DepScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "uas={:.2} las={:.2} correct_head={} correct_labeled={} scored={}",
            self.uas(),
            self.las(),
            self.correct_head,
            self.correct_labeled,
            self.scored
        )
    }
}

fn check_aligned(gold: &[DepTree], pred: &[DepTree]) -> Result<()> {
    if gold.len() != pred.len() {
        return Err(Error::Eval(format!(
            "gold has {} sentences, prediction has {}",
            gold.len(),
            pred.len()
        )));
    }
    for (k, (g, p)) in gold.iter().zip(pred).enumerate() {
        let same = g.len() == p.len()
            && g.sentence()
                .tokens()
                .iter()
                .zip(p.sentence().tokens())
                .all(|(a, b)| a.form == b.form);
        if !same {
            return Err(Error::Eval(format!(
                "sentence {} differs between gold and prediction",
                k + 1
            )));
        }
    }
    Ok(())
}

pub fn score_dep(gold: &[DepTree], pred: &[DepTree], opts: &DepEvalOptions) -> Result<DepScore> {
    check_aligned(gold, pred)?;
    let mut s = DepScore::default();
    for (g, p) in gold.iter().zip(pred) {
        for (i, tok) in g.sentence().tokens().iter().enumerate() {
            if !opts.scored(&tok.tag) {
                continue;
            }
            s.scored += 1;
            if g.head(i) == p.head(i) {
                s.correct_head += 1;
                if g.label(i) == p.label(i) {
                    s.correct_labeled += 1;
                }
            }
        }
    }
    if s.scored == 0 {
        return Err(Error::Eval("no scored tokens".into()));
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LengthBucket {
    /// Arcs of exactly this length; the last bucket also holds longer arcs.
    Length(usize),
    Root,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecallRow {
    pub bucket: LengthBucket,
    pub gold: usize,
    pub correct: usize,
}

impl RecallRow {
    pub fn recall(&self) -> f64 {
        if self.gold == 0 {
            0.0
        } else {
            self.correct as f64 / self.gold as f64
        }
    }
}

/// Recall of gold arcs (head match) grouped by `|head - dependent|`.
/// Lengths of `max_bucket` and above share one bucket; root attachments
/// have their own. Buckets without gold arcs are omitted. Every token is
/// counted.
pub fn arc_recall_by_length(gold: &[DepTree], pred: &[DepTree], max_bucket: usize) -> Result<Vec<RecallRow>> {
    if max_bucket == 0 {
        return Err(Error::Eval("max bucket must be at least 1".into()));
    }
    check_aligned(gold, pred)?;
    let mut rows: BTreeMap<LengthBucket, (usize, usize)> = BTreeMap::new();
    for (g, p) in gold.iter().zip(pred) {
        for i in 0..g.len() {
            let bucket = match g.head(i) {
                Head::Root => LengthBucket::Root,
                Head::Word(h) => LengthBucket::Length(h.abs_diff(i).min(max_bucket)),
            };
            let e = rows.entry(bucket).or_default();
            e.0 += 1;
            if g.head(i) == p.head(i) {
                e.1 += 1;
            }
        }
    }
    Ok(rows
        .into_iter()
        .map(|(bucket, (gold, correct))| RecallRow { bucket, gold, correct })
        .collect())
}

pub const RECALL_CSV_HEADER: &str = "length,gold,correct,recall";

pub fn write_recall_csv<W: Write>(mut w: W, rows: &[RecallRow], max_bucket: usize) -> Result<()> {
    writeln!(w, "{RECALL_CSV_HEADER}")?;
    for r in rows {
        let length = match r.bucket {
            LengthBucket::Root => "root".to_string(),
            LengthBucket::Length(l) if l >= max_bucket => format!("{l}+"),
            LengthBucket::Length(l) => l.to_string(),
        };
        writeln!(w, "{length},{},{},{:.4}", r.gold, r.correct, r.recall())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::{DepArc, Sentence};

    fn tree(tags: &[&str], heads: &[(Head, &str)]) -> DepTree {
        let s = Sentence::from_pairs(
            &tags
                .iter()
                .enumerate()
                .map(|(i, t)| (format!("w{i}"), t.to_string()))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        DepTree::new(
            s,
            heads
                .iter()
                .map(|(h, l)| DepArc {
                    head: *h,
                    label: l.to_string(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn hand_counted_three_tokens() {
        use Head::*;
        // gold: 0 <- 1 -> 2, pred attaches 2 to 0
        let g = tree(
            &["PRP", "VBP", "NNS"],
            &[(Word(1), "nsubj"), (Root, "root"), (Word(1), "dobj")],
        );
        let p = tree(
            &["PRP", "VBP", "NNS"],
            &[(Word(1), "nsubj"), (Root, "root"), (Word(0), "dobj")],
        );
        let s = score_dep(&[g.clone()], &[p.clone()], &DepEvalOptions::default()).unwrap();
        assert_eq!((s.correct_head, s.correct_labeled, s.scored), (2, 2, 3));
        assert_eq!(format!("{:.2}", s.uas()), "66.67");
        assert!(s.las() <= s.uas());
        let same = score_dep(&[g.clone()], &[g], &DepEvalOptions::default()).unwrap();
        assert_eq!((same.uas(), same.las()), (100.0, 100.0));
    }

    #[test]
    fn punctuation_excluded_by_gold_tag() {
        use Head::*;
        let g = tree(&["NN", "."], &[(Root, "root"), (Word(0), "punct")]);
        let p = tree(&["NN", "."], &[(Root, "root"), (Word(0), "dep")]);
        let s = score_dep(&[g.clone()], &[p.clone()], &DepEvalOptions::default()).unwrap();
        assert_eq!(s.scored, 1);
        let s = score_dep(&[g], &[p], &DepEvalOptions::with_punct(false)).unwrap();
        assert_eq!((s.scored, s.correct_labeled), (2, 1));
    }

    #[test]
    fn all_punctuation_is_an_error() {
        let g = tree(&["."], &[(Head::Root, "root")]);
        let err = score_dep(&[g.clone()], &[g], &DepEvalOptions::default()).unwrap_err();
        assert!(err.to_string().contains("no scored tokens"));
    }

    #[test]
    fn misalignment() {
        let a = tree(&["NN"], &[(Head::Root, "root")]);
        let b = tree(&["NN", "NN"], &[(Head::Root, "root"), (Head::Word(0), "x")]);
        assert!(score_dep(&[a.clone()], &[b], &DepEvalOptions::default()).is_err());
        assert!(score_dep(&[a.clone()], &[], &DepEvalOptions::default()).is_err());
    }

    #[test]
    fn recall_buckets() {
        use Head::*;
        let g = tree(
            &["A", "B", "C", "D"],
            &[(Word(3), "x"), (Word(3), "x"), (Word(3), "x"), (Root, "r")],
        );
        let p = tree(
            &["A", "B", "C", "D"],
            &[(Word(3), "x"), (Word(2), "x"), (Word(3), "x"), (Root, "r")],
        );
        let rows = arc_recall_by_length(&[g], &[p], 2).unwrap();
        assert_eq!(
            rows,
            vec![
                RecallRow {
                    bucket: LengthBucket::Length(1),
                    gold: 1,
                    correct: 1
                },
                RecallRow {
                    bucket: LengthBucket::Length(2),
                    gold: 2,
                    correct: 1
                },
                RecallRow {
                    bucket: LengthBucket::Root,
                    gold: 1,
                    correct: 1
                },
            ]
        );
        let mut csv = Vec::new();
        write_recall_csv(&mut csv, &rows, 2).unwrap();
        assert_eq!(
            String::from_utf8(csv).unwrap(),
            "length,gold,correct,recall\n1,1,1,1.0000\n2+,2,1,0.5000\nroot,1,1,1.0000\n"
        );
    }
}
