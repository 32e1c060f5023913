use std::io::Write;

use spaparse::transition::{
    const_oracle, const_replay, dep_oracle, dep_replay, write_const_actions, write_dep_actions, ConstAction, DepAction,
};

use crate::config::Task;
use crate::data::{head_rules, read_const_corpus, read_dep_corpus, writer};
use crate::{CliError, CliResult, OracleArgs};

/// Gold sequences of derivable trees, the skipped trees with reasons, and
/// the number of replay mismatches when replaying.
struct Dump<A> {
    sequences: Vec<Vec<A>>,
    skipped: Vec<(usize, String)>,
    mismatches: Vec<usize>,
}

fn dump<T, A>(
    trees: &[T],
    oracle: impl Fn(&T) -> spaparse::Result<Vec<A>>,
    replays: Option<&dyn Fn(&T, &[A]) -> bool>,
) -> Dump<A> {
    let mut d = Dump {
        sequences: Vec::new(),
        skipped: Vec::new(),
        mismatches: Vec::new(),
    };
    for (i, t) in trees.iter().enumerate() {
        match oracle(t) {
            Ok(seq) => {
                if replays.is_some_and(|same| !same(t, &seq)) {
                    d.mismatches.push(i);
                }
                d.sequences.push(seq);
            }
            Err(e) => d.skipped.push((i, e.to_string())),
        }
    }
    d
}

fn report<A>(d: &Dump<A>, trees: usize, replay: bool) -> CliResult {
    for (i, reason) in &d.skipped {
        eprintln!("skipped tree {}: {reason}", i + 1);
    }
    for i in &d.mismatches {
        eprintln!("replay mismatch in tree {}", i + 1);
    }
    eprintln!(
        "trees={trees} sequences={} skipped={}",
        d.sequences.len(),
        d.skipped.len()
    );
    if replay {
        eprintln!(
            "replayed {} sequences: {} mismatches",
            d.sequences.len(),
            d.mismatches.len()
        );
        if !d.mismatches.is_empty() {
            return Err(CliError::verification(format!(
                "{} replay mismatches",
                d.mismatches.len()
            )));
        }
    }
    Ok(())
}

pub fn run(args: OracleArgs) -> CliResult {
    let mut out = writer(args.output.as_deref())?;
    match args.task {
        Task::Dep => {
            let trees = read_dep_corpus(&args.input)?;
            let same = |t: &spaparse::DepTree, seq: &[DepAction]| {
                dep_replay(t.sentence(), seq, t.label(t.root())).is_ok_and(|r| &r == t)
            };
            let d = dump(
                &trees,
                dep_oracle,
                args.replay.then_some(&same as &dyn Fn(&_, &[_]) -> bool),
            );
            write_dep_actions(&mut out, &d.sequences)?;
            out.flush()?;
            report(&d, trees.len(), args.replay)
        }
        Task::Const => {
            let trees = read_const_corpus(&args.input, &head_rules(args.head_rules.as_deref())?)?;
            let same =
                |t: &spaparse::ConstTree, seq: &[ConstAction]| const_replay(&t.sentence, seq).is_ok_and(|r| &r == t);
            let d = dump(
                &trees,
                const_oracle,
                args.replay.then_some(&same as &dyn Fn(&_, &[_]) -> bool),
            );
            write_const_actions(&mut out, &d.sequences)?;
            out.flush()?;
            report(&d, trees.len(), args.replay)
        }
    }
}
