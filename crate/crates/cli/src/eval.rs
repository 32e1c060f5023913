use std::fs::File;
use std::io::BufWriter;

use spaparse::eval::{arc_recall_by_length, score_brackets, score_dep, write_recall_csv, DepEvalOptions};

use crate::config::Task;
use crate::data::{read_bracket_corpus, read_dep_corpus};
use crate::{CliError, CliResult, EvalArgs};

pub fn run(args: EvalArgs) -> CliResult {
    match args.task {
        Task::Dep => {
            let gold = read_dep_corpus(&args.gold)?;
            let pred = read_dep_corpus(&args.pred)?;
            let score = score_dep(&gold, &pred, &DepEvalOptions::with_punct(!args.include_punct))?;
            println!("{score}");
            if let Some(path) = &args.recall_by_length {
                let rows = arc_recall_by_length(&gold, &pred, args.max_bucket)?;
                let f =
                    File::create(path).map_err(|e| CliError::data(format!("cannot create {}: {e}", path.display())))?;
                write_recall_csv(BufWriter::new(f), &rows, args.max_bucket)?;
            }
        }
        Task::Const => {
            if args.recall_by_length.is_some() {
                return Err(CliError::usage(
                    "--recall-by-length applies to dependency evaluation only",
                ));
            }
            let gold = read_bracket_corpus(&args.gold)?;
            let pred = read_bracket_corpus(&args.pred)?;
            println!("{}", score_brackets(&gold, &pred, args.ignore_root)?);
        }
    }
    Ok(())
}
