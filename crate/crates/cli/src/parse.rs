use std::fs::File;
use std::io::Write;
use std::path::Path;

use spaparse::model::{load_model_file, model_kind, read_model_header, ConstParser, DepParser, TransitionParser};
use spaparse::nn::Real;
use spaparse::treebank::{write_brackets, write_conll};
use spaparse::{Sentence, Vocab};

use crate::data::{read_sentences, writer};
use crate::{CliError, CliResult, ParseArgs};

fn parse_with<R: Real>(
    kind: &str,
    model: &Path,
    sentences: &[Sentence],
    threads: usize,
    out: &mut dyn Write,
) -> CliResult {
    match kind {
        "dep" => {
            let p: DepParser<R> = load_model_file(model)?;
            write_conll(out, &p.parse_all(sentences, threads)?)?;
        }
        "const" => {
            let p: ConstParser<R> = load_model_file(model)?;
            write_brackets(out, &p.parse_all(sentences, threads)?)?;
        }
        other => {
            return Err(CliError::data(format!(
                "{}: unknown model kind {other:?}",
                model.display()
            )))
        }
    }
    Ok(())
}

pub fn run(args: ParseArgs) -> CliResult {
    let header =
        read_model_header(&args.model).map_err(|e| CliError::data(format!("{}: {e}", args.model.display())))?;
    let kind = model_kind(&header.meta)?.to_string();
    if let Some(task) = args.task {
        if task.kind() != kind {
            return Err(CliError::data(format!(
                "task mismatch: {} holds a {kind} model but --task is {task}",
                args.model.display()
            )));
        }
    }
    if let Some(path) = &args.vocab {
        let vocab =
            Vocab::load(File::open(path).map_err(|e| CliError::data(format!("cannot open {}: {e}", path.display())))?)?;
        let stored = header.meta.get("vocab_hash").and_then(|v| v.as_str()).unwrap_or("");
        if stored != vocab.hash() {
            return Err(CliError::data(format!(
                "vocabulary hash mismatch: {} does not match the model's vocabulary",
                path.display()
            )));
        }
    }
    let sentences = read_sentences(args.input.as_deref(), args.format)?;
    let mut out = writer(args.output.as_deref())?;
    match header.dtype.as_str() {
        "f64" => parse_with::<f64>(&kind, &args.model, &sentences, args.threads, &mut out)?,
        "f32" => parse_with::<f32>(&kind, &args.model, &sentences, args.threads, &mut out)?,
        other => return Err(CliError::data(format!("unsupported model dtype {other:?}"))),
    }
    out.flush()?;
    Ok(())
}
