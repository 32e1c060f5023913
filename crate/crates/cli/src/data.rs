use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use spaparse::treebank::{assign_heads, normalize_ptb, read_conll, read_conll_sentences, HeadRules};
use spaparse::{ConstTree, DepTree, Sentence, Token};

use crate::{CliError, CliResult, InputFormat};

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::data(format!("cannot open {}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: spaparse::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

pub fn read_dep_corpus(path: &Path) -> CliResult<Vec<DepTree>> {
    in_file(path, read_conll(open(path)?))
}

pub fn head_rules(path: Option<&Path>) -> CliResult<HeadRules> {
    match path {
        None => Ok(HeadRules::english()),
        Some(p) => in_file(p, HeadRules::read(open(p)?)),
    }
}

/// Bracketed trees with empty elements and function tags removed.
pub fn read_bracket_corpus(path: &Path) -> CliResult<Vec<ConstTree>> {
    let mut text = String::new();
    open(path)?.read_to_string(&mut text)?;
    in_file(path, normalize_ptb(&text))
}

/// Bracketed trees with empty elements and function tags removed and
/// heads assigned.
pub fn read_const_corpus(path: &Path, rules: &HeadRules) -> CliResult<Vec<ConstTree>> {
    let trees = read_bracket_corpus(path)?;
    Ok(trees.iter().map(|t| assign_heads(t, rules)).collect())
}

fn parse_tagged(text: &str) -> CliResult<Vec<Sentence>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let tokens = line
            .split_whitespace()
            .map(|tok| {
                tok.rsplit_once('/')
                    .filter(|(w, t)| !w.is_empty() && !t.is_empty())
                    .map(|(w, t)| Token::new(w, t))
                    .ok_or_else(|| CliError::data(format!("line {}: token {tok:?} is not word/TAG", i + 1)))
            })
            .collect::<CliResult<Vec<_>>>()?;
        out.push(Sentence::new(tokens)?);
    }
    Ok(out)
}

/// Sentences to parse from `path` or standard input.
pub fn read_sentences(path: Option<&Path>, format: InputFormat) -> CliResult<Vec<Sentence>> {
    let mut reader: Box<dyn BufRead> = match path {
        Some(p) => Box::new(open(p)?),
        None => Box::new(BufReader::new(io::stdin())),
    };
    match format {
        InputFormat::Conll => Ok(read_conll_sentences(reader)?),
        InputFormat::Tagged => {
            let mut text = String::new();
            reader.read_to_string(&mut text)?;
            parse_tagged(&text)
        }
    }
}

pub fn writer(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            Box::new(BufWriter::new(File::create(p).map_err(|e| {
                CliError::data(format!("cannot create {}: {e}", p.display()))
            })?))
        }
        None => Box::new(BufWriter::new(io::stdout())),
    })
}
