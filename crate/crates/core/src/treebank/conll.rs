//! CoNLL-X style dependency files.
//!
//! Only ID, FORM, POSTAG, HEAD and DEPREL are consumed. Emission writes
//! `_` in every other column.

use std::io::{BufRead, Write};

use super::tree::{DepArc, DepTree, Head, Sentence, Token};
use crate::error::{Error, Result};

const MIN_COLUMNS: usize = 8;

struct Row {
    line: usize,
    form: String,
    tag: String,
    head: String,
    label: String,
}

/// Splits a stream into blocks of rows, validating column counts and IDs.
fn read_blocks<R: BufRead>(reader: R) -> Result<Vec<(usize, Vec<Row>)>> {
    let mut blocks = Vec::new();
    let mut current: Vec<Row> = Vec::new();
    let mut block_start = 0;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() {
            if !current.is_empty() {
                blocks.push((block_start, std::mem::take(&mut current)));
            }
            continue;
        }
        if trimmed.starts_with('#') && current.is_empty() {
            continue;
        }
        let cols: Vec<&str> = if trimmed.contains('\t') {
            trimmed.split('\t').collect()
        } else {
            trimmed.split_whitespace().collect()
        };
        if cols.len() < MIN_COLUMNS {
            return Err(Error::parse(
                line_no,
                format!("expected at least {MIN_COLUMNS} columns, found {}", cols.len()),
            ));
        }
        let id: usize = cols[0]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("invalid token id {:?}", cols[0])))?;
        if current.is_empty() {
            block_start = line_no;
        }
        let expected = current.len() + 1;
        if id != expected {
            let msg = if id < expected {
                format!("duplicate token id {id}")
            } else {
                format!("token id {id} out of sequence (expected {expected})")
            };
            return Err(Error::parse(line_no, msg));
        }
        current.push(Row {
            line: line_no,
            form: cols[1].to_string(),
            tag: cols[4].to_string(),
            head: cols[6].to_string(),
            label: cols[7].to_string(),
        });
    }
    if !current.is_empty() {
        blocks.push((block_start, current));
    }
    Ok(blocks)
}

fn block_sentence(rows: &[Row]) -> Result<Sentence> {
    let tokens = rows
        .iter()
        .map(|r| {
            if r.form.is_empty() || r.tag.is_empty() {
                Err(Error::parse(r.line, "empty form or tag"))
            } else {
                Ok(Token::new(r.form.clone(), r.tag.clone()))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Sentence::new(tokens)
}

/// Reads dependency trees. `HEAD = 0` attaches a token to the root.
pub fn read_conll<R: BufRead>(reader: R) -> Result<Vec<DepTree>> {
    let mut trees = Vec::new();
    for (start, rows) in read_blocks(reader)? {
        let n = rows.len();
        let sentence = block_sentence(&rows)?;
        let mut arcs = Vec::with_capacity(n);
        for r in &rows {
            let h: usize = r
                .head
                .parse()
                .map_err(|_| Error::parse(r.line, format!("invalid head {:?}", r.head)))?;
            if h > n {
                return Err(Error::parse(
                    r.line,
                    format!("head index {h} out of range for a sentence of {n} tokens"),
                ));
            }
            let head = if h == 0 { Head::Root } else { Head::Word(h - 1) };
            arcs.push(DepArc {
                head,
                label: r.label.clone(),
            });
        }
        let tree = DepTree::new(sentence, arcs).map_err(|e| match e {
            Error::Config(msg) if msg.contains("cycle") => Error::parse(start, format!("cycle in head column: {msg}")),
            Error::Config(msg) => Error::parse(start, msg),
            other => other,
        })?;
        trees.push(tree);
    }
    Ok(trees)
}

/// Reads only the tokens of each block; heads and labels may be blank.
pub fn read_conll_sentences<R: BufRead>(reader: R) -> Result<Vec<Sentence>> {
    read_blocks(reader)?
        .iter()
        .map(|(_, rows)| block_sentence(rows))
        .collect()
}

pub fn write_conll<W: Write>(mut writer: W, trees: &[DepTree]) -> Result<()> {
    for tree in trees {
        for (i, (tok, arc)) in tree.sentence().tokens().iter().zip(tree.arcs()).enumerate() {
            let head = match arc.head {
                Head::Root => 0,
                Head::Word(h) => h + 1,
            };
            writeln!(
                writer,
                "{}\t{}\t_\t_\t{}\t_\t{}\t{}\t_\t_",
                i + 1,
                tok.form,
                tok.tag,
                head,
                arc.label
            )?;
        }
        writeln!(writer)?;
    }
    Ok(())
}
