//! Penn Treebank style bracketed trees.

use std::io::{Read, Write};

use super::tree::{ConstNode, ConstTree, Sentence, Token};
use crate::error::{Error, Result};

#[derive(Debug, PartialEq)]
enum Lex {
    Open,
    Close,
    Atom(String),
}

fn lex(text: &str) -> Vec<(usize, Lex)> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut atom = String::new();
    let flush = |atom: &mut String, out: &mut Vec<(usize, Lex)>, line: usize| {
        if !atom.is_empty() {
            out.push((line, Lex::Atom(std::mem::take(atom))));
        }
    };
    for ch in text.chars() {
        match ch {
            '(' => {
                flush(&mut atom, &mut out, line);
                out.push((line, Lex::Open));
            }
            ')' => {
                flush(&mut atom, &mut out, line);
                out.push((line, Lex::Close));
            }
            c if c.is_whitespace() => {
                flush(&mut atom, &mut out, line);
                if c == '\n' {
                    line += 1;
                }
            }
            c => atom.push(c),
        }
    }
    flush(&mut atom, &mut out, line);
    out
}

enum SExpr {
    Atom(String),
    List {
        line: usize,
        label: String,
        items: Vec<SExpr>,
    },
}

struct SParser {
    lexemes: Vec<(usize, Lex)>,
    pos: usize,
}

impl SParser {
    fn list(&mut self) -> Result<SExpr> {
        let (line, _) = self.lexemes[self.pos];
        self.pos += 1;
        let mut label = String::new();
        if let Some((_, Lex::Atom(a))) = self.lexemes.get(self.pos) {
            label = a.clone();
            self.pos += 1;
        }
        let mut items = Vec::new();
        loop {
            match self.lexemes.get(self.pos) {
                None => return Err(Error::parse(line, "unbalanced parentheses: missing ')'")),
                Some((_, Lex::Close)) => {
                    self.pos += 1;
                    break;
                }
                Some((_, Lex::Open)) => items.push(self.list()?),
                Some((_, Lex::Atom(a))) => {
                    items.push(SExpr::Atom(a.clone()));
                    self.pos += 1;
                }
            }
        }
        Ok(SExpr::List { line, label, items })
    }
}

fn convert(expr: SExpr, tokens: &mut Vec<Token>) -> Result<ConstNode> {
    let SExpr::List { line, label, items } = expr else {
        unreachable!("atoms are handled by the parent list")
    };
    if label.is_empty() {
        return Err(Error::parse(line, "constituent without a label"));
    }
    if items.is_empty() {
        return Err(Error::parse(line, format!("constituent {label} has no children")));
    }
    let atoms = items.iter().filter(|i| matches!(i, SExpr::Atom(_))).count();
    if atoms > 0 {
        if items.len() != 1 {
            return Err(Error::parse(
                line,
                format!("preterminal {label} must dominate exactly one word"),
            ));
        }
        let Some(SExpr::Atom(form)) = items.into_iter().next() else {
            unreachable!()
        };
        tokens.push(Token::new(form, label));
        return Ok(ConstNode::Leaf(tokens.len() - 1));
    }
    let children = items
        .into_iter()
        .map(|c| convert(c, tokens))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstNode::internal(label, children, None))
}

/// Parses every top-level tree in `text`. Trees may span several lines.
/// A nameless outer bracket around a single tree, as in `( (S ...) )`, is
/// removed.
pub fn parse_brackets(text: &str) -> Result<Vec<ConstTree>> {
    let lexemes = lex(text);
    let mut parser = SParser { lexemes, pos: 0 };
    let mut trees = Vec::new();
    while parser.pos < parser.lexemes.len() {
        let (line, ref lexeme) = parser.lexemes[parser.pos];
        match lexeme {
            Lex::Close => return Err(Error::parse(line, "unbalanced parentheses: unexpected ')'")),
            Lex::Atom(a) => return Err(Error::parse(line, format!("word {a:?} outside of any constituent"))),
            Lex::Open => {}
        }
        let mut expr = parser.list()?;
        if let SExpr::List { label, items, .. } = &mut expr {
            if label.is_empty() && items.len() == 1 && matches!(items[0], SExpr::List { .. }) {
                expr = items.pop().expect("one item");
            } else if label.is_empty() && items.is_empty() {
                return Err(Error::parse(line, "empty constituent"));
            }
        }
        let mut tokens = Vec::new();
        let root = convert(expr, &mut tokens)?;
        if root.is_leaf() {
            return Err(Error::parse(
                line,
                "tree has no constituent above the preterminal level",
            ));
        }
        let sentence = Sentence::new(tokens).map_err(|e| Error::parse(line, e.to_string()))?;
        trees.push(ConstTree::new(sentence, root).map_err(|e| Error::parse(line, e.to_string()))?);
    }
    Ok(trees)
}

pub fn read_brackets<R: Read>(mut reader: R) -> Result<Vec<ConstTree>> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    parse_brackets(&text)
}

/// Writes one tree per line.
pub fn write_brackets<W: Write>(mut writer: W, trees: &[ConstTree]) -> Result<()> {
    for tree in trees {
        writeln!(writer, "{tree}")?;
    }
    Ok(())
}

/// Common treebank clean-up: drops `-NONE-` empty elements and the
/// constituents left empty by that, and strips function tags and
/// coindexation (`NP-SBJ-1` becomes `NP`). Labels that start with `-`
/// such as `-LRB-` are left alone.
pub fn normalize_ptb(text: &str) -> Result<Vec<ConstTree>> {
    let lexemes = lex(text);
    let mut parser = SParser { lexemes, pos: 0 };
    let mut out = String::new();
    while parser.pos < parser.lexemes.len() {
        let line = parser.lexemes[parser.pos].0;
        if parser.lexemes[parser.pos].1 != Lex::Open {
            return Err(Error::parse(line, "unbalanced parentheses or stray word"));
        }
        let expr = parser.list()?;
        if let Some(clean) = prune(expr) {
            write_sexpr(&clean, &mut out);
            out.push('\n');
        }
    }
    parse_brackets(&out)
}

fn strip_function_tags(label: &str) -> String {
    if label.starts_with('-') {
        return label.to_string();
    }
    let cut = label.find(['-', '=']).unwrap_or(label.len());
    label[..cut].to_string()
}

fn prune(expr: SExpr) -> Option<SExpr> {
    match expr {
        SExpr::Atom(a) => Some(SExpr::Atom(a)),
        SExpr::List { line, label, items } => {
            if label == "-NONE-" {
                return None;
            }
            let items: Vec<SExpr> = items.into_iter().filter_map(prune).collect();
            if items.is_empty() {
                return None;
            }
            Some(SExpr::List {
                line,
                label: strip_function_tags(&label),
                items,
            })
        }
    }
}

fn write_sexpr(expr: &SExpr, out: &mut String) {
    match expr {
        SExpr::Atom(a) => out.push_str(a),
        SExpr::List { label, items, .. } => {
            out.push('(');
            out.push_str(label);
            for item in items {
                out.push(' ');
                write_sexpr(item, out);
            }
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const SAMPLE: &str = "(S (NP (PRP I)) (VP (VBP like) (NP (NNS sports))))";

    #[test]
    fn absorbs_preterminals() {
        let trees = parse_brackets(SAMPLE).unwrap();
        assert_eq!(trees.len(), 1);
        let t = &trees[0];
        assert_eq!(t.len(), 3);
        assert_eq!(t.sentence.token(1), &Token::new("like", "VBP"));
        assert_eq!(t.root.internal_count(), 4);
        let labels: Vec<_> = t.root.brackets().into_iter().map(|b| b.0).collect();
        assert_eq!(labels, ["S", "NP", "VP", "NP"]);
    }

    #[test]
    fn single_constituent() {
        let t = &parse_brackets("(NP (NN dog))").unwrap()[0];
        assert_eq!(t.root, ConstNode::internal("NP", vec![ConstNode::Leaf(0)], None));
    }

    #[test]
    fn structural_errors() {
        assert!(parse_brackets("((S (NP (NN a)))").is_err());
        assert!(parse_brackets("(S (NP (NN a))))").is_err());
        assert!(parse_brackets("()").is_err());
        assert!(parse_brackets("(S (NP))").is_err());
        assert!(parse_brackets("(NN dog)").is_err());
        assert!(parse_brackets("(S (NN a b))").is_err());
    }

    #[test]
    fn pretty_printed_and_wrapped() {
        let text = "( (S\n  (NP (PRP I))\n  (VP (VBP like)\n    (NP (NNS sports)))) )\n(NP (NN dog))\n";
        let trees = parse_brackets(text).unwrap();
        assert_eq!(trees.len(), 2);
        assert_eq!(trees[0].to_string(), SAMPLE);
    }

    #[test]
    fn escaped_brackets_are_plain_tokens() {
        let t = &parse_brackets("(PRN (-LRB- -LRB-) (NN x) (-RRB- -RRB-))").unwrap()[0];
        assert_eq!(t.sentence.token(0).form, "-LRB-");
        assert_eq!(t.sentence.token(2).tag, "-RRB-");
    }

    #[test]
    fn normalization_removes_traces_and_function_tags() {
        let text = "( (S (NP-SBJ-1 (PRP I)) (VP (VBP like) (NP (-NONE- *T*-1)) (NP=2 (NNS sports)))) )";
        let t = &normalize_ptb(text).unwrap()[0];
        assert_eq!(t.to_string(), SAMPLE);
    }
}
