//! Line-oriented model text format.
//!
//! ```text
//! ModelType: CGS
//! Agents: A0 A1
//! States: S0 S1
//! Initial: S0
//! Atoms: goal
//! Label: S1 goal
//! Actions A0: A B
//! Actions A1: A
//! Transition: S0 A A -> S1
//! ```
//!
//! `#` starts a comment, blank lines are ignored and commas between
//! identifiers are ignored. Kripke models use `Edge: S0 -> S1 S2` instead of
//! agents, actions and transitions.

use std::fmt::Write as _;

use super::cgs::{CgsSpec, TransitionRow};
use super::error::ModelError;
use super::kripke::KripkeSpec;
use super::{Model, ModelDocument};
use crate::kernel::ModelClassId;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Ident(&'a str),
    Colon,
    Arrow,
}

#[derive(Debug, Clone)]
struct Token<'a> {
    tok: Tok<'a>,
    column: usize,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> ModelError {
    ModelError::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn lex_line(line_no: usize, line: &str) -> Result<Vec<Token<'_>>, ModelError> {
    let mut out = Vec::new();
    let mut chars = line.char_indices().peekable();
    // columns are 1-based and count characters, not bytes
    let mut col = 0;
    while let Some((i, c)) = chars.next() {
        col += 1;
        match c {
            '#' => break,
            c if c.is_whitespace() || c == ',' => {}
            ':' => out.push(Token {
                tok: Tok::Colon,
                column: col,
            }),
            '-' => match chars.peek() {
                Some((_, '>')) => {
                    chars.next();
                    out.push(Token {
                        tok: Tok::Arrow,
                        column: col,
                    });
                    col += 1;
                }
                _ => return Err(parse_err(line_no, col, "expected `->`")),
            },
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start_col = col;
                let mut end = i + c.len_utf8();
                while let Some(&(j, d)) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        end = j + d.len_utf8();
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push(Token {
                    tok: Tok::Ident(&line[i..end]),
                    column: start_col,
                });
            }
            other => {
                return Err(parse_err(
                    line_no,
                    col,
                    format!("unexpected character `{other}`"),
                ))
            }
        }
    }
    Ok(out)
}

/// Cursor over one line's tokens.
struct LineCursor<'a> {
    line: usize,
    end_column: usize,
    toks: Vec<Token<'a>>,
    pos: usize,
}

impl<'a> LineCursor<'a> {
    fn column(&self) -> usize {
        self.toks
            .get(self.pos)
            .map_or(self.end_column, |t| t.column)
    }

    fn ident(&mut self, what: &str) -> Result<&'a str, ModelError> {
        match self.toks.get(self.pos) {
            Some(Token {
                tok: Tok::Ident(s), ..
            }) => {
                self.pos += 1;
                Ok(s)
            }
            _ => Err(parse_err(self.line, self.column(), format!("expected {what}"))),
        }
    }

    fn expect(&mut self, tok: Tok<'_>, what: &str) -> Result<(), ModelError> {
        match self.toks.get(self.pos) {
            Some(t) if t.tok == tok => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(parse_err(self.line, self.column(), format!("expected {what}"))),
        }
    }

    /// Identifiers up to the end of the line or the next non-identifier.
    fn idents(&mut self) -> Vec<String> {
        let mut out = Vec::new();
        while let Some(Token {
            tok: Tok::Ident(s), ..
        }) = self.toks.get(self.pos)
        {
            out.push(s.to_string());
            self.pos += 1;
        }
        out
    }

    fn finish(&self) -> Result<(), ModelError> {
        if self.pos < self.toks.len() {
            Err(parse_err(self.line, self.column(), "unexpected token"))
        } else {
            Ok(())
        }
    }
}

#[derive(Default)]
struct Seen {
    agents: bool,
    states: bool,
    initial: bool,
    atoms: bool,
}

fn once(flag: &mut bool, section: &str, line: usize) -> Result<(), ModelError> {
    if std::mem::replace(flag, true) {
        Err(parse_err(line, 1, format!("duplicate `{section}` section")))
    } else {
        Ok(())
    }
}

/// Parses and validates a model document.
pub fn parse_model_text(text: &str) -> Result<ModelDocument, ModelError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter_map(|(no, l)| match lex_line(no, l) {
            Ok(toks) if toks.is_empty() => None,
            Ok(toks) => Some(Ok(LineCursor {
                line: no,
                end_column: l.chars().count() + 1,
                toks,
                pos: 0,
            })),
            Err(e) => Some(Err(e)),
        });

    let mut header = match lines.next() {
        Some(l) => l?,
        None => return Err(parse_err(1, 1, "expected `ModelType:` header")),
    };
    let key = header.ident("`ModelType:` header")?;
    if key != "ModelType" {
        return Err(parse_err(header.line, 1, "expected `ModelType:` header"));
    }
    header.expect(Tok::Colon, "`:`")?;
    let class_name = header.ident("model class name")?;
    header.finish()?;
    let class = ModelClassId::from_name(class_name)
        .ok_or_else(|| ModelError::UnknownModelClass(class_name.to_string()))?;

    match class {
        c if c == ModelClassId::CGS => {
            let spec = parse_cgs_body(lines)?;
            Ok(ModelDocument::new(Model::Cgs(spec.build()?)))
        }
        c if c == ModelClassId::KRIPKE => {
            let spec = parse_kripke_body(lines)?;
            Ok(ModelDocument::new(Model::Kripke(spec.build()?)))
        }
        other => Err(ModelError::Unsupported(other)),
    }
}

fn parse_cgs_body<'a>(
    lines: impl Iterator<Item = Result<LineCursor<'a>, ModelError>>,
) -> Result<CgsSpec, ModelError> {
    let mut spec = CgsSpec::default();
    let mut seen = Seen::default();
    for l in lines {
        let mut l = l?;
        let line = l.line;
        let key = l.ident("section keyword")?;
        match key {
            "Agents" => {
                once(&mut seen.agents, key, line)?;
                l.expect(Tok::Colon, "`:`")?;
                spec.agents = l.idents();
            }
            "States" => {
                once(&mut seen.states, key, line)?;
                l.expect(Tok::Colon, "`:`")?;
                spec.states = l.idents();
            }
            "Initial" => {
                once(&mut seen.initial, key, line)?;
                l.expect(Tok::Colon, "`:`")?;
                spec.initial = l.idents();
            }
            "Atoms" => {
                once(&mut seen.atoms, key, line)?;
                l.expect(Tok::Colon, "`:`")?;
                spec.atoms = l.idents();
            }
            "Label" => {
                l.expect(Tok::Colon, "`:`")?;
                let state = l.ident("state name")?.to_string();
                spec.labels.push((state, l.idents()));
            }
            "Actions" => {
                let agent = l.ident("agent name")?.to_string();
                l.expect(Tok::Colon, "`:`")?;
                spec.actions.push((agent, l.idents()));
            }
            "Transition" => {
                l.expect(Tok::Colon, "`:`")?;
                let state = l.ident("source state")?.to_string();
                let joint = l.idents();
                l.expect(Tok::Arrow, "`->`")?;
                let target = l.ident("target state")?.to_string();
                spec.transitions.push(TransitionRow {
                    state,
                    joint,
                    target,
                });
            }
            "ModelType" => return Err(parse_err(line, 1, "duplicate `ModelType` section")),
            other => {
                return Err(parse_err(
                    line,
                    1,
                    format!("unexpected section `{other}` in a CGS model"),
                ))
            }
        }
        l.finish()?;
    }
    Ok(spec)
}

fn parse_kripke_body<'a>(
    lines: impl Iterator<Item = Result<LineCursor<'a>, ModelError>>,
) -> Result<KripkeSpec, ModelError> {
    let mut spec = KripkeSpec::default();
    let mut seen = Seen::default();
    for l in lines {
        let mut l = l?;
        let line = l.line;
        let key = l.ident("section keyword")?;
        match key {
            "States" => {
                once(&mut seen.states, key, line)?;
                l.expect(Tok::Colon, "`:`")?;
                spec.states = l.idents();
            }
            "Initial" => {
                once(&mut seen.initial, key, line)?;
                l.expect(Tok::Colon, "`:`")?;
                spec.initial = l.idents();
            }
            "Atoms" => {
                once(&mut seen.atoms, key, line)?;
                l.expect(Tok::Colon, "`:`")?;
                spec.atoms = l.idents();
            }
            "Label" => {
                l.expect(Tok::Colon, "`:`")?;
                let state = l.ident("state name")?.to_string();
                spec.labels.push((state, l.idents()));
            }
            "Edge" => {
                l.expect(Tok::Colon, "`:`")?;
                let src = l.ident("source state")?.to_string();
                l.expect(Tok::Arrow, "`->`")?;
                let targets = l.idents();
                if targets.is_empty() {
                    return Err(parse_err(line, l.column(), "expected target state"));
                }
                spec.edges.push((src, targets));
            }
            "ModelType" => return Err(parse_err(line, 1, "duplicate `ModelType` section")),
            other => {
                return Err(parse_err(
                    line,
                    1,
                    format!("unexpected section `{other}` in a Kripke model"),
                ))
            }
        }
        l.finish()?;
    }
    Ok(spec)
}

fn push_list(out: &mut String, key: &str, items: &[String]) {
    out.push_str(key);
    out.push(':');
    for i in items {
        out.push(' ');
        out.push_str(i);
    }
    out.push('\n');
}

/// Canonical text: fixed section order, declaration order throughout, and
/// transitions sorted by state then joint action.
pub fn serialize_model(doc: &ModelDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "ModelType: {}", doc.model_class());
    match doc.payload() {
        Model::Cgs(g) => {
            let spec = g.to_spec();
            push_list(&mut out, "Agents", &spec.agents);
            push_list(&mut out, "States", &spec.states);
            push_list(&mut out, "Initial", &spec.initial);
            push_list(&mut out, "Atoms", &spec.atoms);
            for (s, atoms) in &spec.labels {
                let _ = writeln!(out, "Label: {s} {}", atoms.join(" "));
            }
            for (a, acts) in &spec.actions {
                push_list(&mut out, &format!("Actions {a}"), acts);
            }
            for row in &spec.transitions {
                let _ = writeln!(
                    out,
                    "Transition: {} {} -> {}",
                    row.state,
                    row.joint.join(" "),
                    row.target
                );
            }
        }
        Model::Kripke(k) => {
            let spec = k.to_spec();
            push_list(&mut out, "States", &spec.states);
            push_list(&mut out, "Initial", &spec.initial);
            push_list(&mut out, "Atoms", &spec.atoms);
            for (s, atoms) in &spec.labels {
                let _ = writeln!(out, "Label: {s} {}", atoms.join(" "));
            }
            for (s, targets) in &spec.edges {
                let _ = writeln!(out, "Edge: {s} -> {}", targets.join(" "));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::fixtures::{m1, M1_TEXT};
    use crate::models::kripke_of_cgs;

    #[test]
    fn parses_m1() {
        let doc = parse_model_text(M1_TEXT).unwrap();
        assert_eq!(doc.model_class(), ModelClassId::CGS);
        let Model::Cgs(g) = doc.payload() else {
            panic!("expected a CGS")
        };
        assert_eq!(g, &m1());
        assert_eq!(g.agents(), ["A0", "A1"]);
        assert_eq!(g.states(), ["S0", "S1", "S2", "S3"]);
    }

    #[test]
    fn canonical_text_round_trips() {
        let doc = parse_model_text(M1_TEXT).unwrap();
        let text = serialize_model(&doc);
        assert_eq!(text, serialize_model(&doc));
        let again = parse_model_text(&text).unwrap();
        assert_eq!(again, doc);
        assert_eq!(serialize_model(&again), text);
    }

    #[test]
    fn kripke_round_trips() {
        let k1 = ModelDocument::new(Model::Kripke(kripke_of_cgs(&m1())));
        let text = serialize_model(&k1);
        assert!(text.starts_with("ModelType: Kripke\n"));
        assert!(text.contains("Edge: S0 -> S0 S1 S2\n"));
        assert_eq!(parse_model_text(&text).unwrap(), k1);
    }

    #[test]
    fn empty_atoms_line_is_accepted() {
        let text = "ModelType: Kripke\nStates: a\nInitial: a\nAtoms:\nEdge: a -> a\n";
        let doc = parse_model_text(text).unwrap();
        assert_eq!(serialize_model(&doc), text);
    }

    #[test]
    fn commas_and_comments_are_ignored() {
        let text = "# header\nModelType: Kripke\n\nStates: a, b # two\nInitial: a\nEdge: a -> a, b\nEdge: b -> a\n";
        let doc = parse_model_text(text).unwrap();
        assert_eq!(doc.state_count(), 2);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_model_text("ModelType: CGS\nAgents: A0\nTransition: S0 A => S1\n").unwrap_err();
        assert_eq!(
            err,
            ModelError::Parse {
                line: 3,
                column: 18,
                message: "unexpected character `=`".into()
            }
        );
        let err = parse_model_text("ModelType: CGS\nTransition: S0 A S1\n").unwrap_err();
        assert!(matches!(err, ModelError::Parse { line: 2, column: 20, .. }), "{err:?}");
        let err = parse_model_text("\n\nStates: a\n").unwrap_err();
        assert!(matches!(err, ModelError::Parse { line: 3, column: 1, .. }));
    }

    #[test]
    fn unknown_and_unsupported_classes() {
        assert_eq!(
            parse_model_text("ModelType: Petri\n").unwrap_err(),
            ModelError::UnknownModelClass("Petri".into())
        );
        assert_eq!(
            parse_model_text("ModelType: LTS\n").unwrap_err(),
            ModelError::Unsupported(ModelClassId::LTS)
        );
    }

    #[test]
    fn foreign_sections_rejected() {
        let err = parse_model_text("ModelType: Kripke\nAgents: a\n").unwrap_err();
        assert!(matches!(err, ModelError::Parse { line: 2, .. }));
        let err = parse_model_text("ModelType: CGS\nStates: a\nStates: b\n").unwrap_err();
        assert!(err.to_string().contains("duplicate"));
    }

    #[test]
    fn duplicate_transition_keys_fail_validation() {
        let text = M1_TEXT.replace(
            "Transition: S0 A B -> S0",
            "Transition: S0 A B -> S0\nTransition: S0 A A -> S2",
        );
        match parse_model_text(&text).unwrap_err() {
            ModelError::Validation(errs) => {
                assert_eq!(errs.0.len(), 1);
                assert_eq!(errs.0[0].invariant(), "determinism");
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
