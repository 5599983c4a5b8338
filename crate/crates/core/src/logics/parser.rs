//! Recursive-descent parser for the formula grammar.
//!
//! ```text
//! formula  = iff ;
//! iff      = impl { "<->" impl } ;
//! impl     = or [ "->" impl ] ;
//! or       = and { "||" and } ;
//! and      = unary { "&&" unary } ;
//! unary    = "!" unary | modal | atomterm ;
//! modal    = ( coal | "E" | "A" ) pathop ;
//! coal     = "<" [ idlist ] ">" | "[" [ idlist ] "]" ;
//! idlist   = ident { [","] ident } ;
//! pathop   = "X" unary | "F" unary | "G" unary | "(" formula "U" formula ")" ;
//! atomterm = "true" | "false" | ident | "(" formula ")" ;
//! ```

use std::fmt;

use thiserror::Error;

use super::ast::{AgentSet, Formula, Modality, Path, PathQuantifier};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {message}{}", expected_suffix(.expected))]
pub struct FormulaParseError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected {})", expected.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Not,
    And,
    Or,
    Implies,
    Iff,
    LAngle,
    RAngle,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    True,
    False,
    E,
    A,
    X,
    F,
    G,
    U,
    Ident(String),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Not => "`!`",
            Tok::And => "`&&`",
            Tok::Or => "`||`",
            Tok::Implies => "`->`",
            Tok::Iff => "`<->`",
            Tok::LAngle => "`<`",
            Tok::RAngle => "`>`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Comma => "`,`",
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::E => "`E`",
            Tok::A => "`A`",
            Tok::X => "`X`",
            Tok::F => "`F`",
            Tok::G => "`G`",
            Tok::U => "`U`",
            Tok::Ident(name) => return write!(f, "identifier `{name}`"),
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "true" => Tok::True,
        "false" => Tok::False,
        "E" => Tok::E,
        "A" => Tok::A,
        "X" => Tok::X,
        "F" => Tok::F,
        "G" => Tok::G,
        "U" => Tok::U,
        _ => return None,
    })
}

/// Reserved words; none of them can name an atom or an agent.
pub const KEYWORDS: [&str; 8] = ["E", "A", "X", "F", "G", "U", "true", "false"];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, FormulaParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |i: usize, message: String, expected: &[&str]| FormulaParseError {
        column: i + 1,
        message,
        expected: expected.iter().map(|s| s.to_string()).collect(),
    };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let rest = |k: usize| chars.get(i + k).copied();
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '!' => Tok::Not,
            '&' if rest(1) == Some('&') => {
                i += 1;
                Tok::And
            }
            '|' if rest(1) == Some('|') => {
                i += 1;
                Tok::Or
            }
            '-' if rest(1) == Some('>') => {
                i += 1;
                Tok::Implies
            }
            // `<->` wins over a coalition bracket
            '<' if rest(1) == Some('-') && rest(2) == Some('>') => {
                i += 2;
                Tok::Iff
            }
            '<' => Tok::LAngle,
            '>' => Tok::RAngle,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                i = j - 1;
                keyword(&word).unwrap_or(Tok::Ident(word))
            }
            '&' => return Err(err(i, "unexpected `&`".into(), &["`&&`"])),
            '|' => return Err(err(i, "unexpected `|`".into(), &["`||`"])),
            '-' => return Err(err(i, "unexpected `-`".into(), &["`->`"])),
            other => return Err(err(i, format!("unexpected character `{other}`"), &[])),
        };
        out.push((tok, start + 1));
        i += 1;
    }
    out.push((Tok::Eof, chars.len() + 1));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &[&str]) -> FormulaParseError {
        FormulaParseError {
            column: self.column(),
            message: format!("unexpected {}", self.peek()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), FormulaParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error(&[what]))
        }
    }

    fn formula(&mut self) -> Result<Formula, FormulaParseError> {
        let mut lhs = self.implication()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.implication()?;
            lhs = Formula::Iff(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, FormulaParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implication()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, FormulaParseError> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Or) {
            let rhs = self.conjunction()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, FormulaParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.unary()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaParseError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Tok::E => {
                self.bump();
                Ok(Formula::Quant(PathQuantifier::Exists, self.path()?))
            }
            Tok::A => {
                self.bump();
                Ok(Formula::Quant(PathQuantifier::Forall, self.path()?))
            }
            Tok::LAngle => {
                self.bump();
                let agents = self.agent_list(Tok::RAngle, "`>`")?;
                Ok(Formula::CoalitionMod {
                    kind: Modality::Diamond,
                    agents: AgentSet::Named(agents),
                    path: self.path()?,
                })
            }
            Tok::LBracket => {
                self.bump();
                let agents = self.agent_list(Tok::RBracket, "`]`")?;
                Ok(Formula::CoalitionMod {
                    kind: Modality::Box,
                    agents: AgentSet::Named(agents),
                    path: self.path()?,
                })
            }
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(_) => match self.bump() {
                Tok::Ident(name) => Ok(Formula::Atom(name)),
                _ => unreachable!(),
            },
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => Err(self.error(&[
                "`!`", "`E`", "`A`", "`<`", "`[`", "`true`", "`false`", "identifier", "`(`",
            ])),
        }
    }

    fn agent_list(&mut self, close: Tok, close_name: &str) -> Result<Vec<String>, FormulaParseError> {
        let mut agents: Vec<String> = Vec::new();
        loop {
            let column = self.column();
            match self.peek().clone() {
                Tok::Ident(name) => {
                    self.bump();
                    if agents.contains(&name) {
                        return Err(FormulaParseError {
                            column,
                            message: format!("agent `{name}` listed twice in coalition"),
                            expected: vec![],
                        });
                    }
                    agents.push(name);
                }
                Tok::Comma if !agents.is_empty() => {
                    self.bump();
                    if !matches!(self.peek(), Tok::Ident(_)) {
                        return Err(self.error(&["agent name"]));
                    }
                }
                t if t == close => {
                    self.bump();
                    return Ok(agents);
                }
                _ => return Err(self.error(&["agent name", close_name])),
            }
        }
    }

    fn path(&mut self) -> Result<Path, FormulaParseError> {
        match self.peek() {
            Tok::X => {
                self.bump();
                Ok(Path::Next(Box::new(self.unary()?)))
            }
            Tok::F => {
                self.bump();
                Ok(Path::Finally(Box::new(self.unary()?)))
            }
            Tok::G => {
                self.bump();
                Ok(Path::Globally(Box::new(self.unary()?)))
            }
            Tok::LParen => {
                self.bump();
                let lhs = self.formula()?;
                self.expect(Tok::U, "`U`")?;
                let rhs = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Path::Until(Box::new(lhs), Box::new(rhs)))
            }
            _ => Err(self.error(&["`X`", "`F`", "`G`", "`(`"])),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, FormulaParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(&["end of input"]));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    fn atom(s: &str) -> Formula {
        Formula::atom(s)
    }

    #[test]
    fn coalition_reachability() {
        assert_eq!(
            p("<A0,A1> F goal"),
            Formula::diamond(["A0", "A1"], Path::Finally(Box::new(atom("goal"))))
        );
        // comma is optional between agents
        assert_eq!(p("<A0 A1> F goal"), p("<A0,A1> F goal"));
    }

    #[test]
    fn precedence() {
        assert_eq!(
            p("p && q || r"),
            Formula::or(Formula::and(atom("p"), atom("q")), atom("r"))
        );
        assert_eq!(
            p("a -> b -> c"),
            Formula::implies(atom("a"), Formula::implies(atom("b"), atom("c")))
        );
        assert_eq!(
            p("a <-> b -> c"),
            Formula::Iff(
                Box::new(atom("a")),
                Box::new(Formula::implies(atom("b"), atom("c")))
            )
        );
        assert_eq!(
            p("!p && q"),
            Formula::and(Formula::not(atom("p")), atom("q"))
        );
        assert_eq!(
            p("E X p && q"),
            Formula::and(
                Formula::Quant(PathQuantifier::Exists, Path::Next(Box::new(atom("p")))),
                atom("q")
            )
        );
    }

    #[test]
    fn until_and_empty_coalition() {
        assert_eq!(
            p("E (p U q)"),
            Formula::Quant(
                PathQuantifier::Exists,
                Path::Until(Box::new(atom("p")), Box::new(atom("q")))
            )
        );
        assert_eq!(
            p("<> X p"),
            Formula::diamond(Vec::<String>::new(), Path::Next(Box::new(atom("p"))))
        );
        assert_eq!(
            p("[] G p"),
            Formula::boxed(Vec::<String>::new(), Path::Globally(Box::new(atom("p"))))
        );
    }

    #[test]
    fn iff_token_is_not_a_coalition() {
        assert!(matches!(p("p<->q"), Formula::Iff(..)));
        assert!(matches!(p("p <-> <A0> X q"), Formula::Iff(..)));
    }

    #[test]
    fn errors_report_column_and_expectations() {
        let e = parse_formula("<A0> goal").unwrap_err();
        assert_eq!(e.column, 6);
        assert!(e.expected.contains(&"`X`".to_string()));

        let e = parse_formula("p &&").unwrap_err();
        assert_eq!(e.column, 5);
        assert!(e.message.contains("end of input"));

        let e = parse_formula("p & q").unwrap_err();
        assert_eq!((e.column, e.expected.as_slice()), (3, &["`&&`".to_string()][..]));

        let e = parse_formula("(p U q)").unwrap_err();
        assert_eq!(e.column, 4);

        let e = parse_formula("p q").unwrap_err();
        assert_eq!(e.expected, vec!["end of input"]);
    }

    #[test]
    fn keywords_are_reserved() {
        assert!(parse_formula("<A> X p").is_err());
        assert!(parse_formula("E X U").is_err());
        assert!(parse_formula("X").is_err());
    }

    #[test]
    fn duplicate_coalition_member_rejected() {
        let e = parse_formula("<A0,A0> X p").unwrap_err();
        assert_eq!(e.column, 5);
    }

    #[test]
    fn trailing_comma_rejected() {
        assert!(parse_formula("<A0,> X p").is_err());
        assert!(parse_formula("<,A0> X p").is_err());
    }
}
