use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathQuantifier {
    /// `E`: some path.
    Exists,
    /// `A`: all paths.
    Forall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modality {
    /// `<A>`: the coalition can enforce the path formula.
    Diamond,
    /// `[A]`: the coalition cannot avoid the path formula.
    Box,
}

/// Agents of a coalition modality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AgentSet {
    Named(Vec<String>),
    /// Every agent of the model under evaluation; produced by desugaring `E`.
    Full,
}

impl AgentSet {
    pub fn empty() -> Self {
        AgentSet::Named(Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Path {
    Next(Box<Formula>),
    Finally(Box<Formula>),
    Globally(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    /// `(a R b)`: `b` holds up to and including the first `a`-state, or forever.
    /// Only produced by desugaring; it has no concrete syntax.
    Release(Box<Formula>, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Quant(PathQuantifier, Path),
    CoalitionMod {
        kind: Modality,
        agents: AgentSet,
        path: Path,
    },
}

impl Path {
    pub fn operands(&self) -> impl Iterator<Item = &Formula> {
        let (a, b): (&Formula, Option<&Formula>) = match self {
            Path::Next(f) | Path::Finally(f) | Path::Globally(f) => (f, None),
            Path::Until(f, g) | Path::Release(f, g) => (f, Some(g)),
        };
        std::iter::once(a).chain(b)
    }
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn diamond<S: Into<String>>(agents: impl IntoIterator<Item = S>, path: Path) -> Self {
        Formula::CoalitionMod {
            kind: Modality::Diamond,
            agents: AgentSet::Named(agents.into_iter().map(Into::into).collect()),
            path,
        }
    }

    pub fn boxed<S: Into<String>>(agents: impl IntoIterator<Item = S>, path: Path) -> Self {
        Formula::CoalitionMod {
            kind: Modality::Box,
            agents: AgentSet::Named(agents.into_iter().map(Into::into).collect()),
            path,
        }
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => vec![],
            Formula::Not(f) => vec![f],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                vec![a, b]
            }
            Formula::Quant(_, p) | Formula::CoalitionMod { path: p, .. } => p.operands().collect(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(a) = f {
                out.insert(a.as_str());
            }
        });
        out
    }

    /// Agents named in coalition modalities.
    pub fn agents(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::CoalitionMod {
                agents: AgentSet::Named(names),
                ..
            } = f
            {
                out.extend(names.iter().map(String::as_str));
            }
        });
        out
    }

    pub fn has_coalition_modality(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| found |= matches!(f, Formula::CoalitionMod { .. }));
        found
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    pub fn depth(&self) -> usize {
        1 + self.children().into_iter().map(Formula::depth).max().unwrap_or(0)
    }

    /// Maximum nesting of path quantifiers and coalition modalities.
    pub fn modal_depth(&self) -> usize {
        let inner = self
            .children()
            .into_iter()
            .map(Formula::modal_depth)
            .max()
            .unwrap_or(0);
        match self {
            Formula::Quant(..) | Formula::CoalitionMod { .. } => inner + 1,
            _ => inner,
        }
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }
}

// Binding strength for printing; higher binds tighter.
fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        _ => 5,
    }
}

fn operand(f: &mut fmt::Formatter<'_>, sub: &Formula, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({sub})")
    } else {
        write!(f, "{sub}")
    }
}

fn binary(
    f: &mut fmt::Formatter<'_>,
    level: u8,
    op: &str,
    a: &Formula,
    b: &Formula,
    right_assoc: bool,
) -> fmt::Result {
    let (lp, rp) = if right_assoc {
        (prec(a) <= level, prec(b) < level)
    } else {
        (prec(a) < level, prec(b) <= level)
    };
    operand(f, a, lp)?;
    write!(f, " {op} ")?;
    operand(f, b, rp)
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Path::Next(g) => {
                f.write_str("X ")?;
                operand(f, g, prec(g) < 5)
            }
            Path::Finally(g) => {
                f.write_str("F ")?;
                operand(f, g, prec(g) < 5)
            }
            Path::Globally(g) => {
                f.write_str("G ")?;
                operand(f, g, prec(g) < 5)
            }
            Path::Until(a, b) => write!(f, "({a} U {b})"),
            Path::Release(a, b) => write!(f, "({a} R {b})"),
        }
    }
}

/// Prints the canonical concrete syntax, with the fewest parentheses the
/// grammar needs. `Release` and the full-coalition marker `<*>` print but do
/// not parse.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(a) => f.write_str(a),
            Formula::Not(g) => {
                f.write_str("!")?;
                operand(f, g, prec(g) < 5)
            }
            Formula::And(a, b) => binary(f, 4, "&&", a, b, false),
            Formula::Or(a, b) => binary(f, 3, "||", a, b, false),
            Formula::Implies(a, b) => binary(f, 2, "->", a, b, true),
            Formula::Iff(a, b) => binary(f, 1, "<->", a, b, false),
            Formula::Quant(q, p) => {
                let q = match q {
                    PathQuantifier::Exists => "E",
                    PathQuantifier::Forall => "A",
                };
                write!(f, "{q} {p}")
            }
            Formula::CoalitionMod { kind, agents, path } => {
                let (open, close) = match kind {
                    Modality::Diamond => ('<', '>'),
                    Modality::Box => ('[', ']'),
                };
                match agents {
                    AgentSet::Named(names) => write!(f, "{open}{}{close} {path}", names.join(",")),
                    AgentSet::Full => write!(f, "{open}*{close} {path}"),
                }
            }
        }
    }
}
