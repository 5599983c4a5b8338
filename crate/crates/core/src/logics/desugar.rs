//! Rewriting into the evaluator basis: `true`, atoms, `!`, `&&`, and diamond
//! modalities over `X`, `G`, `U` and the internal `R`.

use super::ast::{AgentSet, Formula, Modality, Path, PathQuantifier};

fn bx(f: Formula) -> Box<Formula> {
    Box::new(f)
}

fn not(f: Formula) -> Formula {
    Formula::Not(bx(f))
}

fn and(a: Formula, b: Formula) -> Formula {
    Formula::And(bx(a), bx(b))
}

fn diamond(agents: AgentSet, path: Path) -> Formula {
    Formula::CoalitionMod {
        kind: Modality::Diamond,
        agents,
        path,
    }
}

/// Diamond over a path, with operands already desugared.
fn diamond_path(agents: AgentSet, path: &Path) -> Formula {
    let d = |f: &Formula| bx(desugar(f));
    let path = match path {
        Path::Next(f) => Path::Next(d(f)),
        Path::Finally(f) => Path::Until(bx(Formula::True), d(f)),
        Path::Globally(f) => Path::Globally(d(f)),
        Path::Until(f, g) => Path::Until(d(f), d(g)),
        Path::Release(f, g) => Path::Release(d(f), d(g)),
    };
    diamond(agents, path)
}

/// `[A] path` as the negation of `<A>` enforcing the negated path.
fn box_path(agents: AgentSet, path: &Path) -> Formula {
    let nd = |f: &Formula| bx(not(desugar(f)));
    let dual = match path {
        // [A] X f = !<A> X !f
        Path::Next(f) => Path::Next(nd(f)),
        // [A] F f = !<A> G !f
        Path::Finally(f) => Path::Globally(nd(f)),
        // [A] G f = !<A> F !f = !<A> (true U !f)
        Path::Globally(f) => Path::Until(bx(Formula::True), nd(f)),
        // [A] (f U g) = !<A> (!f R !g)
        Path::Until(f, g) => Path::Release(nd(f), nd(g)),
        // [A] (f R g) = !<A> (!f U !g)
        Path::Release(f, g) => Path::Until(nd(f), nd(g)),
    };
    not(diamond(agents, dual))
}

pub fn desugar(f: &Formula) -> Formula {
    match f {
        Formula::True => Formula::True,
        Formula::False => not(Formula::True),
        Formula::Atom(a) => Formula::Atom(a.clone()),
        Formula::Not(g) => not(desugar(g)),
        Formula::And(a, b) => and(desugar(a), desugar(b)),
        Formula::Or(a, b) => not(and(not(desugar(a)), not(desugar(b)))),
        Formula::Implies(a, b) => not(and(desugar(a), not(desugar(b)))),
        Formula::Iff(a, b) => {
            let (a, b) = (desugar(a), desugar(b));
            and(
                not(and(a.clone(), not(b.clone()))),
                not(and(b, not(a))),
            )
        }
        Formula::Quant(PathQuantifier::Exists, p) => diamond_path(AgentSet::Full, p),
        Formula::Quant(PathQuantifier::Forall, p) => diamond_path(AgentSet::empty(), p),
        Formula::CoalitionMod {
            kind: Modality::Diamond,
            agents,
            path,
        } => diamond_path(agents.clone(), path),
        Formula::CoalitionMod {
            kind: Modality::Box,
            agents,
            path,
        } => box_path(agents.clone(), path),
    }
}

/// True when `f` only uses the constructs [`desugar`] emits.
pub fn is_desugared(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::Atom(_) => true,
        Formula::Not(g) => is_desugared(g),
        Formula::And(a, b) => is_desugared(a) && is_desugared(b),
        Formula::CoalitionMod {
            kind: Modality::Diamond,
            path,
            ..
        } => !matches!(path, Path::Finally(_)) && path.operands().all(is_desugared),
        _ => false,
    }
}
