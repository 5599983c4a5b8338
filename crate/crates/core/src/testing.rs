//! Seeded random models and formulas for property tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::logics::{AgentSet, Formula, Modality, Path, PathQuantifier};
use crate::models::{joint_product, Cgs, CgsSpec, Kripke, KripkeSpec, TransitionRow};

/// Shape bounds for [`random_cgs`].
#[derive(Debug, Clone, Copy)]
pub struct CgsShape {
    pub min_states: usize,
    pub max_states: usize,
    pub agents: usize,
    /// Declared actions per agent.
    pub actions: usize,
    /// Upper bound on actions available to one agent in one state.
    pub max_available: usize,
    pub atoms: usize,
}

impl Default for CgsShape {
    fn default() -> Self {
        Self {
            min_states: 1,
            max_states: 5,
            agents: 2,
            actions: 3,
            max_available: 2,
            atoms: 3,
        }
    }
}

pub const ATOMS: [&str; 4] = ["p", "q", "r", "goal"];
const ACTIONS: [&str; 4] = ["a", "b", "c", "d"];

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn random_labels<R: Rng>(rng: &mut R, states: &[String], atoms: &[String]) -> Vec<(String, Vec<String>)> {
    states
        .iter()
        .map(|s| {
            let held = atoms.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
            (s.clone(), held)
        })
        .collect()
}

/// A valid CGS with agents `A0..`, states `S0..` and atoms drawn from [`ATOMS`].
pub fn random_cgs<R: Rng>(rng: &mut R, shape: &CgsShape) -> Cgs {
    let n = rng.gen_range(shape.min_states..=shape.max_states);
    let states = names("S", n);
    let agents = names("A", shape.agents);
    let atoms: Vec<String> = ATOMS[..shape.atoms.min(ATOMS.len())]
        .iter()
        .map(|a| a.to_string())
        .collect();
    let declared: Vec<String> = ACTIONS[..shape.actions.min(ACTIONS.len())]
        .iter()
        .map(|a| a.to_string())
        .collect();
    let mut transitions = Vec::new();
    for s in &states {
        let avail: Vec<Vec<usize>> = (0..shape.agents)
            .map(|_| {
                let k = rng.gen_range(1..=shape.max_available.min(declared.len()));
                let mut picks: Vec<usize> = (0..declared.len()).collect();
                picks.shuffle(rng);
                picks.truncate(k);
                picks.sort_unstable();
                picks
            })
            .collect();
        for joint in joint_product(&avail) {
            transitions.push(TransitionRow {
                state: s.clone(),
                joint: joint.iter().map(|&a| declared[a].clone()).collect(),
                target: states[rng.gen_range(0..n)].clone(),
            });
        }
    }
    let mut initial: Vec<String> = states.iter().filter(|_| rng.gen_bool(0.3)).cloned().collect();
    if initial.is_empty() {
        initial.push(states[0].clone());
    }
    CgsSpec {
        labels: random_labels(rng, &states, &atoms),
        actions: agents.iter().map(|a| (a.clone(), declared.clone())).collect(),
        agents,
        initial,
        atoms,
        transitions,
        states,
    }
    .build()
    .expect("generated CGS is valid")
}

/// A valid Kripke structure with states `S0..` and atoms drawn from [`ATOMS`].
pub fn random_kripke<R: Rng>(rng: &mut R, max_states: usize, atoms: usize) -> Kripke {
    let n = rng.gen_range(1..=max_states);
    let states = names("S", n);
    let atoms: Vec<String> = ATOMS[..atoms.min(ATOMS.len())]
        .iter()
        .map(|a| a.to_string())
        .collect();
    let edges = states
        .iter()
        .map(|s| {
            let mut succ: Vec<String> = states.iter().filter(|_| rng.gen_bool(0.35)).cloned().collect();
            if succ.is_empty() {
                succ.push(states[rng.gen_range(0..n)].clone());
            }
            (s.clone(), succ)
        })
        .collect();
    KripkeSpec {
        labels: random_labels(rng, &states, &atoms),
        initial: vec![states[0].clone()],
        atoms,
        edges,
        states,
    }
    .build()
    .expect("generated Kripke structure is valid")
}

/// Bounds for [`random_formula`].
#[derive(Debug, Clone)]
pub struct FormulaShape {
    pub atoms: Vec<String>,
    /// Agents usable in coalitions; with none, only `E`/`A` are generated.
    pub agents: Vec<String>,
    pub max_depth: usize,
    pub max_modal_depth: usize,
}

impl FormulaShape {
    pub fn new(atoms: &[String], agents: &[String], max_depth: usize, max_modal_depth: usize) -> Self {
        Self {
            atoms: atoms.to_vec(),
            agents: agents.to_vec(),
            max_depth,
            max_modal_depth,
        }
    }

    pub fn for_cgs(g: &Cgs, max_depth: usize, max_modal_depth: usize) -> Self {
        Self::new(g.atoms(), g.agents(), max_depth, max_modal_depth)
    }
}

/// A random surface formula; every constructor the parser accepts can occur.
pub fn random_formula<R: Rng>(rng: &mut R, shape: &FormulaShape) -> Formula {
    gen(rng, shape, shape.max_depth, shape.max_modal_depth)
}

/// A random formula without modalities.
pub fn random_propositional<R: Rng>(rng: &mut R, atoms: &[String], depth: usize) -> Formula {
    gen(rng, &FormulaShape::new(atoms, &[], depth, 0), depth, 0)
}

fn leaf<R: Rng>(rng: &mut R, shape: &FormulaShape) -> Formula {
    match rng.gen_range(0..6) {
        0 => Formula::True,
        1 => Formula::False,
        _ if shape.atoms.is_empty() => Formula::True,
        _ => Formula::Atom(shape.atoms.choose(rng).unwrap().clone()),
    }
}

fn gen<R: Rng>(rng: &mut R, shape: &FormulaShape, depth: usize, modal: usize) -> Formula {
    if depth == 0 {
        return leaf(rng, shape);
    }
    let b = |f: Formula| Box::new(f);
    let kinds = if modal > 0 { 9 } else { 6 };
    match rng.gen_range(0..kinds) {
        0 => leaf(rng, shape),
        1 => Formula::Not(b(gen(rng, shape, depth - 1, modal))),
        2 => Formula::And(b(gen(rng, shape, depth - 1, modal)), b(gen(rng, shape, depth - 1, modal))),
        3 => Formula::Or(b(gen(rng, shape, depth - 1, modal)), b(gen(rng, shape, depth - 1, modal))),
        4 => Formula::Implies(b(gen(rng, shape, depth - 1, modal)), b(gen(rng, shape, depth - 1, modal))),
        5 => Formula::Iff(b(gen(rng, shape, depth - 1, modal)), b(gen(rng, shape, depth - 1, modal))),
        6 => Formula::Quant(
            if rng.gen() { PathQuantifier::Exists } else { PathQuantifier::Forall },
            gen_path(rng, shape, depth - 1, modal - 1),
        ),
        _ => Formula::CoalitionMod {
            kind: if rng.gen() { Modality::Diamond } else { Modality::Box },
            agents: random_coalition(rng, &shape.agents),
            path: gen_path(rng, shape, depth - 1, modal - 1),
        },
    }
}

fn gen_path<R: Rng>(rng: &mut R, shape: &FormulaShape, depth: usize, modal: usize) -> Path {
    let kind = rng.gen_range(0..4);
    let mut sub = || Box::new(gen(rng, shape, depth, modal));
    match kind {
        0 => Path::Next(sub()),
        1 => Path::Finally(sub()),
        2 => Path::Globally(sub()),
        _ => {
            let a = sub();
            Path::Until(a, sub())
        }
    }
}

/// A random subset of `agents`, in declaration order.
pub fn random_coalition<R: Rng>(rng: &mut R, agents: &[String]) -> AgentSet {
    AgentSet::Named(agents.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_respect_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let g = random_cgs(&mut rng, &CgsShape::default());
            assert!(g.state_count() <= 5 && g.agents().len() == 2);
            for s in 0..g.state_count() {
                assert!((0..2).all(|a| (1..=2).contains(&g.available(s, a).len())));
            }
            let f = random_formula(&mut rng, &FormulaShape::for_cgs(&g, 4, 3));
            assert!(f.modal_depth() <= 3 && f.depth() <= 5);
        }
    }
}
