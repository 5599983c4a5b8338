#![allow(dead_code)]

use agentcheck_core::checkers::MemorylessStrategy;
use agentcheck_core::models::Cgs;
use agentcheck_core::testing::{random_cgs, random_formula, CgsShape, FormulaShape};
use agentcheck_core::logics::Formula;
use agentcheck_core::StateSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn game(seed: u64) -> Cgs {
    random_cgs(&mut rng(seed), &CgsShape::default())
}

/// A game and a formula of modal depth at most 3 over its alphabet.
pub fn game_and_formula(seed: u64) -> (Cgs, Formula) {
    let mut r = rng(seed);
    let g = random_cgs(&mut r, &CgsShape::default());
    let f = random_formula(&mut r, &FormulaShape::for_cgs(&g, 4, 3));
    (g, f)
}

/// Whether every play from `start` consistent with `strategy` enters `goal`
/// within `steps` moves while staying in `hold` before that.
pub fn strategy_forces_until(
    g: &Cgs,
    strategy: &MemorylessStrategy,
    hold: &StateSet,
    goal: &StateSet,
    start: usize,
    steps: usize,
) -> bool {
    let members: Vec<usize> = strategy
        .coalition
        .iter()
        .map(|a| g.agent_index(a).unwrap())
        .collect();
    let choice = strategy.indices(g);
    fn go(
        g: &Cgs,
        members: &[usize],
        choice: &[Vec<usize>],
        hold: &StateSet,
        goal: &StateSet,
        s: usize,
        steps: usize,
    ) -> bool {
        if goal.contains(s) {
            return true;
        }
        if steps == 0 || !hold.contains(s) {
            return false;
        }
        g.moves(s)
            .iter()
            .filter(|mv| members.iter().zip(&choice[s]).all(|(&m, &a)| mv.joint[m] == a))
            .all(|mv| go(g, members, choice, hold, goal, mv.target, steps - 1))
    }
    go(g, &members, &choice, hold, goal, start, steps)
}
