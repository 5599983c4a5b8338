//! Explicit fixpoint evaluation of ATL over a CGS.
//!
//! Satisfaction sets are computed bottom-up. Diamond modalities reduce to
//! the controllable predecessor `pre(A, Q)`: the states where the coalition
//! has a joint choice such that every completion by the other agents lands
//! in `Q`.
//!
//! * `<A> X f` = `pre(A, [[f]])`
//! * `<A> (f U g)` = least `Z` with `Z = [[g]] | ([[f]] & pre(A, Z))`
//! * `<A> G f` = greatest `Z` with `Z = [[f]] & pre(A, Z)`
//! * `<A> (f R g)` = greatest `Z` with `Z = [[g]] & ([[f]] | pre(A, Z))`

use std::collections::BTreeMap;

use super::CheckError;
use crate::logics::{desugar, AgentSet, Formula, Modality, Path};
use crate::models::{Cgs, Coalition, Kripke};
use crate::state_set::StateSet;

/// Iteration counters, for asserting the termination bound.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FixpointStats {
    pub fixpoints: usize,
    /// Largest number of iterates computed by any single fixpoint, counting
    /// the final one that confirms stabilization.
    pub max_iterations: usize,
}

pub struct AtlEvaluator<'g> {
    game: &'g Cgs,
    stats: FixpointStats,
}

impl<'g> AtlEvaluator<'g> {
    pub fn new(game: &'g Cgs) -> Self {
        Self {
            game,
            stats: FixpointStats::default(),
        }
    }

    pub fn game(&self) -> &'g Cgs {
        self.game
    }

    pub fn stats(&self) -> FixpointStats {
        self.stats
    }

    pub fn coalition(&self, agents: &AgentSet) -> Result<Coalition, CheckError> {
        match agents {
            AgentSet::Full => Ok(Coalition::grand(self.game.agents().len())),
            AgentSet::Named(names) => self.game.coalition(names).map_err(CheckError::UnknownAgent),
        }
    }

    /// Coalition choices at `state` that force the successor into `target`,
    /// keyed by the coalition's action vector in ascending order.
    fn forcing(&self, state: usize, coalition: &Coalition, target: &StateSet) -> BTreeMap<Vec<usize>, bool> {
        let mut verdict: BTreeMap<Vec<usize>, bool> = BTreeMap::new();
        for mv in self.game.moves(state) {
            let key: Vec<usize> = coalition.members().iter().map(|&a| mv.joint[a]).collect();
            *verdict.entry(key).or_insert(true) &= target.contains(mv.target);
        }
        verdict
    }

    pub fn pre(&self, coalition: &Coalition, target: &StateSet) -> StateSet {
        let n = self.game.state_count();
        StateSet::from_indices(
            n,
            (0..n).filter(|&s| self.forcing(s, coalition, target).values().any(|&v| v)),
        )
    }

    /// Least coalition action vector (members in agent order, actions in
    /// declaration order) forcing the successor of `state` into `target`.
    pub fn forcing_choice(
        &self,
        state: usize,
        coalition: &Coalition,
        target: &StateSet,
    ) -> Option<Vec<usize>> {
        self.forcing(state, coalition, target)
            .into_iter()
            .find_map(|(choice, ok)| ok.then_some(choice))
    }

    fn record(&mut self, iterations: usize) {
        self.stats.fixpoints += 1;
        self.stats.max_iterations = self.stats.max_iterations.max(iterations);
    }

    /// Iterates `Z0 = goal`, `Zk+1 = Zk | (hold & pre(Zk))` up to the fixpoint.
    /// The returned history ends with the fixpoint; a state's rank is the
    /// index of the first iterate containing it.
    pub fn until_iterates(
        &mut self,
        coalition: &Coalition,
        hold: &StateSet,
        goal: &StateSet,
    ) -> Vec<StateSet> {
        let mut history = vec![goal.clone()];
        loop {
            let z = history.last().unwrap();
            let next = z.union(&hold.intersection(&self.pre(coalition, z)));
            let stable = &next == z;
            if stable {
                self.record(history.len());
                return history;
            }
            history.push(next);
        }
    }

    fn greatest(&mut self, start: StateSet, step: impl Fn(&Self, &StateSet) -> StateSet) -> StateSet {
        let mut z = start;
        let mut iterations = 0;
        loop {
            iterations += 1;
            let next = step(self, &z);
            if next == z {
                self.record(iterations);
                return z;
            }
            z = next;
        }
    }

    pub fn globally(&mut self, coalition: &Coalition, hold: &StateSet) -> StateSet {
        self.greatest(hold.clone(), |ev, z| z.intersection(&ev.pre(coalition, z)))
    }

    /// `<A> (release R hold)`: `hold` is kept until a `release & hold` state, or forever.
    pub fn release(&mut self, coalition: &Coalition, release: &StateSet, hold: &StateSet) -> StateSet {
        self.greatest(hold.clone(), |ev, z| {
            z.intersection(&release.union(&ev.pre(coalition, z)))
        })
    }

    /// Evaluates a formula in the desugared basis.
    pub fn eval(&mut self, f: &Formula) -> Result<StateSet, CheckError> {
        let n = self.game.state_count();
        match f {
            Formula::True => Ok(StateSet::full(n)),
            Formula::Atom(a) => self
                .game
                .atom_index(a)
                .map(|i| self.game.atom_states(i))
                .ok_or_else(|| CheckError::UnknownAtom(a.clone())),
            Formula::Not(g) => Ok(self.eval(g)?.complement()),
            Formula::And(a, b) => Ok(self.eval(a)?.intersection(&self.eval(b)?)),
            Formula::CoalitionMod {
                kind: Modality::Diamond,
                agents,
                path,
            } => {
                let coalition = self.coalition(agents)?;
                match path {
                    Path::Next(g) => {
                        let target = self.eval(g)?;
                        Ok(self.pre(&coalition, &target))
                    }
                    Path::Until(a, b) => {
                        let hold = self.eval(a)?;
                        let goal = self.eval(b)?;
                        Ok(self
                            .until_iterates(&coalition, &hold, &goal)
                            .pop()
                            .expect("history is never empty"))
                    }
                    Path::Globally(g) => {
                        let hold = self.eval(g)?;
                        Ok(self.globally(&coalition, &hold))
                    }
                    Path::Release(a, b) => {
                        let release = self.eval(a)?;
                        let hold = self.eval(b)?;
                        Ok(self.release(&coalition, &release, &hold))
                    }
                    Path::Finally(_) => Err(CheckError::NotDesugared(f.to_string())),
                }
            }
            _ => Err(CheckError::NotDesugared(f.to_string())),
        }
    }
}

/// Checks that every atom and agent named by `f` exists in `g`.
pub fn check_names(g: &Cgs, f: &Formula) -> Result<(), CheckError> {
    if let Some(a) = f.atoms().into_iter().find(|a| g.atom_index(a).is_none()) {
        return Err(CheckError::UnknownAtom(a.to_string()));
    }
    if let Some(a) = f.agents().into_iter().find(|a| g.agent_index(a).is_none()) {
        return Err(CheckError::UnknownAgent(a.to_string()));
    }
    Ok(())
}

/// Controllable predecessor of `target` for `coalition`.
pub fn pre_coalition(g: &Cgs, coalition: &Coalition, target: &StateSet) -> StateSet {
    AtlEvaluator::new(g).pre(coalition, target)
}

/// Satisfaction set of an ATL formula (any surface form; it is desugared here).
pub fn eval_atl(g: &Cgs, f: &Formula) -> Result<StateSet, CheckError> {
    eval_atl_with_stats(g, f).map(|(set, _)| set)
}

pub fn eval_atl_with_stats(g: &Cgs, f: &Formula) -> Result<(StateSet, FixpointStats), CheckError> {
    check_names(g, f)?;
    let mut ev = AtlEvaluator::new(g);
    let set = ev.eval(&desugar(f))?;
    Ok((set, ev.stats()))
}

/// Satisfaction set of a CTL formula, via the one-agent game view of `k`
/// where `E` is the full coalition and `A` the empty one.
pub fn eval_ctl(k: &Kripke, f: &Formula) -> Result<StateSet, CheckError> {
    eval_ctl_with_stats(k, f).map(|(set, _)| set)
}

pub fn eval_ctl_with_stats(k: &Kripke, f: &Formula) -> Result<(StateSet, FixpointStats), CheckError> {
    if let Some(agent) = f.agents().into_iter().next() {
        return Err(CheckError::UnknownAgent(agent.to_string()));
    }
    if let Some(a) = f.atoms().into_iter().find(|a| k.atom_index(a).is_none()) {
        return Err(CheckError::UnknownAtom(a.to_string()));
    }
    eval_atl_with_stats(&k.game_view(), f)
}
