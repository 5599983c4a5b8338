//! Brute-force ATL semantics for tiny games, used as a test oracle.
//!
//! At every strategic node all memoryless strategies of the coalition are
//! enumerated. For a fixed strategy the remaining behaviour is a finite
//! graph, and a path property holds on all of its plays iff it holds on every
//! lasso (simple prefix closed by a back edge) from the start state. Nothing
//! here shares code with the fixpoint evaluator or with desugaring.

use super::CheckError;
use crate::logics::{AgentSet, Formula, Modality, Path, PathQuantifier};
use crate::models::Cgs;
use crate::state_set::StateSet;

pub const MAX_STATES: usize = 7;
pub const MAX_AGENTS: usize = 2;
pub const MAX_AVAILABLE: usize = 3;

/// Oracle satisfaction set. Accepts surface formulas as well as desugared
/// ones (including `R` paths and the full-coalition marker).
pub fn oracle_atl(g: &Cgs, f: &Formula) -> Result<StateSet, CheckError> {
    let max_available = (0..g.state_count())
        .flat_map(|s| (0..g.agents().len()).map(move |a| (s, a)))
        .map(|(s, a)| g.available(s, a).len())
        .max()
        .unwrap_or(0);
    if g.state_count() > MAX_STATES || g.agents().len() > MAX_AGENTS || max_available > MAX_AVAILABLE
    {
        return Err(CheckError::SizeGuardExceeded {
            states: g.state_count(),
            agents: g.agents().len(),
            max_available,
        });
    }
    let truth = Oracle { g }.eval(f)?;
    Ok(StateSet::from_indices(
        g.state_count(),
        truth.iter().enumerate().filter(|(_, &t)| t).map(|(i, _)| i),
    ))
}

struct Oracle<'g> {
    g: &'g Cgs,
}

/// Path formula with its operands already evaluated to per-state truth.
enum Goal {
    Next(Vec<bool>),
    Finally(Vec<bool>),
    Globally(Vec<bool>),
    Until(Vec<bool>, Vec<bool>),
    Release(Vec<bool>, Vec<bool>),
}

impl Goal {
    /// Truth on the play `lasso[0..]` followed by `lasso[back..]` forever.
    fn holds_on(&self, lasso: &[usize], back: usize) -> bool {
        match self {
            Goal::Next(f) => {
                let second = if lasso.len() > 1 { lasso[1] } else { lasso[back] };
                f[second]
            }
            Goal::Finally(f) => lasso.iter().any(|&s| f[s]),
            Goal::Globally(f) => lasso.iter().all(|&s| f[s]),
            Goal::Until(hold, goal) => {
                for &s in lasso {
                    if goal[s] {
                        return true;
                    }
                    if !hold[s] {
                        return false;
                    }
                }
                false
            }
            Goal::Release(release, hold) => {
                for &s in lasso {
                    if !hold[s] {
                        return false;
                    }
                    if release[s] {
                        return true;
                    }
                }
                true
            }
        }
    }
}

impl<'g> Oracle<'g> {
    fn n(&self) -> usize {
        self.g.state_count()
    }

    fn eval(&self, f: &Formula) -> Result<Vec<bool>, CheckError> {
        let n = self.n();
        let pointwise = |a: Vec<bool>, b: Vec<bool>, op: fn(bool, bool) -> bool| {
            a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
        };
        Ok(match f {
            Formula::True => vec![true; n],
            Formula::False => vec![false; n],
            Formula::Atom(name) => {
                let atom = self
                    .g
                    .atom_index(name)
                    .ok_or_else(|| CheckError::UnknownAtom(name.clone()))?;
                (0..n).map(|s| self.g.label(s).contains(&atom)).collect()
            }
            Formula::Not(a) => self.eval(a)?.into_iter().map(|x| !x).collect(),
            Formula::And(a, b) => pointwise(self.eval(a)?, self.eval(b)?, |x, y| x && y),
            Formula::Or(a, b) => pointwise(self.eval(a)?, self.eval(b)?, |x, y| x || y),
            Formula::Implies(a, b) => pointwise(self.eval(a)?, self.eval(b)?, |x, y| !x || y),
            Formula::Iff(a, b) => pointwise(self.eval(a)?, self.eval(b)?, |x, y| x == y),
            Formula::Quant(q, path) => {
                let goal = self.goal(path)?;
                // one strategy with an empty coalition: the full move graph
                let all: Vec<Vec<usize>> = vec![Vec::new(); n];
                (0..n)
                    .map(|s| match q {
                        PathQuantifier::Exists => self.some_lasso(&[], &all, s, &goal),
                        PathQuantifier::Forall => !self.some_lasso_fails(&[], &all, s, &goal),
                    })
                    .collect()
            }
            Formula::CoalitionMod { kind, agents, path } => {
                let members: Vec<usize> = match agents {
                    AgentSet::Full => (0..self.g.agents().len()).collect(),
                    AgentSet::Named(names) => {
                        let mut m = names
                            .iter()
                            .map(|a| {
                                self.g
                                    .agent_index(a)
                                    .ok_or_else(|| CheckError::UnknownAgent(a.clone()))
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                        m.sort_unstable();
                        m.dedup();
                        m
                    }
                };
                let goal = self.goal(path)?;
                let strategies = self.strategies(&members);
                (0..n)
                    .map(|s| match kind {
                        // some strategy makes every play satisfy the goal
                        Modality::Diamond => strategies
                            .iter()
                            .any(|st| !self.some_lasso_fails(&members, st, s, &goal)),
                        // every strategy leaves some play satisfying the goal
                        Modality::Box => strategies
                            .iter()
                            .all(|st| self.some_lasso(&members, st, s, &goal)),
                    })
                    .collect()
            }
        })
    }

    fn goal(&self, path: &Path) -> Result<Goal, CheckError> {
        Ok(match path {
            Path::Next(f) => Goal::Next(self.eval(f)?),
            Path::Finally(f) => Goal::Finally(self.eval(f)?),
            Path::Globally(f) => Goal::Globally(self.eval(f)?),
            Path::Until(a, b) => Goal::Until(self.eval(a)?, self.eval(b)?),
            Path::Release(a, b) => Goal::Release(self.eval(a)?, self.eval(b)?),
        })
    }

    /// Every memoryless strategy of `members`: `[state][member]` action index.
    fn strategies(&self, members: &[usize]) -> Vec<Vec<Vec<usize>>> {
        let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
        for s in 0..self.n() {
            let mut local: Vec<Vec<usize>> = vec![Vec::new()];
            for &m in members {
                local = local
                    .into_iter()
                    .flat_map(|prefix| {
                        self.g.available(s, m).iter().map(move |&a| {
                            let mut v = prefix.clone();
                            v.push(a);
                            v
                        })
                    })
                    .collect();
            }
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    local.iter().map(move |choice| {
                        let mut v = prefix.clone();
                        v.push(choice.clone());
                        v
                    })
                })
                .collect();
        }
        out
    }

    fn successors(&self, members: &[usize], strategy: &[Vec<usize>], s: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .g
            .moves(s)
            .iter()
            .filter(|mv| {
                members
                    .iter()
                    .zip(&strategy[s])
                    .all(|(&m, &a)| mv.joint[m] == a)
            })
            .map(|mv| mv.target)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Depth-first search over lassos from `start`; stops at the first lasso
    /// on which `goal.holds_on` equals `want`.
    fn find_lasso(
        &self,
        members: &[usize],
        strategy: &[Vec<usize>],
        start: usize,
        goal: &Goal,
        want: bool,
    ) -> bool {
        fn dfs(
            o: &Oracle<'_>,
            members: &[usize],
            strategy: &[Vec<usize>],
            stack: &mut Vec<usize>,
            goal: &Goal,
            want: bool,
        ) -> bool {
            let top = *stack.last().unwrap();
            for t in o.successors(members, strategy, top) {
                if let Some(back) = stack.iter().position(|&x| x == t) {
                    if goal.holds_on(stack, back) == want {
                        return true;
                    }
                } else {
                    stack.push(t);
                    let found = dfs(o, members, strategy, stack, goal, want);
                    stack.pop();
                    if found {
                        return true;
                    }
                }
            }
            false
        }
        let mut stack = vec![start];
        dfs(self, members, strategy, &mut stack, goal, want)
    }

    fn some_lasso(&self, members: &[usize], strategy: &[Vec<usize>], s: usize, goal: &Goal) -> bool {
        self.find_lasso(members, strategy, s, goal, true)
    }

    fn some_lasso_fails(
        &self,
        members: &[usize],
        strategy: &[Vec<usize>],
        s: usize,
        goal: &Goal,
    ) -> bool {
        self.find_lasso(members, strategy, s, goal, false)
    }
}
