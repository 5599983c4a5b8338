use serde::Serialize;

use super::fixpoint::{check_names, AtlEvaluator};
use super::CheckError;
use crate::logics::{desugar, Formula, Modality, Path};
use crate::models::{Cgs, Coalition};
use crate::state_set::StateSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrategyChoice {
    pub state: String,
    /// One action per coalition member, in member order.
    pub actions: Vec<String>,
    /// Whether the choice is backed by the fixpoint (the state satisfies
    /// the goal). Uncertified choices are the first available actions.
    pub certified: bool,
}

/// A memoryless strategy for a coalition, defined on every state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MemorylessStrategy {
    pub coalition: Vec<String>,
    pub choices: Vec<StrategyChoice>,
}

impl MemorylessStrategy {
    pub fn action(&self, state: &str, agent: &str) -> Option<&str> {
        let member = self.coalition.iter().position(|a| a == agent)?;
        self.choices
            .iter()
            .find(|c| c.state == state)
            .map(|c| c.actions[member].as_str())
    }

    /// Choice table by index: `[state][member]` action index.
    pub fn indices(&self, g: &Cgs) -> Vec<Vec<usize>> {
        let members: Vec<usize> = self
            .coalition
            .iter()
            .map(|a| g.agent_index(a).expect("strategy agent belongs to the game"))
            .collect();
        self.choices
            .iter()
            .map(|c| {
                c.actions
                    .iter()
                    .zip(&members)
                    .map(|(act, &m)| g.action_index(m, act).expect("declared action"))
                    .collect()
            })
            .collect()
    }
}

fn build(
    g: &Cgs,
    coalition: &Coalition,
    winning: &StateSet,
    mut choose: impl FnMut(usize) -> Option<Vec<usize>>,
) -> MemorylessStrategy {
    let members = coalition.members();
    let choices = (0..g.state_count())
        .map(|s| {
            let picked = if winning.contains(s) { choose(s) } else { None };
            let certified = picked.is_some();
            let picked =
                picked.unwrap_or_else(|| members.iter().map(|&a| g.available(s, a)[0]).collect());
            StrategyChoice {
                state: g.states()[s].clone(),
                actions: picked
                    .iter()
                    .zip(members)
                    .map(|(&act, &a)| g.actions(a)[act].clone())
                    .collect(),
                certified,
            }
        })
        .collect();
    MemorylessStrategy {
        coalition: members.iter().map(|&a| g.agents()[a].clone()).collect(),
        choices,
    }
}

/// Extracts a memoryless strategy for the top-level coalition of `f` that
/// wins from every state in `from`. Absent when `f` is not a diamond
/// modality after desugaring, or when some state of `from` does not
/// satisfy `f`. For the empty coalition the strategy has no choices to make.
///
/// For `U` goals the choice at a state of rank `k` leads into rank `k - 1`,
/// so playing it reaches the goal in at most `k` steps; for `G` and `R` it
/// stays inside the fixpoint. Ties go to the least action vector.
pub fn extract_witness(
    g: &Cgs,
    f: &Formula,
    from: &[usize],
) -> Result<Option<MemorylessStrategy>, CheckError> {
    check_names(g, f)?;
    let f = desugar(f);
    let Formula::CoalitionMod {
        kind: Modality::Diamond,
        agents,
        path,
    } = &f
    else {
        return Ok(None);
    };
    let mut ev = AtlEvaluator::new(g);
    let coalition = ev.coalition(agents)?;
    let strategy = match path {
        Path::Next(sub) => {
            let target = ev.eval(sub)?;
            let winning = ev.pre(&coalition, &target);
            if !from.iter().all(|&s| winning.contains(s)) {
                return Ok(None);
            }
            build(g, &coalition, &winning, |s| {
                ev.forcing_choice(s, &coalition, &target)
            })
        }
        Path::Until(hold, goal) => {
            let hold = ev.eval(hold)?;
            let goal = ev.eval(goal)?;
            let history = ev.until_iterates(&coalition, &hold, &goal);
            let winning = history.last().unwrap().clone();
            if !from.iter().all(|&s| winning.contains(s)) {
                return Ok(None);
            }
            build(g, &coalition, &winning, |s| {
                let rank = history.iter().position(|z| z.contains(s))?;
                if rank == 0 {
                    // goal already holds; any choice will do
                    return Some(
                        coalition
                            .members()
                            .iter()
                            .map(|&a| g.available(s, a)[0])
                            .collect(),
                    );
                }
                ev.forcing_choice(s, &coalition, &history[rank - 1])
            })
        }
        Path::Globally(hold) => {
            let hold = ev.eval(hold)?;
            let winning = ev.globally(&coalition, &hold);
            if !from.iter().all(|&s| winning.contains(s)) {
                return Ok(None);
            }
            build(g, &coalition, &winning, |s| {
                ev.forcing_choice(s, &coalition, &winning)
            })
        }
        Path::Release(release, hold) => {
            let release = ev.eval(release)?;
            let hold = ev.eval(hold)?;
            let winning = ev.release(&coalition, &release, &hold);
            if !from.iter().all(|&s| winning.contains(s)) {
                return Ok(None);
            }
            build(g, &coalition, &winning, |s| {
                if release.contains(s) {
                    Some(
                        coalition
                            .members()
                            .iter()
                            .map(|&a| g.available(s, a)[0])
                            .collect(),
                    )
                } else {
                    ev.forcing_choice(s, &coalition, &winning)
                }
            })
        }
        Path::Finally(_) => unreachable!("desugared"),
    };
    Ok(Some(strategy))
}
