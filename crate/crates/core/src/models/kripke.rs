//! Kripke structures and the joint-action erasure of a CGS.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::cgs::{Cgs, CgsSpec, TransitionRow};
use super::error::{ValidationErrors, Violation};
use super::{check_identifiers, index_names};
use crate::state_set::StateSet;

/// Name of the single agent in [`Kripke::game_view`]. The leading underscore
/// keeps it clear of anything a user would name an agent in a formula.
pub const VIEW_AGENT: &str = "_sys";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KripkeSpec {
    pub states: Vec<String>,
    pub initial: Vec<String>,
    pub atoms: Vec<String>,
    pub labels: Vec<(String, Vec<String>)>,
    /// `(source, successors)`; several entries for one source are merged.
    pub edges: Vec<(String, Vec<String>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kripke {
    states: Vec<String>,
    initial: Vec<usize>,
    atoms: Vec<String>,
    labels: Vec<Vec<usize>>,
    succ: Vec<Vec<usize>>,
}

impl KripkeSpec {
    pub fn build(&self) -> Result<Kripke, ValidationErrors> {
        let mut errs = Vec::new();
        check_identifiers(
            self.states
                .iter()
                .chain(&self.initial)
                .chain(&self.atoms)
                .chain(self.labels.iter().flat_map(|(s, a)| std::iter::once(s).chain(a)))
                .chain(self.edges.iter().flat_map(|(s, t)| std::iter::once(s).chain(t))),
            &mut errs,
        );
        let state_ix = index_names(&self.states, "state", &mut errs);
        let atom_ix = index_names(&self.atoms, "atom", &mut errs);

        if self.states.is_empty() {
            errs.push(Violation::NonEmpty { what: "states" });
        }
        if self.initial.is_empty() {
            errs.push(Violation::NonEmpty {
                what: "initial states",
            });
        }

        let lookup = |name: &String, context: &'static str, errs: &mut Vec<Violation>| {
            let found = state_ix.get(name.as_str()).copied();
            if found.is_none() {
                errs.push(Violation::KnownState {
                    context,
                    state: name.clone(),
                });
            }
            found
        };

        let initial: BTreeSet<usize> = self
            .initial
            .iter()
            .filter_map(|s| lookup(s, "Initial", &mut errs))
            .collect();

        let mut labels = vec![BTreeSet::new(); self.states.len()];
        for (s, ats) in &self.labels {
            let Some(si) = lookup(s, "Label", &mut errs) else {
                continue;
            };
            for a in ats {
                match atom_ix.get(a.as_str()) {
                    Some(&ai) => {
                        labels[si].insert(ai);
                    }
                    None => errs.push(Violation::DeclaredAtom {
                        state: s.clone(),
                        atom: a.clone(),
                    }),
                }
            }
        }

        let mut succ = vec![BTreeSet::new(); self.states.len()];
        for (src, targets) in &self.edges {
            let from = lookup(src, "Edge", &mut errs);
            for t in targets {
                if let (Some(from), Some(to)) = (from, lookup(t, "Edge target", &mut errs)) {
                    succ[from].insert(to);
                }
            }
        }
        for (s, out) in succ.iter().enumerate() {
            if out.is_empty() {
                errs.push(Violation::Totality {
                    state: self.states[s].clone(),
                });
            }
        }

        if !errs.is_empty() {
            return Err(ValidationErrors(errs));
        }
        Ok(Kripke {
            states: self.states.clone(),
            initial: initial.into_iter().collect(),
            atoms: self.atoms.clone(),
            labels: labels.into_iter().map(|l| l.into_iter().collect()).collect(),
            succ: succ.into_iter().map(|l| l.into_iter().collect()).collect(),
        })
    }
}

impl Kripke {
    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn label(&self, state: usize) -> &[usize] {
        &self.labels[state]
    }

    /// Successors of `state`, ascending.
    pub fn successors(&self, state: usize) -> &[usize] {
        &self.succ[state]
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == name)
    }

    pub fn atom_states(&self, atom: usize) -> StateSet {
        StateSet::from_indices(
            self.state_count(),
            (0..self.state_count()).filter(|&s| self.labels[s].contains(&atom)),
        )
    }

    pub fn to_spec(&self) -> KripkeSpec {
        KripkeSpec {
            states: self.states.clone(),
            initial: self.initial.iter().map(|&i| self.states[i].clone()).collect(),
            atoms: self.atoms.clone(),
            labels: self
                .labels
                .iter()
                .enumerate()
                .filter(|(_, l)| !l.is_empty())
                .map(|(s, l)| {
                    (
                        self.states[s].clone(),
                        l.iter().map(|&a| self.atoms[a].clone()).collect(),
                    )
                })
                .collect(),
            edges: self
                .succ
                .iter()
                .enumerate()
                .map(|(s, out)| {
                    (
                        self.states[s].clone(),
                        out.iter().map(|&t| self.states[t].clone()).collect(),
                    )
                })
                .collect(),
        }
    }

    /// One-agent game whose single agent picks the successor: the agent's
    /// actions are named after the states, and the action available in `s`
    /// are exactly the successors of `s`.
    pub fn game_view(&self) -> Cgs {
        let spec = CgsSpec {
            agents: vec![VIEW_AGENT.to_string()],
            states: self.states.clone(),
            initial: self.initial.iter().map(|&i| self.states[i].clone()).collect(),
            atoms: self.atoms.clone(),
            labels: self.to_spec().labels,
            actions: vec![(VIEW_AGENT.to_string(), self.states.clone())],
            transitions: self
                .succ
                .iter()
                .enumerate()
                .flat_map(|(s, out)| {
                    out.iter().map(move |&t| TransitionRow {
                        state: self.states[s].clone(),
                        joint: vec![self.states[t].clone()],
                        target: self.states[t].clone(),
                    })
                })
                .collect(),
        };
        spec.build()
            .expect("a valid Kripke structure always yields a valid one-agent game")
    }
}

/// Erases joint actions: `s -> t` iff some joint action leads from `s` to `t`.
pub fn kripke_of_cgs(g: &Cgs) -> Kripke {
    let n = g.state_count();
    Kripke {
        states: g.states().to_vec(),
        initial: g.initial().to_vec(),
        atoms: g.atoms().to_vec(),
        labels: (0..n).map(|s| g.label(s).to_vec()).collect(),
        succ: (0..n)
            .map(|s| {
                let out: BTreeSet<usize> = g.moves(s).iter().map(|m| m.target).collect();
                out.into_iter().collect()
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::fixtures::m1;

    fn names(k: &Kripke, s: usize) -> Vec<&str> {
        k.successors(s).iter().map(|&t| k.states()[t].as_str()).collect()
    }

    #[test]
    fn projection_of_m1() {
        let g = m1();
        let k = kripke_of_cgs(&g);
        assert_eq!(names(&k, 0), vec!["S0", "S1", "S2"]);
        assert!(names(&k, 1).contains(&"S3"));
        assert_eq!(names(&k, 3), vec!["S3"]);
        assert_eq!(k.states(), g.states());
        assert_eq!(k.initial(), g.initial());
        assert_eq!(k.atoms(), g.atoms());
        for s in 0..g.state_count() {
            assert_eq!(k.label(s), g.label(s));
        }
        assert!(k.edge_count() <= g.transition_count());
    }

    #[test]
    fn single_agent_single_action_gives_one_successor() {
        let spec = CgsSpec {
            agents: vec!["a".into()],
            states: vec!["s".into(), "t".into()],
            initial: vec!["s".into()],
            actions: vec![("a".into(), vec!["go".into()])],
            transitions: vec![
                TransitionRow {
                    state: "s".into(),
                    joint: vec!["go".into()],
                    target: "t".into(),
                },
                TransitionRow {
                    state: "t".into(),
                    joint: vec!["go".into()],
                    target: "s".into(),
                },
            ],
            ..Default::default()
        };
        let k = kripke_of_cgs(&spec.build().unwrap());
        assert!((0..2).all(|s| k.successors(s).len() == 1));
    }

    #[test]
    fn game_view_round_trips_edges() {
        let k = kripke_of_cgs(&m1());
        let view = k.game_view();
        assert_eq!(kripke_of_cgs(&view), k);
        assert_eq!(view.agents(), [VIEW_AGENT]);
    }

    #[test]
    fn deadlock_and_unknown_edges_rejected() {
        let spec = KripkeSpec {
            states: vec!["a".into(), "b".into()],
            initial: vec!["a".into()],
            edges: vec![("a".into(), vec!["c".into()])],
            ..Default::default()
        };
        let errs = spec.build().unwrap_err();
        let kinds: Vec<_> = errs.iter().map(Violation::invariant).collect();
        assert_eq!(kinds, vec!["known-state", "totality", "totality"]);
    }
}
