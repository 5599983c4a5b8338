//! Concurrent game structures.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::error::{ValidationErrors, Violation};
use super::{check_identifiers, index_names};
use crate::state_set::StateSet;

/// One row of the transition table, by name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TransitionRow {
    pub state: String,
    pub joint: Vec<String>,
    pub target: String,
}

/// Unvalidated, name-based description of a CGS. This is what the text
/// parser and the wizard accumulate; [`CgsSpec::build`] turns it into a
/// [`Cgs`] or reports every violated invariant.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CgsSpec {
    pub agents: Vec<String>,
    pub states: Vec<String>,
    pub initial: Vec<String>,
    pub atoms: Vec<String>,
    /// `(state, atoms)` pairs; several entries for one state are merged.
    pub labels: Vec<(String, Vec<String>)>,
    /// `(agent, actions)` in declaration order.
    pub actions: Vec<(String, Vec<String>)>,
    pub transitions: Vec<TransitionRow>,
}

/// A transition out of some state: one action index per agent, and the target.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Move {
    pub joint: Vec<usize>,
    pub target: usize,
}

/// A validated concurrent game structure. States, agents, atoms and actions
/// are addressed by their declaration index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cgs {
    agents: Vec<String>,
    states: Vec<String>,
    initial: Vec<usize>,
    atoms: Vec<String>,
    labels: Vec<Vec<usize>>,
    actions: Vec<Vec<String>>,
    // per state, sorted by joint vector
    moves: Vec<Vec<Move>>,
    // [state][agent] -> sorted action indices
    avail: Vec<Vec<Vec<usize>>>,
}

/// A set of agents, by index, kept sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Coalition {
    members: Vec<usize>,
}

impl Coalition {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn grand(agent_count: usize) -> Self {
        Self {
            members: (0..agent_count).collect(),
        }
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = indices.into_iter().collect();
        Self {
            members: set.into_iter().collect(),
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, agent: usize) -> bool {
        self.members.binary_search(&agent).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_subset(&self, other: &Coalition) -> bool {
        self.members.iter().all(|m| other.contains(*m))
    }
}

impl CgsSpec {
    pub fn build(&self) -> Result<Cgs, ValidationErrors> {
        let mut errs = Vec::new();

        check_identifiers(
            self.agents
                .iter()
                .chain(&self.states)
                .chain(&self.initial)
                .chain(&self.atoms)
                .chain(self.labels.iter().flat_map(|(s, ats)| std::iter::once(s).chain(ats)))
                .chain(self.actions.iter().flat_map(|(a, acts)| std::iter::once(a).chain(acts)))
                .chain(self.transitions.iter().flat_map(|r| {
                    std::iter::once(&r.state)
                        .chain(&r.joint)
                        .chain(std::iter::once(&r.target))
                })),
            &mut errs,
        );

        let agent_ix = index_names(&self.agents, "agent", &mut errs);
        let state_ix = index_names(&self.states, "state", &mut errs);
        let atom_ix = index_names(&self.atoms, "atom", &mut errs);

        if self.agents.is_empty() {
            errs.push(Violation::NonEmpty { what: "agents" });
        }
        if self.states.is_empty() {
            errs.push(Violation::NonEmpty { what: "states" });
        }
        if self.initial.is_empty() {
            errs.push(Violation::NonEmpty {
                what: "initial states",
            });
        }

        let mut initial = BTreeSet::new();
        for s in &self.initial {
            match state_ix.get(s.as_str()) {
                Some(&i) => {
                    initial.insert(i);
                }
                None => errs.push(Violation::KnownState {
                    context: "Initial",
                    state: s.clone(),
                }),
            }
        }

        let mut labels = vec![BTreeSet::new(); self.states.len()];
        for (s, ats) in &self.labels {
            let Some(&si) = state_ix.get(s.as_str()) else {
                errs.push(Violation::KnownState {
                    context: "Label",
                    state: s.clone(),
                });
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

        let mut actions: Vec<Option<Vec<String>>> = vec![None; self.agents.len()];
        for (agent, acts) in &self.actions {
            let Some(&ai) = agent_ix.get(agent.as_str()) else {
                errs.push(Violation::KnownAgent {
                    agent: agent.clone(),
                });
                continue;
            };
            if actions[ai].is_some() {
                errs.push(Violation::UniqueNames {
                    kind: "action list for agent",
                    name: agent.clone(),
                });
                continue;
            }
            index_names(acts, "action", &mut errs);
            actions[ai] = Some(acts.clone());
        }
        let actions: Vec<Vec<String>> = actions
            .into_iter()
            .enumerate()
            .map(|(i, a)| {
                let a = a.unwrap_or_default();
                if a.is_empty() {
                    errs.push(Violation::DeclaredActions {
                        agent: self.agents[i].clone(),
                    });
                }
                a
            })
            .collect();
        let action_ix: Vec<HashMap<&str, usize>> = actions
            .iter()
            .map(|acts| {
                acts.iter()
                    .enumerate()
                    .map(|(i, a)| (a.as_str(), i))
                    .rev()
                    .collect()
            })
            .collect();

        // (state, joint) -> distinct targets, in first-seen order
        let mut table: BTreeMap<(usize, Vec<usize>), Vec<usize>> = BTreeMap::new();
        for row in &self.transitions {
            let mut ok = true;
            let src = state_ix.get(row.state.as_str()).copied();
            if src.is_none() {
                errs.push(Violation::KnownState {
                    context: "Transition",
                    state: row.state.clone(),
                });
                ok = false;
            }
            let dst = state_ix.get(row.target.as_str()).copied();
            if dst.is_none() {
                errs.push(Violation::KnownState {
                    context: "Transition target",
                    state: row.target.clone(),
                });
                ok = false;
            }
            if row.joint.len() != self.agents.len() {
                errs.push(Violation::Arity {
                    state: row.state.clone(),
                    expected: self.agents.len(),
                    found: row.joint.len(),
                });
                continue;
            }
            let mut joint = Vec::with_capacity(row.joint.len());
            for (agent, act) in row.joint.iter().enumerate() {
                match action_ix[agent].get(act.as_str()) {
                    Some(&i) => joint.push(i),
                    None => {
                        errs.push(Violation::DeclaredAction {
                            state: row.state.clone(),
                            agent: self.agents[agent].clone(),
                            action: act.clone(),
                        });
                        ok = false;
                    }
                }
            }
            if let (true, Some(src), Some(dst)) = (ok, src, dst) {
                let targets = table.entry((src, joint)).or_default();
                if !targets.contains(&dst) {
                    targets.push(dst);
                }
            }
        }

        let n = self.states.len();
        let mut moves: Vec<Vec<Move>> = vec![Vec::new(); n];
        for ((src, joint), targets) in &table {
            if targets.len() > 1 {
                errs.push(Violation::Determinism {
                    state: self.states[*src].clone(),
                    joint: joint
                        .iter()
                        .enumerate()
                        .map(|(a, &i)| actions[a][i].clone())
                        .collect(),
                    targets: targets.iter().map(|&t| self.states[t].clone()).collect(),
                });
            }
            moves[*src].push(Move {
                joint: joint.clone(),
                target: targets[0],
            });
        }

        let mut avail = Vec::with_capacity(n);
        for (s, state_moves) in moves.iter().enumerate() {
            if state_moves.is_empty() {
                if !self.agents.is_empty() {
                    errs.push(Violation::Totality {
                        state: self.states[s].clone(),
                    });
                }
                avail.push(vec![Vec::new(); self.agents.len()]);
                continue;
            }
            let per_agent: Vec<Vec<usize>> = (0..self.agents.len())
                .map(|a| {
                    let set: BTreeSet<usize> = state_moves.iter().map(|m| m.joint[a]).collect();
                    set.into_iter().collect()
                })
                .collect();
            let present: BTreeSet<&[usize]> =
                state_moves.iter().map(|m| m.joint.as_slice()).collect();
            for joint in joint_product(&per_agent) {
                if !present.contains(joint.as_slice()) {
                    errs.push(Violation::ProductClosure {
                        state: self.states[s].clone(),
                        joint: joint
                            .iter()
                            .enumerate()
                            .map(|(a, &i)| actions[a][i].clone())
                            .collect(),
                    });
                }
            }
            avail.push(per_agent);
        }

        if !errs.is_empty() {
            return Err(ValidationErrors(errs));
        }

        Ok(Cgs {
            agents: self.agents.clone(),
            states: self.states.clone(),
            initial: initial.into_iter().collect(),
            atoms: self.atoms.clone(),
            labels: labels
                .into_iter()
                .map(|l| l.into_iter().collect())
                .collect(),
            actions,
            moves,
            avail,
        })
    }
}

/// Every joint action vector choosing one name from each list, in
/// lexicographic order of list positions.
pub fn joint_names_product(choices: &[Vec<String>]) -> Vec<Vec<String>> {
    let indices: Vec<Vec<usize>> = choices.iter().map(|c| (0..c.len()).collect()).collect();
    joint_product(&indices)
        .into_iter()
        .map(|joint| joint.iter().zip(choices).map(|(&i, c)| c[i].clone()).collect())
        .collect()
}

/// All vectors in the cartesian product of `choices`, lexicographically.
pub(crate) fn joint_product(choices: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(choices.len())];
    for options in choices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |&o| {
                    let mut v = prefix.clone();
                    v.push(o);
                    v
                })
            })
            .collect();
    }
    out
}

impl Cgs {
    pub fn agents(&self) -> &[String] {
        &self.agents
    }

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

    /// Atom indices holding in `state`, ascending.
    pub fn label(&self, state: usize) -> &[usize] {
        &self.labels[state]
    }

    pub fn actions(&self, agent: usize) -> &[String] {
        &self.actions[agent]
    }

    pub fn moves(&self, state: usize) -> &[Move] {
        &self.moves[state]
    }

    pub fn transition_count(&self) -> usize {
        self.moves.iter().map(Vec::len).sum()
    }

    /// Actions `agent` can take in `state`, as ascending action indices.
    pub fn available(&self, state: usize, agent: usize) -> &[usize] {
        &self.avail[state][agent]
    }

    /// Name-based view of [`Cgs::available`].
    pub fn available_actions(&self, state: &str, agent: &str) -> Option<Vec<&str>> {
        let s = self.state_index(state)?;
        let a = self.agent_index(agent)?;
        Some(
            self.available(s, a)
                .iter()
                .map(|&i| self.actions[a][i].as_str())
                .collect(),
        )
    }

    pub fn successor(&self, state: usize, joint: &[usize]) -> Option<usize> {
        let moves = &self.moves[state];
        moves
            .binary_search_by(|m| m.joint.as_slice().cmp(joint))
            .ok()
            .map(|i| moves[i].target)
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a == name)
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == name)
    }

    pub fn action_index(&self, agent: usize, name: &str) -> Option<usize> {
        self.actions[agent].iter().position(|a| a == name)
    }

    /// States labelled with `atom`.
    pub fn atom_states(&self, atom: usize) -> StateSet {
        StateSet::from_indices(
            self.state_count(),
            (0..self.state_count()).filter(|&s| self.labels[s].contains(&atom)),
        )
    }

    /// Resolves agent names into a coalition; `Err` carries the first unknown name.
    pub fn coalition<S: AsRef<str>>(&self, names: &[S]) -> Result<Coalition, String> {
        names
            .iter()
            .map(|n| {
                self.agent_index(n.as_ref())
                    .ok_or_else(|| n.as_ref().to_string())
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Coalition::from_indices)
    }

    pub fn to_spec(&self) -> CgsSpec {
        CgsSpec {
            agents: self.agents.clone(),
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
            actions: self
                .agents
                .iter()
                .cloned()
                .zip(self.actions.iter().cloned())
                .collect(),
            transitions: self
                .moves
                .iter()
                .enumerate()
                .flat_map(|(s, ms)| {
                    ms.iter().map(move |m| TransitionRow {
                        state: self.states[s].clone(),
                        joint: m
                            .joint
                            .iter()
                            .enumerate()
                            .map(|(a, &i)| self.actions[a][i].clone())
                            .collect(),
                        target: self.states[m.target].clone(),
                    })
                })
                .collect(),
        }
    }

    pub fn joint_names(&self, joint: &[usize]) -> Vec<&str> {
        joint
            .iter()
            .enumerate()
            .map(|(a, &i)| self.actions[a][i].as_str())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::fixtures::m1;

    fn row(state: &str, joint: &[&str], target: &str) -> TransitionRow {
        TransitionRow {
            state: state.into(),
            joint: joint.iter().map(|s| s.to_string()).collect(),
            target: target.into(),
        }
    }

    #[test]
    fn m1_shape() {
        let g = m1();
        assert_eq!(g.agents().len(), 2);
        assert_eq!(g.state_count(), 4);
        assert_eq!(g.actions(0).len(), 2);
        assert_eq!(g.actions(1).len(), 3);
        assert_eq!(g.transition_count(), 10);
    }

    #[test]
    fn available_actions_follow_transitions() {
        let g = m1();
        assert_eq!(g.available_actions("S1", "A0").unwrap(), vec!["A"]);
        assert_eq!(g.available_actions("S1", "A1").unwrap(), vec!["A", "B", "C"]);
        assert_eq!(g.available_actions("S3", "A0").unwrap(), vec!["A"]);
        assert_eq!(g.available_actions("S0", "A1").unwrap(), vec!["A", "B"]);
        assert!(g.available_actions("S9", "A1").is_none());
    }

    #[test]
    fn product_closure_is_cardinality() {
        let g = m1();
        for s in 0..g.state_count() {
            let product: usize = (0..g.agents().len()).map(|a| g.available(s, a).len()).product();
            assert_eq!(g.moves(s).len(), product);
        }
    }

    #[test]
    fn product_closure_violation_names_the_vector() {
        let mut spec = m1().to_spec();
        // (B,C) keeps C available for A1 at S1 and makes B available for A0.
        spec.transitions.retain(|r| !(r.state == "S1" && r.joint == ["A", "C"]));
        spec.transitions.push(row("S1", &["B", "C"], "S3"));
        let errs = spec.build().unwrap_err();
        let missing = errs.missing_vectors();
        assert!(missing.contains(&("S1".into(), vec!["A".into(), "C".into()])));
        assert!(missing.contains(&("S1".into(), vec!["B".into(), "A".into()])));
        assert!(errs.iter().all(|v| v.invariant() == "product-closure"));
    }

    #[test]
    fn nondeterminism_is_rejected() {
        let mut spec = m1().to_spec();
        spec.transitions.push(row("S0", &["A", "A"], "S2"));
        let errs = spec.build().unwrap_err();
        assert_eq!(errs.0.len(), 1);
        assert_eq!(errs.0[0].invariant(), "determinism");
        assert!(errs.0[0].to_string().contains("S0"));
    }

    #[test]
    fn deadlock_is_rejected() {
        let mut spec = m1().to_spec();
        spec.transitions.retain(|r| r.state != "S3");
        let errs = spec.build().unwrap_err();
        assert_eq!(
            errs.0,
            vec![Violation::Totality {
                state: "S3".into()
            }]
        );
    }

    #[test]
    fn undeclared_names_are_all_reported() {
        let mut spec = m1().to_spec();
        spec.initial.push("S9".into());
        spec.labels.push(("S0".into(), vec!["nope".into()]));
        spec.transitions.push(row("S0", &["Z", "A"], "S1"));
        spec.transitions.push(row("S0", &["A"], "S1"));
        let errs = spec.build().unwrap_err();
        let kinds: Vec<_> = errs.iter().map(Violation::invariant).collect();
        assert_eq!(
            kinds,
            vec!["known-state", "declared-atom", "declared-action", "arity"]
        );
    }

    #[test]
    fn coalition_resolution() {
        let g = m1();
        assert_eq!(g.coalition(&["A1", "A0"]).unwrap().members(), &[0, 1]);
        assert_eq!(g.coalition(&["A7"]).unwrap_err(), "A7");
        assert!(Coalition::empty().is_subset(&Coalition::grand(2)));
    }

    #[test]
    fn joint_product_is_lexicographic() {
        let p = joint_product(&[vec![0, 1], vec![0, 2]]);
        assert_eq!(p, vec![vec![0, 0], vec![0, 2], vec![1, 0], vec![1, 2]]);
        assert_eq!(joint_product(&[]), vec![Vec::<usize>::new()]);
    }
}
