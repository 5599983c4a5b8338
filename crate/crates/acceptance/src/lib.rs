//! Acceptance criteria, each a function that either describes what it
//! established or explains the first counterexample.

use std::time::{Duration, Instant};

use agentcheck_cli::{run, CHECK_JSON_KEYS, EXIT_FALSE, EXIT_INPUT, EXIT_TRUE, TRACE_JSON_KEYS};
use agentcheck_core::checkers::{
    eval_atl, eval_atl_with_stats, eval_ctl, extract_witness, oracle_atl, pre_coalition,
    MemorylessStrategy,
};
use agentcheck_core::kernel::{
    select_checker, verify, Method, ModelClassId, LogicClassId, Registry, SelectionPolicy,
};
use agentcheck_core::logics::{desugar, parse_formula, AgentSet, Formula, Modality, Path, PathQuantifier};
use agentcheck_core::models::{
    kripke_of_cgs, parse_model_text, serialize_model, Cgs, CgsSpec, Coalition, ModelDocument, TransitionRow,
};
use agentcheck_core::samples::M1;
use agentcheck_core::testing::{
    random_cgs, random_coalition, random_formula, random_kripke, random_propositional, CgsShape,
    FormulaShape,
};
use agentcheck_core::StateSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

pub type Outcome = Result<String, String>;

pub struct Criterion {
    pub name: &'static str,
    pub run: fn() -> Outcome,
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { name: "m1-scenario", run: m1_scenario },
        Criterion { name: "oracle-equivalence", run: oracle_equivalence },
        Criterion { name: "dispatcher-thresholds", run: dispatcher_thresholds },
        Criterion { name: "quantifier-embedding", run: quantifier_embedding },
        Criterion { name: "duality-and-monotonicity", run: duality_and_monotonicity },
        Criterion { name: "round-trips", run: round_trips },
        Criterion { name: "witness-soundness", run: witness_soundness },
        Criterion { name: "cli-contract", run: cli_contract },
    ]
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn game(seed: u64) -> Cgs {
    random_cgs(&mut rng(seed), &CgsShape::default())
}

fn named(set: &AgentSet) -> Vec<String> {
    match set {
        AgentSet::Named(v) => v.clone(),
        AgentSet::Full => Vec::new(),
    }
}

fn diamond(agents: AgentSet, path: Path) -> Formula {
    Formula::CoalitionMod { kind: Modality::Diamond, agents, path }
}

fn m1_scenario() -> Outcome {
    let start = Instant::now();
    let registry = Registry::standard();
    let policy = SelectionPolicy::default();
    for (formula, expected) in [("<A0,A1> F goal", true), ("<A0> F goal", false), ("<A1> F goal", false)] {
        let r = verify(&registry, M1, formula, &policy).map_err(|e| format!("{formula}: {e}"))?;
        ensure(r.overall == expected && r.per_initial.get("S0") == Some(&expected), || {
            format!("{formula}: expected {expected}, got {}", r.overall)
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("<A0,A1> F goal true, single-agent variants false, {elapsed:?}"))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let n = 250;
    for seed in 0..n {
        let mut r = rng(seed);
        let g = random_cgs(&mut r, &CgsShape::default());
        let f = desugar(&random_formula(&mut r, &FormulaShape::for_cgs(&g, 4, 3)));
        let fast = eval_atl(&g, &f).map_err(|e| e.to_string())?;
        let slow = oracle_atl(&g, &f).map_err(|e| e.to_string())?;
        ensure(fast == slow, || format!("seed {seed}: {f}: {fast:?} vs {slow:?}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!("{n} games agree, {elapsed:?}"))
}

/// A one-agent ring with `n` states.
fn ring(n: usize) -> ModelDocument {
    let states: Vec<String> = (0..n).map(|i| format!("S{i}")).collect();
    let spec = CgsSpec {
        agents: vec!["A0".into()],
        states: states.clone(),
        initial: vec!["S0".into()],
        atoms: vec!["p".into()],
        labels: vec![("S0".into(), vec!["p".into()])],
        actions: vec![("A0".into(), vec!["go".into()])],
        transitions: (0..n)
            .map(|i| TransitionRow {
                state: states[i].clone(),
                joint: vec!["go".into()],
                target: states[(i + 1) % n].clone(),
            })
            .collect(),
    };
    ModelDocument::from(spec.build().expect("ring is valid"))
}

fn dispatcher_thresholds() -> Outcome {
    let policy = SelectionPolicy::default();
    let registry = Registry::standard();
    ensure(registry.checkers().iter().all(|c| c.method == Method::Explicit), || {
        "standard registry has a non-explicit checker".into()
    })?;
    let expected = [
        (49, Method::Explicit),
        (50, Method::Implicit),
        (99, Method::Implicit),
        (100, Method::Abstract),
    ];
    for (n, preferred) in expected {
        ensure(policy.preferred_method(n) == preferred, || format!("{n} states: {:?}", policy.preferred_method(n)))?;
        let (_, trace) = select_checker(&registry, ModelClassId::CGS, LogicClassId::ATL, n, &policy)
            .map_err(|e| e.to_string())?;
        ensure(trace.preferred_method == preferred, || format!("{n}: trace prefers {:?}", trace.preferred_method))?;
        ensure(trace.used_method == Method::Explicit, || format!("{n}: used {:?}", trace.used_method))?;
        ensure(trace.fallback_applied == (n >= 50), || format!("{n}: fallback {}", trace.fallback_applied))?;

        let text = serialize_model(&ring(n));
        let r = verify(&registry, &text, "<A0> G <A0> F p", &policy).map_err(|e| e.to_string())?;
        ensure(r.overall && r.trace.state_count == n && r.trace.preferred_method == preferred, || {
            format!("{n}-state ring: {:?}", r.trace)
        })?;
    }
    Ok("49/50/99/100 prefer Explicit/Implicit/Implicit/Abstract, Explicit used with fallback from 50".into())
}

fn quantifier_embedding() -> Outcome {
    let mut checks = 0;
    for seed in 0..100 {
        let g = game(1_000 + seed);
        let k = kripke_of_cgs(&g);
        let mut r = rng(seed ^ 0xe4b);
        let phi = Box::new(random_propositional(&mut r, g.atoms(), 2));
        let psi = Box::new(random_propositional(&mut r, g.atoms(), 2));
        for path in [
            Path::Next(phi.clone()),
            Path::Finally(phi.clone()),
            Path::Globally(phi.clone()),
            Path::Until(phi.clone(), psi.clone()),
        ] {
            for (q, agents) in [(PathQuantifier::Exists, AgentSet::Full), (PathQuantifier::Forall, AgentSet::empty())] {
                let ctl_f = Formula::Quant(q, path.clone());
                let ctl = eval_ctl(&k, &ctl_f).map_err(|e| e.to_string())?;
                let atl = eval_atl(&g, &diamond(agents, path.clone())).map_err(|e| e.to_string())?;
                ensure(ctl == atl, || format!("seed {seed}: {ctl_f}"))?;
                checks += 1;
            }
        }
    }
    Ok(format!("100 games, {checks} formula pairs agree"))
}

fn random_path(r: &mut ChaCha8Rng, g: &Cgs) -> Path {
    let shape = FormulaShape::for_cgs(g, 2, 1);
    let a = Box::new(random_formula(r, &shape));
    let b = Box::new(random_formula(r, &shape));
    match r.gen_range(0..4) {
        0 => Path::Next(a),
        1 => Path::Finally(a),
        2 => Path::Globally(a),
        _ => Path::Until(a, b),
    }
}

fn duality_and_monotonicity() -> Outcome {
    let n = 200;
    for seed in 0..n {
        let mut r = rng(2_000 + seed);
        let g = random_cgs(&mut r, &CgsShape::default());
        let states = g.state_count();
        let f = random_formula(&mut r, &FormulaShape::for_cgs(&g, 4, 3));
        let (sat, stats) = eval_atl_with_stats(&g, &f).map_err(|e| e.to_string())?;
        let neg = eval_atl(&g, &Formula::not(f.clone())).map_err(|e| e.to_string())?;
        ensure(neg == sat.complement(), || format!("seed {seed}: duality fails for {f}"))?;
        ensure(stats.max_iterations <= states + 1, || format!("seed {seed}: {stats:?}"))?;

        let agents = random_coalition(&mut r, g.agents());
        let boxed = Formula::CoalitionMod { kind: Modality::Box, agents: agents.clone(), path: random_path(&mut r, &g) };
        ensure(eval_atl(&g, &boxed).map_err(|e| e.to_string())? == oracle_atl(&g, &boxed).map_err(|e| e.to_string())?, || {
            format!("seed {seed}: box {boxed}")
        })?;

        let q = StateSet::from_indices(states, (0..states).filter(|_| r.gen_bool(0.5)));
        let none = pre_coalition(&g, &Coalition::empty(), &q);
        let all = pre_coalition(&g, &Coalition::grand(g.agents().len()), &q);
        for i in 0..g.agents().len() {
            let mid = pre_coalition(&g, &Coalition::from_indices([i]), &q);
            ensure(none.is_subset(&mid) && mid.is_subset(&all), || format!("seed {seed}: pre not monotone"))?;
        }

        let coalition = g.coalition(&named(&agents)).map_err(|e| e.to_string())?;
        let shape = FormulaShape::for_cgs(&g, 2, 1);
        let phi = random_formula(&mut r, &shape);
        let psi = random_formula(&mut r, &shape);
        let sphi = eval_atl(&g, &phi).map_err(|e| e.to_string())?;
        let spsi = eval_atl(&g, &psi).map_err(|e| e.to_string())?;
        let until = eval_atl(&g, &diamond(agents.clone(), Path::Until(Box::new(phi.clone()), Box::new(psi))))
            .map_err(|e| e.to_string())?;
        ensure(until == spsi.union(&sphi.intersection(&pre_coalition(&g, &coalition, &until))), || {
            format!("seed {seed}: until equation")
        })?;
        let globally = eval_atl(&g, &diamond(agents, Path::Globally(Box::new(phi)))).map_err(|e| e.to_string())?;
        ensure(globally == sphi.intersection(&pre_coalition(&g, &coalition, &globally)), || {
            format!("seed {seed}: globally equation")
        })?;
    }
    Ok(format!("{n} games: duality, box, monotonicity, fixpoint equations, iteration bound"))
}

fn round_trips() -> Outcome {
    for seed in 0..1000 {
        let mut r = rng(3_000 + seed);
        let g = random_cgs(&mut r, &CgsShape::default());
        let f = random_formula(&mut r, &FormulaShape::for_cgs(&g, 4, 3));
        let text = f.to_string();
        let back = parse_formula(&text).map_err(|e| format!("{text}: {e}"))?;
        ensure(back == f && back.to_string() == text, || format!("formula {text} changed"))?;
    }
    for seed in 0..200 {
        let mut r = rng(4_000 + seed);
        let docs = [
            ModelDocument::from(random_cgs(&mut r, &CgsShape::default())),
            ModelDocument::from(random_kripke(&mut r, 6, 3)),
        ];
        for doc in docs {
            let text = serialize_model(&doc);
            let back = parse_model_text(&text).map_err(|e| e.to_string())?;
            ensure(back == doc, || format!("seed {seed}: model changed"))?;
            ensure(serialize_model(&back) == text, || format!("seed {seed}: not a fixed point"))?;
        }
    }
    let m1 = serialize_model(&parse_model_text(M1).map_err(|e| e.to_string())?);
    ensure(serialize_model(&parse_model_text(&m1).map_err(|e| e.to_string())?) == m1, || "M1 canonical form moved".into())?;
    Ok("1000 formulas, 200 CGS and 200 Kripke models".into())
}

/// Every play from `s` that follows `w` reaches `goal` through `hold` within `steps`.
fn forces(g: &Cgs, w: &MemorylessStrategy, hold: &StateSet, goal: &StateSet, s: usize, steps: usize) -> bool {
    let members: Vec<usize> = w.coalition.iter().filter_map(|a| g.agent_index(a)).collect();
    let choice = w.indices(g);
    fn go(g: &Cgs, m: &[usize], c: &[Vec<usize>], hold: &StateSet, goal: &StateSet, s: usize, steps: usize) -> bool {
        if goal.contains(s) {
            return true;
        }
        if steps == 0 || !hold.contains(s) {
            return false;
        }
        g.moves(s)
            .iter()
            .filter(|mv| m.iter().zip(&c[s]).all(|(&a, &x)| mv.joint[a] == x))
            .all(|mv| go(g, m, c, hold, goal, mv.target, steps - 1))
    }
    go(g, &members, &choice, hold, goal, s, steps)
}

fn witness_soundness() -> Outcome {
    let (mut satisfied, mut plays) = (0, 0);
    for seed in 0..300 {
        let mut r = rng(5_000 + seed);
        let g = random_cgs(&mut r, &CgsShape::default());
        let agents = random_coalition(&mut r, g.agents());
        let shape = FormulaShape::for_cgs(&g, 2, 1);
        let hold = if r.gen_bool(0.3) { Formula::True } else { random_formula(&mut r, &shape) };
        let goal = random_formula(&mut r, &shape);
        let f = Formula::diamond(named(&agents), Path::Until(Box::new(hold.clone()), Box::new(goal.clone())));
        let sat = eval_atl(&g, &f).map_err(|e| e.to_string())?;
        let from: Vec<usize> = g.initial().iter().copied().filter(|&s| sat.contains(s)).collect();
        if from.is_empty() {
            continue;
        }
        satisfied += 1;
        let w = extract_witness(&g, &f, &from)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("seed {seed}: no witness for {f}"))?;
        let hold = eval_atl(&g, &hold).map_err(|e| e.to_string())?;
        let goal = eval_atl(&g, &goal).map_err(|e| e.to_string())?;
        for s in from {
            ensure(forces(&g, &w, &hold, &goal, s, g.state_count()), || format!("seed {seed}: {f} from {s}"))?;
            plays += 1;
        }
    }
    ensure(satisfied >= 50, || format!("only {satisfied} satisfied instances"))?;
    Ok(format!("{satisfied} satisfied formulas, {plays} initial states forced"))
}

fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["agentcheck"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned())
}

fn cli_contract() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("m1.cgs");
    std::fs::write(&path, M1).map_err(|e| e.to_string())?;
    let m1 = path.to_str().ok_or("non-UTF-8 temp path")?;
    let bad = dir.path().join("bad.cgs");
    std::fs::write(&bad, "ModelType: CGS\nAgents: A0\nStates: S0\nInitial: S9\n").map_err(|e| e.to_string())?;

    let cases: [(&[&str], i32, &str); 5] = [
        (&["check", m1, "--formula", "<A0,A1> F goal"], EXIT_TRUE, "true"),
        (&["check", m1, "--formula", "<A0> F goal"], EXIT_FALSE, "false"),
        (&["classify", m1, "--formula", "E F goal"], EXIT_TRUE, "model: CGS, logic: CTL"),
        (&["check", m1, "--formula", "<A0> F nowhere"], EXIT_INPUT, ""),
        (&["validate", bad.to_str().unwrap_or_default()], EXIT_INPUT, ""),
    ];
    for (args, code, first) in cases {
        let (got, out) = cli(args);
        ensure(got == code, || format!("{args:?}: exit {got}, expected {code}"))?;
        ensure(out.lines().next().unwrap_or("") == first, || format!("{args:?}: printed {out:?}"))?;
    }

    for formula in ["<A0,A1> F goal", "<A1> G !goal", "E F goal", "A G (goal -> A X goal)"] {
        let (_, out) = cli(&["check", m1, "--formula", formula, "--json"]);
        let v: Value = serde_json::from_str(&out).map_err(|e| format!("{formula}: {e}"))?;
        let obj = v.as_object().ok_or("not an object")?;
        let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        ensure(keys == CHECK_JSON_KEYS, || format!("{formula}: keys {keys:?}"))?;
        let trace: Vec<&str> = v["trace"].as_object().ok_or("no trace")?.keys().map(String::as_str).collect();
        ensure(trace == TRACE_JSON_KEYS, || format!("{formula}: trace keys {trace:?}"))?;
        ensure(v["overall"].is_boolean(), || format!("{formula}: overall is not a boolean"))?;
        ensure(v["per_initial"].as_object().is_some_and(|m| m.values().all(Value::is_boolean)), || {
            format!("{formula}: per_initial values are not booleans")
        })?;
    }
    Ok("exit codes 0/1/0/2/2 and a stable JSON key set".into())
}
