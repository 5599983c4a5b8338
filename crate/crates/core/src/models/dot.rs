//! Graphviz export.

use std::fmt::Write as _;

use super::{Model, ModelDocument};

fn node_label(name: &str, atoms: &[usize], atom_names: &[String]) -> String {
    if atoms.is_empty() {
        name.to_string()
    } else {
        let names: Vec<&str> = atoms.iter().map(|&a| atom_names[a].as_str()).collect();
        format!("{name}\\n{}", names.join(", "))
    }
}

/// Renders a model as a DOT digraph. Initial states are double circles, CGS
/// edges carry their joint action, Kripke edges are unlabeled.
pub fn export_dot(doc: &ModelDocument) -> String {
    let mut out = String::from("digraph model {\n    rankdir=LR;\n");
    let states = doc.states();
    let initial = doc.initial();
    for (s, name) in states.iter().enumerate() {
        let shape = if initial.contains(&s) {
            "doublecircle"
        } else {
            "circle"
        };
        let _ = writeln!(
            out,
            "    \"{name}\" [shape={shape}, label=\"{}\"];",
            node_label(name, doc.label(s), doc.atoms())
        );
    }
    match doc.payload() {
        Model::Cgs(g) => {
            for s in 0..g.state_count() {
                for m in g.moves(s) {
                    let _ = writeln!(
                        out,
                        "    \"{}\" -> \"{}\" [label=\"({})\"];",
                        states[s],
                        states[m.target],
                        g.joint_names(&m.joint).join(",")
                    );
                }
            }
        }
        Model::Kripke(k) => {
            for s in 0..k.state_count() {
                for &t in k.successors(s) {
                    let _ = writeln!(out, "    \"{}\" -> \"{}\";", states[s], states[t]);
                }
            }
        }
    }
    out.push_str("}\n");
    out
}
