//! Graphviz output for witnesses and event logs. Output depends only on
//! its input, so equal runs give byte-identical text.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::shiq::{BlockStatus, CompletionTree};
use crate::si::{SiBlock, SiTree};
use crate::syntax::Concept;
use crate::trace::{EventKind, NodeId, TraceEvent};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn set_text<'a>(items: impl IntoIterator<Item = &'a Concept>) -> String {
    let parts: Vec<String> = items.into_iter().map(|c| format!("{c:?}")).collect();
    format!("{{{}}}", parts.join(", "))
}

pub fn completion_tree_dot(tree: &CompletionTree) -> String {
    let blocking = tree.blocking();
    let blockers: BTreeMap<NodeId, Vec<NodeId>> = tree.node_ids().fold(BTreeMap::new(), |mut m, x| {
        if let BlockStatus::DirectlyBlocked { by } = blocking[x.0] {
            m.entry(by).or_default().push(x);
        }
        m
    });
    let mut out = String::from("digraph completion_tree {\n  node [shape=box, fontname=\"monospace\"];\n");
    for x in tree.node_ids() {
        let mut label = format!("{x}\\n{}", escape(&set_text(tree.label(x))));
        let mut attrs = String::new();
        match blocking[x.0] {
            BlockStatus::NotBlocked => {}
            BlockStatus::DirectlyBlocked { by } => {
                let _ = write!(label, "\\nblocked by {by}");
                attrs.push_str(", class=\"blocked\", style=\"filled,bold\", fillcolor=\"lightgrey\"");
            }
            BlockStatus::IndirectlyBlocked => {
                label.push_str("\\nindirectly blocked");
                attrs.push_str(", class=\"indirectly-blocked\", style=filled, fillcolor=\"whitesmoke\"");
            }
        }
        if blockers.contains_key(&x) {
            label.push_str("\\nblocker");
            attrs.push_str(", class=\"blocker\", peripheries=2");
        }
        let _ = writeln!(out, "  {} [label=\"{label}\"{attrs}];", x.0);
    }
    for x in tree.node_ids() {
        let Some(p) = tree.parent(x) else { continue };
        let roles: Vec<String> = tree.edge_roles(x).iter().map(|r| format!("{r:?}")).collect();
        if roles.is_empty() {
            let _ = writeln!(out, "  {} -> {} [label=\"∅\", style=dashed];", p.0, x.0);
        } else {
            let _ = writeln!(out, "  {} -> {} [label=\"{}\"];", p.0, x.0, escape(&roles.join(", ")));
        }
    }
    for (by, xs) in &blockers {
        for x in xs {
            let _ = writeln!(out, "  {} -> {} [style=dotted, constraint=false, label=\"blocked by\"];", x.0, by.0);
        }
    }
    for (a, b) in tree.distinct_pairs() {
        let _ = writeln!(out, "  {} -> {} [dir=none, style=dotted, color=red, constraint=false, label=\"≠\"];", a.0, b.0);
    }
    out.push_str("}\n");
    out
}

/// `events` (possibly empty) adds numbered reset and summary notes.
pub fn si_tree_dot(tree: &SiTree, events: &[TraceEvent]) -> String {
    let blocking = tree.blocking();
    let mut out = String::from("digraph si_tree {\n  node [shape=box, fontname=\"monospace\"];\n");
    for x in tree.node_ids() {
        let mut label = format!(
            "{x}\\nL = {}\\nB = {}",
            escape(&set_text(tree.l_label(x))),
            escape(&set_text(tree.b_label(x)))
        );
        let summary = tree.summary(x);
        if !summary.is_empty() {
            let _ = write!(label, "\\nsummary = {}", escape(&set_text(summary)));
        }
        let mut attrs = String::new();
        match blocking[x.0] {
            SiBlock::NotBlocked => {}
            SiBlock::By(y) => {
                let _ = write!(label, "\\nblocked by {y}");
                attrs.push_str(", class=\"blocked\", style=\"filled,bold\", fillcolor=\"lightgrey\"");
            }
            SiBlock::Inherited => {
                label.push_str("\\nindirectly blocked");
                attrs.push_str(", class=\"indirectly-blocked\", style=filled, fillcolor=\"whitesmoke\"");
            }
        }
        let _ = writeln!(out, "  {} [label=\"{label}\"{attrs}];", x.0);
    }
    for x in tree.node_ids() {
        if let (Some(p), Some(r)) = (tree.parent(x), tree.edge_role(x)) {
            let _ = writeln!(out, "  {} -> {} [label=\"{}\"];", p.0, x.0, escape(&format!("{r:?}")));
        }
    }
    write_notes(&mut out, events, |x| tree.is_alive(x));
    out.push_str("}\n");
    out
}

/// Numbered note nodes for resets and summaries, attached to the node
/// whose successors were removed.
fn write_notes(out: &mut String, events: &[TraceEvent], shown: impl Fn(NodeId) -> bool) {
    let mut resets = 0;
    let mut summaries = 0;
    for e in events {
        let (name, n) = match e.kind {
            EventKind::Reset => {
                resets += 1;
                ("reset", resets)
            }
            EventKind::Summarized => {
                summaries += 1;
                ("summary", summaries)
            }
            _ => continue,
        };
        let Some((&x, removed)) = e.nodes.split_first() else { continue };
        let removed: Vec<String> = removed.iter().map(NodeId::to_string).collect();
        let id = format!("{name}{n}");
        let _ = writeln!(
            out,
            "  {id} [shape=note, class=\"{name}\", label=\"{name} {n} (step {})\\nremoved {{{}}}\"];",
            e.step,
            removed.join(", ")
        );
        if shown(x) {
            let _ = writeln!(out, "  {id} -> {} [style=dashed, arrowhead=none];", x.0);
        }
    }
}

/// The tree of every node an event log ever created, with block, reset and
/// summary events as annotations. Nodes that a backtrack or a reset later
/// removed are drawn dashed.
pub fn trace_dot(events: &[TraceEvent]) -> String {
    let mut created: BTreeMap<NodeId, (Option<NodeId>, Option<&Concept>)> = BTreeMap::new();
    let mut removed: BTreeMap<NodeId, bool> = BTreeMap::new();
    let mut blocks: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    for e in events {
        match e.kind {
            EventKind::NodeCreated => {
                if let Some(&x) = e.nodes.first() {
                    created.insert(x, (e.nodes.get(1).copied(), e.concept.as_ref()));
                    removed.insert(x, false);
                }
            }
            EventKind::Reset | EventKind::Summarized => {
                for &y in &e.nodes[1..] {
                    removed.insert(y, true);
                }
            }
            EventKind::BlockEstablished => {
                if let [x, by, ..] = e.nodes[..] {
                    blocks.insert(x, by);
                }
            }
            EventKind::BlockBroken => {
                if let Some(x) = e.nodes.first() {
                    blocks.remove(x);
                }
            }
            _ => {}
        }
    }
    let mut out = String::from("digraph trace {\n  node [shape=box, fontname=\"monospace\"];\n");
    for (x, (_, c)) in &created {
        let mut label = x.to_string();
        if let Some(c) = c {
            let _ = write!(label, "\\n{}", escape(&format!("{c:?}")));
        }
        let style = if removed[x] { ", style=dashed" } else { "" };
        let _ = writeln!(out, "  {} [label=\"{label}\"{style}];", x.0);
    }
    for (x, (p, _)) in &created {
        if let Some(p) = p {
            let _ = writeln!(out, "  {} -> {};", p.0, x.0);
        }
    }
    for (x, by) in &blocks {
        let _ = writeln!(out, "  {} -> {} [style=dotted, constraint=false, label=\"blocked by\"];", x.0, by.0);
    }
    write_notes(&mut out, events, |x| created.contains_key(&x));
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EngineOptions;
    use crate::shiq::{decide_sat, decide_sat_with};
    use crate::si::si_decide_sat_trace;
    use crate::syntax::{Role, RoleBox};

    #[test]
    fn two_node_witness() {
        let d = Concept::exists(Role::named("R"), Concept::atom("A"));
        let w = decide_sat(&d, &RoleBox::empty()).unwrap().witness.unwrap();
        let dot = completion_tree_dot(&w);
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("0 -> 1 [label=\"R\"]"));
        assert_eq!(dot.matches("->").count(), 1);
    }

    #[test]
    fn reset_notes_are_numbered() {
        let r = Role::named("R");
        let d = Concept::and(
            Concept::exists(r.inverse(), Concept::forall(r.clone(), Concept::not(Concept::atom("A")))),
            Concept::exists(r, Concept::atom("B")),
        );
        let v = si_decide_sat_trace(&d, &RoleBox::empty()).unwrap();
        let dot = si_tree_dot(v.witness.as_ref().unwrap(), &v.trace);
        assert!(dot.contains("reset 1"));
        assert!(trace_dot(&v.trace).contains("reset 1"));
    }

    #[test]
    fn deterministic_for_a_seed() {
        let r = Role::named("R");
        let d = Concept::and(
            Concept::or(Concept::atom("A"), Concept::atom("B")),
            Concept::exists(r, Concept::or(Concept::atom("C"), Concept::atom("D"))),
        );
        let opts = EngineOptions {
            trace: true,
            seed: Some(3),
            ..Default::default()
        };
        let a = decide_sat_with(&d, &RoleBox::empty(), &opts).unwrap();
        let b = decide_sat_with(&d, &RoleBox::empty(), &opts).unwrap();
        assert_eq!(completion_tree_dot(a.witness.as_ref().unwrap()), completion_tree_dot(b.witness.as_ref().unwrap()));
        assert_eq!(trace_dot(&a.trace), trace_dot(&b.trace));
    }
}
