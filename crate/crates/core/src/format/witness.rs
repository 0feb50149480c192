//! JSON files holding a completion tree together with the problem it
//! was built for.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::kb::{parse_concept_as, parse_role_as, KbError};
use crate::shiq::{CompletionTree, TreeError};
use crate::syntax::{close_hierarchy, Concept, Role, RoleBox};
use crate::trace::NodeId;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub edge: Vec<String>,
    pub label: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub concept: String,
    pub transitive: Vec<String>,
    pub inclusions: Vec<(String, String)>,
    pub roles: Vec<String>,
    pub nodes: Vec<WitnessNode>,
    pub distinct: Vec<(usize, usize)>,
}

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("malformed witness file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("in witness file: {0}")]
    Syntax(#[from] KbError),
    #[error("in witness file: {0}")]
    Tree(#[from] TreeError),
    #[error("witness nodes must be listed parents first, numbered from 0")]
    Order,
}

pub fn witness_to_json(tree: &CompletionTree) -> String {
    let rbox = tree.rbox();
    let file = WitnessFile {
        concept: tree.goal().to_string(),
        transitive: rbox.transitive_names().iter().map(|n| n.to_string()).collect(),
        inclusions: rbox.inclusions().iter().map(|(r, s)| (r.to_string(), s.to_string())).collect(),
        roles: rbox.universe().iter().map(Role::to_string).collect(),
        nodes: tree
            .node_ids()
            .map(|x| WitnessNode {
                id: x.0,
                parent: tree.parent(x).map(|p| p.0),
                edge: tree.edge_roles(x).iter().map(|r| r.to_string()).collect(),
                label: tree.label(x).iter().map(|c| c.to_string()).collect(),
            })
            .collect(),
        distinct: tree.distinct_pairs().map(|(a, b)| (a.0, b.0)).collect(),
    };
    serde_json::to_string_pretty(&file).expect("witness serialises") + "\n"
}

/// The tree, its concept and its role box.
pub fn witness_from_json(text: &str) -> Result<(CompletionTree, Concept, RoleBox), WitnessError> {
    let file: WitnessFile = serde_json::from_str(text)?;
    let concept = parse_concept_as(&file.concept, &[], true)?;
    let inclusions = file
        .inclusions
        .iter()
        .map(|(r, s)| Ok((parse_role_as(r, true)?, parse_role_as(s, true)?)))
        .collect::<Result<Vec<_>, KbError>>()?;
    let universe = file.roles.iter().map(|r| parse_role_as(r, true)).collect::<Result<Vec<_>, _>>()?;
    let rbox = close_hierarchy(file.transitive.iter().map(String::as_str), inclusions).with_roles(&universe);
    let mut tree = CompletionTree::new(&concept, &rbox);
    for (i, n) in file.nodes.iter().enumerate() {
        if n.id != i || n.parent.is_some_and(|p| p >= i) || (i == 0) != n.parent.is_none() {
            return Err(WitnessError::Order);
        }
        let label = n.label.iter().map(|c| parse_concept_as(c, &[], true)).collect::<Result<Vec<_>, _>>()?;
        match n.parent {
            None => {
                for c in &label {
                    tree.add_concept(tree.root(), c)?;
                }
            }
            Some(p) => {
                let edge = n.edge.iter().map(|r| parse_role_as(r, true)).collect::<Result<Vec<_>, _>>()?;
                tree.add_child(NodeId(p), &edge, &label)?;
            }
        }
    }
    for &(a, b) in &file.distinct {
        tree.set_distinct(NodeId(a), NodeId(b))?;
    }
    Ok((tree, concept, rbox))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shiq::{decide_sat, validate_completion_tree};

    #[test]
    fn round_trip_keeps_validity() {
        let (f, r) = (Role::named("F"), Role::named("R"));
        let rb = close_hierarchy(["R"], [(f.clone(), r.clone())]);
        let step = Concept::exists(f.inverse(), Concept::and(Concept::atom("C"), Concept::at_most(1, f, Concept::Top)));
        let d = Concept::and_all([Concept::not(Concept::atom("C")), step.clone(), Concept::forall(r.inverse(), step)]);
        let w = decide_sat(&d, &rb).unwrap().witness.unwrap();
        let json = witness_to_json(&w);
        let (tree, concept, rbox) = witness_from_json(&json).unwrap();
        assert_eq!(rbox, rb);
        validate_completion_tree(&tree, &concept, &rbox).unwrap();
        assert_eq!(witness_to_json(&tree), json);
    }

    #[test]
    fn tampered_label_is_rejected_or_invalid() {
        let d = Concept::exists(Role::named("R"), Concept::atom("A"));
        let w = decide_sat(&d, &RoleBox::empty()).unwrap().witness.unwrap();
        let json = witness_to_json(&w).replacen("\"A\"", "\"B\"", 1);
        assert!(matches!(witness_from_json(&json), Err(WitnessError::Tree(_))));
        // still well formed, but the existential is no longer witnessed
        let json = witness_to_json(&w).replace("\"A\"", "\"(not A)\"");
        let (tree, concept, rbox) = witness_from_json(&json).unwrap();
        assert!(validate_completion_tree(&tree, &concept, &rbox).is_err());
    }
}
