//! Binding formulas to model ids, with hash-consing.

use std::collections::HashMap;

use crate::bitset::StateSet;
use crate::epistemic::extension;
use crate::error::{Error, Result};
use crate::model::{ActionId, AgentId, Coalition, Model, PropId};
use crate::syntax::Formula;

pub(crate) type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    Top,
    /// `None` for propositions the model does not declare.
    Prop(Option<PropId>),
    Act(Vec<(AgentId, ActionId)>),
    And(NodeId, NodeId),
    Not(NodeId),
    Next(NodeId),
    Globally(NodeId),
    Nec(NodeId),
    Sstit(Coalition, NodeId),
    /// The extension of a propositional argument is precomputed.
    Knows(AgentId, NodeId, Option<StateSet>),
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Arena {
    pub nodes: Vec<Node>,
    /// Whether a `K` occurs at or below the node.
    pub has_k: Vec<bool>,
    /// Whether the node's truth can depend on the current profile.
    pub profile_dependent: Vec<bool>,
    /// Whether the node's truth can depend on the future.
    pub temporal: Vec<bool>,
    index: HashMap<Node, NodeId>,
}

pub(crate) fn bind_action_atom(m: &Model, f: &crate::syntax::ActionAtom) -> Result<Vec<(AgentId, ActionId)>> {
    f.0.iter()
        .map(|(&i, a)| {
            if i >= m.num_agents() {
                return Err(Error::Binding(format!("agent {} does not exist", i + 1)));
            }
            let id = m
                .action_id(a)
                .ok_or_else(|| Error::Binding(format!("unknown action `{a}`")))?;
            Ok((i, id))
        })
        .collect()
}

fn check_coalition(m: &Model, c: &Coalition) -> Result<()> {
    match c.members().iter().find(|&&i| i >= m.num_agents()) {
        Some(i) => Err(Error::Binding(format!("agent {} does not exist", i + 1))),
        None => Ok(()),
    }
}

impl Arena {
    fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let kids: Vec<NodeId> = match &node {
            Node::Top | Node::Prop(_) | Node::Act(_) => vec![],
            Node::And(a, b) => vec![*a, *b],
            Node::Not(a) | Node::Next(a) | Node::Globally(a) | Node::Nec(a) | Node::Sstit(_, a) => vec![*a],
            Node::Knows(_, a, _) => vec![*a],
        };
        let any = |v: &Vec<bool>| kids.iter().any(|&k| v[k]);
        let has_k = matches!(node, Node::Knows(..)) || any(&self.has_k);
        let profile_dependent = match node {
            Node::Act(_) | Node::Next(_) | Node::Globally(_) => true,
            Node::Nec(_) | Node::Knows(..) => false,
            _ => any(&self.profile_dependent),
        };
        let temporal = match node {
            Node::Next(_) | Node::Globally(_) => true,
            Node::Nec(_) | Node::Knows(..) => false,
            _ => any(&self.temporal),
        };
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.has_k.push(has_k);
        self.profile_dependent.push(profile_dependent);
        self.temporal.push(temporal);
        self.index.insert(node, id);
        id
    }

    pub fn add(&mut self, m: &Model, f: &Formula) -> Result<NodeId> {
        let node = match f {
            Formula::Top => Node::Top,
            Formula::Prop(p) => Node::Prop(m.prop_id(p)),
            Formula::Act(a) => Node::Act(bind_action_atom(m, a)?),
            Formula::And(a, b) => {
                let a = self.add(m, a)?;
                let b = self.add(m, b)?;
                Node::And(a, b)
            }
            Formula::Not(a) => Node::Not(self.add(m, a)?),
            Formula::Next(a) => Node::Next(self.add(m, a)?),
            Formula::Globally(a) => Node::Globally(self.add(m, a)?),
            Formula::Nec(a) => Node::Nec(self.add(m, a)?),
            Formula::Sstit(c, a) => {
                check_coalition(m, c)?;
                Node::Sstit(c.clone(), self.add(m, a)?)
            }
            Formula::Knows(i, a) => {
                if *i >= m.num_agents() {
                    return Err(Error::Binding(format!("agent {} does not exist", i + 1)));
                }
                let ext = if a.is_propositional() {
                    Some(extension(m, a)?)
                } else {
                    None
                };
                Node::Knows(*i, self.add(m, a)?, ext)
            }
        };
        Ok(self.intern(node))
    }
}

/// Formulas the exact evaluator accepts: the argument of every `K{i}`
/// mentions no other agent's knowledge.
pub fn check_exact_fragment(f: &Formula) -> Result<()> {
    for sub in f.subformulas() {
        if let Formula::Knows(i, arg) = sub {
            if let Some(j) = arg.knowledge_agents().into_iter().find(|j| j != i) {
                return Err(Error::Fragment(format!(
                    "`{sub}` nests K{{{}}} inside K{{{}}}",
                    j + 1,
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::m1;
    use crate::syntax::parse_formula;

    #[test]
    fn hash_consing_shares_subterms() {
        let m = m1();
        let mut a = Arena::default();
        let x = a.add(&m, &parse_formula("X p & X p").unwrap()).unwrap();
        assert!(matches!(a.nodes[x], Node::And(l, r) if l == r));
        assert!(a.temporal[x]);
        let k = a.add(&m, &parse_formula("K{1} X p").unwrap()).unwrap();
        assert!(!a.temporal[k] && !a.profile_dependent[k] && a.has_k[k]);
    }

    #[test]
    fn binding_errors() {
        let m = m1();
        let mut a = Arena::default();
        assert!(a.add(&m, &parse_formula("act{1:zz}").unwrap()).is_err());
        assert!(a.add(&m, &parse_formula("act{2:a}").unwrap()).is_err());
        assert!(a.add(&m, &parse_formula("[sstit {3}] p").unwrap()).is_err());
        assert!(a.add(&m, &parse_formula("K{2} p").unwrap()).is_err());
        let id = a.add(&m, &parse_formula("nosuchprop").unwrap()).unwrap();
        assert_eq!(a.nodes[id], Node::Prop(None));
    }

    #[test]
    fn exact_fragment() {
        assert!(check_exact_fragment(&parse_formula("K{1} K{1} X p").unwrap()).is_ok());
        assert!(check_exact_fragment(&parse_formula("K{1} p & K{2} q").unwrap()).is_ok());
        assert!(check_exact_fragment(&parse_formula("K{1} K{2} p").unwrap()).is_err());
    }
}
