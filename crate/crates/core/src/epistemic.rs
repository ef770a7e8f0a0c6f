//! History indistinguishability and knowledge sets.

use crate::bitset::StateSet;
use crate::error::{Error, Result};
use crate::model::{AgentId, History, Model, StateId};
use crate::syntax::Formula;

/// States an agent considers possible as the last state of the current history.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KnowledgeSet {
    pub agent: AgentId,
    pub states: StateSet,
}

/// All valid histories of the same length that agree with `h` pointwise up to `~i`.
pub fn indistinguishable_histories(m: &Model, h: &History, i: AgentId) -> Vec<History> {
    let mut frontier: Vec<Vec<StateId>> = m
        .block(i, h.states()[0])
        .iter()
        .map(|q| vec![q])
        .collect();
    for &q in &h.states()[1..] {
        let block = m.block(i, q);
        frontier = frontier
            .into_iter()
            .flat_map(|prefix| {
                let last = *prefix.last().unwrap();
                m.successors(last)
                    .intersection(block)
                    .iter()
                    .map(move |r| {
                        let mut p = prefix.clone();
                        p.push(r);
                        p
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    frontier.sort();
    frontier
        .into_iter()
        .map(|states| History::new(m, states).expect("built from successor relation"))
        .collect()
}

pub fn initial_knowledge_set(m: &Model, q: StateId, i: AgentId) -> KnowledgeSet {
    KnowledgeSet {
        agent: i,
        states: m.block(i, q),
    }
}

/// One step of the subset construction.
pub(crate) fn step_states(m: &Model, ks: StateSet, q_next: StateId, i: AgentId) -> StateSet {
    let reach = ks
        .iter()
        .fold(StateSet::EMPTY, |acc, q| acc.union(m.successors(q)));
    reach.intersection(m.block(i, q_next))
}

pub fn step_knowledge_set(m: &Model, ks: KnowledgeSet, q_next: StateId) -> Result<KnowledgeSet> {
    let states = step_states(m, ks.states, q_next, ks.agent);
    if states.is_empty() {
        return Err(Error::InvalidHistory(format!(
            "{} is not a successor of any state agent {} considers possible",
            m.state_name(q_next),
            ks.agent + 1
        )));
    }
    Ok(KnowledgeSet {
        agent: ks.agent,
        states,
    })
}

/// Knowledge sets of every agent at the end of `h`, indexed by agent.
pub fn knowledge_sets(m: &Model, h: &History) -> Vec<StateSet> {
    knowledge_sets_of(m, h.states())
}

pub(crate) fn knowledge_sets_of(m: &Model, states: &[StateId]) -> Vec<StateSet> {
    (0..m.num_agents())
        .map(|i| {
            let mut ks = m.block(i, states[0]);
            for &q in &states[1..] {
                ks = step_states(m, ks, q, i);
            }
            ks
        })
        .collect()
}

/// Advances every agent's knowledge set along a transition to `q_next`.
pub fn step_all(m: &Model, ks: &[StateSet], q_next: StateId) -> Vec<StateSet> {
    ks.iter()
        .enumerate()
        .map(|(i, &s)| step_states(m, s, q_next, i))
        .collect()
}

/// Truth of a propositional formula at a state; unknown propositions are false.
pub fn holds_propositional(m: &Model, q: StateId, f: &Formula) -> Result<bool> {
    Ok(match f {
        Formula::Top => true,
        Formula::Prop(p) => m.prop_id(p).is_some_and(|p| m.holds(q, p)),
        Formula::And(a, b) => holds_propositional(m, q, a)? && holds_propositional(m, q, b)?,
        Formula::Not(a) => !holds_propositional(m, q, a)?,
        _ => return Err(Error::Fragment(format!("`{f}` is not propositional"))),
    })
}

/// The set of states satisfying a propositional formula.
pub fn extension(m: &Model, f: &Formula) -> Result<StateSet> {
    let mut out = StateSet::EMPTY;
    for q in 0..m.num_states() {
        if holds_propositional(m, q, f)? {
            out.insert(q);
        }
    }
    Ok(out)
}

pub fn knows_flat(m: &Model, ks: KnowledgeSet, c: &Formula) -> Result<bool> {
    if !c.is_propositional() {
        return Err(Error::Fragment(format!("`{c}` is not propositional")));
    }
    Ok(ks.states.is_subset(extension(m, c)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{m1, m2};
    use crate::syntax::parse_formula;

    fn hist(m: &Model, s: &str) -> History {
        History::parse(m, s).unwrap()
    }

    fn set(qs: &[usize]) -> StateSet {
        qs.iter().copied().collect()
    }

    #[test]
    fn indistinguishable_history_examples() {
        let m = m2();
        let got: Vec<_> = indistinguishable_histories(&m, &hist(&m, "q0"), 0)
            .iter()
            .map(|h| h.states().to_vec())
            .collect();
        assert_eq!(got, vec![vec![0], vec![1]]);
        let got = indistinguishable_histories(&m, &hist(&m, "q0,q1"), 0);
        assert_eq!(got.len(), 4);
        let m = m1();
        let got = indistinguishable_histories(&m, &hist(&m, "q0,q1"), 0);
        assert_eq!(got, vec![hist(&m, "q0,q1")]);
    }

    #[test]
    fn knowledge_set_examples() {
        let m = m2();
        assert_eq!(initial_knowledge_set(&m, 0, 0).states, set(&[0, 1]));
        assert_eq!(initial_knowledge_set(&m, 0, 1).states, set(&[0]));
        assert_eq!(initial_knowledge_set(&m1(), 1, 0).states, set(&[1]));

        let ks = KnowledgeSet { agent: 0, states: set(&[0, 1]) };
        assert_eq!(step_knowledge_set(&m, ks, 1).unwrap().states, set(&[0, 1]));
        let ks = KnowledgeSet { agent: 1, states: set(&[0]) };
        assert_eq!(step_knowledge_set(&m, ks, 1).unwrap().states, set(&[1]));
        let ks = KnowledgeSet { agent: 0, states: set(&[0]) };
        assert_eq!(step_knowledge_set(&m1(), ks, 1).unwrap().states, set(&[1]));
    }

    #[test]
    fn knows_flat_examples() {
        let m = m2();
        let both = KnowledgeSet { agent: 0, states: set(&[0, 1]) };
        assert!(!knows_flat(&m, both, &parse_formula("p").unwrap()).unwrap());
        assert!(knows_flat(&m, both, &parse_formula("p | ~p").unwrap()).unwrap());
        let q0 = KnowledgeSet { agent: 0, states: set(&[0]) };
        assert!(knows_flat(&m, q0, &parse_formula("~p").unwrap()).unwrap());
        assert!(knows_flat(&m, q0, &parse_formula("X p").unwrap()).is_err());
    }

    #[test]
    fn fold_matches_explicit_enumeration() {
        for m in [m1(), m2()] {
            let mut layer: Vec<History> = (0..m.num_states()).map(History::initial).collect();
            for _ in 0..4 {
                for h in &layer {
                    let ks = knowledge_sets(&m, h);
                    for (i, &k) in ks.iter().enumerate() {
                        let lasts: StateSet = indistinguishable_histories(&m, h, i)
                            .iter()
                            .map(|h| h.last())
                            .collect();
                        assert_eq!(lasts, k);
                    }
                }
                layer = layer
                    .iter()
                    .flat_map(|h| m.successors(h.last()).iter().map(move |q| h.extended(q)))
                    .collect();
            }
        }
    }
}
