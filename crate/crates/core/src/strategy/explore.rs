//! Outcome exploration: reachable configurations, play-equivalence, uniformity.

use std::collections::{BTreeSet, HashSet, VecDeque};

use super::{PositionalStrategy, Strategy};
use crate::bitset::StateSet;
use crate::epistemic::{knowledge_sets_of, step_all};
use crate::error::{Error, Result};
use crate::model::{AgentId, Coalition, History, Lasso, Model, StateId};

/// What a strategy can observe at a history: the whole prefix while it is
/// within memory, the last state and knowledge sets afterwards.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConfigKey {
    Prefix(Vec<StateId>),
    Moment { state: StateId, ks: Vec<StateSet> },
}

/// A configuration with a representative history.
#[derive(Clone, Debug)]
pub struct Config {
    pub key: ConfigKey,
    pub history: Vec<StateId>,
    pub ks: Vec<StateSet>,
}

impl Config {
    pub fn start(m: &Model, history: &[StateId], memory: usize) -> Config {
        let ks = knowledge_sets_of(m, history);
        Config {
            key: key_for(history, &ks, memory),
            history: history.to_vec(),
            ks,
        }
    }

    pub fn step(&self, m: &Model, q: StateId, memory: usize) -> Config {
        let mut history = self.history.clone();
        history.push(q);
        let ks = step_all(m, &self.ks, q);
        Config {
            key: key_for(&history, &ks, memory),
            history,
            ks,
        }
    }

    pub fn state(&self) -> StateId {
        *self.history.last().unwrap()
    }
}

fn key_for(history: &[StateId], ks: &[StateSet], memory: usize) -> ConfigKey {
    if history.len() <= memory {
        ConfigKey::Prefix(history.to_vec())
    } else {
        ConfigKey::Moment {
            state: *history.last().unwrap(),
            ks: ks.to_vec(),
        }
    }
}

/// Successors allowed by `s` at `history`; an undefined strategy constrains nothing.
pub(crate) fn successors_under(m: &Model, s: &dyn Strategy, history: &[StateId]) -> Result<StateSet> {
    let q = *history.last().unwrap();
    match s.action(m, history) {
        Some(acts) => m.out_set(q, s.coalition(), &acts),
        None => Ok(m.successors(q)),
    }
}

/// Every configuration reachable from `h` inside the outcome plays of `s`,
/// in breadth-first order. `memory` must cover every strategy the caller
/// will query on the returned configurations.
pub fn reachable_configs(m: &Model, h: &History, s: &dyn Strategy, memory: usize) -> Result<Vec<Config>> {
    let start = Config::start(m, h.states(), memory);
    let mut seen = HashSet::new();
    seen.insert(start.key.clone());
    let mut queue = VecDeque::from([start]);
    let mut out = Vec::new();
    while let Some(c) = queue.pop_front() {
        for q in successors_under(m, s, &c.history)?.iter() {
            let next = c.step(m, q, memory);
            if seen.insert(next.key.clone()) {
                queue.push_back(next);
            }
        }
        out.push(c);
    }
    Ok(out)
}

/// All extensions of `h` by exactly `depth` steps inside the outcome plays of `s`.
pub fn out_plays_frontier(m: &Model, h: &History, s: &dyn Strategy, depth: usize) -> Result<BTreeSet<History>> {
    let mut layer = vec![h.states().to_vec()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for hist in &layer {
            for q in successors_under(m, s, hist)?.iter() {
                let mut e = hist.clone();
                e.push(q);
                next.push(e);
            }
        }
        layer = next;
    }
    layer.into_iter().map(|v| History::new(m, v)).collect()
}

/// Play-equivalence at `h`: both strategies allow the same successors at
/// every configuration reachable under the first.
pub fn play_equivalent(m: &Model, h: &History, s1: &dyn Strategy, s2: &dyn Strategy) -> Result<bool> {
    if s1.coalition() != s2.coalition() {
        return Err(Error::Representation(format!(
            "strategies for {} and {} are not comparable",
            s1.coalition(),
            s2.coalition()
        )));
    }
    let memory = s1.memory().max(s2.memory());
    let start = Config::start(m, h.states(), memory);
    let mut seen = HashSet::new();
    seen.insert(start.key.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        let a = successors_under(m, s1, &c.history)?;
        if a != successors_under(m, s2, &c.history)? {
            return Ok(false);
        }
        for q in a.iter() {
            let next = c.step(m, q, memory);
            if seen.insert(next.key.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(true)
}

/// Play-equivalence approximated by equality of the outcome frontiers up to `depth`.
pub fn play_equivalent_by_frontier(
    m: &Model,
    h: &History,
    s1: &dyn Strategy,
    s2: &dyn Strategy,
    depth: usize,
) -> Result<bool> {
    Ok(out_plays_frontier(m, h, s1, depth)? == out_plays_frontier(m, h, s2, depth)?)
}

/// The unique play from `q0` under a positional profile.
pub fn generated_play(m: &Model, q0: StateId, s: &PositionalStrategy) -> Result<Lasso> {
    if s.coalition() != &Coalition::all(m.num_agents()) {
        return Err(Error::Representation("generated_play needs a full profile".into()));
    }
    let mut seq = vec![q0];
    loop {
        let q = *seq.last().unwrap();
        let next = m
            .out(q, s.at(q))
            .ok_or_else(|| Error::Invalid(format!("no transition at {}", m.state_name(q))))?;
        if let Some(j) = seq.iter().position(|&r| r == next) {
            let cycle = seq.split_off(j);
            return Lasso::new(m, seq, cycle);
        }
        seq.push(next);
    }
}

/// `bigger` extends `smaller`: a superset coalition agreeing wherever `smaller` is defined.
pub fn extends(m: &Model, bigger: &dyn Strategy, smaller: &dyn Strategy) -> Result<bool> {
    if !smaller.coalition().is_subset(bigger.coalition()) {
        return Ok(false);
    }
    let idx: Vec<usize> = smaller
        .coalition()
        .members()
        .iter()
        .map(|&i| bigger.coalition().position(i).unwrap())
        .collect();
    let memory = bigger.memory().max(smaller.memory());
    let mut seen = HashSet::new();
    let mut queue: VecDeque<Config> = (0..m.num_states())
        .map(|q| Config::start(m, &[q], memory))
        .filter(|c| seen.insert(c.key.clone()))
        .collect();
    while let Some(c) = queue.pop_front() {
        if let Some(small) = smaller.action(m, &c.history) {
            match bigger.action(m, &c.history) {
                Some(big) if idx.iter().map(|&n| big[n]).eq(small.iter().copied()) => {}
                _ => return Ok(false),
            }
        }
        for q in m.successors(c.state()).iter() {
            let next = c.step(m, q, memory);
            if seen.insert(next.key.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UniformScope {
    /// Histories of length one.
    Positional,
    /// Histories of length at most `d + 1`.
    Depth(usize),
    /// All histories.
    Unbounded,
}

/// Uniformity of `agent`'s part of `s` over histories starting anywhere.
pub fn is_uniform(m: &Model, s: &dyn Strategy, agent: AgentId, scope: UniformScope) -> Result<bool> {
    is_uniform_on(m, s, agent, m.all_states(), scope)
}

/// Uniformity over pairs of `~agent`-indistinguishable histories whose first states lie in `starts`.
pub fn is_uniform_on(
    m: &Model,
    s: &dyn Strategy,
    agent: AgentId,
    starts: StateSet,
    scope: UniformScope,
) -> Result<bool> {
    let n = s.coalition().position(agent).ok_or_else(|| {
        Error::Invalid(format!("agent {} is not in {}", agent + 1, s.coalition()))
    })?;
    let max_len = match scope {
        UniformScope::Positional => 1,
        UniformScope::Depth(d) => d + 1,
        UniformScope::Unbounded => usize::MAX,
    };
    let memory = s.memory();
    let pick = |h: &[StateId]| s.action(m, h).map(|a| a[n]);
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    for q in starts.iter() {
        for r in starts.intersection(m.block(agent, q)).iter() {
            let pair = (Config::start(m, &[q], memory), Config::start(m, &[r], memory));
            if seen.insert((pair.0.key.clone(), pair.1.key.clone())) {
                queue.push_back(pair);
            }
        }
    }
    while let Some((a, b)) = queue.pop_front() {
        if pick(&a.history) != pick(&b.history) {
            return Ok(false);
        }
        if a.history.len() >= max_len {
            continue;
        }
        for q in m.successors(a.state()).iter() {
            for r in m.successors(b.state()).intersection(m.block(agent, q)).iter() {
                let pair = (a.step(m, q, memory), b.step(m, r, memory));
                if seen.insert((pair.0.key.clone(), pair.1.key.clone())) {
                    queue.push_back(pair);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{m1, m2};
    use crate::strategy::{parse_positional, TreeStrategy};

    fn pos(m: &Model, text: &str) -> PositionalStrategy {
        parse_positional(m, text).unwrap()
    }

    fn hist(m: &Model, s: &str) -> History {
        History::parse(m, s).unwrap()
    }

    #[test]
    fn generated_play_examples() {
        let m = m1();
        let s = pos(&m, "positional for {1}: q0 -> b; q1 -> a");
        let l = generated_play(&m, 0, &s).unwrap();
        assert_eq!((l.prefix, l.cycle), (vec![0], vec![1]));
        let s = pos(&m, "positional for {1}: q0 -> a; q1 -> a");
        let l = generated_play(&m, 0, &s).unwrap();
        assert_eq!((l.prefix, l.cycle), (vec![], vec![0]));
        let m = m2();
        let s = pos(&m, "positional for {1,2}: q0 -> b,c; q1 -> b,c");
        let l = generated_play(&m, 0, &s).unwrap();
        assert_eq!((l.prefix, l.cycle), (vec![], vec![0, 1]));
    }

    #[test]
    fn frontier_examples() {
        let m = m2();
        let s = pos(&m, "positional for {1}: q0 -> a; q1 -> a");
        let f = out_plays_frontier(&m, &hist(&m, "q0"), &s, 2).unwrap();
        assert_eq!(f.into_iter().collect::<Vec<_>>(), vec![hist(&m, "q0,q0,q0")]);
        let none = PositionalStrategy::from_fn(&m, Coalition::empty(), |_, _| 0).unwrap();
        let f = out_plays_frontier(&m, &hist(&m, "q0"), &none, 1).unwrap();
        assert_eq!(f.len(), 2);
        let m = m1();
        let s = pos(&m, "positional for {1}: q0 -> a; q1 -> a");
        let f = out_plays_frontier(&m, &hist(&m, "q1"), &s, 3).unwrap();
        assert_eq!(f.into_iter().collect::<Vec<_>>(), vec![hist(&m, "q1,q1,q1,q1")]);
    }

    #[test]
    fn play_equivalence_examples() {
        let m = m1();
        let ba = pos(&m, "positional for {1}: q0 -> b; q1 -> a");
        let aa = pos(&m, "positional for {1}: q0 -> a; q1 -> a");
        assert!(play_equivalent(&m, &hist(&m, "q0"), &ba, &ba.clone()).unwrap());
        assert!(play_equivalent(&m, &hist(&m, "q1"), &aa, &ba).unwrap());
        assert!(!play_equivalent(&m, &hist(&m, "q0"), &aa, &ba).unwrap());
        let t = TreeStrategy::from_positional(&ba, &hist(&m, "q0"), 2);
        assert!(play_equivalent(&m, &hist(&m, "q0"), &t, &ba).unwrap());
    }

    #[test]
    fn extends_examples() {
        let m = m2();
        let ac = pos(&m, "positional for {1,2}: q0 -> a,c; q1 -> a,c");
        let bc = pos(&m, "positional for {1,2}: q0 -> b,c; q1 -> b,c");
        let a = pos(&m, "positional for {1}: q0 -> a; q1 -> a");
        assert!(extends(&m, &ac, &a).unwrap());
        assert!(!extends(&m, &bc, &a).unwrap());
        assert!(extends(&m, &ac, &ac).unwrap());
        assert!(!extends(&m, &a, &ac).unwrap());
    }

    #[test]
    fn uniformity_examples() {
        let m = m2();
        let ab = pos(&m, "positional for {1}: q0 -> a; q1 -> b");
        let aa = pos(&m, "positional for {1}: q0 -> a; q1 -> a");
        assert!(!is_uniform(&m, &ab, 0, UniformScope::Positional).unwrap());
        assert!(is_uniform(&m, &aa, 0, UniformScope::Positional).unwrap());
        assert!(is_uniform(&m, &aa, 0, UniformScope::Unbounded).unwrap());
        let m = m1();
        let ba = pos(&m, "positional for {1}: q0 -> b; q1 -> a");
        assert!(is_uniform(&m, &ba, 0, UniformScope::Depth(3)).unwrap());
    }
}
