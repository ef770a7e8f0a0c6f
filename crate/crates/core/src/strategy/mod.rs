//! Positional, depth-bounded and partial coalition strategies.

mod explore;
mod text;

use std::collections::BTreeMap;

use crate::bitset::StateSet;
use crate::epistemic::knowledge_sets_of;
use crate::error::{Error, Result};
use crate::model::{ActionId, AgentId, Coalition, History, Model, StateId};

pub use explore::{
    extends, generated_play, out_plays_frontier, play_equivalent, play_equivalent_by_frontier,
    reachable_configs, is_uniform, is_uniform_on, Config, ConfigKey, UniformScope,
};

/// A (possibly partial) strategy for a coalition.
pub trait Strategy: Send + Sync {
    fn coalition(&self) -> &Coalition;

    /// Actions of the coalition members, in member order, or `None` where undefined.
    fn action(&self, m: &Model, history: &[StateId]) -> Option<Vec<ActionId>>;

    /// Histories longer than this are acted on by their last state and knowledge sets alone.
    fn memory(&self) -> usize;
}

/// A memoryless strategy: one action per member and state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PositionalStrategy {
    coalition: Coalition,
    /// `table[q][n]` is the action of the `n`-th member at `q`.
    table: Vec<Vec<ActionId>>,
}

impl PositionalStrategy {
    pub fn new(m: &Model, coalition: Coalition, table: Vec<Vec<ActionId>>) -> Result<Self> {
        if let Some(&i) = coalition.members().iter().find(|&&i| i >= m.num_agents()) {
            return Err(Error::Invalid(format!("agent {} out of range", i + 1)));
        }
        if table.len() != m.num_states() {
            return Err(Error::Invalid(format!(
                "positional strategy covers {} states, model has {}",
                table.len(),
                m.num_states()
            )));
        }
        for (q, row) in table.iter().enumerate() {
            if row.len() != coalition.len() {
                return Err(Error::Invalid(format!(
                    "expected {} actions at {}",
                    coalition.len(),
                    m.state_name(q)
                )));
            }
            for (&i, &a) in coalition.members().iter().zip(row) {
                if !m.avail(i, q).contains(&a) {
                    return Err(Error::UnavailableAction {
                        agent: i + 1,
                        state: m.state_name(q).to_string(),
                        action: m.parts().actions.get(a).cloned().unwrap_or_default(),
                    });
                }
            }
        }
        Ok(PositionalStrategy { coalition, table })
    }

    /// Builds a strategy by asking `choose(agent, state)` for every entry.
    pub fn from_fn(
        m: &Model,
        coalition: Coalition,
        mut choose: impl FnMut(AgentId, StateId) -> ActionId,
    ) -> Result<Self> {
        let table = (0..m.num_states())
            .map(|q| coalition.members().iter().map(|&i| choose(i, q)).collect())
            .collect();
        PositionalStrategy::new(m, coalition, table)
    }

    /// Every member plays the given action everywhere.
    pub fn constant(m: &Model, coalition: Coalition, actions: &[ActionId]) -> Result<Self> {
        let members = coalition.members().to_vec();
        PositionalStrategy::from_fn(m, coalition, |i, _| {
            actions[members.iter().position(|&j| j == i).unwrap()]
        })
    }

    /// The first available action for every member at every state.
    pub fn first_available(m: &Model, coalition: Coalition) -> Self {
        PositionalStrategy::from_fn(m, coalition, |i, q| m.avail(i, q)[0])
            .expect("first available actions are available")
    }

    pub fn at(&self, q: StateId) -> &[ActionId] {
        &self.table[q]
    }

    pub fn agent_action(&self, agent: AgentId, q: StateId) -> Option<ActionId> {
        self.coalition.position(agent).map(|n| self.table[q][n])
    }

    pub fn table(&self) -> &[Vec<ActionId>] {
        &self.table
    }

    pub fn restrict(&self, sub: &Coalition) -> Result<PositionalStrategy> {
        if !sub.is_subset(&self.coalition) {
            return Err(Error::Invalid(format!(
                "{sub} is not a subset of {}",
                self.coalition
            )));
        }
        let idx: Vec<usize> = sub
            .members()
            .iter()
            .map(|&i| self.coalition.position(i).unwrap())
            .collect();
        Ok(PositionalStrategy {
            coalition: sub.clone(),
            table: self
                .table
                .iter()
                .map(|row| idx.iter().map(|&n| row[n]).collect())
                .collect(),
        })
    }

    /// Combines strategies of disjoint coalitions.
    pub fn merge(&self, other: &PositionalStrategy) -> Result<PositionalStrategy> {
        if !self.coalition.is_disjoint(&other.coalition) {
            return Err(Error::Invalid(format!(
                "coalitions {} and {} overlap",
                self.coalition, other.coalition
            )));
        }
        let coalition = self.coalition.union(&other.coalition);
        let table = (0..self.table.len())
            .map(|q| {
                coalition
                    .members()
                    .iter()
                    .map(|&i| {
                        self.agent_action(i, q)
                            .or_else(|| other.agent_action(i, q))
                            .unwrap()
                    })
                    .collect()
            })
            .collect();
        Ok(PositionalStrategy { coalition, table })
    }

    /// Extends to a full profile, filling the other agents from `rest`.
    pub fn complete_with(&self, m: &Model, rest: &PositionalStrategy) -> Result<PositionalStrategy> {
        let others = Coalition::new(
            (0..m.num_agents()).filter(|&i| !self.coalition.contains(i)),
        );
        self.merge(&rest.restrict(&others)?)
    }
}

impl Strategy for PositionalStrategy {
    fn coalition(&self) -> &Coalition {
        &self.coalition
    }

    fn action(&self, _m: &Model, history: &[StateId]) -> Option<Vec<ActionId>> {
        Some(self.table[*history.last()?].clone())
    }

    fn memory(&self) -> usize {
        0
    }
}

/// A strategy with explicit choices on histories extending `root` by at most
/// `depth` steps, and a positional fallback everywhere else.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeStrategy {
    coalition: Coalition,
    root: Vec<StateId>,
    depth: usize,
    table: BTreeMap<Vec<StateId>, Vec<ActionId>>,
    fallback: PositionalStrategy,
}

impl TreeStrategy {
    pub fn new(
        m: &Model,
        root: History,
        depth: usize,
        table: BTreeMap<Vec<StateId>, Vec<ActionId>>,
        fallback: PositionalStrategy,
    ) -> Result<Self> {
        let coalition = fallback.coalition.clone();
        let root = root.states().to_vec();
        for (h, acts) in &table {
            if !h.starts_with(&root) || h.len() > root.len() + depth {
                return Err(Error::Invalid(format!(
                    "tree entry outside depth {depth} below the root"
                )));
            }
            let h = History::new(m, h.clone())?;
            if acts.len() != coalition.len() {
                return Err(Error::Invalid("tree entry has the wrong arity".into()));
            }
            for (&i, &a) in coalition.members().iter().zip(acts) {
                if !m.avail(i, h.last()).contains(&a) {
                    return Err(Error::UnavailableAction {
                        agent: i + 1,
                        state: m.state_name(h.last()).to_string(),
                        action: m.parts().actions.get(a).cloned().unwrap_or_default(),
                    });
                }
            }
        }
        Ok(TreeStrategy {
            coalition,
            root,
            depth,
            table,
            fallback,
        })
    }

    /// The tree that behaves exactly like `s`.
    pub fn from_positional(s: &PositionalStrategy, root: &History, depth: usize) -> Self {
        TreeStrategy {
            coalition: s.coalition.clone(),
            root: root.states().to_vec(),
            depth,
            table: BTreeMap::new(),
            fallback: s.clone(),
        }
    }

    pub fn root(&self) -> &[StateId] {
        &self.root
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn table(&self) -> &BTreeMap<Vec<StateId>, Vec<ActionId>> {
        &self.table
    }

    pub fn fallback(&self) -> &PositionalStrategy {
        &self.fallback
    }

    fn in_scope(&self, history: &[StateId]) -> bool {
        history.starts_with(&self.root) && history.len() <= self.root.len() + self.depth
    }

    /// Restriction of every entry and the fallback to a sub-coalition.
    pub fn restrict(&self, sub: &Coalition) -> Result<TreeStrategy> {
        let fallback = self.fallback.restrict(sub)?;
        let idx: Vec<usize> = sub
            .members()
            .iter()
            .map(|&i| self.coalition.position(i).unwrap())
            .collect();
        Ok(TreeStrategy {
            coalition: sub.clone(),
            root: self.root.clone(),
            depth: self.depth,
            table: self
                .table
                .iter()
                .map(|(h, a)| (h.clone(), idx.iter().map(|&n| a[n]).collect()))
                .collect(),
            fallback,
        })
    }

    /// Extends to a full profile; the other agents play `rest` positionally.
    pub fn complete_with(&self, m: &Model, rest: &PositionalStrategy) -> Result<TreeStrategy> {
        let all = Coalition::all(m.num_agents());
        let others = Coalition::new((0..m.num_agents()).filter(|&i| !self.coalition.contains(i)));
        let rest = rest.restrict(&others)?;
        let fallback = self.fallback.merge(&rest)?;
        let table = self
            .table
            .iter()
            .map(|(h, acts)| {
                let q = *h.last().unwrap();
                let full = all
                    .members()
                    .iter()
                    .map(|&i| match self.coalition.position(i) {
                        Some(n) => acts[n],
                        None => rest.agent_action(i, q).unwrap(),
                    })
                    .collect();
                (h.clone(), full)
            })
            .collect();
        Ok(TreeStrategy {
            coalition: all,
            root: self.root.clone(),
            depth: self.depth,
            table,
            fallback,
        })
    }
}

impl Strategy for TreeStrategy {
    fn coalition(&self) -> &Coalition {
        &self.coalition
    }

    fn action(&self, _m: &Model, history: &[StateId]) -> Option<Vec<ActionId>> {
        if self.in_scope(history) {
            if let Some(a) = self.table.get(history) {
                return Some(a.clone());
            }
        }
        Some(self.fallback.at(*history.last()?).to_vec())
    }

    fn memory(&self) -> usize {
        self.root.len() + self.depth
    }
}

/// Where a partial strategy is evaluated: the current state and the
/// knowledge sets of the agents its conditions mention.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Key {
    pub state: StateId,
    pub ks: Vec<StateSet>,
}

impl Key {
    pub fn of(m: &Model, history: &[StateId], agents: &[AgentId]) -> Key {
        let all = knowledge_sets_of(m, history);
        Key {
            state: *history.last().expect("non-empty history"),
            ks: agents.iter().map(|&i| all[i]).collect(),
        }
    }

    pub fn display(&self, m: &Model, agents: &[AgentId]) -> String {
        let mut s = m.state_name(self.state).to_string();
        for (i, ks) in agents.iter().zip(&self.ks) {
            let names: Vec<_> = ks.iter().map(|q| m.state_name(q)).collect();
            s.push_str(&format!(" K{}={{{}}}", i + 1, names.join(",")));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Defined(Vec<ActionId>),
    NoTrigger,
    Conflict,
    Ambiguous(Vec<Vec<ActionId>>),
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Defined(_) => "Defined",
            Status::NoTrigger => "NoTrigger",
            Status::Conflict => "Conflict",
            Status::Ambiguous(_) => "Ambiguous",
        }
    }

    pub fn defined(&self) -> Option<&[ActionId]> {
        match self {
            Status::Defined(a) => Some(a),
            _ => None,
        }
    }
}

/// A strategy defined per key, with an explicit status where it is not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialStrategy {
    coalition: Coalition,
    key_agents: Vec<AgentId>,
    entries: BTreeMap<Key, Status>,
}

impl PartialStrategy {
    pub fn new(coalition: Coalition, key_agents: Vec<AgentId>, entries: BTreeMap<Key, Status>) -> Self {
        PartialStrategy {
            coalition,
            key_agents,
            entries,
        }
    }

    pub fn key_agents(&self) -> &[AgentId] {
        &self.key_agents
    }

    pub fn entries(&self) -> &BTreeMap<Key, Status> {
        &self.entries
    }

    pub fn status(&self, m: &Model, history: &[StateId]) -> Option<&Status> {
        self.entries.get(&Key::of(m, history, &self.key_agents))
    }

    /// True iff every key is `Defined`.
    pub fn is_total(&self) -> bool {
        self.entries.values().all(|s| s.defined().is_some())
    }
}

impl Strategy for PartialStrategy {
    fn coalition(&self) -> &Coalition {
        &self.coalition
    }

    fn action(&self, m: &Model, history: &[StateId]) -> Option<Vec<ActionId>> {
        self.status(m, history)?.defined().map(|a| a.to_vec())
    }

    fn memory(&self) -> usize {
        0
    }
}

/// A strategy for the grand coalition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Profile {
    Positional(PositionalStrategy),
    Tree(TreeStrategy),
}

impl Profile {
    pub fn positional(m: &Model, s: PositionalStrategy) -> Result<Profile> {
        if s.coalition != Coalition::all(m.num_agents()) {
            return Err(Error::Representation(format!(
                "a profile needs all agents, got {}",
                s.coalition
            )));
        }
        Ok(Profile::Positional(s))
    }

    pub fn tree(m: &Model, s: TreeStrategy) -> Result<Profile> {
        if s.coalition != Coalition::all(m.num_agents()) {
            return Err(Error::Representation(format!(
                "a profile needs all agents, got {}",
                s.coalition
            )));
        }
        Ok(Profile::Tree(s))
    }

    pub fn as_positional(&self) -> Option<&PositionalStrategy> {
        match self {
            Profile::Positional(s) => Some(s),
            Profile::Tree(_) => None,
        }
    }

    pub fn as_strategy(&self) -> &dyn Strategy {
        match self {
            Profile::Positional(s) => s,
            Profile::Tree(s) => s,
        }
    }

    /// The tree view; positional profiles become trees with an empty table.
    pub fn to_tree(&self, root: &History, depth: usize) -> TreeStrategy {
        match self {
            Profile::Positional(s) => TreeStrategy::from_positional(s, root, depth),
            Profile::Tree(t) => t.clone(),
        }
    }
}

impl Strategy for Profile {
    fn coalition(&self) -> &Coalition {
        self.as_strategy().coalition()
    }

    fn action(&self, m: &Model, history: &[StateId]) -> Option<Vec<ActionId>> {
        self.as_strategy().action(m, history)
    }

    fn memory(&self) -> usize {
        self.as_strategy().memory()
    }
}

/// Restricts any strategy to a sub-coalition.
pub struct Restricted<'a> {
    inner: &'a dyn Strategy,
    coalition: Coalition,
    idx: Vec<usize>,
}

impl<'a> Restricted<'a> {
    pub fn new(inner: &'a dyn Strategy, sub: &Coalition) -> Result<Self> {
        let idx = sub
            .members()
            .iter()
            .map(|&i| {
                inner.coalition().position(i).ok_or_else(|| {
                    Error::Invalid(format!("{sub} is not a subset of {}", inner.coalition()))
                })
            })
            .collect::<Result<_>>()?;
        Ok(Restricted {
            inner,
            coalition: sub.clone(),
            idx,
        })
    }
}

impl Strategy for Restricted<'_> {
    fn coalition(&self) -> &Coalition {
        &self.coalition
    }

    fn action(&self, m: &Model, history: &[StateId]) -> Option<Vec<ActionId>> {
        let all = self.inner.action(m, history)?;
        Some(self.idx.iter().map(|&n| all[n]).collect())
    }

    fn memory(&self) -> usize {
        self.inner.memory()
    }
}

pub use text::{parse_positional, write_positional};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{m1, m2};

    #[test]
    fn positional_validation() {
        let m = m1();
        let c = Coalition::singleton(0);
        let b = m.action_id("b").unwrap();
        assert!(PositionalStrategy::new(&m, c.clone(), vec![vec![b], vec![b]]).is_err());
        let s = PositionalStrategy::new(&m, c, vec![vec![b], vec![0]]).unwrap();
        assert_eq!(s.action(&m, &[0]), Some(vec![b]));
    }

    #[test]
    fn tree_falls_back_outside_its_table() {
        let m = m1();
        let a = m.action_id("a").unwrap();
        let b = m.action_id("b").unwrap();
        let fallback = PositionalStrategy::constant(&m, Coalition::singleton(0), &[a]).unwrap();
        let mut table = BTreeMap::new();
        table.insert(vec![0], vec![b]);
        let t = TreeStrategy::new(&m, History::initial(0), 1, table, fallback).unwrap();
        assert_eq!(t.action(&m, &[0]), Some(vec![b]));
        assert_eq!(t.action(&m, &[0, 0]), Some(vec![a]));
        assert_eq!(t.memory(), 2);
    }

    #[test]
    fn merge_and_restrict() {
        let m = m2();
        let s1 = PositionalStrategy::constant(&m, Coalition::singleton(0), &[0]).unwrap();
        let s2 = PositionalStrategy::constant(&m, Coalition::singleton(1), &[2]).unwrap();
        let all = s1.merge(&s2).unwrap();
        assert_eq!(all.at(0), &[0, 2]);
        assert_eq!(all.restrict(&Coalition::singleton(1)).unwrap(), s2);
        assert!(s1.merge(&s1).is_err());
    }
}
