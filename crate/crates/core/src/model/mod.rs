//! Concurrent epistemic game models.
//!
//! A [`Model`] is built from [`ModelParts`], which mirror the canonical model
//! file one-to-one. Construction does no semantic checking; [`validate_model`]
//! reports every violated structural constraint as a [`Diagnostic`].

mod format;

use std::collections::BTreeMap;
use std::fmt;

use crate::bitset::StateSet;
use crate::error::{Error, Result};

pub use format::{parse_model, write_model};

pub type StateId = usize;
/// Zero-based agent index. Agents are written 1-based in every text format.
pub type AgentId = usize;
pub type ActionId = usize;
pub type PropId = usize;

/// A set of agents, kept sorted and duplicate-free.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition(Vec<AgentId>);

impl Coalition {
    pub fn new(agents: impl IntoIterator<Item = AgentId>) -> Self {
        let mut v: Vec<_> = agents.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Coalition(v)
    }

    pub fn empty() -> Self {
        Coalition(Vec::new())
    }

    pub fn all(num_agents: usize) -> Self {
        Coalition((0..num_agents).collect())
    }

    pub fn singleton(agent: AgentId) -> Self {
        Coalition(vec![agent])
    }

    pub fn members(&self) -> &[AgentId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, agent: AgentId) -> bool {
        self.0.binary_search(&agent).is_ok()
    }

    /// Position of `agent` within the coalition's member list.
    pub fn position(&self, agent: AgentId) -> Option<usize> {
        self.0.binary_search(&agent).ok()
    }

    pub fn is_subset(&self, other: &Coalition) -> bool {
        self.0.iter().all(|a| other.contains(*a))
    }

    pub fn union(&self, other: &Coalition) -> Coalition {
        Coalition::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn is_disjoint(&self, other: &Coalition) -> bool {
        self.0.iter().all(|a| !other.contains(*a))
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, a) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", a + 1)?;
        }
        write!(f, "}}")
    }
}

/// Raw model components, one field per section of the model file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelParts {
    pub num_agents: usize,
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub props: Vec<String>,
    /// Propositions true at each state.
    pub labels: Vec<Vec<PropId>>,
    /// `avail[agent][state]`.
    pub avail: Vec<Vec<Vec<ActionId>>>,
    /// Keyed by (source state, full action profile).
    pub trans: BTreeMap<(StateId, Vec<ActionId>), StateId>,
    /// Listed indistinguishability blocks per agent; unlisted states are singletons.
    pub indist: Vec<Vec<Vec<StateId>>>,
}

/// A concurrent epistemic game model. Immutable once built.
#[derive(Clone, Debug)]
pub struct Model {
    parts: ModelParts,
    label_bits: Vec<u64>,
    block_of: Vec<Vec<StateSet>>,
    successors: Vec<StateSet>,
    // Transition table indexed by the mixed-radix code of per-agent choice
    // indices into the avail lists; `None` marks a missing transition.
    fast_trans: Vec<Vec<Option<StateId>>>,
}

impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        self.parts == other.parts
    }
}

impl Eq for Model {}

impl Model {
    pub fn from_parts(mut parts: ModelParts) -> Result<Model> {
        let n = parts.states.len();
        if n == 0 {
            return Err(Error::Invalid("model declares no states".into()));
        }
        if n > crate::bitset::MAX_STATES {
            return Err(Error::Invalid(format!(
                "model declares {n} states; at most {} are supported",
                crate::bitset::MAX_STATES
            )));
        }
        if parts.props.len() > 64 {
            return Err(Error::Invalid("at most 64 propositions are supported".into()));
        }
        if parts.num_agents == 0 {
            return Err(Error::Invalid("model declares no agents".into()));
        }
        parts.labels.resize(n, Vec::new());
        parts.avail.resize(parts.num_agents, Vec::new());
        for per_agent in parts.avail.iter_mut() {
            per_agent.resize(n, Vec::new());
            for acts in per_agent.iter_mut() {
                acts.sort_unstable();
                acts.dedup();
            }
        }
        parts.indist.resize(parts.num_agents, Vec::new());
        for labels in parts.labels.iter_mut() {
            labels.sort_unstable();
            labels.dedup();
        }

        let label_bits = parts
            .labels
            .iter()
            .map(|ls| ls.iter().fold(0u64, |acc, p| acc | (1u64 << p)))
            .collect();

        let block_of = parts
            .indist
            .iter()
            .map(|blocks| {
                (0..n)
                    .map(|q| {
                        blocks
                            .iter()
                            .find(|b| b.contains(&q))
                            .map(|b| b.iter().copied().collect())
                            .unwrap_or_else(|| StateSet::singleton(q))
                    })
                    .collect()
            })
            .collect();

        let mut model = Model {
            parts,
            label_bits,
            block_of,
            successors: Vec::new(),
            fast_trans: Vec::new(),
        };
        model.fast_trans = (0..n)
            .map(|q| {
                model
                    .action_profiles(q)
                    .iter()
                    .map(|p| model.parts.trans.get(&(q, p.clone())).copied())
                    .collect()
            })
            .collect();
        model.successors = model
            .fast_trans
            .iter()
            .map(|row| row.iter().flatten().copied().collect())
            .collect();
        Ok(model)
    }

    pub fn parts(&self) -> &ModelParts {
        &self.parts
    }

    pub fn num_agents(&self) -> usize {
        self.parts.num_agents
    }

    pub fn num_states(&self) -> usize {
        self.parts.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.parts.actions.len()
    }

    pub fn num_props(&self) -> usize {
        self.parts.props.len()
    }

    pub fn all_states(&self) -> StateSet {
        StateSet::full(self.num_states())
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.parts.states[q]
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.parts.actions[a]
    }

    pub fn prop_name(&self, p: PropId) -> &str {
        &self.parts.props[p]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.parts.states.iter().position(|s| s == name)
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.parts.actions.iter().position(|s| s == name)
    }

    pub fn prop_id(&self, name: &str) -> Option<PropId> {
        self.parts.props.iter().position(|s| s == name)
    }

    pub fn holds(&self, q: StateId, p: PropId) -> bool {
        self.label_bits[q] & (1u64 << p) != 0
    }

    /// Bitmask of the propositions true at `q` (its label signature).
    pub fn signature(&self, q: StateId) -> u64 {
        self.label_bits[q]
    }

    pub fn avail(&self, agent: AgentId, q: StateId) -> &[ActionId] {
        &self.parts.avail[agent][q]
    }

    /// The listed-or-singleton indistinguishability block of `q` for `agent`.
    pub fn block(&self, agent: AgentId, q: StateId) -> StateSet {
        self.block_of[agent][q]
    }

    pub fn indist(&self, agent: AgentId, q: StateId, r: StateId) -> bool {
        self.block_of[agent][q].contains(r)
    }

    /// All states reachable in one step under some executable profile.
    pub fn successors(&self, q: StateId) -> StateSet {
        self.successors[q]
    }

    pub fn out(&self, q: StateId, profile: &[ActionId]) -> Option<StateId> {
        self.parts.trans.get(&(q, profile.to_vec())).copied()
    }

    /// Transition by per-agent choice indices into the avail lists at `q`.
    pub fn out_by_choice(&self, q: StateId, choices: &[usize]) -> Option<StateId> {
        let mut code = 0usize;
        for (agent, &c) in choices.iter().enumerate() {
            code = code * self.parts.avail[agent][q].len() + c;
        }
        self.fast_trans[q].get(code).copied().flatten()
    }

    /// The executable full action profiles at `q`, in lexicographic order of choice indices.
    pub fn action_profiles(&self, q: StateId) -> Vec<Vec<ActionId>> {
        let mut out = vec![Vec::new()];
        for agent in 0..self.num_agents() {
            let acts = self.avail(agent, q);
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    acts.iter().map(move |&a| {
                        let mut p = prefix.clone();
                        p.push(a);
                        p
                    })
                })
                .collect();
        }
        out
    }

    /// Successor states compatible with a coalition action at `q`.
    ///
    /// `actions[n]` is the action of the `n`-th coalition member.
    pub fn out_set(&self, q: StateId, coalition: &Coalition, actions: &[ActionId]) -> Result<StateSet> {
        if coalition.len() != actions.len() {
            return Err(Error::Invalid(format!(
                "coalition {coalition} needs {} actions, got {}",
                coalition.len(),
                actions.len()
            )));
        }
        for (&agent, &a) in coalition.members().iter().zip(actions) {
            if agent >= self.num_agents() {
                return Err(Error::Invalid(format!("agent {} out of range", agent + 1)));
            }
            if !self.avail(agent, q).contains(&a) {
                return Err(Error::UnavailableAction {
                    agent: agent + 1,
                    state: self.state_name(q).to_string(),
                    action: self.parts.actions.get(a).cloned().unwrap_or_else(|| a.to_string()),
                });
            }
        }
        Ok(self
            .action_profiles(q)
            .into_iter()
            .filter(|p| coalition.members().iter().zip(actions).all(|(&i, &a)| p[i] == a))
            .filter_map(|p| self.out(q, &p))
            .collect())
    }

    pub fn format_profile(&self, profile: &[ActionId]) -> String {
        let names: Vec<_> = profile.iter().map(|&a| self.action_name(a)).collect();
        format!("({})", names.join(","))
    }
}

/// A violated structural constraint, naming the offending states and agents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Diagnostic {
    IllFormedPartition { agent: usize, detail: String },
    EmptyAvail { agent: usize, state: String },
    MissingTransition { state: String, profile: String },
    DanglingTransition { state: String, profile: String },
    NonUniqueLabel { from: String, to: String, first: String, second: String },
    AvailDiffers { agent: usize, first: String, second: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::IllFormedPartition { agent, detail } => {
                write!(f, "ill-formed partition for agent {agent}: {detail}")
            }
            Diagnostic::EmptyAvail { agent, state } => {
                write!(f, "empty availability for agent {agent} at {state}")
            }
            Diagnostic::MissingTransition { state, profile } => {
                write!(f, "missing transition from {state} under executable profile {profile}")
            }
            Diagnostic::DanglingTransition { state, profile } => {
                write!(f, "dangling transition from {state} under non-executable profile {profile}")
            }
            Diagnostic::NonUniqueLabel { from, to, first, second } => write!(
                f,
                "non-unique transition label between {from} and {to}: {first} and {second}"
            ),
            Diagnostic::AvailDiffers { agent, first, second } => write!(
                f,
                "availability differs across ~{agent} between {first} and {second}"
            ),
        }
    }
}

/// Checks every structural constraint of a concurrent epistemic game model.
pub fn validate_model(m: &Model) -> Vec<Diagnostic> {
    let p = m.parts();
    let n = m.num_states();
    let mut diags = Vec::new();

    for (agent, blocks) in p.indist.iter().enumerate() {
        let mut seen = StateSet::EMPTY;
        for block in blocks {
            if block.is_empty() {
                diags.push(Diagnostic::IllFormedPartition {
                    agent: agent + 1,
                    detail: "empty block".into(),
                });
            }
            for &q in block {
                if q >= n {
                    diags.push(Diagnostic::IllFormedPartition {
                        agent: agent + 1,
                        detail: format!("state index {q} out of range"),
                    });
                } else if seen.contains(q) {
                    diags.push(Diagnostic::IllFormedPartition {
                        agent: agent + 1,
                        detail: format!("{} occurs in more than one block", m.state_name(q)),
                    });
                } else {
                    seen.insert(q);
                }
            }
        }
    }

    for agent in 0..m.num_agents() {
        for q in 0..n {
            if m.avail(agent, q).is_empty() {
                diags.push(Diagnostic::EmptyAvail {
                    agent: agent + 1,
                    state: m.state_name(q).to_string(),
                });
            }
        }
    }

    for q in 0..n {
        let profiles = m.action_profiles(q);
        let mut by_target: BTreeMap<StateId, Vec<ActionId>> = BTreeMap::new();
        for prof in &profiles {
            match m.out(q, prof) {
                None => diags.push(Diagnostic::MissingTransition {
                    state: m.state_name(q).to_string(),
                    profile: m.format_profile(prof),
                }),
                Some(t) => {
                    if let Some(prev) = by_target.get(&t) {
                        diags.push(Diagnostic::NonUniqueLabel {
                            from: m.state_name(q).to_string(),
                            to: m.state_name(t).to_string(),
                            first: m.format_profile(prev),
                            second: m.format_profile(prof),
                        });
                    } else {
                        by_target.insert(t, prof.clone());
                    }
                }
            }
        }
    }
    for (q, prof) in p.trans.keys() {
        let executable = prof.len() == m.num_agents()
            && prof.iter().enumerate().all(|(i, a)| m.avail(i, *q).contains(a));
        if !executable {
            diags.push(Diagnostic::DanglingTransition {
                state: m.state_name(*q).to_string(),
                profile: m.format_profile(prof),
            });
        }
    }

    for agent in 0..m.num_agents() {
        for q in 0..n {
            for r in m.block(agent, q).iter().filter(|&r| r > q) {
                if m.avail(agent, q) != m.avail(agent, r) {
                    diags.push(Diagnostic::AvailDiffers {
                        agent: agent + 1,
                        first: m.state_name(q).to_string(),
                        second: m.state_name(r).to_string(),
                    });
                }
            }
        }
    }
    diags
}

/// Returns an error carrying every diagnostic unless the model is valid.
pub fn ensure_valid(m: &Model) -> Result<()> {
    let diags = validate_model(m);
    if diags.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidModel(diags))
    }
}

/// A finite, transition-valid state sequence; the current position is its last index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct History(Vec<StateId>);

impl History {
    pub fn new(m: &Model, states: Vec<StateId>) -> Result<History> {
        if states.is_empty() {
            return Err(Error::InvalidHistory("empty history".into()));
        }
        if let Some(&q) = states.iter().find(|&&q| q >= m.num_states()) {
            return Err(Error::InvalidHistory(format!("state index {q} out of range")));
        }
        for w in states.windows(2) {
            if !m.successors(w[0]).contains(w[1]) {
                return Err(Error::InvalidHistory(format!(
                    "{} is not a successor of {}",
                    m.state_name(w[1]),
                    m.state_name(w[0])
                )));
            }
        }
        Ok(History(states))
    }

    pub fn initial(q: StateId) -> History {
        History(vec![q])
    }

    pub fn parse(m: &Model, text: &str) -> Result<History> {
        let states = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                m.state_id(s).ok_or_else(|| Error::UnknownIdentifier {
                    line: 1,
                    kind: "state",
                    name: s.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        History::new(m, states)
    }

    pub fn states(&self) -> &[StateId] {
        &self.0
    }

    pub fn last(&self) -> StateId {
        *self.0.last().expect("histories are non-empty")
    }

    pub fn position(&self) -> usize {
        self.0.len() - 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn extended(&self, q: StateId) -> History {
        let mut v = self.0.clone();
        v.push(q);
        History(v)
    }

    pub fn display(&self, m: &Model) -> String {
        self.0.iter().map(|&q| m.state_name(q)).collect::<Vec<_>>().join(",")
    }
}

/// The eventually periodic play `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<StateId>,
    pub cycle: Vec<StateId>,
}

impl Lasso {
    pub fn new(m: &Model, prefix: Vec<StateId>, cycle: Vec<StateId>) -> Result<Lasso> {
        if cycle.is_empty() {
            return Err(Error::InvalidHistory("lasso cycle is empty".into()));
        }
        let mut seq = prefix.clone();
        seq.extend(cycle.iter().copied());
        seq.push(cycle[0]);
        History::new(m, seq)?;
        Ok(Lasso { prefix, cycle })
    }

    /// The state at position `k` of the infinite play.
    pub fn state_at(&self, k: usize) -> StateId {
        if k < self.prefix.len() {
            self.prefix[k]
        } else {
            self.cycle[(k - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// The first `len` states of the play.
    pub fn unroll(&self, len: usize) -> Vec<StateId> {
        (0..len).map(|k| self.state_at(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn action_profiles_are_products_of_avail() {
        let m1 = fixtures::m1();
        let names = |m: &Model, q| -> Vec<String> {
            m.action_profiles(q).iter().map(|p| m.format_profile(p)).collect()
        };
        assert_eq!(names(&m1, 0), vec!["(a)", "(b)"]);
        assert_eq!(names(&m1, 1), vec!["(a)"]);
        let m2 = fixtures::m2();
        assert_eq!(names(&m2, 0), vec!["(a,c)", "(b,c)"]);
    }

    #[test]
    fn out_set_examples() {
        let m2 = fixtures::m2();
        let a = m2.action_id("a").unwrap();
        let one = Coalition::singleton(0);
        assert_eq!(m2.out_set(0, &one, &[a]).unwrap(), StateSet::singleton(0));
        assert_eq!(m2.out_set(0, &Coalition::empty(), &[]).unwrap(), StateSet::full(2));

        let m1 = fixtures::m1();
        let b = m1.action_id("b").unwrap();
        assert!(matches!(
            m1.out_set(1, &one, &[b]),
            Err(Error::UnavailableAction { .. })
        ));
    }

    #[test]
    fn full_profile_out_set_is_singleton() {
        for m in [fixtures::m1(), fixtures::m2()] {
            let all = Coalition::all(m.num_agents());
            for q in 0..m.num_states() {
                for p in m.action_profiles(q) {
                    let s = m.out_set(q, &all, &p).unwrap();
                    assert_eq!(s, StateSet::singleton(m.out(q, &p).unwrap()));
                }
            }
        }
    }

    #[test]
    fn fixtures_validate_clean() {
        assert!(validate_model(&fixtures::m1()).is_empty());
        assert!(validate_model(&fixtures::m2()).is_empty());
    }

    #[test]
    fn duplicate_label_is_diagnosed() {
        // q0 reaches q0 under both a and a'
        let text = "agents: 1\nstates: q0 q1\nactions: a a2 b\nlabel q1: p\n\
                    avail 1 q0: a a2\navail 1 q1: a\n\
                    trans q0 (a) -> q0\ntrans q0 (a2) -> q0\ntrans q1 (a) -> q1\n";
        let m = parse_model(text).unwrap();
        let diags = validate_model(&m);
        assert_eq!(diags.len(), 1);
        assert!(diags[0]
            .to_string()
            .starts_with("non-unique transition label between q0 and q0"));
    }

    #[test]
    fn avail_mismatch_across_indist_is_diagnosed() {
        let text = fixtures::M2_TEXT.replace("avail 1 q1: a b", "avail 1 q1: a");
        let text = text.replace("trans q1 (b,c) -> q0\n", "");
        let m = parse_model(&text).unwrap();
        let diags = validate_model(&m);
        assert_eq!(diags.len(), 1, "{diags:?}");
        assert_eq!(
            diags[0].to_string(),
            "availability differs across ~1 between q0 and q1"
        );
    }

    #[test]
    fn lasso_and_history_validity() {
        let m1 = fixtures::m1();
        assert!(History::new(&m1, vec![1, 0]).is_err());
        assert!(History::new(&m1, vec![0, 0, 1, 1]).is_ok());
        let l = Lasso::new(&m1, vec![0], vec![1]).unwrap();
        assert_eq!(l.unroll(4), vec![0, 1, 1, 1]);
        assert!(Lasso::new(&m1, vec![], vec![0, 1]).is_err());
    }
}
