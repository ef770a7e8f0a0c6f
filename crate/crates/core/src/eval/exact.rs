use std::collections::HashMap;

use super::compile::{check_exact_fragment, Arena, Node, NodeId};
use super::EvalPoint;
use crate::bitset::StateSet;
use crate::epistemic::step_states;
use crate::error::{Error, Result};
use crate::model::{ActionId, AgentId, Coalition, Model, StateId};
use crate::strategy::{PositionalStrategy, Strategy};
use crate::syntax::Formula;

/// Upper bound on the number of positional profiles we are willing to enumerate.
pub const MAX_PROFILES: u64 = 1 << 22;

/// Knowledge agents tracked by one evaluator.
const MAX_K_AGENTS: usize = 4;

type Ks = [u64; MAX_K_AGENTS];

/// All positional profiles of a model, numbered in mixed radix.
///
/// Digit `(agent, state)` is the index of the chosen action in `avail(agent, state)`.
#[derive(Clone, Debug)]
pub struct ProfileSpace {
    num_states: usize,
    num_agents: usize,
    radix: Vec<u64>,
    weight: Vec<u64>,
    total: u64,
}

impl ProfileSpace {
    pub fn new(m: &Model) -> Result<ProfileSpace> {
        let (n, k) = (m.num_states(), m.num_agents());
        let mut radix = Vec::with_capacity(n * k);
        let mut weight = Vec::with_capacity(n * k);
        let mut total: u64 = 1;
        for i in 0..k {
            for q in 0..n {
                let r = m.avail(i, q).len() as u64;
                radix.push(r);
                weight.push(total);
                total = total
                    .checked_mul(r)
                    .filter(|&t| t <= MAX_PROFILES)
                    .ok_or_else(|| Error::Budget(format!("more than {MAX_PROFILES} positional profiles")))?;
            }
        }
        Ok(ProfileSpace {
            num_states: n,
            num_agents: k,
            radix,
            weight,
            total,
        })
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    fn slot(&self, agent: AgentId, q: StateId) -> usize {
        agent * self.num_states + q
    }

    pub fn digit(&self, code: u64, agent: AgentId, q: StateId) -> usize {
        let s = self.slot(agent, q);
        ((code / self.weight[s]) % self.radix[s]) as usize
    }

    pub fn action(&self, m: &Model, code: u64, agent: AgentId, q: StateId) -> ActionId {
        m.avail(agent, q)[self.digit(code, agent, q)]
    }

    pub fn actions(&self, m: &Model, code: u64, q: StateId) -> Vec<ActionId> {
        (0..self.num_agents).map(|i| self.action(m, code, i, q)).collect()
    }

    /// The code of a profile for all agents.
    pub fn encode(&self, m: &Model, s: &PositionalStrategy) -> u64 {
        let mut code = 0;
        for (n, &i) in s.coalition().members().iter().enumerate() {
            for q in 0..self.num_states {
                let a = s.at(q)[n];
                let d = m.avail(i, q).iter().position(|&b| b == a).expect("validated strategy");
                code += d as u64 * self.weight[self.slot(i, q)];
            }
        }
        code
    }

    pub fn decode(&self, m: &Model, code: u64) -> PositionalStrategy {
        PositionalStrategy::from_fn(m, Coalition::all(self.num_agents), |i, q| {
            self.action(m, code, i, q)
        })
        .expect("decoded actions are available")
    }

    fn slots_of(&self, c: &Coalition, inside: bool) -> Vec<usize> {
        (0..self.num_agents)
            .filter(|&i| c.contains(i) == inside)
            .flat_map(|i| (0..self.num_states).map(move |q| i * self.num_states + q))
            .filter(|&s| self.radix[s] > 1)
            .collect()
    }

    fn keep(&self, code: u64, slots: &[usize]) -> u64 {
        slots
            .iter()
            .map(|&s| (code / self.weight[s]) % self.radix[s] * self.weight[s])
            .sum()
    }

    fn odometer(&self, base: u64, free: &[usize]) -> Odometer {
        Odometer {
            wheels: free.iter().map(|&s| (self.weight[s], self.radix[s])).collect(),
            digits: vec![0; free.len()],
            code: base,
            done: false,
        }
    }

    /// Codes of all profiles agreeing with `code` on the members of `c`.
    pub fn extensions(&self, code: u64, c: &Coalition) -> impl Iterator<Item = u64> {
        let fixed = self.slots_of(c, true);
        let free = self.slots_of(c, false);
        self.odometer(self.keep(code, &fixed), &free)
    }
}

/// Iterates the codes obtained by varying some digits of a base code whose free digits are zero.
struct Odometer {
    wheels: Vec<(u64, u64)>,
    digits: Vec<u64>,
    code: u64,
    done: bool,
}

impl Iterator for Odometer {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.done {
            return None;
        }
        let out = self.code;
        self.done = true;
        for (n, &(w, r)) in self.wheels.iter().enumerate() {
            if self.digits[n] + 1 < r {
                self.digits[n] += 1;
                self.code += w;
                self.done = false;
                break;
            }
            self.code -= self.digits[n] * w;
            self.digits[n] = 0;
        }
        Some(out)
    }
}

#[derive(Clone, Debug)]
enum Norm {
    Zero,
    Full,
    Keep(Vec<usize>),
}

/// Memoizing evaluator for one formula on one model.
///
/// Results are keyed on (subformula, state, knowledge sets, profile code), which is
/// everything a positional profile lets the truth value depend on.
pub struct ExactEvaluator<'m> {
    m: &'m Model,
    arena: Arena,
    root: NodeId,
    kagents: Vec<AgentId>,
    space: ProfileSpace,
    norm: Vec<Norm>,
    free: Vec<Vec<usize>>,
    all_slots: Vec<usize>,
    memo: HashMap<(NodeId, StateId, Ks, u64), bool>,
}

impl<'m> ExactEvaluator<'m> {
    pub fn new(m: &'m Model, f: &Formula) -> Result<ExactEvaluator<'m>> {
        check_exact_fragment(f)?;
        let kagents = f.knowledge_agents();
        if kagents.len() > MAX_K_AGENTS {
            return Err(Error::Fragment(format!(
                "more than {MAX_K_AGENTS} agents' knowledge in one formula"
            )));
        }
        let mut arena = Arena::default();
        let root = arena.add(m, f)?;
        let space = ProfileSpace::new(m)?;
        let mut norm = Vec::with_capacity(arena.nodes.len());
        let mut free = Vec::with_capacity(arena.nodes.len());
        for (id, node) in arena.nodes.iter().enumerate() {
            let (n, fr) = match node {
                Node::Sstit(c, _) => (Norm::Keep(space.slots_of(c, true)), space.slots_of(c, false)),
                _ if !arena.profile_dependent[id] => (Norm::Zero, vec![]),
                _ => (Norm::Full, vec![]),
            };
            norm.push(n);
            free.push(fr);
        }
        let all_slots = space.slots_of(&Coalition::empty(), false);
        Ok(ExactEvaluator {
            m,
            arena,
            root,
            kagents,
            space,
            norm,
            free,
            all_slots,
            memo: HashMap::new(),
        })
    }

    pub fn space(&self) -> &ProfileSpace {
        &self.space
    }

    fn pack(&self, knowledge: &[StateSet]) -> Ks {
        let mut ks = [0; MAX_K_AGENTS];
        for (slot, &i) in self.kagents.iter().enumerate() {
            ks[slot] = knowledge[i].bits();
        }
        ks
    }

    /// Truth at a history ending in `q` with per-agent knowledge sets `knowledge`,
    /// under the profile with the given code.
    pub fn eval_code(&mut self, q: StateId, knowledge: &[StateSet], code: u64) -> bool {
        let ks = self.pack(knowledge);
        self.go(self.root, q, ks, code)
    }

    pub fn eval_at(&mut self, q: StateId, knowledge: &[StateSet], s: &PositionalStrategy) -> bool {
        let code = self.space.encode(self.m, s);
        self.eval_code(q, knowledge, code)
    }

    pub fn eval_point(&mut self, pt: &EvalPoint<'_>) -> Result<bool> {
        let s = pt.profile.as_positional().ok_or_else(|| {
            Error::Representation("exact evaluation needs a positional profile".into())
        })?;
        Ok(self.eval_at(pt.state(), &pt.knowledge, s))
    }

    fn step(&self, q: StateId, ks: Ks, code: u64) -> (StateId, Ks) {
        let acts = self.space.actions(self.m, code, q);
        let next = self.m.out(q, &acts).expect("transition defined for available actions");
        let mut out = ks;
        for (slot, &i) in self.kagents.iter().enumerate() {
            out[slot] = step_states(self.m, StateSet::from_bits(ks[slot]), next, i).bits();
        }
        (next, out)
    }

    fn go(&mut self, node: NodeId, q: StateId, ks: Ks, code: u64) -> bool {
        let code = match &self.norm[node] {
            Norm::Zero => 0,
            Norm::Full => code,
            Norm::Keep(slots) => self.space.keep(code, slots),
        };
        let ks = if self.arena.has_k[node] { ks } else { [0; MAX_K_AGENTS] };
        if let Some(&v) = self.memo.get(&(node, q, ks, code)) {
            return v;
        }
        let v = self.compute(node, q, ks, code);
        self.memo.insert((node, q, ks, code), v);
        v
    }

    fn compute(&mut self, node: NodeId, q: StateId, ks: Ks, code: u64) -> bool {
        match self.arena.nodes[node].clone() {
            Node::Top => true,
            Node::Prop(p) => p.is_some_and(|p| self.m.holds(q, p)),
            Node::Act(binding) => binding
                .iter()
                .all(|&(i, a)| self.space.action(self.m, code, i, q) == a),
            Node::And(a, b) => self.go(a, q, ks, code) && self.go(b, q, ks, code),
            Node::Not(a) => !self.go(a, q, ks, code),
            Node::Next(a) => {
                let (q2, ks2) = self.step(q, ks, code);
                self.go(a, q2, ks2, code)
            }
            Node::Globally(a) => {
                let mut seen: Vec<(StateId, Ks)> = Vec::new();
                let (mut q, mut ks) = (q, ks);
                while !seen.contains(&(q, ks)) {
                    if !self.go(a, q, ks, code) {
                        return false;
                    }
                    seen.push((q, ks));
                    (q, ks) = self.step(q, ks, code);
                }
                true
            }
            Node::Nec(a) => {
                let codes = self.space.odometer(0, &self.all_slots);
                codes.into_iter().all(|c| self.go(a, q, ks, c))
            }
            Node::Sstit(_, a) => {
                let codes = self.space.odometer(code, &self.free[node]);
                codes.into_iter().all(|c| self.go(a, q, ks, c))
            }
            Node::Knows(i, a, ext) => {
                let slot = self.kagents.iter().position(|&j| j == i).expect("tracked agent");
                let mine = StateSet::from_bits(ks[slot]);
                if let Some(ext) = ext {
                    return mine.is_subset(ext);
                }
                let mut inner = [0; MAX_K_AGENTS];
                inner[slot] = ks[slot];
                mine.iter().all(|q2| {
                    let codes = self.space.odometer(0, &self.all_slots);
                    codes.into_iter().all(|c| self.go(a, q2, inner, c))
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{m1, m2};

    #[test]
    fn codes_round_trip() {
        let m = m2();
        let sp = ProfileSpace::new(&m).unwrap();
        assert_eq!(sp.len(), 4);
        for code in 0..sp.len() {
            assert_eq!(sp.encode(&m, &sp.decode(&m, code)), code);
        }
    }

    #[test]
    fn extensions_fix_coalition_digits() {
        let m = m2();
        let sp = ProfileSpace::new(&m).unwrap();
        for code in 0..sp.len() {
            let ext: Vec<u64> = sp.extensions(code, &Coalition::singleton(0)).collect();
            assert_eq!(ext, vec![code]);
            let all: Vec<u64> = sp.extensions(code, &Coalition::empty()).collect();
            assert_eq!(all.len(), 4);
        }
        let m = m1();
        let sp = ProfileSpace::new(&m).unwrap();
        assert_eq!(sp.extensions(0, &Coalition::empty()).count(), 2);
    }
}
