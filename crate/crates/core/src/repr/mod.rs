//! From rule sets to strategies and back: partial-strategy extraction,
//! completeness, propositional definability, and the representation
//! constructions together with the harness that cross-checks them.

mod enumerate;
mod harness;

pub use enumerate::{
    coalition_effects, condition_atoms, knowledge_action_rule_sets, proposition_action_rule_sets,
    RuleSetSample,
};
pub use harness::{
    negative_positional_model, negative_uniform_model, no_knowledge_rules_perform,
    no_proposition_rules_perform, verify_all, verify_theorem, write_report, Counterexample,
    HarnessBounds, TheoremId, TheoremReport, Verdict as CheckVerdict,
};

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use crate::bitset::StateSet;
use crate::epistemic::step_states;
use crate::error::{Error, Result};
use crate::eval::{ExactEvaluator, RuleEvaluator};
use crate::model::{ActionId, AgentId, Coalition, History, Model, StateId};
use crate::strategy::{
    is_uniform_on, Key, PartialStrategy, PositionalStrategy, Profile, Status, Strategy,
    UniformScope,
};
use crate::syntax::{is_moment_determinate_syntactic, Formula, RuleStrategy};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StatusCounts {
    pub defined: usize,
    pub no_trigger: usize,
    pub conflict: usize,
    pub ambiguous: usize,
}

/// The partial strategy induced by a rule set, one status per reachable key.
#[derive(Clone, Debug)]
pub struct ExtractionReport {
    pub partial: PartialStrategy,
    /// A shortest history for each key.
    pub representatives: BTreeMap<Key, Vec<StateId>>,
    /// Keys where the evaluator disagreed with the closed-form status.
    pub spot_check_failures: Vec<Key>,
}

impl ExtractionReport {
    pub fn counts(&self) -> StatusCounts {
        let mut c = StatusCounts::default();
        for s in self.partial.entries().values() {
            match s {
                Status::Defined(_) => c.defined += 1,
                Status::NoTrigger => c.no_trigger += 1,
                Status::Conflict => c.conflict += 1,
                Status::Ambiguous(_) => c.ambiguous += 1,
            }
        }
        c
    }

    /// Status at the key reached by a history starting in `q` with no moves yet.
    pub fn status_at_state(&self, m: &Model, q: StateId) -> Option<&Status> {
        self.partial.status(m, &[q])
    }

    /// One line per key: `key<TAB>status<TAB>action`.
    pub fn render(&self, m: &Model) -> String {
        let agents = self.partial.key_agents();
        let mut out = String::new();
        for (key, status) in self.partial.entries() {
            let act = match status {
                Status::Defined(a) => action_names(m, a),
                Status::Ambiguous(options) => options
                    .iter()
                    .map(|a| action_names(m, a))
                    .collect::<Vec<_>>()
                    .join(" | "),
                _ => "-".to_string(),
            };
            let _ = writeln!(out, "{}\t{}\t{}", key.display(m, agents), status.label(), act);
        }
        let c = self.counts();
        let _ = writeln!(
            out,
            "# defined {} no-trigger {} conflict {} ambiguous {}",
            c.defined, c.no_trigger, c.conflict, c.ambiguous
        );
        out
    }
}

/// `a,c` for a joint action.
pub fn action_names(m: &Model, acts: &[ActionId]) -> String {
    acts.iter().map(|&a| m.action_name(a)).collect::<Vec<_>>().join(",")
}

/// Every key `(state, knowledge sets of agents)` reachable from histories
/// starting in `starts` under arbitrary moves, each with a shortest history.
pub(crate) fn reachable_keys(
    m: &Model,
    agents: &[AgentId],
    starts: StateSet,
) -> BTreeMap<Key, (Vec<StateId>, Vec<StateSet>)> {
    let project = |q: StateId, ks: &[StateSet]| Key {
        state: q,
        ks: agents.iter().map(|&i| ks[i]).collect(),
    };
    let mut seen = BTreeMap::new();
    let mut queue = VecDeque::new();
    for q in starts.iter() {
        let ks: Vec<StateSet> = (0..m.num_agents())
            .map(|i| if agents.contains(&i) { m.block(i, q) } else { StateSet::EMPTY })
            .collect();
        let key = project(q, &ks);
        if let Entry::Vacant(e) = seen.entry(key) {
            e.insert((vec![q], ks.clone()));
            queue.push_back((vec![q], ks));
        }
    }
    while let Some((hist, ks)) = queue.pop_front() {
        let q = *hist.last().unwrap();
        for r in m.successors(q).iter() {
            let next: Vec<StateSet> = ks
                .iter()
                .enumerate()
                .map(|(i, &s)| if s.is_empty() { s } else { step_states(m, s, r, i) })
                .collect();
            let key = project(r, &next);
            if let Entry::Vacant(e) = seen.entry(key) {
                let mut h = hist.clone();
                h.push(r);
                e.insert((h.clone(), next.clone()));
                queue.push_back((h, next));
            }
        }
    }
    seen
}

/// Every joint choice of the coalition members available at `q`.
pub(crate) fn coalition_choices(m: &Model, c: &Coalition, q: StateId) -> Vec<Vec<ActionId>> {
    let mut out = vec![Vec::new()];
    for &i in c.members() {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                m.avail(i, q).iter().map(move |&a| {
                    let mut p = prefix.clone();
                    p.push(a);
                    p
                })
            })
            .collect();
    }
    out
}

fn key_agents(rs: &RuleStrategy) -> Vec<AgentId> {
    let mut v: Vec<AgentId> = rs.conditions().flat_map(|c| c.knowledge_agents()).collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn check_rule_shapes(m: &Model, rs: &RuleStrategy) -> Result<()> {
    if let Some(c) = rs.conditions().find(|c| !is_moment_determinate_syntactic(c)) {
        return Err(Error::UnsupportedRules(format!("condition `{c}` is not moment-determinate")));
    }
    if let Some(e) = rs.effects().find(|e| e.as_action_atom().is_none()) {
        return Err(Error::UnsupportedRules(format!("effect `{e}` is not an action atom")));
    }
    if let Some(&i) = rs.coalition.members().iter().find(|&&i| i >= m.num_agents()) {
        return Err(Error::Binding(format!("agent {} does not exist", i + 1)));
    }
    Ok(())
}

fn effect_formula(m: &Model, c: &Coalition, acts: &[ActionId]) -> Formula {
    Formula::act(
        c.members()
            .iter()
            .zip(acts)
            .map(|(&i, &a)| (i, m.action_name(a).to_string())),
    )
}

/// The partial strategy `s^RS`, with a generic re-evaluation of every key.
pub fn extract_partial(m: &Model, rs: &RuleStrategy) -> Result<ExtractionReport> {
    extract_partial_with(m, rs, true)
}

/// As [`extract_partial`]; `spot_check` toggles re-deriving each status through
/// the evaluator.
pub fn extract_partial_with(m: &Model, rs: &RuleStrategy, spot_check: bool) -> Result<ExtractionReport> {
    check_rule_shapes(m, rs)?;
    let agents = key_agents(rs);
    let mut rev = RuleEvaluator::new(m, rs)?;
    let keys = reachable_keys(m, &agents, m.all_states());
    let c = &rs.coalition;

    let mut checker = if spot_check {
        Some(SpotCheck::new(m, rs)?)
    } else {
        None
    };
    let mut entries = BTreeMap::new();
    let mut representatives = BTreeMap::new();
    let mut failures = Vec::new();
    for (key, (hist, ks)) in keys {
        let q = key.state;
        let fired = rev.triggered(q, &ks);
        let choices = coalition_choices(m, c, q);
        let compliant: Vec<Vec<ActionId>> = choices
            .iter()
            .filter(|acts| fired.iter().all(|&n| rev.forces(q, n, acts) == Some(true)))
            .cloned()
            .collect();
        let status = if fired.is_empty() {
            Status::NoTrigger
        } else {
            match compliant.len() {
                0 => Status::Conflict,
                1 => Status::Defined(compliant[0].clone()),
                _ => Status::Ambiguous(compliant.clone()),
            }
        };
        if let Some(chk) = checker.as_mut() {
            if !chk.agrees(q, &ks, &choices, &compliant, fired.is_empty())? {
                failures.push(key.clone());
            }
        }
        entries.insert(key.clone(), status);
        representatives.insert(key, hist);
    }
    Ok(ExtractionReport {
        partial: PartialStrategy::new(c.clone(), agents, entries),
        representatives,
        spot_check_failures: failures,
    })
}

/// Re-derives each status through the evaluator: the trigger from the
/// disjunction of conditions, compliance of a choice `α` from
/// `◇([C sstit]α ∧ [C acc]RS)`, and for a defined key the pair
/// `◇[C acc]RS ∧ □([C acc]RS → [C sstit]α)`.
struct SpotCheck<'m> {
    m: &'m Model,
    rs: RuleStrategy,
    fired: ExactEvaluator<'m>,
    per_choice: BTreeMap<Vec<ActionId>, (ExactEvaluator<'m>, ExactEvaluator<'m>)>,
}

impl<'m> SpotCheck<'m> {
    fn new(m: &'m Model, rs: &RuleStrategy) -> Result<SpotCheck<'m>> {
        Ok(SpotCheck {
            m,
            rs: rs.clone(),
            fired: ExactEvaluator::new(m, &Formula::disj(rs.conditions().cloned()))?,
            per_choice: BTreeMap::new(),
        })
    }

    fn evaluators(&mut self, acts: &[ActionId]) -> Result<&mut (ExactEvaluator<'m>, ExactEvaluator<'m>)> {
        if !self.per_choice.contains_key(acts) {
            let c = &self.rs.coalition;
            let alpha = Formula::sstit(c.clone(), effect_formula(self.m, c, acts));
            let acc = self.rs.acc_formula();
            let complies = Formula::pos(Formula::and(alpha.clone(), acc.clone()));
            let pins = Formula::and(Formula::pos(acc.clone()), Formula::nec(Formula::implies(acc, alpha)));
            let pair = (ExactEvaluator::new(self.m, &complies)?, ExactEvaluator::new(self.m, &pins)?);
            self.per_choice.insert(acts.to_vec(), pair);
        }
        Ok(self.per_choice.get_mut(acts).expect("just inserted"))
    }

    fn agrees(
        &mut self,
        q: StateId,
        ks: &[StateSet],
        choices: &[Vec<ActionId>],
        compliant: &[Vec<ActionId>],
        none_fired: bool,
    ) -> Result<bool> {
        if self.fired.eval_code(q, ks, 0) == none_fired {
            return Ok(false);
        }
        for acts in choices {
            let expect_pinned = compliant.len() == 1 && compliant[0] == *acts;
            let (complies, pins) = self.evaluators(acts)?;
            if complies.eval_code(q, ks, 0) != compliant.contains(acts) || pins.eval_code(q, ks, 0) != expect_pinned {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Every key reachable from `q` under all profiles triggers some condition.
pub fn check_complete(m: &Model, rs: &RuleStrategy, q: StateId) -> Result<bool> {
    if let Some(c) = rs.conditions().find(|c| !is_moment_determinate_syntactic(c)) {
        return Err(Error::UnsupportedRules(format!("condition `{c}` is not moment-determinate")));
    }
    let agents = key_agents(rs);
    let mut fired = ExactEvaluator::new(m, &Formula::disj(rs.conditions().cloned()))?;
    Ok(reachable_keys(m, &agents, StateSet::singleton(q))
        .into_values()
        .all(|(hist, ks)| fired.eval_code(*hist.last().unwrap(), &ks, 0)))
}

/// A propositional formula whose extension is exactly `target`: the
/// disjunction of the full label signatures of its members.
pub fn definable(m: &Model, target: StateSet) -> Option<Formula> {
    definable_or_witness(m, target).ok()
}

/// Like [`definable`], naming a clashing (inside, outside) pair on failure.
fn definable_or_witness(m: &Model, target: StateSet) -> std::result::Result<Formula, (StateId, StateId)> {
    for q in target.iter() {
        if let Some(r) = (0..m.num_states()).find(|&r| !target.contains(r) && m.signature(r) == m.signature(q)) {
            return Err((q, r));
        }
    }
    let mut sigs: Vec<u64> = Vec::new();
    for q in target.iter() {
        if !sigs.contains(&m.signature(q)) {
            sigs.push(m.signature(q));
        }
    }
    Ok(Formula::disj(sigs.into_iter().map(|sig| {
        Formula::conj((0..m.num_props()).map(|p| {
            let atom = Formula::prop(m.prop_name(p).to_string());
            if sig & (1 << p) != 0 {
                atom
            } else {
                Formula::not(atom)
            }
        }))
    })))
}

/// Distinct joint actions of `s` in order of first appearance, with their preimages.
fn preimages(m: &Model, s: &PositionalStrategy) -> Vec<(Vec<ActionId>, StateSet)> {
    let mut out: Vec<(Vec<ActionId>, StateSet)> = Vec::new();
    for q in 0..m.num_states() {
        let acts = s.at(q);
        match out.iter_mut().find(|(a, _)| a == acts) {
            Some((_, set)) => set.insert(q),
            None => out.push((acts.to_vec(), StateSet::singleton(q))),
        }
    }
    out
}

fn defining_rules(
    m: &Model,
    s: &PositionalStrategy,
    wrap: impl Fn(Formula) -> Formula,
) -> Result<Vec<(Formula, Formula)>> {
    let c = s.coalition();
    preimages(m, s)
        .into_iter()
        .map(|(acts, set)| {
            let xi = definable_or_witness(m, set).map_err(|(inside, outside)| Error::Undefinable {
                action: action_names(m, &acts),
                inside: m.state_name(inside).to_string(),
                outside: m.state_name(outside).to_string(),
            })?;
            Ok((wrap(xi), effect_formula(m, c, &acts)))
        })
        .collect()
}

/// The proposition-action rule set `{ξ_n ⇒ α_n}` whose conditions define the
/// preimages of `s`. Re-extracts and checks completeness before returning.
pub fn repr_positional(m: &Model, s: &PositionalStrategy) -> Result<RuleStrategy> {
    let rs = RuleStrategy::new(s.coalition().clone(), defining_rules(m, s, |xi| xi)?);
    let report = extract_partial_with(m, &rs, false)?;
    for (key, status) in report.partial.entries() {
        if status.defined() != Some(s.at(key.state)) {
            return Err(Error::Representation(format!(
                "re-extraction gives {} at {}",
                status.label(),
                m.state_name(key.state)
            )));
        }
    }
    for q in 0..m.num_states() {
        if !check_complete(m, &rs, q)? {
            return Err(Error::Representation(format!("rules incomplete from {}", m.state_name(q))));
        }
    }
    Ok(rs)
}

/// A knowledge-action rule set for one agent together with the three checks
/// that make it a representation at the starting state.
#[derive(Clone, Debug)]
pub struct UniformRepresentation {
    pub rules: RuleStrategy,
    /// `K_i □G ⋁ K_i ξ_n`, see [`knowledge_clauses`].
    pub known_complete: bool,
    /// `K_i G ◇[i acc] RS`, see [`knowledge_clauses`].
    pub known_able: bool,
    /// `[i perf] RS` under every positional profile extending the strategy.
    pub performs: bool,
}

impl UniformRepresentation {
    pub fn holds(&self) -> bool {
        self.known_complete && self.known_able && self.performs
    }
}

/// Formula for clause (1): the agent knows the rule set is complete.
pub fn known_complete_formula(agent: AgentId, rs: &RuleStrategy) -> Formula {
    Formula::knows(agent, rs.completeness_formula())
}

/// Formula for clause (2): the agent knows it stays able to act accordingly.
pub fn known_able_formula(agent: AgentId, rs: &RuleStrategy) -> Formula {
    Formula::knows(agent, Formula::globally(Formula::pos(rs.acc_formula())))
}

/// Clauses (1) and (2) at `q0` with strategies ranging over all perfect-recall
/// strategies. Both are `K_i G χ` for a `χ` fixed by the current key, so they
/// hold iff no key reachable from the agent's block is `NoTrigger`, resp. `Conflict`.
pub fn knowledge_clauses(m: &Model, agent: AgentId, partial: &PartialStrategy, q0: StateId) -> Result<(bool, bool)> {
    let (mut complete, mut able) = (true, true);
    for k in reachable_keys(m, partial.key_agents(), uniform_domain(m, agent, q0)).keys() {
        match partial.entries().get(k) {
            Some(Status::NoTrigger) => complete = false,
            Some(Status::Conflict) => able = false,
            Some(_) => {}
            None => return Err(Error::Invalid(format!("no extracted status at {}", k.display(m, partial.key_agents())))),
        }
    }
    Ok((complete, able))
}

/// Histories starting `~agent`-indistinguishably from `q0`, as start states.
pub fn uniform_domain(m: &Model, agent: AgentId, q0: StateId) -> StateSet {
    m.block(agent, q0)
}

/// `{K_i ξ_n ⇒ act{i: α_n}}` for a single agent's positional strategy that is
/// uniform on histories starting indistinguishably from `q0`.
pub fn repr_uniform(m: &Model, s: &PositionalStrategy, q0: StateId) -> Result<UniformRepresentation> {
    let agent = match s.coalition().members() {
        [i] => *i,
        _ => {
            return Err(Error::Invalid(format!(
                "expected a strategy for a single agent, got {}",
                s.coalition()
            )))
        }
    };
    if q0 >= m.num_states() {
        return Err(Error::Invalid(format!("no state with index {q0}")));
    }
    if !is_uniform_on(m, s, agent, uniform_domain(m, agent, q0), UniformScope::Unbounded)? {
        return Err(Error::NonUniform(format!(
            "agent {} acts differently at indistinguishable histories from {}",
            agent + 1,
            m.state_name(q0)
        )));
    }
    let rules = RuleStrategy::new(
        s.coalition().clone(),
        defining_rules(m, s, |xi| Formula::knows(agent, xi))?,
    );
    let start = [q0];
    let partial = extract_partial_with(m, &rules, false)?.partial;
    let (known_complete, known_able) = knowledge_clauses(m, agent, &partial, q0)?;
    // Positional strategies are among the perfect-recall ones, so the generic
    // evaluation can only be weaker.
    let ks: Vec<StateSet> = (0..m.num_agents()).map(|i| m.block(i, q0)).collect();
    for (holds, f) in [
        (known_complete, known_complete_formula(agent, &rules)),
        (known_able, known_able_formula(agent, &rules)),
    ] {
        if holds && !ExactEvaluator::new(m, &f)?.eval_code(q0, &ks, 0) {
            return Err(Error::Invalid(format!("{f} fails at {} under positional profiles", m.state_name(q0))));
        }
    }

    let space = crate::eval::ProfileSpace::new(m)?;
    let base = s.complete_with(m, &PositionalStrategy::first_available(m, Coalition::all(m.num_agents())))?;
    let mut rev = RuleEvaluator::new(m, &rules)?;
    let history = History::new(m, start.to_vec())?;
    let mut performs = true;
    for code in space.extensions(space.encode(m, &base), s.coalition()) {
        let profile = Profile::positional(m, space.decode(m, code))?;
        let pt = crate::eval::EvalPoint::new(m, history.clone(), profile);
        if !rev.perf(&pt)? {
            performs = false;
            break;
        }
    }
    Ok(UniformRepresentation {
        rules,
        known_complete,
        known_able,
        performs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epistemic::extension;
    use crate::fixtures::{m1, m2, rs};
    use crate::strategy::parse_positional;
    use crate::syntax::parse_rules;

    fn statuses(m: &Model, r: &RuleStrategy) -> Vec<String> {
        let report = extract_partial(m, r).unwrap();
        assert!(report.spot_check_failures.is_empty(), "{r}");
        (0..m.num_states())
            .map(|q| {
                let s = report.status_at_state(m, q).unwrap();
                match s.defined() {
                    Some(a) => format!("Defined({})", action_names(m, a)),
                    None => s.label().to_string(),
                }
            })
            .collect()
    }

    #[test]
    fn extraction_table() {
        let m = m1();
        assert_eq!(statuses(&m, &rs(1)), ["Defined(b)", "Defined(a)"]);
        assert_eq!(statuses(&m, &rs(2)), ["Conflict", "NoTrigger"]);
        assert_eq!(statuses(&m, &rs(3)), ["NoTrigger", "Defined(a)"]);
        assert_eq!(statuses(&m, &rs(4)), ["NoTrigger", "Conflict"]);
    }

    #[test]
    fn extraction_with_knowledge_keys() {
        let m = m2();
        let r = parse_rules("strategy for {1}: K{1} (p | ~p) => act{1:a}").unwrap();
        let report = extract_partial(&m, &r).unwrap();
        assert!(report.spot_check_failures.is_empty());
        assert!(report.partial.is_total());
        let r = parse_rules("strategy for {1,2}: p => act{1:b}").unwrap();
        let report = extract_partial(&m, &r).unwrap();
        assert_eq!(report.status_at_state(&m, 1).unwrap(), &Status::Defined(vec![1, 2]));
        let r = parse_rules("strategy for {1,2}: p | ~p => act{2:c}").unwrap();
        let report = extract_partial(&m, &r).unwrap();
        assert!(matches!(report.status_at_state(&m, 0), Some(Status::Ambiguous(v)) if v.len() == 2));
        assert!(report.spot_check_failures.is_empty());
    }

    #[test]
    fn extraction_rejects_bad_shapes() {
        let m = m1();
        let r = parse_rules("strategy for {1}: X p => act{1:a}").unwrap();
        assert!(matches!(extract_partial(&m, &r), Err(Error::UnsupportedRules(_))));
        let r = parse_rules("strategy for {1}: p => X p").unwrap();
        assert!(matches!(extract_partial(&m, &r), Err(Error::UnsupportedRules(_))));
    }

    #[test]
    fn completeness_examples() {
        let m = m1();
        assert!(check_complete(&m, &rs(1), 0).unwrap());
        assert!(!check_complete(&m, &rs(3), 0).unwrap());
        assert!(check_complete(&m, &rs(3), 1).unwrap());
        let m = m2();
        let r = parse_rules("strategy for {1}: K{1} p => act{1:b}; K{1} ~p => act{1:a}").unwrap();
        assert!(!check_complete(&m, &r, 0).unwrap());
    }

    #[test]
    fn definability_examples() {
        let m = m1();
        let f = definable(&m, StateSet::singleton(1)).unwrap();
        assert_eq!(extension(&m, &f).unwrap(), StateSet::singleton(1));
        let m = m2();
        let f = definable(&m, m.all_states()).unwrap();
        assert_eq!(extension(&m, &f).unwrap(), m.all_states());
        let m = negative_positional_model();
        assert!(definable(&m, StateSet::singleton(0)).is_none());
        assert_eq!(
            extension(&m, &definable(&m, StateSet::EMPTY).unwrap()).unwrap(),
            StateSet::EMPTY
        );
    }

    #[test]
    fn positional_round_trip() {
        let m = m1();
        let s = parse_positional(&m, "positional for {1}: q0 -> b; q1 -> a").unwrap();
        let r = repr_positional(&m, &s).unwrap();
        assert_eq!(r.rules.len(), 2);
        let m = m2();
        let s = parse_positional(&m, "positional for {1}: q0 -> a; q1 -> a").unwrap();
        let r = repr_positional(&m, &s).unwrap();
        assert_eq!(r.rules.len(), 1);
        assert_eq!(extension(&m, &r.rules[0].condition).unwrap(), m.all_states());
        let m = negative_positional_model();
        let s = parse_positional(&m, "positional for {1}: q0 -> a; q1 -> b").unwrap();
        assert!(matches!(repr_positional(&m, &s), Err(Error::Undefinable { .. })));
    }

    #[test]
    fn uniform_examples() {
        let m = m2();
        let s = parse_positional(&m, "positional for {1}: q0 -> a; q1 -> a").unwrap();
        let u = repr_uniform(&m, &s, 0).unwrap();
        assert!(u.holds());
        assert_eq!(u.rules.rules.len(), 1);
        let s = parse_positional(&m, "positional for {1}: q0 -> a; q1 -> b").unwrap();
        assert!(matches!(repr_uniform(&m, &s, 0), Err(Error::NonUniform(_))));
        let m = m1();
        let s = parse_positional(&m, "positional for {1}: q0 -> b; q1 -> a").unwrap();
        let u = repr_uniform(&m, &s, 0).unwrap();
        assert!(u.holds());
        let want = parse_rules("strategy for {1}: K{1} ~p => act{1:b}; K{1} p => act{1:a}").unwrap();
        assert_eq!(u.rules, want);
    }

    #[test]
    fn knowledge_clauses_see_non_positional_plays() {
        // (q0, K={q0}) is only reached by playing b and later a at q2, so no
        // positional profile leads to the conflict there.
        let m = crate::model::parse_model(
            "agents: 1\nstates: q0 q1 q2\nactions: a b\nprops: p q\n\
             label q0: p q\nlabel q1: p\nlabel q2: q\n\
             avail 1 q0: a b\navail 1 q1: a b\navail 1 q2: a b\n\
             trans q0 (a) -> q0\ntrans q0 (b) -> q2\ntrans q1 (a) -> q1\n\
             trans q1 (b) -> q2\ntrans q2 (a) -> q0\ntrans q2 (b) -> q1\n\
             indist 1: {q0 q2}\n",
        )
        .unwrap();
        let r = parse_rules("strategy for {1}: K{1} p => act{1:a}; K{1} q => act{1:b}").unwrap();
        let partial = extract_partial(&m, &r).unwrap().partial;
        assert_eq!(knowledge_clauses(&m, 0, &partial, 0).unwrap(), (true, false));
        let ks = vec![m.block(0, 0)];
        assert!(ExactEvaluator::new(&m, &known_able_formula(0, &r)).unwrap().eval_code(0, &ks, 0));
    }
}
