//! Brute-force reference semantics and enumerators.
//!
//! Deliberately shares nothing with [`crate::eval`]: it walks the formula tree,
//! builds histories explicitly and re-enumerates profiles on every quantifier.

mod agree;
mod corpus;
mod gen;
mod mutate;
mod valid;

pub use agree::{check_agreement, histories_up_to, Agreement, Disagreement};
pub use corpus::formula_corpus;
pub use mutate::{mutate, Fault};
pub use valid::{
    check_validities, validity_instances, Instance, ValidityFailure, ValidityReport, SCHEMAS,
    TEMPORAL_SCHEMAS,
};

pub use gen::{
    enumerate_models, enumerate_strategies, exhaustive_models, positional_strategies,
    random_model, tree_strategies, EnumBounds, StrategyKind,
};

use crate::error::{Error, Result};
use crate::eval::Verdict;
use crate::model::{ActionId, AgentId, History, Model, StateId};
use crate::strategy::Strategy;
use crate::syntax::Formula;

/// Most profiles one quantifier may range over before the oracle gives up.
pub const ORACLE_BUDGET: usize = 1 << 12;

#[derive(Clone)]
enum Plan {
    /// Whatever the top-level profile does.
    Given,
    /// A positional choice per state.
    Table(Vec<ActionId>),
}

struct Oracle<'a> {
    m: &'a Model,
    top: &'a dyn Strategy,
    limit: usize,
}

fn unknown(why: &str) -> Verdict {
    Verdict::Unknown(why.to_string())
}

fn check_names(m: &Model, f: &Formula) -> Result<()> {
    let agent_ok = |i: AgentId| {
        if i < m.num_agents() {
            Ok(())
        } else {
            Err(Error::Binding(format!("agent {} does not exist", i + 1)))
        }
    };
    match f {
        Formula::Act(a) => {
            for (&i, name) in &a.0 {
                agent_ok(i)?;
                if m.action_id(name).is_none() {
                    return Err(Error::Binding(format!("unknown action `{name}`")));
                }
            }
        }
        Formula::Sstit(c, _) => {
            for &i in c.members() {
                agent_ok(i)?;
            }
        }
        Formula::Knows(i, _) => agent_ok(*i)?,
        _ => {}
    }
    f.children().into_iter().try_for_each(|c| check_names(m, c))
}

/// Every positional table for one agent, first state varying fastest.
fn agent_tables(m: &Model, i: AgentId) -> Vec<Vec<ActionId>> {
    let mut out = vec![Vec::new()];
    for q in 0..m.num_states() {
        out = m
            .avail(i, q)
            .iter()
            .flat_map(|&a| {
                out.iter().map(move |t| {
                    let mut t = t.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

/// Every way of giving the agents in `who` a positional table, others keeping `plans`.
fn variants(m: &Model, plans: &[Plan], who: &[AgentId]) -> Option<Vec<Vec<Plan>>> {
    let mut out = vec![plans.to_vec()];
    for &i in who {
        let tables = agent_tables(m, i);
        if out.len() * tables.len() > ORACLE_BUDGET {
            return None;
        }
        out = out
            .iter()
            .flat_map(|p| {
                tables.iter().map(move |t| {
                    let mut p = p.clone();
                    p[i] = Plan::Table(t.clone());
                    p
                })
            })
            .collect();
    }
    Some(out)
}

/// All histories of length `len`, written out one by one.
fn all_histories(m: &Model, len: usize) -> Vec<Vec<StateId>> {
    let mut out: Vec<Vec<StateId>> = (0..m.num_states()).map(|q| vec![q]).collect();
    for _ in 1..len {
        out = out
            .iter()
            .flat_map(|h| {
                let last = *h.last().unwrap();
                (0..m.num_states())
                    .filter(move |&r| m.action_profiles(last).iter().any(|p| m.out(last, p) == Some(r)))
                    .map(move |r| {
                        let mut e = h.clone();
                        e.push(r);
                        e
                    })
            })
            .collect();
    }
    out
}

impl Oracle<'_> {
    fn action(&self, plans: &[Plan], i: AgentId, hist: &[StateId]) -> ActionId {
        match &plans[i] {
            Plan::Table(t) => t[*hist.last().unwrap()],
            Plan::Given => {
                let pos = self.top.coalition().position(i).expect("profile covers every agent");
                self.top.action(self.m, hist).expect("profile defined")[pos]
            }
        }
    }

    fn eval(&self, f: &Formula, hist: &[StateId], plans: &[Plan]) -> Verdict {
        let q = *hist.last().unwrap();
        match f {
            Formula::Top => Verdict::True,
            Formula::Prop(p) => Verdict::from_bool(self.m.prop_id(p).is_some_and(|p| self.m.holds(q, p))),
            Formula::Act(a) => Verdict::from_bool(a.0.iter().all(|(&i, name)| {
                self.m.action_name(self.action(plans, i, hist)) == name
            })),
            Formula::And(a, b) => {
                let left = self.eval(a, hist, plans);
                if left == Verdict::False {
                    return left;
                }
                left.and(self.eval(b, hist, plans))
            }
            Formula::Not(a) => !self.eval(a, hist, plans),
            Formula::Next(a) => {
                if hist.len() >= self.limit {
                    return unknown("next step past the depth limit");
                }
                let joint: Vec<ActionId> =
                    (0..self.m.num_agents()).map(|i| self.action(plans, i, hist)).collect();
                let mut h2 = hist.to_vec();
                h2.push(self.m.out(q, &joint).expect("executable profile"));
                self.eval(a, &h2, plans)
            }
            Formula::Globally(a) => {
                let mut h = hist.to_vec();
                loop {
                    if self.eval(a, &h, plans) == Verdict::False {
                        return Verdict::False;
                    }
                    if h.len() >= self.limit {
                        return unknown("G reaches the depth limit");
                    }
                    let last = *h.last().unwrap();
                    let joint: Vec<ActionId> =
                        (0..self.m.num_agents()).map(|i| self.action(plans, i, &h)).collect();
                    h.push(self.m.out(last, &joint).expect("executable profile"));
                }
            }
            Formula::Nec(a) => {
                let everyone: Vec<AgentId> = (0..self.m.num_agents()).collect();
                self.forall(a, hist, plans, &everyone)
            }
            Formula::Sstit(c, a) => {
                let others: Vec<AgentId> = (0..self.m.num_agents()).filter(|&i| !c.contains(i)).collect();
                self.forall(a, hist, plans, &others)
            }
            Formula::Knows(i, a) => {
                let everyone: Vec<AgentId> = (0..self.m.num_agents()).collect();
                let mut out = Verdict::True;
                for h2 in all_histories(self.m, hist.len()) {
                    let same = h2
                        .iter()
                        .zip(hist)
                        .all(|(&x, &y)| self.m.indist(*i, x, y));
                    if !same {
                        continue;
                    }
                    out = out.and(self.forall(a, &h2, plans, &everyone));
                    if out == Verdict::False {
                        break;
                    }
                }
                out
            }
        }
    }

    fn forall(&self, f: &Formula, hist: &[StateId], plans: &[Plan], who: &[AgentId]) -> Verdict {
        let Some(all) = variants(self.m, plans, who) else {
            return unknown("too many profiles");
        };
        let mut out = Verdict::True;
        for p in all {
            out = out.and(self.eval(f, hist, &p));
            if out == Verdict::False {
                break;
            }
        }
        out
    }
}

/// Literal evaluation of `f` at the end of `h` under the full profile `s`,
/// looking at most `depth` steps past the current position.
pub fn oracle_eval(m: &Model, h: &History, s: &dyn Strategy, f: &Formula, depth: usize) -> Result<Verdict> {
    check_names(m, f)?;
    if s.coalition().len() != m.num_agents() {
        return Err(Error::Representation(format!(
            "a profile needs all agents, got {}",
            s.coalition()
        )));
    }
    let oracle = Oracle {
        m,
        top: s,
        limit: h.len() + depth,
    };
    let plans = vec![Plan::Given; m.num_agents()];
    Ok(oracle.eval(f, h.states(), &plans))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{m1, m2};
    use crate::strategy::{parse_positional, TreeStrategy};
    use crate::syntax::parse_formula;

    fn run(m: &Model, prof: &str, f: &str, d: usize) -> Verdict {
        let s = parse_positional(m, prof).unwrap();
        let h = History::initial(0);
        let t = TreeStrategy::from_positional(&s, &h, d);
        oracle_eval(m, &h, &t, &parse_formula(f).unwrap(), d).unwrap()
    }

    #[test]
    fn examples() {
        let m = m1();
        assert_eq!(run(&m, "positional for {1}: q0 -> b; q1 -> a", "X p", 3), Verdict::True);
        assert!(run(&m, "positional for {1}: q0 -> a; q1 -> a", "G ~p", 2).is_unknown());
        assert_eq!(run(&m, "positional for {1}: q0 -> b; q1 -> a", "G p", 2), Verdict::False);
        let m = m2();
        let prof = "positional for {1,2}: q0 -> a,c; q1 -> a,c";
        assert_eq!(run(&m, prof, "box (p | ~p)", 2), Verdict::True);
        assert_eq!(run(&m, prof, "K{1} p", 2), Verdict::False);
        assert_eq!(run(&m, prof, "dia act{1:a}", 2), Verdict::True);
        assert_eq!(run(&m, prof, "K{1} act{1:a}", 2), Verdict::False);
    }

    #[test]
    fn binding_errors() {
        let m = m1();
        let s = parse_positional(&m, "positional for {1}: q0 -> a; q1 -> a").unwrap();
        let f = parse_formula("act{1:zz}").unwrap();
        assert!(oracle_eval(&m, &History::initial(0), &s, &f, 1).is_err());
    }
}
