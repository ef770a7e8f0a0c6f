//! Candidate rule sets for the harness.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::epistemic::extension;
use crate::model::{ActionId, AgentId, Coalition, Model};
use crate::syntax::{Formula, RuleStrategy};

/// Propositional conditions built from the model's propositions and `true`
/// with at most two `~`/`&` connectives, one per non-empty extension,
/// smallest first.
pub fn condition_atoms(m: &Model) -> Vec<Formula> {
    let props: Vec<Formula> = (0..m.num_props())
        .map(|p| Formula::prop(m.prop_name(p).to_string()))
        .collect();
    let mut one: Vec<Formula> = props.iter().map(|p| Formula::not(p.clone())).collect();
    for (n, a) in props.iter().enumerate() {
        for b in &props[n + 1..] {
            one.push(Formula::and(a.clone(), b.clone()));
        }
    }
    let mut two: Vec<Formula> = one.iter().map(|f| Formula::not(f.clone())).collect();
    for a in &props {
        for b in &one {
            two.push(Formula::and(a.clone(), b.clone()));
        }
    }

    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let ordered = props.into_iter().chain([Formula::Top]).chain(one).chain(two);
    for f in ordered {
        let ext = extension(m, &f).expect("propositional by construction");
        if !ext.is_empty() && seen.insert(ext) {
            out.push(f);
        }
    }
    out
}

/// Every joint action of the coalition over the whole action alphabet.
pub fn coalition_effects(m: &Model, c: &Coalition) -> Vec<Vec<ActionId>> {
    let mut out = vec![Vec::new()];
    for _ in c.members() {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..m.num_actions()).map(move |a| {
                    let mut p = p.clone();
                    p.push(a);
                    p
                })
            })
            .collect();
    }
    out
}

/// Rule sets drawn from a candidate pool, with how many there were in total.
#[derive(Clone, Debug)]
pub struct RuleSetSample {
    pub sets: Vec<RuleStrategy>,
    /// Number of distinct rule sets of the allowed sizes.
    pub total: u128,
}

impl RuleSetSample {
    pub fn is_exhaustive(&self) -> bool {
        self.sets.len() as u128 == self.total
    }

    pub fn coverage(&self) -> String {
        format!("{}/{}", self.sets.len(), self.total)
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, j| acc * (n - j) as u128 / (j as u128 + 1))
}

fn combinations(n: usize, k: usize, out: &mut Vec<Vec<usize>>) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut Vec::with_capacity(k), out);
}

/// All sets of 1..=`max_rules` distinct rules from `pool` when there are at
/// most `limit` of them, otherwise `limit` distinct sets drawn with `seed`.
fn choose_sets(
    c: &Coalition,
    pool: &[(Formula, Formula)],
    max_rules: usize,
    limit: usize,
    seed: u64,
) -> RuleSetSample {
    let n = pool.len();
    let sizes = 1..=max_rules.min(n);
    let total: u128 = sizes.clone().map(|k| binomial(n, k)).sum();
    let mut picks: Vec<Vec<usize>> = Vec::new();
    if total <= limit as u128 {
        for k in sizes {
            combinations(n, k, &mut picks);
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = BTreeSet::new();
        while picks.len() < limit {
            let k = rng.gen_range(sizes.clone());
            let mut idx = sample(&mut rng, n, k).into_vec();
            idx.sort_unstable();
            if seen.insert(idx.clone()) {
                picks.push(idx);
            }
        }
    }
    let sets = picks
        .into_iter()
        .map(|idx| RuleStrategy::new(c.clone(), idx.into_iter().map(|i| pool[i].clone()).collect()))
        .collect();
    RuleSetSample { sets, total }
}

fn effect(m: &Model, c: &Coalition, acts: &[ActionId]) -> Formula {
    Formula::act(
        c.members()
            .iter()
            .zip(acts)
            .map(|(&i, &a)| (i, m.action_name(a).to_string())),
    )
}

/// Proposition-action rule sets for `c`: conditions from [`condition_atoms`],
/// effects from [`coalition_effects`].
pub fn proposition_action_rule_sets(
    m: &Model,
    c: &Coalition,
    max_rules: usize,
    limit: usize,
    seed: u64,
) -> RuleSetSample {
    let effects = coalition_effects(m, c);
    let pool: Vec<(Formula, Formula)> = condition_atoms(m)
        .into_iter()
        .flat_map(|cond| effects.iter().map(move |e| (cond.clone(), effect(m, c, e))))
        .collect();
    choose_sets(c, &pool, max_rules, limit, seed)
}

/// Knowledge-action rule sets for one agent: conditions `K{i} c` over
/// [`condition_atoms`], effects over the agent's actions.
pub fn knowledge_action_rule_sets(
    m: &Model,
    agent: AgentId,
    max_rules: usize,
    limit: usize,
    seed: u64,
) -> RuleSetSample {
    let c = Coalition::singleton(agent);
    let effects = coalition_effects(m, &c);
    let pool: Vec<(Formula, Formula)> = condition_atoms(m)
        .into_iter()
        .flat_map(|cond| {
            let k = Formula::knows(agent, cond);
            effects.iter().map(move |e| (k.clone(), effect(m, &Coalition::singleton(agent), e)))
        })
        .collect();
    choose_sets(&c, &pool, max_rules, limit, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{m1, m2};

    #[test]
    fn atoms_are_distinct_extensions() {
        let m = m1();
        let atoms = condition_atoms(&m);
        assert_eq!(atoms.len(), 3);
        assert_eq!(atoms[0], Formula::prop("p"));
    }

    #[test]
    fn exhaustive_when_small() {
        let m = m1();
        let s = proposition_action_rule_sets(&m, &Coalition::singleton(0), 4, 1000, 0);
        // 3 conditions x 2 effects, sets of 1..=4 rules.
        assert_eq!(s.total, 6 + 15 + 20 + 15);
        assert!(s.is_exhaustive());
        assert!(s.sets.iter().all(|r| r.is_proposition_action()));
    }

    #[test]
    fn sampled_sets_are_distinct_and_seeded() {
        let m = m2();
        let all = Coalition::all(2);
        let a = proposition_action_rule_sets(&m, &all, 4, 50, 3);
        let b = proposition_action_rule_sets(&m, &all, 4, 50, 3);
        assert_eq!(a.sets, b.sets);
        assert!(!a.is_exhaustive());
        let distinct: BTreeSet<String> = a.sets.iter().map(|r| r.to_string()).collect();
        assert_eq!(distinct.len(), 50);
        let k = knowledge_action_rule_sets(&m, 0, 2, 1000, 0);
        assert!(k.sets.iter().all(|r| r.is_knowledge_action(0)));
    }
}
