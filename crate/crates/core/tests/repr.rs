mod common;

use proptest::prelude::*;

use sstit_core::eval::ProfileSpace;
use sstit_core::oracle::histories_up_to;
use sstit_core::repr::{
    check_complete, definable, extract_partial, knowledge_action_rule_sets, proposition_action_rule_sets,
    repr_positional,
};
use sstit_core::{eval_perf, Coalition, Error, EvalPoint, Model, Profile, RuleStrategy, StateSet, Status};

fn rule_set(m: &Model, c: &Coalition, pick: usize, seed: u64, knowledge: bool) -> RuleStrategy {
    let sets = if knowledge {
        knowledge_action_rule_sets(m, c.members()[0], 4, 50, seed).sets
    } else {
        proposition_action_rule_sets(m, c, 4, 50, seed).sets
    };
    sets[pick % sets.len()].clone()
}

fn reachable(m: &Model, q: usize) -> StateSet {
    let mut seen = StateSet::singleton(q);
    let mut frontier = seen;
    while !frontier.is_empty() {
        let next: StateSet = frontier.iter().flat_map(|r| m.successors(r).iter()).collect();
        frontier = StateSet::from_bits(next.bits() & !seen.bits());
        seen = seen.union(next);
    }
    seen
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn every_key_gets_one_checked_status(
        m in common::harness_model(),
        mask in any::<u32>(),
        pick in any::<usize>(),
        seed in any::<u64>(),
        knowledge in any::<bool>(),
    ) {
        let c = if knowledge { Coalition::singleton(mask as usize % m.num_agents()) } else { common::coalition(&m, mask) };
        let rs = rule_set(&m, &c, pick, seed, knowledge);
        let report = extract_partial(&m, &rs).unwrap();
        prop_assert!(report.spot_check_failures.is_empty(), "{}", rs);
        prop_assert_eq!(
            report.partial.entries().keys().collect::<Vec<_>>(),
            report.representatives.keys().collect::<Vec<_>>()
        );
        for h in histories_up_to(&m, 3) {
            prop_assert!(report.partial.status(&m, h.states()).is_some());
        }
        let counts = report.counts();
        prop_assert_eq!(
            counts.defined + counts.no_trigger + counts.conflict + counts.ambiguous,
            report.partial.entries().len()
        );
    }

    #[test]
    fn positional_round_trip(m in common::harness_model(), mask in any::<u32>(), pick in any::<usize>()) {
        let c = common::coalition(&m, mask);
        let s = common::nth_positional(&m, &c, pick);
        match repr_positional(&m, &s) {
            Ok(rs) => {
                let report = extract_partial(&m, &rs).unwrap();
                for q in 0..m.num_states() {
                    prop_assert_eq!(report.status_at_state(&m, q).and_then(Status::defined), Some(s.at(q)));
                }
            }
            Err(Error::Undefinable { .. }) => {
                let undefinable = (0..m.num_states()).any(|q| {
                    let pre: StateSet = (0..m.num_states()).filter(|&r| s.at(r) == s.at(q)).collect();
                    definable(&m, pre).is_none()
                });
                prop_assert!(undefinable);
            }
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn complete_rules_are_defined_iff_conflict_free(
        m in common::harness_model(),
        mask in any::<u32>(),
        pick in any::<usize>(),
        seed in any::<u64>(),
    ) {
        let c = common::coalition(&m, mask);
        let rs = rule_set(&m, &c, pick, seed, false);
        let report = extract_partial(&m, &rs).unwrap();
        for q in 0..m.num_states() {
            if !check_complete(&m, &rs, q).unwrap() {
                continue;
            }
            let statuses: Vec<_> = reachable(&m, q).iter().map(|r| report.status_at_state(&m, r).unwrap()).collect();
            prop_assert!(!statuses.iter().any(|s| **s == Status::NoTrigger));
            let all_defined = statuses.iter().all(|s| s.defined().is_some());
            let conflict_free = !statuses.iter().any(|s| **s == Status::Conflict);
            prop_assert_eq!(all_defined, conflict_free);
        }
    }

    #[test]
    fn performing_depends_only_on_the_coalition(
        m in common::harness_model(),
        mask in any::<u32>(),
        picks in any::<[usize; 3]>(),
        seed in any::<u64>(),
        knowledge in any::<bool>(),
    ) {
        let c = if knowledge { Coalition::singleton(mask as usize % m.num_agents()) } else { common::coalition(&m, mask) };
        let rs = rule_set(&m, &c, picks[0], seed, knowledge);
        let space = ProfileSpace::new(&m).unwrap();
        let all = Coalition::all(m.num_agents());
        let base = common::nth_positional(&m, &all, picks[1]);
        let other = common::nth_positional(&m, &all, picks[2]);
        let mixed = base.restrict(&c).unwrap().complete_with(&m, &other).unwrap();
        prop_assert_eq!(space.extensions(space.encode(&m, &base), &c).any(|k| k == space.encode(&m, &mixed)), true);
        for h in histories_up_to(&m, 1) {
            let at = |s: &sstit_core::PositionalStrategy| {
                eval_perf(&EvalPoint::new(&m, h.clone(), Profile::positional(&m, s.clone()).unwrap()), &rs).unwrap()
            };
            prop_assert_eq!(at(&base), at(&mixed));
        }
    }
}
