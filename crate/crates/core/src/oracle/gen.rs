//! Seeded and exhaustive generation of small models, and strategy enumeration.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{validate_model, ActionId, Coalition, History, Model, ModelParts, StateId};
use crate::strategy::{PositionalStrategy, Strategy, TreeStrategy};

/// Most strategies one enumeration may produce.
pub const MAX_STRATEGIES: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumBounds {
    pub max_states: usize,
    pub max_agents: usize,
    pub max_actions: usize,
    pub max_props: usize,
    pub history_depth: usize,
    pub tree_depth: usize,
    pub max_rules: usize,
    pub seed: u64,
}

impl Default for EnumBounds {
    fn default() -> Self {
        EnumBounds {
            max_states: 3,
            max_agents: 2,
            max_actions: 2,
            max_props: 2,
            history_depth: 3,
            tree_depth: 1,
            max_rules: 4,
            seed: 0,
        }
    }
}

impl EnumBounds {
    pub fn with_seed(seed: u64) -> Self {
        EnumBounds {
            seed,
            ..EnumBounds::default()
        }
    }

    /// Larger models for the representation harness: up to 4 states, 3 actions, 3 propositions.
    pub fn harness(seed: u64) -> Self {
        EnumBounds {
            max_states: 4,
            max_actions: 3,
            max_props: 3,
            seed,
            ..EnumBounds::default()
        }
    }

    pub fn check(&self) -> Result<()> {
        let fields = [
            ("states", self.max_states),
            ("agents", self.max_agents),
            ("actions", self.max_actions),
            ("props", self.max_props),
            ("history depth", self.history_depth),
            ("tree depth", self.tree_depth),
            ("rules", self.max_rules),
        ];
        match fields.iter().find(|(_, v)| *v == 0) {
            Some((name, _)) => Err(Error::Invalid(format!("bound on {name} must be at least 1"))),
            None if self.max_states > 64 => Err(Error::Invalid("at most 64 states".into())),
            None => Ok(()),
        }
    }
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn action_names(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

fn prop_names(n: usize) -> Vec<String> {
    const NAMES: [&str; 6] = ["p", "q", "r", "s", "t", "u"];
    (0..n)
        .map(|i| NAMES.get(i).map(|s| s.to_string()).unwrap_or(format!("p{i}")))
        .collect()
}

/// Blocks from a restricted-growth assignment of states to block numbers.
fn blocks_of(assign: &[usize]) -> Vec<Vec<StateId>> {
    let count = assign.iter().max().map_or(0, |m| m + 1);
    let mut blocks = vec![Vec::new(); count];
    for (q, &b) in assign.iter().enumerate() {
        blocks[b].push(q);
    }
    blocks.retain(|b| b.len() > 1);
    blocks
}

fn profiles_of(avail: &[Vec<Vec<ActionId>>], q: StateId) -> Vec<Vec<ActionId>> {
    let mut out = vec![Vec::new()];
    for per_agent in avail {
        out = out
            .iter()
            .flat_map(|p| {
                per_agent[q].iter().map(move |&a| {
                    let mut p = p.clone();
                    p.push(a);
                    p
                })
            })
            .collect();
    }
    out
}

/// The `index`-th model of the seeded stream. Each index has its own random
/// stream, so any model can be regenerated on its own.
pub fn random_model(b: &EnumBounds, index: u64) -> Result<Model> {
    b.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(b.seed);
    rng.set_stream(index);
    for _ in 0..10_000 {
        let n = if b.max_states >= 2 { rng.gen_range(2..=b.max_states) } else { 1 };
        let k = rng.gen_range(1..=b.max_agents);
        let na = if b.max_actions >= 2 { rng.gen_range(2..=b.max_actions) } else { 1 };
        let np = rng.gen_range(1..=b.max_props);
        let labels: Vec<Vec<usize>> = (0..n)
            .map(|_| (0..np).filter(|_| rng.gen_bool(0.5)).collect())
            .collect();
        let mut indist = Vec::new();
        let mut avail = Vec::new();
        for _ in 0..k {
            let mut assign = Vec::with_capacity(n);
            let mut used = 0;
            for _ in 0..n {
                let blk = rng.gen_range(0..=used);
                if blk == used {
                    used += 1;
                }
                assign.push(blk);
            }
            let block_avail: Vec<Vec<ActionId>> = (0..used)
                .map(|_| {
                    let mask = rng.gen_range(1..(1u32 << na));
                    (0..na).filter(|&a| mask & (1 << a) != 0).collect()
                })
                .collect();
            avail.push(assign.iter().map(|&blk| block_avail[blk].clone()).collect::<Vec<_>>());
            indist.push(blocks_of(&assign));
        }
        let mut trans = BTreeMap::new();
        let mut fits = true;
        for q in 0..n {
            let profiles = profiles_of(&avail, q);
            if profiles.len() > n {
                fits = false;
                break;
            }
            let mut targets: Vec<StateId> = (0..n).collect();
            targets.shuffle(&mut rng);
            for (p, t) in profiles.into_iter().zip(targets) {
                trans.insert((q, p), t);
            }
        }
        if !fits {
            continue;
        }
        let parts = ModelParts {
            num_agents: k,
            states: names("q", n),
            actions: action_names(na),
            props: prop_names(np),
            labels,
            avail,
            trans,
            indist,
        };
        let m = Model::from_parts(parts)?;
        if validate_model(&m).is_empty() {
            return Ok(m);
        }
    }
    Err(Error::Budget(format!("no valid model for stream {index}")))
}

/// The first `count` models of the seeded stream.
pub fn enumerate_models(b: &EnumBounds, count: usize) -> Result<Vec<Model>> {
    (0..count as u64).map(|i| random_model(b, i)).collect()
}

/// Restricted-growth strings of length `n`: every set partition exactly once.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .iter()
            .flat_map(|a: &Vec<usize>| {
                let next = a.iter().max().map_or(0, |m| m + 1);
                (0..=next).map(move |blk| {
                    let mut a = a.clone();
                    a.push(blk);
                    a
                })
            })
            .collect();
    }
    out
}

/// Injective maps from `k` items into `0..n`, in lexicographic order.
fn injections(k: usize, n: usize) -> Vec<Vec<StateId>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .iter()
            .flat_map(|a: &Vec<StateId>| {
                (0..n).filter(|t| !a.contains(t)).map(move |t| {
                    let mut a = a.clone();
                    a.push(t);
                    a
                })
            })
            .collect();
    }
    out
}

/// Every valid one-agent model with exactly `max_states` states, `max_actions`
/// declared actions and a single proposition `p`, in a fixed order.
pub fn exhaustive_models(b: &EnumBounds) -> Result<Vec<Model>> {
    b.check()?;
    if b.max_agents != 1 || b.max_states > 2 || b.max_actions > 2 {
        return Err(Error::Budget(
            "exhaustive generation covers at most 2 states, 1 agent and 2 actions".into(),
        ));
    }
    let (n, na) = (b.max_states, b.max_actions);
    let subsets: Vec<Vec<ActionId>> = (1u32..(1 << na))
        .map(|mask| (0..na).filter(|&a| mask & (1 << a) != 0).collect())
        .collect();
    let mut out = Vec::new();
    for assign in partitions(n) {
        let used = assign.iter().max().map_or(0, |m| m + 1);
        let mut avails: Vec<Vec<Vec<ActionId>>> = vec![Vec::new()];
        for _ in 0..used {
            avails = avails
                .iter()
                .flat_map(|a| {
                    subsets.iter().map(move |s| {
                        let mut a = a.clone();
                        a.push(s.clone());
                        a
                    })
                })
                .collect();
        }
        for block_avail in &avails {
            let avail: Vec<Vec<ActionId>> = assign.iter().map(|&blk| block_avail[blk].clone()).collect();
            let mut transs: Vec<BTreeMap<(StateId, Vec<ActionId>), StateId>> = vec![BTreeMap::new()];
            for (q, acts) in avail.iter().enumerate() {
                transs = transs
                    .iter()
                    .flat_map(|t| {
                        injections(acts.len(), n).into_iter().map(move |targets| {
                            let mut t = t.clone();
                            for (&a, r) in acts.iter().zip(targets) {
                                t.insert((q, vec![a]), r);
                            }
                            t
                        })
                    })
                    .collect();
            }
            for trans in transs {
                for label_mask in 0u32..(1 << n) {
                    let parts = ModelParts {
                        num_agents: 1,
                        states: names("q", n),
                        actions: action_names(na),
                        props: prop_names(1),
                        labels: (0..n)
                            .map(|q| if label_mask & (1 << q) != 0 { vec![0] } else { vec![] })
                            .collect(),
                        avail: vec![avail.clone()],
                        trans: trans.clone(),
                        indist: vec![blocks_of(&assign)],
                    };
                    let m = Model::from_parts(parts)?;
                    if validate_model(&m).is_empty() {
                        out.push(m);
                    }
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrategyKind {
    Positional,
    /// Explicit choices on histories up to `depth` steps below `root`.
    Tree { root: History, depth: usize },
}

/// Every positional strategy of `c`, first state and member varying fastest.
pub fn positional_strategies(m: &Model, c: &Coalition) -> Result<Vec<PositionalStrategy>> {
    let mut rows: Vec<Vec<Vec<ActionId>>> = vec![Vec::new()];
    for q in 0..m.num_states() {
        let mut here = vec![Vec::new()];
        for &i in c.members() {
            here = here
                .iter()
                .flat_map(|p: &Vec<ActionId>| {
                    m.avail(i, q).iter().map(move |&a| {
                        let mut p = p.clone();
                        p.push(a);
                        p
                    })
                })
                .collect();
        }
        if rows.len() * here.len() > MAX_STRATEGIES {
            return Err(Error::Budget(format!("more than {MAX_STRATEGIES} positional strategies")));
        }
        rows = here
            .iter()
            .flat_map(|choice| {
                rows.iter().map(move |r| {
                    let mut r = r.clone();
                    r.push(choice.clone());
                    r
                })
            })
            .collect();
    }
    rows.into_iter()
        .map(|table| PositionalStrategy::new(m, c.clone(), table))
        .collect()
}

fn tree_tables(
    m: &Model,
    c: &Coalition,
    g: Vec<StateId>,
    remaining: usize,
) -> Result<Vec<BTreeMap<Vec<StateId>, Vec<ActionId>>>> {
    let q = *g.last().unwrap();
    let mut choices = vec![Vec::new()];
    for &i in c.members() {
        choices = choices
            .iter()
            .flat_map(|p: &Vec<ActionId>| {
                m.avail(i, q).iter().map(move |&a| {
                    let mut p = p.clone();
                    p.push(a);
                    p
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for acts in choices {
        let mut partial = vec![BTreeMap::from([(g.clone(), acts.clone())])];
        if remaining > 0 {
            for r in m.out_set(q, c, &acts)?.iter() {
                let mut child = g.clone();
                child.push(r);
                let subs = tree_tables(m, c, child, remaining - 1)?;
                if partial.len() * subs.len() > MAX_STRATEGIES {
                    return Err(Error::Budget(format!("more than {MAX_STRATEGIES} tree strategies")));
                }
                partial = partial
                    .iter()
                    .flat_map(|t| {
                        subs.iter().map(move |s| {
                            let mut t = t.clone();
                            t.extend(s.iter().map(|(k, v)| (k.clone(), v.clone())));
                            t
                        })
                    })
                    .collect();
            }
        }
        out.extend(partial);
        if out.len() > MAX_STRATEGIES {
            return Err(Error::Budget(format!("more than {MAX_STRATEGIES} tree strategies")));
        }
    }
    Ok(out)
}

/// Every tree strategy of `c` below `root`, choosing only on histories the
/// coalition's own choices leave reachable. Elsewhere the first available action is played.
pub fn tree_strategies(m: &Model, c: &Coalition, root: &History, depth: usize) -> Result<Vec<TreeStrategy>> {
    let fallback = PositionalStrategy::first_available(m, c.clone());
    tree_tables(m, c, root.states().to_vec(), depth)?
        .into_iter()
        .map(|table| TreeStrategy::new(m, root.clone(), depth, table, fallback.clone()))
        .collect()
}

/// Boxed strategies of either kind.
pub fn enumerate_strategies(m: &Model, c: &Coalition, kind: &StrategyKind) -> Result<Vec<Box<dyn Strategy>>> {
    Ok(match kind {
        StrategyKind::Positional => positional_strategies(m, c)?
            .into_iter()
            .map(|s| Box::new(s) as Box<dyn Strategy>)
            .collect(),
        StrategyKind::Tree { root, depth } => tree_strategies(m, c, root, *depth)?
            .into_iter()
            .map(|s| Box::new(s) as Box<dyn Strategy>)
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{m1, m2};
    use std::collections::HashSet;

    #[test]
    fn strategy_counts() {
        assert_eq!(positional_strategies(&m1(), &Coalition::singleton(0)).unwrap().len(), 2);
        assert_eq!(positional_strategies(&m2(), &Coalition::singleton(0)).unwrap().len(), 4);
        assert_eq!(positional_strategies(&m2(), &Coalition::all(2)).unwrap().len(), 4);
        let m = m1();
        let trees = tree_strategies(&m, &Coalition::singleton(0), &History::initial(0), 1).unwrap();
        assert_eq!(trees.len(), 3);
        let distinct: HashSet<_> = trees.iter().collect();
        assert_eq!(distinct.len(), 3);
    }

    #[test]
    fn exhaustive_count() {
        let b = EnumBounds {
            max_states: 2,
            max_agents: 1,
            max_actions: 2,
            ..EnumBounds::default()
        };
        let all = exhaustive_models(&b).unwrap();
        assert_eq!(all.len(), 192);
        let distinct: HashSet<String> = all.iter().map(crate::model::write_model).collect();
        assert_eq!(distinct.len(), 192);
    }

    #[test]
    fn random_models_are_valid_and_deterministic() {
        let b = EnumBounds::with_seed(7);
        let first = enumerate_models(&b, 20).unwrap();
        let again = enumerate_models(&b, 20).unwrap();
        assert_eq!(first, again);
        for m in &first {
            assert!(validate_model(m).is_empty());
            assert!(m.num_states() <= 3 && m.num_agents() <= 2 && m.num_actions() <= 2);
        }
        assert_eq!(random_model(&b, 5).unwrap(), first[5]);
    }

    #[test]
    fn zero_bounds_rejected() {
        let b = EnumBounds {
            max_states: 0,
            ..EnumBounds::default()
        };
        assert!(random_model(&b, 0).is_err());
        assert!(exhaustive_models(&b).is_err());
    }
}
