#![allow(dead_code)]

use proptest::prelude::*;

use sstit_core::oracle::{positional_strategies, random_model};
use sstit_core::{Coalition, EnumBounds, Formula, Model, PositionalStrategy};

/// A random valid model from the small oracle bounds.
pub fn small_model() -> impl Strategy<Value = Model> {
    (0u64..1 << 16, 0u64..64).prop_map(|(seed, k)| random_model(&EnumBounds::with_seed(seed), k).unwrap())
}

/// A random valid model from the harness bounds.
pub fn harness_model() -> impl Strategy<Value = Model> {
    (0u64..1 << 16, 0u64..64).prop_map(|(seed, k)| random_model(&EnumBounds::harness(seed), k).unwrap())
}

/// The `pick`-th positional strategy of `c`, wrapping around.
pub fn nth_positional(m: &Model, c: &Coalition, pick: usize) -> PositionalStrategy {
    let all = positional_strategies(m, c).unwrap();
    all[pick % all.len()].clone()
}

/// A coalition over `m`'s agents, chosen by `mask`; never empty.
pub fn coalition(m: &Model, mask: u32) -> Coalition {
    let k = m.num_agents();
    let mask = (mask % ((1 << k) - 1)) + 1;
    Coalition::new((0..k).filter(|&i| mask & (1 << i) != 0))
}

/// Formulas over `p`, actions `a`, `b` and the first `agents` agents (one or two).
pub fn formula(agents: usize, depth: u32) -> impl Strategy<Value = Formula> {
    let last = agents - 1;
    let leaf = prop_oneof![
        Just(Formula::Top),
        Just(Formula::prop("p")),
        Just(Formula::act([(0, "a")])),
        Just(Formula::act([(last, "b")])),
        Just(Formula::act([(0, "b"), (last, "a")])),
    ];
    leaf.prop_recursive(depth, 64, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            inner.clone().prop_map(Formula::next),
            inner.clone().prop_map(Formula::globally),
            inner.clone().prop_map(Formula::nec),
            (inner.clone(), 0..=agents).prop_map(move |(a, c)| {
                let c = if c == agents { Coalition::all(agents) } else { Coalition::singleton(c) };
                Formula::sstit(c, a)
            }),
            (inner, 0..agents).prop_map(|(a, i)| Formula::knows(i, a)),
        ]
    })
}

/// Propositional formulas over the first proposition of every random model.
pub fn propositional(depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![Just(Formula::Top), Just(Formula::prop("p"))];
    leaf.prop_recursive(depth, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::and(a, b)),
        ]
    })
}
