//! Formula corpora for cross-checking the evaluators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eval::check_exact_fragment;
use crate::model::{Coalition, Model};
use crate::syntax::{parse_formula, Formula};

/// Shapes that exercise every clause and their interplay. `$a` is the first
/// action, `$b` the last one.
const TEMPLATES: &[&str] = &[
    "p",
    "~p",
    "X p",
    "G p",
    "F p",
    "X X p",
    "G ~p",
    "X G p",
    "G X p",
    "box p",
    "box X p",
    "dia X p",
    "X box p",
    "box X p -> X box p",
    "[sstit {1}] X p",
    "X [sstit {1}] p",
    "[sstit {1}] X [sstit {1}] p",
    "[sstit {1}] G p",
    "[sstit {1}] G [sstit {1}] p",
    "dia [sstit {1}] X p",
    "act{1:$a}",
    "dia act{1:$a}",
    "box act{1:$a}",
    "act{1:$a} -> X p",
    "box (act{1:$a} -> X p)",
    "[sstit {1}] act{1:$b}",
    "X act{1:$a}",
    "K{1} p",
    "K{1} ~p",
    "K{1} X p",
    "K{1} dia X p",
    "K{1} act{1:$a}",
    "X K{1} p",
    "G K{1} (p | ~p)",
    "K{1} box X p",
    "~K{1} ~X p",
    "K{1} K{1} X p",
    "[sstit {2}] X p",
    "[sstit {1,2}] X p",
    "[sstit {2}] X [sstit {1}] p",
    "dia [sstit {1}] X p & dia [sstit {2}] X q",
    "K{2} X q",
    "K{1} p & K{2} q",
    "act{1:$a, 2:$b}",
    "dia act{2:$b}",
    "[sstit {1}] (p -> X q)",
    "G (p -> X p)",
    "F [sstit {1}] q",
];

fn instantiate(m: &Model, template: &str) -> Option<Formula> {
    let a = m.action_name(0);
    let b = m.action_name(m.num_actions() - 1);
    let text = template.replace("$a", a).replace("$b", b);
    let f = parse_formula(&text).ok()?;
    // Drop shapes that mention agents the model lacks.
    let max_agent = f.subformulas().into_iter().filter_map(|g| match g {
        Formula::Act(x) => x.0.keys().max().copied(),
        Formula::Sstit(c, _) => c.members().iter().max().copied(),
        Formula::Knows(i, _) => Some(*i),
        _ => None,
    });
    if max_agent.max().is_some_and(|i| i >= m.num_agents()) {
        return None;
    }
    Some(f)
}

fn random_formula(m: &Model, rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    let k = m.num_agents();
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => Formula::Top,
            1 | 2 => Formula::prop(m.prop_name(rng.gen_range(0..m.num_props())).to_string()),
            _ => {
                let i = rng.gen_range(0..k);
                let a = m.action_name(rng.gen_range(0..m.num_actions())).to_string();
                Formula::act([(i, a)])
            }
        };
    }
    let sub = |rng: &mut ChaCha8Rng| random_formula(m, rng, depth - 1);
    match rng.gen_range(0..10) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::implies(sub(rng), sub(rng)),
        3 => Formula::next(sub(rng)),
        4 => Formula::globally(sub(rng)),
        5 => Formula::eventually(sub(rng)),
        6 => Formula::nec(sub(rng)),
        7 => Formula::pos(sub(rng)),
        8 => {
            let mask = rng.gen_range(1..(1u32 << k));
            let c = Coalition::new((0..k).filter(|&i| mask & (1 << i) != 0));
            Formula::sstit(c, sub(rng))
        }
        _ => Formula::knows(rng.gen_range(0..k), sub(rng)),
    }
}

/// The fixed shapes that fit `m`, followed by `extra` seeded random formulas of
/// depth at most 3. Everything returned lies in the exact fragment.
pub fn formula_corpus(m: &Model, seed: u64, extra: usize) -> Vec<Formula> {
    let mut out: Vec<Formula> = TEMPLATES.iter().filter_map(|t| instantiate(m, t)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tries = 0;
    let target = out.len() + extra;
    while out.len() < target && tries < extra * 50 {
        tries += 1;
        let f = random_formula(m, &mut rng, 3);
        if check_exact_fragment(&f).is_ok() && !out.contains(&f) {
            out.push(f);
        }
    }
    out
}
