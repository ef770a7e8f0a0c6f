//! Horizon-bounded evaluation over history-indexed profiles.
//!
//! Quantifiers enumerate every way the overridden agents can act on the histories
//! their argument can look at; histories further out keep whatever the enclosing
//! profile does, since the argument never sees them.

use std::collections::HashMap;

use super::compile::{Arena, Node, NodeId};
use super::{EvalPoint, Verdict};
use crate::epistemic::{indistinguishable_histories, knowledge_sets_of};
use crate::error::Result;
use crate::model::{ActionId, History, Model, StateId};
use crate::strategy::{Strategy, TreeStrategy};
use crate::syntax::Formula;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundedOptions {
    /// Close `G` early when the play provably repeats inside the horizon.
    pub lasso: bool,
    /// Most profiles a single quantifier may enumerate before giving up.
    pub budget: u64,
}

impl Default for BoundedOptions {
    fn default() -> Self {
        BoundedOptions {
            lasso: true,
            budget: 1 << 14,
        }
    }
}

struct Overlay {
    overridden: Vec<bool>,
    table: HashMap<Vec<StateId>, Vec<ActionId>>,
}

struct Bounded<'a> {
    m: &'a Model,
    arena: Arena,
    next_depth: Vec<usize>,
    has_g: Vec<bool>,
    has_act: Vec<bool>,
    base: TreeStrategy,
    layers: Vec<Overlay>,
    end: usize,
    opts: BoundedOptions,
}

impl Bounded<'_> {
    fn action(&self, i: usize, g: &[StateId]) -> ActionId {
        for layer in self.layers.iter().rev() {
            if layer.overridden[i] {
                if let Some(acts) = layer.table.get(g) {
                    return acts[i];
                }
            }
        }
        self.base.action(self.m, g).expect("tree strategies are total")[i]
    }

    fn joint(&self, g: &[StateId]) -> Vec<ActionId> {
        (0..self.m.num_agents()).map(|i| self.action(i, g)).collect()
    }

    fn step(&self, g: &[StateId]) -> Vec<StateId> {
        let q = *g.last().unwrap();
        let next = self.m.out(q, &self.joint(g)).expect("transition defined");
        let mut out = g.to_vec();
        out.push(next);
        out
    }

    /// Whether every choice on extensions of `g` is the positional fallback.
    fn positional_from(&self, g: &[StateId]) -> bool {
        let fb = self.base.fallback();
        let base_ok = self
            .base
            .table()
            .iter()
            .filter(|(k, _)| k.starts_with(g))
            .all(|(k, acts)| acts.as_slice() == fb.at(*k.last().unwrap()));
        base_ok
            && self.layers.iter().all(|layer| {
                layer.table.iter().filter(|(k, _)| k.starts_with(g)).all(|(k, acts)| {
                    let want = fb.at(*k.last().unwrap());
                    (0..acts.len()).all(|i| !layer.overridden[i] || acts[i] == want[i])
                })
            })
    }

    fn eval(&mut self, node: NodeId, g: &[StateId]) -> Verdict {
        let q = *g.last().unwrap();
        match self.arena.nodes[node].clone() {
            Node::Top => Verdict::True,
            Node::Prop(p) => Verdict::from_bool(p.is_some_and(|p| self.m.holds(q, p))),
            Node::Act(binding) => Verdict::from_bool(binding.iter().all(|&(i, a)| self.action(i, g) == a)),
            Node::And(a, b) => match self.eval(a, g) {
                Verdict::False => Verdict::False,
                v => v.and(self.eval(b, g)),
            },
            Node::Not(a) => !self.eval(a, g),
            Node::Next(a) => {
                if g.len() >= self.end {
                    return Verdict::Unknown("next step beyond the horizon".into());
                }
                let g2 = self.step(g);
                self.eval(a, &g2)
            }
            Node::Globally(a) => self.globally(a, g),
            Node::Nec(a) => self.quantify(a, g, vec![true; self.m.num_agents()]),
            Node::Sstit(c, a) => {
                let others = (0..self.m.num_agents()).map(|i| !c.contains(i)).collect();
                self.quantify(a, g, others)
            }
            Node::Knows(i, a, ext) => {
                if let Some(ext) = ext {
                    let ks = knowledge_sets_of(self.m, g)[i];
                    return Verdict::from_bool(ks.is_subset(ext));
                }
                let h = History::new(self.m, g.to_vec()).expect("valid history");
                let mut out = Verdict::True;
                for h2 in indistinguishable_histories(self.m, &h, i) {
                    out = out.and(self.quantify(a, h2.states(), vec![true; self.m.num_agents()]));
                    if out == Verdict::False {
                        break;
                    }
                }
                out
            }
        }
    }

    fn globally(&mut self, a: NodeId, g: &[StateId]) -> Verdict {
        let mut positions: Vec<Vec<StateId>> = Vec::new();
        let mut all_true = true;
        let mut cur = g.to_vec();
        loop {
            match self.eval(a, &cur) {
                Verdict::False => return Verdict::False,
                Verdict::True => {}
                Verdict::Unknown(_) => all_true = false,
            }
            if all_true && self.opts.lasso && self.closes_lasso(&positions, &cur) {
                return Verdict::True;
            }
            positions.push(cur.clone());
            if cur.len() >= self.end {
                break;
            }
            cur = self.step(&cur);
        }
        Verdict::Unknown("G not closed within the horizon".into())
    }

    /// `cur` repeats an earlier position with the same state, knowledge and
    /// positional behaviour from there on.
    fn closes_lasso(&self, earlier: &[Vec<StateId>], cur: &[StateId]) -> bool {
        let key = |h: &[StateId]| (*h.last().unwrap(), knowledge_sets_of(self.m, h));
        let k = key(cur);
        self.positional_from(cur)
            && earlier
                .iter()
                .any(|e| key(e) == k && self.positional_from(e))
    }

    fn quantify(&mut self, a: NodeId, g: &[StateId], overridden: Vec<bool>) -> Verdict {
        let remaining = self.end - g.len();
        let reach = if self.has_g[a] {
            remaining
        } else {
            remaining.min(self.next_depth[a])
        };
        let last = if self.has_act[a] { reach } else { reach.saturating_sub(1) };
        let mut scope: Vec<Vec<StateId>> = Vec::new();
        if self.has_act[a] || reach > 0 {
            let mut layer = vec![g.to_vec()];
            for d in 0..=last {
                scope.extend(layer.iter().cloned());
                if d == last {
                    break;
                }
                layer = layer
                    .iter()
                    .flat_map(|h| {
                        self.m.successors(*h.last().unwrap()).iter().map(move |r| {
                            let mut e = h.clone();
                            e.push(r);
                            e
                        })
                    })
                    .collect();
            }
        }
        let slots: Vec<(usize, usize)> = scope
            .iter()
            .enumerate()
            .flat_map(|(n, h)| {
                let q = *h.last().unwrap();
                (0..self.m.num_agents())
                    .filter(|&i| overridden[i] && self.m.avail(i, q).len() > 1)
                    .map(move |i| (n, i))
                    .collect::<Vec<_>>()
            })
            .collect();
        let mut count: u64 = 1;
        for &(n, i) in &slots {
            let r = self.m.avail(i, *scope[n].last().unwrap()).len() as u64;
            match count.checked_mul(r).filter(|&c| c <= self.opts.budget) {
                Some(c) => count = c,
                None => return Verdict::Unknown("enumeration budget".into()),
            }
        }
        let mut digits = vec![0usize; slots.len()];
        let mut out = Verdict::True;
        loop {
            let mut table: HashMap<Vec<StateId>, Vec<ActionId>> = HashMap::new();
            for h in &scope {
                let q = *h.last().unwrap();
                let row = (0..self.m.num_agents()).map(|i| self.m.avail(i, q)[0]).collect();
                table.insert(h.clone(), row);
            }
            for (&(n, i), &d) in slots.iter().zip(&digits) {
                let q = *scope[n].last().unwrap();
                table.get_mut(&scope[n]).unwrap()[i] = self.m.avail(i, q)[d];
            }
            self.layers.push(Overlay {
                overridden: overridden.clone(),
                table,
            });
            let v = self.eval(a, g);
            self.layers.pop();
            out = out.and(v);
            if out == Verdict::False {
                return out;
            }
            let mut carried = true;
            for (k, &(n, i)) in slots.iter().enumerate() {
                let r = self.m.avail(i, *scope[n].last().unwrap()).len();
                digits[k] += 1;
                if digits[k] < r {
                    carried = false;
                    break;
                }
                digits[k] = 0;
            }
            if carried {
                return out;
            }
        }
    }
}

fn annotate(arena: &Arena) -> (Vec<usize>, Vec<bool>, Vec<bool>) {
    let n = arena.nodes.len();
    let (mut nd, mut g, mut act) = (vec![0; n], vec![false; n], vec![false; n]);
    // Children are interned before their parents.
    for id in 0..n {
        let (d, gg, aa) = match &arena.nodes[id] {
            Node::Top | Node::Prop(_) => (0, false, false),
            Node::Act(_) => (0, false, true),
            Node::And(a, b) => (nd[*a].max(nd[*b]), g[*a] || g[*b], act[*a] || act[*b]),
            Node::Not(a) | Node::Nec(a) | Node::Sstit(_, a) | Node::Knows(_, a, _) => (nd[*a], g[*a], act[*a]),
            Node::Next(a) => (nd[*a] + 1, g[*a], act[*a]),
            Node::Globally(a) => (nd[*a], true, act[*a]),
        };
        nd[id] = d;
        g[id] = gg;
        act[id] = aa;
    }
    (nd, g, act)
}

pub fn eval_bounded(pt: &EvalPoint<'_>, f: &Formula, horizon: usize) -> Result<Verdict> {
    eval_bounded_with(pt, f, horizon, BoundedOptions::default())
}

/// Bounded evaluation with `horizon` steps past the current position.
pub fn eval_bounded_with(
    pt: &EvalPoint<'_>,
    f: &Formula,
    horizon: usize,
    opts: BoundedOptions,
) -> Result<Verdict> {
    let mut arena = Arena::default();
    let root = arena.add(pt.model, f)?;
    if horizon < f.next_depth() {
        return Ok(Verdict::Unknown(format!(
            "horizon {horizon} is below the temporal depth {}",
            f.next_depth()
        )));
    }
    let (next_depth, has_g, has_act) = annotate(&arena);
    let mut ev = Bounded {
        m: pt.model,
        arena,
        next_depth,
        has_g,
        has_act,
        base: pt.profile.to_tree(&pt.history, horizon),
        layers: Vec::new(),
        end: pt.history.len() + horizon,
        opts,
    };
    Ok(ev.eval(root, pt.history.states()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::eval_exact;
    use crate::fixtures::{m1, m2};
    use crate::strategy::{parse_positional, Profile};
    use crate::syntax::parse_formula;

    fn tree_point<'m>(m: &'m Model, prof: &str, depth: usize) -> EvalPoint<'m> {
        let s = parse_positional(m, prof).unwrap();
        let h = History::initial(0);
        let t = TreeStrategy::from_positional(&s, &h, depth);
        EvalPoint::new(m, h, Profile::tree(m, t).unwrap())
    }

    fn run(pt: &EvalPoint<'_>, f: &str, h: usize, lasso: bool) -> Verdict {
        let opts = BoundedOptions {
            lasso,
            ..BoundedOptions::default()
        };
        eval_bounded_with(pt, &parse_formula(f).unwrap(), h, opts).unwrap()
    }

    #[test]
    fn horizon_examples() {
        let m = m1();
        let ba = tree_point(&m, "positional for {1}: q0 -> b; q1 -> a", 2);
        assert_eq!(run(&ba, "X p", 2, true), Verdict::True);
        assert_eq!(run(&ba, "G p", 2, true), Verdict::False);
        assert!(run(&ba, "X X X p", 2, true).is_unknown());
        let aa = tree_point(&m, "positional for {1}: q0 -> a; q1 -> a", 1);
        assert!(run(&aa, "G ~p", 1, false).is_unknown());
        assert_eq!(run(&aa, "G ~p", 1, true), Verdict::True);
        assert!(run(&aa, "G X ~p", 1, true).is_unknown());
        assert_eq!(run(&aa, "G X ~p", 2, true), Verdict::True);
    }

    #[test]
    fn quantifiers_match_exact_on_small_formulas() {
        let m = m2();
        let s = parse_positional(&m, "positional for {1,2}: q0 -> b,c; q1 -> a,c").unwrap();
        let prof = Profile::positional(&m, s).unwrap();
        for f in [
            "dia act{1:a}",
            "box X p",
            "dia X p",
            "[sstit {1}] X p",
            "[sstit {2}] X p",
            "K{1} p",
            "K{1} X p",
            "K{2} dia X p",
            "box (act{1:b} -> X p)",
            "[sstit {1}] (p | X p)",
        ] {
            let f = parse_formula(f).unwrap();
            for q in 0..2 {
                let pt = EvalPoint::new(&m, History::initial(q), prof.clone());
                let want = eval_exact(&pt, &f).unwrap();
                assert_eq!(eval_bounded(&pt, &f, 2).unwrap(), Verdict::from_bool(want), "{f} at q{q}");
            }
        }
    }

    #[test]
    fn budget_exhaustion_is_unknown() {
        let m = m2();
        let pt = tree_point(&m, "positional for {1,2}: q0 -> a,c; q1 -> a,c", 3);
        let opts = BoundedOptions {
            lasso: true,
            budget: 4,
        };
        let v = eval_bounded_with(&pt, &parse_formula("box G p").unwrap(), 3, opts).unwrap();
        assert_eq!(v, Verdict::Unknown("enumeration budget".into()));
    }
}
