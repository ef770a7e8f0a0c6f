//! Formulas and rule-based strategies: AST, parser, printer, fragment classification.

mod parser;
mod printer;

use std::collections::BTreeMap;

use crate::model::{AgentId, Coalition};

pub use parser::{parse_formula, parse_rules};

/// A coalition action type `act{1:a,2:b}`; the listed agents form the coalition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionAtom(pub BTreeMap<AgentId, String>);

impl ActionAtom {
    pub fn new<S: Into<String>>(bindings: impl IntoIterator<Item = (AgentId, S)>) -> Self {
        ActionAtom(bindings.into_iter().map(|(i, a)| (i, a.into())).collect())
    }

    pub fn coalition(&self) -> Coalition {
        Coalition::new(self.0.keys().copied())
    }
}

/// Formulas of the strategic STIT language with knowledge.
///
/// Derived connectives are desugared on construction; `Top` is the constant
/// `true` (there is no separate bottom, it is `~true`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Prop(String),
    Act(ActionAtom),
    And(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Next(Box<Formula>),
    Globally(Box<Formula>),
    Nec(Box<Formula>),
    Sstit(Coalition, Box<Formula>),
    Knows(AgentId, Box<Formula>),
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Self {
        Formula::Prop(name.into())
    }

    pub fn act<S: Into<String>>(bindings: impl IntoIterator<Item = (AgentId, S)>) -> Self {
        Formula::Act(ActionAtom::new(bindings))
    }

    pub fn bottom() -> Self {
        Formula::not(Formula::Top)
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Self {
        Formula::Not(Box::new(a))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn next(a: Formula) -> Self {
        Formula::Next(Box::new(a))
    }

    pub fn globally(a: Formula) -> Self {
        Formula::Globally(Box::new(a))
    }

    pub fn eventually(a: Formula) -> Self {
        Formula::not(Formula::globally(Formula::not(a)))
    }

    pub fn nec(a: Formula) -> Self {
        Formula::Nec(Box::new(a))
    }

    pub fn pos(a: Formula) -> Self {
        Formula::not(Formula::nec(Formula::not(a)))
    }

    pub fn sstit(c: Coalition, a: Formula) -> Self {
        Formula::Sstit(c, Box::new(a))
    }

    pub fn knows(i: AgentId, a: Formula) -> Self {
        Formula::Knows(i, Box::new(a))
    }

    /// Left-nested conjunction; `Top` when empty.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Left-nested disjunction; `~true` when empty.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or_else(Formula::bottom)
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Top | Formula::Prop(_) | Formula::Act(_) => vec![],
            Formula::And(a, b) => vec![a, b],
            Formula::Not(a)
            | Formula::Next(a)
            | Formula::Globally(a)
            | Formula::Nec(a)
            | Formula::Sstit(_, a)
            | Formula::Knows(_, a) => vec![a],
        }
    }

    /// Every subformula, including `self`, in pre-order.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let f = out[i];
            out.extend(f.children());
            i += 1;
        }
        out
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Maximal nesting of `X`.
    pub fn next_depth(&self) -> usize {
        let inner = self.children().iter().map(|c| c.next_depth()).max().unwrap_or(0);
        match self {
            Formula::Next(_) => inner + 1,
            _ => inner,
        }
    }

    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Top | Formula::Prop(_) => true,
            Formula::And(a, b) => a.is_propositional() && b.is_propositional(),
            Formula::Not(a) => a.is_propositional(),
            _ => false,
        }
    }

    /// Agents that occur as the index of a `K` operator.
    pub fn knowledge_agents(&self) -> Vec<AgentId> {
        let mut v: Vec<_> = self
            .subformulas()
            .into_iter()
            .filter_map(|f| match f {
                Formula::Knows(i, _) => Some(*i),
                _ => None,
            })
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn as_action_atom(&self) -> Option<&ActionAtom> {
        match self {
            Formula::Act(a) => Some(a),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FragmentTag {
    /// Built from propositions with `~` and `&` only.
    Propositional,
    /// Boolean combinations of propositions and `K{i} c` with propositional `c`.
    FlatKnowledge,
    General,
}

fn is_flat_knowledge(f: &Formula) -> bool {
    match f {
        Formula::Top | Formula::Prop(_) => true,
        Formula::And(a, b) => is_flat_knowledge(a) && is_flat_knowledge(b),
        Formula::Not(a) => is_flat_knowledge(a),
        Formula::Knows(_, a) => a.is_propositional(),
        _ => false,
    }
}

pub fn classify_condition_fragment(f: &Formula) -> FragmentTag {
    if f.is_propositional() {
        FragmentTag::Propositional
    } else if is_flat_knowledge(f) {
        FragmentTag::FlatKnowledge
    } else {
        FragmentTag::General
    }
}

/// Sound, incomplete test for moment-determinacy: boolean combinations of
/// propositions, `K{i} _` and `box _`.
pub fn is_moment_determinate_syntactic(f: &Formula) -> bool {
    match f {
        Formula::Top | Formula::Prop(_) | Formula::Knows(..) | Formula::Nec(_) => true,
        Formula::And(a, b) => is_moment_determinate_syntactic(a) && is_moment_determinate_syntactic(b),
        Formula::Not(a) => is_moment_determinate_syntactic(a),
        _ => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub condition: Formula,
    pub effect: Formula,
}

/// A finite ordered list of condition-effect rules for a coalition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RuleStrategy {
    pub coalition: Coalition,
    pub rules: Vec<Rule>,
}

impl RuleStrategy {
    pub fn new(coalition: Coalition, rules: Vec<(Formula, Formula)>) -> Self {
        RuleStrategy {
            coalition,
            rules: rules
                .into_iter()
                .map(|(condition, effect)| Rule { condition, effect })
                .collect(),
        }
    }

    pub fn conditions(&self) -> impl Iterator<Item = &Formula> {
        self.rules.iter().map(|r| &r.condition)
    }

    pub fn effects(&self) -> impl Iterator<Item = &Formula> {
        self.rules.iter().map(|r| &r.effect)
    }

    /// The coarsest fragment containing every condition.
    pub fn condition_fragment(&self) -> FragmentTag {
        self.conditions()
            .map(classify_condition_fragment)
            .max()
            .unwrap_or(FragmentTag::Propositional)
    }

    /// Conditions in the proposition-action shape: propositional, with action-atom effects.
    pub fn is_proposition_action(&self) -> bool {
        self.rules
            .iter()
            .all(|r| r.condition.is_propositional() && r.effect.as_action_atom().is_some())
    }

    /// `[C sstit] /\ (c_n -> [C sstit] e_n)`
    pub fn acc_formula(&self) -> Formula {
        let c = &self.coalition;
        Formula::sstit(
            c.clone(),
            Formula::conj(self.rules.iter().map(|r| {
                Formula::implies(r.condition.clone(), Formula::sstit(c.clone(), r.effect.clone()))
            })),
        )
    }

    /// `[C sstit] G [C acc] RS`
    pub fn perf_formula(&self) -> Formula {
        Formula::sstit(self.coalition.clone(), Formula::globally(self.acc_formula()))
    }

    /// `box G \/ c_n`: some condition fires on every continuation.
    pub fn completeness_formula(&self) -> Formula {
        Formula::nec(Formula::globally(Formula::disj(self.conditions().cloned())))
    }

    /// Conditions `K{i} c` with propositional `c` for a single agent, action-atom effects.
    pub fn is_knowledge_action(&self, agent: AgentId) -> bool {
        self.rules.iter().all(|r| {
            matches!(&r.condition, Formula::Knows(i, c) if *i == agent && c.is_propositional())
                && r.effect.as_action_atom().is_some()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn fragment_examples() {
        assert_eq!(classify_condition_fragment(&f("~p & q")), FragmentTag::Propositional);
        assert_eq!(classify_condition_fragment(&f("K{1} (p & ~q)")), FragmentTag::FlatKnowledge);
        assert_eq!(classify_condition_fragment(&f("X p")), FragmentTag::General);
        assert_eq!(classify_condition_fragment(&f("K{1} K{1} p")), FragmentTag::General);
        assert_eq!(classify_condition_fragment(&f("~K{2} p & q")), FragmentTag::FlatKnowledge);
    }

    #[test]
    fn moment_determinate_examples() {
        assert!(is_moment_determinate_syntactic(&f("K{1} p & ~box q")));
        assert!(!is_moment_determinate_syntactic(&f("act{1:a}")));
        assert!(!is_moment_determinate_syntactic(&f("X p")));
        assert!(is_moment_determinate_syntactic(&f("box X p")));
    }

    #[test]
    fn rule_shapes() {
        let rs = parse_rules("strategy for {1}: ~p => act{1:b}; p => act{1:a}").unwrap();
        assert!(rs.is_proposition_action());
        assert!(!rs.is_knowledge_action(0));
        let ks = parse_rules("strategy for {1}: K{1} (p|~p) => act{1:a}").unwrap();
        assert!(ks.is_knowledge_action(0));
        assert_eq!(ks.condition_fragment(), FragmentTag::FlatKnowledge);
    }

    #[test]
    fn sugar_constructors() {
        assert_eq!(Formula::conj([]), Formula::Top);
        assert_eq!(Formula::disj([]), Formula::bottom());
        assert_eq!(f("F p"), Formula::eventually(Formula::prop("p")));
        assert_eq!(f("dia p"), Formula::pos(Formula::prop("p")));
        assert_eq!(f("X X p & X p").next_depth(), 2);
    }
}
