//! Formula evaluation at ⟨position, play, profile⟩ points.
//!
//! Two modes. [`eval_exact`] works on positional profiles and quantifies over
//! positional profiles; it decides `G` by detecting when the evaluation key repeats.
//! [`eval_bounded`] works on history-indexed profiles up to a horizon and may answer
//! [`Verdict::Unknown`].

mod bounded;
mod compile;
mod exact;
mod perform;

use std::fmt;

pub use bounded::{eval_bounded, eval_bounded_with, BoundedOptions};
pub use compile::check_exact_fragment;
pub use exact::{ExactEvaluator, ProfileSpace};
pub use perform::{eval_acc, eval_perf, RuleEvaluator};

use crate::bitset::StateSet;
use crate::epistemic::knowledge_sets;
use crate::error::{Error, Result};
use crate::model::{History, Model, StateId};
use crate::strategy::{Profile, Strategy};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    True,
    False,
    Unknown(String),
}

impl std::ops::Not for Verdict {
    type Output = Verdict;

    fn not(self) -> Verdict {
        match self {
            Verdict::True => Verdict::False,
            Verdict::False => Verdict::True,
            u => u,
        }
    }
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Verdict::True => Some(true),
            Verdict::False => Some(false),
            Verdict::Unknown(_) => None,
        }
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }

    /// Kleene conjunction: a false operand wins over an unknown one.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
            (Verdict::Unknown(r), _) | (_, Verdict::Unknown(r)) => Verdict::Unknown(r),
            _ => Verdict::True,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::True => f.write_str("true"),
            Verdict::False => f.write_str("false"),
            Verdict::Unknown(r) => write!(f, "unknown ({r})"),
        }
    }
}

/// A point of evaluation: the current history, the profile being played and
/// every agent's knowledge set at the end of the history.
#[derive(Clone, Debug)]
pub struct EvalPoint<'m> {
    pub model: &'m Model,
    pub history: History,
    pub profile: Profile,
    pub knowledge: Vec<StateSet>,
    /// Whether the profile generates the history from its first state.
    pub past_consistent: bool,
}

/// Whether following `s` from `history[0]` produces exactly `history`.
pub fn generates(m: &Model, s: &dyn Strategy, history: &[StateId]) -> bool {
    (1..history.len()).all(|j| {
        s.action(m, &history[..j])
            .and_then(|acts| m.out(history[j - 1], &acts))
            == Some(history[j])
    })
}

impl<'m> EvalPoint<'m> {
    pub fn new(model: &'m Model, history: History, profile: Profile) -> EvalPoint<'m> {
        let knowledge = knowledge_sets(model, &history);
        let past_consistent = generates(model, profile.as_strategy(), history.states());
        EvalPoint {
            model,
            history,
            profile,
            knowledge,
            past_consistent,
        }
    }

    /// Like [`EvalPoint::new`] but rejects histories the profile does not generate.
    pub fn consistent(model: &'m Model, history: History, profile: Profile) -> Result<EvalPoint<'m>> {
        let pt = EvalPoint::new(model, history, profile);
        if !pt.past_consistent {
            return Err(Error::InvalidHistory(format!(
                "{} is not generated by the profile",
                pt.history.display(model)
            )));
        }
        Ok(pt)
    }

    pub fn position(&self) -> usize {
        self.history.position()
    }

    pub fn state(&self) -> StateId {
        self.history.last()
    }
}

/// Exact evaluation under positional-quantifier semantics.
pub fn eval_exact(pt: &EvalPoint<'_>, f: &crate::syntax::Formula) -> Result<bool> {
    let mut ev = ExactEvaluator::new(pt.model, f)?;
    ev.eval_point(pt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{m1, m2};
    use crate::strategy::parse_positional;
    use crate::syntax::parse_formula;

    fn point<'m>(m: &'m Model, hist: &str, prof: &str) -> EvalPoint<'m> {
        let s = parse_positional(m, prof).unwrap();
        EvalPoint::new(m, History::parse(m, hist).unwrap(), Profile::positional(m, s).unwrap())
    }

    fn exact(pt: &EvalPoint<'_>, f: &str) -> bool {
        eval_exact(pt, &parse_formula(f).unwrap()).unwrap()
    }

    #[test]
    fn m1_temporal_examples() {
        let m = m1();
        let pt = point(&m, "q0", "positional for {1}: q0 -> b; q1 -> a");
        assert!(exact(&pt, "X p"));
        assert!(!exact(&pt, "G p"));
        assert!(exact(&pt, "X G p"));
        assert!(exact(&pt, "F p"));
        assert!(exact(&pt, "act{1:b}"));
        assert!(exact(&pt, "dia act{1:a}"));
        assert!(!exact(&pt, "box X p"));
        let pt = point(&m, "q0", "positional for {1}: q0 -> a; q1 -> a");
        assert!(exact(&pt, "G ~p"));
        assert!(exact(&pt, "[sstit {1}] G ~p"));
    }

    #[test]
    fn m2_knowledge_examples() {
        let m = m2();
        let pt = point(&m, "q0", "positional for {1,2}: q0 -> a,c; q1 -> a,c");
        assert!(!exact(&pt, "K{1} p"));
        assert!(exact(&pt, "K{2} ~p"));
        assert!(exact(&pt, "dia act{1:a}"));
        assert!(exact(&pt, "K{1} (p | ~p)"));
        assert!(!exact(&pt, "K{1} act{1:a}"));
        assert!(exact(&pt, "act{1:a}"));
        assert!(!exact(&pt, "K{1} X ~p"));
    }

    #[test]
    fn past_consistency_flag() {
        let m = m1();
        assert!(point(&m, "q0,q1", "positional for {1}: q0 -> b; q1 -> a").past_consistent);
        let pt = point(&m, "q0,q1", "positional for {1}: q0 -> a; q1 -> a");
        assert!(!pt.past_consistent);
        assert!(EvalPoint::consistent(&m, pt.history.clone(), pt.profile.clone()).is_err());
    }

    #[test]
    fn kleene() {
        let u = || Verdict::Unknown("x".into());
        assert_eq!(Verdict::False.and(u()), Verdict::False);
        assert_eq!(u().and(Verdict::True), u());
        assert_eq!(!u(), u());
    }
}
