//! Acting according to and performing rule-based strategies.

use super::compile::bind_action_atom;
use super::{EvalPoint, ExactEvaluator};
use crate::bitset::StateSet;
use crate::error::{Error, Result};
use crate::model::{ActionId, AgentId, Model, StateId};
use crate::strategy::{reachable_configs, Profile, Restricted, Strategy};
use crate::syntax::{is_moment_determinate_syntactic, RuleStrategy};

/// Evaluates `[C acc]` and `[C perf]` for one rule set without going through
/// the nested quantifiers, as long as every effect is an action atom.
pub struct RuleEvaluator<'m> {
    m: &'m Model,
    rs: RuleStrategy,
    conditions: Vec<ExactEvaluator<'m>>,
    atoms: Vec<Option<Vec<(AgentId, ActionId)>>>,
    generic: Option<ExactEvaluator<'m>>,
}

impl<'m> RuleEvaluator<'m> {
    pub fn new(m: &'m Model, rs: &RuleStrategy) -> Result<RuleEvaluator<'m>> {
        if let Some(c) = rs.conditions().find(|c| !is_moment_determinate_syntactic(c)) {
            return Err(Error::UnsupportedRules(format!("condition `{c}` is not moment-determinate")));
        }
        let conditions = rs
            .conditions()
            .map(|c| ExactEvaluator::new(m, c))
            .collect::<Result<Vec<_>>>()?;
        let atoms = rs
            .effects()
            .map(|e| e.as_action_atom().map(|a| bind_action_atom(m, a)).transpose())
            .collect::<Result<Vec<_>>>()?;
        let generic = if atoms.iter().all(Option::is_some) {
            None
        } else {
            Some(ExactEvaluator::new(m, &rs.acc_formula())?)
        };
        Ok(RuleEvaluator {
            m,
            rs: rs.clone(),
            conditions,
            atoms,
            generic,
        })
    }

    pub fn rules(&self) -> &RuleStrategy {
        &self.rs
    }

    pub fn all_effects_atomic(&self) -> bool {
        self.generic.is_none()
    }

    /// Indices of the rules whose condition holds at a history ending in `q`
    /// with knowledge sets `ks`.
    pub fn triggered(&mut self, q: StateId, ks: &[StateSet]) -> Vec<usize> {
        (0..self.conditions.len())
            .filter(|&n| self.conditions[n].eval_code(q, ks, 0))
            .collect()
    }

    /// Whether choosing `acts` (one per coalition member) at `q` forces the effect of rule `n`.
    /// `None` when the effect is not an action atom.
    pub fn forces(&self, q: StateId, n: usize, acts: &[ActionId]) -> Option<bool> {
        let binding = self.atoms[n].as_ref()?;
        Some(binding.iter().all(|&(i, a)| match self.rs.coalition.position(i) {
            Some(pos) => acts[pos] == a,
            None => self.m.avail(i, q) == [a],
        }))
    }

    /// `[C acc] RS` at a history with knowledge sets `ks`, played under `profile`.
    pub fn acc_at(&mut self, history: &[StateId], ks: &[StateSet], profile: &Profile) -> Result<bool> {
        let q = *history.last().expect("nonempty history");
        if let Some(generic) = self.generic.as_mut() {
            let s = profile.as_positional().ok_or_else(|| {
                Error::Representation("non-atomic effects need a positional profile".into())
            })?;
            return Ok(generic.eval_at(q, ks, s));
        }
        let own = Restricted::new(profile.as_strategy(), &self.rs.coalition)?;
        let acts = own
            .action(self.m, history)
            .ok_or_else(|| Error::Representation("profile undefined at history".into()))?;
        let fired = self.triggered(q, ks);
        Ok(fired
            .into_iter()
            .all(|n| self.forces(q, n, &acts).expect("atomic effect")))
    }

    pub fn acc(&mut self, pt: &EvalPoint<'_>) -> Result<bool> {
        self.acc_at(pt.history.states(), &pt.knowledge, &pt.profile)
    }

    /// `[C perf] RS`: acting accordingly at every configuration the coalition's
    /// part of the profile can reach.
    pub fn perf(&mut self, pt: &EvalPoint<'_>) -> Result<bool> {
        let own = Restricted::new(pt.profile.as_strategy(), &self.rs.coalition)?;
        let configs = reachable_configs(self.m, &pt.history, &own, pt.profile.memory())?;
        for c in configs {
            if !self.acc_at(&c.history, &c.ks, &pt.profile)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn eval_acc(pt: &EvalPoint<'_>, rs: &RuleStrategy) -> Result<bool> {
    RuleEvaluator::new(pt.model, rs)?.acc(pt)
}

pub fn eval_perf(pt: &EvalPoint<'_>, rs: &RuleStrategy) -> Result<bool> {
    RuleEvaluator::new(pt.model, rs)?.perf(pt)
}
