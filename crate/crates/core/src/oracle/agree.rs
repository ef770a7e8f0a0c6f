//! Cross-checking the exact evaluator against the oracle.

use crate::epistemic::knowledge_sets;
use crate::error::Result;
use crate::eval::{ExactEvaluator, Verdict};
use crate::model::{History, Model};
use crate::syntax::Formula;

use super::{oracle_eval, positional_strategies};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disagreement {
    pub formula: String,
    pub history: String,
    pub profile: String,
    pub exact: bool,
    pub oracle: Verdict,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Agreement {
    pub checked: usize,
    pub decisive: usize,
    pub disagreements: Vec<Disagreement>,
}

/// All histories with at most `depth` transitions, shortest first.
pub fn histories_up_to(m: &Model, depth: usize) -> Vec<History> {
    let mut layer: Vec<History> = (0..m.num_states()).map(History::initial).collect();
    let mut out = layer.clone();
    for _ in 0..depth {
        layer = layer
            .iter()
            .flat_map(|h| m.successors(h.last()).iter().map(move |q| h.extended(q)))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Compares both evaluators on every formula, positional profile and history
/// of at most `history_depth` steps, giving the oracle `depth` steps of lookahead.
pub fn check_agreement(
    m: &Model,
    formulas: &[Formula],
    history_depth: usize,
    depth: usize,
) -> Result<Agreement> {
    let all = crate::model::Coalition::all(m.num_agents());
    let profiles = positional_strategies(m, &all)?;
    let histories = histories_up_to(m, history_depth);
    let mut report = Agreement::default();
    for f in formulas {
        let mut exact = ExactEvaluator::new(m, f)?;
        for s in &profiles {
            for h in &histories {
                let want = exact.eval_at(h.last(), &knowledge_sets(m, h), s);
                let got = oracle_eval(m, h, s, f, depth)?;
                report.checked += 1;
                if let Some(b) = got.as_bool() {
                    report.decisive += 1;
                    if b != want {
                        report.disagreements.push(Disagreement {
                            formula: f.to_string(),
                            history: h.display(m),
                            profile: crate::strategy::write_positional(m, s).trim_end().to_string(),
                            exact: want,
                            oracle: got,
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}
