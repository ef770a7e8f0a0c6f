//! Single-fault mutants of valid models, for testing `validate_model`.

use crate::model::{Diagnostic, Model, ModelParts};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Two profiles at one state lead to the same successor.
    NonUniqueLabel,
    /// Availability differs inside an indistinguishability block.
    AvailDiffers,
    EmptyAvail,
    /// A transition for a profile that is not executable.
    DanglingTransition,
    /// A state listed in two blocks.
    IllFormedPartition,
}

impl Fault {
    pub const ALL: [Fault; 5] = [
        Fault::NonUniqueLabel,
        Fault::AvailDiffers,
        Fault::EmptyAvail,
        Fault::DanglingTransition,
        Fault::IllFormedPartition,
    ];

    /// Whether `d` reports this fault.
    pub fn detected_by(self, d: &Diagnostic) -> bool {
        matches!(
            (self, d),
            (Fault::NonUniqueLabel, Diagnostic::NonUniqueLabel { .. })
                | (Fault::AvailDiffers, Diagnostic::AvailDiffers { .. })
                | (Fault::EmptyAvail, Diagnostic::EmptyAvail { .. })
                | (Fault::DanglingTransition, Diagnostic::DanglingTransition { .. })
                | (Fault::IllFormedPartition, Diagnostic::IllFormedPartition { .. })
        )
    }
}

/// `m` with `fault` injected, or `None` when the model has no place for it
/// (a fault needing two profiles at a state, say, in a model with one).
pub fn mutate(m: &Model, fault: Fault) -> Option<Model> {
    let mut p: ModelParts = m.parts().clone();
    let n = m.num_states();
    match fault {
        Fault::NonUniqueLabel => {
            let q = (0..n).find(|&q| m.action_profiles(q).len() >= 2)?;
            let profiles = m.action_profiles(q);
            let target = m.out(q, &profiles[0])?;
            p.trans.insert((q, profiles[1].clone()), target);
        }
        Fault::AvailDiffers => {
            let (i, q) = (0..m.num_agents())
                .flat_map(|i| (0..n).map(move |q| (i, q)))
                .find(|&(i, q)| m.block(i, q).len() >= 2)?;
            let acts = &mut p.avail[i][q];
            if acts.len() >= 2 {
                acts.pop();
            } else {
                let extra = (0..m.num_actions()).find(|a| !acts.contains(a))?;
                acts.push(extra);
            }
        }
        Fault::EmptyAvail => {
            p.avail[0][0].clear();
        }
        Fault::DanglingTransition => {
            let (q, prof) = (0..n).find_map(|q| {
                (0..m.num_agents()).find_map(|i| {
                    let missing = (0..m.num_actions()).find(|a| !m.avail(i, q).contains(a))?;
                    let mut prof = m.action_profiles(q).into_iter().next()?;
                    prof[i] = missing;
                    Some((q, prof))
                })
            })?;
            p.trans.insert((q, prof), q);
        }
        Fault::IllFormedPartition => {
            p.indist[0].push(vec![0]);
            if p.indist[0].iter().flatten().filter(|&&q| q == 0).count() < 2 {
                p.indist[0].push(vec![0]);
            }
        }
    }
    Model::from_parts(p).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::m2;
    use crate::model::validate_model;

    #[test]
    fn every_fault_is_diagnosed_on_m2() {
        let m = m2();
        for f in Fault::ALL {
            let bad = mutate(&m, f).unwrap_or_else(|| panic!("{f:?} applies to M2"));
            assert!(validate_model(&bad).iter().any(|d| f.detected_by(d)), "{f:?}");
        }
    }
}
