//! Schematic validities of the logic, instantiated per model and checked at
//! every profile and history.

use crate::eval::{eval_bounded, generates, EvalPoint, ExactEvaluator, ProfileSpace, Verdict};
use crate::strategy::{PositionalStrategy, Profile};
use crate::epistemic::knowledge_sets;
use crate::error::Result;
use crate::model::{Coalition, Model};
use crate::syntax::{parse_formula, Formula};

use super::histories_up_to;

/// Named schemas. `$M` is a modality (`box` or `[sstit {i}]`), `$C`, `$A`, `$B`
/// coalitions, `$AB` the union of `$A` and `$B`, `$P` and `$Q` formulas.
pub const SCHEMAS: &[(&str, &str)] = &[
    ("S5-K", "$M ($P -> $Q) -> ($M $P -> $M $Q)"),
    ("S5-T", "$M $P -> $P"),
    ("S5-4", "$M $P -> $M $M $P"),
    ("S5-5", "~$M $P -> $M ~$M $P"),
    ("S5-Nec", "$M ($P | ~$P)"),
    ("monotonicity", "[sstit $A] $P -> [sstit $B] $P"),
    ("box-next", "box X $P -> X box $P"),
    ("stit-next", "[sstit $C] X $P -> X [sstit $C] $P"),
    ("stit-box", "[sstit $C] box $P <-> box $P"),
    ("stit-next-stit", "[sstit $C] X [sstit $C] $P <-> [sstit $C] X $P"),
    ("stit-G-stit", "[sstit $C] G [sstit $C] $P <-> [sstit $C] G $P"),
    ("independence", "dia [sstit $A] $P & dia [sstit $B] $Q -> dia [sstit $AB] ($P & $Q)"),
];

/// One instance of a schema.
#[derive(Clone, Debug)]
pub struct Instance {
    pub schema: &'static str,
    pub formula: Formula,
}

fn coalition_text(c: &Coalition) -> String {
    let names: Vec<String> = c.members().iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", names.join(","))
}

fn subsets(k: usize) -> Vec<Coalition> {
    (1u32..(1 << k))
        .map(|mask| Coalition::new((0..k).filter(|&i| mask & (1 << i) != 0)))
        .collect()
}

/// Formulas substituted for `$P` and `$Q`.
fn fillers(m: &Model) -> (Vec<String>, Vec<String>) {
    let p = m.prop_name(0).to_string();
    let q = m.prop_name(m.num_props() - 1).to_string();
    let a = m.action_name(0);
    let b = m.action_name(m.num_actions() - 1);
    let last = m.num_agents();
    let ps = vec![
        p.clone(),
        format!("X {p}"),
        format!("act{{1:{a}}}"),
        format!("G {q}"),
        format!("~X {q} & act{{{last}:{b}}}"),
    ];
    let qs = vec![q.clone(), format!("X {p}"), format!("act{{{last}:{b}}}")];
    (ps, qs)
}

/// Every instance of every schema that fits `m`.
pub fn validity_instances(m: &Model) -> Vec<Instance> {
    let k = m.num_agents();
    let (ps, qs) = fillers(m);
    let coalitions = subsets(k);
    let mut modalities = vec!["box".to_string()];
    modalities.extend((1..=k).map(|i| format!("[sstit {{{i}}}]")));

    let mut out = Vec::new();
    for &(name, shape) in SCHEMAS {
        let mut texts: Vec<String> = vec![shape.to_string()];
        let expand = |texts: Vec<String>, var: &str, values: &[String]| -> Vec<String> {
            if !texts.iter().any(|t| t.contains(var)) {
                return texts;
            }
            texts
                .iter()
                .flat_map(|t| values.iter().map(move |v| t.replace(var, v)))
                .collect()
        };
        if shape.contains("$AB") {
            let mut pairs = Vec::new();
            for a in &coalitions {
                for b in &coalitions {
                    if a.is_disjoint(b) {
                        pairs.push(shape
                            .replace("$AB", &coalition_text(&a.union(b)))
                            .replace("$A", &coalition_text(a))
                            .replace("$B", &coalition_text(b)));
                    }
                }
            }
            texts = pairs;
        } else if shape.contains("$A") {
            let mut pairs = Vec::new();
            for a in &coalitions {
                for b in &coalitions {
                    if a.is_subset(b) {
                        pairs.push(shape.replace("$A", &coalition_text(a)).replace("$B", &coalition_text(b)));
                    }
                }
            }
            texts = pairs;
        }
        let cs: Vec<String> = coalitions.iter().map(coalition_text).collect();
        texts = expand(texts, "$C", &cs);
        texts = expand(texts, "$M", &modalities);
        let wrap = |v: &Vec<String>| v.iter().map(|s| format!("({s})")).collect::<Vec<_>>();
        texts = expand(texts, "$P", &wrap(&ps));
        texts = expand(texts, "$Q", &wrap(&qs));
        for t in texts {
            let f = parse_formula(&t).expect("schema instances parse");
            out.push(Instance { schema: name, formula: f });
        }
    }
    out
}

/// Schemas relating choices at successive moments. Positional quantification
/// cannot play differently at `[q]` and `[q, q]`, so these are checked with
/// the bounded evaluator, whose quantifiers range over history-dependent trees.
pub const TEMPORAL_SCHEMAS: &[&str] = &["box-next", "stit-next", "stit-next-stit", "stit-G-stit"];

/// A schema instance that is false somewhere.
#[derive(Clone, Debug)]
pub struct ValidityFailure {
    pub schema: &'static str,
    pub formula: Formula,
    pub history: Vec<usize>,
    pub profile: PositionalStrategy,
}

#[derive(Clone, Debug, Default)]
pub struct ValidityReport {
    pub checked: usize,
    /// Points where the bounded evaluator could not decide.
    pub unknown: usize,
    pub failures: Vec<ValidityFailure>,
}

/// Checks every instance of [`SCHEMAS`] at each positional profile and each
/// history of at most `history_depth` steps that the profile generates,
/// keeping the first failure per instance.
pub fn check_validities(m: &Model, history_depth: usize) -> Result<ValidityReport> {
    let histories = histories_up_to(m, history_depth);
    let space = ProfileSpace::new(m)?;
    let points: Vec<(usize, u64)> = (0..histories.len())
        .flat_map(|n| (0..space.len()).map(move |code| (n, code)))
        .filter(|&(n, code)| generates(m, &space.decode(m, code), histories[n].states()))
        .collect();
    let mut report = ValidityReport::default();
    for inst in validity_instances(m) {
        let temporal = TEMPORAL_SCHEMAS.contains(&inst.schema);
        let mut ev = ExactEvaluator::new(m, &inst.formula)?;
        let horizon = inst.formula.next_depth() + 1;
        for &(n, code) in &points {
            let h = &histories[n];
            report.checked += 1;
            let holds = if temporal {
                let profile = Profile::positional(m, space.decode(m, code))?;
                let pt = EvalPoint::new(m, h.clone(), profile);
                match eval_bounded(&pt, &inst.formula, horizon)? {
                    Verdict::Unknown(_) => {
                        report.unknown += 1;
                        true
                    }
                    v => v == Verdict::True,
                }
            } else {
                ev.eval_code(h.last(), &knowledge_sets(m, h), code)
            };
            if !holds {
                report.failures.push(ValidityFailure {
                    schema: inst.schema,
                    formula: inst.formula.clone(),
                    history: h.states().to_vec(),
                    profile: space.decode(m, code),
                });
                break;
            }
        }
    }
    Ok(report)
}
