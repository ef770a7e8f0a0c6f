//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero when any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use sstit_core::epistemic::knowledge_sets;
use sstit_core::eval::{generates, ProfileSpace};
use sstit_core::fixtures::{m1, m2, rs, NEG_POSITIONAL_STRATEGY, NEG_UNIFORM_STRATEGY};
use sstit_core::oracle::{
    check_agreement, check_validities, formula_corpus, histories_up_to, mutate, random_model, Fault,
};
use sstit_core::repr::{
    action_names, definable, extract_partial, negative_positional_model, negative_uniform_model,
    no_knowledge_rules_perform, no_proposition_rules_perform, repr_positional, repr_uniform, verify_all,
    CheckVerdict, HarnessBounds, TheoremId, TheoremReport,
};
use sstit_core::strategy::parse_positional;
use sstit_core::{
    oracle_eval, parse_formula, validate_model, write_model, EnumBounds, Error, ExactEvaluator, Model,
    StateSet, Status,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sstit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sstit"))
        .args(args)
        .env_remove("SSTIT_SEED")
        .output()
        .expect("run sstit")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sstit-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("create scratch dir");
    dir
}

fn fixtures() -> Vec<(String, Model)> {
    vec![("m1".into(), m1()), ("m2".into(), m2())]
}

fn harness_models(seed: u64, count: usize, keep: impl Fn(&Model) -> bool) -> Vec<(String, Model)> {
    let b = EnumBounds::harness(seed);
    (0..)
        .map(|k| (format!("rand{k}"), random_model(&b, k).expect("random model")))
        .filter(|(_, m)| keep(m))
        .take(count)
        .collect()
}

fn all_pass(reports: &[TheoremReport]) -> Outcome {
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| r.verdict == CheckVerdict::Fail)
        .map(|r| r.tsv_line(None))
        .collect();
    if !failed.is_empty() {
        return Err(format!("{} failing reports, first: {}", failed.len(), failed[0]));
    }
    let checks: usize = reports.iter().map(|r| r.checks).sum();
    ensure(checks > 0, || "no instance met the hypotheses".into())?;
    Ok(format!("{} reports, {checks} checks", reports.len()))
}

fn validation() -> Outcome {
    for (name, m) in fixtures() {
        let d = validate_model(&m);
        ensure(d.is_empty(), || format!("{name} has diagnostics: {d:?}"))?;
    }
    let base = m2();
    let dir = scratch_dir();
    for fault in Fault::ALL {
        let bad = mutate(&base, fault).ok_or_else(|| format!("{fault:?} does not apply to M2"))?;
        let d = validate_model(&bad);
        ensure(d.iter().any(|x| fault.detected_by(x)), || format!("{fault:?} not diagnosed: {d:?}"))?;
        let path = dir.join(format!("{fault:?}.cegm"));
        std::fs::write(&path, write_model(&bad)).map_err(|e| e.to_string())?;
        let out = sstit(&["validate", path.to_str().unwrap()]);
        ensure(out.status.code() == Some(3), || format!("validate {fault:?} exited {:?}", out.status))?;
    }
    let out = sstit(&["validate", fixture("m2.cegm").to_str().unwrap()]);
    ensure(out.status.success() && out.stdout == b"valid\n", || {
        format!("validate m2: {:?} {}", out.status, String::from_utf8_lossy(&out.stdout))
    })?;
    Ok(format!("{} mutants diagnosed, fixtures clean", Fault::ALL.len()))
}

fn oracle_agreement() -> Outcome {
    let b = EnumBounds::with_seed(21);
    let (mut checked, mut decisive) = (0, 0);
    for k in 0..100 {
        let m = random_model(&b, k).map_err(|e| e.to_string())?;
        let corpus = formula_corpus(&m, k, 10);
        let a = check_agreement(&m, &corpus, 2, 6).map_err(|e| e.to_string())?;
        if let Some(d) = a.disagreements.first() {
            return Err(format!("model {k}: {d:?}"));
        }
        checked += a.checked;
        decisive += a.decisive;
    }
    ensure(decisive > 0, || "oracle never decisive".into())?;
    Ok(format!("{checked} points, {decisive} decisive, 0 disagreements"))
}

fn validities() -> Outcome {
    let b = EnumBounds::with_seed(22);
    let mut models = fixtures();
    for k in 0..200 {
        models.push((format!("rand{k}"), random_model(&b, k).map_err(|e| e.to_string())?));
    }
    let (mut checked, mut unknown) = (0, 0);
    for (name, m) in &models {
        let r = check_validities(m, 2).map_err(|e| e.to_string())?;
        if let Some(f) = r.failures.first() {
            return Err(format!("{name}: {} fails as {} at {:?}", f.schema, f.formula, f.history));
        }
        checked += r.checked;
        unknown += r.unknown;
    }

    let m = m2();
    let doing = parse_formula("act{1:a}").unwrap();
    let knows = parse_formula("K{1} act{1:a}").unwrap();
    let space = ProfileSpace::new(&m).map_err(|e| e.to_string())?;
    let mut ev_doing = ExactEvaluator::new(&m, &doing).map_err(|e| e.to_string())?;
    let mut ev_knows = ExactEvaluator::new(&m, &knows).map_err(|e| e.to_string())?;
    let witness = histories_up_to(&m, 1).into_iter().find_map(|h| {
        let ks = knowledge_sets(&m, &h);
        (0..space.len())
            .filter(|&c| generates(&m, &space.decode(&m, c), h.states()))
            .find(|&c| ev_doing.eval_code(h.last(), &ks, c) && !ev_knows.eval_code(h.last(), &ks, c))
            .map(|c| (h, c))
    });
    let (h, code) = witness.ok_or("no point on M2 where agent 1 does a without knowing it")?;
    let s = space.decode(&m, code);
    let oracle = oracle_eval(&m, &h, &s, &knows, 2).map_err(|e| e.to_string())?;
    ensure(oracle.as_bool() == Some(false), || format!("oracle gives {oracle:?} for the witness"))?;
    Ok(format!(
        "{} models, {checked} instances ({unknown} undecided), witness at {:?}",
        models.len(),
        h.states()
    ))
}

fn prop1() -> Outcome {
    let mut models = fixtures();
    models.extend(harness_models(41, 100, |_| true));
    let reports = verify_all(&models, &[TheoremId::P1a, TheoremId::P1b], &HarnessBounds::default())
        .map_err(|e| e.to_string())?;
    all_pass(&reports)
}

fn every_state_definable(m: &Model) -> bool {
    (0..m.num_states()).all(|q| definable(m, StateSet::singleton(q)).is_some())
}

fn prop2_prop3() -> Outcome {
    let mut models: Vec<_> = fixtures().into_iter().filter(|(_, m)| every_state_definable(m)).collect();
    models.extend(harness_models(42, 50, every_state_definable));
    let ids = [TheoremId::P2, TheoremId::P3, TheoremId::Cor];
    let summary = all_pass(&verify_all(&models, &ids, &HarnessBounds::default()).map_err(|e| e.to_string())?)?;

    let m = negative_positional_model();
    let s = parse_positional(&m, NEG_POSITIONAL_STRATEGY).map_err(|e| e.to_string())?;
    ensure(matches!(repr_positional(&m, &s), Err(Error::Undefinable { .. })), || {
        "the strategy on propositionally identical states was represented".into()
    })?;
    ensure(no_proposition_rules_perform(&m, &s, 0, 4).map_err(|e| e.to_string())?, || {
        "some proposition-action rule set performs the counterexample strategy".into()
    })?;
    Ok(format!("{} models, {summary}, converse counterexample confirmed", models.len()))
}

fn has_epistemic_block(m: &Model) -> bool {
    (0..m.num_agents()).any(|i| (0..m.num_states()).any(|q| m.block(i, q).len() >= 2))
}

fn prop4_prop5() -> Outcome {
    let mut models = fixtures();
    models.extend(harness_models(43, 50, has_epistemic_block));
    let ids = [TheoremId::P4, TheoremId::P5];
    let summary = all_pass(&verify_all(&models, &ids, &HarnessBounds::default()).map_err(|e| e.to_string())?)?;

    let m = negative_uniform_model();
    let s = parse_positional(&m, NEG_UNIFORM_STRATEGY).map_err(|e| e.to_string())?;
    ensure(matches!(repr_uniform(&m, &s, 0), Err(Error::Undefinable { .. })), || {
        "the uniform counterexample strategy was represented".into()
    })?;
    ensure(no_knowledge_rules_perform(&m, &s, 0, 4).map_err(|e| e.to_string())?, || {
        "some knowledge-action rule set performs the counterexample strategy".into()
    })?;
    Ok(format!("{} models, {summary}, non-converse counterexample confirmed", models.len()))
}

fn extraction() -> Outcome {
    let m = m1();
    let expected = [
        ["Defined(b)", "Defined(a)"],
        ["Conflict", "NoTrigger"],
        ["NoTrigger", "Defined(a)"],
        ["NoTrigger", "Conflict"],
    ];
    for (n, want) in (1..=4).zip(expected) {
        let report = extract_partial(&m, &rs(n)).map_err(|e| e.to_string())?;
        let got: Vec<String> = (0..m.num_states())
            .map(|q| match report.status_at_state(&m, q) {
                Some(Status::Defined(v)) => format!("Defined({})", action_names(&m, v)),
                Some(s) => s.label().to_string(),
                None => "missing".to_string(),
            })
            .collect();
        ensure(got == want, || format!("RS{n}: {got:?}, expected {want:?}"))?;
        ensure(report.spot_check_failures.is_empty(), || format!("RS{n}: spot check failed"))?;
    }
    let out = sstit(&[
        "extract",
        "--model",
        fixture("m1.cegm").to_str().unwrap(),
        "--rules",
        fixture("rs2.rules").to_str().unwrap(),
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    ensure(out.status.code() == Some(1) && text.starts_with("q0\tConflict\t-\nq1\tNoTrigger\t-\n"), || {
        format!("sstit extract RS2: {:?}\n{text}", out.status)
    })?;
    Ok("RS1-RS4 table reproduced".into())
}

fn determinism() -> Outcome {
    let args = ["verify", "--random", "50", "--seed", "7"];
    let first = sstit(&args);
    let second = sstit(&args);
    ensure(!first.stdout.is_empty(), || format!("no report: {}", String::from_utf8_lossy(&first.stderr)))?;
    ensure(first.stdout == second.stdout, || "reports differ between runs".into())?;
    let text = String::from_utf8_lossy(&first.stdout);
    let lines = text.lines().count() - 1;
    let fails = text.lines().filter(|l| l.split('\t').nth(2) == Some("fail")).count();
    Ok(format!("{} bytes identical, {lines} reports, {fails} fail, exit {:?}", first.stdout.len(), first.status.code()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("model validation", Duration::from_secs(1), validation),
        ("exact evaluator agrees with oracle", Duration::from_secs(300), oracle_agreement),
        ("validity suite", Duration::from_secs(300), validities),
        ("proposition-action rules: acc and perf", Duration::from_secs(600), prop1),
        ("positional representation", Duration::from_secs(600), prop2_prop3),
        ("uniform representation", Duration::from_secs(600), prop4_prop5),
        ("extraction diagnostics", Duration::from_secs(1), extraction),
        ("deterministic verify reports", Duration::from_secs(1200), determinism),
    ];
    let mut failed = 0;
    for (n, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(_) if took > budget => Err(format!("took {took:.2?}, budget {budget:?}")),
            o => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("{tag} [{}] {name}: {detail} ({took:.2?})", n + 1);
        failed += usize::from(outcome.is_err());
    }
    let _ = std::fs::remove_dir_all(std::env::temp_dir().join(format!("sstit-acceptance-{}", std::process::id())));
    if failed > 0 {
        println!("{failed} of 8 criteria failed");
        std::process::exit(1);
    }
    println!("all 8 criteria passed");
}
