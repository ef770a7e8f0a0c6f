use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use sstit_core::epistemic::knowledge_sets;
use sstit_core::fixtures::{m1, m2, rs};
use sstit_core::oracle::{random_model, EnumBounds};
use sstit_core::repr::{extract_partial, proposition_action_rule_sets, verify_theorem, HarnessBounds, TheoremId};
use sstit_core::strategy::parse_positional;
use sstit_core::{oracle_eval, parse_formula, Coalition, ExactEvaluator, History};

fn exact(c: &mut Criterion) {
    let m = m2();
    let h = History::new(&m, vec![0, 1, 0]).unwrap();
    let ks = knowledge_sets(&m, &h);
    for text in ["K{1} G dia [sstit {1}] X p", "[sstit {1,2}] G (p -> X ~p)", "box G (act{1:a} | X p)"] {
        let f = parse_formula(text).unwrap();
        c.bench_function(&format!("exact {text}"), |b| {
            b.iter(|| {
                let mut ev = ExactEvaluator::new(&m, &f).unwrap();
                let codes = ev.space().len();
                (0..codes).filter(|&k| ev.eval_code(h.last(), &ks, k)).count()
            })
        });
    }
}

fn oracle(c: &mut Criterion) {
    let m = m2();
    let s = parse_positional(&m, "positional for {1,2}: q0 -> b,c; q1 -> a,c").unwrap();
    let f = parse_formula("dia [sstit {1}] X X p").unwrap();
    let h = History::initial(0);
    c.bench_function("oracle depth 3", |b| b.iter(|| oracle_eval(&m, &h, &s, black_box(&f), 3).unwrap()));
}

fn extraction(c: &mut Criterion) {
    let m = m1();
    c.bench_function("extract rs1", |b| b.iter(|| extract_partial(&m, black_box(&rs(1))).unwrap()));

    let big = random_model(&EnumBounds::harness(3), 0).unwrap();
    let all = Coalition::all(big.num_agents());
    let sets = proposition_action_rule_sets(&big, &all, 4, 200, 0).sets;
    c.bench_function("extract 200 sampled rule sets", |b| {
        b.iter(|| sets.iter().filter(|r| extract_partial(&big, r).unwrap().partial.is_total()).count())
    });
}

fn harness(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    let m = m1();
    for id in [TheoremId::P1a, TheoremId::P1b, TheoremId::P5] {
        group.bench_function(id.name(), |b| b.iter(|| verify_theorem(&m, "m1", id, &HarnessBounds::default()).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, exact, oracle, extraction, harness);
criterion_main!(benches);
