mod support;

use std::collections::BTreeSet;

use normloop::benchmark::bundled_datasets;
use normloop::ddl::{emit_ddl, parse_ddl};
use normloop::fd::{
    chase_lossless, closure, minimal_cover, partial_dependencies, preserves_dependencies, project_fds, synthesize_3nf,
    transitive_dependencies,
};
use normloop::verify::{parse_verdict_block, verify_deterministic, BackendKind, Verdict, VerificationReport};
use normloop::{AttributeSet, NormalForm, Schema};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use support::oracle;
use support::random::{self, fd_masks, mask_of, relation};

fn pairs(violations: &[normloop::fd::DependencyViolation]) -> BTreeSet<(u32, usize)> {
    violations.iter().map(|v| (mask_of(&v.determinant), random::index_of(&v.dependent))).collect()
}

#[test]
fn violations_match_brute_force() {
    let (mut with_partial, mut with_transitive) = (0, 0);
    for seed in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=6);
        let masks = fd_masks(&mut rng, n, 5);
        let table = relation(n);
        let fds = random::fds(&masks);
        let expected_partial = oracle::partial_pairs(n, &masks);
        let expected_transitive = oracle::transitive_pairs(n, &masks);
        with_partial += usize::from(!expected_partial.is_empty());
        with_transitive += usize::from(!expected_transitive.is_empty());
        assert_eq!(pairs(&partial_dependencies(&table, &fds).unwrap()), expected_partial, "seed {seed} {masks:?}");
        assert_eq!(
            pairs(&transitive_dependencies(&table, &fds).unwrap()),
            expected_transitive,
            "seed {seed} {masks:?}"
        );
    }
    assert!(with_partial >= 25 && with_transitive >= 25, "{with_partial} {with_transitive}");
}

#[test]
fn synthesis_is_3nf_lossless_and_preserving() {
    for seed in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..=6);
        let masks = fd_masks(&mut rng, n, 5);
        let table = relation(n);
        let fds = random::fds(&masks);
        let out = synthesize_3nf(&table, &fds).unwrap();
        let fragments: Vec<u32> = out.iter().map(|t| mask_of(&t.column_set())).collect();
        assert_eq!(fragments.iter().fold(0, |a, f| a | f), oracle::full(n), "seed {seed}");
        for f in &fragments {
            assert!(oracle::is_3nf(*f, &masks), "seed {seed}: fragment {f:b} of {masks:?}");
        }
        assert!(oracle::lossless(n, &fragments, &masks), "seed {seed}");
        assert!(oracle::preserves(&fragments, &masks), "seed {seed}");

        let universe: AttributeSet = table.column_set();
        assert!(chase_lossless(&out, &universe, &fds).unwrap(), "seed {seed}");
        assert!(preserves_dependencies(&out, &fds).unwrap(), "seed {seed}");
        let mut schema = Schema::new("synth", out.clone());
        for t in &out {
            for fd in project_fds(&fds, &t.column_set()).unwrap() {
                schema.fds.push(fd.scoped(t.name.clone()));
            }
        }
        let report = verify_deterministic(&schema, NormalForm::Nf3).unwrap();
        assert!(report.passes(NormalForm::Nf3), "seed {seed}: {:?}", report.anomalies);
    }
}

fn assert_monotone(report: &VerificationReport, context: &str) {
    for pair in NormalForm::ALL.windows(2) {
        if report.status.get(&pair[0]) == Some(&Verdict::Fail) {
            assert_eq!(report.status.get(&pair[1]).copied().unwrap_or(Verdict::Fail), Verdict::Fail, "{context}");
        }
    }
}

fn random_verdict_text(rng: &mut impl Rng) -> String {
    let mut out = String::new();
    if rng.random_bool(0.3) {
        out.push_str("Here is my assessment.\n");
    }
    for nf in NormalForm::ALL {
        let v = if rng.random_bool(0.5) { "PASS" } else { "FAIL" };
        out.push_str(&format!("{}: {v}\n", nf.tag()));
    }
    for _ in 0..rng.random_range(0..3) {
        let (nf, kind) = [("NF1", "MISSING_PK"), ("NF2", "PARTIAL"), ("NF3", "TRANSITIVE")][rng.random_range(0..3)];
        out.push_str(&format!("ANOMALY: {nf} | {kind} | t | a, b | because | split\n"));
    }
    out
}

#[test]
fn reports_are_monotone() {
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let schema = random::schema(&mut rng);
        for target in NormalForm::ALL {
            let r = verify_deterministic(&schema, target).unwrap();
            assert_monotone(&r, &format!("seed {seed} target {target}"));
            assert!(r.is_monotone());
        }
        let text = random_verdict_text(&mut rng);
        for target in NormalForm::ALL {
            if let Ok(block) = parse_verdict_block(&text, target) {
                let r = block.into_report(target, BackendKind::Llm);
                assert_monotone(&r, &format!("seed {seed} parsed {text}"));
            }
        }
    }
}

#[test]
fn ddl_round_trips() {
    let mut schemas: Vec<Schema> = bundled_datasets().into_iter().map(|d| d.schema).collect();
    for seed in 0..200u64 {
        schemas.push(random::schema(&mut ChaCha8Rng::seed_from_u64(seed)));
    }
    for s in &schemas {
        let text = emit_ddl(s).unwrap();
        let back = parse_ddl(&text).unwrap();
        assert_eq!(back.canonicalize().unwrap(), s.canonicalize().unwrap(), "{text}");
        assert_eq!(emit_ddl(&back).unwrap(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closure_is_extensive_monotone_idempotent(n in 1usize..=6, seed: u64, x in 0u32..64, y in 0u32..64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let masks = fd_masks(&mut rng, n, 5);
        let fds = random::fds(&masks);
        let x = x & oracle::full(n);
        let y = (y & oracle::full(n)) | x;
        let set = |m: u32| -> AttributeSet { random::names(m).into_iter().map(normloop::Ident::new).collect() };
        let cx = closure(&set(x), &fds);
        prop_assert_eq!(mask_of(&cx), oracle::closure(x, &masks));
        prop_assert!(set(x).is_subset(&cx));
        prop_assert!(cx.is_subset(&closure(&set(y), &fds)));
        prop_assert_eq!(closure(&cx, &fds), cx);
    }

    #[test]
    fn minimal_cover_is_equivalent_and_reduced(n in 1usize..=6, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let masks = fd_masks(&mut rng, n, 5);
        let cover = minimal_cover(&random::fds(&masks));
        let cover_masks: Vec<oracle::Fd> = cover.iter().map(|f| (mask_of(&f.lhs), mask_of(&f.rhs))).collect();
        for x in 0..=oracle::full(n) {
            prop_assert_eq!(oracle::closure(x, &masks), oracle::closure(x, &cover_masks));
        }
        for (i, &(l, r)) in cover_masks.iter().enumerate() {
            prop_assert_eq!(r.count_ones(), 1);
            let others: Vec<oracle::Fd> = cover_masks.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| *f).collect();
            prop_assert!(oracle::closure(l, &others) & r == 0, "redundant {:?}", cover[i]);
            for b in (0..n).filter(|b| l & (1 << b) != 0 && l.count_ones() > 1) {
                prop_assert!(oracle::closure(l & !(1 << b), &cover_masks) & r == 0, "extraneous attribute in {:?}", cover[i]);
            }
        }
    }

    #[test]
    fn verification_is_pure(seed: u64) {
        let schema = random::schema(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(
            verify_deterministic(&schema, NormalForm::Nf3).unwrap(),
            verify_deterministic(&schema, NormalForm::Nf3).unwrap()
        );
    }
}
