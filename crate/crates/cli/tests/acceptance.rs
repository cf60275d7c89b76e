//! Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits
//! non-zero when a gating criterion fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;
use std::time::{Duration, Instant};

use normloop::benchmark::{
    aggregate, bundled_datasets, dataset, render_report, run_trials, ReportFormat, TrialPlan, TrialResult,
};
use normloop::ddl::{emit_ddl, extract_schema_block, parse_ddl};
use normloop::fd::{
    chase_lossless, partial_dependencies, preserves_dependencies, project_fds, synthesize_3nf, transitive_dependencies,
    DependencyViolation,
};
use normloop::llm::{
    connect, record, BackendConfig, ChatBackend, ChatRequest, ChatResponse, ChatSettings, LlmConfig, LlmError, Message,
    Recorder, ScriptedBackend, DEFAULT_CREDENTIAL_VAR,
};
use normloop::normalize::{deterministic_normalize, DeterministicGenerator, LlmGenerator};
use normloop::prompt::{build_prompt, estimate_tokens, PromptRole, PromptTemplate, ShotMode};
use normloop::refine::{run_refinement, RefinementConfig, DEFAULT_HARD_CAP, DEFAULT_MAX_ATTEMPTS};
use normloop::verify::{
    parse_verdict_block, verify_deterministic, BackendKind, DeterministicVerifier, LlmVerifier, Verdict,
    VerificationReport,
};
use normloop::{AttributeSet, NormalForm, Schema};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use support::oracle;
use support::random::{self, fd_masks, mask_of, relation};

const ORACLE_RELATIONS: u64 = 500;
const SYNTHESIS_SETS: u64 = 500;
const MONOTONE_SCHEMAS: u64 = 1000;
const ROUND_TRIP_SCHEMAS: u64 = 200;
const ORACLE_BUDGET: Duration = Duration::from_secs(60);
const PIPELINE_BUDGET: Duration = Duration::from_secs(30);
const ADVERTISING_ZERO_SHOT_MAX: usize = 600;
const STD_TOLERANCE: f64 = 0.001;
const BENCH_SEED: u64 = 2024;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_normloop")
}

/// Runs the binary with no model credentials and no usable proxy.
fn run_cli(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .env_remove(DEFAULT_CREDENTIAL_VAR)
        .env("HTTPS_PROXY", "http://127.0.0.1:9")
        .env("HTTP_PROXY", "http://127.0.0.1:9")
        .output()
        .expect("binary runs")
}

fn stdout_of(dir: &Path, args: &[&str]) -> Result<String, String> {
    let out = run_cli(dir, args);
    if !out.status.success() {
        return Err(format!(
            "`normloop {}` exited {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn pairs(violations: &[DependencyViolation]) -> BTreeSet<(u32, usize)> {
    violations.iter().map(|v| (mask_of(&v.determinant), random::index_of(&v.dependent))).collect()
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let (mut mismatches, mut with_partial, mut with_transitive) = (0, 0, 0);
    for seed in 0..ORACLE_RELATIONS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=6);
        let masks = fd_masks(&mut rng, n, 5);
        let table = relation(n);
        let fds = random::fds(&masks);
        let partial = oracle::partial_pairs(n, &masks);
        let transitive = oracle::transitive_pairs(n, &masks);
        with_partial += usize::from(!partial.is_empty());
        with_transitive += usize::from(!transitive.is_empty());
        if pairs(&partial_dependencies(&table, &fds).map_err(|e| e.to_string())?) != partial {
            mismatches += 1;
        }
        if pairs(&transitive_dependencies(&table, &fds).map_err(|e| e.to_string())?) != transitive {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(mismatches == 0, "{mismatches} mismatches against the brute-force enumerator");
    ensure!(
        with_partial >= 25 && with_transitive >= 25,
        "too few violating relations: {with_partial}/{with_transitive}"
    );
    ensure!(elapsed < ORACLE_BUDGET, "took {elapsed:?}");
    Ok(format!("{ORACLE_RELATIONS} relations, 0 mismatches, {:.2}s", elapsed.as_secs_f64()))
}

fn synthesis_validity() -> Check {
    let start = Instant::now();
    for seed in 0..SYNTHESIS_SETS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..=6);
        let masks = fd_masks(&mut rng, n, 5);
        let table = relation(n);
        let fds = random::fds(&masks);
        let out = synthesize_3nf(&table, &fds).map_err(|e| format!("seed {seed}: {e}"))?;
        let fragments: Vec<u32> = out.iter().map(|t| mask_of(&t.column_set())).collect();
        ensure!(fragments.iter().all(|f| oracle::is_3nf(*f, &masks)), "seed {seed}: fragment not in 3NF");
        ensure!(oracle::lossless(n, &fragments, &masks), "seed {seed}: oracle chase finds a lossy join");
        ensure!(oracle::preserves(&fragments, &masks), "seed {seed}: oracle finds a lost dependency");

        let universe: AttributeSet = table.column_set();
        ensure!(chase_lossless(&out, &universe, &fds).map_err(|e| e.to_string())?, "seed {seed}: chase_lossless false");
        ensure!(preserves_dependencies(&out, &fds).map_err(|e| e.to_string())?, "seed {seed}: not preserving");
        let mut schema = Schema::new("synth", out.clone());
        for t in &out {
            for fd in project_fds(&fds, &t.column_set()).map_err(|e| e.to_string())? {
                schema.fds.push(fd.scoped(t.name.clone()));
            }
        }
        let report = verify_deterministic(&schema, NormalForm::Nf3).map_err(|e| e.to_string())?;
        ensure!(report.passes(NormalForm::Nf3), "seed {seed}: verification fails: {:?}", report.anomalies);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < ORACLE_BUDGET, "took {elapsed:?}");
    Ok(format!("{SYNTHESIS_SETS} FD sets, all 3NF/lossless/preserving, {:.2}s", elapsed.as_secs_f64()))
}

fn deterministic_end_to_end() -> Check {
    let start = Instant::now();
    let mut runs = 0;
    for d in bundled_datasets() {
        for nf in NormalForm::ALL {
            let plan = TrialPlan::new(d.name, d.schema.clone(), nf, BENCH_SEED);
            ensure!(
                plan.anomaly_count == 5 && plan.trials == 20,
                "default plan is {}x{}",
                plan.anomaly_count,
                plan.trials
            );
            let r = run_trials(&plan, &DeterministicGenerator, &DeterministicVerifier)
                .map_err(|e| format!("{} {nf}: {e}", d.name))?
                .report;
            let ctx = format!("{} {nf}", d.name);
            ensure!(
                r.trials_run == 20 && r.trials_excluded == 0,
                "{ctx}: {} run, {} excluded",
                r.trials_run,
                r.trials_excluded
            );
            ensure!(
                r.accuracy_mean == 5.0 && r.accuracy_std == 0.0,
                "{ctx}: accuracy {} ({})",
                r.accuracy_mean,
                r.accuracy_std
            );
            ensure!(r.detection_rate == 1.0, "{ctx}: detection {}", r.detection_rate);
            ensure!(r.elimination_rate == 1.0, "{ctx}: elimination {}", r.elimination_rate);
            ensure!(
                r.attempts_histogram.len() == 1 && r.attempts_histogram.get(&1) == Some(&20),
                "{ctx}: attempts {:?}",
                r.attempts_histogram
            );
            runs += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < PIPELINE_BUDGET, "took {elapsed:?}");
    Ok(format!("{runs} configurations x 20 trials at 5.00 (±0.00), 1 attempt each, {:.2}s", elapsed.as_secs_f64()))
}

fn dataset_fidelity() -> Check {
    let expected = [("Orders", 4, 3), ("Advertising", 7, 8), ("AirportDB", 14, 21)];
    let all = bundled_datasets();
    ensure!(all.len() == 3, "{} datasets", all.len());
    for (d, (name, tables, fks)) in all.iter().zip(expected) {
        let fk_count: usize = d.schema.tables.iter().map(|t| t.foreign_keys.len()).sum();
        ensure!(d.name == name, "expected {name}, got {}", d.name);
        ensure!(
            d.schema.tables.len() == tables && fk_count == fks,
            "{name}: {} tables / {fk_count} FKs",
            d.schema.tables.len()
        );
        let report = verify_deterministic(&d.schema, NormalForm::Nf3).map_err(|e| e.to_string())?;
        ensure!(report.passes(NormalForm::Nf3) && report.anomalies.is_empty(), "{name}: {:?}", report.anomalies);
    }
    Ok("Orders 4/3, Advertising 7/8, AirportDB 14/21, all clean at 3NF".into())
}

const THREE_DEFECTS: &str = "\
CREATE TABLE emp (emp_id INT NOT NULL, dept_id INT, dept_name TEXT, PRIMARY KEY (emp_id));
CREATE TABLE store (store_id INT NOT NULL, zip VARCHAR(10), city TEXT, PRIMARY KEY (store_id));
CREATE TABLE item (item_id INT NOT NULL, brand_id INT, brand_name TEXT, PRIMARY KEY (item_id));
-- @fd emp: dept_id -> dept_name
-- @fd store: zip -> city
-- @fd item: brand_id -> brand_name
";

/// The schema above with the first `fixed` tables split.
fn partly_fixed(fixed: usize) -> String {
    let split = [
        "CREATE TABLE emp (emp_id INT NOT NULL, dept_id INT, PRIMARY KEY (emp_id), FOREIGN KEY (dept_id) REFERENCES dept (dept_id));\n\
         CREATE TABLE dept (dept_id INT NOT NULL, dept_name TEXT, PRIMARY KEY (dept_id));\n",
        "CREATE TABLE store (store_id INT NOT NULL, zip VARCHAR(10), PRIMARY KEY (store_id), FOREIGN KEY (zip) REFERENCES zip_city (zip));\n\
         CREATE TABLE zip_city (zip VARCHAR(10) NOT NULL, city TEXT, PRIMARY KEY (zip));\n",
        "CREATE TABLE item (item_id INT NOT NULL, brand_id INT, PRIMARY KEY (item_id), FOREIGN KEY (brand_id) REFERENCES brand (brand_id));\n\
         CREATE TABLE brand (brand_id INT NOT NULL, brand_name TEXT, PRIMARY KEY (brand_id));\n",
    ];
    let whole: Vec<&str> = THREE_DEFECTS.lines().take(3).collect();
    let mut ddl = String::from("```sql\n");
    for i in 0..3 {
        if i < fixed {
            ddl.push_str(split[i]);
        } else {
            ddl.push_str(whole[i]);
            ddl.push('\n');
        }
    }
    ddl.push_str("```\n");
    ddl
}

/// An ordered script whose k-th reply fixes k of the three defects.
fn fix_one_per_call_script(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("fix_one.script");
    let req = ChatRequest::new("scripted", vec![Message::user("normalize")]);
    for k in 1..=3 {
        record(&req, &ChatResponse::text(partly_fixed(k)), &path).expect("script written");
    }
    path
}

fn loop_policy() -> Check {
    ensure!(DEFAULT_MAX_ATTEMPTS == 3 && DEFAULT_HARD_CAP == 20, "defaults {DEFAULT_MAX_ATTEMPTS}/{DEFAULT_HARD_CAP}");
    let cfg = RefinementConfig::default();
    ensure!(cfg.max_attempts == 3 && cfg.hard_cap == 20, "config defaults {}/{}", cfg.max_attempts, cfg.hard_cap);
    ensure!(cfg.with_max_attempts(20).validate().is_ok(), "20 attempts rejected");
    ensure!(cfg.with_max_attempts(21).validate().is_err(), "21 attempts accepted under a cap of 20");

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let schema = parse_ddl(THREE_DEFECTS).map_err(|e| e.to_string())?;
    let input = verify_deterministic(&schema, NormalForm::Nf3).map_err(|e| e.to_string())?;
    ensure!(input.anomalies.len() == 3, "fixture has {} anomalies", input.anomalies.len());

    let run = |max_attempts: u32| {
        let script = fix_one_per_call_script(dir.path());
        let backend = Arc::new(ScriptedBackend::load(&script).expect("script loads"));
        let generator = LlmGenerator::new(backend, ChatSettings::default());
        let cfg = RefinementConfig::default().with_max_attempts(max_attempts);
        let t = run_refinement(&schema, &generator, &DeterministicVerifier, &cfg);
        std::fs::remove_file(&script).ok();
        t
    };

    let t = run(3).map_err(|e| e.to_string())?;
    ensure!(t.aborted.is_none(), "aborted: {:?}", t.aborted);
    let remaining: Vec<usize> =
        t.attempts.iter().map(|a| a.report.as_ref().map_or(usize::MAX, |r| r.anomalies.len())).collect();
    ensure!(remaining == [2, 1, 0], "anomalies left per attempt: {remaining:?}");
    ensure!(t.converged && t.attempts.len() == 3, "converged={} after {}", t.converged, t.attempts.len());

    let t = run(2).map_err(|e| e.to_string())?;
    ensure!(!t.converged && t.attempts.len() == 2, "capped run: converged={} after {}", t.converged, t.attempts.len());
    Ok("defaults 3/20; fixture converges in 3, stops unconverged at 2".into())
}

fn monotone(report: &VerificationReport) -> bool {
    NormalForm::ALL.windows(2).all(|w| {
        report.status.get(&w[0]) != Some(&Verdict::Fail)
            || report.status.get(&w[1]).copied().unwrap_or(Verdict::Fail) == Verdict::Fail
    })
}

fn random_verdict_text(rng: &mut impl Rng) -> String {
    let mut out = String::new();
    for nf in NormalForm::ALL {
        out.push_str(&format!("{}: {}\n", nf.tag(), if rng.random_bool(0.5) { "PASS" } else { "FAIL" }));
    }
    if rng.random_bool(0.5) {
        out.push_str("ANOMALY: NF2 | PARTIAL | t | a, b | depends on part of the key | split\n");
    }
    out
}

fn monotone_verification() -> Check {
    let mut checked = 0;
    for seed in 0..MONOTONE_SCHEMAS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let schema = random::schema(&mut rng);
        for target in NormalForm::ALL {
            let r = verify_deterministic(&schema, target).map_err(|e| e.to_string())?;
            ensure!(monotone(&r), "seed {seed} target {target}: {:?}", r.status);
            checked += 1;
        }
        let text = random_verdict_text(&mut rng);
        if let Ok(block) = parse_verdict_block(&text, NormalForm::Nf3) {
            let r = block.into_report(NormalForm::Nf3, BackendKind::Llm);
            ensure!(monotone(&r), "parsed {text:?}: {:?}", r.status);
            checked += 1;
        }
    }
    let clamped = parse_verdict_block("NF1: FAIL\nNF2: PASS\nNF3: PASS\n", NormalForm::Nf3)
        .map_err(|e| e.to_string())?
        .into_report(NormalForm::Nf3, BackendKind::Llm);
    ensure!(
        clamped.verdict(NormalForm::Nf2) == Some(Verdict::Fail)
            && clamped.verdict(NormalForm::Nf3) == Some(Verdict::Fail),
        "FAIL at NF1 not propagated: {:?}",
        clamped.status
    );
    Ok(format!("{checked} reports monotone, clamped fixture propagates FAIL"))
}

fn prompt_cost_ordering() -> Check {
    let mut parts = Vec::new();
    for d in bundled_datasets() {
        let cost = |mode| {
            let t = PromptTemplate::builtin(PromptRole::Generation, mode);
            build_prompt(&t, &d.schema, None, NormalForm::Nf3).map(|p| estimate_tokens(&p))
        };
        let (zero, one, few) = (
            cost(ShotMode::Zero).map_err(|e| e.to_string())?,
            cost(ShotMode::One).map_err(|e| e.to_string())?,
            cost(ShotMode::Few).map_err(|e| e.to_string())?,
        );
        ensure!(zero < one && one < few, "{}: {zero} / {one} / {few}", d.name);
        if d.name == "Advertising" {
            ensure!(zero <= ADVERTISING_ZERO_SHOT_MAX, "Advertising zero-shot costs {zero} tokens");
        }
        parts.push(format!("{} {zero}<{one}<{few}", d.name));
    }
    Ok(parts.join(", "))
}

fn round_trip() -> Check {
    let mut schemas: Vec<Schema> = bundled_datasets().into_iter().map(|d| d.schema).collect();
    for seed in 0..ROUND_TRIP_SCHEMAS {
        schemas.push(random::schema(&mut ChaCha8Rng::seed_from_u64(seed)));
    }
    for s in &schemas {
        let text = emit_ddl(s).map_err(|_| format!("{} does not emit", s.name))?;
        let back = parse_ddl(&text).map_err(|e| format!("{e}\n{text}"))?;
        ensure!(back.canonicalize().ok() == s.canonicalize().ok(), "round trip changes {}", s.name);
        ensure!(emit_ddl(&back).ok().as_deref() == Some(text.as_str()), "re-emit differs for {}", s.name);
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for d in bundled_datasets() {
        let a = stdout_of(dir.path(), &["normalize", d.name])?;
        let b = stdout_of(dir.path(), &["normalize", d.name])?;
        ensure!(a == b, "{}: normalize output differs between processes", d.name);
        let reparsed = parse_ddl(&a).map_err(|e| format!("{}: {e}", d.name))?;
        ensure!(emit_ddl(&reparsed).ok().as_deref() == Some(a.as_str()), "{}: in-process re-emit differs", d.name);
        let mut files = Vec::new();
        for out in ["a", "b"] {
            stdout_of(dir.path(), &["inject", d.name, "--nf", "2", "--seed", "3", "--out", out])?;
            let name = format!("{}_nf2_seed3.sql", d.schema.name.key());
            files.push(std::fs::read(dir.path().join(out).join(name)).map_err(|e| e.to_string())?);
        }
        ensure!(files[0] == files[1], "{}: injected DDL differs between processes", d.name);
    }
    Ok(format!("{} schemas round-trip; emit byte-stable across processes", schemas.len()))
}

/// Answers generation prompts with the deterministic normalization of the
/// schema it was sent.
struct NormalizingModel;

impl ChatBackend for NormalizingModel {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LlmError> {
        let schema =
            parse_ddl(&extract_schema_block(request.prompt()).expect("prompt has a schema")).expect("schema parses");
        let out = deterministic_normalize(&schema).expect("normalizes");
        Ok(ChatResponse::text(format!("```sql\n{}```\n", emit_ddl(&out).expect("emits"))))
    }
}

/// Answers verification prompts with the deterministic verdict block.
struct CheckingModel;

impl ChatBackend for CheckingModel {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LlmError> {
        let schema =
            parse_ddl(&extract_schema_block(request.prompt()).expect("prompt has a schema")).expect("schema parses");
        let report = verify_deterministic(&schema, NormalForm::Nf3).expect("verifies");
        Ok(ChatResponse::text(report.to_string()))
    }
}

fn replay_determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = LlmConfig {
        generation: BackendConfig::scripted("generation.script"),
        verification: BackendConfig::scripted("verification.script"),
    };
    let d = dataset("advertising").ok_or("Advertising missing")?;
    let plan = TrialPlan::new(d.name, d.schema.clone(), NormalForm::Nf3, 5);
    let generator = LlmGenerator::new(
        Arc::new(Recorder::new(Arc::new(NormalizingModel), dir.path().join("generation.script"))),
        ChatSettings::from_config(&config.generation),
    );
    let verifier = LlmVerifier::new(
        Arc::new(Recorder::new(Arc::new(CheckingModel), dir.path().join("verification.script"))),
        ChatSettings::from_config(&config.verification),
    );
    let recorded = run_trials(&plan, &generator, &verifier).map_err(|e| e.to_string())?.report;
    ensure!(recorded.trials_excluded == 0, "recording excluded {} trials", recorded.trials_excluded);
    let expected = render_report(&recorded, ReportFormat::Structured);

    std::fs::write(dir.path().join("normloop.toml"), config.to_toml_string()).map_err(|e| e.to_string())?;
    let args = [
        "bench",
        "--schema",
        "Advertising",
        "--nf",
        "3",
        "--seed",
        "5",
        "--gen",
        "llm",
        "--ver",
        "llm",
        "--format",
        "json",
        "--config",
        "normloop.toml",
    ];
    let first = stdout_of(dir.path(), &args)?;
    let second = stdout_of(dir.path(), &args)?;
    ensure!(first == second, "replays differ:\n{first}\n{second}");
    ensure!(first == expected, "replay differs from the recorded run:\n{first}\n{expected}");
    Ok(format!("20 trials replayed twice without credentials, {} bytes identical", first.len()))
}

fn fixture(eliminated: usize, count: usize) -> TrialResult {
    TrialResult {
        trial_index: 0,
        eliminated: (0..count).map(|i| i < eliminated).collect(),
        detected: vec![true; count],
        attempts_used: 1,
        converged: eliminated == count,
        tokens_est: 0,
    }
}

fn metric_arithmetic() -> Check {
    let r = aggregate("fixture", NormalForm::Nf3, 5, &[fixture(5, 5), fixture(4, 5), fixture(3, 5)], 0);
    ensure!(format!("{:.2}", r.accuracy_mean) == "4.00", "mean {}", r.accuracy_mean);
    ensure!((r.accuracy_std - 0.816).abs() <= STD_TOLERANCE, "std {}", r.accuracy_std);
    let r = aggregate("fixture", NormalForm::Nf3, 5, &[fixture(5, 5), fixture(5, 5), fixture(5, 5), fixture(1, 5)], 0);
    ensure!(r.elimination_rate == 0.75, "elimination rate {}", r.elimination_rate);
    Ok(format!("[5,4,3] -> 4.00 / {:.3}; 3 of 4 -> 0.75", ((2.0f64) / 3.0).sqrt()))
}

/// Returns `None` when no credential is configured.
fn live_smoke() -> Option<Check> {
    std::env::var(DEFAULT_CREDENTIAL_VAR).ok().filter(|v| !v.is_empty())?;
    Some((|| {
        let config = LlmConfig::default();
        let gen_backend = connect(&config.generation).map_err(|e| e.to_string())?;
        let ver_backend = connect(&config.verification).map_err(|e| e.to_string())?;
        let generator = LlmGenerator::new(gen_backend, ChatSettings::from_config(&config.generation));
        let verifier = LlmVerifier::new(ver_backend, ChatSettings::from_config(&config.verification));
        let d = dataset("advertising").ok_or("Advertising missing")?;
        let mut plan = TrialPlan::new(d.name, d.schema, NormalForm::Nf3, 1);
        plan.trials = 1;
        plan.workers = Some(1);
        let outcome = run_trials(&plan, &generator, &verifier).map_err(|e| e.to_string())?;
        let run = &outcome.runs[0];
        ensure!(run.transcript.aborted.is_none(), "aborted: {:?}", run.transcript.aborted);
        serde_json::from_str::<serde_json::Value>(&run.transcript.to_json()).map_err(|e| e.to_string())?;
        Ok(format!("{} attempt(s), transcript parses", run.transcript.attempts.len()))
    })())
}

fn guarded(f: fn() -> Check) -> Check {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    })
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("synthesis validity", synthesis_validity),
        ("deterministic end-to-end", deterministic_end_to_end),
        ("dataset fidelity", dataset_fidelity),
        ("loop policy", loop_policy),
        ("monotone verification", monotone_verification),
        ("prompt cost ordering", prompt_cost_ordering),
        ("round-trip", round_trip),
        ("replay determinism", replay_determinism),
        ("metric arithmetic", metric_arithmetic),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        match guarded(f) {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why}", i + 1);
            }
        }
    }
    match catch_unwind(live_smoke) {
        Ok(None) => println!("criterion 11 SKIP live smoke: {DEFAULT_CREDENTIAL_VAR} not set"),
        Ok(Some(Ok(detail))) => println!("criterion 11 PASS live smoke: {detail}"),
        Ok(Some(Err(why))) => println!("criterion 11 FAIL live smoke (not gating): {why}"),
        Err(_) => println!("criterion 11 FAIL live smoke (not gating): panicked"),
    }
    if failed > 0 {
        println!("{failed} gating criteria failed");
        std::process::exit(1);
    }
}
