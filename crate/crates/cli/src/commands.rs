use std::path::Path;

use normloop::benchmark::{
    dataset, inject_anomalies, render_report, run_trials, BenchError, InjectError, ReportFormat, TrialPlan,
};
use normloop::ddl::emit_ddl;
use normloop::prompt::{build_prompt, estimate_tokens, PromptRole, PromptTemplate};
use normloop::refine::{run_refinement, RefinementConfig};
use normloop::verify::VerifyError;

use crate::input::{config_for, generator, load_schema, read_file, verifier, write_file, CliError};
use crate::{BenchArgs, FormatChoice, InjectArgs, NormalizeArgs, ParseArgs, PromptArgs, PromptMode, VerifyArgs};

type Outcome = Result<u8, CliError>;

fn verify_error(e: VerifyError) -> CliError {
    if e.is_backend_failure() {
        CliError::Backend(e.to_string())
    } else {
        CliError::Usage(e.to_string())
    }
}

fn structural(errors: Vec<normloop::StructuralError>) -> CliError {
    CliError::Usage(errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))
}

pub fn parse(args: ParseArgs) -> Outcome {
    let schema = load_schema(&args.file)?.canonicalize().map_err(structural)?;
    println!("{}", serde_json::to_string_pretty(&schema).expect("schema serializes"));
    Ok(0)
}

pub fn verify(args: VerifyArgs) -> Outcome {
    let schema = load_schema(&args.file)?;
    let config = config_for(&[args.backend], &args.config)?;
    let verifier = verifier(args.backend, &config)?;
    let report = verifier.verify(&schema, args.nf).map_err(verify_error)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print!("{report}");
    }
    Ok(if report.passes(args.nf) { 0 } else { 1 })
}

pub fn normalize(args: NormalizeArgs) -> Outcome {
    let schema = load_schema(&args.file)?;
    let gen_choice = args.generator.unwrap_or(args.backend);
    let ver_choice = args.verifier.unwrap_or(args.backend);
    let config = config_for(&[gen_choice, ver_choice], &args.config)?;
    let refinement = RefinementConfig {
        max_attempts: args.max_attempts,
        hard_cap: args.hard_cap,
        target: args.target,
        shot_mode: args.shots,
        ..RefinementConfig::default()
    };
    refinement.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let generator = generator(gen_choice, &config)?;
    let verifier = verifier(ver_choice, &config)?;
    let transcript =
        run_refinement(&schema, &*generator, &*verifier, &refinement).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(path) = &args.transcript {
        write_file(path, &(transcript.to_json() + "\n"))?;
    }
    if let Some(reason) = &transcript.aborted {
        return Err(CliError::Backend(format!("refinement aborted: {reason}")));
    }
    print!("{}", emit_ddl(&transcript.final_schema).map_err(structural)?);
    let attempts = transcript.attempts.len();
    if transcript.converged {
        eprintln!("converged after {attempts} attempt(s)");
        Ok(0)
    } else {
        eprintln!("not converged after {attempts} attempt(s)");
        Ok(1)
    }
}

fn inject_error(e: InjectError) -> CliError {
    match e {
        InjectError::InjectionImpossible { .. } => CliError::Domain(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    }
}

pub fn inject(args: InjectArgs) -> Outcome {
    let schema = load_schema(&args.file)?;
    let truth = inject_anomalies(&schema, args.nf, args.count as usize, args.seed).map_err(inject_error)?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", args.out.display())))?;
    let stem = format!("{}_nf{}_seed{}", truth.mutated_schema.name.key(), args.nf.level(), args.seed);
    let sql = args.out.join(format!("{stem}.sql"));
    let json = args.out.join(format!("{stem}_truth.json"));
    write_file(&sql, &emit_ddl(&truth.mutated_schema).map_err(structural)?)?;
    write_file(&json, &(truth.to_json() + "\n"))?;
    for r in &truth.records {
        let cols: Vec<&str> = r.columns.iter().map(|c| c.as_str()).collect();
        println!("{} {} {} ({}): {}", r.id, r.kind, r.table, cols.join(", "), r.note);
    }
    println!("wrote {}", sql.display());
    println!("wrote {}", json.display());
    Ok(0)
}

fn bench_error(e: BenchError) -> CliError {
    match e {
        BenchError::Inject(e) => inject_error(e),
        BenchError::Score(e) => CliError::Domain(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

pub fn bench(args: BenchArgs) -> Outcome {
    let (name, base) = match dataset(&args.schema) {
        Some(d) => (d.name.to_string(), d.schema),
        None if Path::new(&args.schema).exists() => {
            let s = load_schema(&args.schema)?;
            (s.name.to_string(), s)
        }
        None => {
            return Err(CliError::Usage(format!(
                "unknown schema `{}` (expected Orders, Advertising, AirportDB or a DDL file)",
                args.schema
            )))
        }
    };
    let config = config_for(&[args.generator, args.verifier], &args.config)?;
    let generator = generator(args.generator, &config)?;
    let verifier = verifier(args.verifier, &config)?;
    let mut plan = TrialPlan::new(name, base, args.nf, args.seed);
    plan.anomaly_count = args.count as usize;
    plan.trials = args.trials;
    plan.workers = args.workers.map(|w| w as usize);
    plan.refinement = RefinementConfig {
        max_attempts: args.max_attempts,
        hard_cap: args.hard_cap,
        shot_mode: args.shots,
        ..RefinementConfig::default()
    };
    plan.refinement.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let outcome = run_trials(&plan, &*generator, &*verifier).map_err(bench_error)?;
    let format = match args.format {
        FormatChoice::Text => ReportFormat::TextTable,
        FormatChoice::Csv => ReportFormat::Csv,
        FormatChoice::Json => ReportFormat::Structured,
    };
    let rendered = render_report(&outcome.report, format);
    print!("{rendered}");
    if let Some(path) = &args.report {
        write_file(path, &rendered)?;
    }
    if let Some(path) = &args.runs {
        write_file(path, &(serde_json::to_string_pretty(&outcome.runs).expect("runs serialize") + "\n"))?;
    }
    let report = &outcome.report;
    if report.trials_excluded > 0 {
        eprintln!("{} of {} trials excluded after backend errors", report.trials_excluded, report.trials_run);
    }
    if report.trials_excluded == report.trials_run {
        return Err(CliError::Backend("every trial ended in a backend error".into()));
    }
    Ok(0)
}

pub fn prompt(args: PromptArgs) -> Outcome {
    let schema = load_schema(&args.schema)?;
    let role = match args.mode {
        PromptMode::Gen => PromptRole::Generation,
        PromptMode::Ver => PromptRole::Verification,
    };
    let template = match &args.template {
        Some(path) => PromptTemplate::custom(role, args.shots, read_file(path)?)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?,
        None => PromptTemplate::builtin(role, args.shots),
    };
    let feedback = args.feedback.as_deref().map(read_file).transpose()?;
    let text =
        build_prompt(&template, &schema, feedback.as_deref(), args.nf).map_err(|e| CliError::Usage(e.to_string()))?;
    print!("{text}");
    if !text.ends_with('\n') {
        println!();
    }
    println!("-- estimated tokens: {}", estimate_tokens(&text));
    Ok(0)
}
