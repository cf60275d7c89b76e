use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::normalize::Generator;
use crate::refine::{run_refinement, RefineError, RefinementConfig, RefinementTranscript};
use crate::schema::{NormalForm, Schema};
use crate::verify::Verifier;

use super::inject::{inject_anomalies, GroundTruth, InjectError};
use super::metrics::{aggregate, MetricsReport};
use super::score::{score_trial, ScoreError, TrialResult};

pub const DEFAULT_TRIALS: u32 = 20;
pub const DEFAULT_ANOMALY_COUNT: usize = 5;

#[derive(Debug, Clone)]
pub struct TrialPlan {
    pub schema_name: String,
    pub base: Schema,
    pub normal_form: NormalForm,
    pub anomaly_count: usize,
    pub trials: u32,
    pub seed: u64,
    pub refinement: RefinementConfig,
    /// Worker threads; `None` uses one per logical CPU.
    pub workers: Option<usize>,
}

impl TrialPlan {
    pub fn new(schema_name: impl Into<String>, base: Schema, normal_form: NormalForm, seed: u64) -> Self {
        TrialPlan {
            schema_name: schema_name.into(),
            base,
            normal_form,
            anomaly_count: DEFAULT_ANOMALY_COUNT,
            trials: DEFAULT_TRIALS,
            seed,
            refinement: RefinementConfig::default(),
            workers: None,
        }
    }

    /// Seed of trial `index`.
    pub fn trial_seed(&self, index: u32) -> u64 {
        self.seed ^ u64::from(index)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRun {
    pub index: u32,
    pub seed: u64,
    pub truth: GroundTruth,
    pub transcript: RefinementTranscript,
    /// `None` when a backend error ended the run.
    pub result: Option<TrialResult>,
}

#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub report: MetricsReport,
    pub runs: Vec<TrialRun>,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Inject(#[from] InjectError),
    #[error(transparent)]
    Refine(#[from] RefineError),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

fn run_one(
    plan: &TrialPlan,
    index: u32,
    generator: &dyn Generator,
    verifier: &dyn Verifier,
) -> Result<TrialRun, BenchError> {
    let seed = plan.trial_seed(index);
    let truth = inject_anomalies(&plan.base, plan.normal_form, plan.anomaly_count, seed)?;
    let transcript = run_refinement(&truth.mutated_schema, generator, verifier, &plan.refinement)?;
    let result = match &transcript.aborted {
        Some(reason) => {
            tracing::warn!(index, %reason, "trial excluded");
            None
        }
        None => Some(TrialResult { trial_index: index, ..score_trial(&truth, &transcript)? }),
    };
    Ok(TrialRun { index, seed, truth, transcript, result })
}

/// Runs `plan.trials` independent inject, refine, score trials. Trials run
/// on a worker pool unless a backend depends on call order, in which case
/// they run one after another in index order. The report does not depend
/// on scheduling.
pub fn run_trials(
    plan: &TrialPlan,
    generator: &dyn Generator,
    verifier: &dyn Verifier,
) -> Result<BenchOutcome, BenchError> {
    if plan.trials == 0 {
        return Err(BenchError::NoTrials);
    }
    plan.refinement.validate()?;
    let sequential = generator.is_order_sensitive() || verifier.is_order_sensitive() || plan.workers == Some(1);
    let runs: Vec<TrialRun> = if sequential {
        (0..plan.trials).map(|i| run_one(plan, i, generator, verifier)).collect::<Result<_, _>>()?
    } else {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = plan.workers {
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(|e| BenchError::Pool(e.to_string()))?;
        pool.install(|| {
            (0..plan.trials).into_par_iter().map(|i| run_one(plan, i, generator, verifier)).collect::<Result<_, _>>()
        })?
    };
    let results: Vec<TrialResult> = runs.iter().filter_map(|r| r.result.clone()).collect();
    let excluded = runs.len() - results.len();
    let report = aggregate(&plan.schema_name, plan.normal_form, plan.anomaly_count, &results, excluded);
    Ok(BenchOutcome { report, runs })
}
