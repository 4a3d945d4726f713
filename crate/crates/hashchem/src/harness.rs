//! Monte Carlo campaign runner.
//!
//! A campaign launches runs with child streams derived from one master
//! seed, in attempt order 0, 1, 2, ... Acceptance depends only on each
//! run's own seed (an attempt is rejected iff it went extinct), so the
//! result is identical at any parallelism level.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::core::{Params, ParamsError};
use crate::engine::{run_stream, RunSummary};
use crate::metrics::{StepLog, StepRecord};
use crate::rng::derive_run_stream;

/// How attempts are selected into the result set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CampaignMode {
    /// Keep launching attempts until `target_runs` non-extinct runs are
    /// collected (or `max_attempts` is exhausted).
    FilterExtinct,
    /// Run exactly `target_runs` attempts and keep them all, extinct or
    /// not. Used by the uniform-random control, whose point is to observe
    /// extinction.
    KeepAll,
}

#[derive(Debug, Clone)]
pub struct CampaignSpec {
    pub params: Params,
    pub master_seed: u64,
    /// Accepted runs wanted (filter mode) or attempts to run (keep-all).
    pub target_runs: usize,
    /// Safety cap on attempts in filter mode.
    pub max_attempts: usize,
    /// Worker threads; runs beyond this many execute in later waves.
    pub parallelism: usize,
    pub mode: CampaignMode,
}

impl CampaignSpec {
    /// Filter-mode spec with the default 10x attempt headroom.
    pub fn filtered(params: Params, master_seed: u64, target_runs: usize) -> Self {
        CampaignSpec {
            params,
            master_seed,
            target_runs,
            max_attempts: target_runs * 10,
            parallelism: 1,
            mode: CampaignMode::FilterExtinct,
        }
    }
}

/// One finished run with its full metric log.
#[derive(Debug, Clone)]
pub struct RunResult {
    /// Index used to derive this run's stream from the master seed.
    pub attempt_index: usize,
    pub extinct: bool,
    pub extinction_tick: Option<u32>,
    pub records: Vec<StepRecord>,
}

#[derive(Debug, Clone)]
pub struct CampaignResult {
    /// Accepted runs (filter mode) or all runs (keep-all), in attempt order.
    pub runs: Vec<RunResult>,
    /// Attempts consumed: in filter mode, the index of the last accepted
    /// attempt plus one (or `max_attempts` if exhausted).
    pub attempts: usize,
    /// Non-extinct runs among the consumed attempts.
    pub accepted: usize,
    /// False iff filter mode ran out of attempts short of the target.
    pub complete: bool,
}

impl CampaignResult {
    /// Fraction of consumed attempts that went extinct.
    pub fn extinction_probability(&self) -> f64 {
        if self.attempts == 0 {
            0.0
        } else {
            (self.attempts - self.accepted) as f64 / self.attempts as f64
        }
    }
}

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("invalid parameters: {0}")]
    Params(#[from] ParamsError),
    #[error("target_runs must be >= 1")]
    TargetRuns,
    #[error("max_attempts ({max_attempts}) must be >= target_runs ({target_runs})")]
    MaxAttempts { max_attempts: usize, target_runs: usize },
}

/// Runs attempt `attempt_index` of the campaign seeded by `master_seed`.
pub fn run_attempt(
    params: &Params,
    master_seed: u64,
    attempt_index: usize,
) -> Result<RunResult, ParamsError> {
    let stream = derive_run_stream(master_seed, attempt_index as u64);
    let mut log = StepLog::new(params.num_types);
    let summary: RunSummary = run_stream(params, stream, &mut log)?;
    Ok(RunResult {
        attempt_index,
        extinct: summary.extinct,
        extinction_tick: summary.extinction_tick,
        records: log.records,
    })
}

/// Executes a campaign. Deterministic for a given spec regardless of
/// `parallelism`: attempts are evaluated in waves and accepted strictly in
/// attempt-index order.
pub fn run_campaign(spec: &CampaignSpec) -> Result<CampaignResult, CampaignError> {
    spec.params.validate()?;
    if spec.target_runs == 0 {
        return Err(CampaignError::TargetRuns);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.parallelism.max(1))
        .build()
        .expect("building campaign thread pool");

    match spec.mode {
        CampaignMode::KeepAll => {
            let runs: Vec<RunResult> = pool.install(|| {
                (0..spec.target_runs)
                    .into_par_iter()
                    .map(|i| run_attempt(&spec.params, spec.master_seed, i))
                    .collect::<Result<_, _>>()
            })?;
            let accepted = runs.iter().filter(|r| !r.extinct).count();
            Ok(CampaignResult { runs, attempts: spec.target_runs, accepted, complete: true })
        }
        CampaignMode::FilterExtinct => {
            if spec.max_attempts < spec.target_runs {
                return Err(CampaignError::MaxAttempts {
                    max_attempts: spec.max_attempts,
                    target_runs: spec.target_runs,
                });
            }
            // First wave sized for the expected extinction overhead; later
            // waves keep all workers busy without overshooting too far.
            let mut results: Vec<RunResult> = Vec::new();
            let mut next = 0usize;
            let mut accepted_so_far = 0usize;
            let mut stop: Option<usize> = None; // attempts consumed
            while stop.is_none() && next < spec.max_attempts {
                let wave = if next == 0 {
                    (spec.target_runs * 13 / 10 + 1).min(spec.max_attempts)
                } else {
                    (spec.parallelism.max(1) * 2).max(8).min(spec.max_attempts - next)
                };
                let batch: Vec<RunResult> = pool.install(|| {
                    (next..next + wave)
                        .into_par_iter()
                        .map(|i| run_attempt(&spec.params, spec.master_seed, i))
                        .collect::<Result<_, _>>()
                })?;
                next += wave;
                for run in batch {
                    if stop.is_some() {
                        break;
                    }
                    let accepted = !run.extinct;
                    results.push(run);
                    if accepted {
                        accepted_so_far += 1;
                        if accepted_so_far == spec.target_runs {
                            stop = Some(results.len());
                        }
                    }
                }
            }
            let attempts = stop.unwrap_or(results.len().min(spec.max_attempts));
            results.truncate(attempts);
            let accepted_runs: Vec<RunResult> =
                results.into_iter().filter(|r| !r.extinct).collect();
            let accepted = accepted_runs.len();
            Ok(CampaignResult {
                runs: accepted_runs,
                attempts,
                accepted,
                complete: accepted == spec.target_runs,
            })
        }
    }
}
