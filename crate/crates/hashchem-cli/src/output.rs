//! File emission: per-run CSVs, the averaged series, the campaign summary
//! and the growth-fit report.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use hashchem::analysis::{
    average_series, fit_growth, AnalysisError, Field, FitDiagnostics, GrowthModel, SamplingMode,
};
use hashchem::harness::{CampaignResult, CampaignSpec, RunResult};
use hashchem::metrics::StepRecord;

use crate::config::FitSampling;

pub const CSV_HEADER: &str =
    "tick,population,replicated,max_f,mean_f,max_size,mean_size,cum_ind_types,cum_ho_types";

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One record per row; absent optional cells stay blank.
pub fn write_run_csv(path: &Path, records: &[StepRecord]) -> Result<()> {
    let mut w = BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    );
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.tick,
            r.population,
            r.replicated_individuals,
            opt(r.max_event_fitness),
            opt(r.mean_event_fitness),
            opt(r.max_event_size),
            opt(r.mean_event_size),
            r.cum_unique_individual_types,
            r.cum_unique_higher_order_types
        )?;
    }
    w.flush()?;
    Ok(())
}

const AVERAGED_FIELDS: [Field; 8] = [
    Field::Population,
    Field::ReplicatedIndividuals,
    Field::MaxEventFitness,
    Field::MeanEventFitness,
    Field::MaxEventSize,
    Field::MeanEventSize,
    Field::CumIndividualTypes,
    Field::CumHigherOrderTypes,
];

/// Cross-run mean of every column, same schema as the per-run CSVs.
pub fn write_average_csv(path: &Path, runs: &[&[StepRecord]]) -> Result<()> {
    let columns: Vec<Vec<Option<f64>>> = AVERAGED_FIELDS
        .iter()
        .map(|f| average_series(runs, *f))
        .collect::<Result<_, AnalysisError>>()?;
    let len = columns.iter().map(|c| c.len()).max().unwrap_or(0);
    let mut w = BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    );
    writeln!(w, "{CSV_HEADER}")?;
    for i in 0..len {
        let cells: Vec<String> =
            columns.iter().map(|c| opt(c.get(i).copied().flatten())).collect();
        writeln!(w, "{},{}", i + 1, cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RunMeta<'a> {
    file: String,
    attempt_index: usize,
    extinct: bool,
    extinction_tick: Option<u32>,
    ticks: usize,
    final_population: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
}

#[derive(Serialize)]
struct CampaignSummary<'a> {
    params: &'a hashchem::core::Params,
    master_seed: u64,
    mode: hashchem::harness::CampaignMode,
    target_runs: usize,
    max_attempts: usize,
    parallelism: usize,
    attempts: usize,
    accepted: usize,
    extinct_attempts: usize,
    extinction_probability: f64,
    complete: bool,
    wall_time_secs: f64,
    runs: Vec<RunMeta<'a>>,
}

pub fn write_campaign_json(
    path: &Path,
    spec: &CampaignSpec,
    result: &CampaignResult,
    wall_time_secs: f64,
) -> Result<()> {
    let runs: Vec<RunMeta> = result
        .runs
        .iter()
        .enumerate()
        .map(|(i, r)| RunMeta {
            file: format!("run_{i}.csv"),
            attempt_index: r.attempt_index,
            extinct: r.extinct,
            extinction_tick: r.extinction_tick,
            ticks: r.records.len(),
            final_population: r.records.last().map(|rec| rec.population).unwrap_or(0),
            note: None,
        })
        .collect();
    let summary = CampaignSummary {
        params: &spec.params,
        master_seed: spec.master_seed,
        mode: spec.mode,
        target_runs: spec.target_runs,
        max_attempts: spec.max_attempts,
        parallelism: spec.parallelism,
        attempts: result.attempts,
        accepted: result.accepted,
        extinct_attempts: result.attempts - result.accepted,
        extinction_probability: result.extinction_probability(),
        complete: result.complete,
        wall_time_secs,
        runs,
    };
    let json = serde_json::to_string_pretty(&summary)?;
    std::fs::write(path, json + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[derive(Serialize)]
pub struct ModelPair {
    pub bounded: FitDiagnostics,
    pub unbounded: FitDiagnostics,
}

#[derive(Serialize)]
pub struct SeriesFits {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniform_ticks: Option<ModelPair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_spaced_ticks: Option<ModelPair>,
}

#[derive(Serialize)]
pub struct FitReport {
    pub t_lo: u32,
    pub t_hi: u32,
    pub max_event_size: SeriesFits,
    pub mean_event_size: SeriesFits,
}

fn fit_pair(
    series: &[Option<f64>],
    t_lo: u32,
    t_hi: u32,
    sampling: SamplingMode,
) -> Result<ModelPair, AnalysisError> {
    Ok(ModelPair {
        bounded: fit_growth(series, t_lo, t_hi, GrowthModel::Bounded, sampling)?,
        unbounded: fit_growth(series, t_lo, t_hi, GrowthModel::Unbounded, sampling)?,
    })
}

/// Fits both growth models to the averaged event-size series over
/// `[t_lo, t_hi]`. Returns None when the window does not fit the data
/// (short runs), in which case no report should be written.
pub fn build_fit_report(
    runs: &[&[StepRecord]],
    t_lo: u32,
    t_hi: u32,
    sampling: FitSampling,
) -> Result<Option<FitReport>> {
    let fits_for = |field: Field| -> Result<Option<SeriesFits>> {
        let series = average_series(runs, field)?;
        let uniform = match sampling {
            FitSampling::Uniform | FitSampling::Both => {
                match fit_pair(&series, t_lo, t_hi, SamplingMode::UniformTicks) {
                    Ok(p) => Some(p),
                    Err(AnalysisError::BadWindow { .. } | AnalysisError::TooFewPoints(_)) => {
                        return Ok(None)
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            FitSampling::Log => None,
        };
        let log_spaced = match sampling {
            FitSampling::Log | FitSampling::Both => {
                match fit_pair(&series, t_lo, t_hi, SamplingMode::LogSpacedTicks) {
                    Ok(p) => Some(p),
                    Err(AnalysisError::BadWindow { .. } | AnalysisError::TooFewPoints(_)) => {
                        return Ok(None)
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            FitSampling::Uniform => None,
        };
        Ok(Some(SeriesFits { uniform_ticks: uniform, log_spaced_ticks: log_spaced }))
    };
    let (max_fits, mean_fits) =
        match (fits_for(Field::MaxEventSize)?, fits_for(Field::MeanEventSize)?) {
            (Some(a), Some(b)) => (a, b),
            _ => return Ok(None),
        };
    Ok(Some(FitReport { t_lo, t_hi, max_event_size: max_fits, mean_event_size: mean_fits }))
}

pub fn write_fit_report(path: &Path, report: &FitReport) -> Result<()> {
    let json = serde_json::to_string_pretty(report)?;
    std::fs::write(path, json + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Record slices of the kept runs, in output order.
pub fn run_views(result: &CampaignResult) -> Vec<&[StepRecord]> {
    result.runs.iter().map(|r: &RunResult| r.records.as_slice()).collect()
}
