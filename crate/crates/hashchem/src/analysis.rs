//! Cross-run aggregation and growth-model fitting.
//!
//! Two growth models are fitted to averaged series by ordinary least
//! squares on a transformed time regressor: bounded growth
//! `n(t) = -a/ln t + b` (asymptote b) and unbounded growth
//! `n(t) = a ln t + b`. Goodness of fit is reported as R^2, AIC and BIC
//! under the usual Gaussian-likelihood convention with k = 3 estimated
//! quantities (two coefficients plus the noise variance).

use serde::Serialize;
use thiserror::Error;

use crate::metrics::StepRecord;

/// Which per-tick quantity a series carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Population,
    ReplicatedIndividuals,
    MaxEventFitness,
    MeanEventFitness,
    MaxEventSize,
    MeanEventSize,
    CumIndividualTypes,
    CumHigherOrderTypes,
}

impl Field {
    pub fn extract(&self, record: &StepRecord) -> Option<f64> {
        match self {
            Field::Population => Some(record.population as f64),
            Field::ReplicatedIndividuals => Some(record.replicated_individuals as f64),
            Field::MaxEventFitness => record.max_event_fitness,
            Field::MeanEventFitness => record.mean_event_fitness,
            Field::MaxEventSize => record.max_event_size.map(|s| s as f64),
            Field::MeanEventSize => record.mean_event_size,
            Field::CumIndividualTypes => Some(record.cum_unique_individual_types as f64),
            Field::CumHigherOrderTypes => Some(record.cum_unique_higher_order_types as f64),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("average_series needs at least one run")]
    NoRuns,
    #[error("fit window [{t_lo}, {t_hi}] is degenerate or out of range")]
    BadWindow { t_lo: u32, t_hi: u32 },
    #[error("fit needs at least 3 data points in the window, found {0}")]
    TooFewPoints(usize),
    #[error("regressor is degenerate over the window")]
    DegenerateRegressor,
}

/// Pointwise mean of one field across runs; index i holds tick i+1.
///
/// A tick contributes the mean over the runs that have a present value
/// there; runs that ended early (extinction) or recorded no events simply
/// contribute nothing at that tick. Ticks where no run has a value are
/// `None`.
pub fn average_series(
    runs: &[&[StepRecord]],
    field: Field,
) -> Result<Vec<Option<f64>>, AnalysisError> {
    if runs.is_empty() {
        return Err(AnalysisError::NoRuns);
    }
    let len = runs.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        let mut sum = 0.0;
        let mut count = 0usize;
        for run in runs {
            if let Some(record) = run.get(i) {
                debug_assert_eq!(record.tick as usize, i + 1);
                if let Some(v) = field.extract(record) {
                    sum += v;
                    count += 1;
                }
            }
        }
        out.push(if count > 0 { Some(sum / count as f64) } else { None });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthModel {
    /// `n(t) = -a/ln t + b`; approaches b from below for a > 0.
    Bounded,
    /// `n(t) = a ln t + b`; grows without bound for a > 0.
    Unbounded,
}

impl GrowthModel {
    /// The time regressor the model is linear in.
    fn regressor(&self, t: f64) -> f64 {
        match self {
            GrowthModel::Bounded => -1.0 / t.ln(),
            GrowthModel::Unbounded => t.ln(),
        }
    }
}

/// How ticks inside the fit window are weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// Every integer tick in the window, equally weighted.
    UniformTicks,
    /// Roughly `LOG_SAMPLE_POINTS` geometrically spaced ticks, so early and
    /// late decades carry similar weight.
    LogSpacedTicks,
}

const LOG_SAMPLE_POINTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitDiagnostics {
    pub model: GrowthModel,
    pub a: f64,
    pub b: f64,
    pub r_squared: f64,
    pub aic: f64,
    pub bic: f64,
    pub n_points: usize,
}

/// Ticks selected by a sampling mode over `[t_lo, t_hi]`.
fn sample_ticks(t_lo: u32, t_hi: u32, sampling: SamplingMode) -> Vec<u32> {
    match sampling {
        SamplingMode::UniformTicks => (t_lo..=t_hi).collect(),
        SamplingMode::LogSpacedTicks => {
            let lo = f64::from(t_lo);
            let hi = f64::from(t_hi);
            let n = LOG_SAMPLE_POINTS;
            let mut ticks: Vec<u32> = (0..n)
                .map(|i| {
                    let frac = i as f64 / (n - 1) as f64;
                    (lo * (hi / lo).powf(frac)).round() as u32
                })
                .collect();
            ticks.dedup();
            ticks
        }
    }
}

/// Least-squares fit of one growth model to a series over `[t_lo, t_hi]`.
///
/// `series[i]` holds the value at tick i+1; absent ticks are skipped (both
/// models see the identical point set for a given input, so their AIC/BIC
/// are comparable).
pub fn fit_growth(
    series: &[Option<f64>],
    t_lo: u32,
    t_hi: u32,
    model: GrowthModel,
    sampling: SamplingMode,
) -> Result<FitDiagnostics, AnalysisError> {
    if t_lo < 2 || t_lo >= t_hi || t_hi as usize > series.len() {
        return Err(AnalysisError::BadWindow { t_lo, t_hi });
    }
    let points: Vec<(f64, f64)> = sample_ticks(t_lo, t_hi, sampling)
        .into_iter()
        .filter_map(|t| series[(t - 1) as usize].map(|y| (model.regressor(f64::from(t)), y)))
        .collect();
    let n = points.len();
    if n < 3 {
        return Err(AnalysisError::TooFewPoints(n));
    }

    let nf = n as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in &points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx <= 0.0 {
        return Err(AnalysisError::DegenerateRegressor);
    }
    let a = sxy / sxx;
    let b = mean_y - a * mean_x;

    let mut rss = 0.0;
    let mut tss = 0.0;
    for &(x, y) in &points {
        let resid = y - (a * x + b);
        rss += resid * resid;
        tss += (y - mean_y) * (y - mean_y);
    }
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };
    // Gaussian-likelihood information criteria, k = 3 (a, b, variance).
    let k = 3.0;
    let aic = nf * (rss / nf).ln() + 2.0 * k;
    let bic = nf * (rss / nf).ln() + k * nf.ln();

    Ok(FitDiagnostics { model, a, b, r_squared, aic, bic, n_points: n })
}
