//! The experimental protocol: multi-resample benchmarking of method
//! configurations over datasets, pairwise Wilcoxon signed-rank tests with
//! Holm correction, average-rank tables and critical-difference diagrams.

mod cdd;
mod ranks;
mod stats;

pub use cdd::emit_cdd;
pub use ranks::{
    average_ranks, form_cliques, pairwise_wilcoxon_holm, PairwiseTests, RankDirection, RankTable,
};
pub use stats::{
    holm_adjust, wilcoxon_signed_rank, wilcoxon_signed_rank_with, WilcoxonMode, WilcoxonOutcome,
    WILCOXON_EXACT_LIMIT,
};

use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{stratified_resample, ResampleSpec, TimeSeriesDataset};
use crate::ensemble::{guided_search, EnsembleConfig, SpaceSpec};
use crate::error::{Error, Result};
use crate::metrics;

/// Metric selector for reports and rank tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Ccr,
    Mae,
    Qwk,
    OneOff,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Mae, Metric::Qwk, Metric::Ccr, Metric::OneOff];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Ccr => "ccr",
            Metric::Mae => "mae",
            Metric::Qwk => "qwk",
            Metric::OneOff => "one_off",
        }
    }

    /// Rank direction: errors ascend, agreement scores descend.
    pub fn direction(&self) -> RankDirection {
        match self {
            Metric::Mae => RankDirection::LowerIsBetter,
            _ => RankDirection::HigherIsBetter,
        }
    }

    pub fn extract(&self, record: &RunRecord) -> Option<f64> {
        match self {
            Metric::Ccr => record.ccr,
            Metric::Mae => record.mae,
            Metric::Qwk => record.qwk,
            Metric::OneOff => record.one_off,
        }
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ccr" => Ok(Metric::Ccr),
            "mae" => Ok(Metric::Mae),
            "qwk" => Ok(Metric::Qwk),
            "one_off" | "1-off" | "oneoff" => Ok(Metric::OneOff),
            other => Err(Error::InvalidParams(format!("unknown metric `{other}`"))),
        }
    }
}

/// One benchmark row: a method's scores on one resample of one dataset.
/// Failed runs carry `error` and null metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: String,
    pub dataset: String,
    pub resample_seed: u64,
    pub ccr: Option<f64>,
    pub mae: Option<f64>,
    pub qwk: Option<f64>,
    pub one_off: Option<f64>,
    pub fit_seconds: f64,
    pub predict_seconds: f64,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn success(
        method: impl Into<String>,
        dataset: impl Into<String>,
        resample_seed: u64,
        [ccr, mae, qwk, one_off]: [f64; 4],
        fit_seconds: f64,
        predict_seconds: f64,
    ) -> Self {
        Self {
            method: method.into(),
            dataset: dataset.into(),
            resample_seed,
            ccr: Some(ccr),
            mae: Some(mae),
            qwk: Some(qwk),
            one_off: Some(one_off),
            fit_seconds,
            predict_seconds,
            error: None,
        }
    }

    pub fn failure(
        method: impl Into<String>,
        dataset: impl Into<String>,
        resample_seed: u64,
        error: impl Into<String>,
    ) -> Self {
        Self {
            method: method.into(),
            dataset: dataset.into(),
            resample_seed,
            ccr: None,
            mae: None,
            qwk: None,
            one_off: None,
            fit_seconds: 0.0,
            predict_seconds: 0.0,
            error: Some(error.into()),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// A named method entry in a benchmark: ensemble settings plus the
/// parameter-space description resolved per dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub name: String,
    pub config: EnsembleConfig,
    pub space: SpaceSpec,
}

impl MethodSpec {
    pub fn new(name: impl Into<String>, config: EnsembleConfig) -> Self {
        Self {
            name: name.into(),
            config,
            space: SpaceSpec::default(),
        }
    }
}

/// Full benchmark output: metadata plus one row per
/// (method, dataset, resample).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub seed: u64,
    pub n_resamples: usize,
    pub methods: Vec<String>,
    pub datasets: Vec<String>,
    pub records: Vec<RunRecord>,
}

impl BenchmarkReport {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn run_one(
    method: &MethodSpec,
    dataset_name: &str,
    train: &TimeSeriesDataset,
    test: &TimeSeriesDataset,
    resample: u64,
    run_seed: u64,
) -> RunRecord {
    let space = match method.space.build(train.series_length) {
        Ok(space) => space,
        Err(e) => return RunRecord::failure(&method.name, dataset_name, resample, e.to_string()),
    };
    let mut config = method.config.clone();
    config.seed = run_seed;

    let fit_start = Instant::now();
    let ensemble = match guided_search(train, &space, &config) {
        Ok(e) => e,
        Err(e) => return RunRecord::failure(&method.name, dataset_name, resample, e.to_string()),
    };
    let fit_seconds = fit_start.elapsed().as_secs_f64();

    let predict_start = Instant::now();
    let predictions = match ensemble.predict_dataset(test) {
        Ok(p) => p,
        Err(e) => return RunRecord::failure(&method.name, dataset_name, resample, e.to_string()),
    };
    let predict_seconds = predict_start.elapsed().as_secs_f64();

    let scores = (|| -> Result<[f64; 4]> {
        Ok([
            metrics::ccr(&test.labels, &predictions)?,
            metrics::mae(&test.labels, &predictions)?,
            metrics::qwk(&test.labels, &predictions, test.num_classes)?,
            metrics::one_off(&test.labels, &predictions)?,
        ])
    })();
    match scores {
        Ok(values) => RunRecord::success(
            &method.name,
            dataset_name,
            resample,
            values,
            fit_seconds,
            predict_seconds,
        ),
        Err(e) => RunRecord::failure(&method.name, dataset_name, resample, e.to_string()),
    }
}

/// Runs every method on every dataset over `n_resamples` seeded resamples.
///
/// Resample 0 is the original split; resample `r > 0` re-splits the pooled
/// data with [`stratified_resample`] at seed `r`. Each run's ensemble seed
/// is `seed + r`, so rows are deterministic across invocations. Per-run
/// failures become failed rows rather than aborting the benchmark.
pub fn run_benchmark(
    methods: &[MethodSpec],
    datasets: &[(TimeSeriesDataset, TimeSeriesDataset)],
    n_resamples: usize,
    seed: u64,
) -> Vec<RunRecord> {
    #[allow(clippy::type_complexity)]
    let splits: Vec<(String, Vec<Result<(TimeSeriesDataset, TimeSeriesDataset)>>)> = datasets
        .iter()
        .map(|(train, test)| {
            let per_resample = (0..n_resamples as u64)
                .map(|r| {
                    let spec = ResampleSpec::for_split(train, test, r);
                    stratified_resample(train, test, &spec)
                })
                .collect();
            (train.name.clone(), per_resample)
        })
        .collect();

    let mut tasks = Vec::new();
    for (method_idx, method) in methods.iter().enumerate() {
        for (dataset_idx, (name, per_resample)) in splits.iter().enumerate() {
            for (r, split) in per_resample.iter().enumerate() {
                tasks.push((method_idx, dataset_idx, r, method, name, split));
            }
        }
    }

    let mut records: Vec<(usize, usize, usize, RunRecord)> = tasks
        .par_iter()
        .map(|&(method_idx, dataset_idx, r, method, name, split)| {
            let record = match split {
                Ok((train, test)) => run_one(
                    method,
                    name,
                    train,
                    test,
                    r as u64,
                    seed.wrapping_add(r as u64),
                ),
                Err(e) => RunRecord::failure(&method.name, name, r as u64, e.to_string()),
            };
            (method_idx, dataset_idx, r, record)
        })
        .collect();
    records.sort_by_key(|&(m, d, r, _)| (m, d, r));
    records.into_iter().map(|(_, _, _, rec)| rec).collect()
}

/// Mean and (population) standard deviation of a method's metric over its
/// successful resamples of one dataset.
pub fn aggregate_metric(
    records: &[RunRecord],
    method: &str,
    dataset: &str,
    metric: Metric,
) -> Option<(f64, f64)> {
    let values: Vec<f64> = records
        .iter()
        .filter(|r| r.method == method && r.dataset == dataset)
        .filter_map(|r| metric.extract(r))
        .collect();
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Some((mean, var.sqrt()))
}
