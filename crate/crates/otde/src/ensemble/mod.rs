//! O-TDE ensemble construction: a Gaussian-process surrogate over the
//! transform-parameter space predicts LOO MAE for untried configurations
//! and guides which individual classifiers are trained and retained.

mod gp;
mod space;

pub use gp::{gp_fit, gp_predict_mean, GpSurrogate};
pub use space::{ParameterSpace, SpaceSpec};

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{loo_mae, IndividualOTDE};
use crate::dataset::{Series, TimeSeriesDataset};
use crate::error::{Error, Result};
use crate::sfa::TransformParams;

/// How member votes are combined into a label.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VoteMode {
    /// Weighted median of the votes; consistent with MAE-optimal decisions.
    #[default]
    Ordinal,
    /// Weighted plurality with lowest-class tie-break; serves as the
    /// nominal-TDE comparator in benchmarks.
    Nominal,
}

impl fmt::Display for VoteMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VoteMode::Ordinal => write!(f, "ordinal"),
            VoteMode::Nominal => write!(f, "nominal"),
        }
    }
}

impl FromStr for VoteMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ordinal" => Ok(VoteMode::Ordinal),
            "nominal" => Ok(VoteMode::Nominal),
            other => Err(Error::InvalidParams(format!("unknown mode `{other}`"))),
        }
    }
}

/// Search and ensemble-construction settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    /// Seeded-random configurations evaluated before the surrogate starts.
    pub n_initial: usize,
    /// Total configurations evaluated (including the initial ones).
    pub n_evals: usize,
    /// Members retained in the final ensemble.
    pub ensemble_size: usize,
    /// Unseen candidates scored by the surrogate per guided step.
    pub candidate_pool: usize,
    pub length_scale: f64,
    pub noise_variance: f64,
    /// Exponent of the `(1 - mae / (K - 1))` vote weight.
    pub weight_exponent: f64,
    /// Stratified subsample fraction for the LOO MAE estimate.
    pub loo_fraction: f64,
    pub mode: VoteMode,
    pub seed: u64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            n_initial: 10,
            n_evals: 50,
            ensemble_size: 10,
            candidate_pool: 100,
            length_scale: 0.5,
            noise_variance: 1e-3,
            weight_exponent: 4.0,
            loo_fraction: 0.7,
            mode: VoteMode::Ordinal,
            seed: 0,
        }
    }
}

/// One evaluated configuration and its estimated MAE, in evaluation order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub params: TransformParams,
    pub loo_mae: f64,
}

/// A retained member: fitted classifier, its LOO MAE estimate, and the
/// vote weight `(1 - mae / (K - 1))^e`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub model: IndividualOTDE,
    pub train_mae: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OTDEnsemble {
    /// Members sorted by ascending estimated train MAE.
    pub members: Vec<EnsembleMember>,
    pub num_classes: usize,
    pub mode: VoteMode,
    pub dimension_count: usize,
    pub series_length: usize,
    /// Every `(configuration, LOO MAE)` pair seen during the search.
    pub search_history: Vec<EvalRecord>,
}

fn vote_weight(mae: f64, num_classes: usize, exponent: f64) -> f64 {
    let span = (num_classes - 1) as f64;
    (1.0 - mae / span).max(0.0).powf(exponent)
}

/// Draws a configuration not in `seen`, or `None` when the space is
/// exhausted. Falls back to enumeration when rejection sampling stalls.
fn sample_unseen(
    space: &ParameterSpace,
    seen: &HashSet<TransformParams>,
    rng: &mut ChaCha8Rng,
) -> Option<TransformParams> {
    if seen.len() >= space.len() {
        return None;
    }
    for _ in 0..64 {
        let candidate = space.sample(rng);
        if !seen.contains(&candidate) {
            return Some(candidate);
        }
    }
    let remaining: Vec<TransformParams> = space
        .enumerate()
        .into_iter()
        .filter(|p| !seen.contains(p))
        .collect();
    if remaining.is_empty() {
        None
    } else {
        Some(remaining[rng.random_range(0..remaining.len())].clone())
    }
}

/// Builds the ensemble.
///
/// Evaluates `n_initial` seeded-random configurations, then repeatedly fits
/// the surrogate on all `(config, MAE)` pairs and evaluates the unseen
/// candidate with the lowest predicted MAE until `n_evals` evaluations (or
/// the whole space) are done. The `ensemble_size` configurations with the
/// lowest observed MAE are refitted on the full training set and weighted.
/// Bit-reproducible for a fixed seed.
pub fn guided_search(
    train: &TimeSeriesDataset,
    space: &ParameterSpace,
    config: &EnsembleConfig,
) -> Result<OTDEnsemble> {
    if config.ensemble_size == 0 || config.n_evals == 0 {
        return Err(Error::InvalidParams(
            "n_evals and ensemble_size must be positive".into(),
        ));
    }
    if config.n_initial > config.n_evals {
        return Err(Error::InvalidParams(
            "n_initial cannot exceed n_evals".into(),
        ));
    }
    let space_len = space.len();
    if space_len == 0 {
        return Err(Error::InvalidParams("parameter space is empty".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let budget = config.n_evals.min(space_len);
    let mut seen: HashSet<TransformParams> = HashSet::new();
    let mut history: Vec<EvalRecord> = Vec::with_capacity(budget);

    // Initial phase: draw configs and their LOO seeds sequentially so the
    // stream is fixed, then evaluate in parallel.
    let mut initial = Vec::new();
    while initial.len() < config.n_initial.min(budget) {
        let Some(params) = sample_unseen(space, &seen, &mut rng) else {
            break;
        };
        seen.insert(params);
        initial.push((params, rng.random::<u64>()));
    }
    let evaluated: Vec<f64> = initial
        .par_iter()
        .map(|(params, loo_seed)| loo_mae(train, params, config.loo_fraction, *loo_seed))
        .collect::<Result<_>>()?;
    for ((params, _), mae) in initial.iter().zip(evaluated) {
        history.push(EvalRecord {
            params: *params,
            loo_mae: mae,
        });
    }

    // Guided phase: one surrogate-chosen evaluation at a time.
    while history.len() < budget {
        let configs: Vec<Vec<f64>> = history
            .iter()
            .map(|r| space.encode(&r.params))
            .collect::<Result<_>>()?;
        let maes: Vec<f64> = history.iter().map(|r| r.loo_mae).collect();
        let surrogate = gp_fit(configs, maes, config.length_scale, config.noise_variance)?;

        let mut pool_seen = seen.clone();
        let mut pool = Vec::with_capacity(config.candidate_pool);
        while pool.len() < config.candidate_pool {
            let Some(candidate) = sample_unseen(space, &pool_seen, &mut rng) else {
                break;
            };
            pool_seen.insert(candidate);
            pool.push(candidate);
        }
        if pool.is_empty() {
            break;
        }
        let mut chosen = pool[0];
        let mut best = surrogate.predict_mean(&space.encode(&pool[0])?);
        for candidate in &pool[1..] {
            let predicted = surrogate.predict_mean(&space.encode(candidate)?);
            if predicted < best {
                best = predicted;
                chosen = *candidate;
            }
        }
        seen.insert(chosen);
        let loo_seed = rng.random::<u64>();
        let mae = loo_mae(train, &chosen, config.loo_fraction, loo_seed)?;
        history.push(EvalRecord {
            params: chosen,
            loo_mae: mae,
        });
    }

    // Retain the lowest-MAE configurations and fit them on the full set.
    let mut order: Vec<usize> = (0..history.len()).collect();
    order.sort_by(|&a, &b| history[a].loo_mae.partial_cmp(&history[b].loo_mae).unwrap());
    order.truncate(config.ensemble_size);

    let members: Vec<EnsembleMember> = order
        .par_iter()
        .map(|&i| {
            let record = &history[i];
            let model = IndividualOTDE::fit(train, record.params)?;
            Ok(EnsembleMember {
                model,
                train_mae: record.loo_mae,
                weight: vote_weight(record.loo_mae, train.num_classes, config.weight_exponent),
            })
        })
        .collect::<Result<_>>()?;

    Ok(OTDEnsemble {
        members,
        num_classes: train.num_classes,
        mode: config.mode,
        dimension_count: train.dimension_count,
        series_length: train.series_length,
        search_history: history,
    })
}

impl OTDEnsemble {
    /// Combines the members' weighted votes into one label.
    ///
    /// Ordinal mode takes the weighted median: the smallest class whose
    /// cumulative vote weight reaches half the total. Nominal mode takes
    /// the heaviest class, ties to the lowest class.
    pub fn predict(&self, x: &Series) -> Result<usize> {
        let mut scores = vec![0.0f64; self.num_classes];
        for member in &self.members {
            let label = member.model.predict_one(x)?;
            scores[label] += member.weight;
        }
        Ok(match self.mode {
            VoteMode::Ordinal => {
                let total: f64 = scores.iter().sum();
                let mut cumulative = 0.0;
                let mut chosen = self.num_classes - 1;
                for (class, &score) in scores.iter().enumerate() {
                    cumulative += score;
                    if 2.0 * cumulative >= total {
                        chosen = class;
                        break;
                    }
                }
                chosen
            }
            VoteMode::Nominal => {
                let mut chosen = 0;
                for (class, &score) in scores.iter().enumerate() {
                    if score > scores[chosen] {
                        chosen = class;
                    }
                }
                chosen
            }
        })
    }

    /// Element-wise [`predict`](Self::predict), order preserved.
    pub fn predict_dataset(&self, data: &TimeSeriesDataset) -> Result<Vec<usize>> {
        if data.dimension_count != self.dimension_count
            || data.series_length != self.series_length
        {
            return Err(Error::ShapeMismatch {
                expected_dims: self.dimension_count,
                expected_len: self.series_length,
                got_dims: data.dimension_count,
                got_len: data.series_length,
            });
        }
        data.series.iter().map(|x| self.predict(x)).collect()
    }

    /// Best (lowest) LOO MAE seen during the search.
    pub fn best_search_mae(&self) -> Option<f64> {
        self.members.first().map(|m| m.train_mae)
    }

    /// Persists the ensemble as a JSON manifest plus one model file per
    /// member in `dir`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let mut entries = Vec::with_capacity(self.members.len());
        for (i, member) in self.members.iter().enumerate() {
            let file = format!("member_{i:03}.json");
            member.model.save(dir.join(&file))?;
            entries.push(ManifestMember {
                file,
                train_mae: member.train_mae,
                weight: member.weight,
            });
        }
        let manifest = Manifest {
            num_classes: self.num_classes,
            mode: self.mode,
            dimension_count: self.dimension_count,
            series_length: self.series_length,
            members: entries,
            search_history: self.search_history.clone(),
        };
        std::fs::write(
            dir.join("manifest.json"),
            serde_json::to_string_pretty(&manifest)?,
        )?;
        Ok(())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let text = std::fs::read_to_string(dir.join("manifest.json"))?;
        let manifest: Manifest = serde_json::from_str(&text)?;
        let members = manifest
            .members
            .iter()
            .map(|entry| {
                Ok(EnsembleMember {
                    model: IndividualOTDE::load(dir.join(&entry.file))?,
                    train_mae: entry.train_mae,
                    weight: entry.weight,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OTDEnsemble {
            members,
            num_classes: manifest.num_classes,
            mode: manifest.mode,
            dimension_count: manifest.dimension_count,
            series_length: manifest.series_length,
            search_history: manifest.search_history,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct ManifestMember {
    file: String,
    train_mae: f64,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    num_classes: usize,
    mode: VoteMode,
    dimension_count: usize,
    series_length: usize,
    members: Vec<ManifestMember>,
    #[serde(default)]
    search_history: Vec<EvalRecord>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::Rng as _;

    fn sinusoid_dataset(n_per_class: usize, len: usize, seed: u64) -> TimeSeriesDataset {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut series = Vec::new();
        let mut labels = Vec::new();
        for class in 0..3usize {
            for _ in 0..n_per_class {
                let freq = (class + 2) as f64;
                let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let channel: Vec<f64> = (0..len)
                    .map(|t| {
                        (std::f64::consts::TAU * freq * t as f64 / len as f64 + phase).sin()
                            + rng.random_range(-0.1..0.1)
                    })
                    .collect();
                series.push(vec![channel]);
                labels.push(class);
            }
        }
        TimeSeriesDataset::new("sinusoids", series, labels, 3).unwrap()
    }

    fn tiny_space() -> ParameterSpace {
        ParameterSpace {
            window_lengths: vec![8, 10, 12],
            coefficient_counts: vec![2],
            alphabet_sizes: vec![4],
            normalize_options: vec![false],
            numerosity_options: vec![true],
        }
    }

    fn member_with(vote: usize, weight: f64, train: &TimeSeriesDataset) -> EnsembleMember {
        // A 1-instance training set makes the member vote a fixed class.
        let single = TimeSeriesDataset::new(
            "one",
            vec![train.series[0].clone(), train.series[1].clone()],
            vec![vote, vote],
            train.num_classes,
        )
        .unwrap();
        let params = TransformParams {
            window_length: 8,
            coefficient_count: 2,
            alphabet_size: 4,
            normalize: false,
            numerosity_reduction: true,
        };
        EnsembleMember {
            model: IndividualOTDE::fit(&single, params).unwrap(),
            train_mae: 0.0,
            weight,
        }
    }

    fn fixed_vote_ensemble(
        votes_and_weights: &[(usize, f64)],
        mode: VoteMode,
        train: &TimeSeriesDataset,
    ) -> OTDEnsemble {
        OTDEnsemble {
            members: votes_and_weights
                .iter()
                .map(|&(v, w)| member_with(v, w, train))
                .collect(),
            num_classes: train.num_classes,
            mode,
            dimension_count: train.dimension_count,
            series_length: train.series_length,
            search_history: Vec::new(),
        }
    }

    #[test]
    fn weight_is_monotone_in_mae() {
        let a = vote_weight(0.1, 5, 4.0);
        let b = vote_weight(0.5, 5, 4.0);
        let c = vote_weight(3.9, 5, 4.0);
        assert!(a > b && b > c);
        assert!(vote_weight(0.0, 5, 4.0) == 1.0);
        assert!(vote_weight(4.0, 5, 4.0) == 0.0);
    }

    #[test]
    fn single_member_search_equals_direct_fit() {
        let ds = sinusoid_dataset(4, 24, 1);
        let space = ParameterSpace {
            window_lengths: vec![10],
            coefficient_counts: vec![2],
            alphabet_sizes: vec![4],
            normalize_options: vec![false],
            numerosity_options: vec![true],
        };
        let config = EnsembleConfig {
            n_initial: 1,
            n_evals: 1,
            ensemble_size: 1,
            ..EnsembleConfig::default()
        };
        let ens = guided_search(&ds, &space, &config).unwrap();
        assert_eq!(ens.members.len(), 1);
        let direct = IndividualOTDE::fit(&ds, ens.members[0].model.params).unwrap();
        for x in &ds.series {
            assert_eq!(ens.predict(x).unwrap(), direct.predict_one(x).unwrap());
        }
    }

    #[test]
    fn small_space_exhausts_early() {
        let ds = sinusoid_dataset(4, 24, 2);
        let space = tiny_space();
        assert_eq!(space.len(), 3);
        let config = EnsembleConfig {
            n_initial: 2,
            n_evals: 10,
            ensemble_size: 10,
            ..EnsembleConfig::default()
        };
        let ens = guided_search(&ds, &space, &config).unwrap();
        assert_eq!(ens.search_history.len(), 3);
        assert_eq!(ens.members.len(), 3);
    }

    #[test]
    fn exhaustive_search_retains_lowest_mae_set() {
        let ds = sinusoid_dataset(4, 30, 3);
        let space = ParameterSpace {
            window_lengths: vec![6, 8, 10, 12, 14, 16],
            coefficient_counts: vec![2, 3],
            alphabet_sizes: vec![4],
            normalize_options: vec![false],
            numerosity_options: vec![true],
        };
        let config = EnsembleConfig {
            n_initial: 4,
            n_evals: space.len(),
            ensemble_size: 3,
            ..EnsembleConfig::default()
        };
        let ens = guided_search(&ds, &space, &config).unwrap();
        assert_eq!(ens.search_history.len(), space.len());

        let mut order: Vec<usize> = (0..ens.search_history.len()).collect();
        order.sort_by(|&a, &b| {
            ens.search_history[a]
                .loo_mae
                .partial_cmp(&ens.search_history[b].loo_mae)
                .unwrap()
        });
        let expected: Vec<TransformParams> = order
            .iter()
            .take(3)
            .map(|&i| ens.search_history[i].params)
            .collect();
        let got: Vec<TransformParams> = ens.members.iter().map(|m| m.model.params).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn search_is_bit_reproducible() {
        let ds = sinusoid_dataset(3, 24, 4);
        let space = tiny_space();
        let config = EnsembleConfig {
            n_initial: 2,
            n_evals: 3,
            ensemble_size: 2,
            seed: 99,
            ..EnsembleConfig::default()
        };
        let a = guided_search(&ds, &space, &config).unwrap();
        let b = guided_search(&ds, &space, &config).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn members_sorted_by_mae_and_weights_monotone() {
        let ds = sinusoid_dataset(4, 28, 5);
        let space = ParameterSpace {
            window_lengths: vec![6, 8, 10, 12, 14],
            coefficient_counts: vec![2, 3],
            alphabet_sizes: vec![4],
            normalize_options: vec![false, true],
            numerosity_options: vec![true],
        };
        let config = EnsembleConfig {
            n_initial: 5,
            n_evals: 12,
            ensemble_size: 5,
            seed: 7,
            ..EnsembleConfig::default()
        };
        let ens = guided_search(&ds, &space, &config).unwrap();
        for pair in ens.members.windows(2) {
            assert!(pair[0].train_mae <= pair[1].train_mae);
            if pair[0].train_mae < pair[1].train_mae {
                assert!(pair[0].weight > pair[1].weight);
            }
        }
    }

    #[test]
    fn vote_rules_hand_case() {
        let ds = sinusoid_dataset(2, 24, 6);
        // weights 0.5/0.3/0.2 voting classes 0/2/2: cumulative weight at
        // class 0 is exactly half the total, so both rules pick 0.
        let votes = [(0usize, 0.5), (2, 0.3), (2, 0.2)];
        let ordinal = fixed_vote_ensemble(&votes, VoteMode::Ordinal, &ds);
        let nominal = fixed_vote_ensemble(&votes, VoteMode::Nominal, &ds);
        let x = &ds.series[0];
        assert_eq!(ordinal.predict(x).unwrap(), 0);
        assert_eq!(nominal.predict(x).unwrap(), 0);
    }

    #[test]
    fn vote_median_splits_toward_majority_weight() {
        let ds = sinusoid_dataset(2, 24, 7);
        let votes = [(0usize, 0.4), (2, 0.35), (2, 0.25)];
        let ordinal = fixed_vote_ensemble(&votes, VoteMode::Ordinal, &ds);
        let nominal = fixed_vote_ensemble(&votes, VoteMode::Nominal, &ds);
        let x = &ds.series[0];
        // class 0 holds 0.4 < 0.5 of the weight; the median moves to 2.
        assert_eq!(ordinal.predict(x).unwrap(), 2);
        // plurality by weight: class 2 carries 0.6.
        assert_eq!(nominal.predict(x).unwrap(), 2);
    }

    #[test]
    fn unanimous_votes_win_in_both_modes() {
        let ds = sinusoid_dataset(2, 24, 8);
        for mode in [VoteMode::Ordinal, VoteMode::Nominal] {
            let ens = fixed_vote_ensemble(&[(1, 0.2), (1, 0.5), (1, 0.3)], mode, &ds);
            assert_eq!(ens.predict(&ds.series[0]).unwrap(), 1);
        }
    }

    #[test]
    fn weighted_median_is_translation_equivariant() {
        let ds = sinusoid_dataset(2, 24, 9);
        let base = [(0usize, 0.25), (1, 0.4), (2, 0.35)];
        let shifted: Vec<(usize, f64)> = base.iter().map(|&(v, w)| (v + 1, w)).collect();
        let wide = TimeSeriesDataset::new(
            "wide",
            ds.series.clone(),
            vec![0; ds.len()],
            4,
        )
        .unwrap();
        let a = fixed_vote_ensemble(&base, VoteMode::Ordinal, &wide);
        let b = fixed_vote_ensemble(&shifted, VoteMode::Ordinal, &wide);
        let x = &ds.series[0];
        assert_eq!(a.predict(x).unwrap() + 1, b.predict(x).unwrap());
    }

    #[test]
    fn predict_dataset_checks_shape() {
        let ds = sinusoid_dataset(3, 24, 10);
        let space = tiny_space();
        let config = EnsembleConfig {
            n_initial: 1,
            n_evals: 1,
            ensemble_size: 1,
            ..EnsembleConfig::default()
        };
        let ens = guided_search(&ds, &space, &config).unwrap();
        let other = sinusoid_dataset(2, 30, 11);
        assert!(matches!(
            ens.predict_dataset(&other),
            Err(Error::ShapeMismatch { .. })
        ));
        let preds = ens.predict_dataset(&ds).unwrap();
        assert_eq!(preds.len(), ds.len());
    }

    #[test]
    fn save_load_round_trip() {
        let ds = sinusoid_dataset(3, 24, 12);
        let space = tiny_space();
        let config = EnsembleConfig {
            n_initial: 2,
            n_evals: 3,
            ensemble_size: 2,
            ..EnsembleConfig::default()
        };
        let ens = guided_search(&ds, &space, &config).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model");
        ens.save(&path).unwrap();
        let back = OTDEnsemble::load(&path).unwrap();
        assert_eq!(ens, back);
    }
}
