//! The experiment harness: person-disjoint repetitions over a dataset,
//! missing-modality scenarios, five combination methods (plus the optional
//! cross-attention fusion baseline), aggregated into an [`EvaluationReport`].
//!
//! Per repetition: fit standardization and imputation means on the raw
//! training records, train one ridge regressor per feature group, build the
//! validation error table, then score every (scenario, target, method) cell
//! on the concatenated test persons. When `impute_validation` is set, each
//! disabling scenario also rebuilds the validation artifacts from imputed
//! validation records, so competence lookups see the degraded regressors.

use std::path::{Path, PathBuf};

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attention::{
    build_batches, evaluate_sequence, sequence_gold, train_attention, AttentionDims,
    AttentionTrainConfig, CrossAttentionParams,
};
use crate::data::manifest::load_dataset;
use crate::data::scale::Standardizer;
use crate::data::split::{
    make_split_plan_sized, Repetition, DEFAULT_REPETITIONS, DEFAULT_TEST_SIZE, DEFAULT_VAL_SIZE,
};
use crate::data::synthetic::{generate_synthetic, SyntheticConfig};
use crate::data::window::{frame_samples, FeatureLayout, FrameSample};
use crate::data::{Modality, MultimodalDataset, PersonRecord, Target};
use crate::error::{Error, Result};
use crate::imputation::{apply_imputation_record, compute_means, ImputationMode, ModalityMeans};
use crate::metrics::{ccc, squared_errors};
use crate::pool::{
    build_validation_table, load_predictions, train_pool, RegressorPool, ValidationTable,
    DEFAULT_LAMBDA,
};
use crate::report::{
    mean_std, EvaluationReport, Method, PoolValidationCell, ReportCell, REPORT_FORMAT_VERSION,
};
use crate::scalar::Real;
use crate::selection::{
    competence_region, ds_select, dw_combine, dws_filter, mean_combine, meta_train, meta_weights,
    neighbor_weights, regressor_weights, DistanceMetric, MetaConfig, MetaModel, NeighborIndex,
    ThresholdRule, DEFAULT_K,
};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_CONTEXT_LEN: usize = 8;

/// Where the experiment's data comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DataSource {
    /// Generated on the fly from the experiment seed.
    Synthetic {
        #[serde(default)]
        config: SyntheticConfig,
    },
    /// Loaded from a dataset manifest.
    Manifest { path: PathBuf },
    /// Precomputed regressor outputs: one validation and one test CSV (each
    /// with a modality-mapping sidecar), a single fixed split, one target.
    /// Competence lookups run in prediction space.
    Predictions {
        validation: PathBuf,
        test: PathBuf,
        target: Target,
    },
}

impl Default for DataSource {
    fn default() -> Self {
        DataSource::Synthetic {
            config: SyntheticConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    default,
    deny_unknown_fields,
    bound(deserialize = "T: Real + Deserialize<'de>")
)]
pub struct ExperimentConfig<T> {
    pub seed: u64,
    pub repetitions: usize,
    /// Test persons per repetition.
    pub test_size: usize,
    /// Validation persons per repetition.
    pub val_size: usize,
    pub context_len: usize,
    /// Ridge regularization strength.
    pub lambda: T,
    /// Competence region size.
    pub k: usize,
    pub distance: DistanceMetric,
    /// Discard rule used by the filtered selection method.
    pub threshold: ThresholdRule<T>,
    pub meta: MetaConfig<T>,
    /// Rebuild validation artifacts from imputed validation records per
    /// disabling scenario, so region errors reflect the missing modality.
    pub impute_validation: bool,
    pub scenarios: Vec<ImputationMode>,
    pub targets: Vec<Target>,
    /// Enables the fusion baseline when set.
    pub cross_attention: Option<AttentionTrainConfig<T>>,
    pub source: DataSource,
}

impl<T: Real> Default for ExperimentConfig<T> {
    fn default() -> Self {
        ExperimentConfig {
            seed: DEFAULT_SEED,
            repetitions: DEFAULT_REPETITIONS,
            test_size: DEFAULT_TEST_SIZE,
            val_size: DEFAULT_VAL_SIZE,
            context_len: DEFAULT_CONTEXT_LEN,
            lambda: T::cast(DEFAULT_LAMBDA),
            k: DEFAULT_K,
            distance: DistanceMetric::Euclidean,
            threshold: ThresholdRule::PoolMean,
            meta: MetaConfig::default(),
            impute_validation: true,
            scenarios: ImputationMode::full_matrix(),
            targets: vec![Target::Arousal, Target::Valence],
            cross_attention: None,
            source: DataSource::default(),
        }
    }
}

impl<T: Real + Serialize + for<'de> Deserialize<'de>> ExperimentConfig<T> {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig<T> =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

impl<T: Real> ExperimentConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be >= 1".into()));
        }
        if self.test_size == 0 || self.val_size == 0 {
            return Err(Error::Config("test_size and val_size must be >= 1".into()));
        }
        if self.context_len == 0 {
            return Err(Error::Config("context_len must be >= 1".into()));
        }
        if self.k == 0 {
            return Err(Error::Config("k must be >= 1".into()));
        }
        if !(self.lambda >= T::zero()) || !self.lambda.is_finite() {
            return Err(Error::Config("lambda must be finite and >= 0".into()));
        }
        if self.targets.is_empty() {
            return Err(Error::Config("targets must not be empty".into()));
        }
        for (i, t) in self.targets.iter().enumerate() {
            if self.targets[..i].contains(t) {
                return Err(Error::Config(format!("duplicate target `{t}`")));
            }
        }
        if self.scenarios.is_empty() {
            return Err(Error::Config("scenarios must not be empty".into()));
        }
        for (i, s) in self.scenarios.iter().enumerate() {
            if self.scenarios[..i].contains(s) {
                return Err(Error::Config(format!("duplicate scenario `{}`", s.key())));
            }
        }
        if self.cross_attention.is_some() && matches!(self.source, DataSource::Predictions { .. })
        {
            return Err(Error::Config(
                "cross attention needs feature records, not precomputed predictions".into(),
            ));
        }
        Ok(())
    }
}

/// Side outputs of a run that are not part of the report.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Write per-frame combination weights of the first repetition (weighted
    /// methods only) to this CSV.
    pub dump_weights: Option<PathBuf>,
}

/// Sizes the global worker pool; call once, before the first run.
pub fn configure_threads(jobs: usize) -> Result<()> {
    if jobs == 0 {
        return Err(Error::InvalidArgument("jobs must be >= 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .map_err(|e| Error::Config(format!("worker pool already configured: {e}")))
}

pub fn run_experiment<T>(config: &ExperimentConfig<T>) -> Result<EvaluationReport<T>>
where
    T: Real + Serialize + for<'de> Deserialize<'de>,
{
    run_experiment_with(config, &RunOptions::default())
}

pub fn run_experiment_with<T>(
    config: &ExperimentConfig<T>,
    options: &RunOptions,
) -> Result<EvaluationReport<T>>
where
    T: Real + Serialize + for<'de> Deserialize<'de>,
{
    config.validate()?;
    if options.dump_weights.is_some() && matches!(config.source, DataSource::Predictions { .. }) {
        return Err(Error::Config(
            "weight dump needs a record source, not precomputed predictions".into(),
        ));
    }
    match &config.source {
        DataSource::Synthetic { config: synth } => {
            let dataset = generate_synthetic::<T>(synth, config.seed)?;
            run_records(config, &dataset, options)
        }
        DataSource::Manifest { path } => {
            let dataset = load_dataset::<T>(path)?;
            run_records(config, &dataset, options)
        }
        DataSource::Predictions {
            validation,
            test,
            target,
        } => run_predictions(config, validation, test, *target),
    }
}

// Offsets keep the meta-learner and the fusion baseline on reproducible
// per-repetition streams that are decoupled from the data seed.
fn meta_seed(seed: u64, rep: usize) -> u64 {
    seed.wrapping_add(0x4d45_5441).wrapping_add(rep as u64)
}

fn attention_seed(seed: u64, rep: usize) -> u64 {
    seed.wrapping_add(0x4154_544e).wrapping_add(rep as u64)
}

fn method_list<T: Real>(config: &ExperimentConfig<T>) -> Vec<Method> {
    let mut methods = Method::selection_set();
    if config.cross_attention.is_some() {
        methods.push(Method::CrossAttention);
    }
    methods
}

/// Imputes (raw space), standardizes, and windows a set of records.
fn samples_for<T: Real>(
    records: &[&PersonRecord<T>],
    standardizer: &Standardizer<T>,
    layout: &FeatureLayout,
    mode: ImputationMode,
    means: Option<&ModalityMeans<T>>,
) -> Result<Vec<FrameSample<T>>> {
    let mut out = Vec::new();
    for record in records {
        let imputed = apply_imputation_record(record, mode, means)?;
        let standardized = standardizer.apply(&imputed)?;
        out.extend(frame_samples(&standardized, layout)?);
    }
    Ok(out)
}

fn features_of<T: Real>(samples: &[FrameSample<T>]) -> Array2<T> {
    let dim = samples.first().map(|s| s.x.len()).unwrap_or(0);
    let mut out = Array2::<T>::zeros((samples.len(), dim));
    for (r, s) in samples.iter().enumerate() {
        for (c, &v) in s.x.iter().enumerate() {
            out[[r, c]] = v;
        }
    }
    out
}

fn gather_rows<T: Real>(errors: &Array2<T>, rows: &[usize]) -> Array2<T> {
    let mut out = Array2::<T>::zeros((rows.len(), errors.ncols()));
    for (r, &idx) in rows.iter().enumerate() {
        out.row_mut(r).assign(&errors.row(idx));
    }
    out
}

/// Validation-side state one scenario's lookups run against.
struct ScenarioArtifacts<T> {
    index: NeighborIndex<T>,
    /// One table per configured target.
    tables: Vec<ValidationTable<T>>,
    metas: Vec<MetaModel<T>>,
}

#[allow(clippy::too_many_arguments)]
fn build_artifacts<T: Real>(
    config: &ExperimentConfig<T>,
    pools: &[RegressorPool<T>],
    val_records: &[&PersonRecord<T>],
    standardizer: &Standardizer<T>,
    layout: &FeatureLayout,
    mode: ImputationMode,
    means: Option<&ModalityMeans<T>>,
    rep_idx: usize,
) -> Result<ScenarioArtifacts<T>> {
    let samples = samples_for(val_records, standardizer, layout, mode, means)?;
    let index = NeighborIndex::build(features_of(&samples), config.distance)?;
    let mut tables = Vec::with_capacity(pools.len());
    let mut metas = Vec::with_capacity(pools.len());
    for pool in pools {
        let table = build_validation_table(pool, &samples, layout)?;
        let meta = meta_train(
            table.predictions.view(),
            &table.labels,
            &config.meta,
            meta_seed(config.seed, rep_idx),
        )?;
        tables.push(table);
        metas.push(meta.model);
    }
    Ok(ScenarioArtifacts {
        index,
        tables,
        metas,
    })
}

/// Per-repetition scores: `selection[scenario][target][method]` over the
/// selection set, optional `attention[scenario][target]`, and the unimputed
/// validation agreement per `pool_val[target][regressor]`.
struct RepOutcome<T> {
    selection: Vec<Vec<Vec<T>>>,
    attention: Vec<Vec<T>>,
    pool_val: Vec<Vec<T>>,
    dump_rows: Vec<String>,
}

fn alpha_row<T: Real>(
    rep: usize,
    scenario: &str,
    target: Target,
    method: Method,
    sample: &FrameSample<T>,
    alpha: &[T],
) -> String {
    use std::fmt::Write as _;
    let mut row = format!(
        "{rep},{scenario},{target},{method},{},{}",
        sample.person_id, sample.frame_index
    );
    for a in alpha {
        let _ = write!(row, ",{a}");
    }
    row
}

fn run_repetition<T: Real>(
    config: &ExperimentConfig<T>,
    dataset: &MultimodalDataset<T>,
    layout: &FeatureLayout,
    rep_idx: usize,
    repetition: &Repetition,
    dump: bool,
) -> Result<RepOutcome<T>> {
    let none_key = ImputationMode::None.key();
    let at = |e: Error, scenario: &str, stage: &str| e.in_experiment(rep_idx, scenario, stage);

    let lookup = |ids: &[String]| -> Result<Vec<&PersonRecord<T>>> {
        ids.iter()
            .map(|id| {
                dataset
                    .person(id)
                    .ok_or_else(|| Error::SchemaMismatch(format!("person `{id}` not in dataset")))
            })
            .collect()
    };
    let train = lookup(&repetition.train_ids)?;
    let val = lookup(&repetition.val_ids)?;
    let test = lookup(&repetition.test_ids)?;

    let standardizer = Standardizer::fit(train.iter().copied())
        .map_err(|e| at(e, &none_key, "standardizer fit"))?;
    let means =
        compute_means(train.iter().copied()).map_err(|e| at(e, &none_key, "imputation means"))?;
    let train_samples = samples_for(&train, &standardizer, layout, ImputationMode::None, None)
        .map_err(|e| at(e, &none_key, "train windowing"))?;

    let pools: Vec<RegressorPool<T>> = config
        .targets
        .iter()
        .map(|&target| train_pool(&train_samples, layout, target, config.lambda))
        .collect::<Result<_>>()
        .map_err(|e| at(e, &none_key, "pool training"))?;

    // Unimputed validation artifacts: the pool diagnostic, the `none`
    // scenario, and every scenario when validation-side imputation is off.
    let plain = build_artifacts(
        config,
        &pools,
        &val,
        &standardizer,
        layout,
        ImputationMode::None,
        None,
        rep_idx,
    )
    .map_err(|e| at(e, &none_key, "validation artifacts"))?;

    let mut pool_val = Vec::with_capacity(config.targets.len());
    for table in &plain.tables {
        let mut per_regressor = Vec::with_capacity(table.columns.len());
        for c in 0..table.columns.len() {
            let column: Vec<T> = table.predictions.column(c).to_vec();
            per_regressor.push(
                ccc(&table.labels, &column).map_err(|e| at(e, &none_key, "pool validation"))?,
            );
        }
        pool_val.push(per_regressor);
    }

    // Fusion baseline, trained once per repetition per target on the full
    // (unimputed) standardized training records.
    let attention_models: Vec<CrossAttentionParams<T>> = match &config.cross_attention {
        None => Vec::new(),
        Some(att_config) => {
            let modality_dim = |m: Modality| -> usize {
                dataset
                    .schema
                    .iter()
                    .filter(|g| g.modality == m)
                    .map(|g| g.dim)
                    .sum()
            };
            let dims = AttentionDims {
                d_a: modality_dim(Modality::Audio),
                d_v: modality_dim(Modality::Video),
                l: att_config.l,
            };
            let standardized: Vec<PersonRecord<T>> = train
                .iter()
                .map(|r| standardizer.apply(r))
                .collect::<Result<_>>()
                .map_err(|e| at(e, &none_key, "attention training"))?;
            config
                .targets
                .iter()
                .map(|&target| {
                    let mut batches = Vec::new();
                    for record in &standardized {
                        batches.extend(build_batches(
                            record,
                            target,
                            att_config.l,
                            att_config.clip_len,
                            att_config.stride,
                        )?);
                    }
                    let trained = train_attention(
                        &batches,
                        dims,
                        att_config,
                        attention_seed(config.seed, rep_idx),
                    )?;
                    Ok(trained.params)
                })
                .collect::<Result<_>>()
                .map_err(|e| at(e, &none_key, "attention training"))?
        }
    };

    let n_targets = config.targets.len();
    let n_methods = Method::selection_set().len();
    let mut selection = Vec::with_capacity(config.scenarios.len());
    let mut attention_scores = Vec::with_capacity(config.scenarios.len());
    let mut dump_rows = Vec::new();

    for &scenario in &config.scenarios {
        let key = scenario.key();
        let rebuilt;
        let artifacts = if scenario == ImputationMode::None || !config.impute_validation {
            &plain
        } else {
            rebuilt = build_artifacts(
                config,
                &pools,
                &val,
                &standardizer,
                layout,
                scenario,
                Some(&means),
                rep_idx,
            )
            .map_err(|e| at(e, &key, "validation artifacts"))?;
            &rebuilt
        };
        let test_samples = samples_for(&test, &standardizer, layout, scenario, Some(&means))
            .map_err(|e| at(e, &key, "test windowing"))?;

        let mut series = vec![vec![Vec::with_capacity(test_samples.len()); n_methods]; n_targets];
        let mut golds: Vec<Vec<T>> = vec![Vec::with_capacity(test_samples.len()); n_targets];
        for sample in &test_samples {
            // One neighbor lookup per frame, shared across targets.
            let hits = artifacts
                .index
                .query(&sample.x, config.k)
                .map_err(|e| at(e, &key, "neighbor query"))?;
            let indices: Vec<usize> = hits.iter().map(|&(i, _)| i).collect();
            let distances: Vec<T> = hits.iter().map(|&(_, d)| d).collect();
            let weights =
                neighbor_weights(&distances).map_err(|e| at(e, &key, "neighbor weights"))?;
            for (ti, (&target, pool)) in config.targets.iter().zip(pools.iter()).enumerate() {
                let preds = pool
                    .predict_frame(layout, sample)
                    .map_err(|e| at(e, &key, "pool prediction"))?;
                let region = gather_rows(&artifacts.tables[ti].errors, &indices);
                let mean_p = mean_combine(&preds).map_err(|e| at(e, &key, "combination"))?;
                let ds_p =
                    preds[ds_select(region.view()).map_err(|e| at(e, &key, "combination"))?];
                let alpha = regressor_weights(&weights, region.view())
                    .map_err(|e| at(e, &key, "combination"))?;
                let dw_p = dw_combine(&preds, &alpha).map_err(|e| at(e, &key, "combination"))?;
                let filtered = dws_filter(&weights, region.view(), config.threshold)
                    .map_err(|e| at(e, &key, "combination"))?;
                let dws_p =
                    dw_combine(&preds, &filtered.alpha).map_err(|e| at(e, &key, "combination"))?;
                let meta = meta_weights(&artifacts.metas[ti], &preds)
                    .map_err(|e| at(e, &key, "combination"))?;
                let meta_p =
                    dw_combine(&preds, &meta.alpha).map_err(|e| at(e, &key, "combination"))?;
                if dump {
                    dump_rows.push(alpha_row(rep_idx, &key, target, Method::Dw, sample, &alpha));
                    dump_rows.push(alpha_row(
                        rep_idx,
                        &key,
                        target,
                        Method::Dws,
                        sample,
                        &filtered.alpha,
                    ));
                    dump_rows.push(alpha_row(
                        rep_idx,
                        &key,
                        target,
                        Method::MetaDw,
                        sample,
                        &meta.alpha,
                    ));
                }
                for (mi, value) in [mean_p, ds_p, dw_p, dws_p, meta_p].into_iter().enumerate() {
                    series[ti][mi].push(value);
                }
                golds[ti].push(sample.y[target.column()]);
            }
        }

        let mut per_target = Vec::with_capacity(n_targets);
        for ti in 0..n_targets {
            let mut per_method = Vec::with_capacity(n_methods);
            for mi in 0..n_methods {
                per_method
                    .push(ccc(&golds[ti], &series[ti][mi]).map_err(|e| at(e, &key, "scoring"))?);
            }
            per_target.push(per_method);
        }
        selection.push(per_target);

        if attention_models.is_empty() {
            attention_scores.push(Vec::new());
        } else {
            let att_config = config.cross_attention.as_ref().expect("models imply config");
            let mut per_target = Vec::with_capacity(n_targets);
            for (ti, &target) in config.targets.iter().enumerate() {
                let mut preds = Vec::new();
                let mut gold = Vec::new();
                for record in &test {
                    let imputed = apply_imputation_record(record, scenario, Some(&means))
                        .map_err(|e| at(e, &key, "attention evaluation"))?;
                    let standardized = standardizer
                        .apply(&imputed)
                        .map_err(|e| at(e, &key, "attention evaluation"))?;
                    let eval = evaluate_sequence(
                        &attention_models[ti],
                        &standardized,
                        target,
                        att_config.clip_len,
                    )
                    .map_err(|e| at(e, &key, "attention evaluation"))?;
                    preds.extend(eval.predictions);
                    gold.extend(
                        sequence_gold(&standardized, target, att_config.l, att_config.clip_len)
                            .map_err(|e| at(e, &key, "attention evaluation"))?,
                    );
                }
                per_target.push(ccc(&gold, &preds).map_err(|e| at(e, &key, "scoring"))?);
            }
            attention_scores.push(per_target);
        }
    }

    Ok(RepOutcome {
        selection,
        attention: attention_scores,
        pool_val,
        dump_rows,
    })
}

fn write_weight_dump<T: Real>(
    path: &Path,
    layout: &FeatureLayout,
    outcome: &RepOutcome<T>,
) -> Result<()> {
    let mut text = String::from("repetition,scenario,target,method,person,frame");
    for slot in &layout.slots {
        text.push(',');
        text.push_str(&slot.name);
    }
    text.push('\n');
    for row in &outcome.dump_rows {
        text.push_str(row);
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn run_records<T>(
    config: &ExperimentConfig<T>,
    dataset: &MultimodalDataset<T>,
    options: &RunOptions,
) -> Result<EvaluationReport<T>>
where
    T: Real + Serialize + for<'de> Deserialize<'de>,
{
    dataset.validate()?;
    let layout = FeatureLayout::new(&dataset.schema, config.context_len)?;
    let ids = dataset.person_ids();
    let plan = make_split_plan_sized(
        &ids,
        config.repetitions,
        config.test_size,
        config.val_size,
        config.seed,
    )?;
    let dump_first = options.dump_weights.is_some();
    let outcomes: Vec<RepOutcome<T>> = plan
        .repetitions
        .par_iter()
        .enumerate()
        .map(|(i, rep)| run_repetition(config, dataset, &layout, i, rep, dump_first && i == 0))
        .collect::<Result<_>>()?;

    if let Some(path) = &options.dump_weights {
        write_weight_dump(path, &layout, &outcomes[0])?;
    }

    let methods = method_list(config);
    let mut cells = Vec::new();
    for (ti, &target) in config.targets.iter().enumerate() {
        for (si, scenario) in config.scenarios.iter().enumerate() {
            for (mi, &method) in methods.iter().enumerate() {
                let values: Vec<T> = outcomes
                    .iter()
                    .map(|o| match method {
                        Method::CrossAttention => o.attention[si][ti],
                        _ => o.selection[si][ti][mi],
                    })
                    .collect();
                let (mean_ccc, std_ccc) = mean_std(&values)?;
                cells.push(ReportCell {
                    target,
                    scenario: scenario.key(),
                    method,
                    mean_ccc,
                    std_ccc,
                    values,
                });
            }
        }
    }

    let mut pool_validation = Vec::new();
    for (ti, &target) in config.targets.iter().enumerate() {
        for (gi, group) in dataset.schema.iter().enumerate() {
            let values: Vec<T> = outcomes.iter().map(|o| o.pool_val[ti][gi]).collect();
            let (mean_ccc, std_ccc) = mean_std(&values)?;
            pool_validation.push(PoolValidationCell {
                target,
                group: group.name.clone(),
                modality: group.modality,
                mean_ccc,
                std_ccc,
                values,
            });
        }
    }

    Ok(EvaluationReport {
        format_version: REPORT_FORMAT_VERSION.to_string(),
        config: serde_json::to_value(config)?,
        methods,
        cells,
        pool_validation,
    })
}

/// Runs the selection set once over precomputed regressor outputs.
fn run_predictions<T>(
    config: &ExperimentConfig<T>,
    validation: &Path,
    test: &Path,
    target: Target,
) -> Result<EvaluationReport<T>>
where
    T: Real + Serialize + for<'de> Deserialize<'de>,
{
    let val = load_predictions::<T>(validation)?;
    let tst = load_predictions::<T>(test)?;
    if val.columns != tst.columns {
        let names = |cols: &[crate::pool::PredictionColumn]| {
            cols.iter()
                .map(|c| c.name.clone())
                .collect::<Vec<_>>()
                .join(",")
        };
        return Err(Error::SchemaMismatch(format!(
            "validation columns [{}] differ from test columns [{}]",
            names(&val.columns),
            names(&tst.columns)
        )));
    }
    let n = val.columns.len();
    if n == 0 {
        return Err(Error::Empty("prediction columns".into()));
    }

    let mut errors = Array2::<T>::zeros((val.values.nrows(), n));
    for c in 0..n {
        let column: Vec<T> = val.values.column(c).to_vec();
        let sq = squared_errors(&val.labels, &column)?;
        for (r, v) in sq.into_iter().enumerate() {
            errors[[r, c]] = v;
        }
    }
    let index = NeighborIndex::build(val.values.clone(), config.distance)?;
    let meta = meta_train(
        val.values.view(),
        &val.labels,
        &config.meta,
        meta_seed(config.seed, 0),
    )?
    .model;

    let methods = Method::selection_set();
    let mut series: Vec<Vec<T>> = vec![Vec::with_capacity(tst.values.nrows()); methods.len()];
    for r in 0..tst.values.nrows() {
        let preds: Vec<T> = tst.values.row(r).to_vec();
        let region = competence_region(&index, errors.view(), &preds, config.k)?;
        let weights = neighbor_weights(&region.distances)?;
        let mean_p = mean_combine(&preds)?;
        let ds_p = preds[ds_select(region.errors.view())?];
        let alpha = regressor_weights(&weights, region.errors.view())?;
        let dw_p = dw_combine(&preds, &alpha)?;
        let filtered = dws_filter(&weights, region.errors.view(), config.threshold)?;
        let dws_p = dw_combine(&preds, &filtered.alpha)?;
        let mw = meta_weights(&meta, &preds)?;
        let meta_p = dw_combine(&preds, &mw.alpha)?;
        for (mi, value) in [mean_p, ds_p, dw_p, dws_p, meta_p].into_iter().enumerate() {
            series[mi].push(value);
        }
    }

    let scenario = ImputationMode::None.key();
    let mut cells = Vec::with_capacity(methods.len());
    for (mi, &method) in methods.iter().enumerate() {
        let score = ccc(&tst.labels, &series[mi])?;
        let values = vec![score];
        let (mean_ccc, std_ccc) = mean_std(&values)?;
        cells.push(ReportCell {
            target,
            scenario: scenario.clone(),
            method,
            mean_ccc,
            std_ccc,
            values,
        });
    }

    let mut pool_validation = Vec::with_capacity(n);
    for (c, column) in val.columns.iter().enumerate() {
        let col: Vec<T> = val.values.column(c).to_vec();
        let score = ccc(&val.labels, &col)?;
        let values = vec![score];
        let (mean_ccc, std_ccc) = mean_std(&values)?;
        pool_validation.push(PoolValidationCell {
            target,
            group: column.name.clone(),
            modality: column.modality,
            mean_ccc,
            std_ccc,
            values,
        });
    }

    Ok(EvaluationReport {
        format_version: REPORT_FORMAT_VERSION.to_string(),
        config: serde_json::to_value(config)?,
        methods,
        cells,
        pool_validation,
    })
}
