//! Dynamic ensemble selection for time-continuous emotion regression.
//!
//! A pool of per-feature-group ridge regressors predicts arousal and valence
//! frame by frame; at test time each frame is combined by rules that weight
//! or select pool members from the errors they made on the nearest
//! validation frames. The crate covers the full loop: synthetic multimodal
//! data, CSV manifests, standardization and context windowing,
//! missing-modality imputation, the selection rules themselves, a
//! cross-attention fusion baseline with a hand-derived backward pass, and an
//! experiment harness that aggregates concordance scores over person-disjoint
//! repetitions.
//!
//! Everything numeric is generic over [`scalar::Real`] (`f32` or `f64`);
//! the crate root re-exports `f64` aliases for the common entry points.

pub mod attention;
pub mod data;
pub mod error;
pub mod harness;
pub mod imputation;
pub mod metrics;
pub mod pool;
pub mod report;
pub mod scalar;
pub mod selection;

pub use error::{Error, Result};
pub use scalar::Real;

pub use data::synthetic::generate_synthetic;
pub use data::{Modality, Target};
pub use harness::{
    configure_threads, run_experiment, run_experiment_with, DataSource, RunOptions,
};
pub use imputation::ImputationMode;
pub use metrics::ccc;
pub use report::{render_report, render_sensitivity, sensitivity_summary, Method, ReportFormat};

/// `f64` aliases for the generic building blocks.
pub type Dataset = data::MultimodalDataset<f64>;
pub type SynthConfig = data::synthetic::SyntheticConfig;
pub type Config = harness::ExperimentConfig<f64>;
pub type Report = report::EvaluationReport<f64>;
pub type Pool = pool::RegressorPool<f64>;
pub type Meta = selection::MetaModel<f64>;
pub type Attention = attention::CrossAttentionParams<f64>;
