//! Deterministic synthetic multimodal benchmark data.
//!
//! Each person gets two latent tracks, arousal `a(t)` and valence `v(t)`,
//! built from three random-phase sinusoids and normalized to max |.| = 1.
//! Audio groups are driven by `a(t)` with a small cross leak of `v(t)`;
//! video groups mirror that. Labels are the latents themselves, so the
//! informative modality per target is known by construction.

use std::f64::consts::TAU;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{FeatureGroup, GroupSpec, Modality, MultimodalDataset, PersonRecord};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    pub persons: usize,
    pub frames: usize,
    pub groups: Vec<GroupSpec>,
    /// Additive Gaussian noise std per feature dimension.
    pub noise: f64,
    /// Cross-modal leak: weight of the other modality's latent.
    pub cross_informativeness: f64,
    pub frame_rate_hz: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            persons: 18,
            frames: 1500,
            groups: default_groups(),
            noise: 0.3,
            cross_informativeness: 0.15,
            frame_rate_hz: 25.0,
        }
    }
}

/// Three audio groups and two video groups, echoing a typical acoustic +
/// spectral vs appearance + geometric feature split.
pub fn default_groups() -> Vec<GroupSpec> {
    vec![
        GroupSpec {
            name: "acoustic".into(),
            modality: Modality::Audio,
            dim: 6,
        },
        GroupSpec {
            name: "mfcc".into(),
            modality: Modality::Audio,
            dim: 5,
        },
        GroupSpec {
            name: "mel".into(),
            modality: Modality::Audio,
            dim: 8,
        },
        GroupSpec {
            name: "appearance".into(),
            modality: Modality::Video,
            dim: 6,
        },
        GroupSpec {
            name: "geometric".into(),
            modality: Modality::Video,
            dim: 5,
        },
    ]
}

fn validate(config: &SyntheticConfig) -> Result<()> {
    if config.persons == 0 {
        return Err(Error::InvalidArgument("persons must be >= 1".into()));
    }
    if config.frames == 0 {
        return Err(Error::InvalidArgument("frames must be >= 1".into()));
    }
    if config.groups.is_empty() {
        return Err(Error::Empty("groups".into()));
    }
    if config.groups.iter().any(|g| g.dim == 0) {
        return Err(Error::InvalidArgument("group dim must be >= 1".into()));
    }
    if !(config.noise >= 0.0 && config.noise.is_finite()) {
        return Err(Error::InvalidArgument("noise must be finite and >= 0".into()));
    }
    if !(0.0..=1.0).contains(&config.cross_informativeness) {
        return Err(Error::InvalidArgument(
            "cross_informativeness must be in [0, 1]".into(),
        ));
    }
    if !(config.frame_rate_hz > 0.0) {
        return Err(Error::InvalidArgument("frame_rate_hz must be > 0".into()));
    }
    Ok(())
}

/// Sum of three sinusoids with random period and phase, max-abs normalized.
fn latent(rng: &mut ChaCha8Rng, frames: usize) -> Vec<f64> {
    let t_max = frames as f64;
    let mut waves = [(0.0f64, 0.0f64); 3];
    for w in &mut waves {
        let period = rng.random_range(t_max / 10.0..=t_max / 2.0);
        let phase = rng.random_range(0.0..TAU);
        *w = (period, phase);
    }
    let mut series: Vec<f64> = (0..frames)
        .map(|t| {
            waves
                .iter()
                .map(|&(period, phase)| (TAU * t as f64 / period + phase).sin())
                .sum()
        })
        .collect();
    let max = series.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-9);
    for v in &mut series {
        *v /= max;
    }
    series
}

/// Mixing coefficient with magnitude in [0.5, 1.5) and a random sign.
fn coefficient(rng: &mut ChaCha8Rng) -> f64 {
    let magnitude = rng.random_range(0.5..1.5);
    if rng.random::<bool>() {
        magnitude
    } else {
        -magnitude
    }
}

/// Generates a dataset. Identical `(config, seed)` pairs produce identical
/// datasets; the draw order is fixed (mixing vectors, then per person:
/// arousal latent, valence latent, per-group noise).
pub fn generate_synthetic<T: Real>(
    config: &SyntheticConfig,
    seed: u64,
) -> Result<MultimodalDataset<T>> {
    validate(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // One direct and one cross mixing vector per group, for the dataset.
    let mixing: Vec<(Vec<f64>, Vec<f64>)> = config
        .groups
        .iter()
        .map(|g| {
            let direct: Vec<f64> = (0..g.dim).map(|_| coefficient(&mut rng)).collect();
            let cross: Vec<f64> = (0..g.dim).map(|_| coefficient(&mut rng)).collect();
            (direct, cross)
        })
        .collect();

    let eps = config.cross_informativeness;
    let sigma = config.noise;
    let mut persons = Vec::with_capacity(config.persons);
    for p in 0..config.persons {
        let arousal = latent(&mut rng, config.frames);
        let valence = latent(&mut rng, config.frames);
        let mut groups = Vec::with_capacity(config.groups.len());
        for (spec, (direct, cross)) in config.groups.iter().zip(mixing.iter()) {
            let mut values = Array2::<T>::zeros((config.frames, spec.dim));
            for t in 0..config.frames {
                let (own, other) = match spec.modality {
                    Modality::Audio => (arousal[t], valence[t]),
                    Modality::Video => (valence[t], arousal[t]),
                };
                for j in 0..spec.dim {
                    let noise: f64 = rng.sample(StandardNormal);
                    let v = direct[j] * own + eps * cross[j] * other + sigma * noise;
                    values[[t, j]] = T::cast(v);
                }
            }
            groups.push(FeatureGroup {
                name: spec.name.clone(),
                modality: spec.modality,
                values,
            });
        }
        let mut labels = Array2::<T>::zeros((config.frames, 2));
        for t in 0..config.frames {
            labels[[t, 0]] = T::cast(arousal[t]);
            labels[[t, 1]] = T::cast(valence[t]);
        }
        persons.push(PersonRecord {
            person_id: format!("p{p:02}"),
            groups,
            labels,
        });
    }
    let dataset = MultimodalDataset {
        frame_rate_hz: config.frame_rate_hz,
        schema: config.groups.clone(),
        persons,
    };
    dataset.validate()?;
    Ok(dataset)
}
