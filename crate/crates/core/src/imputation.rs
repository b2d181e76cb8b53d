//! Missing-modality simulation: replace one modality's features with zeros
//! or with per-dimension training means. Replacement happens in raw feature
//! space, before standardization.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::window::{FeatureLayout, FrameSample};
use crate::data::{FeatureGroup, Modality, PersonRecord};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// What to do with a disabled modality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ImputationMode {
    /// Both modalities stay available.
    None,
    /// The modality's features become zero.
    Zero { modality: Modality },
    /// The modality's features become their per-dimension training means.
    Mean { modality: Modality },
}

impl ImputationMode {
    pub fn disabled_modality(self) -> Option<Modality> {
        match self {
            ImputationMode::None => None,
            ImputationMode::Zero { modality } | ImputationMode::Mean { modality } => {
                Some(modality)
            }
        }
    }

    /// Stable short key for file names and CSV cells.
    pub fn key(self) -> String {
        match self {
            ImputationMode::None => "none".into(),
            ImputationMode::Zero { modality } => format!("zero_{modality}"),
            ImputationMode::Mean { modality } => format!("mean_{modality}"),
        }
    }

    /// The full scenario matrix: no imputation plus both kinds for both
    /// modalities.
    pub fn full_matrix() -> Vec<ImputationMode> {
        vec![
            ImputationMode::None,
            ImputationMode::Zero {
                modality: Modality::Audio,
            },
            ImputationMode::Mean {
                modality: Modality::Audio,
            },
            ImputationMode::Zero {
                modality: Modality::Video,
            },
            ImputationMode::Mean {
                modality: Modality::Video,
            },
        ]
    }
}

impl fmt::Display for ImputationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImputationMode::None => write!(f, "all modalities"),
            ImputationMode::Zero { modality } => write!(f, "{modality} disabled (zero)"),
            ImputationMode::Mean { modality } => write!(f, "{modality} disabled (mean)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupMean<T> {
    pub name: String,
    pub modality: Modality,
    pub mean: Vec<T>,
}

/// Per-dimension raw training means for every group.
#[derive(Clone, Debug, PartialEq)]
pub struct ModalityMeans<T> {
    pub groups: Vec<GroupMean<T>>,
}

impl<T: Real> ModalityMeans<T> {
    pub fn group(&self, name: &str) -> Option<&GroupMean<T>> {
        self.groups.iter().find(|g| g.name == name)
    }
}

/// Computes per-dimension raw means over all frames of all given records.
pub fn compute_means<'a, T, I>(records: I) -> Result<ModalityMeans<T>>
where
    T: Real + 'a,
    I: IntoIterator<Item = &'a PersonRecord<T>>,
{
    let records: Vec<&PersonRecord<T>> = records.into_iter().collect();
    let first = records
        .first()
        .ok_or_else(|| Error::Empty("training records".into()))?;
    let total_frames: usize = records.iter().map(|r| r.frames()).sum();
    if total_frames == 0 {
        return Err(Error::Empty("training frames".into()));
    }
    let n = T::cast_usize(total_frames);
    let mut groups = Vec::with_capacity(first.groups.len());
    for (gi, proto) in first.groups.iter().enumerate() {
        let mut mean = vec![T::zero(); proto.dim()];
        for rec in &records {
            let g = &rec.groups[gi];
            if g.name != proto.name || g.dim() != proto.dim() {
                return Err(Error::SchemaMismatch(format!(
                    "person `{}` group `{}` does not match `{}`",
                    rec.person_id, g.name, proto.name
                )));
            }
            for row in g.values.rows() {
                for (m, &v) in mean.iter_mut().zip(row.iter()) {
                    *m += v;
                }
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        groups.push(GroupMean {
            name: proto.name.clone(),
            modality: proto.modality,
            mean,
        });
    }
    Ok(ModalityMeans { groups })
}

/// Applies a mode to a whole record (raw feature space).
pub fn apply_imputation_record<T: Real>(
    record: &PersonRecord<T>,
    mode: ImputationMode,
    means: Option<&ModalityMeans<T>>,
) -> Result<PersonRecord<T>> {
    let target = match mode.disabled_modality() {
        None => return Ok(record.clone()),
        Some(m) => m,
    };
    let mut groups = Vec::with_capacity(record.groups.len());
    for g in &record.groups {
        if g.modality != target {
            groups.push(g.clone());
            continue;
        }
        let mut values = g.values.clone();
        match mode {
            ImputationMode::Zero { .. } => values.fill(T::zero()),
            ImputationMode::Mean { .. } => {
                let means = means.ok_or_else(|| {
                    Error::InvalidArgument("mean imputation needs training means".into())
                })?;
                let gm = means
                    .group(&g.name)
                    .ok_or_else(|| Error::UnknownGroup(g.name.clone()))?;
                if gm.mean.len() != g.dim() {
                    return Err(Error::SchemaMismatch(format!(
                        "group `{}`: mean width {} vs dim {}",
                        g.name,
                        gm.mean.len(),
                        g.dim()
                    )));
                }
                for mut row in values.rows_mut() {
                    for (v, &m) in row.iter_mut().zip(gm.mean.iter()) {
                        *v = m;
                    }
                }
            }
            ImputationMode::None => unreachable!(),
        }
        groups.push(FeatureGroup {
            name: g.name.clone(),
            modality: g.modality,
            values,
        });
    }
    Ok(PersonRecord {
        person_id: record.person_id.clone(),
        groups,
        labels: record.labels.clone(),
    })
}

/// Applies a mode to one windowed sample: the disabled modality's spans are
/// overwritten in place of the window, means broadcast per context frame.
pub fn apply_imputation_sample<T: Real>(
    sample: &FrameSample<T>,
    layout: &FeatureLayout,
    mode: ImputationMode,
    means: Option<&ModalityMeans<T>>,
) -> Result<FrameSample<T>> {
    let target = match mode.disabled_modality() {
        None => return Ok(sample.clone()),
        Some(m) => m,
    };
    let mut out = sample.clone();
    for slot in layout.slots.iter().filter(|s| s.modality == target) {
        let span = &mut out.x[slot.offset..slot.offset + slot.len];
        match mode {
            ImputationMode::Zero { .. } => span.fill(T::zero()),
            ImputationMode::Mean { .. } => {
                let means = means.ok_or_else(|| {
                    Error::InvalidArgument("mean imputation needs training means".into())
                })?;
                let gm = means
                    .group(&slot.name)
                    .ok_or_else(|| Error::UnknownGroup(slot.name.clone()))?;
                if gm.mean.len() != slot.dim {
                    return Err(Error::SchemaMismatch(format!(
                        "group `{}`: mean width {} vs dim {}",
                        slot.name,
                        gm.mean.len(),
                        slot.dim
                    )));
                }
                for (i, v) in span.iter_mut().enumerate() {
                    *v = gm.mean[i % slot.dim];
                }
            }
            ImputationMode::None => unreachable!(),
        }
    }
    Ok(out)
}
