//! Multimodal dataset model: feature groups, person records, schemas.

pub mod manifest;
pub mod scale;
pub mod split;
pub mod synthetic;
pub mod window;

use std::fmt;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Input modality a feature group belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Audio,
    Video,
}

impl Modality {
    pub fn other(self) -> Modality {
        match self {
            Modality::Audio => Modality::Video,
            Modality::Video => Modality::Audio,
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modality::Audio => write!(f, "audio"),
            Modality::Video => write!(f, "video"),
        }
    }
}

/// Regression target dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Arousal,
    Valence,
}

impl Target {
    /// Column of this target in a label matrix.
    pub fn column(self) -> usize {
        match self {
            Target::Arousal => 0,
            Target::Valence => 1,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Arousal => write!(f, "arousal"),
            Target::Valence => write!(f, "valence"),
        }
    }
}

/// Declared name, modality, and width of one feature group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub name: String,
    pub modality: Modality,
    pub dim: usize,
}

/// Per-frame features of one group for one person. Rows are frames.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureGroup<T> {
    pub name: String,
    pub modality: Modality,
    pub values: Array2<T>,
}

impl<T: Real> FeatureGroup<T> {
    pub fn dim(&self) -> usize {
        self.values.ncols()
    }

    pub fn frames(&self) -> usize {
        self.values.nrows()
    }
}

/// All feature groups plus the label track of one person.
///
/// `labels` has one row per frame and two columns: arousal, valence.
#[derive(Clone, Debug, PartialEq)]
pub struct PersonRecord<T> {
    pub person_id: String,
    pub groups: Vec<FeatureGroup<T>>,
    pub labels: Array2<T>,
}

impl<T: Real> PersonRecord<T> {
    pub fn frames(&self) -> usize {
        self.labels.nrows()
    }

    pub fn group(&self, name: &str) -> Option<&FeatureGroup<T>> {
        self.groups.iter().find(|g| g.name == name)
    }

    /// Label series for one target.
    pub fn target_series(&self, target: Target) -> Vec<T> {
        self.labels.column(target.column()).to_vec()
    }

    fn validate(&self) -> Result<()> {
        if self.labels.ncols() != 2 {
            return Err(Error::SchemaMismatch(format!(
                "person `{}` has {} label columns, expected 2",
                self.person_id,
                self.labels.ncols()
            )));
        }
        for g in &self.groups {
            if g.frames() != self.frames() {
                return Err(Error::FrameCountMismatch(format!(
                    "person `{}`, group `{}`: {} feature rows vs {} label rows",
                    self.person_id,
                    g.name,
                    g.frames(),
                    self.frames()
                )));
            }
            if g.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "person `{}`, group `{}`",
                    self.person_id, g.name
                )));
            }
        }
        if self.labels.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "person `{}` labels",
                self.person_id
            )));
        }
        Ok(())
    }
}

/// A full dataset: schema plus one record per person.
#[derive(Clone, Debug, PartialEq)]
pub struct MultimodalDataset<T> {
    pub frame_rate_hz: f64,
    pub schema: Vec<GroupSpec>,
    pub persons: Vec<PersonRecord<T>>,
}

impl<T: Real> MultimodalDataset<T> {
    pub fn person_ids(&self) -> Vec<String> {
        self.persons.iter().map(|p| p.person_id.clone()).collect()
    }

    pub fn person(&self, id: &str) -> Option<&PersonRecord<T>> {
        self.persons.iter().find(|p| p.person_id == id)
    }

    /// Total per-frame feature width across all groups.
    pub fn feature_dim(&self) -> usize {
        self.schema.iter().map(|g| g.dim).sum()
    }

    /// Checks schema conformity, frame alignment, finiteness, and id
    /// uniqueness for every record.
    pub fn validate(&self) -> Result<()> {
        if self.schema.is_empty() {
            return Err(Error::Empty("schema".into()));
        }
        for (i, spec) in self.schema.iter().enumerate() {
            if spec.dim == 0 {
                return Err(Error::SchemaMismatch(format!(
                    "group `{}` has dim 0",
                    spec.name
                )));
            }
            if self.schema[..i].iter().any(|s| s.name == spec.name) {
                return Err(Error::SchemaMismatch(format!(
                    "duplicate group name `{}`",
                    spec.name
                )));
            }
        }
        for (i, person) in self.persons.iter().enumerate() {
            if self.persons[..i]
                .iter()
                .any(|p| p.person_id == person.person_id)
            {
                return Err(Error::SchemaMismatch(format!(
                    "duplicate person id `{}`",
                    person.person_id
                )));
            }
            if person.groups.len() != self.schema.len() {
                return Err(Error::SchemaMismatch(format!(
                    "person `{}` has {} groups, schema declares {}",
                    person.person_id,
                    person.groups.len(),
                    self.schema.len()
                )));
            }
            for (g, spec) in person.groups.iter().zip(self.schema.iter()) {
                if g.name != spec.name || g.modality != spec.modality {
                    return Err(Error::SchemaMismatch(format!(
                        "person `{}`: group `{}` ({}) where schema declares `{}` ({})",
                        person.person_id, g.name, g.modality, spec.name, spec.modality
                    )));
                }
                if g.dim() != spec.dim {
                    return Err(Error::SchemaMismatch(format!(
                        "person `{}`, group `{}`: dim {} vs declared {}",
                        person.person_id,
                        g.name,
                        g.dim(),
                        spec.dim
                    )));
                }
            }
            person.validate()?;
        }
        Ok(())
    }
}
