//! Per-dimension z-score standardization fitted on training records.

use crate::data::{FeatureGroup, PersonRecord};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Std below this is treated as a constant dimension and replaced by 1.
const STD_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct GroupStats<T> {
    pub name: String,
    pub mean: Vec<T>,
    pub std: Vec<T>,
}

/// Frozen per-dimension statistics, aligned with the dataset schema.
#[derive(Clone, Debug, PartialEq)]
pub struct Standardizer<T> {
    pub groups: Vec<GroupStats<T>>,
}

impl<T: Real> Standardizer<T> {
    /// Fits population mean/std per feature dimension over all frames of
    /// all given records.
    pub fn fit<'a, I>(records: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a PersonRecord<T>>,
        T: 'a,
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
        let floor = T::cast(STD_FLOOR);
        let mut groups = Vec::with_capacity(first.groups.len());
        for (gi, proto) in first.groups.iter().enumerate() {
            let dim = proto.dim();
            let mut mean = vec![T::zero(); dim];
            for rec in &records {
                let g = &rec.groups[gi];
                if g.name != proto.name || g.dim() != dim {
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
            let mut var = vec![T::zero(); dim];
            for rec in &records {
                for row in rec.groups[gi].values.rows() {
                    for ((s, &m), &v) in var.iter_mut().zip(mean.iter()).zip(row.iter()) {
                        let d = v - m;
                        *s += d * d;
                    }
                }
            }
            let std = var
                .into_iter()
                .map(|s| {
                    let sd = (s / n).sqrt();
                    if sd < floor {
                        T::one()
                    } else {
                        sd
                    }
                })
                .collect();
            groups.push(GroupStats {
                name: proto.name.clone(),
                mean,
                std,
            });
        }
        Ok(Standardizer { groups })
    }

    /// Applies `(v - mean) / std` per dimension, returning a new record.
    pub fn apply(&self, record: &PersonRecord<T>) -> Result<PersonRecord<T>> {
        if record.groups.len() != self.groups.len() {
            return Err(Error::SchemaMismatch(format!(
                "person `{}` has {} groups, standardizer has {}",
                record.person_id,
                record.groups.len(),
                self.groups.len()
            )));
        }
        let mut groups = Vec::with_capacity(record.groups.len());
        for (g, stats) in record.groups.iter().zip(self.groups.iter()) {
            if g.name != stats.name || g.dim() != stats.mean.len() {
                return Err(Error::SchemaMismatch(format!(
                    "person `{}` group `{}` does not match standardizer group `{}`",
                    record.person_id, g.name, stats.name
                )));
            }
            let mut values = g.values.clone();
            for mut row in values.rows_mut() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = (*v - stats.mean[j]) / stats.std[j];
                }
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
}
