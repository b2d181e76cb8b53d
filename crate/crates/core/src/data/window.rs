//! Context windowing: each frame's feature vector is the concatenation of
//! the last `context_len` frames of every group, oldest first, left-padded
//! by repeating frame 0.

use serde::{Deserialize, Serialize};

use crate::data::{GroupSpec, Modality, PersonRecord};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Location of one group's span inside a windowed feature vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSlot {
    pub name: String,
    pub modality: Modality,
    /// Start offset in the concatenated vector.
    pub offset: usize,
    /// Span length: `dim * context_len`.
    pub len: usize,
    /// Per-frame width of the group.
    pub dim: usize,
}

/// Layout of windowed feature vectors for a schema and context length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureLayout {
    pub slots: Vec<GroupSlot>,
    pub context_len: usize,
    pub total_dim: usize,
}

impl FeatureLayout {
    pub fn new(schema: &[GroupSpec], context_len: usize) -> Result<Self> {
        if context_len == 0 {
            return Err(Error::InvalidArgument("context_len must be >= 1".into()));
        }
        if schema.is_empty() {
            return Err(Error::Empty("schema".into()));
        }
        let mut slots = Vec::with_capacity(schema.len());
        let mut offset = 0;
        for spec in schema {
            let len = spec.dim * context_len;
            slots.push(GroupSlot {
                name: spec.name.clone(),
                modality: spec.modality,
                offset,
                len,
                dim: spec.dim,
            });
            offset += len;
        }
        Ok(FeatureLayout {
            slots,
            context_len,
            total_dim: offset,
        })
    }

    pub fn slot(&self, name: &str) -> Option<&GroupSlot> {
        self.slots.iter().find(|s| s.name == name)
    }

    /// Indices of slots belonging to a modality.
    pub fn modality_slots(&self, modality: Modality) -> Vec<usize> {
        self.slots
            .iter()
            .enumerate()
            .filter(|(_, s)| s.modality == modality)
            .map(|(i, _)| i)
            .collect()
    }
}

/// One frame's windowed features and labels.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameSample<T> {
    pub person_id: String,
    pub frame_index: usize,
    pub x: Vec<T>,
    /// Arousal, valence.
    pub y: [T; 2],
}

impl<T: Real> FrameSample<T> {
    /// The span of `x` owned by slot `slot_index` of `layout`.
    pub fn group_slice<'a>(&'a self, layout: &FeatureLayout, slot_index: usize) -> &'a [T] {
        let slot = &layout.slots[slot_index];
        &self.x[slot.offset..slot.offset + slot.len]
    }
}

/// Windows one person's record into per-frame samples.
///
/// Frame `t` sees frames `t - context_len + 1 ..= t` of every group, oldest
/// first; negative indices are clamped to 0.
pub fn frame_samples<T: Real>(
    record: &PersonRecord<T>,
    layout: &FeatureLayout,
) -> Result<Vec<FrameSample<T>>> {
    if record.groups.len() != layout.slots.len() {
        return Err(Error::SchemaMismatch(format!(
            "person `{}` has {} groups, layout declares {}",
            record.person_id,
            record.groups.len(),
            layout.slots.len()
        )));
    }
    for (g, slot) in record.groups.iter().zip(layout.slots.iter()) {
        if g.name != slot.name || g.dim() != slot.dim {
            return Err(Error::SchemaMismatch(format!(
                "person `{}`: group `{}` dim {} vs layout `{}` dim {}",
                record.person_id,
                g.name,
                g.dim(),
                slot.name,
                slot.dim
            )));
        }
    }
    let frames = record.frames();
    let ctx = layout.context_len;
    let mut out = Vec::with_capacity(frames);
    for t in 0..frames {
        let mut x = Vec::with_capacity(layout.total_dim);
        for g in &record.groups {
            for back in 0..ctx {
                let raw = t as isize - (ctx - 1 - back) as isize;
                let src = raw.max(0) as usize;
                x.extend(g.values.row(src).iter().copied());
            }
        }
        out.push(FrameSample {
            person_id: record.person_id.clone(),
            frame_index: t,
            x,
            y: [record.labels[[t, 0]], record.labels[[t, 1]]],
        });
    }
    Ok(out)
}
