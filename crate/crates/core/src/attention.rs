//! Cross-attention fusion over paired audio/video subsequences, with a
//! hand-written backward pass.
//!
//! A subsequence is L columns per modality; each column averages one clip
//! of `clip_len` consecutive frames, so a subsequence spans the last
//! `L * clip_len` frames before its end frame. Both branches attend over
//! the joint matrix `J = [X_a; X_v]`, pass through a gated residual, and a
//! dense head maps the concatenated outputs to one scalar.

use ndarray::{concatenate, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Modality, PersonRecord, Target};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttentionDims {
    pub d_a: usize,
    pub d_v: usize,
    pub l: usize,
}

impl AttentionDims {
    pub fn d(&self) -> usize {
        self.d_a + self.d_v
    }

    fn validate(&self) -> Result<()> {
        if self.d_a == 0 || self.d_v == 0 || self.l == 0 {
            return Err(Error::InvalidArgument(
                "attention dims must all be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// All trainable parameters. The same struct doubles as the gradient
/// container, since both live in the same space.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossAttentionParams<T> {
    pub dims: AttentionDims,
    /// (d_a, d): audio query map into the joint matrix.
    pub w_ja: Array2<T>,
    /// (d_v, d).
    pub w_jv: Array2<T>,
    /// (d_a, d_a): direct path.
    pub w_a: Array2<T>,
    /// (d_a, L): attention path.
    pub w_ca: Array2<T>,
    /// (d_v, d_v).
    pub w_v: Array2<T>,
    /// (d_v, L).
    pub w_cv: Array2<T>,
    /// (d_a, d_a): residual gate.
    pub w_ha: Array2<T>,
    /// (d_v, d_v).
    pub w_hv: Array2<T>,
    /// (1, d * L): dense head weights over the flattened output.
    pub dense_w: Array2<T>,
    pub dense_b: T,
}

pub type AttentionGradients<T> = CrossAttentionParams<T>;

pub const BLOCK_NAMES: [&str; 9] = [
    "w_ja", "w_jv", "w_a", "w_ca", "w_v", "w_cv", "w_ha", "w_hv", "dense",
];

impl<T: Real> CrossAttentionParams<T> {
    pub fn zeros(dims: AttentionDims) -> Result<Self> {
        dims.validate()?;
        let (d_a, d_v, l, d) = (dims.d_a, dims.d_v, dims.l, dims.d());
        Ok(CrossAttentionParams {
            dims,
            w_ja: Array2::zeros((d_a, d)),
            w_jv: Array2::zeros((d_v, d)),
            w_a: Array2::zeros((d_a, d_a)),
            w_ca: Array2::zeros((d_a, l)),
            w_v: Array2::zeros((d_v, d_v)),
            w_cv: Array2::zeros((d_v, l)),
            w_ha: Array2::zeros((d_a, d_a)),
            w_hv: Array2::zeros((d_v, d_v)),
            dense_w: Array2::zeros((1, d * l)),
            dense_b: T::zero(),
        })
    }

    /// Uniform init in [-0.1, 0.1), block order as declared, then the bias.
    pub fn init(dims: AttentionDims, seed: u64) -> Result<Self> {
        let mut params = Self::zeros(dims)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..BLOCK_NAMES.len() {
            for v in params.block_mut(i).iter_mut() {
                *v = T::cast(rng.random_range(-0.1..0.1));
            }
        }
        params.dense_b = T::cast(rng.random_range(-0.1..0.1));
        Ok(params)
    }

    pub fn block(&self, i: usize) -> &Array2<T> {
        match i {
            0 => &self.w_ja,
            1 => &self.w_jv,
            2 => &self.w_a,
            3 => &self.w_ca,
            4 => &self.w_v,
            5 => &self.w_cv,
            6 => &self.w_ha,
            7 => &self.w_hv,
            8 => &self.dense_w,
            _ => panic!("block index {i}"),
        }
    }

    pub fn block_mut(&mut self, i: usize) -> &mut Array2<T> {
        match i {
            0 => &mut self.w_ja,
            1 => &mut self.w_jv,
            2 => &mut self.w_a,
            3 => &mut self.w_ca,
            4 => &mut self.w_v,
            5 => &mut self.w_cv,
            6 => &mut self.w_ha,
            7 => &mut self.w_hv,
            8 => &mut self.dense_w,
            _ => panic!("block index {i}"),
        }
    }

    /// `self -= rate * other`, bias included.
    pub fn step(&mut self, rate: T, other: &Self) {
        for i in 0..BLOCK_NAMES.len() {
            let update = other.block(i) * rate;
            let mine = self.block_mut(i);
            *mine = &*mine - &update;
        }
        self.dense_b -= rate * other.dense_b;
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct MatrixJson<T> {
    shape: [usize; 2],
    data: Vec<T>,
}

impl<T: Real> MatrixJson<T> {
    fn from_array(a: &Array2<T>) -> Self {
        MatrixJson {
            shape: [a.nrows(), a.ncols()],
            data: a.iter().copied().collect(),
        }
    }

    fn to_array(&self) -> Result<Array2<T>> {
        Array2::from_shape_vec((self.shape[0], self.shape[1]), self.data.clone())
            .map_err(|e| Error::SchemaMismatch(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct ParamsJson<T> {
    dims: AttentionDims,
    w_ja: MatrixJson<T>,
    w_jv: MatrixJson<T>,
    w_a: MatrixJson<T>,
    w_ca: MatrixJson<T>,
    w_v: MatrixJson<T>,
    w_cv: MatrixJson<T>,
    w_ha: MatrixJson<T>,
    w_hv: MatrixJson<T>,
    dense_w: MatrixJson<T>,
    dense_b: T,
}

impl<T: Real + Serialize + for<'de> Deserialize<'de>> CrossAttentionParams<T> {
    pub fn to_json(&self) -> Result<String> {
        let j = ParamsJson {
            dims: self.dims,
            w_ja: MatrixJson::from_array(&self.w_ja),
            w_jv: MatrixJson::from_array(&self.w_jv),
            w_a: MatrixJson::from_array(&self.w_a),
            w_ca: MatrixJson::from_array(&self.w_ca),
            w_v: MatrixJson::from_array(&self.w_v),
            w_cv: MatrixJson::from_array(&self.w_cv),
            w_ha: MatrixJson::from_array(&self.w_ha),
            w_hv: MatrixJson::from_array(&self.w_hv),
            dense_w: MatrixJson::from_array(&self.dense_w),
            dense_b: self.dense_b,
        };
        Ok(serde_json::to_string_pretty(&j)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: ParamsJson<T> = serde_json::from_str(text)?;
        let params = CrossAttentionParams {
            dims: j.dims,
            w_ja: j.w_ja.to_array()?,
            w_jv: j.w_jv.to_array()?,
            w_a: j.w_a.to_array()?,
            w_ca: j.w_ca.to_array()?,
            w_v: j.w_v.to_array()?,
            w_cv: j.w_cv.to_array()?,
            w_ha: j.w_ha.to_array()?,
            w_hv: j.w_hv.to_array()?,
            dense_w: j.dense_w.to_array()?,
            dense_b: j.dense_b,
        };
        params.check_shapes()?;
        Ok(params)
    }
}

impl<T: Real> CrossAttentionParams<T> {
    fn check_shapes(&self) -> Result<()> {
        let want = Self::zeros(self.dims)?;
        for i in 0..BLOCK_NAMES.len() {
            if self.block(i).dim() != want.block(i).dim() {
                return Err(Error::SchemaMismatch(format!(
                    "block {}: shape {:?} vs expected {:?}",
                    BLOCK_NAMES[i],
                    self.block(i).dim(),
                    want.block(i).dim()
                )));
            }
        }
        Ok(())
    }
}

/// One training/evaluation item: clip-averaged modality matrices plus the
/// gold value at the subsequence's end frame.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsequenceBatch<T> {
    /// (d_a, L).
    pub x_a: Array2<T>,
    /// (d_v, L).
    pub x_v: Array2<T>,
    pub target: T,
}

/// Intermediate activations kept for the backward pass.
#[derive(Clone, Debug)]
pub struct AttentionCache<T> {
    pub j: Array2<T>,
    pub c_a: Array2<T>,
    pub c_v: Array2<T>,
    pub p_a: Array2<T>,
    pub p_v: Array2<T>,
    pub h_a: Array2<T>,
    pub h_v: Array2<T>,
    pub x_att_a: Array2<T>,
    pub x_att_v: Array2<T>,
    /// Row-major flattening of `[x_att_a; x_att_v]`.
    pub flat: Vec<T>,
    pub prediction: T,
}

fn check_batch<T: Real>(params: &CrossAttentionParams<T>, batch: &SubsequenceBatch<T>) -> Result<()> {
    let dims = params.dims;
    if batch.x_a.dim() != (dims.d_a, dims.l) || batch.x_v.dim() != (dims.d_v, dims.l) {
        return Err(Error::SchemaMismatch(format!(
            "batch shapes {:?}/{:?} vs dims ({}, {}) x L {}",
            batch.x_a.dim(),
            batch.x_v.dim(),
            dims.d_a,
            dims.d_v,
            dims.l
        )));
    }
    if batch.x_a.iter().chain(batch.x_v.iter()).any(|v| !v.is_finite())
        || !batch.target.is_finite()
    {
        return Err(Error::NonFinite("attention batch".into()));
    }
    Ok(())
}

/// Runs the model on one subsequence and keeps every intermediate.
pub fn forward<T: Real>(
    params: &CrossAttentionParams<T>,
    batch: &SubsequenceBatch<T>,
) -> Result<(T, AttentionCache<T>)> {
    check_batch(params, batch)?;
    let scale = T::one() / T::cast_usize(params.dims.d()).sqrt();
    let j = concatenate(Axis(0), &[batch.x_a.view(), batch.x_v.view()])
        .expect("modality row counts are validated");

    let z_a = batch.x_a.t().dot(&params.w_ja).dot(&j) * scale;
    let c_a = z_a.mapv(|v| v.tanh());
    let p_a = params.w_a.dot(&batch.x_a) + params.w_ca.dot(&c_a.t());
    let h_a = p_a.mapv(|v| v.max(T::zero()));
    let x_att_a = params.w_ha.dot(&h_a) + &batch.x_a;

    let z_v = batch.x_v.t().dot(&params.w_jv).dot(&j) * scale;
    let c_v = z_v.mapv(|v| v.tanh());
    let p_v = params.w_v.dot(&batch.x_v) + params.w_cv.dot(&c_v.t());
    let h_v = p_v.mapv(|v| v.max(T::zero()));
    let x_att_v = params.w_hv.dot(&h_v) + &batch.x_v;

    let stacked = concatenate(Axis(0), &[x_att_a.view(), x_att_v.view()])
        .expect("branch row counts are validated");
    let flat: Vec<T> = stacked.iter().copied().collect();
    let mut prediction = params.dense_b;
    for (w, &f) in params.dense_w.iter().zip(flat.iter()) {
        prediction += *w * f;
    }
    Ok((
        prediction,
        AttentionCache {
            j,
            c_a,
            c_v,
            p_a,
            p_v,
            h_a,
            h_v,
            x_att_a,
            x_att_v,
            flat,
            prediction,
        },
    ))
}

/// Squared error of one subsequence.
pub fn loss<T: Real>(params: &CrossAttentionParams<T>, batch: &SubsequenceBatch<T>) -> Result<T> {
    let (p, _) = forward(params, batch)?;
    let d = p - batch.target;
    Ok(d * d)
}

/// Gradients of the squared error with respect to every parameter block.
pub fn backward<T: Real>(
    params: &CrossAttentionParams<T>,
    batch: &SubsequenceBatch<T>,
    cache: &AttentionCache<T>,
) -> Result<AttentionGradients<T>> {
    check_batch(params, batch)?;
    let dims = params.dims;
    let (d_a, l, d) = (dims.d_a, dims.l, dims.d());
    let scale = T::one() / T::cast_usize(d).sqrt();
    let mut grads = AttentionGradients::zeros(dims)?;

    let g = (T::one() + T::one()) * (cache.prediction - batch.target);
    grads.dense_b = g;
    for (out, &f) in grads.dense_w.iter_mut().zip(cache.flat.iter()) {
        *out = g * f;
    }

    // d loss / d stacked output, reshaped back to (d, L).
    let dstacked = Array2::from_shape_vec(
        (d, l),
        params.dense_w.iter().map(|&w| w * g).collect(),
    )
    .expect("dense head length is d * L");
    let g_a = dstacked.slice(ndarray::s![0..d_a, ..]).to_owned();
    let g_v = dstacked.slice(ndarray::s![d_a.., ..]).to_owned();

    // Audio branch.
    grads.w_ha = g_a.dot(&cache.h_a.t());
    let dh_a = params.w_ha.t().dot(&g_a);
    let relu_mask_a = cache.p_a.mapv(|v| if v > T::zero() { T::one() } else { T::zero() });
    let dp_a = &dh_a * &relu_mask_a;
    grads.w_a = dp_a.dot(&batch.x_a.t());
    grads.w_ca = dp_a.dot(&cache.c_a);
    let dc_a = dp_a.t().dot(&params.w_ca);
    let dz_a = &dc_a * &cache.c_a.mapv(|c| T::one() - c * c);
    grads.w_ja = batch.x_a.dot(&dz_a).dot(&cache.j.t()) * scale;

    // Video branch.
    grads.w_hv = g_v.dot(&cache.h_v.t());
    let dh_v = params.w_hv.t().dot(&g_v);
    let relu_mask_v = cache.p_v.mapv(|v| if v > T::zero() { T::one() } else { T::zero() });
    let dp_v = &dh_v * &relu_mask_v;
    grads.w_v = dp_v.dot(&batch.x_v.t());
    grads.w_cv = dp_v.dot(&cache.c_v);
    let dc_v = dp_v.t().dot(&params.w_cv);
    let dz_v = &dc_v * &cache.c_v.mapv(|c| T::one() - c * c);
    grads.w_jv = batch.x_v.dot(&dz_v).dot(&cache.j.t()) * scale;

    Ok(grads)
}

/// Per-frame features of one modality: groups concatenated in schema
/// order, transposed to (dim, frames).
pub fn modality_matrix<T: Real>(record: &PersonRecord<T>, modality: Modality) -> Result<Array2<T>> {
    let views: Vec<_> = record
        .groups
        .iter()
        .filter(|g| g.modality == modality)
        .map(|g| g.values.t())
        .collect();
    if views.is_empty() {
        return Err(Error::Empty(format!("{modality} groups")));
    }
    concatenate(Axis(0), &views).map_err(|e| Error::SchemaMismatch(e.to_string()))
}

/// Builds the subsequence ending at `end`: L clips of `clip_len` frames,
/// averaged per clip, oldest clip first.
fn subsequence_at<T: Real>(
    audio: &Array2<T>,
    video: &Array2<T>,
    end: usize,
    l: usize,
    clip_len: usize,
) -> (Array2<T>, Array2<T>) {
    let span = l * clip_len;
    let start = end + 1 - span;
    let cf = T::cast_usize(clip_len);
    let build = |m: &Array2<T>| {
        let mut out = Array2::<T>::zeros((m.nrows(), l));
        for c in 0..l {
            let lo = start + c * clip_len;
            for r in 0..m.nrows() {
                let mut acc = T::zero();
                for f in lo..lo + clip_len {
                    acc += m[[r, f]];
                }
                out[[r, c]] = acc / cf;
            }
        }
        out
    };
    (build(audio), build(video))
}

/// All subsequences of one record whose end frames step by `stride`,
/// paired with the target label at each end frame.
pub fn build_batches<T: Real>(
    record: &PersonRecord<T>,
    target: Target,
    l: usize,
    clip_len: usize,
    stride: usize,
) -> Result<Vec<SubsequenceBatch<T>>> {
    if l == 0 || clip_len == 0 || stride == 0 {
        return Err(Error::InvalidArgument(
            "l, clip_len, and stride must be >= 1".into(),
        ));
    }
    let span = l * clip_len;
    let frames = record.frames();
    if frames < span {
        return Err(Error::TooShort {
            min: span,
            got: frames,
        });
    }
    let audio = modality_matrix(record, Modality::Audio)?;
    let video = modality_matrix(record, Modality::Video)?;
    let labels = record.target_series(target);
    let mut out = Vec::new();
    let mut end = span - 1;
    while end < frames {
        let (x_a, x_v) = subsequence_at(&audio, &video, end, l, clip_len);
        out.push(SubsequenceBatch {
            x_a,
            x_v,
            target: labels[end],
        });
        end += stride;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    default,
    deny_unknown_fields,
    bound(deserialize = "T: Real + Deserialize<'de>")
)]
pub struct AttentionTrainConfig<T> {
    pub l: usize,
    pub clip_len: usize,
    pub learning_rate: T,
    pub epochs: usize,
    /// End-frame stride when harvesting training subsequences.
    pub stride: usize,
    /// Cap on training subsequences; the harvest is thinned evenly.
    pub max_subsequences: usize,
}

impl<T: Real> Default for AttentionTrainConfig<T> {
    fn default() -> Self {
        AttentionTrainConfig {
            l: 8,
            clip_len: 4,
            // Plain SGD: rates much above this diverge at full feature
            // width (d = 30) and L = 8.
            learning_rate: T::cast(0.002),
            epochs: 200,
            stride: 16,
            max_subsequences: 2000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrainedAttention<T> {
    pub params: CrossAttentionParams<T>,
    /// Mean squared error per epoch, measured before each step.
    pub loss_trace: Vec<T>,
}

/// Stochastic gradient descent over shuffled subsequences.
pub fn train_attention<T: Real>(
    batches: &[SubsequenceBatch<T>],
    dims: AttentionDims,
    config: &AttentionTrainConfig<T>,
    seed: u64,
) -> Result<TrainedAttention<T>> {
    if batches.is_empty() {
        return Err(Error::Empty("training subsequences".into()));
    }
    if !(config.learning_rate > T::zero()) {
        return Err(Error::InvalidArgument("learning_rate must be > 0".into()));
    }
    let kept: Vec<&SubsequenceBatch<T>> = if batches.len() > config.max_subsequences {
        // Even thinning keeps the coverage spread over every person.
        let step = batches.len() as f64 / config.max_subsequences as f64;
        (0..config.max_subsequences)
            .map(|i| &batches[(i as f64 * step) as usize])
            .collect()
    } else {
        batches.iter().collect()
    };
    let mut params = CrossAttentionParams::init(dims, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut order: Vec<usize> = (0..kept.len()).collect();
    let mut loss_trace = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        use rand::seq::SliceRandom;
        order.shuffle(&mut rng);
        let mut epoch_loss = T::zero();
        for &i in &order {
            let batch = kept[i];
            let (p, cache) = forward(&params, batch)?;
            let d = p - batch.target;
            epoch_loss += d * d;
            let grads = backward(&params, batch, &cache)?;
            params.step(config.learning_rate, &grads);
        }
        loss_trace.push(epoch_loss / T::cast_usize(kept.len()));
    }
    Ok(TrainedAttention { params, loss_trace })
}

/// Predictions over one record: one per subsequence end frame, which run
/// from `l * clip_len - 1` to the last frame.
#[derive(Clone, Debug)]
pub struct SequenceEval<T> {
    pub predictions: Vec<T>,
    pub end_frames: Vec<usize>,
}

pub fn evaluate_sequence<T: Real>(
    params: &CrossAttentionParams<T>,
    record: &PersonRecord<T>,
    target: Target,
    clip_len: usize,
) -> Result<SequenceEval<T>> {
    let batches = build_batches(record, target, params.dims.l, clip_len, 1)?;
    let span = params.dims.l * clip_len;
    let mut predictions = Vec::with_capacity(batches.len());
    let mut end_frames = Vec::with_capacity(batches.len());
    for (i, batch) in batches.iter().enumerate() {
        let (p, _) = forward(params, batch)?;
        predictions.push(p);
        end_frames.push(span - 1 + i);
    }
    Ok(SequenceEval {
        predictions,
        end_frames,
    })
}

/// Gold values aligned with [`evaluate_sequence`] output.
pub fn sequence_gold<T: Real>(
    record: &PersonRecord<T>,
    target: Target,
    l: usize,
    clip_len: usize,
) -> Result<Vec<T>> {
    let span = l * clip_len;
    if record.frames() < span {
        return Err(Error::TooShort {
            min: span,
            got: record.frames(),
        });
    }
    let labels = record.target_series(target);
    Ok(labels[span - 1..].to_vec())
}

/// One block's worst relative disagreement between analytic and central
/// finite-difference gradients.
#[derive(Clone, Debug, Serialize)]
pub struct BlockCheck<T> {
    pub name: String,
    pub max_rel_error: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct GradCheckReport<T> {
    pub blocks: Vec<BlockCheck<T>>,
    pub max_rel_error: T,
}

fn rel_error<T: Real>(a: T, b: T) -> T {
    // The floor keeps dead paths (both gradients ~ 0) from amplifying
    // finite-difference noise into spurious relative error.
    let denom = a.abs().max(b.abs()).max(T::cast(1e-6));
    (a - b).abs() / denom
}

/// Compares the backward pass against central finite differences on a
/// random batch. `corrupt` deliberately breaks one gradient entry, as a
/// negative control for the check itself.
pub fn gradient_check<T: Real>(
    dims: AttentionDims,
    seed: u64,
    epsilon: T,
    corrupt: bool,
) -> Result<GradCheckReport<T>> {
    if !(epsilon > T::zero()) {
        return Err(Error::InvalidArgument("epsilon must be > 0".into()));
    }
    let params = CrossAttentionParams::<T>::init(dims, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9e37_79b9));
    let mut random_matrix = |r: usize, c: usize| {
        let mut m = Array2::<T>::zeros((r, c));
        for v in m.iter_mut() {
            *v = T::cast(rng.random_range(-1.0..1.0));
        }
        m
    };
    let batch = SubsequenceBatch {
        x_a: random_matrix(dims.d_a, dims.l),
        x_v: random_matrix(dims.d_v, dims.l),
        target: T::cast(rng.random_range(-1.0..1.0)),
    };

    let (_, cache) = forward(&params, &batch)?;
    let mut analytic = backward(&params, &batch, &cache)?;
    if corrupt {
        analytic.w_ca[[0, 0]] += T::cast(0.05);
    }

    let mut blocks = Vec::with_capacity(BLOCK_NAMES.len());
    let mut overall = T::zero();
    for i in 0..BLOCK_NAMES.len() {
        let mut worst = T::zero();
        let shape = params.block(i).dim();
        for r in 0..shape.0 {
            for c in 0..shape.1 {
                let mut plus = params.clone();
                plus.block_mut(i)[[r, c]] += epsilon;
                let mut minus = params.clone();
                minus.block_mut(i)[[r, c]] -= epsilon;
                let numeric =
                    (loss(&plus, &batch)? - loss(&minus, &batch)?) / (epsilon + epsilon);
                let err = rel_error(analytic.block(i)[[r, c]], numeric);
                worst = worst.max(err);
            }
        }
        if BLOCK_NAMES[i] == "dense" {
            let mut plus = params.clone();
            plus.dense_b += epsilon;
            let mut minus = params.clone();
            minus.dense_b -= epsilon;
            let numeric = (loss(&plus, &batch)? - loss(&minus, &batch)?) / (epsilon + epsilon);
            worst = worst.max(rel_error(analytic.dense_b, numeric));
        }
        overall = overall.max(worst);
        blocks.push(BlockCheck {
            name: BLOCK_NAMES[i].to_string(),
            max_rel_error: worst,
        });
    }
    Ok(GradCheckReport {
        blocks,
        max_rel_error: overall,
    })
}
