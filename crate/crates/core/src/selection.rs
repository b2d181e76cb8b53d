//! Dynamic selection: competence regions over validation frames and the
//! rules that turn per-region errors into per-frame regressor weights.
//!
//! Distances below `EPS_DISTANCE` and weighted error sums below `EPS_ERROR`
//! are clamped before inversion, so exact matches and perfect regressors
//! stay finite.

use std::cmp::Ordering;

use ndarray::{Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::ccc;
use crate::scalar::Real;

pub const DEFAULT_K: usize = 100;
pub const EPS_DISTANCE: f64 = 1e-9;
pub const EPS_ERROR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMetric {
    Euclidean,
    Manhattan,
}

/// Brute-force nearest neighbor index over validation feature rows.
#[derive(Clone, Debug)]
pub struct NeighborIndex<T> {
    features: Array2<T>,
    metric: DistanceMetric,
}

impl<T: Real> NeighborIndex<T> {
    pub fn build(features: Array2<T>, metric: DistanceMetric) -> Result<Self> {
        if features.nrows() == 0 {
            return Err(Error::Empty("neighbor index".into()));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("neighbor index features".into()));
        }
        Ok(NeighborIndex { features, metric })
    }

    pub fn len(&self) -> usize {
        self.features.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.features.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    fn distance(&self, a: &[T], b: ndarray::ArrayView1<T>) -> T {
        match self.metric {
            DistanceMetric::Euclidean => {
                let mut acc = T::zero();
                for (&x, &y) in a.iter().zip(b.iter()) {
                    let d = x - y;
                    acc += d * d;
                }
                acc.sqrt()
            }
            DistanceMetric::Manhattan => {
                let mut acc = T::zero();
                for (&x, &y) in a.iter().zip(b.iter()) {
                    acc += (x - y).abs();
                }
                acc
            }
        }
    }

    /// The `k` nearest rows to `x`, ascending by distance, ties broken by
    /// row index. `k` is clamped to the index size.
    pub fn query(&self, x: &[T], k: usize) -> Result<Vec<(usize, T)>> {
        if x.len() != self.dim() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: self.dim(),
            });
        }
        if k == 0 {
            return Err(Error::InvalidArgument("k must be >= 1".into()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("query point".into()));
        }
        let mut all: Vec<(usize, T)> = self
            .features
            .rows()
            .into_iter()
            .enumerate()
            .map(|(i, row)| (i, self.distance(x, row)))
            .collect();
        let cmp = |a: &(usize, T), b: &(usize, T)| -> Ordering {
            a.1.partial_cmp(&b.1)
                .unwrap_or(Ordering::Equal)
                .then(a.0.cmp(&b.0))
        };
        let kk = k.min(all.len());
        if kk < all.len() {
            all.select_nth_unstable_by(kk, cmp);
            all.truncate(kk);
        }
        all.sort_unstable_by(cmp);
        Ok(all)
    }
}

/// The K nearest validation frames of one query, with their error rows.
#[derive(Clone, Debug)]
pub struct CompetenceRegion<T> {
    pub indices: Vec<usize>,
    pub distances: Vec<T>,
    /// `k x n` squared errors: row per neighbor, column per regressor.
    pub errors: Array2<T>,
}

/// Looks up the region of `x`: nearest neighbors plus their rows of the
/// validation error table.
pub fn competence_region<T: Real>(
    index: &NeighborIndex<T>,
    errors: ArrayView2<T>,
    x: &[T],
    k: usize,
) -> Result<CompetenceRegion<T>> {
    if errors.nrows() != index.len() {
        return Err(Error::LengthMismatch {
            left: errors.nrows(),
            right: index.len(),
        });
    }
    let hits = index.query(x, k)?;
    let n = errors.ncols();
    let mut region_errors = Array2::<T>::zeros((hits.len(), n));
    let mut indices = Vec::with_capacity(hits.len());
    let mut distances = Vec::with_capacity(hits.len());
    for (r, (idx, dist)) in hits.into_iter().enumerate() {
        for c in 0..n {
            region_errors[[r, c]] = errors[[idx, c]];
        }
        indices.push(idx);
        distances.push(dist);
    }
    Ok(CompetenceRegion {
        indices,
        distances,
        errors: region_errors,
    })
}

/// Inverse-distance neighbor weights: `d_k = (1/dist_k) / sum_j (1/dist_j)`
/// with distances clamped to at least `EPS_DISTANCE`.
pub fn neighbor_weights<T: Real>(distances: &[T]) -> Result<Vec<T>> {
    if distances.is_empty() {
        return Err(Error::Empty("distances".into()));
    }
    let eps = T::cast(EPS_DISTANCE);
    let mut inv = Vec::with_capacity(distances.len());
    for &d in distances {
        if !d.is_finite() {
            return Err(Error::NonFinite("distance".into()));
        }
        if d < T::zero() {
            return Err(Error::InvalidArgument("negative distance".into()));
        }
        inv.push(T::one() / d.max(eps));
    }
    let total: T = inv.iter().copied().sum();
    Ok(inv.into_iter().map(|v| v / total).collect())
}

/// Inverse weighted-error regressor weights:
/// `alpha_i = (1/S_i) / sum_n (1/S_n)` with `S_i = sum_k d_k * sqe_{k,i}`
/// clamped to at least `EPS_ERROR`.
pub fn regressor_weights<T: Real>(
    neighbor_weights: &[T],
    errors: ArrayView2<T>,
) -> Result<Vec<T>> {
    if errors.nrows() != neighbor_weights.len() {
        return Err(Error::LengthMismatch {
            left: errors.nrows(),
            right: neighbor_weights.len(),
        });
    }
    if errors.ncols() == 0 {
        return Err(Error::Empty("regressor errors".into()));
    }
    let eps = T::cast(EPS_ERROR);
    let mut inv = Vec::with_capacity(errors.ncols());
    for col in errors.columns() {
        let mut s = T::zero();
        for (&d, &e) in neighbor_weights.iter().zip(col.iter()) {
            if !e.is_finite() {
                return Err(Error::NonFinite("region error".into()));
            }
            s += d * e;
        }
        inv.push(T::one() / s.max(eps));
    }
    let total: T = inv.iter().copied().sum();
    Ok(inv.into_iter().map(|v| v / total).collect())
}

/// Per-frame combination weights: `alpha` sums to 1; regressors discarded
/// by a rule carry weight 0 and `selected = false`.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionWeights<T> {
    pub alpha: Vec<T>,
    pub selected: Vec<bool>,
}

impl<T: Real> SelectionWeights<T> {
    pub fn uniform(n: usize) -> Self {
        let w = T::one() / T::cast_usize(n);
        SelectionWeights {
            alpha: vec![w; n],
            selected: vec![true; n],
        }
    }
}

/// Single best regressor: the column with the lowest summed region error,
/// ties to the lowest index.
pub fn ds_select<T: Real>(errors: ArrayView2<T>) -> Result<usize> {
    if errors.ncols() == 0 || errors.nrows() == 0 {
        return Err(Error::Empty("region errors".into()));
    }
    let mut best = 0usize;
    let mut best_sum = T::infinity();
    for (i, col) in errors.columns().into_iter().enumerate() {
        let s: T = col.iter().copied().sum();
        if s < best_sum {
            best_sum = s;
            best = i;
        }
    }
    Ok(best)
}

/// Threshold for discarding regressors inside a region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ThresholdRule<T> {
    /// Discard regressors whose mean region error exceeds the pool's mean.
    PoolMean,
    /// Discard regressors whose mean region error exceeds a fixed value.
    Absolute { value: T },
}

/// Selection with filtering: discards high-error regressors, then applies
/// the inverse weighted-error rule to the survivors. If the rule discards
/// everyone, the full pool is kept.
pub fn dws_filter<T: Real>(
    neighbor_weights: &[T],
    errors: ArrayView2<T>,
    rule: ThresholdRule<T>,
) -> Result<SelectionWeights<T>> {
    let k = errors.nrows();
    let n = errors.ncols();
    if k != neighbor_weights.len() {
        return Err(Error::LengthMismatch {
            left: k,
            right: neighbor_weights.len(),
        });
    }
    if n == 0 || k == 0 {
        return Err(Error::Empty("region errors".into()));
    }
    let kf = T::cast_usize(k);
    let means: Vec<T> = errors
        .columns()
        .into_iter()
        .map(|col| col.iter().copied().sum::<T>() / kf)
        .collect();
    let threshold = match rule {
        ThresholdRule::PoolMean => means.iter().copied().sum::<T>() / T::cast_usize(n),
        ThresholdRule::Absolute { value } => {
            if value < T::zero() || value.is_nan() {
                return Err(Error::InvalidArgument(
                    "absolute threshold must be >= 0".into(),
                ));
            }
            value
        }
    };
    let mut selected: Vec<bool> = means.iter().map(|&m| !(m > threshold)).collect();
    if selected.iter().all(|&s| !s) {
        selected = vec![true; n];
    }

    let eps = T::cast(EPS_ERROR);
    let mut inv = vec![T::zero(); n];
    let mut total = T::zero();
    for (i, col) in errors.columns().into_iter().enumerate() {
        if !selected[i] {
            continue;
        }
        let mut s = T::zero();
        for (&d, &e) in neighbor_weights.iter().zip(col.iter()) {
            s += d * e;
        }
        let v = T::one() / s.max(eps);
        inv[i] = v;
        total += v;
    }
    let alpha = inv.into_iter().map(|v| v / total).collect();
    Ok(SelectionWeights { alpha, selected })
}

/// Weighted combination of per-frame predictions.
pub fn dw_combine<T: Real>(predictions: &[T], alpha: &[T]) -> Result<T> {
    if predictions.len() != alpha.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: alpha.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::Empty("predictions".into()));
    }
    Ok(predictions
        .iter()
        .zip(alpha.iter())
        .map(|(&p, &a)| p * a)
        .sum())
}

/// Unweighted pool average.
pub fn mean_combine<T: Real>(predictions: &[T]) -> Result<T> {
    if predictions.is_empty() {
        return Err(Error::Empty("predictions".into()));
    }
    Ok(predictions.iter().copied().sum::<T>() / T::cast_usize(predictions.len()))
}

/// Meta-learner settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    default,
    deny_unknown_fields,
    bound(deserialize = "T: Real + Deserialize<'de>")
)]
pub struct MetaConfig<T> {
    /// Non-overlapping window length used to derive class labels.
    pub window_len: usize,
    pub epochs: usize,
    pub learning_rate: T,
    /// Argmax the class probabilities instead of using them as weights.
    pub hard: bool,
}

impl<T: Real> Default for MetaConfig<T> {
    fn default() -> Self {
        MetaConfig {
            window_len: 150,
            epochs: 500,
            learning_rate: T::cast(0.1),
            hard: false,
        }
    }
}

/// Multinomial logistic model over pool outputs: class i means "regressor
/// i is locally best".
#[derive(Clone, Debug, PartialEq)]
pub struct MetaModel<T> {
    /// `(n + 1) x n`: one column of logit weights per class, bias row last.
    pub weights: Array2<T>,
    pub input_mean: Vec<T>,
    pub input_std: Vec<T>,
    pub hard: bool,
    /// Fewer than two distinct window labels were available.
    pub degenerate: bool,
}

/// Training outcome with diagnostics.
#[derive(Clone, Debug)]
pub struct MetaTrained<T> {
    pub model: MetaModel<T>,
    /// Cross-entropy before each update, plus once after the last.
    pub loss_trace: Vec<T>,
    /// Usable (non-constant-gold) windows.
    pub window_count: usize,
    /// Windows labeled with each class.
    pub class_counts: Vec<usize>,
}

fn softmax_row<T: Real>(logits: &mut [T]) {
    let max = logits
        .iter()
        .copied()
        .fold(T::neg_infinity(), |a, b| a.max(b));
    let mut sum = T::zero();
    for v in logits.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in logits.iter_mut() {
        *v /= sum;
    }
}

/// Labels each non-overlapping window with the index of the regressor whose
/// agreement with gold is highest over the window, then fits the softmax
/// model by full-batch gradient descent.
pub fn meta_train<T: Real>(
    predictions: ArrayView2<T>,
    labels: &[T],
    config: &MetaConfig<T>,
    seed: u64,
) -> Result<MetaTrained<T>> {
    let rows = predictions.nrows();
    let n = predictions.ncols();
    if rows != labels.len() {
        return Err(Error::LengthMismatch {
            left: rows,
            right: labels.len(),
        });
    }
    if n == 0 {
        return Err(Error::Empty("prediction columns".into()));
    }
    if config.window_len < 2 {
        return Err(Error::InvalidArgument("window_len must be >= 2".into()));
    }
    if rows < config.window_len {
        return Err(Error::InvalidArgument(format!(
            "{rows} frames cannot fill one window of {}",
            config.window_len
        )));
    }
    if !(config.learning_rate > T::zero()) {
        return Err(Error::InvalidArgument("learning_rate must be > 0".into()));
    }
    if predictions.iter().any(|v| !v.is_finite()) || labels.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("meta training input".into()));
    }

    // Input standardization over every frame, constant columns mapped to 0.
    let rf = T::cast_usize(rows);
    let floor = T::cast(1e-12);
    let mut input_mean = vec![T::zero(); n];
    let mut input_std = vec![T::zero(); n];
    for (c, col) in predictions.columns().into_iter().enumerate() {
        let mean = col.iter().copied().sum::<T>() / rf;
        let var = col.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / rf;
        let sd = var.sqrt();
        input_mean[c] = mean;
        input_std[c] = if sd < floor { T::one() } else { sd };
    }

    // Window labels: best column by agreement, constant gold skipped.
    let wl = config.window_len;
    let mut window_rows: Vec<(usize, usize)> = Vec::new();
    let mut class_counts = vec![0usize; n];
    for w in 0..rows / wl {
        let start = w * wl;
        let gold = &labels[start..start + wl];
        let (lo, hi) = gold
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        if lo == hi {
            continue;
        }
        let mut best = 0usize;
        let mut best_ccc = T::neg_infinity();
        for c in 0..n {
            let col: Vec<T> = (start..start + wl).map(|r| predictions[[r, c]]).collect();
            let score = ccc(gold, &col)?;
            if score > best_ccc {
                best_ccc = score;
                best = c;
            }
        }
        class_counts[best] += 1;
        window_rows.push((start, best));
    }

    let window_count = window_rows.len();
    if window_count == 0 {
        // Nothing to learn from: zero weights make every class equally
        // likely, i.e. uniform combination weights.
        return Ok(MetaTrained {
            model: MetaModel {
                weights: Array2::zeros((n + 1, n)),
                input_mean,
                input_std,
                hard: config.hard,
                degenerate: true,
            },
            loss_trace: Vec::new(),
            window_count,
            class_counts,
        });
    }
    let distinct = class_counts.iter().filter(|&&c| c > 0).count();
    let degenerate = distinct < 2;

    // Training matrix: standardized inputs of every labeled frame, plus a
    // trailing ones column.
    let b = window_count * wl;
    let mut x = Array2::<T>::zeros((b, n + 1));
    let mut y = vec![0usize; b];
    let mut r_out = 0;
    for &(start, class) in &window_rows {
        for r in start..start + wl {
            for c in 0..n {
                x[[r_out, c]] = (predictions[[r, c]] - input_mean[c]) / input_std[c];
            }
            x[[r_out, n]] = T::one();
            y[r_out] = class;
            r_out += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = Array2::<T>::zeros((n + 1, n));
    for v in weights.iter_mut() {
        *v = T::cast(rng.random_range(-0.01..0.01));
    }

    let bf = T::cast_usize(b);
    let tiny = T::min_positive_value();
    let mut loss_trace = Vec::with_capacity(config.epochs + 1);
    for epoch in 0..=config.epochs {
        let mut probs = x.dot(&weights);
        let mut loss = T::zero();
        for (r, mut row) in probs.rows_mut().into_iter().enumerate() {
            softmax_row(row.as_slice_mut().expect("row is contiguous"));
            loss -= row[y[r]].max(tiny).ln();
        }
        loss /= bf;
        loss_trace.push(loss);
        if epoch == config.epochs {
            break;
        }
        // probs becomes (P - Y) in place.
        for (r, &class) in y.iter().enumerate() {
            probs[[r, class]] -= T::one();
        }
        let grad = x.t().dot(&probs) / bf;
        weights = weights - grad * config.learning_rate;
    }

    Ok(MetaTrained {
        model: MetaModel {
            weights,
            input_mean,
            input_std,
            hard: config.hard,
            degenerate,
        },
        loss_trace,
        window_count,
        class_counts,
    })
}

/// Class probabilities for one frame's pool outputs, as combination
/// weights. Hard mode selects the argmax class, ties to the lowest index.
pub fn meta_weights<T: Real>(model: &MetaModel<T>, predictions: &[T]) -> Result<SelectionWeights<T>> {
    let n = model.weights.ncols();
    if predictions.len() != n {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: n,
        });
    }
    if predictions.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("pool predictions".into()));
    }
    let mut logits = vec![T::zero(); n];
    for c in 0..n {
        let mut v = model.weights[[n, c]];
        for (r, &p) in predictions.iter().enumerate() {
            let std = (p - model.input_mean[r]) / model.input_std[r];
            v += std * model.weights[[r, c]];
        }
        logits[c] = v;
    }
    softmax_row(&mut logits);
    if model.hard {
        let mut best = 0usize;
        for (i, &p) in logits.iter().enumerate() {
            if p > logits[best] {
                best = i;
            }
        }
        let mut alpha = vec![T::zero(); n];
        alpha[best] = T::one();
        return Ok(SelectionWeights {
            alpha,
            selected: vec![true; n],
        });
    }
    Ok(SelectionWeights {
        alpha: logits,
        selected: vec![true; n],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::arr2;
    use proptest::prelude::*;

    #[test]
    fn neighbor_weights_invert_distances() {
        let w = neighbor_weights(&[1.0, 3.0]).unwrap();
        assert_abs_diff_eq!(w[0], 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], 0.25, epsilon = 1e-12);
    }

    #[test]
    fn zero_distance_is_clamped() {
        let w = neighbor_weights(&[0.0, 5.0]).unwrap();
        assert!(w[0] > 0.999_999_99);
        assert_abs_diff_eq!(w[1], 2e-10, epsilon = 1e-13);
        assert_abs_diff_eq!(w[0] + w[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn neighbor_weights_reject_bad_input() {
        assert!(matches!(
            neighbor_weights::<f64>(&[]).unwrap_err(),
            Error::Empty(_)
        ));
        assert!(matches!(
            neighbor_weights(&[1.0, -0.5]).unwrap_err(),
            Error::InvalidArgument(_)
        ));
        assert!(matches!(
            neighbor_weights(&[1.0, f64::NAN]).unwrap_err(),
            Error::NonFinite(_)
        ));
    }

    #[test]
    fn regressor_weights_invert_weighted_errors() {
        // Both neighbors weigh 0.5; columns accumulate 1 and 3.
        let d = [0.5, 0.5];
        let errors = arr2(&[[1.0, 3.0], [1.0, 3.0]]);
        let alpha = regressor_weights(&d, errors.view()).unwrap();
        assert_abs_diff_eq!(alpha[0], 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(alpha[1], 0.25, epsilon = 1e-12);
    }

    #[test]
    fn perfect_regressor_is_clamped_not_infinite() {
        let d = [1.0];
        let errors = arr2(&[[0.0, 1.0]]);
        let alpha: Vec<f64> = regressor_weights(&d, errors.view()).unwrap();
        assert!(alpha[0] > 0.999_999, "{alpha:?}");
        assert!(alpha.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn ds_picks_lowest_total_error_with_index_ties() {
        let errors = arr2(&[[1.0, 0.5, 0.5], [1.0, 0.5, 0.5]]);
        assert_eq!(ds_select(errors.view()).unwrap(), 1);
        let errors = arr2(&[[2.0, 1.0], [1.0, 3.0]]);
        assert_eq!(ds_select(errors.view()).unwrap(), 0);
    }

    #[test]
    fn dws_pool_mean_discards_outlier() {
        let d = [1.0];
        let errors = arr2(&[[1.0, 1.0, 10.0]]);
        let sel = dws_filter(&d, errors.view(), ThresholdRule::PoolMean).unwrap();
        assert_eq!(sel.selected, vec![true, true, false]);
        assert_abs_diff_eq!(sel.alpha[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sel.alpha[1], 0.5, epsilon = 1e-12);
        assert_eq!(sel.alpha[2], 0.0);
    }

    #[test]
    fn dws_identical_errors_keep_everyone() {
        let d = [0.5, 0.5];
        let errors = arr2(&[[2.0, 2.0], [2.0, 2.0]]);
        let sel = dws_filter(&d, errors.view(), ThresholdRule::PoolMean).unwrap();
        assert_eq!(sel.selected, vec![true, true]);
        assert_abs_diff_eq!(sel.alpha[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn dws_infinite_threshold_matches_plain_weighting() {
        let d = neighbor_weights(&[1.0, 2.0, 4.0]).unwrap();
        let errors = arr2(&[[0.3, 1.1], [0.9, 0.2], [2.0, 0.7]]);
        let sel = dws_filter(
            &d,
            errors.view(),
            ThresholdRule::Absolute {
                value: f64::INFINITY,
            },
        )
        .unwrap();
        let alpha = regressor_weights(&d, errors.view()).unwrap();
        for (a, b) in sel.alpha.iter().zip(alpha.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
        assert!(sel.selected.iter().all(|&s| s));
    }

    #[test]
    fn dws_all_discarded_falls_back_to_full_pool() {
        let d = [1.0];
        let errors = arr2(&[[5.0, 6.0]]);
        let sel = dws_filter(&d, errors.view(), ThresholdRule::Absolute { value: 1.0 }).unwrap();
        assert_eq!(sel.selected, vec![true, true]);
        assert_abs_diff_eq!(sel.alpha.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn combine_rules() {
        assert_eq!(dw_combine(&[2.0, 4.0], &[0.75, 0.25]).unwrap(), 2.5);
        assert_eq!(mean_combine(&[2.0, 4.0]).unwrap(), 3.0);
        assert!(dw_combine(&[1.0], &[0.5, 0.5]).is_err());
        assert!(mean_combine::<f64>(&[]).is_err());
    }

    #[test]
    fn knn_returns_sorted_neighbors_with_index_ties() {
        let features = arr2(&[[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [3.0, 4.0]]);
        let index = NeighborIndex::build(features, DistanceMetric::Euclidean).unwrap();
        let hits = index.query(&[0.0, 0.0], 3).unwrap();
        assert_eq!(hits[0].0, 0);
        assert_eq!(hits[0].1, 0.0);
        // Rows 1 and 2 tie at distance 1; index order breaks the tie.
        assert_eq!(hits[1].0, 1);
        assert_eq!(hits[2].0, 2);
    }

    #[test]
    fn knn_clamps_k_and_checks_dim() {
        let features = arr2(&[[0.0], [1.0]]);
        let index = NeighborIndex::build(features, DistanceMetric::Manhattan).unwrap();
        assert_eq!(index.query(&[0.5], 10).unwrap().len(), 2);
        assert!(index.query(&[0.5, 0.5], 1).is_err());
        assert!(index.query(&[0.5], 0).is_err());
    }

    #[test]
    fn manhattan_differs_from_euclidean() {
        let features = arr2(&[[1.0, 1.0]]);
        let e = NeighborIndex::build(features.clone(), DistanceMetric::Euclidean).unwrap();
        let m = NeighborIndex::build(features, DistanceMetric::Manhattan).unwrap();
        let de = e.query(&[0.0, 0.0], 1).unwrap()[0].1;
        let dm = m.query(&[0.0, 0.0], 1).unwrap()[0].1;
        assert_abs_diff_eq!(de, 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(dm, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn competence_region_carries_error_rows() {
        let features = arr2(&[[0.0], [1.0], [2.0]]);
        let errors = arr2(&[[0.1, 0.9], [0.2, 0.8], [0.3, 0.7]]);
        let index = NeighborIndex::build(features, DistanceMetric::Euclidean).unwrap();
        let region = competence_region(&index, errors.view(), &[1.9], 2).unwrap();
        assert_eq!(region.indices, vec![2, 1]);
        assert_eq!(region.errors, arr2(&[[0.3, 0.7], [0.2, 0.8]]));
    }

    fn meta_fixture(rows: usize) -> (Array2<f64>, Vec<f64>) {
        // Column 0 tracks gold over the first half, column 1 over the rest.
        // Gold sits high early and low late so the two regimes occupy
        // different parts of prediction space (a linear model cannot tell
        // regimes apart by variance alone).
        let mut preds = Array2::<f64>::zeros((rows, 2));
        let mut labels = vec![0.0; rows];
        for t in 0..rows {
            let wobble = 0.15 * (t as f64 * 0.21).sin();
            let drift = 0.2 * (t as f64 * 0.63).cos();
            if t < rows / 2 {
                let gold = 0.8 + wobble;
                labels[t] = gold;
                preds[[t, 0]] = gold + 0.1 * drift;
                preds[[t, 1]] = drift;
            } else {
                let gold = -0.8 + wobble;
                labels[t] = gold;
                preds[[t, 0]] = drift;
                preds[[t, 1]] = gold + 0.1 * drift;
            }
        }
        (preds, labels)
    }

    #[test]
    fn meta_learns_locally_best_classes() {
        let (preds, labels) = meta_fixture(400);
        let config = MetaConfig {
            window_len: 50,
            ..MetaConfig::default()
        };
        let trained = meta_train(preds.view(), &labels, &config, 7).unwrap();
        assert!(!trained.model.degenerate);
        assert_eq!(trained.window_count, 8);
        assert_eq!(trained.class_counts, vec![4, 4]);
        // Inputs resembling the first regime prefer class 0.
        let early = meta_weights(&trained.model, &[preds[[10, 0]], preds[[10, 1]]]).unwrap();
        assert!(early.alpha[0] > early.alpha[1], "{:?}", early.alpha);
        let late = meta_weights(&trained.model, &[preds[[390, 0]], preds[[390, 1]]]).unwrap();
        assert!(late.alpha[1] > late.alpha[0], "{:?}", late.alpha);
        assert_abs_diff_eq!(early.alpha.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn meta_loss_is_nonincreasing() {
        let (preds, labels) = meta_fixture(300);
        let config = MetaConfig {
            window_len: 50,
            ..MetaConfig::default()
        };
        let trained = meta_train(preds.view(), &labels, &config, 3).unwrap();
        assert_eq!(trained.loss_trace.len(), config.epochs + 1);
        for pair in trained.loss_trace.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-9, "{} -> {}", pair[0], pair[1]);
        }
    }

    #[test]
    fn meta_single_class_gets_confident() {
        // Column 0 is gold everywhere, so every window is labeled 0.
        let rows = 300;
        let mut preds = Array2::<f64>::zeros((rows, 2));
        let mut labels = vec![0.0; rows];
        for t in 0..rows {
            let gold = (t as f64 * 0.17).sin();
            labels[t] = gold;
            preds[[t, 0]] = gold;
            preds[[t, 1]] = -gold;
        }
        let config = MetaConfig {
            window_len: 50,
            ..MetaConfig::default()
        };
        let trained = meta_train(preds.view(), &labels, &config, 1).unwrap();
        assert!(trained.model.degenerate);
        let w = meta_weights(&trained.model, &[0.4, -0.4]).unwrap();
        assert!(w.alpha[0] > 0.9, "{:?}", w.alpha);
    }

    #[test]
    fn meta_constant_gold_everywhere_is_uniform() {
        let rows = 200;
        let preds = Array2::<f64>::from_elem((rows, 3), 0.5);
        let labels = vec![1.0; rows];
        let config = MetaConfig {
            window_len: 50,
            ..MetaConfig::default()
        };
        let trained = meta_train(preds.view(), &labels, &config, 1).unwrap();
        assert!(trained.model.degenerate);
        assert_eq!(trained.window_count, 0);
        let w = meta_weights(&trained.model, &[0.1, 0.2, 0.3]).unwrap();
        for a in &w.alpha {
            assert_abs_diff_eq!(*a, 1.0 / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn meta_hard_mode_is_one_hot() {
        let (preds, labels) = meta_fixture(400);
        let config = MetaConfig {
            window_len: 50,
            hard: true,
            ..MetaConfig::default()
        };
        let trained = meta_train(preds.view(), &labels, &config, 7).unwrap();
        let w = meta_weights(&trained.model, &[preds[[10, 0]], preds[[10, 1]]]).unwrap();
        assert_eq!(w.alpha, vec![1.0, 0.0]);
    }

    #[test]
    fn meta_deterministic_per_seed() {
        let (preds, labels) = meta_fixture(300);
        let config = MetaConfig {
            window_len: 50,
            ..MetaConfig::default()
        };
        let a = meta_train(preds.view(), &labels, &config, 9).unwrap();
        let b = meta_train(preds.view(), &labels, &config, 9).unwrap();
        assert_eq!(a.model, b.model);
        let c = meta_train(preds.view(), &labels, &config, 10).unwrap();
        assert_ne!(a.model.weights, c.model.weights);
    }

    #[test]
    fn meta_too_few_frames_errors() {
        let preds = Array2::<f64>::zeros((10, 2));
        let labels = vec![0.0; 10];
        let config = MetaConfig::<f64> {
            window_len: 50,
            ..MetaConfig::default()
        };
        assert!(matches!(
            meta_train(preds.view(), &labels, &config, 0).unwrap_err(),
            Error::InvalidArgument(_)
        ));
    }

    proptest! {
        #[test]
        fn neighbor_weights_sum_to_one(dists in prop::collection::vec(0.0f64..100.0, 1..50)) {
            let w = neighbor_weights(&dists).unwrap();
            let sum: f64 = w.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
            prop_assert!(w.iter().all(|&v| v >= 0.0));
        }

        #[test]
        fn closer_neighbors_never_weigh_less(
            mut dists in prop::collection::vec(0.0f64..100.0, 2..30)
        ) {
            dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let w = neighbor_weights(&dists).unwrap();
            for pair in w.windows(2) {
                prop_assert!(pair[0] >= pair[1] - 1e-15);
            }
        }

        #[test]
        fn regressor_weights_scale_invariant(
            scale in prop::sample::select(vec![1e-6f64, 1.0, 1e6]),
            errs in prop::collection::vec(0.01f64..10.0, 12)
        ) {
            let d = neighbor_weights(&[0.3, 0.7, 1.3]).unwrap();
            let raw = Array2::from_shape_vec((3, 4), errs).unwrap();
            let scaled = raw.mapv(|v| v * scale);
            let a = regressor_weights(&d, raw.view()).unwrap();
            let b = regressor_weights(&d, scaled.view()).unwrap();
            for (x, y) in a.iter().zip(b.iter()) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }

        #[test]
        fn dw_combination_is_convex(
            preds in prop::collection::vec(-10.0f64..10.0, 4),
            dists in prop::collection::vec(0.01f64..10.0, 3),
            errs in prop::collection::vec(0.01f64..10.0, 12)
        ) {
            let d = neighbor_weights(&dists).unwrap();
            let errors = Array2::from_shape_vec((3, 4), errs).unwrap();
            let alpha = regressor_weights(&d, errors.view()).unwrap();
            let out = dw_combine(&preds, &alpha).unwrap();
            let lo = preds.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = preds.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(out >= lo - 1e-9 && out <= hi + 1e-9);
        }

        #[test]
        fn meta_weights_are_a_distribution(inputs in prop::collection::vec(-5.0f64..5.0, 2)) {
            let (preds, labels) = meta_fixture(200);
            let config = MetaConfig { window_len: 50, epochs: 50, ..MetaConfig::default() };
            let trained = meta_train(preds.view(), &labels, &config, 2).unwrap();
            let w = meta_weights(&trained.model, &inputs).unwrap();
            let sum: f64 = w.alpha.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
            prop_assert!(w.alpha.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }
}
