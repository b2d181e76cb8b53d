//! The regressor pool: one ridge regressor per feature group, trained on
//! windowed standardized features, plus the validation artifacts the
//! selection rules consume (per-frame predictions and squared errors).

use std::path::Path;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::data::window::{FeatureLayout, FrameSample};
use crate::data::{Modality, Target};
use crate::error::{Error, Result};
use crate::metrics::squared_errors;
use crate::scalar::Real;

pub const DEFAULT_LAMBDA: f64 = 1.0;

/// Solves `a x = b` for symmetric positive definite `a` via Cholesky.
fn cholesky_solve<T: Real>(a: &Array2<T>, b: &[T]) -> Result<Vec<T>> {
    let n = b.len();
    let mut l = Array2::<T>::zeros((n, n));
    for j in 0..n {
        let mut diag = a[[j, j]];
        for k in 0..j {
            diag -= l[[j, k]] * l[[j, k]];
        }
        if !(diag > T::zero()) || !diag.is_finite() {
            return Err(Error::Singular(format!(
                "non-positive pivot at column {j}"
            )));
        }
        let root = diag.sqrt();
        l[[j, j]] = root;
        for i in (j + 1)..n {
            let mut v = a[[i, j]];
            for k in 0..j {
                v -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = v / root;
        }
    }
    // L y = b, then L^T x = y.
    let mut y = vec![T::zero(); n];
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v -= l[[i, k]] * y[k];
        }
        y[i] = v / l[[i, i]];
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut v = y[i];
        for k in (i + 1)..n {
            v -= l[[k, i]] * x[k];
        }
        x[i] = v / l[[i, i]];
    }
    Ok(x)
}

/// Fits ridge weights with an appended, unpenalized bias term.
///
/// Solves `(X~^T X~ + lambda * diag(1,..,1,0)) w = X~^T y` where `X~` is
/// `x` with a trailing ones column. Returns `dim + 1` weights, bias last.
pub fn ridge_fit<T: Real>(x: ArrayView2<T>, y: &[T], lambda: T) -> Result<Vec<T>> {
    let n = x.nrows();
    let dim = x.ncols();
    if n != y.len() {
        return Err(Error::LengthMismatch {
            left: n,
            right: y.len(),
        });
    }
    if n == 0 {
        return Err(Error::Empty("design matrix".into()));
    }
    if !(lambda >= T::zero()) {
        return Err(Error::InvalidArgument("lambda must be >= 0".into()));
    }
    if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("ridge input".into()));
    }
    let m = dim + 1;
    let mut a = Array2::<T>::zeros((m, m));
    let mut b = vec![T::zero(); m];
    // Accumulate X~^T X~ and X~^T y in one pass over the rows.
    for (row, &target) in x.rows().into_iter().zip(y.iter()) {
        for i in 0..dim {
            let ri = row[i];
            for j in i..dim {
                a[[i, j]] += ri * row[j];
            }
            a[[i, m - 1]] += ri;
            b[i] += ri * target;
        }
        a[[m - 1, m - 1]] += T::one();
        b[m - 1] += target;
    }
    for i in 0..m {
        for j in 0..i {
            a[[i, j]] = a[[j, i]];
        }
    }
    for i in 0..dim {
        a[[i, i]] += lambda;
    }
    let w = cholesky_solve(&a, &b)?;
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("ridge solution".into()));
    }
    Ok(w)
}

/// A linear regressor over one group's windowed feature span.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regressor<T> {
    pub group_name: String,
    pub modality: Modality,
    /// `span_len` feature weights followed by the bias.
    pub weights: Vec<T>,
    pub lambda: T,
}

impl<T: Real> Regressor<T> {
    pub fn predict_slice(&self, x: &[T]) -> Result<T> {
        if x.len() + 1 != self.weights.len() {
            return Err(Error::LengthMismatch {
                left: x.len() + 1,
                right: self.weights.len(),
            });
        }
        let bias = self.weights[x.len()];
        Ok(x.iter()
            .zip(self.weights.iter())
            .map(|(&a, &w)| a * w)
            .sum::<T>()
            + bias)
    }
}

/// Trains one regressor on the named slot's span of the samples.
pub fn train_ridge<T: Real>(
    samples: &[FrameSample<T>],
    layout: &FeatureLayout,
    slot_index: usize,
    target: Target,
    lambda: T,
) -> Result<Regressor<T>> {
    if samples.len() < 2 {
        return Err(Error::TooShort {
            min: 2,
            got: samples.len(),
        });
    }
    let slot = layout
        .slots
        .get(slot_index)
        .ok_or_else(|| Error::InvalidArgument(format!("slot index {slot_index}")))?;
    let mut x = Array2::<T>::zeros((samples.len(), slot.len));
    let mut y = Vec::with_capacity(samples.len());
    for (r, sample) in samples.iter().enumerate() {
        if sample.x.len() != layout.total_dim {
            return Err(Error::SchemaMismatch(format!(
                "sample width {} vs layout width {}",
                sample.x.len(),
                layout.total_dim
            )));
        }
        for (c, &v) in sample.group_slice(layout, slot_index).iter().enumerate() {
            x[[r, c]] = v;
        }
        y.push(sample.y[target.column()]);
    }
    let weights = ridge_fit(x.view(), &y, lambda)?;
    Ok(Regressor {
        group_name: slot.name.clone(),
        modality: slot.modality,
        weights,
        lambda,
    })
}

/// One regressor per feature group, all predicting the same target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressorPool<T> {
    pub target: Target,
    pub context_len: usize,
    pub regressors: Vec<Regressor<T>>,
}

impl<T: Real + Serialize + for<'de> Deserialize<'de>> RegressorPool<T> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl<T: Real> RegressorPool<T> {
    pub fn len(&self) -> usize {
        self.regressors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regressors.is_empty()
    }

    pub fn column_names(&self) -> Vec<String> {
        self.regressors.iter().map(|r| r.group_name.clone()).collect()
    }

    /// All regressors applied to one sample.
    pub fn predict_frame(&self, layout: &FeatureLayout, sample: &FrameSample<T>) -> Result<Vec<T>> {
        self.regressors
            .iter()
            .enumerate()
            .map(|(i, reg)| reg.predict_slice(sample.group_slice(layout, i)))
            .collect()
    }
}

/// Trains the full pool: one regressor per layout slot, in slot order.
pub fn train_pool<T: Real>(
    samples: &[FrameSample<T>],
    layout: &FeatureLayout,
    target: Target,
    lambda: T,
) -> Result<RegressorPool<T>> {
    let regressors = (0..layout.slots.len())
        .map(|i| train_ridge(samples, layout, i, target, lambda))
        .collect::<Result<Vec<_>>>()?;
    Ok(RegressorPool {
        target,
        context_len: layout.context_len,
        regressors,
    })
}

/// Identifies one prediction column: which group produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionColumn {
    pub name: String,
    pub modality: Modality,
}

/// Pool outputs over a sample set: rows are frames, columns regressors.
#[derive(Clone, Debug, PartialEq)]
pub struct PoolPredictions<T> {
    pub target: Target,
    pub columns: Vec<PredictionColumn>,
    pub values: Array2<T>,
    pub labels: Vec<T>,
}

pub fn predict_pool<T: Real>(
    pool: &RegressorPool<T>,
    samples: &[FrameSample<T>],
    layout: &FeatureLayout,
) -> Result<PoolPredictions<T>> {
    let n = pool.len();
    if n != layout.slots.len() {
        return Err(Error::SchemaMismatch(format!(
            "pool has {n} regressors, layout has {} slots",
            layout.slots.len()
        )));
    }
    let mut values = Array2::<T>::zeros((samples.len(), n));
    let mut labels = Vec::with_capacity(samples.len());
    for (r, sample) in samples.iter().enumerate() {
        let preds = pool.predict_frame(layout, sample)?;
        for (c, &p) in preds.iter().enumerate() {
            values[[r, c]] = p;
        }
        labels.push(sample.y[pool.target.column()]);
    }
    let columns = pool
        .regressors
        .iter()
        .map(|r| PredictionColumn {
            name: r.group_name.clone(),
            modality: r.modality,
        })
        .collect();
    Ok(PoolPredictions {
        target: pool.target,
        columns,
        values,
        labels,
    })
}

/// Validation-side artifacts for the selection rules: per-frame squared
/// errors, the predictions they came from, and the gold labels.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationTable<T> {
    pub columns: Vec<PredictionColumn>,
    pub predictions: Array2<T>,
    pub errors: Array2<T>,
    pub labels: Vec<T>,
}

pub fn build_validation_table<T: Real>(
    pool: &RegressorPool<T>,
    samples: &[FrameSample<T>],
    layout: &FeatureLayout,
) -> Result<ValidationTable<T>> {
    if samples.is_empty() {
        return Err(Error::Empty("validation samples".into()));
    }
    let preds = predict_pool(pool, samples, layout)?;
    let mut errors = Array2::<T>::zeros(preds.values.raw_dim());
    for (c, _) in preds.columns.iter().enumerate() {
        let col: Vec<T> = preds.values.column(c).to_vec();
        let sq = squared_errors(&preds.labels, &col)?;
        for (r, &e) in sq.iter().enumerate() {
            errors[[r, c]] = e;
        }
    }
    Ok(ValidationTable {
        columns: preds.columns,
        predictions: preds.values,
        errors,
        labels: preds.labels,
    })
}

/// Per-person frame counts, so person-disjoint splits survive a round trip
/// through a prediction file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersonSpan {
    pub id: String,
    pub frames: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct PredictionSidecar {
    columns: Vec<PredictionColumn>,
    label_column: String,
    #[serde(default)]
    persons: Vec<PersonSpan>,
}

/// Precomputed regressor outputs loaded from a CSV + sidecar pair.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedPredictions<T> {
    pub columns: Vec<PredictionColumn>,
    pub values: Array2<T>,
    pub labels: Vec<T>,
    pub persons: Vec<PersonSpan>,
}

fn sidecar_path(csv_path: &Path) -> std::path::PathBuf {
    csv_path.with_extension("json")
}

/// Writes predictions as a CSV (one column per regressor plus a label
/// column) and the modality-mapping sidecar next to it.
pub fn save_predictions<T: Real>(
    csv_path: &Path,
    columns: &[PredictionColumn],
    values: &Array2<T>,
    labels: &[T],
    persons: &[PersonSpan],
) -> Result<()> {
    if values.nrows() != labels.len() {
        return Err(Error::LengthMismatch {
            left: values.nrows(),
            right: labels.len(),
        });
    }
    if values.ncols() != columns.len() {
        return Err(Error::SchemaMismatch(format!(
            "{} value columns vs {} column descriptors",
            values.ncols(),
            columns.len()
        )));
    }
    if !persons.is_empty() {
        let total: usize = persons.iter().map(|p| p.frames).sum();
        if total != values.nrows() {
            return Err(Error::FrameCountMismatch(format!(
                "person spans sum to {total}, predictions have {} rows",
                values.nrows()
            )));
        }
    }
    let mut writer = csv::Writer::from_path(csv_path).map_err(|e| Error::CsvParse {
        file: display(csv_path),
        row: 0,
        group: String::new(),
        message: e.to_string(),
    })?;
    let io_err = |e: csv::Error| Error::CsvParse {
        file: display(csv_path),
        row: 0,
        group: String::new(),
        message: e.to_string(),
    };
    let mut header: Vec<String> = columns.iter().map(|c| c.name.clone()).collect();
    header.push("label".into());
    writer.write_record(&header).map_err(io_err)?;
    for (row, &label) in values.rows().into_iter().zip(labels.iter()) {
        let mut cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        cells.push(label.to_string());
        writer.write_record(&cells).map_err(io_err)?;
    }
    writer.flush().map_err(|e| Error::io(csv_path, e))?;
    let sidecar = PredictionSidecar {
        columns: columns.to_vec(),
        label_column: "label".into(),
        persons: persons.to_vec(),
    };
    let path = sidecar_path(csv_path);
    let text = serde_json::to_string_pretty(&sidecar)?;
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(())
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

/// Loads a prediction CSV and its sidecar.
pub fn load_predictions<T: Real>(csv_path: &Path) -> Result<LoadedPredictions<T>> {
    let sidecar_file = sidecar_path(csv_path);
    let text = std::fs::read_to_string(&sidecar_file).map_err(|e| Error::Manifest {
        path: sidecar_file.clone(),
        message: format!("modality mapping sidecar unreadable: {e}"),
    })?;
    let sidecar: PredictionSidecar =
        serde_json::from_str(&text).map_err(|e| Error::Manifest {
            path: sidecar_file.clone(),
            message: e.to_string(),
        })?;
    let file = display(csv_path);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(csv_path)
        .map_err(|e| Error::CsvParse {
            file: file.clone(),
            row: 0,
            group: String::new(),
            message: e.to_string(),
        })?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::CsvParse {
            file: file.clone(),
            row: 1,
            group: String::new(),
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let label_idx = headers
        .iter()
        .position(|h| *h == sidecar.label_column)
        .ok_or_else(|| {
            Error::SchemaMismatch(format!(
                "label column `{}` not in CSV header",
                sidecar.label_column
            ))
        })?;
    let value_headers: Vec<&String> =
        headers.iter().enumerate().filter(|(i, _)| *i != label_idx).map(|(_, h)| h).collect();
    if value_headers.len() != sidecar.columns.len() {
        return Err(Error::SchemaMismatch(format!(
            "mapping names {} columns but CSV has {}",
            sidecar.columns.len(),
            value_headers.len()
        )));
    }
    for (h, c) in value_headers.iter().zip(sidecar.columns.iter()) {
        if **h != c.name {
            return Err(Error::SchemaMismatch(format!(
                "CSV column `{h}` vs mapped column `{}`",
                c.name
            )));
        }
    }
    let n = sidecar.columns.len();
    let mut data: Vec<T> = Vec::new();
    let mut labels: Vec<T> = Vec::new();
    let mut rows = 0usize;
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::CsvParse {
            file: file.clone(),
            row: line,
            group: String::new(),
            message: e.to_string(),
        })?;
        if record.len() != headers.len() {
            return Err(Error::CsvParse {
                file,
                row: line,
                group: String::new(),
                message: format!("expected {} values, got {}", headers.len(), record.len()),
            });
        }
        for (j, value) in record.iter().enumerate() {
            let parsed: f64 = value.trim().parse().map_err(|_| Error::CsvParse {
                file: file.clone(),
                row: line,
                group: String::new(),
                message: format!("`{value}` is not a number"),
            })?;
            if j == label_idx {
                labels.push(T::cast(parsed));
            } else {
                data.push(T::cast(parsed));
            }
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::Empty(format!("prediction file {file}")));
    }
    let values = Array2::from_shape_vec((rows, n), data)
        .map_err(|e| Error::SchemaMismatch(e.to_string()))?;
    if !sidecar.persons.is_empty() {
        let total: usize = sidecar.persons.iter().map(|p| p.frames).sum();
        if total != rows {
            return Err(Error::FrameCountMismatch(format!(
                "person spans sum to {total}, CSV has {rows} rows"
            )));
        }
    }
    Ok(LoadedPredictions {
        columns: sidecar.columns,
        values,
        labels,
        persons: sidecar.persons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::window::{frame_samples, FeatureLayout};
    use crate::data::{FeatureGroup, GroupSpec, PersonRecord};
    use approx::assert_abs_diff_eq;
    use ndarray::arr2;

    #[test]
    fn exact_fit_without_regularization() {
        let x = arr2(&[[1.0], [2.0], [3.0]]);
        let w = ridge_fit(x.view(), &[2.0, 4.0, 6.0], 0.0).unwrap();
        assert_abs_diff_eq!(w[0], 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(w[1], 0.0, epsilon = 1e-10);
    }

    #[test]
    fn huge_lambda_shrinks_slope_not_bias() {
        let x = arr2(&[[1.0, -0.5], [2.0, 0.5], [3.0, 1.5], [4.0, -1.0]]);
        let y = [1.0, 3.0, 2.0, 4.0];
        let w: Vec<f64> = ridge_fit(x.view(), &y, 1e12).unwrap();
        assert!(w[0].abs() < 1e-6 && w[1].abs() < 1e-6);
        assert_abs_diff_eq!(w[2], 2.5, epsilon = 1e-6);
    }

    /// Gauss-Jordan solve of the same normal equations, kept independent of
    /// the production Cholesky path.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
                .unwrap();
            a.swap(col, pivot);
            b.swap(col, pivot);
            let p = a[col][col];
            for j in 0..n {
                a[col][j] /= p;
            }
            b[col] /= p;
            for i in 0..n {
                if i != col {
                    let f = a[i][col];
                    for j in 0..n {
                        a[i][j] -= f * a[col][j];
                    }
                    b[i] -= f * b[col];
                }
            }
        }
        b
    }

    #[test]
    fn matches_independent_normal_equation_solver() {
        // Deterministic 50 x 5 design, no RNG involved.
        let n = 50;
        let d = 5;
        let mut x = Array2::<f64>::zeros((n, d));
        let mut y = vec![0.0; n];
        for i in 0..n {
            for j in 0..d {
                x[[i, j]] = ((i * (j + 3)) as f64 * 0.37).sin() + 0.1 * j as f64;
            }
            y[i] = (i as f64 * 0.11).cos() + 0.05 * i as f64;
        }
        let lambda = 0.1;
        let w = ridge_fit(x.view(), &y, lambda).unwrap();

        let m = d + 1;
        let mut a = vec![vec![0.0; m]; m];
        let mut b = vec![0.0; m];
        for i in 0..n {
            let mut row: Vec<f64> = x.row(i).to_vec();
            row.push(1.0);
            for p in 0..m {
                for q in 0..m {
                    a[p][q] += row[p] * row[q];
                }
                b[p] += row[p] * y[i];
            }
        }
        for p in 0..d {
            a[p][p] += lambda;
        }
        let expected = dense_solve(a, b);
        for (got, want) in w.iter().zip(expected.iter()) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-8);
        }
    }

    #[test]
    fn constant_feature_is_fine_with_regularization() {
        let x = arr2(&[[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]]);
        let w: Vec<f64> = ridge_fit(x.view(), &[1.0, 2.0, 3.0], 1.0).unwrap();
        assert!(w.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn collinear_unregularized_errors() {
        let x = arr2(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]);
        let e = ridge_fit(x.view(), &[1.0, 2.0, 3.0], 0.0).unwrap_err();
        assert!(matches!(e, Error::Singular(_)));
    }

    #[test]
    fn negative_lambda_is_rejected() {
        let x = arr2(&[[1.0], [2.0]]);
        assert!(matches!(
            ridge_fit(x.view(), &[1.0, 2.0], -1.0).unwrap_err(),
            Error::InvalidArgument(_)
        ));
    }

    #[test]
    fn predict_slice_applies_weights_and_bias() {
        let reg = Regressor {
            group_name: "g".into(),
            modality: Modality::Audio,
            weights: vec![2.0, 1.0],
            lambda: 0.0,
        };
        assert_eq!(reg.predict_slice(&[3.0]).unwrap(), 7.0);
        assert!(reg.predict_slice(&[1.0, 2.0]).is_err());
    }

    fn two_group_record(frames: usize) -> (PersonRecord<f64>, FeatureLayout) {
        let schema = vec![
            GroupSpec {
                name: "au".into(),
                modality: Modality::Audio,
                dim: 2,
            },
            GroupSpec {
                name: "vi".into(),
                modality: Modality::Video,
                dim: 1,
            },
        ];
        let mut audio = Array2::<f64>::zeros((frames, 2));
        let mut video = Array2::<f64>::zeros((frames, 1));
        let mut labels = Array2::<f64>::zeros((frames, 2));
        for t in 0..frames {
            let a = (t as f64 * 0.3).sin();
            let v = (t as f64 * 0.2).cos();
            audio[[t, 0]] = a;
            audio[[t, 1]] = 0.5 * a + 0.01 * (t as f64 * 1.7).sin();
            video[[t, 0]] = v;
            labels[[t, 0]] = a;
            labels[[t, 1]] = v;
        }
        let record = PersonRecord {
            person_id: "p".into(),
            groups: vec![
                FeatureGroup {
                    name: "au".into(),
                    modality: Modality::Audio,
                    values: audio,
                },
                FeatureGroup {
                    name: "vi".into(),
                    modality: Modality::Video,
                    values: video,
                },
            ],
            labels,
        };
        let layout = FeatureLayout::new(&schema, 2).unwrap();
        (record, layout)
    }

    #[test]
    fn pool_trains_one_regressor_per_group() {
        let (record, layout) = two_group_record(60);
        let samples = frame_samples(&record, &layout).unwrap();
        let pool = train_pool(&samples, &layout, Target::Arousal, 1e-6).unwrap();
        assert_eq!(pool.len(), 2);
        assert_eq!(pool.regressors[0].group_name, "au");
        assert_eq!(pool.regressors[0].weights.len(), 2 * 2 + 1);
        assert_eq!(pool.regressors[1].weights.len(), 1 * 2 + 1);
        // The audio regressor sees arousal directly, so it fits well.
        let table = build_validation_table(&pool, &samples, &layout).unwrap();
        let audio_err: f64 = table.errors.column(0).sum();
        let video_err: f64 = table.errors.column(1).sum();
        assert!(audio_err < video_err);
        assert!(audio_err / (samples.len() as f64) < 1e-3);
    }

    #[test]
    fn constant_input_gives_constant_prediction_column() {
        let (record, layout) = two_group_record(40);
        let samples = frame_samples(&record, &layout).unwrap();
        let pool = train_pool(&samples, &layout, Target::Arousal, 1.0).unwrap();
        let mut zeroed = samples.clone();
        for s in &mut zeroed {
            let slot = &layout.slots[0];
            s.x[slot.offset..slot.offset + slot.len].fill(0.0);
        }
        let preds = predict_pool(&pool, &zeroed, &layout).unwrap();
        let col0: Vec<f64> = preds.values.column(0).to_vec();
        assert!(col0.iter().all(|&v| (v - col0[0]).abs() < 1e-12));
        // Video column is untouched by zeroing audio.
        let base = predict_pool(&pool, &samples, &layout).unwrap();
        assert_eq!(preds.values.column(1), base.values.column(1));
    }

    #[test]
    fn validation_table_shapes_and_errors() {
        let (record, layout) = two_group_record(30);
        let samples = frame_samples(&record, &layout).unwrap();
        let pool = train_pool(&samples, &layout, Target::Valence, 1e-8).unwrap();
        let table = build_validation_table(&pool, &samples, &layout).unwrap();
        assert_eq!(table.errors.nrows(), 30);
        assert_eq!(table.errors.ncols(), 2);
        assert_eq!(table.labels.len(), 30);
        // Video predicts valence nearly perfectly here.
        assert!(table.errors.column(1).sum() / 30.0 < 1e-6);
        for r in 0..30 {
            for c in 0..2 {
                let d = table.predictions[[r, c]] - table.labels[r];
                assert_abs_diff_eq!(table.errors[[r, c]], d * d, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn too_few_samples_error() {
        let (record, layout) = two_group_record(10);
        let samples = frame_samples(&record, &layout).unwrap();
        let e = train_ridge(&samples[..1], &layout, 0, Target::Arousal, 1.0).unwrap_err();
        assert!(matches!(e, Error::TooShort { min: 2, got: 1 }));
    }

    #[test]
    fn pool_json_round_trip() {
        let (record, layout) = two_group_record(20);
        let samples = frame_samples(&record, &layout).unwrap();
        let pool = train_pool(&samples, &layout, Target::Arousal, 1.0).unwrap();
        let text = pool.to_json().unwrap();
        let back = RegressorPool::<f64>::from_json(&text).unwrap();
        assert_eq!(pool, back);
    }

    #[test]
    fn predictions_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("preds.csv");
        let columns = vec![
            PredictionColumn {
                name: "au".into(),
                modality: Modality::Audio,
            },
            PredictionColumn {
                name: "vi".into(),
                modality: Modality::Video,
            },
        ];
        let values = arr2(&[[0.25, -0.5], [0.125, 0.75], [1.0, 2.0]]);
        let labels = vec![0.2, 0.1, 1.5];
        let persons = vec![
            PersonSpan {
                id: "a".into(),
                frames: 2,
            },
            PersonSpan {
                id: "b".into(),
                frames: 1,
            },
        ];
        save_predictions(&path, &columns, &values, &labels, &persons).unwrap();
        let loaded: LoadedPredictions<f64> = load_predictions(&path).unwrap();
        assert_eq!(loaded.columns, columns);
        assert_eq!(loaded.values, values);
        assert_eq!(loaded.labels, labels);
        assert_eq!(loaded.persons, persons);
    }

    #[test]
    fn mapping_width_mismatch_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("preds.csv");
        let columns = vec![PredictionColumn {
            name: "au".into(),
            modality: Modality::Audio,
        }];
        let values = arr2(&[[0.25], [0.125]]);
        save_predictions(&path, &columns, &values, &[0.2, 0.1], &[]).unwrap();
        // Rewrite the sidecar to claim a second column the CSV lacks.
        let sidecar = path.with_extension("json");
        let sidecar_obj = PredictionSidecar {
            columns: vec![
                PredictionColumn {
                    name: "au".into(),
                    modality: Modality::Audio,
                },
                PredictionColumn {
                    name: "vi".into(),
                    modality: Modality::Video,
                },
            ],
            label_column: "label".into(),
            persons: vec![],
        };
        std::fs::write(
            &sidecar,
            serde_json::to_string(&sidecar_obj).unwrap(),
        )
        .unwrap();
        let err = load_predictions::<f64>(&path).unwrap_err();
        assert!(matches!(err, Error::SchemaMismatch(_)), "{err}");
    }

    #[test]
    fn missing_sidecar_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("preds.csv");
        std::fs::write(&path, "au,label\n1.0,1.0\n").unwrap();
        let err = load_predictions::<f64>(&path).unwrap_err();
        assert!(matches!(err, Error::Manifest { .. }));
    }

    #[test]
    fn span_sum_mismatch_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("preds.csv");
        let columns = vec![PredictionColumn {
            name: "au".into(),
            modality: Modality::Audio,
        }];
        let values = arr2(&[[0.25], [0.125]]);
        let persons = vec![PersonSpan {
            id: "a".into(),
            frames: 3,
        }];
        let err =
            save_predictions(&path, &columns, &values, &[0.2, 0.1], &persons).unwrap_err();
        assert!(matches!(err, Error::FrameCountMismatch(_)));
    }
}
