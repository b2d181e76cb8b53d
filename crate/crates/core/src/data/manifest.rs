//! Dataset manifest and CSV ingestion/emission.
//!
//! A dataset on disk is a JSON manifest pointing at one feature CSV per
//! (person, group) plus one label CSV per person. Feature CSVs carry the
//! header `f0..f{dim-1}`; label CSVs carry `arousal,valence`. Paths in the
//! manifest are resolved relative to the manifest's directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::data::{FeatureGroup, GroupSpec, MultimodalDataset, PersonRecord};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ManifestPerson {
    id: String,
    files: BTreeMap<String, PathBuf>,
    labels: PathBuf,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ManifestFile {
    frame_rate_hz: f64,
    groups: Vec<GroupSpec>,
    persons: Vec<ManifestPerson>,
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn read_matrix<T: Real>(
    path: &Path,
    group: &str,
    expected_header: &[String],
) -> Result<Array2<T>> {
    let file = display(path);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::CsvParse {
            file: file.clone(),
            row: 0,
            group: group.into(),
            message: e.to_string(),
        })?;
    let headers = reader.headers().map_err(|e| Error::CsvParse {
        file: file.clone(),
        row: 1,
        group: group.into(),
        message: e.to_string(),
    })?;
    let got: Vec<String> = headers.iter().map(|h| h.trim().to_string()).collect();
    if got != expected_header {
        return Err(Error::CsvParse {
            file,
            row: 1,
            group: group.into(),
            message: format!(
                "header [{}] does not match expected [{}]",
                got.join(","),
                expected_header.join(",")
            ),
        });
    }
    let dim = expected_header.len();
    let mut data: Vec<T> = Vec::new();
    let mut rows = 0usize;
    for (i, record) in reader.records().enumerate() {
        // Line 1 is the header, so data row i sits on line i + 2.
        let line = i + 2;
        let record = record.map_err(|e| Error::CsvParse {
            file: file.clone(),
            row: e
                .position()
                .map(|p| p.line() as usize)
                .unwrap_or(line),
            group: group.into(),
            message: e.to_string(),
        })?;
        if record.len() != dim {
            return Err(Error::CsvParse {
                file,
                row: line,
                group: group.into(),
                message: format!("expected {dim} values, got {}", record.len()),
            });
        }
        for value in record.iter() {
            let parsed: f64 = value.trim().parse().map_err(|_| Error::CsvParse {
                file: file.clone(),
                row: line,
                group: group.into(),
                message: format!("`{value}` is not a number"),
            })?;
            data.push(T::cast(parsed));
        }
        rows += 1;
    }
    Array2::from_shape_vec((rows, dim), data).map_err(|e| Error::CsvParse {
        file,
        row: rows,
        group: group.into(),
        message: e.to_string(),
    })
}

fn feature_header(dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("f{i}")).collect()
}

fn label_header() -> Vec<String> {
    vec!["arousal".into(), "valence".into()]
}

/// Loads a dataset from a manifest path and validates it.
pub fn load_dataset<T: Real>(manifest_path: &Path) -> Result<MultimodalDataset<T>> {
    let text = fs::read_to_string(manifest_path)
        .map_err(|e| Error::io(manifest_path, e))?;
    let manifest: ManifestFile =
        serde_json::from_str(&text).map_err(|e| Error::Manifest {
            path: manifest_path.to_path_buf(),
            message: e.to_string(),
        })?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let mut persons = Vec::with_capacity(manifest.persons.len());
    for person in &manifest.persons {
        let mut groups = Vec::with_capacity(manifest.groups.len());
        for spec in &manifest.groups {
            let rel = person.files.get(&spec.name).ok_or_else(|| {
                Error::SchemaMismatch(format!(
                    "person `{}` lacks a file for declared group `{}`",
                    person.id, spec.name
                ))
            })?;
            let values =
                read_matrix::<T>(&base.join(rel), &spec.name, &feature_header(spec.dim))?;
            groups.push(FeatureGroup {
                name: spec.name.clone(),
                modality: spec.modality,
                values,
            });
        }
        for extra in person.files.keys() {
            if !manifest.groups.iter().any(|g| &g.name == extra) {
                return Err(Error::UnknownGroup(format!(
                    "{extra}` listed for person `{}",
                    person.id
                )));
            }
        }
        let labels =
            read_matrix::<T>(&base.join(&person.labels), "labels", &label_header())?;
        persons.push(PersonRecord {
            person_id: person.id.clone(),
            groups,
            labels,
        });
    }
    let dataset = MultimodalDataset {
        frame_rate_hz: manifest.frame_rate_hz,
        schema: manifest.groups,
        persons,
    };
    dataset.validate()?;
    Ok(dataset)
}

fn write_matrix<T: Real>(path: &Path, header: &[String], values: &Array2<T>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::CsvParse {
        file: display(path),
        row: 0,
        group: String::new(),
        message: e.to_string(),
    })?;
    let io_err = |e: csv::Error| Error::CsvParse {
        file: display(path),
        row: 0,
        group: String::new(),
        message: e.to_string(),
    };
    writer.write_record(header).map_err(io_err)?;
    for row in values.rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writer.write_record(&cells).map_err(io_err)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Writes a dataset under `dir` (one subdirectory per person) and returns
/// the manifest path.
pub fn write_dataset<T: Real>(dataset: &MultimodalDataset<T>, dir: &Path) -> Result<PathBuf> {
    dataset.validate()?;
    for p in &dataset.persons {
        if p.person_id.contains(['/', '\\']) || p.person_id.contains("..") {
            return Err(Error::InvalidArgument(format!(
                "person id `{}` is not usable as a directory name",
                p.person_id
            )));
        }
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut persons = Vec::with_capacity(dataset.persons.len());
    for person in &dataset.persons {
        let person_dir = dir.join(&person.person_id);
        fs::create_dir_all(&person_dir).map_err(|e| Error::io(&person_dir, e))?;
        let mut files = BTreeMap::new();
        for group in &person.groups {
            let rel = PathBuf::from(&person.person_id).join(format!("{}.csv", group.name));
            write_matrix(
                &dir.join(&rel),
                &feature_header(group.dim()),
                &group.values,
            )?;
            files.insert(group.name.clone(), rel);
        }
        let labels_rel = PathBuf::from(&person.person_id).join("labels.csv");
        write_matrix(&dir.join(&labels_rel), &label_header(), &person.labels)?;
        persons.push(ManifestPerson {
            id: person.person_id.clone(),
            files,
            labels: labels_rel,
        });
    }
    let manifest = ManifestFile {
        frame_rate_hz: dataset.frame_rate_hz,
        groups: dataset.schema.clone(),
        persons,
    };
    let manifest_path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest)?;
    fs::write(&manifest_path, text + "\n").map_err(|e| Error::io(&manifest_path, e))?;
    Ok(manifest_path)
}
