//! Binary-level behavior: exit codes, seed precedence, and the subcommand
//! plumbing between `gen`, `run`, `report`, `ablate`, and `grad-check`.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mmdes_core::data::synthetic::SyntheticConfig;
use mmdes_core::harness::{DataSource, ExperimentConfig};
use mmdes_core::imputation::ImputationMode;
use mmdes_core::report::EvaluationReport;
use mmdes_core::selection::MetaConfig;
use mmdes_core::Modality;

fn mmdes(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mmdes"));
    // Keep ambient settings from leaking into precedence checks.
    cmd.env_remove("MMDES_SEED");
    cmd.args(args);
    cmd
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn small_config(persons: usize, frames: usize) -> ExperimentConfig<f64> {
    ExperimentConfig {
        repetitions: 2,
        context_len: 2,
        k: 12,
        meta: MetaConfig {
            window_len: 25,
            epochs: 40,
            ..MetaConfig::default()
        },
        scenarios: vec![
            ImputationMode::None,
            ImputationMode::Zero {
                modality: Modality::Audio,
            },
        ],
        source: DataSource::Synthetic {
            config: SyntheticConfig {
                persons,
                frames,
                ..SyntheticConfig::default()
            },
        },
        ..ExperimentConfig::default()
    }
}

fn write_config(dir: &Path, config: &ExperimentConfig<f64>) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, config.to_json().unwrap()).unwrap();
    path
}

#[test]
fn help_exits_zero_and_lists_subcommands() {
    let output = mmdes(&["--help"]).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = stdout_of(&output);
    for sub in ["gen", "run", "ablate", "report", "grad-check"] {
        assert!(text.contains(sub), "help must mention `{sub}`");
    }
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(
        mmdes(&["run", "--bogus"]).output().unwrap().status.code(),
        Some(1)
    );
    assert_eq!(
        mmdes(&["no-such-command"]).output().unwrap().status.code(),
        Some(1)
    );
    assert_eq!(mmdes(&["gen"]).output().unwrap().status.code(), Some(1));
}

#[test]
fn operational_failures_exit_two() {
    let output = mmdes(&["report", "/nonexistent/report.json"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let err = String::from_utf8(output.stderr).unwrap();
    assert!(err.starts_with("error:"), "stderr was: {err}");
}

#[test]
fn generated_dataset_feeds_a_manifest_run() {
    let dir = tempfile::tempdir().unwrap();
    let data_dir = dir.path().join("data");
    let output = mmdes(&["gen", "--out"])
        .arg(&data_dir)
        .args(["--persons", "8", "--frames", "120", "--seed", "9"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let manifest = PathBuf::from(stdout_of(&output).trim());
    assert!(manifest.exists(), "gen must print the manifest path");

    let mut config = small_config(8, 120);
    config.source = DataSource::Manifest { path: manifest };
    let config_path = write_config(dir.path(), &config);
    let report_path = dir.path().join("report.json");
    let status = mmdes(&["run", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&report_path)
        .args(["--jobs", "1"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    let report =
        EvaluationReport::<f64>::from_json(&std::fs::read_to_string(&report_path).unwrap())
            .unwrap();
    report.validate().unwrap();
    assert_eq!(report.cells.len(), 20);
}

#[test]
fn seed_flag_env_and_config_rank_in_that_order() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = write_config(dir.path(), &small_config(8, 160));
    let run = |name: &str, seed_flag: Option<&str>, env: Option<&str>| -> Vec<u8> {
        let out = dir.path().join(name);
        let mut cmd = mmdes(&["run", "--config"]);
        cmd.arg(&config_path).arg("--out").arg(&out);
        if let Some(s) = seed_flag {
            cmd.args(["--seed", s]);
        }
        if let Some(s) = env {
            cmd.env("MMDES_SEED", s);
        }
        let status = cmd.status().unwrap();
        assert_eq!(status.code(), Some(0), "{name}");
        std::fs::read(out).unwrap()
    };

    let flag7 = run("flag7.json", Some("7"), None);
    let env7 = run("env7.json", None, Some("7"));
    let flag_beats_env = run("mixed.json", Some("7"), Some("9"));
    let seed9 = run("seed9.json", Some("9"), None);

    assert_eq!(flag7, env7, "flag and env with the same seed must agree");
    assert_eq!(flag7, flag_beats_env, "the flag must outrank the variable");
    assert_ne!(flag7, seed9, "different seeds must change the report");
}

#[test]
fn report_subcommand_renders_saved_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = write_config(dir.path(), &small_config(8, 160));
    let report_path = dir.path().join("report.json");
    let status = mmdes(&["run", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&report_path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    let md = mmdes(&["report"]).arg(&report_path).output().unwrap();
    assert_eq!(md.status.code(), Some(0));
    assert!(stdout_of(&md).contains("## arousal"));

    let csv = mmdes(&["report"])
        .arg(&report_path)
        .args(["--format", "csv"])
        .output()
        .unwrap();
    assert!(stdout_of(&csv).starts_with("target,scenario,method,mean_ccc"));

    let sens = mmdes(&["report"])
        .arg(&report_path)
        .args(["--sensitivity", "--format", "csv"])
        .output()
        .unwrap();
    assert_eq!(sens.status.code(), Some(0));
    let text = stdout_of(&sens);
    assert!(text.starts_with("target,scenario,method,baseline_ccc"));
    assert!(text.contains("zero_audio"));
}

#[test]
fn ablate_prints_a_sensitivity_table() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = small_config(8, 160);
    // Let the flag pick the scenario set instead.
    config.scenarios = vec![ImputationMode::None];
    let config_path = write_config(dir.path(), &config);

    let full_report = dir.path().join("ablation.json");
    let output = mmdes(&["ablate", "--config"])
        .arg(&config_path)
        .args(["--scenario", "mean_video", "--format", "csv", "--report"])
        .arg(&full_report)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = stdout_of(&output);
    assert!(text.starts_with("target,scenario,method,baseline_ccc"));
    assert!(text.contains("mean_video"));
    assert!(!text.contains("zero_audio"), "only the asked-for scenario");

    let report =
        EvaluationReport::<f64>::from_json(&std::fs::read_to_string(&full_report).unwrap())
            .unwrap();
    assert_eq!(report.scenarios(), vec!["none", "mean_video"]);
}

#[test]
fn grad_check_passes_normally_and_fails_when_corrupted() {
    let ok = mmdes(&["grad-check", "--seeds", "3"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let text = stdout_of(&ok);
    assert!(text.contains("seed 0:"));
    assert!(text.contains("seed 2:"));
    assert!(!text.contains("FAIL"));

    let bad = mmdes(&["grad-check", "--seeds", "1", "--corrupt"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(stdout_of(&bad).contains("FAIL"));
}
