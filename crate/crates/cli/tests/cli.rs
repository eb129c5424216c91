use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qhpo::pipeline::{RunReport, TIMING_FIELDS};
use qhpo::Checkpoint;
use qhpo_cli::{
    read_json_object, read_surface, BASELINE_JSON, MODEL_JSON, OUTPUT_DIR_ENV, REPORT_JSON, SAMPLES_CSV,
    SURFACE_CSV,
};

const CONTINUOUS: &str = r#"
seed = 5
n_layers = 2

[objective]
model = "ridge"
metric = "r2"

[objective.dataset]
kind = "synthetic"
n_samples = 80

[[space.dimension]]
name = "alpha"
kind = "continuous"
low = 0.001
high = 100.0
log = true

[sampling]
n_samples = 15

[search]
learning_rate = 0.05
max_epochs = 400

[baseline]
method = "random"
budget = 10

[surface]
axes = ["alpha"]
"#;

fn qhpo(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhpo"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--output-dir")
        .arg(out)
        .env_remove(OUTPUT_DIR_ENV)
        .output()
        .unwrap()
}

fn ok(output: &Output) {
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

#[test]
fn generate_writes_one_row_per_sample() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    ok(&qhpo(&["generate"], &bundled("knn.toml"), &out));
    let csv = std::fs::read_to_string(out.join(SAMPLES_CSV)).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "n_neighbors,raw_score,normalized_score");
    assert_eq!(lines.count(), 12);
}

#[test]
fn missing_dataset_is_a_config_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        &CONTINUOUS.replace("kind = \"synthetic\"\nn_samples = 80", "kind = \"csv\"\npath = \"absent.csv\""),
    );
    let out = dir.path().join("out");
    let output = qhpo(&["optimize"], &config, &out);
    assert_eq!(output.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &format!("{CONTINUOUS}\nbogus = 1\n"));
    let out = dir.path().join("out");
    assert_eq!(qhpo(&["generate"], &config, &out).status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn same_seed_gives_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), CONTINUOUS);
    let runs: Vec<PathBuf> = (0..2).map(|i| dir.path().join(format!("run{i}"))).collect();
    for out in &runs {
        ok(&qhpo(&["optimize"], &config, out));
        ok(&qhpo(&["baseline"], &config, &out.join("b")));
    }
    let read = |p: &Path| std::fs::read(p).unwrap();
    assert_eq!(read(&runs[0].join(SAMPLES_CSV)), read(&runs[1].join(SAMPLES_CSV)));
    assert_eq!(read(&runs[0].join(MODEL_JSON)), read(&runs[1].join(MODEL_JSON)));

    let report = |p: &Path| RunReport::from_json(&std::fs::read_to_string(p).unwrap()).unwrap();
    let (a, b) = (report(&runs[0].join(REPORT_JSON)), report(&runs[1].join(REPORT_JSON)));
    assert_eq!(a.content_value(), b.content_value());
    a.validate().unwrap();
    for field in TIMING_FIELDS {
        assert!(a.content_value().get(field).is_none());
    }

    let baseline = |p: &Path| {
        let mut map = read_json_object(&p.join("b").join(BASELINE_JSON)).unwrap();
        map.shift_remove("elapsed_s").unwrap();
        map
    };
    assert_eq!(baseline(&runs[0]), baseline(&runs[1]));
}

#[test]
fn surface_matches_search_on_one_axis() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), CONTINUOUS);
    let out = dir.path().join("out");
    ok(&qhpo(&["optimize"], &config, &out));
    ok(&qhpo(&["surface"], &config, &out));

    let rows = read_surface(&out.join(SURFACE_CSV)).unwrap();
    assert_eq!(rows.len(), 101);
    assert!(rows.iter().all(|(_, v)| (-1.0..=1.0).contains(v)));

    let checkpoint = Checkpoint::from_json(&std::fs::read_to_string(out.join(MODEL_JSON)).unwrap()).unwrap();
    let bounds = checkpoint.score_bounds.unwrap();
    let report = RunReport::from_json(&std::fs::read_to_string(out.join(REPORT_JSON)).unwrap()).unwrap();
    let found = bounds.normalize(report.predicted_score.unwrap());
    let grid_best = rows.iter().map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
    assert!((found - grid_best).abs() <= 1e-2, "search {found} vs grid {grid_best}");
}

#[test]
fn surface_rejects_a_checkpoint_from_another_space() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), CONTINUOUS);
    let out = dir.path().join("out");
    ok(&qhpo(&["optimize"], &config, &out));
    let changed = write_config(dir.path(), &CONTINUOUS.replace("high = 100.0", "high = 50.0"));
    let output = qhpo(&["surface"], &changed, &out);
    assert_eq!(output.status.code(), Some(1));
    assert!(!out.join(SURFACE_CSV).exists());
}

#[test]
fn environment_overrides_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), CONTINUOUS);
    let flagged = dir.path().join("flagged");
    let env_dir = dir.path().join("from-env");
    let output = Command::new(env!("CARGO_BIN_EXE_qhpo"))
        .args(["generate", "--config"])
        .arg(&config)
        .arg("--output-dir")
        .arg(&flagged)
        .env(OUTPUT_DIR_ENV, &env_dir)
        .output()
        .unwrap();
    ok(&output);
    assert!(env_dir.join(SAMPLES_CSV).exists());
    assert!(!flagged.exists());
}

#[test]
fn missing_config_flag_exits_with_config_error() {
    let output = Command::new(env!("CARGO_BIN_EXE_qhpo")).arg("generate").output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}
