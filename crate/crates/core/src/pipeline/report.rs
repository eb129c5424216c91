use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::encoding::Assignment;

/// Timing and score breakdown of one quantum HPO run against a classical baseline.
///
/// Timings are wall-clock seconds at full `f64` precision; the text table rounds them
/// to milliseconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub model: String,
    pub metric: String,
    pub classical_method: String,
    pub classical_baseline_time_s: f64,
    pub total_proposed_time_s: f64,
    pub time_saving_s: f64,
    pub time_saving_percent: f64,
    /// `|original_test_score − proposed_test_score|`.
    pub dev_score: f64,
    pub dev_score_percent: f64,
    pub n_hps: usize,
    pub n_layers: usize,
    pub n_samples: usize,
    /// Objective evaluations that built the sample table. Reported, not part of the total.
    pub sample_generation_time_s: f64,
    /// Encoding and normalizing the sample table.
    pub load_data_time_s: f64,
    pub vqa_time_s: f64,
    pub finding_best_hps_time_s: f64,
    pub quantum_to_classic_mapping_time_s: f64,
    pub original_dataset_load_time_s: f64,
    pub model_training_time_s: f64,
    pub proposed_test_score: f64,
    /// True CV score at the proposed assignment, from the same scorer as the baseline.
    pub proposed_cv_score: f64,
    pub original_train_score: f64,
    pub original_test_score: f64,
    /// Best CV score the classical baseline found.
    pub original_cv_score: f64,
    /// Surrogate prediction at the proposed assignment on the raw score scale.
    pub predicted_score: Option<f64>,
    pub proposed_assignment: Assignment,
    pub original_assignment: Assignment,
    pub degenerate_normalization: bool,
    pub n_failed_samples: usize,
    /// Worker threads available to the parallel stages.
    pub threads: usize,
    pub error: Option<String>,
}

/// Fields that hold wall-clock measurements or quantities derived from them.
pub const TIMING_FIELDS: [&str; 11] = [
    "classical_baseline_time_s",
    "total_proposed_time_s",
    "time_saving_s",
    "time_saving_percent",
    "sample_generation_time_s",
    "load_data_time_s",
    "vqa_time_s",
    "finding_best_hps_time_s",
    "quantum_to_classic_mapping_time_s",
    "original_dataset_load_time_s",
    "model_training_time_s",
];

pub fn time_saving(classical_s: f64, proposed_s: f64) -> (f64, f64) {
    let saving = classical_s - proposed_s;
    let percent = if classical_s == 0.0 { 0.0 } else { 100.0 * saving / classical_s };
    (saving, percent)
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Sets the total and the derived saving fields from the stage timings.
    pub fn finalize_timings(&mut self) {
        self.total_proposed_time_s = (self.vqa_time_s + self.finding_best_hps_time_s)
            + (self.load_data_time_s
                + self.quantum_to_classic_mapping_time_s
                + self.original_dataset_load_time_s
                + self.model_training_time_s);
        (self.time_saving_s, self.time_saving_percent) =
            time_saving(self.classical_baseline_time_s, self.total_proposed_time_s);
    }

    /// Every broken invariant, as messages. Empty means the report is valid.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let timings = [
            ("classical_baseline_time_s", self.classical_baseline_time_s),
            ("total_proposed_time_s", self.total_proposed_time_s),
            ("sample_generation_time_s", self.sample_generation_time_s),
            ("load_data_time_s", self.load_data_time_s),
            ("vqa_time_s", self.vqa_time_s),
            ("finding_best_hps_time_s", self.finding_best_hps_time_s),
            ("quantum_to_classic_mapping_time_s", self.quantum_to_classic_mapping_time_s),
            ("original_dataset_load_time_s", self.original_dataset_load_time_s),
            ("model_training_time_s", self.model_training_time_s),
        ];
        for (name, value) in timings {
            if !(value.is_finite() && value >= 0.0) {
                out.push(format!("{name} must be a finite non-negative time, got {value}"));
            }
        }
        let (saving, percent) = time_saving(self.classical_baseline_time_s, self.total_proposed_time_s);
        if self.time_saving_s != saving {
            out.push(format!("time_saving_s is {}, expected {saving}", self.time_saving_s));
        }
        if self.time_saving_percent != percent {
            out.push(format!("time_saving_percent is {}, expected {percent}", self.time_saving_percent));
        }
        if self.total_proposed_time_s < self.vqa_time_s + self.finding_best_hps_time_s {
            out.push("total_proposed_time_s is below vqa_time_s + finding_best_hps_time_s".into());
        }
        if self.error.is_none() {
            let scores = [
                ("dev_score", self.dev_score),
                ("dev_score_percent", self.dev_score_percent),
                ("proposed_test_score", self.proposed_test_score),
                ("proposed_cv_score", self.proposed_cv_score),
                ("original_train_score", self.original_train_score),
                ("original_test_score", self.original_test_score),
                ("original_cv_score", self.original_cv_score),
            ];
            for (name, value) in scores {
                if !value.is_finite() {
                    out.push(format!("{name} is not finite"));
                }
            }
            if self.dev_score != (self.original_test_score - self.proposed_test_score).abs() {
                out.push("dev_score does not match the test scores".into());
            }
            if self.n_hps == 0 || self.n_layers == 0 || self.n_samples == 0 {
                out.push("n_hps, n_layers and n_samples must be positive".into());
            }
            if self.proposed_assignment.len() != self.n_hps {
                out.push("proposed_assignment does not cover every hyperparameter".into());
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), String> {
        let violations = self.violations();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations.join("; "))
        }
    }

    /// JSON value with the timing fields removed, for reproducibility comparisons.
    pub fn content_value(&self) -> serde_json::Value {
        let mut value = serde_json::to_value(self).expect("report serializes");
        if let Some(map) = value.as_object_mut() {
            for field in TIMING_FIELDS {
                map.remove(field);
            }
        }
        value
    }
}

fn case_label(index: usize) -> String {
    let mut label = String::new();
    let mut i = index;
    loop {
        label.insert(0, (b'A' + (i % 26) as u8) as char);
        if i < 26 {
            return label;
        }
        i = i / 26 - 1;
    }
}

/// Side-by-side text table, one column per report.
pub fn render_table(reports: &[RunReport]) -> String {
    type Cell = fn(&RunReport) -> String;
    let rows: Vec<(String, Cell)> = vec![
        ("Model".into(), |r| r.model.clone()),
        ("Metric".into(), |r| r.metric.clone()),
        (
            format!("Classical {} performance time (s)", reports.first().map_or("baseline", |r| r.classical_method.as_str())),
            |r| format!("{:.3}", r.classical_baseline_time_s),
        ),
        ("Total proposed model performance time (s)".into(), |r| format!("{:.3}", r.total_proposed_time_s)),
        ("Time saving (s)".into(), |r| format!("{:.3}", r.time_saving_s)),
        ("Time saving (%)".into(), |r| format!("{:.2}", r.time_saving_percent)),
        ("Dev Score".into(), |r| format!("{:.4}", r.dev_score)),
        ("Dev Score (%)".into(), |r| format!("{:.2}", r.dev_score_percent)),
        ("# HPs".into(), |r| r.n_hps.to_string()),
        ("# Layers".into(), |r| r.n_layers.to_string()),
        ("# Samples".into(), |r| r.n_samples.to_string()),
        ("Sample generation (s)".into(), |r| format!("{:.3}", r.sample_generation_time_s)),
        ("Load Data (ms)".into(), |r| format!("{:.3}", r.load_data_time_s * 1e3)),
        ("VQA (s)".into(), |r| format!("{:.3}", r.vqa_time_s)),
        ("Finding Quantum best HPs (s)".into(), |r| format!("{:.3}", r.finding_best_hps_time_s)),
        ("Data mapping from Quantum to Classic Space (µs)".into(), |r| {
            format!("{:.1}", r.quantum_to_classic_mapping_time_s * 1e6)
        }),
        ("Loading Original dataset time (s)".into(), |r| format!("{:.3}", r.original_dataset_load_time_s)),
        ("Model training (s)".into(), |r| format!("{:.3}", r.model_training_time_s)),
        ("Proposed model Test score".into(), |r| format!("{:.4}", r.proposed_test_score)),
        ("Original Train score".into(), |r| format!("{:.4}", r.original_train_score)),
        ("Original Test score".into(), |r| format!("{:.4}", r.original_test_score)),
        ("Threads".into(), |r| r.threads.to_string()),
    ];

    let mut header = vec!["Cases".to_owned()];
    header.extend((0..reports.len()).map(case_label));
    let mut grid: Vec<Vec<String>> = vec![header];
    for (label, cell) in &rows {
        let mut line = vec![label.clone()];
        line.extend(reports.iter().map(cell));
        grid.push(line);
    }
    let widths: Vec<usize> = (0..=reports.len())
        .map(|c| grid.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
        .collect();

    let mut out = String::new();
    for (i, row) in grid.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            let pad = widths[c] - cell.chars().count();
            if c == 0 {
                let _ = write!(out, "{cell}{}", " ".repeat(pad));
            } else {
                let _ = write!(out, " | {}{cell}", " ".repeat(pad));
            }
        }
        out.push('\n');
        if i == 0 {
            let total = widths.iter().sum::<usize>() + 3 * reports.len();
            out.push_str(&"-".repeat(total));
            out.push('\n');
        }
    }
    for (i, report) in reports.iter().enumerate() {
        if let Some(error) = &report.error {
            let _ = writeln!(out, "{}: error: {error}", case_label(i));
        }
    }
    out
}
