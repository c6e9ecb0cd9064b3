//! Flat-file artifact writers: trace CSV, plot CSV, report JSON, snapshots.
//!
//! Everything here is deterministic: no timestamps, no map iteration order
//! (serde_json maps sort by key), floats printed with 17 significant
//! digits so a reread recovers the exact bit pattern. Writing the same
//! outcome twice yields byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::RunOutcome;
use crate::apm_engine::IterationTrace;
use crate::Result;

/// Residuals at or below this floor plot as its log10 (-300); an exact
/// zero residual has no honest logarithm.
const PLOT_FLOOR: f64 = 1e-300;

fn float_field(value: f64) -> String {
    format!("{value:.16e}")
}

/// Per-step scalar diagnostics as CSV with columns
/// `j,dist_to_A,dist_to_B,step_delta,norm_b,q_coeff_1..q_coeff_N`.
pub fn trace_csv(trace: &IterationTrace) -> String {
    let coeffs = trace.basis.len();
    let mut out = String::from("j,dist_to_A,dist_to_B,step_delta,norm_b");
    for i in 1..=coeffs {
        let _ = write!(out, ",q_coeff_{i}");
    }
    out.push('\n');
    for (idx, step) in trace.steps.iter().enumerate() {
        let _ = write!(
            out,
            "{},{},{},{},{}",
            idx + 1,
            float_field(step.dist_to_a),
            float_field(step.dist_to_b),
            float_field(step.step_delta),
            float_field(step.norm_b),
        );
        for c in &step.q_coefficients {
            let _ = write!(out, ",{}", float_field(*c));
        }
        out.push('\n');
    }
    out
}

/// Plot data: step index against log10 of the stopping-rule residual.
pub fn plot_csv(trace: &IterationTrace) -> String {
    let mut out = String::from("j,log10_residual\n");
    for (idx, step) in trace.steps.iter().enumerate() {
        let log_res = step.residual().max(PLOT_FLOOR).log10();
        let _ = writeln!(out, "{},{}", idx + 1, float_field(log_res));
    }
    out
}

/// The run report as a JSON value with exactly the keys
/// instance, truncation, verdicts, terminal_status, iterations,
/// final_residual, tail_bound_note.
pub fn report_json(outcome: &RunOutcome) -> Value {
    json!({
        "instance": outcome.id,
        "truncation": outcome.truncation,
        "verdicts": outcome.analysis.verdicts,
        "terminal_status": outcome.trace.terminal_status,
        "iterations": outcome.trace.iterations(),
        "final_residual": outcome.trace.final_residual(),
        "tail_bound_note": outcome.tail_note,
    })
}

/// Stored iterates as JSON: `[{step, b, a}]` with `a` null at step 0.
pub fn snapshots_json(trace: &IterationTrace) -> Value {
    let rows: Vec<Value> =
        trace.snapshots.iter().map(|s| json!({ "step": s.step, "b": s.b, "a": s.a })).collect();
    Value::Array(rows)
}

fn render_json(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("json values always render");
    text.push('\n');
    text
}

/// Write the four artifact files into `dir`, creating it if needed.
/// Returns the paths written, in a fixed order.
pub fn write_run_artifacts(outcome: &RunOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let files = [
        ("trace.csv", trace_csv(&outcome.trace)),
        ("plot.csv", plot_csv(&outcome.trace)),
        ("report.json", render_json(&report_json(outcome))),
        ("snapshots.json", render_json(&snapshots_json(&outcome.trace))),
    ];
    let mut paths = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let path = dir.join(name);
        fs::write(&path, contents)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_configured, RunConfig};

    fn small_outcome() -> RunOutcome {
        let mut config = RunConfig::for_instance("remark-3.2-harmonic");
        config.truncation = 64;
        run_configured(&config).unwrap()
    }

    #[test]
    fn trace_csv_has_the_documented_columns() {
        let outcome = small_outcome();
        let csv = trace_csv(&outcome.trace);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "j,dist_to_A,dist_to_B,step_delta,norm_b,q_coeff_1,q_coeff_2"
        );
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 7);
        assert_eq!(first[0], "1");
        for field in &first[1..] {
            field.parse::<f64>().unwrap();
        }
        assert_eq!(csv.lines().count(), outcome.trace.iterations() + 1);
    }

    #[test]
    fn csv_floats_round_trip_exactly() {
        let outcome = small_outcome();
        let csv = trace_csv(&outcome.trace);
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        let step = &outcome.trace.steps[0];
        assert_eq!(row[1].parse::<f64>().unwrap(), step.dist_to_a);
        assert_eq!(row[4].parse::<f64>().unwrap(), step.norm_b);
    }

    #[test]
    fn plot_csv_tracks_log_residual() {
        let outcome = small_outcome();
        let csv = plot_csv(&outcome.trace);
        let last = csv.lines().last().unwrap();
        let log_res: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
        let expected = outcome.trace.final_residual().max(1e-300).log10();
        assert_eq!(log_res, expected);
    }

    #[test]
    fn report_json_has_exactly_the_documented_keys() {
        let outcome = small_outcome();
        let report = report_json(&outcome);
        let mut keys: Vec<&str> = report.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(
            keys,
            [
                "final_residual",
                "instance",
                "iterations",
                "tail_bound_note",
                "terminal_status",
                "truncation",
                "verdicts",
            ]
        );
        assert_eq!(report["instance"], "remark-3.2-harmonic");
        assert_eq!(report["truncation"], 64);
        assert_eq!(report["terminal_status"], "Converged");
    }

    #[test]
    fn artifacts_are_byte_identical_across_runs() {
        let dir = tempfile::tempdir().unwrap();
        let first_dir = dir.path().join("first");
        let second_dir = dir.path().join("second");
        let config = {
            let mut c = RunConfig::for_instance("remark-4.2-signed");
            c.truncation = 64;
            c
        };
        let first = run_configured(&config).unwrap();
        let second = run_configured(&config).unwrap();
        let first_paths = write_run_artifacts(&first, &first_dir).unwrap();
        let second_paths = write_run_artifacts(&second, &second_dir).unwrap();
        assert_eq!(first_paths.len(), 4);
        for (a, b) in first_paths.iter().zip(&second_paths) {
            let left = std::fs::read(a).unwrap();
            let right = std::fs::read(b).unwrap();
            assert_eq!(left, right, "{a:?} differs");
        }
    }
}
