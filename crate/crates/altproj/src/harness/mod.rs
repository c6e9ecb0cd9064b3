//! Instance registry, run orchestration, file exports, acceptance suite.
//!
//! The harness ties the other modules together behind reproducible
//! artifacts: a named catalog of problem instances, a versioned JSON run
//! configuration, CSV/JSON exporters, and the acceptance criteria as
//! callable checks. A stored config rerun on the same build produces
//! byte-identical files.

mod catalog;
mod config;
mod export;
mod suite;

pub use catalog::{
    catalog, cone_direction, disjoint_triple, find, geometric_rotating_pair,
    harmonic_disjoint_pair, kind_of, signed_overlap_pair, two_weight_geometric_pair,
    validate_entry, verdict_kinds, CatalogEntry, VerdictKind,
};
pub use config::{
    RunConfig, StartSpec, RANDOM_SUPPORT_DEFAULT, SCHEMA_VERSION, TRUNCATION_DEFAULT,
};
pub use export::{plot_csv, report_json, snapshots_json, trace_csv, write_run_artifacts};
pub use suite::{run_suite, suite_summary_json, CriterionResult, SuiteOptions};

use crate::apm_engine::{run_apm, IterationTrace, ProblemInstance, RunOptions};
use crate::l2core::GeneratorDesc;
use crate::structure::{analyze, check_pairwise_disjoint, solve_by_decomposition, AnalysisReport};
use crate::tol::EPS_SUPP_DEFAULT;
use crate::{Error, Result};

/// Solver-comparison runs keep full iterates at every step, so their
/// length is capped to bound memory; convergence runs are not affected.
pub const COMPARE_MAX_STEPS: usize = 800;

/// Everything one configured run produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// Catalog id, or "inline" for ad-hoc generator lists.
    pub id: String,
    pub truncation: usize,
    pub analysis: AnalysisReport,
    pub trace: IterationTrace,
    /// Whether the disjoint-support decomposition solver was used.
    pub used_decomposition: bool,
    /// Human-readable statement of the truncation error scale.
    pub tail_note: String,
}

/// How severely the chosen truncation limits what residuals can mean.
fn tail_note(generators: &[GeneratorDesc], n: usize) -> String {
    let worst = generators.iter().map(|d| d.tail_bound(n)).fold(0.0f64, f64::max);
    format!(
        "largest generator l2 tail bound at truncation {n} is {worst:.2e} \
         (norm-squared error up to {:.2e}); structure beyond that scale \
         belongs to the discarded tail",
        worst * worst
    )
}

/// Run one configured problem: analyzer first, then the decomposition
/// solver when every support pair is disjoint, the direct solver
/// otherwise.
pub fn run_configured(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let n = config.truncation;

    let (id, generators, start_spec) = match (&config.instance, &config.generators) {
        (Some(id), None) => {
            let entry = find(id)?;
            if n < entry.min_truncation {
                return Err(Error::Config(format!(
                    "instance {id:?} needs truncation >= {}, got {n}",
                    entry.min_truncation
                )));
            }
            let start = config.start.clone().unwrap_or(entry.default_start.clone());
            (entry.id.to_string(), entry.generators, start)
        }
        (None, Some(descs)) => {
            let start = config.start.clone().expect("validate requires a start here");
            ("inline".to_string(), descs.clone(), start)
        }
        _ => unreachable!("validate admits exactly one source"),
    };

    let basis = crate::projections::Basis::from_generators(&generators, n)?;
    let analysis = analyze(&basis, EPS_SUPP_DEFAULT, n as u64)?;
    let start = start_spec.materialize(n)?;
    let options = RunOptions {
        tol_residual: config.tol_residual,
        max_iters: config.max_iters,
        snapshot_stride: config.snapshot_stride,
        tracked_indices: config.tracked_indices.clone(),
        eps_supp: EPS_SUPP_DEFAULT,
    };
    let instance = ProblemInstance::new(basis, start, options)?;

    let used_decomposition = analysis.decomposable();
    let trace =
        if used_decomposition { solve_by_decomposition(&instance)? } else { run_apm(&instance)? };

    Ok(RunOutcome {
        id,
        truncation: n,
        analysis,
        trace,
        used_decomposition,
        tail_note: tail_note(&generators, n),
    })
}

/// Result of running both solvers on one disjoint-support instance.
#[derive(Debug, Clone)]
pub struct CompareReport {
    pub id: String,
    pub truncation: usize,
    /// Steps both solvers produced (they must agree on the count).
    pub steps_compared: usize,
    /// Largest absolute iterate deviation at each step.
    pub per_step: Vec<f64>,
    pub max_deviation: f64,
    /// Deviation at most 1e-12 everywhere, with matching terminal status.
    pub pass: bool,
}

/// Run the direct and the decomposition solver on a catalog instance and
/// compare their iterates step by step. The instance must analyze as
/// pairwise disjoint; runs are capped at [`COMPARE_MAX_STEPS`] steps.
pub fn compare_solvers(id: &str, truncation: usize) -> Result<CompareReport> {
    let entry = find(id)?;
    let basis = entry.basis(truncation)?;
    let disjoint = check_pairwise_disjoint(&basis, EPS_SUPP_DEFAULT);
    if !disjoint.disjoint {
        let pairs: Vec<String> =
            disjoint.overlaps.iter().map(|o| format!("({}, {})", o.first, o.second)).collect();
        return Err(Error::PreconditionViolated(format!(
            "instance {id:?} has overlapping supports at vector pairs {}",
            pairs.join(", ")
        )));
    }

    let options =
        RunOptions { max_iters: COMPARE_MAX_STEPS, snapshot_stride: 1, ..RunOptions::default() };
    let start = entry.start(truncation)?;
    let instance = ProblemInstance::new(basis, start, options)?;
    let direct = run_apm(&instance)?;
    let split = solve_by_decomposition(&instance)?;

    let steps_compared = direct.iterations().min(split.iterations());
    let mut per_step = Vec::with_capacity(steps_compared);
    // Stride 1 keeps one snapshot per step: index 0 is the start, index j
    // is step j for both traces.
    for j in 1..=steps_compared {
        let (d, s) = (&direct.snapshots[j], &split.snapshots[j]);
        let mut worst = 0.0f64;
        for (x, y) in d.b.iter().zip(&s.b) {
            worst = worst.max((x - y).abs());
        }
        if let (Some(da), Some(sa)) = (&d.a, &s.a) {
            for (x, y) in da.iter().zip(sa) {
                worst = worst.max((x - y).abs());
            }
        }
        per_step.push(worst);
    }
    let max_deviation = per_step.iter().copied().fold(0.0, f64::max);
    let pass = direct.iterations() == split.iterations()
        && direct.terminal_status == split.terminal_status
        && max_deviation <= 1e-12;

    Ok(CompareReport {
        id: entry.id.to_string(),
        truncation,
        steps_compared,
        per_step,
        max_deviation,
        pass,
    })
}
