//! The iteration loops.
//!
//! `run_apm` handles any certified basis; `run_codim1` is a deliberately
//! separate single-vector implementation used as a cross-check (tests
//! assert the two produce bit-identical traces when N = 1). Both arrange
//! their arithmetic identically: per-entry updates in index order and
//! pairwise-summed reductions.

use rayon::prelude::*;

use super::{IterationTrace, ProblemInstance, RunOptions, Snapshot, StepRecord, TerminalStatus};
use crate::l2core::{dot, SeqVec};
use crate::projections::Basis;
use crate::tol::{ORTHO_RESIDUAL_DEFAULT, STALL_DELTA, STALL_STEPS};
use crate::{Error, Result};

/// Pairwise reduction over index-generated terms; same error profile and
/// split points as the slice dot product, so scalar diagnostics computed
/// either way agree bitwise.
fn sum_by<F: Fn(usize) -> f64>(lo: usize, hi: usize, f: &F) -> f64 {
    const BASE: usize = 256;
    if hi - lo <= BASE {
        return (lo..hi).map(f).sum();
    }
    let mid = lo + (hi - lo) / 2;
    sum_by(lo, mid, f) + sum_by(mid, hi, f)
}

struct Recorder {
    stride: usize,
    tracked_indices: Vec<u64>,
    steps: Vec<StepRecord>,
    snapshots: Vec<Snapshot>,
    tracked_values: Vec<Vec<f64>>,
}

impl Recorder {
    fn new(options: &RunOptions, start: &[f64]) -> Recorder {
        Recorder {
            stride: options.snapshot_stride,
            tracked_indices: options.tracked_indices.clone(),
            steps: Vec::new(),
            snapshots: vec![Snapshot { step: 0, b: start.to_vec(), a: None }],
            tracked_values: Vec::new(),
        }
    }

    fn record(&mut self, j: usize, record: StepRecord, a: &[f64], b: &[f64]) {
        self.steps.push(record);
        self.tracked_values.push(self.tracked_indices.iter().map(|&k| b[k as usize - 1]).collect());
        if j.is_multiple_of(self.stride) {
            self.snapshots.push(Snapshot { step: j, b: b.to_vec(), a: Some(a.to_vec()) });
        }
    }

    fn finish(
        mut self,
        status: TerminalStatus,
        a: &[f64],
        b: Vec<f64>,
        final_coefficients: Vec<f64>,
        basis: Basis,
        options: &RunOptions,
    ) -> IterationTrace {
        let last_step = self.steps.len();
        if self.snapshots.last().map(|s| s.step) != Some(last_step) {
            self.snapshots.push(Snapshot { step: last_step, b: b.clone(), a: Some(a.to_vec()) });
        }
        IterationTrace {
            steps: self.steps,
            snapshots: self.snapshots,
            tracked_indices: self.tracked_indices,
            tracked_values: self.tracked_values,
            final_coefficients,
            limit_estimate: SeqVec::from_entries(b),
            terminal_status: status,
            basis,
            tol_residual: options.tol_residual,
            eps_supp: options.eps_supp,
        }
    }
}

/// Alternate the subspace and cone projections from the instance start.
///
/// Step j computes a_j = b_{j-1} - Q(b_{j-1}) and b_j = (a_j)^+, recording
/// scalar diagnostics every step. Stops Converged once
/// dist_to_A(b_j) + dist_to_B(a_j) + step_delta is within tolerance,
/// Stalled when steps collapse below the floating-point floor, and
/// MaxIters otherwise.
pub fn run_apm(instance: &ProblemInstance) -> Result<IterationTrace> {
    let basis = instance.basis();
    let opts = instance.options();
    let n = instance.truncation();
    let vs: Vec<&[f64]> = basis.vectors().iter().map(SeqVec::as_slice).collect();

    let mut b: Vec<f64> = instance.start().as_slice().to_vec();
    let mut b_next = vec![0.0; n];
    let mut a = vec![0.0; n];
    let mut q = vec![0.0; n];

    let mut recorder = Recorder::new(opts, &b);
    let mut coeffs: Vec<f64> = vs.iter().map(|v| dot(v, &b)).collect();
    let mut stall_run = 0usize;
    let mut status = TerminalStatus::MaxIters;

    for j in 1..=opts.max_iters {
        a.copy_from_slice(&b);
        for (c, v) in coeffs.iter().zip(&vs) {
            for (ae, ve) in a.iter_mut().zip(*v) {
                *ae -= c * ve;
            }
        }
        for (bn, &ae) in b_next.iter_mut().zip(&a) {
            *bn = ae.max(0.0);
        }

        let dist_to_b = sum_by(0, n, &|i| {
            let d = a[i] - b_next[i];
            d * d
        })
        .sqrt();
        let step_delta = sum_by(0, n, &|i| {
            let d = b_next[i] - b[i];
            d * d
        })
        .sqrt();
        let norm_b = sum_by(0, n, &|i| b_next[i] * b_next[i]).sqrt();
        let norm_a = sum_by(0, n, &|i| a[i] * a[i]).sqrt();
        if !(norm_b.is_finite() && norm_a.is_finite()) {
            return Err(Error::NonFiniteIterate { step: j });
        }

        let coeffs_next: Vec<f64> = vs.iter().map(|v| dot(v, &b_next)).collect();
        q.iter_mut().for_each(|e| *e = 0.0);
        for (c, v) in coeffs_next.iter().zip(&vs) {
            for (qe, ve) in q.iter_mut().zip(*v) {
                *qe += c * ve;
            }
        }
        let dist_to_a = sum_by(0, n, &|i| q[i] * q[i]).sqrt();

        let record =
            StepRecord { dist_to_a, dist_to_b, step_delta, norm_b, norm_a, q_coefficients: coeffs };
        let residual = record.residual();
        recorder.record(j, record, &a, &b_next);

        std::mem::swap(&mut b, &mut b_next);
        coeffs = coeffs_next;

        if residual <= opts.tol_residual {
            status = TerminalStatus::Converged;
            break;
        }
        stall_run = if step_delta < STALL_DELTA { stall_run + 1 } else { 0 };
        if stall_run >= STALL_STEPS {
            status = TerminalStatus::Stalled;
            break;
        }
    }

    Ok(recorder.finish(status, &a, b, coeffs, basis.clone(), opts))
}

/// Single-vector specialization: b_{j+1} = (b_j - <b_j, v> v)^+.
///
/// Kept as an independent implementation (scalar coefficient, no basis
/// loop) so the general engine has a second route to compare against.
pub fn run_codim1(v: &SeqVec, start: &SeqVec, options: &RunOptions) -> Result<IterationTrace> {
    let norm = v.norm();
    if (norm - 1.0).abs() > ORTHO_RESIDUAL_DEFAULT {
        return Err(Error::PreconditionViolated(format!(
            "direction must be unit length, got norm {norm}"
        )));
    }
    if start.len() != v.len() {
        return Err(Error::InvalidArgument(format!(
            "start has truncation {} but direction has {}",
            start.len(),
            v.len()
        )));
    }
    options.validate(v.len())?;
    let basis = Basis::orthonormal(vec![v.clone()])?;

    let n = v.len();
    let ve = v.as_slice();
    let mut b: Vec<f64> = start.as_slice().to_vec();
    let mut b_next = vec![0.0; n];
    let mut a = vec![0.0; n];

    let mut recorder = Recorder::new(options, &b);
    let mut c = dot(ve, &b);
    let mut stall_run = 0usize;
    let mut status = TerminalStatus::MaxIters;

    for j in 1..=options.max_iters {
        for i in 0..n {
            a[i] = b[i] - c * ve[i];
        }
        for (bn, &ae) in b_next.iter_mut().zip(&a) {
            *bn = ae.max(0.0);
        }

        let dist_to_b = sum_by(0, n, &|i| {
            let d = a[i] - b_next[i];
            d * d
        })
        .sqrt();
        let step_delta = sum_by(0, n, &|i| {
            let d = b_next[i] - b[i];
            d * d
        })
        .sqrt();
        let norm_b = sum_by(0, n, &|i| b_next[i] * b_next[i]).sqrt();
        let norm_a = sum_by(0, n, &|i| a[i] * a[i]).sqrt();
        if !(norm_b.is_finite() && norm_a.is_finite()) {
            return Err(Error::NonFiniteIterate { step: j });
        }

        let c_next = dot(ve, &b_next);
        let dist_to_a = sum_by(0, n, &|i| {
            let q = c_next * ve[i];
            q * q
        })
        .sqrt();

        let record = StepRecord {
            dist_to_a,
            dist_to_b,
            step_delta,
            norm_b,
            norm_a,
            q_coefficients: vec![c],
        };
        let residual = record.residual();
        recorder.record(j, record, &a, &b_next);

        std::mem::swap(&mut b, &mut b_next);
        c = c_next;

        if residual <= options.tol_residual {
            status = TerminalStatus::Converged;
            break;
        }
        stall_run = if step_delta < STALL_DELTA { stall_run + 1 } else { 0 };
        if stall_run >= STALL_STEPS {
            status = TerminalStatus::Stalled;
            break;
        }
    }

    Ok(recorder.finish(status, &a, b, vec![c], basis, options))
}

/// Run many instances in parallel; output order matches input order and
/// each trace is identical to a sequential run of that instance.
pub fn run_many(instances: &[ProblemInstance]) -> Vec<Result<IterationTrace>> {
    instances.par_iter().map(run_apm).collect()
}
