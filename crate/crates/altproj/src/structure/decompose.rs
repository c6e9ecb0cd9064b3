//! Decomposition solver for pairwise-disjoint bases.
//!
//! With disjoint supports the subspace projection acts independently on
//! each support block, so the iteration splits into one codimension-1
//! problem per basis vector plus an untouched remainder block. The solver
//! advances all blocks in lockstep and reassembles a full trace with the
//! same stopping rule as the direct engine, giving an independently
//! computed run to compare against `run_apm`.

use crate::apm_engine::{IterationTrace, ProblemInstance, Snapshot, StepRecord, TerminalStatus};
use crate::l2core::{dot, SeqVec};
use crate::structure::check_pairwise_disjoint;
use crate::tol::{STALL_DELTA, STALL_STEPS};
use crate::{Error, Result};

/// Pairwise reduction matching the engine's error profile.
fn pairwise_sum<F: Fn(usize) -> f64>(lo: usize, hi: usize, f: &F) -> f64 {
    const BASE: usize = 256;
    if hi - lo <= BASE {
        return (lo..hi).map(f).sum();
    }
    let mid = lo + (hi - lo) / 2;
    pairwise_sum(lo, mid, f) + pairwise_sum(mid, hi, f)
}

/// One codimension-1 block: the compacted entries of a basis vector and
/// the iterate restricted to that vector's support.
struct Block {
    positions: Vec<usize>,
    v: Vec<f64>,
    b: Vec<f64>,
    b_next: Vec<f64>,
    a: Vec<f64>,
    c: f64,
}

impl Block {
    fn advance(&mut self) {
        for i in 0..self.v.len() {
            self.a[i] = self.b[i] - self.c * self.v[i];
        }
        for (bn, &ae) in self.b_next.iter_mut().zip(&self.a) {
            *bn = ae.max(0.0);
        }
    }

    fn sq(&self, f: impl Fn(usize) -> f64) -> f64 {
        pairwise_sum(0, self.v.len(), &|i| {
            let t = f(i);
            t * t
        })
    }
}

/// Solve a pairwise-disjoint instance by splitting it into one
/// codimension-1 iteration per basis vector.
///
/// The reassembled trace follows the direct engine entry for entry up to
/// summation-order rounding; statuses and step counts use the identical
/// stopping rule on the combined residual.
pub fn solve_by_decomposition(instance: &ProblemInstance) -> Result<IterationTrace> {
    let basis = instance.basis();
    let opts = instance.options();
    let n = instance.truncation();

    let report = check_pairwise_disjoint(basis, opts.eps_supp);
    if !report.disjoint {
        return Err(Error::PreconditionViolated(format!(
            "decomposition needs pairwise disjoint supports; overlapping pairs: {:?}",
            report
                .overlaps
                .iter()
                .filter(|o| !o.overlap.is_empty())
                .map(|o| (o.first, o.second))
                .collect::<Vec<_>>()
        )));
    }

    let start = instance.start().as_slice();
    let mut claimed = vec![false; n];
    let mut blocks: Vec<Block> = Vec::with_capacity(basis.len());
    for vec in basis.vectors() {
        let positions: Vec<usize> = vec
            .support(opts.eps_supp)
            .members_up_to(n as u64)
            .into_iter()
            .map(|k| k as usize - 1)
            .collect();
        for &p in &positions {
            claimed[p] = true;
        }
        let len = positions.len();
        let mut block = Block {
            v: positions.iter().map(|&p| vec.as_slice()[p]).collect(),
            b: positions.iter().map(|&p| start[p]).collect(),
            b_next: vec![0.0; len],
            a: vec![0.0; len],
            c: 0.0,
            positions,
        };
        block.c = dot(&block.v, &block.b);
        blocks.push(block);
    }
    let rest: Vec<usize> = (0..n).filter(|&p| !claimed[p]).collect();

    // The remainder block is projected once (clipped) at step 1 and then
    // never moves: Q is zero there.
    let rest_sq_neg: f64 = pairwise_sum(0, rest.len(), &|i| {
        let e = start[rest[i]].min(0.0);
        e * e
    });
    let rest_sq_clipped: f64 = pairwise_sum(0, rest.len(), &|i| {
        let e = start[rest[i]].max(0.0);
        e * e
    });
    let rest_sq_raw: f64 = pairwise_sum(0, rest.len(), &|i| {
        let e = start[rest[i]];
        e * e
    });

    let mut full_b = start.to_vec();
    let mut full_a = start.to_vec();

    let mut steps: Vec<StepRecord> = Vec::new();
    let mut snapshots = vec![Snapshot { step: 0, b: full_b.clone(), a: None }];
    let mut tracked_values: Vec<Vec<f64>> = Vec::new();
    let mut stall_run = 0usize;
    let mut status = TerminalStatus::MaxIters;

    for j in 1..=opts.max_iters {
        let first = j == 1;
        if !first {
            // From step 2 on, the remainder of a_j coincides with the
            // clipped remainder of b (the subspace projection skips it).
            for &p in &rest {
                full_a[p] = full_b[p];
            }
        }
        for block in &mut blocks {
            block.advance();
        }

        let dist_to_b = (blocks.iter().map(|bl| bl.sq(|i| bl.a[i] - bl.b_next[i])).sum::<f64>()
            + if first { rest_sq_neg } else { 0.0 })
        .sqrt();
        let step_delta = (blocks.iter().map(|bl| bl.sq(|i| bl.b_next[i] - bl.b[i])).sum::<f64>()
            + if first { rest_sq_neg } else { 0.0 })
        .sqrt();
        let norm_b =
            (blocks.iter().map(|bl| bl.sq(|i| bl.b_next[i])).sum::<f64>() + rest_sq_clipped).sqrt();
        let norm_a = (blocks.iter().map(|bl| bl.sq(|i| bl.a[i])).sum::<f64>()
            + if first { rest_sq_raw } else { rest_sq_clipped })
        .sqrt();
        if !(norm_b.is_finite() && norm_a.is_finite()) {
            return Err(Error::NonFiniteIterate { step: j });
        }

        let coeffs_next: Vec<f64> = blocks.iter().map(|bl| dot(&bl.v, &bl.b_next)).collect();
        let dist_to_a = coeffs_next.iter().map(|c| c * c).sum::<f64>().sqrt();

        let record = StepRecord {
            dist_to_a,
            dist_to_b,
            step_delta,
            norm_b,
            norm_a,
            q_coefficients: blocks.iter().map(|bl| bl.c).collect(),
        };
        let residual = record.residual();
        steps.push(record);

        for block in &mut blocks {
            for (i, &p) in block.positions.iter().enumerate() {
                full_a[p] = block.a[i];
                full_b[p] = block.b_next[i];
            }
            std::mem::swap(&mut block.b, &mut block.b_next);
        }
        if first {
            for &p in &rest {
                full_b[p] = full_b[p].max(0.0);
            }
        }
        for (block, c) in blocks.iter_mut().zip(&coeffs_next) {
            block.c = *c;
        }

        tracked_values.push(opts.tracked_indices.iter().map(|&k| full_b[k as usize - 1]).collect());
        if j % opts.snapshot_stride == 0 {
            snapshots.push(Snapshot { step: j, b: full_b.clone(), a: Some(full_a.clone()) });
        }

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

    let last_step = steps.len();
    if snapshots.last().map(|s| s.step) != Some(last_step) {
        snapshots.push(Snapshot { step: last_step, b: full_b.clone(), a: Some(full_a.clone()) });
    }
    Ok(IterationTrace {
        steps,
        snapshots,
        tracked_indices: opts.tracked_indices.clone(),
        tracked_values,
        final_coefficients: blocks.iter().map(|bl| bl.c).collect(),
        limit_estimate: SeqVec::from_entries(full_b),
        terminal_status: status,
        basis: basis.clone(),
        tol_residual: opts.tol_residual,
        eps_supp: opts.eps_supp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apm_engine::{run_apm, RunOptions};
    use crate::l2core::{GeneratorDesc, Parity, SignPattern, Term};
    use crate::projections::Basis;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn harmonic_pair(n: usize) -> Basis {
        let norm = (6.0f64 / (std::f64::consts::PI * std::f64::consts::PI)).sqrt();
        Basis::from_generators(
            &[
                GeneratorDesc::harmonic(0, Parity::Odd, SignPattern::Positive, norm),
                GeneratorDesc::harmonic(
                    0,
                    Parity::Even,
                    SignPattern::Alternating { negative_first: false },
                    norm,
                ),
            ],
            n,
        )
        .unwrap()
    }

    fn assert_traces_match(left: &IterationTrace, right: &IterationTrace, tol: f64) {
        assert_eq!(left.terminal_status, right.terminal_status);
        assert_eq!(left.iterations(), right.iterations());
        for (l, r) in left.steps.iter().zip(&right.steps) {
            assert!((l.dist_to_a - r.dist_to_a).abs() <= tol);
            assert!((l.dist_to_b - r.dist_to_b).abs() <= tol);
            assert!((l.step_delta - r.step_delta).abs() <= tol);
            assert!((l.norm_b - r.norm_b).abs() <= tol);
            assert!((l.norm_a - r.norm_a).abs() <= tol);
            for (lc, rc) in l.q_coefficients.iter().zip(&r.q_coefficients) {
                assert!((lc - rc).abs() <= tol);
            }
        }
        assert_eq!(left.snapshots.len(), right.snapshots.len());
        for (ls, rs) in left.snapshots.iter().zip(&right.snapshots) {
            assert_eq!(ls.step, rs.step);
            for (lb, rb) in ls.b.iter().zip(&rs.b) {
                assert!((lb - rb).abs() <= tol);
            }
            match (&ls.a, &rs.a) {
                (None, None) => {}
                (Some(la), Some(ra)) => {
                    for (l, r) in la.iter().zip(ra) {
                        assert!((l - r).abs() <= tol);
                    }
                }
                _ => panic!("snapshot shape mismatch at step {}", ls.step),
            }
        }
        for (l, r) in left.limit_estimate.as_slice().iter().zip(right.limit_estimate.as_slice()) {
            assert!((l - r).abs() <= tol);
        }
        for (l, r) in left.final_coefficients.iter().zip(&right.final_coefficients) {
            assert!((l - r).abs() <= tol);
        }
    }

    #[test]
    fn matches_direct_engine_on_harmonic_pair() {
        let basis = harmonic_pair(200);
        let start = SeqVec::unit(200, 4).unwrap();
        let instance = ProblemInstance::new(basis, start, RunOptions::default()).unwrap();
        let direct = run_apm(&instance).unwrap();
        let split = solve_by_decomposition(&instance).unwrap();
        assert_traces_match(&split, &direct, 1e-12);
        assert_eq!(split.terminal_status, TerminalStatus::Converged);
    }

    #[test]
    fn start_outside_all_supports_stays_fixed() {
        let basis =
            Basis::orthonormal(vec![SeqVec::unit(8, 1).unwrap(), SeqVec::unit(8, 2).unwrap()])
                .unwrap();
        let mut entries = vec![0.0; 8];
        entries[4] = 0.7;
        entries[6] = -0.2;
        let instance =
            ProblemInstance::new(basis, SeqVec::from_entries(entries), RunOptions::default())
                .unwrap();
        let trace = solve_by_decomposition(&instance).unwrap();
        assert_eq!(trace.terminal_status, TerminalStatus::Converged);
        // Step 1 clips the negative remainder entry, step 2 sees a zero
        // residual: nothing else ever moves.
        assert_eq!(trace.iterations(), 2);
        let limit = trace.limit_estimate.as_slice();
        assert_eq!(limit[4], 0.7);
        assert_eq!(limit[6], 0.0);
        let direct = run_apm(&instance).unwrap();
        assert_traces_match(&trace, &direct, 1e-15);
    }

    #[test]
    fn matches_direct_engine_on_three_disjoint_vectors() {
        let n = 96;
        let descs = [
            GeneratorDesc::geometric(0.5, Parity::All, SignPattern::Positive, 1, 1.0),
            GeneratorDesc::harmonic(
                0,
                Parity::All,
                SignPattern::Alternating { negative_first: false },
                1.0,
            ),
            GeneratorDesc::finite_list([2.0, -1.0, 0.5], 1.0),
        ];
        // Interleave the three onto residue classes mod 3 via finite lists
        // to keep supports disjoint at every index.
        let mut cols = vec![vec![0.0; n]; 3];
        for (slot, d) in descs.iter().enumerate() {
            let vals = d.entries(n / 3);
            for (m, v) in vals.iter().enumerate() {
                cols[slot][3 * m + slot] = *v;
            }
        }
        let vectors: Vec<GeneratorDesc> = cols
            .into_iter()
            .map(|c| {
                let norm = c.iter().map(|e| e * e).sum::<f64>().sqrt();
                GeneratorDesc::finite_list(c, 1.0 / norm)
            })
            .collect();
        let basis = Basis::from_generators(&vectors, n).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let start =
            SeqVec::from_entries((0..n).map(|_| rng.gen_range(0.0..1.0)).collect::<Vec<_>>());
        let instance = ProblemInstance::new(basis, start, RunOptions::default()).unwrap();
        let direct = run_apm(&instance).unwrap();
        let split = solve_by_decomposition(&instance).unwrap();
        assert_traces_match(&split, &direct, 1e-12);
    }

    #[test]
    fn overlapping_supports_are_rejected() {
        let basis = Basis::from_generators(
            &[
                GeneratorDesc::finite_list([1.0, 1.0], 1.0 / 2.0f64.sqrt()),
                GeneratorDesc::scaled_sum(
                    vec![
                        Term {
                            coeff: 1.0,
                            descriptor: GeneratorDesc::finite_list([1.0, -1.0], 1.0),
                        },
                        Term {
                            coeff: 1.0,
                            descriptor: GeneratorDesc::geometric(
                                0.5,
                                Parity::All,
                                SignPattern::Positive,
                                3,
                                1.0,
                            ),
                        },
                    ],
                    (3.0f64 / 7.0).sqrt(),
                ),
            ],
            32,
        )
        .unwrap();
        let start = SeqVec::unit(32, 3).unwrap();
        let instance = ProblemInstance::new(basis, start, RunOptions::default()).unwrap();
        assert!(matches!(solve_by_decomposition(&instance), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn tracked_indices_and_stride_snapshots_follow_engine_layout() {
        let basis = harmonic_pair(64);
        let start = SeqVec::unit(64, 3).unwrap();
        let options = RunOptions {
            snapshot_stride: 5,
            tracked_indices: vec![1, 3, 4],
            ..RunOptions::default()
        };
        let instance = ProblemInstance::new(basis, start, options).unwrap();
        let direct = run_apm(&instance).unwrap();
        let split = solve_by_decomposition(&instance).unwrap();
        assert_eq!(split.tracked_values.len(), split.iterations());
        for (l, r) in split.tracked_values.iter().zip(&direct.tracked_values) {
            for (a, b) in l.iter().zip(r) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
        assert_traces_match(&split, &direct, 1e-12);
    }
}
