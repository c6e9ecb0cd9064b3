//! The two projections whose alternation the engine iterates.
//!
//! The subspace is the orthogonal complement of the span of finitely many
//! orthonormal vectors v_1..v_N, so projecting onto it means subtracting
//! Q(x) = sum_i <x, v_i> v_i. The cone is the set of entrywise nonnegative
//! sequences, whose metric projection is the positive part. [`Basis`]
//! certifies the orthonormality the Q formula relies on.

use crate::l2core::{dot, GeneratorDesc, SeqVec};
use crate::tol::ORTHO_RESIDUAL_DEFAULT;
use crate::{Error, Result};

/// Certified orthonormal family spanning the complement of the subspace.
#[derive(Debug, Clone)]
pub struct Basis {
    vectors: Vec<SeqVec>,
    ortho_residual: f64,
}

impl Basis {
    /// Wrap vectors after certifying pairwise orthonormality to the default
    /// tolerance.
    pub fn orthonormal(vectors: Vec<SeqVec>) -> Result<Basis> {
        Basis::orthonormal_with_tol(vectors, ORTHO_RESIDUAL_DEFAULT)
    }

    /// Wrap vectors after certifying that every Gram entry is within `tol`
    /// of the identity, tail slack included.
    pub fn orthonormal_with_tol(vectors: Vec<SeqVec>, tol: f64) -> Result<Basis> {
        if let Some(first) = vectors.first() {
            if vectors.iter().any(|v| v.len() != first.len()) {
                return Err(Error::InvalidArgument(
                    "basis vectors must share one truncation".into(),
                ));
            }
        }
        let residual = gram_residual(&vectors);
        if residual > tol {
            return Err(Error::PreconditionViolated(format!(
                "orthonormality residual {residual:.3e} exceeds tolerance {tol:.3e}"
            )));
        }
        Ok(Basis { vectors, ortho_residual: residual })
    }

    /// Evaluate generators at truncation `n` and renormalize each stored
    /// prefix to unit length. The basis then represents the renormalized
    /// truncations exactly (zero tail), which is what makes Q an honest
    /// orthogonal projector at finite truncation; the rescale is by
    /// 1/(1 - O(tail^2)), so it vanishes as `n` grows. Origins survive
    /// because positive scaling changes no support or sign structure.
    pub fn from_generators(descs: &[GeneratorDesc], n: usize) -> Result<Basis> {
        let mut vectors = Vec::with_capacity(descs.len());
        for d in descs {
            let raw = SeqVec::from_generator(d, n)?;
            let norm = raw.norm();
            if norm == 0.0 {
                return Err(Error::InvalidArgument(
                    "cannot renormalize a vector with empty truncated support".into(),
                ));
            }
            let entries = raw.as_slice().iter().map(|e| e / norm).collect();
            vectors.push(SeqVec::with_parts(entries, 0.0, Some(d.clone())));
        }
        Basis::orthonormal(vectors)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn truncation(&self) -> usize {
        self.vectors.first().map_or(0, SeqVec::len)
    }

    pub fn ortho_residual(&self) -> f64 {
        self.ortho_residual
    }

    pub fn vectors(&self) -> &[SeqVec] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &SeqVec {
        &self.vectors[i]
    }

    pub fn descriptor(&self, i: usize) -> Option<&GeneratorDesc> {
        self.vectors[i].origin()
    }

    /// The coefficients <x, v_i>.
    pub fn coefficients(&self, x: &SeqVec) -> Vec<f64> {
        span_coefficients(&self.vectors, x)
    }

    /// Q(x) = sum_i <x, v_i> v_i, the projection onto the spanned complement.
    pub fn q(&self, x: &SeqVec) -> SeqVec {
        apply_q(&self.vectors, x)
    }

    /// Projection onto the subspace: x - Q(x).
    pub fn project_subspace(&self, x: &SeqVec) -> SeqVec {
        x.sub(&self.q(x))
    }

    /// Distance from x to the subspace, which equals the norm of Q(x).
    pub fn dist_to_subspace(&self, x: &SeqVec) -> f64 {
        self.q(x).norm()
    }
}

/// Worst Gram deviation from the identity, inflated by tail slack so the
/// figure bounds the untruncated Gram matrix too.
pub fn gram_residual(vectors: &[SeqVec]) -> f64 {
    let mut worst = 0.0f64;
    for (i, vi) in vectors.iter().enumerate() {
        for (j, vj) in vectors.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            let dev = (vi.inner(vj) - target).abs() + vi.inner_slack(vj);
            worst = worst.max(dev);
        }
    }
    worst
}

/// Coefficients <x, v_i> against an arbitrary family (no orthonormality
/// assumed; callers needing a projector must certify that separately).
pub fn span_coefficients(vectors: &[SeqVec], x: &SeqVec) -> Vec<f64> {
    vectors.iter().map(|v| v.inner(x)).collect()
}

/// sum_i <x, v_i> v_i over an arbitrary family.
pub fn apply_q(vectors: &[SeqVec], x: &SeqVec) -> SeqVec {
    let n = vectors.iter().map(SeqVec::len).max().unwrap_or(x.len());
    let mut entries = vec![0.0; n];
    let mut tail = 0.0;
    for v in vectors {
        let c = v.inner(x);
        for (e, &ve) in entries.iter_mut().zip(v.as_slice()) {
            *e += c * ve;
        }
        tail += c.abs() * v.tail_bound();
    }
    SeqVec::with_parts(entries, tail, None)
}

/// Metric projection onto the nonnegative cone.
pub fn project_cone(x: &SeqVec) -> SeqVec {
    x.positive_part()
}

/// Distance from x to the cone: the norm of the negative part.
pub fn dist_to_cone(x: &SeqVec) -> f64 {
    x.negative_part().norm()
}

/// Modified Gram-Schmidt with one re-orthogonalization sweep. Fails with
/// [`Error::DependentFamily`] when a vector's residual against the earlier
/// ones falls below `dep_tol` times its own norm.
pub fn orthonormalize(vectors: &[SeqVec], dep_tol: f64) -> Result<Vec<SeqVec>> {
    let n = vectors.iter().map(SeqVec::len).max().unwrap_or(0);
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        let mut w: Vec<f64> = v.as_slice().to_vec();
        w.resize(n, 0.0);
        let input_norm = dot(&w, &w).sqrt();
        // Two sweeps: the second clears the rounding left by the first,
        // giving Gram residuals at the machine-precision floor.
        for _ in 0..2 {
            for u in &out {
                let c = dot(u, &w);
                for (we, ue) in w.iter_mut().zip(u) {
                    *we -= c * ue;
                }
            }
        }
        let pivot = dot(&w, &w).sqrt();
        if pivot <= dep_tol * input_norm || input_norm == 0.0 {
            return Err(Error::DependentFamily { index, pivot, threshold: dep_tol * input_norm });
        }
        for we in &mut w {
            *we /= pivot;
        }
        out.push(w);
    }
    Ok(out.into_iter().map(SeqVec::from_entries).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::l2core::{Parity, SignPattern, Term};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn harmonic_descs() -> Vec<GeneratorDesc> {
        let scale = 6.0f64.sqrt() / PI;
        vec![
            GeneratorDesc::harmonic(0, Parity::Odd, SignPattern::Positive, scale),
            GeneratorDesc::harmonic(
                0,
                Parity::Even,
                SignPattern::Alternating { negative_first: false },
                scale,
            ),
        ]
    }

    fn signed_pair_descs() -> Vec<GeneratorDesc> {
        vec![
            GeneratorDesc::finite_list([1.0, 1.0], 1.0 / 2.0f64.sqrt()),
            GeneratorDesc::scaled_sum(
                vec![
                    Term { coeff: 1.0, descriptor: GeneratorDesc::finite_list([1.0, -1.0], 1.0) },
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
        ]
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> SeqVec {
        SeqVec::from_entries((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
    }

    #[test]
    fn subspace_projection_matches_dense_matrix_oracle() {
        // Independent route: materialize M = I - sum v v^T as a full n x n
        // matrix and multiply, instead of the coefficient formula.
        let n = 200;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let raw: Vec<SeqVec> = (0..3).map(|_| random_vec(&mut rng, n)).collect();
        let vs = orthonormalize(&raw, 1e-8).unwrap();
        let basis = Basis::orthonormal(vs.clone()).unwrap();

        let mut m = vec![vec![0.0f64; n]; n];
        for (r, row) in m.iter_mut().enumerate() {
            row[r] = 1.0;
            for v in &vs {
                let ve = v.as_slice();
                for (c, cell) in row.iter_mut().enumerate() {
                    *cell -= ve[r] * ve[c];
                }
            }
        }

        let x = random_vec(&mut rng, n);
        let fast = basis.project_subspace(&x);
        for (r, row) in m.iter().enumerate() {
            let dense: f64 = row.iter().zip(x.as_slice()).map(|(a, b)| a * b).sum();
            assert!(
                (dense - fast.entry(r as u64 + 1)).abs() < 1e-12,
                "row {r}: dense {dense} vs {}",
                fast.entry(r as u64 + 1)
            );
        }
        // Projector algebra: applying Q twice changes nothing measurable.
        let twice = basis.project_subspace(&fast);
        assert!(twice.sub(&fast).norm() < 1e-12);
        assert!(basis.dist_to_subspace(&fast) < 1e-12);
    }

    proptest! {
        #[test]
        fn cone_projection_is_nearest_point(
            x in proptest::collection::vec(-10.0f64..10.0, 1..25),
            y in proptest::collection::vec(0.0f64..10.0, 1..25),
        ) {
            // Optimality oracle: no nonnegative candidate beats the
            // positive part.
            let n = x.len().max(y.len());
            let mut xe = x; xe.resize(n, 0.0);
            let mut ye = y; ye.resize(n, 0.0);
            let xv = SeqVec::from_entries(xe);
            let yv = SeqVec::from_entries(ye);
            let p = project_cone(&xv);
            prop_assert!(xv.sub(&p).norm() <= xv.sub(&yv).norm() + 1e-12);
            // And the projection is feasible with distance = negative mass.
            prop_assert!(p.as_slice().iter().all(|e| *e >= 0.0));
            prop_assert!((xv.sub(&p).norm() - dist_to_cone(&xv)).abs() < 1e-12);
        }
    }

    #[test]
    fn orthonormalize_keeps_an_orthonormal_family() {
        let vs = vec![SeqVec::unit(6, 1).unwrap(), SeqVec::unit(6, 4).unwrap()];
        let out = orthonormalize(&vs, 1e-10).unwrap();
        for (a, b) in out.iter().zip(&vs) {
            assert!(a.sub(b).norm() < 1e-14);
        }
    }

    #[test]
    fn orthonormalize_detects_dependence() {
        let v = SeqVec::from_entries(vec![1.0, 2.0, -1.0]);
        let w = v.scaled(2.0);
        let err = orthonormalize(&[v, w], 1e-10).unwrap_err();
        match err {
            Error::DependentFamily { index, pivot, threshold } => {
                assert_eq!(index, 1);
                assert!(pivot <= threshold);
            }
            other => panic!("expected DependentFamily, got {other:?}"),
        }
    }

    #[test]
    fn orthonormalize_preserves_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let raw: Vec<SeqVec> = (0..4).map(|_| random_vec(&mut rng, 40)).collect();
        let out = orthonormalize(&raw, 1e-10).unwrap();
        assert!(gram_residual(&out) < 1e-13);
        // Each input is reproduced by its expansion in the output family.
        for v in &raw {
            let back = apply_q(&out, v);
            assert!(back.sub(v).norm() < 1e-12 * v.norm().max(1.0));
        }
    }

    #[test]
    fn q_of_unit_vector_reads_off_one_column() {
        // Signed full-support pair: only the second vector touches index 3,
        // so Q(e_3) is that single coefficient times the vector.
        let descs = signed_pair_descs();
        let n = 64;
        let v1 = SeqVec::from_generator(&descs[0], n).unwrap();
        let v2 = SeqVec::from_generator(&descs[1], n).unwrap();
        let e3 = SeqVec::unit(n, 3).unwrap();
        let q = apply_q(&[v1.clone(), v2.clone()], &e3);

        assert_eq!(v1.entry(3), 0.0);
        let c = (3.0f64 / 7.0).sqrt() / 2.0;
        assert!((v2.entry(3) - c).abs() < 1e-16);
        let expected = v2.scaled(c);
        assert!(q.sub(&expected).norm() < 1e-15);

        // Harmonic pair: index 4 meets only the even vector, with value
        // -(1/2) of its scale, again a single-column readout.
        let descs = harmonic_descs();
        let w1 = SeqVec::from_generator(&descs[0], n).unwrap();
        let w2 = SeqVec::from_generator(&descs[1], n).unwrap();
        let e4 = SeqVec::unit(n, 4).unwrap();
        let q = apply_q(&[w1, w2.clone()], &e4);
        let c = -(6.0f64.sqrt() / (2.0 * PI));
        let expected = w2.scaled(c);
        assert!(q.sub(&expected).norm() < 1e-15);
    }

    #[test]
    fn renormalized_generator_basis_certifies() {
        // Harmonic decay leaves real mass beyond any truncation; the raw
        // prefixes cannot certify unit norm, the renormalized ones can.
        let basis = Basis::from_generators(&harmonic_descs(), 101).unwrap();
        assert!(basis.ortho_residual() <= 1e-12);
        assert_eq!(basis.len(), 2);
        assert_eq!(basis.truncation(), 101);
        assert!(basis.descriptor(0).is_some());

        let raw: Vec<SeqVec> =
            harmonic_descs().iter().map(|d| SeqVec::from_generator(d, 101).unwrap()).collect();
        assert!(Basis::orthonormal(raw).is_err());
    }

    #[test]
    fn geometric_pair_certifies_even_raw_at_modest_truncation() {
        let descs = signed_pair_descs();
        let raw: Vec<SeqVec> =
            descs.iter().map(|d| SeqVec::from_generator(d, 128).unwrap()).collect();
        // Tail of ratio 1/2 under 128 entries is far below every tolerance.
        let basis = Basis::orthonormal(raw).unwrap();
        assert!(basis.ortho_residual() <= 1e-12);
    }

    #[test]
    fn mismatched_truncations_are_rejected() {
        let vs = vec![SeqVec::unit(4, 1).unwrap(), SeqVec::unit(5, 2).unwrap()];
        assert!(matches!(Basis::orthonormal(vs), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn subspace_and_cone_distances_agree_with_definitions() {
        let basis = Basis::from_generators(&harmonic_descs(), 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_vec(&mut rng, 64);
        let px = basis.project_subspace(&x);
        assert!((basis.dist_to_subspace(&x) - x.sub(&px).norm()) < 1e-13);
        // Pythagoras: splitting off Q(x) preserves squared mass.
        let qx = basis.q(&x);
        let lhs = x.inner(&x);
        let rhs = px.inner(&px) + qx.inner(&qx);
        assert!((lhs - rhs).abs() < 1e-10);
    }
}
