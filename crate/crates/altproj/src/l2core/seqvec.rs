//! Truncated square-summable vectors with certified tail bounds.
//!
//! A [`SeqVec`] stores the first `n` entries of an infinite sequence plus an
//! overestimate of the l2 mass it discarded. Arithmetic keeps the bound
//! valid, so downstream checks can state which side of a tolerance the
//! untruncated quantity falls on. Vectors built from a [`GeneratorDesc`]
//! remember their origin, which upgrades support queries from numeric
//! thresholding to the exact symbolic pattern.

use super::generator::GeneratorDesc;
use super::indexset::IndexSet;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SeqVec {
    entries: Vec<f64>,
    tail_bound: f64,
    origin: Option<GeneratorDesc>,
}

impl SeqVec {
    /// Evaluate a generator at truncation `n`.
    pub fn from_generator(desc: &GeneratorDesc, n: usize) -> Result<Self> {
        desc.validate()?;
        if n == 0 {
            return Err(Error::InvalidArgument("truncation must be positive".into()));
        }
        Ok(SeqVec {
            entries: desc.entries(n),
            tail_bound: desc.tail_bound(n),
            origin: Some(desc.clone()),
        })
    }

    /// Wrap explicit entries; the true sequence is their zero-extension.
    pub fn from_entries(entries: Vec<f64>) -> Self {
        SeqVec { entries, tail_bound: 0.0, origin: None }
    }

    pub(crate) fn with_parts(
        entries: Vec<f64>,
        tail_bound: f64,
        origin: Option<GeneratorDesc>,
    ) -> Self {
        SeqVec { entries, tail_bound, origin }
    }

    pub fn zero(n: usize) -> Self {
        SeqVec { entries: vec![0.0; n], tail_bound: 0.0, origin: None }
    }

    /// Standard basis vector `e_k` (1-based) at truncation `n`.
    pub fn unit(n: usize, k: u64) -> Result<Self> {
        if k < 1 || k as usize > n {
            return Err(Error::InvalidArgument(format!("unit index {k} outside truncation {n}")));
        }
        let mut entries = vec![0.0; n];
        entries[k as usize - 1] = 1.0;
        Ok(SeqVec { entries, tail_bound: 0.0, origin: None })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry at 1-based index `k`; zero beyond the truncation (the stored
    /// representative is zero-extended, the tail bound covers the error).
    pub fn entry(&self, k: u64) -> f64 {
        assert!(k >= 1, "indices are 1-based");
        self.entries.get(k as usize - 1).copied().unwrap_or(0.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn origin(&self) -> Option<&GeneratorDesc> {
        self.origin.as_ref()
    }

    /// Inner product of the stored prefixes (zero-extension semantics).
    pub fn inner(&self, other: &SeqVec) -> f64 {
        dot(&self.entries, &other.entries)
    }

    /// Bound on |true inner product - stored inner product|. Valid because
    /// both discarded tails live beyond the common truncation, so their
    /// contribution is at most the product of the tail bounds.
    pub fn inner_slack(&self, other: &SeqVec) -> f64 {
        debug_assert_eq!(self.len(), other.len(), "certified ops need equal truncations");
        self.tail_bound * other.tail_bound
    }

    /// Norm of the stored prefix: a lower bound for the true norm.
    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// Upper bound for the true norm.
    pub fn norm_upper(&self) -> f64 {
        (self.inner(self) + self.tail_bound * self.tail_bound).sqrt()
    }

    /// Entrywise max(x, 0). Taking positive parts cannot increase tail
    /// mass, so the bound carries over.
    pub fn positive_part(&self) -> SeqVec {
        let origin = match &self.origin {
            Some(d) if d.in_cone() == Some(true) => Some(d.clone()),
            _ => None,
        };
        SeqVec {
            entries: self.entries.iter().map(|e| e.max(0.0)).collect(),
            tail_bound: self.tail_bound,
            origin,
        }
    }

    /// Entrywise max(-x, 0), so that x = x_plus - x_minus.
    pub fn negative_part(&self) -> SeqVec {
        SeqVec {
            entries: self.entries.iter().map(|e| (-e).max(0.0)).collect(),
            tail_bound: self.tail_bound,
            origin: None,
        }
    }

    /// Entrywise absolute value.
    pub fn modulus(&self) -> SeqVec {
        SeqVec {
            entries: self.entries.iter().map(|e| e.abs()).collect(),
            tail_bound: self.tail_bound,
            origin: None,
        }
    }

    pub fn scaled(&self, c: f64) -> SeqVec {
        SeqVec {
            entries: self.entries.iter().map(|e| c * e).collect(),
            tail_bound: c.abs() * self.tail_bound,
            origin: None,
        }
    }

    pub fn add(&self, other: &SeqVec) -> SeqVec {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &SeqVec) -> SeqVec {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &SeqVec, sign: f64) -> SeqVec {
        let n = self.len().max(other.len());
        let mut entries = vec![0.0; n];
        for (i, e) in entries.iter_mut().enumerate() {
            let k = i as u64 + 1;
            *e = self.entry(k) + sign * other.entry(k);
        }
        SeqVec { entries, tail_bound: self.tail_bound + other.tail_bound, origin: None }
    }

    /// Zero out every entry outside `set`. Restriction never adds mass, so
    /// the tail bound stays valid; it collapses to zero when the set has no
    /// members beyond the truncation.
    pub fn restrict(&self, set: &IndexSet) -> SeqVec {
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| if set.contains(i as u64 + 1) { *e } else { 0.0 })
            .collect();
        let tail_past_truncation =
            set.difference(&IndexSet::finite(1..=self.len() as u64)).is_empty();
        SeqVec {
            entries,
            tail_bound: if tail_past_truncation { 0.0 } else { self.tail_bound },
            origin: None,
        }
    }

    /// Support of the vector. With a generator origin this is the exact
    /// symbolic support of the untruncated sequence (when the family shape
    /// admits one); otherwise the set of stored entries exceeding `eps` in
    /// magnitude.
    pub fn support(&self, eps: f64) -> IndexSet {
        if let Some(pattern) = self.origin.as_ref().and_then(|d| d.support_pattern()) {
            return pattern;
        }
        IndexSet::finite(
            self.entries
                .iter()
                .enumerate()
                .filter(|(_, e)| e.abs() > eps)
                .map(|(i, _)| i as u64 + 1),
        )
    }

    /// Change truncation. Growing refills from the origin when one is
    /// available (recomputing the tail bound) and zero-pads otherwise;
    /// shrinking folds the dropped mass into the tail bound.
    pub fn resize(&self, n: usize) -> Result<SeqVec> {
        if n == 0 {
            return Err(Error::InvalidArgument("truncation must be positive".into()));
        }
        if n == self.len() {
            return Ok(self.clone());
        }
        if let Some(d) = &self.origin {
            return SeqVec::from_generator(d, n);
        }
        if n > self.len() {
            let mut entries = self.entries.clone();
            entries.resize(n, 0.0);
            Ok(SeqVec { entries, tail_bound: self.tail_bound, origin: None })
        } else {
            let dropped_sq: f64 = self.entries[n..].iter().map(|e| e * e).sum();
            Ok(SeqVec {
                entries: self.entries[..n].to_vec(),
                tail_bound: (self.tail_bound * self.tail_bound + dropped_sq).sqrt(),
                origin: None,
            })
        }
    }
}

/// Pairwise-summed dot product: rounding error grows like log n rather
/// than n, which keeps certified orthonormality residuals meaningful at
/// truncations in the millions. Unequal lengths follow zero-extension.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    pairwise(&a[..n], &b[..n])
}

fn pairwise(a: &[f64], b: &[f64]) -> f64 {
    const BASE: usize = 256;
    if a.len() <= BASE {
        return a.iter().zip(b).map(|(x, y)| x * y).sum();
    }
    let mid = a.len() / 2;
    pairwise(&a[..mid], &b[..mid]) + pairwise(&a[mid..], &b[mid..])
}
