//! Sets of 1-based sequence indices.
//!
//! An [`IndexSet`] is a periodic base pattern (`empty`, `all`, `odd`,
//! `even`) adjusted by finitely many removed and added indices. The family
//! is closed under complement, intersection, union, and difference, so
//! support bookkeeping stays exact: finite sets, cofinite sets, and the two
//! parity classes are all representable without approximation.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Periodic backbone of an [`IndexSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Base {
    Empty,
    All,
    Odd,
    Even,
}

impl Base {
    fn contains(self, k: u64) -> bool {
        match self {
            Base::Empty => false,
            Base::All => k >= 1,
            Base::Odd => k >= 1 && k % 2 == 1,
            Base::Even => k >= 1 && k.is_multiple_of(2),
        }
    }

    fn complement(self) -> Base {
        match self {
            Base::Empty => Base::All,
            Base::All => Base::Empty,
            Base::Odd => Base::Even,
            Base::Even => Base::Odd,
        }
    }

    fn intersect(self, other: Base) -> Base {
        use Base::*;
        match (self, other) {
            (Empty, _) | (_, Empty) => Empty,
            (All, b) => b,
            (b, All) => b,
            (Odd, Odd) => Odd,
            (Even, Even) => Even,
            (Odd, Even) | (Even, Odd) => Empty,
        }
    }

    /// First member at or after `from` (1-based); `None` for `Empty`.
    fn first_from(self, from: u64) -> Option<u64> {
        let from = from.max(1);
        match self {
            Base::Empty => None,
            Base::All => Some(from),
            Base::Odd => Some(if from % 2 == 1 { from } else { from + 1 }),
            Base::Even => Some(if from.is_multiple_of(2) { from } else { from + 1 }),
        }
    }
}

/// A set of 1-based indices: `(base \ minus) ∪ plus`.
///
/// Canonical form is maintained: `minus ⊆ base` and `plus ∩ base = ∅`, so
/// structural equality coincides with set equality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSet {
    base: Base,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    minus: BTreeSet<u64>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    plus: BTreeSet<u64>,
}

impl IndexSet {
    fn canonical(base: Base, minus: BTreeSet<u64>, plus: BTreeSet<u64>) -> Self {
        let minus = minus.into_iter().filter(|&k| k >= 1 && base.contains(k)).collect();
        let plus = plus.into_iter().filter(|&k| k >= 1 && !base.contains(k)).collect();
        IndexSet { base, minus, plus }
    }

    pub fn empty() -> Self {
        Self::canonical(Base::Empty, BTreeSet::new(), BTreeSet::new())
    }

    pub fn all() -> Self {
        Self::canonical(Base::All, BTreeSet::new(), BTreeSet::new())
    }

    pub fn odd() -> Self {
        Self::canonical(Base::Odd, BTreeSet::new(), BTreeSet::new())
    }

    pub fn even() -> Self {
        Self::canonical(Base::Even, BTreeSet::new(), BTreeSet::new())
    }

    /// Explicit finite set; indices below 1 are dropped.
    pub fn finite<I: IntoIterator<Item = u64>>(indices: I) -> Self {
        Self::canonical(Base::Empty, BTreeSet::new(), indices.into_iter().collect())
    }

    /// All indices except the given ones.
    pub fn cofinite<I: IntoIterator<Item = u64>>(excluded: I) -> Self {
        Self::canonical(Base::All, excluded.into_iter().collect(), BTreeSet::new())
    }

    pub fn contains(&self, k: u64) -> bool {
        if k < 1 {
            return false;
        }
        if self.plus.contains(&k) {
            return true;
        }
        if self.minus.contains(&k) {
            return false;
        }
        self.base.contains(k)
    }

    pub fn complement(&self) -> Self {
        // (base \ minus) ∪ plus complements to (base' \ plus) ∪ minus, and
        // canonical form guarantees plus ⊆ base', minus ∩ base' = ∅.
        Self::canonical(self.base.complement(), self.plus.clone(), self.minus.clone())
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let base = self.base.intersect(other.base);
        let mut minus: BTreeSet<u64> = BTreeSet::new();
        for &k in self.minus.iter().chain(other.minus.iter()) {
            if base.contains(k) {
                minus.insert(k);
            }
        }
        let mut plus = BTreeSet::new();
        for &k in &self.plus {
            if other.contains(k) && !(base.contains(k) && !minus.contains(&k)) {
                plus.insert(k);
            }
        }
        for &k in &other.plus {
            if self.contains(k) && !(base.contains(k) && !minus.contains(&k)) {
                plus.insert(k);
            }
        }
        Self::canonical(base, minus, plus)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.complement().intersect(&other.complement()).complement()
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersect(&other.complement())
    }

    pub fn is_finite(&self) -> bool {
        self.base == Base::Empty
    }

    pub fn is_empty(&self) -> bool {
        self.base == Base::Empty && self.plus.is_empty()
    }

    /// Members in ascending order when the set is finite.
    pub fn as_finite(&self) -> Option<Vec<u64>> {
        if self.is_finite() {
            Some(self.plus.iter().copied().collect())
        } else {
            None
        }
    }

    /// Members up to and including `n`, ascending.
    pub fn members_up_to(&self, n: u64) -> Vec<u64> {
        (1..=n).filter(|&k| self.contains(k)).collect()
    }

    pub fn min_element(&self) -> Option<u64> {
        let from_plus = self.plus.iter().next().copied();
        let mut from_base = self.base.first_from(1);
        while let Some(k) = from_base {
            if !self.minus.contains(&k) {
                break;
            }
            from_base = self.base.first_from(k + 1);
        }
        match (from_plus, from_base) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(set: &BTreeSet<u64>) -> String {
            let items: Vec<String> = set.iter().map(|k| k.to_string()).collect();
            format!("{{{}}}", items.join(", "))
        }
        match self.base {
            Base::Empty => write!(f, "{}", list(&self.plus)),
            base => {
                let name = match base {
                    Base::All => "all",
                    Base::Odd => "odd",
                    Base::Even => "even",
                    Base::Empty => unreachable!(),
                };
                write!(f, "{name}")?;
                if !self.minus.is_empty() {
                    write!(f, " minus {}", list(&self.minus))?;
                }
                if !self.plus.is_empty() {
                    write!(f, " plus {}", list(&self.plus))?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parity_classes_partition_all() {
        let odd = IndexSet::odd();
        let even = IndexSet::even();
        assert!(odd.intersect(&even).is_empty());
        assert_eq!(odd.union(&even), IndexSet::all());
        assert_eq!(odd.complement(), even);
    }

    #[test]
    fn cofinite_and_finite_are_complements() {
        let f = IndexSet::finite([1, 2]);
        let c = IndexSet::cofinite([1, 2]);
        assert_eq!(f.complement(), c);
        assert_eq!(c.complement(), f);
        assert!(!c.contains(2));
        assert!(c.contains(3));
        assert_eq!(c.min_element(), Some(3));
    }

    #[test]
    fn difference_of_finite_from_pattern() {
        let s = IndexSet::odd().difference(&IndexSet::finite([1, 4]));
        assert!(!s.contains(1));
        assert!(s.contains(3));
        assert!(!s.contains(4));
        assert_eq!(s.min_element(), Some(3));
        assert!(!s.is_finite());
    }

    #[test]
    fn finite_members_and_minimum() {
        let s = IndexSet::finite([5, 2, 9]);
        assert_eq!(s.as_finite().unwrap(), vec![2, 5, 9]);
        assert_eq!(s.min_element(), Some(2));
        assert_eq!(s.members_up_to(6), vec![2, 5]);
        assert!(IndexSet::empty().min_element().is_none());
    }

    #[test]
    fn zero_and_below_are_never_members() {
        assert!(!IndexSet::all().contains(0));
        let s = IndexSet::finite([0, 3]);
        assert_eq!(s.as_finite().unwrap(), vec![3]);
    }

    fn arb_set() -> impl Strategy<Value = IndexSet> {
        let base =
            prop_oneof![Just(Base::Empty), Just(Base::All), Just(Base::Odd), Just(Base::Even),];
        (
            base,
            prop::collection::btree_set(1u64..40, 0..6),
            prop::collection::btree_set(1u64..40, 0..6),
        )
            .prop_map(|(b, m, p)| IndexSet::canonical(b, m, p))
    }

    proptest! {
        // Membership of every composite op must agree with pointwise logic;
        // 1..=90 covers all correction indices plus a periodic stretch.
        #[test]
        fn ops_agree_with_pointwise_membership(a in arb_set(), b in arb_set()) {
            for k in 1u64..=90 {
                prop_assert_eq!(a.complement().contains(k), !a.contains(k));
                prop_assert_eq!(a.intersect(&b).contains(k), a.contains(k) && b.contains(k));
                prop_assert_eq!(a.union(&b).contains(k), a.contains(k) || b.contains(k));
                prop_assert_eq!(a.difference(&b).contains(k), a.contains(k) && !b.contains(k));
            }
        }

        #[test]
        fn complement_is_involutive(a in arb_set()) {
            prop_assert_eq!(a.complement().complement(), a);
        }

        #[test]
        fn min_element_is_first_member(a in arb_set()) {
            let scan = (1u64..=200).find(|&k| a.contains(k));
            match (a.min_element(), scan) {
                (Some(m), Some(s)) => prop_assert_eq!(m, s),
                (None, None) => {}
                // A nonempty set always has a member within the scanned range
                // for these small corrections.
                (m, s) => prop_assert!(false, "min {m:?} vs scan {s:?}"),
            }
        }
    }
}
