//! Small subsets of ground-set labels, stored as bitmasks.
//!
//! Element labels are positive integers up to [`MAX_LABEL`]. The bit for
//! label `e` is `1 << e`, so deleting an element never renumbers anything.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest label an element may carry.
pub const MAX_LABEL: u32 = 63;

/// A set of element labels.
///
/// Ordering is by cardinality first, then lexicographic on the ascending
/// element list. This is the canonical order for flats and polynomial
/// variables everywhere in the crate.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ElementSet(u64);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    pub fn from_bits(bits: u64) -> Self {
        ElementSet(bits & !1)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(e: u32) -> Self {
        debug_assert!((1..=MAX_LABEL).contains(&e));
        ElementSet(1u64 << e)
    }

    /// Builds a set from labels, rejecting labels outside `1..=MAX_LABEL`.
    pub fn try_from_labels<I: IntoIterator<Item = u32>>(labels: I) -> Result<Self> {
        let mut bits = 0u64;
        for e in labels {
            if !(1..=MAX_LABEL).contains(&e) {
                return Err(Error::LabelOutOfRange(e));
            }
            bits |= 1u64 << e;
        }
        Ok(ElementSet(bits))
    }

    /// Panicking variant of [`ElementSet::try_from_labels`] for literals.
    pub fn of(labels: &[u32]) -> Self {
        Self::try_from_labels(labels.iter().copied()).expect("label out of range")
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, e: u32) -> bool {
        e <= MAX_LABEL && self.0 & (1u64 << e) != 0
    }

    pub fn insert(&mut self, e: u32) {
        self.0 |= 1u64 << e;
    }

    pub fn with(self, e: u32) -> Self {
        ElementSet(self.0 | (1u64 << e))
    }

    pub fn without(self, e: u32) -> Self {
        ElementSet(self.0 & !(1u64 << e))
    }

    pub fn union(self, other: Self) -> Self {
        ElementSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        ElementSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        ElementSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset(self, other: Self) -> bool {
        self.is_subset(other) && self != other
    }

    /// Smallest label in the set.
    pub fn min(self) -> Option<u32> {
        (self.0 != 0).then(|| self.0.trailing_zeros())
    }

    /// Largest label in the set.
    pub fn max(self) -> Option<u32> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros())
    }

    /// Ascending iterator over labels.
    pub fn iter(self) -> Elements {
        Elements(self.0)
    }

    pub fn to_vec(self) -> Vec<u32> {
        self.iter().collect()
    }

    /// All subsets of `self`, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = ElementSet> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(ElementSet(cur))
        })
    }

    /// Image under a label map; labels missing from the map are kept.
    pub fn map_labels(self, f: impl Fn(u32) -> u32) -> ElementSet {
        let mut out = ElementSet::EMPTY;
        for e in self.iter() {
            out.insert(f(e));
        }
        out
    }
}

pub struct Elements(u64);

impl Iterator for Elements {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(e)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Elements {}

impl IntoIterator for ElementSet {
    type Item = u32;
    type IntoIter = Elements;

    fn into_iter(self) -> Elements {
        self.iter()
    }
}

impl FromIterator<u32> for ElementSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        let mut s = ElementSet::EMPTY;
        for e in iter {
            s.insert(e);
        }
        s
    }
}

impl Ord for ElementSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            // Equal sizes: the first differing position of the two ascending
            // lists holds the lowest label of the symmetric difference.
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & (diff & diff.wrapping_neg()) != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for ElementSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Comma-joined ascending labels, e.g. `1,2,3`. The empty set prints as "".
impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for e in self.iter() {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

impl std::str::FromStr for ElementSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(ElementSet::EMPTY);
        }
        let labels = s
            .split(',')
            .map(|p| p.trim().parse::<u32>().map_err(|_| Error::BadLabel(s.to_string())))
            .collect::<Result<Vec<_>>>()?;
        ElementSet::try_from_labels(labels)
    }
}
