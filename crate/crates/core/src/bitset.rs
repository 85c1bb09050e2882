//! Compact fixed-capacity sets of small indices.
//!
//! Used for graph vertex sets, ZDD ground-set subsets and LP columns.
//! Capacity is fixed at construction; sets of equal capacity compare and
//! hash like plain bit vectors, so they can key memo tables.

use smallvec::SmallVec;
use std::fmt;

const BITS: usize = 64;

/// A set of indices in `0..capacity`, stored as 64-bit blocks.
///
/// Two blocks are kept inline, which covers graphs up to 128 vertices
/// without heap allocation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitSet {
    blocks: SmallVec<[u64; 2]>,
    capacity: usize,
}

impl BitSet {
    pub fn new(capacity: usize) -> Self {
        let nblocks = capacity.div_ceil(BITS);
        BitSet {
            blocks: smallvec::smallvec![0; nblocks],
            capacity,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.capacity);
        self.blocks[i / BITS] |= 1u64 << (i % BITS);
    }

    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.capacity);
        self.blocks[i / BITS] &= !(1u64 << (i % BITS));
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.capacity && self.blocks[i / BITS] >> (i % BITS) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn clear(&mut self) {
        self.blocks.iter_mut().for_each(|b| *b = 0);
    }

    pub fn union_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.capacity, other.capacity);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.capacity, other.capacity);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.capacity, other.capacity);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= !b;
        }
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        self.blocks.iter().zip(&other.blocks).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & !b == 0)
    }

    /// Number of elements in `self ∩ other`.
    pub fn intersection_len(&self, other: &BitSet) -> usize {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Remove all elements with index below `start`.
    pub fn clear_below(&mut self, start: usize) {
        let full = (start / BITS).min(self.blocks.len());
        for b in &mut self.blocks[..full] {
            *b = 0;
        }
        if start % BITS != 0 && full < self.blocks.len() {
            self.blocks[full] &= !0u64 << (start % BITS);
        }
    }

    /// Any element in the half-open index range `[start, end)`?
    pub fn any_in_range(&self, start: usize, end: usize) -> bool {
        let end = end.min(self.capacity);
        if start >= end {
            return false;
        }
        let (first, last) = (start / BITS, (end - 1) / BITS);
        for bi in first..=last {
            let mut mask = !0u64;
            if bi == first {
                mask &= !0u64 << (start % BITS);
            }
            if bi == last {
                let top = (end - 1) % BITS;
                mask &= !0u64 >> (BITS - 1 - top);
            }
            if self.blocks[bi] & mask != 0 {
                return true;
            }
        }
        false
    }

    /// Smallest element, if any.
    pub fn first(&self) -> Option<usize> {
        for (bi, &b) in self.blocks.iter().enumerate() {
            if b != 0 {
                return Some(bi * BITS + b.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Iterate elements in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(bi, &block)| {
            let mut b = block;
            std::iter::from_fn(move || {
                if b == 0 {
                    None
                } else {
                    let t = b.trailing_zeros() as usize;
                    b &= b - 1;
                    Some(bi * BITS + t)
                }
            })
        })
    }

    pub fn from_iter(capacity: usize, items: impl IntoIterator<Item = usize>) -> Self {
        let mut s = BitSet::new(capacity);
        for i in items {
            s.insert(i);
        }
        s
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_contains_len() {
        let mut s = BitSet::new(100);
        assert!(s.is_empty());
        s.insert(0);
        s.insert(63);
        s.insert(64);
        s.insert(99);
        assert_eq!(s.len(), 4);
        assert!(s.contains(63) && s.contains(64));
        assert!(!s.contains(1));
        s.remove(63);
        assert!(!s.contains(63));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 64, 99]);
    }

    #[test]
    fn range_queries() {
        let s = BitSet::from_iter(200, [5, 64, 130]);
        assert!(s.any_in_range(0, 6));
        assert!(!s.any_in_range(0, 5));
        assert!(!s.any_in_range(6, 64));
        assert!(s.any_in_range(6, 65));
        assert!(s.any_in_range(130, 131));
        assert!(!s.any_in_range(131, 200));
        assert!(!s.any_in_range(10, 10));
        assert!(!BitSet::new(0).any_in_range(0, 10));
    }

    #[test]
    fn set_algebra() {
        let a = BitSet::from_iter(10, [1, 3, 5]);
        let b = BitSet::from_iter(10, [3, 4]);
        assert!(a.intersects(&b));
        assert_eq!(a.intersection_len(&b), 1);
        let mut c = a.clone();
        c.difference_with(&b);
        assert_eq!(c.iter().collect::<Vec<_>>(), vec![1, 5]);
        assert!(c.is_subset(&a));
        assert_eq!(a.first(), Some(1));
        assert_eq!(BitSet::new(10).first(), None);
    }
}
