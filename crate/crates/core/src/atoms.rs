//! Bitmask sets over a small universe of atoms `0..n`, and atom permutations.

use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;

/// Largest universe the bitmask representation can hold.
pub const MAX_REPRESENTABLE_ATOMS: usize = 32;

/// A subset of the universe, stored as a bitmask (bit `i` set iff atom `i` is a member).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct AtomSet(u32);

impl AtomSet {
    pub const EMPTY: AtomSet = AtomSet(0);

    #[inline]
    pub const fn from_bits(bits: u32) -> Self {
        AtomSet(bits)
    }

    #[inline]
    pub const fn bits(self) -> u32 {
        self.0
    }

    /// The full universe `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_REPRESENTABLE_ATOMS);
        if n >= 32 {
            AtomSet(u32::MAX)
        } else {
            AtomSet((1u32 << n) - 1)
        }
    }

    pub fn from_atoms<I: IntoIterator<Item = usize>>(atoms: I) -> Result<Self, Error> {
        let mut bits = 0u32;
        for a in atoms {
            if a >= MAX_REPRESENTABLE_ATOMS {
                return Err(Error::AtomOutOfRange { atom: a, universe: MAX_REPRESENTABLE_ATOMS });
            }
            bits |= 1 << a;
        }
        Ok(AtomSet(bits))
    }

    #[inline]
    pub fn singleton(a: usize) -> Self {
        AtomSet(1 << a)
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub const fn contains(self, atom: usize) -> bool {
        atom < 32 && self.0 & (1 << atom) != 0
    }

    #[inline]
    pub const fn is_subset(self, other: AtomSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub const fn union(self, other: AtomSet) -> AtomSet {
        AtomSet(self.0 | other.0)
    }

    #[inline]
    pub const fn intersection(self, other: AtomSet) -> AtomSet {
        AtomSet(self.0 & other.0)
    }

    #[inline]
    pub const fn difference(self, other: AtomSet) -> AtomSet {
        AtomSet(self.0 & !other.0)
    }

    /// Largest atom index plus one, or 0 for the empty set.
    pub const fn span(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    pub fn atoms(self) -> Atoms {
        Atoms(self.0)
    }

    /// All subsets of `self`, starting with the empty set.
    pub fn subsets(self) -> Subsets {
        Subsets { set: self.0, next: Some(0) }
    }

    /// All subsets of `self` with exactly `k` members, in increasing bitmask order.
    pub fn subsets_of_size(self, k: usize) -> SubsetsOfSize {
        let positions: Vec<u8> = self.atoms().map(|a| a as u8).collect();
        let idx = if k <= positions.len() { Some((0..k).collect()) } else { None };
        SubsetsOfSize { positions, idx }
    }
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.atoms()).finish()
    }
}

impl fmt::Display for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.atoms().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

/// Iterator over the atoms of a set in increasing order.
pub struct Atoms(u32);

impl Iterator for Atoms {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let a = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(a)
    }
}

/// Carry-rippler enumeration of all subsets of a mask.
pub struct Subsets {
    set: u32,
    next: Option<u32>,
}

impl Iterator for Subsets {
    type Item = AtomSet;

    fn next(&mut self) -> Option<AtomSet> {
        let cur = self.next?;
        let nxt = cur.wrapping_sub(self.set) & self.set;
        self.next = if nxt == 0 { None } else { Some(nxt) };
        Some(AtomSet(cur))
    }
}

/// Combinations of fixed size drawn from the atoms of a set.
pub struct SubsetsOfSize {
    positions: Vec<u8>,
    idx: Option<Vec<usize>>,
}

impl Iterator for SubsetsOfSize {
    type Item = AtomSet;

    fn next(&mut self) -> Option<AtomSet> {
        let idx = self.idx.as_mut()?;
        let bits = idx.iter().fold(0u32, |acc, &i| acc | 1 << self.positions[i]);
        // advance to the next combination
        let n = self.positions.len();
        let k = idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.idx = None;
                break;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(AtomSet(bits))
    }
}

/// A bijection on the atoms `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n as u8).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, Error> {
        let n = images.len();
        let mut seen = 0u64;
        for &i in &images {
            if i >= n || seen & (1 << i) != 0 {
                return Err(Error::NotAPermutation);
            }
            seen |= 1 << i;
        }
        Ok(Permutation { images: images.into_iter().map(|i| i as u8).collect() })
    }

    /// The transposition exchanging `a` and `b`.
    pub fn swap(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.images.swap(a, b);
        p
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn image(&self, atom: usize) -> usize {
        self.images[atom] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.images.iter().map(|&i| i as usize)
    }

    pub fn apply(&self, set: AtomSet) -> AtomSet {
        let mut bits = 0u32;
        for a in set.atoms() {
            bits |= 1 << self.images[a];
        }
        AtomSet(bits)
    }

    /// `self ∘ other`: first apply `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation { images: other.images.iter().map(|&i| self.images[i as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = alloc::vec![0u8; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j as usize] = i as u8;
        }
        Permutation { images: inv }
    }

    /// Every permutation of `0..n`, in lexicographic order of image vectors.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<u8> = (0..n as u8).collect();
        loop {
            out.push(Permutation { images: cur.clone() });
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }
}

#[cfg(feature = "serde")]
mod serde_impl {
    use super::*;
    use serde::de::{Deserialize, Deserializer, Error as _};
    use serde::ser::{Serialize, SerializeSeq, Serializer};

    impl Serialize for AtomSet {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(self.len()))?;
            for a in self.atoms() {
                seq.serialize_element(&a)?;
            }
            seq.end()
        }
    }

    impl<'de> Deserialize<'de> for AtomSet {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            let atoms = Vec::<usize>::deserialize(d)?;
            AtomSet::from_atoms(atoms).map_err(D::Error::custom)
        }
    }

    impl Serialize for Permutation {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(self.len()))?;
            for a in self.images() {
                seq.serialize_element(&a)?;
            }
            seq.end()
        }
    }
}
