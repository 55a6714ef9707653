//! Set families (the objects) and their label-free posetal structure.
//!
//! A family is a finite collection of subsets of the universe. Arrows are
//! domination: `X → Y` iff every member of `X` is contained in some member of
//! `Y`. Isomorphic families share a canonical form, the antichain of their
//! ⊆-maximal members.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::atoms::{AtomSet, Permutation};
use crate::error::Error;
use crate::instance::{Instance, Mode};

/// A finite family of subsets. Members are kept sorted by bitmask and deduplicated,
/// so presentation order never matters; the family need not be an antichain.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Family {
    members: Vec<AtomSet>,
}

impl Family {
    /// The empty family ⊥.
    pub const fn bottom() -> Self {
        Family { members: Vec::new() }
    }

    pub fn from_sets<I: IntoIterator<Item = AtomSet>>(sets: I) -> Self {
        let mut members: Vec<AtomSet> = sets.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Family { members }
    }

    /// Builds a family from atom lists, e.g. `&[&[0, 1], &[2]]`.
    pub fn from_lists<L: AsRef<[usize]>>(lists: &[L]) -> Result<Self, Error> {
        let mut sets = Vec::with_capacity(lists.len());
        for l in lists {
            sets.push(AtomSet::from_atoms(l.as_ref().iter().copied())?);
        }
        Ok(Self::from_sets(sets))
    }

    pub fn members(&self) -> &[AtomSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, set: AtomSet) -> bool {
        self.members.binary_search(&set).is_ok()
    }

    /// Union of all members.
    pub fn support(&self) -> AtomSet {
        self.members.iter().fold(AtomSet::EMPTY, |acc, &m| acc.union(m))
    }

    /// Size of the largest member (0 for ⊥).
    pub fn max_member_size(&self) -> usize {
        self.members.iter().map(|m| m.len()).max().unwrap_or(0)
    }

    /// True iff some member contains `set`.
    #[inline]
    pub fn covers(&self, set: AtomSet) -> bool {
        self.members.iter().any(|&m| set.is_subset(m))
    }

    pub fn is_antichain(&self) -> bool {
        self.members
            .iter()
            .enumerate()
            .all(|(i, &a)| self.members.iter().enumerate().all(|(j, &b)| i == j || !a.is_subset(b)))
    }

    /// The antichain of ⊆-maximal members.
    pub fn canonicalize(&self) -> Family {
        Family { members: maximal_members(&self.members) }
    }

    /// Number of members of the canonical form.
    pub fn cardinality(&self) -> usize {
        if self.is_antichain() {
            self.len()
        } else {
            self.canonicalize().len()
        }
    }

    /// The family with the empty set adjoined, as a plain member list.
    pub(crate) fn with_empty(&self) -> Vec<AtomSet> {
        let mut v = Vec::with_capacity(self.members.len() + 1);
        if self.members.first() != Some(&AtomSet::EMPTY) {
            v.push(AtomSet::EMPTY);
        }
        v.extend_from_slice(&self.members);
        v
    }

    pub fn iter(&self) -> core::slice::Iter<'_, AtomSet> {
        self.members.iter()
    }
}

/// Keeps the ⊆-maximal sets of `sets`, sorted and deduplicated.
pub(crate) fn maximal_members(sets: &[AtomSet]) -> Vec<AtomSet> {
    let mut sorted: Vec<AtomSet> = sets.to_vec();
    // larger sets first, so a candidate only needs checking against kept sets
    sorted.sort_unstable_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    sorted.dedup();
    let mut kept: Vec<AtomSet> = Vec::with_capacity(sorted.len());
    for s in sorted {
        if !kept.iter().any(|&k| s.is_subset(k)) {
            kept.push(s);
        }
    }
    kept.sort_unstable();
    kept
}

/// Shortlex: fewer members first, then lexicographic by member bitmasks.
impl Ord for Family {
    fn cmp(&self, other: &Self) -> Ordering {
        self.members.len().cmp(&other.members.len()).then_with(|| self.members.cmp(&other.members))
    }
}

impl PartialOrd for Family {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

impl<'a> IntoIterator for &'a Family {
    type Item = &'a AtomSet;
    type IntoIter = core::slice::Iter<'a, AtomSet>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

#[cfg(feature = "serde")]
mod serde_impl {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    impl Serialize for Family {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            self.members.serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for Family {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            Ok(Family::from_sets(Vec::<AtomSet>::deserialize(d)?))
        }
    }
}

/// Raw domination `∀x∈X ∃y∈Y x ⊆ y`, ignoring the mode.
#[inline]
pub fn dominates(x: &[AtomSet], y: &[AtomSet]) -> bool {
    x.iter().all(|&a| y.iter().any(|&b| a.is_subset(b)))
}

/// Arrow test in the instance's mode, without validating the operands.
pub fn arrow(inst: &Instance, x: &Family, y: &Family) -> bool {
    match inst.mode {
        Mode::QtPlus => {
            dominates(kappa_union_closure(inst, x).members(), kappa_union_closure(inst, y).members())
        }
        _ => dominates(x.members(), y.members()),
    }
}

/// `X → Y`: every member of `X` lies inside a member of `Y` (through κ-union
/// closures in Qt⁺ mode).
pub fn arrow_exists(inst: &Instance, x: &Family, y: &Family) -> Result<bool, Error> {
    inst.validate(x)?;
    inst.validate(y)?;
    Ok(arrow(inst, x, y))
}

/// Mutual arrows.
pub fn isomorphic(inst: &Instance, x: &Family, y: &Family) -> bool {
    arrow(inst, x, y) && arrow(inst, y, x)
}

pub fn canonicalize(x: &Family) -> Family {
    x.canonicalize()
}

/// Greatest lower bound: the canonical family of pairwise intersections.
pub fn meet(x: &Family, y: &Family) -> Family {
    let mut sets = Vec::with_capacity(x.len() * y.len());
    for &a in x {
        for &b in y {
            sets.push(a.intersection(b));
        }
    }
    Family { members: maximal_members(&sets) }
}

/// Canonical union of the two member collections (the St-mode least upper bound).
pub fn join_raw(x: &Family, y: &Family) -> Family {
    let mut sets = x.members.clone();
    sets.extend_from_slice(&y.members);
    Family { members: maximal_members(&sets) }
}

/// Canonical antichain of all unions of fewer than κ members; the empty union ∅ is included.
pub fn kappa_union_closure(inst: &Instance, x: &Family) -> Family {
    let mut level = alloc::vec![AtomSet::EMPTY];
    let base = maximal_members(x.members());
    for _ in 1..inst.kappa() {
        let mut next = level.clone();
        for &c in &level {
            for &m in &base {
                next.push(c.union(m));
            }
        }
        let next = maximal_members(&next);
        if next == level {
            break;
        }
        level = next;
    }
    Family { members: level }
}

/// Any fewer than κ members have a common upper bound inside the family.
pub fn is_kappa_directed(inst: &Instance, x: &Family) -> bool {
    dominates(kappa_union_closure(inst, x).members(), x.members())
}

/// `{p[x] : x ∈ X}`.
pub fn apply_permutation(x: &Family, p: &Permutation) -> Family {
    Family::from_sets(x.iter().map(|&m| p.apply(m)))
}

/// Checked form of [`apply_permutation`].
pub fn apply_permutation_checked(
    inst: &Instance,
    x: &Family,
    p: &Permutation,
) -> Result<Family, Error> {
    if p.len() != inst.universe() {
        return Err(Error::PermutationSize { perm: p.len(), universe: inst.universe() });
    }
    inst.validate(x)?;
    Ok(apply_permutation(x, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(lists: &[&[usize]]) -> Family {
        Family::from_lists(lists).unwrap()
    }

    #[test]
    fn arrow_examples() {
        let inst = Instance::new(3, 1).unwrap();
        assert!(arrow_exists(&inst, &fam(&[&[0, 1]]), &fam(&[&[0, 1, 2]])).unwrap());
        assert!(arrow_exists(&inst, &Family::bottom(), &fam(&[&[0]])).unwrap());
        assert!(!arrow_exists(&inst, &fam(&[&[0]]), &Family::bottom()).unwrap());
        assert!(arrow_exists(&inst, &fam(&[&[3]]), &Family::bottom()).is_err());
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(fam(&[&[0], &[0, 1]]).canonicalize(), fam(&[&[0, 1]]));
        assert_eq!(fam(&[&[0, 1], &[1, 2]]).canonicalize(), fam(&[&[0, 1], &[1, 2]]));
        assert_eq!(Family::bottom().canonicalize(), Family::bottom());
    }

    #[test]
    fn meet_examples() {
        assert_eq!(meet(&fam(&[&[0, 1], &[2, 3]]), &fam(&[&[1, 2, 3]])), fam(&[&[1], &[2, 3]]));
        let x = fam(&[&[0], &[0, 2], &[1]]);
        let top = fam(&[&[0, 1, 2, 3]]);
        assert_eq!(meet(&x, &top), x.canonicalize());
        assert_eq!(meet(&fam(&[&[0]]), &fam(&[&[1]])), fam(&[&[]]));
    }

    #[test]
    fn join_examples() {
        assert_eq!(join_raw(&fam(&[&[0]]), &fam(&[&[1]])), fam(&[&[0], &[1]]));
        assert_eq!(join_raw(&fam(&[&[0]]), &fam(&[&[0, 1]])), fam(&[&[0, 1]]));
        let x = fam(&[&[0, 1], &[1]]);
        assert_eq!(join_raw(&Family::bottom(), &x), x.canonicalize());
    }

    #[test]
    fn closure_examples() {
        let k1 = Instance::new(3, 1).unwrap();
        let k2 = Instance::new(3, 2).unwrap();
        let k3 = Instance::new(3, 3).unwrap();
        let x = fam(&[&[0], &[1]]);
        assert_eq!(kappa_union_closure(&k2, &x), x);
        assert_eq!(kappa_union_closure(&k3, &x), fam(&[&[0, 1]]));
        assert_eq!(kappa_union_closure(&k1, &x), fam(&[&[]]));
        assert_eq!(kappa_union_closure(&k1, &fam(&[&[0, 1, 2]])), fam(&[&[]]));
    }

    #[test]
    fn directed_examples() {
        let k2 = Instance::new(3, 2).unwrap();
        let k3 = Instance::new(3, 3).unwrap();
        assert!(is_kappa_directed(&k2, &fam(&[&[0], &[2]])));
        assert!(!is_kappa_directed(&k3, &fam(&[&[0], &[1]])));
        assert!(is_kappa_directed(&k3, &fam(&[&[0], &[1], &[0, 1]])));
        // the empty union has no bound in ⊥
        assert!(!is_kappa_directed(&k2, &Family::bottom()));
    }

    #[test]
    fn permutation_examples() {
        let x = fam(&[&[0, 1]]);
        let swap = Permutation::swap(3, 0, 2);
        assert_eq!(apply_permutation(&x, &swap), fam(&[&[1, 2]]));
        assert_eq!(apply_permutation(&x, &Permutation::identity(3)), x);
        assert_eq!(apply_permutation(&apply_permutation(&x, &swap), &swap), x);
        let inst = Instance::new(4, 1).unwrap();
        assert!(apply_permutation_checked(&inst, &x, &swap).is_err());
    }

    #[test]
    fn shortlex_order() {
        let mut v = alloc::vec![fam(&[&[0], &[1]]), fam(&[&[1]]), Family::bottom(), fam(&[&[0]]), fam(&[&[]])];
        v.sort();
        assert_eq!(v, [Family::bottom(), fam(&[&[]]), fam(&[&[0]]), fam(&[&[1]]), fam(&[&[0], &[1]])]);
    }
}
