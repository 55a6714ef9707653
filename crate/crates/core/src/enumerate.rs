//! Exhaustive enumeration of families, the quantification domain of the suites.

use alloc::vec::Vec;

use crate::atoms::AtomSet;
use crate::error::Error;
use crate::family::Family;
use crate::instance::Instance;

/// Default hard cap on enumerated pool sizes.
pub const DEFAULT_POOL_CAP: usize = 10_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Constraints {
    pub max_member_size: Option<usize>,
    pub max_family_size: Option<usize>,
    pub antichains_only: bool,
    /// Overrides [`DEFAULT_POOL_CAP`].
    pub cap: Option<usize>,
}

impl Constraints {
    /// Every antichain over the universe.
    pub fn antichains() -> Self {
        Constraints { antichains_only: true, ..Default::default() }
    }

    pub fn max_member_size(mut self, k: usize) -> Self {
        self.max_member_size = Some(k);
        self
    }

    pub fn max_family_size(mut self, k: usize) -> Self {
        self.max_family_size = Some(k);
        self
    }

    pub fn cap(mut self, cap: usize) -> Self {
        self.cap = Some(cap);
        self
    }

    /// True when the constraints leave the antichain enumeration unrestricted.
    pub fn is_unrestricted(&self, universe: usize) -> bool {
        self.antichains_only
            && self.max_member_size.is_none_or(|k| k >= universe)
            && self.max_family_size.is_none()
    }
}

/// All families satisfying `c`, in shortlex order, without duplicates.
///
/// With `antichains_only` the families are exactly the canonical forms; otherwise
/// every collection of admissible members is listed.
pub fn enumerate_objects(inst: &Instance, c: &Constraints) -> Result<Vec<Family>, Error> {
    let cap = c.cap.unwrap_or(DEFAULT_POOL_CAP);
    let max_size = c.max_member_size.unwrap_or(inst.universe());
    let max_count = c.max_family_size.unwrap_or(usize::MAX);
    let candidates: Vec<AtomSet> = inst.full_set().subsets().filter(|s| s.len() <= max_size).collect();
    let mut out = Vec::new();
    if c.antichains_only {
        if antichain_lower_bound(inst.universe(), max_size, max_count) > cap as u128 {
            return Err(Error::PoolCapExceeded { cap });
        }
        let mut chosen = Vec::new();
        antichains(&candidates, 0, &mut chosen, max_count, cap, &mut out)?;
    } else {
        let m = candidates.len();
        let mut total = 0u128;
        let mut binom = 1u128;
        for i in 0..=m.min(max_count) {
            total += binom;
            binom = binom * (m - i) as u128 / (i + 1) as u128;
        }
        if total > cap as u128 {
            return Err(Error::PoolCapExceeded { cap });
        }
        for mask in 0u64..(1u64 << m) {
            if mask.count_ones() as usize > max_count {
                continue;
            }
            if out.len() >= cap {
                return Err(Error::PoolCapExceeded { cap });
            }
            out.push(Family::from_sets((0..m).filter(|&i| mask >> i & 1 == 1).map(|i| candidates[i])));
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Subfamilies of the widest admissible layer are antichains, so their number
/// bounds the enumeration from below (saturating).
fn antichain_lower_bound(n: usize, max_size: usize, max_count: usize) -> u128 {
    let choose = |n: usize, k: usize| (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i + 1) as u128);
    let width = (0..=max_size.min(n)).map(|k| choose(n, k)).max().unwrap_or(1);
    let width = usize::try_from(width).unwrap_or(usize::MAX);
    if width >= 128 && max_count >= width {
        return u128::MAX;
    }
    (0..=width.min(max_count)).fold(0u128, |acc, i| acc.saturating_add(choose(width, i)))
}

/// Every antichain of subsets of `support`, in shortlex order.
pub fn antichains_within(support: AtomSet, cap: usize) -> Result<Vec<Family>, Error> {
    let candidates: Vec<AtomSet> = support.subsets().collect();
    let mut out = Vec::new();
    antichains(&candidates, 0, &mut Vec::new(), usize::MAX, cap, &mut out)?;
    out.sort_unstable();
    Ok(out)
}

fn antichains(
    cands: &[AtomSet],
    start: usize,
    chosen: &mut Vec<AtomSet>,
    max_count: usize,
    cap: usize,
    out: &mut Vec<Family>,
) -> Result<(), Error> {
    if out.len() >= cap {
        return Err(Error::PoolCapExceeded { cap });
    }
    out.push(Family::from_sets(chosen.iter().copied()));
    if chosen.len() >= max_count {
        return Ok(());
    }
    for i in start..cands.len() {
        let s = cands[i];
        if chosen.iter().all(|&t| !s.is_subset(t) && !t.is_subset(s)) {
            chosen.push(s);
            antichains(cands, i + 1, chosen, max_count, cap, out)?;
            chosen.pop();
        }
    }
    Ok(())
}
