//! Finite pools standing in for the class-sized quantifiers over objects.

use alloc::format;
use alloc::string::String;
use core::fmt;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atoms::AtomSet;
use crate::enumerate::{enumerate_objects, Constraints};
use crate::error::Error;
use crate::family::{is_kappa_directed, Family};
use crate::instance::{Instance, Mode};

/// Pool size used for sampled pools when none is given.
pub const DEFAULT_SAMPLE_SIZE: usize = 48;

/// Membership in the mode's object class. Qt objects are the κ-directed
/// families; cuteness is checked separately and imposes nothing at finite κ.
pub fn is_object(inst: &Instance, x: &Family) -> bool {
    match inst.mode {
        Mode::Qt => is_kappa_directed(inst, x),
        Mode::St | Mode::QtPlus => true,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Pool {
    pub families: Vec<Family>,
    /// True iff the pool is the whole object class over the universe.
    pub complete: bool,
    pub description: String,
}

/// How to build a pool.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PoolSpec {
    Exhaustive(Constraints),
    Sampled { size: usize, seed: u64 },
    /// Exhaustive up to `max_exhaustive` atoms, sampled beyond.
    Standard { max_exhaustive: usize, size: usize, seed: u64 },
}

impl Default for PoolSpec {
    fn default() -> Self {
        PoolSpec::Standard { max_exhaustive: 4, size: DEFAULT_SAMPLE_SIZE, seed: 0 }
    }
}

impl PoolSpec {
    /// Parses `exhaustive[:max-member=K,max-size=K,cap=N]`,
    /// `sampled[:size=N,seed=S]` or `standard[:exhaustive-up-to=N,size=N,seed=S]`.
    pub fn parse(s: &str) -> Result<Self, Error> {
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = Vec::new();
        for part in rest.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| bad(s))?;
            let v: u64 = v.trim().parse().map_err(|_| bad(s))?;
            kv.push((k.trim(), v));
        }
        let get = |key: &str| kv.iter().find(|(k, _)| *k == key).map(|&(_, v)| v);
        let known = |keys: &[&str]| kv.iter().all(|(k, _)| keys.contains(k));
        match head {
            "exhaustive" if known(&["max-member", "max-size", "cap"]) => {
                let mut c = Constraints::antichains();
                c.max_member_size = get("max-member").map(|v| v as usize);
                c.max_family_size = get("max-size").map(|v| v as usize);
                c.cap = get("cap").map(|v| v as usize);
                Ok(PoolSpec::Exhaustive(c))
            }
            "sampled" if known(&["size", "seed"]) => Ok(PoolSpec::Sampled {
                size: get("size").map_or(DEFAULT_SAMPLE_SIZE, |v| v as usize),
                seed: get("seed").unwrap_or(0),
            }),
            "standard" | "default" if known(&["exhaustive-up-to", "size", "seed"]) => Ok(PoolSpec::Standard {
                max_exhaustive: get("exhaustive-up-to").map_or(4, |v| v as usize),
                size: get("size").map_or(DEFAULT_SAMPLE_SIZE, |v| v as usize),
                seed: get("seed").unwrap_or(0),
            }),
            _ => Err(bad(s)),
        }
    }

    pub fn build(&self, inst: &Instance) -> Result<Pool, Error> {
        match *self {
            PoolSpec::Exhaustive(c) => Pool::exhaustive(inst, &c),
            PoolSpec::Sampled { size, seed } => Ok(Pool::sampled(inst, size, seed)),
            PoolSpec::Standard { max_exhaustive, size, seed } => {
                if inst.universe() <= max_exhaustive {
                    Pool::exhaustive(inst, &Constraints::antichains())
                } else {
                    Ok(Pool::sampled(inst, size, seed))
                }
            }
        }
    }
}

fn bad(s: &str) -> Error {
    Error::InvalidInstance(format!("unrecognised pool spec `{s}`"))
}

impl Pool {
    /// Every canonical object satisfying the constraints.
    pub fn exhaustive(inst: &Instance, c: &Constraints) -> Result<Self, Error> {
        let mut c = *c;
        c.antichains_only = true;
        let families: Vec<Family> =
            enumerate_objects(inst, &c)?.into_iter().filter(|f| is_object(inst, f)).collect();
        let complete = c.is_unrestricted(inst.universe());
        let description = format!(
            "exhaustive {} objects over {} atoms ({} families{})",
            inst.mode.as_str(),
            inst.universe(),
            families.len(),
            if complete { "" } else { ", restricted" }
        );
        Ok(Pool { families, complete, description })
    }

    /// `size` distinct random canonical objects from a ChaCha8 stream seeded by
    /// `seed`, always including TOP, the singletons of atoms and (if an object) ⊥.
    pub fn sampled(inst: &Instance, size: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut families: Vec<Family> = Vec::new();
        let push = |f: Family, families: &mut Vec<Family>| {
            if is_object(inst, &f) && !families.contains(&f) && families.len() < size {
                families.push(f);
            }
        };
        push(inst.top(), &mut families);
        push(Family::bottom(), &mut families);
        push(Family::from_sets([AtomSet::EMPTY]), &mut families);
        push(Family::from_sets((0..inst.universe()).map(AtomSet::singleton)), &mut families);
        let full = inst.full_set().bits();
        let mut attempts = 0usize;
        while families.len() < size && attempts < size * 1000 {
            attempts += 1;
            let k = rng.random_range(1..=inst.universe().clamp(1, 6));
            let sets = (0..k).map(|_| AtomSet::from_bits(rng.random::<u32>() & full));
            push(Family::from_sets(sets).canonicalize(), &mut families);
        }
        families.sort_unstable();
        let description = format!(
            "sampled {} objects over {} atoms ({} families, seed {seed})",
            inst.mode.as_str(),
            inst.universe(),
            families.len()
        );
        Pool { families, complete: false, description }
    }

    pub fn len(&self) -> usize {
        self.families.len()
    }

    pub fn is_empty(&self) -> bool {
        self.families.is_empty()
    }

    pub fn position(&self, x: &Family) -> Option<usize> {
        self.families.binary_search(x).ok()
    }

    /// Adds `x` (canonicalized) if absent, keeping the pool sorted.
    pub fn insert(&mut self, x: &Family) -> usize {
        let c = x.canonicalize();
        match self.families.binary_search(&c) {
            Ok(i) => i,
            Err(i) => {
                self.families.insert(i, c);
                i
            }
        }
    }
}

impl fmt::Display for Pool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.description)
    }
}

impl fmt::Display for PoolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PoolSpec::Exhaustive(c) => {
                f.write_str("exhaustive")?;
                let mut parts = Vec::new();
                if let Some(k) = c.max_member_size {
                    parts.push(format!("max-member={k}"));
                }
                if let Some(k) = c.max_family_size {
                    parts.push(format!("max-size={k}"));
                }
                if let Some(k) = c.cap {
                    parts.push(format!("cap={k}"));
                }
                if !parts.is_empty() {
                    write!(f, ":{}", parts.join(","))?;
                }
                Ok(())
            }
            PoolSpec::Sampled { size, seed } => write!(f, "sampled:size={size},seed={seed}"),
            PoolSpec::Standard { max_exhaustive, size, seed } => {
                write!(f, "standard:exhaustive-up-to={max_exhaustive},size={size},seed={seed}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn qt_pool_excludes_bottom() {
        let inst = Instance::new(3, 1).unwrap();
        let pool = Pool::exhaustive(&inst, &Constraints::antichains()).unwrap();
        assert_eq!(pool.len(), 19);
        assert!(pool.complete);
        let st = Pool::exhaustive(&inst.clone().mode(Mode::St), &Constraints::antichains()).unwrap();
        assert_eq!(st.len(), 20);
    }

    #[test]
    fn sampling_is_deterministic() {
        let inst = Instance::new(5, 2).unwrap();
        let a = Pool::sampled(&inst, 30, 7);
        assert_eq!(a, Pool::sampled(&inst, 30, 7));
        assert_eq!(a.len(), 30);
        assert!(a.families.windows(2).all(|w| w[0] < w[1]));
        assert!(!a.complete);
    }

    #[test]
    fn spec_round_trip() {
        for s in ["exhaustive", "exhaustive:max-member=2,cap=50", "sampled:size=10,seed=3"] {
            assert_eq!(PoolSpec::parse(s).unwrap().to_string(), s);
        }
        assert!(PoolSpec::parse("sampled:bogus=1").is_err());
        assert!(PoolSpec::parse("nope").is_err());
    }
}
