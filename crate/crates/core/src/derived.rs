//! Left-derived values of object functions: minimization over homotopy-reachable
//! objects, optionally restricted to cofibrant ones.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;
use crate::family::{arrow, Family};
use crate::homotopy::{HoOutcome, Reach, ZigzagCertificate};
use crate::instance::{Instance, Mode};
use crate::label::{label_holds, Label};

/// Naturals extended with ∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtNat {
    Finite(u64),
    Infinite,
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Finite(n) => write!(f, "{n}"),
            ExtNat::Infinite => f.write_str("inf"),
        }
    }
}

#[cfg(feature = "serde")]
mod serde_impl {
    use super::ExtNat;
    use serde::de::{self, Deserializer, Visitor};
    use serde::{Deserialize, Serialize, Serializer};

    impl Serialize for ExtNat {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            match self {
                ExtNat::Finite(n) => s.serialize_u64(*n),
                ExtNat::Infinite => s.serialize_str("inf"),
            }
        }
    }

    impl<'de> Deserialize<'de> for ExtNat {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            struct V;
            impl Visitor<'_> for V {
                type Value = ExtNat;
                fn expecting(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
                    f.write_str("a natural number or \"inf\"")
                }
                fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtNat, E> {
                    Ok(ExtNat::Finite(v))
                }
                fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtNat, E> {
                    if v == "inf" {
                        Ok(ExtNat::Infinite)
                    } else {
                        Err(E::invalid_value(de::Unexpected::Str(v), &self))
                    }
                }
            }
            d.deserialize_any(V)
        }
    }
}

/// A function from families to extended naturals.
pub trait ObjectFunction {
    fn name(&self) -> String;
    fn eval(&self, inst: &Instance, x: &Family) -> ExtNat;
}

/// The built-in object functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// Member count of the canonical form.
    Card,
    /// Member count as presented, duplicates and dominated members included.
    RawCard,
    Constant(u64),
    /// Total size of the canonical members.
    MemberSizeSum,
}

impl Builtin {
    /// Parses `card`, `raw-card`, `member-size-sum` or `constant:N`.
    pub fn parse(s: &str) -> Option<Builtin> {
        match s {
            "card" => Some(Builtin::Card),
            "raw-card" => Some(Builtin::RawCard),
            "member-size-sum" => Some(Builtin::MemberSizeSum),
            _ => s.strip_prefix("constant:").and_then(|v| v.parse().ok()).map(Builtin::Constant),
        }
    }
}

impl ObjectFunction for Builtin {
    fn name(&self) -> String {
        match self {
            Builtin::Card => "card".to_string(),
            Builtin::RawCard => "raw-card".to_string(),
            Builtin::Constant(c) => format!("constant:{c}"),
            Builtin::MemberSizeSum => "member-size-sum".to_string(),
        }
    }

    fn eval(&self, _inst: &Instance, x: &Family) -> ExtNat {
        match self {
            Builtin::Card => ExtNat::Finite(x.cardinality() as u64),
            Builtin::RawCard => ExtNat::Finite(x.len() as u64),
            Builtin::Constant(c) => ExtNat::Finite(*c),
            Builtin::MemberSizeSum => {
                ExtNat::Finite(x.canonicalize().iter().map(|m| m.len() as u64).sum())
            }
        }
    }
}

/// A named closure as an object function.
pub struct FnFunction<F> {
    pub name: String,
    pub f: F,
}

impl<F: Fn(&Instance, &Family) -> ExtNat> ObjectFunction for FnFunction<F> {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn eval(&self, inst: &Instance, x: &Family) -> ExtNat {
        (self.f)(inst, x)
    }
}

impl ObjectFunction for Box<dyn ObjectFunction> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn eval(&self, inst: &Instance, x: &Family) -> ExtNat {
        (**self).eval(inst, x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DerivedResult {
    pub function: String,
    /// Absent when no candidate is reachable.
    pub value: Option<ExtNat>,
    pub witness: Option<Family>,
    pub certificate: Option<ZigzagCertificate>,
    /// No candidate with a smaller value was left undecided.
    pub exhaustive: bool,
    /// The candidate pool is the whole object class.
    pub pool_complete: bool,
    pub candidates: usize,
    pub diagnosis: Option<String>,
}

/// Search parameters shared by the derived-value computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Search<'a> {
    pub pool: &'a [Family],
    pub depth: usize,
    /// Asserts that `pool` is the whole object class, enabling exhaustive refutations.
    pub complete: bool,
}

/// `min F(Y)` over `Y ∈ pool` with `X ⟶_h Y`.
pub fn derived_plain(inst: &Instance, f: &dyn ObjectFunction, x: &Family, s: Search<'_>) -> DerivedResult {
    let plain = inst.clone().without_base();
    minimize(&plain, f, x, s, |_| true)
}

/// `min F(Y)` over cofibrant `Y ∈ pool` (base `→(c) Y`) with `X ⟶_h Y`; with a base,
/// every zigzag vertex must receive an arrow from it.
pub fn derived_cofibrant(inst: &Instance, f: &dyn ObjectFunction, x: &Family, s: Search<'_>) -> DerivedResult {
    let base = inst.base_or_bottom();
    minimize(inst, f, x, s, |y| arrow(inst, &base, y) && label_holds(inst, &base, y, Label::C))
}

/// The derived cardinality in Qt⁺ mode.
pub fn revised_power_derived(inst: &Instance, x: &Family, s: Search<'_>) -> Result<DerivedResult, Error> {
    if inst.mode != Mode::QtPlus {
        return Err(Error::WrongMode { expected: "qt+" });
    }
    Ok(derived_cofibrant(inst, &Builtin::Card, x, s))
}

fn minimize(
    inst: &Instance,
    f: &dyn ObjectFunction,
    x: &Family,
    s: Search<'_>,
    admissible: impl Fn(&Family) -> bool,
) -> DerivedResult {
    let mut vertices = s.pool.to_vec();
    vertices.push(x.canonicalize());
    let reach = Reach::new(inst, x, &vertices, s.depth, s.complete);
    let mut candidates: Vec<(ExtNat, &Family)> =
        reach.vertices().iter().filter(|y| admissible(y)).map(|y| (f.eval(inst, y), y)).collect();
    candidates.sort();
    let mut undecided = false;
    for &(value, y) in &candidates {
        match reach.outcome(inst, y) {
            HoOutcome::Yes { certificate } => {
                return DerivedResult {
                    function: f.name(),
                    value: Some(value),
                    witness: Some(y.clone()),
                    certificate: Some(certificate),
                    exhaustive: !undecided,
                    pool_complete: s.complete,
                    candidates: candidates.len(),
                    diagnosis: undecided.then(|| String::from("a smaller candidate was left undecided")),
                };
            }
            HoOutcome::Unknown { .. } => undecided = true,
            HoOutcome::No { .. } => {}
        }
    }
    DerivedResult {
        function: f.name(),
        value: None,
        witness: None,
        certificate: None,
        exhaustive: !undecided,
        pool_complete: s.complete,
        candidates: candidates.len(),
        diagnosis: Some(format!("no admissible candidate among {} is reachable", candidates.len())),
    }
}
