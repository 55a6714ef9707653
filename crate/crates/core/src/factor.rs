//! Explicit factorizations, cuteness, the cute reflection, and the (M0), (M2),
//! (M4), (M5) and closedness checks over a pool.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::atoms::AtomSet;
use crate::error::Error;
use crate::family::{arrow, is_kappa_directed, isomorphic, join_raw, kappa_union_closure, meet, Family};
use crate::instance::{Instance, Mode};
use crate::label::{label_holds, Label, LabelMatrix};
use crate::lifting::LiftingIndex;
use crate::pool::is_object;
use crate::verify::{VerificationReport, Violation};

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Factorization {
    pub middle: Family,
    pub left_label: Label,
    pub right_label: Label,
}

impl Factorization {
    /// Re-checks both legs with the clause deciders.
    pub fn verify(&self, inst: &Instance, x: &Family, y: &Family) -> bool {
        label_holds(inst, x, &self.middle, self.left_label) && label_holds(inst, &self.middle, y, self.right_label)
    }
}

fn sources(inst: &Instance, x: &Family) -> Vec<AtomSet> {
    if inst.adjoins_empty() {
        x.with_empty()
    } else {
        x.members().to_vec()
    }
}

/// `X →(c) Z →(wf) Y` with `Z` the subsets of members of `Y` no larger than `M(|x|)` for some source `x`.
pub fn factor_c_wf(inst: &Instance, x: &Family, y: &Family) -> Result<Factorization, Error> {
    inst.validate(x)?;
    inst.validate(y)?;
    if !arrow(inst, x, y) {
        return Err(Error::NoArrow);
    }
    let middle = match sources(inst, x).iter().map(|s| inst.bound(s.len())).max() {
        None => Family::bottom(),
        Some(m) => {
            let mut sets = Vec::new();
            for &t in y.canonicalize().members() {
                sets.extend(t.subsets_of_size(m.min(t.len())));
            }
            Family::from_sets(sets).canonicalize()
        }
    };
    Ok(Factorization { middle, left_label: Label::C, right_label: Label::Wf })
}

/// `X →(wc) Z →(f) Y` with `Z` the subsets `z` of members of `Y` with `z ∖ x` small for some source `x`.
pub fn factor_wc_f(inst: &Instance, x: &Family, y: &Family) -> Result<Factorization, Error> {
    inst.validate(x)?;
    inst.validate(y)?;
    if !arrow(inst, x, y) {
        return Err(Error::NoArrow);
    }
    let mut sets = Vec::new();
    for &s in &sources(inst, x) {
        for &t in y.canonicalize().members() {
            let free = t.difference(s);
            let mut k = free.len();
            while k > 0 && !inst.is_small(k) {
                k -= 1;
            }
            let core = s.intersection(t);
            sets.extend(free.subsets_of_size(k).map(|e| core.union(e)));
        }
    }
    let middle = Family::from_sets(sets).canonicalize();
    Ok(Factorization { middle, left_label: Label::Wc, right_label: Label::F })
}

/// A failure of the cuteness extension property: `{A} → X`, `{A} →(c)₀ {B}`,
/// `Q → X` and `Q →(wf) {B}`, but not `{B} → X`.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CuteViolation {
    pub a: AtomSet,
    pub b: AtomSet,
    pub q: Family,
}

/// The (c)₀ generator condition: `A ⊆ B` and `M(|A|) = M(|B|)`.
pub fn is_c0_generator(inst: &Instance, a: AtomSet, b: AtomSet) -> bool {
    a.is_subset(b) && inst.bound(a.len()) == inst.bound(b.len())
}

pub fn cute_violation(inst: &Instance, x: &Family, pool: &[Family]) -> Option<CuteViolation> {
    let full = inst.full_set();
    let into_x = |s: AtomSet| arrow(inst, &Family::from_sets([s]), x);
    for b in full.subsets() {
        if into_x(b) {
            continue;
        }
        let single_b = Family::from_sets([b]);
        let mut q_found: Option<Option<&Family>> = None;
        for a in b.subsets() {
            if !is_c0_generator(inst, a, b) || !into_x(a) {
                continue;
            }
            // the Q search does not depend on A
            let q = *q_found.get_or_insert_with(|| {
                pool.iter().find(|q| arrow(inst, q, x) && label_holds(inst, q, &single_b, Label::Wf))
            });
            if let Some(q) = q {
                return Some(CuteViolation { a, b, q: q.clone() });
            }
        }
    }
    None
}

/// Cuteness, with the middle object `Q` ranging over `pool`.
pub fn is_cute(inst: &Instance, x: &Family, pool: &[Family]) -> bool {
    cute_violation(inst, x, pool).is_none()
}

/// Meet of all cute `Y` with `X → Y` among `pool`, `X` itself and TOP.
pub fn cute_reflection(inst: &Instance, x: &Family, pool: &[Family]) -> Family {
    // a cute X is its own reflection: every other candidate lies above it
    if is_cute(inst, x, pool) {
        return x.canonicalize();
    }
    let mut acc = inst.top();
    for y in pool {
        if arrow(inst, x, y) && is_cute(inst, y, pool) {
            acc = meet(&acc, y);
        }
    }
    acc.canonicalize()
}

/// Binary colimit in the instance's mode.
pub fn pushout_object(inst: &Instance, y: &Family, z: &Family, pool: &[Family]) -> Family {
    let joined = join_raw(y, z);
    match inst.mode {
        Mode::Qt => cute_reflection(inst, &directed_hull(inst, &joined), pool),
        Mode::St | Mode::QtPlus => joined,
    }
}

/// Least κ-directed family above `x`: adjoin unions of fewer than κ members until stable.
pub fn directed_hull(inst: &Instance, x: &Family) -> Family {
    let mut acc = x.canonicalize();
    while !is_kappa_directed(inst, &acc) {
        let mut sets = acc.members().to_vec();
        sets.extend(kappa_union_closure(inst, &acc).members().iter().copied());
        acc = Family::from_sets(sets).canonicalize();
    }
    acc
}

/// Axiom selection for [`verify_axioms`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Axiom {
    M0,
    M1,
    M2,
    M4,
    M5,
    Closed,
}

impl Axiom {
    pub const ALL: [Axiom; 6] = [Axiom::M0, Axiom::M1, Axiom::M2, Axiom::M4, Axiom::M5, Axiom::Closed];

    pub fn as_str(self) -> &'static str {
        match self {
            Axiom::M0 => "m0",
            Axiom::M1 => "m1",
            Axiom::M2 => "m2",
            Axiom::M4 => "m4",
            Axiom::M5 => "m5",
            Axiom::Closed => "closed",
        }
    }

    pub fn parse(s: &str) -> Option<Axiom> {
        Axiom::ALL.into_iter().find(|a| a.as_str() == s)
    }
}

/// (M2), (M4), (M5) and closedness over `pool`.
pub fn verify_m2_m4_m5(inst: &Instance, pool: &[Family]) -> VerificationReport {
    let matrix = LabelMatrix::new(inst, pool);
    let mut report = VerificationReport::new("m2-m4-m5-closed");
    check_m2(inst, pool, &mut report);
    check_m4(inst, pool, &matrix, &mut report);
    check_m5(pool, &matrix, &mut report);
    check_closed(pool, &matrix, &mut report);
    report
}

pub(crate) fn check_m0(inst: &Instance, pool: &[Family], report: &mut VerificationReport) {
    for (i, x) in pool.iter().enumerate() {
        for y in &pool[i..] {
            let lo = meet(x, y);
            let hi = pushout_object(inst, x, y, pool);
            let mut problems: Vec<String> = Vec::new();
            if !is_object(inst, &lo) {
                problems.push(format!("meet {lo} is not an object"));
            } else if !(arrow(inst, &lo, x) && arrow(inst, &lo, y)) {
                problems.push(format!("meet {lo} is not a lower bound"));
            } else if let Some(w) = pool.iter().find(|w| arrow(inst, w, x) && arrow(inst, w, y) && !arrow(inst, w, &lo)) {
                problems.push(format!("meet {lo} is not above the lower bound {w}"));
            }
            if !is_object(inst, &hi) {
                problems.push(format!("colimit {hi} is not an object"));
            } else if !(arrow(inst, x, &hi) && arrow(inst, y, &hi)) {
                problems.push(format!("colimit {hi} is not an upper bound"));
            } else if let Some(w) = pool.iter().find(|w| arrow(inst, x, w) && arrow(inst, y, w) && !arrow(inst, &hi, w)) {
                problems.push(format!("colimit {hi} is not below the upper bound {w}"));
            }
            report.record(
                "m0",
                problems.is_empty(),
                || Violation::new("m0", [x.clone(), y.clone()], problems.join("; ")),
            );
        }
    }
}

fn check_m2(inst: &Instance, pool: &[Family], report: &mut VerificationReport) {
    for x in pool {
        for y in pool {
            if !arrow(inst, x, y) {
                continue;
            }
            for fact in [factor_c_wf(inst, x, y), factor_wc_f(inst, x, y)] {
                let fact = fact.expect("arrow checked above");
                let ok = fact.verify(inst, x, y) && is_object(inst, &fact.middle);
                report.record("m2", ok, || {
                    Violation::new(
                        "m2",
                        [x.clone(), fact.middle.clone(), y.clone()],
                        format!("({}, {}) factorization fails", fact.left_label, fact.right_label),
                    )
                });
            }
        }
    }
}

fn check_m4(inst: &Instance, pool: &[Family], m: &LabelMatrix, report: &mut VerificationReport) {
    let n = pool.len();
    let mut pushouts: BTreeMap<(usize, usize), (Family, bool)> = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            let ij = m.get(i, j);
            for k in 0..n {
                // pushforward of X →(wc) Y along X → Z
                if ij.contains(Label::Wc) && m.has(i, k, Label::Plain) {
                    let (p, ok) = pushouts
                        .entry((j, k))
                        .or_insert_with(|| {
                            let p = pushout_object(inst, &pool[j], &pool[k], pool);
                            let ok = match pool.binary_search(&p) {
                                Ok(q) => m.has(k, q, Label::W),
                                Err(_) => label_holds(inst, &pool[k], &p, Label::W),
                            };
                            (p, ok)
                        })
                        .clone();
                    report.record("m4", ok, || {
                        Violation::new(
                            "m4",
                            [pool[i].clone(), pool[j].clone(), pool[k].clone(), p.clone()],
                            String::from("pushforward of a (wc) arrow is not (w)"),
                        )
                    });
                }
                // pullback of Y →(wf) Z along X → Z, with (i, j, k) read as (Y, Z, X)
                if ij.contains(Label::Wf) && m.has(k, j, Label::Plain) {
                    let p = meet(&pool[k], &pool[i]);
                    let ok = label_holds(inst, &p, &pool[k], Label::W);
                    report.record("m4", ok, || {
                        Violation::new(
                            "m4",
                            [pool[i].clone(), pool[j].clone(), pool[k].clone(), p.clone()],
                            String::from("pullback of a (wf) arrow is not (w)"),
                        )
                    });
                }
            }
        }
    }
}

fn check_m5(pool: &[Family], m: &LabelMatrix, report: &mut VerificationReport) {
    let n = pool.len();
    for i in 0..n {
        for j in 0..n {
            if !m.has(i, j, Label::Plain) {
                continue;
            }
            for k in 0..n {
                if !m.has(j, k, Label::Plain) {
                    continue;
                }
                let a = m.has(i, j, Label::W);
                let b = m.has(j, k, Label::W);
                let c = m.has(i, k, Label::W);
                let ok = (a as u8 + b as u8 + c as u8) != 2;
                report.record("m5", ok, || {
                    Violation::new(
                        "m5",
                        [pool[i].clone(), pool[j].clone(), pool[k].clone()],
                        format!("two-out-of-three fails: w(XY)={a}, w(YZ)={b}, w(XZ)={c}"),
                    )
                });
            }
        }
    }
}

/// Closedness: each of (c), (f), (wc), (wf) is exactly the class cut out by
/// lifting against its partner class in the pool, and (wc), (wf) are the
/// intersections `c ∧ w`, `f ∧ w`.
fn check_closed(pool: &[Family], m: &LabelMatrix, report: &mut VerificationReport) {
    let idx = LiftingIndex::new(m);
    let n = pool.len();
    for i in 0..n {
        for j in 0..n {
            if !m.has(i, j, Label::Plain) {
                continue;
            }
            let lab = m.get(i, j);
            let checks = [
                (Label::C, idx.left_failure((i, j), Label::Wf).is_none(), "(c) differs from left lifting against (wf)"),
                (Label::Wc, idx.left_failure((i, j), Label::F).is_none(), "(wc) differs from left lifting against (f)"),
                (Label::F, idx.right_failure((i, j), Label::Wc).is_none(), "(f) differs from right lifting against (wc)"),
                (Label::Wf, idx.right_failure((i, j), Label::C).is_none(), "(wf) differs from right lifting against (c)"),
            ];
            for (l, generated, msg) in checks {
                report.record("closed", lab.contains(l) == generated, || {
                    Violation::new("closed", [pool[i].clone(), pool[j].clone()], String::from(msg))
                });
            }
            let w = lab.contains(Label::W);
            let ok_wc = lab.contains(Label::Wc) == (lab.contains(Label::C) && w);
            let ok_wf = lab.contains(Label::Wf) == (lab.contains(Label::F) && w);
            report.record("closed", ok_wc && ok_wf, || {
                Violation::new("closed", [pool[i].clone(), pool[j].clone()], String::from("trivial labels differ from intersections with (w)"))
            });
        }
    }
}

/// Pairs of (c, wf)-factorizations of the same arrow found in the pool that are not isomorphic.
pub fn factorization_uniqueness_violations(inst: &Instance, pool: &[Family]) -> Vec<(Family, Family, Family, Family)> {
    let m = LabelMatrix::new(inst, pool);
    let n = pool.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if !m.has(i, j, Label::Plain) {
                continue;
            }
            let mids: Vec<usize> = (0..n).filter(|&k| m.has(i, k, Label::C) && m.has(k, j, Label::Wf)).collect();
            for (a, &p) in mids.iter().enumerate() {
                for &q in &mids[a + 1..] {
                    if !isomorphic(inst, &pool[p], &pool[q]) {
                        out.push((pool[i].clone(), pool[j].clone(), pool[p].clone(), pool[q].clone()));
                    }
                }
            }
        }
    }
    out
}
