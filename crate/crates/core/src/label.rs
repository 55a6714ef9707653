//! The six arrow labels and their clause deciders.
//!
//! Source quantifiers range over `X° = X ∪ {∅}` and every absorbed sum `a + κ`
//! is read as `M(a) = max(a, κ)`. All clauses are monotone in the members, so
//! they are evaluated on canonical forms.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::atoms::AtomSet;
use crate::error::Error;
use crate::family::{dominates, kappa_union_closure, Family};
use crate::instance::{COrientation, Instance, Mode, Variant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Label {
    Plain,
    C,
    F,
    W,
    Wc,
    Wf,
}

impl Label {
    pub const ALL: [Label; 6] = [Label::Plain, Label::C, Label::F, Label::W, Label::Wc, Label::Wf];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Plain => "plain",
            Label::C => "c",
            Label::F => "f",
            Label::W => "w",
            Label::Wc => "wc",
            Label::Wf => "wf",
        }
    }

    const fn bit(self) -> u8 {
        1 << self as u8
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Label::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

/// A set of labels, one bit per [`Label`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct LabelSet(u8);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);
    pub const ALL: LabelSet = LabelSet(0b11_1111);

    pub fn contains(self, l: Label) -> bool {
        self.0 & l.bit() != 0
    }

    pub fn insert(&mut self, l: Label) {
        self.0 |= l.bit();
    }

    pub fn remove(&mut self, l: Label) {
        self.0 &= !l.bit();
    }

    pub fn iter(self) -> impl Iterator<Item = Label> {
        Label::ALL.into_iter().filter(move |&l| self.contains(l))
    }
}

/// Why a clause fails: the quantified members that admit no witness.
///
/// `x` is absent for clauses whose outer quantifier ranges over targets only.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Counterwitness {
    pub x: Option<AtomSet>,
    pub y: AtomSet,
    pub y_prime: Option<AtomSet>,
}

/// The operands as the clauses see them: canonical, and closed in Qt⁺ mode.
struct Operands {
    /// `X°` (or `X` when the mutation drops the adjunction).
    src: Vec<AtomSet>,
    /// `X`, for the (w) clause without adjunction.
    src_bare: Vec<AtomSet>,
    tgt: Vec<AtomSet>,
}

impl Operands {
    fn new(inst: &Instance, x: &Family, y: &Family) -> Self {
        let (x, y) = match inst.mode {
            Mode::QtPlus => (kappa_union_closure(inst, x), kappa_union_closure(inst, y)),
            _ => (x.canonicalize(), y.canonicalize()),
        };
        let src = if inst.adjoins_empty() { x.with_empty() } else { x.members().to_vec() };
        Operands { src, src_bare: x.members().to_vec(), tgt: y.members().to_vec() }
    }

    fn w_src(&self, inst: &Instance) -> &[AtomSet] {
        if inst.w_adjoins_empty() {
            &self.src
        } else {
            &self.src_bare
        }
    }
}

fn covered(sources: &[AtomSet], set: AtomSet) -> bool {
    sources.iter().any(|&s| set.is_subset(s))
}

fn plain_clause(ops: &Operands) -> Option<Counterwitness> {
    let src = &ops.src_bare;
    src.iter()
        .find(|&&x| !covered(&ops.tgt, x))
        .map(|&x| Counterwitness { x: Some(x), y: AtomSet::EMPTY, y_prime: None })
}

fn wc_clause(inst: &Instance, ops: &Operands) -> Option<Counterwitness> {
    ops.tgt
        .iter()
        .find(|&&y| !ops.src.iter().any(|&x| inst.is_small(y.difference(x).len())))
        .map(|&y| Counterwitness { x: None, y, y_prime: None })
}

fn c_clause(inst: &Instance, ops: &Operands) -> Option<Counterwitness> {
    match (inst.variant, inst.clauses.c_orientation) {
        (Variant::Qt, COrientation::Normative) => ops
            .tgt
            .iter()
            .find(|&&y| !ops.src.iter().any(|&x| y.len() <= inst.bound(x.len())))
            .map(|&y| Counterwitness { x: None, y, y_prime: None }),
        (Variant::Qt, COrientation::Printed) => ops
            .src
            .iter()
            .find(|&&x| !ops.tgt.iter().any(|&y| y.len() <= inst.bound(x.len())))
            .map(|&x| Counterwitness { x: Some(x), y: AtomSet::EMPTY, y_prime: None }),
        (Variant::St, COrientation::Normative) => ops
            .tgt
            .iter()
            .find(|&&y| !ops.src.iter().any(|&x| reachable(inst, &ops.tgt, x, y)))
            .map(|&y| Counterwitness { x: None, y, y_prime: None }),
        (Variant::St, COrientation::Printed) => ops
            .src
            .iter()
            .find(|&&x| !ops.tgt.iter().any(|&y| reachable(inst, &ops.tgt, x, y)))
            .map(|&x| Counterwitness { x: Some(x), y: AtomSet::EMPTY, y_prime: None }),
    }
}

/// Largest `y' ⊆ y∖x` that the (f) clause must absorb.
fn f_extra_size(inst: &Instance, avail: usize) -> usize {
    let mut s = avail;
    while s > 0 && !inst.is_small(s) {
        s -= 1;
    }
    s
}

fn f_clause(inst: &Instance, ops: &Operands) -> Option<Counterwitness> {
    for &x in &ops.src {
        for &y in &ops.tgt {
            let core = match inst.variant {
                Variant::Qt => x,
                Variant::St => x.intersection(y),
            };
            let free = y.difference(x);
            let s = f_extra_size(inst, free.len());
            // only maximal y' matter; y' ∩ x is already inside the core
            for e in free.subsets_of_size(s) {
                if !covered(&ops.src, core.union(e)) {
                    return Some(Counterwitness { x: Some(x), y, y_prime: Some(e) });
                }
            }
        }
    }
    None
}

/// The size bound on `y'` in the (wf) and (w) clauses.
fn weak_bound(inst: &Instance, x: AtomSet, y: AtomSet) -> usize {
    match inst.variant {
        Variant::Qt => inst.bound(x.len()),
        Variant::St => inst.bound(x.intersection(y).len()),
    }
}

/// Checks `∀x∈outer ∀y ∀y'⊆y (|y'| ≤ bound) ∃x'∈inner: ok(y', x')`, where
/// `ok` is monotone decreasing in `y'`, so only subsets of maximal size are tried.
fn weak_family_clause(
    inst: &Instance,
    outer: &[AtomSet],
    inner: &[AtomSet],
    tgt: &[AtomSet],
    ok: impl Fn(AtomSet, AtomSet) -> bool,
) -> Option<Counterwitness> {
    for &y in tgt {
        // larger bounds subsume smaller ones for a fixed y
        let &x = outer.iter().max_by_key(|&&x| (weak_bound(inst, x, y), core::cmp::Reverse(x)))?;
        let size = weak_bound(inst, x, y).min(y.len());
        if inner.iter().any(|&x2| ok(y, x2)) {
            continue;
        }
        for y2 in y.subsets_of_size(size) {
            if !inner.iter().any(|&x2| ok(y2, x2)) {
                return Some(Counterwitness { x: Some(x), y, y_prime: Some(y2) });
            }
        }
    }
    None
}

fn wf_clause(inst: &Instance, ops: &Operands) -> Option<Counterwitness> {
    weak_family_clause(inst, &ops.src, &ops.src, &ops.tgt, |y2, x2| y2.is_subset(x2))
}

fn w_clause(inst: &Instance, ops: &Operands) -> Option<Counterwitness> {
    let src = ops.w_src(inst);
    weak_family_clause(inst, src, src, &ops.tgt, |y2, x2| inst.is_small(y2.difference(x2).len()))
}

fn clause(inst: &Instance, ops: &Operands, l: Label) -> Option<Counterwitness> {
    match l {
        Label::Plain => plain_clause(ops),
        Label::C => c_clause(inst, ops),
        Label::F => f_clause(inst, ops),
        Label::W => w_clause(inst, ops),
        Label::Wc => wc_clause(inst, ops),
        Label::Wf => wf_clause(inst, ops),
    }
}

/// Every label that holds on `X → Y`, without validating the operands.
pub fn label_mask(inst: &Instance, x: &Family, y: &Family) -> LabelSet {
    let ops = Operands::new(inst, x, y);
    if plain_clause(&ops).is_some() {
        return LabelSet::EMPTY;
    }
    let mut set = LabelSet::EMPTY;
    for l in Label::ALL {
        if l == Label::Plain || clause(inst, &ops, l).is_none() {
            set.insert(l);
        }
    }
    set
}

/// Unchecked single-label test.
pub fn label_holds(inst: &Instance, x: &Family, y: &Family, l: Label) -> bool {
    let ops = Operands::new(inst, x, y);
    plain_clause(&ops).is_none() && (l == Label::Plain || clause(inst, &ops, l).is_none())
}

pub fn has_label(inst: &Instance, x: &Family, y: &Family, l: Label) -> Result<bool, Error> {
    inst.validate(x)?;
    inst.validate(y)?;
    Ok(label_holds(inst, x, y, l))
}

/// Reachability of `b` from `a` along members of `family` whose consecutive
/// overlaps keep the `M`-size of the next member.
pub fn chain_reachable(inst: &Instance, family: &Family, a: AtomSet, b: AtomSet) -> Result<bool, Error> {
    if !family.contains(b) {
        return Err(Error::NotAMember(b.to_string()));
    }
    Ok(reachable(inst, family.members(), a, b))
}

fn reachable(inst: &Instance, members: &[AtomSet], a: AtomSet, b: AtomSet) -> bool {
    let step = |from: AtomSet, to: AtomSet| inst.bound(from.intersection(to).len()) == inst.bound(to.len());
    let mut seen: Vec<bool> = members.iter().map(|&m| step(a, m)).collect();
    let mut stack: Vec<usize> = (0..members.len()).filter(|&i| seen[i]).collect();
    while let Some(i) = stack.pop() {
        if members[i] == b {
            return true;
        }
        for j in 0..members.len() {
            if !seen[j] && step(members[i], members[j]) {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    false
}

/// Per-pair target witnesses for an existential clause: which source member serves `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TargetWitness {
    pub y: AtomSet,
    pub x: AtomSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LabelEntry {
    pub label: Label,
    pub holds: bool,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none", default))]
    pub counterwitness: Option<Counterwitness>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Vec::is_empty", default))]
    pub witnesses: Vec<TargetWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LabelReport {
    pub source: Family,
    pub target: Family,
    pub labels: Vec<LabelEntry>,
}

impl LabelReport {
    pub fn holds(&self, l: Label) -> bool {
        self.labels.iter().any(|e| e.label == l && e.holds)
    }

    pub fn mask(&self) -> LabelSet {
        let mut s = LabelSet::EMPTY;
        for e in self.labels.iter().filter(|e| e.holds) {
            s.insert(e.label);
        }
        s
    }
}

/// All six labels with counterwitnesses for the failing ones and, for the
/// existential clauses (wc) and (c), the serving source member of each target.
pub fn label_set(inst: &Instance, x: &Family, y: &Family) -> Result<LabelReport, Error> {
    inst.validate(x)?;
    inst.validate(y)?;
    let ops = Operands::new(inst, x, y);
    let plain_cw = plain_clause(&ops);
    let labels = Label::ALL
        .into_iter()
        .map(|l| {
            let cw = if l == Label::Plain { plain_cw.clone() } else { plain_cw.clone().or_else(|| clause(inst, &ops, l)) };
            let holds = cw.is_none();
            let witnesses = if holds { target_witnesses(inst, &ops, l) } else { Vec::new() };
            LabelEntry { label: l, holds, counterwitness: cw, witnesses }
        })
        .collect();
    Ok(LabelReport { source: x.clone(), target: y.clone(), labels })
}

fn target_witnesses(inst: &Instance, ops: &Operands, l: Label) -> Vec<TargetWitness> {
    let serves = |x: AtomSet, y: AtomSet| match l {
        Label::Plain => false,
        Label::Wc => inst.is_small(y.difference(x).len()),
        Label::C => match inst.variant {
            Variant::Qt => y.len() <= inst.bound(x.len()),
            Variant::St => reachable(inst, &ops.tgt, x, y),
        },
        _ => false,
    };
    if !matches!(l, Label::Wc | Label::C) || inst.clauses.c_orientation == COrientation::Printed && l == Label::C {
        return Vec::new();
    }
    ops.tgt
        .iter()
        .filter_map(|&y| ops.src.iter().find(|&&x| serves(x, y)).map(|&x| TargetWitness { y, x }))
        .collect()
}

/// All-pairs label masks over a fixed pool, so suites evaluate each pair once.
pub struct LabelMatrix {
    n: usize,
    masks: Vec<LabelSet>,
}

impl LabelMatrix {
    pub fn new(inst: &Instance, pool: &[Family]) -> Self {
        let n = pool.len();
        let prepared: Vec<Family> = match inst.mode {
            Mode::QtPlus => pool.iter().map(|f| kappa_union_closure(inst, f)).collect(),
            _ => pool.iter().map(Family::canonicalize).collect(),
        };
        // closures are already taken; evaluate the clauses in the underlying mode
        let mut flat = inst.clone();
        if flat.mode == Mode::QtPlus {
            flat.mode = Mode::Qt;
        }
        let mut masks = Vec::with_capacity(n * n);
        for a in &prepared {
            for b in &prepared {
                if dominates(a.members(), b.members()) {
                    masks.push(label_mask(&flat, a, b));
                } else {
                    masks.push(LabelSet::EMPTY);
                }
            }
        }
        LabelMatrix { n, masks }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> LabelSet {
        self.masks[i * self.n + j]
    }

    #[inline]
    pub fn has(&self, i: usize, j: usize, l: Label) -> bool {
        self.get(i, j).contains(l)
    }
}

/// Outcome of checking the label identities on one pair.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IdentityReport {
    pub wc_iff_c_and_w: bool,
    pub wf_iff_f_and_w: bool,
    pub w_iff_factors: bool,
    /// A middle object `Z` with `X →(wc) Z →(wf) Y`, when one was found.
    pub z_witness: Option<Family>,
    pub violations: Vec<String>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `wc ⇔ c∧w`, `wf ⇔ f∧w` and `w ⇔ ∃Z (X →(wc) Z →(wf) Y)` on one pair.
/// The middle object is sought among the two explicit factorizations first, then the pool.
pub fn check_label_identities(inst: &Instance, x: &Family, y: &Family, pool: &[Family]) -> IdentityReport {
    let m = label_mask(inst, x, y);
    let (c, f, w, wc, wf) = (
        m.contains(Label::C),
        m.contains(Label::F),
        m.contains(Label::W),
        m.contains(Label::Wc),
        m.contains(Label::Wf),
    );
    let mut violations = Vec::new();
    let wc_ok = wc == (c && w);
    if !wc_ok {
        violations.push(alloc::format!("{x} -> {y}: wc={wc} but c={c}, w={w}"));
    }
    let wf_ok = wf == (f && w);
    if !wf_ok {
        violations.push(alloc::format!("{x} -> {y}: wf={wf} but f={f}, w={w}"));
    }
    let z_witness = if m.contains(Label::Plain) { find_wc_wf_middle(inst, x, y, pool) } else { None };
    let w_ok = w == z_witness.is_some();
    if !w_ok {
        violations.push(alloc::format!("{x} -> {y}: w={w} but (wc;wf) middle found={}", z_witness.is_some()));
    }
    IdentityReport { wc_iff_c_and_w: wc_ok, wf_iff_f_and_w: wf_ok, w_iff_factors: w_ok, z_witness, violations }
}

fn find_wc_wf_middle(inst: &Instance, x: &Family, y: &Family, pool: &[Family]) -> Option<Family> {
    let is_middle = |z: &Family| label_holds(inst, x, z, Label::Wc) && label_holds(inst, z, y, Label::Wf);
    let constructed = [
        crate::factor::factor_wc_f(inst, x, y).ok().map(|f| f.middle),
        crate::factor::factor_c_wf(inst, x, y).ok().map(|f| f.middle),
    ];
    constructed.into_iter().flatten().find(|z| is_middle(z)).or_else(|| pool.iter().find(|z| is_middle(z)).cloned())
}
