//! Lifting properties between arrows, singleton generators, and the labels
//! they generate.
//!
//! In a posetal category every square commutes, so `f ⧄ g` only asks whether
//! a diagonal `f.target → g.source` exists whenever the square does.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::atoms::AtomSet;
use crate::error::Error;
use crate::family::{arrow, Family};
use crate::instance::Instance;
use crate::label::{Label, LabelMatrix, LabelSet};
use crate::verify::{VerificationReport, Violation};

/// An arrow `source → target`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ArrowRef {
    pub source: Family,
    pub target: Family,
}

impl ArrowRef {
    pub fn new(inst: &Instance, source: Family, target: Family) -> Result<Self, Error> {
        inst.validate(&source)?;
        inst.validate(&target)?;
        if !arrow(inst, &source, &target) {
            return Err(Error::NoArrow);
        }
        Ok(ArrowRef { source, target })
    }
}

/// `f ⧄ g`.
pub fn lifting_holds(inst: &Instance, f: &ArrowRef, g: &ArrowRef) -> bool {
    let square = arrow(inst, &f.source, &g.source) && arrow(inst, &f.target, &g.target);
    !square || arrow(inst, &f.target, &g.source)
}

/// `f ⧄ g` for arrows given as pool indices.
pub fn lifting_holds_idx(m: &LabelMatrix, f: (usize, usize), g: (usize, usize)) -> bool {
    let square = m.has(f.0, g.0, Label::Plain) && m.has(f.1, g.1, Label::Plain);
    !square || m.has(f.1, g.0, Label::Plain)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum GeneratorKind {
    /// `A ⊆ B` with `M(|A|) = M(|B|)`.
    #[cfg_attr(feature = "serde", serde(rename = "c0"))]
    C0,
    /// `A ⊆ B` with `B ∖ A` small.
    #[cfg_attr(feature = "serde", serde(rename = "wc0"))]
    Wc0,
}

impl GeneratorKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "c0" => Some(GeneratorKind::C0),
            "wc0" => Some(GeneratorKind::Wc0),
            _ => None,
        }
    }
}

/// Which side of `⧄` the tested arrow stands on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Side {
    /// Every generator lifts against the arrow.
    Left,
    /// The arrow lifts against every generator.
    Right,
}

/// A singleton arrow `{A} → {B}` between sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeneratorArrow {
    pub kind: GeneratorKind,
    pub a: AtomSet,
    pub b: AtomSet,
}

impl GeneratorArrow {
    pub fn is_valid(&self, inst: &Instance) -> bool {
        self.a.is_subset(self.b)
            && match self.kind {
                GeneratorKind::C0 => inst.bound(self.a.len()) == inst.bound(self.b.len()),
                GeneratorKind::Wc0 => inst.is_small(self.b.difference(self.a).len()),
            }
    }

    pub fn as_arrow(&self) -> ArrowRef {
        ArrowRef { source: Family::from_sets([self.a]), target: Family::from_sets([self.b]) }
    }
}

/// All generators of `kind` with `|B| ≤ bound`, ordered by `(B, A)` bitmask.
pub fn generators(inst: &Instance, kind: GeneratorKind, bound: usize) -> Vec<GeneratorArrow> {
    let mut out = Vec::new();
    for b in inst.full_set().subsets().filter(|b| b.len() <= bound) {
        for a in b.subsets() {
            let g = GeneratorArrow { kind, a, b };
            if g.is_valid(inst) {
                out.push(g);
            }
        }
    }
    out.sort_unstable_by_key(|g| (g.b, g.a));
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeneratorLiftReport {
    pub holds: bool,
    /// The first generator whose square has no diagonal.
    pub failing: Option<GeneratorArrow>,
    pub bound: usize,
    /// The requested bound exceeded the universe and was lowered to it.
    pub clamped: bool,
}

pub fn lifts_against_generators(
    inst: &Instance,
    f: &ArrowRef,
    kind: GeneratorKind,
    side: Side,
    bound: usize,
) -> GeneratorLiftReport {
    let clamped = bound > inst.universe();
    let bound = bound.min(inst.universe());
    let failing = generators(inst, kind, bound).into_iter().find(|g| {
        let ga = g.as_arrow();
        match side {
            Side::Left => !lifting_holds(inst, &ga, f),
            Side::Right => !lifting_holds(inst, f, &ga),
        }
    });
    GeneratorLiftReport { holds: failing.is_none(), failing, bound, clamped }
}

/// Row and column bitsets of the label relations over a pool, for fast
/// "is there a square without a diagonal" queries.
pub struct LiftingIndex {
    n: usize,
    words: usize,
    /// `rows[l][i]`: bitset of `j` with `i →(l) j`.
    rows: Vec<Vec<Vec<u64>>>,
    /// `cols[l][j]`: bitset of `i` with `i →(l) j`.
    cols: Vec<Vec<Vec<u64>>>,
}

impl LiftingIndex {
    pub fn new(m: &LabelMatrix) -> Self {
        let n = m.len();
        let words = n.div_ceil(64).max(1);
        let mut rows = vec![vec![vec![0u64; words]; n]; Label::ALL.len()];
        let mut cols = rows.clone();
        for i in 0..n {
            for j in 0..n {
                let set = m.get(i, j);
                for l in set.iter() {
                    rows[l as usize][i][j / 64] |= 1 << (j % 64);
                    cols[l as usize][j][i / 64] |= 1 << (i % 64);
                }
            }
        }
        LiftingIndex { n, words, rows, cols }
    }

    #[inline]
    fn has(&self, l: Label, i: usize, j: usize) -> bool {
        self.rows[l as usize][i][j / 64] & (1 << (j % 64)) != 0
    }

    fn first_common(&self, a: &[u64], b: &[u64]) -> Option<usize> {
        (0..self.words).find_map(|w| {
            let x = a[w] & b[w];
            (x != 0).then(|| w * 64 + x.trailing_zeros() as usize)
        })
    }

    /// An `l`-labelled arrow `k → m` against which `i → j` has no left lift.
    pub fn left_failure(&self, (i, j): (usize, usize), l: Label) -> Option<(usize, usize)> {
        for k in 0..self.n {
            if self.has(Label::Plain, i, k) && !self.has(Label::Plain, j, k) {
                let hit = self.first_common(&self.rows[Label::Plain as usize][j], &self.rows[l as usize][k]);
                if let Some(m) = hit {
                    return Some((k, m));
                }
            }
        }
        None
    }

    /// An `l`-labelled arrow `i → j` that has no lift against `k → m`.
    pub fn right_failure(&self, (k, m): (usize, usize), l: Label) -> Option<(usize, usize)> {
        for j in 0..self.n {
            if self.has(Label::Plain, j, m) && !self.has(Label::Plain, j, k) {
                let hit = self.first_common(&self.cols[l as usize][j], &self.cols[Label::Plain as usize][k]);
                if let Some(i) = hit {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// `(wc) ⧄ (f)` and `(c) ⧄ (wf)` over all pairs of labelled arrows in the pool.
pub fn verify_m1(inst: &Instance, pool: &[Family]) -> VerificationReport {
    let m = LabelMatrix::new(inst, pool);
    let idx = LiftingIndex::new(&m);
    let mut report = VerificationReport::new("m1");
    let n = pool.len();
    for i in 0..n {
        for j in 0..n {
            for (left, right) in [(Label::Wc, Label::F), (Label::C, Label::Wf)] {
                if !m.has(i, j, left) {
                    continue;
                }
                let fail = idx.left_failure((i, j), right);
                report.record("m1", fail.is_none(), || {
                    let (k, l) = fail.unwrap();
                    Violation::new(
                        "m1",
                        [pool[i].clone(), pool[j].clone(), pool[k].clone(), pool[l].clone()],
                        format!("({left}) arrow does not lift against ({right}) arrow"),
                    )
                });
            }
        }
    }
    report
}

/// Labels generated from the singleton generators: (f) and (wf) by generator
/// lifting, (c) and (wc) by lifting against the generated (wf) and (f) arrows of
/// the pool, (w) by a (wc; wf) factorization through the pool.
pub struct GeneratedLabels {
    n: usize,
    masks: Vec<LabelSet>,
}

impl GeneratedLabels {
    pub fn new(inst: &Instance, pool: &[Family]) -> Self {
        let n = pool.len();
        let wc0 = generators(inst, GeneratorKind::Wc0, inst.universe());
        let c0 = generators(inst, GeneratorKind::C0, inst.universe());
        let mut masks = vec![LabelSet::EMPTY; n * n];
        for i in 0..n {
            for j in 0..n {
                if !arrow(inst, &pool[i], &pool[j]) {
                    continue;
                }
                let f = ArrowRef { source: pool[i].clone(), target: pool[j].clone() };
                let mut s = LabelSet::EMPTY;
                s.insert(Label::Plain);
                if wc0.iter().all(|g| lifting_holds(inst, &g.as_arrow(), &f)) {
                    s.insert(Label::F);
                }
                if c0.iter().all(|g| lifting_holds(inst, &g.as_arrow(), &f)) {
                    s.insert(Label::Wf);
                }
                masks[i * n + j] = s;
            }
        }
        let has = |masks: &[LabelSet], i: usize, j: usize, l: Label| masks[i * n + j].contains(l);
        let plain = |i: usize, j: usize| has(&masks, i, j, Label::Plain);
        let mut out = masks.clone();
        for i in 0..n {
            for j in 0..n {
                if !plain(i, j) {
                    continue;
                }
                // a square i→k, j→l against a labelled k→l with no diagonal j→k
                let lifts_against = |l: Label| {
                    (0..n).all(|k| {
                        !plain(i, k) || plain(j, k) || (0..n).all(|t| !(plain(j, t) && has(&masks, k, t, l)))
                    })
                };
                if lifts_against(Label::Wf) {
                    out[i * n + j].insert(Label::C);
                }
                if lifts_against(Label::F) {
                    out[i * n + j].insert(Label::Wc);
                }
            }
        }
        let snapshot = out.clone();
        for i in 0..n {
            for j in 0..n {
                if snapshot[i * n + j].contains(Label::Plain)
                    && (0..n).any(|z| has(&snapshot, i, z, Label::Wc) && has(&snapshot, z, j, Label::Wf))
                {
                    out[i * n + j].insert(Label::W);
                }
            }
        }
        GeneratedLabels { n, masks: out }
    }

    pub fn get(&self, i: usize, j: usize) -> LabelSet {
        self.masks[i * self.n + j]
    }
}

/// A pair on which the clause decider and the generated label disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LabelDisagreement {
    pub source: Family,
    pub target: Family,
    pub label: Label,
    pub by_clause: bool,
    pub by_generators: bool,
}

/// Compares clause-decided and generator-generated labels over the pool.
pub fn generated_label_disagreements(inst: &Instance, pool: &[Family]) -> Vec<LabelDisagreement> {
    let m = LabelMatrix::new(inst, pool);
    let g = GeneratedLabels::new(inst, pool);
    let mut out = Vec::new();
    for i in 0..pool.len() {
        for j in 0..pool.len() {
            let (a, b) = (m.get(i, j), g.get(i, j));
            for l in Label::ALL {
                if a.contains(l) != b.contains(l) {
                    out.push(LabelDisagreement {
                        source: pool[i].clone(),
                        target: pool[j].clone(),
                        label: l,
                        by_clause: a.contains(l),
                        by_generators: b.contains(l),
                    });
                }
            }
        }
    }
    out
}
