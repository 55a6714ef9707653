//! Batch property suites: axioms over instance grids, the (M5) counterexample
//! search, measurability degeneracy, the bounded closure check, equivariance
//! and fault injection.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atoms::{AtomSet, Permutation};
use crate::cover::{is_covering_family, CovProblem};
use crate::derived::{derived_cofibrant, Builtin, ExtNat, Search};
use crate::enumerate::Constraints;
use crate::error::Error;
use crate::factor::{check_m0, factor_c_wf, factor_wc_f, is_cute, verify_m2_m4_m5, Axiom};
use crate::family::{apply_permutation, arrow, join_raw, meet, Family};
use crate::homotopy::Reach;
use crate::instance::{Instance, Mode, Mutation, Variant};
use crate::label::{label_holds, label_mask, Label, LabelMatrix};
use crate::lifting::{lifting_holds, verify_m1, ArrowRef};
use crate::pool::{Pool, PoolSpec};

/// Violations kept per check; the counts cover all of them.
pub const MAX_KEPT_VIOLATIONS: usize = 25;

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Violation {
    pub check: String,
    pub objects: Vec<Family>,
    pub detail: String,
    /// Grid point the violation was found at, when run over a grid.
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none", default))]
    pub at: Option<GridPoint>,
}

impl Violation {
    pub fn new(check: &str, objects: impl IntoIterator<Item = Family>, detail: impl Into<String>) -> Self {
        Violation { check: check.to_string(), objects: objects.into_iter().collect(), detail: detail.into(), at: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CheckCount {
    pub check: String,
    pub passed: u64,
    pub failed: u64,
}

/// One instance of a grid, as reported.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridPoint {
    pub universe: usize,
    pub kappa: usize,
    pub variant: Variant,
    pub mode: Mode,
    pub pool: String,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerificationReport {
    pub suite: String,
    pub grid: Vec<GridPoint>,
    pub counts: Vec<CheckCount>,
    pub violations: Vec<Violation>,
    /// Every pool was the whole object class.
    pub exhaustive: bool,
    pub notes: Vec<String>,
    /// Wall-clock time; filled in by callers that can measure it.
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none", default))]
    pub timing_ms: Option<u64>,
}

impl VerificationReport {
    pub fn new(suite: &str) -> Self {
        VerificationReport {
            suite: suite.to_string(),
            grid: Vec::new(),
            counts: Vec::new(),
            violations: Vec::new(),
            exhaustive: true,
            notes: Vec::new(),
            timing_ms: None,
        }
    }

    fn count_mut(&mut self, check: &str) -> &mut CheckCount {
        let i = match self.counts.iter().position(|c| c.check == check) {
            Some(i) => i,
            None => {
                self.counts.push(CheckCount { check: check.to_string(), passed: 0, failed: 0 });
                self.counts.len() - 1
            }
        };
        &mut self.counts[i]
    }

    /// Counts one check; on failure builds and keeps the violation (up to the cap).
    pub fn record(&mut self, check: &str, ok: bool, violation: impl FnOnce() -> Violation) {
        let c = self.count_mut(check);
        if ok {
            c.passed += 1;
            return;
        }
        c.failed += 1;
        let failed = c.failed;
        if failed as usize <= MAX_KEPT_VIOLATIONS {
            self.violations.push(violation());
        }
    }

    pub fn merge(&mut self, other: VerificationReport, at: Option<&GridPoint>) {
        for c in other.counts {
            let mine = self.count_mut(&c.check);
            let kept_before = mine.failed.min(MAX_KEPT_VIOLATIONS as u64);
            mine.passed += c.passed;
            mine.failed += c.failed;
            let room = MAX_KEPT_VIOLATIONS.saturating_sub(kept_before as usize);
            let check = c.check;
            self.violations.extend(
                other
                    .violations
                    .iter()
                    .filter(|v| v.check == check)
                    .take(room)
                    .cloned()
                    .map(|mut v| {
                        if v.at.is_none() {
                            v.at = at.cloned();
                        }
                        v
                    }),
            );
        }
        self.exhaustive &= other.exhaustive;
        self.notes.extend(other.notes);
    }

    pub fn failures(&self) -> u64 {
        self.counts.iter().map(|c| c.failed).sum()
    }

    pub fn failures_of(&self, check: &str) -> u64 {
        self.counts.iter().filter(|c| c.check == check).map(|c| c.failed).sum()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }
}

/// One grid point to run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub universe: usize,
    pub kappa: usize,
    pub variant: Variant,
    pub mode: Mode,
    pub pool: PoolSpec,
    pub mutation: Option<Mutation>,
}

impl GridSpec {
    pub fn instance(&self) -> Result<Instance, Error> {
        let mut inst = Instance::new(self.universe, self.kappa)?.variant(self.variant).mode(self.mode);
        if let Some(m) = self.mutation {
            inst = inst.mutated(m);
        }
        Ok(inst)
    }
}

/// The standard grid: `n ∈ {2,3,4,5}`, `κ ∈ {1,2,3}` with `κ ≤ n`, both variants,
/// exhaustive antichain pools up to four atoms and seeded samples at five.
pub fn standard_grid(mode: Mode) -> Vec<GridSpec> {
    let mut grid = Vec::new();
    for universe in 2..=5 {
        for kappa in 1..=3usize.min(universe) {
            for variant in [Variant::Qt, Variant::St] {
                grid.push(GridSpec { universe, kappa, variant, mode, pool: PoolSpec::default(), mutation: None });
            }
        }
    }
    grid
}

fn grid_point(inst: &Instance, pool: &Pool) -> GridPoint {
    GridPoint {
        universe: inst.universe(),
        kappa: inst.kappa(),
        variant: inst.variant,
        mode: inst.mode,
        pool: pool.description.clone(),
        complete: pool.complete,
    }
}

/// Runs the chosen axioms at every grid point.
pub fn run_axiom_suite(grid: &[GridSpec], axioms: &[Axiom]) -> Result<VerificationReport, Error> {
    let mut report = VerificationReport::new("axioms");
    for spec in grid {
        let inst = spec.instance()?;
        let pool = spec.pool.build(&inst)?;
        let point = grid_point(&inst, &pool);
        let mut local = axiom_report(&inst, &pool.families, axioms);
        local.exhaustive = pool.complete;
        report.merge(local, Some(&point));
        report.grid.push(point);
    }
    Ok(report)
}

fn axiom_report(inst: &Instance, pool: &[Family], axioms: &[Axiom]) -> VerificationReport {
    let mut report = VerificationReport::new("axioms");
    if axioms.contains(&Axiom::M0) {
        check_m0(inst, pool, &mut report);
    }
    if axioms.contains(&Axiom::M1) {
        report.merge(verify_m1(inst, pool), None);
    }
    if axioms.iter().any(|a| matches!(a, Axiom::M2 | Axiom::M4 | Axiom::M5 | Axiom::Closed)) {
        let full = verify_m2_m4_m5(inst, pool);
        let mut kept = VerificationReport::new("axioms");
        for a in axioms {
            kept.counts.extend(full.counts.iter().filter(|c| c.check == a.as_str()).cloned());
            kept.violations.extend(full.violations.iter().filter(|v| v.check == a.as_str()).cloned());
        }
        report.merge(kept, None);
    }
    report
}

/// Label-level properties: every label implies plain, (w) composes, the ⊥-source
/// degeneracies, and the identities `wc ⇔ c∧w`, `wf ⇔ f∧w`, `w ⇔ ∃Z (wc; wf)`.
pub fn label_property_suite(inst: &Instance, pool: &[Family]) -> VerificationReport {
    let mut report = VerificationReport::new("labels");
    let m = LabelMatrix::new(inst, pool);
    let n = pool.len();
    for i in 0..n {
        for j in 0..n {
            let s = m.get(i, j);
            report.record("implies-plain", s.iter().all(|_| s.contains(Label::Plain)), || {
                Violation::new("implies-plain", [pool[i].clone(), pool[j].clone()], "a label holds without an arrow")
            });
            if !s.contains(Label::Plain) {
                continue;
            }
            let w = s.contains(Label::W);
            report.record("identities", s.contains(Label::Wc) == (s.contains(Label::C) && w), || {
                Violation::new("identities", [pool[i].clone(), pool[j].clone()], "wc differs from c and w")
            });
            report.record("identities", s.contains(Label::Wf) == (s.contains(Label::F) && w), || {
                Violation::new("identities", [pool[i].clone(), pool[j].clone()], "wf differs from f and w")
            });
            let factors = (0..n).any(|z| m.has(i, z, Label::Wc) && m.has(z, j, Label::Wf))
                || [factor_wc_f(inst, &pool[i], &pool[j]), factor_c_wf(inst, &pool[i], &pool[j])].into_iter().flatten().any(
                    |f| label_holds(inst, &pool[i], &f.middle, Label::Wc) && label_holds(inst, &f.middle, &pool[j], Label::Wf),
                );
            report.record("identities", w == factors, || {
                Violation::new("identities", [pool[i].clone(), pool[j].clone()], format!("w={w} but (wc; wf) factorization={factors}"))
            });
            for k in 0..n {
                if w && m.has(j, k, Label::W) {
                    report.record("w-composition", m.has(i, k, Label::W), || {
                        Violation::new("w-composition", [pool[i].clone(), pool[j].clone(), pool[k].clone()], "(w) arrows do not compose")
                    });
                }
            }
        }
    }
    let bottom = Family::bottom();
    for y in pool {
        let c_expect = y.iter().all(|m| m.len() <= inst.kappa());
        let wc_expect = y.iter().all(|m| m.len() < inst.kappa());
        let ok = label_holds(inst, &bottom, y, Label::C) == c_expect && label_holds(inst, &bottom, y, Label::Wc) == wc_expect;
        report.record("empty-degeneracy", ok, || {
            Violation::new("empty-degeneracy", [bottom.clone(), y.clone()], "⊥ -> Y labels disagree with the member sizes")
        });
    }
    report
}

/// One fault-injection outcome: the checks that pass normatively but fail under the mutation.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MutationDetection {
    pub mutation: Mutation,
    pub detected: bool,
    pub detected_by: Vec<String>,
}

/// Runs the axiom and label suites with and without each mutation; a mutation is
/// detected when some check is clean on the normative run and fails on the mutated one.
pub fn detect_mutations(grid: &[GridSpec]) -> Result<Vec<MutationDetection>, Error> {
    let run = |mutation: Option<Mutation>| -> Result<BTreeMap<String, u64>, Error> {
        let mut failures = BTreeMap::new();
        for spec in grid {
            let mut spec = spec.clone();
            spec.mutation = mutation;
            let inst = spec.instance()?;
            let pool = spec.pool.build(&inst)?;
            let mut r = axiom_report(&inst, &pool.families, &Axiom::ALL);
            r.merge(label_property_suite(&inst, &pool.families), None);
            for c in r.counts {
                let key = format!("{} @ n={} k={} {}", c.check, inst.universe(), inst.kappa(), inst.variant.as_str());
                *failures.entry(key).or_insert(0) += c.failed;
            }
        }
        Ok(failures)
    };
    let baseline = run(None)?;
    let mut out = Vec::new();
    for m in Mutation::ALL {
        let mutated = run(Some(m))?;
        let detected_by: Vec<String> = mutated
            .iter()
            .filter(|(k, &v)| v > 0 && baseline.get(*k).copied().unwrap_or(0) == 0)
            .map(|(k, _)| k.clone())
            .collect();
        out.push(MutationDetection { mutation: m, detected: !detected_by.is_empty(), detected_by });
    }
    Ok(out)
}

/// A triangle `X → Y → Z` (with `X → Z`) on which two-out-of-three fails.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Triangle {
    pub x: Family,
    pub y: Family,
    pub z: Family,
    pub w_xy: bool,
    pub w_yz: bool,
    pub w_xz: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct M5Search {
    pub triangle: Option<Triangle>,
    /// The search space was covered before the budget ran out.
    pub exhaustive: bool,
    pub examined: u64,
}

fn two_of_three_fails(inst: &Instance, x: &Family, y: &Family, z: &Family) -> Option<Triangle> {
    if !(arrow(inst, x, y) && arrow(inst, y, z)) {
        return None;
    }
    let w_xy = label_holds(inst, x, y, Label::W);
    let w_yz = label_holds(inst, y, z, Label::W);
    let w_xz = label_holds(inst, x, z, Label::W);
    (w_xy as u8 + w_yz as u8 + w_xz as u8 == 2).then(|| Triangle {
        x: x.clone(),
        y: y.clone(),
        z: z.clone(),
        w_xy,
        w_yz,
        w_xz,
    })
}

/// Pattern-guided, then general, search for an (M5) failure among families.
///
/// The pattern is `[A]^{≤κ} → [A]^{≤κ} ∪ {B} → {A ∪ B}` over all `A` and `B`;
/// the general phase scans triangles of antichains, or of a seeded sample when
/// the antichains are too many to enumerate.
pub fn find_m5_counterexample_st(inst: &Instance, budget: u64) -> Result<M5Search, Error> {
    if inst.mode != Mode::St {
        return Err(Error::WrongMode { expected: "st" });
    }
    let mut examined = 0u64;
    let out_of_budget = |examined| M5Search { triangle: None, exhaustive: false, examined };
    let full = inst.full_set();
    for a in full.subsets() {
        let small = Family::from_sets(a.subsets().filter(|s| s.len() <= inst.kappa())).canonicalize();
        for b in full.subsets().filter(|b| !b.is_subset(a)) {
            if examined >= budget {
                return Ok(out_of_budget(examined));
            }
            examined += 1;
            let mid = Family::from_sets(small.members().iter().copied().chain([b])).canonicalize();
            if let Some(t) = two_of_three_fails(inst, &small, &mid, &Family::from_sets([a.union(b)])) {
                return Ok(M5Search { triangle: Some(t), exhaustive: false, examined });
            }
        }
    }
    let pool = match Pool::exhaustive(inst, &Constraints::antichains().cap(200_000)) {
        Ok(pool) => pool,
        Err(Error::PoolCapExceeded { .. }) => Pool::sampled(inst, crate::pool::DEFAULT_SAMPLE_SIZE, 0),
        Err(e) => return Err(e),
    };
    let m = LabelMatrix::new(inst, &pool.families);
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
                if examined >= budget {
                    return Ok(out_of_budget(examined));
                }
                examined += 1;
                let (a, b, c) = (m.has(i, j, Label::W), m.has(j, k, Label::W), m.has(i, k, Label::W));
                if a as u8 + b as u8 + c as u8 == 2 {
                    let (x, y, z) = (&pool.families[i], &pool.families[j], &pool.families[k]);
                    return Ok(M5Search {
                        triangle: Some(Triangle { x: x.clone(), y: y.clone(), z: z.clone(), w_xy: a, w_yz: b, w_xz: c }),
                        exhaustive: false,
                        examined,
                    });
                }
            }
        }
    }
    Ok(M5Search { triangle: None, exhaustive: pool.complete, examined })
}

/// Zigzag reachability over a pool using precomputed labels.
fn matrix_reach(m: &LabelMatrix, from: usize) -> Vec<bool> {
    let n = m.len();
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for (v, s) in seen.iter_mut().enumerate() {
            if !*s && (m.has(u, v, Label::Plain) || m.has(v, u, Label::W)) {
                *s = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// The finite measurability conditions: (2) indecomposable arrows into TOP are
/// (w); (3) indecomposable arrows into cofibrant targets are (wc); (4) an
/// indecomposable `X → Y` is reversed in the homotopy category.
pub fn check_measurable_equivalences(inst: &Instance, pool: &Pool) -> VerificationReport {
    let mut report = VerificationReport::new("measurable");
    report.exhaustive = pool.complete;
    let mut fams = pool.families.clone();
    let top = inst.top();
    if !fams.contains(&top) {
        fams.push(top.clone());
        fams.sort_unstable();
    }
    let m = LabelMatrix::new(inst, &fams);
    let n = fams.len();
    let t = fams.binary_search(&top).unwrap();
    let iso = |a: usize, b: usize| m.has(a, b, Label::Plain) && m.has(b, a, Label::Plain);
    let indecomposable = |i: usize, j: usize| {
        m.has(i, j, Label::Plain)
            && !(0..n).any(|k| m.has(i, k, Label::Plain) && m.has(k, j, Label::Plain) && !iso(k, i) && !iso(k, j))
    };
    let bottom = Family::bottom();
    let cofibrant: Vec<bool> = fams.iter().map(|y| label_holds(inst, &bottom, y, Label::C)).collect();
    let mut reach_cache: BTreeMap<usize, Vec<bool>> = BTreeMap::new();
    let mut eq_pattern = [0u64; 2];
    for i in 0..n {
        for j in 0..n {
            if !indecomposable(i, j) {
                continue;
            }
            if j == t {
                let ok = m.has(i, t, Label::W);
                report.record("condition-2", ok, || {
                    Violation::new("condition-2", [fams[i].clone(), top.clone()], "indecomposable arrow into TOP is not (w)")
                });
            }
            if cofibrant[j] {
                let ok = m.has(i, j, Label::Wc);
                report.record("condition-3", ok, || {
                    Violation::new("condition-3", [fams[i].clone(), fams[j].clone()], "indecomposable arrow into a cofibrant object is not (wc)")
                });
                eq_pattern[ok as usize] += 1;
            }
            let back = reach_cache.entry(j).or_insert_with(|| matrix_reach(&m, j))[i];
            report.record("condition-4", back, || {
                Violation::new("condition-4", [fams[i].clone(), fams[j].clone()], "indecomposable arrow is not reversed up to homotopy")
            });
        }
    }
    let c2 = report.failures_of("condition-2") == 0;
    let c3 = report.failures_of("condition-3") == 0;
    report.record("equivalence-2-3", c2 == c3, || {
        Violation::new("equivalence-2-3", [], format!("condition 2 holds={c2} but condition 3 holds={c3}"))
    });
    report.notes.push(format!("{} indecomposable arrows into cofibrant targets checked", eq_pattern[0] + eq_pattern[1]));
    report
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Claim2Outcome {
    /// Every `L` of size ≤ κ lies, up to fewer than κ atoms, in a member of `Y`.
    pub hypothesis: bool,
    /// The least `B` (by size, then bitmask) making every such `L` lie in some `y ∪ B`.
    pub minimal_b: Option<AtomSet>,
    /// An `L` left uncovered by every admissible `B`, when none works.
    pub counterexample: Option<AtomSet>,
    pub report: VerificationReport,
}

/// The closure analog: under the hypothesis, some `B` with `|B| < κ` (and
/// `|B| ≤ bound`) absorbs the missing atoms for every small `L` at once.
pub fn check_claim2_closure(inst: &Instance, y: &Family, bound: usize) -> Result<Claim2Outcome, Error> {
    inst.validate(y)?;
    let mut report = VerificationReport::new("claim2");
    let full = inst.full_set();
    let ls: Vec<AtomSet> = full.subsets().filter(|l| l.len() <= inst.kappa()).collect();
    let hypothesis = ls.iter().all(|&l| y.iter().any(|&t| inst.is_small(l.difference(t).len())));
    if !hypothesis {
        report.notes.push(String::from("hypothesis fails; the claim holds vacuously"));
        report.record("claim2", true, || unreachable!());
        return Ok(Claim2Outcome { hypothesis, minimal_b: None, counterexample: None, report });
    }
    let max_b = bound.min(inst.kappa() - 1);
    let mut bs: Vec<AtomSet> = full.subsets().filter(|b| b.len() <= max_b).collect();
    bs.sort_unstable_by_key(|b| (b.len(), *b));
    let absorbs = |b: AtomSet| ls.iter().find(|&&l| !y.iter().any(|&t| l.is_subset(t.union(b)))).copied();
    let mut first_gap = None;
    for &b in &bs {
        match absorbs(b) {
            None => {
                report.record("claim2", true, || unreachable!());
                report.notes.push(format!("minimal B = {b}"));
                return Ok(Claim2Outcome { hypothesis, minimal_b: Some(b), counterexample: None, report });
            }
            Some(l) if first_gap.is_none() => first_gap = Some(l),
            _ => {}
        }
    }
    report.record("claim2", false, || {
        Violation::new("claim2", [y.clone()], format!("no B of size <= {max_b} absorbs L = {}", first_gap.unwrap_or_default()))
    });
    Ok(Claim2Outcome { hypothesis, minimal_b: None, counterexample: first_gap, report })
}

/// A decider under test: a name and a function of an instance and two families.
pub type Decider<'a> = (&'a str, &'a dyn Fn(&Instance, &Family, &Family) -> u64);

fn random_family(inst: &Instance, rng: &mut ChaCha8Rng) -> Family {
    let k = rng.random_range(0..=inst.universe().min(4));
    let full = inst.full_set().bits();
    Family::from_sets((0..k).map(|_| AtomSet::from_bits(rng.random::<u32>() & full))).canonicalize()
}

fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Permutation {
    let mut images: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        images.swap(i, j);
    }
    Permutation::from_images(images).expect("shuffle is a bijection")
}

/// Builtin deciders compared before and after permuting the atoms.
fn builtin_values(inst: &Instance, x: &Family, y: &Family) -> Vec<(&'static str, u64)> {
    let mut out = Vec::new();
    let mask = label_mask(inst, x, y);
    out.push(("labels", Label::ALL.iter().fold(0u64, |acc, &l| acc << 1 | mask.contains(l) as u64)));
    let lo = meet(x, y);
    let hi = join_raw(x, y);
    let f = ArrowRef { source: lo.clone(), target: x.clone() };
    let g = ArrowRef { source: y.clone(), target: hi.clone() };
    out.push(("lifting", lifting_holds(inst, &f, &g) as u64 | (lifting_holds(inst, &g, &f) as u64) << 1));
    let local = [x.clone(), y.clone(), lo.clone()];
    out.push(("cuteness", is_cute(inst, x, &local) as u64));
    let mut vertices: Vec<Family> = vec![x.clone(), y.clone(), lo, hi, inst.top()];
    for (a, b) in [(&Family::bottom(), x), (&Family::bottom(), y), (x, y)] {
        vertices.extend(factor_c_wf(inst, a, b).ok().map(|f| f.middle));
        vertices.extend(factor_wc_f(inst, a, b).ok().map(|f| f.middle));
    }
    let verdict = Reach::new(inst, x, &vertices, 4, false).outcome(inst, y).verdict();
    out.push(("ho-reaches", verdict as u64));
    let d = derived_cofibrant(inst, &Builtin::Card, x, Search { pool: &vertices, depth: 4, complete: false });
    out.push(("derived", match d.value {
        None => u64::MAX,
        Some(ExtNat::Infinite) => u64::MAX - 1,
        Some(ExtNat::Finite(v)) => v,
    }));
    let k = inst.kappa();
    if let Ok(p) = CovProblem::new(inst.universe(), k + 1, k + 1, 2) {
        let small = Family::from_sets(x.iter().flat_map(|m| m.subsets_of_size(k.min(m.len()))));
        out.push(("cov", is_covering_family(&p, &small).map_or(2, |b| b as u64)));
    }
    out
}

/// Seeded random trials plus exhaustive checks at three atoms: every decider gives
/// the same answer on `(X, Y)` and on `(p·X, p·Y)`.
pub fn equivariance_suite(grid: &[GridSpec], trials: usize, seed: u64) -> Result<VerificationReport, Error> {
    equivariance_suite_with(grid, trials, seed, &[])
}

pub fn equivariance_suite_with(
    grid: &[GridSpec],
    trials: usize,
    seed: u64,
    extra: &[Decider<'_>],
) -> Result<VerificationReport, Error> {
    let mut report = VerificationReport::new("equivariance");
    for (gi, spec) in grid.iter().enumerate() {
        let inst = spec.instance()?;
        let mut local = VerificationReport::new("equivariance");
        let check = |x: &Family, y: &Family, p: &Permutation, local: &mut VerificationReport| {
            let (px, py) = (apply_permutation(x, p), apply_permutation(y, p));
            let before = builtin_values(&inst, x, y);
            let after = builtin_values(&inst, &px, &py);
            for ((name, a), (_, b)) in before.iter().zip(after.iter()) {
                local.record(name, a == b, || {
                    Violation::new(name, [x.clone(), y.clone(), px.clone(), py.clone()], format!("{a} != {b} under {:?}", p.images().collect::<Vec<_>>()))
                });
            }
            for (name, f) in extra {
                let (a, b) = (f(&inst, x, y), f(&inst, &px, &py));
                local.record(name, a == b, || {
                    Violation::new(name, [x.clone(), y.clone(), px.clone(), py.clone()], format!("{a} != {b}"))
                });
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (gi as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        for _ in 0..trials {
            let x = random_family(&inst, &mut rng);
            let y = random_family(&inst, &mut rng);
            let p = random_permutation(inst.universe(), &mut rng);
            check(&x, &y, &p, &mut local);
        }
        if inst.universe() == 3 {
            let pool = Pool::exhaustive(&inst.clone().mode(Mode::St), &Constraints::antichains())?;
            let perms = Permutation::all(3);
            for x in &pool.families {
                for y in &pool.families {
                    for p in &perms {
                        check(x, y, p, &mut local);
                    }
                }
            }
        }
        let point = GridPoint {
            universe: inst.universe(),
            kappa: inst.kappa(),
            variant: inst.variant,
            mode: inst.mode,
            pool: format!("{trials} seeded trials{}", if inst.universe() == 3 { " + exhaustive pairs" } else { "" }),
            complete: false,
        };
        local.exhaustive = false;
        report.merge(local, Some(&point));
        report.grid.push(point);
    }
    report.exhaustive = false;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(lists: &[&[usize]]) -> Family {
        Family::from_lists(lists).unwrap()
    }

    #[test]
    fn record_caps_kept_violations() {
        let mut r = VerificationReport::new("t");
        for _ in 0..(MAX_KEPT_VIOLATIONS + 5) {
            r.record("x", false, || Violation::new("x", [], "bad"));
        }
        r.record("x", true, || unreachable!());
        assert_eq!(r.failures(), (MAX_KEPT_VIOLATIONS + 5) as u64);
        assert_eq!(r.violations.len(), MAX_KEPT_VIOLATIONS);
        assert_eq!(r.counts[0].passed, 1);
    }

    #[test]
    fn m5_search_budget_zero() {
        let inst = Instance::new(2, 1).unwrap().mode(Mode::St);
        let r = find_m5_counterexample_st(&inst, 0).unwrap();
        assert!(r.triangle.is_none() && !r.exhaustive);
        assert!(find_m5_counterexample_st(&inst.mode(Mode::Qt), 10).is_err());
    }

    #[test]
    fn claim2_examples() {
        let inst = Instance::new(4, 2).unwrap();
        let pairs = Family::from_sets(inst.full_set().subsets_of_size(2));
        let r = check_claim2_closure(&inst, &pairs, 1).unwrap();
        assert!(r.hypothesis);
        assert_eq!(r.minimal_b, Some(AtomSet::EMPTY));
        let r = check_claim2_closure(&inst, &fam(&[&[0]]), 1).unwrap();
        assert!(!r.hypothesis && r.report.passed());
    }

    #[test]
    fn planted_asymmetry_is_caught() {
        let grid = [GridSpec { universe: 3, kappa: 1, variant: Variant::Qt, mode: Mode::Qt, pool: PoolSpec::default(), mutation: None }];
        let lopsided = |_: &Instance, x: &Family, _: &Family| x.support().contains(0) as u64;
        let r = equivariance_suite_with(&grid, 50, 1, &[("lopsided", &lopsided)]).unwrap();
        assert!(r.failures_of("lopsided") > 0);
        assert_eq!(r.failures_of("labels"), 0);
    }
}
