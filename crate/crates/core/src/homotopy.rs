//! Zigzag reachability in the homotopy category, indecomposable arrows, and
//! posetal limits.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::atoms::AtomSet;
use crate::enumerate::{antichains_within, DEFAULT_POOL_CAP};
use crate::error::Error;
use crate::factor::{factor_c_wf, factor_wc_f, pushout_object};
use crate::family::{arrow, dominates, isomorphic, kappa_union_closure, meet, Family};
use crate::instance::{Instance, Mode};
use crate::label::{label_holds, Label};
use crate::pool::is_object;

/// Default zigzag length bound (two hops of forward and backward steps).
pub const DEFAULT_DEPTH: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Direction {
    /// `prev → object`.
    Forward,
    /// `prev ←(w) object`.
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ZigzagStep {
    pub direction: Direction,
    pub object: Family,
}

/// `X = V₀, V₁, …, Vₖ = Y` with each consecutive pair joined by a plain arrow
/// forwards or a (w)-arrow backwards.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ZigzagCertificate {
    pub start: Family,
    pub steps: Vec<ZigzagStep>,
}

impl ZigzagCertificate {
    pub fn identity(x: Family) -> Self {
        ZigzagCertificate { start: x, steps: Vec::new() }
    }

    pub fn end(&self) -> &Family {
        self.steps.last().map_or(&self.start, |s| &s.object)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Re-checks every step with the arrow and label deciders, and the co-slice
    /// condition on every vertex when the instance has a base.
    pub fn replay(&self, inst: &Instance) -> bool {
        let base_ok = |v: &Family| inst.base_family().is_none_or(|b| arrow(inst, b, v));
        let mut prev = &self.start;
        if !base_ok(prev) {
            return false;
        }
        for s in &self.steps {
            let ok = match s.direction {
                Direction::Forward => arrow(inst, prev, &s.object),
                Direction::Backward => label_holds(inst, &s.object, prev, Label::W),
            };
            if !ok || !base_ok(&s.object) {
                return false;
            }
            prev = &s.object;
        }
        true
    }

    /// `self` followed by `other`, when `other` starts where `self` ends.
    pub fn concat(&self, other: &ZigzagCertificate) -> Option<ZigzagCertificate> {
        if self.end() != &other.start {
            return None;
        }
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        Some(ZigzagCertificate { start: self.start.clone(), steps })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "outcome", rename_all = "lowercase"))]
pub enum HoOutcome {
    Yes { certificate: ZigzagCertificate },
    No { reason: String },
    Unknown { reason: String },
}

impl HoOutcome {
    pub fn is_yes(&self) -> bool {
        matches!(self, HoOutcome::Yes { .. })
    }

    pub fn is_no(&self) -> bool {
        matches!(self, HoOutcome::No { .. })
    }

    pub fn verdict(&self) -> Verdict {
        match self {
            HoOutcome::Yes { .. } => Verdict::Yes,
            HoOutcome::No { .. } => Verdict::No,
            HoOutcome::Unknown { .. } => Verdict::Unknown,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

/// Every `L` with `|L| ≤ κ` and `{L} → X` lies, up to fewer than κ atoms, in a member of `Y`.
pub fn claim1_necessary(inst: &Instance, x: &Family, y: &Family) -> bool {
    claim1_counterexample(inst, x, y, true).is_none()
}

fn claim1_counterexample(inst: &Instance, x: &Family, y: &Family, with_empty: bool) -> Option<AtomSet> {
    let kappa = inst.kappa();
    let mut seen: Vec<AtomSet> = Vec::new();
    for &m in x.canonicalize().members() {
        for l in m.subsets().filter(|l| l.len() <= kappa) {
            if (!with_empty && l.is_empty()) || seen.contains(&l) {
                continue;
            }
            seen.push(l);
            if !y.iter().any(|&t| inst.is_small(l.difference(t).len())) {
                return Some(l);
            }
        }
    }
    None
}

/// The sound refutation: at κ = 1 in St and Qt modes, every nonempty `L ≤ 1`
/// under the source must survive each zigzag step.
fn refutation(inst: &Instance, x: &Family, y: &Family) -> Option<String> {
    if inst.kappa() != 1 || inst.mode == Mode::QtPlus {
        return None;
    }
    claim1_counterexample(inst, x, y, false)
        .map(|l| format!("necessary condition fails: {{{l}}} -> X but {l} lies in no member of Y"))
}

/// The default search space: antichains over the atoms of `X` and `Y`, the
/// constructions of the factorization module, and `pool`.
pub fn default_vertices(inst: &Instance, x: &Family, y: &Family, pool: &[Family]) -> (Vec<Family>, bool) {
    let support = x.support().union(y.support());
    let mut v: Vec<Family> = pool.to_vec();
    let local = antichains_within(support, DEFAULT_POOL_CAP.min(200_000));
    let local_ok = local.is_ok();
    if let Ok(local) = local {
        v.extend(local);
    }
    let base = inst.base_or_bottom();
    let mut extras = vec![x.canonicalize(), y.canonicalize(), meet(x, y), inst.top()];
    for (a, b) in [(&base, x), (&base, y), (x, y)] {
        if let Ok(f) = factor_c_wf(inst, a, b) {
            extras.push(f.middle);
        }
        if let Ok(f) = factor_wc_f(inst, a, b) {
            extras.push(f.middle);
        }
    }
    v.extend(extras);
    (v, local_ok)
}

/// Breadth-first zigzag search from one source over a fixed vertex set.
pub struct Reach {
    vertices: Vec<Family>,
    parent: Vec<Option<(usize, Direction)>>,
    reached: Vec<bool>,
    /// The frontier emptied before the depth bound.
    saturated: bool,
    /// The vertex set contains the whole object class of the co-slice.
    complete: bool,
    source: usize,
}

impl Reach {
    /// `vertices` are canonicalized, filtered to objects of the (co-slice) mode
    /// and sorted; `complete` asserts they exhaust that class.
    pub fn new(inst: &Instance, x: &Family, vertices: &[Family], depth: usize, complete: bool) -> Self {
        let mut vs: Vec<Family> = vertices
            .iter()
            .map(Family::canonicalize)
            .filter(|v| is_object(inst, v) && inst.base_family().is_none_or(|b| arrow(inst, b, v)))
            .collect();
        let xc = x.canonicalize();
        vs.push(xc.clone());
        vs.sort_unstable();
        vs.dedup();
        let source = vs.binary_search(&xc).expect("source inserted above");
        let prepared: Vec<Family> = match inst.mode {
            Mode::QtPlus => vs.iter().map(|v| kappa_union_closure(inst, v)).collect(),
            _ => vs.clone(),
        };
        let mut flat = inst.clone();
        if flat.mode == Mode::QtPlus {
            flat.mode = Mode::Qt;
        }
        let n = vs.len();
        let mut parent = vec![None; n];
        let mut reached = vec![false; n];
        reached[source] = true;
        let mut frontier = VecDeque::from([(source, 0usize)]);
        let mut saturated = true;
        while let Some((u, d)) = frontier.pop_front() {
            if d == depth {
                saturated = false;
                continue;
            }
            for v in 0..n {
                if reached[v] {
                    continue;
                }
                let dir = if dominates(prepared[u].members(), prepared[v].members()) {
                    Some(Direction::Forward)
                } else if dominates(prepared[v].members(), prepared[u].members())
                    && label_holds(&flat, &prepared[v], &prepared[u], Label::W)
                {
                    Some(Direction::Backward)
                } else {
                    None
                };
                if let Some(dir) = dir {
                    reached[v] = true;
                    parent[v] = Some((u, dir));
                    frontier.push_back((v, d + 1));
                }
            }
        }
        Reach { vertices: vs, parent, reached, saturated, complete, source }
    }

    pub fn vertices(&self) -> &[Family] {
        &self.vertices
    }

    pub fn source(&self) -> &Family {
        &self.vertices[self.source]
    }

    fn index(&self, y: &Family) -> Option<usize> {
        self.vertices.binary_search(&y.canonicalize()).ok()
    }

    pub fn certificate(&self, y: &Family) -> Option<ZigzagCertificate> {
        let mut j = self.index(y)?;
        if !self.reached[j] {
            return None;
        }
        let mut steps = Vec::new();
        while let Some((p, dir)) = self.parent[j] {
            steps.push(ZigzagStep { direction: dir, object: self.vertices[j].clone() });
            j = p;
        }
        steps.reverse();
        Some(ZigzagCertificate { start: self.vertices[self.source].clone(), steps })
    }

    pub fn outcome(&self, inst: &Instance, y: &Family) -> HoOutcome {
        if let Some(certificate) = self.certificate(y) {
            return HoOutcome::Yes { certificate };
        }
        if let Some(reason) = refutation(inst, self.source(), y) {
            return HoOutcome::No { reason };
        }
        if self.complete && self.saturated && self.index(y).is_some() {
            return HoOutcome::No {
                reason: String::from("the search exhausted the whole object class without reaching the target"),
            };
        }
        HoOutcome::Unknown { reason: String::from("bounded search inconclusive and no refutation applies") }
    }
}

/// `X ⟶_h Y`: yes with a zigzag, no on a sound refutation, unknown otherwise.
pub fn ho_reaches(inst: &Instance, x: &Family, y: &Family, pool: &[Family], depth: usize) -> HoOutcome {
    if x.canonicalize() == y.canonicalize() {
        return HoOutcome::Yes { certificate: ZigzagCertificate::identity(x.canonicalize()) };
    }
    if let Some(reason) = refutation(inst, x, y) {
        return HoOutcome::No { reason };
    }
    let (mut vertices, _) = default_vertices(inst, x, y, pool);
    vertices.push(y.clone());
    Reach::new(inst, x, &vertices, depth, false).outcome(inst, y)
}

/// Like [`ho_reaches`], with `pool` asserted to be the whole object class.
pub fn ho_reaches_complete(inst: &Instance, x: &Family, y: &Family, pool: &[Family], depth: usize) -> HoOutcome {
    let mut vertices = pool.to_vec();
    vertices.push(y.clone());
    Reach::new(inst, x, &vertices, depth, true).outcome(inst, y)
}

/// Homotopy isomorphism: reachability both ways.
pub fn ho_iso(inst: &Instance, x: &Family, y: &Family, pool: &[Family], depth: usize) -> Verdict {
    let a = ho_reaches(inst, x, y, pool, depth).verdict();
    let b = ho_reaches(inst, y, x, pool, depth).verdict();
    match (a, b) {
        (Verdict::Yes, Verdict::Yes) => Verdict::Yes,
        (Verdict::No, _) | (_, Verdict::No) => Verdict::No,
        _ => Verdict::Unknown,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IndecomposabilityReport {
    pub indecomposable: bool,
    /// A strict intermediate `X → Z → Y`, isomorphic to neither end.
    pub witness: Option<Family>,
    /// True when the pool is the full antichain enumeration.
    pub complete: bool,
}

pub fn is_indecomposable(
    inst: &Instance,
    x: &Family,
    y: &Family,
    pool: &[Family],
    complete: bool,
) -> Result<IndecomposabilityReport, Error> {
    inst.validate(x)?;
    inst.validate(y)?;
    if !arrow(inst, x, y) {
        return Err(Error::NoArrow);
    }
    let witness = pool
        .iter()
        .find(|z| arrow(inst, x, z) && arrow(inst, z, y) && !isomorphic(inst, z, x) && !isomorphic(inst, z, y))
        .cloned();
    Ok(IndecomposabilityReport { indecomposable: witness.is_none(), witness, complete })
}

/// A finite diagram; edges are pairs of vertex indices and must be arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Diagram {
    pub vertices: Vec<Family>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub edges: Vec<(usize, usize)>,
}

impl Diagram {
    pub fn validate(&self, inst: &Instance) -> Result<(), Error> {
        for v in &self.vertices {
            inst.validate(v)?;
        }
        for &(from, to) in &self.edges {
            if from >= self.vertices.len() || to >= self.vertices.len() {
                return Err(Error::InvalidEdge { from, to, reason: "vertex index out of range" });
            }
            if !arrow(inst, &self.vertices[from], &self.vertices[to]) {
                return Err(Error::InvalidEdge { from, to, reason: "no arrow between the vertices" });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum LimitKind {
    Limit,
    Colimit,
}

impl LimitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LimitKind::Limit => "limit",
            LimitKind::Colimit => "colimit",
        }
    }
}

/// The (co)limit of a posetal diagram: iterated meets, or iterated joins
/// reflected into the mode's object class. `None` when it is not an object.
pub fn posetal_limit(inst: &Instance, d: &Diagram, kind: LimitKind) -> Result<Option<Family>, Error> {
    d.validate(inst)?;
    let result = match kind {
        LimitKind::Limit => d.vertices.iter().fold(inst.top(), |acc, v| meet(&acc, v)),
        LimitKind::Colimit => {
            let start = match inst.mode {
                Mode::Qt => kappa_union_closure(inst, &Family::bottom()),
                _ => Family::bottom(),
            };
            d.vertices.iter().fold(start, |acc, v| pushout_object(inst, &acc, v, &[]))
        }
    };
    Ok(is_object(inst, &result).then_some(result))
}

/// The (co)limit is isomorphic to a vertex.
pub fn is_degenerate_limit(inst: &Instance, d: &Diagram, kind: LimitKind) -> Result<bool, Error> {
    let lim = posetal_limit(inst, d, kind)?.ok_or(Error::LimitAbsent(kind.as_str()))?;
    Ok(d.vertices.iter().any(|v| isomorphic(inst, v, &lim)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(lists: &[&[usize]]) -> Family {
        Family::from_lists(lists).unwrap()
    }

    fn singletons() -> Family {
        fam(&[&[0], &[1], &[2]])
    }

    #[test]
    fn reaches_examples() {
        let inst = Instance::new(3, 1).unwrap();
        let top = inst.top();
        match ho_reaches(&inst, &top, &top, &[], DEFAULT_DEPTH) {
            HoOutcome::Yes { certificate } => assert!(certificate.is_empty()),
            other => panic!("{other:?}"),
        }
        match ho_reaches(&inst, &top, &singletons(), &[], DEFAULT_DEPTH) {
            HoOutcome::Yes { certificate } => {
                assert!(certificate.replay(&inst));
                assert_eq!(certificate.end(), &singletons());
            }
            other => panic!("{other:?}"),
        }
        assert!(ho_reaches(&inst, &top, &fam(&[&[0]]), &[], DEFAULT_DEPTH).is_no());
    }

    #[test]
    fn claim1_examples() {
        let inst = Instance::new(3, 1).unwrap();
        let top = inst.top();
        assert!(claim1_necessary(&inst, &top, &top));
        assert!(!claim1_necessary(&inst, &top, &fam(&[&[0]])));
        assert!(claim1_necessary(&inst, &top, &singletons()));
    }

    #[test]
    fn iso_examples() {
        let inst = Instance::new(3, 1).unwrap().mode(Mode::St);
        let top = inst.top();
        let x = fam(&[&[0], &[0, 1]]);
        assert_eq!(ho_iso(&inst, &x, &x.canonicalize(), &[], DEFAULT_DEPTH), Verdict::Yes);
        assert_eq!(ho_iso(&inst, &top, &singletons(), &[], DEFAULT_DEPTH), Verdict::Yes);
        assert_eq!(ho_iso(&inst, &top, &Family::bottom(), &[], DEFAULT_DEPTH), Verdict::No);
    }

    #[test]
    fn indecomposable_examples() {
        let inst = Instance::new(2, 1).unwrap().mode(Mode::St);
        let pool = crate::pool::Pool::exhaustive(&inst, &crate::enumerate::Constraints::antichains()).unwrap();
        let r = is_indecomposable(&inst, &Family::bottom(), &fam(&[&[]]), &pool.families, true).unwrap();
        assert!(r.indecomposable);
        assert!(is_indecomposable(&inst, &fam(&[&[]]), &fam(&[&[0]]), &pool.families, true).unwrap().indecomposable);
        // {∅} sits strictly between
        let r = is_indecomposable(&inst, &Family::bottom(), &fam(&[&[0]]), &pool.families, true).unwrap();
        assert_eq!(r.witness, Some(fam(&[&[]])));
        let r = is_indecomposable(&inst, &Family::bottom(), &fam(&[&[0, 1]]), &pool.families, true).unwrap();
        assert!(!r.indecomposable);
        let x = fam(&[&[0], &[1]]);
        assert!(is_indecomposable(&inst, &x, &x, &pool.families, true).unwrap().indecomposable);
    }

    #[test]
    fn limit_examples() {
        let inst = Instance::new(3, 2).unwrap().mode(Mode::St);
        let x = fam(&[&[0, 1]]);
        let y = fam(&[&[1, 2]]);
        let d = Diagram { vertices: vec![x.clone(), y.clone()], edges: vec![] };
        assert_eq!(posetal_limit(&inst, &d, LimitKind::Limit).unwrap(), Some(meet(&x, &y)));
        let z = inst.top();
        let chain = Diagram { vertices: vec![fam(&[&[0]]), x.clone(), z], edges: vec![(0, 1), (1, 2)] };
        assert!(isomorphic(&inst, &posetal_limit(&inst, &chain, LimitKind::Limit).unwrap().unwrap(), &fam(&[&[0]])));
        assert!(is_degenerate_limit(&inst, &chain, LimitKind::Limit).unwrap());
        let d = Diagram { vertices: vec![Family::bottom(), x.clone()], edges: vec![] };
        assert!(isomorphic(&inst, &posetal_limit(&inst, &d, LimitKind::Colimit).unwrap().unwrap(), &x));
        let d = Diagram { vertices: vec![fam(&[&[0]]), fam(&[&[1]])], edges: vec![] };
        assert!(!is_degenerate_limit(&inst, &d, LimitKind::Limit).unwrap());
        let single = Diagram { vertices: vec![x], edges: vec![] };
        assert!(is_degenerate_limit(&inst, &single, LimitKind::Limit).unwrap());
        let bad = Diagram { vertices: vec![fam(&[&[0, 1]]), fam(&[&[0]])], edges: vec![(0, 1)] };
        assert!(matches!(posetal_limit(&inst, &bad, LimitKind::Limit), Err(Error::InvalidEdge { .. })));
    }
}
