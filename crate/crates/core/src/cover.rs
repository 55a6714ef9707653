//! Exact generalized covering numbers `cov(n, Δ, θ, σ)`: the least size of a
//! family of sets of size `< Δ` such that every set of size `< θ` lies in a
//! union of fewer than `σ` members.
//!
//! Members can be taken of size exactly `k = min(Δ-1, n)`. The search fixes a
//! target size `s`, rising from a lower bound, and enumerates `s`-families of
//! `k`-sets by orderly generation: a family is extended only by members after
//! its last one, and only families whose characteristic vector is lex-maximal
//! in their orbit under atom permutations are kept. Removing the last member of
//! a canonical family leaves a canonical family, so every orbit is visited once.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::atoms::{AtomSet, Permutation};
use crate::error::Error;
use crate::family::Family;
use crate::instance::DEFAULT_UNIVERSE_CAP;

/// Default node budget for [`cov_exact`].
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CovProblem {
    pub n: usize,
    pub delta: usize,
    pub theta: usize,
    pub sigma: usize,
}

impl CovProblem {
    pub fn new(n: usize, delta: usize, theta: usize, sigma: usize) -> Result<Self, Error> {
        if n == 0 || n > DEFAULT_UNIVERSE_CAP {
            return Err(Error::InvalidCovProblem(format!("n must lie in 1..={DEFAULT_UNIVERSE_CAP}, got {n}")));
        }
        if !(1..=n + 1).contains(&delta) || !(1..=n + 1).contains(&theta) {
            return Err(Error::InvalidCovProblem(format!("delta and theta must lie in 1..={}", n + 1)));
        }
        if sigma == 0 {
            return Err(Error::InvalidCovProblem(String::from("sigma must be at least 1")));
        }
        Ok(CovProblem { n, delta, theta, sigma })
    }

    /// Size of the largest admissible member.
    pub fn member_size(&self) -> usize {
        (self.delta - 1).min(self.n)
    }

    /// Size of the largest set that must be covered.
    pub fn demand_size(&self) -> usize {
        (self.theta - 1).min(self.n)
    }

    fn demands(&self) -> Vec<AtomSet> {
        AtomSet::full(self.n).subsets_of_size(self.demand_size()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Optimality {
    /// Every smaller size was refuted by a closed search tree (or the bounds met).
    Exhausted,
    /// The node budget ran out; the value is the best known upper bound.
    Bounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CovSolution {
    pub problem: CovProblem,
    /// Absent when no family covers: `σ = 1`, `Δ = 1`, or demands too large for `σ - 1` members.
    pub value: Option<usize>,
    pub family: Option<Family>,
    pub optimality: Optimality,
    pub lower: usize,
    pub upper: Option<usize>,
    /// Search nodes visited.
    pub nodes: u64,
    /// Sizes refuted by a closed search tree, in increasing order.
    pub refuted_sizes: Vec<usize>,
}

/// Every set of size `< θ` lies in a union of fewer than `σ` members of `f`.
pub fn is_covering_family(p: &CovProblem, f: &Family) -> Result<bool, Error> {
    let full = AtomSet::full(p.n);
    for &m in f {
        if !m.is_subset(full) {
            let atom = m.difference(full).atoms().next().unwrap_or(0);
            return Err(Error::AtomOutOfRange { atom, universe: p.n });
        }
        if m.len() >= p.delta {
            return Err(Error::OversizedMember { size: m.len(), bound: p.delta });
        }
    }
    Ok(covers_all(p, f.members()))
}

fn covers_all(p: &CovProblem, members: &[AtomSet]) -> bool {
    p.demands().into_iter().all(|t| union_covers(t, members, p.sigma - 1))
}

/// `t` lies in a union of at most `arity` members.
fn union_covers(t: AtomSet, members: &[AtomSet], arity: usize) -> bool {
    if t.is_empty() {
        return true;
    }
    if arity == 0 {
        return false;
    }
    // branch on the members that contain the lowest uncovered atom
    let a = t.atoms().next().unwrap();
    members
        .iter()
        .filter(|m| m.contains(a))
        .any(|&m| union_covers(t.difference(m), members, arity - 1))
}

/// Sound `(lower, upper)` bounds; `upper` is absent when the problem is infeasible.
pub fn cov_bounds(p: &CovProblem) -> (usize, Option<usize>) {
    match degenerate(p) {
        Some(v) => (v.unwrap_or(0), v),
        None => (lower_bound(p), Some(greedy(p).len())),
    }
}

/// Closed-form answers: `Some(Some(v))` value, `Some(None)` infeasible.
fn degenerate(p: &CovProblem) -> Option<Option<usize>> {
    if p.demand_size() == 0 {
        // only ∅ must be covered, and the empty union does it
        return Some(Some(0));
    }
    // a demand needs at least ⌈t/k⌉ members
    if p.sigma == 1 || p.member_size() == 0 || p.demand_size() > (p.sigma - 1) * p.member_size() {
        return Some(None);
    }
    None
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn lower_bound(p: &CovProblem) -> usize {
    let k = p.member_size();
    let t = p.demand_size();
    // the members must cover every atom
    let atoms = p.n.div_ceil(k);
    // with single members doing the covering, each holds at most C(k, t) demands
    let demand = if p.sigma == 2 { binom(p.n, t).div_ceil(binom(k, t)) as usize } else { 0 };
    atoms.max(demand)
}

/// Greedy by coverage of open demands; when no single candidate closes a demand,
/// the first open demand is split into member-sized chunks, all of which are taken.
fn greedy(p: &CovProblem) -> Vec<AtomSet> {
    let k = p.member_size();
    let full = AtomSet::full(p.n);
    let cands: Vec<AtomSet> = full.subsets_of_size(k).collect();
    let mut open = p.demands();
    let mut chosen: Vec<AtomSet> = Vec::new();
    while let Some(&first) = open.first() {
        let mut trial = chosen.clone();
        let (score, best) = cands
            .iter()
            .copied()
            .filter(|c| !chosen.contains(c))
            .map(|c| {
                trial.push(c);
                let score = open.iter().filter(|&&t| union_covers(t, &trial, p.sigma - 1)).count();
                trial.pop();
                (score, c)
            })
            .max_by_key(|&(score, c)| (score, core::cmp::Reverse(c)))
            .expect("some candidate is unused while a demand is open");
        if score > 0 {
            chosen.push(best);
        } else {
            let atoms: Vec<usize> = first.atoms().collect();
            for piece in atoms.chunks(k) {
                let piece = AtomSet::from_atoms(piece.iter().copied()).expect("atoms are in range");
                let pad = full.difference(piece).atoms().take(k - piece.len());
                let member = piece.union(AtomSet::from_atoms(pad).expect("atoms are in range"));
                if !chosen.contains(&member) {
                    chosen.push(member);
                }
            }
        }
        open.retain(|&t| !union_covers(t, &chosen, p.sigma - 1));
    }
    chosen.sort_unstable();
    chosen
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Orbit pruning under atom permutations.
    pub symmetry: bool,
    /// Start from the combinatorial lower bound and prune by coverage counts.
    pub bounds: bool,
    pub node_budget: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { symmetry: true, bounds: true, node_budget: DEFAULT_NODE_BUDGET }
    }
}

impl SearchConfig {
    /// Plain exhaustive search: every size from 0, every family, no pruning.
    pub fn brute_force() -> Self {
        SearchConfig { symmetry: false, bounds: false, node_budget: DEFAULT_NODE_BUDGET }
    }
}

pub fn cov_exact(p: &CovProblem) -> CovSolution {
    cov_exact_with(p, &SearchConfig::default())
}

pub fn cov_exact_with(p: &CovProblem, cfg: &SearchConfig) -> CovSolution {
    let (lower, upper) = cov_bounds(p);
    if let Some(v) = degenerate(p) {
        return CovSolution {
            problem: *p,
            value: v,
            family: v.map(|_| Family::bottom()),
            optimality: Optimality::Exhausted,
            lower,
            upper,
            nodes: 0,
            refuted_sizes: Vec::new(),
        };
    }
    let best = Family::from_sets(greedy(p));
    let upper = best.len();
    let mut search = Searcher::new(p, cfg);
    let start = if cfg.bounds { lower } else { 0 };
    let mut refuted = Vec::new();
    for s in start..upper {
        match search.run(s) {
            Some(Some(found)) => {
                return CovSolution {
                    problem: *p,
                    value: Some(s),
                    family: Some(Family::from_sets(found)),
                    optimality: Optimality::Exhausted,
                    lower,
                    upper: Some(upper),
                    nodes: search.nodes,
                    refuted_sizes: refuted,
                };
            }
            Some(None) => refuted.push(s),
            None => {
                return CovSolution {
                    problem: *p,
                    value: Some(upper),
                    family: Some(best),
                    optimality: Optimality::Bounded,
                    lower: lower.max(s),
                    upper: Some(upper),
                    nodes: search.nodes,
                    refuted_sizes: refuted,
                };
            }
        }
    }
    CovSolution {
        problem: *p,
        value: Some(upper),
        family: Some(best),
        optimality: Optimality::Exhausted,
        lower,
        upper: Some(upper),
        nodes: search.nodes,
        refuted_sizes: refuted,
    }
}

struct Searcher<'a> {
    p: &'a CovProblem,
    cfg: &'a SearchConfig,
    cands: Vec<AtomSet>,
    demands: Vec<AtomSet>,
    /// `contains[c]`: demand indices inside candidate `c` (single-member coverage).
    contains: Vec<Vec<usize>>,
    /// `image[π][c]`: candidate index of `π(c)`.
    image: Vec<Vec<usize>>,
    nodes: u64,
}

impl<'a> Searcher<'a> {
    fn new(p: &'a CovProblem, cfg: &'a SearchConfig) -> Self {
        let mut cands: Vec<AtomSet> = AtomSet::full(p.n).subsets_of_size(p.member_size()).collect();
        cands.sort_unstable();
        let demands = p.demands();
        let contains = cands
            .iter()
            .map(|&c| (0..demands.len()).filter(|&i| demands[i].is_subset(c)).collect())
            .collect();
        let image = if cfg.symmetry {
            Permutation::all(p.n)
                .into_iter()
                .skip(1)
                .map(|pi| cands.iter().map(|&c| cands.binary_search(&pi.apply(c)).unwrap()).collect())
                .collect()
        } else {
            Vec::new()
        };
        Searcher { p, cfg, cands, demands, contains, image, nodes: 0 }
    }

    /// `Some(Some(family))` if size `s` is feasible, `Some(None)` if refuted,
    /// `None` when the budget ran out.
    fn run(&mut self, s: usize) -> Option<Option<Vec<AtomSet>>> {
        let mut chosen = Vec::with_capacity(s);
        let mut cover_count = vec![0u32; self.demands.len()];
        match self.dfs(s, 0, &mut chosen, &mut cover_count) {
            Step::Found => Some(Some(chosen.iter().map(|&i| self.cands[i]).collect())),
            Step::Exhausted => Some(None),
            Step::OutOfBudget => None,
        }
    }

    fn dfs(&mut self, s: usize, next: usize, chosen: &mut Vec<usize>, cover: &mut [u32]) -> Step {
        self.nodes += 1;
        if self.nodes > self.cfg.node_budget {
            return Step::OutOfBudget;
        }
        if chosen.len() == s {
            let members: Vec<AtomSet> = chosen.iter().map(|&i| self.cands[i]).collect();
            return if covers_all(self.p, &members) { Step::Found } else { Step::Exhausted };
        }
        let left = s - chosen.len();
        if self.cfg.bounds && self.hopeless(left, chosen, cover) {
            return Step::Exhausted;
        }
        for c in next..self.cands.len() {
            if self.cands.len() - c < left {
                break;
            }
            chosen.push(c);
            if !self.cfg.symmetry || self.is_canonical(chosen) {
                for &d in &self.contains[c] {
                    cover[d] += 1;
                }
                let r = self.dfs(s, c + 1, chosen, cover);
                for &d in &self.contains[c] {
                    cover[d] -= 1;
                }
                if r != Step::Exhausted {
                    if r == Step::OutOfBudget {
                        chosen.pop();
                    }
                    return r;
                }
            }
            chosen.pop();
        }
        Step::Exhausted
    }

    /// Counting prunes: the remaining members cannot reach every atom, or (for
    /// `σ = 2`) cannot hold the uncovered demands.
    fn hopeless(&self, left: usize, chosen: &[usize], cover: &[u32]) -> bool {
        let k = self.p.member_size();
        let reached = chosen.iter().fold(AtomSet::EMPTY, |acc, &i| acc.union(self.cands[i]));
        if self.p.n - reached.len() > left * k {
            return true;
        }
        if self.p.sigma == 2 {
            let open = cover.iter().filter(|&&c| c == 0).count() as u128;
            let per = binom(k, self.p.demand_size());
            return open > per * left as u128;
        }
        false
    }

    /// Lex-max characteristic vector in the orbit: for every permutation, the
    /// sorted image indices must not be lexicographically smaller.
    fn is_canonical(&self, chosen: &[usize]) -> bool {
        let mut img = Vec::with_capacity(chosen.len());
        for map in &self.image {
            img.clear();
            img.extend(chosen.iter().map(|&c| map[c]));
            img.sort_unstable();
            // a smaller first index means a 1-bit earlier in the vector
            if img.as_slice() < chosen {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    Found,
    Exhausted,
    OutOfBudget,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, d: usize, t: usize, s: usize) -> CovProblem {
        CovProblem::new(n, d, t, s).unwrap()
    }

    #[test]
    fn covering_checks() {
        let pr = p(4, 3, 3, 2);
        let pairs = Family::from_sets(AtomSet::full(4).subsets_of_size(2));
        assert!(is_covering_family(&pr, &pairs).unwrap());
        let pr = p(3, 2, 2, 2);
        assert!(!is_covering_family(&pr, &Family::from_lists(&[&[0], &[1]]).unwrap()).unwrap());
        assert!(is_covering_family(&p(3, 2, 1, 1), &Family::bottom()).unwrap());
        assert!(matches!(
            is_covering_family(&pr, &Family::from_lists(&[&[0, 1]]).unwrap()),
            Err(Error::OversizedMember { .. })
        ));
    }

    #[test]
    fn exact_values() {
        assert_eq!(cov_exact(&p(4, 3, 3, 2)).value, Some(6));
        assert_eq!(cov_exact(&p(3, 2, 2, 2)).value, Some(3));
        let s = cov_exact(&p(5, 3, 3, 3));
        assert_eq!(s.value, Some(3));
        assert_eq!(s.optimality, Optimality::Exhausted);
        assert!(is_covering_family(&s.problem, s.family.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(cov_bounds(&p(4, 3, 3, 2)), (6, Some(6)));
        assert_eq!(cov_bounds(&p(3, 2, 2, 2)), (3, Some(3)));
        assert!(cov_bounds(&p(5, 3, 3, 3)).0 >= 3);
    }

    #[test]
    fn degenerate_conventions() {
        // only the empty union is available with σ = 1
        assert_eq!(cov_exact(&p(3, 2, 2, 1)).value, None);
        assert_eq!(cov_exact(&p(3, 2, 1, 1)).value, Some(0));
        assert_eq!(cov_exact(&p(3, 1, 2, 2)).value, None);
        // pairs cannot be covered by one singleton
        assert_eq!(cov_exact(&p(4, 2, 3, 2)).value, None);
        assert_eq!(cov_exact(&p(4, 2, 3, 3)).value, Some(4));
    }

    #[test]
    fn symmetry_pruning_agrees_with_brute_force() {
        for pr in [p(4, 3, 3, 3), p(5, 3, 3, 3), p(4, 2, 2, 2), p(5, 3, 4, 3)] {
            let fast = cov_exact(&pr);
            let slow = cov_exact_with(&pr, &SearchConfig::brute_force());
            assert_eq!(fast.value, slow.value, "{pr:?}");
        }
    }

    #[test]
    fn validation() {
        assert!(CovProblem::new(3, 5, 2, 2).is_err());
        assert!(CovProblem::new(3, 2, 2, 0).is_err());
        assert!(CovProblem::new(0, 1, 1, 1).is_err());
    }
}
