//! Reference evaluators written directly from the clause definitions, over
//! `BTreeSet<usize>` rather than the engine's bitmasks. Slow and obvious on purpose.

#![allow(dead_code)]

use std::collections::BTreeSet;

use posetal_core::{AtomSet, Family, Instance, Label, Variant};

pub type Set = BTreeSet<usize>;

pub fn to_sets(f: &Family) -> Vec<Set> {
    f.iter().map(|a| a.atoms().collect()).collect()
}

pub fn from_sets(sets: &[Set]) -> Family {
    Family::from_sets(sets.iter().map(|s| AtomSet::from_atoms(s.iter().copied()).unwrap()))
}

fn subsets(s: &Set) -> Vec<Set> {
    let items: Vec<usize> = s.iter().copied().collect();
    (0u32..1 << items.len())
        .map(|mask| items.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &a)| a).collect())
        .collect()
}

fn m(a: usize, kappa: usize) -> usize {
    a.max(kappa)
}

/// Members reachable from `a` by a chain of members whose overlaps keep the bound.
pub fn chain_reachable(kappa: usize, family: &[Set], a: &Set, b: &Set) -> bool {
    let inter = |p: &Set, q: &Set| p.intersection(q).count();
    let mut reached: Vec<bool> = family.iter().map(|b0| m(inter(a, b0), kappa) == m(b0.len(), kappa)).collect();
    loop {
        let mut grew = false;
        for i in 0..family.len() {
            if !reached[i] {
                continue;
            }
            for j in 0..family.len() {
                if !reached[j] && m(inter(&family[i], &family[j]), kappa) == m(family[j].len(), kappa) {
                    reached[j] = true;
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    family.iter().zip(&reached).any(|(f, &r)| r && f == b)
}

/// The normative clause for `label`, evaluated member by member.
pub fn label(kappa: usize, variant: Variant, x: &[Set], y: &[Set], label: Label) -> bool {
    let plain = x.iter().all(|a| y.iter().any(|b| a.is_subset(b)));
    if !plain {
        return false;
    }
    let mut x0: Vec<Set> = x.to_vec();
    x0.push(Set::new());
    let st = variant == Variant::St;
    let small = |s: usize| s < kappa;
    let size_bound = |xm: &Set, ym: &Set| m(if st { xm.intersection(ym).count() } else { xm.len() }, kappa);
    match label {
        Label::Plain => true,
        Label::Wc => y.iter().all(|b| x0.iter().any(|a| small(b.difference(a).count()))),
        Label::C => y.iter().all(|b| {
            x0.iter().any(|a| if st { chain_reachable(kappa, y, a, b) } else { b.len() <= m(a.len(), kappa) })
        }),
        Label::F => x0.iter().all(|a| {
            y.iter().all(|b| {
                subsets(b).iter().filter(|yp| small(yp.len())).all(|yp| {
                    let need: Set = if st { a.intersection(b).copied().collect() } else { a.clone() };
                    let need: Set = need.union(yp).copied().collect();
                    x0.iter().any(|xp| need.is_subset(xp))
                })
            })
        }),
        Label::Wf | Label::W => x0.iter().all(|a| {
            y.iter().all(|b| {
                subsets(b).iter().filter(|yp| yp.len() <= size_bound(a, b)).all(|yp| {
                    x0.iter().any(|xp| {
                        if label == Label::Wf {
                            yp.is_subset(xp)
                        } else {
                            small(yp.difference(xp).count())
                        }
                    })
                })
            })
        }),
    }
}

pub fn label_of(inst: &Instance, x: &Family, y: &Family, l: Label) -> bool {
    label(inst.kappa(), inst.variant, &to_sets(x), &to_sets(y), l)
}

/// Every antichain of subsets of `0..n`, by brute force over sets of sets.
pub fn antichains(n: usize) -> Vec<Vec<Set>> {
    let all: Vec<Set> = subsets(&(0..n).collect());
    let mut out = Vec::new();
    fn go(all: &[Set], i: usize, chosen: &mut Vec<Set>, out: &mut Vec<Vec<Set>>) {
        if i == all.len() {
            out.push(chosen.clone());
            return;
        }
        go(all, i + 1, chosen, out);
        if chosen.iter().all(|c| !c.is_subset(&all[i]) && !all[i].is_subset(c)) {
            chosen.push(all[i].clone());
            go(all, i + 1, chosen, out);
            chosen.pop();
        }
    }
    go(&all, 0, &mut Vec::new(), &mut out);
    out
}

/// Least number of sets of size `< delta` such that every set of size `< theta`
/// lies in a union of fewer than `sigma` of them; `None` when no family works.
pub fn cov(n: usize, delta: usize, theta: usize, sigma: usize) -> Option<usize> {
    let full: Set = (0..n).collect();
    let demands: Vec<Set> = subsets(&full).into_iter().filter(|s| s.len() < theta).collect();
    // Enlarging a member never breaks a cover, so members of the largest size suffice.
    let k = (delta - 1).min(n);
    let cands: Vec<Set> = subsets(&full).into_iter().filter(|s| s.len() == k).collect();
    let covered = |fam: &[&Set], d: &Set| -> bool {
        (0u32..1 << fam.len()).any(|mask| {
            mask.count_ones() < sigma as u32 && {
                let u: Set = fam.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).flat_map(|(_, s)| s.iter().copied()).collect();
                d.is_subset(&u)
            }
        })
    };
    for size in 0..=cands.len() {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let fam: Vec<&Set> = idx.iter().map(|&i| &cands[i]).collect();
            if demands.iter().all(|d| covered(&fam, d)) {
                return Some(size);
            }
            // Next combination in lexicographic order.
            let mut i = size;
            while i > 0 && idx[i - 1] == cands.len() - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    None
}

pub fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
