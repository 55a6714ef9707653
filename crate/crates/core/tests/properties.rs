mod common;

use posetal_core::cover::{cov_bounds, cov_exact, is_covering_family, CovProblem};
use posetal_core::factor::{factor_c_wf, factor_wc_f};
use posetal_core::family::{apply_permutation, isomorphic, join_raw, kappa_union_closure, meet};
use posetal_core::homotopy::{ho_reaches, HoOutcome};
use posetal_core::label::label_mask;
use posetal_core::{arrow, AtomSet, Family, Instance, Label, Mode, Permutation, Variant};
use proptest::prelude::*;

fn family(n: usize, max_len: usize) -> impl Strategy<Value = Family> {
    let full = AtomSet::full(n).bits();
    prop::collection::vec(any::<u32>(), 0..=max_len)
        .prop_map(move |bits| Family::from_sets(bits.into_iter().map(|b| AtomSet::from_bits(b & full))))
}

fn instance(max_n: usize) -> impl Strategy<Value = Instance> {
    (2..=max_n, 1..=3usize, any::<bool>()).prop_map(|(n, k, st)| {
        let v = if st { Variant::St } else { Variant::Qt };
        Instance::new(n, k.min(n)).unwrap().variant(v).mode(Mode::St)
    })
}

fn with_families(max_n: usize, count: usize) -> impl Strategy<Value = (Instance, Vec<Family>)> {
    instance(max_n).prop_flat_map(move |inst| {
        let n = inst.universe();
        (Just(inst), prop::collection::vec(family(n, 5), count))
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|images| Permutation::from_images(images).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonical_form_is_an_isomorphic_antichain((inst, fs) in with_families(6, 1)) {
        let x = &fs[0];
        let c = x.canonicalize();
        prop_assert!(c.is_antichain());
        prop_assert_eq!(c.canonicalize(), c.clone());
        prop_assert!(isomorphic(&inst, x, &c));
    }

    #[test]
    fn arrows_form_a_preorder_whose_classes_are_canonical_forms((inst, fs) in with_families(5, 3)) {
        let (x, y, z) = (&fs[0], &fs[1], &fs[2]);
        prop_assert!(arrow(&inst, x, x));
        if arrow(&inst, x, y) && arrow(&inst, y, z) {
            prop_assert!(arrow(&inst, x, z));
        }
        prop_assert_eq!(isomorphic(&inst, x, y), x.canonicalize() == y.canonicalize());
    }

    #[test]
    fn closure_mode_arrows_are_a_preorder((inst, fs) in with_families(5, 3)) {
        let plus = inst.clone().mode(Mode::QtPlus);
        let (x, y, z) = (&fs[0], &fs[1], &fs[2]);
        prop_assert!(arrow(&plus, x, x));
        if arrow(&plus, x, y) && arrow(&plus, y, z) {
            prop_assert!(arrow(&plus, x, z));
        }
        // Unions of fewer than κ members: only the empty union at κ = 1, and not
        // idempotent once κ ≥ 3.
        let cx = kappa_union_closure(&plus, x);
        prop_assert!(!cx.is_empty());
        prop_assert_eq!(arrow(&inst, x, &cx), inst.kappa() >= 2 || x.iter().all(|s| s.is_empty()));
    }

    #[test]
    fn meet_and_join_are_bounds((inst, fs) in with_families(5, 3)) {
        let (x, y, z) = (&fs[0], &fs[1], &fs[2]);
        let m = meet(x, y);
        let j = join_raw(x, y);
        prop_assert!(arrow(&inst, &m, x) && arrow(&inst, &m, y));
        prop_assert!(arrow(&inst, x, &j) && arrow(&inst, y, &j));
        if arrow(&inst, z, x) && arrow(&inst, z, y) {
            prop_assert!(arrow(&inst, z, &m));
        }
        if arrow(&inst, x, z) && arrow(&inst, y, z) {
            prop_assert!(arrow(&inst, &j, z));
        }
    }

    #[test]
    fn labels_match_reference_and_imply_plain((inst, fs) in with_families(5, 2)) {
        let (x, y) = (&fs[0], &fs[1]);
        let mask = label_mask(&inst, x, y);
        for l in Label::ALL {
            prop_assert_eq!(mask.contains(l), common::label_of(&inst, x, y, l), "label {}", l);
            if mask.contains(l) {
                prop_assert!(arrow(&inst, x, y));
            }
        }
    }

    #[test]
    fn labels_are_equivariant(
        (inst, fs, p) in with_families(5, 2).prop_flat_map(|(inst, fs)| {
            let n = inst.universe();
            (Just(inst), Just(fs), permutation(n))
        })
    ) {
        let (x, y) = (&fs[0], &fs[1]);
        let (px, py) = (apply_permutation(x, &p), apply_permutation(y, &p));
        prop_assert_eq!(label_mask(&inst, x, y), label_mask(&inst, &px, &py));
        prop_assert_eq!(arrow(&inst, x, y), arrow(&inst, &px, &py));
    }

    #[test]
    fn factorizations_are_intermediate((inst, fs) in with_families(5, 2)) {
        let (x, y) = (&fs[0], &join_raw(&fs[0], &fs[1]));
        for f in [factor_c_wf(&inst, x, y).unwrap(), factor_wc_f(&inst, x, y).unwrap()] {
            prop_assert!(arrow(&inst, x, &f.middle) && arrow(&inst, &f.middle, y));
        }
    }

    /// Both legs carry their labels at κ = 1 with qt-style clauses; other cases are
    /// pinned in `factorization_gaps` below.
    #[test]
    fn factorizations_verify_at_kappa_one(n in 2..=5usize, a in family(5, 5), b in family(5, 5)) {
        let inst = Instance::new(n, 1).unwrap().mode(Mode::St);
        let full = AtomSet::full(n).bits();
        let restrict = |f: &Family| Family::from_sets(f.iter().map(|s| AtomSet::from_bits(s.bits() & full)));
        let (x, y) = (restrict(&a), restrict(&join_raw(&a, &b)));
        prop_assert!(factor_c_wf(&inst, &x, &y).unwrap().verify(&inst, &x, &y));
        prop_assert!(factor_wc_f(&inst, &x, &y).unwrap().verify(&inst, &x, &y));
    }
}

#[test]
fn factorization_gaps() {
    let fam = |l: &[&[usize]]| Family::from_lists(l).unwrap();
    // κ = 2: nothing lies (wc) above {∅} and (f) below {{0,1}}, so no
    // construction can succeed; the singletons fail the (f) leg at {0} ∪ {1}.
    let inst = Instance::new(2, 2).unwrap();
    let (x, y) = (fam(&[&[]]), fam(&[&[0, 1]]));
    let f = factor_wc_f(&inst, &x, &y).unwrap();
    assert_eq!(f.middle, fam(&[&[0], &[1]]));
    assert!(common::label_of(&inst, &x, &f.middle, Label::Wc));
    assert!(!common::label_of(&inst, &f.middle, &y, Label::F));
    // st-style chains: two-element members cannot start a chain into a
    // different two-element member, so the middle is not (c) below {{0,1}}.
    let inst = Instance::new(3, 1).unwrap().variant(Variant::St);
    let (x, y) = (fam(&[&[0, 1]]), fam(&[&[0, 1, 2]]));
    let f = factor_c_wf(&inst, &x, &y).unwrap();
    assert_eq!(f.middle, fam(&[&[0, 1], &[0, 2], &[1, 2]]));
    assert!(!common::label_of(&inst, &x, &f.middle, Label::C));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn arrows_reach_and_certificates_replay((inst, fs) in with_families(4, 2)) {
        let (x, y) = (&fs[0], &join_raw(&fs[0], &fs[1]));
        match ho_reaches(&inst, x, y, &[], 4) {
            HoOutcome::Yes { certificate } => {
                prop_assert!(certificate.replay(&inst));
                prop_assert_eq!(certificate.end().canonicalize(), y.canonicalize());
            }
            other => prop_assert!(false, "an arrow is a one-step zigzag, got {:?}", other),
        }
    }

    #[test]
    fn cover_solutions_cover(n in 1..=5usize, d in 1..=6usize, t in 1..=6usize, s in 1..=3usize) {
        prop_assume!(d <= n + 1 && t <= n + 1);
        let p = CovProblem::new(n, d, t, s).unwrap();
        let sol = cov_exact(&p);
        let (lower, upper) = cov_bounds(&p);
        match (sol.value, &sol.family) {
            (Some(v), Some(f)) => {
                prop_assert_eq!(f.len(), v);
                prop_assert!(is_covering_family(&p, f).unwrap());
                prop_assert!(lower <= v);
                prop_assert!(upper.is_none_or(|u| v <= u));
            }
            (None, None) => prop_assert_eq!(common::cov(n, d, t, s), None),
            other => prop_assert!(false, "value and family disagree: {:?}", other),
        }
    }

    #[test]
    fn atom_sets_round_trip(bits in any::<u32>(), n in 1..=16usize) {
        let s = AtomSet::from_bits(bits & AtomSet::full(n).bits());
        prop_assert_eq!(AtomSet::from_atoms(s.atoms()).unwrap(), s);
        for k in 0..=s.len() {
            prop_assert_eq!(s.subsets_of_size(k).count(), common::binomial(s.len(), k));
            prop_assert!(s.subsets_of_size(k).all(|t| t.is_subset(s) && t.len() == k));
        }
    }
}
