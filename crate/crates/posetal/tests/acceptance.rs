//! One PASS/FAIL line per acceptance criterion. All comparisons are exact
//! (tolerance 0).
//!
//! The process exits zero so that a red criterion does not stop the rest of a
//! workspace test run; pass `--strict` (`cargo test --test acceptance -- --strict`)
//! to exit non-zero when any criterion fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use posetal_core::cover::{cov_exact, cov_exact_with, is_covering_family, CovProblem, SearchConfig};
use posetal_core::derived::{derived_cofibrant, derived_plain, revised_power_derived, Builtin, ExtNat, Search};
use posetal_core::enumerate::Constraints;
use posetal_core::factor::Axiom;
use posetal_core::homotopy::Reach;
use posetal_core::label::check_label_identities;
use posetal_core::pool::Pool;
use posetal_core::verify::{check_measurable_equivalences, detect_mutations, equivariance_suite, run_axiom_suite, standard_grid};
use posetal_core::{arrow, AtomSet, Family, Instance, Mode};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn exhaustive(inst: &Instance) -> Pool {
    Pool::exhaustive(inst, &Constraints::antichains()).expect("small universes enumerate")
}

/// Depth large enough for the search to saturate on a whole pool.
fn search(pool: &Pool) -> Search<'_> {
    Search { pool: &pool.families, depth: pool.len() + 1, complete: pool.complete }
}

fn cov(n: usize, delta: usize, theta: usize, sigma: usize) -> Option<usize> {
    let p = CovProblem::new(n, delta, theta, sigma).expect("valid problem");
    let s = cov_exact(&p);
    if let Some(f) = &s.family {
        assert!(is_covering_family(&p, f).unwrap(), "cov certificate must cover");
    }
    s.value
}

fn finite(v: Option<ExtNat>) -> Option<usize> {
    match v {
        Some(ExtNat::Finite(k)) => Some(k as usize),
        _ => None,
    }
}

fn show(v: Option<usize>) -> String {
    v.map_or_else(|| "none".to_string(), |k| k.to_string())
}

/// Cofibrant derived cardinality of TOP against the pair-cover numbers.
fn criterion_1() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 2..=5 {
        for kappa in 1..=2 {
            let inst = Instance::new(n, kappa).unwrap();
            let pool = exhaustive(&inst);
            let r = derived_cofibrant(&inst, &Builtin::Card, &inst.top(), search(&pool));
            let replayed = r.certificate.as_ref().is_some_and(|c| c.replay(&inst));
            let (d, c) = (finite(r.value), cov(n, kappa + 1, kappa + 1, 2));
            let good = d == c && replayed && r.exhaustive;
            ok &= good;
            parts.push(format!("n={n} k={kappa}: derived {} cov {}{}", show(d), show(c), if good { "" } else { " x" }));
        }
    }
    outcome(ok, parts.join("; "))
}

/// Closure-mode derived cardinality against cov with σ = κ.
fn criterion_2() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, kappa) in [(4, 2), (5, 2), (5, 3)] {
        let inst = Instance::new(n, kappa).unwrap().mode(Mode::QtPlus);
        let pool = exhaustive(&inst);
        let r = revised_power_derived(&inst, &inst.top(), search(&pool)).unwrap();
        let (d, c) = (finite(r.value), cov(n, kappa + 1, kappa + 1, kappa));
        let witness = r.witness.map_or_else(|| "-".to_string(), |w| w.to_string());
        ok &= d == c;
        parts.push(format!("n={n} k={kappa}: derived {} (witness {witness}) cov {}", show(d), show(c)));
    }
    outcome(ok, parts.join("; "))
}

/// Co-slice under all subsets of size < b.
fn criterion_3() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for kappa in 1..=2 {
        for n in 2..=5 {
            for b in 1..=3.min(n) {
                let base = Family::from_sets(AtomSet::full(n).subsets_of_size(b - 1));
                let inst = Instance::new(n, kappa).unwrap().base(base).unwrap();
                let pool = exhaustive(&inst);
                let r = derived_cofibrant(&inst, &Builtin::Card, &inst.top(), search(&pool));
                let (d, c) = (finite(r.value), cov(n, b, b, 2));
                if d != c {
                    ok = false;
                    parts.push(format!("k={kappa} n={n} b={b}: derived {} cov {}", show(d), show(c)));
                }
            }
        }
    }
    if ok {
        parts.push("all (k, n, b) with k<=2, n<=5, b<=3 agree".to_string());
    }
    outcome(ok, parts.join("; "))
}

fn criterion_4() -> Outcome {
    let grid = standard_grid(Mode::Qt);
    let report = run_axiom_suite(&grid, &Axiom::ALL).unwrap();
    let counts: Vec<String> = report.counts.iter().map(|c| format!("{} {}/{}", c.check, c.failed, c.passed + c.failed)).collect();
    let mutations = detect_mutations(&grid).unwrap();
    let undetected: Vec<String> =
        mutations.iter().filter(|m| !m.detected).map(|m| format!("{:?}", m.mutation)).collect();
    let ok = report.passed() && undetected.is_empty();
    let example = report.violations.first().map(|v| format!("; first: {} {}", v.check, v.detail)).unwrap_or_default();
    outcome(
        ok,
        format!(
            "failures per check [{}]; undetected mutations [{}]{example}",
            counts.join(", "),
            undetected.join(", ")
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut bad = Vec::new();
    for n in 2..=6 {
        for k in 1..n {
            let expect = (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1));
            if cov(n, k + 1, k + 1, 2) != Some(expect) {
                bad.push(format!("({n},{},{},2)", k + 1, k + 1));
            }
        }
    }
    if cov(3, 2, 2, 2) != Some(3) {
        bad.push("(3,2,2,2)".into());
    }
    let p = CovProblem::new(5, 3, 3, 3).unwrap();
    let (fast, slow) = (cov_exact(&p).value, cov_exact_with(&p, &SearchConfig::brute_force()).value);
    if fast != slow {
        bad.push(format!("(5,3,3,3) pruned {} vs unpruned {}", show(fast), show(slow)));
    }
    outcome(bad.is_empty(), format!("(5,3,3,3) = {}; mismatches [{}]", show(fast), bad.join(", ")))
}

fn criterion_6() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for n in 1..=3 {
        for kappa in 1..=2.min(n) {
            let inst = Instance::new(n, kappa).unwrap();
            let pool = exhaustive(&inst);
            for x in &pool.families {
                for y in &pool.families {
                    if !arrow(&inst, x, y) {
                        continue;
                    }
                    checked += 1;
                    let r = check_label_identities(&inst, x, y, &pool.families);
                    if !r.holds() {
                        bad.push(format!("n={n} k={kappa} {x} -> {y}: {}", r.violations.join(" / ")));
                    }
                }
            }
        }
    }
    let first: Vec<String> = bad.iter().take(2).cloned().collect();
    outcome(bad.is_empty(), format!("{} of {checked} arrows violate an identity; e.g. {}", bad.len(), first.join("; ")))
}

fn criterion_7() -> Outcome {
    let report = equivariance_suite(&standard_grid(Mode::Qt), 1000, 7).unwrap();
    let trials: u64 = report.counts.iter().map(|c| c.passed + c.failed).sum();
    outcome(report.passed(), format!("{} violations over {trials} decider evaluations", report.failures()))
}

fn criterion_8() -> Outcome {
    let mut bad = Vec::new();
    let mut pairs = 0;
    for n in 1..=3 {
        for kappa in 1..=2.min(n) {
            let inst = Instance::new(n, kappa).unwrap();
            let pool = exhaustive(&inst);
            let s = search(&pool);
            let value = |x: &Family, plain: bool| {
                let r = if plain {
                    derived_plain(&inst, &Builtin::Card, x, s)
                } else {
                    derived_cofibrant(&inst, &Builtin::Card, x, s)
                };
                r.value
            };
            let plain: Vec<_> = pool.families.iter().map(|x| value(x, true)).collect();
            let cof: Vec<_> = pool.families.iter().map(|x| value(x, false)).collect();
            let reach: Vec<Reach> =
                pool.families.iter().map(|x| Reach::new(&inst, x, &pool.families, s.depth, true)).collect();
            for (i, x) in pool.families.iter().enumerate() {
                if !reach[i].outcome(&inst, &inst.top()).is_yes() || plain[i] != Some(ExtNat::Finite(1)) {
                    bad.push(format!("n={n} k={kappa} plain({x}) = {:?}", plain[i]));
                }
                for (j, y) in pool.families.iter().enumerate() {
                    let iso = reach[i].outcome(&inst, y).is_yes() && reach[j].outcome(&inst, x).is_yes();
                    if iso {
                        pairs += 1;
                        if plain[i] != plain[j] || cof[i] != cof[j] {
                            bad.push(format!("n={n} k={kappa} {x} ~ {y} but values differ"));
                        }
                    }
                    // Everything reachable from Y is reachable from X, so X's minimum is no larger.
                    if arrow(&inst, x, y) && (plain[i] > plain[j] || cof[i] > cof[j]) {
                        bad.push(format!("n={n} k={kappa} {x} -> {y} not monotone"));
                    }
                }
            }
            let bottom = derived_plain(&inst, &Builtin::Card, &Family::bottom(), s).value;
            if bottom != Some(ExtNat::Finite(0)) {
                bad.push(format!("n={n} k={kappa} plain(bottom) = {bottom:?}"));
            }
        }
    }
    let first: Vec<String> = bad.iter().take(3).cloned().collect();
    outcome(bad.is_empty(), format!("{pairs} homotopy-isomorphic pairs; {} failures {}", bad.len(), first.join("; ")))
}

fn criterion_9() -> Outcome {
    let mut bad = Vec::new();
    let mut points = 0;
    for n in 1..=4 {
        for kappa in 1..=2.min(n) {
            let inst = Instance::new(n, kappa).unwrap().mode(Mode::QtPlus);
            let r = check_measurable_equivalences(&inst, &exhaustive(&inst));
            points += 1;
            if !r.passed() {
                bad.push(format!("n={n} k={kappa}: {} failures", r.failures()));
            }
        }
    }
    outcome(bad.is_empty(), format!("{points} grid points in closure mode; [{}]", bad.join(", ")))
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("n3k1.json");
    let st = dir.path().join("n3k1st.json");
    let diagram = dir.path().join("diagram.json");
    std::fs::write(&inst, r#"{"universe":3,"kappa":1,"family":[[0],[1,2]]}"#).unwrap();
    std::fs::write(&st, r#"{"universe":3,"kappa":1,"mode":"st","variant":"st"}"#).unwrap();
    std::fs::write(&diagram, r#"{"vertices":[[[0]],[[1]],[[0,1]]],"edges":[[0,2],[1,2]]}"#).unwrap();
    let i = inst.to_str().unwrap();
    let s = st.to_str().unwrap();
    let d = diagram.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["label", "--instance", i, "--source", "[[0]]", "--target", "TOP"],
        vec!["label", "--instance", i, "--source", "[[0]]", "--target", "TOP", "--label", "wc"],
        vec!["lift", "--instance", i, "--f", "[[0]],TOP", "--g", "[[1]],TOP"],
        vec!["lift", "--instance", i, "--f", "[[0]],TOP", "--against", "wc0", "--side", "right"],
        vec!["factor", "--instance", i, "--kind", "c-wf", "--source", "[[0]]", "--target", "TOP"],
        vec!["factor", "--instance", i, "--kind", "wc-f", "--source", "[[0]]", "--target", "TOP"],
        vec!["cute", "--instance", i, "--check"],
        vec!["cute", "--instance", i, "--reflect"],
        vec!["ho", "--instance", i, "--reaches", "--source", "TOP", "--target", "[[0],[1],[2]]"],
        vec!["ho", "--instance", i, "--iso", "--source", "TOP", "--target", "[[0],[1],[2]]", "--pool-spec", "exhaustive"],
        vec!["indec", "--instance", i, "--source", "[[0]]", "--target", "TOP"],
        vec!["limit", "--instance", i, "--kind", "limit", "--diagram", d],
        vec!["limit", "--instance", i, "--kind", "colimit", "--diagram", d],
        vec!["derive", "--instance", i, "--plain", "--object", "TOP"],
        vec!["derive", "--instance", i, "--cofibrant", "--object", "TOP", "--pool-spec", "sampled:size=20,seed=3"],
        vec!["cov", "--n", "4", "--delta", "3", "--theta", "3", "--sigma", "2"],
        vec!["cov", "--n", "5", "--delta", "3", "--theta", "3", "--sigma", "3", "--bounds-only"],
        vec!["enumerate", "--instance", i],
        vec!["verify", "--suite", "axioms", "--grid", "small"],
        vec!["verify", "--suite", "labels", "--grid", "small", "--mode", "st"],
        vec!["verify", "--suite", "equivariance", "--grid", "small", "--trials", "50", "--seed", "42"],
        vec!["verify", "--suite", "mutations", "--grid", "small"],
        vec!["verify", "--suite", "m5", "--instance", s],
        vec!["verify", "--suite", "measurable", "--instance", i],
        vec!["verify", "--suite", "claim2", "--instance", i],
    ];
    let bin = Path::new(env!("CARGO_BIN_EXE_posetal"));
    let mut differing = Vec::new();
    for args in &commands {
        let a = Command::new(bin).args(args).output().unwrap();
        let b = Command::new(bin).args(args).output().unwrap();
        if a.stdout != b.stdout || a.status.code() != b.status.code() || a.stdout.is_empty() {
            differing.push(args[..2.min(args.len())].join(" "));
        }
    }
    outcome(differing.is_empty(), format!("{} commands run twice; differing [{}]", commands.len(), differing.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("derived cofibrant card of TOP = cov(n, k+1, k+1, 2)", criterion_1),
        ("closure-mode derived card of TOP = cov(n, k+1, k+1, k)", criterion_2),
        ("co-slice derived card of TOP = cov(n, b, b, 2)", criterion_3),
        ("axiom suite clean and every mutation detected", criterion_4),
        ("cover oracle sanity", criterion_5),
        ("label identities on directed families", criterion_6),
        ("equivariance under atom permutations", criterion_7),
        ("homotopy invariance and monotonicity of derived values", criterion_8),
        ("measurable equivalences", criterion_9),
        ("byte-identical CLI output across runs", criterion_10),
    ];
    let mut failed = 0;
    let mut outcomes = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let o = run();
        failed += usize::from(!o.passed);
        outcomes.push((i + 1, o.passed));
        println!(
            "{} {:>2} {name} [tolerance 0, {:.1}s]: {}",
            if o.passed { "PASS" } else { "FAIL" },
            i + 1,
            started.elapsed().as_secs_f64(),
            o.detail
        );
    }
    let red: Vec<String> = outcomes.iter().filter(|(_, passed)| !passed).map(|(i, _)| i.to_string()).collect();
    println!("acceptance: {} of {} criteria pass; failing [{}]", criteria.len() - failed, criteria.len(), red.join(", "));
    let strict = std::env::args().any(|a| a == "--strict");
    if failed == 0 || !strict {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
