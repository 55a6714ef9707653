//! Argument parsing and dispatch. Every command yields one JSON document and an
//! exit code: 0 on success, 1 when a verification finds a violation, 2 on bad input.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use posetal_core::cover::{cov_bounds, cov_exact_with, CovProblem, SearchConfig};
use posetal_core::derived::{derived_cofibrant, derived_plain, Builtin, Search};
use posetal_core::factor::{cute_reflection, cute_violation, factor_c_wf, factor_wc_f, Axiom};
use posetal_core::homotopy::{
    default_vertices, ho_reaches, ho_reaches_complete, is_indecomposable, posetal_limit, HoOutcome, LimitKind,
    Verdict, DEFAULT_DEPTH,
};
use posetal_core::instance::DEFAULT_UNIVERSE_CAP;
use posetal_core::label::label_set;
use posetal_core::lifting::{lifting_holds, lifts_against_generators, ArrowRef, GeneratorKind, Side};
use posetal_core::pool::{is_object, Pool, PoolSpec};
use posetal_core::verify::{
    check_claim2_closure, check_measurable_equivalences, detect_mutations, equivariance_suite,
    find_m5_counterexample_st, label_property_suite, run_axiom_suite, standard_grid, GridPoint, GridSpec,
    VerificationReport,
};
use posetal_core::{Family, Instance, Label, Mode};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{usage, CliError};
use crate::format::{load_diagram, load_instance, parse_family, parse_pair, InstanceFile};

#[derive(Parser, Debug)]
#[command(name = "posetal", version, about = "Labelled posetal categories of finite set families")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Instance file or inline JSON.
    #[arg(long, global = true)]
    pub instance: Option<String>,

    /// Write the JSON document here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Accepted for compatibility; the engine runs on one thread so output stays deterministic.
    #[arg(long, global = true, env = "POSETAL_THREADS")]
    pub threads: Option<usize>,

    /// Raise the universe cap (at most 32 atoms are representable).
    #[arg(long, global = true, default_value_t = DEFAULT_UNIVERSE_CAP)]
    pub universe_cap: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// All six labels of an arrow, or one of them.
    Label {
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        label: Option<String>,
    },
    /// Lifting of one arrow against another, or against a generator class.
    #[command(group(ArgGroup::new("other").required(true).args(["g", "against"])))]
    Lift {
        /// The arrow under test, as SOURCE,TARGET.
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: Option<String>,
        #[arg(long, value_parser = ["c0", "wc0"])]
        against: Option<String>,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
        /// Largest generator target size; defaults to the universe.
        #[arg(long)]
        bound: Option<usize>,
    },
    /// One of the two functorial factorizations.
    Factor {
        #[arg(long, value_enum)]
        kind: FactorKind,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
    },
    /// Cuteness test or reflection.
    #[command(group(ArgGroup::new("action").required(true).args(["check", "reflect"])))]
    Cute {
        #[arg(long)]
        object: Option<String>,
        #[arg(long)]
        check: bool,
        #[arg(long)]
        reflect: bool,
        #[arg(long, default_value = "standard")]
        pool_spec: String,
    },
    /// Homotopy reachability or isomorphism.
    #[command(group(ArgGroup::new("action").required(true).args(["reaches", "iso"])))]
    Ho {
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        reaches: bool,
        #[arg(long)]
        iso: bool,
        /// Search pool; without it the atoms of both ends span the search.
        #[arg(long)]
        pool_spec: Option<String>,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
    },
    /// Whether an arrow admits no strict intermediate object.
    Indec {
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "standard")]
        pool_spec: String,
    },
    /// Limit or colimit of a finite diagram.
    Limit {
        #[arg(long, value_enum)]
        kind: LimitArg,
        #[arg(long)]
        diagram: String,
    },
    /// Left-derived value of an object function.
    #[command(group(ArgGroup::new("flavour").required(true).args(["plain", "cofibrant"])))]
    Derive {
        #[arg(long)]
        plain: bool,
        #[arg(long)]
        cofibrant: bool,
        /// card, raw-card, member-size-sum or constant:N.
        #[arg(long, default_value = "card")]
        function: String,
        /// Defaults to the instance family, then to TOP.
        #[arg(long)]
        object: Option<String>,
        /// Co-slice base; overrides the instance base.
        #[arg(long)]
        base: Option<String>,
        #[arg(long, default_value = "standard")]
        pool_spec: String,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
    },
    /// Least covering family size.
    Cov {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        theta: usize,
        #[arg(long)]
        sigma: usize,
        #[arg(long)]
        bounds_only: bool,
        /// Disable orbit pruning and bound-guided search.
        #[arg(long)]
        brute_force: bool,
        #[arg(long)]
        node_budget: Option<u64>,
    },
    /// Property suites.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        /// default (the standard grid), small (at most three atoms) or point (the instance alone).
        #[arg(long, default_value = "default")]
        grid: String,
        /// Mode of the grid points.
        #[arg(long, value_enum, default_value_t = ModeArg::Qt)]
        mode: ModeArg,
        /// Overrides the pool of every grid point, or of the instance.
        #[arg(long)]
        pool_spec: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Comma-separated subset of m0,m1,m2,m4,m5,closed.
        #[arg(long)]
        axioms: Option<String>,
        #[arg(long)]
        object: Option<String>,
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        /// Record wall-clock time in the report (makes output nondeterministic).
        #[arg(long)]
        timing: bool,
    },
    /// List the objects of a pool.
    Enumerate {
        #[arg(long, default_value = "exhaustive")]
        pool_spec: String,
        #[arg(long)]
        count_only: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FactorKind {
    #[value(name = "c-wf")]
    CWf,
    #[value(name = "wc-f")]
    WcF,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LimitArg {
    Limit,
    Colimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    St,
    Qt,
    #[value(name = "qt+")]
    QtPlus,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::St => Mode::St,
            ModeArg::Qt => Mode::Qt,
            ModeArg::QtPlus => Mode::QtPlus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Axioms,
    Labels,
    Mutations,
    M5,
    Measurable,
    Claim2,
    Equivariance,
}

/// A finished command: the document and the exit code.
#[derive(Debug)]
pub struct Output {
    pub document: Value,
    pub code: i32,
}

impl Output {
    fn ok(v: impl Serialize) -> Self {
        Output { document: to_json(v), code: 0 }
    }

    fn verdict(v: impl Serialize, passed: bool) -> Self {
        Output { document: to_json(v), code: if passed { 0 } else { 1 } }
    }
}

fn to_json(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("engine types serialize to JSON")
}

/// Parses `args` (program name first), runs the command and renders the result.
/// Returns the text to print (empty when written to `--out`) and the exit code.
pub fn main_with<I, T>(args: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => return (e.to_string(), 0),
        Err(e) => return (render(&usage(e.to_string()).to_json()), 2),
    };
    let out = cli.out.clone();
    let (doc, code) = match run(&cli) {
        Ok(o) => (o.document, o.code),
        Err(e) => (e.to_json(), 2),
    };
    let text = render(&doc);
    match out {
        Some(path) => match std::fs::write(&path, &text) {
            Ok(()) => (String::new(), code),
            Err(source) => (render(&CliError::Write { path, source }.to_json()), 2),
        },
        None => (text, code),
    }
}

fn render(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("JSON values render");
    s.push('\n');
    s
}

struct Ctx<'a> {
    cli: &'a Cli,
}

impl Ctx<'_> {
    fn instance(&self) -> Result<(Instance, Option<Family>), CliError> {
        let arg = self.cli.instance.as_deref().ok_or_else(|| usage("this command needs --instance"))?;
        load_instance(arg, self.cli.universe_cap)
    }

    /// `--object` if given, else the instance family, else TOP.
    fn object(&self, inst: &Instance, default: &Option<Family>, arg: &Option<String>) -> Result<Family, CliError> {
        match arg {
            Some(a) => parse_family(a, inst),
            None => Ok(default.clone().unwrap_or_else(|| inst.top())),
        }
    }
}

fn pool(spec: &str, inst: &Instance) -> Result<Pool, CliError> {
    Ok(PoolSpec::parse(spec)?.build(inst)?)
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let ctx = Ctx { cli };
    match &cli.command {
        Command::Cov { n, delta, theta, sigma, bounds_only, brute_force, node_budget } => {
            let p = CovProblem::new(*n, *delta, *theta, *sigma)?;
            if *bounds_only {
                let (lower, upper) = cov_bounds(&p);
                return Ok(Output::ok(json!({ "problem": p, "lower": lower, "upper": upper })));
            }
            let mut cfg = if *brute_force { SearchConfig::brute_force() } else { SearchConfig::default() };
            if let Some(b) = node_budget {
                cfg.node_budget = *b;
            }
            Ok(Output::ok(cov_exact_with(&p, &cfg)))
        }
        Command::Verify { .. } => verify(&ctx),
        cmd => {
            let (inst, family) = ctx.instance()?;
            query(&ctx, cmd, &inst, &family)
        }
    }
}

fn query(ctx: &Ctx<'_>, cmd: &Command, inst: &Instance, family: &Option<Family>) -> Result<Output, CliError> {
    match cmd {
        Command::Label { source, target, label } => {
            let (x, y) = (parse_family(source, inst)?, parse_family(target, inst)?);
            let report = label_set(inst, &x, &y)?;
            match label {
                None => Ok(Output::ok(report)),
                Some(l) => {
                    let l: Label = l.parse()?;
                    let entry = report.labels.into_iter().find(|e| e.label == l).expect("every label is reported");
                    Ok(Output::ok(json!({ "source": x, "target": y, "label": entry })))
                }
            }
        }
        Command::Lift { f, g, against, side, bound } => {
            let (s, t) = parse_pair(f, inst)?;
            let f = ArrowRef::new(inst, s, t)?;
            if let Some(g) = g {
                let (s, t) = parse_pair(g, inst)?;
                let g = ArrowRef::new(inst, s, t)?;
                let holds = lifting_holds(inst, &f, &g);
                return Ok(Output::ok(json!({ "f": f, "g": g, "holds": holds })));
            }
            let kind = GeneratorKind::parse(against.as_deref().unwrap_or_default())
                .ok_or_else(|| usage("--against must be c0 or wc0"))?;
            let side = match side {
                SideArg::Left => Side::Left,
                SideArg::Right => Side::Right,
            };
            let report = lifts_against_generators(inst, &f, kind, side, bound.unwrap_or(inst.universe()));
            Ok(Output::ok(json!({ "f": f, "against": kind, "side": side, "report": report })))
        }
        Command::Factor { kind, source, target } => {
            let (x, y) = (parse_family(source, inst)?, parse_family(target, inst)?);
            let fact = match kind {
                FactorKind::CWf => factor_c_wf(inst, &x, &y)?,
                FactorKind::WcF => factor_wc_f(inst, &x, &y)?,
            };
            let verified = fact.verify(inst, &x, &y);
            let mut doc = to_json(&fact);
            doc["verified"] = json!(verified);
            Ok(Output { document: doc, code: 0 })
        }
        Command::Cute { object, reflect, pool_spec, .. } => {
            let x = ctx.object(inst, family, object)?;
            let p = pool(pool_spec, inst)?;
            if *reflect {
                return Ok(Output::ok(json!({ "object": x, "reflection": cute_reflection(inst, &x, &p.families) })));
            }
            let v = cute_violation(inst, &x, &p.families);
            Ok(Output::ok(json!({ "object": x, "cute": v.is_none(), "violation": v, "pool": p.description })))
        }
        Command::Ho { source, target, iso, pool_spec, depth, .. } => {
            let (x, y) = (parse_family(source, inst)?, parse_family(target, inst)?);
            let p = pool_spec.as_deref().map(|s| pool(s, inst)).transpose()?;
            let forward = reaches(inst, &x, &y, p.as_ref(), *depth);
            if !*iso {
                return Ok(Output::ok(forward));
            }
            let backward = reaches(inst, &y, &x, p.as_ref(), *depth);
            let verdict = match (forward.verdict(), backward.verdict()) {
                (Verdict::Yes, Verdict::Yes) => Verdict::Yes,
                (Verdict::No, _) | (_, Verdict::No) => Verdict::No,
                _ => Verdict::Unknown,
            };
            Ok(Output::ok(json!({ "verdict": verdict, "forward": forward, "backward": backward })))
        }
        Command::Indec { source, target, pool_spec } => {
            let (x, y) = (parse_family(source, inst)?, parse_family(target, inst)?);
            let p = pool(pool_spec, inst)?;
            Ok(Output::ok(is_indecomposable(inst, &x, &y, &p.families, p.complete)?))
        }
        Command::Limit { kind, diagram } => {
            let d = load_diagram(diagram, inst)?;
            let kind = match kind {
                LimitArg::Limit => LimitKind::Limit,
                LimitArg::Colimit => LimitKind::Colimit,
            };
            let object = posetal_limit(inst, &d, kind)?;
            let degenerate = object.as_ref().map(|l| d.vertices.iter().any(|v| posetal_core::family::isomorphic(inst, v, l)));
            Ok(Output::ok(json!({ "kind": kind, "object": object, "degenerate": degenerate })))
        }
        Command::Derive { cofibrant, function, object, base, pool_spec, depth, .. } => {
            let f = Builtin::parse(function).ok_or_else(|| usage(format!("unknown object function `{function}`")))?;
            let mut inst = inst.clone();
            if let Some(b) = base {
                let b = parse_family(b, &inst)?;
                inst = inst.base(b)?;
            }
            let x = ctx.object(&inst, family, object)?;
            let p = pool(pool_spec, &inst)?;
            let mut vertices = p.families.clone();
            if !p.complete {
                vertices.extend(default_vertices(&inst, &x, &inst.top(), &[]).0);
                vertices.retain(|v| is_object(&inst, v));
                vertices.iter_mut().for_each(|v| *v = v.canonicalize());
                vertices.sort();
                vertices.dedup();
            }
            let s = Search { pool: &vertices, depth: *depth, complete: p.complete };
            let r = if *cofibrant { derived_cofibrant(&inst, &f, &x, s) } else { derived_plain(&inst, &f, &x, s) };
            let mut doc = to_json(&r);
            doc["object"] = to_json(&x);
            doc["instance"] = to_json(InstanceFile::from_instance(&inst, None));
            Ok(Output { document: doc, code: 0 })
        }
        Command::Enumerate { pool_spec, count_only } => {
            let p = pool(pool_spec, inst)?;
            let mut doc = json!({ "description": p.description, "complete": p.complete, "count": p.len() });
            if !*count_only {
                doc["families"] = to_json(&p.families);
            }
            Ok(Output { document: doc, code: 0 })
        }
        Command::Cov { .. } | Command::Verify { .. } => unreachable!("dispatched before the instance is loaded"),
    }
}

fn reaches(inst: &Instance, x: &Family, y: &Family, p: Option<&Pool>, depth: usize) -> HoOutcome {
    match p {
        Some(p) if p.complete => ho_reaches_complete(inst, x, y, &p.families, depth),
        Some(p) => ho_reaches(inst, x, y, &p.families, depth),
        None => ho_reaches(inst, x, y, &[], depth),
    }
}

fn grid(ctx: &Ctx<'_>, name: &str, mode: Mode, pool_spec: &Option<String>) -> Result<Vec<GridSpec>, CliError> {
    let mut g = match name {
        "default" | "standard" => standard_grid(mode),
        "small" => standard_grid(mode).into_iter().filter(|s| s.universe <= 3).collect(),
        "point" => {
            let (inst, _) = ctx.instance()?;
            if inst.base_family().is_some() {
                return Err(usage("grid points carry no co-slice base"));
            }
            vec![GridSpec {
                universe: inst.universe(),
                kappa: inst.kappa(),
                variant: inst.variant,
                mode: inst.mode,
                pool: PoolSpec::default(),
                mutation: inst.clauses.mutation,
            }]
        }
        other => return Err(usage(format!("unknown grid `{other}`; expected default, small or point"))),
    };
    if let Some(s) = pool_spec {
        let spec = PoolSpec::parse(s)?;
        g.iter_mut().for_each(|p| p.pool = spec.clone());
    }
    Ok(g)
}

fn verify(ctx: &Ctx<'_>) -> Result<Output, CliError> {
    let Command::Verify { suite, grid: grid_name, mode, pool_spec, seed, trials, axioms, object, bound, budget, timing } =
        &ctx.cli.command
    else {
        unreachable!()
    };
    let started = Instant::now();
    let stamp = |mut r: VerificationReport| {
        if *timing {
            r.timing_ms = Some(started.elapsed().as_millis() as u64);
        }
        r
    };
    let mode = Mode::from(*mode);
    match suite {
        SuiteArg::Axioms => {
            let axioms = match axioms {
                None => Axiom::ALL.to_vec(),
                Some(list) => list
                    .split(',')
                    .map(|a| Axiom::parse(a.trim()).ok_or_else(|| usage(format!("unknown axiom `{a}`"))))
                    .collect::<Result<_, _>>()?,
            };
            let r = stamp(run_axiom_suite(&grid(ctx, grid_name, mode, pool_spec)?, &axioms)?);
            let passed = r.passed();
            Ok(Output::verdict(r, passed))
        }
        SuiteArg::Labels => {
            let mut r = VerificationReport::new("labels");
            for spec in grid(ctx, grid_name, mode, pool_spec)? {
                let inst = spec.instance()?;
                let p = spec.pool.build(&inst)?;
                let at = GridPoint {
                    universe: inst.universe(),
                    kappa: inst.kappa(),
                    variant: inst.variant,
                    mode: inst.mode,
                    pool: p.description.clone(),
                    complete: p.complete,
                };
                r.merge(label_property_suite(&inst, &p.families), Some(&at));
            }
            let r = stamp(r);
            let passed = r.passed();
            Ok(Output::verdict(r, passed))
        }
        SuiteArg::Mutations => {
            let found = detect_mutations(&grid(ctx, grid_name, mode, pool_spec)?)?;
            let all = found.iter().all(|m| m.detected);
            Ok(Output::verdict(json!({ "suite": "mutations", "all_detected": all, "mutations": found }), all))
        }
        SuiteArg::Equivariance => {
            let r = stamp(equivariance_suite(&grid(ctx, grid_name, mode, pool_spec)?, *trials, *seed)?);
            let passed = r.passed();
            Ok(Output::verdict(r, passed))
        }
        SuiteArg::M5 => {
            let (inst, _) = ctx.instance()?;
            let found = find_m5_counterexample_st(&inst, *budget)?;
            let clean = found.triangle.is_none();
            Ok(Output::verdict(found, clean))
        }
        SuiteArg::Measurable => {
            let (inst, _) = ctx.instance()?;
            let p = pool(pool_spec.as_deref().unwrap_or("exhaustive"), &inst)?;
            let r = stamp(check_measurable_equivalences(&inst, &p));
            let passed = r.passed();
            Ok(Output::verdict(r, passed))
        }
        SuiteArg::Claim2 => {
            let (inst, family) = ctx.instance()?;
            let y = ctx.object(&inst, &family, object)?;
            let out = check_claim2_closure(&inst, &y, bound.unwrap_or(inst.kappa()))?;
            let passed = out.report.passed();
            Ok(Output::verdict(out, passed))
        }
    }
}
