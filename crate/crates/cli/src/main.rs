//! `gaugeint`: command-line front end for the gaugeint library.
//!
//! Every subcommand writes one JSON document to stdout (or CSV with
//! `--format csv`). Failures write `{"error": {"code", "message"}}` to stderr
//! and exit with 1 for usage errors or 2 for library contract errors.

mod expr;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaugeint::fan::transfer_gauges;
use gaugeint::integrator::{default_probes, fine_sum};
use gaugeint::lindelof::{lorentzian_gauge, wellfounded_direct, xi_witness};
use gaugeint::{
    cover_to_partition, cover_transfer_inv, finite_subcover_with, fine_partition_with, find_uncovered, gauge_integrate,
    hake_limit, min_gauge, riemann_integrate, riemann_sum, theta, verify_cover, verify_scf, wellfounded_via_xi, Builtin,
    CantorFunctional, CountableSubcover, FiniteTree, Gauge, GaugeModulus, GaugeOptions, HakeOptions,
    HakeOutcome, IntegralResult, Interval, OpenInterval, PartitionOptions, Rational, RealFn, Tag, TagStrategy,
};
use serde_json::{json, Value};

use expr::{parse_expr, ParseError};

#[derive(Parser)]
#[command(name = "gaugeint", version, about = "Gauge integrals, fine partitions and covering-lemma realisers")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    /// Maximum bisection depth of the partitioner.
    #[arg(long, global = true, env = "GAUGEINT_DEPTH_CAP", default_value_t = 64)]
    depth_cap: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Gauge integral along ε = 2^-n until ε ≤ eps-min.
    Integrate(IntegrateArgs),
    /// Riemann integral on dyadic midpoint grids.
    Riemann(RiemannArgs),
    /// A δ-fine tagged partition of the target.
    Partition(PartitionArgs),
    /// A finite subcover of the gauge cover of the target.
    Subcover(SubcoverArgs),
    /// Decide whether open intervals cover the target.
    VerifyCover(VerifyCoverArgs),
    /// Improper Riemann limit at 0 along the probes 4^-n.
    Hake(HakeArgs),
    /// Θ for a functional on Cantor space, verified exhaustively.
    Fan(FanArgs),
    /// Blockwise countable subcover of a gauge cover of the reals.
    Lindelof(LindelofArgs),
    /// Well-foundedness of a finite tree through the enumeration.
    Wellfounded(WellfoundedArgs),
    /// Riemann sums for two moduli and for their pointwise minimum.
    Compare(CompareArgs),
}

#[derive(Args)]
struct FnArgs {
    /// Builtin name (sqrt_recip, dirichlet, kappa, recip, poly, step) or an expression in x.
    #[arg(long = "fn")]
    function: String,
    /// Coefficients c0,c1,… for `--fn poly`.
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
    /// Break points for `--fn step`.
    #[arg(long, allow_hyphen_values = true)]
    breaks: Option<String>,
    /// Values for `--fn step` (one more than the breaks).
    #[arg(long, allow_hyphen_values = true)]
    values: Option<String>,
}

#[derive(Args)]
struct TargetArgs {
    /// Interval endpoints, exact (e.g. `0`, `1/3`, `sqrt2/2`).
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true, default_values = ["0", "1"])]
    target: Vec<String>,
}

#[derive(Args)]
struct GaugeArgs {
    /// Gauge expression in x (and eps when --eps is given).
    #[arg(long)]
    gauge: Option<String>,
    /// Use the builtin modulus of this function at --eps.
    #[arg(long, conflicts_with = "gauge")]
    modulus_of: Option<String>,
    /// ε for --modulus-of or for `eps` in --gauge.
    #[arg(long)]
    eps: Option<String>,
    /// Candidate tag order.
    #[arg(long, value_enum, default_value_t = StrategyName::Default)]
    strategy: StrategyName,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyName {
    Default,
    IrrationalFirst,
}

#[derive(Args)]
struct IntegrateArgs {
    #[command(flatten)]
    f: FnArgs,
    #[command(flatten)]
    target: TargetArgs,
    /// `builtin` or a gauge expression in x and eps.
    #[arg(long, default_value = "builtin")]
    modulus: String,
    #[arg(long, default_value_t = 1e-3)]
    eps_min: f64,
    /// Items per partition before giving up on a level (0: unlimited).
    #[arg(long, default_value_t = 4_000_000)]
    budget: u64,
    #[arg(long, value_enum, default_value_t = StrategyName::Default)]
    strategy: StrategyName,
}

#[derive(Args)]
struct RiemannArgs {
    #[command(flatten)]
    f: FnArgs,
    #[command(flatten)]
    target: TargetArgs,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args)]
struct PartitionArgs {
    #[command(flatten)]
    gauge: GaugeArgs,
    #[command(flatten)]
    target: TargetArgs,
    /// Also report the Riemann sum of this function over the partition.
    #[arg(long = "sum-of")]
    sum_of: Option<String>,
}

#[derive(Args)]
struct SubcoverArgs {
    #[command(flatten)]
    gauge: GaugeArgs,
    #[command(flatten)]
    target: TargetArgs,
}

#[derive(Args)]
struct VerifyCoverArgs {
    #[command(flatten)]
    target: TargetArgs,
    /// Open intervals, e.g. `(-0.1,0.6),(0.5,1.1)`.
    #[arg(long, allow_hyphen_values = true)]
    intervals: String,
}

#[derive(Args)]
struct HakeArgs {
    #[command(flatten)]
    f: FnArgs,
    /// Number of probes 4^-1, …, 4^-n.
    #[arg(long, default_value_t = 10)]
    probes: u32,
    #[arg(long, default_value_t = 1e-2)]
    tol: f64,
}

#[derive(Args)]
struct FanArgs {
    /// `const:C`, `one_plus_first`, `first_one:B`, `weight:B`, or
    /// `transfer:N` for the functional of the N-th shipped transfer gauge.
    #[arg(long)]
    functional: String,
    /// Depth of the exhaustive check (default: the least admissible).
    #[arg(long)]
    depth: Option<u32>,
}

#[derive(Args)]
struct LindelofArgs {
    /// Gauge expression in x, or `lorentzian` for 1/(1 + x^2).
    #[arg(long, default_value = "lorentzian")]
    gauge: String,
    /// Blocks [-N, N] for N = 1..=n-max.
    #[arg(long, default_value_t = 3)]
    n_max: u32,
}

#[derive(Args)]
struct WellfoundedArgs {
    /// Tree nodes as comma-separated entries; repeat the flag (the root is implicit).
    #[arg(long = "node")]
    nodes: Vec<String>,
    #[arg(long, default_value_t = 2)]
    branching: u32,
    #[arg(long, default_value_t = 3)]
    depth: u32,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    f: FnArgs,
    /// Exact ε.
    #[arg(long)]
    eps: String,
    /// The second modulus is the builtin one scaled by this factor.
    #[arg(long, default_value = "1/2")]
    scale: String,
    /// Items per partition (0: unlimited).
    #[arg(long, default_value_t = 4_000_000)]
    budget: u64,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{flag}: {source}")]
    Parse { flag: &'static str, source: ParseError },
    #[error(transparent)]
    Lib(#[from] gaugeint::Error),
}

impl CliError {
    fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "E_USAGE",
            CliError::Parse { .. } => "E_PARSE",
            CliError::Lib(e) => e.code(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } => 1,
            CliError::Lib(_) => 2,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// A command result: the JSON document and its CSV rendering.
struct Report {
    json: Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Report {
    /// A one-row CSV of the scalar fields of `json`, in `header` order.
    fn scalar(json: Value, header: Vec<&'static str>) -> Report {
        let row = header.iter().map(|k| cell(&json[*k])).collect();
        Report { json, header, rows: vec![row] }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// An exact point of ℚ(√2): rationals, decimals and forms like `1 - sqrt2/2`.
fn parse_point(flag: &'static str, s: &str) -> CliResult<Tag> {
    let e = parse_expr(s, false).map_err(|source| CliError::Parse { flag, source })?;
    if !e.is_exact() || !e.is_constant() {
        return Err(usage(format!("{flag}: {s:?} is not an exact constant of the form r + s*sqrt2")));
    }
    Ok(e.eval_exact(&Tag::zero(), None)?)
}

fn parse_rational(flag: &'static str, s: &str) -> CliResult<Rational> {
    parse_point(flag, s)?
        .as_rational()
        .cloned()
        .ok_or_else(|| usage(format!("{flag}: {s:?} must be rational")))
}

fn parse_list(flag: &'static str, s: &str) -> CliResult<Vec<Rational>> {
    s.split(',').map(|p| parse_rational(flag, p.trim())).collect()
}

fn target(t: &TargetArgs) -> CliResult<Interval> {
    let lo = parse_point("--target", &t.target[0])?;
    let hi = parse_point("--target", &t.target[1])?;
    Interval::new(lo.clone(), hi.clone()).ok_or_else(|| usage(format!("--target: {lo} exceeds {hi}")))
}

/// A builtin when the name is one, else `None`.
fn builtin(f: &FnArgs) -> CliResult<Option<Builtin>> {
    fn need<'a>(v: &'a Option<String>, name: &str, flag: &'static str) -> CliResult<&'a str> {
        v.as_deref().ok_or_else(|| usage(format!("--fn {name} needs {flag}")))
    }
    Ok(match f.function.as_str() {
        "poly" => Some(Builtin::Poly(parse_list("--coeffs", need(&f.coeffs, "poly", "--coeffs")?)?)),
        "step" => Some(Builtin::step(
            parse_list("--breaks", need(&f.breaks, "step", "--breaks")?)?,
            parse_list("--values", need(&f.values, "step", "--values")?)?,
        )?),
        name => Builtin::by_name(name).ok(),
    })
}

fn function(f: &FnArgs) -> CliResult<(RealFn, Option<Builtin>)> {
    if let Some(b) = builtin(f)? {
        return Ok((b.function(), Some(b)));
    }
    let e = parse_expr(&f.function, false).map_err(|source| CliError::Parse { flag: "--fn", source })?;
    Ok((e.to_function(), None))
}

fn strategy(s: StrategyName) -> TagStrategy {
    match s {
        StrategyName::Default => TagStrategy::default(),
        StrategyName::IrrationalFirst => TagStrategy::irrational_first(),
    }
}

fn modulus(spec: &str, b: Option<&Builtin>, target: &Interval) -> CliResult<GaugeModulus> {
    if spec == "builtin" {
        let b = b.ok_or_else(|| usage("--modulus builtin needs a builtin --fn"))?;
        return Ok(b.modulus(target)?);
    }
    let e = parse_expr(spec, true).map_err(|source| CliError::Parse { flag: "--modulus", source })?;
    Ok(GaugeModulus::new(e.to_string(), move |eps| e.to_gauge(Some(eps))))
}

fn gauge(g: &GaugeArgs, target: &Interval) -> CliResult<Gauge> {
    let eps = g.eps.as_deref().map(|s| parse_rational("--eps", s)).transpose()?;
    if let Some(eps) = &eps {
        if !eps.is_positive() {
            return Err(usage("--eps must be positive"));
        }
    }
    match (&g.gauge, &g.modulus_of) {
        (Some(s), None) => {
            let e = parse_expr(s, eps.is_some()).map_err(|source| CliError::Parse { flag: "--gauge", source })?;
            Ok(e.to_gauge(eps.as_ref()))
        }
        (None, Some(name)) => {
            let eps = eps.ok_or_else(|| usage("--modulus-of needs --eps"))?;
            Ok(Builtin::by_name(name)?.modulus(target)?.at(&eps)?)
        }
        _ => Err(usage("give --gauge or --modulus-of")),
    }
}

fn integral_json(r: &IntegralResult) -> Value {
    json!({
        "value": r.value,
        "error_bound": r.error_bound,
        "partitions_used": r.partitions_used,
        "finest_mesh": r.finest_mesh.to_string(),
        "converged": r.converged,
        "items": r.items,
    })
}

const INTEGRAL_FIELDS: [&str; 6] = ["value", "error_bound", "partitions_used", "finest_mesh", "converged", "items"];

fn budget(b: u64) -> Option<u64> {
    (b > 0).then_some(b)
}

fn integrate(a: &IntegrateArgs, depth_cap: u32) -> CliResult<Report> {
    let target = target(&a.target)?;
    let (f, b) = function(&a.f)?;
    let phi = modulus(&a.modulus, b.as_ref(), &target)?;
    let mut opts = GaugeOptions::new(a.eps_min).depth_cap(depth_cap).strategy(strategy(a.strategy));
    if let Some(b) = budget(a.budget) {
        opts = opts.budget(b);
    }
    let r = gauge_integrate(&f, &phi, &target, &opts)?;
    Ok(Report::scalar(integral_json(&r), INTEGRAL_FIELDS.to_vec()))
}

fn riemann(a: &RiemannArgs) -> CliResult<Report> {
    let target = target(&a.target)?;
    let (f, _) = function(&a.f)?;
    let r = riemann_integrate(&f, &target, a.tol)?;
    Ok(Report::scalar(integral_json(&r), INTEGRAL_FIELDS.to_vec()))
}

fn partition(a: &PartitionArgs, depth_cap: u32) -> CliResult<Report> {
    let target = target(&a.target)?;
    let delta = gauge(&a.gauge, &target)?;
    let p = fine_partition_with(&delta, &target, &strategy(a.gauge.strategy), &PartitionOptions::with_depth_cap(depth_cap))?;
    let value = match &a.sum_of {
        Some(s) => {
            let fa = FnArgs { function: s.clone(), coeffs: None, breaks: None, values: None };
            Some(riemann_sum(&function(&fa)?.0, &p)?)
        }
        None => None,
    };
    let rows: Vec<Vec<String>> = p
        .items()
        .iter()
        .map(|it| vec![it.tag.to_string(), it.interval.lo().to_string(), it.interval.hi().to_string()])
        .collect();
    let json = json!({
        "items": rows.iter().map(|r| json!({"tag": r[0], "lo": r[1], "hi": r[2]})).collect::<Vec<_>>(),
        "count": p.len(),
        "finest_mesh": gaugeint::mesh(&p)?.to_string(),
        "value": value,
    });
    Ok(Report { json, header: vec!["tag", "lo", "hi"], rows })
}

fn subcover(a: &SubcoverArgs, depth_cap: u32) -> CliResult<Report> {
    let target = target(&a.target)?;
    let psi = gauge(&a.gauge, &target)?;
    let sc = finite_subcover_with(&psi, &target, &strategy(a.gauge.strategy), depth_cap)?;
    // The partition built back from the cover is a consistency check.
    cover_to_partition(&sc)?;
    let centers: Vec<String> = sc.centers().iter().map(Tag::to_string).collect();
    let radii: Vec<String> = sc.radii().iter().map(Rational::to_string).collect();
    let rows = centers.iter().zip(&radii).map(|(c, r)| vec![c.clone(), r.clone()]).collect();
    let json = json!({
        "centers": centers,
        "radii": radii,
        "covers": verify_cover(&sc.intervals(), &target),
    });
    Ok(Report { json, header: vec!["center", "radius"], rows })
}

/// `(a,b),(c,d),…` with exact endpoints.
fn parse_intervals(s: &str) -> CliResult<Vec<OpenInterval>> {
    let bad = |m: &str| usage(format!("--intervals: {m}"));
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        rest = rest.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
        let mut depth = 0usize;
        let mut comma = None;
        let mut close = None;
        for (i, c) in rest.char_indices() {
            match c {
                '(' => depth += 1,
                ')' if depth == 0 => {
                    close = Some(i);
                    break;
                }
                ')' => depth -= 1,
                ',' if depth == 0 && comma.is_none() => comma = Some(i),
                _ => {}
            }
        }
        let close = close.ok_or_else(|| bad("unbalanced parentheses"))?;
        let comma = comma.filter(|&c| c < close).ok_or_else(|| bad("an interval needs two endpoints"))?;
        let lo = parse_point("--intervals", &rest[..comma])?;
        let hi = parse_point("--intervals", &rest[comma + 1..close])?;
        out.push(OpenInterval::new(lo, hi));
        rest = rest[close + 1..].trim_start();
        if let Some(r) = rest.strip_prefix(',') {
            rest = r.trim_start();
            if rest.is_empty() {
                return Err(bad("trailing comma"));
            }
        } else if !rest.is_empty() {
            return Err(bad("expected ',' between intervals"));
        }
    }
    Ok(out)
}

fn verify_cover_cmd(a: &VerifyCoverArgs) -> CliResult<Report> {
    let target = target(&a.target)?;
    let intervals = parse_intervals(&a.intervals)?;
    let witness = find_uncovered(&intervals, &target).map(|t| t.to_string());
    let json = json!({ "covers": witness.is_none(), "uncovered": witness });
    Ok(Report::scalar(json, vec!["covers", "uncovered"]))
}

fn hake(a: &HakeArgs) -> CliResult<Report> {
    if a.probes < 2 {
        return Err(usage("--probes must be at least 2"));
    }
    let (f, _) = function(&a.f)?;
    let opts = HakeOptions { tol: a.tol, ..HakeOptions::default() };
    let out = hake_limit(&f, &default_probes(a.probes), &opts)?;
    let (value, bound, converged) = match &out {
        HakeOutcome::Converged { result, .. } => (Some(result.value), Some(result.error_bound), true),
        _ => (None, None, false),
    };
    let outcome = match out {
        HakeOutcome::Converged { .. } => "converged",
        HakeOutcome::Divergent { .. } => "divergent",
        HakeOutcome::Inconclusive { .. } => "inconclusive",
    };
    let json = json!({
        "diverges": out.diverges(),
        "converged": converged,
        "outcome": outcome,
        "value": value,
        "error_bound": bound,
        "partials": out.partials(),
    });
    let rows = out.partials().iter().enumerate().map(|(i, p)| vec![(i + 1).to_string(), p.to_string()]).collect();
    Ok(Report { json, header: vec!["probe", "partial"], rows })
}

fn functional(spec: &str) -> CliResult<CantorFunctional> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => {
            let v: u32 = a.parse().map_err(|_| usage(format!("--functional: {a:?} is not a natural number")))?;
            (n, Some(v))
        }
        None => (spec, None),
    };
    let missing = || usage(format!("--functional {name} needs an argument, e.g. {name}:2"));
    Ok(match name {
        "const" => CantorFunctional::constant(arg.ok_or_else(missing)?),
        "one_plus_first" => CantorFunctional::one_plus_first(),
        "first_one" => CantorFunctional::first_one(arg.ok_or_else(missing)?),
        "weight" => CantorFunctional::weight(arg.ok_or_else(missing)?),
        "transfer" => {
            let gauges = transfer_gauges();
            let i = arg.ok_or_else(missing)? as usize;
            let g = gauges
                .get(i)
                .ok_or_else(|| usage(format!("--functional transfer:{i}: only {} transfer gauges", gauges.len())))?;
            cover_transfer_inv(g, 64)
        }
        other => {
            return Err(usage(format!(
                "unknown functional {other:?} (known: const, one_plus_first, first_one, weight, transfer)"
            )))
        }
    })
}

fn fan(a: &FanArgs, depth_cap: u32) -> CliResult<Report> {
    let g = functional(&a.functional)?;
    let seqs = theta(&g, depth_cap)?;
    let mut least = g.bound().unwrap_or(0);
    for s in &seqs {
        least = least.max(g.eval(s)?);
    }
    let depth = a.depth.unwrap_or(least);
    let covers = verify_scf(&seqs, &g, depth)?;
    let names: Vec<String> = seqs.iter().map(|s| s.to_string()).collect();
    let rows = names.iter().map(|s| vec![s.clone()]).collect();
    let json = json!({ "functional": g.name(), "sequences": names, "depth": depth, "covers": covers });
    Ok(Report { json, header: vec!["sequence"], rows })
}

fn lindelof(a: &LindelofArgs, depth_cap: u32) -> CliResult<Report> {
    if a.n_max == 0 {
        return Err(usage("--n-max must be at least 1"));
    }
    let psi = if a.gauge == "lorentzian" {
        lorentzian_gauge()
    } else {
        parse_expr(&a.gauge, false).map_err(|source| CliError::Parse { flag: "--gauge", source })?.to_gauge(None)
    };
    let mut cs: CountableSubcover = gaugeint::countable_subcover_reals(&psi, a.n_max, depth_cap);
    let mut indices = Vec::new();
    let mut covers = true;
    for n in 1..=a.n_max {
        indices.push(cs.block_indices(n)?.to_vec());
        let iv = Interval::rational(Rational::from_integer(-(n as i64)), Rational::from_integer(n as i64))
            .expect("ordered");
        covers &= verify_cover(&cs.block_intervals(n)?, &iv);
    }
    let entries = cs.entries();
    let centers: Vec<String> = entries.iter().map(|e| e.center.to_string()).collect();
    let radii: Vec<String> = entries.iter().map(|e| e.radius.to_string()).collect();
    let mut rows = Vec::new();
    for (n, idx) in indices.iter().enumerate() {
        for &i in idx {
            rows.push(vec![(n + 1).to_string(), i.to_string(), centers[i].clone(), radii[i].clone()]);
        }
    }
    let json = json!({ "centers": centers, "radii": radii, "indices": indices, "covers": covers });
    Ok(Report { json, header: vec!["block", "index", "center", "radius"], rows })
}

fn wellfounded(a: &WellfoundedArgs) -> CliResult<Report> {
    let mut nodes = vec![Vec::new()];
    for s in &a.nodes {
        let node: Vec<u32> = s
            .split(',')
            .map(|p| p.trim().parse().map_err(|_| usage(format!("--node: {p:?} is not a natural number"))))
            .collect::<CliResult<_>>()?;
        if node.iter().any(|&x| x >= a.branching) || node.len() > a.depth as usize {
            return Err(usage(format!("--node {s}: outside branching {} and depth {}", a.branching, a.depth)));
        }
        nodes.push(node);
    }
    let tree = FiniteTree::from_nodes(a.branching, a.depth, nodes);
    if !tree.is_prefix_closed() {
        return Err(usage("--node: the nodes are not closed under prefixes"));
    }
    let via_xi = wellfounded_via_xi(&tree)?;
    let witness = xi_witness(&tree)?.map(|w| w.initial(a.depth as usize));
    let json = json!({
        "wellfounded": via_xi,
        "direct": wellfounded_direct(&tree),
        "witness": witness,
    });
    Ok(Report::scalar(json, vec!["wellfounded", "direct", "witness"]))
}

fn compare(a: &CompareArgs, depth_cap: u32) -> CliResult<Report> {
    let target = Interval::unit();
    let (f, b) = function(&a.f)?;
    let b = b.ok_or_else(|| usage("compare needs a builtin --fn"))?;
    let eps = parse_rational("--eps", &a.eps)?;
    let k = parse_rational("--scale", &a.scale)?;
    if !eps.is_positive() || !k.is_positive() {
        return Err(usage("--eps and --scale must be positive"));
    }
    let phi = b.modulus(&target)?;
    let d1 = phi.at(&eps)?;
    let d2 = phi.scaled(k).at(&eps)?;
    let opts = PartitionOptions { depth_cap, budget: budget(a.budget), strict: false };
    let s = TagStrategy::default();
    let (i1, _, _) = fine_sum(&f, &d1, &target, &s, &opts)?;
    let (i2, _, _) = fine_sum(&f, &d2, &target, &s, &opts)?;
    let (m, _, _) = fine_sum(&f, &min_gauge(&d1, &d2), &target, &s, &opts)?;
    let bound = 4.0 * eps.to_f64();
    let json = json!({
        "value": m,
        "values": [i1, i2],
        "difference": (i1 - i2).abs(),
        "error_bound": bound,
        "agree": (i1 - i2).abs() <= bound,
    });
    Ok(Report::scalar(json, vec!["value", "difference", "error_bound", "agree"]))
}

fn run(cli: &Cli) -> CliResult<Report> {
    let d = cli.depth_cap;
    if d == 0 {
        return Err(usage("--depth-cap must be at least 1"));
    }
    match &cli.command {
        Command::Integrate(a) => integrate(a, d),
        Command::Riemann(a) => riemann(a),
        Command::Partition(a) => partition(a, d),
        Command::Subcover(a) => subcover(a, d),
        Command::VerifyCover(a) => verify_cover_cmd(a),
        Command::Hake(a) => hake(a),
        Command::Fan(a) => fan(a, d),
        Command::Lindelof(a) => lindelof(a, d),
        Command::Wellfounded(a) => wellfounded(a),
        Command::Compare(a) => compare(a, d),
    }
}

fn write_report(r: &Report, format: Format) -> std::io::Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &r.json)?;
            writeln!(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&r.header)?;
            for row in &r.rows {
                w.write_record(row)?;
            }
            w.flush()
        }
    }
}

fn fail(code: &str, message: &str, exit: u8) -> ExitCode {
    let doc = json!({ "error": { "code": code, "message": message } });
    eprintln!("{doc}");
    ExitCode::from(exit)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return fail("E_USAGE", e.to_string().trim(), 1);
        }
    };
    match run(&cli) {
        Ok(r) => match write_report(&r, cli.format) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail("E_IO", &e.to_string(), 1),
        },
        Err(e) => fail(e.code(), &e.to_string(), e.exit_code()),
    }
}
