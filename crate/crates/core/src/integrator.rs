//! Riemann and gauge integration, the Cauchy-gap experiment, Hake limits and
//! additivity over a split point.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cousin::{visit_fine_partition, Candidate, PartitionOptions, TagStrategy};
use crate::error::{Error, Result};
use crate::gauge::{split_gauge, Gauge, GaugeModulus};
use crate::rational::Rational;
use crate::realfn::{Accumulator, RealFn};
use crate::tag::{Interval, Tag};

/// An integral value with its error bound and bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub error_bound: f64,
    /// Number of partitions whose Riemann sums were computed.
    pub partitions_used: u64,
    /// Smallest mesh among the partitions used.
    pub finest_mesh: Tag,
    pub converged: bool,
    /// Items in the partition that produced `value`.
    pub items: u64,
}

/// Riemann sums on dyadic grids: at level `n` the cells are
/// `[max(lo, j/2^n), min(hi, (j+1)/2^n)]` with midpoint tags.
#[derive(Clone, Debug)]
pub struct RiemannOptions {
    pub n_max: u32,
}

impl Default for RiemannOptions {
    fn default() -> Self {
        RiemannOptions { n_max: 22 }
    }
}

/// `riemann_integrate_with` under default options.
pub fn riemann_integrate(f: &RealFn, target: &Interval, tol: f64) -> Result<IntegralResult> {
    riemann_integrate_with(f, target, tol, &RiemannOptions::default())
}

/// Doubles the grid resolution until two consecutive gaps are below `tol/2`.
pub fn riemann_integrate_with(
    f: &RealFn,
    target: &Interval,
    tol: f64,
    opts: &RiemannOptions,
) -> Result<IntegralResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if target.length().is_zero() {
        return Ok(IntegralResult {
            value: 0.0,
            error_bound: 0.0,
            partitions_used: 0,
            finest_mesh: Tag::zero(),
            converged: true,
            items: 0,
        });
    }
    let mut sums: Vec<f64> = Vec::new();
    let mut last = (0.0, Tag::zero(), 0u64);
    for n in 0..=opts.n_max {
        last = grid_sum(f, target, n)?;
        sums.push(last.0);
        let k = sums.len();
        if k >= 3 {
            let g1 = (sums[k - 1] - sums[k - 2]).abs();
            let g2 = (sums[k - 2] - sums[k - 3]).abs();
            if g1 < tol / 2.0 && g2 < tol / 2.0 {
                return Ok(IntegralResult {
                    value: last.0,
                    error_bound: g1.max(g2),
                    partitions_used: k as u64,
                    finest_mesh: last.1,
                    converged: true,
                    items: last.2,
                });
            }
        }
    }
    let k = sums.len();
    let gap = if k >= 2 { (sums[k - 1] - sums[k - 2]).abs() } else { f64::INFINITY };
    Ok(IntegralResult {
        value: last.0,
        error_bound: gap,
        partitions_used: k as u64,
        finest_mesh: last.1,
        converged: false,
        items: last.2,
    })
}

/// Sum, exact mesh and cell count of the level-`n` grid partition.
fn grid_sum(f: &RealFn, target: &Interval, n: u32) -> Result<(f64, Tag, u64)> {
    let scale = Rational::pow2(n);
    let inv = Rational::pow2_neg(n);
    let j0 = target.lo().scale(&scale).floor();
    let hi_scaled = target.hi().scale(&scale);
    let mut j1 = hi_scaled.floor();
    if Tag::rational(Rational::from_big(j1.clone(), 1.into())) == hi_scaled {
        j1 -= 1;
    }
    // cells j0..=j1
    let count: u64 = (&j1 - &j0 + 1u32).try_into().map_err(|_| Error::BudgetExceeded(u64::MAX))?;
    let cell = |j: &num_bigint::BigInt| -> Interval {
        let a = Tag::rational(&Rational::from_big(j.clone(), 1.into()) * &inv);
        let b = a.add_rational(&inv);
        Interval::new(a.max(target.lo().clone()), b.min(target.hi().clone())).expect("grid cell")
    };
    let first = cell(&j0);
    let last = cell(&j1);
    let mut mesh = first.length().max(last.length());
    if count > 2 {
        mesh = mesh.max(Tag::rational(inv.clone()));
    }

    let mut acc = Accumulator::default();
    let exact_cell = |iv: &Interval| -> Result<f64> {
        let t = iv.midpoint();
        let v = f.eval(&t)?;
        if !v.is_finite() {
            return Err(Error::Undefined { tag: t, reason: format!("value {v}") });
        }
        Ok(v * iv.length().to_f64())
    };
    if count == 1 {
        acc.add(exact_cell(&first)?);
        return Ok((acc.value(), mesh, count));
    }
    acc.add(exact_cell(&first)?);
    if f.has_fast_path() {
        let h = inv.to_f64();
        let base: f64 = num_traits::ToPrimitive::to_f64(&j0).unwrap_or(f64::NAN);
        let mut j = &j0 + 1u32;
        let mut idx = 1u64;
        while j < j1 {
            let x = (base + idx as f64 + 0.5) * h;
            match f.eval_f64(x) {
                Some(v) if v.is_finite() => acc.add(v * h),
                _ => acc.add(exact_cell(&cell(&j))?),
            }
            j += 1u32;
            idx += 1;
        }
    } else {
        let mut j = &j0 + 1u32;
        while j < j1 {
            acc.add(exact_cell(&cell(&j))?);
            j += 1u32;
        }
    }
    acc.add(exact_cell(&last)?);
    Ok((acc.value(), mesh, count))
}

/// Settings for [`gauge_integrate`].
#[derive(Clone, Debug)]
pub struct GaugeOptions {
    /// Stop once `ε_n = 2^{−n}` is at most this value.
    pub eps_min: f64,
    pub strategy: TagStrategy,
    pub depth_cap: u32,
    /// Item budget per partition.
    pub budget: Option<u64>,
}

impl GaugeOptions {
    pub fn new(eps_min: f64) -> Self {
        GaugeOptions { eps_min, strategy: TagStrategy::default(), depth_cap: 64, budget: None }
    }

    pub fn depth_cap(mut self, d: u32) -> Self {
        self.depth_cap = d;
        self
    }

    pub fn budget(mut self, b: u64) -> Self {
        self.budget = Some(b);
        self
    }

    pub fn strategy(mut self, s: TagStrategy) -> Self {
        self.strategy = s;
        self
    }
}

/// Riemann sum over one streamed δ-fine partition, with its item count and mesh.
pub fn fine_sum(
    f: &RealFn,
    delta: &Gauge,
    target: &Interval,
    strategy: &TagStrategy,
    opts: &PartitionOptions,
) -> Result<(f64, u64, Tag)> {
    let mut acc = Accumulator::default();
    let stats = visit_fine_partition(delta, target, strategy, opts, |it| {
        let v = f.eval(&it.tag)?;
        if !v.is_finite() {
            return Err(Error::Undefined { tag: it.tag, reason: format!("value {v}") });
        }
        acc.add(v * it.interval.length().to_f64());
        Ok(())
    })?;
    Ok((acc.value(), stats.items, stats.mesh))
}

/// `S(f, Q_n)` for `Φ(2^{−n})`-fine partitions `Q_n`, `n = 0, 1, …` until
/// `2^{−n} ≤ eps_min`; the error bound is `2·ε_last`.
///
/// If the partitioner fails at some level, the deepest successful level is
/// reported with `converged = false`. If even `ε = 1` fails, the error is returned.
pub fn gauge_integrate(
    f: &RealFn,
    phi: &GaugeModulus,
    target: &Interval,
    opts: &GaugeOptions,
) -> Result<IntegralResult> {
    if opts.eps_min.is_nan() || opts.eps_min <= 0.0 {
        return Err(Error::InvalidArgument(format!("eps_min must be positive, got {}", opts.eps_min)));
    }
    let popts = PartitionOptions { depth_cap: opts.depth_cap, budget: opts.budget, strict: false };
    let mut best: Option<IntegralResult> = None;
    let mut n = 0u32;
    loop {
        let eps = Rational::pow2_neg(n);
        let delta = phi.at(&eps)?;
        match fine_sum(f, &delta, target, &opts.strategy, &popts) {
            Ok((value, items, mesh)) => {
                let finest = match &best {
                    Some(b) => b.finest_mesh.clone().min(mesh),
                    None => mesh,
                };
                best = Some(IntegralResult {
                    value,
                    error_bound: 2.0 * eps.to_f64(),
                    partitions_used: n as u64 + 1,
                    finest_mesh: finest,
                    converged: false,
                    items,
                });
            }
            Err(e) => {
                return match best {
                    Some(b) => Ok(b),
                    None => Err(e),
                };
            }
        }
        if eps.to_f64() <= opts.eps_min {
            let mut r = best.expect("just set");
            r.converged = true;
            return Ok(r);
        }
        n += 1;
    }
}

/// Outcome of [`cauchy_gap`].
#[derive(Clone, Debug, PartialEq)]
pub struct CauchyGap {
    /// `max − min` of the sums, i.e. the largest pairwise difference.
    pub gap: f64,
    pub sums: Vec<f64>,
    pub items: Vec<u64>,
}

/// Settings for [`cauchy_gap`].
#[derive(Clone, Debug)]
pub struct CauchyOptions {
    pub trials: usize,
    pub seed: u64,
    pub depth_cap: u32,
    pub budget: Option<u64>,
    pub max_min_depth: u32,
    pub target: Interval,
}

impl CauchyOptions {
    pub fn new(trials: usize, seed: u64) -> Self {
        CauchyOptions { trials, seed, depth_cap: 64, budget: None, max_min_depth: 8, target: Interval::unit() }
    }
}

/// A seeded variation of the default strategy: candidate order, irrational
/// offset, forced minimum depth and split jitter.
pub fn random_strategy(rng: &mut impl Rng, max_min_depth: u32) -> TagStrategy {
    let mut order = Candidate::ALL.to_vec();
    order.shuffle(rng);
    let offsets = [Rational::new(1, 8), Rational::new(1, 5), Rational::new(1, 4), Rational::new(1, 7), Rational::new(3, 16)];
    let off = offsets.choose(rng).expect("non-empty").clone();
    let s = TagStrategy::new(order)
        .with_offset(off)
        .expect("offsets are valid")
        .with_min_depth(rng.gen_range(0..=max_min_depth));
    // Jitter varies constant-gauge partitions, but cells then straddle the
    // dyadic block points of κ-like gauges, so only half the strategies use it.
    if rng.gen_bool(0.5) {
        s.with_jitter(rng.gen())
    } else {
        s
    }
}

/// Riemann sums of `trials` pairwise distinct `Φ(ε)`-fine partitions; the
/// first uses the default strategy, the rest seeded variations of it.
pub fn cauchy_gap(f: &RealFn, phi: &GaugeModulus, eps: &Rational, opts: &CauchyOptions) -> Result<CauchyGap> {
    if opts.trials < 2 {
        return Err(Error::InvalidArgument("cauchy_gap needs at least 2 trials".into()));
    }
    let delta = phi.at(eps)?;
    let popts = PartitionOptions { depth_cap: opts.depth_cap, budget: opts.budget, strict: false };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut seen = HashSet::new();
    let mut tried = HashSet::new();
    let mut sums = Vec::new();
    let mut items = Vec::new();
    let attempts = opts.trials * 20;
    for attempt in 0..attempts {
        if sums.len() == opts.trials {
            break;
        }
        let strategy = if attempt == 0 { TagStrategy::default() } else { random_strategy(&mut rng, opts.max_min_depth) };
        let key = format!("{:?}|{}|{}|{:?}", strategy.order(), strategy.offset(), strategy.min_depth(), strategy.jitter());
        if !tried.insert(key) {
            continue;
        }
        let mut h = DefaultHasher::new();
        let mut acc = Accumulator::default();
        let stats = visit_fine_partition(&delta, &opts.target, &strategy, &popts, |it| {
            it.hash(&mut h);
            let v = f.eval(&it.tag)?;
            if !v.is_finite() {
                return Err(Error::Undefined { tag: it.tag, reason: format!("value {v}") });
            }
            acc.add(v * it.interval.length().to_f64());
            Ok(())
        });
        // A jittered variation may need a little more depth than the default
        // search; it is dropped rather than failing the whole comparison.
        let stats = match stats {
            Err(Error::DepthCapExceeded(_)) if attempt > 0 => continue,
            other => other?,
        };
        if seen.insert(h.finish()) {
            sums.push(acc.value());
            items.push(stats.items);
        }
    }
    if sums.len() < opts.trials {
        return Err(Error::Effectivity(format!(
            "only {} distinct fine partitions found in {attempts} attempts",
            sums.len()
        )));
    }
    let max = sums.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = sums.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(CauchyGap { gap: max - min, sums, items })
}

/// Outcome of [`hake_limit`].
#[derive(Clone, Debug, PartialEq)]
pub enum HakeOutcome {
    Converged { result: IntegralResult, partials: Vec<f64> },
    Divergent { partials: Vec<f64> },
    Inconclusive { partials: Vec<f64> },
}

impl HakeOutcome {
    pub fn partials(&self) -> &[f64] {
        match self {
            HakeOutcome::Converged { partials, .. }
            | HakeOutcome::Divergent { partials }
            | HakeOutcome::Inconclusive { partials } => partials,
        }
    }

    pub fn diverges(&self) -> bool {
        matches!(self, HakeOutcome::Divergent { .. })
    }
}

/// Settings for [`hake_limit`].
#[derive(Clone, Debug)]
pub struct HakeOptions {
    pub tol: f64,
    /// Magnitude beyond which monotone partials are declared divergent.
    pub threshold: f64,
    /// Minimum run of monotone partials for either divergence rule.
    pub monotone_run: usize,
    /// Successive increments shrinking by less than this ratio count as non-shrinking.
    pub ratio: f64,
    pub riemann: RiemannOptions,
}

impl Default for HakeOptions {
    fn default() -> Self {
        HakeOptions { tol: 1e-2, threshold: 1e6, monotone_run: 5, ratio: 0.9, riemann: RiemannOptions::default() }
    }
}

/// `x_n = 4^{−n}`, `n = 1..=count`.
pub fn default_probes(count: u32) -> Vec<Tag> {
    (1..=count).map(|n| Tag::rational(Rational::pow2_neg(2 * n))).collect()
}

/// `lim_{x→0+} ∫_x^1 f` along the probes.
///
/// Converged when the last gap and the geometric tail estimate built from the
/// last two gaps are both below `tol`. Divergent when the last
/// `monotone_run` partials move in one direction and either exceed
/// `threshold` in magnitude or have increments that do not shrink.
pub fn hake_limit(f: &RealFn, probes: &[Tag], opts: &HakeOptions) -> Result<HakeOutcome> {
    if probes.len() < 2 {
        return Err(Error::InvalidArgument("hake_limit needs at least 2 probes".into()));
    }
    if probes.windows(2).any(|w| w[1] >= w[0]) || probes.iter().any(|p| p.signum() <= 0 || p >= &Tag::int(1)) {
        return Err(Error::InvalidArgument("probes must decrease strictly inside (0, 1)".into()));
    }
    let inner_tol = opts.tol / 4.0;
    let mut partials = Vec::with_capacity(probes.len());
    let mut last = None;
    for x in probes {
        let iv = Interval::new(x.clone(), Tag::int(1)).expect("x < 1");
        let r = riemann_integrate_with(f, &iv, inner_tol, &opts.riemann)?;
        partials.push(r.value);
        last = Some(r);
    }
    let last = last.expect("non-empty");
    let k = partials.len();
    let d: Vec<f64> = partials.windows(2).map(|w| w[1] - w[0]).collect();

    let run = opts.monotone_run.min(k);
    if run >= 2 && k >= opts.monotone_run {
        let tail = &d[d.len() + 1 - run..];
        let monotone = tail.iter().all(|&x| x > 0.0) || tail.iter().all(|&x| x < 0.0);
        if monotone {
            let huge = partials[k - 1].abs() > opts.threshold;
            let steady = tail.windows(2).all(|w| w[1].abs() >= opts.ratio * w[0].abs());
            if huge || steady {
                return Ok(HakeOutcome::Divergent { partials });
            }
        }
    }

    let g1 = d[d.len() - 1].abs();
    let tail = if d.len() >= 2 {
        let g0 = d[d.len() - 2].abs();
        let rho = if g0 > 0.0 { g1 / g0 } else { 0.0 };
        if rho < 1.0 {
            g1 * rho / (1.0 - rho)
        } else {
            f64::INFINITY
        }
    } else {
        f64::INFINITY
    };
    if g1 < opts.tol && tail < opts.tol {
        let result = IntegralResult {
            value: partials[k - 1],
            error_bound: tail + last.error_bound,
            partitions_used: k as u64,
            finest_mesh: last.finest_mesh,
            converged: last.converged,
            items: last.items,
        };
        return Ok(HakeOutcome::Converged { result, partials });
    }
    Ok(HakeOutcome::Inconclusive { partials })
}

/// Sums involved in an additivity check.
#[derive(Clone, Debug, PartialEq)]
pub struct Additivity {
    pub whole: f64,
    pub left: f64,
    pub right: f64,
    /// `|whole − (left + right)|`.
    pub defect: f64,
    /// Whether the split-gauge partition of `[0, 1]` has `x` as a tag.
    pub x_is_tag: bool,
}

/// Integrates `f` over `[0, x]` with `Φ₁(ε)`, over `[x, 1]` with `Φ₂(ε)` and
/// over `[0, 1]` with the split gauge of both, and compares.
pub fn additivity_check(
    f: &RealFn,
    phi1: &GaugeModulus,
    phi2: &GaugeModulus,
    x: &Tag,
    eps: &Rational,
    depth_cap: u32,
) -> Result<Additivity> {
    let d1 = phi1.at(eps)?;
    let d2 = phi2.at(eps)?;
    let d3 = split_gauge(&d1, &d2, x)?;
    let strategy = TagStrategy::default().with_extra_points([x.clone()]);
    let popts = PartitionOptions::with_depth_cap(depth_cap);
    let left_iv = Interval::new(Tag::zero(), x.clone()).expect("0 < x");
    let right_iv = Interval::new(x.clone(), Tag::int(1)).expect("x < 1");
    let (left, _, _) = fine_sum(f, &d1, &left_iv, &TagStrategy::default(), &popts)?;
    let (right, _, _) = fine_sum(f, &d2, &right_iv, &TagStrategy::default(), &popts)?;

    let mut acc = Accumulator::default();
    let mut x_is_tag = false;
    visit_fine_partition(&d3, &Interval::unit(), &strategy, &popts, |it| {
        x_is_tag |= &it.tag == x;
        let v = f.eval(&it.tag)?;
        acc.add(v * it.interval.length().to_f64());
        Ok(())
    })?;
    let whole = acc.value();
    Ok(Additivity { whole, left, right, defect: (whole - (left + right)).abs(), x_is_tag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcs::Builtin;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn riemann_examples() {
        let tol = 1e-8;
        let x = RealFn::from_f64("x", |x| x);
        let r = riemann_integrate(&x, &Interval::unit(), tol).unwrap();
        assert!(r.converged && (r.value - 0.5).abs() < tol);
        let x2 = RealFn::from_f64("x^2", |x| x * x);
        let r = riemann_integrate(&x2, &Interval::unit(), tol).unwrap();
        assert!(r.converged && (r.value - 1.0 / 3.0).abs() < tol, "{r:?}");
        let iv = Interval::rational(q(1, 4), q(1, 1)).unwrap();
        let r = riemann_integrate(&Builtin::SqrtRecip.function(), &iv, 1e-6).unwrap();
        assert!(r.converged && (r.value - 1.0).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn riemann_irrational_target_and_exact_path() {
        let iv = Interval::new(Tag::zero(), Tag::sqrt2().scale(&q(1, 2))).unwrap();
        let one = RealFn::new("one", OneExact, false);
        let r = riemann_integrate(&one, &iv, 1e-9).unwrap();
        assert!((r.value - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    struct OneExact;
    impl crate::realfn::RealFunction for OneExact {
        fn eval(&self, _t: &Tag) -> Result<f64> {
            Ok(1.0)
        }
    }

    #[test]
    fn gauge_integral_of_constant_is_exact() {
        let r = gauge_integrate(
            &RealFn::constant(3.0),
            &GaugeModulus::constant(q(1, 1)),
            &Interval::unit(),
            &GaugeOptions::new(1e-3),
        )
        .unwrap();
        assert!(r.converged);
        assert_eq!(r.value, 3.0);
        assert_eq!(r.partitions_used, 11);
        assert!(r.error_bound <= 2e-3);
    }

    #[test]
    fn gauge_integral_reports_deepest_success() {
        let phi = GaugeModulus::new("eps", |e: &Rational| Gauge::constant(e.clone()));
        let r = gauge_integrate(&RealFn::constant(1.0), &phi, &Interval::unit(), &GaugeOptions::new(1e-6).depth_cap(5))
            .unwrap();
        assert!(!r.converged);
        // cells of length 2^-5 tagged at their midpoints need ε ≥ 2^-6
        assert_eq!(r.error_bound, 2.0 * 2f64.powi(-6));
    }

    #[test]
    fn dirichlet_gauge_integral_is_small() {
        let b = Builtin::Dirichlet;
        let r = gauge_integrate(
            &b.function(),
            &b.modulus(&Interval::unit()).unwrap(),
            &Interval::unit(),
            &GaugeOptions::new(2f64.powi(-8)),
        )
        .unwrap();
        assert!(r.converged && r.value.abs() <= 4.0 * 2f64.powi(-8));
    }

    #[test]
    fn cauchy_gap_of_constant_is_zero() {
        let g = cauchy_gap(&RealFn::constant(2.0), &GaugeModulus::constant(q(1, 3)), &q(1, 4), &CauchyOptions::new(5, 7))
            .unwrap();
        assert_eq!(g.sums.len(), 5);
        assert!(g.gap < 1e-12);
    }

    #[test]
    fn hake_examples() {
        let o = hake_limit(&RealFn::constant(1.0), &default_probes(8), &HakeOptions::default()).unwrap();
        match o {
            HakeOutcome::Converged { result, .. } => assert!((result.value - 1.0).abs() < 1e-2),
            other => panic!("{other:?}"),
        }
        let o = hake_limit(&Builtin::Recip.function(), &default_probes(8), &HakeOptions::default()).unwrap();
        assert!(o.diverges(), "{o:?}");
        assert!(o.partials().len() >= 5);
    }

    #[test]
    fn additivity_of_constant() {
        let one = GaugeModulus::constant(q(1, 4));
        let a = additivity_check(&RealFn::constant(1.0), &one, &one, &Tag::ratio(1, 2), &q(1, 8), 32).unwrap();
        assert!(a.defect < 1e-12);
        assert!(a.x_is_tag);
    }
}
