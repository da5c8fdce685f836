//! Cantor space: the special fan functional Θ, its brute-force verifier and
//! the maps that carry canonical covers between Cantor space and `[0, 1]`.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::cousin::TagStrategy;
use crate::error::{Error, Result};
use crate::gauge::{positive_lower_bound, Gauge, GaugeFn};
use crate::rational::Rational;
use crate::tag::{Interval, Tag};

/// A binary sequence `σ * t^ω`: a finite prefix followed by a constant tail.
///
/// Θ only ever produces zero tails. The all-ones tail exists so that values
/// such as `ξ(1^ω) = 1` can be represented exactly.
#[derive(Clone)]
pub struct BinSeq {
    prefix: Vec<u8>,
    tail: u8,
}

impl BinSeq {
    /// `prefix * 0^ω`; entries must be 0 or 1.
    pub fn new(prefix: Vec<u8>) -> Result<Self> {
        if let Some(b) = prefix.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidArgument(format!("binary entry {b}")));
        }
        Ok(BinSeq { prefix, tail: 0 })
    }

    /// `prefix * 1^ω`.
    pub fn with_ones_tail(prefix: Vec<u8>) -> Result<Self> {
        let mut s = Self::new(prefix)?;
        s.tail = 1;
        Ok(s)
    }

    pub fn zeros() -> Self {
        BinSeq { prefix: Vec::new(), tail: 0 }
    }

    pub fn ones() -> Self {
        BinSeq { prefix: Vec::new(), tail: 1 }
    }

    /// The first `n` entries, followed by zeros.
    pub fn truncate(&self, n: usize) -> BinSeq {
        BinSeq { prefix: (0..n).map(|i| self.bit(i)).collect(), tail: 0 }
    }

    pub fn prefix(&self) -> &[u8] {
        &self.prefix
    }

    pub fn tail(&self) -> u8 {
        self.tail
    }

    /// Entry `i` of the infinite sequence.
    pub fn bit(&self, i: usize) -> u8 {
        self.prefix.get(i).copied().unwrap_or(self.tail)
    }

    /// `true` iff both sequences agree on their first `n` entries.
    pub fn agrees(&self, other: &BinSeq, n: usize) -> bool {
        (0..n).all(|i| self.bit(i) == other.bit(i))
    }

    fn significant(&self) -> &[u8] {
        let end = self.prefix.iter().rposition(|&b| b != self.tail).map_or(0, |k| k + 1);
        &self.prefix[..end]
    }
}

impl std::str::FromStr for BinSeq {
    type Err = Error;

    /// A string of `0`/`1`; an empty string is `0^ω`.
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidArgument(format!("binary digit {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        BinSeq::new(bits)
    }
}

impl PartialEq for BinSeq {
    fn eq(&self, other: &Self) -> bool {
        self.tail == other.tail && self.significant() == other.significant()
    }
}

impl Eq for BinSeq {}

impl std::hash::Hash for BinSeq {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.tail.hash(state);
        self.significant().hash(state);
    }
}

impl fmt::Display for BinSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.prefix {
            write!(f, "{b}")?;
        }
        write!(f, "{}^ω", self.tail)
    }
}

impl fmt::Debug for BinSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinSeq({self})")
    }
}

type Evaluator = Arc<dyn Fn(&BinSeq) -> Result<u32> + Send + Sync>;

/// A functional `G : {0,1}^ℕ → ℕ` with an optional declared continuity bound.
///
/// A declared bound `b` asserts that `G(f)` depends only on `f(0), …, f(b−1)`.
/// It cannot be checked in general; [`verify_scf`] catches false claims at the
/// depth it examines.
#[derive(Clone)]
pub struct CantorFunctional {
    eval: Evaluator,
    bound: Option<u32>,
    name: Arc<str>,
}

impl CantorFunctional {
    pub fn new(
        name: impl Into<String>,
        bound: Option<u32>,
        f: impl Fn(&BinSeq) -> Result<u32> + Send + Sync + 'static,
    ) -> Self {
        CantorFunctional { eval: Arc::new(f), bound, name: name.into().into() }
    }

    /// `G ≡ c`.
    pub fn constant(c: u32) -> Self {
        Self::new(format!("const({c})"), Some(0), move |_| Ok(c))
    }

    /// `G(f) = 1 + f(0)`.
    pub fn one_plus_first() -> Self {
        Self::new("1+f(0)", Some(1), |f| Ok(1 + f.bit(0) as u32))
    }

    /// One more than the position of the first 1 among the first `b` entries,
    /// or `b` if there is none.
    pub fn first_one(b: u32) -> Self {
        Self::new(format!("first_one({b})"), Some(b), move |f| {
            Ok((0..b).find(|&i| f.bit(i as usize) == 1).map_or(b, |i| i + 1))
        })
    }

    /// `1 +` the number of ones among the first `b` entries.
    pub fn weight(b: u32) -> Self {
        Self::new(format!("weight({b})"), Some(b), move |f| {
            Ok(1 + (0..b as usize).filter(|&i| f.bit(i) == 1).count() as u32)
        })
    }

    /// A table indexed by the first `bound` entries read as a big-endian
    /// number; `values.len()` must be `2^bound`.
    pub fn table(bound: u32, values: Vec<u32>) -> Result<Self> {
        if bound > 24 || values.len() != 1usize << bound {
            return Err(Error::InvalidArgument(format!(
                "table of {} values for bound {bound}",
                values.len()
            )));
        }
        Ok(Self::new(format!("table({bound})"), Some(bound), move |f| {
            let idx = (0..bound as usize).fold(0usize, |acc, i| (acc << 1) | f.bit(i) as usize);
            Ok(values[idx])
        }))
    }

    pub fn eval(&self, f: &BinSeq) -> Result<u32> {
        (self.eval)(f)
    }

    pub fn bound(&self) -> Option<u32> {
        self.bound
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for CantorFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CantorFunctional({})", self.name)
    }
}

/// The functionals shipped with the library, each with a proven bound.
pub fn builtin_functionals() -> Vec<CantorFunctional> {
    vec![
        CantorFunctional::constant(0),
        CantorFunctional::constant(2),
        CantorFunctional::one_plus_first(),
        CantorFunctional::first_one(6),
        CantorFunctional::weight(4),
    ]
}

/// Gauges on `[0, 1]` used to exercise the cover transfer: a constant, the
/// `x^{−1/2}` modulus at `ε = 1/2`, and `(1 + x)/4`.
pub fn transfer_gauges() -> Vec<Gauge> {
    let linear = Gauge::from_fn("(1+x)/4", |x: &Tag| {
        let v = x.add_rational(&Rational::one()).scale(&Rational::new(1, 4));
        positive_lower_bound(&v).ok_or_else(|| Error::NonPositiveGauge(x.clone()))
    })
    .with_continuous(true);
    vec![
        Gauge::constant(Rational::new(1, 10)),
        crate::funcs::sqrt_recip_modulus(&Rational::new(1, 2)),
        linear,
    ]
}

/// Θ by depth-first search over binary prefixes, left branch first.
///
/// At node `σ` with `g = σ*0^ω`, if `G(g) ≤ |σ|` then `[σ] ⊆ [ḡG(g)]`, so `g`
/// is recorded and the branch closed. The recorded cylinders therefore cover
/// Cantor space whenever the search terminates.
pub fn theta(g: &CantorFunctional, depth_cap: u32) -> Result<Vec<BinSeq>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<u8>> = vec![Vec::new()];
    while let Some(sigma) = stack.pop() {
        let seq = BinSeq { prefix: sigma, tail: 0 };
        if g.eval(&seq)? as usize <= seq.prefix.len() {
            out.push(seq);
            continue;
        }
        if seq.prefix.len() >= depth_cap as usize {
            return Err(Error::FanDepthExceeded(depth_cap));
        }
        let mut right = seq.prefix.clone();
        right.push(1);
        let mut left = seq.prefix;
        left.push(0);
        stack.push(right);
        stack.push(left);
    }
    Ok(out)
}

/// Largest depth accepted by the exhaustive checks (`2^26` prefixes).
pub const MAX_SCF_DEPTH: u32 = 26;

/// `true` iff every binary prefix of length `depth` extends one of the
/// cylinders `[σ]`, by marking and then scanning all `2^depth` prefixes.
pub fn cylinders_cover(cylinders: &[Vec<u8>], depth: u32) -> Result<bool> {
    if depth > MAX_SCF_DEPTH {
        return Err(Error::InvalidArgument(format!("depth {depth} exceeds {MAX_SCF_DEPTH}")));
    }
    let total = 1usize << depth;
    let mut marked = vec![false; total];
    for sigma in cylinders {
        let k = sigma.len();
        if k > depth as usize {
            return Err(Error::Precondition(format!("cylinder of length {k} below depth {depth}")));
        }
        let head = sigma.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let span = 1usize << (depth as usize - k);
        marked[head * span..(head + 1) * span].fill(true);
    }
    Ok(marked.iter().all(|&m| m))
}

/// Brute-force check of the special-fan-functional property at `depth`: each
/// of the `2^depth` prefixes must agree with some candidate `g` on its first
/// `G(g)` entries.
pub fn verify_scf(candidates: &[BinSeq], g: &CantorFunctional, depth: u32) -> Result<bool> {
    if let Some(b) = g.bound() {
        if depth < b {
            return Err(Error::Precondition(format!("depth {depth} is below the continuity bound {b}")));
        }
    }
    let mut cylinders = Vec::with_capacity(candidates.len());
    for c in candidates {
        let n = g.eval(c)?;
        if n > depth {
            return Err(Error::Precondition(format!("depth {depth} is below G({c}) = {n}")));
        }
        cylinders.push(c.truncate(n as usize).prefix);
    }
    cylinders_cover(&cylinders, depth)
}

/// `Σ_{i<n} f(i)·2^{−(i+1)}` for the first `n` entries.
fn dyadic_prefix(f: &BinSeq, n: usize) -> Rational {
    let mut num = BigInt::zero();
    for i in 0..n {
        num = (num << 1) + BigInt::from(f.bit(i));
    }
    Rational::from_big(num, BigInt::one() << n)
}

/// `Σ_{i<n} 2f(i)·3^{−(i+1)}` for the first `n` entries.
fn triadic_prefix(f: &BinSeq, n: usize) -> Rational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for i in 0..n {
        num = num * 3 + BigInt::from(2 * f.bit(i));
        den *= 3;
    }
    Rational::from_big(num, den)
}

/// `ξ(f) = Σ f(i)·2^{−(i+1)}` truncated after `bits` entries; exact once
/// `bits` reaches the prefix length of a zero-tailed sequence.
pub fn xi_map(f: &BinSeq, bits: usize) -> Rational {
    dyadic_prefix(f, bits)
}

/// Exact `ξ(f)` including the tail.
pub fn xi_exact(f: &BinSeq) -> Rational {
    let n = f.prefix.len();
    let head = dyadic_prefix(f, n);
    if f.tail == 1 {
        &head + &Rational::pow2_neg(n as u32)
    } else {
        head
    }
}

/// `ζ(f) = Σ 2f(i)·3^{−(i+1)}` truncated after `digits` entries.
pub fn zeta_map(f: &BinSeq, digits: usize) -> Rational {
    triadic_prefix(f, digits)
}

/// Exact `ζ(f)` including the tail.
pub fn zeta_exact(f: &BinSeq) -> Rational {
    let n = f.prefix.len();
    let head = triadic_prefix(f, n);
    if f.tail == 1 {
        let third = Rational::from_big(BigInt::one(), num_traits::pow(BigInt::from(3), n));
        &head + &third
    } else {
        head
    }
}

/// Steps of ternary descent tried before giving up on a membership question.
pub const CANTOR_DESCENT_CAP: usize = 4096;

/// Position of a point of `[0, 1]` relative to the middle-thirds Cantor set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CantorPosition {
    /// In the set. Carries at least the requested number of ternary digits,
    /// each 0 or 2.
    Member(Vec<u8>),
    /// In the removed open interval `(lo, hi)`; both ends are in the set.
    Gap { lo: Rational, hi: Rational },
}

/// Ternary descent: zoom into the left or right third until `x` lands in a
/// removed middle third, or (for rational `x`) the scaled state repeats, which
/// proves membership. Irrational members cannot be confirmed and yield
/// [`Error::Indeterminate`] after [`CANTOR_DESCENT_CAP`] steps.
pub fn cantor_position(x: &Tag, want: usize) -> Result<CantorPosition> {
    if x.signum() < 0 || *x > Tag::int(1) {
        return Err(Error::OutOfDomain(x.clone(), "[0, 1]"));
    }
    let third = Tag::ratio(1, 3);
    let two_thirds = Tag::ratio(2, 3);
    let three = Rational::from_integer(3);
    let mut y = x.clone();
    let mut base = Rational::zero();
    let mut scale = Rational::one();
    let mut digits = Vec::new();
    let mut seen: HashSet<Rational> = HashSet::new();
    let mut cycled = false;
    loop {
        if y > third && y < two_thirds {
            let s3 = &scale * &Rational::new(1, 3);
            let lo = &base + &s3;
            let hi = &lo + &s3;
            return Ok(CantorPosition::Gap { lo, hi });
        }
        if !cycled {
            match y.as_rational() {
                Some(q) => cycled = !seen.insert(q.clone()),
                None if digits.len() >= CANTOR_DESCENT_CAP => {
                    return Err(Error::Indeterminate {
                        tag: x.clone(),
                        reason: format!("no ternary digit 1 within {CANTOR_DESCENT_CAP} places"),
                    })
                }
                None => {}
            }
        }
        if cycled && digits.len() >= want {
            return Ok(CantorPosition::Member(digits));
        }
        scale = &scale * &Rational::new(1, 3);
        if y <= third {
            digits.push(0);
            y = y.scale(&three);
        } else {
            digits.push(2);
            base = &base + &(&scale * &Rational::from_integer(2));
            y = y.scale(&three).add_rational(&Rational::from_integer(-2));
        }
    }
}

pub fn in_cantor(x: &Tag) -> Result<bool> {
    Ok(matches!(cantor_position(x, 0)?, CantorPosition::Member(_)))
}

/// Exact distance from `x` to the Cantor set.
pub fn cantor_distance(x: &Tag) -> Result<Tag> {
    Ok(match cantor_position(x, 0)? {
        CantorPosition::Member(_) => Tag::zero(),
        CantorPosition::Gap { lo, hi } => {
            let left = x.add_rational(&-&lo);
            let right = Tag::rational(hi) - x.clone();
            left.min(right)
        }
    })
}

/// Least point of the Cantor set `≥ x`.
pub fn cantor_ceil(x: &Tag) -> Result<Tag> {
    Ok(match cantor_position(x, 0)? {
        CantorPosition::Member(_) => x.clone(),
        CantorPosition::Gap { hi, .. } => Tag::rational(hi),
    })
}

/// Greatest point of the Cantor set `≤ x`.
pub fn cantor_floor(x: &Tag) -> Result<Tag> {
    Ok(match cantor_position(x, 0)? {
        CantorPosition::Member(_) => x.clone(),
        CantorPosition::Gap { lo, .. } => Tag::rational(lo),
    })
}

/// The default strategy plus, for each cell, the Cantor points nearest its
/// ends. Gauges that are tiny off the Cantor set can only be met by tags in
/// it, and dyadic cells almost never have such tags among the usual choices.
pub fn cantor_strategy() -> TagStrategy {
    TagStrategy::default().with_proposer("cantor", |cell: &Interval, _depth| {
        let mut out = Vec::new();
        if let Ok(c) = cantor_ceil(cell.lo()) {
            if c <= *cell.hi() {
                out.push(c);
            }
        }
        if let Ok(c) = cantor_floor(cell.hi()) {
            if c >= *cell.lo() && !out.contains(&c) {
                out.push(c);
            }
        }
        out
    })
}

fn bits_of_digits(digits: &[u8]) -> Vec<u8> {
    digits.iter().map(|d| d / 2).collect()
}

/// The first positive rational in Calkin–Wilf order that is `≤ b`.
///
/// Level `d` of the Calkin–Wilf tree holds the indices `2^d .. 2^{d+1}` and
/// starts with its minimum `1/(d+1)`, so the answer is `1/⌈1/b⌉` (or `1`).
pub fn first_enumerated_below(b: &Rational) -> Rational {
    if *b >= Rational::one() {
        return Rational::one();
    }
    Rational::from_big(BigInt::one(), b.recip().ceil())
}

/// The gauge `Ψ_F` on `[0, 1]` obtained from a functional `F`.
///
/// Off the Cantor set it is the distance to the set. At a member `x = ζ(f)`
/// it is the first enumerated rational `q` with
/// `ζ^{−1}((x − q, x + q)) ⊆ [f̄F(f)]`, computed from the neighbouring
/// level-`F(f)` cylinders. `F` must declare a continuity bound, since `f` may
/// have no finite description.
pub fn cover_transfer(f: &CantorFunctional) -> Result<Gauge> {
    let Some(bound) = f.bound() else {
        return Err(Error::InvalidArgument(format!("{} has no declared continuity bound", f.name())));
    };
    struct PsiF {
        f: CantorFunctional,
        bound: usize,
    }
    impl GaugeFn for PsiF {
        fn radius(&self, x: &Tag) -> Result<Rational> {
            let digits = match cantor_position(x, self.bound)? {
                CantorPosition::Gap { lo, hi } => {
                    let d = x.add_rational(&-&lo).min(Tag::rational(hi) - x.clone());
                    return positive_lower_bound(&d).ok_or_else(|| Error::NonPositiveGauge(x.clone()));
                }
                CantorPosition::Member(d) => d,
            };
            let x = x.as_rational().expect("members are confirmed only for rational points");
            let head = BinSeq { prefix: bits_of_digits(&digits[..self.bound]), tail: 0 };
            let n = self.f.eval(&head)? as usize;
            let digits = if n > digits.len() {
                match cantor_position(&Tag::rational(x.clone()), n)? {
                    CantorPosition::Member(d) => d,
                    CantorPosition::Gap { .. } => unreachable!("membership does not depend on depth"),
                }
            } else {
                digits
            };
            let bits = bits_of_digits(&digits[..n]);
            Ok(first_enumerated_below(&neighbour_gap(x, &bits)))
        }
    }
    Ok(Gauge::new(format!("psi[{}]", f.name()), PsiF { f: f.clone(), bound: bound as usize }))
}

/// Distance from `x` to the part of the Cantor set outside the level-`n`
/// cylinder image with the given bits; `2` when nothing lies outside it.
fn neighbour_gap(x: &Rational, bits: &[u8]) -> Rational {
    let n = bits.len();
    let cell = BinSeq { prefix: bits.to_vec(), tail: 0 };
    let width = Rational::from_big(BigInt::one(), num_traits::pow(BigInt::from(3), n));
    let mut gap = Rational::from_integer(2);
    if let Some(pred) = step_bits(bits, false) {
        let left_end = &zeta_map(&BinSeq { prefix: pred, tail: 0 }, n) + &width;
        gap = gap.min(x - &left_end);
    }
    if let Some(succ) = step_bits(bits, true) {
        let right_start = zeta_map(&BinSeq { prefix: succ, tail: 0 }, n);
        gap = gap.min(&right_start - x);
    }
    debug_assert!(zeta_map(&cell, n) <= *x);
    gap
}

/// Binary increment (`up`) or decrement of a fixed-width bit string; `None`
/// on overflow.
fn step_bits(bits: &[u8], up: bool) -> Option<Vec<u8>> {
    let (from, to) = if up { (1, 0) } else { (0, 1) };
    let k = bits.iter().rposition(|&b| b != from)?;
    let mut out = bits.to_vec();
    out[k] = from;
    out[k + 1..].fill(to);
    Some(out)
}

/// The functional `F_Ψ`: the least `n ≤ cap` with
/// `ξ([f̄n]) ⊆ (ξ(f) − Ψ(ξ(f)), ξ(f) + Ψ(ξ(f)))`.
///
/// Defined on zero-tailed sequences, so `ξ(f)` is an exact dyadic. No
/// continuity bound is declared.
pub fn cover_transfer_inv(psi: &Gauge, cap: u32) -> CantorFunctional {
    let psi = psi.clone();
    let name = format!("F[{}]", psi.name());
    CantorFunctional::new(name, None, move |f: &BinSeq| {
        let x = xi_exact(f);
        let r = psi.radius(&Tag::rational(x.clone()))?;
        let lo = &x - &r;
        let hi = &x + &r;
        for n in 0..=cap {
            let s = xi_map(f, n as usize);
            if s > lo && &s + &Rational::pow2_neg(n) < hi {
                return Ok(n);
            }
        }
        Err(Error::Effectivity(format!("no cylinder of depth ≤ {cap} fits around ξ({f}) = {x}")))
    })
}

/// The open intervals `I_{ξ(g)}^Ψ` for the sequences returned by Θ.
pub fn transferred_intervals(psi: &Gauge, seqs: &[BinSeq]) -> Result<Vec<crate::tag::OpenInterval>> {
    seqs.iter()
        .map(|g| {
            let x = Tag::rational(xi_exact(g));
            let r = psi.radius(&x)?;
            Ok(crate::tag::OpenInterval::around(&x, &r))
        })
        .collect()
}

/// Cylinders `[f̄F(f)]` for the Cantor-set centers `ζ(f)` among `centers`.
/// Centers off the set are skipped: their `Ψ_F`-intervals miss the set.
pub fn cantor_cylinders(f: &CantorFunctional, centers: &[Tag]) -> Result<Vec<Vec<u8>>> {
    let bound = f.bound().ok_or_else(|| Error::InvalidArgument(format!("{} has no bound", f.name())))?;
    let mut out = Vec::new();
    for c in centers {
        if let CantorPosition::Member(d) = cantor_position(c, bound as usize)? {
            let head = BinSeq { prefix: bits_of_digits(&d[..bound as usize]), tail: 0 };
            let n = f.eval(&head)? as usize;
            let d = match cantor_position(c, n)? {
                CantorPosition::Member(d) => d,
                CantorPosition::Gap { .. } => unreachable!("membership does not depend on depth"),
            };
            out.push(bits_of_digits(&d[..n]));
        }
    }
    Ok(out)
}
