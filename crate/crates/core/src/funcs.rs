//! Builtin integrands, their gauge moduli, and the fixed enumeration of ℚ.
//!
//! The enumeration lists `0` first and then interleaves the Calkin–Wilf order
//! of the positive rationals with their negatives:
//! `0, 1, −1, 1/2, −1/2, 2, −2, 1/3, …`. The positive rational at Calkin–Wilf
//! position `j ≥ 1` has index `2j − 1` and its negative has index `2j`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gauge::{positive_lower_bound, Gauge, GaugeFn, GaugeModulus};
use crate::integrator::riemann_integrate;
use crate::rational::Rational;
use crate::realfn::{RealFn, RealFunction};
use crate::tag::{Interval, Tag};

/// Dirichlet radii `ε/2^{k+1}` are produced only for indices up to this value;
/// beyond it the radius is reported as indeterminate.
pub const DIRICHLET_INDEX_CAP: u64 = 4096;

/// Euclid runs `(bit, length)` of the Calkin–Wilf path of `p/q > 0`, leaf first.
fn cw_runs(q: &Rational) -> Vec<(bool, BigUint)> {
    let mut p = q.numer().magnitude().clone();
    let mut d = q.denom().magnitude().clone();
    let mut runs = Vec::new();
    while p != d {
        if p > d {
            // Right moves: (a + b)/b  ← repeated until the numerator drops.
            let k = if d.is_one() { &p - 1u32 } else { &p / &d };
            p -= &k * &d;
            runs.push((true, k));
        } else {
            let k = if p.is_one() { &d - 1u32 } else { &d / &p };
            d -= &k * &p;
            runs.push((false, k));
        }
    }
    runs
}

/// Bit length of the Calkin–Wilf position of `|q|`, computed without building it.
pub fn cw_bits(q: &Rational) -> BigUint {
    cw_runs(&q.abs()).into_iter().fold(BigUint::one(), |acc, (_, k)| acc + k)
}

/// Calkin–Wilf position (1-based) of a positive rational.
fn cw_position(q: &Rational) -> BigUint {
    let mut n = BigUint::one();
    for (bit, k) in cw_runs(q).into_iter().rev() {
        let k = k.to_usize().expect("run length fits in memory");
        n <<= k;
        if bit {
            n += (BigUint::one() << k) - 1u32;
        }
    }
    n
}

/// Index of `q` in the fixed enumeration of ℚ.
pub fn rational_index(q: &Rational) -> BigUint {
    match q.signum() {
        0 => BigUint::zero(),
        s => {
            let j = cw_position(&q.abs());
            if s > 0 {
                (j << 1) - 1u32
            } else {
                j << 1
            }
        }
    }
}

/// Index of `q`, or `None` when it exceeds `cap`.
pub fn rational_index_capped(q: &Rational, cap: u64) -> Option<u64> {
    if q.is_zero() {
        return Some(0);
    }
    // A Calkin–Wilf position with b bits is at least 2^(b-1).
    let bits = cw_bits(q).to_u64()?;
    if bits > 64 - cap.leading_zeros() as u64 + 1 {
        return None;
    }
    rational_index(q).to_u64().filter(|&k| k <= cap)
}

/// The rational with the given index; inverse of [`rational_index`].
pub fn enumerate(n: &BigUint) -> Rational {
    if n.is_zero() {
        return Rational::zero();
    }
    let odd = n.bit(0);
    let j: BigUint = if odd { (n + 1u32) >> 1 } else { n >> 1 };
    let mut a = BigInt::one();
    let mut b = BigInt::one();
    let bits = j.bits();
    let mut i = bits - 1;
    while i > 0 {
        i -= 1;
        if j.bit(i) {
            a += &b;
        } else {
            b += &a;
        }
    }
    let r = Rational::from_big(a, b);
    if odd {
        r
    } else {
        -r
    }
}

/// Lazy enumeration of ℚ in index order.
pub fn rationals() -> impl Iterator<Item = Rational> {
    (0u64..).map(|n| enumerate(&BigUint::from(n)))
}

/// `a_k = 1 − 2^{−k}`.
pub fn kappa_point(k: u32) -> Rational {
    &Rational::one() - &Rational::pow2_neg(k)
}

/// The `k ≥ 1` with `x ∈ [a_{k−1}, a_k)`, for `0 ≤ x < 1`.
fn kappa_block(x: &Tag) -> u32 {
    let y = &Tag::int(1) - x;
    // 2^{-k} < y <= 2^{-(k-1)}
    let yf = y.to_f64();
    let mut k = if yf > 0.0 && yf.is_normal() {
        let bits = yf.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64 - 1023;
        let pow = bits & ((1u64 << 52) - 1) == 0;
        (if pow { 1 - exp } else { -exp }).max(1) as u32
    } else {
        1
    };
    loop {
        if y <= Tag::rational(Rational::pow2_neg(k)) {
            k += 1;
        } else if k > 1 && y > Tag::rational(Rational::pow2_neg(k - 1)) {
            k -= 1;
        } else {
            return k;
        }
    }
}

fn kappa_value(k: u32) -> f64 {
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    sign * 2f64.powi(k as i32) / k as f64
}

/// `κ(x) = (−1)^{k+1}·2^k/k` on `[a_{k−1}, a_k)`, and `κ(1) = 0`.
pub fn kappa_eval(x: &Tag) -> Result<f64> {
    if x.signum() < 0 || x > &Tag::int(1) {
        return Err(Error::OutOfDomain(x.clone(), "[0, 1]"));
    }
    if x == &Tag::int(1) {
        return Ok(0.0);
    }
    let v = kappa_value(kappa_block(x));
    if !v.is_finite() {
        return Err(Error::Undefined { tag: x.clone(), reason: "block value overflows binary64".into() });
    }
    Ok(v)
}

fn kappa_eval_f64(x: f64) -> Option<f64> {
    if !(0.0..=1.0).contains(&x) {
        return None;
    }
    if x == 1.0 {
        return Some(0.0);
    }
    let y = 1.0 - x;
    let bits = y.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64 - 1023;
    let pow = bits & ((1u64 << 52) - 1) == 0;
    let k = if pow { 1 - exp } else { -exp };
    Some(kappa_value(k as u32))
}

/// `m(ε) = ⌈1/ε⌉`, which satisfies both `m ≥ 1/ε` and the alternating tail bound `1/m ≤ ε`.
pub fn kappa_m(eps: &Rational) -> u32 {
    eps.recip().ceil().to_u32().expect("ε not absurdly small")
}

/// The κ gauge: `d(x, E)` off `E = {a_k} ∪ {1}`, `ε/4^{k+1}` at `a_k`, `2^{−m(ε)}` at 1.
pub fn kappa_modulus(eps: &Rational) -> Gauge {
    struct Kappa {
        eps: Rational,
        m: u32,
    }
    impl GaugeFn for Kappa {
        fn radius(&self, x: &Tag) -> Result<Rational> {
            let one = Tag::int(1);
            if x == &one {
                return Ok(Rational::pow2_neg(self.m));
            }
            if x > &one {
                return Ok(positive_lower_bound(&(x - &one)).expect("x > 1"));
            }
            if x.signum() < 0 {
                return Ok(positive_lower_bound(&-x).expect("x < 0"));
            }
            let k = kappa_block(x);
            let lo = Tag::rational(kappa_point(k - 1));
            if x == &lo {
                return Ok(&self.eps * &Rational::pow2_neg(2 * k));
            }
            let hi = Tag::rational(kappa_point(k));
            let d = (x - &lo).min(&hi - x);
            Ok(positive_lower_bound(&d).expect("x strictly inside its block"))
        }
    }
    Gauge::new(format!("kappa_modulus({eps})"), Kappa { m: kappa_m(eps), eps: eps.clone() })
}

/// `∫ |κ|` over `[0, a_k]` by the Riemann integrator; equals the harmonic number `H_k`.
pub fn abs_kappa_partial(k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let target = Interval::rational(Rational::zero(), kappa_point(k)).expect("a_k ≥ 0");
    let r = riemann_integrate(&Builtin::Kappa.function().abs(), &target, 1e-12)?;
    let h: f64 = (1..=k).map(|i| 1.0 / i as f64).sum();
    if (r.value - h).abs() > 1e-9 {
        return Err(Error::Precondition(format!("∫|κ| over [0, a_{k}] = {} differs from H_{k} = {h}", r.value)));
    }
    Ok(r.value)
}

/// Builtin integrands.
#[derive(Clone, Debug, PartialEq)]
pub enum Builtin {
    /// `x^{−1/2}` for `x > 0`, `0` at `0`.
    SqrtRecip,
    /// `1` on ℚ, `0` elsewhere.
    Dirichlet,
    Kappa,
    /// `1/x`, undefined at `0`; has no gauge modulus.
    Recip,
    /// `Σ c_i x^i`.
    Poly(Vec<Rational>),
    /// `values[i]` on `[breaks[i−1], breaks[i])`, with `values.len() == breaks.len() + 1`.
    Step { breaks: Vec<Rational>, values: Vec<Rational> },
}

pub const BUILTIN_NAMES: [&str; 6] = ["sqrt_recip", "dirichlet", "kappa", "recip", "poly", "step"];

impl Builtin {
    /// Builtins that take no parameters, by name.
    pub fn by_name(name: &str) -> Result<Builtin> {
        match name {
            "sqrt_recip" => Ok(Builtin::SqrtRecip),
            "dirichlet" => Ok(Builtin::Dirichlet),
            "kappa" => Ok(Builtin::Kappa),
            "recip" => Ok(Builtin::Recip),
            _ => Err(Error::UnknownBuiltin(name.to_string())),
        }
    }

    pub fn step(breaks: Vec<Rational>, values: Vec<Rational>) -> Result<Builtin> {
        if values.len() != breaks.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "{} breaks need {} values, got {}",
                breaks.len(),
                breaks.len() + 1,
                values.len()
            )));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("breaks must be strictly increasing".into()));
        }
        Ok(Builtin::Step { breaks, values })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::SqrtRecip => "sqrt_recip",
            Builtin::Dirichlet => "dirichlet",
            Builtin::Kappa => "kappa",
            Builtin::Recip => "recip",
            Builtin::Poly(_) => "poly",
            Builtin::Step { .. } => "step",
        }
    }

    pub fn function(&self) -> RealFn {
        match self {
            Builtin::SqrtRecip => RealFn::new("sqrt_recip", SqrtRecip, true),
            Builtin::Dirichlet => RealFn::new("dirichlet", Dirichlet, false),
            Builtin::Kappa => RealFn::new("kappa", Kappa, true),
            Builtin::Recip => RealFn::new("recip", Recip, true),
            Builtin::Poly(c) => RealFn::new(format!("poly{c:?}"), Poly(c.clone()), true),
            Builtin::Step { breaks, values } => RealFn::new(
                "step",
                Step {
                    breaks: breaks.clone(),
                    fbreaks: breaks.iter().map(Rational::to_f64).collect(),
                    values: values.iter().map(Rational::to_f64).collect(),
                },
                true,
            ),
        }
    }

    /// The gauge modulus for integration over `target`.
    ///
    /// The moduli of `sqrt_recip`, `dirichlet` and `kappa` are the published
    /// ones and assume `target ⊆ [0, 1]`; `poly` and `step` get Lipschitz and
    /// jump-count moduli sized from `target`.
    pub fn modulus(&self, target: &Interval) -> Result<GaugeModulus> {
        match self {
            Builtin::SqrtRecip => Ok(GaugeModulus::new("sqrt_recip_modulus", sqrt_recip_modulus)),
            Builtin::Dirichlet => Ok(GaugeModulus::new("dirichlet_modulus", dirichlet_modulus)),
            Builtin::Kappa => Ok(GaugeModulus::new("kappa_modulus", kappa_modulus)),
            Builtin::Recip => Err(Error::NoModulus("recip".into())),
            Builtin::Poly(c) => Ok(poly_modulus(c, target)),
            Builtin::Step { breaks, values } => Ok(step_modulus(breaks, values)),
        }
    }
}

/// `builtin_modulus(name, ε)` over `[0, 1]`.
pub fn builtin_modulus(name: &str, eps: &Rational) -> Result<Gauge> {
    if !BUILTIN_NAMES.contains(&name) {
        return Err(Error::UnknownBuiltin(name.to_string()));
    }
    Builtin::by_name(name)
        .map_err(|_| Error::InvalidArgument(format!("{name} needs parameters")))?
        .modulus(&Interval::unit())?
        .at(eps)
}

struct SqrtRecip;

impl RealFunction for SqrtRecip {
    fn eval(&self, t: &Tag) -> Result<f64> {
        match t.signum() {
            -1 => Err(Error::OutOfDomain(t.clone(), "[0, ∞)")),
            0 => Ok(0.0),
            _ => Ok(1.0 / t.to_f64().sqrt()),
        }
    }
    fn eval_f64(&self, x: f64) -> Option<f64> {
        if x > 0.0 {
            Some(1.0 / x.sqrt())
        } else if x == 0.0 {
            Some(0.0)
        } else {
            None
        }
    }
}

struct Dirichlet;

impl RealFunction for Dirichlet {
    fn eval(&self, t: &Tag) -> Result<f64> {
        Ok(if t.is_rational() { 1.0 } else { 0.0 })
    }
    fn rationality_only(&self) -> bool {
        true
    }
}

struct Kappa;

impl RealFunction for Kappa {
    fn eval(&self, t: &Tag) -> Result<f64> {
        kappa_eval(t)
    }
    fn eval_f64(&self, x: f64) -> Option<f64> {
        kappa_eval_f64(x)
    }
}

struct Recip;

impl RealFunction for Recip {
    fn eval(&self, t: &Tag) -> Result<f64> {
        if t.is_zero() {
            return Err(Error::Undefined { tag: t.clone(), reason: "1/x at 0".into() });
        }
        Ok(1.0 / t.to_f64())
    }
    fn eval_f64(&self, x: f64) -> Option<f64> {
        (x != 0.0).then(|| 1.0 / x)
    }
}

struct Poly(Vec<Rational>);

impl RealFunction for Poly {
    fn eval(&self, t: &Tag) -> Result<f64> {
        // Exact Horner steps overflow into big rationals after a few dyadic
        // bisections, and the value is reported in binary64 anyway.
        Ok(self.eval_f64(t.to_f64()).expect("polynomials are total"))
    }
    fn eval_f64(&self, x: f64) -> Option<f64> {
        Some(self.0.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64()))
    }
}

struct Step {
    breaks: Vec<Rational>,
    fbreaks: Vec<f64>,
    values: Vec<f64>,
}

impl RealFunction for Step {
    fn eval(&self, t: &Tag) -> Result<f64> {
        if let Some(v) = self.eval_f64(t.to_f64()) {
            return Ok(v);
        }
        let i = self.breaks.partition_point(|b| &Tag::rational(b.clone()) <= t);
        Ok(self.values[i])
    }
    fn eval_f64(&self, x: f64) -> Option<f64> {
        // Near a break the binary64 argument cannot decide the side.
        if self.fbreaks.iter().any(|b| (b - x).abs() <= 1e-12 * b.abs().max(1.0)) {
            return None;
        }
        Some(self.values[self.fbreaks.partition_point(|b| *b <= x)])
    }
}

/// `εx²` for `x > 0`, `ε²` otherwise; √2-tags are rounded down to a dyadic.
pub fn sqrt_recip_modulus(eps: &Rational) -> Gauge {
    struct G(Rational, f64);
    impl GaugeFn for G {
        fn radius(&self, x: &Tag) -> Result<Rational> {
            if x.signum() <= 0 {
                return Ok(&self.0 * &self.0);
            }
            match x.as_rational() {
                Some(q) => Ok(&self.0 * &(q * q)),
                None => Ok(positive_lower_bound(&(x * x).scale(&self.0)).expect("x ≠ 0")),
            }
        }
        fn estimate(&self, x: &Tag) -> Option<f64> {
            self.estimate_f64(x.to_f64())
        }
        fn estimate_f64(&self, xf: f64) -> Option<f64> {
            Some(if xf > 0.0 { self.1 * xf * xf } else { self.1 * self.1 })
        }
    }
    Gauge::new(format!("sqrt_recip_modulus({eps})"), G(eps.clone(), eps.to_f64()))
}

/// `1` off ℚ and `ε/2^{k+1}` at the `k`-th rational.
pub fn dirichlet_modulus(eps: &Rational) -> Gauge {
    struct G(Rational, f64);
    impl GaugeFn for G {
        fn radius(&self, x: &Tag) -> Result<Rational> {
            let Some(q) = x.as_rational() else {
                return Ok(Rational::one());
            };
            match rational_index_capped(q, DIRICHLET_INDEX_CAP) {
                Some(k) => Ok(&self.0 * &Rational::pow2_neg(k as u32 + 1)),
                None => Err(Error::Indeterminate {
                    tag: x.clone(),
                    reason: format!("enumeration index above {DIRICHLET_INDEX_CAP}"),
                }),
            }
        }
        fn estimate(&self, x: &Tag) -> Option<f64> {
            let Some(q) = x.as_rational() else {
                return Some(1.0);
            };
            Some(match rational_index_capped(q, DIRICHLET_INDEX_CAP) {
                Some(k) => self.1 * 2f64.powi(-(k as i32 + 1)),
                None => 0.0,
            })
        }
    }
    Gauge::new(format!("dirichlet_modulus({eps})"), G(eps.clone(), eps.to_f64()))
}

/// Smallest integer `≥ |t|`.
fn int_upper_bound(t: &Tag) -> Rational {
    let up: BigInt = (t.abs().floor() + BigInt::one()).max(BigInt::one());
    Rational::from_big(up, BigInt::one())
}

/// Constant gauge `ε/(4·L·W)` with `L` a Lipschitz bound of the polynomial on
/// `target` and `W ≥ |target|`: any fine partition has `|S − A| ≤ ε/2`.
pub fn poly_modulus(coeffs: &[Rational], target: &Interval) -> GaugeModulus {
    let m = int_upper_bound(target.lo()).max(int_upper_bound(target.hi()));
    let mut lip = Rational::zero();
    let mut pow = Rational::one();
    for (i, c) in coeffs.iter().enumerate().skip(1) {
        lip = &lip + &(&(&c.abs() * &pow) * &Rational::from_integer(i as i64));
        pow = &pow * &m;
    }
    let lip = lip.max(Rational::one());
    let width = &m * &Rational::from_integer(2);
    let scale = (&(&lip * &width) * &Rational::from_integer(4)).recip();
    GaugeModulus::new(format!("poly_modulus(L={lip})"), move |eps| {
        Gauge::constant(eps * &scale)
    })
}

/// Constant gauge `ε/(8·m·J)` for `m` breaks and total value range `J`.
pub fn step_modulus(breaks: &[Rational], values: &[Rational]) -> GaugeModulus {
    let hi = values.iter().cloned().max().unwrap_or_else(Rational::zero);
    let lo = values.iter().cloned().min().unwrap_or_else(Rational::zero);
    let jump = &hi - &lo;
    if breaks.is_empty() || jump.is_zero() {
        return GaugeModulus::constant(Rational::one());
    }
    let scale = (&(&jump * &Rational::from_integer(breaks.len() as i64)) * &Rational::from_integer(8)).recip();
    GaugeModulus::new(format!("step_modulus(m={}, J={jump})", breaks.len()), move |eps| {
        Gauge::constant(eps * &scale)
    })
}

impl Builtin {
    /// `true` when the gauge of [`Builtin::modulus`] does not depend on the tag.
    pub fn has_constant_modulus(&self) -> bool {
        matches!(self, Builtin::Poly(_) | Builtin::Step { .. })
    }
}
