//! Exact points of ℚ(√2) and closed intervals with endpoints in it.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use crate::rational::Rational;

// Float comparisons are trusted only when the gap exceeds this fraction of the
// largest term (rounding contributes a few 2^-53) and the terms are far from
// the subnormal range.
const FLOAT_MARGIN: f64 = 1.0 / (1u64 << 40) as f64;
const FLOAT_FLOOR: f64 = 1e-250;

/// A number `a + b·√2` with rational `a`, `b`.
///
/// Because √2 is irrational the pair `(a, b)` is unique, so rationality is
/// decided exactly by `b == 0`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Tag {
    a: Rational,
    b: Rational,
}

impl Tag {
    pub fn new(a: Rational, b: Rational) -> Self {
        Tag { a, b }
    }

    pub fn rational(a: Rational) -> Self {
        Tag { a, b: Rational::zero() }
    }

    pub fn int(n: i64) -> Self {
        Tag::rational(Rational::from_integer(n))
    }

    /// `n / d` as a tag.
    pub fn ratio(n: i64, d: i64) -> Self {
        Tag::rational(Rational::new(n, d))
    }

    pub fn sqrt2() -> Self {
        Tag { a: Rational::zero(), b: Rational::one() }
    }

    pub fn zero() -> Self {
        Tag::default()
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn sqrt2_part(&self) -> &Rational {
        &self.b
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn signum(&self) -> i32 {
        let (sa, sb) = (self.a.signum(), self.b.signum());
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        if let Some(s) = self.float_sign() {
            return s;
        }
        // Opposite signs: the term with the larger square wins.
        let a2 = &self.a * &self.a;
        let b2 = &(&self.b * &self.b) * &Rational::from_integer(2);
        if a2 > b2 {
            sa
        } else {
            sb
        }
    }

    /// Value and size of the larger term, both in binary64 within a few ulps.
    fn approx_parts(&self) -> (f64, f64) {
        let a = self.a.approx_f64();
        if self.b.is_zero() {
            return (a, a.abs());
        }
        let b = self.b.approx_f64() * std::f64::consts::SQRT_2;
        (a + b, a.abs().max(b.abs()))
    }

    /// The sign of `self`, when binary64 decides it with a wide margin.
    fn float_sign(&self) -> Option<i32> {
        let (v, m) = self.approx_parts();
        (m.is_finite() && m > FLOAT_FLOOR && v.abs() > m * FLOAT_MARGIN).then_some(if v > 0.0 { 1 } else { -1 })
    }

    pub fn abs(&self) -> Tag {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn scale(&self, k: &Rational) -> Tag {
        Tag { a: &self.a * k, b: &self.b * k }
    }

    pub fn add_rational(&self, k: &Rational) -> Tag {
        Tag { a: &self.a + k, b: self.b.clone() }
    }

    /// Midpoint `(self + other) / 2`.
    pub fn midpoint(&self, other: &Tag) -> Tag {
        let half = Rational::new(1, 2);
        (self + other).scale(&half)
    }

    /// Multiplicative inverse: `1/(a + b√2) = (a − b√2)/(a² − 2b²)`.
    pub fn recip(&self) -> Option<Tag> {
        if self.is_zero() {
            return None;
        }
        let norm = &(&self.a * &self.a) - &(&(&self.b * &self.b) * &Rational::from_integer(2));
        let inv = norm.recip();
        Some(Tag { a: &self.a * &inv, b: -(&self.b * &inv) })
    }

    pub fn to_f64(&self) -> f64 {
        if self.b.is_zero() {
            self.a.to_f64()
        } else {
            self.a.approx_f64() + self.b.approx_f64() * std::f64::consts::SQRT_2
        }
    }

    /// `floor(self)` computed exactly.
    pub fn floor(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.floor();
        }
        // Write self = (P + Q√2) / D with integers and D > 0.
        let d = self.a.denom().lcm(&self.b.denom());
        let p = self.a.numer() * (&d / self.a.denom());
        let q = self.b.numer() * (&d / self.b.denom());
        // Q√2 = ±sqrt(2Q²), never an integer for Q != 0.
        let s = (BigInt::from(2) * &q * &q).sqrt();
        let floor_num = if q.is_positive() { &p + &s } else { &p - &s - BigInt::one() };
        floor_num.div_floor(&d)
    }

    /// Largest dyadic `m / 2^bits <= self`: a rational lower bound.
    pub fn floor_dyadic(&self, bits: u32) -> Rational {
        if self.b.is_zero() {
            return self.a.floor_dyadic(bits);
        }
        let scaled = self.scale(&Rational::pow2(bits));
        Rational::from_big(scaled.floor(), BigInt::one() << bits as usize)
    }

    /// Rational lower bound: exact for rational tags, else a dyadic floor.
    pub fn lower_bound(&self, bits: u32) -> Rational {
        match self.as_rational() {
            Some(q) => q.clone(),
            None => self.floor_dyadic(bits),
        }
    }

    pub fn min(self, other: Tag) -> Tag {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Tag) -> Tag {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl From<Rational> for Tag {
    fn from(a: Rational) -> Self {
        Tag::rational(a)
    }
}

impl<'a> Add<&'a Tag> for &'a Tag {
    type Output = Tag;
    fn add(self, rhs: &Tag) -> Tag {
        Tag { a: &self.a + &rhs.a, b: &self.b + &rhs.b }
    }
}

impl<'a> Sub<&'a Tag> for &'a Tag {
    type Output = Tag;
    fn sub(self, rhs: &Tag) -> Tag {
        Tag { a: &self.a - &rhs.a, b: &self.b - &rhs.b }
    }
}

impl<'a> Mul<&'a Tag> for &'a Tag {
    type Output = Tag;
    fn mul(self, rhs: &Tag) -> Tag {
        if self.b.is_zero() && rhs.b.is_zero() {
            return Tag::rational(&self.a * &rhs.a);
        }
        let two = Rational::from_integer(2);
        Tag {
            a: &(&self.a * &rhs.a) + &(&two * &(&self.b * &rhs.b)),
            b: &(&self.a * &rhs.b) + &(&self.b * &rhs.a),
        }
    }
}

impl Add for Tag {
    type Output = Tag;
    fn add(self, rhs: Tag) -> Tag {
        &self + &rhs
    }
}

impl Sub for Tag {
    type Output = Tag;
    fn sub(self, rhs: Tag) -> Tag {
        &self - &rhs
    }
}

impl Mul for Tag {
    type Output = Tag;
    fn mul(self, rhs: Tag) -> Tag {
        &self * &rhs
    }
}

impl Neg for &Tag {
    type Output = Tag;
    fn neg(self) -> Tag {
        Tag { a: -&self.a, b: -&self.b }
    }
}

impl Neg for Tag {
    type Output = Tag;
    fn neg(self) -> Tag {
        -&self
    }
}

impl Ord for Tag {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.b == other.b {
            return self.a.cmp(&other.a);
        }
        let ((x, mx), (y, my)) = (self.approx_parts(), other.approx_parts());
        let m = mx.max(my);
        if m.is_finite() && m > FLOAT_FLOOR && (x - y).abs() > m * FLOAT_MARGIN {
            return if x > y { Ordering::Greater } else { Ordering::Less };
        }
        (self - other).signum().cmp(&0)
    }
}

impl PartialOrd for Tag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let b = if self.b == Rational::one() {
            "sqrt2".to_string()
        } else if self.b == -Rational::one() {
            "-sqrt2".to_string()
        } else {
            format!("{}*sqrt2", self.b)
        };
        if self.a.is_zero() {
            write!(f, "{b}")
        } else if self.b.is_negative() {
            write!(f, "{} - {}", self.a, b.trim_start_matches('-'))
        } else {
            write!(f, "{} + {}", self.a, b)
        }
    }
}

impl fmt::Debug for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Interval {
    lo: Tag,
    hi: Tag,
}

impl Interval {
    pub fn new(lo: Tag, hi: Tag) -> Option<Self> {
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Caller guarantees `lo <= hi`.
    pub(crate) fn new_unchecked(lo: Tag, hi: Tag) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn rational(lo: Rational, hi: Rational) -> Option<Self> {
        Self::new(Tag::rational(lo), Tag::rational(hi))
    }

    /// The unit interval `[0, 1]`.
    pub fn unit() -> Self {
        Interval { lo: Tag::int(0), hi: Tag::int(1) }
    }

    pub fn lo(&self) -> &Tag {
        &self.lo
    }

    pub fn hi(&self) -> &Tag {
        &self.hi
    }

    pub fn length(&self) -> Tag {
        &self.hi - &self.lo
    }

    pub fn contains(&self, t: &Tag) -> bool {
        &self.lo <= t && t <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn midpoint(&self) -> Tag {
        self.lo.midpoint(&self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// An open interval `(lo, hi)`, as produced by a gauge around a center.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OpenInterval {
    pub lo: Tag,
    pub hi: Tag,
}

impl OpenInterval {
    pub fn new(lo: Tag, hi: Tag) -> Self {
        OpenInterval { lo, hi }
    }

    /// `(center − radius, center + radius)`.
    pub fn around(center: &Tag, radius: &Rational) -> Self {
        OpenInterval { lo: center.add_rational(&-radius), hi: center.add_rational(radius) }
    }

    pub fn contains(&self, t: &Tag) -> bool {
        &self.lo < t && t < &self.hi
    }
}

impl fmt::Display for OpenInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}
