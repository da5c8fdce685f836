//! Gauges (positive radius functions) and gauge moduli.
//!
//! A gauge returns a *rational lower bound* of its mathematical radius at every
//! tag. Fineness checks compare exact tags against that bound, so a "fine"
//! verdict is always sound: rounding a radius down can only reject.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::tag::Tag;

/// The evaluation behind a [`Gauge`].
pub trait GaugeFn: Send + Sync {
    /// Rational lower bound of the radius at `t`.
    fn radius(&self, t: &Tag) -> Result<Rational>;

    /// Cheap floating-point estimate of the radius. Partitioners use it only to
    /// discard hopeless candidates before the exact check.
    fn estimate(&self, _t: &Tag) -> Option<f64> {
        None
    }

    /// Estimate from a binary64 position that may be off by a few ulps.
    /// Implement only for gauges whose value is well-conditioned in the
    /// position; the partitioner then skips building exact candidates.
    fn estimate_f64(&self, _x: f64) -> Option<f64> {
        None
    }
}

impl<F> GaugeFn for F
where
    F: Fn(&Tag) -> Result<Rational> + Send + Sync,
{
    fn radius(&self, t: &Tag) -> Result<Rational> {
        self(t)
    }
}

#[derive(Clone)]
pub struct Gauge {
    inner: Arc<dyn GaugeFn>,
    name: Arc<str>,
    continuous: bool,
}

impl Gauge {
    pub fn new(name: impl Into<String>, f: impl GaugeFn + 'static) -> Self {
        Gauge { inner: Arc::new(f), name: name.into().into(), continuous: false }
    }

    /// Wrap a closure returning exact radii.
    pub fn from_fn(
        name: impl Into<String>,
        f: impl Fn(&Tag) -> Result<Rational> + Send + Sync + 'static,
    ) -> Self {
        Gauge::new(name, f)
    }

    pub fn constant(r: Rational) -> Self {
        assert!(r.is_positive(), "constant gauge needs a positive radius");
        Gauge::new(format!("const({r})"), Constant(r)).with_continuous(true)
    }

    /// Mark the gauge as continuous (enables rational-center Lindelöf covers).
    pub fn with_continuous(mut self, continuous: bool) -> Self {
        self.continuous = continuous;
        self
    }

    pub fn is_continuous(&self) -> bool {
        self.continuous
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Radius lower bound at `t`, checked to be strictly positive.
    pub fn radius(&self, t: &Tag) -> Result<Rational> {
        let r = self.inner.radius(t)?;
        if !r.is_positive() {
            return Err(Error::NonPositiveGauge(t.clone()));
        }
        Ok(r)
    }

    pub fn estimate(&self, t: &Tag) -> Option<f64> {
        self.inner.estimate(t)
    }

    pub fn estimate_f64(&self, x: f64) -> Option<f64> {
        self.inner.estimate_f64(x)
    }
}

impl fmt::Debug for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gauge({})", self.name)
    }
}

struct Constant(Rational);

impl GaugeFn for Constant {
    fn radius(&self, _t: &Tag) -> Result<Rational> {
        Ok(self.0.clone())
    }

    fn estimate(&self, _t: &Tag) -> Option<f64> {
        Some(self.0.to_f64())
    }

    fn estimate_f64(&self, _x: f64) -> Option<f64> {
        Some(self.0.to_f64())
    }
}

/// A positive dyadic lower bound of a positive element of ℚ(√2), exact for
/// rationals.
pub fn positive_lower_bound(t: &Tag) -> Option<Rational> {
    if t.signum() <= 0 {
        return None;
    }
    if let Some(q) = t.as_rational() {
        return Some(q.clone());
    }
    // Without heavy cancellation between the two parts, the float value is
    // within 2^-39 of `t` relatively (each part is off by at most an ulp or
    // so), and shrinking it by 2^-30 gives a dyadic lower bound.
    let af = t.rational_part().approx_f64();
    let bf = t.sqrt2_part().approx_f64() * std::f64::consts::SQRT_2;
    let v = af + bf;
    if v.is_normal() && v > 0.0 && af.abs().max(bf.abs()) <= v * 1024.0 {
        if let Some(q) = Rational::from_f64(v * (1.0 - f64::powi(2.0, -30))) {
            if q.is_positive() {
                return Some(q);
            }
        }
    }
    let mut bits = 64;
    loop {
        let lb = t.floor_dyadic(bits);
        if lb.is_positive() {
            return Some(lb);
        }
        bits *= 2;
    }
}

/// An ε-indexed family of gauges.
#[derive(Clone)]
pub struct GaugeModulus {
    family: Arc<dyn Fn(&Rational) -> Gauge + Send + Sync>,
    name: Arc<str>,
}

impl GaugeModulus {
    pub fn new(
        name: impl Into<String>,
        family: impl Fn(&Rational) -> Gauge + Send + Sync + 'static,
    ) -> Self {
        GaugeModulus { family: Arc::new(family), name: name.into().into() }
    }

    /// The modulus whose every member is the same constant-radius gauge.
    pub fn constant(r: Rational) -> Self {
        let g = Gauge::constant(r);
        GaugeModulus::new(g.name().to_string(), move |_| g.clone())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn at(&self, eps: &Rational) -> Result<Gauge> {
        if !eps.is_positive() {
            return Err(Error::InvalidArgument(format!("ε must be positive, got {eps}")));
        }
        Ok((self.family)(eps))
    }

    /// Pointwise scaling `Φ'(ε) = k·Φ(ε)` for `0 < k`.
    pub fn scaled(&self, k: Rational) -> GaugeModulus {
        let base = self.clone();
        GaugeModulus::new(format!("{}*{}", k, self.name), move |eps| scale_gauge(&base.at(eps).expect("ε > 0"), k.clone()))
    }
}

impl fmt::Debug for GaugeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GaugeModulus({})", self.name)
    }
}

fn scale_gauge(g: &Gauge, k: Rational) -> Gauge {
    struct Scaled(Gauge, Rational, f64);
    impl GaugeFn for Scaled {
        fn radius(&self, t: &Tag) -> Result<Rational> {
            Ok(&self.0.radius(t)? * &self.1)
        }
        fn estimate(&self, t: &Tag) -> Option<f64> {
            self.0.estimate(t).map(|r| r * self.2)
        }
        fn estimate_f64(&self, x: f64) -> Option<f64> {
            self.0.estimate_f64(x).map(|r| r * self.2)
        }
    }
    let kf = k.to_f64();
    Gauge::new(format!("{}*{}", k, g.name()), Scaled(g.clone(), k, kf)).with_continuous(g.is_continuous())
}

/// Pointwise minimum of two gauges; fine for it means fine for both.
pub fn min_gauge(d1: &Gauge, d2: &Gauge) -> Gauge {
    struct Min(Gauge, Gauge);
    impl GaugeFn for Min {
        fn radius(&self, t: &Tag) -> Result<Rational> {
            Ok(self.0.radius(t)?.min(self.1.radius(t)?))
        }
        fn estimate(&self, t: &Tag) -> Option<f64> {
            Some(self.0.estimate(t)?.min(self.1.estimate(t)?))
        }
        fn estimate_f64(&self, x: f64) -> Option<f64> {
            Some(self.0.estimate_f64(x)?.min(self.1.estimate_f64(x)?))
        }
    }
    Gauge::new(format!("min({}, {})", d1.name(), d2.name()), Min(d1.clone(), d2.clone()))
        .with_continuous(d1.is_continuous() && d2.is_continuous())
}

/// The gauge that glues `d1` on `[0, x]` to `d2` on `[x, 1]`:
///
/// ```text
///   y < x :  min(d1(y), (x − y)/2)
///   y = x :  min(d1(x), d2(x))
///   y > x :  min(d2(y), (y − x)/2)
/// ```
///
/// No interval tagged away from `x` can reach `x`, so every fine partition has
/// `x` as a tag and splits cleanly there.
pub fn split_gauge(d1: &Gauge, d2: &Gauge, x: &Tag) -> Result<Gauge> {
    if x.signum() <= 0 || x >= &Tag::int(1) {
        return Err(Error::SplitPointOutOfRange(x.clone()));
    }
    struct Split {
        left: Gauge,
        right: Gauge,
        x: Tag,
    }
    impl GaugeFn for Split {
        fn radius(&self, y: &Tag) -> Result<Rational> {
            match y.cmp(&self.x) {
                std::cmp::Ordering::Equal => Ok(self.left.radius(y)?.min(self.right.radius(y)?)),
                std::cmp::Ordering::Less => {
                    let half_gap = (&self.x - y).scale(&Rational::new(1, 2));
                    let gap = positive_lower_bound(&half_gap).expect("y < x");
                    Ok(self.left.radius(y)?.min(gap))
                }
                std::cmp::Ordering::Greater => {
                    let half_gap = (y - &self.x).scale(&Rational::new(1, 2));
                    let gap = positive_lower_bound(&half_gap).expect("y > x");
                    Ok(self.right.radius(y)?.min(gap))
                }
            }
        }
        fn estimate(&self, y: &Tag) -> Option<f64> {
            // The gap is formed exactly so that points close to x keep their precision.
            match y.cmp(&self.x) {
                std::cmp::Ordering::Less => Some(self.left.estimate(y)?.min((&self.x - y).to_f64() / 2.0)),
                std::cmp::Ordering::Greater => Some(self.right.estimate(y)?.min((y - &self.x).to_f64() / 2.0)),
                std::cmp::Ordering::Equal => None,
            }
        }
    }
    Ok(Gauge::new(
        format!("split({}, {}, {})", d1.name(), d2.name(), x),
        Split { left: d1.clone(), right: d2.clone(), x: x.clone() },
    ))
}
