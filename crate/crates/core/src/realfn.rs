//! Real-valued integrands evaluated at exact tags.

use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::tag::Tag;

/// Evaluation behind a [`RealFn`].
pub trait RealFunction: Send + Sync {
    /// Value at an exact tag (binary64 approximation of the true value).
    fn eval(&self, t: &Tag) -> Result<f64>;

    /// Fast path on a binary64 argument. `None` means the value cannot be
    /// recovered from an approximate argument (e.g. it depends on rationality).
    fn eval_f64(&self, _x: f64) -> Option<f64> {
        None
    }

    /// `true` when the value depends only on whether the input is rational.
    fn rationality_only(&self) -> bool {
        false
    }
}

#[derive(Clone)]
pub struct RealFn {
    inner: Arc<dyn RealFunction>,
    name: Arc<str>,
    fast: bool,
}

impl RealFn {
    /// `fast` declares that [`RealFunction::eval_f64`] is total on the domain.
    pub fn new(name: impl Into<String>, f: impl RealFunction + 'static, fast: bool) -> Self {
        RealFn { inner: Arc::new(f), name: name.into().into(), fast }
    }

    /// A function of the real value only, given as a float closure.
    pub fn from_f64(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        struct Plain<F>(F);
        impl<F: Fn(f64) -> f64 + Send + Sync> RealFunction for Plain<F> {
            fn eval(&self, t: &Tag) -> Result<f64> {
                Ok((self.0)(t.to_f64()))
            }
            fn eval_f64(&self, x: f64) -> Option<f64> {
                Some((self.0)(x))
            }
        }
        RealFn::new(name, Plain(f), true)
    }

    pub fn constant(c: f64) -> Self {
        RealFn::from_f64(format!("const({c})"), move |_| c)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, t: &Tag) -> Result<f64> {
        self.inner.eval(t)
    }

    pub fn has_fast_path(&self) -> bool {
        self.fast
    }

    pub fn eval_f64(&self, x: f64) -> Option<f64> {
        if self.fast {
            self.inner.eval_f64(x)
        } else {
            None
        }
    }

    pub fn rationality_only(&self) -> bool {
        self.inner.rationality_only()
    }

    /// `|f|`.
    pub fn abs(&self) -> RealFn {
        struct Abs(RealFn);
        impl RealFunction for Abs {
            fn eval(&self, t: &Tag) -> Result<f64> {
                Ok(self.0.eval(t)?.abs())
            }
            fn eval_f64(&self, x: f64) -> Option<f64> {
                self.0.eval_f64(x).map(f64::abs)
            }
            fn rationality_only(&self) -> bool {
                self.0.rationality_only()
            }
        }
        RealFn::new(format!("|{}|", self.name), Abs(self.clone()), self.fast)
    }
}

impl fmt::Debug for RealFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealFn({})", self.name)
    }
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
