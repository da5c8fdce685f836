//! Tagged partitions, fineness, mesh and Riemann sums.

use crate::error::{Error, Result};
use crate::gauge::Gauge;
use crate::realfn::{Accumulator, RealFn};
use crate::tag::{Interval, Tag};

/// One `(tag, interval)` pair of a tagged partition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Item {
    pub tag: Tag,
    pub interval: Interval,
}

impl Item {
    pub fn new(tag: Tag, interval: Interval) -> Self {
        Item { tag, interval }
    }

    /// Closed containment `I ⊆ [t − r, t + r]` for the gauge's radius at the tag.
    pub fn is_fine(&self, delta: &Gauge) -> Result<bool> {
        let r = delta.radius(&self.tag)?;
        Ok(self.fits(&r))
    }

    pub fn fits(&self, r: &crate::Rational) -> bool {
        self.interval.lo() >= &self.tag.add_rational(&-r) && self.interval.hi() <= &self.tag.add_rational(r)
    }
}

/// A finite sequence of contiguous closed intervals, each carrying a tag
/// inside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedPartition {
    items: Vec<Item>,
}

impl TaggedPartition {
    /// Validates contiguity (`hi_k == lo_{k+1}`) and tag containment.
    pub fn new(items: Vec<Item>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::EmptyPartition);
        }
        for (k, it) in items.iter().enumerate() {
            if !it.interval.contains(&it.tag) {
                return Err(Error::MalformedPartition(format!(
                    "item {k}: tag {} not in {}",
                    it.tag, it.interval
                )));
            }
        }
        for (k, w) in items.windows(2).enumerate() {
            if w[0].interval.hi() != w[1].interval.lo() {
                return Err(Error::MalformedPartition(format!(
                    "items {k} and {}: {} does not meet {}",
                    k + 1,
                    w[0].interval,
                    w[1].interval
                )));
            }
        }
        Ok(TaggedPartition { items })
    }

    /// Validates as [`TaggedPartition::new`] and additionally that the union is `target`.
    pub fn of(items: Vec<Item>, target: &Interval) -> Result<Self> {
        let p = Self::new(items)?;
        if !p.partitions(target) {
            return Err(Error::MalformedPartition(format!("union is {}, expected {}", p.span(), target)));
        }
        Ok(p)
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn tags(&self) -> impl Iterator<Item = &Tag> {
        self.items.iter().map(|it| &it.tag)
    }

    /// The interval covered by the union of the items.
    pub fn span(&self) -> Interval {
        let lo = self.items[0].interval.lo().clone();
        let hi = self.items[self.items.len() - 1].interval.hi().clone();
        Interval::new(lo, hi).expect("contiguous items are ordered")
    }

    pub fn partitions(&self, target: &Interval) -> bool {
        &self.span() == target
    }

    pub fn into_items(self) -> Vec<Item> {
        self.items
    }
}

/// Largest interval length, exact.
pub fn mesh(p: &TaggedPartition) -> Result<Tag> {
    p.items
        .iter()
        .map(|it| it.interval.length())
        .max()
        .ok_or(Error::EmptyPartition)
}

/// `Σ f(t_i)·|I_i|` with exact lengths and approximate values.
pub fn riemann_sum(f: &RealFn, p: &TaggedPartition) -> Result<f64> {
    let mut acc = Accumulator::default();
    for it in &p.items {
        let v = f.eval(&it.tag)?;
        if !v.is_finite() {
            return Err(Error::Undefined { tag: it.tag.clone(), reason: format!("value {v}") });
        }
        acc.add(v * it.interval.length().to_f64());
    }
    Ok(acc.value())
}

/// `true` iff every item satisfies `I_i ⊆ [t_i − δ(t_i), t_i + δ(t_i)]`.
pub fn is_fine(delta: &Gauge, p: &TaggedPartition) -> Result<bool> {
    for it in &p.items {
        if !it.is_fine(delta)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Uniform `n`-piece partition of `target` with tags chosen by `tag_at`.
pub fn uniform(target: &Interval, n: u32, tag_at: impl Fn(&Interval) -> Tag) -> TaggedPartition {
    assert!(n > 0);
    let len = target.length();
    let step = len.scale(&crate::Rational::new(1, n as i64));
    let mut items = Vec::with_capacity(n as usize);
    let mut lo = target.lo().clone();
    for k in 0..n {
        let hi = if k + 1 == n { target.hi().clone() } else { &lo + &step };
        let iv = Interval::new(lo.clone(), hi.clone()).expect("non-negative step");
        items.push(Item::new(tag_at(&iv), iv));
        lo = hi;
    }
    TaggedPartition { items }
}
