//! Random generators shared by the property tests and the acceptance suite.
#![allow(dead_code)]

use gaugeint::gauge::positive_lower_bound;
use gaugeint::{Error, Gauge, Interval, Item, OpenInterval, Rational, Tag, TaggedPartition};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// A point of `[0, 1]`: a dyadic with up to 12 bits, sometimes shifted by a
/// small multiple of √2.
pub fn random_point(rng: &mut ChaCha8Rng) -> Tag {
    let a = Tag::ratio(rng.gen_range(0..=4096), 4096);
    if rng.gen_bool(0.25) {
        let s = Tag::sqrt2().scale(&q(rng.gen_range(-8..=8), 65536));
        let t = &a + &s;
        if t.signum() >= 0 && t <= Tag::int(1) {
            return t;
        }
    }
    a
}

/// A gauge on `[0, 1]` drawn from a few families: constants, `a|x − c| + b`,
/// and two-valued step gauges (discontinuous).
pub fn random_gauge(rng: &mut ChaCha8Rng) -> Gauge {
    match rng.gen_range(0..3) {
        0 => Gauge::constant(q(1, rng.gen_range(1..=64))),
        1 => {
            let a = q(rng.gen_range(0..=8), rng.gen_range(1..=8));
            let b = q(1, rng.gen_range(2..=128));
            let c = random_point(rng);
            Gauge::from_fn("linear", move |t: &Tag| {
                let v = (t - &c).abs().scale(&a).add_rational(&b);
                positive_lower_bound(&v).ok_or_else(|| Error::NonPositiveGauge(t.clone()))
            })
        }
        _ => {
            let r1 = q(1, rng.gen_range(1..=64));
            let r2 = q(1, rng.gen_range(1..=64));
            let c = random_point(rng);
            Gauge::from_fn("step", move |t: &Tag| Ok(if *t < c { r1.clone() } else { r2.clone() }))
        }
    }
}

/// A tagged partition of `[0, 1]` with random cut points and tags.
pub fn random_partition(rng: &mut ChaCha8Rng) -> TaggedPartition {
    let n = rng.gen_range(0..12);
    let mut cuts: Vec<Tag> = (0..n).map(|_| random_point(rng)).collect();
    cuts.push(Tag::zero());
    cuts.push(Tag::int(1));
    cuts.sort();
    cuts.dedup();
    let items = cuts
        .windows(2)
        .map(|w| {
            let iv = Interval::new(w[0].clone(), w[1].clone()).unwrap();
            let mid = iv.midpoint();
            let choices = [
                iv.lo().clone(),
                iv.hi().clone(),
                mid.clone(),
                &mid + &(&iv.length() * &Tag::new(Rational::zero(), q(1, 8))),
            ];
            Item::new(choices.choose(rng).unwrap().clone(), iv)
        })
        .collect();
    TaggedPartition::of(items, &Interval::unit()).unwrap()
}

/// A family of open intervals with endpoints on a `2^{−10}` grid, sometimes
/// perturbed by a multiple of √2.
pub fn random_family(rng: &mut ChaCha8Rng) -> Vec<OpenInterval> {
    let k = rng.gen_range(1..=8);
    (0..k)
        .map(|_| {
            let mut a = Tag::ratio(rng.gen_range(-64..=1024), 1024);
            let mut b = Tag::ratio(rng.gen_range(0..=1088), 1024);
            if rng.gen_bool(0.2) {
                a = &a + &Tag::sqrt2().scale(&q(rng.gen_range(-4..=4), 1 << 14));
            }
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            OpenInterval::new(a, b)
        })
        .collect()
}

/// Grid oracle: `true` iff every point `j/2^bits` of `[0, 1]` is in some
/// interval (binary64 comparisons; the endpoints are exact or far from grid
/// points).
pub fn grid_covers(family: &[OpenInterval], bits: u32) -> bool {
    let iv: Vec<(f64, f64)> = family.iter().map(|o| (o.lo.to_f64(), o.hi.to_f64())).collect();
    let n = 1u32 << bits;
    (0..=n).all(|j| {
        let x = j as f64 / n as f64;
        iv.iter().any(|&(a, b)| a < x && x < b)
    })
}

/// Exhaustive recheck of fineness: for every item, `t − lo ≤ r` and
/// `hi − t ≤ r`, computed independently of [`Item::is_fine`].
pub fn recheck_fine(delta: &Gauge, p: &TaggedPartition) -> bool {
    p.items().iter().all(|it| {
        let r = Tag::rational(delta.radius(&it.tag).unwrap());
        &it.tag - it.interval.lo() <= r && it.interval.hi() - &it.tag <= r
    })
}
