//! Cousin-lemma realisers: δ-fine partitions by bisection, finite subcovers,
//! cover-to-partition conversion and exact cover verification.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gauge::Gauge;
use crate::partition::{Item, TaggedPartition};
use crate::rational::Rational;
use crate::tag::{Interval, OpenInterval, Tag};

/// Built-in candidate positions inside a cell `[a, b]` of length `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Candidate {
    Midpoint,
    Left,
    Right,
    /// `midpoint + √2·off·L`
    MidPlus,
    /// `midpoint − √2·off·L`
    MidMinus,
}

impl Candidate {
    pub const ALL: [Candidate; 5] =
        [Candidate::Midpoint, Candidate::Left, Candidate::Right, Candidate::MidPlus, Candidate::MidMinus];
}

type Proposer = Arc<dyn Fn(&Interval, u32) -> Vec<Tag> + Send + Sync>;

/// The rule that proposes candidate tags for a cell during bisection.
///
/// Candidates are tried in this order: `extra` points lying in the cell, the
/// built-in positions in `order`, then whatever the custom proposer returns.
#[derive(Clone)]
pub struct TagStrategy {
    order: Vec<Candidate>,
    offset: Rational,
    min_depth: u32,
    jitter: Option<u64>,
    extra: Vec<Tag>,
    custom: Option<Proposer>,
    name: String,
}

impl Default for TagStrategy {
    /// Midpoint, left end, right end, then the two irrational offsets at `1/8`.
    fn default() -> Self {
        TagStrategy {
            order: Candidate::ALL.to_vec(),
            offset: Rational::new(1, 8),
            min_depth: 0,
            jitter: None,
            extra: Vec::new(),
            custom: None,
            name: "default".into(),
        }
    }
}

impl TagStrategy {
    pub fn new(order: Vec<Candidate>) -> Self {
        TagStrategy { order, name: "custom-order".into(), ..Self::default() }
    }

    /// Irrational offsets first; useful for gauges that punish rational tags.
    pub fn irrational_first() -> Self {
        TagStrategy {
            order: vec![
                Candidate::MidPlus,
                Candidate::MidMinus,
                Candidate::Midpoint,
                Candidate::Left,
                Candidate::Right,
            ],
            name: "irrational-first".into(),
            ..Self::default()
        }
    }

    /// Set the offset factor of the `MidPlus`/`MidMinus` candidates.
    /// Requires `0 < off < 1/(2√2)` so both stay inside the cell.
    pub fn with_offset(mut self, off: Rational) -> Result<Self> {
        // off·√2 < 1/2  ⇔  2·off² < 1/4
        let two_sq = &(&off * &off) * &Rational::from_integer(2);
        if !off.is_positive() || two_sq >= Rational::new(1, 4) {
            return Err(Error::InvalidArgument(format!("offset {off} must lie in (0, 1/(2√2))")));
        }
        self.offset = off;
        Ok(self)
    }

    /// Never accept a cell shallower than `d`; forces refinement.
    pub fn with_min_depth(mut self, d: u32) -> Self {
        self.min_depth = d;
        self
    }

    /// On the first [`JITTER_LEVELS`] levels, split cells at `7/16`, `1/2` or
    /// `9/16` of their length, the choice being a hash of `seed`, the depth and
    /// the cell. Different seeds give different partitions even for constant
    /// gauges. Deeper cells are bisected, which keeps denominators small.
    pub fn with_jitter(mut self, seed: u64) -> Self {
        self.jitter = Some(seed);
        self
    }

    pub fn jitter(&self) -> Option<u64> {
        self.jitter
    }

    /// Points tried first whenever they lie in the cell.
    pub fn with_extra_points(mut self, pts: impl IntoIterator<Item = Tag>) -> Self {
        self.extra.extend(pts);
        self
    }

    /// Additional proposals computed from the cell and its depth.
    pub fn with_proposer(
        mut self,
        name: impl Into<String>,
        f: impl Fn(&Interval, u32) -> Vec<Tag> + Send + Sync + 'static,
    ) -> Self {
        self.custom = Some(Arc::new(f));
        self.name = name.into();
        self
    }

    pub fn order(&self) -> &[Candidate] {
        &self.order
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    pub fn min_depth(&self) -> u32 {
        self.min_depth
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Every candidate tag for `cell` at `depth`, in trial order.
    pub fn proposals(&self, cell: &Interval, depth: u32) -> Vec<Tag> {
        let mut out: Vec<Tag> = self.extra.iter().filter(|t| cell.contains(t)).cloned().collect();
        let len = cell.length();
        let mid = cell.midpoint();
        let shift = &len * &Tag::new(Rational::zero(), self.offset.clone());
        for c in &self.order {
            out.push(match c {
                Candidate::Midpoint => mid.clone(),
                Candidate::Left => cell.lo().clone(),
                Candidate::Right => cell.hi().clone(),
                Candidate::MidPlus => &mid + &shift,
                Candidate::MidMinus => &mid - &shift,
            });
        }
        if let Some(f) = &self.custom {
            out.extend(f(cell, depth));
        }
        out
    }
}

impl fmt::Debug for TagStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TagStrategy")
            .field("name", &self.name)
            .field("order", &self.order)
            .field("offset", &self.offset)
            .field("min_depth", &self.min_depth)
            .field("jitter", &self.jitter)
            .field("extra", &self.extra)
            .finish()
    }
}

/// Search limits for the partitioner.
#[derive(Clone, Debug)]
pub struct PartitionOptions {
    pub depth_cap: u32,
    /// Abort with [`Error::BudgetExceeded`] after this many items.
    pub budget: Option<u64>,
    /// Require `I ⊆ (t − r, t + r)` instead of the closed containment.
    pub strict: bool,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        PartitionOptions { depth_cap: 64, budget: None, strict: false }
    }
}

impl PartitionOptions {
    pub fn with_depth_cap(depth_cap: u32) -> Self {
        PartitionOptions { depth_cap, ..Self::default() }
    }
}

/// Summary of one streamed partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionStats {
    pub items: u64,
    pub min_depth: u32,
    pub max_depth: u32,
    /// Largest interval length.
    pub mesh: Tag,
}

/// Split positions used by [`TagStrategy::with_jitter`].
const JITTER: [(i64, f64); 3] = [(7, 7.0 / 16.0), (8, 0.5), (9, 9.0 / 16.0)];

/// Levels subject to jitter. Each jittered level adds four bits to endpoint
/// denominators, so deeper jitter pushes radii such as `εx²` out of `i128`.
pub const JITTER_LEVELS: u32 = 6;

struct Search<'a, V> {
    delta: &'a Gauge,
    strategy: &'a TagStrategy,
    opts: &'a PartitionOptions,
    visit: V,
    items: u64,
    min_depth: u32,
    max_depth: u32,
    /// Largest accepted length, with its float value.
    mesh: Option<(Tag, f64)>,
    splits: Vec<(Rational, f64)>,
    /// `need / L`, its float value, and the relative position in the cell,
    /// for each built-in candidate indexed by discriminant.
    coef: Vec<(Tag, f64, f64)>,
    /// `√2·offset`, so that `MidPlus = mid + L·shift_coef`.
    shift_coef: Tag,
}

impl<V: FnMut(Item) -> Result<()>> Search<'_, V> {
    fn split_at(&self, lo_f: f64, depth: u32) -> usize {
        match self.strategy.jitter {
            Some(seed) if depth < JITTER_LEVELS => {
                let mut h = DefaultHasher::new();
                (seed, depth, lo_f.to_bits()).hash(&mut h);
                (h.finish() % 3) as usize
            }
            _ => 1,
        }
    }

    fn children(&mut self, lo: Tag, hi: Tag, len: &Tag, lo_f: f64, len_f: f64, depth: u32) -> Result<()> {
        let (s, s_f) = self.splits[self.split_at(lo_f, depth)].clone();
        let left = len.scale(&s);
        let right = len - &left;
        let cut = &lo + &left;
        let left_f = len_f * s_f;
        self.cell(lo, cut.clone(), left, lo_f, left_f, depth + 1)?;
        self.cell(cut, hi, right, lo_f + left_f, len_f - left_f, depth + 1)
    }

    fn cell(&mut self, lo: Tag, hi: Tag, len: Tag, lo_f: f64, len_f: f64, depth: u32) -> Result<()> {
        if depth >= self.strategy.min_depth {
            let cell = Interval::new_unchecked(lo, hi);
            if let Some(tag) = self.pick(&cell, &len, lo_f, len_f, depth)? {
                self.items += 1;
                if let Some(b) = self.opts.budget {
                    if self.items > b {
                        return Err(Error::BudgetExceeded(b));
                    }
                }
                self.min_depth = self.min_depth.min(depth);
                self.max_depth = self.max_depth.max(depth);
                if self.mesh.as_ref().is_none_or(|(_, m)| len_f > *m) {
                    self.mesh = Some((len, len_f));
                }
                return (self.visit)(Item::new(tag, cell));
            }
            if depth >= self.opts.depth_cap {
                return Err(Error::DepthCapExceeded(self.opts.depth_cap));
            }
            let (lo, hi) = (cell.lo().clone(), cell.hi().clone());
            self.children(lo, hi, &len, lo_f, len_f, depth)
        } else {
            self.children(lo, hi, &len, lo_f, len_f, depth)
        }
    }

    fn pick(&self, cell: &Interval, len: &Tag, lo_f: f64, len_f: f64, depth: u32) -> Result<Option<Tag>> {
        for t in self.strategy.extra.iter().filter(|t| cell.contains(t)) {
            if self.accepts_free(cell, t)? {
                return Ok(Some(t.clone()));
            }
        }
        let mut mid: Option<Tag> = None;
        let mut shift: Option<Tag> = None;
        for &c in &self.strategy.order {
            let (k, kf, pos) = &self.coef[c as usize];
            let need_f = len_f * kf;
            let screened = match self.delta.estimate_f64(lo_f + len_f * pos) {
                Some(est) if est < need_f * (1.0 - 1e-6) => continue,
                Some(_) => true,
                None => false,
            };
            let t = match c {
                Candidate::Left => cell.lo().clone(),
                Candidate::Right => cell.hi().clone(),
                _ => {
                    let m = mid.get_or_insert_with(|| cell.midpoint());
                    match c {
                        Candidate::Midpoint => m.clone(),
                        _ => {
                            let sh = shift.get_or_insert_with(|| len * &self.shift_coef);
                            if c == Candidate::MidPlus {
                                &*m + &*sh
                            } else {
                                &*m - &*sh
                            }
                        }
                    }
                }
            };
            if !screened && self.rejects_early(&t, need_f) {
                continue;
            }
            if self.accepts(&t, &(len * k))? {
                return Ok(Some(t));
            }
        }
        if let Some(f) = &self.strategy.custom {
            for t in f(cell, depth) {
                if !cell.contains(&t) {
                    return Err(Error::Precondition(format!("strategy proposed {t} outside {cell}")));
                }
                if self.accepts_free(cell, &t)? {
                    return Ok(Some(t));
                }
            }
        }
        Ok(None)
    }

    /// The float estimate proves the radius too small.
    fn rejects_early(&self, t: &Tag, need_f: f64) -> bool {
        match self.delta.estimate(t) {
            Some(est) => est < need_f * (1.0 - 1e-9),
            None => false,
        }
    }

    fn accepts_free(&self, cell: &Interval, t: &Tag) -> Result<bool> {
        let need = (t - cell.lo()).max(cell.hi() - t);
        if self.rejects_early(t, need.to_f64()) {
            return Ok(false);
        }
        self.accepts(t, &need)
    }

    fn accepts(&self, t: &Tag, need: &Tag) -> Result<bool> {
        let r = match self.delta.radius(t) {
            Ok(r) => Tag::rational(r),
            Err(Error::Indeterminate { .. }) => return Ok(false),
            Err(e) => return Err(e),
        };
        Ok(if self.opts.strict { &r > need } else { &r >= need })
    }
}

/// Stream a δ-fine tagged partition of `target` to `visit`, left to right.
///
/// Cells are bisected at their exact midpoint (or a jittered split point); a cell `[a, b]` is accepted
/// with the first candidate `t` satisfying `[a, b] ⊆ [t − δ(t), t + δ(t)]`.
/// Candidates whose radius is [`Error::Indeterminate`] are skipped.
pub fn visit_fine_partition(
    delta: &Gauge,
    target: &Interval,
    strategy: &TagStrategy,
    opts: &PartitionOptions,
    visit: impl FnMut(Item) -> Result<()>,
) -> Result<PartitionStats> {
    if opts.depth_cap == 0 {
        return Err(Error::InvalidArgument("depth_cap must be at least 1".into()));
    }
    let s2 = Tag::sqrt2().scale(strategy.offset());
    let half = Tag::ratio(1, 2);
    let coef = Candidate::ALL
        .iter()
        .map(|&c| {
            let k = match c {
                Candidate::Midpoint => half.clone(),
                Candidate::Left | Candidate::Right => Tag::int(1),
                Candidate::MidPlus | Candidate::MidMinus => &half + &s2,
            };
            let kf = k.to_f64();
            let pos = match c {
                Candidate::Midpoint => 0.5,
                Candidate::Left => 0.0,
                Candidate::Right => 1.0,
                Candidate::MidPlus => 0.5 + s2.to_f64(),
                Candidate::MidMinus => 0.5 - s2.to_f64(),
            };
            (k, kf, pos)
        })
        .collect();
    let len = target.length();
    let len_f = len.to_f64();
    let mut search = Search {
        delta,
        strategy,
        opts,
        visit,
        items: 0,
        min_depth: u32::MAX,
        max_depth: 0,
        mesh: None,
        splits: JITTER.iter().map(|&(n, f)| (Rational::new(n, 16), f)).collect(),
        coef,
        shift_coef: s2.clone(),
    };
    search.cell(target.lo().clone(), target.hi().clone(), len.clone(), target.lo().to_f64(), len_f, 0)?;
    let mesh = search.mesh.map_or(len, |(m, _)| m);
    Ok(PartitionStats { items: search.items, min_depth: search.min_depth, max_depth: search.max_depth, mesh })
}

/// A δ-fine tagged partition of `target` (materialised).
pub fn fine_partition(
    delta: &Gauge,
    target: &Interval,
    strategy: &TagStrategy,
    depth_cap: u32,
) -> Result<TaggedPartition> {
    fine_partition_with(delta, target, strategy, &PartitionOptions::with_depth_cap(depth_cap))
}

pub fn fine_partition_with(
    delta: &Gauge,
    target: &Interval,
    strategy: &TagStrategy,
    opts: &PartitionOptions,
) -> Result<TaggedPartition> {
    let mut items = Vec::new();
    visit_fine_partition(delta, target, strategy, opts, |it| {
        items.push(it);
        Ok(())
    })?;
    TaggedPartition::of(items, target)
}

/// Finitely many centers whose open gauge intervals cover a target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subcover {
    centers: Vec<Tag>,
    radii: Vec<Rational>,
    target: Interval,
    verified: bool,
}

impl Subcover {
    /// An unverified subcover; call [`Subcover::verify`] before converting.
    pub fn new(centers: Vec<Tag>, radii: Vec<Rational>, target: Interval) -> Result<Self> {
        if centers.is_empty() || centers.len() != radii.len() {
            return Err(Error::InvalidArgument(format!(
                "{} centers and {} radii",
                centers.len(),
                radii.len()
            )));
        }
        if let Some(r) = radii.iter().find(|r| !r.is_positive()) {
            return Err(Error::InvalidArgument(format!("radius {r} is not positive")));
        }
        Ok(Subcover { centers, radii, target, verified: false })
    }

    /// Runs [`verify_cover`]; on failure reports the first uncovered point.
    pub fn verify(mut self) -> Result<Self> {
        if let Some(x) = find_uncovered(&self.intervals(), &self.target) {
            return Err(Error::Precondition(format!("point {x} of {} is not covered", self.target)));
        }
        self.verified = true;
        Ok(self)
    }

    pub fn centers(&self) -> &[Tag] {
        &self.centers
    }

    pub fn radii(&self) -> &[Rational] {
        &self.radii
    }

    pub fn target(&self) -> &Interval {
        &self.target
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn intervals(&self) -> Vec<OpenInterval> {
        self.centers.iter().zip(&self.radii).map(|(c, r)| OpenInterval::around(c, r)).collect()
    }
}

/// The tags of a strictly ψ-fine partition of `target` with their radii.
///
/// Strict fineness (`I ⊆ (t − r, t + r)`) is what makes the open intervals
/// cover: with closed fineness two neighbouring pieces may each reach a
/// shared endpoint only on the boundary of their open interval.
pub fn finite_subcover(psi: &Gauge, target: &Interval, depth_cap: u32) -> Result<Subcover> {
    finite_subcover_with(psi, target, &TagStrategy::default(), depth_cap)
}

pub fn finite_subcover_with(
    psi: &Gauge,
    target: &Interval,
    strategy: &TagStrategy,
    depth_cap: u32,
) -> Result<Subcover> {
    let opts = PartitionOptions { depth_cap, budget: None, strict: true };
    let mut centers = Vec::new();
    let mut radii = Vec::new();
    visit_fine_partition(psi, target, strategy, &opts, |it| {
        radii.push(psi.radius(&it.tag)?);
        centers.push(it.tag);
        Ok(())
    })?;
    Subcover::new(centers, radii, target.clone())?.verify()
}

/// Turn a verified subcover into a tagged partition of its target whose
/// pieces lie inside the open intervals of their tags.
///
/// A greedy chain is extracted first: starting from the left end, repeatedly
/// take the interval containing the current frontier that reaches furthest
/// right. Consecutive chain intervals overlap and have strictly increasing
/// centers, and each cut is placed at the midpoint of
/// `(max(z_i, lo_{i+1}), min(z_{i+1}, hi_i))`.
///
/// Requires every center of the chain to lie in the target.
pub fn cover_to_partition(sc: &Subcover) -> Result<TaggedPartition> {
    if !sc.verified {
        return Err(Error::UnverifiedSubcover);
    }
    let target = sc.target();
    let ivs = sc.intervals();
    let mut order: Vec<usize> = (0..ivs.len()).collect();
    order.sort_by(|&i, &j| ivs[i].lo.cmp(&ivs[j].lo));

    let mut chain: Vec<usize> = Vec::new();
    let mut frontier = target.lo().clone();
    let mut next = 0;
    let mut best: Option<usize> = None;
    loop {
        while next < order.len() && ivs[order[next]].lo < frontier {
            let i = order[next];
            if best.is_none_or(|b| ivs[i].hi > ivs[b].hi) {
                best = Some(i);
            }
            next += 1;
        }
        let b = match best {
            Some(b) if ivs[b].hi > frontier => b,
            _ => return Err(Error::Precondition(format!("subcover misses {frontier}"))),
        };
        chain.push(b);
        if &ivs[b].hi > target.hi() {
            break;
        }
        frontier = ivs[b].hi.clone();
    }

    for &i in &chain {
        if !target.contains(&sc.centers[i]) {
            return Err(Error::Precondition(format!(
                "center {} lies outside {}",
                sc.centers[i], target
            )));
        }
    }

    let mut items = Vec::with_capacity(chain.len());
    let mut lo = target.lo().clone();
    for w in 0..chain.len() {
        let i = chain[w];
        let hi = if w + 1 == chain.len() {
            target.hi().clone()
        } else {
            let j = chain[w + 1];
            let left = sc.centers[i].clone().max(ivs[j].lo.clone());
            let right = sc.centers[j].clone().min(ivs[i].hi.clone());
            left.midpoint(&right)
        };
        let iv = Interval::new(lo, hi.clone())
            .ok_or_else(|| Error::Precondition("chain centers are not increasing".into()))?;
        items.push(Item::new(sc.centers[i].clone(), iv));
        lo = hi;
    }
    TaggedPartition::of(items, target)
}

/// `true` iff the union of the open intervals contains every point of `target`.
pub fn verify_cover(intervals: &[OpenInterval], target: &Interval) -> bool {
    find_uncovered(intervals, target).is_none()
}

/// A point of `target` outside every interval, or `None` if covered.
///
/// Sweep: `reach` is the least point not yet known to be covered. Among the
/// intervals starting strictly left of it, the one reaching furthest right
/// either moves `reach` forward or proves it uncovered.
pub fn find_uncovered(intervals: &[OpenInterval], target: &Interval) -> Option<Tag> {
    let mut sorted: Vec<&OpenInterval> = intervals.iter().filter(|iv| iv.lo < iv.hi).collect();
    sorted.sort_by(|x, y| x.lo.cmp(&y.lo));
    let mut reach = target.lo().clone();
    let mut next = 0;
    let mut best: Option<&Tag> = None;
    loop {
        while next < sorted.len() && sorted[next].lo < reach {
            let hi = &sorted[next].hi;
            if best.is_none_or(|b| hi > b) {
                best = Some(hi);
            }
            next += 1;
        }
        match best {
            Some(hi) if hi > &reach => {
                if hi > target.hi() {
                    return None;
                }
                reach = hi.clone();
            }
            _ => return Some(reach),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::is_fine;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn open(a: (i64, i64), b: (i64, i64)) -> OpenInterval {
        OpenInterval::new(Tag::ratio(a.0, a.1), Tag::ratio(b.0, b.1))
    }

    #[test]
    fn unit_gauge_gives_single_midpoint_item() {
        let p = fine_partition(&Gauge::constant(q(1, 1)), &Interval::unit(), &TagStrategy::default(), 8)
            .unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.items()[0].tag, Tag::ratio(1, 2));
    }

    #[test]
    fn creeping_gauge_ends_with_right_endpoint_tag() {
        let g = Gauge::from_fn("(1-x)/2", |t: &Tag| {
            if t == &Tag::int(1) {
                Ok(q(1, 4))
            } else {
                let v = (&Tag::int(1) - t).scale(&q(1, 2));
                Ok(crate::gauge::positive_lower_bound(&v).unwrap())
            }
        });
        let p = fine_partition(&g, &Interval::unit(), &TagStrategy::default(), 16).unwrap();
        assert!(is_fine(&g, &p).unwrap());
        assert_eq!(p.items().last().unwrap().tag, Tag::int(1));
    }

    #[test]
    fn depth_cap_is_reported() {
        let g = Gauge::constant(q(1, 1000));
        let e = fine_partition(&g, &Interval::unit(), &TagStrategy::default(), 3).unwrap_err();
        assert_eq!(e, Error::DepthCapExceeded(3));
        assert_eq!(e.to_string(), "no δ-fine partition found to depth 3");
    }

    #[test]
    fn budget_is_enforced() {
        let opts = PartitionOptions { depth_cap: 20, budget: Some(10), strict: false };
        let g = Gauge::constant(q(1, 1000));
        let e = visit_fine_partition(&g, &Interval::unit(), &TagStrategy::default(), &opts, |_| Ok(()))
            .unwrap_err();
        assert_eq!(e, Error::BudgetExceeded(10));
    }

    #[test]
    fn min_depth_forces_refinement() {
        let s = TagStrategy::default().with_min_depth(3);
        let p = fine_partition(&Gauge::constant(q(1, 1)), &Interval::unit(), &s, 8).unwrap();
        assert_eq!(p.len(), 8);
    }

    #[test]
    fn extra_points_become_tags() {
        let x = Tag::ratio(1, 3);
        let g = crate::gauge::split_gauge(&Gauge::constant(q(1, 4)), &Gauge::constant(q(1, 4)), &x).unwrap();
        let s = TagStrategy::default().with_extra_points([x.clone()]);
        let p = fine_partition(&g, &Interval::unit(), &s, 40).unwrap();
        assert!(is_fine(&g, &p).unwrap());
        assert!(p.tags().any(|t| t == &x));
    }

    #[test]
    fn offsets_stay_inside() {
        assert!(TagStrategy::default().with_offset(q(1, 3)).is_ok());
        assert!(TagStrategy::default().with_offset(q(3, 8)).is_err());
        assert!(TagStrategy::default().with_offset(q(0, 1)).is_err());
    }

    #[test]
    fn finite_subcover_examples() {
        let sc = finite_subcover(&Gauge::constant(q(1, 1)), &Interval::unit(), 8).unwrap();
        assert_eq!(sc.len(), 1);
        assert_eq!(sc.radii(), &[q(1, 1)]);
        let sc = finite_subcover(&Gauge::constant(q(1, 10)), &Interval::unit(), 16).unwrap();
        assert!(sc.len() >= 5);
        assert!(verify_cover(&sc.intervals(), &Interval::unit()));
    }

    #[test]
    fn half_gauge_needs_strict_fineness() {
        // Closed fineness accepts [0,1] tagged 1/2 with radius 1/2, whose open
        // interval (0,1) misses both endpoints.
        let g = Gauge::constant(q(1, 2));
        let closed = fine_partition(&g, &Interval::unit(), &TagStrategy::default(), 8).unwrap();
        assert_eq!(closed.len(), 1);
        let sc = finite_subcover(&g, &Interval::unit(), 8).unwrap();
        assert!(sc.len() > 1);
        assert!(sc.is_verified());
    }

    #[test]
    fn verify_cover_examples() {
        let t = Interval::unit();
        assert!(verify_cover(&[open((-1, 10), (6, 10)), open((1, 2), (11, 10))], &t));
        assert!(!verify_cover(&[open((-1, 10), (1, 2)), open((1, 2), (11, 10))], &t));
        assert_eq!(
            find_uncovered(&[open((-1, 10), (1, 2)), open((1, 2), (11, 10))], &t),
            Some(Tag::ratio(1, 2))
        );
        assert_eq!(find_uncovered(&[], &t), Some(Tag::int(0)));
        assert_eq!(find_uncovered(&[open((0, 1), (2, 1))], &t), Some(Tag::int(0)));
        assert_eq!(find_uncovered(&[open((-1, 1), (1, 1))], &t), Some(Tag::int(1)));
    }

    #[test]
    fn cover_to_partition_examples() {
        let sc = Subcover::new(vec![Tag::ratio(1, 2)], vec![q(1, 1)], Interval::unit()).unwrap();
        assert_eq!(cover_to_partition(&sc), Err(Error::UnverifiedSubcover));
        let p = cover_to_partition(&sc.verify().unwrap()).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.items()[0].tag, Tag::ratio(1, 2));

        let sc = Subcover::new(vec![Tag::ratio(1, 4), Tag::ratio(3, 4)], vec![q(1, 2), q(1, 2)], Interval::unit())
            .unwrap()
            .verify()
            .unwrap();
        let p = cover_to_partition(&sc).unwrap();
        assert!((2..=3).contains(&p.len()));
        for it in p.items() {
            let k = sc.centers().iter().position(|c| c == &it.tag).unwrap();
            let o = OpenInterval::around(&sc.centers()[k], &sc.radii()[k]);
            assert!(o.contains(it.interval.lo()) && o.contains(it.interval.hi()));
        }
    }

    #[test]
    fn round_trip_is_fine() {
        let g = Gauge::from_fn("x/4+1/50", |t: &Tag| {
            Ok(crate::gauge::positive_lower_bound(&t.scale(&q(1, 4)).add_rational(&q(1, 50))).unwrap())
        });
        let sc = finite_subcover(&g, &Interval::unit(), 30).unwrap();
        let p = cover_to_partition(&sc).unwrap();
        assert!(is_fine(&g, &p).unwrap());
    }
}
