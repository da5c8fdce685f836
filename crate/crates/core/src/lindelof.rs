//! Countable subcovers: gauge covers of ℝ glued from finite subcovers of
//! `[−N, N]`, the Baire-space enumeration behind countable-subcover realisers,
//! and a bounded demonstration of the well-foundedness reduction.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::cousin::{finite_subcover_with, verify_cover, TagStrategy};
use crate::error::{Error, Result};
use crate::funcs::rationals;
use crate::gauge::{Gauge, GaugeFn};
use crate::rational::Rational;
use crate::tag::{Interval, OpenInterval, Tag};

/// One interval `(center − radius, center + radius)` of a countable subcover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverEntry {
    pub center: Tag,
    pub radius: Rational,
    /// The first block `N` whose subcover of `[−N, N]` produced this pair.
    pub block: u32,
}

impl CoverEntry {
    pub fn interval(&self) -> OpenInterval {
        OpenInterval::around(&self.center, &self.radius)
    }
}

/// A lazily generated countable subcover of a gauge cover of ℝ.
///
/// Block `N` is `finite_subcover(ψ, [−N, N])`. Entries are numbered densely in
/// generation order, and a pair already emitted by an earlier block is not
/// repeated; [`CountableSubcover::block_indices`] still lists it for block `N`.
pub struct CountableSubcover {
    psi: Gauge,
    n_max: u32,
    depth_cap: u32,
    strategy: TagStrategy,
    entries: Vec<CoverEntry>,
    seen: HashSet<(Tag, Rational)>,
    blocks: Vec<Vec<usize>>,
}

/// Blockwise countable subcover of `ψ` over `[−1, 1] ⊆ … ⊆ [−N_max, N_max]`.
/// Nothing is computed until entries are requested.
pub fn countable_subcover_reals(psi: &Gauge, n_max: u32, depth_cap: u32) -> CountableSubcover {
    CountableSubcover {
        psi: psi.clone(),
        n_max,
        depth_cap,
        strategy: TagStrategy::default(),
        entries: Vec::new(),
        seen: HashSet::new(),
        blocks: Vec::new(),
    }
}

impl CountableSubcover {
    pub fn with_strategy(mut self, strategy: TagStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// Blocks generated so far.
    pub fn blocks_done(&self) -> u32 {
        self.blocks.len() as u32
    }

    /// Entries generated so far.
    pub fn entries(&self) -> &[CoverEntry] {
        &self.entries
    }

    fn next_block(&mut self) -> Result<bool> {
        let n = self.blocks.len() as u32 + 1;
        if n > self.n_max {
            return Ok(false);
        }
        let block = Interval::rational(Rational::from_integer(-(n as i64)), Rational::from_integer(n as i64))
            .expect("−N < N");
        let sc = finite_subcover_with(&self.psi, &block, &self.strategy, self.depth_cap)
            .map_err(|e| Error::Block { n, source: Box::new(e) })?;
        let mut idx = Vec::with_capacity(sc.len());
        for (c, r) in sc.centers().iter().zip(sc.radii()) {
            let key = (c.clone(), r.clone());
            if self.seen.insert(key) {
                self.entries.push(CoverEntry { center: c.clone(), radius: r.clone(), block: n });
                idx.push(self.entries.len() - 1);
            } else {
                let k = self.entries.iter().position(|e| &e.center == c && &e.radius == r).expect("seen");
                if !idx.contains(&k) {
                    idx.push(k);
                }
            }
        }
        self.blocks.push(idx);
        Ok(true)
    }

    /// Entry `i`, generating blocks as needed; `None` past the last block.
    pub fn get(&mut self, i: usize) -> Result<Option<&CoverEntry>> {
        while self.entries.len() <= i {
            if !self.next_block()? {
                return Ok(None);
            }
        }
        Ok(self.entries.get(i))
    }

    /// Generate every block and return all entries.
    pub fn materialize(&mut self) -> Result<&[CoverEntry]> {
        while self.next_block()? {}
        Ok(&self.entries)
    }

    /// Indices of the entries making up block `n` (generating it if needed).
    pub fn block_indices(&mut self, n: u32) -> Result<&[usize]> {
        if n == 0 || n > self.n_max {
            return Err(Error::InvalidArgument(format!("block {n} outside 1..={}", self.n_max)));
        }
        while self.blocks.len() < n as usize {
            self.next_block()?;
        }
        Ok(&self.blocks[n as usize - 1])
    }

    /// The open intervals of block `n`.
    pub fn block_intervals(&mut self, n: u32) -> Result<Vec<OpenInterval>> {
        let idx = self.block_indices(n)?.to_vec();
        Ok(idx.iter().map(|&k| self.entries[k].interval()).collect())
    }
}

impl fmt::Debug for CountableSubcover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CountableSubcover")
            .field("psi", &self.psi)
            .field("n_max", &self.n_max)
            .field("blocks_done", &self.blocks.len())
            .field("entries", &self.entries.len())
            .finish()
    }
}

/// For gauges flagged continuous: walk the enumeration of ℚ, keep the
/// rationals in `[−N_max, N_max]` as centers, and stop as soon as their
/// intervals cover `[−N_max, N_max]`. Fails after `limit` rationals.
pub fn rational_center_cover(psi: &Gauge, n_max: u32, limit: usize) -> Result<Vec<CoverEntry>> {
    if !psi.is_continuous() {
        return Err(Error::Precondition(format!("{} is not flagged continuous", psi.name())));
    }
    let bound = Rational::from_integer(n_max as i64);
    let target = Interval::rational(-bound.clone(), bound.clone())
        .ok_or_else(|| Error::InvalidArgument("N_max must be positive".into()))?;
    let mut out: Vec<CoverEntry> = Vec::new();
    let mut intervals = Vec::new();
    for q in rationals().take(limit) {
        if q.abs() > bound {
            continue;
        }
        let center = Tag::rational(q);
        let radius = psi.radius(&center)?;
        intervals.push(OpenInterval::around(&center, &radius));
        out.push(CoverEntry { center, radius, block: n_max });
        if verify_cover(&intervals, &target) {
            return Ok(out);
        }
    }
    Err(Error::Effectivity(format!("the first {limit} rationals do not cover {target}")))
}

/// `1/(1 + x²)` rounded down to a rational.
pub fn lorentzian_gauge() -> Gauge {
    struct G;
    impl GaugeFn for G {
        fn radius(&self, x: &Tag) -> Result<Rational> {
            let den = (x * x).add_rational(&Rational::one());
            let up = match den.as_rational() {
                Some(q) => q.clone(),
                None => -(-den).lower_bound(64),
            };
            Ok(up.recip())
        }
        fn estimate(&self, x: &Tag) -> Option<f64> {
            let xf = x.to_f64();
            Some(1.0 / (1.0 + xf * xf))
        }
    }
    Gauge::new("1/(1+x^2)", G).with_continuous(true)
}

/// A sequence of naturals `w * 0^ω`.
#[derive(Clone)]
pub struct BaireSeq {
    prefix: Vec<u32>,
}

impl BaireSeq {
    pub fn new(prefix: Vec<u32>) -> Self {
        BaireSeq { prefix }
    }

    pub fn zeros() -> Self {
        BaireSeq { prefix: Vec::new() }
    }

    pub fn prefix(&self) -> &[u32] {
        &self.prefix
    }

    pub fn entry(&self, i: usize) -> u32 {
        self.prefix.get(i).copied().unwrap_or(0)
    }

    /// The first `n` entries.
    pub fn initial(&self, n: usize) -> Vec<u32> {
        (0..n).map(|i| self.entry(i)).collect()
    }

    pub fn agrees(&self, other: &BaireSeq, n: usize) -> bool {
        (0..n).all(|i| self.entry(i) == other.entry(i))
    }

    fn significant(&self) -> &[u32] {
        let end = self.prefix.iter().rposition(|&b| b != 0).map_or(0, |k| k + 1);
        &self.prefix[..end]
    }
}

impl PartialEq for BaireSeq {
    fn eq(&self, other: &Self) -> bool {
        self.significant() == other.significant()
    }
}

impl Eq for BaireSeq {}

impl fmt::Display for BaireSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨")?;
        for (i, x) in self.prefix.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "⟩*0^ω")
    }
}

impl fmt::Debug for BaireSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BaireSeq({self})")
    }
}

/// A functional `Ψ : ℕ^ℕ → ℕ` with an optional declared continuity bound.
#[derive(Clone)]
pub struct BaireGauge {
    eval: Arc<dyn Fn(&BaireSeq) -> u32 + Send + Sync>,
    bound: Option<u32>,
    name: Arc<str>,
}

impl BaireGauge {
    pub fn new(name: impl Into<String>, bound: Option<u32>, f: impl Fn(&BaireSeq) -> u32 + Send + Sync + 'static) -> Self {
        BaireGauge { eval: Arc::new(f), bound, name: name.into().into() }
    }

    pub fn constant(c: u32) -> Self {
        Self::new(format!("const({c})"), Some(0), move |_| c)
    }

    /// `Ψ(g) = 1 + g(0)`.
    pub fn one_plus_first() -> Self {
        Self::new("1+g(0)", Some(1), |g| 1 + g.entry(0))
    }

    pub fn eval(&self, g: &BaireSeq) -> u32 {
        (self.eval)(g)
    }

    pub fn bound(&self) -> Option<u32> {
        self.bound
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for BaireGauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BaireGauge({})", self.name)
    }
}

/// Largest enumeration [`baire_enumeration`] will build.
pub const MAX_ENUMERATION: u64 = 1 << 24;

fn enumeration_size(entry_bound: u32, length_bound: u32) -> Option<u64> {
    let mut total: u64 = 0;
    let mut level: u64 = 1;
    for _ in 0..=length_bound {
        total = total.checked_add(level)?;
        level = level.checked_mul(entry_bound as u64)?;
    }
    Some(total)
}

/// Every `w` with entries `< entry_bound` and `|w| ≤ length_bound`, as
/// `w * 0^ω`, ordered by length and then lexicographically.
///
/// A sequence `g` inside the bounds is covered by `f_w` with `w = ḡn` for any
/// `n ≤ length_bound` at which `Ψ` is continuous and `Ψ(ḡn * 0^ω) ≤ n`.
pub fn baire_enumeration(entry_bound: u32, length_bound: u32) -> Result<Vec<BaireSeq>> {
    match enumeration_size(entry_bound, length_bound) {
        Some(n) if n <= MAX_ENUMERATION => {}
        _ => {
            return Err(Error::InvalidArgument(format!(
                "enumeration with entries < {entry_bound} and length ≤ {length_bound} exceeds {MAX_ENUMERATION}"
            )))
        }
    }
    let mut out = vec![BaireSeq::zeros()];
    let mut level: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..length_bound {
        let mut next = Vec::with_capacity(level.len() * entry_bound as usize);
        for w in &level {
            for x in 0..entry_bound {
                let mut v = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned().map(BaireSeq::new));
        level = next;
    }
    Ok(out)
}

/// Least `n` with `ḡΨ(f_n) = f̄_nΨ(f_n)`.
pub fn find_cover_index(g: &BaireSeq, psi: &BaireGauge, enumeration: &[BaireSeq]) -> Result<usize> {
    enumeration
        .iter()
        .position(|f| g.agrees(f, psi.eval(f) as usize))
        .ok_or_else(|| {
            Error::BoundsInsufficient(format!("no sequence among {} enumerated covers {g}", enumeration.len()))
        })
}

/// A finitely bounded tree of sequences of naturals.
#[derive(Clone)]
pub struct FiniteTree {
    branching_bound: u32,
    depth_bound: u32,
    member: Arc<dyn Fn(&[u32]) -> bool + Send + Sync>,
}

impl FiniteTree {
    /// Membership is further restricted to entries `< branching_bound` and
    /// length `≤ depth_bound`.
    pub fn new(branching_bound: u32, depth_bound: u32, member: impl Fn(&[u32]) -> bool + Send + Sync + 'static) -> Self {
        FiniteTree { branching_bound, depth_bound, member: Arc::new(member) }
    }

    /// The tree whose nodes are exactly `nodes`.
    pub fn from_nodes(branching_bound: u32, depth_bound: u32, nodes: impl IntoIterator<Item = Vec<u32>>) -> Self {
        let set: HashSet<Vec<u32>> = nodes.into_iter().collect();
        Self::new(branching_bound, depth_bound, move |s| set.contains(s))
    }

    /// Every sequence within the bounds.
    pub fn full(branching_bound: u32, depth_bound: u32) -> Self {
        Self::new(branching_bound, depth_bound, |_| true)
    }

    pub fn branching_bound(&self) -> u32 {
        self.branching_bound
    }

    pub fn depth_bound(&self) -> u32 {
        self.depth_bound
    }

    pub fn contains(&self, s: &[u32]) -> bool {
        s.len() <= self.depth_bound as usize && s.iter().all(|&x| x < self.branching_bound) && (self.member)(s)
    }

    /// `true` iff every member's proper prefixes are members.
    pub fn is_prefix_closed(&self) -> bool {
        let all = baire_enumeration(self.branching_bound, self.depth_bound).unwrap_or_default();
        all.iter().all(|w| !self.contains(w.prefix()) || self.contains(&w.prefix()[..w.prefix().len().saturating_sub(1)]))
    }
}

impl fmt::Debug for FiniteTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteTree(branching ≤ {}, depth ≤ {})", self.branching_bound, self.depth_bound)
    }
}

/// `F_f(g) = n + 1` for the least `n ≤ depth_bound` with `ḡn` outside the
/// tree, and `0` when all of `ḡ0, …, ḡ(depth_bound)` are in it.
pub fn tree_functional(tree: &FiniteTree) -> BaireGauge {
    let t = tree.clone();
    BaireGauge::new("F_tree", Some(tree.depth_bound), move |g| {
        (0..=t.depth_bound)
            .find(|&n| !t.contains(&g.initial(n as usize)))
            .map_or(0, |n| n + 1)
    })
}

/// An enumerated `f_w` with `F_f(f_w) = 0`, i.e. a path through the tree of
/// maximal depth, if one exists.
pub fn xi_witness(tree: &FiniteTree) -> Result<Option<BaireSeq>> {
    let enumeration = baire_enumeration(tree.branching_bound, tree.depth_bound + 1)
        .map_err(|e| Error::BoundsInsufficient(e.to_string()))?;
    let f = tree_functional(tree);
    Ok(enumeration.into_iter().find(|w| f.eval(w) == 0))
}

/// Well-foundedness within the bounds through the enumeration: `false` iff
/// some enumerated `f_w` has `F_f(f_w) = 0`.
pub fn wellfounded_via_xi(tree: &FiniteTree) -> Result<bool> {
    Ok(xi_witness(tree)?.is_none())
}

/// Direct depth-first search for a member path of length `depth_bound`.
pub fn wellfounded_direct(tree: &FiniteTree) -> bool {
    fn has_path(t: &FiniteTree, node: &mut Vec<u32>) -> bool {
        if !t.contains(node) {
            return false;
        }
        if node.len() == t.depth_bound as usize {
            return true;
        }
        for x in 0..t.branching_bound {
            node.push(x);
            let found = has_path(t, node);
            node.pop();
            if found {
                return true;
            }
        }
        false
    }
    !has_path(tree, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn blocks_cover_their_intervals() {
        for psi in [Gauge::constant(q(1, 1)), lorentzian_gauge()] {
            let mut cs = countable_subcover_reals(&psi, 3, 64);
            for n in 1..=3 {
                let t = Interval::rational(q(-n, 1), q(n, 1)).unwrap();
                assert!(verify_cover(&cs.block_intervals(n as u32).unwrap(), &t), "{psi:?} block {n}");
            }
            let all: Vec<_> = cs.materialize().unwrap().iter().map(|e| e.interval()).collect();
            assert!(verify_cover(&all, &Interval::rational(q(-3, 1), q(3, 1)).unwrap()));
            let keys: HashSet<_> = cs.entries().iter().map(|e| (e.center.clone(), e.radius.clone())).collect();
            assert_eq!(keys.len(), cs.entries().len());
        }
    }

    #[test]
    fn lorentzian_centers_crowd_outwards() {
        let mut cs = countable_subcover_reals(&lorentzian_gauge(), 3, 64);
        let entries = cs.materialize().unwrap().to_vec();
        let inner = entries.iter().filter(|e| e.center.abs() <= Tag::int(1)).count();
        let outer = entries.iter().filter(|e| e.center.abs() >= Tag::int(2)).count();
        assert!(outer > inner, "{outer} vs {inner}");
    }

    #[test]
    fn unit_gauge_on_one_block() {
        let mut cs = countable_subcover_reals(&Gauge::constant(q(1, 1)), 1, 64);
        let e = cs.materialize().unwrap();
        assert!(!e.is_empty());
        assert!(cs.get(100).unwrap().is_none());
    }

    #[test]
    fn block_failure_names_the_block() {
        let tiny = Gauge::from_fn("tiny", |t: &Tag| {
            Ok(if t.abs() > Tag::int(1) { Rational::pow2_neg(40) } else { Rational::one() })
        });
        let mut cs = countable_subcover_reals(&tiny, 3, 8);
        match cs.materialize() {
            Err(Error::Block { n, .. }) => assert_eq!(n, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rational_centers_for_continuous_gauges() {
        let c = rational_center_cover(&Gauge::constant(q(1, 1)), 2, 1000).unwrap();
        let iv: Vec<_> = c.iter().map(|e| e.interval()).collect();
        assert!(verify_cover(&iv, &Interval::rational(q(-2, 1), q(2, 1)).unwrap()));
        let discontinuous = Gauge::from_fn("d", |_t: &Tag| Ok(Rational::one()));
        assert!(matches!(rational_center_cover(&discontinuous, 2, 10), Err(Error::Precondition(_))));
    }

    #[test]
    fn enumeration_order_and_size() {
        let e = baire_enumeration(3, 2).unwrap();
        assert_eq!(e.len(), 1 + 3 + 9);
        assert_eq!(e[0].prefix(), &[] as &[u32]);
        assert_eq!(e[1].prefix(), &[0]);
        assert_eq!(e[4].prefix(), &[0, 0]);
        assert_eq!(e[12].prefix(), &[2, 2]);
        assert!(baire_enumeration(1000, 10).is_err());
    }

    #[test]
    fn cover_index_examples() {
        let e = baire_enumeration(3, 2).unwrap();
        assert_eq!(find_cover_index(&BaireSeq::zeros(), &BaireGauge::constant(0), &e).unwrap(), 0);
        let psi = BaireGauge::one_plus_first();
        let g = BaireSeq::new(vec![1, 1]);
        let k = find_cover_index(&g, &psi, &e).unwrap();
        assert_eq!(e[k].prefix(), &[1, 1]);
        let out = BaireSeq::new(vec![5]);
        assert!(matches!(find_cover_index(&out, &psi, &e), Err(Error::BoundsInsufficient(_))));
    }

    #[test]
    fn wellfounded_examples() {
        let root = FiniteTree::from_nodes(2, 3, [vec![]]);
        assert!(wellfounded_via_xi(&root).unwrap());
        let empty = FiniteTree::from_nodes(2, 3, Vec::<Vec<u32>>::new());
        assert!(wellfounded_via_xi(&empty).unwrap());
        let full = FiniteTree::full(2, 3);
        assert!(!wellfounded_via_xi(&full).unwrap());
        let w = xi_witness(&full).unwrap().unwrap();
        assert_eq!(tree_functional(&full).eval(&w), 0);
        for t in [&root, &empty, &full] {
            assert_eq!(wellfounded_via_xi(t).unwrap(), wellfounded_direct(t));
            assert!(t.is_prefix_closed());
        }
    }
}
