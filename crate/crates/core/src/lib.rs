//! Gauge (Henstock–Kurzweil) integration built on effective covering lemmas.
//!
//! Tags and interval endpoints are exact elements of ℚ(√2); function values
//! are binary64. Gauges return rational lower bounds of their radii, so every
//! fineness verdict is sound.

pub mod cousin;
pub mod error;
pub mod fan;
pub mod funcs;
pub mod gauge;
pub mod integrator;
pub mod lindelof;
pub mod partition;
pub mod rational;
pub mod realfn;
pub mod tag;

pub use cousin::{
    cover_to_partition, finite_subcover, finite_subcover_with, fine_partition, fine_partition_with, find_uncovered, verify_cover, visit_fine_partition,
    Candidate, PartitionOptions, PartitionStats, Subcover, TagStrategy,
};
pub use error::{Error, Result};
pub use gauge::{min_gauge, split_gauge, Gauge, GaugeFn, GaugeModulus};
pub use partition::{is_fine, mesh, riemann_sum, Item, TaggedPartition};
pub use rational::Rational;
pub use realfn::{RealFn, RealFunction};
pub use tag::{Interval, OpenInterval, Tag};
pub use funcs::{builtin_modulus, kappa_eval, kappa_modulus, rational_index, Builtin};
pub use integrator::{
    additivity_check, cauchy_gap, gauge_integrate, hake_limit, riemann_integrate, CauchyOptions, GaugeOptions,
    HakeOptions, HakeOutcome, IntegralResult,
};
pub use fan::{
    builtin_functionals, cantor_strategy, cover_transfer, cover_transfer_inv, theta, verify_scf, xi_map, zeta_map,
    BinSeq, CantorFunctional,
};
pub use lindelof::{
    baire_enumeration, countable_subcover_reals, find_cover_index, wellfounded_via_xi, BaireGauge, BaireSeq,
    CountableSubcover, FiniteTree,
};
