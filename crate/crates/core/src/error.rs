use crate::tag::Tag;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Library errors. Every variant carries a stable machine-readable code.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty partition")]
    EmptyPartition,
    #[error("malformed partition: {0}")]
    MalformedPartition(String),
    #[error("function undefined at tag {tag}: {reason}")]
    Undefined { tag: Tag, reason: String },
    #[error("{0} lies outside the domain {1}")]
    OutOfDomain(Tag, &'static str),
    #[error("gauge radius at {0} is not strictly positive")]
    NonPositiveGauge(Tag),
    /// The radius exists but cannot be produced effectively at this tag.
    /// Partitioners treat this as "candidate unusable" and move on.
    #[error("gauge radius at {tag} is not effectively computable: {reason}")]
    Indeterminate { tag: Tag, reason: String },
    #[error("no δ-fine partition found to depth {0}")]
    DepthCapExceeded(u32),
    #[error("partition exceeded the budget of {0} items")]
    BudgetExceeded(u64),
    #[error("subcover has not been verified")]
    UnverifiedSubcover,
    #[error("split point {0} must lie strictly inside (0, 1)")]
    SplitPointOutOfRange(Tag),
    #[error("unknown builtin {0:?}")]
    UnknownBuiltin(String),
    #[error("builtin {0:?} has no published gauge modulus")]
    NoModulus(String),
    #[error("no finite subcover found to depth {0}")]
    FanDepthExceeded(u32),
    #[error("effectivity failure: {0}")]
    Effectivity(String),
    #[error("bounds insufficient: {0}")]
    BoundsInsufficient(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("block N={n}: {source}")]
    Block { n: u32, source: Box<Error> },
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyPartition => "E_EMPTY_PARTITION",
            Error::MalformedPartition(_) => "E_MALFORMED_PARTITION",
            Error::Undefined { .. } => "E_UNDEFINED",
            Error::OutOfDomain(..) => "E_OUT_OF_DOMAIN",
            Error::NonPositiveGauge(_) => "E_NONPOSITIVE_GAUGE",
            Error::Indeterminate { .. } => "E_INDETERMINATE",
            Error::DepthCapExceeded(_) => "E_DEPTH_CAP",
            Error::BudgetExceeded(_) => "E_BUDGET",
            Error::UnverifiedSubcover => "E_UNVERIFIED_SUBCOVER",
            Error::SplitPointOutOfRange(_) => "E_SPLIT_POINT",
            Error::UnknownBuiltin(_) => "E_UNKNOWN_BUILTIN",
            Error::NoModulus(_) => "E_NO_MODULUS",
            Error::FanDepthExceeded(_) => "E_FAN_DEPTH",
            Error::Effectivity(_) => "E_EFFECTIVITY",
            Error::BoundsInsufficient(_) => "E_BOUNDS",
            Error::Precondition(_) => "E_PRECONDITION",
            Error::InvalidArgument(_) => "E_INVALID_ARGUMENT",
            Error::Block { source, .. } => source.code(),
        }
    }
}
