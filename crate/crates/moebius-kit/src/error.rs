use thiserror::Error;

/// Errors produced by sphere arithmetic, tetrad construction, map fitting,
/// and the classifier pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An extended-arithmetic expression has no well-defined limit
    /// (0/0, inf/inf, 0*inf, inf-inf).
    #[error("indeterminate form: {0}")]
    IndeterminateForm(&'static str),

    /// A tetrad with three or more coincident points, or an operation that
    /// requires pairwise-distinct points received a coincident one.
    #[error("invalid tetrad: {0}")]
    InvalidTetrad(&'static str),

    /// The cross-ratio value alpha must avoid 0, 1, and infinity.
    #[error("degenerate alpha: value must avoid 0, 1, and infinity")]
    DegenerateAlpha,

    /// Base points handed to an interpolation routine were not pairwise
    /// distinct (or were numerically indistinguishable).
    #[error("colliding base points: {0}")]
    CollidingBasePoints(&'static str),

    /// A matrix whose determinant is too close to zero to normalize.
    #[error("singular matrix: |det| = {determinant:e} is below 1e-14 after scaling")]
    SingularMatrix { determinant: f64 },

    /// An operation needed more input points than it was given.
    #[error("too few points: needed {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    /// The sampler could not build enough admissible tetrads inside the
    /// domain region.
    #[error("insufficient samples: generated {got} admissible tetrads, needed at least {needed}")]
    InsufficientSamples { needed: usize, got: usize },

    /// No conjugating pair of maps could be built from the available samples
    /// to move the midpoint test into a chart fixing infinity.
    #[error("normalization failure: {0}")]
    NormalizationFailure(&'static str),

    /// A configuration value violates its documented range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
