use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate distribution: mean degree is zero")]
    DegenerateDistribution,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot split into {blocks} equal-stub-mass blocks: only {support} degrees carry stub mass")]
    TooManyBlocks { blocks: usize, support: usize },

    #[error("block {block} has zero stub mass")]
    EmptyBlock { block: usize },

    #[error("n = {n} cannot populate every block; need n >= {min_n}")]
    SampleTooSmall { n: usize, min_n: usize },

    #[error("{stubs} stubs cannot be split into {blocks} equal blocks of paired stubs")]
    IndivisibleStubs { stubs: usize, blocks: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("permutation is not an involution: generative semantics undefined")]
    NotInvolution,

    #[error("type-1 stub counts cannot be paired: {0}")]
    ParityMismatch(String),

    #[error("degenerate degrees: size-biased degree variance is zero")]
    DegenerateDegrees,

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("fixed-point iteration stopped after {iterations} iterations with residual {residual:e}")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        last: Vec<f64>,
    },

    #[error("matrix is not entrywise positive")]
    NonPositiveMatrix,

    #[error("power iteration did not converge in {0} iterations")]
    EigenNoConvergence(usize),
}
