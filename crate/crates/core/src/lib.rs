//! Generalized configuration model with tunable degree correlation.
//!
//! Stubs are sorted by owner degree and cut into `b` blocks of equal stub
//! count. A fraction `q` of the stubs in each block is matched inside the
//! block paired with it by an involution `h`; the rest are matched
//! uniformly at random. The crate provides:
//!
//! * [`degree_model`]: degree distributions, equal-stub-mass block
//!   partitions and proportional degree sequences,
//! * [`generator`]: the stub-matching construction,
//! * [`metrics`]: analytic and empirical joint degree pmfs and the Pearson
//!   degree correlation `rho = c * q`,
//! * [`percolation`]: block generating functions, the fixed-point map,
//!   the Perron threshold `phi* = 1 / lambda_1` and giant-component sizes,
//! * [`simulation`]: Monte Carlo node percolation with batch means.
//!
//! Block indices and permutations are 0-based in the API. Textual
//! formats (CLI flags, JSON reports) use 1-based block numbers.

pub mod degree_model;
pub mod error;
pub mod generator;
pub mod metrics;
pub mod percolation;
pub mod presets;
pub mod simulation;

pub use degree_model::{
    partition_blocks, sample_degree_sequence, size_biased, BlockPartition, DegreePmf,
    DegreeSequence, DistributionSpec, Family, MassShift, PermutationH, StubMassPmf,
};
pub use error::{Error, Result};
pub use generator::{generate, Edge, EdgeKind, GenerateConfig, GeneratedGraph, PreparedModel};
pub use metrics::{
    analytic_rho, choose_permutation, empirical_joint, empirical_pearson, joint_pmf,
    CorrelationReport, JointDegreePmf, Mixing,
};
pub use percolation::{
    build_gen_functions, dominant_eig, giant_fraction, BlockModel, FixedPointKind, GenFunctions,
    GiantFraction, PercolationSolution, SolveOptions, Stability, StabilityKind, ThresholdReport,
};
pub use simulation::{
    batch_experiment, giant_size, node_percolate, rho_experiment, sweep, BatchProtocol,
    BatchResult, PercolatedGraph, SimulationConfig, SweepRow,
};
