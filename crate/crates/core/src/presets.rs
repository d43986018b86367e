//! Reference configurations: the modified geometric distribution used for
//! the threshold table and its published critical values.

use serde::Serialize;

use crate::degree_model::{partition_blocks, BlockPartition, DegreePmf, PermutationH};
use crate::error::Result;
use crate::percolation::BlockModel;

/// Geometric `p_k = (1/3)(2/3)^k`, `E(Z) = 2`.
pub fn modified_geometric() -> DegreePmf {
    DegreePmf::geometric(2.0 / 3.0).expect("2/3 is a valid geometric parameter")
}

/// Equal-stub-mass partition of [`modified_geometric`]. For `b = 2` the
/// first block is `{0..4}` and stub mass `0.0782` moves from degree 4 to 5.
pub fn modified_geometric_partition(b: usize) -> Result<BlockPartition> {
    partition_blocks(&modified_geometric(), b)
}

pub const TABLE_Q: [f64; 3] = [0.2, 0.5, 0.8];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableMode {
    Assortative,
    Disassortative,
    Rotator,
}

impl TableMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TableMode::Assortative => "assortative",
            TableMode::Disassortative => "disassortative",
            TableMode::Rotator => "rotator",
        }
    }

    /// Identity, reversal, or `i -> i - 1 (mod b)` in 1-based terms
    /// (`3,1,2` for three blocks).
    pub fn permutation(self, b: usize) -> PermutationH {
        match self {
            TableMode::Assortative => PermutationH::identity(b),
            TableMode::Disassortative => PermutationH::reversal(b),
            TableMode::Rotator => PermutationH::rotation(b, b - 1),
        }
    }
}

/// One row of the published threshold table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub b: usize,
    pub mode: TableMode,
    /// Eigenvalue thresholds for `q = 0.2, 0.5, 0.8`.
    pub phi_star: [f64; 3],
    /// Thresholds found by decreasing `phi` until no interior solution.
    pub numerical: [f64; 3],
}

/// The two-block rows, reproducible from [`modified_geometric_partition`].
pub const THRESHOLDS_B2: [ThresholdRow; 2] = [
    ThresholdRow {
        b: 2,
        mode: TableMode::Assortative,
        phi_star: [0.22662, 0.19518, 0.16692],
        numerical: [0.22662, 0.19513, 0.16688],
    },
    ThresholdRow {
        b: 2,
        mode: TableMode::Disassortative,
        phi_star: [0.26715, 0.29237, 0.31231],
        numerical: [0.26711, 0.29237, 0.31229],
    },
];

/// The three-block rows. Which degrees formed the published blocks is
/// unknown, so these serve as reference only.
pub const THRESHOLDS_B3: [ThresholdRow; 3] = [
    ThresholdRow {
        b: 3,
        mode: TableMode::Assortative,
        phi_star: [0.22252, 0.18095, 0.14540],
        numerical: [0.22251, 0.18092, 0.14537],
    },
    ThresholdRow {
        b: 3,
        mode: TableMode::Disassortative,
        phi_star: [0.27442, 0.30784, 0.32967],
        numerical: [0.27438, 0.30782, 0.32965],
    },
    ThresholdRow {
        b: 3,
        mode: TableMode::Rotator,
        phi_star: [0.26572, 0.29682, 0.33182],
        numerical: [0.26571, 0.29682, 0.33181],
    },
];

/// Tolerance for matching the two-block eigenvalue thresholds.
pub const THRESHOLD_TOL: f64 = 2e-4;

pub fn table_model(b: usize, mode: TableMode, q: f64) -> Result<BlockModel> {
    BlockModel::from_partition(&modified_geometric_partition(b)?, q, mode.permutation(b))
}
