//! Fixtures shared by the benchmarks.

use gcm_core::presets::modified_geometric;
use gcm_core::{GenerateConfig, PermutationH};

/// Two-block disassortative configuration on the modified geometric
/// distribution.
pub fn geometric_config(n: usize, q: f64, seed: u64) -> GenerateConfig {
    GenerateConfig {
        n,
        pmf: modified_geometric(),
        b: 2,
        q,
        h: PermutationH::reversal(2),
        seed,
    }
}
