use serde::Serialize;

use super::BlockPartition;
use crate::error::{Error, Result};

/// Vertices added after rounding so that every block holds the same,
/// even-totalling number of stubs.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Repair {
    /// `(degree, extra vertices)`.
    pub added: Vec<(usize, usize)>,
}

impl Repair {
    pub fn vertices_added(&self) -> usize {
        self.added.iter().map(|(_, c)| c).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeSequence {
    /// Ascending; vertex `v` has degree `degrees[v]`.
    pub degrees: Vec<u32>,
    pub requested_n: usize,
    pub repair: Repair,
    /// Stub count of each block. All equal.
    pub block_stubs: Vec<usize>,
}

impl DegreeSequence {
    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn total_stubs(&self) -> usize {
        self.degrees.iter().map(|&d| d as usize).sum()
    }
}

/// Largest-remainder apportionment of `n` vertices over the masses.
/// Ties in the fractional part go to the smaller degree.
fn apportion(masses: &[f64], n: usize) -> Vec<usize> {
    let quotas: Vec<f64> = masses.iter().map(|p| p * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|x| x.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..masses.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &k in order.iter().take(n.saturating_sub(assigned)) {
        counts[k] += 1;
    }
    counts
}

fn block_stub_counts(partition: &BlockPartition, counts: &[usize]) -> Vec<usize> {
    partition
        .blocks()
        .iter()
        .map(|r| {
            r.clone()
                .filter(|&k| k < counts.len())
                .map(|k| k * counts[k])
                .sum()
        })
        .collect()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Fewest coins summing to each value up to `max`; `prev[v]` is the coin
/// used last (smallest coin among optimal choices).
fn min_coins(coins: &[usize], max: usize) -> (Vec<usize>, Vec<usize>) {
    let mut best = vec![usize::MAX; max + 1];
    let mut prev = vec![0; max + 1];
    best[0] = 0;
    for v in 1..=max {
        for &c in coins {
            if c <= v && best[v - c] != usize::MAX && best[v - c] + 1 < best[v] {
                best[v] = best[v - c] + 1;
                prev[v] = c;
            }
        }
    }
    (best, prev)
}

/// Proportional degree sequence for `n` vertices.
///
/// Degree `k` gets `n p'_k` vertices, rounded by largest remainder. If the
/// blocks then carry unequal stub counts, or the total is odd, vertices
/// are added to the deficient blocks: the smallest common block size `T`
/// that every block can reach is chosen, and each block is filled with
/// the fewest extra vertices (smaller degrees preferred).
pub fn sample_degree_sequence(partition: &BlockPartition, n: usize) -> Result<DegreeSequence> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let masses = partition.adjusted_pmf().masses();
    let b = partition.b();
    let mut counts = apportion(masses, n);
    let stubs = block_stub_counts(partition, &counts);
    if stubs.contains(&0) {
        return Err(Error::SampleTooSmall {
            n,
            min_n: min_sample_size(partition, n),
        });
    }

    let coins: Vec<Vec<usize>> = partition
        .blocks()
        .iter()
        .map(|r| {
            r.clone()
                .filter(|&k| k > 0 && masses.get(k).is_some_and(|p| *p > 0.0))
                .collect()
        })
        .collect();
    let gcds: Vec<usize> = coins
        .iter()
        .map(|c| c.iter().fold(0, |g, &k| gcd(g, k)))
        .collect();
    let lcm = gcds.iter().fold(2, |l, &g| l / gcd(l, g) * g);
    let kmax = masses.len();
    let t0 = *stubs.iter().max().expect("b >= 1");
    let window = 2 * lcm + 2 * kmax * kmax;

    let tables: Vec<_> = (0..b)
        .map(|i| min_coins(&coins[i], t0 + window - stubs[i]))
        .collect();
    let target = (t0..=t0 + window)
        .find(|&t| {
            (b * t).is_multiple_of(2)
                && (0..b).all(|i| tables[i].0[t - stubs[i]] != usize::MAX)
        })
        .ok_or(Error::IndivisibleStubs {
            stubs: stubs.iter().sum(),
            blocks: b,
        })?;

    let mut added = vec![0usize; masses.len()];
    for i in 0..b {
        let prev = &tables[i].1;
        let mut v = target - stubs[i];
        while v > 0 {
            let c = prev[v];
            added[c] += 1;
            v -= c;
        }
    }
    let mut repair = Repair::default();
    for (k, &extra) in added.iter().enumerate() {
        if extra > 0 {
            counts[k] += extra;
            repair.added.push((k, extra));
        }
    }

    let degrees = counts
        .iter()
        .enumerate()
        .flat_map(|(k, &c)| std::iter::repeat_n(k as u32, c))
        .collect();
    Ok(DegreeSequence {
        degrees,
        requested_n: n,
        repair,
        block_stubs: vec![target; b],
    })
}

fn min_sample_size(partition: &BlockPartition, n: usize) -> usize {
    let masses = partition.adjusted_pmf().masses();
    // n * max_{k in block} p_k >= 1 guarantees a vertex in every block
    let upper = partition
        .blocks()
        .iter()
        .map(|r| {
            let top = r
                .clone()
                .filter(|&k| k > 0)
                .map(|k| masses.get(k).copied().unwrap_or(0.0))
                .fold(0.0, f64::max);
            (1.0 / top).ceil() as usize
        })
        .max()
        .unwrap_or(1);
    (n + 1..=upper.max(n + 1))
        .find(|&m| !block_stub_counts(partition, &apportion(masses, m)).contains(&0))
        .unwrap_or(upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree_model::{partition_blocks, DegreePmf};

    fn uniform_b(b: usize) -> BlockPartition {
        partition_blocks(&DegreePmf::uniform(1, 3).unwrap(), b).unwrap()
    }

    #[test]
    fn exact_proportions() {
        let s = sample_degree_sequence(&uniform_b(2), 6).unwrap();
        assert_eq!(s.degrees, vec![1, 1, 2, 2, 3, 3]);
        assert_eq!(s.total_stubs(), 12);
        assert!(s.repair.added.is_empty());
        assert_eq!(s.block_stubs, vec![6, 6]);
    }

    #[test]
    fn point_mass() {
        let p = partition_blocks(&DegreePmf::point_mass(2), 1).unwrap();
        let s = sample_degree_sequence(&p, 4).unwrap();
        assert_eq!(s.degrees, vec![2, 2, 2, 2]);
    }

    #[test]
    fn largest_remainder_then_repair() {
        assert_eq!(apportion(&[0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 7), vec![0, 3, 2, 2]);

        // b = 1: 13 stubs, one degree-1 vertex fixes parity
        let s = sample_degree_sequence(&uniform_b(1), 7).unwrap();
        assert_eq!(s.degrees, vec![1, 1, 1, 1, 2, 2, 3, 3]);
        assert_eq!(s.repair.added, vec![(1, 1)]);

        // b = 2: blocks hold 7 and 6 stubs; both move to 9
        let s = sample_degree_sequence(&uniform_b(2), 7).unwrap();
        assert_eq!(s.block_stubs, vec![9, 9]);
        assert_eq!(s.degrees, vec![1, 1, 1, 2, 2, 2, 3, 3, 3]);
        assert_eq!(s.repair.vertices_added(), 2);
    }

    #[test]
    fn too_small_reports_minimum() {
        let pmf = DegreePmf::from_pairs([(1, 0.999), (1000, 0.001)]).unwrap();
        let p = partition_blocks(&pmf, 2).unwrap();
        match sample_degree_sequence(&p, 10) {
            Err(Error::SampleTooSmall { n, min_n }) => {
                assert_eq!(n, 10);
                assert!(min_n > 10);
                assert!(sample_degree_sequence(&p, min_n).is_ok());
                assert!(sample_degree_sequence(&p, min_n - 1).is_err());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn geometric_blocks_balance() {
        let p = partition_blocks(&DegreePmf::geometric(2.0 / 3.0).unwrap(), 3).unwrap();
        for n in [1000, 4321, 100_000] {
            let s = sample_degree_sequence(&p, n).unwrap();
            let stubs = s.total_stubs();
            assert_eq!(stubs % 2, 0);
            assert_eq!(stubs % 3, 0);
            assert!(s.degrees.windows(2).all(|w| w[0] <= w[1]));
            assert!(s.n() >= n && s.n() < n + 200);
        }
    }
}
