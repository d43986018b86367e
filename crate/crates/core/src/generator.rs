//! Stub-matching construction.
//!
//! Stubs are laid out in ascending order of their owner's degree and cut
//! into `b` equal blocks. In every block `ceil(2mq/b)` stubs are marked
//! type 1 and matched uniformly inside block `h(i)`; all remaining type-2
//! stubs are matched uniformly among themselves. Matching shuffles each
//! class once and pairs neighbours, which has the same law as repeatedly
//! drawing a random unconnected partner.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::degree_model::{
    partition_blocks, sample_degree_sequence, BlockPartition, DegreePmf, DegreeSequence,
    PermutationH,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Type1,
    Type2,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Type1 => "type1",
            EdgeKind::Type2 => "type2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    pub kind: EdgeKind,
    /// Blocks (0-based) of the two stubs that formed the edge.
    pub blocks: (u32, u32),
    /// Positions of the two stubs in the degree-sorted stub list; `None`
    /// for graphs read from an edge list.
    pub stubs: Option<(u32, u32)>,
}

/// Multigraph produced by the construction. Self-loops and parallel edges
/// are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedGraph {
    pub n: usize,
    pub degrees: Vec<u32>,
    pub edges: Vec<Edge>,
    pub b: usize,
    pub q: f64,
    pub h: PermutationH,
    pub seed: Option<u64>,
}

impl GeneratedGraph {
    /// Builds a graph from a plain edge list (e.g. read from disk). Every
    /// edge is marked type 2 in block 0.
    pub fn from_edge_list(n: usize, pairs: &[(u32, u32)]) -> Result<Self> {
        let mut degrees = vec![0u32; n];
        let mut edges = Vec::with_capacity(pairs.len());
        for &(u, v) in pairs {
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            degrees[u as usize] += 1;
            degrees[v as usize] += 1;
            edges.push(Edge {
                u,
                v,
                kind: EdgeKind::Type2,
                blocks: (0, 0),
                stubs: None,
            });
        }
        Ok(GeneratedGraph {
            n,
            degrees,
            edges,
            b: 1,
            q: 0.0,
            h: PermutationH::identity(1),
            seed: None,
        })
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn self_loops(&self) -> usize {
        self.edges.iter().filter(|e| e.u == e.v).count()
    }

    /// Edges beyond the first between the same unordered pair of distinct
    /// vertices.
    pub fn multiedges(&self) -> usize {
        let mut pairs: Vec<(u32, u32)> = self
            .edges
            .iter()
            .filter(|e| e.u != e.v)
            .map(|e| (e.u.min(e.v), e.u.max(e.v)))
            .collect();
        pairs.sort_unstable();
        pairs.windows(2).filter(|w| w[0] == w[1]).count()
    }

    /// Degrees recomputed from the edge list. A self-loop counts twice.
    pub fn realized_degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.n];
        for e in &self.edges {
            deg[e.u as usize] += 1;
            deg[e.v as usize] += 1;
        }
        deg
    }
}

/// `2m` stubs sorted by (owner degree, owner id), cut into `b` equal blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct StubBlocks {
    n: usize,
    owners: Vec<u32>,
    b: usize,
    block_size: usize,
}

impl StubBlocks {
    pub fn total(&self) -> usize {
        self.owners.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn owner(&self, stub: usize) -> u32 {
        self.owners[stub]
    }

    pub fn block_of(&self, stub: usize) -> usize {
        stub / self.block_size
    }

    /// Owners of the stubs in block `i`.
    pub fn block(&self, i: usize) -> &[u32] {
        &self.owners[i * self.block_size..(i + 1) * self.block_size]
    }
}

pub fn build_stubs(degrees: &[u32], b: usize) -> Result<StubBlocks> {
    if b == 0 {
        return Err(Error::InvalidParameter("block count must be >= 1".into()));
    }
    let total: usize = degrees.iter().map(|&d| d as usize).sum();
    if total == 0 || !total.is_multiple_of(2) || !total.is_multiple_of(b) {
        return Err(Error::IndivisibleStubs {
            stubs: total,
            blocks: b,
        });
    }
    let mut order: Vec<u32> = (0..degrees.len() as u32).collect();
    order.sort_by_key(|&v| (degrees[v as usize], v));
    let mut owners = Vec::with_capacity(total);
    for v in order {
        owners.extend(std::iter::repeat_n(v, degrees[v as usize] as usize));
    }
    Ok(StubBlocks {
        n: degrees.len(),
        owners,
        b,
        block_size: total / b,
    })
}

/// Type-1 stubs per block: `ceil(2mq/b)`, minus one for a self-paired
/// block when that count is odd.
pub fn type1_count(total_stubs: usize, b: usize, q: f64, self_paired: bool) -> usize {
    let block = total_stubs / b;
    let raw = (total_stubs as f64 * q / b as f64 - 1e-9).ceil().max(0.0) as usize;
    let count = raw.min(block);
    if self_paired && count % 2 == 1 {
        count - 1
    } else {
        count
    }
}

#[derive(Debug, Clone)]
pub struct TypedStubs<'a> {
    stubs: &'a StubBlocks,
    q: f64,
    /// Global indices of the type-1 stubs of each block.
    type1: Vec<Vec<usize>>,
    type2: Vec<usize>,
}

impl TypedStubs<'_> {
    pub fn type1_per_block(&self) -> Vec<usize> {
        self.type1.iter().map(Vec::len).collect()
    }

    pub fn type2_count(&self) -> usize {
        self.type2.len()
    }

    pub fn is_type1(&self, stub: usize) -> bool {
        self.type1[self.stubs.block_of(stub)].contains(&stub)
    }
}

pub fn designate_types<'a, R: Rng + ?Sized>(
    stubs: &'a StubBlocks,
    h: &PermutationH,
    q: f64,
    rng: &mut R,
) -> Result<TypedStubs<'a>> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!("q must lie in [0, 1), got {q}")));
    }
    if h.b() != stubs.b {
        return Err(Error::InvalidPermutation(format!(
            "permutation has {} blocks, stubs have {}",
            h.b(),
            stubs.b
        )));
    }
    let size = stubs.block_size;
    let mut is_type1 = vec![false; stubs.total()];
    let mut type1 = Vec::with_capacity(stubs.b);
    for i in 0..stubs.b {
        let count = type1_count(stubs.total(), stubs.b, q, h.apply(i) == i);
        let mut chosen: Vec<usize> = index::sample(rng, size, count)
            .into_iter()
            .map(|j| i * size + j)
            .collect();
        chosen.sort_unstable();
        for &s in &chosen {
            is_type1[s] = true;
        }
        type1.push(chosen);
    }
    let type2 = (0..stubs.total()).filter(|&s| !is_type1[s]).collect();
    Ok(TypedStubs {
        stubs,
        q,
        type1,
        type2,
    })
}

pub fn match_stubs<R: Rng + ?Sized>(
    typed: TypedStubs<'_>,
    h: &PermutationH,
    rng: &mut R,
) -> Result<GeneratedGraph> {
    if !h.is_involution() {
        return Err(Error::NotInvolution);
    }
    let stubs = typed.stubs;
    let mut edges = Vec::with_capacity(stubs.total() / 2);
    let mut push = |a: usize, c: usize, kind| {
        edges.push(Edge {
            u: stubs.owner(a),
            v: stubs.owner(c),
            kind,
            blocks: (stubs.block_of(a) as u32, stubs.block_of(c) as u32),
            stubs: Some((a as u32, c as u32)),
        })
    };

    let mut type1 = typed.type1;
    for i in 0..stubs.b {
        let j = h.apply(i);
        if j < i {
            continue;
        }
        if i == j {
            let list = &mut type1[i];
            if !list.len().is_multiple_of(2) {
                return Err(Error::ParityMismatch(format!(
                    "block {} pairs with itself but has {} type-1 stubs",
                    i + 1,
                    list.len()
                )));
            }
            list.shuffle(rng);
            for pair in list.chunks_exact(2) {
                push(pair[0], pair[1], EdgeKind::Type1);
            }
        } else {
            if type1[i].len() != type1[j].len() {
                return Err(Error::ParityMismatch(format!(
                    "blocks {} and {} have {} and {} type-1 stubs",
                    i + 1,
                    j + 1,
                    type1[i].len(),
                    type1[j].len()
                )));
            }
            type1[j].shuffle(rng);
            for (&a, &c) in type1[i].iter().zip(&type1[j]) {
                push(a, c, EdgeKind::Type1);
            }
        }
    }

    let mut type2 = typed.type2;
    if !type2.len().is_multiple_of(2) {
        return Err(Error::ParityMismatch(format!(
            "{} type-2 stubs cannot be paired",
            type2.len()
        )));
    }
    type2.shuffle(rng);
    for pair in type2.chunks_exact(2) {
        push(pair[0], pair[1], EdgeKind::Type2);
    }

    let n = stubs.n;
    let mut degrees = vec![0u32; n];
    for &v in &stubs.owners {
        degrees[v as usize] += 1;
    }
    Ok(GeneratedGraph {
        n,
        degrees,
        edges,
        b: stubs.b,
        q: typed.q,
        h: h.clone(),
        seed: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateConfig {
    pub n: usize,
    pub pmf: DegreePmf,
    pub b: usize,
    pub q: f64,
    pub h: PermutationH,
    pub seed: u64,
}

/// Partition, degree sequence and stub layout of one configuration. Only
/// type designation and matching are random, so replications share this.
#[derive(Debug, Clone)]
pub struct PreparedModel {
    pub partition: BlockPartition,
    pub sequence: DegreeSequence,
    pub stubs: StubBlocks,
    pub q: f64,
    pub h: PermutationH,
}

impl PreparedModel {
    pub fn new(pmf: &DegreePmf, n: usize, b: usize, q: f64, h: PermutationH) -> Result<Self> {
        if h.b() != b {
            return Err(Error::InvalidPermutation(format!(
                "permutation has {} blocks, expected {b}",
                h.b()
            )));
        }
        let partition = partition_blocks(pmf, b)?;
        Self::from_partition(partition, n, q, h)
    }

    pub fn from_partition(
        partition: BlockPartition,
        n: usize,
        q: f64,
        h: PermutationH,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&q) {
            return Err(Error::InvalidParameter(format!("q must lie in [0, 1), got {q}")));
        }
        if h.b() != partition.b() {
            return Err(Error::InvalidPermutation(format!(
                "permutation has {} blocks, expected {}",
                h.b(),
                partition.b()
            )));
        }
        if !h.is_involution() {
            return Err(Error::NotInvolution);
        }
        let sequence = sample_degree_sequence(&partition, n)?;
        let stubs = build_stubs(&sequence.degrees, partition.b())?;
        Ok(PreparedModel {
            partition,
            sequence,
            stubs,
            q,
            h,
        })
    }

    /// Same layout with a different `q`.
    pub fn with_q(&self, q: f64) -> Self {
        PreparedModel { q, ..self.clone() }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<GeneratedGraph> {
        let typed = designate_types(&self.stubs, &self.h, self.q, rng)?;
        match_stubs(typed, &self.h, rng)
    }

    /// One graph from a ChaCha8 generator seeded with `seed`.
    pub fn generate(&self, seed: u64) -> Result<GeneratedGraph> {
        let mut graph = self.sample(&mut ChaCha8Rng::seed_from_u64(seed))?;
        graph.seed = Some(seed);
        Ok(graph)
    }
}

/// Degree sequence, stubs, type designation and matching in one call.
/// Deterministic in `config.seed`.
pub fn generate(config: &GenerateConfig) -> Result<GeneratedGraph> {
    PreparedModel::new(&config.pmf, config.n, config.b, config.q, config.h.clone())?
        .generate(config.seed)
}
