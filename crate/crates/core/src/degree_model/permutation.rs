use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Block pairing `h`: stubs designated type 1 in block `i` are matched
/// inside block `h(i)`. Stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermutationH {
    mapping: Vec<usize>,
    involution: bool,
}

impl PermutationH {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let b = mapping.len();
        if b == 0 {
            return Err(Error::InvalidPermutation("empty permutation".into()));
        }
        let mut seen = vec![false; b];
        for &j in &mapping {
            if j >= b || seen[j] {
                return Err(Error::InvalidPermutation(format!(
                    "{:?} is not a bijection on 0..{b}",
                    mapping
                )));
            }
            seen[j] = true;
        }
        let involution = (0..b).all(|i| mapping[mapping[i]] == i);
        Ok(PermutationH {
            mapping,
            involution,
        })
    }

    /// Builds from 1-based block numbers as written on the command line.
    pub fn from_one_based(mapping: &[usize]) -> Result<Self> {
        if mapping.contains(&0) {
            return Err(Error::InvalidPermutation(
                "block numbers start at 1".into(),
            ));
        }
        Self::new(mapping.iter().map(|j| j - 1).collect())
    }

    pub fn identity(b: usize) -> Self {
        PermutationH {
            mapping: (0..b).collect(),
            involution: true,
        }
    }

    /// `i -> b - 1 - i`.
    pub fn reversal(b: usize) -> Self {
        PermutationH {
            mapping: (0..b).rev().collect(),
            involution: true,
        }
    }

    /// `i -> (i + by) mod b`. Only an involution when `2 * by` is a
    /// multiple of `b`.
    pub fn rotation(b: usize, by: usize) -> Self {
        Self::new((0..b).map(|i| (i + by) % b).collect()).expect("rotation is a bijection")
    }

    pub fn b(&self) -> usize {
        self.mapping.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.mapping.iter().map(|j| j + 1).collect()
    }

    pub fn is_involution(&self) -> bool {
        self.involution
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, j)| i == *j)
    }
}

impl fmt::Display for PermutationH {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_based().iter().map(|j| j.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Parses comma-separated 1-based block numbers, e.g. `2,1`.
impl FromStr for PermutationH {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parsed: std::result::Result<Vec<usize>, _> =
            s.split(',').map(|t| t.trim().parse::<usize>()).collect();
        let mapping =
            parsed.map_err(|e| Error::InvalidPermutation(format!("cannot parse {s:?}: {e}")))?;
        Self::from_one_based(&mapping)
    }
}
