//! Hard clusterings `f: [n] → [m]` in canonical (restricted-growth) form.
//!
//! Labels appear in order of first occurrence, so the assignment array is also
//! a unique key for the underlying set partition.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{DibError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Encoder {
    assignment: Vec<usize>,
    m: usize,
}

impl Encoder {
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(DibError::InvalidArgument("encoder domain must be non-empty".into()));
        }
        Ok(Self {
            assignment: (0..n).collect(),
            m: n,
        })
    }

    /// The single-cluster encoder on `n` inputs.
    pub fn constant(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(DibError::InvalidArgument("encoder domain must be non-empty".into()));
        }
        Ok(Self {
            assignment: vec![0; n],
            m: 1,
        })
    }

    /// Relabels clusters by first occurrence.
    pub fn canonicalize(labels: &[usize]) -> Result<Self> {
        if labels.is_empty() {
            return Err(DibError::InvalidArgument("cannot canonicalize an empty labeling".into()));
        }
        let mut map = std::collections::HashMap::new();
        let assignment: Vec<usize> = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Ok(Self {
            assignment,
            m: map.len(),
        })
    }

    /// Wraps an assignment that must already be canonical.
    pub fn from_canonical(assignment: Vec<usize>) -> Result<Self> {
        let mut m = 0;
        for &a in &assignment {
            if a > m {
                return Err(DibError::InvalidArgument(format!(
                    "assignment {assignment:?} is not in first-occurrence form"
                )));
            }
            if a == m {
                m += 1;
            }
        }
        if m == 0 {
            return Err(DibError::InvalidArgument("encoder domain must be non-empty".into()));
        }
        Ok(Self { assignment, m })
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn domain_size(&self) -> usize {
        self.assignment.len()
    }

    pub fn num_clusters(&self) -> usize {
        self.m
    }

    /// `c_{i,j} ∘ f`: cluster `j` folded into cluster `i`.
    ///
    /// Since `i < j` and `i` first occurs before `j`, dropping `j` and shifting
    /// the labels above it keeps the first-occurrence order intact.
    pub fn merge(&self, i: usize, j: usize) -> Result<Self> {
        if !(i < j && j < self.m) {
            return Err(DibError::InvalidArgument(format!(
                "merge({i}, {j}) needs 0 <= i < j < {}",
                self.m
            )));
        }
        Ok(self.merge_unchecked(i, j))
    }

    pub(crate) fn merge_unchecked(&self, i: usize, j: usize) -> Self {
        let assignment = self
            .assignment
            .iter()
            .map(|&a| match a.cmp(&j) {
                std::cmp::Ordering::Less => a,
                std::cmp::Ordering::Equal => i,
                std::cmp::Ordering::Greater => a - 1,
            })
            .collect();
        Self {
            assignment,
            m: self.m - 1,
        }
    }

    /// Every single-merge child, in lexicographic `(i, j)` order.
    pub fn children(&self) -> impl Iterator<Item = Encoder> + '_ {
        merge_pairs(self.m).map(move |(i, j)| self.merge_unchecked(i, j))
    }

    /// The partition as a sorted list of sorted blocks.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.m];
        for (x, &z) in self.assignment.iter().enumerate() {
            blocks[z].push(x);
        }
        blocks
    }
}

/// Pairs `0 <= i < j < m` in lexicographic order.
pub fn merge_pairs(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..m).flat_map(move |i| (i + 1..m).map(move |j| (i, j)))
}

pub fn identity(n: usize) -> Result<Encoder> {
    Encoder::identity(n)
}

pub fn merge(f: &Encoder, i: usize, j: usize) -> Result<Encoder> {
    f.merge(i, j)
}

pub fn canonicalize(labels: &[usize]) -> Result<Encoder> {
    Encoder::canonicalize(labels)
}

pub fn children(f: &Encoder) -> Vec<Encoder> {
    f.children().collect()
}

impl Serialize for Encoder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.assignment.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Encoder {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<usize>::deserialize(d)?;
        Encoder::canonicalize(&raw).map_err(serde::de::Error::custom)
    }
}
