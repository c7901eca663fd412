//! Exhaustive ground truth over all set partitions, and frontier scoring.

use serde::{Deserialize, Serialize};

use crate::distributions::{dib_point, push_rows, JointPMF};
use crate::encoders::Encoder;
use crate::error::{DibError, Result};
use crate::pareto_set::{ParetoPoint, ParetoSet};

/// Largest domain the enumerator accepts; B(13) = 27,644,437.
pub const MAX_ENUMERATION: usize = 13;

/// Restricted-growth strings of length `n` in lexicographic order.
#[derive(Debug, Clone)]
pub struct Partitions {
    labels: Vec<usize>,
    // prefix_max[k] = max(labels[..=k])
    prefix_max: Vec<usize>,
    done: bool,
}

impl Partitions {
    fn new(n: usize) -> Self {
        Self {
            labels: vec![0; n],
            prefix_max: vec![0; n],
            done: false,
        }
    }

    fn advance(&mut self) {
        let n = self.labels.len();
        // rightmost position that may still grow: its label cannot exceed 1 + max of the prefix
        for k in (1..n).rev() {
            if self.labels[k] <= self.prefix_max[k - 1] {
                self.labels[k] += 1;
                self.prefix_max[k] = self.prefix_max[k - 1].max(self.labels[k]);
                for t in k + 1..n {
                    self.labels[t] = 0;
                    self.prefix_max[t] = self.prefix_max[k];
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for Partitions {
    type Item = Encoder;

    fn next(&mut self) -> Option<Encoder> {
        if self.done {
            return None;
        }
        let f = Encoder::from_canonical(self.labels.clone()).expect("restricted growth string");
        self.advance();
        Some(f)
    }
}

/// Every partition of `[n]`, each exactly once.
pub fn enumerate_partitions(n: usize) -> Result<Partitions> {
    if n == 0 {
        return Err(DibError::InvalidArgument("cannot enumerate partitions of an empty set".into()));
    }
    if n > MAX_ENUMERATION {
        return Err(DibError::Capacity {
            what: "partition domain size",
            value: n,
            limit: MAX_ENUMERATION,
        });
    }
    Ok(Partitions::new(n))
}

/// Bell number B(n) by the Bell triangle.
pub fn bell_number(n: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for v in &row {
            let last = *next.last().unwrap();
            next.push(last + v);
        }
        row = next;
    }
    row[0]
}

/// Exact frontier by evaluating every clustering of `joint`'s X alphabet.
pub fn brute_force_frontier(joint: &JointPMF) -> Result<ParetoSet> {
    let parts = enumerate_partitions(joint.nx())?;
    let ny = joint.ny();
    let h_y = joint.entropy_y();
    let mut scratch = Vec::new();
    let mut frontier = ParetoSet::new();
    for f in parts {
        let pushed = push_rows(joint.probabilities(), ny, &f);
        let (x, y) = dib_point(&pushed, ny, 1.0, h_y, &mut scratch);
        if frontier.is_pareto_xy(x, y) {
            frontier.add(ParetoPoint::with_encoder(x, y, f));
        }
    }
    Ok(frontier)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierScore {
    pub points: usize,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
}

fn matches(a: &ParetoPoint, b: &ParetoPoint, tol: f64) -> bool {
    (a.x - b.x).abs() <= tol && (a.y - b.y).abs() <= tol
}

/// Scores `candidate` against `truth`: a candidate point is a true positive
/// when some truth point agrees in both coordinates within `tol`.
pub fn precision_recall(candidate: &ParetoSet, truth: &ParetoSet, tol: f64) -> Result<FrontierScore> {
    if tol.is_nan() || tol < 0.0 {
        return Err(DibError::InvalidArgument(format!("tolerance must be >= 0, got {tol}")));
    }
    let points = candidate.len();
    let tp = candidate
        .iter()
        .filter(|c| truth.iter().any(|t| matches(c, t, tol)))
        .count();
    let fn_ = truth
        .iter()
        .filter(|t| !candidate.iter().any(|c| matches(c, t, tol)))
        .count();
    let precision = if points == 0 {
        if fn_ == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        tp as f64 / points as f64
    };
    let recall = if tp + fn_ == 0 {
        1.0
    } else {
        tp as f64 / (tp + fn_) as f64
    };
    Ok(FrontierScore {
        points,
        tp,
        fp: points - tp,
        fn_,
        precision,
        recall,
    })
}

/// True when every point of each set has a partner in the other within `tol`.
pub fn same_objective_pairs(a: &ParetoSet, b: &ParetoSet, tol: f64) -> bool {
    a.iter().all(|p| b.iter().any(|q| matches(p, q, tol)))
        && b.iter().all(|q| a.iter().any(|p| matches(p, q, tol)))
}
