//! Monte Carlo study of how many points of a random planar cloud are
//! Pareto-optimal, and of how DIB frontier sizes grow with alphabet size.
//!
//! For a cloud of `N` i.i.d. points the expected maxima count depends only on
//! the copula of the two coordinates. Independence gives the harmonic number
//! `H_N`, complete positive dependence gives 1, and complete negative
//! dependence gives `N`. Closed forms for other copulas involve integrals of
//! `C(u, v)` over the unit square and are not computed here.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::distributions::sample_simplex;
use crate::error::{DibError, Result};
use crate::mapper::{pareto_mapper, SearchConfig};
use crate::oracle::{bell_number, brute_force_frontier};
use crate::pareto_set::{ParetoPoint, ParetoSet};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CopulaKind {
    Independent,
    Comonotone,
    Countermonotone,
    Gaussian { r: f64 },
}

impl CopulaKind {
    pub fn gaussian(r: f64) -> Result<Self> {
        if !(r > -1.0 && r < 1.0) {
            return Err(DibError::InvalidArgument(format!(
                "gaussian correlation must lie strictly inside (-1, 1), got {r}"
            )));
        }
        Ok(Self::Gaussian { r })
    }
}

impl FromStr for CopulaKind {
    type Err = DibError;

    /// Accepts `independent`, `comonotone`, `countermonotone` or `gaussian:<r>`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "independent" => Ok(Self::Independent),
            "comonotone" => Ok(Self::Comonotone),
            "countermonotone" => Ok(Self::Countermonotone),
            other => match other.strip_prefix("gaussian:") {
                Some(r) => Self::gaussian(
                    r.parse()
                        .map_err(|_| DibError::InvalidArgument(format!("bad correlation {r:?}")))?,
                ),
                None => Err(DibError::InvalidArgument(format!("unknown copula {s:?}"))),
            },
        }
    }
}

impl fmt::Display for CopulaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Independent => write!(f, "independent"),
            Self::Comonotone => write!(f, "comonotone"),
            Self::Countermonotone => write!(f, "countermonotone"),
            Self::Gaussian { r } => write!(f, "gaussian:{r}"),
        }
    }
}

// multiples of 2^-53, so 1 - u is exact
fn uniform(rng: &mut rng::Rng) -> f64 {
    (rng.random::<u64>() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn sample_cloud(kind: CopulaKind, n: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return Err(DibError::InvalidArgument("cloud size must be at least 1".into()));
    }
    if let CopulaKind::Gaussian { r } = kind {
        CopulaKind::gaussian(r)?;
    }
    let mut rng = rng::from_seed(seed);
    let cloud = (0..n)
        .map(|_| match kind {
            CopulaKind::Independent => (uniform(&mut rng), uniform(&mut rng)),
            CopulaKind::Comonotone => {
                let u = uniform(&mut rng);
                (u, u)
            }
            CopulaKind::Countermonotone => {
                let u = uniform(&mut rng);
                (u, 1.0 - u)
            }
            CopulaKind::Gaussian { r } => {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                (a, r * a + (1.0 - r * r).sqrt() * b)
            }
        })
        .collect();
    Ok(cloud)
}

/// Pareto set of a cloud, maximizing both coordinates.
pub fn pareto_front(cloud: &[(f64, f64)]) -> ParetoSet {
    let mut set = ParetoSet::new();
    for &(u, v) in cloud {
        if set.is_pareto_xy(u, v) {
            set.add(ParetoPoint::new(u, v));
        }
    }
    set
}

pub fn pareto_size(cloud: &[(f64, f64)]) -> usize {
    pareto_front(cloud).len()
}

/// Membership through the archive: a point is a member if it survives in the
/// final Pareto set. Assumes distinct coordinates.
pub fn pareto_membership(cloud: &[(f64, f64)]) -> Vec<bool> {
    let front = pareto_front(cloud);
    cloud
        .iter()
        .map(|&(u, v)| front.iter().any(|p| p.x == u && p.y == v))
        .collect()
}

/// Membership through ranks: order points by descending `U`, rank `V`
/// descending, and mark the positions where the rank hits a new minimum.
/// Assumes distinct coordinates.
pub fn sequential_minima_membership(cloud: &[(f64, f64)]) -> Vec<bool> {
    let n = cloud.len();
    let mut by_v: Vec<usize> = (0..n).collect();
    by_v.sort_by(|&a, &b| cloud[b].1.total_cmp(&cloud[a].1));
    let mut rank_v = vec![0; n];
    for (r, &i) in by_v.iter().enumerate() {
        rank_v[i] = r;
    }
    let mut by_u: Vec<usize> = (0..n).collect();
    by_u.sort_by(|&a, &b| cloud[b].0.total_cmp(&cloud[a].0));
    let mut out = vec![false; n];
    let mut best = usize::MAX;
    for i in by_u {
        if rank_v[i] < best {
            best = rank_v[i];
            out[i] = true;
        }
    }
    out
}

pub fn harmonic_number(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

/// Mean and standard deviation of the Pareto-set size for each cloud size.
pub fn scaling_experiment(kind: CopulaKind, n_values: &[usize], trials: usize, seed: u64) -> Result<Vec<ScalingRow>> {
    if trials < 10 {
        return Err(DibError::InvalidArgument(format!("need at least 10 trials, got {trials}")));
    }
    n_values
        .iter()
        .map(|&n| {
            let sizes = (0..trials)
                .map(|t| sample_cloud(kind, n, rng::derive_seed(seed, n as u64, t as u64)).map(|c| pareto_size(&c) as f64))
                .collect::<Result<Vec<f64>>>()?;
            let (mean, std) = mean_std(&sizes);
            Ok(ScalingRow { n, mean, std })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(DibError::InvalidArgument("need at least two paired samples".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(DibError::InvalidArgument("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        r2,
    })
}

/// Fits `ln y` against `ln x`.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "engine", rename_all = "lowercase")]
pub enum FrontierEngine {
    Oracle,
    Mapper { epsilon: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DibScalingRow {
    pub n: usize,
    pub mean_frontier: f64,
    pub mean_points_searched: f64,
    /// Partitions that entered the queue; equals the evaluation count for the oracle.
    pub mean_enqueued: f64,
    pub mean_seconds: f64,
}

/// Frontier size and search effort on random `n × ny` joints.
pub fn dib_frontier_scaling(
    n_values: &[usize],
    trials: usize,
    seed: u64,
    engine: FrontierEngine,
    ny: usize,
) -> Result<Vec<DibScalingRow>> {
    if trials == 0 {
        return Err(DibError::InvalidArgument("need at least one trial".into()));
    }
    let mut rows = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let (mut size, mut searched, mut queued, mut secs) = (0.0, 0.0, 0.0, 0.0);
        for t in 0..trials {
            let trial_seed = rng::derive_seed(seed, n as u64, t as u64);
            let joint = sample_simplex(n, ny, trial_seed)?;
            let start = Instant::now();
            let (frontier, count, entered) = match engine {
                FrontierEngine::Oracle => {
                    let b = bell_number(n) as f64;
                    (brute_force_frontier(&joint)?, b, b)
                }
                FrontierEngine::Mapper { epsilon } => {
                    let (f, stats) = pareto_mapper(&joint, &SearchConfig::new(epsilon, trial_seed))?;
                    (f, stats.points_searched as f64, stats.enqueued as f64)
                }
            };
            secs += start.elapsed().as_secs_f64();
            size += frontier.len() as f64;
            searched += count;
            queued += entered;
        }
        let k = trials as f64;
        rows.push(DibScalingRow {
            n,
            mean_frontier: size / k,
            mean_points_searched: searched / k,
            mean_enqueued: queued / k,
            mean_seconds: secs / k,
        });
    }
    Ok(rows)
}
