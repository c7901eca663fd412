//! Frontier mapping from finite samples.
//!
//! Objectives are estimated from counts, each frontier point gets bootstrap
//! standard deviations, and a significance filter removes points that cannot
//! be told apart from a more certain neighbour.

use serde::{Deserialize, Serialize};

use crate::distributions::{dib_point, entropy_of_masses, merge_rows, multinomial, push_rows, EmpiricalCounts};
use crate::encoders::Encoder;
use crate::error::{DibError, Result};
use crate::mapper::{epsilon_serde, search, Objective, SearchConfig, SearchStats};
use crate::pareto_set::{ParetoPoint, ParetoSet};
use crate::rng;

const BOOTSTRAP_STREAM: u64 = 0xB007;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustConfig {
    #[serde(with = "epsilon_serde")]
    pub epsilon: f64,
    pub seed: u64,
    pub bootstrap_reps: usize,
    pub z: f64,
    #[serde(default = "default_true")]
    pub dedup: bool,
}

fn default_true() -> bool {
    true
}

impl RobustConfig {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        Self {
            epsilon,
            seed,
            bootstrap_reps: 100,
            z: 1.0,
            dedup: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bootstrap_reps < 2 {
            return Err(DibError::InvalidArgument(format!(
                "bootstrap_reps must be at least 2, got {}",
                self.bootstrap_reps
            )));
        }
        if !(self.z > 0.0 && self.z.is_finite()) {
            return Err(DibError::InvalidArgument(format!("z must be positive, got {}", self.z)));
        }
        self.search_config().validate()
    }

    pub fn search_config(&self) -> SearchConfig {
        SearchConfig {
            dedup: self.dedup,
            ..SearchConfig::new(self.epsilon, self.seed)
        }
    }
}

/// Estimates `(−H(Z), I(Z;Y))` from a pushed-forward count matrix.
///
/// `mass` is `rows × ny` and sums to `total`.
pub trait Estimator {
    fn point(&self, mass: &[f64], ny: usize, total: f64) -> (f64, f64);
}

/// Maximum-likelihood (plug-in) entropies.
#[derive(Debug, Clone, Copy, Default)]
pub struct PlugIn;

impl Estimator for PlugIn {
    fn point(&self, mass: &[f64], ny: usize, total: f64) -> (f64, f64) {
        let mut col = vec![0.0; ny];
        for row in mass.chunks(ny) {
            for (c, v) in col.iter_mut().zip(row) {
                *c += v;
            }
        }
        let h_y = entropy_of_masses(&mut col, total);
        dib_point(mass, ny, total, h_y, &mut Vec::new())
    }
}

struct EstimatedObjective<'a, E> {
    mass: Vec<f64>,
    nx: usize,
    ny: usize,
    total: f64,
    est: &'a E,
    child: Vec<f64>,
}

impl<E: Estimator> Objective for EstimatedObjective<'_, E> {
    type Parent = Vec<f64>;

    fn domain_size(&self) -> usize {
        self.nx
    }

    fn evaluate(&mut self, f: &Encoder) -> (f64, f64) {
        self.est.point(&push_rows(&self.mass, self.ny, f), self.ny, self.total)
    }

    fn prepare(&mut self, f: &Encoder) -> Vec<f64> {
        push_rows(&self.mass, self.ny, f)
    }

    fn evaluate_child(&mut self, parent: &Vec<f64>, f: &Encoder, i: usize, j: usize, _child: &Encoder) -> (f64, f64) {
        merge_rows(parent, self.ny, f.num_clusters(), i, j, &mut self.child);
        self.est.point(&self.child, self.ny, self.total)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustResult {
    pub filtered: ParetoSet,
    pub unfiltered: ParetoSet,
    pub stats: SearchStats,
}

pub fn robust_pareto_mapper(counts: &EmpiricalCounts, cfg: &RobustConfig) -> Result<RobustResult> {
    robust_pareto_mapper_with(counts, cfg, &PlugIn)
}

pub fn robust_pareto_mapper_with<E: Estimator>(
    counts: &EmpiricalCounts,
    cfg: &RobustConfig,
    est: &E,
) -> Result<RobustResult> {
    cfg.validate()?;
    if counts.total() < 2 {
        return Err(DibError::InvalidInput(format!(
            "need at least 2 samples, got {}",
            counts.total()
        )));
    }
    let mut objective = EstimatedObjective {
        mass: counts.masses(),
        nx: counts.nx(),
        ny: counts.ny(),
        total: counts.total() as f64,
        est,
        child: Vec::new(),
    };
    let (frontier, stats) = search(&mut objective, &cfg.search_config())?;

    // every point is scored on the same resampled datasets
    let boot_seed = rng::derive_seed(cfg.seed, BOOTSTRAP_STREAM, 0);
    let mut points = Vec::with_capacity(frontier.len());
    for p in frontier.into_points() {
        let f = p.encoder.as_ref().expect("search records encoders");
        let (dx, dy) = bootstrap_with(counts, f, cfg.bootstrap_reps, boot_seed, est)?;
        points.push(p.with_uncertainty(dx, dy));
    }
    let unfiltered = ParetoSet::from_points(points);
    let filtered = significance_filter(&unfiltered, cfg.z)?;
    Ok(RobustResult {
        filtered,
        unfiltered,
        stats,
    })
}

/// Sample standard deviations of `(−H, I)` for encoder `f` over `reps`
/// multinomial resamples of the empirical distribution at its own size.
pub fn bootstrap_uncertainty(counts: &EmpiricalCounts, f: &Encoder, reps: usize, seed: u64) -> Result<(f64, f64)> {
    bootstrap_with(counts, f, reps, seed, &PlugIn)
}

pub fn bootstrap_with<E: Estimator>(
    counts: &EmpiricalCounts,
    f: &Encoder,
    reps: usize,
    seed: u64,
    est: &E,
) -> Result<(f64, f64)> {
    if reps < 2 {
        return Err(DibError::InvalidArgument(format!("reps must be at least 2, got {reps}")));
    }
    if f.domain_size() != counts.nx() {
        return Err(DibError::Dimension {
            expected: counts.nx(),
            actual: f.domain_size(),
        });
    }
    let probs = counts.masses();
    let (ny, total) = (counts.ny(), counts.total());
    let mut xs = Vec::with_capacity(reps);
    let mut ys = Vec::with_capacity(reps);
    for r in 0..reps {
        let mut rng = rng::from_seed(rng::derive_seed(seed, BOOTSTRAP_STREAM, r as u64 + 1));
        let sample: Vec<f64> = multinomial(&probs, total, &mut rng).into_iter().map(|c| c as f64).collect();
        let (x, y) = est.point(&push_rows(&sample, ny, f), ny, total as f64);
        xs.push(x);
        ys.push(y);
    }
    Ok((sample_std(&xs), sample_std(&ys)))
}

fn sample_std(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let ss: f64 = v.iter().map(|a| (a - mean) * (a - mean)).sum();
    (ss / (n - 1.0)).sqrt()
}

/// Whether two points are statistically distinguishable: their `z`-intervals
/// are disjoint in at least one coordinate.
pub fn distinguishable(a: &ParetoPoint, b: &ParetoPoint, z: f64) -> bool {
    let (adx, ady) = (a.dx.unwrap_or(0.0), a.dy.unwrap_or(0.0));
    let (bdx, bdy) = (b.dx.unwrap_or(0.0), b.dy.unwrap_or(0.0));
    (a.x - b.x).abs() > z * (adx + bdx) || (a.y - b.y).abs() > z * (ady + bdy)
}

/// Greedy filter over points in ascending `dx·dy` (ties by ascending x).
pub fn significance_filter_points(points: &[ParetoPoint], z: f64) -> Result<Vec<ParetoPoint>> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(DibError::InvalidArgument(format!("z must be positive, got {z}")));
    }
    let mut keyed = Vec::with_capacity(points.len());
    for p in points {
        match (p.dx, p.dy) {
            (Some(dx), Some(dy)) => keyed.push((dx * dy, p)),
            _ => {
                return Err(DibError::InvalidArgument(format!(
                    "point ({}, {}) has no uncertainty attached",
                    p.x, p.y
                )))
            }
        }
    }
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.x.total_cmp(&b.1.x)));
    let mut kept: Vec<ParetoPoint> = Vec::new();
    for (_, p) in keyed {
        if kept.iter().all(|k| distinguishable(p, k, z)) {
            kept.push(p.clone());
        }
    }
    Ok(kept)
}

pub fn significance_filter(set: &ParetoSet, z: f64) -> Result<ParetoSet> {
    Ok(ParetoSet::from_points(significance_filter_points(set.points(), z)?))
}
