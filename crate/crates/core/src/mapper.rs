//! ε-greedy pruned agglomerative search for the full primal frontier.
//!
//! Starting from the identity clustering, each dequeued encoder has all of its
//! single-merge children evaluated and offered to the frontier. A child at
//! distance `d` from the frontier (measured before it is offered) is enqueued
//! with probability `exp(-d/ε)`. `ε = 0` only follows children that were
//! optimal when found; `ε = ∞` follows everything and degenerates into an
//! exhaustive search.

use std::collections::{HashSet, VecDeque};
use std::time::Instant;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::distributions::{dib_point, entropy_of_masses, merge_rows, JointPMF};
use crate::encoders::Encoder;
use crate::error::{DibError, Result};
use crate::pareto_set::{ParetoPoint, ParetoSet};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Search depth in bits; `f64::INFINITY` requests exhaustive search.
    #[serde(with = "epsilon_serde")]
    pub epsilon: f64,
    pub seed: u64,
    /// Skip partitions that were already evaluated.
    pub dedup: bool,
    /// Children are not enqueued while the queue holds this many entries.
    pub max_queue: Option<usize>,
    /// Expand each exact objective pair at most once. Partitions that tie
    /// bit-for-bit (typically images of each other under a symmetry of the
    /// input) are still evaluated but only the first one is enqueued.
    #[serde(default = "default_true")]
    pub tie_dedup: bool,
}

fn default_true() -> bool {
    true
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.0,
            seed: 0,
            dedup: true,
            max_queue: None,
            tie_dedup: true,
        }
    }
}

impl SearchConfig {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        Self {
            epsilon,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(DibError::InvalidArgument(format!(
                "epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Serializes an infinite ε as the string `"inf"`.
pub(crate) mod epsilon_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(eps: &f64, s: S) -> Result<S::Ok, S::Error> {
        if eps.is_infinite() {
            Repr::Text("inf".into()).serialize(s)
        } else {
            Repr::Num(*eps).serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => super::parse_epsilon(&t).map_err(serde::de::Error::custom),
        }
    }
}

/// Parses a non-negative ε, accepting `inf` / `infinity` for exhaustive search.
pub fn parse_epsilon(text: &str) -> Result<f64> {
    let t = text.trim();
    let eps = match t.to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => f64::INFINITY,
        _ => t
            .parse::<f64>()
            .map_err(|_| DibError::InvalidArgument(format!("cannot parse epsilon {text:?}")))?,
    };
    if eps.is_nan() || eps < 0.0 {
        return Err(DibError::InvalidArgument(format!("epsilon must be >= 0, got {text}")));
    }
    Ok(eps)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Objective evaluations, including the identity encoder.
    pub points_searched: u64,
    /// Encoders placed on the queue, including the identity encoder.
    pub enqueued: u64,
    /// Children skipped because their partition was already evaluated.
    pub duplicates_skipped: u64,
    /// Children that won the enqueue draw but hit the queue cap.
    pub dropped: u64,
    /// Children that won the enqueue draw but tie an already expanded objective pair.
    #[serde(default)]
    pub ties_skipped: u64,
    /// Wall-clock seconds.
    pub elapsed: f64,
}

/// Probability `exp(-d/ε)` of following a child at distance `d`.
pub fn enqueue_probability(d: f64, epsilon: f64) -> Result<f64> {
    if d.is_nan() || d < 0.0 {
        return Err(DibError::InvalidArgument(format!("distance must be >= 0, got {d}")));
    }
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(DibError::InvalidArgument(format!(
            "epsilon must be >= 0, got {epsilon}"
        )));
    }
    Ok(if epsilon.is_infinite() {
        1.0
    } else if epsilon == 0.0 {
        if d == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        (-d / epsilon).exp()
    })
}

/// An objective pair `(x, y)` evaluated over encoders of a fixed domain.
///
/// `prepare` caches whatever per-parent state makes evaluating its children
/// cheap; `evaluate_child` must agree with `evaluate` on the child encoder.
pub trait Objective {
    type Parent;

    fn domain_size(&self) -> usize;

    fn evaluate(&mut self, f: &Encoder) -> (f64, f64);

    fn prepare(&mut self, f: &Encoder) -> Self::Parent;

    fn evaluate_child(
        &mut self,
        parent: &Self::Parent,
        f: &Encoder,
        i: usize,
        j: usize,
        child: &Encoder,
    ) -> (f64, f64);
}

/// DIB objective `(−H(f(X)), I(f(X); Y))` on a mass matrix, using plug-in
/// entropies. Works on probabilities (`total = 1`) or raw counts.
#[derive(Debug, Clone)]
pub struct DibObjective {
    mass: Vec<f64>,
    nx: usize,
    ny: usize,
    total: f64,
    h_y: f64,
    scratch: Vec<f64>,
    child: Vec<f64>,
}

impl DibObjective {
    pub fn new(joint: &JointPMF) -> Self {
        Self::from_masses(joint.probabilities().to_vec(), joint.nx(), joint.ny(), 1.0)
    }

    pub(crate) fn from_masses(mass: Vec<f64>, nx: usize, ny: usize, total: f64) -> Self {
        let mut col = vec![0.0; ny];
        for row in mass.chunks(ny) {
            for (c, v) in col.iter_mut().zip(row) {
                *c += v;
            }
        }
        let h_y = entropy_of_masses(&mut col, total);
        Self {
            mass,
            nx,
            ny,
            total,
            h_y,
            scratch: Vec::new(),
            child: Vec::new(),
        }
    }
}

impl Objective for DibObjective {
    type Parent = Vec<f64>;

    fn domain_size(&self) -> usize {
        self.nx
    }

    fn evaluate(&mut self, f: &Encoder) -> (f64, f64) {
        let pushed = crate::distributions::push_rows(&self.mass, self.ny, f);
        dib_point(&pushed, self.ny, self.total, self.h_y, &mut self.scratch)
    }

    fn prepare(&mut self, f: &Encoder) -> Vec<f64> {
        crate::distributions::push_rows(&self.mass, self.ny, f)
    }

    fn evaluate_child(
        &mut self,
        parent: &Vec<f64>,
        f: &Encoder,
        i: usize,
        j: usize,
        _child: &Encoder,
    ) -> (f64, f64) {
        merge_rows(parent, self.ny, f.num_clusters(), i, j, &mut self.child);
        dib_point(&self.child, self.ny, self.total, self.h_y, &mut self.scratch)
    }
}

/// Runs the pruned agglomerative search for an arbitrary objective.
pub fn search<O: Objective>(objective: &mut O, cfg: &SearchConfig) -> Result<(ParetoSet, SearchStats)> {
    cfg.validate()?;
    let start = Instant::now();
    let n = objective.domain_size();
    let identity = Encoder::identity(n)?;
    let mut rng = rng::from_seed(cfg.seed);
    let mut stats = SearchStats::default();
    let mut frontier = ParetoSet::new();
    let mut visited: HashSet<Encoder> = HashSet::new();
    let mut queue: VecDeque<Encoder> = VecDeque::new();
    let mut expanded: HashSet<(u64, u64)> = HashSet::new();

    let (x, y) = objective.evaluate(&identity);
    expanded.insert((x.to_bits(), y.to_bits()));
    stats.points_searched += 1;
    frontier.add(ParetoPoint::with_encoder(x, y, identity.clone()));
    if cfg.dedup {
        visited.insert(identity.clone());
    }
    queue.push_back(identity);
    stats.enqueued += 1;

    while let Some(f) = queue.pop_front() {
        if f.num_clusters() < 2 {
            continue;
        }
        let parent = objective.prepare(&f);
        for (i, j) in crate::encoders::merge_pairs(f.num_clusters()) {
            let child = f.merge_unchecked(i, j);
            if cfg.dedup && !visited.insert(child.clone()) {
                stats.duplicates_skipped += 1;
                continue;
            }
            let (x, y) = objective.evaluate_child(&parent, &f, i, j, &child);
            stats.points_searched += 1;
            let d = frontier.distance_xy(x, y);
            if frontier.is_pareto_xy(x, y) {
                frontier.add(ParetoPoint::with_encoder(x, y, child.clone()));
            }
            let p = enqueue_probability(d, cfg.epsilon)?;
            let u: f64 = rng.random();
            if u < p && child.num_clusters() > 1 {
                if cfg.tie_dedup && !expanded.insert((x.to_bits(), y.to_bits())) {
                    stats.ties_skipped += 1;
                } else if cfg.max_queue.is_some_and(|cap| queue.len() >= cap) {
                    stats.dropped += 1;
                } else {
                    queue.push_back(child);
                    stats.enqueued += 1;
                }
            }
        }
    }
    stats.elapsed = start.elapsed().as_secs_f64();
    Ok((frontier, stats))
}

/// Maps the primal DIB frontier of `joint`.
pub fn pareto_mapper(joint: &JointPMF, cfg: &SearchConfig) -> Result<(ParetoSet, SearchStats)> {
    search(&mut DibObjective::new(joint), cfg)
}

/// For each cluster count, the frontier point with the most information,
/// restricted to counts that improve on every smaller count.
pub fn dmc_points(frontier: &ParetoSet) -> Result<Vec<ParetoPoint>> {
    let mut best: std::collections::BTreeMap<usize, &ParetoPoint> = Default::default();
    for p in frontier {
        let m = p
            .encoder
            .as_ref()
            .ok_or_else(|| DibError::InvalidArgument("frontier point has no encoder".into()))?
            .num_clusters();
        let slot = best.entry(m).or_insert(p);
        if p.y > slot.y {
            *slot = p;
        }
    }
    let mut out: Vec<ParetoPoint> = Vec::new();
    for p in best.into_values() {
        if out.last().is_none_or(|q| p.y > q.y) {
            out.push(p.clone());
        }
    }
    Ok(out)
}

/// Membership flags for the upper concave envelope of points sorted by
/// ascending `x`. Collinear points stay on the hull.
pub fn hull_mask_of(pts: &[ParetoPoint]) -> Vec<bool> {
    let mut hull: Vec<usize> = Vec::with_capacity(pts.len());
    for k in 0..pts.len() {
        while hull.len() >= 2 {
            let a = &pts[hull[hull.len() - 2]];
            let b = &pts[hull[hull.len() - 1]];
            let c = &pts[k];
            let cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
            if cross > 1e-12 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    let mut mask = vec![false; pts.len()];
    for k in hull {
        mask[k] = true;
    }
    mask
}

pub fn hull_mask(frontier: &ParetoSet) -> Vec<bool> {
    hull_mask_of(frontier.points())
}

/// Frontier points on the upper concave envelope.
pub fn upper_hull(frontier: &ParetoSet) -> Vec<ParetoPoint> {
    frontier
        .iter()
        .zip(hull_mask(frontier))
        .filter(|(_, keep)| *keep)
        .map(|(p, _)| p.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::sample_simplex;

    fn diag2() -> JointPMF {
        JointPMF::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap()
    }

    fn xy(s: &ParetoSet) -> Vec<(f64, f64)> {
        s.iter().map(|p| (p.x, p.y)).collect()
    }

    #[test]
    fn enqueue_probability_examples() {
        for eps in [0.0, 0.01, 1.0, f64::INFINITY] {
            assert_eq!(enqueue_probability(0.0, eps).unwrap(), 1.0);
        }
        assert_eq!(enqueue_probability(0.1, 0.0).unwrap(), 0.0);
        assert!((enqueue_probability(0.05, 0.05).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((enqueue_probability(0.05, 0.05).unwrap() - 0.3679).abs() < 1e-4);
        assert_eq!(enqueue_probability(3.0, f64::INFINITY).unwrap(), 1.0);
        assert!(enqueue_probability(-0.1, 1.0).is_err());
    }

    #[test]
    fn parse_epsilon_accepts_inf() {
        assert_eq!(parse_epsilon("inf").unwrap(), f64::INFINITY);
        assert_eq!(parse_epsilon("0.05").unwrap(), 0.05);
        assert!(parse_epsilon("-1").is_err());
        assert!(parse_epsilon("nan").is_err());
    }

    #[test]
    fn diag2_frontier() {
        let (p, stats) = pareto_mapper(&diag2(), &SearchConfig::new(0.0, 1)).unwrap();
        assert_eq!(xy(&p), vec![(-1.0, 1.0), (0.0, 0.0)]);
        assert_eq!(stats.points_searched, 2);
    }

    #[test]
    fn single_row_joint_has_one_point() {
        let j = JointPMF::from_rows(&[vec![0.2, 0.3, 0.5]]).unwrap();
        let (p, _) = pareto_mapper(&j, &SearchConfig::new(0.3, 1)).unwrap();
        assert_eq!(xy(&p), vec![(0.0, 0.0)]);
    }

    #[test]
    fn rejects_negative_epsilon() {
        assert!(pareto_mapper(&diag2(), &SearchConfig::new(-1.0, 1)).is_err());
    }

    #[test]
    fn child_evaluation_matches_direct_push_forward() {
        let j = sample_simplex(6, 4, 3).unwrap();
        let mut obj = DibObjective::new(&j);
        let f = Encoder::canonicalize(&[0, 1, 0, 2, 3, 2]).unwrap();
        let parent = obj.prepare(&f);
        for (i, jj) in crate::encoders::merge_pairs(f.num_clusters()) {
            let c = f.merge(i, jj).unwrap();
            let fast = obj.evaluate_child(&parent, &f, i, jj, &c);
            let pushed = j.push_forward(&c).unwrap();
            let h = pushed.entropy_x();
            let mi = pushed.mutual_information();
            assert!((fast.0 + h).abs() < 1e-12 && (fast.1 - mi).abs() < 1e-12);
        }
    }

    #[test]
    fn frontier_points_reevaluate_to_stored_coordinates() {
        let j = sample_simplex(7, 5, 21).unwrap();
        let (p, _) = pareto_mapper(&j, &SearchConfig::new(0.02, 4)).unwrap();
        for pt in &p {
            let pushed = j.push_forward(pt.encoder.as_ref().unwrap()).unwrap();
            assert!((pt.x + pushed.entropy_x()).abs() < 1e-9);
            assert!((pt.y - pushed.mutual_information()).abs() < 1e-9);
        }
    }

    #[test]
    fn mapper_is_deterministic() {
        let j = sample_simplex(8, 5, 2).unwrap();
        let cfg = SearchConfig::new(0.05, 17);
        let (a, sa) = pareto_mapper(&j, &cfg).unwrap();
        let (b, sb) = pareto_mapper(&j, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa.points_searched, sb.points_searched);
        assert_eq!(sa.enqueued, sb.enqueued);
    }

    #[test]
    fn max_queue_bounds_the_search() {
        let j = sample_simplex(7, 4, 5).unwrap();
        let cfg = SearchConfig {
            dedup: false,
            max_queue: Some(50),
            ..SearchConfig::new(f64::INFINITY, 1)
        };
        let (p, stats) = pareto_mapper(&j, &cfg).unwrap();
        assert!(!p.is_empty());
        assert!(stats.dropped > 0);
    }

    #[test]
    fn dmc_points_from_diag2() {
        let (p, _) = pareto_mapper(&diag2(), &SearchConfig::new(0.0, 1)).unwrap();
        let dmc = dmc_points(&p).unwrap();
        let ms: Vec<usize> = dmc.iter().map(|q| q.encoder.as_ref().unwrap().num_clusters()).collect();
        assert_eq!(ms, vec![1, 2]);
        assert!(dmc_points(&ParetoSet::from_points([ParetoPoint::new(0.0, 0.0)])).is_err());
    }

    #[test]
    fn dmc_points_monotone() {
        let j = sample_simplex(8, 5, 9).unwrap();
        let (p, _) = pareto_mapper(&j, &SearchConfig::new(0.05, 2)).unwrap();
        let dmc = dmc_points(&p).unwrap();
        for w in dmc.windows(2) {
            let (m0, m1) = (
                w[0].encoder.as_ref().unwrap().num_clusters(),
                w[1].encoder.as_ref().unwrap().num_clusters(),
            );
            assert!(m0 < m1);
            assert!(w[0].y <= w[1].y);
        }
        assert!(dmc.len() <= 8);
    }

    #[test]
    fn hull_examples() {
        let line = ParetoSet::from_points([
            ParetoPoint::new(-2.0, 2.0),
            ParetoPoint::new(-1.0, 1.0),
            ParetoPoint::new(0.0, 0.0),
        ]);
        assert_eq!(upper_hull(&line).len(), 3);

        // at x = 0.5 the chord from (0, 1) to (1, 2) sits at 1.5, above 1.2
        let pts = [
            ParetoPoint::new(0.0, 1.0),
            ParetoPoint::new(0.5, 1.2),
            ParetoPoint::new(1.0, 2.0),
        ];
        assert_eq!(hull_mask_of(&pts), vec![true, false, true]);
        let s = ParetoSet::from_points([
            ParetoPoint::new(-1.0, 2.0),
            ParetoPoint::new(-0.5, 1.2),
            ParetoPoint::new(0.0, 1.0),
        ]);
        assert_eq!(upper_hull(&s).len(), 2);

        let single = ParetoSet::from_points([ParetoPoint::new(-1.0, 0.5)]);
        assert_eq!(upper_hull(&single).len(), 1);
    }

    #[test]
    fn config_json_uses_inf_string() {
        let cfg = SearchConfig::new(f64::INFINITY, 3);
        let s = serde_json::to_string(&cfg).unwrap();
        assert!(s.contains("\"epsilon\":\"inf\""), "{s}");
        let back: SearchConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cfg);
    }
}
