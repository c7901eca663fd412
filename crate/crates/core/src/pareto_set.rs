//! Two-objective Pareto archive over `(x, y) = (−H(Z), I(Z;Y))`.
//!
//! Points are kept sorted by strictly ascending `x`, which forces `y` to be
//! strictly descending. A point `q` dominates `p` when `q.x >= p.x` and
//! `q.y >= p.y`; an exact duplicate of a stored pair counts as dominated, so
//! the first encoder to reach a given objective pair is the one retained.

use serde::{Deserialize, Serialize};

use crate::encoders::Encoder;

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoPoint {
    pub x: f64,
    pub y: f64,
    pub dx: Option<f64>,
    pub dy: Option<f64>,
    pub encoder: Option<Encoder>,
}

impl ParetoPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self {
            x,
            y,
            dx: None,
            dy: None,
            encoder: None,
        }
    }

    pub fn with_encoder(x: f64, y: f64, encoder: Encoder) -> Self {
        Self {
            encoder: Some(encoder),
            ..Self::new(x, y)
        }
    }

    pub fn with_uncertainty(mut self, dx: f64, dy: f64) -> Self {
        self.dx = Some(dx);
        self.dy = Some(dy);
        self
    }

    /// Entropy `H(Z) = −x`.
    pub fn entropy(&self) -> f64 {
        0.0 - self.x
    }

    pub fn information(&self) -> f64 {
        self.y
    }

    /// True when `self` is at least as good as `other` in both coordinates.
    pub fn weakly_dominates(&self, other: &ParetoPoint) -> bool {
        self.x >= other.x && self.y >= other.y
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParetoSet {
    points: Vec<ParetoPoint>,
}

impl ParetoSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Offers every point in turn; the result is the Pareto filter of the input.
    pub fn from_points<I: IntoIterator<Item = ParetoPoint>>(points: I) -> Self {
        let mut set = Self::new();
        for p in points {
            set.add(p);
        }
        set
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ParetoPoint] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ParetoPoint> {
        self.points.iter()
    }

    pub fn into_points(self) -> Vec<ParetoPoint> {
        self.points
    }

    /// Position at which a point with abscissa `x` would be inserted.
    fn find_index(&self, x: f64) -> usize {
        self.points.partition_point(|q| q.x < x)
    }

    /// O(log n). The best candidate dominator of `(x, y)` is the first stored
    /// point with abscissa at least `x`.
    pub fn is_pareto_xy(&self, x: f64, y: f64) -> bool {
        let i = self.find_index(x);
        i == self.points.len() || self.points[i].y < y
    }

    pub fn is_pareto(&self, p: &ParetoPoint) -> bool {
        self.is_pareto_xy(p.x, p.y)
    }

    /// Inserts `p` if it is not dominated, evicting the points it dominates.
    /// Returns whether the point was inserted.
    pub fn add(&mut self, p: ParetoPoint) -> bool {
        if !self.is_pareto(&p) {
            return false;
        }
        // dominated points have q.x <= p.x and q.y <= p.y: a run ending at `end`
        let end = self.points.partition_point(|q| q.x <= p.x);
        let start = self.points[..end].partition_point(|q| q.y > p.y);
        self.points.splice(start..end, std::iter::once(p));
        true
    }

    /// Euclidean distance `(x, y)` must travel to leave the region weakly
    /// dominated by the set; zero for Pareto-optimal points.
    ///
    /// The exits are the top edge above `(x, y)`, the inner corners
    /// `(P[i].x, P[i+1].y)` of the staircase, and the right edge. Corners are
    /// scanned left to right and the scan stops once the horizontal offset
    /// alone exceeds the best distance found.
    pub fn distance_xy(&self, x: f64, y: f64) -> f64 {
        if self.is_pareto_xy(x, y) {
            return 0.0;
        }
        let start = self.find_index(x);
        let pts = &self.points;
        let mut d = pts[start].y - y;
        for i in start..pts.len() {
            let dx = pts[i].x - x;
            if dx >= d {
                break;
            }
            let dy = match pts.get(i + 1) {
                Some(next) => (next.y - y).max(0.0),
                None => 0.0,
            };
            d = d.min(dx.hypot(dy));
            if dy == 0.0 {
                break;
            }
        }
        d
    }

    pub fn distance(&self, p: &ParetoPoint) -> f64 {
        self.distance_xy(p.x, p.y)
    }
}

impl<'a> IntoIterator for &'a ParetoSet {
    type Item = &'a ParetoPoint;
    type IntoIter = std::slice::Iter<'a, ParetoPoint>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

pub fn is_pareto(p: &ParetoPoint, set: &ParetoSet) -> bool {
    set.is_pareto(p)
}

pub fn pareto_add(p: ParetoPoint, mut set: ParetoSet) -> ParetoSet {
    set.add(p);
    set
}

pub fn pareto_distance(p: &ParetoPoint, set: &ParetoSet) -> f64 {
    set.distance(p)
}

/// JSON form of one stored point, with entropy reported as a positive number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "dH", skip_serializing_if = "Option::is_none", default)]
    pub dh: Option<f64>,
    #[serde(rename = "dI", skip_serializing_if = "Option::is_none", default)]
    pub di: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub encoder: Option<Encoder>,
}

impl From<&ParetoPoint> for PointRecord {
    fn from(p: &ParetoPoint) -> Self {
        Self {
            h: 0.0 - p.x,
            i: p.y,
            dh: p.dx,
            di: p.dy,
            encoder: p.encoder.clone(),
        }
    }
}

impl From<PointRecord> for ParetoPoint {
    fn from(r: PointRecord) -> Self {
        Self {
            x: -r.h,
            y: r.i,
            dx: r.dh,
            dy: r.di,
            encoder: r.encoder,
        }
    }
}

/// Serialized in ascending entropy order.
impl Serialize for ParetoSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let records: Vec<PointRecord> = self.points.iter().rev().map(PointRecord::from).collect();
        records.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ParetoSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let records = Vec::<PointRecord>::deserialize(d)?;
        Ok(Self::from_points(records.into_iter().map(ParetoPoint::from)))
    }
}
