use dibmap::mapper::{dmc_points, hull_mask_of};
use dibmap::pareto_set::PointRecord;
use dibmap::{Encoder, ParetoPoint, ParetoSet};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// One emitted frontier point, entropy positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocPoint {
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
    #[serde(default)]
    pub dmc: bool,
    #[serde(default)]
    pub hull: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kept: Option<bool>,
}

impl DocPoint {
    pub fn to_pareto_point(&self) -> ParetoPoint {
        ParetoPoint::from(PointRecord {
            h: self.h,
            i: self.i,
            dh: self.dh,
            di: self.di,
            encoder: self.encoder.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierDocument {
    pub meta: Map<String, Value>,
    pub points: Vec<DocPoint>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub score: Option<Value>,
}

impl FrontierDocument {
    /// Builds the point list from a frontier, ascending in `H`.
    ///
    /// `kept` marks the survivors of a significance filter, matched by
    /// objective pair.
    pub fn from_frontier(meta: Map<String, Value>, frontier: &ParetoSet, kept: Option<&ParetoSet>) -> Self {
        let pts = frontier.points();
        let hull = hull_mask_of(pts);
        // dmc needs encoders; frontiers without them simply carry no dmc flags
        let dmc = dmc_points(frontier).unwrap_or_default();
        let points = pts
            .iter()
            .zip(hull)
            .rev()
            .map(|(p, on_hull)| {
                let r = PointRecord::from(p);
                DocPoint {
                    h: r.h,
                    i: r.i,
                    dh: r.dh,
                    di: r.di,
                    encoder: r.encoder,
                    dmc: dmc.iter().any(|q| q.x == p.x && q.y == p.y),
                    hull: on_hull,
                    kept: kept.map(|k| k.iter().any(|q| q.x == p.x && q.y == p.y)),
                }
            })
            .collect();
        Self {
            meta,
            points,
            score: None,
        }
    }

    pub fn frontier(&self) -> ParetoSet {
        ParetoSet::from_points(self.points.iter().map(DocPoint::to_pareto_point))
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    #[serde(rename = "H")]
    h: f64,
    #[serde(rename = "I")]
    i: f64,
    #[serde(rename = "dH")]
    dh: Option<f64>,
    #[serde(rename = "dI")]
    di: Option<f64>,
    clusters: Option<usize>,
    dmc: bool,
    hull: bool,
    kept: Option<bool>,
    encoder: &'a str,
}

/// Flat table of the points; the encoder column is space separated.
pub fn points_csv(points: &[DocPoint]) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in points {
        let enc = p
            .encoder
            .as_ref()
            .map(|e| e.assignment().iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" "))
            .unwrap_or_default();
        w.serialize(CsvRow {
            h: p.h,
            i: p.i,
            dh: p.dh,
            di: p.di,
            clusters: p.encoder.as_ref().map(Encoder::num_clusters),
            dmc: p.dmc,
            hull: p.hull,
            kept: p.kept,
            encoder: &enc,
        })?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}
