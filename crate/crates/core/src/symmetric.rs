//! One encoder shared by both inputs of a triple `(X1, X2, Y)`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distributions::{check_probabilities, dib_point, entropy_of_masses, flatten_rows, read_matrix, write_matrix};
use crate::encoders::Encoder;
use crate::error::{DibError, Result};
use crate::mapper::{search, Objective, SearchConfig, SearchStats};
use crate::pareto_set::ParetoSet;

/// `p(x1, x2, y)` stored densely, index `(x1 * g + x2) * ny + y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleJointPMF {
    g: usize,
    ny: usize,
    p: Vec<f64>,
}

impl TripleJointPMF {
    pub fn new(g: usize, ny: usize, p: Vec<f64>) -> Result<Self> {
        if g == 0 || ny == 0 {
            return Err(DibError::InvalidDistribution(format!("triple shape {g}x{g}x{ny} has an empty axis")));
        }
        if p.len() != g * g * ny {
            return Err(DibError::Dimension {
                expected: g * g * ny,
                actual: p.len(),
            });
        }
        check_probabilities(&p)?;
        Ok(Self { g, ny, p })
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn get(&self, x1: usize, x2: usize, y: usize) -> f64 {
        self.p[(x1 * self.g + x2) * self.ny + y]
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.ny];
        for row in self.p.chunks(self.ny) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out
    }

    /// Reads `g²` rows of `ny` columns; row `x1 * g + x2`.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let rows = read_matrix::<f64, _>(reader)?;
        let (n_rows, ny, p) = flatten_rows(&rows)?;
        let g = (n_rows as f64).sqrt().round() as usize;
        if g * g != n_rows {
            return Err(DibError::InvalidInput(format!(
                "triple file has {n_rows} rows, which is not a perfect square"
            )));
        }
        Self::new(g, ny, p)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_matrix(writer, self.p.chunks(self.ny))
    }
}

/// `(−H(Z1, Z2) / 2, I((Z1, Z2); Y))` with `Zk = f(Xk)`.
#[derive(Debug, Clone)]
pub struct SymmetricObjective {
    g: usize,
    ny: usize,
    // nonzero cells as (x1, x2, y, p)
    cells: Vec<(usize, usize, usize, f64)>,
    h_y: f64,
    buf: Vec<f64>,
    scratch: Vec<f64>,
}

impl SymmetricObjective {
    pub fn new(triple: &TripleJointPMF) -> Self {
        let (g, ny) = (triple.g, triple.ny);
        let mut cells = Vec::new();
        for x1 in 0..g {
            for x2 in 0..g {
                for y in 0..ny {
                    let v = triple.get(x1, x2, y);
                    if v > 0.0 {
                        cells.push((x1, x2, y, v));
                    }
                }
            }
        }
        let h_y = entropy_of_masses(&mut triple.marginal_y(), 1.0);
        Self {
            g,
            ny,
            cells,
            h_y,
            buf: Vec::new(),
            scratch: Vec::new(),
        }
    }
}

impl Objective for SymmetricObjective {
    type Parent = ();

    fn domain_size(&self) -> usize {
        self.g
    }

    fn evaluate(&mut self, f: &Encoder) -> (f64, f64) {
        let m = f.num_clusters();
        let a = f.assignment();
        self.buf.clear();
        self.buf.resize(m * m * self.ny, 0.0);
        for &(x1, x2, y, v) in &self.cells {
            self.buf[(a[x1] * m + a[x2]) * self.ny + y] += v;
        }
        let (neg_h, info) = dib_point(&self.buf, self.ny, 1.0, self.h_y, &mut self.scratch);
        (neg_h / 2.0, info)
    }

    fn prepare(&mut self, _f: &Encoder) {}

    fn evaluate_child(&mut self, _parent: &(), _f: &Encoder, _i: usize, _j: usize, child: &Encoder) -> (f64, f64) {
        self.evaluate(child)
    }
}

pub fn symmetric_objectives(triple: &TripleJointPMF, f: &Encoder) -> Result<(f64, f64)> {
    if f.domain_size() != triple.g {
        return Err(DibError::Dimension {
            expected: triple.g,
            actual: f.domain_size(),
        });
    }
    Ok(SymmetricObjective::new(triple).evaluate(f))
}

pub fn symmetric_pareto_mapper(triple: &TripleJointPMF, cfg: &SearchConfig) -> Result<(ParetoSet, SearchStats)> {
    search(&mut SymmetricObjective::new(triple), cfg)
}
