//! Python bindings. Points come back with entropy as a positive number `h`.

use dibmap::oracle::{brute_force_frontier, precision_recall};
use dibmap::scaling_lab::{scaling_experiment, CopulaKind};
use dibmap::{DibError, EmpiricalCounts, Encoder, JointPMF, ParetoPoint, ParetoSet, RobustConfig, SearchConfig};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

fn err(e: DibError) -> PyErr {
    match e {
        DibError::Io(io) => PyIOError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

#[pyclass(name = "JointPMF", module = "pydibmap", frozen)]
pub struct PyJoint(JointPMF);

#[pymethods]
impl PyJoint {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        JointPMF::from_rows(&rows).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_csv(path: &str) -> PyResult<Self> {
        JointPMF::from_csv_path(path).map(Self).map_err(err)
    }

    /// Uniform draw from the simplex of `nx × ny` joints.
    #[staticmethod]
    fn random(nx: usize, ny: usize, seed: u64) -> PyResult<Self> {
        dibmap::distributions::sample_simplex(nx, ny, seed).map(Self).map_err(err)
    }

    #[getter]
    fn nx(&self) -> usize {
        self.0.nx()
    }

    #[getter]
    fn ny(&self) -> usize {
        self.0.ny()
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.0.rows()
    }

    fn entropy_x(&self) -> f64 {
        self.0.entropy_x()
    }

    fn mutual_information(&self) -> f64 {
        self.0.mutual_information()
    }

    /// Joint of `(f(X), Y)` for an encoder given as a label list.
    fn push_forward(&self, labels: Vec<usize>) -> PyResult<Self> {
        let f = Encoder::canonicalize(&labels).map_err(err)?;
        self.0.push_forward(&f).map(Self).map_err(err)
    }

    fn sample(&self, size: u64, seed: u64) -> PyResult<PyCounts> {
        dibmap::distributions::multinomial_sample(&self.0, size, seed)
            .map(PyCounts)
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("JointPMF(nx={}, ny={})", self.0.nx(), self.0.ny())
    }
}

#[pyclass(name = "Counts", module = "pydibmap", frozen)]
pub struct PyCounts(EmpiricalCounts);

#[pymethods]
impl PyCounts {
    #[new]
    fn new(rows: Vec<Vec<u64>>) -> PyResult<Self> {
        EmpiricalCounts::from_rows(&rows).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_csv(path: &str) -> PyResult<Self> {
        EmpiricalCounts::from_csv_path(path).map(Self).map_err(err)
    }

    #[getter]
    fn total(&self) -> u64 {
        self.0.total()
    }

    fn rows(&self) -> Vec<Vec<u64>> {
        self.0.rows()
    }

    fn normalize(&self) -> PyResult<PyJoint> {
        dibmap::distributions::normalize_counts(&self.0).map(PyJoint).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Counts(nx={}, ny={}, total={})", self.0.nx(), self.0.ny(), self.0.total())
    }
}

#[pyclass(name = "Point", module = "pydibmap", frozen, get_all)]
pub struct PyPoint {
    h: f64,
    i: f64,
    dh: Option<f64>,
    di: Option<f64>,
    encoder: Option<Vec<usize>>,
}

#[pymethods]
impl PyPoint {
    #[new]
    #[pyo3(signature = (h, i, encoder=None))]
    fn new(h: f64, i: f64, encoder: Option<Vec<usize>>) -> Self {
        Self {
            h,
            i,
            dh: None,
            di: None,
            encoder,
        }
    }

    fn __repr__(&self) -> String {
        match (self.dh, self.di) {
            (Some(a), Some(b)) => format!("Point(h={:.6}±{a:.4}, i={:.6}±{b:.4})", self.h, self.i),
            _ => format!("Point(h={:.6}, i={:.6})", self.h, self.i),
        }
    }
}

impl From<&ParetoPoint> for PyPoint {
    fn from(p: &ParetoPoint) -> Self {
        Self {
            h: p.entropy(),
            i: p.y,
            dh: p.dx,
            di: p.dy,
            encoder: p.encoder.as_ref().map(|e| e.assignment().to_vec()),
        }
    }
}

/// Ascending in entropy.
fn points(set: &ParetoSet) -> Vec<PyPoint> {
    set.iter().rev().map(PyPoint::from).collect()
}

fn to_set(pts: &[PyRef<'_, PyPoint>]) -> ParetoSet {
    ParetoSet::from_points(pts.iter().map(|p| ParetoPoint::new(-p.h, p.i)))
}

#[pyclass(name = "SearchStats", module = "pydibmap", frozen, get_all)]
pub struct PyStats {
    points_searched: u64,
    enqueued: u64,
    duplicates_skipped: u64,
    ties_skipped: u64,
    elapsed: f64,
}

impl From<dibmap::SearchStats> for PyStats {
    fn from(s: dibmap::SearchStats) -> Self {
        Self {
            points_searched: s.points_searched,
            enqueued: s.enqueued,
            duplicates_skipped: s.duplicates_skipped,
            ties_skipped: s.ties_skipped,
            elapsed: s.elapsed,
        }
    }
}

fn search_config(epsilon: f64, seed: u64, dedup: bool) -> SearchConfig {
    SearchConfig {
        dedup,
        ..SearchConfig::new(epsilon, seed)
    }
}

/// Frontier of `joint` by ε-greedy agglomerative search; `epsilon=float("inf")` is exhaustive.
#[pyfunction]
#[pyo3(signature = (joint, epsilon=0.0, seed=0, dedup=true))]
fn pareto_map(py: Python<'_>, joint: &PyJoint, epsilon: f64, seed: u64, dedup: bool) -> PyResult<(Vec<PyPoint>, PyStats)> {
    let cfg = search_config(epsilon, seed, dedup);
    let (set, stats) = py.detach(|| dibmap::pareto_mapper(&joint.0, &cfg)).map_err(err)?;
    Ok((points(&set), stats.into()))
}

/// Returns `(kept, all)` where `all` carries bootstrap error bars.
#[pyfunction]
#[pyo3(signature = (counts, epsilon=0.0, seed=0, bootstrap_reps=100, z=1.0))]
fn robust_map(
    py: Python<'_>,
    counts: &PyCounts,
    epsilon: f64,
    seed: u64,
    bootstrap_reps: usize,
    z: f64,
) -> PyResult<(Vec<PyPoint>, Vec<PyPoint>)> {
    let cfg = RobustConfig {
        bootstrap_reps,
        z,
        ..RobustConfig::new(epsilon, seed)
    };
    let res = py.detach(|| dibmap::robust_pareto_mapper(&counts.0, &cfg)).map_err(err)?;
    Ok((points(&res.filtered), points(&res.unfiltered)))
}

#[pyfunction]
fn oracle_frontier(py: Python<'_>, joint: &PyJoint) -> PyResult<Vec<PyPoint>> {
    let set = py.detach(|| brute_force_frontier(&joint.0)).map_err(err)?;
    Ok(points(&set))
}

/// Precision and recall of `candidate` against `truth`, matching within `tol` bits.
#[pyfunction]
#[pyo3(signature = (candidate, truth, tol=1e-9))]
fn score(candidate: Vec<PyRef<'_, PyPoint>>, truth: Vec<PyRef<'_, PyPoint>>, tol: f64) -> PyResult<(f64, f64)> {
    let s = precision_recall(&to_set(&candidate), &to_set(&truth), tol).map_err(err)?;
    Ok((s.precision, s.recall))
}

#[pyfunction]
#[pyo3(signature = (name, epsilon=0.05, seed=0))]
fn group_frontier(py: Python<'_>, name: &str, epsilon: f64, seed: u64) -> PyResult<(Vec<String>, Vec<PyPoint>)> {
    let g = dibmap::make_group(name).map_err(err)?;
    let triple = dibmap::group_joint(&g);
    let cfg = SearchConfig::new(epsilon, seed);
    let (set, _) = py.detach(|| dibmap::symmetric_pareto_mapper(&triple, &cfg)).map_err(err)?;
    Ok((g.labels().to_vec(), points(&set)))
}

#[pyfunction]
fn group_table(name: &str) -> PyResult<(Vec<String>, Vec<Vec<usize>>)> {
    let g = dibmap::make_group(name).map_err(err)?;
    Ok((g.labels().to_vec(), g.table().to_vec()))
}

#[pyfunction]
fn ingest_bigrams(data: &[u8]) -> PyResult<PyCounts> {
    dibmap::ingest_bigrams(data).map(PyCounts).map_err(err)
}

/// `(n, mean, std)` of the Pareto-set size of random clouds.
#[pyfunction]
#[pyo3(signature = (copula, sizes, trials=1000, seed=0))]
fn pareto_size_scaling(py: Python<'_>, copula: &str, sizes: Vec<usize>, trials: usize, seed: u64) -> PyResult<Vec<(usize, f64, f64)>> {
    let kind: CopulaKind = copula.parse().map_err(err)?;
    let rows = py.detach(|| scaling_experiment(kind, &sizes, trials, seed)).map_err(err)?;
    Ok(rows.into_iter().map(|r| (r.n, r.mean, r.std)).collect())
}

#[pymodule]
fn pydibmap(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyJoint>()?;
    m.add_class::<PyCounts>()?;
    m.add_class::<PyPoint>()?;
    m.add_class::<PyStats>()?;
    m.add_function(wrap_pyfunction!(pareto_map, m)?)?;
    m.add_function(wrap_pyfunction!(robust_map, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_frontier, m)?)?;
    m.add_function(wrap_pyfunction!(score, m)?)?;
    m.add_function(wrap_pyfunction!(group_frontier, m)?)?;
    m.add_function(wrap_pyfunction!(group_table, m)?)?;
    m.add_function(wrap_pyfunction!(ingest_bigrams, m)?)?;
    m.add_function(wrap_pyfunction!(pareto_size_scaling, m)?)?;
    Ok(())
}
