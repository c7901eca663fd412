//! Exact discrete distributions and the information functionals on them.
//!
//! All quantities are in bits. Entropies are accumulated over the non-zero
//! masses in ascending order, so any two arrays holding the same multiset of
//! masses produce bitwise-identical entropies. The mapper relies on this:
//! encoders that are relabelings of one another land on exactly the same
//! objective pair.

use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand_distr::{Binomial, Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::encoders::Encoder;
use crate::error::{DibError, Result};
use crate::rng;

/// Absolute tolerance on total probability mass.
pub const MASS_TOL: f64 = 1e-12;
/// Numerical slack allowed on information quantities.
pub const INFO_TOL: f64 = 1e-9;

/// Entropy in bits of non-negative masses that sum to `total`.
///
/// `masses` is reordered in place.
pub(crate) fn entropy_of_masses(masses: &mut [f64], total: f64) -> f64 {
    masses.sort_unstable_by(f64::total_cmp);
    let mut h = 0.0;
    for &m in masses.iter() {
        if m > 0.0 {
            let p = m / total;
            h -= p * p.log2();
        }
    }
    h.max(0.0)
}

pub(crate) fn check_probabilities(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(DibError::InvalidDistribution("empty distribution".into()));
    }
    let mut sum = 0.0;
    for (k, &v) in values.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(DibError::InvalidDistribution(format!(
                "entry {k} is {v}, expected a finite non-negative value"
            )));
        }
        sum += v;
    }
    if (sum - 1.0).abs() > MASS_TOL {
        return Err(DibError::InvalidDistribution(format!(
            "entries sum to {sum:.15}, expected 1"
        )));
    }
    Ok(())
}

/// Shannon entropy `-Σ p log2 p` of a probability vector, with `0 log 0 = 0`.
pub fn entropy(dist: &[f64]) -> Result<f64> {
    check_probabilities(dist)?;
    let mut scratch = dist.to_vec();
    Ok(entropy_of_masses(&mut scratch, 1.0))
}

/// Exact joint distribution `p(x, y)`, stored row-major with one row per X outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointPMF {
    nx: usize,
    ny: usize,
    p: Vec<f64>,
}

impl JointPMF {
    pub fn new(nx: usize, ny: usize, p: Vec<f64>) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(DibError::InvalidDistribution(format!(
                "shape {nx}x{ny} has an empty axis"
            )));
        }
        if p.len() != nx * ny {
            return Err(DibError::Dimension {
                expected: nx * ny,
                actual: p.len(),
            });
        }
        check_probabilities(&p)?;
        Ok(Self { nx, ny, p })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let (nx, ny, p) = flatten_rows(rows)?;
        Self::new(nx, ny, p)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.p[x * self.ny + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.p[x * self.ny..(x + 1) * self.ny]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.p.chunks(self.ny).map(<[f64]>::to_vec).collect()
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        self.p.chunks(self.ny).map(|r| r.iter().sum()).collect()
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

    pub fn entropy_x(&self) -> f64 {
        entropy_of_masses(&mut self.marginal_x(), 1.0)
    }

    pub fn entropy_y(&self) -> f64 {
        entropy_of_masses(&mut self.marginal_y(), 1.0)
    }

    pub fn entropy_joint(&self) -> f64 {
        entropy_of_masses(&mut self.p.clone(), 1.0)
    }

    /// `I(X;Y) = H(X) + H(Y) - H(X,Y)`, clamped at zero.
    pub fn mutual_information(&self) -> f64 {
        (self.entropy_x() + self.entropy_y() - self.entropy_joint()).max(0.0)
    }

    /// Joint of `(f(X), Y)`: rows of each cluster summed together.
    pub fn push_forward(&self, f: &Encoder) -> Result<JointPMF> {
        if f.domain_size() != self.nx {
            return Err(DibError::Dimension {
                expected: self.nx,
                actual: f.domain_size(),
            });
        }
        let p = push_rows(&self.p, self.ny, f);
        Ok(JointPMF {
            nx: f.num_clusters(),
            ny: self.ny,
            p,
        })
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let rows = read_matrix::<f64, _>(reader)?;
        Self::from_rows(&rows)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_matrix(writer, self.p.chunks(self.ny))
    }
}

/// Sums the rows of a row-major `len/ny × ny` matrix by cluster of `f`.
pub(crate) fn push_rows(values: &[f64], ny: usize, f: &Encoder) -> Vec<f64> {
    let mut out = vec![0.0; f.num_clusters() * ny];
    for (x, &z) in f.assignment().iter().enumerate() {
        let src = &values[x * ny..(x + 1) * ny];
        for (o, v) in out[z * ny..(z + 1) * ny].iter_mut().zip(src) {
            *o += v;
        }
    }
    out
}

/// Writes into `out` the `m - 1` row matrix obtained by adding row `j` of
/// `parent` onto row `i` and dropping row `j`.
pub(crate) fn merge_rows(parent: &[f64], ny: usize, m: usize, i: usize, j: usize, out: &mut Vec<f64>) {
    out.clear();
    for k in 0..m {
        if k == j {
            continue;
        }
        let row = &parent[k * ny..(k + 1) * ny];
        if k == i {
            let other = &parent[j * ny..(j + 1) * ny];
            out.extend(row.iter().zip(other).map(|(a, b)| a + b));
        } else {
            out.extend_from_slice(row);
        }
    }
}

/// Objective pair `(-H(Z), I(Z;Y))` of a pushed-forward mass matrix.
///
/// `mass` is `rows × cols` with entries summing to `total`; `h_y` is the
/// entropy of the column marginal, which is the same for every encoder.
pub(crate) fn dib_point(
    mass: &[f64],
    cols: usize,
    total: f64,
    h_y: f64,
    scratch: &mut Vec<f64>,
) -> (f64, f64) {
    scratch.clear();
    scratch.extend(mass.chunks(cols).map(|r| r.iter().sum::<f64>()));
    let h_z = entropy_of_masses(scratch, total);
    scratch.clear();
    scratch.extend(mass.iter().copied().filter(|&v| v > 0.0));
    let h_zy = entropy_of_masses(scratch, total);
    (0.0 - h_z, (h_z + h_y - h_zy).max(0.0))
}

pub fn mutual_information(joint: &JointPMF) -> f64 {
    joint.mutual_information()
}

pub fn push_forward(joint: &JointPMF, f: &Encoder) -> Result<JointPMF> {
    joint.push_forward(f)
}

/// Draws a joint distribution uniformly from the simplex of dimension `nx·ny − 1`
/// by normalizing unit-rate exponential variates.
pub fn sample_simplex(nx: usize, ny: usize, seed: u64) -> Result<JointPMF> {
    if nx == 0 || ny == 0 {
        return Err(DibError::InvalidArgument(format!(
            "simplex shape {nx}x{ny} has an empty axis"
        )));
    }
    let mut rng = rng::from_seed(seed);
    let mut p: Vec<f64> = (0..nx * ny).map(|_| Exp1.sample(&mut rng)).collect();
    let total: f64 = p.iter().sum();
    for v in &mut p {
        *v /= total;
    }
    JointPMF::new(nx, ny, p)
}

/// Non-negative integer sample counts over an `nx × ny` grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalCounts {
    nx: usize,
    ny: usize,
    n: Vec<u64>,
    total: u64,
}

impl EmpiricalCounts {
    pub fn new(nx: usize, ny: usize, n: Vec<u64>) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(DibError::InvalidInput(format!(
                "shape {nx}x{ny} has an empty axis"
            )));
        }
        if n.len() != nx * ny {
            return Err(DibError::Dimension {
                expected: nx * ny,
                actual: n.len(),
            });
        }
        let total = n.iter().sum();
        if total == 0 {
            return Err(DibError::InvalidArgument("counts total is zero".into()));
        }
        Ok(Self { nx, ny, n, total })
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let (nx, ny, n) = flatten_rows(rows)?;
        Self::new(nx, ny, n)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn counts(&self) -> &[u64] {
        &self.n
    }

    pub fn get(&self, x: usize, y: usize) -> u64 {
        self.n[x * self.ny + y]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.n.chunks(self.ny).map(<[u64]>::to_vec).collect()
    }

    /// Counts as floating-point masses, row-major.
    pub(crate) fn masses(&self) -> Vec<f64> {
        self.n.iter().map(|&c| c as f64).collect()
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let rows = read_matrix::<u64, _>(reader)?;
        Self::from_rows(&rows)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_matrix(writer, self.n.chunks(self.ny))
    }
}

/// Draws `s` multinomial trials with cell probabilities `joint`.
///
/// Cells are filled one at a time from conditional binomials, so the stream
/// consumed depends only on `(joint, s, seed)`.
pub fn multinomial_sample(joint: &JointPMF, s: u64, seed: u64) -> Result<EmpiricalCounts> {
    if s == 0 {
        return Err(DibError::InvalidArgument("trial count must be at least 1".into()));
    }
    let mut rng = rng::from_seed(seed);
    let n = multinomial(joint.probabilities(), s, &mut rng);
    EmpiricalCounts::new(joint.nx, joint.ny, n)
}

pub(crate) fn multinomial(probs: &[f64], s: u64, rng: &mut rng::Rng) -> Vec<u64> {
    let mut out = vec![0u64; probs.len()];
    let mut remaining = s;
    let mut mass_left: f64 = probs.iter().sum();
    let last_nonzero = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    for (k, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if k == last_nonzero {
            out[k] = remaining;
            break;
        }
        if p <= 0.0 {
            continue;
        }
        let q = (p / mass_left).clamp(0.0, 1.0);
        let draw = if q >= 1.0 {
            remaining
        } else {
            Binomial::new(remaining, q)
                .expect("conditional probability lies in [0, 1]")
                .sample(rng)
        };
        out[k] = draw;
        remaining -= draw;
        mass_left -= p;
        if mass_left <= 0.0 {
            // Rounding exhausted the tail; give the rest to the next live cell.
            mass_left = f64::MIN_POSITIVE;
        }
    }
    out
}

/// Empirical joint `n_ij / total`.
pub fn normalize_counts(counts: &EmpiricalCounts) -> Result<JointPMF> {
    if counts.total == 0 {
        return Err(DibError::InvalidArgument("counts total is zero".into()));
    }
    let t = counts.total as f64;
    let mut p: Vec<f64> = counts.n.iter().map(|&c| c as f64 / t).collect();
    // Division can leave the sum a few ulps off one; push the residue into the largest cell.
    let residue = 1.0 - p.iter().sum::<f64>();
    if let Some(big) = (0..p.len()).max_by(|&a, &b| p[a].total_cmp(&p[b])) {
        p[big] += residue;
    }
    JointPMF::new(counts.nx, counts.ny, p)
}

/// Sampling ratio `s / 2^{H(X,Y)}`.
pub fn sampling_ratio(joint: &JointPMF, s: u64) -> f64 {
    s as f64 / joint.entropy_joint().exp2()
}

/// Trial count whose sampling ratio is `r`, rounded to the nearest integer (at least 1).
pub fn trials_for_ratio(joint: &JointPMF, r: f64) -> u64 {
    (r * joint.entropy_joint().exp2()).round().max(1.0) as u64
}

pub(crate) fn flatten_rows<T: Copy>(rows: &[Vec<T>]) -> Result<(usize, usize, Vec<T>)> {
    let nx = rows.len();
    let ny = rows.first().map_or(0, Vec::len);
    if nx == 0 || ny == 0 {
        return Err(DibError::InvalidInput("matrix has no entries".into()));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != ny) {
        return Err(DibError::InvalidInput(format!(
            "row {i} has {} columns, expected {ny}",
            r.len()
        )));
    }
    Ok((nx, ny, rows.iter().flatten().copied().collect()))
}

/// Reads a header-less numeric CSV matrix.
pub fn read_matrix<T, R>(reader: R) -> Result<Vec<Vec<T>>>
where
    T: FromStr,
    R: Read,
{
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(j, field)| {
                field.parse::<T>().map_err(|_| {
                    DibError::InvalidInput(format!("row {i}, column {j}: cannot parse {field:?}"))
                })
            })
            .collect::<Result<Vec<T>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub(crate) fn write_matrix<'a, T, W, I>(writer: W, rows: I) -> Result<()>
where
    T: ToString + 'a,
    W: Write,
    I: IntoIterator<Item = &'a [T]>,
{
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for row in rows {
        wtr.write_record(row.iter().map(ToString::to_string))?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag2() -> JointPMF {
        JointPMF::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert!((entropy(&[0.25, 0.75]).unwrap() - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn entropy_rejects_bad_input() {
        assert!(matches!(entropy(&[0.5, 0.6]), Err(DibError::InvalidDistribution(_))));
        assert!(matches!(entropy(&[-0.1, 1.1]), Err(DibError::InvalidDistribution(_))));
        assert!(entropy(&[]).is_err());
    }

    #[test]
    fn mutual_information_examples() {
        assert_eq!(diag2().mutual_information(), 1.0);
        let j = JointPMF::from_rows(&[vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        assert!((j.mutual_information() - 0.278072).abs() < 1e-6);
        let u = [0.2, 0.3, 0.5];
        let v = [0.6, 0.4];
        let rows: Vec<Vec<f64>> = u.iter().map(|a| v.iter().map(|b| a * b).collect()).collect();
        let prod = JointPMF::from_rows(&rows).unwrap();
        assert!(prod.mutual_information().abs() < 1e-12);
    }

    #[test]
    fn joint_rejects_wrong_mass() {
        assert!(JointPMF::from_rows(&[vec![0.5, 0.4]]).is_err());
        assert!(JointPMF::new(0, 2, vec![]).is_err());
        assert!(JointPMF::from_rows(&[vec![0.5], vec![0.25, 0.25]]).is_err());
    }

    #[test]
    fn push_forward_examples() {
        let j = diag2();
        assert_eq!(j.push_forward(&Encoder::identity(2).unwrap()).unwrap(), j);
        let c = Encoder::canonicalize(&[0, 0]).unwrap();
        assert_eq!(j.push_forward(&c).unwrap().rows(), vec![vec![0.5, 0.5]]);

        let j3 = JointPMF::from_rows(&[vec![0.1, 0.2], vec![0.3, 0.1], vec![0.05, 0.25]]).unwrap();
        let f = Encoder::canonicalize(&[0, 0, 1]).unwrap();
        let out = j3.push_forward(&f).unwrap();
        assert_eq!(out.nx(), 2);
        let expect = [[0.1 + 0.3, 0.2 + 0.1], [0.05, 0.25]];
        for (z, row) in expect.iter().enumerate() {
            for (y, v) in row.iter().enumerate() {
                assert!((out.get(z, y) - v).abs() < 1e-15);
            }
        }
        assert!(j3.push_forward(&Encoder::identity(2).unwrap()).is_err());
    }

    #[test]
    fn sample_simplex_examples() {
        assert_eq!(sample_simplex(1, 1, 9).unwrap().rows(), vec![vec![1.0]]);
        assert_eq!(sample_simplex(4, 3, 5).unwrap(), sample_simplex(4, 3, 5).unwrap());
        assert_ne!(sample_simplex(4, 3, 5).unwrap(), sample_simplex(4, 3, 6).unwrap());
        assert!(sample_simplex(0, 3, 1).is_err());
    }

    #[test]
    fn sample_simplex_dirichlet_moments() {
        // Dirichlet(1,...,1) over K = 6 cells: mean 1/K, variance (K-1)/(K^2 (K+1)).
        let draws = 100_000u64;
        let k = 6.0;
        let var = (k - 1.0) / (k * k * (k + 1.0));
        let se = (var / draws as f64).sqrt();
        let mut sums = [0.0f64; 6];
        for s in 0..draws {
            let j = sample_simplex(3, 2, s).unwrap();
            for (acc, v) in sums.iter_mut().zip(j.probabilities()) {
                *acc += v;
            }
        }
        for acc in sums {
            let mean = acc / draws as f64;
            assert!((mean - 1.0 / k).abs() < 3.0 * se, "mean {mean}");
        }
    }

    #[test]
    fn multinomial_examples() {
        let single = JointPMF::from_rows(&[vec![1.0]]).unwrap();
        assert_eq!(multinomial_sample(&single, 7, 3).unwrap().rows(), vec![vec![7]]);
        assert!(matches!(
            multinomial_sample(&single, 0, 3),
            Err(DibError::InvalidArgument(_))
        ));

        let j = sample_simplex(4, 3, 11).unwrap();
        let c = multinomial_sample(&j, 1_000_000, 42).unwrap();
        assert_eq!(c.total(), 1_000_000);
        assert_eq!(c, multinomial_sample(&j, 1_000_000, 42).unwrap());
        let p = normalize_counts(&c).unwrap();
        let max_dev = p
            .probabilities()
            .iter()
            .zip(j.probabilities())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(max_dev < 5e-3, "{max_dev}");
    }

    #[test]
    fn multinomial_skips_zero_cells() {
        let j = JointPMF::from_rows(&[vec![0.0, 0.5], vec![0.5, 0.0]]).unwrap();
        let c = multinomial_sample(&j, 1000, 1).unwrap();
        assert_eq!(c.get(0, 0), 0);
        assert_eq!(c.get(1, 1), 0);
        assert_eq!(c.total(), 1000);
    }

    #[test]
    fn sampling_ratio_definition() {
        let j = JointPMF::from_rows(&[vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        assert_eq!(sampling_ratio(&j, 100), 25.0);
        assert_eq!(trials_for_ratio(&j, 25.0), 100);
    }

    #[test]
    fn normalize_examples() {
        let c = EmpiricalCounts::from_rows(&[vec![2, 2]]).unwrap();
        assert_eq!(normalize_counts(&c).unwrap().rows(), vec![vec![0.5, 0.5]]);
        let c = EmpiricalCounts::from_rows(&[vec![1, 0], vec![0, 3]]).unwrap();
        assert_eq!(
            normalize_counts(&c).unwrap().rows(),
            vec![vec![0.25, 0.0], vec![0.0, 0.75]]
        );
        assert!(EmpiricalCounts::from_rows(&[vec![0, 0]]).is_err());
        let j = sample_simplex(5, 7, 2).unwrap();
        let p = normalize_counts(&multinomial_sample(&j, 333, 8).unwrap()).unwrap();
        assert!((p.probabilities().iter().sum::<f64>() - 1.0).abs() < MASS_TOL);
    }

    #[test]
    fn csv_round_trip_and_validation() {
        let j = sample_simplex(3, 4, 1).unwrap();
        let mut buf = Vec::new();
        j.write_csv(&mut buf).unwrap();
        assert_eq!(JointPMF::read_csv(buf.as_slice()).unwrap(), j);

        let c = EmpiricalCounts::read_csv("1, 2\n3,4\n".as_bytes()).unwrap();
        assert_eq!(c.total(), 10);
        assert!(JointPMF::read_csv("0.5,0.5\n0.5\n".as_bytes()).is_err());
        assert!(JointPMF::read_csv("0.5,abc\n".as_bytes()).is_err());
        assert!(JointPMF::read_csv("0.7,0.7\n".as_bytes()).is_err());
    }
}
