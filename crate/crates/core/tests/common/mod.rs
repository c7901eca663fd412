//! Reference computations written from the definitions, sharing no code with
//! the library's evaluation path.
#![allow(dead_code)]

use std::collections::HashMap;

pub fn entropy_bits(weights: impl IntoIterator<Item = f64>) -> f64 {
    let w: Vec<f64> = weights.into_iter().collect();
    let total: f64 = w.iter().sum();
    w.iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| {
            let p = v / total;
            -p * p.ln() / std::f64::consts::LN_2
        })
        .sum()
}

/// `(H(Z), I(Z;Y))` for `Z = labels[X]` on a row-major `rows × ny` table.
pub fn dib_pair(p: &[f64], ny: usize, labels: &[usize]) -> (f64, f64) {
    let mut pz: HashMap<usize, f64> = HashMap::new();
    let mut pzy: HashMap<(usize, usize), f64> = HashMap::new();
    let mut py = vec![0.0; ny];
    for (x, &z) in labels.iter().enumerate() {
        for y in 0..ny {
            let v = p[x * ny + y];
            *pz.entry(z).or_default() += v;
            *pzy.entry((z, y)).or_default() += v;
            py[y] += v;
        }
    }
    let hz = entropy_bits(pz.into_values());
    let hzy = entropy_bits(pzy.into_values());
    let hy = entropy_bits(py);
    (hz, hz + hy - hzy)
}

/// Every set partition of `[n]` as a label vector, by recursive insertion.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(k: usize, n: usize, cur: &mut Vec<usize>, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if k == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=blocks {
            cur.push(b);
            go(k + 1, n, cur, blocks.max(b + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), 0, &mut out);
    out
}

/// Non-dominated subset of `(x, y)` pairs (maximizing both), with exact
/// duplicates collapsed, sorted by x.
pub fn pareto_filter(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, &(x, y)) in points.iter().enumerate() {
        let dominated = points.iter().enumerate().any(|(j, &(a, b))| {
            j != i && a >= x && b >= y && (a > x || b > y)
        });
        if !dominated && !out.iter().any(|&(a, b)| a == x && b == y) {
            out.push((x, y));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Ground-truth frontier `(−H, I)` of a joint by direct enumeration.
pub fn reference_frontier(p: &[f64], nx: usize, ny: usize) -> Vec<(f64, f64)> {
    let pts: Vec<(f64, f64)> = all_partitions(nx)
        .iter()
        .map(|l| {
            let (h, i) = dib_pair(p, ny, l);
            (-h, i)
        })
        .collect();
    pareto_filter(&pts)
}

/// Matches two frontiers point for point within `tol`.
pub fn same_pairs(a: &[(f64, f64)], b: &[(f64, f64)], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().all(|p| b.iter().any(|q| (p.0 - q.0).abs() <= tol && (p.1 - q.1).abs() <= tol))
}
