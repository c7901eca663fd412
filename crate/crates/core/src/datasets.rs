//! Input builders: letter bigram counts from raw text, and the
//! multiplication triples of small finite groups.

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::distributions::EmpiricalCounts;
use crate::error::{DibError, Result};
use crate::symmetric::TripleJointPMF;

/// Symbols `a`..`z` then the space.
pub const ALPHABET: [char; 27] = [
    'a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'i', 'j', 'k', 'l', 'm', 'n', 'o', 'p', 'q', 'r', 's', 't', 'u', 'v',
    'w', 'x', 'y', 'z', ' ',
];
pub const SPACE: usize = 26;

/// Reduces text to the 27-symbol alphabet. Accents are stripped by canonical
/// decomposition, letters are lowercased, and every maximal run of other
/// characters becomes one space.
pub fn preprocess(text: &str) -> Vec<usize> {
    let mut out = Vec::new();
    for c in text.nfd().filter(|c| !is_combining_mark(*c)).flat_map(char::to_lowercase) {
        if c.is_ascii_lowercase() {
            out.push(c as usize - 'a' as usize);
        } else if out.last() != Some(&SPACE) {
            out.push(SPACE);
        }
    }
    out
}

pub fn ingest_bigrams(bytes: &[u8]) -> Result<EmpiricalCounts> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| DibError::InvalidInput(format!("text is not valid UTF-8: {e}")))?;
    let symbols = preprocess(text);
    if symbols.len() < 2 {
        return Err(DibError::InvalidInput(format!(
            "text reduces to {} symbol(s); at least 2 are needed for a bigram",
            symbols.len()
        )));
    }
    let mut n = vec![0u64; 27 * 27];
    for w in symbols.windows(2) {
        n[w[0] * 27 + w[1]] += 1;
    }
    EmpiricalCounts::new(27, 27, n)
}

/// Cayley table: `table[a][b]` is the index of `a·b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTable {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
}

impl GroupTable {
    pub fn new(labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let g = labels.len();
        if g == 0 || table.len() != g || table.iter().any(|r| r.len() != g) {
            return Err(DibError::InvalidInput(format!("table must be {g}x{g}")));
        }
        fn is_permutation(cells: impl Iterator<Item = usize>, g: usize) -> bool {
            let mut seen = vec![false; g];
            let mut cells = cells;
            cells.all(|c| c < g && !std::mem::replace(&mut seen[c], true))
        }
        for a in 0..g {
            if !is_permutation(table[a].iter().copied(), g) || !is_permutation((0..g).map(|b| table[b][a]), g) {
                return Err(DibError::InvalidInput(format!("row or column {a} is not a permutation")));
            }
        }
        let has_identity = (0..g).any(|e| (0..g).all(|b| table[e][b] == b && table[b][e] == b));
        if !has_identity {
            return Err(DibError::InvalidInput("table has no identity element".into()));
        }
        Ok(Self { labels, table })
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn identity(&self) -> usize {
        let g = self.order();
        (0..g)
            .find(|&e| (0..g).all(|b| self.table[e][b] == b))
            .expect("validated on construction")
    }

    pub fn is_abelian(&self) -> bool {
        let g = self.order();
        (0..g).all(|a| (0..g).all(|b| self.table[a][b] == self.table[b][a]))
    }
}

pub const GROUP_NAMES: [&str; 2] = ["zmod40x", "pauli"];

pub fn make_group(name: &str) -> Result<GroupTable> {
    match name.trim().to_ascii_lowercase().as_str() {
        "zmod40x" => Ok(units_mod(40)),
        "pauli" => Ok(pauli()),
        other => Err(DibError::InvalidArgument(format!(
            "unknown group {other:?}; expected one of {GROUP_NAMES:?}"
        ))),
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn units_mod(n: u64) -> GroupTable {
    let units: Vec<u64> = (1..n).filter(|&k| gcd(k, n) == 1).collect();
    let table = units
        .iter()
        .map(|a| {
            units
                .iter()
                .map(|b| units.binary_search(&(a * b % n)).expect("units are closed"))
                .collect()
        })
        .collect();
    let labels = units.iter().map(u64::to_string).collect();
    GroupTable::new(labels, table).expect("units mod n form a group")
}

// Elements are i^k · σ with σ in {I, X, Y, Z}; index = 4·letter + slot,
// where slot 0..4 holds the phases +1, -1, +i, -i.
const PHASE_OF_SLOT: [u8; 4] = [0, 2, 1, 3];
const SLOT_OF_PHASE: [usize; 4] = [0, 2, 1, 3];
const LETTERS: [char; 4] = ['I', 'X', 'Y', 'Z'];
const PHASE_LABEL: [&str; 4] = ["+", "-", "+i", "-i"];

/// `σ_a σ_b = i^k σ_c`, returned as `(k, c)`.
fn pauli_letter_product(a: usize, b: usize) -> (u8, usize) {
    if a == 0 {
        return (0, b);
    }
    if b == 0 {
        return (0, a);
    }
    if a == b {
        return (0, 0);
    }
    let c = 6 - a - b;
    // XY = iZ, YZ = iX, ZX = iY; the reversed order picks up -i
    let cyclic = (b + 3 - a) % 3 == 1;
    (if cyclic { 1 } else { 3 }, c)
}

fn pauli() -> GroupTable {
    let decode = |idx: usize| (PHASE_OF_SLOT[idx % 4], idx / 4);
    let table = (0..16)
        .map(|a| {
            (0..16)
                .map(|b| {
                    let (pa, la) = decode(a);
                    let (pb, lb) = decode(b);
                    let (k, c) = pauli_letter_product(la, lb);
                    4 * c + SLOT_OF_PHASE[((pa + pb + k) % 4) as usize]
                })
                .collect()
        })
        .collect();
    let labels = (0..16)
        .map(|idx| format!("{}{}", PHASE_LABEL[idx % 4], LETTERS[idx / 4]))
        .collect();
    GroupTable::new(labels, table).expect("Pauli group table")
}

/// Uniform `(X1, X2)` over `G²` with `Y = X1·X2`.
pub fn group_joint(group: &GroupTable) -> TripleJointPMF {
    let g = group.order();
    let w = 1.0 / (g * g) as f64;
    let mut p = vec![0.0; g * g * g];
    for a in 0..g {
        for b in 0..g {
            p[(a * g + b) * g + group.mul(a, b)] = w;
        }
    }
    TripleJointPMF::new(g, g, p).expect("uniform mass over a Latin square")
}
