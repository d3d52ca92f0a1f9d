//! Exact linear algebra over the rationals and a sparse echelon reducer
//! over Z/p.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{format_scalar, inv_mod, mul_mod, Scalar};

/// Reduced row echelon form in place. Pivots are chosen at the lowest
/// available column index. Returns the pivot columns; zero rows are dropped.
pub fn rref(rows: &mut Vec<Vec<Scalar>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(found) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, found);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank(mut rows: Vec<Vec<Scalar>>) -> usize {
    rref(&mut rows).len()
}

/// Basis of `{x : M x = 0}` where `M` is given by rows of length `ncols`.
pub fn nullspace(rows: Vec<Vec<Scalar>>, ncols: usize) -> Vec<Vec<Scalar>> {
    let mut m = rows;
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Scalar::zero(); ncols];
            v[f] = Scalar::one();
            for (row, &pc) in m.iter().zip(&pivots) {
                v[pc] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// A linear subspace of `F^dim`, stored as a reduced echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    dim: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(dim: usize) -> Self {
        Self { dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(dim: usize) -> Self {
        let rows = (0..dim)
            .map(|i| {
                let mut v = vec![Scalar::zero(); dim];
                v[i] = Scalar::one();
                v
            })
            .collect();
        Self { dim, rows, pivots: (0..dim).collect() }
    }

    pub fn span<I>(dim: usize, vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<Scalar>>,
    {
        let mut rows = Vec::new();
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
            if v.iter().any(|x| !x.is_zero()) {
                rows.push(v);
            }
        }
        let pivots = rref(&mut rows);
        Ok(Self { dim, rows, pivots })
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Remainder of `v` after eliminating the pivot coordinates.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut out = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            if out[pc].is_zero() {
                continue;
            }
            let f = out[pc].clone();
            for (x, r) in out.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        v.len() == self.dim && self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    pub fn join(&self, other: &Subspace) -> Result<Subspace> {
        Subspace::span(self.dim, self.rows.iter().chain(other.rows.iter()).cloned())
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.rows.iter().map(|r| r.iter().map(format_scalar).collect()).collect()
    }
}

impl Serialize for Subspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

/// Sparse row over Z/p: strictly increasing column indices, nonzero values.
pub type SparseRow = Vec<(u64, u64)>;

/// Incremental echelon basis over Z/p. Every stored row is monic at its
/// leading column; inserting a row reduces it by leading terms only.
#[derive(Debug)]
pub struct SparseEchelon {
    p: u64,
    by_lead: Leads,
    rows: Vec<SparseRow>,
}

/// Pivot lookup: a dense table when the column range is known and small.
#[derive(Debug)]
enum Leads {
    Dense(Vec<u32>),
    Hashed(HashMap<u64, usize>),
}

const NO_PIVOT: u32 = u32::MAX;
const DENSE_LIMIT: u64 = 1 << 26;

impl Leads {
    fn get(&self, c: u64) -> Option<usize> {
        match self {
            Leads::Dense(v) => v.get(c as usize).copied().filter(|&i| i != NO_PIVOT).map(|i| i as usize),
            Leads::Hashed(m) => m.get(&c).copied(),
        }
    }

    fn insert(&mut self, c: u64, idx: usize) {
        match self {
            Leads::Dense(v) => v[c as usize] = idx as u32,
            Leads::Hashed(m) => {
                m.insert(c, idx);
            }
        }
    }
}

impl SparseEchelon {
    pub fn new(p: u64) -> Self {
        Self { p, by_lead: Leads::Hashed(HashMap::new()), rows: Vec::new() }
    }

    /// For rows whose column indices are all below `columns`.
    pub fn with_columns(p: u64, columns: u64) -> Self {
        let by_lead = if columns <= DENSE_LIMIT {
            Leads::Dense(vec![NO_PIVOT; columns as usize])
        } else {
            Leads::Hashed(HashMap::new())
        };
        Self { p, by_lead, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Returns `true` when the row was independent of the stored ones.
    pub fn insert(&mut self, mut row: SparseRow) -> bool {
        let p = self.p;
        let mut scratch = Vec::with_capacity(row.len());
        while let Some(&(lead, coeff)) = row.first() {
            match self.by_lead.get(lead) {
                Some(idx) => {
                    // row <- row - coeff * pivot_row
                    scratch.clear();
                    axpy_merge(&row, &self.rows[idx], p - coeff, p, &mut scratch);
                    std::mem::swap(&mut row, &mut scratch);
                }
                None => {
                    let inv = inv_mod(coeff, p);
                    for e in row.iter_mut() {
                        e.1 = mul_mod(e.1, inv, p);
                    }
                    let n = self.rows.len();
                    self.by_lead.insert(lead, n);
                    self.rows.push(row);
                    return true;
                }
            }
        }
        false
    }
}

/// `out = x + a * y` for sorted sparse rows.
fn axpy_merge(x: &[(u64, u64)], y: &[(u64, u64)], a: u64, p: u64, out: &mut SparseRow) {
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j == y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i == x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push(x[i]);
            i += 1;
        } else if take_y {
            out.push((y[j].0, mul_mod(y[j].1, a, p)));
            j += 1;
        } else {
            let v = (x[i].1 + mul_mod(y[j].1, a, p)) % p;
            if v != 0 {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
}

/// Sorts entries by column, merges duplicates modulo `p` and drops zeros.
pub fn normalize_row(mut entries: Vec<(u64, u64)>, p: u64) -> SparseRow {
    entries.sort_unstable_by_key(|e| e.0);
    let mut out: SparseRow = Vec::with_capacity(entries.len());
    for (c, v) in entries {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 = (last.1 + v) % p,
            _ => out.push((c, v % p)),
        }
    }
    out.retain(|e| e.1 != 0);
    out
}
