//! Codimension sequences: `c_n(A)` is the rank of the matrix whose row for
//! a permutation `sigma` lists the coordinates of
//! `a_{sigma(1)} ... a_{sigma(n)}` for every tuple `a` of basis elements.

use std::io::Write;
use std::time::Instant;

use itertools::Itertools;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{MulTable, StructureAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{normalize_row, rank, SparseEchelon, SparseRow};
use crate::scalar::{is_prime, random_prime_near_2_31, PrimeField, Scalar};

/// Default cap on `n! * dim^(n+1)` for the exact oracle.
pub const ORACLE_BUDGET: u128 = 1 << 19;
/// Above this many columns the transposed elimination is used.
pub const COLUMN_BUDGET: u128 = 1 << 36;
const MAX_PRIMES: usize = 5;
const CHUNK: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Modular,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Modular => "modular",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodimRecord {
    pub n: usize,
    pub c_n: u64,
    pub method: Method,
    pub primes: Vec<u64>,
    pub verified: bool,
    pub seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Auto,
    /// One row per permutation.
    Rows,
    /// One row per (tuple, output coordinate); columns are permutations.
    Columns,
}

#[derive(Clone, Debug)]
pub struct CodimOptions {
    pub seed: u64,
    /// Explicit primes replace the seeded draw; at least two are needed.
    pub primes: Option<Vec<u64>>,
    pub orientation: Orientation,
    /// Budget of the exact oracle used when primes keep disagreeing.
    pub oracle_budget: u128,
}

impl Default for CodimOptions {
    fn default() -> Self {
        Self { seed: 0, primes: None, orientation: Orientation::Auto, oracle_budget: ORACLE_BUDGET }
    }
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn oracle_cost(dim: usize, n: usize) -> Option<u128> {
    (dim as u128).checked_pow(n as u32 + 1)?.checked_mul(factorial(n))
}

/// Rank over the rationals of the full evaluation matrix, computed by
/// direct products of dense coefficient vectors.
pub fn codimension_exact_oracle(alg: &StructureAlgebra, n: usize, budget: u128) -> Result<CodimRecord> {
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    let dim = alg.dim();
    match oracle_cost(dim, n) {
        Some(c) if c <= budget => {}
        _ => {
            return Err(Error::BudgetExceeded(format!(
                "exact oracle needs n! * dim^(n+1) <= {budget} (n = {n}, dim = {dim})"
            )))
        }
    }
    let start = Instant::now();
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    // rows[sigma] restricted to the columns that are nonzero somewhere
    let mut rows: Vec<Vec<Scalar>> = vec![Vec::new(); perms.len()];
    for tuple in (0..n).map(|_| 0..dim).multi_cartesian_product() {
        let values: Vec<Vec<Scalar>> = tuple.iter().map(|&b| alg.basis_vector(b)).collect();
        let products: Vec<Vec<Scalar>> = perms
            .iter()
            .map(|sigma| {
                sigma[1..]
                    .iter()
                    .fold(values[sigma[0]].clone(), |acc, &i| alg.multiply(&acc, &values[i]).expect("dimensions agree"))
            })
            .collect();
        for k in 0..dim {
            if products.iter().any(|p| !p[k].is_zero()) {
                for (row, p) in rows.iter_mut().zip(&products) {
                    row.push(p[k].clone());
                }
            }
        }
    }
    let r = if rows[0].is_empty() { 0 } else { rank(rows) };
    Ok(CodimRecord {
        n,
        c_n: r as u64,
        method: Method::Exact,
        primes: vec![],
        verified: true,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Rank modulo `p`, or `None` when a structure constant has no image.
pub fn rank_mod_p(alg: &StructureAlgebra, n: usize, p: u64, orientation: Orientation) -> Option<usize> {
    let ring = PrimeField::new(p);
    let table = alg.table(&ring)?;
    let columns = (alg.dim() as u128).checked_pow(n as u32 + 1).unwrap_or(u128::MAX);
    let by_columns = match orientation {
        Orientation::Rows => false,
        Orientation::Columns => true,
        Orientation::Auto => columns > COLUMN_BUDGET,
    };
    Some(if by_columns { rank_by_tuples(&ring, &table, n) } else { rank_by_permutations(&ring, &table, n) })
}

fn rank_by_permutations(ring: &PrimeField, table: &MulTable<u64>, n: usize) -> usize {
    let dim = table.dim();
    let columns = (dim as u64).pow(n as u32 + 1);
    let mut echelon = SparseEchelon::with_columns(ring.p, columns);
    for chunk in &(0..n).permutations(n).chunks(CHUNK) {
        let chunk: Vec<Vec<usize>> = chunk.collect();
        let rows: Vec<SparseRow> = chunk.par_iter().map(|sigma| permutation_row(ring, table, dim, sigma)).collect();
        for row in rows {
            echelon.insert(row);
        }
    }
    echelon.rank()
}

/// Entries `((tuple, k), coefficient)` of the row of `sigma`, found by
/// extending tuples along `sigma` while the running product is nonzero.
fn permutation_row(ring: &PrimeField, table: &MulTable<u64>, dim: usize, sigma: &[usize]) -> SparseRow {
    let n = sigma.len();
    let weights: Vec<u64> = (0..n).map(|i| (dim as u64).pow((n - 1 - i) as u32)).collect();
    let mut out = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        ring: &PrimeField,
        table: &MulTable<u64>,
        sigma: &[usize],
        weights: &[u64],
        pos: usize,
        base: u64,
        prod: Option<&Vec<(u32, u64)>>,
        out: &mut Vec<(u64, u64)>,
    ) {
        let dim = table.dim() as u64;
        if pos == sigma.len() {
            for (k, v) in prod.expect("n >= 1") {
                out.push((base * dim + *k as u64, *v));
            }
            return;
        }
        for b in 0..dim as u32 {
            let next = match prod {
                None => vec![(b, 1)],
                Some(p) => table.mul_sparse(ring, p, &[(b, 1)]),
            };
            if next.is_empty() {
                continue;
            }
            let base = base + b as u64 * weights[sigma[pos]];
            rec(ring, table, sigma, weights, pos + 1, base, Some(&next), out);
        }
    }
    rec(ring, table, sigma, &weights, 0, 0, None, &mut out);
    normalize_row(out, ring.p)
}

/// Lexicographic rank of a permutation.
fn permutation_index(sigma: &[usize]) -> u64 {
    let n = sigma.len();
    let mut idx = 0u64;
    for i in 0..n {
        let smaller = sigma[i + 1..].iter().filter(|&&x| x < sigma[i]).count() as u64;
        idx = idx * (n - i) as u64 + smaller;
    }
    idx
}

fn rank_by_tuples(ring: &PrimeField, table: &MulTable<u64>, n: usize) -> usize {
    let dim = table.dim();
    let full = factorial(n) as usize;
    let mut echelon = SparseEchelon::with_columns(ring.p, full as u64);
    let tuples = (0..n).map(|_| 0..dim as u32).multi_cartesian_product();
    for chunk in &tuples.chunks(CHUNK) {
        let chunk: Vec<Vec<u32>> = chunk.collect();
        let rows: Vec<Vec<SparseRow>> = chunk.par_iter().map(|a| tuple_rows(ring, table, a)).collect();
        for row in rows.into_iter().flatten() {
            echelon.insert(row);
        }
        if echelon.rank() == full {
            break;
        }
    }
    echelon.rank()
}

/// For a fixed tuple, one row per output coordinate over permutations.
fn tuple_rows(ring: &PrimeField, table: &MulTable<u64>, a: &[u32]) -> Vec<SparseRow> {
    let n = a.len();
    let mut per_k: Vec<Vec<(u64, u64)>> = vec![Vec::new(); table.dim()];
    let mut sigma = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(
        ring: &PrimeField,
        table: &MulTable<u64>,
        a: &[u32],
        sigma: &mut Vec<usize>,
        used: &mut [bool],
        prod: Option<&Vec<(u32, u64)>>,
        per_k: &mut [Vec<(u64, u64)>],
    ) {
        if sigma.len() == a.len() {
            let idx = permutation_index(sigma);
            for (k, v) in prod.expect("n >= 1") {
                per_k[*k as usize].push((idx, *v));
            }
            return;
        }
        for i in 0..a.len() {
            if used[i] {
                continue;
            }
            let next = match prod {
                None => vec![(a[i], 1)],
                Some(p) => table.mul_sparse(ring, p, &[(a[i], 1)]),
            };
            if next.is_empty() {
                continue;
            }
            used[i] = true;
            sigma.push(i);
            rec(ring, table, a, sigma, used, Some(&next), per_k);
            sigma.pop();
            used[i] = false;
        }
    }
    rec(ring, table, a, &mut sigma, &mut used, None, &mut per_k);
    per_k.into_iter().filter(|r| !r.is_empty()).map(|r| normalize_row(r, ring.p)).collect()
}

/// `c_n` from ranks modulo two or more primes. Ranks can only drop modulo
/// a prime, so the largest rank confirmed by two distinct primes is taken;
/// up to five primes are drawn before falling back to the exact oracle.
pub fn codimension_modular(alg: &StructureAlgebra, n: usize, opts: &CodimOptions) -> Result<CodimRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    codimension_modular_with(alg, n, opts, &mut rng)
}

fn codimension_modular_with(
    alg: &StructureAlgebra,
    n: usize,
    opts: &CodimOptions,
    rng: &mut ChaCha8Rng,
) -> Result<CodimRecord> {
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    let start = Instant::now();
    let mut queue: Vec<u64> = match &opts.primes {
        Some(ps) => {
            if ps.len() < 2 || ps.iter().any(|&p| !is_prime(p) || p >= 1 << 62) {
                return Err(Error::InvalidArgument("need at least two primes below 2^62".into()));
            }
            ps.clone()
        }
        None => vec![],
    };
    let mut ranks: Vec<(u64, usize)> = Vec::new();
    let mut tried = 0;
    while tried < MAX_PRIMES.max(queue.len()) {
        let p = if tried < queue.len() {
            queue[tried]
        } else {
            loop {
                let c = random_prime_near_2_31(rng);
                if !queue.contains(&c) {
                    queue.push(c);
                    break c;
                }
            }
        };
        tried += 1;
        let Some(r) = rank_mod_p(alg, n, p, opts.orientation) else {
            continue;
        };
        ranks.push((p, r));
        let best = ranks.iter().map(|x| x.1).max().unwrap();
        let agreeing: Vec<u64> = ranks.iter().filter(|x| x.1 == best).map(|x| x.0).collect();
        if agreeing.len() >= 2 && ranks.len() >= 2 {
            return Ok(CodimRecord {
                n,
                c_n: best as u64,
                method: Method::Modular,
                primes: ranks.iter().map(|x| x.0).collect(),
                verified: true,
                seconds: start.elapsed().as_secs_f64(),
            });
        }
    }
    match codimension_exact_oracle(alg, n, opts.oracle_budget) {
        Ok(mut rec) => {
            rec.seconds = start.elapsed().as_secs_f64();
            Ok(rec)
        }
        Err(Error::BudgetExceeded(_)) => Err(Error::PrimeExhaustion(tried)),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Monotonicity {
    /// The whole window is nondecreasing.
    pub nondecreasing: bool,
    pub strictly_increasing: bool,
    /// Smallest `n` from which the computed values never decrease.
    pub nondecreasing_from: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodimSequence {
    pub records: Vec<CodimRecord>,
    pub monotonicity: Monotonicity,
}

impl CodimSequence {
    pub fn values(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.c_n).collect()
    }
}

pub fn monotonicity(records: &[CodimRecord]) -> Monotonicity {
    let v: Vec<u64> = records.iter().map(|r| r.c_n).collect();
    let nondecreasing = v.windows(2).all(|w| w[0] <= w[1]);
    let strictly_increasing = v.windows(2).all(|w| w[0] < w[1]);
    let mut from = v.len();
    while from > 1 && v[from - 2] <= v[from - 1] {
        from -= 1;
    }
    let first_n = records.first().map_or(1, |r| r.n);
    Monotonicity { nondecreasing, strictly_increasing, nondecreasing_from: first_n + from.saturating_sub(1) }
}

/// `c_1, ..., c_N`, each verified by two primes.
pub fn codim_sequence(alg: &StructureAlgebra, max_n: usize, opts: &CodimOptions) -> Result<CodimSequence> {
    if max_n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let records = (1..=max_n).map(|n| codimension_modular(alg, n, opts)).collect::<Result<Vec<_>>>()?;
    let monotonicity = monotonicity(&records);
    Ok(CodimSequence { records, monotonicity })
}

/// CSV with columns `n, c_n, method, primes, verified, seconds`; primes
/// are separated by `;`. With `timings = false` the seconds column is 0.
pub fn write_csv<W: Write>(records: &[CodimRecord], timings: bool, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv output: {e}"));
    w.write_record(["n", "c_n", "method", "primes", "verified", "seconds"]).map_err(io)?;
    for r in records {
        let primes = r.primes.iter().map(u64::to_string).collect::<Vec<_>>().join(";");
        let secs = if timings { format!("{:.6}", r.seconds) } else { "0".to_string() };
        w.write_record([
            r.n.to_string(),
            r.c_n.to_string(),
            r.method.to_string(),
            primes,
            r.verified.to_string(),
            secs,
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("csv output: {e}")))?;
    Ok(())
}
