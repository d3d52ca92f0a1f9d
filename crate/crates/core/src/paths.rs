//! Symbols, path structures and the counting bounds behind the upper bound
//! on codimensions of an associated algebra.

use std::collections::HashMap;
use std::io::Write;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::StructureAlgebra;
use crate::codim::{codim_sequence, CodimOptions};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum PathSymbol {
    /// A simple component, 0-based.
    Component(usize),
    /// A radical word, as an index into the word list `W`.
    RadicalWord(usize),
}

impl PathSymbol {
    pub fn is_radical(&self) -> bool {
        matches!(self, PathSymbol::RadicalWord(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Symbols {
    pub q: usize,
    /// Basis indices of the radical words.
    pub words: Vec<usize>,
    pub labels: Vec<String>,
    pub symbols: Vec<PathSymbol>,
}

/// `SimComp ∪ W`: the components first, then the radical words in basis
/// order.
pub fn enumerate_symbols(acal: &StructureAlgebra) -> Result<Symbols> {
    let info = acal.associated_info().ok_or(Error::NotAssociated)?;
    let q = info.block_dims.len();
    let words = info.radical_words();
    let mut symbols: Vec<PathSymbol> = (0..q).map(PathSymbol::Component).collect();
    symbols.extend((0..words.len()).map(PathSymbol::RadicalWord));
    let mut labels: Vec<String> = (1..=q).map(|i| format!("A{i}")).collect();
    labels.extend(words.iter().map(|&b| acal.basis_labels()[b].clone()));
    Ok(Symbols { q, words, labels, symbols })
}

/// A path with runs of equal components merged. Paths of the standard
/// form alternate components and single radical words and begin and end
/// with a component; the other structures are kept but flagged.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathStructure {
    pub symbols: Vec<PathSymbol>,
    /// The first or last entry is a radical word.
    pub boundary_radical: bool,
    /// Two radical words are adjacent.
    pub adjacent_radicals: bool,
}

impl PathStructure {
    pub fn radical_count(&self) -> usize {
        self.symbols.iter().filter(|s| s.is_radical()).count()
    }

    pub fn is_standard(&self) -> bool {
        !self.boundary_radical && !self.adjacent_radicals
    }

    /// No two adjacent components and at most `s` radical words.
    pub fn satisfies_axioms(&self, s: usize) -> bool {
        !self.symbols.is_empty()
            && self.radical_count() <= s
            && self.symbols.windows(2).all(|w| w[0].is_radical() || w[1].is_radical())
    }

    /// `(A1, w3, A2)`-style rendering with the given symbol labels.
    pub fn render(&self, syms: &Symbols) -> String {
        let parts: Vec<&str> = self
            .symbols
            .iter()
            .map(|s| match *s {
                PathSymbol::Component(i) => syms.labels[i].as_str(),
                PathSymbol::RadicalWord(w) => syms.labels[syms.q + w].as_str(),
            })
            .collect();
        format!("({})", parts.join(", "))
    }
}

/// All structures with at most `s` radical words, in lexicographic order
/// of their symbol sequences (components before words).
pub fn enumerate_path_structures(acal: &StructureAlgebra, s: usize) -> Result<Vec<PathStructure>> {
    let syms = enumerate_symbols(acal)?;
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(syms: &Symbols, s: usize, cur: &mut Vec<PathSymbol>, radicals: usize, out: &mut Vec<PathStructure>) {
        if !cur.is_empty() {
            let boundary = cur[0].is_radical() || cur[cur.len() - 1].is_radical();
            let adjacent = cur.windows(2).any(|w| w[0].is_radical() && w[1].is_radical());
            out.push(PathStructure { symbols: cur.clone(), boundary_radical: boundary, adjacent_radicals: adjacent });
        }
        for &sym in &syms.symbols {
            let ok = match sym {
                PathSymbol::Component(_) => cur.last().is_none_or(|l| l.is_radical()),
                PathSymbol::RadicalWord(_) => radicals < s,
            };
            if ok {
                cur.push(sym);
                rec(syms, s, cur, radicals + sym.is_radical() as usize, out);
                cur.pop();
            }
        }
    }
    rec(&syms, s, &mut cur, 0, &mut out);
    Ok(out)
}

/// `sum_{t=1}^{2s+1} symb_count^t`.
pub fn path_count_bound(symb_count: usize, s: usize) -> BigUint {
    let b = BigUint::from(symb_count);
    let mut term = BigUint::one();
    let mut total = BigUint::zero();
    for _ in 1..=2 * s + 1 {
        term *= &b;
        total += &term;
    }
    total
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

fn multinomial(parts: &[usize]) -> BigUint {
    let n: usize = parts.iter().sum();
    parts.iter().fold(factorial(n), |acc, &p| acc / factorial(p))
}

fn check_parts(n: usize, parts: &[usize], s_prime: usize) -> Result<()> {
    if s_prime > n || parts.iter().sum::<usize>() != n - s_prime {
        return Err(Error::InvalidArgument(format!(
            "parts {parts:?} must sum to n - s' = {}",
            n as i64 - s_prime as i64
        )));
    }
    Ok(())
}

/// `n^{s'} * multinomial(n - s'; parts)`.
pub fn monomial_class_bound(n: usize, parts: &[usize], s_prime: usize) -> Result<BigUint> {
    check_parts(n, parts, s_prime)?;
    Ok(BigUint::from(n).pow(s_prime as u32) * multinomial(parts))
}

/// `s'! * C(n, s') * multinomial(n - s'; parts)`, the exact count the bound
/// dominates.
pub fn monomial_class_count(n: usize, parts: &[usize], s_prime: usize) -> Result<BigUint> {
    check_parts(n, parts, s_prime)?;
    let binom = factorial(n) / (factorial(s_prime) * factorial(n - s_prime));
    Ok(factorial(s_prime) * binom * multinomial(parts))
}

/// Codimensions `c_m(M_d)` of the full matrix algebras, with `c_0 = 1`.
#[derive(Clone, Debug, Default)]
pub struct MatrixCodims {
    values: HashMap<(usize, usize), u64>,
}

impl MatrixCodims {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, d: usize, m: usize, c: u64) {
        self.values.insert((d, m), c);
    }

    pub fn get(&self, d: usize, m: usize) -> Result<u64> {
        if m == 0 {
            return Ok(1);
        }
        if d == 1 {
            return Ok(1);
        }
        self.values.get(&(d, m)).copied().ok_or(Error::MissingCodim { d, m })
    }

    /// Computes `c_1..c_n` of `M_d` for every `d` in `block_dims`.
    pub fn compute(block_dims: &[usize], n: usize, opts: &CodimOptions) -> Result<Self> {
        let mut out = Self::new();
        let mut dims = block_dims.to_vec();
        dims.sort_unstable();
        dims.dedup();
        for d in dims.into_iter().filter(|&d| d > 1) {
            if n == 0 {
                continue;
            }
            let seq = codim_sequence(&StructureAlgebra::matrix(d)?, n, opts)?;
            for r in seq.records {
                out.insert(d, r.n, r.c_n);
            }
        }
        Ok(out)
    }
}

/// `sum_{s'=0}^{s} n^{s'} sum_{n_1+...+n_q = n-s'} multinomial * prod c_{n_i}(A_i)`
/// with `n_i >= 0`, `s = u` and `A_i = M_{d_i}`.
pub fn upper_bound_series(acal: &StructureAlgebra, n: usize, codims: &MatrixCodims) -> Result<BigUint> {
    let info = acal.associated_info().ok_or(Error::NotAssociated)?;
    series(&info.block_dims, info.u, n, codims)
}

pub(crate) fn series(block_dims: &[usize], s: usize, n: usize, codims: &MatrixCodims) -> Result<BigUint> {
    let q = block_dims.len();
    let mut total = BigUint::zero();
    for s_prime in 0..=s.min(n) {
        let m = n - s_prime;
        let mut inner = BigUint::zero();
        let mut err = None;
        weak_compositions(m, q, &mut |parts| {
            if err.is_some() {
                return;
            }
            let mut term = multinomial(parts);
            for (&d, &ni) in block_dims.iter().zip(parts) {
                match codims.get(d, ni) {
                    Ok(c) => term *= c,
                    Err(e) => err = Some(e),
                }
            }
            inner += term;
        });
        if let Some(e) = err {
            return Err(e);
        }
        total += BigUint::from(n).pow(s_prime as u32) * inner;
    }
    Ok(total)
}

fn weak_compositions(n: usize, q: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(left: usize, parts: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if parts == 1 {
            cur.push(left);
            f(cur);
            cur.pop();
            return;
        }
        for m in 0..=left {
            cur.push(m);
            rec(left - m, parts - 1, cur, f);
            cur.pop();
        }
    }
    if q > 0 {
        rec(n, q, &mut Vec::with_capacity(q), f);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub n: usize,
    pub series: String,
    /// `series / (n^t d^n)` with `t = (q - d)/2 + s`.
    pub normalized: f64,
}

/// The series for `n = 1..=max_n` with its normalisation by the predicted
/// growth.
pub fn upper_bound_table(acal: &StructureAlgebra, max_n: usize, codims: &MatrixCodims) -> Result<Vec<BoundRow>> {
    let info = acal.associated_info().ok_or(Error::NotAssociated)?;
    let q = info.block_dims.len() as f64;
    let d: usize = info.block_dims.iter().map(|x| x * x).sum();
    let t = (q - d as f64) / 2.0 + info.u as f64;
    (1..=max_n)
        .map(|n| {
            let v = upper_bound_series(acal, n, codims)?;
            let vf = v.to_f64().unwrap_or(f64::INFINITY);
            Ok(BoundRow { n, series: v.to_string(), normalized: vf / ((n as f64).powf(t) * (d as f64).powi(n as i32)) })
        })
        .collect()
}

pub fn write_bound_csv<W: Write>(rows: &[BoundRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv output: {e}"));
    w.write_record(["n", "series", "normalized"]).map_err(io)?;
    for r in rows {
        w.write_record([r.n.to_string(), r.series.clone(), r.normalized.to_string()]).map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("csv output: {e}")))?;
    Ok(())
}
