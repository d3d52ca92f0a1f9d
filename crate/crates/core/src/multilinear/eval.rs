//! Evaluation of lazily alternated polynomials in an algebra.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{factorial, MultilinearPolynomial};
use crate::algebra::{merge_sparse, sparse_to_dense, to_sparse, MulTable, StructureAlgebra};
use crate::error::{Error, Result};
use crate::scalar::{is_prime, CoeffRing, PrimeField, Rationals, Scalar, SEARCH_PRIME};

pub(crate) type Sparse<E> = Vec<(u32, E)>;

/// A polynomial compiled against an algebra in a coefficient ring.
pub(crate) struct Engine<R: CoeffRing> {
    pub ring: R,
    pub table: MulTable<R::El>,
    terms: Vec<(Vec<u32>, R::El)>,
    /// `(set, position in set)` for alternating variables.
    set_of: Vec<Option<(usize, usize)>>,
    sets: Vec<Vec<u32>>,
}

struct AltState {
    /// chosen value slot for each member of each set
    chosen: Vec<Vec<Option<usize>>>,
    used: Vec<u64>,
}

impl<R: CoeffRing> Engine<R> {
    /// `None` when a structure constant or coefficient has no image in `ring`.
    pub fn new(ring: R, alg: &StructureAlgebra, f: &MultilinearPolynomial, scale: &Scalar) -> Option<Self> {
        let table = alg.table(&ring)?;
        let mut terms = Vec::with_capacity(f.inner_terms().len());
        for (w, c) in f.inner_terms() {
            let v = ring.image_of(&(c * scale))?;
            if !ring.is_zero(&v) {
                terms.push((w.clone(), v));
            }
        }
        let sets = f.alternation_indices().to_vec();
        let mut set_of = vec![None; f.degree()];
        for (k, s) in sets.iter().enumerate() {
            for (i, &v) in s.iter().enumerate() {
                set_of[v as usize] = Some((k, i));
            }
        }
        Some(Self { ring, table, terms, set_of, sets })
    }

    /// `f(values)` where `values[v]` is the value of variable `v`.
    pub fn eval(&self, values: &[Sparse<R::El>]) -> Sparse<R::El> {
        let mut acc = Vec::new();
        let mut state = AltState {
            chosen: self.sets.iter().map(|s| vec![None; s.len()]).collect(),
            used: vec![0; self.sets.len()],
        };
        for (word, c) in &self.terms {
            self.rec(word, 0, None, false, c, values, &mut state, &mut acc);
        }
        merge_sparse(&self.ring, acc)
    }

    /// `f` at basis elements: `assignment[v]` is the basis index of `v`.
    pub fn eval_basis(&self, assignment: &[u32]) -> Sparse<R::El> {
        let values: Vec<Sparse<R::El>> = assignment.iter().map(|&b| vec![(b, self.ring.one())]).collect();
        self.eval(&values)
    }

    #[allow(clippy::too_many_arguments)]
    fn rec(
        &self,
        word: &[u32],
        pos: usize,
        prod: Option<&Sparse<R::El>>,
        odd: bool,
        coeff: &R::El,
        values: &[Sparse<R::El>],
        st: &mut AltState,
        acc: &mut Sparse<R::El>,
    ) {
        if pos == word.len() {
            let c = if odd { self.ring.neg(coeff) } else { coeff.clone() };
            for (k, v) in prod.expect("words are nonempty") {
                acc.push((*k, self.ring.mul(&c, v)));
            }
            if acc.len() > 1 << 14 {
                let merged = merge_sparse(&self.ring, std::mem::take(acc));
                *acc = merged;
            }
            return;
        }
        let var = word[pos];
        let step = |val: &Sparse<R::El>| match prod {
            None => val.clone(),
            Some(p) => self.table.mul_sparse(&self.ring, p, val),
        };
        match self.set_of[var as usize] {
            None => {
                let next = step(&values[var as usize]);
                if !next.is_empty() {
                    self.rec(word, pos + 1, Some(&next), odd, coeff, values, st, acc);
                }
            }
            Some((k, i)) => {
                let set = &self.sets[k];
                for t in 0..set.len() {
                    if st.used[k] >> t & 1 == 1 {
                        continue;
                    }
                    let next = step(&values[set[t] as usize]);
                    if next.is_empty() {
                        continue;
                    }
                    let flips = st.chosen[k]
                        .iter()
                        .enumerate()
                        .filter(|&(i2, c)| matches!(c, Some(t2) if (i2 < i && *t2 > t) || (i2 > i && *t2 < t)))
                        .count();
                    st.used[k] |= 1 << t;
                    st.chosen[k][i] = Some(t);
                    self.rec(word, pos + 1, Some(&next), odd ^ (flips % 2 == 1), coeff, values, st, acc);
                    st.chosen[k][i] = None;
                    st.used[k] &= !(1 << t);
                }
            }
        }
    }
}

/// Substitutes coefficient vectors for the variables and expands.
pub fn evaluate(
    f: &MultilinearPolynomial,
    alg: &StructureAlgebra,
    assignment: &HashMap<String, Vec<Scalar>>,
) -> Result<Vec<Scalar>> {
    let vars = f.variables();
    let unknown: Vec<String> = assignment.keys().filter(|k| vars.index_of(k).is_none()).cloned().collect();
    if !unknown.is_empty() {
        let mut unknown = unknown;
        unknown.sort();
        return Err(Error::UnknownVariables(unknown));
    }
    let mut values = Vec::with_capacity(vars.len());
    for name in vars.names() {
        let v = assignment.get(name).ok_or_else(|| Error::MissingAssignment(name.clone()))?;
        if v.len() != alg.dim() {
            return Err(Error::DimensionMismatch { expected: alg.dim(), got: v.len() });
        }
        values.push(to_sparse(&Rationals, v).expect("rationals map to themselves"));
    }
    check_set_limits(f)?;
    let engine = Engine::new(Rationals, alg, f, &Scalar::one()).expect("rationals map to themselves");
    Ok(sparse_to_dense(alg.dim(), &engine.eval(&values)))
}

pub(crate) fn check_set_limits(f: &MultilinearPolynomial) -> Result<()> {
    if f.alternation_indices().iter().any(|s| s.len() > 64) {
        return Err(Error::BadPolynomial("alternating sets are limited to 64 variables".into()));
    }
    Ok(())
}

/// How to decide exactly whether `f` vanishes at a tuple of basis elements.
pub(crate) enum ZeroTest {
    /// Integral data whose values are bounded below half the product of
    /// the primes: vanishing modulo every prime is exact vanishing.
    Modular(Vec<Engine<PrimeField>>),
    Exact(Engine<Rationals>),
}

/// Primes just below `2^61`, largest first.
pub(crate) fn large_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c = SEARCH_PRIME;
    while out.len() < count {
        if is_prime(c) {
            out.push(c);
        }
        c -= 2;
    }
    out
}

/// Largest `l1` norm of a product of two basis elements, when all structure
/// constants are integers.
pub(crate) fn integral_growth(alg: &StructureAlgebra) -> Option<BigInt> {
    let mut k = BigInt::one();
    for i in 0..alg.dim() {
        for j in 0..alg.dim() {
            let mut norm = BigInt::zero();
            for (_, c) in alg.product_of_basis(i, j) {
                if !c.is_integer() {
                    return None;
                }
                norm += c.numer().abs();
            }
            k = k.max(norm);
        }
    }
    Some(k)
}

impl ZeroTest {
    pub fn new(alg: &StructureAlgebra, f: &MultilinearPolynomial) -> ZeroTest {
        let exact = || ZeroTest::Exact(Engine::new(Rationals, alg, f, &Scalar::one()).expect("rationals"));
        let Some(k) = integral_growth(alg) else {
            return exact();
        };
        let lcm = f.inner_terms().values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scale = Scalar::from_integer(lcm);
        let coeff_sum: BigInt = f.inner_terms().values().map(|c| (c * &scale).to_integer().abs()).sum();
        let mut bound = coeff_sum;
        for s in f.alternation_indices() {
            bound *= BigInt::from(factorial(s.len()));
        }
        bound *= num_traits::pow(k, f.degree().saturating_sub(1));
        let bits = bound.bits() as usize + 2;
        let count = bits.div_ceil(60).max(1);
        let engines: Option<Vec<_>> =
            large_primes(count).into_iter().map(|p| Engine::new(PrimeField::new(p), alg, f, &scale)).collect();
        match engines {
            Some(e) if count <= 64 => ZeroTest::Modular(e),
            _ => exact(),
        }
    }

    pub fn is_zero_at(&self, assignment: &[u32]) -> bool {
        match self {
            ZeroTest::Modular(es) => es.iter().all(|e| e.eval_basis(assignment).is_empty()),
            ZeroTest::Exact(e) => e.eval_basis(assignment).is_empty(),
        }
    }
}

/// Exact value of `f` at basis elements.
pub(crate) fn exact_value(alg: &StructureAlgebra, f: &MultilinearPolynomial, assignment: &[u32]) -> Vec<Scalar> {
    let e = Engine::new(Rationals, alg, f, &Scalar::one()).expect("rationals");
    sparse_to_dense(alg.dim(), &e.eval_basis(assignment))
}
