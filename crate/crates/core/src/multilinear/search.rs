//! Identity testing and witness search.
//!
//! A multilinear `f` vanishes on `A` iff it vanishes on all tuples of basis
//! elements. If `f(a) != 0` then some explicit word, evaluated at `a` with
//! the values permuted inside the alternating sets, is nonzero; since such a
//! permutation changes `f(a)` only by a sign, it suffices to visit tuples
//! along which some word has a nonzero running product and whose values
//! are distinct inside each alternating set. Those are enumerated by a
//! depth-first walk that prunes at the first vanishing prefix.

use std::collections::{HashMap, HashSet};
use std::ops::ControlFlow;

use num_traits::Zero;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::eval::{check_set_limits, exact_value, integral_growth, ZeroTest};
use super::MultilinearPolynomial;
use crate::algebra::{MulTable, StructureAlgebra};
use crate::error::{Error, Result};
use crate::scalar::{format_scalar, CoeffRing, PrimeField, Rationals, Scalar, SEARCH_PRIME};

const BATCH: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStrategy {
    /// Depth-first over basis tuples, semisimple elements before radical
    /// ones; `budget` caps the number of distinct tuples evaluated.
    Structured { budget: Option<u64> },
    /// Uniform random basis tuples drawn from a seeded generator.
    Randomized { seed: u64, budget: u64 },
    /// Structured first, then randomized.
    Auto { seed: u64, structured_budget: Option<u64>, random_budget: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    /// `(variable, basis label)` in variable order.
    pub assignment: Vec<(String, String)>,
    #[serde(skip)]
    pub basis_indices: Vec<usize>,
    #[serde(serialize_with = "ser_scalars")]
    pub value: Vec<Scalar>,
    pub strategy: String,
    pub tuples_tried: u64,
}

fn ser_scalars<S: serde::Serializer>(v: &[Scalar], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(format_scalar).collect::<Vec<_>>().serialize(s)
}

impl Witness {
    pub fn assignment_vectors(&self, alg: &StructureAlgebra) -> HashMap<String, Vec<Scalar>> {
        self.assignment.iter().zip(&self.basis_indices).map(|((v, _), &b)| (v.clone(), alg.basis_vector(b))).collect()
    }
}

enum Outcome {
    Found(Vec<u32>, Vec<Scalar>, u64),
    Exhausted,
    OutOfBudget(u64),
}

struct Search<'a> {
    alg: &'a StructureAlgebra,
    f: &'a MultilinearPolynomial,
    zero: ZeroTest,
    /// allowed basis elements per variable, in visiting order
    candidates: Vec<Vec<u32>>,
    set_of: Vec<Option<usize>>,
    sets: Vec<Vec<u32>>,
}

type Accept<'a> = &'a (dyn Fn(&[Scalar]) -> bool + Sync);

impl<'a> Search<'a> {
    fn new(alg: &'a StructureAlgebra, f: &'a MultilinearPolynomial, allowed: Option<&[Vec<u32>]>) -> Result<Self> {
        check_set_limits(f)?;
        let layers = alg.radical_layers()?;
        let mut order: Vec<u32> = (0..alg.dim() as u32).collect();
        order.sort_by_key(|&b| (layers[b as usize], b));
        let candidates = match allowed {
            Some(a) => a.iter().map(|c| order.iter().copied().filter(|b| c.contains(b)).collect()).collect(),
            None => vec![order; f.degree()],
        };
        let sets = f.alternation_indices().to_vec();
        let mut set_of = vec![None; f.degree()];
        for (k, s) in sets.iter().enumerate() {
            for &v in s {
                set_of[v as usize] = Some(k);
            }
        }
        Ok(Self { alg, f, zero: ZeroTest::new(alg, f), candidates, set_of, sets })
    }

    /// Sorts the values inside each alternating set; the result differs
    /// from the input tuple only by the sign of `f`.
    fn canonical(&self, a: &[u32]) -> Vec<u32> {
        let mut out = a.to_vec();
        for s in &self.sets {
            let mut vals: Vec<u32> = s.iter().map(|&v| a[v as usize]).collect();
            vals.sort_unstable();
            for (&v, x) in s.iter().zip(vals) {
                out[v as usize] = x;
            }
        }
        out
    }

    fn check(&self, a: &[u32], accept: Accept) -> Option<Vec<Scalar>> {
        if self.zero.is_zero_at(a) {
            return None;
        }
        let v = exact_value(self.alg, self.f, a);
        accept(&v).then_some(v)
    }

    fn first_hit(&self, batch: &[Vec<u32>], accept: Accept) -> Option<(Vec<u32>, Vec<Scalar>)> {
        batch.par_iter().find_map_first(|a| self.check(a, accept).map(|v| (a.clone(), v)))
    }

    fn structured(&self, budget: Option<u64>, accept: Accept) -> Outcome {
        if self.f.inner_terms().is_empty() {
            return Outcome::Exhausted;
        }
        let growth_ok = integral_growth(self.alg)
            .map(|k| (k.bits() as usize).saturating_sub(1) * self.f.degree().saturating_sub(1) < 60)
            .unwrap_or(false);
        if growth_ok {
            let ring = PrimeField::new(SEARCH_PRIME);
            let table = self.alg.table(&ring).expect("integral constants reduce");
            self.structured_in(&ring, &table, budget, accept)
        } else {
            let table = self.alg.table(&Rationals).expect("rationals");
            self.structured_in(&Rationals, &table, budget, accept)
        }
    }

    fn structured_in<R: CoeffRing>(
        &self,
        ring: &R,
        table: &MulTable<R::El>,
        budget: Option<u64>,
        accept: Accept,
    ) -> Outcome {
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        let mut batch: Vec<Vec<u32>> = Vec::with_capacity(BATCH);
        let mut tried = 0u64;
        let mut found = None;
        let mut out_of_budget = false;
        let n = self.f.degree();
        let mut assignment = vec![u32::MAX; n];
        let flush = |batch: &mut Vec<Vec<u32>>, tried: u64| {
            let hit = self.first_hit(batch, accept);
            batch.clear();
            hit.map(|(a, v)| (a, v, tried))
        };
        let words: Vec<Vec<u32>> = self.f.inner_terms().keys().cloned().collect();
        'words: for word in &words {
            let mut visit = |a: &[u32]| -> ControlFlow<()> {
                let c = self.canonical(a);
                if !seen.insert(c.clone()) {
                    return ControlFlow::Continue(());
                }
                batch.push(c);
                tried += 1;
                if batch.len() == BATCH {
                    if let Some(hit) = flush(&mut batch, tried) {
                        found = Some(hit);
                        return ControlFlow::Break(());
                    }
                }
                if budget.is_some_and(|b| tried >= b) {
                    out_of_budget = true;
                    return ControlFlow::Break(());
                }
                ControlFlow::Continue(())
            };
            if self.walk(ring, table, word, 0, None, &mut assignment, &mut visit).is_break() {
                break 'words;
            }
        }
        if found.is_none() && !batch.is_empty() {
            found = flush(&mut batch, tried);
        }
        match found {
            Some((a, v, at)) => Outcome::Found(a, v, at),
            None if out_of_budget => Outcome::OutOfBudget(tried),
            None => Outcome::Exhausted,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn walk<R: CoeffRing>(
        &self,
        ring: &R,
        table: &MulTable<R::El>,
        word: &[u32],
        pos: usize,
        prod: Option<&Vec<(u32, R::El)>>,
        assignment: &mut Vec<u32>,
        visit: &mut dyn FnMut(&[u32]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if pos == word.len() {
            return visit(assignment);
        }
        let var = word[pos] as usize;
        for &b in &self.candidates[var] {
            if let Some(k) = self.set_of[var] {
                if self.sets[k].iter().any(|&u| u as usize != var && assignment[u as usize] == b) {
                    continue;
                }
            }
            let next = match prod {
                None => vec![(b, ring.one())],
                Some(p) => table.mul_sparse(ring, p, &[(b, ring.one())]),
            };
            if next.is_empty() {
                continue;
            }
            assignment[var] = b;
            let flow = self.walk(ring, table, word, pos + 1, Some(&next), assignment, visit);
            assignment[var] = u32::MAX;
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn randomized(&self, seed: u64, budget: u64, accept: Accept) -> Outcome {
        let dim = self.alg.dim();
        let n = self.f.degree();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tried = 0u64;
        while tried < budget {
            let take = (budget - tried).min(BATCH as u64) as usize;
            let mut batch = Vec::with_capacity(take);
            for _ in 0..take {
                let mut a: Vec<u32> = (0..n).map(|_| rng.random_range(0..dim as u32)).collect();
                let mut feasible = true;
                for s in &self.sets {
                    if s.len() > dim {
                        feasible = false;
                        continue;
                    }
                    for (&v, b) in s.iter().zip(sample(&mut rng, dim, s.len())) {
                        a[v as usize] = b as u32;
                    }
                }
                if feasible {
                    batch.push(a);
                }
            }
            if let Some((a, v)) = self.first_hit(&batch, accept) {
                let pos = batch.iter().position(|b| *b == a).unwrap() as u64;
                return Outcome::Found(a, v, tried + pos + 1);
            }
            tried += take as u64;
        }
        Outcome::OutOfBudget(tried)
    }

    fn witness(&self, a: Vec<u32>, value: Vec<Scalar>, strategy: &str, tried: u64) -> Witness {
        let names = self.f.variables().names();
        Witness {
            assignment: names
                .iter()
                .zip(&a)
                .map(|(v, &b)| (v.clone(), self.alg.basis_labels()[b as usize].clone()))
                .collect(),
            basis_indices: a.iter().map(|&b| b as usize).collect(),
            value,
            strategy: strategy.to_string(),
            tuples_tried: tried,
        }
    }
}

fn accept_any(_: &[Scalar]) -> bool {
    true
}

/// `true` iff `f` vanishes on every tuple of elements of `alg`.
pub fn is_identity(f: &MultilinearPolynomial, alg: &StructureAlgebra) -> Result<bool> {
    is_identity_with_limit(f, alg, None)
}

/// As [`is_identity`], failing with a budget error when more than
/// `max_tuples` distinct basis tuples would have to be examined.
pub fn is_identity_with_limit(
    f: &MultilinearPolynomial,
    alg: &StructureAlgebra,
    max_tuples: Option<u64>,
) -> Result<bool> {
    let s = Search::new(alg, f, None)?;
    match s.structured(max_tuples, &accept_any) {
        Outcome::Found(..) => Ok(false),
        Outcome::Exhausted => Ok(true),
        Outcome::OutOfBudget(n) => Err(Error::BudgetExceeded(format!("identity test stopped after {n} tuples"))),
    }
}

/// Identity test over the tuples that give variable `v` a value from
/// `allowed[v]` (basis indices; missing variables are unrestricted).
pub fn is_identity_restricted(
    f: &MultilinearPolynomial,
    alg: &StructureAlgebra,
    allowed: &HashMap<String, Vec<usize>>,
) -> Result<bool> {
    let names = f.variables().names();
    let lists: Vec<Vec<u32>> = names
        .iter()
        .map(|n| match allowed.get(n) {
            Some(l) => l.iter().map(|&b| b as u32).collect(),
            None => (0..alg.dim() as u32).collect(),
        })
        .collect();
    let s = Search::new(alg, f, Some(&lists))?;
    Ok(matches!(s.structured(None, &accept_any), Outcome::Exhausted))
}

pub fn find_nonzero_evaluation(
    f: &MultilinearPolynomial,
    alg: &StructureAlgebra,
    strategy: SearchStrategy,
) -> Result<Option<Witness>> {
    find_nonzero_evaluation_with(f, alg, strategy, &accept_any)
}

/// Searches for basis values making `f` nonzero with a value accepted by
/// `accept`. Among candidates examined in one parallel batch the earliest
/// in visiting order wins, so the result does not depend on the thread
/// count. `None` is not a proof that `f` is an identity.
pub fn find_nonzero_evaluation_with(
    f: &MultilinearPolynomial,
    alg: &StructureAlgebra,
    strategy: SearchStrategy,
    accept: &(dyn Fn(&[Scalar]) -> bool + Sync),
) -> Result<Option<Witness>> {
    let s = Search::new(alg, f, None)?;
    let structured = |budget| match s.structured(budget, accept) {
        Outcome::Found(a, v, n) => Some(s.witness(a, v, "structured", n)),
        _ => None,
    };
    let randomized = |seed, budget| match s.randomized(seed, budget, accept) {
        Outcome::Found(a, v, n) => Some(s.witness(a, v, "randomized", n)),
        _ => None,
    };
    Ok(match strategy {
        SearchStrategy::Structured { budget } => structured(budget),
        SearchStrategy::Randomized { seed, budget } => randomized(seed, budget),
        SearchStrategy::Auto { seed, structured_budget, random_budget } => {
            structured(structured_budget).or_else(|| randomized(seed, random_budget))
        }
    })
}

/// `true` when `v` is a nonzero multiple of a single basis element.
pub fn is_basis_multiple(v: &[Scalar]) -> Option<usize> {
    let mut nz = v.iter().enumerate().filter(|(_, x)| !x.is_zero());
    let first = nz.next()?;
    nz.next().is_none().then_some(first.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multilinear::{capelli, ut_kemer_polynomial};

    fn commutator() -> MultilinearPolynomial {
        MultilinearPolynomial::monomial(&["x_1", "x_2"]).unwrap().alternate(&["x_1", "x_2"]).unwrap()
    }

    #[test]
    fn commutator_identities() {
        assert!(is_identity(&commutator(), &StructureAlgebra::field()).unwrap());
        assert!(!is_identity(&commutator(), &StructureAlgebra::matrix(2).unwrap()).unwrap());
        let none = find_nonzero_evaluation(
            &commutator(),
            &StructureAlgebra::field(),
            SearchStrategy::Auto { seed: 1, structured_budget: None, random_budget: 100 },
        )
        .unwrap();
        assert!(none.is_none());
    }

    #[test]
    fn standard_polynomial_on_m2() {
        let s4 =
            MultilinearPolynomial::monomial(&["a", "b", "c", "d"]).unwrap().alternate(&["a", "b", "c", "d"]).unwrap();
        let m2 = StructureAlgebra::matrix(2).unwrap();
        assert!(is_identity(&s4, &m2).unwrap());
        assert!(is_identity(&s4.expand(), &m2).unwrap());
        let s3 = MultilinearPolynomial::monomial(&["a", "b", "c"]).unwrap().alternate(&["a", "b", "c"]).unwrap();
        assert!(!is_identity(&s3, &m2).unwrap());
    }

    #[test]
    fn capelli_on_m2() {
        let m2 = StructureAlgebra::matrix(2).unwrap();
        assert!(is_identity(&capelli(5).unwrap(), &m2).unwrap());
        let w = find_nonzero_evaluation(&capelli(4).unwrap(), &m2, SearchStrategy::Structured { budget: None })
            .unwrap()
            .unwrap();
        let again = crate::multilinear::evaluate(&capelli(4).unwrap(), &m2, &w.assignment_vectors(&m2)).unwrap();
        assert_eq!(again, w.value);
        assert!(w.value.iter().any(|x| !x.is_zero()));
    }

    #[test]
    fn randomized_finds_commutator_witness() {
        let m2 = StructureAlgebra::matrix(2).unwrap();
        let w = find_nonzero_evaluation(&commutator(), &m2, SearchStrategy::Randomized { seed: 3, budget: 200 })
            .unwrap()
            .unwrap();
        assert_eq!(w.strategy, "randomized");
    }

    #[test]
    fn kemer_f2_on_ut11() {
        let ut = StructureAlgebra::ut(&[1, 1]).unwrap();
        let (_, f2, shape) = ut_kemer_polynomial(&[1, 1], 2).unwrap();
        let w = find_nonzero_evaluation(&f2, &ut, SearchStrategy::Structured { budget: None }).unwrap().unwrap();
        let radical = ut.radical();
        for set in &shape.big {
            let in_radical = set
                .iter()
                .filter(|v| {
                    let i = f2.variables().index_of(v).unwrap();
                    radical.contains(&ut.basis_vector(w.basis_indices[i]))
                })
                .count();
            assert_eq!(in_radical, 1);
        }
    }
}
