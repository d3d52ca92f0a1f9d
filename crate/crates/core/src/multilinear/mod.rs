//! Multilinear polynomials, kept as pending alternations over a small
//! set of explicit words so alternated polynomials never need factorial
//! expansion.

mod build;
mod eval;
mod io;
mod search;

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use build::{capelli, capelli_product_bridged, route_polynomial, ut_kemer_polynomial};
pub use eval::evaluate;
pub use io::PolynomialFile;
pub use search::{
    find_nonzero_evaluation, find_nonzero_evaluation_with, is_basis_multiple, is_identity, is_identity_restricted,
    is_identity_with_limit, SearchStrategy, Witness,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableSet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl VariableSet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::DuplicateVariable(n.clone()));
            }
        }
        Ok(Self { names, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    fn indices(&self, names: &[impl AsRef<str>]) -> Result<Vec<u32>> {
        let missing: Vec<String> =
            names.iter().filter(|n| self.index_of(n.as_ref()).is_none()).map(|n| n.as_ref().to_string()).collect();
        if !missing.is_empty() {
            return Err(Error::UnknownVariables(missing));
        }
        Ok(names.iter().map(|n| self.index[n.as_ref()] as u32).collect())
    }
}

/// Disjoint alternating sets of a polynomial, split into small sets, big
/// sets and the remaining free variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternationShape {
    pub small: Vec<Vec<String>>,
    pub big: Vec<Vec<String>>,
    pub free: Vec<String>,
}

impl AlternationShape {
    pub fn sets(&self) -> impl Iterator<Item = &Vec<String>> {
        self.small.iter().chain(self.big.iter())
    }

    fn validate(&self, vars: &VariableSet) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for name in self.sets().flatten().chain(self.free.iter()) {
            if vars.index_of(name).is_none() {
                return Err(Error::UnknownVariables(vec![name.clone()]));
            }
            if !seen.insert(name) {
                return Err(Error::BadPolynomial(format!("shape sets overlap at {name:?}")));
            }
        }
        Ok(())
    }
}

/// `Alt_{S_1} ... Alt_{S_k} (sum of explicit terms)` for pairwise disjoint
/// sets `S_i` of size at least 2.
#[derive(Clone, Debug)]
pub struct MultilinearPolynomial {
    vars: VariableSet,
    terms: BTreeMap<Vec<u32>, Scalar>,
    alternations: Vec<Vec<u32>>,
    shape: Option<AlternationShape>,
}

pub(crate) fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Permutations of `0..n` paired with their signs, in lexicographic order.
pub(crate) fn signed_permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    use itertools::Itertools;
    (0..n)
        .permutations(n)
        .map(|p| {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            (p, inversions % 2 == 1)
        })
        .collect()
}

impl MultilinearPolynomial {
    /// Explicit polynomial; every word must be a permutation of `variables`.
    pub fn new<S: AsRef<str>>(variables: &[S], terms: Vec<(Vec<S>, Scalar)>) -> Result<Self> {
        let vars = VariableSet::new(variables.iter().map(|s| s.as_ref().to_string()))?;
        let mut map = BTreeMap::new();
        for (word, c) in terms {
            if word.len() != vars.len() {
                return Err(Error::BadPolynomial(format!(
                    "word of length {} in a polynomial on {} variables",
                    word.len(),
                    vars.len()
                )));
            }
            let w = vars.indices(&word)?;
            let mut sorted = w.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|p| p[0] == p[1]) {
                return Err(Error::BadPolynomial("a variable repeats inside a word".into()));
            }
            add_term(&mut map, w, c);
        }
        Ok(Self { vars, terms: map, alternations: vec![], shape: None })
    }

    /// The single word `variables[0] variables[1] ...`.
    pub fn monomial<S: AsRef<str>>(variables: &[S]) -> Result<Self> {
        let word: Vec<&str> = variables.iter().map(|s| s.as_ref()).collect();
        Self::new(&word, vec![(word.clone(), Scalar::one())])
    }

    pub(crate) fn from_parts(vars: VariableSet, words: Vec<(Vec<u32>, Scalar)>) -> Self {
        let mut terms = BTreeMap::new();
        for (w, c) in words {
            add_term(&mut terms, w, c);
        }
        Self { vars, terms, alternations: vec![], shape: None }
    }

    pub fn variables(&self) -> &VariableSet {
        &self.vars
    }

    pub fn degree(&self) -> usize {
        self.vars.len()
    }

    /// Explicit words before the pending alternations are applied.
    pub fn inner_terms(&self) -> &BTreeMap<Vec<u32>, Scalar> {
        &self.terms
    }

    pub(crate) fn alternation_indices(&self) -> &[Vec<u32>] {
        &self.alternations
    }

    /// Pending alternating sets by name.
    pub fn alternations(&self) -> Vec<Vec<String>> {
        self.alternations.iter().map(|s| self.names_of(s)).collect()
    }

    pub fn shape(&self) -> Option<&AlternationShape> {
        self.shape.as_ref()
    }

    pub fn with_shape(mut self, shape: AlternationShape) -> Result<Self> {
        shape.validate(&self.vars)?;
        self.shape = Some(shape);
        Ok(self)
    }

    fn names_of(&self, idx: &[u32]) -> Vec<String> {
        idx.iter().map(|&i| self.vars.names[i as usize].clone()).collect()
    }

    /// Number of terms after full expansion, before cancellation.
    pub fn expanded_size_bound(&self) -> u128 {
        self.alternations.iter().fold(self.terms.len() as u128, |acc, s| acc.saturating_mul(factorial(s.len()) as u128))
    }

    /// `Alt_S f`. Sets already pending are merged: an alternation on a
    /// subset of `S` is absorbed with a factorial factor, a superset of `S`
    /// absorbs `S`, and partial overlaps are expanded first.
    pub fn alternate<S: AsRef<str>>(&self, subset: &[S]) -> Result<Self> {
        let mut s = self.vars.indices(subset)?;
        s.sort_unstable();
        if s.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::DuplicateVariable(subset[0].as_ref().to_string()));
        }
        let mut p = self.clone();
        if s.len() <= 1 {
            return Ok(p);
        }
        while let Some(k) = p.alternations.iter().position(|t| {
            let common = t.iter().filter(|x| s.binary_search(x).is_ok()).count();
            common > 0 && common < t.len() && common < s.len()
        }) {
            p = p.expand_set(k);
        }
        if p.alternations.iter().any(|t| s.iter().all(|x| t.binary_search(x).is_ok())) {
            return Ok(p.scale(&Scalar::from_integer(factorial(s.len()).into())));
        }
        let mut factor = Scalar::one();
        p.alternations.retain(|t| {
            let inside = t.iter().all(|x| s.binary_search(x).is_ok());
            if inside {
                factor *= Scalar::from_integer(factorial(t.len()).into());
            }
            !inside
        });
        p.alternations.push(s);
        p.alternations.sort();
        Ok(p.scale(&factor))
    }

    fn expand_set(&self, k: usize) -> Self {
        let set = &self.alternations[k];
        let mut pos = vec![usize::MAX; self.vars.len()];
        for (i, &v) in set.iter().enumerate() {
            pos[v as usize] = i;
        }
        let perms = signed_permutations(set.len());
        let mut terms = BTreeMap::new();
        for (w, c) in &self.terms {
            for (perm, odd) in &perms {
                let nw: Vec<u32> = w
                    .iter()
                    .map(|&v| match pos[v as usize] {
                        usize::MAX => v,
                        i => set[perm[i]],
                    })
                    .collect();
                add_term(&mut terms, nw, if *odd { -c.clone() } else { c.clone() });
            }
        }
        let mut alternations = self.alternations.clone();
        alternations.remove(k);
        Self { vars: self.vars.clone(), terms, alternations, shape: self.shape.clone() }
    }

    /// The same polynomial with every alternation written out.
    pub fn expand(&self) -> Self {
        let mut p = self.clone();
        while !p.alternations.is_empty() {
            p = p.expand_set(p.alternations.len() - 1);
        }
        p
    }

    /// Expanded terms keyed by word (variable names).
    pub fn terms(&self) -> Vec<(Vec<String>, Scalar)> {
        self.expand().terms.into_iter().map(|(w, c)| (self.names_of(&w), c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() || self.expand().terms.is_empty()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut p = self.clone();
        if c.is_zero() {
            p.terms.clear();
            p.alternations.clear();
            return p;
        }
        for v in p.terms.values_mut() {
            *v *= c;
        }
        p
    }

    /// `f + g` on the same ordered variable set.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.vars.names != other.vars.names {
            return Err(Error::BadPolynomial("sum of polynomials on different variable lists".into()));
        }
        let (a, b) = if self.alternations == other.alternations {
            (self.clone(), other.clone())
        } else {
            (self.expand(), other.expand())
        };
        let mut out = a;
        for (w, c) in b.terms {
            add_term(&mut out.terms, w, c);
        }
        if out.shape != other.shape {
            out.shape = None;
        }
        Ok(out)
    }

    /// `f g` for polynomials on disjoint variables.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let off = self.vars.len() as u32;
        let vars = VariableSet::new(self.vars.names.iter().chain(other.vars.names.iter()).cloned())?;
        let mut terms = BTreeMap::new();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let w: Vec<u32> = w1.iter().copied().chain(w2.iter().map(|v| v + off)).collect();
                add_term(&mut terms, w, c1 * c2);
            }
        }
        let alternations = self
            .alternations
            .iter()
            .cloned()
            .chain(other.alternations.iter().map(|s| s.iter().map(|v| v + off).collect()))
            .collect();
        Ok(Self { vars, terms, alternations, shape: None })
    }

    /// Renames variables by a bijection given on (a subset of) the names;
    /// the word encoding follows the new names.
    pub fn rename(&self, map: &HashMap<String, String>) -> Result<Self> {
        let names: Vec<String> =
            self.vars.names.iter().map(|n| map.get(n).cloned().unwrap_or_else(|| n.clone())).collect();
        let vars = VariableSet::new(names)?;
        let shape = self.shape.as_ref().map(|s| {
            let f = |v: &String| map.get(v).cloned().unwrap_or_else(|| v.clone());
            AlternationShape {
                small: s.small.iter().map(|x| x.iter().map(f).collect()).collect(),
                big: s.big.iter().map(|x| x.iter().map(f).collect()).collect(),
                free: s.free.iter().map(f).collect(),
            }
        });
        Ok(Self { vars, terms: self.terms.clone(), alternations: self.alternations.clone(), shape })
    }

    /// Substitutes the variables by a permutation of themselves:
    /// every occurrence of `a` becomes `map[a]`.
    pub fn permute_variables(&self, map: &HashMap<String, String>) -> Result<Self> {
        let n = self.vars.len();
        let mut perm: Vec<u32> = (0..n as u32).collect();
        for (a, b) in map {
            let i = self.vars.indices(&[a])?[0];
            let j = self.vars.indices(&[b])?[0];
            perm[i as usize] = j;
        }
        let mut check = perm.clone();
        check.sort_unstable();
        if check != (0..n as u32).collect::<Vec<_>>() {
            return Err(Error::InvalidArgument("substitution is not a permutation of the variables".into()));
        }
        let e = self.expand();
        let words = e.terms.iter().map(|(w, c)| (w.iter().map(|&v| perm[v as usize]).collect(), c.clone())).collect();
        Ok(Self::from_parts(self.vars.clone(), words))
    }
}

fn add_term(map: &mut BTreeMap<Vec<u32>, Scalar>, w: Vec<u32>, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match map.entry(w) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

impl PartialEq for MultilinearPolynomial {
    /// Equality as polynomials (after expansion) on the same ordered variables.
    fn eq(&self, other: &Self) -> bool {
        if self.vars.names != other.vars.names {
            return false;
        }
        if self.alternations == other.alternations && self.terms == other.terms {
            return true;
        }
        self.expand().terms == other.expand().terms
    }
}
