//! Finite-dimensional associative algebras given by exact structure constants.

mod build;
mod io;
mod structure;

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{CoeffRing, Scalar};

pub use build::{AssociatedInfo, BasisWord, MatrixUnit};
pub use io::AlgebraFile;
pub use structure::{ParValue, WedderburnData, DEFAULT_SPLIT_ATTEMPTS, DEFAULT_SPLIT_SEED};

/// Sparse coefficient vector: strictly increasing basis indices.
pub type SparseVec = Vec<(usize, Scalar)>;

#[derive(Clone, Debug)]
pub struct StructureAlgebra {
    name: String,
    basis: Vec<String>,
    /// `mul[i * dim + j]` is the expansion of `e_i e_j`.
    mul: Vec<SparseVec>,
    unit: Option<Vec<Scalar>>,
    associated: Option<Arc<AssociatedInfo>>,
}

impl StructureAlgebra {
    /// Builds an algebra from `(i, j, k, c)` triples meaning `e_i e_j += c e_k`.
    /// Associativity is not checked here; see [`StructureAlgebra::check_associativity`].
    pub fn new(
        name: impl Into<String>,
        basis: Vec<String>,
        triples: impl IntoIterator<Item = (usize, usize, usize, Scalar)>,
        unit: Option<Vec<Scalar>>,
    ) -> Result<Self> {
        let dim = basis.len();
        if dim == 0 {
            return Err(Error::InvalidAlgebra("dimension must be at least 1".into()));
        }
        let mut mul: Vec<SparseVec> = vec![Vec::new(); dim * dim];
        for (i, j, k, c) in triples {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::InvalidAlgebra(format!("index out of range in ({i}, {j}, {k})")));
            }
            if c.is_zero() {
                continue;
            }
            let cell = &mut mul[i * dim + j];
            match cell.iter_mut().find(|e| e.0 == k) {
                Some(e) => e.1 += c,
                None => cell.push((k, c)),
            }
        }
        for cell in mul.iter_mut() {
            cell.retain(|e| !e.1.is_zero());
            cell.sort_by_key(|e| e.0);
        }
        let alg = Self { name: name.into(), basis, mul, unit: None, associated: None };
        match unit {
            Some(u) => alg.with_unit(u),
            None => Ok(alg),
        }
    }

    fn with_unit(mut self, unit: Vec<Scalar>) -> Result<Self> {
        let dim = self.dim();
        if unit.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: unit.len() });
        }
        for b in 0..dim {
            let e = self.basis_vector(b);
            if self.multiply(&unit, &e)? != e || self.multiply(&e, &unit)? != e {
                return Err(Error::InvalidAlgebra(format!(
                    "declared unit is not a two-sided identity on {}",
                    self.basis[b]
                )));
            }
        }
        self.unit = Some(unit);
        Ok(self)
    }

    pub(crate) fn set_associated(&mut self, info: AssociatedInfo) {
        self.associated = Some(Arc::new(info));
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis
    }

    pub fn unit(&self) -> Option<&[Scalar]> {
        self.unit.as_deref()
    }

    /// Word metadata, present only for algebras built by
    /// [`StructureAlgebra::associated`].
    pub fn associated_info(&self) -> Option<&AssociatedInfo> {
        self.associated.as_deref()
    }

    /// Expansion of `e_i e_j`.
    pub fn product_of_basis(&self, i: usize, j: usize) -> &SparseVec {
        &self.mul[i * self.dim() + j]
    }

    pub fn structure_triples(&self) -> impl Iterator<Item = (usize, usize, usize, &Scalar)> + '_ {
        let dim = self.dim();
        self.mul
            .iter()
            .enumerate()
            .flat_map(move |(ij, cell)| cell.iter().map(move |(k, c)| (ij / dim, ij % dim, *k, c)))
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); self.dim()];
        v[i] = crate::scalar::one();
        v
    }

    pub fn zero_vector(&self) -> Vec<Scalar> {
        vec![Scalar::zero(); self.dim()]
    }

    /// Bilinear product of two coefficient vectors.
    pub fn multiply(&self, x: &[Scalar], y: &[Scalar]) -> Result<Vec<Scalar>> {
        let dim = self.dim();
        for v in [x, y] {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
        }
        let mut out = self.zero_vector();
        for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in y.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                let ab = a * b;
                for (k, c) in &self.mul[i * dim + j] {
                    out[*k] += &ab * c;
                }
            }
        }
        Ok(out)
    }

    /// Exhaustive check of `(e_i e_j) e_k = e_i (e_j e_k)`.
    pub fn check_associativity(&self) -> Result<()> {
        use rayon::prelude::*;
        let dim = self.dim();
        let triple = |i: usize| -> Option<(usize, usize, usize)> {
            let mut lhs = Vec::new();
            let mut rhs = Vec::new();
            for j in 0..dim {
                let ij = self.product_of_basis(i, j);
                for k in 0..dim {
                    let jk = self.product_of_basis(j, k);
                    if ij.is_empty() && jk.is_empty() {
                        continue;
                    }
                    lhs.clear();
                    rhs.clear();
                    for (m, c) in ij {
                        for (t, d) in self.product_of_basis(*m, k) {
                            lhs.push((*t, c * d));
                        }
                    }
                    for (m, c) in jk {
                        for (t, d) in self.product_of_basis(i, *m) {
                            rhs.push((*t, c * d));
                        }
                    }
                    if collect_sparse(&mut lhs) != collect_sparse(&mut rhs) {
                        return Some((i, j, k));
                    }
                }
            }
            None
        };
        match (0..dim).into_par_iter().filter_map(triple).min() {
            Some((i, j, k)) => Err(Error::NotAssociative(i, j, k)),
            None => Ok(()),
        }
    }

    /// Same algebra with the basis reordered: new basis element `t` is old
    /// element `perm[t]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let dim = self.dim();
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..dim).collect::<Vec<_>>() {
            return Err(Error::InvalidArgument("relabeling must be a permutation of the basis".into()));
        }
        let mut inv = vec![0; dim];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let basis = perm.iter().map(|&o| self.basis[o].clone()).collect();
        let triples =
            self.structure_triples().map(|(i, j, k, c)| (inv[i], inv[j], inv[k], c.clone())).collect::<Vec<_>>();
        let unit = self.unit.as_ref().map(|u| perm.iter().map(|&o| u[o].clone()).collect());
        StructureAlgebra::new(format!("{}'", self.name), basis, triples, unit)
    }

    /// Compiles the structure constants into `ring`; `None` when some
    /// constant has no image there.
    pub fn table<R: CoeffRing>(&self, ring: &R) -> Option<MulTable<R::El>> {
        let mut entries = Vec::with_capacity(self.mul.len());
        for cell in &self.mul {
            let mut row = Vec::with_capacity(cell.len());
            for (k, c) in cell {
                let v = ring.image_of(c)?;
                if !ring.is_zero(&v) {
                    row.push((*k as u32, v));
                }
            }
            entries.push(row);
        }
        Some(MulTable { dim: self.dim(), entries })
    }
}

/// Structure constants compiled into a coefficient ring.
#[derive(Clone, Debug)]
pub struct MulTable<E> {
    dim: usize,
    entries: Vec<Vec<(u32, E)>>,
}

impl<E: Clone> MulTable<E> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn cell(&self, i: u32, j: u32) -> &[(u32, E)] {
        &self.entries[i as usize * self.dim + j as usize]
    }

    /// Product of two sparse vectors; the result is sorted, merged and
    /// free of zeros.
    pub fn mul_sparse<R: CoeffRing<El = E>>(&self, ring: &R, x: &[(u32, E)], y: &[(u32, E)]) -> Vec<(u32, E)> {
        if x.len() == 1 && y.len() == 1 {
            let (i, a) = &x[0];
            let (j, b) = &y[0];
            let ab = ring.mul(a, b);
            let cell = self.cell(*i, *j);
            return cell.iter().map(|(k, c)| (*k, ring.mul(&ab, c))).filter(|(_, v)| !ring.is_zero(v)).collect();
        }
        let mut acc: Vec<(u32, E)> = Vec::new();
        for (i, a) in x {
            for (j, b) in y {
                let cell = self.cell(*i, *j);
                if cell.is_empty() {
                    continue;
                }
                let ab = ring.mul(a, b);
                for (k, c) in cell {
                    acc.push((*k, ring.mul(&ab, c)));
                }
            }
        }
        merge_sparse(ring, acc)
    }
}

pub(crate) fn merge_sparse<R: CoeffRing>(ring: &R, mut acc: Vec<(u32, R::El)>) -> Vec<(u32, R::El)> {
    if acc.len() <= 1 {
        acc.retain(|(_, v)| !ring.is_zero(v));
        return acc;
    }
    acc.sort_by_key(|e| e.0);
    let mut out: Vec<(u32, R::El)> = Vec::with_capacity(acc.len());
    for (k, v) in acc {
        match out.last_mut() {
            Some(last) if last.0 == k => ring.add_assign(&mut last.1, &v),
            _ => out.push((k, v)),
        }
    }
    out.retain(|(_, v)| !ring.is_zero(v));
    out
}

/// Dense coefficient vector to sparse form in `ring`.
pub fn to_sparse<R: CoeffRing>(ring: &R, v: &[Scalar]) -> Option<Vec<(u32, R::El)>> {
    let mut out = Vec::new();
    for (i, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let e = ring.image_of(x)?;
        if !ring.is_zero(&e) {
            out.push((i as u32, e));
        }
    }
    Some(out)
}

pub fn sparse_to_dense(dim: usize, v: &[(u32, Scalar)]) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); dim];
    for (i, x) in v {
        out[*i as usize] = x.clone();
    }
    out
}

/// Sorts, merges equal indices and drops zeros.
fn collect_sparse(v: &mut Vec<(usize, Scalar)>) -> &[(usize, Scalar)] {
    v.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, Scalar)> = Vec::with_capacity(v.len());
    for (k, c) in v.drain(..) {
        match out.last_mut() {
            Some(last) if last.0 == k => last.1 += c,
            _ => out.push((k, c)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    *v = out;
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, one, PrimeField, Rationals};

    #[test]
    fn rejects_empty_and_bad_indices() {
        assert!(StructureAlgebra::new("z", vec![], vec![], None).is_err());
        let r = StructureAlgebra::new("a", vec!["e".into()], vec![(0, 0, 1, one())], None);
        assert!(r.is_err());
    }

    #[test]
    fn rejects_false_unit() {
        // e^2 = 0 has no unit
        let r = StructureAlgebra::new("n", vec!["e".into()], vec![], Some(vec![one()]));
        assert!(r.is_err());
    }

    #[test]
    fn zero_times_anything() {
        let a = StructureAlgebra::ut(&[1, 1]).unwrap();
        let x = vec![int(3), int(-1), int(2)];
        assert_eq!(a.multiply(&x, &a.zero_vector()).unwrap(), a.zero_vector());
    }

    #[test]
    fn tables_agree_with_exact_product() {
        let a = StructureAlgebra::matrix(2).unwrap();
        let t = a.table(&Rationals).unwrap();
        let x = vec![(0u32, int(2)), (1, int(1))];
        let y = vec![(2u32, int(1)), (3, int(-1))];
        let got = sparse_to_dense(4, &t.mul_sparse(&Rationals, &x, &y));
        let want = a.multiply(&sparse_to_dense(4, &x), &sparse_to_dense(4, &y)).unwrap();
        assert_eq!(got, want);
        assert!(a.table(&PrimeField::new(7)).is_some());
    }

    #[test]
    fn relabel_preserves_associativity() {
        let a = StructureAlgebra::ut(&[1, 2]).unwrap();
        let b = a.relabel(&[6, 5, 4, 3, 2, 1, 0]).unwrap();
        b.check_associativity().unwrap();
        assert_eq!(b.basis_labels()[0], a.basis_labels()[6]);
    }
}
