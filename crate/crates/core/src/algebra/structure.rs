//! Radical, nilpotency, Wedderburn data and Par.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::StructureAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{nullspace, rank, Subspace};
use crate::scalar::{exact_isqrt, format_scalar, int, Scalar};

pub const DEFAULT_SPLIT_SEED: u64 = 0x5eed;
pub const DEFAULT_SPLIT_ATTEMPTS: usize = 8;

/// `(dim A_ss, nildeg(J) - 1)`, ordered lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParValue {
    pub dim_ss: usize,
    pub s: usize,
}

impl Serialize for ParValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.dim_ss, self.s].serialize(s)
    }
}

impl std::fmt::Display for ParValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.dim_ss, self.s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WedderburnData {
    pub q: usize,
    pub block_dims: Vec<usize>,
    pub dim_ss: usize,
    pub radical: Subspace,
    pub nildeg: usize,
    /// Pairwise orthogonal idempotents of `A`, one per simple component,
    /// mapping onto the primitive central idempotents of `A/J`.
    #[serde(serialize_with = "ser_vectors")]
    pub component_idempotents: Vec<Vec<Scalar>>,
    pub seed: u64,
    pub attempts: usize,
}

impl WedderburnData {
    pub fn par(&self) -> ParValue {
        ParValue { dim_ss: self.dim_ss, s: self.nildeg - 1 }
    }
}

fn ser_vectors<S: serde::Serializer>(v: &[Vec<Scalar>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let strings: Vec<Vec<String>> = v.iter().map(|r| r.iter().map(format_scalar).collect()).collect();
    strings.serialize(s)
}

impl StructureAlgebra {
    /// `tr(L_x)` for each basis element.
    fn regular_traces(&self) -> Vec<Scalar> {
        (0..self.dim())
            .map(|k| {
                (0..self.dim())
                    .filter_map(|m| self.product_of_basis(k, m).iter().find(|e| e.0 == m).map(|e| e.1.clone()))
                    .sum()
            })
            .collect()
    }

    /// Jacobson radical as the kernel of the trace form `tr(L_{xy})`.
    pub fn radical(&self) -> Subspace {
        let dim = self.dim();
        let t = self.regular_traces();
        // gram[i][j] = tr(L_{e_i e_j}); x is radical iff x^T gram = 0
        let mut gram_t = vec![vec![Scalar::zero(); dim]; dim];
        for (i, j, k, c) in self.structure_triples() {
            if !t[k].is_zero() {
                gram_t[j][i] += c * &t[k];
            }
        }
        Subspace::span(dim, nullspace(gram_t, dim)).expect("kernel vectors have ambient length")
    }

    fn check_ambient(&self, s: &Subspace) -> Result<()> {
        if s.ambient_dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: s.ambient_dim() });
        }
        Ok(())
    }

    /// Span of all products `u v` with `u` in `U`, `v` in `V`.
    pub fn subspace_product(&self, u: &Subspace, v: &Subspace) -> Result<Subspace> {
        self.check_ambient(u)?;
        self.check_ambient(v)?;
        let mut prods = Vec::with_capacity(u.dimension() * v.dimension());
        for x in u.rows() {
            for y in v.rows() {
                prods.push(self.multiply(x, y)?);
            }
        }
        Subspace::span(self.dim(), prods)
    }

    /// Span of the given basis elements.
    pub fn basis_span(&self, indices: &[usize]) -> Subspace {
        Subspace::span(self.dim(), indices.iter().map(|&i| self.basis_vector(i))).expect("basis vectors")
    }

    pub fn element_span(&self, x: &[Scalar]) -> Result<Subspace> {
        Subspace::span(self.dim(), [x.to_vec()])
    }

    pub fn is_two_sided_ideal(&self, s: &Subspace) -> Result<bool> {
        let all = Subspace::full(self.dim());
        Ok(self.subspace_product(&all, s)?.is_subspace_of(s) && self.subspace_product(s, &all)?.is_subspace_of(s))
    }

    /// Powers `J, J^2, ...` up to and including the first zero power.
    pub fn subspace_powers(&self, j: &Subspace) -> Result<Vec<Subspace>> {
        self.check_ambient(j)?;
        let mut powers = vec![j.clone()];
        while !powers.last().unwrap().is_zero() {
            if powers.len() > self.dim() {
                return Err(Error::NotNilpotent(self.dim()));
            }
            let next = self.subspace_product(powers.last().unwrap(), j)?;
            powers.push(next);
        }
        Ok(powers)
    }

    /// Minimal `l` with `J^l = 0`; the zero subspace has degree 1.
    pub fn nilpotency_degree(&self, j: &Subspace) -> Result<usize> {
        if j.is_zero() {
            return Ok(1);
        }
        Ok(self.subspace_powers(j)?.len())
    }

    /// For each basis element, the largest `k` with `e_b` in `J^k` (0 when
    /// `e_b` is not radical).
    pub fn radical_layers(&self) -> Result<Vec<usize>> {
        let powers = self.subspace_powers(&self.radical())?;
        Ok((0..self.dim())
            .map(|b| {
                let e = self.basis_vector(b);
                powers.iter().take_while(|p| p.contains(&e)).count()
            })
            .collect())
    }

    pub fn wedderburn_data(&self) -> Result<WedderburnData> {
        self.wedderburn_data_seeded(DEFAULT_SPLIT_SEED, DEFAULT_SPLIT_ATTEMPTS)
    }

    /// Finds the simple components of `A/J` from the minimal polynomial of
    /// random central elements, which must split into distinct rational
    /// linear factors within `attempts` tries.
    pub fn wedderburn_data_seeded(&self, seed: u64, attempts: usize) -> Result<WedderburnData> {
        let dim = self.dim();
        let radical = self.radical();
        let nildeg = self.nilpotency_degree(&radical)?;
        let complement: Vec<usize> = (0..dim).filter(|c| !radical.pivots().contains(c)).collect();
        let m = complement.len();
        let empty = |attempts| WedderburnData {
            q: 0,
            block_dims: vec![],
            dim_ss: 0,
            radical: radical.clone(),
            nildeg,
            component_idempotents: vec![],
            seed,
            attempts,
        };
        if m == 0 {
            return Ok(empty(0));
        }
        let quotient = Quotient::new(self, &radical, &complement);
        let center = quotient.center();
        let q = center.len();

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut split = None;
        let mut used = 0;
        for attempt in 1..=attempts.max(1) {
            used = attempt;
            let mut z = vec![Scalar::zero(); m];
            for c in &center {
                let r = int(rng.random_range(-9..=9));
                for (zi, ci) in z.iter_mut().zip(c) {
                    *zi += &r * ci;
                }
            }
            if let Some(eps) = quotient.split_by(&z, q) {
                split = Some(eps);
                break;
            }
        }
        let Some(eps) = split else {
            return Err(Error::NonSplitCenter { attempts: attempts.max(1), seed });
        };

        let embed = |v: &[Scalar]| {
            let mut out = vec![Scalar::zero(); dim];
            for (t, &c) in complement.iter().enumerate() {
                out[c] = v[t].clone();
            }
            out
        };
        let mut comps: Vec<(Vec<Scalar>, usize)> = Vec::with_capacity(q);
        for e in &eps {
            let comp_dim = quotient.ideal_dim(e);
            let d = exact_isqrt(comp_dim).ok_or(Error::NotPerfectSquare(comp_dim))?;
            comps.push((embed(e), d));
        }
        comps.sort_by(|a, b| compare_support(&a.0, &b.0));

        let mut lifted: Vec<Vec<Scalar>> = Vec::with_capacity(q);
        let mut sum = vec![Scalar::zero(); dim];
        for (e, _) in &comps {
            let mut x = e.clone();
            if !lifted.is_empty() {
                let ex = self.multiply(&sum, &x)?;
                let xe = self.multiply(&x, &sum)?;
                let exe = self.multiply(&ex, &sum)?;
                for t in 0..dim {
                    x[t] = &x[t] - &ex[t] - &xe[t] + &exe[t];
                }
            }
            x = self.lift_idempotent(x)?;
            for (s, v) in sum.iter_mut().zip(&x) {
                *s += v;
            }
            lifted.push(x);
        }
        let block_dims: Vec<usize> = comps.iter().map(|c| c.1).collect();
        let dim_ss = block_dims.iter().map(|d| d * d).sum();
        debug_assert_eq!(dim_ss + radical.dimension(), dim);
        Ok(WedderburnData {
            q,
            block_dims,
            dim_ss,
            radical,
            nildeg,
            component_idempotents: lifted,
            seed,
            attempts: used,
        })
    }

    /// Iterates `x <- 3x^2 - 2x^3`, which converges to an idempotent when
    /// `x^2 - x` is nilpotent.
    fn lift_idempotent(&self, mut x: Vec<Scalar>) -> Result<Vec<Scalar>> {
        for _ in 0..64 {
            let x2 = self.multiply(&x, &x)?;
            if x2 == x {
                return Ok(x);
            }
            let x3 = self.multiply(&x2, &x)?;
            x = x2.iter().zip(&x3).map(|(a, b)| int(3) * a - int(2) * b).collect();
        }
        Err(Error::Precision("idempotent lifting did not converge".into()))
    }

    pub fn par(&self) -> Result<ParValue> {
        Ok(self.wedderburn_data()?.par())
    }
}

fn compare_support(a: &[Scalar], b: &[Scalar]) -> Ordering {
    let lead = |v: &[Scalar]| v.iter().position(|x| !x.is_zero()).unwrap_or(usize::MAX);
    lead(a).cmp(&lead(b)).then_with(|| {
        let fa: Vec<String> = a.iter().map(format_scalar).collect();
        let fb: Vec<String> = b.iter().map(format_scalar).collect();
        fa.cmp(&fb)
    })
}

/// `A/J` in the basis given by the non-pivot columns of `J`.
struct Quotient {
    m: usize,
    /// `table[a * m + b]` is `f_a f_b`.
    table: Vec<Vec<Scalar>>,
}

impl Quotient {
    fn new(alg: &StructureAlgebra, radical: &Subspace, complement: &[usize]) -> Self {
        let m = complement.len();
        let mut table = Vec::with_capacity(m * m);
        for &a in complement {
            for &b in complement {
                let mut v = alg.zero_vector();
                for (k, c) in alg.product_of_basis(a, b) {
                    v[*k] = c.clone();
                }
                let r = radical.reduce(&v);
                table.push(complement.iter().map(|&c| r[c].clone()).collect());
            }
        }
        Self { m, table }
    }

    fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.m];
        for (a, xa) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (b, yb) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let ab = xa * yb;
                for (t, c) in self.table[a * self.m + b].iter().enumerate() {
                    if !c.is_zero() {
                        out[t] += &ab * c;
                    }
                }
            }
        }
        out
    }

    fn center(&self) -> Vec<Vec<Scalar>> {
        let m = self.m;
        let mut eqs = Vec::with_capacity(m * m);
        for b in 0..m {
            for t in 0..m {
                let row: Vec<Scalar> = (0..m).map(|a| &self.table[a * m + b][t] - &self.table[b * m + a][t]).collect();
                if row.iter().any(|x| !x.is_zero()) {
                    eqs.push(row);
                }
            }
        }
        nullspace(eqs, m)
    }

    fn ideal_dim(&self, e: &[Scalar]) -> usize {
        let rows = (0..self.m)
            .map(|b| {
                let mut f = vec![Scalar::zero(); self.m];
                f[b] = Scalar::one();
                self.mul(e, &f)
            })
            .collect();
        rank(rows)
    }

    /// Primitive central idempotents from a central element whose minimal
    /// polynomial has degree `q` and splits over the rationals.
    fn split_by(&self, z: &[Scalar], q: usize) -> Option<Vec<Vec<Scalar>>> {
        // powers z, z^2, ..., z^{q+1}
        let mut powers = vec![z.to_vec()];
        for _ in 0..q {
            let next = self.mul(powers.last().unwrap(), z);
            powers.push(next);
        }
        if rank(powers[..q].to_vec()) < q {
            return None;
        }
        // z^{q+1} = sum c_i z^i: solve the columns system
        let cols: Vec<Vec<Scalar>> = (0..self.m).map(|t| powers.iter().map(|p| p[t].clone()).collect()).collect();
        let ker = nullspace(cols, q + 1);
        let k = ker.into_iter().find(|v| !v[q].is_zero())?;
        // k_0 z + ... + k_q z^{q+1} = 0; since z is semisimple its minimal
        // polynomial divides t * g(t) with g(t) = sum k_i t^{i} / k_q
        let lead = k[q].clone();
        let g: Vec<Scalar> = k.iter().map(|c| c / &lead).collect();
        let roots = rational_roots(&g)?;
        if roots.len() != q || roots.iter().any(Zero::is_zero) {
            return None;
        }
        let mut eps = Vec::with_capacity(q);
        for (i, li) in roots.iter().enumerate() {
            // p_i(t) = t * prod_{j != i} (t - l_j), scaled so p_i(l_i) = 1
            let mut poly = vec![Scalar::zero(), Scalar::one()];
            let mut denom = li.clone();
            for (j, lj) in roots.iter().enumerate() {
                if j == i {
                    continue;
                }
                let mut next = vec![Scalar::zero(); poly.len() + 1];
                for (d, c) in poly.iter().enumerate() {
                    next[d + 1] += c;
                    next[d] -= c * lj;
                }
                poly = next;
                denom *= li - lj;
            }
            let mut e = vec![Scalar::zero(); self.m];
            for (d, c) in poly.iter().enumerate().skip(1) {
                if c.is_zero() {
                    continue;
                }
                for (x, p) in e.iter_mut().zip(&powers[d - 1]) {
                    *x += c * p;
                }
            }
            for x in e.iter_mut() {
                *x /= &denom;
            }
            if self.mul(&e, &e) != e {
                return None;
            }
            eps.push(e);
        }
        Some(eps)
    }
}

/// All roots of `sum coeffs[i] t^i` when they are rational and distinct.
/// Roots are located numerically and confirmed exactly.
fn rational_roots(coeffs: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Some(vec![]);
    }
    let lcm = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * Scalar::from_integer(lcm.clone())).to_integer()).collect();
    let lead = ints[n].clone();
    let lead_f = lead.to_f64()?;
    let monic: Vec<Complex64> =
        ints.iter().map(|c| Complex64::new(c.to_f64().unwrap_or(f64::NAN) / lead_f, 0.0)).collect();
    let approx = durand_kerner(&monic)?;
    let mut roots: Vec<Scalar> = Vec::with_capacity(n);
    for z in approx {
        let scaled = (z.re * lead_f.abs()).round();
        let num = BigInt::from(scaled as i128);
        let cand = Scalar::new(num, lead.abs());
        let value = coeffs.iter().rev().fold(Scalar::zero(), |acc, c| acc * &cand + c);
        if !value.is_zero() || roots.contains(&cand) {
            return None;
        }
        roots.push(cand);
    }
    roots.sort();
    Some(roots)
}

/// Simultaneous Weierstrass iteration on a monic polynomial (coefficients
/// from the constant term up).
fn durand_kerner(monic: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = monic.len() - 1;
    let eval = |z: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
    let radius = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                den = Complex64::new(1e-12, 0.0);
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm() / (1.0 + z[i].norm()));
        }
        if delta < 1e-14 {
            break;
        }
    }
    if z.iter().any(|c| !c.re.is_finite() || c.im.abs() > 1e-6 * (1.0 + c.re.abs())) {
        return None;
    }
    Some(z)
}
