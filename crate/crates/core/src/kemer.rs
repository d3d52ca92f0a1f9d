//! Exponent, witnessed Kemer-index lower bounds and basicness certificates.

use itertools::Itertools;
use serde::Serialize;

use crate::algebra::{ParValue, StructureAlgebra, WedderburnData};
use crate::error::{Error, Result};
use crate::linalg::Subspace;
use crate::multilinear::{
    find_nonzero_evaluation, is_identity, route_polynomial, AlternationShape, MultilinearPolynomial, PolynomialFile,
    SearchStrategy, Witness,
};

pub const DEFAULT_NU: usize = 2;
pub const DEFAULT_BUDGET: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 0;
/// Routes tried per big-set count before giving up.
const MAX_ROUTES: usize = 256;
/// Largest degree examined by the exhaustive mode.
const MAX_EXHAUSTIVE_DEGREE: usize = 8;

/// A chain `A_{i_1} J A_{i_2} ... J A_{i_r}` is nonzero iff the same product
/// with each component replaced by its unit is nonzero.
fn chain_extends(alg: &StructureAlgebra, current: &Subspace, j: &Subspace, next: &Subspace) -> Result<Subspace> {
    let t = alg.subspace_product(current, j)?;
    if t.is_zero() {
        return Ok(t);
    }
    alg.subspace_product(&t, next)
}

/// Sequences of distinct components with a nonzero chain, in depth-first
/// order.
pub fn admissible_chains(alg: &StructureAlgebra, data: &WedderburnData) -> Result<Vec<Vec<usize>>> {
    let units: Vec<Subspace> = data.component_idempotents.iter().map(|e| alg.element_span(e)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<usize>, Subspace)> = Vec::new();
    for (i, u) in units.iter().enumerate().rev() {
        stack.push((vec![i], u.clone()));
    }
    while let Some((chain, space)) = stack.pop() {
        for k in (0..units.len()).rev() {
            if chain.contains(&k) {
                continue;
            }
            let next = chain_extends(alg, &space, &data.radical, &units[k])?;
            if !next.is_zero() {
                let mut c = chain.clone();
                c.push(k);
                stack.push((c, next));
            }
        }
        out.push(chain);
    }
    Ok(out)
}

fn chain_weight(data: &WedderburnData, chain: &[usize]) -> usize {
    chain.iter().map(|&i| data.block_dims[i] * data.block_dims[i]).sum()
}

/// The largest `sum dim A_{i_j}` over nonzero chains of distinct simple
/// components.
pub fn exp_gz(alg: &StructureAlgebra) -> Result<usize> {
    let data = alg.wedderburn_data()?;
    exp_from(alg, &data)
}

fn exp_from(alg: &StructureAlgebra, data: &WedderburnData) -> Result<usize> {
    Ok(admissible_chains(alg, data)?.iter().map(|c| chain_weight(data, c)).max().unwrap_or(0))
}

#[derive(Clone, Debug)]
pub struct KemerWitness {
    /// Components visited, in order; repeats are revisits.
    pub route: Vec<usize>,
    pub polynomial: MultilinearPolynomial,
    pub shape: AlternationShape,
    pub witness: Witness,
}

impl KemerWitness {
    pub fn small_size(&self) -> usize {
        self.shape.small.first().map_or(0, Vec::len)
    }

    pub fn big_count(&self) -> usize {
        self.shape.big.len()
    }
}

impl Serialize for KemerWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            route: &'a [usize],
            small: Vec<usize>,
            big: Vec<usize>,
            polynomial: PolynomialFile,
            witness: &'a Witness,
        }
        Out {
            route: &self.route,
            small: self.shape.small.iter().map(Vec::len).collect(),
            big: self.shape.big.iter().map(Vec::len).collect(),
            polynomial: self.polynomial.to_file(),
            witness: &self.witness,
        }
        .serialize(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KemerStatus {
    CertifiedBasic,
    LowerBoundOnly,
}

/// Outcome of testing every polynomial alternating in `nu` sets of size
/// `r` with at most `extra_vars` further variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExhaustiveCheck {
    pub nu: usize,
    pub r: usize,
    pub extra_vars: usize,
    pub monomials: u64,
    pub all_identities: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KemerEstimate {
    pub d_lower: usize,
    pub s_lower: usize,
    pub par: ParValue,
    pub status: KemerStatus,
    pub nu: usize,
    pub witnesses: Vec<KemerWitness>,
    pub exhaustive: Option<ExhaustiveCheck>,
}

impl KemerEstimate {
    pub fn lower(&self) -> ParValue {
        ParValue { dim_ss: self.d_lower, s: self.s_lower }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct KemerOptions {
    pub nu: usize,
    /// Tuples examined per witness search.
    pub budget: u64,
    pub seed: u64,
    pub split_seed: u64,
}

impl Default for KemerOptions {
    fn default() -> Self {
        Self {
            nu: DEFAULT_NU,
            budget: DEFAULT_BUDGET,
            seed: DEFAULT_SEED,
            split_seed: crate::algebra::DEFAULT_SPLIT_SEED,
        }
    }
}

fn try_route(
    alg: &StructureAlgebra,
    dims: &[usize],
    route: &[usize],
    mu: usize,
    big: usize,
    opts: &KemerOptions,
) -> Result<Option<KemerWitness>> {
    let f = route_polynomial(dims, route, mu, big)?;
    let strategy =
        SearchStrategy::Auto { seed: opts.seed, structured_budget: Some(opts.budget), random_budget: opts.budget };
    Ok(find_nonzero_evaluation(&f, alg, strategy)?.map(|witness| KemerWitness {
        route: route.to_vec(),
        shape: f.shape().cloned().expect("route polynomials carry a shape"),
        polynomial: f,
        witness,
    }))
}

/// Routes of `len` stops that visit exactly the components of `support`.
fn covering_routes(support: &[usize], len: usize) -> Vec<Vec<usize>> {
    (0..len)
        .map(|_| support.iter().copied())
        .multi_cartesian_product()
        .filter(|r| support.iter().all(|c| r.contains(c)))
        .take(MAX_ROUTES)
        .collect()
}

/// Witnessed lower bounds: the largest `r` realised by a non-identity
/// alternating in `nu` sets of size `r`, then the most big sets of size
/// `r + 1` found next to `nu` small ones. Big-set counts are tried up to
/// the nilpotency bound `Par.s`.
pub fn kemer_lower_bound_search(alg: &StructureAlgebra, opts: &KemerOptions) -> Result<KemerEstimate> {
    if opts.nu == 0 {
        return Err(Error::InvalidArgument("nu must be at least 1".into()));
    }
    let data = alg.wedderburn_data_seeded(opts.split_seed, crate::algebra::DEFAULT_SPLIT_ATTEMPTS)?;
    let par = data.par();
    let mut chains = admissible_chains(alg, &data)?;
    chains.sort_by_key(|c| std::cmp::Reverse(chain_weight(&data, c)));
    let mut witnesses = Vec::new();
    let mut d_lower = 0;
    let mut support = vec![];
    for chain in &chains {
        if let Some(w) = try_route(alg, &data.block_dims, chain, opts.nu, 0, opts)? {
            d_lower = chain_weight(&data, chain);
            support = chain.iter().copied().sorted().collect::<Vec<_>>();
            witnesses.push(w);
            break;
        }
    }
    let mut s_lower = 0;
    if d_lower > 0 {
        'outer: for j in (1..=par.s).rev() {
            let chains_here: Vec<Vec<usize>> = chains
                .iter()
                .filter(|c| chain_weight(&data, c) == d_lower)
                .map(|c| c.iter().copied().sorted().collect())
                .unique()
                .collect();
            for sup in std::iter::once(support.clone()).chain(chains_here) {
                for route in covering_routes(&sup, j + 1) {
                    if let Some(w) = try_route(alg, &data.block_dims, &route, opts.nu + j, j, opts)? {
                        s_lower = j;
                        witnesses.push(w);
                        break 'outer;
                    }
                }
            }
        }
    }
    let lower = ParValue { dim_ss: d_lower, s: s_lower };
    debug_assert!(lower <= par);
    Ok(KemerEstimate {
        d_lower,
        s_lower,
        par,
        status: if lower == par { KemerStatus::CertifiedBasic } else { KemerStatus::LowerBoundOnly },
        nu: opts.nu,
        witnesses,
        exhaustive: None,
    })
}

/// Decides whether every multilinear polynomial alternating in `nu`
/// disjoint sets of size `r`, in those variables and at most `extra_vars`
/// others, is an identity. Such polynomials are spanned by the
/// alternations of monomials, and a monomial may be taken with each set in
/// increasing order.
pub fn exhaustive_alternating_check(
    alg: &StructureAlgebra,
    nu: usize,
    r: usize,
    extra_vars: usize,
) -> Result<ExhaustiveCheck> {
    if nu == 0 || r == 0 {
        return Err(Error::InvalidArgument("nu and r must be positive".into()));
    }
    if nu * r + extra_vars > MAX_EXHAUSTIVE_DEGREE {
        return Err(Error::BudgetExceeded(format!(
            "exhaustive mode is limited to degree {MAX_EXHAUSTIVE_DEGREE} (nu * r + e = {})",
            nu * r + extra_vars
        )));
    }
    let sets: Vec<Vec<String>> = (1..=nu).map(|k| (1..=r).map(|i| format!("a_{{{k},{i}}}")).collect()).collect();
    let mut monomials = 0;
    for e in 0..=extra_vars {
        let mut vars: Vec<String> = sets.iter().flatten().cloned().collect();
        vars.extend((1..=e).map(|i| format!("z_{i}")));
        let n = vars.len();
        for order in (0..n).permutations(n) {
            let increasing = (0..nu).all(|k| {
                let pos: Vec<usize> = (0..r).map(|i| order.iter().position(|&v| v == k * r + i).unwrap()).collect();
                pos.windows(2).all(|w| w[0] < w[1])
            });
            if !increasing {
                continue;
            }
            monomials += 1;
            let word: Vec<&str> = order.iter().map(|&v| vars[v].as_str()).collect();
            let names: Vec<&str> = vars.iter().map(String::as_str).collect();
            let mut f = MultilinearPolynomial::new(&names, vec![(word, num_traits::One::one())])?;
            for s in &sets {
                f = f.alternate(s)?;
            }
            if !is_identity(&f, alg)? {
                return Ok(ExhaustiveCheck { nu, r, extra_vars, monomials, all_identities: false });
            }
        }
    }
    Ok(ExhaustiveCheck { nu, r, extra_vars, monomials, all_identities: true })
}

/// Lower bounds combined with the `Par` upper bound. With
/// `exhaustive_extra_vars = Some(e)` and an uncertified small-set size,
/// the next size is refuted or confirmed exhaustively when feasible.
pub fn kemer_index_estimate(
    alg: &StructureAlgebra,
    opts: &KemerOptions,
    exhaustive_extra_vars: Option<usize>,
) -> Result<KemerEstimate> {
    let mut est = kemer_lower_bound_search(alg, opts)?;
    if let Some(e) = exhaustive_extra_vars {
        if est.d_lower < est.par.dim_ss {
            match exhaustive_alternating_check(alg, opts.nu, est.d_lower + 1, e) {
                Ok(check) => est.exhaustive = Some(check),
                Err(Error::BudgetExceeded(_)) => {}
                Err(err) => return Err(err),
            }
        }
    }
    Ok(est)
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Basicness {
    CertifiedBasic {
        kappa: ParValue,
    },
    /// The search did not reach `Par`; this is not a proof of
    /// non-basicness.
    NotCertified {
        witnessed: ParValue,
        par: ParValue,
        details: String,
    },
}

pub fn basicness_check(alg: &StructureAlgebra) -> Result<Basicness> {
    basicness_check_with(alg, &KemerOptions::default(), Some(2))
}

pub fn basicness_check_with(
    alg: &StructureAlgebra,
    opts: &KemerOptions,
    exhaustive_extra_vars: Option<usize>,
) -> Result<Basicness> {
    let est = kemer_index_estimate(alg, opts, exhaustive_extra_vars)?;
    Ok(match est.status {
        KemerStatus::CertifiedBasic => Basicness::CertifiedBasic { kappa: est.par },
        KemerStatus::LowerBoundOnly => {
            let mut details = format!(
                "witnessed {} < Par {} with nu = {} and a budget of {} tuples per search",
                est.lower(),
                est.par,
                est.nu,
                opts.budget
            );
            if let Some(c) = &est.exhaustive {
                details += &format!(
                    "; every polynomial alternating in {} sets of size {} with at most {} extra variables is {}",
                    c.nu,
                    c.r,
                    c.extra_vars,
                    if c.all_identities { "an identity" } else { "not always an identity" }
                );
            }
            Basicness::NotCertified { witnessed: est.lower(), par: est.par, details }
        }
    })
}

/// The JSON report of the `kemer` command.
#[derive(Clone, Debug, Serialize)]
pub struct KemerReport {
    pub exp: usize,
    pub par: ParValue,
    pub kemer_lower: ParValue,
    pub status: KemerStatus,
    pub nu: usize,
    pub witnesses: Vec<KemerWitness>,
    pub exhaustive: Option<ExhaustiveCheck>,
    pub seed: u64,
    pub budget: u64,
}

pub fn kemer_report(
    alg: &StructureAlgebra,
    opts: &KemerOptions,
    exhaustive_extra_vars: Option<usize>,
) -> Result<KemerReport> {
    let data = alg.wedderburn_data_seeded(opts.split_seed, crate::algebra::DEFAULT_SPLIT_ATTEMPTS)?;
    let exp = exp_from(alg, &data)?;
    let est = kemer_index_estimate(alg, opts, exhaustive_extra_vars)?;
    Ok(KemerReport {
        exp,
        par: est.par,
        kemer_lower: est.lower(),
        status: est.status,
        nu: est.nu,
        witnesses: est.witnesses,
        exhaustive: est.exhaustive,
        seed: opts.seed,
        budget: opts.budget,
    })
}
