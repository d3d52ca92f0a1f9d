use num_integer::binomial;
use picodim::codim::{
    codim_sequence, codimension_exact_oracle, codimension_modular, CodimOptions, Method, ORACLE_BUDGET,
};
use picodim::StructureAlgebra;
use proptest::prelude::*;

// c_n(UT_2) = 2^(n-1)(n-2) + 2
fn ut2_closed_form(n: u64) -> u64 {
    ((1i64 << (n - 1)) * (n as i64 - 2) + 2) as u64
}

// c_n(M_2) = C(2n+2, n+1)/(n+2) - C(n,3) + 1 - 2^n
fn m2_closed_form(n: u64) -> u64 {
    let catalan = binomial(2 * n + 2, n + 1) / (n + 2);
    catalan + 1 - binomial(n, 3) - (1 << n)
}

fn alg(spec: &str) -> StructureAlgebra {
    StructureAlgebra::from_builder_spec(spec).unwrap()
}

#[test]
fn closed_forms_match_the_known_sequences() {
    let ut: Vec<u64> = (1..=9).map(ut2_closed_form).collect();
    assert_eq!(ut, vec![1, 2, 6, 18, 50, 130, 322, 770, 1794]);
    let m2: Vec<u64> = (1..=6).map(m2_closed_form).collect();
    assert_eq!(m2, vec![1, 2, 6, 23, 91, 346]);
}

#[test]
fn ut2_sequence() {
    let seq = codim_sequence(&alg("ut:1,1"), 8, &CodimOptions::default()).unwrap();
    let expected: Vec<u64> = (1..=8).map(ut2_closed_form).collect();
    assert_eq!(seq.values(), expected);
    assert!(seq.monotonicity.nondecreasing);
    for r in &seq.records {
        assert!(r.verified);
        assert_eq!(r.method, Method::Modular);
        let mut p = r.primes.clone();
        p.dedup();
        assert!(p.len() >= 2);
    }
}

#[test]
fn m2_sequence() {
    let seq = codim_sequence(&alg("mat:2"), 6, &CodimOptions::default()).unwrap();
    let expected: Vec<u64> = (1..=6).map(m2_closed_form).collect();
    assert_eq!(seq.values(), expected);
    assert!(seq.monotonicity.strictly_increasing);
}

#[test]
fn oracle_reproduces_closed_forms() {
    for n in 1..=5 {
        assert_eq!(codimension_exact_oracle(&alg("ut:1,1"), n, ORACLE_BUDGET).unwrap().c_n, ut2_closed_form(n as u64));
    }
    for n in 1..=4 {
        assert_eq!(codimension_exact_oracle(&alg("mat:2"), n, ORACLE_BUDGET).unwrap().c_n, m2_closed_form(n as u64));
    }
}

#[test]
fn product_is_subadditive() {
    let a = alg("ut:1,1");
    let b = alg("mat:2");
    let ab = alg("prod:ut:1,1*mat:2");
    let o = CodimOptions::default();
    for n in 1..=5 {
        let c = |x: &StructureAlgebra| codimension_modular(x, n, &o).unwrap().c_n;
        assert!(c(&ab) <= c(&a) + c(&b));
    }
}

#[test]
fn serial_and_parallel_agree() {
    let a = alg("mat:2");
    let o = CodimOptions { seed: 11, ..Default::default() };
    let par = codimension_modular(&a, 5, &o).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let ser = pool.install(|| codimension_modular(&a, 5, &o).unwrap());
    assert_eq!((par.c_n, par.primes), (ser.c_n, ser.primes));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn relabeling_preserves_rank(spec in prop::sample::select(vec!["ut:1,1", "mat:2", "assoc:1;1;1", "ut:1,2"]),
                                 seed in any::<u64>(), n in 1usize..=4) {
        let a = alg(spec);
        let mut perm: Vec<usize> = (0..a.dim()).collect();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let b = a.relabel(&perm).unwrap();
        let o = CodimOptions::default();
        let ca = codimension_modular(&a, n, &o).unwrap().c_n;
        prop_assert_eq!(ca, codimension_modular(&b, n, &o).unwrap().c_n);
        let fact: u64 = (1..=n as u64).product();
        prop_assert!(ca <= fact);
        prop_assert!(ca as u128 <= (a.dim() as u128).pow(n as u32 + 1));
    }
}
