use picodim::linalg::Subspace;
use picodim::scalar::int;
use picodim::{ParValue, Scalar, StructureAlgebra};
use proptest::prelude::*;

const ZOO: [&str; 8] = ["F", "mat:2", "mat:3", "ut:1,1", "ut:1,2", "ut:1,1,1", "prod:ut:1,1*mat:2", "assoc:1,1;1;1"];

fn alg(spec: &str) -> StructureAlgebra {
    StructureAlgebra::from_builder_spec(spec).unwrap()
}

/// Number of words `u_0 b u_1 ... b u_m` with `m <= u` letters, each `u_i`
/// a matrix unit of one of the blocks.
fn word_count(blocks: &[usize], r: usize, u: usize) -> usize {
    let units: usize = blocks.iter().map(|d| d * d).sum();
    (0..=u).map(|m| units.pow(m as u32 + 1) * r.pow(m as u32)).sum()
}

#[test]
fn zoo_is_associative_with_consistent_radical() {
    for spec in ZOO {
        let a = alg(spec);
        a.check_associativity().unwrap();
        let j = a.radical();
        assert!(a.is_two_sided_ideal(&j).unwrap(), "{spec}");
        let data = a.wedderburn_data().unwrap();
        assert_eq!(data.dim_ss + j.dimension(), a.dim(), "{spec}");
        assert_eq!(data.block_dims.iter().map(|d| d * d).sum::<usize>(), data.dim_ss, "{spec}");
        let powers = a.subspace_powers(&j).unwrap();
        assert!(powers.last().unwrap().is_zero());
        assert_eq!(a.nilpotency_degree(&j).unwrap(), data.nildeg);
    }
}

#[test]
fn associated_algebras_match_word_enumeration() {
    for blocks in [vec![1], vec![1, 1], vec![2]] {
        for r in 1..=2 {
            for u in 1..=2 {
                let a = StructureAlgebra::associated(&blocks, r, u).unwrap();
                a.check_associativity().unwrap();
                assert_eq!(a.dim(), word_count(&blocks, r, u), "{blocks:?} r={r} u={u}");
                let data = a.wedderburn_data().unwrap();
                assert_eq!(data.nildeg, u + 1);
                let d: usize = blocks.iter().map(|d| d * d).sum();
                assert_eq!(data.par(), ParValue { dim_ss: d, s: u });
            }
        }
    }
}

#[test]
fn json_round_trip_keeps_invariants() {
    for spec in ZOO {
        let a = alg(spec);
        let b = StructureAlgebra::from_json(&a.to_json()).unwrap();
        assert_eq!(a.dim(), b.dim());
        assert_eq!(a.par().unwrap(), b.par().unwrap());
    }
}

fn small_vectors(dim: usize, count: usize) -> impl Strategy<Value = Vec<Vec<Scalar>>> {
    prop::collection::vec(prop::collection::vec((-2i64..=2).prop_map(int), dim), 0..=count)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn subspace_product_is_monotone(
        (spec, u, extra, v) in prop::sample::select(vec!["ut:1,2", "mat:2", "assoc:1;1;1"]).prop_flat_map(|spec| {
            let dim = alg(spec).dim();
            (Just(spec), small_vectors(dim, 3), small_vectors(dim, 2), small_vectors(dim, 3))
        }),
    ) {
        let a = alg(spec);
        let dim = a.dim();
        let small = Subspace::span(dim, u.clone()).unwrap();
        let big = Subspace::span(dim, u.into_iter().chain(extra)).unwrap();
        let v = Subspace::span(dim, v).unwrap();
        prop_assert!(small.is_subspace_of(&big));
        prop_assert!(a.subspace_product(&small, &v).unwrap().is_subspace_of(&a.subspace_product(&big, &v).unwrap()));
        prop_assert!(a.subspace_product(&v, &small).unwrap().is_subspace_of(&a.subspace_product(&v, &big).unwrap()));
    }

    #[test]
    fn par_order_is_total(p in prop::array::uniform3((0usize..6, 0usize..4))) {
        let [a, b, c] = p.map(|(d, s)| ParValue { dim_ss: d, s });
        prop_assert!(a <= b || b <= a);
        if a <= b && b <= a {
            prop_assert_eq!(a, b);
        }
        if a <= b && b <= c {
            prop_assert!(a <= c);
        }
        prop_assert_eq!(a < b, (a.dim_ss, a.s) < (b.dim_ss, b.s));
    }

    #[test]
    fn relabeling_preserves_invariants(spec in prop::sample::select(ZOO.to_vec()), perm_seed in any::<u64>()) {
        let a = alg(spec);
        let mut perm: Vec<usize> = (0..a.dim()).collect();
        let mut s = perm_seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let b = a.relabel(&perm).unwrap();
        b.check_associativity().unwrap();
        prop_assert_eq!(a.radical().dimension(), b.radical().dimension());
        prop_assert_eq!(a.par().unwrap(), b.par().unwrap());
    }
}
