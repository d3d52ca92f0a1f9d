use std::collections::BTreeSet;

use num_traits::Zero;
use picodim::kemer::{
    basicness_check, exp_gz, kemer_index_estimate, kemer_lower_bound_search, Basicness, KemerOptions, KemerStatus,
};
use picodim::codim::{codim_sequence, CodimOptions};
use picodim::multilinear::{evaluate, is_identity, MultilinearPolynomial};
use picodim::{ParValue, StructureAlgebra};

fn alg(spec: &str) -> StructureAlgebra {
    StructureAlgebra::from_builder_spec(spec).unwrap()
}

fn par(d: usize, s: usize) -> ParValue {
    ParValue { dim_ss: d, s }
}

#[test]
fn exponents() {
    for d in 1..=3 {
        assert_eq!(exp_gz(&alg(&format!("mat:{d}"))).unwrap(), d * d);
    }
    for (d1, d2) in [(1, 1), (1, 2), (2, 2)] {
        assert_eq!(exp_gz(&alg(&format!("ut:{d1},{d2}"))).unwrap(), d1 * d1 + d2 * d2);
    }
    assert_eq!(exp_gz(&alg("prod:F*F")).unwrap(), 1);
}

#[test]
fn exponent_of_product_is_the_max() {
    for (a, b) in [("ut:1,1", "mat:2"), ("F", "ut:1,2"), ("assoc:1,1;1;1", "F")] {
        let p = alg(&format!("prod:{a}*{b}"));
        assert_eq!(exp_gz(&p).unwrap(), exp_gz(&alg(a)).unwrap().max(exp_gz(&alg(b)).unwrap()));
    }
}

#[test]
fn certified_algebras() {
    for (spec, expected) in [("mat:2", par(4, 0)), ("ut:1,1", par(2, 1)), ("ut:1,2", par(5, 1)), ("mat:3", par(9, 0))] {
        match basicness_check(&alg(spec)).unwrap() {
            Basicness::CertifiedBasic { kappa } => assert_eq!(kappa, expected, "{spec}"),
            other => panic!("{spec}: {other:?}"),
        }
    }
}

#[test]
fn ut_kemer_index_is_dim_and_q_minus_one() {
    let est = kemer_lower_bound_search(&alg("ut:1,1,1"), &KemerOptions::default()).unwrap();
    assert_eq!((est.d_lower, est.s_lower), (3, 2));
    assert_eq!(est.status, KemerStatus::CertifiedBasic);
}

#[test]
fn product_of_fields_is_not_certified() {
    let a = alg("prod:F*F");
    let est = kemer_index_estimate(&a, &KemerOptions::default(), Some(2)).unwrap();
    assert_eq!(est.lower(), par(1, 0));
    assert_eq!(est.par, par(2, 0));
    assert_eq!(est.status, KemerStatus::LowerBoundOnly);
    let check = est.exhaustive.unwrap();
    assert!(check.all_identities);
    assert_eq!((check.r, check.extra_vars), (2, 2));
    assert!(matches!(basicness_check(&a).unwrap(), Basicness::NotCertified { .. }));
}

#[test]
fn witnesses_are_valid() {
    for spec in ["mat:2", "ut:1,2", "assoc:1,1;1;1"] {
        let a = alg(spec);
        let est = kemer_lower_bound_search(&a, &KemerOptions::default()).unwrap();
        assert!(est.lower() <= est.par);
        for w in &est.witnesses {
            let v = evaluate(&w.polynomial, &a, &w.witness.assignment_vectors(&a)).unwrap();
            assert!(v.iter().any(|x| !x.is_zero()));
            assert_eq!(v, w.witness.value);
            let mut seen = BTreeSet::new();
            for s in w.shape.small.iter().chain(&w.shape.big) {
                for x in s {
                    assert!(seen.insert(x.clone()));
                }
            }
            assert!(w.shape.small.iter().all(|s| s.len() == est.d_lower));
            assert!(w.shape.big.iter().all(|s| s.len() == est.d_lower + 1));
            assert_eq!(w.shape.small.len(), est.nu);
        }
    }
}

#[test]
fn more_small_sets_never_raise_the_bound() {
    for spec in ["ut:1,1", "mat:2", "prod:F*F"] {
        let a = alg(spec);
        let d = |nu| kemer_lower_bound_search(&a, &KemerOptions { nu, ..Default::default() }).unwrap().d_lower;
        assert!(d(1) >= d(2));
        assert!(d(2) >= d(3));
    }
}

#[test]
fn associated_algebras() {
    // basicness for u >= q is observed here, not assumed
    let a = alg("assoc:1,1;1;1");
    let est = kemer_lower_bound_search(&a, &KemerOptions::default()).unwrap();
    assert_eq!(est.par, par(2, 1));
    assert_eq!(est.lower(), par(2, 1));
}

#[test]
fn commutative_associated_algebra_is_not_basic() {
    // F[b]/(b^2) is commutative, so it has the identities and codimensions of F
    let a = alg("assoc:1;1;1");
    let comm = MultilinearPolynomial::monomial(&["x", "y"]).unwrap().alternate(&["x", "y"]).unwrap();
    assert!(is_identity(&comm, &a).unwrap());
    let seq = codim_sequence(&a, 6, &CodimOptions::default()).unwrap();
    assert_eq!(seq.values(), vec![1; 6]);
    match basicness_check(&a).unwrap() {
        Basicness::NotCertified { witnessed, par: p, .. } => {
            assert_eq!(witnessed, par(1, 0));
            assert_eq!(p, par(1, 1));
        }
        other => panic!("{other:?}"),
    }
}
