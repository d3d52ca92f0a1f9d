//! Acceptance criteria 1-10. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::Zero;
use picodim::asymptotics::{fit_t, regev_beckner_table, AsymptoticParams, DEFAULT_PRECISION};
use picodim::codim::{
    codim_sequence, codimension_exact_oracle, codimension_modular, CodimOptions, CodimRecord, Method, ORACLE_BUDGET,
};
use picodim::kemer::{basicness_check, exp_gz, Basicness};
use picodim::multilinear::{capelli, evaluate, find_nonzero_evaluation, is_identity, SearchStrategy};
use picodim::paths::{
    enumerate_path_structures, enumerate_symbols, monomial_class_bound, monomial_class_count, path_count_bound,
    upper_bound_series, MatrixCodims,
};
use picodim::scalar::parse_scalar;
use picodim::{ParValue, StructureAlgebra};
use statrs::function::gamma::ln_gamma;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    }};
}

fn alg(spec: &str) -> StructureAlgebra {
    StructureAlgebra::from_builder_spec(spec).unwrap()
}

fn golden(text: &str) -> Vec<u64> {
    text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().trim().parse().unwrap()).collect()
}

const GOLDEN_UT11: &str = include_str!("golden/codim_ut11.csv");
const GOLDEN_M2: &str = include_str!("golden/codim_m2.csv");
const GOLDEN_SLOPES: &str = include_str!("../../core/tests/golden/ut2_successive_slopes.txt");

fn capelli_facts() -> Outcome {
    let m2 = alg("mat:2");
    ensure!(is_identity(&capelli(5).unwrap(), &m2).unwrap(), "cap_5 is not an identity of M2");
    let cap4 = capelli(4).unwrap();
    let w = find_nonzero_evaluation(&cap4, &m2, SearchStrategy::Structured { budget: None })
        .unwrap()
        .ok_or("no nonzero evaluation of cap_4 on M2")?;
    let again = evaluate(&cap4, &m2, &w.assignment_vectors(&m2)).unwrap();
    ensure!(again == w.value, "witness does not re-evaluate to its stored value");
    let support: Vec<&String> =
        m2.basis_labels().iter().zip(&w.value).filter(|(_, c)| !c.is_zero()).map(|(l, _)| l).collect();
    ensure!(support.len() == 1 && (support[0] == "e11" || support[0] == "e22"), "value support {support:?}");
    Ok(())
}

fn exponents() -> Outcome {
    for d in 1..=3 {
        let e = exp_gz(&alg(&format!("mat:{d}"))).unwrap();
        ensure!(e == d * d, "exp(M{d}) = {e}");
    }
    for (a, b) in [(1, 1), (1, 2), (2, 2)] {
        let e = exp_gz(&alg(&format!("ut:{a},{b}"))).unwrap();
        ensure!(e == a * a + b * b, "exp(UT({a},{b})) = {e}");
    }
    Ok(())
}

fn certification() -> Outcome {
    for (spec, d, s) in [("mat:2", 4, 0), ("ut:1,1", 2, 1), ("ut:1,2", 5, 1)] {
        match basicness_check(&alg(spec)).unwrap() {
            Basicness::CertifiedBasic { kappa } => {
                ensure!(kappa == ParValue { dim_ss: d, s }, "{spec}: kappa {kappa}")
            }
            other => return Err(format!("{spec}: {other:?}")),
        }
    }
    match basicness_check(&alg("prod:F*F")).unwrap() {
        Basicness::NotCertified { witnessed, par, .. } => {
            ensure!(witnessed == ParValue { dim_ss: 1, s: 0 }, "F x F witnessed {witnessed}");
            ensure!(par == ParValue { dim_ss: 2, s: 0 }, "F x F Par {par}");
        }
        other => return Err(format!("F x F: {other:?}")),
    }
    Ok(())
}

fn associated_algebras() -> Outcome {
    for blocks in [vec![1], vec![1, 1], vec![2]] {
        let units: usize = blocks.iter().map(|d| d * d).sum();
        for r in 1..=2usize {
            for u in 1..=2usize {
                let a = StructureAlgebra::associated(&blocks, r, u).unwrap();
                let tag = format!("{blocks:?} r={r} u={u}");
                ensure!(a.check_associativity().is_ok(), "{tag}: not associative");
                let words: usize = (0..=u).map(|m| units.pow(m as u32 + 1) * r.pow(m as u32)).sum();
                ensure!(a.dim() == words, "{tag}: dim {} vs {words}", a.dim());
                let data = a.wedderburn_data().unwrap();
                ensure!(data.nildeg == u + 1, "{tag}: nildeg {}", data.nildeg);
                ensure!(data.par() == ParValue { dim_ss: units, s: u }, "{tag}: Par {}", data.par());
            }
        }
    }
    Ok(())
}

fn oracle_equivalence() -> Outcome {
    let opts = CodimOptions::default();
    for spec in ["F", "prod:F*F", "ut:1,1", "mat:2"] {
        let a = alg(spec);
        for n in 1..=5 {
            let m = codimension_modular(&a, n, &opts).unwrap();
            let o = codimension_exact_oracle(&a, n, ORACLE_BUDGET).unwrap();
            ensure!(m.method == Method::Modular && o.method == Method::Exact, "{spec} n={n}: methods");
            ensure!(m.c_n == o.c_n, "{spec} n={n}: modular {} vs exact {}", m.c_n, o.c_n);
            ensure!(m.verified && m.primes.len() >= 2, "{spec} n={n}: not two-prime verified");
        }
    }
    for (spec, text) in [("ut:1,1", GOLDEN_UT11), ("mat:2", GOLDEN_M2)] {
        let want = golden(text);
        let got = codim_sequence(&alg(spec), want.len(), &opts).unwrap().values();
        ensure!(got == want, "{spec}: {got:?} vs golden {want:?}");
    }
    Ok(())
}

fn codim_properties() -> Outcome {
    let opts = CodimOptions::default();
    let f = codim_sequence(&alg("F"), 8, &opts).unwrap();
    ensure!(f.values() == vec![1; 8], "c_n(F) = {:?}", f.values());
    for (a, b, max_n) in [("F", "F", 7), ("F", "ut:1,1", 7), ("ut:1,1", "mat:2", 5), ("ut:1,1", "ut:1,2", 5)] {
        let ca = codim_sequence(&alg(a), max_n, &opts).unwrap().values();
        let cb = codim_sequence(&alg(b), max_n, &opts).unwrap().values();
        let cp = codim_sequence(&alg(&format!("prod:{a}*{b}")), max_n, &opts).unwrap().values();
        for n in 0..max_n {
            ensure!(cp[n] <= ca[n] + cb[n], "{a} x {b} at n={}: {} > {} + {}", n + 1, cp[n], ca[n], cb[n]);
        }
    }
    for (spec, n) in [("ut:1,1", 9), ("mat:2", 6)] {
        let seq = codim_sequence(&alg(spec), n, &opts).unwrap();
        ensure!(seq.monotonicity.nondecreasing, "{spec}: not eventually nondecreasing");
    }
    Ok(())
}

/// `log(LHS / RHS)` for two components from log-gamma terms.
fn log_ratio_oracle(k: [f64; 2], r: [f64; 2], n: usize) -> f64 {
    let nf = n as f64;
    let logs: Vec<f64> = (1..n)
        .map(|a| {
            let (a, b) = (a as f64, (n - a) as f64);
            ln_gamma(nf + 1.0) - ln_gamma(a + 1.0) - ln_gamma(b + 1.0)
                + a * k[0].ln()
                + b * k[1].ln()
                + r[0] * a.ln()
                + r[1] * b.ln()
        })
        .collect();
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lhs = m + logs.iter().map(|x| (x - m).exp()).sum::<f64>().ln();
    let kt = k[0] + k[1];
    let rhs = r[0] * (k[0] / kt).ln() + r[1] * (k[1] / kt).ln() + (r[0] + r[1]) * nf.ln() + nf * kt.ln();
    lhs - rhs
}

fn regev_beckner() -> Outcome {
    // final-gap thresholds: oracle gap at n = 400 rounded up to two digits
    let samples = [
        (["1", "4"], ["0", "-3/2"], [1.0, 4.0], [0.0, -1.5], 1.2e-3),
        (["1", "1"], ["-1/2", "-1/2"], [1.0, 1.0], [-0.5, -0.5], 1.3e-3),
    ];
    let ns = [50, 100, 200, 400];
    for (ks, rs, kf, rf, threshold) in samples {
        let parse = |v: [&str; 2]| v.iter().map(|s| parse_scalar(s).unwrap()).collect();
        let p = AsymptoticParams::new(parse(ks), parse(rs)).unwrap();
        let rows = regev_beckner_table(&p, &ns, DEFAULT_PRECISION).unwrap();
        let gaps: Vec<f64> = rows.iter().map(|r| (r.ratio - 1.0).abs()).collect();
        ensure!(gaps.windows(2).all(|w| w[1] < w[0]), "{ks:?}: gaps {gaps:?} not decreasing");
        ensure!(gaps[3] < threshold, "{ks:?}: final gap {} >= {threshold}", gaps[3]);
        for (row, &n) in rows.iter().zip(&ns) {
            let oracle = log_ratio_oracle(kf, rf, n).exp();
            ensure!((row.ratio - oracle).abs() < 1e-9, "{ks:?} n={n}: {} vs oracle {oracle}", row.ratio);
        }
    }
    Ok(())
}

fn fit_sanity() -> Outcome {
    // integer C and t keep c_n = C n^t d^n exact
    for (c, t, d) in [(3u64, 1u32, 2u64), (1, 2, 3), (5, 0, 4), (2, 3, 1)] {
        let recs: Vec<CodimRecord> = (4..=12)
            .map(|n| {
                let v = c * (n as u64).pow(t) * d.pow(n as u32);
                CodimRecord { n, c_n: v, method: Method::Exact, primes: vec![], verified: true, seconds: 0.0 }
            })
            .collect();
        let f = fit_t(&recs, d, Some(4..=12), None).unwrap();
        ensure!((f.t_hat - t as f64).abs() < 1e-9, "synthetic t={t}: t_hat {}", f.t_hat);
        ensure!((f.c_hat - c as f64).abs() < 1e-9 * c as f64, "synthetic C={c}: c_hat {}", f.c_hat);
    }
    let values = golden(GOLDEN_UT11);
    let recs: Vec<CodimRecord> = values
        .iter()
        .enumerate()
        .map(|(i, &c)| CodimRecord {
            n: i + 1,
            c_n: c,
            method: Method::Modular,
            primes: vec![],
            verified: true,
            seconds: 0.0,
        })
        .collect();
    let f = fit_t(&recs, 2, Some(5..=9), Some(parse_scalar("1").unwrap())).unwrap();
    let frozen: Vec<f64> = GOLDEN_SLOPES.lines().map(|l| l.trim().parse().unwrap()).collect();
    let slopes: Vec<f64> = f.successive.iter().map(|s| s.t_hat).collect();
    ensure!(slopes == frozen[..4], "slopes {slopes:?} vs {:?}", &frozen[..4]);
    ensure!(f.bracket == Some([frozen[4], frozen[5]]), "bracket {:?}", f.bracket);
    ensure!(f.bracket_contains_predicted == Some(false), "bracket/prediction flag changed");
    ensure!(f.approaching_predicted == Some(true), "approach flag changed");
    Ok(())
}

fn path_bounds() -> Outcome {
    for blocks in [vec![1], vec![1, 1], vec![2]] {
        for r in 1..=2 {
            for u in 1..=2 {
                let a = StructureAlgebra::associated(&blocks, r, u).unwrap();
                let syms = enumerate_symbols(&a).unwrap();
                for s in 0..=u {
                    let all = enumerate_path_structures(&a, s).unwrap();
                    let bound = path_count_bound(syms.symbols.len(), s);
                    ensure!(BigUint::from(all.len()) <= bound, "{blocks:?} r={r} u={u} s={s}: {} > {bound}", all.len());
                    ensure!(all.iter().all(|p| p.satisfies_axioms(s)), "{blocks:?} r={r} u={u}: axiom violated");
                }
            }
        }
    }
    fn compositions(n: usize, q: usize, out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>) {
        if cur.len() + 1 == q {
            cur.push(n);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for m in 0..=n {
            cur.push(m);
            compositions(n - m, q, out, cur);
            cur.pop();
        }
    }
    for n in 1..=10 {
        for s_prime in 0..=n.min(4) {
            for q in 1..=3 {
                let mut parts = Vec::new();
                compositions(n - s_prime, q, &mut parts, &mut Vec::new());
                for p in parts {
                    let lhs = monomial_class_count(n, &p, s_prime).unwrap();
                    let rhs = monomial_class_bound(n, &p, s_prime).unwrap();
                    ensure!(lhs <= rhs, "n={n} s'={s_prime} {p:?}: {lhs} > {rhs}");
                }
            }
        }
    }
    let acal = StructureAlgebra::associated(&[1, 1], 1, 1).unwrap();
    let codims = MatrixCodims::new();
    for (i, c) in golden(GOLDEN_UT11).into_iter().take(6).enumerate() {
        let series = upper_bound_series(&acal, i + 1, &codims).unwrap();
        ensure!(series >= BigUint::from(c), "n={}: series {series} < c_n {c}", i + 1);
    }
    Ok(())
}

fn run_cli(args: &[&str], workers: usize) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_picodim"))
        .args(args)
        .args(["--workers", &workers.to_string()])
        .output()
        .expect("run picodim");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 4] = [
        &["codim", "--builder", "ut:1,1", "--n", "8", "--seed", "11"],
        &["codim", "--builder", "mat:2", "--n", "5", "--format", "csv", "--seed", "11"],
        &["conjecture", "--builder", "ut:1,1", "--n", "8", "--seed", "5"],
        &["conjecture", "--builder", "ut:1,2", "--n", "5", "--format", "csv"],
    ];
    for args in runs {
        let outputs: Vec<Vec<u8>> = [1, 4, 8].iter().map(|&w| run_cli(args, w)).collect();
        ensure!(!outputs[0].is_empty(), "{args:?}: empty output");
        ensure!(outputs.windows(2).all(|w| w[0] == w[1]), "{args:?}: outputs differ across worker counts");
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Capelli facts on M2", capelli_facts),
        ("exponents of M_d and UT(d1,d2)", exponents),
        ("Par/Kemer certification", certification),
        ("associated algebras", associated_algebras),
        ("codimension oracle equivalence and goldens", oracle_equivalence),
        ("codimension properties", codim_properties),
        ("Regev-Beckner convergence", regev_beckner),
        ("fit sanity and frozen UT(1,1) slopes", fit_sanity),
        ("path bounds", path_bounds),
        ("determinism across worker counts", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = format!("{}", i + 1);
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {id:>2} PASS  {name} ({secs:.1}s)"),
            Err(why) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name} ({secs:.1}s): {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
