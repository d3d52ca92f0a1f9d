//! Exact rational scalars, their modular images, and the small ring
//! abstraction shared by the exact and modular evaluation paths.

use std::fmt::Debug;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let bad = || Error::BadRational(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Scalar::new(num, den))
}

/// Always `"p/q"` with `q > 0`, in lowest terms.
pub fn format_scalar(x: &Scalar) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn bigint_mod(x: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    let r = x.mod_floor(&m);
    r.to_u64().expect("residue fits in u64")
}

/// Image of `x` in Z/p, or `None` when `p` divides the denominator.
pub fn reduce_mod(x: &Scalar, p: u64) -> Option<u64> {
    let den = bigint_mod(x.denom(), p);
    if den == 0 {
        return None;
    }
    let num = bigint_mod(x.numer(), p);
    Some(mul_mod(num, inv_mod(den, p), p))
}

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    if p <= 1 << 32 {
        a * b % p
    } else {
        ((a as u128 * b as u128) % p as u128) as u64
    }
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

/// Inverse modulo a prime via Fermat.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A random prime in `[2^31 - 2^24, 2^31)`.
pub fn random_prime_near_2_31<R: Rng>(rng: &mut R) -> u64 {
    const HI: u64 = 1 << 31;
    const LO: u64 = HI - (1 << 24);
    loop {
        let c = rng.random_range(LO..HI) | 1;
        if is_prime(c) {
            return c;
        }
    }
}

/// Coefficient rings used by the evaluation engines. Elements are plain
/// values; the ring object carries any context (the modulus).
pub trait CoeffRing: Sync + Send {
    type El: Clone + Send + Sync + PartialEq + Debug;

    fn zero(&self) -> Self::El;
    fn one(&self) -> Self::El;
    fn is_zero(&self, a: &Self::El) -> bool;
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn neg(&self, a: &Self::El) -> Self::El;
    /// `None` when the scalar has no image (denominator vanishes).
    fn image_of(&self, x: &Scalar) -> Option<Self::El>;

    fn add_assign(&self, a: &mut Self::El, b: &Self::El) {
        *a = self.add(a, b);
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Rationals;

impl CoeffRing for Rationals {
    type El = Scalar;

    fn zero(&self) -> Scalar {
        Scalar::zero()
    }
    fn one(&self) -> Scalar {
        Scalar::one()
    }
    fn is_zero(&self, a: &Scalar) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a + b
    }
    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a * b
    }
    fn neg(&self, a: &Scalar) -> Scalar {
        -a
    }
    fn image_of(&self, x: &Scalar) -> Option<Scalar> {
        Some(x.clone())
    }
    fn add_assign(&self, a: &mut Scalar, b: &Scalar) {
        *a += b;
    }
}

/// Z/p for a prime `p < 2^63`.
#[derive(Clone, Copy, Debug)]
pub struct PrimeField {
    pub p: u64,
}

/// The Mersenne prime 2^61 - 1, used for fast nonvanishing tests.
pub const SEARCH_PRIME: u64 = (1 << 61) - 1;

impl PrimeField {
    pub fn new(p: u64) -> Self {
        debug_assert!(p < (1 << 63));
        Self { p }
    }
}

impl CoeffRing for PrimeField {
    type El = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn image_of(&self, x: &Scalar) -> Option<u64> {
        reduce_mod(x, self.p)
    }
}

/// Exact square root of a perfect square.
pub fn exact_isqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r.saturating_sub(1)..=r + 1).find(|&c| c * c == n)
}

/// Converts a finite decimal (e.g. `"-1.5"`, `"4"`, `"3/2"`) into an exact rational.
pub fn parse_decimal(s: &str) -> Result<Scalar> {
    let t = s.trim();
    if t.contains('/') {
        return parse_scalar(t);
    }
    let bad = || Error::BadRational(s.to_string());
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{ip}{fp}");
    let num = BigInt::parse_bytes(if digits.is_empty() { b"0" } else { digits.as_bytes() }, 10).ok_or_else(bad)?;
    let den = num_traits::pow(BigInt::from(10), fp.len());
    let v = Scalar::new(num, den);
    Ok(if neg { -v } else { v })
}

pub fn scalar_to_f64(x: &Scalar) -> f64 {
    x.to_f64().unwrap_or_else(|| if x.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

pub fn is_integral(x: &Scalar) -> bool {
    x.denom().is_one()
}

pub fn sign_of(x: &Scalar) -> Sign {
    x.numer().sign()
}
