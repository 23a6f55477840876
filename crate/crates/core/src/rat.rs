//! Arbitrary-precision rationals and small helpers used throughout the crate.
//!
//! `BigRational` already maintains the invariants the exact core needs:
//! always reduced to lowest terms, denominator strictly positive.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

/// Rational from an integer pair; panics on d = 0.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Rational from an integer.
pub fn rint(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

/// Integer value if the rational is one and fits in i64.
pub fn to_i64(r: &Rat) -> Option<i64> {
    if is_integer(r) {
        r.numer().to_i64()
    } else {
        None
    }
}

pub fn to_f64(r: &Rat) -> f64 {
    // `BigRational::to_f64` is exact-rounded for values in range.
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational from a finite f64.
pub fn from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

/// Parse "p/q", "p", or a plain decimal like "0.75" into a rational.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().ok()?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let num: BigInt = frac.parse().ok()?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = Rat::new(num, den);
        let int_part = Rat::from(int);
        return Some(if neg { int_part - frac_part } else { int_part + frac_part });
    }
    let n: BigInt = s.parse().ok()?;
    Some(Rat::from(n))
}

/// Canonical decimal-string form: "p/q" or "p".
pub fn rat_str(r: &Rat) -> String {
    if is_integer(r) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// r^k for integer k >= 0.
pub fn pow_u(r: &Rat, k: u32) -> Rat {
    if k == 0 {
        return Rat::one();
    }
    let mut acc = Rat::one();
    let mut base = r.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Falling factorial r (r-1) ... (r-k+1).
pub fn falling(r: &Rat, k: u32) -> Rat {
    let mut acc = Rat::one();
    for j in 0..k {
        acc *= r - rint(j as i64);
    }
    acc
}

/// Binomial coefficient C(n, k) as a rational.
pub fn binom(n: u32, k: u32) -> Rat {
    if k > n {
        return Rat::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..k.min(n - k) {
        num *= BigInt::from(n - j);
        den *= BigInt::from(j + 1);
    }
    Rat::new(num, den)
}

pub fn sign_of(r: &Rat) -> i8 {
    if r.is_zero() {
        0
    } else if r.numer().sign() == Sign::Plus {
        1
    } else {
        -1
    }
}

pub fn abs(r: &Rat) -> Rat {
    r.abs()
}

/// The rational with smallest denominator in the open interval (lo, hi),
/// found by the continued-fraction (Stern-Brocot) descent.
pub fn simplest_in_interval(lo: &Rat, hi: &Rat) -> Rat {
    assert!(lo < hi, "simplest_in_interval needs lo < hi");
    if lo < &Rat::zero() && hi > &Rat::zero() {
        return Rat::zero();
    }
    if hi <= &Rat::zero() {
        return -simplest_nonneg(&-hi.clone(), &-lo.clone());
    }
    simplest_nonneg(lo, hi)
}

fn simplest_nonneg(lo: &Rat, hi: &Rat) -> Rat {
    // Invariant: 0 <= lo < hi.
    let n = lo.floor();
    let next = &n + Rat::one();
    if next < *hi {
        // lo < n+1 always holds since n = floor(lo), so n+1 is inside.
        return next;
    }
    let a = lo - &n;
    let b = hi - &n;
    if a.is_zero() {
        // (n, n+b] with b <= 1: take n + 1/k for the smallest k with 1/k < b.
        let k = (Rat::one() / b).floor() + Rat::one();
        return n + Rat::one() / k;
    }
    // 0 < a < b <= 1: r in (a,b) iff 1/r in (1/b, 1/a); recurse on reciprocals.
    n + Rat::one() / simplest_nonneg(&(Rat::one() / b), &(Rat::one() / a))
}
