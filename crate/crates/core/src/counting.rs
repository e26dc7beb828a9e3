//! Exact combinatorial counts.
//!
//! Everything here returns arbitrary-precision integers; binomials near
//! `m = 60` already overflow 64 bits, and the closed-form checks need
//! exact integer equality. Only the final entropies become floating
//! point, via [`log2_big`].

use num::bigint::BigInt;
use num::traits::{One, Signed, ToPrimitive, Zero};

/// Binomial coefficient with the convention that out-of-range lower
/// indices give 0 (`k < 0` or `k > n`). A negative `n` also gives 0.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `n!` as a big integer.
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Number of ways to split `n` labeled items into `groups` labeled
/// groups of size `size` each plus one leftover group:
/// `n! / ((size!)^groups * (n - groups*size)!)`.
pub fn labeled_group_count(n: u64, size: u64, groups: u64) -> BigInt {
    assert!(groups * size <= n, "groups do not fit");
    let mut acc = BigInt::one();
    let mut rest = n;
    for _ in 0..groups {
        acc *= binomial(rest as i64, size as i64);
        rest -= size;
    }
    acc
}

/// Number of segment patterns for `m` messages, `k` labeled segments of
/// width `ell`: `m! / ((ell!)^k (m - k*ell)!)`.
pub fn pattern_count(m: u64, k: u64, ell: u64) -> BigInt {
    labeled_group_count(m, ell, k)
}

/// Number of `(q, S)` pairs with `|S| = s` and `q not in S`:
/// `m * C(m-1, s)`.
pub fn pair_count(m: u64, s: u64) -> BigInt {
    BigInt::from(m) * binomial(m as i64 - 1, s as i64)
}

/// Base-2 logarithm of a positive big integer, accurate to a few ulp
/// even when the value does not fit in an `f64`.
pub fn log2_big(n: &BigInt) -> f64 {
    assert!(n.is_positive(), "log2 of non-positive value");
    if let Some(v) = n.to_f64() {
        if v.is_finite() {
            return v.log2();
        }
    }
    // Scale down by a power of two and add the exponent back.
    let bits = n.bits();
    let shift = bits - 64;
    let top = (n >> shift).to_f64().expect("64-bit mantissa fits");
    top.log2() + shift as f64
}

/// `num / den` as `f64`, with both sides exact until the final division.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    num::BigRational::new(num.clone(), den.clone())
        .to_f64()
        .expect("finite ratio")
}
