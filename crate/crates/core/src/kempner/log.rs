//! Certified enclosures of `log(b)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Enclosure;
use crate::error::{Error, Result};
use crate::exactnum::BigRational;

/// `[S, S + R]` around `2 atanh(x) = log((1 + x) / (1 - x))` for `0 <= x < 1`,
/// with the remainder `R < 2^-bits`.
///
/// After `N` terms the tail `2 sum_(n >= N) x^(2n+1) / (2n+1)` is at most
/// `2 x^(2N+1) / ((2N+1)(1 - x^2))`.
fn twice_atanh(x: &BigRational, bits: u32) -> (BigRational, BigRational) {
    let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
    let x2 = x * x;
    let one_minus_x2 = BigRational::one() - &x2;
    let two = BigRational::from_integer(2.into());
    let mut sum = BigRational::zero();
    let mut power = x.clone();
    let mut n: u64 = 0;
    loop {
        let odd = BigRational::from_integer((2 * n + 1).into());
        let tail = &two * &power / (&odd * &one_minus_x2);
        if tail < target {
            return (sum, tail);
        }
        sum += &two * &power / odd;
        power *= &x2;
        n += 1;
    }
}

/// `log(b)` with width at most `2^(2 - frac_bits)`.
///
/// Writes `b = 2^e y` with `1 <= y < 2`, so both series run at arguments
/// no larger than `1/3`: `log 2 = 2 atanh(1/3)` and
/// `log y = 2 atanh((b - 2^e) / (b + 2^e))`.
pub fn log_base_enclosure(base: u32, frac_bits: u32) -> Result<Enclosure> {
    if base < 2 {
        return Err(Error::InvalidBase(base as u64));
    }
    let e = 31 - base.leading_zeros();
    let pow2 = 1u64 << e;
    let bits = frac_bits + 8;
    let (log2, r2) = twice_atanh(&BigRational::new(1.into(), 3.into()), bits);
    let y = BigRational::new((base as u64 - pow2).into(), (base as u64 + pow2).into());
    let (logy, ry) = twice_atanh(&y, bits);
    let e = BigRational::from_integer(e.into());
    let lo = &e * &log2 + &logy;
    let hi = &e * (&log2 + &r2) + &logy + &ry;
    Ok(Enclosure::between(&lo, &hi, frac_bits))
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        while n.is_multiple_of(f) {
            out.push(f);
            n /= f;
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `log 2 = sum_(n >= 1) 1 / (n 2^n)`, tail after `N` terms below `1 / ((N+1) 2^N)`.
fn log2_mercator(bits: u32) -> (BigRational, BigRational) {
    let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
    let mut sum = BigRational::zero();
    let mut n: u32 = 1;
    loop {
        let tail = BigRational::new(BigInt::one(), BigInt::from(n) << (n - 1));
        if tail < target {
            return (sum, tail);
        }
        sum += BigRational::new(BigInt::one(), BigInt::from(n) << n);
        n += 1;
    }
}

/// A second, independent enclosure of `log(b)`: the sum over the prime
/// factors `q` of `b`, with `log 2` from the Mercator series and odd primes
/// from `2 atanh((q - 1) / (q + 1))` directly. Slow for large prime factors.
pub fn log_base_enclosure_by_factors(base: u32, frac_bits: u32) -> Result<Enclosure> {
    if base < 2 {
        return Err(Error::InvalidBase(base as u64));
    }
    let bits = frac_bits + 8;
    let mut lo = BigRational::zero();
    let mut hi = BigRational::zero();
    for q in prime_factors(base) {
        let (s, r) = if q == 2 {
            log2_mercator(bits)
        } else {
            twice_atanh(&BigRational::new((q - 1).into(), (q + 1).into()), bits)
        };
        hi += &s + &r;
        lo += s;
    }
    Ok(Enclosure::between(&lo, &hi, frac_bits))
}
