//! Exact arithmetic: big rationals, dense polynomials in `t`, rational
//! functions in canonical form, and a Gaussian-elimination solver over any
//! exact field.

mod linear;
mod poly;
mod ratfun;

pub use linear::{solve_linear_system, Field};
pub use poly::Polynomial;
pub use ratfun::RationalFunction;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};

pub type BigRational = num_rational::BigRational;

/// Renders a rational as `num/den` in base 10; integers keep the `/1`.
pub fn rational_to_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| Error::parse("rational", text))?;
    let den: BigInt = den.parse().map_err(|_| Error::parse("rational", text))?;
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(BigRational::new(num, den))
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `b^e` for any integer exponent.
pub fn rat_pow(b: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(b.clone(), e as usize)
    } else {
        num_traits::pow(b.recip(), e.unsigned_abs() as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        assert_eq!(rational_to_string(&int(100)), "100/1");
        assert_eq!(rational_to_string(&rat(-6, 4)), "-3/2");
        assert_eq!(parse_rational("-3/2").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational("1/0"), Err(Error::DivisionByZero));
        assert!(parse_rational("x/2").is_err());
    }

    #[test]
    fn powers() {
        assert_eq!(rat_pow(&int(2), -3), rat(1, 8));
        assert_eq!(rat_pow(&rat(2, 3), 2), rat(4, 9));
        assert_eq!(rat_pow(&int(5), 0), int(1));
    }
}
