use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exactnum::{rational_to_string, BigRational};

/// Certified bounds `[lower, upper] * 2^-frac_bits` around a real number.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Enclosure {
    lower: BigInt,
    upper: BigInt,
    frac_bits: u32,
}

pub(crate) fn floor_div(n: &BigInt, d: &BigInt) -> BigInt {
    n.div_floor(d)
}

pub(crate) fn ceil_div(n: &BigInt, d: &BigInt) -> BigInt {
    -((-n).div_floor(d))
}

impl Enclosure {
    /// Scaled bounds; panics if `lower > upper`.
    pub fn new(lower: BigInt, upper: BigInt, frac_bits: u32) -> Self {
        assert!(lower <= upper, "enclosure bounds out of order");
        Enclosure {
            lower,
            upper,
            frac_bits,
        }
    }

    /// The tightest enclosure of `q` on the `2^-frac_bits` grid.
    pub fn of_rational(q: &BigRational, frac_bits: u32) -> Self {
        Enclosure::between(q, q, frac_bits)
    }

    /// Outward rounding of the exact interval `[lo, hi]`.
    pub fn between(lo: &BigRational, hi: &BigRational, frac_bits: u32) -> Self {
        let scale = BigInt::one() << frac_bits;
        let lower = floor_div(&(lo.numer() * &scale), lo.denom());
        let upper = ceil_div(&(hi.numer() * &scale), hi.denom());
        Enclosure::new(lower, upper, frac_bits)
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn lower_scaled(&self) -> &BigInt {
        &self.lower
    }

    pub fn upper_scaled(&self) -> &BigInt {
        &self.upper
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(self.lower.clone(), BigInt::one() << self.frac_bits)
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new(self.upper.clone(), BigInt::one() << self.frac_bits)
    }

    pub fn width(&self) -> BigRational {
        self.upper() - self.lower()
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lower() <= x && x <= &self.upper()
    }

    /// True when `other` lies inside `self`.
    pub fn contains_enclosure(&self, other: &Enclosure) -> bool {
        self.lower() <= other.lower() && other.upper() <= self.upper()
    }

    /// Rounds outward to fewer fractional bits.
    pub fn coarsen(&self, frac_bits: u32) -> Enclosure {
        match frac_bits.cmp(&self.frac_bits) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let shift = frac_bits - self.frac_bits;
                Enclosure::new(&self.lower << shift, &self.upper << shift, frac_bits)
            }
            Ordering::Less => {
                let d = BigInt::one() << (self.frac_bits - frac_bits);
                Enclosure::new(
                    floor_div(&self.lower, &d),
                    ceil_div(&self.upper, &d),
                    frac_bits,
                )
            }
        }
    }

    /// Interval sum; both operands must share `frac_bits`.
    pub fn add(&self, other: &Enclosure) -> Enclosure {
        assert_eq!(self.frac_bits, other.frac_bits);
        Enclosure::new(
            &self.lower + &other.lower,
            &self.upper + &other.upper,
            self.frac_bits,
        )
    }

    /// Multiplication by a nonnegative integer.
    pub fn scale(&self, factor: &BigUint) -> Enclosure {
        let f = BigInt::from(factor.clone());
        Enclosure::new(&self.lower * &f, &self.upper * &f, self.frac_bits)
    }

    /// Digits shared by the decimal expansions of both bounds (each
    /// truncated to about `frac_bits * log10(2)` places), and how many of
    /// them follow the decimal point.
    pub fn shared_decimal(&self) -> (String, usize) {
        let places = (self.frac_bits as u64 * 30103 / 100000) as usize;
        let lo = decimal_truncated(&self.lower(), places);
        let hi = decimal_truncated(&self.upper(), places);
        let common: String = lo
            .chars()
            .zip(hi.chars())
            .take_while(|(a, b)| a == b)
            .map(|(a, _)| a)
            .collect();
        let Some(dot) = common.find('.') else {
            // the integer parts disagree; only an exactly shared integer part is reported
            if lo == hi {
                return (lo, 0);
            }
            return (String::new(), 0);
        };
        let shown = common.trim_end_matches('.').to_string();
        let digits = shown.len().saturating_sub(dot + 1);
        (shown, digits)
    }

    /// `{"lower": "n/d", "upper": "n/d", "decimal": "...", "certified_digits": n}`.
    pub fn to_json(&self) -> serde_json::Value {
        let (decimal, certified_digits) = self.shared_decimal();
        serde_json::json!({
            "lower": rational_to_string(&self.lower()),
            "upper": rational_to_string(&self.upper()),
            "decimal": decimal,
            "certified_digits": certified_digits,
        })
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (decimal, _) = self.shared_decimal();
        write!(f, "[{}, {}] ~ {}", self.lower(), self.upper(), decimal)
    }
}

/// Decimal expansion of `q` truncated toward zero after `places` digits.
pub fn decimal_truncated(q: &BigRational, places: usize) -> String {
    let neg = q.is_negative();
    let q = q.abs();
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = (q.numer() * &scale) / q.denom();
    let (int_part, frac_part) = scaled.div_rem(&scale);
    let mut out = String::new();
    if neg && !scaled.is_zero() {
        out.push('-');
    }
    out.push_str(&int_part.to_string());
    if places > 0 {
        out.push('.');
        let frac = frac_part.to_string();
        out.push_str(&"0".repeat(places - frac.len()));
        out.push_str(&frac);
    }
    out
}
