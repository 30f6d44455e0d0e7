use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{BigRational, Polynomial};
use crate::error::{Error, Result};

/// Quotient of two polynomials in `t`, kept in a canonical form.
///
/// Canonical form: numerator and denominator are coprime, all coefficients
/// are integers with joint content 1, and the lowest nonzero coefficient of
/// the denominator (its constant term whenever the function is expandable at
/// 0) is positive. Two rational functions are equal iff their canonical forms
/// are structurally identical. Zero is `0 / 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    pub fn from_poly(p: Polynomial) -> Self {
        Self::normalized(p, Polynomial::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn zero() -> Self {
        RationalFunction {
            num: Polynomial::zero(),
            den: Polynomial::one(),
        }
    }

    pub fn one() -> Self {
        RationalFunction {
            num: Polynomial::one(),
            den: Polynomial::one(),
        }
    }

    fn normalized(num: Polynomial, den: Polynomial) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (
                num.div_rem(&g).expect("gcd is nonzero").0,
                den.div_rem(&g).expect("gcd is nonzero").0,
            )
        };
        let lcm = num.denominator_lcm().lcm(&den.denominator_lcm());
        let scale = BigRational::from_integer(lcm);
        num = num.scale(&scale);
        den = den.scale(&scale);
        let content: BigInt = num.integer_content().gcd(&den.integer_content());
        let mut unit = BigRational::new(BigInt::one(), content);
        let low = den.order().expect("denominator is nonzero");
        if den.coeffs()[low].is_negative() {
            unit = -unit;
        }
        if !unit.is_one() {
            num = num.scale(&unit);
            den = den.scale(&unit);
        }
        RationalFunction { num, den }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// A power series at 0 exists iff the reduced denominator has a nonzero constant term.
    pub fn is_expandable(&self) -> bool {
        !self.den.coeff(0).is_zero()
    }

    /// Multiplication by `t^n` for any integer `n`.
    pub fn mul_t_power(&self, n: i64) -> Self {
        if n >= 0 {
            Self::normalized(self.num.shift(n as usize), self.den.clone())
        } else {
            Self::normalized(self.num.clone(), self.den.shift(n.unsigned_abs() as usize))
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        RationalFunction {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    /// Exact value at `q`; an error if `q` is a pole.
    pub fn eval(&self, q: &BigRational) -> Result<BigRational> {
        let d = self.den.eval(q);
        if d.is_zero() {
            return Err(Error::Pole(super::rational_to_string(q)));
        }
        Ok(self.num.eval(q) / d)
    }

    /// Taylor coefficients at 0 of `t^0 .. t^order`, by the division recurrence
    /// `den_0 c_n = num_n - sum_{i >= 1} den_i c_{n-i}`.
    pub fn series(&self, order: usize) -> Result<Vec<BigRational>> {
        if !self.is_expandable() {
            return Err(Error::NotExpandable);
        }
        let den = self.den.coeffs();
        let d0 = &den[0];
        let mut out: Vec<BigRational> = Vec::with_capacity(order + 1);
        for n in 0..=order {
            let mut c = self.num.coeff(n);
            for i in 1..den.len().min(n + 1) {
                c -= &den[i] * &out[n - i];
            }
            out.push(c / d0);
        }
        Ok(out)
    }

    /// Series coefficients as integers; `None` if one of them is not an integer.
    pub fn integer_series(&self, order: usize) -> Result<Option<Vec<BigInt>>> {
        Ok(self
            .series(order)?
            .into_iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect())
    }

    /// `{"num": [...], "den": [...]}` with integer-string coefficients, index = degree.
    pub fn to_json(&self) -> serde_json::Value {
        let ints = |p: &Polynomial| p.integer_strings().expect("canonical form is integral");
        serde_json::json!({ "num": ints(&self.num), "den": ints(&self.den) })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let num = Polynomial::from_json(&value["num"])?;
        let den = Polynomial::from_json(&value["den"])?;
        RationalFunction::new(num, den)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Polynomial::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl<'a> Add<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;

    fn add(self, rhs: &'a RationalFunction) -> RationalFunction {
        if self.den == rhs.den {
            return RationalFunction::normalized(&self.num + &rhs.num, self.den.clone());
        }
        RationalFunction::normalized(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl<'a> Sub<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;

    fn sub(self, rhs: &'a RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;

    fn mul(self, rhs: &'a RationalFunction) -> RationalFunction {
        RationalFunction::normalized(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

/// Panics on division by the zero function; use [`RationalFunction::recip`] to get an error instead.
impl<'a> Div<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;

    fn div(self, rhs: &'a RationalFunction) -> RationalFunction {
        assert!(!rhs.is_zero(), "division by the zero rational function");
        RationalFunction::normalized(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;

    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Zero for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero()
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RationalFunction {
    fn one() -> Self {
        RationalFunction::one()
    }
}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        RationalFunction::from_poly(p)
    }
}
