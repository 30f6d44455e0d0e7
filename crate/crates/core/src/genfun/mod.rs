//! Closed-form generating functions of the occurrence counts.
//!
//! With `A_w` the autocorrelation polynomial of `w` and
//! `D = (1 - b t) A_w + t^p`:
//!
//! ```text
//! Z_w(0)               = A_w / D
//! Z_w(v, 0)            = t^(p-1) / D
//! t^(2-p) Z_w(v, 0, u) = ((1 - b t)(A_w - 1) + t^p) / D
//! Z_w(k)               = t^p ((1 - b t)(A_w - 1) + t^p)^(k-1) / D^(k+1)     (k >= 1)
//! ```
//!
//! Everything is built from a [`Correlation`], so a deliberately corrupted
//! correlation flows through every formula (see [`battery`]).

pub mod battery;

use num_traits::One;

use crate::error::{Error, Result};
use crate::exactnum::{int, BigRational, Polynomial, RationalFunction};
use crate::words::Block;

pub use battery::{
    identity_battery, identity_battery_with, BatteryConfig, BatteryReport, Identity,
};

/// Largest `k` accepted by the closed forms unless a caller raises it.
pub const DEFAULT_K_CAP: u32 = 64;

/// Autocorrelation data of a block: `c_i = 1` iff `i` is a period of `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correlation {
    block: Block,
    coefficients: Vec<bool>,
}

/// Computes the correlation of `w`: `c_i = 1` iff the length `p - i` prefix equals the suffix of that length.
pub fn autocorrelation(w: &Block) -> Correlation {
    let d = w.digits();
    let p = d.len();
    let coefficients = (0..p).map(|i| d[..p - i] == d[i..]).collect();
    Correlation {
        block: w.clone(),
        coefficients,
    }
}

impl Correlation {
    pub fn block(&self) -> &Block {
        &self.block
    }

    pub fn coefficients(&self) -> &[bool] {
        &self.coefficients
    }

    pub fn c(&self, i: usize) -> bool {
        self.coefficients.get(i).copied().unwrap_or(false)
    }

    /// Indices `i` with `c_i = 1`, increasing; `0` comes first.
    pub fn periods(&self) -> Vec<usize> {
        (0..self.coefficients.len())
            .filter(|&i| self.coefficients[i])
            .collect()
    }

    /// The positive periods `i_1 < i_2 < ...`.
    pub fn positive_periods(&self) -> Vec<usize> {
        self.periods().into_iter().filter(|&i| i > 0).collect()
    }

    /// `A_w = sum c_i t^i`.
    pub fn polynomial(&self) -> Polynomial {
        Polynomial::from_ints(self.coefficients.iter().map(|&c| c as i64))
    }

    /// A copy with `c_i` flipped. The result is generally not the correlation
    /// of any block; it exists to drive negative controls.
    pub fn with_flipped(&self, i: usize) -> Result<Correlation> {
        if i >= self.coefficients.len() {
            return Err(Error::InvalidArgument(format!(
                "cannot flip c_{i} of a block of length {}",
                self.coefficients.len()
            )));
        }
        let mut out = self.clone();
        out.coefficients[i] = !out.coefficients[i];
        Ok(out)
    }
}

/// The closed forms attached to one correlation.
#[derive(Debug, Clone)]
pub struct ClosedForms {
    base: u32,
    p: usize,
    a: Polynomial,
    den: Polynomial,
    loop_num: Polynomial,
    k_cap: u32,
}

impl ClosedForms {
    pub fn new(corr: &Correlation) -> Self {
        let base = corr.block.base();
        let p = corr.block.len();
        let a = corr.polynomial();
        let one_minus_bt = Polynomial::from_ints([1, -(base as i64)]);
        let tp = Polynomial::t_pow(p);
        let den = &(&one_minus_bt * &a) + &tp;
        let loop_num = &(&one_minus_bt * &(&a - &Polynomial::one())) + &tp;
        ClosedForms {
            base,
            p,
            a,
            den,
            loop_num,
            k_cap: DEFAULT_K_CAP,
        }
    }

    pub fn for_block(w: &Block) -> Self {
        ClosedForms::new(&autocorrelation(w))
    }

    pub fn with_k_cap(mut self, k_cap: u32) -> Self {
        self.k_cap = k_cap;
        self
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn block_len(&self) -> usize {
        self.p
    }

    /// `A_w`.
    pub fn autocorrelation(&self) -> &Polynomial {
        &self.a
    }

    /// `(1 - b t) A_w + t^p`.
    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    /// `Z_w(0) = A_w / ((1 - b t) A_w + t^p)`.
    pub fn zero(&self) -> Result<RationalFunction> {
        RationalFunction::new(self.a.clone(), self.den.clone())
    }

    /// `Z_w(v, 0) = t^(p-1) / ((1 - b t) A_w + t^p)`.
    pub fn v0(&self) -> Result<RationalFunction> {
        RationalFunction::new(Polynomial::t_pow(self.p - 1), self.den.clone())
    }

    /// The loop factor `t^(2-p) Z_w(v, 0, u)`.
    pub fn loop_factor(&self) -> Result<RationalFunction> {
        RationalFunction::new(self.loop_num.clone(), self.den.clone())
    }

    /// `Z_w(k)`; `k = 0` gives [`ClosedForms::zero`].
    pub fn k(&self, k: u32) -> Result<RationalFunction> {
        if k > self.k_cap {
            return Err(Error::CountCapExceeded { k, cap: self.k_cap });
        }
        if k == 0 {
            return self.zero();
        }
        let num = &Polynomial::t_pow(self.p) * &self.loop_num.pow(k - 1);
        RationalFunction::new(num, self.den.pow(k + 1))
    }

    /// `M_w(k) = Z_w(k)(1/b)`.
    pub fn mass(&self, k: u32) -> Result<BigRational> {
        self.k(k)?.eval(&self.inv_base())
    }

    pub fn inv_base(&self) -> BigRational {
        BigRational::new(One::one(), self.base.into())
    }

    /// `b^p A_w(1/b) = b^p + b^(p - i_1) + ...`, the closed value of `M_w(0)`.
    pub fn mass_zero_closed(&self) -> BigRational {
        let bp = num_traits::pow(int(self.base as i64), self.p);
        bp * self.a.eval(&self.inv_base())
    }
}

/// `Z_w(0)` in canonical form.
pub fn gf_zero(w: &Block) -> Result<RationalFunction> {
    ClosedForms::for_block(w).zero()
}

/// `Z_w(v, 0)`.
pub fn gf_v0(w: &Block) -> Result<RationalFunction> {
    ClosedForms::for_block(w).v0()
}

/// The loop factor `t^(2-p) Z_w(v, 0, u)`.
pub fn gf_loop(w: &Block) -> Result<RationalFunction> {
    ClosedForms::for_block(w).loop_factor()
}

/// `Z_w(k)`, the generating series of `N_w(k, l)`.
pub fn gf_k(w: &Block, k: u32) -> Result<RationalFunction> {
    ClosedForms::for_block(w).k(k)
}

/// `M_w(k)`, the total mass of the `k`-admissible strings.
pub fn mass(w: &Block, k: u32) -> Result<BigRational> {
    ClosedForms::for_block(w).mass(k)
}
