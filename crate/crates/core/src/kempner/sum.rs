//! Certified enclosures of `S_w(k)` through `int 1/x mu_k(dx)` over `[1/b, 1)`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::json;

use super::{log_base_enclosure, Enclosure};
use crate::automaton::MassTable;
use crate::error::{Error, Result};
use crate::exactnum::{rational_to_string, BigRational};
use crate::words::{Block, EnumerationCap};

/// Precision and enumeration limits for [`enclose_sum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncloseOptions {
    /// Fractional bits `F` of the returned bounds.
    pub frac_bits: u32,
    pub cap: EnumerationCap,
}

impl Default for EncloseOptions {
    fn default() -> Self {
        EncloseOptions {
            frac_bits: 128,
            cap: EnumerationCap::default(),
        }
    }
}

/// Below this many subtrees the walk stays on one thread.
const PARALLEL_FRONTIER: u64 = 256;

struct Walk<'a> {
    table: &'a MassTable,
    k: usize,
    depth: usize,
    base: u64,
    /// `m_j(q) 2^W` split into numerator and denominator.
    leaf_mass: Vec<Vec<(BigUint, BigUint)>>,
    one: BigUint,
}

#[derive(Default)]
struct Acc {
    lo: BigUint,
    hi: BigUint,
}

impl Acc {
    fn merge(mut self, other: Acc) -> Acc {
        self.lo += other.lo;
        self.hi += other.hi;
        self
    }
}

fn ceil_div(n: &BigUint, d: &BigUint) -> BigUint {
    let (q, r) = n.div_rem(d);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

impl Walk<'_> {
    /// The integer `value` has `len` digits, ends in automaton state `q`
    /// and contains `seen` occurrences.
    fn visit(&self, value: u64, len: usize, q: usize, seen: usize, acc: &mut Acc) {
        if seen > self.k {
            return;
        }
        if len == self.depth {
            let (num, den) = &self.leaf_mass[self.k - seen][q];
            if num.is_zero() {
                return;
            }
            let lo_den = den * BigUint::from(value + 1);
            let hi_den = den * BigUint::from(value);
            acc.lo += num / lo_den;
            acc.hi += ceil_div(num, &hi_den);
            return;
        }
        if seen == self.k {
            let v = BigUint::from(value);
            acc.lo += &self.one / &v;
            acc.hi += ceil_div(&self.one, &v);
        }
        for d in 0..self.base as u32 {
            let (next, e) = self.table.automaton().step(q, d);
            self.visit(
                value * self.base + d as u64,
                len + 1,
                next,
                seen + e as usize,
                acc,
            );
        }
    }

    /// Prefixes of length `split` to hand out to worker threads; the shorter
    /// integers on the way are added to `acc`.
    fn frontier(&self, split: usize, acc: &mut Acc) -> Vec<(u64, usize, usize)> {
        let mut out = Vec::new();
        let mut stack: Vec<(u64, usize, usize, usize)> = (1..self.base as u32)
            .rev()
            .map(|d| {
                let (q, e) = self.table.automaton().step(0, d);
                (d as u64, 1, q, e as usize)
            })
            .collect();
        while let Some((value, len, q, seen)) = stack.pop() {
            if seen > self.k {
                continue;
            }
            if len == split {
                out.push((value, q, seen));
                continue;
            }
            if seen == self.k {
                let v = BigUint::from(value);
                acc.lo += &self.one / &v;
                acc.hi += ceil_div(&self.one, &v);
            }
            for d in (0..self.base as u32).rev() {
                let (next, e) = self.table.automaton().step(q, d);
                stack.push((
                    value * self.base + d as u64,
                    len + 1,
                    next,
                    seen + e as usize,
                ));
            }
        }
        out
    }
}

fn ceil_log2(b: u32) -> u32 {
    32 - (b - 1).leading_zeros()
}

/// Certified enclosure of `S_w(k)` from the length-`depth` prefixes.
///
/// Integers with fewer than `depth` digits contribute `1/m` each; a
/// length-`depth` prefix `s` with value `n` contributes
/// `prefix_mass(s) b^depth [1/(n+1), 1/n]`. Terms are rounded outward at
/// `F + guard` bits and the total once more to `F` bits. The work is split
/// across the rayon pool, and the result does not depend on the thread count.
pub fn enclose_sum(w: &Block, k: u32, depth: usize, options: &EncloseOptions) -> Result<Enclosure> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    options.cap.check(w.base(), depth)?;
    let table = MassTable::for_block(w, k)?;
    let guard = depth as u32 * ceil_log2(w.base()) + 4;
    let work_bits = options.frac_bits + guard;
    let one = BigUint::one() << work_bits;
    let leaf_mass = (0..=k)
        .map(|j| {
            table
                .row(j)
                .iter()
                .map(|m| {
                    let num = m.numer().to_biguint().expect("masses are nonnegative");
                    let den = m.denom().to_biguint().expect("denominators are positive");
                    (num * &one, den)
                })
                .collect()
        })
        .collect();
    let walk = Walk {
        table: &table,
        k: k as usize,
        depth,
        base: w.base() as u64,
        leaf_mass,
        one,
    };

    let mut split = 1;
    while split < depth
        && (w.base() as u64 - 1) * (w.base() as u64).pow(split as u32 - 1) < PARALLEL_FRONTIER
    {
        split += 1;
    }
    let mut acc = Acc::default();
    let frontier = walk.frontier(split, &mut acc);
    let parts: Vec<Acc> = frontier
        .par_iter()
        .map(|&(value, q, seen)| {
            let mut part = Acc::default();
            walk.visit(value, split, q, seen, &mut part);
            part
        })
        .collect();
    let acc = parts.into_iter().fold(acc, Acc::merge);
    let fine = Enclosure::new(BigInt::from(acc.lo), BigInt::from(acc.hi), work_bits);
    Ok(fine.coarsen(options.frac_bits))
}

/// Raises the depth from 1 until the width drops below `target`, stopping at
/// `max_depth`. Returns the last depth tried with its enclosure.
pub fn enclose_sum_to_width(
    w: &Block,
    k: u32,
    target: &BigRational,
    max_depth: usize,
    options: &EncloseOptions,
) -> Result<(usize, Enclosure)> {
    let mut depth = 1;
    loop {
        let e = enclose_sum(w, k, depth, options)?;
        if &e.width() < target || depth >= max_depth {
            return Ok((depth, e));
        }
        depth += 1;
    }
}

/// `(b - 1) b^(p - max(k, 2) + 1)`.
pub fn limit_bound(base: u32, p: usize, k: u32) -> BigRational {
    let e = p as i64 - k.max(2) as i64 + 1;
    let b = BigInt::from(base);
    let power = if e >= 0 {
        BigRational::from_integer(num_traits::pow(b, e as usize))
    } else {
        BigRational::new(BigInt::one(), num_traits::pow(b, (-e) as usize))
    };
    BigRational::from_integer(BigInt::from(base - 1)) * power
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitVerdict {
    /// The largest gap consistent with both enclosures is within the bound.
    Verified,
    /// Even the smallest consistent gap exceeds the bound.
    Violated,
    /// The enclosures are too wide to decide; a larger depth may help.
    Undecided,
}

impl LimitVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            LimitVerdict::Verified => "verified",
            LimitVerdict::Violated => "violated",
            LimitVerdict::Undecided => "undecided",
        }
    }
}

/// Distance between `S_w(k)` and `b^p log(b)` as certified by two enclosures.
#[derive(Debug, Clone)]
pub struct LimitReport {
    pub base: u32,
    pub block: String,
    pub k: u32,
    pub depth: usize,
    pub sum: Enclosure,
    pub limit: Enclosure,
    pub bound: BigRational,
    pub gap_upper: BigRational,
    pub gap_lower: BigRational,
    pub verdict: LimitVerdict,
}

impl LimitReport {
    /// Compares an existing enclosure of `S_w(k)` with `b^p log(b)`.
    pub fn from_sum(w: &Block, k: u32, depth: usize, sum: Enclosure) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument(
                "the limit bound needs k >= 1".into(),
            ));
        }
        let b_p = BigUint::from(w.base()).pow(w.len() as u32);
        let limit = log_base_enclosure(w.base(), sum.frac_bits())?.scale(&b_p);
        let bound = limit_bound(w.base(), w.len(), k);
        let zero = BigRational::zero();
        let gap_upper = (sum.upper() - limit.lower()).max(limit.upper() - sum.lower());
        let gap_lower = (sum.lower() - limit.upper())
            .max(limit.lower() - sum.upper())
            .max(zero);
        let verdict = if gap_upper <= bound {
            LimitVerdict::Verified
        } else if gap_lower > bound {
            LimitVerdict::Violated
        } else {
            LimitVerdict::Undecided
        };
        Ok(LimitReport {
            base: w.base(),
            block: w.to_string(),
            k,
            depth,
            sum,
            limit,
            bound,
            gap_upper,
            gap_lower,
            verdict,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (gap_decimal, _) =
            Enclosure::between(&self.gap_lower, &self.gap_upper, self.sum.frac_bits())
                .shared_decimal();
        json!({
            "base": self.base,
            "block": self.block,
            "k": self.k,
            "depth": self.depth,
            "sum": self.sum.to_json(),
            "limit": self.limit.to_json(),
            "bound": rational_to_string(&self.bound),
            "gap_lower": rational_to_string(&self.gap_lower),
            "gap_upper": rational_to_string(&self.gap_upper),
            "gap_decimal": gap_decimal,
            "verdict": self.verdict.name(),
        })
    }
}

/// Encloses `S_w(k)` at `depth` and checks `|S_w(k) - b^p log b| <= (b - 1) b^(p - max(k,2) + 1)`.
pub fn check_limit_bound(
    w: &Block,
    k: u32,
    depth: usize,
    options: &EncloseOptions,
) -> Result<LimitReport> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "the limit bound needs k >= 1".into(),
        ));
    }
    let sum = enclose_sum(w, k, depth, options)?;
    LimitReport::from_sum(w, k, depth, sum)
}
