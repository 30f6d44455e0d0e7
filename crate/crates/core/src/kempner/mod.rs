//! The measures `mu_k`, the harmonic sums `S_w(k)` and their certified enclosures.
//!
//! `mu_k` puts mass `b^-|X|` at `x(X) = n(X) / b^|X|` for every `k`-admissible
//! string `X`. Integrating `1/x` over `[1/b, 1)` against it gives `S_w(k)`,
//! the sum of `1/m` over positive integers `m` whose minimal representation
//! contains `w` exactly `k` times.

mod enclosure;
mod log;
mod sum;

pub use enclosure::{decimal_truncated, Enclosure};
pub use log::{log_base_enclosure, log_base_enclosure_by_factors};
pub use sum::{
    check_limit_bound, enclose_sum, enclose_sum_to_width, limit_bound, EncloseOptions, LimitReport,
    LimitVerdict,
};

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::automaton::MassTable;
use crate::error::{Error, Result};
use crate::exactnum::{parse_rational, BigRational};
use crate::words::{occurrences_in, Block, EnumerationCap};

/// `[n1 / b^l, n2 / b^l)` with `0 <= n1 < n2 <= b^l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BimalInterval {
    base: u32,
    resolution: u32,
    n1: u64,
    n2: u64,
}

fn checked_pow(base: u32, e: u32) -> Option<u64> {
    (base as u64).checked_pow(e)
}

impl BimalInterval {
    pub fn new(base: u32, resolution: u32, n1: u64, n2: u64) -> Result<Self> {
        let top = checked_pow(base, resolution)
            .ok_or_else(|| Error::InvalidInterval(format!("{base}^{resolution} overflows")))?;
        if n1 >= n2 || n2 > top {
            return Err(Error::InvalidInterval(format!(
                "need 0 <= {n1} < {n2} <= {base}^{resolution}"
            )));
        }
        Ok(BimalInterval {
            base,
            resolution,
            n1,
            n2,
        })
    }

    /// The cell `[n / b^l, (n + 1) / b^l)`.
    pub fn cell(base: u32, resolution: u32, n: u64) -> Result<Self> {
        BimalInterval::new(base, resolution, n, n + 1)
    }

    /// `[t, u)` for b-imal endpoints, at the smallest common resolution.
    pub fn from_endpoints(base: u32, t: &BigRational, u: &BigRational) -> Result<Self> {
        let bad = || {
            Error::InvalidInterval(format!(
                "[{t}, {u}) is not a b-imal interval in base {base}"
            ))
        };
        let b = BigInt::from(base);
        let mut scale = BigInt::one();
        for l in 0..=63u32 {
            let st = t * BigRational::from_integer(scale.clone());
            let su = u * BigRational::from_integer(scale.clone());
            if st.is_integer() && su.is_integer() {
                let n1: u64 = st.to_integer().try_into().map_err(|_| bad())?;
                let n2: u64 = su.to_integer().try_into().map_err(|_| bad())?;
                return BimalInterval::new(base, l, n1, n2);
            }
            scale *= &b;
        }
        Err(bad())
    }

    /// Parses `[t, u)` from two endpoint literals such as `2/4` or `1/2^2`.
    pub fn parse(base: u32, from: &str, to: &str) -> Result<Self> {
        BimalInterval::from_endpoints(base, &parse_bimal(from)?, &parse_bimal(to)?)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn numerators(&self) -> (u64, u64) {
        (self.n1, self.n2)
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(
            self.n1.into(),
            BigUint::from(self.base).pow(self.resolution).into(),
        )
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new(
            self.n2.into(),
            BigUint::from(self.base).pow(self.resolution).into(),
        )
    }

    /// Lebesgue measure `u - t`.
    pub fn length(&self) -> BigRational {
        self.upper() - self.lower()
    }
}

impl fmt::Display for BimalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.lower(), self.upper())
    }
}

/// Accepts `n/d`, a bare integer, or `n/b^l`.
pub fn parse_bimal(text: &str) -> Result<BigRational> {
    if let Some((num, den)) = text.split_once('/') {
        if let Some((b, l)) = den.split_once('^') {
            let b: BigInt = b
                .trim()
                .parse()
                .map_err(|_| Error::parse("b-imal number", text))?;
            let l: u32 = l
                .trim()
                .parse()
                .map_err(|_| Error::parse("b-imal number", text))?;
            let n: BigInt = num
                .trim()
                .parse()
                .map_err(|_| Error::parse("b-imal number", text))?;
            if b.is_zero() {
                return Err(Error::DivisionByZero);
            }
            return Ok(BigRational::new(n, num_traits::pow(b, l as usize)));
        }
    }
    parse_rational(text)
}

fn padded_digits(mut n: u64, base: u32, len: usize) -> Vec<u32> {
    let mut digits = vec![0u32; len];
    for slot in digits.iter_mut().rev() {
        *slot = (n % base as u64) as u32;
        n /= base as u64;
    }
    digits
}

fn inv_pow(base: u32, e: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigUint::from(base).pow(e as u32).into())
}

/// `mu_k(I)`: strings shorter than `l` that land in `I`, counted one by one,
/// plus the prefix masses of the length-`l` prefixes `s` with `n1 <= n(s) < n2`.
pub fn measure_interval(
    w: &Block,
    k: u32,
    interval: &BimalInterval,
    cap: EnumerationCap,
) -> Result<BigRational> {
    if interval.base != w.base() {
        return Err(Error::BaseMismatch {
            left: interval.base,
            right: w.base(),
        });
    }
    let l = interval.resolution as usize;
    cap.check(w.base(), l)?;
    let b = w.base() as u64;
    let mut total = BigRational::zero();

    for j in 0..l {
        let step = b.pow((l - j) as u32);
        let lo = interval.n1.div_ceil(step);
        let hi = interval.n2.div_ceil(step);
        let weight = inv_pow(w.base(), j);
        for n in lo..hi {
            let x = padded_digits(n, w.base(), j);
            if occurrences_in(&x, w.digits()) == k as usize {
                total += &weight;
            }
        }
    }

    let table = MassTable::for_block(w, k)?;
    let scale = inv_pow(w.base(), l);
    for n in interval.n1..interval.n2 {
        let s = padded_digits(n, w.base(), l);
        let (q, seen) = table.automaton().run(&s);
        if seen <= k as usize {
            total += &scale * table.get(k - seen as u32, q);
        }
    }
    Ok(total)
}

/// `mu_k` of every cell `[i / b^l, (i + 1) / b^l)`, in one walk over all
/// strings of length at most `l`.
pub fn measure_histogram(
    w: &Block,
    k: u32,
    resolution: u32,
    cap: EnumerationCap,
) -> Result<Vec<BigRational>> {
    let l = resolution as usize;
    let cells = cap.check(w.base(), l)? as usize;
    let table = MassTable::for_block(w, k)?;
    let mut out = vec![BigRational::zero(); cells];
    let weights: Vec<BigRational> = (0..=l).map(|j| inv_pow(w.base(), j)).collect();
    let mut walk = HistogramWalk {
        table: &table,
        k: k as usize,
        len: l,
        base: w.base() as u64,
        weights: &weights,
        out: &mut out,
    };
    walk.visit(0, 0, 0, 0);
    Ok(out)
}

struct HistogramWalk<'a> {
    table: &'a MassTable,
    k: usize,
    len: usize,
    base: u64,
    weights: &'a [BigRational],
    out: &'a mut [BigRational],
}

impl HistogramWalk<'_> {
    fn visit(&mut self, depth: usize, value: u64, q: usize, seen: usize) {
        if seen > self.k {
            return;
        }
        if depth == self.len {
            let m = self.table.get((self.k - seen) as u32, q);
            self.out[value as usize] += &self.weights[depth] * m;
            return;
        }
        if seen == self.k {
            let cell = value * self.base.pow((self.len - depth) as u32);
            self.out[cell as usize] += &self.weights[depth];
        }
        for d in 0..self.base as u32 {
            let (next, e) = self.table.automaton().step(q, d);
            self.visit(
                depth + 1,
                value * self.base + d as u64,
                next,
                seen + e as usize,
            );
        }
    }
}

/// CSV with header `cell_index,n_over_bl,mass_num,mass_den`.
pub fn histogram_csv(cells: &[BigRational], base: u32, resolution: u32) -> String {
    let denom = BigUint::from(base).pow(resolution);
    let mut out = String::from("cell_index,n_over_bl,mass_num,mass_den\n");
    for (i, m) in cells.iter().enumerate() {
        out.push_str(&format!("{i},{i}/{denom},{},{}\n", m.numer(), m.denom()));
    }
    out
}

/// Exact partial sums of `S_w(k)`: entry `L` is the sum of `1/m` over the
/// `k`-admissible positive integers with at most `L` digits (entry 0 is 0).
///
/// Admissibility is decided by direct window comparison, independently of
/// the automaton.
pub fn partial_sums(
    w: &Block,
    k: u32,
    max_len: usize,
    cap: EnumerationCap,
) -> Result<Vec<BigRational>> {
    Ok(partial_sums_by_k(w, k, max_len, cap)?.swap_remove(k as usize))
}

/// `partial_sum(w, k, L)`.
pub fn partial_sum(w: &Block, k: u32, max_len: usize, cap: EnumerationCap) -> Result<BigRational> {
    Ok(partial_sums(w, k, max_len, cap)?
        .pop()
        .expect("entry 0 always present"))
}

/// [`partial_sums`] for every `k <= kmax` from a single enumeration.
pub fn partial_sums_by_k(
    w: &Block,
    kmax: u32,
    max_len: usize,
    cap: EnumerationCap,
) -> Result<Vec<Vec<BigRational>>> {
    cap.check(w.base(), max_len)?;
    let kmax = kmax as usize;
    let mut groups: Vec<Vec<ReciprocalAccumulator>> = (0..=kmax)
        .map(|_| {
            (0..=max_len)
                .map(|_| ReciprocalAccumulator::default())
                .collect()
        })
        .collect();
    let mut buf = Vec::with_capacity(max_len);
    let mut walk = IntegerWalk {
        w,
        kmax,
        max_len,
        groups: &mut groups,
    };
    for lead in 1..w.base() {
        buf.push(lead);
        let seen = (buf[..] == *w.digits()) as usize;
        walk.visit(&mut buf, lead as u64, seen);
        buf.pop();
    }
    Ok(groups
        .into_iter()
        .map(|by_len| {
            let mut acc = BigRational::zero();
            let mut out = vec![acc.clone()];
            for group in by_len.into_iter().skip(1) {
                acc += group.finish();
                out.push(acc.clone());
            }
            out
        })
        .collect())
}

struct IntegerWalk<'a> {
    w: &'a Block,
    kmax: usize,
    max_len: usize,
    groups: &'a mut [Vec<ReciprocalAccumulator>],
}

impl IntegerWalk<'_> {
    fn visit(&mut self, buf: &mut Vec<u32>, value: u64, seen: usize) {
        if seen > self.kmax {
            return;
        }
        self.groups[seen][buf.len()].push(value);
        if buf.len() == self.max_len {
            return;
        }
        let p = self.w.len();
        let base = self.w.base();
        for d in 0..base {
            buf.push(d);
            let n = buf.len();
            let hit = n >= p && buf[n - p..] == *self.w.digits();
            self.visit(buf, value * base as u64 + d as u64, seen + hit as usize);
            buf.pop();
        }
    }
}

const RECIPROCAL_CHUNK: usize = 1 << 12;

/// Sums `1/m` over pushed denominators, reducing fixed-size chunks as they fill.
#[derive(Default)]
struct ReciprocalAccumulator {
    pending: Vec<u64>,
    chunks: Vec<BigRational>,
}

impl ReciprocalAccumulator {
    fn push(&mut self, m: u64) {
        self.pending.push(m);
        if self.pending.len() == RECIPROCAL_CHUNK {
            self.chunks.push(reciprocal_sum(&self.pending));
            self.pending.clear();
        }
    }

    fn finish(mut self) -> BigRational {
        self.chunks.push(reciprocal_sum(&self.pending));
        fn tree(parts: &[BigRational]) -> BigRational {
            match parts.len() {
                0 => BigRational::zero(),
                1 => parts[0].clone(),
                n => tree(&parts[..n / 2]) + tree(&parts[n / 2..]),
            }
        }
        tree(&self.chunks)
    }
}

/// `sum 1/m` by pairwise combination, keeping numerators and denominators small.
fn reciprocal_sum(dens: &[u64]) -> BigRational {
    fn go(dens: &[u64]) -> (BigInt, BigInt) {
        match dens.len() {
            0 => (BigInt::zero(), BigInt::one()),
            1 => (BigInt::one(), BigInt::from(dens[0])),
            n => {
                let (a, b) = go(&dens[..n / 2]);
                let (c, d) = go(&dens[n / 2..]);
                (a * &d + c * &b, b * d)
            }
        }
    }
    let (num, den) = go(dens);
    BigRational::new(num, den)
}
