//! Digit strings, blocks and the brute-force enumeration oracles.
//!
//! Nothing in here depends on the automaton or on any generating function:
//! occurrences are found by comparing windows directly, so the counts produced
//! by this module can serve as ground truth for everything else.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactnum::BigRational;

pub const MAX_BASE: u32 = 1 << 16;

/// Environment variable overriding the default enumeration cap.
pub const CAP_ENV_VAR: &str = "BLOCKMASS_CAP";

fn check_base(base: u32) -> Result<()> {
    if (2..=MAX_BASE).contains(&base) {
        Ok(())
    } else {
        Err(Error::InvalidBase(base as u64))
    }
}

fn check_digits(base: u32, digits: &[u32]) -> Result<()> {
    match digits.iter().find(|&&d| d >= base) {
        Some(&d) => Err(Error::DigitOutOfRange {
            digit: d as u64,
            base,
        }),
        None => Ok(()),
    }
}

/// Parses digits written compactly (`"042"`, bases up to 10) or as
/// comma-separated integers (`"4,0,12"`, any base).
fn parse_digits(base: u32, text: &str) -> Result<Vec<u32>> {
    let text = text.trim();
    if text.is_empty() || text == "ε" || text == "-" {
        return Ok(Vec::new());
    }
    let digits: Vec<u32> = if text.contains(',') || base > 10 {
        text.split(',')
            .map(|part| {
                part.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::parse("digit", part))
            })
            .collect::<Result<_>>()?
    } else {
        text.chars()
            .map(|c| c.to_digit(10).ok_or_else(|| Error::parse("digit", text)))
            .collect::<Result<_>>()?
    };
    check_digits(base, &digits)?;
    Ok(digits)
}

fn fmt_digits(f: &mut fmt::Formatter<'_>, base: u32, digits: &[u32]) -> fmt::Result {
    if digits.is_empty() {
        return f.write_str("ε");
    }
    if base <= 10 {
        for d in digits {
            write!(f, "{d}")?;
        }
        Ok(())
    } else {
        let parts: Vec<String> = digits.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// A block `w = d_1 .. d_p` of base-`b` digits, `p >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    base: u32,
    digits: Vec<u32>,
}

impl Block {
    pub fn new(base: u32, digits: Vec<u32>) -> Result<Self> {
        check_base(base)?;
        if digits.is_empty() {
            return Err(Error::EmptyBlock);
        }
        check_digits(base, &digits)?;
        Ok(Block { base, digits })
    }

    pub fn parse(base: u32, text: &str) -> Result<Self> {
        check_base(base)?;
        Block::new(base, parse_digits(base, text)?)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// The block length `p`.
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `u`: the first `p - 1` digits.
    pub fn prefix(&self) -> &[u32] {
        &self.digits[..self.len() - 1]
    }

    /// `v`: the last `p - 1` digits.
    pub fn suffix(&self) -> &[u32] {
        &self.digits[1..]
    }

    pub fn reversed(&self) -> Block {
        let mut digits = self.digits.clone();
        digits.reverse();
        Block {
            base: self.base,
            digits,
        }
    }

    pub fn to_digit_string(&self) -> DigitString {
        DigitString {
            base: self.base,
            digits: self.digits.clone(),
        }
    }

    /// Every block of length `p` in base `b`, in lexicographic order.
    pub fn all_of_length(base: u32, p: usize) -> Result<Vec<Block>> {
        check_base(base)?;
        if p == 0 {
            return Err(Error::EmptyBlock);
        }
        let mut out = Vec::new();
        for_each_string(base, p, EnumerationCap::default(), |digits| {
            out.push(Block {
                base,
                digits: digits.to_vec(),
            });
        })?;
        Ok(out)
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_digits(f, self.base, &self.digits)
    }
}

/// A finite, possibly empty, string of base-`b` digits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitString {
    base: u32,
    digits: Vec<u32>,
}

impl DigitString {
    pub fn new(base: u32, digits: Vec<u32>) -> Result<Self> {
        check_base(base)?;
        check_digits(base, &digits)?;
        Ok(DigitString { base, digits })
    }

    pub fn empty(base: u32) -> Result<Self> {
        DigitString::new(base, Vec::new())
    }

    pub fn parse(base: u32, text: &str) -> Result<Self> {
        check_base(base)?;
        DigitString::new(base, parse_digits(base, text)?)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Positional value `n(X)`; `n(ε) = 0`.
    pub fn value(&self) -> BigUint {
        let base = BigUint::from(self.base);
        self.digits
            .iter()
            .fold(BigUint::zero(), |acc, &d| acc * &base + d)
    }

    /// `x(X) = n(X) / b^|X|`, the point of `[0, 1)` with digits `X` after the separator.
    pub fn to_fraction(&self) -> BigRational {
        let den = BigUint::from(self.base).pow(self.len() as u32);
        BigRational::new(self.value().into(), den.into())
    }

    pub fn reverse(&self) -> DigitString {
        let mut digits = self.digits.clone();
        digits.reverse();
        DigitString {
            base: self.base,
            digits,
        }
    }

    pub fn concat(&self, other: &DigitString) -> Result<DigitString> {
        same_base(self.base, other.base)?;
        let mut digits = self.digits.clone();
        digits.extend_from_slice(&other.digits);
        Ok(DigitString {
            base: self.base,
            digits,
        })
    }
}

impl fmt::Display for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_digits(f, self.base, &self.digits)
    }
}

fn same_base(left: u32, right: u32) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::BaseMismatch { left, right })
    }
}

/// Number of (possibly overlapping) occurrences of `pattern` in `text`.
pub fn occurrences_in(text: &[u32], pattern: &[u32]) -> usize {
    if pattern.is_empty() || pattern.len() > text.len() {
        return 0;
    }
    text.windows(pattern.len())
        .filter(|w| *w == pattern)
        .count()
}

/// `k_w(X)`.
pub fn count_occurrences(x: &DigitString, w: &Block) -> Result<usize> {
    same_base(x.base, w.base)?;
    Ok(occurrences_in(&x.digits, &w.digits))
}

/// `k_w^*(s)`: the largest `k_w(s z)` over all `z` of length `p - 1`.
pub fn k_star(s: &DigitString, w: &Block) -> Result<usize> {
    same_base(s.base, w.base)?;
    let p = w.len();
    let mut buf = s.digits.clone();
    let base_len = buf.len();
    let mut best = 0;
    for_each_string(w.base, p - 1, EnumerationCap::default(), |z| {
        buf.truncate(base_len);
        buf.extend_from_slice(z);
        best = best.max(occurrences_in(&buf, &w.digits));
    })?;
    Ok(best)
}

/// `X(n)`: the representation of `n` without leading zeros; `X(0) = ε`.
pub fn minimal_representation(n: &BigUint, base: u32) -> Result<DigitString> {
    check_base(base)?;
    let mut digits = n.to_radix_be(base);
    if n.is_zero() {
        digits.clear();
    }
    Ok(DigitString {
        base,
        digits: digits.into_iter().map(|d| d as u32).collect(),
    })
}

/// Bound on how many strings an exhaustive enumeration may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationCap(pub u64);

impl Default for EnumerationCap {
    fn default() -> Self {
        EnumerationCap(1 << 24)
    }
}

impl EnumerationCap {
    /// The default cap, overridden by `BLOCKMASS_CAP` when that is set to an integer.
    pub fn from_env() -> Self {
        std::env::var(CAP_ENV_VAR)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .map(EnumerationCap)
            .unwrap_or_default()
    }

    /// `b^len`, or an error when it exceeds the cap.
    pub fn check(&self, base: u32, len: usize) -> Result<u64> {
        let err = Error::CapExceeded {
            base,
            len,
            cap: self.0,
        };
        let count = (base as u64)
            .checked_pow(u32::try_from(len).map_err(|_| err.clone())?)
            .ok_or_else(|| err.clone())?;
        if count > self.0 {
            Err(err)
        } else {
            Ok(count)
        }
    }
}

/// Calls `f` on every string of exactly `len` digits, in lexicographic order.
pub fn for_each_string<F>(base: u32, len: usize, cap: EnumerationCap, mut f: F) -> Result<()>
where
    F: FnMut(&[u32]),
{
    check_base(base)?;
    cap.check(base, len)?;
    let mut digits = vec![0u32; len];
    loop {
        f(&digits);
        // odometer increment
        let mut i = len;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < base {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// `N_w(k, l)` by exhaustive enumeration of all `b^l` strings.
pub fn enumerate_admissible(w: &Block, k: usize, l: usize, cap: EnumerationCap) -> Result<u64> {
    let mut count = 0;
    for_each_string(w.base, l, cap, |x| {
        if occurrences_in(x, &w.digits) == k {
            count += 1;
        }
    })?;
    Ok(count)
}

/// The `k`-admissible strings of length `l`, in lexicographic order.
pub fn admissible_strings(
    w: &Block,
    k: usize,
    l: usize,
    cap: EnumerationCap,
) -> Result<Vec<DigitString>> {
    let mut out = Vec::new();
    for_each_string(w.base, l, cap, |x| {
        if occurrences_in(x, &w.digits) == k {
            out.push(DigitString {
                base: w.base,
                digits: x.to_vec(),
            });
        }
    })?;
    Ok(out)
}

/// Table of `N_w(k, l)` for every `l <= max_len` and every `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleCounts {
    rows: Vec<Vec<u64>>,
}

impl AdmissibleCounts {
    /// `N_w(k, l)`; zero outside the enumerated range of `k`.
    pub fn get(&self, k: usize, l: usize) -> u64 {
        self.rows[l].get(k).copied().unwrap_or(0)
    }

    pub fn max_len(&self) -> usize {
        self.rows.len() - 1
    }

    /// Counts for lengths `0..=max_len` at a fixed `k`.
    pub fn series(&self, k: usize) -> Vec<u64> {
        (0..self.rows.len()).map(|l| self.get(k, l)).collect()
    }
}

/// Tabulates `N_w(k, l)` for all `l <= max_len` by a depth-first walk over
/// every string, updating the occurrence count from the last `p` digits.
pub fn admissible_counts(
    w: &Block,
    max_len: usize,
    cap: EnumerationCap,
) -> Result<AdmissibleCounts> {
    cap.check(w.base, max_len)?;
    let mut rows: Vec<Vec<u64>> = (0..=max_len).map(|l| vec![0; l + 1]).collect();
    let mut buf = Vec::with_capacity(max_len);
    walk_counts(w, max_len, &mut buf, 0, &mut rows);
    Ok(AdmissibleCounts { rows })
}

fn walk_counts(w: &Block, max_len: usize, buf: &mut Vec<u32>, count: usize, rows: &mut [Vec<u64>]) {
    rows[buf.len()][count] += 1;
    if buf.len() == max_len {
        return;
    }
    let p = w.len();
    for d in 0..w.base {
        buf.push(d);
        let hit = buf.len() >= p && buf[buf.len() - p..] == w.digits[..];
        walk_counts(w, max_len, buf, count + hit as usize, rows);
        buf.pop();
    }
}
