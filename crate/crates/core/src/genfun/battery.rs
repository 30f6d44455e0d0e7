//! Exact identity checks tying the closed forms to the automaton and to
//! brute-force enumeration.
//!
//! The closed forms are all built from the same denominator, so comparing
//! them only with each other would be circular. Every item therefore pits at
//! least one side that comes from the correlation under test against either
//! the transfer-matrix generating function or raw counts.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::{autocorrelation, ClosedForms, Correlation};
use crate::automaton::stratified_gf;
use crate::error::Result;
use crate::exactnum::{int, rat_pow, BigRational, Polynomial, RationalFunction};
use crate::words::{Block, EnumerationCap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `(1 - b t) Z_w(0) = 1 - t Z_w(v, 0)`.
    ZeroFromV0,
    /// `(1 - b t) t^(1-p) Z_w(v, 0) = 1 - t^(2-p) Z_w(v, 0, u)`.
    V0FromLoop,
    /// `Z_w(0) = A_w t^(1-p) Z_w(v, 0)`.
    Cluster,
    /// Series coefficients of `Z_w(k)` and `Z_w(v, 0)` equal brute-force counts.
    Coefficients,
    /// As many 0-admissible strings end in `u` as start with `v`.
    Reversal,
    /// `sum_(j <= k) M_w(j) <= p (k + 1) b^p`, and `D(1/b) = b^-p`.
    UpperBound,
    /// 0-admissible `X` with `k_w(v X) = j` are `s_(i_j)` followed by a cluster-free string.
    ClusterPartition,
}

impl Identity {
    pub const ALL: [Identity; 7] = [
        Identity::ZeroFromV0,
        Identity::V0FromLoop,
        Identity::Cluster,
        Identity::Coefficients,
        Identity::Reversal,
        Identity::UpperBound,
        Identity::ClusterPartition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::ZeroFromV0 => "zero_from_v0",
            Identity::V0FromLoop => "v0_from_loop",
            Identity::Cluster => "cluster",
            Identity::Coefficients => "coefficients",
            Identity::Reversal => "reversal",
            Identity::UpperBound => "upper_bound",
            Identity::ClusterPartition => "cluster_partition",
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where an identity first failed: a length (series index) and the two values compared.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub length: usize,
    pub expected: String,
    pub actual: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ItemResult {
    pub identity: Identity,
    pub passed: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatteryReport {
    pub base: u32,
    pub block: String,
    pub items: Vec<ItemResult>,
}

impl BatteryReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn first_failure(&self) -> Option<&ItemResult> {
        self.items.iter().find(|i| !i.passed)
    }

    pub fn item(&self, identity: Identity) -> Option<&ItemResult> {
        self.items.iter().find(|i| i.identity == identity)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BatteryConfig {
    /// Longest string length enumerated.
    pub max_len: usize,
    /// Largest occurrence count checked.
    pub kmax: u32,
    pub cap: EnumerationCap,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            max_len: 10,
            kmax: 4,
            cap: EnumerationCap::default(),
        }
    }
}

/// Runs every identity for `w`.
pub fn identity_battery(w: &Block, config: &BatteryConfig) -> Result<BatteryReport> {
    identity_battery_with(&autocorrelation(w), config)
}

/// Runs every identity with the closed forms built from `corr`, which may be
/// a corrupted correlation; brute-force and automaton sides always use the
/// block itself.
pub fn identity_battery_with(corr: &Correlation, config: &BatteryConfig) -> Result<BatteryReport> {
    let w = corr.block();
    config.cap.check(w.base(), config.max_len)?;
    let tally = Tally::collect(w, config.max_len, config.kmax);
    let closed = ClosedForms::new(corr);
    let z0_transfer = stratified_gf(w, 0)?;

    let items = Identity::ALL
        .iter()
        .map(|&identity| {
            let outcome = match identity {
                Identity::ZeroFromV0 => zero_from_v0(&closed, &z0_transfer),
                Identity::V0FromLoop => v0_from_loop(&closed, &tally),
                Identity::Cluster => cluster(&closed, &z0_transfer),
                Identity::Coefficients => coefficients(&closed, &tally, config.kmax),
                Identity::Reversal => reversal(&tally),
                Identity::UpperBound => upper_bound(&closed, config.kmax),
                Identity::ClusterPartition => cluster_partition(corr, &tally),
            };
            ItemResult {
                identity,
                passed: outcome.is_none(),
                witness: outcome,
            }
        })
        .collect();
    Ok(BatteryReport {
        base: w.base(),
        block: w.to_string(),
        items,
    })
}

type Outcome = Option<Witness>;

fn witness(
    length: usize,
    expected: impl ToString,
    actual: impl ToString,
    note: impl ToString,
) -> Witness {
    Witness {
        length,
        expected: expected.to_string(),
        actual: actual.to_string(),
        note: note.to_string(),
    }
}

fn closed_or_witness(
    r: Result<RationalFunction>,
    what: &str,
) -> std::result::Result<RationalFunction, Witness> {
    r.map_err(|e| witness(0, "a rational function", e, what))
}

/// `None` when equal; otherwise the first series coefficient where they differ.
fn compare_functions(
    expected: &RationalFunction,
    actual: &RationalFunction,
    what: &str,
) -> Outcome {
    if expected == actual {
        return None;
    }
    let bound = [expected.num(), expected.den(), actual.num(), actual.den()]
        .iter()
        .map(|p| p.degree().unwrap_or(0))
        .sum::<usize>()
        + 1;
    match (expected.series(bound), actual.series(bound)) {
        (Ok(a), Ok(b)) => {
            let l = (0..=bound).find(|&l| a[l] != b[l]).unwrap_or(bound);
            Some(witness(l, &a[l], &b[l], what))
        }
        _ => Some(witness(
            0,
            expected,
            actual,
            format!("{what}; not expandable at 0"),
        )),
    }
}

fn compare_series(expected: &[BigInt], actual: &[BigRational], what: &str) -> Outcome {
    expected
        .iter()
        .zip(actual)
        .enumerate()
        .find(|(_, (e, a))| BigRational::from_integer((*e).clone()) != **a)
        .map(|(l, (e, a))| witness(l, e, a, what))
}

fn one_minus_bt(base: u32) -> RationalFunction {
    RationalFunction::from_poly(Polynomial::from_ints([1, -(base as i64)]))
}

fn zero_from_v0(closed: &ClosedForms, z0_transfer: &RationalFunction) -> Outcome {
    let v0 = match closed_or_witness(closed.v0(), "Z_w(v,0)") {
        Ok(f) => f,
        Err(w) => return Some(w),
    };
    let lhs = &one_minus_bt(closed.base()) * z0_transfer;
    let rhs = &RationalFunction::one() - &v0.mul_t_power(1);
    compare_functions(&lhs, &rhs, "(1-bt) Z_w(0) vs 1 - t Z_w(v,0)")
}

fn v0_from_loop(closed: &ClosedForms, tally: &Tally) -> Outcome {
    let p = closed.block_len() as i64;
    let (v0, lp) = match (closed.v0(), closed.loop_factor()) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            return Some(witness(0, "a rational function", e, "closed forms"))
        }
    };
    let lhs = &one_minus_bt(closed.base()) * &v0.mul_t_power(1 - p);
    let rhs = &RationalFunction::one() - &lp;
    if let Some(w) = compare_functions(&lhs, &rhs, "(1-bt) t^(1-p) Z_w(v,0) vs 1 - loop") {
        return Some(w);
    }
    // The loop factor itself, against strings that start with v and end with u.
    let order = tally.max_len() as i64 + 2 - p;
    if order < 0 {
        return None;
    }
    let expected: Vec<BigInt> = (0..=order)
        .map(|l| {
            let len = l + p - 2;
            if len < 0 {
                BigInt::zero()
            } else {
                tally.start_v_end_u[len as usize].into()
            }
        })
        .collect();
    match lp.series(order as usize) {
        Ok(actual) => compare_series(&expected, &actual, "t^(2-p) Z_w(v,0,u) vs brute force"),
        Err(e) => Some(witness(0, "expandable loop factor", e, "loop factor")),
    }
}

fn cluster(closed: &ClosedForms, z0_transfer: &RationalFunction) -> Outcome {
    let v0 = match closed_or_witness(closed.v0(), "Z_w(v,0)") {
        Ok(f) => f,
        Err(w) => return Some(w),
    };
    let p = closed.block_len() as i64;
    let a = RationalFunction::from_poly(closed.autocorrelation().clone());
    let rhs = &a * &v0.mul_t_power(1 - p);
    compare_functions(z0_transfer, &rhs, "Z_w(0) vs A_w t^(1-p) Z_w(v,0)")
}

fn coefficients(closed: &ClosedForms, tally: &Tally, kmax: u32) -> Outcome {
    let order = tally.max_len();
    for k in 0..=kmax {
        let expected: Vec<BigInt> = (0..=order)
            .map(|l| tally.count(k as usize, l).into())
            .collect();
        let what = format!("Z_w({k}) vs brute-force N_w({k}, l)");
        let series = closed.k(k).and_then(|f| f.series(order));
        match series {
            Ok(actual) => {
                if let Some(w) = compare_series(&expected, &actual, &what) {
                    return Some(w);
                }
            }
            Err(e) => return Some(witness(0, "expandable Z_w(k)", e, what)),
        }
    }
    let expected: Vec<BigInt> = tally.start_v.iter().map(|&c| c.into()).collect();
    match closed.v0().and_then(|f| f.series(order)) {
        Ok(actual) => compare_series(&expected, &actual, "Z_w(v,0) vs brute force"),
        Err(e) => Some(witness(0, "expandable Z_w(v,0)", e, "Z_w(v,0)")),
    }
}

fn reversal(tally: &Tally) -> Outcome {
    tally
        .end_u
        .iter()
        .zip(&tally.start_v)
        .enumerate()
        .find(|(_, (a, b))| a != b)
        .map(|(l, (a, b))| {
            witness(
                l,
                b,
                a,
                "0-admissible strings ending in u vs starting with v",
            )
        })
}

fn upper_bound(closed: &ClosedForms, kmax: u32) -> Outcome {
    let base = int(closed.base() as i64);
    let p = closed.block_len() as i64;
    let bp = rat_pow(&base, p);
    let d_at = closed.denominator().eval(&closed.inv_base());
    if d_at != rat_pow(&base, -p) {
        return Some(witness(0, rat_pow(&base, -p), d_at, "denominator at 1/b"));
    }
    let mut total = BigRational::zero();
    for k in 0..=kmax {
        match closed.mass(k) {
            Ok(m) => total += m,
            Err(e) => return Some(witness(k as usize, "finite mass", e, "M_w(k)")),
        }
        let bound = &bp * int(p * (k as i64 + 1));
        if total > bound {
            return Some(witness(
                k as usize,
                bound,
                &total,
                "sum_(j<=k) M_w(j) exceeds p(k+1)b^p",
            ));
        }
    }
    None
}

fn cluster_partition(corr: &Correlation, tally: &Tally) -> Outcome {
    let p = corr.block().len();
    let periods = corr.positive_periods();
    // |A_0| at length m: 0-admissible strings of length m + p - 1 starting with v.
    let cluster_free = |m: usize| -> Option<u64> { tally.start_v.get(m + p - 1).copied() };
    for l in 0..=tally.max_len() {
        for j in 0..p {
            let expected = if j == 0 {
                cluster_free(l)
            } else if let Some(&i) = periods.get(j - 1) {
                if l < i {
                    Some(0)
                } else {
                    cluster_free(l - i)
                }
            } else {
                Some(0)
            };
            let Some(expected) = expected else { continue };
            let actual = tally.by_prefixed_count[l][j];
            if expected != actual {
                return Some(witness(
                    l,
                    expected,
                    actual,
                    format!("0-admissible X with k_w(vX) = {j}"),
                ));
            }
        }
    }
    None
}

/// Brute-force counts gathered in a single walk over every string `X` of length `<= max_len`.
struct Tally {
    /// `N_w(k, l)` for `k <= kmax`.
    counts: Vec<Vec<u64>>,
    /// 0-admissible strings starting with `v`, by length.
    start_v: Vec<u64>,
    /// 0-admissible strings ending with `u`, by length.
    end_u: Vec<u64>,
    /// 0-admissible strings starting with `v` and ending with `u`, by length.
    start_v_end_u: Vec<u64>,
    /// 0-admissible `X` by length and by `k_w(v X)`.
    by_prefixed_count: Vec<Vec<u64>>,
}

impl Tally {
    fn collect(w: &Block, max_len: usize, kmax: u32) -> Tally {
        let p = w.len();
        let mut tally = Tally {
            counts: vec![vec![0; kmax as usize + 1]; max_len + 1],
            start_v: vec![0; max_len + 1],
            end_u: vec![0; max_len + 1],
            start_v_end_u: vec![0; max_len + 1],
            by_prefixed_count: vec![vec![0; p]; max_len + 1],
        };
        let mut buf: Vec<u32> = w.suffix().to_vec();
        tally.walk(w, max_len, &mut buf, 0, 0);
        tally
    }

    fn max_len(&self) -> usize {
        self.counts.len() - 1
    }

    fn count(&self, k: usize, l: usize) -> u64 {
        self.counts[l].get(k).copied().unwrap_or(0)
    }

    /// `buf` holds `v X`; `own` counts occurrences inside `X`, `prefixed` inside `v X`.
    fn walk(&mut self, w: &Block, max_len: usize, buf: &mut Vec<u32>, own: usize, prefixed: usize) {
        let p = w.len();
        let lead = p - 1;
        let x_len = buf.len() - lead;
        if let Some(slot) = self.counts[x_len].get_mut(own) {
            *slot += 1;
        }
        if own == 0 {
            let x = &buf[lead..];
            let starts_v = x.len() >= lead && x[..lead] == *w.suffix();
            let ends_u = x.len() >= lead && x[x.len() - lead..] == *w.prefix();
            self.start_v[x_len] += starts_v as u64;
            self.end_u[x_len] += ends_u as u64;
            self.start_v_end_u[x_len] += (starts_v && ends_u) as u64;
            self.by_prefixed_count[x_len][prefixed] += 1;
        }
        if x_len == max_len {
            return;
        }
        for d in 0..w.base() {
            buf.push(d);
            let n = buf.len();
            let hit = n >= p && buf[n - p..] == *w.digits();
            let inside_x = hit && n - p >= lead;
            self.walk(
                w,
                max_len,
                buf,
                own + inside_x as usize,
                prefixed + hit as usize,
            );
            buf.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blk(base: u32, s: &str) -> Block {
        Block::parse(base, s).unwrap()
    }

    fn config(max_len: usize, kmax: u32) -> BatteryConfig {
        BatteryConfig {
            max_len,
            kmax,
            cap: EnumerationCap::default(),
        }
    }

    #[test]
    fn fibonacci_block_passes() {
        let report = identity_battery(&blk(2, "11"), &config(12, 4)).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.items.len(), Identity::ALL.len());
    }

    #[test]
    fn single_zero_digit_passes() {
        let report = identity_battery(&blk(3, "0"), &config(8, 4)).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn all_short_blocks_pass() {
        for (base, max_len) in [(2u32, 10usize), (3, 6)] {
            for len in 1..=3 {
                for w in Block::all_of_length(base, len).unwrap() {
                    let report = identity_battery(&w, &config(max_len, 3)).unwrap();
                    assert!(report.passed(), "w={w}: {:?}", report.first_failure());
                }
            }
        }
    }

    #[test]
    fn mutated_correlation_fails_with_witness() {
        let w = blk(2, "11");
        let bad = autocorrelation(&w).with_flipped(1).unwrap();
        let report = identity_battery_with(&bad, &config(12, 4)).unwrap();
        let first = report.first_failure().expect("mutation must be detected");
        assert_eq!(first.identity, Identity::ZeroFromV0);
        let witness = first.witness.as_ref().unwrap();
        assert_ne!(witness.expected, witness.actual);
        assert!(!report.item(Identity::Cluster).unwrap().passed);
        assert!(!report.item(Identity::ClusterPartition).unwrap().passed);
        assert!(report.item(Identity::Reversal).unwrap().passed);
    }

    #[test]
    fn mutating_the_constant_term_is_reported_not_raised() {
        let w = blk(3, "2");
        let bad = autocorrelation(&w).with_flipped(0).unwrap();
        let report = identity_battery_with(&bad, &config(5, 2)).unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn tally_matches_direct_definitions() {
        let w = blk(2, "101");
        let t = Tally::collect(&w, 7, 3);
        let cap = EnumerationCap::default();
        for l in 0..=7 {
            let mut start_v = 0;
            let mut end_u = 0;
            crate::words::for_each_string(2, l, cap, |x| {
                if crate::words::occurrences_in(x, w.digits()) == 0 {
                    start_v += x.starts_with(w.suffix()) as u64;
                    end_u += x.ends_with(w.prefix()) as u64;
                }
            })
            .unwrap();
            assert_eq!(t.start_v[l], start_v);
            assert_eq!(t.end_u[l], end_u);
        }
    }
}
