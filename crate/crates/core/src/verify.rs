//! Every exact check for one block, bundled into a single report.
//!
//! Checks that depend on the autocorrelation take it from a [`Correlation`]
//! that can be deliberately corrupted with [`VerifyConfig::mutate`]; the
//! automaton and the enumerations always use the block itself.

use num_traits::Zero;
use serde::Serialize;

use crate::automaton::{stratified_gf, MassTable};
use crate::error::Result;
use crate::exactnum::{rat_pow, rational_to_string, BigRational};
use crate::genfun::battery::{identity_battery_with, BatteryConfig, BatteryReport};
use crate::genfun::{autocorrelation, ClosedForms, Correlation};
use crate::kempner::{
    enclose_sum, measure_histogram, partial_sums_by_k, EncloseOptions, LimitReport, LimitVerdict,
};
use crate::words::{for_each_string, k_star, Block, DigitString, EnumerationCap};

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub kmax: u32,
    pub max_len: usize,
    /// Refinement depth of the sum enclosures.
    pub depth: usize,
    pub frac_bits: u32,
    pub cap: EnumerationCap,
    /// Flip this autocorrelation coefficient before building the closed forms.
    pub mutate: Option<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            kmax: 4,
            max_len: 10,
            depth: 12,
            frac_bits: 128,
            cap: EnumerationCap::default(),
            mutate: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Enclosures too wide to decide; not counted as a failure.
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub base: u32,
    pub block: String,
    pub mutated_coefficient: Option<usize>,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub battery: BatteryReport,
    pub limits: Vec<serde_json::Value>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn record(&mut self, name: &str, failure: Option<String>) {
        self.0.push(Check {
            name: name.to_string(),
            status: if failure.is_some() {
                Status::Fail
            } else {
                Status::Pass
            },
            detail: failure.unwrap_or_default(),
        });
    }
}

/// Largest `L <= max_len` with `b^L` within both `cap` and `limit`.
fn feasible_len(base: u32, max_len: usize, cap: EnumerationCap, limit: u64) -> usize {
    let bound = cap.0.min(limit);
    let mut len = 0;
    while len < max_len
        && (base as u64)
            .checked_pow(len as u32 + 1)
            .is_some_and(|n| n <= bound)
    {
        len += 1;
    }
    len
}

pub fn verify_block(w: &Block, config: &VerifyConfig) -> Result<VerifyReport> {
    let mut corr = autocorrelation(w);
    if let Some(i) = config.mutate {
        corr = corr.with_flipped(i)?;
    }
    verify_with(&corr, config)
}

fn verify_with(corr: &Correlation, config: &VerifyConfig) -> Result<VerifyReport> {
    let w = corr.block();
    let b = w.base();
    let p = w.len();
    let bp = rat_pow(&BigRational::from_integer(b.into()), p as i64);
    let closed = ClosedForms::new(corr);
    let table = MassTable::for_block(w, config.kmax.max(1))?;
    let mut checks = Checks(Vec::new());

    let battery = identity_battery_with(
        corr,
        &BatteryConfig {
            max_len: config.max_len,
            kmax: config.kmax,
            cap: config.cap,
        },
    )?;
    for item in &battery.items {
        let failure = item.witness.as_ref().filter(|_| !item.passed).map(|wit| {
            format!(
                "length {}: expected {}, got {} ({})",
                wit.length, wit.expected, wit.actual, wit.note
            )
        });
        let failure = if item.passed {
            None
        } else {
            Some(failure.unwrap_or_default())
        };
        checks.record(&format!("identity:{}", item.identity), failure);
    }

    // Total masses: closed forms against the automaton's mass table.
    let mut failure = None;
    for k in 0..=config.kmax {
        let closed_mass = closed.mass(k)?;
        let automaton_mass = table.get(k, 0).clone();
        if closed_mass != automaton_mass {
            failure = Some(format!(
                "M({k}): closed {closed_mass}, automaton {automaton_mass}"
            ));
            break;
        }
        if k >= 1 && closed_mass != bp {
            failure = Some(format!("M({k}) = {closed_mass}, expected {bp}"));
            break;
        }
    }
    if failure.is_none() && closed.mass_zero_closed() != *table.get(0, 0) {
        failure = Some(format!(
            "b^p A(1/b) = {}, automaton {}",
            closed.mass_zero_closed(),
            table.get(0, 0)
        ));
    }
    checks.record("mass:total", failure);

    let inv_b = closed.inv_base();
    let v0_mass = closed.v0()?.eval(&inv_b)?;
    // the loop factor carries t^(2-p)
    let loop_mass = closed.loop_factor()?.eval(&inv_b)? * rat_pow(&inv_b, p as i64 - 2);
    let expected_loop = rat_pow(&BigRational::from_integer(b.into()), 2 - p as i64);
    checks.record(
        "mass:v0_and_loop",
        (v0_mass != BigRational::from_integer(b.into()) || loop_mass != expected_loop)
            .then(|| format!("M(v,0) = {v0_mass}, loop mass = {loop_mass}")),
    );

    let mut failure = None;
    for k in 0..=config.kmax {
        let transfer = stratified_gf(w, k)?;
        let closed_k = closed.k(k)?;
        if transfer != closed_k {
            failure = Some(format!("k = {k}: automaton {transfer}, closed {closed_k}"));
            break;
        }
    }
    checks.record("genfun:automaton_route", failure);

    // Prefix masses stabilize once k >= 1 + k*(s).
    let prefix_len = feasible_len(b, 4, config.cap, 1 << 12);
    let mut failure = None;
    'outer: for len in 0..=prefix_len {
        let expected = rat_pow(&BigRational::from_integer(b.into()), p as i64 - len as i64);
        let mut strings = Vec::new();
        for_each_string(b, len, config.cap, |s| strings.push(s.to_vec()))?;
        for s in strings {
            let s = DigitString::new(b, s)?;
            let star = k_star(&s, w)? as u32;
            for k in (1 + star)..=config.kmax {
                let got = table.prefix_mass(&s, k)?;
                if got != expected {
                    failure = Some(format!("s = {s}, k = {k}: {got}, expected {expected}"));
                    break 'outer;
                }
            }
        }
    }
    checks.record("mass:prefix", failure);

    let d1_expected = BigRational::from_integer((b - 1).into())
        * rat_pow(&BigRational::from_integer(b.into()), p as i64 - 1);
    let mut failure = None;
    for k in 1..=config.kmax {
        let mut total = BigRational::zero();
        for a in 1..b {
            total += table.prefix_mass(&DigitString::new(b, vec![a])?, k)?;
        }
        if total != d1_expected {
            failure = Some(format!(
                "k = {k}: leading-digit mass {total}, expected {d1_expected}"
            ));
            break;
        }
    }
    checks.record("mass:leading_digit", failure);

    // Histograms: stabilized cells and totals against the closed masses.
    let resolution = feasible_len(b, 3, config.cap, 1 << 12);
    let mut failure = None;
    'hist: for l in 0..=resolution as u32 {
        for k in 0..=config.kmax {
            let cells = measure_histogram(w, k, l, config.cap)?;
            let total: BigRational = cells.iter().sum();
            let expected_total = closed.mass(k)?;
            if total != expected_total {
                failure = Some(format!(
                    "l = {l}, k = {k}: cells sum to {total}, expected {expected_total}"
                ));
                break 'hist;
            }
            if k > l {
                let cell = rat_pow(&BigRational::from_integer(b.into()), p as i64 - l as i64);
                if let Some(i) = cells.iter().position(|c| *c != cell) {
                    failure = Some(format!(
                        "l = {l}, k = {k}: cell {i} = {}, expected {cell}",
                        cells[i]
                    ));
                    break 'hist;
                }
            }
        }
    }
    checks.record("measure:stabilization", failure);

    let sum_len = feasible_len(b, config.max_len, config.cap, 1 << 14);
    let sums = partial_sums_by_k(w, config.kmax, sum_len, config.cap)?;
    let mut failure = None;
    for (k, row) in sums.iter().enumerate() {
        let limit = BigRational::from_integer(b.into()) * closed.mass(k as u32)?;
        if let Some(l) = row.iter().position(|s| *s > limit) {
            failure = Some(format!(
                "k = {k}, L = {l}: partial sum {} exceeds {limit}",
                row[l]
            ));
            break;
        }
    }
    checks.record("sum:finiteness", failure);

    // Enclosures of S_w(k) against b^p log b.
    let options = EncloseOptions {
        frac_bits: config.frac_bits,
        cap: config.cap,
    };
    let mut limits = Vec::new();
    let mut failure = None;
    let mut undecided = Vec::new();
    for k in 1..=config.kmax {
        let sum = enclose_sum(w, k, config.depth, &options)?;
        let known = sums[k as usize][sum_len.min(config.depth)].clone();
        if known > sum.upper() {
            failure.get_or_insert(format!(
                "k = {k}: partial sum {known} above enclosure {sum}"
            ));
        }
        let report = LimitReport::from_sum(w, k, config.depth, sum)?;
        match report.verdict {
            LimitVerdict::Verified => {}
            LimitVerdict::Violated => {
                failure.get_or_insert(format!(
                    "k = {k}: gap at least {} exceeds {}",
                    rational_to_string(&report.gap_lower),
                    rational_to_string(&report.bound)
                ));
            }
            LimitVerdict::Undecided => undecided.push(k),
        }
        limits.push(report.to_json());
    }
    match (failure, undecided.is_empty()) {
        (Some(f), _) => checks.record("sum:limit_bound", Some(f)),
        (None, true) => checks.record("sum:limit_bound", None),
        (None, false) => checks.0.push(Check {
            name: "sum:limit_bound".into(),
            status: Status::Undecided,
            detail: format!("undecided for k in {undecided:?}; increase the depth"),
        }),
    }

    let original = autocorrelation(w);
    let mutated_coefficient = corr
        .coefficients()
        .iter()
        .zip(original.coefficients())
        .position(|(x, y)| x != y);
    let checks = checks.0;
    Ok(VerifyReport {
        base: b,
        block: w.to_string(),
        mutated_coefficient,
        passed: checks.iter().all(|c| c.status != Status::Fail),
        checks,
        battery,
        limits,
    })
}
