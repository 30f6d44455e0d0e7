//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use blockmass::exactnum::{int, rat, rat_pow, BigRational, Polynomial, RationalFunction};
use blockmass::genfun::battery::{
    identity_battery, identity_battery_with, BatteryConfig, Identity,
};
use blockmass::kempner::{
    enclose_sum, enclose_sum_to_width, limit_bound, measure_histogram, measure_interval,
    partial_sums_by_k, BimalInterval, EncloseOptions, LimitReport, LimitVerdict,
};
use blockmass::words::{admissible_counts, for_each_string, k_star, EnumerationCap};
use blockmass::{
    autocorrelation, gf_k, gf_zero, mass_table, stratified_gf, Block, ClosedForms, DigitString,
};

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn battery() -> Vec<Block> {
    let mut out = Vec::new();
    for base in [2, 3] {
        for p in 1..=3 {
            out.extend(Block::all_of_length(base, p).unwrap());
        }
    }
    for w in ["9", "42", "942", "09"] {
        out.push(Block::parse(10, w).unwrap());
    }
    out
}

fn max_len(w: &Block) -> usize {
    if w.base() == 10 {
        6
    } else {
        12
    }
}

fn b_pow(base: u32, e: i64) -> BigRational {
    rat_pow(&int(base as i64), e)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn coefficient_oracle() -> Outcome {
    let blocks = battery();
    let mut compared = 0usize;
    for w in &blocks {
        let l = max_len(w);
        let counts =
            admissible_counts(w, l, EnumerationCap::default()).map_err(|e| e.to_string())?;
        for k in 0..=4u32 {
            let series = gf_k(w, k)
                .and_then(|z| z.series(l))
                .map_err(|e| e.to_string())?;
            for (len, c) in series.iter().enumerate() {
                let n = counts.get(k as usize, len);
                ensure(*c == int(n as i64), || {
                    format!(
                        "w={w} (b={}) k={k} l={len}: series {c}, brute force {n}",
                        w.base()
                    )
                })?;
                compared += 1;
            }
        }
    }
    Ok(format!(
        "{} blocks, {compared} coefficients equal",
        blocks.len()
    ))
}

fn fibonacci_anchor() -> Outcome {
    let w = Block::parse(2, "11").unwrap();
    let z = gf_zero(&w).map_err(|e| e.to_string())?;
    let expected = RationalFunction::new(
        Polynomial::from_ints([1, 1]),
        Polynomial::from_ints([1, -1, -1]),
    )
    .unwrap();
    ensure(z == expected, || format!("gf_zero = {z}"))?;
    let coeffs = z.series(6).map_err(|e| e.to_string())?;
    let want: Vec<BigRational> = [1, 2, 3, 5, 8, 13, 21].iter().map(|&n| int(n)).collect();
    ensure(coeffs == want, || format!("coefficients {coeffs:?}"))?;
    Ok(format!("Z = {z}; 1,2,3,5,8,13,21"))
}

fn mass_theorems() -> Outcome {
    for w in &battery() {
        let b = w.base();
        let p = w.len() as i64;
        let closed = ClosedForms::for_block(w);
        let table = mass_table(w, 6).map_err(|e| e.to_string())?;
        for k in 1..=6 {
            let m = closed.mass(k).map_err(|e| e.to_string())?;
            ensure(m == b_pow(b, p), || format!("w={w} k={k}: M = {m}"))?;
            ensure(table.get(k, 0) == &m, || {
                format!("w={w} k={k}: automaton mass {}", table.get(k, 0))
            })?;
        }
        let a = autocorrelation(w).polynomial();
        let m0_expected = b_pow(b, p) * a.eval(&rat(1, b as i64));
        let m0 = closed.mass(0).map_err(|e| e.to_string())?;
        ensure(m0 == m0_expected && table.get(0, 0) == &m0, || {
            format!("w={w}: M(0) = {m0}, expected {m0_expected}")
        })?;
        let inv_b = rat(1, b as i64);
        let v0 = closed
            .v0()
            .and_then(|f| f.eval(&inv_b))
            .map_err(|e| e.to_string())?;
        ensure(v0 == int(b as i64), || format!("w={w}: M(v,0) = {v0}"))?;
        // Z_w(v,0,u) = t^(p-2) times the loop factor
        let vu = closed
            .loop_factor()
            .and_then(|f| f.eval(&inv_b))
            .map_err(|e| e.to_string())?
            * rat_pow(&inv_b, p - 2);
        ensure(vu == b_pow(b, 2 - p), || format!("w={w}: M(v,0,u) = {vu}"))?;
    }
    Ok(format!(
        "{} blocks, k = 0..6 plus M(v,0) and M(v,0,u)",
        battery().len()
    ))
}

fn prefix_mass_theorem() -> Outcome {
    let mut checked = 0usize;
    for w in battery().iter().filter(|w| w.base() <= 3) {
        let b = w.base();
        let p = w.len() as i64;
        let table = mass_table(w, 6).map_err(|e| e.to_string())?;
        for len in 0..=4 {
            let mut strings = Vec::new();
            for_each_string(b, len, EnumerationCap::default(), |s| {
                strings.push(s.to_vec())
            })
            .unwrap();
            let expected = b_pow(b, p - len as i64);
            for s in strings {
                let s = DigitString::new(b, s).unwrap();
                let star = k_star(&s, w).unwrap() as u32;
                for k in (1 + star)..=6 {
                    let m = table.prefix_mass(&s, k).map_err(|e| e.to_string())?;
                    ensure(m == expected, || {
                        format!("w={w} s={s} k={k}: {m}, expected {expected}")
                    })?;
                    checked += 1;
                }
            }
        }
        let d1 = int(b as i64 - 1) * b_pow(b, p - 1);
        for k in 1..=6 {
            let mut total = BigRational::zero();
            for a in 1..b {
                total += table
                    .prefix_mass(&DigitString::new(b, vec![a]).unwrap(), k)
                    .map_err(|e| e.to_string())?;
            }
            ensure(total == d1, || {
                format!("w={w} k={k}: leading-digit mass {total}, expected {d1}")
            })?;
        }
    }
    Ok(format!(
        "{checked} prefix masses, leading-digit sums for k = 1..6"
    ))
}

fn independent_derivation() -> Outcome {
    let blocks = battery();
    for w in &blocks {
        for k in 0..=5 {
            let transfer = stratified_gf(w, k).map_err(|e| e.to_string())?;
            let closed = gf_k(w, k).map_err(|e| e.to_string())?;
            ensure(transfer == closed, || {
                format!("w={w} k={k}: {transfer} vs {closed}")
            })?;
        }
    }
    Ok(format!(
        "{} blocks, k = 0..5 structurally equal",
        blocks.len()
    ))
}

fn measure_stabilization() -> Outcome {
    let mut cells_checked = 0usize;
    for w in &battery() {
        let b = w.base();
        let p = w.len() as i64;
        for l in 0..=4u32 {
            for k in 0..=6u32 {
                let cells = measure_histogram(w, k, l, EnumerationCap::default())
                    .map_err(|e| e.to_string())?;
                let total: BigRational = cells.iter().sum();
                let m = ClosedForms::for_block(w)
                    .mass(k)
                    .map_err(|e| e.to_string())?;
                ensure(total == m, || {
                    format!("w={w} k={k} l={l}: cells sum to {total}, M = {m}")
                })?;
                if k > l {
                    let expected = b_pow(b, p - l as i64);
                    if let Some(i) = cells.iter().position(|c| *c != expected) {
                        return Err(format!("w={w} k={k} l={l}: cell {i} = {}", cells[i]));
                    }
                    cells_checked += cells.len();
                }
            }
        }
        // the interval route agrees with the histogram on a sample cell
        let cell = BimalInterval::cell(b, 2, 1).unwrap();
        let direct =
            measure_interval(w, 3, &cell, EnumerationCap::default()).map_err(|e| e.to_string())?;
        ensure(direct == b_pow(b, p - 2), || {
            format!("w={w}: interval route gives {direct}")
        })?;
    }
    Ok(format!(
        "{cells_checked} stabilized cells, all histogram totals equal M"
    ))
}

fn two_pow_neg(e: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << e)
}

fn enclosure_convergence() -> Outcome {
    let w = Block::parse(2, "1").unwrap();
    let options = EncloseOptions::default();
    let mut at_20 = Duration::ZERO;
    let mut last_width = BigRational::zero();
    for depth in 1..=20 {
        let start = Instant::now();
        let e = enclose_sum(&w, 1, depth, &options).map_err(|e| e.to_string())?;
        if depth == 20 {
            at_20 = start.elapsed();
        }
        ensure(e.contains(&int(2)), || {
            format!("depth {depth}: {e} misses 2")
        })?;
        let allowed = int(4) * two_pow_neg(depth) + two_pow_neg(120);
        ensure(e.width() <= allowed, || {
            format!("depth {depth}: width {}", e.width())
        })?;
        last_width = e.width();
    }
    ensure(at_20 < Duration::from_secs(10), || {
        format!("depth 20 took {at_20:?}")
    })?;
    Ok(format!(
        "depths 1..20 contain 2; width at 20 = 2^{:.1}; depth 20 in {at_20:.2?}",
        log2(&last_width)
    ))
}

fn log2(q: &BigRational) -> f64 {
    if q.is_zero() {
        return f64::NEG_INFINITY;
    }
    let approx = |n: &BigInt| {
        let extra = n.bits().saturating_sub(60);
        ((n >> extra as usize).to_string().parse::<f64>().unwrap()).log2() + extra as f64
    };
    approx(q.numer()) - approx(q.denom())
}

fn limit_distance() -> Outcome {
    let options = EncloseOptions::default();
    let mut worst_ratio = 0f64;
    let mut max_depth = 0;
    let mut cases = 0;
    for w in &battery() {
        for k in 1..=5u32 {
            let bound = limit_bound(w.base(), w.len(), k);
            let target = &bound / int(10);
            let (depth, sum) =
                enclose_sum_to_width(w, k, &target, 40, &options).map_err(|e| e.to_string())?;
            ensure(sum.width() < target, || {
                format!(
                    "w={w} k={k}: width {} not below {target} at depth {depth}",
                    sum.width()
                )
            })?;
            let report = LimitReport::from_sum(w, k, depth, sum).map_err(|e| e.to_string())?;
            ensure(report.verdict == LimitVerdict::Verified, || {
                format!(
                    "w={w} (b={}) k={k}: {} {}",
                    w.base(),
                    report.verdict.name(),
                    report.to_json()
                )
            })?;
            let ratio = 2f64.powf(log2(&report.gap_upper) - log2(&bound));
            worst_ratio = worst_ratio.max(ratio);
            max_depth = max_depth.max(depth);
            cases += 1;
        }
    }
    Ok(format!("{cases} cases verified; largest certified gap / bound = {worst_ratio:.3}; max depth {max_depth}"))
}

fn identity_battery_and_mutation() -> Outcome {
    let blocks = battery();
    for w in &blocks {
        let config = BatteryConfig {
            max_len: max_len(w),
            kmax: 4,
            cap: EnumerationCap::default(),
        };
        let report = identity_battery(w, &config).map_err(|e| e.to_string())?;
        if let Some(f) = report.first_failure() {
            return Err(format!(
                "w={w} (b={}): {} failed: {:?}",
                w.base(),
                f.identity,
                f.witness
            ));
        }
        ensure(report.items.len() == Identity::ALL.len(), || {
            "missing identities".into()
        })?;
    }
    // negative controls: every flip of a positive-shift coefficient must be caught
    let mut mutants = 0;
    for w in blocks.iter().filter(|w| w.len() >= 2) {
        let config = BatteryConfig {
            max_len: max_len(w),
            kmax: 4,
            cap: EnumerationCap::default(),
        };
        for i in 1..w.len() {
            let corr = autocorrelation(w).with_flipped(i).unwrap();
            let report = identity_battery_with(&corr, &config).map_err(|e| e.to_string())?;
            ensure(!report.passed(), || {
                format!("w={w}: flipping c_{i} went unnoticed")
            })?;
            mutants += 1;
        }
    }
    Ok(format!(
        "{} blocks pass all {} identities; {mutants} mutants rejected",
        blocks.len(),
        Identity::ALL.len()
    ))
}

const SUM_CAP: u64 = 1 << 16;

fn finiteness() -> Outcome {
    let mut checked = 0;
    for w in &battery() {
        let b = w.base();
        let mut len = 0;
        while BigUint::from(b).pow(len as u32 + 1) <= BigUint::from(SUM_CAP) {
            len += 1;
        }
        let sums =
            partial_sums_by_k(w, 4, len, EnumerationCap(SUM_CAP)).map_err(|e| e.to_string())?;
        for (k, row) in sums.iter().enumerate() {
            let limit = int(b as i64)
                * ClosedForms::for_block(w)
                    .mass(k as u32)
                    .map_err(|e| e.to_string())?;
            for (l, s) in row.iter().enumerate() {
                ensure(*s <= limit, || format!("w={w} k={k} L={l}: {s} > {limit}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} partial sums within b M_w(k), b^L <= {SUM_CAP}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("coefficient oracle equivalence", coefficient_oracle),
        ("Fibonacci anchor", fibonacci_anchor),
        ("mass theorems", mass_theorems),
        ("prefix-mass theorem", prefix_mass_theorem),
        ("independent derivation", independent_derivation),
        ("measure stabilization", measure_stabilization),
        ("enclosure soundness and convergence", enclosure_convergence),
        ("limit bound", limit_distance),
        (
            "identity battery and negative control",
            identity_battery_and_mutation,
        ),
        ("finiteness invariant", finiteness),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {name} ({elapsed:.2?}): {detail}",
                i + 1
            ),
            Err(detail) => {
                failed += 1;
                println!(
                    "criterion {:>2} FAIL  {name} ({elapsed:.2?}): {detail}",
                    i + 1
                );
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
