//! Occurrence-counting automaton and the exact mass tables built on it.
//!
//! State `q` is the length of the longest suffix of the input read so far
//! that is a proper prefix of `w`, so there are `p` states. Reading digit `d`
//! in state `q` moves to `next(q, d)` and emits one occurrence exactly when
//! `q = p - 1` and `d = d_p`.
//!
//! Masses only depend on a prefix `s` through the state reached after `s`
//! and the number of occurrences already seen, which is what makes the
//! prefix-conditioned masses cheap to tabulate.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{solve_linear_system, BigRational, Polynomial, RationalFunction};
use crate::words::{Block, DigitString};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccurrenceAutomaton {
    block: Block,
    next: Vec<u32>,
    emit: Vec<bool>,
}

impl OccurrenceAutomaton {
    /// Failure-function construction; the tables have `p * b` entries.
    pub fn build(w: &Block) -> Self {
        let d = w.digits();
        let p = d.len();
        let b = w.base() as usize;

        // border[i]: length of the longest proper border of d[..i].
        let mut border = vec![0usize; p + 1];
        let mut k = 0;
        for i in 1..p {
            while k > 0 && d[i] != d[k] {
                k = border[k];
            }
            if d[i] == d[k] {
                k += 1;
            }
            border[i + 1] = k;
        }

        let mut next = vec![0u32; p * b];
        let mut emit = vec![false; p * b];
        for q in 0..p {
            for digit in 0..b {
                let (to, hit) = if d[q] as usize == digit {
                    if q + 1 == p {
                        (border[p], true)
                    } else {
                        (q + 1, false)
                    }
                } else if q == 0 {
                    (0, false)
                } else {
                    // border[q] < q, so this row is already filled in
                    (next[border[q] * b + digit] as usize, false)
                };
                next[q * b + digit] = to as u32;
                emit[q * b + digit] = hit;
            }
        }
        OccurrenceAutomaton {
            block: w.clone(),
            next,
            emit,
        }
    }

    pub fn block(&self) -> &Block {
        &self.block
    }

    pub fn base(&self) -> u32 {
        self.block.base()
    }

    pub fn num_states(&self) -> usize {
        self.block.len()
    }

    #[inline]
    pub fn next(&self, q: usize, d: u32) -> usize {
        self.next[q * self.base() as usize + d as usize] as usize
    }

    #[inline]
    pub fn emits(&self, q: usize, d: u32) -> bool {
        self.emit[q * self.base() as usize + d as usize]
    }

    #[inline]
    pub fn step(&self, q: usize, d: u32) -> (usize, bool) {
        let i = q * self.base() as usize + d as usize;
        (self.next[i] as usize, self.emit[i])
    }

    /// Final state and number of emissions after reading `digits` from `q`.
    pub fn run_from(&self, q: usize, digits: &[u32]) -> (usize, usize) {
        digits.iter().fold((q, 0), |(q, n), &d| {
            let (q, e) = self.step(q, d);
            (q, n + e as usize)
        })
    }

    /// Final state and occurrence count `k_w(X)` after reading `X` from state 0.
    pub fn run(&self, digits: &[u32]) -> (usize, usize) {
        self.run_from(0, digits)
    }

    /// Transition counts split by emission: `B_e[q][q']` is the number of
    /// digits leading from `q` to `q'` with emission `e`.
    pub fn count_matrices(&self) -> (Vec<Vec<u64>>, Vec<Vec<u64>>) {
        let n = self.num_states();
        let mut b0 = vec![vec![0u64; n]; n];
        let mut b1 = vec![vec![0u64; n]; n];
        for q in 0..n {
            for d in 0..self.base() {
                let (to, e) = self.step(q, d);
                if e {
                    b1[q][to] += 1;
                } else {
                    b0[q][to] += 1;
                }
            }
        }
        (b0, b1)
    }
}

/// Exact masses `m_j(q)`: the total mass (weight `b^-|x|`) of the strings `x`
/// which, read from state `q`, produce exactly `j` occurrences.
///
/// Row `j` solves `(I - B_0 / b) m_j = [j = 0] 1 + (B_1 / b) m_(j-1)`.
#[derive(Debug, Clone)]
pub struct MassTable {
    automaton: OccurrenceAutomaton,
    system: Vec<Vec<BigRational>>,
    emit_counts: Vec<Vec<BigRational>>,
    masses: Vec<Vec<BigRational>>,
}

impl MassTable {
    pub fn new(automaton: OccurrenceAutomaton, jmax: u32) -> Result<Self> {
        let n = automaton.num_states();
        let inv_b = BigRational::new(One::one(), automaton.base().into());
        let (b0, b1) = automaton.count_matrices();
        let system = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        let diag = if r == c {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        };
                        diag - &inv_b * BigRational::from_integer(b0[r][c].into())
                    })
                    .collect()
            })
            .collect();
        let emit_counts = b1
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&c| &inv_b * BigRational::from_integer(c.into()))
                    .collect()
            })
            .collect();
        let mut table = MassTable {
            automaton,
            system,
            emit_counts,
            masses: Vec::new(),
        };
        table.extend_to(jmax)?;
        Ok(table)
    }

    pub fn for_block(w: &Block, jmax: u32) -> Result<Self> {
        MassTable::new(OccurrenceAutomaton::build(w), jmax)
    }

    /// Solves further rows until `jmax` is covered; existing rows are kept.
    pub fn extend_to(&mut self, jmax: u32) -> Result<()> {
        let n = self.automaton.num_states();
        while self.masses.len() <= jmax as usize {
            let rhs: Vec<BigRational> = match self.masses.last() {
                None => vec![BigRational::one(); n],
                Some(prev) => self
                    .emit_counts
                    .iter()
                    .map(|row| row.iter().zip(prev).map(|(a, m)| a * m).sum())
                    .collect(),
            };
            let row = solve_linear_system(&self.system, &rhs)?;
            self.masses.push(row);
        }
        Ok(())
    }

    pub fn automaton(&self) -> &OccurrenceAutomaton {
        &self.automaton
    }

    pub fn jmax(&self) -> u32 {
        (self.masses.len() - 1) as u32
    }

    /// `m_j(q)`; panics if `j > jmax`.
    pub fn get(&self, j: u32, q: usize) -> &BigRational {
        &self.masses[j as usize][q]
    }

    pub fn row(&self, j: u32) -> &[BigRational] {
        &self.masses[j as usize]
    }

    /// Mass of the `k`-admissible strings with prefix `s`:
    /// `b^-|s| m_(k - k_w(s))(q_s)`, zero when `k < k_w(s)`.
    pub fn prefix_mass(&self, s: &DigitString, k: u32) -> Result<BigRational> {
        if s.base() != self.automaton.base() {
            return Err(Error::BaseMismatch {
                left: s.base(),
                right: self.automaton.base(),
            });
        }
        if k > self.jmax() {
            return Err(Error::InvalidArgument(format!(
                "k = {k} is beyond the tabulated range {}",
                self.jmax()
            )));
        }
        let (q, seen) = self.automaton.run(s.digits());
        if seen > k as usize {
            return Ok(BigRational::zero());
        }
        let scale = num_traits::pow(BigRational::new(One::one(), s.base().into()), s.len());
        Ok(scale * self.get(k - seen as u32, q))
    }
}

/// Builds the automaton for `w` and tabulates `m_j` for `j <= jmax`.
pub fn mass_table(w: &Block, jmax: u32) -> Result<MassTable> {
    MassTable::for_block(w, jmax)
}

/// Total mass of the `k`-admissible strings having `s` as a prefix.
pub fn prefix_mass(w: &Block, s: &DigitString, k: u32) -> Result<BigRational> {
    if s.base() != w.base() {
        return Err(Error::BaseMismatch {
            left: s.base(),
            right: w.base(),
        });
    }
    MassTable::for_block(w, k)?.prefix_mass(s, k)
}

/// Generating function of the `k`-admissible strings by the transfer-matrix
/// method: solve `(I - t B_0) G_j = [j = 0] 1 + t B_1 G_(j-1)` over the field
/// of rational functions and read off state 0.
pub fn stratified_gf(w: &Block, k: u32) -> Result<RationalFunction> {
    let automaton = OccurrenceAutomaton::build(w);
    let n = automaton.num_states();
    let (b0, b1) = automaton.count_matrices();
    let t_times = |c: u64| {
        RationalFunction::from_poly(Polynomial::monomial(BigRational::from_integer(c.into()), 1))
    };
    let system: Vec<Vec<RationalFunction>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let diag = if r == c {
                        RationalFunction::one()
                    } else {
                        RationalFunction::zero()
                    };
                    &diag - &t_times(b0[r][c])
                })
                .collect()
        })
        .collect();
    let t_b1: Vec<Vec<RationalFunction>> = b1
        .iter()
        .map(|row| row.iter().map(|&c| t_times(c)).collect())
        .collect();

    let mut g = solve_linear_system(&system, &vec![RationalFunction::one(); n])?;
    for _ in 0..k {
        let rhs: Vec<RationalFunction> = t_b1
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&g)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(RationalFunction::zero(), |acc, (a, x)| &acc + &(a * x))
            })
            .collect();
        g = solve_linear_system(&system, &rhs)?;
    }
    Ok(g.swap_remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use crate::genfun::{gf_k, gf_zero, mass};
    use crate::words::{count_occurrences, k_star, occurrences_in};
    use rand::{Rng, SeedableRng};

    fn blk(base: u32, s: &str) -> Block {
        Block::parse(base, s).unwrap()
    }

    fn ds(base: u32, s: &str) -> DigitString {
        DigitString::parse(base, s).unwrap()
    }

    #[test]
    fn single_digit_automaton() {
        let a = OccurrenceAutomaton::build(&blk(2, "1"));
        assert_eq!(a.num_states(), 1);
        assert_eq!(a.step(0, 0), (0, false));
        assert_eq!(a.step(0, 1), (0, true));
    }

    #[test]
    fn overlap_is_retained() {
        let a = OccurrenceAutomaton::build(&blk(2, "11"));
        assert_eq!(a.step(1, 1), (1, true));
        assert_eq!(a.run(&[1, 1, 1, 1]).1, 3);
    }

    #[test]
    fn transition_invariants() {
        for base in 2..=4 {
            for len in 1..=4 {
                for w in Block::all_of_length(base, len).unwrap() {
                    let a = OccurrenceAutomaton::build(&w);
                    let p = w.len();
                    for q in 0..p {
                        for d in 0..base {
                            let (to, e) = a.step(q, d);
                            assert!(to <= (q + 1).min(p - 1), "w={w} q={q} d={d}");
                            assert_eq!(e, q == p - 1 && d == w.digits()[p - 1]);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn run_agrees_with_direct_count_on_random_strings() {
        let mut rng = seeded_rng();
        for _ in 0..10_000 {
            let base = rng.gen_range(2..=4u32);
            let p = rng.gen_range(1..=4usize);
            let w: Vec<u32> = (0..p).map(|_| rng.gen_range(0..base)).collect();
            let x: Vec<u32> = (0..rng.gen_range(0..30))
                .map(|_| rng.gen_range(0..base))
                .collect();
            let a = OccurrenceAutomaton::build(&Block::new(base, w.clone()).unwrap());
            assert_eq!(a.run(&x).1, occurrences_in(&x, &w));
        }
    }

    fn seeded_rng() -> rand::rngs::StdRng {
        rand::rngs::StdRng::seed_from_u64(0x5eed)
    }

    #[test]
    fn single_digit_masses() {
        let t = mass_table(&blk(2, "1"), 5).unwrap();
        for j in 0..=5 {
            assert_eq!(t.get(j, 0), &int(2));
        }
    }

    #[test]
    fn masses_from_the_start_state_match_closed_forms() {
        for (base, w) in [(2, "11"), (2, "101"), (3, "0"), (3, "120"), (10, "942")] {
            let w = blk(base, w);
            let t = mass_table(&w, 6).unwrap();
            for j in 0..=6 {
                assert_eq!(t.get(j, 0), &mass(&w, j).unwrap(), "w={w} j={j}");
            }
        }
    }

    #[test]
    fn state_after_v_has_constant_mass() {
        // M_w(v, k) = b^-(p-1) m_k(q_v) = b for every k.
        for (base, w) in [(2, "11"), (2, "110"), (3, "1"), (3, "201"), (10, "09")] {
            let w = blk(base, w);
            let t = mass_table(&w, 6).unwrap();
            let v = DigitString::new(base, w.suffix().to_vec()).unwrap();
            for k in 0..=6 {
                assert_eq!(
                    t.prefix_mass(&v, k).unwrap(),
                    int(base as i64),
                    "w={w} k={k}"
                );
            }
        }
    }

    #[test]
    fn prefix_mass_examples() {
        let w = blk(2, "11");
        assert_eq!(prefix_mass(&w, &ds(2, ""), 3).unwrap(), int(4));
        assert_eq!(prefix_mass(&w, &ds(2, "1111"), 2).unwrap(), int(0));
        assert_eq!(prefix_mass(&w, &ds(2, "01"), 3).unwrap(), int(1));
        assert!(matches!(
            prefix_mass(&w, &ds(3, "2"), 1),
            Err(Error::BaseMismatch { .. })
        ));
    }

    #[test]
    fn prefix_mass_stabilizes_small_sweep() {
        for (base, w) in [(2, "11"), (2, "010"), (3, "22"), (3, "102")] {
            let w = blk(base, w);
            let t = mass_table(&w, 6).unwrap();
            let p = w.len() as i64;
            for len in 0..=3 {
                crate::words::for_each_string(base, len, Default::default(), |s| {
                    let s = DigitString::new(base, s.to_vec()).unwrap();
                    let ks = k_star(&s, &w).unwrap() as u32;
                    for k in ks + 1..=6 {
                        let expected = crate::exactnum::rat_pow(&int(base as i64), p - len as i64);
                        assert_eq!(t.prefix_mass(&s, k).unwrap(), expected, "w={w} s={s} k={k}");
                    }
                })
                .unwrap();
            }
        }
    }

    #[test]
    fn partition_over_overlap_extensions() {
        // mass(s, k) = sum over |z| = p - 1 of mass(s z, k), each computed through the state after s z.
        let w = blk(3, "121");
        let t = mass_table(&w, 5).unwrap();
        for s in ["", "1", "12", "2121", "0"] {
            let s = ds(3, s);
            for k in 0..=5 {
                let mut total = BigRational::zero();
                crate::words::for_each_string(3, w.len() - 1, Default::default(), |z| {
                    let sz = s.concat(&DigitString::new(3, z.to_vec()).unwrap()).unwrap();
                    assert_eq!(
                        t.automaton().run(sz.digits()).1,
                        count_occurrences(&sz, &w).unwrap()
                    );
                    total += t.prefix_mass(&sz, k).unwrap();
                })
                .unwrap();
                // strings with prefix s that are shorter than |s| + p - 1 have fewer than p digits past s
                let mut short = BigRational::zero();
                for extra in 0..w.len() - 1 {
                    crate::words::for_each_string(3, extra, Default::default(), |y| {
                        let sy = s.concat(&DigitString::new(3, y.to_vec()).unwrap()).unwrap();
                        if count_occurrences(&sy, &w).unwrap() == k as usize {
                            short += rat(1, 3i64.pow(sy.len() as u32));
                        }
                    })
                    .unwrap();
                }
                assert_eq!(t.prefix_mass(&s, k).unwrap(), total + short, "s={s} k={k}");
            }
        }
    }

    #[test]
    fn digit_prefixes_each_carry_b_to_the_p_minus_one() {
        for (base, w) in [(2, "1"), (2, "11"), (3, "0"), (3, "011"), (10, "42")] {
            let w = blk(base, w);
            let t = mass_table(&w, 6).unwrap();
            let expected = crate::exactnum::rat_pow(&int(base as i64), w.len() as i64 - 1);
            for k in 1..=6 {
                let mut nonzero = BigRational::zero();
                for d in 0..base {
                    let m = t
                        .prefix_mass(&DigitString::new(base, vec![d]).unwrap(), k)
                        .unwrap();
                    assert_eq!(m, expected, "w={w} d={d} k={k}");
                    if d != 0 {
                        nonzero += m;
                    }
                }
                assert_eq!(nonzero, &expected * int(base as i64 - 1));
            }
        }
    }

    #[test]
    fn extend_keeps_existing_rows() {
        let w = blk(3, "11");
        let mut t = mass_table(&w, 1).unwrap();
        let first = t.row(1).to_vec();
        t.extend_to(4).unwrap();
        assert_eq!(t.jmax(), 4);
        assert_eq!(t.row(1), &first[..]);
        assert!(t.prefix_mass(&ds(3, ""), 5).is_err());
    }

    #[test]
    fn stratified_examples() {
        let f = stratified_gf(&blk(2, "11"), 0).unwrap();
        assert_eq!(f, gf_zero(&blk(2, "11")).unwrap());
        let g = stratified_gf(&blk(2, "1"), 1).unwrap();
        let expected = RationalFunction::new(
            Polynomial::from_ints([0, 1]),
            Polynomial::from_ints([1, -2, 1]),
        )
        .unwrap();
        assert_eq!(g, expected);
        assert_eq!(
            stratified_gf(&blk(3, "10"), 2).unwrap(),
            gf_k(&blk(3, "10"), 2).unwrap()
        );
    }
}
