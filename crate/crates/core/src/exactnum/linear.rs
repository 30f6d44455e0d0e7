use std::ops::{Add, Div, Mul, Sub};

use num_traits::{One, Zero};

use super::{BigRational, RationalFunction};
use crate::error::{Error, Result};

/// An exact field: every nonzero element is invertible and equality is exact.
pub trait Field: Clone + PartialEq + Zero + One
where
    for<'a> &'a Self: Add<&'a Self, Output = Self>
        + Sub<&'a Self, Output = Self>
        + Mul<&'a Self, Output = Self>
        + Div<&'a Self, Output = Self>,
{
}

impl Field for BigRational {}
impl Field for RationalFunction {}

/// Solves `a x = rhs` by Gaussian elimination over an exact field.
///
/// The pivot is the first nonzero entry of the column at or below the
/// current row. The solution is substituted back into the original system
/// before it is returned.
pub fn solve_linear_system<F>(a: &[Vec<F>], rhs: &[F]) -> Result<Vec<F>>
where
    F: Field,
    for<'a> &'a F: Add<&'a F, Output = F>
        + Sub<&'a F, Output = F>
        + Mul<&'a F, Output = F>
        + Div<&'a F, Output = F>,
{
    let n = a.len();
    if rhs.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidArgument(format!(
            "linear system must be square with a matching right-hand side (n = {n})"
        )));
    }
    let mut m: Vec<Vec<F>> = a
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut row = row.clone();
            row.push(r.clone());
            row
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or(Error::Singular)?;
        m.swap(col, pivot);
        let inv = &F::one() / &m[col][col];
        for x in m[col][col..].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x = &*x - &(&factor * p);
            }
        }
    }
    let x: Vec<F> = m
        .into_iter()
        .map(|mut row| row.pop().expect("augmented"))
        .collect();

    for (row, r) in a.iter().zip(rhs) {
        let lhs = row
            .iter()
            .zip(&x)
            .fold(F::zero(), |acc, (aij, xj)| &acc + &(aij * xj));
        if &lhs != r {
            return Err(Error::SolveCheckFailed);
        }
    }
    Ok(x)
}
