//! Fraction-free (Bareiss) elimination over the integers.
//!
//! The fast path works in `i128` with checked arithmetic; on overflow the
//! same elimination is redone over arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact rational with positive denominator, in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    pub num: BigInt,
    pub den: BigInt,
}

impl Rational {
    pub fn new(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let g = num.gcd(&den);
        let (mut num, mut den) = (num / &g, den / &g);
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        Rational { num, den }
    }

    pub fn from_int(v: i128) -> Self {
        Rational {
            num: BigInt::from(v),
            den: BigInt::one(),
        }
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    /// The value as a positive machine integer, if it is one.
    pub fn as_positive_u64(&self) -> Option<u64> {
        if self.is_integer() && self.num.is_positive() {
            self.num.to_u64()
        } else {
            None
        }
    }
}

/// Outcome of solving a square system `A x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solved {
    Unique(Vec<Rational>),
    /// Rank-deficient but consistent.
    Singular,
    /// Inconsistent.
    NoSolution,
}

/// Solves `A x = b` by Bareiss elimination on the augmented matrix.
pub fn solve(a: &[Vec<i128>], b: &[i128]) -> Result<Solved> {
    let aug: Vec<Vec<i128>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    match bareiss_i128(aug.clone()) {
        Some(echelon) => Ok(back_substitute(
            echelon
                .into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect())
                .collect(),
        )),
        None => {
            let big = aug
                .into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect())
                .collect();
            Ok(back_substitute(bareiss_big(big)))
        }
    }
}

/// Determinant of a square matrix, escalating to big integers on overflow.
pub fn determinant(a: &[Vec<i128>]) -> Result<BigInt> {
    let n = a.len();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let (rows, sign) = match bareiss_i128_det(a.to_vec()) {
        Some((m, s)) => (
            m.into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            s,
        ),
        None => {
            let big: Vec<Vec<BigInt>> = a
                .iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect();
            bareiss_big_det(big)
        }
    };
    let det = rows[n - 1][n - 1].clone();
    Ok(if sign < 0 { -det } else { det })
}

/// Checked `i128` determinant; `Err(Overflow)` instead of escalating.
pub fn determinant_i128(a: &[Vec<i128>]) -> Result<i128> {
    if a.is_empty() {
        return Ok(1);
    }
    let n = a.len();
    let (m, sign) = bareiss_i128_det(a.to_vec()).ok_or(Error::Overflow("determinant"))?;
    Ok(sign as i128 * m[n - 1][n - 1])
}

fn bareiss_i128_det(mut m: Vec<Vec<i128>>) -> Option<(Vec<Vec<i128>>, i32)> {
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => {
                    m[n - 1][n - 1] = 0;
                    return Some((m, sign));
                }
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j]
                    .checked_mul(m[k][k])?
                    .checked_sub(m[i][k].checked_mul(m[k][j])?)?;
                m[i][j] = v / prev;
            }
        }
        prev = m[k][k];
    }
    Some((m, sign))
}

fn bareiss_big_det(mut m: Vec<Vec<BigInt>>) -> (Vec<Vec<BigInt>>, i32) {
    let n = m.len();
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => {
                    m[n - 1][n - 1] = BigInt::zero();
                    return (m, sign);
                }
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    (m, sign)
}

/// Row echelon form of an augmented matrix (fraction-free), with pivots
/// chosen column by column. `None` on overflow.
fn bareiss_i128(mut m: Vec<Vec<i128>>) -> Option<Vec<Vec<i128>>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = 1i128;
    let mut r = 0;
    for c in 0..cols.saturating_sub(1) {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = m[i][j]
                    .checked_mul(m[r][c])?
                    .checked_sub(m[i][c].checked_mul(m[r][j])?)?;
                m[i][j] = v / prev;
            }
            m[i][c] = 0;
        }
        prev = m[r][c];
        r += 1;
    }
    Some(m)
}

fn bareiss_big(mut m: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols.saturating_sub(1) {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &m[i][j] * &m[r][c] - &m[i][c] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    m
}

fn back_substitute(m: Vec<Vec<BigInt>>) -> Solved {
    let n = m.len();
    let mut pivots = Vec::new();
    for row in &m {
        match (0..n).find(|&c| !row[c].is_zero()) {
            Some(c) => pivots.push(c),
            None if !row[n].is_zero() => return Solved::NoSolution,
            None => {}
        }
    }
    if pivots.len() < n {
        return Solved::Singular;
    }
    // Full rank, so the echelon form is upper triangular with pivot (i, i).
    let mut x: Vec<Rational> = vec![Rational::from_int(0); n];
    for i in (0..n).rev() {
        // m[i][i] x_i = m[i][n] - sum_{j>i} m[i][j] x_j
        let mut num = m[i][n].clone();
        let mut den = BigInt::one();
        for j in i + 1..n {
            // num/den - m[i][j] * x_j
            num = &num * &x[j].den - &m[i][j] * &x[j].num * &den;
            den *= &x[j].den;
        }
        x[i] = Rational::new(num, den * &m[i][i]);
    }
    Solved::Unique(x)
}
