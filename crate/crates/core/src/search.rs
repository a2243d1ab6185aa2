//! Structured search for anticanonical quasi-smooth hypersurfaces in
//! `P(a_0, ..., a_4)`.
//!
//! Every such family has, for each variable, a monomial `x_i^{m_i} x_{e(i)}`
//! of degree `d = sum(a) - 1`. Read with the `m_i` and the pointer `e` fixed
//! these are five linear equations in the weights:
//!
//! ```text
//! m_i a_i + a_{e(i)} - (a_0 + ... + a_4) = -1        (i = 0..4)
//! ```
//!
//! With `a_0, a_1 <= a_2 <= a_3 <= a_4` the exponents `m_2, m_3, m_4` are
//! bounded a priori and, away from a few degenerate shapes, so is one of
//! `m_0, m_1`; we name that one `m_1`. For fixed `(e, m_1, ..., m_4)` the
//! system determines
//!
//! ```text
//! a_0 = gamma_0 / (alpha m_0 + beta)
//! ```
//!
//! so `alpha != 0` leaves finitely many `m_0`, while `alpha = 0` gives weights
//! that are affine in `m_0`: the pieces from which the infinite series are
//! assembled. The degenerate shapes all have `a_0 = a_1 = 1` and are covered
//! by a separate box search.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::brute::{brute_search, BoxKind, BruteConfig};
use crate::error::{Error, Result};
use crate::linalg::{determinant, solve, Rational, Solved};
use rayon::prelude::*;

use crate::qsmooth::{check_qs13, first_failure};
use crate::weights::{gcd_all, well_formedness_defect, HypersurfaceFamily, WeightSystem};

/// Right-hand side of the vertex system: `d = sum(a) + value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsKind {
    Fano,
    #[serde(rename = "cy")]
    CalabiYau,
}

impl RhsKind {
    pub fn value(self) -> i128 {
        match self {
            RhsKind::Fano => -1,
            RhsKind::CalabiYau => 0,
        }
    }
}

/// One configuration of the vertex system: the pointer `e` (row `i` of `U`
/// has its single 1 in column `e[i]`) and the exponents, any of which may be
/// left unknown.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchCase {
    pub e: [usize; 5],
    pub m: [Option<u64>; 5],
    pub rhs: RhsKind,
}

impl SearchCase {
    pub fn fano(e: [usize; 5], m: [u64; 5]) -> Self {
        SearchCase {
            e,
            m: m.map(Some),
            rhs: RhsKind::Fano,
        }
    }

    pub fn u_matrix(&self) -> [[u8; 5]; 5] {
        let mut u = [[0; 5]; 5];
        for (i, &j) in self.e.iter().enumerate() {
            u[i][j] = 1;
        }
        u
    }

    /// `M + J + U` with the unknown exponents replaced by `fill`.
    pub fn matrix(&self, fill: u64) -> Vec<Vec<i128>> {
        (0..5)
            .map(|i| {
                (0..5)
                    .map(|j| {
                        let mut v = -1i128;
                        if i == j {
                            v += self.m[i].unwrap_or(fill) as i128;
                        }
                        if self.e[i] == j {
                            v += 1;
                        }
                        v
                    })
                    .collect()
            })
            .collect()
    }

    pub fn rhs_vector(&self) -> Vec<i128> {
        vec![self.rhs.value(); 5]
    }

    /// Does `a` satisfy every row whose exponent is known?
    pub fn satisfied_by(&self, a: &[u64]) -> bool {
        let sum: i128 = a.iter().map(|&x| x as i128).sum();
        (0..5).all(|i| match self.m[i] {
            None => true,
            Some(m) => m as i128 * a[i] as i128 + a[self.e[i]] as i128 - sum == self.rhs.value(),
        })
    }
}

/// An exact solution of a configuration: a point, or the affine family
/// `a_i = p_i + q_i m_0` when `m_0` is left free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RationalSolution {
    Point(Vec<Rational>),
    Line { p: Vec<Rational>, q: Vec<Rational> },
}

impl RationalSolution {
    /// The weights at `m_0 = t` if they are all positive integers.
    pub fn positive_integral_at(&self, t: u64) -> Option<Vec<u64>> {
        match self {
            RationalSolution::Point(v) => v.iter().map(Rational::as_positive_u64).collect(),
            RationalSolution::Line { p, q } => p
                .iter()
                .zip(q)
                .map(|(p, q)| {
                    let num = &p.num * &q.den + BigInt::from(t) * &q.num * &p.den;
                    Rational::new(num, &p.den * &q.den).as_positive_u64()
                })
                .collect(),
        }
    }
}

/// The a priori exponent ranges of the Fano search in dimension four.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentBounds {
    pub m2: RangeInclusive<u64>,
    pub m3: RangeInclusive<u64>,
    pub m4: RangeInclusive<u64>,
    /// Cap on the smaller of `m_0, m_1` in the generic case.
    pub case1_cap: u64,
}

pub fn exponent_bounds() -> ExponentBounds {
    ExponentBounds {
        m2: 3..=16,
        m3: 2..=6,
        m4: 1..=3,
        case1_cap: 83,
    }
}

/// Smallest admissible `m_1` (and `m_0`): `m a >= a_0 + a_1 + a_2 + a_3 - 1`
/// with the remaining weights at least `a`.
const M01_MIN: u64 = 3;

/// Exact solve of a configuration with every exponent fixed.
pub fn solve_case(c: &SearchCase) -> Result<Solved> {
    if c.m.iter().any(Option::is_none) {
        return Err(Error::UnsupportedConfiguration(
            "solve_case needs every exponent".into(),
        ));
    }
    solve(&c.matrix(0), &c.rhs_vector())
}

/// Result of solving a configuration whose only unknown is `m_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OneUnknown {
    /// `alpha != 0`: every `m_0 >= 1` that gives positive integral weights.
    Bounded {
        alpha: BigInt,
        beta: BigInt,
        gamma0: BigInt,
        solutions: Vec<(u64, Vec<u64>)>,
    },
    /// `alpha = 0`: the weights are affine in `m_0`.
    Series {
        beta: BigInt,
        gamma0: BigInt,
        line: RationalSolution,
    },
    /// The system is singular for every `m_0`.
    Singular,
}

/// Solves a configuration in which only `m_0` is unknown. The determinant is
/// `alpha m_0 + beta` and `a_0 = gamma_0 / (alpha m_0 + beta)`.
pub fn solve_one_unknown(c: &SearchCase) -> Result<OneUnknown> {
    if c.m[0].is_some() || c.m[1..].iter().any(Option::is_none) {
        return Err(Error::UnsupportedConfiguration(
            "solve_one_unknown needs exactly m_0 unknown".into(),
        ));
    }
    let a0 = c.matrix(0);
    let minor: Vec<Vec<i128>> = a0[1..].iter().map(|r| r[1..].to_vec()).collect();
    let alpha = determinant(&minor)?;
    let beta = determinant(&a0)?;
    let rhs = c.rhs_vector();
    let mut g = a0.clone();
    for (row, &b) in g.iter_mut().zip(&rhs) {
        row[0] = b;
    }
    let gamma0 = determinant(&g)?;
    if alpha.is_zero() {
        if beta.is_zero() {
            return Ok(OneUnknown::Singular);
        }
        let at = |t: u64| -> Result<Vec<Rational>> {
            match solve(&c.matrix(t), &rhs)? {
                Solved::Unique(v) => Ok(v),
                _ => Err(Error::UnsupportedConfiguration("rank dropped".into())),
            }
        };
        let p = at(0)?;
        let p1 = at(1)?;
        let q = p1
            .iter()
            .zip(&p)
            .map(|(x, y)| Rational::new(&x.num * &y.den - &y.num * &x.den, &x.den * &y.den))
            .collect();
        return Ok(OneUnknown::Series {
            beta,
            gamma0,
            line: RationalSolution::Line { p, q },
        });
    }
    // a_0 >= 1 forces |alpha m_0 + beta| <= |gamma_0|.
    let mut solutions = Vec::new();
    if !gamma0.is_zero() {
        let g = gamma0.to_i128().ok_or(Error::Overflow("gamma_0"))?.abs();
        let al = alpha.to_i128().ok_or(Error::Overflow("alpha"))?;
        let be = beta.to_i128().ok_or(Error::Overflow("beta"))?;
        let (lo, hi) = if al > 0 {
            (div_ceil(-g - be, al), div_floor(g - be, al))
        } else {
            (div_ceil(g - be, al), div_floor(-g - be, al))
        };
        for t in lo.max(1)..=hi {
            let mut full = c.clone();
            full.m[0] = Some(t as u64);
            if let Solved::Unique(v) = solve_case(&full)? {
                if let Some(w) = RationalSolution::Point(v).positive_integral_at(0) {
                    solutions.push((t as u64, w));
                }
            }
        }
    }
    Ok(OneUnknown::Bounded {
        alpha,
        beta,
        gamma0,
        solutions,
    })
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}

fn det3(m: [[i64; 3]; 3]) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Rows 1..4 solved for `a_1..a_4` in terms of `a_0`:
/// `alpha a_i = u_i - v_i a_0`. Index 0 of `u`, `v` is unused.
///
/// Entries are at most 84 in absolute value, so every quantity here and in
/// the scan stays far inside `i64` (overflow checks are on in all profiles).
#[derive(Clone, Debug)]
struct Tail {
    e: [usize; 5],
    m: [u64; 5],
    alpha: i64,
    u: [i64; 5],
    v: [i64; 5],
}

impl Tail {
    fn new(e: [usize; 5], m: [u64; 5]) -> Tail {
        // c[r][k] is the coefficient of a_{k+1} in row r+1.
        let mut c = [[0i64; 4]; 4];
        let mut b0 = [0i64; 4];
        for r in 0..4 {
            let i = r + 1;
            for k in 0..4 {
                let j = k + 1;
                c[r][k] = -1 + if i == j { m[i] as i64 } else { 0 } + (e[i] == j) as i64;
            }
            b0[r] = -1 + (e[i] == 0) as i64;
        }
        // adj[k][r] = (-1)^(r+k) * minor(r, k)
        let mut adj = [[0i64; 4]; 4];
        for r in 0..4 {
            for k in 0..4 {
                let mut sub = [[0i64; 3]; 3];
                for (si, rr) in (0..4).filter(|&x| x != r).enumerate() {
                    for (sj, kk) in (0..4).filter(|&x| x != k).enumerate() {
                        sub[si][sj] = c[rr][kk];
                    }
                }
                let sign = if (r + k) % 2 == 0 { 1 } else { -1 };
                adj[k][r] = sign * det3(sub);
            }
        }
        let alpha: i64 = (0..4).map(|k| c[0][k] * adj[k][0]).sum();
        let mut u = [0i64; 5];
        let mut v = [0i64; 5];
        for k in 0..4 {
            u[k + 1] = -(0..4).map(|r| adj[k][r]).sum::<i64>();
            v[k + 1] = (0..4).map(|r| adj[k][r] * b0[r]).sum::<i64>();
        }
        Tail { e, m, alpha, u, v }
    }
}

/// Affine piece `a_i = (n_i + s_i m_0) / den`, valid for `m_0 >= 3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinePiece {
    pub e: [usize; 5],
    pub m: [u64; 5],
    pub den: i128,
    pub n: [i128; 5],
    pub s: [i128; 5],
}

impl LinePiece {
    /// Weights at `m_0 = t` if positive integral; labels as in the system.
    pub fn at(&self, t: i128) -> Option<[u64; 5]> {
        let mut out = [0u64; 5];
        for i in 0..5 {
            let num = self.n[i] + self.s[i] * t;
            if num % self.den != 0 {
                return None;
            }
            let a = num / self.den;
            if a <= 0 {
                return None;
            }
            out[i] = a as u64;
        }
        Some(out)
    }
}

/// Raw counts of the structured search, kept for comparison with the
/// published diagnostics.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchDiagnostics {
    pub configurations: u64,
    pub alpha_nonzero: u64,
    pub alpha_zero: u64,
    pub fully_singular: u64,
    pub singular_points: u64,
    pub m0_iterations: u64,
    pub raw_solutions: u64,
    pub line_pieces: u64,
    pub line_members: u64,
}

#[derive(Default)]
struct Sink {
    diag: SearchDiagnostics,
    /// Weight tuples in labelled order (not yet sorted).
    finite: BTreeSet<[u64; 5]>,
    lines: Vec<LinePiece>,
    /// Configurations whose singular point carries a positive line.
    singular_lines: Vec<(SearchCase, [u64; 5])>,
}

/// Narrows `[lo, hi]` to the integers `x` with `c + k x >= 0`.
fn constrain(c: i64, k: i64, lo: &mut i64, hi: &mut i64) {
    if k > 0 {
        *lo = (*lo).max(-(c.div_euclid(k)));
    } else if k < 0 {
        *hi = (*hi).min(c.div_euclid(-k));
    } else if c < 0 {
        *lo = 1;
        *hi = 0;
    }
}

impl Sink {
    fn push_tuple(&mut self, a: [u64; 5]) {
        let mut s = a;
        s.sort_unstable();
        self.diag.raw_solutions += 1;
        self.finite.insert(s);
    }

    /// The weights for a given `a_0`, if integral and positive.
    fn weights_from(t: &Tail, a0: i64) -> Option<[u64; 5]> {
        let mut a = [a0 as u64; 5];
        for i in 1..5 {
            let num = t.u[i] - t.v[i] * a0;
            if num % t.alpha != 0 {
                return None;
            }
            let x = num / t.alpha;
            if x <= 0 {
                return None;
            }
            a[i] = x as u64;
        }
        Some(a)
    }

    fn scan_alpha_nonzero(&mut self, t: &Tail, e0: usize) {
        let alpha = t.alpha;
        let sum_u: i64 = t.u.iter().sum();
        let sum_v: i64 = t.v.iter().sum();
        let (beta, gamma0) = if e0 == 0 {
            (sum_v, sum_u - alpha)
        } else {
            (sum_v - alpha - t.v[e0], sum_u - alpha - t.u[e0])
        };
        // Ordering constraints as linear inequalities in a_0.
        let sg = alpha.signum();
        let (aa, u, v) = (alpha.abs(), t.u.map(|x| sg * x), t.v.map(|x| sg * x));
        let (mut lo, mut hi) = (1i64, i64::MAX);
        constrain(u[1] - aa, -v[1], &mut lo, &mut hi);
        constrain(u[2] - u[1], -(v[2] - v[1]), &mut lo, &mut hi);
        constrain(u[2], -(v[2] + aa), &mut lo, &mut hi);
        constrain(u[3] - u[2], -(v[3] - v[2]), &mut lo, &mut hi);
        constrain(u[4] - u[3], -(v[4] - v[3]), &mut lo, &mut hi);
        if lo > hi {
            return;
        }
        // Singular point: det vanishes at m_0 = -beta / alpha.
        if beta % alpha == 0 && -beta / alpha >= M01_MIN as i64 {
            self.diag.singular_points += 1;
            if gamma0 == 0 {
                let mut e = t.e;
                e[0] = e0;
                let mut m = t.m;
                m[0] = (-beta / alpha) as u64;
                let case = SearchCase::fano(e, m);
                if hi == i64::MAX {
                    let a = Self::weights_from(t, lo).unwrap_or([0; 5]);
                    self.singular_lines.push((case, a));
                } else {
                    for a0 in lo..=hi {
                        if let Some(a) = Self::weights_from(t, a0) {
                            self.singular_lines.push((case.clone(), a));
                        }
                    }
                }
            }
        }
        if gamma0 == 0 {
            return;
        }
        // a_0 = gamma_0 / D with D = alpha m_0 + beta, m_0 >= 3.
        let g = gamma0.abs();
        let dmin = if hi == i64::MAX {
            1
        } else {
            div_ceil_pos(g, hi)
        };
        let dmax = g / lo;
        if dmin > dmax {
            return;
        }
        // D ranges over [dmin, dmax] with the sign of gamma_0.
        let (d_lo, d_hi) = if gamma0 > 0 {
            (dmin, dmax)
        } else {
            (-dmax, -dmin)
        };
        let (mut m_lo, mut m_hi) = if alpha > 0 {
            (
                div_ceil_pos_any(d_lo - beta, alpha),
                (d_hi - beta).div_euclid(alpha),
            )
        } else {
            (
                div_ceil_pos_any(beta - d_hi, -alpha),
                (beta - d_lo).div_euclid(-alpha),
            )
        };
        m_lo = m_lo.max(M01_MIN as i64);
        if m_lo > m_hi {
            return;
        }
        let by_m = (m_hi - m_lo) as u64 + 1;
        let by_a = if hi == i64::MAX {
            u64::MAX
        } else {
            (hi - lo) as u64 + 1
        };
        let emit = |a0: i64, this: &mut Sink| {
            if let Some(a) = Self::weights_from(t, a0) {
                this.push_tuple(a);
            }
        };
        if by_m <= by_a {
            self.diag.m0_iterations += by_m;
            m_hi = m_hi.max(m_lo - 1);
            for m0 in m_lo..=m_hi {
                let d = alpha * m0 + beta;
                if d == 0 || gamma0 % d != 0 {
                    continue;
                }
                let a0 = gamma0 / d;
                if a0 >= lo && a0 <= hi {
                    emit(a0, self);
                }
            }
        } else {
            self.diag.m0_iterations += by_a;
            for a0 in lo..=hi {
                if gamma0 % a0 != 0 {
                    continue;
                }
                let d = gamma0 / a0;
                if (d - beta) % alpha != 0 {
                    continue;
                }
                let m0 = (d - beta) / alpha;
                if m0 >= M01_MIN as i64 {
                    emit(a0, self);
                }
            }
        }
    }

    fn scan_alpha_zero(&mut self, t: &Tail, e0: usize) -> Result<()> {
        let mut e = t.e;
        e[0] = e0;
        let mut case = SearchCase::fano(e, t.m);
        case.m[0] = None;
        let a0 = case.matrix(0);
        let a1 = case.matrix(1);
        let beta = crate::linalg::determinant_i128(&a0)?;
        if beta == 0 {
            self.diag.fully_singular += 1;
            return Ok(());
        }
        let cramer = |a: &Vec<Vec<i128>>, i: usize| -> Result<i128> {
            let mut g = a.clone();
            for row in g.iter_mut() {
                row[i] = -1;
            }
            crate::linalg::determinant_i128(&g)
        };
        let mut n = [0i128; 5];
        let mut s = [0i128; 5];
        for i in 0..5 {
            n[i] = cramer(&a0, i)?;
            s[i] = cramer(&a1, i)? - n[i];
        }
        let (den, n, s) = if beta < 0 {
            (-beta, n.map(|x| -x), s.map(|x| -x))
        } else {
            (beta, n, s)
        };
        self.diag.line_pieces += 1;
        self.lines.push(LinePiece {
            e,
            m: t.m,
            den,
            n,
            s,
        });
        Ok(())
    }
}

fn div_ceil_pos(a: i64, b: i64) -> i64 {
    (a + b - 1) / b
}

fn div_ceil_pos_any(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

impl SearchDiagnostics {
    fn absorb(&mut self, o: &SearchDiagnostics) {
        self.configurations += o.configurations;
        self.alpha_nonzero += o.alpha_nonzero;
        self.alpha_zero += o.alpha_zero;
        self.fully_singular += o.fully_singular;
        self.singular_points += o.singular_points;
        self.m0_iterations += o.m0_iterations;
        self.raw_solutions += o.raw_solutions;
        self.line_pieces += o.line_pieces;
        self.line_members += o.line_members;
    }
}

impl Sink {
    fn absorb(&mut self, o: Sink) {
        self.diag.absorb(&o.diag);
        self.finite.extend(o.finite);
        self.lines.extend(o.lines);
        self.singular_lines.extend(o.singular_lines);
    }
}

/// Scans every configuration `(e, m_1..m_4)`; `m_0` is solved for.
fn scan_all() -> Result<Sink> {
    let b = exponent_bounds();
    let parts: Vec<Result<Sink>> = (0..625usize)
        .into_par_iter()
        .map(|code| {
            let e = [0, code % 5, code / 5 % 5, code / 25 % 5, code / 125];
            let mut sink = Sink::default();
            for m1 in M01_MIN..=b.case1_cap {
                for m2 in b.m2.clone() {
                    for m3 in b.m3.clone() {
                        for m4 in b.m4.clone() {
                            let tail = Tail::new(e, [0, m1, m2, m3, m4]);
                            for e0 in 0..5 {
                                sink.diag.configurations += 1;
                                if tail.alpha != 0 {
                                    sink.diag.alpha_nonzero += 1;
                                    sink.scan_alpha_nonzero(&tail, e0);
                                } else {
                                    sink.diag.alpha_zero += 1;
                                    sink.scan_alpha_zero(&tail, e0)?;
                                }
                            }
                        }
                    }
                }
            }
            Ok(sink)
        })
        .collect();
    let mut all = Sink::default();
    for p in parts {
        all.absorb(p?);
    }
    Ok(all)
}

/// `X_{2k(b_1+b_2+b_3)}` in `P(2, k b_1, k b_2, k b_3, k(b_1+b_2+b_3) - 1)`
/// for odd `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SeriesFamily {
    pub b: [u64; 3],
}

impl SeriesFamily {
    pub fn new(mut b: [u64; 3]) -> Self {
        b.sort_unstable();
        SeriesFamily { b }
    }

    fn b_sum(&self) -> u64 {
        self.b.iter().sum()
    }

    /// Member `k`; the ambient space need not be well-formed.
    pub fn member(&self, k: u64) -> HypersurfaceFamily {
        let s = self.b_sum();
        let w = [2, k * self.b[0], k * self.b[1], k * self.b[2], k * s - 1];
        HypersurfaceFamily::new(WeightSystem::sorted(&w).expect("positive"), 2 * k * s)
    }

    /// The curve of degree `2(b_1 + b_2 + b_3)` in `P(b_1, b_2, b_3)`.
    pub fn base_curve(&self) -> HypersurfaceFamily {
        HypersurfaceFamily::new(
            WeightSystem::sorted(&self.b).expect("positive"),
            2 * self.b_sum(),
        )
    }
}

/// Reads an ascending tuple as `(2, k b, k sum(b) - 1)` with `gcd(b) = 1`,
/// `k` odd and 2 the smallest weight.
pub fn series_shape(sorted: &[u64]) -> Option<([u64; 3], u64)> {
    if sorted.len() != 5 || sorted[0] != 2 {
        return None;
    }
    let w = &sorted[1..];
    if w[3] + 1 != w[0] + w[1] + w[2] {
        return None;
    }
    let k = gcd_all(w[..3].iter().copied());
    if k % 2 == 0 {
        return None;
    }
    Some(([w[0] / k, w[1] / k, w[2] / k], k))
}

/// Box searched for the shapes with `a_0 = a_1 = 1`, whose exponents `m_0`,
/// `m_1` are not bounded by the generic argument.
pub const ONES_BOX: [u64; 5] = [1, 1, 1000, 2000, 4000];

/// Families with `a_0 = a_1 = 1`: the box search over `(1, 1, a_2, a_3, a_4)`
/// together with the explicit shapes `(1,a,1,1,1)`, `(1,a,1,1,2)`,
/// `(1,a,1,2,3)`, `a <= 6`. Every family returned is quasi-smooth.
pub fn case2_case3_candidates() -> Result<Vec<HypersurfaceFamily>> {
    let mut out = brute_search(&BruteConfig::new(ONES_BOX.to_vec(), BoxKind::Fano))?.families;
    for a in 1..=6u64 {
        for shape in [[1, a, 1, 1, 1], [1, a, 1, 1, 2], [1, a, 1, 2, 3]] {
            let Ok(ws) = WeightSystem::canonicalize(&shape) else {
                continue;
            };
            let fam = HypersurfaceFamily::fano(ws);
            if first_failure(fam.weights(), fam.degree).is_none() {
                out.push(fam);
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn subset_condition_holds(w: &[u64], d: u64) -> bool {
    let fam = HypersurfaceFamily::new(WeightSystem::sorted(w).expect("positive"), d);
    check_qs13(&fam).verdict
}

/// Members of a piece for `3 <= m_0 <= window` that respect the labelling
/// `a_0, a_1 <= a_2 <= a_3 <= a_4`, as `(m_0, ascending weights)`.
fn piece_members(p: &LinePiece, window: u64) -> impl Iterator<Item = (u64, [u64; 5])> + '_ {
    (M01_MIN..=window).filter_map(move |t| {
        let a = p.at(t as i128)?;
        if a[0] > a[2] || a[1] > a[2] || a[2] > a[3] || a[3] > a[4] {
            return None;
        }
        let mut s = a;
        s.sort_unstable();
        Some((t, s))
    })
}

/// Merges the affine pieces into series. A triple `b` is kept when some
/// piece has a quasi-smooth member of the series shape with odd `k >= 3`;
/// isolated `k = 1` coincidences are not series. A piece whose well-formed
/// quasi-smooth members in the upper half of the window fit no series shape
/// is reported as unmergeable.
pub fn assemble_series(pieces: &[LinePiece], window: u64) -> Result<Vec<SeriesFamily>> {
    let mut shapes: BTreeMap<[u64; 3], BTreeSet<u64>> = BTreeMap::new();
    let mut loose: BTreeMap<[u64; 5], usize> = BTreeMap::new();
    for (idx, p) in pieces.iter().enumerate() {
        for (t, s) in piece_members(p, window) {
            match series_shape(&s) {
                Some((b, k)) => {
                    shapes.entry(b).or_default().insert(k);
                }
                None if 2 * t > window => {
                    loose.entry(s).or_insert(idx);
                }
                None => {}
            }
        }
    }
    for (s, idx) in &loose {
        let d = s.iter().sum::<u64>() - 1;
        if well_formedness_defect(s).is_none() && first_failure(s, d).is_none() {
            return Err(Error::UnmergeablePiece(format!(
                "piece {:?} m={:?}: quasi-smooth member {:?} of no series shape",
                pieces[*idx].e, pieces[*idx].m, s
            )));
        }
    }
    let mut out = Vec::new();
    for (b, ks) in shapes {
        let series = SeriesFamily::new(b);
        let persistent = ks.iter().any(|&k| {
            let m = series.member(k);
            k >= 3 && subset_condition_holds(m.weights(), m.degree)
        });
        if !persistent {
            continue;
        }
        let c = series.base_curve();
        if !subset_condition_holds(c.weights(), c.degree) {
            return Err(Error::UnmergeablePiece(format!(
                "series {b:?} has quasi-smooth members but its base curve is not"
            )));
        }
        out.push(series);
    }
    Ok(out)
}

/// Knobs of the structured search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredConfig {
    /// Members of the affine pieces are examined for `m_0` up to this value.
    pub line_window: u64,
}

impl Default for StructuredConfig {
    fn default() -> Self {
        StructuredConfig { line_window: 1000 }
    }
}

/// Why a quasi-smooth candidate is not in the sporadic list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRemoval {
    pub weights: Vec<u64>,
    pub b: [u64; 3],
    pub k: u64,
}

/// How the candidate pool shrinks to the sporadic list.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterCounts {
    /// Distinct ascending tuples from the finite branch.
    pub finite_distinct: u64,
    pub finite_well_formed: u64,
    pub finite_quasi_smooth: u64,
    /// Union of all sources, deduplicated.
    pub candidates: u64,
    pub not_well_formed: u64,
    pub not_quasi_smooth: u64,
    pub series_members: u64,
    pub sporadic: u64,
}

#[derive(Clone, Debug)]
pub struct StructuredOutput {
    pub sporadic: Vec<HypersurfaceFamily>,
    pub series: Vec<SeriesFamily>,
    pub diagnostics: SearchDiagnostics,
    pub filters: FilterCounts,
    pub removed: Vec<SeriesRemoval>,
}

fn passes(s: &[u64; 5]) -> (bool, bool) {
    let wf = well_formedness_defect(s).is_none();
    let d = s.iter().sum::<u64>() - 1;
    (wf, wf && first_failure(s, d).is_none())
}

/// The full search: finite branch, affine pieces, and the `a_0 = a_1 = 1`
/// shapes; quasi-smooth, well-formed, series members removed.
pub fn run_structured_search(cfg: &StructuredConfig) -> Result<StructuredOutput> {
    let sink = scan_all()?;
    let mut diagnostics = sink.diag;
    let mut filters = FilterCounts {
        finite_distinct: sink.finite.len() as u64,
        ..Default::default()
    };
    for s in &sink.finite {
        let (wf, qs) = passes(s);
        filters.finite_well_formed += wf as u64;
        filters.finite_quasi_smooth += qs as u64;
    }
    let series = assemble_series(&sink.lines, cfg.line_window)?;
    let known: BTreeSet<[u64; 3]> = series.iter().map(|s| s.b).collect();

    let mut pool = sink.finite;
    for p in &sink.lines {
        for (_, s) in piece_members(p, cfg.line_window) {
            diagnostics.line_members += 1;
            pool.insert(s);
        }
    }
    for (_, a) in &sink.singular_lines {
        let mut s = *a;
        s.sort_unstable();
        pool.insert(s);
    }
    for fam in case2_case3_candidates()? {
        let mut s = [0u64; 5];
        s.copy_from_slice(fam.weights());
        pool.insert(s);
    }
    filters.candidates = pool.len() as u64;

    let mut sporadic = Vec::new();
    let mut removed = Vec::new();
    for s in pool {
        let (wf, qs) = passes(&s);
        if !wf {
            filters.not_well_formed += 1;
            continue;
        }
        if !qs {
            filters.not_quasi_smooth += 1;
            continue;
        }
        match series_shape(&s) {
            Some((b, k)) if known.contains(&b) => {
                filters.series_members += 1;
                removed.push(SeriesRemoval {
                    weights: s.to_vec(),
                    b,
                    k,
                });
            }
            _ => {
                let ws = WeightSystem::canonicalize(&s)?;
                sporadic.push(HypersurfaceFamily::fano(ws));
            }
        }
    }
    filters.sporadic = sporadic.len() as u64;
    Ok(StructuredOutput {
        sporadic,
        series,
        diagnostics,
        filters,
        removed,
    })
}

/// Sporadic families and quasi-smooth series members inside the box.
pub fn restrict_to_box(res: &StructuredOutput, bounds: &[u64]) -> Vec<HypersurfaceFamily> {
    let inside = |f: &HypersurfaceFamily| {
        f.weights().len() == bounds.len() && f.weights().iter().zip(bounds).all(|(a, b)| a <= b)
    };
    let mut fams: BTreeSet<HypersurfaceFamily> =
        res.sporadic.iter().filter(|f| inside(f)).cloned().collect();
    let cap = bounds.iter().copied().max().unwrap_or(0);
    for s in &res.series {
        for k in (1..=cap).step_by(2) {
            let m = s.member(k);
            if inside(&m)
                && first_failure(m.weights(), m.degree).is_none()
                && well_formedness_defect(m.weights()).is_none()
            {
                fams.insert(m);
            }
        }
    }
    fams.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn ints(v: &[i128]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_int(x)).collect()
    }

    #[test]
    fn bounds_are_the_published_constants() {
        let b = exponent_bounds();
        assert_eq!(b.m4, 1..=3);
        assert_eq!(b.m3, 2..=6);
        assert_eq!(b.m2, 3..=16);
        assert_eq!(b.case1_cap, 83);
    }

    #[test]
    fn solves_the_largest_a0_example() {
        // x0^91 x1, x1^59 x2, x0 x2^7, x3^3, x4^2: a self-pointer adds one
        // to the diagonal, so the last two exponents enter as 2 and 1.
        let c = SearchCase::fano([1, 2, 0, 3, 4], [91, 59, 7, 2, 1]);
        let want = ints(&[407, 547, 5311, 12528, 18792]);
        assert_eq!(solve_case(&c).unwrap(), Solved::Unique(want));
        assert!(c.satisfied_by(&[407, 547, 5311, 12528, 18792]));
    }

    #[test]
    fn fermat_configuration() {
        let c = SearchCase::fano([0, 1, 2, 3, 4], [3; 5]);
        assert_eq!(solve_case(&c).unwrap(), Solved::Unique(ints(&[1; 5])));
    }

    #[test]
    fn dependent_rows_are_singular() {
        // Rows 0 and 4 both read a_0 + a_4 - sum = -1.
        let c = SearchCase::fano([4, 1, 2, 3, 0], [1, 3, 3, 3, 1]);
        assert_eq!(c.matrix(0)[0], c.matrix(0)[4]);
        assert!(determinant(&c.matrix(0)).unwrap().is_zero());
        assert_eq!(solve_case(&c).unwrap(), Solved::Singular);
    }

    #[test]
    fn series_configuration_gives_a_line() {
        // (2, k, k, k, 3k - 1), d = 6k: x0^{3k}, x1^6, x2^6, x3^6, x4^2 x0.
        let mut c = SearchCase::fano([0, 1, 2, 3, 0], [0, 5, 5, 5, 2]);
        c.m[0] = None;
        let OneUnknown::Series { line, .. } = solve_one_unknown(&c).unwrap() else {
            panic!("expected a series");
        };
        for k in [1u64, 3, 5, 7] {
            let m0 = 3 * k - 1;
            assert_eq!(
                line.positive_integral_at(m0),
                Some(vec![2, k, k, k, 3 * k - 1])
            );
        }
    }

    fn random_tail(rng: &mut rand::rngs::StdRng) -> ([usize; 5], [u64; 5]) {
        let b = exponent_bounds();
        let e = [
            0,
            rng.gen_range(0..5),
            rng.gen_range(0..5),
            rng.gen_range(0..5),
            rng.gen_range(0..5),
        ];
        let m = [
            0,
            rng.gen_range(M01_MIN..=b.case1_cap),
            rng.gen_range(b.m2),
            rng.gen_range(b.m3),
            rng.gen_range(b.m4),
        ];
        (e, m)
    }

    /// The adjugate fast path against generic elimination.
    #[test]
    fn fast_path_matches_generic_solver() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 400 {
            let (e, m) = random_tail(&mut rng);
            let tail = Tail::new(e, m);
            let e0 = rng.gen_range(0..5);
            let mut full_e = e;
            full_e[0] = e0;
            let mut c = SearchCase::fano(full_e, m);
            c.m[0] = None;
            let generic = solve_one_unknown(&c).unwrap();
            if tail.alpha == 0 {
                let mut sink = Sink::default();
                sink.scan_alpha_zero(&tail, e0).unwrap();
                match generic {
                    OneUnknown::Singular => assert!(sink.lines.is_empty()),
                    OneUnknown::Series { line, .. } => {
                        let piece = &sink.lines[0];
                        for t in 3..40u64 {
                            let fast = piece.at(t as i128).map(|a| a.to_vec());
                            assert_eq!(fast, line.positive_integral_at(t), "{e:?} {m:?}");
                        }
                    }
                    OneUnknown::Bounded { .. } => panic!("alpha disagrees"),
                }
                checked += 1;
                continue;
            }
            let OneUnknown::Bounded {
                alpha, solutions, ..
            } = generic
            else {
                panic!("alpha disagrees for {e:?} {m:?}");
            };
            assert_eq!(alpha, BigInt::from(tail.alpha));
            let mut sink = Sink::default();
            sink.scan_alpha_nonzero(&tail, e0);
            let want: BTreeSet<[u64; 5]> = solutions
                .into_iter()
                .filter(|(t, a)| {
                    *t >= M01_MIN && a[0] <= a[2] && a[1] <= a[2] && a[2] <= a[3] && a[3] <= a[4]
                })
                .map(|(_, a)| {
                    let mut s = [0; 5];
                    s.copy_from_slice(&a);
                    s.sort_unstable();
                    s
                })
                .collect();
            assert_eq!(sink.finite, want, "{full_e:?} {m:?}");
            checked += 1;
        }
    }

    #[test]
    fn fast_path_finds_the_printed_extremes() {
        let tail = Tail::new([0, 2, 0, 3, 4], [0, 59, 7, 2, 1]);
        let mut sink = Sink::default();
        sink.scan_alpha_nonzero(&tail, 1);
        assert!(sink.finite.contains(&[407, 547, 5311, 12528, 18792]));
    }

    #[test]
    fn series_shapes() {
        assert_eq!(series_shape(&[2, 3, 3, 3, 8]), Some(([1, 1, 1], 3)));
        assert_eq!(series_shape(&[2, 2, 3, 5, 9]), Some(([2, 3, 5], 1)));
        // The weight 2 is not the smallest.
        assert_eq!(series_shape(&[1, 1, 1, 2, 2]), None);
        // Even k.
        assert_eq!(series_shape(&[2, 2, 2, 2, 5]), None);
        let s = SeriesFamily::new([1, 1, 1]);
        assert_eq!(s.member(3).weights(), &[2, 3, 3, 3, 8]);
        assert_eq!(s.member(3).degree, 18);
        for k in [1, 3, 5, 7, 9] {
            let m = s.member(k);
            assert_eq!(m.degree + 1, m.ws.sum());
        }
        assert_eq!(s.base_curve().degree, 6);
    }

    #[test]
    fn ones_shapes_are_quasi_smooth() {
        let c = case2_case3_candidates().unwrap();
        assert!(c
            .iter()
            .any(|f| f.weights() == [1, 1, 1, 1, 1] && f.degree == 4));
        assert!(c.iter().all(|f| f.weights()[..2] == [1, 1]));
        assert!(c
            .iter()
            .all(|f| first_failure(f.weights(), f.degree).is_none()));
        assert_eq!(c.len(), 41);
    }

    #[test]
    fn ones_box_is_stable() {
        let small = brute_search(&BruteConfig::new(vec![1, 1, 100, 200, 400], BoxKind::Fano))
            .unwrap()
            .families;
        let big = case2_case3_candidates().unwrap();
        assert_eq!(small, big);
    }
}
