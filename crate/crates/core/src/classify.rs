//! Singularities, terminality and the tiger / Kähler–Einstein criteria for
//! quasi-smooth hypersurfaces, plus recognition of the series members.

use std::sync::OnceLock;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsmooth::{check_qs13, is_quasi_smooth};
use crate::search::{series_shape, SeriesFamily};
use crate::semigroup::semigroup_member;
use crate::weights::{gcd_all, HypersurfaceFamily, WeightSystem};

/// Where a quotient singularity sits on `X`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    /// The coordinate point `P_i`.
    Vertex(usize),
    /// `count` points in the interior of the edge `x_k = 0, k != i, j`.
    EdgePoints(usize, usize, u64),
    /// `X` contains the edge through `P_i`, `P_j`.
    NonIsolatedCurve(usize, usize),
    /// `X` meets the coordinate stratum spanned by these indices (three or
    /// more) in positive dimension.
    NonIsolatedStratum(Vec<usize>),
}

/// A cyclic quotient `1/r(w_1, ..., w_m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuotientSingularity {
    pub r: u64,
    pub w: Vec<u64>,
    pub location: Location,
}

impl QuotientSingularity {
    pub fn is_isolated(&self) -> bool {
        matches!(
            self.location,
            Location::Vertex(_) | Location::EdgePoints(..)
        )
    }
}

impl std::fmt::Display for QuotientSingularity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let w: Vec<String> = self.w.iter().map(u64::to_string).collect();
        write!(f, "1/{}({})", self.r, w.join(","))
    }
}

/// Membership in one of the infinite series: `b` and the odd multiplier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeriesTag {
    pub b: [u64; 3],
    pub k: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedRecord {
    pub family: HypersurfaceFamily,
    pub quasi_smooth: bool,
    pub basket: Vec<QuotientSingularity>,
    pub terminal: bool,
    pub tiger_free: bool,
    pub ke: bool,
    pub series: Option<SeriesTag>,
}

/// Removes quasi-reflections from `1/r(w)`.
///
/// If every weight but `w_l` shares the factor `g` with `r`, the subgroup of
/// order `g` acts as a reflection in `x_l`; dividing it out gives
/// `1/(r/g)(w_1/g, ..., w_l, ..., w_m/g)`. Repeats until none is left.
/// A weight that is zero mod `r > 1` is a fixed direction, not an isolated
/// point, and is rejected.
pub fn reduce_quasi_reflections(r: u64, w: &[u64]) -> Result<(u64, Vec<u64>)> {
    let mut r = r;
    let mut w: Vec<u64> = w.iter().map(|&x| x % r.max(1)).collect();
    loop {
        if r == 1 {
            return Ok((1, vec![0; w.len()]));
        }
        let hit = (0..w.len()).find_map(|l| {
            let g = w
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != l)
                .fold(r, |g, (_, &x)| g.gcd(&x));
            (g > 1).then_some((l, g))
        });
        let Some((l, g)) = hit else { break };
        r /= g;
        for (m, x) in w.iter_mut().enumerate() {
            if m != l {
                *x /= g;
            }
            *x %= r;
        }
    }
    if w.contains(&0) {
        return Err(Error::UnsupportedConfiguration(format!(
            "1/{r}{w:?} fixes a coordinate direction"
        )));
    }
    Ok((r, w))
}

/// Reid–Tai: `sum_m (k w_m mod r) > r` for every `k` in `1..r`.
pub fn is_terminal_type(q: &QuotientSingularity) -> bool {
    reid_tai(q.r, &q.w)
}

fn reid_tai(r: u64, w: &[u64]) -> bool {
    (1..r).all(|k| w.iter().map(|&x| k * x % r).sum::<u64>() > r)
}

/// Indices `j != i` with `m a_i + a_j = d` for some `m >= 1`.
pub fn admissible_eliminations(fam: &HypersurfaceFamily, i: usize) -> Vec<usize> {
    let a = fam.weights();
    let d = fam.degree;
    (0..a.len())
        .filter(|&j| j != i && d >= a[j] + a[i] && (d - a[j]) % a[i] == 0)
        .collect()
}

/// The type at `P_i` after eliminating `x_j`, reduced.
pub fn vertex_type(fam: &HypersurfaceFamily, i: usize, j: usize) -> Result<QuotientSingularity> {
    let a = fam.weights();
    let w: Vec<u64> = (0..a.len())
        .filter(|&k| k != i && k != j)
        .map(|k| a[k])
        .collect();
    let (r, w) = reduce_quasi_reflections(a[i], &w)?;
    Ok(QuotientSingularity {
        r,
        w,
        location: Location::Vertex(i),
    })
}

/// Number of `(alpha, beta) >= 0` with `alpha p + beta q = d`.
fn edge_solutions(p: u64, q: u64, d: u64) -> u64 {
    (0..=d / p).filter(|&al| (d - al * p) % q == 0).count() as u64
}

fn subsets_of_size(n: usize, size: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == size)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

/// The singular locus of the general member, choosing the smallest
/// admissible eliminated variable at each vertex.
pub fn singularities(fam: &HypersurfaceFamily) -> Result<Vec<QuotientSingularity>> {
    singularities_with(fam, |_, js| js[0])
}

/// As [`singularities`], with `pick(i, admissible)` choosing the eliminated
/// index at vertex `i`.
pub fn singularities_with(
    fam: &HypersurfaceFamily,
    pick: impl Fn(usize, &[usize]) -> usize,
) -> Result<Vec<QuotientSingularity>> {
    let a = fam.weights();
    let n = a.len();
    let d = fam.degree;
    let complement = |s: &[usize], h: u64| -> Vec<u64> {
        (0..n)
            .filter(|k| !s.contains(k))
            .map(|k| a[k] % h)
            .collect()
    };
    let mut basket = Vec::new();

    // Strata of three or more coordinates with a common factor.
    for size in (3..n).rev() {
        for s in subsets_of_size(n, size) {
            let h = gcd_all(s.iter().map(|&k| a[k]));
            if h > 1 {
                basket.push(QuotientSingularity {
                    r: h,
                    w: complement(&s, h),
                    location: Location::NonIsolatedStratum(s),
                });
            }
        }
    }

    for s in subsets_of_size(n, 2) {
        let (i, j) = (s[0], s[1]);
        let h = a[i].gcd(&a[j]);
        if h == 1 {
            continue;
        }
        if !semigroup_member(&[a[i], a[j]], d) {
            basket.push(QuotientSingularity {
                r: h,
                w: complement(&s, h),
                location: Location::NonIsolatedCurve(i, j),
            });
            continue;
        }
        let count = edge_solutions(a[i], a[j], d) - 1;
        if count == 0 {
            continue;
        }
        match reduce_quasi_reflections(h, &complement(&s, h)) {
            Ok((r, w)) => basket.push(QuotientSingularity {
                r,
                w,
                location: Location::EdgePoints(i, j, count),
            }),
            Err(_) if on_nonisolated(&basket, &s) => {}
            Err(e) => return Err(e),
        }
    }

    for i in 0..n {
        if a[i] == 1 || d % a[i] == 0 {
            continue;
        }
        let js = admissible_eliminations(fam, i);
        if js.is_empty() {
            return Err(Error::UnsupportedConfiguration(format!(
                "{fam}: no monomial x_{i}^m x_j, not quasi-smooth"
            )));
        }
        match vertex_type(fam, i, pick(i, &js)) {
            Ok(q) => basket.push(q),
            // A fixed direction at P_i lies on a non-isolated stratum that is
            // already in the basket.
            Err(_) if on_nonisolated(&basket, &[i]) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(basket)
}

/// Does a non-isolated entry of the basket pass through all of `idx`?
fn on_nonisolated(basket: &[QuotientSingularity], idx: &[usize]) -> bool {
    basket.iter().any(|q| match &q.location {
        Location::NonIsolatedCurve(p, r) => idx.iter().all(|k| k == p || k == r),
        Location::NonIsolatedStratum(s) => idx.iter().all(|k| s.contains(k)),
        _ => false,
    })
}

/// Isolated singularities, each of them terminal.
pub fn classify_terminal(fam: &HypersurfaceFamily) -> Result<bool> {
    Ok(basket_is_terminal(&singularities(fam)?))
}

fn basket_is_terminal(basket: &[QuotientSingularity]) -> bool {
    basket
        .iter()
        .all(|q| q.is_isolated() && is_terminal_type(q))
}

/// The sufficient criteria `d <= a_0 a_1` (no tiger) and
/// `(n - 1) d < n a_0 a_1` (Kähler–Einstein), on the two smallest weights.
pub fn tiger_ke_flags(fam: &HypersurfaceFamily) -> (bool, bool) {
    let a = fam.weights();
    if a.len() < 2 {
        return (false, false);
    }
    let n = fam.dim() as u128;
    let d = fam.degree as u128;
    let p = a[0] as u128 * a[1] as u128;
    (d <= p, (n - 1) * d < n * p)
}

/// Search cap on `b_3` for [`enumerate_48_triples`]; `b_3 <= 2(b_1 + b_2)`
/// holds anyway, so the cap only bounds `b_1 + b_2`.
pub const TRIPLE_CAP: u64 = 120;

/// Triples `b_1 <= b_2 <= b_3` with `gcd = 1` whose curve of degree
/// `2(b_1 + b_2 + b_3)` in `P(b_1, b_2, b_3)` is quasi-smooth, `b_3 <= cap`.
pub fn enumerate_triples(cap: u64) -> Vec<[u64; 3]> {
    (1..=cap)
        .into_par_iter()
        .flat_map_iter(|b1| {
            (b1..=cap).flat_map(move |b2| {
                (b2..=cap.min(2 * (b1 + b2))).filter_map(move |b3| {
                    let b = [b1, b2, b3];
                    if gcd_all(b) != 1 {
                        return None;
                    }
                    let curve = SeriesFamily::new(b).base_curve();
                    check_qs13(&curve).verdict.then_some(b)
                })
            })
        })
        .collect::<Vec<_>>()
}

/// The triples indexing the infinite series (computed once).
pub fn enumerate_48_triples() -> &'static [[u64; 3]] {
    static CELL: OnceLock<Vec<[u64; 3]>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut v = enumerate_triples(TRIPLE_CAP);
        v.sort_unstable();
        v
    })
}

fn known_triple(b: &[u64; 3]) -> bool {
    enumerate_48_triples().binary_search(b).is_ok()
}

/// Matches the weights, in any order, against
/// `(2, k b_1, k b_2, k b_3, k(b_1 + b_2 + b_3) - 1)` for an enumerated
/// triple `b` and odd `k`.
pub fn detect_series_membership(fam: &HypersurfaceFamily) -> Option<SeriesTag> {
    let a = fam.weights();
    if a.len() != 5 || fam.kind() != crate::FamilyKind::Fano {
        return None;
    }
    let p = a.iter().position(|&x| x == 2)?;
    let rest: Vec<u64> = (0..5).filter(|&i| i != p).map(|i| a[i]).collect();
    if rest[3] + 1 != rest[0] + rest[1] + rest[2] {
        return None;
    }
    let k = gcd_all(rest[..3].iter().copied());
    let b = [rest[0] / k, rest[1] / k, rest[2] / k];
    (k % 2 == 1 && known_triple(&b)).then_some(SeriesTag { b, k })
}

/// Series membership as counted in the census: the pattern match with 2 as
/// the smallest weight. Tuples such as `(1, 1, 1, 2, 2)` match the pattern
/// with `k = 1` but are listed as sporadic.
pub fn census_series_membership(fam: &HypersurfaceFamily) -> Option<SeriesTag> {
    if fam.kind() != crate::FamilyKind::Fano {
        return None;
    }
    let (b, k) = series_shape(fam.weights())?;
    known_triple(&b).then_some(SeriesTag { b, k })
}

/// Full record for one family. Singularities are only computed for
/// quasi-smooth families, the tiger and KE flags only for Fano ones.
pub fn classify(fam: &HypersurfaceFamily) -> Result<ClassifiedRecord> {
    let quasi_smooth = is_quasi_smooth(fam).verdict;
    let (basket, terminal) = if quasi_smooth {
        let b = singularities(fam)?;
        let t = basket_is_terminal(&b);
        (b, t)
    } else {
        (Vec::new(), false)
    };
    let (tiger_free, ke) = if quasi_smooth && fam.kind() == crate::FamilyKind::Fano {
        tiger_ke_flags(fam)
    } else {
        (false, false)
    };
    Ok(ClassifiedRecord {
        family: fam.clone(),
        quasi_smooth,
        basket,
        terminal,
        tiger_free,
        ke,
        series: census_series_membership(fam),
    })
}

/// [`classify`] over a list, in parallel, preserving order.
pub fn classify_all(fams: &[HypersurfaceFamily]) -> Result<Vec<ClassifiedRecord>> {
    fams.par_iter().map(classify).collect()
}

/// Convenience for tests and the CLI: the Fano family on these weights.
pub fn fano(weights: &[u64]) -> Result<HypersurfaceFamily> {
    Ok(HypersurfaceFamily::fano(WeightSystem::sorted(weights)?))
}
