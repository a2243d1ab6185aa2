//! Quasi-smoothness of the general member of `|O(d)|` on `P(a_0, ..., a_n)`.
//!
//! Everything reduces to semigroup membership. For an index subset `I` the
//! *target set* is
//!
//! ```text
//! T(I) = { t : d - a_t is a nonnegative combination of a_j, j in I }
//! ```
//!
//! i.e. the variables `x_t` for which some monomial `x_t * prod_{j in I} x_j^m`
//! has degree `d`. The subset condition asks for an injection `e: I -> {0..n}`
//! with such a monomial for every `i in I`. The admissible values of `e(i)`
//! do not depend on `i`, so an injection exists exactly when `|T(I)| >= |I|`
//! and no matching algorithm is needed.

use crate::semigroup::{semigroup_member, Semigroup};
use crate::weights::{gcd_all, HypersurfaceFamily, Monomial};

/// `x_i^m x_j` has degree `d`, with `m >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VertexWitness {
    pub m: u64,
    pub j: usize,
}

impl VertexWitness {
    pub fn monomial(&self, len: usize, i: usize) -> Monomial {
        Monomial::vertex(len, i, self.m, self.j)
    }
}

/// Why a family failed, in the order the cheap filters run.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Failure {
    /// No monomial `x_i^m x_t` (`m >= 0`) of degree `d`.
    Vertex(usize),
    /// The stratum `x_i = x_j = 0` has nontrivial isotropy and lies in every member.
    Codim2(usize, usize),
    /// Some variable divides every monomial of degree `d`.
    Reducible(usize),
    /// `|T(I)| < |I|` for this subset.
    Subset(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetReport {
    pub subset: Vec<usize>,
    /// A monomial in the variables of `I` alone with degree `d`, if any.
    pub pure_monomial_witness: Option<Monomial>,
    pub target_set_size: usize,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiSmoothReport {
    pub family: HypersurfaceFamily,
    pub verdict: bool,
    /// One entry per nonempty subset, ordered by bitmask.
    pub per_subset: Vec<SubsetReport>,
    pub failing_subset: Option<Vec<usize>>,
    /// First failure found by the filter cascade, if any.
    pub failure: Option<Failure>,
    /// Witness `x_i^m x_j` for every vertex that has one.
    pub vertex_witnesses: Vec<Option<VertexWitness>>,
}

fn mask_to_indices(mask: u64, len: usize) -> Vec<usize> {
    (0..len).filter(|&i| mask >> i & 1 == 1).collect()
}

/// A witness `x_i^m x_j` with `m >= 1` and `m a_i + a_j = d`. Prefers `j = i`
/// (the member misses the vertex), then the smallest `j`.
pub fn check_vertex(fam: &HypersurfaceFamily, i: usize) -> Option<VertexWitness> {
    let w = fam.weights();
    let d = fam.degree;
    let ai = w[i];
    let fits = |j: usize| -> Option<VertexWitness> {
        let rest = d.checked_sub(w[j])?;
        (rest >= ai && rest % ai == 0).then_some(VertexWitness { m: rest / ai, j })
    };
    fits(i).or_else(|| (0..w.len()).filter(|&j| j != i).find_map(fits))
}

/// Condition on the stratum `x_i = x_j = 0`: when the remaining weights share
/// a factor there must be a degree-`d` monomial avoiding `x_i` and `x_j`.
pub fn check_codim2(fam: &HypersurfaceFamily, i: usize, j: usize) -> bool {
    let w = fam.weights();
    let rest: Vec<u64> = (0..w.len())
        .filter(|&k| k != i && k != j)
        .map(|k| w[k])
        .collect();
    if gcd_all(rest.iter().copied()) <= 1 {
        return true;
    }
    semigroup_member(&rest, fam.degree)
}

/// `T(I)` for the subset given as indices.
pub fn target_set(fam: &HypersurfaceFamily, subset: &[usize]) -> Vec<usize> {
    let w = fam.weights();
    let gens: Vec<u64> = subset.iter().map(|&j| w[j]).collect();
    let sg = Semigroup::new(&gens);
    targets_in(w, fam.degree, &sg)
}

fn targets_in(w: &[u64], d: u64, sg: &Semigroup) -> Vec<usize> {
    (0..w.len())
        .filter(|&t| d >= w[t] && sg.contains(d - w[t]))
        .collect()
}

/// Exponents `b` with `sum b_k gens_k = target`, if representable.
pub fn represent(gens: &[u64], target: u64) -> Option<Vec<u64>> {
    let Some((&g0, rest)) = gens.split_first() else {
        return (target == 0).then(Vec::new);
    };
    if g0 == 0 {
        let mut tail = represent(rest, target)?;
        tail.insert(0, 0);
        return Some(tail);
    }
    let sg = Semigroup::new(rest);
    let b = (0..=target / g0).find(|&b| sg.contains(target - b * g0))?;
    let mut tail = represent(rest, target - b * g0)?;
    tail.insert(0, b);
    Some(tail)
}

fn pure_witness(fam: &HypersurfaceFamily, subset: &[usize]) -> Option<Monomial> {
    let w = fam.weights();
    let gens: Vec<u64> = subset.iter().map(|&j| w[j]).collect();
    let b = represent(&gens, fam.degree)?;
    let mut exps = vec![0; w.len()];
    for (&j, &e) in subset.iter().zip(&b) {
        exps[j] = e;
    }
    Some(Monomial::new(exps))
}

/// The subset condition over every nonempty `I`, with a per-subset record.
pub fn check_qs13(fam: &HypersurfaceFamily) -> QuasiSmoothReport {
    let w = fam.weights();
    let len = w.len();
    let mut per_subset = Vec::with_capacity((1usize << len) - 1);
    let mut failing_subset = None;
    for mask in 1u64..(1u64 << len) {
        let subset = mask_to_indices(mask, len);
        let targets = target_set(fam, &subset);
        let passes = targets.len() >= subset.len();
        if !passes && failing_subset.is_none() {
            failing_subset = Some(subset.clone());
        }
        per_subset.push(SubsetReport {
            pure_monomial_witness: pure_witness(fam, &subset),
            target_set_size: targets.len(),
            passes,
            subset,
        });
    }
    QuasiSmoothReport {
        family: fam.clone(),
        verdict: failing_subset.is_none(),
        failure: failing_subset.clone().map(Failure::Subset),
        per_subset,
        failing_subset,
        vertex_witnesses: (0..len).map(|i| check_vertex(fam, i)).collect(),
    }
}

/// The disjunctive variant: for each `I`, either a pure monomial in `x_I` of
/// degree `d` exists, or `|T(I)| >= |I|`.
pub fn check_qs13prime(fam: &HypersurfaceFamily) -> bool {
    let w = fam.weights();
    let len = w.len();
    (1u64..(1u64 << len)).all(|mask| {
        let subset = mask_to_indices(mask, len);
        let gens: Vec<u64> = subset.iter().map(|&j| w[j]).collect();
        let sg = Semigroup::new(&gens);
        sg.contains(fam.degree) || targets_in(w, fam.degree, &sg).len() >= subset.len()
    })
}

/// Some `k` such that `x_k` divides every monomial of degree `d`.
pub fn forced_variable(fam: &HypersurfaceFamily) -> Option<usize> {
    let w = fam.weights();
    (0..w.len()).find(|&k| {
        let rest: Vec<u64> = (0..w.len()).filter(|&j| j != k).map(|j| w[j]).collect();
        !semigroup_member(&rest, fam.degree)
    })
}

/// Full verdict with the cascade vertex, codimension two, irreducibility,
/// then every subset. The report carries the per-subset table regardless.
pub fn is_quasi_smooth(fam: &HypersurfaceFamily) -> QuasiSmoothReport {
    let mut report = check_qs13(fam);
    let failure = first_failure(fam.weights(), fam.degree);
    report.verdict = failure.is_none();
    report.failure = failure;
    report
}

/// Verdict only; the hot path of the searches.
pub fn quasi_smooth(weights: &[u64], d: u64) -> bool {
    first_failure(weights, d).is_none()
}

/// Runs the filter cascade and reports the first failure.
pub fn first_failure(w: &[u64], d: u64) -> Option<Failure> {
    let len = w.len();
    // Singletons: some a_t with a_i | d - a_t (exponent of x_i may be 0).
    for i in 0..len {
        let ok = w.iter().any(|&at| d >= at && (d - at) % w[i] == 0);
        if !ok {
            return Some(Failure::Vertex(i));
        }
    }
    let mut buf = Vec::with_capacity(len);
    for i in 0..len {
        for j in i + 1..len {
            buf.clear();
            buf.extend((0..len).filter(|&k| k != i && k != j).map(|k| w[k]));
            if gcd_all(buf.iter().copied()) > 1 && !semigroup_member(&buf, d) {
                return Some(Failure::Codim2(i, j));
            }
        }
    }
    for k in 0..len {
        buf.clear();
        buf.extend((0..len).filter(|&j| j != k).map(|j| w[j]));
        if !semigroup_member(&buf, d) {
            return Some(Failure::Reducible(k));
        }
    }
    for mask in 1u64..(1u64 << len) {
        let size = mask.count_ones() as usize;
        if size == 1 {
            continue;
        }
        buf.clear();
        buf.extend((0..len).filter(|&j| mask >> j & 1 == 1).map(|j| w[j]));
        let sg = Semigroup::new(&buf);
        let mut count = 0;
        for &at in w {
            if d >= at && sg.contains(d - at) {
                count += 1;
                if count >= size {
                    break;
                }
            }
        }
        if count < size {
            return Some(Failure::Subset(mask_to_indices(mask, len)));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WeightSystem;

    fn fam(w: &[u64], d: u64) -> HypersurfaceFamily {
        HypersurfaceFamily::new(WeightSystem::sorted(w).unwrap(), d)
    }

    /// Oracle for the vertex condition: every `j` and every `m`.
    fn vertex_oracle(w: &[u64], d: u64, i: usize) -> Vec<(u64, usize)> {
        let mut out = Vec::new();
        for (j, &aj) in w.iter().enumerate() {
            for m in 1..=d / w[i] {
                if m * w[i] + aj == d {
                    out.push((m, j));
                }
            }
        }
        out
    }

    #[test]
    fn vertex_examples() {
        let f = fam(&[223, 9101, 46837, 112320, 168480], 336960);
        assert_eq!(check_vertex(&f, 0), Some(VertexWitness { m: 1301, j: 2 }));

        let f = fam(&[1, 1, 1, 1, 1], 4);
        let wit = check_vertex(&f, 0).unwrap();
        assert_eq!(wit, VertexWitness { m: 3, j: 0 });
        assert_eq!(wit.monomial(5, 0), Monomial::new(vec![4, 0, 0, 0, 0]));

        let f = fam(&[2, 3, 4, 5, 7], 20);
        assert_eq!(check_vertex(&f, 4), None);
        assert!(vertex_oracle(f.weights(), 20, 4).is_empty());
    }

    #[test]
    fn vertex_matches_oracle() {
        for w in [
            [1u64, 2, 3, 5, 7],
            [2, 3, 4, 5, 7],
            [1, 1, 2, 3, 3],
            [3, 4, 5, 6, 7],
        ] {
            let d: u64 = w.iter().sum::<u64>() - 1;
            let f = fam(&w, d);
            for i in 0..5 {
                let all = vertex_oracle(&w, d, i);
                match check_vertex(&f, i) {
                    None => assert!(all.is_empty()),
                    Some(v) => {
                        assert!(all.contains(&(v.m, v.j)));
                        if all.iter().any(|&(_, j)| j == i) {
                            assert_eq!(v.j, i);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn codim2_examples() {
        let f = fam(&[1, 1, 2, 2, 2], 7);
        assert!(!check_codim2(&f, 0, 1));
        assert!(check_codim2(&f, 0, 2));
        let f = fam(&[1, 1, 1, 1, 1], 4);
        for i in 0..5 {
            for j in i + 1..5 {
                assert!(check_codim2(&f, i, j));
            }
        }
    }

    #[test]
    fn target_set_examples() {
        let f = fam(&[1, 1, 1, 1, 1], 4);
        assert_eq!(target_set(&f, &[0, 1, 2, 3, 4]), vec![0, 1, 2, 3, 4]);
        let f = fam(&[407, 547, 5311, 12528, 18792], 37584);
        assert!(target_set(&f, &[4]).contains(&4));
        // (1, a, b, 2b, 3b): T({2,3,4}) forces b | a.
        let f = fam(&[1, 2, 3, 6, 9], 20);
        assert!(target_set(&f, &[2, 3, 4]).len() < 3);
    }

    #[test]
    fn subset_condition_examples() {
        let r = check_qs13(&fam(&[407, 547, 5311, 12528, 18792], 37584));
        assert!(r.verdict);
        assert_eq!(r.per_subset.len(), 31);
        assert!(check_qs13(&fam(&[1, 1, 1, 1, 1], 4)).verdict);
        let r = check_qs13(&fam(&[2, 3, 4, 5, 7], 20));
        assert!(!r.verdict);
        assert_eq!(r.failing_subset, Some(vec![4]));
    }

    #[test]
    fn witnesses_have_degree_d() {
        let f = fam(&[253, 7807, 48101, 112320, 168480], 336960);
        let r = check_qs13(&f);
        for s in &r.per_subset {
            if let Some(m) = &s.pure_monomial_witness {
                assert_eq!(m.degree(&f.ws).unwrap(), f.degree);
                assert!(m.support().iter().all(|j| s.subset.contains(j)));
            }
        }
    }

    #[test]
    fn primed_variant_agrees_on_examples() {
        for (w, d) in [
            (vec![407u64, 547, 5311, 12528, 18792], 37584),
            (vec![1, 1, 1, 1, 1], 4),
            (vec![2, 3, 4, 5, 7], 20),
            (vec![1, 1, 2, 2, 2], 7),
        ] {
            let f = fam(&w, d);
            assert_eq!(check_qs13(&f).verdict, check_qs13prime(&f), "{f}");
        }
    }

    #[test]
    fn full_verdict_examples() {
        let r = is_quasi_smooth(&fam(&[253, 7807, 48101, 112320, 168480], 336960));
        assert!(r.verdict);
        let r = is_quasi_smooth(&fam(&[1, 1, 2, 2, 2], 7));
        assert!(!r.verdict);
        assert_eq!(r.failure, Some(Failure::Codim2(0, 1)));
        assert!(is_quasi_smooth(&fam(&[1, 1, 1, 1, 2], 5)).verdict);
        assert!(quasi_smooth(&[1, 1, 1, 1, 2], 5));
        assert!(!quasi_smooth(&[2, 3, 4, 5, 7], 20));
    }
}
