//! Census-free property checks shared by the property tests and the
//! acceptance run. Each returns the offending inputs instead of panicking.

#![allow(dead_code)]

use num_integer::Integer;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use wfano_core::brute::{brute_search, unpruned_oracle, BoxKind, BruteConfig};
use wfano_core::classify::{
    admissible_eliminations, enumerate_48_triples, is_terminal_type, singularities, vertex_type,
    Location, QuotientSingularity,
};
use wfano_core::qsmooth::{check_qs13, check_qs13prime};
use wfano_core::search::SeriesFamily;
use wfano_core::semigroup::semigroup_member;
use wfano_core::{HypersurfaceFamily, WeightSystem};

pub fn fam(w: &[u64], d: u64) -> HypersurfaceFamily {
    HypersurfaceFamily::new(WeightSystem::sorted(w).unwrap(), d)
}

/// Exhaustive search over exponent vectors.
pub fn naive_member(gens: &[u64], target: u64) -> bool {
    match gens.split_first() {
        None => target == 0,
        Some((&a, rest)) => (0..=target / a).any(|b| naive_member(rest, target - b * a)),
    }
}

/// Random 5-tuples with weights in `1..=50`, half with `d = sum - 1` and half
/// with `d` uniform in `1..=2 sum` but different from every weight (a weight
/// equal to `d` makes `X` a linear cone). Returns the disagreements.
pub fn subset_condition_agreement(samples: usize, seed: u64) -> Vec<HypersurfaceFamily> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut bad = Vec::new();
    for s in 0..samples {
        let w: Vec<u64> = (0..5).map(|_| rng.gen_range(1..=50)).collect();
        let sum: u64 = w.iter().sum();
        let d = if s % 2 == 0 {
            sum - 1
        } else {
            loop {
                let d = rng.gen_range(1..=2 * sum);
                if !w.contains(&d) {
                    break d;
                }
            }
        };
        let f = fam(&w, d);
        let rep = check_qs13(&f);
        if rep.verdict != check_qs13prime(&f) {
            bad.push(f);
        } else if rep.verdict
            && rep
                .per_subset
                .iter()
                .any(|s| s.subset.len() == 1 && s.target_set_size == 0)
        {
            bad.push(f);
        }
    }
    bad
}

/// Semigroup membership against the naive oracle on random generator sets
/// (weights <= 20, up to four of them) and every target <= 200.
pub fn semigroup_agreement(sets: usize, seed: u64) -> Vec<(Vec<u64>, u64)> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut bad = Vec::new();
    for _ in 0..sets {
        let len = rng.gen_range(1..=4);
        let gens: Vec<u64> = (0..len).map(|_| rng.gen_range(1..=20)).collect();
        for t in 0..=200 {
            if semigroup_member(&gens, t) != naive_member(&gens, t) {
                bad.push((gens.clone(), t));
            }
        }
    }
    bad
}

/// At every vertex of every quasi-smooth family in the box, the terminal
/// verdict of the vertex type does not depend on the eliminated variable.
pub fn elimination_invariance(bounds: &[u64]) -> (usize, Vec<(Vec<u64>, usize)>) {
    let fams = brute_search(&BruteConfig::new(bounds.to_vec(), BoxKind::Fano))
        .unwrap()
        .families;
    let mut bad = Vec::new();
    for f in &fams {
        let a = f.weights();
        for i in 0..a.len() {
            if a[i] == 1 || f.degree % a[i] == 0 {
                continue;
            }
            let verdicts: Vec<bool> = admissible_eliminations(f, i)
                .into_iter()
                .filter_map(|j| vertex_type(f, i, j).ok())
                .map(|q| is_terminal_type(&q))
                .collect();
            if verdicts.windows(2).any(|p| p[0] != p[1]) {
                bad.push((a.to_vec(), i));
            }
        }
    }
    (fams.len(), bad)
}

fn quotient(r: u64, w: &[u64]) -> QuotientSingularity {
    QuotientSingularity {
        r,
        w: w.to_vec(),
        location: Location::Vertex(0),
    }
}

/// `1/r(1, r - 1, b)` with `gcd(b, r) = 1` for `2 <= r <= max_r`.
pub fn reid_tai_terminal_family(max_r: u64) -> Vec<(u64, u64)> {
    let mut bad = Vec::new();
    for r in 2..=max_r {
        for b in 1..r {
            if b.gcd(&r) == 1 && !is_terminal_type(&quotient(r, &[1, r - 1, b])) {
                bad.push((r, b));
            }
        }
    }
    bad
}

/// With all weights prime to `r`, terminal iff two weights are opposite
/// mod `r`. Checked on `1/r(1, b, c)`, which covers every such type up to
/// the choice of generator.
pub fn opposite_pair_characterization(max_r: u64) -> Vec<(u64, u64, u64)> {
    let mut bad = Vec::new();
    for r in 2..=max_r {
        for b in (1..r).filter(|b| b.gcd(&r) == 1) {
            for c in (b..r).filter(|c| c.gcd(&r) == 1) {
                let want = (1 + b) % r == 0 || (1 + c) % r == 0 || (b + c) % r == 0;
                if is_terminal_type(&quotient(r, &[1, b, c])) != want {
                    bad.push((r, b, c));
                }
            }
        }
    }
    bad
}

/// Members `k` of every series whose basket has no non-isolated entry.
pub fn isolated_series_members(ks: &[u64]) -> Vec<(Vec<u64>, u64)> {
    let mut bad = Vec::new();
    for &b in enumerate_48_triples() {
        for &k in ks {
            let m = SeriesFamily::new(b).member(k);
            let isolated = match singularities(&m) {
                Ok(basket) => basket.iter().all(|q| q.is_isolated()),
                Err(_) => false,
            };
            if isolated {
                bad.push((m.weights().to_vec(), k));
            }
        }
    }
    bad
}

/// Pruned, unpruned and naive brute-force runs agree on each box.
pub fn pruning_soundness(boxes: &[(Vec<u64>, BoxKind)]) -> Vec<Vec<u64>> {
    let mut bad = Vec::new();
    for (bounds, kind) in boxes {
        let mut cfg = BruteConfig::new(bounds.clone(), *kind);
        let pruned = brute_search(&cfg).unwrap().families;
        cfg.prune = false;
        let plain = brute_search(&cfg).unwrap().families;
        cfg.threads = Some(1);
        let single = brute_search(&cfg).unwrap().families;
        let naive = unpruned_oracle(bounds, *kind);
        if pruned != plain || plain != naive || single != plain {
            bad.push(bounds.clone());
        }
    }
    bad
}
