//! Membership in numerical semigroups: does a monomial of degree `t` exist
//! in a given set of variables?

use num_integer::Integer;

use crate::weights::gcd_all;

/// Targets up to this size are answered with a direct reachability table.
const TABLE_LIMIT: u64 = 1 << 12;

/// The additive monoid generated by a finite set of positive integers.
///
/// Membership is answered from the Apéry table of the smallest (reduced)
/// generator: for every residue `r` the least element congruent to `r`.
#[derive(Clone, Debug)]
pub struct Semigroup {
    /// gcd of the generators; every element is a multiple of it.
    scale: u64,
    /// smallest generator after dividing by `scale`; 0 if there are none.
    base: u64,
    apery: Vec<u64>,
}

impl Semigroup {
    pub fn new(gens: &[u64]) -> Self {
        let scale = gcd_all(gens.iter().copied().filter(|&a| a > 0));
        if scale == 0 {
            return Semigroup {
                scale: 0,
                base: 0,
                apery: Vec::new(),
            };
        }
        let mut reduced: Vec<u64> = gens
            .iter()
            .filter(|&&a| a > 0)
            .map(|&a| a / scale)
            .collect();
        reduced.sort_unstable();
        reduced.dedup();
        let base = reduced[0];
        let mut apery = vec![u64::MAX; base as usize];
        apery[0] = 0;
        // Round-robin: fold in one generator at a time, walking each residue
        // cycle of `a mod base` starting from its current minimum.
        for &a in &reduced[1..] {
            let step = (a % base) as usize;
            let b = base as usize;
            let d = (a % base).gcd(&base) as usize;
            for p in 0..d {
                let start = (p..b)
                    .step_by(d)
                    .min_by_key(|&q| apery[q])
                    .expect("nonempty class");
                let mut cur = apery[start];
                if cur == u64::MAX {
                    continue;
                }
                let mut r = start;
                for _ in 0..b / d {
                    r = (r + step) % b;
                    cur = cur.saturating_add(a).min(apery[r]);
                    apery[r] = cur;
                }
            }
        }
        Semigroup { scale, base, apery }
    }

    pub fn contains(&self, t: u64) -> bool {
        if t == 0 {
            return true;
        }
        if self.scale == 0 || t % self.scale != 0 {
            return false;
        }
        let t = t / self.scale;
        t >= self.apery[(t % self.base) as usize]
    }

    /// Largest integer multiple of the scale not in the semigroup, if the
    /// semigroup has a finite gap set beyond 0 (`None` when `base == 1`).
    pub fn frobenius(&self) -> Option<u64> {
        if self.base <= 1 {
            return None;
        }
        let max = *self.apery.iter().max()?;
        Some((max - self.base) * self.scale)
    }
}

/// Reachability table `r[v]` for `v in 0..=target`.
pub fn reachability_table(gens: &[u64], target: u64) -> Vec<bool> {
    let t = target as usize;
    let mut reach = vec![false; t + 1];
    reach[0] = true;
    for &a in gens.iter().filter(|&&a| a > 0) {
        let a = a as usize;
        for v in a..=t {
            if reach[v - a] {
                reach[v] = true;
            }
        }
    }
    reach
}

/// Is `target` a nonnegative integer combination of `gens`?
///
/// `target = 0` is always representable by the empty monomial.
pub fn semigroup_member(gens: &[u64], target: u64) -> bool {
    if target == 0 {
        return true;
    }
    let mut any = false;
    for &a in gens {
        if a == 0 {
            continue;
        }
        any = true;
        if target % a == 0 {
            return true;
        }
    }
    if !any {
        return false;
    }
    let g = gcd_all(gens.iter().copied());
    if target % g != 0 {
        return false;
    }
    if target <= TABLE_LIMIT {
        reachability_table(gens, target)[target as usize]
    } else {
        Semigroup::new(gens).contains(target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive loop over `b_j <= target / a_j`.
    fn naive(gens: &[u64], target: u64) -> bool {
        fn go(gens: &[u64], t: u64) -> bool {
            match gens.split_first() {
                None => t == 0,
                Some((&a, rest)) => (0..=t / a).any(|b| go(rest, t - b * a)),
            }
        }
        go(gens, target)
    }

    #[test]
    fn examples() {
        assert!(semigroup_member(&[18792], 37584));
        assert!(semigroup_member(&[5], 0));
        assert!(semigroup_member(&[2, 3], 7));
        assert!(!semigroup_member(&[4, 6], 9));
        assert!(!semigroup_member(&[], 3));
        assert!(semigroup_member(&[], 0));
    }

    #[test]
    fn agrees_with_naive_oracle() {
        // All subsets of up to three weights <= 20, targets <= 200.
        for a in 1..=20u64 {
            for b in a..=20 {
                for c in [0u64, 7, 11, 13, 20] {
                    let gens: Vec<u64> = [a, b, c].into_iter().filter(|&x| x > 0).collect();
                    let sg = Semigroup::new(&gens);
                    let table = reachability_table(&gens, 200);
                    for t in 0..=200 {
                        let want = naive(&gens, t);
                        assert_eq!(semigroup_member(&gens, t), want, "{gens:?} {t}");
                        assert_eq!(sg.contains(t), want, "{gens:?} {t}");
                        assert_eq!(table[t as usize], want);
                    }
                }
            }
        }
    }

    #[test]
    fn large_targets_use_apery_table() {
        // gcd(12528, 18792) = 6264 and 37584 = 6 * 6264.
        assert!(semigroup_member(&[12528, 18792], 37584 * 3 + 12528));
        assert!(!semigroup_member(&[12528, 18792], 37584 + 1));
        let sg = Semigroup::new(&[6, 9, 20]);
        assert_eq!(sg.frobenius(), Some(43));
        assert!(!sg.contains(43));
        assert!((44..500).all(|t| sg.contains(t)));
        assert!(semigroup_member(&[6, 9, 20], 100_003));
        assert!(!semigroup_member(&[6, 9, 21], 100_003 * 3 + 1));
    }
}
