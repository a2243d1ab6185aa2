mod common;

use proptest::prelude::*;

use common::*;
use wfano_core::brute::BoxKind;
use wfano_core::classify::{classify_terminal, enumerate_48_triples, fano, tiger_ke_flags};
use wfano_core::cyg::{cone_extend, cy_search};
use wfano_core::qsmooth::{check_qs13, check_qs13prime, first_failure, is_quasi_smooth};
use wfano_core::search::SeriesFamily;
use wfano_core::semigroup::semigroup_member;
use wfano_core::weights::degree;
use wfano_core::{HypersurfaceFamily, Monomial, WeightSystem};

#[test]
fn subset_condition_and_disjunctive_variant_agree() {
    let bad = subset_condition_agreement(20_000, 7);
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn semigroup_matches_naive() {
    let bad = semigroup_agreement(300, 11);
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn eliminated_variable_does_not_matter() {
    let (n, bad) = elimination_invariance(&[10, 14, 20, 30, 45]);
    assert!(n > 100, "{n}");
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn one_minus_one_b_is_terminal() {
    assert!(reid_tai_terminal_family(1000).is_empty());
}

#[test]
fn reid_tai_matches_opposite_pairs() {
    let bad = opposite_pair_characterization(200);
    assert!(bad.is_empty(), "{:?}", &bad[..bad.len().min(10)]);
}

#[test]
fn higher_series_members_are_not_isolated() {
    assert!(isolated_series_members(&[3, 5, 7, 9]).is_empty());
}

#[test]
fn some_first_members_have_isolated_singularities() {
    // k = 1 members need not contain a curve of singular points.
    let iso = isolated_series_members(&[1]);
    let w: Vec<&[u64]> = iso.iter().map(|(w, _)| &w[..]).collect();
    assert!(w.contains(&&[1, 1, 1, 2, 2][..]));
    assert!(w.contains(&&[2, 2, 3, 7, 11][..]));
    assert!(classify_terminal(&fano(&[1, 1, 1, 2, 2]).unwrap()).unwrap());
    for (w, _) in iso.iter().filter(|(w, _)| w[0] == 2) {
        assert!(!classify_terminal(&fano(w).unwrap()).unwrap(), "{w:?}");
    }
}

#[test]
fn linear_cones_split_the_two_conditions() {
    // d equals a weight: x_4 alone has degree d.
    let f = fam(&[10, 17, 20, 40, 40], 40);
    assert_ne!(check_qs13(&f).verdict, check_qs13prime(&f));
}

#[test]
fn series_members_are_not_terminal_from_k3() {
    for &b in enumerate_48_triples() {
        for k in [3, 5, 7, 9] {
            let m = SeriesFamily::new(b).member(k);
            assert!(!classify_terminal(&m).unwrap(), "{m}");
        }
    }
}

#[test]
fn series_members_are_quasi_smooth() {
    for &b in enumerate_48_triples() {
        for k in [1, 3, 5, 7] {
            let m = SeriesFamily::new(b).member(k);
            assert!(first_failure(m.weights(), m.degree).is_none(), "{m}");
        }
    }
}

#[test]
fn pruning_is_sound() {
    let boxes = vec![
        (vec![5; 5], BoxKind::Fano),
        (vec![4, 6, 8, 10, 14], BoxKind::Fano),
        (vec![9; 4], BoxKind::CalabiYau),
        (vec![4, 5, 6, 8, 9], BoxKind::GeneralType(2)),
    ];
    assert!(pruning_soundness(&boxes).is_empty());
}

#[test]
fn k3_count_is_stable() {
    let base = cy_search(3, 33).unwrap().families;
    assert_eq!(base.len(), 95);
    assert_eq!(cy_search(3, 66).unwrap().families, base);
    assert!(base.iter().all(|f| f.ws.sum() == f.degree));
}

fn weights(max: u64, len: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1..=max, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn semigroup_is_monotone(gens in weights(20, 3), extra in 1u64..=20, t in 0u64..=200) {
        let mut bigger = gens.clone();
        bigger.push(extra);
        prop_assert!(!semigroup_member(&gens, t) || semigroup_member(&bigger, t));
    }

    #[test]
    fn degree_is_linear(w in weights(1000, 5), b in weights(50, 5), c in weights(50, 5)) {
        let ws = WeightSystem::sorted(&w).unwrap();
        let (mb, mc) = (Monomial::new(b), Monomial::new(c));
        let sum = degree(&mb, &ws).unwrap() + degree(&mc, &ws).unwrap();
        prop_assert_eq!(degree(&mb.mul(&mc), &ws).unwrap(), sum);
    }

    #[test]
    fn canonicalize_is_idempotent(w in weights(60, 5)) {
        if let Ok(ws) = WeightSystem::canonicalize(&w) {
            prop_assert_eq!(WeightSystem::canonicalize(ws.weights()).unwrap(), ws);
        }
    }

    #[test]
    fn verdict_ignores_order(w in weights(30, 5), shift in 0usize..5) {
        let d = w.iter().sum::<u64>() - 1;
        let mut rotated = w.clone();
        rotated.rotate_left(shift);
        let mut sorted = w.clone();
        sorted.sort_unstable();
        prop_assert_eq!(first_failure(&rotated, d).is_none(), first_failure(&sorted, d).is_none());
    }

    #[test]
    fn tiger_free_implies_ke(a0 in 1u64..500, a1 in 1u64..500, d in 1u64..500_000, n in 2usize..6) {
        let mut w = vec![a0.min(a1), a0.max(a1)];
        w.extend(std::iter::repeat(a0.max(a1)).take(n - 1));
        let f = HypersurfaceFamily::new(WeightSystem::sorted(&w).unwrap(), d);
        let (tiger_free, ke) = tiger_ke_flags(&f);
        prop_assert!(!tiger_free || ke);
    }

    #[test]
    fn cone_keeps_quasi_smoothness(w in weights(12, 4), k in 1u64..4) {
        let sum: u64 = w.iter().sum();
        let f = HypersurfaceFamily::new(WeightSystem::sorted(&w).unwrap(), sum + k);
        let c = cone_extend(&f, k).unwrap();
        prop_assert_eq!(c.degree, c.ws.sum());
        if is_quasi_smooth(&f).verdict {
            prop_assert!(is_quasi_smooth(&c).verdict, "{} -> {}", f, c);
        }
    }
}
