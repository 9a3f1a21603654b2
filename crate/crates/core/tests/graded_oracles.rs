//! The graded engine against brute-force and dense-elimination oracles.

mod common;

use common::{
    brute_cohomology, dense, dense_kernel, dense_rank, generated_triples, oracle_h, oracle_induced,
    random_complex,
};
use les_core::gf2::{BitMatrix, BitVec};
use les_core::graded::{
    long_exact_ranks, total_complex, total_spectral_check, verify_triple, GradedSpace,
    OrderInterval, OrderMap, SpectralVerdict,
};
use num_rational::Rational64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn cohomology_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in (0..500).map(|i| 1 + i % 12) {
        let (c, expect) = random_complex(&mut rng, n);
        let brute = brute_cohomology(&c.d().matrix());
        assert_eq!(brute, expect);
        assert_eq!(c.cohomology_rank(), brute, "{c:?}");
    }
}

#[test]
fn generated_triples_are_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let triples = generated_triples(200, &mut rng);
    for (name, t) in &triples {
        let diag = verify_triple(t);
        assert!(
            diag.all_passed(),
            "{name}: {:?}",
            diag.failures().collect::<Vec<_>>()
        );
        let total = total_complex(t).unwrap();
        assert_eq!(oracle_h(&total), 0, "{name}");
        let spectral = total_spectral_check(t).unwrap();
        assert_eq!(spectral.verdict, SpectralVerdict::Vanishes, "{name}");

        let r = long_exact_ranks(t).unwrap();
        let h = (
            oracle_h(t.prime()),
            oracle_h(t.middle()),
            oracle_h(t.double_prime()),
        );
        let rb = oracle_induced(t.b(), t.prime(), t.middle());
        let rc = oracle_induced(t.c(), t.middle(), t.double_prime());
        assert_eq!((r.h_prime, r.h_middle, r.h_double_prime), h, "{name}");
        assert_eq!((r.rank_b, r.rank_c), (rb, rc), "{name}");
        assert_eq!(h.1, rb + rc, "{name}");
        assert_eq!(h.2, rc + (h.0 - rb), "{name}");
        assert_eq!(r.rank_conn, r.rank_conn_from_identities, "{name}");
        assert_eq!(r.rank_conn, h.0 - rb, "{name}");
    }
}

fn matrix(n: usize, m: usize, bits: &[bool]) -> BitMatrix {
    let mut a = BitMatrix::zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            a.set(i, j, bits[(i * m + j) % bits.len()]);
        }
    }
    a
}

fn interval(lo: i64, len: i64, kind: u8) -> OrderInterval<Rational64> {
    let (a, b) = (Rational64::from(lo), Rational64::from(lo + len));
    match kind % 6 {
        0 => OrderInterval::closed(a, b),
        1 => OrderInterval::open(a, b),
        2 => OrderInterval::closed_open(a, b),
        3 => OrderInterval::at_least(a),
        4 => OrderInterval::above(a),
        _ => OrderInterval::below(b),
    }
}

proptest! {
    #[test]
    fn rank_and_kernel_agree_with_dense(n in 1usize..10, m in 1usize..10, bits in prop::collection::vec(any::<bool>(), 1..100)) {
        let a = matrix(n, m, &bits);
        let d = dense(&a);
        prop_assert_eq!(a.rank(), dense_rank(d.clone()));
        prop_assert_eq!(a.kernel().len(), dense_kernel(&d, m).len());
        for v in a.kernel() {
            prop_assert!(a.apply(&v).is_zero());
        }
        prop_assert_eq!(a.rank(), a.transpose().rank());
    }

    #[test]
    fn solve_returns_preimages(n in 1usize..9, m in 1usize..9, bits in prop::collection::vec(any::<bool>(), 1..80), x in prop::collection::vec(any::<bool>(), 9)) {
        let a = matrix(n, m, &bits);
        let x = BitVec::from_bools(&x[..m]);
        let b = a.apply(&x);
        let y = a.solve(&b).expect("b is in the image");
        prop_assert_eq!(a.apply(&y), b);
    }

    #[test]
    fn interval_intersection_and_sum(lo1 in -5i64..5, len1 in 0i64..5, k1 in 0u8..6, lo2 in -5i64..5, len2 in 0i64..5, k2 in 0u8..6, x in -20i64..20, y in -20i64..20) {
        let (i, j) = (interval(lo1, len1, k1), interval(lo2, len2, k2));
        let (x, y) = (Rational64::new(x, 2), Rational64::new(y, 2));
        let meet = i.intersect(&j);
        prop_assert_eq!(meet.contains(x), i.contains(x) && j.contains(x));
        prop_assert!(meet.is_subset_of(&i) && meet.is_subset_of(&j));
        if i.contains(x) && j.contains(y) {
            prop_assert!(i.minkowski_sum(&j).contains(x + y));
            prop_assert!(i.hull(&j).contains(x) && i.hull(&j).contains(y));
        }
    }

    #[test]
    fn split_recombines_and_orders_compose(gs in prop::collection::vec(0i64..12, 2..8), bits in prop::collection::vec(any::<bool>(), 1..64), theta in 0i64..12) {
        let mut gs = gs;
        gs.sort();
        let n = gs.len();
        let space = GradedSpace::new(gs.iter().enumerate().map(|(i, &g)| (format!("e{i}"), Rational64::from(g)))).unwrap();
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..i {
                m.set(i, j, bits[(i * n + j) % bits.len()]);
            }
        }
        let nonneg = OrderInterval::at_least(Rational64::from(0));
        let f = OrderMap::from_matrix(space.clone(), space.clone(), &m, nonneg).unwrap();
        let (low, high) = f.split_at(Rational64::from(theta));
        prop_assert_eq!(low.add(&high).unwrap().matrix(), f.matrix());
        prop_assert!(low.shifts().all(|s| s < Rational64::from(theta)));
        prop_assert!(high.shifts().all(|s| s >= Rational64::from(theta)));
        let ff = f.compose(&f).unwrap();
        prop_assert!(ff.check_order(&nonneg.minkowski_sum(&nonneg)));
        prop_assert_eq!(ff.matrix(), m.mul(&m));
    }
}
