use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mixsum::arith::{gcd_u64, PrimeModulus};
use mixsum::characters::CharacterFamily;
use mixsum::counting::{injection_phi, n_brute, n_fast, nsp_brute, nsp_fast};
use mixsum::diophantine::{curly_l, Theta};
use mixsum::shortsum::{case1_inner, FactorQuadruple};
use mixsum::sums::{family_sums, family_sums_direct};
use mixsum::weight::WeightFunction;

const PRIMES: [u64; 8] = [3, 5, 7, 11, 13, 101, 1009, 10007];

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn index_is_a_homomorphism(ri in 0usize..PRIMES.len(), a in 1i64..100_000, b in 1i64..100_000) {
        let m = PrimeModulus::new(PRIMES[ri]).unwrap();
        let r = PRIMES[ri] as i64;
        match (m.ind(a), m.ind(b), m.ind(a * b)) {
            (Some(i), Some(j), Some(k)) => prop_assert_eq!((i as u64 + j as u64) % (r as u64 - 1), k as u64),
            (_, _, None) => prop_assert!(a % r == 0 || b % r == 0),
            _ => prop_assert!(false),
        }
    }

    #[test]
    fn point_count_fast_is_brute(q in 1u64..80, d in -500i64..500) {
        prop_assert_eq!(n_fast(d, q), n_brute(d, q));
    }

    #[test]
    fn point_count_is_multiplicative(q1 in 1u64..25, q2 in 1u64..25, d in 0i64..1000) {
        prop_assume!(gcd_u64(q1, q2) == 1);
        prop_assert_eq!(n_fast(d, q1 * q2), n_fast(d, q1) * n_fast(d, q2));
    }

    #[test]
    fn nsp_fast_is_brute(s in -12i64..=12, p in -40i64..=40, bx in 1i64..10) {
        prop_assert_eq!(nsp_fast(s, p, bx), nsp_brute(s, p, bx));
    }

    #[test]
    fn injection_lands_on_surface(m1 in -50i64..50, m2 in -50i64..50, n1 in -50i64..50, n2 in -50i64..50) {
        prop_assert!(injection_phi(m1, m2, n1, n2).on_surface());
    }

    #[test]
    fn factor_quadruple_roundtrip(g in 1u64..200, h in 1u64..200, a in 1u64..200, b in 1u64..200) {
        prop_assume!(gcd_u64(a, b) == 1);
        let q = FactorQuadruple { g, h, a, b };
        let (m1, m2, n1, n2) = q.solution();
        prop_assert_eq!(FactorQuadruple::from_solution(m1, m2, n1, n2), Some(q));
        prop_assert_eq!(q.fits(200), m1.max(m2).max(n1).max(n2) <= 200);
    }

    #[test]
    fn mobius_unfolding_drops_one_term(g in 1u64..10, h in 1u64..10, x in 100u64..400) {
        prop_assume!(g != h);
        let c = case1_inner(g, h, x, &Theta::golden_minus_1()).unwrap();
        prop_assert!((c.difference - 1.0).norm() < 1e-9);
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn dft_matches_direct(ri in 0usize..6, x in 1.0f64..150.0, flat in any::<bool>()) {
        let fam = CharacterFamily::new(PRIMES[ri]).unwrap();
        let w = if flat { WeightFunction::flat() } else { WeightFunction::bump() };
        let th = Theta::sqrt2_minus_1();
        let a = family_sums(&fam, x, &th, &w);
        let b = family_sums_direct(&fam, x, &th, &w);
        for (u, v) in a.values.iter().zip(&b.values) {
            prop_assert!((u - v).norm() < 1e-10 * (1.0 + x));
        }
    }
}

#[test]
fn distance_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for th in [Theta::sqrt2_minus_1(), Theta::pi(), Theta::e()] {
        for _ in 0..1000 {
            let q = rng.gen_range(1..=1_000_000i64);
            let enc = th.dist_nearest_int(q);
            let fast = th.dist_nearest_int_fast(q);
            assert!(enc.width() <= 4.0 * f64::EPSILON * enc.hi);
            assert!((enc.mid() - fast).abs() < 1e-15, "q = {q}");
        }
    }
}

#[test]
fn curly_l_spacing() {
    let th = Theta::sqrt2_minus_1();
    for x in [1e3, 1e4, 1e5] {
        let l = curly_l(&th, x, 0.1).unwrap();
        assert!(l.undecided.is_empty());
        assert!(l.contains(0));
        let ratio = l.spacing_ratio.unwrap();
        assert!(ratio > 0.02);
    }
}
