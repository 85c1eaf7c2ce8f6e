use num_complex::Complex64;
use proptest::prelude::*;
use supnorm::counting::*;

/// Naive oracle: every matrix in a cube, no geometric pruning.
fn naive(z: &UpperHalfPoint, delta: f64, m: i64, range: i64) -> Vec<[i64; 4]> {
    let mut out = vec![];
    for a in -range..=range {
        for b in -range..=range {
            for c in -range..=range {
                for d in -range..=range {
                    let g = [a, b, c, d];
                    if det(&g) == m && u_numerator(&g, z) <= m as f64 * delta * z.y * z.y {
                        out.push(g);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

#[test]
fn enumeration_matches_naive_cube() {
    for (x, y, delta, m) in [(0.1, 1.2, 0.5, 1), (-0.3, 2.0, 0.3, 6), (0.45, 1.5, 0.9, 12)] {
        let z = UpperHalfPoint::new(x, y).unwrap();
        let mut fast = enumerate(&z, delta, m).unwrap();
        fast.sort();
        assert_eq!(fast, naive(&z, delta, m as i64, 14), "z = {x}+{y}i, m = {m}");
    }
}

#[test]
fn stabilizer_limit_at_3i() {
    // γ(3i) = 3i exactly for ((a, −9c), (c, a)), det a² + 9c²
    let z = UpperHalfPoint::new(0.0, 3.0).unwrap();
    for m in [1u64, 9, 10, 13, 25, 45] {
        let want = (-10i64..=10)
            .flat_map(|a| (-10i64..=10).map(move |c| (a, c)))
            .filter(|(a, c)| a * a + 9 * c * c == m as i64)
            .count() as u64;
        let q = CountQuery { z, g_p: [1, 0, 0, 1], delta: 1e-9, l_mod: 1, m };
        assert_eq!(count_m(&q).unwrap(), want, "m = {m}");
    }
}

#[test]
fn unipotent_count_high_in_cusp() {
    // det 1, y = 20: only ±((1, b), (0, 1)) with b² ≤ δ′y²
    let q = CountQuery { z: UpperHalfPoint::new(0.2, 20.0).unwrap(), g_p: [1, 0, 0, 1], delta: 0.05, l_mod: 1, m: 1 };
    assert_eq!(count_m(&q).unwrap(), 18);
}

#[test]
fn sieve_monotonicity_and_op() {
    let z = UpperHalfPoint::new(0.17, 2.3).unwrap();
    let g = [2, 1, 1, 1];
    for m in [35u64, 49, 143] {
        let c = |l: u64, d: f64| count_m(&CountQuery { z, g_p: g, delta: d, l_mod: l, m }).unwrap();
        assert!(c(1, 0.1) >= c(3, 0.1));
        assert!(c(3, 0.1) >= c(9, 0.1));
        assert!(c(3, 0.05) <= c(3, 0.1));
        let op = count_m_op(&CountQuery { z, g_p: g, delta: 0.1, l_mod: 3, m }).unwrap();
        assert!(op <= c(1, 0.1));
    }
}

#[test]
fn distance_and_u_agree_at_short_range() {
    let z = UpperHalfPoint::new(0.3, 1.4).unwrap();
    for eps in [1e-2, 1e-3, 1e-4] {
        let w = UpperHalfPoint::new(0.3 + eps * 0.6, 1.4 + eps * 0.9).unwrap();
        let u = u_invariant(&z, &w);
        assert!(u <= 1e-4 || eps > 1e-3);
        let r = hyperbolic_distance(&z, &w).powi(2) / u;
        if u <= 1e-4 {
            assert!((0.9..=1.1).contains(&r));
        }
    }
}

#[test]
fn lattice_minimum_bound() {
    for (x, y) in [(0.0, 1.0), (0.5, 0.3), (-0.2, 0.05), (0.4, 7.0)] {
        let z = UpperHalfPoint::new(x, y).unwrap();
        let lat = Lattice::standard(&z);
        assert!(lat.lambda1() >= y.min(1.0) - 1e-12);
        assert!((lat.covolume() - y).abs() < 1e-12);
    }
    let lat = Lattice::standard(&UpperHalfPoint::new(0.0, 1.0).unwrap());
    let s = lat.scale(2.0);
    assert_eq!((s.lambda1(), s.covolume()), (2.0, 4.0));
}

#[test]
fn frozen_corpus_calibration() {
    let (zs, gs) = corpus(CORPUS_SEED);
    for x in [5u64, 7] {
        let r = verify_counting_corollary(&zs, &gs, x, 3, &[0, 1], CORPUS_DELTA).unwrap();
        assert_eq!(r.rows.len(), 60);
        assert!(r.max_ratio <= 2.0, "X = {x}: {}", r.max_ratio);
        assert!(r.max_m1_ratio <= 4.0);
        assert!(r.max_is_ratio <= 2.0);
        assert!(r.parabolic_all_divisible);
        assert!(r.parabolic_total > 0);
    }
}

#[test]
fn small_example_constant() {
    let z = UpperHalfPoint::new(0.0, 3.0).unwrap();
    let r = verify_counting_corollary(&[z], &[[1, 0, 0, 1]], 5, 3, &[1], 0.05).unwrap();
    assert!(r.max_ratio <= 8.0);
    assert!(r.parabolic_all_divisible);
}

#[test]
fn rejects_low_y_and_overflow() {
    let z = UpperHalfPoint::new(0.0, 1.0).unwrap();
    assert!(verify_counting_corollary(&[z], &[[1, 0, 0, 1]], 5, 3, &[1], 0.05).is_err());
    assert!(enumerate(&UpperHalfPoint::new(0.0, 2.0).unwrap(), 0.9, 10_000_000).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sl2z_consistency(seed in 0u64..1000, x in -0.5f64..0.5, y in 2.0f64..6.0, k in -3i64..=3) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = random_sl2z(&mut rng, 2);
        let z = UpperHalfPoint::new(x, y).unwrap();
        let g0 = [1, k, 0, 1];
        let z0 = z.act(&g0);
        let gp0 = mat_mul(&g0, &g);
        for m in [35u64, 49] {
            let a = count_m(&CountQuery { z, g_p: g, delta: 0.1, l_mod: 3, m }).unwrap();
            let b = count_m(&CountQuery { z: z0, g_p: gp0, delta: 0.1, l_mod: 3, m }).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn u_is_sl2_invariant(x in -1.0f64..1.0, y in 0.2f64..3.0, x2 in -1.0f64..1.0, y2 in 0.2f64..3.0, seed in 0u64..500) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = random_sl2z(&mut rng, 2);
        let (z, w) = (UpperHalfPoint::new(x, y).unwrap(), UpperHalfPoint::new(x2, y2).unwrap());
        let u0 = u_invariant(&z, &w);
        prop_assert!((u_invariant(&w, &z) - u0).abs() <= 1e-12 * (1.0 + u0));
        prop_assert!((u_invariant(&z.act(&g), &w.act(&g)) - u0).abs() <= 1e-7 * (1.0 + u0));
    }

    #[test]
    fn ball_counts_within_lattice_bounds(b1x in -2.0f64..2.0, b1y in 0.1f64..2.0, b2x in 0.2f64..3.0, cx in -2.0f64..2.0, cy in -2.0f64..2.0, r in 0.1f64..12.0) {
        let lat = Lattice::new(Complex64::new(b1x, b1y), Complex64::new(b2x, 0.0)).unwrap();
        let full = ball_count(&lat, Complex64::new(cx, cy), r, false).unwrap();
        prop_assert!(full.ratio <= 5.0, "{:?}", full);
        let prim = ball_count(&lat, Complex64::default(), r, true).unwrap();
        prop_assert!(prim.ratio <= 5.0, "{:?}", prim);
    }

    #[test]
    fn parabolic_normal_form_conjugates(e1 in -6i64..6, e2 in -6i64..6, a in 1i64..6, b in 1i64..20) {
        prop_assume!(num_integer::Integer::gcd(&e1, &e2) == 1);
        let eg = num_integer::Integer::extended_gcd(&e1, &e2);
        let xi_inv = [e1, -eg.y, e2, eg.x];
        prop_assume!(det(&xi_inv) == 1);
        let g = mat_mul(&xi_inv, &mat_mul(&[a, b, 0, a], &sl2_inverse(&xi_inv)));
        let (xi, bb) = parabolic_normal_form(&g).unwrap();
        prop_assert_eq!(det(&xi), 1);
        prop_assert_eq!(bb.abs(), b);
    }
}
