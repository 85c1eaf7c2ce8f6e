use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use supnorm::padic::*;
use supnorm::principal::*;

fn normalized(m: &PrincipalModel, v: &InducedVector) -> InducedVector {
    let n = m.norm(v);
    InducedVector { values: v.values.iter().map(|z| z / n).collect() }
}

/// Cell sizes by the valuation rule alone, counted over the whole group.
fn rule_sizes(p: u64, m: u32) -> Vec<u64> {
    let mut sizes = vec![0u64; 2 * m as usize + 1];
    for g in PadicMatrix::enumerate_gl2(p, m) {
        let i = if g.val(2) >= 1 { g.val(2) as usize - 1 } else { m as usize + g.val(3) as usize };
        sizes[i] += 1;
    }
    sizes
}

#[test]
fn partition_matches_rule_count() {
    for p in [3, 5] {
        let t = double_coset_partition(p, 2).unwrap();
        assert_eq!(t.cells.len(), 5);
        assert_eq!(t.cells.iter().map(|c| c.size).collect::<Vec<_>>(), rule_sizes(p, 2));
        assert_eq!(t.group_order, gl2_order(p, 2));
    }
    let t = double_coset_partition(3, 2).unwrap();
    assert_eq!(t.cells.iter().map(|c| c.size).collect::<Vec<_>>(), vec![648, 324, 1944, 648, 324]);
}

#[test]
fn identity_and_tilde_gamma0_cells() {
    let m = PrincipalModel::new(3, 1).unwrap();
    let t = double_coset_partition(3, 2).unwrap();
    let (id, _) = m.decompose(&PadicMatrix::identity(3, 2));
    let cell = t.cells.iter().find(|c| c.cosets.contains(&id)).unwrap();
    assert_eq!(cell.name, "gamma_2");
    let g0 = t.cells.iter().find(|c| c.name == "tilde_gamma_0").unwrap();
    assert!(g0.size > 0);
    // ‖f∘‖² = |cell of γ̃₀| / |G|
    let f0 = m.new_vector();
    assert!((m.inner(&f0, &f0).re - g0.size as f64 / t.group_order as f64).abs() < 1e-12);
}

#[test]
fn new_vector_values_and_orthogonality() {
    let m = PrincipalModel::new(3, 1).unwrap();
    let f0 = m.new_vector();
    assert!((m.eval(&f0, &PadicMatrix::new([0, -1, 1, 1], 3, 2)) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    let t = double_coset_partition(3, 2).unwrap();
    for cell in t.cells.iter().filter(|c| c.name.starts_with("gamma_")) {
        let ind = InducedVector {
            values: (0..m.num_cosets()).map(|i| if cell.cosets.contains(&i) { Complex64::new(1.0, 0.0) } else { Complex64::default() }).collect(),
        };
        assert_eq!(m.inner(&f0, &ind).norm(), 0.0);
    }
    let fml = m.ml_vector();
    assert!((m.eval(&fml, &PadicMatrix::identity(3, 2)) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn exhaustive_borel_equivariance() {
    let m = PrincipalModel::new(3, 1).unwrap();
    let g = PadicMatrix::enumerate_gl2(3, 2);
    let b = m.borel();
    assert!(m.check_equivariance(|k| m.new_vector_exp(k), &g, &b));
    assert!(m.check_equivariance(|k| m.ml_vector_exp(k), &g, &b));
}

#[test]
fn invariant_dimensions() {
    for (p, r) in [(3, 1), (5, 1)] {
        let m = PrincipalModel::new(p, r).unwrap();
        assert_eq!(m.new_vector_space_dim().unwrap(), 1);
        assert_eq!(m.ml_eigenspace_dim().unwrap(), 1);
        assert!(m.ml_is_eigenvector());
    }
}

#[test]
fn kh_fixes_new_vector() {
    let m = PrincipalModel::new(3, 1).unwrap();
    let f0 = m.new_vector();
    for g in PadicMatrix::enumerate_gl2(3, 2).iter().filter(|g| is_in_kh(g, 2)) {
        let h = m.group_act(g, &f0);
        assert!(h.values.iter().zip(&f0.values).all(|(a, b)| (a - b).norm() < 1e-12));
    }
}

#[test]
fn support_scan_is_clean() {
    for p in [3, 5] {
        let m = PrincipalModel::new(p, 1).unwrap();
        let rep = matrix_coeff_support_scan(&m);
        assert!(rep.exceptional.is_empty());
        assert_eq!(rep.checked, gl2_order(p, 2));
        assert!(rep.nonzero > 0);
    }
}

#[test]
fn kdk_predicate_matches_products() {
    let m = PrincipalModel::new(3, 1).unwrap();
    let set = double_coset_k_d_k(&m);
    for g in PadicMatrix::enumerate_gl2(3, 2) {
        assert_eq!(set.contains(&g), m.chi_tilde(&g).is_some());
    }
}

#[test]
fn unipotent_coefficient() {
    // ((1,1),(0,1)) has upper-right entry of valuation 0 < r
    let m = PrincipalModel::new(3, 1).unwrap();
    let f = m.ml_vector();
    let g = PadicMatrix::new([1, 1, 0, 1], 3, 2);
    assert!(m.inner(&m.group_act(&g, &f), &f).norm() < 1e-12);
    assert!((m.inner(&f, &f).re - m.norm(&f).powi(2)).abs() < 1e-12);
}

#[test]
fn local_periods() {
    for p in [3u64, 5] {
        let m = PrincipalModel::new(p, 1).unwrap();
        let q = p as f64;
        let zeta = 1.0 / (1.0 - 1.0 / q);
        let fml = m.ml_vector();
        assert!((m.local_period_q(&normalized(&m, &m.new_vector())) - 1.0).abs() < 1e-9);
        assert!(m.local_period_q(&normalized(&m, &fml)).abs() < 1e-9);
        for t in (1..p).filter(|t| t % p != 0) {
            let v = normalized(&m, &m.group_act(&m.c_t(t), &fml));
            assert!((m.local_period_q(&v) - zeta / q).abs() < 1e-9);
        }
    }
}

#[test]
fn c_t_has_unit_determinant() {
    let m = PrincipalModel::new(5, 1).unwrap();
    for t in 1..5 {
        assert_eq!(m.c_t(t).det(), 1);
    }
}

#[test]
fn newform_coefficients() {
    for p in [3u64, 5] {
        let m = PrincipalModel::new(p, 1).unwrap();
        let tab = newform_decomposition(&m);
        assert!((tab.sum_sq - 1.0).abs() < 1e-9);
        let q = p as f64;
        let want = ((1.0 - 1.0 / q).recip() / q).sqrt();
        assert!(tab.rows.iter().all(|r| (r.abs - want).abs() < 1e-9));
        assert!(tab.max_translate_overlap < 1e-12);
    }
    let tab = newform_decomposition(&PrincipalModel::new(3, 1).unwrap());
    assert!(tab.rows.iter().all(|r| (r.abs - (1.5f64 / 3.0).sqrt()).abs() < 1e-9));
}

#[test]
fn unitarity_sampled() {
    let m = PrincipalModel::new(3, 1).unwrap();
    let (f, h) = (m.new_vector(), m.ml_vector());
    for g in PadicMatrix::enumerate_gl2(3, 2).iter().step_by(37) {
        let lhs = m.inner(&m.group_act(g, &f), &m.group_act(g, &h));
        assert!((lhs - m.inner(&f, &h)).norm() < 1e-12);
    }
}

#[test]
fn type_stabiliser_is_thick_torus() {
    let m = PrincipalModel::new(3, 1).unwrap();
    let st = type_stabiliser(&m);
    assert_eq!(st.len(), m.thick_torus().len());
    assert!(st.iter().all(|g| m.chi_tilde(g).is_some()));
}

#[test]
fn truncated_lemmas_p3() {
    let m = PrincipalModel::new(3, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rep = truncated_coeff_lemmas(&m, &m.new_vector(), &mut rng);
    assert_eq!(rep.dim_v, 12);
    assert_eq!(rep.expected_dim, 12.0);
    assert!(rep.convolution_dev < 1e-9);
    assert!(rep.projector_dev < 1e-9);
    assert!(rep.orthogonal_complement_dev < 1e-9);
    assert!(rep.schur_dev < 1e-9);
}

#[test]
fn kirillov_new_vector_is_indicator() {
    for p in [3u64, 5] {
        let m = PrincipalModel::new(p, 1).unwrap();
        let mut vals = vec![];
        for yv in -4..=2 {
            for u in (1..p * p).filter(|u| u % p != 0) {
                let w = m.whittaker_value(KirillovVector::New, yv, u).unwrap();
                assert_eq!(w.is_zero(), yv != -2, "y = {p}^{yv}·{u}");
                if yv == -2 {
                    vals.push(w.w());
                }
            }
        }
        assert!(vals.iter().all(|w| (w - vals[0]).norm() < 1e-9));
    }
}

#[test]
fn kirillov_gamma_support() {
    for p in [3u64, 5] {
        let m = PrincipalModel::new(p, 1).unwrap();
        let q = p as f64;
        for a in 0..p * p {
            for yv in -4..=1 {
                for u in (1..p * p).filter(|u| u % p != 0) {
                    let w = m.whittaker_value(KirillovVector::Gamma(a), yv, u).unwrap();
                    // y ∈ 2b_χ a p⁻ᵐ + p⁻ʳ𝒪
                    let inside = yv >= -2 && {
                        let ypm = (u * p.pow((yv + 2) as u32)) as i64;
                        (ypm - 2 * (m.b_chi * a) as i64).rem_euclid(p as i64) == 0
                    };
                    assert_eq!(!w.is_zero(), inside, "a={a} y={p}^{yv}·{u}");
                    if inside {
                        assert!((w.integral().norm() - 1.0 / q).abs() < 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn incomplete_gauss_sum_magnitude() {
    // r = 2 so that 0 < v(a) < r is possible
    let m = PrincipalModel::new(3, 2).unwrap();
    for a in [3u64, 6, 12, 15] {
        let a0 = a / 3;
        for yv in -6..=0 {
            for u in (1..27).filter(|u| u % 3 != 0) {
                let w = m.whittaker_value(KirillovVector::TildeGamma(a), yv, u).unwrap();
                let inside = yv == -3 && (a0 * u + 27 - 2 * m.b_chi % 3).is_multiple_of(3);
                assert_eq!(!w.is_zero(), inside, "a={a} y=3^{yv}·{u}");
                if inside {
                    assert!((w.integral().norm() - 1.0 / 9.0).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn ml_vector_kirillov_magnitude() {
    let m = PrincipalModel::new(3, 1).unwrap();
    // |I(f_ML, y)| = q⁻ʳ on 𝔭⁻ʳ, the a = 0 case of the γ̃ family
    for yv in -3..=1 {
        for u in [1u64, 2, 4, 5] {
            let w = m.whittaker_value(KirillovVector::Ml, yv, u).unwrap();
            assert_eq!(!w.is_zero(), yv >= -1, "y=3^{yv}·{u}");
        }
    }
}

#[test]
fn commutators_land_in_k2() {
    let all = PadicMatrix::enumerate_gl2(3, 3);
    let k1: Vec<&PadicMatrix> = all.iter().filter(|g| subgroup_member(g, Subgroup::K(1)).unwrap()).collect();
    for g in k1.iter().step_by(97) {
        for h in k1.iter().step_by(89) {
            assert!(subgroup_member(&g.commutator(h).unwrap(), Subgroup::K(2)).unwrap());
        }
    }
}

fn arb_gl2() -> impl Strategy<Value = PadicMatrix> {
    (0u64..9, 0u64..9, 0u64..9, 0u64..9)
        .prop_map(|(a, b, c, d)| PadicMatrix { e: [a, b, c, d], p: 3, k: 2 })
        .prop_filter("invertible", |g| g.is_invertible())
}

proptest! {
    #[test]
    fn action_is_a_homomorphism(g in arb_gl2(), h in arb_gl2()) {
        let m = PrincipalModel::new(3, 1).unwrap();
        let f = m.new_vector();
        let lhs = m.group_act(&g, &m.group_act(&h, &f));
        let rhs = m.group_act(&g.mul(&h), &f);
        for (a, b) in lhs.values.iter().zip(&rhs.values) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn decomposition_reconstructs(g in arb_gl2()) {
        let m = PrincipalModel::new(3, 1).unwrap();
        let (i, _) = m.decompose(&g);
        let rep = m.rep(i);
        let b = g.mul(&rep.inverse().unwrap());
        prop_assert_eq!(b.e[2], 0);
    }

    #[test]
    fn chi_is_multiplicative(u in 1u64..25, v in 1u64..25) {
        prop_assume!(u % 5 != 0 && v % 5 != 0);
        let chi = make_character(5, 2, 3, None).unwrap();
        let lhs = chi.exponent(u * v % 25).unwrap();
        prop_assert_eq!(lhs, (chi.exponent(u).unwrap() + chi.exponent(v).unwrap()) % chi.order());
    }
}
