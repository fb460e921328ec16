use num_complex::Complex64;
use num_integer::Integer;
use oppenheim_core::quadrature::integrate;
use oppenheim_core::sl2geom::IntMat2;
use oppenheim_core::theta::*;
use proptest::prelude::*;
use std::f64::consts::PI;

fn prof(k: usize, w: f64) -> GaussianProfile {
    GaussianProfile::new(k, w).unwrap()
}

#[test]
fn unitarity_by_quadrature() {
    let f = prof(1, 1.7);
    let norm0 = 1.0 / (2.0 * 1.7f64).sqrt();
    for &phi in &[0.3, 1.2, 2.9, 4.4] {
        let r = integrate(
            |x| {
                let v = f_phi(&f, phi, &[x], FPhiMode::ClosedForm).unwrap();
                Complex64::new(v.norm_sqr(), 0.0)
            },
            -40.0,
            40.0,
            1e-13,
            1e-12,
            10_000,
        )
        .unwrap();
        assert!((r.value.re - norm0).abs() < 1e-6, "φ={phi}: {} vs {norm0}", r.value.re);
        // two dimensions: the square
        let f2 = prof(2, 1.7);
        assert!((l2_norm_sq_f_phi(&f2, phi) - norm0 * norm0).abs() < 1e-12);
    }
}

#[test]
fn group_law_on_grid() {
    let f = prof(1, 0.9);
    for &(p1, p2) in &[(0.4, 0.7), (1.3, 2.2), (2.0, -0.5), (0.9, 3.0)] {
        let (_, w2) = f.phi_params(p2);
        let radius = (45.0 / (PI * w2.re)).sqrt();
        for &w in &[0.0, 0.5, -1.2, 2.0] {
            let lhs = apply_kernel_1d(|x| f_phi(&f, p2, &[x], FPhiMode::ClosedForm).unwrap(), p1, w, radius).unwrap();
            let rhs = f_phi(&f, p1 + p2, &[w], FPhiMode::ClosedForm).unwrap();
            assert!((lhs - rhs).norm() < 1e-6, "φ={p1}, φ'={p2}, w={w}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn closed_form_vs_quadrature_grid() {
    let f = prof(1, 0.5);
    for i in 0..12 {
        let phi = -6.0 + i as f64 * 1.03;
        let nu = (phi / PI).round();
        if (phi - nu * PI).abs() < 0.01 {
            continue;
        }
        for &w in &[0.0, 0.8, -1.6] {
            let a = f_phi(&f, phi, &[w], FPhiMode::ClosedForm).unwrap();
            let b = f_phi(&f, phi, &[w], FPhiMode::Quadrature).unwrap();
            assert!((a - b).norm() < 1e-8, "φ={phi} w={w}");
        }
    }
}

fn pt(u: f64, v: f64, phi: f64, xi: [f64; 4]) -> ThetaPoint {
    ThetaPoint::new(Complex64::new(u, v), phi, xi.to_vec()).unwrap()
}

#[test]
fn spec_points_generators() {
    let f = prof(2, 1.3);
    let g = prof(2, 0.7);
    let p = pt(0.3, 0.7, 0.2, [0.61, 0.17, 0.93, 0.38]);
    let t = GammaElement::new(IntMat2::T, vec![0; 4]).unwrap();
    let s = GammaElement::new(IntMat2::S, vec![0; 4]).unwrap();
    for gamma in [t, s] {
        let r = theta_pair_invariance_check(&f, &g, &p, &gamma, 1e-12).unwrap();
        assert!(r.diff < 1e-8, "{r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn gamma_invariance_random(
        u in -1.0f64..1.0, v in 0.3f64..2.0, phi in -3.0f64..3.0,
        xi in prop::array::uniform4(-1.0f64..1.0),
        which in 0usize..5,
        m in prop::array::uniform4(-2i64..=2),
    ) {
        let mats = [IntMat2::T, IntMat2::S, IntMat2::new(1, 0, 1, 1), IntMat2::new(2, 1, 1, 1), IntMat2::new(-1, 0, 0, -1)];
        let f = prof(2, 1.1);
        let g = prof(2, 0.6);
        let gamma = GammaElement::new(mats[which], m.to_vec()).unwrap();
        let r = theta_pair_invariance_check(&f, &g, &pt(u, v, phi, xi), &gamma, 1e-13).unwrap();
        let scale = r.val.norm().max(1.0);
        prop_assert!(r.diff < 1e-8 * scale, "{:?}", r);
    }

    #[test]
    fn modulus_periodic_in_xi1(u in -1.0f64..1.0, v in 0.2f64..2.0, phi in -3.0f64..3.0,
        xi in prop::array::uniform4(-1.0f64..1.0), m in prop::array::uniform2(-3i64..=3)) {
        let f = prof(2, 0.8);
        let a = theta_sum(&f, &pt(u, v, phi, xi), 1e-13).unwrap().value.norm();
        let xs = [xi[0] + m[0] as f64, xi[1] + m[1] as f64, xi[2], xi[3]];
        let b = theta_sum(&f, &pt(u, v, phi, xs), 1e-13).unwrap().value.norm();
        prop_assert!((a - b).abs() < 1e-11);
    }

    #[test]
    fn truncation_honest(u in -1.0f64..1.0, v in 0.05f64..2.0, phi in -3.0f64..3.0,
        xi in prop::array::uniform4(-1.0f64..1.0)) {
        let f = prof(2, 1.0);
        let tol = 1e-6;
        let coarse = theta_sum(&f, &pt(u, v, phi, xi), tol).unwrap();
        let fine = theta_sum(&f, &pt(u, v, phi, xi), 1e-15).unwrap();
        prop_assert!(fine.radius > coarse.radius);
        prop_assert!((coarse.value - fine.value).norm() < tol);
    }

    #[test]
    fn truncation_xy_sl2_invariant(u in -3.0f64..3.0, v in 0.01f64..20.0, which in 0usize..4, big_y in 1.0f64..4.0) {
        let mats = [IntMat2::T, IntMat2::S, IntMat2::new(3, 2, 4, 3), IntMat2::new(5, -2, 3, -1)];
        let tau = Complex64::new(u, v);
        let a = truncation_xy(tau, big_y).unwrap();
        let b = truncation_xy(mats[which].mobius(tau), big_y).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }
}

/// Term-by-term coset sum: every coprime bottom row `(c, d)` in a box gives a
/// coset; translate the point by an actual matrix with that row.
fn coset_oracle(f: &GaussianProfile, big_y: f64, tau: Complex64, xi: &[f64], bound: i64) -> f64 {
    let k = f.k;
    let mut total = 0.0;
    for c in -bound..=bound {
        for d in -bound..=bound {
            if c.gcd(&d) != 1 {
                continue;
            }
            let eg = c.extended_gcd(&d);
            // a d - b c = 1
            let (a, b) = (eg.y * eg.gcd, -eg.x * eg.gcd);
            let gamma = IntMat2::new(a, b, c, d);
            assert_eq!(gamma.det(), 1);
            let vg = gamma.mobius(tau).im;
            let cut = g_cutoff(vg, big_y);
            if cut == 0.0 {
                continue;
            }
            let x: Vec<f64> = (0..k).map(|i| c as f64 * xi[i] + d as f64 * xi[k + i]).collect();
            total += periodization_box(f, &x, vg.sqrt(), 12.0 / vg.sqrt() + 4.0) * vg.powf(k as f64 / 2.0) * cut;
        }
    }
    total
}

#[test]
fn f_big_y_matches_coset_oracle() {
    let f = prof(2, 1.0);
    let mut nonzero = 0;
    for &(u, v, big_y) in &[(1.0 / 3.0 + 1e-4, 0.001, 2.0), (0.4, 0.002, 3.0), (0.5, 0.01, 2.0), (-0.42, 0.05, 1.0), (0.0, 4.0, 1.5)] {
        for xi in [[0.0, 0.0, 0.29, 0.71], [0.0, 0.0, 0.0, 0.5]] {
            let tau = Complex64::new(u, v);
            let fast = f_big_y(&f, big_y, tau, &xi, 1e-12, 1000).unwrap();
            let slow = coset_oracle(&f, big_y, tau, &xi, 30);
            assert!((fast.value - slow).abs() < 1e-10 * slow.max(1e-3), "τ={tau}: {} vs {slow}", fast.value);
            nonzero += (fast.value > 1e-3) as usize;
        }
    }
    assert!(nonzero >= 5, "{nonzero}");
}

#[test]
fn f_big_y_left_invariant() {
    let f = prof(2, 0.7);
    let xi = [0.13, -0.4, 0.29, 0.71];
    let tau = Complex64::new(0.2, 0.003);
    let base = f_big_y(&f, 2.0, tau, &xi, 1e-12, 1000).unwrap().value;
    assert!(base > 0.0);
    let mats = [IntMat2::T, IntMat2::S, IntMat2::new(2, 1, 1, 1), IntMat2::new(3, -1, 7, -2), IntMat2::new(1, 0, -3, 1)];
    let shifts = [[0, 1, -1, 2], [1, 0, 0, 0], [0, 0, 3, -1], [2, 2, 2, 2], [-1, 0, 1, 0]];
    for (g, m) in mats.iter().zip(shifts) {
        let t2 = g.mobius(tau);
        let mut x2 = vec![0.0; 4];
        for i in 0..2 {
            x2[i] = g.a as f64 * xi[i] + g.b as f64 * xi[2 + i] + m[i] as f64;
            x2[2 + i] = g.c as f64 * xi[i] + g.d as f64 * xi[2 + i] + m[2 + i] as f64;
        }
        let moved = f_big_y(&f, 2.0, t2, &x2, 1e-12, 1000).unwrap().value;
        assert!((moved - base).abs() < 1e-8 * base, "{g:?}: {moved} vs {base}");
    }
}

#[test]
fn f_big_y_cutoff_budget() {
    let f = prof(2, 1.0);
    let err = f_big_y(&f, 1.0, Complex64::new(0.1, 1e-6), &[0.0; 4], 1e-10, 10).unwrap_err();
    assert!(err.is_budget());
}

#[test]
fn cusp_cutoff_only_nonconstant_cosets() {
    // with 𝒳_Y(τ) = 1 and v ≤ Y the rows (0, ±1) carry no weight
    let f = prof(2, 1.0);
    let big_y = 2.0;
    let tau = Complex64::new(0.01, 1.0 / 9.0); // reduces to 9i
    assert_eq!(truncation_xy(tau, big_y).unwrap(), 1.0);
    let xi = [0.2, 0.3, 0.1, 0.6];
    let full = f_big_y(&f, big_y, tau, &xi, 1e-12, 1000).unwrap();
    assert!(g_cutoff(tau.im, big_y) == 0.0);
    assert!(full.value > 0.0 && full.cosets > 0);
}
