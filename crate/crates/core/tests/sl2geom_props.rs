use std::collections::{HashSet, VecDeque};

use num_complex::Complex64;
use oppenheim_core::sl2geom::*;
use proptest::prelude::*;

fn unimodular() -> impl Strategy<Value = Mat2> {
    (-3.0f64..3.0, 0.05f64..20.0, -3.2f64..3.2)
        .prop_map(|(u, v, t)| iwasawa_compose(&IwasawaCoord { u, v, theta: t }))
}

fn sl2z() -> impl Strategy<Value = IntMat2> {
    prop::collection::vec(0usize..3, 0..12).prop_map(|word| {
        word.into_iter().fold(IntMat2::IDENTITY, |g, w| {
            let step = [IntMat2::T, IntMat2::T.inv(), IntMat2::S][w];
            step.mul(&g)
        })
    })
}

fn element(k: usize) -> impl Strategy<Value = GroupElement> {
    (unimodular(), prop::collection::vec(-5.0f64..5.0, 2 * k))
        .prop_map(|(m, xi)| GroupElement::new(m, xi).unwrap())
}

proptest! {
    #[test]
    fn group_law_associative(a in element(2), b in element(2), c in element(2)) {
        let left = a.op(&b).unwrap().op(&c).unwrap();
        let right = a.op(&b.op(&c).unwrap()).unwrap();
        let scale = 1.0 + a.m.frobenius() * b.m.frobenius() * c.m.frobenius();
        prop_assert!(left.m.dist(&right.m) < 1e-12 * scale);
        for (x, y) in left.xi.iter().zip(&right.xi) {
            prop_assert!((x - y).abs() < 1e-12 * scale * 10.0);
        }
        let unit = a.op(&GroupElement::identity(2)).unwrap();
        prop_assert_eq!(unit, a);
    }

    #[test]
    fn iwasawa_round_trip(m in unimodular()) {
        let c = iwasawa(&m).unwrap();
        prop_assert!(c.v > 0.0);
        prop_assert!(iwasawa_compose(&c).dist(&m) < 1e-10);
        // ‖M‖² = (u² + v² + 1) / v exactly
        let predicted = ((c.u * c.u + c.v * c.v + 1.0) / c.v).sqrt();
        prop_assert!((m.frobenius() - predicted).abs() < 1e-9 * predicted);
    }

    #[test]
    fn cuspidal_height_invariant(m in unimodular(), g in sl2z()) {
        let (y, gamma) = cuspidal_height(&m).unwrap();
        prop_assert!(y >= 3f64.sqrt() / 2.0 - 1e-12);
        let moved = g.to_real().mul(&m);
        let (y2, _) = cuspidal_height(&moved).unwrap();
        prop_assert!((y - y2).abs() < 1e-9 * y);
        let z = gamma.mobius(m.mobius(Complex64::i()));
        prop_assert!((z.im - y).abs() < 1e-9 * y);
    }
}

/// All SL(2,Z) matrices reachable by words of length <= `len` in T, T⁻¹, S.
fn words(len: usize) -> Vec<IntMat2> {
    let gens = [IntMat2::T, IntMat2::T.inv(), IntMat2::S];
    let mut seen = HashSet::from([IntMat2::IDENTITY]);
    let mut queue = VecDeque::from([(IntMat2::IDENTITY, 0)]);
    while let Some((g, depth)) = queue.pop_front() {
        if depth == len {
            continue;
        }
        for s in &gens {
            let h = s.mul(&g);
            if seen.insert(h) {
                queue.push_back((h, depth + 1));
            }
        }
    }
    seen.into_iter().collect()
}

#[test]
fn classification_matches_orbit_search() {
    let group = words(10);
    let range = -3i64..=3;
    for q1 in range.clone() {
        for q2 in range.clone() {
            for r1 in range.clone() {
                for r2 in range.clone() {
                    let (q, r) = ([q1, q2], [r1, r2]);
                    let reaches_a = group.iter().any(|g| {
                        let (nq, nr) = g.act(&q, &r);
                        nq.iter().chain(&nr).all(|x| x.abs() <= 50) && nq.iter().all(|&x| x == 0)
                    });
                    let class = classify_orbit(&q, &r).unwrap();
                    let expected = if q.iter().chain(&r).all(|&x| x == 0) {
                        OrbitClass::Zero
                    } else if reaches_a {
                        OrbitClass::A
                    } else {
                        OrbitClass::B
                    };
                    assert_eq!(class, expected, "q = {q:?}, r = {r:?}");
                    if class == OrbitClass::B {
                        let c = canonical_b_rep(&q, &r).unwrap();
                        assert!(is_canonical_b(&c), "{c:?}");
                        assert_eq!(c.transform.det(), 1);
                        assert_eq!(c.transform.act(&q, &r), (c.rep.q.clone(), c.rep.r.clone()));
                    }
                }
            }
        }
    }
}
