use num_integer::Integer;
use oppenheim_core::numtheory::*;
use proptest::prelude::*;

/// Divisor-enumeration oracle for (phi, mu, sigma, sigma1), all n <= limit at once.
fn sieve(limit: usize) -> Vec<(u64, i8, u64, u64)> {
    let mut sigma = vec![0u64; limit + 1];
    let mut sigma1 = vec![0u64; limit + 1];
    for d in 1..=limit {
        for m in (d..=limit).step_by(d) {
            sigma[m] += 1;
            sigma1[m] += d as u64;
        }
    }
    let mut phi: Vec<u64> = (0..=limit as u64).collect();
    let mut mu = vec![1i8; limit + 1];
    let mut composite = vec![false; limit + 1];
    for p in 2..=limit {
        if composite[p] {
            continue;
        }
        for m in (p..=limit).step_by(p) {
            if m > p {
                composite[m] = true;
            }
            phi[m] = phi[m] / p as u64 * (p as u64 - 1);
            mu[m] = -mu[m];
        }
        if let Some(sq) = p.checked_mul(p) {
            for m in (sq..=limit).step_by(sq) {
                mu[m] = 0;
            }
        }
    }
    (0..=limit).map(|n| (phi[n], mu[n], sigma[n], sigma1[n])).collect()
}

#[test]
fn multiplicative_functions_up_to_ten_thousand() {
    let table = sieve(10_000);
    for n in 1..=10_000u64 {
        let f = arithmetic_functions(n).unwrap();
        assert_eq!((f.phi, f.mu, f.sigma, f.sigma1), table[n as usize], "n = {n}");
        let primes: Vec<u64> = f.factorization.primes().collect();
        assert!(primes.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(f.factorization.value(), n);
    }
}

#[test]
fn smooth_split_round_trip() {
    for n in [1u64, 2, 3, 4, 6, 12] {
        for c in 1..=10_000u64 {
            let (c1, c2) = smooth_split(c, n).unwrap();
            assert_eq!(c1 * c2, c);
            assert_eq!(c2.gcd(&n), 1);
            let rad = factorize(c1).unwrap().radical();
            assert_eq!(n % rad, 0, "c = {c}, N = {n}");
        }
    }
}

fn fibonacci(k: usize) -> i128 {
    let (mut a, mut b) = (1i128, 1i128);
    for _ in 0..k {
        (a, b) = (b, a + b);
    }
    a
}

proptest! {
    #[test]
    fn convergent_identities(x in -50.0f64..50.0, depth in 1usize..12) {
        let cf = match continued_fraction_f64(x, depth) {
            Ok(cf) => cf,
            Err(oppenheim_core::Error::Precision { .. }) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        let c = &cf.convergents;
        prop_assert_eq!(c[0].1, 1);
        for k in 1..c.len() {
            let det = c[k].0 * c[k - 1].1 - c[k - 1].0 * c[k].1;
            prop_assert!(det == 1 || det == -1);
            prop_assert!(c[k].1 >= fibonacci(k));
            if k >= 2 {
                prop_assert!(c[k].1 > c[k - 1].1);
            }
            let approx = c[k - 1].0 as f64 / c[k - 1].1 as f64;
            let bound = 1.0 / (c[k - 1].1 as f64 * c[k].1 as f64);
            prop_assert!((x - approx).abs() <= bound * (1.0 + 1e-9));
        }
    }

    #[test]
    fn nearest_int_periodic(x in -1e3f64..1e3, n in -1000i64..1000) {
        let shifted = nearest_int_dist(x + n as f64);
        prop_assert!((shifted - nearest_int_dist(x)).abs() < 1e-12);
        prop_assert!((0.0..=0.5).contains(&shifted));
    }
}
