//! Enumeration of shifted integer lattices inside balls, and Gaussian tail bounds.

use crate::diophantine::sphere_area;
use crate::summation::ComplexNeumaier;
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

/// Largest number of lattice points a single ball enumeration may visit.
pub const MAX_BALL_POINTS: f64 = 2e8;

/// Bound on `Σ e^{-a‖y‖²}` over the points `y` of any translate of `Z^k`
/// with `‖y‖ > radius`. Infinite when `radius ≤ √k`.
///
/// Each point owns the unit cube around it, on which `‖x‖ - h ≤ ‖y‖` with
/// `h = √k/2`; the sum is then dominated by
/// `S_{k-1} ∫_{s₀}^∞ (s+h)^{k-1} e^{-as²} ds`, `s₀ = radius - 2h`.
pub fn gaussian_lattice_tail(k: usize, a: f64, radius: f64) -> f64 {
    let h = (k as f64).sqrt() / 2.0;
    let s0 = radius - 2.0 * h;
    if !(a > 0.0) || s0 <= 0.0 {
        return f64::INFINITY;
    }
    let g = (-a * s0 * s0).exp();
    // I_n = ∫_{s0}^∞ s^n e^{-as²} ds; I_0 by the Mills-ratio bound, I_1 exact,
    // then I_n = s0^{n-1} g / 2a + (n-1)/(2a) I_{n-2}.
    let mut i_prev = g / (2.0 * a * s0);
    let mut i_cur = g / (2.0 * a);
    let n = k - 1;
    let i_n = if n == 0 {
        i_prev
    } else {
        for m in 2..=n {
            let next = s0.powi(m as i32 - 1) * g / (2.0 * a) + (m as f64 - 1.0) / (2.0 * a) * i_prev;
            i_prev = i_cur;
            i_cur = next;
        }
        i_cur
    };
    sphere_area(k) * (1.0 + h / s0).powi(n as i32) * i_n
}

/// Smallest radius (on a 2% geometric grid above `2√k`) for which
/// `prefactor · gaussian_lattice_tail(k, a, radius) < tol`.
pub fn gaussian_radius(k: usize, a: f64, prefactor: f64, tol: f64) -> Result<f64> {
    if !(a > 0.0) || !(tol > 0.0) {
        return Err(Error::Domain(format!("gaussian radius needs a > 0, tol > 0 (a = {a}, tol = {tol})")));
    }
    let h = (k as f64).sqrt() / 2.0;
    let mut r = (2.0 * h + 0.5).max((1.0 / a).sqrt());
    for _ in 0..2000 {
        if prefactor * gaussian_lattice_tail(k, a, r) < tol {
            return Ok(r);
        }
        r *= 1.02;
    }
    Err(Error::Budget { what: "gaussian truncation radius".into(), achieved: r })
}

/// Rough count of lattice points in a ball, used for budget checks.
pub fn ball_count_estimate(k: usize, radius: f64) -> f64 {
    let h = (k as f64).sqrt() / 2.0;
    sphere_area(k) / k as f64 * (radius + h).powi(k as i32)
}

fn ball_range(c: f64, r: f64) -> std::ops::RangeInclusive<i64> {
    (c - r).ceil() as i64..=(c + r).floor() as i64
}

/// Calls `visit(m, ‖m - center‖²)` for each `m ∈ Z^k` with `‖m - center‖ ≤ radius`,
/// in lexicographic order.
pub fn for_each_in_ball<F: FnMut(&[i64], f64)>(center: &[f64], radius: f64, mut visit: F) {
    let mut m = vec![0i64; center.len()];
    rec(center, radius * radius, 0, 0.0, &mut m, &mut visit);
}

fn rec<F: FnMut(&[i64], f64)>(c: &[f64], r2: f64, i: usize, acc: f64, m: &mut [i64], visit: &mut F) {
    if i == c.len() {
        visit(m, acc);
        return;
    }
    let rem = r2 - acc;
    if rem < 0.0 {
        return;
    }
    for j in ball_range(c[i], rem.sqrt()) {
        let d = j as f64 - c[i];
        let a = acc + d * d;
        if a <= r2 {
            m[i] = j;
            rec(c, r2, i + 1, a, m, visit);
        }
    }
}

/// `Σ term(m, ‖m - center‖²)` over the ball, rows of the first coordinate in
/// parallel and merged in row order, so the result does not depend on the
/// thread count.
pub fn ball_sum<F>(center: &[f64], radius: f64, term: F) -> Result<Complex64>
where
    F: Fn(&[i64], f64) -> Complex64 + Sync,
{
    let k = center.len();
    if k == 0 {
        return Err(Error::Dimension { expected: 1, found: 0 });
    }
    if ball_count_estimate(k, radius) > MAX_BALL_POINTS {
        return Err(Error::Budget { what: "lattice points in ball".into(), achieved: radius });
    }
    let rows: Vec<i64> = ball_range(center[0], radius).collect();
    let partial: Vec<ComplexNeumaier> = rows
        .par_iter()
        .map(|&j| {
            let d = j as f64 - center[0];
            let mut acc = ComplexNeumaier::new();
            let rest = radius * radius - d * d;
            if rest < 0.0 {
                return acc;
            }
            let mut m = vec![j; k];
            let mut rec_visit = |tail: &[i64], r2: f64| {
                m[1..].copy_from_slice(tail);
                acc.add(term(&m, d * d + r2));
            };
            for_each_in_ball(&center[1..], rest.sqrt(), &mut rec_visit);
            acc
        })
        .collect();
    let mut total = ComplexNeumaier::new();
    for p in &partial {
        total.merge(p);
    }
    Ok(total.value())
}
