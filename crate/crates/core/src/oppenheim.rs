//! Values of the inhomogeneous form
//! `Q(x) = (x₁-α)² + (x₂-β)² - (x₃-α)² - (x₄-β)²` on `Z⁴`: counting,
//! spectrum and pair correlation of `‖m - ξ₂‖²`, the theta identity, and the
//! equidistribution experiment along closed horocycles.
//!
//! Every comparison of form values goes through [`key`], so the floating-point
//! predicate `a < fl(K(m₁) - K(m₂)) < b` is the same in every counting path and
//! the fast and brute methods agree exactly.

use crate::fenwick::Fenwick;
use crate::lattice::{for_each_in_ball, gaussian_radius};
use crate::numtheory::signed_frac;
use crate::quadrature::integrate;
use crate::summation::{ComplexNeumaier, Neumaier};
use crate::theta::{GaussianProfile, WindowGaussian};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::cell::RefCell;
use std::f64::consts::PI;

/// Largest number of lattice points held by a spectrum or a counting run.
pub const MAX_POINTS: f64 = 1e7;
/// Largest number of disk points for the counting methods.
pub const MAX_DISK_POINTS: f64 = 5e7;
/// Largest `T` accepted by the `O(T⁴)` brute counter.
pub const MAX_BRUTE_T: f64 = 60.0;
/// Largest number of `(u-node × lattice term)` products in the horocycle integral.
pub const MAX_HOROCYCLE_WORK: f64 = 2e10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftVector {
    pub alpha: f64,
    pub beta: f64,
}

impl ShiftVector {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidInput(format!("shift ({alpha}, {beta}) must be finite")));
        }
        Ok(Self { alpha, beta })
    }

    /// `(√2 - 1, √3 - 1)`
    pub fn algebraic() -> Self {
        Self { alpha: 2f64.sqrt() - 1.0, beta: 3f64.sqrt() - 1.0 }
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.alpha, self.beta]
    }
}

/// `‖(x, y) - (α, β)‖²`, the single place form values are computed.
#[inline]
pub fn key(x: f64, y: f64, s: &ShiftVector) -> f64 {
    let dx = x - s.alpha;
    let dy = y - s.beta;
    dx * dx + dy * dy
}

pub fn q_eval(x: &[f64; 4], shift: &ShiftVector) -> f64 {
    key(x[0], x[1], shift) - key(x[2], x[3], shift)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumList {
    pub lambda: f64,
    pub values: Vec<f64>,
    pub shift: ShiftVector,
}

/// All `(m-α)² + (n-β)² < Λ`, sorted, with multiplicity.
pub fn spectrum(shift: &ShiftVector, lambda: f64) -> Result<SpectrumList> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("spectrum bound Λ = {lambda} must be positive")));
    }
    if PI * lambda > MAX_POINTS {
        return Err(Error::Budget { what: "spectrum points".into(), achieved: PI * lambda });
    }
    let r = lambda.sqrt();
    let rows: Vec<i64> = ((shift.alpha - r).floor() as i64..=(shift.alpha + r).ceil() as i64).collect();
    let mut values: Vec<f64> = rows
        .par_iter()
        .flat_map_iter(|&m| {
            let dx = m as f64 - shift.alpha;
            let rest = (lambda - dx * dx).max(0.0).sqrt();
            ((shift.beta - rest).floor() as i64..=(shift.beta + rest).ceil() as i64)
                .map(move |n| key(m as f64, n as f64, shift))
                .filter(|&k| k < lambda)
                .collect::<Vec<_>>()
        })
        .collect();
    values.par_sort_unstable_by(f64::total_cmp);
    Ok(SpectrumList { lambda, values, shift: *shift })
}

/// Positions `[lo, hi)` in the ascending `sorted` with `a < fl(x - sorted[p]) < b`.
/// `fl(x - y)` is non-increasing in `y`, so the set is contiguous.
#[inline]
fn window(sorted: &[f64], x: f64, a: f64, b: f64) -> (usize, usize) {
    let lo = sorted.partition_point(|&y| x - y >= b);
    let hi = sorted.partition_point(|&y| x - y > a);
    (lo, hi.max(lo))
}

/// Number of ordered pairs `j ≠ k` with `a < λ_j - λ_k < b`.
pub fn pair_count(values: &[f64], a: f64, b: f64) -> u64 {
    let total: u64 = values
        .par_iter()
        .map(|&x| {
            let (lo, hi) = window(values, x, a, b);
            (hi - lo) as u64
        })
        .sum();
    // each j pairs with itself iff a < 0 < b
    let diag = if a < 0.0 && 0.0 < b { values.len() as u64 } else { 0 };
    total - diag
}

/// `R₂[a,b](Λ) = (πΛ)⁻¹ #{j ≠ k : λ_j, λ_k < Λ, a < λ_j - λ_k < b}`.
pub fn pair_correlation(shift: &ShiftVector, a: f64, b: f64, lambda: f64) -> Result<f64> {
    check_window(a, b)?;
    if !(lambda >= 1.0) {
        return Err(Error::Domain(format!("pair correlation needs Λ ≥ 1, got {lambda}")));
    }
    let s = spectrum(shift, lambda)?;
    Ok(pair_count(&s.values, a, b) as f64 / (PI * lambda))
}

/// `O(P²)` reference for [`pair_count`].
pub fn pair_count_brute(values: &[f64], a: f64, b: f64) -> u64 {
    let mut n = 0;
    for (j, &x) in values.iter().enumerate() {
        for (k, &y) in values.iter().enumerate() {
            let d = x - y;
            if j != k && a < d && d < b {
                n += 1;
            }
        }
    }
    n
}

fn check_window(a: f64, b: f64) -> Result<()> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput(format!("window needs a < b, got ({a}, {b})")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMethod {
    Brute,
    Fenwick,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountQuery {
    pub a: f64,
    pub b: f64,
    pub t: f64,
}

impl CountQuery {
    pub fn new(a: f64, b: f64, t: f64) -> Result<Self> {
        check_window(a, b)?;
        if !(t >= 1.0 && t.is_finite()) {
            return Err(Error::Domain(format!("counting radius T = {t} must be at least 1")));
        }
        Ok(Self { a, b, t })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountResult {
    /// `#{x ∈ Z⁴ \ Δ : ‖x‖ < T, a < Q(x) < b}`
    pub count: u64,
    /// `count / T²`
    pub normalized: f64,
}

struct DiskPoint {
    key: f64,
    norm: i64,
}

fn disk_points(t: f64, shift: &ShiftVector) -> Result<Vec<DiskPoint>> {
    if PI * t * t > MAX_DISK_POINTS {
        return Err(Error::Budget { what: "disk points".into(), achieved: PI * t * t });
    }
    let t2 = t * t;
    let r = t.ceil() as i64;
    let mut pts = Vec::new();
    for m in -r..=r {
        for n in -r..=r {
            let norm = m * m + n * n;
            if (norm as f64) < t2 {
                pts.push(DiskPoint { key: key(m as f64, n as f64, shift), norm });
            }
        }
    }
    Ok(pts)
}

/// Largest integer `n` with `fl(n₁ + n) < T²`, or `-1`.
fn norm_limit(n1: i64, t2: f64) -> i64 {
    let mut n = (t2 - n1 as f64).ceil() as i64 - 1;
    while ((n1 + n + 1) as f64) < t2 {
        n += 1;
    }
    while n >= 0 && !(((n1 + n) as f64) < t2) {
        n -= 1;
    }
    n
}

/// `N_{α,β}(a, b, T)`.
pub fn count_window(shift: &ShiftVector, q: &CountQuery, method: CountMethod) -> Result<CountResult> {
    let count = match method {
        CountMethod::Brute => count_brute(shift, q)?,
        CountMethod::Fenwick => count_fenwick(shift, q)?,
    };
    Ok(CountResult { count, normalized: count as f64 / (q.t * q.t) })
}

fn count_brute(shift: &ShiftVector, q: &CountQuery) -> Result<u64> {
    if q.t > MAX_BRUTE_T {
        return Err(Error::Budget { what: "brute-force counting radius".into(), achieved: q.t });
    }
    let pts = disk_points(q.t, shift)?;
    let t2 = q.t * q.t;
    let n = pts
        .par_iter()
        .enumerate()
        .map(|(i, p1)| {
            let mut c = 0u64;
            for (j, p2) in pts.iter().enumerate() {
                let d = p1.key - p2.key;
                if i != j && (((p1.norm + p2.norm) as f64) < t2) && q.a < d && d < q.b {
                    c += 1;
                }
            }
            c
        })
        .sum();
    Ok(n)
}

fn count_fenwick(shift: &ShiftVector, q: &CountQuery) -> Result<u64> {
    let pts = disk_points(q.t, shift)?;
    let t2 = q.t * q.t;
    let n = pts.len();
    // positions in key order
    let mut by_key: Vec<u32> = (0..n as u32).collect();
    by_key.par_sort_unstable_by(|&i, &j| pts[i as usize].key.total_cmp(&pts[j as usize].key));
    let sorted_keys: Vec<f64> = by_key.iter().map(|&i| pts[i as usize].key).collect();
    let mut pos = vec![0u32; n];
    for (p, &i) in by_key.iter().enumerate() {
        pos[i as usize] = p as u32;
    }
    // one query per m₁: key-window and norm limit for m₂
    let queries: Vec<(i64, u32, u32)> = pts
        .par_iter()
        .map(|p| {
            let (lo, hi) = window(&sorted_keys, p.key, q.a, q.b);
            (norm_limit(p.norm, t2), lo as u32, hi as u32)
        })
        .collect();
    let mut q_order: Vec<u32> = (0..n as u32).collect();
    q_order.par_sort_unstable_by_key(|&i| queries[i as usize].0);
    let mut p_order: Vec<u32> = (0..n as u32).collect();
    p_order.par_sort_unstable_by_key(|&i| pts[i as usize].norm);

    let mut tree = Fenwick::new(n);
    let mut next = 0;
    let mut total = 0u64;
    for &qi in &q_order {
        let (limit, lo, hi) = queries[qi as usize];
        while next < n && pts[p_order[next] as usize].norm <= limit {
            tree.add(pos[p_order[next] as usize] as usize, 1);
            next += 1;
        }
        total += tree.range(lo as usize, hi as usize);
    }
    // Δ: m₂ = m₁ has Q = 0 exactly
    if q.a < 0.0 && 0.0 < q.b {
        total -= pts.iter().filter(|p| ((2 * p.norm) as f64) < t2).count() as u64;
    }
    Ok(total)
}

/// `T⁻² Σ_{m ∈ Z⁴ \ Δ} f(T⁻¹m) g(Q(m))` with `f = f₁ ⊗ f₂` and Gaussian `g`.
/// Terms where `f < 10⁻¹⁵·max f` or `g < 10⁻¹⁵·max g` are dropped.
pub fn count_smooth(
    f1: &GaussianProfile,
    f2: &GaussianProfile,
    g: &WindowGaussian,
    shift: &ShiftVector,
    t: f64,
) -> Result<f64> {
    if f1.k != 2 || f2.k != 2 {
        return Err(Error::Dimension { expected: 2, found: if f1.k != 2 { f1.k } else { f2.k } });
    }
    if !(t >= 1.0) {
        return Err(Error::Domain(format!("T = {t} must be at least 1")));
    }
    let cut = (1e15f64).ln() / PI;
    let r1 = t * (cut / f1.width).sqrt();
    let r2 = t * (cut / f2.width).sqrt();
    let q_half = g.scale * cut.sqrt();
    let collect = |prof: &GaussianProfile, r: f64| -> Result<Vec<(i64, i64, f64, f64)>> {
        if PI * r * r > MAX_POINTS {
            return Err(Error::Budget { what: "smooth-count points".into(), achieved: PI * r * r });
        }
        let mut v = Vec::new();
        for_each_in_ball(&[0.0, 0.0], r, |m, _| {
            let (x, y) = (m[0] as f64, m[1] as f64);
            v.push((m[0], m[1], key(x, y, shift), prof.eval(&[x / t, y / t])));
        });
        v.sort_by(|p, q| p.2.total_cmp(&q.2));
        Ok(v)
    };
    let p1 = collect(f1, r1)?;
    let p2 = collect(f2, r2)?;
    let keys2: Vec<f64> = p2.iter().map(|p| p.2).collect();
    let lo_q = g.center - q_half;
    let hi_q = g.center + q_half;
    let partial: Vec<Neumaier> = p1
        .par_iter()
        .map(|&(m1, n1, k1, w1)| {
            let mut acc = Neumaier::new();
            let (lo, hi) = window(&keys2, k1, lo_q, hi_q);
            for &(m2, n2, k2, w2) in &p2[lo..hi] {
                if m1 == m2 && n1 == n2 {
                    continue;
                }
                acc.add(w1 * w2 * g.eval(k1 - k2));
            }
            acc
        })
        .collect();
    let mut s = Neumaier::new();
    for p in &partial {
        s.merge(p);
    }
    Ok(s.value() / (t * t))
}

/// Reference for [`count_smooth`]: plain double loop without the `g` window.
pub fn count_smooth_brute(
    f1: &GaussianProfile,
    f2: &GaussianProfile,
    g: &WindowGaussian,
    shift: &ShiftVector,
    t: f64,
    radius: f64,
) -> f64 {
    let mut pts = Vec::new();
    for_each_in_ball(&[0.0, 0.0], radius, |m, _| pts.push((m[0] as f64, m[1] as f64)));
    let mut s = Neumaier::new();
    for &(a, b) in &pts {
        let w1 = f1.eval(&[a / t, b / t]);
        for &(c, d) in &pts {
            if a == c && b == d {
                continue;
            }
            s.add(w1 * f2.eval(&[c / t, d / t]) * g.eval(q_eval(&[a, b, c, d], shift)));
        }
    }
    s.value() / (t * t)
}

fn nested_integrate<F: Fn(f64) -> Result<f64>>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let err = RefCell::new(None);
    let r = integrate(
        |x| match f(x) {
            Ok(v) => Complex64::new(v, 0.0),
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        },
        a,
        b,
        tol,
        0.0,
        20_000,
    );
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(r?.value.re)
}

fn check_quad(r_max: f64, quad_tol: f64) -> Result<()> {
    if !(r_max > 0.0 && r_max.is_finite()) || !(quad_tol > 0.0) {
        return Err(Error::InvalidInput(format!("need r_max > 0 and quad_tol > 0 (got {r_max}, {quad_tol})")));
    }
    Ok(())
}

/// `λ_f = ½ ∫₀^∞∫∫ f(r cos ζ₁, r sin ζ₁, r cos ζ₂, r sin ζ₂) dζ₁ dζ₂ r dr`,
/// with `f` assumed to vanish for `r > r_max`.
pub fn lambda_f<F: Fn([f64; 4]) -> f64>(f: F, r_max: f64, quad_tol: f64) -> Result<f64> {
    check_quad(r_max, quad_tol)?;
    let tp = 2.0 * PI;
    let inner_tol = quad_tol / (8.0 * tp * tp * r_max * r_max);
    let v = nested_integrate(
        |r| {
            let s = nested_integrate(
                |z1| {
                    let (s1, c1) = z1.sin_cos();
                    nested_integrate(
                        |z2| {
                            let (s2, c2) = z2.sin_cos();
                            Ok(f([r * c1, r * s1, r * c2, r * s2]))
                        },
                        0.0,
                        tp,
                        inner_tol,
                    )
                },
                0.0,
                tp,
                inner_tol * tp,
            )?;
            Ok(s * r)
        },
        0.0,
        r_max,
        quad_tol / 2.0,
    )?;
    Ok(0.5 * v)
}

/// `λ_{f,g} = ∫₀^∞ (∫ f(r cos ζ, r sin ζ) dζ)(∫ g(r cos ζ, r sin ζ) dζ) r dr`.
pub fn lambda_fg<F, G>(f: F, g: G, r_max: f64, quad_tol: f64) -> Result<f64>
where
    F: Fn([f64; 2]) -> f64,
    G: Fn([f64; 2]) -> f64,
{
    check_quad(r_max, quad_tol)?;
    let tp = 2.0 * PI;
    let inner_tol = quad_tol / (8.0 * tp * r_max * r_max);
    let ring = |h: &dyn Fn([f64; 2]) -> f64, r: f64| {
        nested_integrate(
            |z| {
                let (s, c) = z.sin_cos();
                Ok(h([r * c, r * s]))
            },
            0.0,
            tp,
            inner_tol,
        )
    };
    nested_integrate(|r| Ok(ring(&f, r)? * ring(&g, r)? * r), 0.0, r_max, quad_tol / 2.0)
}

/// Points `m ∈ Z²` with weight `T⁻¹ f((m - ξ₂)/T)` and key `‖m - ξ₂‖²`,
/// truncated with the Gaussian tail below `tail`.
struct WeightedSet {
    weights: Vec<f64>,
    keys: Vec<f64>,
    /// bound on `Σ |weight|` over all of `Z²`
    mass: f64,
}

fn weighted_set(f: &GaussianProfile, v: f64, shift: &ShiftVector, tail: f64) -> Result<WeightedSet> {
    // weight = v^{1/2} e^{-π ω v ‖m-ξ₂‖²}
    let a = PI * f.width * v;
    let pref = v.sqrt();
    let radius = gaussian_radius(2, a, pref, tail)?;
    if PI * radius * radius > MAX_POINTS {
        return Err(Error::Budget { what: "lattice points for the theta identity".into(), achieved: radius });
    }
    let mut pts = Vec::new();
    for_each_in_ball(&shift.as_array(), radius, |m, _| {
        let k = key(m[0] as f64, m[1] as f64, shift);
        pts.push((k, pref * (-a * k).exp()));
    });
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    // Σ_{m∈Z} e^{-a(m-x)²} ≤ 1 + √(π/a)
    let mass = pref * (1.0 + (PI / a).sqrt()).powi(2);
    Ok(WeightedSet { keys: pts.iter().map(|p| p.0).collect(), weights: pts.iter().map(|p| p.1).collect(), mass })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub diff: f64,
    /// Certified bound on `|lhs - exact|`.
    pub lhs_bound: f64,
    /// Certified bound on `|rhs - exact|`.
    pub rhs_bound: f64,
    pub u_nodes: usize,
}

/// `∫ Θ_f Θ̄_g(u + iv, 0; (0, ξ₂)) h(u) du` through the lattice side:
/// `ΣΣ w_f(m₁) w_g(m₂) ĥ(-½(K(m₁) - K(m₂)))`. Returns the value and a bound.
fn lattice_side(
    sf: &WeightedSet,
    sg: &WeightedSet,
    h: &WindowGaussian,
    budget: f64,
) -> (Complex64, f64) {
    let s = h.scale;
    let amp = h.amplitude.abs();
    let mass = sf.mass * sg.mass;
    // drop pairs with |ĥ| ≤ amp·s·e^{-π s² t_c²}
    let t_c = if amp * s * mass > 0.0 { ((amp * s * mass / budget).max(1.0).ln() / PI).sqrt() / s } else { 0.0 };
    let (lo_q, hi_q) = (-2.0 * t_c, 2.0 * t_c);
    let partial: Vec<ComplexNeumaier> = sf
        .keys
        .par_iter()
        .zip(sf.weights.par_iter())
        .map(|(&k1, &w1)| {
            let mut acc = ComplexNeumaier::new();
            // K₁ - K₂ ∈ [-2t_c, 2t_c]
            let lo = sg.keys.partition_point(|&k2| k1 - k2 > hi_q);
            let hi = sg.keys.partition_point(|&k2| k1 - k2 >= lo_q);
            for j in lo..hi.max(lo) {
                acc.add(h.fourier(-0.5 * (k1 - sg.keys[j])) * (w1 * sg.weights[j]));
            }
            acc
        })
        .collect();
    let mut total = ComplexNeumaier::new();
    for p in &partial {
        total.merge(p);
    }
    (total.value(), mass * amp * s * (-PI * s * s * t_c * t_c).exp())
}

fn mills(x: f64, s: f64) -> f64 {
    // ∫_x^∞ e^{-π t²/s²} dt
    if x <= 0.0 {
        f64::INFINITY
    } else {
        s * s * (-PI * x * x / (s * s)).exp() / (2.0 * PI * x)
    }
}

/// The same integral by the trapezoid rule in `u`: the integrand is a finite
/// trigonometric sum with frequencies `|Q|/2 ≤ K_max/2` times a Gaussian, so
/// the aliasing error is bounded through `ĥ` and the `u`-range cut through the
/// Gaussian tail of `h`.
fn horocycle_side(sf: &WeightedSet, sg: &WeightedSet, h: &WindowGaussian, budget: f64) -> Result<(Complex64, f64, usize)> {
    let s = h.scale;
    let amp = h.amplitude.abs();
    let mass = sf.mass * sg.mass;
    let kmax = sf.keys.last().copied().unwrap_or(0.0).max(sg.keys.last().copied().unwrap_or(0.0));
    let scale = (amp * s * mass / budget).max(2.0);
    // spacing: Σ_{j≥1} 2 amp s e^{-π s² (j/Δ - K_max/2)²} ≤ budget/2
    let mut t0 = (scale.ln() / PI).sqrt() / s;
    let alias = |t0: f64| {
        let step = kmax / 2.0 + t0;
        let mut sum = 0.0;
        for j in 1..1000 {
            let x = j as f64 * step - kmax / 2.0;
            let term = 2.0 * amp * s * (-PI * s * s * x * x).exp();
            sum += term;
            if term < 1e-300 {
                break;
            }
        }
        mass * sum
    };
    while alias(t0) > budget / 2.0 {
        t0 *= 1.1;
    }
    let delta = 1.0 / (kmax / 2.0 + t0);
    let mut l = s * (scale.ln() / PI).sqrt() + delta;
    let cut = |l: f64| mass * amp * 2.0 * mills(l - delta, s);
    while cut(l) > budget / 2.0 {
        l *= 1.1;
    }
    let n = (l / delta).ceil() as i64;
    let work = (2 * n + 1) as f64 * (sf.keys.len() + sg.keys.len()) as f64;
    if work > MAX_HOROCYCLE_WORK {
        return Err(Error::Budget { what: "horocycle trapezoid nodes".into(), achieved: work });
    }
    let theta = |set: &WeightedSet, u: f64| -> Complex64 {
        let mut acc = ComplexNeumaier::new();
        for (&k, &w) in set.keys.iter().zip(&set.weights) {
            let ph = 2.0 * PI * signed_frac(0.5 * k * u);
            acc.add(Complex64::from_polar(w, ph));
        }
        acc.value()
    };
    let nodes: Vec<i64> = (-n..=n).collect();
    let vals: Vec<Complex64> = nodes
        .par_iter()
        .map(|&i| {
            let u = h.center + i as f64 * delta;
            theta(sf, u) * theta(sg, u).conj() * h.eval(u)
        })
        .collect();
    let mut total = ComplexNeumaier::new();
    for v in vals {
        total.add(v);
    }
    Ok((total.value() * delta, alias(t0) + cut(l), nodes.len()))
}

fn identity_sets(
    f: &GaussianProfile,
    g: &GaussianProfile,
    h: &WindowGaussian,
    v: f64,
    shift: &ShiftVector,
    tol: f64,
) -> Result<(WeightedSet, WeightedSet, f64)> {
    if f.k != 2 || g.k != 2 {
        return Err(Error::Dimension { expected: 2, found: if f.k != 2 { f.k } else { g.k } });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tol = {tol} must be positive")));
    }
    // Θ truncation moves the product by ≤ (B_f τ_g + B_g τ_f + τ_f τ_g) ∫|h|
    let pref = |p: &GaussianProfile| v.sqrt() * (1.0 + (1.0 / (p.width * v)).sqrt()).powi(2);
    let hint = (h.amplitude.abs() * h.scale).max(1e-300);
    let tail = tol / (4.0 * hint * (pref(f) + pref(g) + 1.0));
    let sf = weighted_set(f, v, shift, tail)?;
    let sg = weighted_set(g, v, shift, tail)?;
    let trunc = (sf.mass * tail + sg.mass * tail + tail * tail) * hint;
    Ok((sf, sg, trunc))
}

/// Both sides of the identity at `v = T⁻²`, `ξ = (0, ξ₂)`.
pub fn theta_identity_check(
    f: &GaussianProfile,
    g: &GaussianProfile,
    h: &WindowGaussian,
    t: f64,
    shift: &ShiftVector,
    tol: f64,
) -> Result<ThetaIdentity> {
    if !(t >= 1.0 && t.is_finite()) {
        return Err(Error::Domain(format!("T = {t} must be at least 1")));
    }
    let v = 1.0 / (t * t);
    let (sf, sg, trunc) = identity_sets(f, g, h, v, shift, tol)?;
    let (lhs, lb, u_nodes) = horocycle_side(&sf, &sg, h, tol / 4.0)?;
    let (rhs, rb) = lattice_side(&sf, &sg, h, tol / 4.0);
    // the product of two real-weighted sums against a real even window is real
    Ok(ThetaIdentity {
        lhs: lhs.re,
        rhs: rhs.re,
        diff: (lhs - rhs).norm(),
        lhs_bound: lb + trunc,
        rhs_bound: rb + trunc,
        u_nodes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquidistRow {
    pub v: f64,
    pub lhs: f64,
    pub main_term: f64,
    pub second_term: f64,
    pub residual: f64,
    pub lhs_bound: f64,
}

/// For each `v`: the horocycle integral (evaluated on the lattice side),
/// `∫f ḡ · ∫h`, `λ_{f,ḡ} h(0)`, and the residual.
pub fn equidist_experiment(
    f: &GaussianProfile,
    g: &GaussianProfile,
    h: &WindowGaussian,
    shift: &ShiftVector,
    v_grid: &[f64],
    tol: f64,
) -> Result<Vec<EquidistRow>> {
    if let Some(&bad) = v_grid.iter().find(|&&v| !(v > 0.0 && v <= 1.0)) {
        return Err(Error::Domain(format!("v = {bad} outside (0, 1]")));
    }
    if f.k != 2 || g.k != 2 {
        return Err(Error::Dimension { expected: 2, found: if f.k != 2 { f.k } else { g.k } });
    }
    // ∫_{R²} e^{-π(ω_f+ω_g)‖x‖²} dx
    let main_term = h.integral() / (f.width + g.width);
    let r_max = (40.0 / (PI * f.width.min(g.width))).sqrt();
    let lambda = lambda_fg(|x| f.eval(&x), |x| g.eval(&x), r_max, 1e-11)?;
    let second_term = lambda * h.eval(0.0);
    v_grid
        .par_iter()
        .map(|&v| {
            let (sf, sg, trunc) = identity_sets(f, g, h, v, shift, tol)?;
            let (lhs, lb) = lattice_side(&sf, &sg, h, tol / 4.0);
            Ok(EquidistRow {
                v,
                lhs: lhs.re,
                main_term,
                second_term,
                residual: lhs.re - main_term - second_term,
                lhs_bound: lb + trunc,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_eval_examples() {
        let z = ShiftVector::new(0.0, 0.0).unwrap();
        assert_eq!(q_eval(&[1.0, 0.0, 0.0, 0.0], &z), 1.0);
        let s = ShiftVector::new(0.3, 0.4).unwrap();
        assert!((q_eval(&[1.0, 1.0, 0.0, 0.0], &s) - 0.6).abs() < 1e-15);
        assert_eq!(q_eval(&[3.0, -2.0, 3.0, -2.0], &ShiftVector::algebraic()), 0.0);
    }

    #[test]
    fn spectrum_examples() {
        let z = ShiftVector::new(0.0, 0.0).unwrap();
        assert_eq!(spectrum(&z, 1.5).unwrap().values, vec![0.0, 1.0, 1.0, 1.0, 1.0]);
        assert!(spectrum(&ShiftVector::new(0.5, 0.5).unwrap(), 0.01).unwrap().values.is_empty());
        let s = spectrum(&ShiftVector::algebraic(), 1e4).unwrap();
        let ratio = s.values.len() as f64 / (PI * 1e4);
        assert!((ratio - 1.0).abs() < 0.02);
        assert!(s.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn small_count_fixture() {
        // Q = 0 off the diagonal for shift 0: x₁ is a rotation/reflection of x₂
        let z = ShiftVector::new(0.0, 0.0).unwrap();
        let q = CountQuery::new(-0.1, 0.1, 2.5).unwrap();
        let b = count_window(&z, &q, CountMethod::Brute).unwrap();
        let f = count_window(&z, &q, CountMethod::Fenwick).unwrap();
        assert_eq!(b.count, f.count);
        // by hand: pairs of distinct points of equal norm with n₁ + n₂ < 6.25
        // norm 1: 4 points, 12 ordered pairs; norm 2: 4 points, 12 pairs
        assert_eq!(b.count, 24);
    }

    #[test]
    fn lambda_gaussian_values() {
        let v = lambda_f(|x| (-PI * x.iter().map(|t| t * t).sum::<f64>()).exp(), 6.0, 1e-9).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-8);
        let g = |x: [f64; 2]| (-PI * (x[0] * x[0] + x[1] * x[1])).exp();
        let l = lambda_fg(g, g, 6.0, 1e-10).unwrap();
        assert!((l - PI).abs() < 1e-9);
        assert_eq!(lambda_fg(|_| 0.0, g, 6.0, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn lambda_ball_indicator() {
        let v = lambda_f(|x| if x.iter().map(|t| t * t).sum::<f64>() < 1.0 { 1.0 } else { 0.0 }, 1.0, 1e-7).unwrap();
        assert!((v - PI * PI / 2.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn identity_zero_window() {
        let f = GaussianProfile::new(2, 1.0).unwrap();
        let h = WindowGaussian::with_amplitude(1.0, 0.0, 0.0).unwrap();
        let r = theta_identity_check(&f, &f, &h, 2.0, &ShiftVector::algebraic(), 1e-8).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    }

    #[test]
    fn identity_small_t() {
        let f = GaussianProfile::new(2, 1.0).unwrap();
        let g = GaussianProfile::new(2, 0.7).unwrap();
        let h = WindowGaussian::new(0.3, 0.1).unwrap();
        let r = theta_identity_check(&f, &g, &h, 1.0, &ShiftVector::new(0.0, 0.0).unwrap(), 1e-9).unwrap();
        assert!(r.diff < 1e-9, "{r:?}");
        assert!(r.lhs_bound < 1e-9 && r.rhs_bound < 1e-9);
    }
}
