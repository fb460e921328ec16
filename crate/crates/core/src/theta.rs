//! Jacobi theta sums for Gaussian test functions.
//!
//! `Θ_f(τ,φ;ξ) = v^{k/4} Σ_m f_φ((m-ξ₂)√v) e(½‖m-ξ₂‖²u + m·ξ₁)` where `f_φ`
//! is the image of `f` under the unitary family with kernel
//! `G_φ(w,w') = e(-k(2ν+1)/8) |sin φ|^{-k/2} e[(½(‖w‖²+‖w'‖²)cos φ - w·w')/sin φ]`
//! on `νπ < φ < (ν+1)π`. For the Gaussian `f(w) = e^{-πω‖w‖²}` the image is
//! again Gaussian: with `z = cos φ + iω sin φ`,
//! `f_φ(w) = |z|^{-k/2} e^{-ikϑ/2} e^{-π W ‖w‖²}`, `W = (ω cos φ + i sin φ)/z`,
//! and `ϑ` the continuous branch of `arg z` that agrees with `φ` at multiples of π.

use crate::kloosterman::e;
use crate::lattice::{ball_sum, for_each_in_ball, gaussian_radius};
use crate::numtheory::signed_frac;
use crate::quadrature::integrate;
use crate::sl2geom::{reduce_to_fundamental_domain, IntMat2};
use crate::{Error, Result};
use num_complex::Complex64;
use num_integer::Integer;
use std::f64::consts::PI;

/// Relative accuracy asked of the kernel quadrature.
pub const KERNEL_REL_TOL: f64 = 1e-10;
/// Distance from multiples of π inside which the kernel quadrature is refused.
pub const KERNEL_PI_GUARD: f64 = 1e-3;
/// Absolute floor for the kernel quadrature, for outputs deep in the Gaussian tail.
pub const KERNEL_ABS_TOL: f64 = 1e-14;
const KERNEL_MAX_PIECES: usize = 200_000;

/// `f(w) = e^{-π·width·‖w‖²}` on `R^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianProfile {
    pub k: usize,
    pub width: f64,
}

impl GaussianProfile {
    pub fn new(k: usize, width: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("dimension k must be positive".into()));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidInput(format!("gaussian width {width} must be positive")));
        }
        Ok(Self { k, width })
    }

    pub fn eval(&self, w: &[f64]) -> f64 {
        (-PI * self.width * w.iter().map(|x| x * x).sum::<f64>()).exp()
    }

    /// `(phase, W)` with `f_φ(w) = phase · e^{-πW‖w‖²}`.
    pub fn phi_params(&self, phi: f64) -> (Complex64, Complex64) {
        let (s, c) = phi.sin_cos();
        let z = Complex64::new(c, self.width * s);
        let w = Complex64::new(self.width * c, s) / z;
        let arg = z.im.atan2(z.re);
        let d = (arg - phi + PI).rem_euclid(2.0 * PI) - PI;
        let th = phi + d;
        let k = self.k as f64;
        let phase = Complex64::from_polar(z.norm().powf(-k / 2.0), -k * th / 2.0);
        (phase, w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FPhiMode {
    ClosedForm,
    Quadrature,
}

/// A point `(τ, φ, ξ)` with `ξ = (ξ₁, ξ₂) ∈ R^{2k}`. `φ` is kept as given:
/// `U^{φ+2π} = (-1)^k U^φ`, so reducing mod 2π would flip odd-`k` signs.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaPoint {
    pub tau: Complex64,
    pub phi: f64,
    pub xi: Vec<f64>,
}

impl ThetaPoint {
    pub fn new(tau: Complex64, phi: f64, xi: Vec<f64>) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(Error::Domain(format!("theta point needs Im τ > 0, got {tau}")));
        }
        if xi.is_empty() || xi.len() % 2 != 0 {
            return Err(Error::Dimension { expected: 2 * (xi.len() / 2).max(1), found: xi.len() });
        }
        Ok(Self { tau, phi, xi })
    }

    pub fn k(&self) -> usize {
        self.xi.len() / 2
    }

    pub fn xi1(&self) -> &[f64] {
        &self.xi[..self.k()]
    }

    pub fn xi2(&self) -> &[f64] {
        &self.xi[self.k()..]
    }
}

/// `h(u) = amplitude · e^{-π((u-center)/scale)²}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowGaussian {
    pub scale: f64,
    pub center: f64,
    pub amplitude: f64,
}

impl WindowGaussian {
    pub fn new(scale: f64, center: f64) -> Result<Self> {
        Self::with_amplitude(scale, center, 1.0)
    }

    pub fn with_amplitude(scale: f64, center: f64, amplitude: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) || !center.is_finite() || !amplitude.is_finite() {
            return Err(Error::InvalidInput(format!("window needs scale > 0 (scale {scale})")));
        }
        Ok(Self { scale, center, amplitude })
    }

    pub fn eval(&self, u: f64) -> f64 {
        let t = (u - self.center) / self.scale;
        self.amplitude * (-PI * t * t).exp()
    }

    /// `ĥ(t) = ∫ h(u) e(-tu) du`.
    pub fn fourier(&self, t: f64) -> Complex64 {
        let s = self.scale;
        e(-self.center * t) * (self.amplitude * s * (-PI * s * s * t * t).exp())
    }

    pub fn integral(&self) -> f64 {
        self.amplitude * self.scale
    }
}

/// One-dimensional kernel applied to `f`, i.e. `∫ G¹_φ(w,w') f(w') dw'` over
/// `|w'| ≤ radius`; the caller accounts for the part outside.
pub fn apply_kernel_1d<F: Fn(f64) -> Complex64>(f: F, phi: f64, w: f64, radius: f64) -> Result<Complex64> {
    let nu = (phi / PI).floor();
    if (phi - nu * PI) < KERNEL_PI_GUARD || ((nu + 1.0) * PI - phi) < KERNEL_PI_GUARD {
        return Err(Error::Domain(format!("φ = {phi} is within {KERNEL_PI_GUARD} of a multiple of π")));
    }
    let (s, c) = phi.sin_cos();
    let pref = e(-(2.0 * nu + 1.0) / 8.0) * s.abs().powf(-0.5);
    let r = integrate(
        |x| {
            let ph = (0.5 * (w * w + x * x) * c - w * x) / s;
            e(ph) * f(x)
        },
        -radius,
        radius,
        KERNEL_ABS_TOL,
        KERNEL_REL_TOL,
        KERNEL_MAX_PIECES,
    )?;
    Ok(pref * r.value)
}

/// `f_φ(w)` for a Gaussian profile.
pub fn f_phi(profile: &GaussianProfile, phi: f64, w: &[f64], mode: FPhiMode) -> Result<Complex64> {
    if w.len() != profile.k {
        return Err(Error::Dimension { expected: profile.k, found: w.len() });
    }
    match mode {
        FPhiMode::ClosedForm => {
            let (phase, ww) = profile.phi_params(phi);
            let r2: f64 = w.iter().map(|x| x * x).sum();
            Ok(phase * (-PI * ww * r2).exp())
        }
        FPhiMode::Quadrature => {
            // the kernel and the Gaussian both factor over coordinates
            let radius = (40.0 / (PI * profile.width)).sqrt();
            let omega = profile.width;
            let mut out = Complex64::new(1.0, 0.0);
            for &wi in w {
                out *= apply_kernel_1d(|x| Complex64::new((-PI * omega * x * x).exp(), 0.0), phi, wi, radius)?;
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValue {
    pub value: Complex64,
    /// Certified bound on the discarded terms.
    pub tail_bound: f64,
    /// Truncation radius in `m`-space, `‖m - ξ₂‖ ≤ radius`.
    pub radius: f64,
}

/// `Θ_f(τ,φ;ξ)` truncated with a certified Gaussian tail below `tol`.
pub fn theta_sum(profile: &GaussianProfile, point: &ThetaPoint, tol: f64) -> Result<ThetaValue> {
    let k = profile.k;
    if point.k() != k {
        return Err(Error::Dimension { expected: 2 * k, found: point.xi.len() });
    }
    let (u, v) = (point.tau.re, point.tau.im);
    let (phase, ww) = profile.phi_params(point.phi);
    // |f_φ(x)| = |phase| e^{-π Re W ‖x‖²}
    let a = PI * ww.re * v;
    let pref = v.powf(k as f64 / 4.0) * phase.norm();
    let radius = gaussian_radius(k, a, pref, tol)?;
    let xi1 = point.xi1();
    let xi2 = point.xi2();
    let coef = -PI * ww * v;
    let sum = ball_sum(xi2, radius, |m, r2| {
        let lin: f64 = m.iter().zip(xi1).map(|(&mi, &x)| mi as f64 * signed_frac(x)).sum();
        let arg = signed_frac(0.5 * r2 * u) + signed_frac(lin);
        (coef * r2 + Complex64::new(0.0, 2.0 * PI * arg)).exp()
    })?;
    Ok(ThetaValue { value: phase * sum * v.powf(k as f64 / 4.0), tail_bound: tol, radius })
}

/// An element `(g, (ab·s; cd·s) + m)` of `Γ^k`, `s = (½,…,½)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaElement {
    pub g: IntMat2,
    pub m: Vec<i64>,
}

impl GammaElement {
    pub fn new(g: IntMat2, m: Vec<i64>) -> Result<Self> {
        if g.det() != 1 {
            return Err(Error::InvalidInput(format!("{g:?} is not in SL(2,Z)")));
        }
        if m.is_empty() || m.len() % 2 != 0 {
            return Err(Error::Dimension { expected: 2, found: m.len() });
        }
        Ok(Self { g, m })
    }

    /// Left translate of `(τ, φ, ξ)`.
    pub fn act(&self, p: &ThetaPoint) -> Result<ThetaPoint> {
        let k = p.k();
        if self.m.len() != 2 * k {
            return Err(Error::Dimension { expected: 2 * k, found: self.m.len() });
        }
        let IntMat2 { a, b, c, d } = self.g;
        let (af, bf, cf, df) = (a as f64, b as f64, c as f64, d as f64);
        let j = p.tau * cf + df;
        let tau = (p.tau * af + bf) / j;
        let phi = p.phi + j.im.atan2(j.re);
        let mut xi = vec![0.0; 2 * k];
        for i in 0..k {
            let (x1, x2) = (p.xi[i], p.xi[k + i]);
            xi[i] = af * x1 + bf * x2 + 0.5 * af * bf + self.m[i] as f64;
            xi[k + i] = cf * x1 + df * x2 + 0.5 * cf * df + self.m[k + i] as f64;
        }
        ThetaPoint::new(tau, phi, xi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceCheck {
    pub val: Complex64,
    pub val_translated: Complex64,
    pub diff: f64,
    /// Combined truncation allowance of the four theta sums.
    pub allowance: f64,
}

/// `Θ_f Θ̄_g` at `point` and at `γ·point`.
pub fn theta_pair_invariance_check(
    f: &GaussianProfile,
    g: &GaussianProfile,
    point: &ThetaPoint,
    gamma: &GammaElement,
    tol: f64,
) -> Result<InvarianceCheck> {
    let p2 = gamma.act(point)?;
    let prod = |p: &ThetaPoint| -> Result<(Complex64, f64)> {
        let a = theta_sum(f, p, tol)?;
        let b = theta_sum(g, p, tol)?;
        Ok((a.value * b.value.conj(), tol * (a.value.norm() + b.value.norm() + tol)))
    };
    let (val, e1) = prod(point)?;
    let (val_translated, e2) = prod(&p2)?;
    Ok(InvarianceCheck { val, val_translated, diff: (val - val_translated).norm(), allowance: e1 + e2 })
}

/// Smooth step: 0 on `(-∞, 0]`, 1 on `[1, ∞)`.
fn smooth_step(t: f64) -> f64 {
    let psi = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let a = psi(t);
    let b = psi(1.0 - t);
    if a == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// `g_Y(y) = g₁(y/Y)` with `g₁` vanishing on `(0,1]` and equal to 1 on `[2,∞)`.
pub fn g_cutoff(y: f64, big_y: f64) -> f64 {
    smooth_step(y / big_y - 1.0)
}

/// `𝒳_Y(τ) = g_Y(𝒴(τ))`, `𝒴` the height of the reduced point.
pub fn truncation_xy(tau: Complex64, big_y: f64) -> Result<f64> {
    if !(big_y >= 1.0) {
        return Err(Error::Domain(format!("cutoff height Y = {big_y} must be at least 1")));
    }
    let (z, _) = reduce_to_fundamental_domain(tau)?;
    Ok(g_cutoff(z.im, big_y))
}

/// `Σ_{m ∈ Z^k} f((x + m)·scale)` for the Gaussian `f`, tail certified below `tol`.
pub fn gaussian_periodization(profile: &GaussianProfile, x: &[f64], scale: f64, tol: f64) -> Result<f64> {
    let k = profile.k;
    let a = PI * profile.width * scale * scale;
    let radius = gaussian_radius(k, a, 1.0, tol)?;
    let centre: Vec<f64> = x.iter().map(|t| -t).collect();
    Ok(ball_sum(&centre, radius, |_, r2| Complex64::new((-a * r2).exp(), 0.0))?.re)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FBigY {
    pub value: f64,
    /// Number of `(c, d)` cosets with a nonzero cutoff.
    pub cosets: usize,
    pub tail_bound: f64,
}

/// `F_{f,Y}(τ; ξ)`: the sum over coprime `(c, d)` of
/// `Σ_m f((cξ₁+dξ₂+m)√v/|cτ+d|) (v/|cτ+d|²)^{k/2} g_Y(v/|cτ+d|²)`.
/// The rows `(0, ±1)` and `(±1, 0)` are the two boundary lines of the
/// expansion; the rest have `c, d ≠ 0`.
pub fn f_big_y(
    profile: &GaussianProfile,
    big_y: f64,
    tau: Complex64,
    xi: &[f64],
    tol: f64,
    cd_max: i64,
) -> Result<FBigY> {
    let k = profile.k;
    if !(big_y >= 1.0) {
        return Err(Error::Domain(format!("cutoff height Y = {big_y} must be at least 1")));
    }
    if xi.len() != 2 * k {
        return Err(Error::Dimension { expected: 2 * k, found: xi.len() });
    }
    if !(tau.im > 0.0) {
        return Err(Error::Domain(format!("Im τ must be positive, got {tau}")));
    }
    let (u, v) = (tau.re, tau.im);
    // g_Y(v/|cτ+d|²) ≠ 0 needs |cτ+d|² < v/Y, and |cτ+d|² ≥ c²v².
    let bound = v / big_y;
    let c_max = (1.0 / (v * big_y)).sqrt().floor() as i64;
    if c_max > cd_max {
        return Err(Error::Budget { what: "coprime (c,d) range".into(), achieved: c_max as f64 });
    }
    let mut pairs = Vec::new();
    for c in -c_max..=c_max {
        let cu = c as f64 * u;
        let rest = bound - (c as f64 * v).powi(2);
        if rest <= 0.0 {
            continue;
        }
        let r = rest.sqrt();
        let (lo, hi) = ((-cu - r).ceil() as i64, (-cu + r).floor() as i64);
        if lo < -cd_max || hi > cd_max {
            return Err(Error::Budget { what: "coprime (c,d) range".into(), achieved: lo.abs().max(hi.abs()) as f64 });
        }
        for d in lo..=hi {
            if c.gcd(&d) == 1 {
                pairs.push((c, d));
            }
        }
    }
    let (xi1, xi2) = xi.split_at(k);
    let mut value = 0.0;
    let mut tail_bound = 0.0;
    let mut cosets = 0;
    let per = tol / (pairs.len().max(1) as f64);
    for &(c, d) in &pairs {
        let j2 = (c as f64 * u + d as f64).powi(2) + (c as f64 * v).powi(2);
        let vg = v / j2;
        let cut = g_cutoff(vg, big_y);
        if cut == 0.0 {
            continue;
        }
        cosets += 1;
        let x: Vec<f64> = xi1.iter().zip(xi2).map(|(a, b)| c as f64 * a + d as f64 * b).collect();
        let weight = vg.powf(k as f64 / 2.0) * cut;
        let s = gaussian_periodization(profile, &x, vg.sqrt(), per / weight)?;
        value += s * weight;
        tail_bound += per;
    }
    Ok(FBigY { value, cosets, tail_bound })
}

/// `∫_{R^k} |f_φ|²` from the closed form, reduced to one dimension by symmetry.
pub fn l2_norm_sq_f_phi(profile: &GaussianProfile, phi: f64) -> f64 {
    let (phase, ww) = profile.phi_params(phi);
    phase.norm_sqr() * (2.0 * ww.re).powf(-(profile.k as f64) / 2.0)
}

/// Brute enumeration of `Σ f((x+m)·scale)` over a box, for tests.
#[doc(hidden)]
pub fn periodization_box(profile: &GaussianProfile, x: &[f64], scale: f64, half: f64) -> f64 {
    let centre: Vec<f64> = x.iter().map(|t| -t).collect();
    let mut s = 0.0;
    for_each_in_ball(&centre, half, |_, r2| s += (-PI * profile.width * scale * scale * r2).exp());
    s
}
