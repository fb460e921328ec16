//! Diophantine quality of shift vectors and certified evaluation of the
//! majorants
//!
//! `δ_{β,ξ}(T) = Σ_{r ≠ 0} ‖r‖^{-β} Σ_{j ≥ 1} (1 + log⁺(T⟨j r·ξ⟩ / j)) / (j² + T j ⟨j r·ξ⟩)`
//!
//! and `δ̃_{β,ξ}(T)`, the same sum without the logarithmic factor.
//!
//! # Tail bounds
//!
//! Every inner term of either variant is at most `1/j²`: with `x = ⟨j r·ξ⟩`,
//! `log⁺(y) < y` gives `(1 + Tx/j) / (j(j + Tx)) = 1/j²`. Hence
//!
//! * dropping `j > J_r` for a given `r` costs at most `‖r‖^{-β} / J_r`;
//! * dropping all `‖r‖ > R` costs at most `(π²/6) Σ_{‖r‖ > R} ‖r‖^{-β}`, and
//!   comparing each lattice point with the unit cube around it (half-diagonal
//!   `h = √k/2`) gives
//!   `Σ_{‖r‖ > R} ‖r‖^{-β} ≤ |S^{k-1}| (1 + h/(R-2h))^{k-1} (R-2h)^{k-β} / (β-k)`.
//!
//! `J_r` is proportional to `‖r‖^{-β/2}`, which minimises `Σ J_r` for a fixed
//! total j-tail.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numtheory::{signed_frac, SplitReal};
use crate::summation::{pairwise_sum, Neumaier};

/// Upper limit on the number of `(r, j)` terms one majorant evaluation may visit.
pub const MAJORANT_TERM_CAP: f64 = 4e9;

const PI2_6: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// Signed offset of `j (r·ξ)` from the nearest integer.
pub fn lin_form_frac(xi: &[SplitReal], r: &[i64], j: i64) -> f64 {
    let s: f64 = xi
        .iter()
        .zip(r)
        .map(|(x, &ri)| x.frac_of_multiple(j * ri))
        .sum();
    signed_frac(s)
}

/// Surface area of the unit sphere in `R^k`.
pub fn sphere_area(k: usize) -> f64 {
    // 2 π^{k/2} / Γ(k/2)
    let half = k as f64 / 2.0;
    let gamma = if k % 2 == 0 {
        (1..k / 2).map(|i| i as f64).product::<f64>()
    } else {
        let mut g = std::f64::consts::PI.sqrt();
        let mut x = 0.5;
        while x < half - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    };
    2.0 * std::f64::consts::PI.powf(half) / gamma
}

/// Bound on `Σ ‖x‖^{-β}` over the points `x` of any translate of `Z^k` with `‖x‖ > radius`.
pub fn lattice_tail(k: usize, beta: f64, radius: f64) -> f64 {
    let h = (k as f64).sqrt() / 2.0;
    let inner = radius - 2.0 * h;
    if beta <= k as f64 || inner <= 0.0 {
        return f64::INFINITY;
    }
    sphere_area(k) * (1.0 + h / inner).powi(k as i32 - 1) * inner.powf(k as f64 - beta)
        / (beta - k as f64)
}

/// All `r ∈ Z^k` with `0 < ‖r‖ ≤ radius` and first nonzero entry positive,
/// in odometer order.
fn half_space_points(k: usize, radius: f64) -> Vec<Vec<i64>> {
    let bound = radius.floor() as i64;
    let r2 = radius * radius;
    let mut out = Vec::new();
    let mut r = vec![-bound; k];
    loop {
        let first = r.iter().find(|&&x| x != 0);
        if matches!(first, Some(&x) if x > 0) {
            let n2: i64 = r.iter().map(|x| x * x).sum();
            if n2 as f64 <= r2 {
                out.push(r.clone());
            }
        }
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if r[i] < bound {
                r[i] += 1;
                break;
            }
            r[i] = -bound;
        }
    }
}

fn norm(r: &[i64]) -> f64 {
    (r.iter().map(|&x| (x * x) as f64).sum::<f64>()).sqrt()
}

/// Vectors with `max |r_i| = shell`, lexicographic.
fn sup_shell(k: usize, shell: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut r = vec![-shell; k];
    loop {
        if r.iter().any(|x| x.abs() == shell) {
            out.push(r.clone());
        }
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if r[i] < shell {
                r[i] += 1;
                break;
            }
            r[i] = -shell;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QualityMode {
    /// `‖qξ − m‖ q^κ`
    KappaDioph,
    /// `⟨r·ξ⟩ ‖r‖^κ`
    KappaLfd,
    /// `⟨j r·ξ⟩ j^α ‖r‖^κ`
    KappaAlphaLfd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiophQuality {
    pub mode: QualityMode,
    pub xi: Vec<f64>,
    pub kappa: f64,
    pub alpha: Option<f64>,
    pub search_bound: u64,
    pub min_quality: f64,
    /// `(q, m)` for [`QualityMode::KappaDioph`], `(j, r)` otherwise.
    pub witness: (i64, Vec<i64>),
    /// The minimum is zero: `ξ` is rational inside the search region.
    pub obstructed: bool,
}

pub fn dioph_quality(
    mode: QualityMode,
    xi: &[SplitReal],
    kappa: f64,
    alpha: Option<f64>,
    bound: u64,
) -> Result<DiophQuality> {
    let k = xi.len();
    if k == 0 || bound == 0 {
        return Err(Error::InvalidInput("need k >= 1 and bound >= 1".into()));
    }
    let alpha_val = match mode {
        QualityMode::KappaDioph => {
            if kappa < 1.0 / k as f64 {
                return Err(Error::InvalidInput(format!("kappa must be at least 1/{k}")));
            }
            None
        }
        QualityMode::KappaLfd => {
            if kappa < k as f64 {
                return Err(Error::InvalidInput(format!("kappa must be at least {k}")));
            }
            None
        }
        QualityMode::KappaAlphaLfd => {
            let a = alpha.ok_or_else(|| Error::InvalidInput("alpha required".into()))?;
            if kappa < k as f64 || a < 1.0 {
                return Err(Error::InvalidInput("need kappa >= k and alpha >= 1".into()));
            }
            Some(a)
        }
    };
    let mut best = f64::INFINITY;
    let mut witness = (0i64, vec![0i64; k]);
    let mut consider = |value: f64, w: (i64, Vec<i64>)| {
        if value < best {
            best = value;
            witness = w;
        }
        best == 0.0
    };
    let bf = bound as f64;
    'search: {
        match mode {
            QualityMode::KappaDioph => {
                for q in 1..=bound as i64 {
                    let fr: Vec<f64> = xi.iter().map(|x| x.frac_of_multiple(q)).collect();
                    let dist = fr.iter().map(|f| f * f).sum::<f64>().sqrt();
                    let m = xi
                        .iter()
                        .zip(&fr)
                        .map(|(x, f)| (q as f64 * x.hi + q as f64 * x.lo - f).round() as i64)
                        .collect();
                    if consider(dist * (q as f64).powf(kappa), (q, m)) {
                        break 'search;
                    }
                }
            }
            QualityMode::KappaLfd | QualityMode::KappaAlphaLfd => {
                for shell in 1..=bound as i64 {
                    for r in sup_shell(k, shell) {
                        let nr = norm(&r);
                        if nr > bf {
                            continue;
                        }
                        let j_max = match alpha_val {
                            None => 1,
                            Some(_) => (bf / nr).floor() as i64,
                        };
                        for j in 1..=j_max {
                            let d = lin_form_frac(xi, &r, j).abs();
                            let weight = nr.powf(kappa) * alpha_val.map_or(1.0, |a| (j as f64).powf(a));
                            if consider(d * weight, (j, r.clone())) {
                                break 'search;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(DiophQuality {
        mode,
        xi: xi.iter().map(SplitReal::value).collect(),
        kappa,
        alpha: alpha_val,
        search_bound: bound,
        min_quality: best,
        witness,
        obstructed: best == 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MajorantVariant {
    /// `δ`, with the `1 + log⁺` numerator.
    Full,
    /// `δ̃`
    Tilde,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MajorantResult {
    pub value: f64,
    /// The true majorant lies in `[value, value + tail_bound]`.
    pub tail_bound: f64,
    pub r_cut: u64,
    /// Largest per-`r` j-cutoff (attained at `‖r‖ = 1`).
    pub j_cut: u64,
}

impl MajorantResult {
    pub fn upper(&self) -> f64 {
        self.value + self.tail_bound
    }
}

/// Inner sum `Σ_{j ≤ J} term(j)` for one `r`.
fn inner_sum(xi: &[SplitReal], r: &[i64], t: f64, j_cut: u64, variant: MajorantVariant) -> f64 {
    let mut acc = Neumaier::new();
    for j in 1..=j_cut as i64 {
        let jf = j as f64;
        let x = lin_form_frac(xi, r, j).abs();
        let denom = jf * (jf + t * x);
        let num = match variant {
            MajorantVariant::Tilde => 1.0,
            MajorantVariant::Full => {
                let y = t * x / jf;
                if y > 1.0 {
                    1.0 + y.ln()
                } else {
                    1.0
                }
            }
        };
        acc.add(num / denom);
    }
    acc.value()
}

/// Certified evaluation of `δ_{β,ξ}(T)` or `δ̃_{β,ξ}(T)` to within `tol`.
pub fn delta_majorant(
    beta: f64,
    xi: &[SplitReal],
    t: f64,
    tol: f64,
    variant: MajorantVariant,
) -> Result<MajorantResult> {
    let k = xi.len();
    if k == 0 {
        return Err(Error::InvalidInput("empty shift vector".into()));
    }
    if !(beta > k as f64) || !(t > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidInput("need beta > k, T > 0, tol > 0".into()));
    }
    let h = (k as f64).sqrt() / 2.0;
    let mut radius = (2.0 * h + 1.0).ceil();
    while PI2_6 * lattice_tail(k, beta, radius) > tol / 2.0 {
        radius += 1.0;
        if radius > 1e4 {
            return Err(Error::Budget {
                what: "majorant r-cutoff".into(),
                achieved: PI2_6 * lattice_tail(k, beta, radius),
            });
        }
    }
    let r_tail = PI2_6 * lattice_tail(k, beta, radius);
    let points = half_space_points(k, radius);
    // Each half-space r stands for ±r.
    let weights: Vec<f64> = points.iter().map(|r| 2.0 * norm(r).powf(-beta)).collect();
    let root_sum: f64 = weights.iter().map(|w| w.sqrt()).sum();
    let j_budget = tol - r_tail;
    let scale = root_sum / j_budget;
    let work: f64 = weights.iter().map(|w| (w.sqrt() * scale).ceil()).sum();
    if work > MAJORANT_TERM_CAP {
        return Err(Error::Budget {
            what: "majorant j-cutoff".into(),
            achieved: r_tail + root_sum * root_sum / MAJORANT_TERM_CAP,
        });
    }
    let cuts: Vec<u64> = weights.iter().map(|w| (w.sqrt() * scale).ceil() as u64).collect();
    let j_tail: f64 = weights.iter().zip(&cuts).map(|(w, &j)| w / j as f64).sum();
    let terms: Vec<f64> = points
        .par_iter()
        .zip(&weights)
        .zip(&cuts)
        .map(|((r, &w), &j)| w * inner_sum(xi, r, t, j, variant))
        .collect();
    Ok(MajorantResult {
        value: pairwise_sum(&terms),
        tail_bound: r_tail + j_tail,
        r_cut: radius as u64,
        j_cut: cuts.iter().copied().max().unwrap_or(0),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CfSum {
    pub lhs: f64,
    /// Bound on the omitted terms `j > j_cut`.
    pub tail: f64,
    pub j_cut: u64,
    /// `(cT)^{-2/(1+κ)} log²(2 + T)`
    pub bound: f64,
    pub ratio: f64,
    /// First `j ≤ j_cut` with `⟨jη⟩ < c j^{-κ}`, if any.
    pub violation: Option<u64>,
}

impl CfSum {
    /// Turns a recorded hypothesis violation into an error.
    pub fn require_hypothesis(self) -> Result<Self> {
        match self.violation {
            Some(j) => Err(Error::Hypothesis { j }),
            None => Ok(self),
        }
    }
}

/// `Σ_j 1/(j² + T j ⟨jη⟩)` against `(cT)^{-2/(1+κ)} log²(2+T)`.
///
/// The sum runs to `J = max(1000, ⌈1000 / bound⌉)` so the omitted part
/// (at most `1/J`) stays below a thousandth of the bound.
pub fn cf_sum(eta: SplitReal, t: f64, kappa: f64, c: f64) -> Result<CfSum> {
    if !(t > 0.0) || !(c > 0.0) || !(kappa > 0.0) {
        return Err(Error::InvalidInput("need T, c, kappa > 0".into()));
    }
    let bound = (c * t).powf(-2.0 / (1.0 + kappa)) * (2.0 + t).ln().powi(2);
    let j_cut = (1000.0 / bound).ceil().max(1000.0);
    if j_cut > 1e10 {
        return Err(Error::Budget {
            what: "cf_sum cutoff".into(),
            achieved: 1.0 / 1e10,
        });
    }
    let j_cut = j_cut as u64;
    let mut acc = Neumaier::new();
    let mut violation = None;
    for j in 1..=j_cut {
        let jf = j as f64;
        let x = eta.dist_of_multiple(j as i64);
        if violation.is_none() && x < c * jf.powf(-kappa) {
            violation = Some(j);
        }
        acc.add(1.0 / (jf * (jf + t * x)));
    }
    let lhs = acc.value();
    Ok(CfSum {
        lhs,
        tail: 1.0 / j_cut as f64,
        j_cut,
        bound,
        ratio: lhs / bound,
        violation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeBranch {
    /// `D^{κ + 1/A} ≤ cT`
    Sparse,
    /// `D^κ ≤ cT ≤ D^{κ + 1/A}`
    Intermediate,
    /// `cT ≤ D^κ`
    Dense,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedLatticeSum {
    pub value: f64,
    /// Bound on the terms outside the enumerated balls.
    pub tail: f64,
    /// Shape of the piecewise bound, with implied constant 1.
    pub piecewise_bound: f64,
    pub branch: LatticeBranch,
}

/// Largest ball radius (in lattice units) enumerated per `d`.
const SHIFTED_RADIUS_CAP: f64 = 64.0;

/// `Σ_{d ≤ D} Σ_{m ∈ Z^k} (1 + T‖dα + m‖)^{-A}` and the matching
/// piecewise bound for a `[κ; c]`-Diophantine `α`.
pub fn shifted_lattice_sum(
    alpha: &[SplitReal],
    d_max: u64,
    t: f64,
    a: f64,
    kappa: f64,
    c: f64,
) -> Result<ShiftedLatticeSum> {
    let k = alpha.len();
    if k == 0 || !(a > k as f64) || d_max == 0 || !(t >= 1.0) {
        return Err(Error::InvalidInput("need k >= 1, A > k, D >= 1, T >= 1".into()));
    }
    // Terms below 1e-15 are skipped; the ball always reaches past the
    // cube half-diagonal so the tail bound applies.
    let h = (k as f64).sqrt() / 2.0;
    let radius = ((1e15f64.powf(1.0 / a) - 1.0) / t)
        .min(SHIFTED_RADIUS_CAP)
        .max(2.0 * h + 1.0);
    let per_d_tail = t.powf(-a) * lattice_tail(k, a, radius);
    let reach = radius.ceil() as i64 + 1;
    let mut acc = Neumaier::new();
    let mut offsets = vec![0i64; k];
    for d in 1..=d_max as i64 {
        // signed fractional parts of dα, the nearest lattice point sits at m = -round(dα)
        let fr: Vec<f64> = alpha.iter().map(|x| x.frac_of_multiple(d)).collect();
        offsets.iter_mut().for_each(|o| *o = -reach);
        loop {
            let dist2: f64 = fr.iter().zip(&offsets).map(|(f, &o)| (f + o as f64).powi(2)).sum();
            if dist2 <= radius * radius {
                acc.add((1.0 + t * dist2.sqrt()).powf(-a));
            }
            let mut i = k;
            let done = loop {
                if i == 0 {
                    break true;
                }
                i -= 1;
                if offsets[i] < reach {
                    offsets[i] += 1;
                    break false;
                }
                offsets[i] = -reach;
            };
            if done {
                break;
            }
        }
    }
    let df = d_max as f64;
    let ct = c * t;
    let (piecewise_bound, branch) = if df.powf(kappa + 1.0 / a) <= ct {
        (df.powf(a * kappa + 1.0) * ct.powf(-a), LatticeBranch::Sparse)
    } else if df.powf(kappa) <= ct {
        (1.0, LatticeBranch::Intermediate)
    } else {
        (df * ct.powf(-1.0 / kappa), LatticeBranch::Dense)
    };
    Ok(ShiftedLatticeSum {
        value: acc.value(),
        tail: df * per_d_tail,
        piecewise_bound,
        branch,
    })
}

/// Least-squares slope of `log(value)` against `log(T)`.
pub fn decay_fit(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 4 {
        return Err(Error::InvalidInput("decay_fit needs at least 4 points".into()));
    }
    if pairs.windows(2).any(|w| !(w[1].0 > w[0].0)) || pairs[0].0 <= 0.0 {
        return Err(Error::InvalidInput("T must be positive and strictly increasing".into()));
    }
    if pairs.iter().any(|&(_, v)| !(v > 0.0)) {
        return Err(Error::InvalidInput("values must be positive".into()));
    }
    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> Vec<SplitReal> {
        vec![SplitReal::quadratic(-1, 1, 2, 1), SplitReal::quadratic(-1, 1, 3, 1)]
    }

    fn golden() -> SplitReal {
        SplitReal::quadratic(1, 1, 5, 2)
    }

    #[test]
    fn sphere_areas() {
        let pi = std::f64::consts::PI;
        assert!((sphere_area(1) - 2.0).abs() < 1e-15);
        assert!((sphere_area(2) - 2.0 * pi).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * pi).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * pi * pi).abs() < 1e-13);
    }

    #[test]
    fn lattice_tail_dominates_direct_sum() {
        for (k, beta, radius) in [(1usize, 3.0, 5.0), (2, 6.0, 6.0), (2, 3.0, 10.0), (3, 5.0, 6.0)] {
            let far = 150.0;
            let direct: f64 = half_space_points(k, far)
                .iter()
                .map(|r| norm(r))
                .filter(|&n| n > radius)
                .map(|n| 2.0 * n.powf(-beta))
                .sum();
            assert!(direct <= lattice_tail(k, beta, radius), "k = {k}, beta = {beta}");
        }
    }

    #[test]
    fn rational_quality_is_obstructed() {
        let q = dioph_quality(QualityMode::KappaDioph, &[SplitReal::from_f64(0.5)], 1.0, None, 10).unwrap();
        assert!(q.obstructed);
        assert_eq!(q.min_quality, 0.0);
        assert_eq!(q.witness, (2, vec![1]));
    }

    #[test]
    fn golden_quality() {
        let q = dioph_quality(QualityMode::KappaDioph, &[golden()], 1.0, None, 100).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        // the minimum over q ≤ 100 sits at q = 1
        assert_eq!(q.witness, (1, vec![2]));
        assert!((q.min_quality - (2.0 - phi)).abs() < 1e-15);
        // along convergent denominators q⟨qφ⟩ → 1/√5
        let (mut a, mut b) = (1i64, 1i64);
        while b < 100_000 {
            (a, b) = (b, a + b);
            let val = b as f64 * golden().dist_of_multiple(b);
            assert!((val - 1.0 / 5f64.sqrt()).abs() < 1.0 / (b * b) as f64);
        }
    }

    #[test]
    fn lfd_quality_positive() {
        let q = dioph_quality(QualityMode::KappaLfd, &fixture(), 2.1, None, 200).unwrap();
        assert!(!q.obstructed && q.min_quality > 0.0);
        let (j, r) = &q.witness;
        let again = lin_form_frac(&fixture(), r, *j).abs() * norm(r).powf(2.1);
        assert_eq!(again, q.min_quality);
    }

    #[test]
    fn majorant_at_zero_shift() {
        let zero = vec![SplitReal::from_f64(0.0); 2];
        let tol = 1e-6;
        let exact_r: f64 = {
            let pts = half_space_points(2, 400.0);
            let s: f64 = pts.iter().map(|r| 2.0 * norm(r).powi(-6)).sum();
            s + lattice_tail(2, 6.0, 400.0) * 0.5
        };
        let want = exact_r * PI2_6;
        for t in [1.0, 10.0, 1e4] {
            let m = delta_majorant(6.0, &zero, t, tol, MajorantVariant::Full).unwrap();
            assert!(m.tail_bound <= tol);
            assert!(m.value <= want + 1e-9 && want <= m.upper() + 1e-9, "{m:?} vs {want}");
        }
    }

    #[test]
    fn majorant_brackets_refined_sum() {
        let xi = fixture();
        for variant in [MajorantVariant::Tilde, MajorantVariant::Full] {
            let coarse = delta_majorant(6.0, &xi, 50.0, 1e-3, variant).unwrap();
            let fine = delta_majorant(6.0, &xi, 50.0, 1e-6, variant).unwrap();
            assert!(coarse.value <= fine.value + 1e-12);
            assert!(fine.upper() <= coarse.upper() + 1e-12);
        }
    }

    #[test]
    fn cf_sum_examples() {
        let zero = cf_sum(SplitReal::from_f64(0.0), 100.0, 1.0, 0.4).unwrap();
        assert_eq!(zero.violation, Some(1));
        assert!((zero.lhs + zero.tail - PI2_6).abs() < zero.tail);
        assert!(matches!(zero.require_hypothesis(), Err(Error::Hypothesis { j: 1 })));

        let small_t = cf_sum(golden(), 1e-9, 1.0, 0.38).unwrap();
        assert!((small_t.lhs - PI2_6).abs() < 2e-3);
        // ⟨φ⟩ = 0.381966… < 0.4
        assert_eq!(cf_sum(golden(), 100.0, 1.0, 0.4).unwrap().violation, Some(1));
        assert_eq!(cf_sum(golden(), 100.0, 1.0, 0.38).unwrap().violation, None);
    }

    #[test]
    fn shifted_sum_examples() {
        let zero = vec![SplitReal::from_f64(0.0); 2];
        let s = shifted_lattice_sum(&zero, 5, 7.0, 3.0, 1.0, 0.3).unwrap();
        assert!(s.value >= 5.0);

        let alpha = vec![SplitReal::from_f64(0.3), SplitReal::from_f64(0.45)];
        let s = shifted_lattice_sum(&alpha, 1, 1e3, 3.0, 1.0, 0.3).unwrap();
        let mut direct = 0.0;
        for m1 in -200..=200 {
            for m2 in -200..=200 {
                let d = ((0.3 + m1 as f64).powi(2) + (0.45 + m2 as f64).powi(2)).sqrt();
                direct += (1.0 + 1e3 * d).powf(-3.0);
            }
        }
        assert!(s.value <= direct && direct <= s.value + s.tail + 1e-15);
        let dominant = (1.0 + 1e3 * (0.3f64.hypot(0.45))).powf(-3.0);
        assert!(s.value > dominant);
    }

    #[test]
    fn decay_fit_examples() {
        let inv: Vec<(f64, f64)> = [1.0, 10.0, 100.0, 1000.0].iter().map(|&t| (t, 3.0 / t)).collect();
        assert!((decay_fit(&inv).unwrap() + 1.0).abs() < 1e-9);
        let flat: Vec<(f64, f64)> = [1.0, 2.0, 3.0, 4.0].iter().map(|&t| (t, 5.0)).collect();
        assert!(decay_fit(&flat).unwrap().abs() < 1e-12);
        assert!(decay_fit(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0), (4.0, 1.0)]).is_err());
    }
}
