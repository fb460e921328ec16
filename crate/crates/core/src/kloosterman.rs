//! Congruence Kloosterman sums `S(m, n; c; R, N)`.
//!
//! For `R ≡ [[a₀, b₀], [c₀, d₀]] (mod N)` with `c ≡ c₀ (mod N)` the sum runs
//! over the set `U[c, N; a₀, b₀, d₀]` of pairs `(a, d) mod cN` with
//! `a ≡ a₀`, `d ≡ d₀ (mod N)` and `ad ≡ 1 + b₀c (mod cN)`:
//!
//! `S = Σ e((m d + n a) / (cN))`.

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numtheory::{arithmetic_functions, euler_phi, mod_inverse, moebius, smooth_split, SplitReal};
use crate::sl2geom::IntMat2;

/// `e(num / den)` with the fraction reduced exactly before evaluation.
pub fn e_rational(num: i128, den: u64) -> Complex64 {
    let den_i = den as i128;
    let mut j = num.rem_euclid(den_i);
    if 2 * j > den_i {
        j -= den_i;
    }
    let angle = std::f64::consts::TAU * (j as f64 / den as f64);
    let (s, c) = angle.sin_cos();
    Complex64::new(c, s)
}

/// `e(x) = exp(2πi x)` for `|x| ≤ 1/2` or any moderate `x`.
pub fn e(x: f64) -> Complex64 {
    let (s, c) = (std::f64::consts::TAU * (x - x.round_ties_even())).sin_cos();
    Complex64::new(c, s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KloostermanQuery {
    pub m: i64,
    pub n: i64,
    pub c: u64,
    pub r: IntMat2,
    pub modulus: u64,
}

impl KloostermanQuery {
    pub fn new(m: i64, n: i64, c: u64, r: IntMat2, modulus: u64) -> Result<Self> {
        let q = Self { m, n, c, r, modulus };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        if self.c == 0 || self.modulus == 0 {
            return Err(Error::InvalidInput("c and N must be positive".into()));
        }
        if self.r.det() != 1 {
            return Err(Error::InvalidClass(format!("det {:?} != 1", self.r)));
        }
        let n = self.modulus as i64;
        if (self.r.c - self.c as i64).rem_euclid(n) != 0 {
            return Err(Error::InvalidClass(format!(
                "lower-left entry {} is not congruent to c = {} mod {}",
                self.r.c, self.c, self.modulus
            )));
        }
        Ok(())
    }
}

/// Pairs `(a, d)` with entries in `[0, cN)`, ordered by `d` then `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct USet {
    pub c: u64,
    pub modulus: u64,
    pub pairs: Vec<(u64, u64)>,
}

pub fn u_set(c: u64, modulus: u64, a0: i64, b0: i64, d0: i64) -> Result<USet> {
    if c == 0 || modulus == 0 {
        return Err(Error::InvalidInput("c and N must be positive".into()));
    }
    let (ci, ni) = (c as i128, modulus as i128);
    let (a0, b0, d0) = (a0 as i128, b0 as i128, d0 as i128);
    if (a0 * d0 - b0 * ci - 1).rem_euclid(ni) != 0 {
        return Err(Error::InvalidClass(format!(
            "a0 d0 - b0 c = {} is not 1 mod {modulus}",
            a0 * d0 - b0 * ci
        )));
    }
    let cn = ci * ni;
    let target = 1 + b0 * ci;
    let a_base = a0.rem_euclid(ni);
    let mut pairs = Vec::new();
    for s in 0..ci {
        let d = d0.rem_euclid(ni) + s * ni;
        // (a_base + N t) d ≡ target (mod cN); the right side minus a_base d
        // is divisible by N, leaving t d ≡ rhs (mod c).
        let rhs = (target - a_base * d) / ni;
        let t = if ci == 1 {
            0
        } else {
            let g = d.extended_gcd(&ci);
            if g.gcd != 1 {
                continue;
            }
            (rhs.rem_euclid(ci) * g.x.rem_euclid(ci)).rem_euclid(ci)
        };
        let a = a_base + ni * t;
        debug_assert_eq!((a * d - target).rem_euclid(cn), 0);
        pairs.push((a as u64, d as u64));
    }
    Ok(USet { c, modulus, pairs })
}

fn query_u_set(q: &KloostermanQuery) -> Result<USet> {
    q.validate()?;
    u_set(q.c, q.modulus, q.r.a, q.r.b, q.r.d)
}

/// Sum over a precomputed U-set.
pub fn sum_over(u: &USet, m: i64, n: i64) -> Complex64 {
    let cn = u.c * u.modulus;
    u.pairs
        .iter()
        .map(|&(a, d)| e_rational(m as i128 * d as i128 + n as i128 * a as i128, cn))
        .sum()
}

pub fn kloosterman_sum(q: &KloostermanQuery) -> Result<Complex64> {
    Ok(sum_over(&query_u_set(q)?, q.m, q.n))
}

/// An SL(2,Z) matrix with lower-left entry `c` that is congruent to
/// `[[a₀, b₀], [c, d₀]]` modulo `N`.
///
/// `d` is the first `d₀ + tN`, `t = 0, 1, …`, coprime to `c`; `(a, b)` is the
/// extended-gcd solution shifted by a multiple of `(c, d)` to land in the
/// right classes.
pub fn lift_class(a0: i64, b0: i64, c: i64, d0: i64, modulus: u64) -> Result<IntMat2> {
    if c == 0 {
        return Err(Error::InvalidInput("lift needs a nonzero lower-left entry".into()));
    }
    let nn = modulus as i64;
    if (a0 as i128 * d0 as i128 - b0 as i128 * c as i128 - 1).rem_euclid(nn as i128) != 0 {
        return Err(Error::InvalidClass("residues do not have determinant 1".into()));
    }
    let base = d0.rem_euclid(nn);
    let d = (0..=c.abs())
        .map(|t| base + t * nn)
        .find(|d| d.gcd(&c) == 1)
        .ok_or_else(|| Error::InvalidClass("no d coprime to c in the class".into()))?;
    // s c + t d = 1
    let g = c.extended_gcd(&d);
    let (s, t) = (g.x, g.y);
    let (a1, b1) = (t, -s);
    let k = ((a0 - a1) as i128 * s as i128 + (b0 - b1) as i128 * t as i128).rem_euclid(nn as i128) as i64;
    let out = IntMat2::new(a1 + k * c, b1 + k * d, c, d);
    debug_assert_eq!(out.det(), 1);
    Ok(out)
}

/// One lifted representative for each class `(a₀, b₀, d₀) mod N` compatible with `c`.
pub fn classes_mod(c: u64, modulus: u64) -> Vec<IntMat2> {
    let nn = modulus as i64;
    let ci = c as i64;
    let mut out = Vec::new();
    for a0 in 0..nn {
        for b0 in 0..nn {
            for d0 in 0..nn {
                if (a0 * d0 - b0 * ci - 1).rem_euclid(nn) == 0 {
                    out.push(lift_class(a0, b0, ci, d0, modulus).expect("consistent class"));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicativityCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub error: f64,
}

/// Compares `S(m, n; c; R, N)` with the product of the two sums obtained
/// from the coprime factorisation `cN = M₁ M₂`.
pub fn multiplicativity_check(q: &KloostermanQuery, m1: u64, m2: u64) -> Result<MultiplicativityCheck> {
    let lhs = kloosterman_sum(q)?;
    let rhs = multiplicativity_rhs(q, m1, m2)?;
    Ok(MultiplicativityCheck {
        lhs,
        rhs,
        error: (lhs - rhs).norm(),
    })
}

/// The product side of [`multiplicativity_check`] alone, for callers that
/// already hold `S(m, n; c; R, N)`.
pub fn multiplicativity_rhs(q: &KloostermanQuery, m1: u64, m2: u64) -> Result<Complex64> {
    q.validate()?;
    if m1 == 0 || m2 == 0 || m1.gcd(&m2) != 1 {
        return Err(Error::InvalidInput(format!("({m1}, {m2}) is not a coprime pair")));
    }
    if m1 as u128 * m2 as u128 != q.c as u128 * q.modulus as u128 {
        return Err(Error::InvalidInput(format!(
            "{m1} * {m2} != c N = {}",
            q.c * q.modulus
        )));
    }
    let (k1, k2) = (q.modulus.gcd(&m1), q.modulus.gcd(&m2));
    let (k3, k4) = (q.c.gcd(&m1), q.c.gcd(&m2));
    let m2_bar = mod_inverse(m2 as i64, m1)? as i64;
    let m1_bar = mod_inverse(m1 as i64, m2)? as i64;
    let (a0, b0, d0) = (q.r.a, q.r.b, q.r.d);
    let reduce = |x: i128, k: u64| x.rem_euclid(k as i128) as i64;

    let r1 = lift_class(
        reduce(m2 as i128 * a0 as i128, k1),
        reduce(k4 as i128 * b0 as i128, k1),
        k3 as i64,
        reduce(m2_bar as i128 * d0 as i128, k1),
        k1,
    )?;
    let r2 = lift_class(
        reduce(m1 as i128 * a0 as i128, k2),
        reduce(k3 as i128 * b0 as i128, k2),
        k4 as i64,
        reduce(m1_bar as i128 * d0 as i128, k2),
        k2,
    )?;
    let n1 = reduce(m2_bar as i128 * m2_bar as i128 * q.n as i128, k3 * k1);
    let n2 = reduce(m1_bar as i128 * m1_bar as i128 * q.n as i128, k4 * k2);
    let s1 = kloosterman_sum(&KloostermanQuery::new(q.m, n1, k3, r1, k1)?)?;
    let s2 = kloosterman_sum(&KloostermanQuery::new(q.m, n2, k4, r2, k2)?)?;
    Ok(s1 * s2)
}

/// All ordered coprime factorisations `n = M₁ M₂`.
pub fn coprime_splits(n: u64) -> Result<Vec<(u64, u64)>> {
    let primes: Vec<u64> = arithmetic_functions(n)?
        .factorization
        .prime_powers
        .iter()
        .map(|&(p, e)| p.pow(e))
        .collect();
    let mut out = Vec::with_capacity(1 << primes.len());
    for mask in 0u32..(1 << primes.len()) {
        let m1: u64 = primes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, p)| p)
            .product();
        out.push((m1, n / m1));
    }
    Ok(out)
}

/// Closed form of `S(m, 0; c; R, N)`.
pub fn n0_closed_form(m: i64, c: u64, r: &IntMat2, modulus: u64) -> Result<Complex64> {
    if c == 0 || modulus == 0 {
        return Err(Error::InvalidInput("c and N must be positive".into()));
    }
    let (c1, c2) = smooth_split(c, modulus)?;
    if m % c1 as i64 != 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let g = (m.unsigned_abs()).gcd(&c);
    let q = c / g;
    let magnitude = f64::from(moebius(q)?) * (euler_phi(c2)? * c1) as f64 / euler_phi(q)? as f64;
    let c2_bar = mod_inverse(c2 as i64, modulus)? as i128;
    let phase = e_rational((m / c1 as i64) as i128 * c2_bar * r.d as i128, modulus);
    Ok(phase * magnitude)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeilAudit {
    pub max_ratio: f64,
    /// `(c, m, n)` of the extremal query; ties go to the smallest triple.
    pub argmax: (u64, i64, i64),
    pub queries: usize,
}

/// Largest `|S| / (σ₀(c) (m, n, c)^{1/2} c^{1/2})` over `c ≤ c_max` with
/// `c ≡ R_c (mod N)` and the sampled `(m, n)`.
pub fn weil_audit(c_max: u64, modulus: u64, r: &IntMat2, sample_mn: &[(i64, i64)]) -> Result<WeilAudit> {
    if c_max == 0 || modulus == 0 {
        return Err(Error::InvalidInput("c_max and N must be positive".into()));
    }
    let cs: Vec<u64> = (1..=c_max)
        .filter(|&c| (r.c - c as i64).rem_euclid(modulus as i64) == 0)
        .collect();
    let per_c: Vec<(f64, (u64, i64, i64), usize)> = cs
        .par_iter()
        .map(|&c| -> Result<_> {
            let u = u_set(c, modulus, r.a, r.b, r.d)?;
            let sigma = arithmetic_functions(c)?.sigma as f64;
            let mut best = (f64::NEG_INFINITY, (c, 0, 0));
            for &(m, n) in sample_mn {
                let g = c.gcd(&m.unsigned_abs()).gcd(&n.unsigned_abs());
                let ratio = sum_over(&u, m, n).norm() / (sigma * (g as f64).sqrt() * (c as f64).sqrt());
                if ratio > best.0 || (ratio == best.0 && (c, m, n) < best.1) {
                    best = (ratio, (c, m, n));
                }
            }
            Ok((best.0, best.1, sample_mn.len()))
        })
        .collect::<Result<_>>()?;
    let mut out = WeilAudit {
        max_ratio: f64::NEG_INFINITY,
        argmax: (0, 0, 0),
        queries: 0,
    };
    for (ratio, arg, count) in per_c {
        out.queries += count;
        if ratio > out.max_ratio || (ratio == out.max_ratio && arg < out.argmax) {
            out.max_ratio = ratio;
            out.argmax = arg;
        }
    }
    Ok(out)
}

/// Largest `X` accepted by [`b_alpha_sum`].
pub const MAX_B_ALPHA_X: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BAlpha {
    pub value: Complex64,
    /// `X² Σ_{j ≤ X} min(1/j², 1/(X j ⟨jα⟩))`
    pub majorant: f64,
}

/// `B_α(X) = Σ_{c ≤ X} e(cα) c₁ φ(c₂)` with `c = c₁c₂` the N-smooth split.
pub fn b_alpha_sum(alpha: f64, x: u64, modulus: u64) -> Result<BAlpha> {
    if x == 0 || modulus == 0 {
        return Err(Error::InvalidInput("X and N must be positive".into()));
    }
    if x > MAX_B_ALPHA_X {
        return Err(Error::Range(format!("X = {x} exceeds {MAX_B_ALPHA_X}")));
    }
    let weights = smooth_totients(x as usize, modulus);
    let a = SplitReal::from_f64(alpha);
    let mut value = Complex64::new(0.0, 0.0);
    let mut majorant = 0.0;
    let xf = x as f64;
    for c in 1..=x {
        value += e(a.frac_of_multiple(c as i64)) * weights[c as usize] as f64;
        let j = c as f64;
        let dist = a.dist_of_multiple(c as i64);
        majorant += (1.0 / (j * j)).min(1.0 / (xf * j * dist));
    }
    Ok(BAlpha {
        value,
        majorant: xf * xf * majorant,
    })
}

/// `c₁ φ(c₂)` for every `c ≤ limit`, from a smallest-prime-factor sieve.
fn smooth_totients(limit: usize, modulus: u64) -> Vec<u64> {
    let mut spf = vec![0u32; limit + 1];
    for p in 2..=limit {
        if spf[p] != 0 {
            continue;
        }
        for m in (p..=limit).step_by(p) {
            if spf[m] == 0 {
                spf[m] = p as u32;
            }
        }
    }
    let mut out = vec![0u64; limit + 1];
    if limit >= 1 {
        out[1] = 1;
    }
    for c in 2..=limit {
        let p = spf[c] as usize;
        let mut rest = c;
        let mut pe = 1;
        while rest % p == 0 {
            rest /= p;
            pe *= p;
        }
        let local = if modulus % p as u64 == 0 {
            pe as u64
        } else {
            (pe - pe / p) as u64
        };
        out[c] = out[rest] * local;
    }
    out
}
