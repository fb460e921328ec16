//! SL(2,Z) and SL(2,R) geometry: the semidirect group `SL(2,R) ⋉ R^{2k}`,
//! Iwasawa coordinates, reduction to the standard fundamental domain and the
//! SL(2,Z)-orbit structure of integer vectors `(q; r)`.

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};

const DET_TOL: f64 = 1e-10;
const REDUCTION_CAP: usize = 10_000;

/// Integer 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMat2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntMat2 {
    pub const IDENTITY: Self = Self::new(1, 0, 0, 1);
    /// `z ↦ z + 1`
    pub const T: Self = Self::new(1, 1, 0, 1);
    /// `z ↦ -1/z`
    pub const S: Self = Self::new(0, -1, 1, 0);

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    /// Inverse of a determinant-one matrix.
    pub fn inv(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn to_real(&self) -> Mat2 {
        Mat2::new(self.a as f64, self.b as f64, self.c as f64, self.d as f64)
    }

    /// `(q; r) ↦ (a q + b r; c q + d r)`
    pub fn act(&self, q: &[i64], r: &[i64]) -> (Vec<i64>, Vec<i64>) {
        let nq = q.iter().zip(r).map(|(x, y)| self.a * x + self.b * y).collect();
        let nr = q.iter().zip(r).map(|(x, y)| self.c * x + self.d * y).collect();
        (nq, nr)
    }

    pub fn mobius(&self, tau: Complex64) -> Complex64 {
        self.to_real().mobius(tau)
    }
}

/// Real 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Self = Self::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// `u(x) = [[1, x], [0, 1]]`
    pub fn u(x: f64) -> Self {
        Self::new(1.0, x, 0.0, 1.0)
    }

    /// `a(y) = diag(√y, 1/√y)`
    pub fn a(y: f64) -> Self {
        let s = y.sqrt();
        Self::new(s, 0.0, 0.0, 1.0 / s)
    }

    /// Rotation `k(θ) = [[cos θ, -sin θ], [sin θ, cos θ]]`.
    pub fn k(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, -s, s, c)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn inv(&self) -> Self {
        let det = self.det();
        Self::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    pub fn frobenius(&self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    pub fn dist(&self, o: &Self) -> f64 {
        Self::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d).frobenius()
    }

    pub fn mobius(&self, tau: Complex64) -> Complex64 {
        (self.a * tau + self.b) / (self.c * tau + self.d)
    }

    fn check_unimodular(&self) -> Result<()> {
        let det = self.det();
        if (det - 1.0).abs() > DET_TOL || !det.is_finite() {
            return Err(Error::Invariant(format!("determinant {det} is not 1")));
        }
        Ok(())
    }
}

/// A point `(M, ξ)` of `SL(2,R) ⋉ R^{2k}` with `ξ = (ξ₁; ξ₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub k: usize,
    pub m: Mat2,
    pub xi: Vec<f64>,
}

impl GroupElement {
    pub fn new(m: Mat2, xi: Vec<f64>) -> Result<Self> {
        if xi.is_empty() || xi.len() % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "translation part has odd or zero length {}",
                xi.len()
            )));
        }
        m.check_unimodular()?;
        Ok(Self {
            k: xi.len() / 2,
            m,
            xi,
        })
    }

    pub fn identity(k: usize) -> Self {
        Self {
            k,
            m: Mat2::IDENTITY,
            xi: vec![0.0; 2 * k],
        }
    }

    pub fn xi1(&self) -> &[f64] {
        &self.xi[..self.k]
    }

    pub fn xi2(&self) -> &[f64] {
        &self.xi[self.k..]
    }

    /// `M` acting blockwise on `(ξ₁; ξ₂)`.
    pub fn act_on(m: &Mat2, xi: &[f64]) -> Vec<f64> {
        let k = xi.len() / 2;
        let (x1, x2) = xi.split_at(k);
        let top = x1.iter().zip(x2).map(|(s, t)| m.a * s + m.b * t);
        let bottom = x1.iter().zip(x2).map(|(s, t)| m.c * s + m.d * t);
        top.chain(bottom).collect()
    }

    /// `(M, v)(M', v') = (MM', v + Mv')`
    pub fn op(&self, other: &Self) -> Result<Self> {
        if self.k != other.k {
            return Err(Error::Dimension {
                expected: self.k,
                found: other.k,
            });
        }
        let moved = Self::act_on(&self.m, &other.xi);
        Ok(Self {
            k: self.k,
            m: self.m.mul(&other.m),
            xi: self.xi.iter().zip(moved).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn inv(&self) -> Self {
        let mi = self.m.inv();
        Self {
            k: self.k,
            m: mi,
            xi: Self::act_on(&mi, &self.xi).into_iter().map(|x| -x).collect(),
        }
    }
}

/// `M = u(u) a(v) k(θ)`, with `θ ∈ (-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IwasawaCoord {
    pub u: f64,
    pub v: f64,
    pub theta: f64,
}

pub fn iwasawa(m: &Mat2) -> Result<IwasawaCoord> {
    m.check_unimodular()?;
    let tau = m.mobius(Complex64::i());
    Ok(IwasawaCoord {
        u: tau.re,
        v: 1.0 / (m.c * m.c + m.d * m.d),
        theta: m.c.atan2(m.d),
    })
}

pub fn iwasawa_compose(coord: &IwasawaCoord) -> Mat2 {
    Mat2::u(coord.u)
        .mul(&Mat2::a(coord.v))
        .mul(&Mat2::k(coord.theta))
}

/// Moves `tau` into the standard fundamental domain; returns the reduced
/// point and the `γ ∈ SL(2,Z)` with `γ(tau)` equal to it.
pub fn reduce_to_fundamental_domain(tau: Complex64) -> Result<(Complex64, IntMat2)> {
    if !(tau.im > 0.0) || !tau.re.is_finite() {
        return Err(Error::Domain(format!("{tau} is not in the upper half-plane")));
    }
    let mut z = tau;
    let mut gamma = IntMat2::IDENTITY;
    for _ in 0..REDUCTION_CAP {
        let n = z.re.round();
        if n != 0.0 {
            z.re -= n;
            gamma = IntMat2::new(1, -(n as i64), 0, 1).mul(&gamma);
        }
        if z.norm_sqr() < 1.0 {
            z = -1.0 / z;
            gamma = IntMat2::S.mul(&gamma);
        } else {
            return Ok((z, gamma));
        }
    }
    Err(Error::Budget {
        what: "fundamental-domain reduction".into(),
        achieved: z.im,
    })
}

/// Cuspidal height: the largest `Im γM(i)` over `γ ∈ SL(2,Z)`, and a maximising `γ`.
pub fn cuspidal_height(m: &Mat2) -> Result<(f64, IntMat2)> {
    m.check_unimodular()?;
    let (z, gamma) = reduce_to_fundamental_domain(m.mobius(Complex64::i()))?;
    Ok((z.im, gamma))
}

/// `(1₂, ξ) u(x) a(y)`
pub fn horocycle_point(xi: &[f64], x: f64, y: f64) -> Result<GroupElement> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("horocycle height {y} must be positive")));
    }
    GroupElement::new(Mat2::u(x).mul(&Mat2::a(y)), xi.to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrbitClass {
    Zero,
    A,
    B,
}

/// An integer vector `η = (q; r) ∈ Z^{2k}` with its orbit class.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrbitVector {
    pub k: usize,
    pub q: Vec<i64>,
    pub r: Vec<i64>,
    pub class: OrbitClass,
}

/// Rows `q` and `r` are proportional over Q exactly when the orbit meets `(0; r')`.
pub fn classify_orbit(q: &[i64], r: &[i64]) -> Result<OrbitClass> {
    if q.len() != r.len() {
        return Err(Error::Dimension {
            expected: q.len(),
            found: r.len(),
        });
    }
    if q.is_empty() {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if q.iter().chain(r).all(|&x| x == 0) {
        return Ok(OrbitClass::Zero);
    }
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            let minor = q[i] as i128 * r[j] as i128 - q[j] as i128 * r[i] as i128;
            if minor != 0 {
                return Ok(OrbitClass::B);
            }
        }
    }
    Ok(OrbitClass::A)
}

/// A canonical B-orbit representative together with the matrix producing it.
///
/// Indices are 1-based: `r_j = 0` for `j < l1`, `q_j = 0` for `j < l2`,
/// `r_{l1} > 0` and `0 ≤ r_{l2} < |q_{l2}|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalBRep {
    pub rep: OrbitVector,
    pub l1: usize,
    pub l2: usize,
    /// `transform · (q; r) = rep`
    pub transform: IntMat2,
}

pub fn canonical_b_rep(q: &[i64], r: &[i64]) -> Result<CanonicalBRep> {
    let class = classify_orbit(q, r)?;
    if class != OrbitClass::B {
        return Err(Error::Domain(format!("{class:?}-orbit has no B representative")));
    }
    let l1 = (0..q.len())
        .find(|&j| q[j] != 0 || r[j] != 0)
        .expect("nonzero vector");

    // Send column l1 to (0, g) with g = gcd > 0.
    let egcd = q[l1].extended_gcd(&r[l1]);
    let g = egcd.gcd;
    let first = IntMat2::new(r[l1] / g, -q[l1] / g, egcd.x, egcd.y);
    debug_assert_eq!(first.det(), 1);
    let (q1, r1) = first.act(q, r);

    let l2 = (l1 + 1..q.len())
        .find(|&j| q1[j] != 0)
        .ok_or_else(|| Error::Invariant("B-orbit without a second pivot".into()))?;

    // Shear r by multiples of q so that 0 ≤ r_{l2} < |q_{l2}|; fixes column l1.
    let (p, s) = (q1[l2], r1[l2]);
    let t = if p > 0 {
        -Integer::div_floor(&s, &p)
    } else {
        Integer::div_floor(&s, &(-p))
    };
    let shear = IntMat2::new(1, 0, t, 1);
    let (q2, r2) = shear.act(&q1, &r1);
    let transform = shear.mul(&first);

    Ok(CanonicalBRep {
        rep: OrbitVector {
            k: q.len(),
            q: q2,
            r: r2,
            class,
        },
        l1: l1 + 1,
        l2: l2 + 1,
        transform,
    })
}

/// Checks the normal-form inequalities of a canonical B representative.
pub fn is_canonical_b(rep: &CanonicalBRep) -> bool {
    let (q, r) = (&rep.rep.q, &rep.rep.r);
    let (l1, l2) = (rep.l1 - 1, rep.l2 - 1);
    l1 < l2
        && l2 < q.len()
        && r[..l1].iter().all(|&x| x == 0)
        && q[..l2].iter().all(|&x| x == 0)
        && r[l1] > 0
        && q[l2] != 0
        && (0..q[l2].abs()).contains(&r[l2])
}
