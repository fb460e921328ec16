//! Exact integer utilities and continued fractions.
//!
//! Everything here is a pure function of its arguments. Factorization is by
//! wheel trial division and is only offered up to [`MAX_FACTOR_INPUT`].

use dashu_float::FBig;
use num_integer::Integer;

use crate::error::{Error, Result};

/// Largest integer accepted by [`factorize`] and [`arithmetic_functions`].
pub const MAX_FACTOR_INPUT: u64 = 10_000_000;

/// Largest continued-fraction depth served by [`continued_fraction`].
pub const MAX_CF_DEPTH: usize = 200;

/// A remainder whose propagated uncertainty exceeds this is no longer trusted.
pub const CF_TRUST_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pub prime_powers: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn value(&self) -> u64 {
        self.prime_powers
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product()
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.prime_powers.iter().map(|&(p, _)| p)
    }

    /// Product of the distinct primes.
    pub fn radical(&self) -> u64 {
        self.primes().product()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithmeticFunctions {
    pub phi: u64,
    pub mu: i8,
    /// Number of divisors.
    pub sigma: u64,
    /// Sum of divisors.
    pub sigma1: u64,
    pub factorization: Factorization,
}

/// Trial division with a 2·3·5 wheel.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::InvalidInput("cannot factor 0".into()));
    }
    if n > MAX_FACTOR_INPUT {
        return Err(Error::Range(format!(
            "{n} exceeds the factorization cap {MAX_FACTOR_INPUT}"
        )));
    }
    let mut rest = n;
    let mut out = Vec::new();
    let mut take = |p: u64, rest: &mut u64| {
        let mut e = 0;
        while *rest % p == 0 {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    for p in [2, 3, 5] {
        take(p, &mut rest);
    }
    const WHEEL: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut p = 7u64;
    let mut i = 0;
    while p * p <= rest {
        take(p, &mut rest);
        p += WHEEL[i];
        i = (i + 1) % WHEEL.len();
    }
    if rest > 1 {
        out.push((rest, 1));
    }
    Ok(Factorization { prime_powers: out })
}

pub fn arithmetic_functions(n: u64) -> Result<ArithmeticFunctions> {
    let factorization = factorize(n)?;
    let overflow = || Error::Range(format!("sigma_1({n}) overflows u64"));
    let mut phi = 1u64;
    let mut mu = 1i8;
    let mut sigma = 1u64;
    let mut sigma1 = 1u64;
    for &(p, e) in &factorization.prime_powers {
        phi *= (p - 1) * p.pow(e - 1);
        mu = if e > 1 { 0 } else { -mu };
        sigma *= u64::from(e) + 1;
        // (p^{e+1} - 1) / (p - 1)
        let mut geometric = 0u64;
        let mut power = 1u64;
        for _ in 0..=e {
            geometric = geometric.checked_add(power).ok_or_else(overflow)?;
            power = power.saturating_mul(p);
        }
        sigma1 = sigma1.checked_mul(geometric).ok_or_else(overflow)?;
    }
    Ok(ArithmeticFunctions {
        phi,
        mu,
        sigma,
        sigma1,
        factorization,
    })
}

pub fn euler_phi(n: u64) -> Result<u64> {
    Ok(arithmetic_functions(n)?.phi)
}

pub fn moebius(n: u64) -> Result<i8> {
    Ok(arithmetic_functions(n)?.mu)
}

pub fn divisor_count(n: u64) -> Result<u64> {
    Ok(arithmetic_functions(n)?.sigma)
}

/// Inverse of `a` modulo `m`, in `[0, m)`.
pub fn mod_inverse(a: i64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    if m == 1 {
        return Ok(0);
    }
    let mi = m as i128;
    let ar = (a as i128).rem_euclid(mi);
    let egcd = ar.extended_gcd(&mi);
    if egcd.gcd != 1 {
        return Err(Error::NoInverse { a, m });
    }
    Ok(egcd.x.rem_euclid(mi) as u64)
}

/// Splits `c = c1 * c2` with every prime of `c1` dividing `n` and `gcd(c2, n) = 1`.
pub fn smooth_split(c: u64, n: u64) -> Result<(u64, u64)> {
    if c == 0 || n == 0 {
        return Err(Error::InvalidInput("smooth_split needs c, N >= 1".into()));
    }
    let mut c1 = 1u64;
    let mut c2 = c;
    loop {
        let g = c2.gcd(&n);
        if g == 1 {
            break;
        }
        c1 *= g;
        c2 /= g;
    }
    Ok((c1, c2))
}

/// Distance from `x` to the nearest integer.
pub fn nearest_int_dist(x: f64) -> f64 {
    (x - x.round_ties_even()).abs()
}

/// Signed offset of `x` from its nearest integer, in `[-1/2, 1/2]`.
pub fn signed_frac(x: f64) -> f64 {
    x - x.round_ties_even()
}

/// A real number carried as an unevaluated sum `hi + lo` of two doubles.
///
/// Used to evaluate `<n x>` for `n` up to ~1e12 without losing the
/// fractional digits to the integer part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitReal {
    pub hi: f64,
    pub lo: f64,
}

impl SplitReal {
    pub fn new(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        let err = lo - (s - hi);
        Self { hi: s, lo: err }
    }

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn from_ext(x: &ExtFloat) -> Self {
        let hi = x.to_f64();
        let lo = x.sub(&ExtFloat::from_f64(hi, x.bits())).to_f64();
        Self { hi, lo }
    }

    /// `(a + b sqrt(d)) / den` to double-double accuracy.
    pub fn quadratic(a: i64, b: i64, d: u64, den: i64) -> Self {
        Self::from_ext(&ExtFloat::quadratic(a, b, d, den, 160))
    }

    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }

    /// Signed offset of `n * self` from the nearest integer.
    pub fn frac_of_multiple(&self, n: i64) -> f64 {
        let nf = n as f64;
        let p = nf * self.hi;
        let e = nf.mul_add(self.hi, -p);
        let r = p - p.round_ties_even();
        let t = r + (e + nf * self.lo);
        t - t.round_ties_even()
    }

    /// `<n * self>`
    pub fn dist_of_multiple(&self, n: i64) -> f64 {
        self.frac_of_multiple(n).abs()
    }
}

/// Binary floating point number with a caller-chosen significand length.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtFloat {
    inner: FBig,
    bits: usize,
}

impl ExtFloat {
    pub fn from_f64(x: f64, bits: usize) -> Self {
        let inner = FBig::try_from(x)
            .expect("finite input")
            .with_precision(bits)
            .value();
        Self { inner, bits }
    }

    pub fn from_int(n: i64, bits: usize) -> Self {
        Self {
            inner: FBig::from(n).with_precision(bits).value(),
            bits,
        }
    }

    /// `sqrt(n)` rounded to `bits` significand bits.
    pub fn sqrt_int(n: u64, bits: usize) -> Self {
        let x = FBig::from(n).with_precision(bits).value();
        Self {
            inner: x.sqrt(),
            bits,
        }
    }

    /// `(a + b sqrt(d)) / den`
    pub fn quadratic(a: i64, b: i64, d: u64, den: i64, bits: usize) -> Self {
        let root = Self::sqrt_int(d, bits + 8);
        let num = Self::from_int(a, bits + 8).add(&root.mul_int(b));
        let mut out = num.div_int(den);
        out.inner = out.inner.with_precision(bits).value();
        out.bits = bits;
        out
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn to_f64(&self) -> f64 {
        self.inner.to_f64().value()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            inner: &self.inner + &other.inner,
            bits: self.bits.max(other.bits),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            inner: &self.inner - &other.inner,
            bits: self.bits.max(other.bits),
        }
    }

    pub fn mul_int(&self, n: i64) -> Self {
        Self {
            inner: &self.inner * FBig::from(n),
            bits: self.bits,
        }
    }

    pub fn div_int(&self, n: i64) -> Self {
        Self {
            inner: &self.inner / FBig::from(n).with_precision(self.bits).value(),
            bits: self.bits,
        }
    }

    fn floor_i128(&self) -> Result<i128> {
        let f = self.inner.floor().to_int().value();
        i128::try_from(f).map_err(|_| Error::Range("partial quotient exceeds i128".into()))
    }

    fn recip(&self) -> Self {
        let one = FBig::ONE.with_precision(self.bits).value();
        Self {
            inner: one / &self.inner,
            bits: self.bits,
        }
    }

    fn is_zero(&self) -> bool {
        self.inner.repr().significand().is_zero()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CFExpansion {
    pub x: f64,
    /// `a_0` may be negative when `x < 0`; all later quotients are positive.
    pub quotients: Vec<i64>,
    pub convergents: Vec<(i128, i128)>,
}

impl CFExpansion {
    pub fn last_convergent(&self) -> (i128, i128) {
        *self.convergents.last().expect("expansion has at least one term")
    }
}

/// Simple continued fraction of an `f64`, treating the input as exact to
/// half an ulp.
pub fn continued_fraction_f64(x: f64, depth: usize) -> Result<CFExpansion> {
    if !x.is_finite() {
        return Err(Error::InvalidInput("continued fraction of a non-finite value".into()));
    }
    continued_fraction(&ExtFloat::from_f64(x, 53), depth)
}

/// Simple continued fraction of `x` up to `depth` partial quotients.
///
/// The absolute uncertainty of each complete quotient is propagated through
/// `x_{k+1} = 1 / (x_k - a_k)`; the expansion stops early (successfully) if a
/// remainder is exactly zero, and fails with [`Error::Precision`] once a
/// quotient can no longer be certified.
pub fn continued_fraction(x: &ExtFloat, depth: usize) -> Result<CFExpansion> {
    if depth == 0 || depth > MAX_CF_DEPTH {
        return Err(Error::InvalidInput(format!(
            "depth must be in 1..={MAX_CF_DEPTH}"
        )));
    }
    let bits = x.bits();
    let unit = 2f64.powi(-(bits as i32));
    let mut current = x.clone();
    let mut err = unit * x.to_f64().abs().max(1.0);
    let mut quotients = Vec::with_capacity(depth);
    let mut convergents = Vec::with_capacity(depth);
    let (mut p_prev, mut p_prev2) = (1i128, 0i128);
    let (mut q_prev, mut q_prev2) = (0i128, 1i128);
    let last_trusted = |n: usize| n.checked_sub(1);

    while quotients.len() < depth {
        let k = quotients.len();
        let a = current.floor_i128()?;
        let frac_ext = current.sub(&ExtFloat::from_int(a as i64, bits));
        let frac = frac_ext.to_f64();
        if err > CF_TRUST_GUARD || (frac != 0.0 && (frac <= err || 1.0 - frac <= err)) {
            return Err(Error::Precision {
                last_trusted: last_trusted(k),
            });
        }
        if k > 0 && a <= 0 {
            return Err(Error::Invariant("non-positive partial quotient".into()));
        }
        let a64 = i64::try_from(a).map_err(|_| Error::Range("partial quotient exceeds i64".into()))?;
        let p = a
            .checked_mul(p_prev)
            .and_then(|t| t.checked_add(p_prev2))
            .ok_or_else(|| Error::Range("convergent numerator overflow".into()))?;
        let q = a
            .checked_mul(q_prev)
            .and_then(|t| t.checked_add(q_prev2))
            .ok_or_else(|| Error::Range("convergent denominator overflow".into()))?;
        quotients.push(a64);
        convergents.push((p, q));
        (p_prev2, p_prev) = (p_prev, p);
        (q_prev2, q_prev) = (q_prev, q);

        if frac_ext.is_zero() {
            break;
        }
        current = frac_ext.recip();
        let next = current.to_f64();
        err = err / (frac * (frac - err)) + next.abs() * unit;
    }

    Ok(CFExpansion {
        x: x.to_f64(),
        quotients,
        convergents,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(n: u64) -> (u64, i8, u64, u64) {
        let divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
        let phi = (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64;
        let squarefree = (2..=n).all(|d| d * d > n || n % (d * d) != 0);
        let mu = if !squarefree {
            0
        } else {
            let omega = (2..=n)
                .filter(|p| n % p == 0 && (2..*p).all(|q| p % q != 0))
                .count();
            if omega % 2 == 0 {
                1
            } else {
                -1
            }
        };
        (phi, mu, divisors.len() as u64, divisors.iter().sum())
    }

    #[test]
    fn arithmetic_examples() {
        let one = arithmetic_functions(1).unwrap();
        assert_eq!((one.phi, one.mu, one.sigma, one.sigma1), (1, 1, 1, 1));
        assert!(one.factorization.prime_powers.is_empty());

        let twelve = arithmetic_functions(12).unwrap();
        assert_eq!((twelve.phi, twelve.mu, twelve.sigma, twelve.sigma1), (4, 0, 6, 28));
        assert_eq!(twelve.factorization.prime_powers, vec![(2, 2), (3, 1)]);

        let thirty = arithmetic_functions(30).unwrap();
        assert_eq!((thirty.phi, thirty.mu, thirty.sigma, thirty.sigma1), (8, -1, 8, 72));
        assert_eq!(thirty.factorization.prime_powers, vec![(2, 1), (3, 1), (5, 1)]);
    }

    #[test]
    fn arithmetic_matches_enumeration() {
        for n in 1..=600u64 {
            let f = arithmetic_functions(n).unwrap();
            assert_eq!((f.phi, f.mu, f.sigma, f.sigma1), brute(n), "n = {n}");
            assert_eq!(f.factorization.value(), n);
        }
    }

    #[test]
    fn factorization_cap() {
        assert!(factorize(MAX_FACTOR_INPUT).is_ok());
        assert!(matches!(factorize(MAX_FACTOR_INPUT + 1), Err(Error::Range(_))));
        assert_eq!(
            factorize(9_999_991).unwrap().prime_powers,
            vec![(9_999_991, 1)]
        );
    }

    #[test]
    fn inverses() {
        assert_eq!(mod_inverse(1, 7).unwrap(), 1);
        assert_eq!(mod_inverse(3, 10).unwrap(), 7);
        assert_eq!(mod_inverse(-3, 10).unwrap(), 3);
        assert!(matches!(mod_inverse(2, 4), Err(Error::NoInverse { .. })));
        assert_eq!(mod_inverse(5, 1).unwrap(), 0);
    }

    #[test]
    fn smooth_split_examples() {
        assert_eq!(smooth_split(1, 6).unwrap(), (1, 1));
        assert_eq!(smooth_split(12, 2).unwrap(), (4, 3));
        assert_eq!(smooth_split(35, 6).unwrap(), (1, 35));
        assert_eq!(smooth_split(360, 6).unwrap(), (72, 5));
    }

    #[test]
    fn nearest_int_examples() {
        assert_eq!(nearest_int_dist(0.5), 0.5);
        assert_eq!(nearest_int_dist(2.25), 0.25);
        assert!((nearest_int_dist(-0.6) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn golden_ratio_expansion() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let cf = continued_fraction_f64(phi, 6).unwrap();
        assert_eq!(cf.quotients, vec![1; 6]);
        assert_eq!(cf.last_convergent(), (13, 8));
    }

    #[test]
    fn rational_terminates() {
        let cf = continued_fraction_f64(0.5, 3).unwrap();
        assert_eq!(cf.quotients, vec![0, 2]);
        let cf = continued_fraction_f64(-1.75, 5).unwrap();
        assert_eq!(cf.quotients, vec![-2, 4]);
    }

    #[test]
    fn sqrt2_expansion() {
        let cf = continued_fraction_f64(2f64.sqrt(), 4).unwrap();
        assert_eq!(cf.quotients, vec![1, 2, 2, 2]);
        assert_eq!(cf.last_convergent(), (17, 12));
    }

    #[test]
    fn extended_precision_reaches_depth_forty() {
        let root2 = ExtFloat::sqrt_int(2, 192);
        let cf = continued_fraction(&root2, 40).unwrap();
        assert_eq!(cf.quotients[0], 1);
        assert!(cf.quotients[1..].iter().all(|&a| a == 2));
        let root3 = ExtFloat::sqrt_int(3, 192);
        let cf = continued_fraction(&root3, 40).unwrap();
        for (i, &a) in cf.quotients.iter().enumerate().skip(1) {
            assert_eq!(a, if i % 2 == 1 { 1 } else { 2 });
        }
    }

    #[test]
    fn double_precision_runs_out() {
        match continued_fraction_f64(2f64.sqrt(), 40) {
            Err(Error::Precision { last_trusted: Some(k) }) => assert!((3..30).contains(&k)),
            other => panic!("expected precision error, got {other:?}"),
        }
    }

    #[test]
    fn split_real_multiples() {
        let x = SplitReal::from_ext(&ExtFloat::quadratic(-1, 1, 2, 1, 192));
        // <j (sqrt2 - 1)> against a 192-bit reference
        for j in [1i64, 12, 985, 1_000_003, 123_456_789] {
            let exact = ExtFloat::quadratic(-j, j, 2, 1, 256);
            let a = exact.floor_i128().unwrap();
            let frac = exact.sub(&ExtFloat::from_int(a as i64, 256)).to_f64();
            let want = frac.min(1.0 - frac);
            assert!((x.dist_of_multiple(j) - want).abs() < 2e-16, "j = {j}");
        }
    }
}
