//! Elements of the Iwasawa algebra `Λ = Z_p[[T]]`, `T = h - 1`, at finite
//! `p`-adic precision.
//!
//! Every element the crate manipulates is a genuine polynomial, so
//! [`LambdaElement`] stores a coefficient vector. Only the unit part of a
//! Weierstrass factorization is a truncated power series.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::abelian::AbelianType;
use crate::padic::{ModMatrix, ModularInt, RingParams};
use crate::{Error, Result};

/// A polynomial in `T` with coefficients in `Z/p^N`; no trailing zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LambdaElement {
    params: RingParams,
    coeffs: Vec<u64>,
}

impl LambdaElement {
    pub fn new(params: RingParams, coeffs: Vec<u64>) -> Self {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| params.reduce(c)).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        LambdaElement { params, coeffs }
    }

    /// Coefficients low to high, as (possibly negative) integers.
    pub fn from_i64(params: RingParams, coeffs: &[i64]) -> Self {
        LambdaElement::new(params, coeffs.iter().map(|&c| params.reduce_i64(c)).collect())
    }

    pub fn zero(params: RingParams) -> Self {
        LambdaElement { params, coeffs: Vec::new() }
    }

    pub fn constant(params: RingParams, c: u64) -> Self {
        LambdaElement::new(params, vec![c])
    }

    pub fn one(params: RingParams) -> Self {
        LambdaElement::constant(params, 1)
    }

    /// The variable `T = h - 1`.
    pub fn t(params: RingParams) -> Self {
        LambdaElement::new(params, vec![0, 1])
    }

    pub fn params(&self) -> RingParams {
        self.params
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> ModularInt {
        ModularInt::new(self.params, self.coeffs.get(i).copied().unwrap_or(0))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn check(&self, other: &LambdaElement) -> Result<()> {
        if self.params == other.params {
            Ok(())
        } else {
            Err(Error::ParamsMismatch)
        }
    }

    pub fn try_add(&self, other: &LambdaElement) -> Result<LambdaElement> {
        self.check(other)?;
        let pr = self.params;
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                pr.add(a, b)
            })
            .collect();
        Ok(LambdaElement::new(pr, c))
    }

    pub fn try_sub(&self, other: &LambdaElement) -> Result<LambdaElement> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> LambdaElement {
        let pr = self.params;
        LambdaElement { params: pr, coeffs: self.coeffs.iter().map(|&c| pr.neg(c)).collect() }
    }

    pub fn try_mul(&self, other: &LambdaElement) -> Result<LambdaElement> {
        self.check(other)?;
        Ok(LambdaElement::new(self.params, mul_raw(self.params, &self.coeffs, &other.coeffs, None)))
    }

    pub fn scale(&self, c: u64) -> LambdaElement {
        let pr = self.params;
        let c = pr.reduce(c);
        LambdaElement::new(pr, self.coeffs.iter().map(|&a| pr.mul(a, c)).collect())
    }

    pub fn pow(&self, mut e: u64) -> LambdaElement {
        let mut acc = LambdaElement::one(self.params);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base).expect("same params");
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base).expect("same params");
            }
        }
        acc
    }

    /// Reduction modulo `T^{degree + 1}`.
    pub fn truncate(&self, degree: usize) -> LambdaElement {
        let keep = self.coeffs.len().min(degree + 1);
        LambdaElement::new(self.params, self.coeffs[..keep].to_vec())
    }

    /// Same integer representatives, read in `Z/p^M` for another precision `M`.
    pub fn lift_to(&self, params: RingParams) -> Result<LambdaElement> {
        if params.p() != self.params.p() {
            return Err(Error::ParamsMismatch);
        }
        Ok(LambdaElement::new(params, self.coeffs.clone()))
    }

    /// Evaluates at a square matrix, substituting `T -> m`.
    pub fn eval_matrix(&self, m: &ModMatrix) -> Result<ModMatrix> {
        if m.params() != self.params {
            return Err(Error::ParamsMismatch);
        }
        if !m.is_square() {
            return Err(Error::DimensionMismatch);
        }
        let id = ModMatrix::identity(self.params, m.rows());
        let mut acc = ModMatrix::zero(self.params, m.rows(), m.cols());
        for &c in self.coeffs.iter().rev() {
            acc = acc.try_mul(m)?.try_add(&id.scale(c))?;
        }
        Ok(acc)
    }

    /// `(mu, lambda)`: the minimal coefficient valuation and the first index attaining it.
    pub fn mu_lambda(&self) -> Result<(u32, usize)> {
        let pr = self.params;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| (pr.valuation_of(c), i))
            .min()
            .map(|(mu, lambda)| (mu, lambda))
            .ok_or(Error::PrecisionExhausted)
    }

    pub fn is_distinguished(&self) -> bool {
        let Some(deg) = self.degree() else { return false };
        self.coeffs[deg] == 1 % self.params.modulus()
            && self.coeffs[..deg].iter().all(|&c| c % self.params.p() == 0)
    }

    /// Symmetric integer lift of each coefficient, in `(-p^N/2, p^N/2]`.
    pub fn symmetric_lift(&self) -> Vec<i128> {
        let m = self.params.modulus() as i128;
        self.coeffs
            .iter()
            .map(|&c| {
                let c = c as i128;
                if 2 * c > m {
                    c - m
                } else {
                    c
                }
            })
            .collect()
    }
}

impl fmt::Display for LambdaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Product of coefficient vectors, optionally truncated below degree `limit`.
fn mul_raw(pr: RingParams, a: &[u64], b: &[u64], limit: Option<usize>) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let full = a.len() + b.len() - 1;
    let len = limit.map_or(full, |l| l.min(full));
    let m = pr.modulus() as u128;
    let mut out = vec![0u128; len];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 || i >= len {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] = (out[i + j] + x as u128 * y as u128) % m;
        }
    }
    out.into_iter().map(|v| v as u64).collect()
}

/// Inverse of a power series with unit constant term, modulo `T^len`.
fn series_inverse(pr: RingParams, u: &[u64], len: usize) -> Vec<u64> {
    let c0 = pr.inverse_of(u[0]).expect("unit constant term");
    let mut inv = vec![0u64; len];
    if len == 0 {
        return inv;
    }
    inv[0] = c0;
    for k in 1..len {
        let mut acc = 0u64;
        for j in 1..=k.min(u.len() - 1) {
            acc = pr.add(acc, pr.mul(u[j], inv[k - j]));
        }
        inv[k] = pr.mul(pr.neg(acc), c0);
    }
    inv
}

/// A monic polynomial whose lower coefficients are all divisible by `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DistinguishedPoly(LambdaElement);

impl DistinguishedPoly {
    pub fn new(f: LambdaElement) -> Result<Self> {
        if f.is_distinguished() {
            Ok(DistinguishedPoly(f))
        } else {
            Err(Error::NotDistinguished)
        }
    }

    pub fn as_element(&self) -> &LambdaElement {
        &self.0
    }

    pub fn into_element(self) -> LambdaElement {
        self.0
    }

    /// The `lambda`-invariant.
    pub fn degree(&self) -> usize {
        self.0.degree().expect("distinguished polynomials are nonzero")
    }

    pub fn params(&self) -> RingParams {
        self.0.params
    }

    pub fn pow(&self, k: u32) -> DistinguishedPoly {
        DistinguishedPoly(self.0.pow(k as u64))
    }

    pub fn try_mul(&self, other: &DistinguishedPoly) -> Result<DistinguishedPoly> {
        Ok(DistinguishedPoly(self.0.try_mul(&other.0)?))
    }

    pub fn lift_to(&self, params: RingParams) -> Result<DistinguishedPoly> {
        DistinguishedPoly::new(self.0.lift_to(params)?)
    }

    /// Companion matrix: `T` acting on `Z_p[T]/(P)` in the basis `1, T, ..., T^{λ-1}`.
    pub fn companion(&self) -> ModMatrix {
        let pr = self.params();
        let deg = self.degree();
        let mut m = ModMatrix::zero(pr, deg, deg);
        for i in 1..deg {
            m.set_raw(i, i - 1, 1);
        }
        for i in 0..deg {
            m.set_raw(i, deg - 1, pr.neg(self.0.coeffs[i]));
        }
        m
    }

    /// Long division `f = q P + r` with `deg r < deg P`.
    pub fn divmod(&self, f: &LambdaElement) -> Result<(LambdaElement, LambdaElement)> {
        self.0.check(f)?;
        let pr = self.params();
        let deg = self.degree();
        let mut rem = f.coeffs.clone();
        if rem.len() <= deg {
            return Ok((LambdaElement::zero(pr), f.clone()));
        }
        let mut quot = vec![0u64; rem.len() - deg];
        for k in (0..quot.len()).rev() {
            let c = rem[k + deg];
            if c == 0 {
                continue;
            }
            quot[k] = c;
            for (i, &pc) in self.0.coeffs.iter().enumerate() {
                rem[k + i] = pr.sub(rem[k + i], pr.mul(c, pc));
            }
        }
        rem.truncate(deg);
        Ok((LambdaElement::new(pr, quot), LambdaElement::new(pr, rem)))
    }
}

impl fmt::Display for DistinguishedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `omega_n = ((1+T)^{p^n} - 1) / T = Σ_{k=1}^{p^n} binom(p^n, k) T^{k-1}`.
pub fn omega(params: RingParams, n: u32) -> DistinguishedPoly {
    let mut power = LambdaElement::new(params, vec![1, 1]);
    for _ in 0..n {
        power = power.pow(params.p());
    }
    let coeffs = power.coeffs[1..].to_vec();
    DistinguishedPoly(LambdaElement::new(params, coeffs))
}

/// Division by a distinguished polynomial.
pub fn divmod_distinguished(
    f: &LambdaElement,
    divisor: &DistinguishedPoly,
) -> Result<(LambdaElement, LambdaElement)> {
    divisor.divmod(f)
}

/// `f = p^mu * unit * distinguished` modulo `(p^N, T^{truncation + 1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassData {
    pub mu: u32,
    pub lambda: usize,
    pub distinguished: DistinguishedPoly,
    pub unit: LambdaElement,
    pub truncation: usize,
}

impl WeierstrassData {
    /// `p^mu * unit * distinguished mod T^{truncation + 1}`.
    pub fn recombine(&self) -> LambdaElement {
        let pr = self.unit.params;
        let prod = mul_raw(
            pr,
            &self.unit.coeffs,
            &self.distinguished.0.coeffs,
            Some(self.truncation + 1),
        );
        LambdaElement::new(pr, prod).scale(pr.p_pow(self.mu))
    }
}

/// Weierstrass preparation at finite precision.
///
/// Writes `f = p^mu g`, splits `g = A + T^λ B` with `A ≡ 0 mod p` and `B` a unit,
/// and solves `q = B^{-1}(1 - shift_λ(q A))` by fixed-point iteration; then
/// `q g = P` is distinguished and `unit = q^{-1}`.
pub fn weierstrass_prepare(f: &LambdaElement, truncation: usize) -> Result<WeierstrassData> {
    let pr = f.params;
    let (mu, lambda) = f.mu_lambda()?;
    let pmu = pr.p().pow(mu);
    let g: Vec<u64> = f.coeffs.iter().map(|&c| c / pmu).collect();
    let n = pr.precision() as usize;

    let low = &g[..lambda];
    let high = &g[lambda..];
    let width = lambda.max(truncation + 1) + lambda * (n + 1);
    let b_inv = series_inverse(pr, high, width);

    let mut q = b_inv.clone();
    for _ in 0..=n {
        let qa = mul_raw(pr, &q, low, Some(width + lambda));
        let mut rhs = vec![0u64; width];
        rhs[0] = 1 % pr.modulus();
        for (k, r) in rhs.iter_mut().enumerate() {
            if let Some(&c) = qa.get(k + lambda) {
                *r = pr.sub(*r, c);
            }
        }
        q = mul_raw(pr, &b_inv, &rhs, Some(width));
    }

    let qa = mul_raw(pr, &q, low, Some(lambda));
    let mut p_coeffs = vec![0u64; lambda + 1];
    p_coeffs[..qa.len()].copy_from_slice(&qa);
    p_coeffs[lambda] = 1 % pr.modulus();
    let distinguished = DistinguishedPoly::new(LambdaElement::new(pr, p_coeffs))?;
    let unit = LambdaElement::new(pr, series_inverse(pr, &q, truncation + 1));

    Ok(WeierstrassData { mu, lambda, distinguished, unit, truncation })
}

/// Precision policy for [`companion_quotient`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompanionOptions {
    /// Upper bound for automatic precision escalation; `None` means the largest supported.
    pub max_precision: Option<u32>,
}

impl Default for CompanionOptions {
    fn default() -> Self {
        CompanionOptions { max_precision: None }
    }
}

/// Abelian type of `Λ/(P, omega_n) ≅ Z_p^λ / omega_n(M_P)`, `M_P` the companion matrix.
///
/// The coefficients of `P` are read as exact integers (symmetric lift) and the
/// precision is doubled until no invariant factor is capped. If factors are still
/// capped at the maximum precision the quotient is reported infinite when `P` and
/// `omega_n` share a factor modulo a large auxiliary prime, otherwise
/// [`Error::PrecisionExhausted`].
pub fn companion_quotient(
    poly: &DistinguishedPoly,
    n: u32,
    opts: CompanionOptions,
) -> Result<AbelianType> {
    let deg = poly.degree();
    if deg == 0 {
        return Ok(AbelianType::trivial());
    }
    let p = poly.params().p();
    let ceiling = RingParams::max_precision(p);
    let max = opts.max_precision.unwrap_or(ceiling).clamp(1, ceiling);
    let lifted = poly.0.symmetric_lift();
    let mut precision = poly.params().precision().min(max);
    loop {
        let pr = RingParams::new(p, precision)?;
        let coeffs = lifted.iter().map(|&c| pr.reduce_i128(c)).collect();
        let local = DistinguishedPoly::new(LambdaElement::new(pr, coeffs))?;
        let s = local.companion().try_add(&ModMatrix::identity(pr, deg))?;
        let smith = s.omega_sum(n)?.smith_form();
        let capped = smith.exponents.iter().filter(|&&e| e >= precision).count();
        if capped == 0 {
            return Ok(AbelianType::from_exponents(smith.exponents));
        }
        if precision >= max {
            if shares_factor_with_omega(&lifted, p, n) {
                return Err(Error::InfiniteQuotient);
            }
            return Err(Error::PrecisionExhausted);
        }
        precision = (precision * 2).min(max);
    }
}

/// `log_p |Λ/(P, omega_n)|`.
pub fn companion_order(poly: &DistinguishedPoly, n: u32, opts: CompanionOptions) -> Result<u64> {
    companion_quotient(poly, n, opts).map(|t| t.log_order())
}

const AUX_PRIME: u64 = (1 << 61) - 1;

/// Heuristic: does `gcd(P, omega_n)` over `F_ℓ`, `ℓ = 2^61 - 1`, have positive degree?
fn shares_factor_with_omega(poly: &[i128], p: u64, n: u32) -> bool {
    let m = AUX_PRIME as i128;
    let a: Vec<u64> = poly.iter().map(|&c| c.rem_euclid(m) as u64).collect();
    let mut power = vec![1u64, 1];
    for _ in 0..n {
        power = fl_pow(&power, p);
    }
    let b = power[1..].to_vec();
    fl_gcd_degree(a, b) > 0
}

fn fl_mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    let m = AUX_PRIME as u128;
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % m) as u64;
        }
    }
    out
}

fn fl_pow(base: &[u64], mut e: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = fl_mul(&acc, &b);
        }
        e >>= 1;
        if e > 0 {
            b = fl_mul(&b, &b);
        }
    }
    acc
}

fn fl_inv(a: u64) -> u64 {
    let m = AUX_PRIME as u128;
    let (mut acc, mut base, mut e) = (1u128, a as u128 % m, AUX_PRIME - 2);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc as u64
}

fn fl_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fl_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    let m = AUX_PRIME as u128;
    fl_trim(&mut a);
    fl_trim(&mut b);
    while !b.is_empty() {
        // a mod b
        let lead_inv = fl_inv(*b.last().unwrap());
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let c = (*a.last().unwrap() as u128 * lead_inv as u128 % m) as u64;
            for (i, &bi) in b.iter().enumerate() {
                let sub = (c as u128 * bi as u128 % m) as u64;
                a[shift + i] = ((a[shift + i] as u128 + m - sub as u128) % m) as u64;
            }
            fl_trim(&mut a);
        }
        core::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr(p: u64, n: u32) -> RingParams {
        RingParams::new(p, n).unwrap()
    }

    fn poly(p: u64, n: u32, c: &[i64]) -> LambdaElement {
        LambdaElement::from_i64(pr(p, n), c)
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(pr(2, 6), 0).into_element(), poly(2, 6, &[1]));
        assert_eq!(omega(pr(2, 6), 1).into_element(), poly(2, 6, &[2, 1]));
        assert_eq!(omega(pr(3, 4), 1).into_element(), poly(3, 4, &[3, 3, 1]));
        assert_eq!(omega(pr(2, 6), 2).into_element(), poly(2, 6, &[4, 6, 4, 1]));
    }

    #[test]
    fn arithmetic_examples() {
        let a = poly(2, 6, &[2, 1]);
        let b = poly(2, 6, &[2, 2, 1]);
        assert_eq!(a.try_mul(&b).unwrap(), poly(2, 6, &[4, 6, 4, 1]));
        assert_eq!(b.try_mul(&LambdaElement::one(pr(2, 6))).unwrap(), b);
        assert!(b.try_add(&b.neg()).unwrap().is_zero());
        assert_eq!(a.try_add(&poly(2, 5, &[1])), Err(Error::ParamsMismatch));
    }

    #[test]
    fn division_examples() {
        let (q, r) = divmod_distinguished(&omega(pr(2, 6), 2).into_element(), &omega(pr(2, 6), 1))
            .unwrap();
        assert_eq!(q, poly(2, 6, &[2, 2, 1]));
        assert!(r.is_zero());

        let one = DistinguishedPoly::new(LambdaElement::one(pr(5, 3))).unwrap();
        let f = poly(5, 3, &[7, 0, 3]);
        assert_eq!(divmod_distinguished(&f, &one).unwrap(), (f.clone(), LambdaElement::zero(pr(5, 3))));

        let t_plus_p = DistinguishedPoly::new(poly(3, 4, &[3, 1])).unwrap();
        let (q, r) = divmod_distinguished(&LambdaElement::t(pr(3, 4)), &t_plus_p).unwrap();
        assert_eq!(q, poly(3, 4, &[1]));
        assert_eq!(r, poly(3, 4, &[-3]));
    }

    #[test]
    fn mu_lambda_examples() {
        assert_eq!(poly(3, 5, &[9, 0, 3]).mu_lambda().unwrap(), (1, 2));
        assert_eq!(poly(5, 3, &[5]).mu_lambda().unwrap(), (1, 0));
        for (p, n) in [(2, 3), (3, 2), (5, 1)] {
            let w = omega(pr(p, 8), n).into_element();
            assert_eq!(w.mu_lambda().unwrap(), (0, p.pow(n) as usize - 1));
        }
        assert_eq!(LambdaElement::zero(pr(3, 3)).mu_lambda(), Err(Error::PrecisionExhausted));
        assert_eq!(poly(3, 2, &[9]).mu_lambda(), Err(Error::PrecisionExhausted));
    }

    #[test]
    fn weierstrass_examples() {
        let f = poly(3, 6, &[9, 3]);
        let w = weierstrass_prepare(&f, 10).unwrap();
        assert_eq!((w.mu, w.lambda), (1, 1));
        assert_eq!(w.distinguished.as_element(), &poly(3, 6, &[3, 1]));
        assert_eq!(w.unit, poly(3, 6, &[1]));

        let w = weierstrass_prepare(&poly(3, 6, &[9, 0, 3]), 8).unwrap();
        assert_eq!((w.mu, w.lambda), (1, 2));
        assert_eq!(w.recombine(), poly(3, 6, &[9, 0, 3]));

        let om = omega(pr(3, 6), 1);
        let f = om.as_element().try_mul(&poly(3, 6, &[1, 1])).unwrap();
        let w = weierstrass_prepare(&f, 12).unwrap();
        assert_eq!(w.mu, 0);
        assert_eq!(w.distinguished, om);
        assert_eq!(w.unit, poly(3, 6, &[1, 1]));

        assert_eq!(weierstrass_prepare(&poly(2, 3, &[8]), 4), Err(Error::PrecisionExhausted));
    }

    #[test]
    fn weierstrass_with_nontrivial_unit_series() {
        // unit 1/(1 - T) is not a polynomial; check the truncated recombination
        let f = poly(5, 7, &[5, 2, 1, 3]);
        let w = weierstrass_prepare(&f, 20).unwrap();
        assert_eq!(w.recombine(), f.truncate(20));
        assert_eq!(w.lambda, 1);
    }

    #[test]
    fn companion_examples() {
        let opts = CompanionOptions::default();
        let t = DistinguishedPoly::new(LambdaElement::t(pr(3, 2))).unwrap();
        for n in 0..6 {
            assert_eq!(companion_order(&t, n, opts).unwrap(), n as u64);
        }
        let t_minus_p = DistinguishedPoly::new(poly(3, 2, &[-3, 1])).unwrap();
        for n in 0..5 {
            assert_eq!(companion_order(&t_minus_p, n, opts).unwrap(), n as u64);
        }
        let om = omega(pr(3, 4), 1);
        assert_eq!(companion_order(&om, 1, opts), Err(Error::InfiniteQuotient));
        assert_eq!(companion_order(&om, 3, opts), Err(Error::InfiniteQuotient));
        assert_eq!(companion_order(&om, 0, opts).unwrap(), 0);
    }

    #[test]
    fn partial_common_factor_is_infinite() {
        // P = T * omega_1 has one factor coprime to omega_1 and one shared
        let om = omega(pr(3, 4), 1);
        let p = om.try_mul(&DistinguishedPoly::new(LambdaElement::t(pr(3, 4))).unwrap()).unwrap();
        let opts = CompanionOptions { max_precision: Some(12) };
        assert_eq!(companion_order(&p, 1, opts), Err(Error::InfiniteQuotient));
    }

    #[test]
    fn companion_precision_exhausted() {
        // P = T: e_n = n needs precision > n
        let t = DistinguishedPoly::new(LambdaElement::t(pr(2, 2))).unwrap();
        let opts = CompanionOptions { max_precision: Some(4) };
        assert_eq!(companion_order(&t, 3, opts).unwrap(), 3);
        assert_eq!(companion_order(&t, 4, opts), Err(Error::PrecisionExhausted));
    }
}
