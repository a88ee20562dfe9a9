use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::{Error, Result};

/// Largest modulus `p^N` we allow; products are formed in `u128`.
pub const MAX_MODULUS: u64 = 1 << 62;

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    'witness: for &a in &BASES {
        let mut x = 1u64;
        let (mut base, mut e) = (a % n, d);
        while e > 0 {
            if e & 1 == 1 {
                x = mulmod(x, base);
            }
            base = mulmod(base, base);
            e >>= 1;
        }
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The ring `Z/p^N`: a prime `p` and a precision `N >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RingParams {
    p: u64,
    precision: u32,
    modulus: u64,
}

impl RingParams {
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let invalid = Error::InvalidPrecision { p, precision };
        if precision == 0 {
            return Err(invalid);
        }
        let modulus = p
            .checked_pow(precision)
            .filter(|&m| m <= MAX_MODULUS)
            .ok_or(invalid)?;
        Ok(RingParams { p, precision, modulus })
    }

    /// Largest precision `N` with `p^N <= MAX_MODULUS`.
    pub fn max_precision(p: u64) -> u32 {
        let mut n = 0;
        let mut m: u64 = 1;
        while let Some(next) = m.checked_mul(p).filter(|&v| v <= MAX_MODULUS) {
            m = next;
            n += 1;
        }
        n
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        RingParams::new(self.p, precision)
    }

    pub fn reduce(&self, v: u64) -> u64 {
        v % self.modulus
    }

    pub fn reduce_i64(&self, v: i64) -> u64 {
        self.reduce_i128(v as i128)
    }

    pub fn reduce_i128(&self, v: i128) -> u64 {
        v.rem_euclid(self.modulus as i128) as u64
    }

    pub(crate) fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.modulus as u128) as u64
    }

    pub(crate) fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.modulus - (b - a)
        }
    }

    pub(crate) fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    pub(crate) fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    /// `p`-adic valuation of a residue, capped at `N`.
    pub fn valuation_of(&self, mut v: u64) -> u32 {
        v %= self.modulus;
        if v == 0 {
            return self.precision;
        }
        let mut k = 0;
        while v % self.p == 0 {
            v /= self.p;
            k += 1;
        }
        k
    }

    /// `p^k mod p^N`.
    pub fn p_pow(&self, k: u32) -> u64 {
        if k >= self.precision {
            0
        } else {
            self.p.pow(k)
        }
    }

    pub(crate) fn inverse_of(&self, a: u64) -> Result<u64> {
        if a % self.p == 0 {
            return Err(Error::NonUnit);
        }
        let (mut r0, mut r1) = (self.modulus as i128, (a % self.modulus) as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce_i128(t0))
    }

    pub(crate) fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.modulus;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
}

/// A residue modulo `p^N`, stored canonically in `[0, p^N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModularInt {
    value: u64,
    params: RingParams,
}

impl ModularInt {
    pub fn new(params: RingParams, value: u64) -> Self {
        ModularInt { value: params.reduce(value), params }
    }

    pub fn from_i64(params: RingParams, value: i64) -> Self {
        ModularInt { value: params.reduce_i64(value), params }
    }

    pub fn zero(params: RingParams) -> Self {
        ModularInt { value: 0, params }
    }

    pub fn one(params: RingParams) -> Self {
        ModularInt::new(params, 1)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn params(&self) -> RingParams {
        self.params
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn is_unit(&self) -> bool {
        self.value % self.params.p != 0
    }

    /// Largest `k <= N` with `p^k | value`; zero reports `N`.
    pub fn valuation(&self) -> u32 {
        self.params.valuation_of(self.value)
    }

    pub fn ring_arith(self, other: ModularInt, op: RingOp) -> Result<ModularInt> {
        if self.params != other.params {
            return Err(Error::ParamsMismatch);
        }
        let pr = self.params;
        let value = match op {
            RingOp::Add => pr.add(self.value, other.value),
            RingOp::Sub => pr.sub(self.value, other.value),
            RingOp::Mul => pr.mul(self.value, other.value),
        };
        Ok(ModularInt { value, params: pr })
    }

    pub fn unit_inverse(&self) -> Result<ModularInt> {
        let value = self.params.inverse_of(self.value)?;
        Ok(ModularInt { value, params: self.params })
    }

    pub fn pow(&self, e: u64) -> ModularInt {
        ModularInt { value: self.params.pow(self.value, e), params: self.params }
    }

    /// Splits a nonzero residue as `p^v * u` with `u` a unit; `None` for zero.
    pub fn unit_part(&self) -> Option<(u32, ModularInt)> {
        if self.value == 0 {
            return None;
        }
        let v = self.valuation();
        Some((v, ModularInt::new(self.params, self.value / self.params.p.pow(v))))
    }
}

impl fmt::Display for ModularInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:expr) => {
        impl $tr for ModularInt {
            type Output = ModularInt;

            /// Panics when the operands live in different rings.
            fn $method(self, rhs: ModularInt) -> ModularInt {
                self.ring_arith(rhs, $op).expect("mixed-precision arithmetic")
            }
        }
    };
}

binop!(Add, add, RingOp::Add);
binop!(Sub, sub, RingOp::Sub);
binop!(Mul, mul, RingOp::Mul);

impl Neg for ModularInt {
    type Output = ModularInt;

    fn neg(self) -> ModularInt {
        ModularInt { value: self.params.neg(self.value), params: self.params }
    }
}
