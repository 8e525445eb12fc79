//! Exact arithmetic in Z[1/m]: numbers of the form `num / m^exp`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::bytes::{self, Reader};

/// An element of Z[1/m], stored in the reduced form `num * m^(-exp)`.
///
/// Invariant: `exp == 0` or `m` does not divide `num`; zero is stored with
/// `exp == 0`. All arithmetic keeps the form reduced, so derived equality
/// and hashing agree with equality of rational values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MAdic {
    base: u32,
    num: BigInt,
    exp: u32,
}

impl MAdic {
    pub fn new(base: u32, num: BigInt, exp: u32) -> Self {
        assert!(base >= 2, "base must be at least 2");
        let mut v = MAdic { base, num, exp };
        v.reduce();
        v
    }

    pub fn zero(base: u32) -> Self {
        MAdic {
            base,
            num: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn from_int(base: u32, n: impl Into<BigInt>) -> Self {
        MAdic {
            base,
            num: n.into(),
            exp: 0,
        }
    }

    /// Builds `j * base^(-exp)` (not necessarily reduced on input).
    pub fn from_scaled(base: u32, j: impl Into<BigInt>, exp: u32) -> Self {
        MAdic::new(base, j.into(), exp)
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let b = BigInt::from(self.base);
        while self.exp > 0 {
            let (q, r) = self.num.div_rem(&b);
            if r.is_zero() {
                self.num = q;
                self.exp -= 1;
            } else {
                break;
            }
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    /// The exponent `e` of the reduced form `num * base^(-e)`.
    pub fn denom_exp(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.exp == 0
    }

    /// m-adic valuation: the largest `v` with `x * m^(-v)` still in Z[1/m]
    /// scaled integrally, i.e. multiplicity of `m` in `x`. `None` for zero.
    /// Negative exactly when the reduced form has a denominator.
    pub fn valuation(&self) -> Option<i64> {
        if self.num.is_zero() {
            return None;
        }
        if self.exp > 0 {
            return Some(-(self.exp as i64));
        }
        let b = BigInt::from(self.base);
        let mut v = 0i64;
        let mut n = self.num.clone();
        loop {
            let (q, r) = n.div_rem(&b);
            if r.is_zero() {
                v += 1;
                n = q;
            } else {
                return Some(v);
            }
        }
    }

    pub fn neg(&self) -> Self {
        MAdic {
            base: self.base,
            num: -&self.num,
            exp: self.exp,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.base, other.base, "mixed bases");
        let e = self.exp.max(other.exp);
        let b = BigInt::from(self.base);
        let num = &self.num * b.pow(e - self.exp) + &other.num * b.pow(e - other.exp);
        MAdic::new(self.base, num, e)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.base, other.base, "mixed bases");
        MAdic::new(self.base, &self.num * &other.num, self.exp + other.exp)
    }

    /// Multiplies by `base^k` (k may be negative).
    pub fn scale_pow(&self, k: i64) -> Self {
        if self.num.is_zero() {
            return self.clone();
        }
        let b = BigInt::from(self.base);
        if k >= 0 {
            let k = k as u32;
            if self.exp >= k {
                // stays reduced: numerator untouched
                MAdic {
                    base: self.base,
                    num: self.num.clone(),
                    exp: self.exp - k,
                }
            } else {
                MAdic {
                    base: self.base,
                    num: &self.num * b.pow(k - self.exp),
                    exp: 0,
                }
            }
        } else if self.exp > 0 {
            // already reduced means base does not divide num
            MAdic {
                base: self.base,
                num: self.num.clone(),
                exp: self.exp + (-k) as u32,
            }
        } else {
            MAdic::new(self.base, self.num.clone(), (-k) as u32)
        }
    }

    pub fn floor(&self) -> BigInt {
        let b = BigInt::from(self.base);
        self.num.div_floor(&b.pow(self.exp))
    }

    /// Fractional part in [0, 1): `x - floor(x)`.
    pub fn mod_one(&self) -> Self {
        self.sub(&MAdic::from_int(self.base, self.floor()))
    }

    pub fn cmp_value(&self, other: &Self) -> Ordering {
        assert_eq!(self.base, other.base, "mixed bases");
        let e = self.exp.max(other.exp);
        let b = BigInt::from(self.base);
        let l = &self.num * b.pow(e - self.exp);
        let r = &other.num * b.pow(e - other.exp);
        l.cmp(&r)
    }

    /// Compares |self| with `c * base^k` for `c >= 0`, `k >= 0`.
    pub fn abs_cmp_scaled(&self, c: impl Into<BigInt>, k: u32) -> Ordering {
        let b = BigInt::from(self.base);
        self.num.abs().cmp(&(c.into() * b.pow(k + self.exp)))
    }

    pub fn to_f64(&self) -> f64 {
        let b = (self.base as f64).powi(self.exp as i32);
        self.num.to_f64().map(|n| n / b).unwrap_or(f64::NAN)
    }

    pub fn encode(&self, out: &mut Vec<u8>) {
        bytes::put_varint(out, self.base as u64);
        bytes::put_bigint(out, &self.num);
        bytes::put_varint(out, self.exp as u64);
    }

    pub fn decode(r: &mut Reader) -> Result<Self, bytes::Truncated> {
        let base = r.varint()? as u32;
        if base < 2 {
            return Err(bytes::Truncated);
        }
        let num = r.bigint()?;
        let exp = r.varint()? as u32;
        Ok(MAdic::new(base, num, exp))
    }
}

impl std::fmt::Display for MAdic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}^{}", self.num, self.base, self.exp)
        }
    }
}
