//! Base-`p` digit sums and Kubert's `V` function.
//!
//! For `y` an integer and `N = p^f - 1`:
//!
//! * [`digit_sum_lower`] is the digit sum of the representative of `y mod N`
//!   in `[0, N - 1]`,
//! * [`digit_sum_upper`] uses the representative in `[1, N]`,
//! * [`digit_sum_abs`] is the plain digit sum of a nonnegative integer.
//!
//! `V(y / N) = [y]_{p,f,-} / (f (p - 1))`, and `V_RL` is the same with the
//! upper representative, so that `V_RL(0) = 1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_field::mult_order_capped;

/// Largest extension degree `kubert_v` will search for. Every denominator
/// up to 200 fits for `p <= 11`.
pub const MAX_DEGREE: u32 = 256;

/// An element of `Q/Z`, stored as `num / den` with `0 <= num < den` and
/// `gcd(num, den) = 1` (zero is `0/1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FractionModZ {
    num: u64,
    den: u64,
}

impl FractionModZ {
    pub const ZERO: FractionModZ = FractionModZ { num: 0, den: 1 };

    /// `num / den` reduced modulo 1. Panics if `den == 0`.
    pub fn new(num: i128, den: u64) -> FractionModZ {
        assert!(den > 0, "zero denominator");
        let r = num.rem_euclid(den as i128) as u64;
        let g = r.gcd(&den);
        if r == 0 {
            FractionModZ::ZERO
        } else {
            FractionModZ {
                num: r / g,
                den: den / g,
            }
        }
    }

    pub fn half() -> FractionModZ {
        FractionModZ::new(1, 2)
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// Numerator over the given denominator, if `den` divides it.
    pub fn scaled_to(self, den: u64) -> Option<u64> {
        den.is_multiple_of(self.den)
            .then(|| self.num * (den / self.den))
    }
}

impl Add for FractionModZ {
    type Output = FractionModZ;
    fn add(self, rhs: FractionModZ) -> FractionModZ {
        let l = self.den.lcm(&rhs.den);
        let a = self.num as i128 * (l / self.den) as i128;
        let b = rhs.num as i128 * (l / rhs.den) as i128;
        FractionModZ::new(a + b, l)
    }
}

impl Neg for FractionModZ {
    type Output = FractionModZ;
    fn neg(self) -> FractionModZ {
        FractionModZ::new(-(self.num as i128), self.den)
    }
}

impl Sub for FractionModZ {
    type Output = FractionModZ;
    fn sub(self, rhs: FractionModZ) -> FractionModZ {
        self + (-rhs)
    }
}

impl Mul<FractionModZ> for i64 {
    type Output = FractionModZ;
    fn mul(self, rhs: FractionModZ) -> FractionModZ {
        FractionModZ::new(self as i128 * rhs.num as i128, rhs.den)
    }
}

impl fmt::Display for FractionModZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Which digit-sum convention to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DigitSumKind {
    /// `[y]_{p,f,-}`: representative in `[0, p^f - 2]`.
    Lower,
    /// `[y]_{p,f}`: representative in `[1, p^f - 1]`.
    Upper,
    /// `[x]_p`: plain digit sum, `f` ignored.
    Absolute,
}

impl DigitSumKind {
    pub fn eval(self, y: i128, p: u64, f: u32) -> u32 {
        match self {
            DigitSumKind::Lower => digit_sum_lower(y, p, f),
            DigitSumKind::Upper => digit_sum_upper(y, p, f),
            DigitSumKind::Absolute => {
                assert!(y >= 0, "absolute digit sum of a negative integer");
                digit_sum_abs(y as u128, p)
            }
        }
    }
}

/// Plain base-`p` digit sum.
pub fn digit_sum_abs(mut x: u128, p: u64) -> u32 {
    if x <= u64::MAX as u128 {
        return digit_sum_u64(x as u64, p);
    }
    let p = p as u128;
    let mut s = 0u32;
    while x > 0 {
        s += (x % p) as u32;
        x /= p;
    }
    s
}

#[inline]
pub fn digit_sum_u64(mut x: u64, p: u64) -> u32 {
    let mut s = 0u32;
    while x > 0 {
        s += (x % p) as u32;
        x /= p;
    }
    s
}

fn modulus_i128(p: u64, f: u32) -> i128 {
    let q = (p as u128)
        .checked_pow(f)
        .filter(|&q| q <= i128::MAX as u128)
        .unwrap_or_else(|| panic!("{p}^{f} does not fit in 127 bits"));
    q as i128 - 1
}

pub fn digit_sum_lower(y: i128, p: u64, f: u32) -> u32 {
    let n = modulus_i128(p, f);
    digit_sum_abs(y.rem_euclid(n) as u128, p)
}

pub fn digit_sum_upper(y: i128, p: u64, f: u32) -> u32 {
    let n = modulus_i128(p, f);
    let r = y.rem_euclid(n);
    digit_sum_abs(if r == 0 { n } else { r } as u128, p)
}

fn big_digit_sum(x: &BigUint, p: u64) -> u64 {
    if p <= 256 {
        return x.to_radix_le(p as u32).iter().map(|&d| d as u64).sum();
    }
    let mut x = x.clone();
    let p = BigUint::from(p);
    let mut s = 0u64;
    while !x.is_zero() {
        let (q, r) = x.div_rem(&p);
        s += r.to_u64().unwrap();
        x = q;
    }
    s
}

/// Minimal `f` with `den | p^f - 1`.
pub fn minimal_degree(x: FractionModZ, p: u64) -> Result<u32> {
    if x.den.is_multiple_of(p) {
        return Err(Error::DenominatorNotPrimeToP { den: x.den, p });
    }
    if x.den == 1 {
        return Ok(1);
    }
    mult_order_capped(p, x.den, MAX_DEGREE)
}

/// `V(x)` computed in `F_{p^f}`; `f` must satisfy `den | p^f - 1`.
pub fn kubert_v_with_degree(x: FractionModZ, p: u64, f: u32) -> Result<Rational64> {
    if x.den.is_multiple_of(p) {
        return Err(Error::DenominatorNotPrimeToP { den: x.den, p });
    }
    let n = BigUint::from(p).pow(f) - 1u32;
    let (cofactor, r) = n.div_rem(&BigUint::from(x.den));
    if !r.is_zero() {
        return Err(Error::Internal(format!(
            "{} does not divide {p}^{f} - 1",
            x.den
        )));
    }
    let y = cofactor * x.num;
    let digits = big_digit_sum(&y, p);
    Ok(Rational64::new(digits as i64, f as i64 * (p as i64 - 1)))
}

/// Kubert's `V`, with values in `[0, 1)`.
pub fn kubert_v(x: FractionModZ, p: u64) -> Result<Rational64> {
    let f = minimal_degree(x, p)?;
    kubert_v_with_degree(x, p, f)
}

/// `V_RL`: equal to `V` away from zero and to 1 at zero.
pub fn kubert_v_rl(x: FractionModZ, p: u64) -> Result<Rational64> {
    if x.is_zero() {
        if p < 2 {
            return Err(Error::NotPrime(p));
        }
        return Ok(Rational64::from_integer(1));
    }
    kubert_v(x, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational64 {
        Rational64::new(a, b)
    }

    // independent base-p expansion, most significant digit first
    fn expansion(mut x: u64, p: u64) -> Vec<u64> {
        let mut d = Vec::new();
        while x > 0 {
            d.push(x % p);
            x /= p;
        }
        d.reverse();
        d
    }

    #[test]
    fn lower_examples() {
        assert_eq!(digit_sum_lower(0, 3, 2), 0);
        assert_eq!(expansion(11, 3), vec![1, 0, 2]);
        assert_eq!(digit_sum_lower(11, 3, 4), 3);
        assert_eq!(expansion(7, 3), vec![2, 1]);
        assert_eq!(digit_sum_lower(-1, 3, 2), 3);
    }

    #[test]
    fn upper_examples() {
        assert_eq!(digit_sum_upper(0, 3, 2), 4);
        assert_eq!(digit_sum_upper(11, 3, 4), 3);
        assert_eq!(digit_sum_upper(5, 2, 2), 1);
        // [5]_{2,2} / (f(p-1)) = V_RL(5/3) = V_RL(2/3)
        assert_eq!(
            Rational64::new(digit_sum_upper(5, 2, 2) as i64, 2),
            kubert_v_rl(FractionModZ::new(2, 3), 2).unwrap()
        );
    }

    #[test]
    fn abs_examples() {
        assert_eq!(digit_sum_abs(0, 3), 0);
        assert_eq!(expansion(23, 3), vec![2, 1, 2]);
        assert_eq!(digit_sum_abs(23, 3), 5);
        assert_eq!(expansion(40, 3), vec![1, 1, 1, 1]);
        assert_eq!(digit_sum_abs(40, 3), 4);
        assert_eq!(digit_sum_abs(u128::MAX, 2), 128);
    }

    #[test]
    fn kind_dispatch() {
        assert_eq!(DigitSumKind::Lower.eval(0, 3, 2), 0);
        assert_eq!(DigitSumKind::Upper.eval(0, 3, 2), 4);
        assert_eq!(DigitSumKind::Absolute.eval(40, 3, 99), 4);
    }

    #[test]
    fn kubert_examples() {
        assert_eq!(kubert_v(FractionModZ::ZERO, 3).unwrap(), r(0, 1));
        assert_eq!(kubert_v(FractionModZ::ZERO, 7).unwrap(), r(0, 1));
        assert_eq!(kubert_v(FractionModZ::half(), 3).unwrap(), r(1, 2));
        let x = FractionModZ::new(1, 22);
        assert_eq!(minimal_degree(x, 3).unwrap(), 5);
        assert_eq!(kubert_v(x, 3).unwrap(), r(3, 10));
        // average of <3^i / 22>, i = 0..4: (1 + 3 + 9 + 5 + 15) / 22 / 5
        assert_eq!(r(1 + 3 + 9 + 5 + 15, 22 * 5), r(3, 10));
    }

    #[test]
    fn v_rl_examples() {
        assert_eq!(kubert_v_rl(FractionModZ::ZERO, 3).unwrap(), r(1, 1));
        assert_eq!(kubert_v_rl(FractionModZ::half(), 3).unwrap(), r(1, 2));
        let x = FractionModZ::new(5, 13);
        assert_eq!(kubert_v_rl(x, 3).unwrap(), kubert_v(x, 3).unwrap());
    }

    #[test]
    fn rejects_denominator_divisible_by_p() {
        assert!(matches!(
            kubert_v(FractionModZ::new(1, 6), 3),
            Err(Error::DenominatorNotPrimeToP { den: 6, p: 3 })
        ));
        assert!(kubert_v_rl(FractionModZ::new(1, 5), 5).is_err());
    }

    #[test]
    fn degree_cap() {
        // order of 2 mod 269 is 268
        assert!(matches!(
            kubert_v(FractionModZ::new(1, 269), 2),
            Err(Error::OrderTooLarge { .. })
        ));
    }

    #[test]
    fn fraction_arithmetic_is_canonical() {
        let a = FractionModZ::new(3, 4);
        let b = FractionModZ::new(-1, 4);
        assert_eq!(a, b);
        assert_eq!(a + FractionModZ::new(1, 4), FractionModZ::ZERO);
        assert_eq!(FractionModZ::new(2, 4), FractionModZ::half());
        assert_eq!(-FractionModZ::new(1, 3), FractionModZ::new(2, 3));
        assert_eq!(4 * FractionModZ::new(1, 6), FractionModZ::new(2, 3));
        assert_eq!(FractionModZ::new(6, 3), FractionModZ::ZERO);
        assert_eq!(FractionModZ::ZERO.den(), 1);
        assert_eq!(FractionModZ::new(1, 3).scaled_to(26), None);
        assert_eq!(FractionModZ::new(1, 2).scaled_to(26), Some(13));
        assert_eq!(FractionModZ::new(5, 7).to_string(), "5/7");
    }
}
