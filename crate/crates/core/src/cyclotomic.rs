//! Exact arithmetic in `Z[zeta_m]`.
//!
//! Values are kept as coefficient vectors in `Z[x]/(x^m - 1)`; equality and
//! extraction reduce modulo the cyclotomic polynomial `Phi_m`, whose first
//! `phi(m)` powers form a `Z`-basis of `Z[zeta_m]`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::finite_field::is_prime;

/// `Phi_m` as integer coefficients, lowest degree first, from
/// `x^m - 1 = prod_{d | m} Phi_d`.
pub fn cyclotomic_polynomial(m: u32) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(&m) {
        return hit.clone();
    }
    assert!(m > 0, "Phi_0 is undefined");
    let mut num = vec![BigInt::zero(); m as usize + 1];
    num[0] = BigInt::from(-1);
    num[m as usize] = BigInt::one();
    for d in (1..m).filter(|d| m.is_multiple_of(*d)) {
        num = exact_divide(&num, &cyclotomic_polynomial(d));
    }
    let phi = Arc::new(num);
    cache.lock().unwrap().insert(m, phi.clone());
    phi
}

/// Quotient of polynomial division by a monic divisor known to divide.
fn exact_divide(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let mut quot = vec![BigInt::zero(); a.len() - db];
    for i in (0..quot.len()).rev() {
        let c = rem[i + db].clone();
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                rem[i + j] -= &c * bj;
            }
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

/// Euler's totient.
pub fn totient(m: u32) -> u32 {
    (1..=m).filter(|&k| k.gcd(&m) == 1).count() as u32
}

/// An element of `Z[zeta_m]`.
#[derive(Clone, Debug)]
pub struct CycInt {
    m: u32,
    coeffs: Vec<BigInt>,
}

impl CycInt {
    pub fn zero(m: u32) -> CycInt {
        assert!(m > 0);
        CycInt {
            m,
            coeffs: vec![BigInt::zero(); m as usize],
        }
    }

    pub fn from_int(m: u32, n: impl Into<BigInt>) -> CycInt {
        let mut out = CycInt::zero(m);
        out.coeffs[0] = n.into();
        out
    }

    pub fn one(m: u32) -> CycInt {
        CycInt::from_int(m, 1)
    }

    /// `zeta_m^k`, `k` taken modulo `m`.
    pub fn zeta_pow(m: u32, k: i64) -> CycInt {
        let mut out = CycInt::zero(m);
        out.coeffs[k.rem_euclid(m as i64) as usize] = BigInt::one();
        out
    }

    /// `sum_i coeffs[i] zeta_m^i`; indices wrap modulo `m`.
    pub fn from_coeffs<T: Into<BigInt>>(m: u32, coeffs: impl IntoIterator<Item = T>) -> CycInt {
        let mut out = CycInt::zero(m);
        for (i, c) in coeffs.into_iter().enumerate() {
            out.coeffs[i % m as usize] += c.into();
        }
        out
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// The same element viewed in `Z[zeta_n]`, `m | n`.
    pub fn lift(&self, n: u32) -> CycInt {
        assert_eq!(
            n % self.m,
            0,
            "cannot lift Z[zeta_{}] into Z[zeta_{n}]",
            self.m
        );
        let step = (n / self.m) as usize;
        let mut out = CycInt::zero(n);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[i * step] = c.clone();
        }
        out
    }

    fn common(a: &CycInt, b: &CycInt) -> (CycInt, CycInt) {
        if a.m == b.m {
            (a.clone(), b.clone())
        } else {
            let l = a.m.lcm(&b.m);
            (a.lift(l), b.lift(l))
        }
    }

    /// Canonical representative of degree `< phi(m)`.
    pub fn reduce(&self) -> CycInt {
        let phi = cyclotomic_polynomial(self.m);
        let d = phi.len() - 1;
        let mut c = self.coeffs.clone();
        for i in (d..c.len()).rev() {
            let lead = std::mem::take(&mut c[i]);
            if lead.is_zero() {
                continue;
            }
            for (j, pj) in phi[..d].iter().enumerate() {
                c[i - d + j] -= &lead * pj;
            }
        }
        CycInt {
            m: self.m,
            coeffs: c,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.reduce().coeffs.iter().all(Zero::is_zero)
    }

    /// `zeta -> zeta^{-1}`.
    pub fn conjugate(&self) -> CycInt {
        self.galois(-1)
    }

    /// The automorphism `zeta -> zeta^a`, `gcd(a, m) = 1`.
    pub fn galois(&self, a: i64) -> CycInt {
        let m = self.m as i64;
        assert_eq!(a.rem_euclid(m).gcd(&m), 1, "{a} is not a unit modulo {m}");
        let mut out = CycInt::zero(self.m);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[(i as i64 * a).rem_euclid(m) as usize] += c;
        }
        out
    }

    /// `Some(n)` when the element is the rational integer `n`.
    pub fn as_rational_integer(&self) -> Option<BigInt> {
        let r = self.reduce();
        r.coeffs[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| r.coeffs[0].clone())
    }

    pub fn scale(&self, k: &BigInt) -> CycInt {
        CycInt {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Exact division by a rational integer; `None` unless every reduced
    /// coefficient is divisible.
    pub fn div_exact(&self, k: &BigInt) -> Option<CycInt> {
        let r = self.reduce();
        let mut coeffs = Vec::with_capacity(r.coeffs.len());
        for c in &r.coeffs {
            let (q, rem) = c.div_rem(k);
            if !rem.is_zero() {
                return None;
            }
            coeffs.push(q);
        }
        Some(CycInt { m: self.m, coeffs })
    }

    pub fn pow(&self, mut e: u32) -> CycInt {
        let mut result = CycInt::one(self.m);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        result
    }
}

impl PartialEq for CycInt {
    fn eq(&self, other: &CycInt) -> bool {
        let (a, b) = CycInt::common(self, other);
        (&a - &b).is_zero()
    }
}

impl Eq for CycInt {}

impl Add for &CycInt {
    type Output = CycInt;
    fn add(self, rhs: &CycInt) -> CycInt {
        let (mut a, b) = CycInt::common(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x += y;
        }
        a
    }
}

impl Sub for &CycInt {
    type Output = CycInt;
    fn sub(self, rhs: &CycInt) -> CycInt {
        let (mut a, b) = CycInt::common(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x -= y;
        }
        a
    }
}

impl Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        CycInt {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &CycInt {
    type Output = CycInt;
    fn mul(self, rhs: &CycInt) -> CycInt {
        let (a, b) = CycInt::common(self, rhs);
        let m = a.m as usize;
        let mut out = CycInt::zero(a.m);
        let nz: Vec<(usize, &BigInt)> = b
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for &(j, y) in &nz {
                out.coeffs[(i + j) % m] += x * y;
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for CycInt {
            type Output = CycInt;
            fn $method(self, rhs: CycInt) -> CycInt {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        -&self
    }
}

impl fmt::Display for CycInt {
    /// Reduced form, e.g. `-1 - 2*z3^1` for `m = 3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.reduce();
        let mut first = true;
        for (i, c) in r.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ if mag.is_one() => write!(f, "z{}^{i}", self.m)?,
                _ => write!(f, "{mag}*z{}^{i}", self.m)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Legendre symbol `(n / p)` for an odd prime `p`.
pub fn legendre(n: i64, p: u64) -> i8 {
    let a = n.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    let mut result = 1u64;
    let mut base = a;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            result = (result as u128 * base as u128 % p as u128) as u64;
        }
        base = (base as u128 * base as u128 % p as u128) as u64;
        e >>= 1;
    }
    if result == 1 {
        1
    } else {
        -1
    }
}

/// Quadratic Gauss sum over `F_p`, `sum_t (t/p) zeta_p^t`.
pub fn quadratic_gauss_sum(p: u64) -> CycInt {
    CycInt::from_coeffs(p as u32, (0..p).map(|t| legendre(t as i64, p) as i64))
}

/// The half-Tate-twist constant `alpha = -chi_2((-1)^delta D) g(psi, chi_2)`
/// for `D = 2 delta + 1`, an element of `Z[zeta_p]` with
/// `alpha^2 = chi_2(-1) p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alpha {
    p: u64,
    sign: i8,
    value: CycInt,
}

impl Alpha {
    pub fn for_system(p: u64, d: u64) -> Result<Alpha> {
        if p == 2 || !is_prime(p) {
            return Err(Error::AlphaUndefined(format!(
                "p = {p} is not an odd prime"
            )));
        }
        if d.is_multiple_of(2) {
            return Err(Error::AlphaUndefined(format!("D = {d} is even")));
        }
        let delta = (d - 1) / 2;
        let arg = if delta.is_multiple_of(2) {
            d as i64
        } else {
            -(d as i64)
        };
        let chi = legendre(arg, p);
        if chi == 0 {
            return Err(Error::AlphaUndefined(format!("p = {p} divides D = {d}")));
        }
        let sign = -chi;
        let value = quadratic_gauss_sum(p).scale(&BigInt::from(sign));
        Ok(Alpha { p, sign, value })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `+1` when `alpha = g(psi, chi_2)`, `-1` when `alpha = -g`.
    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn value(&self) -> &CycInt {
        &self.value
    }

    /// `alpha^2 = chi_2(-1) p` as an integer.
    pub fn square(&self) -> BigInt {
        BigInt::from(legendre(-1, self.p) as i64 * self.p as i64)
    }
}

/// `a / alpha^k` when it lies in `Z[zeta_p]`.
///
/// Odd powers are handled as `a alpha / alpha^{k+1}`, so every division is by
/// a rational power of `alpha^2`.
pub fn divide_by_alpha_power(a: &CycInt, alpha: &Alpha, k: u32) -> Result<CycInt> {
    assert_eq!(a.order() as u64, alpha.p, "dividend must live in Z[zeta_p]");
    let (numer, e) = if k % 2 == 1 {
        (a * &alpha.value, k.div_ceil(2))
    } else {
        (a.clone(), k / 2)
    };
    let divisor = num_traits::pow(alpha.square(), e as usize);
    numer.div_exact(&divisor).ok_or(Error::NotDivisible { k })
}
