//! Explicit models of `F_{p^f}` backed by discrete-log tables.
//!
//! Elements are written in the polynomial basis `1, x, ..., x^{f-1}` over the
//! lexicographically first monic irreducible of degree `f`; the "index" of an
//! element is the base-`p` integer `c_0 + c_1 p + ... + c_{f-1} p^{f-1}` of its
//! coefficients. Multiplicative work goes through logarithms with respect to
//! the least generator in the same order, so the hot loops of every character
//! sum are table lookups.

mod cache;
mod poly;

use crate::error::{Error, Result};

pub use cache::{load_or_build, CACHE_MAGIC};

/// Largest field built unless the caller raises the bound.
pub const DEFAULT_FIELD_BOUND: u64 = 531_441; // 3^12

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime divisors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Least `f >= 1` with `p^f = 1 (mod m)`.
pub fn mult_order(p: u64, m: u64) -> Result<u32> {
    mult_order_capped(p, m, u32::MAX)
}

pub(crate) fn mult_order_capped(p: u64, m: u64, cap: u32) -> Result<u32> {
    if m < 2 {
        return Err(Error::BadModulus(m));
    }
    if num_integer::gcd(p, m) != 1 {
        return Err(Error::NotCoprime { a: p, m });
    }
    let m128 = m as u128;
    let base = (p as u128) % m128;
    let mut acc = base;
    let mut f = 1u32;
    while acc != 1 {
        if f >= cap {
            return Err(Error::OrderTooLarge { p, m, cap });
        }
        acc = acc * base % m128;
        f += 1;
    }
    Ok(f)
}

/// `p^f`, or `None` on overflow of `u64`.
pub fn checked_pow(p: u64, f: u32) -> Option<u64> {
    p.checked_pow(f)
}

/// A field element: either zero or a discrete logarithm modulo `q - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(u32::MAX);
    pub const ONE: FieldElement = FieldElement(0);

    /// The element `g^log` for the table's generator `g`. The caller keeps
    /// `log < q - 1`.
    pub const fn from_log(log: u32) -> FieldElement {
        FieldElement(log)
    }

    pub const fn is_zero(self) -> bool {
        self.0 == u32::MAX
    }

    pub const fn log(self) -> Option<u32> {
        if self.is_zero() {
            None
        } else {
            Some(self.0)
        }
    }
}

/// Immutable model of `F_q`, `q = p^f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldTable {
    p: u64,
    f: u32,
    q: u64,
    modulus: Vec<u32>,
    /// `exp[i]` is the index of `g^i`, for `0 <= i < q - 1`.
    exp: Vec<u32>,
    /// `log[n]` for index `n != 0`; `log[0]` is unused.
    log: Vec<u32>,
    /// Absolute trace of every element, by index.
    trace: Vec<u32>,
    /// Absolute trace of `g^i`, by logarithm.
    trace_by_log: Vec<u32>,
}

impl FieldTable {
    /// `F_{p^f}` with the default size bound.
    pub fn new(p: u64, f: u32) -> Result<Self> {
        build_field(p, f, DEFAULT_FIELD_BOUND)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.f
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Order of the multiplicative group.
    pub fn order(&self) -> u64 {
        self.q - 1
    }

    /// Coefficients `c_0, ..., c_f` of the defining polynomial (`c_f = 1`).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn exp_table(&self) -> &[u32] {
        &self.exp
    }

    pub fn trace_table(&self) -> &[u32] {
        &self.trace
    }

    /// Index of the fixed multiplicative generator.
    pub fn generator_index(&self) -> u32 {
        self.exp[1 % self.exp.len()]
    }

    pub fn generator(&self) -> FieldElement {
        FieldElement::from_log(1 % self.order() as u32)
    }

    pub fn from_index(&self, index: u64) -> FieldElement {
        debug_assert!(index < self.q);
        if index == 0 {
            FieldElement::ZERO
        } else {
            FieldElement(self.log[index as usize])
        }
    }

    pub fn to_index(&self, x: FieldElement) -> u64 {
        match x.log() {
            None => 0,
            Some(l) => self.exp[l as usize] as u64,
        }
    }

    /// The image of the integer `n` in the prime field.
    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_index(n.rem_euclid(self.p as i64) as u64)
    }

    /// All elements, zero first, then `g^0, g^1, ...`.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        std::iter::once(FieldElement::ZERO).chain(self.units())
    }

    /// Nonzero elements in logarithm order.
    pub fn units(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order() as u32).map(FieldElement::from_log)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match (a.log(), b.log()) {
            (Some(x), Some(y)) => FieldElement(((x as u64 + y as u64) % self.order()) as u32),
            _ => FieldElement::ZERO,
        }
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        match a.log() {
            None if e == 0 => FieldElement::ONE,
            None => FieldElement::ZERO,
            Some(x) => {
                let n = self.order() as u128;
                FieldElement(((x as u128 * e as u128) % n) as u32)
            }
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        a.log()
            .map(|x| FieldElement(((self.order() - x as u64) % self.order()) as u32))
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (mut x, mut y) = (self.to_index(a), self.to_index(b));
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.f {
            let digit = (x % self.p + y % self.p) % self.p;
            out += digit * place;
            place *= self.p;
            x /= self.p;
            y /= self.p;
        }
        self.from_index(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let mut x = self.to_index(a);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.f {
            let digit = (self.p - x % self.p) % self.p;
            out += digit * place;
            place *= self.p;
            x /= self.p;
        }
        self.from_index(out)
    }

    /// `Tr_{F_q/F_p}(x)` as an integer in `[0, p)`.
    pub fn absolute_trace(&self, x: FieldElement) -> u32 {
        match x.log() {
            None => 0,
            Some(l) => self.trace_by_log[l as usize],
        }
    }

    /// Trace of `g^log` for any `log`, reduced modulo `q - 1`.
    #[inline]
    pub fn trace_of_log(&self, log: u64) -> u32 {
        self.trace_by_log[(log % self.order()) as usize]
    }

    /// Trace indexed by logarithm; entry `i` is `Tr(g^i)`.
    pub fn trace_by_log(&self) -> &[u32] {
        &self.trace_by_log
    }

    /// Same field, same modulus, tables rebuilt around another generator
    /// given by its index.
    pub fn with_generator(&self, generator_index: u64) -> Result<FieldTable> {
        if generator_index == 0 || generator_index >= self.q {
            return Err(Error::Internal(format!(
                "{generator_index} is not a nonzero element index"
            )));
        }
        let g = poly::from_index(generator_index, self.p, self.f);
        if !poly::is_generator(&g, &self.modulus, self.p, self.q) {
            return Err(Error::Internal(format!(
                "element {generator_index} does not generate the unit group"
            )));
        }
        let exp = poly::exp_table(&g, &self.modulus, self.p, self.q);
        Ok(assemble(
            self.p,
            self.f,
            self.modulus.clone(),
            exp,
            self.trace.clone(),
        ))
    }
}

/// Build `F_{p^f}`; refuses `p^f` above `bound`.
pub fn build_field(p: u64, f: u32, bound: u64) -> Result<FieldTable> {
    let (modulus, q) = field_modulus(p, f, bound)?;
    let g = poly::least_generator(&modulus, p, q)
        .ok_or_else(|| Error::Internal(format!("no generator found for {p}^{f}")))?;
    let exp = poly::exp_table(&g, &modulus, p, q);
    let trace = poly::trace_table(&modulus, p, f, q)?;
    Ok(assemble(p, f, modulus, exp, trace))
}

/// Validated `(modulus, q)` for `F_{p^f}`.
pub(crate) fn field_modulus(p: u64, f: u32, bound: u64) -> Result<(Vec<u32>, u64)> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if f == 0 {
        return Err(Error::Internal("extension degree must be positive".into()));
    }
    let q = match checked_pow(p, f) {
        Some(q) if q <= bound && q <= u32::MAX as u64 => q,
        _ => return Err(Error::FieldTooLarge { p, f, bound }),
    };
    let modulus = poly::first_irreducible(p, f)
        .ok_or_else(|| Error::Internal(format!("no irreducible of degree {f} over F_{p}")))?;
    Ok((modulus, q))
}

pub(crate) fn assemble(
    p: u64,
    f: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    trace: Vec<u32>,
) -> FieldTable {
    let q = p.pow(f);
    let mut log = vec![0u32; q as usize];
    for (i, &e) in exp.iter().enumerate() {
        log[e as usize] = i as u32;
    }
    let trace_by_log = exp.iter().map(|&e| trace[e as usize]).collect();
    FieldTable {
        p,
        f,
        q,
        modulus,
        exp,
        log,
        trace,
        trace_by_log,
    }
}
