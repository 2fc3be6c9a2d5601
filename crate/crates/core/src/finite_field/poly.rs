//! Dense polynomials over `F_p` used only while building tables.

use super::prime_factors;
use crate::error::{Error, Result};

type Poly = Vec<u64>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

pub(super) fn from_index(mut n: u64, p: u64, f: u32) -> Poly {
    let mut out = Vec::with_capacity(f as usize);
    for _ in 0..f {
        out.push(n % p);
        n /= p;
    }
    trim(out)
}

fn to_index(a: &[u64], p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Remainder of `a` modulo the monic `m`.
fn rem(mut a: Poly, m: &[u64], p: u64) -> Poly {
    let dm = m.len() - 1;
    while a.len() > dm {
        let lead = a.pop().unwrap();
        if lead != 0 {
            let shift = a.len() - dm;
            for (i, &c) in m[..dm].iter().enumerate() {
                let t = &mut a[shift + i];
                *t = (*t + (p - lead) * c % p) % p;
            }
        }
    }
    trim(a)
}

/// Remainder modulo a non-monic polynomial, for gcd computations.
fn rem_general(a: Poly, b: &[u64], p: u64) -> Poly {
    let lead_inv = inv_mod(*b.last().unwrap(), p);
    let monic: Poly = b.iter().map(|&c| c * lead_inv % p).collect();
    rem(a, &monic, p)
}

fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Poly {
    rem(mul(a, b, p), m, p)
}

fn powmod(a: &[u64], mut e: u64, m: &[u64], p: u64) -> Poly {
    let mut result = rem(vec![1], m, p);
    let mut base = rem(a.to_vec(), m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = mulmod(&result, &base, m, p);
        }
        base = mulmod(&base, &base, m, p);
        e >>= 1;
    }
    result
}

fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

fn gcd(mut a: Poly, mut b: Poly, p: u64) -> Poly {
    while !b.is_empty() {
        let r = rem_general(a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// `x^{p^k} mod m`.
fn frobenius_power_of_x(k: u32, m: &[u64], p: u64) -> Poly {
    let mut h = rem(vec![0, 1], m, p);
    for _ in 0..k {
        h = powmod(&h, p, m, p);
    }
    h
}

/// Rabin's test: `x^{p^f} = x (mod m)` and `gcd(x^{p^{f/r}} - x, m) = 1` for
/// every prime `r | f`.
fn is_irreducible(m: &[u64], p: u64) -> bool {
    let f = (m.len() - 1) as u32;
    let x = rem(vec![0, 1], m, p);
    if frobenius_power_of_x(f, m, p) != x {
        return false;
    }
    prime_factors(f as u64).into_iter().all(|r| {
        let h = sub(&frobenius_power_of_x(f / r as u32, m, p), &x, p);
        gcd(m.to_vec(), h, p).len() == 1
    })
}

/// First monic irreducible of degree `f`, scanning the lower coefficients as
/// the base-`p` integer `c_0 + c_1 p + ...` in increasing order.
pub(super) fn first_irreducible(p: u64, f: u32) -> Option<Vec<u32>> {
    let span = p.checked_pow(f)?;
    (0..span).find_map(|n| {
        let mut m: Poly = (0..f).map(|i| (n / p.pow(i)) % p).collect();
        m.push(1);
        is_irreducible(&m, p).then(|| m.iter().map(|&c| c as u32).collect())
    })
}

fn widen(modulus: &[u32]) -> Poly {
    modulus.iter().map(|&c| c as u64).collect()
}

pub(super) fn is_generator(g: &[u64], modulus: &[u32], p: u64, q: u64) -> bool {
    let m = widen(modulus);
    if g.is_empty() {
        return false;
    }
    let one = rem(vec![1], &m, p);
    let n = q - 1;
    prime_factors(n)
        .into_iter()
        .all(|r| powmod(g, n / r, &m, p) != one)
        && (n == 1 || powmod(g, n, &m, p) == one)
}

/// Least element index whose class generates the unit group.
pub(super) fn least_generator(modulus: &[u32], p: u64, q: u64) -> Option<Poly> {
    let f = (modulus.len() - 1) as u32;
    (1..q)
        .map(|n| from_index(n, p, f))
        .find(|g| is_generator(g, modulus, p, q))
}

pub(super) fn exp_table(g: &[u64], modulus: &[u32], p: u64, q: u64) -> Vec<u32> {
    let m = widen(modulus);
    let mut out = Vec::with_capacity((q - 1) as usize);
    let mut acc: Poly = rem(vec![1], &m, p);
    for _ in 0..q - 1 {
        out.push(to_index(&acc, p) as u32);
        acc = mulmod(&acc, g, &m, p);
    }
    out
}

/// Absolute trace of every element, by index, via linearity over the basis
/// `x^j`.
pub(super) fn trace_table(modulus: &[u32], p: u64, f: u32, q: u64) -> Result<Vec<u32>> {
    let m = widen(modulus);
    let mut basis = Vec::with_capacity(f as usize);
    for j in 0..f {
        let xj = rem(from_index(p.pow(j), p, f), &m, p);
        let mut acc: Poly = Vec::new();
        let mut y = xj;
        for _ in 0..f {
            acc = sub(&acc, &sub(&[], &y, p), p);
            y = powmod(&y, p, &m, p);
        }
        if acc.len() > 1 {
            return Err(Error::Internal(format!(
                "trace of x^{j} is not a constant in F_{p}^{f}"
            )));
        }
        basis.push(acc.first().copied().unwrap_or(0));
    }
    Ok((0..q)
        .map(|n| {
            let mut n = n;
            let mut t = 0u64;
            for &b in &basis {
                t = (t + (n % p) * b) % p;
                n /= p;
            }
            t as u32
        })
        .collect())
}
