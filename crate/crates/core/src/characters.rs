//! Additive and multiplicative characters, Gauss sums and their valuations.
//!
//! `psi_K(x) = zeta_p^{Tr(x)}`. A multiplicative character is indexed by
//! `j mod q - 1` and sends the table generator `g` to `zeta_{q-1}^j`. Gauss
//! sums therefore live in `Z[zeta_{p(q-1)}]`.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycInt;
use crate::digits::{kubert_v, FractionModZ};
use crate::finite_field::{FieldElement, FieldTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultChar {
    j: u64,
    order: u64,
}

impl MultChar {
    /// The character `g -> zeta_{q-1}^j` of `K^x`.
    pub fn new(k: &FieldTable, j: i64) -> MultChar {
        let order = k.order();
        MultChar {
            j: j.rem_euclid(order as i64) as u64,
            order,
        }
    }

    pub fn trivial(k: &FieldTable) -> MultChar {
        MultChar::new(k, 0)
    }

    /// The quadratic character; `q` must be odd.
    pub fn quadratic(k: &FieldTable) -> MultChar {
        assert!(k.q() % 2 == 1, "no quadratic character in characteristic 2");
        MultChar::new(k, (k.order() / 2) as i64)
    }

    /// All `q - 1` characters, by index.
    pub fn all(k: &FieldTable) -> impl Iterator<Item = MultChar> + '_ {
        (0..k.order() as i64).map(move |j| MultChar::new(k, j))
    }

    pub fn index(self) -> u64 {
        self.j
    }

    pub fn is_trivial(self) -> bool {
        self.j == 0
    }

    pub fn conjugate(self) -> MultChar {
        MultChar {
            j: (self.order - self.j) % self.order,
            order: self.order,
        }
    }

    pub fn pow(self, e: i64) -> MultChar {
        let n = self.order as i128;
        MultChar {
            j: ((self.j as i128 * e as i128).rem_euclid(n)) as u64,
            order: self.order,
        }
    }

    /// Exponent `e` with `rho(x) = zeta_{q-1}^e`; `None` at `x = 0`.
    pub fn exponent_at(self, x: FieldElement) -> Option<u64> {
        x.log()
            .map(|l| (self.j as u128 * l as u128 % self.order as u128) as u64)
    }

    /// `rho(x)` in `Z[zeta_{q-1}]`, with `rho(0) = 0`.
    pub fn eval(self, x: FieldElement) -> CycInt {
        let m = self.order as u32;
        match self.exponent_at(x) {
            None => CycInt::zero(m),
            Some(e) => CycInt::zeta_pow(m, e as i64),
        }
    }

    /// Composition with the norm from the degree-`k` extension: the index
    /// scales by `(q^k - 1)/(q - 1)` when both tables use compatible
    /// generators.
    pub fn lift_index(self, extension_order: u64) -> u64 {
        assert_eq!(extension_order % self.order, 0);
        self.j * (extension_order / self.order)
    }
}

impl std::ops::Mul for MultChar {
    type Output = MultChar;

    fn mul(self, other: MultChar) -> MultChar {
        assert_eq!(self.order, other.order);
        MultChar {
            j: (self.j + other.j) % self.order,
            order: self.order,
        }
    }
}

/// `psi_K(x) = zeta_p^{Tr(x)}`.
pub fn additive_char(k: &FieldTable, x: FieldElement) -> CycInt {
    CycInt::zeta_pow(k.p() as u32, k.absolute_trace(x) as i64)
}

/// `g(psi_K, rho) = sum_{t != 0} psi_K(t) rho(t)` in `Z[zeta_{p(q-1)}]`.
pub fn gauss_sum(k: &FieldTable, rho: MultChar) -> CycInt {
    let n = k.order();
    let m = k.p() * n;
    let mut counts = vec![0i64; m as usize];
    for t in k.units() {
        let e = k.p() * rho.exponent_at(t).unwrap() + n * k.absolute_trace(t) as u64;
        counts[(e % m) as usize] += 1;
    }
    CycInt::from_coeffs(m as u32, counts)
}

/// `rho(-1) = +-1`.
pub fn sign_at_minus_one(k: &FieldTable, rho: MultChar) -> i64 {
    let e = rho.exponent_at(k.from_int(-1)).unwrap();
    if e == 0 {
        1
    } else {
        debug_assert_eq!(2 * e, k.order());
        -1
    }
}

/// `ord_q` of `g(psi_K, rho)`, via `rho = Teich^{-y(q-1)}` with
/// `y = -j/(q-1)` and Stickelberger.
pub fn gauss_valuation(k: &FieldTable, rho: MultChar) -> Rational64 {
    let y = FractionModZ::new(-(rho.index() as i128), k.order());
    kubert_v(y, k.p()).expect("denominator q - 1 is prime to p")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn additive_character_values() {
        let k = FieldTable::new(3, 1).unwrap();
        assert_eq!(additive_char(&k, FieldElement::ZERO), CycInt::one(3));
        let s = &additive_char(&k, k.from_int(1)) + &additive_char(&k, k.from_int(2));
        assert_eq!(s, CycInt::from_int(3, -1));
        for (p, f) in [(3, 2), (5, 2), (3, 4)] {
            let k = FieldTable::new(p, f).unwrap();
            let total = k.elements().fold(CycInt::zero(p as u32), |acc, x| {
                &acc + &additive_char(&k, x)
            });
            assert!(total.is_zero());
        }
    }

    #[test]
    fn additive_character_is_a_homomorphism() {
        let k = FieldTable::new(3, 3).unwrap();
        for x in k.elements() {
            for y in k.elements() {
                let lhs = additive_char(&k, k.add(x, y));
                let rhs = &additive_char(&k, x) * &additive_char(&k, y);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn gauss_sum_examples() {
        let k = FieldTable::new(3, 1).unwrap();
        assert_eq!(
            gauss_sum(&k, MultChar::trivial(&k)),
            CycInt::from_int(6, -1)
        );
        let g = gauss_sum(&k, MultChar::quadratic(&k));
        let expect = &CycInt::zeta_pow(3, 1) - &CycInt::zeta_pow(3, 2);
        assert_eq!(g, expect);
        assert_eq!(g.conjugate(), -&g);
    }

    #[test]
    fn gauss_sum_norm_identity() {
        for (p, f) in [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (3, 3), (3, 4)] {
            let k = FieldTable::new(p, f).unwrap();
            for rho in MultChar::all(&k).filter(|r| !r.is_trivial()) {
                let lhs = &gauss_sum(&k, rho) * &gauss_sum(&k, rho.conjugate());
                let expect = sign_at_minus_one(&k, rho) * k.q() as i64;
                assert_eq!(lhs.as_rational_integer(), Some(BigInt::from(expect)));
            }
        }
    }

    #[test]
    fn valuation_examples() {
        let half = Rational64::new(1, 2);
        for (p, f) in [(3, 2), (3, 3), (3, 4), (5, 2)] {
            let k = FieldTable::new(p, f).unwrap();
            assert_eq!(
                gauss_valuation(&k, MultChar::trivial(&k)),
                Rational64::from(0)
            );
            assert_eq!(gauss_valuation(&k, MultChar::quadratic(&k)), half);
            for rho in MultChar::all(&k).filter(|r| !r.is_trivial()) {
                let s = gauss_valuation(&k, rho) + gauss_valuation(&k, rho.conjugate());
                assert_eq!(s, Rational64::from(1));
            }
        }
    }

    #[test]
    fn characters_are_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (p, f) in [(3, 4), (5, 3), (7, 2)] {
            let k = FieldTable::new(p, f).unwrap();
            for _ in 0..1000 {
                let rho = MultChar::new(&k, rng.gen_range(0..k.order() as i64));
                let x = k.from_index(rng.gen_range(1..k.q()));
                let y = k.from_index(rng.gen_range(1..k.q()));
                assert_eq!(rho.eval(k.mul(x, y)), &rho.eval(x) * &rho.eval(y));
            }
        }
    }

    #[test]
    fn quadratic_character_is_plus_minus_one() {
        let k = FieldTable::new(3, 4).unwrap();
        let chi = MultChar::quadratic(&k);
        for x in k.units() {
            let v = chi.eval(x).as_rational_integer().unwrap();
            let is_square = k.units().any(|y| k.mul(y, y) == x);
            assert_eq!(v, BigInt::from(if is_square { 1 } else { -1 }));
        }
    }

    #[test]
    fn valuation_stable_under_norm_lift() {
        // V(-j/(q-1)) = V(-j (q^k-1)/(q-1) / (q^k-1))
        let small = FieldTable::new(3, 2).unwrap();
        let big = FieldTable::new(3, 4).unwrap();
        for rho in MultChar::all(&small) {
            let lifted = MultChar::new(&big, rho.lift_index(big.order()) as i64);
            assert_eq!(gauss_valuation(&small, rho), gauss_valuation(&big, lifted));
        }
    }
}
