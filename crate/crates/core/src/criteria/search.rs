//! Scanning `D` for one-parameter systems `x^D + t x` that pass the digit
//! criterion at every `f <= f_max`.
//!
//! Passing is a necessary condition only: a survivor is a candidate, not a
//! proof of finite monodromy.

use std::ops::RangeInclusive;

use serde::Serialize;

use super::digit::check_digit_criterion;
use super::{CheckOptions, SystemSpec, Twist};
use crate::error::Result;
use crate::finite_field::is_prime;
use crate::par;

/// The previously known families with finite monodromy. `q` is a power of
/// `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KnownFamily {
    /// `D = (q + 1)/2`.
    HalfQPlusOne { q: u64 },
    /// `D = (q^n + 1)/(q + 1)` with `n >= 3` odd.
    CyclotomicQuotient { q: u64, n: u32 },
    /// `D = 2q - 1`.
    TwiceQMinusOne { q: u64 },
}

impl std::fmt::Display for KnownFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            KnownFamily::HalfQPlusOne { q } => write!(f, "(q+1)/2 with q={q}"),
            KnownFamily::CyclotomicQuotient { q, n } => {
                write!(f, "(q^n+1)/(q+1) with q={q}, n={n}")
            }
            KnownFamily::TwiceQMinusOne { q } => write!(f, "2q-1 with q={q}"),
        }
    }
}

fn is_power_of(mut q: u64, p: u64) -> bool {
    if q < p {
        return false;
    }
    while q.is_multiple_of(p) {
        q /= p;
    }
    q == 1
}

/// Every known family containing `D` for the prime `p`. Empty when `D` is
/// not a known case; small `D` can lie in more than one family (for `p = 3`,
/// `5 = (9+1)/2 = 2*3 - 1`).
pub fn is_known_case(p: u64, degree: u64) -> Vec<KnownFamily> {
    let mut out = Vec::new();
    if !is_prime(p) || degree < 2 {
        return out;
    }
    if let Some(q) = (2 * degree).checked_sub(1) {
        if is_power_of(q, p) {
            out.push(KnownFamily::HalfQPlusOne { q });
        }
    }
    // (q^n + 1)/(q + 1) >= q^2 - q + 1 > q
    let mut q = p;
    while q < degree {
        let mut n = 3u32;
        let mut qn = q.checked_pow(3);
        while let Some(v) = qn {
            let value = (v + 1) / (q + 1);
            if value > degree {
                break;
            }
            if value == degree {
                out.push(KnownFamily::CyclotomicQuotient { q, n });
            }
            n += 2;
            qn = v.checked_mul(q * q);
        }
        match q.checked_mul(p) {
            Some(next) => q = next,
            None => break,
        }
    }
    if degree % 2 == 1 && is_power_of(degree.div_ceil(2), p) {
        out.push(KnownFamily::TwiceQMinusOne {
            q: degree.div_ceil(2),
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Survivor {
    #[serde(rename = "D")]
    pub degree: u64,
    /// Passed the digit criterion at every `f` up to this bound.
    pub f_max: u32,
    pub known: Vec<KnownFamily>,
    pub outside_hypotheses: bool,
}

impl Survivor {
    pub fn is_known(&self) -> bool {
        !self.known.is_empty()
    }

    pub fn status(&self) -> String {
        format!("candidate (all f <= {})", self.f_max)
    }
}

/// All `D` in `degrees` (skipping multiples of `p`) for which
/// `x^D + t x` passes the digit criterion at every `f <= f_max`, in
/// increasing order.
pub fn search(
    p: u64,
    degrees: RangeInclusive<u64>,
    twist: Twist,
    f_max: u32,
) -> Result<Vec<Survivor>> {
    let lo = (*degrees.start()).max(2);
    let hi = *degrees.end();
    if hi < lo {
        return Ok(Vec::new());
    }
    // validate p and the twist once
    SystemSpec::for_search(p, if p == 2 { 3 } else { 2 }, twist)?;
    let opts = CheckOptions {
        witness_cap: 0,
        stop_at_first: true,
    };
    let results = par::map_range(lo..hi + 1, |degree| -> Result<Option<Survivor>> {
        if degree % p == 0 {
            return Ok(None);
        }
        let spec = SystemSpec::for_search(p, degree, twist)?;
        for f in 1..=f_max {
            if !check_digit_criterion(&spec, f, opts)?.passed() {
                return Ok(None);
            }
        }
        Ok(Some(Survivor {
            degree,
            f_max,
            known: is_known_case(p, degree),
            outside_hypotheses: spec.outside_hypotheses(),
        }))
    });
    results.into_iter().filter_map(Result::transpose).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_known(p: u64, degree: u64) -> bool {
        let mut q = p;
        while q <= 2 * degree + 1 {
            if q + 1 == 2 * degree || 2 * q - 1 == degree {
                return true;
            }
            let mut n = 3;
            while (q as u128).pow(n) < 4 * degree as u128 * (q as u128 + 1) {
                let v = (q as u128).pow(n) + 1;
                if v % (q as u128 + 1) == 0 && v / (q as u128 + 1) == degree as u128 {
                    return true;
                }
                n += 2;
            }
            q *= p;
        }
        false
    }

    #[test]
    fn known_case_examples() {
        assert!(is_known_case(3, 23).is_empty());
        assert_eq!(
            is_known_case(3, 17),
            vec![KnownFamily::TwiceQMinusOne { q: 9 }]
        );
        assert_eq!(
            is_known_case(3, 7),
            vec![KnownFamily::CyclotomicQuotient { q: 3, n: 3 }]
        );
        assert_eq!(
            is_known_case(3, 61),
            vec![KnownFamily::CyclotomicQuotient { q: 3, n: 5 }]
        );
        assert_eq!(
            is_known_case(3, 2),
            vec![KnownFamily::HalfQPlusOne { q: 3 }]
        );
        assert_eq!(
            is_known_case(3, 5),
            vec![
                KnownFamily::HalfQPlusOne { q: 9 },
                KnownFamily::TwiceQMinusOne { q: 3 }
            ]
        );
        assert_eq!(
            is_known_case(5, 21),
            vec![KnownFamily::CyclotomicQuotient { q: 5, n: 3 }]
        );
    }

    #[test]
    fn known_case_matches_brute_force() {
        for p in [2, 3, 5, 7, 11] {
            for degree in 2..3000 {
                assert_eq!(
                    !is_known_case(p, degree).is_empty(),
                    brute_known(p, degree),
                    "p = {p}, D = {degree}"
                );
            }
        }
    }

    #[test]
    fn family_values_are_consistent() {
        for p in [3, 5, 7] {
            for degree in 2..2000 {
                for fam in is_known_case(p, degree) {
                    let value = match fam {
                        KnownFamily::HalfQPlusOne { q } => q.div_ceil(2),
                        KnownFamily::CyclotomicQuotient { q, n } => (q.pow(n) + 1) / (q + 1),
                        KnownFamily::TwiceQMinusOne { q } => 2 * q - 1,
                    };
                    assert_eq!(value, degree);
                }
            }
        }
    }

    #[test]
    fn small_search_p3() {
        let found = search(3, 2..=30, Twist::Quadratic, 4).unwrap();
        let ds: Vec<u64> = found.iter().map(|s| s.degree).collect();
        for d in [2, 5, 7, 14, 17, 23] {
            assert!(ds.contains(&d), "missing {d} in {ds:?}");
        }
        assert!(ds.windows(2).all(|w| w[0] < w[1]));
        let s23 = found.iter().find(|s| s.degree == 23).unwrap();
        assert!(!s23.is_known());
        assert!(
            found
                .iter()
                .find(|s| s.degree == 2)
                .unwrap()
                .outside_hypotheses
        );
        assert!(ds.iter().all(|d| d % 3 != 0));
    }

    #[test]
    fn empty_and_invalid_ranges() {
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 10..=5;
        assert!(search(3, empty, Twist::Quadratic, 3).unwrap().is_empty());
        assert!(search(4, 2..=10, Twist::Quadratic, 3).is_err());
        assert!(search(2, 2..=10, Twist::Quadratic, 3).is_err());
    }
}
