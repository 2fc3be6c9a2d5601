//! Finite-monodromy criteria for the systems
//! `x^D + t_r x^{d_r} + ... + t_1 x`, optionally twisted by `chi_2`.
//!
//! Three formulations are implemented and must agree verdict for verdict at
//! every `f`:
//!
//! * the digit-sum inequality over `0 <= x_i < p^f - 1` ([`check_digit_criterion`]),
//! * the same statement phrased with Kubert's `V` ([`check_v_criterion`]),
//! * the Gauss-sum valuation condition over all character tuples of `F_{p^f}`
//!   ([`gauss_criterion`]).
//!
//! [`check_digit_criterion_a`] is the absolute-digit-sum variant with slack
//! `A`, and [`search`] scans `D` for candidates passing every `f <= f_max`.

mod digit;
mod engine;
mod gauss;
mod search;

use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::finite_field::is_prime;

pub use digit::{check_digit_criterion, check_digit_criterion_a, check_v_criterion};
pub use gauss::{
    gauss_criterion, mellin_closed_form, mellin_direct, mellin_inverse, mellin_oracle,
    untwisted_sum, MELLIN_FIELD_BOUND,
};
pub use search::{is_known_case, search, KnownFamily, Survivor};

/// Witnesses kept per `(spec, f)` unless configured otherwise.
pub const DEFAULT_WITNESS_CAP: usize = 100;

/// Largest number of parameters accepted in a [`SystemSpec`].
pub const MAX_PARAMETERS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Twist {
    Trivial,
    Quadratic,
}

impl fmt::Display for Twist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Twist::Trivial => "trivial",
            Twist::Quadratic => "quadratic",
        })
    }
}

impl std::str::FromStr for Twist {
    type Err = Error;
    fn from_str(s: &str) -> Result<Twist> {
        match s {
            "trivial" => Ok(Twist::Trivial),
            "quadratic" => Ok(Twist::Quadratic),
            _ => Err(Error::InvalidSpec(format!("unknown twist {s:?}"))),
        }
    }
}

/// The system `(p, D, d_1 < ... < d_r, twist)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemSpec {
    p: u64,
    #[serde(rename = "D")]
    degree: u64,
    d: Vec<u64>,
    twist: Twist,
}

impl SystemSpec {
    pub fn new(p: u64, degree: u64, d: Vec<u64>, twist: Twist) -> Result<SystemSpec> {
        if degree < 3 {
            return Err(Error::InvalidSpec(format!(
                "D = {degree} must be at least 3"
            )));
        }
        SystemSpec::validated(p, degree, d, twist)
    }

    /// One-parameter system `x^D + t x`, also accepting `D = 2`.
    pub fn for_search(p: u64, degree: u64, twist: Twist) -> Result<SystemSpec> {
        if degree < 2 {
            return Err(Error::InvalidSpec(format!(
                "D = {degree} must be at least 2"
            )));
        }
        SystemSpec::validated(p, degree, vec![1], twist)
    }

    fn validated(p: u64, degree: u64, d: Vec<u64>, twist: Twist) -> Result<SystemSpec> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if degree.is_multiple_of(p) {
            return bad(format!("D = {degree} is divisible by p = {p}"));
        }
        if d.first() != Some(&1) {
            return bad("the exponent list must start with 1".into());
        }
        if d.len() > MAX_PARAMETERS {
            return bad(format!("at most {MAX_PARAMETERS} exponents are supported"));
        }
        if d.windows(2).any(|w| w[0] >= w[1]) {
            return bad("exponents must be strictly increasing".into());
        }
        if *d.last().unwrap() >= degree {
            return bad(format!("exponents must be below D = {degree}"));
        }
        if let Some(e) = d.iter().find(|&&e| e % p == 0) {
            return bad(format!("exponent {e} is divisible by p = {p}"));
        }
        if twist == Twist::Quadratic && p == 2 {
            return bad("the quadratic twist needs odd p".into());
        }
        Ok(SystemSpec {
            p,
            degree,
            d,
            twist,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `D`.
    pub fn degree(&self) -> u64 {
        self.degree
    }

    /// `d_1, ..., d_r`.
    pub fn exponents(&self) -> &[u64] {
        &self.d
    }

    /// `r`.
    pub fn rank(&self) -> usize {
        self.d.len()
    }

    pub fn twist(&self) -> Twist {
        self.twist
    }

    /// `d_2, ..., d_r, d_{r+1} = D`: the coefficients of the free variables
    /// once `x_1` has been solved for.
    pub fn free_coefficients(&self) -> Vec<u64> {
        self.d[1..].iter().copied().chain([self.degree]).collect()
    }

    /// `d_1, ..., d_r, D`.
    pub fn all_exponents(&self) -> Vec<u64> {
        self.d.iter().copied().chain([self.degree]).collect()
    }

    /// `D < 3` is only admitted by [`SystemSpec::for_search`].
    pub fn outside_hypotheses(&self) -> bool {
        self.degree < 3
    }

    /// Tuples enumerated by the digit criteria at `f`: `(p^f - 1)^r`.
    pub fn iteration_count(&self, f: u32) -> Option<u128> {
        let n = (self.p as u128).checked_pow(f)? - 1;
        n.checked_pow(self.rank() as u32)
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d: Vec<String> = self.d.iter().map(u64::to_string).collect();
        write!(
            f,
            "({}, {}, ({}), {})",
            self.p,
            self.degree,
            d.join(","),
            self.twist
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Which formulation produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CriterionId {
    /// `[.]_{p,f}` against `[.]_{p,f,-}`.
    DigitSum,
    /// Plain digit sums with slack `A`.
    AbsoluteDigitSum {
        #[serde(rename = "A", serialize_with = "ser_ratio")]
        slack: Rational64,
    },
    KubertV,
    GaussSum,
}

pub(crate) fn ser_ratio<S: Serializer>(
    r: &Rational64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    if r.is_integer() {
        s.serialize_i64(*r.numer())
    } else {
        s.serialize_str(&r.to_string())
    }
}

/// One failing tuple. The inequality checked is always `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub f: u32,
    /// `x_2, ..., x_{r+1}` (character indices `j_2, ..., j_{r+1}` for the
    /// Gauss-sum criterion).
    pub xs: Vec<u64>,
    #[serde(serialize_with = "ser_ratio")]
    pub lhs: Rational64,
    #[serde(serialize_with = "ser_ratio")]
    pub rhs: Rational64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub spec: SystemSpec,
    pub criterion: CriterionId,
    pub f_checked: Vec<u32>,
    pub verdict: Verdict,
    pub tuples_checked: u64,
    pub violations: u64,
    /// Largest `lhs - rhs` seen; absent when no tuple was checked.
    #[serde(serialize_with = "ser_opt_ratio")]
    pub max_excess: Option<Rational64>,
    /// Lexicographically first violations, at most the configured cap.
    pub witnesses: Vec<Witness>,
}

fn ser_opt_ratio<S: Serializer>(
    r: &Option<Rational64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => ser_ratio(r, s),
        None => s.serialize_none(),
    }
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Knobs shared by every enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub witness_cap: usize,
    /// Stop scanning an outer slice at its first violation. Verdicts are
    /// unaffected; counts become lower bounds.
    pub stop_at_first: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            witness_cap: DEFAULT_WITNESS_CAP,
            stop_at_first: false,
        }
    }
}
