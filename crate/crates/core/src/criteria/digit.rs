use num_rational::Rational64;
use num_traits::Signed;

use super::engine::{enumerate, report};
use super::{CheckOptions, CriterionId, CriterionReport, SystemSpec, Twist};
use crate::digits::{digit_sum_u64, kubert_v, kubert_v_rl, FractionModZ};
use crate::error::{Error, Result};

/// `p^f - 1`, bounded so that `D (p^f - 1) r + p^f` stays well inside `u64`.
fn modulus(spec: &SystemSpec, f: u32) -> Result<u64> {
    if f == 0 {
        return Err(Error::InvalidSpec("f must be positive".into()));
    }
    let q = spec
        .p()
        .checked_pow(f)
        .filter(|&q| q < (1u64 << 40))
        .ok_or_else(|| Error::InvalidSpec(format!("{}^{f} is too large to enumerate", spec.p())))?;
    Ok(q - 1)
}

/// `sum d_i x_i`, plus `(p^f - 1)/2` under the quadratic twist.
#[inline]
fn weighted_sum(coeffs: &[u64], xs: &[u64], shift: u64) -> u64 {
    coeffs.iter().zip(xs).map(|(d, x)| d * x).sum::<u64>() + shift
}

/// The digit inequality at one `f`:
///
/// * trivial twist: `[sum d_i x_i]_{p,f} <= sum [x_i]_{p,f,-} + f(p-1)/2`
///   over `0 <= x_i < p^f - 1`, not all zero;
/// * quadratic twist: `[sum d_i x_i + (p^f-1)/2]_{p,f} <= sum [x_i]_{p,f,-} + f(p-1)/2`
///   over all such tuples.
pub fn check_digit_criterion(
    spec: &SystemSpec,
    f: u32,
    opts: CheckOptions,
) -> Result<CriterionReport> {
    let n = modulus(spec, f)?;
    let p = spec.p();
    let coeffs = spec.free_coefficients();
    let full = f as i64 * (p as i64 - 1);
    let (shift, skip_zero) = match spec.twist() {
        Twist::Trivial => (0, true),
        Twist::Quadratic => (n / 2, false),
    };
    let tally = enumerate(coeffs.len(), n, opts, |xs| {
        if skip_zero && xs.iter().all(|&x| x == 0) {
            return None;
        }
        let s = weighted_sum(&coeffs, xs, shift) % n;
        let lhs = if s == 0 {
            full
        } else {
            digit_sum_u64(s, p) as i64
        };
        let rhs: i64 = xs.iter().map(|&x| digit_sum_u64(x, p) as i64).sum();
        Some((2 * lhs, 2 * rhs + full))
    });
    Ok(report(spec, CriterionId::DigitSum, f, 2, tally))
}

/// Plain digit sums with slack `A >= 0`:
///
/// * trivial: `[sum d_i x_i]_p <= sum [x_i]_p + f(p-1)/2 + A`, not all zero;
/// * quadratic: `[sum d_i x_i + (p^f-1)/2]_p <= sum [x_i]_p + f(p-1)/2 + A`;
///
/// over `0 <= x_i < p^f - 1`.
pub fn check_digit_criterion_a(
    spec: &SystemSpec,
    f: u32,
    slack: Rational64,
    opts: CheckOptions,
) -> Result<CriterionReport> {
    if slack.is_negative() {
        return Err(Error::InvalidSpec(format!(
            "A = {slack} must be nonnegative"
        )));
    }
    let n = modulus(spec, f)?;
    let p = spec.p();
    let coeffs = spec.free_coefficients();
    let full = f as i64 * (p as i64 - 1);
    let (shift, skip_zero) = match spec.twist() {
        Twist::Trivial => (0, true),
        Twist::Quadratic => (n / 2, false),
    };
    // everything over the common denominator 2 * den(A)
    let a_den = *slack.denom();
    let a_num = *slack.numer();
    let den = 2 * a_den;
    let tally = enumerate(coeffs.len(), n, opts, |xs| {
        if skip_zero && xs.iter().all(|&x| x == 0) {
            return None;
        }
        let lhs = digit_sum_u64(weighted_sum(&coeffs, xs, shift), p) as i64;
        let rhs: i64 = xs.iter().map(|&x| digit_sum_u64(x, p) as i64).sum();
        Some((den * lhs, den * rhs + a_den * full + 2 * a_num))
    });
    Ok(report(
        spec,
        CriterionId::AbsoluteDigitSum { slack },
        f,
        den,
        tally,
    ))
}

/// The `V`-function form at `f`: over `x_i in (1/(p^f-1)) Z / Z`,
///
/// * trivial: `sum V(x_i) + 1/2 >= V_RL(sum d_i x_i)`, `x_i` not all zero;
/// * quadratic: `sum V(x_i) + 1/2 >= V_RL(1/2 + sum d_i x_i)`.
///
/// `V` is evaluated at each argument's own minimal degree, so this route
/// shares nothing with [`check_digit_criterion`] beyond the enumeration order.
pub fn check_v_criterion(spec: &SystemSpec, f: u32, opts: CheckOptions) -> Result<CriterionReport> {
    let n = modulus(spec, f)?;
    let p = spec.p();
    let coeffs: Vec<i64> = spec.free_coefficients().iter().map(|&d| d as i64).collect();
    // every V value at this f has denominator dividing f(p-1); scale by twice that
    let den = 2 * f as i64 * (p as i64 - 1);
    let scaled = |v: Rational64| -> i64 {
        let s = v * Rational64::from(den);
        debug_assert!(s.is_integer());
        s.to_integer()
    };
    let fractions: Vec<FractionModZ> = (0..n).map(|k| FractionModZ::new(k as i128, n)).collect();
    let v_table: Vec<i64> = fractions
        .iter()
        .map(|&x| kubert_v(x, p).map(scaled))
        .collect::<Result<_>>()?;
    let v_rl_table: Vec<i64> = fractions
        .iter()
        .map(|&x| kubert_v_rl(x, p).map(scaled))
        .collect::<Result<_>>()?;
    let offset = match spec.twist() {
        Twist::Trivial => FractionModZ::ZERO,
        Twist::Quadratic => FractionModZ::half(),
    };
    let half = den / 2;
    let tally = enumerate(coeffs.len(), n, opts, |xs| {
        if spec.twist() == Twist::Trivial && xs.iter().all(|&x| x == 0) {
            return None;
        }
        let arg = coeffs
            .iter()
            .zip(xs)
            .fold(offset, |acc, (&d, &x)| acc + d * fractions[x as usize]);
        let k = arg
            .scaled_to(n)
            .expect("argument has denominator dividing p^f - 1");
        let lhs = v_rl_table[k as usize];
        let rhs = xs.iter().map(|&x| v_table[x as usize]).sum::<i64>() + half;
        Some((lhs, rhs))
    });
    Ok(report(spec, CriterionId::KubertV, f, den, tally))
}
