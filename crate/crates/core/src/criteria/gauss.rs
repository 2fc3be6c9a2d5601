//! The Gauss-sum form of the criterion and the Mellin-transform identities
//! behind it.
//!
//! With `F(t_1, ..., t_{r+1}) = sum_x psi(sum_i t_i x^{d_i})` (`x` over `K`,
//! or over `K^x` weighted by `chi_2(x)` under the quadratic twist) and
//! `d_{r+1} = D`, the Mellin transform `sum_t F(t) prod_i rho_i(t_i)` equals
//! `(q - 1) prod_i g(psi, rho_i)` when `prod_i rho_i^{d_i}` is trivial
//! (resp. `chi_2`) and vanishes otherwise; the all-trivial tuple under the
//! trivial twist picks up the extra `(q - 1)^{r+1}` from `x = 0`.

use num_bigint::BigInt;
use num_rational::Rational64;

use super::engine::{enumerate, report};
use super::{CheckOptions, CriterionId, CriterionReport, SystemSpec, Twist};
use crate::characters::{gauss_sum, gauss_valuation, MultChar};
use crate::cyclotomic::CycInt;
use crate::error::{Error, Result};
use crate::finite_field::{FieldElement, FieldTable};

/// Largest field accepted by the Mellin routines.
pub const MELLIN_FIELD_BOUND: u64 = 81;

fn check_field(spec: &SystemSpec, k: &FieldTable) -> Result<()> {
    if k.p() != spec.p() {
        return Err(Error::InvalidSpec(format!(
            "field characteristic {} differs from p = {}",
            k.p(),
            spec.p()
        )));
    }
    Ok(())
}

/// Character index that `prod_i rho_i^{d_i}` must equal.
fn target_index(spec: &SystemSpec, k: &FieldTable) -> u64 {
    match spec.twist() {
        Twist::Trivial => 0,
        Twist::Quadratic => k.order() / 2,
    }
}

/// For every tuple `(rho_1, ..., rho_{r+1})` of characters of `K^x` with
/// `prod rho_i^{d_i} = 1` (not all trivial) or `= chi_2`, check
/// `sum_i ord_q g(psi, rho_i) >= 1/2`.
///
/// `rho_1` is determined by the others since `d_1 = 1`, so the enumeration
/// runs over `(rho_2, ..., rho_{r+1})`, which is what the witnesses record.
pub fn gauss_criterion(
    spec: &SystemSpec,
    k: &FieldTable,
    opts: CheckOptions,
) -> Result<CriterionReport> {
    check_field(spec, k)?;
    let n = k.order();
    let f = k.degree();
    let den = 2 * f as i64 * (spec.p() as i64 - 1);
    let valuation: Vec<i64> = MultChar::all(k)
        .map(|rho| {
            let v = gauss_valuation(k, rho) * Rational64::from(den);
            debug_assert!(v.is_integer());
            v.to_integer()
        })
        .collect();
    let coeffs = spec.free_coefficients();
    let target = target_index(spec, k);
    let trivial_twist = spec.twist() == Twist::Trivial;
    let tally = enumerate(coeffs.len(), n, opts, |js| {
        if trivial_twist && js.iter().all(|&j| j == 0) {
            return None;
        }
        let weighted = coeffs
            .iter()
            .zip(js)
            .fold(0u64, |acc, (&d, &j)| (acc + d % n * j) % n);
        let j1 = (target + n - weighted) % n;
        let total = valuation[j1 as usize] + js.iter().map(|&j| valuation[j as usize]).sum::<i64>();
        Some((den / 2, total))
    });
    Ok(report(spec, CriterionId::GaussSum, f, den, tally))
}

fn check_mellin_field(spec: &SystemSpec, k: &FieldTable) -> Result<()> {
    check_field(spec, k)?;
    if k.q() > MELLIN_FIELD_BOUND {
        return Err(Error::FieldTooLarge {
            p: k.p(),
            f: k.degree(),
            bound: MELLIN_FIELD_BOUND,
        });
    }
    Ok(())
}

fn check_tuple(spec: &SystemSpec, k: &FieldTable, rho: &[MultChar]) -> Result<()> {
    if rho.len() != spec.rank() + 1 {
        return Err(Error::InvalidSpec(format!(
            "expected {} characters, got {}",
            spec.rank() + 1,
            rho.len()
        )));
    }
    if let Some(bad) = rho
        .iter()
        .find(|r| MultChar::new(k, r.index() as i64) != **r)
    {
        return Err(Error::InvalidSpec(format!(
            "character {bad:?} is not a character of this field"
        )));
    }
    Ok(())
}

/// Exponent of `zeta_{p(q-1)}` contributed by `x` under the twist, plus the
/// trace exponent of `sum_i t_i x^{d_i}`. `None` drops `x` from the sum.
fn sum_term(
    k: &FieldTable,
    twist: Twist,
    exponents: &[u64],
    t_logs: &[u64],
    x: FieldElement,
) -> Option<(u64, u64)> {
    let n = k.order();
    match x.log() {
        None => match twist {
            Twist::Trivial => Some((0, 0)),
            Twist::Quadratic => None,
        },
        Some(l) => {
            let p = k.p();
            let tr = exponents.iter().zip(t_logs).fold(0u64, |acc, (&d, &t)| {
                (acc + k.trace_of_log(t + d % n * l as u64) as u64) % p
            });
            let chi = match twist {
                Twist::Trivial => 0,
                Twist::Quadratic => (n / 2) * l as u64 % n,
            };
            Some((tr, chi))
        }
    }
}

/// `F(t)` for `t in (K^x)^{r+1}`: the untwisted sum in `Z[zeta_p]`, or in
/// `Z[zeta_{p(q-1)}]` under the quadratic twist (where `chi_2(x) = +-1`
/// anyway).
pub fn untwisted_sum(spec: &SystemSpec, k: &FieldTable, t: &[FieldElement]) -> Result<CycInt> {
    check_field(spec, k)?;
    let exps = spec.all_exponents();
    if t.len() != exps.len() || t.iter().any(|x| x.is_zero()) {
        return Err(Error::InvalidSpec(
            "expected r + 1 nonzero coefficients".into(),
        ));
    }
    let logs: Vec<u64> = t.iter().map(|x| x.log().unwrap() as u64).collect();
    let n = k.order();
    let m = k.p() * n;
    let mut counts = vec![0i64; m as usize];
    for x in k.elements() {
        if let Some((tr, chi)) = sum_term(k, spec.twist(), &exps, &logs, x) {
            counts[((n * tr + k.p() * chi) % m) as usize] += 1;
        }
    }
    Ok(CycInt::from_coeffs(m as u32, counts))
}

/// `Mellin_F(rho) = sum_{t in (K^x)^{r+1}} F(t) prod_i rho_i(t_i)`, summed
/// directly.
pub fn mellin_direct(spec: &SystemSpec, k: &FieldTable, rho: &[MultChar]) -> Result<CycInt> {
    check_mellin_field(spec, k)?;
    check_tuple(spec, k, rho)?;
    let exps = spec.all_exponents();
    let n = k.order();
    let p = k.p();
    let m = p * n;
    let arity = exps.len();
    let mut counts = vec![0i64; m as usize];
    let mut t_logs = vec![0u64; arity];
    loop {
        let char_exp = rho
            .iter()
            .zip(&t_logs)
            .fold(0u64, |acc, (r, &t)| (acc + r.index() * t) % n);
        for x in k.elements() {
            if let Some((tr, chi)) = sum_term(k, spec.twist(), &exps, &t_logs, x) {
                let e = n * tr + p * ((chi + char_exp) % n);
                counts[(e % m) as usize] += 1;
            }
        }
        let mut i = arity;
        loop {
            if i == 0 {
                return Ok(CycInt::from_coeffs(m as u32, counts));
            }
            i -= 1;
            t_logs[i] += 1;
            if t_logs[i] < n {
                break;
            }
            t_logs[i] = 0;
        }
    }
}

/// The closed form of the Mellin transform, from Gauss sums.
pub fn mellin_closed_form(spec: &SystemSpec, k: &FieldTable, rho: &[MultChar]) -> Result<CycInt> {
    check_mellin_field(spec, k)?;
    check_tuple(spec, k, rho)?;
    let n = k.order();
    let m = (k.p() * n) as u32;
    let exps = spec.all_exponents();
    let product = rho
        .iter()
        .zip(&exps)
        .fold(0u64, |acc, (r, &d)| (acc + r.index() * (d % n)) % n);
    if product != target_index(spec, k) {
        return Ok(CycInt::zero(m));
    }
    let gauss = rho
        .iter()
        .fold(CycInt::one(m), |acc, &r| &acc * &gauss_sum(k, r));
    let mut out = gauss.scale(&BigInt::from(n));
    if spec.twist() == Twist::Trivial && rho.iter().all(|r| r.is_trivial()) {
        let arity = rho.len() as u32;
        out = &out + &CycInt::from_int(m, BigInt::from(n).pow(arity));
    }
    Ok(out)
}

/// Both sides of the Mellin identity, for equality testing.
pub fn mellin_oracle(
    spec: &SystemSpec,
    k: &FieldTable,
    rho: &[MultChar],
) -> Result<(CycInt, CycInt)> {
    Ok((
        mellin_direct(spec, k, rho)?,
        mellin_closed_form(spec, k, rho)?,
    ))
}

/// Mellin inversion at `t`: `F(t) = (q-1)^{-(r+1)} sum_rho Mellin(rho) prod conj(rho_i)(t_i)`,
/// given the full table indexed in lexicographic order of character indices.
pub fn mellin_inverse(
    spec: &SystemSpec,
    k: &FieldTable,
    table: &[CycInt],
    t: &[FieldElement],
) -> Result<CycInt> {
    check_mellin_field(spec, k)?;
    let arity = spec.rank() + 1;
    let n = k.order();
    if table.len() as u64 != n.pow(arity as u32)
        || t.len() != arity
        || t.iter().any(|x| x.is_zero())
    {
        return Err(Error::InvalidSpec(
            "table or point has the wrong shape".into(),
        ));
    }
    let m = (k.p() * n) as u32;
    let mut acc = CycInt::zero(m);
    for (idx, value) in table.iter().enumerate() {
        let mut rest = idx as u64;
        let mut exp = 0u64;
        for x in t.iter().rev() {
            let j = rest % n;
            rest /= n;
            exp += (n - j) % n * x.log().unwrap() as u64;
        }
        let shift = CycInt::zeta_pow(m, (k.p() * (exp % n)) as i64);
        acc = &acc + &(value * &shift);
    }
    acc.div_exact(&BigInt::from(n).pow(arity as u32))
        .ok_or_else(|| Error::Internal("Mellin inversion is not integral".into()))
}
