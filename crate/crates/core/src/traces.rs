//! Trace functions of the local systems, exactly.
//!
//! At a parameter point the raw trace is
//! `-sum_x psi_K(c x^D + sum_i t_i x^{d_i}) chi_K(x)` with leading coefficient
//! `c` (usually 1), `chi_K` trivial or the quadratic character of `K`, and `x`
//! running over `K^x` for the quadratic twist and over `K` otherwise. The
//! twisted trace divides by `alpha^{deg(K/F_p)}`.
//!
//! Every sum is accumulated as a histogram over `Tr(.)` in `F_p`, using
//! additivity of the trace and the trace-by-logarithm table, so a point costs
//! `O(q r)` table lookups and one reduction in `Z[zeta_p]`.

use std::io::Write;

use num_bigint::BigInt;
use serde::Serialize;

use crate::criteria::{SystemSpec, Twist};
use crate::cyclotomic::{divide_by_alpha_power, Alpha, CycInt};
use crate::error::{Error, Result};
use crate::finite_field::{mult_order, FieldElement, FieldTable};
use crate::par;

/// A parameter point: an optional leading coefficient for `x^D` (1 when
/// absent) and `t_1, ..., t_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterPoint {
    pub leading: Option<FieldElement>,
    pub t: Vec<FieldElement>,
}

impl ParameterPoint {
    pub fn new(t: Vec<FieldElement>) -> ParameterPoint {
        ParameterPoint { leading: None, t }
    }

    pub fn with_leading(leading: FieldElement, t: Vec<FieldElement>) -> ParameterPoint {
        ParameterPoint {
            leading: Some(leading),
            t,
        }
    }
}

/// `-sum_x psi_K(c x^D + sum_i t_i x^{d_i}) chi_K(x)` in `Z[zeta_p]`.
///
/// For a point with a leading coefficient `c` the result also carries the
/// prefactor `chi_K(c)` under the quadratic twist.
pub fn raw_trace(spec: &SystemSpec, k: &FieldTable, point: &ParameterPoint) -> Result<CycInt> {
    check_point(spec, k, point)?;
    Ok(raw_sum(spec, k, point))
}

fn check_point(spec: &SystemSpec, k: &FieldTable, point: &ParameterPoint) -> Result<()> {
    if k.p() != spec.p() {
        return Err(Error::InvalidSpec(format!(
            "field characteristic {} differs from p = {}",
            k.p(),
            spec.p()
        )));
    }
    if point.t.len() != spec.rank() {
        return Err(Error::InvalidSpec(format!(
            "expected {} parameters, got {}",
            spec.rank(),
            point.t.len()
        )));
    }
    if point.leading.is_some_and(|c| c.is_zero()) {
        return Err(Error::InvalidSpec(
            "leading coefficient must be nonzero".into(),
        ));
    }
    Ok(())
}

fn raw_sum(spec: &SystemSpec, k: &FieldTable, point: &ParameterPoint) -> CycInt {
    let n = k.order();
    let p = k.p() as usize;
    let quadratic = spec.twist() == Twist::Quadratic;
    // (coefficient log, exponent) pairs for nonzero terms
    let leading_log = point.leading.and_then(|c| c.log()).unwrap_or(0) as u64;
    let mut terms: Vec<(u64, u64)> = vec![(leading_log, spec.degree() % n)];
    for (t, &d) in point.t.iter().zip(spec.exponents()) {
        if let Some(l) = t.log() {
            terms.push((l as u64, d % n));
        }
    }
    let mut hist = vec![0i64; p];
    for l in 0..n {
        let mut tr = 0usize;
        for &(c, d) in &terms {
            tr += k.trace_of_log(c + d * l) as usize;
        }
        let sign = if quadratic && l % 2 == 1 { -1 } else { 1 };
        hist[tr % p] -= sign;
    }
    if !quadratic {
        // x = 0
        hist[0] -= 1;
    }
    if quadratic && leading_log % 2 == 1 {
        for h in &mut hist {
            *h = -*h;
        }
    }
    CycInt::from_coeffs(p as u32, hist)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum TraceValue {
    #[serde(serialize_with = "ser_bigint")]
    Integer(BigInt),
    #[serde(serialize_with = "ser_display")]
    NotRational(CycInt),
}

fn ser_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match i64::try_from(v) {
        Ok(small) => s.serialize_i64(small),
        Err(_) => s.serialize_str(&v.to_string()),
    }
}

fn ser_display<S: serde::Serializer>(v: &CycInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl TraceValue {
    fn from_cyc(v: CycInt) -> TraceValue {
        match v.as_rational_integer() {
            Some(n) => TraceValue::Integer(n),
            None => TraceValue::NotRational(v.reduce()),
        }
    }

    pub fn as_integer(&self) -> Option<&BigInt> {
        match self {
            TraceValue::Integer(n) => Some(n),
            TraceValue::NotRational(_) => None,
        }
    }
}

impl std::fmt::Display for TraceValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TraceValue::Integer(n) => write!(f, "{n}"),
            TraceValue::NotRational(c) => write!(f, "{c}"),
        }
    }
}

/// `raw_trace / alpha^{deg}` for the quadratic twist, with `alpha` the
/// preferred square root of `chi_2(-1) p` for odd `D`.
///
/// A quotient outside `Z[zeta_p]` is reported as [`Error::NotDivisible`]; a
/// quotient in `Z[zeta_p]` but not in `Z` comes back as
/// [`TraceValue::NotRational`].
pub fn twisted_trace(
    spec: &SystemSpec,
    k: &FieldTable,
    point: &ParameterPoint,
) -> Result<TraceValue> {
    let alpha = twist_alpha(spec)?;
    let raw = raw_trace(spec, k, point)?;
    Ok(TraceValue::from_cyc(divide_by_alpha_power(
        &raw,
        &alpha,
        k.degree(),
    )?))
}

fn twist_alpha(spec: &SystemSpec) -> Result<Alpha> {
    if spec.twist() != Twist::Quadratic {
        return Err(Error::AlphaUndefined(
            "the trivial twist is never normalized by alpha".into(),
        ));
    }
    Alpha::for_system(spec.p(), spec.degree())
}

/// Which parameter points a table covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParameterGrid {
    /// All `(t_1, ..., t_r) in K^r`.
    Full,
    /// `c x^D` with `c` in `K^x` and `(t_1, ..., t_r) in K^r`.
    WithLeading,
    /// `t_vary` over `K`, the other parameters fixed by `frozen` (whose
    /// entry at `vary` is ignored).
    Line {
        vary: usize,
        frozen: Vec<FieldElement>,
    },
    /// `c` over `K^x` with `t = frozen`.
    LeadingLine { frozen: Vec<FieldElement> },
}

impl ParameterGrid {
    fn points(&self, spec: &SystemSpec, k: &FieldTable) -> Result<Vec<ParameterPoint>> {
        let r = spec.rank();
        let check_frozen = |frozen: &[FieldElement]| {
            if frozen.len() != r {
                return Err(Error::InvalidSpec(format!(
                    "expected {r} frozen parameters, got {}",
                    frozen.len()
                )));
            }
            Ok(())
        };
        let full = || -> Vec<Vec<FieldElement>> {
            let mut out = vec![Vec::with_capacity(r)];
            for _ in 0..r {
                out = out
                    .into_iter()
                    .flat_map(|prefix| {
                        k.elements().map(move |x| {
                            let mut v = prefix.clone();
                            v.push(x);
                            v
                        })
                    })
                    .collect();
            }
            out
        };
        Ok(match self {
            ParameterGrid::Full => full().into_iter().map(ParameterPoint::new).collect(),
            ParameterGrid::WithLeading => {
                let ts = full();
                k.units()
                    .flat_map(|c| {
                        ts.iter()
                            .map(move |t| ParameterPoint::with_leading(c, t.clone()))
                    })
                    .collect()
            }
            ParameterGrid::Line { vary, frozen } => {
                check_frozen(frozen)?;
                if *vary >= r {
                    return Err(Error::InvalidSpec(format!(
                        "parameter index {vary} out of range for r = {r}"
                    )));
                }
                k.elements()
                    .map(|x| {
                        let mut t = frozen.clone();
                        t[*vary] = x;
                        ParameterPoint::new(t)
                    })
                    .collect()
            }
            ParameterGrid::LeadingLine { frozen } => {
                check_frozen(frozen)?;
                k.units()
                    .map(|c| ParameterPoint::with_leading(c, frozen.clone()))
                    .collect()
            }
        })
    }

    fn has_leading(&self) -> bool {
        matches!(
            self,
            ParameterGrid::WithLeading | ParameterGrid::LeadingLine { .. }
        )
    }

    fn size(&self, spec: &SystemSpec, k: &FieldTable) -> u128 {
        let q = k.q() as u128;
        match self {
            ParameterGrid::Full => q.saturating_pow(spec.rank() as u32),
            ParameterGrid::WithLeading => {
                (q - 1).saturating_mul(q.saturating_pow(spec.rank() as u32))
            }
            ParameterGrid::Line { .. } => q,
            ParameterGrid::LeadingLine { .. } => q - 1,
        }
    }

    fn label(&self) -> String {
        match self {
            ParameterGrid::Full => "full".into(),
            ParameterGrid::WithLeading => "with_leading".into(),
            ParameterGrid::Line { vary, .. } => format!("line(t{})", vary + 1),
            ParameterGrid::LeadingLine { .. } => "leading_line".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub point: ParameterPoint,
    pub value: TraceValue,
}

#[derive(Debug, Clone)]
pub struct TraceTable {
    pub spec: SystemSpec,
    pub field: FieldTable,
    pub grid: ParameterGrid,
    /// Whether values were divided by `alpha^deg` (quadratic twist only).
    pub normalized: bool,
    pub entries: Vec<TraceEntry>,
}

/// Work estimate of a table: grid points times `q`.
pub fn trace_table_cost(spec: &SystemSpec, k: &FieldTable, grid: &ParameterGrid) -> u128 {
    grid.size(spec, k).saturating_mul(k.q() as u128)
}

/// Tabulate the trace over `grid`. Quadratic-twist tables are normalized by
/// `alpha^deg`; trivial-twist tables hold the raw sums.
pub fn trace_table(
    spec: &SystemSpec,
    k: &FieldTable,
    grid: ParameterGrid,
    budget: u128,
) -> Result<TraceTable> {
    let needed = trace_table_cost(spec, k, &grid);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    if grid.has_leading() && spec.twist() != Twist::Quadratic {
        return Err(Error::InvalidSpec(
            "grids with a leading coefficient carry chi_2 and need the quadratic twist".into(),
        ));
    }
    let alpha = match spec.twist() {
        Twist::Quadratic => Some(Alpha::for_system(spec.p(), spec.degree())?),
        Twist::Trivial => None,
    };
    let points = grid.points(spec, k)?;
    if let Some(p) = points.first() {
        check_point(spec, k, p)?;
    }
    let values = par::map_slice(&points, |point| {
        let raw = raw_sum(spec, k, point);
        match &alpha {
            Some(a) => divide_by_alpha_power(&raw, a, k.degree()).map(TraceValue::from_cyc),
            None => Ok(TraceValue::from_cyc(raw)),
        }
    });
    let entries = points
        .into_iter()
        .zip(values)
        .map(|(point, value)| {
            Ok(TraceEntry {
                point,
                value: value?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TraceTable {
        spec: spec.clone(),
        field: k.clone(),
        normalized: alpha.is_some(),
        grid,
        entries,
    })
}

impl TraceTable {
    /// Distinct values, sorted (integers first, by value).
    pub fn value_set(&self) -> Vec<TraceValue> {
        let mut ints: Vec<BigInt> = self
            .entries
            .iter()
            .filter_map(|e| e.value.as_integer().cloned())
            .collect();
        ints.sort();
        ints.dedup();
        let mut others: Vec<String> = Vec::new();
        let mut out: Vec<TraceValue> = ints.into_iter().map(TraceValue::Integer).collect();
        for e in &self.entries {
            if let TraceValue::NotRational(c) = &e.value {
                let key = c.to_string();
                if !others.contains(&key) {
                    others.push(key);
                    out.push(e.value.clone());
                }
            }
        }
        out
    }

    /// Column names: the leading coefficient when present, then `t1..tr`,
    /// then the value.
    pub fn columns(&self) -> Vec<String> {
        let mut cols = Vec::new();
        if self.grid.has_leading() {
            cols.push("c".to_string());
        }
        cols.extend((1..=self.spec.rank()).map(|i| format!("t{i}")));
        cols.push("trace".into());
        cols
    }

    /// One row per point; field elements as base-`p` integers of their
    /// coordinates.
    pub fn rows(&self) -> Vec<Vec<String>> {
        let k = &self.field;
        self.entries
            .iter()
            .map(|e| {
                let mut row: Vec<String> = Vec::new();
                if let Some(c) = e.point.leading {
                    row.push(k.to_index(c).to_string());
                }
                row.extend(e.point.t.iter().map(|&x| k.to_index(x).to_string()));
                row.push(e.value.to_string());
                row
            })
            .collect()
    }

    /// Commented metadata, then the CSV body.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Internal(format!("write failed: {e}"));
        let k = &self.field;
        let modulus: Vec<String> = k.modulus().iter().map(u32::to_string).collect();
        writeln!(out, "# spec: {}", self.spec).map_err(io)?;
        writeln!(
            out,
            "# field: F_{}^{} modulus [{}] (ascending coefficients)",
            k.p(),
            k.degree(),
            modulus.join(",")
        )
        .map_err(io)?;
        writeln!(out, "# generator: {}", k.generator_index()).map_err(io)?;
        writeln!(out, "# grid: {}", self.grid.label()).map_err(io)?;
        writeln!(
            out,
            "# values: {}",
            if self.normalized {
                "raw trace divided by alpha^deg"
            } else {
                "raw trace"
            }
        )
        .map_err(io)?;
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Internal(format!("csv: {e}"));
        w.write_record(self.columns()).map_err(csv_err)?;
        for row in self.rows() {
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(io)?;
        Ok(())
    }
}

/// Order `p^f` of the image of wild inertia at infinity, with
/// `f = ord_{D-1}(p)`.
pub fn wild_inertia_image_order(p: u64, degree: u64) -> Result<u128> {
    if degree < 3 {
        return Err(Error::InvalidSpec(format!(
            "D = {degree} must be at least 3"
        )));
    }
    if degree.is_multiple_of(p) || (degree - 1).is_multiple_of(p) {
        return Err(Error::InvalidSpec(format!(
            "D = {degree} and D - 1 must both be prime to p = {p}"
        )));
    }
    let f = mult_order(p, degree - 1)?;
    (p as u128)
        .checked_pow(f)
        .ok_or_else(|| Error::Internal(format!("{p}^{f} overflows")))
}
