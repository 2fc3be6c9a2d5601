//! Mechanical replay of the digit-inequality argument for `(3, 23, {1, 5})`
//! under the quadratic twist:
//!
//! `[23x + 5y + (3^f - 1)/2]_3 <= [x]_3 + [y]_3 + f + 2` for `0 <= x, y < 3^f`.
//!
//! The base cases `f <= 4` are swept exhaustively. For larger `f` the
//! induction splits on the residue of `x` into four cases; case `k` writes
//! `x = 3^k a + b`, `y = 3^k c + d` and uses
//!
//! `23x + 5y + (3^f-1)/2 = 3^k (23a + 5c + (3^{f-k}-1)/2) + 23b + 5d + (3^k-1)/2`
//!
//! together with the finite lemma `[23b + 5d + (3^k-1)/2]_3 <= [b]_3 + [d]_3 + k`.
//! Slack 2 on the right with `f(p-1)/2 = f` is the absolute-digit-sum
//! criterion at `A = 2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::digits::digit_sum_abs;
use crate::error::{Error, Result};
use crate::par;

const P: u64 = 3;
const LEADING: u128 = 23;
const SECOND: u128 = 5;
/// Right-hand slack beyond `f`.
pub const SLACK: u32 = 2;
/// Largest `f` swept exhaustively regardless of budget.
pub const EXHAUSTIVE_LIMIT: u32 = 12;
/// Failure records kept per report.
pub const FAILURE_CAP: usize = 100;

fn ds(x: u128) -> u32 {
    digit_sum_abs(x, P)
}

fn pow3(e: u32) -> u128 {
    3u128.pow(e)
}

/// `[23x + 5y + (3^f-1)/2]_3` and `[x]_3 + [y]_3 + f + 2`.
pub fn main_inequality(f: u32, x: u128, y: u128) -> (u32, u32) {
    let lhs = ds(LEADING * x + SECOND * y + (pow3(f) - 1) / 2);
    (lhs, ds(x) + ds(y) + f + SLACK)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseLemma {
    pub id: u8,
    /// `3^k`.
    pub modulus: u64,
    /// Residues `b = x mod 3^k` governed by this case.
    pub b_set: Vec<u64>,
    /// `d` ranges over `0..d_bound`.
    pub d_bound: u64,
    /// `(3^k - 1)/2`.
    pub offset: u64,
    /// `k`.
    pub slack: u32,
}

impl CaseLemma {
    /// The four cases. Case 1 has `b = 0` implicitly.
    pub fn canonical() -> Vec<CaseLemma> {
        let mk = |id: u8, b_set: Vec<u64>| {
            let modulus = P.pow(id as u32);
            CaseLemma {
                id,
                modulus,
                b_set,
                d_bound: modulus,
                offset: (modulus - 1) / 2,
                slack: id as u32,
            }
        };
        vec![
            mk(1, vec![0]),
            mk(2, vec![1, 4, 7]),
            mk(3, vec![2, 5, 11, 14, 23, 26]),
            mk(4, vec![8, 17, 20, 35, 44, 47, 62, 71, 74]),
        ]
    }

    /// The case governing `x`.
    pub fn for_x(x: u128) -> u8 {
        match x % 3 {
            0 => 1,
            1 => 2,
            _ if matches!(x % 27, 8 | 17 | 20) => 4,
            _ => 3,
        }
    }

    /// `[23b + 5d + offset]_3` and `[b]_3 + [d]_3 + slack`.
    pub fn evaluate(&self, b: u64, d: u64) -> (u32, u32) {
        let lhs = ds(LEADING * b as u128 + SECOND * d as u128 + self.offset as u128);
        (lhs, ds(b as u128) + ds(d as u128) + self.slack)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProofFailure {
    pub f: Option<u32>,
    pub x: u128,
    pub y: u128,
    pub lhs: u32,
    pub rhs: u32,
    pub step: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    Exhaustive,
    Sampled { seed: u64, count: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProofReport {
    pub id: String,
    pub range: String,
    pub mode: SweepMode,
    pub pairs_checked: u64,
    /// Pairs where the inequality is an equality.
    pub tight: u64,
    pub failure_count: u64,
    /// First failures, at most [`FAILURE_CAP`].
    pub failures: Vec<ProofFailure>,
}

impl ProofReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

#[derive(Debug, Default)]
struct Sweep {
    pairs: u64,
    tight: u64,
    failure_count: u64,
    failures: Vec<ProofFailure>,
}

impl Sweep {
    fn record(&mut self, lhs: u32, rhs: u32, fail: impl FnOnce() -> ProofFailure) {
        self.pairs += 1;
        if lhs == rhs {
            self.tight += 1;
        }
        if lhs > rhs {
            self.fail(fail());
        }
    }

    fn fail(&mut self, failure: ProofFailure) {
        self.failure_count += 1;
        if self.failures.len() < FAILURE_CAP {
            self.failures.push(failure);
        }
    }

    fn merge(mut self, other: Sweep) -> Sweep {
        self.pairs += other.pairs;
        self.tight += other.tight;
        self.failure_count += other.failure_count;
        let room = FAILURE_CAP.saturating_sub(self.failures.len());
        self.failures.extend(other.failures.into_iter().take(room));
        self
    }

    fn into_report(self, id: String, range: String, mode: SweepMode) -> ProofReport {
        ProofReport {
            id,
            range,
            mode,
            pairs_checked: self.pairs,
            tight: self.tight,
            failure_count: self.failure_count,
            failures: self.failures,
        }
    }
}

/// Check a case lemma on every `(b, d)`.
pub fn verify_case_lemma(lemma: &CaseLemma) -> ProofReport {
    let mut sweep = Sweep::default();
    for &b in &lemma.b_set {
        for d in 0..lemma.d_bound {
            let (lhs, rhs) = lemma.evaluate(b, d);
            sweep.record(lhs, rhs, || ProofFailure {
                f: None,
                x: b as u128,
                y: d as u128,
                lhs,
                rhs,
                step: "case lemma",
            });
        }
    }
    sweep.into_report(
        format!("case {}", lemma.id),
        format!("b in {:?}, d < {}", lemma.b_set, lemma.d_bound),
        SweepMode::Exhaustive,
    )
}

fn sweep_exhaustive(f: u32, check: impl Fn(u32, u128, u128, &mut Sweep) + Sync + Send) -> Sweep {
    let bound = pow3(f);
    par::map_range(0..bound as u64, |x| {
        let mut s = Sweep::default();
        for y in 0..bound {
            check(f, x as u128, y, &mut s);
        }
        s
    })
    .into_iter()
    .fold(Sweep::default(), Sweep::merge)
}

fn direct_check(f: u32, x: u128, y: u128, s: &mut Sweep) {
    let (lhs, rhs) = main_inequality(f, x, y);
    s.record(lhs, rhs, || ProofFailure {
        f: Some(f),
        x,
        y,
        lhs,
        rhs,
        step: "direct",
    });
}

/// The inequality at every `f <= f_max` and every `0 <= x, y < 3^f`.
pub fn verify_base_cases(f_max: u32) -> Result<ProofReport> {
    if f_max == 0 {
        return Err(Error::InvalidSpec("f_max must be positive".into()));
    }
    if f_max > EXHAUSTIVE_LIMIT {
        return Err(Error::InvalidSpec(format!(
            "base cases are swept exhaustively only up to f = {EXHAUSTIVE_LIMIT}"
        )));
    }
    let sweep = (1..=f_max)
        .map(|f| sweep_exhaustive(f, direct_check))
        .fold(Sweep::default(), Sweep::merge);
    Ok(sweep.into_report(
        "base cases".into(),
        format!("1 <= f <= {f_max}, 0 <= x, y < 3^f"),
        SweepMode::Exhaustive,
    ))
}

/// Replay the induction step at `(x, y)`: pick the case from `x`, split,
/// check the algebraic identity, subadditivity of the split, the case
/// lemma, the inductive bound at the reduced pair, and that the chained
/// bound is the claimed right-hand side. Also checks the inequality
/// directly.
fn replay_check(f: u32, x: u128, y: u128, s: &mut Sweep, lemmas: &[CaseLemma]) {
    direct_check(f, x, y, s);
    let lemma = &lemmas[CaseLemma::for_x(x) as usize - 1];
    let k = lemma.id as u32;
    let m = lemma.modulus as u128;
    let (a, b, c, d) = (x / m, x % m, y / m, y % m);
    let mut bad = |step: &'static str, lhs: u32, rhs: u32| {
        s.fail(ProofFailure {
            f: Some(f),
            x,
            y,
            lhs,
            rhs,
            step,
        })
    };
    if !lemma.b_set.contains(&(b as u64)) {
        bad("residue outside case", 0, 0);
        return;
    }
    let inner = LEADING * a + SECOND * c + (pow3(f - k) - 1) / 2;
    let tail = LEADING * b + SECOND * d + lemma.offset as u128;
    let whole = LEADING * x + SECOND * y + (pow3(f) - 1) / 2;
    if whole != m * inner + tail {
        bad("identity", 0, 0);
        return;
    }
    let direct = ds(whole);
    if direct > ds(inner) + ds(tail) {
        bad("subadditivity", direct, ds(inner) + ds(tail));
    }
    let (case_lhs, case_rhs) = lemma.evaluate(b as u64, d as u64);
    if case_lhs > case_rhs {
        bad("case lemma", case_lhs, case_rhs);
    }
    let (ind_lhs, ind_rhs) = main_inequality(f - k, a, c);
    if ind_lhs > ind_rhs {
        bad("inductive bound", ind_lhs, ind_rhs);
    }
    let chained = ind_rhs + case_rhs;
    let claimed = ds(x) + ds(y) + f + SLACK;
    if ds(x) != ds(a) + ds(b) || ds(y) != ds(c) + ds(d) || chained != claimed {
        bad("chain", chained, claimed);
    }
    if direct > chained {
        bad("chained bound", direct, chained);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssemblyConfig {
    /// Largest number of pairs swept exhaustively.
    pub budget: u128,
    /// Uniform sampling `(seed, count)` used when `9^f` exceeds the budget.
    pub sample: Option<(u64, u64)>,
}

/// The inequality at one `f >= 5` together with a structural replay of the
/// induction step at each tested pair.
pub fn verify_induction_assembly(f: u32, config: AssemblyConfig) -> Result<ProofReport> {
    if f < 5 {
        return Err(Error::InvalidSpec(format!(
            "the induction step starts at f = 5, got {f}"
        )));
    }
    if f > 40 {
        return Err(Error::InvalidSpec(format!(
            "f = {f} is too large for u128 sums"
        )));
    }
    let lemmas = CaseLemma::canonical();
    let pairs = pow3(f).saturating_mul(pow3(f));
    let range = format!("f = {f}, 0 <= x, y < 3^{f}");
    let id = "induction step".to_string();
    if pairs <= config.budget && f <= EXHAUSTIVE_LIMIT {
        let sweep = sweep_exhaustive(f, |f, x, y, s| replay_check(f, x, y, s, &lemmas));
        return Ok(sweep.into_report(id, range, SweepMode::Exhaustive));
    }
    let Some((seed, count)) = config.sample else {
        return Err(Error::BudgetExceeded {
            needed: pairs,
            budget: config.budget,
        });
    };
    let bound = pow3(f);
    // fixed chunking keeps the sample independent of the thread count
    const CHUNK: u64 = 1 << 16;
    let chunks = count.div_ceil(CHUNK);
    let sweep = par::map_range(0..chunks, |chunk| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk);
        let len = CHUNK.min(count - chunk * CHUNK);
        let mut s = Sweep::default();
        for _ in 0..len {
            let x = rng.gen_range(0..bound);
            let y = rng.gen_range(0..bound);
            replay_check(f, x, y, &mut s, &lemmas);
        }
        s
    })
    .into_iter()
    .fold(Sweep::default(), Sweep::merge);
    Ok(sweep.into_report(id, range, SweepMode::Sampled { seed, count }))
}
