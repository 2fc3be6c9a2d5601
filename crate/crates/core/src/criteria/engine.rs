//! Ordered enumeration of `[0, bound)^arity`, split across the first
//! coordinate.

use num_rational::Rational64;

use super::{CheckOptions, CriterionId, CriterionReport, SystemSpec, Verdict, Witness};
use crate::par;

/// Evaluation of one tuple: `lhs` and `rhs` as numerators over a fixed
/// denominator, or `None` when the tuple is outside the quantifier.
pub(crate) type Eval = Option<(i64, i64)>;

#[derive(Debug, Default)]
pub(crate) struct Tally {
    pub tuples: u64,
    pub violations: u64,
    pub max_excess: Option<i64>,
    pub witnesses: Vec<(Vec<u64>, i64, i64)>,
}

impl Tally {
    fn record(&mut self, xs: &[u64], lhs: i64, rhs: i64, cap: usize) -> bool {
        self.tuples += 1;
        let excess = lhs - rhs;
        self.max_excess = Some(self.max_excess.map_or(excess, |m| m.max(excess)));
        if lhs > rhs {
            self.violations += 1;
            if self.witnesses.len() < cap {
                self.witnesses.push((xs.to_vec(), lhs, rhs));
            }
            return true;
        }
        false
    }

    fn merge(mut self, other: Tally, cap: usize) -> Tally {
        self.tuples += other.tuples;
        self.violations += other.violations;
        self.max_excess = match (self.max_excess, other.max_excess) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let room = cap.saturating_sub(self.witnesses.len());
        self.witnesses
            .extend(other.witnesses.into_iter().take(room));
        self
    }
}

pub(crate) fn enumerate<F>(arity: usize, bound: u64, opts: CheckOptions, eval: F) -> Tally
where
    F: Fn(&[u64]) -> Eval + Sync + Send,
{
    assert!(arity >= 1);
    if bound == 0 {
        return Tally::default();
    }
    let slices = par::map_range(0..bound, |first| {
        let mut tally = Tally::default();
        let mut xs = vec![0u64; arity];
        xs[0] = first;
        loop {
            if let Some((lhs, rhs)) = eval(&xs) {
                let violated = tally.record(&xs, lhs, rhs, opts.witness_cap);
                if violated && opts.stop_at_first {
                    break;
                }
            }
            // odometer over xs[1..], last coordinate fastest
            let mut i = arity - 1;
            loop {
                if i == 0 {
                    return tally;
                }
                xs[i] += 1;
                if xs[i] < bound {
                    break;
                }
                xs[i] = 0;
                i -= 1;
            }
        }
        tally
    });
    slices
        .into_iter()
        .fold(Tally::default(), |acc, t| acc.merge(t, opts.witness_cap))
}

pub(crate) fn report(
    spec: &SystemSpec,
    criterion: CriterionId,
    f: u32,
    den: i64,
    tally: Tally,
) -> CriterionReport {
    let ratio = |n: i64| Rational64::new(n, den);
    CriterionReport {
        spec: spec.clone(),
        criterion,
        f_checked: vec![f],
        verdict: if tally.violations == 0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        tuples_checked: tally.tuples,
        violations: tally.violations,
        max_excess: tally.max_excess.map(ratio),
        witnesses: tally
            .witnesses
            .into_iter()
            .map(|(xs, lhs, rhs)| Witness {
                f,
                xs,
                lhs: ratio(lhs),
                rhs: ratio(rhs),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visits_every_tuple_in_order() {
        let opts = CheckOptions {
            witness_cap: usize::MAX,
            stop_at_first: false,
        };
        let t = enumerate(3, 4, opts, |xs| (xs.len() == 3).then_some((1, 0)));
        assert_eq!(t.tuples, 64);
        let seen: Vec<_> = t.witnesses.iter().map(|w| w.0.clone()).collect();
        let mut sorted = seen.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(seen, sorted);
        assert_eq!(seen.len(), 64);
    }

    #[test]
    fn witness_cap_keeps_the_first() {
        let opts = CheckOptions {
            witness_cap: 3,
            stop_at_first: false,
        };
        let t = enumerate(2, 5, opts, |xs| Some(((xs[0] + xs[1]) as i64, 4)));
        // violations: x0 + x1 > 4
        assert_eq!(t.violations, 10);
        assert_eq!(t.max_excess, Some(4));
        let firsts: Vec<_> = t.witnesses.iter().map(|w| w.0.clone()).collect();
        assert_eq!(firsts, vec![vec![1, 4], vec![2, 3], vec![2, 4]]);
    }

    #[test]
    fn skipped_tuples_are_not_counted() {
        let t = enumerate(1, 10, CheckOptions::default(), |xs| {
            (xs[0] % 2 == 0).then_some((0, 0))
        });
        assert_eq!(t.tuples, 5);
        assert_eq!(t.violations, 0);
    }
}
