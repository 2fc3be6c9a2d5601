//! End-to-end acceptance checks. Each check prints one line with its verdict
//! and runtime; the process exits nonzero if any check fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use finmono::characters::MultChar;
use finmono::criteria::{
    check_digit_criterion, check_digit_criterion_a, check_v_criterion, gauss_criterion,
    is_known_case, mellin_oracle, search, CheckOptions, SystemSpec, Twist,
};
use finmono::digits::{
    digit_sum_abs, digit_sum_lower, digit_sum_upper, kubert_v, kubert_v_rl, FractionModZ,
};
use finmono::proofcheck::{
    verify_base_cases, verify_case_lemma, verify_induction_assembly, AssemblyConfig, CaseLemma,
};
use finmono::traces::{
    trace_table, twisted_trace, wild_inertia_image_order, ParameterGrid, ParameterPoint, TraceValue,
};
use finmono::{Error, FieldTable};
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn quadratic(p: u64, d: u64, ds: &[u64]) -> SystemSpec {
    SystemSpec::new(p, d, ds.to_vec(), Twist::Quadratic).unwrap()
}

fn integer_set(p: u64, f: u32) -> std::result::Result<BTreeSet<i64>, String> {
    let k = FieldTable::new(p, f).map_err(err)?;
    let table =
        trace_table(&quadratic(3, 23, &[1]), &k, ParameterGrid::Full, u128::MAX).map_err(err)?;
    table
        .entries
        .iter()
        .map(|e| match &e.value {
            TraceValue::Integer(n) => i64::try_from(n).map_err(|e| e.to_string()),
            other => Err(format!("non-integral trace {other}")),
        })
        .collect()
}

fn co3_trace_set_81() -> Outcome {
    let set = integer_set(3, 4)?;
    ensure(
        set == BTreeSet::from([-2, -1, 0, 1, 2, 3]),
        format!("got {set:?}"),
    )?;
    Ok(format!("support {set:?}"))
}

fn co3_trace_set_243() -> Outcome {
    let set = integer_set(3, 5)?;
    ensure(
        set == BTreeSet::from([-5, -2, -1, 0, 1, 2]),
        format!("got {set:?}"),
    )?;
    Ok(format!("support {set:?}"))
}

fn integrality() -> Outcome {
    let spec = quadratic(3, 23, &[1, 5]);
    let mut total = 0;
    for f in 1..=4 {
        let k = FieldTable::new(3, f).map_err(err)?;
        let table = trace_table(&spec, &k, ParameterGrid::Full, u128::MAX).map_err(err)?;
        for e in &table.entries {
            ensure(
                e.value.as_integer().is_some(),
                format!("F_3^{f}: value {} not rational", e.value),
            )?;
        }
        total += table.entries.len();
    }
    // spot check the single-point API agrees with the table path
    let k = FieldTable::new(3, 4).map_err(err)?;
    let point = ParameterPoint::new(vec![k.from_index(5), k.from_index(17)]);
    ensure(
        matches!(twisted_trace(&spec, &k, &point), Ok(TraceValue::Integer(_))),
        "single-point twisted trace",
    )?;
    Ok(format!(
        "{total} traces over q in {{3,9,27,81}}, all integers"
    ))
}

fn proof_replay() -> Outcome {
    let base = verify_base_cases(4).map_err(err)?;
    ensure(base.passed(), format!("base cases: {:?}", base.failures))?;
    for lemma in CaseLemma::canonical() {
        let r = verify_case_lemma(&lemma);
        ensure(r.passed(), format!("case {}: {:?}", lemma.id, r.failures))?;
    }
    let cfg = AssemblyConfig {
        budget: 1 << 24,
        sample: None,
    };
    let mut pairs = base.pairs_checked;
    for f in [5, 6] {
        let r = verify_induction_assembly(f, cfg).map_err(err)?;
        ensure(r.passed(), format!("induction f = {f}: {:?}", r.failures))?;
        ensure(
            r.pairs_checked == 9u64.pow(f),
            "induction sweep was not exhaustive",
        )?;
        pairs += r.pairs_checked;
    }
    Ok(format!(
        "base cases, 4 lemmas, induction f = 5, 6 ({pairs} pairs)"
    ))
}

fn co3_criterion() -> Outcome {
    let spec = quadratic(3, 23, &[1, 5]);
    let opts = CheckOptions::default();
    for f in 1..=6 {
        let r = check_digit_criterion(&spec, f, opts).map_err(err)?;
        ensure(r.passed(), format!("digit criterion fails at f = {f}"))?;
    }
    for f in 1..=7 {
        let r = check_digit_criterion_a(&spec, f, Rational64::from(2), opts).map_err(err)?;
        ensure(r.passed(), format!("A = 2 fails at f = {f}"))?;
    }
    Ok("digit criterion f <= 6, A = 2 f <= 7".into())
}

fn known_cases() -> Outcome {
    let opts = CheckOptions::default();
    for (p, d) in [
        (3, 2),
        (3, 5),
        (3, 7),
        (3, 17),
        (3, 61),
        (5, 3),
        (5, 13),
        (5, 9),
    ] {
        ensure(
            !is_known_case(p, d).is_empty(),
            format!("({p}, {d}) not recognised as known"),
        )?;
        let spec = SystemSpec::for_search(p, d, Twist::Quadratic).map_err(err)?;
        for f in 1..=5 {
            let r = check_digit_criterion(&spec, f, opts).map_err(err)?;
            ensure(r.passed(), format!("({p}, {d}) fails at f = {f}"))?;
        }
    }
    Ok("p = 3: 2, 5, 7, 17, 61; p = 5: 3, 13, 9".into())
}

fn search_reproduction() -> Outcome {
    let survivors = search(3, 2..=500, Twist::Quadratic, 5).map_err(err)?;
    let found: BTreeSet<u64> = survivors.iter().map(|s| s.degree).collect();
    let mut expected: BTreeSet<u64> = (2..=500)
        .filter(|&d| d % 3 != 0 && !is_known_case(3, d).is_empty())
        .collect();
    expected.insert(23);
    let missing: Vec<_> = expected.difference(&found).collect();
    ensure(missing.is_empty(), format!("missing survivors {missing:?}"))?;
    let s23 = survivors.iter().find(|s| s.degree == 23).unwrap();
    ensure(!s23.is_known(), "23 flagged as a known case")?;
    let extra: Vec<u64> = found.difference(&expected).copied().collect();
    let mut stubborn = Vec::new();
    for &d in &extra {
        let spec = SystemSpec::for_search(3, d, Twist::Quadratic).map_err(err)?;
        let opts = CheckOptions {
            witness_cap: 0,
            stop_at_first: true,
        };
        let mut eliminated = false;
        for f in 6..=8 {
            if !check_digit_criterion(&spec, f, opts).map_err(err)?.passed() {
                eliminated = true;
                break;
            }
        }
        if !eliminated {
            stubborn.push(d);
        }
    }
    if !stubborn.is_empty() {
        // diagnostic only: where do they actually fall
        let mut fate = Vec::new();
        for &d in &stubborn {
            let spec = SystemSpec::for_search(3, d, Twist::Quadratic).map_err(err)?;
            let opts = CheckOptions {
                witness_cap: 0,
                stop_at_first: true,
            };
            let mut first = None;
            for f in 9..=11 {
                if !check_digit_criterion(&spec, f, opts).map_err(err)?.passed() {
                    first = Some(f);
                    break;
                }
            }
            fate.push(match first {
                Some(f) => format!("{d} (fails at f = {f})"),
                None => format!("{d} (passes f <= 11)"),
            });
        }
        return Err(format!(
            "survivors not eliminated by f_max = 8: {}",
            fate.join(", ")
        ));
    }
    Ok(format!(
        "{} survivors, {} beyond known cases and 23 ({extra:?}), all eliminated by f <= 8",
        found.len(),
        extra.len()
    ))
}

fn oracle_triangle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a1e);
    let opts = CheckOptions::default();
    let mut specs = 0;
    let mut mellin_tuples = 0;
    let f9 = FieldTable::new(3, 2).map_err(err)?;
    while specs < 50 {
        let p = if rng.gen_bool(0.5) { 3 } else { 5 };
        let d = rng.gen_range(3..=30);
        let mut ds = vec![1];
        if rng.gen_bool(0.5) {
            ds.push(rng.gen_range(2..d));
        }
        let twist = if rng.gen_bool(0.5) {
            Twist::Quadratic
        } else {
            Twist::Trivial
        };
        let Ok(spec) = SystemSpec::new(p, d, ds, twist) else {
            continue;
        };
        specs += 1;
        for f in 1..=3 {
            let digit = check_digit_criterion(&spec, f, opts).map_err(err)?;
            let v = check_v_criterion(&spec, f, opts).map_err(err)?;
            let k = FieldTable::new(p, f).map_err(err)?;
            let g = gauss_criterion(&spec, &k, opts).map_err(err)?;
            ensure(
                digit.verdict == v.verdict && digit.verdict == g.verdict,
                format!(
                    "{spec} f = {f}: digit {:?}, V {:?}, Gauss {:?}",
                    digit.verdict, v.verdict, g.verdict
                ),
            )?;
        }
        if p == 3 {
            let n = f9.order();
            let arity = spec.rank() + 1;
            let exps = spec.all_exponents();
            let target = if twist == Twist::Quadratic { n / 2 } else { 0 };
            for idx in 0..n.pow(arity as u32) {
                let mut rest = idx;
                let mut rho = Vec::with_capacity(arity);
                for _ in 0..arity {
                    rho.push(MultChar::new(&f9, (rest % n) as i64));
                    rest /= n;
                }
                let product = rho
                    .iter()
                    .zip(&exps)
                    .map(|(r, &e)| r.index() * e)
                    .sum::<u64>()
                    % n;
                if product != target {
                    continue;
                }
                let (direct, closed) = mellin_oracle(&spec, &f9, &rho).map_err(err)?;
                ensure(
                    direct == closed,
                    format!("{spec}: Mellin mismatch at {rho:?}"),
                )?;
                mellin_tuples += 1;
            }
        }
    }
    Ok(format!(
        "{specs} specs x f <= 3 agree; {mellin_tuples} admissible Mellin tuples over F_9"
    ))
}

fn digit_identities() -> Outcome {
    let mut checked = 0u64;
    for p in [3u64, 5] {
        for f in 1..=3u32 {
            for k in 1..=3u32 {
                let small = (p as i128).pow(f) - 1;
                let ratio = ((p as i128).pow(f * k) - 1) / small;
                for x in 0..small {
                    ensure(
                        digit_sum_upper(ratio * x, p, f * k) == k * digit_sum_upper(x, p, f)
                            && digit_sum_lower(ratio * x, p, f * k) == k * digit_sum_lower(x, p, f),
                        format!("Hasse-Davenport fails at p = {p}, f = {f}, k = {k}, x = {x}"),
                    )?;
                    checked += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10_000 {
        let p = [3u64, 5, 7, 11][rng.gen_range(0..4)];
        let x: u128 = rng.gen_range(1..1u128 << 60);
        let y: u128 = rng.gen_range(1..1u128 << 60);
        ensure(
            digit_sum_abs(x + y, p) <= digit_sum_abs(x, p) + digit_sum_abs(y, p),
            format!("subadditivity fails at {x}, {y}"),
        )?;
        ensure(
            digit_sum_abs(p as u128 * x, p) == digit_sum_abs(x, p),
            "[px] != [x]",
        )?;
    }
    let one = Rational64::from(1);
    let mut fractions = 0;
    for p in [3u64, 5, 7, 11] {
        for den in (1..=200u64).filter(|d| d % p != 0) {
            for num in 0..den {
                let x = FractionModZ::new(num as i128, den);
                let v = kubert_v(x, p).map_err(err)? + kubert_v_rl(-x, p).map_err(err)?;
                ensure(v == one, format!("V + V_RL(-x) != 1 at {x}, p = {p}"))?;
                fractions += 1;
            }
        }
    }
    Ok(format!(
        "{checked} Hasse-Davenport cases, 10^4 random pairs, {fractions} fractions"
    ))
}

fn wild_inertia() -> Outcome {
    let order = wild_inertia_image_order(3, 23).map_err(err)?;
    ensure(order == 243, format!("got {order}"))?;
    Ok("3^5 = 243".into())
}

struct Check {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let checks = [
        Check {
            id: 1,
            name: "Co3 trace set over F_81",
            limit: Duration::from_secs(1),
            run: co3_trace_set_81,
        },
        Check {
            id: 2,
            name: "Co3 trace set over F_243",
            limit: Duration::from_secs(5),
            run: co3_trace_set_243,
        },
        Check {
            id: 3,
            name: "integrality of two-parameter traces",
            limit: Duration::from_secs(120),
            run: integrality,
        },
        Check {
            id: 4,
            name: "digit-inequality proof replay",
            limit: Duration::from_secs(60),
            run: proof_replay,
        },
        Check {
            id: 5,
            name: "criterion for the Co3 system",
            limit: Duration::from_secs(600),
            run: co3_criterion,
        },
        Check {
            id: 6,
            name: "known cases pass",
            limit: Duration::from_secs(60),
            run: known_cases,
        },
        Check {
            id: 7,
            name: "search over p = 3, D <= 500",
            limit: Duration::from_secs(1800),
            run: search_reproduction,
        },
        Check {
            id: 8,
            name: "oracle triangle",
            limit: Duration::from_secs(300),
            run: oracle_triangle,
        },
        Check {
            id: 9,
            name: "digit identity suite",
            limit: Duration::from_secs(60),
            run: digit_identities,
        },
        Check {
            id: 10,
            name: "wild inertia order",
            limit: Duration::from_secs(1),
            run: wild_inertia,
        },
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for c in &checks {
        if !filter.is_empty()
            && !filter
                .iter()
                .any(|f| c.name.contains(f.as_str()) || *f == c.id.to_string())
        {
            continue;
        }
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (verdict, detail) = match outcome {
            Ok(detail) if elapsed <= c.limit => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("{detail}; took longer than {:?}", c.limit)),
            Err(e) => ("FAIL", e),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!(
            "acceptance {:>2} {verdict} {:<38} {:>9.3}s  {detail}",
            c.id,
            c.name,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        eprintln!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
