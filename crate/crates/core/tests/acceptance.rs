//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use oddsaudit_core::audit::AuditOptions;
use oddsaudit_core::construct::Survivor;
use oddsaudit_core::probmodel::all_events;
use oddsaudit_core::rat::{int, rat};
use oddsaudit_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn f(num: i128, den: i128) -> Rat {
    common::Frac::new(num, den).to_rat()
}

fn tables() -> [(PaperExample, common::Table); 3] {
    [
        (PaperExample::Glymour, common::glymour_table()),
        (PaperExample::Modified, common::modified_table()),
        (PaperExample::Four, common::four_table()),
    ]
}

fn table_reproduction() -> Outcome {
    for (example, table) in tables() {
        let text = write_model(&paper_example(example));
        let model = parse_model(&text).map_err(|e| format!("{example}: {e}"))?;
        for (r, (s1, s2)) in common::ROWS.iter().enumerate() {
            let bits = SignVector::from_bools(&[*s1, *s2]);
            for i in 1..=model.n() {
                let (a, b) = table[r][i - 1];
                ensure(*model.atom(i, bits) == f(a, b), || {
                    format!(
                        "{example}: cell H_{i} {} is {}",
                        bits.bitstring(),
                        model.atom(i, bits)
                    )
                })?;
            }
        }
        let report =
            check_assumptions(&model, &AuditOptions::default()).map_err(|e| e.to_string())?;
        ensure(report.independence_violations.is_empty(), || {
            format!(
                "{example}: {} violations",
                report.independence_violations.len()
            )
        })?;
        ensure(report.n_ok, || format!("{example}: n_ok false"))?;
    }
    Ok("3 tables cell-for-cell, 0 violations after round-trip".into())
}

fn glymour_certainty_checks() -> Outcome {
    let model = paper_example(PaperExample::Glymour);
    let e1 = Event::literal(1, true);
    let e2 = Event::literal(2, true);
    let c = |e: &Event, i, side| model.cond(e, i, side).map_err(|e| e.to_string());
    ensure(c(&e2, 1, Side::GivenH)?.is_one(), || {
        "P(E_2|H_1) != 1".into()
    })?;
    ensure(c(&e2, 2, Side::GivenH)?.is_zero(), || {
        "P(E_2|H_2) != 0".into()
    })?;
    ensure(c(&e2, 3, Side::GivenH)?.is_zero(), || {
        "P(E_2|H_3) != 0".into()
    })?;
    let p1 = model.event_prob(&e1).map_err(|e| e.to_string())?;
    let table = common::glymour_table();
    ensure(
        p1 == common::prob(&table, common::e1(true)).to_rat(),
        || "P(E_1) disagrees with table".into(),
    )?;
    for i in 1..=3 {
        ensure(
            c(&e1, i, Side::GivenH)? == p1 && c(&e1, i, Side::GivenNotH)? == p1,
            || format!("E_1 is relevant to H_{i}"),
        )?;
    }
    Ok(format!(
        "P(E_2|H)=(1,0,0), P(E_1|H_i)=P(E_1|not H_i)=P(E_1)={p1}"
    ))
}

fn modified_counterexample() -> Outcome {
    let model = paper_example(PaperExample::Modified);
    let table = common::modified_table();
    let both = Event::all_true([1, 2]);
    let expected = [f(1, 2), f(1, 3), f(1, 6)];
    for i in 1..=3 {
        let post = model.posterior_exact(&both, i).map_err(|e| e.to_string())?;
        let oracle = common::posterior(&table, (Some(true), Some(true)), i).to_rat();
        ensure(post == expected[i - 1] && post == oracle, || {
            format!("P(H_{i}|E_1E_2) = {post}, oracle {oracle}")
        })?;
    }
    let report = check_assumptions(&model, &AuditOptions::default()).map_err(|e| e.to_string())?;
    ensure(report.condition1 == Condition1::Holds, || {
        format!("{:?}", report.condition1)
    })?;
    ensure(report.independence_violations.is_empty(), || {
        "independence violated".into()
    })?;
    ensure(report.relevance.values().any(|s| s.contains(&2)), || {
        "E_2 never updates".into()
    })?;
    Ok("posteriors (1/2,1/3,1/6), 0 violations, E_2 updates".into())
}

fn four_relevance() -> Outcome {
    let model = paper_example(PaperExample::Four);
    let table = common::four_table();
    let expected = [vec![1], vec![1], vec![2], vec![2]];
    for i in 1..=4 {
        let got: Vec<usize> = relevant_evidence(&model, i)
            .map_err(|e| e.to_string())?
            .into_iter()
            .collect();
        ensure(
            got == expected[i - 1] && got == common::relevant(&table, i),
            || format!("H_{i}: {got:?}"),
        )?;
    }
    Ok("H_1:{E_1} H_2:{E_1} H_3:{E_2} H_4:{E_2}".into())
}

const GRIDS: [(usize, u32); 7] = [(3, 1), (3, 2), (3, 3), (3, 4), (4, 2), (4, 3), (4, 4)];

fn theorem_sweeps() -> Outcome {
    let start = Instant::now();
    let mut witnesses = 0;
    let mut enumerated = 0;
    for (n, d) in GRIDS {
        let result = sweep(&SweepConfig::new(n, 2, d)).map_err(|e| format!("n={n} D={d}: {e}"))?;
        ensure(result.theorem_violations.is_empty(), || {
            format!(
                "n={n} D={d}: {} theorem violations",
                result.theorem_violations.len()
            )
        })?;
        witnesses += result.witnesses_with_updating;
        enumerated += result.models_enumerated;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || {
        format!("took {elapsed:?}")
    })?;
    ensure(witnesses > 0, || "no witnesses with updating".into())?;
    Ok(format!(
        "{enumerated} models, 0 violations, {witnesses} witnesses, {:.1}s",
        elapsed.as_secs_f64()
    ))
}

/// Runs every grid once, applying `check` to each distinct survivor.
fn over_survivors(check: impl Fn(&Survivor) -> Result<bool, String> + Sync) -> Result<u64, String> {
    let checked = AtomicU64::new(0);
    let failure = Mutex::new(None::<String>);
    for (n, d) in GRIDS {
        sweep_visit(&SweepConfig::new(n, 2, d), |s| match check(s) {
            Ok(true) => {
                checked.fetch_add(1, Ordering::Relaxed);
            }
            Ok(false) => {}
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
            }
        })
        .map_err(|e| format!("n={n} D={d}: {e}"))?;
        if let Some(e) = failure.lock().unwrap().take() {
            return Err(format!("n={n} D={d}: {e}"));
        }
    }
    Ok(checked.into_inner())
}

fn proof_identities() -> Outcome {
    let checked = over_survivors(|s| {
        let model = &s.model;
        for i in 1..=model.n() {
            if model.is_degenerate(i).map_err(|e| e.to_string())? {
                return Ok(false);
            }
        }
        let ids = check_pair_identities(model, 1, 2).map_err(|e| e.to_string())?;
        let brackets_zero = ids.bracket_products.values().all(Zero::is_zero);
        if !(ids.unconditional_independence && brackets_zero && ids.all_zero()) {
            return Err(format!("identities fail on {}", s.spec));
        }
        Ok(true)
    })?;
    ensure(checked > 0, || "no non-degenerate survivors".into())?;
    Ok(format!(
        "{checked} non-degenerate survivors, all identities exact"
    ))
}

/// Compares the odds route with Bayes' rule on every event of positive
/// probability and every non-degenerate hypothesis; returns comparisons made.
fn oracle_agreement(model: &Model) -> Result<u64, String> {
    let mut compared = 0;
    for e in all_events(model.m()) {
        if model.event_prob(&e).map_err(|e| e.to_string())?.is_zero() {
            continue;
        }
        for i in 1..=model.n() {
            if model.is_degenerate(i).map_err(|e| e.to_string())? {
                continue;
            }
            let exact = model.posterior_exact(&e, i).map_err(|e| e.to_string())?;
            let odds =
                duda_posterior(model, &e, i).map_err(|err| format!("H_{i} on {e}: {err}"))?;
            if exact != odds {
                return Err(format!("H_{i} on {e}: odds {odds} vs exact {exact}"));
            }
            compared += 1;
        }
    }
    Ok(compared)
}

fn oracle_equivalence() -> Outcome {
    let mut examples = 0;
    for example in PaperExample::ALL {
        examples +=
            oracle_agreement(&paper_example(example)).map_err(|e| format!("{example}: {e}"))?;
    }
    let survivors = over_survivors(|s| {
        oracle_agreement(&s.model)
            .map(|_| true)
            .map_err(|e| format!("{}: {e}", s.spec))
    })?;
    Ok(format!(
        "{examples} example comparisons, {survivors} survivors agree"
    ))
}

fn discussion_scenario() -> Outcome {
    let third = rat(1, 3);
    let scenario = MeasurementScenario {
        values: vec![
            (int(0), third.clone()),
            (int(2), third.clone()),
            (int(4), third.clone()),
        ],
        noise: vec![
            (int(-1), third.clone()),
            (int(0), third.clone()),
            (int(1), third),
        ],
        e1: Interval::at_most(int(2)),
        e2: Interval::at_most(int(2)),
    };
    let model = measurement_scenario(&scenario).map_err(|e| e.to_string())?;
    let report = check_assumptions(&model, &AuditOptions::default()).map_err(|e| e.to_string())?;
    ensure(report.violations_on(Side::GivenH).next().is_none(), || {
        "given-H independence violated".into()
    })?;
    let failing: Vec<usize> = report.violations_on(Side::GivenNotH).map(|v| v.i).collect();
    ensure(!failing.is_empty(), || {
        "given-not-H independence holds everywhere".into()
    })?;
    Ok(format!(
        "values {{0,2,4}}, noise +-1: given-H holds, given-not-H fails for H_{failing:?}"
    ))
}

fn random_rat(rng: &mut ChaCha8Rng) -> Rat {
    let den: i64 = rng.gen_range(1..=1000);
    rat(rng.gen_range(0..=den), den)
}

fn random_spec(rng: &mut ChaCha8Rng) -> ConditionalSpec {
    let n = rng.gen_range(2..=5);
    let m = rng.gen_range(1..=4);
    let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=1000)).collect();
    let total: i64 = weights.iter().sum::<i64>().max(1);
    let mut priors: Vec<Rat> = weights.iter().map(|&w| rat(w, total)).collect();
    if weights.iter().all(|&w| w == 0) {
        priors[0] = Rat::one();
    }
    let cond = (0..m)
        .map(|_| (0..n).map(|_| random_rat(rng)).collect())
        .collect();
    ConditionalSpec { priors, cond }
}

fn from_conditionals_property() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0dd5);
    for draw in 0..1000 {
        let spec = random_spec(&mut rng);
        let model = from_conditionals(&spec).map_err(|e| format!("draw {draw}: {e}"))?;
        for i in 1..=spec.n() {
            let violations = check_independence(&model, i, Side::GivenH, &AuditOptions::default())
                .map_err(|e| e.to_string())?;
            ensure(violations.is_empty(), || {
                format!("draw {draw}: H_{i} given-H violated")
            })?;
            let prior = model.prior(i).map_err(|e| e.to_string())?;
            ensure(prior == spec.priors[i - 1], || {
                format!("draw {draw}: prior H_{i}")
            })?;
            if prior.is_zero() {
                continue;
            }
            for j in 1..=spec.m() {
                let c = model
                    .cond(&Event::literal(j, true), i, Side::GivenH)
                    .map_err(|e| e.to_string())?;
                ensure(c == spec.cond[j - 1][i - 1], || {
                    format!("draw {draw}: P(E_{j}|H_{i})")
                })?;
            }
        }
    }
    Ok("1000 random specs: independent given H, exact round-trip".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("table reproduction", table_reproduction),
        (
            "Glymour certainty and irrelevance",
            glymour_certainty_checks,
        ),
        ("modified-model counterexample", modified_counterexample),
        ("four-hypothesis relevance pattern", four_relevance),
        ("theorem sweeps", theorem_sweeps),
        ("proof identities on survivors", proof_identities),
        ("odds route equals Bayes rule", oracle_equivalence),
        ("measurement scenario", discussion_scenario),
        ("product construction property", from_conditionals_property),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!(
                "PASS {} {name}: {detail} [{:.2}s]",
                k + 1,
                start.elapsed().as_secs_f64()
            ),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
