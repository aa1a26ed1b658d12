//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if a criterion fails that is not listed in `KNOWN_FAILURES`.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use oltsp_core::adversaries::{play, AdversaryRun, RingClosedCount, RingOpen, SemiLineCount, SemiLineOpenLoc, StarCount};
use oltsp_core::algorithms::{knapsack_select, policy_by_name, ray_summaries, Alg1, Alg3Star, KnapsackItem, KnapsackMode};
use oltsp_core::batch::{evaluate, run_batch, SuiteParams};
use oltsp_core::engine::{simulate, verify_outcome, Adversary, RequestStatus, Scenario};
use oltsp_core::fixtures::example1;
use oltsp_core::instance::{Instance, Variant};
use oltsp_core::metric::{MetricSpace, Point, SpaceKind};
use oltsp_core::oracle::{opt_bruteforce, opt_makespan};
use oltsp_core::report::ReportFormat;

/// Ratio tolerance for the bound criteria.
const TOL: f64 = 1e-9;
/// Tolerance for the forced ratios of the ring-open construction.
const ADV_TOL: f64 = 1e-6;
/// Matching tolerance for exact values.
const EXACT: f64 = 1e-9;
/// Instances per bound suite.
const SUITE: usize = 10_000;
/// Instances per space kind for the oracle cross-check.
const ORACLE_PER_KIND: usize = 1_000;

/// Criteria expected to fail, with the reason recorded alongside.
const KNOWN_FAILURES: &[usize] = &[1];

struct Record {
    seed: u64,
    policy: String,
    alg: f64,
    opt: f64,
    ratio: f64,
    violations: usize,
}

/// Shared tallies for criteria 9 and 10.
#[derive(Default)]
struct Tally {
    runs: AtomicUsize,
    dominance: AtomicUsize,
    unsound: AtomicUsize,
}

impl Tally {
    fn add(&self, opt: f64, alg: f64, violations: usize) {
        self.runs.fetch_add(1, Ordering::Relaxed);
        if alg < opt - 1e-9 {
            self.dominance.fetch_add(1, Ordering::Relaxed);
        }
        if violations > 0 {
            self.unsound.fetch_add(1, Ordering::Relaxed);
        }
    }
}

fn run_suite(suite: &SuiteParams, policies: &[&str], tally: &Tally) -> Vec<Record> {
    (0..suite.count)
        .into_par_iter()
        .flat_map_iter(|i| {
            let seed = suite.instance_seed(i);
            let inst = suite.instance(i).expect("generator");
            policies
                .iter()
                .map(|&p| {
                    let e = evaluate(&inst, p).unwrap_or_else(|err| panic!("{p} on seed {seed}: {err}"));
                    tally.add(e.opt, e.outcome.completion, e.violations.len());
                    Record {
                        seed,
                        policy: p.to_string(),
                        alg: e.outcome.completion,
                        opt: e.opt,
                        ratio: e.ratio,
                        violations: e.violations.len(),
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Worst ratio of `policy` and whether it stays within `bound`.
fn check_bound(records: &[Record], policy: &str, bound: f64) -> (bool, f64, usize, Option<u64>) {
    let mine: Vec<&Record> = records.iter().filter(|r| r.policy == policy).collect();
    let worst = mine.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio));
    let max = worst.map_or(0.0, |r| r.ratio);
    let bad = mine.iter().find(|r| r.ratio > bound + TOL).map(|r| r.seed);
    (bad.is_none(), max, mine.len(), bad)
}

struct Report {
    lines: Vec<(usize, bool, String)>,
}

impl Report {
    fn record(&mut self, id: usize, pass: bool, detail: String, started: Instant) {
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {id}: {detail} [{:.1}s]", started.elapsed().as_secs_f64());
        self.lines.push((id, pass, detail));
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= EXACT
}

fn criterion1(report: &mut Report) {
    let started = Instant::now();
    let inst = example1();
    let brute = opt_bruteforce(&inst).unwrap().makespan;
    let dp = opt_makespan(&inst).unwrap().makespan;
    let mut p = Alg1::new();
    let out = simulate(Scenario::Fixed(&inst), &mut p).unwrap();
    let c = p.choice().unwrap().clone();
    // Services by id for the order (q2, q1, q3): q1 at 10, q2 at 7, q3 at 12.
    let stated = [10.0, 7.0, 12.0];
    let services_ok = out.service_times.iter().zip(stated).all(|(&a, b)| close(a, b));
    let checks = [
        ("oracle brute force 12", close(brute, 12.0)),
        ("oracle dp 12", close(dp, 12.0)),
        ("T 6", close(c.start, 6.0)),
        ("order (q2,q1,q3)", c.order == [2, 1, 3]),
        ("objective 9/2", close(c.objective, 4.5)),
        ("completion 15", close(out.completion, 15.0)),
        ("services 7/10/12", services_ok),
        ("sound trajectory", verify_outcome(&inst, &out).is_empty()),
        ("under 1 s", started.elapsed().as_secs_f64() < 1.0),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let detail = format!(
        "worked example: T={} order={:?} objective={} completion={} services={:?} opt={}{}",
        c.start,
        c.order,
        c.objective,
        out.completion,
        out.service_times,
        dp,
        if failed.is_empty() { String::new() } else { format!("; failed: {}", failed.join(", ")) }
    );
    // Only the service times may deviate: the distance matrix places q2 at
    // distance 2 from the origin, which moves q2 to 8 and q1 to 11.
    assert!(failed.iter().all(|f| *f == "services 7/10/12"), "{detail}");
    report.record(1, failed.is_empty(), detail, started);
}

fn criterion9_oracle(tally: &Tally) -> (bool, String) {
    let kinds: [(SpaceKind, bool); 6] = [
        (SpaceKind::SemiLine, false),
        (SpaceKind::Line, false),
        (SpaceKind::Ring, false),
        (SpaceKind::Star, false),
        (SpaceKind::General, false),
        (SpaceKind::General, true),
    ];
    let mut mismatches = 0usize;
    let mut total = 0usize;
    for (k, (kind, asym)) in kinds.into_iter().enumerate() {
        for variant in [Variant::Open, Variant::Closed] {
            let mut suite = SuiteParams::new(kind, variant, 900_000 + 10_000 * k as u64, ORACLE_PER_KIND / 2);
            suite.asymmetric = asym;
            let bad: usize = (0..suite.count)
                .into_par_iter()
                .map(|i| {
                    let inst = suite.instance(i).unwrap();
                    let a = opt_makespan(&inst).unwrap();
                    let b = opt_bruteforce(&inst).unwrap();
                    usize::from(a.makespan != b.makespan)
                })
                .sum();
            mismatches += bad;
            total += suite.count;
        }
    }
    let runs = tally.runs.load(Ordering::Relaxed);
    let dom = tally.dominance.load(Ordering::Relaxed);
    (
        mismatches == 0 && dom == 0,
        format!("dp == brute force on {total} instances ({mismatches} mismatches); completion >= opt on {runs} runs ({dom} violations)"),
    )
}

fn bound_line(policy: &str, bound: f64, r: (bool, f64, usize, Option<u64>)) -> String {
    match r.3 {
        None => format!("{policy} max ratio {:.6} <= {bound:.6} over {} runs", r.1, r.2),
        Some(seed) => format!("{policy} max ratio {:.6} > {bound:.6} (seed {seed}) over {} runs", r.1, r.2),
    }
}

fn knapsack_item_sets(inst: &Instance) -> Option<(Vec<KnapsackItem>, f64)> {
    let MetricSpace::Star { rays } = inst.space else { return None };
    let lengths = {
        let mut l = vec![0.0f64; rays];
        for r in &inst.requests {
            if let Point::Ray { ray, depth } = r.point {
                l[ray] = l[ray].max(depth);
            }
        }
        l
    };
    let total: f64 = lengths.iter().sum();
    let statuses: Vec<RequestStatus> = inst
        .requests
        .iter()
        .map(|r| RequestStatus {
            id: r.id,
            point: Some(r.point),
            release: (r.release <= total).then_some(r.release),
            served: None,
        })
        .collect();
    let items = ray_summaries(rays, &statuses)
        .into_iter()
        .filter(|s| s.length > 0.0)
        .map(|s| KnapsackItem { index: s.index, weight: s.length, value: s.released_prefix })
        .collect();
    Some((items, total / 2.0))
}

fn value(items: &[KnapsackItem], picked: &[usize]) -> (f64, f64) {
    items
        .iter()
        .filter(|it| picked.contains(&it.index))
        .fold((0.0, 0.0), |(w, v), it| (w + it.weight, v + it.value))
}

struct AdvCase {
    label: &'static str,
    make: fn() -> Box<dyn Adversary>,
    policy: &'static str,
    min_ratio: f64,
    check_opt: fn(f64) -> bool,
}

fn adversary_case(case: &AdvCase, tally: &Tally) -> (bool, String, AdversaryRun) {
    let mut adv = (case.make)();
    let mut policy = policy_by_name(case.policy).unwrap();
    let r = play(adv.as_mut(), policy.as_mut()).unwrap_or_else(|e| panic!("{}: {e}", case.label));
    let violations = verify_outcome(&r.materialized, &r.outcome).len();
    tally.add(r.opt_completion, r.forced_completion, violations);
    // Replay on the realized instance.
    let mut again = policy_by_name(case.policy).unwrap();
    let replay = simulate(Scenario::Fixed(&r.materialized), again.as_mut()).unwrap();
    let replay_ok = close(replay.completion, r.forced_completion);
    let ok = r.forced_ratio >= case.min_ratio && (case.check_opt)(r.opt_completion) && replay_ok;
    let line = format!(
        "{} vs {}: forced {:.6} / opt {:.6} = {:.6}{}",
        case.label,
        case.policy,
        r.forced_completion,
        r.opt_completion,
        r.forced_ratio,
        if replay_ok { "" } else { " (replay differs)" }
    );
    (ok, line, r)
}

fn main() {
    let tally = Tally::default();
    let mut report = Report { lines: vec![] };

    criterion1(&mut report);

    // Criterion 2: alg1 on every space kind and both variants.
    let started = Instant::now();
    let kinds: [(SpaceKind, bool); 6] = [
        (SpaceKind::SemiLine, false),
        (SpaceKind::Line, false),
        (SpaceKind::Ring, false),
        (SpaceKind::Star, false),
        (SpaceKind::General, false),
        (SpaceKind::General, true),
    ];
    let per_suite = SUITE.div_ceil(kinds.len() * 2);
    let mut general: Vec<Record> = vec![];
    for (k, (kind, asym)) in kinds.into_iter().enumerate() {
        for (v, variant) in [Variant::Open, Variant::Closed].into_iter().enumerate() {
            let mut suite = SuiteParams::new(kind, variant, 1_000_000 * (2 * k + v + 1) as u64, per_suite);
            suite.asymmetric = asym;
            general.extend(run_suite(&suite, &["alg1", "wait-all"], &tally));
        }
    }
    let c2 = check_bound(&general, "alg1", 1.5);
    report.record(2, c2.0, bound_line("alg1", 1.5, c2), started);

    // Criterion 3: alg2 on non-line-like closed rings.
    let started = Instant::now();
    let mut suite = SuiteParams::new(SpaceKind::Ring, Variant::Closed, 20_000_000, SUITE);
    suite.max_n = 10;
    suite.non_line_like = true;
    let ring = run_suite(&suite, &["alg2-ring", "wait-all"], &tally);
    let c3 = check_bound(&ring, "alg2-ring", 5.0 / 3.0);
    report.record(3, c3.0, bound_line("alg2-ring", 5.0 / 3.0, c3), started);

    // Criterion 4: alg3 exact and FPTAS on closed stars, plus the knapsack
    // guarantee on the item sets the algorithm builds.
    let started = Instant::now();
    let mut suite = SuiteParams::new(SpaceKind::Star, Variant::Closed, 30_000_000, SUITE);
    suite.max_n = 12;
    suite.max_rays = 8;
    let star = run_suite(&suite, &["alg3-star:exact", "alg3-star:fptas=0.1", "wait-all"], &tally);
    let exact = check_bound(&star, "alg3-star:exact", 1.75);
    let fptas = check_bound(&star, "alg3-star:fptas=0.1", 1.85);
    let knap_bad: usize = (0..suite.count)
        .into_par_iter()
        .map(|i| {
            let inst = suite.instance(i).unwrap();
            let (items, cap) = knapsack_item_sets(&inst).unwrap();
            let e = knapsack_select(&items, cap, KnapsackMode::Exact).unwrap();
            let f = knapsack_select(&items, cap, KnapsackMode::Fptas(0.1)).unwrap();
            let (we, ve) = value(&items, &e);
            let (wf, vf) = value(&items, &f);
            // The selection the policy itself makes must respect the budget.
            let mut p = Alg3Star::new(KnapsackMode::Exact);
            simulate(Scenario::Fixed(&inst), &mut p).unwrap();
            let sel_ok = p.selected().is_none_or(|sel| value(&items, sel).0 <= cap + 1e-9);
            usize::from(!(vf >= 0.9 * ve - 1e-12 && we <= cap + 1e-9 && wf <= cap + 1e-9 && ve >= vf - 1e-12 && sel_ok))
        })
        .sum();
    report.record(
        4,
        exact.0 && fptas.0 && knap_bad == 0,
        format!(
            "{}; {}; knapsack fptas >= 0.9 exact on {} item sets ({knap_bad} failures)",
            bound_line("alg3:exact", 1.75, exact),
            bound_line("alg3:fptas=0.1", 1.85, fptas),
            suite.count
        ),
        started,
    );

    // Criterion 5: alg4 on open semi-lines.
    let started = Instant::now();
    let mut suite = SuiteParams::new(SpaceKind::SemiLine, Variant::Open, 40_000_000, SUITE);
    suite.max_n = 12;
    let semi_open = run_suite(&suite, &["alg4-semiline", "wait-all"], &tally);
    let c5 = check_bound(&semi_open, "alg4-semiline", 13.0 / 9.0);
    report.record(5, c5.0, bound_line("alg4-semiline", 13.0 / 9.0, c5), started);

    // Criterion 6: alg5 is optimal on every closed semi-line instance.
    let started = Instant::now();
    let mut suite = SuiteParams::new(SpaceKind::SemiLine, Variant::Closed, 50_000_000, SUITE);
    suite.max_n = 12;
    let mut semi_closed = run_suite(&suite, &["alg5-semiline", "wait-all"], &tally);
    let from_c2 = SuiteParams::new(SpaceKind::SemiLine, Variant::Closed, 2_000_000, per_suite);
    semi_closed.extend(run_suite(&from_c2, &["alg5-semiline"], &tally));
    let alg5: Vec<&Record> = semi_closed.iter().filter(|r| r.policy == "alg5-semiline").collect();
    let off = alg5.iter().find(|r| (r.alg - r.opt).abs() > 1e-9);
    report.record(
        6,
        off.is_none(),
        match off {
            None => format!("alg5 completion == opt on {} closed semi-line instances", alg5.len()),
            Some(r) => format!("alg5 {} != opt {} (seed {})", r.alg, r.opt, r.seed),
        },
        started,
    );

    // Criterion 7: wait-all within 2 on every suite.
    let started = Instant::now();
    let all: Vec<&Vec<Record>> = vec![&general, &ring, &star, &semi_open, &semi_closed];
    let mut worst = (0.0f64, 0u64);
    let mut n_wait = 0usize;
    for recs in &all {
        for r in recs.iter().filter(|r| r.policy == "wait-all") {
            n_wait += 1;
            if r.ratio > worst.0 {
                worst = (r.ratio, r.seed);
            }
        }
    }
    report.record(
        7,
        worst.0 <= 2.0 + TOL,
        format!("wait-all max ratio {:.6} (seed {}) <= 2 over {n_wait} runs", worst.0, worst.1),
        started,
    );

    // Criterion 8: adversaries.
    let started = Instant::now();
    let two_thirds = |o: f64| close(o, 2.0 / 3.0);
    let one = |o: f64| close(o, 1.0);
    let cases = [
        AdvCase { label: "ring-open", make: || Box::new(RingOpen::new()), policy: "alg1", min_ratio: 1.5 - ADV_TOL, check_opt: two_thirds },
        AdvCase { label: "ring-open", make: || Box::new(RingOpen::new()), policy: "greedy", min_ratio: 1.5 - ADV_TOL, check_opt: two_thirds },
        AdvCase { label: "ring-open", make: || Box::new(RingOpen::new()), policy: "wait-all", min_ratio: 1.5 - ADV_TOL, check_opt: two_thirds },
        AdvCase {
            label: "ring-closed-count:0.5",
            make: || Box::new(RingClosedCount::new(0.5)),
            policy: "greedy",
            min_ratio: 1.5,
            check_opt: one,
        },
        AdvCase {
            label: "ring-closed-count:0.5",
            make: || Box::new(RingClosedCount::new(0.5)),
            policy: "wait-all",
            min_ratio: 1.5,
            check_opt: one,
        },
        AdvCase {
            label: "star-count:0.5",
            make: || Box::new(StarCount::new(0.5, Variant::Closed)),
            policy: "greedy",
            min_ratio: 25.0 / 16.0,
            check_opt: |o| o <= 16.0 + EXACT,
        },
        AdvCase {
            label: "semiline-open-loc",
            make: || Box::new(SemiLineOpenLoc::new()),
            policy: "alg4-semiline",
            min_ratio: 4.0 / 3.0 - TOL,
            check_opt: |o| close(o, 2.0),
        },
        AdvCase {
            label: "semiline-closed-count",
            make: || Box::new(SemiLineCount::closed()),
            policy: "greedy",
            min_ratio: 4.0 / 3.0 - TOL,
            check_opt: |_| true,
        },
        AdvCase {
            label: "semiline-open-count",
            make: || Box::new(SemiLineCount::open()),
            policy: "greedy",
            min_ratio: 1.5 - TOL,
            check_opt: |_| true,
        },
    ];
    let mut ok8 = true;
    let mut lines = vec![];
    for case in &cases {
        let (ok, line, _) = adversary_case(case, &tally);
        ok8 &= ok;
        lines.push(format!("{}{line}", if ok { "" } else { "!! " }));
    }
    let mut spacing = RingClosedCount::new(0.5);
    let mut g = policy_by_name("greedy").unwrap();
    play(&mut spacing, g.as_mut()).unwrap();
    let spacing_ok = spacing.spacing() <= 0.5 / 4.0 + 1e-12;
    ok8 &= spacing_ok;
    lines.push(format!("ring-closed-count spacing {:.6} <= eps/4", spacing.spacing()));
    report.record(8, ok8, lines.join("; "), started);

    // Criterion 9: oracle equivalence and dominance.
    let started = Instant::now();
    let (ok9, detail9) = criterion9_oracle(&tally);
    report.record(9, ok9, detail9, started);

    // Criterion 10: sound trajectories and reproducible reports.
    let started = Instant::now();
    let unsound = tally.unsound.load(Ordering::Relaxed);
    let runs = tally.runs.load(Ordering::Relaxed);
    let mut bad_records = 0usize;
    for recs in &all {
        bad_records += recs.iter().filter(|r| r.violations > 0).count();
    }
    let mut replay = SuiteParams::new(SpaceKind::Ring, Variant::Closed, 7, 500);
    replay.non_line_like = true;
    let a = run_batch(&replay, "alg2-ring", Some(5.0 / 3.0)).unwrap();
    let b = run_batch(&replay, "alg2-ring", Some(5.0 / 3.0)).unwrap();
    let same = a.render(ReportFormat::Csv) == b.render(ReportFormat::Csv)
        && a.render(ReportFormat::Json) == b.render(ReportFormat::Json);
    report.record(
        10,
        unsound == 0 && bad_records == 0 && same,
        format!(
            "verify_outcome clean on {runs} runs ({unsound} unsound); repeated batch reports byte-identical: {same}"
        ),
        started,
    );

    let unexpected: Vec<usize> =
        report.lines.iter().filter(|(id, pass, _)| !pass && !KNOWN_FAILURES.contains(id)).map(|l| l.0).collect();
    let fixed: Vec<usize> = report.lines.iter().filter(|(id, pass, _)| *pass && KNOWN_FAILURES.contains(id)).map(|l| l.0).collect();
    if !fixed.is_empty() {
        println!("note: criteria {fixed:?} listed as known failures now pass");
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
