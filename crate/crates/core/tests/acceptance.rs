//! Acceptance suite. Prints one PASS/FAIL line per criterion; exits nonzero
//! if any criterion fails other than those listed in `KNOWN_RED`.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;

use common::{binomial_degree, corpus, corpus_configs, integer_ratio, range, CORPUS_DEGREE_CAP};
use qrious::dfact::{build_cyclotomic, build_ratio};
use qrious::families::{
    enumerate_admissible_partitions, listed_admissible, FamilyId, FamilyInstance, Registry,
};
use qrious::identities::{check_b_recursion, check_pascal, check_qdixon};
use qrious::scanner::{
    find_threshold, scan_family, scan_to_file, Check, Property, ScanConfig, ScanRecord,
};
use qrious::shape::{analyze, check_unimodal};
use qrious::{FactorialPair, Poly};

const GOLDEN_BUDGET: Duration = Duration::from_secs(1);
const SWEEP_BUDGET: Duration = Duration::from_secs(600);
const PERF_BUDGET: Duration = Duration::from_secs(60);
const PERF_DEGREE: i64 = 50_000;
const LANDAU_SAMPLE: usize = 200;
const QUOTIENT_DEGREE_LIMIT: i64 = 500;

/// Criteria that cannot be met as stated; reported, never counted as passing.
const KNOWN_RED: &[u32] = &[6];

const B41: [i64; 19] = [
    1, 1, 3, 4, 7, 8, 12, 12, 15, 14, 15, 12, 12, 8, 7, 4, 3, 1, 1,
];

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn pair(s: &str) -> FactorialPair {
    s.parse().unwrap()
}

fn golden_value() -> Outcome {
    let start = Instant::now();
    let p = pair("8,1/4,3,2");
    let expected = Poly::from_i64s(&B41);
    let cyc = build_cyclotomic(&p).unwrap();
    let rat = build_ratio(&p).unwrap();
    let t = start.elapsed();
    outcome(
        cyc == expected && rat == expected && t < GOLDEN_BUDGET,
        format!("both builders match 19 coefficients, {t:?}"),
    )
}

struct CorpusFacts {
    oracle_mismatches: Vec<String>,
    structural_failures: Vec<String>,
    parity_mismatches: Vec<String>,
    size: usize,
    quotient_checked: usize,
    even_checked: usize,
}

/// One pass over the corpus: both builders, structural invariants and the
/// parity/(1+q) equivalence on even degree.
fn corpus_pass(corpus: &[FamilyInstance]) -> CorpusFacts {
    struct Row {
        oracle: Option<String>,
        structural: Option<String>,
        parity: Option<String>,
        quotient: bool,
        even: bool,
    }
    let rows: Vec<Row> = corpus
        .par_iter()
        .map(|inst| {
            let p = &inst.pair;
            let cyc = build_cyclotomic(p).unwrap();
            let rat = build_ratio(p).unwrap();
            let oracle = (cyc != rat).then(|| inst.to_string());
            let c = cyc.coeffs();
            let k = c.len() - 1;
            let palindromic = (0..=k).all(|i| c[i] == c[k - i]);
            let deg_ok =
                cyc.degree() == Some(binomial_degree(p) as usize) && p.degree() as usize == k;
            let quotient = p.degree() <= QUOTIENT_DEGREE_LIMIT;
            let q1_ok = !quotient || cyc.eval_at_one() == BigInt::from(integer_ratio(p));
            let structural = (!(palindromic && c[0].is_one() && deg_ok && q1_ok))
                .then(|| format!("{inst}: pal={palindromic} deg={deg_ok} q1={q1_ok}"));
            let report = analyze(&cyc).unwrap();
            let even = k.is_multiple_of(2) && (k == 0 || !c[1].is_negative());
            let parity = (even && report.parity_unimodal.holds != report.one_plus_q_unimodal.holds)
                .then(|| inst.to_string());
            Row {
                oracle,
                structural,
                parity,
                quotient,
                even,
            }
        })
        .collect();
    CorpusFacts {
        oracle_mismatches: rows.iter().filter_map(|r| r.oracle.clone()).collect(),
        structural_failures: rows.iter().filter_map(|r| r.structural.clone()).collect(),
        parity_mismatches: rows.iter().filter_map(|r| r.parity.clone()).collect(),
        size: rows.len(),
        quotient_checked: rows.iter().filter(|r| r.quotient).count(),
        even_checked: rows.iter().filter(|r| r.even).count(),
    }
}

fn oracle_equivalence(facts: &CorpusFacts) -> Outcome {
    outcome(
        facts.oracle_mismatches.is_empty(),
        format!(
            "{} instances, {} mismatches {:?}",
            facts.size,
            facts.oracle_mismatches.len(),
            facts.oracle_mismatches.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn unimodality_sweep(records: &mut Vec<ScanRecord>) -> Outcome {
    let start = Instant::now();
    let reg = Registry::default();
    let mut sweep = Vec::new();
    for cfg in corpus_configs() {
        let cfg = cfg.with_checks(&[Check::Landau, Check::Positivity, Check::OnePlusQUnimodal]);
        sweep.extend(scan_family(&cfg, &reg).unwrap());
    }
    sweep.retain(|r| {
        let symmetric = matches!(r.instance.family, FamilyId::Qbinom | FamilyId::C);
        !(symmetric && r.instance.params.n > r.instance.params.m)
    });
    let skipped = sweep.iter().filter(|r| r.skipped).count();
    sweep.retain(|r| !r.skipped);
    let t = start.elapsed();
    let bad: Vec<String> = sweep
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.instance.to_string())
        .collect();
    let n = sweep.len();
    records.extend(sweep);
    outcome(
        bad.is_empty() && t < SWEEP_BUDGET,
        format!(
            "{n} instances ({skipped} above degree {CORPUS_DEGREE_CAP} skipped), {} counterexamples {:?}, {t:?}",
            bad.len(),
            bad.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn exception_reproduction(records: &mut Vec<ScanRecord>) -> Outcome {
    let cfg = ScanConfig::new(FamilyId::B)
        .with_mn(range(1, 12), range(1, 12))
        .with_checks(&[Check::Unimodal]);
    let recs = scan_family(&cfg, &Registry::default()).unwrap();
    let found: BTreeSet<(u64, u64)> = recs
        .iter()
        .filter(|r| r.instance.params.n < r.instance.params.m)
        .filter(|r| !r.verdicts[&Check::Unimodal])
        .map(|r| (r.instance.params.m.unwrap(), r.instance.params.n.unwrap()))
        .collect();
    records.extend(recs);
    let mut expected: BTreeSet<(u64, u64)> = [(4, 1), (5, 1), (7, 1), (8, 1), (8, 3)]
        .into_iter()
        .collect();
    expected.extend((1..=5).map(|k| (2 * k + 1, 2 * k - 1)));
    outcome(found == expected, format!("non-unimodal {found:?}"))
}

fn identity_suites() -> Outcome {
    let pascal: Vec<(u64, u64)> = (1..=30u64)
        .flat_map(|m| (1..=30).map(move |n| (m, n)))
        .collect();
    let pascal_fail = pascal
        .par_iter()
        .filter(|&&(m, n)| !check_pascal(m, n))
        .count();
    let rec: Vec<(u64, u64)> = (2..=30u64)
        .flat_map(|m| (1..m).map(move |n| (m, n)))
        .collect();
    let rec_fail = rec
        .par_iter()
        .filter(|&&(m, n)| !check_b_recursion(m, n).unwrap())
        .count();
    let dixon: Vec<(u64, u64, u64)> = (0..=6u64)
        .flat_map(|l| (0..=6).flat_map(move |m| (0..=6).map(move |n| (l, m, n))))
        .collect();
    let dixon_fail = dixon
        .par_iter()
        .filter(|&&(l, m, n)| !check_qdixon(l, m, n).unwrap())
        .count();
    outcome(
        pascal_fail + rec_fail + dixon_fail == 0,
        format!(
            "pascal {}/{}, recursion {}/{}, dixon {}/{} failing",
            pascal_fail,
            pascal.len(),
            rec_fail,
            rec.len(),
            dixon_fail,
            dixon.len()
        ),
    )
}

fn partition_enumeration() -> Outcome {
    let found: BTreeSet<_> = enumerate_admissible_partitions(11, 12)
        .into_iter()
        .collect();
    let listed: BTreeSet<_> = listed_admissible().into_iter().collect();
    let missing = listed.difference(&found).count();
    let extra: Vec<String> = found
        .difference(&listed)
        .take(4)
        .map(|p| p.to_string())
        .collect();
    outcome(
        found == listed,
        format!(
            "{} partitions returned, {} listed missing, extras include {}",
            found.len(),
            missing,
            extra.join(" ")
        ),
    )
}

fn landau_suite(corpus: &[FamilyInstance]) -> Outcome {
    let cheb = pair("1,30/6,10,15").check_landau().holds;
    let bad = pair("1,1/2").check_landau();
    let bad_ok =
        !bad.holds && bad.witness.map(|x| x.to_string()) == Some("1/2".into()) && bad.value == -1;

    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    let sample: Vec<&FamilyInstance> = corpus.choose_multiple(&mut rng, LANDAU_SAMPLE).collect();
    let preserved = sample.par_iter().all(|inst| {
        let p = &inst.pair;
        let d = build_cyclotomic(p).unwrap();
        // A numerator 1 adds gap 1 without changing D; balancing removes it.
        let mut a = p.a().to_vec();
        a.push(1);
        let unbalanced = FactorialPair::new(a, p.b().to_vec()).unwrap();
        let balanced = unbalanced.balance().unwrap();
        let balance_ok = balanced.is_balanced()
            && build_cyclotomic(&balanced).unwrap() == d
            && build_ratio(&unbalanced).unwrap() == d;
        // Reduction keeps the verdict and is undone by scaling with the gcd.
        let r = p.reduce();
        let reduce_ok = r.is_coprime()
            && r.check_landau().holds == p.check_landau().holds
            && r.scale(p.gcd()).unwrap() == *p
            && build_cyclotomic(&r.scale(p.gcd()).unwrap()).unwrap() == d;
        balance_ok && reduce_ok
    });
    let exponents_ok = corpus
        .iter()
        .filter(|i| i.pair.check_landau().holds)
        .all(|i| i.pair.exponent_vector().values().all(|&e| e >= 0));
    outcome(
        cheb && bad_ok && preserved && exponents_ok,
        format!(
            "chebyshev={cheb} (1,1)/(2) witness={bad_ok} balance/reduce on {} pairs={preserved} exponents={exponents_ok}",
            sample.len()
        ),
    )
}

fn structural_invariants(facts: &CorpusFacts) -> Outcome {
    outcome(
        facts.structural_failures.is_empty(),
        format!(
            "{} instances, q=1 checked on {}, {} failures {:?}",
            facts.size,
            facts.quotient_checked,
            facts.structural_failures.len(),
            facts.structural_failures.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn implication_audits(records: &[ScanRecord], facts: &CorpusFacts) -> Outcome {
    let audited = records
        .iter()
        .filter(|r| r.verdicts.get(&Check::OnePlusQUnimodal) == Some(&true))
        .count();
    let violations = records
        .iter()
        .filter(|r| {
            r.verdicts.get(&Check::OnePlusQUnimodal) == Some(&true)
                && r.verdicts.get(&Check::Positivity) == Some(&false)
        })
        .count();
    let errors = records.iter().filter(|r| r.error.is_some()).count();
    outcome(
        violations == 0 && errors == 0 && facts.parity_mismatches.is_empty(),
        format!(
            "{} records, {audited} (1+q)-unimodal, {violations} not positive, {errors} errors; parity<=>(1+q) on {} even-degree: {} mismatches",
            records.len(),
            facts.even_checked,
            facts.parity_mismatches.len()
        ),
    )
}

fn threshold_search() -> Outcome {
    let n = find_threshold(&pair("8,1/4,3,2"), Property::Unimodal, 10).unwrap();
    outcome(n == Some(2), format!("N = {n:?}"))
}

fn determinism(records: &mut Vec<ScanRecord>) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScanConfig::new(FamilyId::B)
        .with_mn(range(1, 12), range(0, 12))
        .with_checks(&[
            Check::Landau,
            Check::Positivity,
            Check::Unimodal,
            Check::OnePlusQUnimodal,
        ]);
    let mut outputs = Vec::new();
    for workers in [1, 8] {
        cfg.workers = workers;
        let path = dir.path().join(format!("w{workers}.jsonl"));
        scan_to_file(&cfg, &Registry::default(), &path, false).unwrap();
        outputs.push(std::fs::read(&path).unwrap());
    }
    records.extend(qrious::scanner::read_records(&dir.path().join("w1.jsonl")).unwrap());
    let lines = outputs[0].iter().filter(|&&b| b == b'\n').count();
    outcome(
        outputs[0] == outputs[1] && lines > 0,
        format!(
            "{lines} lines, {} vs {} bytes",
            outputs[0].len(),
            outputs[1].len()
        ),
    )
}

fn performance() -> Outcome {
    let cheb = pair("1,30/6,10,15");
    let n = (1..)
        .find(|&n| cheb.scale(n).unwrap().degree() > PERF_DEGREE)
        .unwrap();
    let p = cheb.scale(n).unwrap();
    let start = Instant::now();
    let d = build_cyclotomic(&p).unwrap();
    let t = start.elapsed();
    let ok = d.degree() == Some(p.degree() as usize) && t < PERF_BUDGET;
    // Sanity: a dilation this large is still unimodal.
    let unimodal = check_unimodal(&d).holds;
    outcome(
        ok,
        format!(
            "n = {n}, degree {}, {} coefficient bits, {t:?}, unimodal={unimodal}",
            p.degree(),
            d.max_coeff_bits()
        ),
    )
}

fn main() {
    let corpus = corpus();
    let mut records = Vec::new();
    let facts = corpus_pass(&corpus);

    // Audits read the records produced by earlier criteria, so order matters.
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "golden value B(4,1)", golden_value()),
        (2, "oracle equivalence", oracle_equivalence(&facts)),
        (3, "(1+q)-unimodality sweep", unimodality_sweep(&mut records)),
        (
            4,
            "exception reproduction",
            exception_reproduction(&mut records),
        ),
        (5, "identity suites", identity_suites()),
        (6, "admissible partitions", partition_enumeration()),
        (7, "Landau property suite", landau_suite(&corpus)),
        (8, "structural invariants", structural_invariants(&facts)),
        (10, "threshold search", threshold_search()),
        (11, "determinism", determinism(&mut records)),
        (12, "performance", performance()),
        (
            9,
            "implication audits",
            implication_audits(&records, &facts),
        ),
    ];
    results.sort_by_key(|r| r.0);

    let mut unexpected = 0;
    for (id, name, o) in &results {
        let known = KNOWN_RED.contains(id);
        let tag = match (o.ok, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("{tag:<12} {id:>2} {name}: {}", o.detail);
        if !o.ok && !known {
            unexpected += 1;
        }
    }
    let passed = results.iter().filter(|r| r.2.ok).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
