#![allow(dead_code)]

use num_bigint::BigUint;
use num_traits::One;
use qrious::families::{FamilyId, FamilyInstance, Registry};
use qrious::scanner::{enumerate_instances, ParamRange, ScanConfig};
use qrious::FactorialPair;

pub const CORPUS_DEGREE_CAP: i64 = 2000;

pub fn range(lo: u64, hi: u64) -> ParamRange {
    ParamRange::new(lo, hi).unwrap()
}

/// Scan configurations whose union is the verification corpus:
/// the three two-parameter families with `1 <= n <= m <= 40`, the height-two
/// family with `m <= 40`, `G2`/`F4` with `m, n <= 6`, both lambda families over
/// the fourteen listed partitions with `m, n <= 6`, and the built-in sporadic
/// entry.
pub fn corpus_configs() -> Vec<ScanConfig> {
    let mut out = Vec::new();
    for f in [FamilyId::Qbinom, FamilyId::B, FamilyId::C] {
        out.push(ScanConfig::new(f).with_mn(range(1, 40), range(1, 40)));
    }
    out.push(ScanConfig::new(FamilyId::Sound).with_mn(range(1, 40), range(1, 8)));
    for f in [
        FamilyId::G2,
        FamilyId::F4,
        FamilyId::BLambda,
        FamilyId::CLambda,
    ] {
        out.push(ScanConfig::new(f).with_mn(range(1, 6), range(1, 6)));
    }
    out.push(ScanConfig::new(FamilyId::Sporadic));
    for cfg in &mut out {
        cfg.degree_cap = CORPUS_DEGREE_CAP as u64;
    }
    out
}

fn keep(inst: &FamilyInstance) -> bool {
    let symmetric = matches!(inst.family, FamilyId::Qbinom | FamilyId::C);
    let (m, n) = (inst.params.m, inst.params.n);
    !(symmetric && n > m) && inst.pair.degree() <= CORPUS_DEGREE_CAP
}

pub fn corpus() -> Vec<FamilyInstance> {
    let reg = Registry::default();
    corpus_configs()
        .iter()
        .flat_map(|cfg| enumerate_instances(cfg, &reg).unwrap())
        .filter(keep)
        .collect()
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// The integer factorial ratio, computed directly from big factorials.
pub fn integer_ratio(p: &FactorialPair) -> BigUint {
    let num = p
        .a()
        .iter()
        .fold(BigUint::one(), |acc, &x| acc * factorial(x));
    let den = p
        .b()
        .iter()
        .fold(BigUint::one(), |acc, &x| acc * factorial(x));
    assert!((&num % &den) == BigUint::from(0u8), "{p} is not integral");
    num / den
}

/// `sum C(a_i, 2) - sum C(b_j, 2)` from the raw entries.
pub fn binomial_degree(p: &FactorialPair) -> i64 {
    let c2 = |x: &u64| (x * x.saturating_sub(1) / 2) as i64;
    p.a().iter().map(c2).sum::<i64>() - p.b().iter().map(c2).sum::<i64>()
}
