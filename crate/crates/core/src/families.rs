//! Named families of factorial pairs, the `B_lambda` / `C_lambda`
//! collections, and the sporadic-pair registry.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landau::FactorialPair;

/// An integer partition with parts stored in non-increasing order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Partition(Vec<u64>);

impl Partition {
    /// Fails unless the parts are positive and non-increasing.
    pub fn new(parts: Vec<u64>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument("partition has no parts".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidArgument(
                "partition parts must be positive".into(),
            ));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!(
                "partition parts must be non-increasing: {parts:?}"
            )));
        }
        Ok(Partition(parts))
    }

    pub fn parts(&self) -> &[u64] {
        &self.0
    }

    pub fn size(&self) -> u64 {
        self.0.iter().sum()
    }
}

impl TryFrom<Vec<u64>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<u64>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u64> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Accepts `3,2,1` or `(3,2,1)`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad partition `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// All partitions of `n` in reverse lexicographic order, e.g. `(3), (2,1), (1,1,1)`.
pub fn partitions_of(n: u64) -> Vec<Partition> {
    fn rec(rest: u64, cap: u64, prefix: &mut Vec<u64>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(prefix.clone()));
            return;
        }
        for part in (1..=rest.min(cap)).rev() {
            prefix.push(part);
            rec(rest - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, n, &mut Vec::new(), &mut out);
    }
    out
}

/// Partitions of every size `1..=max_size`, by size, then reverse lexicographic.
pub fn partitions_up_to(max_size: u64) -> Vec<Partition> {
    (1..=max_size).flat_map(partitions_of).collect()
}

/// The fourteen partitions of size at most 11 published as admissible.
pub const LISTED_ADMISSIBLE: [&[u64]; 14] = [
    &[1],
    &[1, 1],
    &[2, 1],
    &[2, 1, 1],
    &[3, 2],
    &[3, 2, 1],
    &[4, 2, 1],
    &[4, 3, 1],
    &[5, 3, 1],
    &[5, 2, 2],
    &[4, 3, 2],
    &[5, 3, 2],
    &[6, 4, 1],
    &[4, 4, 3],
];

pub fn listed_admissible() -> Vec<Partition> {
    LISTED_ADMISSIBLE
        .iter()
        .map(|p| Partition(p.to_vec()))
        .collect()
}

fn nonneg(x: i128, what: &str) -> Result<u64> {
    u64::try_from(x).map_err(|_| Error::DomainViolation(format!("{what} is negative")))
}

/// `((m+n), (m, n))`: the Gaussian binomial.
pub fn qbinom_pair(m: u64, n: u64) -> FactorialPair {
    FactorialPair::from_nonnegative(vec![m + n], vec![m, n])
}

/// `((2m, n), (m, m-n, 2n))`, defined for `m >= n`.
pub fn b_pair(m: u64, n: u64) -> Result<FactorialPair> {
    if m < n {
        return Err(Error::DomainViolation(format!("B({m},{n}) needs m >= n")));
    }
    Ok(FactorialPair::from_nonnegative(
        vec![2 * m, n],
        vec![m, m - n, 2 * n],
    ))
}

/// `((2m, 2n), (m, n, m+n))`: the q-super Catalan numbers.
pub fn c_pair(m: u64, n: u64) -> FactorialPair {
    FactorialPair::from_nonnegative(vec![2 * m, 2 * n], vec![m, n, m + n])
}

/// `((6m, n), (2m, 3m, m-5n, 6n))`, defined for `m >= 5n`.
pub fn sound_pair(m: u64, n: u64) -> Result<FactorialPair> {
    let gap = nonneg(m as i128 - 5 * n as i128, "m - 5n")?;
    Ok(FactorialPair::from_nonnegative(
        vec![6 * m, n],
        vec![2 * m, 3 * m, gap, 6 * n],
    ))
}

/// `((|l|m + m, n), (l_1 m, ..., l_r m, m - |l|n, |l|n + n))`, defined for `m >= |l|n`.
pub fn b_lambda_pair(lambda: &Partition, m: u64, n: u64) -> Result<FactorialPair> {
    let s = lambda.size();
    let gap = nonneg(m as i128 - (s * n) as i128, "m - |lambda| n").map_err(|_| {
        Error::DomainViolation(format!("B_{lambda}({m},{n}) needs m >= |lambda| n"))
    })?;
    let mut b: Vec<u64> = lambda.parts().iter().map(|&p| p * m).collect();
    b.extend([gap, (s + 1) * n]);
    Ok(FactorialPair::from_nonnegative(vec![(s + 1) * m, n], b))
}

/// `(((|l|+1)m, (|l|+1)n), (l_1 m, ..., l_r m, m + |l|n, n))`.
pub fn c_lambda_pair(lambda: &Partition, m: u64, n: u64) -> FactorialPair {
    let s = lambda.size();
    let mut b: Vec<u64> = lambda.parts().iter().map(|&p| p * m).collect();
    b.extend([m + s * n, n]);
    FactorialPair::from_nonnegative(vec![(s + 1) * m, (s + 1) * n], b)
}

/// The pair behind the `G2` constant term identity; height 2.
pub fn g2_pair(m: u64, n: u64) -> FactorialPair {
    FactorialPair::from_nonnegative(
        vec![2 * m, 2 * n, 3 * n, 3 * m + 3 * n],
        vec![m, n, n, m + n, m + 2 * n, 2 * m + 3 * n],
    )
}

/// The pair behind the `F4` constant term identity; height 4.
pub fn f4_pair(m: u64, n: u64) -> FactorialPair {
    FactorialPair::from_nonnegative(
        vec![
            2 * m,
            2 * n,
            3 * m,
            3 * n,
            4 * n,
            2 * m + 4 * n,
            4 * m + 2 * n,
            2 * m + 6 * n,
            4 * m + 4 * n,
            6 * m + 6 * n,
        ],
        vec![
            m,
            m,
            n,
            n,
            n,
            m + n,
            m + 2 * n,
            2 * m + n,
            m + 3 * n,
            2 * m + 3 * n,
            3 * m + 3 * n,
            3 * m + 4 * n,
            3 * m + 5 * n,
            5 * m + 6 * n,
        ],
    )
}

/// Left side of the q-Dixon summation:
/// `[l+m+n]! [2l]! [2m]! [2n]! / ([l]! [m]! [n]! [l+m]! [m+n]! [n+l]!)`.
pub fn dixon_pair(l: u64, m: u64, n: u64) -> FactorialPair {
    FactorialPair::from_nonnegative(
        vec![l + m + n, 2 * l, 2 * m, 2 * n],
        vec![l, m, n, l + m, m + n, n + l],
    )
}

/// Whether `lambda` passes Landau's criterion for both `B_lambda` (where
/// defined) and `C_lambda` at every `1 <= m, n <= grid_bound`.
pub fn is_admissible(lambda: &Partition, grid_bound: u64) -> bool {
    let s = lambda.size();
    (1..=grid_bound).all(|m| {
        (1..=grid_bound).all(|n| {
            let b_ok =
                m < s * n || b_lambda_pair(lambda, m, n).is_ok_and(|p| p.check_landau().holds);
            b_ok && c_lambda_pair(lambda, m, n).check_landau().holds
        })
    })
}

/// Partitions of size at most `max_size` that are admissible up to the grid
/// bound. This is a necessary condition only; ordered as [`partitions_up_to`].
pub fn enumerate_admissible_partitions(max_size: u64, grid_bound: u64) -> Vec<Partition> {
    partitions_up_to(max_size)
        .into_par_iter()
        .filter(|lambda| is_admissible(lambda, grid_bound))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyId {
    Qbinom,
    B,
    C,
    Sound,
    BLambda,
    CLambda,
    G2,
    F4,
    Dixon,
    Sporadic,
}

impl FamilyId {
    pub const ALL: [FamilyId; 10] = [
        FamilyId::Qbinom,
        FamilyId::B,
        FamilyId::C,
        FamilyId::Sound,
        FamilyId::BLambda,
        FamilyId::CLambda,
        FamilyId::G2,
        FamilyId::F4,
        FamilyId::Dixon,
        FamilyId::Sporadic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::Qbinom => "qbinom",
            FamilyId::B => "b",
            FamilyId::C => "c",
            FamilyId::Sound => "sound",
            FamilyId::BLambda => "b_lambda",
            FamilyId::CLambda => "c_lambda",
            FamilyId::G2 => "g2",
            FamilyId::F4 => "f4",
            FamilyId::Dixon => "dixon",
            FamilyId::Sporadic => "sporadic",
        }
    }

    /// Human-readable tuple template.
    pub fn describe(self) -> &'static str {
        match self {
            FamilyId::Qbinom => "(m+n)/(m,n)",
            FamilyId::B => "(2m,n)/(m,m-n,2n), m >= n",
            FamilyId::C => "(2m,2n)/(m,n,m+n)",
            FamilyId::Sound => "(6m,n)/(2m,3m,m-5n,6n), m >= 5n",
            FamilyId::BLambda => "(|l|m+m,n)/(l m,m-|l|n,|l|n+n), m >= |l|n",
            FamilyId::CLambda => "(|l|m+m,|l|n+n)/(l m,m+|l|n,n)",
            FamilyId::G2 => "(2m,2n,3n,3m+3n)/(m,n,n,m+n,m+2n,2m+3n)",
            FamilyId::F4 => "10 numerator, 14 denominator entries linear in m,n",
            FamilyId::Dixon => "(l+m+n,2l,2m,2n)/(l,m,n,l+m,m+n,n+l)",
            FamilyId::Sporadic => "registry entry by id",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// Family parameters. Fields a family does not use stay `None`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Partition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    /// Dilation factor applied to the resolved pair; absent means 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dilation: Option<u64>,
}

impl Params {
    pub fn mn(m: u64, n: u64) -> Self {
        Params {
            m: Some(m),
            n: Some(n),
            ..Params::default()
        }
    }

    fn need(v: Option<u64>, name: &str) -> Result<u64> {
        v.ok_or_else(|| Error::InvalidArgument(format!("missing parameter `{name}`")))
    }
}

/// A sporadic registry entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SporadicEntry {
    pub id: u64,
    #[serde(default)]
    pub label: String,
    pub pair: FactorialPair,
    #[serde(default)]
    pub source: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    id: u64,
    #[serde(default)]
    label: String,
    a: Vec<serde_json::Value>,
    b: Vec<serde_json::Value>,
    #[serde(default)]
    source: String,
}

fn entries_of(values: &[serde_json::Value], id: u64) -> Result<Vec<u64>> {
    values
        .iter()
        .map(|v| {
            v.as_u64().filter(|&x| x > 0).ok_or_else(|| {
                Error::Schema(format!("entry {id}: `{v}` is not a positive integer"))
            })
        })
        .collect()
}

/// Chebyshev's pair `(1,30)/(6,10,15)`, always present under id 0.
pub fn chebyshev_entry() -> SporadicEntry {
    SporadicEntry {
        id: 0,
        label: "Chebyshev".into(),
        pair: FactorialPair::new(vec![1, 30], vec![6, 10, 15]).expect("valid pair"),
        source: "built-in".into(),
    }
}

/// A validated set of sporadic pairs, keyed by id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Registry {
    entries: Vec<SporadicEntry>,
}

impl Default for Registry {
    fn default() -> Self {
        Registry {
            entries: vec![chebyshev_entry()],
        }
    }
}

impl Registry {
    /// Parses a JSON array of `{id, label, a, b, source}` objects and merges
    /// it with the built-in entry. Every entry must satisfy Landau's criterion
    /// and have height one.
    pub fn from_json(doc: &str) -> Result<Self> {
        let raw: Vec<RawEntry> =
            serde_json::from_str(doc).map_err(|e| Error::Schema(e.to_string()))?;
        let mut registry = Registry::default();
        for r in raw {
            let a = entries_of(&r.a, r.id)?;
            let b = entries_of(&r.b, r.id)?;
            let pair = FactorialPair::new(a, b).map_err(|e| Error::Schema(e.to_string()))?;
            let verdict = pair.check_landau();
            if !verdict.holds {
                return Err(Error::LandauRejection(format!(
                    "entry {} ({pair}) fails at x = {}",
                    r.id,
                    verdict.witness.expect("failing verdict has a witness")
                )));
            }
            if pair.reduce().height() != 1 {
                return Err(Error::Schema(format!(
                    "entry {} ({pair}) has height {}, expected 1",
                    r.id,
                    pair.height()
                )));
            }
            if let Some(prev) = registry.entries.iter().find(|e| e.id == r.id) {
                if prev.pair == pair {
                    continue;
                }
                return Err(Error::Schema(format!("duplicate registry id {}", r.id)));
            }
            registry.entries.push(SporadicEntry {
                id: r.id,
                label: r.label,
                pair,
                source: r.source,
            });
        }
        registry.entries.sort_by_key(|e| e.id);
        Ok(registry)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Registry::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn entries(&self) -> &[SporadicEntry] {
        &self.entries
    }

    pub fn get(&self, id: u64) -> Option<&SporadicEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn instances(&self) -> Vec<FamilyInstance> {
        self.entries
            .iter()
            .map(|e| FamilyInstance {
                family: FamilyId::Sporadic,
                params: Params {
                    id: Some(e.id),
                    ..Params::default()
                },
                pair: e.pair.clone(),
            })
            .collect()
    }
}

/// Registry document loader: the instances of every entry, built-in first.
pub fn load_sporadic_registry(doc: &str) -> Result<Vec<FamilyInstance>> {
    Ok(Registry::from_json(doc)?.instances())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyInstance {
    pub family: FamilyId,
    pub params: Params,
    pub pair: FactorialPair,
}

impl FamilyInstance {
    /// Resolves `family` at `params` to its pair, applying any dilation.
    pub fn resolve(family: FamilyId, params: Params, registry: &Registry) -> Result<Self> {
        let m = || Params::need(params.m, "m");
        let n = || Params::need(params.n, "n");
        let lambda = || {
            params
                .lambda
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("missing parameter `lambda`".into()))
        };
        let base = match family {
            FamilyId::Qbinom => qbinom_pair(m()?, n()?),
            FamilyId::B => b_pair(m()?, n()?)?,
            FamilyId::C => c_pair(m()?, n()?),
            FamilyId::Sound => sound_pair(m()?, n()?)?,
            FamilyId::BLambda => b_lambda_pair(lambda()?, m()?, n()?)?,
            FamilyId::CLambda => c_lambda_pair(lambda()?, m()?, n()?),
            FamilyId::G2 => g2_pair(m()?, n()?),
            FamilyId::F4 => f4_pair(m()?, n()?),
            FamilyId::Dixon => dixon_pair(Params::need(params.l, "l")?, m()?, n()?),
            FamilyId::Sporadic => {
                let id = Params::need(params.id, "id")?;
                registry
                    .get(id)
                    .ok_or_else(|| Error::InvalidArgument(format!("no registry entry {id}")))?
                    .pair
                    .clone()
            }
        };
        let pair = match params.dilation {
            Some(k) if k != 1 => base.scale(k)?,
            _ => base,
        };
        Ok(FamilyInstance {
            family,
            params,
            pair,
        })
    }
}

impl fmt::Display for FamilyInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        let mut fields = Vec::new();
        if let Some(lambda) = &p.lambda {
            fields.push(format!("lambda={lambda}"));
        }
        for (name, v) in [
            ("id", p.id),
            ("l", p.l),
            ("m", p.m),
            ("n", p.n),
            ("dilation", p.dilation),
        ] {
            if let Some(v) = v {
                fields.push(format!("{name}={v}"));
            }
        }
        write!(f, "{}[{}] {}", self.family, fields.join(" "), self.pair)
    }
}
