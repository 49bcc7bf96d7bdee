//! Factorial pairs `(a, b)` and Landau's integrality criterion.
//!
//! For a pair of tuples the floor-sum
//!
//! ```text
//! L(x) = sum_i floor(a_i x) - sum_j floor(b_j x)
//! ```
//!
//! is right-continuous and piecewise constant with jumps at rationals `t/v`
//! for entries `v`. Landau's criterion asks `L(x) >= 0` for all `x >= 0`.
//! When `|a| = |b|` the function is 1-periodic, so checking the breakpoints
//! in `[0, 1)` is a complete decision procedure.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A pair of positive-integer tuples, each kept sorted non-increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawPair", into = "RawPair")]
pub struct FactorialPair {
    a: Vec<u64>,
    b: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct RawPair {
    a: Vec<u64>,
    b: Vec<u64>,
}

impl TryFrom<RawPair> for FactorialPair {
    type Error = Error;

    fn try_from(raw: RawPair) -> Result<Self> {
        FactorialPair::new(raw.a, raw.b)
    }
}

impl From<FactorialPair> for RawPair {
    fn from(p: FactorialPair) -> Self {
        RawPair { a: p.a, b: p.b }
    }
}

fn canonical(mut v: Vec<u64>) -> Vec<u64> {
    v.sort_unstable_by(|x, y| y.cmp(x));
    v
}

impl FactorialPair {
    /// Fails with [`Error::ZeroEntry`] if any entry is zero.
    pub fn new(a: Vec<u64>, b: Vec<u64>) -> Result<Self> {
        if a.iter().chain(&b).any(|&x| x == 0) {
            return Err(Error::ZeroEntry);
        }
        Ok(FactorialPair {
            a: canonical(a),
            b: canonical(b),
        })
    }

    /// Builds a pair after dropping zero entries (`[0]! = 1`).
    pub fn from_nonnegative(a: Vec<u64>, b: Vec<u64>) -> Self {
        FactorialPair {
            a: canonical(a.into_iter().filter(|&x| x > 0).collect()),
            b: canonical(b.into_iter().filter(|&x| x > 0).collect()),
        }
    }

    pub fn a(&self) -> &[u64] {
        &self.a
    }

    pub fn b(&self) -> &[u64] {
        &self.b
    }

    pub fn max_entry(&self) -> u64 {
        self.a.iter().chain(&self.b).copied().max().unwrap_or(0)
    }

    /// `|a| - |b|`.
    pub fn weight_gap(&self) -> i64 {
        let sa: u64 = self.a.iter().sum();
        let sb: u64 = self.b.iter().sum();
        sa as i64 - sb as i64
    }

    pub fn is_balanced(&self) -> bool {
        self.weight_gap() == 0
    }

    /// `s - r`.
    pub fn height(&self) -> i64 {
        self.b.len() as i64 - self.a.len() as i64
    }

    /// `sum C(a_i, 2) - sum C(b_j, 2)`, the degree of `D(a, b; q)` whenever it
    /// is a polynomial.
    pub fn degree(&self) -> i64 {
        let c2 = |x: &u64| (*x as i128) * (*x as i128 - 1) / 2;
        let d: i128 = self.a.iter().map(c2).sum::<i128>() - self.b.iter().map(c2).sum::<i128>();
        d as i64
    }

    /// gcd of all entries; 0 for the empty pair.
    pub fn gcd(&self) -> u64 {
        self.a.iter().chain(&self.b).fold(0, |g, &x| g.gcd(&x))
    }

    pub fn is_coprime(&self) -> bool {
        self.gcd() == 1
    }

    /// Divides every entry by the gcd of all entries.
    pub fn reduce(&self) -> FactorialPair {
        let d = self.gcd();
        if d <= 1 {
            return self.clone();
        }
        FactorialPair {
            a: self.a.iter().map(|x| x / d).collect(),
            b: self.b.iter().map(|x| x / d).collect(),
        }
    }

    /// Appends `weight_gap` copies of 1 to `b`.
    pub fn balance(&self) -> Result<FactorialPair> {
        let gap = self.weight_gap();
        if gap < 0 {
            return Err(Error::NegativeGap(gap));
        }
        let mut b = self.b.clone();
        b.extend(std::iter::repeat_n(1, gap as usize));
        Ok(FactorialPair {
            a: self.a.clone(),
            b,
        })
    }

    /// The dilation `(a n, b n)`.
    pub fn scale(&self, n: u64) -> Result<FactorialPair> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "dilation factor must be at least 1".into(),
            ));
        }
        Ok(FactorialPair {
            a: self.a.iter().map(|x| x * n).collect(),
            b: self.b.iter().map(|x| x * n).collect(),
        })
    }

    /// `L(x)` evaluated exactly.
    pub fn floor_sum(&self, x: Ratio<u64>) -> i64 {
        let (num, den) = (*x.numer() as u128, *x.denom() as u128);
        let fl = |v: &u64| ((*v as u128 * num) / den) as i64;
        self.a.iter().map(fl).sum::<i64>() - self.b.iter().map(fl).sum::<i64>()
    }

    /// Cyclotomic exponents `e_d = sum floor(a_i/d) - sum floor(b_j/d)` for
    /// `d >= 2`, i.e. `L(1/d)`. Only nonzero exponents are returned.
    pub fn exponent_vector(&self) -> BTreeMap<u64, i64> {
        (2..=self.max_entry())
            .filter_map(|d| {
                let e = self.a.iter().map(|x| (x / d) as i64).sum::<i64>()
                    - self.b.iter().map(|x| (x / d) as i64).sum::<i64>();
                (e != 0).then_some((d, e))
            })
            .collect()
    }

    /// Decides Landau's criterion, reporting the least breakpoint at which the
    /// floor-sum goes negative.
    pub fn check_landau(&self) -> LandauVerdict {
        let gap = self.weight_gap();
        if gap < 0 {
            return LandauVerdict {
                holds: false,
                witness: Some(Ratio::from_integer(1)),
                value: gap,
            };
        }
        let balanced = self.balance().expect("gap is nonnegative");
        // On [0, 1) the appended ones contribute nothing, so witnesses found
        // for the balanced pair are witnesses for the original one.
        let mut min_value = 0;
        for x in breakpoints(&balanced) {
            let value = balanced.floor_sum(x);
            if value < 0 {
                return LandauVerdict {
                    holds: false,
                    witness: Some(x),
                    value,
                };
            }
            min_value = min_value.min(value);
        }
        LandauVerdict {
            holds: true,
            witness: None,
            value: min_value,
        }
    }
}

/// All reduced fractions `t/v` in `[0, 1)` with `v` an entry of the pair,
/// ascending.
pub fn breakpoints(p: &FactorialPair) -> BTreeSet<Ratio<u64>> {
    let denominators: BTreeSet<u64> = p.a.iter().chain(&p.b).copied().collect();
    let mut out = BTreeSet::new();
    for &v in &denominators {
        for t in 0..v {
            out.insert(Ratio::new(t, v));
        }
    }
    out
}

/// Outcome of [`FactorialPair::check_landau`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LandauVerdict {
    pub holds: bool,
    /// First breakpoint in ascending order with negative floor-sum (`x = 1`
    /// when the weight gap is negative); present iff `holds` is false.
    pub witness: Option<Ratio<u64>>,
    /// Floor-sum at the witness, or its minimum over `[0, 1)` when the
    /// criterion holds.
    pub value: i64,
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for FactorialPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", join(&self.a), join(&self.b))
    }
}

fn parse_tuple(s: &str) -> Result<Vec<u64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<u64>()
                .map_err(|_| Error::Parse(format!("`{t}` is not a nonnegative integer")))
        })
        .collect()
}

/// Parses `"a1,a2,.../b1,b2,..."`; whitespace is ignored around entries.
impl FromStr for FactorialPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("expected `a1,a2,.../b1,b2,...`, got `{s}`")))?;
        if b.contains('/') {
            return Err(Error::Parse(format!("more than one `/` in `{s}`")));
        }
        let (a, b) = (parse_tuple(a)?, parse_tuple(b)?);
        FactorialPair::new(a, b).map_err(|_| Error::Parse(format!("zero entry in `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(s: &str) -> FactorialPair {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_form_and_parsing() {
        assert_eq!(pair("2,1/1,3,2"), pair("2, 1 / 3,2,1"));
        assert_eq!(pair(" 1,30 / 6,10,15 ").to_string(), "30,1/15,10,6");
        assert_eq!(pair("5/").b(), &[] as &[u64]);
        assert!(matches!(
            "1,2".parse::<FactorialPair>(),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            "1,x/2".parse::<FactorialPair>(),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            "0/1".parse::<FactorialPair>(),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            "1/2/3".parse::<FactorialPair>(),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn weight_gap_examples() {
        let (m, n) = (7, 3);
        assert_eq!(
            FactorialPair::new(vec![m + n], vec![m, n])
                .unwrap()
                .weight_gap(),
            0
        );
        assert_eq!(pair("1,30/6,10,15").weight_gap(), 0);
        assert_eq!(pair("3/1,1").weight_gap(), 1);
    }

    #[test]
    fn landau_examples() {
        assert!(pair("1,30/6,10,15").check_landau().holds);
        let v = pair("1,1/2").check_landau();
        assert!(!v.holds);
        assert_eq!(v.witness, Some(Ratio::new(1, 2)));
        assert_eq!(v.value, -1);
        let (m, n) = (5, 2);
        let super_pair = FactorialPair::new(vec![2 * m, n], vec![m, m - n, 2 * n]).unwrap();
        assert!(super_pair.check_landau().holds);
    }

    #[test]
    fn negative_gap_fails_at_one() {
        let v = pair("1/1,1").check_landau();
        assert!(!v.holds);
        assert_eq!(v.witness, Some(Ratio::from_integer(1)));
        assert_eq!(v.value, -1);
        assert_eq!(pair("1/1,1").floor_sum(Ratio::from_integer(1)), -1);
    }

    #[test]
    fn unbalanced_pair_with_positive_gap() {
        // [3]!/([1]![1]!) = [3]!, Landau I holds.
        assert!(pair("3/1,1").check_landau().holds);
        // Positive gap does not rescue (1,1)/(2): L(1/2) is still -1.
        let v = pair("1,1,1/2").check_landau();
        assert!(!v.holds);
        assert_eq!(v.witness, Some(Ratio::new(1, 2)));
    }

    #[test]
    fn balance_examples() {
        assert_eq!(pair("3/1,1").balance().unwrap(), pair("3/1,1,1"));
        assert_eq!(pair("5/3,2").balance().unwrap(), pair("5/3,2"));
        assert!(matches!(
            pair("1/1,1").balance(),
            Err(Error::NegativeGap(-1))
        ));
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(pair("2,60/12,20,30").reduce(), pair("1,30/6,10,15"));
        assert_eq!(pair("1,30/6,10,15").reduce(), pair("1,30/6,10,15"));
        assert_eq!(pair("6/3,3").reduce(), pair("2/1,1"));
    }

    #[test]
    fn height_and_degree() {
        assert_eq!(pair("1,30/6,10,15").height(), 1);
        assert_eq!(pair("5/3,2").height(), 1);
        assert_eq!(pair("8,1/4,3,2").degree(), 18);
        assert_eq!(pair("5/3,2").degree(), 6);
        assert_eq!(pair("1,30/6,10,15").degree(), 270);
    }

    #[test]
    fn exponent_vector_examples() {
        assert_eq!(pair("2/1,1").exponent_vector(), BTreeMap::from([(2, 1)]));
        assert_eq!(
            pair("8,1/4,3,2").exponent_vector(),
            BTreeMap::from([(4, 1), (5, 1), (6, 1), (7, 1), (8, 1)])
        );
        for (m, n) in [(3u64, 2u64), (7, 5), (12, 9)] {
            let ev = FactorialPair::new(vec![m + n], vec![m, n])
                .unwrap()
                .exponent_vector();
            assert!(ev.values().all(|&e| e == 1));
        }
    }

    #[test]
    fn exponents_reach_beyond_numerator_entries() {
        // b has the larger entry, so e_3 = -1 must be reported.
        assert_eq!(pair("2/3").exponent_vector(), BTreeMap::from([(3, -1)]));
    }

    #[test]
    fn breakpoints_are_deduplicated_and_sorted() {
        let bp: Vec<_> = breakpoints(&pair("4/2,2")).into_iter().collect();
        assert_eq!(
            bp,
            vec![
                Ratio::new(0, 1),
                Ratio::new(1, 4),
                Ratio::new(1, 2),
                Ratio::new(3, 4)
            ]
        );
    }

    #[test]
    fn scale_examples() {
        assert_eq!(
            pair("1,30/6,10,15").scale(2).unwrap(),
            pair("2,60/12,20,30")
        );
        assert_eq!(pair("1,6/2,2,3").scale(1).unwrap(), pair("1,6/2,2,3"));
        assert!(pair("1/1").scale(0).is_err());
    }

    #[test]
    fn serde_round_trip_rejects_zero() {
        let p = pair("8,1/4,3,2");
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"{"a":[8,1],"b":[4,3,2]}"#);
        assert_eq!(serde_json::from_str::<FactorialPair>(&text).unwrap(), p);
        assert!(serde_json::from_str::<FactorialPair>(r#"{"a":[0],"b":[]}"#).is_err());
    }
}
