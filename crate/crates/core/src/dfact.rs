//! Construction of `D(a, b; q) = [a_1]!...[a_r]! / ([b_1]!...[b_s]!)`.
//!
//! Two independent routes are provided. The cyclotomic route multiplies
//! `Phi_d^{e_d}` over `d >= 2` and never divides; the ratio route multiplies
//! q-numbers and divides them out exactly, so it doubles as an integrality
//! oracle.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::cyclotomic;
use crate::error::{Error, Result};
use crate::landau::FactorialPair;
use crate::poly::Poly;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Cyclotomic,
    Ratio,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cyclotomic" => Ok(Method::Cyclotomic),
            "ratio" => Ok(Method::Ratio),
            other => Err(Error::Parse(format!("unknown build method `{other}`"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Cyclotomic => "cyclotomic",
            Method::Ratio => "ratio",
        })
    }
}

pub fn build(pair: &FactorialPair, method: Method) -> Result<Poly> {
    match method {
        Method::Cyclotomic => build_cyclotomic(pair),
        Method::Ratio => build_ratio(pair),
    }
}

/// Multiplies polynomials smallest-first so intermediate products stay
/// balanced. Ties keep input order, which makes the result independent of
/// the heap's internal layout.
fn product_smallest_first(factors: Vec<Poly>) -> Poly {
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = BinaryHeap::new();
    let mut slots: Vec<Option<Poly>> = Vec::with_capacity(factors.len() * 2);
    for f in factors {
        heap.push(Reverse((f.coeffs().len(), slots.len())));
        slots.push(Some(f));
    }
    loop {
        let Some(Reverse((_, i))) = heap.pop() else {
            return Poly::one();
        };
        let Some(Reverse((_, j))) = heap.pop() else {
            return slots[i].take().expect("slot is filled");
        };
        let x = slots[i].take().expect("slot is filled");
        let y = slots[j].take().expect("slot is filled");
        let prod = &x * &y;
        heap.push(Reverse((prod.coeffs().len(), slots.len())));
        slots.push(Some(prod));
    }
}

/// `prod_{d >= 2} Phi_d^{e_d}` with exponents from the floor-sum at `1/d`.
///
/// Fails with [`Error::NegativeExponent`] when some `e_d < 0`, which happens
/// exactly when the ratio is not a polynomial.
pub fn build_cyclotomic(pair: &FactorialPair) -> Result<Poly> {
    let exponents = pair.exponent_vector();
    if let Some((&d, &exponent)) = exponents.iter().find(|(_, &e)| e < 0) {
        return Err(Error::NegativeExponent { d, exponent });
    }
    let factors = exponents
        .iter()
        .map(|(&d, &e)| cyclotomic(d).pow(e as u32))
        .collect();
    Ok(product_smallest_first(factors))
}

/// Net multiplicity of each q-number `[k]`, `k >= 2`, in the ratio:
/// `#{i : a_i >= k} - #{j : b_j >= k}`.
fn q_number_multiplicities(pair: &FactorialPair) -> Vec<(usize, i64)> {
    (2..=pair.max_entry())
        .filter_map(|k| {
            let up = pair.a().iter().filter(|&&x| x >= k).count() as i64;
            let down = pair.b().iter().filter(|&&x| x >= k).count() as i64;
            (up != down).then_some((k as usize, up - down))
        })
        .collect()
}

/// Numerator q-factorials divided exactly by the denominator q-factorials.
///
/// Matching q-numbers are cancelled first; every remaining denominator
/// q-number is then divided out exactly, so a non-polynomial ratio surfaces
/// as [`Error::NonExactDivision`].
pub fn build_ratio(pair: &FactorialPair) -> Result<Poly> {
    let mult = q_number_multiplicities(pair);
    let mut acc = Poly::one();
    for &(k, c) in &mult {
        for _ in 0..c.max(0) {
            acc = acc.mul_q_number(k);
        }
    }
    for &(k, c) in mult.iter().rev() {
        for _ in 0..(-c).max(0) {
            acc = acc.div_q_number(k)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::gauss_binomial;

    fn pair(s: &str) -> FactorialPair {
        s.parse().unwrap()
    }

    const B41: [i64; 19] = [
        1, 1, 3, 4, 7, 8, 12, 12, 15, 14, 15, 12, 12, 8, 7, 4, 3, 1, 1,
    ];

    #[test]
    fn cyclotomic_route_examples() {
        assert_eq!(
            build_cyclotomic(&pair("2/1,1")).unwrap(),
            Poly::from_i64s(&[1, 1])
        );
        assert_eq!(
            build_cyclotomic(&pair("8,1/4,3,2")).unwrap(),
            Poly::from_i64s(&B41)
        );
        assert_eq!(
            build_cyclotomic(&pair("4,2/2,3,1")).unwrap(),
            Poly::from_i64s(&[1, 1, 1, 1])
        );
    }

    #[test]
    fn ratio_route_examples() {
        assert_eq!(build_ratio(&pair("5/3,2")).unwrap(), gauss_binomial(3, 2));
        assert_eq!(
            build_ratio(&pair("4,2/2,3,1")).unwrap(),
            Poly::from_i64s(&[1, 1, 1, 1])
        );
        assert_eq!(
            build_ratio(&pair("8,1/4,3,2")).unwrap(),
            Poly::from_i64s(&B41)
        );
        assert!(matches!(
            build_ratio(&pair("1,1/2")),
            Err(Error::NonExactDivision(_))
        ));
    }

    #[test]
    fn cyclotomic_route_flags_negative_exponent() {
        assert!(matches!(
            build_cyclotomic(&pair("1,1/2")),
            Err(Error::NegativeExponent { d: 2, exponent: -1 })
        ));
    }

    #[test]
    fn empty_pair_is_one() {
        let p = FactorialPair::new(vec![], vec![]).unwrap();
        assert_eq!(build_cyclotomic(&p).unwrap(), Poly::one());
        assert_eq!(build_ratio(&p).unwrap(), Poly::one());
    }

    #[test]
    fn smallest_first_product_is_order_independent() {
        let fs: Vec<Poly> = (2..9).map(|d| (*cyclotomic(d)).clone()).collect();
        let mut rev = fs.clone();
        rev.reverse();
        assert_eq!(product_smallest_first(fs), product_smallest_first(rev));
    }

    #[test]
    fn method_parsing() {
        assert_eq!("ratio".parse::<Method>().unwrap(), Method::Ratio);
        assert_eq!(Method::default(), Method::Cyclotomic);
        assert!("fft".parse::<Method>().is_err());
    }
}
