//! Exact checks of the q-Pascal recursion, the three-term recursion for
//! `B(m, n; q)`, and the q-Dixon summation.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dfact::build_ratio;
use crate::error::Result;
use crate::families::{b_pair, dixon_pair};
use crate::poly::{gauss_binomial, Poly};

/// `[N choose j]`, zero outside `0 <= j <= N`.
pub fn qbin(big_n: i64, j: i64) -> Poly {
    if j < 0 || j > big_n {
        return Poly::zero();
    }
    gauss_binomial(j as usize, (big_n - j) as usize)
}

/// `[m+n choose m] = [m+n-1 choose m-1] + q^m [m+n-1 choose m]`, for `m, n >= 1`.
pub fn check_pascal(m: u64, n: u64) -> bool {
    let (m, n) = (m as i64, n as i64);
    let lhs = qbin(m + n, m);
    let rhs = &qbin(m + n - 1, m - 1) + &qbin(m + n - 1, m).shift(m as usize);
    lhs == rhs
}

/// `B(m, n; q)` with the boundary values `B(m, 0) = [2m choose m]` and
/// `B(m, m) = 1`; interior values come from the ratio builder.
fn b_value(m: u64, n: u64) -> Result<Poly> {
    if n == 0 {
        Ok(qbin(2 * m as i64, m as i64))
    } else if n == m {
        Ok(Poly::one())
    } else {
        build_ratio(&b_pair(m, n)?)
    }
}

/// `B(m,n) = q^(2m-2n) B(m-1,n-1) + (1 + q^m + q^(m-n) + q^(2m+n-1)) B(m-1,n)`,
/// for `1 <= n < m`.
pub fn check_b_recursion(m: u64, n: u64) -> Result<bool> {
    assert!(1 <= n && n < m, "recursion needs 1 <= n < m");
    let (mu, nu) = (m as usize, n as usize);
    let mut factor = vec![BigInt::from(0); 2 * mu + nu];
    for e in [0, mu, mu - nu, 2 * mu + nu - 1] {
        factor[e] += 1;
    }
    let factor = Poly::from_coeffs(factor);
    let rhs = &b_value(m - 1, n - 1)?.shift(2 * (mu - nu)) + &(&factor * &b_value(m - 1, n)?);
    Ok(b_value(m, n)? == rhs)
}

/// `sum_k (-1)^k q^(k(3k-1)/2) [2l choose l+k] [2m choose m+k] [2n choose n+k]`.
pub fn qdixon_rhs(l: u64, m: u64, n: u64) -> Poly {
    let (l, m, n) = (l as i64, m as i64, n as i64);
    let r = l.min(m).min(n);
    let mut sum = Poly::zero();
    for k in -r..=r {
        let exp = k * (3 * k - 1) / 2;
        assert!(exp >= 0, "q-Dixon exponent {exp} at k = {k} is negative");
        let term = (&(&qbin(2 * l, l + k) * &qbin(2 * m, m + k)) * &qbin(2 * n, n + k))
            .shift(exp as usize);
        sum = if k % 2 == 0 {
            &sum + &term
        } else {
            &sum - &term
        };
    }
    sum
}

/// The summation side equals the exactly divided factorial ratio.
pub fn check_qdixon(l: u64, m: u64, n: u64) -> Result<bool> {
    Ok(build_ratio(&dixon_pair(l, m, n))? == qdixon_rhs(l, m, n))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DixonResult {
    pub l: u64,
    pub m: u64,
    pub n: u64,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// [`check_qdixon`] over `0..=l_max x 0..=m_max x 0..=n_max`, in lexicographic order.
pub fn dixon_sweep(l_max: u64, m_max: u64, n_max: u64) -> Vec<DixonResult> {
    let grid: Vec<(u64, u64, u64)> = (0..=l_max)
        .flat_map(|l| (0..=m_max).flat_map(move |m| (0..=n_max).map(move |n| (l, m, n))))
        .collect();
    grid.into_par_iter()
        .map(|(l, m, n)| match check_qdixon(l, m, n) {
            Ok(holds) => DixonResult {
                l,
                m,
                n,
                holds,
                error: None,
            },
            Err(e) => DixonResult {
                l,
                m,
                n,
                holds: false,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qbin_out_of_range_is_zero() {
        assert!(qbin(4, -1).is_zero());
        assert!(qbin(4, 5).is_zero());
        assert_eq!(qbin(4, 0), Poly::one());
        assert_eq!(qbin(2, 1), Poly::from_i64s(&[1, 1]));
    }

    #[test]
    fn pascal_examples() {
        assert!(check_pascal(1, 1));
        assert!(check_pascal(3, 2));
        assert!(check_pascal(10, 10));
    }

    #[test]
    fn b_recursion_examples() {
        assert_eq!(b_value(2, 1).unwrap(), Poly::from_i64s(&[1, 1, 2, 1, 1]));
        assert_eq!(b_value(2, 1).unwrap(), qbin(4, 2));
        assert!(check_b_recursion(2, 1).unwrap());
        assert!(check_b_recursion(4, 1).unwrap());
        assert!(check_b_recursion(30, 7).unwrap());
    }

    #[test]
    fn dixon_examples() {
        assert_eq!(qdixon_rhs(1, 1, 1), Poly::from_i64s(&[1, 2, 2, 1]));
        assert_eq!(qdixon_rhs(0, 0, 0), Poly::one());
        assert_eq!(
            qdixon_rhs(2, 1, 1),
            build_ratio(&dixon_pair(2, 1, 1)).unwrap()
        );
        assert!(check_qdixon(1, 1, 1).unwrap());
        assert!(check_qdixon(5, 0, 0).unwrap());
        assert!(check_qdixon(3, 2, 1).unwrap());
    }

    #[test]
    fn dixon_sweep_is_ordered() {
        let rows = dixon_sweep(1, 1, 2);
        assert_eq!(rows.len(), 12);
        assert_eq!((rows[5].l, rows[5].m, rows[5].n), (0, 1, 2));
        assert!(rows.iter().all(|r| r.holds));
    }
}
