//! Coefficient-profile checks: positivity, palindromy, unimodality, parity
//! unimodality and unimodality of `(1 + q) P(q)`.
//!
//! All inequalities are weak. Every failed check carries the least index at
//! which its defining inequality breaks.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;

/// A boolean verdict with the exponent of the first violation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<usize>,
}

impl Verdict {
    pub const PASS: Verdict = Verdict {
        holds: true,
        first_violation: None,
    };

    pub fn fail_at(i: usize) -> Verdict {
        Verdict {
            holds: false,
            first_violation: Some(i),
        }
    }

    fn from_witness(w: Option<usize>) -> Verdict {
        w.map_or(Verdict::PASS, Verdict::fail_at)
    }
}

pub fn check_positive(p: &Poly) -> Verdict {
    Verdict::from_witness(p.coeffs().iter().position(|c| c.is_negative()))
}

pub fn check_palindromic(p: &Poly) -> Verdict {
    let c = p.coeffs();
    let k = c.len();
    Verdict::from_witness((0..k / 2).find(|&i| c[i] != c[k - 1 - i]))
}

/// Index of the bottom of the first dip: the first `i` with
/// `c[i] < c[i+1]` after some earlier strict descent.
fn unimodal_witness<T: PartialOrd>(c: &[T]) -> Option<usize> {
    let mut descending = false;
    for i in 0..c.len().saturating_sub(1) {
        if c[i + 1] < c[i] {
            descending = true;
        } else if descending && c[i + 1] > c[i] {
            return Some(i);
        }
    }
    None
}

/// True iff the sequence weakly rises to a peak and then weakly falls.
pub fn check_unimodal(p: &Poly) -> Verdict {
    Verdict::from_witness(unimodal_witness(p.coeffs()))
}

/// Even-indexed and odd-indexed coefficient subsequences are each unimodal.
/// The witness is an exponent of `p`, not an index into a subsequence.
pub fn check_parity_unimodal(p: &Poly) -> Verdict {
    let even: Vec<&BigInt> = p.coeffs().iter().step_by(2).collect();
    let odd: Vec<&BigInt> = p.coeffs().iter().skip(1).step_by(2).collect();
    let we = unimodal_witness(&even).map(|t| 2 * t);
    let wo = unimodal_witness(&odd).map(|t| 2 * t + 1);
    Verdict::from_witness(match (we, wo) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    })
}

fn nondecreasing(chain: &[&BigInt]) -> bool {
    chain.windows(2).all(|w| w[0] <= w[1])
}

/// Unimodality of `(1 + q) P` read off a palindromic `P` of degree `k`
/// through its two parity chains, without forming the product.
///
/// Even `k = 2h`: `c_0 <= c_2 <= ... <= c_{2 floor(h/2)}` and
/// `0 <= c_1 <= c_3 <= ... <= c_{2 ceil(h/2) - 1}`.
///
/// Odd `k = 2h + 1`: the same two chains, run up to indices `h` and `h - 1`,
/// bridged at the centre by `c_{h-1} <= c_h` (with `c_{-1} = 0`).
pub fn interleaving_conditions(p: &Poly) -> bool {
    let c = p.coeffs();
    let Some(k) = p.degree() else {
        return true;
    };
    let zero = BigInt::zero();
    let h = k / 2;
    let top_even = 2 * (h / 2);
    let top_odd = 2 * h.div_ceil(2);
    let even: Vec<&BigInt> = (0..=top_even).step_by(2).map(|i| &c[i]).collect();
    let odd: Vec<&BigInt> = std::iter::once(&zero)
        .chain((1..top_odd).step_by(2).map(|i| &c[i]))
        .collect();
    let chains = nondecreasing(&even) && nondecreasing(&odd);
    if k % 2 == 0 {
        chains
    } else {
        let below = if h == 0 { &zero } else { &c[h - 1] };
        chains && below <= &c[h]
    }
}

/// Unimodality of `(1 + q) P`; the witness indexes the product.
///
/// For palindromic `P` the parity-chain route is evaluated as well and must
/// agree, otherwise [`Error::RouteDisagreement`] is returned.
pub fn check_one_plus_q_unimodal(p: &Poly) -> Result<Verdict> {
    let verdict = check_unimodal(&p.mul_one_plus_q());
    if !p.is_zero() && check_palindromic(p).holds {
        let interleaving = interleaving_conditions(p);
        if interleaving != verdict.holds {
            return Err(Error::RouteDisagreement {
                product: verdict.holds,
                interleaving,
            });
        }
    }
    Ok(verdict)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub palindromic: Verdict,
    pub positive: Verdict,
    pub unimodal: Verdict,
    pub parity_unimodal: Verdict,
    pub one_plus_q_unimodal: Verdict,
}

impl ShapeReport {
    fn validate(&self, p: &Poly) -> Result<()> {
        // Positivity follows from (1+q)-unimodality once the polynomial is
        // palindromic with a nonnegative constant term.
        let c0_nonneg = p.coeffs().first().is_none_or(|c| !c.is_negative());
        if self.palindromic.holds
            && c0_nonneg
            && self.one_plus_q_unimodal.holds
            && !self.positive.holds
        {
            return Err(Error::InvariantViolation(
                "(1+q)-unimodal palindromic polynomial is not positive".into(),
            ));
        }
        // Subsequences of a unimodal sequence are unimodal.
        if self.unimodal.holds && !self.parity_unimodal.holds {
            return Err(Error::InvariantViolation(
                "unimodal polynomial is not parity unimodal".into(),
            ));
        }
        Ok(())
    }
}

pub fn analyze(p: &Poly) -> Result<ShapeReport> {
    let report = ShapeReport {
        palindromic: check_palindromic(p),
        positive: check_positive(p),
        unimodal: check_unimodal(p),
        parity_unimodal: check_parity_unimodal(p),
        one_plus_q_unimodal: check_one_plus_q_unimodal(p)?,
    };
    report.validate(p)?;
    Ok(report)
}
