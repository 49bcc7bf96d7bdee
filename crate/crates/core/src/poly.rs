//! Dense univariate polynomials over the integers.
//!
//! Coefficients are stored ascending by exponent as arbitrary-precision
//! integers. The zero polynomial is the empty vector and a nonzero polynomial
//! never carries a trailing zero, so `coeffs().len() - 1` is the degree.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Operand length below which multiplication falls back to schoolbook
/// convolution.
pub const KARATSUBA_THRESHOLD: usize = 64;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<BigInt>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly {
            coeffs: vec![BigInt::one()],
        }
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `c * q^exp`.
    pub fn monomial(c: BigInt, exp: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); exp + 1];
        coeffs[exp] = c;
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Coefficient of `q^i`; zero beyond the degree.
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Value at `q = 1`.
    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Largest bit length among the absolute values of the coefficients.
    pub fn max_coeff_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0)
    }

    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// `(1 + q) * self`, computed with additions only.
    pub fn mul_one_plus_q(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let n = self.coeffs.len();
        let mut out = Vec::with_capacity(n + 1);
        out.push(self.coeffs[0].clone());
        for i in 1..n {
            out.push(&self.coeffs[i] + &self.coeffs[i - 1]);
        }
        out.push(self.coeffs[n - 1].clone());
        Self::from_coeffs(out)
    }

    /// `[k] * self` where `[k] = 1 + q + ... + q^(k-1)`, as a sliding-window sum.
    pub fn mul_q_number(&self, k: usize) -> Self {
        if k == 0 || self.is_zero() {
            return Self::zero();
        }
        let n = self.coeffs.len();
        let mut out = Vec::with_capacity(n + k - 1);
        let mut window = BigInt::zero();
        for i in 0..n + k - 1 {
            if i < n {
                window += &self.coeffs[i];
            }
            if i >= k {
                window -= &self.coeffs[i - k];
            }
            out.push(window.clone());
        }
        Self::from_coeffs(out)
    }

    /// Exact quotient `self / [k]`, dividing `(q - 1) * self` by the sparse
    /// `q^k - 1`.
    pub fn div_q_number(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::DivisionByZero);
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let q_minus_one = Poly::from_i64s(&[-1, 1]);
        let mut divisor = vec![BigInt::zero(); k + 1];
        divisor[0] = BigInt::from(-1);
        divisor[k] = BigInt::one();
        (self * &q_minus_one).exact_div(&Poly::from_coeffs(divisor))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplication with an explicit Karatsuba cutoff.
    pub fn mul_with_threshold(&self, other: &Poly, threshold: usize) -> Poly {
        Poly::from_coeffs(karatsuba(&self.coeffs, &other.coeffs, threshold.max(1)))
    }

    /// Exact quotient `s` with `self = divisor * s`.
    ///
    /// Long division from the top degree; zero coefficients of the divisor are
    /// skipped, so sparse divisors such as `q^k - 1` cost `O(deg)`.
    pub fn exact_div(&self, divisor: &Poly) -> Result<Poly> {
        let dr = divisor.degree().ok_or(Error::DivisionByZero)?;
        if self.is_zero() {
            return Ok(Poly::zero());
        }
        let dp = self.coeffs.len() - 1;
        if dp < dr {
            return Err(Error::NonExactDivision(format!(
                "dividend degree {dp} is below divisor degree {dr}"
            )));
        }
        let lead = &divisor.coeffs[dr];
        let support: Vec<(usize, &BigInt)> = divisor.coeffs[..dr]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let lead_is_one = lead.is_one();

        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); dp - dr + 1];
        for i in (0..=dp - dr).rev() {
            let top = std::mem::take(&mut rem[i + dr]);
            if top.is_zero() {
                continue;
            }
            let c = if lead_is_one {
                top
            } else {
                let (c, r) = top.div_rem(lead);
                if !r.is_zero() {
                    return Err(Error::NonExactDivision(format!(
                        "quotient coefficient at q^{i} is not an integer"
                    )));
                }
                c
            };
            for &(j, d) in &support {
                rem[i + j] -= &c * d;
            }
            quot[i] = c;
        }
        if let Some(j) = rem[..dr].iter().position(|c| !c.is_zero()) {
            return Err(Error::NonExactDivision(format!(
                "nonzero remainder at q^{j}"
            )));
        }
        Ok(Poly::from_coeffs(quot))
    }
}

fn add_into(dst: &mut [BigInt], src: &[BigInt]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

fn schoolbook(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn sum_halves(lo: &[BigInt], hi: &[BigInt]) -> Vec<BigInt> {
    let (long, short) = if lo.len() >= hi.len() {
        (lo, hi)
    } else {
        (hi, lo)
    };
    let mut out = long.to_vec();
    add_into(&mut out, short);
    out
}

fn karatsuba(a: &[BigInt], b: &[BigInt], threshold: usize) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if b.len() < threshold {
        return schoolbook(a, b);
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    if a.len() >= 2 * b.len() {
        for (k, chunk) in a.chunks(b.len()).enumerate() {
            let prod = karatsuba(chunk, b, threshold);
            add_into(&mut out[k * b.len()..], &prod);
        }
        return out;
    }
    // b.len() > h, so both high halves are nonempty.
    let h = a.len() / 2;
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);
    let z0 = karatsuba(a0, b0, threshold);
    let z2 = karatsuba(a1, b1, threshold);
    let mut z1 = karatsuba(&sum_halves(a0, a1), &sum_halves(b0, b1), threshold);
    for (d, s) in z1.iter_mut().zip(&z0) {
        *d -= s;
    }
    for (d, s) in z1.iter_mut().zip(&z2) {
        *d -= s;
    }
    add_into(&mut out, &z0);
    add_into(&mut out[2 * h..], &z2);
    add_into(&mut out[h..], &z1);
    out
}

impl Mul for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        self.mul_with_threshold(rhs, KARATSUBA_THRESHOLD)
    }
}

impl Mul for Poly {
    type Output = Poly;

    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Add for &Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        let mut out = sum_halves(&self.coeffs, &rhs.coeffs);
        out.truncate(self.coeffs.len().max(rhs.coeffs.len()));
        Poly::from_coeffs(out)
    }
}

impl Sub for &Poly {
    type Output = Poly;

    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = self.coeffs.clone();
        out.resize(n, BigInt::zero());
        for (d, s) in out.iter_mut().zip(&rhs.coeffs) {
            *d -= s;
        }
        Poly::from_coeffs(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{mag}q")?,
                (_, true) => write!(f, "q^{i}")?,
                (_, false) => write!(f, "{mag}q^{i}")?,
            }
        }
        Ok(())
    }
}

// Decimal strings, since coefficients leave the 64-bit range at large degree.
impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.coeffs.iter().map(|c| c.to_string()))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Coefficient {
    Text(String),
    Int(i64),
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<Coefficient>::deserialize(deserializer)?;
        let coeffs =
            raw.into_iter()
                .map(|c| match c {
                    Coefficient::Text(s) => s.trim().parse::<BigInt>().map_err(|e| {
                        serde::de::Error::custom(format!("bad coefficient {s:?}: {e}"))
                    }),
                    Coefficient::Int(i) => Ok(BigInt::from(i)),
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Poly::from_coeffs(coeffs))
    }
}

/// The q-number `[n] = 1 + q + ... + q^(n-1)`; `[0] = 0`.
pub fn q_number(n: usize) -> Poly {
    Poly::from_coeffs(vec![BigInt::one(); n])
}

/// `[n]! = [1][2]...[n]`, with `[0]! = 1`.
pub fn q_factorial(n: usize) -> Poly {
    (2..=n).fold(Poly::one(), |acc, k| acc.mul_q_number(k))
}

/// The Gaussian binomial `[m+n]! / ([m]! [n]!)`.
///
/// The common `[m]!` is cancelled up front; the remaining `[n]!` is removed by
/// exact division, one q-number at a time.
pub fn gauss_binomial(m: usize, n: usize) -> Poly {
    let (m, n) = if m >= n { (m, n) } else { (n, m) };
    let numer = (m + 1..=m + n).fold(Poly::one(), |acc, k| acc.mul_q_number(k));
    (2..=n)
        .try_fold(numer, |acc, k| acc.div_q_number(k))
        .expect("q-binomial coefficients are polynomials")
}
