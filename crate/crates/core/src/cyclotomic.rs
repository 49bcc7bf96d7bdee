//! Cyclotomic polynomials with a process-wide memo.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::poly::Poly;

fn cache() -> &'static RwLock<HashMap<u64, Arc<Poly>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<Poly>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Proper divisors of `d`, ascending.
fn proper_divisors(d: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut e = 1;
    while e * e <= d {
        if d.is_multiple_of(e) {
            small.push(e);
            if e * e != d {
                large.push(d / e);
            }
        }
        e += 1;
    }
    small.extend(large.into_iter().rev());
    small.pop();
    small
}

/// The `d`-th cyclotomic polynomial, `(q^d - 1) / prod_{e | d, e < d} Phi_e`.
///
/// Panics if `d == 0`.
pub fn cyclotomic(d: u64) -> Arc<Poly> {
    assert!(d >= 1, "cyclotomic index must be positive");
    if let Some(hit) = cache().read().expect("cyclotomic cache poisoned").get(&d) {
        return Arc::clone(hit);
    }
    let mut numer = vec![BigInt::zero(); d as usize + 1];
    numer[0] = BigInt::from(-1);
    numer[d as usize] = BigInt::one();
    let denom = proper_divisors(d)
        .into_iter()
        .fold(Poly::one(), |acc, e| &acc * &cyclotomic(e));
    let phi = Poly::from_coeffs(numer)
        .exact_div(&denom)
        .expect("q^d - 1 is divisible by its proper cyclotomic factors");
    // Racing writers compute identical values; first insert wins.
    let mut guard = cache().write().expect("cyclotomic cache poisoned");
    Arc::clone(guard.entry(d).or_insert_with(|| Arc::new(phi)))
}

/// Divisors of `n` (including `n`), ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut all = proper_divisors(n);
    all.push(n);
    all
}
