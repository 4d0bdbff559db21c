//! Complex embedding of coefficient vectors and the extreme vertices
//! (poles) of 𝒱(q,N). These take a plain modulus q ≥ 3, prime or not.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

/// Σ a_j e^{2πij/q} for coefficients a_1..a_{q−1}.
pub fn embed_coeffs(q: u64, coeffs: &[BigInt]) -> (f64, f64) {
    let mut re = 0.0;
    let mut im = 0.0;
    for (idx, a) in coeffs.iter().enumerate() {
        let a = a.to_f64().unwrap_or(f64::NAN);
        if a == 0.0 {
            continue;
        }
        let theta = TAU * (idx as f64 + 1.0) / q as f64;
        re += a * theta.cos();
        im += a * theta.sin();
    }
    (re, im)
}

pub fn embed_signs(q: u64, n: u64, signs: &[i8]) -> (f64, f64) {
    let coeffs: Vec<BigInt> = signs.iter().map(|&s| BigInt::from(s as i64 * n as i64)).collect();
    embed_coeffs(q, &coeffs)
}

/// Sign pattern of the North Pole: + on the upper half circle.
/// For even q the real-axis coefficient at j = q/2 is −, which puts the
/// pole in the first quadrant (ω^{q/2} = −1).
pub fn north_pole_signs(q: u64) -> Vec<i8> {
    (1..q)
        .map(|j| {
            if 2 * j < q {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Sign pattern of the East Pole: + for j ≤ ⌊q/4⌋ and j > ⌊3q/4⌋, − between.
pub fn east_pole_signs(q: u64) -> Vec<i8> {
    let lo = q / 4;
    let hi = 3 * q / 4;
    (1..q).map(|j| if j <= lo || j > hi { 1 } else { -1 }).collect()
}

fn scaled(signs: Vec<i8>, n: u64) -> Vec<BigInt> {
    let n = BigInt::from(n);
    signs.into_iter().map(|s| if s > 0 { n.clone() } else { -n.clone() }).collect()
}

/// NP(q) scaled by N. Panics if q < 3.
pub fn north_pole(q: u64, n: u64) -> Vec<BigInt> {
    assert!(q >= 3, "q must be at least 3");
    scaled(north_pole_signs(q), n)
}

pub fn east_pole(q: u64, n: u64) -> Vec<BigInt> {
    assert!(q >= 3, "q must be at least 3");
    scaled(east_pole_signs(q), n)
}

/// SP = −NP.
pub fn south_pole(q: u64, n: u64) -> Vec<BigInt> {
    north_pole(q, n).into_iter().map(|c| -c).collect()
}

/// WP = −EP.
pub fn west_pole(q: u64, n: u64) -> Vec<BigInt> {
    east_pole(q, n).into_iter().map(|c| -c).collect()
}

/// Euclidean (complex-plane) diameter of 𝓑(q,N) for odd q: 2N·Im NP(q).
pub fn euclidean_diameter(q: u64, n: u64) -> Result<f64> {
    if q < 3 {
        return Err(Error::ModulusTooSmall(q));
    }
    if q % 2 == 0 {
        return Err(Error::EvenModulus(q));
    }
    let (_, im) = embed_signs(q, 1, &north_pole_signs(q));
    Ok(2.0 * n as f64 * im)
}
