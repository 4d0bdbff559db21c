//! Elements of ℤ[ω] for an odd prime p, written in the basis ω, ω², …, ω^{p−1},
//! and the metric induced by the trace form.
//!
//! Coefficient `a_j` (the coefficient of ω^j, 1-based) is stored at index `j − 1`.
//! All metric quantities are squared and exact; floating point only appears in
//! [`CentralAngle::cos`] and in the complex embedding.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poles;
use crate::prime::is_odd_prime;
use crate::rational::{to_f64, ExactRational};

/// The pair (p, N) describing the box 𝓑(p,N) and its vertex set 𝒱(p,N).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoxSpec {
    p: u64,
    n: u64,
}

impl BoxSpec {
    pub fn new(p: u64, n: u64) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if n == 0 {
            return Err(Error::EmptyBox);
        }
        Ok(Self { p, n })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of coefficients, p − 1.
    pub fn dim(&self) -> usize {
        (self.p - 1) as usize
    }

    /// (2N+1)^{p−1}
    pub fn cardinality(&self) -> BigUint {
        BigUint::from(2 * self.n + 1).pow(self.dim() as u32)
    }

    /// 2^{p−1}
    pub fn vertex_count(&self) -> BigUint {
        BigUint::from(1u32) << self.dim()
    }

    /// Squared trace-form diameter 4N²p²(p−1).
    pub fn diameter_sq(&self) -> BigInt {
        let n = BigInt::from(self.n);
        let p = BigInt::from(self.p);
        4 * &n * &n * &p * &p * (&p - 1)
    }

    pub fn origin(&self) -> CyclotomicInt {
        CyclotomicInt::from_parts(self.p, vec![BigInt::zero(); self.dim()])
    }

    /// Vertex whose coefficient a_{j+1} is +N when bit j of `index` is set, −N otherwise.
    pub fn vertex(&self, index: u64) -> CyclotomicInt {
        let n = BigInt::from(self.n);
        let coeffs = (0..self.dim())
            .map(|j| if j < 64 && (index >> j) & 1 == 1 { n.clone() } else { -n.clone() })
            .collect();
        CyclotomicInt::from_parts(self.p, coeffs)
    }

    /// #𝓑 when it fits in a u64.
    pub fn point_count(&self) -> Option<u64> {
        (2 * self.n + 1).checked_pow(self.dim() as u32)
    }

    /// Box point number `index` in mixed radix 2N+1, digit j giving a_{j+1} + N.
    pub fn point(&self, mut index: u64) -> CyclotomicInt {
        let base = 2 * self.n + 1;
        let n = BigInt::from(self.n);
        let coeffs = (0..self.dim())
            .map(|_| {
                let digit = index % base;
                index /= base;
                BigInt::from(digit) - &n
            })
            .collect();
        CyclotomicInt::from_parts(self.p, coeffs)
    }

    /// The diametrically opposite vertices α₀ = Σ(−1)^j N ω^j and β₀ = −α₀.
    pub fn alternating_pair(&self) -> (CyclotomicInt, CyclotomicInt) {
        let n = BigInt::from(self.n);
        let alpha: Vec<BigInt> = (1..=self.dim())
            .map(|j| if j % 2 == 0 { n.clone() } else { -n.clone() })
            .collect();
        let alpha = CyclotomicInt::from_parts(self.p, alpha);
        let beta = -&alpha;
        (alpha, beta)
    }

    /// North pole NP(p) scaled by N, as an element of this box.
    pub fn north_pole(&self) -> CyclotomicInt {
        CyclotomicInt::from_parts(self.p, poles::north_pole(self.p, self.n))
    }

    pub fn east_pole(&self) -> CyclotomicInt {
        CyclotomicInt::from_parts(self.p, poles::east_pole(self.p, self.n))
    }

    pub(crate) fn check(&self, alpha: &CyclotomicInt) -> Result<()> {
        if alpha.p != self.p {
            return Err(Error::IncompatibleFields { left: alpha.p, right: self.p });
        }
        Ok(())
    }
}

impl fmt::Display for BoxSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B({},{})", self.p, self.n)
    }
}

/// α = a₁ω + ⋯ + a_{p−1}ω^{p−1} ∈ ℤ[ω].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicInt {
    p: u64,
    coeffs: Vec<BigInt>,
}

/// ψ(α) = (Tr(αω), …, Tr(αω^{p−1})).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceVector {
    entries: Vec<BigInt>,
}

impl TraceVector {
    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    /// Squared Euclidean length of ψ(α); this is the definition of ∥α∥².
    pub fn sum_of_squares(&self) -> BigInt {
        let mut acc = SumAcc::default();
        for e in &self.entries {
            acc.push(e);
        }
        acc.finish().1
    }
}

/// Exact Σx and Σx². Terms that fit in i64 go through i128 lanes; anything
/// that would overflow spills into the BigInt totals.
#[derive(Default)]
struct SumAcc {
    sum: i128,
    sum_sq: i128,
    big_sum: BigInt,
    big_sum_sq: BigInt,
}

impl SumAcc {
    #[inline]
    fn push_small(&mut self, x: i64) {
        let x = x as i128;
        let sq = x * x;
        match self.sum.checked_add(x) {
            Some(s) => self.sum = s,
            None => {
                self.big_sum += self.sum;
                self.sum = x;
            }
        }
        match self.sum_sq.checked_add(sq) {
            Some(s) => self.sum_sq = s,
            None => {
                self.big_sum_sq += self.sum_sq;
                self.sum_sq = sq;
            }
        }
    }

    fn push_big(&mut self, x: BigInt) {
        self.big_sum_sq += &x * &x;
        self.big_sum += x;
    }

    #[inline]
    fn push(&mut self, x: &BigInt) {
        match x.to_i64() {
            Some(v) => self.push_small(v),
            None => self.push_big(x.clone()),
        }
    }

    #[inline]
    fn push_diff(&mut self, b: &BigInt, a: &BigInt) {
        if let (Some(b), Some(a)) = (b.to_i64(), a.to_i64()) {
            if let Some(d) = b.checked_sub(a) {
                self.push_small(d);
                return;
            }
        }
        self.push_big(b - a);
    }

    fn finish(self) -> (BigInt, BigInt) {
        (self.big_sum + self.sum, self.big_sum_sq + self.sum_sq)
    }
}

/// p²·E − (p+1)·S² where E = Σ c_j² and S = Σ c_j (so Tr = −S).
fn norm_from_sums(p: u64, sum: &BigInt, sum_sq: &BigInt) -> BigInt {
    let p = BigInt::from(p);
    &p * &p * sum_sq - (p + 1) * sum * sum
}

impl CyclotomicInt {
    pub fn new(p: u64, coeffs: Vec<BigInt>) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        let expected = (p - 1) as usize;
        if coeffs.len() != expected {
            return Err(Error::CoefficientLength { p, expected, got: coeffs.len() });
        }
        Ok(Self { p, coeffs })
    }

    pub fn from_i64s(p: u64, coeffs: &[i64]) -> Result<Self> {
        Self::new(p, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(p: u64) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        Ok(Self::from_parts(p, vec![BigInt::zero(); (p - 1) as usize]))
    }

    /// Caller guarantees p is an odd prime and the length is p − 1.
    pub(crate) fn from_parts(p: u64, coeffs: Vec<BigInt>) -> Self {
        debug_assert_eq!(coeffs.len() as u64, p - 1);
        Self { p, coeffs }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn sums(&self) -> (BigInt, BigInt) {
        let mut acc = SumAcc::default();
        for c in &self.coeffs {
            acc.push(c);
        }
        acc.finish()
    }

    /// Tr(α) = −(a₁ + ⋯ + a_{p−1}).
    pub fn trace(&self) -> BigInt {
        -self.sums().0
    }

    /// ψ(α), using Tr(αω^j) = Tr(α) + p·a_{p−j}.
    pub fn psi(&self) -> TraceVector {
        let tr = self.trace();
        let p = BigInt::from(self.p);
        let dim = self.coeffs.len();
        let entries = (1..=dim)
            .map(|j| &tr + &p * &self.coeffs[dim - j])
            .collect();
        TraceVector { entries }
    }

    /// ∥α∥² = p²∥**α**∥²_E − (p+1)Tr(α)².
    pub fn norm_sq(&self) -> BigInt {
        let (s, e) = self.sums();
        norm_from_sums(self.p, &s, &e)
    }

    /// Σ a_j².
    pub fn euclid_norm_sq(&self) -> BigInt {
        self.sums().1
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_parts(self.p, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        same_field(self, other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self::from_parts(self.p, coeffs))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        same_field(self, other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self::from_parts(self.p, coeffs))
    }

    /// σ_k : ω ↦ ω^k. The coefficient of ω^j moves to ω^{kj mod p}.
    pub fn galois_apply(&self, k: u64) -> Result<Self> {
        let k = k % self.p;
        if k == 0 {
            return Err(Error::GaloisIndex { p: self.p, k });
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len()];
        for (idx, a) in self.coeffs.iter().enumerate() {
            let j = idx as u64 + 1;
            let target = ((k as u128 * j as u128) % self.p as u128) as usize;
            out[target - 1] = a.clone();
        }
        Ok(Self::from_parts(self.p, out))
    }

    /// Σ a_j e^{2πij/p} in double precision.
    pub fn embed_complex(&self) -> (f64, f64) {
        poles::embed_coeffs(self.p, &self.coeffs)
    }

    pub fn in_box(&self, b: &BoxSpec) -> bool {
        let n = BigInt::from(b.n);
        self.p == b.p && self.coeffs.iter().all(|a| a.abs() <= n)
    }

    pub fn is_vertex(&self, b: &BoxSpec) -> bool {
        let n = BigInt::from(b.n);
        self.p == b.p && self.coeffs.iter().all(|a| a.abs() == n)
    }
}

impl std::ops::Neg for &CyclotomicInt {
    type Output = CyclotomicInt;

    fn neg(self) -> CyclotomicInt {
        CyclotomicInt::from_parts(self.p, self.coeffs.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for CyclotomicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn same_field(a: &CyclotomicInt, b: &CyclotomicInt) -> Result<()> {
    if a.p != b.p {
        return Err(Error::IncompatibleFields { left: a.p, right: b.p });
    }
    Ok(())
}

/// d(α,β)² = ∥β − α∥².
pub fn dist_sq(alpha: &CyclotomicInt, beta: &CyclotomicInt) -> Result<BigInt> {
    same_field(alpha, beta)?;
    let mut acc = SumAcc::default();
    for (a, b) in alpha.coeffs.iter().zip(&beta.coeffs) {
        acc.push_diff(b, a);
    }
    let (s, e) = acc.finish();
    Ok(norm_from_sums(alpha.p, &s, &e))
}

/// Bilinear form behind the norm, recovered by polarization.
pub fn inner_product(alpha: &CyclotomicInt, beta: &CyclotomicInt) -> Result<BigInt> {
    let d = dist_sq(alpha, beta)?;
    let twice = alpha.norm_sq() + beta.norm_sq() - d;
    let (half, rem) = twice.div_rem(&BigInt::from(2));
    // twice = 2(p²Σa_jb_j − (p+1)Tr(α)Tr(β))
    assert!(rem.is_zero(), "polarization numerator {twice} is odd");
    Ok(half)
}

/// 𝔡²(α,β) = d(α,β)² / (4N²p²(p−1)).
pub fn normalized_dist_sq(
    alpha: &CyclotomicInt,
    beta: &CyclotomicInt,
    b: &BoxSpec,
) -> Result<ExactRational> {
    b.check(alpha)?;
    b.check(beta)?;
    Ok(BigRational::new(dist_sq(alpha, beta)?, b.diameter_sq()))
}

/// Cosine of the angle α O β.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralAngle {
    /// −1, 0 or +1.
    pub sign: i8,
    pub cos_sq: ExactRational,
    pub cos: f64,
}

impl CentralAngle {
    pub fn abs_cos(&self) -> f64 {
        self.cos.abs()
    }
}

pub fn cos_central_angle(alpha: &CyclotomicInt, beta: &CyclotomicInt) -> Result<CentralAngle> {
    same_field(alpha, beta)?;
    let na = alpha.norm_sq();
    let nb = beta.norm_sq();
    if na.is_zero() || nb.is_zero() {
        return Err(Error::DegenerateAngle);
    }
    let ip = inner_product(alpha, beta)?;
    let sign = match ip.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    };
    let cos_sq = BigRational::new(&ip * &ip, na * nb);
    let cos = f64::from(sign) * to_f64(&cos_sq).sqrt();
    Ok(CentralAngle { sign, cos_sq, cos })
}
