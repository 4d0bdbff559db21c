//! Exact distance moments over the vertex set 𝒱(p,N).
//!
//! Closed forms come in two flavours: point-to-vertex moments for a fixed
//! α ∈ ℤ[ω] (α may lie outside the box) and vertex-pair moments. Every closed
//! form has an exhaustive counterpart in [`oracle_moments`], which enumerates
//! 𝒱 (and 𝒱×𝒱) directly and shares nothing with the formulas beyond
//! [`dist_sq`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cyclo::{dist_sq, BoxSpec, CyclotomicInt};
use crate::error::{Error, Result};
use crate::rational::{ratio, ExactRational};

/// Largest p the exhaustive oracles accept (2^16 vertices).
pub const ORACLE_MAX_P: u64 = 17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentKind {
    AvgPointVertices,
    SecondMomentPointVertices,
    AvgVertexPairs,
    FourthVertexPairs,
    VarianceVertexPairs,
}

impl MomentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MomentKind::AvgPointVertices => "avg_point_vertices",
            MomentKind::SecondMomentPointVertices => "second_moment_point_vertices",
            MomentKind::AvgVertexPairs => "avg_vertex_pairs",
            MomentKind::FourthVertexPairs => "fourth_vertex_pairs",
            MomentKind::VarianceVertexPairs => "variance_vertex_pairs",
        }
    }
}

impl fmt::Display for MomentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub kind: MomentKind,
    pub p: u64,
    pub n: u64,
    /// Coefficients of α for point-to-vertex moments.
    pub alpha: Option<String>,
    pub formula_value: ExactRational,
    pub oracle_value: Option<ExactRational>,
}

impl MomentReport {
    /// `None` when no oracle value was computed.
    pub fn exact_equal(&self) -> Option<bool> {
        self.oracle_value.as_ref().map(|o| *o == self.formula_value)
    }
}

fn p_rat(b: &BoxSpec) -> BigInt {
    BigInt::from(b.p())
}

/// A(α,𝒱) = 𝔡²(0,α) + 1/4 − 1/(4p) − 1/(4p²).
pub fn avg_point_to_vertices(alpha: &CyclotomicInt, b: &BoxSpec) -> Result<ExactRational> {
    b.check(alpha)?;
    let p = p_rat(b);
    let offset = BigRational::new(&p * &p - &p - 1, 4 * &p * &p);
    Ok(BigRational::new(alpha.norm_sq(), b.diameter_sq()) + offset)
}

/// M(α,𝒱): second moment of 𝔡²(α,·) about its mean, as the closed
/// polynomial in p, N, ∥**α**∥²_E and Tr(α)² with prefactor 2N²/D⁴.
pub fn second_moment_point_to_vertices(alpha: &CyclotomicInt, b: &BoxSpec) -> Result<ExactRational> {
    b.check(alpha)?;
    let p = p_rat(b);
    let n2 = BigInt::from(b.n()) * BigInt::from(b.n());
    let e = alpha.euclid_norm_sq();
    let t2 = {
        let t = alpha.trace();
        &t * &t
    };
    let p2 = &p * &p;
    let p3 = &p2 * &p;
    let p4 = &p3 * &p;
    let poly = (&n2 + 2 * &e) * &p4 - (&n2 + 2 * &t2) * &p3 - (3 * &n2 + 2 * &t2) * &p2
        + (&n2 - 2 * &t2) * &p
        + 2 * (&n2 - &t2);
    let d2 = b.diameter_sq();
    Ok(BigRational::new(2 * n2 * poly, &d2 * &d2))
}

/// Same quantity as [`second_moment_point_to_vertices`], assembled from the
/// three raw fourth-power sums and the unsimplified mean:
/// M = (p⁴Σ′ − 2p²(p+1)Σ″ + (p+1)²Σ‴)/D⁴ − A².
pub fn second_moment_point_to_vertices_via_sums(
    alpha: &CyclotomicInt,
    b: &BoxSpec,
) -> Result<ExactRational> {
    b.check(alpha)?;
    let p = p_rat(b);
    let n2 = BigInt::from(b.n()) * BigInt::from(b.n());
    let n4 = &n2 * &n2;
    let e = alpha.euclid_norm_sq();
    let t2 = {
        let t = alpha.trace();
        &t * &t
    };
    let pm1 = &p - 1;
    let pp1 = &p + 1;
    let s1 = &e * &e + 2 * &n2 * &pp1 * &e + &n4 * &pm1 * &pm1;
    let s2 = &e * &t2 + &n2 * &pm1 * &e + &n2 * (&p + 3) * &t2 + &n4 * &pm1 * &pm1;
    let s3 = 6 * &t2 * &n2 * &pm1 + &t2 * &t2 + &n4 * &pm1 * (3 * &p - 5);
    let p2 = &p * &p;
    let d2 = b.diameter_sq();
    let fourth = BigRational::new(
        &p2 * &p2 * s1 - 2 * &p2 * &pp1 * s2 + &pp1 * &pp1 * s3,
        &d2 * &d2,
    );
    let mean = BigRational::new(
        &p2 * &e - &pp1 * &t2 + &n2 * (&p2 * &p - 2 * &p2 + 1),
        d2,
    );
    Ok(fourth - &mean * &mean)
}

/// A(𝒱,𝒱) = (1 − 1/p − 1/p²)/2, independent of N.
pub fn avg_vertex_pairs(b: &BoxSpec) -> ExactRational {
    let p = p_rat(b);
    BigRational::new(&p * &p - &p - 1, 2 * &p * &p)
}

/// L(𝒱,𝒱) = (p − 2 + 1/p + 2/p² − 5/p³ − 4/p⁴) / (4(p−1)).
pub fn fourth_moment_vertex_pairs(b: &BoxSpec) -> ExactRational {
    let p = p_rat(b);
    let p2 = &p * &p;
    let p4 = &p2 * &p2;
    let num = &p4 * &p - 2 * &p4 + &p2 * &p + 2 * &p2 - 5 * &p - 4;
    BigRational::new(num, 4 * (&p - 1) * p4)
}

/// M(𝒱,𝒱) = (1 − 1/p² − 4/p³ − 3/p⁴) / (4(p−1)).
pub fn variance_vertex_pairs(b: &BoxSpec) -> ExactRational {
    let p = p_rat(b);
    let p2 = &p * &p;
    let p4 = &p2 * &p2;
    let num = &p4 - &p2 - 4 * &p - 3;
    BigRational::new(num, 4 * (&p - 1) * p4)
}

fn closed_forms(alpha: Option<&CyclotomicInt>, b: &BoxSpec) -> Result<Vec<(MomentKind, ExactRational)>> {
    Ok(match alpha {
        Some(a) => vec![
            (MomentKind::AvgPointVertices, avg_point_to_vertices(a, b)?),
            (MomentKind::SecondMomentPointVertices, second_moment_point_to_vertices(a, b)?),
        ],
        None => vec![
            (MomentKind::AvgVertexPairs, avg_vertex_pairs(b)),
            (MomentKind::FourthVertexPairs, fourth_moment_vertex_pairs(b)),
            (MomentKind::VarianceVertexPairs, variance_vertex_pairs(b)),
        ],
    })
}

/// Closed-form values only. Point-to-vertex moments when `alpha` is given,
/// vertex-pair moments otherwise.
pub fn moment_reports(alpha: Option<&CyclotomicInt>, b: &BoxSpec) -> Result<Vec<MomentReport>> {
    Ok(closed_forms(alpha, b)?
        .into_iter()
        .map(|(kind, formula_value)| MomentReport {
            kind,
            p: b.p(),
            n: b.n(),
            alpha: alpha.map(ToString::to_string),
            formula_value,
            oracle_value: None,
        })
        .collect())
}

fn guard(b: &BoxSpec) -> Result<()> {
    if b.p() > ORACLE_MAX_P {
        return Err(Error::OracleTooLarge { p: b.p(), limit: ORACLE_MAX_P });
    }
    Ok(())
}

/// Mean and central second moment of x/D² over a multiset of integer
/// squared distances given as value → multiplicity.
fn histogram_moments(hist: &BTreeMap<BigInt, u64>, d2: &BigInt) -> (ExactRational, ExactRational, ExactRational) {
    let total: u64 = hist.values().sum();
    let total = BigInt::from(total);
    let scaled = |s: &BigInt| BigRational::new(s.clone(), d2.clone());
    let mut sum = BigRational::zero();
    let mut sum4 = BigRational::zero();
    for (s, &c) in hist {
        let v = scaled(s);
        let c = BigRational::from_integer(BigInt::from(c));
        sum4 += &c * &v * &v;
        sum += c * v;
    }
    let count = BigRational::from_integer(total);
    let mean = sum / &count;
    let mut dev = BigRational::zero();
    for (s, &c) in hist {
        let v = scaled(s) - &mean;
        dev += BigRational::from_integer(BigInt::from(c)) * &v * &v;
    }
    (mean, sum4 / &count, dev / count)
}

fn vertices(b: &BoxSpec) -> Vec<CyclotomicInt> {
    (0..1u64 << b.dim()).map(|i| b.vertex(i)).collect()
}

/// Multiplicities of the integer squared distances from α to each vertex.
pub(crate) fn point_vertex_histogram(alpha: &CyclotomicInt, b: &BoxSpec) -> Result<BTreeMap<BigInt, u64>> {
    guard(b)?;
    b.check(alpha)?;
    let mut hist = BTreeMap::new();
    for x in vertices(b) {
        *hist.entry(dist_sq(alpha, &x)?).or_default() += 1;
    }
    Ok(hist)
}

/// Multiplicities of the integer squared distances over ordered vertex pairs.
pub(crate) fn vertex_pair_histogram(b: &BoxSpec) -> Result<BTreeMap<BigInt, u64>> {
    guard(b)?;
    let verts = vertices(b);
    let mut hist = BTreeMap::new();
    // unordered pairs counted twice, plus the zero diagonal
    hist.insert(BigInt::zero(), verts.len() as u64);
    for (i, x) in verts.iter().enumerate() {
        for y in &verts[i + 1..] {
            *hist.entry(dist_sq(x, y)?).or_default() += 2;
        }
    }
    Ok(hist)
}

/// Exhaustive moments by full enumeration of 𝒱 (or 𝒱×𝒱), paired with the
/// closed forms. Refuses p > [`ORACLE_MAX_P`].
pub fn oracle_moments(alpha: Option<&CyclotomicInt>, b: &BoxSpec) -> Result<Vec<MomentReport>> {
    let hist = match alpha {
        Some(a) => point_vertex_histogram(a, b)?,
        None => vertex_pair_histogram(b)?,
    };
    let (mean, fourth, central) = histogram_moments(&hist, &b.diameter_sq());
    let oracle: Vec<ExactRational> = match alpha {
        Some(_) => vec![mean, central],
        None => vec![mean, fourth, central],
    };
    let mut reports = moment_reports(alpha, b)?;
    for (r, o) in reports.iter_mut().zip(oracle) {
        r.oracle_value = Some(o);
    }
    Ok(reports)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CancellationCheck {
    pub name: &'static str,
    pub enumerated: BigInt,
    pub expected: BigInt,
}

impl CancellationCheck {
    pub fn holds(&self) -> bool {
        self.enumerated == self.expected
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CancellationRecord {
    pub p: u64,
    pub n: u64,
    pub checks: Vec<CancellationCheck>,
}

impl CancellationRecord {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(CancellationCheck::holds)
    }

    pub fn get(&self, name: &str) -> Option<&CancellationCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Enumerates the multinomial vertex sums that vanish or collapse by
/// symmetry of 𝒱 and compares each against its closed value:
///
/// * `linear`: Σ_x Σ_j a_j x_j = 0
/// * `quadratic`: Σ_x (Σ_j a_j x_j)² = #𝒱·∥**α**∥²_E·N²
/// * `trace_quadratic`: Σ_x Tr(α)²(Σ_m x_m)² = #𝒱·Tr(α)²·N²(p−1)
/// * `cubic`: Σ_x (Σ_j x_j)³ = 0
/// * `quartic`: Σ_x (Σ_j x_j)⁴ = #𝒱·N⁴(p−1)(3p−5)
pub fn oracle_cancellation_sums(alpha: &CyclotomicInt, b: &BoxSpec) -> Result<CancellationRecord> {
    guard(b)?;
    b.check(alpha)?;
    let mut linear = BigInt::zero();
    let mut quadratic = BigInt::zero();
    let mut trace_quadratic = BigInt::zero();
    let mut cubic = BigInt::zero();
    let mut quartic = BigInt::zero();
    let tr = alpha.trace();
    let tr2 = &tr * &tr;
    for x in vertices(b) {
        let ax: BigInt = alpha.coeffs().iter().zip(x.coeffs()).map(|(a, x)| a * x).sum();
        let sx: BigInt = x.coeffs().iter().sum();
        let sx2 = &sx * &sx;
        linear += &ax;
        quadratic += &ax * &ax;
        trace_quadratic += &tr2 * &sx2;
        cubic += &sx2 * &sx;
        quartic += &sx2 * &sx2;
    }
    let count = BigInt::from(1u64 << b.dim());
    let n = BigInt::from(b.n());
    let n2 = &n * &n;
    let p = BigInt::from(b.p());
    let checks = vec![
        CancellationCheck { name: "linear", enumerated: linear, expected: BigInt::zero() },
        CancellationCheck {
            name: "quadratic",
            enumerated: quadratic,
            expected: &count * alpha.euclid_norm_sq() * &n2,
        },
        CancellationCheck {
            name: "trace_quadratic",
            enumerated: trace_quadratic,
            expected: &count * &tr2 * &n2 * (&p - 1),
        },
        CancellationCheck { name: "cubic", enumerated: cubic, expected: BigInt::zero() },
        CancellationCheck {
            name: "quartic",
            enumerated: quartic,
            expected: &count * &n2 * &n2 * (&p - 1) * (3 * &p - 5),
        },
    ];
    Ok(CancellationRecord { p: b.p(), n: b.n(), checks })
}

/// A(α,𝒱) − 𝔡²(0,α): depends on p only.
pub fn point_average_offset(b: &BoxSpec) -> ExactRational {
    let p = b.p();
    ratio(p * p - p - 1, 4 * p * p)
}
