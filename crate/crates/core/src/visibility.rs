//! Lattice-point visibility inside the box and the 1/√6 concentration of
//! self-visible polytopes.
//!
//! β is visible from α when no other lattice point lies strictly between
//! them on the segment. Any such point is α + (k/g)(β − α) with g the gcd of
//! the coefficient differences, and it stays inside the box because boxes
//! are coordinate-wise convex, so visibility reduces to g = 1.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::concentration::{within_sqrt_interval, IntervalSpec};
use crate::cyclo::{dist_sq, normalized_dist_sq, BoxSpec, CyclotomicInt};
use crate::error::{Error, Result};
use crate::rational::{from_f64, ratio, to_f64, ExactRational};
use crate::sampling::{sample_box_point, tally_samples, SamplerConfig, Tally};

pub const DEFAULT_MAX_ATTEMPTS: u64 = 10_000;

/// Largest #𝓑 accepted by [`exhaustive_box_pair_mean`].
pub const EXHAUSTIVE_POINT_LIMIT: u64 = 5_000;

/// gcd of all coefficient differences equals 1.
pub fn is_visible(alpha: &CyclotomicInt, beta: &CyclotomicInt) -> Result<bool> {
    let diff = beta.try_sub(alpha)?;
    if diff.is_zero() {
        return Err(Error::DegeneratePair);
    }
    let mut g = BigInt::zero();
    for c in diff.coeffs() {
        g = g.gcd(c);
        if g.is_one() {
            return Ok(true);
        }
    }
    Ok(g.is_one())
}

/// Pairwise visibility of a tuple; coincident points count as not visible.
pub fn is_self_visible(points: &[CyclotomicInt]) -> Result<bool> {
    for (i, x) in points.iter().enumerate() {
        for y in &points[i + 1..] {
            match is_visible(x, y) {
                Ok(true) => {}
                Ok(false) | Err(Error::DegeneratePair) => return Ok(false),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfVisibleSample {
    pub points: Vec<CyclotomicInt>,
    /// Tuples drawn, including the accepted one.
    pub attempts: u64,
    /// Tuples rejected because two points coincided.
    pub degenerate: u64,
}

/// Rejection sampling over uniform K-tuples of box points until one is
/// pairwise visible.
pub fn sample_self_visible_polytope<R: RngCore>(
    b: &BoxSpec,
    k: u64,
    rng: &mut R,
    max_attempts: u64,
) -> Result<SelfVisibleSample> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("K = {k}: a polytope needs K >= 2")));
    }
    let mut degenerate = 0;
    for attempt in 1..=max_attempts {
        let points: Vec<_> = (0..k).map(|_| sample_box_point(b, rng)).collect();
        let distinct = points
            .iter()
            .enumerate()
            .all(|(i, x)| points[i + 1..].iter().all(|y| x != y));
        if !distinct {
            degenerate += 1;
            continue;
        }
        if is_self_visible(&points)? {
            return Ok(SelfVisibleSample { points, attempts: attempt, degenerate });
        }
    }
    Err(Error::AttemptsExhausted { attempts: max_attempts })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisibilityReport {
    pub p: u64,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "K")]
    pub k: u64,
    pub sample_count: u64,
    pub attempts: u64,
    pub degenerate: u64,
    /// Accepted tuples over non-degenerate draws.
    pub visible_fraction: f64,
    pub hits: u64,
    pub proportion_near_center: f64,
    pub center: f64,
    pub center_sq: String,
    pub epsilon: f64,
    pub target: f64,
    pub pass: bool,
    pub mean_dist_sq: f64,
    pub n_over_p: f64,
    pub seed: u64,
    pub notes: Vec<String>,
}

#[derive(Debug, Default, Clone, PartialEq)]
struct VisTally {
    hits: u64,
    attempts: u64,
    degenerate: u64,
    edges: u64,
    sum_dist_sq: ExactRational,
}

impl Tally for VisTally {
    fn merge(&mut self, later: Self) {
        self.hits += later.hits;
        self.attempts += later.attempts;
        self.degenerate += later.degenerate;
        self.edges += later.edges;
        self.sum_dist_sq += later.sum_dist_sq;
    }
}

/// Samples `cfg.sample_count` self-visible K-tuples and reports the share
/// whose every edge satisfies |𝔡 − 1/√6| ≤ ε, against the target 1 − ε.
pub fn visibility_concentration_report(
    b: &BoxSpec,
    k: u64,
    eps: f64,
    cfg: &SamplerConfig,
    max_attempts: u64,
) -> Result<VisibilityReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps}: need 0 < eps < 1")));
    }
    let spec = IntervalSpec::new(ratio(1, 6), from_f64(eps)?)?;
    let t: VisTally = tally_samples(cfg, |t: &mut VisTally, _, rng| {
        let s = sample_self_visible_polytope(b, k, rng, max_attempts)?;
        t.attempts += s.attempts;
        t.degenerate += s.degenerate;
        let mut ok = true;
        for (i, x) in s.points.iter().enumerate() {
            for y in &s.points[i + 1..] {
                let d = normalized_dist_sq(x, y, b)?;
                ok &= within_sqrt_interval(&d, &spec);
                t.sum_dist_sq += d;
                t.edges += 1;
            }
        }
        t.hits += u64::from(ok);
        Ok(())
    })?;
    let proportion = t.hits as f64 / cfg.sample_count as f64;
    let n_over_p = b.n() as f64 / b.p() as f64;
    let mut notes = vec![];
    if n_over_p < 10.0 {
        notes.push(format!("N/p = {n_over_p:.3} is below 10; the theorem asks for N/p large"));
    }
    Ok(VisibilityReport {
        p: b.p(),
        n: b.n(),
        k,
        sample_count: cfg.sample_count,
        attempts: t.attempts,
        degenerate: t.degenerate,
        visible_fraction: cfg.sample_count as f64 / (t.attempts - t.degenerate) as f64,
        hits: t.hits,
        proportion_near_center: proportion,
        center: (1.0f64 / 6.0).sqrt(),
        center_sq: "1/6".into(),
        epsilon: eps,
        target: 1.0 - eps,
        pass: proportion >= 1.0 - eps,
        mean_dist_sq: to_f64(&(t.sum_dist_sq / BigRational::from_integer(t.edges.into()))),
        n_over_p,
        seed: cfg.seed,
        notes,
    })
}

/// Mean of 𝔡² over independent uniform pairs of box points:
/// (N+1)(p²−p−1)/(6Np²).
pub fn box_pair_mean_closed_form(b: &BoxSpec) -> ExactRational {
    let (p, n) = (b.p(), b.n());
    ratio((n + 1) * (p * p - p - 1), 6 * n * p * p)
}

fn enumerate_box(b: &BoxSpec) -> Result<Vec<CyclotomicInt>> {
    match b.point_count() {
        Some(c) if c <= EXHAUSTIVE_POINT_LIMIT => Ok((0..c).map(|i| b.point(i)).collect()),
        _ => Err(Error::BudgetExceeded {
            needed: b.cardinality().to_string(),
            budget: EXHAUSTIVE_POINT_LIMIT as usize,
        }),
    }
}

/// The same mean by enumerating all ordered pairs of 𝓑.
pub fn exhaustive_box_pair_mean(b: &BoxSpec) -> Result<ExactRational> {
    let points = enumerate_box(b)?;
    let count = points.len() as u64;
    let mut total = BigInt::zero();
    for (i, x) in points.iter().enumerate() {
        for y in &points[i + 1..] {
            total += 2 * dist_sq(x, y)?;
        }
    }
    let pairs = BigInt::from(count) * BigInt::from(count);
    Ok(BigRational::new(total, pairs * b.diameter_sq()))
}

/// Seeded Monte Carlo estimate of the same mean; exact over the sample.
pub fn sampled_box_pair_mean(b: &BoxSpec, cfg: &SamplerConfig) -> Result<ExactRational> {
    let total: BigInt = tally_samples(cfg, |t: &mut BigInt, _, rng| {
        let x = sample_box_point(b, rng);
        let y = sample_box_point(b, rng);
        *t += dist_sq(&x, &y)?;
        Ok(())
    })?;
    Ok(BigRational::new(total, BigInt::from(cfg.sample_count) * b.diameter_sq()))
}

/// Exact fraction of visible ordered pairs among distinct box points.
pub fn exhaustive_visible_fraction(b: &BoxSpec) -> Result<ExactRational> {
    let points = enumerate_box(b)?;
    let count = points.len() as u64;
    let mut visible = 0u64;
    for (i, x) in points.iter().enumerate() {
        for y in &points[i + 1..] {
            visible += 2 * u64::from(is_visible(x, y)?);
        }
    }
    Ok(ratio(visible, count * (count - 1)))
}
