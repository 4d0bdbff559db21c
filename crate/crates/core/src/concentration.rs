//! Monte Carlo (and, for small p, exhaustive) checks of the concentration
//! statements: distances from a point to the vertices, isosceles triangles,
//! vertex pairs, super-regular K-polytopes, right central angles and pyramids.
//!
//! Membership in a distance interval is always decided exactly on squared
//! distances; only the reported proportions and bounds are floats.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::cyclo::{cos_central_angle, normalized_dist_sq, BoxSpec, CyclotomicInt};
use crate::error::{Error, Result};
use crate::moments::{avg_point_to_vertices, avg_vertex_pairs, point_vertex_histogram, vertex_pair_histogram};
use crate::rational::{from_f64, ratio, to_f64, to_fraction_string, ExactRational};
use crate::sampling::{sample_vertex, tally_samples, SamplerConfig, Tally};

/// The interval [√A − ε, √A + ε] for a distance whose square is compared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSpec {
    center_sq: ExactRational,
    epsilon: ExactRational,
}

impl IntervalSpec {
    pub fn new(center_sq: ExactRational, epsilon: ExactRational) -> Result<Self> {
        if !epsilon.is_positive() {
            return Err(Error::InvalidParameter("interval half-width must be positive".into()));
        }
        if center_sq.is_negative() {
            return Err(Error::InvalidParameter("squared center must be non-negative".into()));
        }
        Ok(Self { center_sq, epsilon })
    }

    pub fn center_sq(&self) -> &ExactRational {
        &self.center_sq
    }

    pub fn epsilon(&self) -> &ExactRational {
        &self.epsilon
    }
}

/// |√d − √A| ≤ ε, decided without square roots:
/// d + A − ε² ≤ 0, or (d + A − ε²)² ≤ 4Ad.
pub fn within_sqrt_interval(d_sq: &ExactRational, spec: &IntervalSpec) -> bool {
    let t = d_sq + &spec.center_sq - &spec.epsilon * &spec.epsilon;
    if !t.is_positive() {
        return true;
    }
    &t * &t <= BigRational::from_integer(BigInt::from(4)) * &spec.center_sq * d_sq
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    T4,
    T5,
    Isosceles,
    RightAngle,
    KPolytope,
    Pyramid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Vacuous,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Vacuous => "vacuous",
        }
    }
}

/// A named auxiliary statistic attached to a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extra {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub theorem: Theorem,
    pub p: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub alpha: Option<String>,
    #[serde(rename = "K")]
    pub k: Option<u64>,
    /// Exact half-width as "num/den".
    pub epsilon: String,
    pub epsilon_float: f64,
    pub eta: f64,
    /// Exact squared center as "num/den", when the interval has one.
    pub center_sq: Option<String>,
    pub exhaustive: bool,
    pub samples: u64,
    pub hits: u64,
    pub empirical_proportion: f64,
    pub bound: f64,
    pub bound_kind: String,
    pub vacuous: bool,
    pub pass: bool,
    pub verdict: Verdict,
    pub seed: u64,
    pub extras: Vec<Extra>,
    pub notes: Vec<String>,
}

impl ConcentrationReport {
    pub fn extra(&self, name: &str) -> Option<f64> {
        self.extras.iter().find(|e| e.name == name).map(|e| e.value)
    }

    /// Binomial standard error of the empirical proportion.
    pub fn standard_error(&self) -> f64 {
        binomial_se(self.empirical_proportion, self.samples)
    }
}

pub fn binomial_se(prop: f64, n: u64) -> f64 {
    (prop * (1.0 - prop) / n as f64).sqrt()
}

/// η with ε = p^{−η}.
pub fn eta_from_epsilon(eps: f64, p: u64) -> f64 {
    (1.0 / eps).ln() / (p as f64).ln()
}

/// 1 − c / p^{1−2η}.
pub fn explicit_bound(c: f64, p: u64, eta: f64) -> f64 {
    1.0 - c / (p as f64).powf(1.0 - 2.0 * eta)
}

/// Short label for α: "origin", "north-pole", the coefficients when short,
/// or a summary otherwise.
pub fn describe_alpha(alpha: &CyclotomicInt, b: &BoxSpec) -> String {
    if alpha.is_zero() {
        "origin".into()
    } else if alpha.p() == b.p() && *alpha == b.north_pole() {
        "north-pole".into()
    } else if alpha.coeffs().len() <= 16 {
        alpha.to_string()
    } else {
        format!("custom(tr={},e={})", alpha.trace(), alpha.euclid_norm_sq())
    }
}

struct Draft {
    theorem: Theorem,
    b: BoxSpec,
    alpha: Option<String>,
    k: Option<u64>,
    epsilon: ExactRational,
    eta: f64,
    center_sq: Option<ExactRational>,
    exhaustive: bool,
    samples: u64,
    hits: u64,
    bound: f64,
    bound_kind: String,
    seed: u64,
    extras: Vec<Extra>,
    notes: Vec<String>,
}

impl Draft {
    fn finish(mut self) -> ConcentrationReport {
        let prop = self.hits as f64 / self.samples as f64;
        let vacuous = self.bound <= 0.0;
        let pass = vacuous || prop >= self.bound;
        let verdict = if vacuous {
            Verdict::Vacuous
        } else if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        if vacuous {
            self.notes.push("bound is non-positive; excluded from pass/fail aggregates".into());
        }
        if self.theorem != Theorem::RightAngle && !(self.eta > 0.0 && self.eta < 0.5) {
            self.notes.push(format!("eta = {:.6} lies outside (0, 1/2)", self.eta));
        }
        ConcentrationReport {
            theorem: self.theorem,
            p: self.b.p(),
            n: self.b.n(),
            alpha: self.alpha,
            k: self.k,
            epsilon: to_fraction_string(&self.epsilon),
            epsilon_float: to_f64(&self.epsilon),
            eta: self.eta,
            center_sq: self.center_sq.as_ref().map(to_fraction_string),
            exhaustive: self.exhaustive,
            samples: self.samples,
            hits: self.hits,
            empirical_proportion: prop,
            bound: self.bound,
            bound_kind: self.bound_kind,
            vacuous,
            pass,
            verdict,
            seed: self.seed,
            extras: self.extras,
            notes: self.notes,
        }
    }
}

/// Total multiplicity of the squared distances that fall inside `spec`.
fn histogram_hits(hist: &BTreeMap<BigInt, u64>, b: &BoxSpec, spec: &IntervalSpec) -> u64 {
    let d2 = b.diameter_sq();
    hist.iter()
        .filter(|(s, _)| within_sqrt_interval(&BigRational::new((*s).clone(), d2.clone()), spec))
        .map(|(_, c)| c)
        .sum()
}

/// Counts of several predicates evaluated on the same samples.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
struct Counts(Vec<u64>);

impl Counts {
    fn add(&mut self, flags: &[bool]) {
        if self.0.len() < flags.len() {
            self.0.resize(flags.len(), 0);
        }
        for (c, &f) in self.0.iter_mut().zip(flags) {
            *c += u64::from(f);
        }
    }

    fn get(&self, i: usize) -> u64 {
        self.0.get(i).copied().unwrap_or(0)
    }
}

impl Tally for Counts {
    fn merge(&mut self, later: Self) {
        if self.0.len() < later.0.len() {
            self.0.resize(later.0.len(), 0);
        }
        for (c, l) in self.0.iter_mut().zip(later.0) {
            *c += l;
        }
    }
}

/// Proportion of vertices x with |𝔡(α,x) − √A(α,𝒱)| ≤ ε; explicit bound
/// 1 − 22/p^{1−2η} where ε = p^{−η}.
pub fn theorem4_report(
    alpha: &CyclotomicInt,
    b: &BoxSpec,
    eps: &ExactRational,
    cfg: &SamplerConfig,
    exhaustive: bool,
) -> Result<ConcentrationReport> {
    b.check(alpha)?;
    let center = avg_point_to_vertices(alpha, b)?;
    let spec = IntervalSpec::new(center.clone(), eps.clone())?;
    let hit = |x: &CyclotomicInt| -> Result<bool> {
        Ok(within_sqrt_interval(&normalized_dist_sq(alpha, x, b)?, &spec))
    };
    let (samples, hits) = if exhaustive {
        let hist = point_vertex_histogram(alpha, b)?;
        let hits = histogram_hits(&hist, b, &spec);
        (hist.values().sum(), hits)
    } else {
        let hits: u64 = tally_samples(cfg, |t: &mut u64, _, rng| {
            *t += u64::from(hit(&sample_vertex(b, rng))?);
            Ok(())
        })?;
        (cfg.sample_count, hits)
    };
    let eta = eta_from_epsilon(to_f64(eps), b.p());
    Ok(Draft {
        theorem: Theorem::T4,
        b: *b,
        alpha: Some(describe_alpha(alpha, b)),
        k: None,
        epsilon: eps.clone(),
        eta,
        center_sq: Some(center),
        exhaustive,
        samples,
        hits,
        bound: explicit_bound(22.0, b.p(), eta),
        bound_kind: "1 - 22/p^(1-2eta)".into(),
        seed: cfg.seed,
        extras: vec![],
        notes: vec![],
    }
    .finish())
}

/// Proportion of vertex pairs (β₁,β₂) with both 𝔡(α,βᵢ) in the Theorem 4
/// interval; bound 1 − 44/p^{1−2η}.
pub fn isosceles_report(
    alpha: &CyclotomicInt,
    b: &BoxSpec,
    eps: &ExactRational,
    cfg: &SamplerConfig,
) -> Result<ConcentrationReport> {
    b.check(alpha)?;
    let center = avg_point_to_vertices(alpha, b)?;
    let spec = IntervalSpec::new(center.clone(), eps.clone())?;
    let hits: u64 = tally_samples(cfg, |t: &mut u64, _, rng| {
        let b1 = sample_vertex(b, rng);
        let b2 = sample_vertex(b, rng);
        let ok = within_sqrt_interval(&normalized_dist_sq(alpha, &b1, b)?, &spec)
            && within_sqrt_interval(&normalized_dist_sq(alpha, &b2, b)?, &spec);
        *t += u64::from(ok);
        Ok(())
    })?;
    let eta = eta_from_epsilon(to_f64(eps), b.p());
    Ok(Draft {
        theorem: Theorem::Isosceles,
        b: *b,
        alpha: Some(describe_alpha(alpha, b)),
        k: None,
        epsilon: eps.clone(),
        eta,
        center_sq: Some(center),
        exhaustive: false,
        samples: cfg.sample_count,
        hits,
        bound: explicit_bound(44.0, b.p(), eta),
        bound_kind: "1 - 44/p^(1-2eta)".into(),
        seed: cfg.seed,
        extras: vec![],
        notes: vec![],
    }
    .finish())
}

/// Proportion of vertex pairs with |𝔡(β₁,β₂) − √A(𝒱,𝒱)| ≤ ε; bound
/// 1 − 2/p^{1−2η}. The extra `proportion_center_half` uses center 1/√2.
pub fn vertex_pair_report(
    b: &BoxSpec,
    eps: &ExactRational,
    cfg: &SamplerConfig,
    exhaustive: bool,
) -> Result<ConcentrationReport> {
    let center = avg_vertex_pairs(b);
    let spec = IntervalSpec::new(center.clone(), eps.clone())?;
    let half = IntervalSpec::new(ratio(1, 2), eps.clone())?;
    let flags = |x: &CyclotomicInt, y: &CyclotomicInt| -> Result<[bool; 2]> {
        let d = normalized_dist_sq(x, y, b)?;
        Ok([within_sqrt_interval(&d, &spec), within_sqrt_interval(&d, &half)])
    };
    let (samples, counts) = if exhaustive {
        let hist = vertex_pair_histogram(b)?;
        let counts = Counts(vec![histogram_hits(&hist, b, &spec), histogram_hits(&hist, b, &half)]);
        (hist.values().sum(), counts)
    } else {
        let counts: Counts = tally_samples(cfg, |t: &mut Counts, _, rng| {
            let x = sample_vertex(b, rng);
            let y = sample_vertex(b, rng);
            t.add(&flags(&x, &y)?);
            Ok(())
        })?;
        (cfg.sample_count, counts)
    };
    let eta = eta_from_epsilon(to_f64(eps), b.p());
    let gap = (ratio(1, 2) - &center).abs();
    let mut notes = vec![];
    if gap > ratio(1, b.p()) + ratio(1, b.p() * b.p()) {
        notes.push("|A - 1/2| exceeds 1/p + 1/p^2".into());
    }
    Ok(Draft {
        theorem: Theorem::T5,
        b: *b,
        alpha: None,
        k: Some(2),
        epsilon: eps.clone(),
        eta,
        center_sq: Some(center),
        exhaustive,
        samples,
        hits: counts.get(0),
        bound: explicit_bound(2.0, b.p(), eta),
        bound_kind: "1 - 2/p^(1-2eta)".into(),
        seed: cfg.seed,
        extras: vec![Extra {
            name: "proportion_center_half".into(),
            value: counts.get(1) as f64 / samples as f64,
        }],
        notes,
    }
    .finish())
}

fn all_pairs_within(points: &[CyclotomicInt], b: &BoxSpec, spec: &IntervalSpec) -> Result<bool> {
    for (i, x) in points.iter().enumerate() {
        for y in &points[i + 1..] {
            if !within_sqrt_interval(&normalized_dist_sq(x, y, b)?, spec) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Proportion of K-tuples of vertices whose C(K,2) normalized distances all
/// lie within 1/T of 1/√2. Bound: union of Theorem 5 over the edges,
/// 1 − K(K−1)/p^{1−2η} with T = p^η.
pub fn polytope_report(b: &BoxSpec, k: u64, t: f64, cfg: &SamplerConfig) -> Result<ConcentrationReport> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("K = {k}: a polytope needs K >= 2")));
    }
    if !(t > 1.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("T = {t}: need T > 1")));
    }
    let eps = from_f64(1.0 / t)?;
    let spec = IntervalSpec::new(ratio(1, 2), eps.clone())?;
    let hits: u64 = tally_samples(cfg, |c: &mut u64, _, rng| {
        let pts: Vec<_> = (0..k).map(|_| sample_vertex(b, rng)).collect();
        *c += u64::from(all_pairs_within(&pts, b, &spec)?);
        Ok(())
    })?;
    let eta = t.ln() / (b.p() as f64).ln();
    Ok(Draft {
        theorem: Theorem::KPolytope,
        b: *b,
        alpha: None,
        k: Some(k),
        epsilon: eps,
        eta,
        center_sq: Some(ratio(1, 2)),
        exhaustive: false,
        samples: cfg.sample_count,
        hits,
        bound: explicit_bound((k * (k - 1)) as f64, b.p(), eta),
        bound_kind: "1 - K(K-1)/p^(1-2eta), union bound over edges".into(),
        seed: cfg.seed,
        extras: vec![Extra { name: "T".into(), value: t }],
        notes: vec![],
    }
    .finish())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RightAngleSpec {
    /// Threshold on |cos|.
    pub eps_cos: f64,
    /// Required proportion for a pass.
    pub target: f64,
    pub eta: f64,
    pub gamma: f64,
}

/// Proportion of vertices β with |cos ∠αOβ| ≤ eps_cos. The precondition
/// 𝔡(O,α) ≥ p^{γ−η} is checked and its margin recorded; the median |cos|
/// and the decay proxy 2√(3/p) are attached as extras.
pub fn right_angle_report(
    alpha: &CyclotomicInt,
    b: &BoxSpec,
    spec: &RightAngleSpec,
    cfg: &SamplerConfig,
) -> Result<ConcentrationReport> {
    b.check(alpha)?;
    if alpha.is_zero() {
        return Err(Error::DegenerateAngle);
    }
    if !(spec.eps_cos > 0.0) {
        return Err(Error::InvalidParameter("cosine threshold must be positive".into()));
    }
    let eps = from_f64(spec.eps_cos)?;
    let eps_sq = &eps * &eps;
    let cosines: Vec<(bool, f64)> = tally_samples(cfg, |t: &mut Vec<(bool, f64)>, _, rng| {
        let angle = cos_central_angle(alpha, &sample_vertex(b, rng))?;
        t.push((angle.cos_sq <= eps_sq, angle.abs_cos()));
        Ok(())
    })?;
    let hits = cosines.iter().filter(|c| c.0).count() as u64;
    let mut abs: Vec<f64> = cosines.iter().map(|c| c.1).collect();
    abs.sort_by(f64::total_cmp);
    let median = if abs.len() % 2 == 1 {
        abs[abs.len() / 2]
    } else {
        (abs[abs.len() / 2 - 1] + abs[abs.len() / 2]) / 2.0
    };
    let origin_dist = to_f64(&normalized_dist_sq(&b.origin(), alpha, b)?).sqrt();
    let threshold = (b.p() as f64).powf(spec.gamma - spec.eta);
    let margin = origin_dist - threshold;
    let mut notes = vec![format!(
        "target proportion {} is calibrated, not a closed-form bound",
        spec.target
    )];
    if margin < 0.0 {
        notes.push("precondition d(O,alpha) >= p^(gamma-eta) not met".into());
    }
    Ok(Draft {
        theorem: Theorem::RightAngle,
        b: *b,
        alpha: Some(describe_alpha(alpha, b)),
        k: None,
        epsilon: eps,
        eta: spec.eta,
        center_sq: None,
        exhaustive: false,
        samples: cfg.sample_count,
        hits,
        bound: spec.target,
        bound_kind: "calibrated target".into(),
        seed: cfg.seed,
        extras: vec![
            Extra { name: "median_abs_cos".into(), value: median },
            Extra { name: "decay_proxy".into(), value: 2.0 * (3.0 / b.p() as f64).sqrt() },
            Extra { name: "origin_distance".into(), value: origin_dist },
            Extra { name: "precondition_margin".into(), value: margin },
            Extra { name: "gamma".into(), value: spec.gamma },
        ],
        notes,
    }
    .finish())
}

/// Pyramids with apex α ∈ 𝓑 and base a K-tuple of vertices. A sample hits
/// when every base edge is within ε of 1/√2 and every lateral edge within ε
/// of √A(α,𝒱). Bound: base union bound plus Theorem 4 per lateral edge,
/// 1 − (K(K−1) + 22K)/p^{1−2η}.
pub fn pyramid_report(
    apex: &CyclotomicInt,
    b: &BoxSpec,
    k: u64,
    eps: &ExactRational,
    cfg: &SamplerConfig,
) -> Result<ConcentrationReport> {
    b.check(apex)?;
    if !apex.in_box(b) {
        return Err(Error::OutsideBox { p: b.p(), n: b.n() });
    }
    if k < 2 {
        return Err(Error::InvalidParameter(format!("K = {k}: the base needs K >= 2")));
    }
    let base = IntervalSpec::new(ratio(1, 2), eps.clone())?;
    let lateral_center = avg_point_to_vertices(apex, b)?;
    let lateral = IntervalSpec::new(lateral_center.clone(), eps.clone())?;
    let quarter = IntervalSpec::new(ratio(1, 4), eps.clone())?;
    let near_origin = normalized_dist_sq(&b.origin(), apex, b)? <= eps * eps;
    let counts: Counts = tally_samples(cfg, |c: &mut Counts, _, rng| {
        let pts: Vec<_> = (0..k).map(|_| sample_vertex(b, rng)).collect();
        let base_ok = all_pairs_within(&pts, b, &base)?;
        let mut lateral_ok = true;
        let mut half_ok = true;
        for x in &pts {
            let d = normalized_dist_sq(apex, x, b)?;
            lateral_ok &= within_sqrt_interval(&d, &lateral);
            half_ok &= within_sqrt_interval(&d, &quarter);
        }
        c.add(&[base_ok && lateral_ok, base_ok, lateral_ok, base_ok && half_ok]);
        Ok(())
    })?;
    let n = cfg.sample_count as f64;
    let eta = eta_from_epsilon(to_f64(eps), b.p());
    let mut extras = vec![
        Extra { name: "base_proportion".into(), value: counts.get(1) as f64 / n },
        Extra { name: "lateral_proportion".into(), value: counts.get(2) as f64 / n },
    ];
    let mut notes = vec![];
    if near_origin {
        extras.push(Extra { name: "right_isosceles_proportion".into(), value: counts.get(3) as f64 / n });
        notes.push("apex within eps of O: lateral target 1/2, and (1/2)^2 + (1/2)^2 = (1/sqrt2)^2 exactly".into());
    }
    Ok(Draft {
        theorem: Theorem::Pyramid,
        b: *b,
        alpha: Some(describe_alpha(apex, b)),
        k: Some(k),
        epsilon: eps.clone(),
        eta,
        center_sq: Some(lateral_center),
        exhaustive: false,
        samples: cfg.sample_count,
        hits: counts.get(0),
        bound: explicit_bound((k * (k - 1) + 22 * k) as f64, b.p(), eta),
        bound_kind: "1 - (K(K-1) + 22K)/p^(1-2eta)".into(),
        seed: cfg.seed,
        extras,
        notes,
    }
    .finish())
}

/// Exact proportion of ordered vertex pairs inside `spec`, by enumeration.
pub fn exhaustive_pair_proportion(b: &BoxSpec, spec: &IntervalSpec) -> Result<ExactRational> {
    let hist = vertex_pair_histogram(b)?;
    Ok(ratio(histogram_hits(&hist, b, spec), hist.values().sum::<u64>()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;

    fn bx(p: u64, n: u64) -> BoxSpec {
        BoxSpec::new(p, n).unwrap()
    }

    #[test]
    fn interval_examples() {
        let s = IntervalSpec::new(ratio(5, 18), ratio(1, 10)).unwrap();
        assert!(within_sqrt_interval(&ratio(5, 18), &s));
        let half = IntervalSpec::new(ratio(1, 2), ratio(1, 10)).unwrap();
        assert!(!within_sqrt_interval(&parse_rational("0.823").unwrap(), &half));
        // zero deviation with ε² ≤ 4A
        let wide = IntervalSpec::new(ratio(1, 4), ratio(1, 1)).unwrap();
        assert!(within_sqrt_interval(&ratio(1, 4), &wide));
        assert!(IntervalSpec::new(ratio(1, 2), ratio(0, 1)).is_err());
        assert!(IntervalSpec::new(ratio(-1, 2), ratio(1, 2)).is_err());
    }

    #[test]
    fn interval_matches_float_test_off_the_boundary() {
        let spec = IntervalSpec::new(ratio(1, 3), ratio(1, 7)).unwrap();
        for i in 0..=400u64 {
            let d = ratio(i, 300);
            let lhs = (to_f64(&d).sqrt() - (1.0f64 / 3.0).sqrt()).abs();
            if (lhs - 1.0 / 7.0).abs() > 1e-9 {
                assert_eq!(within_sqrt_interval(&d, &spec), lhs <= 1.0 / 7.0, "d = {d}");
            }
        }
    }

    #[test]
    fn theorem4_vacuous_at_small_p() {
        let b = bx(7, 1);
        let cfg = SamplerConfig::new(1, 200, 1).unwrap();
        let r = theorem4_report(&b.origin(), &b, &ratio(1, 2), &cfg, false).unwrap();
        assert!(r.bound < 0.0 && r.vacuous && r.pass);
        assert_eq!(r.verdict, Verdict::Vacuous);
    }

    #[test]
    fn theorem4_exhaustive_p3() {
        // distances² from O: 1/36 for (±1,±1) equal signs, 1/4 otherwise; A = 5/36
        let b = bx(3, 1);
        let cfg = SamplerConfig::new(1, 1, 1).unwrap();
        let r = theorem4_report(&b.origin(), &b, &ratio(1, 2), &cfg, true).unwrap();
        assert_eq!((r.samples, r.hits), (4, 4));
        assert_eq!(r.center_sq.as_deref(), Some("5/36"));
        // √(5/36) ≈ 0.3727; |1/6 − 0.3727| ≈ 0.206 and |1/2 − 0.3727| ≈ 0.127
        let r = theorem4_report(&b.origin(), &b, &ratio(15, 100), &cfg, true).unwrap();
        assert_eq!(r.hits, 2);
        let r = theorem4_report(&b.origin(), &b, &ratio(21, 100), &cfg, true).unwrap();
        assert_eq!(r.hits, 4);
    }

    #[test]
    fn vertex_pairs_exhaustive_p3() {
        // d² over 16 ordered pairs: 0 ×4, 5/18 ×8, 1/9 ×2, 1 ×2; center √(5/18) ≈ 0.527
        let b = bx(3, 1);
        let cfg = SamplerConfig::new(1, 1, 1).unwrap();
        let r = vertex_pair_report(&b, &ratio(1, 10), &cfg, true).unwrap();
        assert_eq!((r.samples, r.hits), (16, 8));
        let r = vertex_pair_report(&b, &ratio(1, 2), &cfg, true).unwrap();
        // 1/3 and 1 are within 1/2 of 0.527, 0 is not
        assert_eq!(r.hits, 12);
    }

    #[test]
    fn isosceles_bound_is_twice_theorem4_deficit() {
        let b = bx(101, 1);
        let cfg = SamplerConfig::new(3, 50, 1).unwrap();
        let eps = ratio(1, 3);
        let t4 = theorem4_report(&b.origin(), &b, &eps, &cfg, false).unwrap();
        let iso = isosceles_report(&b.origin(), &b, &eps, &cfg).unwrap();
        assert!(((1.0 - iso.bound) - 2.0 * (1.0 - t4.bound)).abs() < 1e-12);
    }

    #[test]
    fn isosceles_with_wide_interval_is_total() {
        let b = bx(11, 2);
        let cfg = SamplerConfig::new(3, 300, 2).unwrap();
        let r = isosceles_report(&b.north_pole(), &b, &ratio(1, 1), &cfg).unwrap();
        assert_eq!(r.hits, 300);
    }

    #[test]
    fn polytope_k2_matches_vertex_pairs_center_half() {
        let b = bx(31, 1);
        let cfg = SamplerConfig::new(17, 2000, 1).unwrap();
        let t = 8.0;
        let poly = polytope_report(&b, 2, t, &cfg).unwrap();
        let pairs = vertex_pair_report(&b, &from_f64(1.0 / t).unwrap(), &cfg, false).unwrap();
        assert_eq!(
            poly.empirical_proportion,
            pairs.extra("proportion_center_half").unwrap()
        );
    }

    #[test]
    fn parameter_errors() {
        let b = bx(11, 1);
        let cfg = SamplerConfig::new(1, 10, 1).unwrap();
        assert!(polytope_report(&b, 1, 2.0, &cfg).is_err());
        assert!(polytope_report(&b, 3, 1.0, &cfg).is_err());
        let spec = RightAngleSpec { eps_cos: 0.1, target: 0.9, eta: 0.3, gamma: 0.1 };
        assert_eq!(right_angle_report(&b.origin(), &b, &spec, &cfg).unwrap_err(), Error::DegenerateAngle);
        assert!(pyramid_report(&b.origin(), &b, 1, &ratio(1, 10), &cfg).is_err());
        let outside = CyclotomicInt::from_i64s(11, &[2; 10]).unwrap();
        assert_eq!(
            pyramid_report(&outside, &b, 3, &ratio(1, 10), &cfg).unwrap_err(),
            Error::OutsideBox { p: 11, n: 1 }
        );
        assert!(theorem4_report(&bx(19, 1).origin(), &bx(19, 1), &ratio(1, 2), &cfg, true).is_err());
    }

    #[test]
    fn right_angle_small_box() {
        // α = (−1,−1) = 1; the vertices are 1, −1 and ±i√3, so exactly half are right
        let b = bx(3, 1);
        let cfg = SamplerConfig::new(5, 400, 1).unwrap();
        let spec = RightAngleSpec { eps_cos: 0.01, target: 0.5, eta: 0.4, gamma: 0.01 };
        let r = right_angle_report(&b.vertex(0), &b, &spec, &cfg).unwrap();
        assert!((r.empirical_proportion - 0.5).abs() < 0.1);
        assert_eq!(r.extra("median_abs_cos").map(|m| m <= 1.0), Some(true));
    }

    #[test]
    fn reports_are_deterministic_across_workers() {
        let b = bx(53, 2);
        let eps = ratio(1, 5);
        let one = theorem4_report(&b.north_pole(), &b, &eps, &SamplerConfig::new(9, 999, 1).unwrap(), false).unwrap();
        let many = theorem4_report(&b.north_pole(), &b, &eps, &SamplerConfig::new(9, 999, 6).unwrap(), false).unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn pyramid_near_origin_annotates() {
        let b = bx(101, 1);
        let cfg = SamplerConfig::new(2, 100, 1).unwrap();
        let r = pyramid_report(&b.origin(), &b, 3, &ratio(1, 5), &cfg).unwrap();
        assert!(r.extra("right_isosceles_proportion").is_some());
        assert!(r.notes.iter().any(|n| n.contains("exactly")));
        assert!(r.empirical_proportion <= r.extra("base_proportion").unwrap());
    }
}
