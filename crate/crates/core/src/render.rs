//! SVG 1.1 scenes in the complex plane: box point clouds, poles with their
//! encircling circle, random polytopes and pyramids on 𝒱(p,N).
//!
//! The viewBox is centered on 0 and y is flipped, so a lattice point z and
//! −z print as the same digits with opposite signs.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cyclo::{BoxSpec, CyclotomicInt};
use crate::error::{Error, Result};
use crate::poles;
use crate::sampling::{sample_box_point, sample_stream, sample_vertex};

pub const DEFAULT_BUDGET: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneKind {
    BoxPoints,
    PolesCircle,
    RandomPolytopes,
    Pyramids,
}

impl std::str::FromStr for SceneKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "box_points" | "box-points" => Ok(SceneKind::BoxPoints),
            "poles_circle" | "poles-circle" => Ok(SceneKind::PolesCircle),
            "random_polytopes" | "random-polytopes" => Ok(SceneKind::RandomPolytopes),
            "pyramids" => Ok(SceneKind::Pyramids),
            other => Err(Error::InvalidParameter(format!("unknown scene kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub kind: SceneKind,
    /// Modulus; must be an odd prime except for `PolesCircle`.
    pub q: u64,
    pub n: u64,
    pub k: u64,
    /// Number of polytopes or pyramids.
    pub count: u64,
    pub budget: usize,
    pub seed: u64,
    pub allow_sampling: bool,
}

impl SceneSpec {
    pub fn new(kind: SceneKind, q: u64, n: u64) -> Self {
        let count = if kind == SceneKind::Pyramids { 10 } else { 26 };
        SceneSpec { kind, q, n, k: 3, count, budget: DEFAULT_BUDGET, seed: 0, allow_sampling: false }
    }
}

/// Largest |z| over the vertices of 𝒱(q,N). The extreme vertices of the
/// zonogon are the sign patterns sign cos(2πj/q − θ) between consecutive
/// breakpoints θ_j ± π/2, so only 2(q−1) candidates need checking.
pub fn max_vertex_modulus(q: u64, n: u64) -> f64 {
    let angles: Vec<f64> = (1..q).map(|j| TAU * j as f64 / q as f64).collect();
    let mut breaks: Vec<f64> = angles
        .iter()
        .flat_map(|a| [(a + FRAC_PI_2).rem_euclid(TAU), (a - FRAC_PI_2).rem_euclid(TAU)])
        .collect();
    breaks.sort_by(f64::total_cmp);
    let mut best: f64 = 0.0;
    for (i, lo) in breaks.iter().enumerate() {
        let hi = breaks.get(i + 1).copied().unwrap_or(breaks[0] + TAU);
        let mid = (lo + hi) / 2.0;
        let signs: Vec<i8> = angles.iter().map(|a| if (a - mid).cos() >= 0.0 { 1 } else { -1 }).collect();
        let (re, im) = poles::embed_signs(q, n, &signs);
        best = best.max(re.hypot(im));
    }
    best
}

/// Radius of the encircling circle: half the Euclidean diameter for odd q,
/// the largest vertex modulus for even q.
pub fn encircling_radius(q: u64, n: u64) -> Result<f64> {
    match poles::euclidean_diameter(q, n) {
        Ok(d) => Ok(d / 2.0),
        Err(Error::EvenModulus(_)) => Ok(max_vertex_modulus(q, n)),
        Err(e) => Err(e),
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0.000000".into()
    } else {
        s
    }
}

#[derive(Default)]
struct Canvas {
    groups: Vec<(String, String, Vec<(f64, f64)>)>,
    edges: Vec<((f64, f64), (f64, f64))>,
    poles: Vec<(&'static str, (f64, f64))>,
    circle: Option<f64>,
    annotations: Vec<String>,
}

impl Canvas {
    fn group(&mut self, class: &str, fill: &str, pts: Vec<(f64, f64)>) {
        self.groups.push((class.into(), fill.into(), pts));
    }

    fn extent(&self) -> f64 {
        let pts = self
            .groups
            .iter()
            .flat_map(|g| g.2.iter())
            .chain(self.poles.iter().map(|p| &p.1));
        let r = pts.fold(self.circle.unwrap_or(0.0), |m, &(x, y)| m.max(x.hypot(y)));
        if r > 0.0 {
            r * 1.08
        } else {
            1.0
        }
    }

    fn finish(self, title: &str) -> String {
        let ext = self.extent();
        let total: usize = self.groups.iter().map(|g| g.2.len()).sum();
        let r = ext * 0.04 / (total.max(3) as f64).ln();
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" height=\"640\" viewBox=\"{} {} {} {}\">",
            num(-ext),
            num(-ext),
            num(2.0 * ext),
            num(2.0 * ext)
        );
        let _ = writeln!(s, "<title>{title}</title>");
        let _ = writeln!(s, "<rect x=\"{0}\" y=\"{0}\" width=\"{1}\" height=\"{1}\" fill=\"white\"/>", num(-ext), num(2.0 * ext));
        let thin = num(ext * 0.002);
        if let Some(c) = self.circle {
            let _ = writeln!(
                s,
                "<circle class=\"encircling\" cx=\"0.000000\" cy=\"0.000000\" r=\"{}\" fill=\"none\" stroke=\"#555\" stroke-width=\"{thin}\"/>",
                num(c)
            );
        }
        if !self.edges.is_empty() {
            let _ = writeln!(s, "<g class=\"edges\" stroke=\"#1f5fa8\" stroke-width=\"{thin}\" stroke-opacity=\"0.7\">");
            for ((x1, y1), (x2, y2)) in &self.edges {
                let _ = writeln!(
                    s,
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
                    num(*x1),
                    num(-y1),
                    num(*x2),
                    num(-y2)
                );
            }
            s.push_str("</g>\n");
        }
        for (class, fill, pts) in &self.groups {
            let radius = if class == "points" { r } else { r * 1.6 };
            let _ = writeln!(s, "<g class=\"{class}\" fill=\"{fill}\">");
            for (x, y) in pts {
                let _ = writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>", num(*x), num(-y), num(radius));
            }
            s.push_str("</g>\n");
        }
        if !self.poles.is_empty() {
            let _ = writeln!(s, "<g class=\"poles\" fill=\"#d4a017\" font-size=\"{}\">", num(ext * 0.05));
            for (name, (x, y)) in &self.poles {
                let _ = writeln!(s, "<circle id=\"{name}\" cx=\"{}\" cy=\"{}\" r=\"{}\"/>", num(*x), num(-y), num(r * 2.5));
                let _ = writeln!(s, "<text x=\"{}\" y=\"{}\">{name}</text>", num(x + r * 3.0), num(-y - r * 3.0));
            }
            s.push_str("</g>\n");
        }
        for (i, a) in self.annotations.iter().enumerate() {
            let _ = writeln!(
                s,
                "<text class=\"annotation\" x=\"{}\" y=\"{}\" font-size=\"{}\">{a}</text>",
                num(-ext * 0.97),
                num(-ext * 0.92 + i as f64 * ext * 0.06),
                num(ext * 0.04)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn budget_error(needed: String, budget: usize) -> Error {
    Error::BudgetExceeded { needed, budget }
}

fn prime_box(spec: &SceneSpec) -> Result<BoxSpec> {
    BoxSpec::new(spec.q, spec.n)
}

fn embed(x: &CyclotomicInt) -> (f64, f64) {
    x.embed_complex()
}

/// Box points split into (non-vertex, vertex) embeddings.
fn box_cloud(spec: &SceneSpec, b: &BoxSpec, canvas: &mut Canvas) -> Result<()> {
    let pts: Vec<CyclotomicInt> = match b.point_count() {
        Some(c) if c <= spec.budget as u64 => (0..c).map(|i| b.point(i)).collect(),
        _ if spec.allow_sampling => {
            canvas.annotations.push(format!("sampled {} of {} points", spec.budget, b.cardinality()));
            (0..spec.budget as u64)
                .map(|i| sample_box_point(b, &mut sample_stream(spec.seed, i)))
                .collect()
        }
        _ => return Err(budget_error(b.cardinality().to_string(), spec.budget)),
    };
    let (verts, rest): (Vec<_>, Vec<_>) = pts.iter().partition(|x| x.is_vertex(b));
    canvas.group("points", "#8a8a8a", rest.into_iter().map(embed).collect());
    canvas.group("vertices", "#b03a2e", verts.into_iter().map(embed).collect());
    Ok(())
}

/// All sign vectors of 𝒱(q,N) embedded, or a seeded sample of them.
fn vertex_cloud(spec: &SceneSpec, canvas: &mut Canvas) -> Result<()> {
    let dim = (spec.q - 1) as u32;
    let total = 1u128 << dim.min(127);
    let signs_of = |m: u64| -> Vec<i8> { (0..dim).map(|j| if j < 64 && (m >> j) & 1 == 1 { 1 } else { -1 }).collect() };
    let pts: Vec<(f64, f64)> = if dim < 64 && total <= spec.budget as u128 {
        (0..total as u64).map(|m| poles::embed_signs(spec.q, spec.n, &signs_of(m))).collect()
    } else if spec.allow_sampling {
        canvas.annotations.push(format!("sampled {} of 2^{} vertices", spec.budget, dim));
        (0..spec.budget as u64)
            .map(|i| {
                let mut rng = sample_stream(spec.seed, i);
                let signs: Vec<i8> =
                    (0..dim).map(|_| if rand::RngCore::next_u32(&mut rng) & 1 == 1 { 1 } else { -1 }).collect();
                poles::embed_signs(spec.q, spec.n, &signs)
            })
            .collect()
    } else {
        return Err(budget_error(format!("2^{dim}"), spec.budget));
    };
    canvas.group("vertices", "#b03a2e", pts);
    Ok(())
}

fn check_polytope_budget(spec: &SceneSpec) -> Result<()> {
    if spec.k < 2 {
        return Err(Error::InvalidParameter(format!("K = {}: need K >= 2", spec.k)));
    }
    let needed = spec.count.saturating_mul(spec.k + 1);
    if needed > spec.budget as u64 {
        return Err(budget_error(needed.to_string(), spec.budget));
    }
    Ok(())
}

fn push_clique(canvas: &mut Canvas, pts: &[(f64, f64)]) {
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            canvas.edges.push((*a, *b));
        }
    }
}

pub fn render_scene(spec: &SceneSpec) -> Result<String> {
    let mut canvas = Canvas::default();
    let title = match spec.kind {
        SceneKind::BoxPoints => {
            let b = prime_box(spec)?;
            box_cloud(spec, &b, &mut canvas)?;
            format!("box points of B({},{})", spec.q, spec.n)
        }
        SceneKind::PolesCircle => {
            if spec.q < 3 {
                return Err(Error::ModulusTooSmall(spec.q));
            }
            vertex_cloud(spec, &mut canvas)?;
            let q = spec.q;
            let pole = |c: Vec<BigInt>| poles::embed_coeffs(q, &c);
            canvas.poles = vec![
                ("NP", pole(poles::north_pole(q, spec.n))),
                ("EP", pole(poles::east_pole(q, spec.n))),
                ("SP", pole(poles::south_pole(q, spec.n))),
                ("WP", pole(poles::west_pole(q, spec.n))),
            ];
            canvas.circle = Some(encircling_radius(q, spec.n)?);
            format!("vertices and poles for q={q}, N={}", spec.n)
        }
        SceneKind::RandomPolytopes | SceneKind::Pyramids => {
            let b = prime_box(spec)?;
            check_polytope_budget(spec)?;
            vertex_cloud(spec, &mut canvas)?;
            let mut apexes = vec![];
            for i in 0..spec.count {
                let mut rng = sample_stream(spec.seed, i);
                let base: Vec<_> = (0..spec.k).map(|_| embed(&sample_vertex(&b, &mut rng))).collect();
                push_clique(&mut canvas, &base);
                if spec.kind == SceneKind::Pyramids {
                    let apex = embed(&sample_box_point(&b, &mut rng));
                    for v in &base {
                        canvas.edges.push((apex, *v));
                    }
                    apexes.push(apex);
                }
            }
            if spec.kind == SceneKind::Pyramids {
                canvas.group("apexes", "#1e8449", apexes);
                format!("{} pyramids with {}-vertex bases in B({},{})", spec.count, spec.k, spec.q, spec.n)
            } else {
                format!("{} random {}-polytopes on V({},{})", spec.count, spec.k, spec.q, spec.n)
            }
        }
    };
    Ok(canvas.finish(&title))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circles(svg: &str, class: &str) -> Vec<(String, String)> {
        let start = svg.find(&format!("<g class=\"{class}\"")).expect("group present");
        let body = &svg[start..svg[start..].find("</g>").unwrap() + start];
        body.lines()
            .filter(|l| l.starts_with("<circle"))
            .map(|l| {
                let attr = |name: &str| {
                    let i = l.find(&format!("{name}=\"")).unwrap() + name.len() + 2;
                    l[i..i + l[i..].find('"').unwrap()].to_string()
                };
                (attr("cx"), attr("cy"))
            })
            .collect()
    }

    fn neg(s: &str) -> String {
        if s == "0.000000" {
            s.into()
        } else if let Some(t) = s.strip_prefix('-') {
            t.into()
        } else {
            format!("-{s}")
        }
    }

    #[test]
    fn box_points_full_and_symmetric() {
        let svg = render_scene(&SceneSpec::new(SceneKind::BoxPoints, 5, 1)).unwrap();
        let mut pts = circles(&svg, "points");
        let verts = circles(&svg, "vertices");
        assert_eq!(verts.len(), 16);
        pts.extend(verts);
        assert_eq!(pts.len(), 81);
        let mut sorted = pts.clone();
        sorted.sort();
        let mut negated: Vec<_> = pts.iter().map(|(x, y)| (neg(x), neg(y))).collect();
        negated.sort();
        assert_eq!(sorted, negated);
        assert!(!svg.contains("sampled"));
    }

    #[test]
    fn budget_guard_and_sampling() {
        let mut spec = SceneSpec::new(SceneKind::BoxPoints, 11, 3);
        spec.budget = 500;
        assert!(render_scene(&spec).unwrap_err().is_guard());
        spec.allow_sampling = true;
        let svg = render_scene(&spec).unwrap();
        assert!(svg.contains("sampled 500 of"));
        let n = circles(&svg, "points").len() + circles(&svg, "vertices").len();
        assert_eq!(n, 500);
    }

    #[test]
    fn north_pole_on_imaginary_axis() {
        let svg = render_scene(&SceneSpec::new(SceneKind::PolesCircle, 13, 1)).unwrap();
        let line = svg.lines().find(|l| l.contains("id=\"NP\"")).unwrap();
        assert!(line.contains("cx=\"0.000000\""));
        assert!(line.contains("cy=\"-"));
        assert!(svg.contains("class=\"encircling\""));
    }

    #[test]
    fn radius_matches_diameter_for_odd_q() {
        for q in [3u64, 5, 7, 9, 13, 15, 21, 101] {
            let half = poles::euclidean_diameter(q, 2).unwrap() / 2.0;
            assert!((max_vertex_modulus(q, 2) - half).abs() < 1e-9 * half, "q = {q}");
        }
        assert!((encircling_radius(4, 1).unwrap() - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn even_radius_matches_brute_force() {
        for q in [4u64, 6, 8, 14, 16] {
            let dim = (q - 1) as u32;
            let brute = (0u64..1 << dim)
                .map(|m| {
                    let s: Vec<i8> = (0..dim).map(|j| if (m >> j) & 1 == 1 { 1 } else { -1 }).collect();
                    let (re, im) = poles::embed_signs(q, 1, &s);
                    re.hypot(im)
                })
                .fold(0.0, f64::max);
            assert!((encircling_radius(q, 1).unwrap() - brute).abs() < 1e-9, "q = {q}");
        }
    }

    #[test]
    fn polytopes_deterministic() {
        let mut spec = SceneSpec::new(SceneKind::RandomPolytopes, 7, 2);
        spec.seed = 42;
        let a = render_scene(&spec).unwrap();
        assert_eq!(a, render_scene(&spec).unwrap());
        assert_eq!(a.matches("<line").count(), 26 * 3);
        spec.seed = 43;
        assert_ne!(a, render_scene(&spec).unwrap());
    }

    #[test]
    fn pyramids_have_apexes() {
        let svg = render_scene(&SceneSpec::new(SceneKind::Pyramids, 7, 2)).unwrap();
        assert_eq!(circles(&svg, "apexes").len(), 10);
        assert_eq!(svg.matches("<line").count(), 10 * 6);
    }

    #[test]
    fn kind_parse() {
        assert_eq!("poles_circle".parse::<SceneKind>().unwrap(), SceneKind::PolesCircle);
        assert!("scatter".parse::<SceneKind>().is_err());
    }
}
