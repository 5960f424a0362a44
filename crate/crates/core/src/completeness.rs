//! Support functions of convex bodies and the enclosure geometry that decides
//! completeness of exponential systems.

use std::f64::consts::{PI, TAU};

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::direction::DirectionFunction;
use crate::error::{Error, Result};
use crate::indicators::trig_convexity_check;

/// Body description accepted from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BodySpec {
    Polygon { vertices: Vec<[f64; 2]> },
    Disc {
        disc: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    Segment { segment: [[f64; 2]; 2] },
}

impl BodySpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("body: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Points(Vec<Complex64>),
    Disc { center: Complex64, r: f64 },
    Sampled(DirectionFunction),
    Sum(Vec<(f64, Shape)>),
    Hull(Vec<Shape>),
}

impl Shape {
    fn support(&self, phi: f64) -> f64 {
        let e = Complex64::from_polar(1.0, phi);
        match self {
            Shape::Points(p) => p.iter().map(|z| (z * e).re).fold(f64::NEG_INFINITY, f64::max),
            Shape::Disc { center, r } => r + (center * e).re,
            Shape::Sampled(h) => h.interp(phi),
            Shape::Sum(parts) => parts.iter().map(|(c, s)| c * s.support(phi)).sum(),
            Shape::Hull(parts) => parts.iter().map(|s| s.support(phi)).fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// `h_G(φ) = max { Re(z e^{iφ}) : z ∈ G }` sampled on a grid, together with
/// an exact evaluator when the body came from a polygon or primitive.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportBody {
    h: DirectionFunction,
    shape: Shape,
    pub label: String,
}

impl SupportBody {
    fn from_shape(shape: Shape, n: usize, label: String) -> Result<Self> {
        let h = DirectionFunction::from_fn(1.0, n, |p| shape.support(p))?;
        Ok(SupportBody { h, shape, label })
    }

    /// Wraps sampled values. They must be 1-trigonometrically convex with
    /// nonnegative width.
    pub fn from_direction_function(h: &DirectionFunction, label: &str) -> Result<Self> {
        let h = h.with_rho(1.0)?;
        if h.has_neg_inf() {
            return Err(Error::InvalidInput("support function must be finite".into()));
        }
        let rep = trig_convexity_check(&h, Some(1e-9 * h.scale()))?;
        if !rep.pass {
            return Err(Error::InvalidInput(format!("{label}: not trigonometrically convex ({:.3e})", rep.min_value)));
        }
        let n = h.len() as isize;
        if (0..n / 2).any(|i| h.at(i) + h.at(i + n / 2) < -1e-9 * h.scale()) {
            return Err(Error::InvalidInput(format!("{label}: negative width")));
        }
        Ok(SupportBody { shape: Shape::Sampled(h.clone()), h, label: label.into() })
    }

    pub fn h(&self) -> &DirectionFunction {
        &self.h
    }

    /// Support value at any direction: exact for polygons and primitives,
    /// linear interpolation for sampled bodies.
    pub fn eval(&self, phi: f64) -> f64 {
        self.shape.support(phi)
    }

    /// Support of `c·self + (1-c)·other`.
    pub fn mix(&self, other: &SupportBody, c: f64) -> Result<Self> {
        if self.h.len() != other.h.len() {
            return Err(Error::InvalidInput("bodies on different grids".into()));
        }
        let shape = Shape::Sum(vec![(c, self.shape.clone()), (1.0 - c, other.shape.clone())]);
        Self::from_shape(shape, self.h.len(), format!("{c}*{}+{}*{}", self.label, 1.0 - c, other.label))
    }

    /// Support of the convex hull of both bodies, `max(h, h_other)`.
    pub fn hull(&self, other: &SupportBody) -> Result<Self> {
        if self.h.len() != other.h.len() {
            return Err(Error::InvalidInput("bodies on different grids".into()));
        }
        let shape = Shape::Hull(vec![self.shape.clone(), other.shape.clone()]);
        Self::from_shape(shape, self.h.len(), format!("hull({}, {})", self.label, other.label))
    }

    pub fn translate(&self, c: Complex64) -> Result<Self> {
        let shape = Shape::Sum(vec![(1.0, self.shape.clone()), (1.0, Shape::Points(vec![c]))]);
        Self::from_shape(shape, self.h.len(), self.label.clone())
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidInput("scale factor must be positive".into()));
        }
        Self::from_shape(Shape::Sum(vec![(lambda, self.shape.clone())]), self.h.len(), self.label.clone())
    }
}

/// Support function of a body on an `n`-point grid.
pub fn support_function(body: &BodySpec, n: usize) -> Result<SupportBody> {
    let pt = |p: &[f64; 2]| Complex64::new(p[0], p[1]);
    let (shape, label) = match body {
        BodySpec::Polygon { vertices } => {
            if vertices.is_empty() {
                return Err(Error::InvalidInput("polygon without vertices".into()));
            }
            (Shape::Points(vertices.iter().map(pt).collect()), "polygon")
        }
        BodySpec::Disc { disc, center } => {
            if !(*disc >= 0.0) {
                return Err(Error::InvalidInput(format!("disc radius {disc}")));
            }
            (Shape::Disc { center: pt(center), r: *disc }, "disc")
        }
        BodySpec::Segment { segment } => (Shape::Points(segment.iter().map(pt).collect()), "segment"),
    };
    if let Shape::Points(p) = &shape {
        if p.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite vertex".into()));
        }
    }
    SupportBody::from_shape(shape, n, label.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnclosureKind {
    NotEnclosed,
    Free,
    Sliding,
    Rigid,
}

impl EnclosureKind {
    pub fn is_enclosed(self) -> bool {
        self != EnclosureKind::NotEnclosed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnclosureStatus {
    pub kind: EnclosureKind,
    /// Optimal translation `c`; the translated body has support `h₁ + Re(c e^{iφ})`.
    pub translation: [f64; 2],
    /// `-v*`: positive when the body fits with room to spare.
    pub margin: f64,
    /// Largest width of the near-optimal translation set.
    pub slack_width: f64,
    pub tol: f64,
}

/// `F(φ) = h₁(φ) + Re(c e^{iφ}) - h_G(φ)`.
struct Gap<'a> {
    h1: &'a SupportBody,
    hg: &'a SupportBody,
}

impl Gap<'_> {
    fn at(&self, phi: f64, c: Complex64) -> f64 {
        self.h1.eval(phi) + (c * Complex64::from_polar(1.0, phi)).re - self.hg.eval(phi)
    }

    /// Continuous maximum over φ: dense samples, then golden-section search
    /// around the best local maxima.
    fn max(&self, c: Complex64) -> (f64, f64) {
        const N: usize = 2048;
        let d = TAU / N as f64;
        let vals: Vec<f64> = (0..N).map(|i| self.at(d * i as f64, c)).collect();
        let mut peaks: Vec<usize> = (0..N)
            .filter(|&i| vals[i] >= vals[(i + N - 1) % N] && vals[i] >= vals[(i + 1) % N])
            .collect();
        peaks.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
        let mut best = (f64::NEG_INFINITY, 0.0);
        for &i in peaks.iter().take(8) {
            let (mut lo, mut hi) = (d * (i as f64 - 1.0), d * (i as f64 + 1.0));
            let g = 0.5 * (5f64.sqrt() - 1.0);
            let mut x1 = hi - g * (hi - lo);
            let mut x2 = lo + g * (hi - lo);
            let (mut f1, mut f2) = (self.at(x1, c), self.at(x2, c));
            for _ in 0..80 {
                if f1 < f2 {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + g * (hi - lo);
                    f2 = self.at(x2, c);
                } else {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - g * (hi - lo);
                    f1 = self.at(x1, c);
                }
            }
            for (f, x) in [(f1, x1), (f2, x2), (vals[i], d * i as f64)] {
                if f > best.0 {
                    best = (f, x.rem_euclid(TAU));
                }
            }
        }
        best
    }
}

const CUT_ITERS: usize = 300;

/// Cutting-plane LP over translations `c = a + ib`. With `bound = None`
/// minimizes `t` subject to `F(φ; c) ≤ t`; with `bound = Some((v, d))`
/// maximizes `Re(c · conj d)` subject to `F(φ; c) ≤ v`.
fn cutting_plane(gap: &Gap, cuts: &mut Vec<f64>, bound: Option<(f64, Complex64)>, box_size: f64, eps: f64) -> Result<(Complex64, f64)> {
    for _ in 0..CUT_ITERS {
        let dir = if bound.is_some() { OptimizationDirection::Maximize } else { OptimizationDirection::Minimize };
        let mut lp = Problem::new(dir);
        let (ca, cb, ct) = match bound {
            None => (0.0, 0.0, 1.0),
            Some((_, d)) => (d.re, d.im, 0.0),
        };
        let a = lp.add_var(ca, (-box_size, box_size));
        let b = lp.add_var(cb, (-box_size, box_size));
        let t = lp.add_var(ct, (f64::NEG_INFINITY, f64::INFINITY));
        for &phi in cuts.iter() {
            let rhs = gap.hg.eval(phi) - gap.h1.eval(phi);
            let (cos, sin) = (phi.cos(), phi.sin());
            match bound {
                None => lp.add_constraint(&[(a, cos), (b, -sin), (t, -1.0)], ComparisonOp::Le, rhs),
                Some((v, _)) => lp.add_constraint(&[(a, cos), (b, -sin)], ComparisonOp::Le, rhs + v),
            }
        }
        let sol = lp.solve().map_err(|e| Error::Numerical(format!("enclosure LP: {e}")))?;
        let c = Complex64::new(sol[a], sol[b]);
        let level = match bound {
            None => sol[t],
            Some((v, _)) => v,
        };
        let (m, at) = gap.max(c);
        if m <= level + eps || cuts.iter().any(|p| (p - at).abs() < 1e-12) {
            return Ok((c, m));
        }
        cuts.push(at);
    }
    Err(Error::NoConvergence { what: "enclosure translation".into(), residual: f64::NAN })
}

/// Relative width above which the near-optimal translation set counts as a
/// sliding segment rather than a point.
const SLIDE_WIDTH: f64 = 100.0;

/// Classifies how `h1` fits inside `hg` under translation.
///
/// Solves `v* = min_c max_φ [h₁ + Re(c e^{iφ}) - h_G]` exactly for the
/// continuous problem. `v* > tol`: not enclosed; `v* < -tol`: free; else
/// the set `{c : max F ≤ v* + tol}` is measured in 16 directions and is a
/// sliding segment when wider than `100·tol`.
pub fn enclosure_classify(h1: &SupportBody, hg: &SupportBody) -> Result<EnclosureStatus> {
    let scale = hg.h.scale().max(h1.h.scale());
    let tol = 1e-6 * hg.h.scale();
    // The simplex solver works to about 1e-10 relative.
    let eps = 1e-8 * scale;
    let gap = Gap { h1, hg };
    let n = hg.h.len().max(64);
    let mut cuts: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
    let box_size = 10.0 * scale + 10.0;
    let (c, v) = cutting_plane(&gap, &mut cuts, None, box_size, eps)?;
    let mut status = EnclosureStatus {
        kind: EnclosureKind::Rigid,
        translation: [c.re, c.im],
        margin: -v,
        slack_width: 0.0,
        tol,
    };
    if v > tol {
        status.kind = EnclosureKind::NotEnclosed;
        return Ok(status);
    }
    if v < -tol {
        status.kind = EnclosureKind::Free;
        return Ok(status);
    }
    let mut extent = [0.0; 16];
    for (k, e) in extent.iter_mut().enumerate() {
        let d = Complex64::from_polar(1.0, TAU * k as f64 / 16.0);
        let (ck, _) = cutting_plane(&gap, &mut cuts, Some((v + tol, d)), box_size, eps)?;
        *e = (ck * d.conj()).re;
    }
    status.slack_width = (0..8).map(|k| extent[k] + extent[k + 8]).fold(0.0, f64::max);
    status.kind = if status.slack_width > SLIDE_WIDTH * tol { EnclosureKind::Sliding } else { EnclosureKind::Rigid };
    Ok(status)
}

/// Zero set with a regular indicator, or an indicator limit set spanned by
/// two support functions.
#[derive(Debug, Clone, Copy)]
pub enum VerdictInput<'a> {
    Regular(&'a SupportBody),
    Indicator(&'a SupportBody, &'a SupportBody),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixStatus {
    pub c: f64,
    pub status: EnclosureStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub complete: bool,
    pub maximal: bool,
    pub extremely_overcomplete: bool,
    pub statuses: Vec<(String, EnclosureStatus)>,
    pub mixes: Vec<MixStatus>,
}

/// `c ∈ {0, 0.1, …, 1}`.
pub fn default_c_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

pub fn completeness_verdict(input: VerdictInput, g: &SupportBody, c_grid: &[f64]) -> Result<Verdict> {
    match input {
        VerdictInput::Regular(h) => {
            let s = enclosure_classify(h, g)?;
            let kind = s.kind;
            Ok(Verdict {
                complete: kind != EnclosureKind::Free,
                maximal: matches!(kind, EnclosureKind::Sliding | EnclosureKind::Rigid),
                extremely_overcomplete: kind == EnclosureKind::Rigid,
                statuses: vec![(h.label.clone(), s)],
                mixes: Vec::new(),
            })
        }
        VerdictInput::Indicator(h1, h2) => {
            if c_grid.len() < 11 || c_grid.iter().any(|c| !(0.0..=1.0).contains(c)) {
                return Err(Error::InvalidInput("mix grid needs at least 11 points in [0, 1]".into()));
            }
            let s1 = enclosure_classify(h1, g)?;
            let s2 = enclosure_classify(h2, g)?;
            let mut mixes = Vec::with_capacity(c_grid.len());
            for &c in c_grid {
                let status = enclosure_classify(&h1.mix(h2, c)?, g)?;
                mixes.push(MixStatus { c, status });
            }
            let (k1, k2) = (s1.kind, s2.kind);
            Ok(Verdict {
                complete: !(k1 == EnclosureKind::Free && k2 == EnclosureKind::Free),
                maximal: k1.is_enclosed() && k2.is_enclosed() && (k1 != EnclosureKind::Free || k2 != EnclosureKind::Free),
                extremely_overcomplete: mixes.iter().all(|m| m.status.kind == EnclosureKind::Rigid),
                statuses: vec![(h1.label.clone(), s1), (h2.label.clone(), s2)],
                mixes,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OvercompletenessReport {
    pub extremely_overcomplete: bool,
    /// Length of the longest arc where `|h₁ - h₂| > 0`.
    pub d: f64,
    /// Grid indices of the zeros bounding that arc.
    pub interval: Option<(usize, usize)>,
    /// Decided only when `d` is within one grid step of π.
    pub tangency: Option<bool>,
}

/// Extremal overcompleteness for an indicator set whose hull is `G`.
///
/// `g = |h₁ - h₂|` is positive where it exceeds `1e-9·scale`. With `d` the
/// longest positive arc: `d < π` gives true, `d > π` false, and `d ≈ π`
/// (one grid step) defers to the boundary ratio `g(φ)/dist(φ, ∂I)`. Its
/// liminf is estimated from the two nearest grid points (their minimum and
/// their linear extrapolation to the endpoint) and compared against
/// `0.05 · max g / (d/2)`.
pub fn overcompleteness_test(h1: &SupportBody, h2: &SupportBody) -> Result<OvercompletenessReport> {
    let (a, b) = (h1.h.values(), h2.h.values());
    if a.len() != b.len() {
        return Err(Error::InvalidInput("bodies on different grids".into()));
    }
    let n = a.len();
    let step = TAU / n as f64;
    let g: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect();
    let thr = 1e-9 * h1.h.scale().max(h2.h.scale());
    let Some(z0) = (0..n).find(|&i| g[i] <= thr) else {
        return Ok(OvercompletenessReport { extremely_overcomplete: false, d: TAU, interval: None, tangency: None });
    };
    // Longest run of positive values, walking once around from a zero.
    let (mut best, mut best_start, mut run, mut start) = (0usize, z0, 0usize, z0);
    for k in 1..=n {
        let i = (z0 + k) % n;
        if g[i] > thr {
            if run == 0 {
                start = (i + n - 1) % n;
            }
            run += 1;
            if run > best {
                best = run;
                best_start = start;
            }
        } else {
            run = 0;
        }
    }
    if best == 0 {
        return Ok(OvercompletenessReport { extremely_overcomplete: true, d: 0.0, interval: None, tangency: None });
    }
    let d = (best + 1) as f64 * step;
    let interval = Some((best_start, (best_start + best + 1) % n));
    if PI - d > step + 1e-12 {
        return Ok(OvercompletenessReport { extremely_overcomplete: true, d, interval, tangency: None });
    }
    if d > PI + step + 1e-12 {
        return Ok(OvercompletenessReport { extremely_overcomplete: false, d, interval, tangency: None });
    }
    let peak = (1..=best).map(|k| g[(best_start + k) % n]).fold(0.0, f64::max);
    let secant = peak / (0.5 * d);
    let ratio = |k: usize, from_left: bool| -> f64 {
        let i = if from_left { (best_start + k) % n } else { (best_start + best + 1 + n - k) % n };
        g[i] / (k as f64 * step)
    };
    let boundary = |from_left: bool| -> f64 {
        let r1 = ratio(1, from_left);
        if best < 2 {
            return r1;
        }
        let r2 = ratio(2, from_left);
        r1.min(r2).min((2.0 * r1 - r2).max(0.0))
    };
    let tangency = boundary(true).min(boundary(false)) < 0.05 * secant;
    Ok(OvercompletenessReport { extremely_overcomplete: tangency, d, interval, tangency: Some(tangency) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpiralValue {
    pub period: f64,
    pub rho_min: f64,
    /// `tan α = 2π/P`.
    pub alpha: f64,
    /// `max |R'' - 2ρ sin α R' + ρ² R| / max |R|` on a 4097-point grid.
    pub residual: f64,
    /// `max(|R(0)|, |R(2π cos α)|) / max |R|`.
    pub boundary: f64,
}

/// Smallest order of a positive solution vanishing on the spiral of period
/// `P`, with the eigenfunction `R(η) = e^{(ρ sin α)η} sin((ρ cos α)η)`
/// checked against its ODE.
pub fn spiral_spectral_value(period: f64) -> Result<SpiralValue> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidInput(format!("period must be positive, got {period}")));
    }
    let q = TAU / period;
    let rho = 0.5 * (1.0 + q * q);
    let alpha = q.atan();
    let (a, b) = (rho * alpha.sin(), rho * alpha.cos());
    let end = TAU * alpha.cos();
    let r = |x: f64| (a * x).exp() * (b * x).sin();
    let r1 = |x: f64| (a * x).exp() * (a * (b * x).sin() + b * (b * x).cos());
    let r2 = |x: f64| (a * x).exp() * ((a * a - b * b) * (b * x).sin() + 2.0 * a * b * (b * x).cos());
    let m = 4096;
    let mut scale = 0.0f64;
    let mut res = 0.0f64;
    for i in 0..=m {
        let x = end * i as f64 / m as f64;
        scale = scale.max(r(x).abs());
        res = res.max((r2(x) - 2.0 * a * r1(x) + rho * rho * r(x)).abs());
    }
    let boundary = r(0.0).abs().max(r(end).abs());
    Ok(SpiralValue { period, rho_min: rho, alpha, residual: res / scale, boundary: boundary / scale })
}
