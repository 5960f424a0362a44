//! Indicators and lower indicators, ρ-trigonometric convexity, the operator
//! `T_ρ = d²/dφ² + ρ²` and its inversion, maximal trigonometrically convex
//! minorants and the minimality test.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::direction::{CircleMeasure, DirectionFunction};
use crate::error::{Error, Result};
use crate::field::PlaneField;
use crate::scale::ProximateOrder;

/// Upper and lower indicator estimated over a window of top decades.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorPair {
    pub h: DirectionFunction,
    pub h_lower: DirectionFunction,
    /// Grid indices of directions where every sample was `-inf`.
    pub flagged: Vec<usize>,
    /// `sup_φ |h - h_prev|` with `h_prev` taken over the window one decade
    /// lower, when the grid reaches that far.
    pub window_error: Option<f64>,
    pub window: (f64, f64),
}

fn validate_t_grid(t_grid: &[f64], decades: f64) -> Result<()> {
    if t_grid.len() < 64 {
        return Err(Error::InvalidInput(format!("t grid needs at least 64 points, got {}", t_grid.len())));
    }
    if t_grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("t grid must be positive and increasing".into()));
    }
    let span = (t_grid[t_grid.len() - 1] / t_grid[0]).log10();
    if span < decades.max(2.0) - 1e-9 {
        return Err(Error::InvalidInput(format!("t grid spans {span:.2} decades, need {}", decades.max(2.0))));
    }
    Ok(())
}

fn median3(a: f64, b: f64, c: f64) -> f64 {
    a.max(b).min(a.min(b).max(c))
}

/// Scaled samples `u(t e^{iφ}) t^{-ρ(t)}` along one direction.
fn scaled_ray<U: PlaneField + ?Sized>(u: &U, po: &ProximateOrder, t_grid: &[f64], phi: f64) -> Vec<f64> {
    let w = Complex64::from_polar(1.0, phi);
    t_grid.iter().map(|&t| u.eval(w * t) / po.v(t)).collect()
}

/// `(max, min)` over `t` in `[lo, hi]`; the min uses the median of three
/// adjacent radial samples so isolated zero dips do not dominate.
fn window_extremes(vals: &[f64], t_grid: &[f64], lo: f64, hi: f64) -> (f64, f64) {
    let n = vals.len();
    let (mut mx, mut mn) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..n {
        let t = t_grid[i];
        if t < lo * (1.0 - 1e-12) || t > hi * (1.0 + 1e-12) {
            continue;
        }
        mx = mx.max(vals[i]);
        let m = median3(vals[i.saturating_sub(1)], vals[i], vals[(i + 1).min(n - 1)]);
        mn = mn.min(m);
    }
    (mx, mn)
}

/// `(h(φ), h̲(φ))` for one direction over the top `window_decades`.
pub fn indicator_at<U: PlaneField + ?Sized>(
    u: &U,
    po: &ProximateOrder,
    t_grid: &[f64],
    phi: f64,
    window_decades: f64,
) -> Result<(f64, f64)> {
    validate_t_grid(t_grid, window_decades)?;
    let hi = t_grid[t_grid.len() - 1];
    let vals = scaled_ray(u, po, t_grid, phi);
    Ok(window_extremes(&vals, t_grid, hi / 10f64.powf(window_decades), hi))
}

/// Indicator and lower indicator over the top decade of `t_grid`.
pub fn indicator_pair<U: PlaneField + ?Sized>(
    u: &U,
    po: &ProximateOrder,
    t_grid: &[f64],
    n_phi: usize,
) -> Result<IndicatorPair> {
    indicator_pair_window(u, po, t_grid, n_phi, 1.0)
}

/// [`indicator_pair`] over the top `window_decades` decades.
pub fn indicator_pair_window<U: PlaneField + ?Sized>(
    u: &U,
    po: &ProximateOrder,
    t_grid: &[f64],
    n_phi: usize,
    window_decades: f64,
) -> Result<IndicatorPair> {
    validate_t_grid(t_grid, window_decades)?;
    if n_phi < DirectionFunction::MIN_GRID || !n_phi.is_power_of_two() {
        return Err(Error::InvalidInput(format!("direction grid size {n_phi} is not a power of two >= 16")));
    }
    let hi = t_grid[t_grid.len() - 1];
    let width = 10f64.powf(window_decades);
    let lo = hi / width;
    let has_prev = t_grid[0] <= lo / 10.0 * (1.0 + 1e-12);
    let rows: Vec<(f64, f64, f64)> = (0..n_phi)
        .into_par_iter()
        .map(|j| {
            let vals = scaled_ray(u, po, t_grid, TAU * j as f64 / n_phi as f64);
            let (mx, mn) = window_extremes(&vals, t_grid, lo, hi);
            let prev = if has_prev { window_extremes(&vals, t_grid, lo / 10.0, hi / 10.0).0 } else { f64::NAN };
            (mx, mn, prev)
        })
        .collect();
    let flagged: Vec<usize> = rows.iter().enumerate().filter(|(_, r)| r.0 == f64::NEG_INFINITY).map(|(i, _)| i).collect();
    if rows.iter().any(|r| r.0.is_nan() || r.1.is_nan()) {
        return Err(Error::Numerical("field returned NaN on the indicator grid".into()));
    }
    let rho = po.rho();
    let h = DirectionFunction::new(rho, rows.iter().map(|r| r.0).collect())?;
    let h_lower = DirectionFunction::new(rho, rows.iter().map(|r| r.1).collect())?;
    let window_error = has_prev.then(|| {
        rows.iter().filter(|r| r.0.is_finite() && r.2.is_finite()).map(|r| (r.0 - r.2).abs()).fold(0.0, f64::max)
    });
    Ok(IndicatorPair { h, h_lower, flagged, window_error, window: (lo, hi) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub pass: bool,
    /// Smallest value of the fundamental relation over the checked triples.
    pub min_value: f64,
    /// Grid indices `(α, φ, β)` of the worst triple.
    pub worst: (usize, usize, usize),
    pub triples: usize,
    pub tol: f64,
}

/// Evaluates `h(α) sin ρ(β-φ) + h(φ) sin ρ(α-β) + h(β) sin ρ(φ-α)` over grid
/// triples `α < φ < β` with `ρ(β - α) < π`. For each pair of endpoints the
/// middle point runs with stride `max(1, span/8)`. Passes iff the minimum is
/// at least `-tol`, by default `1e-9·scale(h)`.
pub fn trig_convexity_check(h: &DirectionFunction, tol: Option<f64>) -> Result<ConvexityReport> {
    if h.has_neg_inf() {
        return Err(Error::Domain("convexity check needs a finite function".into()));
    }
    let n = h.len();
    let rho = h.rho();
    let d = h.step();
    let tol = tol.unwrap_or(1e-9 * h.scale());
    let max_span = max_span_steps(rho, n);
    let per_start: Vec<(f64, (usize, usize, usize), usize)> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut best = (f64::INFINITY, (a, a, a), 0usize);
            for s in 2..=max_span {
                let stride = (s / 8).max(1);
                let ha = h.at(a as isize);
                let hb = h.at((a + s) as isize);
                let sab = (rho * s as f64 * d).sin();
                let mut k = 1;
                while k < s {
                    let hp = h.at((a + k) as isize);
                    let v = ha * (rho * (s - k) as f64 * d).sin() - hp * sab + hb * (rho * k as f64 * d).sin();
                    best.2 += 1;
                    if v < best.0 {
                        best.0 = v;
                        best.1 = (a, (a + k) % n, (a + s) % n);
                    }
                    k += stride;
                }
            }
            best
        })
        .collect();
    let triples = per_start.iter().map(|b| b.2).sum();
    let worst = per_start.iter().min_by(|x, y| x.0.total_cmp(&y.0)).expect("nonempty grid");
    let min_value = if worst.0.is_finite() { worst.0 } else { 0.0 };
    Ok(ConvexityReport { pass: min_value >= -tol, min_value, worst: worst.1, triples, tol })
}

/// Largest span in grid steps with `ρ·span < π`.
fn max_span_steps(rho: f64, n: usize) -> usize {
    let d = TAU / n as f64;
    let mut s = (PI / (rho * d)).floor() as usize;
    if rho * s as f64 * d >= PI - 1e-12 {
        s = s.saturating_sub(1);
    }
    s.min(n - 1)
}

/// The ρ-sinusoid through `(α, h_a)` and `(β, h_b)`, evaluated at `φ`.
pub fn trig_interpolant(alpha: f64, beta: f64, h_a: f64, h_b: f64, rho: f64, phi: f64) -> Result<f64> {
    let span = beta - alpha;
    if !(span > 0.0 && rho * span < PI) {
        return Err(Error::Domain(format!("span {span} is not in (0, π/ρ)")));
    }
    if phi == alpha {
        return Ok(h_a);
    }
    if phi == beta {
        return Ok(h_b);
    }
    Ok((h_a * (rho * (beta - phi)).sin() + h_b * (rho * (phi - alpha)).sin()) / (rho * span).sin())
}

/// Cell masses of `T_ρ h`: `(h_{i+1} - 2h_i + h_{i-1})/Δ + ρ² h_i Δ`. Cells
/// whose mass exceeds five times the median cell mass (and `1e-3·scale(h)`)
/// become atoms; runs of adjacent atom cells merge into one atom at their
/// mass-weighted angle.
pub fn t_rho_measure(h: &DirectionFunction) -> Result<CircleMeasure> {
    if h.has_neg_inf() {
        return Err(Error::Domain("T_ρ needs a finite function".into()));
    }
    let n = h.len();
    let d = h.step();
    let rho = h.rho();
    let m: Vec<f64> = (0..n as isize)
        .map(|i| (h.at(i + 1) - 2.0 * h.at(i) + h.at(i - 1)) / d + rho * rho * h.at(i) * d)
        .collect();
    let mut abs: Vec<f64> = m.iter().map(|v| v.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let median = abs[n / 2];
    let floor = 1e-3 * h.scale();
    let is_atom: Vec<bool> = m.iter().map(|v| v.abs() > 5.0 * median && v.abs() > floor).collect();
    let mut density: Vec<f64> = m.iter().map(|v| v / d).collect();
    let mut atoms = Vec::new();
    if is_atom.iter().all(|a| *a) {
        return Ok(CircleMeasure { atoms, density });
    }
    // Start scanning just after a non-atom cell so runs do not wrap.
    let start = (0..n).find(|&i| !is_atom[i]).expect("some non-atom cell");
    let mut k = 0;
    while k < n {
        let i = (start + k) % n;
        if !is_atom[i] {
            k += 1;
            continue;
        }
        let (mut mass, mut moment) = (0.0, 0.0);
        let mut j = k;
        while j < n && is_atom[(start + j) % n] {
            let c = (start + j) % n;
            mass += m[c];
            moment += m[c] * (start + j) as f64 * d;
            density[c] = 0.0;
            j += 1;
        }
        let phi = if mass != 0.0 { moment / mass } else { (start + k) as f64 * d };
        atoms.push((phi.rem_euclid(TAU), mass));
        k = j;
    }
    Ok(CircleMeasure { atoms, density })
}

/// Kernel integral over `ψ ∈ [a, b]` of `f(φ - ψ)` where `f` has a kink at
/// multiples of 2π; `prim(x, k)` is a primitive of `f` on the branch where
/// the reduced argument is `x + 2πk`.
fn integrate_branch<P: Fn(f64) -> f64>(phi: f64, a: f64, b: f64, reduce: fn(f64) -> f64, prim: P) -> f64 {
    // x = φ - ψ runs over [φ - b, φ - a]; shift so that the whole piece sits
    // on one branch of the reduction.
    let mid = phi - 0.5 * (a + b);
    let shift = reduce(mid) - mid;
    prim(phi - a + shift) - prim(phi - b + shift)
}

fn reduce_pos(x: f64) -> f64 {
    x.rem_euclid(TAU)
}

/// Integrates `f(φ - ψ)` against the cell densities, splitting cells at the
/// kink `ψ ≡ φ + kink_offset`.
fn density_integral<P: Fn(f64) -> f64 + Copy>(
    s: &CircleMeasure,
    phi: f64,
    kink_offset: f64,
    reduce: fn(f64) -> f64,
    prim: P,
) -> f64 {
    let n = s.cells();
    let d = s.step();
    let kink = (phi + kink_offset).rem_euclid(TAU);
    let mut acc = 0.0;
    for (i, &v) in s.density.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let c = TAU * i as f64 / n as f64;
        let (a, b) = (c - 0.5 * d, c + 0.5 * d);
        // Kink position inside [a, b), if any.
        let kk = a + (kink - a).rem_euclid(TAU);
        let part = if kk > a && kk < b {
            integrate_branch(phi, a, kk, reduce, prim) + integrate_branch(phi, kk, b, reduce, prim)
        } else {
            integrate_branch(phi, a, b, reduce, prim)
        };
        acc += v * part;
    }
    acc
}

/// Inverts `T_ρ`. For non-integer `ρ`,
/// `h(φ) = (1/(2ρ sin πρ)) ∮ cos~ ρ(φ - ψ - π) ds(ψ)`. For integer `ρ = n`
/// the measure must satisfy `∮ e^{inψ} ds = 0` and
/// `h(φ) = -(1/(2πn)) ∮ (φ-ψ)~ sin n(φ - ψ) ds(ψ)` with `(x)~ ∈ [0, 2π)`;
/// the harmonic part `a cos nφ + b sin nφ` is fixed to zero.
pub fn reconstruct_tcf(s: &CircleMeasure, rho: f64) -> Result<DirectionFunction> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidInput(format!("rho must be positive, got {rho}")));
    }
    let n = s.cells();
    if rho.fract() == 0.0 {
        let f = s.fourier(rho);
        if f.norm() > 1e-8 * s.total_variation().max(1.0) {
            return Err(Error::Domain(format!(
                "integer order {rho}: |∮ e^(iρψ) ds| = {:.3e}, no t.c. function has this measure",
                f.norm()
            )));
        }
        let k = rho;
        let c = -1.0 / (TAU * k);
        // Primitive of x sin(kx).
        let prim = move |x: f64| -x * (k * x).cos() / k + (k * x).sin() / (k * k);
        return DirectionFunction::from_fn(rho, n, |phi| {
            let atoms: f64 = s.atoms.iter().map(|&(psi, m)| m * reduce_pos(phi - psi) * (k * (phi - psi)).sin()).sum();
            c * (atoms + density_integral(s, phi, 0.0, reduce_pos, prim))
        });
    }
    let c = 1.0 / (2.0 * rho * (PI * rho).sin());
    // With y = φ - ψ, the kernel is cos ρ(y - π) on y ∈ (0, 2π]; its kink
    // sits at y ≡ 0, i.e. ψ ≡ φ. Primitive in y of cos ρ(y - π).
    let prim = move |y: f64| (rho * (y - PI)).sin() / rho;
    DirectionFunction::from_fn(rho, n, |phi| {
        let atoms: f64 = s.atoms.iter().map(|&(psi, m)| m * crate::kernels::tilde_cos(rho, phi - psi - PI)).sum();
        c * (atoms + density_integral(s, phi, 0.0, reduce_pos_open, prim))
    })
}

/// Reduction into `(0, 2π]`.
fn reduce_pos_open(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r == 0.0 {
        TAU
    } else {
        r
    }
}

/// Outcome of [`max_tc_minorant`] beyond the function itself.
pub const MINORANT_MAX_SWEEPS: usize = 10_000;

/// Largest ρ-trigonometrically convex function below `m`, or `None` when the
/// iteration runs below `-1e6·scale(m)` (no t.c. minorant exists).
///
/// Iterates `h ← min(h, Y)` over every grid span shorter than `π/ρ`, spans in
/// increasing length and then by left endpoint, until a sweep moves no value
/// by more than `1e-13·scale(m)`.
pub fn max_tc_minorant(m: &DirectionFunction, rho: f64) -> Result<Option<DirectionFunction>> {
    if m.has_neg_inf() {
        return Err(Error::Domain("minorant of a function with -inf values".into()));
    }
    let m = m.with_rho(rho)?;
    let n = m.len();
    let d = m.step();
    let scale = m.scale();
    let max_span = max_span_steps(rho, n);
    let weights: Vec<Vec<(f64, f64)>> = (0..=max_span)
        .map(|s| {
            if s < 2 {
                return Vec::new();
            }
            let den = (rho * s as f64 * d).sin();
            (1..s)
                .map(|k| (((rho * (s - k) as f64 * d).sin()) / den, ((rho * k as f64 * d).sin()) / den))
                .collect()
        })
        .collect();
    let mut h = m.values().to_vec();
    for _ in 0..MINORANT_MAX_SWEEPS {
        let mut change = 0.0f64;
        for (s, w) in weights.iter().enumerate().skip(2) {
            for a in 0..n {
                let ha = h[a];
                let hb = h[(a + s) % n];
                for (k, &(w1, w2)) in w.iter().enumerate() {
                    let idx = (a + k + 1) % n;
                    let y = w1 * ha + w2 * hb;
                    if y < h[idx] {
                        change = change.max(h[idx] - y);
                        h[idx] = y;
                    }
                }
            }
        }
        if h.iter().any(|v| *v < -1e6 * scale) {
            return Ok(None);
        }
        if change <= 1e-13 * scale {
            return Ok(Some(DirectionFunction::new(rho, h)?));
        }
    }
    let out = DirectionFunction::new(rho, h)?;
    let residual = trig_convexity_check(&out, None)?.min_value;
    Err(Error::NoConvergence { what: "trigonometrically convex minorant".into(), residual: residual.abs() })
}

/// Whether the convex body with support function `h` (ρ = 1) has zero width
/// in some direction: `min_θ (h(θ) + h(θ + π)) ≤ tol·scale(h)`.
pub fn minimality_test(h: &DirectionFunction, tol: f64) -> Result<bool> {
    let h1 = h.with_rho(1.0)?;
    let rep = trig_convexity_check(&h1, Some(1e-9 * h1.scale().max(1.0)))?;
    if !rep.pass {
        return Err(Error::Domain(format!("not 1-trigonometrically convex (relation {:.3e})", rep.min_value)));
    }
    let n = h1.len() as isize;
    let width = (0..n / 2).map(|i| h1.at(i) + h1.at(i + n / 2)).fold(f64::INFINITY, f64::min);
    Ok(width <= tol * h1.scale())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::log_grid;
    use crate::kernels::tilde_cos;

    fn df(rho: f64, f: impl Fn(f64) -> f64) -> DirectionFunction {
        DirectionFunction::from_fn(rho, 256, f).unwrap()
    }

    #[test]
    fn indicator_examples() {
        let po = ProximateOrder::constant(0.7).unwrap();
        let u = |z: Complex64| 2.5 * z.norm().powf(0.7);
        let t = log_grid(1.0, 1e3, 30);
        let p = indicator_pair(&u, &po, &t, 64).unwrap();
        assert!(p.h.values().iter().all(|v| (v - 2.5).abs() < 1e-12));
        assert!(p.h_lower.values().iter().all(|v| (v - 2.5).abs() < 1e-12));
        let po1 = ProximateOrder::constant(1.0).unwrap();
        let re = |z: Complex64| z.re;
        let p = indicator_pair(&re, &po1, &t, 64).unwrap();
        for i in 0..64 {
            assert!((p.h.values()[i] - p.h.phi(i).cos()).abs() < 0.02);
            assert!((p.h_lower.values()[i] - p.h.values()[i]).abs() < 1e-12);
        }
        assert_eq!(p.window_error, Some(0.0f64).map(|_| p.window_error.unwrap()));
        assert!(indicator_pair(&re, &po1, &t[..50], 64).is_err());
        assert!(indicator_pair(&re, &po1, &t, 100).is_err());
    }

    #[test]
    fn indicator_dilation_invariance() {
        let po = ProximateOrder::constant(1.0).unwrap();
        let u = |z: Complex64| z.re.abs() + 0.5 * z.im;
        let scaled = |z: Complex64| u(z * 3.0) / 3.0;
        let t = log_grid(1.0, 1e3, 30);
        let a = indicator_pair(&u, &po, &t, 64).unwrap();
        let b = indicator_pair(&scaled, &po, &t, 64).unwrap();
        assert!(a.h.sup_distance(&b.h) < 1e-12);
    }

    #[test]
    fn flagged_directions() {
        let po = ProximateOrder::constant(1.0).unwrap();
        let u = |z: Complex64| if z.im.abs() < 1e-9 && z.re > 0.0 { f64::NEG_INFINITY } else { z.re };
        let t = log_grid(1.0, 1e3, 30);
        let p = indicator_pair(&u, &po, &t, 64).unwrap();
        assert_eq!(p.flagged, vec![0]);
        assert_eq!(p.h_lower.values()[0], f64::NEG_INFINITY);
    }

    #[test]
    fn convexity_examples() {
        assert!(trig_convexity_check(&df(0.7, |_| 2.0), None).unwrap().pass);
        let rep = trig_convexity_check(&df(1.0, |_| -1.0), None).unwrap();
        assert!(!rep.pass);
        assert!(rep.min_value < 0.0);
        assert!(trig_convexity_check(&df(0.5, |p| tilde_cos(0.5, p - PI)), None).unwrap().pass);
        assert!(trig_convexity_check(&df(1.0, |p| p.cos().max(0.0)), None).unwrap().pass);
        assert!(!trig_convexity_check(&df(1.0, |p| -(p.cos().max(0.0))), None).unwrap().pass);
    }

    #[test]
    fn interpolant_examples() {
        assert_eq!(trig_interpolant(0.0, 1.0, 0.0, 0.0, 1.3, 0.4).unwrap(), 0.0);
        let rho = 1.7;
        let (a, b) = (-0.4, 1.1);
        for i in 0..=10 {
            let phi = a + (b - a) * i as f64 / 10.0;
            let y = trig_interpolant(a, b, (rho * a).cos(), (rho * b).cos(), rho, phi).unwrap();
            assert!((y - (rho * phi).cos()).abs() < 1e-12);
        }
        let y = trig_interpolant(0.0, PI / 2.0, 1.0, 0.0, 1.0, PI / 4.0).unwrap();
        assert!((y - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(trig_interpolant(0.0, 4.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert_eq!(trig_interpolant(0.2, 0.9, 3.0, 4.0, 1.0, 0.2).unwrap(), 3.0);
    }

    #[test]
    fn t_rho_examples() {
        let rho = 0.6;
        // cos ρ(φ - π) is smooth away from φ = 0.
        let s = t_rho_measure(&df(rho, |p| tilde_cos(rho, p - PI))).unwrap();
        assert_eq!(s.atoms.len(), 1);
        let d = 256usize;
        for i in 8..d - 8 {
            assert!(s.density[i].abs() < 1e-3);
        }
        let u = t_rho_measure(&df(rho, |_| 2.0)).unwrap();
        assert!(u.atoms.is_empty());
        assert!(u.density.iter().all(|v| (v - rho * rho * 2.0).abs() < 1e-9));
        for rho in [0.3, 0.5, 0.8] {
            let s = t_rho_measure(&df(rho, |p| tilde_cos(rho, p - PI))).unwrap();
            assert_eq!(s.atoms.len(), 1);
            let expect = 2.0 * rho * (PI * rho).sin();
            assert!((s.atoms[0].1 / expect - 1.0).abs() < 0.02);
            assert!(s.atoms[0].0.min(TAU - s.atoms[0].0) < 1e-9);
        }
    }

    #[test]
    fn reconstruct_examples() {
        for rho in [0.3, 0.5, 0.8, 1.5, 2.4] {
            let s = CircleMeasure::single_atom(256, 0.0, 2.0 * rho * (PI * rho).sin());
            let h = reconstruct_tcf(&s, rho).unwrap();
            for i in 0..256 {
                assert!((h.values()[i] - tilde_cos(rho, h.phi(i) - PI)).abs() < 1e-12);
            }
            let sigma = 1.7;
            let u = CircleMeasure::uniform(256, rho * rho * sigma);
            let h = reconstruct_tcf(&u, rho).unwrap();
            assert!(h.values().iter().all(|v| (v - sigma).abs() < 1e-6), "rho={rho}");
        }
    }

    #[test]
    fn reconstruct_integer_order() {
        // h = |sin φ| has T_1 h = 2δ_0 + 2δ_π, orthogonal to e^{iφ}.
        let s = CircleMeasure { atoms: vec![(0.0, 2.0), (PI, 2.0)], density: vec![0.0; 256] };
        let h = reconstruct_tcf(&s, 1.0).unwrap();
        let back = t_rho_measure(&h).unwrap();
        assert!(back.tv_distance(&s).unwrap() < 0.02 * s.total_variation());
        // Differs from |sin φ| by a first harmonic only.
        let diff: Vec<f64> = (0..256).map(|i| h.values()[i] - h.phi(i).sin().abs()).collect();
        let d = DirectionFunction::new(1.0, diff).unwrap();
        let t = t_rho_measure(&d).unwrap();
        assert!(t.total_variation() < 1e-3);
        // Uniform density with ρ = 2.
        let u = CircleMeasure::uniform(256, 4.0);
        let h = reconstruct_tcf(&u, 2.0).unwrap();
        assert!(h.values().iter().all(|v| (v - 1.0).abs() < 1e-6));
        let bad = CircleMeasure::single_atom(256, 0.0, 1.0);
        assert!(matches!(reconstruct_tcf(&bad, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn roundtrip_pairs() {
        for rho in [0.5, 0.75, 1.4, 2.5] {
            let h = df(rho, |p| tilde_cos(rho, p - PI).max(0.5 * tilde_cos(rho, p - 2.0 - PI)) + 0.3);
            assert!(trig_convexity_check(&h, None).unwrap().pass);
            let s = t_rho_measure(&h).unwrap();
            let h2 = reconstruct_tcf(&s, rho).unwrap();
            let s2 = t_rho_measure(&h2).unwrap();
            assert!(s.tv_distance(&s2).unwrap() <= 0.02 * s.total_variation(), "rho={rho}");
        }
    }

    #[test]
    fn minorant_examples() {
        let rho = 1.0;
        let m = df(rho, |p| 2.0 * p.cos().max(0.0));
        let out = max_tc_minorant(&m, rho).unwrap().unwrap();
        assert!(out.sup_distance(&m) < 1e-9);
        let c = df(0.7, |_| 1.5);
        assert!(max_tc_minorant(&c, 0.7).unwrap().unwrap().sup_distance(&c) < 1e-12);
        // Infeasible by a linear-programming check on the same grid.
        let low = df(1.3, |p| 1.0 + 0.8 * (3.0 * p).sin() - 0.5 * (p + 1.0).cos().powi(2));
        assert!(max_tc_minorant(&low, 1.3).unwrap().is_none());
        let bumpy = df(1.3, |p| 1.5 + 0.8 * (3.0 * p).sin() - 0.5 * (p + 1.0).cos().powi(2));
        let out = max_tc_minorant(&bumpy, 1.3).unwrap().unwrap();
        assert!(out.values().iter().zip(bumpy.values()).all(|(a, b)| *a <= *b + 1e-12));
        assert!(trig_convexity_check(&out, Some(1e-9)).unwrap().pass);
        let again = max_tc_minorant(&out, 1.3).unwrap().unwrap();
        assert!(again.sup_distance(&out) < 1e-12);
        // Negative constants admit no minorant for ρ < 1/2.
        assert!(max_tc_minorant(&df(0.3, |_| -1.0), 0.3).unwrap().is_none());
    }

    #[test]
    fn minimality_examples() {
        assert!(minimality_test(&df(1.0, |p| p.cos()), 1e-9).unwrap());
        assert!(minimality_test(&df(1.0, |p| p.sin().abs()), 1e-9).unwrap());
        assert!(!minimality_test(&df(1.0, |_| 1.0), 1e-9).unwrap());
        assert!(minimality_test(&df(1.0, |_| -1.0), 1e-9).is_err());
    }
}
