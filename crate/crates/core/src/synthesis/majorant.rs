//! Smooth convex decreasing majorants of functions tending to `-∞`.

use std::sync::OnceLock;

use serde::Serialize;

use crate::bump::{bump, smooth_step};
use crate::error::{Error, Result};
use crate::quad::gl_integrate;

const CELLS: usize = 128;
const TABLE: usize = 2048;
/// Target for `|k'|` at the right end of the sample window.
pub const END_SLOPE: f64 = 0.005;

/// Smoothed ramp `Q(y) = ∫ (y - v)^+ bump(v) dv`, tabulated on `[-1, 1]`.
fn ramp_table() -> &'static [f64] {
    static T: OnceLock<Vec<f64>> = OnceLock::new();
    T.get_or_init(|| {
        let step = 2.0 / TABLE as f64;
        let mut out = Vec::with_capacity(TABLE + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for i in 0..TABLE {
            let a = -1.0 + i as f64 * step;
            acc += gl_integrate(16, a, a + step, step_bump);
            out.push(acc);
        }
        out
    })
}

/// `Q'`: the smooth step rescaled to `[-1, 1]`.
fn step_bump(v: f64) -> f64 {
    smooth_step(0.5 * (v + 1.0))
}

fn ramp(y: f64) -> (f64, f64, f64) {
    if y <= -1.0 {
        return (0.0, 0.0, 0.0);
    }
    if y >= 1.0 {
        return (y, 1.0, 0.0);
    }
    // Cubic Hermite on the table, using the exact derivative.
    let t = ramp_table();
    let step = 2.0 / TABLE as f64;
    let pos = (y + 1.0) / step;
    let i = (pos.floor() as usize).min(TABLE - 1);
    let u = pos - i as f64;
    let (x0, x1) = (-1.0 + i as f64 * step, -1.0 + (i + 1) as f64 * step);
    let (q0, q1, d0, d1) = (t[i], t[i + 1], step_bump(x0), step_bump(x1));
    let h00 = 2.0 * u * u * u - 3.0 * u * u + 1.0;
    let h10 = u * u * u - 2.0 * u * u + u;
    let h01 = -2.0 * u * u * u + 3.0 * u * u;
    let h11 = u * u * u - u * u;
    let q = h00 * q0 + h10 * step * d0 + h01 * q1 + h11 * step * d1;
    (q, step_bump(y), bump(y))
}

/// `k = -λ^{-1}` where `λ` is a mollified convex piecewise-linear
/// increasing function of `b` lying above the inverse of `-a*`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexMajorant {
    b0: f64,
    lam0: f64,
    alpha0: f64,
    knots: Vec<f64>,
    jumps: Vec<f64>,
    h: f64,
    ramp_c: f64,
    window: (f64, f64),
}

impl ConvexMajorant {
    /// `λ(b)`, `λ'(b)`, `λ''(b)`.
    fn lambda(&self, b: f64) -> (f64, f64, f64) {
        let mut v = self.lam0 + self.alpha0 * (b - self.b0);
        let mut d1 = self.alpha0;
        let mut d2 = 0.0;
        for (&bj, &jj) in self.knots.iter().zip(&self.jumps) {
            let y = (b - bj) / self.h;
            if y <= -1.0 {
                break;
            }
            let (q, q1, q2) = ramp(y);
            v += jj * self.h * q;
            d1 += jj * q1;
            d2 += jj * q2 / self.h;
        }
        (v, d1, d2)
    }

    fn inverse(&self, s: f64) -> f64 {
        let (mut lo, mut hi) = (self.b0 - 1.0, self.b0 + 1.0);
        while self.lambda(lo).0 > s {
            lo -= 2.0 * (hi - lo);
        }
        while self.lambda(hi).0 < s {
            hi += 2.0 * (hi - lo);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.lambda(mid).0 < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn eval(&self, s: f64) -> f64 {
        -self.inverse(s)
    }

    /// `(k, k', k'')` at `s`.
    pub fn derivs(&self, s: f64) -> (f64, f64, f64) {
        let b = self.inverse(s);
        let (_, l1, l2) = self.lambda(b);
        (-b, -1.0 / l1, l2 / (l1 * l1 * l1))
    }

    /// Sample window `[s_0, s_end]`.
    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    /// Slope growth constant chosen to flatten `k` at the window end.
    pub fn ramp_constant(&self) -> f64 {
        self.ramp_c
    }
}

fn build(b0: f64, db: f64, lam0: f64, cells: &[Vec<(f64, f64)>], c: f64, window: (f64, f64)) -> ConvexMajorant {
    let mut slopes = Vec::with_capacity(cells.len());
    let mut left = lam0;
    let mut prev: f64 = 1e-9;
    for (j, pts) in cells.iter().enumerate() {
        let bj = b0 + j as f64 * db;
        // The first point beyond the cell also bounds the slope, so that
        // empty cells do not leave `λ` behind the data.
        let next = cells[j + 1..].iter().find_map(|c| c.first());
        let chord = pts
            .iter()
            .chain(next)
            .map(|&(a, s)| (s - left) / (a - bj))
            .fold(f64::NEG_INFINITY, f64::max);
        let alpha = prev.max(chord).max(c * (j + 1) as f64);
        slopes.push(alpha);
        left += alpha * db;
        prev = alpha;
    }
    let knots: Vec<f64> = (1..cells.len()).map(|j| b0 + j as f64 * db).collect();
    let jumps: Vec<f64> = (1..cells.len()).map(|j| slopes[j] - slopes[j - 1]).collect();
    ConvexMajorant { b0, lam0, alpha0: slopes[0], knots, jumps, h: db, ramp_c: c, window }
}

/// Convex decreasing `k ≥ a` on the sample window with `|k'| ≤ 0.005` at
/// its right end.
pub fn convex_majorant(s: &[f64], a: &[f64]) -> Result<ConvexMajorant> {
    let n = s.len();
    if n < 8 || a.len() != n {
        return Err(Error::InvalidInput("need at least 8 paired samples".into()));
    }
    if s.windows(2).any(|w| !(w[1] > w[0])) || a.iter().chain(s).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("samples must be finite with increasing abscissae".into()));
    }
    let mut star = a.to_vec();
    for i in (0..n - 1).rev() {
        star[i] = star[i].max(star[i + 1]);
    }
    let scale = star[0].abs().max(star[n - 1].abs()).max(1.0);
    let q3 = star[(3 * n) / 4];
    if !(star[n - 1] < q3 - 1e-9 * scale && star[n - 1] < star[0] - 1e-6 * scale) {
        return Err(Error::Domain("samples do not decrease towards -inf on the window".into()));
    }
    let big_a: Vec<f64> = star.iter().map(|v| -v).collect();
    let (b0, b_end) = (big_a[0], big_a[n - 1]);
    let db = (b_end - b0) / CELLS as f64;
    let lam0 = s.iter().zip(&big_a).filter(|(_, &b)| b <= b0).map(|(&x, _)| x).fold(s[0], f64::max);
    let mut cells = vec![Vec::new(); CELLS];
    for (&x, &b) in s.iter().zip(&big_a) {
        if b > b0 {
            let j = (((b - b0) / db).ceil() as usize).clamp(1, CELLS) - 1;
            cells[j].push((b, x));
        }
    }
    let window = (s[0], s[n - 1]);
    let ok = |m: &ConvexMajorant| m.derivs(window.1).1.abs() <= END_SLOPE;
    let first = build(b0, db, lam0, &cells, 0.0, window);
    if ok(&first) {
        return Ok(first);
    }
    let mut hi = 1e-6 * (window.1 - window.0).abs().max(1.0) / (b_end - b0);
    let mut best = build(b0, db, lam0, &cells, hi, window);
    let mut doublings = 0;
    while !ok(&best) {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::NoConvergence { what: "majorant slope growth".into(), residual: best.derivs(window.1).1 });
        }
        best = build(b0, db, lam0, &cells, hi, window);
    }
    let mut lo = hi / 2.0;
    for _ in 0..40 {
        let mid = (lo * hi).sqrt();
        let m = build(b0, db, lam0, &cells, mid, window);
        if ok(&m) {
            hi = mid;
            best = m;
        } else {
            lo = mid;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    fn check(m: &ConvexMajorant, s: &[f64], a: &[f64]) {
        let k: Vec<f64> = s.iter().map(|&x| m.eval(x)).collect();
        for i in 0..s.len() {
            assert!(k[i] >= a[i] - 1e-9, "k < a at s={}", s[i]);
        }
        for w in k.windows(2) {
            assert!(w[1] < w[0]);
        }
        for w in k.windows(3) {
            assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-9, "second difference {}", w[0] - 2.0 * w[1] + w[2]);
        }
    }

    #[test]
    fn ramp_matches_quadrature() {
        for i in 0..40 {
            let y = -1.0 + i as f64 / 20.0 + 0.013;
            let split = gl_integrate(64, -1.0, y.min(1.0), |v| (y - v) * bump(v));
            assert!((ramp(y).0 - split).abs() < 1e-11, "y={y}");
        }
        assert_eq!(ramp(2.5).0, 2.5);
    }

    #[test]
    fn linear_decay() {
        let s = grid(0.0, 50.0, 400);
        let a: Vec<f64> = s.iter().map(|x| -x).collect();
        let m = convex_majorant(&s, &a).unwrap();
        check(&m, &s, &a);
        assert!(m.derivs(50.0).1.abs() < 0.01);
    }

    #[test]
    fn tight_for_convex_input() {
        let s = grid(1.0, 1000.0, 4000);
        let a: Vec<f64> = s.iter().map(|x| -x.ln()).collect();
        let m = convex_majorant(&s, &a).unwrap();
        check(&m, &s, &a);
        let scale = 1000f64.ln();
        let gap = s.iter().zip(&a).map(|(&x, &y)| m.eval(x) - y).fold(0.0, f64::max);
        assert!(gap <= 0.05 * scale, "gap {gap}");
        assert!(m.derivs(1000.0).1.abs() < 0.01);
    }

    #[test]
    fn oscillating_input() {
        let s = grid(0.0, 200.0, 3000);
        let a: Vec<f64> = s.iter().map(|x| -(1.0 + x).sqrt() + 0.8 * (x * 1.7).sin()).collect();
        let m = convex_majorant(&s, &a).unwrap();
        check(&m, &s, &a);
        let (_, d1, d2) = m.derivs(120.0);
        let h = 1e-3;
        let fd1 = (m.eval(120.0 + h) - m.eval(120.0 - h)) / (2.0 * h);
        assert!((fd1 - d1).abs() < 1e-5 * d1.abs().max(1.0));
        assert!(d2 >= 0.0);
    }

    #[test]
    fn rejects_non_decaying() {
        let s = grid(0.0, 10.0, 50);
        let a: Vec<f64> = s.iter().map(|x| 0.1 * x).collect();
        assert!(convex_majorant(&s, &a).is_err());
        let a: Vec<f64> = vec![1.0; 50];
        assert!(convex_majorant(&s, &a).is_err());
    }
}
