//! The compactly supported bump `C·exp(-1/(1-t²))` and the smooth step built
//! from its primitive.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::quad::{adaptive, gl_integrate};

fn raw(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

fn norm_1d() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| 1.0 / adaptive(raw, -1.0, 1.0, 1e-16, 1e-15).value)
}

fn norm_2d() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| 1.0 / (2.0 * PI * adaptive(|t| raw(t) * t, 0.0, 1.0, 1e-16, 1e-15).value))
}

/// One-dimensional bump with unit integral over `[-1, 1]`.
pub fn bump(t: f64) -> f64 {
    norm_1d() * raw(t)
}

pub fn bump_d1(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        return 0.0;
    }
    let q = 1.0 - t * t;
    bump(t) * (-2.0 * t / (q * q))
}

pub fn bump_d2(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        return 0.0;
    }
    let q = 1.0 - t * t;
    let q2 = q * q;
    bump(t) * (4.0 * t * t / (q2 * q2) - 2.0 / q2 - 8.0 * t * t / (q2 * q))
}

/// Radial profile of the planar mollifier, normalised so that its integral
/// over the unit disc is one.
pub fn bump_2d(r: f64) -> f64 {
    norm_2d() * raw(r)
}

/// Smooth step: 0 for `x ≤ 0`, 1 for `x ≥ 1`, the primitive of the bump in
/// between.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let y = 2.0 * x - 1.0;
    if y <= 0.0 {
        gl_integrate(64, -1.0, y, bump)
    } else {
        1.0 - gl_integrate(64, y, 1.0, bump)
    }
}

pub fn smooth_step_d1(x: f64) -> f64 {
    2.0 * bump(2.0 * x - 1.0)
}

pub fn smooth_step_d2(x: f64) -> f64 {
    4.0 * bump_d1(2.0 * x - 1.0)
}

/// `max |S'|`, attained at `x = 1/2`.
pub fn smooth_step_d1_max() -> f64 {
    smooth_step_d1(0.5)
}

/// `max |S''|`, located by a dense scan refined with golden sections.
pub fn smooth_step_d2_max() -> f64 {
    static M: OnceLock<f64> = OnceLock::new();
    *M.get_or_init(|| {
        let g = |x: f64| -smooth_step_d2(x).abs();
        let n = 4000;
        let mut best = 0;
        for i in 1..n {
            if g(i as f64 / n as f64) < g(best as f64 / n as f64) {
                best = i;
            }
        }
        let (mut a, mut b) = ((best as f64 - 1.0) / n as f64, (best as f64 + 1.0) / n as f64);
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let c = b - phi * (b - a);
            let d = a + phi * (b - a);
            if g(c) < g(d) {
                b = d;
            } else {
                a = c;
            }
        }
        -g(0.5 * (a + b))
    })
}
