//! Families of subharmonic functions whose pointwise infimum on the unit
//! circle is a prescribed upper semicontinuous function.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::direction::DirectionFunction;
use crate::error::{Error, Result};
use crate::field::PlaneField;
use crate::kernels::gp;

/// Trigonometric polynomial `c_0 + Σ (a_k cos kφ + b_k sin kφ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrigPoly {
    pub c0: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl TrigPoly {
    pub fn eval(&self, phi: f64) -> f64 {
        self.c0
            + self
                .a
                .iter()
                .zip(&self.b)
                .enumerate()
                .map(|(i, (a, b))| {
                    let k = (i + 1) as f64;
                    a * (k * phi).cos() + b * (k * phi).sin()
                })
                .sum::<f64>()
    }

    pub fn derivative(&self, phi: f64) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .enumerate()
            .map(|(i, (a, b))| {
                let k = (i + 1) as f64;
                k * (b * (k * phi).cos() - a * (k * phi).sin())
            })
            .sum()
    }

    /// `max |p'|` bounded by `Σ k (|a_k| + |b_k|)`.
    pub fn derivative_bound(&self) -> f64 {
        self.a.iter().zip(&self.b).enumerate().map(|(i, (a, b))| (i + 1) as f64 * (a.abs() + b.abs())).sum()
    }
}

/// Fejér mean of order `n` of grid samples.
fn fejer(values: &[f64], n: usize) -> TrigPoly {
    let len = values.len();
    let n = n.min(len / 2 - 1);
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    let c0 = values.iter().sum::<f64>() / len as f64;
    for k in 1..=n {
        let w = 1.0 - k as f64 / (n + 1) as f64;
        let (mut ca, mut cb) = (0.0, 0.0);
        for (j, v) in values.iter().enumerate() {
            let x = TAU * (k * j) as f64 / len as f64;
            ca += v * x.cos();
            cb += v * x.sin();
        }
        a.push(2.0 * w * ca / len as f64);
        b.push(2.0 * w * cb / len as f64);
    }
    TrigPoly { c0, a, b }
}

/// One smoothing level: `g_n`, its constants `M_n`, `K_n`, `δ_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerLevel {
    pub order: usize,
    pub poly: TrigPoly,
    /// Constant added to the Fejér mean so that `g_n ≥ g` and `g_n ↓`.
    pub offset: f64,
    pub m: f64,
    pub k: f64,
    pub delta: f64,
}

impl LowerLevel {
    pub fn g(&self, phi: f64) -> f64 {
        self.poly.eval(phi) + self.offset
    }
}

/// `v_{θ,n}(z) = W(z e^{-iθ}, K_n, δ_n, M_n + 1 - g_n(θ)) + (M_n + 1)|z|^ρ`,
/// with `W = max(δH, -λ + K|w-1|)` on `|w - 1| < δ` and `δH` elsewhere.
/// Flagged directions keep the full trunk `δH`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerMember {
    pub rho: f64,
    pub p: u32,
    pub theta: f64,
    pub k: f64,
    pub delta: f64,
    pub lambda: f64,
    pub m: f64,
    pub truncated: bool,
}

impl LowerMember {
    pub fn w(&self, w: Complex64) -> f64 {
        let h = self.delta * gp(w, self.p);
        let d = (w - 1.0).norm();
        if self.truncated && d < self.delta {
            h.max(-self.lambda + self.k * d)
        } else {
            h
        }
    }
}

impl PlaneField for LowerMember {
    fn eval(&self, z: Complex64) -> f64 {
        self.w(z * Complex64::from_polar(1.0, -self.theta)) + (self.m + 1.0) * z.norm().powf(self.rho)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerFamily {
    pub rho: f64,
    pub p: u32,
    pub levels: Vec<LowerLevel>,
    /// Grid directions where the target is `-∞`.
    pub flagged: Vec<bool>,
    /// `sup H(z,p)|z|^{-ρ}` on the reference grid.
    pub a_bound: f64,
}

impl LowerFamily {
    fn flagged_at(&self, theta: f64) -> bool {
        let n = self.flagged.len();
        let i = ((theta.rem_euclid(TAU) / (TAU / n as f64)).round() as usize) % n;
        self.flagged[i]
    }

    pub fn member(&self, level: usize, theta: f64) -> LowerMember {
        let l = &self.levels[level];
        LowerMember {
            rho: self.rho,
            p: self.p,
            theta,
            k: l.k,
            delta: l.delta,
            lambda: l.m + 1.0 - l.g(theta),
            m: l.m,
            truncated: !self.flagged_at(theta),
        }
    }

    /// `min v_{θ,n}(τ e^{iφ}) τ^{-ρ}` over the given grids and all levels.
    pub fn family_min(&self, phi: f64, thetas: &[f64], taus: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        for level in 0..self.levels.len() {
            for &th in thetas {
                let v = self.member(level, th);
                for &tau in taus {
                    best = best.min(v.eval(Complex64::from_polar(tau, phi)) / tau.powf(self.rho));
                }
            }
        }
        best
    }

    /// `A δ_n + M_n + 1`.
    pub fn growth_bound(&self, level: usize) -> f64 {
        let l = &self.levels[level];
        self.a_bound * l.delta + l.m + 1.0
    }
}

/// Reference grid for the global properties of `H(z, p)|z|^{-ρ}`.
fn reference_points() -> &'static [Complex64] {
    static P: OnceLock<Vec<Complex64>> = OnceLock::new();
    P.get_or_init(|| {
        let mut out = Vec::new();
        for i in 0..=120 {
            let r = 10f64.powf(-3.0 + 6.0 * i as f64 / 120.0);
            for j in 0..256 {
                out.push(Complex64::from_polar(r, TAU * j as f64 / 256.0));
            }
        }
        out
    })
}

fn h_scaled(z: Complex64, p: u32, rho: f64) -> f64 {
    gp(z, p) / z.norm().powf(rho)
}

/// Conditions on `δ`: `δ H |z|^{-ρ} ≥ -1/4` off the disc `|z-1| < δ`,
/// `δ H ≥ -1/4` on its boundary, `δ ≤ 1/(2K)`.
fn delta_ok(delta: f64, k: f64, p: u32, rho: f64) -> bool {
    if delta > 0.5 / k {
        return false;
    }
    let off = reference_points()
        .iter()
        .filter(|z| (**z - 1.0).norm() >= delta)
        .map(|&z| h_scaled(z, p, rho))
        .fold(f64::INFINITY, f64::min);
    let circle = (0..256)
        .map(|j| {
            let z = 1.0 + Complex64::from_polar(delta, TAU * j as f64 / 256.0);
            (gp(z, p), h_scaled(z, p, rho))
        })
        .fold((f64::INFINITY, f64::INFINITY), |m, v| (m.0.min(v.0), m.1.min(v.1)));
    delta * off >= -0.25 && delta * circle.0 >= -0.25 && delta * circle.1 >= -0.25
}

/// `v_{θ,n}(z)|z|^{-ρ} ≥ g_n(arg z)` on the disc `|z e^{-iθ} - 1| ≤ δ`,
/// checked for 64 values of `θ`.
fn pinning_ok(family: &LowerFamily, level: usize) -> bool {
    let l = &family.levels[level];
    for i in 0..64 {
        let theta = TAU * i as f64 / 64.0;
        if family.flagged_at(theta) {
            continue;
        }
        let v = family.member(level, theta);
        for a in 1..=16 {
            let s = l.delta * a as f64 / 16.0;
            for b in 0..32 {
                let w = 1.0 + Complex64::from_polar(s, TAU * b as f64 / 32.0);
                let z = w * Complex64::from_polar(1.0, theta);
                let lhs = v.eval(z) / z.norm().powf(family.rho);
                if lhs < l.g(z.arg()) - 1e-12 * (1.0 + l.m) {
                    return false;
                }
            }
        }
    }
    true
}

/// Builds `levels` smoothing levels of the family for the target `g`.
pub fn lower_indicator_family(g: &DirectionFunction, rho: f64, levels: usize) -> Result<LowerFamily> {
    if !(rho > 0.0) || rho.fract() == 0.0 {
        return Err(Error::Unsupported(format!("the construction needs non-integer order, got {rho}")));
    }
    if levels == 0 {
        return Err(Error::InvalidInput("at least one level".into()));
    }
    let p = rho.floor() as u32;
    let flagged: Vec<bool> = g.values().iter().map(|v| *v == f64::NEG_INFINITY).collect();
    let finite: Vec<f64> = g.values().iter().copied().filter(|v| v.is_finite()).collect();
    let floor = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let filled: Vec<f64> = if finite.is_empty() {
        vec![0.0; g.len()]
    } else {
        g.values().iter().map(|&v| if v.is_finite() { v } else { floor - 1.0 }).collect()
    };
    let n_grid = filled.len();
    let phis: Vec<f64> = (0..n_grid).map(|i| TAU * i as f64 / n_grid as f64).collect();
    let polys: Vec<TrigPoly> = (0..levels).map(|n| fejer(&filled, 4 << (n + 1))).collect();
    let dev: Vec<f64> = polys
        .iter()
        .map(|q| {
            phis.iter()
                .zip(&filled)
                .fold(0.0f64, |m, (&ph, &v)| m.max((q.eval(ph) - v).abs()))
        })
        .collect();
    // Backward offsets: D_N = d_N, D_n = D_{n+1} + d_n + d_{n+1}.
    let mut offsets = vec![0.0; levels];
    offsets[levels - 1] = dev[levels - 1];
    for n in (0..levels - 1).rev() {
        offsets[n] = offsets[n + 1] + dev[n] + dev[n + 1];
    }
    let a_bound = reference_points().iter().map(|&z| h_scaled(z, p, rho)).fold(f64::NEG_INFINITY, f64::max);
    let mut family = LowerFamily { rho, p, levels: Vec::new(), flagged, a_bound };
    for (n, poly) in polys.into_iter().enumerate() {
        let offset = offsets[n];
        let m = phis
            .iter()
            .map(|&ph| (poly.eval(ph) + offset).max(0.0))
            .fold(0.0, f64::max);
        let mut k = 2.0 * poly.derivative_bound() + 2.0;
        let mut accepted = false;
        for _ in 0..40 {
            let mut delta = (0.5 / k).min(0.1);
            while !delta_ok(delta, k, p, rho) {
                delta *= 0.5;
                if delta < 1e-12 {
                    return Err(Error::Numerical(format!("δ underflow at level {n}; smooth the target further")));
                }
            }
            family.levels.push(LowerLevel { order: 4 << (n + 1), poly: poly.clone(), offset, m, k, delta });
            if pinning_ok(&family, n) {
                accepted = true;
                break;
            }
            family.levels.pop();
            k *= 2.0;
        }
        if !accepted {
            return Err(Error::Numerical(format!("no admissible K at level {n}")));
        }
    }
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn submean_fraction(v: &LowerMember) -> f64 {
        let mut total = 0;
        let mut ok = 0;
        let step = 0.02;
        for i in -20..=20 {
            for j in -20..=20 {
                let z = Complex64::from_polar(1.0, v.theta) + Complex64::new(i as f64 * step, j as f64 * step) * 4.0;
                let c = v.eval(z);
                if c == f64::NEG_INFINITY {
                    continue;
                }
                for &rad in &[2.0 * step, 0.5 * v.delta] {
                    let mean = (0..128)
                        .map(|a| v.eval(z + Complex64::from_polar(rad, TAU * a as f64 / 128.0)))
                        .sum::<f64>()
                        / 128.0;
                    total += 1;
                    if c <= mean + 1e-10 {
                        ok += 1;
                    }
                }
            }
        }
        ok as f64 / total as f64
    }

    #[test]
    fn zero_target() {
        let g = DirectionFunction::from_fn(0.5, 64, |_| 0.0).unwrap();
        let fam = lower_indicator_family(&g, 0.5, 3).unwrap();
        for level in 0..3 {
            for i in 0..16 {
                let phi = TAU * i as f64 / 16.0;
                let v = fam.member(level, phi);
                assert!(v.eval(Complex64::from_polar(1.0, phi)).abs() < 1e-12);
            }
        }
        let thetas: Vec<f64> = (0..32).map(|i| TAU * i as f64 / 32.0).collect();
        let taus: Vec<f64> = (0..21).map(|i| 10f64.powf(-1.0 + i as f64 / 10.0)).collect();
        for &phi in &thetas {
            assert!(fam.family_min(phi, &thetas, &taus).abs() < 1e-12);
        }
    }

    #[test]
    fn smooth_target_pins_and_subharmonicity() {
        let g = DirectionFunction::from_fn(1.5, 128, |p| -1.0 + p.cos()).unwrap();
        let fam = lower_indicator_family(&g, 1.5, 3).unwrap();
        for level in 0..3 {
            let l = &fam.levels[level];
            assert!(l.delta <= 0.5 / l.k);
            for i in 0..32 {
                let phi = TAU * i as f64 / 32.0;
                let v = fam.member(level, phi);
                let pin = v.eval(Complex64::from_polar(1.0, phi));
                assert!((pin - l.g(phi)).abs() < 1e-9);
            }
            let v = fam.member(level, 0.7);
            assert!(submean_fraction(&v) >= 0.999);
            let bound = fam.growth_bound(level);
            for i in 0..60 {
                for j in 0..64 {
                    let z = Complex64::from_polar(10f64.powf(-2.0 + i as f64 / 15.0), TAU * j as f64 / 64.0);
                    assert!(v.eval(z) / z.norm().powf(1.5) <= bound * (1.0 + 1e-6));
                }
            }
        }
        // Monotone smoothing and convergence to g up to the smoothing gap.
        for i in 0..64 {
            let phi = TAU * i as f64 / 64.0;
            let gs: Vec<f64> = fam.levels.iter().map(|l| l.g(phi)).collect();
            assert!(gs.windows(2).all(|w| w[1] <= w[0] + 1e-12));
            assert!(gs[2] >= -1.0 + phi.cos() - 1e-12);
        }
        let thetas: Vec<f64> = (0..64).map(|i| TAU * i as f64 / 64.0).collect();
        let taus: Vec<f64> = (0..41).map(|i| 10f64.powf(-1.0 + i as f64 / 20.0)).collect();
        for &phi in thetas.iter().step_by(8) {
            let min = fam.family_min(phi, &thetas, &taus);
            let last = fam.levels[2].g(phi);
            assert!((min - last).abs() < 1e-9, "phi={phi}: {min} vs {last}");
            assert!((min - (-1.0 + phi.cos())).abs() <= fam.levels[2].offset * 2.0 + 1e-9);
        }
    }

    #[test]
    fn flagged_direction_uses_full_trunk() {
        let g = DirectionFunction::from_fn(0.5, 64, |p| if p == 0.0 { f64::NEG_INFINITY } else { -1.0 }).unwrap();
        let fam = lower_indicator_family(&g, 0.5, 2).unwrap();
        let v = fam.member(1, 0.0);
        assert!(!v.truncated);
        assert_eq!(v.eval(Complex64::new(1.0, 0.0)), f64::NEG_INFINITY);
        let w = fam.member(1, 1.0);
        assert!(w.truncated);
        assert!(w.eval(Complex64::from_polar(1.0, 1.0)).is_finite());
    }

    #[test]
    fn fejer_of_trig_poly_is_damped_exactly() {
        let vals: Vec<f64> = (0..64).map(|j| (TAU * j as f64 / 64.0).cos()).collect();
        let q = fejer(&vals, 8);
        assert!((q.a[0] - 8.0 / 9.0).abs() < 1e-12);
        assert!(q.a[1..].iter().chain(&q.b).all(|v| v.abs() < 1e-12));
    }
}
