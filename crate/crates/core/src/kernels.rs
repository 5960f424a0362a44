//! Primary Weierstrass factors and kernels, their circle Fourier
//! coefficients, the periodic cosine, and the Green and Poisson kernels of a
//! disc.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Below this modulus `G_p` is summed as the tail series `-Re Σ_{k>p} z^k/k`;
/// the closed form loses everything to cancellation there.
const SERIES_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelParams {
    pub p: u32,
    pub rho: f64,
}

impl KernelParams {
    pub fn new(p: u32, rho: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidInput(format!("rho must be positive, got {rho}")));
        }
        Ok(KernelParams { p, rho })
    }
}

fn tail_series(z: Complex64, p: u32) -> Complex64 {
    // Σ_{k>p} z^k / k, |z| < 1/2.
    let mut zk = z.powu(p + 1);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut k = (p + 1) as f64;
    loop {
        let term = zk / k;
        acc += term;
        if term.norm() <= 1e-18 * acc.norm().max(1e-300) {
            return acc;
        }
        zk *= z;
        k += 1.0;
    }
}

fn head_sum(z: Complex64, p: u32) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut zk = Complex64::new(1.0, 0.0);
    for k in 1..=p {
        zk *= z;
        acc += zk / k as f64;
    }
    acc
}

/// `(E(z, p), G_p(z))` with `E(z,p) = (1-z) exp(Σ_{k≤p} z^k/k)` and
/// `G_p = log|E|`. At `z = 1` returns `(0, -inf)`.
pub fn primary_kernel(z: Complex64, p: u32) -> (Complex64, f64) {
    if z == Complex64::new(1.0, 0.0) {
        return (Complex64::new(0.0, 0.0), f64::NEG_INFINITY);
    }
    if z.norm() < SERIES_RADIUS {
        let t = tail_series(z, p);
        return ((-t).exp(), -t.re);
    }
    let e = (Complex64::new(1.0, 0.0) - z) * head_sum(z, p).exp();
    (e, gp(z, p))
}

/// `G_p(z) = log|1 - z| + Re Σ_{k=1}^p z^k/k`.
pub fn gp(z: Complex64, p: u32) -> f64 {
    let n = z.norm();
    if p == 0 && n < SERIES_RADIUS {
        // log|1 - z| = ½ log1p(|z|² - 2 Re z) has no cancellation.
        return 0.5 * (z.norm_sqr() - 2.0 * z.re).ln_1p();
    }
    if n < SERIES_RADIUS {
        return -tail_series(z, p).re;
    }
    let d = Complex64::new(1.0 - z.re, -z.im).norm();
    if d == 0.0 {
        return f64::NEG_INFINITY;
    }
    d.ln() + head_sum(z, p).re
}

/// Complex derivative of `log(1-ζ) + Σ_{k≤p} ζ^k/k`, i.e. `-ζ^p/(1-ζ)`.
pub fn gp_complex_derivative(z: Complex64, p: u32) -> Complex64 {
    -z.powu(p) / (Complex64::new(1.0, 0.0) - z)
}

/// The cos-Fourier coefficient of `θ ↦ G_p(r e^{iθ})` under the convention
/// `a_0 = (1/2π)∮`, `a_m = (1/π)∮ cos mθ`. At `r = 1` the `r < 1` branch is
/// used (its limit).
pub fn circle_fourier_gp(m: u32, r: f64, p: u32) -> f64 {
    let mf = m as f64;
    if r <= 1.0 {
        if m <= p {
            0.0
        } else {
            -r.powi(m as i32) / mf
        }
    } else if m == 0 {
        r.ln()
    } else if m <= p {
        (r.powi(m as i32) - r.powi(-(m as i32))) / mf
    } else {
        -r.powi(-(m as i32)) / mf
    }
}

/// The commonly printed coefficient table, including
/// the `m > p` branch, which carries the wrong sign for `r < 1` and the wrong
/// power for `r > 1`. Kept for comparison only.
pub fn circle_fourier_gp_printed(m: u32, r: f64, p: u32) -> f64 {
    let mf = m as f64;
    if m > p {
        return r.powi(m as i32) / mf;
    }
    if r <= 1.0 {
        0.0
    } else if m == 0 {
        r.ln()
    } else {
        (r.powi(m as i32) - r.powi(-(m as i32))) / mf
    }
}

/// Reduces `phi` into `(-π, π]`.
pub fn reduce_angle(phi: f64) -> f64 {
    let t = phi.rem_euclid(TAU);
    if t > PI {
        t - TAU
    } else {
        t
    }
}

/// `cos ρφ` on `(-π, π]`, extended 2π-periodically.
pub fn tilde_cos(rho: f64, phi: f64) -> f64 {
    (rho * reduce_angle(phi)).cos()
}

/// Green function of the disc `|z - a| < R` (negative inside, zero on the
/// boundary): `log(R|ζ - z| / |R² - (z - a) conj(ζ - a)|)`.
pub fn green_disc(z: Complex64, zeta: Complex64, a: Complex64, radius: f64) -> f64 {
    if z == zeta {
        return f64::NEG_INFINITY;
    }
    let w = z - a;
    let v = zeta - a;
    let den = (Complex64::new(radius * radius, 0.0) - w * v.conj()).norm();
    (radius * (zeta - z).norm() / den).ln()
}

/// Poisson integral of boundary samples `f(a + R e^{iψ_k})`, `ψ_k = 2πk/n`,
/// at an interior point. The trapezoid sum is normalised by the discrete
/// kernel mass so constants are reproduced to rounding.
pub fn poisson_disc(boundary: &[f64], a: Complex64, radius: f64, z: Complex64) -> Result<f64> {
    let n = boundary.len();
    if n < 64 {
        return Err(Error::InvalidInput(format!("Poisson boundary needs at least 64 samples, got {n}")));
    }
    let w = z - a;
    let r = w.norm();
    if r >= radius {
        return Err(Error::Domain(format!("point at distance {r} is not inside the disc of radius {radius}")));
    }
    let phi = w.im.atan2(w.re);
    let (mut num, mut den) = (0.0, 0.0);
    for (k, f) in boundary.iter().enumerate() {
        let psi = TAU * k as f64 / n as f64;
        let kern = (radius * radius - r * r) / (radius * radius - 2.0 * radius * r * (phi - psi).cos() + r * r);
        num += f * kern;
        den += kern;
    }
    Ok(num / den)
}

/// Grid for [`kernel_envelope_check`]: log-uniform radii and uniform angles,
/// with points closer than `margin` to `z = 1` dropped and the circle
/// `|z - 1| = margin` added.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub n_r: usize,
    pub n_phi: usize,
    pub margin: f64,
}

impl Default for EnvelopeGrid {
    fn default() -> Self {
        EnvelopeGrid { r_min: 1e-3, r_max: 1e3, n_r: 120, n_phi: 128, margin: 0.05 }
    }
}

impl EnvelopeGrid {
    fn points(&self, refine: usize) -> Vec<Complex64> {
        let nr = self.n_r * refine;
        let np = self.n_phi * refine;
        let mut pts = Vec::with_capacity(nr * np);
        for i in 0..nr {
            let r = self.r_min * (self.r_max / self.r_min).powf(i as f64 / (nr - 1) as f64);
            for j in 0..np {
                let z = Complex64::from_polar(r, TAU * j as f64 / np as f64);
                if (z - 1.0).norm() >= self.margin {
                    pts.push(z);
                }
            }
        }
        // The suprema near z = 1 sit on the exclusion circle, so sample it.
        for j in 0..np {
            pts.push(1.0 + Complex64::from_polar(self.margin, TAU * j as f64 / np as f64));
        }
        pts
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeRegime {
    pub name: &'static str,
    pub a_fit: f64,
    pub fine_sup: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub p: u32,
    pub regimes: Vec<EnvelopeRegime>,
    pub pass: bool,
}

/// Fits the constants of the three kernel estimates on the grid and checks
/// them on a grid refined 4× in both directions. The fitted constant is the
/// coarse supremum inflated by 5%.
///
/// Regimes: `|G_p| ≤ A|z|^{p+1}` for `|z| < 2`; `|G_p| ≤ A|z|^p` for
/// `|z| > 1/2`; `G_p ≤ A min(|z|^{p+1}, |z|^p)` everywhere. For `p = 0` the
/// last two use `log(1 + |z|)` in place of `|z|^0`.
pub fn kernel_envelope_check(p: u32, grid: &EnvelopeGrid) -> EnvelopeReport {
    let pf = p as i32;
    let outer = |n: f64| if p == 0 { (1.0 + n).ln() } else { n.powi(pf) };
    let ratios = |z: Complex64| -> [Option<f64>; 3] {
        let n = z.norm();
        let g = gp(z, p);
        let inner = n.powi(pf + 1);
        [
            (n < 2.0).then(|| g.abs() / inner),
            (n > 0.5).then(|| g.abs() / outer(n)),
            Some(g / inner.min(outer(n))),
        ]
    };
    let sups = |pts: &[Complex64]| -> [f64; 3] {
        let mut s = [f64::NEG_INFINITY; 3];
        for &z in pts {
            for (k, v) in ratios(z).iter().enumerate() {
                if let Some(v) = v {
                    s[k] = s[k].max(*v);
                }
            }
        }
        s
    };
    let coarse = sups(&grid.points(1));
    let fine = sups(&grid.points(4));
    let names = ["near", "far", "upper"];
    let regimes: Vec<EnvelopeRegime> = (0..3)
        .map(|k| {
            let a_fit = 1.05 * coarse[k].max(0.0);
            EnvelopeRegime { name: names[k], a_fit, fine_sup: fine[k], pass: fine[k] <= a_fit }
        })
        .collect();
    let pass = regimes.iter().all(|r| r.pass);
    EnvelopeReport { p, regimes, pass }
}
