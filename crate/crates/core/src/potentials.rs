//! Canonical potentials, circle means, the Nevanlinna characteristic, the
//! Jensen–Privalov identity and the Gol'dberg indicator bound.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::PlaneField;
use crate::kernels::gp;
use crate::measure::MassDistribution;
use crate::quad::{adaptive_pieces, pairwise_sum};
use crate::scale::{radial_counts, RadialSeries};

/// `Π(z, μ, p) = Σ m_j G_p(z/z_j)`.
pub fn canonical_potential(z: Complex64, mu: &MassDistribution, p: u32) -> f64 {
    if z == Complex64::new(0.0, 0.0) {
        return 0.0;
    }
    let terms: Vec<f64> = mu.atoms().iter().map(|a| a.mass * gp(z / a.z(), p)).collect();
    pairwise_sum(&terms)
}

/// Variant for integer orders: atoms inside the unit disc use genus `p - 1`,
/// the rest genus `p`.
pub fn canonical_potential_split(z: Complex64, mu: &MassDistribution, p: u32) -> f64 {
    if z == Complex64::new(0.0, 0.0) {
        return 0.0;
    }
    let terms: Vec<f64> = mu
        .atoms()
        .iter()
        .map(|a| {
            let q = if a.modulus() < 1.0 { p.saturating_sub(1) } else { p };
            a.mass * gp(z / a.z(), q)
        })
        .collect();
    pairwise_sum(&terms)
}

/// The canonical potential as a field.
#[derive(Debug, Clone)]
pub struct CanonicalPotential {
    mu: MassDistribution,
    p: u32,
}

impl CanonicalPotential {
    pub fn new(mu: MassDistribution, p: u32) -> Result<Self> {
        mu.ensure_no_origin()?;
        Ok(CanonicalPotential { mu, p })
    }

    pub fn measure(&self) -> &MassDistribution {
        &self.mu
    }

    pub fn genus(&self) -> u32 {
        self.p
    }
}

impl PlaneField for CanonicalPotential {
    fn eval(&self, z: Complex64) -> f64 {
        canonical_potential(z, &self.mu, self.p)
    }
}

/// `sup_{|z| ≤ R0} |Σ_{|z_j| > R} m_j G_p(z/z_j)|` on a 16 × 64 polar grid.
pub fn tail_sup(mu: &MassDistribution, p: u32, cutoff: f64, r0: f64) -> Result<f64> {
    if !(r0 > 0.0 && cutoff > 2.0 * r0) {
        return Err(Error::InvalidInput(format!("tail cutoff {cutoff} must exceed twice the window radius {r0}")));
    }
    mu.ensure_no_origin()?;
    let tail: Vec<(Complex64, f64)> =
        mu.atoms().iter().filter(|a| a.modulus() > cutoff).map(|a| (a.z(), a.mass)).collect();
    let sup = (1..=16)
        .into_par_iter()
        .map(|i| {
            let r = r0 * i as f64 / 16.0;
            (0..64)
                .map(|j| {
                    let z = Complex64::from_polar(r, TAU * j as f64 / 64.0);
                    let terms: Vec<f64> = tail.iter().map(|(w, m)| m * gp(z / w, p)).collect();
                    pairwise_sum(&terms).abs()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(sup)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleMeans {
    pub mean: f64,
    /// `T(r) = (1/2π)∮ u⁺`.
    pub characteristic: f64,
    /// Grid maximum.
    pub max: f64,
    /// Grid points where `u = -inf`, left out of the sums.
    pub excluded: usize,
}

/// Trapezoidal circle mean, positive-part mean and grid max of `u` on
/// `|z| = r`.
pub fn circle_means<U: PlaneField + ?Sized>(u: &U, r: f64, n: usize) -> Result<CircleMeans> {
    if n < 64 {
        return Err(Error::InvalidInput(format!("circle grid needs at least 64 points, got {n}")));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {r}")));
    }
    let vals: Vec<f64> = (0..n).map(|j| u.eval(Complex64::from_polar(r, TAU * j as f64 / n as f64))).collect();
    let finite: Vec<f64> = vals.iter().copied().filter(|v| v.is_finite()).collect();
    let excluded = n - finite.len();
    if excluded * 20 > n {
        return Err(Error::UnreliableQuadrature { excluded, total: n });
    }
    if vals.iter().any(|v| v.is_nan()) {
        return Err(Error::Numerical(format!("field is NaN on |z| = {r}")));
    }
    let m = finite.len() as f64;
    let pos: Vec<f64> = finite.iter().map(|v| v.max(0.0)).collect();
    Ok(CircleMeans {
        mean: pairwise_sum(&finite) / m,
        characteristic: pairwise_sum(&pos) / m,
        max: finite.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        excluded,
    })
}

/// `M(r, u)` on each radius (grid max over `n_phi` angles), as a monotone
/// envelope suitable for order estimation.
pub fn max_series<U: PlaneField + ?Sized>(u: &U, radii: &[f64], n_phi: usize) -> Result<RadialSeries> {
    let rows = crate::field::sample_polar(u, radii, n_phi);
    let m = rows.iter().map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max).max(0.0)).collect();
    RadialSeries::from_envelope(radii.to_vec(), m)
}

/// `mean_{|z|=r} Π - Π(0) - N(r, μ)`; zero up to quadrature error.
pub fn jensen_privalov_residual(mu: &MassDistribution, p: u32, r: f64, n: usize) -> Result<f64> {
    mu.ensure_no_origin()?;
    if mu.is_empty() {
        return Ok(0.0);
    }
    let scale = r.max(1.0);
    if let Some(hit) = mu.atoms().iter().find(|a| (a.modulus() - r).abs() <= 1e-9 * scale) {
        let mut radii: Vec<f64> = mu.atoms().iter().map(|a| a.modulus()).filter(|m| *m > hit.modulus() * (1.0 + 1e-9)).collect();
        radii.sort_by(f64::total_cmp);
        let suggestion = radii.first().map_or(r * 1.01, |next| 0.5 * (r + next.min(r * 1.02)));
        return Err(Error::AtomOnCircle { radius: r, suggestion });
    }
    let u = |z: Complex64| canonical_potential(z, mu, p);
    let cm = circle_means(&u, r, n)?;
    if cm.excluded * 1024 >= n {
        return Err(Error::UnreliableQuadrature { excluded: cm.excluded, total: n });
    }
    let (_, big_n) = radial_counts(mu, r)?;
    Ok(cm.mean - big_n)
}

/// `d/dt G_p(e^{iφ}/t)` in closed form.
fn kernel_t_derivative(t: f64, phi: f64, p: u32) -> f64 {
    let zeta = Complex64::from_polar(1.0 / t, phi);
    (zeta.powu(p + 1) / ((Complex64::new(1.0, 0.0) - zeta) * t)).re
}

/// `K(t, φ) = -[d/dt G_p⁺(e^{iφ}/t)]⁻`, with `[x]⁻ = min(x, 0)`.
pub fn goldberg_kernel(t: f64, phi: f64, p: u32) -> f64 {
    let g = gp(Complex64::from_polar(1.0 / t, phi), p);
    if g <= 0.0 {
        return 0.0;
    }
    (-kernel_t_derivative(t, phi, p)).max(0.0)
}

/// `Δ ∫_0^∞ t^ρ K(t, φ) dt`, the indicator bound for zeros of upper density
/// `Δ` concentrated on the positive ray.
///
/// Integrated in `x = log t` over `[-L, L]` with `L` chosen so that the
/// `e^{-κ|x|}` tails fall below `1e-12`, split at `x = 0` and at the sign
/// changes of `G_p` (the kinks of `G_p⁺`).
pub fn goldberg_indicator_bound(rho: f64, p: u32, delta: f64, phi: f64) -> Result<f64> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidInput(format!("order must be positive, got {rho}")));
    }
    if rho.fract() == 0.0 {
        return Err(Error::Unsupported("integer order in the Gol'dberg bound".into()));
    }
    if p as f64 != rho.floor() {
        return Err(Error::InvalidInput(format!("genus {p} is not the integer part of {rho}")));
    }
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::InvalidInput(format!("density must be nonnegative, got {delta}")));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    let phi = crate::kernels::reduce_angle(phi).abs();
    let kappa = (rho - p as f64).min(p as f64 + 1.0 - rho);
    let big_l = (1e12f64).ln() / kappa;
    let g_at = |x: f64| gp(Complex64::from_polar((-x).exp(), phi), p);
    let n = 4000;
    let mut points = vec![-big_l];
    let mut prev = g_at(-big_l);
    for i in 1..=n {
        let x = -big_l + 2.0 * big_l * i as f64 / n as f64;
        let g = g_at(x);
        if (g > 0.0) != (prev > 0.0) && g.is_finite() && prev.is_finite() {
            let (mut a, mut b) = (x - 2.0 * big_l / n as f64, x);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                if (g_at(m) > 0.0) == (prev > 0.0) {
                    a = m;
                } else {
                    b = m;
                }
            }
            points.push(0.5 * (a + b));
        }
        prev = g;
    }
    points.push(0.0);
    points.push(big_l);
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let f = |x: f64| {
        let t = x.exp();
        let k = goldberg_kernel(t, phi, p);
        if k.is_finite() {
            t.powf(rho + 1.0) * k
        } else {
            0.0
        }
    };
    let val = adaptive_pieces(f, &points, 1e-11, 1e-11);
    Ok(delta * val.value)
}
