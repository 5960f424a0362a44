//! Radial subharmonic functions whose Riesz density dominates a prescribed
//! decaying fraction of `r^{ρ(r)-2}` while the function itself is `o(V)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::bump::bump;
use crate::error::{Error, Result};
use crate::field::PlaneField;
use crate::quad::gl_integrate;
use crate::scale::ProximateOrder;
use crate::synthesis::majorant::{convex_majorant, ConvexMajorant};

const GRID: usize = 2000;
const SAFETY: f64 = 1.05;

/// `Φ(z) = c e^{k(log |z|²)} |z|^{ρ(|z|)}` for `|z| ≥ r_in`, continued
/// inside by `A |z|^q` with matching value and slope.
#[derive(Debug, Clone, Serialize)]
pub struct MaxDensity {
    c: f64,
    po: ProximateOrder,
    k: ConvexMajorant,
    r_in: f64,
    r_out: f64,
    inner_amp: f64,
    inner_q: f64,
}

impl MaxDensity {
    /// `ψ(ℓ) = k(2ℓ) + ℓ ρ(e^ℓ)` and two derivatives.
    fn exponent(&self, l: f64) -> (f64, f64, f64) {
        exponent(&self.k, &self.po, l)
    }

    pub fn radial(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        if r < self.r_in {
            return self.inner_amp * r.powf(self.inner_q);
        }
        self.c * self.exponent(r.ln()).0.exp()
    }

    /// Laplacian of `Φ` at radius `r ≥ r_in` from the closed form.
    pub fn laplacian(&self, r: f64) -> f64 {
        let (p, p1, p2) = self.exponent(r.ln());
        self.c * p.exp() * (p2 + p1 * p1) / (r * r)
    }

    pub fn constant(&self) -> f64 {
        self.c
    }

    pub fn majorant(&self) -> &ConvexMajorant {
        &self.k
    }

    pub fn window(&self) -> (f64, f64) {
        (self.r_in, self.r_out)
    }

    /// Rescales the constant `c`, which keeps every property except the
    /// size of the Laplacian margin.
    pub fn scaled(&self, factor: f64) -> MaxDensity {
        let mut out = self.clone();
        out.c *= factor;
        out.inner_amp *= factor;
        out
    }

    /// `⟨Φ_t, g⟩` for the radial bump `g(x) = bump(2 log₂|x| / 2)` on the
    /// annulus `1/2 < |x| < 2`, with `Φ_t(x) = Φ(tx)/V(t)`.
    pub fn weak_pairing(&self, t: f64) -> f64 {
        let v = self.po.v(t);
        let ln2 = std::f64::consts::LN_2;
        gl_integrate(64, -ln2, ln2, |l| {
            let r = l.exp();
            bump(l / ln2) * self.radial(t * r) / v * TAU * r * r
        })
    }
}

impl PlaneField for MaxDensity {
    fn eval(&self, z: Complex64) -> f64 {
        self.radial(z.norm())
    }
}

fn exponent(k: &ConvexMajorant, po: &ProximateOrder, l: f64) -> (f64, f64, f64) {
    let (kv, k1, k2) = k.derivs(2.0 * l);
    let (rho, r1, r2) = po.derivs_log(l);
    (kv + l * rho, 2.0 * k1 + rho + l * r1, 4.0 * k2 + 2.0 * r1 + l * r2)
}

/// Builds `Φ` on `[r_in, r_out]` so that `ΔΦ ≥ γ(r) r^{ρ(r)-2}` there.
pub fn max_density_function<G: Fn(f64) -> f64>(
    gamma: G,
    po: &ProximateOrder,
    r_in: f64,
    r_out: f64,
) -> Result<MaxDensity> {
    if !po.is_smooth() {
        return Err(Error::InvalidInput("proximate order must be smooth".into()));
    }
    if !(r_in > 1.0 && r_out > r_in * 10.0 && r_out.is_finite()) {
        return Err(Error::InvalidInput("need 1 < r_in and r_out > 10 r_in".into()));
    }
    let (l0, l1) = (r_in.ln(), r_out.ln());
    let ls: Vec<f64> = (0..GRID).map(|i| l0 + (l1 - l0) * i as f64 / (GRID - 1) as f64).collect();
    let mut s = Vec::with_capacity(GRID);
    let mut a = Vec::with_capacity(GRID);
    for &l in &ls {
        let g = gamma(l.exp());
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::InvalidInput(format!("γ must be positive, got {g} at r = {}", l.exp())));
        }
        s.push(2.0 * l);
        a.push(g.ln());
    }
    let k = convex_majorant(&s, &a)?;
    let mut need: f64 = 0.0;
    for &l in &ls {
        let (p, p1, p2) = exponent(&k, po, l);
        let q = p2 + p1 * p1;
        if !(q > 0.0) {
            return Err(Error::Infeasible(format!(
                "density factor ψ'' + ψ'^2 = {q:e} is not positive at r = {:e}",
                l.exp()
            )));
        }
        need = need.max(gamma(l.exp()) / ((p - l * po.at_log(l)).exp() * q));
    }
    let c = SAFETY * need;
    let (p, p1, _) = exponent(&k, po, l0);
    if !(p1 > 0.0) {
        return Err(Error::Infeasible(format!("Φ decreases at r_in = {r_in}; move the window outward")));
    }
    let inner_q = p1;
    let inner_amp = c * p.exp() / r_in.powf(inner_q);
    Ok(MaxDensity { c, po: po.clone(), k, r_in, r_out, inner_amp, inner_q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::log_grid;
    use crate::scale::{growth_scalars, RadialSeries};

    fn example() -> (MaxDensity, ProximateOrder) {
        let po = ProximateOrder::constant(1.5).unwrap();
        let phi = max_density_function(|r: f64| 1.0 / r.ln(), &po, std::f64::consts::E, 1e12).unwrap();
        (phi, po)
    }

    #[test]
    fn laplacian_dominates_gamma() {
        let (phi, _) = example();
        for r in log_grid(3.0, 9e11, 20) {
            let l = r.ln();
            let h = 1e-3;
            let f = |x: f64| phi.radial(x.exp());
            let fd = (f(l + h) - 2.0 * f(l) + f(l - h)) / (h * h) / (r * r);
            let want = r.powf(-0.5) / l;
            assert!(fd >= want * (1.0 - 1e-4), "r={r} fd={fd} want={want}");
            assert!((fd - phi.laplacian(r)).abs() <= 1e-4 * fd);
        }
    }

    #[test]
    fn submean_near_origin() {
        let (phi, _) = example();
        for &(x, rad) in &[(0.0, 0.5), (0.0, 2.0), (1.0, 0.5), (2.5, 0.6), (3.0, 1.5)] {
            let z = Complex64::new(x, 0.3);
            let n = 512;
            let mean = (0..n)
                .map(|i| phi.eval(z + Complex64::from_polar(rad, TAU * i as f64 / n as f64)))
                .sum::<f64>()
                / n as f64;
            assert!(phi.eval(z) <= mean + 1e-12, "z={z} r={rad}");
            assert!(phi.eval(z).is_finite());
        }
    }

    #[test]
    fn relative_growth_vanishes() {
        let (phi, po) = example();
        let radii = log_grid(10.0, 1e12, 8);
        let series = RadialSeries::from_fn(&radii, |r| phi.radial(r)).unwrap();
        let est = growth_scalars(&series, &po).unwrap();
        let first = phi.radial(10.0) / po.v(10.0);
        assert!(est.type_value < 0.75 * first, "type {} vs {first}", est.type_value);
        let ratios: Vec<f64> = radii.iter().map(|&r| phi.radial(r) / po.v(r)).collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn weak_limit_is_zero() {
        let (phi, _) = example();
        let ts = log_grid(1e10, 1e11, 4);
        let vals: Vec<f64> = ts.iter().map(|&t| phi.weak_pairing(t).abs()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]), "{vals:?}");
    }
}
