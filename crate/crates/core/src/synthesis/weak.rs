//! The two fixed test functions used as finite-window stand-ins for weak
//! convergence, both supported in the annulus `1/2 < |x| < 2`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::bump::bump;
use crate::field::PlaneField;
use crate::kernels::reduce_angle;
use crate::measure::MassDistribution;
use crate::quad::gauss_legendre;

const ANGLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TestBump {
    /// `bump(log₂|x|)`.
    Radial,
    /// `bump(log₂|x|) · bump((arg x - π/4)/(π/2))`.
    Sector,
}

impl TestBump {
    pub const ALL: [TestBump; 2] = [TestBump::Radial, TestBump::Sector];

    pub fn eval(&self, z: Complex64) -> f64 {
        let r = z.norm();
        if !(r > 0.5 && r < 2.0) {
            return 0.0;
        }
        let radial = bump(r.log2());
        match self {
            TestBump::Radial => radial,
            TestBump::Sector => radial * bump(reduce_angle(z.arg() - FRAC_PI_4) / FRAC_PI_2),
        }
    }

    /// Quadrature nodes `(z, weight)` for `∫ f g dA`.
    fn nodes(&self) -> Vec<(Complex64, f64)> {
        let radial = gauss_legendre(64);
        let angular: Vec<(f64, f64)> = match self {
            TestBump::Radial => (0..ANGLES).map(|j| (TAU * (j as f64 + 0.5) / ANGLES as f64, TAU / ANGLES as f64)).collect(),
            TestBump::Sector => gauss_legendre(64)
                .iter()
                .map(|&(x, w)| (FRAC_PI_4 + FRAC_PI_2 * x, FRAC_PI_2 * w))
                .collect(),
        };
        let mut out = Vec::with_capacity(radial.len() * angular.len());
        for &(x, wl) in radial {
            let l = LN_2 * x;
            let r = l.exp();
            for &(p, wp) in &angular {
                let z = Complex64::from_polar(r, p);
                out.push((z, LN_2 * wl * wp * r * r * self.eval(z)));
            }
        }
        out
    }

    /// `⟨f, g⟩ = ∫ f g dA`.
    pub fn pair_field<F: PlaneField + ?Sized>(&self, f: &F) -> f64 {
        self.nodes().iter().map(|&(z, w)| w * f.eval(z)).sum()
    }

    /// `⟨f, g⟩` for a density `f(r, φ)` with respect to `dr dφ`, after the
    /// dilation `μ_t(E) = μ(tE)/scale`.
    pub fn pair_density<F: Fn(f64, f64) -> f64>(&self, density: F, t: f64, scale: f64) -> f64 {
        // dA = r dr dφ, so the density per unit area is f/r.
        self.nodes()
            .iter()
            .map(|&(z, w)| {
                let r = z.norm();
                w * density(t * r, z.arg()) * t / r
            })
            .sum::<f64>()
            / scale
    }

    /// `⟨μ_t, g⟩ = Σ m_i g(z_i/t) / scale`.
    pub fn pair_atoms(&self, mu: &MassDistribution, t: f64, scale: f64) -> f64 {
        mu.atoms().iter().map(|a| a.mass * self.eval(a.z() / t)).sum::<f64>() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Atom;

    #[test]
    fn density_and_atoms_agree_for_fine_sampling() {
        // Uniform planar density `1` (per unit area) is `r` in `dr dφ`.
        let g = TestBump::Sector;
        let smooth = g.pair_density(|r, _| r, 1.0, 1.0);
        let area = g.pair_field(&|_z: Complex64| 1.0);
        assert!((smooth - area).abs() < 1e-10);
        let n = 800;
        let h = 4.0 / n as f64;
        let mut atoms = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let z = Complex64::new(-2.0 + (i as f64 + 0.5) * h, -2.0 + (j as f64 + 0.5) * h);
                atoms.push(Atom::new(z, h * h));
            }
        }
        let mu = MassDistribution::new(atoms).unwrap();
        assert!((g.pair_atoms(&mu, 1.0, 1.0) - area).abs() < 1e-4);
    }
}
