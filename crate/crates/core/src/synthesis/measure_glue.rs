//! Measures glued from homogeneous pieces `r^{ρ-1} dr ⊗ s_k(dψ)/2π` along a
//! partition of unity, and their canonical potentials computed mode by mode.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::direction::{CircleMeasure, DirectionFunction};
use crate::error::{Error, Result};
use crate::field::PlaneField;
use crate::kernels::circle_fourier_gp;
use crate::quad::gauss_legendre;
use crate::synthesis::discretize::{arc_moments, PolarMeasure};
use crate::synthesis::partition::PartitionOfUnity;
use crate::synthesis::weak::TestBump;

const PIECE: f64 = 0.5;
/// Decay, in e-folds, after which a radial tail is dropped.
const TAIL: f64 = 38.0;

#[derive(Debug, Clone)]
pub struct GluedMeasure {
    rho: f64,
    p: u32,
    psi: PartitionOfUnity,
    members: Vec<CircleMeasure>,
    /// `∫ e^{imψ} ds_k(ψ)` for the modes kept.
    spectra: Vec<Vec<(u32, Complex64)>>,
    harmonic: Complex64,
}

impl GluedMeasure {
    /// `μ = Σ_k ψ_k(r) r^{ρ-1} dr ⊗ s_k/2π`; `s_k` must be nonnegative.
    /// Modes up to `max_mode` whose coefficient exceeds `1e-12·TV` are kept.
    pub fn new(rho: f64, psi: PartitionOfUnity, members: Vec<CircleMeasure>, max_mode: u32) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidInput(format!("order must be positive, got {rho}")));
        }
        if members.len() != psi.len() {
            return Err(Error::InvalidInput("one circle measure per partition member".into()));
        }
        let integer = rho.fract() == 0.0;
        let p = rho.floor() as u32;
        let mut spectra = Vec::with_capacity(members.len());
        let mut members = members;
        for (k, s) in members.iter_mut().enumerate() {
            // Grid-level noise from second differences is clipped; genuine
            // negative mass is rejected.
            let tol = 1e-4 * (s.total_variation() / TAU).max(1.0);
            if !s.is_nonnegative(tol) {
                return Err(Error::Infeasible(format!("member {k} has a negative angular measure")));
            }
            s.density.iter_mut().for_each(|v| *v = v.max(0.0));
            s.atoms.retain(|a| a.1 > 0.0);
        }
        for (k, s) in members.iter().enumerate() {
            let tv = s.total_variation();
            let mut modes = Vec::new();
            for m in 0..=max_mode {
                let c = s.fourier(m as f64);
                if integer && m == p {
                    if c.norm() > 1e-3 * tv.max(1.0) {
                        return Err(Error::Unsupported(format!(
                            "member {k}: mode {m} of the angular measure must vanish at integer order"
                        )));
                    }
                    continue;
                }
                if c.norm() > 1e-12 * tv {
                    modes.push((m, c));
                }
            }
            spectra.push(modes);
        }
        Ok(GluedMeasure { rho, p, psi, members, spectra, harmonic: Complex64::new(0.0, 0.0) })
    }

    /// Members alternate through `pieces`, with `r_k = 10^{d k}` and
    /// `σ_k = k + 2`, so that each plateau spans a little under `d` decades.
    pub fn alternating(rho: f64, pieces: &[CircleMeasure], plateau_decades: f64, top: f64, max_mode: u32) -> Result<Self> {
        if pieces.is_empty() || !(plateau_decades >= 1.0) || !(top > 1.0) {
            return Err(Error::InvalidInput("need pieces, plateaus of at least a decade and top > 1".into()));
        }
        let last = (top.log10() / plateau_decades).ceil() as usize + 1;
        let r: Vec<f64> = (0..=last).map(|k| 10f64.powf(plateau_decades * k as f64)).collect();
        let sigma: Vec<f64> = (0..=last).map(|k| k as f64 + 2.0).collect();
        let psi = PartitionOfUnity::new(r, sigma)?;
        let members = (0..=last).map(|k| pieces[k % pieces.len()].clone()).collect();
        Self::new(rho, psi, members, max_mode)
    }

    /// Like [`GluedMeasure::alternating`] with `r_k = 10^{d k}` but with
    /// transitions about `w` decades wide (`σ_k = 10^{w/2}(1 + k/100)`). Long
    /// transitions keep the intermediate limit functions close to convex
    /// mixes of the members, which matters when members carry atoms.
    pub fn alternating_with_transition(
        rho: f64,
        pieces: &[CircleMeasure],
        plateau_decades: f64,
        transition_decades: f64,
        top: f64,
        max_mode: u32,
    ) -> Result<Self> {
        if pieces.is_empty() || !(transition_decades > 0.0 && transition_decades < plateau_decades) || !(top > 1.0) {
            return Err(Error::InvalidInput("need pieces, 0 < transition < plateau decades and top > 1".into()));
        }
        let last = (top.log10() / plateau_decades).ceil() as usize + 1;
        let r: Vec<f64> = (0..=last).map(|k| 10f64.powf(plateau_decades * k as f64)).collect();
        let base = 10f64.powf(0.5 * transition_decades);
        let sigma: Vec<f64> = (0..=last).map(|k| base * (1.0 + 0.01 * k as f64)).collect();
        let psi = PartitionOfUnity::new(r, sigma)?;
        let members = (0..=last).map(|k| pieces[k % pieces.len()].clone()).collect();
        Self::new(rho, psi, members, max_mode)
    }

    /// Adds `Re(c̄ z^ρ)`-type harmonic term `r^ρ(a cos ρφ + b sin ρφ)` at
    /// integer order.
    pub fn with_harmonic(mut self, a: f64, b: f64) -> Result<Self> {
        if self.rho.fract() != 0.0 {
            return Err(Error::Domain("harmonic terms need integer order".into()));
        }
        self.harmonic = Complex64::new(a, b);
        Ok(self)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn genus(&self) -> u32 {
        self.p
    }

    pub fn partition(&self) -> &PartitionOfUnity {
        &self.psi
    }

    pub fn members(&self) -> &[CircleMeasure] {
        &self.members
    }

    /// `(1/2π) ∫ r^{ρ-1} ψ_k(r) a_m(t/r) dr`.
    fn radial_coefficient(&self, k: usize, m: u32, t: f64) -> f64 {
        let lt = t.ln();
        let (lo, hi) = self.psi.support(k);
        let (ylo, yhi) = (if lo > 0.0 { lo.ln() } else { f64::NEG_INFINITY }, hi.ln());
        let below = if m == 0 {
            self.rho
        } else if m <= self.p {
            self.rho - m as f64
        } else {
            self.rho + m as f64
        };
        let mut ranges = vec![((lt - 1.25 * TAIL / below).max(ylo), lt.min(yhi))];
        if m > self.p {
            ranges.push((lt.max(ylo), (lt + TAIL / (m as f64 - self.rho)).min(yhi)));
        }
        let mut marks = Vec::new();
        for j in [k, k + 1] {
            if j >= 1 && j < self.psi.len() {
                let (r, s) = (self.psi.radius(j).ln(), self.psi.sigma(j).ln());
                marks.push(r - s);
                marks.push(r + s);
            }
        }
        let nodes = gauss_legendre(16);
        let mut total = 0.0;
        for (a, b) in ranges {
            if !(b > a) {
                continue;
            }
            let mut cuts = vec![a];
            cuts.extend(marks.iter().copied().filter(|&x| x > a && x < b));
            cuts.push(b);
            for w in cuts.windows(2) {
                let n = ((w[1] - w[0]) / PIECE).ceil().max(1.0) as usize;
                let h = (w[1] - w[0]) / n as f64;
                for i in 0..n {
                    let (u, v) = (w[0] + i as f64 * h, w[0] + (i + 1) as f64 * h);
                    let (mid, half) = (0.5 * (u + v), 0.5 * (v - u));
                    for &(x, wt) in nodes {
                        let y = mid + half * x;
                        let r = y.exp();
                        let f = (self.rho * y).exp() * self.psi.psi(k, r) * circle_fourier_gp(m, t / r, self.p);
                        total += wt * half * f;
                    }
                }
            }
        }
        total / TAU
    }

    /// Cosine and sine coefficients of `φ ↦ u(t e^{iφ})` by mode.
    pub fn modes(&self, t: f64) -> Vec<(u32, f64, f64)> {
        let mut acc: Vec<(u32, f64, f64)> = Vec::new();
        for (k, _) in self.psi.weights_near(t, self.reach()) {
            for &(m, c) in &self.spectra[k] {
                let a = self.radial_coefficient(k, m, t);
                if a == 0.0 {
                    continue;
                }
                match acc.iter_mut().find(|e| e.0 == m) {
                    Some(e) => {
                        e.1 += a * c.re;
                        e.2 += a * c.im;
                    }
                    None => acc.push((m, a * c.re, a * c.im)),
                }
            }
        }
        if self.harmonic.norm() > 0.0 {
            let n = self.rho as u32;
            let w = t.powf(self.rho);
            match acc.iter_mut().find(|e| e.0 == n) {
                Some(e) => {
                    e.1 += w * self.harmonic.re;
                    e.2 += w * self.harmonic.im;
                }
                None => acc.push((n, w * self.harmonic.re, w * self.harmonic.im)),
            }
        }
        acc.sort_by_key(|e| e.0);
        acc
    }

    /// Largest log-distance at which a member still influences the
    /// potential.
    fn reach(&self) -> f64 {
        let slow_below = (self.rho - self.p as f64).min(self.rho).max(1e-3);
        let slow_above = (self.p as f64 + 1.0 - self.rho).max(1e-3);
        (1.25 * TAIL / slow_below).max(TAIL / slow_above)
    }

    fn eval_modes(modes: &[(u32, f64, f64)], phi: f64) -> f64 {
        modes.iter().map(|&(m, a, b)| a * (m as f64 * phi).cos() + b * (m as f64 * phi).sin()).sum()
    }

    /// Canonical potential of genus `[ρ]` at `z`.
    pub fn potential(&self, z: Complex64) -> f64 {
        Self::eval_modes(&self.modes(z.norm()), z.arg())
    }

    /// Potential with the mode table precomputed on `radii`.
    pub fn potential_on(&self, radii: &[f64]) -> SampledPotential<'_> {
        let mut table: Vec<(f64, Vec<(u32, f64, f64)>)> = radii.par_iter().map(|&r| (r, self.modes(r))).collect();
        table.sort_by(|a, b| a.0.total_cmp(&b.0));
        SampledPotential { measure: self, table }
    }

    /// Homogeneous indicator `h_k` of member `k` on an `n`-point grid.
    pub fn member_indicator(&self, k: usize, n: usize) -> Result<DirectionFunction> {
        crate::indicators::reconstruct_tcf(&self.members[k], self.rho).and_then(|h| {
            let harm = self.harmonic;
            let rho = self.rho;
            DirectionFunction::from_fn(rho, n, |phi| h.interp(phi) + harm.re * (rho * phi).cos() + harm.im * (rho * phi).sin())
        })
    }

    fn radial_mass(&self, k: usize, r0: f64, r1: f64) -> f64 {
        // Substitute u = r^ρ, so r^{ρ-1} dr = du/ρ.
        let (u0, u1) = (r0.powf(self.rho), r1.powf(self.rho));
        let (mid, half) = (0.5 * (u0 + u1), 0.5 * (u1 - u0));
        gauss_legendre(32)
            .iter()
            .map(|&(x, w)| {
                let u: f64 = mid + half * x;
                w * half * self.psi.psi(k, u.powf(1.0 / self.rho))
            })
            .sum::<f64>()
            / (self.rho * TAU)
    }
}

impl PartitionOfUnity {
    /// Members whose support comes within `reach` (in `log r`) of `t`.
    pub(crate) fn weights_near(&self, t: f64, reach: f64) -> Vec<(usize, f64)> {
        let lt = t.ln();
        (0..self.len())
            .filter(|&k| {
                let (lo, hi) = self.support(k);
                let a = if lo > 0.0 { lo.ln() } else { f64::NEG_INFINITY };
                a < lt + reach && hi.ln() > lt - reach
            })
            .map(|k| (k, 1.0))
            .collect()
    }
}

impl PolarMeasure for GluedMeasure {
    fn cell_mass(&self, r0: f64, r1: f64, th0: f64, th1: f64) -> f64 {
        (0..self.psi.len())
            .filter(|&k| {
                let (lo, hi) = self.psi.support(k);
                r1 > lo && r0 < hi
            })
            .map(|k| self.radial_mass(k, r0, r1) * arc_moments(&self.members[k], th0, th1).0)
            .sum()
    }

    fn cell_direction(&self, r0: f64, r1: f64, th0: f64, th1: f64) -> f64 {
        let (mut m, mut f) = (0.0, 0.0);
        for k in 0..self.psi.len() {
            let (lo, hi) = self.psi.support(k);
            if r1 > lo && r0 < hi {
                let w = self.radial_mass(k, r0, r1);
                let (a, b) = arc_moments(&self.members[k], th0, th1);
                m += w * a;
                f += w * b;
            }
        }
        if m > 0.0 {
            f / m
        } else {
            0.5 * (th0 + th1)
        }
    }

    fn weak_pairing(&self, g: TestBump, t: f64, scale: f64) -> f64 {
        let radial = |r: f64, k: usize| r.powf(self.rho - 1.0) * self.psi.psi(k, r) / TAU;
        let dens = g.pair_density(
            |r, phi| {
                (0..self.psi.len())
                    .map(|k| {
                        let s = &self.members[k];
                        radial(r, k) * s.density[s.cell_of(phi)]
                    })
                    .sum()
            },
            t,
            scale,
        );
        // Angular atoms sit on rays.
        let nodes = gauss_legendre(64);
        let ln2 = std::f64::consts::LN_2;
        let mut rays = 0.0;
        for (k, s) in self.members.iter().enumerate() {
            for &(phi, mass) in &s.atoms {
                for &(x, w) in nodes {
                    let r = (ln2 * x).exp();
                    let z = Complex64::from_polar(r, phi);
                    rays += ln2 * w * r * mass * radial(t * r, k) * t * g.eval(z);
                }
            }
        }
        dens + rays / scale
    }
}

/// [`GluedMeasure::potential`] with modes cached on a radius table.
pub struct SampledPotential<'a> {
    measure: &'a GluedMeasure,
    table: Vec<(f64, Vec<(u32, f64, f64)>)>,
}

impl PlaneField for SampledPotential<'_> {
    fn eval(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let i = self.table.partition_point(|e| e.0 < r * (1.0 - 1e-12));
        if let Some(e) = self.table.get(i) {
            if (e.0 - r).abs() <= 1e-12 * r {
                return GluedMeasure::eval_modes(&e.1, z.arg());
            }
        }
        self.measure.potential(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::log_grid;
    use crate::indicators::{indicator_pair_window, t_rho_measure};
    use crate::limits::crg_test_window;
    use crate::scale::ProximateOrder;

    fn cosine_piece(sign: f64) -> CircleMeasure {
        CircleMeasure::from_density_fn(256, move |p| 1.0 + sign * p.cos())
    }

    #[test]
    fn equal_members_give_homogeneous_potential() {
        for &rho in &[0.5, 1.5, 2.3] {
            let s = cosine_piece(1.0);
            let g = GluedMeasure::alternating(rho, &[s.clone()], 3.0, 1e9, 8).unwrap();
            for &t in &[10.0, 1e4, 3e7] {
                for j in 0..8 {
                    let phi = TAU * j as f64 / 8.0;
                    let got = g.potential(Complex64::from_polar(t, phi)) / t.powf(rho);
                    // The cell-averaged cos ψ has coefficient sinc(Δ/2).
                    let d = TAU / 256.0;
                    let c1 = (0.5 * d).sin() / (0.5 * d);
                    let want = 1.0 / (rho * rho) + c1 * phi.cos() / (rho * rho - 1.0);
                    assert!((got - want).abs() < 1e-7, "rho={rho} t={t} phi={phi}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn matches_direct_quadrature() {
        // Compare with brute force integration of G_p against the density.
        let rho = 0.5;
        let g = GluedMeasure::alternating(rho, &[cosine_piece(1.0), cosine_piece(-1.0)], 2.0, 1e6, 4).unwrap();
        let z = Complex64::from_polar(300.0, 0.7);
        let got = g.potential(z);
        let nodes = gauss_legendre(64);
        let mut want = 0.0;
        let (ya, yb) = (-70.0f64, 80.0f64);
        let pieces = 1500;
        let h = (yb - ya) / pieces as f64;
        for i in 0..pieces {
            let mid = ya + (i as f64 + 0.5) * h;
            for &(x, w) in nodes.iter().step_by(4) {
                let y = mid + 0.5 * h * x;
                let r = y.exp();
                let n_psi = 128;
                for j in 0..n_psi {
                    let psi_ang = TAU * (j as f64 + 0.5) / n_psi as f64;
                    let dens: f64 = (0..g.psi.len())
                        .map(|k| g.psi.psi(k, r) * g.members[k].density[g.members[k].cell_of(psi_ang)])
                        .sum();
                    let zeta = Complex64::from_polar(r, psi_ang);
                    want += 0.5 * h * w * 4.0 * r.powf(rho) * dens / TAU * crate::kernels::gp(z / zeta, 0) * TAU / n_psi as f64;
                }
            }
        }
        assert!((got - want).abs() < 2e-3 * want.abs().max(1.0), "{got} vs {want}");
    }

    #[test]
    fn two_indicator_limit_set() {
        let rho = 1.5;
        let pieces = [cosine_piece(1.0), cosine_piece(-1.0)];
        let g = GluedMeasure::alternating(rho, &pieces, 6.0, 1e24, 4).unwrap();
        let po = ProximateOrder::constant(rho).unwrap();
        let t_grid = log_grid(1.0, 1e24, 8);
        let u = g.potential_on(&t_grid);
        let h1 = reconstruct(&pieces[0], rho);
        let h2 = reconstruct(&pieces[1], rho);
        let pair = indicator_pair_window(&u, &po, &t_grid, 64, 12.0).unwrap();
        let scale = h1.scale().max(h2.scale());
        for i in 0..64 {
            let hi = h1.values()[i].max(h2.values()[i]);
            let lo = h1.values()[i].min(h2.values()[i]);
            assert!((pair.h.values()[i] - hi).abs() < 0.05 * scale);
            assert!((pair.h_lower.values()[i] - lo).abs() < 0.05 * scale);
        }
        let verdict = crg_test_window(&u, &po, &t_grid, 64, 0.05, 12.0).unwrap();
        assert!(!verdict.crg);
    }

    fn reconstruct(s: &CircleMeasure, rho: f64) -> DirectionFunction {
        let h = crate::indicators::reconstruct_tcf(s, rho).unwrap();
        DirectionFunction::from_fn(rho, 64, |p| h.interp(p)).unwrap()
    }

    #[test]
    fn integer_order_with_harmonic_part() {
        let h = DirectionFunction::from_fn(1.0, 256, |p| p.cos()).unwrap();
        let s = t_rho_measure(&h).unwrap();
        let g = GluedMeasure::alternating(1.0, &[s], 3.0, 1e6, 8).unwrap().with_harmonic(1.0, 0.0).unwrap();
        let z = Complex64::from_polar(1e4, 0.4);
        // The grid version of T_1 cos is O(Δ²), not zero.
        assert!((g.potential(z) / 1e4 - 0.4f64.cos()).abs() < 1e-3);
    }

    #[test]
    fn cell_masses_add_up() {
        let g = GluedMeasure::alternating(1.5, &[cosine_piece(1.0), cosine_piece(-1.0)], 2.0, 1e6, 4).unwrap();
        // Total mass in |z| < R is R^ρ/ρ.
        let r = 5e3;
        let total: f64 = (0..16).map(|i| g.cell_mass(0.0, r, TAU * i as f64 / 16.0, TAU * (i + 1) as f64 / 16.0)).sum();
        assert!((total - r.powf(1.5) / 1.5).abs() < 1e-8 * total);
    }
}
