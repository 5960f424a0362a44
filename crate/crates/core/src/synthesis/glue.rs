//! Pseudo-trajectories in the limit-set space and their realisation by a
//! single smooth field.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bump::bump_2d;
use crate::error::{Error, Result};
use crate::field::PlaneField;
use crate::quad::gauss_legendre;
use crate::scale::ProximateOrder;
use crate::synthesis::density::{max_density_function, MaxDensity};
use crate::synthesis::partition::PartitionOfUnity;

pub type SharedField = Arc<dyn PlaneField>;

/// `σ = max v(z)|z|^{-ρ}` over a polar grid covering `10^{-3} ≤ |z| ≤ 10^3`,
/// after checking `v(0) = 0`.
pub fn growth_bound(v: &dyn PlaneField, rho: f64) -> Result<f64> {
    let v0 = v.eval(Complex64::new(0.0, 0.0));
    if v0.abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("limit-set element must vanish at 0, got {v0}")));
    }
    let mut sigma: f64 = 0.0;
    for i in 0..=48 {
        let r = 10f64.powf(-3.0 + i as f64 / 8.0);
        for j in 0..64 {
            let z = Complex64::from_polar(r, TAU * j as f64 / 64.0);
            let val = v.eval(z);
            if val.is_nan() {
                return Err(Error::Numerical(format!("NaN at {z}")));
            }
            sigma = sigma.max(val / r.powf(rho));
        }
    }
    Ok(sigma)
}

/// `v(x|t) = Σ ψ_j(t) t^{-ρ} v_j(t x)`.
#[derive(Clone)]
pub struct PseudoTrajectory {
    terms: Vec<(f64, SharedField)>,
    t: f64,
    rho: f64,
    sigma: f64,
}

impl PseudoTrajectory {
    /// Largest growth bound among the members.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

impl PlaneField for PseudoTrajectory {
    fn eval(&self, z: Complex64) -> f64 {
        let w = self.t.powf(-self.rho);
        self.terms.iter().map(|(p, v)| p * v.eval(z * self.t) * w).sum()
    }
}

fn check_members(v_list: &[SharedField], psi: &PartitionOfUnity, rho: f64) -> Result<f64> {
    if v_list.len() != psi.len() {
        return Err(Error::InvalidInput(format!(
            "{} fields for a partition with {} members",
            v_list.len(),
            psi.len()
        )));
    }
    let mut sigma: f64 = 0.0;
    for v in v_list {
        sigma = sigma.max(growth_bound(v.as_ref(), rho)?);
    }
    Ok(sigma)
}

pub fn pseudo_trajectory(v_list: &[SharedField], psi: &PartitionOfUnity, t: f64, rho: f64) -> Result<PseudoTrajectory> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("t must be positive, got {t}")));
    }
    let sigma = check_members(v_list, psi, rho)?;
    let terms = psi.weights(t).into_iter().map(|(k, w)| (w, v_list[k].clone())).collect();
    Ok(PseudoTrajectory { terms, t, rho, sigma })
}

/// Unit-mass mollifier nodes on the unit disc: `(offset, weight)`.
fn mollifier_nodes() -> Vec<(Complex64, f64)> {
    let n_theta = 16;
    let mut out = Vec::new();
    for &(x, w) in gauss_legendre(16) {
        let s = 0.5 * (x + 1.0);
        let ws = 0.5 * w * s * bump_2d(s) * TAU / n_theta as f64;
        for j in 0..n_theta {
            let th = TAU * (j as f64 + 0.25 * (1.0 + x)) / n_theta as f64;
            out.push((Complex64::from_polar(s, th), ws));
        }
    }
    let total: f64 = out.iter().map(|p| p.1).sum();
    out.iter().map(|&(z, w)| (z, w / total)).collect()
}

/// `R_ε v(x) = ∫ α(w) v(x + ε|x| w) dA(w)`: averaging over a disc whose
/// radius is proportional to `|x|`, which commutes with `(·)_{[t]}`.
#[derive(Clone)]
pub struct Mollified {
    v: SharedField,
    eps: f64,
    nodes: Arc<Vec<(Complex64, f64)>>,
}

impl Mollified {
    pub fn new(v: SharedField, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::InvalidInput(format!("ε must lie in (0, 1/2), got {eps}")));
        }
        Ok(Mollified { v, eps, nodes: Arc::new(mollifier_nodes()) })
    }
}

impl PlaneField for Mollified {
    fn eval(&self, z: Complex64) -> f64 {
        let rad = self.eps * z.norm();
        if rad == 0.0 {
            return self.v.eval(z);
        }
        self.nodes.iter().map(|&(w, c)| c * self.v.eval(z + w * rad)).sum()
    }
}

/// `ε_j = (γ_j/γ_0)^{1/4} / 4`, so that `γ_j ε_j^{-2} ∝ γ_j^{1/2}` decays.
pub fn default_eps(psi: &PartitionOfUnity) -> Vec<f64> {
    let g = psi.gammas();
    g.iter().map(|v| 0.25 * (v / g[0]).powf(0.25)).collect()
}

/// Verification grid for the discrete Laplacian: log-polar with equal steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplacianGrid {
    pub r_in: f64,
    pub r_out: f64,
    pub n_phi: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaplacianReport {
    /// `min Δu · r^{2-ρ(r)}` over interior grid nodes.
    pub min_margin: f64,
    pub worst_r: f64,
    pub worst_phi: f64,
    /// Number of times the density term was doubled.
    pub repairs: u32,
}

/// `u(x) = Σ ψ_j(|x|) R_{ε_j} v_j(x) |x|^{ρ(|x|)-ρ} + Φ(x)`.
#[derive(Clone)]
pub struct GluedField {
    members: Vec<Mollified>,
    psi: PartitionOfUnity,
    po: ProximateOrder,
    phi: Option<MaxDensity>,
}

impl GluedField {
    fn base(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let l = self.po.l(r);
        self.psi
            .weights(r)
            .into_iter()
            .map(|(k, w)| w * self.members[k].eval(z) * l)
            .sum()
    }

    pub fn density_term(&self) -> Option<&MaxDensity> {
        self.phi.as_ref()
    }
}

impl PlaneField for GluedField {
    fn eval(&self, z: Complex64) -> f64 {
        self.base(z) + self.phi.as_ref().map_or(0.0, |p| p.eval(z))
    }
}

struct Sampled {
    ls: Vec<f64>,
    hl: f64,
    hp: f64,
    values: Vec<Vec<f64>>,
}

fn sample(u: &(dyn Fn(Complex64) -> f64 + Sync), grid: &LaplacianGrid) -> Sampled {
    let hp = TAU / grid.n_phi as f64;
    let (l0, l1) = (grid.r_in.ln(), grid.r_out.ln());
    let n_l = ((l1 - l0) / hp).ceil() as usize;
    let hl = (l1 - l0) / n_l as f64;
    let ls: Vec<f64> = (0..=n_l).map(|i| l0 + hl * i as f64).collect();
    let values = ls
        .par_iter()
        .map(|&l| (0..grid.n_phi).map(|j| u(Complex64::from_polar(l.exp(), hp * j as f64))).collect())
        .collect();
    Sampled { ls, hl, hp, values }
}

/// `Δu · r^{2-ρ(r)}` at interior nodes, row by row.
fn scaled_laplacian(s: &Sampled, po: &ProximateOrder) -> Vec<Vec<f64>> {
    let n_phi = s.values[0].len();
    (1..s.ls.len() - 1)
        .map(|i| {
            let l = s.ls[i];
            let w = (-l * po.at_log(l)).exp();
            (0..n_phi)
                .map(|j| {
                    let u = &s.values;
                    let c = u[i][j];
                    let dl = (u[i + 1][j] - 2.0 * c + u[i - 1][j]) / (s.hl * s.hl);
                    let dp = (u[i][(j + 1) % n_phi] - 2.0 * c + u[i][(j + n_phi - 1) % n_phi]) / (s.hp * s.hp);
                    (dl + dp) * w
                })
                .collect()
        })
        .collect()
}

/// Glues the members into one field and adds the smallest admissible
/// density term from [`max_density_function`] so that the discrete
/// Laplacian is nonnegative on `grid`.
pub fn glue_asymptotic(
    v_list: &[SharedField],
    psi: &PartitionOfUnity,
    eps: &[f64],
    po: &ProximateOrder,
    grid: &LaplacianGrid,
) -> Result<(GluedField, LaplacianReport)> {
    let rho = po.rho();
    let sigma = check_members(v_list, psi, rho)?;
    if eps.len() != v_list.len() {
        return Err(Error::InvalidInput("one ε per member required".into()));
    }
    let gam = psi.gammas();
    for j in 1..eps.len() {
        if eps[j] > eps[j - 1] {
            return Err(Error::InvalidInput(format!("ε must be nonincreasing (index {j})")));
        }
        if gam[j] / (eps[j] * eps[j]) > gam[j - 1] / (eps[j - 1] * eps[j - 1]) * (1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!("γ_j ε_j^(-2) must not grow (index {j})")));
        }
    }
    if !(grid.r_in > 1.0 && grid.r_out > 10.0 * grid.r_in && grid.n_phi >= 16) {
        return Err(Error::InvalidInput("verification grid needs 1 < r_in, r_out > 10 r_in, n_phi ≥ 16".into()));
    }
    let members = v_list.iter().zip(eps).map(|(v, &e)| Mollified::new(v.clone(), e)).collect::<Result<Vec<_>>>()?;
    let mut glued = GluedField { members, psi: psi.clone(), po: po.clone(), phi: None };

    let base = sample(&|z| glued.base(z), grid);
    let lap = scaled_laplacian(&base, po);
    // Deficit per radius, turned into a nonincreasing positive profile.
    let mut deficit: Vec<f64> = lap.iter().map(|row| row.iter().fold(0.0f64, |m, &v| m.max(-v))).collect();
    for i in (0..deficit.len().saturating_sub(1)).rev() {
        deficit[i] = deficit[i].max(deficit[i + 1]);
    }
    let floor = 1e-3 * sigma.max(1e-300);
    let radii: Vec<f64> = base.ls[1..base.ls.len() - 1].iter().map(|l| l.exp()).collect();
    let profile = move |r: f64| {
        let idx = radii.partition_point(|&x| x < r).min(deficit.len() - 1);
        deficit[idx] + floor / r.ln()
    };
    let phi = max_density_function(profile, po, grid.r_in, grid.r_out * 10.0)?;

    let phi_sampled = sample(&|z| phi.eval(z), grid);
    let phi_lap = scaled_laplacian(&phi_sampled, po);
    let mut factor = 1.0;
    for repairs in 0..=30u32 {
        let mut worst = (f64::INFINITY, 0usize, 0usize);
        for (i, (a, b)) in lap.iter().zip(&phi_lap).enumerate() {
            for (j, (x, y)) in a.iter().zip(b).enumerate() {
                let m = x + factor * y;
                if m < worst.0 {
                    worst = (m, i, j);
                }
            }
        }
        let report = LaplacianReport {
            min_margin: worst.0,
            worst_r: base.ls[worst.1 + 1].exp(),
            worst_phi: base.hp * worst.2 as f64,
            repairs,
        };
        if worst.0 >= 0.0 {
            glued.phi = Some(phi.scaled(factor));
            return Ok((glued, report));
        }
        if repairs == 30 {
            return Err(Error::Infeasible(format!(
                "Laplacian repair failed: margin {:e} at r = {:e}, φ = {:.4}",
                report.min_margin, report.worst_r, report.worst_phi
            )));
        }
        factor *= 2.0;
    }
    unreachable!()
}
