//! Replacement of a mass distribution by an integer one (a zero set) that
//! has the same asymptotics.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::direction::CircleMeasure;
use crate::error::{Error, Result};
use crate::measure::{Atom, MassDistribution};
use crate::synthesis::weak::TestBump;

/// Access to a measure through polar cells
/// `{r0 ≤ |z| < r1, θ0 ≤ arg z < θ1}` with `0 ≤ θ0 < θ1 ≤ 2π`.
pub trait PolarMeasure: Sync {
    fn cell_mass(&self, r0: f64, r1: f64, th0: f64, th1: f64) -> f64;

    /// Mass-weighted mean direction of a cell.
    fn cell_direction(&self, _r0: f64, _r1: f64, th0: f64, th1: f64) -> f64 {
        0.5 * (th0 + th1)
    }

    /// `⟨μ_t, g⟩` with `μ_t(E) = μ(tE)/scale`.
    fn weak_pairing(&self, g: TestBump, t: f64, scale: f64) -> f64;
}

fn arg_pos(z: Complex64) -> f64 {
    z.arg().rem_euclid(TAU)
}

/// Atoms sorted by modulus for fast cell queries.
#[derive(Debug, Clone)]
pub struct AtomIndex {
    mu: MassDistribution,
    sorted: Vec<(f64, f64, f64)>,
}

impl AtomIndex {
    pub fn new(mu: &MassDistribution) -> Self {
        let mut sorted: Vec<(f64, f64, f64)> = mu.atoms().iter().map(|a| (a.modulus(), arg_pos(a.z()), a.mass)).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        AtomIndex { mu: mu.clone(), sorted }
    }

    fn in_cell(&self, r0: f64, r1: f64, th0: f64, th1: f64) -> impl Iterator<Item = &(f64, f64, f64)> {
        let lo = self.sorted.partition_point(|a| a.0 < r0);
        let hi = self.sorted.partition_point(|a| a.0 < r1);
        self.sorted[lo..hi].iter().filter(move |a| a.1 >= th0 && a.1 < th1)
    }
}

impl PolarMeasure for AtomIndex {
    fn cell_mass(&self, r0: f64, r1: f64, th0: f64, th1: f64) -> f64 {
        self.in_cell(r0, r1, th0, th1).map(|a| a.2).sum()
    }

    fn cell_direction(&self, r0: f64, r1: f64, th0: f64, th1: f64) -> f64 {
        let (m, s) = self.in_cell(r0, r1, th0, th1).fold((0.0, 0.0), |acc, a| (acc.0 + a.2, acc.1 + a.2 * a.1));
        if m > 0.0 {
            s / m
        } else {
            0.5 * (th0 + th1)
        }
    }

    fn weak_pairing(&self, g: TestBump, t: f64, scale: f64) -> f64 {
        g.pair_atoms(&self.mu, t, scale)
    }
}

/// Rotation-invariant measure given by its counting function `n(r)` and
/// derivative `n'(r)`.
pub struct RadialMeasure<N, D> {
    pub counting: N,
    pub derivative: D,
}

impl<N: Fn(f64) -> f64 + Sync, D: Fn(f64) -> f64 + Sync> PolarMeasure for RadialMeasure<N, D> {
    fn cell_mass(&self, r0: f64, r1: f64, th0: f64, th1: f64) -> f64 {
        ((self.counting)(r1) - (self.counting)(r0)) * (th1 - th0) / TAU
    }

    fn weak_pairing(&self, g: TestBump, t: f64, scale: f64) -> f64 {
        g.pair_density(|r, _| (self.derivative)(r) / TAU, t, scale)
    }
}

/// `μ₁ + μ₂`.
pub struct SumMeasure<'a>(pub &'a dyn PolarMeasure, pub &'a dyn PolarMeasure);

impl PolarMeasure for SumMeasure<'_> {
    fn cell_mass(&self, r0: f64, r1: f64, th0: f64, th1: f64) -> f64 {
        self.0.cell_mass(r0, r1, th0, th1) + self.1.cell_mass(r0, r1, th0, th1)
    }

    fn cell_direction(&self, r0: f64, r1: f64, th0: f64, th1: f64) -> f64 {
        let (a, b) = (self.0.cell_mass(r0, r1, th0, th1), self.1.cell_mass(r0, r1, th0, th1));
        if a + b > 0.0 {
            (a * self.0.cell_direction(r0, r1, th0, th1) + b * self.1.cell_direction(r0, r1, th0, th1)) / (a + b)
        } else {
            0.5 * (th0 + th1)
        }
    }

    fn weak_pairing(&self, g: TestBump, t: f64, scale: f64) -> f64 {
        self.0.weak_pairing(g, t, scale) + self.1.weak_pairing(g, t, scale)
    }
}

/// Mass of `s` on the arc `[θ0, θ1)`, cell densities prorated.
pub fn arc_mass(s: &CircleMeasure, th0: f64, th1: f64) -> f64 {
    arc_moments(s, th0, th1).0
}

/// Mass and first angular moment of `s` on `[θ0, θ1) ⊂ [0, 2π]`.
pub fn arc_moments(s: &CircleMeasure, th0: f64, th1: f64) -> (f64, f64) {
    let n = s.cells();
    let d = s.step();
    let mut m = 0.0;
    let mut first = 0.0;
    for &(phi, mass) in &s.atoms {
        let p = phi.rem_euclid(TAU);
        if p >= th0 && p < th1 {
            m += mass;
            first += mass * p;
        }
    }
    // Cell i covers [c - d/2, c + d/2); shift by multiples of 2π to meet the arc.
    for (i, &v) in s.density.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let c = TAU * i as f64 / n as f64;
        for shift in [-TAU, 0.0, TAU] {
            let a = (c - 0.5 * d + shift).max(th0);
            let b = (c + 0.5 * d + shift).min(th1);
            if b > a {
                m += v * (b - a);
                first += v * 0.5 * (b * b - a * a);
            }
        }
    }
    (m, first)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rounding {
    /// `n = ⌊μ(K) + carry⌋`, the fractional part carried to the next cell.
    Carry,
    /// `n = ⌊μ(K)⌋` independently per cell.
    Floor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellRecord {
    pub r0: f64,
    pub r1: f64,
    pub th0: f64,
    pub th1: f64,
    pub mass: f64,
    pub count: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Discretization {
    pub zeros: MassDistribution,
    pub cells: Vec<CellRecord>,
    /// Annulus radii `R_1 < R_2 < …` that were used.
    pub annuli: Vec<f64>,
}

impl Discretization {
    /// `Σ (μ(K) - n(K))` over cells inside `|z| < R`.
    pub fn defect_within(&self, r: f64) -> f64 {
        self.cells.iter().filter(|c| c.r1 <= r).map(|c| c.mass - c.count as f64).sum()
    }

    /// `max |μ(K) - n(K)|` over all cells.
    pub fn max_cell_defect(&self) -> f64 {
        self.cells.iter().map(|c| (c.mass - c.count as f64).abs()).fold(0.0, f64::max)
    }
}

/// `κ = min(ρ - [ρ], [ρ] + 1 - ρ)`.
pub fn kappa(rho: f64) -> f64 {
    let f = rho - rho.floor();
    f.min(1.0 - f)
}

/// Cell layout: the disc `|z| < R_1`, then annuli `R_{j+1} = R_j (j+1)^{4/κ}`
/// split into rings of ratio `(1+δ_j)/(1-δ_j)` and sectors of width
/// `δ_j = 1/(j+2)`.
fn layout(rho: f64, r1: f64, r_max: f64) -> Result<(Vec<f64>, Vec<(f64, f64, f64)>)> {
    let k = kappa(rho);
    if !(k > 1e-9) {
        return Err(Error::Unsupported(format!("discretization needs non-integer order, got {rho}")));
    }
    let mut annuli = vec![r1];
    let mut rings = vec![(0.0, r1, 0.5)];
    let mut j = 1usize;
    while annuli[j - 1] < r_max {
        let lo = annuli[j - 1];
        let hi = lo * ((j + 1) as f64).powf(4.0 / k);
        let delta = 1.0 / (j as f64 + 2.0);
        let q = (1.0 + delta) / (1.0 - delta);
        let n = ((hi / lo).ln() / q.ln()).floor() as usize;
        let mut a = lo;
        for i in 1..=n {
            let b = lo * q.powi(i as i32);
            rings.push((a, b, delta));
            a = b;
            if a >= r_max {
                break;
            }
        }
        if a < hi && a < r_max {
            rings.push((a, hi, delta));
        }
        annuli.push(hi);
        j += 1;
    }
    Ok((annuli, rings))
}

fn sectors(delta: f64) -> Vec<(f64, f64)> {
    let k = (TAU / delta).floor() as usize;
    let mut out: Vec<(f64, f64)> = (0..k).map(|i| (i as f64 * delta, (i + 1) as f64 * delta)).collect();
    if out.last().map_or(0.0, |s| s.1) < TAU - 1e-12 {
        out.push((k as f64 * delta, TAU));
    } else if let Some(last) = out.last_mut() {
        last.1 = TAU;
    }
    out
}

/// Discretizes `mu` over `|z| < r_max` (the last ring may overshoot).
pub fn discretize_measure(mu: &dyn PolarMeasure, rho: f64, r_max: f64, rounding: Rounding) -> Result<Discretization> {
    if !(r_max > 1.0 && r_max.is_finite()) {
        return Err(Error::InvalidInput(format!("radius bound must exceed 1, got {r_max}")));
    }
    let (annuli, rings) = layout(rho, 1.0, r_max)?;
    let mut cells = Vec::new();
    let mut atoms = Vec::new();
    let mut carry = 0.0;
    for &(r0, r1, delta) in &rings {
        let mid = if r0 == 0.0 { 0.5 * r1 } else { (r0 * r1).sqrt() };
        for (th0, th1) in sectors(delta) {
            let mass = mu.cell_mass(r0, r1, th0, th1);
            if mass < 0.0 {
                return Err(Error::InvalidInput(format!("negative cell mass {mass}")));
            }
            let count = match rounding {
                Rounding::Carry => {
                    let total = carry + mass;
                    let n = (total + 1e-9).floor().max(0.0);
                    carry = (total - n).max(0.0);
                    n
                }
                Rounding::Floor => (mass + 1e-9).floor(),
            };
            if count > 0.0 {
                let dir = mu.cell_direction(r0, r1, th0, th1);
                atoms.push(Atom::new(Complex64::from_polar(mid, dir), count));
            }
            cells.push(CellRecord { r0, r1, th0, th1, mass, count: count as u64 });
        }
    }
    Ok(Discretization { zeros: MassDistribution::new(atoms)?, cells, annuli })
}

/// Discretizes an atomic distribution; every atom is covered.
pub fn discretize_zeros(mu: &MassDistribution, rho: f64, rounding: Rounding) -> Result<Discretization> {
    mu.ensure_no_origin()?;
    let r_max = mu.max_modulus().unwrap_or(1.0).max(1.0) * (1.0 + 1e-9) + 1e-9;
    discretize_measure(&AtomIndex::new(mu), rho, r_max.max(1.0 + 1e-6), rounding)
}
