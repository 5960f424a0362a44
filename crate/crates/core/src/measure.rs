//! Finite weighted point sets in the plane.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub re: f64,
    pub im: f64,
    pub mass: f64,
}

impl Atom {
    pub fn new(z: Complex64, mass: f64) -> Self {
        Atom { re: z.re, im: z.im, mass }
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// A finite measure `Σ m_j δ_{z_j}` with nonnegative masses.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MassDistribution {
    atoms: Vec<Atom>,
}

impl MassDistribution {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            if !(a.re.is_finite() && a.im.is_finite() && a.mass.is_finite()) {
                return Err(Error::InvalidInput(format!("atom {i} is not finite")));
            }
            if a.mass < 0.0 {
                return Err(Error::InvalidInput(format!("atom {i} has negative mass {}", a.mass)));
            }
        }
        Ok(MassDistribution { atoms })
    }

    pub fn empty() -> Self {
        MassDistribution::default()
    }

    pub fn from_points<I: IntoIterator<Item = (Complex64, f64)>>(points: I) -> Result<Self> {
        Self::new(points.into_iter().map(|(z, m)| Atom::new(z, m)).collect())
    }

    /// Unit masses at the given points.
    pub fn unit_masses<I: IntoIterator<Item = Complex64>>(points: I) -> Result<Self> {
        Self::from_points(points.into_iter().map(|z| (z, 1.0)))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn has_origin_atom(&self) -> bool {
        self.atoms.iter().any(|a| a.re == 0.0 && a.im == 0.0 && a.mass > 0.0)
    }

    pub fn ensure_no_origin(&self) -> Result<()> {
        if self.has_origin_atom() {
            Err(Error::AtomAtOrigin)
        } else {
            Ok(())
        }
    }

    /// `n(r)`: mass in the closed disc of radius `r`.
    pub fn counting(&self, r: f64) -> f64 {
        self.atoms.iter().filter(|a| a.modulus() <= r).map(|a| a.mass).sum()
    }

    /// Mass in `{|z| ≤ r, arg z ∈ [alpha, beta)}` with the angle interval
    /// taken modulo 2π (a span of 2π or more means the whole disc).
    pub fn sector_mass(&self, r: f64, alpha: f64, beta: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.modulus() <= r && angle_in(a.im.atan2(a.re), alpha, beta))
            .map(|a| a.mass)
            .sum()
    }

    pub fn min_modulus(&self) -> Option<f64> {
        self.atoms.iter().filter(|a| a.mass > 0.0).map(|a| a.modulus()).min_by(f64::total_cmp)
    }

    pub fn max_modulus(&self) -> Option<f64> {
        self.atoms.iter().filter(|a| a.mass > 0.0).map(|a| a.modulus()).max_by(f64::total_cmp)
    }

    /// Atoms of positive mass sorted by modulus, as `(|z|, mass)`.
    pub fn radial_profile(&self) -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> = self
            .atoms
            .iter()
            .filter(|a| a.mass > 0.0)
            .map(|a| (a.modulus(), a.mass))
            .collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: MassDistribution =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("mass distribution: {e}")))?;
        Self::new(raw.atoms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("atoms serialize")
    }
}

/// Whether angle `t` lies in `[alpha, beta)` modulo 2π.
pub fn angle_in(t: f64, alpha: f64, beta: f64) -> bool {
    let span = beta - alpha;
    if span >= TAU {
        return true;
    }
    span > 0.0 && (t - alpha).rem_euclid(TAU) < span
}
