//! Sampled functions of direction and measures on the unit circle.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 2π-periodic function sampled at `φ_i = 2πi/n`, `n` a power of two.
/// Values are finite or `-inf` (an explicit marker for directions where the
/// underlying quantity is unbounded below).
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionFunction {
    rho: f64,
    values: Vec<f64>,
}

impl DirectionFunction {
    /// Smallest accepted grid. The default working grid is 256 points; the
    /// coarse sizes exist for brute-force comparisons.
    pub const MIN_GRID: usize = 16;
    pub const DEFAULT_GRID: usize = 256;

    pub fn new(rho: f64, values: Vec<f64>) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidInput(format!("rho must be positive, got {rho}")));
        }
        let n = values.len();
        if n < Self::MIN_GRID || !n.is_power_of_two() {
            return Err(Error::InvalidInput(format!("direction grid size {n} is not a power of two >= 16")));
        }
        if values.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::InvalidInput("direction values must be finite or -inf".into()));
        }
        Ok(DirectionFunction { rho, values })
    }

    pub fn from_fn<F: FnMut(f64) -> f64>(rho: f64, n: usize, mut f: F) -> Result<Self> {
        let values = (0..n).map(|i| f(TAU * i as f64 / n as f64)).collect();
        Self::new(rho, values)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> f64 {
        TAU / self.values.len() as f64
    }

    pub fn phi(&self, i: usize) -> f64 {
        TAU * i as f64 / self.values.len() as f64
    }

    /// Value at grid index `i` taken modulo the grid size.
    pub fn at(&self, i: isize) -> f64 {
        let n = self.values.len() as isize;
        self.values[i.rem_euclid(n) as usize]
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(rho, self.values.clone())
    }

    pub fn has_neg_inf(&self) -> bool {
        self.values.iter().any(|v| *v == f64::NEG_INFINITY)
    }

    /// Largest absolute finite value, or 1 when that is zero.
    pub fn scale(&self) -> f64 {
        let s = self.values.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Periodic linear interpolation.
    pub fn interp(&self, phi: f64) -> f64 {
        let n = self.values.len();
        let x = phi.rem_euclid(TAU) / self.step();
        let i = (x.floor() as usize).min(n - 1);
        let w = x - i as f64;
        let (a, b) = (self.values[i], self.values[(i + 1) % n]);
        if w == 0.0 {
            a
        } else {
            (1.0 - w) * a + w * b
        }
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &Self, f: F) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::InvalidInput("direction grids differ in size".into()));
        }
        Self::new(self.rho, self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect())
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        Self::new(self.rho, self.values.iter().map(|v| f(*v)).collect())
    }

    /// Sup-norm distance over grid points where both values are finite.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `phi,value` CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["phi", "value"]).expect("in-memory write");
        for (i, v) in self.values.iter().enumerate() {
            w.write_record([format!("{:.17e}", self.phi(i)), format!("{v:.17e}")]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    /// Reads `phi,value` CSV; rows must sit on the uniform grid in order.
    pub fn from_csv(rho: f64, text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let mut values = Vec::new();
        let mut phis = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| Error::InvalidInput(format!("direction csv: {e}")))?;
            let parse = |k: usize| -> Result<f64> {
                rec.get(k)
                    .ok_or_else(|| Error::InvalidInput("direction csv: missing column".into()))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidInput(format!("direction csv: {e}")))
            };
            phis.push(parse(0)?);
            values.push(parse(1)?);
        }
        let n = values.len();
        for (i, p) in phis.iter().enumerate() {
            if (p - TAU * i as f64 / n as f64).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!("direction csv: row {i} is off the uniform grid")));
            }
        }
        Self::new(rho, values)
    }
}

/// A signed measure on the unit circle: point atoms `(angle, mass)` plus a
/// density that is constant on each cell of the uniform grid (cell `i` is
/// centred at `2πi/n`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleMeasure {
    pub atoms: Vec<(f64, f64)>,
    pub density: Vec<f64>,
}

impl CircleMeasure {
    pub fn uniform(n: usize, value: f64) -> Self {
        CircleMeasure { atoms: Vec::new(), density: vec![value; n] }
    }

    pub fn single_atom(n: usize, phi: f64, mass: f64) -> Self {
        CircleMeasure { atoms: vec![(phi, mass)], density: vec![0.0; n] }
    }

    pub fn from_density_fn<F: Fn(f64) -> f64>(n: usize, f: F) -> Self {
        CircleMeasure { atoms: Vec::new(), density: (0..n).map(|i| f(TAU * i as f64 / n as f64)).collect() }
    }

    pub fn cells(&self) -> usize {
        self.density.len()
    }

    pub fn step(&self) -> f64 {
        TAU / self.density.len() as f64
    }

    /// Index of the cell containing angle `phi`.
    pub fn cell_of(&self, phi: f64) -> usize {
        let n = self.density.len();
        ((phi.rem_euclid(TAU) / self.step()).round() as usize) % n
    }

    /// Mass of each cell, atoms included.
    pub fn cell_masses(&self) -> Vec<f64> {
        let d = self.step();
        let mut m: Vec<f64> = self.density.iter().map(|v| v * d).collect();
        for &(phi, mass) in &self.atoms {
            let i = self.cell_of(phi);
            m[i] += mass;
        }
        m
    }

    pub fn total_mass(&self) -> f64 {
        self.cell_masses().iter().sum()
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.1.abs()).sum::<f64>() + self.density.iter().map(|v| v.abs() * self.step()).sum::<f64>()
    }

    pub fn is_nonnegative(&self, tol: f64) -> bool {
        self.atoms.iter().all(|a| a.1 >= -tol) && self.density.iter().all(|v| *v >= -tol)
    }

    /// Total-variation distance measured on cell masses.
    pub fn tv_distance(&self, other: &Self) -> Result<f64> {
        if self.cells() != other.cells() {
            return Err(Error::InvalidInput("circle measures on different grids".into()));
        }
        Ok(self.cell_masses().iter().zip(other.cell_masses()).map(|(a, b)| (a - b).abs()).sum())
    }

    /// `∫ e^{ikψ} ds(ψ)` with each cell's density integrated exactly.
    pub fn fourier(&self, k: f64) -> num_complex::Complex64 {
        use num_complex::Complex64;
        let d = self.step();
        let mut acc = Complex64::new(0.0, 0.0);
        for &(phi, mass) in &self.atoms {
            acc += mass * Complex64::from_polar(1.0, k * phi);
        }
        for (i, v) in self.density.iter().enumerate() {
            let c = TAU * i as f64 / self.density.len() as f64;
            let w = if k == 0.0 { d } else { 2.0 * (0.5 * k * d).sin() / k };
            acc += v * w * Complex64::from_polar(1.0, k * c);
        }
        acc
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("circle measure: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circle measure serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(DirectionFunction::new(1.0, vec![0.0; 100]).is_err());
        assert!(DirectionFunction::new(1.0, vec![0.0; 8]).is_err());
        assert!(DirectionFunction::new(0.0, vec![0.0; 16]).is_err());
        assert!(DirectionFunction::new(1.0, vec![f64::NAN; 16]).is_err());
        assert!(DirectionFunction::new(1.0, vec![f64::NEG_INFINITY; 16]).is_ok());
    }

    #[test]
    fn csv_roundtrip() {
        let h = DirectionFunction::from_fn(0.5, 64, |p| p.cos()).unwrap();
        let back = DirectionFunction::from_csv(0.5, &h.to_csv()).unwrap();
        assert_eq!(h, back);
        assert!(h.to_csv().starts_with("phi,value\n"));
    }

    #[test]
    fn interpolation_is_periodic() {
        let h = DirectionFunction::from_fn(1.0, 256, |p| p.sin()).unwrap();
        assert!((h.interp(TAU + 1.0) - 1f64.sin()).abs() < 1e-4);
        assert!((h.interp(-0.5) - (-0.5f64).sin()).abs() < 1e-4);
    }

    #[test]
    fn circle_measure_masses() {
        let mut s = CircleMeasure::uniform(64, 2.0);
        s.atoms.push((0.0, 1.5));
        assert!((s.total_mass() - (2.0 * TAU + 1.5)).abs() < 1e-12);
        let f0 = s.fourier(0.0);
        assert!((f0.re - s.total_mass()).abs() < 1e-12);
        let f1 = CircleMeasure::uniform(64, 1.0).fourier(1.0);
        assert!(f1.norm() < 1e-12);
        let json = s.to_json();
        assert_eq!(CircleMeasure::from_json(&json).unwrap(), s);
    }
}
