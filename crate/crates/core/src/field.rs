//! Deterministic evaluation of scalar fields on polar grids.

use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

/// A real field on the plane. `-inf` is a legal value (zeros of the
/// underlying analytic function).
pub trait PlaneField: Send + Sync {
    fn eval(&self, z: Complex64) -> f64;
}

impl<F: Fn(Complex64) -> f64 + Send + Sync> PlaneField for F {
    fn eval(&self, z: Complex64) -> f64 {
        self(z)
    }
}

impl PlaneField for Box<dyn PlaneField> {
    fn eval(&self, z: Complex64) -> f64 {
        (**self).eval(z)
    }
}

impl PlaneField for std::sync::Arc<dyn PlaneField> {
    fn eval(&self, z: Complex64) -> f64 {
        (**self).eval(z)
    }
}

/// `per_decade` log-uniform points per decade from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = ((decades * per_decade as f64).round() as usize).max(1);
    (0..=n).map(|i| lo * (hi / lo).powf(i as f64 / n as f64)).collect()
}

/// Uniform angles `2πi/n`.
pub fn angle_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64).collect()
}

/// Samples `u(r e^{iφ})` for every radius (rows) and angle (columns).
/// Rows are computed in parallel and returned in input order.
pub fn sample_polar<U: PlaneField + ?Sized>(u: &U, radii: &[f64], n_phi: usize) -> Vec<Vec<f64>> {
    let angles = angle_grid(n_phi);
    radii
        .par_iter()
        .map(|&r| angles.iter().map(|&p| u.eval(Complex64::from_polar(r, p))).collect())
        .collect()
}

/// Writes `t,phi,value` rows with a header.
pub fn write_polar_csv<W: Write>(out: W, radii: &[f64], n_phi: usize, values: &[Vec<f64>]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "phi", "value"])?;
    for (r, row) in radii.iter().zip(values) {
        for (j, v) in row.iter().enumerate() {
            w.write_record([format!("{r:.17e}"), format!("{:.17e}", TAU * j as f64 / n_phi as f64), format!("{v:.17e}")])?;
        }
    }
    w.flush()?;
    Ok(())
}
