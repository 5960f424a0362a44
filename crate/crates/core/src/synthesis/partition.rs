//! Smooth partitions of unity subordinate to a lacunary radial sequence.

use serde::Serialize;

use crate::bump::{smooth_step, smooth_step_d1, smooth_step_d1_max, smooth_step_d2, smooth_step_d2_max};
use crate::error::{Error, Result};

/// Functions `ψ_0, …, ψ_K` of `r > 0` with `Σ ψ_k = 1`.
///
/// `ψ_0 = 1 - β_1`, `ψ_k = β_k - β_{k+1}` and `ψ_K = β_K`, where `β_k` rises
/// from 0 at `r_k/σ_k` to 1 at `r_k σ_k` along the smooth step in `log r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionOfUnity {
    log_r: Vec<f64>,
    log_sigma: Vec<f64>,
}

impl PartitionOfUnity {
    pub fn new(r: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        if r.len() < 2 || r.len() != sigma.len() {
            return Err(Error::InvalidInput("need at least two radii and one σ per radius".into()));
        }
        if r[0] != 1.0 {
            return Err(Error::InvalidInput(format!("r_0 must be 1, got {}", r[0])));
        }
        for k in 1..r.len() {
            if !(r[k].is_finite() && sigma[k].is_finite() && sigma[k] > 1.0) {
                return Err(Error::InvalidInput(format!("index {k}: need finite r_k and σ_k > 1")));
            }
            if k >= 2 && sigma[k] <= sigma[k - 1] {
                return Err(Error::InvalidInput(format!("index {k}: σ must increase")));
            }
            let lower = if k == 1 { r[0] } else { r[k - 1] * sigma[k - 1] };
            if !(lower < r[k] / sigma[k]) {
                return Err(Error::InvalidInput(format!(
                    "index {k}: r_{{k-1}}σ_{{k-1}} < r_k/σ_k fails ({lower} vs {})",
                    r[k] / sigma[k]
                )));
            }
        }
        Ok(PartitionOfUnity {
            log_r: r.iter().map(|v| v.ln()).collect(),
            log_sigma: sigma.iter().map(|v| v.ln()).collect(),
        })
    }

    /// `r_k = e^{k²}`, `σ_k = k + 1` for `k = 0..=last`.
    pub fn standard(last: usize) -> Self {
        let r = (0..=last).map(|k| ((k * k) as f64).exp()).collect();
        let sigma = (0..=last).map(|k| k as f64 + 1.0).collect();
        Self::new(r, sigma).expect("standard sequence is admissible")
    }

    /// Number of functions in the family.
    pub fn len(&self) -> usize {
        self.log_r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_r.is_empty()
    }

    pub fn radius(&self, k: usize) -> f64 {
        self.log_r[k].exp()
    }

    pub fn sigma(&self, k: usize) -> f64 {
        self.log_sigma[k].exp()
    }

    fn width(&self, k: usize) -> f64 {
        2.0 * self.log_sigma[k]
    }

    /// `β_k` and its first two derivatives in `x = log r`.
    fn beta(&self, k: usize, x: f64) -> (f64, f64, f64) {
        let w = self.width(k);
        let u = (x - self.log_r[k] + self.log_sigma[k]) / w;
        (smooth_step(u), smooth_step_d1(u) / w, smooth_step_d2(u) / (w * w))
    }

    /// `ψ_k` and its first two derivatives in `x = log r`.
    fn psi_log(&self, k: usize, x: f64) -> (f64, f64, f64) {
        let up = if k == 0 { (1.0, 0.0, 0.0) } else { self.beta(k, x) };
        let down = if k + 1 < self.len() { self.beta(k + 1, x) } else { (0.0, 0.0, 0.0) };
        (up.0 - down.0, up.1 - down.1, up.2 - down.2)
    }

    pub fn psi(&self, k: usize, r: f64) -> f64 {
        self.psi_log(k, r.ln()).0
    }

    /// `(ψ_k, r ψ_k', r² ψ_k'')` at `r`.
    pub fn psi_derivs(&self, k: usize, r: f64) -> (f64, f64, f64) {
        let (p, px, pxx) = self.psi_log(k, r.ln());
        (p, px, pxx - px)
    }

    /// Indices with `ψ_k(r) ≠ 0` and their values; at most two.
    pub fn weights(&self, r: f64) -> Vec<(usize, f64)> {
        let x = r.ln();
        (0..self.len())
            .filter_map(|k| {
                let v = self.psi_log(k, x).0;
                (v != 0.0).then_some((k, v))
            })
            .collect()
    }

    /// Open interval outside of which `ψ_k` vanishes.
    pub fn support(&self, k: usize) -> (f64, f64) {
        let lo = if k == 0 { 0.0 } else { (self.log_r[k] - self.log_sigma[k]).exp() };
        let hi = if k + 1 < self.len() {
            (self.log_r[k + 1] + self.log_sigma[k + 1]).exp()
        } else {
            f64::INFINITY
        };
        (lo, hi)
    }

    /// Closed interval on which `ψ_k = 1`.
    pub fn plateau(&self, k: usize) -> (f64, f64) {
        let lo = if k == 0 { 0.0 } else { (self.log_r[k] + self.log_sigma[k]).exp() };
        let hi = if k + 1 < self.len() {
            (self.log_r[k + 1] - self.log_sigma[k + 1]).exp()
        } else {
            f64::INFINITY
        };
        (lo, hi)
    }

    /// Bound on `max(|r ψ_k'|, |r² ψ_k''|)` from the sharper of the two
    /// transitions of `ψ_k`.
    pub fn gamma(&self, k: usize) -> f64 {
        let (s1, s2) = (smooth_step_d1_max(), smooth_step_d2_max());
        let f = |j: usize| {
            let w = self.width(j);
            s1 / w + s2 / (w * w)
        };
        let mut g: f64 = 0.0;
        if k >= 1 {
            g = g.max(f(k));
        }
        if k + 1 < self.len() {
            g = g.max(f(k + 1));
        }
        g
    }

    pub fn gammas(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.gamma(k)).collect()
    }

    /// Checks the partition properties on `n` log-uniform points covering
    /// every transition, using centred differences for the derivative bounds.
    pub fn verify(&self, n: usize) -> PartitionReport {
        let last = self.len() - 1;
        let x_lo = -1.0;
        let x_hi = self.log_r[last] + self.log_sigma[last] + 1.0;
        let h = 1e-4;
        let gammas = self.gammas();
        let mut rep = PartitionReport {
            sum_error: 0.0,
            support_ok: true,
            plateau_ok: true,
            adjacency_ok: true,
            derivative_ratio: 0.0,
            gamma: gammas.clone(),
            gamma_decreasing_from: 0,
        };
        for i in 0..=n {
            let x = x_lo + (x_hi - x_lo) * i as f64 / n as f64;
            let r = x.exp();
            let vals: Vec<f64> = (0..self.len()).map(|k| self.psi_log(k, x).0).collect();
            rep.sum_error = rep.sum_error.max((vals.iter().sum::<f64>() - 1.0).abs());
            let nonzero: Vec<usize> = (0..self.len()).filter(|&k| vals[k] != 0.0).collect();
            if nonzero.len() > 2 || (nonzero.len() == 2 && nonzero[1] != nonzero[0] + 1) {
                rep.adjacency_ok = false;
            }
            for k in 0..self.len() {
                let (lo, hi) = self.support(k);
                if vals[k] != 0.0 && !(r > lo && r < hi) {
                    rep.support_ok = false;
                }
                let (plo, phi) = self.plateau(k);
                if r >= plo && r <= phi && vals[k] != 1.0 {
                    rep.plateau_ok = false;
                }
                if vals[k] < -1e-15 || vals[k] > 1.0 + 1e-15 {
                    rep.support_ok = false;
                }
                let p = |y: f64| self.psi_log(k, y).0;
                let (pm, p0, pp) = (p(x - h), vals[k], p(x + h));
                let d1 = (pp - pm) / (2.0 * h);
                let d2 = (pp - 2.0 * p0 + pm) / (h * h) - d1;
                if gammas[k] > 0.0 {
                    rep.derivative_ratio = rep.derivative_ratio.max(d1.abs().max(d2.abs()) / gammas[k]);
                }
            }
        }
        let mut from = gammas.len() - 1;
        while from >= 1 && gammas[from - 1] > gammas[from] {
            from -= 1;
        }
        rep.gamma_decreasing_from = from;
        rep
    }
}

/// Outcome of [`PartitionOfUnity::verify`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionReport {
    /// `max |Σ ψ_k - 1|`.
    pub sum_error: f64,
    pub support_ok: bool,
    pub plateau_ok: bool,
    /// At most two neighbouring functions are nonzero anywhere.
    pub adjacency_ok: bool,
    /// `max_k max(|rψ_k'|, |r²ψ_k''|) / γ_k` from finite differences.
    pub derivative_ratio: f64,
    pub gamma: Vec<f64>,
    /// First index from which `γ_k` is strictly decreasing.
    pub gamma_decreasing_from: usize,
}

impl PartitionReport {
    pub fn derivatives_ok(&self) -> bool {
        self.derivative_ratio <= 1.0 + 1e-3
    }
}

pub fn partition_of_unity(r_seq: Vec<f64>, sigma_seq: Vec<f64>) -> Result<PartitionOfUnity> {
    PartitionOfUnity::new(r_seq, sigma_seq)
}
