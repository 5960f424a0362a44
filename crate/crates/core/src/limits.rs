//! Scaling transforms, sector densities, completely regular growth, periodic
//! limit sets, chain recurrence, and the ray-regularity transform `Ĝ`.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use nalgebra::DMatrix;
use num_complex::Complex64;
use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::PlaneField;
use crate::indicators::{indicator_pair_window, IndicatorPair};
use crate::kernels::gp;
use crate::measure::{Atom, MassDistribution};
use crate::quad::adaptive_pieces;
use crate::scale::ProximateOrder;

/// `P_t = t e^{iγ log t}`.
pub fn dilation(t: f64, gamma: f64) -> Complex64 {
    Complex64::from_polar(t, gamma * t.ln())
}

/// `u_t(z) = u(P_t z) t^{-ρ(t)}`.
#[derive(Debug, Clone)]
pub struct ScaledField<U> {
    u: U,
    factor: Complex64,
    weight: f64,
}

impl<U: PlaneField> ScaledField<U> {
    pub fn new(u: U, po: &ProximateOrder, t: f64, gamma: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidInput(format!("scale must be positive, got {t}")));
        }
        Ok(ScaledField { u, factor: dilation(t, gamma), weight: 1.0 / po.v(t) })
    }
}

impl<U: PlaneField> PlaneField for ScaledField<U> {
    fn eval(&self, z: Complex64) -> f64 {
        self.u.eval(self.factor * z) * self.weight
    }
}

/// `μ_t(E) = t^{-ρ(t)} μ(P_t E)`: atoms move to `P_t^{-1} z_j`.
pub fn scale_measure(mu: &MassDistribution, po: &ProximateOrder, t: f64, gamma: f64) -> Result<MassDistribution> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidInput(format!("scale must be positive, got {t}")));
    }
    let f = dilation(t, gamma);
    let w = po.v(t);
    MassDistribution::new(mu.atoms().iter().map(|a| Atom::new(a.z() / f, a.mass / w)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorDensity {
    pub upper: f64,
    pub lower: f64,
    pub exists: bool,
}

fn top_decade(t_grid: &[f64]) -> Result<impl Iterator<Item = f64> + '_> {
    if t_grid.len() < 2 || t_grid.iter().any(|t| !(*t > 0.0)) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("t grid must be positive and increasing".into()));
    }
    let hi = t_grid[t_grid.len() - 1];
    if hi / t_grid[0] < 100.0 * (1.0 - 1e-12) {
        return Err(Error::InvalidInput("t grid must span two decades".into()));
    }
    Ok(t_grid.iter().copied().filter(move |t| *t >= hi / 10.0 * (1.0 - 1e-12)))
}

/// Upper and lower density of the sector `{|z| ≤ t, arg z ∈ [α, β)}` over
/// the top decade of `t_grid`; the density exists when the two agree to 5%.
pub fn sector_density(
    mu: &MassDistribution,
    po: &ProximateOrder,
    alpha: f64,
    beta: f64,
    t_grid: &[f64],
) -> Result<SectorDensity> {
    if !(beta > alpha) {
        return Err(Error::InvalidInput("sector must have positive opening".into()));
    }
    let (mut upper, mut lower) = (f64::NEG_INFINITY, f64::INFINITY);
    for t in top_decade(t_grid)? {
        let d = mu.sector_mass(t, alpha, beta) / po.v(t);
        upper = upper.max(d);
        lower = lower.min(d);
    }
    Ok(SectorDensity { upper, lower, exists: upper - lower <= 0.05 * upper })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrgVerdict {
    pub crg: bool,
    /// `max_φ (h - h̲)`.
    pub gap: f64,
    pub pair: IndicatorPair,
}

/// Completely regular growth, tested as `max_φ (h - h̲) ≤ tol·scale(h)` over
/// the top decade.
pub fn crg_test<U: PlaneField + ?Sized>(
    u: &U,
    po: &ProximateOrder,
    t_grid: &[f64],
    n_phi: usize,
    tol: f64,
) -> Result<CrgVerdict> {
    crg_test_window(u, po, t_grid, n_phi, tol, 1.0)
}

/// [`crg_test`] over the top `window_decades` decades.
pub fn crg_test_window<U: PlaneField + ?Sized>(
    u: &U,
    po: &ProximateOrder,
    t_grid: &[f64],
    n_phi: usize,
    tol: f64,
    window_decades: f64,
) -> Result<CrgVerdict> {
    let pair = indicator_pair_window(u, po, t_grid, n_phi, window_decades)?;
    let gap = pair
        .h
        .values()
        .iter()
        .zip(pair.h_lower.values())
        .map(|(a, b)| if a.is_finite() && b.is_finite() { a - b } else if a.is_finite() { f64::INFINITY } else { 0.0 })
        .fold(0.0, f64::max);
    Ok(CrgVerdict { crg: gap <= tol * pair.h.scale(), gap, pair })
}

/// `μ_P = Σ_k T_{kP} μ*`: copies of the annulus measure `μ*` on `[1, T)` at
/// `T^k z_j` with masses `T^{kρ} m_j`.
pub fn periodic_extension(
    mu_star: &MassDistribution,
    period: f64,
    rho: f64,
    k_range: RangeInclusive<i32>,
) -> Result<MassDistribution> {
    if !(period.is_finite() && period > 1.0) {
        return Err(Error::InvalidInput(format!("period must exceed 1, got {period}")));
    }
    if let Some(a) = mu_star.atoms().iter().find(|a| !(a.modulus() >= 1.0 && a.modulus() < period)) {
        return Err(Error::InvalidInput(format!("atom at |z| = {} outside the annulus [1, {period})", a.modulus())));
    }
    let mass_factor = period.powf(rho);
    let mut atoms = Vec::new();
    for k in k_range {
        let (zf, mf) = (period.powi(k), mass_factor.powi(k));
        atoms.extend(mu_star.atoms().iter().map(|a| Atom::new(a.z() * zf, a.mass * mf)));
    }
    MassDistribution::new(atoms)
}

/// Chain-recurrence structure of a sampled flow.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    /// Strongly connected component of each sample point.
    pub component: Vec<usize>,
    /// Whether each point lies on a cycle of the chain graph.
    pub on_cycle: Vec<bool>,
    /// The whole sample is one chain-recurrent class.
    pub recurrent: bool,
}

impl ChainReport {
    /// `i` and `j` are joined by chains in both directions.
    pub fn pair(&self, i: usize, j: usize) -> bool {
        self.component[i] == self.component[j] && self.on_cycle[i]
    }
}

/// Builds the graph with an edge `i → j` iff `d(flow(i, t), j) < eps` for
/// some sampled step `t ≥ s`, and reads off its strong components.
pub fn chain_recurrence_test<D, F>(n: usize, dist: D, flow: F, eps: f64, s: usize, steps: &[usize]) -> Result<ChainReport>
where
    D: Fn(usize, usize) -> f64,
    F: Fn(usize, usize) -> usize,
{
    if n == 0 {
        return Err(Error::InvalidInput("empty sample".into()));
    }
    let steps: Vec<usize> = steps.iter().copied().filter(|t| *t >= s).collect();
    if steps.is_empty() {
        return Err(Error::InvalidInput(format!("no sampled step is at least {s}")));
    }
    let mut g = DiGraph::<(), ()>::with_capacity(n, n);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    let mut self_loop = vec![false; n];
    for i in 0..n {
        let mut targets = vec![false; n];
        for &t in &steps {
            let y = flow(i, t);
            for (j, hit) in targets.iter_mut().enumerate() {
                if !*hit && dist(y, j) < eps {
                    *hit = true;
                }
            }
        }
        for (j, hit) in targets.iter().enumerate() {
            if *hit {
                g.add_edge(nodes[i], nodes[j], ());
                if i == j {
                    self_loop[i] = true;
                }
            }
        }
    }
    let sccs = kosaraju_scc(&g);
    let mut component = vec![0; n];
    let mut on_cycle = vec![false; n];
    for (c, scc) in sccs.iter().enumerate() {
        for v in scc {
            let i = v.index();
            component[i] = c;
            on_cycle[i] = scc.len() > 1 || self_loop[i];
        }
    }
    let recurrent = sccs.len() == 1 && on_cycle.iter().all(|b| *b);
    Ok(ChainReport { component, on_cycle, recurrent })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GhatValue {
    /// Windowed quadrature; authoritative.
    pub value: Complex64,
    /// `π cos((π - |γ|)w) / (w sin πw)`, `w = ρ + is`; advisory.
    pub closed_form: Complex64,
    pub discrepancy: f64,
    pub window: f64,
}

/// Closed form of `Ĝ(s, γ, ρ)` for `p = [ρ]`.
pub fn ghat_closed_form(s: f64, gamma: f64, rho: f64) -> Complex64 {
    let w = Complex64::new(rho, s);
    let g = crate::kernels::reduce_angle(gamma).abs();
    PI * ((PI - g) * w).cos() / (w * (PI * w).sin())
}

fn ghat_window(rho: f64, p: u32, tail: f64) -> f64 {
    let kappa = (rho - p as f64).min(p as f64 + 1.0 - rho);
    // The log factor at p = 0 and the polynomial prefactors need slack.
    1.25 * (1.0 / tail).ln() / kappa + 5.0
}

fn ghat_quadrature(s: f64, gamma: f64, rho: f64, p: u32, big_l: f64) -> Complex64 {
    let rot = Complex64::from_polar(1.0, -gamma);
    let g = |t: f64| {
        let v = gp(rot * t.exp(), p);
        if v.is_finite() {
            v * (-rho * t).exp()
        } else {
            0.0
        }
    };
    let pts = [-big_l, -1.0, 0.0, 1.0, big_l];
    let re = adaptive_pieces(|t| g(t) * (s * t).cos(), &pts, 1e-13, 1e-12).value;
    let im = adaptive_pieces(|t| -g(t) * (s * t).sin(), &pts, 1e-13, 1e-12).value;
    Complex64::new(re, im)
}

/// `Ĝ(s, γ, ρ) = ∫ G_p(e^{t - iγ}) e^{-ρt} e^{-ist} dt`, `p = [ρ]`, by
/// quadrature over `[-L, L]` with tails below `1e-8`.
pub fn ghat_transform(s: f64, gamma: f64, rho: f64, p: u32) -> Result<GhatValue> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidInput(format!("order must be positive, got {rho}")));
    }
    if rho.fract() == 0.0 {
        return Err(Error::Unsupported("integer order in the Ĝ transform".into()));
    }
    if p as f64 != rho.floor() {
        return Err(Error::InvalidInput(format!("genus {p} is not the integer part of {rho}")));
    }
    let big_l = ghat_window(rho, p, 1e-8);
    let value = ghat_quadrature(s, gamma, rho, p, big_l);
    let closed_form = ghat_closed_form(s, gamma, rho);
    Ok(GhatValue { value, closed_form, discrepancy: (value - closed_form).norm(), window: big_l })
}

/// Same integral over an explicit window `[-L, L]`.
pub fn ghat_transform_window(s: f64, gamma: f64, rho: f64, p: u32, big_l: f64) -> Result<Complex64> {
    ghat_transform(s, gamma, rho, p)?;
    Ok(ghat_quadrature(s, gamma, rho, p, big_l))
}

/// The default `s` grid `0, 0.25, …, 20`.
pub fn default_s_grid() -> Vec<f64> {
    (0..=80).map(|i| 0.25 * i as f64).collect()
}

/// Largest `s` at which [`ray_regularity_condition`] cross-checks the
/// closed form against quadrature; beyond it `|Ĝ|` decays like `e^{-c s}`
/// into the quadrature noise.
pub const RANK_CHECK_S: f64 = 2.0;

/// Whether the matrix `[Ĝ(s, θ_j - ψ_k, ρ)]` has full row rank `|θ|` for
/// every sampled `s`.
///
/// All entries share the factor `π/(w sin πw)`, `w = ρ + is`, which never
/// vanishes for non-integer `ρ`, so the rank is read off
/// `C(s) = [cos((π - |γ_jk|) w)]`. A singular value counts when it exceeds
/// `1e-8` times the Frobenius norm of `[cosh((π - |γ_jk|) s)]`, the natural
/// size of the entries. The closed form is first checked against quadrature
/// for `s ≤ RANK_CHECK_S`.
pub fn ray_regularity_condition(thetas: &[f64], psis: &[f64], rho: f64, p: u32, s_grid: &[f64]) -> Result<bool> {
    if thetas.is_empty() || psis.is_empty() || s_grid.is_empty() {
        return Err(Error::InvalidInput("ray lists and s grid must be nonempty".into()));
    }
    if psis.len() < thetas.len() {
        return Ok(false);
    }
    let offsets: Vec<Vec<f64>> =
        thetas.iter().map(|t| psis.iter().map(|q| crate::kernels::reduce_angle(t - q).abs()).collect()).collect();
    let checks: Vec<(f64, f64, f64)> = s_grid
        .iter()
        .filter(|s| s.abs() <= RANK_CHECK_S)
        .flat_map(|&s| offsets.iter().flatten().map(move |&g| (s, g, 0.0)))
        .collect();
    let worst = checks
        .par_iter()
        .map(|&(s, g, _)| {
            ghat_transform(s, g, rho, p).map(|v| v.discrepancy / v.closed_form.norm().max(1e-3))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    if worst > 1e-5 {
        return Err(Error::Numerical(format!("Ĝ closed form disagrees with quadrature (relative {worst:.2e})")));
    }
    let full = s_grid.iter().all(|&s| {
        let w = Complex64::new(rho, s);
        let m = DMatrix::<Complex64>::from_fn(thetas.len(), psis.len(), |j, k| ((PI - offsets[j][k]) * w).cos());
        let natural = offsets.iter().flatten().map(|g| ((PI - g) * s).cosh().powi(2)).sum::<f64>().sqrt();
        m.singular_values().iter().filter(|v| **v > 1e-8 * natural).count() == thetas.len()
    });
    Ok(full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::log_grid;
    use crate::potentials::CanonicalPotential;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scaling_examples() {
        let po = ProximateOrder::constant(1.0).unwrap();
        let mu = MassDistribution::unit_masses([c(2.0 * 7.0, 0.0)]).unwrap();
        let s = scale_measure(&mu, &po, 7.0, 0.0).unwrap();
        assert!((s.atoms()[0].z() - c(2.0, 0.0)).norm() < 1e-15);
        assert!((s.atoms()[0].mass - 1.0 / 7.0).abs() < 1e-15);
        let id = scale_measure(&mu, &po, 1.0, 0.3).unwrap();
        assert_eq!(id, mu);
        let u = |z: Complex64| z.re * z.re - z.im;
        let f = ScaledField::new(u, &po, 1.0, 0.0).unwrap();
        assert_eq!(f.eval(c(0.3, 0.4)), u(c(0.3, 0.4)));
    }

    #[test]
    fn scaling_composition() {
        let po = ProximateOrder::log_log(1.5, 1.0).unwrap();
        let u = |z: Complex64| z.norm().powf(1.5) * (1.0 + 0.2 * z.re / z.norm());
        let z = c(0.6, -0.2);
        let (t, tau) = (1e3, 7.0);
        let inner = ScaledField::new(u, &po, t, 0.0).unwrap();
        let twice = ScaledField::new(inner, &po, tau, 0.0).unwrap();
        let once = ScaledField::new(u, &po, t * tau, 0.0).unwrap();
        let factor = po.v(t * tau) / (po.v(t) * po.v(tau));
        assert!((twice.eval(z) / (once.eval(z) * factor) - 1.0).abs() < 1e-12);
        // The correction factor relative to τ^ρ tends to 1.
        let dev = |t: f64| (po.v(t * tau) / (po.v(t) * tau.powf(1.5)) - 1.0).abs();
        assert!(dev(1e12) < dev(1e4));
    }

    #[test]
    fn sector_examples() {
        let rho = 0.8;
        let po = ProximateOrder::constant(rho).unwrap();
        let mu = MassDistribution::unit_masses((1..=20_000).map(|j| c((j as f64).powf(1.0 / rho), 0.0))).unwrap();
        let t = log_grid(1e2, 1e5, 20);
        let d = sector_density(&mu, &po, -0.5, 0.5, &t).unwrap();
        assert!((d.upper - 1.0).abs() < 0.05 && (d.lower - 1.0).abs() < 0.05 && d.exists);
        let d = sector_density(&mu, &po, 1.0, 2.0, &t).unwrap();
        assert_eq!((d.upper, d.lower), (0.0, 0.0));
        // Mass 1 per unit log-radius on alternating decades.
        let mut atoms = Vec::new();
        for dec in (0..6).step_by(2) {
            for k in 0..2000 {
                let r = 10f64.powf(dec as f64 + k as f64 / 2000.0);
                atoms.push(Atom::new(c(r, 0.0), r.powf(rho) / 200.0));
            }
        }
        let osc = MassDistribution::new(atoms).unwrap();
        let d = sector_density(&osc, &po, -0.5, 0.5, &log_grid(1e3, 1e6, 20)).unwrap();
        assert!(d.upper > 2.0 * d.lower && !d.exists);
    }

    #[test]
    fn sector_density_scales() {
        let rho = 1.2;
        let po = ProximateOrder::constant(rho).unwrap();
        let mu = MassDistribution::unit_masses((1..=5000).map(|j| Complex64::from_polar((j as f64).powf(1.0 / rho), j as f64))).unwrap();
        for t in [2.0, 4.0] {
            let r = 300.0;
            let direct = mu.sector_mass(t * r, 0.2, 1.4);
            let dilated = scale_measure(&mu, &po, t, 0.0).unwrap().sector_mass(r, 0.2, 1.4) * t.powf(rho);
            assert!((direct - dilated).abs() < 1e-9 * direct.max(1.0));
        }
    }

    #[test]
    fn crg_examples() {
        let po = ProximateOrder::constant(1.0).unwrap();
        let t = log_grid(1.0, 1e3, 30);
        assert!(crg_test(&|z: Complex64| z.re, &po, &t, 64, 1e-6).unwrap().crg);
        let osc = |z: Complex64| z.norm() * (1.0 + 0.5 * z.norm().ln().sin());
        assert!(!crg_test(&osc, &po, &t, 64, 0.05).unwrap().crg);
    }

    #[test]
    fn periodic_examples() {
        let star = MassDistribution::unit_masses([c(2.0, 0.0)]).unwrap();
        let p = periodic_extension(&star, 4.0, 1.0, -3..=3).unwrap();
        for (k, a) in (-3..=3).zip(p.atoms()) {
            assert_eq!(a.re, 2.0 * 4f64.powi(k));
            assert_eq!(a.mass, 4f64.powi(k));
        }
        assert!(periodic_extension(&MassDistribution::unit_masses([c(5.0, 0.0)]).unwrap(), 4.0, 1.0, 0..=1).is_err());
        let star = MassDistribution::new(vec![Atom::new(c(1.5, 0.2), 1.0), Atom::new(Complex64::from_polar(3.0, 2.0), 0.5)]).unwrap();
        let p = periodic_extension(&star, 4.0, 1.5, -10..=10).unwrap();
        let po = ProximateOrder::constant(1.5).unwrap();
        let s = scale_measure(&p, &po, 4.0, 0.0).unwrap();
        // Atom (k, j) maps exactly onto atom (k - 1, j).
        for i in 2..p.len() {
            assert_eq!(s.atoms()[i], p.atoms()[i - 2]);
        }
        for r in log_grid(10.0, 1e5, 10) {
            let q = p.counting(r) / r.powf(1.5);
            assert!(q > 0.05 && q < 2.0);
        }
    }

    #[test]
    fn chain_examples() {
        let fixed = chain_recurrence_test(1, |_, _| 0.0, |i, _| i, 0.1, 1, &[1, 2, 3]).unwrap();
        assert!(fixed.recurrent);
        let pos = [0.0f64, 10.0];
        let attractor = chain_recurrence_test(2, |i, j| (pos[i] - pos[j]).abs(), |_, _| 1, 0.1, 1, &[1, 2, 3]).unwrap();
        assert!(!attractor.recurrent);
        let l = 12;
        let ang = |i: usize| std::f64::consts::TAU * i as f64 / l as f64;
        let d = |i: usize, j: usize| (Complex64::from_polar(1.0, ang(i)) - Complex64::from_polar(1.0, ang(j))).norm();
        let orbit = chain_recurrence_test(l, d, |i, t| (i + t) % l, 0.6, 1, &[1, 2, 5]).unwrap();
        assert!(orbit.recurrent);
        // Two far-apart orbits: recurrent within each, not across.
        let d2 = |i: usize, j: usize| if (i < l) == (j < l) { d(i % l, j % l) } else { 100.0 };
        let f2 = |i: usize, t: usize| if i < l { (i + t) % l } else { l + (i - l + t) % l };
        let two = chain_recurrence_test(2 * l, d2, f2, 0.6, 1, &[1, 2]).unwrap();
        assert!(!two.recurrent);
        assert!(two.pair(0, 5) && two.pair(l, l + 3) && !two.pair(0, l));
    }

    #[test]
    fn ghat_examples() {
        let g = ghat_transform(0.0, PI, 0.5, 0).unwrap();
        assert!(g.value.im.abs() < 1e-9);
        let wide = ghat_transform_window(0.0, PI, 0.5, 0, 1.5 * g.window).unwrap();
        assert!((wide - g.value).norm() < 1e-6);
        for &(s, gamma, rho, p) in &[(1.3, 0.7, 0.5, 0u32), (2.0, -2.0, 1.5, 1), (0.4, 0.1, 2.3, 2)] {
            let a = ghat_transform(s, gamma, rho, p).unwrap().value;
            let b = ghat_transform(-s, gamma, rho, p).unwrap().value;
            assert!((a - b.conj()).norm() < 1e-9);
        }
        // Decay in |s|: the envelope over successive unit blocks decreases.
        let mags: Vec<f64> = (0..=20).map(|s| ghat_transform(s as f64, 0.7, 0.5, 0).unwrap().value.norm()).collect();
        for w in mags.windows(4).step_by(4) {
            assert!(w[3] < w[0]);
        }
        assert!(mags[20] < 0.05 * mags[0]);
        assert!(ghat_transform(0.0, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn ghat_matches_closed_form() {
        for &(s, gamma, rho, p) in &[(0.0, PI, 0.5, 0u32), (1.0, 0.5, 0.3, 0), (0.5, -1.0, 1.5, 1), (3.0, 2.5, 1.8, 1)] {
            let g = ghat_transform(s, gamma, rho, p).unwrap();
            assert!(g.discrepancy < 1e-6 * g.closed_form.norm().max(1e-3), "{g:?}");
        }
    }

    #[test]
    fn ray_rank_examples() {
        let grid = default_s_grid();
        // Zero offset at ρ = 1/2 is a Delange exception: Ĝ(0, 0, 1/2) = 0.
        assert!(!ray_regularity_condition(&[0.3], &[0.3], 0.5, 0, &grid).unwrap());
        // |γ| = π - π/(2ρ) with ρ = 0.75, the first exceptional offset.
        assert!(!ray_regularity_condition(&[PI / 3.0], &[0.0], 0.75, 0, &grid).unwrap());
        // Offset -π at ρ = 0.75: Ĝ(0, π) = π/(ρ sin πρ) ≠ 0.
        assert!(ray_regularity_condition(&[0.0], &[PI], 0.75, 0, &grid).unwrap());
        assert!(!ray_regularity_condition(&[0.0, 1.0], &[0.5], 0.75, 0, &grid).unwrap());
        assert!(ray_regularity_condition(&[0.0], &[0.0], 0.75, 0, &grid).unwrap());
    }

    #[test]
    fn periodic_measure_is_not_crg() {
        let star = MassDistribution::new(vec![Atom::new(c(1.5, 0.0), 1.0), Atom::new(Complex64::from_polar(2.5, 2.0), 2.0)]).unwrap();
        let p = periodic_extension(&star, 4.0, 1.5, -8..=14).unwrap();
        let u = CanonicalPotential::new(p, 1).unwrap();
        let po = ProximateOrder::constant(1.5).unwrap();
        let t = log_grid(1e2, 1e5, 24);
        let v = crg_test(&u, &po, &t, 64, 0.05).unwrap();
        assert!(!v.crg, "gap {}", v.gap);
    }
}
