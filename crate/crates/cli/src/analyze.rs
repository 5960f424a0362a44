//! Growth, Jensen-Privalov, indicator, sector-density and CRG report for a
//! zero set.

use std::f64::consts::TAU;
use std::path::Path;

use serde::Serialize;
use subharmonic::field::log_grid;
use subharmonic::limits::{crg_test, sector_density};
use subharmonic::potentials::{jensen_privalov_residual, CanonicalPotential};
use subharmonic::{Error, GrowthReport, MassDistribution, ProximateOrder};

use crate::{num, read_input, CliResult, Flags, OutDir};

/// The analysis window ends this many decades below the outermost zero, so
/// the truncated product stays close to the full one.
pub const WINDOW_MARGIN_DECADES: f64 = 3.0;
pub const CRG_TOL: f64 = 0.05;
const JENSEN_POINTS: usize = 2048;
const JENSEN_RADII: usize = 12;
const SECTORS: usize = 8;

#[derive(Debug, Serialize)]
pub struct CrgSummary {
    pub crg: bool,
    pub gap: f64,
    pub tol: f64,
    pub window: (f64, f64),
    pub window_error: Option<f64>,
    pub flagged_directions: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    pub seed: u64,
    pub command: &'static str,
    pub flags: Flags,
    pub atoms: usize,
    pub total_mass: f64,
    pub growth: GrowthReport,
    pub t_grid: (f64, f64, usize),
    pub jensen_privalov_max_residual: f64,
    pub crg: CrgSummary,
    pub files: Vec<String>,
}

pub fn run_analyze(input: &Path, flags: &Flags, out: &Path) -> CliResult<AnalyzeReport> {
    let mu = MassDistribution::from_json(&read_input(input)?)?;
    if mu.is_empty() {
        return Err(Error::InsufficientData("zero set has no atoms".into()).into());
    }
    mu.ensure_no_origin()?;
    let growth = subharmonic::scale::growth_report(&mu)?;
    if !(growth.order.is_finite() && growth.order > 0.0) {
        return Err(Error::Domain(format!("estimated order {} is not finite and positive", growth.order)).into());
    }
    let r_min = mu.min_modulus().unwrap_or(1.0);
    let r_max = mu.max_modulus().unwrap_or(1.0);
    let t_hi = r_max / 10f64.powf(WINDOW_MARGIN_DECADES);
    let t_lo = t_hi / 10f64.powf(flags.t_decades);
    if t_lo < 1e-12 || t_hi <= 1.0 {
        return Err(Error::InsufficientData(format!(
            "zeros reach |z| = {r_max:.3e}; the analysis window needs them to extend {WINDOW_MARGIN_DECADES} decades beyond t = 1"
        ))
        .into());
    }
    let t_grid = log_grid(t_lo, t_hi, flags.t_per_decade);
    let po = ProximateOrder::constant(growth.order)?;
    let u = CanonicalPotential::new(mu.clone(), growth.genus)?;

    let mut outdir = OutDir::create(out)?;

    let radii = log_grid(1.5 * r_min, 0.5 * r_max, 4);
    let step = (radii.len() / JENSEN_RADII).max(1);
    let mut jp_rows = Vec::new();
    let mut jp_max = 0.0f64;
    for &r in radii.iter().step_by(step) {
        let (r, res) = match jensen_privalov_residual(&mu, growth.genus, r, JENSEN_POINTS) {
            Ok(v) => (r, v),
            Err(Error::AtomOnCircle { suggestion, .. }) => (suggestion, jensen_privalov_residual(&mu, growth.genus, suggestion, JENSEN_POINTS)?),
            Err(e) => return Err(e.into()),
        };
        jp_max = jp_max.max(res.abs());
        jp_rows.push(vec![num(r), num(res)]);
    }
    outdir.write_csv("jensen_privalov.csv", &["r", "residual"], &jp_rows)?;

    let verdict = crg_test(&u, &po, &t_grid, flags.phi_grid, CRG_TOL)?;
    let pair = &verdict.pair;
    let rows: Vec<Vec<String>> = (0..flags.phi_grid)
        .map(|i| vec![num(pair.h.phi(i)), num(pair.h.values()[i]), num(pair.h_lower.values()[i])])
        .collect();
    outdir.write_csv("indicator.csv", &["phi", "h", "h_lower"], &rows)?;

    let mut rows = Vec::new();
    for k in 0..SECTORS {
        let (a, b) = (TAU * k as f64 / SECTORS as f64, TAU * (k + 1) as f64 / SECTORS as f64);
        let d = sector_density(&mu, &po, a, b, &t_grid)?;
        rows.push(vec![num(a), num(b), num(d.upper), num(d.lower), d.exists.to_string()]);
    }
    outdir.write_csv("sector_density.csv", &["alpha", "beta", "upper", "lower", "exists"], &rows)?;

    let mut report = AnalyzeReport {
        seed: flags.seed,
        command: "analyze",
        flags: flags.clone(),
        atoms: mu.len(),
        total_mass: mu.total_mass(),
        growth,
        t_grid: (t_lo, t_hi, t_grid.len()),
        jensen_privalov_max_residual: jp_max,
        crg: CrgSummary {
            crg: verdict.crg,
            gap: verdict.gap,
            tol: CRG_TOL,
            window: pair.window,
            window_error: pair.window_error,
            flagged_directions: pair.flagged.clone(),
        },
        files: Vec::new(),
    };
    report.files = outdir.files();
    outdir.write_report(&report)?;
    Ok(report)
}
