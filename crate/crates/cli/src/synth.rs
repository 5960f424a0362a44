//! Synthesis of zero sets with a prescribed indicator pair or lower
//! indicator, followed by verification against the target.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use serde::{Deserialize, Serialize};
use subharmonic::field::log_grid;
use subharmonic::indicators::{reconstruct_tcf, t_rho_measure, trig_convexity_check};
use subharmonic::limits::crg_test_window;
use subharmonic::synthesis::{
    discretize_measure, lower_indicator_family, AtomIndex, Discretization, GluedMeasure, PolarMeasure, Rounding,
    SumMeasure, TestBump,
};
use subharmonic::{Atom, CircleMeasure, Complex64, DirectionFunction, Error, MassDistribution, PlaneField, ProximateOrder};

use crate::{num, read_input, CliError, CliResult, Flags, OutDir};

/// Members alternate on plateaus of this many decades, joined by slow
/// transitions; fast ones overshoot the targets along rays carrying atoms.
const PLATEAU_DECADES: f64 = 24.0;
const TRANSITION_DECADES: f64 = 10.0;
/// Outer radius of the synthesized measure.
const TOP: f64 = 1e72;
/// Top decades over which achieved indicators are read off; two plateaus.
const WINDOW_DECADES: f64 = 48.0;
const MAX_MODE: u32 = 64;
const CRG_TOL: f64 = 0.05;
const MATCH_TOL: f64 = 0.05;
const LEVELS: usize = 3;
const LOWER_PLATEAU_DECADES: f64 = 3.0;
const DEFAULT_MAX_ZEROS: usize = 20_000;

/// A function of direction in a target file.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum DirSpec {
    Constant { constant: f64 },
    Cos { cos: CosSpec },
    /// Uniform grid samples; `null` stands for `-∞`.
    Values { values: Vec<Option<f64>> },
}

/// `amplitude · cos ρ(φ - phase)` with `φ - phase` reduced to `(-π, π]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosSpec {
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

impl DirSpec {
    pub fn sample(&self, rho: f64, n: usize) -> CliResult<DirectionFunction> {
        let df = match self {
            DirSpec::Constant { constant } => DirectionFunction::from_fn(rho, n, |_| *constant)?,
            DirSpec::Cos { cos } => DirectionFunction::from_fn(rho, n, |phi| {
                let x = (phi - cos.phase + PI).rem_euclid(TAU) - PI;
                cos.amplitude * (rho * x).cos()
            })?,
            DirSpec::Values { values } => {
                let v: Vec<f64> = values.iter().map(|x| x.unwrap_or(f64::NEG_INFINITY)).collect();
                let raw = DirectionFunction::new(rho, v)?;
                if raw.len() == n {
                    raw
                } else {
                    DirectionFunction::from_fn(rho, n, |phi| raw.interp(phi))?
                }
            }
        };
        if df.values().iter().any(|v| v.is_nan()) {
            return Err(CliError::Input("direction function evaluates to NaN".into()));
        }
        Ok(df)
    }
}

/// Target file: an indicator pair `h1`, `h2` (h2 defaults to h1), or a
/// lower indicator `g` with an optional upper indicator `h` it must respect.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub rho: f64,
    pub h1: Option<DirSpec>,
    pub h2: Option<DirSpec>,
    pub g: Option<DirSpec>,
    pub h: Option<DirSpec>,
    pub max_zeros: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct PairCheck {
    /// `sup |h_achieved - max(h1, h2)| / scale`.
    pub upper_error: f64,
    /// `sup |h̲_achieved - min(h1, h2)| / scale`.
    pub lower_error: f64,
    pub scale: f64,
    pub tol: f64,
    pub pass: bool,
    pub crg: bool,
    pub window: (f64, f64),
    pub members: usize,
    pub harmonic: Option<(f64, f64)>,
}

#[derive(Debug, Serialize)]
pub struct LevelSummary {
    pub order: usize,
    pub offset: f64,
    pub m: f64,
    pub k: f64,
    pub delta: f64,
}

#[derive(Debug, Serialize)]
pub struct LowerCheck {
    pub levels: Vec<LevelSummary>,
    /// `max |v_{φ,n}(e^{iφ}) - g_n(φ)|` over grid directions and levels.
    pub pin_error: f64,
    /// `max |min_{θ,n,τ} v_{θ,n}(τe^{iφ})τ^{-ρ} - g_N(φ)|` over checked directions.
    pub family_min_error: f64,
    /// `max (g_N - g)` over finite directions.
    pub smoothing_gap: f64,
    pub flagged: usize,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct ZeroSetSummary {
    pub status: &'static str,
    pub reason: Option<String>,
    pub r_max: f64,
    pub points: usize,
    pub multiplicity: f64,
    pub max_cell_defect: f64,
    /// `(t, sup_g |⟨μ_t - n_t, g⟩|)` over the radial and sector bumps.
    pub weak_residual: Vec<(f64, f64)>,
}

impl ZeroSetSummary {
    fn skipped(status: &'static str, reason: String) -> Self {
        ZeroSetSummary {
            status,
            reason: Some(reason),
            r_max: 0.0,
            points: 0,
            multiplicity: 0.0,
            max_cell_defect: 0.0,
            weak_residual: Vec::new(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SynthReport {
    pub seed: u64,
    pub command: &'static str,
    pub flags: Flags,
    pub rho: f64,
    pub target: &'static str,
    pub pair: Option<PairCheck>,
    pub lower: Option<LowerCheck>,
    pub zero_set: ZeroSetSummary,
    pub files: Vec<String>,
}

pub fn run_synthesize(input: &Path, flags: &Flags, out: &Path) -> CliResult<SynthReport> {
    let spec: TargetSpec =
        serde_json::from_str(&read_input(input)?).map_err(|e| CliError::Input(format!("target spec: {e}")))?;
    if !(spec.rho.is_finite() && spec.rho > 0.0) {
        return Err(CliError::Input(format!("rho must be positive, got {}", spec.rho)));
    }
    let max_zeros = spec.max_zeros.unwrap_or(DEFAULT_MAX_ZEROS);
    let mut outdir = OutDir::create(out)?;
    let mut report = match (&spec.h1, &spec.g) {
        (Some(h1), None) => {
            if spec.h.is_some() {
                return Err(CliError::Input("`h` only accompanies a lower-indicator target".into()));
            }
            let h1 = h1.sample(spec.rho, flags.phi_grid)?;
            let h2 = match &spec.h2 {
                Some(h2) => h2.sample(spec.rho, flags.phi_grid)?,
                None => h1.clone(),
            };
            synth_pair(&h1, &h2, flags, max_zeros, &mut outdir)?
        }
        (None, Some(g)) => {
            if spec.h2.is_some() {
                return Err(CliError::Input("`h2` only accompanies `h1`".into()));
            }
            let g = g.sample(spec.rho, flags.phi_grid)?;
            let h = spec.h.as_ref().map(|h| h.sample(spec.rho, flags.phi_grid)).transpose()?;
            synth_lower(&g, h.as_ref(), flags, max_zeros, &mut outdir)?
        }
        _ => return Err(CliError::Input("target needs exactly one of `h1` or `g`".into())),
    };
    report.files = outdir.files();
    outdir.write_report(&report)?;
    Ok(report)
}

/// `T_ρ h`, rejecting targets that are not ρ-trigonometrically convex.
fn angular_measure(h: &DirectionFunction, name: &str) -> CliResult<CircleMeasure> {
    if h.has_neg_inf() {
        return Err(CliError::Input(format!("{name} must be finite")));
    }
    let rep = trig_convexity_check(h, Some(1e-6 * h.scale()))?;
    if !rep.pass {
        let (a, p, b) = rep.worst;
        return Err(Error::Infeasible(format!(
            "{name} is not {}-trigonometrically convex: the fundamental relation is {:.3e} at φ = ({:.4}, {:.4}, {:.4}); no function has this indicator",
            h.rho(),
            rep.min_value,
            h.phi(a),
            h.phi(p),
            h.phi(b)
        ))
        .into());
    }
    let mut s = t_rho_measure(h)?;
    let p = h.rho();
    if p.fract() == 0.0 {
        // At integer order the grid second difference leaves an O(Δ²) trace
        // of the harmonic mode; it is removed before inversion.
        let f = s.fourier(p);
        let d = s.step();
        let w = if p == 0.0 { d } else { 2.0 * (0.5 * p * d).sin() / p };
        let n = s.cells();
        for (i, v) in s.density.iter_mut().enumerate() {
            let psi = TAU * i as f64 / n as f64;
            *v -= (f * Complex64::from_polar(1.0, -p * psi)).re * d / (PI * w);
        }
    }
    // The convexity check above certifies s ≥ 0; what remains negative is
    // O(Δ²) truncation error of the second difference.
    for v in s.density.iter_mut() {
        *v = v.max(0.0);
    }
    for a in s.atoms.iter_mut() {
        a.1 = a.1.max(0.0);
    }
    Ok(s)
}

/// Harmonic coefficients `(a, b)` of `h - reconstruct(T_ρ h)` at integer order.
fn harmonic_part(h: &DirectionFunction, s: &CircleMeasure) -> CliResult<(f64, f64)> {
    let p = h.rho();
    let rec = reconstruct_tcf(s, p)?;
    let n = h.len();
    let rest: Vec<f64> = (0..n).map(|i| h.values()[i] - rec.interp(h.phi(i))).collect();
    let (mut a, mut b) = (0.0, 0.0);
    for (i, r) in rest.iter().enumerate() {
        let x = p * h.phi(i);
        a += r * x.cos();
        b += r * x.sin();
    }
    a *= 2.0 / n as f64;
    b *= 2.0 / n as f64;
    let misfit = rest
        .iter()
        .enumerate()
        .map(|(i, r)| (r - a * (p * h.phi(i)).cos() - b * (p * h.phi(i)).sin()).abs())
        .fold(0.0, f64::max);
    if misfit > 1e-3 * h.scale() {
        return Err(Error::Numerical(format!("harmonic split leaves a misfit of {misfit:.3e}")).into());
    }
    Ok((a, b))
}

fn synth_pair(h1: &DirectionFunction, h2: &DirectionFunction, flags: &Flags, max_zeros: usize, outdir: &mut OutDir) -> CliResult<SynthReport> {
    let rho = h1.rho();
    let integer = rho.fract() == 0.0;
    let s1 = angular_measure(h1, "h1")?;
    let s2 = angular_measure(h2, "h2")?;
    let scale = h1.scale().max(h2.scale());
    let same = h1.sup_distance(h2) <= 1e-12 * scale;
    let pieces = if same { vec![s1.clone()] } else { vec![s1.clone(), s2.clone()] };
    let mut glued = GluedMeasure::alternating_with_transition(rho, &pieces, PLATEAU_DECADES, TRANSITION_DECADES, TOP, MAX_MODE)?;
    let mut harmonic = None;
    if integer {
        let ab1 = harmonic_part(h1, &s1)?;
        let ab2 = harmonic_part(h2, &s2)?;
        if (ab1.0 - ab2.0).abs().max((ab1.1 - ab2.1).abs()) > 1e-6 * scale {
            return Err(Error::Unsupported("at integer order both indicators must share their harmonic part".into()).into());
        }
        glued = glued.with_harmonic(ab1.0, ab1.1)?;
        harmonic = Some(ab1);
    }
    let po = ProximateOrder::constant(rho)?;
    let t_grid = log_grid(1.0, TOP, (flags.t_per_decade / 4).max(8));
    let u = glued.potential_on(&t_grid);
    let verdict = crg_test_window(&u, &po, &t_grid, flags.phi_grid, CRG_TOL, WINDOW_DECADES)?;
    let pair = &verdict.pair;
    let n = flags.phi_grid;
    let (mut up, mut lo) = (0.0f64, 0.0f64);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (h1.values()[i], h2.values()[i]);
        let (th, tl) = (a.max(b), a.min(b));
        let (ah, al) = (pair.h.values()[i], pair.h_lower.values()[i]);
        up = up.max((ah - th).abs());
        lo = lo.max((al - tl).abs());
        rows.push(vec![num(h1.phi(i)), num(th), num(ah), num(tl), num(al)]);
    }
    outdir.write_csv("indicator.csv", &["phi", "target_h", "achieved_h", "target_lower", "achieved_lower"], &rows)?;
    let check = PairCheck {
        upper_error: up / scale,
        lower_error: lo / scale,
        scale,
        tol: MATCH_TOL,
        pass: up <= MATCH_TOL * scale && lo <= MATCH_TOL * scale,
        crg: verdict.crg,
        window: pair.window,
        members: pieces.len(),
        harmonic,
    };

    let tv = pieces.iter().map(|s| s.total_variation()).fold(0.0, f64::max);
    let zero_set = if tv <= 1e-6 * scale {
        write_zeros(outdir, &MassDistribution::empty())?;
        ZeroSetSummary::skipped("empty", "the target is harmonic; its Riesz measure vanishes".into())
    } else if integer {
        ZeroSetSummary::skipped("unsupported", format!("zero sets are only built at non-integer order, got {rho}"))
    } else {
        // Mass inside |z| < R is about (TV/2π) R^ρ/ρ.
        let r_max = (rho * max_zeros as f64 * TAU / tv).powf(1.0 / rho);
        emit_zero_set(&glued, rho, r_max, outdir)?
    };
    Ok(SynthReport {
        seed: flags.seed,
        command: "synth",
        flags: flags.clone(),
        rho,
        target: "indicator_pair",
        pair: Some(check),
        lower: None,
        zero_set,
        files: Vec::new(),
    })
}

fn write_zeros(outdir: &mut OutDir, zeros: &MassDistribution) -> CliResult<()> {
    outdir.write("zeros.json", &(zeros.to_json() + "\n"))?;
    let rows: Vec<Vec<String>> = zeros.atoms().iter().map(|a| vec![num(a.re), num(a.im), num(a.mass)]).collect();
    outdir.write_csv("zeros.csv", &["re", "im", "multiplicity"], &rows)
}

fn emit_zero_set(mu: &dyn PolarMeasure, rho: f64, r_max: f64, outdir: &mut OutDir) -> CliResult<ZeroSetSummary> {
    if !(r_max > 10.0) {
        return Err(Error::InvalidInput(format!("zero budget only reaches |z| = {r_max:.3}; raise max_zeros")).into());
    }
    let disc: Discretization = discretize_measure(mu, rho, r_max, Rounding::Carry)?;
    let mut weak = Vec::new();
    for t in [r_max / 10.0, r_max / 4.0] {
        let scale = t.powf(rho);
        let r = TestBump::ALL
            .iter()
            .map(|g| (mu.weak_pairing(*g, t, scale) - g.pair_atoms(&disc.zeros, t, scale)).abs())
            .fold(0.0, f64::max);
        weak.push((t, r));
    }
    write_zeros(outdir, &disc.zeros)?;
    Ok(ZeroSetSummary {
        status: "written",
        reason: None,
        r_max,
        points: disc.zeros.len(),
        multiplicity: disc.zeros.total_mass(),
        max_cell_defect: disc.max_cell_defect(),
        weak_residual: weak,
    })
}

fn synth_lower(g: &DirectionFunction, h: Option<&DirectionFunction>, flags: &Flags, max_zeros: usize, outdir: &mut OutDir) -> CliResult<SynthReport> {
    let rho = g.rho();
    if let Some(h) = h {
        angular_measure(h, "h")?;
        if let Some(i) = (0..g.len()).find(|&i| g.values()[i] > h.values()[i] + 1e-9 * h.scale()) {
            return Err(Error::Infeasible(format!(
                "g exceeds the indicator at φ = {:.4} ({} > {}); a lower indicator never exceeds the indicator",
                g.phi(i),
                g.values()[i],
                h.values()[i]
            ))
            .into());
        }
    }
    let fam = lower_indicator_family(g, rho, LEVELS)?;
    let n = g.len();
    let gscale = g.scale().max(1.0);
    let mut pin = 0.0f64;
    for (level, l) in fam.levels.iter().enumerate() {
        for i in 0..n {
            if fam.flagged[i] {
                continue;
            }
            let phi = g.phi(i);
            let v = fam.member(level, phi);
            pin = pin.max((v.eval(Complex64::from_polar(1.0, phi)) - l.g(phi)).abs());
        }
    }
    let last = fam.levels.last().expect("at least one level");
    let thetas: Vec<f64> = (0..n).map(|i| g.phi(i)).collect();
    let taus: Vec<f64> = (0..=40).map(|k| 10f64.powf(-1.0 + k as f64 / 20.0)).collect();
    let stride = (n / 32).max(1);
    let mut fmin_err = 0.0f64;
    let mut rows = Vec::new();
    for i in (0..n).step_by(stride) {
        let phi = g.phi(i);
        let fm = fam.family_min(phi, &thetas, &taus);
        let target = if fam.flagged[i] { f64::NEG_INFINITY } else { last.g(phi) };
        if fam.flagged[i] {
            if fm != f64::NEG_INFINITY {
                fmin_err = f64::INFINITY;
            }
        } else {
            fmin_err = fmin_err.max((fm - target).abs());
        }
        rows.push(vec![num(phi), num(g.values()[i]), num(target), num(fm)]);
    }
    outdir.write_csv("lower.csv", &["phi", "g", "g_smoothed", "family_min"], &rows)?;
    let gap = (0..n)
        .filter(|&i| !fam.flagged[i])
        .map(|i| last.g(g.phi(i)) - g.values()[i])
        .fold(0.0, f64::max);
    let check = LowerCheck {
        levels: fam
            .levels
            .iter()
            .map(|l| LevelSummary { order: l.order, offset: l.offset, m: l.m, k: l.k, delta: l.delta })
            .collect(),
        pin_error: pin,
        family_min_error: fmin_err,
        smoothing_gap: gap,
        flagged: fam.flagged.iter().filter(|f| **f).count(),
        pass: pin <= 1e-9 * gscale && fmin_err <= 1e-9 * gscale,
    };

    // Riesz measure of the family glued along plateaus: the radial part of
    // each level plus its pinned atom of mass δ t^ρ.
    let pieces: Vec<CircleMeasure> = fam.levels.iter().map(|l| CircleMeasure::uniform(n, (l.m + 1.0) * rho * rho)).collect();
    let m_top = fam.levels.iter().map(|l| l.m + 1.0).fold(0.0, f64::max);
    let r_max = (max_zeros as f64 / (m_top * rho)).powf(1.0 / rho);
    let glued = GluedMeasure::alternating(rho, &pieces, LOWER_PLATEAU_DECADES, 10.0 * r_max.max(10.0), 0)?;
    let psi = glued.partition();
    let mut pins = Vec::new();
    for k in 0..psi.len() {
        let (a, b) = psi.plateau(k);
        let t = (a.max(1.0) * b).sqrt();
        if t >= r_max {
            break;
        }
        let l = &fam.levels[k % fam.levels.len()];
        let theta = g.phi((k * 37) % n);
        pins.push(Atom::new(Complex64::from_polar(t, theta), l.delta * t.powf(rho)));
    }
    let pins = AtomIndex::new(&MassDistribution::new(pins)?);
    let zero_set = emit_zero_set(&SumMeasure(&glued, &pins), rho, r_max, outdir)?;
    Ok(SynthReport {
        seed: flags.seed,
        command: "synth",
        flags: flags.clone(),
        rho,
        target: "lower_indicator",
        pair: None,
        lower: Some(check),
        zero_set,
        files: Vec::new(),
    })
}
