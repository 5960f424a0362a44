//! Completeness verdicts for exponential systems described by convex bodies.

use std::path::Path;

use serde::{Deserialize, Serialize};
use subharmonic::completeness::{
    completeness_verdict, default_c_grid, enclosure_classify, overcompleteness_test, spiral_spectral_value,
    support_function, BodySpec, EnclosureStatus, MixStatus, OvercompletenessReport, SpiralValue, SupportBody,
    VerdictInput,
};

use crate::{num, read_input, CliError, CliResult, Flags, OutDir};

/// Bodies file: the conjugate diagram `G`, the indicator body `h1`, and an
/// optional second body `h2` for a two-indicator limit set.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodiesSpec {
    #[serde(rename = "G", alias = "g")]
    pub g: BodySpec,
    pub h1: BodySpec,
    pub h2: Option<BodySpec>,
    pub c_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub periods: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct LabelledStatus {
    pub label: String,
    #[serde(flatten)]
    pub status: EnclosureStatus,
}

#[derive(Debug, Serialize)]
pub struct CompleteReport {
    pub seed: u64,
    pub command: &'static str,
    pub flags: Flags,
    pub kind: &'static str,
    pub complete: bool,
    pub maximal: bool,
    pub extremely_overcomplete: bool,
    /// `h1`, then `h2` and `hull` when a second body is given.
    pub statuses: Vec<LabelledStatus>,
    pub mixes: Vec<MixStatus>,
    /// Decided for the limit set spanned by `h1` and `h2`, whose hull is
    /// taken as the diagram.
    pub overcompleteness: Option<OvercompletenessReport>,
    /// `sup |h_G - max(h1, h2)|`; zero when `G` is the hull itself.
    pub hull_distance: Option<f64>,
    pub spiral: Vec<SpiralValue>,
    pub files: Vec<String>,
}

pub fn run_completeness(input: &Path, flags: &Flags, periods: &[f64], out: &Path) -> CliResult<CompleteReport> {
    let spec: BodiesSpec =
        serde_json::from_str(&read_input(input)?).map_err(|e| CliError::Input(format!("bodies: {e}")))?;
    let n = flags.phi_grid;
    let label = |mut b: SupportBody, l: &str| {
        b.label = l.to_string();
        b
    };
    let g = label(support_function(&spec.g, n)?, "G");
    let h1 = label(support_function(&spec.h1, n)?, "h1");
    let h2 = spec.h2.as_ref().map(|b| support_function(b, n).map(|s| label(s, "h2"))).transpose()?;
    let c_grid = spec.c_grid.clone().unwrap_or_else(default_c_grid);
    let mut outdir = OutDir::create(out)?;

    let (kind, verdict) = match &h2 {
        None => ("regular", completeness_verdict(VerdictInput::Regular(&h1), &g, &[])?),
        Some(h2) => ("indicator", completeness_verdict(VerdictInput::Indicator(&h1, h2), &g, &c_grid)?),
    };
    let mut statuses: Vec<LabelledStatus> =
        verdict.statuses.iter().map(|(l, s)| LabelledStatus { label: l.clone(), status: s.clone() }).collect();
    let (mut over, mut hull_distance) = (None, None);
    if let Some(h2) = &h2 {
        let hull = label(h1.hull(h2)?, "hull");
        statuses.push(LabelledStatus { label: "hull".into(), status: enclosure_classify(&hull, &g)? });
        hull_distance = Some(g.h().sup_distance(hull.h()));
        over = Some(overcompleteness_test(&h1, h2)?);
    }

    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut r = vec![num(g.h().phi(i)), num(g.h().values()[i]), num(h1.h().values()[i])];
        if let Some(h2) = &h2 {
            r.push(num(h2.h().values()[i]));
        }
        rows.push(r);
    }
    let header: &[&str] = if h2.is_some() { &["phi", "h_G", "h1", "h2"] } else { &["phi", "h_G", "h1"] };
    outdir.write_csv("support.csv", header, &rows)?;
    let rows: Vec<Vec<String>> = statuses
        .iter()
        .map(|s| {
            vec![
                s.label.clone(),
                kind_name(&s.status),
                num(s.status.margin),
                num(s.status.translation[0]),
                num(s.status.translation[1]),
                num(s.status.slack_width),
            ]
        })
        .collect();
    outdir.write_csv("enclosure.csv", &["body", "kind", "margin", "translation_re", "translation_im", "slack_width"], &rows)?;
    if !verdict.mixes.is_empty() {
        let rows: Vec<Vec<String>> =
            verdict.mixes.iter().map(|m| vec![num(m.c), kind_name(&m.status), num(m.status.margin)]).collect();
        outdir.write_csv("mixes.csv", &["c", "kind", "margin"], &rows)?;
    }

    let mut all_periods = spec.periods.clone();
    all_periods.extend_from_slice(periods);
    let spiral = all_periods.iter().map(|p| spiral_spectral_value(*p)).collect::<subharmonic::Result<Vec<_>>>()?;
    if !spiral.is_empty() {
        let rows: Vec<Vec<String>> =
            spiral.iter().map(|s| vec![num(s.period), num(s.rho_min), num(s.alpha), num(s.residual)]).collect();
        outdir.write_csv("spiral.csv", &["period", "rho_min", "alpha", "residual"], &rows)?;
    }

    let mut report = CompleteReport {
        seed: flags.seed,
        command: "complete",
        flags: flags.clone(),
        kind,
        complete: verdict.complete,
        maximal: verdict.maximal,
        extremely_overcomplete: verdict.extremely_overcomplete,
        statuses,
        mixes: verdict.mixes,
        overcompleteness: over,
        hull_distance,
        spiral,
        files: Vec::new(),
    };
    report.files = outdir.files();
    outdir.write_report(&report)?;
    Ok(report)
}

fn kind_name(s: &EnclosureStatus) -> String {
    serde_json::to_value(s.kind).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}
