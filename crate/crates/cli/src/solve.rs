//! `solve-profile`.

use hardy_ss_core::shooting::{shoot, OutcomeKind, ShootConfig, ShootingResult, Side};
use hardy_ss_core::SelfSimilarProfile;
use serde::Serialize;

use crate::config::Settings;
use crate::dto::{ParamsDoc, ProfileDoc};
use crate::error::CliResult;
use crate::output::RunOutput;
use crate::plots;

#[derive(Debug, Clone, Serialize)]
pub struct FitDoc {
    pub origin_slope: Option<f64>,
    pub origin_slope_expected: f64,
    pub origin_decades: Option<f64>,
    pub k_estimate: Option<f64>,
    pub interface_exponent: Option<f64>,
    pub interface_exponent_expected: f64,
    pub interface_amplitude: Option<f64>,
    pub interface_amplitude_expected: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultDoc {
    pub params: ParamsDoc,
    /// Origin constant of the unit-constant problem.
    pub k_star: f64,
    pub bracket: (f64, f64),
    pub bracket_width: f64,
    /// Support edge after the Hardy rescaling.
    pub xi0: f64,
    pub k_const: f64,
    pub outcome: String,
    pub iterations: usize,
    pub flips: usize,
    pub samples: Vec<(f64, String)>,
    pub launch_xi: f64,
    pub launch_mismatch: f64,
    pub ode_residual: Option<f64>,
    pub fits: FitDoc,
}

fn side_name(s: Side) -> String {
    match s {
        Side::Positive => "positive",
        Side::Zero => "zero",
        Side::Undecided => "undecided",
    }
    .to_string()
}

fn kind_name(k: OutcomeKind) -> &'static str {
    match k {
        OutcomeKind::PositiveLimit => "positive-limit",
        OutcomeKind::ZeroCrossing => "zero-crossing",
        OutcomeKind::Interface => "interface",
        OutcomeKind::Inconclusive => "inconclusive",
    }
}

pub fn shoot_config(s: &Settings) -> ShootConfig {
    let mut c = ShootConfig { tol_k: s.tol_k, ..ShootConfig::default() };
    c.shot.xi_start = s.xi_start;
    c.shot.rtol = s.rtol;
    c
}

/// Shoots with the unit constant and rescales to the requested one.
pub fn solve(s: &Settings) -> CliResult<(ShootingResult, SelfSimilarProfile)> {
    let unit = s.params.with_k_hardy(1.0)?;
    let r = shoot(&unit, &shoot_config(s))?;
    let prof = if s.k_hardy == 1.0 { r.profile.clone() } else { r.profile.hardy_rescaled(s.k_hardy)? };
    Ok((r, prof))
}

pub fn result_doc(s: &Settings, r: &ShootingResult, prof: &SelfSimilarProfile) -> ResultDoc {
    let d = &r.diagnostics;
    let par = &s.params;
    ResultDoc {
        params: par.into(),
        k_star: r.k_star,
        bracket: r.bracket,
        bracket_width: r.bracket_width,
        xi0: prof.edge.finite().unwrap_or(f64::INFINITY),
        k_const: prof.k_const,
        outcome: kind_name(r.outcome.kind).to_string(),
        iterations: d.iterations,
        flips: d.flips,
        samples: d.samples.iter().map(|(k, side)| (*k, side_name(*side))).collect(),
        launch_xi: d.launch_xi,
        launch_mismatch: d.launch_mismatch,
        ode_residual: d.residual.as_ref().map(|x| x.max),
        fits: FitDoc {
            origin_slope: d.origin_fit.as_ref().map(|o| o.slope),
            origin_slope_expected: -r.profile.params.log_slope(),
            origin_decades: d.origin_fit.as_ref().map(|o| o.decades),
            k_estimate: d.origin_fit.as_ref().map(|o| o.k_est),
            interface_exponent: d.interface_fit.as_ref().map(|i| i.exponent),
            interface_exponent_expected: par.interface_exponent(),
            interface_amplitude: d.interface_fit.as_ref().map(|i| i.amplitude),
            interface_amplitude_expected: par.interface_amplitude(),
        },
    }
}

/// Writes the profile files into `out`; returns the result document.
pub fn write_solution(out: &mut RunOutput, s: &Settings) -> CliResult<ResultDoc> {
    let (r, prof) = solve(s)?;
    let doc = result_doc(s, &r, &prof);
    out.csv(
        "profile.csv",
        &["xi", "f"],
        prof.xi.iter().zip(&prof.f).map(|(x, f)| vec![*x, *f]),
        "profile samples",
    )?;
    out.json("profile.json", &ProfileDoc::from(&prof), "profile document (params, xi0, K_const, grid)")?;
    out.json("result.json", &doc, "shooting result and diagnostics")?;
    out.script(
        "plot_profile.py",
        &plots::profile_script(s.m, s.p, s.n, prof.k_const, prof.edge.finite(), s.k_hardy),
        "matplotlib script for profile.csv",
    )?;
    Ok(doc)
}

pub fn run(s: &Settings) -> CliResult<serde_json::Value> {
    let mut out = RunOutput::create(&s.out_dir, s.formats)?;
    let doc = write_solution(&mut out, s)?;
    let summary = serde_json::json!({
        "k_star": doc.k_star,
        "xi0": doc.xi0,
        "bracket_width": doc.bracket_width,
        "flips": doc.flips,
    });
    out.finish("solve-profile", s, &summary)?;
    Ok(summary)
}
