//! `verify`: the invariant catalog, run on fresh computations or on the
//! files of an earlier run.

use std::path::Path;

use hardy_ss_core::phase::{
    center_manifold_p0, center_manifold_q1, critical_points, linearize, Label,
};
use hardy_ss_core::shooting::{phase_trace, verify_no_positive_minima, OutcomeKind, ShootingResult};
use hardy_ss_core::{Params, SelfSimilarProfile};
use serde::Serialize;

use crate::config::Settings;
use crate::dto::load_profile;
use crate::error::{CliError, CliResult};
use crate::evolve::{compute, EvolveOptions};
use crate::output::{RunOutput, MANIFEST};
use crate::solve::solve;

/// `(id, description, applies to --fresh, applies to --from)`.
pub const CATALOG: &[(&str, &str, bool, bool)] = &[
    ("critical-spectra", "eigenvalues at P0, P1 and Q5 match their closed forms (1e-10)", true, false),
    ("center-manifolds", "P0 manifold Y = -2XZ + ..., Q1 manifold y = -p/(N-2)^2 z + ... (1e-12)", true, false),
    ("shooting-bracket", "bisection ends on an interface shot with a sign flip and a bracket within 10 tol_k", true, false),
    ("origin-interface", "origin log slope and interface exponent within 2% of their predictions", true, false),
    ("profile-file", "profile.json parses and passes the profile invariants", false, true),
    ("manifest-files", "every file listed in manifest.json exists", false, true),
    ("profile-shape", "f >= 0, strictly decreasing, no positive local minima", true, true),
    ("phase-monotone", "X and Z decrease and Y stays negative along the profile orbit", true, true),
    ("pde-ordering", "u_eps increases as eps decreases (shared steps, tol_ord from one coarsening)", true, false),
    ("pde-supersolution", "u_eps <= U(., t + tau) for the translated profile", true, false),
];

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub mode: &'static str,
    pub checks: Vec<Check>,
    pub passed: bool,
}

pub fn catalog_text() -> String {
    let mut s = String::new();
    for (id, desc, fresh, from) in CATALOG {
        let modes = match (fresh, from) {
            (true, true) => "fresh, from",
            (true, false) => "fresh",
            _ => "from",
        };
        s.push_str(&format!("{id:<18} [{modes}] {desc}\n"));
    }
    s
}

fn check(id: &'static str, passed: bool, detail: String) -> Check {
    Check { id, passed, detail }
}

fn spectra(par: &Params) -> CliResult<Check> {
    let (m, p, nf) = (par.m(), par.p(), par.nf());
    let cases = [
        (Label::P0, [0.0, -0.5, 0.0]),
        (Label::P1, [-(m - 1.0) / 2.0, 0.5, -(p - 1.0) / 2.0]),
        (Label::Q5, [nf - 2.0, (m - p) * (nf - 2.0) / m, 2.0 + (m - 1.0) * (nf - 2.0) / m]),
    ];
    let mut worst: f64 = 0.0;
    for (label, mut want) in cases {
        let Some(cp) = critical_points(par, &[]).into_iter().find(|c| c.label == label) else {
            return Ok(check("critical-spectra", false, format!("{label} not found")));
        };
        let lin = linearize(par, &cp)?;
        let got = lin.sorted_real_eigenvalues();
        want.sort_by(f64::total_cmp);
        for k in 0..3 {
            worst = worst.max((got[k] - want[k]).abs() / want[k].abs().max(1.0)).max(lin.eigenvalues[k].im.abs());
        }
    }
    Ok(check("critical-spectra", worst <= 1e-10, format!("max error {worst:.1e}")))
}

fn manifolds(par: &Params) -> Check {
    let b = center_manifold_p0(par).b;
    let a = center_manifold_q1(par).a;
    let want = -par.p() / (par.nf() - 2.0).powi(2);
    let ok = (b + 2.0).abs() <= 1e-12 && (a - want).abs() <= 1e-12;
    check("center-manifolds", ok, format!("b = {b}, a = {a} (want {want})"))
}

fn bracket(r: &ShootingResult, tol_k: f64) -> Check {
    let ok = r.outcome.kind == OutcomeKind::Interface && r.diagnostics.flips >= 1 && r.bracket_width <= 10.0 * tol_k;
    check(
        "shooting-bracket",
        ok,
        format!("K* = {}, width {:.1e}, flips {}, outcome {:?}", r.k_star, r.bracket_width, r.diagnostics.flips, r.outcome.kind),
    )
}

fn origin_interface(r: &ShootingResult) -> Check {
    let par = &r.profile.params;
    let d = &r.diagnostics;
    let (Some(o), Some(i)) = (&d.origin_fit, &d.interface_fit) else {
        return check("origin-interface", false, "fits unavailable".into());
    };
    let want_s = -par.log_slope();
    let want_e = par.interface_exponent();
    let es = ((o.slope - want_s) / want_s).abs();
    let ee = ((i.exponent - want_e) / want_e).abs();
    check(
        "origin-interface",
        es <= 0.02 && ee <= 0.02,
        format!("slope {:.5} vs {want_s:.5}, exponent {:.5} vs {want_e:.5}", o.slope, i.exponent),
    )
}

fn shape(prof: &SelfSimilarProfile) -> Check {
    let nonneg = prof.f.iter().all(|f| *f >= 0.0);
    let dec = prof.is_strictly_decreasing(0);
    let minima = verify_no_positive_minima(prof).violations.len();
    check(
        "profile-shape",
        nonneg && dec && minima == 0,
        format!("nonnegative {nonneg}, decreasing {dec}, positive minima {minima}"),
    )
}

fn phase(prof: &SelfSimilarProfile) -> Check {
    let tr = phase_trace(prof, &prof.params);
    check(
        "phase-monotone",
        tr.x_monotone() && tr.z_monotone() && tr.y_negative(),
        format!("max X increase {:.1e}, max Z increase {:.1e}, max Y {:.2e}", tr.max_x_increase, tr.max_z_increase, tr.max_y),
    )
}

pub fn fresh(s: &Settings) -> CliResult<Vec<Check>> {
    let unit = s.params.with_k_hardy(1.0)?;
    let mut out = vec![spectra(&unit)?, manifolds(&unit)];
    let (r, _) = solve(&Settings { params: unit, k_hardy: 1.0, ..s.clone() })?;
    out.push(bracket(&r, s.tol_k));
    out.push(origin_interface(&r));
    out.push(shape(&r.profile));
    out.push(phase(&r.profile));
    let ev = compute(s, &EvolveOptions::default())?;
    let c = &ev.doc.checks;
    out.push(check(
        "pde-ordering",
        c.ordering_violations == 0,
        format!("{} violations, min gap {:.1e}, tol_ord {:.2e}", c.ordering_violations, c.min_gap, c.tol_ord),
    ));
    out.push(check(
        "pde-supersolution",
        c.supersolution_violations.iter().all(|v| *v == 0),
        format!("tau {:.4}, violations {:?}, max u/U {:?}", c.tau, c.supersolution_violations, c.max_ratio),
    ));
    Ok(out)
}

pub fn from_dir(dir: &Path) -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    match load_profile(&dir.join("profile.json")) {
        Ok(prof) => {
            out.push(check("profile-file", true, format!("{} samples", prof.len())));
            out.push(shape(&prof));
            out.push(phase(&prof));
        }
        Err(e) => out.push(check("profile-file", false, e.to_string())),
    }
    let manifest = dir.join(MANIFEST);
    let listed = std::fs::read_to_string(&manifest)
        .map_err(|e| e.to_string())
        .and_then(|t| serde_json::from_str::<serde_json::Value>(&t).map_err(|e| e.to_string()));
    match listed {
        Ok(v) => {
            let files: Vec<&str> = v["files"]
                .as_array()
                .map(|a| a.iter().filter_map(|f| f["path"].as_str()).collect())
                .unwrap_or_default();
            let missing: Vec<&str> = files.iter().copied().filter(|f| !dir.join(f).is_file()).collect();
            out.push(check(
                "manifest-files",
                missing.is_empty(),
                format!("{} listed, missing {:?}", files.len(), missing),
            ));
        }
        Err(e) => out.push(check("manifest-files", false, format!("{}: {e}", manifest.display()))),
    }
    Ok(out)
}

pub fn run(s: &Settings, from: Option<&Path>) -> CliResult<Report> {
    let (mode, checks) = match from {
        Some(dir) => ("from", from_dir(dir)?),
        None => ("fresh", fresh(s)?),
    };
    let passed = checks.iter().all(|c| c.passed);
    let report = Report { mode, checks, passed };
    let mut out = RunOutput::create(&s.out_dir, s.formats)?;
    out.json("verify.json", &report, "invariant report")?;
    let summary = serde_json::json!({ "mode": mode, "passed": passed });
    out.finish("verify", s, &summary)?;
    Ok(report)
}

/// Exit status for a finished report.
pub fn outcome(report: &Report) -> CliResult<()> {
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.id).collect();
        Err(CliError::invariant(format!("failed invariants: {}", failed.join(", "))))
    }
}
