//! `evolve-pde`.

use hardy_ss_core::pde::{
    check_eps_monotonicity, check_supersolution_bound, find_tau, rescale_hardy, self_similarity_track,
    weak_residual, BumpTest, Evolution, FriendlyGiant, RadialField, RadialGrid, StepControls,
};
use hardy_ss_core::SelfSimilarProfile;
use serde::Serialize;
use std::path::PathBuf;

use crate::config::Settings;
use crate::dto::{load_profile, ParamsDoc};
use crate::error::{CliError, CliResult};
use crate::output::RunOutput;
use crate::plots;
use crate::solve::solve;

#[derive(Debug, Clone, Default)]
pub struct EvolveOptions {
    pub profile: Option<PathBuf>,
    /// Regularization of the self-similarity tracking run, if requested.
    pub track: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridInfo {
    pub r_min: f64,
    #[serde(rename = "R_max")]
    pub r_max: f64,
    pub n: usize,
    pub dim: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct DtPolicy {
    pub scheme: &'static str,
    pub theta: f64,
    pub reaction_factor: f64,
    /// Every eps repeats the step sequence of the smallest one.
    pub shared_steps: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunInfo {
    pub eps: f64,
    pub file: Option<String>,
    pub steps: usize,
    pub masses: Vec<f64>,
    pub max_u: Vec<f64>,
    pub support_radius: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChecksDoc {
    pub tol_ord: f64,
    pub calibration_constant: f64,
    pub ordering_violations: usize,
    pub min_gap: f64,
    pub tau: f64,
    pub supersolution_violations: Vec<usize>,
    pub max_ratio: Vec<f64>,
    pub weak_residual: Option<WeakDoc>,
    pub tracking: Option<TrackDoc>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakDoc {
    pub rho: f64,
    pub t1: f64,
    pub t2: f64,
    pub terms: [f64; 5],
    pub relative: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrackDoc {
    pub eps: f64,
    pub delta: f64,
    pub times: Vec<f64>,
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolutionDoc {
    pub params: ParamsDoc,
    pub eps: Vec<f64>,
    pub grid: GridInfo,
    pub dt_policy: DtPolicy,
    pub times: Vec<f64>,
    /// Hardy scaling used when `k_hardy != 1` (computation at `K = 1`).
    pub lambda: f64,
    pub amplitude: f64,
    pub initial: Bump,
    pub runs: Vec<RunInfo>,
    pub checks: ChecksDoc,
}

#[derive(Debug, Clone, Serialize)]
pub struct Bump {
    pub height: f64,
    pub radius: f64,
}

pub struct EvolveOutcome {
    pub doc: EvolutionDoc,
    /// Evolutions in the original variables, one per sorted eps.
    pub evolutions: Vec<Evolution>,
    pub passed: bool,
}

/// The giant's profile at unit constant.
fn unit_profile(s: &Settings, opts: &EvolveOptions) -> CliResult<SelfSimilarProfile> {
    let prof = match &opts.profile {
        Some(path) => {
            let prof = load_profile(path)?;
            let q = prof.params;
            if (q.m(), q.p(), q.n()) != (s.m, s.p, s.n) {
                return Err(CliError::usage(anyhow::anyhow!(
                    "profile has (m, p, N) = ({}, {}, {}), run has ({}, {}, {})",
                    q.m(),
                    q.p(),
                    q.n(),
                    s.m,
                    s.p,
                    s.n
                )));
            }
            prof
        }
        None => {
            let unit = s.params.with_k_hardy(1.0)?;
            solve(&Settings { params: unit, k_hardy: 1.0, ..s.clone() })?.0.profile
        }
    };
    if prof.params.k_hardy() == 1.0 {
        Ok(prof)
    } else {
        Ok(prof.hardy_rescaled(1.0)?)
    }
}

pub fn compute(s: &Settings, opts: &EvolveOptions) -> CliResult<EvolveOutcome> {
    let mut eps = s.eps.clone();
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    let grid = RadialGrid::origin(s.r_max, s.cells, s.n)?;
    let u0 = RadialField::bump(grid.clone(), s.params, eps[0], s.height, s.radius)?;
    let (scaling, v0) = rescale_hardy(&u0)?;
    let horizon = scaling.lambda * s.t_end;
    let controls = StepControls::default().with_uniform_snapshots(0.0, horizon, s.snapshots);

    let profile = unit_profile(s, opts)?;
    let rep = check_eps_monotonicity(&v0, &eps, horizon, &controls, true)?;
    let tau = find_tau(&profile, &v0)?;
    let giant = FriendlyGiant::new(profile.clone(), tau)?;
    let sup: Vec<_> = rep.evolutions.iter().map(|ev| check_supersolution_bound(ev, &giant, rep.tol_ord)).collect();

    let first = &rep.evolutions[0];
    let rho = 0.5 * s.r_max;
    let times = first.times();
    let t1 = times.iter().copied().find(|t| *t >= 0.25 * horizon).unwrap_or(times[0]);
    let weak = match weak_residual(first, &BumpTest { rho, growth: 1.0 }, t1, horizon, eps[0]) {
        Ok(w) => Some(WeakDoc { rho, t1: t1 / scaling.lambda, t2: s.t_end, terms: w.terms, relative: w.residual }),
        Err(_) => None,
    };
    let tracking = if let Some(track_eps) = opts.track {
        let g = FriendlyGiant::new(profile, 1.0)?;
        let tr = self_similarity_track(&g, track_eps, horizon, grid.clone(), 0.1, &controls)?;
        Some(TrackDoc {
            eps: tr.eps,
            delta: tr.delta,
            times: tr.times.iter().map(|t| t / scaling.lambda).collect(),
            deviations: tr.deviations,
            max_deviation: tr.max_deviation,
        })
    } else {
        None
    };

    let evolutions: Vec<Evolution> = rep.evolutions.iter().map(|ev| scaling.undo_evolution(ev)).collect();
    let passed = rep.passed() && sup.iter().all(|x| x.passed());
    let doc = EvolutionDoc {
        params: (&s.params).into(),
        eps: eps.clone(),
        grid: GridInfo { r_min: grid.r_min, r_max: grid.r_max, n: grid.n, dim: grid.dim },
        dt_policy: DtPolicy {
            scheme: "explicit Euler, cell-centered finite volumes",
            theta: controls.theta,
            reaction_factor: controls.reaction_factor,
            shared_steps: true,
        },
        times: evolutions[0].times(),
        lambda: scaling.lambda,
        amplitude: scaling.amplitude,
        initial: Bump { height: s.height, radius: s.radius },
        runs: evolutions.iter().map(run_info).collect(),
        checks: ChecksDoc {
            tol_ord: rep.tol_ord,
            calibration_constant: rep.calibration.constant,
            ordering_violations: rep.violations.len(),
            min_gap: rep.min_gap,
            tau,
            supersolution_violations: sup.iter().map(|x| x.violations.len()).collect(),
            max_ratio: sup.iter().map(|x| x.max_ratio).collect(),
            weak_residual: weak,
            tracking,
        },
    };
    Ok(EvolveOutcome { doc, evolutions, passed })
}

fn run_info(ev: &Evolution) -> RunInfo {
    let fields: Vec<RadialField> = (0..ev.snapshots.len()).map(|k| ev.field(k)).collect();
    RunInfo {
        eps: ev.eps,
        file: None,
        steps: ev.steps(),
        masses: ev.masses(),
        max_u: fields.iter().map(|f| f.max()).collect(),
        support_radius: fields.iter().map(|f| f.support_radius()).collect(),
    }
}

pub fn snapshot_file(eps: f64) -> String {
    format!("snapshots_eps_{eps}.csv")
}

pub fn run(s: &Settings, opts: &EvolveOptions) -> CliResult<serde_json::Value> {
    let mut o = compute(s, opts)?;
    let mut out = RunOutput::create(&s.out_dir, s.formats)?;
    let mut files = Vec::new();
    for (info, ev) in o.doc.runs.iter_mut().zip(&o.evolutions) {
        let name = snapshot_file(ev.eps);
        let rows = ev.snapshots.iter().flat_map(|sn| ev.grid.r.iter().zip(&sn.u).map(move |(r, u)| vec![sn.t, *r, *u]));
        out.csv(&name, &["t", "r", "u"], rows, &format!("snapshots for eps = {}", ev.eps))?;
        if s.formats.csv {
            info.file = Some(name.clone());
        }
        files.push((ev.eps, name));
    }
    out.json("evolution.json", &o.doc, "run description, per-eps diagnostics and checks")?;
    out.script("plot_pde.py", &plots::pde_script(&files), "matplotlib script for the snapshot CSVs")?;
    let c = &o.doc.checks;
    let summary = serde_json::json!({
        "passed": o.passed,
        "ordering_violations": c.ordering_violations,
        "supersolution_violations": c.supersolution_violations,
        "tau": c.tau,
        "lambda": o.doc.lambda,
        "weak_residual": c.weak_residual.as_ref().map(|w| w.relative),
        "tracking_max_deviation": c.tracking.as_ref().map(|t| t.max_deviation),
    });
    out.finish("evolve-pde", s, &summary)?;
    if !o.passed {
        return Err(CliError::invariant(format!(
            "PDE checks failed: {} ordering violations, supersolution violations {:?}",
            c.ordering_violations, c.supersolution_violations
        )));
    }
    Ok(summary)
}
