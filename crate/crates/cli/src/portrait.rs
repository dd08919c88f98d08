//! `phase-portrait`.

use hardy_ss_core::ode::Controls;
use hardy_ss_core::phase::{integrate_phase, phase_rhs, PhaseSystem, Termination};
use hardy_ss_core::shooting::phase_trace;
use hardy_ss_core::PhaseState;
use serde::Serialize;

use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::output::RunOutput;
use crate::plots;
use crate::solve::solve;

#[derive(Debug, Clone, Serialize)]
pub struct OrbitDoc {
    pub index: usize,
    pub source: String,
    pub start: [f64; 3],
    pub end: [f64; 3],
    pub samples: usize,
    pub fixed_point: bool,
    pub termination: String,
    pub nearest: Option<(String, f64)>,
    pub x_monotone: bool,
    pub z_monotone: bool,
    /// Whether the orbit stays in `Y < 0` after first entering it.
    pub stays_below_y0: bool,
}

pub struct Orbit {
    pub doc: OrbitDoc,
    pub points: Vec<(f64, [f64; 3])>,
}

/// Parses `X,Y,Z`.
pub fn parse_seed(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("bad seed component `{x}`: {e}")))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        [x, y, z] if *x >= 0.0 && *z >= 0.0 => Ok([*x, *y, *z]),
        [_, _, _] => Err("seeds need X >= 0 and Z >= 0".into()),
        _ => Err(format!("seed `{s}` needs three components X,Y,Z")),
    }
}

fn monotone(points: &[(f64, [f64; 3])], k: usize) -> bool {
    points.windows(2).all(|w| w[1].1[k] <= w[0].1[k] * (1.0 + 1e-9) + 1e-300)
}

fn stays_below(points: &[(f64, [f64; 3])]) -> bool {
    match points.iter().position(|p| p.1[1] < 0.0) {
        Some(i) => points[i..].iter().all(|p| p.1[1] < 0.0),
        None => true,
    }
}

pub fn trace_seed(s: &Settings, index: usize, seed: [f64; 3], span: f64) -> CliResult<Orbit> {
    let par = &s.params.with_k_hardy(1.0)?;
    let v = phase_rhs(par, &PhaseState::new(seed[0], seed[1], seed[2]));
    let fixed = v.iter().all(|c| c.abs() <= 1e-12);
    let ctl = Controls { blowup_norm: 1e8, ..Controls::default() };
    let run = integrate_phase(par, PhaseSystem::Finite, seed, (0.0, span), &ctl)?;
    let termination = match run.termination {
        Termination::SpanEnd => "span-end".to_string(),
        Termination::Entered(l) => format!("entered {l}"),
        Termination::MaxSteps => "max-steps".to_string(),
        Termination::Escaped => "escaped to infinity".to_string(),
    };
    let doc = OrbitDoc {
        index,
        source: "seed".into(),
        start: seed,
        end: run.last(),
        samples: run.samples.len(),
        fixed_point: fixed,
        termination: if fixed { "fixed point".into() } else { termination },
        nearest: run.nearest.map(|(l, d)| (l.to_string(), d)),
        x_monotone: monotone(&run.samples, 0),
        z_monotone: monotone(&run.samples, 2),
        stays_below_y0: stays_below(&run.samples),
    };
    Ok(Orbit { doc, points: run.samples })
}

/// The orbit of the computed profile, parametrized by `ln xi`.
pub fn trace_profile(s: &Settings, index: usize) -> CliResult<Orbit> {
    let unit = s.params.with_k_hardy(1.0)?;
    let s1 = Settings { params: unit, k_hardy: 1.0, ..s.clone() };
    let (r, _) = solve(&s1)?;
    let tr = phase_trace(&r.profile, &unit);
    let points: Vec<(f64, [f64; 3])> = tr
        .states
        .iter()
        .map(|(xi, st)| (xi.ln(), st.coords()))
        .filter(|(_, c)| c.iter().all(|x| x.is_finite()))
        .collect();
    let (first, last) = match (points.first(), points.last()) {
        (Some(a), Some(b)) => (a.1, b.1),
        _ => return Err(CliError::numerical(anyhow::anyhow!("profile orbit is empty"))),
    };
    // for p = 1 the orbit ends on the line (0, -1/2, gamma)
    let (label, d1) = if unit.is_linear_reaction() {
        (format!("P1^gamma({})", last[2]), (last[0].powi(2) + (last[1] + 0.5).powi(2)).sqrt())
    } else {
        ("P1".to_string(), (last[0].powi(2) + (last[1] + 0.5).powi(2) + last[2].powi(2)).sqrt())
    };
    let doc = OrbitDoc {
        index,
        source: format!("profile K* = {}", r.k_star),
        start: first,
        end: last,
        samples: points.len(),
        fixed_point: false,
        termination: "profile edge".into(),
        nearest: Some((label, d1)),
        x_monotone: tr.x_monotone(),
        z_monotone: tr.z_monotone(),
        stays_below_y0: tr.y_negative(),
    };
    Ok(Orbit { doc, points })
}

pub fn run(s: &Settings, seeds: &[[f64; 3]], from_profile: bool, span: f64) -> CliResult<serde_json::Value> {
    if seeds.is_empty() && !from_profile {
        return Err(CliError::usage(anyhow::anyhow!("give at least one --seed or --from-profile")));
    }
    let mut orbits = Vec::new();
    for (i, seed) in seeds.iter().enumerate() {
        orbits.push(trace_seed(s, i, *seed, span)?);
    }
    if from_profile {
        orbits.push(trace_profile(s, orbits.len())?);
    }
    let mut out = RunOutput::create(&s.out_dir, s.formats)?;
    let rows = orbits.iter().flat_map(|o| {
        let stride = (o.points.len() / 20_000).max(1);
        o.points.iter().step_by(stride).map(move |(t, x)| vec![o.doc.index as f64, *t, x[0], x[1], x[2]])
    });
    out.csv("orbits.csv", &["orbit", "eta", "X", "Y", "Z"], rows, "orbit samples")?;
    let docs: Vec<&OrbitDoc> = orbits.iter().map(|o| &o.doc).collect();
    out.json("orbits.json", &docs, "orbit annotations")?;
    out.script("plot_phase.py", &plots::phase_script(), "matplotlib script for orbits.csv")?;
    let summary = serde_json::to_value(&docs).map_err(CliError::numerical)?;
    out.finish("phase-portrait", s, &summary)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_parse_and_validate() {
        assert_eq!(parse_seed("1, -0.5,2").unwrap(), [1.0, -0.5, 2.0]);
        assert!(parse_seed("1,2").is_err());
        assert!(parse_seed("-1,0,0").is_err());
        assert!(parse_seed("a,b,c").is_err());
    }
}
