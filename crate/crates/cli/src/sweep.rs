//! `sweep`: `solve-profile` over a list of exponent triples, in parallel.

use serde::Serialize;

use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::output::RunOutput;
use crate::solve::write_solution;

/// Parses `m,p,N`.
pub fn parse_triple(s: &str) -> Result<(f64, f64, u32), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [m, p, n] = parts.as_slice() else {
        return Err(format!("triple `{s}` needs three components m,p,N"));
    };
    let f = |x: &str| x.parse::<f64>().map_err(|e| format!("bad component `{x}`: {e}"));
    Ok((f(m)?, f(p)?, n.parse::<u32>().map_err(|e| format!("bad N `{n}`: {e}"))?))
}

pub fn subdir(t: (f64, f64, u32)) -> String {
    format!("m{}_p{}_N{}", t.0, t.1, t.2)
}

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub m: f64,
    pub p: f64,
    #[serde(rename = "N")]
    pub n: u32,
    pub dir: String,
    pub k_star: Option<f64>,
    pub xi0: Option<f64>,
    pub flips: Option<usize>,
    pub error: Option<String>,
}

fn one(s: &Settings, t: (f64, f64, u32)) -> CliResult<Entry> {
    let mut sub = s.with_params(t.0, t.1, t.2)?;
    sub.out_dir = s.out_dir.join(subdir(t));
    let mut out = RunOutput::create(&sub.out_dir, sub.formats)?;
    let doc = write_solution(&mut out, &sub)?;
    let summary = serde_json::json!({ "k_star": doc.k_star, "xi0": doc.xi0 });
    out.finish("solve-profile", &sub, &summary)?;
    Ok(Entry {
        m: t.0,
        p: t.1,
        n: t.2,
        dir: subdir(t),
        k_star: Some(doc.k_star),
        xi0: Some(doc.xi0),
        flips: Some(doc.flips),
        error: None,
    })
}

pub fn run(s: &Settings, triples: &[(f64, f64, u32)], jobs: usize) -> CliResult<Vec<Entry>> {
    if triples.is_empty() {
        return Err(CliError::usage(anyhow::anyhow!("give at least one --triple")));
    }
    for t in triples {
        s.with_params(t.0, t.1, t.2)?;
    }
    let jobs = jobs.max(1);
    let mut entries: Vec<Option<Entry>> = vec![None; triples.len()];
    std::thread::scope(|scope| {
        for (chunk_t, chunk_e) in triples.chunks(jobs).zip(entries.chunks_mut(jobs)) {
            let handles: Vec<_> = chunk_t.iter().map(|t| scope.spawn(move || (*t, one(s, *t)))).collect();
            for (slot, h) in chunk_e.iter_mut().zip(handles) {
                let (t, res) = h.join().expect("sweep worker panicked");
                *slot = Some(res.unwrap_or_else(|e| Entry {
                    m: t.0,
                    p: t.1,
                    n: t.2,
                    dir: subdir(t),
                    k_star: None,
                    xi0: None,
                    flips: None,
                    error: Some(e.to_string()),
                }));
            }
        }
    });
    let entries: Vec<Entry> = entries.into_iter().flatten().collect();
    let mut out = RunOutput::create(&s.out_dir, s.formats)?;
    let nan = f64::NAN;
    out.csv(
        "summary.csv",
        &["m", "p", "N", "k_star", "xi0"],
        entries.iter().map(|e| vec![e.m, e.p, e.n as f64, e.k_star.unwrap_or(nan), e.xi0.unwrap_or(nan)]),
        "K* and support edge per triple",
    )?;
    out.json("summary.json", &entries, "per-triple results and subdirectories")?;
    let failed = entries.iter().filter(|e| e.error.is_some()).count();
    let summary = serde_json::json!({ "triples": entries.len(), "failed": failed });
    out.finish("sweep", s, &summary)?;
    if failed > 0 {
        return Err(CliError::numerical(anyhow::anyhow!("{failed} of {} triples failed", entries.len())));
    }
    Ok(entries)
}
