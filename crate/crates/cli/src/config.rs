//! Run configuration: command-line flags over a flat key/value config file
//! over built-in defaults. `HARDY_SS_OUTDIR` replaces the output directory
//! unless `--out-dir` is given.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use hardy_ss_core::Params;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const OUTDIR_ENV: &str = "HARDY_SS_OUTDIR";

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Flat key/value config file (TOML syntax, no tables).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Comma-separated subset of csv,json,plotscript.
    #[arg(long, global = true, value_delimiter = ',')]
    pub formats: Option<Vec<String>>,
    /// Write JSON only (no CSV, no plot scripts).
    #[arg(long, global = true)]
    pub json_only: bool,
    #[arg(long, global = true)]
    pub m: Option<f64>,
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long = "N", global = true)]
    pub n: Option<u32>,
    #[arg(long, global = true)]
    pub k_hardy: Option<f64>,
}

/// Numerical controls shared by the commands; every field can be set in the
/// config file under the same name.
#[derive(Debug, Clone, Default, Args)]
pub struct NumericArgs {
    /// Bisection tolerance on the origin constant K.
    #[arg(long, global = true)]
    pub tol_k: Option<f64>,
    #[arg(long, global = true)]
    pub xi_start: Option<f64>,
    #[arg(long, global = true)]
    pub rtol: Option<f64>,
    /// Radial cells of the PDE grid.
    #[arg(long, global = true)]
    pub cells: Option<usize>,
    #[arg(long, global = true)]
    pub r_max: Option<f64>,
    #[arg(long, global = true)]
    pub t_end: Option<f64>,
    /// Comma-separated regularization parameters.
    #[arg(long, global = true, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub snapshots: Option<usize>,
    /// Height M of the initial bump M (1 - (r/R)^2)_+^2.
    #[arg(long, global = true)]
    pub height: Option<f64>,
    /// Radius R of the initial bump.
    #[arg(long, global = true)]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
    pub plotscript: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    #[serde(skip)]
    pub params: Params,
    pub m: f64,
    pub p: f64,
    #[serde(rename = "N")]
    pub n: u32,
    pub k_hardy: f64,
    pub out_dir: PathBuf,
    pub formats: Formats,
    pub tol_k: f64,
    pub xi_start: f64,
    pub rtol: f64,
    pub cells: usize,
    pub r_max: f64,
    pub t_end: f64,
    pub eps: Vec<f64>,
    pub snapshots: usize,
    pub height: f64,
    pub radius: f64,
}

const KEYS: &[&str] = &[
    "m", "p", "N", "k_hardy", "out_dir", "formats", "tol_k", "xi_start", "rtol", "cells", "r_max",
    "t_end", "eps", "snapshots", "height", "radius",
];

/// Parses a flat TOML document into scalar or array values.
pub fn read_config(path: &Path) -> CliResult<BTreeMap<String, toml::Value>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(anyhow::anyhow!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, toml::Value>> {
    let table: toml::Table = text.parse().map_err(|e| CliError::usage(anyhow::anyhow!("config: {e}")))?;
    let mut out = BTreeMap::new();
    for (k, v) in table {
        if !KEYS.contains(&k.as_str()) {
            return Err(CliError::usage(anyhow::anyhow!("config: unknown key `{k}`")));
        }
        if v.is_table() {
            return Err(CliError::usage(anyhow::anyhow!("config: `{k}` must be a plain value")));
        }
        out.insert(k, v);
    }
    Ok(out)
}

fn num(v: &toml::Value, key: &str) -> CliResult<f64> {
    match v {
        toml::Value::Float(x) => Ok(*x),
        toml::Value::Integer(i) => Ok(*i as f64),
        _ => Err(CliError::usage(anyhow::anyhow!("config: `{key}` must be a number"))),
    }
}

fn list(v: &toml::Value, key: &str) -> CliResult<Vec<f64>> {
    match v {
        toml::Value::Array(a) => a.iter().map(|x| num(x, key)).collect(),
        other => Ok(vec![num(other, key)?]),
    }
}

fn strings(v: &toml::Value, key: &str) -> CliResult<Vec<String>> {
    let bad = || CliError::usage(anyhow::anyhow!("config: `{key}` must be a string list"));
    match v {
        toml::Value::Array(a) => a.iter().map(|x| x.as_str().map(String::from).ok_or_else(bad)).collect(),
        toml::Value::String(s) => Ok(s.split(',').map(|x| x.trim().to_string()).collect()),
        _ => Err(bad()),
    }
}

fn parse_formats(names: &[String]) -> CliResult<Formats> {
    let mut f = Formats { csv: false, json: false, plotscript: false };
    for n in names {
        match n.trim() {
            "csv" => f.csv = true,
            "json" => f.json = true,
            "plotscript" => f.plotscript = true,
            other => return Err(CliError::usage(anyhow::anyhow!("unknown format `{other}`"))),
        }
    }
    Ok(f)
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::usage(anyhow::anyhow!("{name} must be positive, got {v}")))
    }
}

impl Settings {
    /// Resolves flags, config file, environment and defaults for a command
    /// whose default output directory is `default_dir`.
    pub fn resolve(common: &CommonArgs, numeric: &NumericArgs, default_dir: &str) -> CliResult<Self> {
        let file = match &common.config {
            Some(p) => read_config(p)?,
            None => BTreeMap::new(),
        };
        let get = |k: &str| file.get(k);
        let pick = |flag: Option<f64>, key: &str, default: f64| -> CliResult<f64> {
            match (flag, get(key)) {
                (Some(v), _) => Ok(v),
                (None, Some(v)) => num(v, key),
                (None, None) => Ok(default),
            }
        };
        let m = pick(common.m, "m", 2.0)?;
        let p = pick(common.p, "p", 1.0)?;
        let n = pick(common.n.map(f64::from), "N", 3.0)?;
        if n.fract() != 0.0 || n < 0.0 {
            return Err(CliError::usage(anyhow::anyhow!("N must be an integer, got {n}")));
        }
        let n = n as u32;
        let k_hardy = pick(common.k_hardy, "k_hardy", 1.0)?;
        let params = Params::new(m, p, n, k_hardy)?;

        let out_dir = match (&common.out_dir, std::env::var_os(OUTDIR_ENV), get("out_dir")) {
            (Some(d), _, _) => d.clone(),
            (None, Some(env), _) => PathBuf::from(env),
            (None, None, Some(v)) => PathBuf::from(
                v.as_str().ok_or_else(|| CliError::usage(anyhow::anyhow!("config: `out_dir` must be a string")))?,
            ),
            (None, None, None) => PathBuf::from(default_dir),
        };
        let mut formats = match (&common.formats, get("formats")) {
            (Some(f), _) => parse_formats(f)?,
            (None, Some(v)) => parse_formats(&strings(v, "formats")?)?,
            (None, None) => Formats { csv: true, json: true, plotscript: true },
        };
        if common.json_only {
            formats = Formats { csv: false, json: true, plotscript: false };
        }
        let eps = match (&numeric.eps, get("eps")) {
            (Some(e), _) => e.clone(),
            (None, Some(v)) => list(v, "eps")?,
            (None, None) => vec![0.2, 0.1, 0.05],
        };
        if eps.is_empty() {
            return Err(CliError::usage(anyhow::anyhow!("eps list is empty")));
        }
        for e in &eps {
            positive("eps", *e)?;
        }
        let count = |flag: Option<usize>, key: &str, default: usize| -> CliResult<usize> {
            let v = pick(flag.map(|x| x as f64), key, default as f64)?;
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(CliError::usage(anyhow::anyhow!("{key} must be a positive integer")))
            }
        };
        Ok(Self {
            params,
            m,
            p,
            n,
            k_hardy,
            out_dir,
            formats,
            tol_k: positive("tol_k", pick(numeric.tol_k, "tol_k", 1e-8)?)?,
            xi_start: positive("xi_start", pick(numeric.xi_start, "xi_start", 1e-6)?)?,
            rtol: positive("rtol", pick(numeric.rtol, "rtol", 1e-11)?)?,
            cells: count(numeric.cells, "cells", 512)?,
            r_max: positive("r_max", pick(numeric.r_max, "r_max", 8.0)?)?,
            t_end: positive("t_end", pick(numeric.t_end, "t_end", 1.0)?)?,
            eps,
            snapshots: count(numeric.snapshots, "snapshots", 20)?,
            height: positive("height", pick(numeric.height, "height", 1.0)?)?,
            radius: positive("radius", pick(numeric.radius, "radius", 1.0)?)?,
        })
    }

    /// The same settings with other exponents.
    pub fn with_params(&self, m: f64, p: f64, n: u32) -> CliResult<Self> {
        let mut s = self.clone();
        s.params = Params::new(m, p, n, self.k_hardy)?;
        s.m = m;
        s.p = p;
        s.n = n;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_config_parses() {
        let c = parse_config("m = 3\np = 2.0\nN = 4\neps = [0.1, 0.2]\nformats = \"json,csv\"\n").unwrap();
        assert_eq!(num(&c["m"], "m").unwrap(), 3.0);
        assert_eq!(list(&c["eps"], "eps").unwrap(), vec![0.1, 0.2]);
        assert_eq!(strings(&c["formats"], "formats").unwrap(), vec!["json", "csv"]);
    }

    #[test]
    fn nested_or_unknown_keys_are_rejected() {
        assert!(parse_config("[section]\nm = 2\n").is_err());
        assert!(parse_config("bogus = 1\n").is_err());
    }

    #[test]
    fn flags_override_file_and_defaults() {
        let dir = std::env::temp_dir().join(format!("hardy-ss-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.toml");
        std::fs::write(&path, "m = 3\np = 2\nN = 4\ncells = 128\n").unwrap();
        let common = CommonArgs {
            config: Some(path),
            out_dir: Some(dir.clone()),
            m: Some(2.5),
            ..Default::default()
        };
        let s = Settings::resolve(&common, &NumericArgs::default(), "out").unwrap();
        assert_eq!((s.m, s.p, s.n, s.cells), (2.5, 2.0, 4, 128));
        assert_eq!(s.t_end, 1.0);
        assert_eq!(s.out_dir, dir);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn invalid_values_are_usage_errors() {
        let common = CommonArgs { p: Some(2.0), out_dir: Some("x".into()), ..Default::default() };
        let e = Settings::resolve(&common, &NumericArgs::default(), "out").unwrap_err();
        assert_eq!(e.code(), 2);
        let numeric = NumericArgs { tol_k: Some(-1.0), ..Default::default() };
        let common = CommonArgs { out_dir: Some("x".into()), ..Default::default() };
        assert_eq!(Settings::resolve(&common, &numeric, "out").unwrap_err().code(), 2);
    }

    #[test]
    fn json_only_overrides_formats() {
        let common = CommonArgs {
            json_only: true,
            formats: Some(vec!["csv".into()]),
            out_dir: Some("x".into()),
            ..Default::default()
        };
        let s = Settings::resolve(&common, &NumericArgs::default(), "out").unwrap();
        assert_eq!(s.formats, Formats { csv: false, json: true, plotscript: false });
    }
}
