//! Serializable documents for profiles and results.

use std::path::Path;

use hardy_ss_core::{Params, SelfSimilarProfile, SupportEdge};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamsDoc {
    pub m: f64,
    pub p: f64,
    #[serde(rename = "N")]
    pub n: u32,
    pub k_hardy: f64,
}

impl From<&Params> for ParamsDoc {
    fn from(p: &Params) -> Self {
        Self { m: p.m(), p: p.p(), n: p.n(), k_hardy: p.k_hardy() }
    }
}

impl ParamsDoc {
    pub fn to_params(self) -> CliResult<Params> {
        Ok(Params::new(self.m, self.p, self.n, self.k_hardy)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeDoc {
    Finite(f64),
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDoc {
    pub xi: Vec<f64>,
    pub f: Vec<f64>,
}

/// `profile.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDoc {
    pub params: ParamsDoc,
    pub xi0: EdgeDoc,
    #[serde(rename = "K_const")]
    pub k_const: f64,
    pub grid: GridDoc,
}

impl From<&SelfSimilarProfile> for ProfileDoc {
    fn from(p: &SelfSimilarProfile) -> Self {
        Self {
            params: (&p.params).into(),
            xi0: match p.edge {
                SupportEdge::Finite(x) => EdgeDoc::Finite(x),
                SupportEdge::Unbounded => EdgeDoc::Unbounded,
            },
            k_const: p.k_const,
            grid: GridDoc { xi: p.xi.clone(), f: p.f.clone() },
        }
    }
}

impl ProfileDoc {
    /// Rebuilds the profile, re-checking all of its invariants.
    pub fn to_profile(&self) -> CliResult<SelfSimilarProfile> {
        let edge = match self.xi0 {
            EdgeDoc::Finite(x) => SupportEdge::Finite(x),
            EdgeDoc::Unbounded => SupportEdge::Unbounded,
        };
        Ok(SelfSimilarProfile::new(
            self.params.to_params()?,
            self.grid.xi.clone(),
            self.grid.f.clone(),
            edge,
            self.k_const,
        )?)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(anyhow::anyhow!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::invariant(format!("{} is not a valid profile document: {e}", path.display())))
    }
}

/// Reads and validates a profile file; any defect is an invariant failure.
pub fn load_profile(path: &Path) -> CliResult<SelfSimilarProfile> {
    ProfileDoc::load(path)?
        .to_profile()
        .map_err(|e| CliError::invariant(format!("{}: {e}", path.display())))
}
