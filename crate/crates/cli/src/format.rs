//! Machine (JSON) and tableau renderings of solution grids.

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unitfrac_core::{Params, SolutionGrid};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed solution JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid solution record: {0}")]
    Params(#[from] unitfrac_core::Error),
}

/// One solution. `rows` run from `b = 0` upward, each from `a = 0` rightward.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub p: u64,
    pub q: u64,
    pub n: u64,
    pub alpha_p: u32,
    pub alpha_q: usize,
    pub kind: String,
    pub height: usize,
    pub rows: Vec<Vec<u64>>,
}

impl SolutionRecord {
    pub fn from_grid(grid: &SolutionGrid) -> Self {
        let params = grid.params();
        Self {
            p: params.p(),
            q: params.q(),
            n: params.n(),
            alpha_p: params.alpha_p(),
            alpha_q: grid.alpha_q().unwrap_or(0),
            kind: grid.kind().as_str().to_string(),
            height: grid.height(),
            rows: grid.rows().iter().map(|r| r.entries().to_vec()).collect(),
        }
    }

    /// Rebuilds the grid. Derived fields (`alpha_q`, `kind`, `height`) are
    /// not trusted; verification recomputes them.
    pub fn to_grid(&self) -> Result<SolutionGrid, FormatError> {
        let params = Params::new(self.p, self.q, self.n, self.alpha_p)?;
        Ok(SolutionGrid::from_entries(params, self.rows.clone()))
    }
}

pub fn to_json(grid: &SolutionGrid) -> String {
    serde_json::to_string(&SolutionRecord::from_grid(grid)).expect("record serializes")
}

/// A JSON array with one compact record per line.
pub fn to_json_list(grids: &[SolutionGrid]) -> String {
    if grids.is_empty() {
        return "[]".to_string();
    }
    let body: Vec<String> = grids.iter().map(|g| format!("  {}", to_json(g))).collect();
    format!("[\n{}\n]", body.join(",\n"))
}

/// Accepts a single record, an array of records, or one record per line.
pub fn parse_records(text: &str) -> Result<Vec<SolutionRecord>, FormatError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        return Ok(serde_json::from_str(trimmed)?);
    }
    let mut out = Vec::new();
    for value in serde_json::Deserializer::from_str(trimmed).into_iter::<SolutionRecord>() {
        out.push(value?);
    }
    Ok(out)
}

/// Top row first, entries space-separated, solutions separated by a blank line.
pub fn to_tableau_list(grids: &[SolutionGrid]) -> String {
    grids.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n\n")
}
