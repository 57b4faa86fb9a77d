//! Scenario files.
//!
//! A scenario is a TOML document with a few top-level keys and one table per
//! ingredient:
//!
//! ```toml
//! seed = 7
//! regime = "algorithm2"        # exact | eps_inexact | algorithm1 | algorithm2
//! x0 = [1.0]
//! out_dir = "out/quadratic"    # optional
//!
//! [objective]
//! kind = "quadratic"           # quadratic | abs | double_well | l1_quadratic | entrepreneur
//! lower = [-2.0]
//! upper = [2.0]
//!
//! [quasi]
//! kind = "euclidean"           # euclidean | asym_l1
//!
//! [gamma]
//! alpha = 2.0
//!
//! [solver]
//! lambda = 1.0
//! sigma = 0.2
//! ```
//!
//! Unknown keys are rejected. Every key is listed in the README.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub seed: u64,
    pub regime: String,
    pub x0: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    pub objective: ObjectiveSpec,
    #[serde(default)]
    pub quasi: QuasiSpec,
    #[serde(default)]
    pub gamma: GammaSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub trap: TrapSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kl: Option<KlSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveSpec {
    pub kind: String,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub price: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wages: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantity_exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasiSpec {
    #[serde(default = "default_quasi_kind")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_plus: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_minus: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

impl Default for QuasiSpec {
    fn default() -> Self {
        QuasiSpec {
            kind: default_quasi_kind(),
            h_plus: None,
            h_minus: None,
            scale: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaSpec {
    #[serde(default = "default_gamma_kind")]
    pub kind: String,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Upper end of the step range for the curvature bound (default 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_bar: Option<f64>,
    /// Ratio `r ∈ (0, 1)` of the curvature bound (default 0.5).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

fn default_quasi_kind() -> String {
    "euclidean".to_owned()
}

fn default_gamma_kind() -> String {
    "power".to_owned()
}

fn default_alpha() -> f64 {
    2.0
}

impl Default for GammaSpec {
    fn default() -> Self {
        GammaSpec {
            kind: default_gamma_kind(),
            alpha: default_alpha(),
            q_bar: None,
            r: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_hi: Option<f64>,
    /// `constant`, `periodic` or `random`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_schedule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// `zero`, `constant`, `geometric` or `summable`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_schedule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine_sweeps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retry_budget: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    /// λ* = lambda_factor·λ_∞ unless `lambda_star` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_star: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KlSpec {
    pub theta: f64,
    pub c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    pub reference: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<Vec<f64>>>,
    /// Cap on the cross-product size (default 256).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_runs: Option<usize>,
}

pub const DEFAULT_MAX_RUNS: usize = 256;

impl SweepSpec {
    /// Number of runs in the cross product.
    pub fn size(&self) -> usize {
        let len = |v: &Option<Vec<f64>>| v.as_ref().map_or(1, Vec::len);
        len(&self.alpha) * len(&self.sigma) * len(&self.lambda) * self.x0.as_ref().map_or(1, Vec::len)
    }
}

/// A problem tied to a dotted key path such as `gamma.alpha`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for SemanticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}", list(.0))]
    Semantic(Vec<SemanticError>),
}

fn list(errors: &[SemanticError]) -> String {
    let mut out = format!("{} configuration error(s):", errors.len());
    for e in errors {
        out.push_str("\n  ");
        out.push_str(&e.to_string());
    }
    out
}

impl ConfigError {
    /// Semantic errors, if any.
    pub fn semantic(&self) -> &[SemanticError] {
        match self {
            ConfigError::Semantic(errors) => errors,
            ConfigError::Syntax { .. } => &[],
        }
    }
}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

/// Reads the TOML structure without semantic validation.
pub fn parse_structure(text: &str) -> Result<ScenarioConfig, ConfigError> {
    toml::from_str(text).map_err(|e: toml::de::Error| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        ConfigError::Syntax {
            line,
            column,
            message: e.message().trim().to_owned(),
        }
    })
}

/// Parses and fully validates a scenario, reporting every semantic problem.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let config = parse_structure(text)?;
    crate::scenario::Scenario::build(&config)?;
    Ok(config)
}

/// Canonical TOML text; `parse_config(&print_config(c)) == c` for valid `c`.
pub fn print_config(config: &ScenarioConfig) -> String {
    toml::to_string(config).expect("scenario configs always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_and_column() {
        let text = "a = 1\nbb = [\n  2,";
        assert_eq!(line_column(text, 0), (1, 1));
        assert_eq!(line_column(text, 6), (2, 1));
        assert_eq!(line_column(text, 11), (2, 6));
    }

    #[test]
    fn sweep_size_is_the_cross_product() {
        let s = SweepSpec {
            alpha: Some(vec![1.5, 2.0]),
            x0: Some(vec![vec![0.1], vec![0.2], vec![0.3]]),
            ..SweepSpec::default()
        };
        assert_eq!(s.size(), 6);
        assert_eq!(SweepSpec::default().size(), 1);
    }
}
