//! Experiment configuration: TOML schema, defaults, and validation.

use serde::{Deserialize, Serialize};
use spinqpt::sparse::{required_bytes, DEFAULT_MEMORY_BUDGET};
use spinqpt::{ControlSchedule, SpinNetwork};

use crate::error::{CliError, Result};

/// Environment variable overriding the memory budget (bytes) used to
/// reject configurations whose Hilbert space would not fit.
pub const MEMORY_BUDGET_ENV: &str = "SPINQPT_MEMORY_BUDGET";

/// Largest supported register; `2^n` state vectors beyond this are outside
/// the supported sweep range regardless of budget.
pub const MAX_SITES: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// "triangle", "chain" (nearest + next-nearest neighbors), or "custom".
    #[serde(default = "d_topology")]
    pub topology: String,
    #[serde(default = "d_n")]
    pub n: usize,
    /// Explicit edge list, custom topology only.
    #[serde(default)]
    pub edges: Option<Vec<(usize, usize)>>,
    /// Optional per-edge multipliers on the scheduled coupling J(t),
    /// ordered like the normalized (sorted) edge list.
    #[serde(default)]
    pub j_factors: Option<Vec<f64>>,
    #[serde(default = "d_t_final")]
    pub t_final_ns: f64,
    #[serde(default = "d_five")]
    pub delta_max_ghz: f64,
    #[serde(default = "d_five")]
    pub j_max_ghz: f64,
    #[serde(default = "d_floor")]
    pub delta_floor_ghz: f64,
    #[serde(default = "d_floor")]
    pub j_floor_ghz: f64,
    #[serde(default = "d_grid")]
    pub grid_points: usize,
    /// Finite-difference stencil width for the fidelity susceptibility,
    /// in sweep-fraction units.
    #[serde(default = "d_delta_s")]
    pub delta_s: f64,
    #[serde(default = "d_gap_tol")]
    pub gap_tol_ghz: f64,
    /// Fixed integration step of the Schrodinger propagator, ns.
    #[serde(default = "d_dt")]
    pub dt_ns: f64,
    /// Seed for the optional shot-sampling layer.
    #[serde(default = "d_seed")]
    pub seed: u64,
    /// Finite measurement shots drawn from the final moment distribution;
    /// 0 disables sampling (distributions are exact).
    #[serde(default)]
    pub shots: u64,
    #[serde(default = "d_fidelity")]
    pub adiabatic_fidelity_threshold: f64,
    #[serde(default)]
    pub metrics: MetricsConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsConfig {
    #[serde(default = "d_true")]
    pub chi: bool,
    #[serde(default = "d_true")]
    pub witness: bool,
    #[serde(default = "d_true", rename = "macro")]
    pub macro_measure: bool,
    /// Direct Schrodinger integration; off by default (slow at small dt).
    #[serde(default)]
    pub dynamics: bool,
}

fn d_topology() -> String {
    "triangle".into()
}
fn d_n() -> usize {
    3
}
fn d_t_final() -> f64 {
    50.0
}
fn d_five() -> f64 {
    5.0
}
fn d_floor() -> f64 {
    5e-6
}
fn d_grid() -> usize {
    101
}
fn d_delta_s() -> f64 {
    1e-3
}
fn d_gap_tol() -> f64 {
    1e-9
}
fn d_dt() -> f64 {
    5e-5
}
fn d_seed() -> u64 {
    7
}
fn d_fidelity() -> f64 {
    0.99
}
fn d_true() -> bool {
    true
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            chi: true,
            witness: true,
            macro_measure: true,
            dynamics: false,
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        validate_config("").expect("empty config resolves to defaults")
    }
}

/// Parses, defaults, and range-checks a TOML config. Error messages name
/// the offending key.
pub fn validate_config(raw: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig =
        toml::from_str(raw).map_err(|e| CliError::Config(e.to_string()))?;
    cfg.check()?;
    Ok(cfg)
}

impl ExperimentConfig {
    fn check(&self) -> Result<()> {
        let bad = |key: &str, why: String| Err(CliError::Config(format!("{key}: {why}")));
        match self.topology.as_str() {
            "triangle" => {
                if self.n != 3 {
                    return bad("n", format!("must be 3 for topology \"triangle\", got {}", self.n));
                }
                if self.edges.is_some() {
                    return bad("edges", "only valid for topology \"custom\"".into());
                }
            }
            "chain" => {
                if self.edges.is_some() {
                    return bad("edges", "only valid for topology \"custom\"".into());
                }
            }
            "custom" => {
                if self.edges.is_none() {
                    return bad("edges", "required for topology \"custom\"".into());
                }
            }
            other => {
                return bad(
                    "topology",
                    format!("expected \"triangle\", \"chain\", or \"custom\", got \"{other}\""),
                )
            }
        }
        if self.n < 1 || self.n > MAX_SITES {
            return bad("n", format!("must be in 1..={MAX_SITES}, got {}", self.n));
        }
        if self.metrics.witness && self.n < 3 {
            return bad("metrics.witness", format!("needs n >= 3, got n = {}", self.n));
        }
        let positive: [(&str, f64); 6] = [
            ("t_final_ns", self.t_final_ns),
            ("delta_floor_ghz", self.delta_floor_ghz),
            ("j_floor_ghz", self.j_floor_ghz),
            ("gap_tol_ghz", self.gap_tol_ghz),
            ("dt_ns", self.dt_ns),
            ("adiabatic_fidelity_threshold", self.adiabatic_fidelity_threshold),
        ];
        for (key, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return bad(key, format!("must be a positive finite number, got {v}"));
            }
        }
        for (key, v) in [("delta_max_ghz", self.delta_max_ghz), ("j_max_ghz", self.j_max_ghz)] {
            if !(v >= 0.0) || !v.is_finite() {
                return bad(key, format!("must be nonnegative and finite, got {v}"));
            }
        }
        if self.grid_points < 2 {
            return bad("grid_points", format!("must be >= 2, got {}", self.grid_points));
        }
        if !(self.delta_s >= 1e-7 && self.delta_s <= 0.1) {
            return bad("delta_s", format!("must be in [1e-7, 0.1], got {}", self.delta_s));
        }
        // network construction validates edges and j_factors lengths
        self.network()?;
        Ok(())
    }

    /// The configured network (with per-edge weights applied, if any).
    pub fn network(&self) -> Result<SpinNetwork> {
        let base = match self.topology.as_str() {
            "triangle" => SpinNetwork::triangle(),
            "chain" => SpinNetwork::nn_nnn_chain(self.n)
                .map_err(|e| CliError::Config(format!("n: {e}")))?,
            _ => {
                let edges = self.edges.clone().unwrap_or_default();
                SpinNetwork::custom(self.n, &edges)
                    .map_err(|e| CliError::Config(format!("edges: {e}")))?
            }
        };
        match &self.j_factors {
            None => Ok(base),
            Some(factors) => {
                SpinNetwork::custom_weighted(self.n, base.edges(), factors)
                    .map_err(|e| CliError::Config(format!("j_factors: {e}")))
            }
        }
    }

    pub fn schedule(&self) -> ControlSchedule {
        ControlSchedule {
            t_final: self.t_final_ns,
            delta_max: self.delta_max_ghz,
            j_max: self.j_max_ghz,
            delta_floor: self.delta_floor_ghz,
            j_floor: self.j_floor_ghz,
        }
    }

    /// Rejects the run if the state vector would not fit the memory budget
    /// ([`MEMORY_BUDGET_ENV`] in bytes, default 4 GiB).
    pub fn check_memory_budget(&self) -> Result<()> {
        let budget = std::env::var(MEMORY_BUDGET_ENV)
            .ok()
            .and_then(|s| s.parse::<u64>().ok())
            .unwrap_or(DEFAULT_MEMORY_BUDGET);
        let required = required_bytes::<f64>(self.n);
        if required > budget {
            return Err(CliError::Memory(format!(
                "n = {}: requires {required} bytes, budget is {budget} bytes \
                 (override with {MEMORY_BUDGET_ENV})",
                self.n
            )));
        }
        Ok(())
    }
}
