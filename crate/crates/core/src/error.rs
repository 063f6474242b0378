use thiserror::Error;

/// Errors produced by the simulation core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid spin network: {0}")]
    InvalidNetwork(String),

    #[error("operator for {sites} sites needs {required} bytes, budget is {budget} bytes")]
    MemoryBudget {
        sites: usize,
        required: u64,
        budget: u64,
    },

    #[error("invalid Pauli axis tag")]
    InvalidAxis,

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("requested {k} eigenpairs of a dimension-{dim} operator")]
    TooManyEigenpairs { k: usize, dim: usize },

    #[error("ground state is degenerate at sweep point s = {s} (gap {gap:e} GHz)")]
    Degenerate { s: f64, gap: f64 },

    #[error("cannot gauge-fix the zero vector")]
    ZeroVector,

    #[error("time {t} ns outside schedule range [0, {t_final}] ns")]
    TimeOutOfRange { t: f64, t_final: f64 },

    #[error("sweep fraction {s} leaves [0, 1] for stencil step {delta_s}")]
    SweepOutOfRange { s: f64, delta_s: f64 },

    #[error("finite-difference step {delta_s:e} too small: overlap deficit below 1e-14")]
    PrecisionLoss { delta_s: f64 },

    #[error("integration step too coarse: norm drift {drift:e} exceeds 1e-6; reduce dt")]
    NormDrift { drift: f64 },

    #[error("density operator trace {trace} deviates from 1 beyond 1e-8")]
    TraceNotUnit { trace: f64 },

    #[error("block sites must be distinct and in range: {0}")]
    InvalidBlock(String),

    #[error("distributions have mismatched supports")]
    SupportMismatch,

    #[error("distribution does not sum to 1 (sum = {0})")]
    NotNormalized(f64),

    #[error("histogram support has fewer than two points; exponential fit is degenerate")]
    DegenerateHistogram,
}
