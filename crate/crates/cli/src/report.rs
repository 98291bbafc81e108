//! The JSON analysis report.
//!
//! Every command fills the sections it computes and leaves the others
//! `null`. Numbers are written in the shortest form that parses back to the
//! identical double, so values survive a JSON round trip bit-for-bit.
//! Complex numbers are `[re, im]` pairs. Non-finite values become `null`.

use sassenfeld_core::equivalence::EquivalenceCertificate;
use sassenfeld_core::matrix::{SpectralEstimate, SpectralStatus};
use sassenfeld_core::sassenfeld::{IndexMethod, IterationStatus, SassenfeldReport};
use sassenfeld_core::splitting::{InitialError, SolveStatus, SolveTrace};
use sassenfeld_core::{HCertificate, C64};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub command: String,
    pub input: InputDescriptor,
    pub preconditioner: Option<PreconditionerInfo>,
    pub tolerances: Tolerances,
    pub h_matrix: Option<HReport>,
    pub h_preconditioner: Option<HReport>,
    pub sassenfeld: Option<IndexReport>,
    pub certificate: Option<CertificateReport>,
    /// `(1 + mu) / (1 - mu)` when the index is contractive.
    pub condition_bound: Option<f64>,
    pub solve: Option<SolveReport>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDescriptor {
    /// `file`, `stdin` or `generator`.
    pub kind: String,
    pub path: Option<String>,
    pub generator: Option<GeneratorSpec>,
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreconditionerInfo {
    /// `jacobi`, `gauss-seidel` or `custom`.
    pub kind: String,
    /// Source of a custom preconditioner.
    pub source: Option<InputDescriptor>,
    /// `diagonal`, `forward-substitution`, `back-substitution` or `lu`.
    pub strategy: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub h_positivity: f64,
    pub spectral_tol: f64,
    pub spectral_band: f64,
    pub contraction_margin: f64,
    pub start_vector_slack: f64,
    pub iteration_tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub residual_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HReport {
    /// `is-h`, `not-h` or `inconclusive`.
    pub verdict: String,
    /// `u` with `M u = e` for the comparison matrix `M`.
    pub witness: Option<Vec<f64>>,
    pub jacobi_radius: Option<SpectralReport>,
    pub reason: Option<String>,
}

impl From<&HCertificate> for HReport {
    fn from(c: &HCertificate) -> Self {
        Self {
            verdict: c.verdict.as_str().to_string(),
            witness: c.witness().map(|w| w.to_vec()),
            jacobi_radius: c.jacobi_radius.as_ref().map(SpectralReport::from),
            reason: c.reason.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub value: f64,
    pub lower: f64,
    pub upper: Option<f64>,
    pub iterations: usize,
    /// `converged` or `unresolved`.
    pub status: String,
}

impl From<&SpectralEstimate> for SpectralReport {
    fn from(e: &SpectralEstimate) -> Self {
        Self {
            value: e.value,
            lower: e.lower,
            upper: e.upper.is_finite().then_some(e.upper),
            iterations: e.iterations,
            status: match e.status {
                SpectralStatus::Converged => "converged",
                SpectralStatus::Unresolved => "unresolved",
            }
            .to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub s: Vec<f64>,
    pub mu: f64,
    /// `contractive`, `marginal` or `non-contractive`.
    pub class: String,
    /// `direct` or `iterative`.
    pub method: String,
    /// `ones`, `auto` or the path of the start vector (iterative only).
    pub start_vector: Option<String>,
    /// `||s^(k)||_inf` for `k = 0..=iterations`; empty for the direct method.
    pub trace: Vec<f64>,
    pub iterations: usize,
    /// `converged` or `max-iterations`.
    pub status: String,
    pub index_settled_at: Option<usize>,
    pub certified_bound: bool,
}

impl IndexReport {
    pub fn new(r: &SassenfeldReport, start_vector: Option<String>) -> Self {
        Self {
            s: r.s.to_vec(),
            mu: r.mu,
            class: r.class().as_str().to_string(),
            method: match r.method {
                IndexMethod::Direct => "direct",
                IndexMethod::Iterative => "iterative",
            }
            .to_string(),
            start_vector,
            trace: r.trace.clone(),
            iterations: r.iterations,
            status: match r.status {
                IterationStatus::Converged => "converged",
                IterationStatus::MaxIterations => "max-iterations",
            }
            .to_string(),
            index_settled_at: r.index_settled_at,
            certified_bound: r.certified_bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub alpha: f64,
    pub delta: Vec<f64>,
    pub active: Vec<usize>,
    /// Positive scaling `t = alpha s + u` under which the matrix is strictly
    /// diagonally dominant by rows.
    pub t: Vec<f64>,
    pub margins: Vec<f64>,
    pub min_margin: f64,
    pub degenerate: bool,
}

impl From<&EquivalenceCertificate> for CertificateReport {
    fn from(c: &EquivalenceCertificate) -> Self {
        Self {
            alpha: c.alpha,
            delta: c.delta.to_vec(),
            active: c.active.clone(),
            t: c.witness.to_vec(),
            margins: c.margins.clone(),
            min_margin: c.min_margin(),
            degenerate: c.degenerate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    /// `certified` or `best-effort`.
    pub mode: String,
    /// `converged` or `max-iterations`.
    pub status: String,
    pub iterations: usize,
    pub mu: f64,
    pub residuals: Vec<f64>,
    /// A priori bounds `mu^n E_0`; `null` unless the index is contractive.
    pub bounds: Option<Vec<f64>>,
    /// `exact` or `residual-surrogate`.
    pub initial_error: Option<String>,
    pub x: Vec<[f64; 2]>,
}

impl SolveReport {
    pub fn new(t: &SolveTrace, mode: &str) -> Self {
        Self {
            mode: mode.to_string(),
            status: match t.status {
                SolveStatus::Converged => "converged",
                SolveStatus::MaxIterations => "max-iterations",
            }
            .to_string(),
            iterations: t.iterations,
            mu: t.mu,
            residuals: t.residuals.clone(),
            bounds: t.bounds.clone(),
            initial_error: t.initial_error.map(|k| {
                match k {
                    InitialError::Exact => "exact",
                    InitialError::ResidualSurrogate => "residual-surrogate",
                }
                .to_string()
            }),
            x: t.x.iter().map(complex_pair).collect(),
        }
    }
}

pub fn complex_pair(v: &C64) -> [f64; 2] {
    [v.re, v.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    /// `certified`, `negative` or `inconclusive`.
    pub verdict: String,
    pub exit_code: i32,
    pub message: String,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
