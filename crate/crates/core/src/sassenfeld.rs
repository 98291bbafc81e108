//! Sassenfeld vector and index of a matrix with respect to an H-matrix
//! preconditioner.
//!
//! For `P` an H-matrix the vector `s(A, P)` solves `M(P) s = |A - P| e` and is
//! nonnegative; its infinity norm `mu(A, P)` bounds `||I - P^{-1} A||_inf`.
//! With the Gauss-Seidel part `P = diag(A) + tril(A)` the system is lower
//! triangular and the solve reduces to Sassenfeld's forward recursion.

use crate::error::{Error, Result};
use crate::hmatrix::{ComparisonMatrix, HCertificate};
use crate::matrix::{ComplexMatrix, NonNegMatrix, RealVector, C64};
use crate::splitting::PreconditionerKind;

/// Values of `mu` within this distance of 1 are treated as marginal.
pub const CONTRACTION_MARGIN: f64 = 1e-10;

/// Relative slack for entrywise checks of `|A - P| e <= M(P) v`.
pub const START_VECTOR_SLACK: f64 = 1e-12;

/// Relative tolerance below which negative components of `s` are round-off.
pub const NONNEGATIVITY_TOL: f64 = 1e-12;

/// Default order up to which the iteration matrix is formed densely.
pub const DEFAULT_DENSE_THRESHOLD: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexMethod {
    Direct,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterationStatus {
    Converged,
    MaxIterations,
}

/// Position of `mu` relative to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexClass {
    /// `mu < 1 - CONTRACTION_MARGIN`.
    Contractive,
    Marginal,
    /// `mu > 1 + CONTRACTION_MARGIN`.
    NonContractive,
}

impl IndexClass {
    pub fn of(mu: f64) -> Self {
        if mu < 1.0 - CONTRACTION_MARGIN {
            Self::Contractive
        } else if mu > 1.0 + CONTRACTION_MARGIN {
            Self::NonContractive
        } else {
            Self::Marginal
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Contractive => "contractive",
            Self::Marginal => "marginal",
            Self::NonContractive => "non-contractive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SassenfeldReport {
    pub s: RealVector,
    /// `||s||_inf`.
    pub mu: f64,
    pub method: IndexMethod,
    /// `||s^(k)||_inf` for `k = 0..=iterations` (iterative method only).
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub status: IterationStatus,
    /// First `k` whose trace value is within the stopping tolerance of `mu`.
    pub index_settled_at: Option<usize>,
    /// Whether every trace value is a proven upper bound of the index.
    pub certified_bound: bool,
    pub preconditioner: PreconditionerKind,
}

impl SassenfeldReport {
    pub fn class(&self) -> IndexClass {
        IndexClass::of(self.mu)
    }

    pub fn is_contractive(&self) -> bool {
        self.class() == IndexClass::Contractive
    }
}

/// Data shared by the index computations: `M(P)`, `|diag P|`, `|off P|` and
/// the right-hand side `|A - P| e`.
struct Prepared {
    cmp: ComparisonMatrix,
    diag: Vec<f64>,
    off: NonNegMatrix,
    rhs: Vec<f64>,
    witness: RealVector,
}

fn prepare(a: &ComplexMatrix, p: &ComplexMatrix, cert: &HCertificate) -> Result<Prepared> {
    if a.order() != p.order() {
        return Err(Error::DimensionMismatch {
            expected: p.order(),
            found: a.order(),
        });
    }
    if cert.order() != p.order() {
        return Err(Error::DimensionMismatch {
            expected: p.order(),
            found: cert.order(),
        });
    }
    let witness = match (cert.is_h(), cert.witness()) {
        (true, Some(u)) => u.clone(),
        _ => {
            return Err(Error::PreconditionerNotH(
                cert.reason
                    .clone()
                    .unwrap_or_else(|| format!("verdict {}", cert.verdict.as_str())),
            ))
        }
    };
    let cmp = ComparisonMatrix::new(p);
    // The certificate must actually belong to P.
    if let Some(i) = cmp.margins(&witness).iter().position(|&m| m <= 0.0) {
        return Err(Error::PreconditionerNotH(format!(
            "certificate witness does not dominate row {i} of M(P)"
        )));
    }
    let diag = cmp.matrix().diagonal();
    let off = p.split().off().modulus();
    let rhs = a.sub(p).modulus().row_sums().into_inner();
    Ok(Prepared {
        cmp,
        diag,
        off,
        rhs,
        witness,
    })
}

impl Prepared {
    /// Entrywise `M(P) v - |A - P| e >= -slack_i`; returns the first violating row.
    fn check_dominates(&self, v: &[f64]) -> std::result::Result<(), (usize, f64)> {
        let mv = self.cmp.matrix().mul_vec(v);
        let scales = self.cmp.row_scales(v);
        for i in 0..v.len() {
            let slack = mv[i] - self.rhs[i];
            let allowed = START_VECTOR_SLACK * (scales[i] + self.rhs[i]);
            if slack < -allowed {
                return Err((i, slack));
            }
        }
        Ok(())
    }

    /// One sweep `|diag P| s' = |off P| s + |A - P| e`.
    fn sweep(&self, s: &[f64]) -> Vec<f64> {
        let offs = self.off.mul_vec(s);
        offs.iter()
            .zip(&self.rhs)
            .zip(&self.diag)
            .map(|((o, r), d)| (o + r) / d)
            .collect()
    }
}

fn direct_report(s: RealVector) -> SassenfeldReport {
    let mu = s.inf_norm();
    SassenfeldReport {
        s,
        mu,
        method: IndexMethod::Direct,
        trace: Vec::new(),
        iterations: 0,
        status: IterationStatus::Converged,
        index_settled_at: None,
        certified_bound: true,
        preconditioner: PreconditionerKind::Custom,
    }
}

/// Solves `M(P) s = |A - P| e` directly.
pub fn sassenfeld_vector(
    a: &ComplexMatrix,
    p: &ComplexMatrix,
    cert: &HCertificate,
) -> Result<SassenfeldReport> {
    let prep = prepare(a, p, cert)?;
    let mut s = prep.cmp.matrix().solve(&prep.rhs)?;
    let norm = s.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    for (i, v) in s.iter_mut().enumerate() {
        if *v < 0.0 {
            if -*v > NONNEGATIVITY_TOL * norm {
                return Err(Error::Internal(format!(
                    "Sassenfeld vector has negative component {v:e} in row {i}"
                )));
            }
            *v = 0.0;
        }
    }
    Ok(direct_report(RealVector::from(s)))
}

/// `mu(A, P) = ||s(A, P)||_inf`.
pub fn sassenfeld_index(a: &ComplexMatrix, p: &ComplexMatrix, cert: &HCertificate) -> Result<f64> {
    sassenfeld_vector(a, p, cert).map(|r| r.mu)
}

/// A start vector `c u` satisfying `|A - P| e <= M(P) s0`, where `u` is the
/// certificate witness of `P` and `c = max_i (|A - P| e)_i / (M(P) u)_i`.
pub fn default_start_vector(
    a: &ComplexMatrix,
    p: &ComplexMatrix,
    cert: &HCertificate,
) -> Result<RealVector> {
    let prep = prepare(a, p, cert)?;
    let mu = prep.cmp.margins(&prep.witness);
    let c = prep
        .rhs
        .iter()
        .zip(&mu)
        .map(|(r, m)| r / m)
        .fold(0.0, f64::max);
    Ok(RealVector::from(
        prep.witness.iter().map(|u| c * u).collect::<Vec<_>>(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOptions {
    /// Stop when `||s^(k+1) - s^(k)||_inf <= tol`.
    pub tol: f64,
    /// Defaults to `100 * m` when absent.
    pub max_iter: Option<usize>,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self {
            tol: 1e-15,
            max_iter: None,
        }
    }
}

/// Runs `|diag P| s^(k+1) = |off P| s^(k) + |A - P| e` from a validated start
/// vector. Every recorded `||s^(k)||_inf` is an upper bound of `mu(A, P)`.
pub fn iterative_index_estimate(
    a: &ComplexMatrix,
    p: &ComplexMatrix,
    cert: &HCertificate,
    s0: &[f64],
    opts: &IterationOptions,
) -> Result<SassenfeldReport> {
    let prep = prepare(a, p, cert)?;
    check_len(p, s0)?;
    if let Err((row, slack)) = prep.check_dominates(s0) {
        return Err(Error::InvalidStartVector { row, slack });
    }
    Ok(iterate(&prep, s0, opts, true))
}

/// Same iteration without validating the start vector. It still converges to
/// `s(A, P)` but the trace values are not guaranteed upper bounds.
pub fn iterative_index_estimate_unchecked(
    a: &ComplexMatrix,
    p: &ComplexMatrix,
    cert: &HCertificate,
    s0: &[f64],
    opts: &IterationOptions,
) -> Result<SassenfeldReport> {
    let prep = prepare(a, p, cert)?;
    check_len(p, s0)?;
    let certified = prep.check_dominates(s0).is_ok();
    Ok(iterate(&prep, s0, opts, certified))
}

fn check_len(p: &ComplexMatrix, v: &[f64]) -> Result<()> {
    if v.len() != p.order() {
        return Err(Error::DimensionMismatch {
            expected: p.order(),
            found: v.len(),
        });
    }
    if let Some(k) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { row: k, col: 0 });
    }
    Ok(())
}

fn iterate(
    prep: &Prepared,
    s0: &[f64],
    opts: &IterationOptions,
    certified: bool,
) -> SassenfeldReport {
    let max_iter = opts.max_iter.unwrap_or(100 * s0.len());
    let mut s = s0.to_vec();
    let mut trace = vec![s.inf_norm_f64()];
    let mut status = IterationStatus::MaxIterations;
    let mut iterations = 0;

    while iterations < max_iter {
        let next = prep.sweep(&s);
        let increment = next
            .iter()
            .zip(&s)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        s = next;
        iterations += 1;
        trace.push(s.inf_norm_f64());
        if increment <= opts.tol {
            status = IterationStatus::Converged;
            break;
        }
    }

    let mu = *trace.last().expect("trace holds the start vector");
    let index_settled_at = trace.iter().position(|&t| (t - mu).abs() <= opts.tol);
    SassenfeldReport {
        s: RealVector::from(s),
        mu,
        method: IndexMethod::Iterative,
        trace,
        iterations,
        status,
        index_settled_at,
        certified_bound: certified,
        preconditioner: PreconditionerKind::Custom,
    }
}

trait InfNormF64 {
    fn inf_norm_f64(&self) -> f64;
}

impl InfNormF64 for [f64] {
    fn inf_norm_f64(&self) -> f64 {
        self.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }
}

/// `||v||_inf` when `|A - P| e <= M(P) v` holds entrywise, else `None`.
pub fn bound_from_test_vector(
    a: &ComplexMatrix,
    p: &ComplexMatrix,
    cert: &HCertificate,
    v: &[f64],
) -> Result<Option<f64>> {
    let prep = prepare(a, p, cert)?;
    check_len(p, v)?;
    Ok(prep.check_dominates(v).ok().map(|_| v.inf_norm_f64()))
}

/// `I - P^{-1} A`, formed column by column.
pub fn iteration_matrix(a: &ComplexMatrix, p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let pa = preconditioned_matrix(a, p)?;
    Ok(ComplexMatrix::identity(a.order()).sub(&pa))
}

/// `P^{-1} A`, formed column by column.
pub fn preconditioned_matrix(a: &ComplexMatrix, p: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.order() != p.order() {
        return Err(Error::DimensionMismatch {
            expected: p.order(),
            found: a.order(),
        });
    }
    let n = a.order();
    let f = p.factor()?;
    let at = a.transpose();
    let cols: Vec<Vec<C64>> = (0..n).map(|j| f.solve(at.row(j))).collect();
    Ok(ComplexMatrix::from_fn(n, |i, j| cols[j][i]))
}

/// `kappa_inf(P^{-1} A) = ||P^{-1} A|| ||A^{-1} P||`, computed densely.
pub fn preconditioned_condition_number(a: &ComplexMatrix, p: &ComplexMatrix) -> Result<f64> {
    let c = preconditioned_matrix(a, p)?;
    let inv = c.inverse()?;
    Ok(c.inf_norm() * inv.inf_norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBound {
    /// `mu(A, P)`, an upper bound of `||I - P^{-1} A||_inf`.
    pub bound: f64,
    /// The dense value when the order is at most the threshold.
    pub exact: Option<f64>,
}

pub fn iteration_matrix_norm_bound(
    a: &ComplexMatrix,
    p: &ComplexMatrix,
    cert: &HCertificate,
    dense_threshold: usize,
) -> Result<NormBound> {
    let bound = sassenfeld_index(a, p, cert)?;
    let exact = if a.order() <= dense_threshold {
        let value = iteration_matrix(a, p)?.inf_norm();
        if value > bound + 1e-10 {
            return Err(Error::Internal(format!(
                "||I - P^-1 A|| = {value} exceeds the Sassenfeld bound {bound}"
            )));
        }
        Some(value)
    } else {
        None
    };
    Ok(NormBound { bound, exact })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvertibilityVerdict {
    Certified,
    NotCertified,
}

/// Non-singularity test for `A + tau P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvertibilityCertificate {
    pub tau: C64,
    pub mu: f64,
    pub verdict: InvertibilityVerdict,
}

/// `A + tau P` is non-singular whenever `|tau + 1| > mu(A, P)`.
pub fn shifted_invertibility(
    a: &ComplexMatrix,
    p: &ComplexMatrix,
    cert: &HCertificate,
    tau: C64,
) -> Result<InvertibilityCertificate> {
    let mu = sassenfeld_index(a, p, cert)?;
    let verdict = if (tau + 1.0).norm() > mu {
        InvertibilityVerdict::Certified
    } else {
        InvertibilityVerdict::NotCertified
    };
    Ok(InvertibilityCertificate { tau, mu, verdict })
}

/// `(1 + mu) / (1 - mu)`, an upper bound of `kappa_inf(P^{-1} A)`.
pub fn condition_bound(a: &ComplexMatrix, p: &ComplexMatrix, cert: &HCertificate) -> Result<f64> {
    let mu = sassenfeld_index(a, p, cert)?;
    condition_bound_from_index(mu)
}

pub fn condition_bound_from_index(mu: f64) -> Result<f64> {
    if IndexClass::of(mu) != IndexClass::Contractive {
        return Err(Error::BoundUnavailable { mu });
    }
    Ok((1.0 + mu) / (1.0 - mu))
}

/// Right-hand side `|A - P| e` of the Sassenfeld system.
pub fn sassenfeld_rhs(a: &ComplexMatrix, p: &ComplexMatrix) -> RealVector {
    a.sub(p).modulus().row_sums()
}
