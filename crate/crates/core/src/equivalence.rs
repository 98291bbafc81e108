//! Generalized diagonal dominance certificates from Sassenfeld pairs.
//!
//! Given an H-matrix preconditioner `P` with witness `u` and `mu(A, P) < 1`,
//! the vector `t = alpha s + u` is a positive scaling under which `A` is
//! strictly diagonally dominant by rows, for a suitable threshold `alpha`.
//! Conversely every H-matrix is its own preconditioner with `mu(A, A) = 0`.

use crate::error::{Error, Result};
use crate::hmatrix::HCertificate;
use crate::matrix::{ComplexMatrix, RealVector};
use crate::sassenfeld::{sassenfeld_vector, SassenfeldReport, CONTRACTION_MARGIN};

/// Margins below `DEGENERACY_TOL * row scale` flag the certificate as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceCertificate {
    pub delta: RealVector,
    /// Indices with `delta_i > 0`.
    pub active: Vec<usize>,
    pub alpha: f64,
    /// `t_i = alpha s_i + u_i`.
    pub witness: RealVector,
    /// `|a_ii| t_i - sum_{j != i} |a_ij| t_j` per row.
    pub margins: Vec<f64>,
    /// Set when some margin is positive only within round-off.
    pub degenerate: bool,
}

impl EquivalenceCertificate {
    pub fn min_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `delta_i = (1 / |a_ii|) sum_j (1 - s_j) |a_ij - p_ij|`.
pub fn delta_vector(a: &ComplexMatrix, p: &ComplexMatrix, s: &[f64]) -> Result<RealVector> {
    let n = a.order();
    if p.order() != n || s.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if p.order() != n { p.order() } else { s.len() },
        });
    }
    if let Some(j) = s.iter().position(|&v| !(0.0..1.0).contains(&v)) {
        return Err(Error::NotSassenfeld(format!(
            "component s_{j} = {} outside [0, 1)",
            s[j]
        )));
    }
    let diff = a.sub(p).modulus();
    let mut delta = Vec::with_capacity(n);
    for i in 0..n {
        let aii = a.get(i, i).norm();
        if aii == 0.0 {
            return Err(Error::ZeroDiagonal(i));
        }
        let sum: f64 = diff
            .row(i)
            .iter()
            .zip(s)
            .map(|(d, sj)| (1.0 - sj) * d)
            .sum();
        delta.push(sum / aii);
    }
    Ok(RealVector::from(delta))
}

/// Smallest `alpha >= 0` with
/// `alpha delta_i |a_ii| >= u_i (|p_ii| - |a_ii|) + sum_{j != i} (|a_ij| - |p_ij|) u_j`
/// on every row with `delta_i > 0`.
pub fn alpha_threshold(
    a: &ComplexMatrix,
    p: &ComplexMatrix,
    u: &[f64],
    delta: &[f64],
) -> Result<f64> {
    let n = a.order();
    if p.order() != n || u.len() != n || delta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: [p.order(), u.len(), delta.len()]
                .into_iter()
                .find(|&l| l != n)
                .unwrap_or(n),
        });
    }
    let mut alpha = 0.0f64;
    for i in 0..n {
        let num = alpha_numerator(a, p, u, i);
        if delta[i] > 0.0 {
            alpha = alpha.max(num / (delta[i] * a.get(i, i).norm()));
        } else if num > 0.0 {
            return Err(Error::Internal(format!(
                "row {i} has delta = 0 but a positive alpha numerator {num:e}"
            )));
        }
    }
    Ok(alpha)
}

fn alpha_numerator(a: &ComplexMatrix, p: &ComplexMatrix, u: &[f64], i: usize) -> f64 {
    let diag = u[i] * (p.get(i, i).norm() - a.get(i, i).norm());
    let off: f64 = (0..a.order())
        .filter(|&j| j != i)
        .map(|j| (a.get(i, j).norm() - p.get(i, j).norm()) * u[j])
        .sum();
    diag + off
}

/// Builds the positive scaling `t = alpha s + u` and checks strict row
/// dominance of `A` under it.
pub fn gdd_certificate(
    a: &ComplexMatrix,
    p: &ComplexMatrix,
    report: &SassenfeldReport,
    cert_p: &HCertificate,
) -> Result<EquivalenceCertificate> {
    let u = match (cert_p.is_h(), cert_p.witness()) {
        (true, Some(u)) => u,
        _ => {
            return Err(Error::PreconditionerNotH(
                cert_p.reason.clone().unwrap_or_else(|| "no witness".into()),
            ))
        }
    };
    if report.mu >= 1.0 - CONTRACTION_MARGIN {
        return Err(Error::NotSassenfeld(format!(
            "index {} is not below 1 - {CONTRACTION_MARGIN:e}",
            report.mu
        )));
    }
    let s = &report.s;
    let delta = delta_vector(a, p, s)?;
    let alpha = alpha_threshold(a, p, u, &delta)?;
    let active = (0..delta.len()).filter(|&i| delta[i] > 0.0).collect();
    let t: Vec<f64> = s
        .iter()
        .zip(u.iter())
        .map(|(si, ui)| alpha * si + ui)
        .collect();

    let mut margins = Vec::with_capacity(t.len());
    let mut degenerate = false;
    for i in 0..t.len() {
        let aii = a.get(i, i).norm() * t[i];
        let off: f64 = (0..t.len())
            .filter(|&j| j != i)
            .map(|j| a.get(i, j).norm() * t[j])
            .sum();
        let margin = aii - off;
        let tol = DEGENERACY_TOL * (aii + off);
        if margin < -tol {
            return Err(Error::CertificateDegenerate { row: i, margin });
        }
        if margin <= tol {
            degenerate = true;
        }
        margins.push(margin);
    }

    Ok(EquivalenceCertificate {
        delta,
        active,
        alpha,
        witness: RealVector::from(t),
        margins,
        degenerate,
    })
}

/// The trivial Sassenfeld pair `(A, A)` for an H-matrix `A`.
pub fn verify_h_direction(a: &ComplexMatrix, cert: &HCertificate) -> Result<SassenfeldReport> {
    sassenfeld_vector(a, a, cert)
}
