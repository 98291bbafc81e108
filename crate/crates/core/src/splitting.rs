//! Preconditioners and the stationary splitting iteration
//! `P x_{n+1} = (P - A) x_n + b` with a priori error bounds `mu^n E_0`.

use crate::error::{Error, Result};
use crate::hmatrix::{certify_h, HCertificate};
use crate::matrix::{ComplexMatrix, Factorization, InfNorm, C64};
use crate::sassenfeld::{sassenfeld_vector, IndexClass, SassenfeldReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PreconditionerKind {
    /// `P = diag(A)`.
    Jacobi,
    /// `P = diag(A) + tril(A)`.
    GaussSeidel,
    Custom,
}

impl PreconditionerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Jacobi => "jacobi",
            Self::GaussSeidel => "gauss-seidel",
            Self::Custom => "custom",
        }
    }
}

/// A certified preconditioner with its solve strategy prepared once.
#[derive(Debug, Clone)]
pub struct Preconditioner {
    kind: PreconditionerKind,
    matrix: ComplexMatrix,
    factorization: Factorization<C64>,
    certificate: HCertificate,
}

impl Preconditioner {
    /// Builds `P` of the given kind from `A` and certifies it.
    pub fn new(a: &ComplexMatrix, kind: PreconditionerKind) -> Result<Self> {
        let matrix = match kind {
            PreconditionerKind::Jacobi => a.split().diag,
            PreconditionerKind::GaussSeidel => a.lower_with_diagonal(),
            PreconditionerKind::Custom => a.clone(),
        };
        Self::build(kind, matrix)
    }

    pub fn custom(p: ComplexMatrix) -> Result<Self> {
        Self::build(PreconditionerKind::Custom, p)
    }

    fn build(kind: PreconditionerKind, matrix: ComplexMatrix) -> Result<Self> {
        let certificate = certify_h(&matrix);
        if !certificate.is_h() {
            return Err(Error::PreconditionerNotH(
                certificate
                    .reason
                    .clone()
                    .unwrap_or_else(|| certificate.verdict.as_str().to_string()),
            ));
        }
        let factorization = matrix.factor()?;
        Ok(Self {
            kind,
            matrix,
            factorization,
            certificate,
        })
    }

    /// Replaces the structural fast path by a general LU factorization.
    pub fn with_lu(mut self) -> Result<Self> {
        self.factorization = Factorization::lu(&self.matrix)?;
        Ok(self)
    }

    pub fn kind(&self) -> PreconditionerKind {
        self.kind
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn certificate(&self) -> &HCertificate {
        &self.certificate
    }

    pub fn strategy(&self) -> &'static str {
        self.factorization.strategy_name()
    }

    pub fn apply_inverse(&self, r: &[C64]) -> Vec<C64> {
        self.factorization.solve(r)
    }

    /// Sassenfeld report of `A` with respect to this preconditioner.
    pub fn sassenfeld(&self, a: &ComplexMatrix) -> Result<SassenfeldReport> {
        let mut report = sassenfeld_vector(a, &self.matrix, &self.certificate)?;
        report.preconditioner = self.kind;
        Ok(report)
    }
}

/// Builds and certifies a Jacobi or Gauss-Seidel preconditioner.
pub fn make_preconditioner(a: &ComplexMatrix, kind: PreconditionerKind) -> Result<Preconditioner> {
    Preconditioner::new(a, kind)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    /// Requires `mu(A, P) < 1` and records the a priori bound.
    Certified,
    /// Runs regardless of `mu`; the bound is dropped unless `mu < 1`.
    BestEffort,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub max_iter: usize,
    /// Absolute residual tolerance. When absent the run stops once
    /// `||b - A x_n|| <= 1e-10 (||A|| ||x_n|| + ||b||)`.
    pub residual_tol: Option<f64>,
    pub mode: SolveMode,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iter: 10_000,
            residual_tol: None,
            mode: SolveMode::Certified,
        }
    }
}

pub const RELATIVE_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
}

/// How the initial error `E_0` of the a priori bound was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialError {
    /// `||x - x_0||` from a supplied reference solution.
    Exact,
    /// `||P^{-1} (b - A x_0)|| / (1 - mu)`, which bounds `||x - x_0||`.
    ResidualSurrogate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace {
    /// Final iterate.
    pub x: Vec<C64>,
    pub iterations: usize,
    /// `||b - A x_n||_inf` for `n = 0..=iterations`.
    pub residuals: Vec<f64>,
    /// `||x - x_n||_inf` when a reference solution was supplied.
    pub errors: Option<Vec<f64>>,
    pub mu: f64,
    /// `mu^n E_0` for `n = 0..=iterations`; absent when `mu >= 1`.
    pub bounds: Option<Vec<f64>>,
    pub initial_error: Option<InitialError>,
    pub status: SolveStatus,
}

/// Runs the splitting iteration from `x0`.
pub fn solve(
    a: &ComplexMatrix,
    b: &[C64],
    precond: &Preconditioner,
    x0: &[C64],
    opts: &SolveOptions,
    reference: Option<&[C64]>,
) -> Result<SolveTrace> {
    let n = a.order();
    for len in [precond.matrix().order(), b.len(), x0.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: len,
            });
        }
    }
    if let Some(r) = reference {
        if r.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r.len(),
            });
        }
    }

    let mu = precond.sassenfeld(a)?.mu;
    let contractive = IndexClass::of(mu) == IndexClass::Contractive;
    if opts.mode == SolveMode::Certified && !contractive {
        return Err(Error::NotContractive { mu });
    }

    let a_norm = a.inf_norm();
    let b_norm = b.inf_norm();
    let converged = |res: f64, x: &[C64]| match opts.residual_tol {
        Some(tol) => res <= tol,
        None => res <= RELATIVE_RESIDUAL_TOL * (a_norm * x.inf_norm() + b_norm),
    };
    let residual = |x: &[C64]| -> Vec<C64> {
        let ax = a.mul_vec(x);
        b.iter().zip(ax).map(|(bi, axi)| bi - axi).collect()
    };
    let error_to = |x: &[C64]| {
        reference.map(|r| {
            r.iter()
                .zip(x)
                .map(|(ri, xi)| (ri - xi).norm())
                .fold(0.0, f64::max)
        })
    };

    let mut x = x0.to_vec();
    let mut r = residual(&x);
    let mut residuals = vec![r.inf_norm()];
    let mut errors: Option<Vec<f64>> = error_to(&x).map(|e| vec![e]);
    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;

    if converged(residuals[0], &x) {
        status = SolveStatus::Converged;
    } else {
        while iterations < opts.max_iter {
            // P x_{n+1} = (P - A) x_n + b  <=>  x_{n+1} = x_n + P^{-1} (b - A x_n)
            let correction = precond.apply_inverse(&r);
            for (xi, ci) in x.iter_mut().zip(&correction) {
                *xi += ci;
            }
            iterations += 1;
            r = residual(&x);
            let res = r.inf_norm();
            residuals.push(res);
            if let (Some(errs), Some(e)) = (errors.as_mut(), error_to(&x)) {
                errs.push(e);
            }
            if !res.is_finite() {
                break;
            }
            if converged(res, &x) {
                status = SolveStatus::Converged;
                break;
            }
        }
    }

    let (bounds, initial_error) = if contractive {
        let (e0, kind) = match reference {
            Some(_) => (
                errors.as_ref().expect("errors recorded with a reference")[0],
                InitialError::Exact,
            ),
            None => {
                let r0 = residual(x0);
                let z = precond.apply_inverse(&r0);
                (z.inf_norm() / (1.0 - mu), InitialError::ResidualSurrogate)
            }
        };
        let mut bounds = Vec::with_capacity(iterations + 1);
        let mut current = e0;
        for _ in 0..=iterations {
            bounds.push(current);
            current *= mu;
        }
        (Some(bounds), Some(kind))
    } else {
        (None, None)
    };

    Ok(SolveTrace {
        x,
        iterations,
        residuals,
        errors,
        mu,
        bounds,
        initial_error,
        status,
    })
}

/// The tridiagonal `(-1, 2, -1)` finite difference matrix of order `m`.
pub fn fdm_matrix(m: usize) -> Result<ComplexMatrix> {
    if m == 0 {
        return Err(Error::EmptyMatrix);
    }
    Ok(ComplexMatrix::from_fn(m, |i, j| {
        C64::from(if i == j {
            2.0
        } else if i.abs_diff(j) == 1 {
            -1.0
        } else {
            0.0
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones(m: usize) -> Vec<C64> {
        vec![C64::from(1.0); m]
    }

    #[test]
    fn fdm_shapes() {
        assert_eq!(fdm_matrix(1).unwrap().as_slice(), &[C64::from(2.0)]);
        let want = ComplexMatrix::from_real_rows(vec![
            vec![2.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 2.0],
        ])
        .unwrap();
        assert_eq!(fdm_matrix(3).unwrap(), want);
        let sums: Vec<f64> = (0..10)
            .map(|i| fdm_matrix(10).unwrap().row(i).iter().map(|v| v.re).sum())
            .collect();
        let mut expected = vec![0.0; 10];
        expected[0] = 1.0;
        expected[9] = 1.0;
        assert_eq!(sums, expected);
        assert_eq!(fdm_matrix(0), Err(Error::EmptyMatrix));
    }

    #[test]
    fn preconditioner_kinds() {
        let a = fdm_matrix(10).unwrap();
        let j = make_preconditioner(&a, PreconditionerKind::Jacobi).unwrap();
        assert_eq!(
            j.matrix(),
            &ComplexMatrix::identity(10).scale(C64::from(2.0))
        );
        assert_eq!(j.strategy(), "diagonal");
        assert!(j.certificate().is_h());

        let gs = make_preconditioner(&a, PreconditionerKind::GaussSeidel).unwrap();
        assert!(gs.matrix().is_lower_triangular());
        assert_eq!(gs.strategy(), "forward-substitution");
        assert_eq!(gs.with_lu().unwrap().strategy(), "lu");
    }

    #[test]
    fn zero_diagonal_jacobi_is_rejected() {
        let a = ComplexMatrix::from_real_rows(vec![vec![0.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!(matches!(
            make_preconditioner(&a, PreconditionerKind::Jacobi),
            Err(Error::PreconditionerNotH(_))
        ));
    }

    #[test]
    fn fixed_point_start_converges_immediately() {
        let a = fdm_matrix(5).unwrap();
        let x_star: Vec<C64> = (0..5).map(|i| C64::new(i as f64, 1.0)).collect();
        let b = a.mul_vec(&x_star);
        let p = make_preconditioner(&a, PreconditionerKind::GaussSeidel).unwrap();
        let t = solve(&a, &b, &p, &x_star, &SolveOptions::default(), None).unwrap();
        assert_eq!(t.iterations, 0);
        assert_eq!(t.status, SolveStatus::Converged);
    }

    #[test]
    fn jacobi_on_fdm_is_not_contractive() {
        let a = fdm_matrix(10).unwrap();
        let p = make_preconditioner(&a, PreconditionerKind::Jacobi).unwrap();
        let err = solve(
            &a,
            &ones(10),
            &p,
            &[C64::from(0.0); 10],
            &SolveOptions::default(),
            None,
        );
        assert_eq!(err, Err(Error::NotContractive { mu: 1.0 }));

        // Best effort still converges (rho of the Jacobi matrix is below 1) but carries no bound.
        let opts = SolveOptions {
            mode: SolveMode::BestEffort,
            ..Default::default()
        };
        let t = solve(&a, &ones(10), &p, &[C64::from(0.0); 10], &opts, None).unwrap();
        assert_eq!(t.status, SolveStatus::Converged);
        assert!(t.bounds.is_none());
    }

    #[test]
    fn gauss_seidel_a_priori_bound() {
        let a = fdm_matrix(10).unwrap();
        let b = ones(10);
        let x = a.solve(&b).unwrap();
        let p = make_preconditioner(&a, PreconditionerKind::GaussSeidel).unwrap();
        let opts = SolveOptions {
            residual_tol: Some(1e-12),
            ..Default::default()
        };
        let zero = vec![C64::from(0.0); 10];
        let t = solve(&a, &b, &p, &zero, &opts, Some(&x)).unwrap();
        assert_eq!(t.status, SolveStatus::Converged);
        assert_eq!(t.mu, 0.998046875);
        let errors = t.errors.unwrap();
        let bounds = t.bounds.unwrap();
        for (e, bnd) in errors.iter().zip(&bounds) {
            assert!(*e <= bnd + 1e-10);
        }

        // Without a reference the residual surrogate dominates the true error.
        let t2 = solve(&a, &b, &p, &zero, &opts, None).unwrap();
        assert_eq!(t2.initial_error, Some(InitialError::ResidualSurrogate));
        assert!(t2.bounds.unwrap()[0] >= errors[0]);
    }

    #[test]
    fn dimension_checks() {
        let a = fdm_matrix(3).unwrap();
        let p = make_preconditioner(&a, PreconditionerKind::GaussSeidel).unwrap();
        assert!(matches!(
            solve(&a, &ones(2), &p, &ones(3), &SolveOptions::default(), None),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
