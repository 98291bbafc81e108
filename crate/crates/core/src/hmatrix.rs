//! Comparison matrices and H-matrix certification.
//!
//! A matrix `A` is an H-matrix when its comparison matrix `M(A)` (moduli on
//! the diagonal, negated moduli off it) is a non-singular M-matrix. The
//! certificate produced here is a strictly positive vector `u` with
//! `M(A) u > 0`, i.e. generalized diagonal dominance of `A` by rows. It is
//! obtained by solving `M(A) u = e`: for an H-matrix `M(A)^{-1} >= 0` has no
//! zero row, so `u` is strictly positive, and any positive solution is itself
//! a witness.

use crate::matrix::{
    spectral_radius_nonneg, ComplexMatrix, NonNegMatrix, RealMatrix, RealVector, SpectralEstimate,
    SpectralOptions,
};

/// `M(A)` together with its M-matrix split `M(A) = r I - B`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonMatrix {
    matrix: RealMatrix,
    shift: f64,
    b: NonNegMatrix,
}

impl ComparisonMatrix {
    pub fn new(a: &ComplexMatrix) -> Self {
        let matrix = RealMatrix::from_fn(a.order(), |i, j| {
            let m = a.get(i, j).norm();
            if i == j {
                m
            } else {
                -m
            }
        });
        let shift = matrix.diagonal().into_iter().fold(0.0, f64::max);
        let b = RealMatrix::from_fn(a.order(), |i, j| {
            if i == j {
                shift - matrix.get(i, i)
            } else {
                -matrix.get(i, j)
            }
        });
        // r - |a_ii| >= 0 and -(-|a_ij|) >= 0 by construction.
        let b = NonNegMatrix::new(b).expect("M-split of a comparison matrix is nonnegative");
        Self { matrix, shift, b }
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    /// `r = max_i |a_ii|`.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// `B = r I - M(A)`.
    pub fn b(&self) -> &NonNegMatrix {
        &self.b
    }

    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    /// The Jacobi matrix `|diag A|^{-1} |off A|`; `None` with a zero diagonal.
    pub fn jacobi_matrix(&self) -> Option<NonNegMatrix> {
        let d = self.matrix.diagonal();
        if d.contains(&0.0) {
            return None;
        }
        let j = RealMatrix::from_fn(self.order(), |i, k| {
            if i == k {
                0.0
            } else {
                -self.matrix.get(i, k) / d[i]
            }
        });
        NonNegMatrix::new(j).ok()
    }

    /// Row-wise dominance margins `|a_ii| u_i - sum_{j != i} |a_ij| u_j`,
    /// i.e. `M(A) u`.
    pub fn margins(&self, u: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec(u)
    }

    /// Per-row magnitude `|a_ii| u_i + sum_{j != i} |a_ij| u_j`, used to scale
    /// strictness tolerances.
    pub fn row_scales(&self, u: &[f64]) -> Vec<f64> {
        (0..self.order())
            .map(|i| {
                self.matrix
                    .row(i)
                    .iter()
                    .zip(u)
                    .map(|(m, x)| (m * x).abs())
                    .sum()
            })
            .collect()
    }
}

pub fn comparison_matrix(a: &ComplexMatrix) -> ComparisonMatrix {
    ComparisonMatrix::new(a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HVerdict {
    IsH,
    NotH,
    Inconclusive,
}

impl HVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::IsH => "is-h",
            Self::NotH => "not-h",
            Self::Inconclusive => "inconclusive",
        }
    }
}

/// Outcome of [`certify_h`].
#[derive(Debug, Clone, PartialEq)]
pub struct HCertificate {
    pub verdict: HVerdict,
    /// Positive vector with `M(A) u > 0`; present iff the verdict is `IsH`.
    pub witness: Option<RealVector>,
    /// Spectral radius estimate of the Jacobi matrix of `M(A)`.
    pub jacobi_radius: Option<SpectralEstimate>,
    pub reason: Option<String>,
    order: usize,
}

impl HCertificate {
    pub fn is_h(&self) -> bool {
        self.verdict == HVerdict::IsH
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn witness(&self) -> Option<&RealVector> {
        self.witness.as_ref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HOptions {
    /// Witness components must exceed `positivity_tol * ||u||_inf`.
    pub positivity_tol: f64,
    pub spectral: SpectralOptions,
}

impl Default for HOptions {
    fn default() -> Self {
        Self {
            positivity_tol: 1e-12,
            spectral: SpectralOptions::default(),
        }
    }
}

pub fn certify_h(a: &ComplexMatrix) -> HCertificate {
    certify_h_with(a, &HOptions::default())
}

pub fn certify_h_with(a: &ComplexMatrix, opts: &HOptions) -> HCertificate {
    let order = a.order();
    let cmp = ComparisonMatrix::new(a);
    let not_h = |reason: String, jacobi_radius| HCertificate {
        verdict: HVerdict::NotH,
        witness: None,
        jacobi_radius,
        reason: Some(reason),
        order,
    };

    if let Some(i) = cmp.matrix().diagonal().iter().position(|&d| d == 0.0) {
        return not_h(format!("zero diagonal entry in row {i}"), None);
    }

    let jacobi_radius = cmp
        .jacobi_matrix()
        .map(|j| spectral_radius_nonneg(&j, &opts.spectral));
    let jacobi_says_h = jacobi_radius.and_then(|r| r.below_one(opts.spectral.band));

    let primary = match cmp.matrix().solve(&vec![1.0; order]) {
        Err(_) => Err("singular comparison matrix".to_string()),
        Ok(u) => {
            let floor = opts.positivity_tol * u.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
            let margins = cmp.margins(&u);
            if let Some(i) = u.iter().position(|&v| v <= floor) {
                Err(format!(
                    "non-positive component {:e} of M(A)^-1 e in row {i}",
                    u[i]
                ))
            } else if let Some(i) = margins.iter().position(|&v| v <= 0.0) {
                Err(format!("witness fails dominance in row {i}"))
            } else {
                Ok(RealVector::from(u))
            }
        }
    };

    // The spectral diagnostic only overrides the primary test when it
    // decisively contradicts it.
    match (primary, jacobi_says_h) {
        (Ok(_), Some(false)) => HCertificate {
            verdict: HVerdict::Inconclusive,
            witness: None,
            jacobi_radius,
            reason: Some(
                "positive witness found but Jacobi spectral radius of M(A) exceeds 1".to_string(),
            ),
            order,
        },
        (Ok(u), _) => HCertificate {
            verdict: HVerdict::IsH,
            witness: Some(u),
            jacobi_radius,
            reason: None,
            order,
        },
        (Err(reason), Some(true)) => HCertificate {
            verdict: HVerdict::Inconclusive,
            witness: None,
            jacobi_radius,
            reason: Some(format!(
                "{reason}; but Jacobi spectral radius of M(A) is below 1"
            )),
            order,
        },
        (Err(reason), _) => not_h(reason, jacobi_radius),
    }
}
