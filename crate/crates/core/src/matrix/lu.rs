//! Direct solves: diagonal and triangular shortcuts, LU with partial pivoting.

use super::{DenseMatrix, Scalar};
use crate::error::{Error, Result};

/// Pivots with modulus at or below `m * eps * ||M||_inf` are treated as zero.
fn pivot_threshold<T: Scalar>(m: &DenseMatrix<T>) -> f64 {
    m.order() as f64 * f64::EPSILON * m.inf_norm()
}

/// LU factors `PA = LU` with unit lower `L` stored below the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct LuFactors<T> {
    order: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> LuFactors<T> {
    pub fn factor(m: &DenseMatrix<T>) -> Result<Self> {
        let n = m.order();
        let threshold = pivot_threshold(m);
        let mut lu = m.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (p, pivot_mod) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].modulus()))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot_mod <= threshold {
                return Err(Error::SingularMatrix {
                    step: k,
                    pivot: pivot_mod,
                });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                if factor == T::zero() {
                    continue;
                }
                for j in k + 1..n {
                    let ukj = lu[k * n + j];
                    lu[i * n + j] -= factor * ukj;
                }
            }
        }
        Ok(Self { order: n, lu, perm })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        let n = self.order;
        assert_eq!(
            rhs.len(),
            n,
            "right-hand side length must match matrix order"
        );
        let mut x: Vec<T> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[i * n + j] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[i * n + j] * x[j];
            }
            x[i] = acc / self.lu[i * n + i];
        }
        x
    }
}

/// A matrix prepared for repeated solves.
#[derive(Debug, Clone, PartialEq)]
pub enum Factorization<T> {
    Diagonal(Vec<T>),
    LowerTriangular(DenseMatrix<T>),
    UpperTriangular(DenseMatrix<T>),
    Lu(LuFactors<T>),
}

impl<T: Scalar> Factorization<T> {
    /// Chooses the cheapest exact strategy for the structure of `m`.
    pub fn new(m: &DenseMatrix<T>) -> Result<Self> {
        if m.is_diagonal() {
            check_diagonal(m)?;
            Ok(Self::Diagonal(m.diagonal()))
        } else if m.is_lower_triangular() {
            check_diagonal(m)?;
            Ok(Self::LowerTriangular(m.clone()))
        } else if m.is_upper_triangular() {
            check_diagonal(m)?;
            Ok(Self::UpperTriangular(m.clone()))
        } else {
            Self::lu(m)
        }
    }

    /// Forces the general LU path.
    pub fn lu(m: &DenseMatrix<T>) -> Result<Self> {
        LuFactors::factor(m).map(Self::Lu)
    }

    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        match self {
            Self::Diagonal(d) => {
                assert_eq!(
                    rhs.len(),
                    d.len(),
                    "right-hand side length must match matrix order"
                );
                rhs.iter().zip(d).map(|(&b, &dii)| b / dii).collect()
            }
            Self::LowerTriangular(m) => forward_substitution(m, rhs),
            Self::UpperTriangular(m) => back_substitution(m, rhs),
            Self::Lu(f) => f.solve(rhs),
        }
    }

    pub fn strategy_name(&self) -> &'static str {
        match self {
            Self::Diagonal(_) => "diagonal",
            Self::LowerTriangular(_) => "forward-substitution",
            Self::UpperTriangular(_) => "back-substitution",
            Self::Lu(_) => "lu",
        }
    }
}

fn check_diagonal<T: Scalar>(m: &DenseMatrix<T>) -> Result<()> {
    let threshold = pivot_threshold(m);
    for (k, d) in m.diagonal().into_iter().enumerate() {
        if d.modulus() <= threshold {
            return Err(Error::SingularMatrix {
                step: k,
                pivot: d.modulus(),
            });
        }
    }
    Ok(())
}

fn forward_substitution<T: Scalar>(m: &DenseMatrix<T>, rhs: &[T]) -> Vec<T> {
    let n = m.order();
    assert_eq!(
        rhs.len(),
        n,
        "right-hand side length must match matrix order"
    );
    let mut x = vec![T::zero(); n];
    for i in 0..n {
        let row = m.row(i);
        let mut acc = rhs[i];
        for j in 0..i {
            acc -= row[j] * x[j];
        }
        x[i] = acc / row[i];
    }
    x
}

fn back_substitution<T: Scalar>(m: &DenseMatrix<T>, rhs: &[T]) -> Vec<T> {
    let n = m.order();
    assert_eq!(
        rhs.len(),
        n,
        "right-hand side length must match matrix order"
    );
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let row = m.row(i);
        let mut acc = rhs[i];
        for j in i + 1..n {
            acc -= row[j] * x[j];
        }
        x[i] = acc / row[i];
    }
    x
}

/// Solves `m x = rhs`, using substitution when `m` is diagonal or triangular.
pub fn solve_dense<T: Scalar>(m: &DenseMatrix<T>, rhs: &[T]) -> Result<Vec<T>> {
    if rhs.len() != m.order() {
        return Err(Error::DimensionMismatch {
            expected: m.order(),
            found: rhs.len(),
        });
    }
    Ok(Factorization::new(m)?.solve(rhs))
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn factor(&self) -> Result<Factorization<T>> {
        Factorization::new(self)
    }

    pub fn factor_lu(&self) -> Result<LuFactors<T>> {
        LuFactors::factor(self)
    }

    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        solve_dense(self, rhs)
    }
}
