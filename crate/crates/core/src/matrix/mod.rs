//! Dense square matrices over `f64` and `Complex<f64>`, entrywise moduli,
//! structural splittings and the infinity norm.
//!
//! All matrices are stored row-major and are immutable once built. Real
//! inputs to the analysis routines are represented as [`ComplexMatrix`]
//! with zero imaginary parts; [`RealMatrix`] is used internally for
//! comparison matrices and other sign-indefinite real data.

mod lu;
mod spectral;

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Deref, Div, Index, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use lu::{solve_dense, Factorization, LuFactors};
pub use spectral::{spectral_radius_nonneg, SpectralEstimate, SpectralOptions, SpectralStatus};

pub type C64 = Complex64;

/// Field operations needed by the dense kernels.
pub trait Scalar:
    Copy
    + PartialEq
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    /// Absolute value (complex modulus for complex scalars).
    fn modulus(self) -> f64;
    fn is_finite(self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Scalar for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        C64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Square dense matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    order: usize,
    data: Vec<T>,
}

/// Complex matrix, the input type of every analysis (`A` and `P`).
pub type ComplexMatrix = DenseMatrix<C64>;
/// Real matrix of unrestricted sign, e.g. a comparison matrix.
pub type RealMatrix = DenseMatrix<f64>;

impl<T: Scalar> DenseMatrix<T> {
    /// Builds a matrix from row-major data, checking shape and finiteness.
    pub fn new(order: usize, data: Vec<T>) -> Result<Self> {
        if order == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != order * order {
            return Err(Error::DimensionMismatch {
                expected: order * order,
                found: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: k / order,
                col: k % order,
            });
        }
        Ok(Self { order, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let order = rows.len();
        if order == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut data = Vec::with_capacity(order * order);
        for row in rows {
            if row.len() != order {
                return Err(Error::NonSquare {
                    rows: order,
                    cols: row.len(),
                });
            }
            data.extend(row);
        }
        Self::new(order, data)
    }

    /// Builds a matrix entry by entry. The closure must return finite values.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(order > 0, "matrix order must be positive");
        let mut data = Vec::with_capacity(order * order);
        for i in 0..order {
            for j in 0..order {
                data.push(f(i, j));
            }
        }
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self { order, data }
    }

    pub fn zeros(order: usize) -> Self {
        Self::from_fn(order, |_, _| T::zero())
    }

    pub fn identity(order: usize) -> Self {
        Self::from_fn(order, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { T::zero() })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.order + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.order).map(|i| self.get(i, i)).collect()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> DenseMatrix<U> {
        DenseMatrix {
            order: self.order,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.order, |i, j| self.get(j, i))
    }

    /// Entrywise modulus `|M|`.
    pub fn modulus(&self) -> NonNegMatrix {
        NonNegMatrix(self.map(Scalar::modulus))
    }

    /// Partition into diagonal, strictly lower and strictly upper parts.
    pub fn split(&self) -> StructuralSplit<T> {
        let n = self.order;
        StructuralSplit {
            diag: Self::from_fn(n, |i, j| if i == j { self.get(i, j) } else { T::zero() }),
            lower: Self::from_fn(n, |i, j| if i > j { self.get(i, j) } else { T::zero() }),
            upper: Self::from_fn(n, |i, j| if i < j { self.get(i, j) } else { T::zero() }),
        }
    }

    /// `diag(M) + tril(M)`, the Gauss-Seidel part.
    pub fn lower_with_diagonal(&self) -> Self {
        Self::from_fn(
            self.order,
            |i, j| if i >= j { self.get(i, j) } else { T::zero() },
        )
    }

    pub fn inf_norm(&self) -> f64 {
        (0..self.order)
            .map(|i| self.row(i).iter().map(|v| v.modulus()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.order, "vector length must match matrix order");
        (0..self.order)
            .map(|i| {
                let mut acc = T::zero();
                for (a, b) in self.row(i).iter().zip(x) {
                    acc += *a * *b;
                }
                acc
            })
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order, "matrix orders must match");
        let n = self.order;
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                let out = &mut data[i * n..(i + 1) * n];
                for (o, b) in out.iter_mut().zip(other.row(k)) {
                    *o += a * *b;
                }
            }
        }
        Self { order: n, data }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| c * v)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.order, other.order, "matrix orders must match");
        Self {
            order: self.order,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries().all(|(i, j, v)| i == j || v == T::zero())
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.entries().all(|(i, j, v)| i >= j || v == T::zero())
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.entries().all(|(i, j, v)| i <= j || v == T::zero())
    }

    /// Iterator over `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        let n = self.order;
        self.data
            .iter()
            .enumerate()
            .map(move |(k, &v)| (k / n, k % n, v))
    }

    /// Inverse via LU, column by column.
    pub fn inverse(&self) -> Result<Self> {
        let factors = self.factor_lu()?;
        let n = self.order;
        let mut data = vec![T::zero(); n * n];
        let mut unit = vec![T::zero(); n];
        for j in 0..n {
            unit.iter_mut().for_each(|v| *v = T::zero());
            unit[j] = T::one();
            let col = factors.solve(&unit);
            for i in 0..n {
                data[i * n + j] = col[i];
            }
        }
        Ok(Self { order: n, data })
    }
}

impl ComplexMatrix {
    pub fn from_real(m: &RealMatrix) -> Self {
        m.map(C64::from_real)
    }

    /// Builds a complex matrix from real rows.
    pub fn from_real_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Ok(Self::from_real(&RealMatrix::from_rows(rows)?))
    }

    /// True when every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|v| v.im == 0.0)
    }
}

impl<T: Scalar> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.order + j]
    }
}

/// Diagonal, strict lower and strict upper parts of a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralSplit<T> {
    pub diag: DenseMatrix<T>,
    pub lower: DenseMatrix<T>,
    pub upper: DenseMatrix<T>,
}

impl<T: Scalar> StructuralSplit<T> {
    /// Off-diagonal part, `tril + triu`.
    pub fn off(&self) -> DenseMatrix<T> {
        self.lower.add(&self.upper)
    }

    pub fn reconstruct(&self) -> DenseMatrix<T> {
        self.diag.add(&self.lower).add(&self.upper)
    }
}

/// Real matrix with entrywise nonnegative entries.
#[derive(Debug, Clone, PartialEq)]
pub struct NonNegMatrix(RealMatrix);

impl NonNegMatrix {
    pub fn new(m: RealMatrix) -> Result<Self> {
        if let Some((i, j, _)) = m.entries().find(|&(_, _, v)| v < 0.0) {
            return Err(Error::Internal(format!(
                "negative entry at ({i}, {j}) in a nonnegative matrix"
            )));
        }
        Ok(Self(m))
    }

    pub fn as_matrix(&self) -> &RealMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.0
    }

    /// Row sums, i.e. the product with the all-ones vector.
    pub fn row_sums(&self) -> RealVector {
        RealVector(
            (0..self.0.order())
                .map(|i| self.0.row(i).iter().sum())
                .collect(),
        )
    }
}

impl Deref for NonNegMatrix {
    type Target = RealMatrix;

    fn deref(&self) -> &RealMatrix {
        &self.0
    }
}

/// Real column vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RealVector(Vec<f64>);

impl RealVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: k, col: 0 });
        }
        Ok(Self(values))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn ones(len: usize) -> Self {
        Self(vec![1.0; len])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn inf_norm(&self) -> f64 {
        inf_norm(&self.0[..])
    }

    /// Entrywise `self >= other - slack`.
    pub fn dominates(&self, other: &[f64], slack: f64) -> bool {
        self.0.iter().zip(other).all(|(a, b)| *a >= *b - slack)
    }
}

impl From<Vec<f64>> for RealVector {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

impl Deref for RealVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Infinity norm: maximum absolute row sum for matrices, maximum modulus for vectors.
pub trait InfNorm {
    fn inf_norm(&self) -> f64;
}

impl<T: Scalar> InfNorm for DenseMatrix<T> {
    fn inf_norm(&self) -> f64 {
        DenseMatrix::inf_norm(self)
    }
}

impl InfNorm for NonNegMatrix {
    fn inf_norm(&self) -> f64 {
        self.0.inf_norm()
    }
}

impl<T: Scalar> InfNorm for [T] {
    fn inf_norm(&self) -> f64 {
        self.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }
}

impl<T: Scalar> InfNorm for Vec<T> {
    fn inf_norm(&self) -> f64 {
        self[..].inf_norm()
    }
}

impl InfNorm for RealVector {
    fn inf_norm(&self) -> f64 {
        self.0[..].inf_norm()
    }
}

pub fn inf_norm<N: InfNorm + ?Sized>(x: &N) -> f64 {
    x.inf_norm()
}

/// Entrywise modulus of a complex matrix.
pub fn entrywise_modulus(m: &ComplexMatrix) -> NonNegMatrix {
    m.modulus()
}
