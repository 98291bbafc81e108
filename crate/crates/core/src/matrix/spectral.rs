//! Spectral radius of nonnegative matrices.
//!
//! Power iteration on the shifted matrix `I + B` from the all-ones vector.
//! For `B >= 0` the Perron root `rho(B)` is an eigenvalue and `1 + rho(B)`
//! strictly dominates every other eigenvalue of `I + B` in modulus, so the
//! iteration converges even for cyclic matrices such as Jacobi matrices of
//! tridiagonal problems. Each iterate `x > 0` yields the Collatz-Wielandt
//! bracket `min (Bx)_i / x_i <= rho(B) <= max (Bx)_i / x_i`.
//!
//! When the plain iteration stalls or runs out of budget (nearly equal
//! dominant eigenvalues of different irreducible blocks), matrices of
//! moderate order fall back to
//! forming `(I + B)^(2^s)` by repeated squaring and reading the Perron
//! direction off its row sums.

use super::{NonNegMatrix, RealMatrix};

/// Largest order for which the squaring fallback is attempted.
const SQUARING_MAX_ORDER: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Half-width of the band around 1 in which `rho < 1` tests are inconclusive.
    pub band: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
            band: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralStatus {
    Converged,
    Unresolved,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    pub value: f64,
    /// Certified lower bound from the last iterate.
    pub lower: f64,
    /// Certified upper bound from the last iterate.
    pub upper: f64,
    pub iterations: usize,
    pub status: SpectralStatus,
    /// Set when `|value - 1| < band`.
    pub inconclusive: bool,
}

impl SpectralEstimate {
    /// `Some(true)` if the estimate is decisively below 1, `Some(false)` if
    /// decisively above, `None` inside the band. Unresolved estimates only
    /// decide through their certified bracket.
    pub fn below_one(&self, band: f64) -> Option<bool> {
        let (lo, hi) = match self.status {
            SpectralStatus::Converged => (self.value, self.value),
            SpectralStatus::Unresolved => (self.lower, self.upper),
        };
        if hi < 1.0 - band {
            Some(true)
        } else if lo > 1.0 + band {
            Some(false)
        } else {
            None
        }
    }
}

pub fn spectral_radius_nonneg(b: &NonNegMatrix, opts: &SpectralOptions) -> SpectralEstimate {
    // Triangular: the eigenvalues are the diagonal entries.
    if b.is_lower_triangular() || b.is_upper_triangular() {
        let rho = b.diagonal().into_iter().fold(0.0, f64::max);
        return finish(rho, rho, rho, 0, SpectralStatus::Converged, opts);
    }
    let n = b.order();
    let mut x = vec![1.0; n];
    let mut prev_value = f64::NAN;
    let mut prev_change = f64::NAN;
    let mut lower = 0.0;
    let mut upper = f64::INFINITY;
    let mut value = 0.0;
    let mut used = opts.max_iter;

    for k in 1..=opts.max_iter {
        let bx = b.mul_vec(&x);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (num, den) in bx.iter().zip(&x) {
            let r = num / den;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        lower = f64::max(lower, lo);
        upper = upper.min(hi);
        // e^T B x / e^T x: a weighted mean of the Collatz ratios.
        value = bx.iter().sum::<f64>() / x.iter().sum::<f64>();
        value = within(value, lower, upper);

        let scale = value.max(1.0);
        if upper - lower <= opts.tol * scale {
            return finish(
                0.5 * (lower + upper),
                lower,
                upper,
                k,
                SpectralStatus::Converged,
                opts,
            );
        }
        // Without a closed bracket, accept a stalled estimate only after
        // every entry has had time to influence every other (2n sweeps), and
        // only if the remaining error extrapolated from the ratio of
        // successive changes is below tolerance.
        let change = (value - prev_value).abs();
        if k > 2 * n && change.is_finite() && prev_change.is_finite() {
            let q = if prev_change > 0.0 {
                (change / prev_change).min(0.999_999)
            } else {
                0.0
            };
            if change <= opts.tol * scale && change * q / (1.0 - q) <= opts.tol * scale {
                // Slowly separating eigenvalues can mimic a stall, so small
                // matrices confirm it by squaring.
                if n <= SQUARING_MAX_ORDER {
                    used = k;
                    break;
                }
                return finish(value, lower, upper, k, SpectralStatus::Converged, opts);
            }
        }
        prev_change = change;
        prev_value = value;

        let mut next: Vec<f64> = x.iter().zip(&bx).map(|(xi, bi)| xi + bi).collect();
        let norm = next.iter().fold(0.0, |a: f64, &v| a.max(v));
        next.iter_mut().for_each(|v| *v /= norm);
        x = next;
    }
    if n <= SQUARING_MAX_ORDER {
        if let Some(est) = squaring_refinement(b, lower, upper, used, opts) {
            return est;
        }
    }
    finish(value, lower, upper, used, SpectralStatus::Unresolved, opts)
}

fn squaring_refinement(
    b: &NonNegMatrix,
    mut lower: f64,
    mut upper: f64,
    used: usize,
    opts: &SpectralOptions,
) -> Option<SpectralEstimate> {
    let n = b.order();
    let mut power = RealMatrix::identity(n).add(b);
    let mut prev = f64::NAN;
    for step in 1..=64 {
        power = power.matmul(&power);
        let peak = power.as_slice().iter().fold(0.0, |a: f64, &v| a.max(v));
        if !(peak.is_finite() && peak > 0.0) {
            return None;
        }
        power = power.scale(1.0 / peak);
        let x: Vec<f64> = (0..n).map(|i| power.row(i).iter().sum()).collect();
        let bx = b.mul_vec(&x);
        let (mut lo, mut hi, mut positive) = (f64::INFINITY, 0.0f64, true);
        for (num, den) in bx.iter().zip(&x) {
            if *den > 0.0 {
                lo = lo.min(num / den);
                hi = hi.max(num / den);
            } else {
                positive = false;
            }
        }
        if lo.is_finite() {
            lower = lower.max(lo);
        }
        if positive {
            upper = upper.min(hi);
        }
        let raw = bx.iter().sum::<f64>() / x.iter().sum::<f64>();
        let scale = raw.max(1.0);
        // After 2^40 effective steps only gaps below ~1e-11 can still move
        // the quotient, so a stable raw value there is trusted.
        let settled = step >= 40 && (raw - prev).abs() <= opts.tol * scale;
        if upper - lower <= opts.tol * scale || settled {
            let value = within(raw, lower, upper);
            let iterations = used + step;
            return Some(finish(
                value,
                lower,
                upper,
                iterations,
                SpectralStatus::Converged,
                opts,
            ));
        }
        prev = raw;
    }
    None
}

/// Clamps into the bracket; round-off can cross the bounds by an ulp.
fn within(value: f64, lower: f64, upper: f64) -> f64 {
    if lower <= upper {
        value.clamp(lower, upper)
    } else {
        0.5 * (lower + upper)
    }
}

fn finish(
    value: f64,
    lower: f64,
    upper: f64,
    iterations: usize,
    status: SpectralStatus,
    opts: &SpectralOptions,
) -> SpectralEstimate {
    SpectralEstimate {
        value,
        lower,
        upper,
        iterations,
        status,
        inconclusive: (value - 1.0).abs() < opts.band,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nonneg(rows: Vec<Vec<f64>>) -> NonNegMatrix {
        NonNegMatrix::new(RealMatrix::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn zero_matrix() {
        let est = spectral_radius_nonneg(&nonneg(vec![vec![0.0; 3]; 3]), &Default::default());
        assert_eq!(est.value, 0.0);
        assert_eq!(est.status, SpectralStatus::Converged);
        assert_eq!(est.below_one(1e-8), Some(true));
    }

    #[test]
    fn identity_is_inconclusive() {
        let id = NonNegMatrix::new(RealMatrix::identity(4)).unwrap();
        let est = spectral_radius_nonneg(&id, &Default::default());
        assert!((est.value - 1.0).abs() < 1e-14);
        assert!(est.inconclusive);
        assert_eq!(est.below_one(1e-8), None);
    }

    #[test]
    fn fdm_jacobi_matrix() {
        let b = nonneg(vec![
            vec![0.0, 0.5, 0.0],
            vec![0.5, 0.0, 0.5],
            vec![0.0, 0.5, 0.0],
        ]);
        let est = spectral_radius_nonneg(&b, &Default::default());
        assert_eq!(est.status, SpectralStatus::Converged);
        assert!((est.value - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        assert!(est.lower <= std::f64::consts::FRAC_1_SQRT_2 + 1e-15);
        assert!(est.upper >= std::f64::consts::FRAC_1_SQRT_2 - 1e-15);
    }

    #[test]
    fn triangular_reads_the_diagonal() {
        let b = nonneg(vec![vec![0.0, 3.0], vec![0.0, 0.0]]);
        let est = spectral_radius_nonneg(&b, &Default::default());
        assert_eq!(est.value, 0.0);
        let b = nonneg(vec![vec![0.25, 0.0], vec![7.0, 0.5]]);
        let est = spectral_radius_nonneg(&b, &Default::default());
        assert_eq!(est.value, 0.5);
        assert_eq!(est.status, SpectralStatus::Converged);
    }

    #[test]
    fn squaring_rescues_small_budget() {
        let b = nonneg(vec![
            vec![0.0, 0.5, 0.0],
            vec![0.5, 0.0, 0.5],
            vec![0.0, 0.5, 0.0],
        ]);
        let opts = SpectralOptions {
            max_iter: 2,
            ..Default::default()
        };
        let est = spectral_radius_nonneg(&b, &opts);
        assert_eq!(est.status, SpectralStatus::Converged);
        assert!((est.value - 0.5f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn unresolved_when_budget_exhausted() {
        let n = SQUARING_MAX_ORDER + 1;
        let b = NonNegMatrix::new(RealMatrix::from_fn(n, |i, j| {
            if i.abs_diff(j) == 1 {
                0.5
            } else {
                0.0
            }
        }))
        .unwrap();
        let opts = SpectralOptions {
            max_iter: 2,
            ..Default::default()
        };
        let est = spectral_radius_nonneg(&b, &opts);
        assert_eq!(est.status, SpectralStatus::Unresolved);
        assert!(est.lower <= est.value && est.value <= est.upper);
    }
}
