//! Random instance generators and brute-force oracles shared by the
//! integration and acceptance tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sassenfeld_core::matrix::{ComplexMatrix, NonNegMatrix, RealMatrix, C64};

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut TestRng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_phase(rng: &mut TestRng) -> C64 {
    C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Dense complex matrix with entries in the unit square.
pub fn random_matrix(rng: &mut TestRng, m: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(m, |_, _| random_complex(rng))
}

/// Random real matrix with entries in `[-1, 1]`, shifted by `shift * I`.
pub fn random_well_conditioned_real(rng: &mut TestRng, m: usize) -> RealMatrix {
    RealMatrix::from_fn(m, |i, j| {
        let v = rng.gen_range(-1.0..1.0);
        if i == j {
            v + m as f64
        } else {
            v
        }
    })
}

/// Off-diagonal entries random complex; each diagonal entry has modulus
/// `factor` times its row's off-diagonal sum, with `factor` drawn from
/// `[lo, hi)`, and a random phase. `lo > 1` gives strict diagonal dominance.
pub fn random_dominant(rng: &mut TestRng, m: usize, lo: f64, hi: f64) -> ComplexMatrix {
    let mut off = ComplexMatrix::from_fn(m, |i, j| {
        if i == j || rng.gen_bool(0.3) {
            C64::new(0.0, 0.0)
        } else {
            random_complex(rng)
        }
    });
    let sums: Vec<f64> = (0..m)
        .map(|i| off.row(i).iter().map(|v| v.norm()).sum())
        .collect();
    let diag: Vec<C64> = sums
        .iter()
        .map(|&s| {
            let factor = rng.gen_range(lo..hi);
            random_phase(rng) * (factor * s).max(1e-3)
        })
        .collect();
    off = off.add(&ComplexMatrix::from_diagonal(&diag));
    off
}

pub fn random_sdd(rng: &mut TestRng, m: usize) -> ComplexMatrix {
    random_dominant(rng, m, 1.05, 3.0)
}

pub fn random_nonneg(rng: &mut TestRng, m: usize, zero_prob: f64) -> NonNegMatrix {
    NonNegMatrix::new(RealMatrix::from_fn(m, |_, _| {
        if rng.gen_bool(zero_prob) {
            0.0
        } else {
            rng.gen_range(0.0..1.0)
        }
    }))
    .unwrap()
}

pub fn random_positive_diagonal(rng: &mut TestRng, m: usize) -> Vec<f64> {
    (0..m)
        .map(|_| 10f64.powf(rng.gen_range(-1.0..1.0)))
        .collect()
}

pub fn fdm(m: usize) -> ComplexMatrix {
    sassenfeld_core::fdm_matrix(m).unwrap()
}

/// `diag(d) M`.
pub fn scale_rows(d: &[C64], m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.order(), |i, j| d[i] * m.get(i, j))
}

/// `M diag(d)`.
pub fn scale_cols(m: &ComplexMatrix, d: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.order(), |i, j| m.get(i, j) * d[j])
}

/// Spectral radius by Gelfand's formula `rho(B) = lim ||B^k||^(1/k)`,
/// evaluated at `k = 2^60` by repeated normalized squaring.
pub fn spectral_radius_oracle(b: &RealMatrix) -> f64 {
    let mut m = b.clone();
    let mut log_scale = 0.0f64; // log of the factor removed so far, per unit power
    let mut power = 1.0f64;
    for _ in 0..60 {
        let norm = m.inf_norm();
        if norm == 0.0 {
            return 0.0;
        }
        m = m.scale(1.0 / norm);
        log_scale += norm.ln() / power;
        m = m.matmul(&m);
        power *= 2.0;
    }
    let norm = m.inf_norm();
    if norm == 0.0 {
        return 0.0;
    }
    (log_scale + norm.ln() / power).exp()
}

/// Sassenfeld's forward recursion for `P = diag(A) + tril(A)`:
/// `s_i = (sum_{j<i} |a_ij| s_j + sum_{j>i} |a_ij|) / |a_ii|`.
pub fn sassenfeld_recursion(a: &ComplexMatrix) -> Vec<f64> {
    let m = a.order();
    let mut s = vec![0.0; m];
    for i in 0..m {
        let lower: f64 = (0..i).map(|j| a.get(i, j).norm() * s[j]).sum();
        let upper: f64 = (i + 1..m).map(|j| a.get(i, j).norm()).sum();
        s[i] = (lower + upper) / a.get(i, i).norm();
    }
    s
}

/// Strict row dominance margins `|a_ii| t_i - sum_{j != i} |a_ij| t_j`.
pub fn dominance_margins(a: &ComplexMatrix, t: &[f64]) -> Vec<f64> {
    (0..a.order())
        .map(|i| {
            let off: f64 = (0..a.order())
                .filter(|&j| j != i)
                .map(|j| a.get(i, j).norm() * t[j])
                .sum();
            a.get(i, i).norm() * t[i] - off
        })
        .collect()
}

pub fn max_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}
