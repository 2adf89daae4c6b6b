//! Dense real/complex matrix kernels.
//!
//! Everything that touches complex arithmetic lives here; downstream modules
//! only consume real parts through the accessors exposed on [`Spectrum`] and
//! [`EigenPairing`].

mod centralizer;
mod eigen;
mod expm;
mod logm;

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use centralizer::{centralizer_basis, CentralizerBasis};
pub use eigen::{common_eigenbasis, EigenPairing};
pub use expm::matrix_exponential;
pub use logm::matrix_logarithm;

/// Numerical tolerances shared by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative tolerance for eigenvalue distinctness and eigen-residuals.
    pub eig: f64,
    /// Relative commutator tolerance, `||AB - BA||_F <= comm * ||A||_F ||B||_F`.
    pub comm: f64,
    /// Singular value cutoff factor, `sigma > rank * sigma_max * max(rows, cols)`.
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eig: 1e-8,
            comm: 1e-10,
            rank: f64::EPSILON,
        }
    }
}

/// A weighted digraph given by its dense adjacency matrix; entry `(i, j)` is
/// the weight of edge `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    weights: DMatrix<f64>,
    label: String,
}

impl Network {
    pub fn new(weights: DMatrix<f64>, label: impl Into<String>) -> Result<Self> {
        if weights.nrows() == 0 {
            return Err(Error::InvalidInput("network must have at least one node".into()));
        }
        if !weights.is_square() {
            return Err(Error::Dimension(format!(
                "network matrix is {}x{}, expected square",
                weights.nrows(),
                weights.ncols()
            )));
        }
        if let Some(pos) = weights.iter().position(|v| !v.is_finite()) {
            let n = weights.nrows();
            return Err(Error::InvalidInput(format!(
                "non-finite weight at ({}, {})",
                pos % n + 1,
                pos / n + 1
            )));
        }
        Ok(Network {
            weights,
            label: label.into(),
        })
    }

    /// Builds a network from row-major rows.
    pub fn from_rows(rows: &[Vec<f64>], label: impl Into<String>) -> Result<Self> {
        let n = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Dimension(format!(
                "row {} has {} entries, expected {}",
                i + 1,
                r.len(),
                n
            )));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]), label)
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn into_weights(self) -> DMatrix<f64> {
        self.weights
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n())
            .map(|i| self.weights.row(i).iter().copied().collect())
            .collect()
    }

    pub fn nonzero_count(&self) -> usize {
        self.weights.iter().filter(|v| **v != 0.0).count()
    }

    pub fn trace(&self) -> f64 {
        self.weights.trace()
    }
}

/// Eigenvalues of a real matrix, sorted by decreasing real part and then by
/// decreasing imaginary part so conjugate pairs are adjacent.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
}

impl Spectrum {
    pub fn abscissa(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Smallest pairwise distance between eigenvalues (infinite for n = 1).
    pub fn min_gap(&self) -> f64 {
        let ev = &self.eigenvalues;
        let mut gap = f64::INFINITY;
        for i in 0..ev.len() {
            for j in i + 1..ev.len() {
                gap = gap.min((ev[i] - ev[j]).norm());
            }
        }
        gap
    }

    fn sort(&mut self) {
        self.eigenvalues.sort_by(|a, b| {
            b.re.partial_cmp(&a.re)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(b.im.partial_cmp(&a.im).unwrap_or(std::cmp::Ordering::Equal))
        });
    }
}

/// Full spectrum of a real square matrix.
pub fn spectrum(m: &DMatrix<f64>) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "spectrum needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let n = m.nrows();
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 100 * n.max(10))
        .ok_or_else(|| Error::EigenSolver(format!("real Schur iteration did not converge (n = {n})")))?;
    let raw = schur.complex_eigenvalues();
    let mut eigenvalues: Vec<Complex64> = raw.iter().copied().collect();
    // Real Schur blocks give exact conjugates; snap tiny imaginary parts.
    let scale = m.norm().max(1.0);
    for z in eigenvalues.iter_mut() {
        if z.im.abs() <= 64.0 * f64::EPSILON * scale {
            z.im = 0.0;
        }
    }
    let mut s = Spectrum { eigenvalues };
    s.sort();
    Ok(s)
}

/// `max Re(lambda)` over the eigenvalues of `m`.
pub fn spectral_abscissa(m: &DMatrix<f64>) -> Result<f64> {
    Ok(spectrum(m)?.abscissa())
}

/// Singular values in decreasing order; an empty matrix has none.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Cutoff below which a singular value counts as zero.
pub fn rank_threshold(sigma_max: f64, rows: usize, cols: usize, tol_rank: f64) -> f64 {
    tol_rank * sigma_max * rows.max(cols) as f64
}

/// Number of singular values above `tol_rank * sigma_max * max(rows, cols)`.
pub fn numerical_rank(m: &DMatrix<f64>, tol_rank: f64) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        None => 0,
        Some(&smax) => {
            let cut = rank_threshold(smax, m.nrows(), m.ncols(), tol_rank);
            sv.iter().filter(|s| **s > cut).count()
        }
    }
}

/// Column-major vectorization.
pub fn vec(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vec`] for an `n x n` matrix.
pub fn unvec(v: &DVector<f64>, n: usize) -> Result<DMatrix<f64>> {
    if v.len() != n * n {
        return Err(Error::Dimension(format!(
            "cannot unvec length {} into {}x{}",
            v.len(),
            n,
            n
        )));
    }
    Ok(DMatrix::from_column_slice(n, n, v.as_slice()))
}

/// Zero-based position of entry `(i, j)` inside `vec` of an `n x n` matrix.
pub fn vec_index(i: usize, j: usize, n: usize) -> usize {
    j * n + i
}

/// Inverse of [`vec_index`].
pub fn vec_entry(h: usize, n: usize) -> (usize, usize) {
    (h % n, h / n)
}

/// Frobenius norm of the commutator `AB - BA`.
pub fn commutator_norm(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a * b - b * a).norm()
}

pub fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:.6}", z.re)
    } else {
        format!("{:.6}{:+.6}i", z.re, z.im)
    }
}
