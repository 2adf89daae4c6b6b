use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{singular_values, spectrum, unvec, Network};
use crate::error::{Error, Result};

// Entries beyond this magnitude are treated as overflow of the power basis.
const POWER_LIMIT: f64 = 1e150;

/// Power basis `I, A, ..., A^{p-1}` of (a subspace of) the centralizer of `A`.
#[derive(Debug, Clone)]
pub struct CentralizerBasis {
    /// `n^2 x p`; column `j` is `vec(A^j)` in column-major order.
    pub powers: DMatrix<f64>,
    /// `n x p`; entry `(i, j)` is `lambda_i^j`, rows in spectrum order.
    pub vandermonde: DMatrix<Complex64>,
    pub eigenvalues: Vec<Complex64>,
    n: usize,
}

impl CentralizerBasis {
    pub fn order(&self) -> usize {
        self.powers.ncols()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `vec(I)^T A_p`, i.e. `trace(A^j)` for each column.
    pub fn trace_row(&self) -> DVector<f64> {
        let n = self.n;
        DVector::from_fn(self.order(), |j, _| {
            (0..n).map(|i| self.powers[(i * n + i, j)]).sum()
        })
    }

    /// `unvec(A_p c)`.
    pub fn combine(&self, c: &DVector<f64>) -> Result<DMatrix<f64>> {
        if c.len() != self.order() {
            return Err(Error::Dimension(format!(
                "coefficient vector has length {}, basis order is {}",
                c.len(),
                self.order()
            )));
        }
        unvec(&(&self.powers * c), self.n)
    }

    /// `Lambda_p c`: the spectrum of `unvec(A_p c)` in eigenvalue order.
    pub fn mapped_spectrum(&self, c: &DVector<f64>) -> Vec<Complex64> {
        let cc = c.map(|v| Complex64::new(v, 0.0));
        (&self.vandermonde * cc).iter().copied().collect()
    }

    /// 2-norm condition number of `A_p`; large values suggest truncating `p`.
    pub fn condition_number(&self) -> f64 {
        let sv = singular_values(&self.powers);
        match (sv.first(), sv.last()) {
            (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
            _ => f64::INFINITY,
        }
    }
}

/// Builds `A_p` by repeated multiplication together with the Vandermonde
/// matrix of the eigenvalues of `A`.
pub fn centralizer_basis(a: &Network, p: usize) -> Result<CentralizerBasis> {
    let n = a.n();
    if p == 0 || p > n {
        return Err(Error::InvalidInput(format!("basis order must satisfy 1 <= p <= n = {n}, got {p}")));
    }
    let am = a.weights();
    let mut powers = DMatrix::<f64>::zeros(n * n, p);
    let mut current = DMatrix::<f64>::identity(n, n);
    for j in 0..p {
        let peak = current.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !peak.is_finite() || peak > POWER_LIMIT {
            return Err(Error::Overflow(format!(
                "A^{j} has entries of magnitude {peak:.3e}; use a smaller order p or rescale A"
            )));
        }
        powers.set_column(j, &DVector::from_column_slice(current.as_slice()));
        if j + 1 < p {
            current = am * &current;
        }
    }
    let eigenvalues = spectrum(am)?.eigenvalues;
    let vandermonde = DMatrix::from_fn(n, p, |i, j| eigenvalues[i].powi(j as i32));
    Ok(CentralizerBasis {
        powers,
        vandermonde,
        eigenvalues,
        n,
    })
}
