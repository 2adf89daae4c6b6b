use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{commutator_norm, fmt_complex, spectrum, Network, Spectrum, Tolerances};
use crate::error::{Error, Result};

/// Common eigenbasis of two commuting matrices.
///
/// Column `i` of `vectors` is a unit-norm eigenvector shared by `A` and `B`
/// with eigenvalues `pairs[i] = (lambda_i, mu_i)`. In the factorisation
/// `A = P^{-1} U_A P` this matrix is `P^{-1}`.
#[derive(Debug, Clone)]
pub struct EigenPairing {
    pub vectors: DMatrix<Complex64>,
    pub pairs: Vec<(Complex64, Complex64)>,
    /// 2-norm condition number of `vectors`.
    pub cond: f64,
}

impl EigenPairing {
    /// `(Re lambda_i, Re mu_i)` for every pair.
    pub fn real_pairs(&self) -> Vec<(f64, f64)> {
        self.pairs.iter().map(|(l, m)| (l.re, m.re)).collect()
    }

    pub fn lambdas(&self) -> Vec<Complex64> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    /// Rows `u_i^T = e_i^T P` of the inverse eigenvector matrix, so that
    /// `mu_i(B) = u_i^T B v_i` for any `B` in the centralizer.
    pub fn left_rows(&self) -> Result<DMatrix<Complex64>> {
        self.vectors
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("eigenvector matrix is singular".into()))
    }
}

/// Eigenvectors of a real matrix with distinct eigenvalues, one per entry of
/// `spec`, computed by shifted inverse iteration. Conjugate eigenvalues get
/// conjugate vectors.
pub(crate) fn eigenvectors(
    a: &DMatrix<f64>,
    spec: &Spectrum,
    tol: &Tolerances,
) -> Result<DMatrix<Complex64>> {
    let n = a.nrows();
    let ac: DMatrix<Complex64> = a.map(|v| Complex64::new(v, 0.0));
    let anorm = a.norm().max(1.0);
    let mut vecs = DMatrix::<Complex64>::zeros(n, n);
    let mut done = vec![false; n];
    for i in 0..n {
        if done[i] {
            continue;
        }
        let lambda = spec.eigenvalues[i];
        let v = inverse_iteration(&ac, lambda, anorm)?;
        let resid = (&ac * &v - &v * lambda).norm();
        if resid > tol.eig * anorm {
            return Err(Error::EigenSolver(format!(
                "eigenvector residual {resid:.3e} for eigenvalue {} exceeds tolerance",
                fmt_complex(lambda)
            )));
        }
        vecs.set_column(i, &v);
        done[i] = true;
        if lambda.im != 0.0 {
            if let Some(j) = (i + 1..n).find(|&j| !done[j] && spec.eigenvalues[j] == lambda.conj()) {
                vecs.set_column(j, &v.map(|z| z.conj()));
                done[j] = true;
            }
        }
    }
    Ok(vecs)
}

fn inverse_iteration(a: &DMatrix<Complex64>, lambda: Complex64, anorm: f64) -> Result<DVector<Complex64>> {
    let n = a.nrows();
    let shift = lambda + Complex64::new(anorm * 1e-13, anorm * 1e-13);
    let mut m = a.clone();
    for k in 0..n {
        m[(k, k)] -= shift;
    }
    let lu = m.lu();
    let mut v = DVector::from_fn(n, |k, _| Complex64::new(1.0 + 0.1 * k as f64, 0.05 * k as f64));
    v /= Complex64::new(v.norm(), 0.0);
    for _ in 0..4 {
        let w = lu
            .solve(&v)
            .ok_or_else(|| Error::EigenSolver("singular shifted system in inverse iteration".into()))?;
        let nrm = w.norm();
        if !nrm.is_finite() || nrm == 0.0 {
            return Err(Error::EigenSolver("inverse iteration broke down".into()));
        }
        v = w / Complex64::new(nrm, 0.0);
    }
    // Fix the phase: largest-magnitude component real and positive.
    let (imax, _) = v
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (k, z)| if z.norm() > acc.1 { (k, z.norm()) } else { acc });
    let phase = v[imax] / Complex64::new(v[imax].norm(), 0.0);
    v /= phase;
    if lambda.im == 0.0 {
        v = v.map(|z| Complex64::new(z.re, 0.0));
        let nrm = v.norm();
        v /= Complex64::new(nrm, 0.0);
    }
    Ok(v)
}

pub(crate) fn check_distinct(spec: &Spectrum, tol: &Tolerances) -> Result<()> {
    let ev = &spec.eigenvalues;
    let scale = 1.0 + ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for i in 0..ev.len() {
        for j in i + 1..ev.len() {
            if (ev[i] - ev[j]).norm() <= tol.eig * scale {
                return Err(Error::DegenerateSpectrum(fmt_complex(ev[i]), fmt_complex(ev[j])));
            }
        }
    }
    Ok(())
}

/// Pairs the eigenvalues of commuting `A` and `B` through their shared
/// eigenvectors. `A` must have a distinct spectrum.
pub fn common_eigenbasis(a: &Network, b: &Network, tol: &Tolerances) -> Result<EigenPairing> {
    let (am, bm) = (a.weights(), b.weights());
    if a.n() != b.n() {
        return Err(Error::Dimension(format!(
            "networks have {} and {} nodes",
            a.n(),
            b.n()
        )));
    }
    let comm = commutator_norm(am, bm);
    let bound = tol.comm * (am.norm() * bm.norm()).max(f64::MIN_POSITIVE);
    if comm > bound {
        return Err(Error::NotCommuting { residual: comm, bound });
    }
    let spec = spectrum(am)?;
    check_distinct(&spec, tol)?;
    let vectors = eigenvectors(am, &spec, tol)?;

    let bc: DMatrix<Complex64> = bm.map(|v| Complex64::new(v, 0.0));
    let bnorm = bm.norm().max(1.0);
    let mut pairs = Vec::with_capacity(a.n());
    for (i, lambda) in spec.eigenvalues.iter().enumerate() {
        let v = vectors.column(i);
        let bv = &bc * v;
        let mu = v.dotc(&bv);
        let resid = (bv - v * mu).norm();
        if resid > tol.eig * bnorm {
            return Err(Error::Numerical(format!(
                "eigenvector {} of A is not an eigenvector of B (residual {resid:.3e})",
                i + 1
            )));
        }
        pairs.push((*lambda, mu));
    }
    // Conjugate eigenvectors must carry conjugate mu values exactly.
    for i in 0..pairs.len().saturating_sub(1) {
        if pairs[i].0.im > 0.0 && pairs[i + 1].0 == pairs[i].0.conj() {
            pairs[i + 1].1 = pairs[i].1.conj();
        }
        if pairs[i].0.im == 0.0 {
            pairs[i].1.im = 0.0;
        }
    }
    if let Some(last) = pairs.last_mut() {
        if last.0.im == 0.0 {
            last.1.im = 0.0;
        }
    }

    let sv = vectors.clone().svd(false, false).singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    Ok(EigenPairing { vectors, pairs, cond })
}
