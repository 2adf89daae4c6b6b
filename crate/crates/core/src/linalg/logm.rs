use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use super::fmt_complex;
use crate::error::{Error, Result};

const QUAD_NODES: usize = 12;
const MAX_SQRTS: usize = 64;

/// Principal logarithm of a real matrix whose spectrum avoids the closed
/// negative real axis. Complex Schur form, repeated triangular square roots
/// until `||T - I||_1 <= 1/4`, then a Gauss-Legendre quadrature of
/// `log(I + X) = int_0^1 X (I + s X)^{-1} ds`.
pub fn matrix_logarithm(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "matrix logarithm needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("matrix logarithm of non-finite input".into()));
    }
    let n = m.nrows();
    let mc: DMatrix<Complex64> = m.map(|v| Complex64::new(v, 0.0));
    let schur = Schur::try_new(mc, f64::EPSILON, 200 * n.max(10))
        .ok_or_else(|| Error::EigenSolver("complex Schur iteration did not converge".into()))?;
    let (q, mut t) = schur.unpack();

    let scale = m.norm().max(f64::MIN_POSITIVE);
    for i in 0..n {
        let z = t[(i, i)];
        let on_axis = z.im.abs() <= 1e-12 * scale.max(z.norm());
        if z.norm() <= 1e-14 * scale || (on_axis && z.re <= 0.0) {
            return Err(Error::NoRealLogarithm(fmt_complex(z)));
        }
    }
    // Strictly lower part is roundoff; the recurrences below assume triangular input.
    for j in 0..n {
        for i in j + 1..n {
            t[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }

    let ident = DMatrix::<Complex64>::identity(n, n);
    let mut sqrts = 0;
    while norm1(&(&t - &ident)) > 0.25 {
        if sqrts == MAX_SQRTS {
            return Err(Error::Numerical(
                "inverse scaling did not bring the Schur factor near the identity".into(),
            ));
        }
        t = triangular_sqrt(&t);
        sqrts += 1;
    }

    let x = &t - &ident;
    let (nodes, weights) = gauss_legendre(QUAD_NODES);
    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    for (s, w) in nodes.iter().zip(weights.iter()) {
        let denom = &ident + &x * Complex64::new(*s, 0.0);
        acc += upper_right_solve(&x, &denom) * Complex64::new(*w, 0.0);
    }
    let log_t = acc * Complex64::new(2f64.powi(sqrts as i32), 0.0);
    let full = &q * log_t * q.adjoint();

    let re = full.map(|z| z.re);
    let im_norm = full.map(|z| z.im).norm();
    if im_norm > 1e-8 * re.norm().max(1.0) {
        return Err(Error::Numerical(format!(
            "logarithm has imaginary residue {im_norm:.3e}; input likely has no real principal logarithm"
        )));
    }
    Ok(re)
}

fn norm1(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

// Principal square root of an upper-triangular matrix, column by column.
fn triangular_sqrt(t: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = t.nrows();
    let mut r = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        r[(j, j)] = t[(j, j)].sqrt();
        for i in (0..j).rev() {
            let mut s = t[(i, j)];
            for k in i + 1..j {
                s -= r[(i, k)] * r[(k, j)];
            }
            let d = r[(i, i)] + r[(j, j)];
            r[(i, j)] = if d.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { s / d };
        }
    }
    r
}

// X * D^{-1} for upper-triangular D; X and D commute here but the order
// matters for roundoff only.
fn upper_right_solve(x: &DMatrix<Complex64>, d: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = d.nrows();
    // Solve Y D = X row by row: Y[i, j] = (X[i, j] - sum_{k<j} Y[i, k] D[k, j]) / D[j, j].
    let mut y = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = x[(i, j)];
            for k in 0..j {
                s -= y[(i, k)] * d[(k, j)];
            }
            y[(i, j)] = s / d[(j, j)];
        }
    }
    y
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub(crate) fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes.push(0.5 * (x + 1.0));
        weights.push(0.5 * w);
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix_exponential;
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quadrature_integrates_polynomials() {
        let (x, w) = gauss_legendre(QUAD_NODES);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let i7: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(7)).sum();
        assert!((i7 - 0.125).abs() < 1e-14);
    }

    #[test]
    fn identity_has_zero_log() {
        let l = matrix_logarithm(&DMatrix::identity(4, 4)).unwrap();
        assert!(l.norm() < 1e-15);
    }

    #[test]
    fn diagonal_case() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![(-2f64).exp(), (-3f64).exp()]));
        let l = matrix_logarithm(&d).unwrap();
        assert!((l[(0, 0)] + 2.0).abs() < 1e-12);
        assert!((l[(1, 1)] + 3.0).abs() < 1e-12);
        assert!(l[(0, 1)].abs() < 1e-14 && l[(1, 0)].abs() < 1e-14);
    }

    #[test]
    fn round_trip_random_small_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..8 {
            let m: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let m = &m / m.norm().max(1.0);
            let e = matrix_exponential(&m, 1.0).unwrap();
            let l = matrix_logarithm(&e).unwrap();
            assert!((&l - &m).norm() <= 1e-8 * (1.0 + m.norm()), "n = {n}");
            let back = matrix_exponential(&l, 1.0).unwrap();
            assert!((&back - &e).norm() <= 1e-8 * e.norm());
        }
    }

    #[test]
    fn rotation_inside_principal_strip() {
        let w = 3.0;
        let m = DMatrix::from_row_slice(2, 2, &[-0.5, w, -w, -0.5]);
        let l = matrix_logarithm(&matrix_exponential(&m, 1.0).unwrap()).unwrap();
        assert!((l - m).norm() < 1e-10);
    }

    #[test]
    fn negative_real_axis_rejected() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -2.0]));
        assert!(matches!(matrix_logarithm(&m), Err(Error::NoRealLogarithm(_))));
        let z = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0]));
        assert!(matches!(matrix_logarithm(&z), Err(Error::NoRealLogarithm(_))));
    }
}
