use nalgebra::DMatrix;

use crate::error::{Error, Result};

// Pade degrees and the 1-norm thresholds below which each degree reaches
// unit roundoff in backward error.
const THETA: [(usize, f64); 5] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_230e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068e0),
    (13, 5.371_920_351_148_152e0),
];

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `e^{M t}` by scaling and squaring with a diagonal Pade approximant.
pub fn matrix_exponential(m: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "matrix exponential needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if !t.is_finite() || m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("matrix exponential of non-finite input".into()));
    }
    let n = m.nrows();
    let a = m * t;
    let nrm = norm1(&a);
    if nrm == 0.0 {
        return Ok(DMatrix::identity(n, n));
    }

    for &(deg, theta) in &THETA[..4] {
        if nrm <= theta {
            let coeffs: &[f64] = match deg {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            return pade_low(&a, coeffs);
        }
    }

    let theta13 = THETA[4].1;
    let s = (nrm / theta13).log2().ceil().max(0.0);
    if s > 1000.0 {
        return Err(Error::Overflow(format!(
            "||M t||_1 = {nrm:.3e} is too large for scaling and squaring"
        )));
    }
    let s = s as i32;
    let scaled = &a * 2f64.powi(-s);
    let mut r = pade13(&scaled)?;
    for _ in 0..s {
        r = &r * &r;
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow(format!(
                "matrix exponential overflowed while squaring (||M t||_1 = {nrm:.3e})"
            )));
        }
    }
    Ok(r)
}

fn pade_low(a: &DMatrix<f64>, b: &[f64]) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let ident = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let mut even = &ident * b[0];
    let mut odd = &ident * b[1];
    let mut pow = ident.clone();
    let mut k = 2;
    while k < b.len() {
        pow = &pow * &a2;
        even += &pow * b[k];
        if k + 1 < b.len() {
            odd += &pow * b[k + 1];
        }
        k += 2;
    }
    let u = a * odd;
    solve_pade(&even, &u)
}

fn pade13(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let b = &B13;
    let ident = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let u = a * (&a6 * inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &ident * b[1]);
    let inner_v = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = &a6 * inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &ident * b[0];
    solve_pade(&v, &u)
}

fn solve_pade(v: &DMatrix<f64>, u: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = v + u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .filter(|r| r.iter().all(|x| x.is_finite()))
        .ok_or_else(|| Error::Numerical("singular Pade denominator in matrix exponential".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn zero_matrix_gives_identity() {
        let z = DMatrix::<f64>::zeros(3, 3);
        assert_eq!(matrix_exponential(&z, 7.0).unwrap(), DMatrix::identity(3, 3));
    }

    #[test]
    fn diagonal_case() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, -2.0]));
        let e = matrix_exponential(&d, 1.0).unwrap();
        assert!((e[(0, 0)] - (-1f64).exp()).abs() < 1e-15);
        assert!((e[(1, 1)] - (-2f64).exp()).abs() < 1e-15);
        assert_eq!(e[(0, 1)], 0.0);
    }

    #[test]
    fn nilpotent_series_truncates() {
        let nil = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let e = matrix_exponential(&nil, 1.0).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!((e - expected).norm() < 1e-15);
    }

    #[test]
    fn every_pade_degree_matches_rotation() {
        // exp of [[0, w], [-w, 0]] is a rotation by w; sweep the norm across all branches.
        for &w in &[1e-3, 0.1, 0.8, 1.9, 4.0, 30.0, 250.0] {
            let m = DMatrix::from_row_slice(2, 2, &[0.0, w, -w, 0.0]);
            let e = matrix_exponential(&m, 1.0).unwrap();
            let r = DMatrix::from_row_slice(2, 2, &[w.cos(), w.sin(), -w.sin(), w.cos()]);
            assert!((e - r).norm() < 1e-13 * (1.0 + w), "w = {w}");
        }
    }

    #[test]
    fn overflow_is_reported() {
        let m = DMatrix::from_row_slice(1, 1, &[1e4]);
        assert!(matches!(matrix_exponential(&m, 1.0), Err(Error::Overflow(_))));
    }
}
