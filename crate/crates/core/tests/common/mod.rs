//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use netswitch::sparsity::SparsityPattern;
use netswitch::Network;
use num_complex::Complex64;
use rand::Rng;

pub fn five_node() -> Network {
    Network::from_rows(
        &[
            vec![0.0, 1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 1.0],
            vec![-150.0, -260.0, -187.0, -69.0, -13.0],
        ],
        "A",
    )
    .unwrap()
}

pub fn printed_b() -> Network {
    Network::from_rows(
        &[
            vec![-13.0, -9.35, -3.45, -0.65, -0.05],
            vec![7.5, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 7.5, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 7.5, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 7.5, 0.0],
        ],
        "B",
    )
    .unwrap()
}

/// Zero entries of the printed complementary network, zero-based.
pub fn printed_pattern() -> SparsityPattern {
    let b = printed_b();
    let w = b.weights();
    SparsityPattern::new(5, (0..5).flat_map(|i| (0..5).map(move |j| (i, j))).filter(|&(i, j)| w[(i, j)] == 0.0)).unwrap()
}

pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<Complex64> {
    m.complex_eigenvalues().iter().copied().collect()
}

pub fn abscissa(m: &DMatrix<f64>) -> f64 {
    eigenvalues(m).iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Largest distance under a greedy nearest-neighbour matching of two spectra.
pub fn spectral_distance(x: &[Complex64], y: &[Complex64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let mut used = vec![false; y.len()];
    let mut worst: f64 = 0.0;
    for z in x {
        let (j, d) = y
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, w)| (j, (z - w).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

pub fn poly_matrix(a: &DMatrix<f64>, coeffs: &[f64]) -> DMatrix<f64> {
    let n = a.nrows();
    let mut out = DMatrix::zeros(n, n);
    let mut pow = DMatrix::identity(n, n);
    for &c in coeffs {
        out += &pow * c;
        pow = &pow * a;
    }
    out
}

pub fn poly_scalar(z: Complex64, coeffs: &[f64]) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Random matrix with entries in `[-1, 1]`, shifted so its abscissa is negative.
pub fn random_stable(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let shift = abscissa(&m) + rng.gen_range(0.1..1.0);
    m - DMatrix::identity(n, n) * shift
}

pub fn min_gap(eigs: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..eigs.len() {
        for j in i + 1..eigs.len() {
            gap = gap.min((eigs[i] - eigs[j]).norm());
        }
    }
    gap
}

/// Commuting pair `(A, p(A))` with the eigenvalue pairing `(lambda, p(lambda))`.
pub struct CommutingPair {
    pub a: Network,
    pub b: Network,
    pub lambdas: Vec<Complex64>,
    pub mus: Vec<Complex64>,
}

impl CommutingPair {
    pub fn random(n: usize, degree: usize, rng: &mut impl Rng) -> CommutingPair {
        loop {
            let a = random_stable(n, rng);
            let lambdas = eigenvalues(&a);
            if min_gap(&lambdas) < 1e-3 {
                continue;
            }
            let coeffs: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b = poly_matrix(&a, &coeffs);
            let mus = lambdas.iter().map(|&z| poly_scalar(z, &coeffs)).collect();
            return CommutingPair {
                a: Network::new(a, "A").unwrap(),
                b: Network::new(b, "B").unwrap(),
                lambdas,
                mus,
            };
        }
    }

    pub fn real_pairs(&self) -> Vec<(f64, f64)> {
        self.lambdas.iter().zip(&self.mus).map(|(l, m)| (l.re, m.re)).collect()
    }
}

/// Minimum of `max_i k a_i + (1 - k) b_i` over `points` equally spaced ratios.
pub fn grid_envelope_min(pairs: &[(f64, f64)], points: usize) -> f64 {
    let h = 1.0 / (points - 1) as f64;
    (0..points)
        .map(|j| {
            let k = j as f64 * h;
            pairs.iter().map(|&(a, b)| k * a + (1.0 - k) * b).fold(f64::NEG_INFINITY, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// `n^2 x p` matrix whose column `j` is `vec(A^j)`, column-major.
pub fn power_columns(a: &DMatrix<f64>, p: usize) -> DMatrix<f64> {
    let n = a.nrows();
    let mut out = DMatrix::zeros(n * n, p);
    let mut pow = DMatrix::identity(n, n);
    for j in 0..p {
        for c in 0..n {
            for r in 0..n {
                out[(c * n + r, j)] = pow[(r, c)];
            }
        }
        pow = &pow * a;
    }
    out
}

/// Whether the rows of the power columns indexed by `entries` have full column rank.
pub fn rows_full_rank(powers: &DMatrix<f64>, n: usize, entries: &[(usize, usize)]) -> bool {
    let p = powers.ncols();
    if entries.len() < p {
        return false;
    }
    let rows = DMatrix::from_fn(entries.len(), p, |r, c| {
        let (i, j) = entries[r];
        powers[(j * n + i, c)]
    });
    let sv = rows.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    smax > 0.0 && smin > f64::EPSILON * smax * entries.len().max(p) as f64
}
