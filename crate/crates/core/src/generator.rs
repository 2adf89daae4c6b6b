//! Seeded random test networks.

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{spectrum, Network};

const MAX_DRAWS: usize = 200;

/// Sparse Hurwitz network with exactly `nnz` nonzero entries: a negative
/// diagonal plus `nnz - n` off-diagonal edges. Draws are repeated until the
/// spectrum is stable and well separated.
pub fn random_sparse_hurwitz(n: usize, nnz: usize, seed: u64) -> Result<Network> {
    if n == 0 || nnz < n || nnz > n * n {
        return Err(Error::InvalidInput(format!(
            "need n <= nnz <= n^2 for a sparse Hurwitz network, got n = {n}, nnz = {nnz}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let off = n * (n - 1);
    for _ in 0..MAX_DRAWS {
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = -rng.gen_range(0.3..2.0);
        }
        for k in sample(&mut rng, off, nnz - n).iter() {
            let (i, r) = (k / (n - 1), k % (n - 1));
            let j = if r >= i { r + 1 } else { r };
            let mag = rng.gen_range(0.1..1.0);
            m[(i, j)] = if rng.gen_bool(0.5) { mag } else { -mag };
        }
        let spec = spectrum(&m)?;
        let scale = spec.eigenvalues.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if spec.abscissa() < 0.0 && spec.min_gap() > 1e-6 * scale {
            return Network::new(m, format!("random-{n}-{nnz}-{seed}"));
        }
    }
    Err(Error::Numerical(format!(
        "no stable network with a separated spectrum in {MAX_DRAWS} draws"
    )))
}

/// Dense Hurwitz network with distinct eigenvalues: a random matrix shifted
/// left of the imaginary axis.
pub fn random_hurwitz(n: usize, rng: &mut impl Rng) -> Result<Network> {
    for _ in 0..MAX_DRAWS {
        let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let spec = spectrum(&m)?;
        let shift = spec.abscissa() + rng.gen_range(0.1..1.0);
        let m = m - DMatrix::identity(n, n) * shift;
        let scale = spec.eigenvalues.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if spec.min_gap() > 1e-4 * scale {
            return Network::new(m, "random");
        }
    }
    Err(Error::Numerical(format!("no network with a separated spectrum in {MAX_DRAWS} draws")))
}
