//! Periodically switched dynamics `x' = S(t) x` alternating between two
//! networks, its monodromy matrix and Floquet generator.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{matrix_exponential, matrix_logarithm, spectral_abscissa, Network};

/// Default number of sub-samples recorded inside each dwell interval.
pub const DEFAULT_SAMPLES_PER_SEGMENT: usize = 20;

/// One period of the switching law: `m` segments, each running `A` for
/// `dwell_a` and then `B` for `dwell_b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchSchedule {
    period: f64,
    segments: Vec<(f64, f64)>,
}

impl SwitchSchedule {
    pub fn new(period: f64, segments: Vec<(f64, f64)>) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidInput(format!("period must be positive, got {period}")));
        }
        if segments.is_empty() {
            return Err(Error::InvalidInput("schedule needs at least one segment".into()));
        }
        if segments
            .iter()
            .any(|&(a, b)| !(a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0))
        {
            return Err(Error::InvalidInput("dwell times must be finite and nonnegative".into()));
        }
        let total: f64 = segments.iter().map(|(a, b)| a + b).sum();
        if (total - period).abs() > 1e-12 * period {
            return Err(Error::InvalidInput(format!(
                "dwell times sum to {total}, expected the period {period}"
            )));
        }
        Ok(SwitchSchedule { period, segments })
    }

    /// `m` identical segments that keep `A` active for a fraction `k` of the period.
    pub fn from_ratio(k: f64, period: f64, m: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&k) {
            return Err(Error::InvalidInput(format!("ratio k = {k} outside [0, 1]")));
        }
        if m == 0 {
            return Err(Error::InvalidInput("schedule needs at least one segment".into()));
        }
        let da = k * period / m as f64;
        let db = period / m as f64 - da;
        Self::new(period, vec![(da, db); m])
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn segments(&self) -> &[(f64, f64)] {
        &self.segments
    }

    /// Fraction of the period during which `A` is active.
    pub fn ratio(&self) -> f64 {
        let ta: f64 = self.segments.iter().map(|s| s.0).sum();
        (ta / self.period).clamp(0.0, 1.0)
    }
}

/// Floquet representation of a switched pair.
#[derive(Debug, Clone)]
pub struct AveragedSystem {
    /// Averaged generator `Q = log(R) / T`.
    pub q: DMatrix<f64>,
    /// One-period state transition matrix.
    pub monodromy: DMatrix<f64>,
    /// `alpha(Q)`.
    pub alpha: f64,
}

fn check_pair(a: &Network, b: &Network) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::Dimension(format!("networks have {} and {} nodes", a.n(), b.n())));
    }
    Ok(())
}

/// `R = prod_i e^{B dt_{i,2}} e^{A dt_{i,1}}` with segment 1 acting first.
pub fn monodromy(a: &Network, b: &Network, s: &SwitchSchedule) -> Result<DMatrix<f64>> {
    check_pair(a, b)?;
    let n = a.n();
    let mut r = DMatrix::<f64>::identity(n, n);
    for &(da, db) in s.segments() {
        if da > 0.0 {
            r = matrix_exponential(a.weights(), da)? * r;
        }
        if db > 0.0 {
            r = matrix_exponential(b.weights(), db)? * r;
        }
    }
    Ok(r)
}

/// Exact Floquet generator of the switched system, without assuming commutativity.
pub fn averaged_generator(a: &Network, b: &Network, s: &SwitchSchedule) -> Result<AveragedSystem> {
    let r = monodromy(a, b, s)?;
    let q = matrix_logarithm(&r)? / s.period();
    let alpha = spectral_abscissa(&q)?;
    Ok(AveragedSystem {
        q,
        monodromy: r,
        alpha,
    })
}

/// `k A + (1 - k) B`, the generator of a commuting pair switched with ratio `k`.
pub fn commutative_average(a: &Network, b: &Network, k: f64) -> Result<DMatrix<f64>> {
    check_pair(a, b)?;
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::InvalidInput(format!("ratio k = {k} outside [0, 1]")));
    }
    Ok(a.weights() * k + b.weights() * (1.0 - k))
}

/// Sampled solution of the switched system.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    /// Which network was active on the interval ending at each sample
    /// (`None` for the initial sample).
    pub active: Vec<Option<Topology>>,
    /// Sample indices of `x(l T)` for `l = 0..=periods`.
    pub period_marks: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Topology {
    A,
    B,
}

impl Trajectory {
    pub fn period_states(&self) -> impl Iterator<Item = (f64, &DVector<f64>)> {
        self.period_marks.iter().map(|&i| (self.times[i], &self.states[i]))
    }
}

/// Exact piecewise propagation: each dwell interval is split into
/// `samples_per_segment` equal steps of the matrix exponential.
pub fn simulate(
    a: &Network,
    b: &Network,
    s: &SwitchSchedule,
    x0: &DVector<f64>,
    periods: usize,
    samples_per_segment: usize,
) -> Result<Trajectory> {
    check_pair(a, b)?;
    if x0.len() != a.n() {
        return Err(Error::Dimension(format!(
            "initial state has length {}, expected {}",
            x0.len(),
            a.n()
        )));
    }
    if periods == 0 {
        return Err(Error::InvalidInput("simulate needs at least one period".into()));
    }
    let ns = samples_per_segment.max(1);

    // Step propagators depend only on the dwell, so cache them per segment.
    let mut steps = Vec::with_capacity(s.segments().len());
    for &(da, db) in s.segments() {
        let sa = if da > 0.0 { Some(matrix_exponential(a.weights(), da / ns as f64)?) } else { None };
        let sb = if db > 0.0 { Some(matrix_exponential(b.weights(), db / ns as f64)?) } else { None };
        steps.push((sa, sb));
    }

    let mut times = vec![0.0];
    let mut states = vec![x0.clone()];
    let mut active = vec![None];
    let mut period_marks = vec![0];
    let mut x = x0.clone();
    for l in 0..periods {
        let mut t0 = l as f64 * s.period();
        for (&(da, db), (sa, sb)) in s.segments().iter().zip(&steps) {
            for (dwell, step, topo) in [(da, sa, Topology::A), (db, sb, Topology::B)] {
                let Some(step) = step else { continue };
                for j in 1..=ns {
                    x = step * &x;
                    let t = t0 + dwell * j as f64 / ns as f64;
                    if !x.iter().all(|v| v.is_finite()) {
                        return Err(Error::Overflow(format!("state left the finite range at t = {t:.6e}")));
                    }
                    times.push(t);
                    states.push(x.clone());
                    active.push(Some(topo));
                }
                t0 += dwell;
            }
        }
        period_marks.push(states.len() - 1);
    }
    Ok(Trajectory {
        times,
        states,
        active,
        period_marks,
    })
}

/// Least-squares slope of `ln ||x(lT)||` against `lT` over the period
/// boundaries of a trajectory (the empirical decay rate).
pub fn fitted_decay_rate(traj: &Trajectory) -> Option<f64> {
    let pts: Vec<(f64, f64)> = traj
        .period_states()
        .filter(|(_, x)| x.norm() > 0.0)
        .map(|(t, x)| (t, x.norm().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    Some(sxy / sxx)
}
