//! Optimal switching ratio for a commuting pair, with the dominant-segment
//! conditions and bounds that certify when switching improves resilience.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::floquet::commutative_average;
use crate::linalg::{common_eigenbasis, spectral_abscissa, Network, Tolerances};

/// Minimizer of the upper envelope `g(k) = max_i k a_i + (1 - k) b_i` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RrosSolution {
    /// Smallest minimizing `k`.
    pub k_star: f64,
    pub alpha_star: f64,
    /// Pairs whose line attains the envelope at `k_star`.
    pub active_pairs: Vec<usize>,
    /// Full set of minimizers; a single point unless the envelope is flat.
    pub argmin: (f64, f64),
}

fn same(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-8 * (1.0 + x.abs().max(y.abs()))
}

fn envelope(pairs: &[(f64, f64)], k: f64) -> f64 {
    pairs
        .iter()
        .map(|&(a, b)| k * a + (1.0 - k) * b)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Exact envelope minimization by enumerating `k = 0`, `k = 1` and every
/// pairwise intersection inside `(0, 1)`.
pub fn solve_rros(pairs: &[(f64, f64)]) -> Result<RrosSolution> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("rROS needs at least one eigenvalue pair".into()));
    }
    if pairs.iter().any(|(a, b)| !(a.is_finite() && b.is_finite())) {
        return Err(Error::InvalidInput("eigenvalue pairs must be finite".into()));
    }
    let mut candidates = vec![0.0, 1.0];
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let (ai, bi) = pairs[i];
            let (aj, bj) = pairs[j];
            let denom = (ai - bi) - (aj - bj);
            if denom != 0.0 {
                let k = (bj - bi) / denom;
                if k > 0.0 && k < 1.0 {
                    candidates.push(k);
                }
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let values: Vec<f64> = candidates.iter().map(|&k| envelope(pairs, k)).collect();
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    let tie = 1e-12 * (1.0 + best.abs());
    let minimizers: Vec<f64> = candidates
        .iter()
        .zip(&values)
        .filter(|(_, &v)| v <= best + tie)
        .map(|(&k, _)| k)
        .collect();
    let k_star = minimizers[0];
    let alpha_star = envelope(pairs, k_star);
    let active_pairs = pairs
        .iter()
        .enumerate()
        .filter(|(_, &(a, b))| same(k_star * a + (1.0 - k_star) * b, alpha_star))
        .map(|(i, _)| i)
        .collect();
    Ok(RrosSolution {
        k_star,
        alpha_star,
        active_pairs,
        argmin: (k_star, *minimizers.last().unwrap_or(&k_star)),
    })
}

/// The two dominant segments `f_1 = (alpha_A, beta_B)` and `f_2 = (beta_A, alpha_B)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominantData {
    pub segments: Vec<(f64, f64)>,
    pub alpha_a: f64,
    pub alpha_b: f64,
    pub beta_a: f64,
    pub beta_b: f64,
    pub delta_a: f64,
    pub delta_b: f64,
    /// Each abscissa is attained by exactly one segment. Conjugate
    /// eigenvalues give identical segments and count once.
    pub unique: bool,
}

pub fn dominant_data(pairs: &[(f64, f64)]) -> Result<DominantData> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("need at least one eigenvalue pair".into()));
    }
    let alpha_a = pairs.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let alpha_b = pairs.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);

    let mut distinct: Vec<(f64, f64)> = Vec::new();
    for &p in pairs {
        if !distinct.iter().any(|q| same(p.0, q.0) && same(p.1, q.1)) {
            distinct.push(p);
        }
    }
    let tops_a: Vec<&(f64, f64)> = distinct.iter().filter(|p| same(p.0, alpha_a)).collect();
    let tops_b: Vec<&(f64, f64)> = distinct.iter().filter(|p| same(p.1, alpha_b)).collect();
    let unique = tops_a.len() == 1 && tops_b.len() == 1;

    // With several maximizers, take the one with the largest cross value.
    let dom_a = tops_a.iter().fold(tops_a[0], |m, p| if p.1 > m.1 { p } else { m });
    let dom_b = tops_b.iter().fold(tops_b[0], |m, p| if p.0 > m.0 { p } else { m });
    let (beta_b, beta_a) = (dom_a.1, dom_b.0);
    Ok(DominantData {
        segments: pairs.to_vec(),
        alpha_a,
        alpha_b,
        beta_a,
        beta_b,
        delta_a: alpha_a - beta_a,
        delta_b: alpha_b - beta_b,
        unique,
    })
}

fn strictly_below(x: f64, bound: f64) -> bool {
    x < bound && !same(x, bound)
}

/// `beta_B < alpha_A` and `beta_A < alpha_B`, valid when each abscissa has a
/// unique maximizing segment.
pub fn improvement_condition(d: &DominantData) -> Result<bool> {
    if !d.unique {
        return Err(Error::Precondition(
            "spectral abscissa attained by several segments; use general_condition".into(),
        ));
    }
    Ok(strictly_below(d.beta_b, d.alpha_a) && strictly_below(d.beta_a, d.alpha_b))
}

/// Every segment attaining `alpha_A` has its `B` value below `alpha_A`, and
/// every segment attaining `alpha_B` has its `A` value below `alpha_B`.
pub fn general_condition(pairs: &[(f64, f64)]) -> bool {
    if pairs.is_empty() {
        return false;
    }
    let alpha_a = pairs.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let alpha_b = pairs.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    pairs
        .iter()
        .filter(|p| same(p.0, alpha_a))
        .all(|p| strictly_below(p.1, alpha_a))
        && pairs
            .iter()
            .filter(|p| same(p.1, alpha_b))
            .all(|p| strictly_below(p.0, alpha_b))
}

/// The bracket `lower <= alpha* < upper` from the intersection of the two
/// dominant segments.
pub fn resilience_bounds(d: &DominantData) -> Result<(f64, f64)> {
    if !improvement_condition(d)? {
        return Err(Error::Precondition(
            "switching cannot improve resilience (dominant-segment condition fails)".into(),
        ));
    }
    let s = d.delta_a + d.delta_b;
    let lower = d.alpha_a + d.delta_a / s * (d.beta_b - d.alpha_a);
    let cross = d.alpha_b + d.delta_b / s * (d.beta_a - d.alpha_b);
    let scale = 1.0 + lower.abs();
    if (lower - cross).abs() > 1e-10 * scale {
        return Err(Error::Numerical(format!(
            "dominant-segment intersection is inconsistent: {lower} vs {cross}"
        )));
    }
    if d.beta_a.max(d.beta_b) >= lower {
        return Err(Error::Numerical(format!(
            "lower bound {lower} does not exceed max(beta_A, beta_B) = {}",
            d.beta_a.max(d.beta_b)
        )));
    }
    Ok((lower, d.alpha_a.min(d.alpha_b)))
}

/// Envelope minimum over the segments that attain either spectral abscissa;
/// a lower bound on the full envelope minimum.
pub fn general_lower_bound(pairs: &[(f64, f64)]) -> Result<f64> {
    if !general_condition(pairs) {
        return Err(Error::Precondition(
            "switching cannot improve resilience (general dominance condition fails)".into(),
        ));
    }
    let alpha_a = pairs.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let alpha_b = pairs.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let subset: Vec<(f64, f64)> = pairs
        .iter()
        .copied()
        .filter(|p| same(p.0, alpha_a) || same(p.1, alpha_b))
        .collect();
    Ok(solve_rros(&subset)?.alpha_star)
}

#[derive(Debug, Clone, Serialize)]
pub struct SwitchCertificate {
    pub improvable: bool,
    pub k_star: f64,
    pub alpha_star: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Whether each abscissa had a unique maximizing segment.
    pub uniqueness: bool,
    pub active_pairs: Vec<usize>,
    pub argmin: (f64, f64),
    pub alpha_a: f64,
    pub alpha_b: f64,
    /// `(Re lambda_i, Re mu_i)` in the spectrum order of `A`.
    pub pairs: Vec<(f64, f64)>,
}

pub fn opt_switch(a: &Network, b: &Network) -> Result<SwitchCertificate> {
    opt_switch_with(a, b, &Tolerances::default())
}

pub fn opt_switch_with(a: &Network, b: &Network, tol: &Tolerances) -> Result<SwitchCertificate> {
    let pairing = common_eigenbasis(a, b, tol)?;
    certificate_from_pairs(pairing.real_pairs(), Some((a, b)))
}

/// Builds a certificate from eigenvalue real parts. When the networks are
/// supplied, `alpha_star` is cross-checked against the spectral abscissa of
/// the averaged generator.
pub fn certificate_from_pairs(
    pairs: Vec<(f64, f64)>,
    networks: Option<(&Network, &Network)>,
) -> Result<SwitchCertificate> {
    let rros = solve_rros(&pairs)?;
    let d = dominant_data(&pairs)?;
    let improvable = if d.unique {
        improvement_condition(&d)?
    } else {
        general_condition(&pairs)
    };
    let upper = d.alpha_a.min(d.alpha_b);
    let lower = if !improvable {
        rros.alpha_star
    } else if d.unique {
        resilience_bounds(&d)?.0
    } else {
        general_lower_bound(&pairs)?
    };

    if let Some((a, b)) = networks {
        let q = commutative_average(a, b, rros.k_star)?;
        let direct = spectral_abscissa(&q)?;
        if (direct - rros.alpha_star).abs() > 1e-6 * (1.0 + direct.abs()) {
            return Err(Error::Numerical(format!(
                "envelope optimum {} disagrees with alpha(kA + (1-k)B) = {direct}",
                rros.alpha_star
            )));
        }
    }
    Ok(SwitchCertificate {
        improvable,
        k_star: rros.k_star,
        alpha_star: rros.alpha_star,
        lower_bound: lower,
        upper_bound: upper,
        uniqueness: d.unique,
        active_pairs: rros.active_pairs,
        argmin: rros.argmin,
        alpha_a: d.alpha_a,
        alpha_b: d.alpha_b,
        pairs,
    })
}
