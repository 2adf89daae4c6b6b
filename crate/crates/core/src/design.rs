//! Synthesis of a sparse complementary network `B` that commutes with `A`,
//! either through a McCormick-relaxed LP over polynomial coefficients or
//! by alternating between the switching ratio and the network.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    centralizer_basis, common_eigenbasis, spectral_abscissa, unvec, vec_index, CentralizerBasis,
    Network, Tolerances,
};
use crate::lp::{l1_epigraph, solve_lp, LinearProgram, LpStatus};
use crate::optswitch::{opt_switch_with, solve_rros, SwitchCertificate};
use crate::sparsity::{scnet_with, ScnetOptions, SparsityPattern};

/// Largest `n` for which the alternating method optimizes the entries of
/// `B` directly under commutativity equalities; above it `B` is
/// parameterized by the power basis.
pub const ENTRYWISE_LIMIT: usize = 12;

/// Default basis order: the full order up to this many nodes, 12 beyond.
pub const FULL_ORDER_LIMIT: usize = 30;

pub fn default_order(n: usize) -> usize {
    if n <= FULL_ORDER_LIMIT {
        n
    } else {
        12.min(n)
    }
}

/// Two-level entrywise penalty on `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weighting {
    pub gamma: DMatrix<f64>,
    pub gamma_low: f64,
    pub gamma_high: f64,
}

impl Weighting {
    /// `diag(W)`, i.e. `vec(Gamma)`.
    pub fn w_diag(&self) -> Vec<f64> {
        self.gamma.as_slice().to_vec()
    }

    pub fn is_homogeneous(&self) -> bool {
        let first = self.gamma[(0, 0)];
        self.gamma.iter().all(|&g| g == first)
    }

    /// `||Gamma . B||_1`.
    pub fn l1(&self, b: &DMatrix<f64>) -> f64 {
        self.gamma.iter().zip(b.iter()).map(|(g, v)| g * v.abs()).sum()
    }
}

/// `gamma_high` on the forced-zero entries, `gamma_low` elsewhere.
pub fn build_weighting(pat: &SparsityPattern, gamma_low: f64, gamma_high: f64) -> Result<Weighting> {
    if !(gamma_low > 0.0 && gamma_high > gamma_low && gamma_high.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "weights must satisfy 0 < gamma_low < gamma_high, got {gamma_low} and {gamma_high}"
        )));
    }
    let n = pat.n();
    let gamma = DMatrix::from_fn(n, n, |i, j| if pat.contains(i, j) { gamma_high } else { gamma_low });
    Ok(Weighting {
        gamma,
        gamma_low,
        gamma_high,
    })
}

/// Every entry weighted by `gamma`.
pub fn homogeneous_weighting(n: usize, gamma: f64) -> Result<Weighting> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidInput(format!("weight must be positive, got {gamma}")));
    }
    Ok(Weighting {
        gamma: DMatrix::from_element(n, n, gamma),
        gamma_low: gamma,
        gamma_high: gamma,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[serde(rename = "mccormick")]
    McCormick,
    Alternating,
}

/// Box `|c_i| <= a` for the McCormick relaxation of `k c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McCormickBox {
    pub a: f64,
}

impl McCormickBox {
    /// `a = 2 max(1, ||A||_F)`.
    pub fn default_for(a: &Network) -> Self {
        McCormickBox {
            a: 2.0 * a.weights().norm().max(1.0),
        }
    }

    /// Whether `(k, c, w)` satisfies the box and the four envelope rows.
    pub fn contains(&self, k: f64, c: &[f64], w: &[f64], tol: f64) -> bool {
        let a = self.a;
        c.iter().zip(w).all(|(&c, &w)| {
            c.abs() <= a + tol
                && w <= a * k + tol
                && -w <= a * k + tol
                && c + (k - 1.0) * a <= w + tol
                && w <= c + (1.0 - k) * a + tol
        })
    }
}

#[derive(Debug, Clone)]
pub struct McCormickSolution {
    pub c: DVector<f64>,
    pub w: DVector<f64>,
    pub relaxation_k: f64,
    pub objective: f64,
    /// Some `|c_i|` sits on the box boundary, so the box may be truncating the search.
    pub bound_hit: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DesignResult {
    #[serde(skip)]
    pub b: Network,
    pub k_star: f64,
    pub alpha_star: f64,
    pub alpha_a: f64,
    pub alpha_b: f64,
    pub method: Method,
    /// Design objective after each alternating iteration of the best restart.
    pub objective_history: Vec<f64>,
    /// Histories of every restart that completed.
    pub restart_histories: Vec<Vec<f64>>,
    pub relaxation_k: Option<f64>,
    pub objective: f64,
    pub bound_hit: bool,
    pub nonzeros: usize,
    pub certificate: SwitchCertificate,
    pub diagnostics: Vec<String>,
}

// Rows of the power basis that are not identically zero.
fn retained_rows(basis: &CentralizerBasis) -> Vec<usize> {
    (0..basis.powers.nrows())
        .filter(|&h| basis.powers.row(h).iter().any(|&v| v != 0.0))
        .collect()
}

// One eigenvalue per conjugate pair; both give identical real-part rows.
fn representative_eigs(eigs: &[num_complex::Complex64]) -> Vec<usize> {
    (0..eigs.len()).filter(|&i| eigs[i].im >= 0.0).collect()
}

/// Solves the relaxed program over `[k, c, w, x, t]`:
/// minimize `x + sum t` subject to the weighted l1 rows on `A_p c`, the
/// McCormick rows for `w ~ k c`, the envelope rows
/// `Re(Lambda_p)(c - w) + k Re(lambda) <= x`, and `trace(unvec(A_p c)) = Tr(A)`.
pub fn solve_mccormick(a: &Network, basis: &CentralizerBasis, wt: &Weighting, bx: McCormickBox) -> Result<McCormickSolution> {
    if !(bx.a > 0.0 && bx.a.is_finite()) {
        return Err(Error::InvalidInput(format!("McCormick bound must be positive, got {}", bx.a)));
    }
    check_weighting(basis, wt)?;
    let p = basis.order();
    let rows = retained_rows(basis);
    let r = rows.len();
    let (ik, ic, iw, ix, it) = (0, 1, 1 + p, 1 + 2 * p, 2 + 2 * p);
    let nv = it + r;

    let mut obj = DVector::zeros(nv);
    obj[ix] = 1.0;
    obj.rows_mut(it, r).fill(1.0);
    let mut lp = LinearProgram::new(obj);
    lp.set_bounds(ik, Some(0.0), Some(1.0));
    for j in 0..p {
        lp.set_bounds(ic + j, Some(-bx.a), Some(bx.a));
    }
    for h in 0..r {
        lp.set_bounds(it + h, Some(0.0), None);
    }

    let w = wt.w_diag();
    let weights: Vec<f64> = rows.iter().map(|&h| w[h]).collect();
    let map = basis.powers.select_rows(rows.iter());
    lp.inequalities.extend(l1_epigraph(&weights, &map, ic, it)?);

    for j in 0..p {
        let (c, wj) = (ic + j, iw + j);
        lp.add_le(vec![(wj, 1.0), (ik, -bx.a)], 0.0);
        lp.add_le(vec![(wj, -1.0), (ik, -bx.a)], 0.0);
        lp.add_le(vec![(c, 1.0), (wj, -1.0), (ik, bx.a)], bx.a);
        lp.add_le(vec![(wj, 1.0), (c, -1.0), (ik, bx.a)], bx.a);
    }

    for i in representative_eigs(&basis.eigenvalues) {
        let mut row = Vec::with_capacity(2 * p + 2);
        for j in 0..p {
            let v = basis.vandermonde[(i, j)].re;
            if v != 0.0 {
                row.push((ic + j, v));
                row.push((iw + j, -v));
            }
        }
        row.push((ik, basis.eigenvalues[i].re));
        row.push((ix, -1.0));
        lp.add_le(row, 0.0);
    }
    lp.add_eq(trace_terms(basis, ic), a.trace());

    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(Error::Numerical(
                "relaxed design program reported infeasible although a scaled identity is feasible".into(),
            ))
        }
        LpStatus::Unbounded => return Err(Error::Numerical("relaxed design program reported unbounded".into())),
    }
    let c = sol.z.rows(ic, p).into_owned();
    let wv = sol.z.rows(iw, p).into_owned();
    let bound_hit = c.iter().any(|v| v.abs() >= bx.a * (1.0 - 1e-9));
    Ok(McCormickSolution {
        c,
        w: wv,
        relaxation_k: sol.z[ik].clamp(0.0, 1.0),
        objective: sol.objective,
        bound_hit,
    })
}

fn trace_terms(basis: &CentralizerBasis, offset: usize) -> Vec<(usize, f64)> {
    basis
        .trace_row()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(j, &v)| (offset + j, v))
        .collect()
}

fn check_weighting(basis: &CentralizerBasis, wt: &Weighting) -> Result<()> {
    if wt.gamma.nrows() != basis.n() || wt.gamma.ncols() != basis.n() {
        return Err(Error::Dimension(format!(
            "weighting is {}x{}, network has n = {}",
            wt.gamma.nrows(),
            wt.gamma.ncols(),
            basis.n()
        )));
    }
    Ok(())
}

/// Exact design program at a fixed ratio `k` over `c`:
/// minimize `max_i (k Re lambda_i + (1 - k) Re mu_i(c)) + ||W A_p c||_1`
/// with the trace row, optionally boxing `|c_i| <= bound`.
/// Returns the coefficients and the optimal value.
pub fn solve_fixed_k(a: &Network, basis: &CentralizerBasis, wt: &Weighting, k: f64, bound: Option<f64>) -> Result<(DVector<f64>, f64)> {
    let f = EigenFunctionals::new(a)?;
    let sol = fixed_k_program(a, basis, &f, wt, k, bound)?;
    Ok((sol.c, sol.objective))
}

struct FixedK {
    c: DVector<f64>,
    b: DMatrix<f64>,
    objective: f64,
}

// The program is posed over d = R c with A_p = Q R, so the l1 rows act on
// the orthonormal columns of Q and the eigenvalue rows come from the left
// and right eigenvectors of A rather than from powers of its spectrum.
fn fixed_k_program(
    a: &Network,
    basis: &CentralizerBasis,
    f: &EigenFunctionals,
    wt: &Weighting,
    k: f64,
    bound: Option<f64>,
) -> Result<FixedK> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::InvalidInput(format!("ratio k = {k} outside [0, 1]")));
    }
    check_weighting(basis, wt)?;
    let n = basis.n();
    let p = basis.order();
    let qr = basis.powers.clone().qr();
    let q = qr.q();
    let rinv = qr
        .r()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("power basis is rank deficient; use a smaller order".into()))?;
    let rows = retained_rows(basis);
    let r = rows.len();
    let (id, ix, it) = (0, p, p + 1);
    let mut obj = DVector::zeros(it + r);
    obj[ix] = 1.0;
    obj.rows_mut(it, r).fill(1.0);
    let mut lp = LinearProgram::new(obj);
    for h in 0..r {
        lp.set_bounds(it + h, Some(0.0), None);
    }
    if let Some(b) = bound {
        for l in 0..p {
            let row: Vec<(usize, f64)> = (0..p).filter(|&j| rinv[(l, j)] != 0.0).map(|j| (id + j, rinv[(l, j)])).collect();
            lp.add_ge(row.clone(), -b);
            lp.add_le(row, b);
        }
    }
    let w = wt.w_diag();
    let weights: Vec<f64> = rows.iter().map(|&h| w[h]).collect();
    lp.inequalities.extend(l1_epigraph(&weights, &q.select_rows(rows.iter()), id, it)?);
    for (l, fr) in f.lambda_re.iter().zip(&f.rows) {
        let mut row: Vec<(usize, f64)> = (0..p)
            .map(|j| (id + j, (1.0 - k) * q.column(j).iter().zip(fr).map(|(x, y)| x * y).sum::<f64>()))
            .filter(|(_, v)| *v != 0.0)
            .collect();
        row.push((ix, -1.0));
        lp.add_le(row, -k * l);
    }
    let trace: Vec<(usize, f64)> = (0..p)
        .map(|j| (id + j, (0..n).map(|i| q[(vec_index(i, i, n), j)]).sum::<f64>()))
        .collect();
    lp.add_eq(trace, a.trace());
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Numerical(format!("fixed-ratio design program ended {:?}", sol.status)));
    }
    let d = sol.z.rows(id, p).into_owned();
    Ok(FixedK {
        c: &rinv * &d,
        b: unvec(&(&q * &d), n)?,
        objective: sol.objective,
    })
}

/// `B = unvec(A_p c)` with entries below `1e-9 ||B||_F` snapped to zero.
pub fn recover_network(basis: &CentralizerBasis, c: &DVector<f64>) -> Result<Network> {
    let b = basis.combine(c)?;
    Network::new(snap_zeros(b), "B")
}

fn snap_zeros(mut b: DMatrix<f64>) -> DMatrix<f64> {
    let cut = 1e-9 * b.norm();
    b.iter_mut().filter(|v| v.abs() < cut).for_each(|v| *v = 0.0);
    b
}

#[derive(Debug, Clone)]
pub struct AlternatingOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
    /// Fixed starting ratio for every restart instead of random draws.
    pub init_k: Option<f64>,
    /// Basis order for the power-basis formulation used above `ENTRYWISE_LIMIT`.
    pub order: Option<usize>,
}

impl Default for AlternatingOptions {
    fn default() -> Self {
        AlternatingOptions {
            restarts: 8,
            max_iter: 100,
            tol: 1e-6,
            seed: 0,
            init_k: None,
            order: None,
        }
    }
}

// Real-linear functionals giving Re(mu_i(B)) from vec(B), one per
// representative eigenvalue, together with Re(lambda_i).
struct EigenFunctionals {
    lambda_re: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

impl EigenFunctionals {
    fn new(a: &Network) -> Result<Self> {
        let pairing = common_eigenbasis(a, a, &Tolerances::default())?;
        let u = pairing.left_rows()?;
        let v = &pairing.vectors;
        let n = a.n();
        let lambdas = pairing.lambdas();
        let mut lambda_re = Vec::new();
        let mut rows = Vec::new();
        for i in representative_eigs(&lambdas) {
            let mut row = vec![0.0; n * n];
            for col in 0..n {
                for r in 0..n {
                    row[vec_index(r, col, n)] = (u[(i, r)] * v[(col, i)]).re;
                }
            }
            // Entries at roundoff level are structural zeros.
            let big = row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            row.iter_mut().filter(|v| v.abs() <= 64.0 * f64::EPSILON * big).for_each(|v| *v = 0.0);
            lambda_re.push(lambdas[i].re);
            rows.push(row);
        }
        Ok(EigenFunctionals { lambda_re, rows })
    }

    fn mu_re(&self, b: &DMatrix<f64>) -> Vec<f64> {
        let vb = b.as_slice();
        self.rows.iter().map(|r| r.iter().zip(vb).map(|(x, y)| x * y).sum()).collect()
    }

    fn pairs(&self, b: &DMatrix<f64>) -> Vec<(f64, f64)> {
        self.lambda_re.iter().copied().zip(self.mu_re(b)).collect()
    }
}

// Design objective J(k, B) = max_i (k Re lambda_i + (1 - k) Re mu_i(B)) + ||Gamma . B||_1.
fn design_objective(f: &EigenFunctionals, wt: &Weighting, k: f64, b: &DMatrix<f64>) -> f64 {
    let env = f
        .pairs(b)
        .iter()
        .map(|&(l, m)| k * l + (1.0 - k) * m)
        .fold(f64::NEG_INFINITY, f64::max);
    env + wt.l1(b)
}

// Fixed-k step over the entries of B with commutativity as equalities.
fn entrywise_b_step(a: &Network, f: &EigenFunctionals, wt: &Weighting, k: f64) -> Result<DMatrix<f64>> {
    let n = a.n();
    let n2 = n * n;
    let (ib, ix, it) = (0, n2, n2 + 1);
    let mut obj = DVector::zeros(it + n2);
    obj[ix] = 1.0;
    obj.rows_mut(it, n2).fill(1.0);
    let mut lp = LinearProgram::new(obj);
    for h in 0..n2 {
        lp.set_bounds(it + h, Some(0.0), None);
    }
    let am = a.weights();
    // (AB - BA)_{rs} = sum_q A_rq B_qs - B_rq A_qs.
    for s in 0..n {
        for r in 0..n {
            let mut row: Vec<(usize, f64)> = Vec::new();
            for q in 0..n {
                if am[(r, q)] != 0.0 {
                    row.push((ib + vec_index(q, s, n), am[(r, q)]));
                }
                if am[(q, s)] != 0.0 {
                    row.push((ib + vec_index(r, q, n), -am[(q, s)]));
                }
            }
            if !row.is_empty() {
                lp.add_eq(row, 0.0);
            }
        }
    }
    lp.add_eq((0..n).map(|i| (ib + vec_index(i, i, n), 1.0)).collect(), a.trace());
    for (l, row) in f.lambda_re.iter().zip(&f.rows) {
        let mut terms: Vec<(usize, f64)> = row
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > 0.0)
            .map(|(h, v)| (ib + h, (1.0 - k) * v))
            .collect();
        terms.push((ix, -1.0));
        lp.add_le(terms, -k * l);
    }
    lp.inequalities
        .extend(l1_epigraph(&wt.w_diag(), &DMatrix::identity(n2, n2), ib, it)?);
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Numerical(format!("fixed-ratio subproblem ended {:?}", sol.status)));
    }
    unvec(&sol.z.rows(ib, n2).into_owned(), n)
}

struct RestartOutcome {
    b: DMatrix<f64>,
    k: f64,
    history: Vec<f64>,
}

fn run_restart(
    a: &Network,
    basis: Option<&CentralizerBasis>,
    f: &EigenFunctionals,
    wt: &Weighting,
    k0: f64,
    opts: &AlternatingOptions,
) -> Result<RestartOutcome> {
    let b_step = |k: f64| -> Result<DMatrix<f64>> {
        match basis {
            None => entrywise_b_step(a, f, wt, k),
            Some(basis) => {
                Ok(fixed_k_program(a, basis, f, wt, k, None)?.b)
            }
        }
    };
    let mut k = k0;
    let mut b = b_step(k)?;
    let mut current = design_objective(f, wt, k, &b);
    let mut history = Vec::new();
    for iter in 0..opts.max_iter {
        if iter > 0 {
            let candidate = b_step(k)?;
            let value = design_objective(f, wt, k, &candidate);
            if value <= current {
                b = candidate;
                current = value;
            }
        }
        let rros = solve_rros(&f.pairs(&b))?;
        let value = design_objective(f, wt, rros.k_star, &b);
        if value <= current {
            k = rros.k_star;
            current = value;
        }
        let prev = history.last().copied();
        history.push(current);
        if let Some(prev) = prev {
            if prev - current <= opts.tol * prev.abs().max(1.0) {
                break;
            }
        }
    }
    Ok(RestartOutcome { b, k, history })
}

/// Alternating minimization of `J(k, B)` from several starting ratios.
pub fn solve_alternating(a: &Network, wt: &Weighting, opts: &AlternatingOptions) -> Result<DesignResult> {
    if opts.restarts == 0 {
        return Err(Error::InvalidInput("alternating minimization needs at least one restart".into()));
    }
    if let Some(k) = opts.init_k {
        if !(0.0..=1.0).contains(&k) {
            return Err(Error::InvalidInput(format!("initial ratio {k} outside [0, 1]")));
        }
    }
    let n = a.n();
    if wt.gamma.nrows() != n {
        return Err(Error::Dimension(format!("weighting is {}x{}, network has n = {n}", wt.gamma.nrows(), wt.gamma.ncols())));
    }
    let f = EigenFunctionals::new(a)?;
    let basis = if n > ENTRYWISE_LIMIT {
        Some(centralizer_basis(a, opts.order.unwrap_or_else(|| default_order(n)))?)
    } else {
        None
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts: Vec<f64> = (0..opts.restarts)
        .map(|_| opts.init_k.unwrap_or_else(|| rng.gen::<f64>()))
        .collect();
    let outcomes: Vec<Result<RestartOutcome>> = starts
        .par_iter()
        .map(|&k0| run_restart(a, basis.as_ref(), &f, wt, k0, opts))
        .collect();

    let mut diagnostics = Vec::new();
    let mut best: Option<(usize, &RestartOutcome)> = None;
    let mut histories = Vec::new();
    for (i, o) in outcomes.iter().enumerate() {
        match o {
            Ok(o) => {
                histories.push(o.history.clone());
                let last = *o.history.last().unwrap_or(&f64::INFINITY);
                if best.map_or(true, |(_, b)| last < *b.history.last().unwrap_or(&f64::INFINITY)) {
                    best = Some((i, o));
                }
            }
            Err(e) => diagnostics.push(format!("restart {i} (k0 = {:.6}) abandoned: {e}", starts[i])),
        }
    }
    let Some((idx, best)) = best else {
        return Err(Error::Numerical(format!(
            "every alternating restart failed: {}",
            diagnostics.join("; ")
        )));
    };
    log::debug!("alternating: best restart {idx} with k = {}", best.k);
    let b = Network::new(snap_zeros(best.b.clone()), "B")?;
    let objective = *best.history.last().unwrap_or(&f64::NAN);
    finish(a, b, Method::Alternating, objective, best.history.clone(), histories, None, false, diagnostics)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    a: &Network,
    b: Network,
    method: Method,
    objective: f64,
    objective_history: Vec<f64>,
    restart_histories: Vec<Vec<f64>>,
    relaxation_k: Option<f64>,
    bound_hit: bool,
    diagnostics: Vec<String>,
) -> Result<DesignResult> {
    let certificate = opt_switch_with(a, &b, &Tolerances::default())?;
    let alpha_b = spectral_abscissa(b.weights())?;
    if alpha_b >= 0.0 {
        log::warn!("designed network is not Hurwitz (alpha(B) = {alpha_b:.6})");
    }
    let tr = a.trace();
    if (b.trace() - tr).abs() > 1e-6 * tr.abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "designed network has trace {} but Tr(A) = {tr}",
            b.trace()
        )));
    }
    Ok(DesignResult {
        k_star: certificate.k_star,
        alpha_star: certificate.alpha_star,
        alpha_a: certificate.alpha_a,
        alpha_b,
        nonzeros: b.nonzero_count(),
        b,
        method,
        objective_history,
        restart_histories,
        relaxation_k,
        objective,
        bound_hit,
        certificate,
        diagnostics,
    })
}

/// Options for the full synthesis pipeline.
#[derive(Debug, Clone)]
pub struct SpnoptOptions {
    pub method: Method,
    pub gamma_low: f64,
    pub gamma_high: f64,
    /// McCormick box; `2 max(1, ||A||_F)` when absent.
    pub bound_a: Option<f64>,
    /// Power-basis order; `default_order(n)` when absent.
    pub order: Option<usize>,
    pub scnet: ScnetOptions,
    pub alternating: AlternatingOptions,
}

impl Default for SpnoptOptions {
    fn default() -> Self {
        SpnoptOptions {
            method: Method::McCormick,
            gamma_low: 1.0,
            gamma_high: 100.0,
            bound_a: None,
            order: None,
            scnet: ScnetOptions::default(),
            alternating: AlternatingOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpnoptOutput {
    pub pattern: SparsityPattern,
    pub weighting: Weighting,
    pub result: DesignResult,
}

/// Basis, pattern, weighting, design solve, then an exact switching
/// certificate for the designed pair.
pub fn spnopt(a: &Network, opts: &SpnoptOptions) -> Result<SpnoptOutput> {
    let p = opts.order.unwrap_or_else(|| default_order(a.n()));
    let basis = centralizer_basis(a, p)?;
    let pattern = scnet_with(&basis, &opts.scnet)?;
    log::info!("sparsity pattern with {} forced zeros", pattern.len());
    let weighting = build_weighting(&pattern, opts.gamma_low, opts.gamma_high)?;
    let result = match opts.method {
        Method::McCormick => {
            let bx = opts.bound_a.map_or_else(|| McCormickBox::default_for(a), |a| McCormickBox { a });
            let sol = solve_mccormick(a, &basis, &weighting, bx)?;
            let b = recover_network(&basis, &sol.c)?;
            let mut diagnostics = Vec::new();
            if sol.bound_hit {
                diagnostics.push(format!("a coefficient reached the McCormick bound a = {}", bx.a));
            }
            finish(a, b, Method::McCormick, sol.objective, Vec::new(), Vec::new(), Some(sol.relaxation_k), sol.bound_hit, diagnostics)?
        }
        Method::Alternating => {
            let mut alt = opts.alternating.clone();
            alt.order = Some(p);
            solve_alternating(a, &weighting, &alt)?
        }
    };
    Ok(SpnoptOutput {
        pattern,
        weighting,
        result,
    })
}
