//! Dense two-phase simplex for small and medium linear programs.
//!
//! Programs are stated as
//!
//! ```text
//! minimize    c^T z
//! subject to  G z <= h,  E z = f,  lower <= z <= upper
//! ```
//!
//! with rows stored sparsely. Bounds default to free.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// One sparse linear row `sum coeffs[k].1 * z[coeffs[k].0]` compared against `rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<(usize, f64)>, rhs: f64) -> Self {
        Constraint { coeffs, rhs }
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * z[j]).sum()
    }
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: DVector<f64>,
    pub inequalities: Vec<Constraint>,
    pub equalities: Vec<Constraint>,
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
}

impl LinearProgram {
    /// A program over `objective.len()` free variables with no constraints.
    pub fn new(objective: DVector<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            inequalities: Vec::new(),
            equalities: Vec::new(),
            lower: vec![None; n],
            upper: vec![None; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_le(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) {
        self.inequalities.push(Constraint::new(coeffs, rhs));
    }

    pub fn add_ge(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) {
        let neg = coeffs.into_iter().map(|(j, a)| (j, -a)).collect();
        self.inequalities.push(Constraint::new(neg, -rhs));
    }

    pub fn add_eq(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) {
        self.equalities.push(Constraint::new(coeffs, rhs));
    }

    pub fn set_bounds(&mut self, j: usize, lower: Option<f64>, upper: Option<f64>) {
        self.lower[j] = lower;
        self.upper[j] = upper;
    }

    /// Dense `(G, h)`.
    pub fn g(&self) -> (DMatrix<f64>, DVector<f64>) {
        dense(&self.inequalities, self.num_vars())
    }

    /// Dense `(E, f)`.
    pub fn e(&self) -> (DMatrix<f64>, DVector<f64>) {
        dense(&self.equalities, self.num_vars())
    }

    /// Largest violation of any row or bound at `z`.
    pub fn max_violation(&self, z: &[f64]) -> f64 {
        let mut v: f64 = 0.0;
        for r in &self.inequalities {
            v = v.max(r.eval(z) - r.rhs);
        }
        for r in &self.equalities {
            v = v.max((r.eval(z) - r.rhs).abs());
        }
        for (j, &x) in z.iter().enumerate() {
            if let Some(lo) = self.lower[j] {
                v = v.max(lo - x);
            }
            if let Some(hi) = self.upper[j] {
                v = v.max(x - hi);
            }
        }
        v
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::Dimension("bound vectors must match the variable count".into()));
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("objective has non-finite coefficients".into()));
        }
        for r in self.inequalities.iter().chain(&self.equalities) {
            if !r.rhs.is_finite() || r.coeffs.iter().any(|&(j, a)| j >= n || !a.is_finite()) {
                return Err(Error::InvalidInput(
                    "constraint has a non-finite coefficient or an out-of-range variable".into(),
                ));
            }
        }
        for b in self.lower.iter().chain(&self.upper).flatten() {
            if !b.is_finite() {
                return Err(Error::InvalidInput("bounds must be finite or absent".into()));
            }
        }
        Ok(())
    }

    fn rhs_scale(&self) -> f64 {
        self.inequalities
            .iter()
            .chain(&self.equalities)
            .map(|r| r.rhs * r.rhs)
            .sum::<f64>()
            .sqrt()
    }
}

fn dense(rows: &[Constraint], n: usize) -> (DMatrix<f64>, DVector<f64>) {
    let mut m = DMatrix::zeros(rows.len(), n);
    for (i, r) in rows.iter().enumerate() {
        for &(j, a) in &r.coeffs {
            m[(i, j)] += a;
        }
    }
    (m, DVector::from_iterator(rows.len(), rows.iter().map(|r| r.rhs)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimizer when `status` is optimal, otherwise empty.
    pub z: DVector<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct LpOptions {
    pub pivot_tol: f64,
    pub feas_tol: f64,
    /// Defaults to `50 * (rows + cols)` of the standard form.
    pub max_iter: Option<usize>,
    /// Consecutive degenerate pivots after which Bland's rule takes over.
    pub degenerate_streak: usize,
    /// Relative relaxation of inequality right-hand sides while pivoting,
    /// removed before the solution is reported.
    pub perturbation: f64,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            pivot_tol: 1e-7,
            feas_tol: 1e-8,
            max_iter: None,
            degenerate_streak: 50,
            perturbation: 1e-7,
        }
    }
}

/// Rows `w_h (M z)_h - t_h <= 0` and `-w_h (M z)_h - t_h <= 0`, so that with
/// `sum t` in the objective each `t_h` equals `|w_h (M z)_h|` at optimum.
/// `z` starts at column `z_offset`, `t` at `t_offset`.
pub fn l1_epigraph(weights: &[f64], map: &DMatrix<f64>, z_offset: usize, t_offset: usize) -> Result<Vec<Constraint>> {
    if weights.len() != map.nrows() {
        return Err(Error::Dimension(format!(
            "{} weights for a map with {} rows",
            weights.len(),
            map.nrows()
        )));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidInput("l1 weights must be finite and nonnegative".into()));
    }
    let mut rows = Vec::with_capacity(2 * weights.len());
    for (h, &w) in weights.iter().enumerate() {
        let terms: Vec<(usize, f64)> = (0..map.ncols())
            .filter(|&j| map[(h, j)] != 0.0 && w != 0.0)
            .map(|j| (z_offset + j, w * map[(h, j)]))
            .collect();
        let mut pos = terms.clone();
        pos.push((t_offset + h, -1.0));
        let mut neg: Vec<(usize, f64)> = terms.into_iter().map(|(j, a)| (j, -a)).collect();
        neg.push((t_offset + h, -1.0));
        rows.push(Constraint::new(pos, 0.0));
        rows.push(Constraint::new(neg, 0.0));
    }
    Ok(rows)
}

pub fn solve_lp(p: &LinearProgram) -> Result<LpSolution> {
    solve_lp_with(p, &LpOptions::default())
}

#[derive(Debug, Clone, Copy)]
enum VarMap {
    // z = lo + y
    Shift { lo: f64, col: usize },
    // z = hi - y
    Flip { hi: f64, col: usize },
    // z = y_pos - y_neg
    Split { pos: usize, neg: usize },
}

struct Tableau {
    data: Vec<f64>,
    width: usize,
    m: usize,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    /// The opposite half of a split free variable.
    twin: Vec<Option<usize>>,
    iterations: usize,
    cap: usize,
    /// Original standard-form rows, used to rebuild the tableau.
    standard: Vec<f64>,
    /// Cost of the current phase over all columns.
    cost: Vec<f64>,
}

// Pivots between rebuilds of the tableau from the original rows.
const REINVERT_EVERY: usize = 100;
const CLEANUP_ROUNDS: usize = 4;

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.width + self.width - 1]
    }

    fn objective_row(&self) -> &[f64] {
        &self.data[self.m * self.width..]
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let w = self.width;
        let pv = self.data[r * w + e];
        for v in &mut self.data[r * w..(r + 1) * w] {
            *v /= pv;
        }
        self.data[r * w + e] = 1.0;
        let prow: Vec<f64> = self.data[r * w..(r + 1) * w].to_vec();
        let nz: Vec<usize> = (0..w).filter(|&k| prow[k] != 0.0).collect();
        let update = |(i, row): (usize, &mut [f64])| {
            if i == r {
                return;
            }
            let f = row[e];
            if f == 0.0 {
                return;
            }
            for &k in &nz {
                row[k] -= f * prow[k];
            }
            row[e] = 0.0;
        };
        if self.data.len() * nz.len() / w > 1 << 17 {
            self.data.par_chunks_mut(w).enumerate().for_each(update);
        } else {
            self.data.chunks_mut(w).enumerate().for_each(update);
        }
        self.is_basic[self.basis[r]] = false;
        self.is_basic[e] = true;
        self.basis[r] = e;
        self.iterations += 1;
    }

    fn can_enter(&self, j: usize, allowed: &[bool]) -> bool {
        allowed[j] && !self.is_basic[j] && !self.twin[j].is_some_and(|t| self.is_basic[t])
    }

    /// Installs `cost` as the objective and prices out the basic columns.
    fn set_cost(&mut self, cost: Vec<f64>) {
        let (w, obj) = (self.width, self.m * self.width);
        for k in 0..w {
            self.data[obj + k] = if k < cost.len() { cost[k] } else { 0.0 };
        }
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for k in 0..w {
                    self.data[obj + k] -= cb * self.data[i * w + k];
                }
            }
        }
        self.cost = cost;
    }

    /// Recomputes `B^{-1} [A | b]` and the reduced costs from the original
    /// rows, discarding the rounding drift of the accumulated pivots.
    fn reinvert(&mut self) {
        let k = self.m;
        if k == 0 {
            return;
        }
        let w = self.width;
        let bmat = DMatrix::from_fn(k, k, |r, c| self.standard[r * w + self.basis[c]]);
        let rhs = DMatrix::from_fn(k, w, |r, c| self.standard[r * w + c]);
        let Some(t) = bmat.lu().solve(&rhs) else {
            log::debug!("singular basis during reinversion, keeping the current tableau");
            return;
        };
        if t.iter().any(|v| !v.is_finite()) {
            return;
        }
        for i in 0..k {
            for c in 0..w {
                self.data[i * w + c] = t[(i, c)];
            }
            self.data[i * w + self.basis[i]] = 1.0;
        }
        let cost = std::mem::take(&mut self.cost);
        self.set_cost(cost);
    }

    /// Dual simplex pivots until every basic value is within the feasibility
    /// tolerance. Returns false when a row certifies infeasibility.
    fn dual_cleanup(&mut self, allowed: &[bool], opts: &LpOptions) -> Result<bool> {
        let mut since_reinvert = 0usize;
        loop {
            if self.iterations >= self.cap {
                return Err(Error::IterationLimit {
                    limit: self.cap,
                    best_objective: -self.at(self.m, self.width - 1),
                });
            }
            if since_reinvert >= REINVERT_EVERY {
                self.reinvert();
                since_reinvert = 0;
            }
            let worst = (0..self.m)
                .filter(|&i| self.rhs(i) < -opts.feas_tol)
                .min_by(|&i, &j| self.rhs(i).total_cmp(&self.rhs(j)));
            let Some(r) = worst else { return Ok(true) };
            let d = self.objective_row();
            let mut enter: Option<(usize, f64, f64)> = None;
            for j in 0..self.width - 1 {
                let a = self.at(r, j);
                if a >= -opts.pivot_tol || !self.can_enter(j, allowed) {
                    continue;
                }
                let ratio = d[j].max(0.0) / -a;
                let better = match enter {
                    None => true,
                    Some((_, br, ba)) => ratio < br - 1e-12 || (ratio <= br + 1e-12 && -a > ba),
                };
                if better {
                    enter = Some((j, ratio, -a));
                }
            }
            let Some((e, _, _)) = enter else { return Ok(false) };
            self.pivot(r, e);
            since_reinvert += 1;
        }
    }

    /// Runs primal simplex on the current objective row over columns with
    /// `allowed[j]`. Returns false on unboundedness.
    fn run(&mut self, allowed: &[bool], opts: &LpOptions, opt_tol: f64) -> Result<bool> {
        let rhs_col = self.width - 1;
        let mut streak = 0usize;
        let mut since_reinvert = 0usize;
        let mut verified = false;
        loop {
            if self.iterations >= self.cap {
                return Err(Error::IterationLimit {
                    limit: self.cap,
                    best_objective: -self.at(self.m, rhs_col),
                });
            }
            if since_reinvert >= REINVERT_EVERY {
                self.reinvert();
                since_reinvert = 0;
            }
            let bland = streak >= opts.degenerate_streak;
            let d = self.objective_row();
            let entering = if bland {
                (0..rhs_col).find(|&j| self.can_enter(j, allowed) && d[j] < -opt_tol)
            } else {
                let mut best: Option<(usize, f64)> = None;
                for j in 0..rhs_col {
                    if self.can_enter(j, allowed) && d[j] < -opt_tol && best.map_or(true, |(_, v)| d[j] < v) {
                        best = Some((j, d[j]));
                    }
                }
                best.map(|b| b.0)
            };
            let Some(e) = entering else {
                // Optimality is confirmed on a freshly rebuilt tableau.
                if verified || since_reinvert == 0 {
                    return Ok(true);
                }
                self.reinvert();
                since_reinvert = 0;
                verified = true;
                continue;
            };
            verified = false;

            // Harris two-pass ratio test: find the loosest step that keeps
            // every row within the feasibility tolerance, then take the
            // largest pivot among rows blocking no later than that.
            let col_max = (0..self.m)
                .fold(0.0f64, |acc, i| acc.max(self.at(i, e).abs()));
            let piv_tol = opts.pivot_tol;
            let mut bound = f64::INFINITY;
            for i in 0..self.m {
                let a = self.at(i, e);
                if a > piv_tol {
                    bound = bound.min((self.rhs(i).max(0.0) + opts.feas_tol) / a);
                }
            }
            if !bound.is_finite() {
                if since_reinvert == 0 {
                    log::debug!("unbounded column {e}: reduced cost {:e}, column max {col_max:e}", self.objective_row()[e]);
                    return Ok(false);
                }
                self.reinvert();
                since_reinvert = 0;
                continue;
            }
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, e);
                if a <= piv_tol || self.rhs(i).max(0.0) / a > bound {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some((bi, ba)) => {
                        if bland {
                            self.basis[i] < self.basis[bi]
                        } else {
                            a > ba
                        }
                    }
                };
                if better {
                    leave = Some((i, a));
                }
            }
            let Some((r, a)) = leave else { return Ok(false) };
            if self.rhs(r).max(0.0) / a <= opts.feas_tol {
                streak += 1;
            } else {
                streak = 0;
            }
            self.pivot(r, e);
            since_reinvert += 1;
            for i in 0..self.m {
                let idx = i * self.width + rhs_col;
                if self.data[idx] < 0.0 && self.data[idx] > -opts.feas_tol {
                    self.data[idx] = 0.0;
                }
            }
        }
    }
}

pub fn solve_lp_with(p: &LinearProgram, opts: &LpOptions) -> Result<LpSolution> {
    p.validate()?;
    let (scaled, col_scale) = equilibrate(p);
    let mut sol = solve_standard(&scaled, opts)?;
    if sol.status != LpStatus::Optimal {
        return Ok(sol);
    }
    for (v, s) in sol.z.iter_mut().zip(&col_scale) {
        *v *= s;
    }
    let viol = p.max_violation(sol.z.as_slice());
    let limit = 1e-7 * (1.0 + p.rhs_scale());
    if viol > limit {
        return Err(Error::Numerical(format!(
            "simplex solution violates constraints by {viol:.3e} (limit {limit:.3e})"
        )));
    }
    sol.objective = p.objective.dot(&sol.z);
    Ok(sol)
}

const SCALING_PASSES: usize = 4;
// Entries further than this below the largest in their row or column do
// not pull the scale factor down.
const SCALING_SPREAD: f64 = 1e-8;

fn pow2(x: f64) -> f64 {
    2f64.powi(x.log2().round() as i32)
}

/// Geometric-mean row and column scaling by powers of two, so the scaled
/// program has the same vertices in exactly rounded coordinates. Returns
/// the scaled program and the column factors `z = col * z_scaled`.
fn equilibrate(p: &LinearProgram) -> (LinearProgram, Vec<f64>) {
    let n = p.num_vars();
    let mut q = p.clone();
    let mut col = vec![1.0; n];
    for _ in 0..SCALING_PASSES {
        for r in q.inequalities.iter_mut().chain(q.equalities.iter_mut()) {
            let (lo, hi) = r
                .coeffs
                .iter()
                .filter(|c| c.1 != 0.0)
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), c| (lo.min(c.1.abs()), hi.max(c.1.abs())));
            if hi > 0.0 {
                let f = pow2((lo.max(hi * SCALING_SPREAD) * hi).sqrt());
                r.coeffs.iter_mut().for_each(|c| c.1 /= f);
                r.rhs /= f;
            }
        }
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![0.0f64; n];
        for r in q.inequalities.iter().chain(&q.equalities) {
            for &(j, a) in &r.coeffs {
                if a != 0.0 {
                    lo[j] = lo[j].min(a.abs());
                    hi[j] = hi[j].max(a.abs());
                }
            }
        }
        let f: Vec<f64> = (0..n)
            .map(|j| if hi[j] > 0.0 { pow2((lo[j].max(hi[j] * SCALING_SPREAD) * hi[j]).sqrt()) } else { 1.0 })
            .collect();
        for r in q.inequalities.iter_mut().chain(q.equalities.iter_mut()) {
            r.coeffs.iter_mut().for_each(|c| c.1 /= f[c.0]);
        }
        for j in 0..n {
            q.objective[j] /= f[j];
            q.lower[j] = q.lower[j].map(|v| v * f[j]);
            q.upper[j] = q.upper[j].map(|v| v * f[j]);
            col[j] /= f[j];
        }
    }
    (q, col)
}

fn solve_standard(p: &LinearProgram, opts: &LpOptions) -> Result<LpSolution> {
    let n = p.num_vars();

    let infeasible = |iterations| LpSolution {
        status: LpStatus::Infeasible,
        z: DVector::zeros(0),
        objective: f64::NAN,
        iterations,
    };

    // Map every original variable onto nonnegative columns.
    let mut maps = Vec::with_capacity(n);
    let mut ny = 0;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        match (p.lower[j], p.upper[j]) {
            (Some(lo), hi) => {
                if let Some(hi) = hi {
                    if hi < lo {
                        return Ok(infeasible(0));
                    }
                    bound_rows.push((ny, hi - lo));
                }
                maps.push(VarMap::Shift { lo, col: ny });
                ny += 1;
            }
            (None, Some(hi)) => {
                maps.push(VarMap::Flip { hi, col: ny });
                ny += 1;
            }
            (None, None) => {
                maps.push(VarMap::Split { pos: ny, neg: ny + 1 });
                ny += 2;
            }
        }
    }

    // Standard-form rows: (dense coefficients over y, rhs, is_equality).
    let mut rows: Vec<(Vec<f64>, f64, bool)> = Vec::new();
    let transform = |c: &Constraint| {
        let mut row = vec![0.0; ny];
        let mut rhs = c.rhs;
        for &(j, a) in &c.coeffs {
            match maps[j] {
                VarMap::Shift { lo, col } => {
                    row[col] += a;
                    rhs -= a * lo;
                }
                VarMap::Flip { hi, col } => {
                    row[col] -= a;
                    rhs -= a * hi;
                }
                VarMap::Split { pos, neg } => {
                    row[pos] += a;
                    row[neg] -= a;
                }
            }
        }
        (row, rhs)
    };
    for c in &p.inequalities {
        let (row, rhs) = transform(c);
        rows.push((row, rhs, false));
    }
    for &(col, ub) in &bound_rows {
        let mut row = vec![0.0; ny];
        row[col] = 1.0;
        rows.push((row, ub, false));
    }
    for c in &p.equalities {
        let (row, rhs) = transform(c);
        rows.push((row, rhs, true));
    }

    let mut cost = vec![0.0; ny];
    for (j, m) in maps.iter().enumerate() {
        let cj = p.objective[j];
        match *m {
            VarMap::Shift { col, .. } => cost[col] += cj,
            VarMap::Flip { col, .. } => cost[col] -= cj,
            VarMap::Split { pos, neg } => {
                cost[pos] += cj;
                cost[neg] -= cj;
            }
        }
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| !r.2).count();
    // Golden-ratio sequence: distinct relaxations, reproducible runs.
    let relaxed: Vec<f64> = rows
        .iter()
        .enumerate()
        .map(|(i, (_, rhs, eq))| {
            let spread = 1.0 + (i as f64 * 0.618_033_988_749_895).fract();
            if *eq {
                *rhs
            } else {
                rhs + opts.perturbation * spread * (1.0 + rhs.abs())
            }
        })
        .collect();
    let n_art = rows.iter().zip(&relaxed).filter(|(r, v)| r.2 || **v < 0.0).count();
    let ncols = ny + n_slack + n_art;
    let width = ncols + 1;
    let mut data = vec![0.0; (m + 1) * width];
    let mut basis = vec![0usize; m];
    let mut is_art = vec![false; ncols];
    let (mut next_slack, mut next_art) = (ny, ny + n_slack);
    let mut exact_rhs = vec![0.0; m];
    for (i, (row, rhs, eq)) in rows.iter().enumerate() {
        let relaxed = relaxed[i];
        let sign = if relaxed < 0.0 { -1.0 } else { 1.0 };
        let off = i * width;
        for (k, v) in row.iter().enumerate() {
            data[off + k] = sign * v;
        }
        data[off + ncols] = sign * relaxed;
        exact_rhs[i] = sign * rhs;
        if !eq {
            data[off + next_slack] = sign;
            if sign > 0.0 {
                basis[i] = next_slack;
            }
            next_slack += 1;
        }
        if *eq || sign < 0.0 {
            data[off + next_art] = 1.0;
            is_art[next_art] = true;
            basis[i] = next_art;
            next_art += 1;
        }
    }
    let standard: Vec<f64> = data[..m * width].to_vec();

    let cap = opts.max_iter.unwrap_or(50 * (m + ncols));
    log::debug!("simplex tableau {m} x {ncols}, {n_art} artificials");
    let mut twin = vec![None; ncols];
    for m in &maps {
        if let VarMap::Split { pos, neg } = *m {
            twin[pos] = Some(neg);
            twin[neg] = Some(pos);
        }
    }
    let mut is_basic = vec![false; ncols];
    basis.iter().for_each(|&j| is_basic[j] = true);
    let mut tab = Tableau {
        data,
        width,
        m,
        basis,
        is_basic,
        twin,
        iterations: 0,
        cap,
        standard,
        cost: Vec::new(),
    };
    let b_scale = 1.0 + (0..m).map(|i| tab.rhs(i).abs()).fold(0.0, f64::max);

    // Phase 1: minimize the sum of artificials.
    if n_art > 0 {
        tab.set_cost(is_art.iter().map(|&art| if art { 1.0 } else { 0.0 }).collect());
        let all = vec![true; ncols];
        tab.run(&all, opts, 1e-9)?;
        let infeas = -tab.at(m, ncols);
        log::debug!("phase 1 ends at infeasibility {infeas:e} after {} pivots", tab.iterations);
        if infeas > opts.feas_tol * b_scale {
            return Ok(infeasible(tab.iterations));
        }
        // Drive remaining artificials out of the basis. One that cannot leave
        // sits on a redundant row and stays basic at zero; artificials are
        // barred from entering again, so the row never moves.
        for i in 0..m {
            if !is_art[tab.basis[i]] {
                continue;
            }
            let best = (0..ncols)
                .filter(|&j| !is_art[j] && tab.can_enter(j, &all))
                .map(|j| (j, tab.at(i, j).abs()))
                .fold(None, |acc: Option<(usize, f64)>, (j, v)| match acc {
                    Some((_, bv)) if bv >= v => acc,
                    _ => Some((j, v)),
                });
            if let Some((j, v)) = best {
                if v > opts.pivot_tol {
                    tab.pivot(i, j);
                }
            }
        }
    }

    // Phase 2.
    let mut phase2 = vec![0.0; ncols];
    phase2[..ny].copy_from_slice(&cost);
    tab.set_cost(phase2);
    tab.reinvert();
    let allowed: Vec<bool> = (0..ncols).map(|j| !is_art[j]).collect();
    let cost_scale = cost.iter().fold(1.0f64, |a, c| a.max(c.abs()));
    let opt_tol = 1e-9 * cost_scale;
    if !tab.run(&allowed, opts, opt_tol)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            z: DVector::zeros(0),
            objective: f64::NEG_INFINITY,
            iterations: tab.iterations,
        });
    }

    // Remove the relaxation; the basis stays dual feasible, so dual pivots
    // restore primal feasibility without losing optimality.
    for (i, v) in exact_rhs.iter().enumerate() {
        tab.standard[i * width + ncols] = *v;
    }
    tab.reinvert();
    for _ in 0..CLEANUP_ROUNDS {
        if !tab.dual_cleanup(&allowed, opts)? {
            return Ok(infeasible(tab.iterations));
        }
        let before = tab.iterations;
        if !tab.run(&allowed, opts, opt_tol)? {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                z: DVector::zeros(0),
                objective: f64::NEG_INFINITY,
                iterations: tab.iterations,
            });
        }
        if tab.iterations == before {
            break;
        }
    }

    let mut y = vec![0.0; ncols];
    for i in 0..m {
        y[tab.basis[i]] = tab.rhs(i).max(0.0);
    }
    let z = DVector::from_iterator(
        n,
        maps.iter().map(|m| match *m {
            VarMap::Shift { lo, col } => lo + y[col],
            VarMap::Flip { hi, col } => hi - y[col],
            VarMap::Split { pos, neg } => y[pos] - y[neg],
        }),
    );
    let objective = p.objective.dot(&z);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        z,
        objective,
        iterations: tab.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lp1(c: f64) -> LinearProgram {
        LinearProgram::new(DVector::from_element(1, c))
    }

    #[test]
    fn lower_bound_row() {
        let mut p = lp1(1.0);
        p.add_ge(vec![(0, 1.0)], 1.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.z[0] - 1.0).abs() < 1e-12);
        assert!((s.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut p = lp1(1.0);
        p.add_le(vec![(0, 1.0)], -1.0);
        p.add_ge(vec![(0, 1.0)], 1.0);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut p = lp1(-1.0);
        p.set_bounds(0, Some(0.0), None);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn crossed_bounds_are_infeasible() {
        let mut p = lp1(1.0);
        p.set_bounds(0, Some(2.0), Some(1.0));
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), value 36.
        let mut p = LinearProgram::new(DVector::from_vec(vec![-3.0, -5.0]));
        p.add_le(vec![(0, 1.0)], 4.0);
        p.add_le(vec![(1, 2.0)], 12.0);
        p.add_le(vec![(0, 3.0), (1, 2.0)], 18.0);
        p.set_bounds(0, Some(0.0), None);
        p.set_bounds(1, Some(0.0), None);
        let s = solve_lp(&p).unwrap();
        assert!((s.objective + 36.0).abs() < 1e-10);
        assert!((s.z[0] - 2.0).abs() < 1e-10 && (s.z[1] - 6.0).abs() < 1e-10);
    }

    #[test]
    fn redundant_equalities_and_bounds() {
        let mut p = LinearProgram::new(DVector::from_vec(vec![1.0, 2.0, -1.0]));
        p.add_eq(vec![(0, 1.0), (1, 1.0), (2, 1.0)], 3.0);
        p.add_eq(vec![(0, 2.0), (1, 2.0), (2, 2.0)], 6.0);
        p.set_bounds(0, Some(0.0), Some(2.0));
        p.set_bounds(1, Some(-1.0), Some(1.0));
        p.set_bounds(2, None, Some(1.5));
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        // Best: z2 = 1.5, z1 = -1, z0 = 2.5 violates; so z0 = 2, z1 = -0.5.
        assert!((s.objective - (2.0 - 1.0 - 1.5)).abs() < 1e-10, "{:?}", s.z);
    }

    #[test]
    fn l1_epigraph_rows() {
        let rows = l1_epigraph(&[1.0], &DMatrix::identity(1, 1), 0, 1).unwrap();
        assert_eq!(rows[0], Constraint::new(vec![(0, 1.0), (1, -1.0)], 0.0));
        assert_eq!(rows[1], Constraint::new(vec![(0, -1.0), (1, -1.0)], 0.0));
        assert!(l1_epigraph(&[-1.0], &DMatrix::identity(1, 1), 0, 1).is_err());
        assert!(l1_epigraph(&[1.0, 1.0], &DMatrix::identity(1, 1), 0, 1).is_err());
    }

    #[test]
    fn l1_epigraph_reproduces_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let (rows, cols) = (rng.gen_range(1..8), rng.gen_range(1..6));
            let m = DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-2.0..2.0));
            let w: Vec<f64> = (0..rows)
                .map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..3.0) })
                .collect();
            let zs = DVector::from_fn(cols, |_, _| rng.gen_range(-1.0..1.0));
            let mut obj = DVector::zeros(cols + rows);
            obj.rows_mut(cols, rows).fill(1.0);
            let mut p = LinearProgram::new(obj);
            p.inequalities = l1_epigraph(&w, &m, 0, cols).unwrap();
            for j in 0..cols {
                p.set_bounds(j, Some(zs[j]), Some(zs[j]));
            }
            let s = solve_lp(&p).unwrap();
            let direct: f64 = (&m * &zs).iter().zip(&w).map(|(v, w)| (w * v).abs()).sum();
            assert!((s.objective - direct).abs() < 1e-8, "{} vs {direct}", s.objective);
            for h in 0..rows {
                if w[h] == 0.0 {
                    assert!(s.z[cols + h].abs() < 1e-12);
                }
            }
        }
    }
}
