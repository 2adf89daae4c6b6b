//! Forced-zero patterns for a complementary network and the greedy search
//! for a maximal pattern that still admits a nontrivial commuting matrix.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    centralizer_basis, numerical_rank, rank_threshold, singular_values, vec_entry, vec_index,
    CentralizerBasis, Network, Tolerances,
};

/// Set of zero-based `(row, col)` entries forced to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityPattern {
    n: usize,
    entries: BTreeSet<(usize, usize)>,
}

impl SparsityPattern {
    pub fn new(n: usize, entries: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let entries: BTreeSet<(usize, usize)> = entries.into_iter().collect();
        if let Some(&(i, j)) = entries.iter().find(|&&(i, j)| i >= n || j >= n) {
            return Err(Error::InvalidInput(format!("entry ({i}, {j}) outside a {n}x{n} pattern")));
        }
        Ok(SparsityPattern { n, entries })
    }

    pub fn empty(n: usize) -> Self {
        SparsityPattern { n, entries: BTreeSet::new() }
    }

    pub fn diagonal(n: usize) -> Self {
        SparsityPattern {
            n,
            entries: (0..n).map(|i| (i, i)).collect(),
        }
    }

    /// Pattern from column-major vec indices `h = j n + i`.
    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut entries = BTreeSet::new();
        for h in indices {
            if h >= n * n {
                return Err(Error::InvalidInput(format!("vec index {h} outside 0..{}", n * n)));
            }
            entries.insert(vec_entry(h, n));
        }
        Ok(SparsityPattern { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.entries.contains(&(i, j))
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries.iter().copied()
    }

    /// Vec indices of the pattern in ascending order.
    pub fn indices(&self) -> Vec<usize> {
        let mut h: Vec<usize> = self.entries.iter().map(|&(i, j)| vec_index(i, j, self.n)).collect();
        h.sort_unstable();
        h
    }
}

impl fmt::Display for SparsityPattern {
    /// One-based `(i,j)` list.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(i, j)| format!("({},{})", i + 1, j + 1)).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Rows of the power basis selected by a pattern.
#[derive(Debug, Clone)]
pub struct RowSubmatrix {
    pub rows: DMatrix<f64>,
    pub rank: usize,
    pub singular_values: Vec<f64>,
    order: usize,
}

impl RowSubmatrix {
    pub fn order(&self) -> usize {
        self.order
    }
}

pub fn row_submatrix(basis: &CentralizerBasis, pat: &SparsityPattern) -> Result<RowSubmatrix> {
    row_submatrix_with(basis, pat, Tolerances::default().rank)
}

pub fn row_submatrix_with(basis: &CentralizerBasis, pat: &SparsityPattern, tol_rank: f64) -> Result<RowSubmatrix> {
    if pat.n() != basis.n() {
        return Err(Error::Dimension(format!(
            "pattern is {0}x{0} but the basis is for n = {1}",
            pat.n(),
            basis.n()
        )));
    }
    let idx = pat.indices();
    let rows = basis.powers.select_rows(idx.iter());
    Ok(RowSubmatrix {
        rank: numerical_rank(&rows, tol_rank),
        singular_values: singular_values(&rows),
        rows,
        order: basis.order(),
    })
}

/// A nontrivial coefficient vector annihilated by the selected rows exists.
pub fn is_compatible(sub: &RowSubmatrix) -> bool {
    sub.rank < sub.order
}

/// Unit right singular vector for the smallest singular value.
pub fn nullspace_vector(sub: &RowSubmatrix) -> Result<DVector<f64>> {
    if !is_compatible(sub) {
        return Err(Error::Precondition(format!(
            "selected rows have full rank {}; the pattern admits no nontrivial commuting matrix",
            sub.order
        )));
    }
    let p = sub.order;
    let m = sub.rows.nrows();
    // Pad to at least p rows so the SVD returns a full right basis.
    let mut padded = DMatrix::zeros(m.max(p), p);
    padded.rows_mut(0, m).copy_from(&sub.rows);
    let svd = padded.svd(false, true);
    let vt = svd
        .v_t
        .ok_or_else(|| Error::Numerical("SVD did not return right singular vectors".into()))?;
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (k, &s)| if s < acc.1 { (k, s) } else { acc });
    let mut c: DVector<f64> = vt.row(imin).transpose();
    // Sign convention: largest-magnitude entry positive.
    let (kmax, _) = c
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (k, v)| if v.abs() > acc.1 { (k, v.abs()) } else { acc });
    if c[kmax] < 0.0 {
        c = -c;
    }
    let nrm = c.norm();
    Ok(c / nrm)
}

#[derive(Debug, Clone, Default)]
pub struct ScnetOptions {
    /// Starting pattern with exactly `n` entries; the diagonal by default.
    pub initial: Option<SparsityPattern>,
    /// Randomizes the order in which rows are offered during growth and
    /// seeds the random repair moves.
    pub seed: Option<u64>,
    pub tol_rank: Option<f64>,
}

/// Rank-deficiency test with a safety margin: the smallest of the `p`
/// singular values must sit below half the numerical-rank cutoff.
fn deficient(sv: &[f64], rows: usize, p: usize, tol_rank: f64) -> bool {
    if rows < p {
        return true;
    }
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return true;
    }
    sv[p - 1] < 0.5 * rank_threshold(smax, rows, p, tol_rank)
}

fn relative_gap(sv: &[f64], p: usize) -> f64 {
    match sv.first() {
        Some(&s) if s > 0.0 && sv.len() >= p => sv[p - 1] / s,
        _ => 0.0,
    }
}

/// Upper-triangular factor of a row stack, grown one row at a time with
/// Givens rotations. Its singular values equal those of the stack.
#[derive(Clone)]
struct GrowingQr {
    r: DMatrix<f64>,
    rows: usize,
}

impl GrowingQr {
    fn new(p: usize) -> Self {
        GrowingQr { r: DMatrix::zeros(p, p), rows: 0 }
    }

    fn insert(&mut self, row: &[f64]) {
        let p = self.r.ncols();
        let mut x = row.to_vec();
        for k in 0..p {
            if x[k] == 0.0 {
                continue;
            }
            let a = self.r[(k, k)];
            let h = a.hypot(x[k]);
            let (c, s) = (a / h, x[k] / h);
            for j in k..p {
                let rkj = self.r[(k, j)];
                self.r[(k, j)] = c * rkj + s * x[j];
                x[j] = -s * rkj + c * x[j];
            }
        }
        self.rows += 1;
    }

    fn singular_values(&self) -> Vec<f64> {
        singular_values(&self.r)
    }
}

pub fn scnet(a: &Network, initial: &SparsityPattern, p: usize) -> Result<SparsityPattern> {
    let basis = centralizer_basis(a, p)?;
    scnet_with(
        &basis,
        &ScnetOptions {
            initial: Some(initial.clone()),
            ..Default::default()
        },
    )
}

/// Greedy construction of a maximal (by inclusion) compatible pattern.
///
/// Phase 1 repairs a full-rank initial block by single-entry replacement:
/// a deterministic sweep over positions and distinct candidate rows, then
/// seeded random replacements, within `10 n^2` attempts. Phase 2 offers
/// every remaining row and keeps it when the block stays rank deficient,
/// repeating until nothing more can be added.
pub fn scnet_with(basis: &CentralizerBasis, opts: &ScnetOptions) -> Result<SparsityPattern> {
    let n = basis.n();
    let p = basis.order();
    let tol = opts.tol_rank.unwrap_or(Tolerances::default().rank);
    let initial = opts.initial.clone().unwrap_or_else(|| SparsityPattern::diagonal(n));
    if initial.n() != n {
        return Err(Error::Dimension(format!("initial pattern is for n = {}, network has n = {n}", initial.n())));
    }
    if initial.len() != n {
        return Err(Error::InvalidInput(format!(
            "initial pattern must have exactly n = {n} entries, got {}",
            initial.len()
        )));
    }
    let ap = &basis.powers;
    let block_sv = |idx: &[usize]| singular_values(&ap.select_rows(idx.iter()));
    let mut selected = initial.indices();

    let sv = block_sv(&selected);
    if !deficient(&sv, selected.len(), p, tol) {
        selected = repair(ap, selected, p, tol, opts.seed)?;
    }
    log::debug!("scnet: initial block of {} rows is rank deficient", selected.len());

    let mut qr = GrowingQr::new(p);
    for &h in &selected {
        qr.insert(ap.row(h).transpose().as_slice());
    }
    let in_set: BTreeSet<usize> = selected.iter().copied().collect();
    let mut pending: Vec<usize> = (0..n * n).filter(|h| !in_set.contains(h)).collect();
    match opts.seed {
        Some(seed) => pending.shuffle(&mut ChaCha8Rng::seed_from_u64(seed)),
        None => {
            let score: HashMap<usize, f64> = pending
                .iter()
                .map(|&h| {
                    let mut trial = qr.clone();
                    trial.insert(ap.row(h).transpose().as_slice());
                    (h, relative_gap(&trial.singular_values(), p))
                })
                .collect();
            pending.sort_by(|x, y| score[x].total_cmp(&score[y]).then(x.cmp(y)));
        }
    }

    loop {
        let mut added = false;
        let mut rejected = Vec::with_capacity(pending.len());
        for h in pending {
            let mut trial = qr.clone();
            trial.insert(ap.row(h).transpose().as_slice());
            if deficient(&trial.singular_values(), trial.rows, p, tol) {
                qr = trial;
                selected.push(h);
                added = true;
            } else {
                rejected.push(h);
            }
        }
        pending = rejected;
        if !added {
            break;
        }
    }
    SparsityPattern::from_indices(n, selected)
}

fn repair(ap: &DMatrix<f64>, mut selected: Vec<usize>, p: usize, tol: f64, seed: Option<u64>) -> Result<Vec<usize>> {
    let n2 = ap.nrows();
    let budget = 10 * n2;
    let mut attempts = 0usize;
    let eval = |idx: &[usize]| singular_values(&ap.select_rows(idx.iter()));

    // One representative (lowest index) per distinct row outside the block.
    let candidates = |sel: &[usize]| {
        let used: BTreeSet<usize> = sel.iter().copied().collect();
        let mut seen: HashMap<Vec<u64>, ()> = HashMap::new();
        let mut out = Vec::new();
        for h in 0..n2 {
            if used.contains(&h) {
                continue;
            }
            let key: Vec<u64> = ap.row(h).iter().map(|v| v.to_bits()).collect();
            if seen.insert(key, ()).is_none() {
                out.push(h);
            }
        }
        out
    };

    let mut current = relative_gap(&eval(&selected), p);
    for pos in 0..selected.len() {
        let mut best: Option<(usize, f64)> = None;
        for cand in candidates(&selected) {
            attempts += 1;
            if attempts > budget {
                return Err(budget_error(budget));
            }
            let mut trial = selected.clone();
            trial[pos] = cand;
            let sv = eval(&trial);
            if deficient(&sv, trial.len(), p, tol) {
                log::debug!("scnet: repaired initial pattern after {attempts} attempts");
                return Ok(trial);
            }
            let gap = relative_gap(&sv, p);
            if best.map_or(true, |b| gap < b.1) {
                best = Some((cand, gap));
            }
        }
        if let Some((cand, gap)) = best {
            if gap < current {
                selected[pos] = cand;
                current = gap;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(0));
    while attempts < budget {
        attempts += 1;
        let pool = candidates(&selected);
        if pool.is_empty() {
            break;
        }
        let pos = rng.gen_range(0..selected.len());
        let cand = pool[rng.gen_range(0..pool.len())];
        let mut trial = selected.clone();
        trial[pos] = cand;
        let sv = eval(&trial);
        if deficient(&sv, trial.len(), p, tol) {
            return Ok(trial);
        }
        let gap = relative_gap(&sv, p);
        if gap < current {
            selected = trial;
            current = gap;
        }
    }
    Err(budget_error(budget))
}

fn budget_error(budget: usize) -> Error {
    Error::Precondition(format!(
        "no rank-deficient initial pattern found within {budget} replacement attempts; \
         the centralizer admits no such pattern at this order"
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator_norm, unvec};

    fn five_node() -> Network {
        Network::new(crate::linalg::tests::five_node(), "A").unwrap()
    }

    fn one_based(pairs: &[(usize, usize)]) -> Vec<(usize, usize)> {
        pairs.iter().map(|&(i, j)| (i - 1, j - 1)).collect()
    }

    fn printed_s() -> SparsityPattern {
        let pairs = [
            (2, 2), (2, 3), (2, 4), (2, 5), (3, 1), (3, 3), (3, 4), (3, 5),
            (4, 1), (4, 2), (4, 4), (4, 5), (5, 1), (5, 2), (5, 3), (5, 5),
        ];
        SparsityPattern::new(5, one_based(&pairs)).unwrap()
    }

    #[test]
    fn pattern_indexing() {
        let s = SparsityPattern::new(3, [(0, 1)]).unwrap();
        assert_eq!(s.indices(), vec![3]);
        assert!(SparsityPattern::new(3, [(3, 0)]).is_err());
        assert_eq!(SparsityPattern::from_indices(3, [3]).unwrap(), s);
        assert_eq!(s.to_string(), "{(1,2)}");
    }

    #[test]
    fn empty_and_full_selections() {
        let a = five_node();
        let basis = centralizer_basis(&a, 5).unwrap();
        let e = row_submatrix(&basis, &SparsityPattern::empty(5)).unwrap();
        assert_eq!((e.rows.nrows(), e.rank), (0, 0));
        assert!(is_compatible(&e));
        let all = SparsityPattern::from_indices(5, 0..25).unwrap();
        let f = row_submatrix(&basis, &all).unwrap();
        assert_eq!(f.rank, numerical_rank(&basis.powers, f64::EPSILON));
    }

    #[test]
    fn printed_initial_pattern_has_rank_four() {
        let basis = centralizer_basis(&five_node(), 5).unwrap();
        let s0 = SparsityPattern::new(5, one_based(&[(2, 4), (2, 2), (3, 3), (4, 4), (5, 5)])).unwrap();
        let sub = row_submatrix(&basis, &s0).unwrap();
        assert_eq!(sub.rank, 4);
        assert!(is_compatible(&sub));
    }

    #[test]
    fn one_row_nullspace() {
        let sub = RowSubmatrix {
            rows: DMatrix::from_row_slice(1, 2, &[1.0, 1.0]),
            rank: 1,
            singular_values: vec![2f64.sqrt()],
            order: 2,
        };
        let c = nullspace_vector(&sub).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((c[0].abs() - h).abs() < 1e-15 && (c[0] + c[1]).abs() < 1e-15);
    }

    #[test]
    fn scnet_reproduces_printed_pattern() {
        let a = five_node();
        let s0 = SparsityPattern::new(5, one_based(&[(2, 4), (2, 2), (3, 3), (4, 4), (5, 5)])).unwrap();
        let s = scnet(&a, &s0, 5).unwrap();
        assert_eq!(s, printed_s());
        let diag = scnet(&a, &SparsityPattern::diagonal(5), 5).unwrap();
        assert_eq!(diag, printed_s());
    }

    #[test]
    fn printed_pattern_yields_commuting_sparse_b() {
        let a = five_node();
        let basis = centralizer_basis(&a, 5).unwrap();
        let sub = row_submatrix(&basis, &printed_s()).unwrap();
        assert_eq!(sub.rank, 4);
        let c = nullspace_vector(&sub).unwrap();
        let b = unvec(&(&basis.powers * &c), 5).unwrap();
        for (i, j) in printed_s().entries() {
            assert!(b[(i, j)].abs() <= 1e-8 * b.norm());
        }
        assert!(commutator_norm(a.weights(), &b) <= 1e-10 * a.weights().norm() * b.norm());
    }

    #[test]
    fn diagonal_network_gives_all_off_diagonal() {
        let a = Network::new(DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, -2.0, -3.0, -4.0])), "d").unwrap();
        let basis = centralizer_basis(&a, 4).unwrap();
        let off: Vec<(usize, usize)> = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
        let off = SparsityPattern::new(4, off).unwrap();
        assert!(is_compatible(&row_submatrix(&basis, &off).unwrap()));
        let s = scnet_with(&basis, &ScnetOptions::default()).unwrap();
        // Off-diagonal rows of the power basis vanish, so they are always
        // absorbed; growth then continues through the diagonal until one
        // free entry remains.
        assert!(off.entries().all(|(i, j)| s.contains(i, j)));
        assert_eq!(s.len(), 15);
        assert!(is_compatible(&row_submatrix(&basis, &s).unwrap()));
    }

    #[test]
    fn wrong_initial_size_rejected() {
        let a = five_node();
        assert!(scnet(&a, &SparsityPattern::empty(5), 5).is_err());
    }

    #[test]
    fn givens_factor_matches_stack() {
        let basis = centralizer_basis(&five_node(), 5).unwrap();
        let mut qr = GrowingQr::new(5);
        let idx = [0usize, 3, 7, 12, 18, 24];
        for &h in &idx {
            qr.insert(basis.powers.row(h).transpose().as_slice());
        }
        let direct = singular_values(&basis.powers.select_rows(idx.iter()));
        let via = qr.singular_values();
        for (x, y) in direct.iter().zip(&via) {
            assert!((x - y).abs() <= 1e-9 * direct[0], "{x} vs {y}");
        }
    }
}
