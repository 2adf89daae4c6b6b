use nalgebra::{DMatrix, DVector};
use netswitch::lp::{solve_lp, LinearProgram, LpStatus};
use proptest::prelude::*;

// Box-bounded program: minimize c.z subject to G z <= h and lo <= z <= hi.
#[derive(Debug, Clone)]
struct Instance {
    c: Vec<f64>,
    g: Vec<Vec<f64>>,
    h: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

fn instance() -> impl Strategy<Value = Instance> {
    (2usize..=3, 1usize..=5).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(-5.0f64..5.0, n),
            prop::collection::vec(prop::collection::vec(-3.0f64..3.0, n), m),
            prop::collection::vec(-2.0f64..4.0, m),
            prop::collection::vec(-3.0f64..0.0, n),
            prop::collection::vec(0.5f64..3.0, n),
        )
            .prop_map(|(c, g, h, lo, hi)| Instance { c, g, h, lo, hi })
    })
}

fn build(inst: &Instance, perm_vars: &[usize], perm_rows: &[usize]) -> LinearProgram {
    // Variable j of the instance lives at position perm_vars[j].
    let n = inst.c.len();
    let mut obj = DVector::zeros(n);
    for j in 0..n {
        obj[perm_vars[j]] = inst.c[j];
    }
    let mut p = LinearProgram::new(obj);
    for &r in perm_rows {
        p.add_le(
            inst.g[r].iter().enumerate().map(|(j, &v)| (perm_vars[j], v)).collect(),
            inst.h[r],
        );
    }
    for j in 0..n {
        p.set_bounds(perm_vars[j], Some(inst.lo[j]), Some(inst.hi[j]));
    }
    p
}

/// Brute force over every basic solution: each choice of `n` tight rows
/// among the constraints and bounds.
fn vertex_oracle(inst: &Instance) -> Option<f64> {
    let n = inst.c.len();
    let mut rows: Vec<(Vec<f64>, f64)> = inst.g.iter().cloned().zip(inst.h.iter().copied()).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        rows.push((e.clone(), inst.hi[j]));
        e[j] = -1.0;
        rows.push((e, -inst.lo[j]));
    }
    let total = rows.len();
    let mut best: Option<f64> = None;
    let mut pick = vec![0usize; n];
    fn rec(
        depth: usize,
        start: usize,
        pick: &mut Vec<usize>,
        rows: &[(Vec<f64>, f64)],
        total: usize,
        inst: &Instance,
        best: &mut Option<f64>,
    ) {
        let n = pick.len();
        if depth == n {
            let m = DMatrix::from_fn(n, n, |r, c| rows[pick[r]].0[c]);
            let rhs = DVector::from_fn(n, |r, _| rows[pick[r]].1);
            let Some(z) = m.lu().solve(&rhs) else { return };
            if z.iter().any(|v| !v.is_finite()) {
                return;
            }
            let feasible = rows
                .iter()
                .all(|(a, b)| a.iter().zip(z.iter()).map(|(x, y)| x * y).sum::<f64>() <= b + 1e-9 * (1.0 + b.abs()));
            if feasible {
                let v: f64 = inst.c.iter().zip(z.iter()).map(|(x, y)| x * y).sum();
                *best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
            return;
        }
        for i in start..total {
            pick[depth] = i;
            rec(depth + 1, i + 1, pick, rows, total, inst, best);
        }
    }
    rec(0, 0, &mut pick, &rows, total, inst, &mut best);
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simplex_matches_vertex_enumeration(inst in instance()) {
        let n = inst.c.len();
        let ident: Vec<usize> = (0..n).collect();
        let rows: Vec<usize> = (0..inst.g.len()).collect();
        let sol = solve_lp(&build(&inst, &ident, &rows)).unwrap();
        match vertex_oracle(&inst) {
            Some(v) => {
                prop_assert_eq!(sol.status, LpStatus::Optimal);
                prop_assert!((sol.objective - v).abs() <= 1e-7 * (1.0 + v.abs()), "{} vs {}", sol.objective, v);
            }
            None => prop_assert_eq!(sol.status, LpStatus::Infeasible),
        }
    }

    #[test]
    fn objective_invariant_under_permutation(inst in instance(), shift in 0usize..6) {
        let n = inst.c.len();
        let m = inst.g.len();
        let ident: Vec<usize> = (0..n).collect();
        let rows: Vec<usize> = (0..m).collect();
        let pv: Vec<usize> = (0..n).map(|j| (j + shift) % n).collect();
        let pr: Vec<usize> = (0..m).rev().collect();
        let a = solve_lp(&build(&inst, &ident, &rows)).unwrap();
        let b = solve_lp(&build(&inst, &pv, &pr)).unwrap();
        prop_assert_eq!(a.status, b.status);
        if a.status == LpStatus::Optimal {
            prop_assert!((a.objective - b.objective).abs() <= 1e-7 * (1.0 + a.objective.abs()));
        }
    }

    #[test]
    fn scaling_objective_scales_value(inst in instance(), scale in 0.1f64..10.0) {
        let n = inst.c.len();
        let ident: Vec<usize> = (0..n).collect();
        let rows: Vec<usize> = (0..inst.g.len()).collect();
        let mut scaled = inst.clone();
        scaled.c.iter_mut().for_each(|v| *v *= scale);
        let a = solve_lp(&build(&inst, &ident, &rows)).unwrap();
        let b = solve_lp(&build(&scaled, &ident, &rows)).unwrap();
        prop_assert_eq!(a.status, b.status);
        if a.status == LpStatus::Optimal {
            prop_assert!((a.objective * scale - b.objective).abs() <= 1e-7 * (1.0 + b.objective.abs()));
        }
    }
}

#[test]
fn dual_certificate_bounds_the_primal() {
    // min -x - 2y s.t. x + y <= 4, x + 3y <= 6, x, y >= 0. The dual point
    // (0.5, 0.5) is feasible for the dual, so -(4 + 6) / 2 bounds the optimum.
    let mut p = LinearProgram::new(DVector::from_vec(vec![-1.0, -2.0]));
    p.add_le(vec![(0, 1.0), (1, 1.0)], 4.0);
    p.add_le(vec![(0, 1.0), (1, 3.0)], 6.0);
    p.set_bounds(0, Some(0.0), None);
    p.set_bounds(1, Some(0.0), None);
    let s = solve_lp(&p).unwrap();
    assert!(s.objective >= -5.0 - 1e-12);
    assert!((s.objective + 5.0).abs() < 1e-9);
    assert!((s.z[0] - 3.0).abs() < 1e-9 && (s.z[1] - 1.0).abs() < 1e-9);
}
