//! Five-agent planar formation that contracts to pass a narrow region and
//! then re-expands, tracked by switching between two interaction networks.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::design::{spnopt, SpnoptOptions};
use crate::error::{Error, Result};
use crate::floquet::{simulate, SwitchSchedule, Topology, DEFAULT_SAMPLES_PER_SEGMENT};
use crate::linalg::Network;

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioFormation {
    pub agents: usize,
    /// Narrow radius.
    pub r_n: f64,
    /// Wide radius.
    pub r_w: f64,
    pub total: f64,
    /// End of the contraction phase.
    pub t1: f64,
}

impl Default for ScenarioFormation {
    fn default() -> Self {
        ScenarioFormation {
            agents: 5,
            r_n: 2.0,
            r_w: 5.0,
            total: 40.0,
            t1: 17.144,
        }
    }
}

impl ScenarioFormation {
    pub fn t2(&self) -> f64 {
        self.total - self.t1
    }

    pub fn theta(&self, i: usize) -> f64 {
        2.0 * PI * i as f64 / self.agents as f64
    }

    /// Stacked `(x, y)` reference positions of all agents at time `t`.
    pub fn reference_signal(&self, t: f64) -> Result<DVector<f64>> {
        if !(0.0..=self.total).contains(&t) {
            return Err(Error::InvalidInput(format!("time {t} outside [0, {}]", self.total)));
        }
        // Radius blends from r_w to r_n over phase 1 and back over phase 2.
        let radius = if t <= self.t1 {
            let phi = 0.5 * (1.0 - (PI * t / self.t1).cos());
            (1.0 - phi) * self.r_w + phi * self.r_n
        } else {
            let phi = 0.5 * (1.0 - (PI * (t - self.t1) / self.t2()).cos());
            (1.0 - phi) * self.r_n + phi * self.r_w
        };
        let mut g = DVector::zeros(2 * self.agents);
        for i in 0..self.agents {
            let th = self.theta(i);
            g[2 * i] = t + radius * th.cos();
            g[2 * i + 1] = radius * th.sin();
        }
        Ok(g)
    }
}

/// The five-agent interaction network.
pub fn formation_network() -> Network {
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
    .expect("constant network is valid")
}

/// `M (x) I_2`, acting on agent-major stacked planar states.
pub fn planar(net: &Network) -> Result<Network> {
    let w = net.weights();
    let n = net.n();
    let m = DMatrix::from_fn(2 * n, 2 * n, |r, c| if r % 2 == c % 2 { w[(r / 2, c / 2)] } else { 0.0 });
    Network::new(m, format!("{} (planar)", net.label()))
}

/// Tracking error at `t = 0`: every coordinate displaced by `+-0.5`, alternating.
pub fn default_initial_error(agents: usize) -> DVector<f64> {
    DVector::from_fn(2 * agents, |k, _| if k % 2 == 0 { 0.5 } else { -0.5 })
}

#[derive(Debug, Clone)]
pub struct FormationRun {
    pub scenario: ScenarioFormation,
    pub a: Network,
    pub b: Network,
    pub k_star: f64,
    pub alpha_star: f64,
    pub schedule: SwitchSchedule,
    pub times: Vec<f64>,
    pub active: Vec<Option<Topology>>,
    /// Agent positions `z = g + x`.
    pub positions: Vec<DVector<f64>>,
    pub reference: Vec<DVector<f64>>,
}

/// Designs the complementary network, holds `A` for `k* T` and `B` for the
/// rest of the manoeuvre, and propagates the tracking error.
pub fn run_formation(s: &ScenarioFormation, x0: Option<DVector<f64>>) -> Result<FormationRun> {
    let a = formation_network();
    let design = spnopt(&a, &SpnoptOptions::default())?.result;
    let dwell_a = design.k_star * s.total;
    let schedule = SwitchSchedule::new(s.total, vec![(dwell_a, s.total - dwell_a)])?;
    let x0 = x0.unwrap_or_else(|| default_initial_error(s.agents));
    let traj = simulate(&planar(&a)?, &planar(&design.b)?, &schedule, &x0, 1, 4 * DEFAULT_SAMPLES_PER_SEGMENT)?;
    let mut reference = Vec::with_capacity(traj.times.len());
    let mut positions = Vec::with_capacity(traj.times.len());
    for (t, x) in traj.times.iter().zip(&traj.states) {
        let g = s.reference_signal(t.min(s.total))?;
        positions.push(&g + x);
        reference.push(g);
    }
    Ok(FormationRun {
        scenario: s.clone(),
        a,
        b: design.b,
        k_star: design.k_star,
        alpha_star: design.alpha_star,
        schedule,
        times: traj.times,
        active: traj.active,
        positions,
        reference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_endpoints() {
        let s = ScenarioFormation::default();
        let g0 = s.reference_signal(0.0).unwrap();
        assert!((g0[0] - 5.0).abs() < 1e-15 && g0[1].abs() < 1e-15);
        let g1 = s.reference_signal(s.t1).unwrap();
        let gt = s.reference_signal(s.total).unwrap();
        for i in 0..5 {
            let th = s.theta(i);
            assert!((g1[2 * i] - (s.t1 + 2.0 * th.cos())).abs() < 1e-12);
            assert!((g1[2 * i + 1] - 2.0 * th.sin()).abs() < 1e-12);
            assert!((gt[2 * i] - (s.total + 5.0 * th.cos())).abs() < 1e-12);
            assert!((gt[2 * i + 1] - 5.0 * th.sin()).abs() < 1e-12);
        }
        assert!(s.reference_signal(-0.1).is_err());
        assert!(s.reference_signal(40.1).is_err());
    }

    #[test]
    fn planar_lift_is_kronecker() {
        let net = Network::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]], "m").unwrap();
        let p = planar(&net).unwrap();
        assert_eq!(p.weights()[(0, 2)], 2.0);
        assert_eq!(p.weights()[(1, 3)], 2.0);
        assert_eq!(p.weights()[(0, 3)], 0.0);
        assert_eq!(p.weights()[(3, 1)], 3.0);
    }

    #[test]
    fn formation_run_tracks_reference() {
        let run = run_formation(&ScenarioFormation::default(), None).unwrap();
        assert!((run.schedule.segments()[0].0 - 40.0 * 3.0 / 7.0).abs() < 1e-4);
        let last = run.positions.len() - 1;
        assert!((&run.positions[last] - &run.reference[last]).norm() < 1e-6);
        assert_eq!(run.times.len(), run.reference.len());
    }
}
