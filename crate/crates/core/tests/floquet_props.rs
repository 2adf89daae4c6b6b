mod common;

use common::*;
use nalgebra::DVector;
use netswitch::floquet::{commutative_average, monodromy, simulate, SwitchSchedule};
use netswitch::linalg::{matrix_exponential, matrix_logarithm};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn schedule(period: f64, cuts: &[(f64, f64)]) -> SwitchSchedule {
    let total: f64 = cuts.iter().map(|(w, _)| w).sum();
    let mut used = 0.0;
    let segs = cuts
        .iter()
        .enumerate()
        .map(|(i, &(w, share))| {
            let len = if i + 1 == cuts.len() { period - used } else { period * w / total };
            used += len;
            (len * share, len - len * share)
        })
        .collect();
    SwitchSchedule::new(period, segs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn commuting_monodromy_is_exponential_of_average(
        seed in any::<u64>(),
        n in 2usize..6,
        period in 0.2f64..2.0,
        cuts in prop::collection::vec((0.1f64..1.0, 0.0f64..1.0), 1..=5),
    ) {
        let pair = CommutingPair::random(n, 2, &mut ChaCha8Rng::seed_from_u64(seed));
        let s = schedule(period, &cuts);
        let r = monodromy(&pair.a, &pair.b, &s).unwrap();
        let q = commutative_average(&pair.a, &pair.b, s.ratio()).unwrap();
        let expected = matrix_exponential(&q, period).unwrap();
        prop_assert!((&r - &expected).norm() <= 1e-10 * expected.norm().max(1.0));
    }

    #[test]
    fn segment_order_does_not_matter_for_commuting_pairs(
        seed in any::<u64>(),
        n in 2usize..6,
        cuts in prop::collection::vec((0.1f64..1.0, 0.0f64..1.0), 2..=5),
    ) {
        let pair = CommutingPair::random(n, 2, &mut ChaCha8Rng::seed_from_u64(seed));
        let forward = schedule(1.0, &cuts);
        let mut reversed_segments = forward.segments().to_vec();
        reversed_segments.reverse();
        let reversed = SwitchSchedule::new(1.0, reversed_segments).unwrap();
        let r1 = monodromy(&pair.a, &pair.b, &forward).unwrap();
        let r2 = monodromy(&pair.a, &pair.b, &reversed).unwrap();
        prop_assert!((&r1 - &r2).norm() <= 1e-10 * r1.norm().max(1.0));
    }

    #[test]
    fn averaged_generator_has_mapped_spectrum(
        seed in any::<u64>(),
        n in 2usize..6,
        k in 0.0f64..1.0,
    ) {
        let pair = CommutingPair::random(n, 1, &mut ChaCha8Rng::seed_from_u64(seed));
        let s = SwitchSchedule::from_ratio(k, 1.0, 1).unwrap();
        let expected: Vec<_> = pair.lambdas.iter().zip(&pair.mus).map(|(l, m)| l * k + m * (1.0 - k)).collect();
        prop_assume!(expected.iter().all(|z| z.im.abs() < 3.0));
        let r = monodromy(&pair.a, &pair.b, &s).unwrap();
        let q = matrix_logarithm(&r).unwrap();
        prop_assert!(spectral_distance(&eigenvalues(&q), &expected) <= 1e-6);
    }

    #[test]
    fn periods_compose(
        seed in any::<u64>(),
        n in 2usize..5,
        periods in 1usize..4,
        cuts in prop::collection::vec((0.1f64..1.0, 0.0f64..1.0), 1..=3),
    ) {
        let pair = CommutingPair::random(n, 2, &mut ChaCha8Rng::seed_from_u64(seed));
        let s = schedule(0.7, &cuts);
        let r = monodromy(&pair.a, &pair.b, &s).unwrap();
        let x0 = DVector::from_fn(n, |i, _| 1.0 - 0.3 * i as f64);
        let traj = simulate(&pair.a, &pair.b, &s, &x0, periods, 3).unwrap();
        let mut x = x0.clone();
        for (l, (t, state)) in traj.period_states().enumerate() {
            prop_assert!((t - 0.7 * l as f64).abs() < 1e-12);
            prop_assert!((state - &x).amax() <= 1e-10 * x.amax().max(1.0));
            x = &r * x;
        }
    }
}

#[test]
fn non_commuting_pair_still_simulates_exactly() {
    let a = five_node();
    let b = netswitch::Network::new(five_node().weights().transpose(), "At").unwrap();
    let s = SwitchSchedule::from_ratio(0.3, 0.5, 2).unwrap();
    let r = monodromy(&a, &b, &s).unwrap();
    let x0 = DVector::from_element(5, 1.0);
    let traj = simulate(&a, &b, &s, &x0, 1, 7).unwrap();
    let last = traj.states.last().unwrap();
    assert!((last - &r * &x0).amax() <= 1e-9 * (&r * &x0).amax());
}
