use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mpmd_core::generate::{random_concave, random_mts, random_plane, random_size_based, InstanceShape};
use mpmd_core::mts::mts_opt;
use mpmd_core::oracles::{brute_force_opt, earliest_time_opt, exhaustive_mts_opt, min_cost_perfect_matching};
use mpmd_core::{concave_time_dist, ConcaveFn, Cost, DelayModel, Instance, Request, SizePhase, TOL};

fn all_pairings(ids: &[usize], c: &[Vec<f64>]) -> f64 {
    let Some((&u, rest)) = ids.split_first() else { return 0.0 };
    let mut best = f64::INFINITY;
    for (k, &v) in rest.iter().enumerate() {
        let mut left = rest.to_vec();
        left.remove(k);
        best = best.min(c[u][v] + all_pairings(&left, c));
    }
    best
}

#[test]
fn matching_equals_full_enumeration_on_random_8x8() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let metric = random_plane(&mut rng, 8, 10.0);
        let c: Vec<Vec<f64>> = (0..8).map(|i| (0..8).map(|j| metric.distance(i, j)).collect()).collect();
        let (pairs, cost) = min_cost_perfect_matching(&c).unwrap();
        assert_eq!(pairs.len(), 4);
        assert!((cost - all_pairings(&(0..8).collect::<Vec<_>>(), &c)).abs() < TOL);
    }
}

#[test]
fn zero_delay_brute_force_is_plain_matching() {
    for seed in 0..20 {
        let shape = InstanceShape { m: 6, points: 6, side: 10.0, max_arrival: 3, slack: 2 };
        let base = random_size_based(&shape, seed);
        let inst = base.with_delay(DelayModel::SizeBased(vec![SizePhase { from: 0, costs: vec![Cost::ZERO] }])).unwrap();
        let d = inst.request_distances();
        let c: Vec<Vec<f64>> = (0..6).map(|i| (0..6).map(|j| d.get(i, j)).collect()).collect();
        let (_, cost) = min_cost_perfect_matching(&c).unwrap();
        assert!(brute_force_opt(&inst).unwrap().total.approx_eq(Cost::Finite(cost), TOL));
    }
}

#[test]
fn concave_brute_force_is_time_augmented_matching() {
    for seed in 0..10 {
        let f = if seed % 2 == 0 { ConcaveFn::sqrt() } else { ConcaveFn::log1p() };
        let shape = InstanceShape { m: 4, points: 4, side: 5.0, max_arrival: 4, slack: 3 };
        let inst = random_concave(&shape, f.clone(), seed);
        let r = inst.requests();
        let c: Vec<Vec<f64>> =
            (0..4).map(|u| (0..4).map(|v| concave_time_dist(inst.metric(), &r[u], &r[v], &f)).collect()).collect();
        let (_, cost) = min_cost_perfect_matching(&c).unwrap();
        let brute = brute_force_opt(&inst).unwrap();
        assert!(brute.total.approx_eq(Cost::Finite(cost), 1e-7), "seed {seed}: {} vs {cost}", brute.total);
    }
}

#[test]
fn earliest_time_search_matches_brute_force() {
    for seed in 0..60 {
        let m = [2, 4, 6][seed as usize % 3];
        let shape = InstanceShape { m, points: 3, side: 10.0, max_arrival: 4, slack: 3 };
        let inst = random_size_based(&shape, seed);
        let a = brute_force_opt(&inst).unwrap().total;
        let b = earliest_time_opt(&inst).unwrap().total;
        assert!(a.approx_eq(b, TOL), "seed {seed}: {a} vs {b}");
    }
}

#[test]
fn exhaustive_mts_matches_work_functions() {
    for seed in 0..40 {
        let (space, tasks) = random_mts(3, 3, seed);
        let a = exhaustive_mts_opt(&space, &tasks).unwrap();
        assert!(a.approx_eq(mts_opt(&space, &tasks).unwrap(), TOL));
    }
}

#[test]
fn brute_force_respects_deadline_pressure() {
    // Two far pairs; the deadline forces an early cross match or nothing.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let metric = random_plane(&mut rng, 4, 10.0);
    let requests: Vec<Request> = (0..4).map(|id| Request { id, point: id, arrival: rng.gen_range(0..2) }).collect();
    let mut requests = requests;
    requests.sort_by_key(|r| r.arrival);
    for (i, r) in requests.iter_mut().enumerate() {
        r.id = i;
    }
    let inst = Instance::new(metric, requests, DelayModel::SizeBased(vec![SizePhase::deadline(0, 4)]), 3).unwrap();
    let sol = brute_force_opt(&inst).unwrap();
    assert_eq!(sol.delay_cost, Cost::ZERO);
    assert_eq!(sol.edges.len(), 2);
}
