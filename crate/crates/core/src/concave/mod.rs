//! Clairvoyant primal-dual algorithm for uniform concave delay.

pub mod audit;
pub mod dual;
pub mod solve;

pub use audit::{audit_dual, AuditReport};
pub use dual::{DualEvent, DualSet, DualSystem};
pub use solve::{solve_concave, solve_concave_audited, ConcaveRun, DualReport, DualReportSet, EdgeCost};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{Cost, TOL};
    use crate::delay::{ConcaveFn, DelayModel};
    use crate::instance::Instance;
    use crate::metric::{MetricSpace, Request, Time};
    use crate::pipeline::verify_solution;
    use crate::set::RequestSet;

    fn colocated(arrivals: &[Time], f: ConcaveFn, horizon: Time) -> Instance {
        let requests = arrivals.iter().enumerate().map(|(id, &arrival)| Request { id, point: 0, arrival }).collect();
        let metric = MetricSpace::from_matrix(vec!["a".into()], vec![vec![0.0]], false).unwrap();
        Instance::new(metric, requests, DelayModel::UniformConcave(f), horizon).unwrap()
    }

    #[test]
    fn req_growth_examples() {
        let mut sys = DualSystem::new(MetricSpace::uniform(1), ConcaveFn::sqrt());
        let mut ev = Vec::new();
        sys.arrive(Request { id: 0, point: 0, arrival: 0 }, &mut ev).unwrap();
        assert_eq!(sys.req_growth(0, 0).unwrap(), 0.0);
        sys.advance(1, &mut |_| {}).unwrap();
        assert!((sys.dual_load(0) - 1.0).abs() < TOL);
        assert!((sys.req_growth(0, 4).unwrap() - 1.0).abs() < TOL);
    }

    #[test]
    fn sqrt_example_matches_instantly() {
        let inst = colocated(&[0, 4], ConcaveFn::sqrt(), 10);
        let run = solve_concave_audited(&inst, true).unwrap();
        assert_eq!(run.solution.edges.len(), 1);
        assert_eq!(run.solution.edges[0].t, 4);
        assert!(run.solution.total.approx_eq(Cost::Finite(2.0), TOL));
        assert_eq!(run.solution.distance_cost, 0.0);
        assert!(run.audit_failures.is_empty());
        assert!(verify_solution(&run.solution, &inst).ok);
        assert!(run.report.dual_objective <= 2.0 + TOL);
    }

    #[test]
    fn simultaneous_pair_is_free() {
        let inst = colocated(&[3, 3], ConcaveFn::log1p(), 5);
        let (sol, _) = solve_concave(&inst).unwrap();
        assert_eq!(sol.edges[0].t, 3);
        assert_eq!(sol.total, Cost::ZERO);
    }

    #[test]
    fn even_merge_stops_growing() {
        // Points on a line: two close pairs far apart.
        let rows = vec![
            vec![0.0, 1.0, 10.0, 11.0],
            vec![1.0, 0.0, 9.0, 10.0],
            vec![10.0, 9.0, 0.0, 1.0],
            vec![11.0, 10.0, 1.0, 0.0],
        ];
        let metric = MetricSpace::from_matrix((0..4).map(|i| format!("p{i}")).collect(), rows, false).unwrap();
        let requests = (0..4).map(|id| Request { id, point: id, arrival: 0 }).collect();
        let inst = Instance::new(metric, requests, DelayModel::UniformConcave(ConcaveFn::identity()), 20).unwrap();
        let run = solve_concave_audited(&inst, true).unwrap();
        assert!(run.audit_failures.is_empty(), "{:?}", run.audit_failures);
        let pairs: Vec<(usize, usize)> = run.solution.edges.iter().map(|e| (e.a, e.b)).collect();
        assert_eq!(pairs, vec![(0, 1), (2, 3)]);
        // Each pair merges when its two unit moats meet: y = 0.5 each.
        assert!(run.report.sets.iter().all(|s| (s.y - 0.5).abs() < TOL));
        assert!(run.report.sets.iter().all(|s| s.members.len() == 1));
    }

    #[test]
    fn audit_detects_tampering() {
        let mut sys = DualSystem::new(MetricSpace::uniform(2), ConcaveFn::identity());
        let mut ev = Vec::new();
        sys.arrive(Request { id: 0, point: 0, arrival: 0 }, &mut ev).unwrap();
        sys.arrive(Request { id: 1, point: 1, arrival: 0 }, &mut ev).unwrap();
        assert!(audit_dual(&sys).ok);
        let mut tampered = sys.clone();
        tampered.force_dual(0, 5.0);
        let r = audit_dual(&tampered);
        assert!(!r.ok);
        assert!(r.violations[0].contains("edge (0,1)"));
        assert_eq!(sys.unmatched(), RequestSet::prefix(2));
    }

    #[test]
    fn long_quiet_period_fast_forwards() {
        let rows = vec![vec![0.0, 6.0], vec![6.0, 0.0]];
        let metric = MetricSpace::from_matrix(vec!["a".into(), "b".into()], rows, false).unwrap();
        let requests = (0..2).map(|id| Request { id, point: id, arrival: 0 }).collect();
        let inst = Instance::new(metric, requests, DelayModel::UniformConcave(ConcaveFn::log1p()), 100_000).unwrap();
        let (sol, rep) = solve_concave(&inst).unwrap();
        // Moats of ln(1+t) each must reach 3: t = e^3 - 1 ≈ 19.09, so t = 20.
        assert_eq!(sol.edges[0].t, 20);
        assert!(rep.dual_objective <= 6.0 + TOL);
    }
}
