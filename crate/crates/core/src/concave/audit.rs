//! Structural audit of a dual system.

use std::collections::VecDeque;

use serde::Serialize;

use crate::concave::dual::DualSystem;
use crate::cost::TOL;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

/// Checks dual feasibility and the structure of the marked forest. Every
/// matched pair must be joined by a marked path that crosses the boundary of
/// each positive-dual set at most twice.
pub fn audit_dual(sys: &DualSystem) -> AuditReport {
    let mut violations = Vec::new();
    let m = sys.requests().len();
    for u in 0..m {
        for v in u + 1..m {
            let load = sys.edge_load(u, v);
            let cap = sys.optcost(u, v);
            if load > cap + TOL {
                violations.push(format!("edge ({u},{v}): dual load {load} exceeds optcost {cap}"));
            }
        }
    }
    for (i, s) in sys.sets().iter().enumerate() {
        if s.y < -TOL {
            violations.push(format!("set {i} has negative dual {}", s.y));
        }
    }

    let mut adj = vec![Vec::new(); m];
    for &(u, v) in sys.marked_edges() {
        adj[u].push(v);
        adj[v].push(u);
    }
    // A forest has no more edges than vertices minus components.
    let mut comp = vec![usize::MAX; m];
    let mut components = 0;
    for r in 0..m {
        if comp[r] != usize::MAX {
            continue;
        }
        let mut queue = VecDeque::from([r]);
        comp[r] = components;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if comp[y] == usize::MAX {
                    comp[y] = components;
                    queue.push_back(y);
                }
            }
        }
        components += 1;
    }
    if sys.marked_edges().len() + components != m {
        violations.push("marked edges contain a cycle".into());
    }
    for (i, s) in sys.sets().iter().enumerate() {
        if !s.active {
            continue;
        }
        let ids = s.members.to_vec();
        if ids.iter().any(|&x| comp[x] != comp[ids[0]]) {
            violations.push(format!("marked edges do not span active set {i}"));
        }
        for &(u, v) in sys.marked_edges() {
            if s.members.contains(u) != s.members.contains(v) {
                violations.push(format!("marked edge ({u},{v}) crosses active set {i}"));
            }
        }
    }

    for e in sys.matching() {
        let Some(path) = forest_path(&adj, e.a, e.b) else {
            violations.push(format!("no marked path between matched ({},{})", e.a, e.b));
            continue;
        };
        for (i, s) in sys.sets().iter().enumerate() {
            if s.y <= TOL {
                continue;
            }
            let crossings = path
                .windows(2)
                .filter(|w| s.members.contains(w[0]) != s.members.contains(w[1]))
                .count();
            if crossings > 2 {
                violations.push(format!(
                    "path of matched ({},{}) crosses set {i} {crossings} times",
                    e.a, e.b
                ));
            }
        }
    }
    AuditReport { ok: violations.is_empty(), violations }
}

fn forest_path(adj: &[Vec<usize>], from: usize, to: usize) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; adj.len()];
    parent[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = parent[cur];
                path.push(cur);
            }
            return Some(path);
        }
        for &y in &adj[x] {
            if parent[y] == usize::MAX {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    None
}
