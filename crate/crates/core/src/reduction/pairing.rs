//! Exact minimum-cost perfect pairing on small vertex sets.

use crate::cost::TOL;
use crate::error::ReductionError;

/// Largest vertex count handled by the exact pairing solver.
pub const PAIRING_LIMIT: usize = 20;

/// Sizes up to this use plain enumeration; above it, subset DP.
const ENUMERATION_LIMIT: usize = 8;

/// Minimum-cost perfect pairing of `0..k`.
///
/// Pairs come back as `(i, j)` with `i < j`, sorted by `i`. Among pairings
/// within `TOL` of the optimum the lexicographically first is returned.
pub fn min_cost_pairing(
    k: usize,
    cost: impl Fn(usize, usize) -> f64,
) -> Result<(f64, Vec<(usize, usize)>), ReductionError> {
    assert!(k % 2 == 0, "pairing needs an even vertex count");
    if k > PAIRING_LIMIT {
        return Err(ReductionError::PairingTooLarge(k, PAIRING_LIMIT));
    }
    if k <= ENUMERATION_LIMIT {
        Ok(enumerate(k, &cost))
    } else {
        Ok(subset_dp(k, &cost))
    }
}

fn enumerate(k: usize, cost: &impl Fn(usize, usize) -> f64) -> (f64, Vec<(usize, usize)>) {
    fn rec(
        free: u32,
        acc: f64,
        cur: &mut Vec<(usize, usize)>,
        best: &mut (f64, Vec<(usize, usize)>),
        cost: &impl Fn(usize, usize) -> f64,
    ) {
        if free == 0 {
            if acc < best.0 - TOL || best.1.is_empty() && acc <= best.0 {
                *best = (acc, cur.clone());
            }
            return;
        }
        let i = free.trailing_zeros() as usize;
        let mut rest = free & !(1 << i);
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let c = acc + cost(i, j);
            if c < best.0 - TOL || best.1.is_empty() {
                cur.push((i, j));
                rec(free & !(1 << i) & !(1 << j), c, cur, best, cost);
                cur.pop();
            }
        }
    }
    if k == 0 {
        return (0.0, Vec::new());
    }
    let mut best = (f64::INFINITY, Vec::new());
    rec((1u32 << k) - 1, 0.0, &mut Vec::new(), &mut best, cost);
    best
}

fn subset_dp(k: usize, cost: &impl Fn(usize, usize) -> f64) -> (f64, Vec<(usize, usize)>) {
    let full = (1usize << k) - 1;
    let mut dp = vec![f64::INFINITY; 1 << k];
    dp[0] = 0.0;
    for mask in 1..=full {
        if mask.count_ones() % 2 == 1 {
            continue;
        }
        let i = mask.trailing_zeros() as usize;
        let mut rest = mask & !(1 << i);
        let mut best = f64::INFINITY;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            best = best.min(cost(i, j) + dp[mask & !(1 << i) & !(1 << j)]);
        }
        dp[mask] = best;
    }
    let mut pairs = Vec::with_capacity(k / 2);
    let mut mask = full;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        let mut rest = mask & !(1 << i);
        let mut chosen = None;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let sub = mask & !(1 << i) & !(1 << j);
            if cost(i, j) + dp[sub] <= dp[mask] + TOL {
                chosen = Some((j, sub));
                break;
            }
        }
        let (j, sub) = chosen.expect("some partner exists");
        pairs.push((i, j));
        mask = sub;
    }
    (dp[full], pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(k: usize, seed: u64) -> Vec<f64> {
        let mut x = seed;
        (0..k * k)
            .map(|_| {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((x >> 33) % 1000) as f64 / 10.0
            })
            .collect()
    }

    #[test]
    fn dominant_structure() {
        let c = |i: usize, j: usize| match (i.min(j), i.max(j)) {
            (0, 1) | (2, 3) => 1.0,
            _ => 10.0,
        };
        let (v, p) = min_cost_pairing(4, c).unwrap();
        assert_eq!(v, 2.0);
        assert_eq!(p, vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn ties_prefer_lexicographic() {
        let (v, p) = min_cost_pairing(4, |_, _| 1.0).unwrap();
        assert_eq!(v, 2.0);
        assert_eq!(p, vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn dp_matches_enumeration() {
        for seed in 0..20 {
            for k in [2, 4, 6, 8] {
                let t = table(k, seed);
                let c = |i: usize, j: usize| t[i.min(j) * k + i.max(j)];
                let (a, _) = enumerate(k, &c);
                let (b, pairs) = subset_dp(k, &c);
                assert!((a - b).abs() < 1e-9);
                let total: f64 = pairs.iter().map(|&(i, j)| c(i, j)).sum();
                assert!((total - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn large_uses_dp_and_limit() {
        let t = table(12, 7);
        let c = |i: usize, j: usize| t[i.min(j) * 12 + i.max(j)];
        let (v, pairs) = min_cost_pairing(12, c).unwrap();
        assert_eq!(pairs.len(), 6);
        assert!(v.is_finite());
        assert!(min_cost_pairing(22, |_, _| 1.0).is_err());
    }
}
