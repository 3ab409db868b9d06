//! Exhaustive oracles for the degree-game solvers.
//!
//! Both walk all `2^(n(n-1)/2)` graphs in Gray-code order, flipping one edge
//! per step and updating degrees incrementally. They share nothing with the
//! branch-and-bound code beyond the graph type.

use super::{deficits, total_deviation, Problem, SolveResult};
use crate::error::{Error, Result};
use crate::graph::{DegreeSequence, Graph, GraphBuilder};

pub const BRUTE_FORCE_MAX_PLAYERS: usize = 8;

/// Worst stable graph by enumeration: keep graphs with no player above
/// target whose deficient players are pairwise linked, maximize total
/// deficit.
pub fn brute_force_worst_stable(d: &DegreeSequence) -> Result<SolveResult> {
    let (graph, value, count) = enumerate(d, |eta, adj| {
        let mut deficient = 0u32;
        let mut value = 0i64;
        for (i, (&e, &t)) in eta.iter().zip(d.iter()).enumerate() {
            if e > t {
                return None;
            }
            if e < t {
                deficient |= 1 << i;
                value += (t - e) as i64;
            }
        }
        let mut rest = deficient;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if (adj[i] | 1 << i) & deficient != deficient {
                return None;
            }
        }
        Some(value)
    })?;
    let graph = graph.expect("some maximal graph is always stable");
    debug_assert_eq!(deficits(d, &graph).iter().sum::<usize>() as i64, value);
    Ok(SolveResult {
        problem: Problem::WorstStableDegree,
        deficits: Some(deficits(d, &graph)),
        graph,
        objective: value as f64,
        optimal: true,
        nodes_explored: count,
    })
}

/// Closest graph by enumeration over every graph, over-target degrees
/// included.
pub fn brute_force_best_graph(d: &DegreeSequence) -> Result<SolveResult> {
    let (graph, value, count) = enumerate(d, |eta, _| {
        Some(
            -eta.iter()
                .zip(d.iter())
                .map(|(&e, &t)| e.abs_diff(t) as i64)
                .sum::<i64>(),
        )
    })?;
    let graph = graph.expect("every graph is feasible");
    debug_assert_eq!(total_deviation(d, &graph) as i64, -value);
    Ok(SolveResult {
        problem: Problem::BestDegree,
        deficits: Some(deficits(d, &graph)),
        graph,
        objective: -value as f64,
        optimal: true,
        nodes_explored: count,
    })
}

/// Maximizes `score` over all graphs. Ties go to the lexicographically
/// smallest edge vector (edges in `(i, j)` order, absent before present).
fn enumerate<F>(d: &[usize], score: F) -> Result<(Option<Graph>, i64, u64)>
where
    F: Fn(&[usize], &[u32]) -> Option<i64>,
{
    let n = d.len();
    if n > BRUTE_FORCE_MAX_PLAYERS {
        return Err(Error::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_PLAYERS,
        });
    }
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let m = edges.len();
    // Bit b of a Gray code holds edge m-1-b, so numeric order on codes is
    // lexicographic order on edge vectors.
    let edge_of_bit = |b: usize| edges[m - 1 - b];

    let mut eta = vec![0usize; n];
    let mut adj = vec![0u32; n];
    let mut best: Option<(i64, u64)> = None;
    let total: u64 = 1 << m;
    for k in 0..total {
        let code = k ^ (k >> 1);
        if k > 0 {
            let flipped = (k.trailing_zeros()) as usize;
            let (i, j) = edge_of_bit(flipped);
            if code >> flipped & 1 == 1 {
                eta[i] += 1;
                eta[j] += 1;
            } else {
                eta[i] -= 1;
                eta[j] -= 1;
            }
            adj[i] ^= 1 << j;
            adj[j] ^= 1 << i;
        }
        if let Some(v) = score(&eta, &adj) {
            let better = match best {
                None => true,
                Some((bv, bc)) => v > bv || (v == bv && code < bc),
            };
            if better {
                best = Some((v, code));
            }
        }
    }
    Ok(match best {
        None => (None, 0, total),
        Some((value, code)) => {
            let mut b = GraphBuilder::new(n);
            for bit in 0..m {
                if code >> bit & 1 == 1 {
                    let (i, j) = edge_of_bit(bit);
                    b.set(i, j, true);
                }
            }
            (Some(b.build()), value, total)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worst(d: &[usize]) -> f64 {
        brute_force_worst_stable(&d.to_vec().into())
            .unwrap()
            .objective
    }

    fn best(d: &[usize]) -> f64 {
        brute_force_best_graph(&d.to_vec().into())
            .unwrap()
            .objective
    }

    #[test]
    fn worst_examples() {
        assert_eq!(worst(&[1, 1, 1]), 1.0);
        assert_eq!(worst(&[0, 0]), 0.0);
        // A triangle plus an isolated fourth player is stable: the lone
        // deficient player needs nobody to link to it.
        assert_eq!(worst(&[2, 2, 2, 2]), 2.0);
    }

    #[test]
    fn best_examples() {
        assert_eq!(best(&[1, 1]), 0.0);
        assert_eq!(best(&[3, 3, 3]), 3.0);
        assert_eq!(best(&[1, 0]), 1.0);
        assert_eq!(best(&[3, 1, 1]), 1.0);
    }

    #[test]
    fn ties_prefer_lexicographically_smallest() {
        // Both single edges of a path are optimal for (1, 1, 1); the
        // lexicographically smaller vector leaves (0,1) out.
        let r = brute_force_best_graph(&vec![1, 1, 1].into()).unwrap();
        assert_eq!(r.graph.edges().collect::<Vec<_>>(), vec![(1, 2)]);
    }

    #[test]
    fn rejects_large_inputs() {
        assert_eq!(
            brute_force_worst_stable(&vec![1; 9].into()).unwrap_err(),
            Error::TooLarge { n: 9, max: 8 }
        );
        assert!(brute_force_best_graph(&vec![1; 9].into()).is_err());
    }
}
