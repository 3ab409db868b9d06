//! Decentralized link formation for the degree game.
//!
//! Starting from the empty graph, a pair that could still link (unlinked,
//! both below target) is drawn uniformly at random and linked, until no such
//! pair remains. The end state is always pairwise stable.
//!
//! Randomness is ChaCha8. A single run seeded with `s` uses stream 0 of the
//! generator keyed by `s`; run `r` of a batch with master seed `s` uses stream
//! `r` of the same key, so run 0 of a batch equals a single run with seed `s`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DegreeSequence, Graph, GraphBuilder};
use crate::solvers::{best_graph_degree_with, SolverOptions};

/// Pairs that may still link, with O(1) removal by swap.
struct PotentialLinks {
    n: usize,
    pairs: Vec<(u32, u32)>,
    /// Position of pair `(i, j)`, `i < j`, in `pairs`; `usize::MAX` if absent.
    slot: Vec<usize>,
}

impl PotentialLinks {
    fn new(d: &[usize]) -> Self {
        let n = d.len();
        let mut links = PotentialLinks {
            n,
            pairs: Vec::new(),
            slot: vec![usize::MAX; n * n],
        };
        for i in 0..n {
            for j in i + 1..n {
                if d[i] > 0 && d[j] > 0 {
                    links.slot[i * n + j] = links.pairs.len();
                    links.pairs.push((i as u32, j as u32));
                }
            }
        }
        links
    }

    fn remove(&mut self, i: usize, j: usize) {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let at = std::mem::replace(&mut self.slot[i * self.n + j], usize::MAX);
        if at == usize::MAX {
            return;
        }
        self.pairs.swap_remove(at);
        if let Some(&(a, b)) = self.pairs.get(at) {
            self.slot[a as usize * self.n + b as usize] = at;
        }
    }

    fn clear_vertex(&mut self, i: usize) {
        for j in 0..self.n {
            if j != i {
                self.remove(i, j);
            }
        }
    }
}

fn run(d: &[usize], rng: &mut ChaCha8Rng) -> Graph {
    let n = d.len();
    let mut links = PotentialLinks::new(d);
    let mut eta = vec![0usize; n];
    let mut b = GraphBuilder::new(n);
    while !links.pairs.is_empty() {
        // Sample in u64 so the draw does not depend on the platform word size.
        let k = rng.random_range(0..links.pairs.len() as u64) as usize;
        let (i, j) = links.pairs[k];
        let (i, j) = (i as usize, j as usize);
        b.set(i, j, true);
        links.remove(i, j);
        for v in [i, j] {
            eta[v] += 1;
            if eta[v] == d[v] {
                links.clear_vertex(v);
            }
        }
    }
    b.build()
}

fn run_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn simulate_once(d: &DegreeSequence, seed: u64) -> Graph {
    run(d, &mut run_rng(seed, 0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub degrees: Vec<usize>,
    /// Total deviation of the realized graph minus the best objective.
    pub poa: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationBatch {
    pub targets: DegreeSequence,
    pub master_seed: u64,
    pub best_objective: u64,
    /// Whether `best_objective` is proven minimal.
    pub best_optimal: bool,
    pub runs: Vec<RunRecord>,
}

pub fn simulate_batch(
    d: &DegreeSequence,
    runs: usize,
    master_seed: u64,
) -> Result<SimulationBatch> {
    simulate_batch_with(d, runs, master_seed, &SolverOptions::default())
}

pub fn simulate_batch_with(
    d: &DegreeSequence,
    runs: usize,
    master_seed: u64,
    opts: &SolverOptions,
) -> Result<SimulationBatch> {
    if runs == 0 {
        return Err(Error::EmptyBatch);
    }
    let best = best_graph_degree_with(d, opts);
    let best_objective = best.objective as u64;
    let records = (0..runs as u64)
        .into_par_iter()
        .map(|r| {
            let g = run(d, &mut run_rng(master_seed, r));
            let degrees = g.degree_sequence().into_inner();
            let deviation: usize = degrees.iter().zip(d.iter()).map(|(&e, &t)| t - e).sum();
            RunRecord {
                degrees,
                poa: deviation as i64 - best_objective as i64,
            }
        })
        .collect();
    Ok(SimulationBatch {
        targets: d.clone(),
        master_seed,
        best_objective,
        best_optimal: best.optimal,
        runs: records,
    })
}

/// Nearest-rank quantiles: the `p` quantile of `N` sorted values is the one
/// at rank `ceil(p N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: i64,
    pub p10: i64,
    pub p25: i64,
    pub median: i64,
    pub p75: i64,
    pub p90: i64,
    pub p95: i64,
    pub max: i64,
}

impl Quantiles {
    pub const LABELS: [&'static str; 8] =
        ["min", "p10", "p25", "median", "p75", "p90", "p95", "max"];

    /// Panics on an empty slice.
    pub fn of(values: &[i64]) -> Self {
        let mut v = values.to_vec();
        v.sort_unstable();
        let n = v.len();
        let at = |pct: usize| v[(pct * n).div_ceil(100).max(1) - 1];
        Quantiles {
            min: v[0],
            p10: at(10),
            p25: at(25),
            median: at(50),
            p75: at(75),
            p90: at(90),
            p95: at(95),
            max: v[n - 1],
        }
    }

    pub fn values(&self) -> [i64; 8] {
        [
            self.min,
            self.p10,
            self.p25,
            self.median,
            self.p75,
            self.p90,
            self.p95,
            self.max,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeRow {
    pub degree: usize,
    /// Distribution over runs of how many players end at `degree`.
    pub count: Quantiles,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeficitRow {
    pub target: usize,
    /// Distribution over runs of the summed shortfall of players with this
    /// target.
    pub deficit: Quantiles,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchStatistics {
    pub runs: usize,
    pub degree_counts: Vec<DegreeRow>,
    pub poa_histogram: BTreeMap<i64, usize>,
    pub deficit_by_target: Vec<DeficitRow>,
}

pub fn batch_statistics(batch: &SimulationBatch) -> Result<BatchStatistics> {
    if batch.runs.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let d = &batch.targets;
    for r in &batch.runs {
        if r.degrees.len() != d.len() {
            return Err(Error::LengthMismatch {
                expected: d.len(),
                actual: r.degrees.len(),
            });
        }
    }
    let max_degree = d
        .iter()
        .chain(batch.runs.iter().flat_map(|r| r.degrees.iter()))
        .copied()
        .max()
        .unwrap_or(0);
    let degree_counts = (0..=max_degree)
        .map(|k| {
            let counts: Vec<i64> = batch
                .runs
                .iter()
                .map(|r| r.degrees.iter().filter(|&&e| e == k).count() as i64)
                .collect();
            DegreeRow {
                degree: k,
                count: Quantiles::of(&counts),
            }
        })
        .collect();

    let mut targets: Vec<usize> = d.to_vec();
    targets.sort_unstable();
    targets.dedup();
    let deficit_by_target = targets
        .into_iter()
        .map(|t| {
            let sums: Vec<i64> = batch
                .runs
                .iter()
                .map(|r| {
                    (0..d.len())
                        .filter(|&i| d[i] == t)
                        .map(|i| d[i].saturating_sub(r.degrees[i]) as i64)
                        .sum()
                })
                .collect();
            DeficitRow {
                target: t,
                deficit: Quantiles::of(&sums),
            }
        })
        .collect();

    let mut poa_histogram = BTreeMap::new();
    for r in &batch.runs {
        *poa_histogram.entry(r.poa).or_insert(0) += 1;
    }
    Ok(BatchStatistics {
        runs: batch.runs.len(),
        degree_counts,
        poa_histogram,
        deficit_by_target,
    })
}
