//! Exact optimization over graphs.
//!
//! The degree game needs real search: [`worst_stable_degree`] and
//! [`best_graph_degree`] are depth-first branch-and-bound over the edge
//! variables in lexicographic order. The link-bias problems collapse to
//! closed forms: with `s` fixed by the sign map, the stability constraints
//! `s_ij + s_ji - 1 <= x_ij <= min(s_ij, s_ji)` leave exactly one feasible
//! graph, and the coordinated optimum is separable per pair.

mod best;
mod brute;
mod worst;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::games::{
    communal_value, graph_from_strategies, strategies_from_costs, LinkBiasGame, StrategyMatrix,
};
use crate::graph::{DegreeSequence, Graph, GraphBuilder};

pub use best::{best_graph_degree, best_graph_degree_with};
pub use brute::{brute_force_best_graph, brute_force_worst_stable, BRUTE_FORCE_MAX_PLAYERS};
pub use worst::{worst_stable_degree, worst_stable_degree_with};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Branch-and-bound search budget, counted in search-tree nodes per call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    pub node_budget: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

/// Which optimization produced a [`SolveResult`]; fixes how `objective` is
/// read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    /// Maximize total deficit over pairwise-stable graphs (cost, higher is worse).
    WorstStableDegree,
    /// Minimize `sum |degree - target|` over all graphs (cost).
    BestDegree,
    /// The unique stable link-bias graph (communal reward).
    StableLinkBias,
    /// Maximize communal reward over all graphs.
    BestLinkBias,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub problem: Problem,
    pub graph: Graph,
    pub objective: f64,
    /// False only when a search budget ran out before optimality was proven.
    pub optimal: bool,
    pub nodes_explored: u64,
    /// Per-player slack `d_i - degree_i` (degree game only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deficits: Option<Vec<usize>>,
}

pub(crate) fn total_deviation(d: &[usize], g: &Graph) -> usize {
    (0..d.len()).map(|i| g.degree(i).abs_diff(d[i])).sum()
}

pub(crate) fn deficits(d: &[usize], g: &Graph) -> Vec<usize> {
    (0..d.len())
        .map(|i| d[i].saturating_sub(g.degree(i)))
        .collect()
}

/// The stable graph of a link-bias game: `x_ij = 1` iff `c_ij < 0` and
/// `c_ji < 0`. Under the sign map this is the only stable graph, so it is
/// also the worst one.
pub fn stable_graph_link_bias(game: &LinkBiasGame) -> SolveResult {
    let graph = graph_from_strategies(&strategies_from_costs(game));
    link_bias_result(game, graph, Problem::StableLinkBias)
}

/// Coordinated optimum: `x_ij = 1` iff `c_ij + c_ji < 0`. A zero pair sum
/// leaves the edge out.
pub fn best_graph_link_bias(game: &LinkBiasGame) -> SolveResult {
    let n = game.player_count();
    let mut b = GraphBuilder::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if game.cost(i, j) + game.cost(j, i) < 0.0 {
                b.set(i, j, true);
            }
        }
    }
    link_bias_result(game, b.build(), Problem::BestLinkBias)
}

fn link_bias_result(game: &LinkBiasGame, graph: Graph, problem: Problem) -> SolveResult {
    let payoffs = game
        .payoffs(&graph)
        .expect("graph built with the game's player count");
    SolveResult {
        problem,
        objective: communal_value(&payoffs),
        graph,
        optimal: true,
        nodes_explored: 0,
        deficits: None,
    }
}

/// A link-bias game whose unique stable graph sits at minimal l1 distance
/// from `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostConstruction {
    pub graph: Graph,
    pub strategies: StrategyMatrix,
    pub game: LinkBiasGame,
    /// `l1_distance(degree_sequence(graph), d)`.
    pub distance: usize,
    /// Whether the closest-graph search proved `distance` minimal.
    pub optimal: bool,
}

/// Builds a cost matrix hiding `d` in the players' link preferences.
///
/// Takes the closest graph `x` to `d`, sets `s = x` (which satisfies the
/// stability constraints with equality) and maps `s` to costs `-1`/`+1`.
/// No search over `s` is needed: any stable graph is some graph, so its
/// distance from `d` is at least the closest-graph optimum, which `x` attains.
pub fn construct_cost_matrix(d: &DegreeSequence) -> Result<CostConstruction> {
    construct_cost_matrix_with(d, &SolverOptions::default())
}

pub fn construct_cost_matrix_with(
    d: &DegreeSequence,
    opts: &SolverOptions,
) -> Result<CostConstruction> {
    let best = best_graph_degree_with(d, opts);
    let n = d.len();
    let mut strategies = StrategyMatrix::new(n);
    let mut costs = vec![vec![0.0; n]; n];
    for (i, row) in costs.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            if i == j {
                continue;
            }
            let linked = best.graph.has_edge(i, j);
            strategies.set(i, j, linked);
            *c = if linked { -1.0 } else { 1.0 };
        }
    }
    Ok(CostConstruction {
        distance: best.objective as usize,
        optimal: best.optimal,
        graph: best.graph,
        strategies,
        game: LinkBiasGame::new(costs)?,
    })
}
