//! The computations behind each route, as pure functions of a game.

use serde::Serialize;
use serde_json::Value;

use netgame::anarchy::{anarchy_report, summary, whatif};
use netgame::io::{SimulationReport, SummaryReport};
use netgame::simulator::simulate_batch_with;
use netgame::solvers::{
    best_graph_degree_with, best_graph_link_bias, stable_graph_link_bias, worst_stable_degree_with,
    SolverOptions,
};
use netgame::Game;

use crate::error::ApiError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Stable,
    Best,
    Anarchy,
    Summary,
    /// 0-based vertex.
    WhatIf(usize),
    Simulate {
        runs: usize,
        seed: u64,
    },
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, ApiError> {
    serde_json::to_value(v).map_err(|e| ApiError::internal(e.to_string()))
}

pub fn compute(game: &Game, op: Op, opts: &SolverOptions) -> Result<Value, ApiError> {
    match (op, game) {
        (Op::Stable, Game::Degree(g)) => to_value(&worst_stable_degree_with(g.targets(), opts)),
        (Op::Stable, Game::LinkBias(g)) => to_value(&stable_graph_link_bias(g)),
        (Op::Best, Game::Degree(g)) => to_value(&best_graph_degree_with(g.targets(), opts)),
        (Op::Best, Game::LinkBias(g)) => to_value(&best_graph_link_bias(g)),
        (Op::Anarchy, g) => to_value(&anarchy_report(g, opts)),
        (Op::Summary, g) => to_value(&SummaryReport::new(summary(g, opts)?)),
        (Op::WhatIf(i), g) => to_value(&whatif(g, i, opts)?),
        (Op::Simulate { runs, seed }, Game::Degree(g)) => {
            let batch = simulate_batch_with(g.targets(), runs, seed, opts)?;
            to_value(&SimulationReport::new(batch)?)
        }
        (Op::Simulate { .. }, Game::LinkBias(_)) => Err(ApiError::conflict(
            "simulation is defined for degree games only",
        )),
    }
}

/// Rough seconds of work, used only to decide between answering inline and
/// queueing a job.
pub fn estimate_seconds(game: &Game, op: Op, opts: &SolverOptions) -> f64 {
    let n = game.player_count() as f64;
    let degree_solve = || {
        let pairs = n * (n - 1.0) / 2.0;
        // Searches are bounded by the budget; tiny games by their size.
        let nodes = (opts.node_budget as f64).min(2f64.powf(pairs));
        nodes * 1e-7
    };
    match (game, op) {
        (Game::LinkBias(_), Op::Summary) => n * n * n * 2e-8,
        (Game::LinkBias(_), _) => n * n * 2e-8,
        (Game::Degree(_), Op::Stable | Op::Best) => degree_solve(),
        (Game::Degree(_), Op::Anarchy | Op::WhatIf(_)) => 2.0 * degree_solve(),
        (Game::Degree(_), Op::Summary) => 2.0 * (n + 1.0) * degree_solve(),
        (Game::Degree(_), Op::Simulate { runs, .. }) => degree_solve() + runs as f64 * n * n * 5e-8,
    }
}
