//! Price of anarchy and single-vertex removal.
//!
//! Link-bias reports are in reward units (higher is better), degree-game
//! reports in cost units (total deviation, lower is better); each report
//! carries its [`Orientation`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{strategies_from_costs, DegreeSequenceGame, Game, LinkBiasGame};
use crate::graph::{eigenvector_centrality, one_based, DegreeSequence, Graph};
use crate::solvers::{
    best_graph_degree_with, best_graph_link_bias, stable_graph_link_bias, worst_stable_degree_with,
    SolverOptions,
};

/// Power-iteration tolerance used for reported centralities.
pub const CENTRALITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Reward,
    Cost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoaMode {
    Ratio,
    Difference,
}

/// Ratio mode: `worst / best`, defined only for `best > 0`. Difference
/// mode: the gap between the two values, `|best - worst|`, which is
/// `best - worst` under rewards and `worst - best` under costs.
pub fn price_of_anarchy(worst_stable: f64, best: f64, mode: PoaMode) -> Result<f64> {
    match mode {
        PoaMode::Difference => Ok((best - worst_stable).abs()),
        PoaMode::Ratio if best > 0.0 => Ok(worst_stable / best),
        PoaMode::Ratio => Err(Error::UndefinedRatio { best }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnarchyReport {
    pub worst_stable_value: f64,
    pub best_value: f64,
    pub poa_difference: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poa_ratio: Option<f64>,
    pub orientation: Orientation,
    /// False if either underlying search ran out of budget.
    pub optimal: bool,
}

impl AnarchyReport {
    fn new(worst: f64, best: f64, orientation: Orientation, optimal: bool) -> Self {
        AnarchyReport {
            worst_stable_value: worst,
            best_value: best,
            poa_difference: price_of_anarchy(worst, best, PoaMode::Difference)
                .expect("difference is always defined"),
            poa_ratio: price_of_anarchy(worst, best, PoaMode::Ratio).ok(),
            orientation,
            optimal,
        }
    }
}

pub fn anarchy_report_link_bias(game: &LinkBiasGame) -> AnarchyReport {
    let worst = stable_graph_link_bias(game);
    let best = best_graph_link_bias(game);
    AnarchyReport::new(worst.objective, best.objective, Orientation::Reward, true)
}

pub fn anarchy_report_degree(d: &DegreeSequence) -> AnarchyReport {
    anarchy_report_degree_with(d, &SolverOptions::default())
}

pub fn anarchy_report_degree_with(d: &DegreeSequence, opts: &SolverOptions) -> AnarchyReport {
    let worst = worst_stable_degree_with(d, opts);
    let best = best_graph_degree_with(d, opts);
    AnarchyReport::new(
        worst.objective,
        best.objective,
        Orientation::Cost,
        worst.optimal && best.optimal,
    )
}

pub fn anarchy_report(game: &Game, opts: &SolverOptions) -> AnarchyReport {
    match game {
        Game::Degree(g) => anarchy_report_degree_with(g.targets(), opts),
        Game::LinkBias(g) => anarchy_report_link_bias(g),
    }
}

/// Reward lost when player `i` and its stable links disappear:
/// `-sum_j s_ij s_ji (c_ij + c_ji)`.
pub fn communal_utility_change(game: &LinkBiasGame, i: usize) -> Result<f64> {
    let n = game.player_count();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    let s = strategies_from_costs(game);
    Ok((0..n)
        .filter(|&j| j != i && s.wants(i, j) && s.wants(j, i))
        .map(|j| -(game.cost(i, j) + game.cost(j, i)))
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhatIfResult {
    #[serde(with = "one_based")]
    pub removed: usize,
    pub report_before: AnarchyReport,
    pub report_after: AnarchyReport,
    /// Original ratio minus new ratio; negative when removal made the network
    /// relatively more efficient. Absent if either ratio is undefined.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_poa_ratio: Option<f64>,
    pub communal_utility_change: f64,
    /// Degree in the original worst stable graph.
    pub degree: usize,
    /// Eigenvector centrality in the original worst stable graph.
    pub eig_centrality: f64,
}

/// What the removal rows share: the original report and stable graph.
struct Baseline {
    report: AnarchyReport,
    stable: Graph,
    centrality: Vec<f64>,
}

impl Baseline {
    fn new(report: AnarchyReport, stable: Graph) -> Self {
        let centrality = eigenvector_centrality(&stable, CENTRALITY_TOLERANCE).scores;
        Baseline {
            report,
            stable,
            centrality,
        }
    }

    fn row(&self, i: usize, after: AnarchyReport, change: f64) -> WhatIfResult {
        let delta = self
            .report
            .poa_ratio
            .zip(after.poa_ratio)
            .map(|(before, now)| before - now);
        WhatIfResult {
            removed: i,
            report_before: self.report.clone(),
            report_after: after,
            delta_poa_ratio: delta,
            communal_utility_change: change,
            degree: self.stable.degree(i),
            eig_centrality: self.centrality[i],
        }
    }
}

fn check_removable(i: usize, n: usize) -> Result<()> {
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    if n < 2 {
        return Err(Error::TooFewPlayers(n));
    }
    Ok(())
}

fn link_bias_baseline(game: &LinkBiasGame) -> Baseline {
    Baseline::new(
        anarchy_report_link_bias(game),
        stable_graph_link_bias(game).graph,
    )
}

fn link_bias_row(game: &LinkBiasGame, base: &Baseline, i: usize) -> Result<WhatIfResult> {
    let after = anarchy_report_link_bias(&game.without_player(i)?);
    Ok(base.row(i, after, communal_utility_change(game, i)?))
}

/// Deletes row and column `i` and re-solves the smaller game.
pub fn whatif_remove(game: &LinkBiasGame, i: usize) -> Result<WhatIfResult> {
    check_removable(i, game.player_count())?;
    link_bias_row(game, &link_bias_baseline(game), i)
}

/// One [`whatif_remove`] row per vertex, in vertex order.
pub fn summary_table(game: &LinkBiasGame) -> Result<Vec<WhatIfResult>> {
    let n = game.player_count();
    check_removable(0, n)?;
    let base = link_bias_baseline(game);
    (0..n)
        .into_par_iter()
        .map(|i| link_bias_row(game, &base, i))
        .collect()
}

fn degree_baseline(game: &DegreeSequenceGame, opts: &SolverOptions) -> Baseline {
    let d = game.targets();
    Baseline::new(
        anarchy_report_degree_with(d, opts),
        worst_stable_degree_with(d, opts).graph,
    )
}

fn degree_row(
    game: &DegreeSequenceGame,
    base: &Baseline,
    i: usize,
    opts: &SolverOptions,
) -> Result<WhatIfResult> {
    let smaller = game.without_player(i)?;
    let after = anarchy_report_degree_with(smaller.targets(), opts);
    // Costs: the change is how much worst-case deviation the removal saves.
    let change = base.report.worst_stable_value - after.worst_stable_value;
    Ok(base.row(i, after, change))
}

/// Degree-game removal: the other players keep their targets. The utility
/// change is the drop in worst stable total deviation.
pub fn whatif_remove_degree(
    game: &DegreeSequenceGame,
    i: usize,
    opts: &SolverOptions,
) -> Result<WhatIfResult> {
    check_removable(i, game.player_count())?;
    degree_row(game, &degree_baseline(game, opts), i, opts)
}

pub fn summary_table_degree(
    game: &DegreeSequenceGame,
    opts: &SolverOptions,
) -> Result<Vec<WhatIfResult>> {
    let n = game.player_count();
    check_removable(0, n)?;
    let base = degree_baseline(game, opts);
    (0..n)
        .into_par_iter()
        .map(|i| degree_row(game, &base, i, opts))
        .collect()
}

pub fn whatif(game: &Game, i: usize, opts: &SolverOptions) -> Result<WhatIfResult> {
    match game {
        Game::Degree(g) => whatif_remove_degree(g, i, opts),
        Game::LinkBias(g) => whatif_remove(g, i),
    }
}

pub fn summary(game: &Game, opts: &SolverOptions) -> Result<Vec<WhatIfResult>> {
    match game {
        Game::Degree(g) => summary_table_degree(g, opts),
        Game::LinkBias(g) => summary_table(g),
    }
}

/// Removed vertices not dominated when maximizing both the utility change
/// and the drop in ratio. Rows without a ratio change rank lowest on that
/// axis. Returned in vertex order.
pub fn pareto_targets(table: &[WhatIfResult]) -> Vec<usize> {
    let point = |r: &WhatIfResult| {
        (
            r.communal_utility_change,
            r.delta_poa_ratio.unwrap_or(f64::NEG_INFINITY),
        )
    };
    let dominates =
        |a: (f64, f64), b: (f64, f64)| a.0 >= b.0 && a.1 >= b.1 && (a.0 > b.0 || a.1 > b.1);
    let mut out: Vec<usize> = table
        .iter()
        .filter(|w| !table.iter().any(|v| dominates(point(v), point(w))))
        .map(|w| w.removed)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}
