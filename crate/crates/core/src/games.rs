//! The two network formation games and their stability predicates.
//!
//! In both games a link forms only when both endpoints want it, so either
//! player can veto. Payoffs are `f64` throughout even though the degree game
//! only produces integers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DegreeSequence, Graph, GraphBuilder};

/// Each player pays `|degree - target|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreeSequenceGame {
    targets: DegreeSequence,
}

impl DegreeSequenceGame {
    pub fn new(targets: impl Into<DegreeSequence>) -> Self {
        DegreeSequenceGame {
            targets: targets.into(),
        }
    }

    pub fn player_count(&self) -> usize {
        self.targets.len()
    }

    pub fn targets(&self) -> &DegreeSequence {
        &self.targets
    }

    /// Drops player `i`; everyone else keeps their target.
    pub fn without_player(&self, i: usize) -> Result<Self> {
        Ok(DegreeSequenceGame {
            targets: self.targets.without(i)?,
        })
    }

    pub fn payoffs(&self, g: &Graph) -> Result<Vec<f64>> {
        self.check_size(g)?;
        Ok((0..self.player_count())
            .map(|i| -(g.degree(i).abs_diff(self.targets[i]) as f64))
            .collect())
    }

    fn check_size(&self, g: &Graph) -> Result<()> {
        if g.node_count() != self.player_count() {
            return Err(Error::LengthMismatch {
                expected: self.player_count(),
                actual: g.node_count(),
            });
        }
        Ok(())
    }
}

/// Player `i` pays `c[i][j]` for every incident link `ij`; negative entries
/// are benefits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct LinkBiasGame {
    costs: Vec<Vec<f64>>,
}

impl LinkBiasGame {
    /// Validates that `costs` is square with a zero diagonal and finite entries.
    pub fn new(costs: Vec<Vec<f64>>) -> Result<Self> {
        let n = costs.len();
        for (i, row) in costs.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    row: i,
                    len: row.len(),
                    n,
                });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::Document(format!("cost c[{i}][{j}] is not finite")));
            }
            if row[i] != 0.0 {
                return Err(Error::NonzeroDiagonal(i));
            }
        }
        Ok(LinkBiasGame { costs })
    }

    pub fn player_count(&self) -> usize {
        self.costs.len()
    }

    #[inline]
    pub fn cost(&self, i: usize, j: usize) -> f64 {
        self.costs[i][j]
    }

    pub fn costs(&self) -> &[Vec<f64>] {
        &self.costs
    }

    /// Deletes row and column `i`.
    pub fn without_player(&self, i: usize) -> Result<Self> {
        let n = self.player_count();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        let costs = self
            .costs
            .iter()
            .enumerate()
            .filter(|&(r, _)| r != i)
            .map(|(_, row)| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != i)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect();
        Ok(LinkBiasGame { costs })
    }

    pub fn payoffs(&self, g: &Graph) -> Result<Vec<f64>> {
        self.check_size(g)?;
        Ok((0..self.player_count())
            .map(|i| -g.neighbors(i).map(|j| self.costs[i][j]).sum::<f64>())
            .collect())
    }

    fn check_size(&self, g: &Graph) -> Result<()> {
        if g.node_count() != self.player_count() {
            return Err(Error::LengthMismatch {
                expected: self.player_count(),
                actual: g.node_count(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<Vec<f64>>> for LinkBiasGame {
    type Error = Error;

    fn try_from(costs: Vec<Vec<f64>>) -> Result<Self> {
        LinkBiasGame::new(costs)
    }
}

impl From<LinkBiasGame> for Vec<Vec<f64>> {
    fn from(game: LinkBiasGame) -> Self {
        game.costs
    }
}

/// Either kind of game, as loaded from a document.
#[derive(Debug, Clone, PartialEq)]
pub enum Game {
    Degree(DegreeSequenceGame),
    LinkBias(LinkBiasGame),
}

impl Game {
    pub fn player_count(&self) -> usize {
        match self {
            Game::Degree(g) => g.player_count(),
            Game::LinkBias(g) => g.player_count(),
        }
    }

    pub fn without_player(&self, i: usize) -> Result<Self> {
        Ok(match self {
            Game::Degree(g) => Game::Degree(g.without_player(i)?),
            Game::LinkBias(g) => Game::LinkBias(g.without_player(i)?),
        })
    }
}

/// `s[i][j]` is true when player `i` wants link `ij`. Not necessarily
/// symmetric.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StrategyMatrix {
    n: usize,
    wants: Vec<bool>,
}

impl StrategyMatrix {
    pub fn new(n: usize) -> Self {
        StrategyMatrix {
            n,
            wants: vec![false; n * n],
        }
    }

    pub fn player_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn wants(&self, i: usize, j: usize) -> bool {
        self.wants[i * self.n + j]
    }

    /// Panics on diagonal entries; a player never links to itself.
    pub fn set(&mut self, i: usize, j: usize, want: bool) {
        assert_ne!(i, j, "strategy diagonal must stay zero");
        self.wants[i * self.n + j] = want;
    }

    pub fn to_matrix(&self) -> Vec<Vec<u8>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.wants(i, j) as u8).collect())
            .collect()
    }
}

/// `s[i][j] = 1` iff `c[i][j] < 0`. Zero cost maps to "no link": a link
/// nobody gains from is never formed.
pub fn strategies_from_costs(game: &LinkBiasGame) -> StrategyMatrix {
    let n = game.player_count();
    let mut s = StrategyMatrix::new(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && game.cost(i, j) < 0.0 {
                s.set(i, j, true);
            }
        }
    }
    s
}

/// Links form exactly where both players want them.
pub fn graph_from_strategies(s: &StrategyMatrix) -> Graph {
    let n = s.player_count();
    let mut b = GraphBuilder::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if s.wants(i, j) && s.wants(j, i) {
                b.set(i, j, true);
            }
        }
    }
    b.build()
}

pub fn payoff_degree(game: &DegreeSequenceGame, g: &Graph, i: usize) -> Result<f64> {
    game.check_size(g)?;
    let n = game.player_count();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    Ok(-(g.degree(i).abs_diff(game.targets[i]) as f64))
}

pub fn payoff_link_bias(game: &LinkBiasGame, g: &Graph, i: usize) -> Result<f64> {
    game.check_size(g)?;
    let n = game.player_count();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    Ok(-g.neighbors(i).map(|j| game.cost(i, j)).sum::<f64>())
}

/// Balanced value: the communal value is the sum of the allocations.
pub fn communal_value(payoffs: &[f64]) -> f64 {
    payoffs.iter().sum()
}

/// Stability under absolute-deviation costs: nobody above target, and no two
/// players below target left unlinked.
pub fn is_pairwise_stable_degree(game: &DegreeSequenceGame, g: &Graph) -> Result<bool> {
    game.check_size(g)?;
    let d = game.targets();
    let degrees = g.degree_sequence();
    if degrees.iter().zip(d.iter()).any(|(eta, di)| eta > di) {
        return Ok(false);
    }
    let deficient: Vec<usize> = (0..d.len()).filter(|&i| degrees[i] < d[i]).collect();
    for (a, &i) in deficient.iter().enumerate() {
        for &j in &deficient[a + 1..] {
            if !g.has_edge(i, j) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Every existing link benefits both ends, and no absent link would.
pub fn is_pairwise_stable_link_bias(game: &LinkBiasGame, g: &Graph) -> Result<bool> {
    game.check_size(g)?;
    let n = game.player_count();
    for i in 0..n {
        for j in i + 1..n {
            let mutual = game.cost(i, j) < 0.0 && game.cost(j, i) < 0.0;
            if g.has_edge(i, j) != mutual {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
