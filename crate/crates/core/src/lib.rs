//! Network formation games among selfish players.
//!
//! Two games are modelled: the degree-sequence game, where each player wants
//! a particular number of links, and the link-bias game, where each player
//! has a per-partner cost for linking. For both the crate computes the worst
//! pairwise-stable graph and the best coordinated graph, the resulting price
//! of anarchy, and the effect of removing a single player.

pub mod anarchy;
pub mod error;
pub mod games;
pub mod graph;
pub mod io;
pub mod simulator;
pub mod solvers;

pub use anarchy::{AnarchyReport, Orientation, PoaMode, WhatIfResult};
pub use error::{Error, Result};
pub use games::{DegreeSequenceGame, Game, LinkBiasGame, StrategyMatrix};
pub use graph::{DegreeSequence, Graph, GraphBuilder};
pub use solvers::{SolveResult, SolverOptions};
