use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("player index {index} out of range for {n} players")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),

    #[error("degree sequence is not graphical")]
    NotGraphical,

    #[error("brute force supports at most {max} players, got {n}")]
    TooLarge { n: usize, max: usize },

    #[error(
        "ratio price of anarchy is undefined when the best value is {best}; use difference mode"
    )]
    UndefinedRatio { best: f64 },

    #[error("cannot remove a vertex from a game with {0} player(s)")]
    TooFewPlayers(usize),

    #[error("simulation batch contains no runs")]
    EmptyBatch,

    #[error("cost matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },

    #[error("nonzero diagonal entry c[{0}][{0}]")]
    NonzeroDiagonal(usize),

    #[error("invalid document: {0}")]
    Document(String),
}
