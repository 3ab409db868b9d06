//! Simple undirected graphs, degree sequences and the vertex metrics shared
//! by the solvers and the what-if analysis.
//!
//! A [`Graph`] is stored as a dense symmetric bit matrix. Games in this crate
//! are desk-scale (tens to a few hundred players), so every row fits in a
//! handful of machine words and degree/neighbourhood queries are cheap.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

/// Symmetric 0/1 adjacency matrix with an empty diagonal.
///
/// Values are immutable once built; use [`GraphBuilder`] (or
/// [`Graph::to_builder`]) to derive modified copies.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(WORD).max(1);
        Graph {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut b = GraphBuilder::new(n);
        for i in 0..n {
            for j in i + 1..n {
                b.set(i, j, true);
            }
        }
        b.build()
    }

    /// Builds a graph from 0-based endpoint pairs. Duplicate edges collapse.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut b = GraphBuilder::new(n);
        for (i, j) in edges {
            b.add_edge(i, j)?;
        }
        Ok(b.build())
    }

    /// Builds a graph from a square 0/1 matrix, rejecting asymmetric or
    /// non-binary input and self-loops.
    pub fn from_matrix(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        let mut b = GraphBuilder::new(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    row: i,
                    len: row.len(),
                    n,
                });
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 if i == j => return Err(Error::SelfLoop(i)),
                    1 => {
                        if rows[j][i] != 1 {
                            return Err(Error::Document(format!(
                                "adjacency matrix is not symmetric at ({i}, {j})"
                            )));
                        }
                        b.set(i, j, true);
                    }
                    other => {
                        return Err(Error::Document(format!(
                            "adjacency entry ({i}, {j}) is {other}, expected 0 or 1"
                        )))
                    }
                }
            }
        }
        Ok(b.build())
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        assert!(i < self.n && j < self.n, "vertex out of range");
        self.bits[i * self.words + j / WORD] >> (j % WORD) & 1 == 1
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.has_edge(i, j))
    }

    /// Edges as 0-based pairs `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            (i + 1..self.n)
                .filter(move |&j| self.has_edge(i, j))
                .map(move |j| (i, j))
        })
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).sum::<usize>() / 2
    }

    pub fn degree_sequence(&self) -> DegreeSequence {
        degree_sequence(self)
    }

    /// Copy with vertex `i` deleted; vertices above `i` shift down by one.
    pub fn without_vertex(&self, i: usize) -> Result<Self> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.n,
            });
        }
        let keep: Vec<usize> = (0..self.n).filter(|&v| v != i).collect();
        let mut b = GraphBuilder::new(self.n - 1);
        for (a, &u) in keep.iter().enumerate() {
            for (bj, &v) in keep.iter().enumerate().skip(a + 1) {
                if self.has_edge(u, v) {
                    b.set(a, bj, true);
                }
            }
        }
        Ok(b.build())
    }

    pub fn to_builder(&self) -> GraphBuilder {
        GraphBuilder { g: self.clone() }
    }

    pub fn adjacency_matrix(&self) -> Vec<Vec<u8>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.has_edge(i, j) as u8).collect())
            .collect()
    }

    /// Symmetry, empty diagonal and no stray bits past column `n`.
    pub fn check_invariants(&self) -> bool {
        for i in 0..self.n {
            if self.has_edge(i, i) {
                return false;
            }
            for j in i + 1..self.n {
                if self.has_edge(i, j) != self.has_edge(j, i) {
                    return false;
                }
            }
            let row = self.row(i);
            let tail = self.n % WORD;
            if tail != 0 && row[self.words - 1] >> tail != 0 {
                return false;
            }
        }
        true
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// Wire form: `{"n": 3, "edges": [[1, 2], [2, 3]]}` with 1-based vertex
/// labels and edges listed in lexicographic order.
#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr {
            n: self.n,
            edges: self.edges().map(|(i, j)| (i + 1, j + 1)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(deserializer)?;
        let mut b = GraphBuilder::new(repr.n);
        for (i, j) in repr.edges {
            if i == 0 || j == 0 {
                return Err(serde::de::Error::custom("vertex labels are 1-based"));
            }
            b.add_edge(i - 1, j - 1).map_err(serde::de::Error::custom)?;
        }
        Ok(b.build())
    }
}

/// Serde adapter writing a 0-based index as a 1-based vertex label.
pub mod one_based {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &usize, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(*v as u64 + 1)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
        match usize::deserialize(d)? {
            0 => Err(serde::de::Error::custom("vertex labels are 1-based")),
            v => Ok(v - 1),
        }
    }
}

/// Mutable staging area for a [`Graph`]. Every mutation writes both halves of
/// the matrix, so a built graph is symmetric by construction.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    g: Graph,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        GraphBuilder { g: Graph::empty(n) }
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<&mut Self> {
        self.validate(i, j)?;
        self.set(i, j, true);
        Ok(self)
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) -> Result<&mut Self> {
        self.validate(i, j)?;
        self.set(i, j, false);
        Ok(self)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.g.has_edge(i, j)
    }

    pub fn build(self) -> Graph {
        debug_assert!(self.g.check_invariants());
        self.g
    }

    fn validate(&self, i: usize, j: usize) -> Result<()> {
        let n = self.g.n;
        for v in [i, j] {
            if v >= n {
                return Err(Error::IndexOutOfRange { index: v, n });
            }
        }
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        Ok(())
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, on: bool) {
        let w = self.g.words;
        for (a, b) in [(i, j), (j, i)] {
            let word = &mut self.g.bits[a * w + b / WORD];
            if on {
                *word |= 1 << (b % WORD);
            } else {
                *word &= !(1 << (b % WORD));
            }
        }
    }
}

/// Per-player degree counts. Used both for realized degrees and for targets;
/// targets above `n - 1` are legal and simply unrealizable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DegreeSequence(Vec<usize>);

impl DegreeSequence {
    pub fn new(d: Vec<usize>) -> Self {
        DegreeSequence(d)
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    /// Copy with entry `i` removed.
    pub fn without(&self, i: usize) -> Result<Self> {
        if i >= self.0.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.0.len(),
            });
        }
        let mut d = self.0.clone();
        d.remove(i);
        Ok(DegreeSequence(d))
    }
}

impl Deref for DegreeSequence {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for DegreeSequence {
    fn from(d: Vec<usize>) -> Self {
        DegreeSequence(d)
    }
}

impl FromIterator<usize> for DegreeSequence {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        DegreeSequence(iter.into_iter().collect())
    }
}

pub fn degree_sequence(g: &Graph) -> DegreeSequence {
    (0..g.node_count()).map(|i| g.degree(i)).collect()
}

/// Sum of absolute componentwise differences.
pub fn l1_distance(a: &[usize], b: &[usize]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(&x, &y)| x.abs_diff(y)).sum())
}

/// Erdős–Gallai test.
pub fn is_graphical(d: &[usize]) -> bool {
    if d.iter().sum::<usize>() % 2 == 1 {
        return false;
    }
    let mut sorted = d.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let n = sorted.len();
    let mut prefix = 0usize;
    for k in 1..=n {
        prefix += sorted[k - 1];
        let tail: usize = sorted[k..].iter().map(|&x| x.min(k)).sum();
        if prefix > k * (k - 1) + tail {
            return false;
        }
    }
    true
}

/// Havel–Hakimi construction. The vertex with the largest remaining demand
/// (lowest index on ties) is joined to the next-largest demands, again
/// breaking ties by index, so the output is deterministic.
pub fn realize_graphical(d: &[usize]) -> Result<Graph> {
    if !is_graphical(d) {
        return Err(Error::NotGraphical);
    }
    let n = d.len();
    let mut residual = d.to_vec();
    let mut b = GraphBuilder::new(n);
    let mut order: Vec<usize> = (0..n).collect();
    loop {
        order.sort_by(|&a, &c| residual[c].cmp(&residual[a]).then(a.cmp(&c)));
        let Some(&v) = order.first() else { break };
        let k = residual[v];
        if k == 0 {
            break;
        }
        residual[v] = 0;
        for &u in &order[1..=k] {
            // Erdős–Gallai guarantees enough positive demands remain.
            debug_assert!(residual[u] > 0);
            residual[u] -= 1;
            b.set(v, u, true);
        }
    }
    Ok(b.build())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Centrality {
    pub scores: Vec<f64>,
    pub iterations: usize,
    /// True when the graph has no edges; `scores` is then all zero.
    pub no_edges: bool,
}

const MAX_POWER_ITERATIONS: usize = 100_000;

/// Perron vector of the adjacency matrix, normalized to sum to one.
///
/// Iterates with `A + I` rather than `A`: the eigenvectors are identical but
/// the shift removes the ±λ oscillation that plain power iteration shows on
/// bipartite graphs. The start vector is uniform over non-isolated vertices,
/// and isolated vertices are pinned at zero. On disconnected graphs the
/// component with the largest eigenvalue dominates; components tied for the
/// largest eigenvalue keep whatever mix the uniform start gives them.
pub fn eigenvector_centrality(g: &Graph, tol: f64) -> Centrality {
    assert!(tol > 0.0, "tolerance must be positive");
    let n = g.node_count();
    let adj: Vec<Vec<usize>> = (0..n).map(|i| g.neighbors(i).collect()).collect();
    let active = adj.iter().filter(|a| !a.is_empty()).count();
    if active == 0 {
        return Centrality {
            scores: vec![0.0; n],
            iterations: 0,
            no_edges: true,
        };
    }
    let mut x: Vec<f64> = adj
        .iter()
        .map(|a| {
            if a.is_empty() {
                0.0
            } else {
                1.0 / active as f64
            }
        })
        .collect();
    let mut iterations = 0;
    while iterations < MAX_POWER_ITERATIONS {
        iterations += 1;
        let mut next: Vec<f64> = (0..n)
            .map(|i| {
                if adj[i].is_empty() {
                    0.0
                } else {
                    x[i] + adj[i].iter().map(|&j| x[j]).sum::<f64>()
                }
            })
            .collect();
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);
        let change: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if change < tol {
            break;
        }
    }
    Centrality {
        scores: x,
        iterations,
        no_edges: false,
    }
}
