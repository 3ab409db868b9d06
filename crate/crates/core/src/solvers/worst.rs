//! Worst pairwise-stable graph of the degree game.
//!
//! A graph is stable iff no player exceeds its target and the strictly
//! deficient players form a clique. Maximizing total deficit
//! `sum_i (d_i - degree_i)` is the same as minimizing the edge count over
//! such graphs, which is a minimum-maximal-b-matching flavour of problem;
//! it is searched exactly by branch-and-bound.
//!
//! Search state per vertex: current degree, number of undecided incident
//! edges, and bitmasks of edges fixed present/absent. Two facts drive the
//! pruning:
//!
//! * a vertex whose remaining demand exceeds its undecided edges will end
//!   deficient, so every edge already fixed absent at it forces the other
//!   endpoint to saturate, and two such vertices may not be fixed apart;
//! * if the final deficient set has size `k`, each member has degree at
//!   least `k - 1`, so it contributes at most `min(r_i, d_i - k + 1)`.
//!
//! The objective always has the parity of `sum d`, which tightens the bound
//! by one whenever it disagrees.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::best::full_mask;
use super::{deficits, Problem, SolveResult, SolverOptions};
use crate::graph::{DegreeSequence, Graph, GraphBuilder};

/// Searches need one bitmask word per vertex.
const MAX_SEARCH_PLAYERS: usize = 64;
const HEURISTIC_RESTARTS: u64 = 32;

pub fn worst_stable_degree(d: &DegreeSequence) -> SolveResult {
    worst_stable_degree_with(d, &SolverOptions::default())
}

pub fn worst_stable_degree_with(d: &DegreeSequence, opts: &SolverOptions) -> SolveResult {
    let n = d.len();
    let parity = d.total() % 2;
    let (mut best_graph, mut best_value) = heuristic(d);

    let root_candidates: Vec<(usize, usize)> =
        (0..n).filter(|&i| d[i] > 0).map(|i| (d[i], d[i])).collect();
    let root_bound = clique_bound(&[], &root_candidates, d, parity).unwrap_or(0);

    let mut optimal = best_value >= root_bound;
    let mut nodes = 0;
    if !optimal && n <= MAX_SEARCH_PLAYERS {
        // Search with high targets first; their edges settle the clique early.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| d[b].cmp(&d[a]).then(a.cmp(&b)));
        let permuted: Vec<usize> = order.iter().map(|&i| d[i]).collect();
        let mut search = Search::new(&permuted, opts.node_budget, best_value);
        search.dfs(0);
        nodes = search.nodes;
        optimal = !search.exhausted;
        if let Some(adj) = search.best_adj {
            best_value = search.best_value;
            let mut b = GraphBuilder::new(n);
            for (i, j) in graph_from_masks(n, &adj).edges() {
                b.set(order[i], order[j], true);
            }
            best_graph = b.build();
        }
    }

    let objective = deficits(d, &best_graph).iter().sum::<usize>();
    assert_eq!(
        objective as i64, best_value,
        "objective out of sync with graph"
    );
    SolveResult {
        problem: Problem::WorstStableDegree,
        deficits: Some(deficits(d, &best_graph)),
        graph: best_graph,
        objective: objective as f64,
        optimal,
        nodes_explored: nodes,
    }
}

/// Upper bound on total deficit given players certain to end deficient
/// (`forced`) and players that might (`optional`), each as
/// `(remaining demand, target)`; `targets` lists every player's target.
/// Returns `None` when no deficient set is consistent with the inputs.
///
/// For a deficient set of size `k`, two bounds are combined: each member
/// keeps at most `min(r_i, d_i - k + 1)`, and the members' degrees sum to at
/// least `k(k-1)` plus whatever saturated outsiders cannot place among the
/// other `n - k - 1` outsiders.
fn clique_bound(
    forced: &[(usize, usize)],
    optional: &[(usize, usize)],
    targets: &[usize],
    parity: usize,
) -> Option<i64> {
    let active = targets.iter().filter(|&&d| d > 0).count();
    let mut best: Option<i64> = if forced.is_empty() { Some(0) } else { None };
    let mut caps = Vec::with_capacity(optional.len());
    let mut slack = Vec::with_capacity(optional.len());
    for k in forced.len().max(1)..=forced.len() + optional.len() {
        // Members of a k-clique need target >= k to stay strictly below it.
        if forced.iter().any(|&(_, d)| d < k) {
            break;
        }
        // Members have positive targets, so outsiders have `active - k - 1`
        // possible outside partners at most.
        let spill = |d: usize| d.saturating_sub((active - k).saturating_sub(1)) as i64;
        let spill_all: i64 = targets.iter().map(|&d| spill(d)).sum();
        let need = k - forced.len();

        caps.clear();
        slack.clear();
        for &(r, d) in optional.iter().filter(|&&(_, d)| d >= k) {
            caps.push(r.min(d + 1 - k) as i64);
            slack.push(d as i64 + spill(d));
        }
        if caps.len() < need {
            continue;
        }
        caps.sort_unstable_by(|a, b| b.cmp(a));
        slack.sort_unstable_by(|a, b| b.cmp(a));

        let by_member: i64 = forced
            .iter()
            .map(|&(r, d)| r.min(d + 1 - k) as i64)
            .chain(caps[..need].iter().copied())
            .sum();
        let by_degree: i64 = forced
            .iter()
            .map(|&(_, d)| d as i64 + spill(d))
            .chain(slack[..need].iter().copied())
            .sum::<i64>()
            - (k * (k - 1)) as i64
            - spill_all;
        let total = by_member.min(by_degree);
        if total < 0 {
            continue;
        }
        best = Some(best.map_or(total, |b| b.max(total)));
    }
    best.map(|b| if (b as usize) % 2 != parity { b - 1 } else { b })
        .filter(|&b| b >= 0)
}

/// Best of several greedy constructions, each finished by a maximal fill so
/// the result is stable. Two families: plain fills in shuffled pair order,
/// and "clique first" builds that link a chosen deficient set, then let the
/// remaining players saturate among themselves before touching the clique.
fn heuristic(d: &[usize]) -> (Graph, i64) {
    let n = d.len();
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x05ee_d0f5_ab1e);
    let mut best: Option<(Graph, i64)> = None;
    let mut keep = |b: GraphBuilder, eta: &[usize]| {
        let value = (0..n).map(|i| (d[i] - eta[i]) as i64).sum::<i64>();
        if best.as_ref().is_none_or(|(_, v)| value > *v) {
            best = Some((b.build(), value));
        }
    };

    for attempt in 0..=HEURISTIC_RESTARTS {
        if attempt > 0 {
            pairs.shuffle(&mut rng);
        }
        let mut eta = vec![0usize; n];
        let mut b = GraphBuilder::new(n);
        fill(d, &pairs, &mut eta, &mut b);
        keep(b, &eta);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].cmp(&d[a]).then(a.cmp(&b)));
    let lex: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    for attempt in 0..=HEURISTIC_RESTARTS {
        if attempt > 0 {
            order.shuffle(&mut rng);
        }
        for k in 1..=n {
            let members = &order[..k];
            if members.iter().any(|&i| d[i] < k) {
                break;
            }
            let mut inside = vec![false; n];
            let mut eta = vec![0usize; n];
            let mut b = GraphBuilder::new(n);
            for (x, &i) in members.iter().enumerate() {
                inside[i] = true;
                for &j in &members[x + 1..] {
                    b.set(i, j, true);
                    eta[i] += 1;
                    eta[j] += 1;
                }
            }
            saturate_outside(d, &inside, &mut eta, &mut b);
            fill(d, &lex, &mut eta, &mut b);
            keep(b, &eta);
        }
    }
    best.expect("at least one attempt")
}

/// Adds every pair in `pairs` whose endpoints are both below target.
fn fill(d: &[usize], pairs: &[(usize, usize)], eta: &mut [usize], b: &mut GraphBuilder) {
    for &(i, j) in pairs {
        if eta[i] < d[i] && eta[j] < d[j] && !b.has_edge(i, j) {
            eta[i] += 1;
            eta[j] += 1;
            b.set(i, j, true);
        }
    }
}

/// Havel–Hakimi style linking restricted to players outside the clique.
fn saturate_outside(d: &[usize], inside: &[bool], eta: &mut [usize], b: &mut GraphBuilder) {
    let mut rest: Vec<usize> = (0..d.len()).filter(|&i| !inside[i]).collect();
    loop {
        rest.retain(|&i| eta[i] < d[i]);
        rest.sort_by(|&a, &c| (d[c] - eta[c]).cmp(&(d[a] - eta[a])).then(a.cmp(&c)));
        let Some((&v, others)) = rest.split_first() else {
            break;
        };
        let mut linked = false;
        for &u in others {
            if eta[v] == d[v] {
                break;
            }
            if eta[u] < d[u] && !b.has_edge(u, v) {
                b.set(u, v, true);
                eta[u] += 1;
                eta[v] += 1;
                linked = true;
            }
        }
        if !linked {
            // `v` cannot gain more outside links.
            rest.remove(0);
        }
    }
}

pub(super) fn graph_from_masks(n: usize, adj: &[u64]) -> Graph {
    let mut b = GraphBuilder::new(n);
    for (i, &row) in adj.iter().enumerate() {
        for j in i + 1..n {
            if row >> j & 1 == 1 {
                b.set(i, j, true);
            }
        }
    }
    b.build()
}

struct Search<'a> {
    d: &'a [usize],
    parity: usize,
    edges: Vec<(usize, usize)>,
    eta: Vec<usize>,
    undecided: Vec<u64>,
    adj: Vec<u64>,
    absent: Vec<u64>,
    best_value: i64,
    best_adj: Option<Vec<u64>>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
    forced: Vec<(usize, usize)>,
    optional: Vec<(usize, usize)>,
    certain: u64,
}

impl<'a> Search<'a> {
    fn new(d: &'a [usize], budget: u64, incumbent: i64) -> Self {
        let n = d.len();
        Search {
            d,
            parity: d.iter().sum::<usize>() % 2,
            edges: (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect(),
            eta: vec![0; n],
            undecided: (0..n).map(|i| full_mask(n) & !(1 << i)).collect(),
            adj: vec![0; n],
            absent: vec![0; n],
            best_value: incumbent,
            best_adj: None,
            nodes: 0,
            budget,
            exhausted: false,
            forced: Vec::with_capacity(n),
            optional: Vec::with_capacity(n),
            certain: 0,
        }
    }

    /// `None` when the partial assignment cannot be completed to a stable
    /// graph; otherwise an upper bound on the final total deficit.
    fn bound(&mut self) -> Option<i64> {
        self.certain = 0;
        let n = self.d.len();
        let mut room = 0u64;
        for i in 0..n {
            if self.eta[i] < self.d[i] {
                room |= 1 << i;
            }
        }
        let mut certain = 0u64;
        for i in 0..n {
            let reachable = (self.undecided[i] & room).count_ones() as usize;
            if self.d[i] - self.eta[i] > reachable {
                certain |= 1 << i;
            }
        }
        self.certain = certain;
        let mut must_saturate = 0u64;
        let mut rest = certain;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            must_saturate |= self.absent[i];
        }
        if must_saturate & certain != 0 {
            return None;
        }
        self.forced.clear();
        self.optional.clear();
        for i in 0..n {
            let r = self.d[i] - self.eta[i];
            if certain >> i & 1 == 1 {
                self.forced.push((r, self.d[i]));
            } else if r > 0 && must_saturate >> i & 1 == 0 && self.absent[i] & certain == 0 {
                self.optional.push((r, self.d[i]));
            }
        }
        clique_bound(&self.forced, &self.optional, self.d, self.parity)
    }

    fn dfs(&mut self, e: usize) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let Some(ub) = self.bound() else { return };
        if ub <= self.best_value {
            return;
        }
        if e == self.edges.len() {
            // Every vertex is decided, so `bound` has already checked that the
            // deficient set is a clique; the bound is the exact value here.
            let value: i64 = (0..self.d.len())
                .map(|i| (self.d[i] - self.eta[i]) as i64)
                .sum();
            debug_assert_eq!(value, ub);
            self.best_value = value;
            self.best_adj = Some(self.adj.clone());
            return;
        }
        let (i, j) = self.edges[e];
        self.undecided[i] &= !(1 << j);
        self.undecided[j] &= !(1 << i);

        // Two players sure to stay deficient must be linked.
        let both_deficient = self.certain >> i & 1 == 1 && self.certain >> j & 1 == 1;
        if !both_deficient {
            self.absent[i] |= 1 << j;
            self.absent[j] |= 1 << i;
            self.dfs(e + 1);
            self.absent[i] &= !(1 << j);
            self.absent[j] &= !(1 << i);
        }

        if !self.exhausted && self.eta[i] < self.d[i] && self.eta[j] < self.d[j] {
            self.adj[i] |= 1 << j;
            self.adj[j] |= 1 << i;
            self.eta[i] += 1;
            self.eta[j] += 1;
            self.dfs(e + 1);
            self.adj[i] &= !(1 << j);
            self.adj[j] &= !(1 << i);
            self.eta[i] -= 1;
            self.eta[j] -= 1;
        }

        self.undecided[i] |= 1 << j;
        self.undecided[j] |= 1 << i;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{is_pairwise_stable_degree, DegreeSequenceGame};

    fn solve(d: &[usize]) -> SolveResult {
        worst_stable_degree(&d.to_vec().into())
    }

    #[test]
    fn small_cases() {
        let r = solve(&[0, 0, 0, 0]);
        assert_eq!(r.objective, 0.0);
        assert_eq!(r.graph.edge_count(), 0);

        let r = solve(&[1, 1, 1]);
        assert_eq!(r.objective, 1.0);
        assert_eq!(r.graph.edge_count(), 1);
        assert!(r.optimal);

        // Triangle plus isolated vertex beats the 4-cycle.
        assert_eq!(solve(&[2, 2, 2, 2]).objective, 2.0);
        assert_eq!(solve(&[]).objective, 0.0);
    }

    #[test]
    fn ten_players_of_target_five() {
        let d = vec![5; 10];
        let r = solve(&d);
        assert!(r.optimal);
        // K4 + K6 is stable with deficit 4 * 2 = 8; 9 is ruled out by parity.
        assert_eq!(r.objective, 8.0);
        let game = DegreeSequenceGame::new(d);
        assert!(is_pairwise_stable_degree(&game, &r.graph).unwrap());
        assert_eq!(r.deficits.unwrap().iter().sum::<usize>(), 8);
    }

    #[test]
    fn targets_above_n_minus_one() {
        // Nobody can reach 5 with two others: the only stable graph is K3.
        let r = solve(&[5, 5, 5]);
        assert_eq!(r.graph, Graph::complete(3));
        assert_eq!(r.objective, 9.0);
    }

    #[test]
    fn exhausted_budget_reports_non_optimal() {
        let r = worst_stable_degree_with(&vec![5; 12].into(), &SolverOptions { node_budget: 3 });
        let game = DegreeSequenceGame::new(vec![5; 12]);
        assert!(is_pairwise_stable_degree(&game, &r.graph).unwrap());
        if !r.optimal {
            assert!(r.nodes_explored <= 4);
        }
    }

    #[test]
    fn bound_respects_parity() {
        assert_eq!(clique_bound(&[], &[(5, 5); 10], &[5; 10], 0), Some(8));
        assert_eq!(clique_bound(&[], &[], &[], 1), None);
        assert_eq!(clique_bound(&[(3, 3)], &[], &[3], 1), Some(3));
        assert_eq!(clique_bound(&[(3, 3)], &[], &[3], 0), Some(2));
    }
}
