//! Closest graph to a target degree sequence in l1.
//!
//! Some optimum never puts a player above its target: dropping an edge at an
//! over-target endpoint lowers that endpoint's error by one and raises the
//! other's by at most one. So the search runs over graphs with
//! `degree_i <= min(d_i, n - 1)`, where the objective is
//! `sum d - 2 |E|`, and it is a maximum simple b-matching in disguise.

use super::worst::graph_from_masks;
use super::{total_deviation, Problem, SolveResult, SolverOptions};
use crate::graph::{is_graphical, realize_graphical, DegreeSequence, Graph, GraphBuilder};

const MAX_SEARCH_PLAYERS: usize = 64;

pub fn best_graph_degree(d: &DegreeSequence) -> SolveResult {
    best_graph_degree_with(d, &SolverOptions::default())
}

/// Graphical targets are realized directly (objective 0). Otherwise a greedy
/// incumbent is improved by branch-and-bound with the bound
/// `sum_i r_i - 2 * floor(sum_i min(r_i, open_i) / 2)`, where `open_i`
/// counts undecided edges from `i` to players that still have room.
pub fn best_graph_degree_with(d: &DegreeSequence, opts: &SolverOptions) -> SolveResult {
    let n = d.len();
    if is_graphical(d) {
        let graph = realize_graphical(d).expect("graphical sequence");
        return finish(d, graph, true, 0);
    }
    let caps: Vec<usize> = d.iter().map(|&x| x.min(n.saturating_sub(1))).collect();
    let incumbent = greedy(&caps);
    let incumbent_value = total_deviation(d, &incumbent) as i64;

    let open: Vec<u64> = (0..n).map(|i| full_mask(n) & !(1 << i)).collect();
    let root_bound = lower_bound(d, &caps, &vec![0; n], &open, 0);
    if incumbent_value <= root_bound || n > MAX_SEARCH_PLAYERS {
        return finish(d, incumbent, incumbent_value <= root_bound, 0);
    }

    let mut search = Search {
        d,
        caps: &caps,
        edges: (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect(),
        eta: vec![0; n],
        open,
        adj: vec![0; n],
        edge_count: 0,
        best_value: incumbent_value,
        best_adj: None,
        nodes: 0,
        budget: opts.node_budget,
        exhausted: false,
    };
    search.dfs(0);
    let graph = match search.best_adj {
        Some(adj) => graph_from_masks(n, &adj),
        None => incumbent,
    };
    finish(d, graph, !search.exhausted, search.nodes)
}

fn finish(d: &[usize], graph: Graph, optimal: bool, nodes: u64) -> SolveResult {
    let objective = total_deviation(d, &graph);
    SolveResult {
        problem: Problem::BestDegree,
        deficits: Some(super::deficits(d, &graph)),
        graph,
        objective: objective as f64,
        optimal,
        nodes_explored: nodes,
    }
}

pub(super) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Lower bound on the objective once `edges` edges are fixed, with `eta`
/// the fixed degrees and `open[i]` the undecided partners of `i`.
fn lower_bound(d: &[usize], caps: &[usize], eta: &[usize], open: &[u64], edges: usize) -> i64 {
    let n = d.len();
    let mut room = 0u64;
    let mut rc = vec![0usize; n];
    for i in 0..n {
        if eta[i] < caps[i] {
            room |= 1 << i;
            rc[i] = caps[i] - eta[i];
        }
    }
    let extra = extra_edge_bound(&rc, open, room);
    d.iter().sum::<usize>() as i64 - 2 * (edges + extra) as i64
}

/// Upper bound on the edges still addable. For every prefix `T` of players
/// by residual capacity, `T` gains at most its capacity and at most the
/// open edges inside `T` plus what the rest can send into it; the rest gain
/// at most their capacity towards reachable partners.
fn extra_edge_bound(rc: &[usize], open: &[u64], room: u64) -> usize {
    let n = rc.len();
    let reach: Vec<u64> = (0..n).map(|i| open[i] & room & !(1 << i)).collect();
    let cap: Vec<usize> = (0..n)
        .map(|i| rc[i].min(reach[i].count_ones() as usize))
        .collect();
    let mut order: Vec<usize> = (0..n).filter(|&i| cap[i] > 0).collect();
    order.sort_by(|&a, &b| cap[b].cmp(&cap[a]).then(a.cmp(&b)));

    let total: usize = cap.iter().sum();
    let mut best = total;
    let mut t_mask = 0u64;
    let mut t_cap = 0usize;
    for &v in &order {
        t_mask |= 1 << v;
        t_cap += cap[v];
        let mut inside = 0usize;
        let mut outside_cap = 0usize;
        let mut from_rest = 0usize;
        for i in 0..n {
            if cap[i] == 0 {
                continue;
            }
            if t_mask >> i & 1 == 1 {
                inside += (reach[i] & t_mask).count_ones() as usize;
            } else {
                outside_cap += cap[i];
                from_rest += cap[i].min((reach[i] & t_mask).count_ones() as usize);
            }
        }
        best = best.min(t_cap.min(inside + from_rest) + outside_cap);
    }
    best / 2
}

/// Havel–Hakimi style: the player with most remaining room links to the
/// players with most room it is not yet linked to.
fn greedy(caps: &[usize]) -> Graph {
    let n = caps.len();
    let mut room = caps.to_vec();
    let mut b = GraphBuilder::new(n);
    let mut order: Vec<usize> = (0..n).collect();
    let mut done = vec![false; n];
    loop {
        order.sort_by(|&a, &c| room[c].cmp(&room[a]).then(a.cmp(&c)));
        let Some(&v) = order.iter().find(|&&v| !done[v] && room[v] > 0) else {
            break;
        };
        done[v] = true;
        for &u in &order {
            if room[v] == 0 {
                break;
            }
            if u != v && room[u] > 0 && !b.has_edge(u, v) {
                b.set(u, v, true);
                room[u] -= 1;
                room[v] -= 1;
            }
        }
    }
    b.build()
}

struct Search<'a> {
    d: &'a [usize],
    caps: &'a [usize],
    edges: Vec<(usize, usize)>,
    eta: Vec<usize>,
    open: Vec<u64>,
    adj: Vec<u64>,
    edge_count: usize,
    best_value: i64,
    best_adj: Option<Vec<u64>>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Search<'_> {
    fn dfs(&mut self, e: usize) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let lb = lower_bound(self.d, self.caps, &self.eta, &self.open, self.edge_count);
        if lb >= self.best_value {
            return;
        }
        if e == self.edges.len() {
            self.best_value = lb;
            self.best_adj = Some(self.adj.clone());
            return;
        }
        let (i, j) = self.edges[e];
        self.open[i] &= !(1 << j);
        self.open[j] &= !(1 << i);

        if self.eta[i] < self.caps[i] && self.eta[j] < self.caps[j] {
            self.adj[i] |= 1 << j;
            self.adj[j] |= 1 << i;
            self.eta[i] += 1;
            self.eta[j] += 1;
            self.edge_count += 1;
            self.dfs(e + 1);
            self.adj[i] &= !(1 << j);
            self.adj[j] &= !(1 << i);
            self.eta[i] -= 1;
            self.eta[j] -= 1;
            self.edge_count -= 1;
        }
        if !self.exhausted {
            self.dfs(e + 1);
        }

        self.open[i] |= 1 << j;
        self.open[j] |= 1 << i;
    }
}
