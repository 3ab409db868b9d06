use netgame::anarchy::{
    anarchy_report_link_bias, communal_utility_change, pareto_targets, summary_table,
    whatif_remove, AnarchyReport, WhatIfResult,
};
use netgame::games::{
    is_pairwise_stable_degree, is_pairwise_stable_link_bias, DegreeSequenceGame, Game,
};
use netgame::graph::{eigenvector_centrality, is_graphical, realize_graphical, Graph};
use netgame::io::{parse_game, read_report, write_report, GameDocument, SimulationReport};
use netgame::simulator::{simulate_batch, simulate_once};
use netgame::solvers::{
    best_graph_degree, best_graph_link_bias, stable_graph_link_bias, worst_stable_degree,
    SolveResult,
};
use netgame::{DegreeSequence, LinkBiasGame};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn targets(max_n: usize) -> impl Strategy<Value = DegreeSequence> {
    (1..=max_n).prop_flat_map(|n| prop::collection::vec(0..n, n).prop_map(DegreeSequence::from))
}

fn cost_game(max_n: usize) -> impl Strategy<Value = LinkBiasGame> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(-100i32..=100, n), n).prop_map(|rows| {
            let costs = rows
                .into_iter()
                .enumerate()
                .map(|(i, row)| {
                    row.into_iter()
                        .enumerate()
                        .map(|(j, c)| if i == j { 0.0 } else { c as f64 })
                        .collect()
                })
                .collect();
            LinkBiasGame::new(costs).unwrap()
        })
    })
}

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
            let edges = pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e);
            Graph::from_edges(n, edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn handshake(g in graph(12)) {
        prop_assert_eq!(g.degree_sequence().total(), 2 * g.edge_count());
        prop_assert!(is_graphical(&g.degree_sequence()));
    }

    #[test]
    fn havel_hakimi_realizes_graphical(d in targets(12)) {
        match realize_graphical(&d) {
            Ok(g) => {
                prop_assert!(is_graphical(&d));
                prop_assert_eq!(g.degree_sequence(), d);
            }
            Err(_) => prop_assert!(!is_graphical(&d)),
        }
    }

    #[test]
    fn centrality_is_a_distribution(g in graph(10)) {
        let c = eigenvector_centrality(&g, 1e-12);
        prop_assert!(c.scores.iter().all(|&x| x >= 0.0));
        for i in 0..g.node_count() {
            if g.degree(i) == 0 {
                prop_assert_eq!(c.scores[i], 0.0);
            }
        }
        if g.edge_count() > 0 {
            prop_assert!((c.scores.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        } else {
            prop_assert!(c.no_edges);
        }
    }

    #[test]
    fn link_bias_stability_and_optimality(game in cost_game(12)) {
        let stable = stable_graph_link_bias(&game);
        let best = best_graph_link_bias(&game);
        prop_assert!(is_pairwise_stable_link_bias(&game, &stable.graph).unwrap());
        prop_assert!(best.objective >= stable.objective);
        let report = anarchy_report_link_bias(&game);
        prop_assert!(report.poa_difference >= 0.0);
        if let Some(r) = report.poa_ratio {
            prop_assert!((0.0..=1.0).contains(&r));
        }
    }

    #[test]
    fn utility_change_accounts_for_every_link(game in cost_game(12)) {
        let stable = stable_graph_link_bias(&game);
        let mut total = 0.0;
        for i in 0..game.player_count() {
            let du = communal_utility_change(&game, i).unwrap();
            prop_assert!(du >= 0.0);
            prop_assert_eq!(du == 0.0, stable.graph.degree(i) == 0);
            total += du;
        }
        prop_assert_eq!(total, 2.0 * stable.objective);
    }

    #[test]
    fn removal_consistency(game in cost_game(10), pick in any::<prop::sample::Index>()) {
        prop_assume!(game.player_count() >= 2);
        let i = pick.index(game.player_count());
        let w = whatif_remove(&game, i).unwrap();
        prop_assert_eq!(
            w.report_after.worst_stable_value,
            w.report_before.worst_stable_value - w.communal_utility_change
        );
        let smaller = game.without_player(i).unwrap();
        prop_assert_eq!(w.report_after.clone(), anarchy_report_link_bias(&smaller));
    }

    #[test]
    fn pareto_front_is_an_antichain(game in cost_game(8)) {
        prop_assume!(game.player_count() >= 2);
        let table = summary_table(&game).unwrap();
        let front = pareto_targets(&table);
        prop_assert!(!front.is_empty());
        let point = |v: usize| {
            let r = &table[v];
            (r.communal_utility_change, r.delta_poa_ratio.unwrap_or(f64::NEG_INFINITY))
        };
        for &a in &front {
            for &b in &front {
                let (pa, pb) = (point(a), point(b));
                let dominates = pa.0 >= pb.0 && pa.1 >= pb.1 && (pa.0 > pb.0 || pa.1 > pb.1);
                prop_assert!(!dominates);
            }
        }
    }

    #[test]
    fn simulation_ends_stable(d in targets(20), seed in any::<u64>()) {
        let g = simulate_once(&d, seed);
        prop_assert!(g.degree_sequence().iter().zip(d.iter()).all(|(e, t)| e <= t));
        let game = DegreeSequenceGame::new(d.clone());
        prop_assert!(is_pairwise_stable_degree(&game, &g).unwrap());
        prop_assert_eq!(g, simulate_once(&d, seed));
    }

    #[test]
    fn game_documents_round_trip(game in cost_game(6), d in targets(8)) {
        for game in [Game::LinkBias(game.clone()), Game::Degree(DegreeSequenceGame::new(d.clone()))] {
            let doc = GameDocument::from_game(&game);
            let text = serde_json::to_string(&doc).unwrap();
            prop_assert_eq!(parse_game(&text).unwrap(), game);
        }
    }

    #[test]
    fn link_bias_reports_round_trip(game in cost_game(8)) {
        let stable = stable_graph_link_bias(&game);
        let text = write_report(&stable).unwrap();
        prop_assert_eq!(read_report::<SolveResult>(&text).unwrap(), stable);
        prop_assert_eq!(write_report(&read_report::<SolveResult>(&text).unwrap()).unwrap(), text);

        let report = anarchy_report_link_bias(&game);
        let text = write_report(&report).unwrap();
        prop_assert_eq!(read_report::<AnarchyReport>(&text).unwrap(), report);

        if game.player_count() >= 2 {
            let w = whatif_remove(&game, 0).unwrap();
            let text = write_report(&w).unwrap();
            prop_assert_eq!(read_report::<WhatIfResult>(&text).unwrap(), w);
        }
    }
}

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn degree_solver_invariants(d in targets(9)) {
        let game = DegreeSequenceGame::new(d.clone());
        let worst = worst_stable_degree(&d);
        let best = best_graph_degree(&d);
        prop_assert!(is_pairwise_stable_degree(&game, &worst.graph).unwrap());
        prop_assert_eq!(best.objective == 0.0, is_graphical(&d));
        let parity = (d.total() % 2) as f64;
        prop_assert_eq!(worst.objective % 2.0, parity);
        prop_assert_eq!(best.objective % 2.0, parity);
        let deficit: usize = worst.deficits.as_ref().unwrap().iter().sum();
        prop_assert_eq!(deficit as f64, worst.objective);

        let text = write_report(&worst).unwrap();
        prop_assert_eq!(read_report::<SolveResult>(&text).unwrap(), worst.clone());

        // Any simulated outcome is stable, so it cannot beat the worst case.
        let sim = simulate_once(&d, d.total() as u64);
        let realized: usize = sim.degree_sequence().iter().zip(d.iter()).map(|(e, t)| t - e).sum();
        prop_assert!(realized as f64 <= worst.objective);
        prop_assert!(realized as f64 >= best.objective);
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn simulation_reports_round_trip(d in targets(15), runs in 1usize..6, seed in any::<u64>()) {
        let report = SimulationReport::new(simulate_batch(&d, runs, seed).unwrap()).unwrap();
        let text = write_report(&report).unwrap();
        prop_assert_eq!(read_report::<SimulationReport>(&text).unwrap(), report);
    }
}

/// Spearman correlation with average ranks for ties.
fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut k = 0;
        while k < idx.len() {
            let mut end = k;
            while end + 1 < idx.len() && v[idx[end + 1]] == v[idx[k]] {
                end += 1;
            }
            let avg = (k + end) as f64 / 2.0;
            for &i in &idx[k..=end] {
                r[i] = avg;
            }
            k = end + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mean = (n - 1.0) / 2.0;
    let cov: f64 = rx
        .iter()
        .zip(&ry)
        .map(|(a, b)| (a - mean) * (b - mean))
        .sum();
    let vx: f64 = rx.iter().map(|a| (a - mean).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - mean).powi(2)).sum();
    (vx > 0.0 && vy > 0.0).then(|| cov / (vx * vy).sqrt())
}

#[test]
fn utility_change_tracks_degree() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let mut correlations = Vec::new();
    for _ in 0..200 {
        let n = 12;
        let costs = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            0.0
                        } else {
                            rng.random_range(-100..=100) as f64
                        }
                    })
                    .collect()
            })
            .collect();
        let game = LinkBiasGame::new(costs).unwrap();
        let stable = stable_graph_link_bias(&game);
        let du: Vec<f64> = (0..n)
            .map(|i| communal_utility_change(&game, i).unwrap())
            .collect();
        let deg: Vec<f64> = (0..n).map(|i| stable.graph.degree(i) as f64).collect();
        if let Some(r) = spearman(&du, &deg) {
            correlations.push(r);
        }
    }
    let mean = correlations.iter().sum::<f64>() / correlations.len() as f64;
    assert!(mean > 0.5, "mean rank correlation {mean}");
}
