//! The ten-player link-bias example: payoffs, removals and the summary table.

use netgame::anarchy::{
    anarchy_report_link_bias, communal_utility_change, pareto_targets, summary_table, whatif_remove,
};
use netgame::games::{is_pairwise_stable_link_bias, Game};
use netgame::io::parse_game;
use netgame::solvers::{best_graph_link_bias, stable_graph_link_bias};
use netgame::LinkBiasGame;

const UTILITY_CHANGE: [f64; 10] = [178., 153., 285., 190., 193., 42., 213., 221., 103., 576.];
const DEGREE: [usize; 10] = [2, 2, 3, 3, 2, 1, 3, 2, 2, 6];
const CENTRALITY: [f64; 10] = [
    0.070066565,
    0.085041762,
    0.120257982,
    0.115436794,
    0.093603947,
    0.063208915,
    0.092026999,
    0.102880448,
    0.066087279,
    0.191389311,
];
const POA_DIFF: [f64; 10] = [
    -0.012608178,
    0.026391872,
    0.065375238,
    0.009530895,
    0.011948301,
    -0.03956057,
    -0.072036296,
    -0.05390475,
    -0.003131446,
    0.089296079,
];

fn example() -> LinkBiasGame {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../data/complete_example.json"
    );
    match parse_game(&std::fs::read_to_string(path).unwrap()).unwrap() {
        Game::LinkBias(g) => g,
        other => panic!("expected a link-bias game, got {other:?}"),
    }
}

#[test]
fn stable_and_best_payoffs() {
    let game = example();
    let stable = stable_graph_link_bias(&game);
    assert_eq!(stable.objective, 1077.0);
    assert_eq!(stable.graph.edge_count(), 13);
    assert!(is_pairwise_stable_link_bias(&game, &stable.graph).unwrap());
    assert_eq!(best_graph_link_bias(&game).objective, 1487.0);

    let report = anarchy_report_link_bias(&game);
    assert_eq!(report.poa_difference, 410.0);
    let ratio = report.poa_ratio.unwrap();
    assert!((ratio - 1077.0 / 1487.0).abs() < 1e-9);
    assert_eq!(format!("{ratio:.5}"), "0.72428");
}

#[test]
fn removing_ten_and_one() {
    let game = example();
    let w = whatif_remove(&game, 9).unwrap();
    assert_eq!(w.report_after.worst_stable_value, 501.0);
    assert_eq!(w.report_after.best_value, 789.0);
    assert!((w.report_after.poa_ratio.unwrap() - 0.635).abs() < 5e-4);

    let w = whatif_remove(&game, 0).unwrap();
    assert_eq!(w.report_after.worst_stable_value, 899.0);
    assert_eq!(w.report_after.best_value, 1220.0);
    assert!((w.report_after.poa_ratio.unwrap() - 0.7369).abs() < 5e-5);
}

#[test]
fn summary_table_matches() {
    let game = example();
    let table = summary_table(&game).unwrap();
    assert_eq!(table.len(), 10);
    for (i, row) in table.iter().enumerate() {
        assert_eq!(row.removed, i);
        assert_eq!(
            row.communal_utility_change,
            UTILITY_CHANGE[i],
            "vertex {}",
            i + 1
        );
        assert_eq!(
            communal_utility_change(&game, i).unwrap(),
            UTILITY_CHANGE[i]
        );
        assert_eq!(row.degree, DEGREE[i], "vertex {}", i + 1);
        assert!(
            (row.eig_centrality - CENTRALITY[i]).abs() < 1e-3,
            "vertex {}",
            i + 1
        );
        assert!(
            (row.delta_poa_ratio.unwrap() - POA_DIFF[i]).abs() < 1e-6,
            "vertex {}",
            i + 1
        );
        assert_eq!(
            row.report_after.worst_stable_value,
            1077.0 - UTILITY_CHANGE[i],
            "vertex {}",
            i + 1
        );
    }
    let total: f64 = UTILITY_CHANGE.iter().sum();
    assert_eq!(total, 2.0 * 1077.0);
}

#[test]
fn pareto_front() {
    let table = summary_table(&example()).unwrap();
    assert!(pareto_targets(&table).contains(&9));
    let without_ten: Vec<_> = table.into_iter().filter(|r| r.removed != 9).collect();
    assert!(pareto_targets(&without_ten).contains(&2));
}
