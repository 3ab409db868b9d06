//! Cost matrices built from degree targets hide the closest graph as their
//! unique stable graph.

use netgame::games::is_pairwise_stable_link_bias;
use netgame::graph::{is_graphical, l1_distance, DegreeSequence, GraphBuilder};
use netgame::solvers::{brute_force_best_graph, construct_cost_matrix, stable_graph_link_bias};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph_degrees(rng: &mut ChaCha8Rng, n: usize) -> DegreeSequence {
    let p: f64 = rng.random_range(0.1..0.9);
    let mut b = GraphBuilder::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                b.add_edge(i, j).unwrap();
            }
        }
    }
    b.build().degree_sequence()
}

#[test]
fn stable_graph_is_closest() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut graphical, mut other) = (0, 0);
    for case in 0..160 {
        let n = rng.random_range(1..=12);
        let d: DegreeSequence = if case % 2 == 0 {
            random_graph_degrees(&mut rng, n)
        } else {
            (0..n).map(|_| rng.random_range(0..=n)).collect()
        };
        if is_graphical(&d) {
            graphical += 1;
        } else {
            other += 1;
        }

        let built = construct_cost_matrix(&d).unwrap();
        assert!(built.optimal, "{d:?}");
        let stable = stable_graph_link_bias(&built.game);
        assert!(is_pairwise_stable_link_bias(&built.game, &stable.graph).unwrap());
        assert_eq!(stable.graph, built.graph);
        let dist = l1_distance(&stable.graph.degree_sequence(), &d).unwrap();
        assert_eq!(dist, built.distance);
        assert_eq!(dist == 0, is_graphical(&d));
        if n <= 7 {
            assert_eq!(
                dist as f64,
                brute_force_best_graph(&d).unwrap().objective,
                "{d:?}"
            );
        }
    }
    assert!(
        graphical >= 50 && other >= 50,
        "{graphical} graphical, {other} not"
    );
}
