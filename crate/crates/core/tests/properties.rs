use proptest::prelude::*;

use gwishart::io::{compute_scatter, format_matrix, parse_graph, parse_matrix, Dataset};
use gwishart::linalg::spd_inverse;
use gwishart::{
    complete_cholesky, gwishart_complete, CholeskyFactor, CompletionSettings, DrjSummary, Engine,
    Graph, Matrix,
};

fn graph_strategy(max_p: usize) -> impl Strategy<Value = Graph> {
    (2..=max_p).prop_flat_map(|p| {
        let pairs = p * (p - 1) / 2;
        (Just(p), 0u64..(1u64 << pairs)).prop_map(|(p, mask)| Graph::from_mask(p, mask))
    })
}

fn spd_strategy(p: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-1.0f64..1.0, p * (p + 2)).prop_map(move |v| {
        let b = Matrix::from_row_slice(p, p + 2, &v);
        &b * b.transpose() + Matrix::identity(p, p) * 0.3
    })
}

fn graph_and_sigma() -> impl Strategy<Value = (Graph, Matrix)> {
    graph_strategy(7).prop_flat_map(|g| {
        let p = g.p();
        (Just(g), spd_strategy(p))
    })
}

proptest! {
    #[test]
    fn toggle_is_an_involution(g in graph_strategy(8), a in 0usize..8, b in 0usize..8) {
        let (l, m) = (a % g.p(), b % g.p());
        prop_assume!(l != m);
        let once = g.toggle_edge(l, m).unwrap();
        prop_assert_ne!(once.has_edge(l, m), g.has_edge(l, m));
        prop_assert_eq!(once.toggle_edge(l, m).unwrap(), g);
    }

    #[test]
    fn cliques_cover_every_edge_and_node(g in graph_strategy(8)) {
        let cliques = g.maximal_cliques();
        for c in cliques.iter() {
            prop_assert!(g.is_clique(c));
            let extendable = (0..g.p()).any(|v| !c.contains(&v) && c.iter().all(|&u| g.has_edge(u, v)));
            prop_assert!(!extendable, "clique {:?} is not maximal", c);
        }
        for (i, j) in g.edges() {
            prop_assert!(cliques.iter().any(|c| c.contains(&i) && c.contains(&j)));
        }
        for v in 0..g.p() {
            prop_assert!(cliques.iter().any(|c| c.contains(&v)));
        }
    }

    #[test]
    fn nu_counts_sum_to_edge_count(g in graph_strategy(10)) {
        prop_assert_eq!(g.nu_counts().iter().sum::<usize>(), g.n_edges());
    }

    #[test]
    fn completion_respects_the_graph((g, sigma) in graph_and_sigma()) {
        for engine in [Engine::NodeWise, Engine::CliqueIps] {
            let k = gwishart_complete(&sigma, &g, &CompletionSettings::with_engine(engine)).unwrap();
            let kinv = spd_inverse(&k).unwrap();
            for i in 0..g.p() {
                for j in 0..g.p() {
                    if i == j || g.has_edge(i, j) {
                        prop_assert!((kinv[(i, j)] - sigma[(i, j)]).abs() < 1e-6);
                    } else {
                        prop_assert_eq!(k[(i, j)], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn completed_factor_gives_zero_pattern((g, sigma) in graph_and_sigma()) {
        let mut phi = gwishart::chol_upper(&sigma).unwrap().into_inner();
        // Arbitrary free entries; the determined ones are overwritten.
        phi[(0, g.p() - 1)] += 0.5;
        let done = complete_cholesky(&CholeskyFactor::from_upper(phi).unwrap(), &g).unwrap();
        let k = done.matrix().transpose() * done.matrix();
        for i in 0..g.p() {
            for j in i + 1..g.p() {
                if !g.has_edge(i, j) {
                    prop_assert!(k[(i, j)].abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn centered_scatter_ignores_shifts(
        values in prop::collection::vec(-5.0f64..5.0, 12),
        shift in prop::collection::vec(-100.0f64..100.0, 3),
    ) {
        let rows = Matrix::from_row_slice(4, 3, &values);
        let shifted = Matrix::from_fn(4, 3, |i, j| rows[(i, j)] + shift[j]);
        let a = compute_scatter(&Dataset { rows, variable_names: None }, true);
        let b = compute_scatter(&Dataset { rows: shifted, variable_names: None }, true);
        prop_assert!((a.u.as_matrix() - b.u.as_matrix()).amax() < 1e-10);
    }

    #[test]
    fn graph_text_round_trips(g in graph_strategy(9)) {
        prop_assert_eq!(parse_graph(&g.to_string(), "memory").unwrap(), g);
    }

    #[test]
    fn matrix_csv_round_trips(m in spd_strategy(5)) {
        let back = parse_matrix(&format_matrix(&m), "memory").unwrap();
        prop_assert_eq!(back.as_matrix(), &m);
    }

    #[test]
    fn summary_merge_is_order_free(
        a in prop::collection::vec((0u64..8, any::<bool>()), 1..30),
        b in prop::collection::vec((0u64..8, any::<bool>()), 1..30),
    ) {
        let fill = |v: &[(u64, bool)]| {
            let mut s = DrjSummary::new(3);
            for &(mask, acc) in v {
                s.record(&Graph::from_mask(3, mask), &Matrix::identity(3, 3), acc);
            }
            s
        };
        let mut ab = fill(&a);
        ab.merge(&fill(&b)).unwrap();
        let mut ba = fill(&b);
        ba.merge(&fill(&a)).unwrap();
        let mut all = fill(&[a.clone(), b.clone()].concat());
        all.merge(&DrjSummary::new(3)).unwrap();
        prop_assert_eq!(ab.edge_prob(), ba.edge_prob());
        prop_assert!((ab.edge_prob() - all.edge_prob()).amax() < 1e-12);
        prop_assert_eq!(ab.n_accepted(), all.n_accepted());
        for mask in 0..8 {
            let g = Graph::from_mask(3, mask);
            prop_assert!((ab.frequency_of(&g).unwrap() - all.frequency_of(&g).unwrap()).abs() < 1e-12);
        }
        let e = ab.edge_prob();
        prop_assert!(e.iter().all(|&x| (0.0..=1.0).contains(&x)));
        prop_assert!((0.0..=1.0).contains(&ab.accept_rate()));
    }
}
