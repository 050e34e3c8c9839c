//! Property-based invariants spanning the whole library.

use digraph_balance::balance::{run_wbda, run_wbmda, BalancePolicy};
use digraph_balance::characterize::{
    is_doubly_stochastic, is_doubly_stochasticable, normalize_rows, DsDecision, DsMethod,
};
use digraph_balance::cregular::{run_cregular, CRegularVerdict};
use digraph_balance::cycles::{
    ds_cycle_set, enumerate_disjoint_cycle_unions, principal_cycle_set,
};
use digraph_balance::flow::flow_feasibility_oracle;
use digraph_balance::generate::{ring_with_chords, randomize_integer_weights, rng_from_seed};
use digraph_balance::graph::{Connectivity, WeightedDigraph};
use digraph_balance::io::{parse_graph, serialize_graph, GraphFormat};
use digraph_balance::weight::ExactWeight;
use proptest::prelude::*;

/// Seeded random strongly connected digraph with unit weights.
fn sc_graph(n: usize, extra: usize, seed: u64) -> WeightedDigraph {
    let mut rng = rng_from_seed(seed);
    ring_with_chords(n, extra, &mut rng)
}

fn sc_graph_strategy() -> impl Strategy<Value = WeightedDigraph> {
    (2usize..=8, 0usize..=10, any::<u64>())
        .prop_map(|(n, extra, seed)| sc_graph(n, extra, seed))
}

/// Any digraph (not necessarily connected): random edge subset.
fn any_graph_strategy() -> impl Strategy<Value = WeightedDigraph> {
    (2usize..=7, any::<u64>()).prop_map(|(n, seed)| {
        let mut rng = rng_from_seed(seed);
        let mut g = WeightedDigraph::new(n);
        use rand::Rng;
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.gen_bool(0.35) {
                    g.set_weight(i, j, ExactWeight::from_integer(rng.gen_range(1..6)))
                        .unwrap();
                }
            }
        }
        g
    })
}

/// Brute-force reachability via transitive closure.
fn reachability(g: &WeightedDigraph) -> Vec<Vec<bool>> {
    let n = g.order();
    let mut reach = vec![vec![false; n]; n];
    for (i, j, _) in g.edges() {
        reach[i][j] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);
            }
        }
    }
    reach
}

proptest! {
    #[test]
    fn imbalances_always_cancel(g in any_graph_strategy()) {
        let total: ExactWeight = g.degree_profile().imbalance.iter().sum();
        prop_assert!(total.is_zero());
    }

    #[test]
    fn union_is_commutative_and_associative(
        a in any_graph_strategy(),
        b in any_graph_strategy(),
        c in any_graph_strategy(),
    ) {
        let n = a.order().max(b.order()).max(c.order());
        let pad = |g: &WeightedDigraph| {
            let mut padded = WeightedDigraph::new(n);
            for (i, j, w) in g.edges() {
                padded.set_weight(i, j, w.clone()).unwrap();
            }
            padded
        };
        let (a, b, c) = (pad(&a), pad(&b), pad(&c));
        prop_assert_eq!(a.weighted_union(&b), b.weighted_union(&a));
        prop_assert_eq!(
            a.weighted_union(&b).weighted_union(&c),
            a.weighted_union(&b.weighted_union(&c))
        );
    }

    #[test]
    fn connectivity_matches_transitive_closure_oracle(g in any_graph_strategy()) {
        let reach = reachability(&g);
        let n = g.order();
        let mut strongly_connected = true;
        let mut semiconnected = true;
        for i in 0..n {
            for j in 0..n {
                if i != j && !reach[i][j] {
                    strongly_connected = false;
                }
                if reach[i][j] && !reach[j][i] {
                    semiconnected = false;
                }
            }
        }
        let expected = if strongly_connected {
            Connectivity::StronglyConnected
        } else if semiconnected {
            Connectivity::StronglySemiconnected
        } else {
            Connectivity::Neither
        };
        prop_assert_eq!(g.classify_connectivity().class, expected);
    }

    #[test]
    fn mirror_is_idempotent_on_edge_sets(g in any_graph_strategy()) {
        let m = g.mirror();
        let mm = m.mirror();
        let edges_m: Vec<_> = m.edges().map(|(i, j, _)| (i, j)).collect();
        let edges_mm: Vec<_> = mm.edges().map(|(i, j, _)| (i, j)).collect();
        prop_assert_eq!(edges_m, edges_mm);
    }

    #[test]
    fn graph_serialization_round_trips(g in sc_graph_strategy(), seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let g = randomize_integer_weights(&g, 9, &mut rng);
        for format in [GraphFormat::Json, GraphFormat::EdgeList, GraphFormat::DotSubset] {
            let text = serialize_graph(&g, format);
            let back = parse_graph(&text, format).unwrap();
            prop_assert_eq!(&back, &g);
        }
    }

    #[test]
    fn balancing_runs_satisfy_the_descent_invariants(
        g in sc_graph_strategy(),
        seed in any::<u64>(),
        use_min_imbalance in any::<bool>(),
    ) {
        let mut rng = rng_from_seed(seed);
        let g = randomize_integer_weights(&g, 9, &mut rng);
        let trace = if use_min_imbalance {
            run_wbmda(&g, &BalancePolicy::LowestIndex, None).unwrap()
        } else {
            run_wbda(&g, &BalancePolicy::LowestIndex, None).unwrap()
        };
        prop_assert!(trace.converged());
        // Lyapunov non-increasing, imbalances cancel per round
        for pair in trace.records.windows(2) {
            prop_assert!(pair[1].lyapunov <= pair[0].lyapunov);
        }
        for record in &trace.records {
            let total: ExactWeight = record.imbalances.iter().sum();
            prop_assert!(total.is_zero());
            for update in &record.updates {
                // weights only ever increase, by the sender's imbalance
                prop_assert!(update.new > update.old);
            }
        }
        prop_assert!(trace.final_graph.all_weights_positive());
        // integer input stays integer
        for (_, _, w) in trace.final_graph.edges() {
            prop_assert!(w.is_integer());
        }
        // fixed point reached
        prop_assert!(digraph_balance::lyapunov(&trace.final_graph).is_zero());
    }

    #[test]
    fn wbda_fixed_points_are_exactly_the_balanced_assignments(g in sc_graph_strategy()) {
        let step = digraph_balance::wbda_step(&g);
        let balanced = digraph_balance::is_weight_balanced(&g).is_weight_balanced;
        prop_assert_eq!(step == g, balanced);
    }

    #[test]
    fn cycle_certificates_cover_their_graph(g in sc_graph_strategy()) {
        let cert = principal_cycle_set(&g).unwrap();
        prop_assert!(cert.covers(&g));
        if let Some(ds) = ds_cycle_set(&g).unwrap() {
            prop_assert!(ds.covers(&g));
            prop_assert!(ds.members.iter().all(|m| m.is_spanning(g.order())));
            // a DS cover is a principal-style cover too, so ds >= p
            prop_assert!(ds.cardinality >= cert.cardinality);
        }
    }

    #[test]
    fn ds_cover_exists_iff_spanning_unions_cover_every_edge(g in sc_graph_strategy()) {
        let spanning = enumerate_disjoint_cycle_unions(&g, true).unwrap();
        let mut covered: std::collections::BTreeSet<(usize, usize)> =
            std::collections::BTreeSet::new();
        for u in &spanning {
            covered.extend(u.edges());
        }
        let all_covered = g.edges().all(|(i, j, _)| covered.contains(&(i, j)));
        prop_assert_eq!(ds_cycle_set(&g).unwrap().is_some(), all_covered);
    }

    #[test]
    fn ds_character_bounds_hold(g in sc_graph_strategy()) {
        if let Some(cover) = ds_cycle_set(&g).unwrap() {
            let profile = g.degree_profile();
            let degree_bound = profile
                .out_degree
                .iter()
                .chain(profile.in_degree.iter())
                .copied()
                .max()
                .unwrap();
            prop_assert!(cover.cardinality >= degree_bound);
            prop_assert!(cover.cardinality <= g.edge_count() - g.order() + 1);
        }
    }

    #[test]
    fn ds_deciders_agree_and_certify(g in sc_graph_strategy()) {
        let by_cover = is_doubly_stochasticable(&g, DsMethod::CycleCover).unwrap();
        let by_flow = is_doubly_stochasticable(&g, DsMethod::Flow).unwrap();
        prop_assert_eq!(
            by_cover.is_doubly_stochasticable(),
            by_flow.is_doubly_stochasticable()
        );
        for decision in [by_cover, by_flow] {
            if let DsDecision::Yes { certificate } = decision {
                prop_assert!(is_doubly_stochastic(&certificate.to_matrix()));
                prop_assert_eq!(certificate.edge_count(), g.edge_count());
                prop_assert!(certificate.all_weights_positive());
            }
        }
    }

    #[test]
    fn cregular_verdict_agrees_with_the_flow_oracle(
        g in (2usize..=12, 0usize..=14, any::<u64>())
            .prop_map(|(n, extra, seed)| sc_graph(n, extra, seed)),
    ) {
        let c = (g.edge_count() - g.order() + 1) as u64;
        let (feasible, _) = flow_feasibility_oracle(&g, c).unwrap();
        let (verdict, _) = run_cregular(&g, c, None).unwrap();
        prop_assert_eq!(verdict.is_c_regular(), feasible);
        if let CRegularVerdict::CRegular { assignment } = verdict {
            let m = assignment.to_matrix();
            let target = ExactWeight::from_integer(c as i64);
            for v in 0..m.order() {
                prop_assert_eq!(m.row_sum(v), target.clone());
                prop_assert_eq!(m.column_sum(v), target.clone());
            }
            for (_, _, w) in assignment.edges() {
                prop_assert!(*w >= ExactWeight::one() && *w <= target);
            }
        }
    }

    #[test]
    fn cregular_runs_keep_load_and_height_invariants(
        g in (2usize..=8, 0usize..=8, any::<u64>())
            .prop_map(|(n, extra, seed)| sc_graph(n, extra, seed)),
    ) {
        let c = (g.edge_count() - g.order() + 1) as u64;
        let (_, trace) = run_cregular(&g, c, None).unwrap();
        for record in &trace.records {
            // source and target loads cancel globally
            let total: ExactWeight = record
                .agents
                .iter()
                .map(|a| a.source_load.clone() + a.target_load.clone())
                .sum();
            prop_assert!(total.is_zero());
            let network_size = 2 * g.order() as u64 + 2;
            for agent in &record.agents {
                prop_assert!(agent.source_height >= 2);
                prop_assert!(agent.target_height >= 1);
                prop_assert!(agent.source_height < network_size);
                prop_assert!(agent.target_height < network_size);
                // source loads never go negative: out-degree stays <= C
                prop_assert!(!agent.source_load.is_negative());
            }
        }
        // heights never decrease
        for v in 0..g.order() {
            for pair in trace.records.windows(2) {
                prop_assert!(pair[1].agents[v].target_height >= pair[0].agents[v].target_height);
                prop_assert!(pair[1].agents[v].source_height >= pair[0].agents[v].source_height);
            }
        }
    }

    #[test]
    fn self_loop_procedure_always_lands_doubly_stochastic(
        g in sc_graph_strategy(),
        seed in any::<u64>(),
    ) {
        let mut rng = rng_from_seed(seed);
        let g = randomize_integer_weights(&g, 5, &mut rng);
        let ds = digraph_balance::dsify_with_self_loops(&g).unwrap();
        prop_assert!(is_doubly_stochastic(&ds.to_matrix()));
        prop_assert!(ds.all_weights_positive());
    }

    #[test]
    fn row_normalization_theorem_both_directions(
        g in sc_graph_strategy(),
        seed in any::<u64>(),
    ) {
        let mut rng = rng_from_seed(seed);
        let weighted = randomize_integer_weights(&g, 9, &mut rng);
        let trace = run_wbda(&weighted, &BalancePolicy::LowestIndex, None).unwrap();
        let balanced = trace.final_graph.to_matrix();
        let phi = normalize_rows(&balanced).unwrap();
        let sums = balanced.row_sums();
        let equal_sums = sums.windows(2).all(|p| p[0] == p[1]);
        prop_assert_eq!(is_doubly_stochastic(&phi), equal_sums);
    }
}

#[test]
fn shipped_fixture_files_match_the_builtin_graphs() {
    use digraph_balance::fixtures;
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures");
    let load = |name: &str| {
        let text = std::fs::read_to_string(format!("{root}/{name}")).unwrap();
        parse_graph(&text, GraphFormat::Json).unwrap()
    };
    assert_eq!(load("fig1.json"), fixtures::fig1());
    assert_eq!(load("fig2a.json"), fixtures::fig2a());
    assert_eq!(load("fig2b.json"), fixtures::fig2b());
    assert_eq!(load("fig6.json"), fixtures::fig6());
    assert_eq!(load("fig9.json"), fixtures::fig9());
}
