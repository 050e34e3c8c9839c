//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its timing (run with `--nocapture` to see them).

use std::time::{Duration, Instant};

use digraph_balance::balance::{run_wbda, run_wbmda, BalancePolicy};
use digraph_balance::bench::benchmark_rounds;
use digraph_balance::birkhoff::{birkhoff_decompose, recombine, BirkhoffTerm};
use digraph_balance::characterize::{
    is_doubly_stochastic, is_doubly_stochasticable, is_weight_balanceable, normalize_rows,
    DsDecision, DsMethod,
};
use digraph_balance::cregular::{
    dsify_with_self_loops, run_cregular, run_cregular_with_schedule, CRegularVerdict,
};
use digraph_balance::cycles::{ds_cycle_set, principal_cycle_set};
use digraph_balance::fixtures;
use digraph_balance::flow::flow_feasibility_oracle;
use digraph_balance::generate::{
    for_each_strongly_connected_digraph, randomize_integer_weights, ring_with_chords,
    rng_from_seed,
};
use digraph_balance::graph::WeightedDigraph;
use digraph_balance::io::{parse_cregular_schedule, parse_choice_sequence};
use digraph_balance::matrix::RationalMatrix;
use digraph_balance::weight::ExactWeight;

fn fixture_text(name: &str) -> String {
    let path = format!(
        "{}/../../fixtures/{name}",
        env!("CARGO_MANIFEST_DIR")
    );
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("read {path}: {e}"))
}

fn report(criterion: usize, started: Instant, budget: Duration, detail: &str) {
    let elapsed = started.elapsed();
    println!(
        "ACCEPTANCE {criterion}: PASS — {detail} ({} ms)",
        elapsed.as_millis()
    );
    assert!(
        elapsed < budget,
        "criterion {criterion} exceeded its {budget:?} budget: {elapsed:?}"
    );
}

fn integers(values: &[i64]) -> Vec<ExactWeight> {
    values.iter().map(|&v| ExactWeight::from_integer(v)).collect()
}

#[test]
fn criterion_01_min_weight_replay() {
    let started = Instant::now();
    let choices = parse_choice_sequence(&fixture_text("fig4.choices.json")).unwrap();
    let trace = run_wbda(
        &fixtures::fig2a(),
        &BalancePolicy::Replay(choices),
        None,
    )
    .unwrap();
    assert!(trace.converged());
    assert_eq!(trace.rounds(), 6);
    assert_eq!(
        trace.lyapunov_values(),
        integers(&[6, 4, 4, 4, 4, 4, 0])
    );
    assert_eq!(
        trace.final_graph.to_matrix(),
        fixtures::fig2a_balanced_matrix()
    );
    report(
        1,
        started,
        Duration::from_secs(1),
        "min-weight replay converges in 6 rounds with descent values 6,4,4,4,4,4,0",
    );
}

#[test]
fn criterion_02_min_imbalance_replays() {
    let started = Instant::now();
    let fig7 = parse_choice_sequence(&fixture_text("fig7.choices.json")).unwrap();
    let trace = run_wbmda(&fixtures::fig6(), &BalancePolicy::Replay(fig7), None).unwrap();
    assert!(trace.converged());
    assert_eq!(trace.rounds(), 3);
    let expected_three_rounds = RationalMatrix::from_integer_rows(&[
        &[0, 2, 0, 0, 0],
        &[0, 0, 1, 1, 0],
        &[0, 0, 0, 2, 0],
        &[2, 0, 0, 0, 1],
        &[0, 0, 1, 0, 0],
    ]);
    assert_eq!(trace.final_graph.to_matrix(), expected_three_rounds);

    let fig8 = parse_choice_sequence(&fixture_text("fig8.choices.json")).unwrap();
    let trace = run_wbmda(&fixtures::fig6(), &BalancePolicy::Replay(fig8), None).unwrap();
    assert!(trace.converged());
    assert_eq!(trace.rounds(), 6);
    let expected_alternative = RationalMatrix::from_integer_rows(&[
        &[0, 2, 0, 0, 0],
        &[0, 0, 1, 1, 0],
        &[0, 0, 0, 3, 0],
        &[2, 0, 0, 0, 2],
        &[0, 0, 2, 0, 0],
    ]);
    assert_eq!(trace.final_graph.to_matrix(), expected_alternative);
    report(
        2,
        started,
        Duration::from_secs(1),
        "min-imbalance replays: 3 rounds, and 6 rounds under the fair-decision alternative",
    );
}

#[test]
fn criterion_03_load_height_replay() {
    let started = Instant::now();
    let schedule = parse_cregular_schedule(&fixture_text("fig10.schedule.json")).unwrap();
    let (verdict, trace) =
        run_cregular_with_schedule(&fixtures::fig9(), 3, &schedule).unwrap();
    assert_eq!(trace.iterations(), 5);
    let CRegularVerdict::CRegular { assignment } = verdict else {
        panic!("expected the 3-regular verdict");
    };
    let matrix = assignment.to_matrix();
    assert_eq!(matrix, fixtures::fig9_three_regular_matrix());
    let three = ExactWeight::from_integer(3);
    for v in 0..4 {
        assert_eq!(matrix.row_sum(v), three);
        assert_eq!(matrix.column_sum(v), three);
    }
    report(
        3,
        started,
        Duration::from_secs(1),
        "load/height replay reaches the 3-regular verdict in 5 iterations",
    );
}

#[test]
fn criterion_04_self_loop_pipeline() {
    let started = Instant::now();
    let ds = dsify_with_self_loops(&fixtures::fig2a()).unwrap();
    assert_eq!(ds.to_matrix(), fixtures::fig2a_doubly_stochastic_matrix());
    report(
        4,
        started,
        Duration::from_secs(1),
        "self-loop pipeline reproduces the worked doubly stochastic matrix entry for entry",
    );
}

#[test]
fn criterion_05_characterization_verdicts() {
    let started = Instant::now();
    for (graph, expect_ds) in [
        (fixtures::fig1(), false),
        (fixtures::fig2a(), false),
        (fixtures::fig2b(), true),
    ] {
        assert!(is_weight_balanceable(&graph).0);
        let decision = is_doubly_stochasticable(&graph, DsMethod::CycleCover).unwrap();
        assert_eq!(decision.is_doubly_stochasticable(), expect_ds);
        if let DsDecision::Yes { certificate } = decision {
            assert!(is_doubly_stochastic(&certificate.to_matrix()));
            assert_eq!(certificate.edge_count(), graph.edge_count());
        }
    }
    // the positive certificate is exactly half the two-spanning-cycle sum
    let DsDecision::Yes { certificate } =
        is_doubly_stochasticable(&fixtures::fig2b(), DsMethod::CycleCover).unwrap()
    else {
        panic!("fig2b must be doubly stochasticable");
    };
    assert_eq!(
        certificate.to_matrix(),
        fixtures::fig2b_balanced_matrix().scale(&ExactWeight::new(1, 2))
    );
    let cover = ds_cycle_set(&fixtures::fig9()).unwrap().unwrap();
    assert_eq!(cover.cardinality, 2);
    report(
        5,
        started,
        Duration::from_secs(5),
        "balanceable/doubly-stochasticable verdicts and certificates match on all four examples",
    );
}

#[test]
fn criterion_06_random_convergence() {
    let started = Instant::now();
    let mut runs = 0usize;
    let mut graphs = 0usize;
    for trial in 0..500usize {
        let n = 3 + trial % 10; // 3..=12, 50 graphs each
        let mut rng = rng_from_seed(0xC0FFEE ^ trial as u64);
        let extra = trial % (n * (n - 2) / 2 + 1);
        let base = ring_with_chords(n, extra, &mut rng);
        let g = randomize_integer_weights(&base, 9, &mut rng);
        graphs += 1;
        let budget = n.pow(5);
        for min_imbalance in [false, true] {
            let trace = if min_imbalance {
                run_wbmda(&g, &BalancePolicy::LowestIndex, Some(budget)).unwrap()
            } else {
                run_wbda(&g, &BalancePolicy::LowestIndex, Some(budget)).unwrap()
            };
            assert!(trace.converged(), "n={n} trial={trial} failed to converge");
            assert!(trace.rounds() <= budget);
            for pair in trace.records.windows(2) {
                assert!(pair[1].lyapunov <= pair[0].lyapunov, "descent violated");
            }
            for record in &trace.records {
                let total: ExactWeight = record.imbalances.iter().sum();
                assert!(total.is_zero(), "imbalances must cancel");
            }
            assert!(trace.final_graph.all_weights_positive());
            runs += 1;
        }
    }
    report(
        6,
        started,
        Duration::from_secs(60),
        &format!(
            "both protocols converged within n^5 rounds on {graphs} random digraphs ({runs} runs)"
        ),
    );
}

#[test]
fn criterion_07_oracle_equivalence() {
    let started = Instant::now();
    let checked = std::cell::Cell::new(0usize);
    let check = |g: &WeightedDigraph| {
        let c = (g.edge_count() - g.order() + 1) as u64;
        let by_cover = is_doubly_stochasticable(g, DsMethod::CycleCover)
            .unwrap()
            .is_doubly_stochasticable();
        let by_flow = flow_feasibility_oracle(g, c).unwrap().0;
        let (by_protocol, _) = run_cregular(g, c, None).unwrap();
        assert_eq!(by_cover, by_flow, "cover vs flow disagree on {g:?}");
        assert_eq!(
            by_flow,
            by_protocol.is_c_regular(),
            "flow vs protocol disagree on {g:?}"
        );
        checked.set(checked.get() + 1);
    };
    for n in 2..=5 {
        for_each_strongly_connected_digraph(n, check);
    }
    let exhaustive = checked.get();
    for trial in 0..400usize {
        let n = 6 + trial % 2;
        let mut rng = rng_from_seed(0xA11CE ^ trial as u64);
        let extra = trial % (n * 2);
        let g = ring_with_chords(n, extra, &mut rng);
        check(&g);
    }
    let sampled = checked.get() - exhaustive;
    report(
        7,
        started,
        Duration::from_secs(600),
        &format!(
            "cycle-cover, flow, and protocol verdicts agree on {exhaustive} exhaustive digraphs (n <= 5) plus {sampled} random samples (n = 6, 7)"
        ),
    );
}

#[test]
fn criterion_08_normalization_theorem() {
    let started = Instant::now();
    let mut equal_count = 0usize;
    let mut unequal_count = 0usize;
    for trial in 0..1000usize {
        let n = 3 + trial % 4; // 3..=6
        let mut rng = rng_from_seed(0xBEEF ^ trial as u64);
        let balanced = if trial % 4 == 0 {
            // a constant-weight ring: equal row sums by construction
            let ring = ring_with_chords(n, 0, &mut rng);
            randomize_integer_weights(&ring, 1, &mut rng)
                .to_matrix()
                .scale(&ExactWeight::from_integer((1 + trial % 7) as i64))
        } else {
            let base = ring_with_chords(n, trial % n + 1, &mut rng);
            let g = randomize_integer_weights(&base, 9, &mut rng);
            run_wbda(&g, &BalancePolicy::LowestIndex, None)
                .unwrap()
                .final_graph
                .to_matrix()
        };
        let sums = balanced.row_sums();
        let equal = sums.windows(2).all(|p| p[0] == p[1]);
        if equal {
            equal_count += 1;
        } else {
            unequal_count += 1;
        }
        let phi = normalize_rows(&balanced).unwrap();
        assert_eq!(
            is_doubly_stochastic(&phi),
            equal,
            "normalization equivalence failed for {balanced:?}"
        );
    }
    assert!(equal_count > 0 && unequal_count > 0, "both classes must occur");
    report(
        8,
        started,
        Duration::from_secs(30),
        &format!(
            "row normalization is doubly stochastic iff row sums agree on 1000 balanced matrices ({equal_count} equal, {unequal_count} unequal)"
        ),
    );
}

#[test]
fn criterion_09_ds_character_bounds() {
    let started = Instant::now();
    let doubly_stochasticable = std::cell::Cell::new(0usize);
    let check = |g: &WeightedDigraph| {
        let Some(cover) = ds_cycle_set(g).unwrap() else {
            return;
        };
        doubly_stochasticable.set(doubly_stochasticable.get() + 1);
        let profile = g.degree_profile();
        let degree_bound = profile
            .out_degree
            .iter()
            .chain(profile.in_degree.iter())
            .copied()
            .max()
            .unwrap();
        assert!(degree_bound <= cover.cardinality, "lower bound violated on {g:?}");
        assert!(
            cover.cardinality <= g.edge_count() - g.order() + 1,
            "upper bound violated on {g:?}"
        );
        let principal = principal_cycle_set(g).unwrap();
        assert!(cover.cardinality >= principal.cardinality, "ds < p on {g:?}");
    };
    for n in 2..=5 {
        for_each_strongly_connected_digraph(n, check);
    }
    for trial in 0..300usize {
        let n = 6 + trial % 3; // 6..=8
        let mut rng = rng_from_seed(0xDEED ^ trial as u64);
        let g = ring_with_chords(n, trial % (2 * n), &mut rng);
        check(&g);
    }
    let doubly_stochasticable = doubly_stochasticable.get();
    assert!(doubly_stochasticable > 50);
    report(
        9,
        started,
        Duration::from_secs(120),
        &format!(
            "degree bound <= ds <= |E|-|V|+1 and ds >= p on {doubly_stochasticable} doubly stochasticable graphs (n <= 8)"
        ),
    );
}

#[test]
fn criterion_10_birkhoff_oracle() {
    let started = Instant::now();
    use rand::seq::SliceRandom;
    use rand::Rng;
    for trial in 0..200usize {
        let mut rng = rng_from_seed(0xB1BF ^ trial as u64);
        let n = 2 + trial % 5; // 2..=6
        let term_count = 1 + rng.gen_range(0..6);
        let mut numerators: Vec<i64> = (0..term_count).map(|_| rng.gen_range(1..100)).collect();
        let total: i64 = numerators.iter().sum();
        let mut matrix = RationalMatrix::zero(n);
        for numerator in numerators.drain(..) {
            let mut image: Vec<usize> = (0..n).collect();
            image.shuffle(&mut rng);
            let term = BirkhoffTerm {
                coefficient: ExactWeight::new(numerator, total),
                permutation: image,
            };
            matrix = matrix.add(&term.permutation_matrix().scale(&term.coefficient));
        }
        assert!(is_doubly_stochastic(&matrix));
        let terms = birkhoff_decompose(&matrix).unwrap();
        assert_eq!(recombine(n, &terms), matrix, "recombination mismatch");
        assert!(
            terms.len() <= (n - 1) * (n - 1) + 1,
            "too many terms for n={n}: {}",
            terms.len()
        );
        let total: ExactWeight = terms.iter().map(|t| t.coefficient.clone()).sum();
        assert_eq!(total, ExactWeight::one());
    }
    report(
        10,
        started,
        Duration::from_secs(30),
        "200 random doubly stochastic matrices decompose and recombine exactly within the term bound",
    );
}

#[test]
fn criterion_11_round_complexity_benchmark() {
    let started = Instant::now();
    let sizes: Vec<usize> = (4..=14).collect();
    let reportout = benchmark_rounds(&sizes, 50, 0);
    for row in &reportout.rows {
        assert!(
            row.max_rounds <= row.bound,
            "n={} max rounds {} exceeded n^4 = {}",
            row.n,
            row.max_rounds,
            row.bound
        );
    }
    let exponent = reportout
        .fitted_exponent
        .map(|e| format!("{e:.2}"))
        .unwrap_or_else(|| "n/a".to_string());
    for row in &reportout.rows {
        println!(
            "  bench n={:2} trials={} mean={:8.2} max={:6} bound={}",
            row.n, row.trials, row.mean_rounds, row.max_rounds, row.bound
        );
    }
    report(
        11,
        started,
        Duration::from_secs(120),
        &format!(
            "min-imbalance rounds stay under n^4 for n in 4..=14 (50 trials each); fitted exponent {exponent}"
        ),
    );
}
