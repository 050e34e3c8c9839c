//! Round-based distributed weight balancing.
//!
//! Two synchronous protocols drive a strongly connected digraph to zero
//! imbalance in finitely many rounds. In every round each vertex with
//! positive imbalance (more weighted in- than out-degree) adds its entire
//! imbalance to exactly one out-edge, all vertices reading the same
//! pre-round snapshot:
//!
//! * **min-weight rule** ([`run_wbda`]): the receiving edge is one of the
//!   vertex's minimum-weight out-edges;
//! * **min-imbalance rule** ([`run_wbmda`]): the receiving edge points to an
//!   out-neighbor of minimum imbalance, with a fair-decision rotation
//!   breaking repeated ties. This variant reads neighbor imbalances, so it
//!   communicates over the mirror digraph.
//!
//! Both maps are set-valued: several edges may qualify. The engine resolves
//! the choice either by the `LowestIndex` policy (smallest target index,
//! deterministic) or by replaying an explicit per-round choice sequence, and
//! records a [`RoundTrace`] with the Lyapunov value `V = Σ|imbalance|` per
//! round. `V` is non-increasing along every legal evolution and hits zero
//! exactly on the weight-balanced assignments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Connectivity, WeightedDigraph};
use crate::weight::ExactWeight;

/// Total absolute imbalance `Σ_v |in(v) - out(v)|`; zero exactly when the
/// assignment is weight-balanced.
pub fn lyapunov(g: &WeightedDigraph) -> ExactWeight {
    g.degree_profile().imbalance.iter().map(|w| w.abs()).sum()
}

/// One explicit decision: `from` sends its imbalance along `(from, to)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundChoice {
    pub from: usize,
    pub to: usize,
}

/// A complete per-round choice sequence for replaying a run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiceSequence {
    pub rounds: Vec<Vec<RoundChoice>>,
}

/// How the engine resolves set-valued choices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BalancePolicy {
    /// Pick the smallest legal target index (fair-decision rotation still
    /// applies to ties under the min-imbalance rule).
    LowestIndex,
    /// Replay an explicit choice sequence, validating every choice against
    /// the legal set of its round.
    Replay(ChoiceSequence),
}

impl BalancePolicy {
    pub fn label(&self) -> &'static str {
        match self {
            BalancePolicy::LowestIndex => "lowest_index",
            BalancePolicy::Replay(_) => "replay",
        }
    }
}

/// Which balancing rule a run used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BalanceAlgorithm {
    #[serde(rename = "wbda")]
    MinWeight,
    #[serde(rename = "wbmda")]
    MinImbalance,
}

/// Per-vertex memory for the fair-decision rule: the position (in the
/// vertex's sorted out-neighbor list) of its previous tie choice.
///
/// When a vertex faces a tie it may not repeat its previous tie choice while
/// other tied candidates remain; the `LowestIndex` policy realizes this as a
/// round-robin scan of the out-neighbor list starting after the last pick.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FairDecisionMemory {
    last_tie_position: Vec<Option<usize>>,
}

impl FairDecisionMemory {
    pub fn new(n: usize) -> Self {
        FairDecisionMemory {
            last_tie_position: vec![None; n],
        }
    }
}

/// An edge weight change applied in one round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeUpdate {
    pub from: usize,
    pub to: usize,
    pub old: ExactWeight,
    pub new: ExactWeight,
}

/// State snapshot after a round (round 0 is the initial state).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub lyapunov: ExactWeight,
    pub imbalances: Vec<ExactWeight>,
    /// Changes applied in this round (empty for round 0).
    pub updates: Vec<EdgeUpdate>,
}

/// How a run ended.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BalanceOutcome {
    /// Lyapunov value reached zero after this many rounds.
    Converged { rounds: usize },
    /// Round budget exhausted before convergence (reported, not an error).
    MaxRoundsExceeded { rounds: usize },
}

/// Full audit record of a run: one [`RoundRecord`] per state, the outcome,
/// and the final weight assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundTrace {
    pub algorithm: BalanceAlgorithm,
    pub policy: String,
    pub records: Vec<RoundRecord>,
    pub outcome: BalanceOutcome,
    pub final_graph: WeightedDigraph,
}

impl RoundTrace {
    pub fn rounds(&self) -> usize {
        match self.outcome {
            BalanceOutcome::Converged { rounds } => rounds,
            BalanceOutcome::MaxRoundsExceeded { rounds } => rounds,
        }
    }

    pub fn converged(&self) -> bool {
        matches!(self.outcome, BalanceOutcome::Converged { .. })
    }

    pub fn lyapunov_values(&self) -> Vec<ExactWeight> {
        self.records.iter().map(|r| r.lyapunov.clone()).collect()
    }
}

/// Default round budget: `n^5`, comfortably above the `O(n^4)` worst case of
/// the min-imbalance rule.
pub fn default_max_rounds(n: usize) -> usize {
    n.saturating_pow(5)
}

/// The legal targets of `v` under the min-weight rule: out-neighbors
/// reachable over a positive edge of minimum weight (self-loops excluded).
fn min_weight_targets(g: &WeightedDigraph, v: usize) -> Vec<usize> {
    let mut minimum: Option<&ExactWeight> = None;
    for j in g.out_neighbors(v) {
        let w = g.weight(v, j).expect("listed out-neighbor");
        if w.is_positive() && minimum.is_none_or(|m| w < m) {
            minimum = Some(w);
        }
    }
    let Some(minimum) = minimum else {
        return Vec::new();
    };
    g.out_neighbors(v)
        .into_iter()
        .filter(|&j| g.weight(v, j).expect("listed out-neighbor") == minimum)
        .collect()
}

/// The legal targets of `v` under the min-imbalance rule: out-neighbors of
/// minimum imbalance in the pre-round snapshot (self-loops excluded).
fn min_imbalance_targets(
    g: &WeightedDigraph,
    imbalances: &[ExactWeight],
    v: usize,
) -> Vec<usize> {
    let neighbors = g.out_neighbors(v);
    let Some(minimum) = neighbors.iter().map(|&j| &imbalances[j]).min() else {
        return Vec::new();
    };
    neighbors
        .iter()
        .copied()
        .filter(|&j| &imbalances[j] == minimum)
        .collect()
}

fn pick_explicit(
    round: usize,
    v: usize,
    legal: &[usize],
    choices: &[RoundChoice],
) -> Result<usize> {
    let chosen: Vec<&RoundChoice> = choices.iter().filter(|c| c.from == v).collect();
    match chosen.as_slice() {
        [single] => {
            if legal.contains(&single.to) {
                Ok(single.to)
            } else {
                Err(Error::InvalidChoice {
                    round,
                    reason: format!(
                        "target {} is not a legal choice for vertex {} (legal: {:?})",
                        single.to, v, legal
                    ),
                })
            }
        }
        [] => Err(Error::InvalidChoice {
            round,
            reason: format!("no choice supplied for positively imbalanced vertex {v}"),
        }),
        _ => Err(Error::InvalidChoice {
            round,
            reason: format!("multiple choices supplied for vertex {v}"),
        }),
    }
}

/// Round-robin tie resolution: first legal target scanning the out-neighbor
/// list cyclically from just past the previous tie pick.
fn fair_scan(neighbors: &[usize], legal: &[usize], last: Option<usize>) -> usize {
    let len = neighbors.len();
    let start = last.map_or(0, |p| (p + 1) % len);
    for offset in 0..len {
        let position = (start + offset) % len;
        if legal.contains(&neighbors[position]) {
            return position;
        }
    }
    unreachable!("legal targets are a subset of the out-neighbor list")
}

struct RoundResult {
    graph: WeightedDigraph,
    updates: Vec<EdgeUpdate>,
}

/// One synchronous round of the min-weight rule. `choices` must list exactly
/// one legal target per positively imbalanced vertex when present; with
/// `None` the smallest legal target is taken.
fn min_weight_round(
    g: &WeightedDigraph,
    round: usize,
    choices: Option<&[RoundChoice]>,
) -> Result<RoundResult> {
    let imbalances = g.degree_profile().imbalance;
    let mut next = g.clone();
    let mut updates = Vec::new();
    let mut senders = 0usize;
    for v in 0..g.order() {
        if !imbalances[v].is_positive() {
            continue;
        }
        senders += 1;
        let legal = min_weight_targets(g, v);
        assert!(
            !legal.is_empty(),
            "vertex {v} has positive imbalance but no positive out-edge; \
             the graph violates the protocol preconditions"
        );
        let target = match choices {
            Some(list) => pick_explicit(round, v, &legal, list)?,
            None => legal[0],
        };
        let old = g.weight(v, target).expect("legal target edge").clone();
        next.add_to_weight(v, target, &imbalances[v]);
        updates.push(EdgeUpdate {
            from: v,
            to: target,
            old,
            new: next.weight(v, target).unwrap().clone(),
        });
    }
    if let Some(list) = choices {
        if list.len() != senders {
            return Err(Error::InvalidChoice {
                round,
                reason: format!(
                    "round lists {} choices but {} vertices have positive imbalance",
                    list.len(),
                    senders
                ),
            });
        }
    }
    Ok(RoundResult {
        graph: next,
        updates,
    })
}

/// One synchronous round of the min-imbalance rule, advancing the
/// fair-decision memory on every tie.
fn min_imbalance_round(
    g: &WeightedDigraph,
    memory: &mut FairDecisionMemory,
    round: usize,
    choices: Option<&[RoundChoice]>,
) -> Result<RoundResult> {
    let imbalances = g.degree_profile().imbalance;
    let mut next = g.clone();
    let mut updates = Vec::new();
    let mut senders = 0usize;
    for v in 0..g.order() {
        if !imbalances[v].is_positive() {
            continue;
        }
        senders += 1;
        let neighbors = g.out_neighbors(v);
        let legal = min_imbalance_targets(g, &imbalances, v);
        assert!(
            !legal.is_empty(),
            "vertex {v} has positive imbalance but no out-neighbor; \
             the graph violates the protocol preconditions"
        );
        let tie = legal.len() > 1;
        let target = match choices {
            Some(list) => {
                let target = pick_explicit(round, v, &legal, list)?;
                if tie {
                    if let Some(last) = memory.last_tie_position[v] {
                        if neighbors[last] == target && legal.iter().any(|&j| j != target) {
                            return Err(Error::InvalidChoice {
                                round,
                                reason: format!(
                                    "fair-decision rule: vertex {v} repeated tie choice {target}"
                                ),
                            });
                        }
                    }
                }
                target
            }
            None => {
                if tie {
                    let position =
                        fair_scan(&neighbors, &legal, memory.last_tie_position[v]);
                    neighbors[position]
                } else {
                    legal[0]
                }
            }
        };
        if tie {
            let position = neighbors
                .iter()
                .position(|&j| j == target)
                .expect("target is an out-neighbor");
            memory.last_tie_position[v] = Some(position);
        }
        let old = g.weight(v, target).expect("edge to out-neighbor").clone();
        next.add_to_weight(v, target, &imbalances[v]);
        updates.push(EdgeUpdate {
            from: v,
            to: target,
            old,
            new: next.weight(v, target).unwrap().clone(),
        });
    }
    if let Some(list) = choices {
        if list.len() != senders {
            return Err(Error::InvalidChoice {
                round,
                reason: format!(
                    "round lists {} choices but {} vertices have positive imbalance",
                    list.len(),
                    senders
                ),
            });
        }
    }
    Ok(RoundResult {
        graph: next,
        updates,
    })
}

/// One synchronous min-weight round with the smallest-target policy.
/// Weight-balanced inputs are fixed points.
pub fn wbda_step(g: &WeightedDigraph) -> WeightedDigraph {
    min_weight_round(g, 0, None).expect("policy round cannot fail").graph
}

/// One synchronous min-weight round with explicit choices.
pub fn wbda_step_with_choices(
    g: &WeightedDigraph,
    choices: &[RoundChoice],
) -> Result<WeightedDigraph> {
    Ok(min_weight_round(g, 0, Some(choices))?.graph)
}

/// One synchronous min-imbalance round with the smallest-target policy.
pub fn wbmda_step(g: &WeightedDigraph, memory: &mut FairDecisionMemory) -> WeightedDigraph {
    min_imbalance_round(g, memory, 0, None)
        .expect("policy round cannot fail")
        .graph
}

/// One synchronous min-imbalance round with explicit choices, validated
/// against the legal sets and the fair-decision rule.
pub fn wbmda_step_with_choices(
    g: &WeightedDigraph,
    memory: &mut FairDecisionMemory,
    choices: &[RoundChoice],
) -> Result<WeightedDigraph> {
    Ok(min_imbalance_round(g, memory, 0, Some(choices))?.graph)
}

fn run_protocol(
    g: &WeightedDigraph,
    algorithm: BalanceAlgorithm,
    policy: &BalancePolicy,
    max_rounds: Option<usize>,
) -> Result<RoundTrace> {
    if g.classify_connectivity().class != Connectivity::StronglyConnected {
        return Err(Error::NotStronglyConnected);
    }
    let max_rounds = max_rounds.unwrap_or_else(|| default_max_rounds(g.order()));
    let replay = match policy {
        BalancePolicy::Replay(sequence) => Some(sequence),
        BalancePolicy::LowestIndex => None,
    };
    let mut memory = FairDecisionMemory::new(g.order());
    let mut current = g.clone();
    let mut records = Vec::new();
    let mut round = 0usize;

    let outcome = loop {
        let value = lyapunov(&current);
        let imbalances = current.degree_profile().imbalance;
        debug_assert!(
            imbalances.iter().sum::<ExactWeight>().is_zero(),
            "imbalances must cancel"
        );
        if let Some(previous) = records.last() {
            let previous: &RoundRecord = previous;
            debug_assert!(value <= previous.lyapunov, "Lyapunov value increased");
        }
        if records.is_empty() {
            records.push(RoundRecord {
                round: 0,
                lyapunov: value.clone(),
                imbalances: imbalances.clone(),
                updates: Vec::new(),
            });
        }
        if value.is_zero() {
            if let Some(sequence) = replay {
                if round < sequence.rounds.len() {
                    return Err(Error::InvalidChoice {
                        round,
                        reason: format!(
                            "replay lists {} rounds but the run converged after {}",
                            sequence.rounds.len(),
                            round
                        ),
                    });
                }
            }
            break BalanceOutcome::Converged { rounds: round };
        }
        if round >= max_rounds {
            break BalanceOutcome::MaxRoundsExceeded { rounds: round };
        }
        let choices = match replay {
            Some(sequence) => Some(
                sequence
                    .rounds
                    .get(round)
                    .map(|r| r.as_slice())
                    .ok_or_else(|| Error::InvalidChoice {
                        round,
                        reason: "replay sequence ended before convergence".to_string(),
                    })?,
            ),
            None => None,
        };
        let result = match algorithm {
            BalanceAlgorithm::MinWeight => min_weight_round(&current, round + 1, choices)?,
            BalanceAlgorithm::MinImbalance => {
                min_imbalance_round(&current, &mut memory, round + 1, choices)?
            }
        };
        current = result.graph;
        round += 1;
        records.push(RoundRecord {
            round,
            lyapunov: lyapunov(&current),
            imbalances: current.degree_profile().imbalance,
            updates: result.updates,
        });
    };

    Ok(RoundTrace {
        algorithm,
        policy: policy.label().to_string(),
        records,
        outcome,
        final_graph: current,
    })
}

/// Runs the min-weight protocol to convergence (or the round budget,
/// default `n^5`). Requires a strongly connected graph with positive
/// weights.
pub fn run_wbda(
    g: &WeightedDigraph,
    policy: &BalancePolicy,
    max_rounds: Option<usize>,
) -> Result<RoundTrace> {
    run_protocol(g, BalanceAlgorithm::MinWeight, policy, max_rounds)
}

/// Runs the min-imbalance protocol to convergence (or the round budget).
/// Vertices read their out-neighbors' imbalances each round, i.e. the
/// protocol communicates over the mirror digraph.
pub fn run_wbmda(
    g: &WeightedDigraph,
    policy: &BalancePolicy,
    max_rounds: Option<usize>,
) -> Result<RoundTrace> {
    run_protocol(g, BalanceAlgorithm::MinImbalance, policy, max_rounds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn choice_rounds(rounds: &[&[(usize, usize)]]) -> ChoiceSequence {
        ChoiceSequence {
            rounds: rounds
                .iter()
                .map(|round| {
                    round
                        .iter()
                        .map(|&(from, to)| RoundChoice { from, to })
                        .collect()
                })
                .collect(),
        }
    }

    fn fig4_choices() -> ChoiceSequence {
        choice_rounds(&[
            &[(0, 1), (2, 0)],
            &[(0, 1)],
            &[(1, 2)],
            &[(2, 0)],
            &[(0, 1)],
            &[(1, 3)],
        ])
    }

    #[test]
    fn lyapunov_values_on_examples() {
        assert_eq!(lyapunov(&fixtures::fig2a()), ExactWeight::from_integer(6));
        assert_eq!(lyapunov(&fixtures::fig1()), ExactWeight::from_integer(2));
        let balanced =
            WeightedDigraph::from_matrix(&fixtures::fig2b_balanced_matrix(), false).unwrap();
        assert!(lyapunov(&balanced).is_zero());
    }

    #[test]
    fn min_weight_replay_reproduces_the_six_round_run() {
        let trace = run_wbda(
            &fixtures::fig2a(),
            &BalancePolicy::Replay(fig4_choices()),
            None,
        )
        .unwrap();
        assert_eq!(trace.rounds(), 6);
        let values: Vec<i64> = [6, 4, 4, 4, 4, 4, 0]
            .into_iter()
            .collect();
        assert_eq!(
            trace.lyapunov_values(),
            values
                .iter()
                .map(|&x| ExactWeight::from_integer(x))
                .collect::<Vec<_>>()
        );
        assert_eq!(
            trace.final_graph.to_matrix(),
            fixtures::fig2a_balanced_matrix()
        );
    }

    #[test]
    fn lowest_index_matches_the_replayed_run_on_fig2a() {
        let trace = run_wbda(&fixtures::fig2a(), &BalancePolicy::LowestIndex, None).unwrap();
        assert_eq!(trace.rounds(), 6);
        assert_eq!(
            trace.final_graph.to_matrix(),
            fixtures::fig2a_balanced_matrix()
        );
    }

    #[test]
    fn balanced_input_is_a_fixed_point() {
        let balanced =
            WeightedDigraph::from_matrix(&fixtures::fig2b_balanced_matrix(), false).unwrap();
        assert_eq!(wbda_step(&balanced), balanced);
        let trace = run_wbda(&balanced, &BalancePolicy::LowestIndex, None).unwrap();
        assert_eq!(trace.rounds(), 0);

        let mut memory = FairDecisionMemory::new(5);
        assert_eq!(wbmda_step(&balanced, &mut memory), balanced);

        let triangle = WeightedDigraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let trace = run_wbda(&triangle, &BalancePolicy::LowestIndex, None).unwrap();
        assert_eq!(trace.rounds(), 0);
    }

    #[test]
    fn single_unique_minimum_updates_deterministically() {
        // vertex 2 is the only positive-imbalance vertex and has a unique
        // minimum-weight out-edge
        let mut g = fixtures::fig1();
        g.set_weight(2, 3, ExactWeight::from_integer(5)).unwrap();
        // imbalances: v0: +1, v2: -1 -> only v0 acts, unique out-edge (0,1)
        let next = wbda_step(&g);
        assert_eq!(*next.weight(0, 1).unwrap(), ExactWeight::from_integer(2));
    }

    #[test]
    fn min_imbalance_replay_three_rounds() {
        let fig7 = choice_rounds(&[&[(2, 3)], &[(3, 0)], &[(0, 1)]]);
        let trace = run_wbmda(&fixtures::fig6(), &BalancePolicy::Replay(fig7), None).unwrap();
        assert_eq!(trace.rounds(), 3);
        let two = ExactWeight::from_integer(2);
        for edge in [(0, 1), (2, 3), (3, 0)] {
            assert_eq!(trace.final_graph.weight(edge.0, edge.1), Some(&two));
        }
        for edge in [(1, 2), (1, 3), (3, 4), (4, 2)] {
            assert_eq!(
                trace.final_graph.weight(edge.0, edge.1),
                Some(&ExactWeight::one())
            );
        }

        // lowest_index resolves the round-2 tie the same way
        let trace = run_wbmda(&fixtures::fig6(), &BalancePolicy::LowestIndex, None).unwrap();
        assert_eq!(trace.rounds(), 3);
    }

    #[test]
    fn fair_decision_forces_alternation() {
        // picking the other tied neighbor first lengthens the run to 6 rounds
        let fig8 = choice_rounds(&[
            &[(2, 3)],
            &[(3, 4)],
            &[(4, 2)],
            &[(2, 3)],
            &[(3, 0)],
            &[(0, 1)],
        ]);
        let trace = run_wbmda(&fixtures::fig6(), &BalancePolicy::Replay(fig8), None).unwrap();
        assert_eq!(trace.rounds(), 6);
        let m = trace.final_graph.to_matrix();
        let expected = crate::matrix::RationalMatrix::from_integer_rows(&[
            &[0, 2, 0, 0, 0],
            &[0, 0, 1, 1, 0],
            &[0, 0, 0, 3, 0],
            &[2, 0, 0, 0, 2],
            &[0, 0, 2, 0, 0],
        ]);
        assert_eq!(m, expected);

        // repeating the round-2 tie choice at the next tie is illegal
        let repeat = choice_rounds(&[
            &[(2, 3)],
            &[(3, 4)],
            &[(4, 2)],
            &[(2, 3)],
            &[(3, 4)],
            &[(0, 1)],
        ]);
        let err = run_wbmda(&fixtures::fig6(), &BalancePolicy::Replay(repeat), None);
        assert!(matches!(err, Err(Error::InvalidChoice { round: 5, .. })));
    }

    #[test]
    fn replay_validation_rejects_illegal_targets() {
        // round 1: vertex 0 must send to its unique minimum edge (0,1);
        // vertex 2's only out-edge is (2,0)
        let bad = choice_rounds(&[&[(0, 1), (2, 3)]]);
        let err = run_wbda(&fixtures::fig2a(), &BalancePolicy::Replay(bad), None);
        assert!(matches!(err, Err(Error::InvalidChoice { round: 1, .. })));
    }

    #[test]
    fn not_strongly_connected_is_rejected() {
        let arc = WeightedDigraph::from_edges(2, &[(0, 1)]).unwrap();
        assert!(matches!(
            run_wbda(&arc, &BalancePolicy::LowestIndex, None),
            Err(Error::NotStronglyConnected)
        ));
    }

    #[test]
    fn max_rounds_is_reported_not_fatal() {
        let trace = run_wbda(&fixtures::fig2a(), &BalancePolicy::LowestIndex, Some(2)).unwrap();
        assert_eq!(
            trace.outcome,
            BalanceOutcome::MaxRoundsExceeded { rounds: 2 }
        );
    }
}
