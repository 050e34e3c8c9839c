//! Construction of doubly stochastic assignments: the self-loop procedure
//! and the load/height C-regular protocol.
//!
//! The self-loop route ([`dsify_with_self_loops`]) balances the graph with
//! the min-weight protocol, tops every vertex up to the maximum weighted
//! out-degree with a self-loop, and divides through. It always succeeds on a
//! strongly connected digraph, at the price of changing the graph structure.
//!
//! The C-regular protocol ([`run_cregular`]) keeps the structure intact. It
//! is a preflow push over the mirror digraph: starting from unit weights,
//! every vertex tracks a *source-load* `C - out(v)` (weight it still must
//! place on out-edges) and a *target-load* `in(v) - C` (excess arriving
//! weight), plus a height per side, initialized to `(2, 1)`. A vertex places
//! source-load on out-edges below weight `C` whose head's target height lies
//! below its own source height ("push forward"), and returns target-load
//! along in-edges above weight 1 whose tail's source height lies below its
//! own target height ("push backward"). A side stuck with load raises its
//! height just past its lowest usable counterpart ("increase target-height"
//! and its source-side twin). Weights stay integers in `[1, C]` throughout.
//!
//! These are exactly the moves of a preflow-push maximum-flow computation on
//! a bipartite network with a unit lower bound shifted off every edge, with
//! the per-vertex loads as node excesses. That correspondence supplies the
//! verdict rule: a height that reaches the network size while its side still
//! holds load certifies that the load can never drain, i.e. that no
//! C-regular assignment exists; the vertex announces and the run stops.
//! Conversely, when every load hits zero the weights are a C-regular
//! assignment, and dividing by `C` gives a doubly stochastic one.

use serde::{Deserialize, Serialize};

use crate::balance::{run_wbda, BalancePolicy};
use crate::error::{Error, Result};
use crate::graph::WeightedDigraph;
use crate::weight::ExactWeight;

/// Guard used when *replaying* a scheduled full-load backward push along an
/// in-edge of weight `a`.
///
/// `Relaxed` requires `a >= load + 1`, the exact condition for the edge to
/// keep weight at least 1 after returning the whole load, and is the
/// default. `Strict` requires `a >= load + 2`; it is stronger than the
/// weight floor needs and rejects schedules (including the shipped
/// four-vertex example) that the relaxed guard replays, so it exists only as
/// an audit mode. The default engine pushes `min(load, a - 1)` instead and
/// needs no guard.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
enum BackwardGuard {
    #[default]
    Relaxed,
    Strict,
}

impl BackwardGuard {
    fn allows(&self, edge_weight: &ExactWeight, load: &ExactWeight) -> bool {
        let floor = load + &ExactWeight::one();
        match self {
            BackwardGuard::Relaxed => *edge_weight >= floor,
            BackwardGuard::Strict => *edge_weight > floor,
        }
    }
}

/// Per-vertex protocol view: derived loads plus the height pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CRegularAgentState {
    pub source_load: ExactWeight,
    pub target_load: ExactWeight,
    pub source_height: u64,
    pub target_height: u64,
}

/// One protocol action.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CRegularAction {
    PushForward {
        vertex: usize,
        to: usize,
        amount: ExactWeight,
    },
    PushBackward {
        vertex: usize,
        from: usize,
        amount: ExactWeight,
    },
    RaiseTargetHeight {
        vertex: usize,
        new_height: u64,
    },
    RaiseSourceHeight {
        vertex: usize,
        new_height: u64,
    },
    Declare {
        vertex: usize,
    },
}

/// Snapshot after one iteration; iteration 1 is the freshly initialized
/// state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CRegularRecord {
    pub iteration: usize,
    pub actions: Vec<CRegularAction>,
    pub agents: Vec<CRegularAgentState>,
    /// Sum of the positive loads; zero exactly on convergence.
    pub positive_load: ExactWeight,
}

/// Verdict of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CRegularVerdict {
    /// The protocol converged; `assignment` is C-regular with integer
    /// weights in `[1, C]`.
    CRegular { assignment: WeightedDigraph },
    /// No C-regular assignment exists. `announcer` identifies the vertex
    /// that declared failure, or is `None` when the engine detected a sweep
    /// without any applicable action (a fixed point with leftover load,
    /// equally conclusive for the run).
    NotCRegular { announcer: Option<usize> },
}

impl CRegularVerdict {
    pub fn is_c_regular(&self) -> bool {
        matches!(self, CRegularVerdict::CRegular { .. })
    }
}

/// Audit trail of a run; `records.len()` counts iterations the way the
/// worked examples do (initial state included).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CRegularTrace {
    pub c: u64,
    pub records: Vec<CRegularRecord>,
}

impl CRegularTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }
}

/// An explicit schedule replaying a run batch by batch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CRegularSchedule {
    #[serde(default = "default_true")]
    pub relaxed_backward_guard: bool,
    pub steps: Vec<Vec<ScheduledAction>>,
}

fn default_true() -> bool {
    true
}

/// One schedulable action (amounts are implied by the current loads).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ScheduledAction {
    PushForward { vertex: usize, to: usize },
    PushBackward { vertex: usize, from: usize },
    RaiseTargetHeight { vertex: usize },
}

/// The protocol engine. Loads are always derived from the current weights,
/// so the load/weight consistency invariant holds by construction.
pub struct CRegularEngine {
    graph: WeightedDigraph,
    c: ExactWeight,
    c_raw: u64,
    source_height: Vec<u64>,
    target_height: Vec<u64>,
    max_in_source_height: Vec<u64>,
    guard: BackwardGuard,
    out_neighbors: Vec<Vec<usize>>,
    in_neighbors: Vec<Vec<usize>>,
    /// Node count of the underlying flow network (`2n + 2`); a height
    /// reaching it certifies unroutable load.
    network_size: u64,
}

/// Result of one default-schedule sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SweepOutcome {
    /// Applied these actions; the run continues.
    Progress(Vec<CRegularAction>),
    /// Every load is zero.
    Converged,
    /// A vertex announced that no C-regular assignment exists.
    Declared { vertex: usize },
    /// Loads remain but no action is applicable; the state is a fixed
    /// point. The default schedule always pushes, relabels, or declares, so
    /// this arm stays unreachable.
    Stalled,
}

/// Initializes the protocol: every edge gets unit weight, heights start at
/// `(2, 1)`. Requires `C >= max(max out-degree, max in-degree)`.
pub fn cregular_init(g: &WeightedDigraph, c: u64) -> Result<CRegularEngine> {
    let profile = g.degree_profile();
    let bound = profile
        .out_degree
        .iter()
        .chain(profile.in_degree.iter())
        .copied()
        .max()
        .unwrap_or(0) as u64;
    if c < bound {
        return Err(Error::CTooSmallForDegrees { c, bound });
    }
    let n = g.order();
    let mut unit = if g.allows_self_loops() {
        WeightedDigraph::new_with_self_loops(n)
    } else {
        WeightedDigraph::new(n)
    };
    // self-loops participate like any other edge here, so the neighbor
    // lists come straight from the edge set
    let mut out_neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut in_neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j, _) in g.edges() {
        unit.set_weight(i, j, ExactWeight::one())?;
        out_neighbors[i].push(j);
        in_neighbors[j].push(i);
    }
    let source_height = vec![2u64; n];
    let max_in_source_height = in_neighbors
        .iter()
        .map(|ins| ins.iter().map(|&k| source_height[k]).max().unwrap_or(0))
        .collect();
    Ok(CRegularEngine {
        out_neighbors,
        in_neighbors,
        graph: unit,
        c: ExactWeight::from_integer(c as i64),
        c_raw: c,
        source_height,
        target_height: vec![1u64; n],
        max_in_source_height,
        guard: BackwardGuard::Relaxed,
        network_size: 2 * n as u64 + 2,
    })
}

impl CRegularEngine {
    pub fn graph(&self) -> &WeightedDigraph {
        &self.graph
    }

    pub fn c(&self) -> u64 {
        self.c_raw
    }

    fn source_load(&self, v: usize) -> ExactWeight {
        let out: ExactWeight = self
            .out_neighbors[v]
            .iter()
            .map(|&j| self.graph.weight(v, j).expect("out edge"))
            .sum();
        &self.c - &out
    }

    fn target_load(&self, v: usize) -> ExactWeight {
        let incoming: ExactWeight = self
            .in_neighbors[v]
            .iter()
            .map(|&k| self.graph.weight(k, v).expect("in edge"))
            .sum();
        &incoming - &self.c
    }

    pub fn agent_states(&self) -> Vec<CRegularAgentState> {
        (0..self.graph.order())
            .map(|v| CRegularAgentState {
                source_load: self.source_load(v),
                target_load: self.target_load(v),
                source_height: self.source_height[v],
                target_height: self.target_height[v],
            })
            .collect()
    }

    pub fn positive_load(&self) -> ExactWeight {
        let mut total = ExactWeight::zero();
        for v in 0..self.graph.order() {
            let s = self.source_load(v);
            if s.is_positive() {
                total += s;
            }
            let t = self.target_load(v);
            if t.is_positive() {
                total += t;
            }
        }
        total
    }

    /// Out-neighbors `v` may push forward to: edge weight below `C` and
    /// target height below `v`'s source height.
    fn forward_targets(&self, v: usize) -> Vec<usize> {
        self.out_neighbors[v]
            .iter()
            .copied()
            .filter(|&j| {
                *self.graph.weight(v, j).expect("out edge") < self.c
                    && self.source_height[v] > self.target_height[j]
            })
            .collect()
    }

    /// In-neighbors `v` may return the *whole* load to under the replay
    /// guard: enough weight on the edge and source height below `v`'s target
    /// height.
    fn full_backward_sources(&self, v: usize, load: &ExactWeight) -> Vec<usize> {
        self.in_neighbors[v]
            .iter()
            .copied()
            .filter(|&k| {
                self.guard
                    .allows(self.graph.weight(k, v).expect("in edge"), load)
                    && self.target_height[v] > self.source_height[k]
            })
            .collect()
    }

    /// In-neighbors `v` may return at least one unit to: edge weight above
    /// the floor and source height below `v`'s target height.
    fn partial_backward_sources(&self, v: usize) -> Vec<usize> {
        self.in_neighbors[v]
            .iter()
            .copied()
            .filter(|&k| {
                *self.graph.weight(k, v).expect("in edge") > ExactWeight::one()
                    && self.target_height[v] > self.source_height[k]
            })
            .collect()
    }

    fn apply_forward(&mut self, v: usize, to: usize, amount: ExactWeight) -> CRegularAction {
        debug_assert!(amount.is_positive());
        self.graph.add_to_weight(v, to, &amount);
        debug_assert!(*self.graph.weight(v, to).unwrap() <= self.c);
        CRegularAction::PushForward {
            vertex: v,
            to,
            amount,
        }
    }

    fn apply_backward(&mut self, v: usize, from: usize, amount: ExactWeight) -> CRegularAction {
        debug_assert!(amount.is_positive());
        self.graph
            .add_to_weight(from, v, &(-amount.clone()));
        debug_assert!(*self.graph.weight(from, v).unwrap() >= ExactWeight::one());
        CRegularAction::PushBackward {
            vertex: v,
            from,
            amount,
        }
    }

    /// Smallest height among the counterparts `v`'s source side could still
    /// push toward, the implicit way back to the flow source included.
    fn source_relabel_height(&self, v: usize) -> Option<u64> {
        let mut minimum: Option<u64> = None;
        for &j in &self.out_neighbors[v] {
            if *self.graph.weight(v, j).expect("out edge") < self.c {
                minimum = Some(minimum.map_or(self.target_height[j], |m| {
                    m.min(self.target_height[j])
                }));
            }
        }
        let degree = self.out_neighbors[v].len() as u64;
        if degree < self.c_raw {
            // load was injected here at initialization and may be given up
            minimum = Some(minimum.map_or(self.network_size, |m| m.min(self.network_size)));
        }
        minimum.map(|m| m + 1)
    }

    /// Smallest height among the counterparts `v`'s target side could still
    /// return load to.
    fn target_relabel_height(&self, v: usize) -> Option<u64> {
        self.in_neighbors[v]
            .iter()
            .filter(|&&k| *self.graph.weight(k, v).expect("in edge") > ExactWeight::one())
            .map(|&k| self.source_height[k])
            .min()
            .map(|m| m + 1)
    }

    /// One sweep of the default deterministic schedule: every vertex in
    /// ascending order runs its forward rule, then every vertex its backward
    /// rule, loads recomputed after each action.
    ///
    /// Push amounts are capped by the edge's remaining room (`C - a` forward,
    /// `a - 1` backward), so no single move can strand load behind the weight
    /// bounds. Forward ties prefer a receiver with no pending excess and fall
    /// back to the lowest index; stacking load on an already-excess receiver
    /// forces it to bounce the surplus back. Backward ties take the lowest
    /// index. A side stuck with load raises its height just past its lowest
    /// still-usable counterpart; a height reaching the flow-network size
    /// means the load can never drain, and the vertex declares.
    pub fn sweep(&mut self) -> SweepOutcome {
        let n = self.graph.order();
        let mut actions = Vec::new();
        for v in 0..n {
            let load = self.source_load(v);
            if !load.is_positive() {
                continue;
            }
            let targets = self.forward_targets(v);
            let preferred = targets
                .iter()
                .copied()
                .find(|&j| !self.target_load(j).is_positive())
                .or_else(|| targets.first().copied());
            match preferred {
                Some(to) => {
                    let room = &self.c - self.graph.weight(v, to).expect("out edge");
                    let amount = load.min(room);
                    actions.push(self.apply_forward(v, to, amount));
                }
                None => match self.source_relabel_height(v) {
                    Some(new_height) if new_height < self.network_size => {
                        self.source_height[v] = new_height;
                        actions.push(CRegularAction::RaiseSourceHeight {
                            vertex: v,
                            new_height,
                        });
                    }
                    _ => return SweepOutcome::Declared { vertex: v },
                },
            }
        }
        for v in 0..n {
            let load = self.target_load(v);
            if !load.is_positive() {
                continue;
            }
            let sources = self.partial_backward_sources(v);
            match sources.first() {
                Some(&from) => {
                    let room =
                        self.graph.weight(from, v).expect("in edge") - &ExactWeight::one();
                    let amount = load.min(room);
                    actions.push(self.apply_backward(v, from, amount));
                }
                None => match self.target_relabel_height(v) {
                    Some(new_height) if new_height < self.network_size => {
                        debug_assert!(new_height > self.target_height[v]);
                        self.target_height[v] = new_height;
                        actions.push(CRegularAction::RaiseTargetHeight {
                            vertex: v,
                            new_height,
                        });
                    }
                    _ => return SweepOutcome::Declared { vertex: v },
                },
            }
        }
        if self.positive_load().is_zero() {
            SweepOutcome::Converged
        } else if actions.is_empty() {
            SweepOutcome::Stalled
        } else {
            SweepOutcome::Progress(actions)
        }
    }

    /// Applies one explicitly scheduled action, validating its guard.
    pub fn apply_scheduled(
        &mut self,
        iteration: usize,
        action: &ScheduledAction,
    ) -> Result<CRegularAction> {
        let invalid = |reason: String| Error::InvalidChoice {
            round: iteration,
            reason,
        };
        match *action {
            ScheduledAction::PushForward { vertex, to } => {
                if !self.source_load(vertex).is_positive() {
                    return Err(invalid(format!("vertex {vertex} has no source load")));
                }
                if !self.forward_targets(vertex).contains(&to) {
                    return Err(invalid(format!(
                        "vertex {vertex} may not push forward to {to}"
                    )));
                }
                let amount = self.source_load(vertex);
                Ok(self.apply_forward(vertex, to, amount))
            }
            ScheduledAction::PushBackward { vertex, from } => {
                let load = self.target_load(vertex);
                if !load.is_positive() {
                    return Err(invalid(format!("vertex {vertex} has no target load")));
                }
                if !self.full_backward_sources(vertex, &load).contains(&from) {
                    return Err(invalid(format!(
                        "vertex {vertex} may not push backward to {from}"
                    )));
                }
                Ok(self.apply_backward(vertex, from, load))
            }
            ScheduledAction::RaiseTargetHeight { vertex } => {
                let load = self.target_load(vertex);
                if !load.is_positive() {
                    return Err(invalid(format!("vertex {vertex} has no target load")));
                }
                if !self.full_backward_sources(vertex, &load).is_empty() {
                    return Err(invalid(format!(
                        "vertex {vertex} could push backward instead of raising its height"
                    )));
                }
                let new_height = self.max_in_source_height[vertex] + 1;
                if new_height <= self.target_height[vertex] {
                    return Err(invalid(format!(
                        "raising vertex {vertex}'s target height would not change it"
                    )));
                }
                self.target_height[vertex] = new_height;
                Ok(CRegularAction::RaiseTargetHeight {
                    vertex,
                    new_height,
                })
            }
        }
    }

    fn record(&self, iteration: usize, actions: Vec<CRegularAction>) -> CRegularRecord {
        CRegularRecord {
            iteration,
            actions,
            agents: self.agent_states(),
            positive_load: self.positive_load(),
        }
    }
}

/// Default sweep budget: `16 · |V|² · |E|`, a generous multiple of the
/// preflow-push step bound. Exceeding it signals an engine bug rather than
/// an undecidable instance.
pub fn default_max_steps(g: &WeightedDigraph) -> usize {
    16usize
        .saturating_mul(g.order() * g.order())
        .saturating_mul(g.edge_count().max(1))
}

/// Runs the protocol under the default deterministic schedule until it
/// converges or a vertex declares that no C-regular assignment exists.
pub fn run_cregular(
    g: &WeightedDigraph,
    c: u64,
    max_steps: Option<usize>,
) -> Result<(CRegularVerdict, CRegularTrace)> {
    let mut engine = cregular_init(g, c)?;
    let max_steps = max_steps.unwrap_or_else(|| default_max_steps(g));
    let mut records = vec![engine.record(1, Vec::new())];
    if engine.positive_load().is_zero() {
        return Ok((
            CRegularVerdict::CRegular {
                assignment: engine.graph.clone(),
            },
            CRegularTrace { c, records },
        ));
    }
    for _ in 0..max_steps {
        let outcome = engine.sweep();
        let iteration = records.len() + 1;
        match outcome {
            SweepOutcome::Progress(actions) => {
                records.push(engine.record(iteration, actions));
            }
            SweepOutcome::Converged => {
                records.push(engine.record(iteration, Vec::new()));
                return Ok((
                    CRegularVerdict::CRegular {
                        assignment: engine.graph.clone(),
                    },
                    CRegularTrace { c, records },
                ));
            }
            SweepOutcome::Declared { vertex } => {
                records.push(engine.record(iteration, vec![CRegularAction::Declare { vertex }]));
                return Ok((
                    CRegularVerdict::NotCRegular {
                        announcer: Some(vertex),
                    },
                    CRegularTrace { c, records },
                ));
            }
            SweepOutcome::Stalled => {
                records.push(engine.record(iteration, Vec::new()));
                return Ok((
                    CRegularVerdict::NotCRegular { announcer: None },
                    CRegularTrace { c, records },
                ));
            }
        }
    }
    Err(Error::MaxStepsExceeded { max_steps })
}

/// Replays an explicit schedule, validating every action against its guard.
/// The run must end with all loads at zero; anything else fails validation.
pub fn run_cregular_with_schedule(
    g: &WeightedDigraph,
    c: u64,
    schedule: &CRegularSchedule,
) -> Result<(CRegularVerdict, CRegularTrace)> {
    let mut engine = cregular_init(g, c)?;
    engine.guard = if schedule.relaxed_backward_guard {
        BackwardGuard::Relaxed
    } else {
        BackwardGuard::Strict
    };
    let mut records = vec![engine.record(1, Vec::new())];
    for batch in &schedule.steps {
        let iteration = records.len() + 1;
        let mut actions = Vec::new();
        for action in batch {
            actions.push(engine.apply_scheduled(iteration, action)?);
        }
        records.push(engine.record(iteration, actions));
    }
    let trace = CRegularTrace { c, records };
    if engine.positive_load().is_zero() {
        Ok((
            CRegularVerdict::CRegular {
                assignment: engine.graph.clone(),
            },
            trace,
        ))
    } else {
        Err(Error::InvalidChoice {
            round: trace.records.len(),
            reason: "schedule ended with nonzero loads".to_string(),
        })
    }
}

/// Makes a strongly connected digraph doubly stochastic by adding
/// self-loops: balance with the min-weight protocol, add a self-loop of
/// weight `max_out - out(v)` wherever the balanced out-degree falls short of
/// the maximum, then divide every weight by the maximum.
pub fn dsify_with_self_loops(g: &WeightedDigraph) -> Result<WeightedDigraph> {
    dsify_with_self_loops_using(g, &BalancePolicy::LowestIndex)
}

/// As [`dsify_with_self_loops`], with an explicit policy for the balancing
/// stage.
pub fn dsify_with_self_loops_using(
    g: &WeightedDigraph,
    policy: &BalancePolicy,
) -> Result<WeightedDigraph> {
    let trace = run_wbda(g, policy, None)?;
    if !trace.converged() {
        return Err(Error::MaxStepsExceeded {
            max_steps: trace.rounds(),
        });
    }
    let balanced = trace.final_graph;
    let profile = balanced.degree_profile();
    let mut result = WeightedDigraph::new_with_self_loops(g.order());
    let max_out = profile
        .weighted_out
        .iter()
        .cloned()
        .max()
        .unwrap_or_else(ExactWeight::zero);
    if max_out.is_zero() {
        // edgeless graph: only the one-vertex digraph reaches this point, and
        // the unit self-loop is its doubly stochastic assignment
        result.set_weight(0, 0, ExactWeight::one())?;
        return Ok(result);
    }
    for (i, j, w) in balanced.edges() {
        result.set_weight(i, j, w / &max_out)?;
    }
    for v in 0..g.order() {
        let deficiency = &max_out - &profile.weighted_out[v];
        if deficiency.is_positive() {
            result.set_weight(v, v, &deficiency / &max_out)?;
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characterize::{is_c_regular, is_doubly_stochastic};
    use crate::fixtures;

    fn fig10_schedule() -> CRegularSchedule {
        CRegularSchedule {
            relaxed_backward_guard: true,
            steps: vec![
                vec![
                    ScheduledAction::PushForward { vertex: 0, to: 1 },
                    ScheduledAction::PushForward { vertex: 1, to: 3 },
                    ScheduledAction::PushForward { vertex: 2, to: 3 },
                    ScheduledAction::PushForward { vertex: 3, to: 2 },
                ],
                vec![ScheduledAction::RaiseTargetHeight { vertex: 3 }],
                vec![ScheduledAction::PushBackward { vertex: 3, from: 2 }],
                vec![ScheduledAction::PushForward { vertex: 2, to: 0 }],
            ],
        }
    }

    #[test]
    fn initial_loads_on_fig9() {
        let engine = cregular_init(&fixtures::fig9(), 3).unwrap();
        let states = engine.agent_states();
        let expect = [(2i64, -1i64), (1, -2), (1, -1), (1, -1)];
        for (v, (s, t)) in expect.iter().enumerate() {
            assert_eq!(states[v].source_load, ExactWeight::from_integer(*s), "v{v}");
            assert_eq!(states[v].target_load, ExactWeight::from_integer(*t), "v{v}");
            assert_eq!(states[v].source_height, 2);
            assert_eq!(states[v].target_height, 1);
        }
    }

    #[test]
    fn initial_loads_on_fig2a_at_c4() {
        let engine = cregular_init(&fixtures::fig2a(), 4).unwrap();
        let states = engine.agent_states();
        let source: Vec<i64> = vec![3, 2, 3, 1, 3];
        let target: Vec<i64> = vec![-2, -3, -1, -3, -3];
        for v in 0..5 {
            assert_eq!(states[v].source_load, ExactWeight::from_integer(source[v]));
            assert_eq!(states[v].target_load, ExactWeight::from_integer(target[v]));
        }
    }

    #[test]
    fn c_below_degree_bound_is_rejected() {
        assert!(matches!(
            cregular_init(&fixtures::fig2a(), 2),
            Err(Error::CTooSmallForDegrees { c: 2, bound: 3 })
        ));
    }

    #[test]
    fn replayed_schedule_matches_the_five_iteration_run() {
        let (verdict, trace) = run_cregular_with_schedule(&fixtures::fig9(), 3, &fig10_schedule())
            .unwrap();
        assert_eq!(trace.iterations(), 5);
        let CRegularVerdict::CRegular { assignment } = verdict else {
            panic!("expected convergence");
        };
        assert_eq!(assignment.to_matrix(), fixtures::fig9_three_regular_matrix());
        // iteration 3 is the height raise
        assert_eq!(
            trace.records[2].actions,
            vec![CRegularAction::RaiseTargetHeight {
                vertex: 3,
                new_height: 3
            }]
        );
    }

    #[test]
    fn strict_guard_rejects_the_replayed_backward_push() {
        let mut schedule = fig10_schedule();
        schedule.relaxed_backward_guard = false;
        let result = run_cregular_with_schedule(&fixtures::fig9(), 3, &schedule);
        assert!(matches!(result, Err(Error::InvalidChoice { round: 4, .. })));
    }

    #[test]
    fn default_schedule_converges_on_fig9() {
        let (verdict, trace) =
            run_cregular(&fixtures::fig9(), 3, None).unwrap();
        let CRegularVerdict::CRegular { assignment } = verdict else {
            panic!("expected convergence, got {trace:?}", trace = trace.records.len());
        };
        let verdict = is_c_regular(&assignment);
        assert!(verdict.is_c_regular);
        assert_eq!(verdict.c, ExactWeight::from_integer(3));
    }

    #[test]
    fn complete_digraph_converges_at_its_cover_bound() {
        // 12 edges, 4 vertices: C = 9. Piling several full pushes onto one
        // receiver would wedge the run; the default sweep spreads them.
        let mut edges = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    edges.push((i, j));
                }
            }
        }
        let k4 = WeightedDigraph::from_edges(4, &edges).unwrap();
        let (verdict, _) = run_cregular(&k4, 9, None).unwrap();
        let CRegularVerdict::CRegular { assignment } = verdict else {
            panic!("the complete digraph is 9-regularable");
        };
        assert!(is_c_regular(&assignment).is_c_regular);
    }

    #[test]
    fn self_loops_participate_like_ordinary_edges() {
        // full 2-vertex digraph with both self-loops: 2-regular via the
        // all-ones matrix
        let mut g = WeightedDigraph::new_with_self_loops(2);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            g.set_weight(i, j, ExactWeight::one()).unwrap();
        }
        let (verdict, _) = run_cregular(&g, 2, None).unwrap();
        let CRegularVerdict::CRegular { assignment } = verdict else {
            panic!("expected a 2-regular assignment");
        };
        assert!(assignment.is_unit_weighted());
        let (feasible, _) = crate::flow::flow_feasibility_oracle(&g, 2).unwrap();
        assert!(feasible);

        // a triangle with one self-loop is not 2-regularable: the loop
        // would need weight zero
        let mut g = WeightedDigraph::new_with_self_loops(3);
        for (i, j) in [(0, 0), (0, 1), (1, 2), (2, 0)] {
            g.set_weight(i, j, ExactWeight::one()).unwrap();
        }
        let (verdict, _) = run_cregular(&g, 2, None).unwrap();
        assert!(!verdict.is_c_regular());
        let (feasible, _) = crate::flow::flow_feasibility_oracle(&g, 2).unwrap();
        assert!(!feasible);
    }

    #[test]
    fn fig2a_is_not_four_regular() {
        // 4 = |E| - |V| + 1, so this verdict certifies that no doubly
        // stochastic assignment exists
        let (verdict, _) =
            run_cregular(&fixtures::fig2a(), 4, None).unwrap();
        assert!(!verdict.is_c_regular());
    }

    #[test]
    fn triangle_at_c1_converges_immediately() {
        let triangle = WeightedDigraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let (verdict, trace) = run_cregular(&triangle, 1, None).unwrap();
        let CRegularVerdict::CRegular { assignment } = verdict else {
            panic!();
        };
        assert!(assignment.is_unit_weighted());
        assert_eq!(trace.iterations(), 1);
    }

    #[test]
    fn self_loop_route_reproduces_the_worked_pipeline() {
        let ds = dsify_with_self_loops(&fixtures::fig2a()).unwrap();
        assert_eq!(ds.to_matrix(), fixtures::fig2a_doubly_stochastic_matrix());
        assert!(is_doubly_stochastic(&ds.to_matrix()));
    }

    #[test]
    fn self_loop_route_on_regular_input_only_divides() {
        let triangle = WeightedDigraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let ds = dsify_with_self_loops(&triangle).unwrap();
        assert!(ds.to_matrix().is_permutation());
        assert_eq!(ds.edge_count(), 3);
    }

    #[test]
    fn self_loop_route_requires_strong_connectivity() {
        let arc = WeightedDigraph::from_edges(2, &[(0, 1)]).unwrap();
        assert!(matches!(
            dsify_with_self_loops(&arc),
            Err(Error::NotStronglyConnected)
        ));
    }
}
