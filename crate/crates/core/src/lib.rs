//! Weight-balanced and doubly stochastic weight assignments on directed
//! graphs.
//!
//! A digraph is *weight-balanced* when every vertex's weighted in-degree
//! equals its weighted out-degree, and *doubly stochastic* when its
//! adjacency matrix has all row and column sums equal to one. Both classes
//! matter wherever agents coordinate over one-way links: averaging,
//! distributed optimization, and gossip schemes all lean on them. This crate
//! answers, with exact rational arithmetic throughout:
//!
//! * **Can this digraph carry such weights at all?** Balance needs every
//!   edge on a cycle ([`is_weight_balanceable`]); double stochasticity needs
//!   a family of spanning disjoint-cycle unions covering the edge set
//!   ([`is_doubly_stochasticable`], [`ds_cycle_set`]).
//! * **Find the weights with local rules.** Two synchronous round-based
//!   protocols balance a strongly connected digraph ([`run_wbda`],
//!   [`run_wbmda`]); a self-loop procedure ([`dsify_with_self_loops`]) and a
//!   load/height protocol ([`run_cregular`]) produce doubly stochastic
//!   assignments.
//! * **Check everything independently.** Brute-force cycle enumeration, a
//!   max-flow feasibility oracle, and a Birkhoff decomposition cross-check
//!   the protocols at desk scale.
//!
//! Determinism is a design rule: set-valued protocol choices resolve by a
//! lowest-index policy or by explicit replay files, so every run is
//! reproducible bit for bit.
//!
//! ```
//! use digraph_balance::{lyapunov, run_wbda, BalancePolicy, WeightedDigraph};
//!
//! // a strongly connected digraph on four vertices, unit weights
//! let g = WeightedDigraph::from_edges(4, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 0)]).unwrap();
//! assert_eq!(lyapunov(&g).to_string(), "2");
//!
//! let trace = run_wbda(&g, &BalancePolicy::LowestIndex, None).unwrap();
//! assert!(trace.converged());
//! assert!(lyapunov(&trace.final_graph).is_zero());
//! ```

pub mod balance;
pub mod bench;
pub mod birkhoff;
pub mod characterize;
pub mod cregular;
pub mod cycles;
pub mod error;
pub mod fixtures;
pub mod flow;
pub mod generate;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod weight;

pub use balance::{
    lyapunov, run_wbda, run_wbmda, wbda_step, wbda_step_with_choices, wbmda_step,
    wbmda_step_with_choices, BalanceAlgorithm, BalanceOutcome, BalancePolicy, ChoiceSequence,
    FairDecisionMemory, RoundChoice, RoundTrace,
};
pub use bench::{benchmark_rounds, BenchmarkReport, BenchmarkRow};
pub use birkhoff::{birkhoff_decompose, recombine, BirkhoffTerm};
pub use characterize::{
    c_regular_assignment_from_cycles, is_c_regular, is_doubly_stochastic,
    is_doubly_stochasticable, is_weight_balanceable, is_weight_balanced, normalize_rows,
    BalanceVerdict, CRegularityVerdict, DsDecision, DsMethod, DsObstruction,
};
pub use cregular::{
    cregular_init, dsify_with_self_loops, dsify_with_self_loops_using, run_cregular,
    run_cregular_with_schedule, CRegularAgentState, CRegularSchedule, CRegularTrace,
    CRegularVerdict, ScheduledAction,
};
pub use cycles::{
    balance_via_cycle_union, ds_cycle_set, enumerate_cycles, enumerate_disjoint_cycle_unions,
    has_spanning_cycle, principal_cycle_set, Cycle, CycleSetCertificate, CycleSetKind,
    DisjointCycleUnion,
};
pub use error::{Error, Result};
pub use flow::flow_feasibility_oracle;
pub use graph::{Connectivity, ConnectivityReport, DegreeProfile, WeightedDigraph};
pub use io::{parse_graph, serialize_graph, GraphDocument, GraphFormat, TraceDocument};
pub use matrix::RationalMatrix;
pub use weight::ExactWeight;
