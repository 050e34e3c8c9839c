//! Small worked-example digraphs used throughout the tests and the guide.
//!
//! The same graphs ship as JSON documents under `fixtures/` at the repository
//! root for use with the CLI; a test keeps the two in sync.

use crate::graph::WeightedDigraph;
use crate::matrix::RationalMatrix;

/// Four vertices, five edges: strongly connected, weight-balanceable, but
/// with no doubly stochastic assignment on its full edge set (edge `2 -> 0`
/// lies in no spanning disjoint-cycle union).
pub fn fig1() -> WeightedDigraph {
    WeightedDigraph::from_edges(4, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 0)]).unwrap()
}

/// Five vertices, eight edges: weight-balanceable yet not doubly
/// stochasticable. Unit weights give imbalances `(+1, -1, +2, -2, 0)`.
pub fn fig2a() -> WeightedDigraph {
    WeightedDigraph::from_edges(
        5,
        &[
            (0, 1),
            (1, 2),
            (1, 3),
            (2, 0),
            (3, 0),
            (3, 2),
            (3, 4),
            (4, 2),
        ],
    )
    .unwrap()
}

/// Five vertices, eight edges: doubly stochasticable, generated by exactly
/// two spanning cycles.
pub fn fig2b() -> WeightedDigraph {
    WeightedDigraph::from_edges(
        5,
        &[
            (0, 1),
            (1, 2),
            (2, 3),
            (2, 4),
            (3, 0),
            (3, 4),
            (4, 0),
            (4, 3),
        ],
    )
    .unwrap()
}

/// Five vertices, seven edges: the tie-breaking showcase for the
/// min-imbalance balancing protocol. Vertex 3 has two out-neighbors (0 and 4)
/// that tie on imbalance during a run from unit weights.
pub fn fig6() -> WeightedDigraph {
    WeightedDigraph::from_edges(5, &[(0, 1), (1, 2), (1, 3), (2, 3), (3, 0), (3, 4), (4, 2)])
        .unwrap()
}

/// Four vertices, seven edges: doubly stochasticable with DS-character 2.
pub fn fig9() -> WeightedDigraph {
    WeightedDigraph::from_edges(4, &[(0, 1), (1, 2), (1, 3), (2, 0), (2, 3), (3, 0), (3, 2)])
        .unwrap()
}

/// The balanced integer assignment on [`fig2b`] obtained by summing its two
/// spanning cycles; every row and column sums to 2.
pub fn fig2b_balanced_matrix() -> RationalMatrix {
    RationalMatrix::from_integer_rows(&[
        &[0, 2, 0, 0, 0],
        &[0, 0, 2, 0, 0],
        &[0, 0, 0, 1, 1],
        &[1, 0, 0, 0, 1],
        &[1, 0, 0, 1, 0],
    ])
}

/// A weight-balanced assignment on [`fig2b`] whose row sums differ
/// (3, 3, 3, 4, 3), so row normalization does not make it doubly stochastic.
pub fn fig2b_unbalanced_rows_matrix() -> RationalMatrix {
    RationalMatrix::from_integer_rows(&[
        &[0, 3, 0, 0, 0],
        &[0, 0, 3, 0, 0],
        &[0, 0, 0, 2, 1],
        &[2, 0, 0, 0, 2],
        &[1, 0, 0, 2, 0],
    ])
}

/// The weight-balanced matrix the min-weight protocol reaches on [`fig2a`]
/// from unit weights under lowest-index tie-breaking.
pub fn fig2a_balanced_matrix() -> RationalMatrix {
    RationalMatrix::from_integer_rows(&[
        &[0, 6, 0, 0, 0],
        &[0, 0, 3, 3, 0],
        &[5, 0, 0, 0, 0],
        &[1, 0, 1, 0, 1],
        &[0, 0, 1, 0, 0],
    ])
}

/// The doubly stochastic matrix produced from [`fig2a_balanced_matrix`] by
/// adding self-loops up to the maximum out-degree 6 and dividing by 6.
pub fn fig2a_doubly_stochastic_matrix() -> RationalMatrix {
    RationalMatrix::from_rational_rows(&[
        &["0", "1", "0", "0", "0"],
        &["0", "0", "1/2", "1/2", "0"],
        &["5/6", "0", "1/6", "0", "0"],
        &["1/6", "0", "1/6", "1/2", "1/6"],
        &["0", "0", "1/6", "0", "5/6"],
    ])
}

/// The 3-regular assignment on [`fig9`] reached by the load/height protocol
/// under the shipped replay schedule.
pub fn fig9_three_regular_matrix() -> RationalMatrix {
    RationalMatrix::from_integer_rows(&[
        &[0, 3, 0, 0],
        &[0, 0, 1, 2],
        &[2, 0, 0, 1],
        &[1, 0, 2, 0],
    ])
}
