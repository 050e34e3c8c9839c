//! Decision procedures: weight-balanced, weight-balanceable, C-regular,
//! doubly stochastic, doubly stochasticable.
//!
//! All tests are exact. The doubly-stochasticability decision comes in two
//! interchangeable flavors: an explicit minimum-cycle-cover search (small
//! graphs, yields the covering certificate) and a max-flow feasibility check
//! at the cover upper bound `C = |E| - |V| + 1` (scales further). Both return
//! a doubly stochastic weight assignment on success.

use crate::cycles::{self, CycleSetCertificate};
use crate::error::{Error, Result};
use crate::flow::flow_feasibility_oracle;
use crate::graph::{Connectivity, WeightedDigraph};
use crate::matrix::RationalMatrix;
use crate::weight::ExactWeight;

/// Outcome of the exact balance test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceVerdict {
    pub is_weight_balanced: bool,
    /// Per-vertex imbalances, kept as the witness when unbalanced.
    pub imbalances: Vec<ExactWeight>,
}

/// Outcome of the C-regularity test: weight-balanced with every weighted
/// out-degree equal to a single positive constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CRegularityVerdict {
    pub is_c_regular: bool,
    /// The common row sum when regular; otherwise the maximum weighted
    /// out-degree, for reference.
    pub c: ExactWeight,
    /// Vertices violating balance or the common row sum.
    pub violating_vertices: Vec<usize>,
}

/// Why a weight-balanceable digraph fails to be doubly stochasticable, or
/// why balanceability itself fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DsObstruction {
    /// An edge lies on no cycle; the graph is not even weight-balanceable.
    NotSemiconnected { witness_edge: (usize, usize) },
    /// A vertex with no edges at all.
    IsolatedVertex { vertex: usize },
    /// Some strongly connected component has no spanning-cycle-union cover
    /// of its edge set.
    ComponentNotCoverable { component: Vec<usize> },
}

/// Decision plus certificate for doubly stochasticability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DsDecision {
    /// The graph admits a doubly stochastic assignment; `certificate`
    /// carries one, supported on exactly the input edge set.
    Yes { certificate: WeightedDigraph },
    No { obstruction: DsObstruction },
}

impl DsDecision {
    pub fn is_doubly_stochasticable(&self) -> bool {
        matches!(self, DsDecision::Yes { .. })
    }
}

/// Which engine decides doubly stochasticability.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DsMethod {
    /// Exhaustive minimum cover by spanning cycle unions (per-component
    /// order cap applies).
    CycleCover,
    /// Max-flow feasibility at `C = |E| - |V| + 1` per component.
    Flow,
}

/// Exact test of zero imbalance at every vertex.
pub fn is_weight_balanced(g: &WeightedDigraph) -> BalanceVerdict {
    let imbalances = g.degree_profile().imbalance;
    BalanceVerdict {
        is_weight_balanced: imbalances.iter().all(|w| w.is_zero()),
        imbalances,
    }
}

/// A digraph admits positive weights balancing every vertex exactly when
/// every edge lies on a cycle. Returns the witness edge otherwise.
pub fn is_weight_balanceable(g: &WeightedDigraph) -> (bool, Option<(usize, usize)>) {
    match g.classify_connectivity().class {
        Connectivity::StronglyConnected | Connectivity::StronglySemiconnected => (true, None),
        Connectivity::Neither => (false, g.edge_outside_cycles()),
    }
}

/// The row-stochastic normalization map: divides every row by its sum.
pub fn normalize_rows(matrix: &RationalMatrix) -> Result<RationalMatrix> {
    let n = matrix.order();
    let mut result = RationalMatrix::zero(n);
    for i in 0..n {
        let sum = matrix.row_sum(i);
        if sum.is_zero() {
            return Err(Error::ZeroRow { row: i });
        }
        for j in 0..n {
            result.set(i, j, matrix.get(i, j) / &sum);
        }
    }
    Ok(result)
}

/// Exact test that every row and column sums to one with no negative entry.
pub fn is_doubly_stochastic(matrix: &RationalMatrix) -> bool {
    if matrix.has_negative_entry() {
        return false;
    }
    let one = ExactWeight::one();
    (0..matrix.order()).all(|i| matrix.row_sum(i) == one && matrix.column_sum(i) == one)
}

/// Exact test of C-regularity: weight-balanced and all weighted out-degrees
/// equal to one positive constant.
pub fn is_c_regular(g: &WeightedDigraph) -> CRegularityVerdict {
    let profile = g.degree_profile();
    let c = profile
        .weighted_out
        .iter()
        .cloned()
        .max()
        .unwrap_or_else(ExactWeight::zero);
    let violating_vertices: Vec<usize> = (0..g.order())
        .filter(|&v| !profile.imbalance[v].is_zero() || profile.weighted_out[v] != c)
        .collect();
    CRegularityVerdict {
        is_c_regular: violating_vertices.is_empty() && c.is_positive(),
        c,
        violating_vertices,
    }
}

fn c_upper_bound(g: &WeightedDigraph) -> u64 {
    (g.edge_count() - g.order() + 1) as u64
}

/// Decides whether `g` admits a doubly stochastic weight assignment that is
/// positive on every edge, and produces one as certificate when it does.
///
/// The graph decomposes into strongly connected components, each decided
/// independently (a doubly stochastic matrix on a strongly semiconnected
/// graph is block-diagonal over the components). Cross-component edges or
/// isolated vertices rule the assignment out immediately.
pub fn is_doubly_stochasticable(g: &WeightedDigraph, method: DsMethod) -> Result<DsDecision> {
    let profile = g.degree_profile();
    if let Some(vertex) = (0..g.order()).find(|&v| profile.out_degree[v] == 0 && profile.in_degree[v] == 0)
    {
        return Ok(DsDecision::No {
            obstruction: DsObstruction::IsolatedVertex { vertex },
        });
    }
    let report = g.classify_connectivity();
    if report.class == Connectivity::Neither {
        let witness_edge = g.edge_outside_cycles().expect("witness edge must exist");
        return Ok(DsDecision::No {
            obstruction: DsObstruction::NotSemiconnected { witness_edge },
        });
    }

    let mut certificate = if g.allows_self_loops() {
        WeightedDigraph::new_with_self_loops(g.order())
    } else {
        WeightedDigraph::new(g.order())
    };
    for component in &report.components {
        let sub = g.induced_subgraph(component);
        let assignment = match method {
            DsMethod::CycleCover => {
                if sub.order() > cycles::MAX_COVER_ORDER {
                    return Err(Error::MethodSizeExceeded {
                        method: "cycle_cover",
                    });
                }
                cycles::ds_cycle_set(&sub)?.map(|cover| assignment_from_cover(&sub, &cover))
            }
            DsMethod::Flow => {
                let c = c_upper_bound(&sub);
                let (feasible, assignment) = flow_feasibility_oracle(&sub, c)?;
                assignment.filter(|_| feasible).map(|regular| {
                    let scale = ExactWeight::from_integer(c as i64).reciprocal();
                    scale_graph(&regular, &scale)
                })
            }
        };
        let Some(assignment) = assignment else {
            return Ok(DsDecision::No {
                obstruction: DsObstruction::ComponentNotCoverable {
                    component: component.clone(),
                },
            });
        };
        for (i, j, w) in assignment.edges() {
            certificate.set_weight(component[i], component[j], w.clone())?;
        }
    }
    debug_assert!(is_doubly_stochastic(&certificate.to_matrix()));
    Ok(DsDecision::Yes { certificate })
}

fn scale_graph(g: &WeightedDigraph, factor: &ExactWeight) -> WeightedDigraph {
    let mut scaled = if g.allows_self_loops() {
        WeightedDigraph::new_with_self_loops(g.order())
    } else {
        WeightedDigraph::new(g.order())
    };
    for (i, j, w) in g.edges() {
        scaled.set_weight(i, j, w * factor).expect("edge in range");
    }
    scaled
}

/// Doubly stochastic assignment from a spanning cover: the sum of the
/// members' extended adjacency matrices divided by the member count.
fn assignment_from_cover(g: &WeightedDigraph, cover: &CycleSetCertificate) -> WeightedDigraph {
    let n = g.order();
    let mut sum = RationalMatrix::zero(n);
    for member in &cover.members {
        sum = sum.add(&member.extended_adjacency(n));
    }
    let scaled = sum.scale(&ExactWeight::from_integer(cover.cardinality as i64).reciprocal());
    WeightedDigraph::from_matrix(&scaled, g.allows_self_loops()).expect("entries nonnegative")
}

/// Builds a C-regular integer assignment from a DS-cycle set: members get
/// positive integer multiplicities summing to `c`, spread as evenly as
/// possible with the remainder on the lower-indexed members.
pub fn c_regular_assignment_from_cycles(g: &WeightedDigraph, c: u64) -> Result<WeightedDigraph> {
    let Some(cover) = cycles::ds_cycle_set(g)? else {
        return Err(Error::NotDoublyStochasticable);
    };
    let ds = cover.cardinality as u64;
    if c < ds {
        return Err(Error::CTooSmall { c, ds });
    }
    let base = c / ds;
    let remainder = c % ds;
    let n = g.order();
    let mut sum = RationalMatrix::zero(n);
    for (index, member) in cover.members.iter().enumerate() {
        let multiplicity = base + u64::from((index as u64) < remainder);
        let term = member
            .extended_adjacency(n)
            .scale(&ExactWeight::from_integer(multiplicity as i64));
        sum = sum.add(&term);
    }
    WeightedDigraph::from_matrix(&sum, g.allows_self_loops())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn balance_verdicts() {
        let balanced =
            WeightedDigraph::from_matrix(&fixtures::fig2b_balanced_matrix(), false).unwrap();
        assert!(is_weight_balanced(&balanced).is_weight_balanced);

        let verdict = is_weight_balanced(&fixtures::fig2a());
        assert!(!verdict.is_weight_balanced);
        let expected: Vec<ExactWeight> = [1, -1, 2, -2, 0]
            .iter()
            .map(|&x| ExactWeight::from_integer(x))
            .collect();
        assert_eq!(verdict.imbalances, expected);

        let empty = WeightedDigraph::new(3);
        assert!(is_weight_balanced(&empty).is_weight_balanced);
    }

    #[test]
    fn balanceability() {
        assert_eq!(is_weight_balanceable(&fixtures::fig1()), (true, None));
        assert_eq!(is_weight_balanceable(&fixtures::fig2a()), (true, None));
        let arc = WeightedDigraph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(is_weight_balanceable(&arc), (false, Some((0, 1))));
    }

    #[test]
    fn normalization_map() {
        let phi = normalize_rows(&fixtures::fig2b_balanced_matrix()).unwrap();
        assert!(is_doubly_stochastic(&phi));

        let phi = normalize_rows(&fixtures::fig2b_unbalanced_rows_matrix()).unwrap();
        // row-stochastic by construction, but not doubly stochastic
        for i in 0..5 {
            assert_eq!(phi.row_sum(i), ExactWeight::one());
        }
        assert!(!is_doubly_stochastic(&phi));

        let diagonal = RationalMatrix::from_integer_rows(&[&[4, 0], &[0, 9]]);
        assert_eq!(normalize_rows(&diagonal).unwrap(), RationalMatrix::identity(2));

        let with_zero_row = RationalMatrix::from_integer_rows(&[&[0, 0], &[1, 0]]);
        assert!(matches!(
            normalize_rows(&with_zero_row),
            Err(Error::ZeroRow { row: 0 })
        ));
    }

    #[test]
    fn c_regularity() {
        let balanced =
            WeightedDigraph::from_matrix(&fixtures::fig2b_balanced_matrix(), false).unwrap();
        let verdict = is_c_regular(&balanced);
        assert!(verdict.is_c_regular);
        assert_eq!(verdict.c, ExactWeight::from_integer(2));

        let uneven =
            WeightedDigraph::from_matrix(&fixtures::fig2b_unbalanced_rows_matrix(), false)
                .unwrap();
        let verdict = is_c_regular(&uneven);
        assert!(!verdict.is_c_regular);

        let three_regular =
            WeightedDigraph::from_matrix(&fixtures::fig9_three_regular_matrix(), false).unwrap();
        let verdict = is_c_regular(&three_regular);
        assert!(verdict.is_c_regular);
        assert_eq!(verdict.c, ExactWeight::from_integer(3));
    }

    #[test]
    fn doubly_stochastic_tests() {
        let half = fixtures::fig2b_balanced_matrix().scale(&ExactWeight::new(1, 2));
        assert!(is_doubly_stochastic(&half));
        assert!(is_doubly_stochastic(&fixtures::fig2a_doubly_stochastic_matrix()));
        assert!(is_doubly_stochastic(&RationalMatrix::identity(3)));
        assert!(!is_doubly_stochastic(&fixtures::fig2b_balanced_matrix()));
    }

    #[test]
    fn ds_decisions_match_on_the_worked_examples() {
        for method in [DsMethod::CycleCover, DsMethod::Flow] {
            assert!(!is_doubly_stochasticable(&fixtures::fig1(), method)
                .unwrap()
                .is_doubly_stochasticable());
            assert!(!is_doubly_stochasticable(&fixtures::fig2a(), method)
                .unwrap()
                .is_doubly_stochasticable());
            let decision = is_doubly_stochasticable(&fixtures::fig2b(), method).unwrap();
            let DsDecision::Yes { certificate } = decision else {
                panic!("fig2b must be doubly stochasticable");
            };
            assert!(is_doubly_stochastic(&certificate.to_matrix()));
            // support exactly the edge set
            assert_eq!(certificate.edge_count(), fixtures::fig2b().edge_count());
            assert!(certificate.all_weights_positive());
        }
    }

    #[test]
    fn cycle_cover_certificate_on_fig2b_is_the_halved_principal_sum() {
        let decision =
            is_doubly_stochasticable(&fixtures::fig2b(), DsMethod::CycleCover).unwrap();
        let DsDecision::Yes { certificate } = decision else {
            panic!();
        };
        let expected = fixtures::fig2b_balanced_matrix().scale(&ExactWeight::new(1, 2));
        assert_eq!(certificate.to_matrix(), expected);
    }

    #[test]
    fn isolated_vertex_is_rejected() {
        let mut g = WeightedDigraph::new(3);
        g.set_weight(0, 1, ExactWeight::one()).unwrap();
        g.set_weight(1, 0, ExactWeight::one()).unwrap();
        let decision = is_doubly_stochasticable(&g, DsMethod::Flow).unwrap();
        assert_eq!(
            decision,
            DsDecision::No {
                obstruction: DsObstruction::IsolatedVertex { vertex: 2 }
            }
        );
    }

    #[test]
    fn component_decomposition() {
        // two disjoint 2-cycles: doubly stochasticable component-wise
        let g = WeightedDigraph::from_edges(4, &[(0, 1), (1, 0), (2, 3), (3, 2)]).unwrap();
        for method in [DsMethod::CycleCover, DsMethod::Flow] {
            let decision = is_doubly_stochasticable(&g, method).unwrap();
            let DsDecision::Yes { certificate } = decision else {
                panic!("two 2-cycles are doubly stochasticable");
            };
            assert!(is_doubly_stochastic(&certificate.to_matrix()));
        }
    }

    #[test]
    fn c_regular_assignments_from_cycle_sets() {
        let two = c_regular_assignment_from_cycles(&fixtures::fig2b(), 2).unwrap();
        assert_eq!(two.to_matrix(), fixtures::fig2b_balanced_matrix());

        let three = c_regular_assignment_from_cycles(&fixtures::fig2b(), 3).unwrap();
        let verdict = is_c_regular(&three);
        assert!(verdict.is_c_regular);
        assert_eq!(verdict.c, ExactWeight::from_integer(3));

        let triangle = WeightedDigraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let five = c_regular_assignment_from_cycles(&triangle, 5).unwrap();
        assert!(five
            .edges()
            .all(|(_, _, w)| *w == ExactWeight::from_integer(5)));

        assert!(matches!(
            c_regular_assignment_from_cycles(&fixtures::fig2b(), 1),
            Err(Error::CTooSmall { c: 1, ds: 2 })
        ));
        assert!(matches!(
            c_regular_assignment_from_cycles(&fixtures::fig2a(), 4),
            Err(Error::NotDoublyStochasticable)
        ));
    }
}
