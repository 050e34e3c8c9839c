//! Centralized feasibility oracle for C-regular weight assignments.
//!
//! Whether a digraph admits integer edge weights in `[1, C]` with every
//! weighted out- and in-degree equal to `C` is a max-flow question on a
//! bipartite network: a source feeds one copy `u_i` of each vertex, edges
//! `(v_i, v_j)` become arcs `u_i -> w_j`, and each `w_j` drains to a sink.
//! Shifting out the mandatory unit on every edge (`a - 1` in place of `a`)
//! turns the lower bounds into plain capacities:
//!
//! * `s -> u_i` with capacity `C - d_out(v_i)`,
//! * `u_i -> w_j` with capacity `C - 1`,
//! * `w_j -> t` with capacity `C - d_in(v_j)`.
//!
//! The assignment exists exactly when the max flow saturates every source
//! arc, i.e. has value `C·|V| - |E|`; adding the unit back to each edge flow
//! yields the C-regular weights.

use crate::error::{Error, Result};
use crate::graph::WeightedDigraph;
use crate::weight::ExactWeight;

/// A max-flow network with integer capacities (Dinic's algorithm).
struct FlowNetwork {
    // forward and residual arcs interleaved: arc 2k and its reverse 2k+1
    targets: Vec<usize>,
    capacity: Vec<u64>,
    adjacency: Vec<Vec<usize>>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        FlowNetwork {
            targets: Vec::new(),
            capacity: Vec::new(),
            adjacency: vec![Vec::new(); nodes],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: u64) -> usize {
        let id = self.targets.len();
        self.targets.push(to);
        self.capacity.push(cap);
        self.adjacency[from].push(id);
        self.targets.push(from);
        self.capacity.push(0);
        self.adjacency[to].push(id + 1);
        id
    }

    fn max_flow(&mut self, source: usize, sink: usize) -> u64 {
        let n = self.adjacency.len();
        let mut total = 0u64;
        loop {
            // BFS level graph
            let mut level = vec![usize::MAX; n];
            level[source] = 0;
            let mut queue = std::collections::VecDeque::from([source]);
            while let Some(v) = queue.pop_front() {
                for &arc in &self.adjacency[v] {
                    let to = self.targets[arc];
                    if self.capacity[arc] > 0 && level[to] == usize::MAX {
                        level[to] = level[v] + 1;
                        queue.push_back(to);
                    }
                }
            }
            if level[sink] == usize::MAX {
                return total;
            }
            let mut next_arc = vec![0usize; n];
            loop {
                let pushed = self.dfs(source, sink, u64::MAX, &level, &mut next_arc);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
    }

    fn dfs(
        &mut self,
        v: usize,
        sink: usize,
        limit: u64,
        level: &[usize],
        next_arc: &mut [usize],
    ) -> u64 {
        if v == sink {
            return limit;
        }
        while next_arc[v] < self.adjacency[v].len() {
            let arc = self.adjacency[v][next_arc[v]];
            let to = self.targets[arc];
            if self.capacity[arc] > 0 && level[to] == level[v] + 1 {
                let pushed = self.dfs(
                    to,
                    sink,
                    limit.min(self.capacity[arc]),
                    level,
                    next_arc,
                );
                if pushed > 0 {
                    self.capacity[arc] -= pushed;
                    self.capacity[arc ^ 1] += pushed;
                    return pushed;
                }
            }
            next_arc[v] += 1;
        }
        0
    }
}

/// Decides whether `g` admits a C-regular assignment, and returns one when it
/// does. Ignores the current weights of `g`; only the edge set matters.
///
/// Requires `C >= max(max out-degree, max in-degree)`, otherwise some shifted
/// capacity would be negative.
pub fn flow_feasibility_oracle(
    g: &WeightedDigraph,
    c: u64,
) -> Result<(bool, Option<WeightedDigraph>)> {
    let n = g.order();
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

    // nodes: 0 = source, 1..=n = u_i, n+1..=2n = w_j, 2n+1 = sink
    let source = 0;
    let sink = 2 * n + 1;
    let mut network = FlowNetwork::new(2 * n + 2);
    for v in 0..n {
        network.add_arc(source, 1 + v, c - profile.out_degree[v] as u64);
        network.add_arc(1 + n + v, sink, c - profile.in_degree[v] as u64);
    }
    let mut edge_arcs = Vec::new();
    for (i, j, _) in g.edges() {
        let arc = network.add_arc(1 + i, 1 + n + j, c - 1);
        edge_arcs.push((i, j, arc));
    }

    let required: u64 = (0..n).map(|v| c - profile.out_degree[v] as u64).sum();
    let value = network.max_flow(source, sink);
    debug_assert!(value <= required);
    if value < required {
        return Ok((false, None));
    }

    // add the unit lower bound back onto each edge flow
    let mut assignment = if g.allows_self_loops() {
        WeightedDigraph::new_with_self_loops(n)
    } else {
        WeightedDigraph::new(n)
    };
    for (i, j, arc) in edge_arcs {
        let shifted_flow = network.capacity[arc + 1];
        assignment.set_weight(
            i,
            j,
            ExactWeight::from_integer((shifted_flow + 1) as i64),
        )?;
    }
    Ok((true, Some(assignment)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn check_regular(g: &WeightedDigraph, c: u64) {
        let m = g.to_matrix();
        let target = ExactWeight::from_integer(c as i64);
        for i in 0..m.order() {
            assert_eq!(m.row_sum(i), target, "row {i}");
            assert_eq!(m.column_sum(i), target, "column {i}");
        }
        for (_, _, w) in g.edges() {
            assert!(*w >= ExactWeight::one());
            assert!(*w <= target);
        }
    }

    #[test]
    fn fig9_is_three_regular_feasible() {
        let (feasible, assignment) = flow_feasibility_oracle(&fixtures::fig9(), 3).unwrap();
        assert!(feasible);
        check_regular(&assignment.unwrap(), 3);
    }

    #[test]
    fn fig1_is_infeasible_at_its_cover_bound() {
        // |E| - |V| + 1 = 2 for this graph
        let (feasible, _) = flow_feasibility_oracle(&fixtures::fig1(), 2).unwrap();
        assert!(!feasible);
    }

    #[test]
    fn fig2b_is_two_regular_feasible() {
        let (feasible, assignment) = flow_feasibility_oracle(&fixtures::fig2b(), 2).unwrap();
        assert!(feasible);
        check_regular(&assignment.unwrap(), 2);
    }

    #[test]
    fn rejects_c_below_degree_bound() {
        assert!(matches!(
            flow_feasibility_oracle(&fixtures::fig2a(), 2),
            Err(Error::CTooSmallForDegrees { c: 2, bound: 3 })
        ));
    }
}
