//! Cycle structure of a digraph: elementary cycles, unions of vertex-disjoint
//! cycles, minimum cycle covers, and the cycle/permutation correspondence.
//!
//! Two covering numbers drive the doubly-stochasticability theory:
//!
//! * the minimum number of disjoint-cycle unions whose union is the whole
//!   edge set (the *principal* number `p(G)`), and
//! * the same minimum restricted to unions that visit every vertex (the
//!   *DS-character* `ds(G)`).
//!
//! Both are computed by exhaustive branch-and-bound set cover and are only
//! intended for desk-scale graphs; the entry points enforce hard size caps.

use crate::error::{Error, Result};
use crate::graph::{Connectivity, WeightedDigraph};
use crate::matrix::RationalMatrix;
use crate::weight::ExactWeight;

/// Default vertex cap for exhaustive cycle enumeration.
pub const MAX_ENUMERATION_ORDER: usize = 12;
/// Default vertex cap for the minimum-cover searches.
pub const MAX_COVER_ORDER: usize = 10;

/// An elementary cycle, stored with its smallest vertex first.
///
/// `vertices = [v0, v1, ..., vk]` stands for the edges `v0->v1`, ...,
/// `vk->v0`. A single vertex stands for a self-loop; an isolated vertex is
/// not a cycle.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cycle {
    vertices: Vec<usize>,
}

impl Cycle {
    /// Canonicalizes `vertices` by rotating the smallest vertex to the front.
    pub fn new(vertices: Vec<usize>) -> Self {
        assert!(!vertices.is_empty(), "a cycle has at least one vertex");
        let min_pos = vertices
            .iter()
            .enumerate()
            .min_by_key(|&(_, v)| v)
            .map(|(i, _)| i)
            .unwrap();
        let mut rotated = Vec::with_capacity(vertices.len());
        rotated.extend_from_slice(&vertices[min_pos..]);
        rotated.extend_from_slice(&vertices[..min_pos]);
        Cycle { vertices: rotated }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_self_loop(&self) -> bool {
        self.vertices.len() == 1
    }

    /// The cycle's edges, including the closing edge.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let k = self.vertices.len();
        if k == 1 {
            return vec![(self.vertices[0], self.vertices[0])];
        }
        (0..k)
            .map(|i| (self.vertices[i], self.vertices[(i + 1) % k]))
            .collect()
    }

    fn vertex_mask(&self) -> u32 {
        self.vertices.iter().fold(0u32, |m, &v| m | (1 << v))
    }
}

/// A set of pairwise vertex-disjoint cycles, kept in canonical (sorted)
/// order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DisjointCycleUnion {
    cycles: Vec<Cycle>,
}

impl DisjointCycleUnion {
    pub fn new(mut cycles: Vec<Cycle>) -> Self {
        cycles.sort();
        let union = DisjointCycleUnion { cycles };
        debug_assert!(union.is_vertex_disjoint());
        union
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    fn is_vertex_disjoint(&self) -> bool {
        let mut seen = 0u32;
        for c in &self.cycles {
            let mask = c.vertex_mask();
            if seen & mask != 0 {
                return false;
            }
            seen |= mask;
        }
        true
    }

    /// True when the member cycles visit all `n` vertices.
    pub fn is_spanning(&self, n: usize) -> bool {
        let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        self.cycles.iter().fold(0u32, |m, c| m | c.vertex_mask()) == all
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self.cycles.iter().flat_map(|c| c.edges()).collect();
        edges.sort_unstable();
        edges
    }

    /// The 0/1 matrix with a one per cycle edge, extended by zero rows and
    /// columns for the vertices the union does not visit. It is a
    /// permutation matrix exactly when the union is spanning.
    pub fn extended_adjacency(&self, n: usize) -> RationalMatrix {
        let mut m = RationalMatrix::zero(n);
        for (i, j) in self.edges() {
            assert!(i < n && j < n, "cycle vertex out of range");
            m.set(i, j, ExactWeight::one());
        }
        m
    }
}

/// Which covering number a certificate witnesses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CycleSetKind {
    Principal,
    DoublyStochastic,
}

/// A minimum-cardinality set of disjoint-cycle unions covering the edge set.
///
/// Minimality is exhaustive (branch-and-bound over all candidates), and among
/// the minimum covers the lexicographically smallest under canonical member
/// ordering is returned, so repeated runs agree bit for bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleSetCertificate {
    pub kind: CycleSetKind,
    pub members: Vec<DisjointCycleUnion>,
    pub cardinality: usize,
}

impl CycleSetCertificate {
    /// Checks that every edge of `g` appears in at least one member.
    pub fn covers(&self, g: &WeightedDigraph) -> bool {
        g.edges().all(|(i, j, _)| {
            self.members
                .iter()
                .any(|m| m.edges().binary_search(&(i, j)).is_ok())
        })
    }
}

fn check_order(g: &WeightedDigraph, max: usize) -> Result<()> {
    if g.order() > max {
        return Err(Error::GraphTooLarge { n: g.order(), max });
    }
    Ok(())
}

/// Enumerates all elementary cycles, canonicalized to start at their
/// smallest vertex and sorted lexicographically.
///
/// Plain backtracking search rooted at each vertex in turn, restricted to
/// vertices at least as large as the root so that each cycle is found exactly
/// once. Exhaustive, hence the `max_order` cap (default
/// [`MAX_ENUMERATION_ORDER`]).
pub fn enumerate_cycles(g: &WeightedDigraph, max_order: usize) -> Result<Vec<Cycle>> {
    check_order(g, max_order)?;
    let n = g.order();
    let mut cycles = Vec::new();
    let out: Vec<Vec<usize>> = (0..n).map(|v| g.out_neighbors(v)).collect();

    for root in 0..n {
        if g.weight(root, root).is_some() {
            cycles.push(Cycle::new(vec![root]));
        }
        // path-based DFS over vertices >= root
        let mut path = vec![root];
        let mut on_path = vec![false; n];
        on_path[root] = true;
        // frame: (vertex, next out-neighbor position)
        let mut stack = vec![(root, 0usize)];
        while let Some(&mut (v, ref mut pos)) = stack.last_mut() {
            if *pos < out[v].len() {
                let w = out[v][*pos];
                *pos += 1;
                if w == root && path.len() >= 2 {
                    cycles.push(Cycle::new(path.clone()));
                } else if w > root && !on_path[w] {
                    on_path[w] = true;
                    path.push(w);
                    stack.push((w, 0));
                }
            } else {
                stack.pop();
                path.pop();
                on_path[v] = false;
            }
        }
    }
    cycles.sort();
    Ok(cycles)
}

/// True when a single elementary cycle visits every vertex.
pub fn has_spanning_cycle(g: &WeightedDigraph) -> Result<bool> {
    let cycles = enumerate_cycles(g, MAX_ENUMERATION_ORDER)?;
    Ok(cycles.iter().any(|c| c.len() == g.order()))
}

/// Enumerates every union of pairwise vertex-disjoint cycles (every element
/// of the cycle-union family of `g`), optionally only the spanning ones.
pub fn enumerate_disjoint_cycle_unions(
    g: &WeightedDigraph,
    spanning_only: bool,
) -> Result<Vec<DisjointCycleUnion>> {
    check_order(g, MAX_ENUMERATION_ORDER)?;
    let cycles = enumerate_cycles(g, MAX_ENUMERATION_ORDER)?;
    let masks: Vec<u32> = cycles.iter().map(|c| c.vertex_mask()).collect();
    let full: u32 = if g.order() == 32 {
        u32::MAX
    } else {
        (1u32 << g.order()) - 1
    };

    let mut result = Vec::new();
    // choice stack of cycle indices, extended in ascending order
    let mut chosen: Vec<usize> = Vec::new();
    fn recurse(
        start: usize,
        used: u32,
        cycles: &[Cycle],
        masks: &[u32],
        chosen: &mut Vec<usize>,
        full: u32,
        spanning_only: bool,
        result: &mut Vec<DisjointCycleUnion>,
    ) {
        if !chosen.is_empty() && (!spanning_only || used == full) {
            result.push(DisjointCycleUnion::new(
                chosen.iter().map(|&i| cycles[i].clone()).collect(),
            ));
        }
        for i in start..cycles.len() {
            if used & masks[i] == 0 {
                chosen.push(i);
                recurse(
                    i + 1,
                    used | masks[i],
                    cycles,
                    masks,
                    chosen,
                    full,
                    spanning_only,
                    result,
                );
                chosen.pop();
            }
        }
    }
    recurse(
        0,
        0,
        &cycles,
        &masks,
        &mut chosen,
        full,
        spanning_only,
        &mut result,
    );
    result.sort();
    Ok(result)
}

/// Variable-width bitset over edge ids.
#[derive(Clone, PartialEq, Eq)]
struct EdgeBits(Vec<u64>);

impl EdgeBits {
    fn empty(num_edges: usize) -> Self {
        EdgeBits(vec![0; num_edges.div_ceil(64)])
    }

    fn insert(&mut self, id: usize) {
        self.0[id / 64] |= 1 << (id % 64);
    }

    fn contains(&self, id: usize) -> bool {
        self.0[id / 64] & (1 << (id % 64)) != 0
    }

    fn minus(&self, other: &EdgeBits) -> EdgeBits {
        EdgeBits(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a & !b)
                .collect(),
        )
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Exhaustive minimum set cover over edge bitsets.
///
/// Branch and bound: always branch on the uncovered edge with the fewest
/// covering candidates. Returns `None` when some edge is covered by no
/// candidate. The result is re-derived as the lexicographically smallest
/// candidate-index set among covers of minimum cardinality.
fn minimum_edge_cover(num_edges: usize, candidates: &[EdgeBits]) -> Option<Vec<usize>> {
    if num_edges == 0 {
        return Some(Vec::new());
    }
    let mut universe = EdgeBits::empty(num_edges);
    for e in 0..num_edges {
        universe.insert(e);
    }
    // per-edge candidate lists
    let mut covering: Vec<Vec<usize>> = vec![Vec::new(); num_edges];
    for (idx, c) in candidates.iter().enumerate() {
        for (e, item) in covering.iter_mut().enumerate() {
            if c.contains(e) {
                item.push(idx);
            }
        }
    }
    if covering.iter().any(|c| c.is_empty()) {
        return None;
    }
    let max_cover = candidates.iter().map(|c| c.count()).max().unwrap_or(1);

    struct Search<'a> {
        candidates: &'a [EdgeBits],
        covering: &'a [Vec<usize>],
        max_cover: usize,
        best: usize,
    }

    impl Search<'_> {
        fn bound(&self, uncovered: &EdgeBits) -> usize {
            uncovered.count().div_ceil(self.max_cover)
        }

        fn run(&mut self, uncovered: &EdgeBits, depth: usize) {
            if uncovered.is_empty() {
                self.best = self.best.min(depth);
                return;
            }
            if depth + self.bound(uncovered) >= self.best {
                return;
            }
            // branch on the uncovered edge with the fewest candidates
            let mut branch_edge = usize::MAX;
            let mut branch_len = usize::MAX;
            for e in 0..self.covering.len() {
                if uncovered.contains(e) {
                    let live = self.covering[e].len();
                    if live < branch_len {
                        branch_len = live;
                        branch_edge = e;
                    }
                }
            }
            for &cand in &self.covering[branch_edge] {
                let remaining = uncovered.minus(&self.candidates[cand]);
                self.run(&remaining, depth + 1);
            }
        }
    }

    let mut search = Search {
        candidates,
        covering: &covering,
        max_cover,
        best: usize::MAX,
    };
    search.run(&universe, 0);
    let optimum = search.best;
    debug_assert_ne!(optimum, usize::MAX);

    // Lexicographically smallest cover of the optimal size: depth-first over
    // ascending candidate indices, first complete cover wins.
    fn lex_dfs(
        start: usize,
        uncovered: &EdgeBits,
        left: usize,
        candidates: &[EdgeBits],
        max_cover: usize,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if uncovered.is_empty() {
            return true;
        }
        if left == 0 || uncovered.count() > left * max_cover {
            return false;
        }
        for idx in start..candidates.len() {
            // skip members that cover nothing new
            let remaining = uncovered.minus(&candidates[idx]);
            if remaining.count() == uncovered.count() {
                continue;
            }
            chosen.push(idx);
            if lex_dfs(idx + 1, &remaining, left - 1, candidates, max_cover, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    let mut chosen = Vec::new();
    let found = lex_dfs(
        0,
        &universe,
        optimum,
        candidates,
        max_cover,
        &mut chosen,
    );
    debug_assert!(found);
    Some(chosen)
}

fn edge_ids(g: &WeightedDigraph) -> Vec<(usize, usize)> {
    g.edges().map(|(i, j, _)| (i, j)).collect()
}

fn union_bits(union: &DisjointCycleUnion, edge_index: &[(usize, usize)]) -> EdgeBits {
    let mut bits = EdgeBits::empty(edge_index.len());
    for edge in union.edges() {
        let id = edge_index
            .binary_search(&edge)
            .expect("cycle edge missing from graph");
        bits.insert(id);
    }
    bits
}

fn cover_from_candidates(
    g: &WeightedDigraph,
    kind: CycleSetKind,
    candidates: Vec<DisjointCycleUnion>,
) -> Option<CycleSetCertificate> {
    let edges = edge_ids(g);
    let bits: Vec<EdgeBits> = candidates
        .iter()
        .map(|u| union_bits(u, &edges))
        .collect();
    let chosen = minimum_edge_cover(edges.len(), &bits)?;
    let members: Vec<DisjointCycleUnion> =
        chosen.iter().map(|&i| candidates[i].clone()).collect();
    Some(CycleSetCertificate {
        kind,
        cardinality: members.len(),
        members,
    })
}

/// A minimum-cardinality set of disjoint-cycle unions generating `g`
/// (covering every edge). Requires a strongly semiconnected graph of order
/// at most [`MAX_COVER_ORDER`].
pub fn principal_cycle_set(g: &WeightedDigraph) -> Result<CycleSetCertificate> {
    principal_cycle_set_with_cap(g, MAX_COVER_ORDER)
}

/// As [`principal_cycle_set`] with an explicit order cap.
pub fn principal_cycle_set_with_cap(
    g: &WeightedDigraph,
    max_order: usize,
) -> Result<CycleSetCertificate> {
    check_order(g, max_order)?;
    if g.classify_connectivity().class == Connectivity::Neither {
        let (from, to) = g.edge_outside_cycles().expect("witness edge must exist");
        return Err(Error::NotSemiconnected { from, to });
    }
    let candidates = enumerate_disjoint_cycle_unions(g, false)?;
    Ok(cover_from_candidates(g, CycleSetKind::Principal, candidates)
        .expect("strongly semiconnected graphs are covered by their cycles"))
}

/// A minimum-cardinality set of *spanning* disjoint-cycle unions generating
/// `g`, or `None` when no such cover exists (the graph then admits no doubly
/// stochastic assignment on its full edge set). Requires strong
/// connectivity and order at most [`MAX_COVER_ORDER`].
pub fn ds_cycle_set(g: &WeightedDigraph) -> Result<Option<CycleSetCertificate>> {
    ds_cycle_set_with_cap(g, MAX_COVER_ORDER)
}

/// As [`ds_cycle_set`] with an explicit order cap.
pub fn ds_cycle_set_with_cap(
    g: &WeightedDigraph,
    max_order: usize,
) -> Result<Option<CycleSetCertificate>> {
    check_order(g, max_order)?;
    if g.classify_connectivity().class != Connectivity::StronglyConnected {
        return Err(Error::NotStronglyConnected);
    }
    let candidates = enumerate_disjoint_cycle_unions(g, true)?;
    Ok(cover_from_candidates(
        g,
        CycleSetKind::DoublyStochastic,
        candidates,
    ))
}

/// Weight-balances a strongly semiconnected digraph by giving each edge the
/// number of principal-cycle-set members containing it. The result carries
/// positive integer weights and zero imbalance everywhere.
pub fn balance_via_cycle_union(g: &WeightedDigraph) -> Result<WeightedDigraph> {
    let certificate = principal_cycle_set(g)?;
    let mut balanced = WeightedDigraph::new(g.order());
    for member in &certificate.members {
        for (i, j) in member.edges() {
            if balanced.weight(i, j).is_some() {
                balanced.add_to_weight(i, j, &ExactWeight::one());
            } else {
                balanced.set_weight(i, j, ExactWeight::one())?;
            }
        }
    }
    Ok(balanced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn triangle() -> WeightedDigraph {
        WeightedDigraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn triangle_has_one_cycle() {
        let cycles = enumerate_cycles(&triangle(), 12).unwrap();
        assert_eq!(cycles, vec![Cycle::new(vec![0, 1, 2])]);
        assert!(has_spanning_cycle(&triangle()).unwrap());
    }

    #[test]
    fn acyclic_graph_has_no_cycles() {
        let g = WeightedDigraph::from_edges(2, &[(0, 1)]).unwrap();
        assert!(enumerate_cycles(&g, 12).unwrap().is_empty());
    }

    #[test]
    fn fig2b_has_five_cycles() {
        let cycles = enumerate_cycles(&fixtures::fig2b(), 12).unwrap();
        assert_eq!(cycles.len(), 5);
        let spanning: Vec<_> = cycles.iter().filter(|c| c.len() == 5).collect();
        assert_eq!(spanning.len(), 2);
        assert_eq!(spanning[0].vertices(), &[0, 1, 2, 3, 4]);
        assert_eq!(spanning[1].vertices(), &[0, 1, 2, 4, 3]);
    }

    #[test]
    fn fig1_has_a_spanning_cycle_but_no_spanning_cover() {
        // 0 -> 1 -> 2 -> 3 -> 0 is a spanning cycle; the edge (2, 0) lies in
        // no spanning union, so no spanning cover of the edge set exists.
        assert!(has_spanning_cycle(&fixtures::fig1()).unwrap());
        let spanning = enumerate_disjoint_cycle_unions(&fixtures::fig1(), true).unwrap();
        assert_eq!(spanning.len(), 1);
        assert!(ds_cycle_set(&fixtures::fig1()).unwrap().is_none());
    }

    #[test]
    fn fig2b_spanning_unions_are_the_two_spanning_cycles() {
        let spanning = enumerate_disjoint_cycle_unions(&fixtures::fig2b(), true).unwrap();
        assert_eq!(spanning.len(), 2);
        assert!(spanning.iter().all(|u| u.cycles().len() == 1));
    }

    #[test]
    fn triangle_spanning_union_is_unique() {
        let spanning = enumerate_disjoint_cycle_unions(&triangle(), true).unwrap();
        assert_eq!(spanning.len(), 1);
    }

    #[test]
    fn principal_set_of_fig2b() {
        let cert = principal_cycle_set(&fixtures::fig2b()).unwrap();
        assert_eq!(cert.cardinality, 2);
        assert!(cert.covers(&fixtures::fig2b()));
        assert!(cert
            .members
            .iter()
            .all(|m| m.is_spanning(5) && m.cycles().len() == 1));
    }

    #[test]
    fn principal_set_of_triangle_and_fig9() {
        assert_eq!(principal_cycle_set(&triangle()).unwrap().cardinality, 1);
        assert_eq!(
            principal_cycle_set(&fixtures::fig9()).unwrap().cardinality,
            2
        );
    }

    #[test]
    fn principal_set_rejects_non_semiconnected() {
        let g = WeightedDigraph::from_edges(2, &[(0, 1)]).unwrap();
        assert!(matches!(
            principal_cycle_set(&g),
            Err(Error::NotSemiconnected { from: 0, to: 1 })
        ));
    }

    #[test]
    fn ds_character_examples() {
        assert_eq!(
            ds_cycle_set(&fixtures::fig9()).unwrap().unwrap().cardinality,
            2
        );
        assert!(has_spanning_cycle(&fixtures::fig9()).unwrap());
        assert!(ds_cycle_set(&fixtures::fig2a()).unwrap().is_none());
        assert_eq!(ds_cycle_set(&triangle()).unwrap().unwrap().cardinality, 1);
    }

    #[test]
    fn extended_adjacency_examples() {
        let spanning = Cycle::new(vec![0, 1, 2]);
        let m = DisjointCycleUnion::new(vec![spanning]).extended_adjacency(3);
        assert!(m.is_permutation());
        assert_eq!(*m.get(0, 1), ExactWeight::one());
        assert_eq!(*m.get(2, 0), ExactWeight::one());

        let short = DisjointCycleUnion::new(vec![Cycle::new(vec![0, 1])]);
        let m = short.extended_adjacency(3);
        assert!(!m.is_permutation());
        assert!(m.row_sum(2).is_zero());

        let with_loop = DisjointCycleUnion::new(vec![
            Cycle::new(vec![0]),
            Cycle::new(vec![1, 2]),
        ]);
        assert!(with_loop.extended_adjacency(3).is_permutation());
    }

    #[test]
    fn balancing_by_principal_cover() {
        let balanced = balance_via_cycle_union(&fixtures::fig2b()).unwrap();
        assert_eq!(balanced.to_matrix(), fixtures::fig2b_balanced_matrix());

        let tri = balance_via_cycle_union(&triangle()).unwrap();
        assert!(tri.is_unit_weighted());

        let two_cycles =
            WeightedDigraph::from_edges(4, &[(0, 1), (1, 0), (2, 3), (3, 2)]).unwrap();
        let b = balance_via_cycle_union(&two_cycles).unwrap();
        assert!(b.is_unit_weighted());
    }

    #[test]
    fn too_large_graph_is_rejected() {
        let ring: Vec<(usize, usize)> = (0..13).map(|i| (i, (i + 1) % 13)).collect();
        let g = WeightedDigraph::from_edges(13, &ring).unwrap();
        assert!(matches!(
            enumerate_cycles(&g, 12),
            Err(Error::GraphTooLarge { n: 13, max: 12 })
        ));
    }
}
