//! Weighted digraphs with exact edge weights.
//!
//! A [`WeightedDigraph`] is a digraph on vertices `0..n` together with a
//! positive-or-zero rational weight on every edge. Vertices are dense
//! 0-indexed integers, which gives every operation a canonical ordering to
//! break ties deterministically. Values are immutable in spirit: all
//! operations here are pure functions returning fresh graphs.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::RationalMatrix;
use crate::weight::ExactWeight;

/// A digraph on `0..n` with an exact weight per edge.
///
/// At most one edge per ordered pair; self-loops `(v, v)` are rejected unless
/// the graph was created with [`WeightedDigraph::new_with_self_loops`].
/// Zero-weight edges may exist transiently while a protocol runs, but the
/// constructors and assignment-producing operations keep weights positive.
#[derive(Clone, PartialEq, Eq)]
pub struct WeightedDigraph {
    n: usize,
    allows_self_loops: bool,
    weights: BTreeMap<(usize, usize), ExactWeight>,
}

/// Exact degrees and imbalances of every vertex.
///
/// `imbalance[v]` is the weighted in-degree minus the weighted out-degree;
/// summed over all vertices the imbalances always cancel to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    pub weighted_out: Vec<ExactWeight>,
    pub weighted_in: Vec<ExactWeight>,
    pub imbalance: Vec<ExactWeight>,
    pub out_degree: Vec<usize>,
    pub in_degree: Vec<usize>,
}

/// Connectivity class of a digraph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectivity {
    /// One strongly connected component covering every vertex.
    StronglyConnected,
    /// Every edge joins two vertices of the same strongly connected
    /// component, but there is more than one component. Equivalently, every
    /// edge lies on a cycle.
    StronglySemiconnected,
    /// Some edge leaves its strongly connected component.
    Neither,
}

/// Connectivity class plus the strongly connected components, each sorted,
/// listed in order of their smallest vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectivityReport {
    pub class: Connectivity,
    pub components: Vec<Vec<usize>>,
}

impl WeightedDigraph {
    /// An edgeless digraph on `n` vertices (self-loops disallowed).
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "digraph must have at least one vertex");
        WeightedDigraph {
            n,
            allows_self_loops: false,
            weights: BTreeMap::new(),
        }
    }

    /// An edgeless digraph on `n` vertices that accepts self-loops.
    pub fn new_with_self_loops(n: usize) -> Self {
        assert!(n > 0, "digraph must have at least one vertex");
        WeightedDigraph {
            n,
            allows_self_loops: true,
            weights: BTreeMap::new(),
        }
    }

    /// Builds a digraph with unit weight on each listed edge.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = WeightedDigraph::new(n);
        for &(i, j) in edges {
            if g.weight(i, j).is_some() {
                return Err(Error::DuplicateEdge { from: i, to: j });
            }
            g.set_weight(i, j, ExactWeight::one())?;
        }
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn allows_self_loops(&self) -> bool {
        self.allows_self_loops
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, from: usize, to: usize) -> Option<&ExactWeight> {
        self.weights.get(&(from, to))
    }

    /// Inserts or replaces the weight of `(from, to)`. A zero weight is
    /// stored as an explicit edge (protocols need the distinction between
    /// "edge of weight zero" and "no edge"); negative weights are rejected.
    pub fn set_weight(&mut self, from: usize, to: usize, weight: ExactWeight) -> Result<()> {
        if from >= self.n {
            return Err(Error::VertexOutOfRange {
                index: from,
                n: self.n,
            });
        }
        if to >= self.n {
            return Err(Error::VertexOutOfRange {
                index: to,
                n: self.n,
            });
        }
        if from == to && !self.allows_self_loops {
            return Err(Error::SelfLoopNotAllowed { v: from });
        }
        if weight.is_negative() {
            return Err(Error::NegativeWeight {
                from,
                to,
                weight: weight.to_string(),
            });
        }
        self.weights.insert((from, to), weight);
        Ok(())
    }

    pub fn add_to_weight(&mut self, from: usize, to: usize, delta: &ExactWeight) {
        let w = self
            .weights
            .get_mut(&(from, to))
            .expect("edge must exist before adjusting its weight");
        *w += delta;
    }

    pub fn remove_edge(&mut self, from: usize, to: usize) -> Option<ExactWeight> {
        self.weights.remove(&(from, to))
    }

    /// Edges in lexicographic `(from, to)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &ExactWeight)> {
        self.weights.iter().map(|(&(i, j), w)| (i, j, w))
    }

    /// Out-neighbors of `v` in ascending order, self-loop excluded.
    pub fn out_neighbors(&self, v: usize) -> Vec<usize> {
        self.weights
            .range((v, 0)..=(v, self.n.saturating_sub(1)))
            .map(|(&(_, j), _)| j)
            .filter(|&j| j != v)
            .collect()
    }

    /// In-neighbors of `v` in ascending order, self-loop excluded.
    pub fn in_neighbors(&self, v: usize) -> Vec<usize> {
        let mut result: Vec<usize> = self
            .weights
            .keys()
            .filter(|&&(i, j)| j == v && i != v)
            .map(|&(i, _)| i)
            .collect();
        result.sort_unstable();
        result
    }

    /// True when every stored edge weight is strictly positive.
    pub fn all_weights_positive(&self) -> bool {
        self.weights.values().all(|w| w.is_positive())
    }

    /// True when every stored edge weight is exactly one.
    pub fn is_unit_weighted(&self) -> bool {
        self.weights.values().all(|w| *w == ExactWeight::one())
    }

    /// Exact weighted and unweighted degrees of every vertex.
    pub fn degree_profile(&self) -> DegreeProfile {
        let mut profile = DegreeProfile {
            weighted_out: vec![ExactWeight::zero(); self.n],
            weighted_in: vec![ExactWeight::zero(); self.n],
            imbalance: vec![ExactWeight::zero(); self.n],
            out_degree: vec![0; self.n],
            in_degree: vec![0; self.n],
        };
        for (&(i, j), w) in &self.weights {
            profile.weighted_out[i] += w;
            profile.weighted_in[j] += w;
            profile.out_degree[i] += 1;
            profile.in_degree[j] += 1;
        }
        for v in 0..self.n {
            profile.imbalance[v] =
                profile.weighted_in[v].clone() - profile.weighted_out[v].clone();
        }
        profile
    }

    /// The digraph with edge set `E ∪ E⁻`. Reversed edges that were not
    /// already present get weight 1: the mirror serves as a communication
    /// topology only and its weights never enter balance computations.
    pub fn mirror(&self) -> WeightedDigraph {
        let mut g = self.clone();
        for &(i, j) in self.weights.keys() {
            if !self.weights.contains_key(&(j, i)) {
                g.weights.insert((j, i), ExactWeight::one());
            }
        }
        g
    }

    /// Union of two digraphs over the same vertex range: weights add on
    /// shared edges and carry over on exclusive ones.
    pub fn weighted_union(&self, other: &WeightedDigraph) -> WeightedDigraph {
        let mut g = WeightedDigraph {
            n: self.n.max(other.n),
            allows_self_loops: self.allows_self_loops || other.allows_self_loops,
            weights: self.weights.clone(),
        };
        for (&(i, j), w) in &other.weights {
            g.weights
                .entry((i, j))
                .and_modify(|existing| *existing += w)
                .or_insert_with(|| w.clone());
        }
        g
    }

    /// Adjacency-matrix view: entry `(i, j)` is the weight of edge `(i, j)`
    /// or zero.
    pub fn to_matrix(&self) -> RationalMatrix {
        let mut m = RationalMatrix::zero(self.n);
        for (&(i, j), w) in &self.weights {
            m.set(i, j, w.clone());
        }
        m
    }

    /// Builds the digraph supported on the positive entries of `matrix`.
    pub fn from_matrix(matrix: &RationalMatrix, allows_self_loops: bool) -> Result<Self> {
        let n = matrix.order();
        let mut g = if allows_self_loops {
            WeightedDigraph::new_with_self_loops(n)
        } else {
            WeightedDigraph::new(n)
        };
        for i in 0..n {
            for j in 0..n {
                let entry = matrix.get(i, j);
                if entry.is_negative() {
                    return Err(Error::NegativeWeight {
                        from: i,
                        to: j,
                        weight: entry.to_string(),
                    });
                }
                if entry.is_positive() {
                    g.set_weight(i, j, entry.clone())?;
                }
            }
        }
        Ok(g)
    }

    /// Subgraph induced by `vertices` (which must be sorted and distinct),
    /// reindexed to `0..vertices.len()`.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> WeightedDigraph {
        let mut index = vec![usize::MAX; self.n];
        for (new, &old) in vertices.iter().enumerate() {
            index[old] = new;
        }
        let mut g = WeightedDigraph {
            n: vertices.len(),
            allows_self_loops: self.allows_self_loops,
            weights: BTreeMap::new(),
        };
        for (&(i, j), w) in &self.weights {
            if index[i] != usize::MAX && index[j] != usize::MAX {
                g.weights.insert((index[i], index[j]), w.clone());
            }
        }
        g
    }

    /// Strongly connected components (Tarjan), sorted internally and listed
    /// by smallest contained vertex.
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        let adj: Vec<Vec<usize>> = (0..self.n)
            .map(|v| {
                self.weights
                    .range((v, 0)..=(v, self.n - 1))
                    .map(|(&(_, j), _)| j)
                    .collect()
            })
            .collect();
        tarjan_scc(&adj)
    }

    /// Connectivity class plus the component decomposition.
    pub fn classify_connectivity(&self) -> ConnectivityReport {
        let components = self.strongly_connected_components();
        let mut component_of = vec![0usize; self.n];
        for (idx, comp) in components.iter().enumerate() {
            for &v in comp {
                component_of[v] = idx;
            }
        }
        let class = if components.len() == 1 {
            Connectivity::StronglyConnected
        } else if self
            .weights
            .keys()
            .all(|&(i, j)| component_of[i] == component_of[j])
        {
            Connectivity::StronglySemiconnected
        } else {
            Connectivity::Neither
        };
        ConnectivityReport { class, components }
    }

    /// Lexicographically smallest edge that leaves its strongly connected
    /// component, i.e. an edge lying on no cycle. `None` when the graph is
    /// strongly semiconnected.
    pub fn edge_outside_cycles(&self) -> Option<(usize, usize)> {
        let components = self.strongly_connected_components();
        let mut component_of = vec![0usize; self.n];
        for (idx, comp) in components.iter().enumerate() {
            for &v in comp {
                component_of[v] = idx;
            }
        }
        self.weights
            .keys()
            .find(|&&(i, j)| component_of[i] != component_of[j])
            .copied()
    }
}

impl fmt::Debug for WeightedDigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightedDigraph(n={}, edges=[", self.n)?;
        for (idx, (i, j, w)) in self.edges().enumerate() {
            if idx > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}->{}:{}", i, j, w)?;
        }
        write!(f, "])")
    }
}

/// Iterative Tarjan. Components come out sorted by smallest contained
/// vertex, each with ascending vertex order.
fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut components: Vec<Vec<usize>> = Vec::new();

    // (vertex, next child position)
    let mut call_stack: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        call_stack.push((root, 0));
        while let Some(&mut (v, ref mut child)) = call_stack.last_mut() {
            if *child == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *child < adj[v].len() {
                let w = adj[v][*child];
                *child += 1;
                if index[w] == UNSET {
                    call_stack.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call_stack.pop();
                if let Some(&mut (parent, _)) = call_stack.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    component.sort_unstable();
                    components.push(component);
                }
            }
        }
    }
    components.sort_by_key(|c| c[0]);
    components
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn degree_profile_on_four_vertex_example() {
        let g = fixtures::fig1();
        let p = g.degree_profile();
        let expect: Vec<ExactWeight> = [1, 0, -1, 0]
            .iter()
            .map(|&x| ExactWeight::from_integer(x))
            .collect();
        assert_eq!(p.imbalance, expect);
        assert_eq!(p.imbalance.iter().sum::<ExactWeight>(), ExactWeight::zero());
    }

    #[test]
    fn degree_profile_on_five_vertex_example() {
        let g = fixtures::fig2a();
        let p = g.degree_profile();
        let expect: Vec<ExactWeight> = [1, -1, 2, -2, 0]
            .iter()
            .map(|&x| ExactWeight::from_integer(x))
            .collect();
        assert_eq!(p.imbalance, expect);
    }

    #[test]
    fn mirror_of_single_edge() {
        let g = WeightedDigraph::from_edges(2, &[(0, 1)]).unwrap();
        let m = g.mirror();
        assert_eq!(m.edge_count(), 2);
        assert!(m.weight(0, 1).is_some());
        assert!(m.weight(1, 0).is_some());
    }

    #[test]
    fn mirror_counts_and_idempotence() {
        let g = fixtures::fig1();
        let m = g.mirror();
        assert_eq!(m.edge_count(), 10);
        let mm = m.mirror();
        let edges_m: Vec<_> = m.edges().map(|(i, j, _)| (i, j)).collect();
        let edges_mm: Vec<_> = mm.edges().map(|(i, j, _)| (i, j)).collect();
        assert_eq!(edges_m, edges_mm);
    }

    #[test]
    fn mirror_of_symmetric_graph_is_identity_on_edges() {
        let g = WeightedDigraph::from_edges(2, &[(0, 1), (1, 0)]).unwrap();
        let m = g.mirror();
        assert_eq!(m.edge_count(), 2);
    }

    #[test]
    fn union_adds_weights() {
        let g = fixtures::fig2b();
        let doubled = g.weighted_union(&g);
        for (i, j, w) in g.edges() {
            assert_eq!(
                *doubled.weight(i, j).unwrap(),
                w + w,
                "edge ({i},{j}) not doubled"
            );
        }
        let empty = WeightedDigraph::new(g.order());
        let same = g.weighted_union(&empty);
        assert_eq!(same, g);
    }

    #[test]
    fn connectivity_classes() {
        let fig1 = fixtures::fig1();
        let report = fig1.classify_connectivity();
        assert_eq!(report.class, Connectivity::StronglyConnected);
        assert_eq!(report.components.len(), 1);

        let two_cycles =
            WeightedDigraph::from_edges(4, &[(0, 1), (1, 0), (2, 3), (3, 2)]).unwrap();
        let report = two_cycles.classify_connectivity();
        assert_eq!(report.class, Connectivity::StronglySemiconnected);
        assert_eq!(report.components, vec![vec![0, 1], vec![2, 3]]);

        let arc = WeightedDigraph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(arc.classify_connectivity().class, Connectivity::Neither);
        assert_eq!(arc.edge_outside_cycles(), Some((0, 1)));
    }

    #[test]
    fn self_loop_rejected_unless_enabled() {
        let mut g = WeightedDigraph::new(2);
        assert!(matches!(
            g.set_weight(1, 1, ExactWeight::one()),
            Err(Error::SelfLoopNotAllowed { v: 1 })
        ));
        let mut g = WeightedDigraph::new_with_self_loops(2);
        assert!(g.set_weight(1, 1, ExactWeight::one()).is_ok());
    }

    #[test]
    fn matrix_round_trip() {
        let g = fixtures::fig2a();
        let m = g.to_matrix();
        let back = WeightedDigraph::from_matrix(&m, false).unwrap();
        assert_eq!(g, back);
    }
}
