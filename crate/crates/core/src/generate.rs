//! Deterministic graph generation for tests, oracles, and benchmarks.
//!
//! Random graphs are seeded explicitly (ChaCha8) so every consumer can
//! reproduce a run from a single `u64`. The exhaustive enumerator yields one
//! representative per isomorphism class of strongly connected digraphs and
//! backs the small-order cross-checking oracles.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Connectivity, WeightedDigraph};
use crate::weight::ExactWeight;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A strongly connected digraph: a ring through a random vertex order plus
/// `extra_edges` distinct random chords, all unit weights.
pub fn ring_with_chords(n: usize, extra_edges: usize, rng: &mut ChaCha8Rng) -> WeightedDigraph {
    assert!(n >= 2, "ring needs at least two vertices");
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut g = WeightedDigraph::new(n);
    for k in 0..n {
        g.set_weight(order[k], order[(k + 1) % n], ExactWeight::one())
            .unwrap();
    }
    let mut remaining = extra_edges;
    let mut attempts = 0usize;
    while remaining > 0 && attempts < 50 * (extra_edges + 1) {
        attempts += 1;
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i != j && g.weight(i, j).is_none() {
            g.set_weight(i, j, ExactWeight::one()).unwrap();
            remaining -= 1;
        }
    }
    debug_assert_eq!(
        g.classify_connectivity().class,
        Connectivity::StronglyConnected
    );
    g
}

/// A ring `0 -> 1 -> ... -> n-1 -> 0` with two-way spokes between vertex 0
/// and every second vertex. Deterministic; useful as a benchmark family.
pub fn star_augmented_ring(n: usize) -> WeightedDigraph {
    assert!(n >= 3);
    let mut g = WeightedDigraph::new(n);
    for k in 0..n {
        g.set_weight(k, (k + 1) % n, ExactWeight::one()).unwrap();
    }
    for k in (2..n - 1).step_by(2) {
        if g.weight(0, k).is_none() {
            g.set_weight(0, k, ExactWeight::one()).unwrap();
        }
        if g.weight(k, 0).is_none() {
            g.set_weight(k, 0, ExactWeight::one()).unwrap();
        }
    }
    g
}

/// Replaces every weight with a uniform random integer in `1..=max_weight`.
pub fn randomize_integer_weights(
    g: &WeightedDigraph,
    max_weight: u32,
    rng: &mut ChaCha8Rng,
) -> WeightedDigraph {
    let mut result = g.clone();
    let edges: Vec<(usize, usize)> = g.edges().map(|(i, j, _)| (i, j)).collect();
    for (i, j) in edges {
        let w = rng.gen_range(1..=max_weight) as i64;
        result.set_weight(i, j, ExactWeight::from_integer(w)).unwrap();
    }
    result
}

/// Ordered vertex pairs `(i, j)`, `i != j`, in lexicographic order: the bit
/// layout used by the exhaustive enumerator.
fn pair_index(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

fn is_strongly_connected_mask(n: usize, pairs: &[(usize, usize)], mask: u32) -> bool {
    let mut adjacency = vec![0u32; n];
    for (bit, &(i, j)) in pairs.iter().enumerate() {
        if mask & (1 << bit) != 0 {
            adjacency[i] |= 1 << j;
        }
    }
    // every vertex needs an out- and an in-edge
    let mut incoming = vec![false; n];
    for (v, &out) in adjacency.iter().enumerate() {
        if out == 0 {
            return false;
        }
        for j in 0..n {
            if out & (1 << j) != 0 {
                incoming[j] = true;
            }
        }
        let _ = v;
    }
    if incoming.iter().any(|&b| !b) {
        return false;
    }
    // bitset reachability from vertex 0, then into vertex 0 on the reverse
    let reach = |adj: &[u32]| -> u32 {
        let mut seen = 1u32;
        loop {
            let mut next = seen;
            for v in 0..n {
                if seen & (1 << v) != 0 {
                    next |= adj[v];
                }
            }
            if next == seen {
                return seen;
            }
            seen = next;
        }
    };
    let all = (1u32 << n) - 1;
    if reach(&adjacency) != all {
        return false;
    }
    let mut reversed = vec![0u32; n];
    for v in 0..n {
        for j in 0..n {
            if adjacency[v] & (1 << j) != 0 {
                reversed[j] |= 1 << v;
            }
        }
    }
    reach(&reversed) == all
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut result = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    fn heap(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, items, out);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut items, &mut result);
    result
}

/// Calls `visit` with one representative (the minimum edge bitmask under
/// vertex relabeling) of every isomorphism class of strongly connected
/// digraphs on `n` vertices, no self-loops. Exhaustive: `n` must stay small
/// (the oracle suites use `n <= 5`).
pub fn for_each_strongly_connected_digraph<F: FnMut(&WeightedDigraph)>(n: usize, mut visit: F) {
    assert!(n >= 2 && n <= 5, "exhaustive enumeration is for 2..=5");
    let pairs = pair_index(n);
    let bits = pairs.len();
    // bit remap tables, one per permutation
    let perms = permutations(n);
    let mut remap_tables: Vec<Vec<u32>> = Vec::with_capacity(perms.len());
    for perm in &perms {
        let table: Vec<u32> = pairs
            .iter()
            .map(|&(i, j)| {
                let target = (perm[i], perm[j]);
                pairs.iter().position(|&p| p == target).unwrap() as u32
            })
            .collect();
        remap_tables.push(table);
    }

    'mask: for mask in 1u32..(1u32 << bits) {
        if !is_strongly_connected_mask(n, &pairs, mask) {
            continue;
        }
        // canonical representative: no relabeling gives a smaller mask
        for table in &remap_tables {
            let mut remapped = 0u32;
            let mut rest = mask;
            while rest != 0 {
                let bit = rest.trailing_zeros();
                rest &= rest - 1;
                remapped |= 1 << table[bit as usize];
            }
            if remapped < mask {
                continue 'mask;
            }
        }
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|&(bit, _)| mask & (1 << bit) != 0)
            .map(|(_, &p)| p)
            .collect();
        let g = WeightedDigraph::from_edges(n, &edges).unwrap();
        visit(&g);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_graphs_are_strongly_connected() {
        let mut rng = rng_from_seed(7);
        for n in 2..10 {
            let g = ring_with_chords(n, n / 2, &mut rng);
            assert_eq!(
                g.classify_connectivity().class,
                Connectivity::StronglyConnected
            );
        }
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = ring_with_chords(8, 5, &mut rng_from_seed(42));
        let b = ring_with_chords(8, 5, &mut rng_from_seed(42));
        assert_eq!(a, b);
    }

    #[test]
    fn exhaustive_enumeration_counts() {
        // n = 2: the 2-cycle is the only strongly connected digraph
        let mut count = 0;
        for_each_strongly_connected_digraph(2, |_| count += 1);
        assert_eq!(count, 1);

        // n = 3, by hand: the 3-cycle, the 3-cycle plus one, two, or three
        // reversed edges, and the two 2-cycles sharing a vertex
        let mut count = 0;
        let mut all_connected = true;
        for_each_strongly_connected_digraph(3, |g| {
            count += 1;
            all_connected &=
                g.classify_connectivity().class == Connectivity::StronglyConnected;
        });
        assert!(all_connected);
        assert_eq!(count, 5);
    }

    #[test]
    fn star_ring_is_strongly_connected() {
        for n in [3, 5, 8, 11] {
            let g = star_augmented_ring(n);
            assert_eq!(
                g.classify_connectivity().class,
                Connectivity::StronglyConnected
            );
        }
    }
}
