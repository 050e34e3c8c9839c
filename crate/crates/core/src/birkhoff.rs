//! Decomposition of doubly stochastic matrices into convex combinations of
//! permutation matrices.
//!
//! Greedy extraction: find a permutation supported on the positive entries
//! (a perfect matching of the support bipartite graph), subtract the minimum
//! entry along it, repeat. Each step zeroes at least one entry, so at most
//! `(n-1)^2 + 1` terms appear.

use crate::characterize::is_doubly_stochastic;
use crate::cycles::{Cycle, DisjointCycleUnion};
use crate::error::{Error, Result};
use crate::matrix::RationalMatrix;
use crate::weight::ExactWeight;

/// One extracted term: a positive coefficient and a permutation, stored as
/// the image `perm[i] = j` of each row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BirkhoffTerm {
    pub coefficient: ExactWeight,
    pub permutation: Vec<usize>,
}

impl BirkhoffTerm {
    pub fn permutation_matrix(&self) -> RationalMatrix {
        let n = self.permutation.len();
        let mut m = RationalMatrix::zero(n);
        for (i, &j) in self.permutation.iter().enumerate() {
            m.set(i, j, ExactWeight::one());
        }
        m
    }

    /// The permutation as a union of disjoint cycles (fixed points become
    /// self-loops), i.e. a spanning element of the cycle-union family of the
    /// support digraph.
    pub fn cycle_union(&self) -> DisjointCycleUnion {
        let n = self.permutation.len();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut vertices = Vec::new();
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                vertices.push(v);
                v = self.permutation[v];
            }
            cycles.push(Cycle::new(vertices));
        }
        DisjointCycleUnion::new(cycles)
    }
}

/// Kuhn's augmenting-path matching on the support of `m`: rows are matched
/// to columns holding a positive entry. Deterministic: rows in ascending
/// order, columns tried in ascending order.
fn perfect_matching_on_support(m: &RationalMatrix) -> Option<Vec<usize>> {
    let n = m.order();
    const FREE: usize = usize::MAX;
    let mut match_of_column = vec![FREE; n];

    fn augment(
        m: &RationalMatrix,
        row: usize,
        visited: &mut [bool],
        match_of_column: &mut [usize],
    ) -> bool {
        let n = m.order();
        for col in 0..n {
            if !visited[col] && m.get(row, col).is_positive() {
                visited[col] = true;
                if match_of_column[col] == usize::MAX
                    || augment(m, match_of_column[col], visited, match_of_column)
                {
                    match_of_column[col] = row;
                    return true;
                }
            }
        }
        false
    }

    for row in 0..n {
        let mut visited = vec![false; n];
        if !augment(m, row, &mut visited, &mut match_of_column) {
            return None;
        }
    }
    let mut perm = vec![0usize; n];
    for (col, &row) in match_of_column.iter().enumerate() {
        perm[row] = col;
    }
    Some(perm)
}

/// Writes an exactly doubly stochastic matrix as a positive convex
/// combination of permutation matrices.
///
/// The coefficients sum to one and the terms recombine to the input with
/// exact equality. Every permutation's support lies inside the support of
/// the input, so each term is a spanning disjoint-cycle union of the support
/// digraph.
pub fn birkhoff_decompose(matrix: &RationalMatrix) -> Result<Vec<BirkhoffTerm>> {
    if !is_doubly_stochastic(matrix) {
        return Err(Error::NotDoublyStochastic);
    }
    let mut remaining = matrix.clone();
    let mut terms = Vec::new();
    while !remaining.is_zero() {
        let perm = perfect_matching_on_support(&remaining)
            .expect("a nonzero remainder of a doubly stochastic matrix has a perfect matching");
        let coefficient = perm
            .iter()
            .enumerate()
            .map(|(i, &j)| remaining.get(i, j).clone())
            .min()
            .expect("matrix order is positive");
        for (i, &j) in perm.iter().enumerate() {
            let updated = remaining.get(i, j) - &coefficient;
            remaining.set(i, j, updated);
        }
        terms.push(BirkhoffTerm {
            coefficient,
            permutation: perm,
        });
    }
    Ok(terms)
}

/// Recombines terms into a matrix; inverse of [`birkhoff_decompose`].
pub fn recombine(n: usize, terms: &[BirkhoffTerm]) -> RationalMatrix {
    let mut m = RationalMatrix::zero(n);
    for term in terms {
        m = m.add(&term.permutation_matrix().scale(&term.coefficient));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn identity_is_a_single_term() {
        let terms = birkhoff_decompose(&RationalMatrix::identity(4)).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].coefficient, ExactWeight::one());
        assert_eq!(terms[0].permutation, vec![0, 1, 2, 3]);
    }

    #[test]
    fn two_by_two_mix() {
        let m = RationalMatrix::from_rational_rows(&[&["1/3", "2/3"], &["2/3", "1/3"]]);
        let terms = birkhoff_decompose(&m).unwrap();
        assert_eq!(terms.len(), 2);
        let mut coeffs: Vec<ExactWeight> =
            terms.iter().map(|t| t.coefficient.clone()).collect();
        coeffs.sort();
        assert_eq!(coeffs, vec![ExactWeight::new(1, 3), ExactWeight::new(2, 3)]);
        assert_eq!(recombine(2, &terms), m);
    }

    #[test]
    fn halved_balanced_example_splits_into_its_two_spanning_cycles() {
        let m = fixtures::fig2b_balanced_matrix().scale(&ExactWeight::new(1, 2));
        let terms = birkhoff_decompose(&m).unwrap();
        assert_eq!(terms.len(), 2);
        for term in &terms {
            assert_eq!(term.coefficient, ExactWeight::new(1, 2));
            assert!(term.cycle_union().is_spanning(5));
            assert_eq!(term.cycle_union().cycles().len(), 1);
        }
        assert_eq!(recombine(5, &terms), m);
    }

    #[test]
    fn rejects_non_doubly_stochastic_input() {
        let m = RationalMatrix::from_integer_rows(&[&[1, 1], &[0, 1]]);
        assert!(matches!(
            birkhoff_decompose(&m),
            Err(Error::NotDoublyStochastic)
        ));
    }

    #[test]
    fn decomposes_matrix_with_diagonal_entries() {
        let m = fixtures::fig2a_doubly_stochastic_matrix();
        let terms = birkhoff_decompose(&m).unwrap();
        assert_eq!(recombine(5, &terms), m);
        assert!(terms.len() <= 17); // (n-1)^2 + 1 for n = 5
        let total: ExactWeight = terms.iter().map(|t| t.coefficient.clone()).sum();
        assert_eq!(total, ExactWeight::one());
    }
}
