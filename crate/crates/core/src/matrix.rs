//! Dense square matrices of exact rationals.
//!
//! Plain row-major storage is all the adjacency work here needs; orders stay
//! in the double digits.

use std::fmt;

use crate::weight::ExactWeight;

/// An `n × n` matrix of [`ExactWeight`]s.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    n: usize,
    entries: Vec<ExactWeight>,
}

impl RationalMatrix {
    pub fn zero(n: usize) -> Self {
        RationalMatrix {
            n,
            entries: vec![ExactWeight::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RationalMatrix::zero(n);
        for i in 0..n {
            m.set(i, i, ExactWeight::one());
        }
        m
    }

    /// Builds a matrix from integer rows; panics unless the shape is square.
    pub fn from_integer_rows(rows: &[&[i64]]) -> Self {
        let n = rows.len();
        let mut m = RationalMatrix::zero(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has wrong length");
            for (j, &value) in row.iter().enumerate() {
                m.set(i, j, ExactWeight::from_integer(value));
            }
        }
        m
    }

    /// Builds a matrix from rows of `"num/den"` strings.
    pub fn from_rational_rows(rows: &[&[&str]]) -> Self {
        let n = rows.len();
        let mut m = RationalMatrix::zero(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has wrong length");
            for (j, text) in row.iter().enumerate() {
                m.set(i, j, text.parse().expect("bad rational literal"));
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &ExactWeight {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: ExactWeight) {
        self.entries[i * self.n + j] = value;
    }

    pub fn row_sum(&self, i: usize) -> ExactWeight {
        (0..self.n).map(|j| self.get(i, j)).sum()
    }

    pub fn column_sum(&self, j: usize) -> ExactWeight {
        (0..self.n).map(|i| self.get(i, j)).sum()
    }

    pub fn row_sums(&self) -> Vec<ExactWeight> {
        (0..self.n).map(|i| self.row_sum(i)).collect()
    }

    pub fn column_sums(&self) -> Vec<ExactWeight> {
        (0..self.n).map(|j| self.column_sum(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn has_negative_entry(&self) -> bool {
        self.entries.iter().any(|e| e.is_negative())
    }

    pub fn scale(&self, factor: &ExactWeight) -> RationalMatrix {
        RationalMatrix {
            n: self.n,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    pub fn add(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.n, other.n, "order mismatch");
        RationalMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.n, other.n, "order mismatch");
        RationalMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// True when exactly one entry per row and per column is 1 and the rest
    /// are 0.
    pub fn is_permutation(&self) -> bool {
        let one = ExactWeight::one();
        let mut col_seen = vec![false; self.n];
        for i in 0..self.n {
            let mut row_ones = 0;
            for j in 0..self.n {
                let e = self.get(i, j);
                if *e == one {
                    row_ones += 1;
                    if col_seen[j] {
                        return false;
                    }
                    col_seen[j] = true;
                } else if !e.is_zero() {
                    return false;
                }
            }
            if row_ones != 1 {
                return false;
            }
        }
        true
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix({}x{}) [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                write!(f, "{} ", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_and_permutation_check() {
        let m = RationalMatrix::from_integer_rows(&[&[0, 2], &[1, 1]]);
        assert_eq!(m.row_sum(0), ExactWeight::from_integer(2));
        assert_eq!(m.column_sum(1), ExactWeight::from_integer(3));
        assert!(!m.is_permutation());
        assert!(RationalMatrix::identity(3).is_permutation());
        let swap = RationalMatrix::from_integer_rows(&[&[0, 1], &[1, 0]]);
        assert!(swap.is_permutation());
    }

    #[test]
    fn scale_is_exact() {
        let m = RationalMatrix::from_integer_rows(&[&[0, 2], &[2, 0]]);
        let half = m.scale(&ExactWeight::new(1, 2));
        assert_eq!(*half.get(0, 1), ExactWeight::one());
    }
}
