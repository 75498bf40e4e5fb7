//! Probability tables over default-count tuples.

use std::io::{self, Write};

use crate::error::{Error, Result};

/// Cells below this value are stored as exact zeros.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

/// Default upper bound on the number of cells of an exactly enumerated table.
pub const DEFAULT_CELL_CAP: u128 = 10_000_000;

/// Joint (or marginal) law of the default counts `(f_1, ..., f_k)`, with
/// `0 <= f_i <= dims[i]`. Cells are stored in lexicographic tuple order.
#[derive(Debug, Clone, PartialEq)]
pub struct PmfTable {
    dims: Vec<u64>,
    probs: Vec<f64>,
}

/// Number of cells Π(n_i + 1), or a resource error above `cap`.
pub fn cell_count(dims: &[u64], cap: u128) -> Result<usize> {
    let cells = dims
        .iter()
        .try_fold(1u128, |acc, &n| acc.checked_mul(n as u128 + 1))
        .unwrap_or(u128::MAX);
    if cells > cap {
        return Err(Error::ResourceCap { cells, cap });
    }
    Ok(cells as usize)
}

impl PmfTable {
    /// Builds a table from cells in lexicographic order.
    pub fn from_cells(dims: Vec<u64>, probs: Vec<f64>) -> Result<Self> {
        let expected = cell_count(&dims, u128::MAX)?;
        if probs.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "table with dims {dims:?} needs {expected} cells, got {}",
                probs.len()
            )));
        }
        let probs = probs
            .into_iter()
            .map(|p| if p < UNDERFLOW_FLOOR { 0.0 } else { p })
            .collect();
        Ok(Self { dims, probs })
    }

    pub fn dims(&self) -> &[u64] {
        &self.dims
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Linear index of a count tuple, `None` when out of range.
    pub fn index_of(&self, counts: &[u64]) -> Option<usize> {
        if counts.len() != self.dims.len() {
            return None;
        }
        let mut idx = 0usize;
        for (&f, &n) in counts.iter().zip(&self.dims) {
            if f > n {
                return None;
            }
            idx = idx * (n as usize + 1) + f as usize;
        }
        Some(idx)
    }

    /// Count tuple of a linear index.
    pub fn tuple_of(&self, mut index: usize) -> Vec<u64> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &n) in out.iter_mut().zip(&self.dims).rev() {
            let base = n as usize + 1;
            *slot = (index % base) as u64;
            index /= base;
        }
        out
    }

    /// Probability of a count tuple; zero outside the support.
    pub fn get(&self, counts: &[u64]) -> f64 {
        self.index_of(counts).map_or(0.0, |i| self.probs[i])
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Iterates `(tuple, probability)` in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<u64>, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (self.tuple_of(i), p))
    }

    /// One-dimensional law of coordinate `axis`.
    pub fn marginal(&self, axis: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dims[axis] as usize + 1];
        for (i, &p) in self.probs.iter().enumerate() {
            out[self.tuple_of(i)[axis] as usize] += p;
        }
        out
    }

    /// Largest absolute cell difference between two tables of equal shape.
    pub fn max_abs_diff(&self, other: &PmfTable) -> f64 {
        assert_eq!(self.dims, other.dims, "tables have different shapes");
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Writes `f_1,...,f_k,prob` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let header: Vec<String> = (1..=self.dims.len()).map(|i| format!("f_{i}")).collect();
        writeln!(out, "{},prob", header.join(","))?;
        for (tuple, p) in self.iter() {
            for f in &tuple {
                write!(out, "{f},")?;
            }
            writeln!(out, "{}", format_sig17(p))?;
        }
        Ok(())
    }
}

/// Formats with 17 significant digits in scientific notation.
pub fn format_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        let t = PmfTable::from_cells(vec![2, 3], vec![1.0 / 12.0; 12]).unwrap();
        for i in 0..t.len() {
            assert_eq!(t.index_of(&t.tuple_of(i)), Some(i));
        }
        assert_eq!(t.tuple_of(5), vec![1, 1]);
        assert_eq!(t.index_of(&[3, 0]), None);
        assert_eq!(t.get(&[0, 4]), 0.0);
    }

    #[test]
    fn marginals_and_total() {
        let t = PmfTable::from_cells(vec![1, 1], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!((t.total() - 1.0).abs() < 1e-15);
        let m0 = t.marginal(0);
        assert!((m0[0] - 0.3).abs() < 1e-15 && (m0[1] - 0.7).abs() < 1e-15);
        let m1 = t.marginal(1);
        assert!((m1[0] - 0.4).abs() < 1e-15 && (m1[1] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn tiny_cells_flush_to_zero() {
        let t = PmfTable::from_cells(vec![1], vec![1e-310, 1.0]).unwrap();
        assert_eq!(t.probs()[0], 0.0);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            cell_count(&[9999, 9999], DEFAULT_CELL_CAP),
            Err(Error::ResourceCap { .. })
        ));
        assert_eq!(cell_count(&[2, 3], DEFAULT_CELL_CAP).unwrap(), 12);
    }

    #[test]
    fn csv_layout() {
        let t = PmfTable::from_cells(vec![1, 1], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "f_1,f_2,prob");
        assert_eq!(lines[1], "0,0,1.0000000000000001e-1");
        assert_eq!(lines[4], "1,1,4.0000000000000002e-1");
        assert!(!text.contains('\r'));
    }
}
