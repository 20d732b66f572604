//! Orthogonal arrays and exhaustive strength verification.

use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::code::LinearCode;
use crate::error::{Error, Result};
use crate::field::Symbol;
use crate::group::{pack, unpack};

/// Dense n×N matrix of symbols, row-major. Rows are qudits, columns are
/// time segments.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Symbol>,
}

impl SymbolMatrix {
    pub fn from_rows(rows: Vec<Vec<Symbol>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in &rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Symbol>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        for c in columns {
            if c.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, got: c.len() });
            }
        }
        let data = (0..rows).flat_map(|i| columns.iter().map(move |c| c[i])).collect();
        Ok(Self { rows, cols: columns.len(), data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Symbol] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, row: usize, col: usize) -> Symbol {
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Symbol) {
        self.data[row * self.cols + col] = value;
    }

    pub fn column(&self, j: usize) -> Vec<Symbol> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn max_symbol(&self) -> Option<Symbol> {
        self.data.iter().copied().max()
    }

    /// Keeps the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let data = rows.iter().flat_map(|&r| self.row(r).iter().copied()).collect();
        Self { rows: rows.len(), cols: self.cols, data }
    }

    /// Reorders columns: column `j` of the result is column `order[j]`.
    pub fn permute_columns(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.cols);
        let data = (0..self.rows).flat_map(|i| order.iter().map(move |&j| self.get(i, j))).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    /// Packs rows `subset` of column `j` into a base-`q` tuple index.
    pub(crate) fn tuple(&self, subset: &[usize], j: usize, q: usize) -> usize {
        pack(subset.iter().map(|&r| self.get(r, j) as usize), q)
    }
}

/// First failing row subset found by [`verify_strength`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrengthViolation {
    /// Zero-based row indices.
    pub rows: Vec<usize>,
    pub tuple: Vec<usize>,
    pub count: usize,
    /// The count required for strength `t`, or `None` when `q^t ∤ N`.
    pub expected: Option<usize>,
}

impl fmt::Display for StrengthViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rows {:?}: tuple {:?} occurs {} times", self.rows, self.tuple, self.count)?;
        match self.expected {
            Some(e) => write!(f, ", expected {e}"),
            None => write!(f, ", and the column count is not a multiple of q^t"),
        }
    }
}

/// Checks that every t-row sub-array contains each of the `q^t` tuples
/// equally often, returning that multiplicity λ.
///
/// Row subsets are visited in lexicographic order and the first violation
/// in that order is reported. `t = 0` is vacuous and returns `N`.
pub fn verify_strength(m: &SymbolMatrix, q: usize, t: usize) -> std::result::Result<usize, StrengthViolation> {
    let n_cols = m.cols();
    if t == 0 {
        return Ok(n_cols);
    }
    assert!(t <= m.rows(), "strength {t} exceeds row count {}", m.rows());
    let tuples = q.pow(t as u32);
    let expected = n_cols.is_multiple_of(tuples).then_some(n_cols / tuples);
    let target = expected.unwrap_or(0);
    let subsets: Vec<Vec<usize>> = (0..m.rows()).combinations(t).collect();
    let violation = subsets.par_iter().find_map_first(|subset| {
        let mut counts = vec![0usize; tuples];
        for j in 0..n_cols {
            counts[m.tuple(subset, j, q)] += 1;
        }
        counts.iter().position(|&c| expected.is_none() || c != target).map(|idx| StrengthViolation {
            rows: subset.clone(),
            tuple: unpack(idx, q, t),
            count: counts[idx],
            expected,
        })
    });
    match violation {
        Some(v) => Err(v),
        None => Ok(target),
    }
}

/// Largest `t` for which [`verify_strength`] succeeds; 0 if even `t = 1` fails.
pub fn max_strength(m: &SymbolMatrix, q: usize) -> usize {
    (1..=m.rows())
        .take_while(|&t| q.pow(t as u32) <= m.cols())
        .take_while(|&t| verify_strength(m, q, t).is_ok())
        .last()
        .unwrap_or(0)
}

/// An `OA_λ(N, n, q, t)` whose strength has been verified by counting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalArray {
    q: usize,
    strength: usize,
    lambda: usize,
    entries: SymbolMatrix,
}

impl OrthogonalArray {
    /// Verifies the claimed strength; the header parameters of a file are
    /// only claims until this succeeds.
    pub fn new(entries: SymbolMatrix, q: usize, strength: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 levels, got {q}")));
        }
        if let Some(s) = entries.max_symbol() {
            if s as usize >= q {
                return Err(Error::SymbolOutOfRange { symbol: s as u32, q: q as u32 });
            }
        }
        if strength > entries.rows() {
            return Err(Error::InvalidParameter(format!(
                "strength {strength} exceeds row count {}",
                entries.rows()
            )));
        }
        let lambda = verify_strength(&entries, q, strength).map_err(|v| Error::Verification(v.to_string()))?;
        Ok(Self { q, strength, lambda, entries })
    }

    pub fn levels(&self) -> usize {
        self.q
    }

    pub fn strength(&self) -> usize {
        self.strength
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    /// Number of rows `n`.
    pub fn factors(&self) -> usize {
        self.entries.rows()
    }

    /// Number of columns `N`.
    pub fn runs(&self) -> usize {
        self.entries.cols()
    }

    pub fn entries(&self) -> &SymbolMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> SymbolMatrix {
        self.entries
    }
}

/// Arranges the codewords of `code` as columns: an `OA(q^k, n, q, d⊥ − 1)`.
///
/// `dual_distance` is supplied by the caller so that codes whose dual is too
/// large to enumerate can still be used; a wrong value fails verification.
pub fn oa_from_code(code: &LinearCode, dual_distance: usize) -> Result<OrthogonalArray> {
    if dual_distance < 2 {
        return Err(Error::InvalidParameter(format!("dual distance {dual_distance} gives strength 0")));
    }
    let strength = dual_distance - 1;
    if strength > code.len() {
        return Err(Error::InvalidParameter(format!(
            "dual distance {dual_distance} exceeds length + 1 = {}",
            code.len() + 1
        )));
    }
    let entries = SymbolMatrix::from_columns(&code.codewords()?)?;
    let oa = OrthogonalArray::new(entries, code.q(), strength)?;
    debug_assert_eq!(oa.lambda() * code.q().pow(strength as u32), oa.runs());
    Ok(oa)
}
