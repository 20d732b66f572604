//! Linear codes over GF(q) held by an n×k generator matrix.
//!
//! Codewords are `c = G·m` for messages `m ∈ GF(q)^k`. Messages are
//! enumerated in lexicographic order of their base-`q` index with `m[0]` the
//! most significant digit; this order fixes the column order of every array
//! and schedule derived from a code.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldTable, Symbol};

/// Upper bound on `q^k` for exhaustive codeword enumeration.
pub const ENUMERATION_CAP: u128 = 1 << 20;

/// Upper bound on the length of generated Hamming codes.
pub const HAMMING_LENGTH_CAP: usize = 4096;

#[derive(Debug, Clone)]
pub struct LinearCode {
    field: Arc<FieldTable>,
    n: usize,
    k: usize,
    /// Row-major n×k.
    gen: Vec<Symbol>,
}

/// `[n, k, d]_q` parameters plus dual distance. Distances are `None` when the
/// enumeration would exceed [`ENUMERATION_CAP`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodeReport {
    pub q: usize,
    pub n: usize,
    pub k: usize,
    pub d_min: Option<usize>,
    pub d_dual: Option<usize>,
}

impl LinearCode {
    /// Builds a code from the rows of its n×k generator matrix, checking
    /// symbols and rank.
    ///
    /// `k = 0` (the zero code) is accepted so that duals of full-space codes
    /// exist; such a code has no nonzero codewords.
    pub fn new(field: Arc<FieldTable>, rows: Vec<Vec<Symbol>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidParameter("code length must be >= 1".into()));
        }
        let k = rows[0].len();
        if k > n {
            return Err(Error::InvalidParameter(format!("dimension {k} exceeds length {n}")));
        }
        let q = field.order() as u32;
        let mut gen = Vec::with_capacity(n * k);
        for row in &rows {
            if row.len() != k {
                return Err(Error::DimensionMismatch { expected: k, got: row.len() });
            }
            for &s in row {
                if s as u32 >= q {
                    return Err(Error::SymbolOutOfRange { symbol: s as u32, q });
                }
            }
            gen.extend_from_slice(row);
        }
        let code = Self { field, n, k, gen };
        let rank = rank(&code.field, &code.columns(), n);
        if rank != k {
            return Err(Error::RankDeficient { rank, k });
        }
        Ok(code)
    }

    /// Code with the k×k identity as generator; every message is its own codeword.
    pub fn identity(field: Arc<FieldTable>, k: usize) -> Result<Self> {
        let rows = (0..k).map(|i| (0..k).map(|j| (i == j) as Symbol).collect()).collect();
        Self::new(field, rows)
    }

    pub fn field(&self) -> &Arc<FieldTable> {
        &self.field
    }

    pub fn q(&self) -> usize {
        self.field.order()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn generator_entry(&self, row: usize, col: usize) -> Symbol {
        self.gen[row * self.k + col]
    }

    pub fn generator_rows(&self) -> Vec<Vec<Symbol>> {
        self.gen.chunks(self.k.max(1)).take(self.n).map(|r| r[..self.k].to_vec()).collect()
    }

    /// Columns of the generator, each a length-n codeword.
    pub fn columns(&self) -> Vec<Vec<Symbol>> {
        (0..self.k).map(|j| (0..self.n).map(|i| self.generator_entry(i, j)).collect()).collect()
    }

    /// Number of codewords `q^k`.
    pub fn size(&self) -> u128 {
        (self.q() as u128).pow(self.k as u32)
    }

    pub fn encode(&self, message: &[Symbol]) -> Result<Vec<Symbol>> {
        if message.len() != self.k {
            return Err(Error::DimensionMismatch { expected: self.k, got: message.len() });
        }
        for &s in message {
            self.field.element(s as u32)?;
        }
        Ok(self.encode_unchecked(message))
    }

    pub(crate) fn encode_unchecked(&self, message: &[Symbol]) -> Vec<Symbol> {
        (0..self.n)
            .map(|i| self.field.dot(&self.gen[i * self.k..(i + 1) * self.k], message))
            .collect()
    }

    /// Message with lexicographic index `index`.
    pub fn message(&self, index: usize) -> Vec<Symbol> {
        crate::group::unpack(index, self.q(), self.k).into_iter().map(|s| s as Symbol).collect()
    }

    fn check_enumerable(&self, what: &'static str) -> Result<usize> {
        let size = self.size();
        if size > ENUMERATION_CAP {
            return Err(Error::CapExceeded { what, needed: size, cap: ENUMERATION_CAP });
        }
        Ok(size as usize)
    }

    /// All `q^k` codewords, message index order.
    pub fn codewords(&self) -> Result<Vec<Vec<Symbol>>> {
        let size = self.check_enumerable("codeword enumeration")?;
        Ok((0..size).into_par_iter().map(|j| self.encode_unchecked(&self.message(j))).collect())
    }

    /// Minimum Hamming weight over nonzero codewords, by full enumeration.
    /// The zero code has no nonzero codewords and reports `n + 1`.
    pub fn min_distance(&self) -> Result<usize> {
        let size = self.check_enumerable("minimum distance")?;
        Ok((1..size)
            .into_par_iter()
            .map(|j| self.encode_unchecked(&self.message(j)).iter().filter(|&&s| s != 0).count())
            .min()
            .unwrap_or(self.n + 1))
    }

    /// The dual code `{x : x·c = 0 for all c ∈ C}`, of dimension n − k.
    pub fn dual(&self) -> LinearCode {
        let basis = nullspace(&self.field, &self.columns(), self.n);
        let rows = (0..self.n).map(|i| basis.iter().map(|v| v[i]).collect()).collect::<Vec<Vec<_>>>();
        Self::new(self.field.clone(), rows).expect("nullspace basis is independent")
    }

    /// Minimum distance of the dual code.
    pub fn dual_distance(&self) -> Result<usize> {
        self.dual().min_distance()
    }

    pub fn report(&self) -> CodeReport {
        CodeReport {
            q: self.q(),
            n: self.n,
            k: self.k,
            d_min: self.min_distance().ok(),
            d_dual: self.dual_distance().ok(),
        }
    }
}

impl PartialEq for LinearCode {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.n == other.n && self.k == other.k && self.gen == other.gen
    }
}

/// The `[(q^m−1)/(q−1), (q^m−1)/(q−1) − m, 3]_q` Hamming code.
///
/// Parity-check columns are the projective points of GF(q)^m normalized to a
/// leading 1, in lexicographic order. The generator spans their nullspace.
pub fn hamming_code(field: Arc<FieldTable>, m: usize) -> Result<LinearCode> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("Hamming redundancy must be >= 2, got {m}")));
    }
    let q = field.order();
    let len = (q as u128).pow(m as u32).saturating_sub(1) / (q as u128 - 1);
    if len > HAMMING_LENGTH_CAP as u128 {
        return Err(Error::CapExceeded { what: "Hamming code length", needed: len, cap: HAMMING_LENGTH_CAP as u128 });
    }
    let points: Vec<Vec<Symbol>> = (1..q.pow(m as u32))
        .map(|idx| crate::group::unpack(idx, q, m).into_iter().map(|s| s as Symbol).collect::<Vec<_>>())
        .filter(|v| v.iter().find(|&&s| s != 0) == Some(&1))
        .collect();
    debug_assert_eq!(points.len() as u128, len);
    let n = points.len();
    // The parity-check rows, as vectors of length n.
    let checks: Vec<Vec<Symbol>> = (0..m).map(|r| points.iter().map(|pt| pt[r]).collect()).collect();
    let basis = nullspace(&field, &checks, n);
    let rows = (0..n).map(|i| basis.iter().map(|v| v[i]).collect()).collect();
    LinearCode::new(field, rows)
}

/// Reduced row echelon form in place; returns pivot columns.
fn row_reduce(field: &FieldTable, rows: &mut [Vec<Symbol>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, pr);
        let inv = field.inv(rows[r][c]).expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = field.sub(*x, field.mul(f, y));
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

fn rank(field: &FieldTable, vectors: &[Vec<Symbol>], len: usize) -> usize {
    let mut rows = vectors.to_vec();
    row_reduce(field, &mut rows, len).len()
}

/// Basis of `{x ∈ GF(q)^len : r·x = 0 for every r in rows}`, one vector per
/// free column in increasing order.
fn nullspace(field: &FieldTable, rows: &[Vec<Symbol>], len: usize) -> Vec<Vec<Symbol>> {
    let mut reduced = rows.to_vec();
    let pivots = row_reduce(field, &mut reduced, len);
    (0..len)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0; len];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = field.neg(reduced[r][free]);
            }
            v
        })
        .collect()
}
