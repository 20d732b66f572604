//! Eulerian cycles on Cayley graphs of (GF(q)^k, +) and Eulerian orthogonal
//! arrays.
//!
//! A transition between consecutive columns is always `c_{j+1} − c_j`,
//! computed cyclically so the last column steps back to the first.

use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::code::LinearCode;
use crate::error::{Error, Result};
use crate::field::Symbol;
use crate::group::{prime_power, unpack, AdditiveGroup};
use crate::oa::{OrthogonalArray, SymbolMatrix};

/// Upper bound on the number of edges `q^(2k)` walked by [`euler_cycle_full`].
pub const CYCLE_EDGE_CAP: u128 = 1 << 20;

/// Closed walk on Γ(GF(q)^k, S) starting at 0.
///
/// Vertices are packed base-`q` indices with the first coordinate most
/// significant, the same order [`LinearCode::message`] uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerianCycle {
    q: usize,
    k: usize,
    vertices: Vec<usize>,
    multiplicity: usize,
}

impl EulerianCycle {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Vertex `j` as a vector in GF(q)^k.
    pub fn vertex(&self, j: usize) -> Vec<Symbol> {
        unpack(self.vertices[j], self.q, self.k).into_iter().map(|s| s as Symbol).collect()
    }

    /// Cyclic transitions `m_{j+1} − m_j` as packed indices.
    pub fn transitions(&self) -> Vec<usize> {
        let group = AdditiveGroup::of_field_power(self.q, self.k).expect("q is a prime power");
        let n = self.vertices.len();
        (0..n).map(|j| group.sub(self.vertices[(j + 1) % n], self.vertices[j])).collect()
    }
}

/// Euler cycle of Γ(GF(q)^k, GF(q)^k) by Hierholzer's algorithm.
///
/// Every vertex `v` has one out-edge `v → v + s` for each `s`, including the
/// self-loop `s = 0`; unused generators are taken in increasing index order
/// and the walk starts at 0. The result has length `q^(2k)` and uses every
/// edge once.
pub fn euler_cycle_full(q: usize, k: usize) -> Result<EulerianCycle> {
    if k == 0 {
        return Err(Error::InvalidParameter("group dimension must be >= 1".into()));
    }
    let group = AdditiveGroup::of_field_power(q, k)
        .ok_or_else(|| Error::InvalidParameter(format!("{q} is not a prime power")))?;
    let edges = (q as u128).pow(2 * k as u32);
    if edges > CYCLE_EDGE_CAP {
        return Err(Error::CapExceeded { what: "Euler cycle length", needed: edges, cap: CYCLE_EDGE_CAP });
    }
    let order = group.order();
    let mut next_gen = vec![0usize; order];
    let mut stack = vec![0usize];
    let mut circuit = Vec::with_capacity(edges as usize + 1);
    while let Some(&v) = stack.last() {
        if next_gen[v] < order {
            let s = next_gen[v];
            next_gen[v] += 1;
            stack.push(group.add(v, s));
        } else {
            circuit.push(v);
            stack.pop();
        }
    }
    circuit.reverse();
    // closing vertex repeats the start
    circuit.pop();
    debug_assert_eq!(circuit.len() as u128, edges);
    Ok(EulerianCycle { q, k, vertices: circuit, multiplicity: 1 })
}

/// Generating set observed on one row subset of an Eulerian array.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratingSet {
    /// Zero-based rows.
    pub rows: Vec<usize>,
    /// Distinct transitions, packed base-`q` and sorted.
    pub generators: Vec<usize>,
    /// Whether the generators are all of G^×t.
    pub full_group: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EulerCertificate {
    pub strength: usize,
    pub edge_multiplicity: usize,
    pub gensets: Vec<GeneratingSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum EulerViolation {
    /// A (vertex, generator) pair is traversed the wrong number of times.
    EdgeCount { rows: Vec<usize>, vertex: Vec<usize>, generator: Vec<usize>, count: usize, expected: Option<usize> },
    /// The transitions do not generate G^×t.
    NotGenerating { rows: Vec<usize>, generators: Vec<usize> },
    /// Row subsets disagree on the edge multiplicity.
    InconsistentMultiplicity { rows: Vec<usize>, multiplicity: usize, expected: usize },
}

impl fmt::Display for EulerViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EulerViolation::EdgeCount { rows, vertex, generator, count, expected } => {
                write!(f, "rows {rows:?}: edge from {vertex:?} by {generator:?} used {count} times")?;
                match expected {
                    Some(e) => write!(f, ", expected {e}"),
                    None => write!(f, ", and the column count is not a multiple of |G^t|·|S|"),
                }
            }
            EulerViolation::NotGenerating { rows, generators } => {
                write!(f, "rows {rows:?}: transitions {generators:?} do not generate the group")
            }
            EulerViolation::InconsistentMultiplicity { rows, multiplicity, expected } => {
                write!(f, "rows {rows:?}: edge multiplicity {multiplicity}, other subsets have {expected}")
            }
        }
    }
}

fn check_subset(m: &SymbolMatrix, q: usize, group: &AdditiveGroup, subset: &[usize]) -> std::result::Result<(usize, GeneratingSet), EulerViolation> {
    let t = subset.len();
    let order = group.order();
    let n = m.cols();
    let verts: Vec<usize> = (0..n).map(|j| m.tuple(subset, j, q)).collect();
    let mut counts = vec![0usize; order * order];
    let mut used = vec![false; order];
    for j in 0..n {
        let s = group.sub(verts[(j + 1) % n], verts[j]);
        counts[verts[j] * order + s] += 1;
        used[s] = true;
    }
    let generators: Vec<usize> = (0..order).filter(|&s| used[s]).collect();
    let per_edge = order * generators.len();
    let expected = n.is_multiple_of(per_edge).then_some(n / per_edge);
    for v in 0..order {
        for &s in &generators {
            let count = counts[v * order + s];
            if Some(count) != expected {
                return Err(EulerViolation::EdgeCount {
                    rows: subset.to_vec(),
                    vertex: unpack(v, q, t),
                    generator: unpack(s, q, t),
                    count,
                    expected,
                });
            }
        }
    }
    if !group.generates(&generators) {
        return Err(EulerViolation::NotGenerating { rows: subset.to_vec(), generators });
    }
    let full_group = generators.len() == order;
    Ok((expected.unwrap(), GeneratingSet { rows: subset.to_vec(), generators, full_group }))
}

/// Checks that every t-row projection of `m`, read as a cyclic walk on
/// G^×t with G the additive group of GF(q), is an Eulerian cycle of
/// Γ(G^×t, S) for S the set of its transitions, with one edge multiplicity
/// shared by all subsets.
pub fn verify_eulerian(m: &SymbolMatrix, q: usize, t: usize) -> std::result::Result<EulerCertificate, EulerViolation> {
    assert!(t >= 1 && t <= m.rows(), "strength {t} out of range for {} rows", m.rows());
    assert!(m.cols() > 0, "empty array");
    let group = AdditiveGroup::of_field_power(q, t).expect("q is a prime power");
    let subsets: Vec<Vec<usize>> = (0..m.rows()).combinations(t).collect();
    let results: Vec<_> = subsets.par_iter().map(|s| check_subset(m, q, &group, s)).collect();
    let mut gensets = Vec::with_capacity(results.len());
    let mut lambda = None;
    for r in results {
        let (l, set) = r?;
        match lambda {
            None => lambda = Some(l),
            Some(expected) if expected != l => {
                return Err(EulerViolation::InconsistentMultiplicity { rows: set.rows, multiplicity: l, expected })
            }
            _ => {}
        }
        gensets.push(set);
    }
    Ok(EulerCertificate { strength: t, edge_multiplicity: lambda.unwrap(), gensets })
}

/// An orthogonal array that also passes [`verify_eulerian`] at its strength.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerianOA {
    oa: OrthogonalArray,
    certificate: EulerCertificate,
}

impl EulerianOA {
    /// Verifies both the plain strength and the Eulerian property at `t`.
    pub fn new(entries: SymbolMatrix, q: usize, t: usize) -> Result<Self> {
        if prime_power(q).is_none() {
            return Err(Error::InvalidParameter(format!("{q} is not a prime power")));
        }
        if t == 0 || t > entries.rows() {
            return Err(Error::InvalidParameter(format!("strength {t} out of range")));
        }
        let oa = OrthogonalArray::new(entries, q, t)?;
        let certificate = verify_eulerian(oa.entries(), q, t).map_err(|v| Error::Verification(v.to_string()))?;
        Ok(Self { oa, certificate })
    }

    pub fn oa(&self) -> &OrthogonalArray {
        &self.oa
    }

    pub fn entries(&self) -> &SymbolMatrix {
        self.oa.entries()
    }

    pub fn strength(&self) -> usize {
        self.oa.strength()
    }

    pub fn edge_multiplicity(&self) -> usize {
        self.certificate.edge_multiplicity
    }

    pub fn certificate(&self) -> &EulerCertificate {
        &self.certificate
    }
}

/// Columns `G·m_j` for the vertices `m_j` of an Euler cycle on GF(q)^k.
///
/// The result is an Eulerian OA of strength `t = d⊥ − 1` whose every t-row
/// projection uses all of G^×t as generating set; the construction fails if
/// the verifier disagrees.
pub fn eulerian_oa_from_code(code: &LinearCode, cycle: &EulerianCycle, t: usize) -> Result<EulerianOA> {
    if cycle.q() != code.q() || cycle.k() != code.dim() {
        return Err(Error::InvalidParameter(format!(
            "cycle over GF({})^{} does not match a [{}, {}]_{} code",
            cycle.q(),
            cycle.k(),
            code.len(),
            code.dim(),
            code.q()
        )));
    }
    let columns: Vec<Vec<Symbol>> =
        (0..cycle.len()).into_par_iter().map(|j| code.encode_unchecked(&cycle.vertex(j))).collect();
    let eoa = EulerianOA::new(SymbolMatrix::from_columns(&columns)?, code.q(), t)?;
    if let Some(partial) = eoa.certificate.gensets.iter().find(|g| !g.full_group) {
        return Err(Error::Verification(format!("rows {:?} do not use the full group as generating set", partial.rows)));
    }
    Ok(eoa)
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;
    use std::sync::Arc;

    use super::*;
    use crate::code::hamming_code;
    use crate::field::gf_new;
    use crate::oa::{oa_from_code, verify_strength};

    /// Every Euler cycle of Γ(Z_2, {0, 1}) from vertex 0, by exhaustive search
    /// over edge orders.
    fn all_toy_cycles() -> Vec<Vec<usize>> {
        let edges = [(0usize, 0usize), (0, 1), (1, 1), (1, 0)];
        let mut out = Vec::new();
        fn walk(v: usize, used: &mut [bool; 4], path: &mut Vec<usize>, edges: &[(usize, usize); 4], out: &mut Vec<Vec<usize>>) {
            if used.iter().all(|&u| u) {
                if v == 0 {
                    out.push(path.clone());
                }
                return;
            }
            for (i, &(from, to)) in edges.iter().enumerate() {
                if !used[i] && from == v {
                    used[i] = true;
                    path.push(to);
                    walk(to, used, path, edges, out);
                    path.pop();
                    used[i] = false;
                }
            }
        }
        walk(0, &mut [false; 4], &mut vec![0], &edges, &mut out);
        out.into_iter().map(|mut p| { p.pop(); p }).collect()
    }

    #[test]
    fn toy_cycle() {
        let cycle = euler_cycle_full(2, 1).unwrap();
        assert_eq!(cycle.vertices(), &[0, 0, 1, 1]);
        assert_eq!(cycle.transitions(), vec![0, 1, 0, 1]);
        assert!(all_toy_cycles().contains(&cycle.vertices().to_vec()));
    }

    #[test]
    fn cycle_lengths_and_start() {
        assert_eq!(euler_cycle_full(4, 2).unwrap().len(), 256);
        assert_eq!(euler_cycle_full(3, 1).unwrap().len(), 9);
        for (q, k) in [(2, 1), (2, 3), (4, 1), (9, 1), (5, 2)] {
            assert_eq!(euler_cycle_full(q, k).unwrap().vertices()[0], 0);
        }
        assert!(matches!(euler_cycle_full(4, 6), Err(Error::CapExceeded { .. })));
        assert!(euler_cycle_full(6, 1).is_err());
    }

    #[test]
    fn cycle_uses_every_edge_once() {
        for (q, k) in [(2, 2), (3, 1), (4, 2), (9, 1)] {
            let cycle = euler_cycle_full(q, k).unwrap();
            let order = q.pow(k as u32);
            let trans = cycle.transitions();
            let mut pairs = HashMap::new();
            let mut visits = vec![0; order];
            let mut gens = vec![0; order];
            for (j, &v) in cycle.vertices().iter().enumerate() {
                *pairs.entry((v, trans[j])).or_insert(0) += 1;
                visits[v] += 1;
                gens[trans[j]] += 1;
            }
            assert_eq!(pairs.len(), order * order);
            assert!(pairs.values().all(|&c| c == 1));
            assert!(visits.iter().all(|&c| c == order));
            assert!(gens.iter().all(|&c| c == order));
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(euler_cycle_full(4, 2).unwrap(), euler_cycle_full(4, 2).unwrap());
    }

    fn dual_hamming() -> LinearCode {
        hamming_code(Arc::new(gf_new(2, 2).unwrap()), 2).unwrap().dual()
    }

    #[test]
    fn eulerian_oa_256_5_4_2() {
        let code = dual_hamming();
        let eoa = eulerian_oa_from_code(&code, &euler_cycle_full(4, 2).unwrap(), 2).unwrap();
        assert_eq!((eoa.oa().runs(), eoa.oa().factors(), eoa.oa().levels(), eoa.strength()), (256, 5, 4, 2));
        assert_eq!(eoa.edge_multiplicity(), 1);
        assert_eq!(eoa.oa().lambda(), 16);
        assert_eq!(eoa.certificate().gensets.len(), 10);
        assert!(eoa.certificate().gensets.iter().all(|g| g.full_group && g.generators.len() == 16));

        let mut col_counts = HashMap::new();
        for j in 0..256 {
            *col_counts.entry(eoa.entries().column(j)).or_insert(0) += 1;
        }
        assert_eq!(col_counts.len(), 16);
        assert!(col_counts.values().all(|&c| c == 16));
    }

    #[test]
    fn plain_codeword_order_is_not_eulerian() {
        let oa = oa_from_code(&dual_hamming(), 3).unwrap();
        let err = verify_eulerian(oa.entries(), 4, 2).unwrap_err();
        assert!(matches!(err, EulerViolation::EdgeCount { ref rows, .. } if rows.len() == 2));
    }

    #[test]
    fn toy_array_single_row() {
        let cycle = euler_cycle_full(2, 1).unwrap();
        let m = SymbolMatrix::from_rows(vec![cycle.vertices().iter().map(|&v| v as u8).collect()]).unwrap();
        let cert = verify_eulerian(&m, 2, 1).unwrap();
        assert_eq!(cert.edge_multiplicity, 1);
        assert_eq!(cert.gensets[0].generators, vec![0, 1]);
    }

    #[test]
    fn rows_of_eulerian_oa_are_eulerian_cycles() {
        let eoa = eulerian_oa_from_code(&dual_hamming(), &euler_cycle_full(4, 2).unwrap(), 2).unwrap();
        for r in 0..5 {
            let row = eoa.entries().select_rows(&[r]);
            let cert = verify_eulerian(&row, 4, 1).unwrap();
            assert!(cert.gensets[0].full_group);
            assert_eq!(cert.edge_multiplicity * 16, 256);
        }
    }

    #[test]
    fn binary_simplex_eulerian() {
        let code = hamming_code(Arc::new(gf_new(2, 1).unwrap()), 3).unwrap().dual();
        let eoa = eulerian_oa_from_code(&code, &euler_cycle_full(2, 3).unwrap(), 2).unwrap();
        assert_eq!(eoa.oa().runs(), 64);
        assert_eq!(verify_strength(eoa.entries(), 2, 2), Ok(16));
        // projection F_2^3 -> F_2^2 is 2-to-1 on vertices and on generators
        assert_eq!(eoa.edge_multiplicity(), 4);
    }

    #[test]
    fn mismatched_cycle_is_rejected() {
        assert!(eulerian_oa_from_code(&dual_hamming(), &euler_cycle_full(4, 1).unwrap(), 2).is_err());
    }

    #[test]
    fn non_generating_transitions() {
        // alternates 0,1,0,1 over GF(4): transitions {1} only, never reaching 2 or 3
        let m = SymbolMatrix::from_rows(vec![vec![0, 1, 0, 1]]).unwrap();
        assert!(verify_eulerian(&m, 4, 1).is_err());
        let m = SymbolMatrix::from_rows(vec![vec![0, 1, 1, 0, 2, 3, 3, 2]]).unwrap();
        assert!(verify_eulerian(&m, 4, 1).is_err());
    }
}
