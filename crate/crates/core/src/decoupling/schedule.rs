use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cayley::EulerianOA;
use crate::error::{Error, Result};
use crate::field::{gf_new, FieldTable};
use crate::group::prime_power;
use crate::matrix::{distance_mod_phase, expm_hermitian, frobenius, hermitian_eigen, is_hermitian, spectral_apply, unitary_eigen, zeros, ComplexMatrix};
use crate::oa::{OrthogonalArray, SymbolMatrix};
use crate::weyl::{label_from_field, weyl, GroupLabel};

/// Hermitian `h` with `exp(−i h Δ) = U`, from the principal logarithm of `U`.
///
/// Eigen-angles are taken in (−π, π], so `‖h‖ ≤ π/Δ`. Since `h` is a function
/// of `U` it lies in the span of the powers of `U`.
pub fn generator_hamiltonian(u: &ComplexMatrix, delta: f64) -> Result<ComplexMatrix> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::InvalidParameter(format!("segment duration must be positive, got {delta}")));
    }
    let (angles, vectors) = unitary_eigen(u)?;
    let h = spectral_apply(&angles, &vectors, |theta| (-theta / delta).into());
    Ok((&h + h.adjoint()).scale(0.5))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleMode {
    /// Labels are the held propagators `g_kj`; switching is instantaneous.
    BangBang,
    /// Labels are the generators `s_kj` realized over the segment by `h_kj`.
    Eulerian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub labels: Vec<GroupLabel>,
    #[serde(with = "pairs_vec")]
    pub hamiltonians: Vec<ComplexMatrix>,
}

/// N equal segments of per-qudit controls; the cycle time is `N·Δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub n: usize,
    pub d: usize,
    #[serde(rename = "N")]
    pub segment_count: usize,
    pub delta: f64,
    pub mode: ScheduleMode,
    pub segments: Vec<Segment>,
}

mod pairs_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::matrix::{from_pairs, to_pairs, ComplexMatrix};

    pub fn serialize<S: Serializer>(ms: &[ComplexMatrix], s: S) -> Result<S::Ok, S::Error> {
        ms.iter().map(to_pairs).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<ComplexMatrix>, D::Error> {
        let raw = Vec::<Vec<Vec<[f64; 2]>>>::deserialize(d)?;
        raw.iter().map(|m| from_pairs(m).map_err(serde::de::Error::custom)).collect()
    }
}

/// GF(d²) for an array over `q = d²` levels with prime `d`.
pub(crate) fn label_field(q: usize) -> Result<FieldTable> {
    match prime_power(q) {
        Some((p, 2)) => gf_new(p, 2),
        _ => Err(Error::NotPrimeSquare(q as u32)),
    }
}

fn labels_of(entries: &SymbolMatrix, field: &FieldTable) -> Result<Vec<Vec<GroupLabel>>> {
    (0..entries.rows())
        .map(|k| entries.row(k).iter().map(|&g| label_from_field(field, g)).collect())
        .collect()
}

/// Segment `j` holds `⊗_k U_{g_kj}` for its whole duration.
pub fn bangbang_schedule(oa: &OrthogonalArray, delta: f64) -> Result<Schedule> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::InvalidParameter(format!("segment duration must be positive, got {delta}")));
    }
    let field = label_field(oa.levels())?;
    let d = field.qudit_dim()? as usize;
    let rows = labels_of(oa.entries(), &field)?;
    let segments = (0..oa.runs())
        .map(|j| Segment { labels: rows.iter().map(|r| r[j]).collect(), hamiltonians: vec![zeros(d); rows.len()] })
        .collect();
    Ok(Schedule { n: oa.factors(), d, segment_count: oa.runs(), delta, mode: ScheduleMode::BangBang, segments })
}

/// Bounded-strength schedule: qudit `k` applies the generator
/// `s_kj = g_{k,j+1} − g_kj` (cyclic) over segment `j` with the constant
/// Hamiltonian [`generator_hamiltonian`]`(U_{s_kj}, Δ)`.
pub fn euler_schedule(eoa: &EulerianOA, delta: f64) -> Result<Schedule> {
    schedule_from_walk(eoa.entries(), eoa.oa().levels(), delta)
}

/// [`euler_schedule`] for any symbol matrix, Eulerian or not.
pub fn schedule_from_walk(entries: &SymbolMatrix, q: usize, delta: f64) -> Result<Schedule> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::InvalidParameter(format!("segment duration must be positive, got {delta}")));
    }
    let field = label_field(q)?;
    let d = field.qudit_dim()? as usize;
    let rows = labels_of(entries, &field)?;
    let n_seg = entries.cols();
    let mut generators: HashMap<GroupLabel, ComplexMatrix> = HashMap::new();
    for s in GroupLabel::all(d as u32) {
        generators.insert(s, generator_hamiltonian(&weyl(d, s), delta)?);
    }
    let segments = (0..n_seg)
        .map(|j| {
            let labels: Vec<GroupLabel> = rows.iter().map(|r| r[(j + 1) % n_seg].sub(r[j], d as u32)).collect();
            let hamiltonians = labels.iter().map(|s| generators[s].clone()).collect();
            Segment { labels, hamiltonians }
        })
        .collect();
    Ok(Schedule { n: entries.rows(), d, segment_count: n_seg, delta, mode: ScheduleMode::Eulerian, segments })
}

impl Schedule {
    pub fn cycle_time(&self) -> f64 {
        self.segment_count as f64 * self.delta
    }

    /// Unitary applied to qudit `k` by segment `j`: the held Weyl operator in
    /// bang-bang mode, `exp(−i h_kj Δ)` otherwise.
    pub fn segment_unitary(&self, j: usize, k: usize) -> ComplexMatrix {
        match self.mode {
            ScheduleMode::BangBang => weyl(self.d, self.segments[j].labels[k]),
            ScheduleMode::Eulerian => expm_hermitian(&self.segments[j].hamiltonians[k], self.delta),
        }
    }

    /// Largest operator norm of any control Hamiltonian.
    pub fn max_control_norm(&self) -> f64 {
        self.segments
            .iter()
            .flat_map(|s| &s.hamiltonians)
            .map(|h| hermitian_eigen(h).0.into_iter().map(f64::abs).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    /// Re-checks shape and, in Eulerian mode, that every `h_kj` is Hermitian,
    /// bounded by π/Δ and realizes `U_{s_kj}` up to phase.
    pub fn verify(&self, eps: f64) -> Result<()> {
        if self.segments.len() != self.segment_count {
            return Err(Error::DimensionMismatch { expected: self.segment_count, got: self.segments.len() });
        }
        if !self.delta.is_finite() || self.delta <= 0.0 || self.d < 2 {
            return Err(Error::InvalidParameter("schedule needs Δ > 0 and d >= 2".into()));
        }
        let bound = std::f64::consts::PI / self.delta * (1.0 + 1e-12);
        for (j, seg) in self.segments.iter().enumerate() {
            if seg.labels.len() != self.n || seg.hamiltonians.len() != self.n {
                return Err(Error::DimensionMismatch { expected: self.n, got: seg.labels.len() });
            }
            for (k, (label, h)) in seg.labels.iter().zip(&seg.hamiltonians).enumerate() {
                GroupLabel::new(label.a, label.b, self.d as u32)?;
                if h.nrows() != self.d || !is_hermitian(h, eps) {
                    return Err(Error::Verification(format!("segment {j}, qudit {k}: control is not a Hermitian d×d matrix")));
                }
                match self.mode {
                    ScheduleMode::BangBang => {
                        if frobenius(h) > eps {
                            return Err(Error::Verification(format!("segment {j}, qudit {k}: bang-bang segment carries a control Hamiltonian")));
                        }
                    }
                    ScheduleMode::Eulerian => {
                        let u = expm_hermitian(h, self.delta);
                        let dist = distance_mod_phase(&u, &weyl(self.d, *label));
                        if dist > 1e3 * eps * self.d as f64 {
                            return Err(Error::Verification(format!(
                                "segment {j}, qudit {k}: exp(-i h Δ) misses U_{label:?} by {dist:e}"
                            )));
                        }
                        let norm = hermitian_eigen(h).0.into_iter().map(f64::abs).fold(0.0, f64::max);
                        if norm > bound {
                            return Err(Error::Verification(format!("segment {j}, qudit {k}: ‖h‖ = {norm} exceeds π/Δ")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
