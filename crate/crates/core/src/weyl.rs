//! The Heisenberg–Weyl projective representation of Z_d × Z_d, group
//! averaging, and tensor embedding of few-body operators.
//!
//! Weyl products carry phases that are never normalized away; everything
//! downstream uses the conjugation `U† X U`, which does not see them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldTable, Symbol};
use crate::matrix::{conjugate, zeros, ComplexMatrix};

/// Element `(a, b)` of Z_d × Z_d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[u32; 2]", into = "[u32; 2]")]
pub struct GroupLabel {
    pub a: u32,
    pub b: u32,
}

impl GroupLabel {
    pub const IDENTITY: GroupLabel = GroupLabel { a: 0, b: 0 };

    pub fn new(a: u32, b: u32, d: u32) -> Result<Self> {
        if a >= d || b >= d {
            return Err(Error::InvalidParameter(format!("label ({a}, {b}) out of range for d = {d}")));
        }
        Ok(Self { a, b })
    }

    pub fn add(self, other: Self, d: u32) -> Self {
        Self { a: (self.a + other.a) % d, b: (self.b + other.b) % d }
    }

    pub fn sub(self, other: Self, d: u32) -> Self {
        Self { a: (self.a + d - other.a) % d, b: (self.b + d - other.b) % d }
    }

    /// All d² labels, `a` varying slowest.
    pub fn all(d: u32) -> impl Iterator<Item = GroupLabel> {
        (0..d).flat_map(move |a| (0..d).map(move |b| GroupLabel { a, b }))
    }
}

impl From<[u32; 2]> for GroupLabel {
    fn from([a, b]: [u32; 2]) -> Self {
        Self { a, b }
    }
}

impl From<GroupLabel> for [u32; 2] {
    fn from(l: GroupLabel) -> Self {
        [l.a, l.b]
    }
}

/// Shift `S = Σ |k⟩⟨k+1|` and clock `T = Σ ω^k |k⟩⟨k|`, ω = e^{2πi/d}.
pub fn shift_clock(d: usize) -> (ComplexMatrix, ComplexMatrix) {
    assert!(d >= 2, "local dimension must be >= 2");
    let mut s = zeros(d);
    let mut t = zeros(d);
    for k in 0..d {
        s[(k, (k + 1) % d)] = Complex64::new(1.0, 0.0);
        t[(k, k)] = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64);
    }
    (s, t)
}

/// `U_(a,b) = S^a T^b`.
pub fn weyl(d: usize, label: GroupLabel) -> ComplexMatrix {
    assert!((label.a as usize) < d && (label.b as usize) < d, "label {label:?} out of range for d = {d}");
    // S^a T^b has a single nonzero per row: row k, column k+a, value ω^{b(k+a)}
    let mut u = zeros(d);
    for k in 0..d {
        let col = (k + label.a as usize) % d;
        let phase = 2.0 * PI * ((label.b as usize * col) % d) as f64 / d as f64;
        u[(k, col)] = Complex64::from_polar(1.0, phase);
    }
    u
}

/// Π_G(X) = (1/d²) Σ_g U_g† X U_g over Z_d × Z_d.
pub fn group_average(d: usize, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if x.nrows() != d || x.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.nrows() });
    }
    let mut acc = zeros(d);
    for g in GroupLabel::all(d as u32) {
        acc += conjugate(x, &weyl(d, g));
    }
    Ok(acc.unscale((d * d) as f64))
}

/// Π over G^×t acting on (C^d)^⊗t by tensor products of Weyl operators.
pub fn tensor_group_average(d: usize, t: usize, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dim = d.pow(t as u32);
    if x.nrows() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: x.nrows() });
    }
    let labels: Vec<GroupLabel> = GroupLabel::all(d as u32).collect();
    let count = labels.len().pow(t as u32);
    let mut acc = zeros(dim);
    for idx in 0..count {
        let u = crate::group::unpack(idx, labels.len(), t)
            .into_iter()
            .map(|l| weyl(d, labels[l]))
            .reduce(|a, b| a.kronecker(&b))
            .unwrap();
        acc += conjugate(x, &u);
    }
    Ok(acc.unscale(count as f64))
}

/// Embeds `x` on the listed qudits of an n-qudit register, identity elsewhere.
///
/// Qudits are zero-based with qudit 0 the most significant tensor factor.
pub fn embed(x: &ComplexMatrix, support: &[usize], n: usize, d: usize) -> Result<ComplexMatrix> {
    let t = support.len();
    if t == 0 || support.windows(2).any(|w| w[0] >= w[1]) || support[t - 1] >= n {
        return Err(Error::BadSupport(support.to_vec()));
    }
    let sub_dim = d.pow(t as u32);
    if x.nrows() != sub_dim || x.ncols() != sub_dim {
        return Err(Error::DimensionMismatch { expected: sub_dim, got: x.nrows() });
    }
    let complement: Vec<usize> = (0..n).filter(|k| !support.contains(k)).collect();
    let offsets = |positions: &[usize]| -> Vec<usize> {
        (0..d.pow(positions.len() as u32))
            .map(|idx| {
                crate::group::unpack(idx, d, positions.len())
                    .iter()
                    .zip(positions)
                    .map(|(&digit, &pos)| digit * d.pow((n - 1 - pos) as u32))
                    .sum()
            })
            .collect()
    };
    let sup_off = offsets(support);
    let comp_off = offsets(&complement);
    let mut out = zeros(d.pow(n as u32));
    for &e in &comp_off {
        for (a, &ra) in sup_off.iter().enumerate() {
            for (b, &cb) in sup_off.iter().enumerate() {
                out[(ra + e, cb + e)] = x[(a, b)];
            }
        }
    }
    Ok(out)
}

/// Weyl operator labeled by a field symbol through its coordinates in GF(d²).
pub fn weyl_from_field(field: &FieldTable, elem: Symbol) -> Result<ComplexMatrix> {
    let d = field.qudit_dim()? as usize;
    let (a, b) = field.coords(elem)?;
    Ok(weyl(d, GroupLabel { a, b }))
}

/// Group label of a field symbol of GF(d²).
pub fn label_from_field(field: &FieldTable, elem: Symbol) -> Result<GroupLabel> {
    let (a, b) = field.coords(elem)?;
    Ok(GroupLabel { a, b })
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::field::gf_new;
    use crate::matrix::{c64, frobenius, identity, is_unitary, kron, random_hermitian, random_matrix};

    fn pauli() -> [ComplexMatrix; 3] {
        let x = ComplexMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)]);
        let y = ComplexMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(0., -1.), c64(0., 1.), c64(0., 0.)]);
        let z = ComplexMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(-1., 0.)]);
        [x, y, z]
    }

    #[test]
    fn qubit_shift_and_clock_are_paulis() {
        let [x, _, z] = pauli();
        let (s, t) = shift_clock(2);
        assert!(frobenius(&(s - x)) < 1e-15);
        assert!(frobenius(&(t - z)) < 1e-15);
    }

    #[test]
    fn clock_shift_commutation_d3() {
        let (s, t) = shift_clock(3);
        let omega = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        // S|j> = |j-1>, so ST|j> = ω^j |j-1> while TS|j> = ω^(j-1) |j-1>
        assert!(frobenius(&(&s * &t - (&t * &s) * omega)) < 1e-14);
        assert!(frobenius(&(&t * &s - (&s * &t) * omega)) > 1.0);
    }

    #[test]
    fn shift_has_order_d() {
        for d in 2..6 {
            let (s, _) = shift_clock(d);
            let mut p = identity(d);
            for _ in 0..d {
                p = &p * &s;
            }
            assert!(frobenius(&(p - identity(d))) < 1e-14);
        }
    }

    #[test]
    fn weyl_matches_shift_clock_powers() {
        for d in 2..5 {
            let (s, t) = shift_clock(d);
            for g in GroupLabel::all(d as u32) {
                let mut expected = identity(d);
                for _ in 0..g.a {
                    expected = &expected * &s;
                }
                for _ in 0..g.b {
                    expected = &expected * &t;
                }
                let u = weyl(d, g);
                assert!(frobenius(&(&u - expected)) < 1e-13);
                assert!(is_unitary(&u, 1e-12));
                if g != GroupLabel::IDENTITY {
                    assert!(u.trace().norm() < 1e-13);
                }
            }
        }
        assert_eq!(weyl(3, GroupLabel::IDENTITY), identity(3));
    }

    #[test]
    fn qubit_xz_is_minus_i_y() {
        let [_, y, _] = pauli();
        let u = weyl(2, GroupLabel { a: 1, b: 1 });
        assert!(frobenius(&(u - y * c64(0.0, -1.0))) < 1e-15);
    }

    #[test]
    fn projectivity() {
        for d in [2usize, 3] {
            for l1 in GroupLabel::all(d as u32) {
                for l2 in GroupLabel::all(d as u32) {
                    let prod = weyl(d, l1) * weyl(d, l2);
                    let target = weyl(d, l1.add(l2, d as u32));
                    let phase = (target.adjoint() * &prod).trace() / d as f64;
                    assert!((phase.norm() - 1.0).abs() < 1e-13);
                    assert!(frobenius(&(prod - target * phase)) < 1e-13);
                }
            }
        }
    }

    #[test]
    fn averaging_cases() {
        let [x, _, _] = pauli();
        assert!(frobenius(&(group_average(2, &identity(2)).unwrap() - identity(2))) < 1e-15);
        assert!(frobenius(&group_average(2, &x).unwrap()) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let m = random_matrix(&mut rng, 3);
        let direct = group_average(3, &m).unwrap();
        let formula = identity(3) * (m.trace() / 3.0);
        assert!(frobenius(&(direct - formula)) < 1e-12);
        assert!(group_average(3, &identity(2)).is_err());
    }

    #[test]
    fn averaging_is_an_invariant_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for d in [2usize, 3] {
            let m = random_matrix(&mut rng, d);
            let once = group_average(d, &m).unwrap();
            let twice = group_average(d, &once).unwrap();
            assert!(frobenius(&(&twice - &once)) < 1e-12);
            for g in GroupLabel::all(d as u32) {
                let u = weyl(d, g);
                assert!(frobenius(&(&once * &u - &u * &once)) < 1e-12);
            }
        }
    }

    #[test]
    fn embedding() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_matrix(&mut rng, 2);
        let b = random_matrix(&mut rng, 2);
        let e = embed(&kron(&a, &b), &[0, 2], 3, 2).unwrap();
        let explicit = kron(&kron(&a, &identity(2)), &b);
        assert!(frobenius(&(e - explicit)) < 1e-14);

        assert_eq!(embed(&identity(4), &[1, 3], 4, 2).unwrap(), identity(16));

        let x = random_matrix(&mut rng, 3);
        let e = embed(&x, &[1], 3, 3).unwrap();
        assert!((e.trace() - x.trace() * 9.0).norm() < 1e-12);

        assert!(matches!(embed(&a, &[3], 3, 2), Err(Error::BadSupport(_))));
        assert!(matches!(embed(&identity(4), &[1, 1], 3, 2), Err(Error::BadSupport(_))));
        assert!(matches!(embed(&identity(4), &[0], 3, 2), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn embedding_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let x = random_matrix(&mut rng, 4);
            let y = random_matrix(&mut rng, 4);
            let lhs = embed(&(&x * &y), &[1, 3], 4, 2).unwrap();
            let rhs = embed(&x, &[1, 3], 4, 2).unwrap() * embed(&y, &[1, 3], 4, 2).unwrap();
            assert!(frobenius(&(lhs - rhs)) < 1e-12);
        }
    }

    #[test]
    fn field_labels() {
        let f = gf_new(2, 2).unwrap();
        let [x, y, z] = pauli();
        assert_eq!(weyl_from_field(&f, 0).unwrap(), identity(2));
        let expected = [identity(2), x, z, y];
        for (elem, target) in expected.iter().enumerate() {
            let u = weyl_from_field(&f, elem as u8).unwrap();
            assert!(((u.adjoint() * target).trace().norm() - 2.0).abs() < 1e-14);
        }
        assert!(weyl_from_field(&gf_new(2, 3).unwrap(), 1).is_err());
    }

    #[test]
    fn field_labelled_average_kills_traceless() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for p in [2u32, 3] {
            let f = gf_new(p, 2).unwrap();
            let d = p as usize;
            let x = random_hermitian(&mut rng, d, true);
            let mut acc = zeros(d);
            for e in 0..f.order() as u8 {
                acc += conjugate(&x, &weyl_from_field(&f, e).unwrap());
            }
            assert!(frobenius(&acc) < 1e-13);
        }
    }

    #[test]
    fn tensor_average_is_irreducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let m = random_matrix(&mut rng, 4);
        let avg = tensor_group_average(2, 2, &m).unwrap();
        assert!(frobenius(&(avg - identity(4) * (m.trace() / 4.0))) < 1e-12);
    }
}
